// Runs a bundled Monte Carlo design; pass a config path to override.
// cargo run --release --example monte_carlo -- configs/table1_reduced.json
use polefinder::prelude::*;

fn main() -> Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/table1_reduced.json").into());
    let cfg = MCConfig::from_json(&std::fs::read_to_string(&path)?)?;
    let report = run_mc(&cfg)?;
    print!("{}", report.to_table());
    Ok(())
}
