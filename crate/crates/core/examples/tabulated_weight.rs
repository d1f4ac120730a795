// A weight supplied as a table and used for the pole search.
use polefinder::estimators::{pole_search, BandWeights};
use polefinder::prelude::*;
use polefinder::weights::psi;

fn main() -> Result<()> {
    let us: Vec<f64> = (1..200).map(|i| i as f64 / 200.0).collect();
    let values = us.iter().map(|&u| psi(u)).collect::<Result<Vec<_>>>()?;
    let table = WeightSpec::tabulated(&us, &values)?;
    let builtin = WeightSpec::psi_paper();
    println!("h tabulated {:.8}, built-in {:.8}", table.constants().h, builtin.constants().h);

    let n = 1024;
    let x = simulate(&SimModel::new(SimFamily::GegenbauerHalfPi, 0.8, n, 5)?)?;
    let spec = averaged_periodogram(&periodogram(&x), 9)?;
    for (name, w) in [("tabulated", &table), ("built-in", &builtin)] {
        let est = pole_search(&spec, &BandWeights::new(w, 24)?)?;
        println!("{name:<10} q_hat {}", est.q_hat);
    }
    Ok(())
}
