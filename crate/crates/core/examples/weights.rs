// Integral constants of the built-in weights and of a discretised band.
use polefinder::estimators::BandWeights;
use polefinder::prelude::*;

fn show(name: &str, spec: &WeightSpec) {
    let c = spec.constants();
    println!("{name}: integral {:.2e}, h {:.10}, Phi^2 {:.10}", c.integral, c.h, c.phi_sq);
    println!("    variance ratio {:.10}", c.variance_ratio());
    match (c.varsigma, c.psi_bar_dd) {
        (Some(v), Some(d)) => println!("    varsigma {v:.10}, psi_bar'' {d:.10}"),
        _ => println!("    derivative constants undefined"),
    }
}

fn main() -> Result<()> {
    let psi = WeightSpec::psi_paper();
    let w = WeightSpec::w_paper();
    show("psi", &psi);
    show("w", &w);
    for k in [8, 32, 128] {
        let band = BandWeights::new(&psi, k)?;
        println!("psi band k = {k}: h_bar {:.8} (continuum {:.8})", band.h_bar(), psi.constants().h);
    }
    Ok(())
}
