// Asymptotic intervals for the pole and the memory parameter.
use polefinder::prelude::*;

fn main() -> Result<()> {
    let n = 1024;
    let cfg = EstimatorConfig::defaults(n)?;
    let x = simulate(&SimModel::new(SimFamily::GegenbauerHalfPi, 0.6, n, 3)?)?;
    let est = estimate_pipeline(&x, &cfg)?;
    let pole = pole_ci(&est.pole, est.memory.alpha, n, cfg.k, cfg.psi.constants(), 0.95)?;
    let alpha = alpha_ci(&est.memory, cfg.m, cfg.w.constants(), 0.95, None)?;
    println!("pole  {:.4} in [{:.4}, {:.4}] (true {:.4})", pole.center, pole.lower, pole.upper, std::f64::consts::FRAC_PI_2);
    println!("alpha {:.4} in [{:.4}, {:.4}] (true 0.6)", alpha.center, alpha.lower, alpha.upper);
    let corrected = alpha_ci(&est.memory, cfg.m, cfg.w.constants(), 0.95, Some(BiasInputs { c: 1.0, log_g_dd: -0.5 }))?;
    println!("alpha with bias correction {:.4}, shift {:.5}", corrected.center, corrected.bias_correction);
    Ok(())
}
