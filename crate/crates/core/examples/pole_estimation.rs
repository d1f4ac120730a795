// Pole location and memory estimates for the three test models.
use polefinder::prelude::*;

fn main() -> Result<()> {
    let n = 1024;
    let cfg = EstimatorConfig::defaults(n)?;
    for family in [SimFamily::FarimaZeroPole, SimFamily::GegenbauerHalfPi, SimFamily::FlippedPi] {
        let x = simulate(&SimModel::new(family, 0.6, n, 42)?)?;
        let est = estimate_pipeline(&x, &cfg)?;
        let grid = periodogram(&x);
        let log = log_periodogram_pole(&grid, cfg.k)?;
        let log_alpha = log_periodogram_alpha(log.q_hat, &grid, cfg.m)?;
        println!(
            "{:<12} true q {:>4} | q_hat {:>4} ({:?}) alpha {:.3} | q_tilde {:>4} alpha {:.3}",
            family.name(),
            family.pole_index(n),
            est.pole.q_hat,
            est.pole.boundary_regime,
            est.memory.alpha,
            log.q_hat,
            log_alpha.alpha
        );
    }
    Ok(())
}
