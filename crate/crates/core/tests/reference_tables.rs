//! Single-cell checks against the published simulation tables, 2500
//! replications each. Tolerances: bias ±max(1, 3·sd/50) index units or the
//! stated band, sd ±25% (±30% for the log-periodogram pole).

use polefinder::estimators::{log_periodogram_alpha, EstimatorConfig};
use polefinder::montecarlo::{replicate, run_mc, BandwidthOverrides, CellRecord, EstimatorKind, MCConfig};
use polefinder::simulate::SimFamily;
use polefinder::spectral::periodogram;

const SEED: u64 = 20070401;

fn cell(family: SimFamily, alpha: f64, n: usize, kind: EstimatorKind) -> CellRecord {
    let cfg = MCConfig {
        families: vec![family],
        alphas: vec![alpha],
        ns: vec![n],
        reps: 2500,
        base_seed: SEED,
        bandwidths: BandwidthOverrides::default(),
        estimators: vec![kind],
    };
    run_mc(&cfg).unwrap().records.remove(0)
}

fn assert_cell(rec: &CellRecord, bias: f64, bias_tol: f64, sd: f64, sd_tol: f64) {
    assert!(
        (rec.bias - bias).abs() <= bias_tol,
        "bias {} outside {bias} ± {bias_tol}",
        rec.bias
    );
    assert!(
        (rec.sd - sd).abs() <= sd_tol * sd,
        "sd {} outside {sd} ± {}%",
        rec.sd,
        sd_tol * 100.0
    );
}

#[test]
fn farima_02_n256_pole_psi() {
    let rec = cell(SimFamily::FarimaZeroPole, 0.2, 256, EstimatorKind::PolePsi);
    assert_cell(&rec, 9.35, 1.0, 8.33, 0.25);
}

#[test]
fn farima_08_n1024_pole_psi_mean() {
    let rec = cell(SimFamily::FarimaZeroPole, 0.8, 1024, EstimatorKind::PolePsi);
    assert!((rec.bias - 2.62).abs() <= 0.5, "mean q_hat {}", rec.bias);
}

#[test]
fn farima_08_n256_pole_log() {
    let rec = cell(SimFamily::FarimaZeroPole, 0.8, 256, EstimatorKind::PoleLog);
    assert!((rec.bias - 4.85).abs() <= 0.7, "mean q_tilde {}", rec.bias);
    assert!((rec.sd - 5.25).abs() <= 0.25 * 5.25, "sd {}", rec.sd);
}

#[test]
fn gegenbauer_08_n1024_pole_log() {
    let rec = cell(SimFamily::GegenbauerHalfPi, 0.8, 1024, EstimatorKind::PoleLog);
    assert_cell(&rec, -0.060, 1.0, 13.52, 0.30);
}

#[test]
fn gegenbauer_06_n1024_pole_psi_mean() {
    let rec = cell(SimFamily::GegenbauerHalfPi, 0.6, 1024, EstimatorKind::PolePsi);
    assert!((rec.bias - 0.063).abs() <= 0.3, "mean q_hat - 256 = {}", rec.bias);
}

#[test]
fn gegenbauer_04_n1024_two_step_at_estimated_pole() {
    let rec = cell(SimFamily::GegenbauerHalfPi, 0.4, 1024, EstimatorKind::TwoStepAtHat);
    assert_cell(&rec, -0.017, 0.01, 0.020, 0.25);
}

#[test]
fn farima_04_n256_log_periodogram_known_pole_band_64() {
    let cfg = EstimatorConfig::defaults(256).unwrap();
    assert_eq!(cfg.m, 64);
    let est = replicate(SimFamily::FarimaZeroPole, 0.4, 256, SEED, 2500, |_, x| {
        Ok(log_periodogram_alpha(0, &periodogram(x), 64)?.alpha - 0.4)
    })
    .unwrap();
    let r = est.len() as f64;
    let bias = est.iter().sum::<f64>() / r;
    let sd = (est.iter().map(|e| (e - bias).powi(2)).sum::<f64>() / (r - 1.0)).sqrt();
    assert!((bias + 0.003).abs() <= 0.01, "bias {bias}");
    assert!((sd - 0.089).abs() <= 0.25 * 0.089, "sd {sd}");
}
