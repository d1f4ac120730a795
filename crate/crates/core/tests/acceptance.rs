//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::ExitCode;

use polefinder::estimators::{
    alpha_hat_at, estimate_pipeline, log_periodogram_alpha, two_step_alpha_smoothed, BandWeights,
    EstimatorConfig,
};
use polefinder::inference::{alpha_ci, pole_ci};
use polefinder::montecarlo::{
    replicate, run_mc, run_mc_with_workers, BandwidthOverrides, EstimatorKind, MCConfig, MCReport,
};
use polefinder::simulate::SimFamily;
use polefinder::spectral::{fourier_frequency, PeriodogramGrid, SmoothedSpectrum};
use polefinder::weights::WeightSpec;
use statrs::function::gamma::ln_gamma;

const BASE_SEED: u64 = 20070401;
const ALPHAS: [f64; 4] = [0.2, 0.4, 0.6, 0.8];

/// Reference pole-estimator table: `(bias, sd)` of `q̂` then of `q̃`, per α.
struct Table1Row {
    family: SimFamily,
    n: usize,
    hat: [(f64, f64); 4],
    tilde: [(f64, f64); 4],
}

const TABLE1: [Table1Row; 4] = [
    Table1Row {
        family: SimFamily::FarimaZeroPole,
        n: 256,
        hat: [(9.35, 8.33), (6.38, 6.96), (4.24, 5.39), (2.80, 4.04)],
        tilde: [(9.26, 7.88), (7.32, 6.85), (5.94, 6.01), (4.85, 5.25)],
    },
    Table1Row {
        family: SimFamily::FarimaZeroPole,
        n: 1024,
        hat: [(15.40, 15.50), (8.43, 10.74), (4.81, 7.64), (2.62, 5.76)],
        tilde: [(22.91, 25.31), (15.55, 20.89), (9.60, 14.02), (6.73, 9.96)],
    },
    Table1Row {
        family: SimFamily::GegenbauerHalfPi,
        n: 256,
        hat: [(0.003, 7.64), (-0.084, 5.33), (-0.091, 2.96), (-0.054, 1.56)],
        tilde: [(0.209, 9.59), (0.270, 9.21), (0.272, 8.66), (0.320, 7.28)],
    },
    Table1Row {
        family: SimFamily::GegenbauerHalfPi,
        n: 1024,
        hat: [(0.051, 11.87), (0.117, 4.77), (0.063, 1.89), (0.216, 1.13)],
        tilde: [(0.435, 27.89), (0.144, 25.77), (-0.213, 21.30), (-0.060, 13.52)],
    },
];

/// Reference memory-estimator cells: `(bias, sd)` for the two-step estimator
/// at the true and at the estimated pole, then the log-periodogram estimator
/// at the true and at its own estimated pole.
const TABLE2: [(SimFamily, usize, f64, [(f64, f64); 4]); 4] = [
    (
        SimFamily::FarimaZeroPole,
        256,
        0.2,
        [(-0.020, 0.064), (-0.019, 0.057), (-0.001, 0.089), (-0.015, 0.084)],
    ),
    (
        SimFamily::FarimaZeroPole,
        256,
        0.4,
        [(-0.022, 0.067), (-0.030, 0.065), (-0.003, 0.089), (-0.043, 0.090)],
    ),
    (
        SimFamily::GegenbauerHalfPi,
        1024,
        0.4,
        [(-0.015, 0.024), (-0.017, 0.020), (-0.004, 0.038), (-0.064, 0.069)],
    ),
    (
        SimFamily::GegenbauerHalfPi,
        1024,
        0.6,
        [(-0.007, 0.028), (0.003, 0.024), (-0.006, 0.038), (-0.061, 0.096)],
    ),
];

const TABLE2_ROWS: [EstimatorKind; 4] = [
    EstimatorKind::TwoStepAtTrue,
    EstimatorKind::TwoStepAtHat,
    EstimatorKind::LogAtTrue,
    EstimatorKind::LogAtTilde,
];

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, summary: impl Into<String>, details: Vec<String>) -> Self {
        Self {
            pass,
            summary: summary.into(),
            details,
        }
    }
}

fn full_design() -> MCReport {
    let cfg = MCConfig {
        families: vec![SimFamily::FarimaZeroPole, SimFamily::GegenbauerHalfPi],
        alphas: ALPHAS.to_vec(),
        ns: vec![256, 1024],
        reps: 2500,
        base_seed: BASE_SEED,
        bandwidths: BandwidthOverrides::default(),
        estimators: EstimatorKind::ALL.to_vec(),
    };
    run_mc(&cfg).expect("full design")
}

fn within_rel(x: f64, target: f64, rel: f64) -> bool {
    (x - target).abs() <= rel * target.abs()
}

fn criterion_1(report: &MCReport) -> Outcome {
    let mut details = Vec::new();
    let mut failures = 0;
    let mut total = 0;
    for row in &TABLE1 {
        for (i, &alpha) in ALPHAS.iter().enumerate() {
            for (kind, (bias, sd), sd_tol) in [
                (EstimatorKind::PolePsi, row.hat[i], 0.25),
                (EstimatorKind::PoleLog, row.tilde[i], 0.30),
            ] {
                let rec = report.record(row.family, row.n, alpha, kind).unwrap();
                let bias_tol = f64::max(1.0, 3.0 * sd / 50.0);
                let ok = (rec.bias - bias).abs() <= bias_tol && within_rel(rec.sd, sd, sd_tol);
                total += 1;
                if !ok {
                    failures += 1;
                }
                details.push(format!(
                    "{} {:<10} n={:<5} a={} {:<8} mean {:>8.3} vs {:>7.3}±{:.2}  sd {:>7.3} vs {:>6.2}±{:.0}%",
                    if ok { "ok  " } else { "MISS" },
                    row.family.name(),
                    row.n,
                    alpha,
                    kind.name(),
                    rec.bias,
                    bias,
                    bias_tol,
                    rec.sd,
                    sd,
                    sd_tol * 100.0
                ));
            }
        }
    }
    Outcome::new(
        failures == 0,
        format!("pole-estimator table, 2500 reps: {}/{} cells within tolerance", total - failures, total),
        details,
    )
}

fn criterion_2(report: &MCReport) -> Outcome {
    let mut details = Vec::new();
    let mut failures = 0;
    let mut total = 0;
    for (family, n, alpha, rows) in &TABLE2 {
        for (kind, (bias, sd)) in TABLE2_ROWS.iter().zip(rows) {
            let rec = report.record(*family, *n, *alpha, *kind).unwrap();
            let ok = (rec.bias - bias).abs() <= 0.01 && within_rel(rec.sd, *sd, 0.25);
            total += 1;
            if !ok {
                failures += 1;
            }
            details.push(format!(
                "{} {:<10} n={:<5} a={} {:<17} bias {:>7.4} vs {:>7.3}±0.01  sd {:.4} vs {:.3}±25%",
                if ok { "ok  " } else { "MISS" },
                family.name(),
                n,
                alpha,
                kind.name(),
                rec.bias,
                bias,
                rec.sd,
                sd
            ));
        }
    }
    let mut identity_failures = 0;
    for r in &report.records {
        let reps = r.reps as f64;
        let rhs = r.bias * r.bias + r.sd * r.sd * (reps - 1.0) / reps;
        if (r.mse - rhs).abs() > 1e-12 * r.mse.max(f64::MIN_POSITIVE) {
            identity_failures += 1;
        }
    }
    details.push(format!(
        "MSE identity violated in {identity_failures} of {} records",
        report.records.len()
    ));
    Outcome::new(
        failures == 0 && identity_failures == 0,
        format!(
            "memory-estimator table, 2500 reps: {}/{} cells within tolerance, MSE identity {}",
            total - failures,
            total,
            if identity_failures == 0 { "exact" } else { "violated" }
        ),
        details,
    )
}

fn criterion_3() -> Outcome {
    let ratio = WeightSpec::w_paper().constants().variance_ratio();
    let phi_sq = 0.5 * (3.0 / 5.0 - 27.0 / 22.0 + 81.0 / 128.0);
    let oracle = phi_sq / (1.0f64 / 16.0).powi(2);
    let ok = (0.704..=0.714).contains(&ratio) && (ratio - oracle).abs() <= 1e-9;
    Outcome::new(
        ok,
        format!("variance ratio of the memory weight = {ratio:.10} (rational oracle {oracle:.10})"),
        vec![],
    )
}

fn criterion_4() -> Outcome {
    let n = 1024;
    let q = 256usize;
    let psi = WeightSpec::psi_paper();
    let w = WeightSpec::w_paper();
    let mut worst: f64 = 0.0;
    for &alpha in &ALPHAS {
        for band in [8usize, 16, 32, 64] {
            let mut f = vec![1.0; n / 2 + 1];
            for p in 1..=band {
                let v = fourier_frequency(p as i64, n).powf(-alpha);
                f[q + p] = v;
                f[q - p] = v;
            }
            let log_c = (2.0 * PI * band as f64 / n as f64).ln();
            let spectrum = SmoothedSpectrum::from_raw(f.clone(), n).unwrap();

            let bw = BandWeights::new(&psi, band).unwrap();
            let expected = alpha * (1.0 - log_c * bw.sum() / (bw.h_bar() * band as f64));
            let got = alpha_hat_at(q, &spectrum, &bw).unwrap();
            worst = worst.max((got - expected).abs());

            let bw = BandWeights::new(&w, band).unwrap();
            let expected = alpha * (1.0 - log_c * bw.sum() / (bw.h_bar() * band as f64));
            let got = two_step_alpha_smoothed(q, &spectrum, &bw).unwrap().alpha;
            worst = worst.max((got - expected).abs());

            let mut ords = f;
            ords[0] = 0.0;
            let grid = PeriodogramGrid::from_ordinates(ords, n).unwrap();
            let got = log_periodogram_alpha(q, &grid, band).unwrap().alpha;
            worst = worst.max((got - alpha).abs());
        }
    }
    Outcome::new(
        worst <= 1e-10,
        format!("exact recovery over 4 alphas x 4 bands x 3 estimators, max error {worst:.2e}"),
        vec![],
    )
}

fn gamma_ratio_farima(d: f64, j: usize) -> f64 {
    let j = j as f64;
    (ln_gamma(j + d) + ln_gamma(1.0 - d) - ln_gamma(j - d + 1.0) - ln_gamma(d)).exp()
}

fn criterion_5() -> Outcome {
    let (n, alpha, reps, lags) = (256usize, 0.6, 10_000usize, 5usize);
    let mut details = Vec::new();
    let mut ok = true;
    for family in [SimFamily::FarimaZeroPole, SimFamily::GegenbauerHalfPi] {
        let rho = family.autocorrelations(alpha, lags).unwrap();
        let sums = replicate(family, alpha, n, BASE_SEED, reps, |_, x| {
            let v = x.values();
            Ok((0..=lags)
                .map(|h| (0..n - h).map(|t| v[t] * v[t + h]).sum::<f64>() / (n - h) as f64)
                .collect::<Vec<f64>>())
        })
        .unwrap();
        let mut worst: f64 = 0.0;
        for h in 0..=lags {
            let mean = sums.iter().map(|s| s[h]).sum::<f64>() / reps as f64;
            worst = worst.max((mean - rho.rho()[h]).abs());
        }
        ok &= worst <= 0.04;
        details.push(format!("{}: max |empirical - recursion| over lags 0..5 = {worst:.4}", family.name()));
    }
    let d = alpha / 2.0;
    let mut worst: f64 = 0.0;
    let far = SimFamily::FarimaZeroPole.autocorrelations(alpha, 2048).unwrap();
    let geg = SimFamily::GegenbauerHalfPi.autocorrelations(alpha, 2048).unwrap();
    for j in 0..=2048usize {
        let oracle = gamma_ratio_farima(d, j);
        worst = worst.max((far.rho()[j] - oracle).abs());
        let g = if j % 2 == 1 {
            0.0
        } else {
            let sign = if (j / 2) % 2 == 0 { 1.0 } else { -1.0 };
            sign * gamma_ratio_farima(d, j / 2)
        };
        worst = worst.max((geg.rho()[j] - g).abs());
    }
    ok &= worst <= 1e-10;
    details.push(format!("recursion vs gamma-ratio oracle up to lag 2048: {worst:.2e}"));
    Outcome::new(ok, "simulator covariance, 10000 reps and gamma-ratio oracle".to_string(), details)
}

fn criterion_6() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for family in [SimFamily::FarimaZeroPole, SimFamily::GegenbauerHalfPi] {
        let cfg = MCConfig {
            families: vec![family],
            alphas: vec![0.6],
            ns: vec![256, 1024],
            reps: 500,
            base_seed: BASE_SEED,
            bandwidths: BandwidthOverrides::default(),
            estimators: vec![EstimatorKind::PolePsi],
        };
        let report = run_mc(&cfg).unwrap();
        let small = report.record(family, 256, 0.6, EstimatorKind::PolePsi).unwrap().mae;
        let large = report.record(family, 1024, 0.6, EstimatorKind::PolePsi).unwrap().mae;
        ok &= large < small;
        details.push(format!("{}: mean |q_hat - s| = {small:.3} at n=256, {large:.3} at n=1024", family.name()));
    }
    Outcome::new(ok, "pole search consistency, 500 reps".to_string(), details)
}

fn criterion_7() -> Outcome {
    let n = 1024;
    let reps = 1000;
    let cfg = EstimatorConfig::defaults(n).unwrap();
    let family = SimFamily::GegenbauerHalfPi;

    let pole_hits = replicate(family, 0.6, n, BASE_SEED, reps, |_, x| {
        let est = estimate_pipeline(x, &cfg)?;
        Ok(match pole_ci(&est.pole, est.memory.alpha, n, cfg.k, cfg.psi.constants(), 0.95) {
            Ok(ci) => ci.contains(FRAC_PI_2),
            Err(_) => false,
        })
    })
    .unwrap();
    let alpha_hits = replicate(family, 0.4, n, BASE_SEED, reps, |_, x| {
        let est = estimate_pipeline(x, &cfg)?;
        Ok(alpha_ci(&est.memory, cfg.m, cfg.w.constants(), 0.95, None)?.contains(0.4))
    })
    .unwrap();
    let pole_cov = pole_hits.iter().filter(|h| **h).count() as f64 / reps as f64;
    let alpha_cov = alpha_hits.iter().filter(|h| **h).count() as f64 / reps as f64;
    let ok = (0.88..=0.99).contains(&pole_cov) && (0.88..=0.98).contains(&alpha_cov);
    Outcome::new(
        ok,
        format!(
            "95% interval coverage, 1000 reps: pole {:.1}% (band 88-99), alpha {:.1}% (band 88-98)",
            100.0 * pole_cov,
            100.0 * alpha_cov
        ),
        vec![],
    )
}

fn criterion_8() -> Outcome {
    let cfg = MCConfig {
        families: vec![SimFamily::FarimaZeroPole, SimFamily::GegenbauerHalfPi, SimFamily::FlippedPi],
        alphas: vec![0.3, 0.7],
        ns: vec![256],
        reps: 200,
        base_seed: BASE_SEED,
        bandwidths: BandwidthOverrides::default(),
        estimators: EstimatorKind::ALL.to_vec(),
    };
    let outputs: Vec<(String, String)> = [1, 4, 8]
        .iter()
        .map(|&w| {
            let r = run_mc_with_workers(&cfg, w).unwrap();
            (r.to_csv(), r.to_json().unwrap())
        })
        .collect();
    let ok = outputs.windows(2).all(|p| p[0] == p[1]);
    Outcome::new(ok, "report bytes identical for 1, 4 and 8 workers".to_string(), vec![])
}

fn main() -> ExitCode {
    let verbose = std::env::var_os("ACCEPTANCE_VERBOSE").is_some();
    let report = full_design();
    let outcomes = [
        criterion_1(&report),
        criterion_2(&report),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
    ];
    let mut failed = 0;
    for (i, o) in outcomes.iter().enumerate() {
        println!("criterion {}: {} - {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.summary);
        if verbose || !o.pass {
            for d in &o.details {
                println!("    {d}");
            }
        }
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {} failed", outcomes.len() - failed, failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
