//! Replication engine for bias / standard deviation / MSE tables.
//!
//! Each design cell `(family, α, n)` gets a key derived from the base seed and
//! the cell itself, and replication `r` reads normal stream `r` under that
//! key. All requested estimators are evaluated on the same simulated series.
//! Replications run in parallel and are reduced sequentially in index order,
//! so reports do not depend on the number of workers, and a cell re-run on
//! its own reproduces its record.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{
    alpha_profile, log_periodogram_alpha, log_periodogram_pole, two_step_alpha_smoothed,
    BandWeights, Bandwidths, EstimatorConfig,
};
use crate::io::fmt17;
use crate::rng::derive_key;
use crate::simulate::{family_tag, EmbeddingSpectrum, SimFamily};
use crate::spectral::{averaged_periodogram, periodogram, TimeSeries};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// CSV header of [`MCReport::to_csv`].
pub const CSV_HEADER: &str = "family,lambda0,alpha,n,estimator,bias,sd,mse,reps";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EstimatorKind {
    /// `q̂`, the weighted smoothed-spectrum argmax.
    PolePsi,
    /// `q̃`, the log-periodogram argmax.
    PoleLog,
    /// `ᾰ(λ̂⁰)`.
    TwoStepAtHat,
    /// `ᾰ(λ⁰)` at the true pole index.
    TwoStepAtTrue,
    /// `α̂_LOG(λ⁰)` with band `m`.
    LogAtTrue,
    /// `α̂_LOG(λ̃⁰)` with band `m`.
    LogAtTilde,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 6] = [
        Self::PolePsi,
        Self::PoleLog,
        Self::TwoStepAtHat,
        Self::TwoStepAtTrue,
        Self::LogAtTrue,
        Self::LogAtTilde,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::PolePsi => "POLE_PSI",
            Self::PoleLog => "POLE_LOG",
            Self::TwoStepAtHat => "TWO_STEP_AT_HAT",
            Self::TwoStepAtTrue => "TWO_STEP_AT_TRUE",
            Self::LogAtTrue => "LOG_AT_TRUE",
            Self::LogAtTilde => "LOG_AT_TILDE",
        }
    }

    /// Pole estimators are scored in Fourier-index units.
    pub fn is_pole(self) -> bool {
        matches!(self, Self::PolePsi | Self::PoleLog)
    }
}

fn all_estimators() -> Vec<EstimatorKind> {
    EstimatorKind::ALL.to_vec()
}

/// Optional replacements for the default bandwidths.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandwidthOverrides {
    pub k: Option<usize>,
    pub k1: Option<usize>,
    pub m: Option<usize>,
    pub m1: Option<usize>,
}

impl BandwidthOverrides {
    pub fn resolve(&self, n: usize) -> Result<EstimatorConfig> {
        let mut cfg = EstimatorConfig::defaults(n)?;
        if let Some(k) = self.k {
            cfg.k = k;
            if self.k1.is_none() {
                cfg.k1 = crate::estimators::smoothing_span(k);
            }
        }
        if let Some(k1) = self.k1 {
            cfg.k1 = k1;
        }
        if let Some(m) = self.m {
            cfg.m = m;
            if self.m1.is_none() {
                cfg.m1 = crate::estimators::smoothing_span(m);
            }
        }
        if let Some(m1) = self.m1 {
            cfg.m1 = m1;
        }
        cfg.validate(n)?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MCConfig {
    pub families: Vec<SimFamily>,
    pub alphas: Vec<f64>,
    pub ns: Vec<usize>,
    pub reps: usize,
    pub base_seed: u64,
    #[serde(default)]
    pub bandwidths: BandwidthOverrides,
    #[serde(default = "all_estimators")]
    pub estimators: Vec<EstimatorKind>,
}

impl MCConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::InvalidParameter("reps must be at least 1".into()));
        }
        if self.families.is_empty() || self.alphas.is_empty() || self.ns.is_empty() {
            return Err(Error::InvalidParameter(
                "families, alphas and ns must be non-empty".into(),
            ));
        }
        if self.estimators.is_empty() {
            return Err(Error::InvalidParameter("no estimators requested".into()));
        }
        if let Some(a) = self.alphas.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
            return Err(Error::DomainError {
                value: *a,
                domain: "memory parameter α in (0, 1)",
            });
        }
        for &n in &self.ns {
            self.bandwidths.resolve(n)?;
        }
        Ok(())
    }

    /// Cells in report order: family, then n, then α.
    pub fn cells(&self) -> Vec<(SimFamily, usize, f64)> {
        let mut out = Vec::new();
        for &f in &self.families {
            for &n in &self.ns {
                for &a in &self.alphas {
                    out.push((f, n, a));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellRecord {
    pub family: SimFamily,
    pub lambda0: f64,
    pub alpha: f64,
    pub n: usize,
    pub estimator: EstimatorKind,
    /// Mean of `estimate - truth`; pole truth is the index `s = round(nλ⁰/2π)`.
    pub bias: f64,
    /// Sample standard deviation (divisor `reps - 1`); 0 when `reps = 1`.
    pub sd: f64,
    /// Mean squared error, equal to `bias² + sd²(reps-1)/reps`.
    pub mse: f64,
    /// Mean absolute error.
    pub mae: f64,
    pub reps: usize,
    /// False when `reps = 1` and the standard deviation is undefined.
    pub sd_defined: bool,
    #[serde(skip)]
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellBandwidths {
    pub n: usize,
    #[serde(flatten)]
    pub bandwidths: Bandwidths,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub base_seed: u64,
    pub reps: usize,
    pub sd_divisor: &'static str,
    pub bandwidths: Vec<CellBandwidths>,
    pub artifact_version: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MCReport {
    pub schema_version: u32,
    pub records: Vec<CellRecord>,
    pub provenance: Provenance,
}

impl MCReport {
    pub fn record(&self, family: SimFamily, n: usize, alpha: f64, estimator: EstimatorKind) -> Option<&CellRecord> {
        self.records
            .iter()
            .find(|r| r.family == family && r.n == n && r.alpha == alpha && r.estimator == estimator)
    }

    /// Fixed-column CSV, floats with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.family.name(),
                fmt17(r.lambda0),
                fmt17(r.alpha),
                r.n,
                r.estimator.name(),
                fmt17(r.bias),
                fmt17(r.sd),
                fmt17(r.mse),
                r.reps
            ));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Human-readable table with four decimals.
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:<11} {:>6} {:>5} {:<17} {:>9} {:>9} {:>9}\n",
            "family", "n", "alpha", "estimator", "bias", "sd", "mse"
        );
        for r in &self.records {
            out.push_str(&format!(
                "{:<11} {:>6} {:>5.2} {:<17} {:>9.4} {:>9.4} {:>9.4}\n",
                r.family.name(),
                r.n,
                r.alpha,
                r.estimator.name(),
                r.bias,
                r.sd,
                r.mse
            ));
        }
        out
    }

    pub fn timings(&self) -> Vec<(String, f64)> {
        self.records
            .iter()
            .map(|r| {
                (
                    format!("{}/{}/{}/{}", r.family.name(), r.n, r.alpha, r.estimator.name()),
                    r.wall_time.as_secs_f64(),
                )
            })
            .collect()
    }
}

/// Key of the normal streams for one design cell.
pub fn cell_key(base_seed: u64, family: SimFamily, alpha: f64, n: usize) -> u64 {
    derive_key(&[base_seed, family_tag(family), alpha.to_bits(), n as u64])
}

/// Runs `f(r, series)` for replications `r = 0..reps` of one cell, in
/// parallel on the current rayon pool; results come back in `r` order.
pub fn replicate<T, F>(
    family: SimFamily,
    alpha: f64,
    n: usize,
    base_seed: u64,
    reps: usize,
    f: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, &TimeSeries) -> Result<T> + Sync,
{
    let rho = family.autocorrelations(alpha, n)?;
    let embedding = EmbeddingSpectrum::new(&rho, n)?;
    let key = cell_key(base_seed, family, alpha, n);
    (0..reps)
        .into_par_iter()
        .map(|r| f(r, &embedding.sample(key, r as u64)))
        .collect()
}

struct CellPlan {
    cfg: EstimatorConfig,
    psi_band: BandWeights,
    w_band: BandWeights,
    truth_q: usize,
    want: Vec<EstimatorKind>,
}

impl CellPlan {
    fn wants(&self, kinds: &[EstimatorKind]) -> bool {
        kinds.iter().any(|k| self.want.contains(k))
    }

    /// Estimates for one replication, in the order of `self.want`.
    fn evaluate(&self, x: &TimeSeries) -> Result<Vec<f64>> {
        use EstimatorKind::*;
        let grid = periodogram(x);
        let q_hat = if self.wants(&[PolePsi, TwoStepAtHat]) {
            let spec = averaged_periodogram(&grid, self.cfg.k1)?;
            Some(alpha_profile(&spec, &self.psi_band)?.argmax())
        } else {
            None
        };
        let q_tilde = if self.wants(&[PoleLog, LogAtTilde]) {
            Some(log_periodogram_pole(&grid, self.cfg.k)?.q_hat)
        } else {
            None
        };
        let two_step = if self.wants(&[TwoStepAtHat, TwoStepAtTrue]) {
            Some(averaged_periodogram(&grid, self.cfg.m1)?)
        } else {
            None
        };
        self.want
            .iter()
            .map(|kind| {
                Ok(match kind {
                    PolePsi => q_hat.unwrap() as f64,
                    PoleLog => q_tilde.unwrap() as f64,
                    TwoStepAtHat => {
                        two_step_alpha_smoothed(q_hat.unwrap(), two_step.as_ref().unwrap(), &self.w_band)?.alpha
                    }
                    TwoStepAtTrue => {
                        two_step_alpha_smoothed(self.truth_q, two_step.as_ref().unwrap(), &self.w_band)?.alpha
                    }
                    LogAtTrue => log_periodogram_alpha(self.truth_q, &grid, self.cfg.m)?.alpha,
                    LogAtTilde => log_periodogram_alpha(q_tilde.unwrap(), &grid, self.cfg.m)?.alpha,
                })
            })
            .collect()
    }
}

fn summarize(errors: &[f64]) -> (f64, f64, f64, f64, bool) {
    let r = errors.len() as f64;
    let bias = errors.iter().sum::<f64>() / r;
    let ss = errors.iter().map(|e| (e - bias).powi(2)).sum::<f64>();
    let mse = errors.iter().map(|e| e * e).sum::<f64>() / r;
    let mae = errors.iter().map(|e| e.abs()).sum::<f64>() / r;
    if errors.len() > 1 {
        (bias, (ss / (r - 1.0)).sqrt(), mse, mae, true)
    } else {
        (bias, 0.0, mse, mae, false)
    }
}

fn run_cell(cfg: &MCConfig, family: SimFamily, n: usize, alpha: f64) -> Result<Vec<CellRecord>> {
    let start = Instant::now();
    let est_cfg = cfg.bandwidths.resolve(n)?;
    let plan = CellPlan {
        psi_band: BandWeights::new(&est_cfg.psi, est_cfg.k)?,
        w_band: BandWeights::new(&est_cfg.w, est_cfg.m)?,
        cfg: est_cfg,
        truth_q: family.pole_index(n),
        want: cfg.estimators.clone(),
    };
    let estimates = replicate(family, alpha, n, cfg.base_seed, cfg.reps, |_, x| plan.evaluate(x))?;
    let wall_time = start.elapsed();
    Ok(plan
        .want
        .iter()
        .enumerate()
        .map(|(i, &kind)| {
            let truth = if kind.is_pole() { plan.truth_q as f64 } else { alpha };
            let errors: Vec<f64> = estimates.iter().map(|e| e[i] - truth).collect();
            let (bias, sd, mse, mae, sd_defined) = summarize(&errors);
            CellRecord {
                family,
                lambda0: family.pole_frequency(),
                alpha,
                n,
                estimator: kind,
                bias,
                sd,
                mse,
                mae,
                reps: cfg.reps,
                sd_defined,
                wall_time,
            }
        })
        .collect())
}

/// Runs every cell of `cfg` on the current rayon pool.
pub fn run_mc(cfg: &MCConfig) -> Result<MCReport> {
    cfg.validate()?;
    let mut records = Vec::new();
    for (family, n, alpha) in cfg.cells() {
        records.extend(run_cell(cfg, family, n, alpha)?);
    }
    let mut ns = cfg.ns.clone();
    ns.sort_unstable();
    ns.dedup();
    let bandwidths = ns
        .into_iter()
        .map(|n| {
            Ok(CellBandwidths {
                n,
                bandwidths: cfg.bandwidths.resolve(n)?.bandwidths(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MCReport {
        schema_version: REPORT_SCHEMA_VERSION,
        records,
        provenance: Provenance {
            base_seed: cfg.base_seed,
            reps: cfg.reps,
            sd_divisor: "reps - 1",
            bandwidths,
            artifact_version: env!("CARGO_PKG_VERSION"),
        },
    })
}

/// Runs [`run_mc`] on a dedicated pool of `workers` threads.
pub fn run_mc_with_workers(cfg: &MCConfig, workers: usize) -> Result<MCReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    pool.install(|| run_mc(cfg))
}
