//! Pole-location and memory-parameter estimators.
//!
//! * [`pole_search`]: maximizes the weighted log-spectral memory estimate
//!   `α̂(λ_q)` over the Fourier grid `q = 0..=⌊n/2⌋`.
//! * [`two_step_alpha`]: re-estimates `α` at a preliminary pole index with a
//!   wider band `m`, a wider smoothing span `m₁` and the weight `w`.
//! * [`log_periodogram_alpha`] / [`log_periodogram_pole`]: the symmetrized
//!   log-periodogram regression used as a comparator.
//!
//! Band indices `q ± p` falling outside `0..=⌊n/2⌋` are folded back with
//! [`fold_index`]. In the log-periodogram estimator a folded index of zero
//! (where `I_0 = 0`) is replaced by index one. Both argmax searches break
//! ties toward the smallest index.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{
    averaged_periodogram, fold_index, fourier_frequency, periodogram, PeriodogramGrid,
    SmoothedSpectrum, TimeSeries,
};
use crate::weights::WeightSpec;

/// Shortest series accepted by [`estimate_pipeline`] and [`bandwidth_defaults`].
pub const MIN_PIPELINE_LEN: usize = 64;

/// Band counts, smoothing spans and weights for the full estimation pipeline.
#[derive(Debug, Clone)]
pub struct EstimatorConfig {
    /// Pole-search band count.
    pub k: usize,
    /// First-stage smoothing span.
    pub k1: usize,
    /// Two-step band count.
    pub m: usize,
    /// Two-step smoothing span.
    pub m1: usize,
    pub psi: WeightSpec,
    pub w: WeightSpec,
}

/// Serializable snapshot of the integer bandwidths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bandwidths {
    pub k: usize,
    pub k1: usize,
    pub m: usize,
    pub m1: usize,
}

fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor().max(0.0) as usize
}

/// `max(1, round(b^{0.6} log log 2b))`, the smoothing span paired with band count `b`.
pub fn smoothing_span(b: usize) -> usize {
    let b = b as f64;
    round_half_up(b.powf(0.6) * (2.0 * b).ln().ln()).max(1)
}

/// Pole-search band count: 14 at `n = 256`, 24 at `n = 1024`, linear in
/// `log n` in between and extrapolated outside, clamped to `[8, ⌊n/2⌋ - k₁]`.
fn pole_band(n: usize) -> usize {
    let t = ((n as f64).ln() - 256f64.ln()) / (1024f64.ln() - 256f64.ln());
    let k = round_half_up((14.0 + 10.0 * t).max(0.0)).max(8);
    let upper = (n / 2).saturating_sub(smoothing_span(k));
    k.min(upper.max(2))
}

/// Default bandwidths for a series of length `n ≥ 64`: `k` from the
/// interpolation rule, `k₁ = round(k^{0.6} log log 2k)`, `m = ⌊n/4⌋`,
/// `m₁ = round(m^{0.6} log log 2m)`.
pub fn bandwidth_defaults(n: usize) -> Result<EstimatorConfig> {
    if n < MIN_PIPELINE_LEN {
        return Err(Error::SeriesTooShort {
            n,
            min: MIN_PIPELINE_LEN,
        });
    }
    let k = pole_band(n);
    let m = n / 4;
    Ok(EstimatorConfig {
        k,
        k1: smoothing_span(k),
        m,
        m1: smoothing_span(m),
        psi: WeightSpec::psi_paper(),
        w: WeightSpec::w_paper(),
    })
}

impl EstimatorConfig {
    pub fn defaults(n: usize) -> Result<Self> {
        bandwidth_defaults(n)
    }

    /// Explicit bandwidths with the built-in weights.
    pub fn with_bandwidths(k: usize, k1: usize, m: usize, m1: usize) -> Self {
        Self {
            k,
            k1,
            m,
            m1,
            psi: WeightSpec::psi_paper(),
            w: WeightSpec::w_paper(),
        }
    }

    /// Replaces `m = ⌊n/4⌋` with the rate-based rule `m = round(c n^{4/5})`
    /// (capped so that the two-step band fits), recomputing `m₁`.
    pub fn with_power_law_m(mut self, n: usize, c: f64) -> Self {
        let mut m = round_half_up(c * (n as f64).powf(0.8)).max(2);
        while m > 2 && m + smoothing_span(m) > n / 2 {
            m -= 1;
        }
        self.m = m;
        self.m1 = smoothing_span(m);
        self
    }

    pub fn bandwidths(&self) -> Bandwidths {
        Bandwidths {
            k: self.k,
            k1: self.k1,
            m: self.m,
            m1: self.m1,
        }
    }

    /// Checks the bandwidth invariants for a series of length `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        let half = n / 2;
        if self.k < 2 || self.m < 2 {
            return Err(Error::InvalidParameter(
                "band counts k and m must be at least 2".into(),
            ));
        }
        if self.k1 < 1 || self.m1 < 1 {
            return Err(Error::InvalidParameter(
                "smoothing spans k1 and m1 must be at least 1".into(),
            ));
        }
        for (name, band, span) in [("k + k1", self.k, self.k1), ("m + m1", self.m, self.m1)] {
            if band + span > half {
                return Err(Error::BandwidthTooLarge {
                    what: format!("{name} = {} exceeds ⌊n/2⌋ = {half}", band + span),
                });
            }
            if span > n / 4 {
                return Err(Error::BandwidthTooLarge {
                    what: format!("smoothing span {span} exceeds ⌊n/4⌋ = {}", n / 4),
                });
            }
        }
        Ok(())
    }
}

/// Weight ordinates `weight(p/k)`, `p = 1..=k`, with `h̄` and `Σ weight(p/k)`.
#[derive(Debug, Clone)]
pub struct BandWeights {
    k: usize,
    weights: Vec<f64>,
    h_bar: f64,
    sum: f64,
}

impl BandWeights {
    pub fn new(spec: &WeightSpec, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParameter(format!("band count {k} < 2")));
        }
        let kf = k as f64;
        let weights: Vec<f64> = (1..=k).map(|p| spec.value(p as f64 / kf)).collect();
        let h_bar = spec.discrete_h_bar(k);
        if !(h_bar.is_finite() && h_bar != 0.0) {
            return Err(Error::InvalidWeight(format!(
                "discrete normalizer h̄ = {h_bar} for k = {k}"
            )));
        }
        let sum = weights.iter().sum();
        Ok(Self {
            k,
            weights,
            h_bar,
            sum,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn h_bar(&self) -> f64 {
        self.h_bar
    }

    /// `Σ_{p=1}^k weight(p/k)`.
    pub fn sum(&self) -> f64 {
        self.sum
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `(2h̄k)^{-1} Σ_p weight_p (L_{fold(q+p)} + L_{fold(q-p)})`.
    fn symmetric(&self, log_f: &[f64], n: usize, q: usize) -> f64 {
        let q = q as i64;
        let s: f64 = self
            .weights
            .iter()
            .enumerate()
            .map(|(i, wp)| {
                let p = i as i64 + 1;
                wp * (log_f[fold_index(q + p, n)] + log_f[fold_index(q - p, n)])
            })
            .sum();
        s / (2.0 * self.h_bar * self.k as f64)
    }
}

/// Where the estimated pole sits on `[0, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BoundaryRegime {
    Interior,
    AtZero,
    AtPi,
}

impl BoundaryRegime {
    pub fn classify(q: usize, n: usize) -> Self {
        if q == 0 {
            Self::AtZero
        } else if n % 2 == 0 && q == n / 2 {
            Self::AtPi
        } else {
            Self::Interior
        }
    }
}

/// Which statistic a profile holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ProfileKind {
    /// Weighted log of the floored averaged periodogram.
    SmoothedWeighted,
    /// Symmetrized log-periodogram regression.
    LogPeriodogram,
}

/// Memory estimates at every grid index `q = 0..=⌊n/2⌋`.
#[derive(Debug, Clone, Serialize)]
pub struct AlphaProfile {
    pub values: Vec<f64>,
    pub kind: ProfileKind,
    pub k: usize,
    /// Smoothing span, when the profile was built from a smoothed spectrum.
    pub k1: Option<usize>,
    pub n: usize,
}

impl AlphaProfile {
    /// First index of the maximum.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (q, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = q;
            }
        }
        best
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PoleEstimate {
    pub q_hat: usize,
    pub lambda_hat: f64,
    pub boundary_regime: BoundaryRegime,
    #[serde(skip)]
    pub profile: AlphaProfile,
}

impl PoleEstimate {
    fn from_profile(profile: AlphaProfile) -> Self {
        let q_hat = profile.argmax();
        let n = profile.n;
        Self {
            q_hat,
            lambda_hat: fourier_frequency(q_hat as i64, n),
            boundary_regime: BoundaryRegime::classify(q_hat, n),
            profile,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MemoryVariant {
    TwoStep,
    FirstStage,
    LogPeriodogram,
}

#[derive(Debug, Clone, Serialize)]
pub struct MemoryEstimate {
    pub alpha: f64,
    pub variant: MemoryVariant,
    /// Grid index the band is centred on.
    pub anchor_q: usize,
    /// Band count (`m` or `k`).
    pub band: usize,
    /// Smoothing span, for estimators built on the averaged periodogram.
    pub smoothing: Option<usize>,
    /// Set when `alpha` falls outside `(0, 1)`; the value is never clipped.
    pub out_of_range: bool,
}

impl MemoryEstimate {
    fn new(alpha: f64, variant: MemoryVariant, anchor_q: usize, band: usize, smoothing: Option<usize>) -> Self {
        Self {
            alpha,
            variant,
            anchor_q,
            band,
            smoothing,
            out_of_range: !(alpha > 0.0 && alpha < 1.0),
        }
    }
}

fn check_anchor(q: usize, n: usize) -> Result<()> {
    if q > n / 2 {
        return Err(Error::InvalidParameter(format!(
            "anchor index {q} outside 0..={}",
            n / 2
        )));
    }
    Ok(())
}

/// `α̂(λ_q) = (2h̄k)^{-1} Σ_{p=1}^k ψ_p (log f̂_{q+p} + log f̂_{q-p})`.
pub fn alpha_hat_at(q: usize, spectrum: &SmoothedSpectrum, band: &BandWeights) -> Result<f64> {
    let n = spectrum.n();
    check_anchor(q, n)?;
    if band.k() > n / 2 {
        return Err(Error::BandwidthTooLarge {
            what: format!("band count {} exceeds ⌊n/2⌋ = {}", band.k(), n / 2),
        });
    }
    Ok(band.symmetric(&spectrum.log_floored(), n, q))
}

/// Profile of `α̂(λ_q)` over the whole grid.
pub fn alpha_profile(spectrum: &SmoothedSpectrum, band: &BandWeights) -> Result<AlphaProfile> {
    let n = spectrum.n();
    if band.k() > n / 2 {
        return Err(Error::BandwidthTooLarge {
            what: format!("band count {} exceeds ⌊n/2⌋ = {}", band.k(), n / 2),
        });
    }
    let log_f = spectrum.log_floored();
    let values = (0..=n / 2).map(|q| band.symmetric(&log_f, n, q)).collect();
    Ok(AlphaProfile {
        values,
        kind: ProfileKind::SmoothedWeighted,
        k: band.k(),
        k1: Some(spectrum.bandwidth()),
        n,
    })
}

/// `q̂ = argmax_{q = 0..=⌊n/2⌋} α̂(λ_q)`.
pub fn pole_search(spectrum: &SmoothedSpectrum, band: &BandWeights) -> Result<PoleEstimate> {
    Ok(PoleEstimate::from_profile(alpha_profile(spectrum, band)?))
}

/// Two-step memory estimate on an already smoothed and floored spectrum.
pub fn two_step_alpha_smoothed(
    q_check: usize,
    spectrum: &SmoothedSpectrum,
    band: &BandWeights,
) -> Result<MemoryEstimate> {
    let alpha = alpha_hat_at(q_check, spectrum, band)?;
    Ok(MemoryEstimate::new(
        alpha,
        MemoryVariant::TwoStep,
        q_check,
        band.k(),
        Some(spectrum.bandwidth()),
    ))
}

/// Two-step estimate `ᾰ` at the preliminary pole index `q_check`: smooth the
/// periodogram with span `m1`, floor at `1/n`, and take the symmetrized
/// weighted log sum over `m` ordinates on each side with weight `w`.
pub fn two_step_alpha(
    q_check: usize,
    grid: &PeriodogramGrid,
    m: usize,
    m1: usize,
    w: &WeightSpec,
) -> Result<MemoryEstimate> {
    let n = grid.n();
    check_anchor(q_check, n)?;
    if m < 2 || m1 < 1 {
        return Err(Error::InvalidParameter(format!(
            "two-step needs m ≥ 2 and m1 ≥ 1 (got m = {m}, m1 = {m1})"
        )));
    }
    if m + m1 > n / 2 {
        return Err(Error::BandwidthTooLarge {
            what: format!("m + m1 = {} exceeds ⌊n/2⌋ = {}", m + m1, n / 2),
        });
    }
    let spectrum = averaged_periodogram(grid, m1)?;
    let band = BandWeights::new(w, m)?;
    two_step_alpha_smoothed(q_check, &spectrum, &band)
}

/// Centred log weights `φ_j = log j - k^{-1} Σ log ℓ` for the log-periodogram regression.
#[derive(Debug, Clone)]
pub struct LogBand {
    k: usize,
    phi: Vec<f64>,
    denom: f64,
}

impl LogBand {
    pub fn new(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParameter(format!("band count {k} < 2")));
        }
        let logs: Vec<f64> = (1..=k).map(|j| (j as f64).ln()).collect();
        let mean = logs.iter().sum::<f64>() / k as f64;
        let phi: Vec<f64> = logs.iter().map(|l| l - mean).collect();
        let denom = 2.0 * phi.iter().zip(&logs).map(|(p, l)| p * l).sum::<f64>();
        Ok(Self { k, phi, denom })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    fn estimate(&self, log_i: &[f64], n: usize, q: usize) -> f64 {
        let q = q as i64;
        let s: f64 = self
            .phi
            .iter()
            .enumerate()
            .map(|(i, phi)| {
                let j = i as i64 + 1;
                phi * (log_i[fold_index(q + j, n)] + log_i[fold_index(q - j, n)])
            })
            .sum();
        -s / self.denom
    }
}

/// Log ordinates with index 0 carrying `log I_1`.
fn log_ordinates(grid: &PeriodogramGrid) -> Vec<f64> {
    let ords = grid.ordinates();
    let mut logs: Vec<f64> = ords.iter().map(|v| v.ln()).collect();
    logs[0] = logs[1];
    logs
}

fn check_log_band(grid: &PeriodogramGrid, q: usize, k: usize) -> Result<()> {
    let n = grid.n();
    let remap = |l: usize| if l == 0 { 1 } else { l };
    let q = q as i64;
    for j in 1..=k as i64 {
        for idx in [fold_index(q + j, n), fold_index(q - j, n)] {
            if grid.ordinates()[remap(idx)] <= 0.0 {
                return Err(Error::DegenerateBand(format!(
                    "periodogram ordinate {} is zero inside the log band",
                    remap(idx)
                )));
            }
        }
    }
    Ok(())
}

/// `α̂_LOG(λ_q) = -(2 Σ φ_j log j)^{-1} Σ φ_j (log I_{q+j} + log I_{q-j})`.
pub fn log_periodogram_alpha(q: usize, grid: &PeriodogramGrid, k: usize) -> Result<MemoryEstimate> {
    let n = grid.n();
    check_anchor(q, n)?;
    if n < 4 {
        return Err(Error::SeriesTooShort { n, min: 4 });
    }
    let band = LogBand::new(k)?;
    check_log_band(grid, q, k)?;
    let alpha = band.estimate(&log_ordinates(grid), n, q);
    Ok(MemoryEstimate::new(alpha, MemoryVariant::LogPeriodogram, q, k, None))
}

/// `q̃ = argmax_{q = 0..=⌊n/2⌋} α̂_LOG(λ_q)`.
pub fn log_periodogram_pole(grid: &PeriodogramGrid, k: usize) -> Result<PoleEstimate> {
    let n = grid.n();
    if n < 4 {
        return Err(Error::SeriesTooShort { n, min: 4 });
    }
    let band = LogBand::new(k)?;
    if let Some(l) = grid.ordinates()[1..].iter().position(|v| *v <= 0.0) {
        return Err(Error::DegenerateBand(format!(
            "periodogram ordinate {} is zero",
            l + 1
        )));
    }
    let log_i = log_ordinates(grid);
    let values = (0..=n / 2).map(|q| band.estimate(&log_i, n, q)).collect();
    Ok(PoleEstimate::from_profile(AlphaProfile {
        values,
        kind: ProfileKind::LogPeriodogram,
        k,
        k1: None,
        n,
    }))
}

/// Pole and two-step memory estimates for one series.
#[derive(Debug, Clone, Serialize)]
pub struct PipelineEstimate {
    pub pole: PoleEstimate,
    pub memory: MemoryEstimate,
}

fn checked_periodogram(x: &TimeSeries, cfg: &EstimatorConfig) -> Result<PeriodogramGrid> {
    x.require_len(MIN_PIPELINE_LEN)?;
    cfg.validate(x.len())?;
    let grid = periodogram(x);
    let mean_sq = x.values().iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
    if grid.is_degenerate(mean_sq) {
        return Err(Error::DegenerateBand(
            "periodogram vanishes at every nonzero Fourier frequency".into(),
        ));
    }
    Ok(grid)
}

/// periodogram → smoothing (`k₁`) → pole search (`k`, `ψ`) → two-step (`m`, `m₁`, `w`).
pub fn estimate_pipeline(x: &TimeSeries, cfg: &EstimatorConfig) -> Result<PipelineEstimate> {
    let grid = checked_periodogram(x, cfg)?;
    pipeline_on_grid(&grid, cfg)
}

pub(crate) fn pipeline_on_grid(grid: &PeriodogramGrid, cfg: &EstimatorConfig) -> Result<PipelineEstimate> {
    let spectrum = averaged_periodogram(grid, cfg.k1)?;
    let pole = pole_search(&spectrum, &BandWeights::new(&cfg.psi, cfg.k)?)?;
    let memory = two_step_alpha(pole.q_hat, grid, cfg.m, cfg.m1, &cfg.w)?;
    Ok(PipelineEstimate { pole, memory })
}

/// Grid index of the Fourier frequency closest to `lambda0` (radians), folded
/// onto `0..=⌊n/2⌋`.
pub fn closest_fourier_index(lambda0: f64, n: usize) -> usize {
    let q = (lambda0 * n as f64 / (2.0 * std::f64::consts::PI)).round() as i64;
    fold_index(q, n)
}

/// Two-step estimate anchored at a known pole frequency instead of a search.
pub fn estimate_known_pole(x: &TimeSeries, cfg: &EstimatorConfig, lambda0: f64) -> Result<MemoryEstimate> {
    let grid = checked_periodogram(x, cfg)?;
    two_step_alpha(closest_fourier_index(lambda0, x.len()), &grid, cfg.m, cfg.m1, &cfg.w)
}
