//! Periodogram on the Fourier grid, index folding and averaged-periodogram
//! smoothing with the `1/n` positivity floor.
//!
//! Only the ordinates `0..=⌊n/2⌋` are stored. Any other index is mapped back
//! onto that range by [`fold_index`], using periodicity (period `n`) and even
//! symmetry of the periodogram. The ordinate at frequency zero is pinned to
//! zero, which is equivalent to removing the sample mean.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// A finite, real-valued observation sequence `x_1, …, x_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::SeriesTooShort { n: 0, min: 1 });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput { index });
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Fails with [`Error::SeriesTooShort`] when `n < min`.
    pub fn require_len(&self, min: usize) -> Result<()> {
        if self.len() < min {
            return Err(Error::SeriesTooShort { n: self.len(), min });
        }
        Ok(())
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// `λ_ℓ = 2πℓ/n`.
pub fn fourier_frequency(l: i64, n: usize) -> f64 {
    2.0 * PI * l as f64 / n as f64
}

/// Maps any integer index onto `0..=⌊n/2⌋` using periodicity and even symmetry.
pub fn fold_index(l: i64, n: usize) -> usize {
    let n_i = n as i64;
    let r = l.rem_euclid(n_i);
    if r > n_i / 2 {
        (n_i - r) as usize
    } else {
        r as usize
    }
}

/// Periodogram ordinates `I_0, …, I_{⌊n/2⌋}` with `I_0 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodogramGrid {
    ordinates: Vec<f64>,
    n: usize,
}

impl PeriodogramGrid {
    /// Builds a grid from precomputed ordinates. `ordinates` must have length
    /// `⌊n/2⌋ + 1`, be nonnegative, and start with an exact zero.
    pub fn from_ordinates(ordinates: Vec<f64>, n: usize) -> Result<Self> {
        if n == 0 || ordinates.len() != n / 2 + 1 {
            return Err(Error::InvalidParameter(format!(
                "expected {} ordinates for n = {}, got {}",
                n / 2 + 1,
                n,
                ordinates.len()
            )));
        }
        if ordinates[0] != 0.0 {
            return Err(Error::InvalidParameter(
                "periodogram ordinate at frequency zero must be 0".into(),
            ));
        }
        if let Some(index) = ordinates.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "ordinate {index} is negative or non-finite"
            )));
        }
        Ok(Self { ordinates, n })
    }

    pub fn ordinates(&self) -> &[f64] {
        &self.ordinates
    }

    /// Length of the source series.
    pub fn n(&self) -> usize {
        self.n
    }

    /// `⌊n/2⌋`, the largest stored index.
    pub fn half(&self) -> usize {
        self.n / 2
    }

    /// `I_{fold(ℓ)}`.
    pub fn at(&self, l: i64) -> f64 {
        self.ordinates[fold_index(l, self.n)]
    }

    /// True when every ordinate is negligible relative to `scale`
    /// (typically the mean square of the source series).
    pub fn is_degenerate(&self, scale: f64) -> bool {
        let max = self.ordinates.iter().cloned().fold(0.0, f64::max);
        max <= 1e-20 * scale.max(f64::MIN_POSITIVE)
    }
}

/// `I_ℓ = |(2πn)^{-1/2} Σ_t x_t e^{itλ_ℓ}|²` for `ℓ = 1..=⌊n/2⌋`, `I_0 = 0`.
pub fn periodogram(x: &TimeSeries) -> PeriodogramGrid {
    let n = x.len();
    let mut buf: Vec<Complex<f64>> = x.values().iter().map(|&v| Complex::new(v, 0.0)).collect();
    // Forward transform uses e^{-i}; only |·|² is kept so the sign is irrelevant.
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / (2.0 * PI * n as f64);
    let mut ordinates: Vec<f64> = buf[..=n / 2].iter().map(|c| c.norm_sqr() * scale).collect();
    ordinates[0] = 0.0;
    PeriodogramGrid { ordinates, n }
}

/// Averaged periodogram and its floored version on `0..=⌊n/2⌋`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedSpectrum {
    raw: Vec<f64>,
    floored: Vec<f64>,
    bandwidth: usize,
    n: usize,
}

impl SmoothedSpectrum {
    /// Wraps externally supplied spectral values (length `⌊n/2⌋ + 1`),
    /// applying the `1/n` floor. Used for synthetic inputs; bandwidth is 0.
    pub fn from_raw(raw: Vec<f64>, n: usize) -> Result<Self> {
        if n == 0 || raw.len() != n / 2 + 1 {
            return Err(Error::InvalidParameter(format!(
                "expected {} spectral values for n = {}, got {}",
                n / 2 + 1,
                n,
                raw.len()
            )));
        }
        if let Some(index) = raw.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput { index });
        }
        Ok(Self::with_floor(raw, 0, n))
    }

    fn with_floor(raw: Vec<f64>, bandwidth: usize, n: usize) -> Self {
        let floor = 1.0 / n as f64;
        let floored = raw.iter().map(|&v| v.max(floor)).collect();
        Self {
            raw,
            floored,
            bandwidth,
            n,
        }
    }

    pub fn raw(&self) -> &[f64] {
        &self.raw
    }

    pub fn floored(&self) -> &[f64] {
        &self.floored
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half(&self) -> usize {
        self.n / 2
    }

    /// `log f̂_ℓ` for `ℓ = 0..=⌊n/2⌋`; always finite thanks to the floor.
    pub fn log_floored(&self) -> Vec<f64> {
        self.floored.iter().map(|v| v.ln()).collect()
    }
}

/// `f̈_ℓ = (2k₁+1)^{-1} Σ_{|j|≤k₁} I_{fold(ℓ+j)}` and `f̂_ℓ = max(f̈_ℓ, 1/n)`.
pub fn averaged_periodogram(grid: &PeriodogramGrid, k1: usize) -> Result<SmoothedSpectrum> {
    let n = grid.n();
    if k1 > n / 4 {
        return Err(Error::BandwidthTooLarge {
            what: format!("smoothing bandwidth {k1} exceeds ⌊n/4⌋ = {} for n = {n}", n / 4),
        });
    }
    let half = grid.half() as i64;
    let k1i = k1 as i64;
    let norm = 1.0 / (2 * k1 + 1) as f64;
    // Direct window sums keep k1 = 0 exact and avoid prefix-sum cancellation.
    let raw = (0..=half)
        .map(|l| (l - k1i..=l + k1i).map(|j| grid.at(j)).sum::<f64>() * norm)
        .collect();
    Ok(SmoothedSpectrum::with_floor(raw, k1, n))
}
