//! Exact Gaussian simulation of the FARIMA and Gegenbauer test models.
//!
//! Autocorrelations come from closed recursions; series are synthesized by
//! embedding the `n × n` Toeplitz covariance in a `2n × 2n` circulant and
//! colouring complex white noise in the frequency domain (Davies–Harte).
//! The variance is normalized to `γ(0) = 1`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::NormalStream;
use crate::spectral::TimeSeries;

/// Largest tolerated negative eigenvalue, relative to the largest one.
pub const NEGATIVE_EIGEN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SimFamily {
    /// `(1 - L)^{α/2} x_t = ε_t`, pole at 0.
    #[serde(rename = "farima")]
    FarimaZeroPole,
    /// `(1 + L²)^{α/2} x_t = ε_t`, pole at π/2.
    #[serde(rename = "gegenbauer")]
    GegenbauerHalfPi,
    /// `(-1)^t` times the FARIMA series, pole at π.
    #[serde(rename = "flipped-pi")]
    FlippedPi,
}

impl SimFamily {
    pub fn name(self) -> &'static str {
        match self {
            Self::FarimaZeroPole => "farima",
            Self::GegenbauerHalfPi => "gegenbauer",
            Self::FlippedPi => "flipped-pi",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "farima" => Some(Self::FarimaZeroPole),
            "gegenbauer" => Some(Self::GegenbauerHalfPi),
            "flipped-pi" => Some(Self::FlippedPi),
            _ => None,
        }
    }

    /// Pole frequency `λ⁰` in radians.
    pub fn pole_frequency(self) -> f64 {
        match self {
            Self::FarimaZeroPole => 0.0,
            Self::GegenbauerHalfPi => FRAC_PI_2,
            Self::FlippedPi => PI,
        }
    }

    /// Fourier index closest to the pole, `round(n λ⁰ / 2π)`.
    pub fn pole_index(self, n: usize) -> usize {
        (n as f64 * self.pole_frequency() / (2.0 * PI)).round() as usize
    }

    fn tag(self) -> u64 {
        match self {
            Self::FarimaZeroPole => 1,
            Self::GegenbauerHalfPi => 2,
            Self::FlippedPi => 3,
        }
    }

    pub fn autocorrelations(self, alpha: f64, maxlag: usize) -> Result<AutocovSeq> {
        match self {
            Self::FarimaZeroPole => autocorr_farima(alpha, maxlag),
            Self::GegenbauerHalfPi => autocorr_gegenbauer_halfpi(alpha, maxlag),
            Self::FlippedPi => Ok(spectral_flip(&autocorr_farima(alpha, maxlag)?)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimModel {
    pub family: SimFamily,
    pub alpha: f64,
    pub n: usize,
    pub seed: u64,
}

impl SimModel {
    pub fn new(family: SimFamily, alpha: f64, n: usize, seed: u64) -> Result<Self> {
        check_alpha(alpha)?;
        if n < 2 {
            return Err(Error::SeriesTooShort { n, min: 2 });
        }
        Ok(Self {
            family,
            alpha,
            n,
            seed,
        })
    }
}

pub(crate) fn family_tag(family: SimFamily) -> u64 {
    family.tag()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::DomainError {
            value: alpha,
            domain: "memory parameter α in (0, 1)",
        });
    }
    Ok(())
}

/// Autocorrelations `ρ_0, …, ρ_maxlag` with `ρ_0 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct AutocovSeq {
    rho: Vec<f64>,
}

impl AutocovSeq {
    pub fn new(rho: Vec<f64>) -> Result<Self> {
        if rho.first() != Some(&1.0) {
            return Err(Error::InvalidParameter("ρ_0 must equal 1".into()));
        }
        if rho.iter().any(|r| !r.is_finite() || r.abs() > 1.0) {
            return Err(Error::InvalidParameter(
                "autocorrelations must be finite and bounded by 1".into(),
            ));
        }
        Ok(Self { rho })
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn maxlag(&self) -> usize {
        self.rho.len() - 1
    }
}

/// `ρ_j = (j - 1 + d)/(j - d) ρ_{j-1}` with `d = α/2`.
pub fn autocorr_farima(alpha: f64, maxlag: usize) -> Result<AutocovSeq> {
    check_alpha(alpha)?;
    let d = alpha / 2.0;
    let mut rho = Vec::with_capacity(maxlag + 1);
    rho.push(1.0);
    for j in 1..=maxlag {
        let jf = j as f64;
        rho.push(rho[j - 1] * (jf - 1.0 + d) / (jf - d));
    }
    Ok(AutocovSeq { rho })
}

/// `ρ_{2j} = (1 - j - d)/(j - d) ρ_{2(j-1)}`, `ρ_{2j-1} = 0`, `d = α/2`.
pub fn autocorr_gegenbauer_halfpi(alpha: f64, maxlag: usize) -> Result<AutocovSeq> {
    check_alpha(alpha)?;
    let d = alpha / 2.0;
    let mut rho = vec![0.0; maxlag + 1];
    rho[0] = 1.0;
    for j in 1..=maxlag / 2 {
        let jf = j as f64;
        rho[2 * j] = rho[2 * j - 2] * (1.0 - jf - d) / (jf - d);
    }
    Ok(AutocovSeq { rho })
}

/// `ρ′_j = (-1)^j ρ_j`: the autocorrelations of `(-1)^t x_t`.
pub fn spectral_flip(rho: &AutocovSeq) -> AutocovSeq {
    AutocovSeq {
        rho: rho
            .rho
            .iter()
            .enumerate()
            .map(|(j, r)| if j % 2 == 1 { -r } else { *r })
            .collect(),
    }
}

/// Eigenvalues of the `2n` circulant embedding of `ρ_0..ρ_n`, ready for sampling.
#[derive(Clone)]
pub struct EmbeddingSpectrum {
    n: usize,
    eigenvalues: Vec<f64>,
    min_eigenvalue: f64,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for EmbeddingSpectrum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EmbeddingSpectrum")
            .field("n", &self.n)
            .field("min_eigenvalue", &self.min_eigenvalue)
            .finish_non_exhaustive()
    }
}

impl EmbeddingSpectrum {
    /// Builds the first row `(ρ_0, …, ρ_n, ρ_{n-1}, …, ρ_1)` and transforms it.
    /// Fails with [`Error::NotEmbeddable`] when an eigenvalue is below
    /// `-1e-10 · max`; smaller negatives are round-off and clipped to zero.
    pub fn new(rho: &AutocovSeq, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::SeriesTooShort { n, min: 2 });
        }
        if rho.maxlag() < n {
            return Err(Error::InvalidParameter(format!(
                "embedding at length {n} needs autocorrelations up to lag {n}, have {}",
                rho.maxlag()
            )));
        }
        let size = 2 * n;
        let r = rho.rho();
        let mut row: Vec<Complex<f64>> = (0..size)
            .map(|j| Complex::new(if j <= n { r[j] } else { r[size - j] }, 0.0))
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(size);
        fft.process(&mut row);
        let max = row.iter().map(|c| c.re).fold(f64::NEG_INFINITY, f64::max);
        let max_imag = row.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
        debug_assert!(max_imag <= 1e-9 * max.abs().max(1.0), "imaginary part {max_imag}");
        let min_eigenvalue = row.iter().map(|c| c.re).fold(f64::INFINITY, f64::min);
        if min_eigenvalue < -NEGATIVE_EIGEN_TOL * max {
            return Err(Error::NotEmbeddable { n, min_eigenvalue });
        }
        Ok(Self {
            n,
            eigenvalues: row.iter().map(|c| c.re.max(0.0)).collect(),
            min_eigenvalue,
            fft,
        })
    }

    /// Clipped eigenvalues (length `2n`).
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Smallest eigenvalue before clipping.
    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// One Gaussian series of length `n` driven by the normal stream `(key, stream)`.
    pub fn sample(&self, key: u64, stream: u64) -> TimeSeries {
        let mut normals = NormalStream::new(key, stream);
        TimeSeries::new(self.sample_with(&mut normals)).expect("finite by construction")
    }

    fn sample_with(&self, normals: &mut NormalStream) -> Vec<f64> {
        let n = self.n;
        let size = 2 * n;
        let m = size as f64;
        let mut buf = vec![Complex::new(0.0, 0.0); size];
        buf[0] = Complex::new((self.eigenvalues[0] / m).sqrt() * normals.next_normal(), 0.0);
        buf[n] = Complex::new((self.eigenvalues[n] / m).sqrt() * normals.next_normal(), 0.0);
        for k in 1..n {
            let s = (self.eigenvalues[k] / (2.0 * m)).sqrt();
            let re = normals.next_normal();
            let im = normals.next_normal();
            buf[k] = Complex::new(s * re, s * im);
            buf[size - k] = buf[k].conj();
        }
        self.fft.process(&mut buf);
        buf[..n].iter().map(|c| c.re).collect()
    }
}

/// Gaussian series with autocovariance `ρ` (unit variance) by circulant embedding.
pub fn davies_harte(rho: &AutocovSeq, n: usize, seed: u64) -> Result<TimeSeries> {
    Ok(EmbeddingSpectrum::new(rho, n)?.sample(seed, 0))
}

/// Deterministic simulation of `model`: same model, same series.
pub fn simulate(model: &SimModel) -> Result<TimeSeries> {
    let rho = model.family.autocorrelations(model.alpha, model.n)?;
    davies_harte(&rho, model.n, model.seed)
}
