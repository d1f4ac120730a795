//! Asymptotic confidence intervals for the pole location and the memory
//! parameter, using plug-in estimates of the limiting variances.
//!
//! For the pole, `n(λ̂⁰ - λ⁰)/(2π√k)` is asymptotically `N(0, Ψ)` with
//! `Ψ = ς / (ψ̄″ α)²` when `λ⁰` is interior. At `λ⁰ = 0` the limit is
//! `Y·1{Y ≥ 0}` (half the mass sits exactly at the boundary), and mirrored at
//! `π`. The boundary regime is read off the estimate (`q̂ = 0` or `q̂ = n/2`);
//! no interpolation between the two laws is attempted near the boundary.
//!
//! For `α`, `√(2m)(ᾰ - α)` is asymptotically normal with variance `Φ²/h_w²`
//! and a bias that depends on the curvature of `log g` at the pole. That
//! curvature is not estimated; it can be supplied through [`BiasInputs`].

use std::f64::consts::{PI, SQRT_2};

use serde::Serialize;
use statrs::function::erf::erfc_inv;

use crate::error::{Error, Result};
use crate::estimators::{BoundaryRegime, MemoryEstimate, PoleEstimate};
use crate::weights::WeightConstants;

/// Standard normal quantile `Φ^{-1}(p)` for `p ∈ (0, 1)`.
pub fn normal_quantile(p: f64) -> f64 {
    -SQRT_2 * erfc_inv(2.0 * p)
}

fn check_level(level: f64) -> Result<()> {
    if !(level > 0.5 && level < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "confidence level {level} outside (0.5, 1)"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoleCI {
    /// `λ̂⁰` in radians.
    pub center: f64,
    /// Two-sided half width (interior) or one-sided width (boundary), radians.
    pub half_width: f64,
    pub lower: f64,
    pub upper: f64,
    pub regime: BoundaryRegime,
    /// Limiting probability that the normalized statistic sits exactly on the boundary.
    pub point_mass_at_boundary: f64,
    pub level: f64,
    /// Plug-in asymptotic variance `Ψ` of the normalized statistic.
    #[serde(rename = "Psi")]
    pub psi_variance: f64,
}

impl PoleCI {
    pub fn contains(&self, lambda: f64) -> bool {
        self.lower <= lambda && lambda <= self.upper
    }
}

/// Interval for `λ⁰` around `est` using `α̂` in place of `α`.
pub fn pole_ci(
    est: &PoleEstimate,
    alpha_hat: f64,
    n: usize,
    k: usize,
    psi_constants: &WeightConstants,
    level: f64,
) -> Result<PoleCI> {
    check_level(level)?;
    if !(alpha_hat > 0.0) {
        return Err(Error::AlphaNonPositive(alpha_hat));
    }
    let (varsigma, psi_bar_dd) = match (psi_constants.varsigma, psi_constants.psi_bar_dd) {
        (Some(v), Some(d)) if v > 0.0 && d > 0.0 => (v, d),
        _ => {
            return Err(Error::InvalidWeight(
                "pole-search weight needs ς > 0 and ψ̄″ > 0".into(),
            ))
        }
    };
    let psi_variance = varsigma / (psi_bar_dd * alpha_hat).powi(2);
    let scale = 2.0 * PI * (k as f64).sqrt() / n as f64 * psi_variance.sqrt();
    let center = est.lambda_hat;
    let (half_width, lower, upper, mass) = match est.boundary_regime {
        BoundaryRegime::Interior => {
            let h = normal_quantile(0.5 * (1.0 + level)) * scale;
            (h, (center - h).max(0.0), (center + h).min(PI), 0.0)
        }
        // P(Y 1{Y ≥ 0} ≤ c) = Φ(c/σ) for c ≥ 0, so the one-sided bound is z_level σ.
        BoundaryRegime::AtZero => {
            let h = normal_quantile(level) * scale;
            (h, 0.0, h.min(PI), 0.5)
        }
        BoundaryRegime::AtPi => {
            let h = normal_quantile(level) * scale;
            (h, (PI - h).max(0.0), PI, 0.5)
        }
    };
    Ok(PoleCI {
        center,
        half_width,
        lower,
        upper,
        regime: est.boundary_regime,
        point_mass_at_boundary: mass,
        level,
        psi_variance,
    })
}

/// Expert inputs for the asymptotic bias of the two-step estimator: the rate
/// constant `c` in `m = c n^{4/5}` and `∂²/∂λ² log g(λ⁰)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BiasInputs {
    pub c: f64,
    pub log_g_dd: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaCI {
    /// Estimate minus the bias correction.
    pub center: f64,
    pub half_width: f64,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    /// Subtracted from the estimate; 0 unless [`BiasInputs`] were supplied.
    pub bias_correction: f64,
    /// `Φ²/h_w²`, the variance of `√(2m)(ᾰ - α)`.
    pub variance: f64,
}

impl AlphaCI {
    pub fn contains(&self, alpha: f64) -> bool {
        self.lower <= alpha && alpha <= self.upper
    }
}

pub fn alpha_ci(
    est: &MemoryEstimate,
    m: usize,
    w_constants: &WeightConstants,
    level: f64,
    bias_inputs: Option<BiasInputs>,
) -> Result<AlphaCI> {
    check_level(level)?;
    if m < 2 {
        return Err(Error::InvalidParameter(format!("band count {m} < 2")));
    }
    let variance = w_constants.variance_ratio();
    if !(variance > 0.0 && variance.is_finite()) {
        return Err(Error::InvalidWeight("memory weight needs Φ² > 0 and h ≠ 0".into()));
    }
    let root_2m = (2.0 * m as f64).sqrt();
    let half_width = normal_quantile(0.5 * (1.0 + level)) * (variance / (2.0 * m as f64)).sqrt();
    let bias_correction = match bias_inputs {
        Some(b) => {
            let big_b = b.log_g_dd * w_constants.u2_moment;
            4.0 * PI * PI * b.c.powf(2.5) * big_b / (SQRT_2 * w_constants.h * root_2m)
        }
        None => 0.0,
    };
    let center = est.alpha - bias_correction;
    Ok(AlphaCI {
        center,
        half_width,
        lower: center - half_width,
        upper: center + half_width,
        level,
        bias_correction,
        variance,
    })
}
