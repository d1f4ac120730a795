//! Weight functions on `(0, 1)` and their integral constants.
//!
//! Two analytic weights are built in:
//!
//! * the pole-search weight `ψ(u) = -u² + 35u^{5/2}/6 - 29u³/6 + 2u³ log u`,
//!   which vanishes at both ends, integrates to zero and behaves like `-u²`
//!   near the origin, giving the argmax a parabolic limit;
//! * the memory weight `w(u) = u^{1/3} - 9u^{1/2}/8`, which integrates to zero
//!   and has `h_w^{-2} Φ² ≈ 0.709`.
//!
//! Tabulated weights are interpolated with a not-a-knot cubic spline through
//! the origin. Only the zero-integral condition is validated for them; the
//! smoothness conditions the asymptotics rely on are the caller's concern.

use std::path::Path;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spline::CubicSpline;

/// Absolute quadrature tolerance used for the cached constants.
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

/// Largest admissible `|∫₀¹ weight|`.
pub const CENTERING_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum WeightKind {
    PsiPaper,
    WPaper,
    UserTabulated,
}

/// Integral constants of a weight function.
///
/// `varsigma` and `psi_bar_dd` need square-integrable first and integrable
/// second derivatives; they are `None` for weights where those integrals
/// diverge (the built-in `w`, whose derivatives blow up at the origin).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightConstants {
    /// `∫₀¹ weight(u) du`; zero up to [`CENTERING_TOL`].
    pub integral: f64,
    /// `h = -∫₀¹ weight(u) log u du`.
    pub h: f64,
    /// `ς = ∫₀¹ weight′(u)² du`.
    pub varsigma: Option<f64>,
    /// `ψ̄″ = ∫₀¹ weight″(u) log u du`, as printed (no leading minus sign).
    pub psi_bar_dd: Option<f64>,
    /// `Φ² = ½ ∫₀¹ weight(u)² du`.
    pub phi_sq: f64,
    /// `∫₀¹ u² weight(u) du`, the moment entering the bias constant.
    pub u2_moment: f64,
}

impl WeightConstants {
    /// `Φ² / h²`, the asymptotic variance of the normalized memory estimator.
    pub fn variance_ratio(&self) -> f64 {
        self.phi_sq / (self.h * self.h)
    }
}

#[derive(Debug, Clone)]
enum Shape {
    Psi,
    W,
    Tabulated(Arc<CubicSpline>),
}

/// An immutable weight function together with its cached constants.
#[derive(Debug, Clone)]
pub struct WeightSpec {
    kind: WeightKind,
    shape: Shape,
    constants: WeightConstants,
}

/// `ψ(u) = -u² + 35u^{5/2}/6 - 29u³/6 + 2u³ log u` on `[0, 1]`.
pub fn psi(u: f64) -> Result<f64> {
    check_unit(u)?;
    Ok(psi_value(u))
}

/// `w(u) = u^{1/3} - 9u^{1/2}/8` on `[0, 1]`.
pub fn w(u: f64) -> Result<f64> {
    check_unit(u)?;
    Ok(w_value(u))
}

fn check_unit(u: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::DomainError {
            value: u,
            domain: "[0, 1]",
        });
    }
    Ok(())
}

fn u3_log_u(u: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        u * u * u * u.ln()
    }
}

fn psi_value(u: f64) -> f64 {
    -u * u + 35.0 * u * u * u.sqrt() / 6.0 - 29.0 * u * u * u / 6.0 + 2.0 * u3_log_u(u)
}

fn psi_d1(u: f64) -> f64 {
    let u2_log = if u == 0.0 { 0.0 } else { u * u * u.ln() };
    -2.0 * u + 175.0 / 12.0 * u * u.sqrt() - 12.5 * u * u + 6.0 * u2_log
}

fn psi_d2(u: f64) -> f64 {
    let u_log = if u == 0.0 { 0.0 } else { u * u.ln() };
    -2.0 + 175.0 / 8.0 * u.sqrt() - 19.0 * u + 12.0 * u_log
}

fn w_value(u: f64) -> f64 {
    u.cbrt() - 9.0 * u.sqrt() / 8.0
}

fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let out = quadrature::integrate(f, a, b, tol);
    if !out.integral.is_finite() || out.error_estimate > tol {
        return Err(Error::QuadratureFailure {
            tolerance: tol,
            estimate: out.error_estimate,
        });
    }
    Ok(out.integral)
}

impl WeightSpec {
    pub fn psi_paper() -> Self {
        Self::build(WeightKind::PsiPaper, Shape::Psi, DEFAULT_QUAD_TOL)
            .expect("built-in pole-search weight is valid")
    }

    pub fn w_paper() -> Self {
        Self::build(WeightKind::WPaper, Shape::W, DEFAULT_QUAD_TOL)
            .expect("built-in memory weight is valid")
    }

    /// Built-in weight with constants recomputed at a custom tolerance.
    pub fn builtin_with_tolerance(kind: WeightKind, tol: f64) -> Result<Self> {
        match kind {
            WeightKind::PsiPaper => Self::build(kind, Shape::Psi, tol),
            WeightKind::WPaper => Self::build(kind, Shape::W, tol),
            WeightKind::UserTabulated => Err(Error::InvalidWeight(
                "tabulated weights need their table".into(),
            )),
        }
    }

    /// Weight interpolated from `(u, value)` pairs with `u` strictly increasing
    /// in `(0, 1)`. The origin `(0, 0)` is added as the first knot; beyond the
    /// last tabulated abscissa the final cubic piece is extended.
    pub fn tabulated(us: &[f64], values: &[f64]) -> Result<Self> {
        if us.len() != values.len() {
            return Err(Error::InvalidWeight("columns differ in length".into()));
        }
        if us.len() < 3 {
            return Err(Error::InvalidWeight("need at least three tabulated points".into()));
        }
        if us.iter().any(|&u| !(u > 0.0 && u < 1.0)) {
            return Err(Error::InvalidWeight("abscissae must lie in (0, 1)".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidWeight("weight values must be finite".into()));
        }
        let mut xs = Vec::with_capacity(us.len() + 1);
        let mut ys = Vec::with_capacity(us.len() + 1);
        xs.push(0.0);
        ys.push(0.0);
        xs.extend_from_slice(us);
        ys.extend_from_slice(values);
        let spline = CubicSpline::not_a_knot(&xs, &ys)?;
        Self::build(
            WeightKind::UserTabulated,
            Shape::Tabulated(Arc::new(spline)),
            DEFAULT_QUAD_TOL,
        )
    }

    /// Loads a two-column CSV `(u, value)`; a non-numeric first line is a header.
    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let table = crate::io::read_numeric_table(path.as_ref())?;
        if table.columns.len() < 2 {
            return Err(Error::InvalidWeight(
                "weight table needs two columns (u, value)".into(),
            ));
        }
        Self::tabulated(&table.columns[0], &table.columns[1])
    }

    fn build(kind: WeightKind, shape: Shape, tol: f64) -> Result<Self> {
        let mut spec = Self {
            kind,
            shape,
            constants: WeightConstants {
                integral: 0.0,
                h: 0.0,
                varsigma: None,
                psi_bar_dd: None,
                phi_sq: 0.0,
                u2_moment: 0.0,
            },
        };
        spec.constants = spec.compute_constants(tol)?;
        if spec.constants.integral.abs() > CENTERING_TOL {
            return Err(Error::InvalidWeight(format!(
                "weight must integrate to zero on (0, 1), got {:e}",
                spec.constants.integral
            )));
        }
        Ok(spec)
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn constants(&self) -> &WeightConstants {
        &self.constants
    }

    /// Weight value at `u ∈ [0, 1]`.
    pub fn eval(&self, u: f64) -> Result<f64> {
        check_unit(u)?;
        Ok(self.value(u))
    }

    pub(crate) fn value(&self, u: f64) -> f64 {
        match &self.shape {
            Shape::Psi => psi_value(u),
            Shape::W => w_value(u),
            Shape::Tabulated(s) => s.eval(u),
        }
    }

    fn d1(&self, u: f64) -> Option<f64> {
        match &self.shape {
            Shape::Psi => Some(psi_d1(u)),
            Shape::W => None,
            Shape::Tabulated(s) => Some(s.deriv1(u)),
        }
    }

    fn d2(&self, u: f64) -> Option<f64> {
        match &self.shape {
            Shape::Psi => Some(psi_d2(u)),
            Shape::W => None,
            Shape::Tabulated(s) => Some(s.deriv2(u)),
        }
    }

    /// Breakpoints over which integrands are smooth.
    fn pieces(&self) -> Vec<f64> {
        match &self.shape {
            Shape::Tabulated(s) => {
                let mut p = s.knots().to_vec();
                if *p.last().unwrap() < 1.0 {
                    p.push(1.0);
                }
                p
            }
            _ => vec![0.0, 1.0],
        }
    }

    fn integrate_pieces(&self, f: impl Fn(f64) -> f64, tol: f64) -> Result<f64> {
        let pieces = self.pieces();
        let per_piece = tol / (pieces.len() - 1) as f64;
        pieces
            .windows(2)
            .map(|ab| integrate(&f, ab[0], ab[1], per_piece))
            .sum()
    }

    /// Recomputes all constants by quadrature at absolute tolerance `tol`.
    pub fn compute_constants(&self, tol: f64) -> Result<WeightConstants> {
        let integral = self.integrate_pieces(|u| self.value(u), tol)?;
        let h = -self.integrate_pieces(|u| self.value(u) * u.ln(), tol)?;
        let phi_sq = 0.5 * self.integrate_pieces(|u| self.value(u).powi(2), tol)?;
        let u2_moment = self.integrate_pieces(|u| u * u * self.value(u), tol)?;
        let (varsigma, psi_bar_dd) = if self.d1(0.5).is_some() {
            (
                Some(self.integrate_pieces(|u| self.d1(u).unwrap().powi(2), tol)?),
                Some(self.integrate_pieces(|u| self.d2(u).unwrap() * u.ln(), tol)?),
            )
        } else {
            (None, None)
        };
        Ok(WeightConstants {
            integral,
            h,
            varsigma,
            psi_bar_dd,
            phi_sq,
            u2_moment,
        })
    }

    /// `h̄ = -k^{-1} Σ_{p=1}^k weight(p/k) log(p/k)`, the discrete analogue of `h`.
    pub fn discrete_h_bar(&self, k: usize) -> f64 {
        let kf = k as f64;
        -(1..=k)
            .map(|p| {
                let u = p as f64 / kf;
                self.value(u) * u.ln()
            })
            .sum::<f64>()
            / kf
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn psi_values() {
        assert_eq!(psi(0.0).unwrap(), 0.0);
        assert!(psi(1e-12).unwrap().abs() < 1e-20);
        assert!(psi(1.0).unwrap().abs() < 1e-14);
        // Independent 30-digit evaluation of the formula.
        assert_relative_eq!(psi(0.5).unwrap(), 0.003_743_927_423_728_812, max_relative = 1e-12);
        assert!(matches!(psi(1.5), Err(Error::DomainError { .. })));
        assert!(psi(-0.1).is_err());
    }

    #[test]
    fn w_values() {
        assert_eq!(w(0.0).unwrap(), 0.0);
        assert_relative_eq!(w(1.0).unwrap(), -0.125);
        assert!(w(2.0).is_err());
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        for &u in &[0.05, 0.2, 0.5, 0.77, 0.95] {
            let e = 1e-5;
            let fd1 = (psi_value(u + e) - psi_value(u - e)) / (2.0 * e);
            let fd2 = (psi_d1(u + e) - psi_d1(u - e)) / (2.0 * e);
            assert_relative_eq!(psi_d1(u), fd1, epsilon = 1e-8);
            assert_relative_eq!(psi_d2(u), fd2, epsilon = 1e-7);
        }
    }

    #[test]
    fn psi_constants_match_closed_forms() {
        // Rational values obtained by exact symbolic integration.
        let c = *WeightSpec::psi_paper().constants();
        assert!(c.integral.abs() < 1e-12);
        assert_relative_eq!(c.h, 1.0 / 2016.0, max_relative = 1e-9);
        assert_relative_eq!(c.psi_bar_dd.unwrap(), 1.0 / 36.0, max_relative = 1e-9);
        assert_relative_eq!(c.varsigma.unwrap(), 0.000_575_617_283_950_617_3, max_relative = 1e-9);
        assert!(c.h > 0.0 && c.varsigma.unwrap() > 0.0 && c.psi_bar_dd.unwrap() > 0.0);
    }

    #[test]
    fn w_constants_match_closed_forms() {
        let c = *WeightSpec::w_paper().constants();
        // ∫u^a du = 1/(a+1): 3/4 - 3/4.
        assert!(c.integral.abs() < 1e-10);
        // ∫u^a log u du = -(a+1)^{-2}.
        assert_relative_eq!(c.h, 1.0 / 16.0, max_relative = 1e-9);
        let int_w_sq = 3.0 / 5.0 - 27.0 / 22.0 + 81.0 / 128.0;
        assert_relative_eq!(c.phi_sq, 0.5 * int_w_sq, max_relative = 1e-9);
        assert_relative_eq!(c.variance_ratio(), 0.709_090_909_090_909, max_relative = 1e-8);
        assert_relative_eq!(c.u2_moment, 3.0 / 10.0 - 9.0 / 28.0, max_relative = 1e-9);
        assert!(c.varsigma.is_none() && c.psi_bar_dd.is_none());
    }

    #[test]
    fn constants_stable_under_tighter_tolerance() {
        for kind in [WeightKind::PsiPaper, WeightKind::WPaper] {
            let a = WeightSpec::builtin_with_tolerance(kind, 1e-10).unwrap();
            let b = WeightSpec::builtin_with_tolerance(kind, 1e-12).unwrap();
            let (a, b) = (a.constants(), b.constants());
            assert!((a.h - b.h).abs() < 1e-9);
            assert!((a.phi_sq - b.phi_sq).abs() < 1e-9);
            assert!((a.u2_moment - b.u2_moment).abs() < 1e-9);
            if let (Some(x), Some(y)) = (a.varsigma, b.varsigma) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn discrete_h_bar_converges() {
        let w = WeightSpec::w_paper();
        let h = w.constants().h;
        let errs: Vec<f64> = [64, 256, 1024]
            .iter()
            .map(|&k| (w.discrete_h_bar(k) - h).abs())
            .collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
        for (&k, e) in [64usize, 256, 1024].iter().zip(&errs) {
            assert!(*e <= 1.0 / k as f64, "k = {k}: {e}");
        }
        let p = WeightSpec::psi_paper();
        let hp = p.constants().h;
        assert!((p.discrete_h_bar(1024) - hp).abs() < (p.discrete_h_bar(64) - hp).abs());
    }

    #[test]
    fn discrete_h_bar_two_terms() {
        let p = WeightSpec::psi_paper();
        let expected = -0.5 * psi_value(0.5) * 0.5f64.ln();
        assert_relative_eq!(p.discrete_h_bar(2), expected, max_relative = 1e-14);
        assert_relative_eq!(p.discrete_h_bar(2), 0.001_297_546_368_989_343, max_relative = 1e-10);
    }

    #[test]
    fn psi_boundedness_conditions() {
        let grid = (1..=1000).map(|i| {
            let t = i as f64 / 1001.0;
            1e-6 + t * (1.0 - 2e-6)
        });
        for u in grid.chain([1e-6, 1.0 - 1e-6]) {
            let v = psi_value(u);
            assert!((v / (u * u)).abs() <= 100.0, "u = {u}");
            assert!((v / (1.0 - u)).abs() <= 100.0, "u = {u}");
        }
    }

    #[test]
    fn tabulated_cubic_reproduces_exactly() {
        // p(u) = u³ - u/2 integrates to zero and passes through the origin.
        let p = |u: f64| u * u * u - 0.5 * u;
        let us: Vec<f64> = (1..40).map(|i| i as f64 / 40.0).collect();
        let vs: Vec<f64> = us.iter().map(|&u| p(u)).collect();
        let spec = WeightSpec::tabulated(&us, &vs).unwrap();
        assert_eq!(spec.kind(), WeightKind::UserTabulated);
        for &u in &[0.013, 0.5, 0.99, 1.0] {
            assert!((spec.eval(u).unwrap() - p(u)).abs() < 1e-12);
        }
        let c = spec.constants();
        // -∫(u³ - u/2) log u = 1/16 - 1/8.
        assert_relative_eq!(c.h, 1.0 / 16.0 - 1.0 / 8.0, max_relative = 1e-8);
        // ∫(3u² - 1/2)² du = 9/5 - 1 + 1/4.
        assert_relative_eq!(c.varsigma.unwrap(), 9.0 / 5.0 - 1.0 + 0.25, max_relative = 1e-8);
    }

    #[test]
    fn tabulated_zero_weight_has_zero_h_bar() {
        let us: Vec<f64> = (1..10).map(|i| i as f64 / 10.0).collect();
        let spec = WeightSpec::tabulated(&us, &[0.0; 9]).unwrap();
        assert_eq!(spec.discrete_h_bar(16), 0.0);
    }

    #[test]
    fn tabulated_rejects_uncentered() {
        let us: Vec<f64> = (1..10).map(|i| i as f64 / 10.0).collect();
        let err = WeightSpec::tabulated(&us, &[1.0; 9]).unwrap_err();
        assert!(matches!(err, Error::InvalidWeight(_)));
        assert!(WeightSpec::tabulated(&[0.0, 0.5, 0.7], &[0.0; 3]).is_err());
    }
}
