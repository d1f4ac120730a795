//! Not-a-knot cubic spline used for tabulated weight functions.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub(crate) struct CubicSpline {
    knots: Vec<f64>,
    // Per segment: value, first, second and third power coefficients in (x - knot).
    coeffs: Vec<[f64; 4]>,
}

impl CubicSpline {
    pub(crate) fn not_a_knot(xs: &[f64], ys: &[f64]) -> Result<Self> {
        let n = xs.len();
        if n != ys.len() || n < 4 {
            return Err(Error::InvalidWeight(
                "a cubic spline needs at least four knots".into(),
            ));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidWeight("knots must be strictly increasing".into()));
        }
        let dx: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let slope: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / dx[i]).collect();

        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];

        let d0 = xs[2] - xs[0];
        diag[0] = dx[1];
        sup[0] = d0;
        rhs[0] = ((dx[0] + 2.0 * d0) * dx[1] * slope[0] + dx[0] * dx[0] * slope[1]) / d0;
        for i in 1..n - 1 {
            sub[i] = dx[i];
            diag[i] = 2.0 * (dx[i - 1] + dx[i]);
            sup[i] = dx[i - 1];
            rhs[i] = 3.0 * (dx[i] * slope[i - 1] + dx[i - 1] * slope[i]);
        }
        let dn = xs[n - 1] - xs[n - 3];
        sub[n - 1] = dn;
        diag[n - 1] = dx[n - 3];
        rhs[n - 1] = (dx[n - 2] * dx[n - 2] * slope[n - 3]
            + (2.0 * dn + dx[n - 2]) * dx[n - 3] * slope[n - 2])
            / dn;

        // Thomas algorithm.
        for i in 1..n {
            let f = sub[i] / diag[i - 1];
            diag[i] -= f * sup[i - 1];
            rhs[i] -= f * rhs[i - 1];
        }
        let mut s = vec![0.0; n];
        s[n - 1] = rhs[n - 1] / diag[n - 1];
        for i in (0..n - 1).rev() {
            s[i] = (rhs[i] - sup[i] * s[i + 1]) / diag[i];
        }
        if s.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidWeight("spline system is singular".into()));
        }

        let coeffs = (0..n - 1)
            .map(|i| {
                let h = dx[i];
                [
                    ys[i],
                    s[i],
                    (3.0 * slope[i] - 2.0 * s[i] - s[i + 1]) / h,
                    (s[i] + s[i + 1] - 2.0 * slope[i]) / (h * h),
                ]
            })
            .collect();
        Ok(Self {
            knots: xs.to_vec(),
            coeffs,
        })
    }

    pub(crate) fn knots(&self) -> &[f64] {
        &self.knots
    }

    fn segment(&self, x: f64) -> (usize, f64) {
        let last = self.coeffs.len() - 1;
        let i = match self.knots.partition_point(|&k| k <= x) {
            0 => 0,
            p => (p - 1).min(last),
        };
        (i, x - self.knots[i])
    }

    pub(crate) fn eval(&self, x: f64) -> f64 {
        let (i, t) = self.segment(x);
        let c = &self.coeffs[i];
        c[0] + t * (c[1] + t * (c[2] + t * c[3]))
    }

    pub(crate) fn deriv1(&self, x: f64) -> f64 {
        let (i, t) = self.segment(x);
        let c = &self.coeffs[i];
        c[1] + t * (2.0 * c[2] + 3.0 * t * c[3])
    }

    pub(crate) fn deriv2(&self, x: f64) -> f64 {
        let (i, t) = self.segment(x);
        let c = &self.coeffs[i];
        2.0 * c[2] + 6.0 * t * c[3]
    }
}
