//! Natural cubic splines and cubic Hermite interpolation on uniform or
//! non-uniform knots.  Used for table-driven curves and for the dense output
//! of the contact ODE.

use crate::error::{Error, Result};

/// Natural cubic spline through (x_i, y_i), strictly increasing knots.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    // second derivatives at the knots
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn natural(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::Config {
                path: "table".into(),
                reason: format!("need >= 2 matching knots, got {} / {}", x.len(), y.len()),
            });
        }
        for w in x.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Config {
                    path: "table.t".into(),
                    reason: "knots must be strictly increasing".into(),
                });
            }
        }
        let n = x.len();
        // tridiagonal solve for natural boundary conditions
        let mut m = vec![0.0; n];
        if n > 2 {
            let mut sub = vec![0.0; n - 2];
            let mut diag = vec![0.0; n - 2];
            let mut sup = vec![0.0; n - 2];
            let mut rhs = vec![0.0; n - 2];
            for i in 1..n - 1 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                sub[i - 1] = h0;
                diag[i - 1] = 2.0 * (h0 + h1);
                sup[i - 1] = h1;
                rhs[i - 1] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
            }
            // Thomas algorithm
            for i in 1..n - 2 {
                let w = sub[i] / diag[i - 1];
                diag[i] -= w * sup[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            let mut sol = vec![0.0; n - 2];
            sol[n - 3] = rhs[n - 3] / diag[n - 3];
            for i in (0..n - 3).rev() {
                sol[i] = (rhs[i] - sup[i] * sol[i + 1]) / diag[i];
            }
            for i in 0..n - 2 {
                m[i + 1] = sol[i];
            }
        }
        Ok(Self { x, y, m })
    }

    fn segment(&self, t: f64) -> usize {
        let n = self.x.len();
        match self.x.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    pub fn deriv(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        (self.y[i + 1] - self.y[i]) / h
            + ((3.0 * b * b - 1.0) * self.m[i + 1] - (3.0 * a * a - 1.0) * self.m[i]) * h / 6.0
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], *self.x.last().unwrap())
    }
}

/// Cubic Hermite interpolant on uniform knots with prescribed values and
/// first derivatives; C^1, fourth-order accurate when the derivatives are
/// exact.  Dense output for the contact ODE.
#[derive(Debug, Clone)]
pub struct HermiteSpline {
    t0: f64,
    h: f64,
    y: Vec<f64>,
    dy: Vec<f64>,
}

impl HermiteSpline {
    pub fn new(t0: f64, h: f64, y: Vec<f64>, dy: Vec<f64>) -> Self {
        assert_eq!(y.len(), dy.len());
        assert!(y.len() >= 2 && h > 0.0);
        Self { t0, h, y, dy }
    }

    fn segment(&self, t: f64) -> (usize, f64) {
        let n = self.y.len();
        let raw = (t - self.t0) / self.h;
        let i = (raw.floor() as isize).clamp(0, n as isize - 2) as usize;
        (i, raw - i as f64)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let (i, s) = self.segment(t);
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let (d0, d1) = (self.dy[i] * self.h, self.dy[i + 1] * self.h);
        let s2 = s * s;
        let s3 = s2 * s;
        y0 * (2.0 * s3 - 3.0 * s2 + 1.0)
            + d0 * (s3 - 2.0 * s2 + s)
            + y1 * (-2.0 * s3 + 3.0 * s2)
            + d1 * (s3 - s2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spline_reproduces_cubic_derivative_to_spline_order() {
        // natural spline is exact for linear data
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|&t| 2.0 * t + 1.0).collect();
        let sp = CubicSpline::natural(x, y).unwrap();
        assert!((sp.eval(4.3) - 9.6).abs() < 1e-12);
        assert!((sp.deriv(4.3) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn spline_approximates_sine() {
        let n = 200;
        let x: Vec<f64> = (0..=n).map(|i| i as f64 * 0.05).collect();
        let y: Vec<f64> = x.iter().map(|&t| t.sin()).collect();
        let sp = CubicSpline::natural(x, y).unwrap();
        for &t in &[0.7, 3.3, 7.9] {
            assert!((sp.eval(t) - t.sin()).abs() < 1e-6, "value at {t}");
            assert!((sp.deriv(t) - t.cos()).abs() < 1e-4, "deriv at {t}");
        }
    }

    #[test]
    fn hermite_reproduces_cubic_exactly() {
        let f = |t: f64| t * t * t - 2.0 * t + 1.0;
        let df = |t: f64| 3.0 * t * t - 2.0;
        let h = 0.5;
        let y: Vec<f64> = (0..=8).map(|i| f(i as f64 * h)).collect();
        let dy: Vec<f64> = (0..=8).map(|i| df(i as f64 * h)).collect();
        let sp = HermiteSpline::new(0.0, h, y, dy);
        for &t in &[0.13, 1.77, 3.9] {
            assert!((sp.eval(t) - f(t)).abs() < 1e-12, "at {t}");
        }
    }
}
