//! Linear algebra of C^{n+1} with the signature-(1,n) Hermitian form.
//!
//! The timelike slot is the first coordinate: for z, w in C^{n+1},
//!
//!   <z, w>_C = -conj(z0) w0 + conj(z1) w1 + ... + conj(zn) wn,
//!
//! conjugate-linear in the first argument.  The real part <z, w> = Re <z, w>_C
//! is the ambient semi-Riemannian metric.  The anti-de Sitter quadric is
//! Q = { z : <z, z> = -r^2 }, the null cone is { z != 0 : <z, z> = 0 }, and
//! its projectivization is identified with the unit sphere in C^n through the
//! affine chart w_i = z_i / z_0.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for null-cone and quadric membership checks.
pub const MEMBERSHIP_RTOL: f64 = 1e-9;

/// Element of C^{n+1} carrying the signature-(1,n) form.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientVector {
    coords: Vec<Complex64>,
}

impl AmbientVector {
    /// Construct from coordinates; rejects non-finite entries.
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        for (index, c) in coords.iter().enumerate() {
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::NonFinite { index });
            }
        }
        Ok(Self { coords })
    }

    /// Construct without the finiteness check (internal arithmetic results).
    pub(crate) fn from_raw(coords: Vec<Complex64>) -> Self {
        Self { coords }
    }

    pub fn from_reals(coords: &[f64]) -> Self {
        Self {
            coords: coords.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            coords: vec![Complex64::ZERO; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> Complex64 {
        self.coords[i]
    }

    /// Multiplication by i (the ambient complex structure).
    pub fn times_i(&self) -> Self {
        self.scale(Complex64::I)
    }

    pub fn scale(&self, a: Complex64) -> Self {
        Self {
            coords: self.coords.iter().map(|c| a * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// a*self + b*other, the workhorse of the d'Alembert evaluator.
    pub fn linear_combination(&self, a: Complex64, other: &Self, b: Complex64) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        }
    }

    /// Largest coordinate modulus, used as the scale for relative tolerances.
    pub fn scale_norm(&self) -> f64 {
        self.coords.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Positive-definite Euclidean norm squared (sum of |z_i|^2), for
    /// scaling decisions only -- not the indefinite form.
    pub fn euclid_norm_sq(&self) -> f64 {
        self.coords.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Is this vector null with respect to the indefinite form, up to the
    /// relative membership tolerance?
    pub fn is_null(&self) -> bool {
        let scale = self.scale_norm();
        real_form(self, self).abs() <= MEMBERSHIP_RTOL * scale * scale
    }
}

/// The sesquilinear form: -conj(z0) w0 + sum_{j>=1} conj(zj) wj.
pub fn herm_form(z: &AmbientVector, w: &AmbientVector) -> Result<Complex64> {
    if z.dim() != w.dim() {
        return Err(Error::DimensionMismatch {
            left: z.dim(),
            right: w.dim(),
        });
    }
    Ok(herm_form_unchecked(z, w))
}

pub(crate) fn herm_form_unchecked(z: &AmbientVector, w: &AmbientVector) -> Complex64 {
    let mut acc = -z.coords[0].conj() * w.coords[0];
    for (a, b) in z.coords[1..].iter().zip(&w.coords[1..]) {
        acc += a.conj() * b;
    }
    acc
}

/// The real bilinear form Re <z, w>_C, i.e. the ambient metric.
pub fn real_form(z: &AmbientVector, w: &AmbientVector) -> f64 {
    debug_assert_eq!(z.dim(), w.dim());
    herm_form_unchecked(z, w).re
}

/// Curvature radius r, angle phi and the Hopf principal curvature
/// alpha = (2/r) sin(phi).  Holomorphic sectional curvature is -4/r^2.
/// phi in (-pi/2, pi/2) keeps |alpha| < 2/r, the regime where the
/// construction applies.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HopfParams {
    r: f64,
    phi: f64,
    alpha: f64,
}

impl HopfParams {
    pub fn from_phi(r: f64, phi: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Config {
                path: "params.r".into(),
                reason: format!("r must be positive and finite, got {r}"),
            });
        }
        if !(phi.abs() < std::f64::consts::FRAC_PI_2) {
            return Err(Error::Config {
                path: "params.phi".into(),
                reason: format!("phi must lie in (-pi/2, pi/2), got {phi}"),
            });
        }
        let alpha = (2.0 / r) * phi.sin();
        Ok(Self { r, phi, alpha })
    }

    pub fn from_alpha(r: f64, alpha: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Config {
                path: "params.r".into(),
                reason: format!("r must be positive and finite, got {r}"),
            });
        }
        let bound = 2.0 / r;
        if !(alpha.abs() < bound) {
            return Err(Error::Regime {
                alpha_abs: alpha.abs(),
                bound,
            });
        }
        let phi = (alpha * r / 2.0).asin();
        Ok(Self { r, phi, alpha })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Residual of quadric membership: Re<z,z> + r^2, zero iff z lies on Q.
pub fn quadric_residual(z: &AmbientVector, params: &HopfParams) -> f64 {
    real_form(z, z) + params.r() * params.r()
}

/// Affine chart of the projectivized null cone: (z1/z0, ..., zn/z0),
/// landing on the unit sphere in C^n.
pub fn to_sphere_chart(n: &AmbientVector) -> Result<Vec<Complex64>> {
    if !n.is_null() {
        return Err(Error::ChartDomain {
            reason: format!(
                "input is not null: <n,n> = {:.3e}",
                real_form(n, n)
            ),
        });
    }
    divide_by_z0(n)
}

/// Affine chart of a timelike vector, landing in the open unit ball in C^n.
pub fn to_ball_chart(z: &AmbientVector) -> Result<Vec<Complex64>> {
    if real_form(z, z) >= 0.0 {
        return Err(Error::ChartDomain {
            reason: format!(
                "input is not timelike: <z,z> = {:.3e}",
                real_form(z, z)
            ),
        });
    }
    divide_by_z0(z)
}

fn divide_by_z0(z: &AmbientVector) -> Result<Vec<Complex64>> {
    let z0 = z.coord(0);
    if z0.norm() <= f64::EPSILON * z.scale_norm() {
        return Err(Error::ChartDomain {
            reason: "z0 = 0: point outside the affine chart".into(),
        });
    }
    Ok(z.coords()[1..].iter().map(|c| c / z0).collect())
}

/// Euclidean norm of a chart point in C^n.
pub fn chart_norm(w: &[Complex64]) -> f64 {
    w.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Euclidean distance between two chart points.
pub fn chart_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(parts: &[(f64, f64)]) -> AmbientVector {
        AmbientVector::new(parts.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
            .unwrap()
    }

    #[test]
    fn herm_form_examples() {
        let e = v(&[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
        assert_eq!(herm_form(&e, &e).unwrap(), Complex64::new(-1.0, 0.0));

        let n = v(&[(1.0, 0.0), (1.0, 0.0), (0.0, 0.0)]);
        assert_eq!(herm_form(&n, &n).unwrap(), Complex64::ZERO);

        let m = v(&[(1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        // -1*1 + 1*0 + 0*1 = -1, hand evaluation of the three-term sum
        assert_eq!(herm_form(&n, &m).unwrap(), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn herm_form_dimension_mismatch() {
        let a = v(&[(1.0, 0.0), (0.0, 0.0)]);
        let b = v(&[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
        assert!(matches!(
            herm_form(&a, &b),
            Err(Error::DimensionMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn real_form_examples() {
        let e = v(&[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
        let ie = v(&[(0.0, 1.0), (0.0, 0.0), (0.0, 0.0)]);
        assert_eq!(real_form(&e, &ie), 0.0);

        let sp = v(&[(0.0, 0.0), (1.0, 0.0), (0.0, 0.0)]);
        assert_eq!(real_form(&sp, &sp), 1.0);

        let n = v(&[(1.0, 0.0), (1.0, 0.0), (0.0, 0.0)]);
        let in_ = n.times_i();
        assert_eq!(real_form(&n, &in_), 0.0);
    }

    #[test]
    fn non_finite_rejected() {
        let res = AmbientVector::new(vec![Complex64::new(f64::NAN, 0.0)]);
        assert!(matches!(res, Err(Error::NonFinite { index: 0 })));
    }

    #[test]
    fn quadric_residual_examples() {
        let p = HopfParams::from_phi(1.0, 0.0).unwrap();
        let z = v(&[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
        assert_eq!(quadric_residual(&z, &p), 0.0);

        let sp = v(&[(0.0, 0.0), (1.0, 0.0), (0.0, 0.0)]);
        assert_eq!(quadric_residual(&sp, &p), 2.0);

        // -i*r*e0 with <e0,e0> = -1 lies on Q for any r
        let p2 = HopfParams::from_phi(2.5, 0.3).unwrap();
        let e0 = v(&[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
        let z2 = e0.scale(Complex64::new(0.0, -p2.r()));
        assert!(quadric_residual(&z2, &p2).abs() < 1e-12);
    }

    #[test]
    fn sphere_chart_examples() {
        let n = v(&[(1.0, 0.0), (1.0, 0.0), (0.0, 0.0)]);
        let w = to_sphere_chart(&n).unwrap();
        assert_eq!(w, vec![Complex64::new(1.0, 0.0), Complex64::ZERO]);

        let n2 = v(&[(2.0, 0.0), (0.0, 2.0), (0.0, 0.0)]);
        let w2 = to_sphere_chart(&n2).unwrap();
        assert!((w2[0] - Complex64::I).norm() < 1e-15);
        assert!(w2[1].norm() < 1e-15);
    }

    #[test]
    fn sphere_chart_rejects_z0_zero() {
        let n = v(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]);
        // <n,n> = 2, not null either; make a null one with z0 = 0 is impossible
        // unless all entries vanish, so the chart error surfaces as non-null.
        assert!(to_sphere_chart(&n).is_err());
    }

    #[test]
    fn ball_chart_examples() {
        let z = v(&[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
        assert_eq!(
            to_ball_chart(&z).unwrap(),
            vec![Complex64::ZERO, Complex64::ZERO]
        );

        let z2 = v(&[(2.0, 0.0), (1.0, 0.0), (0.0, 0.0)]);
        let w = to_ball_chart(&z2).unwrap();
        assert_eq!(w[0], Complex64::new(0.5, 0.0));
        assert!(chart_norm(&w) < 1.0);

        let sp = v(&[(0.0, 0.0), (1.0, 0.0), (0.0, 0.0)]);
        assert!(to_ball_chart(&sp).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_complex(m: f64) -> impl Strategy<Value = Complex64> {
            (-m..m, -m..m).prop_map(|(re, im)| Complex64::new(re, im))
        }

        fn arb_vector() -> impl Strategy<Value = AmbientVector> {
            proptest::collection::vec(arb_complex(2.0), 3)
                .prop_map(|c| AmbientVector::new(c).unwrap())
        }

        /// Timelike vector with z0 bounded away from 0: a phase-scaled lift
        /// of an interior ball point.
        fn arb_timelike() -> impl Strategy<Value = (AmbientVector, Vec<Complex64>)> {
            (arb_complex(1.0), arb_complex(1.0), 0.2..2.0_f64, 0.0..std::f64::consts::TAU)
                .prop_map(|(w1, w2, rho, theta)| {
                    // scale the chart point inside the ball
                    let norm = (w1.norm_sqr() + w2.norm_sqr()).sqrt();
                    let shrink = if norm > 0.9 { 0.9 / norm } else { 1.0 };
                    let w = vec![w1 * shrink, w2 * shrink];
                    let z0 = Complex64::from_polar(rho, theta);
                    let z = AmbientVector::new(vec![z0, z0 * w[0], z0 * w[1]]).unwrap();
                    (z, w)
                })
        }

        proptest! {
            #[test]
            fn sesquilinear_in_both_slots(z in arb_vector(), w in arb_vector(), a in arb_complex(2.0)) {
                let base = herm_form(&z, &w).unwrap();
                let left = herm_form(&z.scale(a), &w).unwrap();
                prop_assert!((left - a.conj() * base).norm() < 1e-10);
                let right = herm_form(&z, &w.scale(a)).unwrap();
                prop_assert!((right - a * base).norm() < 1e-10);
                // conjugate symmetry
                let flipped = herm_form(&w, &z).unwrap();
                prop_assert!((flipped - base.conj()).norm() < 1e-12);
            }

            #[test]
            fn z_orthogonal_to_iz(z in arb_vector()) {
                prop_assert!(real_form(&z, &z.times_i()).abs() < 1e-10);
            }

            #[test]
            fn ball_chart_lands_in_ball(pair in arb_timelike()) {
                let (z, w_expected) = pair;
                let w = to_ball_chart(&z).unwrap();
                prop_assert!(chart_norm(&w) < 1.0);
                prop_assert!(chart_distance(&w, &w_expected) < 1e-12);
            }

            #[test]
            fn chart_is_fiber_invariant(pair in arb_timelike(), theta in 0.0..std::f64::consts::TAU) {
                let (z, _) = pair;
                let rotated = z.scale(Complex64::from_polar(1.0, theta));
                let a = to_ball_chart(&z).unwrap();
                let b = to_ball_chart(&rotated).unwrap();
                prop_assert!(chart_distance(&a, &b) < 1e-12);
            }
        }
    }

    #[test]
    fn hopf_params_regime() {
        let p = HopfParams::from_alpha(2.0, 0.0).unwrap();
        assert_eq!(p.phi(), 0.0);

        let p = HopfParams::from_phi(2.0, std::f64::consts::FRAC_PI_6).unwrap();
        assert!((p.alpha() - 0.5).abs() < 1e-15);

        assert!(matches!(
            HopfParams::from_alpha(1.0, 2.5),
            Err(Error::Regime { .. })
        ));
    }
}
