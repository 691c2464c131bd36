//! Legendrian boundary data: contact curves in S^3 (n = 2) generated by the
//! underdetermined contact ODE, and user-supplied Legendrian patches for
//! general n.
//!
//! A curve in S^3 given by angle functions (mu, beta, gamma),
//!
//!   w1 = e^{i beta} cos(mu),  w2 = e^{i gamma} sin(mu),
//!
//! lifts to the null cone as n(t) = (1, w1, w2).  It is a contact curve
//! exactly when beta' cos^2(mu) + gamma' sin^2(mu) = 0, which is the n = 2
//! specialization of the Legendrian criterion <dn, i n> = 0.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::hermitian::{real_form, AmbientVector};
use crate::spline::{CubicSpline, HermiteSpline};

/// Default lower bound on |cos mu| for the beta-equation.
pub const DEFAULT_COS_MU_FLOOR: f64 = 1e-3;

/// Tolerance for the pointwise contact identity at construction time.
pub const CONTACT_IDENTITY_TOL: f64 = 1e-9;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A scalar angle function together with its first derivative.
#[derive(Clone)]
pub struct AngleFn {
    f: RealFn,
    df: RealFn,
}

impl AngleFn {
    pub fn new(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            f: Arc::new(f),
            df: Arc::new(df),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| c, |_| 0.0)
    }

    /// a + b*t
    pub fn linear(a: f64, b: f64) -> Self {
        Self::new(move |t| a + b * t, move |_| b)
    }

    pub fn from_spline(sp: CubicSpline) -> Self {
        let sp2 = sp.clone();
        Self::new(move |t| sp.eval(t), move |t| sp2.deriv(t))
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    pub fn deriv(&self, t: f64) -> f64 {
        (self.df)(t)
    }
}

impl std::fmt::Debug for AngleFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("AngleFn {..}")
    }
}

/// Parametric contact curve in S^3 via angle functions.
#[derive(Debug, Clone)]
pub struct ContactCurve {
    mu: AngleFn,
    gamma: AngleFn,
    beta: AngleFn,
    t_domain: (f64, f64),
}

impl ContactCurve {
    /// Construct and validate the contact identity on a sampling of the
    /// domain (64 interior points), and check cos(mu) stays away from 0.
    pub fn new(mu: AngleFn, gamma: AngleFn, beta: AngleFn, t_domain: (f64, f64)) -> Result<Self> {
        let curve = Self::new_unchecked(mu, gamma, beta, t_domain);
        let n = 64;
        for k in 0..=n {
            let t = t_domain.0 + (t_domain.1 - t_domain.0) * k as f64 / n as f64;
            let defect = curve.contact_identity(t);
            if defect.abs() > CONTACT_IDENTITY_TOL {
                return Err(Error::ContactViolation { t, defect });
            }
            let cm = curve.mu.eval(t).cos();
            if cm.abs() < DEFAULT_COS_MU_FLOOR {
                return Err(Error::SingularOde {
                    t,
                    cos_mu: cm.abs(),
                    delta: DEFAULT_COS_MU_FLOOR,
                });
            }
        }
        Ok(curve)
    }

    /// No validation; for probing non-contact configurations.
    pub fn new_unchecked(
        mu: AngleFn,
        gamma: AngleFn,
        beta: AngleFn,
        t_domain: (f64, f64),
    ) -> Self {
        Self {
            mu,
            gamma,
            beta,
            t_domain,
        }
    }

    pub fn t_domain(&self) -> (f64, f64) {
        self.t_domain
    }

    /// beta' cos^2(mu) + gamma' sin^2(mu) at t.
    pub fn contact_identity(&self, t: f64) -> f64 {
        let m = self.mu.eval(t);
        let (sm, cm) = m.sin_cos();
        self.beta.deriv(t) * cm * cm + self.gamma.deriv(t) * sm * sm
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        let (lo, hi) = self.t_domain;
        if t < lo || t > hi {
            return Err(Error::OutOfDomain { t, lo, hi });
        }
        Ok(())
    }

    /// The canonical lift into the null cone: (1, e^{i beta} cos mu, e^{i gamma} sin mu).
    pub fn lift(&self, t: f64) -> Result<AmbientVector> {
        self.check_domain(t)?;
        Ok(self.lift_unchecked(t))
    }

    pub(crate) fn lift_unchecked(&self, t: f64) -> AmbientVector {
        let m = self.mu.eval(t);
        let (sm, cm) = m.sin_cos();
        AmbientVector::from_raw(vec![
            Complex64::ONE,
            Complex64::from_polar(1.0, self.beta.eval(t)) * cm,
            Complex64::from_polar(1.0, self.gamma.eval(t)) * sm,
        ])
    }

    /// Analytic t-derivative of the lift.
    pub fn lift_deriv(&self, t: f64) -> Result<AmbientVector> {
        self.check_domain(t)?;
        Ok(self.lift_deriv_unchecked(t))
    }

    pub(crate) fn lift_deriv_unchecked(&self, t: f64) -> AmbientVector {
        let m = self.mu.eval(t);
        let dm = self.mu.deriv(t);
        let (sm, cm) = m.sin_cos();
        let eb = Complex64::from_polar(1.0, self.beta.eval(t));
        let eg = Complex64::from_polar(1.0, self.gamma.eval(t));
        let db = self.beta.deriv(t);
        let dg = self.gamma.deriv(t);
        AmbientVector::from_raw(vec![
            Complex64::ZERO,
            eb * Complex64::new(-dm * sm, db * cm),
            eg * Complex64::new(dm * cm, dg * sm),
        ])
    }

    /// View as a one-parameter Legendrian patch.
    pub fn as_patch(&self) -> LegendrianPatch {
        let c1 = self.clone();
        let c2 = self.clone();
        LegendrianPatch {
            dim: 1,
            immersion: Arc::new(move |x: &[f64]| c1.lift_unchecked(x[0])),
            partials: vec![Arc::new(move |x: &[f64]| c2.lift_deriv_unchecked(x[0]))],
        }
    }
}

/// Solve the contact ODE beta' = -gamma' tan^2(mu) for beta on a uniform
/// grid with classical RK4, starting from beta(t0) = beta0.  The returned
/// curve carries a cubic Hermite dense output for beta values; beta' is
/// taken from the ODE itself, so the contact identity holds pointwise.
pub fn solve_contact_beta(
    mu: AngleFn,
    gamma: AngleFn,
    beta0: f64,
    t_domain: (f64, f64),
    steps: usize,
    delta: f64,
) -> Result<ContactCurve> {
    let (t0, t1) = t_domain;
    if !(t1 > t0) || steps < 1 {
        return Err(Error::Config {
            path: "curve.t_domain".into(),
            reason: "need t1 > t0 and at least one step".into(),
        });
    }
    let h = (t1 - t0) / steps as f64;
    let rhs = |t: f64| -> Result<f64> {
        let cm = mu.eval(t).cos();
        if cm.abs() < delta {
            return Err(Error::SingularOde {
                t,
                cos_mu: cm.abs(),
                delta,
            });
        }
        let tan = mu.eval(t).tan();
        Ok(-gamma.deriv(t) * tan * tan)
    };

    let mut y = vec![0.0; steps + 1];
    let mut dy = vec![0.0; steps + 1];
    y[0] = beta0;
    dy[0] = rhs(t0)?;
    for i in 0..steps {
        let t = t0 + i as f64 * h;
        // RK4; the right-hand side is independent of beta, so this is
        // Simpson quadrature with the classical fourth-order error.
        let k1 = rhs(t)?;
        let k2 = rhs(t + 0.5 * h)?;
        let k3 = k2;
        let k4 = rhs(t + h)?;
        y[i + 1] = y[i] + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        dy[i + 1] = k4;
    }
    let dense = HermiteSpline::new(t0, h, y, dy);
    let mu2 = mu.clone();
    let gamma2 = gamma.clone();
    let beta = AngleFn::new(
        move |t| dense.eval(t),
        move |t| {
            let tan = mu2.eval(t).tan();
            -gamma2.deriv(t) * tan * tan
        },
    );
    ContactCurve::new(mu, gamma, beta, t_domain)
}

/// Immersed Legendrian data for general n: a map from a box in R^{n-1}
/// into the null cone, normalized to z0 = 1, with analytic partials.
#[derive(Clone)]
pub struct LegendrianPatch {
    dim: usize,
    immersion: Arc<dyn Fn(&[f64]) -> AmbientVector + Send + Sync>,
    partials: Vec<Arc<dyn Fn(&[f64]) -> AmbientVector + Send + Sync>>,
}

impl LegendrianPatch {
    pub fn new(
        dim: usize,
        immersion: Arc<dyn Fn(&[f64]) -> AmbientVector + Send + Sync>,
        partials: Vec<Arc<dyn Fn(&[f64]) -> AmbientVector + Send + Sync>>,
    ) -> Result<Self> {
        if partials.len() != dim {
            return Err(Error::Config {
                path: "patch.partials".into(),
                reason: format!("expected {} partials, got {}", dim, partials.len()),
            });
        }
        Ok(Self {
            dim,
            immersion,
            partials,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, point: &[f64]) -> AmbientVector {
        (self.immersion)(point)
    }

    pub fn partial(&self, point: &[f64], direction: usize) -> AmbientVector {
        (self.partials[direction])(point)
    }
}

impl std::fmt::Debug for LegendrianPatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LegendrianPatch {{ dim: {} }}", self.dim)
    }
}

/// The Legendrian defect <dn/dx_direction, i n> at a point; vanishes in
/// every direction exactly when the patch is Legendrian there.
pub fn contact_defect(patch: &LegendrianPatch, point: &[f64], direction: usize) -> f64 {
    let n = patch.eval(point);
    let dn = patch.partial(point, direction);
    real_form(&dn, &n.times_i())
}

/// Finite-difference oracle for the defect: <(n(x+h e_d) - n(x-h e_d))/2h, i n>.
pub fn contact_defect_fd(patch: &LegendrianPatch, point: &[f64], direction: usize, h: f64) -> f64 {
    let n = patch.eval(point);
    let mut p = point.to_vec();
    p[direction] += h;
    let np = patch.eval(&p);
    p[direction] -= 2.0 * h;
    let nm = patch.eval(&p);
    let dn = np.sub(&nm).scale(Complex64::new(0.5 / h, 0.0));
    real_form(&dn, &n.times_i())
}

/// JSON curve specification: either a named preset or a sampled table.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub params: Option<serde_json::Map<String, serde_json::Value>>,
    #[serde(default)]
    pub table: Option<CurveTable>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveTable {
    pub t: Vec<f64>,
    pub mu: Vec<f64>,
    pub gamma: Vec<f64>,
    pub beta0: f64,
}

/// Legendrian great circle: mu = pi/4, beta = t, gamma = -t.
/// With mu constant, the identity reads beta' cos^2 + gamma' sin^2
/// = 1/2 - 1/2 = 0.
pub fn great_circle(t_domain: (f64, f64)) -> ContactCurve {
    tilted_circle(std::f64::consts::FRAC_PI_4, t_domain)
}

/// Tilted circle family: mu = m constant, beta = t, gamma = -t cot^2(m).
/// Contact identity: cos^2(m) + (-cot^2 m) sin^2(m) = 0.
pub fn tilted_circle(m: f64, t_domain: (f64, f64)) -> ContactCurve {
    let cot2 = 1.0 / (m.tan() * m.tan());
    ContactCurve::new_unchecked(
        AngleFn::constant(m),
        AngleFn::linear(0.0, -cot2),
        AngleFn::linear(0.0, 1.0),
        t_domain,
    )
}

/// Build a curve from its JSON spec.  Presets: "great-circle",
/// "tilted-circle" (params: {"m": ...}); tables get cubic-spline mu and
/// gamma and a beta from the contact ODE.
pub fn curve_from_spec(spec: &CurveSpec, t_domain: (f64, f64)) -> Result<ContactCurve> {
    match (&spec.preset, &spec.table) {
        (Some(name), None) => match name.as_str() {
            "great-circle" => Ok(great_circle(t_domain)),
            "tilted-circle" => {
                let m = spec
                    .params
                    .as_ref()
                    .and_then(|p| p.get("m"))
                    .and_then(|v| v.as_f64())
                    .ok_or_else(|| Error::Config {
                        path: "curve.params.m".into(),
                        reason: "tilted-circle needs a numeric parameter m".into(),
                    })?;
                Ok(tilted_circle(m, t_domain))
            }
            other => Err(Error::Config {
                path: "curve.preset".into(),
                reason: format!("unknown preset '{other}'"),
            }),
        },
        (None, Some(table)) => {
            let mu = AngleFn::from_spline(CubicSpline::natural(table.t.clone(), table.mu.clone())?);
            let gamma =
                AngleFn::from_spline(CubicSpline::natural(table.t.clone(), table.gamma.clone())?);
            let lo = table.t[0];
            let hi = *table.t.last().unwrap();
            let domain = (lo.max(t_domain.0), hi.min(t_domain.1));
            if !(domain.1 > domain.0) {
                return Err(Error::Config {
                    path: "curve.table.t".into(),
                    reason: "table does not cover the requested parameter range".into(),
                });
            }
            solve_contact_beta(mu, gamma, table.beta0, domain, 512, DEFAULT_COS_MU_FLOOR)
        }
        _ => Err(Error::Config {
            path: "curve".into(),
            reason: "specify exactly one of 'preset' or 'table'".into(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::real_form;

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn lift_great_circle_at_zero() {
        let c = great_circle((-PI, PI));
        let n = c.lift(0.0).unwrap();
        let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
        assert!((n.coord(0) - Complex64::ONE).norm() < 1e-15);
        assert!((n.coord(1) - Complex64::new(inv_sqrt2, 0.0)).norm() < 1e-15);
        assert!((n.coord(2) - Complex64::new(inv_sqrt2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn lift_is_null() {
        let c = tilted_circle(PI / 3.0, (-2.0, 2.0));
        for &t in &[-1.7, 0.0, 0.3, 1.9] {
            let n = c.lift(t).unwrap();
            assert!(real_form(&n, &n).abs() < 1e-12);
        }
    }

    #[test]
    fn lift_degenerate_point_curve() {
        let c = ContactCurve::new_unchecked(
            AngleFn::constant(0.0),
            AngleFn::constant(0.0),
            AngleFn::constant(0.0),
            (0.0, 1.0),
        );
        let n = c.lift(0.5).unwrap();
        assert_eq!(n.coord(1), Complex64::ONE);
        assert_eq!(n.coord(2), Complex64::ZERO);
    }

    #[test]
    fn lift_out_of_domain() {
        let c = great_circle((0.0, 1.0));
        assert!(matches!(c.lift(2.0), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn solve_beta_great_circle_closed_form() {
        // mu = pi/4, gamma = -t: beta' = -(-1)*1 = 1, so beta(t) = t.
        let curve = solve_contact_beta(
            AngleFn::constant(PI / 4.0),
            AngleFn::linear(0.0, -1.0),
            0.0,
            (0.0, 2.0),
            64,
            1e-3,
        )
        .unwrap();
        for &t in &[0.0, 0.37, 1.5, 2.0] {
            let n = curve.lift(t).unwrap();
            let expected = Complex64::from_polar(1.0, t) * (PI / 4.0).cos();
            assert!((n.coord(1) - expected).norm() < 1e-10, "beta at {t}");
        }
    }

    #[test]
    fn solve_beta_constant_gamma() {
        let curve = solve_contact_beta(
            AngleFn::constant(0.3),
            AngleFn::constant(5.0),
            1.25,
            (0.0, 1.0),
            32,
            1e-3,
        )
        .unwrap();
        let n = curve.lift(0.77).unwrap();
        let expected = Complex64::from_polar(1.0, 1.25) * 0.3_f64.cos();
        assert!((n.coord(1) - expected).norm() < 1e-12);
    }

    #[test]
    fn solve_beta_tilted_pi_3() {
        // mu = pi/3, gamma = -t/3: tan^2 = 3, beta' = 1, beta = t.
        let curve = solve_contact_beta(
            AngleFn::constant(PI / 3.0),
            AngleFn::linear(0.0, -1.0 / 3.0),
            0.0,
            (0.0, 1.0),
            32,
            1e-3,
        )
        .unwrap();
        let n = curve.lift(0.9).unwrap();
        let expected = Complex64::from_polar(1.0, 0.9) * (PI / 3.0).cos();
        assert!((n.coord(1) - expected).norm() < 1e-10);
    }

    #[test]
    fn solve_beta_singular_mu() {
        let res = solve_contact_beta(
            AngleFn::linear(0.0, 1.0), // mu crosses pi/2
            AngleFn::linear(0.0, -1.0),
            0.0,
            (0.0, 3.0),
            64,
            1e-3,
        );
        assert!(matches!(res, Err(Error::SingularOde { .. })));
    }

    #[test]
    fn contact_defect_on_solved_curve_vanishes() {
        let curve = solve_contact_beta(
            AngleFn::new(|t| PI / 4.0 + 0.2 * t.sin(), |t| 0.2 * t.cos()),
            AngleFn::linear(0.0, -1.0),
            0.0,
            (0.0, 2.0),
            256,
            1e-3,
        )
        .unwrap();
        let patch = curve.as_patch();
        for &t in &[0.1, 0.9, 1.8] {
            assert!(contact_defect(&patch, &[t], 0).abs() < 1e-8, "at {t}");
        }
    }

    #[test]
    fn contact_defect_on_non_contact_curve() {
        // beta = gamma = t with mu = pi/4: defect = 1/2 + 1/2 = 1.
        let c = ContactCurve::new_unchecked(
            AngleFn::constant(PI / 4.0),
            AngleFn::linear(0.0, 1.0),
            AngleFn::linear(0.0, 1.0),
            (-1.0, 1.0),
        );
        let patch = c.as_patch();
        for &t in &[-0.5, 0.0, 0.8] {
            assert!((contact_defect(&patch, &[t], 0) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn contact_defect_constant_patch_zero() {
        let c = ContactCurve::new_unchecked(
            AngleFn::constant(0.4),
            AngleFn::constant(0.2),
            AngleFn::constant(-0.1),
            (0.0, 1.0),
        );
        let patch = c.as_patch();
        assert_eq!(contact_defect(&patch, &[0.5], 0), 0.0);
    }

    #[test]
    fn defect_matches_fd_oracle() {
        let c = tilted_circle(PI / 3.0, (-2.0, 2.0));
        let patch = c.as_patch();
        for &t in &[-1.0, 0.2, 1.4] {
            let a = contact_defect(&patch, &[t], 0);
            let b = contact_defect_fd(&patch, &[t], 0, 1e-5);
            assert!((a - b).abs() < 1e-6, "at {t}: {a} vs {b}");
        }
    }

    #[test]
    fn curve_constructor_rejects_non_contact() {
        let res = ContactCurve::new(
            AngleFn::constant(PI / 4.0),
            AngleFn::linear(0.0, 1.0),
            AngleFn::linear(0.0, 1.0),
            (0.0, 1.0),
        );
        assert!(matches!(res, Err(Error::ContactViolation { .. })));
    }

    #[test]
    fn curve_spec_roundtrip() {
        let spec: CurveSpec =
            serde_json::from_str(r#"{"preset": "tilted-circle", "params": {"m": 1.0}}"#).unwrap();
        let c = curve_from_spec(&spec, (0.0, 1.0)).unwrap();
        assert!(c.contact_identity(0.5).abs() < 1e-12);

        let spec: CurveSpec = serde_json::from_str(
            r#"{"table": {"t": [0.0, 0.5, 1.0, 1.5, 2.0],
                           "mu": [0.7, 0.75, 0.8, 0.75, 0.7],
                           "gamma": [0.0, -0.4, -0.8, -1.2, -1.6],
                           "beta0": 0.0}}"#,
        )
        .unwrap();
        let c = curve_from_spec(&spec, (0.0, 2.0)).unwrap();
        assert!(c.contact_identity(1.3).abs() < 1e-9);
    }
}
