//! The d'Alembert construction: from a pair of contact curves and the
//! parameters (r, phi), evaluate the canonical lift
//!
//!   z(s, t, u) = -i r ( lambda conj(tau) n1(s) - (tau / lambda) n2(t) ),
//!   lambda = e^u,
//!
//! where zeta = <n1, n2>_C, tau^2 = (1 - i tan phi) / (2 zeta), and the
//! branch of tau is continued over an (s, t) grid.  Every z lands on the
//! quadric <z, z> = -r^2 and projects to a Hopf hypersurface in the ball.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hermitian::{herm_form, quadric_residual, to_ball_chart, AmbientVector, HopfParams};
use crate::legendrian::ContactCurve;

/// Nodes with |zeta| at or below this are masked out of the tau field.
pub const DEFAULT_ZETA_FLOOR: f64 = 1e-9;

/// Relative singular-value threshold for the numeric rank.
pub const RANK_RTOL: f64 = 1e-8;

/// zeta = <n1, n2>_C for two null lifts.
pub fn zeta(n1: &AmbientVector, n2: &AmbientVector) -> Result<Complex64> {
    herm_form(n1, n2)
}

/// The explicit n = 2 formula
/// zeta(s,t) = -1 + e^{i(b2-b1)} cos mu1 cos mu2 + e^{i(g2-g1)} sin mu1 sin mu2,
/// evaluated from the curves' angle functions.  Cross-implementation oracle
/// for `zeta` on lifted curves.
pub fn zeta_explicit_n2(c1: &ContactCurve, c2: &ContactCurve, s: f64, t: f64) -> Complex64 {
    let n1 = c1.lift_unchecked(s);
    let n2 = c2.lift_unchecked(t);
    // angles enter only through the lifted coordinates; read them back off
    // the lifts so table-driven curves use the same angle data
    let w11 = n1.coord(1);
    let w12 = n1.coord(2);
    let w21 = n2.coord(1);
    let w22 = n2.coord(2);
    -Complex64::ONE + w11.conj() * w21 + w12.conj() * w22
}

/// Sample lattice in (s, t, u).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridSpec {
    pub s_range: (f64, f64),
    pub t_range: (f64, f64),
    pub u_range: (f64, f64),
    pub ns: usize,
    pub nt: usize,
    pub nu: usize,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        let axes = [
            ("grid.counts.s", self.ns, self.s_range),
            ("grid.counts.t", self.nt, self.t_range),
            ("grid.counts.u", self.nu, self.u_range),
        ];
        for (path, n, (lo, hi)) in axes {
            if n < 2 {
                return Err(Error::Config {
                    path: path.into(),
                    reason: format!("need at least 2 samples per axis, got {n}"),
                });
            }
            if !(hi > lo) {
                return Err(Error::Config {
                    path: path.into(),
                    reason: format!("empty range [{lo}, {hi}]"),
                });
            }
        }
        Ok(())
    }

    pub fn s_at(&self, i: usize) -> f64 {
        lerp(self.s_range, i, self.ns)
    }

    pub fn t_at(&self, j: usize) -> f64 {
        lerp(self.t_range, j, self.nt)
    }

    pub fn u_at(&self, k: usize) -> f64 {
        lerp(self.u_range, k, self.nu)
    }
}

fn lerp((lo, hi): (f64, f64), i: usize, n: usize) -> f64 {
    lo + (hi - lo) * i as f64 / (n - 1) as f64
}

/// Principal square root with arg in (-pi, pi]: a -0.0 imaginary part (an
/// artifact of complex division between reals) would otherwise push negative
/// real arguments onto the -i branch.
pub fn principal_sqrt(z: Complex64) -> Complex64 {
    let z = if z.im == 0.0 {
        Complex64::new(z.re, 0.0)
    } else {
        z
    };
    z.sqrt()
}

/// Branch-continued tau over the (s, t) grid.  Nodes where zeta crosses
/// zero are masked; the retained nodes split into connected components,
/// each continued from its own base node (principal root there).
#[derive(Debug, Clone)]
pub struct TauField {
    ns: usize,
    nt: usize,
    values: Vec<Option<Complex64>>,
    component: Vec<Option<usize>>,
    n_components: usize,
}

impl TauField {
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.nt + j
    }

    pub fn value(&self, i: usize, j: usize) -> Option<Complex64> {
        self.values[self.idx(i, j)]
    }

    pub fn component(&self, i: usize, j: usize) -> Option<usize> {
        self.component[self.idx(i, j)]
    }

    pub fn n_components(&self) -> usize {
        self.n_components
    }

    /// Grid dimensions (ns, nt).
    pub fn dims(&self) -> (usize, usize) {
        (self.ns, self.nt)
    }

    pub fn retained_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }
}

/// Construction options: where the branch continuation starts and which
/// near-singular nodes get masked.
#[derive(Debug, Clone, Copy)]
pub struct PatchOptions {
    pub base_node: (usize, usize),
    pub zeta_floor: f64,
}

impl Default for PatchOptions {
    fn default() -> Self {
        Self {
            base_node: (0, 0),
            zeta_floor: DEFAULT_ZETA_FLOOR,
        }
    }
}

/// Per-sample record of the construction.
#[derive(Debug, Clone, Serialize)]
pub struct SurfaceSample {
    pub s: f64,
    pub t: f64,
    pub u: f64,
    #[serde(skip)]
    pub z: AmbientVector,
    pub w: Vec<(f64, f64)>,
    #[serde(skip)]
    pub zeta: Complex64,
    #[serde(skip)]
    pub tau: Complex64,
    pub genericity: f64,
    pub quadric_residual: f64,
    pub jacobian_rank: usize,
}

/// The evaluator for (s, t, u) -> z in Q with branch state for tau.
#[derive(Debug)]
pub struct DalembertPatch {
    curve1: ContactCurve,
    curve2: ContactCurve,
    params: HopfParams,
    grid: GridSpec,
    tau_field: TauField,
    options: PatchOptions,
    tau_constant: Complex64, // (1 - i tan phi) / 2
}

impl DalembertPatch {
    pub fn new(
        curve1: ContactCurve,
        curve2: ContactCurve,
        params: HopfParams,
        grid: GridSpec,
        options: PatchOptions,
    ) -> Result<Self> {
        grid.validate()?;
        let tau_constant = Complex64::new(0.5, -0.5 * params.phi().tan());
        let mut patch = Self {
            curve1,
            curve2,
            params,
            grid,
            tau_field: TauField {
                ns: grid.ns,
                nt: grid.nt,
                values: vec![],
                component: vec![],
                n_components: 0,
            },
            options,
            tau_constant,
        };
        patch.tau_field = patch.build_tau_field()?;
        Ok(patch)
    }

    pub fn params(&self) -> &HopfParams {
        &self.params
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn curves(&self) -> (&ContactCurve, &ContactCurve) {
        (&self.curve1, &self.curve2)
    }

    pub fn tau_field(&self) -> &TauField {
        &self.tau_field
    }

    pub fn zeta_at(&self, s: f64, t: f64) -> Complex64 {
        let n1 = self.curve1.lift_unchecked(s);
        let n2 = self.curve2.lift_unchecked(t);
        crate::hermitian::herm_form_unchecked(&n1, &n2)
    }

    /// Analytic zeta derivatives through the curve derivatives:
    /// zeta_s = <n1', n2>, zeta_t = <n1, n2'>, zeta_st = <n1', n2'>.
    pub fn zeta_derivs(&self, s: f64, t: f64) -> (Complex64, Complex64, Complex64) {
        let n1 = self.curve1.lift_unchecked(s);
        let dn1 = self.curve1.lift_deriv_unchecked(s);
        let n2 = self.curve2.lift_unchecked(t);
        let dn2 = self.curve2.lift_deriv_unchecked(t);
        (
            crate::hermitian::herm_form_unchecked(&dn1, &n2),
            crate::hermitian::herm_form_unchecked(&n1, &dn2),
            crate::hermitian::herm_form_unchecked(&dn1, &dn2),
        )
    }

    /// Centered finite-difference cross-check for the zeta derivatives.
    pub fn zeta_derivs_fd(&self, s: f64, t: f64, h: f64) -> (Complex64, Complex64, Complex64) {
        let f = |s, t| self.zeta_at(s, t);
        let zs = (f(s + h, t) - f(s - h, t)) / (2.0 * h);
        let zt = (f(s, t + h) - f(s, t - h)) / (2.0 * h);
        let zst = (f(s + h, t + h) - f(s + h, t - h) - f(s - h, t + h) + f(s - h, t - h))
            / (4.0 * h * h);
        (zs, zt, zst)
    }

    fn build_tau_field(&self) -> Result<TauField> {
        let (ns, nt) = (self.grid.ns, self.grid.nt);
        let floor = self.options.zeta_floor;
        let mut zetas = vec![Complex64::ZERO; ns * nt];
        let mut retained = vec![false; ns * nt];
        for i in 0..ns {
            for j in 0..nt {
                let z = self.zeta_at(self.grid.s_at(i), self.grid.t_at(j));
                zetas[i * nt + j] = z;
                retained[i * nt + j] = z.norm() > floor;
            }
        }
        let (bi, bj) = self.options.base_node;
        if bi >= ns || bj >= nt {
            return Err(Error::Config {
                path: "branch.base_node".into(),
                reason: format!("base node ({bi}, {bj}) outside {ns} x {nt} grid"),
            });
        }
        if !retained[bi * nt + bj] {
            return Err(Error::BranchObstruction {
                i: bi,
                j: bj,
                zeta_abs: zetas[bi * nt + bj].norm(),
            });
        }

        let mut values: Vec<Option<Complex64>> = vec![None; ns * nt];
        let mut component: Vec<Option<usize>> = vec![None; ns * nt];
        let mut n_components = 0;

        // flood fill from the configured base first, then sweep row-major
        // for any remaining components
        let mut seeds: Vec<(usize, usize)> = vec![(bi, bj)];
        for i in 0..ns {
            for j in 0..nt {
                seeds.push((i, j));
            }
        }
        for (si, sj) in seeds {
            let sidx = si * nt + sj;
            if !retained[sidx] || values[sidx].is_some() {
                continue;
            }
            let comp = n_components;
            n_components += 1;
            values[sidx] = Some(principal_sqrt(self.tau_constant / zetas[sidx]));
            component[sidx] = Some(comp);
            let mut queue = std::collections::VecDeque::new();
            queue.push_back((si, sj));
            while let Some((i, j)) = queue.pop_front() {
                let here = values[i * nt + j].unwrap();
                let mut neighbors = Vec::with_capacity(4);
                if i > 0 {
                    neighbors.push((i - 1, j));
                }
                if i + 1 < ns {
                    neighbors.push((i + 1, j));
                }
                if j > 0 {
                    neighbors.push((i, j - 1));
                }
                if j + 1 < nt {
                    neighbors.push((i, j + 1));
                }
                for (ni, nj) in neighbors {
                    let nidx = ni * nt + nj;
                    if !retained[nidx] || values[nidx].is_some() {
                        continue;
                    }
                    let mut tau = principal_sqrt(self.tau_constant / zetas[nidx]);
                    // continuity: |tau - prev| < |tau + prev|
                    if (tau - here).norm() >= (tau + here).norm() {
                        tau = -tau;
                    }
                    values[nidx] = Some(tau);
                    component[nidx] = Some(comp);
                    queue.push_back((ni, nj));
                }
            }
        }

        let field = TauField {
            ns,
            nt,
            values,
            component,
            n_components,
        };
        // global consistency: every retained edge must agree in sign
        for i in 0..ns {
            for j in 0..nt {
                let Some(a) = field.value(i, j) else { continue };
                for (ni, nj) in [(i + 1, j), (i, j + 1)] {
                    if ni >= ns || nj >= nt {
                        continue;
                    }
                    if field.component(ni, nj) != field.component(i, j) {
                        continue;
                    }
                    if let Some(b) = field.value(ni, nj) {
                        if (a * b.conj()).re <= 0.0 {
                            return Err(Error::BranchSignJump {
                                i0: i,
                                j0: j,
                                i1: ni,
                                j1: nj,
                            });
                        }
                    }
                }
            }
        }
        Ok(field)
    }

    fn nearest_node(&self, s: f64, t: f64) -> (usize, usize) {
        let (s0, s1) = self.grid.s_range;
        let (t0, t1) = self.grid.t_range;
        let fi = (s - s0) / (s1 - s0) * (self.grid.ns - 1) as f64;
        let fj = (t - t0) / (t1 - t0) * (self.grid.nt - 1) as f64;
        let i = fi.round().clamp(0.0, (self.grid.ns - 1) as f64) as usize;
        let j = fj.round().clamp(0.0, (self.grid.nt - 1) as f64) as usize;
        (i, j)
    }

    /// Branch-continued tau at (s, t): principal root of
    /// (1 - i tan phi) / (2 zeta), sign aligned with the nearest retained
    /// grid node.
    pub fn tau_at(&self, s: f64, t: f64) -> Result<Complex64> {
        let z = self.zeta_at(s, t);
        if z.norm() <= self.options.zeta_floor {
            return Err(Error::ZetaSingular { s, t });
        }
        let (i, j) = self.nearest_node(s, t);
        let anchor = self
            .tau_field
            .value(i, j)
            .ok_or(Error::UnreachableNode { i, j })?;
        let mut tau = principal_sqrt(self.tau_constant / z);
        if (tau - anchor).norm() >= (tau + anchor).norm() {
            tau = -tau;
        }
        Ok(tau)
    }

    /// The unit timelike frame vector e0 = conj(lambda tau) n1 - (tau/lambda) n2.
    pub fn ehat0(&self, s: f64, t: f64, lambda: f64) -> Result<AmbientVector> {
        let tau = self.tau_at(s, t)?;
        let n1 = self.curve1.lift(s)?;
        let n2 = self.curve2.lift(t)?;
        let a = Complex64::new(lambda, 0.0) * tau.conj();
        let b = -tau / lambda;
        Ok(n1.linear_combination(a, &n2, b))
    }

    /// z(s, t, u) = -i r e0 with lambda = e^u; lands on the quadric.
    pub fn surface_z(&self, s: f64, t: f64, u: f64) -> Result<AmbientVector> {
        let e0 = self.ehat0(s, t, u.exp())?;
        Ok(e0.scale(Complex64::new(0.0, -self.params.r())))
    }

    /// Analytic partials (dz/ds, dz/dt, dz/du), with
    /// tau_s = -tau zeta_s / (2 zeta) and likewise for t.
    pub fn surface_derivs(&self, s: f64, t: f64, u: f64) -> Result<[AmbientVector; 3]> {
        let lambda = u.exp();
        let tau = self.tau_at(s, t)?;
        let z = self.zeta_at(s, t);
        let (zs, zt, _) = self.zeta_derivs(s, t);
        let tau_s = -0.5 * tau * zs / z;
        let tau_t = -0.5 * tau * zt / z;
        let n1 = self.curve1.lift_unchecked(s);
        let dn1 = self.curve1.lift_deriv_unchecked(s);
        let n2 = self.curve2.lift_unchecked(t);
        let dn2 = self.curve2.lift_deriv_unchecked(t);
        let mir = Complex64::new(0.0, -self.params.r());
        let lam = Complex64::new(lambda, 0.0);

        // d/du: lambda conj(tau) n1 + (tau/lambda) n2
        let zu = n1
            .linear_combination(lam * tau.conj(), &n2, tau / lambda)
            .scale(mir);
        // d/ds: lambda conj(tau_s) n1 + lambda conj(tau) n1' - (tau_s/lambda) n2
        let zs_vec = n1
            .scale(lam * tau_s.conj())
            .add(&dn1.scale(lam * tau.conj()))
            .sub(&n2.scale(tau_s / lambda))
            .scale(mir);
        // d/dt: lambda conj(tau_t) n1 - (tau_t/lambda) n2 - (tau/lambda) n2'
        let zt_vec = n1
            .scale(lam * tau_t.conj())
            .sub(&n2.scale(tau_t / lambda))
            .sub(&dn2.scale(tau / lambda))
            .scale(mir);
        Ok([zs_vec, zt_vec, zu])
    }

    /// Full per-sample record with diagnostics.
    pub fn surface_point(&self, s: f64, t: f64, u: f64) -> Result<SurfaceSample> {
        let z = self.surface_z(s, t, u)?;
        let w = to_ball_chart(&z)?;
        let res = quadric_residual(&z, &self.params);
        let gen = self.genericity(s, t)?;
        let rank = self.jacobian_rank(s, t, u)?;
        Ok(SurfaceSample {
            s,
            t,
            u,
            w: w.iter().map(|c| (c.re, c.im)).collect(),
            zeta: self.zeta_at(s, t),
            tau: self.tau_at(s, t)?,
            z,
            genericity: gen,
            quadric_residual: res,
            jacobian_rank: rank,
        })
    }

    /// Ideal-boundary limit along the W-curve: the sphere chart of n2 for
    /// lambda -> 0 and of n1 for lambda -> infinity.
    pub fn boundary_limit(&self, s: f64, t: f64, end: BoundaryEnd) -> Result<Vec<Complex64>> {
        // tau must exist for the limit statement to apply
        self.tau_at(s, t)?;
        match end {
            BoundaryEnd::LambdaZero => crate::hermitian::to_sphere_chart(&self.curve2.lift(t)?),
            BoundaryEnd::LambdaInfinity => crate::hermitian::to_sphere_chart(&self.curve1.lift(s)?),
        }
    }

    /// Im( zeta_st - sec^2(phi)/zeta * zeta_s zeta_t ): nonzero is a
    /// sufficient condition for the parametrization to have rank 3.
    pub fn genericity(&self, s: f64, t: f64) -> Result<f64> {
        let z = self.zeta_at(s, t);
        if z.norm() <= self.options.zeta_floor {
            return Err(Error::ZetaSingular { s, t });
        }
        let (zs, zt, zst) = self.zeta_derivs(s, t);
        let sec = 1.0 / self.params.phi().cos();
        Ok((zst - (sec * sec) / z * zs * zt).im)
    }

    /// Finite-difference variant of `genericity` (oracle mode).
    pub fn genericity_fd(&self, s: f64, t: f64, h: f64) -> Result<f64> {
        let z = self.zeta_at(s, t);
        if z.norm() <= self.options.zeta_floor {
            return Err(Error::ZetaSingular { s, t });
        }
        let (zs, zt, zst) = self.zeta_derivs_fd(s, t, h);
        let sec = 1.0 / self.params.phi().cos();
        Ok((zst - (sec * sec) / z * zs * zt).im)
    }

    /// Numeric rank of the real Jacobian of (s, t, u) -> w in C^n = R^{2n},
    /// pushed through the chart differential dw_i = (z0 dz_i - z_i dz0)/z0^2.
    pub fn jacobian_rank(&self, s: f64, t: f64, u: f64) -> Result<usize> {
        let z = self.surface_z(s, t, u)?;
        let derivs = self.surface_derivs(s, t, u)?;
        let n = z.dim() - 1;
        let z0 = z.coord(0);
        let mut mat = DMatrix::<f64>::zeros(2 * n, 3);
        for (col, dz) in derivs.iter().enumerate() {
            for i in 0..n {
                let dw = (z0 * dz.coord(i + 1) - z.coord(i + 1) * dz.coord(0)) / (z0 * z0);
                mat[(2 * i, col)] = dw.re;
                mat[(2 * i + 1, col)] = dw.im;
            }
        }
        let svd = mat.svd(false, false);
        let smax = svd.singular_values.max();
        Ok(svd
            .singular_values
            .iter()
            .filter(|&&sv| sv > RANK_RTOL * smax)
            .count())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryEnd {
    LambdaZero,
    LambdaInfinity,
}
