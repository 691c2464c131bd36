//! Independent numerical verification that the constructed surface is a
//! Hopf hypersurface.
//!
//! Everything is computed through the flat ambient derivative on C^{n+1}
//! and the semi-Riemannian submersion Q -> CH^n: tangent frames are the
//! horizontal parts of the coordinate partials, the normal is the unique
//! horizontal direction orthogonal to the frame, and the shape operator is
//! assembled from centered finite differences of the normal field.  No
//! Christoffel symbols and no Bergman-metric chart.
//!
//! One wrinkle of differentiating along the parametrization: the coordinate
//! velocity dz/dx_j is tangent to Q but not horizontal; its fiber component
//! b_j i z makes the lifted normal rotate by b_j i xi.  That term is
//! subtracted before projecting, otherwise the operator fails to be
//! self-adjoint and the structure eigenvalue comes out wrong.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::Serialize;

use crate::dalembert::DalembertPatch;
use crate::error::{Error, Result};
use crate::hermitian::{quadric_residual, real_form, AmbientVector};

/// Coefficient floor for the deterministic normal-sign convention.
const SIGN_COEFF_FLOOR: f64 = 1e-8;

/// Tangency tolerance for the structure vector; worse means a bug or a
/// degenerate sample.
const STRUCTURE_TANGENCY_TOL: f64 = 1e-6;

/// Projection of v onto the horizontal space at z on Q: kills the radial
/// direction z and the fiber direction i z.
pub fn horizontal_project(z: &AmbientVector, v: &AmbientVector, r: f64) -> AmbientVector {
    let r2 = r * r;
    let iz = z.times_i();
    let a = real_form(v, z) / r2;
    let b = real_form(v, &iz) / r2;
    v.add(&z.scale(Complex64::new(a, 0.0)))
        .add(&iz.scale(Complex64::new(b, 0.0)))
}

/// Horizontal tangent frame at a sample: the horizontal parts of the three
/// coordinate partials and their Gram matrix under the real form.
#[derive(Debug, Clone)]
pub struct TangentFrame {
    pub z: AmbientVector,
    pub e: [AmbientVector; 3],
    pub gram: Matrix3<f64>,
    r: f64,
}

impl TangentFrame {
    pub fn r(&self) -> f64 {
        self.r
    }
}

/// Build the frame at (s, t, u); fails if the horizontal Gram matrix is not
/// positive definite (rank-deficient sample).
pub fn tangent_frame(patch: &DalembertPatch, s: f64, t: f64, u: f64) -> Result<TangentFrame> {
    let r = patch.params().r();
    let z = patch.surface_z(s, t, u)?;
    let derivs = patch.surface_derivs(s, t, u)?;
    let e = [
        horizontal_project(&z, &derivs[0], r),
        horizontal_project(&z, &derivs[1], r),
        horizontal_project(&z, &derivs[2], r),
    ];
    let mut gram = Matrix3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            gram[(i, j)] = real_form(&e[i], &e[j]);
        }
    }
    if gram.cholesky().is_none() {
        return Err(Error::DegenerateFrame {
            s,
            t,
            u,
            reason: "horizontal Gram matrix not positive definite".into(),
        });
    }
    Ok(TangentFrame { z, e, gram, r })
}

/// Orthonormal basis (w.r.t. the real form) of the horizontal space at z,
/// built by Gram-Schmidt on projected coordinate directions.  Real
/// dimension 2n for z in Q subset C^{n+1}.
fn horizontal_basis(z: &AmbientVector, r: f64) -> Vec<AmbientVector> {
    let dim = z.dim();
    let target = 2 * dim - 2;
    let mut basis: Vec<AmbientVector> = Vec::with_capacity(target);
    'cand: for k in 0..2 * dim {
        let mut coords = vec![Complex64::ZERO; dim];
        coords[k / 2] = if k % 2 == 0 {
            Complex64::ONE
        } else {
            Complex64::I
        };
        let mut v = horizontal_project(z, &AmbientVector::from_raw(coords), r);
        for b in &basis {
            let c = real_form(b, &v);
            v = v.sub(&b.scale(Complex64::new(c, 0.0)));
        }
        let nn = real_form(&v, &v);
        if nn > 1e-10 {
            basis.push(v.scale(Complex64::new(1.0 / nn.sqrt(), 0.0)));
        }
        if basis.len() == target {
            break 'cand;
        }
    }
    basis
}

/// The unit normal: the horizontal direction orthogonal to all frame
/// vectors, sign fixed so the first non-negligible coefficient in the
/// horizontal basis expansion is positive.
pub fn unit_normal(frame: &TangentFrame) -> Result<AmbientVector> {
    let basis = horizontal_basis(&frame.z, frame.r);
    if basis.len() != 4 {
        return Err(Error::DegenerateFrame {
            s: f64::NAN,
            t: f64::NAN,
            u: f64::NAN,
            reason: format!("horizontal space has dimension {}", basis.len()),
        });
    }
    // rows: frame vectors in basis coordinates
    let mut rows = [[0.0; 4]; 3];
    for (i, ek) in frame.e.iter().enumerate() {
        for (j, bj) in basis.iter().enumerate() {
            rows[i][j] = real_form(ek, bj);
        }
    }
    // generalized cross product in R^4: c_j = (-1)^j det(minor_j)
    let mut c = [0.0; 4];
    for j in 0..4 {
        let cols: Vec<usize> = (0..4).filter(|&k| k != j).collect();
        let m = Matrix3::from_fn(|a, b| rows[a][cols[b]]);
        c[j] = if j % 2 == 0 {
            m.determinant()
        } else {
            -m.determinant()
        };
    }
    let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    let scale = frame
        .gram
        .diagonal()
        .iter()
        .fold(1.0_f64, |acc, &g| acc * g.max(1e-300))
        .sqrt();
    if norm <= 1e-12 * scale.max(1e-12) {
        return Err(Error::DegenerateFrame {
            s: f64::NAN,
            t: f64::NAN,
            u: f64::NAN,
            reason: "frame does not determine a normal direction".into(),
        });
    }
    for x in &mut c {
        *x /= norm;
    }
    // deterministic orientation
    for &x in &c {
        if x.abs() > SIGN_COEFF_FLOOR {
            if x < 0.0 {
                for y in &mut c {
                    *y = -*y;
                }
            }
            break;
        }
    }
    let mut xi = AmbientVector::zero(frame.z.dim());
    for (x, b) in c.iter().zip(&basis) {
        xi = xi.add(&b.scale(Complex64::new(*x, 0.0)));
    }
    Ok(xi)
}

/// The structure vector W = -i xi; checks that W lies in the tangent span.
pub fn structure_vector(frame: &TangentFrame, xi: &AmbientVector) -> Result<AmbientVector> {
    let w = xi.times_i().scale(Complex64::new(-1.0, 0.0));
    let coords = expand_in_frame(frame, &w)?;
    let mut recon = AmbientVector::zero(w.dim());
    for (c, ek) in coords.iter().zip(&frame.e) {
        recon = recon.add(&ek.scale(Complex64::new(*c, 0.0)));
    }
    let resid_vec = w.sub(&recon);
    let resid = real_form(&resid_vec, &resid_vec).max(0.0).sqrt();
    if resid > STRUCTURE_TANGENCY_TOL {
        return Err(Error::GeometryViolation {
            s: f64::NAN,
            t: f64::NAN,
            u: f64::NAN,
            reason: format!("structure vector not tangent: residual {resid:.3e}"),
        });
    }
    Ok(w)
}

/// Coordinates of a horizontal vector in the frame basis (Gram solve).
pub fn expand_in_frame(frame: &TangentFrame, v: &AmbientVector) -> Result<Vector3<f64>> {
    let rhs = Vector3::from_fn(|k, _| real_form(&frame.e[k], v));
    frame
        .gram
        .cholesky()
        .map(|ch| ch.solve(&rhs))
        .ok_or_else(|| Error::DegenerateFrame {
            s: f64::NAN,
            t: f64::NAN,
            u: f64::NAN,
            reason: "Gram solve failed".into(),
        })
}

/// Shape operator at a sample, expressed in the coordinate frame basis,
/// together with the pieces needed for the Hopf diagnostics.
#[derive(Debug, Clone)]
pub struct ShapeData {
    pub frame: TangentFrame,
    pub xi: AmbientVector,
    pub w: AmbientVector,
    /// S in the frame basis: columns are S applied to the coordinate
    /// directions.
    pub matrix: Matrix3<f64>,
    /// Relative Gram-asymmetry ||G S - (G S)^T|| / ||G S||.
    pub asymmetry: f64,
}

/// Assemble the shape operator by centered finite differences of the unit
/// normal along the coordinate directions.  `fd_step` is the parameter
/// step h.
pub fn shape_operator(
    patch: &DalembertPatch,
    s: f64,
    t: f64,
    u: f64,
    fd_step: f64,
) -> Result<ShapeData> {
    let frame = tangent_frame(patch, s, t, u)?;
    let xi = unit_normal(&frame)?;
    let w = structure_vector(&frame, &xi)?;
    let derivs = patch.surface_derivs(s, t, u)?;
    let r2 = frame.r * frame.r;
    let iz = frame.z.times_i();
    let ixi = xi.times_i();
    let h = fd_step;

    let normal_at = |s: f64, t: f64, u: f64| -> Result<AmbientVector> {
        let f = tangent_frame(patch, s, t, u)?;
        let mut n = unit_normal(&f)?;
        // keep the field continuous across the stencil
        if real_form(&n, &xi) < 0.0 {
            n = n.scale(Complex64::new(-1.0, 0.0));
        }
        Ok(n)
    };

    let mut b_cols = Matrix3::zeros();
    for j in 0..3 {
        let (ds, dt, du) = match j {
            0 => (h, 0.0, 0.0),
            1 => (0.0, h, 0.0),
            _ => (0.0, 0.0, h),
        };
        let xp = normal_at(s + ds, t + dt, u + du)?;
        let xm = normal_at(s - ds, t - dt, u - du)?;
        let dxi = xp.sub(&xm).scale(Complex64::new(0.5 / h, 0.0));
        // fiber component of the coordinate velocity
        let b = -real_form(&derivs[j], &iz) / r2;
        let m = horizontal_project(&frame.z, &dxi, frame.r)
            .scale(Complex64::new(-1.0, 0.0))
            .add(&ixi.scale(Complex64::new(b, 0.0)));
        for k in 0..3 {
            b_cols[(k, j)] = real_form(&frame.e[k], &m);
        }
    }
    let chol = frame.gram.cholesky().ok_or_else(|| Error::DegenerateFrame {
        s,
        t,
        u,
        reason: "Gram solve failed".into(),
    })?;
    let matrix = chol.solve(&b_cols);
    let gs = frame.gram * matrix;
    let asym = (gs - gs.transpose()).norm() / gs.norm().max(f64::MIN_POSITIVE);
    Ok(ShapeData {
        frame,
        xi,
        w,
        matrix,
        asymmetry: asym,
    })
}

/// Hopf diagnostics at one sample.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HopfDefect {
    /// ||S W - alpha W||_g / (1 + ||S||_g) with the measured alpha.
    pub defect: f64,
    /// Rayleigh quotient g(SW, W) / g(W, W).
    pub measured_alpha: f64,
    pub asymmetry: f64,
    /// Misalignment of E_u with W, radians from {0, pi}.
    pub w_angle: f64,
}

/// Measure the structure eigen-pair at a sample.
pub fn hopf_defect(
    patch: &DalembertPatch,
    s: f64,
    t: f64,
    u: f64,
    fd_step: f64,
) -> Result<HopfDefect> {
    let data = shape_operator(patch, s, t, u, fd_step)?;
    let cw = expand_in_frame(&data.frame, &data.w)?;
    let g = data.frame.gram;
    let sw = data.matrix * cw;
    let gw = (cw.transpose() * g * cw)[(0, 0)];
    let alpha = (sw.transpose() * g * cw)[(0, 0)] / gw;
    let diff = sw - alpha * cw;
    let gnorm = |v: &Vector3<f64>| (v.transpose() * g * v)[(0, 0)].max(0.0).sqrt();
    // operator g-norm via the Cholesky congruence L^T S L^{-T}
    let l = g.cholesky().unwrap().l();
    let lt = l.transpose();
    let lt_inv = lt.try_inverse().unwrap();
    let s_orth = lt * data.matrix * lt_inv;
    let defect = gnorm(&diff) / (1.0 + s_orth.norm());
    Ok(HopfDefect {
        defect,
        measured_alpha: alpha,
        asymmetry: data.asymmetry,
        w_angle: w_alignment_angle(&data),
    })
}

/// Angle (radians) between the horizontal u-direction E_u and the structure
/// vector, folded to distance from {0, pi}.
pub fn w_alignment_angle(data: &ShapeData) -> f64 {
    let eu = &data.frame.e[2];
    let num = real_form(eu, &data.w).abs();
    let den = (real_form(eu, eu) * real_form(&data.w, &data.w)).sqrt();
    (num / den).clamp(0.0, 1.0).acos()
}

/// Signed cosine of the angle between E_u and W, for orientation checks.
pub fn w_alignment_cos(data: &ShapeData) -> f64 {
    let eu = &data.frame.e[2];
    let den = (real_form(eu, eu) * real_form(&data.w, &data.w)).sqrt();
    real_form(eu, &data.w) / den
}

/// Max W-curve misalignment over the patch's u-grid at fixed (s, t).
pub fn w_curve_check(patch: &DalembertPatch, s: f64, t: f64, fd_step: f64) -> Result<f64> {
    let grid = patch.grid();
    let mut max_angle: f64 = 0.0;
    for k in 0..grid.nu {
        let data = shape_operator(patch, s, t, grid.u_at(k), fd_step)?;
        max_angle = max_angle.max(w_alignment_angle(&data));
    }
    Ok(max_angle)
}

/// Per-sample record of a verification run.
#[derive(Debug, Clone, Serialize)]
pub struct SampleRecord {
    pub s: f64,
    pub t: f64,
    pub u: f64,
    pub quadric_residual: f64,
    pub genericity: f64,
    pub rank: usize,
    pub hopf_defect: f64,
    pub measured_alpha: f64,
    pub asymmetry: f64,
    pub w_angle: f64,
    /// Included in the Hopf acceptance statistics (genericity above the
    /// configured floor and full rank).
    pub retained: bool,
}

/// Summary statistics over the retained records; recomputable from them.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ReportSummary {
    pub n_samples: usize,
    pub n_retained: usize,
    pub n_excluded: usize,
    pub max_quadric_residual: f64,
    pub max_hopf_defect: f64,
    pub mean_hopf_defect: f64,
    pub max_alpha_deviation: f64,
    pub max_asymmetry: f64,
    pub max_w_angle: f64,
    pub mean_abs_genericity: f64,
}

/// Full verification output for one run.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub expected_alpha_abs: f64,
    pub summary: ReportSummary,
    pub no_generic_samples: bool,
    pub records: Vec<SampleRecord>,
}

impl VerificationReport {
    pub fn from_records(records: Vec<SampleRecord>, expected_alpha_abs: f64) -> Self {
        let mut summary = ReportSummary {
            n_samples: records.len(),
            ..Default::default()
        };
        let mut defect_sum = 0.0;
        let mut gen_sum = 0.0;
        for rec in &records {
            summary.max_quadric_residual = summary.max_quadric_residual.max(rec.quadric_residual.abs());
            gen_sum += rec.genericity.abs();
            if rec.retained {
                summary.n_retained += 1;
                summary.max_hopf_defect = summary.max_hopf_defect.max(rec.hopf_defect);
                defect_sum += rec.hopf_defect;
                summary.max_alpha_deviation = summary
                    .max_alpha_deviation
                    .max((rec.measured_alpha.abs() - expected_alpha_abs).abs());
                summary.max_asymmetry = summary.max_asymmetry.max(rec.asymmetry);
                summary.max_w_angle = summary.max_w_angle.max(rec.w_angle);
            }
        }
        summary.n_excluded = summary.n_samples - summary.n_retained;
        if summary.n_retained > 0 {
            summary.mean_hopf_defect = defect_sum / summary.n_retained as f64;
        }
        if summary.n_samples > 0 {
            summary.mean_abs_genericity = gen_sum / summary.n_samples as f64;
        }
        let no_generic = summary.n_retained == 0;
        Self {
            expected_alpha_abs,
            summary,
            no_generic_samples: no_generic,
            records,
        }
    }
}

/// Convenience: quadric residual of the frame base point.
pub fn frame_quadric_residual(patch: &DalembertPatch, frame: &TangentFrame) -> f64 {
    quadric_residual(&frame.z, patch.params())
}
