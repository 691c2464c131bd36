//! Hopf hypersurfaces in complex hyperbolic space by the d'Alembert method.
//!
//! The pipeline runs in three stages:
//!
//! 1. **Boundary data** ([`legendrian`]): contact curves in S^3, given by
//!    presets, sampled tables (with the missing angle recovered from the
//!    contact ODE), and their null lifts into C^{n+1} with the
//!    signature-(1, n) Hermitian form of [`hermitian`].
//! 2. **Construction** ([`dalembert`]): the explicit parametrization
//!    z(s, t, u) built from the two curves and the parameters (r, phi),
//!    including branch continuation of the square root tau over the sample
//!    grid, genericity and rank diagnostics, and ideal-boundary limits.
//! 3. **Verification** ([`verify`]): an independent numerical check that
//!    the projected surface is a Hopf hypersurface — horizontal frames and
//!    finite-difference shape operators through the quadric model, no reuse
//!    of the construction formulas.
//!
//! [`config`], [`run`], and [`export`] wire the stages into a CLI with
//! deterministic CSV / OBJ / PLY / JSON outputs.

pub mod config;
pub mod dalembert;
pub mod error;
pub mod export;
pub mod hermitian;
pub mod legendrian;
pub mod run;
pub mod spline;
pub mod verify;

pub use config::RunConfig;
pub use dalembert::{DalembertPatch, GridSpec, PatchOptions};
pub use error::{Error, Result};
pub use hermitian::{herm_form, real_form, AmbientVector, HopfParams};
pub use legendrian::{ContactCurve, CurveSpec};
pub use run::{execute, RunMode, RunOutcome};
pub use verify::{hopf_defect, shape_operator, VerificationReport};
