//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("non-finite coordinate at index {index}")]
    NonFinite { index: usize },

    #[error("chart domain error: {reason}")]
    ChartDomain { reason: String },

    #[error("parameter t = {t} outside curve domain [{lo}, {hi}]")]
    OutOfDomain { t: f64, lo: f64, hi: f64 },

    #[error("singular contact ODE at t = {t}: |cos mu| = {cos_mu:.3e} below delta = {delta:.3e}")]
    SingularOde { t: f64, cos_mu: f64, delta: f64 },

    #[error("contact identity violated at t = {t}: defect = {defect:.3e}")]
    ContactViolation { t: f64, defect: f64 },

    #[error("branch obstruction: zeta vanishes near grid node ({i}, {j}), |zeta| = {zeta_abs:.3e}")]
    BranchObstruction { i: usize, j: usize, zeta_abs: f64 },

    #[error("branch sign jump on grid edge ({i0}, {j0}) -- ({i1}, {j1})")]
    BranchSignJump { i0: usize, j0: usize, i1: usize, j1: usize },

    #[error("grid node ({i}, {j}) unreachable from branch base")]
    UnreachableNode { i: usize, j: usize },

    #[error("zeta vanishes at (s, t) = ({s}, {t})")]
    ZetaSingular { s: f64, t: f64 },

    #[error("degenerate tangent frame at (s, t, u) = ({s}, {t}, {u}): {reason}")]
    DegenerateFrame { s: f64, t: f64, u: f64, reason: String },

    #[error("geometry violation at (s, t, u) = ({s}, {t}, {u}): {reason}")]
    GeometryViolation { s: f64, t: f64, u: f64, reason: String },

    #[error("regime error: |alpha| = {alpha_abs} must be < 2/r = {bound}")]
    Regime { alpha_abs: f64, bound: f64 },

    #[error("config error at {path}: {reason}")]
    Config { path: String, reason: String },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
