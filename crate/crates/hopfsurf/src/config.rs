//! Run configuration: JSON ingestion and validation.

use serde::Deserialize;

use crate::dalembert::{GridSpec, PatchOptions, DEFAULT_ZETA_FLOOR};
use crate::error::{Error, Result};
use crate::hermitian::HopfParams;
use crate::legendrian::CurveSpec;

pub const DEFAULT_FD_STEP: f64 = 1e-5;
pub const DEFAULT_TOL_HOPF: f64 = 1e-3;
pub const DEFAULT_TOL_QUADRIC: f64 = 1e-9;
pub const DEFAULT_GENERICITY_FLOOR: f64 = 1e-4;
pub const DEFAULT_SEED: u64 = 42;

/// How much the curve parameter domains extend beyond the sampling ranges,
/// so finite-difference stencils near the grid edge stay in-domain.
pub const CURVE_DOMAIN_PAD: f64 = 1.0;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    r: f64,
    #[serde(default)]
    phi: Option<f64>,
    #[serde(default)]
    alpha: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    s_range: (f64, f64),
    t_range: (f64, f64),
    u_range: (f64, f64),
    counts: (usize, usize, usize),
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    #[serde(default)]
    hopf: Option<f64>,
    #[serde(default)]
    quadric: Option<f64>,
    #[serde(default)]
    genericity_floor: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawBranch {
    #[serde(default)]
    base_node: Option<(usize, usize)>,
    #[serde(default)]
    zeta_floor: Option<f64>,
}

/// Output projection of the 4 real ball coordinates
/// (Re w1, Im w1, Re w2, Im w2) into R^3: either three axis indices or a
/// full 3x4 matrix.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Projection {
    Axes([usize; 3]),
    Matrix([[f64; 4]; 3]),
}

impl Default for Projection {
    fn default() -> Self {
        // (Re w1, Im w1, Re w2)
        Projection::Axes([0, 1, 2])
    }
}

impl Projection {
    pub fn apply(&self, coords4: &[f64; 4]) -> [f64; 3] {
        match self {
            Projection::Axes(axes) => [coords4[axes[0]], coords4[axes[1]], coords4[axes[2]]],
            Projection::Matrix(m) => {
                let mut out = [0.0; 3];
                for (row, mrow) in m.iter().enumerate() {
                    out[row] = mrow.iter().zip(coords4).map(|(a, b)| a * b).sum();
                }
                out
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if let Projection::Axes(axes) = self {
            for &a in axes {
                if a > 3 {
                    return Err(Error::Config {
                        path: "outputs.projection".into(),
                        reason: format!("axis index {a} out of range 0..=3"),
                    });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default)]
    pub mesh_path: Option<String>,
    #[serde(default)]
    pub csv_path: Option<String>,
    #[serde(default)]
    pub report_path: Option<String>,
    #[serde(default)]
    pub projection: Option<Projection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    params: RawParams,
    curve1: CurveSpec,
    curve2: CurveSpec,
    grid: RawGrid,
    #[serde(default)]
    fd_step: Option<f64>,
    #[serde(default)]
    tolerances: RawTolerances,
    #[serde(default)]
    branch: RawBranch,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    outputs: Outputs,
}

/// Validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: HopfParams,
    pub curve1: CurveSpec,
    pub curve2: CurveSpec,
    pub grid: GridSpec,
    pub patch_options: PatchOptions,
    pub fd_step: f64,
    pub tol_hopf: f64,
    pub tol_quadric: f64,
    pub genericity_floor: f64,
    pub seed: u64,
    pub outputs: Outputs,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text)?;
        let params = match (raw.params.phi, raw.params.alpha) {
            (Some(phi), None) => HopfParams::from_phi(raw.params.r, phi)?,
            (None, Some(alpha)) => HopfParams::from_alpha(raw.params.r, alpha)?,
            _ => {
                return Err(Error::Config {
                    path: "params".into(),
                    reason: "give exactly one of 'phi' or 'alpha'".into(),
                })
            }
        };
        let grid = GridSpec {
            s_range: raw.grid.s_range,
            t_range: raw.grid.t_range,
            u_range: raw.grid.u_range,
            ns: raw.grid.counts.0,
            nt: raw.grid.counts.1,
            nu: raw.grid.counts.2,
        };
        grid.validate()?;
        if let Some(h) = raw.fd_step {
            if !(h > 0.0) {
                return Err(Error::Config {
                    path: "fd_step".into(),
                    reason: format!("must be positive, got {h}"),
                });
            }
        }
        if let Some(p) = &raw.outputs.projection {
            p.validate()?;
        }
        Ok(Self {
            params,
            curve1: raw.curve1,
            curve2: raw.curve2,
            grid,
            patch_options: PatchOptions {
                base_node: raw.branch.base_node.unwrap_or((0, 0)),
                zeta_floor: raw.branch.zeta_floor.unwrap_or(DEFAULT_ZETA_FLOOR),
            },
            fd_step: raw.fd_step.unwrap_or(DEFAULT_FD_STEP),
            tol_hopf: raw.tolerances.hopf.unwrap_or(DEFAULT_TOL_HOPF),
            tol_quadric: raw.tolerances.quadric.unwrap_or(DEFAULT_TOL_QUADRIC),
            genericity_floor: raw
                .tolerances
                .genericity_floor
                .unwrap_or(DEFAULT_GENERICITY_FLOOR),
            seed: raw.seed.unwrap_or(DEFAULT_SEED),
            outputs: raw.outputs,
        })
    }

    /// Parameter domain for curve 1, padded beyond the s-range.
    pub fn curve1_domain(&self) -> (f64, f64) {
        (
            self.grid.s_range.0 - CURVE_DOMAIN_PAD,
            self.grid.s_range.1 + CURVE_DOMAIN_PAD,
        )
    }

    /// Parameter domain for curve 2, padded beyond the t-range.
    pub fn curve2_domain(&self) -> (f64, f64) {
        (
            self.grid.t_range.0 - CURVE_DOMAIN_PAD,
            self.grid.t_range.1 + CURVE_DOMAIN_PAD,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MIXED: &str = r#"{
        "params": {"r": 1.0, "phi": 0.5235987755982988},
        "curve1": {"preset": "tilted-circle", "params": {"m": 0.7853981633974483}},
        "curve2": {"preset": "tilted-circle", "params": {"m": 1.0471975511965976}},
        "grid": {"s_range": [-1.5, 1.5], "t_range": [-1.5, 1.5],
                 "u_range": [-1.0, 1.0], "counts": [9, 9, 5]}
    }"#;

    #[test]
    fn parse_minimal() {
        let cfg = RunConfig::from_json(MIXED).unwrap();
        assert!((cfg.params.alpha() - 1.0).abs() < 1e-12);
        assert_eq!(cfg.grid.ns, 9);
        assert_eq!(cfg.fd_step, DEFAULT_FD_STEP);
    }

    #[test]
    fn alpha_phi_conversion() {
        let cfg = RunConfig::from_json(
            r#"{"params": {"r": 1.0, "alpha": 0.0},
                "curve1": {"preset": "great-circle"},
                "curve2": {"preset": "great-circle"},
                "grid": {"s_range": [0, 1], "t_range": [2, 3],
                         "u_range": [-1, 1], "counts": [2, 2, 2]}}"#,
        )
        .unwrap();
        assert_eq!(cfg.params.phi(), 0.0);

        let cfg = RunConfig::from_json(
            r#"{"params": {"r": 2.0, "phi": 0.5235987755982988},
                "curve1": {"preset": "great-circle"},
                "curve2": {"preset": "great-circle"},
                "grid": {"s_range": [0, 1], "t_range": [2, 3],
                         "u_range": [-1, 1], "counts": [2, 2, 2]}}"#,
        )
        .unwrap();
        assert!((cfg.params.alpha() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn regime_violation_rejected() {
        let res = RunConfig::from_json(
            r#"{"params": {"r": 1.0, "alpha": 2.5},
                "curve1": {"preset": "great-circle"},
                "curve2": {"preset": "great-circle"},
                "grid": {"s_range": [0, 1], "t_range": [2, 3],
                         "u_range": [-1, 1], "counts": [2, 2, 2]}}"#,
        );
        assert!(matches!(res, Err(Error::Regime { .. })));
    }

    #[test]
    fn empty_u_range_rejected() {
        let res = RunConfig::from_json(
            r#"{"params": {"r": 1.0, "phi": 0.0},
                "curve1": {"preset": "great-circle"},
                "curve2": {"preset": "great-circle"},
                "grid": {"s_range": [0, 1], "t_range": [2, 3],
                         "u_range": [1, 1], "counts": [2, 2, 2]}}"#,
        );
        assert!(matches!(res, Err(Error::Config { .. })));
    }

    #[test]
    fn count_below_two_rejected() {
        let res = RunConfig::from_json(
            r#"{"params": {"r": 1.0, "phi": 0.0},
                "curve1": {"preset": "great-circle"},
                "curve2": {"preset": "great-circle"},
                "grid": {"s_range": [0, 1], "t_range": [2, 3],
                         "u_range": [-1, 1], "counts": [1, 2, 2]}}"#,
        );
        assert!(matches!(res, Err(Error::Config { .. })));
    }

    #[test]
    fn malformed_json_is_parse_error() {
        assert!(matches!(
            RunConfig::from_json("{not json"),
            Err(Error::Json(_))
        ));
    }

    #[test]
    fn projection_matrix_apply() {
        let p = Projection::Matrix([
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.5, 0.0, 0.5],
        ]);
        let out = p.apply(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(out, [1.0, 3.0, 3.0]);
    }
}
