//! End-to-end orchestration: config -> curves -> patch -> samples ->
//! verification -> exports.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::RunConfig;
use crate::dalembert::DalembertPatch;
use crate::error::{Error, Result};
use crate::export::{CsvRow, MeshSlices};
use crate::legendrian::curve_from_spec;
use crate::verify::{hopf_defect, SampleRecord, VerificationReport};

pub const N_PROBES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    /// Build and export the surface; no shape-operator verification.
    Construct,
    /// Build, verify, and export.
    Verify,
}

/// Random-probe summary: seeded (s, t, u) draws checking that genericity
/// above the floor implies parametrization rank 3.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ProbeSummary {
    pub n_probes: usize,
    pub n_generic: usize,
    pub n_rank3: usize,
    /// Probes with genericity above the floor but rank below 3.
    pub n_violations: usize,
}

/// Everything a run produces, ready for the exporters.
#[derive(Debug)]
pub struct RunOutcome {
    pub report: VerificationReport,
    pub probes: Option<ProbeSummary>,
    /// Masked (i, j) grid nodes, row-major order.
    pub exclusions: Vec<(usize, usize)>,
    pub n_components: usize,
    pub rows: Vec<CsvRow>,
    pub mesh: MeshSlices,
    pub failures: Vec<String>,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Build the evaluation patch from a validated configuration.
pub fn build_patch(cfg: &RunConfig) -> Result<DalembertPatch> {
    let c1 = curve_from_spec(&cfg.curve1, cfg.curve1_domain())?;
    let c2 = curve_from_spec(&cfg.curve2, cfg.curve2_domain())?;
    DalembertPatch::new(c1, c2, cfg.params, cfg.grid, cfg.patch_options)
}

/// Run the pipeline.  Never fails on per-sample degeneracy: degenerate
/// samples are excluded from the acceptance statistics and listed in the
/// report instead.
pub fn execute(cfg: &RunConfig, mode: RunMode) -> Result<RunOutcome> {
    let patch = build_patch(cfg)?;
    let grid = *patch.grid();
    let projection = cfg
        .outputs
        .projection
        .clone()
        .unwrap_or_default();

    let mut exclusions = Vec::new();
    let mut rows = Vec::new();
    let mut records = Vec::new();
    let mut mesh = MeshSlices {
        ns: grid.ns,
        nt: grid.nt,
        nu: grid.nu,
        verts: vec![None; grid.ns * grid.nt * grid.nu],
        component: vec![None; grid.ns * grid.nt],
    };

    for i in 0..grid.ns {
        for j in 0..grid.nt {
            mesh.component[i * grid.nt + j] = patch.tau_field().component(i, j);
            if patch.tau_field().value(i, j).is_none() {
                exclusions.push((i, j));
                continue;
            }
            let s = grid.s_at(i);
            let t = grid.t_at(j);
            for k in 0..grid.nu {
                let u = grid.u_at(k);
                let sample = patch.surface_point(s, t, u)?;
                let coords4 = [
                    sample.w[0].0,
                    sample.w[0].1,
                    sample.w[1].0,
                    sample.w[1].1,
                ];
                mesh.verts[(k * grid.ns + i) * grid.nt + j] = Some(projection.apply(&coords4));

                let generic =
                    sample.genericity.abs() >= cfg.genericity_floor && sample.jacobian_rank == 3;
                let (defect, alpha, asym, w_angle, retained) = if mode == RunMode::Verify && generic
                {
                    match hopf_defect(&patch, s, t, u, cfg.fd_step) {
                        Ok(d) => (d.defect, d.measured_alpha, d.asymmetry, d.w_angle, true),
                        // a degenerate frame at a nominally generic sample:
                        // exclude it rather than abort the run
                        Err(Error::DegenerateFrame { .. }) => {
                            (f64::NAN, f64::NAN, f64::NAN, f64::NAN, false)
                        }
                        Err(e) => return Err(e),
                    }
                } else {
                    (f64::NAN, f64::NAN, f64::NAN, f64::NAN, false)
                };
                let zeta = patch.zeta_at(s, t);
                rows.push(CsvRow {
                    s,
                    t,
                    u,
                    w: sample.w.clone(),
                    zeta_abs: zeta.norm(),
                    zeta_arg: zeta.arg(),
                    genericity: sample.genericity,
                    hopf_defect: defect,
                    measured_alpha: alpha,
                    rank: sample.jacobian_rank,
                });
                records.push(SampleRecord {
                    s,
                    t,
                    u,
                    quadric_residual: sample.quadric_residual,
                    genericity: sample.genericity,
                    rank: sample.jacobian_rank,
                    hopf_defect: defect,
                    measured_alpha: alpha,
                    asymmetry: asym,
                    w_angle: w_angle,
                    retained,
                });
            }
        }
    }

    let report = VerificationReport::from_records(records, cfg.params.alpha().abs());
    let probes = if mode == RunMode::Verify {
        Some(run_probes(&patch, cfg)?)
    } else {
        None
    };

    let mut failures = Vec::new();
    if report.summary.max_quadric_residual > cfg.tol_quadric {
        failures.push(format!(
            "quadric residual {:.3e} exceeds tolerance {:.3e}",
            report.summary.max_quadric_residual, cfg.tol_quadric
        ));
    }
    if mode == RunMode::Verify && !report.no_generic_samples {
        if report.summary.max_hopf_defect > cfg.tol_hopf {
            failures.push(format!(
                "Hopf defect {:.3e} exceeds tolerance {:.3e}",
                report.summary.max_hopf_defect, cfg.tol_hopf
            ));
        }
        if report.summary.max_alpha_deviation > cfg.tol_hopf {
            failures.push(format!(
                "structure eigenvalue off by {:.3e} (tolerance {:.3e})",
                report.summary.max_alpha_deviation, cfg.tol_hopf
            ));
        }
    }
    if let Some(p) = &probes {
        if p.n_violations > 0 {
            failures.push(format!(
                "{} generic probe(s) with parametrization rank below 3",
                p.n_violations
            ));
        }
    }

    Ok(RunOutcome {
        report,
        probes,
        exclusions,
        n_components: patch.tau_field().n_components(),
        rows,
        mesh,
        failures,
    })
}

fn run_probes(patch: &DalembertPatch, cfg: &RunConfig) -> Result<ProbeSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let grid = patch.grid();
    let mut summary = ProbeSummary {
        n_probes: N_PROBES,
        ..Default::default()
    };
    for _ in 0..N_PROBES {
        let s = rng.gen_range(grid.s_range.0..grid.s_range.1);
        let t = rng.gen_range(grid.t_range.0..grid.t_range.1);
        let u = rng.gen_range(grid.u_range.0..grid.u_range.1);
        let Ok(gen) = patch.genericity(s, t) else {
            continue; // probe fell on a masked region
        };
        if gen.abs() < cfg.genericity_floor {
            continue;
        }
        summary.n_generic += 1;
        let rank = patch.jacobian_rank(s, t, u)?;
        if rank == 3 {
            summary.n_rank3 += 1;
        } else {
            summary.n_violations += 1;
        }
    }
    Ok(summary)
}

/// Serializable run report: configuration echo, branch/exclusion data, and
/// the verification statistics.
#[derive(Debug, Serialize)]
pub struct RunReport<'a> {
    pub mode: &'a str,
    pub r: f64,
    pub phi: f64,
    pub alpha: f64,
    pub grid: crate::dalembert::GridSpec,
    pub fd_step: f64,
    pub tol_hopf: f64,
    pub tol_quadric: f64,
    pub genericity_floor: f64,
    pub seed: u64,
    pub n_components: usize,
    pub excluded_nodes: &'a [(usize, usize)],
    pub probes: &'a Option<ProbeSummary>,
    pub passed: bool,
    pub failures: &'a [String],
    pub verification: &'a VerificationReport,
}

/// Render the JSON report (pretty, trailing newline, deterministic field
/// order).
pub fn report_json(cfg: &RunConfig, mode: RunMode, outcome: &RunOutcome) -> String {
    let report = RunReport {
        mode: match mode {
            RunMode::Construct => "construct",
            RunMode::Verify => "verify",
        },
        r: cfg.params.r(),
        phi: cfg.params.phi(),
        alpha: cfg.params.alpha(),
        grid: cfg.grid,
        fd_step: cfg.fd_step,
        tol_hopf: cfg.tol_hopf,
        tol_quadric: cfg.tol_quadric,
        genericity_floor: cfg.genericity_floor,
        seed: cfg.seed,
        n_components: outcome.n_components,
        excluded_nodes: &outcome.exclusions,
        probes: &outcome.probes,
        passed: outcome.passed(),
        failures: &outcome.failures,
        verification: &outcome.report,
    };
    let mut text = serde_json::to_string_pretty(&report).expect("report serialization");
    text.push('\n');
    text
}
