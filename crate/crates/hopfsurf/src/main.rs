//! Command-line front end: construct / verify / check-curve.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hopfsurf::legendrian::curve_from_spec;
use hopfsurf::run::{execute, report_json, RunMode};
use hopfsurf::{Error, Result, RunConfig};

#[derive(Parser)]
#[command(name = "hopfsurf", version, about = "Hopf hypersurfaces from contact-curve boundary data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override the finite-difference step.
    #[arg(long)]
    fd_step: Option<f64>,
    /// Override the Hopf-defect tolerance.
    #[arg(long)]
    tol_hopf: Option<f64>,
    /// Override the RNG seed for random probe points.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Build the surface and write the configured outputs.
    Construct(CommonArgs),
    /// Build the surface and verify the Hopf property numerically.
    Verify(CommonArgs),
    /// Validate the boundary curves (contact identity, lift nullity).
    CheckCurve(CommonArgs),
}

fn load_config(args: &CommonArgs) -> Result<RunConfig> {
    let text = std::fs::read_to_string(&args.config)?;
    let mut cfg = RunConfig::from_json(&text)?;
    if let Some(h) = args.fd_step {
        if !(h > 0.0) {
            return Err(Error::Config {
                path: "--fd-step".into(),
                reason: format!("must be positive, got {h}"),
            });
        }
        cfg.fd_step = h;
    }
    if let Some(tol) = args.tol_hopf {
        cfg.tol_hopf = tol;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn write_outputs(
    cfg: &RunConfig,
    mode: RunMode,
    outcome: &hopfsurf::RunOutcome,
) -> Result<()> {
    if let Some(path) = &cfg.outputs.csv_path {
        std::fs::write(path, hopfsurf::export::csv_string(&outcome.rows, 2))?;
        eprintln!("wrote {path}");
    }
    if let Some(path) = &cfg.outputs.mesh_path {
        let text = match Path::new(path).extension().and_then(|e| e.to_str()) {
            Some("ply") => hopfsurf::export::ply_string(&outcome.mesh),
            Some("obj") => hopfsurf::export::obj_string(&outcome.mesh),
            other => {
                return Err(Error::Config {
                    path: "outputs.mesh_path".into(),
                    reason: format!("unsupported mesh extension {other:?}; use .obj or .ply"),
                })
            }
        };
        std::fs::write(path, text)?;
        eprintln!("wrote {path}");
    }
    if let Some(path) = &cfg.outputs.report_path {
        std::fs::write(path, report_json(cfg, mode, outcome))?;
        eprintln!("wrote {path}");
    }
    Ok(())
}

fn run_mode(args: &CommonArgs, mode: RunMode) -> Result<bool> {
    let cfg = load_config(args)?;
    let outcome = execute(&cfg, mode)?;
    write_outputs(&cfg, mode, &outcome)?;
    let s = &outcome.report.summary;
    match mode {
        RunMode::Verify => println!(
            "samples: {} ({} retained, {} excluded); components: {}",
            s.n_samples, s.n_retained, s.n_excluded, outcome.n_components
        ),
        RunMode::Construct => println!(
            "samples: {} ({} masked grid nodes); components: {}",
            s.n_samples,
            outcome.exclusions.len(),
            outcome.n_components
        ),
    }
    println!("max quadric residual: {:.3e}", s.max_quadric_residual);
    if mode == RunMode::Verify {
        if outcome.report.no_generic_samples {
            println!("no generic samples: Hopf statistics unavailable");
        } else {
            println!(
                "max Hopf defect: {:.3e}; max |alpha| deviation: {:.3e} (expected |alpha| = {:.6})",
                s.max_hopf_defect,
                s.max_alpha_deviation,
                outcome.report.expected_alpha_abs
            );
        }
        if let Some(p) = &outcome.probes {
            println!(
                "probes: {} generic of {}, {} rank-3, {} violations",
                p.n_generic, p.n_probes, p.n_rank3, p.n_violations
            );
        }
    }
    for f in &outcome.failures {
        eprintln!("FAIL: {f}");
    }
    Ok(outcome.passed())
}

fn check_curve(args: &CommonArgs) -> Result<bool> {
    let cfg = load_config(args)?;
    let specs = [
        ("curve1", &cfg.curve1, cfg.curve1_domain()),
        ("curve2", &cfg.curve2, cfg.curve2_domain()),
    ];
    let mut ok = true;
    for (name, spec, domain) in specs {
        match curve_from_spec(spec, domain) {
            Ok(curve) => {
                let mut max_defect: f64 = 0.0;
                let n = 256;
                for i in 0..=n {
                    let t = domain.0 + (domain.1 - domain.0) * i as f64 / n as f64;
                    max_defect = max_defect.max(curve.contact_identity(t).abs());
                }
                println!("{name}: ok, max contact defect {max_defect:.3e} on [{:.4}, {:.4}]",
                    domain.0, domain.1);
            }
            Err(e) => {
                eprintln!("{name}: FAIL: {e}");
                ok = false;
            }
        }
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Construct(args) => run_mode(args, RunMode::Construct),
        Command::Verify(args) => run_mode(args, RunMode::Verify),
        Command::CheckCurve(args) => check_curve(args),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
