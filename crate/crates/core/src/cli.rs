//! Command-line front end.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::config::{BoundaryKind, LoadKind, RunConfig};
use crate::error::{Error, Result};
use crate::meshio::write_pmesh;
use crate::mesh::compute_geometry;
use crate::sparse::SolveInfo;
use crate::system::{apply_bcs, assemble_global, solve, BoundarySpec, Materials};
use crate::verify::compaction::{compaction_bcs, compaction_load};
use crate::verify::metrics::{error_metrics, ErrorMetrics};
use crate::verify::sweep::{aspect_ratio_sweep, rows_to_csv, SweepConfig, SweepRow};
use crate::vtk::{cell_max_strain, to_vtk};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "polyvem", version, about = "Virtual element elasticity on polyhedral and corner-point grids")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
    /// Worker threads for assembly and sweeps.
    #[arg(long, global = true, value_name = "N", env = "POLYVEM_THREADS")]
    pub threads: Option<usize>,
    /// Relative residual tolerance of the linear solver.
    #[arg(long, global = true, value_name = "X")]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Build the configured grid; write .pmesh and .vtk.
    Generate,
    /// Assemble and solve; write displacement VTK and a run summary.
    Solve,
    /// Aspect-ratio sweep of the 2D compaction case; write CSV.
    Sweep,
    /// Run the acceptance checks.
    VerifyPaper,
}

/// Exit code for an error: 2 for bad input, 3 for numerical failure.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Grdecl(_) | Error::Io(_) | Error::Unsupported(_) => EXIT_CONFIG,
        Error::Element { source, .. } => exit_code(source),
        _ => EXIT_NUMERICAL,
    }
}

#[derive(Debug, Clone)]
pub struct SolveSummary {
    pub n_nodes: usize,
    pub n_cells: usize,
    pub n_dofs: usize,
    pub n_free: usize,
    pub info: SolveInfo,
    pub wall_time: f64,
    /// Against the one-dimensional column solution, when it applies.
    pub error: Option<ErrorMetrics>,
}

impl SolveSummary {
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "nodes = {}", self.n_nodes);
        let _ = writeln!(s, "cells = {}", self.n_cells);
        let _ = writeln!(s, "dofs = {}", self.n_dofs);
        let _ = writeln!(s, "free_dofs = {}", self.n_free);
        let _ = writeln!(s, "solver = \"{:?}\"", self.info.kind);
        let _ = writeln!(s, "iterations = {}", self.info.iterations);
        let _ = writeln!(s, "relative_residual = {:e}", self.info.relative_residual);
        let _ = writeln!(s, "wall_time_s = {:.3}", self.wall_time);
        if let Some(m) = &self.error {
            let _ = writeln!(s, "max_vertical_error = {:e}", m.vert_max_abs);
            let _ = writeln!(s, "rel_vertical_error = {:e}", m.vert_rel_max);
        }
        s
    }
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let p = dir.join(name);
    std::fs::write(&p, text)?;
    Ok(p)
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    let p = path.ok_or_else(|| Error::Config("this command needs --config PATH".into()))?;
    RunConfig::from_path(p)
}

/// Writes `<prefix>.pmesh` and `<prefix>.vtk`.
pub fn cmd_generate(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let (mesh, _) = cfg.grid()?.build(&cfg.base_dir)?;
    compute_geometry(&mesh)?;
    let prefix = &cfg.output.prefix;
    let mut written = vec![write_file(out, &format!("{prefix}.pmesh"), &write_pmesh(&mesh))?];
    if cfg.output.vtk {
        written.push(write_file(out, &format!("{prefix}.vtk"), &to_vtk(&mesh, prefix, None, &[])?)?);
    }
    Ok(written)
}

/// Full pipeline; writes `<prefix>.vtk` and `<prefix>_summary.toml`.
pub fn cmd_solve(cfg: &RunConfig, out: &Path, tol: Option<f64>) -> Result<SolveSummary> {
    let t0 = Instant::now();
    let case = cfg.case()?;
    let method = cfg.load_method()?;
    let stab = cfg.stabilization()?;
    let (mesh, frame) = cfg.grid()?.build(&cfg.base_dir)?;
    let geom = compute_geometry(&mesh)?;
    let material = case.material(mesh.dim())?;
    let asm = assemble_global(&mesh, &geom, &Materials::Uniform(material), stab)?;
    let load = compaction_load(&mesh, &geom, &asm.ops, &frame, &case, method)?;
    let bc = match cfg.boundary.kind {
        BoundaryKind::Compaction => compaction_bcs(&mesh, &frame, &case)?,
        BoundaryKind::None => BoundarySpec::new(),
    };
    let sys = apply_bcs(&asm.k, &load, &bc, &mesh, &geom)?;
    let (u, info) = solve(&sys, tol.unwrap_or(cfg.solver.tol))?;
    let error = if cfg.boundary.kind == BoundaryKind::Compaction && cfg.load.kind != LoadKind::None {
        let exact = case.exact_field(&mesh, &frame)?;
        Some(error_metrics(&u, &exact, mesh.dim(), Some(frame.axis))?)
    } else {
        None
    };
    let summary = SolveSummary {
        n_nodes: mesh.n_nodes(),
        n_cells: mesh.n_cells(),
        n_dofs: mesh.n_dofs(),
        n_free: sys.free.len(),
        info,
        wall_time: t0.elapsed().as_secs_f64(),
        error,
    };
    let prefix = &cfg.output.prefix;
    if cfg.output.vtk {
        let strain = cell_max_strain(&asm.ops, &u)?;
        let text = to_vtk(&mesh, prefix, Some(&u), &[("max_strain", &strain)])?;
        write_file(out, &format!("{prefix}.vtk"), &text)?;
    }
    write_file(out, &format!("{prefix}_summary.toml"), &summary.render())?;
    Ok(summary)
}

/// Runs the sweep and writes `<prefix>_sweep.csv`. Without a `[sweep]`
/// section the default series over AR 1, 3, 10, 30, 100 is used.
pub fn cmd_sweep(cfg: Option<&RunConfig>, out: &Path, tol: Option<f64>) -> Result<Vec<SweepRow>> {
    let mut sc = match cfg {
        Some(c) if c.sweep.is_some() => c.sweep_config()?,
        _ => SweepConfig {
            aspect_ratios: vec![1.0, 3.0, 10.0, 30.0, 100.0],
            ..SweepConfig::default()
        },
    };
    if let Some(t) = tol {
        sc.tol = t;
    }
    let rows = aspect_ratio_sweep(&sc)?;
    let prefix = cfg.map(|c| c.output.prefix.as_str()).unwrap_or("polyvem");
    write_file(out, &format!("{prefix}_sweep.csv"), &rows_to_csv(&rows))?;
    Ok(rows)
}

fn execute(cli: &Cli) -> Result<i32> {
    if let Some(t) = cli.tol {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::Config("--tol must lie in (0, 1)".into()));
        }
    }
    match cli.command {
        Command::Generate => {
            let cfg = load_config(cli.config.as_deref())?;
            for p in cmd_generate(&cfg, &cli.out)? {
                println!("wrote {}", p.display());
            }
            Ok(EXIT_OK)
        }
        Command::Solve => {
            let cfg = load_config(cli.config.as_deref())?;
            print!("{}", cmd_solve(&cfg, &cli.out, cli.tol)?.render());
            Ok(EXIT_OK)
        }
        Command::Sweep => {
            let cfg = cli.config.as_deref().map(RunConfig::from_path).transpose()?;
            let rows = cmd_sweep(cfg.as_ref(), &cli.out, cli.tol)?;
            let failed: Vec<&SweepRow> = rows.iter().filter(|r| r.failure.is_some()).collect();
            for r in &failed {
                eprintln!(
                    "row ar={} {} {} {} failed: {}",
                    r.ar,
                    r.method.name(),
                    r.stab.name(),
                    r.grid.name(),
                    r.failure.as_deref().unwrap_or("")
                );
            }
            println!("{} rows, {} failed", rows.len(), failed.len());
            Ok(if failed.is_empty() { EXIT_OK } else { EXIT_NUMERICAL })
        }
        Command::VerifyPaper => {
            let results = crate::verify::acceptance::run_all();
            let mut text = String::new();
            for c in &results {
                let _ = writeln!(text, "{}", c.line());
            }
            let failed = results.iter().filter(|c| !c.passed).count();
            let _ = writeln!(text, "acceptance: {} passed, {} failed", results.len() - failed, failed);
            print!("{text}");
            write_file(&cli.out, "acceptance.txt", &text)?;
            Ok(if failed == 0 { EXIT_OK } else { EXIT_NUMERICAL })
        }
    }
}

/// Runs the parsed command on a pool of `--threads` workers.
pub fn run(cli: &Cli) -> i32 {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: config: --threads must be at least 1");
            return EXIT_CONFIG;
        }
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start thread pool: {e}");
            return EXIT_CONFIG;
        }
    };
    match pool.install(|| execute(cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Parses arguments and runs; returns the process exit code.
pub fn main_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let _ = e.print();
            e.exit_code()
        }
    }
}
