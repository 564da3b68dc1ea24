//! `ribbon` command-line front end.
//!
//! ```text
//! ribbon build|solve|energy|sweep|validate --config <path> [--out <dir>]
//!        [--grid N] [--width W] [--q Q,...] [--r R,...]
//! ```
//!
//! Exit codes: 0 success, 1 failed validation check, 2 configuration error,
//! 3 math error, 4 IO error.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use crate::config::{parse_list, parse_r_list, parse_width, ConfigError, CurveSpec, Mode, RunConfig};
use crate::energy::{
    bending_energy_closed, bending_energy_quadrature, helix_ratio_a, helix_ratio_b, limit_energy, ratio_table,
    write_energy_csv, EnergyRow,
};
use crate::error::RibbonError;
use crate::pipeline::{family_member, setup, solve_member_theta, FamilyMember};
use crate::ribbon::{flatness_residuals, tessellate};
use crate::table::write_numeric_csv;
use crate::validate::{run_all, write_report};

#[derive(Debug, Parser)]
#[command(name = "ribbon", about = "Flat ribbons along space curves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// OBJ mesh, flatness residuals and Darboux scalars per initial condition.
    Build(Options),
    /// Rotation angle θ(t) per initial condition.
    Solve(Options),
    /// Closed-form, quadrature and limit energies per initial condition.
    Energy(Options),
    /// Helix energy-ratio tables over the initial-condition circle.
    Sweep(Options),
    /// Invariant checks and acceptance criteria.
    Validate(Options),
}

#[derive(Debug, clap::Args)]
pub struct Options {
    /// Run configuration; defaults are used when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub grid: Option<usize>,
    /// Half-width: a number or `<f>*w_max`.
    #[arg(long)]
    pub width: Option<String>,
    /// Comma-separated initial angles.
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
    /// Comma-separated helix parameters r for `sweep`.
    #[arg(long)]
    pub r: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("math error: {0}")]
    Math(#[from] RibbonError),
    #[error("io error: {0}")]
    Io(#[from] io::Error),
    #[error("{0} validation check(s) failed")]
    ValidationFailed(usize),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        Self::Config(e.0)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::ValidationFailed(_) => 1,
            Self::Config(_) => 2,
            Self::Math(_) => 3,
            Self::Io(_) => 4,
        }
    }
}

/// Reads the config file (if any) and applies command-line overrides.
pub fn load_config(opts: &Options, mode: Mode) -> Result<RunConfig, CliError> {
    let mut cfg = match &opts.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            let mut cfg = RunConfig::parse(&text)?;
            // Sample paths are relative to the config file.
            if let CurveSpec::Samples { path: p } = &mut cfg.curve {
                if p.is_relative() {
                    if let Some(dir) = path.parent() {
                        *p = dir.join(&*p);
                    }
                }
            }
            cfg
        }
        None => RunConfig::default(),
    };
    cfg.mode = mode;
    if let Some(out) = &opts.out {
        cfg.out = out.clone();
    }
    if let Some(grid) = opts.grid {
        if grid < 5 {
            return Err(CliError::Config(format!("grid must be at least 5, got {grid}")));
        }
        cfg.grid = grid;
    }
    if let Some(w) = &opts.width {
        cfg.width = parse_width(w)?;
    }
    if let Some(q) = &opts.q {
        cfg.q_values = parse_list(q)?;
    }
    if let Some(r) = &opts.r {
        cfg.r_values = parse_r_list(r)?;
    }
    Ok(cfg)
}

/// Reads `t,x,y,z` rows; a non-numeric first line is taken as a header.
pub fn read_samples(path: &Path) -> Result<Vec<[f64; 4]>, CliError> {
    let text = fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Option<Vec<f64>> = cells.iter().map(|c| c.parse().ok()).collect();
        match parsed {
            Some(v) if v.len() == 4 => rows.push([v[0], v[1], v[2], v[3]]),
            None if lineno == 0 => continue,
            _ => {
                return Err(CliError::Config(format!(
                    "{}:{}: expected four numbers t,x,y,z",
                    path.display(),
                    lineno + 1
                )))
            }
        }
    }
    Ok(rows)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn members(cfg: &RunConfig, samples: Option<&[[f64; 4]]>) -> Result<Vec<FamilyMember>, CliError> {
    let s = setup(cfg, samples)?;
    let members: Result<Vec<_>, _> = cfg.q_values.par_iter().map(|&q| family_member(&s, cfg, q)).collect();
    Ok(members?)
}

fn cmd_build(cfg: &RunConfig, samples: Option<&[[f64; 4]]>, log: &mut dyn Write) -> Result<(), CliError> {
    let mut summary = Vec::new();
    for (i, m) in members(cfg, samples)?.iter().enumerate() {
        let mesh = tessellate(&m.ribbon, cfg.mesh_nt, cfg.mesh_nu)?;
        let mut obj = create(&cfg.out, &format!("ribbon_{i}.obj"))?;
        mesh.write_obj(&mut obj)?;
        obj.flush()?;

        let rep = flatness_residuals(&m.ribbon, cfg.mesh_nt, cfg.mesh_nu)?;
        let rows: Vec<Vec<f64>> = rep
            .rows
            .iter()
            .map(|r| vec![r.t, r.ruling_normal, r.ruling_twist, r.gaussian_estimate])
            .collect();
        let mut f = create(&cfg.out, &format!("residuals_{i}.csv"))?;
        write_numeric_csv(
            &mut f,
            &["t", "ruling_normal", "ruling_twist", "gaussian_estimate"],
            &rows,
        )?;
        f.flush()?;

        let mu = m.ribbon.mu();
        let rows: Vec<Vec<f64>> = mu
            .grid()
            .iter()
            .zip(mu.scalars())
            .map(|(&t, s)| vec![t, s.kappa_g, s.kappa_n, s.tau_g])
            .collect();
        let mut f = create(&cfg.out, &format!("scalars_{i}.csv"))?;
        write_numeric_csv(&mut f, &["t", "kappa_g", "kappa_n", "tau_g"], &rows)?;
        f.flush()?;

        writeln!(
            log,
            "q = {:.6}: w = {:.6}, vertices = {}, max |<X,N>| = {:.3e}, max twist = {:.3e}",
            m.q,
            m.ribbon.half_width(),
            mesh.vertices.len(),
            rep.max_ruling_normal,
            rep.max_ruling_twist
        )?;
        summary.push(vec![
            i as f64,
            m.q,
            m.ribbon.half_width(),
            m.ribbon.w_max(),
            rep.max_ruling_normal,
            rep.max_ruling_twist,
            rep.max_gaussian,
        ]);
    }
    let mut f = create(&cfg.out, "build_summary.csv")?;
    write_numeric_csv(
        &mut f,
        &[
            "index",
            "q",
            "w",
            "w_max",
            "max_ruling_normal",
            "max_ruling_twist",
            "max_gaussian",
        ],
        &summary,
    )?;
    f.flush()?;
    Ok(())
}

fn cmd_solve(cfg: &RunConfig, samples: Option<&[[f64; 4]]>, log: &mut dyn Write) -> Result<(), CliError> {
    let s = setup(cfg, samples)?;
    let sols: Result<Vec<_>, _> = cfg
        .q_values
        .par_iter()
        .map(|&q| solve_member_theta(&s, cfg, q))
        .collect();
    for (i, (sol, q)) in sols?.iter().zip(&cfg.q_values).enumerate() {
        let mut f = create(&cfg.out, &format!("theta_{i}.csv"))?;
        sol.write_csv(&mut f)?;
        f.flush()?;
        writeln!(
            log,
            "q = {q:.6}: {} nodes, step {:.3e}, error estimate {:.3e}",
            sol.grid().len(),
            sol.step,
            sol.error_estimate
        )?;
    }
    Ok(())
}

fn cmd_energy(cfg: &RunConfig, samples: Option<&[[f64; 4]]>, log: &mut dyn Write) -> Result<(), CliError> {
    let mut rows = Vec::new();
    for m in members(cfg, samples)? {
        let r = &m.ribbon;
        let closed = bending_energy_closed(r)?;
        let quad = bending_energy_quadrature(r, cfg.grid, cfg.quad_nu)?;
        let limit = limit_energy(r.mu(), r.half_width());
        writeln!(
            log,
            "q = {:.6}: closed {:.12e}, quadrature {:.12e}, limit {:.12e}",
            m.q, closed.value, quad.value, limit.value
        )?;
        for (label, report) in [("closed", closed), ("quadrature", quad), ("limit", limit)] {
            rows.push(EnergyRow {
                label: label.into(),
                q: m.q,
                report,
            });
        }
    }
    let mut f = create(&cfg.out, "energy.csv")?;
    write_energy_csv(&mut f, &rows)?;
    f.flush()?;
    Ok(())
}

type RatioFn = fn(f64, f64) -> f64;

fn cmd_sweep(cfg: &RunConfig, log: &mut dyn Write) -> Result<(), CliError> {
    let tables: [(&str, RatioFn); 2] = [("a", helix_ratio_a), ("b", helix_ratio_b)];
    for &r in &cfg.r_values {
        for (name, f) in tables {
            let rows: Vec<Vec<f64>> = ratio_table(f, r, cfg.sweep_points)
                .into_iter()
                .map(|(q, v)| vec![q, v])
                .collect();
            let max_dev = rows.iter().map(|row| (row[1] - 1.0).abs()).fold(0.0, f64::max);
            let mut out = create(&cfg.out, &format!("ratio_{name}_r{r}.csv"))?;
            write_numeric_csv(&mut out, &["q", "ratio"], &rows)?;
            out.flush()?;
            writeln!(log, "ratio_{name} r = {r}: max |ratio - 1| = {max_dev:.6e}")?;
        }
    }
    Ok(())
}

fn cmd_validate(cfg: &RunConfig, samples: Option<&[[f64; 4]]>, log: &mut dyn Write) -> Result<(), CliError> {
    let checks = run_all(cfg, samples);
    for c in &checks {
        writeln!(log, "{}", c.line())?;
    }
    let mut f = create(&cfg.out, "validate.csv")?;
    write_report(&mut f, &checks)?;
    f.flush()?;
    let failed = checks.iter().filter(|c| !c.pass).count();
    if failed > 0 {
        return Err(CliError::ValidationFailed(failed));
    }
    Ok(())
}

/// Runs a parsed command, writing progress lines to `log`.
pub fn run(cli: Cli, log: &mut dyn Write) -> Result<(), CliError> {
    let (opts, mode) = match &cli.command {
        Command::Build(o) => (o, Mode::Build),
        Command::Solve(o) => (o, Mode::Solve),
        Command::Energy(o) => (o, Mode::Energy),
        Command::Sweep(o) => (o, Mode::Sweep),
        Command::Validate(o) => (o, Mode::Validate),
    };
    let cfg = load_config(opts, mode)?;
    let samples = match &cfg.curve {
        CurveSpec::Samples { path } => Some(read_samples(path)?),
        _ => None,
    };
    let samples = samples.as_deref();
    fs::create_dir_all(&cfg.out)?;
    match mode {
        Mode::Build => cmd_build(&cfg, samples, log),
        Mode::Solve => cmd_solve(&cfg, samples, log),
        Mode::Energy => cmd_energy(&cfg, samples, log),
        Mode::Sweep => cmd_sweep(&cfg, log),
        Mode::Validate => cmd_validate(&cfg, samples, log),
    }
}

/// Parses `args`, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = io::stdout();
    match run(cli, &mut stdout.lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("ribbon: {e}");
            e.exit_code()
        }
    }
}
