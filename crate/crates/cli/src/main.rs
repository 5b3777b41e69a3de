//! `lens-torsion`: oracle checks, single solves with certificates, stability
//! sweeps and geometric certificates of lens domains.

mod commands;
mod config;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use lens_torsion::stability::Theorem;

use crate::commands::{Output, EXIT_FAIL, EXIT_INPUT};
use crate::config::{parse_list, Fixture, RunConfig};

/// Caps the worker threads of the solver pool.
const THREADS_ENV: &str = "LENS_TORSION_THREADS";

#[derive(Parser)]
#[command(name = "lens-torsion", version, about = "Mixed Steklov-Dirichlet torsion on lens domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the integral identities on the closed-form solution by adaptive quadrature.
    OracleCheck(Flags),
    /// Mesh, solve and certify one lens.
    Solve(Flags),
    /// Run a perturbation family and certify the stability bounds.
    Sweep(Flags),
    /// Cone, John and parallel-set certificates of a lens or a fixture.
    Geometry(Flags),
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; nothing is written when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Space dimension N.
    #[arg(short = 'n', long)]
    dimension: Option<usize>,
    /// Cap radius R.
    #[arg(long, allow_hyphen_values = true)]
    radius: Option<f64>,
    /// Horizontal offset z' of the cap center, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    azimuth: Option<String>,
    /// Bump amplitude of the solved domain.
    #[arg(long, allow_hyphen_values = true)]
    amplitude: Option<f64>,
    /// Target mesh size.
    #[arg(long, allow_hyphen_values = true)]
    h: Option<f64>,
    /// Uniform refinements after meshing.
    #[arg(long)]
    refine: Option<usize>,
    /// Sweep amplitudes, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<String>,
    /// Residual tolerance of the oracle check.
    #[arg(long, allow_hyphen_values = true)]
    tol: Option<f64>,
    /// Planar general-stability parameter.
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<f64>,
    /// Theorems to certify (T1.1, T1.2, T1.3, T4.8), comma separated.
    #[arg(long)]
    theorems: Option<String>,
    /// Interior cone aperture.
    #[arg(long, allow_hyphen_values = true)]
    cone_theta: Option<f64>,
    /// Interior cone height.
    #[arg(long, allow_hyphen_values = true)]
    cone_a: Option<f64>,
    /// Uniform interior sphere radius of the domain.
    #[arg(long, allow_hyphen_values = true)]
    inner_radius: Option<f64>,
    /// Domain of the geometry command.
    #[arg(long, value_enum)]
    fixture: Option<Fixture>,
    /// Exit with status 1 when the cone check fails.
    #[arg(long)]
    require_cone: bool,
}

impl Flags {
    fn resolve(&self) -> anyhow::Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.dimension {
            c.dimension = v;
        }
        if let Some(v) = self.radius {
            c.radius = v;
        }
        if let Some(v) = &self.azimuth {
            c.azimuth = parse_list(v).context("--azimuth")?;
        }
        if let Some(v) = self.amplitude {
            c.amplitude = v;
        }
        if let Some(v) = self.h {
            c.h = Some(v);
        }
        if let Some(v) = self.refine {
            c.refine = v;
        }
        if let Some(v) = &self.eps {
            c.eps = parse_list(v).context("--eps")?;
        }
        if let Some(v) = self.tol {
            c.tol = v;
        }
        if let Some(v) = self.eta {
            c.eta = v;
        }
        if let Some(v) = &self.theorems {
            c.theorems = v
                .split(',')
                .map(|t| t.trim().parse::<Theorem>())
                .collect::<Result<_, _>>()
                .context("--theorems")?;
        }
        if self.cone_theta.is_some() {
            c.cone_theta = self.cone_theta;
        }
        if self.cone_a.is_some() {
            c.cone_a = self.cone_a;
        }
        if self.inner_radius.is_some() {
            c.inner_radius = self.inner_radius;
        }
        if let Some(v) = self.fixture {
            c.fixture = v;
        }
        c.require_cone |= self.require_cone;
        Ok(c)
    }
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .with_context(|| format!("{THREADS_ENV} must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the thread pool")
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let (flags, command): (&Flags, fn(&RunConfig, &Output) -> anyhow::Result<u8>) = match &cli.command {
        Command::OracleCheck(f) => (f, commands::oracle_check),
        Command::Solve(f) => (f, commands::solve),
        Command::Sweep(f) => (f, commands::sweep),
        Command::Geometry(f) => (f, commands::geometry),
    };
    let config = match flags.resolve() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return Ok(EXIT_INPUT);
        }
    };
    let out = Output::new(flags.out.clone(), &config)?;
    command(&config, &out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(EXIT_INPUT);
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_FAIL)
        }
    }
}
