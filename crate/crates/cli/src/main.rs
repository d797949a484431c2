//! `greenbound`: lattice counts, bound certificates and their cusp extensions
//! from the command line.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use greenbound_core::bounds::ArithmeticMode;
use greenbound_core::cusps::CuspCase;
use greenbound_core::optimize::Objective;
use greenbound_core::GreenError;

mod commands;
mod config;
mod record;

use config::{parse_grid, parse_point, RunConfig};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, bad configuration or a violated parameter constraint.
    Config(String),
    /// A series or quadrature did not converge.
    Numerical(String),
    /// `reproduce-paper` or `selftest` found a failing item.
    Mismatch(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Mismatch(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Mismatch(m) => write!(f, "mismatch: {m}"),
        }
    }
}

impl From<GreenError> for CliError {
    fn from(e: GreenError) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Preset {
    /// The modular group with the Kim–Sarnak gap.
    Sl2z,
    /// The rectangle [−1/2, 1/2] × [√3/2, 2].
    Y0,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Exact,
    Paper,
}

#[derive(Parser, Debug)]
#[command(name = "greenbound", version, about = "Explicit bounds for Green functions of cofinite Fuchsian groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[arg(long, global = true, value_enum)]
    preset: Option<Preset>,

    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,

    /// Write a flat JSON record of the result here.
    #[arg(long, global = true)]
    json: Option<PathBuf>,

    #[arg(long, global = true, value_parser = parse_grid, value_name = "NxM")]
    grid: Option<(usize, usize)>,

    #[arg(long = "U", global = true, value_name = "REAL")]
    u: Option<f64>,

    /// Spectral gap preset: selberg-3-16 or kim-sarnak.
    #[arg(long, global = true)]
    eta: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bound N(z, z, U) over a rectangle, or count it at one point.
    Count {
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true, value_name = "x,y")]
        point: Option<(f64, f64)>,
    },
    /// Compute q±, D± and the constants A ≤ B.
    Bounds {
        #[arg(long)]
        n_bar: Option<f64>,
    },
    /// Re-run the modular group computation and compare with the published values.
    ReproducePaper,
    /// Extend A ≤ B to a neighbourhood of the cusp.
    CuspExtend {
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        eps_prime: Option<f64>,
        /// a, a_prime, b or c.
        #[arg(long)]
        case: Option<CuspCase>,
    },
    /// Search for parameters giving a narrower certificate.
    Optimize {
        /// width or max-abs.
        #[arg(long)]
        objective: Option<Objective>,
        #[arg(long)]
        max_iters: Option<usize>,
    },
    /// Run the randomized inequality suites.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

impl Cli {
    fn run_config(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        match self.preset {
            Some(Preset::Sl2z) => cfg.group.preset = Some("sl2z".into()),
            Some(Preset::Y0) => cfg.region = None,
            None => {}
        }
        if let Some(m) = self.mode {
            cfg.mode = Some(match m {
                ModeArg::Exact => ArithmeticMode::TheoremExact,
                ModeArg::Paper => ArithmeticMode::PaperArithmetic,
            });
        }
        if let Some(g) = self.grid {
            cfg.grid = Some(g);
        }
        if let Some(u) = self.u {
            cfg.u = Some(u);
        }
        if let Some(e) = &self.eta {
            cfg.group.eta = None;
            cfg.group.eta_preset = Some(e.clone());
        }
        Ok(cfg)
    }
}

fn init_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("GREENBOUND_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| CliError::Config(format!("GREENBOUND_THREADS: expected a positive integer, got {v:?}")))?;
        if n == 0 {
            return Err(CliError::Config("GREENBOUND_THREADS: must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("GREENBOUND_THREADS: {e}")))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    init_threads()?;
    let mut cfg = cli.run_config()?;
    let json = cli.json.as_deref();
    match &cli.command {
        Command::Count { point } => commands::count(&cfg, *point, json),
        Command::Bounds { n_bar } => {
            if n_bar.is_some() {
                cfg.n_bar = *n_bar;
            }
            commands::bounds(&cfg, json)
        }
        Command::ReproducePaper => commands::reproduce_paper(&cfg, json),
        Command::CuspExtend { eps, eps_prime, case } => {
            let mut c = cfg.cusp.clone().unwrap_or_default();
            c.eps = eps.or(c.eps);
            c.eps_prime = eps_prime.or(c.eps_prime);
            c.case = case.or(c.case);
            cfg.cusp = Some(c);
            commands::cusp_extend(&cfg, json)
        }
        Command::Optimize { objective, max_iters } => {
            let mut s = cfg.search.clone().unwrap_or_default();
            s.objective = objective.or(s.objective);
            s.max_iters = max_iters.or(s.max_iters);
            cfg.search = Some(s);
            commands::optimize(&cfg, json)
        }
        Command::Selftest { seed } => commands::selftest(*seed, json),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("greenbound: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
