//! `subhardy` command-line front end.
//!
//! Exit codes: 0 success, 1 certificate or expectation failure, 2 invalid
//! configuration, 3 unsupported configuration, 4 numerical non-convergence.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use subhardy::boundary::Metric;

use config::{Check, DomainKind, FileConfig, Format, Mode, Overrides, PointSpec, RunConfig};

#[derive(Debug)]
pub enum Failure {
    Expectation(String),
    Config(String),
    Unsupported(String),
    NonConvergence(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Expectation(_) => 1,
            Failure::Config(_) | Failure::Io(_) => 2,
            Failure::Unsupported(_) => 3,
            Failure::NonConvergence(_) => 4,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Expectation(m) => write!(f, "check failed: {m}"),
            Failure::Config(m) => write!(f, "invalid configuration: {m}"),
            Failure::Unsupported(m) => write!(f, "unsupported configuration: {m}"),
            Failure::NonConvergence(m) => write!(f, "quadrature did not converge: {m}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<subhardy::Error> for Failure {
    fn from(e: subhardy::Error) -> Self {
        match e {
            subhardy::Error::Unsupported(m) => Failure::Unsupported(m),
            subhardy::Error::NonConvergence(m) => Failure::NonConvergence(m),
            other => Failure::Config(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "subhardy", version, about = "Boundary distances and Hardy-quotient probes on the Heisenberg group")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// TOML config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<String>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    threads: Option<usize>,
}

fn parse_metric(s: &str) -> Result<Metric, String> {
    s.parse().map_err(|e: subhardy::Error| e.to_string())
}

#[derive(Args, Default)]
struct DomainArgs {
    #[arg(long, value_enum)]
    domain: Option<DomainKind>,
    #[arg(long, value_parser = parse_metric)]
    metric: Option<Metric>,
    #[arg(long)]
    n: Option<usize>,
    /// Torus major radius.
    #[arg(long = "R", alias = "big-r")]
    big_r: Option<f64>,
    /// Torus minor radius.
    #[arg(long)]
    rho: Option<f64>,
}

#[derive(Args, Default)]
struct RangeArgs {
    #[arg(long = "r-min", alias = "R-min")]
    r_min: Option<f64>,
    #[arg(long = "r-max", alias = "R-max")]
    r_max: Option<f64>,
    #[arg(long = "t-min", alias = "T-min")]
    t_min: Option<f64>,
    #[arg(long = "t-max", alias = "T-max")]
    t_max: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Distance to the boundary and nearest boundary points.
    Dist {
        #[command(flatten)]
        domain: DomainArgs,
        /// `x1,..,xn,y1,..,yn,t` or `r=..,t=..`.
        #[arg(long)]
        point: Option<PointSpec>,
    },
    /// The constant β(p, n) and the thresholds around it.
    Beta {
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Superharmonicity certificates for the torus or the half-space.
    Verify {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        grid: Option<usize>,
        #[command(flatten)]
        range: RangeArgs,
    },
    /// Hardy quotients of the sharpness family along an ε list.
    Quotient {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long)]
        p: Option<f64>,
        /// Quadrature size; the error estimate uses twice this.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long = "eps", value_delimiter = ',')]
        eps_list: Option<Vec<f64>>,
        #[arg(long)]
        q1: Option<f64>,
        #[arg(long)]
        q2: Option<f64>,
        #[arg(long = "max-error")]
        max_error: Option<f64>,
        #[command(flatten)]
        range: RangeArgs,
        #[arg(long, value_enum)]
        check: Option<Check>,
    },
    /// Weak H-concavity sampling or the half-space counterexample.
    Hconcavity {
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long = "v-scale")]
        v_scale: Option<f64>,
        #[arg(long = "t-scale", value_delimiter = ',')]
        t_scale: Option<Vec<f64>>,
    },
}

fn apply_domain(o: &mut Overrides, d: DomainArgs) {
    o.domain = d.domain;
    o.metric = d.metric;
    o.n = d.n;
    o.big_r = d.big_r;
    o.rho = d.rho;
}

fn apply_range(o: &mut Overrides, r: RangeArgs) {
    o.r_min = r.r_min;
    o.r_max = r.r_max;
    o.t_min = r.t_min;
    o.t_max = r.t_max;
}

fn overrides(cli: Cli) -> (&'static str, Overrides, Option<PathBuf>) {
    let g = cli.global;
    let mut o = Overrides {
        seed: g.seed,
        out: g.out,
        format: g.format,
        threads: g.threads,
        ..Default::default()
    };
    let name = match cli.command {
        Command::Dist { domain, point } => {
            apply_domain(&mut o, domain);
            o.point = point;
            "dist"
        }
        Command::Beta { p, n } => {
            o.p = p;
            o.n = n;
            "beta"
        }
        Command::Verify { domain, p, grid, range } => {
            apply_domain(&mut o, domain);
            apply_range(&mut o, range);
            o.p = p;
            o.grid = grid;
            "verify"
        }
        Command::Quotient {
            domain,
            p,
            grid,
            eps_list,
            q1,
            q2,
            max_error,
            range,
            check,
        } => {
            apply_domain(&mut o, domain);
            apply_range(&mut o, range);
            o.p = p;
            o.grid = grid;
            o.eps_list = eps_list;
            o.q1 = q1;
            o.q2 = q2;
            o.max_error = max_error;
            o.check = check;
            "quotient"
        }
        Command::Hconcavity {
            mode,
            domain,
            samples,
            v_scale,
            t_scale,
        } => {
            apply_domain(&mut o, domain);
            o.mode = mode;
            o.samples = samples;
            o.v_scale = v_scale;
            o.t_scale = t_scale;
            "hconcavity"
        }
    };
    (name, o, g.config)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (name, o, path) = overrides(cli);
    let file = match path {
        Some(p) => FileConfig::load(&p)?,
        None => FileConfig::default(),
    };
    let cfg = RunConfig::resolve(name, o, file)?;
    if let Some(k) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| Failure::Config(e.to_string()))?;
    }
    let outcome = match name {
        "dist" => commands::dist(&cfg)?,
        "beta" => commands::beta(&cfg)?,
        "verify" => commands::verify(&cfg)?,
        "quotient" => commands::quotient(&cfg)?,
        _ => commands::hconcavity(&cfg)?,
    };
    output::emit(&cfg, &output::render(&cfg, &outcome)?)?;
    match outcome.exit {
        Some(f) => Err(f),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("subhardy: {f}");
            ExitCode::from(f.code())
        }
    }
}
