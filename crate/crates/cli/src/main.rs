//! `qgraph`: command-line front end for regular scaling quantum graph
//! experiments.
//!
//! Experiments are described by a JSON config (`--config`); the subcommand
//! picks the task and the remaining flags override individual fields. Without
//! a config the system must be given with `--step B,LAMBDA`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qgraph::explicit::Truncation;
use qgraph::harness::{
    configure_threads, exit_code, run_with_exit_code, ExperimentConfig, OutputFormat, StepSpec,
    SystemSpec, Task, TaskParams, EXIT_INVALID_CONFIG,
};
use qgraph::Error;

#[derive(Debug, Parser)]
#[command(
    name = "qgraph",
    version,
    about = "Explicit periodic-orbit eigenvalues of scaling quantum graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    global: GlobalOpts,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Relative tolerance of the bisection oracle.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Worker threads (results are identical for any count).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Step system shortcut: `B,LAMBDA`.
    #[arg(long, global = true, value_name = "B,LAMBDA")]
    step: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TruncationArg {
    TotalLength,
    PrimeLength,
}

#[derive(Debug, Args, Default)]
struct ExpansionOpts {
    /// Longest orbit included.
    #[arg(long)]
    q_max: Option<usize>,

    /// Repetition cap.
    #[arg(long)]
    nu_max: Option<u32>,

    /// Early stop for the repetition sum.
    #[arg(long)]
    nu_tail_tol: Option<f64>,

    /// Use orbit classes instead of enumerating words.
    #[arg(long)]
    grouped: bool,

    #[arg(long, value_enum)]
    truncation: Option<TruncationArg>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Regularity report: alpha, forbidden-zone width, gamma.
    Regularity,
    /// Eigenvalues from the bracketed root oracle.
    Roots {
        #[arg(long)]
        n_max: Option<u64>,
    },
    /// Prime periodic orbits of the step graph.
    Orbits {
        #[arg(long)]
        q_max: Option<usize>,
        /// Emit orbit classes instead of words.
        #[arg(long)]
        grouped: bool,
    },
    /// Explicit eigenvalue estimates at a single orbit cutoff.
    Solve {
        /// Indices, comma separated.
        #[arg(long, value_delimiter = ',')]
        n: Vec<u64>,
        #[command(flatten)]
        expansion: ExpansionOpts,
    },
    /// Relative-error table over orbit cutoffs.
    Converge {
        #[arg(long, value_delimiter = ',')]
        n: Vec<u64>,
        /// Cutoffs, comma separated; defaults to 1..=q_max.
        #[arg(long, value_delimiter = ',')]
        q: Vec<usize>,
        #[command(flatten)]
        expansion: ExpansionOpts,
    },
}

fn parse_step(text: &str) -> Result<StepSpec, Error> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [b, lambda] = parts.as_slice() else {
        return Err(Error::Config(format!(
            "--step expects B,LAMBDA, got {text:?}"
        )));
    };
    let parse = |s: &str| {
        s.parse::<f64>()
            .map_err(|e| Error::Config(format!("bad number {s:?}: {e}")))
    };
    Ok(StepSpec {
        b: parse(b)?,
        lambda: parse(lambda)?,
    })
}

fn apply_expansion(params: &mut TaskParams, opts: &ExpansionOpts) {
    let e = &mut params.expansion;
    if let Some(q) = opts.q_max {
        e.q_max = q;
    }
    if let Some(nu) = opts.nu_max {
        e.nu_max = nu;
    }
    if let Some(t) = opts.nu_tail_tol {
        e.nu_tail_tol = t;
    }
    if opts.grouped {
        e.use_grouped = true;
    }
    if let Some(t) = opts.truncation {
        e.truncation = match t {
            TruncationArg::TotalLength => Truncation::TotalLength,
            TruncationArg::PrimeLength => Truncation::PrimeLength,
        };
    }
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let g = &cli.global;
    let task = match cli.command {
        Command::Regularity => Task::Regularity,
        Command::Roots { .. } => Task::Roots,
        Command::Orbits { .. } => Task::Orbits,
        Command::Solve { .. } => Task::Solve,
        Command::Converge { .. } => Task::Converge,
    };
    let mut cfg = match (&g.config, &g.step) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(_)) => ExperimentConfig {
            system: SystemSpec::Step(StepSpec {
                b: 0.0,
                lambda: 0.0,
            }),
            task,
            params: TaskParams::default(),
            output: None,
            format: OutputFormat::Csv,
        },
        (None, None) => {
            return Err(Error::Config(
                "either --config or --step is required".into(),
            ))
        }
    };
    cfg.task = task;
    if let Some(step) = &g.step {
        cfg.system = SystemSpec::Step(parse_step(step)?);
    }
    if let Some(out) = &g.out {
        cfg.output = Some(out.clone());
    }
    if let Some(f) = g.format {
        cfg.format = match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        };
    }
    if let Some(tol) = g.tol {
        cfg.params.tol = tol;
    }
    match &cli.command {
        Command::Regularity => {}
        Command::Roots { n_max } => {
            if let Some(n) = n_max {
                cfg.params.n_max = *n;
            }
        }
        Command::Orbits { q_max, grouped } => {
            if let Some(q) = q_max {
                cfg.params.expansion.q_max = *q;
            }
            cfg.params.grouped |= grouped;
        }
        Command::Solve { n, expansion } => {
            if !n.is_empty() {
                cfg.params.n_list = n.clone();
            }
            apply_expansion(&mut cfg.params, expansion);
        }
        Command::Converge { n, q, expansion } => {
            if !n.is_empty() {
                cfg.params.n_list = n.clone();
            }
            if !q.is_empty() {
                cfg.params.q_list = Some(q.clone());
            }
            apply_expansion(&mut cfg.params, expansion);
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match build_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e) as u8);
        }
    };
    if let Some(threads) = cli.global.threads {
        if let Err(e) = configure_threads(threads) {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID_CONFIG as u8);
        }
    }
    ExitCode::from(run_with_exit_code(&cfg) as u8)
}
