//! Experiment configuration and reproducible CSV/JSON emission.
//!
//! An experiment is a single JSON document naming the system, the task and
//! its parameters. Unknown keys are rejected before anything is computed.
//! Floats are written with 17 significant digits so tables round-trip
//! losslessly and identical configs give byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::explicit::{convergence_scan_with_tol, EigenvalueRecord, ExpansionConfig};
use crate::graph_model::{chain_to_trig_polynomial, Region, ScalingChain, StepGraph};
use crate::orbits::{lyndon_words_with_cap, orbit_classes, orbit_stats};
use crate::spectral::{
    find_root_in_zone, regularity, RegularityReport, TrigPolynomial, DEFAULT_ROOT_TOL,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID_CONFIG: i32 = 2;
pub const EXIT_NOT_REGULAR: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

/// Maps a library error onto the process exit-code contract.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidParameter(_)
        | Error::DegenerateChain(_)
        | Error::EnumerationCap { .. }
        | Error::Config(_)
        | Error::Json(_) => EXIT_INVALID_CONFIG,
        Error::NotRegular { .. } | Error::GammaMismatch { .. } => EXIT_NOT_REGULAR,
        Error::NoSignChange { .. }
        | Error::RootOutsideZone { .. }
        | Error::ScanExhausted { .. }
        | Error::InsufficientData(_) => EXIT_NUMERICAL,
        Error::Io(_) => EXIT_IO,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepSpec {
    pub b: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemSpec {
    Step(StepSpec),
    Regions(Vec<Region>),
    Trig(TrigPolynomial),
}

impl SystemSpec {
    pub fn trig_polynomial(&self) -> Result<TrigPolynomial> {
        match self {
            SystemSpec::Step(s) => StepGraph::new(s.b, s.lambda)?.trig_polynomial(),
            SystemSpec::Regions(r) => chain_to_trig_polynomial(&ScalingChain::new(r.clone())?),
            SystemSpec::Trig(t) => Ok(t.clone()),
        }
    }

    pub fn step_graph(&self) -> Result<StepGraph> {
        match self {
            SystemSpec::Step(s) => StepGraph::new(s.b, s.lambda),
            _ => Err(Error::Config(
                "orbit expansion is only available for the step system".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Regularity,
    Roots,
    Orbits,
    Solve,
    Converge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TaskParams {
    /// Eigenvalue indices for `solve` and `converge`.
    pub n_list: Vec<u64>,
    /// Highest index for `roots`.
    pub n_max: u64,
    /// Orbit cutoffs for `converge`; defaults to `1..=expansion.q_max`.
    pub q_list: Option<Vec<usize>>,
    /// Root tolerance (relative) for the bisection oracle.
    pub tol: f64,
    /// `orbits` emits class rows instead of words.
    pub grouped: bool,
    pub expansion: ExpansionConfig,
}

impl Default for TaskParams {
    fn default() -> Self {
        Self {
            n_list: vec![1, 10, 100],
            n_max: 10,
            q_list: None,
            tol: DEFAULT_ROOT_TOL,
            grouped: false,
            expansion: ExpansionConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: SystemSpec,
    pub task: Task,
    #[serde(default)]
    pub params: TaskParams,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.params;
        if !(p.tol > 0.0 && p.tol < 1.0) {
            return Err(Error::Config(format!(
                "tol must lie in (0, 1), got {}",
                p.tol
            )));
        }
        p.expansion
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        if p.n_list.contains(&0) {
            return Err(Error::Config("n_list entries start at 1".into()));
        }
        match self.task {
            Task::Solve | Task::Converge if p.n_list.is_empty() => {
                return Err(Error::Config("n_list must not be empty".into()))
            }
            Task::Roots if p.n_max == 0 => {
                return Err(Error::Config("n_max must be at least 1".into()))
            }
            Task::Converge if p.q_list.as_ref().is_some_and(|q| q.is_empty()) => {
                return Err(Error::Config("q_list must not be empty".into()))
            }
            _ => {}
        }
        Ok(())
    }

    fn q_list(&self) -> Vec<usize> {
        self.params
            .q_list
            .clone()
            .unwrap_or_else(|| (1..=self.params.expansion.q_max).collect())
    }
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootRow {
    pub n: u64,
    pub sep_lower: f64,
    pub sep_upper: f64,
    pub k_n: f64,
    /// Distance from the root to the nearer edge of its allowed zone.
    pub zone_margin: f64,
}

/// Result of a task, ready to be rendered.
#[derive(Debug, Clone, PartialEq)]
pub enum Artifact {
    Regularity(RegularityReport),
    Roots(Vec<RootRow>),
    Orbits(Vec<crate::orbits::PrimeOrbit>),
    OrbitClasses(Vec<crate::orbits::OrbitClass>),
    Records(Vec<EigenvalueRecord>),
}

fn csv_records(records: &[EigenvalueRecord]) -> String {
    let mut s = String::from("n,q,k_explicit,k_oracle,eps\n");
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.n,
            r.q,
            fmt_f64(r.k_explicit),
            fmt_f64(r.k_oracle),
            fmt_f64(r.eps)
        );
    }
    s
}

impl Artifact {
    pub fn to_csv(&self) -> String {
        match self {
            Artifact::Regularity(r) => {
                let u = r.u.map(fmt_f64).unwrap_or_default();
                format!(
                    "alpha,regular,u,gamma,mu,s0\n{},{},{},{},{},{}\n",
                    fmt_f64(r.alpha),
                    r.regular,
                    u,
                    fmt_f64(r.gamma),
                    r.mu,
                    fmt_f64(r.s0)
                )
            }
            Artifact::Roots(rows) => {
                let mut s = String::from("n,sep_lower,sep_upper,k_n,zone_margin\n");
                for r in rows {
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{}",
                        r.n,
                        fmt_f64(r.sep_lower),
                        fmt_f64(r.sep_upper),
                        fmt_f64(r.k_n),
                        fmt_f64(r.zone_margin)
                    );
                }
                s
            }
            Artifact::Orbits(orbits) => {
                let mut s = String::from("word,q,n1,n2,sigma,tau,chi,action,amplitude\n");
                for o in orbits {
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{},{},{},{},{}",
                        o.word,
                        o.q,
                        o.n1,
                        o.n2,
                        o.sigma,
                        o.tau,
                        o.chi,
                        fmt_f64(o.action),
                        fmt_f64(o.amplitude)
                    );
                }
                s
            }
            Artifact::OrbitClasses(classes) => {
                let mut s = String::from("q,n1,n2,j,multiplicity,action,omega,amplitude\n");
                for c in classes {
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{},{},{},{}",
                        c.q,
                        c.n1,
                        c.n2,
                        c.j,
                        c.multiplicity,
                        fmt_f64(c.action),
                        fmt_f64(c.omega),
                        fmt_f64(c.amplitude)
                    );
                }
                s
            }
            Artifact::Records(records) => csv_records(records),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = match self {
            Artifact::Regularity(r) => serde_json::to_string_pretty(r)?,
            Artifact::Roots(r) => serde_json::to_string_pretty(r)?,
            Artifact::Orbits(o) => serde_json::to_string_pretty(o)?,
            Artifact::OrbitClasses(c) => serde_json::to_string_pretty(c)?,
            Artifact::Records(r) => serde_json::to_string_pretty(r)?,
        };
        s.push('\n');
        Ok(s)
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Csv => Ok(self.to_csv()),
            OutputFormat::Json => self.to_json(),
        }
    }
}

/// Writes the convergence table (n-major, q-minor). Nothing is written for an
/// empty table.
pub fn emit_fig4_table(records: &[EigenvalueRecord], path: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(Error::InsufficientData("no records to write".into()));
    }
    let mut sorted = records.to_vec();
    sorted.sort_by_key(|r| (r.n, r.q));
    fs::write(path, csv_records(&sorted))?;
    Ok(())
}

fn roots_table(trig: &TrigPolynomial, n_max: u64, tol: f64) -> Result<Vec<RootRow>> {
    let report = regularity(trig);
    if !report.regular {
        return Err(Error::NotRegular {
            alpha: report.alpha,
        });
    }
    let u = report.u.unwrap_or(0.0);
    (1..=n_max)
        .map(|n| {
            let zone = report.zone(n)?;
            let k = find_root_in_zone(trig, &report, n, tol)?;
            let margin = (k - zone.lower_separator).min(zone.upper_separator - k) - u;
            Ok(RootRow {
                n,
                sep_lower: zone.lower_separator,
                sep_upper: zone.upper_separator,
                k_n: k,
                zone_margin: margin,
            })
        })
        .collect()
}

/// Sizes the global worker pool. Results do not depend on the thread count.
pub fn configure_threads(threads: usize) -> Result<()> {
    if threads == 0 {
        return Err(Error::Config("thread count must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Config(format!("cannot configure thread pool: {e}")))
}

/// Runs the configured task and returns its artifact without writing it.
pub fn execute(cfg: &ExperimentConfig) -> Result<Artifact> {
    cfg.validate()?;
    let p = &cfg.params;
    match cfg.task {
        Task::Regularity => Ok(Artifact::Regularity(regularity(
            &cfg.system.trig_polynomial()?,
        ))),
        Task::Roots => Ok(Artifact::Roots(roots_table(
            &cfg.system.trig_polynomial()?,
            p.n_max,
            p.tol,
        )?)),
        Task::Orbits => {
            let graph = cfg.system.step_graph()?;
            let q_max = p.expansion.q_max;
            if p.grouped {
                let classes = (1..=q_max as u32)
                    .flat_map(|q| orbit_classes(q, &graph))
                    .collect();
                Ok(Artifact::OrbitClasses(classes))
            } else {
                let words = lyndon_words_with_cap(q_max, p.expansion.enumeration_cap)?;
                Ok(Artifact::Orbits(
                    words.map(|w| orbit_stats(&w, &graph)).collect(),
                ))
            }
        }
        Task::Solve | Task::Converge => {
            let report = regularity(&cfg.system.trig_polynomial()?);
            if !report.regular {
                return Err(Error::NotRegular {
                    alpha: report.alpha,
                });
            }
            let graph = cfg.system.step_graph()?;
            let q_list = match cfg.task {
                Task::Solve => vec![p.expansion.q_max],
                _ => cfg.q_list(),
            };
            let mut expansion = p.expansion;
            expansion.q_max = q_list.iter().copied().max().unwrap_or(1).max(1);
            let records = convergence_scan_with_tol(&graph, &p.n_list, &q_list, &expansion, p.tol)?;
            Ok(Artifact::Records(records))
        }
    }
}

/// Runs the task and writes the artifact to `cfg.output` (stdout when unset).
pub fn run(cfg: &ExperimentConfig) -> Result<()> {
    let artifact = execute(cfg)?;
    let text = artifact.render(cfg.format)?;
    match &cfg.output {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// [`run`] with the exit-code contract applied; diagnostics go to stderr.
pub fn run_with_exit_code(cfg: &ExperimentConfig) -> i32 {
    match run(cfg) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
