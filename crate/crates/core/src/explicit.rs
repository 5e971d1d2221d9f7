//! Explicit periodic-orbit expansion of individual eigenvalues of the step
//! graph, and the convergence study built on it.
//!
//! ```text
//! kₙ = πn/S₀ − (2/π) Σ_p (1/S_p) Σ_ν (A_p^ν/ν²) sin(πνω_p/2) sin(πνω_p n)
//! ```
//!
//! The orbit sum converges only conditionally, so the truncation rule and the
//! summation order are part of the result. Contributions are collected in
//! "length shells": a pair `(p, ν)` belongs to shell `ν·q_p` under
//! [`Truncation::TotalLength`] or to shell `q_p` under
//! [`Truncation::PrimeLength`]. The estimate for cutoff `q` is the sum of
//! shells `1..=q`. Within a shell, terms arrive in ascending prime length,
//! lexicographic word order (or class order), then ascending `ν`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph_model::StepGraph;
use crate::numerics::{half_turns_mod2, sin_pi, CompensatedSum};
use crate::orbits::{
    class_amplitude, orbit_classes_filtered, orbit_stats, LyndonOfLength, DEFAULT_ENUMERATION_CAP,
};
use crate::spectral::{find_root_in_zone, regularity, RegularityReport, DEFAULT_ROOT_TOL};

/// Which orbit repetitions count as "length ≤ q".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    /// Keep `(p, ν)` when `ν·q_p ≤ q`.
    #[default]
    TotalLength,
    /// Keep every repetition of each prime orbit with `q_p ≤ q`.
    PrimeLength,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExpansionConfig {
    pub q_max: usize,
    pub nu_max: u32,
    /// Stop the repetition sum once `weight·|A_p|^ν/ν²` drops below this,
    /// where `weight` is the class multiplicity (1 for a single orbit).
    pub nu_tail_tol: f64,
    pub use_grouped: bool,
    pub truncation: Truncation,
    pub enumeration_cap: usize,
}

impl Default for ExpansionConfig {
    fn default() -> Self {
        Self {
            q_max: 20,
            nu_max: 50,
            nu_tail_tol: 1e-18,
            use_grouped: false,
            truncation: Truncation::TotalLength,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

impl ExpansionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.q_max == 0 {
            return Err(Error::InvalidParameter("q_max must be at least 1".into()));
        }
        if self.nu_max == 0 {
            return Err(Error::InvalidParameter("nu_max must be at least 1".into()));
        }
        if self.nu_tail_tol.is_nan() || self.nu_tail_tol < 0.0 {
            return Err(Error::InvalidParameter(
                "nu_tail_tol must be nonnegative".into(),
            ));
        }
        Ok(())
    }

    fn check_path(&self, q_max: usize) -> Result<()> {
        if !self.use_grouped && q_max > self.enumeration_cap.min(63) {
            return Err(Error::EnumerationCap {
                q_max,
                cap: self.enumeration_cap,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenvalueRecord {
    pub n: u64,
    pub q: usize,
    pub k_explicit: f64,
    pub k_oracle: f64,
    pub eps: f64,
}

/// Shell sums for each requested index: `sums[i][m - 1]` is shell `m` for `ns[i]`.
#[derive(Debug, Clone)]
pub struct ShellSums {
    pub ns: Vec<u64>,
    pub sums: Vec<Vec<CompensatedSum>>,
}

impl ShellSums {
    /// Explicit estimate for `ns[idx]` with all shells up to `q`.
    pub fn estimate(&self, graph: &StepGraph, idx: usize, q: usize) -> f64 {
        let n = self.ns[idx];
        let mut total = CompensatedSum::new();
        for shell in &self.sums[idx][..q] {
            total.merge(shell);
        }
        PI * n as f64 / graph.s0 - 2.0 / PI * total.value()
    }
}

/// One orbit (or orbit class) as the expansion sees it.
#[derive(Debug, Clone, Copy)]
struct OrbitTerm {
    q: usize,
    n1: u32,
    n2: u32,
    amplitude: f64,
    weight: f64,
}

struct Accumulator<'a> {
    graph: &'a StepGraph,
    cfg: &'a ExpansionConfig,
    ns: &'a [u64],
    q_max: usize,
    w1: f64,
    w2: f64,
    sums: Vec<Vec<CompensatedSum>>,
}

impl<'a> Accumulator<'a> {
    fn new(graph: &'a StepGraph, cfg: &'a ExpansionConfig, ns: &'a [u64], q_max: usize) -> Self {
        Self {
            graph,
            cfg,
            ns,
            q_max,
            w1: graph.s1 / graph.s0,
            w2: graph.s2 / graph.s0,
            sums: vec![vec![CompensatedSum::new(); q_max]; ns.len()],
        }
    }

    fn add(&mut self, t: OrbitTerm) {
        if t.amplitude == 0.0 || t.weight == 0.0 {
            return;
        }
        let nu_limit = match self.cfg.truncation {
            Truncation::TotalLength => (self.q_max / t.q).min(self.cfg.nu_max as usize),
            Truncation::PrimeLength => self.cfg.nu_max as usize,
        };
        let action = 2.0 * (t.n1 as f64 * self.graph.s1 + t.n2 as f64 * self.graph.s2);
        let (n1, n2) = (t.n1 as f64, t.n2 as f64);
        let mut power = 1.0;
        for nu in 1..=nu_limit {
            power *= t.amplitude;
            let nu_f = nu as f64;
            let magnitude = t.weight * power.abs() / (nu_f * nu_f);
            if magnitude < self.cfg.nu_tail_tol {
                break;
            }
            let shell = match self.cfg.truncation {
                Truncation::TotalLength => nu * t.q,
                Truncation::PrimeLength => t.q,
            };
            // ω_p/2 = n₁w₁ + n₂w₂ in half turns
            let half = half_turns_mod2(nu_f * n1, self.w1) + half_turns_mod2(nu_f * n2, self.w2);
            let first = sin_pi(half);
            if first == 0.0 {
                continue;
            }
            let coeff = t.weight * power / (nu_f * nu_f) * first / action;
            for (i, &n) in self.ns.iter().enumerate() {
                let m = 2.0 * nu_f * n as f64;
                let phase = half_turns_mod2(m * n1, self.w1) + half_turns_mod2(m * n2, self.w2);
                self.sums[i][shell - 1].add(coeff * sin_pi(phase));
            }
        }
    }
}

fn shells_for_length(
    graph: &StepGraph,
    cfg: &ExpansionConfig,
    ns: &[u64],
    q_max: usize,
    q: usize,
) -> Vec<Vec<CompensatedSum>> {
    let mut acc = Accumulator::new(graph, cfg, ns, q_max);
    if cfg.use_grouped {
        for c in orbit_classes_filtered(q as u32, graph, |a| a != 0.0) {
            acc.add(OrbitTerm {
                q,
                n1: c.n1,
                n2: c.n2,
                amplitude: class_amplitude(graph.r, c.n1, c.n2, c.j),
                weight: c.multiplicity_f64(),
            });
        }
    } else {
        for w in LyndonOfLength::new(q) {
            let o = orbit_stats(&w, graph);
            acc.add(OrbitTerm {
                q,
                n1: o.n1,
                n2: o.n2,
                amplitude: o.amplitude,
                weight: 1.0,
            });
        }
    }
    acc.sums
}

/// Per-shell orbit sums for every `n` in `ns`, for shells `1..=q_max`.
///
/// Prime lengths are processed in parallel and merged in ascending order, so
/// the result does not depend on the thread count.
pub fn shell_sums(
    graph: &StepGraph,
    ns: &[u64],
    q_max: usize,
    cfg: &ExpansionConfig,
) -> Result<ShellSums> {
    cfg.check_path(q_max)?;
    let partials: Vec<Vec<Vec<CompensatedSum>>> = (1..=q_max)
        .into_par_iter()
        .map(|q| shells_for_length(graph, cfg, ns, q_max, q))
        .collect();
    let mut sums = vec![vec![CompensatedSum::new(); q_max]; ns.len()];
    for partial in &partials {
        for (dst, src) in sums.iter_mut().zip(partial) {
            for (d, s) in dst.iter_mut().zip(src) {
                if *s != CompensatedSum::default() {
                    d.merge(s);
                }
            }
        }
    }
    Ok(ShellSums {
        ns: ns.to_vec(),
        sums,
    })
}

fn require_regular(graph: &StepGraph) -> Result<RegularityReport> {
    let report = regularity(&graph.trig_polynomial()?);
    if !report.regular {
        return Err(Error::NotRegular {
            alpha: report.alpha,
        });
    }
    Ok(report)
}

/// Explicit estimate of the `n`-th eigenvalue with orbits up to `cfg.q_max`.
pub fn explicit_eigenvalue(graph: &StepGraph, n: u64, cfg: &ExpansionConfig) -> Result<f64> {
    cfg.validate()?;
    if n == 0 {
        return Err(Error::InvalidParameter("root index starts at 1".into()));
    }
    require_regular(graph)?;
    let sums = shell_sums(graph, &[n], cfg.q_max, cfg)?;
    Ok(sums.estimate(graph, 0, cfg.q_max))
}

/// Bisection oracle for the `n`-th eigenvalue.
pub fn oracle_eigenvalue(graph: &StepGraph, n: u64, tol: f64) -> Result<f64> {
    let trig = graph.trig_polynomial()?;
    let report = regularity(&trig);
    find_root_in_zone(&trig, &report, n, tol)
}

/// Relative errors of the explicit estimate for every `(n, q)`, n-major.
///
/// `q = 0` yields the bare mean-level term `πn/S₀`.
pub fn convergence_scan(
    graph: &StepGraph,
    n_list: &[u64],
    q_list: &[usize],
    cfg: &ExpansionConfig,
) -> Result<Vec<EigenvalueRecord>> {
    convergence_scan_with_tol(graph, n_list, q_list, cfg, DEFAULT_ROOT_TOL)
}

pub fn convergence_scan_with_tol(
    graph: &StepGraph,
    n_list: &[u64],
    q_list: &[usize],
    cfg: &ExpansionConfig,
    root_tol: f64,
) -> Result<Vec<EigenvalueRecord>> {
    if n_list.is_empty() || q_list.is_empty() {
        return Err(Error::InvalidParameter(
            "n and q lists must be nonempty".into(),
        ));
    }
    if n_list.contains(&0) {
        return Err(Error::InvalidParameter("root index starts at 1".into()));
    }
    let mut probe = *cfg;
    probe.q_max = probe.q_max.max(1);
    probe.validate()?;
    require_regular(graph)?;
    let q_top = q_list.iter().copied().max().unwrap_or(0);
    let oracles = n_list
        .par_iter()
        .map(|&n| oracle_eigenvalue(graph, n, root_tol))
        .collect::<Result<Vec<f64>>>()?;
    let sums = if q_top > 0 {
        Some(shell_sums(graph, n_list, q_top, cfg)?)
    } else {
        None
    };
    let mut records = Vec::with_capacity(n_list.len() * q_list.len());
    for (i, &n) in n_list.iter().enumerate() {
        for &q in q_list {
            let k_explicit = match &sums {
                Some(s) => s.estimate(graph, i, q),
                None => PI * n as f64 / graph.s0,
            };
            let k_oracle = oracles[i];
            records.push(EigenvalueRecord {
                n,
                q,
                k_explicit,
                k_oracle,
                eps: (k_explicit - k_oracle).abs() / k_oracle,
            });
        }
    }
    Ok(records)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

pub const MIN_FIT_POINTS: usize = 10;

/// Least-squares slope of `ln ε` against `ln q` over records with
/// `q_lo ≤ q ≤ q_hi`.
pub fn power_law_fit(
    records: &[EigenvalueRecord],
    q_lo: usize,
    q_hi: usize,
) -> Result<PowerLawFit> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.q >= q_lo && r.q <= q_hi)
        .map(|r| (r.q as f64, r.eps))
        .collect();
    fit_log_log(&pts)
}

pub fn fit_log_log(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData(format!(
            "need at least {MIN_FIT_POINTS} points, got {}",
            points.len()
        )));
    }
    if let Some(&(x, y)) = points.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(Error::InsufficientData(format!(
            "non-positive point ({x}, {y})"
        )));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let len = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / len;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / len;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData(
            "all points share one abscissa".into(),
        ));
    }
    let slope = sxy / sxx;
    Ok(PowerLawFit {
        slope,
        intercept: my - slope * mx,
        points: logs.len(),
    })
}

/// Median of `ε` over records with `q_lo ≤ q ≤ q_hi`.
pub fn window_median(records: &[EigenvalueRecord], q_lo: usize, q_hi: usize) -> Option<f64> {
    let mut v: Vec<f64> = records
        .iter()
        .filter(|r| r.q >= q_lo && r.q <= q_hi)
        .map(|r| r.eps)
        .collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    })
}
