//! Evaluation of the secular trigonometric polynomial, regularity analysis,
//! separators and allowed zones, and the bracketed root oracle.
//!
//! For a regular polynomial (`α = Σ|aᵢ| < 1`) the separators
//! `k̄ₙ = π(n + γ)/S₀` are never roots, every root stays at least
//! `u = arccos(α)/S₀` away from them, and exactly one root lies in each
//! allowed zone `Zₙ = [k̄ₙ₋₁ + u, k̄ₙ − u]`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{reduced_angle, CompensatedSum};

/// Iteration cap for the bisection oracle.
pub const MAX_BISECTION_STEPS: usize = 100;

pub const DEFAULT_ROOT_TOL: f64 = 1e-12;

/// Grid points per mean level spacing used by the dense sign scans.
pub const SCAN_POINTS_PER_SPACING: f64 = 1000.0;

/// One secondary term `a cos(S k − π γ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigTerm {
    pub amplitude: f64,
    pub action: f64,
    /// Phase offset in units of π.
    pub phase: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrigPolynomialRepr {
    s0: f64,
    gamma0: f64,
    #[serde(default)]
    terms: Vec<TrigTerm>,
}

/// `cos(S₀k − πγ₀) − Σᵢ aᵢ cos(Sᵢk − πγᵢ)` with every `Sᵢ < S₀`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TrigPolynomialRepr")]
pub struct TrigPolynomial {
    s0: f64,
    gamma0: f64,
    terms: Vec<TrigTerm>,
}

impl TryFrom<TrigPolynomialRepr> for TrigPolynomial {
    type Error = Error;

    fn try_from(r: TrigPolynomialRepr) -> Result<Self> {
        TrigPolynomial::new(r.s0, r.gamma0, r.terms)
    }
}

impl TrigPolynomial {
    pub fn new(s0: f64, gamma0: f64, terms: Vec<TrigTerm>) -> Result<Self> {
        if !(s0.is_finite() && s0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "S0 must be positive, got {s0}"
            )));
        }
        if !gamma0.is_finite() {
            return Err(Error::InvalidParameter(
                "leading phase must be finite".into(),
            ));
        }
        for t in &terms {
            if !(t.amplitude.is_finite() && t.phase.is_finite()) {
                return Err(Error::InvalidParameter(format!("non-finite term {t:?}")));
            }
            if !(t.action >= 0.0 && t.action < s0) {
                return Err(Error::InvalidParameter(format!(
                    "term action {} must lie in [0, S0 = {s0})",
                    t.action
                )));
            }
        }
        Ok(Self { s0, gamma0, terms })
    }

    pub fn leading_action(&self) -> f64 {
        self.s0
    }

    pub fn leading_phase(&self) -> f64 {
        self.gamma0
    }

    pub fn terms(&self) -> &[TrigTerm] {
        &self.terms
    }

    /// `Φ(k) = Σ aᵢ cos(Sᵢk − πγᵢ)`.
    pub fn phi(&self, k: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.amplitude * (reduced_angle(t.action, k) - PI * t.phase).cos())
            .collect::<CompensatedSum>()
            .value()
    }

    pub fn evaluate(&self, k: f64) -> f64 {
        (reduced_angle(self.s0, k) - PI * self.gamma0).cos() - self.phi(k)
    }

    pub fn alpha(&self) -> f64 {
        self.terms.iter().map(|t| t.amplitude.abs()).sum()
    }
}

pub fn evaluate(trig: &TrigPolynomial, k: f64) -> f64 {
    trig.evaluate(k)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegularityReport {
    pub alpha: f64,
    pub regular: bool,
    /// Forbidden-zone half width `arccos(α)/S₀`; `None` when not regular.
    pub u: Option<f64>,
    /// `γ₀ + μ`.
    pub gamma: f64,
    pub mu: i64,
    pub s0: f64,
}

/// An allowed zone together with the separators bounding its root interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootZone {
    pub n: u64,
    pub lower_separator: f64,
    pub upper_separator: f64,
    pub lo: f64,
    pub hi: f64,
}

impl RegularityReport {
    fn require_zones(&self) -> Result<f64> {
        let u = match self.u {
            Some(u) if self.regular => u,
            _ => return Err(Error::NotRegular { alpha: self.alpha }),
        };
        if self.gamma != 0.5 {
            return Err(Error::GammaMismatch { gamma: self.gamma });
        }
        Ok(u)
    }

    /// `k̄ₙ = π(n + γ)/S₀`.
    pub fn separator(&self, n: u64) -> Result<f64> {
        self.require_zones()?;
        Ok(PI * (n as f64 + self.gamma) / self.s0)
    }

    pub fn zone(&self, n: u64) -> Result<RootZone> {
        let u = self.require_zones()?;
        if n == 0 {
            return Err(Error::InvalidParameter("root index starts at 1".into()));
        }
        let lower = self.separator(n - 1)?;
        let upper = self.separator(n)?;
        Ok(RootZone {
            n,
            lower_separator: lower,
            upper_separator: upper,
            lo: lower + u,
            hi: upper - u,
        })
    }
}

/// Computes `α`, the forbidden-zone width and the resolved `γ`.
///
/// `μ` is fixed by scanning for the first positive root and requiring it to
/// carry index 1. The trivial zero of Dirichlet chains at `k = 0` is not
/// counted.
pub fn regularity(trig: &TrigPolynomial) -> RegularityReport {
    let alpha = trig.alpha();
    let s0 = trig.leading_action();
    let regular = alpha < 1.0;
    let mut report = RegularityReport {
        alpha,
        regular,
        u: None,
        gamma: trig.leading_phase(),
        mu: 0,
        s0,
    };
    if !regular {
        return report;
    }
    report.u = Some(alpha.acos() / s0);
    let spacing = PI / s0;
    if let Ok(k1) = first_positive_root(trig, 4.0 * spacing, spacing / SCAN_POINTS_PER_SPACING) {
        let mu = (k1 * s0 / PI - trig.leading_phase()).floor();
        report.mu = mu as i64;
        report.gamma = trig.leading_phase() + mu;
    }
    report
}

pub fn separator(report: &RegularityReport, n: u64) -> Result<f64> {
    report.separator(n)
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        return lo;
    }
    if f(hi) == 0.0 {
        return hi;
    }
    for _ in 0..MAX_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol * mid.abs() || mid == lo || mid == hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Unique root in the allowed zone `Zₙ`, by bisection to relative `tol`.
///
/// The result is checked against the zone bounds; a root outside them means
/// the regularity assumptions or the coefficients are wrong.
pub fn find_root_in_zone(
    trig: &TrigPolynomial,
    report: &RegularityReport,
    n: u64,
    tol: f64,
) -> Result<f64> {
    let zone = report.zone(n)?;
    // The separators carry |f| >= 1 - α, so the bracket is taken there; the
    // allowed zone itself collapses to a point when α = 0.
    let (a, b) = (zone.lower_separator, zone.upper_separator);
    let (f_a, f_b) = (trig.evaluate(a), trig.evaluate(b));
    if (f_a < 0.0) == (f_b < 0.0) || f_a == 0.0 || f_b == 0.0 {
        return Err(Error::NoSignChange { n, lo: a, hi: b });
    }
    let root = bisect(|k| trig.evaluate(k), a, b, tol);
    let slack = tol * root.abs();
    if !(zone.lo - slack <= root && root <= zone.hi + slack) {
        return Err(Error::RootOutsideZone {
            n,
            root,
            lo: zone.lo,
            hi: zone.hi,
        });
    }
    Ok(root)
}

/// Roots for indices `1..=n_max`, computed zone by zone.
pub fn roots_up_to(
    trig: &TrigPolynomial,
    report: &RegularityReport,
    n_max: u64,
    tol: f64,
) -> Result<Vec<f64>> {
    (1..=n_max)
        .map(|n| find_root_in_zone(trig, report, n, tol))
        .collect()
}

/// Number of positive roots `≤ k`.
pub fn staircase_count(trig: &TrigPolynomial, report: &RegularityReport, k: f64) -> Result<u64> {
    let u = report.require_zones()?;
    let first = report.separator(0)?;
    if k < first {
        return Ok(0);
    }
    let n = ((k * report.s0 / PI - report.gamma).floor() + 1.0).max(1.0) as u64;
    let zone = report.zone(n)?;
    let below = n - 1;
    if k < zone.lo {
        return Ok(below);
    }
    if k >= zone.upper_separator - u {
        return Ok(below + 1);
    }
    let f_k = trig.evaluate(k);
    let f_lo = trig.evaluate(zone.lo);
    let crossed = f_k == 0.0 || f_lo == 0.0 || (f_k < 0.0) != (f_lo < 0.0);
    Ok(below + crossed as u64)
}

/// A bracket `[a, b]` on the scan grid where the sign flips.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignChange {
    pub a: f64,
    pub b: f64,
}

/// Dense sign scan of `(0, k_max]` with the given spacing. Exact zeros on the
/// grid are reported as degenerate brackets.
pub fn sign_changes(trig: &TrigPolynomial, k_max: f64, step: f64) -> Vec<SignChange> {
    let mut out = Vec::new();
    let steps = (k_max / step).ceil() as u64;
    let mut prev_k = step;
    let mut prev = trig.evaluate(prev_k);
    for i in 2..=steps {
        let k = i as f64 * step;
        let v = trig.evaluate(k);
        if v == 0.0 {
            out.push(SignChange { a: k, b: k });
        } else if prev != 0.0 && (v < 0.0) != (prev < 0.0) {
            out.push(SignChange { a: prev_k, b: k });
        }
        prev = v;
        prev_k = k;
    }
    out
}

/// Fallback root finder for any polynomial, regular or not: dense scan plus
/// bisection inside each bracket.
pub fn scan_roots(trig: &TrigPolynomial, k_max: f64, step: f64, tol: f64) -> Vec<f64> {
    sign_changes(trig, k_max, step)
        .into_iter()
        .map(|s| {
            if s.a == s.b {
                s.a
            } else {
                bisect(|k| trig.evaluate(k), s.a, s.b, tol)
            }
        })
        .collect()
}

fn first_positive_root(trig: &TrigPolynomial, k_max: f64, step: f64) -> Result<f64> {
    let change = sign_changes(trig, k_max, step)
        .into_iter()
        .next()
        .ok_or(Error::ScanExhausted { limit: k_max })?;
    Ok(bisect(
        |k| trig.evaluate(k),
        change.a,
        change.b,
        DEFAULT_ROOT_TOL,
    ))
}
