//! Scaling step-chain quantum graphs and their secular trigonometric
//! polynomials.
//!
//! A chain is a sequence of regions on a line with hard walls at both ends.
//! Inside region `i` the potential scales with energy, `U = λᵢ k²`, so the
//! local wave number is `βᵢ k` with `βᵢ = √(1 − λᵢ)` and the region
//! contributes the action length `Sᵢ = βᵢ ℓᵢ`.
//!
//! The secular function is the wave function at the right wall after
//! propagating `(ψ, ψ'/k) = (0, 1)` from the left wall through every region.
//! Each propagation matrix is `cos(Sᵢk) I + sin(Sᵢk) Jᵢ`; expanding the
//! product over `e^{±iSᵢk}` gives a finite sum of phasors, which is folded
//! into the normalized form `cos(S₀k − πγ₀) − Σ aᵢ cos(Sᵢk − πγᵢ)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{TrigPolynomial, TrigTerm};

/// Relative tolerance (in units of the total action) below which two phasor
/// actions are treated as the same frequency.
pub const ACTION_MERGE_TOL: f64 = 1e-12;

/// Largest chain accepted by the symbolic expansion (2^N phasors).
pub const MAX_REGIONS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub length: f64,
    pub lambda: f64,
}

impl Region {
    pub fn new(length: f64, lambda: f64) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "region length must be positive, got {length}"
            )));
        }
        if !(0.0..1.0).contains(&lambda) {
            return Err(Error::InvalidParameter(format!(
                "scaling constant must lie in [0, 1), got {lambda} (λ >= 1 creates turning points)"
            )));
        }
        Ok(Self { length, lambda })
    }

    pub fn beta(&self) -> f64 {
        (1.0 - self.lambda).sqrt()
    }

    /// Reduced action length `β ℓ`.
    pub fn action(&self) -> f64 {
        self.beta() * self.length
    }
}

/// A linear chain of scaling regions between two Dirichlet walls.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingChain {
    regions: Vec<Region>,
}

impl ScalingChain {
    pub fn new(regions: Vec<Region>) -> Result<Self> {
        if regions.is_empty() {
            return Err(Error::DegenerateChain("chain has no regions".into()));
        }
        let regions = regions
            .into_iter()
            .map(|r| Region::new(r.length, r.lambda))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { regions })
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn actions(&self) -> Vec<f64> {
        self.regions.iter().map(Region::action).collect()
    }

    /// Total reduced action `S₀`.
    pub fn total_action(&self) -> f64 {
        self.regions.iter().map(Region::action).sum()
    }
}

/// The scaled step potential on the unit interval: a free region of length
/// `b` followed by a region with scaling constant `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepGraph {
    pub b: f64,
    pub lambda: f64,
    pub beta: f64,
    /// Action of the free bond, `b`.
    pub s1: f64,
    /// Action of the loaded bond, `β (1 − b)`.
    pub s2: f64,
    pub s0: f64,
    /// Reflection coefficient at the step for a wave arriving from the free side.
    pub r: f64,
}

impl StepGraph {
    pub fn new(b: f64, lambda: f64) -> Result<Self> {
        if !(b > 0.0 && b < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "step position b must lie in (0, 1), got {b}"
            )));
        }
        if !(0.0..1.0).contains(&lambda) {
            return Err(Error::InvalidParameter(format!(
                "scaling constant must lie in [0, 1), got {lambda} (λ >= 1 creates turning points)"
            )));
        }
        let beta = (1.0 - lambda).sqrt();
        let s1 = b;
        let s2 = beta * (1.0 - b);
        Ok(Self {
            b,
            lambda,
            beta,
            s1,
            s2,
            s0: s1 + s2,
            r: (1.0 - beta) / (1.0 + beta),
        })
    }

    pub fn to_chain(&self) -> ScalingChain {
        ScalingChain {
            regions: vec![
                Region {
                    length: self.b,
                    lambda: 0.0,
                },
                Region {
                    length: 1.0 - self.b,
                    lambda: self.lambda,
                },
            ],
        }
    }

    pub fn trig_polynomial(&self) -> Result<TrigPolynomial> {
        chain_to_trig_polynomial(&self.to_chain())
    }
}

pub fn build_step_graph(b: f64, lambda: f64) -> Result<StepGraph> {
    StepGraph::new(b, lambda)
}

/// One `c e^{iωk}` term of the symbolic expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phasor {
    pub action: f64,
    pub coeff: Complex64,
}

fn merge_phasors(mut terms: Vec<Phasor>, tol: f64) -> Vec<Phasor> {
    terms.sort_by(|a, b| a.action.total_cmp(&b.action));
    let mut out: Vec<Phasor> = Vec::with_capacity(terms.len());
    for t in terms {
        match out.last_mut() {
            Some(last) if (t.action - last.action).abs() <= tol => last.coeff += t.coeff,
            _ => out.push(t),
        }
    }
    out
}

/// Multiplies a phasor sum by `cos(Sk)` (`sine = false`) or `sin(Sk)`.
fn shift(terms: &[Phasor], action: f64, scale: Complex64, sine: bool, out: &mut Vec<Phasor>) {
    // cos = (e^{+} + e^{-})/2, sin = (e^{+} - e^{-})/(2i)
    let (up, down) = if sine {
        (Complex64::new(0.0, -0.5), Complex64::new(0.0, 0.5))
    } else {
        (Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0))
    };
    for t in terms {
        let c = t.coeff * scale;
        out.push(Phasor {
            action: t.action + action,
            coeff: c * up,
        });
        out.push(Phasor {
            action: t.action - action,
            coeff: c * down,
        });
    }
}

/// Expands the right-wall wave function into phasors `Σ c e^{iωk}`.
pub fn expand_secular_phasors(chain: &ScalingChain) -> Result<Vec<Phasor>> {
    let n = chain.regions.len();
    if n > MAX_REGIONS {
        return Err(Error::InvalidParameter(format!(
            "chain has {n} regions; the symbolic expansion supports at most {MAX_REGIONS}"
        )));
    }
    let total = chain.total_action();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::DegenerateChain(
            "total action must be positive".into(),
        ));
    }
    let tol = ACTION_MERGE_TOL * total;

    let one = Complex64::new(1.0, 0.0);
    let mut psi: Vec<Phasor> = Vec::new();
    let mut dpsi = vec![Phasor {
        action: 0.0,
        coeff: one,
    }];
    for region in &chain.regions {
        let s = region.action();
        if s.is_nan() || s <= 0.0 {
            return Err(Error::DegenerateChain(format!(
                "region of length {} has zero action",
                region.length
            )));
        }
        let beta = region.beta();
        let mut next_psi = Vec::with_capacity(2 * (psi.len() + dpsi.len()));
        shift(&psi, s, one, false, &mut next_psi);
        shift(
            &dpsi,
            s,
            Complex64::new(1.0 / beta, 0.0),
            true,
            &mut next_psi,
        );
        let mut next_dpsi = Vec::with_capacity(2 * (psi.len() + dpsi.len()));
        shift(&psi, s, Complex64::new(-beta, 0.0), true, &mut next_dpsi);
        shift(&dpsi, s, one, false, &mut next_dpsi);
        psi = merge_phasors(next_psi, tol);
        dpsi = merge_phasors(next_dpsi, tol);
    }
    Ok(psi)
}

/// Phase offset (units of π) of `2 Re(c e^{iωk}) = 2|c| cos(ωk + arg c)`.
///
/// The expansion only ever produces purely imaginary coefficients, so the
/// offset is snapped to exactly ±1/2 whenever the real part is negligible.
fn phase_of(c: Complex64) -> f64 {
    let mag = c.norm();
    if mag == 0.0 {
        return 0.5;
    }
    if c.re.abs() <= 1e-14 * mag {
        return if c.im > 0.0 { 0.5 } else { -0.5 };
    }
    c.arg() / std::f64::consts::PI
}

/// Wraps a phase in units of π into `(-1, 1]`.
fn wrap_phase(g: f64) -> f64 {
    let w = g - 2.0 * (g * 0.5).round();
    if w <= -1.0 {
        w + 2.0
    } else {
        w
    }
}

/// Converts a chain into its normalized secular trigonometric polynomial.
pub fn chain_to_trig_polynomial(chain: &ScalingChain) -> Result<TrigPolynomial> {
    let total = chain.total_action();
    let tol = ACTION_MERGE_TOL * total;
    let phasors = expand_secular_phasors(chain)?;

    // Fold ±ω pairs: c_ω e^{iωk} + c_{-ω} e^{-iωk} = 2 Re(c̃ e^{iωk}),
    // c̃ = (c_ω + conj(c_{-ω}))/2.
    let mirrored = phasors
        .iter()
        .map(|p| {
            let c = if p.action < 0.0 {
                p.coeff.conj()
            } else {
                p.coeff
            };
            Phasor {
                action: p.action.abs(),
                coeff: c * 0.5,
            }
        })
        .collect();
    let folded: Vec<(f64, Complex64)> = merge_phasors(mirrored, tol)
        .into_iter()
        .map(|p| (p.action, p.coeff))
        .collect();

    let (lead_action, lead) = *folded
        .last()
        .ok_or_else(|| Error::DegenerateChain("empty expansion".into()))?;
    let lead_amp = 2.0 * lead.norm();
    if lead_amp.is_nan() || lead_amp <= 0.0 || (lead_action - total).abs() > tol {
        return Err(Error::DegenerateChain(
            "leading phasor does not carry the total action".into(),
        ));
    }
    // 2|c| cos(ωk + arg c)  =>  γ₀ = -arg(c)/π
    let gamma0 = wrap_phase(-phase_of(lead));

    let mut terms = Vec::with_capacity(folded.len().saturating_sub(1));
    for &(w, c) in &folded[..folded.len() - 1] {
        let amp = 2.0 * c.norm() / lead_amp;
        if w <= tol {
            // constant part: ω = 0 contributes 2 Re(c̃)
            let constant = 2.0 * c.re / lead_amp;
            if constant.abs() > 1e-14 {
                terms.push(TrigTerm {
                    amplitude: constant.abs(),
                    action: 0.0,
                    phase: if constant > 0.0 { 1.0 } else { 0.0 },
                });
            }
            continue;
        }
        // -t cos(ωk + ψ) = t cos(ωk - π(-ψ/π - 1))
        let gamma = wrap_phase(-phase_of(c) - 1.0);
        terms.push(TrigTerm {
            amplitude: amp,
            action: w,
            phase: gamma,
        });
    }
    TrigPolynomial::new(total, gamma0, terms)
}
