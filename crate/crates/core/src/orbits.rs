//! Prime periodic orbits of the two-bond step graph.
//!
//! An orbit is coded as a cyclic word over `{1, 2}`: each symbol is one round
//! trip on that bond (vertex → wall → vertex). Consecutive equal symbols mean
//! a reflection at the middle vertex, a change of symbol a transmission.
//! Prime orbits are the aperiodic necklaces, represented by their Lyndon
//! words.
//!
//! Every amplitude depends only on `(n₁, n₂, j)`, where `j` is the number of
//! maximal cyclic blocks of each symbol, so orbits of one length can also be
//! handled as [`OrbitClass`] groups with combinatorial multiplicities.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph_model::StepGraph;

/// Longest word the explicit enumeration will produce.
pub const DEFAULT_ENUMERATION_CAP: usize = 28;

/// A binary word, most significant symbol first. Bit 0 is symbol `1`, bit 1
/// is symbol `2`, so numeric order equals lexicographic order within a length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    len: u8,
    bits: u64,
}

impl Word {
    pub fn from_symbols(symbols: &[u8]) -> Result<Self> {
        if symbols.is_empty() || symbols.len() > 63 {
            return Err(Error::InvalidParameter(format!(
                "word length must be in 1..=63, got {}",
                symbols.len()
            )));
        }
        let mut bits = 0u64;
        for &s in symbols {
            bits = (bits << 1)
                | match s {
                    1 => 0,
                    2 => 1,
                    other => {
                        return Err(Error::InvalidParameter(format!("invalid symbol {other}")))
                    }
                };
        }
        Ok(Self {
            len: symbols.len() as u8,
            bits,
        })
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Symbol at position `i` (1 or 2).
    pub fn symbol(&self, i: usize) -> u8 {
        let shift = self.len as usize - 1 - i;
        1 + ((self.bits >> shift) & 1) as u8
    }

    pub fn symbols(&self) -> impl Iterator<Item = u8> + '_ {
        (0..self.len()).map(move |i| self.symbol(i))
    }

    fn rotate(&self, by: usize) -> u64 {
        let n = self.len as u32;
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let by = by as u32 % n;
        if by == 0 {
            return self.bits;
        }
        ((self.bits << by) | (self.bits >> (n - by))) & mask
    }

    /// Strictly smaller than every nontrivial rotation (aperiodic and minimal).
    pub fn is_lyndon(&self) -> bool {
        (1..self.len()).all(|s| self.bits < self.rotate(s))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.symbols() {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let symbols = s
            .bytes()
            .map(|b| match b {
                b'1' => Ok(1),
                b'2' => Ok(2),
                _ => Err(Error::InvalidParameter(format!("invalid word {s:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Word::from_symbols(&symbols)
    }
}

/// Lyndon words of one fixed length in lexicographic order
/// (Fredricksen–Kessler–Maiorana prenecklace walk).
#[derive(Debug, Clone)]
pub struct LyndonOfLength {
    a: Vec<u8>,
    n: usize,
    started: bool,
    done: bool,
}

impl LyndonOfLength {
    pub fn new(n: usize) -> Self {
        assert!((1..=63).contains(&n), "word length must be in 1..=63");
        Self {
            a: vec![0; n + 1],
            n,
            started: false,
            done: false,
        }
    }

    fn current(&self) -> Word {
        let mut bits = 0u64;
        for &s in &self.a[1..] {
            bits = (bits << 1) | s as u64;
        }
        Word {
            len: self.n as u8,
            bits,
        }
    }
}

impl Iterator for LyndonOfLength {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            // 0^n has period 1
            if self.n == 1 {
                return Some(self.current());
            }
        }
        loop {
            let mut i = self.n;
            while i > 0 && self.a[i] == 1 {
                i -= 1;
            }
            if i == 0 {
                self.done = true;
                return None;
            }
            self.a[i] += 1;
            for j in i + 1..=self.n {
                self.a[j] = self.a[j - i];
            }
            if i == self.n {
                return Some(self.current());
            }
        }
    }
}

/// All Lyndon words of lengths `1..=q_max`, ordered by length then
/// lexicographically.
pub fn lyndon_words(q_max: usize) -> Result<impl Iterator<Item = Word>> {
    lyndon_words_with_cap(q_max, DEFAULT_ENUMERATION_CAP)
}

pub fn lyndon_words_with_cap(q_max: usize, cap: usize) -> Result<impl Iterator<Item = Word>> {
    if q_max == 0 {
        return Err(Error::InvalidParameter("q_max must be at least 1".into()));
    }
    if q_max > cap.min(63) {
        return Err(Error::EnumerationCap { q_max, cap });
    }
    Ok((1..=q_max).flat_map(LyndonOfLength::new))
}

/// Möbius function by trial division.
pub fn mobius(mut n: u64) -> i64 {
    assert!(n > 0);
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Number of binary Lyndon words of length `q`: `(1/q) Σ_{d|q} μ(d) 2^{q/d}`.
pub fn necklace_count(q: u32) -> BigUint {
    assert!(q > 0);
    let (mut pos, mut neg) = (BigUint::zero(), BigUint::zero());
    for d in (1..=q as u64).filter(|d| (q as u64).is_multiple_of(*d)) {
        let term = BigUint::one() << (q as u64 / d);
        match mobius(d) {
            1 => pos += term,
            -1 => neg += term,
            _ => {}
        }
    }
    (pos - neg) / BigUint::from(q)
}

/// Signed amplitude `(−1)^χ r^σ (1 − r²)^{τ/2}` for an orbit with symbol
/// counts `(n₁, n₂)` and `j` blocks per symbol.
pub fn class_amplitude(r: f64, n1: u32, n2: u32, j: u32) -> f64 {
    let q = n1 + n2;
    let c22 = n2 - j;
    let sigma = q - 2 * j;
    let sign = if (q + c22).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    sign * r.powi(sigma as i32) * (1.0 - r * r).powi(j as i32)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimeOrbit {
    #[serde(serialize_with = "serialize_display")]
    pub word: Word,
    pub q: u32,
    pub n1: u32,
    pub n2: u32,
    pub c11: u32,
    pub c22: u32,
    pub c12: u32,
    pub c21: u32,
    /// Reflections at the middle vertex.
    pub sigma: u32,
    /// Transmissions through the middle vertex.
    pub tau: u32,
    pub chi: u32,
    pub action: f64,
    pub omega: f64,
    pub amplitude: f64,
}

fn serialize_display<S: serde::Serializer>(w: &Word, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(w)
}

impl PrimeOrbit {
    /// Blocks per symbol, `τ/2`.
    pub fn blocks(&self) -> u32 {
        self.tau / 2
    }
}

pub fn orbit_stats(word: &Word, graph: &StepGraph) -> PrimeOrbit {
    let q = word.len();
    let (mut c11, mut c22, mut c12, mut c21) = (0, 0, 0, 0);
    let mut n1 = 0;
    for i in 0..q {
        let a = word.symbol(i);
        let b = word.symbol((i + 1) % q);
        if a == 1 {
            n1 += 1;
        }
        match (a, b) {
            (1, 1) => c11 += 1,
            (2, 2) => c22 += 1,
            (1, 2) => c12 += 1,
            _ => c21 += 1,
        }
    }
    let q = q as u32;
    let n2 = q - n1;
    let sigma = c11 + c22;
    let tau = c12 + c21;
    let chi = (q + c22) % 2;
    let sign = if chi == 0 { 1.0 } else { -1.0 };
    let amplitude =
        sign * graph.r.powi(sigma as i32) * (1.0 - graph.r * graph.r).powi((tau / 2) as i32);
    let action = 2.0 * (n1 as f64 * graph.s1 + n2 as f64 * graph.s2);
    PrimeOrbit {
        word: *word,
        q,
        n1,
        n2,
        c11,
        c22,
        c12,
        c21,
        sigma,
        tau,
        chi,
        action,
        omega: action / graph.s0,
        amplitude,
    }
}

/// All prime orbits of one length sharing `(n₁, n₂, j)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitClass {
    pub q: u32,
    pub n1: u32,
    pub n2: u32,
    pub j: u32,
    #[serde(serialize_with = "serialize_display_big")]
    pub multiplicity: BigUint,
    pub action: f64,
    pub omega: f64,
    pub amplitude: f64,
}

fn serialize_display_big<S: serde::Serializer>(
    m: &BigUint,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(m)
}

impl OrbitClass {
    pub fn multiplicity_f64(&self) -> f64 {
        self.multiplicity.to_f64().unwrap_or(f64::INFINITY)
    }

    pub fn sigma(&self) -> u32 {
        self.q - 2 * self.j
    }

    pub fn tau(&self) -> u32 {
        2 * self.j
    }

    pub fn chi(&self) -> u32 {
        (self.q + self.n2 - self.j) % 2
    }
}

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Cyclic strings with labeled positions of length `q`, `n1` ones and exactly
/// `j` maximal cyclic blocks of each symbol.
fn cyclic_block_strings(q: u64, n1: u64, j: u64) -> BigUint {
    let n2 = q - n1;
    if j == 0 {
        return if n1 == 0 || n2 == 0 {
            BigUint::one()
        } else {
            BigUint::zero()
        };
    }
    if n1 < j || n2 < j {
        return BigUint::zero();
    }
    binomial(n1 - 1, j - 1) * binomial(n2 - 1, j - 1) * q / j
}

/// Number of prime necklaces of length `q` in class `(n1, j)`.
pub fn class_multiplicity(q: u32, n1: u32, j: u32) -> BigUint {
    let (q, n1, j) = (q as u64, n1 as u64, j as u64);
    let g = gcd(gcd(q, n1), j);
    let (mut pos, mut neg) = (BigUint::zero(), BigUint::zero());
    for d in (1..=g).filter(|d| g.is_multiple_of(*d)) {
        let w = cyclic_block_strings(q / d, n1 / d, j / d);
        match mobius(d) {
            1 => pos += w,
            -1 => neg += w,
            _ => {}
        }
    }
    (pos - neg) / BigUint::from(q)
}

/// Partitions all prime orbits of length `q` into `(n₁, n₂, j)` classes, in
/// ascending `(n₁, j)` order; empty classes are omitted.
pub fn orbit_classes(q: u32, graph: &StepGraph) -> Vec<OrbitClass> {
    orbit_classes_filtered(q, graph, |_| true)
}

/// [`orbit_classes`] restricted to classes whose amplitude passes `keep`;
/// multiplicities of rejected classes are never computed.
pub fn orbit_classes_filtered<F: Fn(f64) -> bool>(
    q: u32,
    graph: &StepGraph,
    keep: F,
) -> Vec<OrbitClass> {
    assert!(q >= 1, "orbit length must be positive");
    let mut out = Vec::new();
    for n1 in 0..=q {
        let n2 = q - n1;
        for j in 0..=n1.min(n2) {
            if !keep(class_amplitude(graph.r, n1, n2, j)) {
                continue;
            }
            let multiplicity = class_multiplicity(q, n1, j);
            if multiplicity.is_zero() {
                continue;
            }
            let action = 2.0 * (n1 as f64 * graph.s1 + n2 as f64 * graph.s2);
            out.push(OrbitClass {
                q,
                n1,
                n2,
                j,
                multiplicity,
                action,
                omega: action / graph.s0,
                amplitude: class_amplitude(graph.r, n1, n2, j),
            });
        }
    }
    out
}
