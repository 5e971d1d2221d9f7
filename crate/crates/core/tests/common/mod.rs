//! Test-only oracles, independent of the library's evaluation paths.

#![allow(dead_code)]

use num_complex::Complex64;
use qgraph::graph_model::ScalingChain;

/// SplitMix64, enough for reproducible sample points.
pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Right-wall value of the wave function built from plane waves
/// `A e^{iκx} + B e^{-iκx}` in every region, matched for continuity of ψ and
/// ψ' at each interface and started with ψ = 0, ψ'/k = 1 at the left wall.
pub fn plane_wave_secular(chain: &ScalingChain, k: f64) -> Complex64 {
    let i = Complex64::i();
    let regions = chain.regions();
    let beta0 = regions[0].beta();
    // A + B = 0, iβ(A − B) = 1
    let mut a = 1.0 / (2.0 * i * beta0);
    let mut b = -a;
    for (idx, region) in regions.iter().enumerate() {
        let beta = region.beta();
        let theta = beta * region.length * k;
        let (ea, eb) = (a * (i * theta).exp(), b * (-i * theta).exp());
        if idx + 1 == regions.len() {
            return ea + eb;
        }
        // match ψ and ψ'/k into the next region's local coordinate
        let next = regions[idx + 1].beta();
        let psi = ea + eb;
        let dpsi = i * beta * (ea - eb);
        a = 0.5 * (psi + dpsi / (i * next));
        b = 0.5 * (psi - dpsi / (i * next));
    }
    unreachable!()
}

/// Number of binary Lyndon words of length q, `(1/q) Σ_{d|q} μ(d) 2^{q/d}`,
/// with μ from a direct factorization.
pub fn mobius_necklaces(q: u64) -> u128 {
    fn mu(mut n: u64) -> i128 {
        let mut r = 1;
        let mut p = 2;
        while p * p <= n {
            if n.is_multiple_of(p) {
                n /= p;
                if n.is_multiple_of(p) {
                    return 0;
                }
                r = -r;
            }
            p += 1;
        }
        if n > 1 {
            -r
        } else {
            r
        }
    }
    let s: i128 = (1..=q)
        .filter(|d| q.is_multiple_of(*d))
        .map(|d| mu(d) * (1i128 << (q / d)))
        .sum();
    (s / q as i128) as u128
}
