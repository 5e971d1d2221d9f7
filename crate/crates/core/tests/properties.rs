mod common;

use std::f64::consts::PI;

use common::{plane_wave_secular, SplitMix};
use proptest::prelude::*;
use qgraph::explicit::{
    explicit_eigenvalue, fit_log_log, oracle_eigenvalue, shell_sums, ExpansionConfig, Truncation,
};
use qgraph::graph_model::{build_step_graph, chain_to_trig_polynomial, Region, ScalingChain};
use qgraph::orbits::{lyndon_words, orbit_stats, Word};
use qgraph::spectral::{regularity, sign_changes, DEFAULT_ROOT_TOL};

fn chain_strategy(max_regions: usize) -> impl Strategy<Value = ScalingChain> {
    prop::collection::vec((0.05f64..1.0, 0.0f64..0.95), 1..=max_regions).prop_map(|spec| {
        let regions = spec
            .into_iter()
            .map(|(l, lam)| Region::new(l, lam).unwrap())
            .collect();
        ScalingChain::new(regions).unwrap()
    })
}

fn max_pointwise_mismatch(chain: &ScalingChain, seed: u64) -> f64 {
    let trig = chain_to_trig_polynomial(chain).unwrap();
    let mut rng = SplitMix(seed);
    let ks: Vec<f64> = (0..100).map(|_| rng.uniform(0.0, 50.0)).collect();
    let dets: Vec<f64> = ks
        .iter()
        .map(|&k| plane_wave_secular(chain, k).re)
        .collect();
    let vals: Vec<f64> = ks.iter().map(|&k| trig.evaluate(k)).collect();
    let scale = vals.iter().zip(&dets).map(|(v, d)| v * d).sum::<f64>()
        / dets.iter().map(|d| d * d).sum::<f64>();
    vals.iter()
        .zip(&dets)
        .map(|(v, d)| (v - scale * d).abs() / v.abs().max(1.0))
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn chain_terms_bounded_and_below_leading_action(chain in chain_strategy(6)) {
        let trig = chain_to_trig_polynomial(&chain).unwrap();
        let n = chain.regions().len() as u32;
        prop_assert!(trig.terms().len() < (1usize << (n - 1)));
        let s0 = trig.leading_action();
        prop_assert!((s0 - chain.total_action()).abs() <= 1e-12 * s0);
        for t in trig.terms() {
            prop_assert!(t.action >= 0.0 && t.action < s0);
            prop_assert!(t.amplitude >= 0.0);
        }
    }

    #[test]
    fn chain_matches_plane_wave_determinant(chain in chain_strategy(5), seed in any::<u64>()) {
        prop_assert!(max_pointwise_mismatch(&chain, seed) <= 1e-10);
    }

    #[test]
    fn lambda_zero_collapses_to_pure_sine(lengths in prop::collection::vec(0.05f64..1.0, 1..8)) {
        let regions = lengths.iter().map(|&l| Region::new(l, 0.0).unwrap()).collect();
        let trig = chain_to_trig_polynomial(&ScalingChain::new(regions).unwrap()).unwrap();
        for t in trig.terms() {
            prop_assert!(t.amplitude.abs() < 1e-14);
        }
    }

    #[test]
    fn orbit_invariants(bits in any::<u64>(), len in 1usize..=24, lambda in 0.0f64..0.99) {
        let symbols: Vec<u8> = (0..len).map(|i| 1 + ((bits >> i) & 1) as u8).collect();
        let word = Word::from_symbols(&symbols).unwrap();
        prop_assume!(word.is_lyndon());
        let g = build_step_graph(0.3, lambda).unwrap();
        let o = orbit_stats(&word, &g);
        prop_assert_eq!(o.sigma + o.tau, o.q);
        prop_assert_eq!(o.c12, o.c21);
        prop_assert_eq!(o.tau % 2, 0);
        prop_assert_eq!(o.n1 + o.n2, o.q);
        let j = o.tau / 2;
        prop_assert_eq!(o.c11, o.n1 - j);
        prop_assert_eq!(o.c22, o.n2 - j);
        let bound = g.r.powi(o.sigma as i32) * (1.0 - g.r * g.r).powi(j as i32);
        prop_assert!(o.amplitude.abs() <= bound * (1.0 + 1e-15) && bound <= 1.0);
    }

    #[test]
    fn fit_recovers_exact_power_law(c in 1e-6f64..1e3, p in -4.0f64..-0.5) {
        let pts: Vec<(f64, f64)> = (5..=150).map(|q| (q as f64, c * (q as f64).powf(p))).collect();
        prop_assert!((fit_log_log(&pts).unwrap().slope - p).abs() < 1e-9);
    }
}

#[test]
fn four_region_chain_against_plane_waves() {
    let regions = [(0.2, 0.1), (0.35, 0.6), (0.15, 0.0), (0.3, 0.8)]
        .iter()
        .map(|&(l, lam)| Region::new(l, lam).unwrap())
        .collect();
    let chain = ScalingChain::new(regions).unwrap();
    assert!(max_pointwise_mismatch(&chain, 42) <= 1e-10);
}

#[test]
fn every_generated_word_is_primitive() {
    for w in lyndon_words(16).unwrap() {
        let s: Vec<u8> = w.symbols().collect();
        let q = s.len();
        for d in (1..q).filter(|d| q.is_multiple_of(*d)) {
            assert!(s.chunks(d).any(|c| c != &s[..d]), "{w} is a power");
        }
    }
}

#[test]
fn zone_uniqueness_and_separator_spacing() {
    let trig = build_step_graph(0.3, 0.5)
        .unwrap()
        .trig_polynomial()
        .unwrap();
    let rep = regularity(&trig);
    let spacing = PI / rep.s0;
    for n in 1..=200u64 {
        let gap = rep.separator(n).unwrap() - rep.separator(n - 1).unwrap();
        assert!((gap - spacing).abs() <= 1e-12 * rep.separator(n).unwrap());
    }
    let changes = sign_changes(&trig, rep.separator(200).unwrap(), spacing / 1000.0);
    for n in 1..=200u64 {
        let z = rep.zone(n).unwrap();
        let inside = changes.iter().filter(|c| c.b > z.lo && c.a < z.hi).count();
        assert_eq!(inside, 1, "zone {n}");
    }
}

#[test]
fn explicit_estimates_stay_in_root_intervals() {
    let g = build_step_graph(0.3, 0.5).unwrap();
    let rep = regularity(&g.trig_polynomial().unwrap());
    let ns: Vec<u64> = (1..=100).collect();
    let cfg = ExpansionConfig {
        q_max: 20,
        ..Default::default()
    };
    let sums = shell_sums(&g, &ns, 20, &cfg).unwrap();
    for q in 10..=20 {
        for (i, &n) in ns.iter().enumerate() {
            let k = sums.estimate(&g, i, q);
            let (lo, hi) = (rep.separator(n - 1).unwrap(), rep.separator(n).unwrap());
            assert!(
                lo <= k && k <= hi,
                "n = {n}, q = {q}: {k} outside [{lo}, {hi}]"
            );
        }
    }
}

#[test]
fn doubling_nu_max_is_invisible() {
    let g = build_step_graph(0.3, 0.5).unwrap();
    for truncation in [Truncation::TotalLength, Truncation::PrimeLength] {
        for n in [1, 10, 100] {
            let base = ExpansionConfig {
                q_max: 20,
                nu_max: 50,
                truncation,
                ..Default::default()
            };
            let doubled = ExpansionConfig {
                nu_max: 100,
                ..base
            };
            let a = explicit_eigenvalue(&g, n, &base).unwrap();
            let b = explicit_eigenvalue(&g, n, &doubled).unwrap();
            assert!((a - b).abs() < 1e-12, "{truncation:?} n = {n}");
        }
    }
}

#[test]
fn first_eigenvalue_close_to_oracle_at_q20() {
    let g = build_step_graph(0.3, 0.5).unwrap();
    let k = explicit_eigenvalue(&g, 1, &ExpansionConfig::default()).unwrap();
    let oracle = oracle_eigenvalue(&g, 1, DEFAULT_ROOT_TOL).unwrap();
    assert!((oracle - 4.107_148_743_807_578).abs() < 1e-12);
    assert!((k - oracle).abs() / oracle < 1e-3);
}
