use std::collections::BTreeSet;

use nlets::css::{logical_basis, steane, Basis, CssCode, LogicalBasis};
use nlets::gf2::{for_each_in_coset, BitVector};
use nlets::graphs::cycle_graph;
use nlets::hgp::hypergraph_product;
use nlets::states::{
    distribution, double_certification_pairs, double_certification_sweep, logical_expectations,
    marginal, partition_witness, uncertainty_check, xbasis_masses, zbasis_masses, Disjointness,
    ErrorFamily, LogicalStateSpec, PauliError, StatesError, VoronoiSpec, C0, MU_CODE_STATE,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const PROB_TOL: f64 = 1e-12;

fn haar_pair(rng: &mut impl Rng) -> (Complex64, Complex64) {
    let v: Vec<f64> = (0..4).map(|_| rng.sample(StandardNormal)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    (
        Complex64::new(v[0] / norm, v[1] / norm),
        Complex64::new(v[2] / norm, v[3] / norm),
    )
}

fn toric3() -> CssCode {
    hypergraph_product(&cycle_graph(3)).unwrap().code
}

/// Dense amplitudes of `E (α|0_L> + β|1_L>)`, qubit `i` at bit `i` of the index.
fn oracle_state(
    code: &CssCode,
    lb: &LogicalBasis,
    a: Complex64,
    b: Complex64,
    err: &PauliError,
) -> Vec<Complex64> {
    let n = code.n();
    let rows: Vec<u64> = code.hx().rows().iter().map(BitVector::to_u64).collect();
    let mut stab = BTreeSet::new();
    for mask in 0u64..1 << rows.len() {
        stab.insert(
            rows.iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .fold(0, |acc, (_, r)| acc ^ r),
        );
    }
    let norm = (stab.len() as f64).sqrt();
    let bx = lb.bx[0].to_u64();
    let (ex, ez) = (err.ex.to_u64(), err.ez.to_u64());
    let mut psi = vec![Complex64::new(0.0, 0.0); 1 << n];
    for &s in &stab {
        for (word, amp) in [(s, a), (s ^ bx, b)] {
            let sign = if (word & ez).count_ones() % 2 == 1 {
                -1.0
            } else {
                1.0
            };
            psi[(word ^ ex) as usize] += amp * sign / norm;
        }
    }
    psi
}

fn walsh_hadamard(psi: &mut [Complex64]) {
    let mut h = 1;
    while h < psi.len() {
        for i in (0..psi.len()).step_by(2 * h) {
            for j in i..i + h {
                let (x, y) = (psi[j], psi[j + h]);
                psi[j] = x + y;
                psi[j + h] = x - y;
            }
        }
        h *= 2;
    }
    let s = (psi.len() as f64).sqrt();
    psi.iter_mut().for_each(|x| *x /= s);
}

fn dense_from_pieces(spec: &LogicalStateSpec<'_>, err: &PauliError, basis: Basis) -> Vec<f64> {
    let dist = distribution(spec, err, basis).unwrap();
    let sub = dist.subspace(spec);
    let mut out = vec![0.0; 1 << spec.code.n()];
    for p in &dist.pieces {
        let mut words = Vec::new();
        for_each_in_coset(&sub, &p.offset, 1 << 20, |w| words.push(w.to_u64())).unwrap();
        for w in &words {
            out[*w as usize] += p.mass / words.len() as f64;
        }
    }
    out
}

fn parity_expectation(probs: &[f64], mask: u64) -> f64 {
    probs
        .iter()
        .enumerate()
        .map(|(x, p)| {
            if (x as u64 & mask).count_ones() % 2 == 1 {
                -p
            } else {
                *p
            }
        })
        .sum()
}

fn check_against_statevector(code: &CssCode, trials: usize, max_weight: usize, seed: u64) {
    let lb = logical_basis(code).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..trials {
        let (a, b) = haar_pair(&mut rng);
        let err = PauliError::sample(code.n(), t % (max_weight + 1), &mut rng);
        let spec = LogicalStateSpec::new(code, lb.clone(), 0, a, b).unwrap();
        let mut psi = oracle_state(code, &lb, a, b, &err);
        let total: f64 = psi.iter().map(Complex64::norm_sqr).sum();
        assert!((total - 1.0).abs() < PROB_TOL);
        let pz: Vec<f64> = psi.iter().map(Complex64::norm_sqr).collect();
        walsh_hadamard(&mut psi);
        let px: Vec<f64> = psi.iter().map(Complex64::norm_sqr).collect();
        for (basis, want) in [(Basis::Z, &pz), (Basis::X, &px)] {
            let got = dense_from_pieces(&spec, &err, basis);
            let diff = got
                .iter()
                .zip(want.iter())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            assert!(diff < PROB_TOL, "trial {t} {basis:?}: {diff}");
        }
        let (ez, ex) = logical_expectations(&spec, &err);
        assert!((ez - parity_expectation(&pz, lb.bz[0].to_u64())).abs() < 1e-10);
        assert!((ex - parity_expectation(&px, lb.bx[0].to_u64())).abs() < 1e-10);
    }
}

#[test]
fn steane_distributions_match_statevector() {
    check_against_statevector(&steane(), 40, 3, 1);
}

#[test]
fn toric_distributions_match_statevector() {
    check_against_statevector(&toric3(), 6, 2, 2);
}

#[test]
fn uncertainty_over_random_states() {
    let code = steane();
    let lb = logical_basis(&code).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let (a, b) = haar_pair(&mut rng);
        let spec = LogicalStateSpec::new(&code, lb.clone(), 0, a, b).unwrap();
        let r = uncertainty_check(&spec).unwrap();
        assert!(r.holds);
        assert!(r.exp_sq_sum <= 1.0 + 1e-10);
        assert!(r.z_margin.max(r.x_margin) >= -PROB_TOL);
        let balance = |m: f64| m.min(1.0 - m);
        assert!(balance(r.z_mass0).max(balance(r.x_mass0)) >= MU_CODE_STATE - PROB_TOL);
    }
}

#[test]
fn unnormalized_amplitudes_are_rejected() {
    let code = steane();
    let lb = logical_basis(&code).unwrap();
    let r = LogicalStateSpec::new(
        &code,
        lb,
        0,
        Complex64::new(1.0, 0.0),
        Complex64::new(0.1, 0.0),
    );
    assert!(matches!(r, Err(StatesError::NotNormalized(_))));
}

#[test]
fn marginals_off_the_error_support_are_unchanged() {
    let code = toric3();
    let lb = logical_basis(&code).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..10 {
        let (a, b) = haar_pair(&mut rng);
        let spec = LogicalStateSpec::new(&code, lb.clone(), 0, a, b).unwrap();
        let err = PauliError::sample(code.n(), 3, &mut rng);
        let off = err.support();
        let keep: Vec<usize> = (0..code.n()).filter(|&q| !off.get(q)).collect();
        let clean = PauliError::none(code.n());
        for basis in [Basis::Z, Basis::X] {
            let m1 = marginal(&spec, &err, basis, &keep, 1 << 20).unwrap();
            let m0 = marginal(&spec, &clean, basis, &keep, 1 << 20).unwrap();
            assert_eq!(m1.keys().collect::<Vec<_>>(), m0.keys().collect::<Vec<_>>());
            for (k, v) in &m1 {
                assert!((v - m0[k]).abs() < PROB_TOL);
            }
            assert!((m1.values().sum::<f64>() - 1.0).abs() < PROB_TOL);
        }
    }
}

#[test]
fn sweep_and_pair_count_agree_on_toric_lines() {
    let h = hypergraph_product(&cycle_graph(3)).unwrap();
    let lb = h.line_logical_basis(0).unwrap();
    for (cap, weight) in [(1, 1), (1, 2), (2, 2), (1, 3)] {
        for basis in [Basis::Z, Basis::X] {
            let fam = ErrorFamily::Lines {
                index: h.index,
                vertex_cap: cap,
                edge_cap: cap,
                weight_cap: weight,
            };
            let sets = nlets::css::partition_sets(&h.code, &lb, 0).unwrap();
            let v = VoronoiSpec::new(sets, basis, fam, 1 << 16);
            let sweep = double_certification_sweep(&v, 1 << 16).unwrap();
            let pairs = double_certification_pairs(&v).unwrap();
            assert_eq!(
                sweep.doubly_certified > 0,
                pairs > 0,
                "caps ({cap},{weight}) {basis:?}"
            );
            assert_eq!(sweep.outcome_space, 1 << 10);
            // Distance 3 separates single flips.
            if weight == 1 {
                assert_eq!((sweep.doubly_certified, pairs), (0, 0));
            }
        }
    }
}

fn planted_trials(code: &CssCode, lb: LogicalBasis, family: ErrorFamily, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..100 {
        let (a, b) = haar_pair(&mut rng);
        let spec = LogicalStateSpec::new(code, lb.clone(), 0, a, b).unwrap();
        let err = PauliError::sample(code.n(), 1, &mut rng);
        let w = partition_witness(&spec, &err, &family, [None, None], 1 << 16).unwrap();
        let chosen = w.chosen.expect("one basis keeps both cells above c0");
        let cw = w.get(chosen);
        assert!(cw.partitions());
        assert!(cw.s0.min(cw.s1) >= C0);
        let (m0, m1) = match chosen {
            Basis::Z => (a.norm_sqr(), b.norm_sqr()),
            Basis::X => ((a + b).norm_sqr() / 2.0, (a - b).norm_sqr() / 2.0),
        };
        assert!((cw.s0 - m0).abs() < PROB_TOL && (cw.s1 - m1).abs() < PROB_TOL);
        for basis in [Basis::Z, Basis::X] {
            assert_eq!(
                w.get(basis).disjointness,
                Disjointness::Decoder {
                    doubly_certified_mass: 0.0
                }
            );
            // The planted and the decoded classifications agree.
            let v = VoronoiSpec::new(spec.sets(), basis, family.clone(), 1 << 16);
            let mass = |planted| match basis {
                Basis::Z => zbasis_masses(&spec, &err, Some(&v), planted),
                Basis::X => xbasis_masses(&spec, &err, Some(&v), planted),
            };
            assert_eq!(mass(true).unwrap(), mass(false).unwrap());
        }
    }
}

#[test]
fn steane_planted_partition_witnesses() {
    let code = steane();
    let lb = logical_basis(&code).unwrap();
    planted_trials(&code, lb, ErrorFamily::Ball { radius: 1 }, 5);
}

#[test]
fn toric_planted_partition_witnesses() {
    let h = hypergraph_product(&cycle_graph(3)).unwrap();
    let lb = h.line_logical_basis(0).unwrap();
    let fam = ErrorFamily::Lines {
        index: h.index,
        vertex_cap: 1,
        edge_cap: 1,
        weight_cap: 1,
    };
    planted_trials(&h.code, lb, fam, 6);
}
