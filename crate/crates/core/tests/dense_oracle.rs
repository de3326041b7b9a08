//! The statevector kernel against explicit 2^m × 2^m matrices.

mod common;

use common::dense::*;
use pce_core::encoding::{commuting_groups, EncodingFamily, EncodingSpec, PauliString};
use pce_core::optimize::random_init;
use pce_core::quantum::{parameter_count, BrickworkAnsatz, QuantumState};

fn all_strings(m: usize) -> Vec<PauliString> {
    let mut out = Vec::new();
    for k in 1..=m {
        let fam = EncodingFamily::FullXyzFixedK { k };
        let cap = fam.capacity(m).unwrap();
        out.extend(
            EncodingSpec::new(fam, m, cap)
                .unwrap()
                .enumerate_strings()
                .unwrap(),
        );
    }
    out
}

#[test]
fn state_matches_dense_product_m3() {
    let a = BrickworkAnsatz::new(3, 1).unwrap();
    for seed in 0..20 {
        let theta = random_init(a.parameter_count(), seed);
        let fast = a.prepare_state(&theta).unwrap();
        let dense = dense_state(3, 1, &theta);
        for (x, y) in fast.amplitudes().iter().zip(&dense) {
            assert!((x - y).norm() < 1e-12, "seed {seed}: {x} vs {y}");
        }
    }
}

#[test]
fn multilayer_states_match() {
    for (m, layers) in [(2, 2), (4, 2), (5, 3), (1, 2)] {
        let a = BrickworkAnsatz::new(m, layers).unwrap();
        let theta = random_init(parameter_count(m, layers), 99);
        let fast = a.prepare_state(&theta).unwrap();
        let dense = dense_state(m, layers, &theta);
        for (x, y) in fast.amplitudes().iter().zip(&dense) {
            assert!((x - y).norm() < 1e-12);
        }
    }
}

#[test]
fn expectations_match_dense_and_are_hermitian() {
    for m in 1..=4 {
        let a = BrickworkAnsatz::new(m, 1).unwrap();
        let strings = all_strings(m);
        for seed in 0..10 {
            let theta = random_init(a.parameter_count(), 1000 + seed);
            let state = a.prepare_state(&theta).unwrap();
            assert!((state.norm_sqr() - 1.0).abs() < 1e-12);
            let dense = dense_state(m, 1, &theta);
            for p in &strings {
                let fast = state.pauli_expectation_complex(p).unwrap();
                let oracle = dense_expectation(&dense, p);
                assert!((fast - oracle).norm() < 1e-10, "{p}: {fast} vs {oracle}");
                assert!(fast.im.abs() < 1e-10, "{p} has imaginary part {}", fast.im);
                assert!(fast.re.abs() <= 1.0 + 1e-12);
            }
        }
    }
}

#[test]
fn full_set_on_ground_state() {
    let strings = EncodingSpec::new(EncodingFamily::FullXyzFixedK { k: 2 }, 3, 9)
        .unwrap()
        .enumerate_strings()
        .unwrap();
    let e = QuantumState::zero(3).expectations(&strings).unwrap();
    assert_eq!(e, vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0]);
}

#[test]
fn commuting_groups_commute_as_matrices() {
    let spec = EncodingSpec::new(EncodingFamily::FullXyzFixedK { k: 2 }, 4, 18).unwrap();
    let strings = spec.enumerate_strings().unwrap();
    for group in commuting_groups(&strings) {
        for a in &group {
            for b in &group {
                let (ma, mb) = (pauli_matrix(a), pauli_matrix(b));
                let (ab, ba) = (matmul(&ma, &mb), matmul(&mb, &ma));
                for (r1, r2) in ab.iter().zip(&ba) {
                    for (x, y) in r1.iter().zip(r2) {
                        assert!((x - y).norm() < 1e-15, "{a} and {b} do not commute");
                    }
                }
            }
        }
    }
    // Mixed-type pairs with an odd overlap anticommute.
    let x: PauliString = "XXI".parse().unwrap();
    let y: PauliString = "IYY".parse().unwrap();
    assert!(!x.commutes_with(&y));
    let (mx, my) = (pauli_matrix(&x), pauli_matrix(&y));
    let (xy, yx) = (matmul(&mx, &my), matmul(&my, &mx));
    for (r1, r2) in xy.iter().zip(&yx) {
        for (a, b) in r1.iter().zip(r2) {
            assert!((a + b).norm() < 1e-15);
        }
    }
    assert!(xy.iter().flatten().any(|v| v.norm() > 0.5));
}
