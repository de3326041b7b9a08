//! Dense-matrix reference for the brickwork circuit and Pauli expectations,
//! built from explicit Kronecker products with no shared code paths.

#![allow(dead_code)]

use num_complex::Complex64 as C;
use pce_core::encoding::{Pauli, PauliString};

pub type Mat = Vec<Vec<C>>;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn identity(d: usize) -> Mat {
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) })
                .collect()
        })
        .collect()
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![c(0.0, 0.0); ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let d = a.len();
    let mut out = vec![vec![c(0.0, 0.0); d]; d];
    for i in 0..d {
        for k in 0..d {
            if a[i][k] == c(0.0, 0.0) {
                continue;
            }
            for j in 0..d {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn apply(a: &Mat, v: &[C]) -> Vec<C> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

pub fn pauli(p: Pauli) -> Mat {
    match p {
        Pauli::I => identity(2),
        Pauli::X => vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ],
        Pauli::Y => vec![
            vec![c(0.0, 0.0), c(0.0, -1.0)],
            vec![c(0.0, 1.0), c(0.0, 0.0)],
        ],
        Pauli::Z => vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(-1.0, 0.0)],
        ],
    }
}

/// Qubit 0 is the leftmost tensor factor.
pub fn embed(m: usize, q: usize, gate: &Mat) -> Mat {
    (0..m).fold(vec![vec![c(1.0, 0.0)]], |acc, k| {
        kron(&acc, &if k == q { gate.clone() } else { identity(2) })
    })
}

pub fn pauli_matrix(p: &PauliString) -> Mat {
    p.letters()
        .iter()
        .fold(vec![vec![c(1.0, 0.0)]], |acc, &l| kron(&acc, &pauli(l)))
}

pub fn ry(t: f64) -> Mat {
    let (s, co) = ((t / 2.0).sin(), (t / 2.0).cos());
    vec![vec![c(co, 0.0), c(-s, 0.0)], vec![c(s, 0.0), c(co, 0.0)]]
}

pub fn rz(p: f64) -> Mat {
    vec![
        vec![C::from_polar(1.0, -p / 2.0), c(0.0, 0.0)],
        vec![c(0.0, 0.0), C::from_polar(1.0, p / 2.0)],
    ]
}

pub fn cz(m: usize, a: usize, b: usize) -> Mat {
    let d = 1 << m;
    let mut out = identity(d);
    for (i, row) in out.iter_mut().enumerate() {
        let bit = |q: usize| (i >> (m - 1 - q)) & 1;
        if bit(a) == 1 && bit(b) == 1 {
            row[i] = c(-1.0, 0.0);
        }
    }
    out
}

/// The documented layout, gate by gate.
pub fn dense_circuit(m: usize, layers: usize, theta: &[f64]) -> Mat {
    let mut u = identity(1 << m);
    let mut k = 0;
    let mut column = |u: &mut Mat| {
        for q in 0..m {
            *u = matmul(&embed(m, q, &ry(theta[k])), u);
            *u = matmul(&embed(m, q, &rz(theta[k + 1])), u);
            k += 2;
        }
    };
    for _ in 0..layers {
        column(&mut u);
        for q in (0..m.saturating_sub(1)).step_by(2) {
            u = matmul(&cz(m, q, q + 1), &u);
        }
        column(&mut u);
        for q in (1..m.saturating_sub(1)).step_by(2) {
            u = matmul(&cz(m, q, q + 1), &u);
        }
    }
    column(&mut u);
    u
}

pub fn dense_state(m: usize, layers: usize, theta: &[f64]) -> Vec<C> {
    let mut zero = vec![c(0.0, 0.0); 1 << m];
    zero[0] = c(1.0, 0.0);
    apply(&dense_circuit(m, layers, theta), &zero)
}

pub fn dense_expectation(state: &[C], p: &PauliString) -> C {
    let pv = apply(&pauli_matrix(p), state);
    state.iter().zip(&pv).map(|(a, b)| a.conj() * b).sum()
}
