//! Exact statevector simulation of the brickwork ansatz.
//!
//! Basis index convention: qubit 0 is the most significant bit, so on `m`
//! qubits qubit `q` lives at bit `m - 1 - q` of the amplitude index.
//!
//! Layout of one layer, with every rotation column applying RY then RZ to
//! each qubit:
//!
//! ```text
//! RY·RZ column | CZ on (0,1),(2,3),… | RY·RZ column | CZ on (1,2),(3,4),…
//! ```
//!
//! A final RY·RZ column follows the last layer. Parameters are consumed
//! column by column, and within a column as `[ry(q0), rz(q0), ry(q1), …]`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::encoding::PauliString;
use crate::error::{param_error, Error, Result};

/// Amplitudes over `2^m` computational basis states.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuantumState {
    qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    /// `|0…0⟩` on `qubits` qubits.
    pub fn zero(qubits: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self { qubits, amplitudes }
    }

    /// Wraps raw amplitudes. The vector length must be a power of two and
    /// the state normalized to within `1e-10`.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(param_error(format!(
                "amplitude count {len} is not a power of two ≥ 2"
            )));
        }
        let state = Self {
            qubits: len.trailing_zeros() as usize,
            amplitudes,
        };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(param_error(format!("state norm² {norm} is not 1")));
        }
        Ok(state)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    fn reset(&mut self) {
        self.amplitudes.fill(Complex64::new(0.0, 0.0));
        self.amplitudes[0] = Complex64::new(1.0, 0.0);
    }

    /// Applies `RZ(phi) · RY(theta)` to `qubit`.
    fn rotate(&mut self, qubit: usize, theta: f64, phi: f64) {
        let (s, c) = (libm::sin(theta / 2.0), libm::cos(theta / 2.0));
        let (sp, cp) = (libm::sin(phi / 2.0), libm::cos(phi / 2.0));
        let lo_phase = Complex64::new(cp, -sp);
        let hi_phase = Complex64::new(cp, sp);
        let stride = 1usize << (self.qubits - 1 - qubit);
        let amps = &mut self.amplitudes;
        for block in (0..amps.len()).step_by(stride << 1) {
            for i in block..block + stride {
                let a0 = amps[i];
                let a1 = amps[i + stride];
                amps[i] = lo_phase * (a0 * c - a1 * s);
                amps[i + stride] = hi_phase * (a0 * s + a1 * c);
            }
        }
    }

    /// Controlled-Z on every pair `(q, q + 1)` for `q = first, first + 2, …`.
    fn cz_bricks(&mut self, first: usize) {
        let m = self.qubits;
        let pairs: Vec<usize> = (first..m.saturating_sub(1))
            .step_by(2)
            .map(|q| (1usize << (m - 1 - q)) | (1usize << (m - 2 - q)))
            .collect();
        if pairs.is_empty() {
            return;
        }
        for (idx, a) in self.amplitudes.iter_mut().enumerate() {
            let flips = pairs.iter().filter(|&&mask| idx & mask == mask).count();
            if flips % 2 == 1 {
                *a = -*a;
            }
        }
    }

    /// `⟨ψ|P|ψ⟩` before discarding the (vanishing) imaginary part.
    pub fn pauli_expectation_complex(&self, p: &PauliString) -> Result<Complex64> {
        if p.qubits() != self.qubits {
            return Err(Error::LengthMismatch {
                expected: self.qubits,
                actual: p.qubits(),
            });
        }
        // P|b⟩ = i^{#Y} (-1)^{popcount(b & phase)} |b ^ flip⟩
        let flip = p.flip_mask();
        let phase = p.phase_mask();
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, a) in self.amplitudes.iter().enumerate() {
            let term = self.amplitudes[b ^ flip].conj() * a;
            if (b & phase).count_ones() % 2 == 1 {
                acc -= term;
            } else {
                acc += term;
            }
        }
        Ok(match p.y_count() % 4 {
            0 => acc,
            1 => Complex64::new(-acc.im, acc.re),
            2 => -acc,
            _ => Complex64::new(acc.im, -acc.re),
        })
    }

    /// Real expectation value of a Pauli string.
    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        Ok(self.pauli_expectation_complex(p)?.re)
    }

    pub fn expectations(&self, strings: &[PauliString]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; strings.len()];
        self.expectations_into(strings, &mut out)?;
        Ok(out)
    }

    /// Like [`expectations`](Self::expectations) but writes into `out`.
    pub fn expectations_into(&self, strings: &[PauliString], out: &mut [f64]) -> Result<()> {
        if out.len() != strings.len() {
            return Err(Error::LengthMismatch {
                expected: strings.len(),
                actual: out.len(),
            });
        }
        for (o, p) in out.iter_mut().zip(strings) {
            *o = self.expectation(p)?;
        }
        Ok(())
    }
}

/// Single-qubit rotations interleaved with nearest-neighbour CZ bricks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BrickworkAnsatz {
    pub qubits: usize,
    pub layers: usize,
}

impl BrickworkAnsatz {
    pub fn new(qubits: usize, layers: usize) -> Result<Self> {
        if qubits == 0 || layers == 0 {
            return Err(param_error("ansatz needs at least one qubit and one layer"));
        }
        if qubits > 24 {
            return Err(param_error(format!(
                "{qubits} qubits exceed the statevector limit of 24"
            )));
        }
        Ok(Self { qubits, layers })
    }

    pub fn parameter_count(&self) -> usize {
        parameter_count(self.qubits, self.layers)
    }

    /// Human-readable description stored with run results.
    pub fn describe(&self) -> String {
        format!(
            "brickwork[qubits={}, layers={}]: per layer RY.RZ | CZ(0,1)(2,3).. | RY.RZ | CZ(1,2)(3,4)..; final RY.RZ; params={}",
            self.qubits,
            self.layers,
            self.parameter_count()
        )
    }

    pub fn prepare_state(&self, theta: &[f64]) -> Result<QuantumState> {
        let mut state = QuantumState::zero(self.qubits);
        self.prepare_into(theta, &mut state)?;
        Ok(state)
    }

    /// Re-prepares `state` in place, reusing its allocation.
    pub fn prepare_into(&self, theta: &[f64], state: &mut QuantumState) -> Result<()> {
        let expected = self.parameter_count();
        if theta.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                actual: theta.len(),
            });
        }
        if state.qubits != self.qubits {
            *state = QuantumState::zero(self.qubits);
        } else {
            state.reset();
        }
        let mut params = theta.chunks_exact(2);
        let mut column = |state: &mut QuantumState| {
            for q in 0..self.qubits {
                let pair = params.next().expect("parameter count checked above");
                state.rotate(q, pair[0], pair[1]);
            }
        };
        for _ in 0..self.layers {
            column(state);
            state.cz_bricks(0);
            column(state);
            state.cz_bricks(1);
        }
        column(state);
        Ok(())
    }
}

/// `2m(2·layers + 1)`: two rotation columns per layer plus the final one.
pub fn parameter_count(qubits: usize, layers: usize) -> usize {
    2 * qubits * (2 * layers + 1)
}
