//! Statevector simulation and equivalence checking.

use std::time::Instant;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::linalg::{max_diff, phase_aligned_distance, random_state, CMat, CVec, StateVector, UnitaryMatrix};
use crate::synth::{Method, QsdOptions, SynthesisReport};

/// Widest circuit that is reconstructed as a dense matrix.
pub const MAX_VERIFY_WIDTH: usize = 10;

/// Applies `g` to the amplitudes of a `width`-qubit register in place.
pub fn apply_gate_slice(amps: &mut [C64], width: usize, g: &Gate) {
    debug_assert_eq!(amps.len(), 1 << width);
    let bit = |w: usize| 1usize << (width - 1 - w);
    match *g {
        Gate::Rx { target, .. } | Gate::Ry { target, .. } | Gate::Rz { target, .. } => {
            let m = g.single_qubit_matrix().expect("rotation");
            let mask = bit(target);
            for i in 0..amps.len() {
                if i & mask == 0 {
                    let (a, b) = (amps[i], amps[i | mask]);
                    amps[i] = m[0][0] * a + m[0][1] * b;
                    amps[i | mask] = m[1][0] * a + m[1][1] * b;
                }
            }
        }
        Gate::Cnot { control, target } => {
            let (cm, tm) = (bit(control), bit(target));
            for i in 0..amps.len() {
                if i & cm != 0 && i & tm == 0 {
                    amps.swap(i, i | tm);
                }
            }
        }
        Gate::Cz { a, b } => {
            let both = bit(a) | bit(b);
            for (i, z) in amps.iter_mut().enumerate() {
                if i & both == both {
                    *z = -*z;
                }
            }
        }
        Gate::Phase { angle } => {
            let p = C64::from_polar(1.0, angle);
            for z in amps.iter_mut() {
                *z *= p;
            }
        }
    }
}

pub fn apply_gate(state: &StateVector, g: &Gate) -> Result<StateVector> {
    g.validate(state.qubits())?;
    let mut out = state.clone();
    apply_gate_slice(out.amplitudes_mut().as_mut_slice(), state.qubits(), g);
    Ok(out)
}

/// Runs the whole circuit on a state.
pub fn apply_circuit(state: &StateVector, c: &Circuit) -> Result<StateVector> {
    if state.qubits() != c.width() {
        return Err(Error::Dimension(format!(
            "state on {} qubits, circuit on {}",
            state.qubits(),
            c.width()
        )));
    }
    let mut out = state.clone();
    let amps = out.amplitudes_mut().as_mut_slice();
    for g in c.gates() {
        apply_gate_slice(amps, c.width(), g);
    }
    Ok(out)
}

/// Dense matrix of a circuit; column `b` is the circuit applied to `|b⟩`.
pub fn circuit_to_unitary(c: &Circuit) -> Result<UnitaryMatrix> {
    let n = c.width();
    if n > MAX_VERIFY_WIDTH {
        return Err(Error::WidthTooLarge {
            width: n,
            max: MAX_VERIFY_WIDTH,
        });
    }
    let d = 1usize << n;
    let cols: Vec<Vec<C64>> = (0..d)
        .into_par_iter()
        .map(|b| {
            let mut v = vec![C64::new(0.0, 0.0); d];
            v[b] = C64::new(1.0, 0.0);
            for g in c.gates() {
                apply_gate_slice(&mut v, n, g);
            }
            v
        })
        .collect();
    let m = CMat::from_fn(d, d, |r, col| cols[col][r]);
    Ok(UnitaryMatrix::from_mat_unchecked(m))
}

/// Outcome of comparing two operators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EquivalenceReport {
    pub equal_exact: bool,
    pub equal_up_to_phase: bool,
    /// Phase aligning `b` onto `a`.
    pub phase: f64,
    /// `max |a − b|`.
    pub max_err: f64,
    /// `max |a − e^{iφ} b|`.
    pub aligned_err: f64,
}

pub fn equivalence(a: &CMat, b: &CMat, tol: f64) -> Result<EquivalenceReport> {
    let (phase, aligned_err) = phase_aligned_distance(a, b)?;
    let max_err = max_diff(a, b);
    Ok(EquivalenceReport {
        equal_exact: max_err <= tol,
        equal_up_to_phase: aligned_err <= tol,
        phase,
        max_err,
        aligned_err,
    })
}

/// Exact-mode reconstruction error of `c` against `u`.
pub fn reconstruction_error(u: &UnitaryMatrix, c: &Circuit) -> Result<f64> {
    if u.qubits() != c.width() {
        return Err(Error::Dimension(format!(
            "matrix on {} qubits, circuit on {}",
            u.qubits(),
            c.width()
        )));
    }
    if c.width() <= MAX_VERIFY_WIDTH {
        let m = circuit_to_unitary(c)?;
        return Ok(max_diff(&m, u));
    }
    let mut err = 0.0f64;
    for seed in 0..4 {
        let psi = random_state(c.width(), 0x5eed + seed);
        let got = apply_circuit(&psi, c)?;
        let want: CVec = u.as_mat() * psi.amplitudes();
        err = err.max(
            got.amplitudes()
                .iter()
                .zip(want.iter())
                .fold(0.0, |a, (x, y)| a.max((x - y).norm())),
        );
    }
    Ok(err)
}

/// Counts and reconstruction error for a circuit claimed to implement `u`.
pub fn verify_synthesis(u: &UnitaryMatrix, c: &Circuit) -> Result<SynthesisReport> {
    let start = Instant::now();
    let recon_err = reconstruction_error(u, c)?;
    Ok(SynthesisReport {
        method: Method::External,
        counts: c.counts(),
        recon_err,
        options: QsdOptions::default(),
        elapsed: start.elapsed().as_secs_f64(),
    })
}
