use num_complex::Complex64 as C64;

use crate::circuit::{peephole_simplify, Circuit, Gate, ANGLE_EPS};
use crate::error::{Error, Result};
use crate::linalg::{CVec, StateVector};
use crate::mux::{bloch_to_zero, is_uniform, mux_rotation_gates, Entangler, MuxAxis, ZERO_BLOCK_SQ};

/// What angles a two-amplitude block of zeros receives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum ZeroBlocks {
    /// `(0, 0)`: the block's wires are left alone.
    Identity,
    /// Copy the nearest nonzero block, which keeps angle lists uniform for
    /// sparse states.
    Follow,
}

/// Per-block Bloch angles `(φ, θ)` and residual amplitudes.
pub(crate) fn block_angles(amps: &[C64], target: u8, zeros: ZeroBlocks) -> (Vec<f64>, Vec<f64>, Vec<C64>) {
    let blocks = amps.len() / 2;
    let mut phis = vec![0.0; blocks];
    let mut thetas = vec![0.0; blocks];
    let mut res = vec![C64::new(0.0, 0.0); blocks];
    let mut empty = vec![false; blocks];
    for c in 0..blocks {
        let pair = [amps[2 * c], amps[2 * c + 1]];
        empty[c] = pair[0].norm_sqr() + pair[1].norm_sqr() < ZERO_BLOCK_SQ;
        let (phi, theta, r) = bloch_to_zero(pair, target);
        phis[c] = phi;
        thetas[c] = theta;
        res[c] = r;
    }
    if zeros == ZeroBlocks::Follow {
        if let Some(first) = empty.iter().position(|e| !e) {
            let (mut phi, mut theta) = (phis[first], thetas[first]);
            for c in 0..blocks {
                if empty[c] {
                    phis[c] = phi;
                    thetas[c] = theta;
                } else {
                    phi = phis[c];
                    theta = thetas[c];
                }
            }
        }
    }
    (phis, thetas, res)
}

fn push_rotation(out: &mut Vec<Gate>, axis: MuxAxis, target: usize, angles: &[f64]) {
    let mean = angles.iter().sum::<f64>() / angles.len() as f64;
    if mean.abs() > ANGLE_EPS {
        out.push(match axis {
            MuxAxis::Y => Gate::Ry { target, angle: mean },
            MuxAxis::Z => Gate::Rz { target, angle: mean },
        });
    }
}

/// Multiplexed Rz (forward ladder) then multiplexed Ry (mirrored ladder) on
/// `data`; when both are ladders driven by the same top select, the two
/// entanglers meeting in the middle cancel. With `compress`, uniform angle
/// lists collapse to a single rotation.
pub(crate) fn disentangle_gates(
    data: usize,
    rz_selects: &[usize],
    rz_angles: &[f64],
    ry_selects: &[usize],
    ry_angles: &[f64],
    compress: bool,
) -> Vec<Gate> {
    let mut out = Vec::new();
    let rz_flat = compress && is_uniform(rz_angles);
    let ry_flat = compress && is_uniform(ry_angles);
    let mut rz = if rz_flat {
        let mut g = Vec::new();
        push_rotation(&mut g, MuxAxis::Z, data, rz_angles);
        g
    } else {
        mux_rotation_gates(MuxAxis::Z, data, rz_selects, rz_angles, Entangler::Cnot, false)
    };
    let mut ry = if ry_flat {
        let mut g = Vec::new();
        push_rotation(&mut g, MuxAxis::Y, data, ry_angles);
        g
    } else {
        mux_rotation_gates(MuxAxis::Y, data, ry_selects, ry_angles, Entangler::Cnot, true)
    };
    if !rz_flat && !ry_flat && !rz_selects.is_empty() && !ry_selects.is_empty() && rz_selects[0] == ry_selects[0] {
        rz.pop();
        ry.remove(0);
    }
    out.extend(rz);
    out.extend(ry);
    out
}

/// Splits the least significant qubit off `psi`: returns a circuit taking
/// `psi` to `residual ⊗ |target⟩`.
///
/// The circuit is a multiplexed Rz followed by a multiplexed Ry on the last
/// wire, selected by all other wires, with `2^{n+1} − 2` CNOTs for `n`
/// selects.
pub fn disentangle_lsb(psi: &StateVector, target: u8) -> Result<(Circuit, StateVector)> {
    let width = psi.qubits();
    if width == 0 {
        return Err(Error::Dimension("cannot disentangle a zero-qubit state".into()));
    }
    let (phis, thetas, res) = block_angles(psi.amplitudes().as_slice(), target, ZeroBlocks::Identity);
    let neg = |v: Vec<f64>| v.into_iter().map(|x| -x).collect::<Vec<f64>>();
    let selects: Vec<usize> = (0..width - 1).collect();
    let gates = disentangle_gates(width - 1, &selects, &neg(phis), &selects, &neg(thetas), false);
    let circuit = Circuit::from_gates(width, gates)?;
    Ok((circuit, StateVector::from_vec_unchecked(CVec::from_vec(res))))
}

/// Circuit mapping the basis state `|target⟩` to `psi`, global phase
/// included. Uses at most `2^{n+1} − 2n − 2` CNOTs.
pub fn prepare_state(psi: &StateVector, target: usize) -> Result<Circuit> {
    let n = psi.qubits();
    if target >= 1usize << n {
        return Err(Error::IndexOutOfRange {
            index: target,
            width: n,
        });
    }
    let mut undo = Circuit::new(n);
    let mut cur: Vec<C64> = psi.amplitudes().iter().copied().collect();
    for m in (1..=n).rev() {
        let bit = ((target >> (n - m)) & 1) as u8;
        let (phis, thetas, res) = block_angles(&cur, bit, ZeroBlocks::Follow);
        let neg = |v: &[f64]| v.iter().map(|x| -x).collect::<Vec<f64>>();
        let selects: Vec<usize> = (0..m - 1).collect();
        for g in disentangle_gates(m - 1, &selects, &neg(&phis), &selects, &neg(&thetas), true) {
            undo.push(g);
        }
        cur = res;
    }
    let mut c = undo.inverse();
    let phase = cur[0].arg();
    if phase.abs() > ANGLE_EPS {
        c.push(Gate::Phase { angle: phase });
    }
    Ok(peephole_simplify(&c))
}
