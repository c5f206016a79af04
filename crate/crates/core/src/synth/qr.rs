use num_complex::Complex64 as C64;

use crate::circuit::{peephole_simplify, Circuit};
use crate::error::Result;
use crate::linalg::{CMat, UnitaryMatrix};
use crate::mux::emit_diagonal;
use crate::sim::apply_gate_slice;
use crate::synth::state::{block_angles, disentangle_gates, ZeroBlocks};

/// Step `j` of the column-by-column reduction: a circuit sending column `j`
/// of `w` to a multiple of `|j⟩` that leaves `|i⟩`, `i < j`, in place.
///
/// Levels run from the least significant wire upward. At a level whose bit
/// of `j` is 0, the Ry multiplexor additionally selects on the already
/// reduced wires where `j` has a 1 and acts as the identity off that branch;
/// otherwise it would disturb earlier basis vectors sharing the remaining
/// bits.
fn reduce_column(col: &[C64], j: usize, n: usize) -> Circuit {
    let mut circ = Circuit::new(n);
    let mut cur = col.to_vec();
    for lvl in 0..n {
        let data = n - 1 - lvl;
        let bit = ((j >> lvl) & 1) as u8;
        let (phis, thetas, res) = block_angles(&cur, bit, ZeroBlocks::Identity);
        let rz_sel: Vec<usize> = (0..data).collect();
        let extra: Vec<usize> = if bit == 0 {
            (0..lvl).filter(|q| (j >> q) & 1 == 1).map(|q| n - 1 - q).collect()
        } else {
            Vec::new()
        };
        let mut ry_sel = rz_sel.clone();
        ry_sel.extend(&extra);
        let full = (1usize << extra.len()) - 1;
        let ry_angles: Vec<f64> = (0..1usize << ry_sel.len())
            .map(|s| {
                if s & full == full {
                    -thetas[s >> extra.len()]
                } else {
                    0.0
                }
            })
            .collect();
        let rz_angles: Vec<f64> = phis.iter().map(|p| -p).collect();
        for g in disentangle_gates(data, &rz_sel, &rz_angles, &ry_sel, &ry_angles, false) {
            circ.push(g);
        }
        cur = res;
    }
    circ
}

pub(crate) fn synth_qr_raw(u: &UnitaryMatrix) -> Circuit {
    let n = u.qubits();
    let d = u.dim();
    let mut w: CMat = u.as_mat().clone();
    let mut forward = Circuit::new(n);
    for j in 0..d.saturating_sub(1) {
        let col: Vec<C64> = w.column(j).iter().copied().collect();
        let step = reduce_column(&col, j, n);
        for k in 0..d {
            let mut column = w.column_mut(k);
            let slice = column.as_mut_slice();
            for g in step.gates() {
                apply_gate_slice(slice, n, g);
            }
        }
        forward.append(&step);
    }
    let phases: Vec<f64> = (0..d).map(|k| w[(k, k)].arg()).collect();
    let mut out = Circuit::new(n);
    let wires: Vec<usize> = (0..n).collect();
    emit_diagonal(&mut out, &wires, &phases);
    out.append(&forward.inverse());
    out
}

/// Column-by-column synthesis: `u = C_0†·C_1†·…·D` where each `C_j` is a
/// state-preparation style reduction of column `j` and `D` is diagonal.
pub fn synth_qr(u: &UnitaryMatrix) -> Result<Circuit> {
    Ok(peephole_simplify(&synth_qr_raw(u)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_diff, random_unitary};
    use crate::sim::circuit_to_unitary;

    #[test]
    fn qr_reconstructs_random_unitaries() {
        for n in 1..=4 {
            for seed in 0..3 {
                let u = random_unitary(n, 70 + seed);
                let c = synth_qr(&u).unwrap();
                assert!(max_diff(&circuit_to_unitary(&c).unwrap(), &u) <= 1e-9, "n={n}");
            }
        }
    }

    #[test]
    fn qr_raw_counts() {
        for (n, expect) in [(2, 10), (3, 74), (4, 406)] {
            let u = random_unitary(n, 3);
            assert_eq!(synth_qr_raw(&u).counts().cnot, expect);
        }
    }

    #[test]
    fn diagonal_input_reduces_to_diagonal_synthesis() {
        let phases = [0.1, -0.7, 2.0, 0.4, 1.1, -2.5, 0.0, 3.0];
        let m = CMat::from_fn(8, 8, |r, c| {
            if r == c {
                C64::from_polar(1.0, phases[r])
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let u = UnitaryMatrix::new(m).unwrap();
        let c = synth_qr(&u).unwrap();
        assert_eq!(c.counts().cnot, 6);
        assert_eq!(c.counts().ry, 0);
        assert!(max_diff(&circuit_to_unitary(&c).unwrap(), &u) <= 1e-12);
    }
}
