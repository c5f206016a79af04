use std::time::Instant;

use num_complex::Complex64 as C64;

use crate::circuit::{Circuit, Gate, ANGLE_EPS};
use crate::error::{Error, Result};
use crate::layout::map_nearest_neighbor;
use crate::linalg::{cosine_sine_decompose, eig_unitary, CMat, CVec, UnitaryMatrix, TOL_RECON};
use crate::mux::{mux_rotation_gates, zyz_of, Entangler, MuxAxis};
use crate::sim::reconstruction_error;
use crate::synth::two_qubit::{synth_two_qubit, two_qubit_up_to_diagonal};
use crate::synth::{Method, QsdOptions, SynthesisReport};

/// `u0 ⊕ u1 = (I ⊗ v) · (D ⊕ D†) · (I ⊗ w)`, with `D ⊕ D†` the multiplexed
/// `Rz(rz_angles[j])` on the most significant qubit.
#[derive(Clone, Debug)]
pub struct Demultiplexed {
    pub v: UnitaryMatrix,
    pub rz_angles: Vec<f64>,
    pub w: UnitaryMatrix,
}

/// Splits a two-case multiplexor into two generic cofactors around a
/// multiplexed Rz, by diagonalizing `u0·u1†`.
pub fn demultiplex(u0: &UnitaryMatrix, u1: &UnitaryMatrix) -> Result<Demultiplexed> {
    if u0.qubits() != u1.qubits() {
        return Err(Error::Dimension(format!(
            "cofactors on {} and {} qubits",
            u0.qubits(),
            u1.qubits()
        )));
    }
    let x = UnitaryMatrix::from_mat_unchecked(u0.as_mat() * u1.adjoint());
    let (vals, v) = eig_unitary(&x)?;
    let half: Vec<f64> = vals
        .iter()
        .map(|z| {
            let lam = z.arg();
            if lam <= -std::f64::consts::PI {
                std::f64::consts::PI / 2.0
            } else {
                lam / 2.0
            }
        })
        .collect();
    let d = CMat::from_diagonal(&CVec::from_iterator(
        half.len(),
        half.iter().map(|h| C64::from_polar(1.0, *h)),
    ));
    let w = &d * v.adjoint() * u1.as_mat();
    let rz_angles = half.iter().map(|h| -2.0 * h).collect();
    Ok(Demultiplexed {
        v,
        rz_angles,
        w: UnitaryMatrix::from_mat_unchecked(w),
    })
}

/// Multiplexed rotation on `top` with the selects handed to the ladder
/// farthest first, so the most frequently used select is the adjacent wire.
fn ladder(axis: MuxAxis, top: usize, rest: &[usize], angles: &[f64], kind: Entangler) -> Vec<Gate> {
    let k = rest.len();
    let selects: Vec<usize> = rest.iter().rev().copied().collect();
    let permuted: Vec<f64> = (0..angles.len())
        .map(|s| angles[s.reverse_bits() >> (usize::BITS as usize - k)])
        .collect();
    mux_rotation_gates(axis, top, &selects, &permuted, kind, false)
}

enum Piece {
    Gate(Gate),
    /// A two-qubit cofactor on `(upper, lower)` wires.
    Leaf([usize; 2], CMat),
}

struct Recursion {
    opts: QsdOptions,
    pieces: Vec<Piece>,
}

impl Recursion {
    fn gate(&mut self, g: Gate) {
        self.pieces.push(Piece::Gate(g));
    }

    fn decompose(&mut self, u: &CMat, wires: &[usize]) -> Result<()> {
        match wires.len() {
            0 => {
                self.gate(Gate::Phase { angle: u[(0, 0)].arg() });
                Ok(())
            }
            1 => {
                let z = zyz_of(&[[u[(0, 0)], u[(0, 1)]], [u[(1, 0)], u[(1, 1)]]]);
                let t = wires[0];
                self.gate(Gate::Rz {
                    target: t,
                    angle: z.gamma,
                });
                self.gate(Gate::Ry {
                    target: t,
                    angle: z.beta,
                });
                self.gate(Gate::Rz {
                    target: t,
                    angle: z.alpha,
                });
                self.gate(Gate::Phase { angle: z.phi });
                Ok(())
            }
            2 if self.opts.base_size == 2 => {
                self.pieces.push(Piece::Leaf([wires[0], wires[1]], u.clone()));
                Ok(())
            }
            _ => self.split(u, wires),
        }
    }

    fn split(&mut self, u: &CMat, wires: &[usize]) -> Result<()> {
        let (top, rest) = (wires[0], &wires[1..]);
        let csd = cosine_sine_decompose(&UnitaryMatrix::from_mat_unchecked(u.clone()))?;
        let ry_angles: Vec<f64> = csd.thetas.iter().map(|t| -t).collect();
        let mut b1 = csd.b1.into_mat();
        let kind = if self.opts.opt_a1 {
            Entangler::Cz
        } else {
            Entangler::Cnot
        };
        let mut center = ladder(MuxAxis::Y, top, rest, &ry_angles, kind);
        if self.opts.opt_a1 {
            // the ladder's closing CZ(last wire, top) is diagonal; fold it into
            // the lower cofactor of the left multiplexor as Z on the last wire
            let low = *rest.last().unwrap();
            let last = center.pop();
            debug_assert!(matches!(last, Some(Gate::Cz { a, b }) if a == low && b == top));
            for col in (1..b1.ncols()).step_by(2) {
                b1.column_mut(col).neg_mut();
            }
        }
        let right = demultiplex(&csd.a2, &csd.b2)?;
        let left = demultiplex(&csd.a1, &UnitaryMatrix::from_mat_unchecked(b1))?;

        self.decompose(&right.w, rest)?;
        for g in ladder(MuxAxis::Z, top, rest, &right.rz_angles, Entangler::Cnot) {
            self.gate(g);
        }
        self.decompose(&right.v, rest)?;
        for g in center {
            self.gate(g);
        }
        self.decompose(&left.w, rest)?;
        for g in ladder(MuxAxis::Z, top, rest, &left.rz_angles, Entangler::Cnot) {
            self.gate(g);
        }
        self.decompose(&left.v, rest)
    }

    /// Lowers the collected pieces. With diagonal migration every leaf but
    /// the last is synthesized up to a diagonal that is pushed into the next
    /// leaf; everything between two leaves is a multiplexor whose selects
    /// include the leaf wires, so it commutes with that diagonal.
    fn finish(self, width: usize) -> Result<Circuit> {
        let mut out = Circuit::new(width);
        let last_leaf = self.pieces.iter().rposition(|p| matches!(p, Piece::Leaf(..)));
        let mut carried: Option<([usize; 2], Vec<f64>)> = None;
        let mut phase = 0.0;
        for (i, piece) in self.pieces.into_iter().enumerate() {
            match piece {
                Piece::Gate(Gate::Phase { angle }) => phase += angle,
                Piece::Gate(g) => {
                    if g.angle().is_none_or(|a| a.abs() > ANGLE_EPS) {
                        out.push(g);
                    }
                }
                Piece::Leaf(wires, mut m) => {
                    if let Some((on, phases)) = carried.take() {
                        if on != wires {
                            return Err(Error::Numerical {
                                what: "diagonal migration wiring",
                                residual: f64::NAN,
                            });
                        }
                        for (col, p) in phases.iter().enumerate() {
                            let z = C64::from_polar(1.0, *p);
                            m.column_mut(col).scale_mut_c(z);
                        }
                    }
                    let leaf = UnitaryMatrix::from_mat_unchecked(m);
                    let circ = if self.opts.opt_a2 && Some(i) != last_leaf {
                        let (circ, diag) = two_qubit_up_to_diagonal(&leaf)?;
                        carried = Some((wires, diag.phases));
                        circ
                    } else {
                        synth_two_qubit(&leaf)?
                    };
                    for g in circ.gates() {
                        match *g {
                            Gate::Phase { angle } => phase += angle,
                            g => out.push(g.remap(&wires)),
                        }
                    }
                }
            }
        }
        if phase.abs() > ANGLE_EPS {
            out.push(Gate::Phase { angle: phase });
        }
        Ok(out)
    }
}

trait ScaleColumn {
    fn scale_mut_c(&mut self, z: C64);
}

impl<S: nalgebra::StorageMut<C64, nalgebra::Dyn, nalgebra::U1>> ScaleColumn
    for nalgebra::Matrix<C64, nalgebra::Dyn, nalgebra::U1, S>
{
    fn scale_mut_c(&mut self, z: C64) {
        for x in self.iter_mut() {
            *x *= z;
        }
    }
}

/// Quantum Shannon decomposition: cosine-sine split on the top qubit, both
/// block-diagonal sides demultiplexed, cofactors recursed down to one- or
/// two-qubit leaves.
pub fn synth_qsd(u: &UnitaryMatrix, opts: &QsdOptions) -> Result<(Circuit, SynthesisReport)> {
    opts.validate()?;
    let start = Instant::now();
    let n = u.qubits();
    let mut rec = Recursion {
        opts: *opts,
        pieces: Vec::new(),
    };
    let wires: Vec<usize> = (0..n).collect();
    rec.decompose(u.as_mat(), &wires)?;
    let mut circuit = rec.finish(n)?;
    if opts.nn {
        circuit = map_nearest_neighbor(&circuit);
    }
    let recon_err = reconstruction_error(u, &circuit)?;
    if recon_err > 1e3 * TOL_RECON || !recon_err.is_finite() {
        return Err(Error::Numerical {
            what: "shannon decomposition",
            residual: recon_err,
        });
    }
    let report = SynthesisReport {
        method: Method::Qsd,
        counts: circuit.counts(),
        recon_err,
        options: *opts,
        elapsed: start.elapsed().as_secs_f64(),
    };
    Ok((circuit, report))
}
