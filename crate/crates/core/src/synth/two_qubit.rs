//! Two-qubit operators: canonical (magic-basis) decomposition, three-CNOT
//! synthesis and two-CNOT synthesis up to a diagonal.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64 as C64;

use crate::circuit::{Circuit, Gate, ANGLE_EPS};
use crate::error::{Error, Result};
use crate::linalg::UnitaryMatrix;
use crate::mux::{zyz_of, DiagonalSpec, M2};
use crate::sim::circuit_to_unitary;

type C2 = Matrix2<C64>;
type C4 = Matrix4<C64>;

const FACTOR_TOL: f64 = 1e-9;
const SYNTH_TOL: f64 = 1e-9;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn magic() -> C4 {
    let h = FRAC_1_SQRT_2;
    C4::new(
        c(h, 0.),
        c(0., 0.),
        c(0., 0.),
        c(0., h),
        c(0., 0.),
        c(0., h),
        c(h, 0.),
        c(0., 0.),
        c(0., 0.),
        c(0., h),
        c(-h, 0.),
        c(0., 0.),
        c(h, 0.),
        c(0., 0.),
        c(0., 0.),
        c(0., -h),
    )
}

fn pauli_x() -> C2 {
    C2::new(c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.))
}

fn pauli_y() -> C2 {
    C2::new(c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.))
}

fn pauli_z() -> C2 {
    C2::new(c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.))
}

/// `exp(−iθ/2·Z)`.
fn std_rz(theta: f64) -> C2 {
    C2::new(
        C64::from_polar(1.0, -theta / 2.0),
        c(0., 0.),
        c(0., 0.),
        C64::from_polar(1.0, theta / 2.0),
    )
}

/// `exp(−iθ/2·X)`.
fn std_rx(theta: f64) -> C2 {
    let (s, co) = (theta / 2.0).sin_cos();
    C2::new(c(co, 0.), c(0., -s), c(0., -s), c(co, 0.))
}

fn kron2(a: &C2, b: &C2) -> C4 {
    C4::from_fn(|r, col| a[(r / 2, col / 2)] * b[(r % 2, col % 2)])
}

fn to_c4(u: &UnitaryMatrix) -> C4 {
    C4::from_fn(|r, col| u[(r, col)])
}

fn to_m2(m: &C2) -> M2 {
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

fn max_diff4(a: &C4, b: &C4) -> f64 {
    a.iter().zip(b.iter()).fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

/// Splits a 4×4 matrix into `a ⊗ b`, or `None` if it is not a product.
fn factor_local(l: &C4) -> Option<(C2, C2)> {
    let block = |r: usize, col: usize| l.fixed_view::<2, 2>(2 * r, 2 * col).into_owned();
    let (mut best, mut best_norm) = ((0, 0), -1.0);
    for r in 0..2 {
        for col in 0..2 {
            let nrm = block(r, col).norm();
            if nrm > best_norm {
                best = (r, col);
                best_norm = nrm;
            }
        }
    }
    let blk = block(best.0, best.1);
    let det = blk.determinant();
    if det.norm() < 1e-12 {
        return None;
    }
    let b = blk / det.sqrt();
    let a = C2::from_fn(|r, col| (b.adjoint() * block(r, col)).trace() / 2.0);
    if max_diff4(&kron2(&a, &b), l) > FACTOR_TOL {
        return None;
    }
    Some((a, b))
}

/// `exp(i(a·XX + b·YY + c·ZZ))`.
pub fn interaction(a: f64, b: f64, cc: f64) -> UnitaryMatrix {
    let e = |t: f64, p: &C2| {
        let pp = kron2(p, p);
        C4::identity() * c(t.cos(), 0.) + pp * c(0., t.sin())
    };
    let m = e(a, &pauli_x()) * e(b, &pauli_y()) * e(cc, &pauli_z());
    UnitaryMatrix::from_mat_unchecked(nalgebra::DMatrix::from_fn(4, 4, |r, col| m[(r, col)]))
}

/// `u = e^{i·phase} · (after.0 ⊗ after.1) · N(a, b, c) · (before.0 ⊗ before.1)`
/// with `N(a, b, c) = exp(i(a·XX + b·YY + c·ZZ))`.
#[derive(Clone, Debug)]
pub struct KakDecomposition {
    pub phase: f64,
    pub after: (Matrix2<C64>, Matrix2<C64>),
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub before: (Matrix2<C64>, Matrix2<C64>),
}

impl KakDecomposition {
    pub fn matrix(&self) -> Matrix4<C64> {
        let n = interaction(self.a, self.b, self.c);
        let n4 = C4::from_fn(|r, col| n[(r, col)]);
        kron2(&self.after.0, &self.after.1)
            * n4
            * kron2(&self.before.0, &self.before.1)
            * C64::from_polar(1.0, self.phase)
    }
}

/// Real orthogonal `P` with `P^T·sym·P` diagonal, for a complex symmetric
/// unitary `sym`. Its real and imaginary parts commute, so a generic real
/// combination of them shares the eigenvectors; a few mixing weights are
/// tried and the best one kept.
fn diagonalize_symmetric_unitary(sym: &C4) -> (Matrix4<f64>, f64) {
    let re = sym.map(|z| z.re);
    let im = sym.map(|z| z.im);
    let mut best: Option<(Matrix4<f64>, f64)> = None;
    for kappa in [0.618_033_988_75, -1.371_9, 2.531_7, 0.123_456_7, -0.381_966] {
        let mix = re + im * kappa;
        let eig = mix.symmetric_eigen();
        let p = eig.eigenvectors;
        let pc = p.map(|x| c(x, 0.));
        let d = pc.transpose() * sym * pc;
        let mut off = 0.0f64;
        for r in 0..4 {
            for col in 0..4 {
                if r != col {
                    off = off.max(d[(r, col)].norm());
                }
            }
        }
        if best.as_ref().is_none_or(|(_, o)| off < *o) {
            best = Some((p, off));
        }
    }
    best.expect("at least one mixing weight")
}

/// Canonical decomposition of a two-qubit unitary.
pub fn kak(u: &UnitaryMatrix) -> Result<KakDecomposition> {
    if u.qubits() != 2 {
        return Err(Error::Dimension(format!(
            "expected a two-qubit unitary, got {} qubits",
            u.qubits()
        )));
    }
    let u4 = to_c4(u);
    let q = u4.determinant().arg() / 4.0;
    let us = u4 * C64::from_polar(1.0, -q);
    let m = magic();
    let up = m.adjoint() * us * m;
    let sym = up.transpose() * up;
    let (mut p, off) = diagonalize_symmetric_unitary(&sym);
    if off > 1e-9 {
        return Err(Error::Numerical {
            what: "magic-basis diagonalization",
            residual: off,
        });
    }
    if p.determinant() < 0.0 {
        for r in 0..4 {
            p[(r, 0)] = -p[(r, 0)];
        }
    }
    let pc = p.map(|x| c(x, 0.));
    let d = pc.transpose() * sym * pc;
    let mut lam: [f64; 4] = std::array::from_fn(|k| d[(k, k)].arg() / 2.0);
    let phases = C4::from_diagonal(&nalgebra::Vector4::from_fn(|k, _| C64::from_polar(1.0, -lam[k])));
    let mut k1 = (up * pc * phases).map(|z| z.re);
    if k1.determinant() < 0.0 {
        for r in 0..4 {
            k1[(r, 0)] = -k1[(r, 0)];
        }
        lam[0] += std::f64::consts::PI;
    }
    let g = lam.iter().sum::<f64>() / 4.0;
    let l: [f64; 4] = std::array::from_fn(|k| lam[k] - g);
    let (a, b, cc) = ((l[0] + l[1]) / 2.0, (l[1] + l[3]) / 2.0, (l[0] + l[3]) / 2.0);

    let after = m * k1.map(|x| c(x, 0.)) * m.adjoint();
    let before = m * pc.transpose() * m.adjoint();
    let after = factor_local(&after).ok_or(Error::Numerical {
        what: "local factor",
        residual: f64::NAN,
    })?;
    let before = factor_local(&before).ok_or(Error::Numerical {
        what: "local factor",
        residual: f64::NAN,
    })?;
    let out = KakDecomposition {
        phase: q + g,
        after,
        a,
        b,
        c: cc,
        before,
    };
    let residual = max_diff4(&out.matrix(), &u4);
    if residual > SYNTH_TOL {
        return Err(Error::Numerical {
            what: "canonical decomposition",
            residual,
        });
    }
    Ok(out)
}

fn push_local(circ: &mut Circuit, m: &C2, wire: usize) {
    let z = zyz_of(&to_m2(m));
    for g in [
        Gate::Rz {
            target: wire,
            angle: z.gamma,
        },
        Gate::Ry {
            target: wire,
            angle: z.beta,
        },
        Gate::Rz {
            target: wire,
            angle: z.alpha,
        },
    ] {
        if g.angle().unwrap().abs() > ANGLE_EPS {
            circ.push(g);
        }
    }
}

/// Appends the global phase that makes `circ` equal `target` exactly.
fn fix_phase(mut circ: Circuit, target: &C4, what: &'static str) -> Result<Circuit> {
    let got = circuit_to_unitary(&circ)?;
    let g4 = C4::from_fn(|r, col| got[(r, col)]);
    let tr = (g4.adjoint() * target).trace();
    let phase = if tr.norm() > 0.0 { tr.arg() } else { 0.0 };
    let residual = max_diff4(&(g4 * C64::from_polar(1.0, phase)), target);
    if residual > SYNTH_TOL {
        return Err(Error::Numerical { what, residual });
    }
    if phase.abs() > ANGLE_EPS {
        circ.push(Gate::Phase { angle: phase });
    }
    Ok(circ)
}

/// `N(a, b, c)` up to a global phase with three CNOTs.
fn push_interaction(circ: &mut Circuit, a: f64, b: f64, cc: f64) {
    for g in [
        Gate::Rz {
            target: 1,
            angle: FRAC_PI_2,
        },
        Gate::Cnot { control: 1, target: 0 },
        Gate::Rz {
            target: 0,
            angle: -2.0 * cc - FRAC_PI_2,
        },
        Gate::Ry {
            target: 1,
            angle: 2.0 * a + FRAC_PI_2,
        },
        Gate::Cnot { control: 0, target: 1 },
        Gate::Ry {
            target: 1,
            angle: -2.0 * b - FRAC_PI_2,
        },
        Gate::Cnot { control: 1, target: 0 },
        Gate::Rz {
            target: 0,
            angle: -FRAC_PI_2,
        },
    ] {
        circ.push(g);
    }
}

/// Exact two-qubit synthesis with at most three CNOTs; product operators
/// use none.
pub fn synth_two_qubit(u: &UnitaryMatrix) -> Result<Circuit> {
    if u.qubits() != 2 {
        return Err(Error::Dimension(format!(
            "expected a two-qubit unitary, got {} qubits",
            u.qubits()
        )));
    }
    let u4 = to_c4(u);
    let mut circ = Circuit::new(2);
    if let Some((a, b)) = factor_local(&u4) {
        push_local(&mut circ, &a, 0);
        push_local(&mut circ, &b, 1);
        return fix_phase(circ, &u4, "local two-qubit synthesis");
    }
    let k = kak(u)?;
    push_local(&mut circ, &k.before.0, 0);
    push_local(&mut circ, &k.before.1, 1);
    push_interaction(&mut circ, k.a, k.b, k.c);
    push_local(&mut circ, &k.after.0, 0);
    push_local(&mut circ, &k.after.1, 1);
    fix_phase(circ, &u4, "two-qubit synthesis")
}

/// Two-CNOT circuit `C` and diagonal `Δ` with `u = Δ·C` (the diagonal acts
/// after the circuit).
pub fn two_qubit_up_to_diagonal(u: &UnitaryMatrix) -> Result<(Circuit, DiagonalSpec)> {
    if u.qubits() != 2 {
        return Err(Error::Dimension(format!(
            "expected a two-qubit unitary, got {} qubits",
            u.qubits()
        )));
    }
    let u4 = to_c4(u);
    let delta = u4.determinant().arg() / 4.0;
    let us = u4 * C64::from_polar(1.0, -delta);
    let yy = kron2(&pauli_y(), &pauli_y());
    let w = us * yy * us.transpose() * yy;
    let ta = w[(0, 0)] + w[(3, 3)];
    let tb = w[(1, 1)] + w[(2, 2)];
    let (sy, sx) = (-(ta.im + tb.im), ta.re - tb.re);
    // every ψ works when both vanish; keep the diagonal trivial then
    let psi = if sy.abs().max(sx.abs()) < 1e-12 {
        0.0
    } else {
        sy.atan2(sx)
    };
    let dg = [
        C64::from_polar(1.0, psi),
        c(1., 0.),
        C64::from_polar(1.0, -psi),
        c(1., 0.),
    ];
    let v = C4::from_fn(|r, col| dg[r] * us[(r, col)]);
    let vu = UnitaryMatrix::from_mat_unchecked(nalgebra::DMatrix::from_fn(4, 4, |r, col| v[(r, col)]));
    let k = kak(&vu)?;

    let mut coords = [k.a, k.b, k.c];
    let (mut after, mut before) = (k.after, k.before);
    let (zero, steps) = (0..3)
        .map(|i| (i, (coords[i] / FRAC_PI_2).round()))
        .min_by(|x, y| {
            let dx = (coords[x.0] - x.1 * FRAC_PI_2).abs();
            let dy = (coords[y.0] - y.1 * FRAC_PI_2).abs();
            dx.total_cmp(&dy)
        })
        .unwrap();
    let slack = (coords[zero] - steps * FRAC_PI_2).abs();
    if slack > 1e-7 {
        return Err(Error::Numerical {
            what: "diagonal-equivalent template",
            residual: slack,
        });
    }
    let paulis = [pauli_x(), pauli_y(), pauli_z()];
    let shift = steps as i64;
    if shift != 0 {
        let mut p = C2::identity();
        for _ in 0..shift.unsigned_abs() {
            p *= paulis[zero];
        }
        after = (after.0 * p, after.1 * p);
    }
    coords[zero] = 0.0;
    match zero {
        0 => {
            let s = std_rz(FRAC_PI_2);
            after = (after.0 * s, after.1 * s);
            before = (s.adjoint() * before.0, s.adjoint() * before.1);
            coords.swap(0, 1);
        }
        2 => {
            let t = std_rx(FRAC_PI_2);
            after = (after.0 * t, after.1 * t);
            before = (t.adjoint() * before.0, t.adjoint() * before.1);
            coords.swap(1, 2);
        }
        _ => {}
    }
    let (a, cc) = (coords[0], coords[2]);
    let p0 = std_rz(FRAC_PI_2);
    let p1 = std_rx(FRAC_PI_2);

    let mut circ = Circuit::new(2);
    push_local(&mut circ, &(p0.adjoint() * before.0), 0);
    push_local(&mut circ, &(p1.adjoint() * before.1), 1);
    circ.push(Gate::Cnot { control: 0, target: 1 });
    for g in [
        Gate::Ry {
            target: 0,
            angle: -2.0 * a,
        },
        Gate::Ry {
            target: 1,
            angle: 2.0 * cc,
        },
    ] {
        if g.angle().unwrap().abs() > ANGLE_EPS {
            circ.push(g);
        }
    }
    circ.push(Gate::Cnot { control: 0, target: 1 });
    push_local(&mut circ, &(after.0 * p0), 0);
    push_local(&mut circ, &(after.1 * p1), 1);
    let target = v * C64::from_polar(1.0, delta);
    let circ = fix_phase(circ, &target, "two-qubit synthesis up to diagonal")?;
    let diag = DiagonalSpec {
        qubits: vec![0, 1],
        phases: vec![-psi, 0.0, psi, 0.0],
    };
    Ok((circ, diag))
}

/// `max |u − Δ·C|` for the pair returned by [`two_qubit_up_to_diagonal`].
#[cfg(test)]
pub(crate) fn up_to_diagonal_error(u: &UnitaryMatrix, circ: &Circuit, diag: &DiagonalSpec) -> Result<f64> {
    let m = circuit_to_unitary(circ)?;
    let d = nalgebra::DMatrix::from_fn(4, 4, |r, col| {
        if r == col {
            C64::from_polar(1.0, diag.phases[r])
        } else {
            c(0., 0.)
        }
    });
    Ok(crate::linalg::max_diff(&(d * m.into_mat()), u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::gate_matrix;
    use crate::linalg::{kron, max_diff, phase_aligned_distance, random_unitary, CMat};
    use std::f64::consts::FRAC_PI_4;

    fn dm(m: &C4) -> CMat {
        CMat::from_fn(4, 4, |r, col| m[(r, col)])
    }

    #[test]
    fn magic_basis_diagonalizes_interaction() {
        let (a, b, cc) = (0.3, -0.7, 1.1);
        let m = magic();
        let n = interaction(a, b, cc);
        let n4 = C4::from_fn(|r, col| n[(r, col)]);
        let d = m.adjoint() * n4 * m;
        let want = [a - b + cc, a + b - cc, -a - b - cc, -a + b + cc];
        for r in 0..4 {
            for col in 0..4 {
                let expect = if r == col {
                    C64::from_polar(1.0, want[r])
                } else {
                    c(0., 0.)
                };
                assert!((d[(r, col)] - expect).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn three_cnot_interaction_matches_exponential() {
        for (a, b, cc) in [
            (0.3, -0.7, 1.1),
            (0.0, 0.0, 0.0),
            (FRAC_PI_4, FRAC_PI_4, FRAC_PI_4),
            (-1.3, 2.2, 0.05),
        ] {
            let mut circ = Circuit::new(2);
            push_interaction(&mut circ, a, b, cc);
            let got = circuit_to_unitary(&circ).unwrap();
            let (_, err) = phase_aligned_distance(&got, &interaction(a, b, cc)).unwrap();
            assert!(err < 1e-13);
        }
    }

    #[test]
    fn kak_reassembles_random() {
        for seed in 0..30 {
            let u = random_unitary(2, seed);
            let k = kak(&u).unwrap();
            assert!(max_diff(&dm(&k.matrix()), &u) < 1e-10);
        }
    }

    #[test]
    fn local_inputs_use_no_cnots() {
        for seed in 0..5 {
            let a = random_unitary(1, seed);
            let b = random_unitary(1, 100 + seed);
            let u = UnitaryMatrix::from_mat_unchecked(kron(&a, &b) * C64::from_polar(1.0, 0.4));
            let circ = synth_two_qubit(&u).unwrap();
            assert_eq!(circ.counts().cnot, 0);
            assert!(max_diff(&circuit_to_unitary(&circ).unwrap(), &u) <= 1e-10);
        }
    }

    #[test]
    fn swap_and_random_use_three_cnots() {
        let mut swap = CMat::zeros(4, 4);
        for (r, col) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            swap[(r, col)] = c(1., 0.);
        }
        let swap = UnitaryMatrix::new(swap).unwrap();
        let circ = synth_two_qubit(&swap).unwrap();
        assert_eq!(circ.counts().cnot, 3);
        assert!(max_diff(&circuit_to_unitary(&circ).unwrap(), &swap) <= 1e-10);
        for seed in 0..30 {
            let u = random_unitary(2, 500 + seed);
            let circ = synth_two_qubit(&u).unwrap();
            assert_eq!(circ.counts().cnot, 3);
            assert!(max_diff(&circuit_to_unitary(&circ).unwrap(), &u) <= 1e-10);
        }
    }

    #[test]
    fn structured_inputs_synthesize() {
        let cnot = gate_matrix(&Gate::Cnot { control: 0, target: 1 }, 2).unwrap();
        let cz = gate_matrix(&Gate::Cz { a: 0, b: 1 }, 2).unwrap();
        let id = UnitaryMatrix::identity(2);
        let iswap_like = interaction(FRAC_PI_4, FRAC_PI_4, 0.0);
        for u in [cnot, cz, id, iswap_like, interaction(0.2, 0.2, 0.2)] {
            let circ = synth_two_qubit(&u).unwrap();
            assert!(circ.counts().cnot <= 3);
            assert!(max_diff(&circuit_to_unitary(&circ).unwrap(), &u) <= 1e-10);
            let (circ, diag) = two_qubit_up_to_diagonal(&u).unwrap();
            assert_eq!(circ.counts().cnot, 2);
            assert!(up_to_diagonal_error(&u, &circ, &diag).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn up_to_diagonal_random() {
        for seed in 0..50 {
            let u = random_unitary(2, 900 + seed);
            let (circ, diag) = two_qubit_up_to_diagonal(&u).unwrap();
            assert_eq!(circ.counts().cnot, 2);
            assert!(up_to_diagonal_error(&u, &circ, &diag).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn template_input_has_trivial_diagonal() {
        let mut circ = Circuit::new(2);
        circ.push(Gate::Ry { target: 0, angle: 0.4 });
        circ.push(Gate::Cnot { control: 0, target: 1 });
        circ.push(Gate::Ry { target: 0, angle: 1.2 });
        circ.push(Gate::Ry { target: 1, angle: -0.3 });
        circ.push(Gate::Cnot { control: 0, target: 1 });
        circ.push(Gate::Rz { target: 1, angle: 0.9 });
        let u = circuit_to_unitary(&circ).unwrap();
        let (out, diag) = two_qubit_up_to_diagonal(&u).unwrap();
        assert!(diag.phases.iter().all(|p| p.abs() < 1e-9));
        assert!(up_to_diagonal_error(&u, &out, &diag).unwrap() <= 1e-9);
    }
}
