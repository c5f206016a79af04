//! Multiplexed rotations, diagonal operators and multiplexed one-qubit gates
//! lowered to elementary gates, plus the one-qubit ZYZ and Bloch-sphere
//! helpers they are built from.

use num_complex::Complex64 as C64;

use crate::circuit::{peephole_simplify, Circuit, Gate, ANGLE_EPS};
use crate::error::{Error, Result};
use crate::linalg::{check_unitary, UnitaryMatrix};

/// 2×2 complex matrix in row-major nested form.
pub type M2 = [[C64; 2]; 2];

/// Amplitudes below this (relative) count as exactly zero.
pub const ZERO_AMP: f64 = 1e-13;
/// A two-amplitude block whose squared norm is below this is the zero vector.
pub const ZERO_BLOCK_SQ: f64 = 1e-24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MuxAxis {
    Y,
    Z,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Entangler {
    Cnot,
    Cz,
}

/// `⊕_j R_axis(angles[j])` on `data_qubit`, where `j` is the bitstring on
/// `select_qubits` read most significant first.
#[derive(Clone, Debug, PartialEq)]
pub struct MuxRotationSpec {
    pub axis: MuxAxis,
    pub data_qubit: usize,
    pub select_qubits: Vec<usize>,
    pub angles: Vec<f64>,
}

impl MuxRotationSpec {
    pub fn new(axis: MuxAxis, data_qubit: usize, select_qubits: Vec<usize>, angles: Vec<f64>) -> Result<Self> {
        let spec = MuxRotationSpec {
            axis,
            data_qubit,
            select_qubits,
            angles,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.angles.len() != 1usize << self.select_qubits.len() {
            return Err(Error::Dimension(format!(
                "{} angles for {} selects",
                self.angles.len(),
                self.select_qubits.len()
            )));
        }
        let mut all = self.select_qubits.clone();
        all.push(self.data_qubit);
        all.sort_unstable();
        if all.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidGate("multiplexor wires must be distinct".into()));
        }
        Ok(())
    }

    fn width(&self) -> usize {
        self.select_qubits
            .iter()
            .copied()
            .chain([self.data_qubit])
            .max()
            .unwrap()
            + 1
    }
}

/// `diag(e^{iφ_j})` over `qubits`, most significant first.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalSpec {
    pub qubits: Vec<usize>,
    pub phases: Vec<f64>,
}

impl DiagonalSpec {
    pub fn new(qubits: Vec<usize>, phases: Vec<f64>) -> Result<Self> {
        if phases.len() != 1usize << qubits.len() {
            return Err(Error::Dimension(format!(
                "{} phases for {} qubits",
                phases.len(),
                qubits.len()
            )));
        }
        Ok(DiagonalSpec { qubits, phases })
    }
}

/// `u = e^{iΦ}·Rz(α)·Ry(β)·Rz(γ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZyzAngles {
    pub phi: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl ZyzAngles {
    pub fn matrix(&self) -> M2 {
        let rz = |t: f64| Gate::Rz { target: 0, angle: t }.single_qubit_matrix().unwrap();
        let ry = Gate::Ry {
            target: 0,
            angle: self.beta,
        }
        .single_qubit_matrix()
        .unwrap();
        let m = mul2(&rz(self.alpha), &mul2(&ry, &rz(self.gamma)));
        let p = C64::from_polar(1.0, self.phi);
        [[p * m[0][0], p * m[0][1]], [p * m[1][0], p * m[1][1]]]
    }
}

pub(crate) fn mul2(a: &M2, b: &M2) -> M2 {
    let mut m = [[C64::new(0.0, 0.0); 2]; 2];
    for (r, row) in m.iter_mut().enumerate() {
        for (c, z) in row.iter_mut().enumerate() {
            *z = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    m
}

pub(crate) fn m2_from(u: &UnitaryMatrix) -> M2 {
    [[u[(0, 0)], u[(0, 1)]], [u[(1, 0)], u[(1, 1)]]]
}

/// ZYZ angles with `β ∈ [0, π]`; when `β` sits at 0 or π, `γ = 0`.
pub fn zyz_angles(u: &UnitaryMatrix) -> Result<ZyzAngles> {
    if u.qubits() != 1 {
        return Err(Error::Dimension(format!(
            "expected a one-qubit unitary, got {} qubits",
            u.qubits()
        )));
    }
    Ok(zyz_of(&m2_from(u)))
}

pub(crate) fn zyz_of(u: &M2) -> ZyzAngles {
    let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
    let phi = det.arg() / 2.0;
    let unphase = C64::from_polar(1.0, -phi);
    let a = u[0][0] * unphase;
    let b = u[0][1] * unphase;
    let beta = 2.0 * b.norm().atan2(a.norm());
    let (alpha, gamma) = if b.norm() < ZERO_AMP {
        (-2.0 * a.arg(), 0.0)
    } else if a.norm() < ZERO_AMP {
        (-2.0 * b.arg(), 0.0)
    } else {
        (-a.arg() - b.arg(), -a.arg() + b.arg())
    };
    ZyzAngles {
        phi,
        alpha,
        beta,
        gamma,
    }
}

/// Angles `(φ, θ)` such that `Ry(−θ)·Rz(−φ)·psi = residual·|target⟩`.
///
/// A zero block gets `(0, 0)` and residual 0.
pub fn bloch_to_zero(psi: [C64; 2], target: u8) -> (f64, f64, C64) {
    let r2 = psi[0].norm_sqr() + psi[1].norm_sqr();
    if r2 < ZERO_BLOCK_SQ {
        return (0.0, 0.0, C64::new(0.0, 0.0));
    }
    let r = r2.sqrt();
    let (m0, m1) = (psi[0].norm(), psi[1].norm());
    let theta_b = 2.0 * m1.atan2(m0);
    let phi = if m0 < ZERO_AMP * r || m1 < ZERO_AMP * r {
        0.0
    } else {
        psi[1].arg() - psi[0].arg()
    };
    let mut theta = if target == 0 {
        -theta_b
    } else {
        std::f64::consts::PI - theta_b
    };
    if theta <= -std::f64::consts::PI {
        theta += 2.0 * std::f64::consts::PI;
    }
    let rz = Gate::Rz { target: 0, angle: -phi }.single_qubit_matrix().unwrap();
    let ry = Gate::Ry {
        target: 0,
        angle: -theta,
    }
    .single_qubit_matrix()
    .unwrap();
    let m = mul2(&ry, &rz);
    let idx = usize::from(target != 0);
    let residual = m[idx][0] * psi[0] + m[idx][1] * psi[1];
    (phi, theta, residual)
}

/// Slot angles for the entangler ladder realizing `⊕_j R(angles[j])`.
pub fn demux_rotation_angles(angles: &[f64]) -> Result<Vec<f64>> {
    if angles.is_empty() || !angles.len().is_power_of_two() {
        return Err(Error::Dimension(format!(
            "{} angles is not a power of two",
            angles.len()
        )));
    }
    Ok(slot_angles(angles))
}

fn slot_angles(theta: &[f64]) -> Vec<f64> {
    if theta.len() == 1 {
        return theta.to_vec();
    }
    let h = theta.len() / 2;
    let (lo, hi) = theta.split_at(h);
    let sum: Vec<f64> = lo.iter().zip(hi).map(|(x, y)| (x + y) / 2.0).collect();
    let diff: Vec<f64> = lo.iter().zip(hi).map(|(x, y)| (x - y) / 2.0).collect();
    let mut out = slot_angles(&sum);
    let mut tail = slot_angles(&diff);
    tail.reverse();
    out.extend(tail);
    out
}

/// For each ladder slot, the index (0 = most significant) of the select
/// that drives the entangler after that slot's rotation.
pub(crate) fn ladder_controls(k: usize) -> Vec<usize> {
    match k {
        0 => Vec::new(),
        1 => vec![0, 0],
        _ => {
            let prev = ladder_controls(k - 1);
            let m = prev.len();
            let mut out: Vec<usize> = prev[..m - 1].iter().map(|c| c + 1).collect();
            out.push(0);
            out.extend(prev[..m - 1].iter().rev().map(|c| c + 1));
            out.push(0);
            out
        }
    }
}

fn rotation(axis: MuxAxis, target: usize, angle: f64) -> Gate {
    match axis {
        MuxAxis::Y => Gate::Ry { target, angle },
        MuxAxis::Z => Gate::Rz { target, angle },
    }
}

fn entangler(kind: Entangler, control: usize, target: usize) -> Gate {
    match kind {
        Entangler::Cnot => Gate::Cnot { control, target },
        Entangler::Cz => Gate::Cz { a: control, b: target },
    }
}

/// Gate list of a multiplexed rotation ladder: `2^k` rotations interleaved
/// with `2^k` entanglers, the last of which is driven by the top select.
pub(crate) fn mux_rotation_gates(
    axis: MuxAxis,
    data: usize,
    selects: &[usize],
    angles: &[f64],
    kind: Entangler,
    reversed: bool,
) -> Vec<Gate> {
    debug_assert_eq!(angles.len(), 1 << selects.len());
    if selects.is_empty() {
        return vec![rotation(axis, data, angles[0])];
    }
    let slots = slot_angles(angles);
    let controls = ladder_controls(selects.len());
    let mut gates = Vec::with_capacity(2 * slots.len());
    for (phi, c) in slots.iter().zip(&controls) {
        gates.push(rotation(axis, data, *phi));
        gates.push(entangler(kind, selects[*c], data));
    }
    if reversed {
        gates.reverse();
    }
    gates
}

/// Lowers a multiplexed Ry or Rz. The CZ entangler is only valid for Ry.
pub fn synth_mux_rotation(spec: &MuxRotationSpec, kind: Entangler, reversed: bool) -> Result<Circuit> {
    spec.validate()?;
    if kind == Entangler::Cz && spec.axis == MuxAxis::Z {
        return Err(Error::OptionConflict("CZ ladders only realize multiplexed Ry".into()));
    }
    let gates = mux_rotation_gates(
        spec.axis,
        spec.data_qubit,
        &spec.select_qubits,
        &spec.angles,
        kind,
        reversed,
    );
    Circuit::from_gates(spec.width(), gates)
}

pub(crate) fn is_uniform(angles: &[f64]) -> bool {
    angles.iter().all(|a| (a - angles[0]).abs() <= ANGLE_EPS)
}

/// Appends the gates of `diag(e^{iφ_j})` over `qubits` to `out`.
pub(crate) fn emit_diagonal(out: &mut Circuit, qubits: &[usize], phases: &[f64]) {
    let mut phases = phases.to_vec();
    for m in (1..=qubits.len()).rev() {
        let data = qubits[m - 1];
        let selects = &qubits[..m - 1];
        let turns: Vec<f64> = phases.chunks(2).map(|p| p[1] - p[0]).collect();
        if is_uniform(&turns) {
            let mean = turns.iter().sum::<f64>() / turns.len() as f64;
            if mean.abs() > ANGLE_EPS {
                out.push(Gate::Rz {
                    target: data,
                    angle: mean,
                });
            }
        } else {
            for g in mux_rotation_gates(MuxAxis::Z, data, selects, &turns, Entangler::Cnot, false) {
                out.push(g);
            }
        }
        phases = phases.chunks(2).map(|p| (p[0] + p[1]) / 2.0).collect();
    }
    if phases[0].abs() > ANGLE_EPS {
        out.push(Gate::Phase { angle: phases[0] });
    }
}

/// Diagonal operator as Rz multiplexors peeled from the least significant
/// qubit upward, ending in a global phase. Uses `2^m − 2` CNOTs.
pub fn synth_diagonal(spec: &DiagonalSpec) -> Result<Circuit> {
    if spec.phases.len() != 1usize << spec.qubits.len() {
        return Err(Error::Dimension(format!(
            "{} phases for {} qubits",
            spec.phases.len(),
            spec.qubits.len()
        )));
    }
    let width = spec.qubits.iter().max().map_or(0, |q| q + 1);
    let mut c = Circuit::new(width);
    emit_diagonal(&mut c, &spec.qubits, &spec.phases);
    Ok(c)
}

/// Multiplexed one-qubit gate `⊕_j cases[j]` as multiplexed Rz·Ry·Rz
/// followed by a diagonal on the selects.
pub fn synth_mux_1q(data_qubit: usize, selects: &[usize], cases: &[UnitaryMatrix]) -> Result<Circuit> {
    if cases.len() != 1usize << selects.len() {
        return Err(Error::Dimension(format!(
            "{} cases for {} selects",
            cases.len(),
            selects.len()
        )));
    }
    for u in cases {
        if u.qubits() != 1 || !check_unitary(u, crate::linalg::TOL_UNITARY)? {
            return Err(Error::NotUnitary { residual: f64::NAN });
        }
    }
    let spec_check = MuxRotationSpec::new(MuxAxis::Z, data_qubit, selects.to_vec(), vec![0.0; cases.len()])?;
    let zyz: Vec<ZyzAngles> = cases.iter().map(|u| zyz_of(&m2_from(u))).collect();
    let pick = |f: fn(&ZyzAngles) -> f64| zyz.iter().map(f).collect::<Vec<f64>>();
    let mut c = Circuit::new(spec_check.width());
    for (axis, angles, rev) in [
        (MuxAxis::Z, pick(|z| z.gamma), false),
        (MuxAxis::Y, pick(|z| z.beta), true),
        (MuxAxis::Z, pick(|z| z.alpha), false),
    ] {
        for g in mux_rotation_gates(axis, data_qubit, selects, &angles, Entangler::Cnot, rev) {
            c.push(g);
        }
    }
    emit_diagonal(&mut c, selects, &pick(|z| z.phi));
    Ok(peephole_simplify(&c))
}
