//! Gate-level circuits: elementary gates, counts, peephole simplification and
//! the line-oriented text format.

use std::fmt;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{CMat, UnitaryMatrix};

/// Rotations and global phases with `|angle|` at or below this are dropped.
pub const ANGLE_EPS: f64 = 1e-12;

/// Elementary gate. Rotation matrices:
///
/// * `Rx(θ) = [[c, i·s], [i·s, c]]`
/// * `Ry(θ) = [[c, s], [−s, c]]`
/// * `Rz(θ) = diag(e^{−iθ/2}, e^{iθ/2})`
///
/// with `c = cos θ/2`, `s = sin θ/2`. `Phase(θ)` is the scalar `e^{iθ}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    Rx { target: usize, angle: f64 },
    Ry { target: usize, angle: f64 },
    Rz { target: usize, angle: f64 },
    Cnot { control: usize, target: usize },
    Cz { a: usize, b: usize },
    Phase { angle: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    Cnot,
    Cz,
    Phase,
}

impl Gate {
    pub fn kind(&self) -> GateKind {
        match self {
            Gate::Rx { .. } => GateKind::Rx,
            Gate::Ry { .. } => GateKind::Ry,
            Gate::Rz { .. } => GateKind::Rz,
            Gate::Cnot { .. } => GateKind::Cnot,
            Gate::Cz { .. } => GateKind::Cz,
            Gate::Phase { .. } => GateKind::Phase,
        }
    }

    /// Wires the gate touches (empty for a global phase).
    pub fn wires(&self) -> Vec<usize> {
        match *self {
            Gate::Rx { target, .. } | Gate::Ry { target, .. } | Gate::Rz { target, .. } => vec![target],
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Cz { a, b } => vec![a, b],
            Gate::Phase { .. } => vec![],
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Rx { angle, .. } | Gate::Ry { angle, .. } | Gate::Rz { angle, .. } | Gate::Phase { angle } => {
                Some(angle)
            }
            _ => None,
        }
    }

    fn with_angle(self, new: f64) -> Gate {
        match self {
            Gate::Rx { target, .. } => Gate::Rx { target, angle: new },
            Gate::Ry { target, .. } => Gate::Ry { target, angle: new },
            Gate::Rz { target, .. } => Gate::Rz { target, angle: new },
            Gate::Phase { .. } => Gate::Phase { angle: new },
            g => g,
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::Cnot { .. } | Gate::Cz { .. })
    }

    pub fn inverse(&self) -> Gate {
        match self.angle() {
            Some(a) => self.with_angle(-a),
            None => *self,
        }
    }

    /// Relabels wires through `map`.
    pub fn remap(&self, map: &[usize]) -> Gate {
        match *self {
            Gate::Rx { target, angle } => Gate::Rx {
                target: map[target],
                angle,
            },
            Gate::Ry { target, angle } => Gate::Ry {
                target: map[target],
                angle,
            },
            Gate::Rz { target, angle } => Gate::Rz {
                target: map[target],
                angle,
            },
            Gate::Cnot { control, target } => Gate::Cnot {
                control: map[control],
                target: map[target],
            },
            Gate::Cz { a, b } => Gate::Cz { a: map[a], b: map[b] },
            g @ Gate::Phase { .. } => g,
        }
    }

    pub fn validate(&self, width: usize) -> Result<()> {
        for w in self.wires() {
            if w >= width {
                return Err(Error::IndexOutOfRange { index: w, width });
            }
        }
        match *self {
            Gate::Cnot { control, target } if control == target => {
                Err(Error::InvalidGate(format!("cnot control equals target ({control})")))
            }
            Gate::Cz { a, b } if a == b => Err(Error::InvalidGate(format!("cz on a single wire ({a})"))),
            _ => match self.angle() {
                Some(a) if !a.is_finite() => Err(Error::InvalidGate("non-finite angle".into())),
                _ => Ok(()),
            },
        }
    }

    /// 2×2 matrix of a one-qubit gate.
    pub fn single_qubit_matrix(&self) -> Option<[[C64; 2]; 2]> {
        let z = C64::new(0.0, 0.0);
        match *self {
            Gate::Rx { angle, .. } => {
                let (s, c) = (angle / 2.0).sin_cos();
                Some([
                    [C64::new(c, 0.0), C64::new(0.0, s)],
                    [C64::new(0.0, s), C64::new(c, 0.0)],
                ])
            }
            Gate::Ry { angle, .. } => {
                let (s, c) = (angle / 2.0).sin_cos();
                Some([
                    [C64::new(c, 0.0), C64::new(s, 0.0)],
                    [C64::new(-s, 0.0), C64::new(c, 0.0)],
                ])
            }
            Gate::Rz { angle, .. } => Some([
                [C64::from_polar(1.0, -angle / 2.0), z],
                [z, C64::from_polar(1.0, angle / 2.0)],
            ]),
            _ => None,
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::Rx { target, angle } => write!(f, "rx {target} {angle}"),
            Gate::Ry { target, angle } => write!(f, "ry {target} {angle}"),
            Gate::Rz { target, angle } => write!(f, "rz {target} {angle}"),
            Gate::Cnot { control, target } => write!(f, "cx {control} {target}"),
            Gate::Cz { a, b } => write!(f, "cz {a} {b}"),
            Gate::Phase { angle } => write!(f, "ph {angle}"),
        }
    }
}

/// Per-kind gate tallies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GateCounts {
    pub rx: usize,
    pub ry: usize,
    pub rz: usize,
    pub cnot: usize,
    pub cz: usize,
    pub phase: usize,
}

impl GateCounts {
    /// Two-qubit gate total; a CZ costs one CNOT.
    pub fn cnot_equivalent(&self) -> usize {
        self.cnot + self.cz
    }

    pub fn total(&self) -> usize {
        self.rx + self.ry + self.rz + self.cnot + self.cz + self.phase
    }
}

/// Ordered gate list over `width` wires; the first gate acts first.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(width: usize) -> Self {
        Circuit {
            width,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(width: usize, gates: Vec<Gate>) -> Result<Self> {
        for g in &gates {
            g.validate(width)?;
        }
        Ok(Circuit { width, gates })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn into_gates(self) -> Vec<Gate> {
        self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Appends a gate. Panics if it does not fit the circuit; synthesizers
    /// only emit gates on wires they were given.
    pub fn push(&mut self, g: Gate) {
        if let Err(e) = g.validate(self.width) {
            panic!("invalid gate {g:?}: {e}");
        }
        self.gates.push(g);
    }

    pub fn try_push(&mut self, g: Gate) -> Result<()> {
        g.validate(self.width)?;
        self.gates.push(g);
        Ok(())
    }

    /// Appends every gate of `other` (same wire labels).
    pub fn append(&mut self, other: &Circuit) {
        assert!(other.width <= self.width, "appended circuit is wider");
        self.gates.extend_from_slice(&other.gates);
    }

    /// Appends `other` with wire `w` relabelled to `map[w]`.
    pub fn append_mapped(&mut self, other: &Circuit, map: &[usize]) {
        assert_eq!(map.len(), other.width);
        for g in &other.gates {
            self.push(g.remap(map));
        }
    }

    /// The inverse circuit: reversed order, each gate inverted.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            width: self.width,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    pub fn counts(&self) -> GateCounts {
        gate_counts(self)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&emit_text(self))
    }
}

pub fn gate_counts(c: &Circuit) -> GateCounts {
    let mut k = GateCounts::default();
    for g in &c.gates {
        match g.kind() {
            GateKind::Rx => k.rx += 1,
            GateKind::Ry => k.ry += 1,
            GateKind::Rz => k.rz += 1,
            GateKind::Cnot => k.cnot += 1,
            GateKind::Cz => k.cz += 1,
            GateKind::Phase => k.phase += 1,
        }
    }
    k
}

/// Dense `2^width` matrix of a single gate, identity on untouched wires.
pub fn gate_matrix(g: &Gate, width: usize) -> Result<UnitaryMatrix> {
    g.validate(width)?;
    let d = 1usize << width;
    let bit = |w: usize| 1usize << (width - 1 - w);
    let mut m = CMat::zeros(d, d);
    match *g {
        Gate::Rx { target, .. } | Gate::Ry { target, .. } | Gate::Rz { target, .. } => {
            let u = g.single_qubit_matrix().expect("rotation");
            let mask = bit(target);
            for col in 0..d {
                let cb = usize::from(col & mask != 0);
                let base = col & !mask;
                m[(base, col)] = u[0][cb];
                m[(base | mask, col)] = u[1][cb];
            }
        }
        Gate::Cnot { control, target } => {
            for col in 0..d {
                let row = if col & bit(control) != 0 {
                    col ^ bit(target)
                } else {
                    col
                };
                m[(row, col)] = C64::new(1.0, 0.0);
            }
        }
        Gate::Cz { a, b } => {
            let both = bit(a) | bit(b);
            for col in 0..d {
                m[(col, col)] = C64::new(if col & both == both { -1.0 } else { 1.0 }, 0.0);
            }
        }
        Gate::Phase { angle } => {
            let z = C64::from_polar(1.0, angle);
            for col in 0..d {
                m[(col, col)] = z;
            }
        }
    }
    Ok(UnitaryMatrix::from_mat_unchecked(m))
}

/// Whether two non-phase gates commute, judged from their structure.
fn commutes(x: &Gate, y: &Gate) -> bool {
    let wx = x.wires();
    let wy = y.wires();
    if wx.iter().all(|w| !wy.contains(w)) {
        return true;
    }
    match (*x, *y) {
        (
            Gate::Cnot {
                control: c1,
                target: t1,
            },
            Gate::Cnot {
                control: c2,
                target: t2,
            },
        ) => c1 != t2 && c2 != t1,
        (Gate::Cz { .. }, Gate::Cz { .. }) => true,
        (Gate::Cnot { target, .. }, Gate::Cz { a, b }) | (Gate::Cz { a, b }, Gate::Cnot { target, .. }) => {
            target != a && target != b
        }
        (Gate::Rz { target: q, .. }, Gate::Cnot { control, .. })
        | (Gate::Cnot { control, .. }, Gate::Rz { target: q, .. }) => q == control,
        (Gate::Rx { target: q, .. }, Gate::Cnot { target, .. })
        | (Gate::Cnot { target, .. }, Gate::Rx { target: q, .. }) => q == target,
        (Gate::Rz { .. }, Gate::Cz { .. }) | (Gate::Cz { .. }, Gate::Rz { .. }) => true,
        (a, b) if a.kind() == b.kind() && !a.is_two_qubit() => true,
        _ => false,
    }
}

fn same_entangler(x: &Gate, y: &Gate) -> bool {
    match (*x, *y) {
        (
            Gate::Cnot {
                control: c1,
                target: t1,
            },
            Gate::Cnot {
                control: c2,
                target: t2,
            },
        ) => c1 == c2 && t1 == t2,
        (Gate::Cz { a: a1, b: b1 }, Gate::Cz { a: a2, b: b2 }) => (a1 == a2 && b1 == b2) || (a1 == b2 && b1 == a2),
        _ => false,
    }
}

fn same_rotation_slot(x: &Gate, y: &Gate) -> bool {
    !x.is_two_qubit() && x.kind() == y.kind() && x.wires() == y.wires()
}

/// Local rewriting to a fixpoint: cancels self-inverse entangler pairs and
/// merges same-axis rotations, looking past gates that commute; drops
/// near-zero rotations and folds all global phases into one trailing gate.
/// The matrix, global phase included, is unchanged.
pub fn peephole_simplify(c: &Circuit) -> Circuit {
    let mut phase = 0.0;
    let mut slots: Vec<Option<Gate>> = Vec::with_capacity(c.gates.len());
    for g in &c.gates {
        match *g {
            Gate::Phase { angle } => phase += angle,
            g => slots.push(Some(g)),
        }
    }

    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..slots.len() {
            let Some(g) = slots[i] else { continue };
            if let Some(a) = g.angle() {
                if a.abs() <= ANGLE_EPS {
                    slots[i] = None;
                    changed = true;
                    continue;
                }
            }
            for j in i + 1..slots.len() {
                let Some(h) = slots[j] else { continue };
                if g.is_two_qubit() && same_entangler(&g, &h) {
                    slots[i] = None;
                    slots[j] = None;
                    changed = true;
                    break;
                }
                if !g.is_two_qubit() && same_rotation_slot(&g, &h) {
                    let sum = g.angle().unwrap() + h.angle().unwrap();
                    slots[j] = Some(h.with_angle(sum));
                    slots[i] = None;
                    changed = true;
                    break;
                }
                if !commutes(&g, &h) {
                    break;
                }
            }
        }
    }

    let mut gates: Vec<Gate> = slots.into_iter().flatten().collect();
    if phase.abs() > ANGLE_EPS {
        gates.push(Gate::Phase { angle: phase });
    }
    Circuit { width: c.width, gates }
}

/// Serializes to the text format: `qubits <n>` then one gate per line.
pub fn emit_text(c: &Circuit) -> String {
    let mut s = format!("qubits {}\n", c.width);
    for g in &c.gates {
        s.push_str(&g.to_string());
        s.push('\n');
    }
    s
}

pub fn parse_text(text: &str) -> Result<Circuit> {
    let mut width: Option<usize> = None;
    let mut gates = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let index = |t: &str| t.parse::<usize>().map_err(|_| err(format!("bad qubit index '{t}'")));
        let angle = |t: &str| {
            t.parse::<f64>()
                .ok()
                .filter(|a| a.is_finite())
                .ok_or_else(|| err(format!("bad angle '{t}'")))
        };
        let arity = |n: usize| {
            if toks.len() == n + 1 {
                Ok(())
            } else {
                Err(err(format!("'{}' takes {n} argument(s)", toks[0])))
            }
        };
        if toks[0] == "qubits" {
            if width.is_some() {
                return Err(err("duplicate 'qubits' header".into()));
            }
            arity(1)?;
            width = Some(index(toks[1])?);
            continue;
        }
        let Some(w) = width else {
            return Err(err("gate before 'qubits' header".into()));
        };
        let g = match toks[0] {
            "rx" | "ry" | "rz" => {
                arity(2)?;
                let target = index(toks[1])?;
                let angle = angle(toks[2])?;
                match toks[0] {
                    "rx" => Gate::Rx { target, angle },
                    "ry" => Gate::Ry { target, angle },
                    _ => Gate::Rz { target, angle },
                }
            }
            "cx" => {
                arity(2)?;
                Gate::Cnot {
                    control: index(toks[1])?,
                    target: index(toks[2])?,
                }
            }
            "cz" => {
                arity(2)?;
                Gate::Cz {
                    a: index(toks[1])?,
                    b: index(toks[2])?,
                }
            }
            "ph" => {
                arity(1)?;
                Gate::Phase { angle: angle(toks[1])? }
            }
            other => return Err(err(format!("unknown gate '{other}'"))),
        };
        g.validate(w).map_err(|e| err(e.to_string()))?;
        gates.push(g);
    }
    let width = width.ok_or(Error::Parse {
        line: 0,
        msg: "missing 'qubits' header".into(),
    })?;
    Ok(Circuit { width, gates })
}

/// OpenQASM 3 rendering of the same gate sequence. The rotation conventions
/// differ from the standard library for `rx`/`ry`, so those angles are
/// negated on export.
pub fn to_qasm(c: &Circuit) -> String {
    let mut s = String::from("OPENQASM 3.0;\ninclude \"stdgates.inc\";\n");
    s.push_str("// q[0] is the most significant qubit\n");
    s.push_str(&format!("qubit[{}] q;\n", c.width));
    for g in &c.gates {
        let line = match *g {
            Gate::Rx { target, angle } => format!("rx({}) q[{target}];", -angle),
            Gate::Ry { target, angle } => format!("ry({}) q[{target}];", -angle),
            Gate::Rz { target, angle } => format!("rz({angle}) q[{target}];"),
            Gate::Cnot { control, target } => format!("cx q[{control}], q[{target}];"),
            Gate::Cz { a, b } => format!("cz q[{a}], q[{b}];"),
            Gate::Phase { angle } => format!("gphase({angle});"),
        };
        s.push_str(&line);
        s.push('\n');
    }
    s
}
