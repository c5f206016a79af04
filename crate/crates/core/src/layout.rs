use std::f64::consts::FRAC_PI_2;

use crate::circuit::{Circuit, Gate};
use crate::error::Result;

/// CNOT between wires at distance `k` as `4k − 4` nearest-neighbor CNOTs
/// (a lone CNOT when `k = 1`).
pub fn expand_long_cnot(control: usize, target: usize, width: usize) -> Result<Circuit> {
    Gate::Cnot { control, target }.validate(width)?;
    Ok(long_cnot(control, target, width))
}

fn long_cnot(control: usize, target: usize, width: usize) -> Circuit {
    let mut out = Circuit::new(width);
    let k = control.abs_diff(target);
    if k == 1 {
        out.push(Gate::Cnot { control, target });
        return out;
    }
    // p(0) = control ... p(k) = target
    let p = |i: usize| if control < target { control + i } else { control - i };
    let mut step = |i: usize| {
        out.push(Gate::Cnot {
            control: p(i),
            target: p(i + 1),
        })
    };
    for i in (0..k).rev() {
        step(i);
    }
    for i in 1..k {
        step(i);
    }
    for i in (0..k - 1).rev() {
        step(i);
    }
    for i in 1..k - 1 {
        step(i);
    }
    out
}

/// Rewrites every two-qubit gate to act on adjacent wires only. CZ becomes a
/// CNOT conjugated by Ry on its second wire before expansion.
pub fn map_nearest_neighbor(c: &Circuit) -> Circuit {
    let width = c.width();
    let mut out = Circuit::new(width);
    for g in c.gates() {
        match *g {
            Gate::Cnot { control, target } => out.append(&long_cnot(control, target, width)),
            Gate::Cz { a, b } if a.abs_diff(b) > 1 => {
                out.push(Gate::Ry {
                    target: b,
                    angle: -FRAC_PI_2,
                });
                out.append(&long_cnot(a, b, width));
                out.push(Gate::Ry {
                    target: b,
                    angle: FRAC_PI_2,
                });
            }
            g => out.push(g),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_diff, random_unitary};
    use crate::mux::{synth_mux_rotation, Entangler, MuxAxis, MuxRotationSpec};
    use crate::sim::circuit_to_unitary;
    use crate::synth::{synth_qsd, QsdOptions};

    fn adjacent(c: &Circuit) -> bool {
        c.gates().iter().all(|g| {
            !g.is_two_qubit() || {
                let w = g.wires();
                w[0].abs_diff(w[1]) == 1
            }
        })
    }

    #[test]
    fn long_cnot_matches_direct() {
        for width in 2..=6 {
            for c in 0..width {
                for t in 0..width {
                    if c == t {
                        continue;
                    }
                    let mut direct = Circuit::new(width);
                    direct.push(Gate::Cnot { control: c, target: t });
                    let ex = expand_long_cnot(c, t, width).unwrap();
                    let k = c.abs_diff(t);
                    assert_eq!(ex.len(), if k == 1 { 1 } else { 4 * k - 4 });
                    assert!(adjacent(&ex));
                    let a = circuit_to_unitary(&direct).unwrap();
                    let b = circuit_to_unitary(&ex).unwrap();
                    assert!(max_diff(&a, &b) < 1e-14);
                }
            }
        }
    }

    #[test]
    fn equal_or_out_of_range_wires_are_rejected() {
        assert!(expand_long_cnot(2, 2, 4).is_err());
        assert!(expand_long_cnot(0, 4, 4).is_err());
    }

    #[test]
    fn local_circuit_is_unchanged() {
        let mut c = Circuit::new(3);
        c.push(Gate::Ry { target: 0, angle: 0.4 });
        c.push(Gate::Cnot { control: 1, target: 2 });
        c.push(Gate::Cz { a: 1, b: 0 });
        c.push(Gate::Phase { angle: 0.1 });
        assert_eq!(map_nearest_neighbor(&c), c);
    }

    #[test]
    fn long_cz_is_exact() {
        let mut c = Circuit::new(4);
        c.push(Gate::Cz { a: 0, b: 3 });
        c.push(Gate::Cz { a: 2, b: 1 });
        let m = map_nearest_neighbor(&c);
        assert!(adjacent(&m));
        let d = max_diff(&circuit_to_unitary(&c).unwrap(), &circuit_to_unitary(&m).unwrap());
        assert!(d < 1e-12);
    }

    #[test]
    fn multiplexor_nearest_neighbor_cost() {
        for k in 1..=5 {
            let angles: Vec<f64> = (0..1 << k).map(|i| 0.3 + 0.17 * i as f64).collect();
            // data below its selects, the most significant select farthest away
            let spec = MuxRotationSpec::new(MuxAxis::Z, k, (0..k).collect(), angles).unwrap();
            let c = synth_mux_rotation(&spec, Entangler::Cnot, false).unwrap();
            let m = map_nearest_neighbor(&c);
            let n = k + 1;
            assert!(m.counts().cnot <= 9 * (1 << (n - 1)) - 8, "k={k}: {}", m.counts().cnot);
            assert!(max_diff(&circuit_to_unitary(&c).unwrap(), &circuit_to_unitary(&m).unwrap()) < 1e-10);
        }
    }

    #[test]
    fn nearest_neighbor_qsd_overhead() {
        for n in 2..=5 {
            let u = random_unitary(n, 900 + n as u64);
            let (plain, _) = synth_qsd(&u, &QsdOptions::default()).unwrap();
            let opts = QsdOptions {
                nn: true,
                ..QsdOptions::default()
            };
            let (nn, rep) = synth_qsd(&u, &opts).unwrap();
            assert!(adjacent(&nn));
            assert!(rep.recon_err <= 1e-8);
            assert!(nn.counts().cnot_equivalent() <= 9 * plain.counts().cnot_equivalent());
        }
    }
}
