use proptest::prelude::*;
use qsynth::circuit::{Circuit, Gate, GateKind};
use qsynth::layout::map_nearest_neighbor;
use qsynth::linalg::{max_diff, random_state, random_unitary, StateVector};
use qsynth::sim::{apply_circuit, circuit_to_unitary, reconstruction_error};
use qsynth::synth::{prepare_state, synth_qr, synth_qsd, QsdOptions};

fn allowed_kinds(c: &Circuit) -> bool {
    c.gates().iter().all(|g| {
        matches!(
            g.kind(),
            GateKind::Ry | GateKind::Rz | GateKind::Cnot | GateKind::Cz | GateKind::Phase
        )
    })
}

fn all_options() -> Vec<QsdOptions> {
    let mut v = Vec::new();
    for nn in [false, true] {
        for a1 in [false, true] {
            v.push(QsdOptions {
                base_size: 1,
                opt_a1: a1,
                opt_a2: false,
                nn,
            });
            for a2 in [false, true] {
                v.push(QsdOptions {
                    base_size: 2,
                    opt_a1: a1,
                    opt_a2: a2,
                    nn,
                });
            }
        }
    }
    v
}

/// Closed-form CNOT counts for generic inputs.
fn formula(opts: &QsdOptions, n: i64) -> i64 {
    let (p4, p2) = (1i64 << (2 * n), 1i64 << n);
    match (opts.base_size, opts.opt_a1 && opts.opt_a2) {
        (1, _) => 3 * p4 / 4 - 3 * p2 / 2,
        (_, false) => 9 * p4 / 16 - 3 * p2 / 2,
        (_, true) => (23 * p4 - 72 * p2 + 64) / 48,
    }
}

#[test]
fn count_formulas_hold_on_haar_inputs() {
    for opts in [QsdOptions::plain(1), QsdOptions::plain(2), QsdOptions::default()] {
        for n in 2..=6 {
            let (_, rep) = synth_qsd(&random_unitary(n, 7 * n as u64), &opts).unwrap();
            assert_eq!(
                rep.counts.cnot_equivalent() as i64,
                formula(&opts, n as i64),
                "{opts:?} n={n}"
            );
        }
    }
}

#[test]
fn wide_inputs_verify_by_sampling() {
    // 11 qubits is past the dense limit; QR takes the sampled path too
    let psi = random_state(11, 3);
    let c = prepare_state(&psi, 0).unwrap();
    let out = apply_circuit(&StateVector::basis(11, 0), &c).unwrap();
    assert!(out.fidelity(&psi) >= 1.0 - 1e-10);
    assert!(circuit_to_unitary(&c).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn every_qsd_variant_reconstructs(seed in any::<u64>(), n in 2usize..=4) {
        let u = random_unitary(n, seed);
        for opts in all_options() {
            let (c, rep) = synth_qsd(&u, &opts).unwrap();
            prop_assert!(rep.recon_err <= 1e-8, "{:?}: {}", opts, rep.recon_err);
            prop_assert!(allowed_kinds(&c));
            prop_assert_eq!(reconstruction_error(&u, &c).unwrap(), rep.recon_err);
        }
    }

    #[test]
    fn qr_reconstructs(seed in any::<u64>(), n in 1usize..=4) {
        let u = random_unitary(n, seed);
        let c = synth_qr(&u).unwrap();
        prop_assert!(allowed_kinds(&c));
        prop_assert!(reconstruction_error(&u, &c).unwrap() <= 1e-8);
    }

    #[test]
    fn prep_reaches_state(seed in any::<u64>(), n in 1usize..=6, t in any::<usize>()) {
        let psi = random_state(n, seed);
        let target = t % (1 << n);
        let c = prepare_state(&psi, target).unwrap();
        prop_assert!(allowed_kinds(&c));
        let out = apply_circuit(&StateVector::basis(n, target), &c).unwrap();
        for (x, y) in out.amplitudes().iter().zip(psi.amplitudes().iter()) {
            prop_assert!((x - y).norm() <= 1e-10);
        }
        prop_assert!(c.counts().cnot_equivalent() <= (1 << (n + 1)) - 2 * n);
    }

    #[test]
    fn nearest_neighbor_map_preserves_matrix(
        gates in prop::collection::vec((0usize..5, 0usize..5, 0usize..4, -3.0f64..3.0), 0..30)
    ) {
        let mut c = Circuit::new(5);
        for (a, b, kind, angle) in gates {
            let g = match kind {
                0 if a != b => Gate::Cnot { control: a, target: b },
                1 if a != b => Gate::Cz { a, b },
                2 => Gate::Ry { target: a, angle },
                _ => Gate::Rz { target: b, angle },
            };
            c.push(g);
        }
        let m = map_nearest_neighbor(&c);
        let adjacent = m.gates().iter().filter(|g| g.is_two_qubit()).all(|g| g.wires()[0].abs_diff(g.wires()[1]) == 1);
        prop_assert!(adjacent);
        let err = max_diff(&circuit_to_unitary(&m).unwrap(), &circuit_to_unitary(&c).unwrap());
        prop_assert!(err <= 1e-9);
    }
}
