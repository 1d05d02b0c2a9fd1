//! A second photon changes no protocol metric: inputs carry at most one
//! excitation and nothing in the dynamics adds one.

use nvzeno_core::hamiltonians::SystemParams;
use nvzeno_core::protocols::{cpg_run, qst_run, CpgSpec, ModelChoice, QstSpec};

const TOL: f64 = 1e-10;

fn point(kappa: f64, gamma: f64, n_max: usize) -> SystemParams {
    SystemParams::symmetric(1.0, 0.05, 0.5)
        .with_decay(kappa, gamma)
        .with_n_max(n_max)
}

#[test]
fn transfer_is_unchanged_at_two_photons() {
    for (model, kappa, gamma) in [(ModelChoice::FullClosed, 0.0, 0.0), (ModelChoice::FullOpen, 0.2, 0.01)] {
        let spec = |n_max| QstSpec::new(point(kappa, gamma, n_max), model).with_window(Some((0.9, 1.1)));
        let one = qst_run(&spec(1)).unwrap();
        let two = qst_run(&spec(2)).unwrap();
        assert!(
            (one.fidelity - two.fidelity).abs() <= TOL,
            "{model:?}: {} vs {}",
            one.fidelity,
            two.fidelity
        );
        let (a, b) = (one.optimal.unwrap(), two.optimal.unwrap());
        assert!((a.fidelity - b.fidelity).abs() <= TOL);
    }
}

#[test]
fn phase_gate_is_unchanged_at_two_photons() {
    for (model, kappa, gamma) in [(ModelChoice::FullClosed, 0.0, 0.0), (ModelChoice::FullOpen, 0.2, 0.01)] {
        let one = cpg_run(&CpgSpec::new(point(kappa, gamma, 1), model)).unwrap();
        let two = cpg_run(&CpgSpec::new(point(kappa, gamma, 2), model)).unwrap();
        assert!(
            (one.fidelity - two.fidelity).abs() <= TOL,
            "{model:?}: {} vs {}",
            one.fidelity,
            two.fidelity
        );
        for (x, y) in one.truth_table.unwrap().iter().zip(two.truth_table.unwrap()) {
            assert!((x - y).norm() <= TOL);
        }
    }
}
