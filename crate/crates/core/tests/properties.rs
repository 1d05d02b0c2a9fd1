use approx::assert_abs_diff_eq;
use nvzeno_core::hamiltonians::{
    build_effective, build_full, build_zeno_reduced, eliminate_adiabatically, SystemParams,
};
use nvzeno_core::metrics::{
    concurrence_closed_form, concurrence_wootters, fidelity, flip_flop_state, EntanglementParams, QubitRho,
};
use nvzeno_core::qcore::{DensityMatrix, NvLevel, SpaceSpec, SpectralPropagator, StateVector};
use nvzeno_core::C64;
use proptest::prelude::*;

fn level() -> impl Strategy<Value = NvLevel> {
    (0usize..4).prop_map(|c| NvLevel::from_code(c).unwrap())
}

fn params() -> impl Strategy<Value = SystemParams> {
    (0.01f64..0.1, 0.2f64..0.8, 0.0f64..6.3, 0.0f64..6.3)
        .prop_map(|(omega, delta, p1, p2)| SystemParams::symmetric(1.0, omega, delta).with_phases(p1, p2))
}

fn state(space: SpaceSpec) -> impl Strategy<Value = StateVector> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), space.dim()).prop_filter_map("zero vector", move |v| {
        let amps = nvzeno_core::CVector::from_iterator(v.len(), v.into_iter().map(|(a, b)| C64::new(a, b)));
        StateVector::normalized(space, amps).ok()
    })
}

proptest! {
    #[test]
    fn basis_index_roundtrips(n_max in 1usize..4, a in level(), b in level(), n in 0usize..4) {
        let space = SpaceSpec::new(n_max).unwrap();
        match space.basis_index(a, b, n) {
            Ok(k) => {
                prop_assert!(n <= n_max);
                prop_assert_eq!(space.unindex(k).unwrap(), (a, b, n));
            }
            Err(_) => prop_assert!(n > n_max),
        }
    }

    #[test]
    fn full_hamiltonian_is_hermitian(p in params()) {
        prop_assert!(build_full(&p).unwrap().hermiticity_error() <= 1e-12);
    }

    #[test]
    fn propagation_composes(p in params(), t1 in 0.0f64..200.0, t2 in 0.0f64..200.0) {
        let space = p.space().unwrap();
        let prop = SpectralPropagator::new(&build_full(&p).unwrap()).unwrap();
        let psi = StateVector::basis(space, NvLevel::F, NvLevel::G, 0).unwrap();
        let direct = prop.propagate(&psi, t1 + t2).unwrap();
        let stepped = prop.propagate(&prop.propagate(&psi, t1).unwrap(), t2).unwrap();
        let diff = (direct.amplitudes() - stepped.amplitudes()).norm();
        prop_assert!(diff < 1e-9, "{}", diff);
        prop_assert!((direct.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn fidelity_is_linear_in_mixing(
        a in state(SpaceSpec::default()),
        b in state(SpaceSpec::default()),
        t in state(SpaceSpec::default()),
        p in 0.0f64..1.0,
    ) {
        let (ra, rb) = (a.to_density(), b.to_density());
        let mixed: DensityMatrix = ra.mix(&rb, p).unwrap();
        let lhs = fidelity(&t, &mixed).unwrap();
        let rhs = p * fidelity(&t, &ra).unwrap() + (1.0 - p) * fidelity(&t, &rb).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn concurrence_identities_on_flip_flop_family(r in 0.05f64..3.0, lambda in 1e-3f64..0.05, t in 0.0f64..2000.0) {
        let p = EntanglementParams::from_ratio(r, lambda).unwrap();
        let rho = QubitRho::from_ket(&flip_flop_state(&p, t));
        let c = concurrence_wootters(&rho).unwrap();
        prop_assert!((0.0..=1.0).contains(&c));
        prop_assert!((concurrence_closed_form(&rho.flip_flop_entries()) - c * c).abs() < 1e-9);
        let later = QubitRho::from_ket(&flip_flop_state(&p, t + 2.0 * std::f64::consts::PI / lambda));
        prop_assert!((concurrence_wootters(&later).unwrap() - c).abs() < 1e-9);
    }

    #[test]
    fn effective_matches_elimination(p in params()) {
        let reduced = build_zeno_reduced(&p).unwrap();
        let eliminated = eliminate_adiabatically(&reduced.matrix, &[0, 1]).unwrap();
        let effective = build_effective(&p).unwrap();
        let bound = 5.0 * p.omega1.powi(3) / (p.delta * p.delta);
        let worst = (&eliminated - &effective.matrix).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(worst <= bound, "{} > {}", worst, bound);
    }
}

#[test]
fn zeno_eigenvalues_at_operating_point() {
    let p = SystemParams::default();
    let eig = nvzeno_core::hamiltonians::zeno_eigensystem(&p).unwrap();
    let e = eig.energies();
    assert_abs_diff_eq!(e[0], 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(e[1].abs(), 2f64.sqrt(), epsilon = 1e-12);
    assert_abs_diff_eq!(e[2].abs(), 2f64.sqrt(), epsilon = 1e-12);
}
