use super::{DensityMatrix, NvLevel, StateVector};
use crate::metrics::QubitRho;
use crate::CMatrix;

/// NV levels spanning each logical qubit, in the `{|gg>, |gf>, |fg>, |ff>}`
/// product order used by [`QubitRho`].
pub const QUBIT_LEVELS: [NvLevel; 2] = [NvLevel::G, NvLevel::F];

/// Traces out the cavity and projects both NV centers onto `{G, F}`.
///
/// Population in `E`, `I` or outside the projected block shows up as
/// `trace_deficit` on the result; nothing is renormalized.
pub fn partial_trace_to_qubits(rho: &DensityMatrix) -> QubitRho {
    let space = rho.space();
    let m = rho.entries();
    let mut out = CMatrix::zeros(4, 4);
    for (r, (a1, a2)) in qubit_pairs().enumerate() {
        for (c, (b1, b2)) in qubit_pairs().enumerate() {
            let mut acc = crate::C64::new(0.0, 0.0);
            for n in 0..space.fock_dim() {
                acc += m[(space.index_unchecked(a1, a2, n), space.index_unchecked(b1, b2, n))];
            }
            out[(r, c)] = acc;
        }
    }
    QubitRho::from_block(out, rho.trace())
}

/// Same as [`partial_trace_to_qubits`] on `|psi><psi|`.
pub fn partial_trace_pure(psi: &StateVector) -> QubitRho {
    partial_trace_to_qubits(&psi.to_density())
}

fn qubit_pairs() -> impl Iterator<Item = (NvLevel, NvLevel)> {
    QUBIT_LEVELS
        .into_iter()
        .flat_map(|a| QUBIT_LEVELS.into_iter().map(move |b| (a, b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::SpaceSpec;
    use crate::C64;
    use NvLevel::*;

    #[test]
    fn basis_projector_lands_on_gf() {
        let s = SpaceSpec::new(1).unwrap();
        let q = partial_trace_pure(&StateVector::basis(s, G, F, 0).unwrap());
        let mut want = CMatrix::zeros(4, 4);
        want[(1, 1)] = C64::new(1.0, 0.0);
        assert_eq!(q.matrix(), &want);
        assert_eq!(q.trace_deficit(), 0.0);
    }

    #[test]
    fn excited_population_is_a_deficit() {
        let s = SpaceSpec::new(1).unwrap();
        let q = partial_trace_pure(&StateVector::basis(s, E, G, 0).unwrap());
        assert!(q.matrix().iter().all(|z| z.norm() == 0.0));
        assert!((q.trace_deficit() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn photon_sectors_are_summed() {
        let s = SpaceSpec::new(2).unwrap();
        let psi = StateVector::superposition(
            s,
            &[
                (C64::new(1.0, 0.0), (G, G, 0)),
                (C64::new(1.0, 0.0), (G, G, 2)),
                (C64::new(1.0, 0.0), (F, F, 2)),
            ],
        )
        .unwrap();
        let q = partial_trace_pure(&psi);
        assert!((q.matrix()[(0, 0)].re - 2.0 / 3.0).abs() < 1e-14);
        assert!((q.matrix()[(3, 3)].re - 1.0 / 3.0).abs() < 1e-14);
        // |gg,2><ff,2| survives the cavity trace
        assert!((q.matrix()[(0, 3)].re - 1.0 / 3.0).abs() < 1e-14);
        assert!(q.trace_deficit().abs() < 1e-14);
    }
}
