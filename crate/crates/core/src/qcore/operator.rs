use core::ops::{Add, Mul, Sub};
#[allow(unused_imports)] // float math without std
use num_traits::Float;

use super::state::hermiticity_error;
use super::{NvLevel, Site, SpaceSpec, StateVector, OPERATOR_HERMITIAN_TOL};
use crate::{CMatrix, CVector, Error, Result, C64};

/// Dense operator on a composite space.
///
/// `hermitian` is a hint carried alongside the matrix; when it is set the
/// matrix is guaranteed to satisfy `max |A - A^dag| <= 1e-12`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    entries: CMatrix,
    space: SpaceSpec,
    hermitian: bool,
}

impl OperatorMatrix {
    pub fn zeros(space: SpaceSpec) -> Self {
        let d = space.dim();
        OperatorMatrix {
            entries: CMatrix::zeros(d, d),
            space,
            hermitian: true,
        }
    }

    pub fn identity(space: SpaceSpec) -> Self {
        let d = space.dim();
        OperatorMatrix {
            entries: CMatrix::identity(d, d),
            space,
            hermitian: true,
        }
    }

    pub fn from_matrix(space: SpaceSpec, entries: CMatrix) -> Result<Self> {
        if entries.nrows() != space.dim() || entries.ncols() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: entries.nrows(),
            });
        }
        Ok(OperatorMatrix {
            entries,
            space,
            hermitian: false,
        })
    }

    /// Sets the Hermitian hint after checking it.
    pub fn with_hermitian_hint(mut self) -> Result<Self> {
        let deviation = self.hermiticity_error();
        if !(deviation <= OPERATOR_HERMITIAN_TOL) {
            return Err(Error::NotHermitian { deviation });
        }
        self.hermitian = true;
        Ok(self)
    }

    #[inline]
    pub fn space(&self) -> SpaceSpec {
        self.space
    }

    #[inline]
    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    #[inline]
    pub fn hermitian_hint(&self) -> bool {
        self.hermitian
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.entries)
    }

    pub fn adjoint(&self) -> Self {
        OperatorMatrix {
            entries: self.entries.adjoint(),
            space: self.space,
            hermitian: self.hermitian,
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        OperatorMatrix {
            entries: self.entries.map(|z| z * c),
            space: self.space,
            hermitian: self.hermitian && c.im == 0.0,
        }
    }

    /// `A + A^dag`, always Hermitian.
    pub fn plus_adjoint(&self) -> Self {
        OperatorMatrix {
            entries: &self.entries + self.entries.adjoint(),
            space: self.space,
            hermitian: true,
        }
    }

    /// `[A, B]`.
    pub fn commutator(&self, other: &OperatorMatrix) -> Result<Self> {
        self.space.check_dim(&other.space)?;
        Ok(OperatorMatrix {
            entries: &self.entries * &other.entries - &other.entries * &self.entries,
            space: self.space,
            hermitian: false,
        })
    }

    /// `A |psi>` as a raw, unnormalized vector.
    pub fn apply(&self, psi: &StateVector) -> Result<CVector> {
        self.space.check_dim(&psi.space())?;
        Ok(&self.entries * psi.amplitudes())
    }

    /// `<bra|A|ket>` on flat basis indices.
    #[inline]
    pub fn element(&self, bra: usize, ket: usize) -> C64 {
        self.entries[(bra, ket)]
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn nonzeros(&self) -> usize {
        self.entries.iter().filter(|z| z.norm_sqr() != 0.0).count()
    }

    /// Entries of `self` that are exactly nonzero, as `(row, col, value)`.
    pub(crate) fn triplets(&self) -> alloc::vec::Vec<(usize, usize, C64)> {
        let d = self.entries.nrows();
        let mut out = alloc::vec::Vec::new();
        for i in 0..d {
            for j in 0..d {
                let z = self.entries[(i, j)];
                if z.re != 0.0 || z.im != 0.0 {
                    out.push((i, j, z));
                }
            }
        }
        out
    }
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;

    fn add(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.space, rhs.space, "operator spaces differ");
        OperatorMatrix {
            entries: &self.entries + &rhs.entries,
            space: self.space,
            hermitian: self.hermitian && rhs.hermitian,
        }
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;

    fn sub(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.space, rhs.space, "operator spaces differ");
        OperatorMatrix {
            entries: &self.entries - &rhs.entries,
            space: self.space,
            hermitian: self.hermitian && rhs.hermitian,
        }
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;

    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.space, rhs.space, "operator spaces differ");
        OperatorMatrix {
            entries: &self.entries * &rhs.entries,
            space: self.space,
            hermitian: false,
        }
    }
}

/// `|bra><ket|` on one NV site, identity on the other site and the cavity.
pub fn lift_nv_operator(site: Site, bra: NvLevel, ket: NvLevel, space: SpaceSpec) -> OperatorMatrix {
    let mut op = OperatorMatrix::zeros(space);
    for other in NvLevel::ALL {
        for n in 0..space.fock_dim() {
            let (row, col) = match site {
                Site::One => (
                    space.index_unchecked(bra, other, n),
                    space.index_unchecked(ket, other, n),
                ),
                Site::Two => (
                    space.index_unchecked(other, bra, n),
                    space.index_unchecked(other, ket, n),
                ),
            };
            op.entries[(row, col)] = C64::new(1.0, 0.0);
        }
    }
    op.hermitian = bra == ket;
    op
}

/// Cavity annihilation operator `a`, identity on both NV centers.
pub fn photon_annihilator(space: SpaceSpec) -> OperatorMatrix {
    let mut op = OperatorMatrix::zeros(space);
    for nv1 in NvLevel::ALL {
        for nv2 in NvLevel::ALL {
            for n in 1..space.fock_dim() {
                let row = space.index_unchecked(nv1, nv2, n - 1);
                let col = space.index_unchecked(nv1, nv2, n);
                op.entries[(row, col)] = C64::new((n as f64).sqrt(), 0.0);
            }
        }
    }
    op.hermitian = false;
    op
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::SymmetricEigen;
    use NvLevel::*;

    fn space() -> SpaceSpec {
        SpaceSpec::new(1).unwrap()
    }

    #[test]
    fn lift_maps_basis_states() {
        let s = space();
        let op = lift_nv_operator(Site::One, E, G, s);
        let out = op.apply(&StateVector::basis(s, G, G, 0).unwrap()).unwrap();
        let want = StateVector::basis(s, E, G, 0).unwrap();
        assert_eq!(&out, want.amplitudes());
    }

    #[test]
    fn lift_adjoint_and_commutation() {
        let s = space();
        let a = lift_nv_operator(Site::Two, E, F, s);
        assert_eq!(a.adjoint(), lift_nv_operator(Site::Two, F, E, s));
        let b = lift_nv_operator(Site::One, E, G, s);
        let c = b.commutator(&a).unwrap();
        assert_eq!(c.max_abs(), 0.0);
    }

    #[test]
    fn lift_nonzero_count() {
        for n_max in 1..4 {
            let s = SpaceSpec::new(n_max).unwrap();
            for site in [Site::One, Site::Two] {
                for bra in NvLevel::ALL {
                    for ket in NvLevel::ALL {
                        let op = lift_nv_operator(site, bra, ket, s);
                        assert_eq!(op.nonzeros(), (n_max + 1) * 16 / 4);
                        assert!(op
                            .entries()
                            .iter()
                            .all(|z| *z == C64::new(0.0, 0.0) || *z == C64::new(1.0, 0.0)));
                    }
                }
            }
        }
    }

    #[test]
    fn annihilator_action_and_number_spectrum() {
        let s = space();
        let a = photon_annihilator(s);
        let out = a.apply(&StateVector::basis(s, G, G, 1).unwrap()).unwrap();
        assert_eq!(&out, StateVector::basis(s, G, G, 0).unwrap().amplitudes());
        let zero = a.apply(&StateVector::basis(s, G, G, 0).unwrap()).unwrap();
        assert!(zero.iter().all(|z| z.norm() == 0.0));

        for n_max in 1..4 {
            let s = SpaceSpec::new(n_max).unwrap();
            let a = photon_annihilator(s);
            let num = &a.adjoint() * &a;
            let eig = SymmetricEigen::new(num.entries().clone()).eigenvalues;
            for n in 0..=n_max {
                let count = eig.iter().filter(|&&x| (x - n as f64).abs() < 1e-10).count();
                assert_eq!(count, 16);
            }
        }
    }

    #[test]
    fn hermitian_hint_is_checked() {
        let s = space();
        let a = photon_annihilator(s);
        assert!(matches!(
            a.clone().with_hermitian_hint(),
            Err(Error::NotHermitian { .. })
        ));
        assert!(a.plus_adjoint().with_hermitian_hint().is_ok());
    }
}
