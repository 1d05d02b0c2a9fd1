use alloc::vec::Vec;

use nalgebra::SymmetricEigen;

use super::{NvLevel, SpaceSpec, HERMITIAN_TOL, NORM_TOL, POSITIVITY_TOL, TRACE_TOL};
use crate::{CMatrix, CVector, Error, Result, C64};

/// Normalized pure state on a composite space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
    space: SpaceSpec,
}

impl StateVector {
    /// Wraps an amplitude vector that is already normalized.
    pub fn from_amplitudes(space: SpaceSpec, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: amplitudes.len(),
            });
        }
        let norm = amplitudes.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(StateVector { amplitudes, space })
    }

    /// Scales a nonzero vector to unit norm.
    pub fn normalized(space: SpaceSpec, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: amplitudes.len(),
            });
        }
        let norm = amplitudes.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(StateVector {
            amplitudes: amplitudes.unscale(norm),
            space,
        })
    }

    pub fn basis(space: SpaceSpec, nv1: NvLevel, nv2: NvLevel, n: usize) -> Result<Self> {
        let idx = space.basis_index(nv1, nv2, n)?;
        let mut amplitudes = CVector::zeros(space.dim());
        amplitudes[idx] = C64::new(1.0, 0.0);
        Ok(StateVector { amplitudes, space })
    }

    /// Normalized superposition of labelled basis states.
    pub fn superposition(space: SpaceSpec, terms: &[(C64, (NvLevel, NvLevel, usize))]) -> Result<Self> {
        let mut amplitudes = CVector::zeros(space.dim());
        for &(c, (a, b, n)) in terms {
            amplitudes[space.basis_index(a, b, n)?] += c;
        }
        Self::normalized(space, amplitudes)
    }

    pub(crate) fn from_raw(space: SpaceSpec, amplitudes: CVector) -> Self {
        debug_assert_eq!(amplitudes.len(), space.dim());
        StateVector { amplitudes, space }
    }

    #[inline]
    pub fn space(&self) -> SpaceSpec {
        self.space
    }

    #[inline]
    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn amplitude(&self, nv1: NvLevel, nv2: NvLevel, n: usize) -> Result<C64> {
        Ok(self.amplitudes[self.space.basis_index(nv1, nv2, n)?])
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.space.check_dim(&other.space)?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn population(&self, index: usize) -> f64 {
        self.amplitudes[index].norm_sqr()
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            entries: &self.amplitudes * self.amplitudes.adjoint(),
            space: self.space,
        }
    }
}

/// Hermitian, unit-trace, positive semidefinite operator on a composite space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
    space: SpaceSpec,
}

impl DensityMatrix {
    /// Validates Hermiticity, trace and positivity.
    pub fn from_matrix(space: SpaceSpec, entries: CMatrix) -> Result<Self> {
        if entries.nrows() != space.dim() || entries.ncols() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: entries.nrows(),
            });
        }
        let rho = DensityMatrix { entries, space };
        let herm = rho.hermiticity_error();
        if !(herm <= HERMITIAN_TOL) {
            return Err(Error::InvalidDensity {
                reason: "not Hermitian",
                value: herm,
            });
        }
        let tr = rho.trace();
        if !((tr - 1.0).abs() <= TRACE_TOL) {
            return Err(Error::InvalidDensity {
                reason: "trace differs from 1",
                value: tr,
            });
        }
        let min = rho.min_eigenvalue();
        if !(min >= -POSITIVITY_TOL) {
            return Err(Error::InvalidDensity {
                reason: "negative eigenvalue",
                value: min,
            });
        }
        Ok(rho)
    }

    /// `I / D`.
    pub fn maximally_mixed(space: SpaceSpec) -> Self {
        let d = space.dim();
        DensityMatrix {
            entries: CMatrix::identity(d, d).unscale(d as f64),
            space,
        }
    }

    /// Convex combination `p * self + (1 - p) * other`.
    pub fn mix(&self, other: &DensityMatrix, p: f64) -> Result<Self> {
        self.space.check_dim(&other.space)?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter {
                name: "mixing weight",
                value: p,
            });
        }
        Ok(DensityMatrix {
            entries: self.entries.scale(p) + other.entries.scale(1.0 - p),
            space: self.space,
        })
    }

    pub(crate) fn from_raw(space: SpaceSpec, entries: CMatrix) -> Self {
        debug_assert_eq!(entries.nrows(), space.dim());
        DensityMatrix { entries, space }
    }

    #[inline]
    pub fn space(&self) -> SpaceSpec {
        self.space
    }

    #[inline]
    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn population(&self, index: usize) -> f64 {
        self.entries[(index, index)].re
    }

    /// `max |rho - rho^dag|`.
    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.entries)
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.entries + self.entries.adjoint()).unscale(2.0);
        SymmetricEigen::new(h)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// `<psi|rho|psi>` without clamping.
    pub fn expectation_in(&self, psi: &StateVector) -> Result<C64> {
        self.space.check_dim(&psi.space())?;
        let a = psi.amplitudes();
        Ok(a.dotc(&(&self.entries * a)))
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.entries.diagonal().iter().map(|z| z.re).collect()
    }
}

pub(crate) fn hermiticity_error(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            if d > worst || d.is_nan() {
                worst = if d.is_nan() { f64::NAN } else { d };
            }
        }
    }
    worst
}
