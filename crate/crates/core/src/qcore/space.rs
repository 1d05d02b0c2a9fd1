use crate::{Error, Result};

/// One of the four NV levels used by the scheme.
///
/// The numeric codes are part of the basis ordering and of every serialized
/// table; they never change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[repr(u8)]
pub enum NvLevel {
    /// `m_s = +1` ground level, couples to the cavity.
    G = 0,
    /// `m_s = -1` ground level, driven by the classical field.
    F = 1,
    /// Optically excited level.
    E = 2,
    /// `m_s = 0` ancilla, uncoupled.
    I = 3,
}

impl NvLevel {
    pub const ALL: [NvLevel; 4] = [NvLevel::G, NvLevel::F, NvLevel::E, NvLevel::I];

    #[inline]
    pub fn code(self) -> usize {
        self as usize
    }

    pub fn from_code(code: usize) -> Option<Self> {
        NvLevel::ALL.get(code).copied()
    }

    pub fn label(self) -> char {
        match self {
            NvLevel::G => 'g',
            NvLevel::F => 'f',
            NvLevel::E => 'e',
            NvLevel::I => 'i',
        }
    }
}

/// Which of the two NV centers an operator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Site {
    One,
    Two,
}

/// Shape of the composite space `NV1 (x) NV2 (x) Fock(0..=n_max)`.
///
/// Basis states are ordered with NV1 slowest and the photon number fastest:
/// `idx = (code(nv1) * 4 + code(nv2)) * (n_max + 1) + n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpaceSpec {
    n_max: usize,
}

impl Default for SpaceSpec {
    fn default() -> Self {
        SpaceSpec { n_max: 1 }
    }
}

impl SpaceSpec {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::InvalidTruncation { n_max });
        }
        Ok(SpaceSpec { n_max })
    }

    #[inline]
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    #[inline]
    pub fn fock_dim(&self) -> usize {
        self.n_max + 1
    }

    /// Composite dimension `16 (n_max + 1)`.
    #[inline]
    pub fn dim(&self) -> usize {
        16 * self.fock_dim()
    }

    pub fn basis_index(&self, nv1: NvLevel, nv2: NvLevel, n: usize) -> Result<usize> {
        if n > self.n_max {
            return Err(Error::PhotonOutOfRange { n, n_max: self.n_max });
        }
        Ok(self.index_unchecked(nv1, nv2, n))
    }

    #[inline]
    pub(crate) fn index_unchecked(&self, nv1: NvLevel, nv2: NvLevel, n: usize) -> usize {
        (nv1.code() * 4 + nv2.code()) * self.fock_dim() + n
    }

    pub fn unindex(&self, index: usize) -> Result<(NvLevel, NvLevel, usize)> {
        if index >= self.dim() {
            return Err(Error::IndexOutOfRange { index, dim: self.dim() });
        }
        let n = index % self.fock_dim();
        let pair = index / self.fock_dim();
        // both codes are < 4 because index < 16 * fock_dim
        let nv1 = NvLevel::from_code(pair / 4).expect("code < 4");
        let nv2 = NvLevel::from_code(pair % 4).expect("code < 4");
        Ok((nv1, nv2, n))
    }

    pub(crate) fn check_dim(&self, other: &SpaceSpec) -> Result<()> {
        if self != other {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use NvLevel::*;

    #[test]
    fn basis_index_examples() {
        let s = SpaceSpec::new(1).unwrap();
        assert_eq!(s.basis_index(G, G, 0).unwrap(), 0);
        assert_eq!(s.basis_index(F, G, 0).unwrap(), 8);
        assert_eq!(s.basis_index(G, F, 1).unwrap(), 3);
        assert_eq!(s.dim(), 32);
    }

    #[test]
    fn photon_out_of_range() {
        let s = SpaceSpec::new(1).unwrap();
        assert_eq!(s.basis_index(G, G, 2), Err(Error::PhotonOutOfRange { n: 2, n_max: 1 }));
        assert!(SpaceSpec::new(0).is_err());
        assert!(s.unindex(32).is_err());
    }

    #[test]
    fn index_roundtrip_all() {
        for n_max in 1..4 {
            let s = SpaceSpec::new(n_max).unwrap();
            for idx in 0..s.dim() {
                let (a, b, n) = s.unindex(idx).unwrap();
                assert_eq!(s.basis_index(a, b, n).unwrap(), idx);
            }
        }
    }
}
