//! Numerical core for two NV centers sharing one detuned cavity mode.
//!
//! Everything here is pure computation over dense complex matrices: the
//! composite Hilbert space, the Hamiltonians of the off-resonant Zeno
//! scheme, closed and open propagation, figures of merit, and the state
//! transfer / phase gate / entanglement protocols built on top of them.
//!
//! The crate is `no_std` and only needs an allocator. File formats, the
//! parameter-sweep runner and the command line live in the `nvzeno` crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod dynamics;
pub mod error;
pub mod hamiltonians;
pub mod metrics;
pub mod protocols;
pub mod qcore;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;

/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;
