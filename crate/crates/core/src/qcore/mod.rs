//! Composite Hilbert space of two four-level NV centers and one truncated
//! cavity mode, with the operator algebra and exact propagators built on it.

mod operator;
mod partial_trace;
mod propagate;
mod space;
mod state;

pub use operator::{lift_nv_operator, photon_annihilator, OperatorMatrix};
pub use partial_trace::{partial_trace_pure, partial_trace_to_qubits, QUBIT_LEVELS};
pub use propagate::{propagate_exact, SpectralPropagator};
pub use space::{NvLevel, Site, SpaceSpec};
pub(crate) use state::hermiticity_error as state_hermiticity;
pub use state::{DensityMatrix, StateVector};

/// Tolerance on the Euclidean norm of a [`StateVector`].
pub const NORM_TOL: f64 = 1e-9;
/// Tolerance on `max |rho - rho^dag|` of a [`DensityMatrix`].
pub const HERMITIAN_TOL: f64 = 1e-9;
/// Tolerance on the trace of a [`DensityMatrix`].
pub const TRACE_TOL: f64 = 1e-8;
/// Most negative eigenvalue accepted in a [`DensityMatrix`].
pub const POSITIVITY_TOL: f64 = 1e-8;
/// Tolerance on `max |A - A^dag|` for operators carrying the Hermitian hint.
pub const OPERATOR_HERMITIAN_TOL: f64 = 1e-12;
