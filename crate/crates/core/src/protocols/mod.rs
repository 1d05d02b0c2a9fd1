//! The transfer, phase-gate and entanglement experiments, plus the
//! full-versus-effective comparison, under a selectable dynamics model.

mod compare;
mod cpg;
mod entanglement;
mod qst;

pub use compare::{compare_hamiltonians, compare_hamiltonians_at, Comparison};
pub use cpg::{cpg_run, CpgSpec, LOGICAL_BASIS};
pub use entanglement::{entanglement_run, ConcurrenceSeries};
pub use qst::{qst_run, QstSpec, DEFAULT_WINDOW};

use crate::hamiltonians::{build_effective_embedded, build_full, SystemParams};
use crate::qcore::{DensityMatrix, OperatorMatrix, StateVector};
use crate::{Result, C64};

/// Which dynamics a protocol runs under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ModelChoice {
    /// Two-level flip-flop Hamiltonian on `{gf0, fg0}`.
    Effective,
    /// Full Hamiltonian, unitary.
    FullClosed,
    /// Full Hamiltonian with cavity and spontaneous decay.
    FullOpen,
}

impl ModelChoice {
    pub const ALL: [ModelChoice; 3] = [ModelChoice::Effective, ModelChoice::FullClosed, ModelChoice::FullOpen];

    pub fn label(self) -> &'static str {
        match self {
            ModelChoice::Effective => "effective",
            ModelChoice::FullClosed => "full_closed",
            ModelChoice::FullOpen => "full_open",
        }
    }

    pub fn is_open(self) -> bool {
        self == ModelChoice::FullOpen
    }

    /// Hamiltonian on the full space for these parameters.
    pub fn hamiltonian(self, params: &SystemParams) -> Result<OperatorMatrix> {
        match self {
            ModelChoice::Effective => build_effective_embedded(params),
            ModelChoice::FullClosed | ModelChoice::FullOpen => build_full(params),
        }
    }
}

#[derive(Debug, Clone)]
pub enum FinalState {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

impl FinalState {
    pub fn to_density(&self) -> DensityMatrix {
        match self {
            FinalState::Pure(psi) => psi.to_density(),
            FinalState::Mixed(rho) => rho.clone(),
        }
    }
}

/// Best fidelity found inside a time window and where it occurred.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalFidelity {
    pub time: f64,
    pub fidelity: f64,
}

#[derive(Debug, Clone)]
pub struct GateReport {
    pub model: ModelChoice,
    pub final_state: FinalState,
    /// Fidelity against the target at the nominal end time.
    pub fidelity: f64,
    pub optimal: Option<OptimalFidelity>,
    /// Diagonal amplitudes `<x|U|x>` over the four logical inputs, when computed.
    pub truth_table: Option<[C64; 4]>,
    /// Total evolution time.
    pub duration: f64,
    /// `arg <fi|U|fi>` of the nominally frozen `|f>|i>` input, when computed.
    pub fi_phase: Option<f64>,
    /// Local phase applied on `|f>` of NV 1 after the gate (zero when off).
    pub compensation: f64,
}
