use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Requested photon number exceeds the Fock truncation.
    PhotonOutOfRange { n: usize, n_max: usize },
    /// Flat basis index outside `0..dim`.
    IndexOutOfRange { index: usize, dim: usize },
    /// Fock truncation must keep at least one photon.
    InvalidTruncation { n_max: usize },
    /// Two objects built on different composite spaces were combined.
    DimensionMismatch { expected: usize, found: usize },
    /// A state vector whose norm is not 1.
    NotNormalized { norm: f64 },
    /// An operator flagged or required to be Hermitian is not.
    NotHermitian { deviation: f64 },
    /// A matrix that fails the density-matrix checks.
    InvalidDensity { reason: &'static str, value: f64 },
    /// The eigendecomposition did not reproduce its input.
    Eigendecomposition { residual: f64 },
    /// A reduced model was requested for unequal couplings or drives.
    AsymmetricCoupling,
    /// The effective two-state model is undefined at zero detuning.
    ZeroDetuning,
    /// A physical parameter is negative, non-finite or otherwise unusable.
    InvalidParameter { name: &'static str, value: f64 },
    /// A schedule segment with non-positive or non-finite duration.
    InvalidDuration { value: f64 },
    /// The adaptive integrator shrank its step below the floor.
    StepSizeUnderflow { t: f64, h: f64 },
    /// The adaptive integrator hit its step budget.
    StepLimit { t: f64, steps: usize },
    /// Qubit-subspace population lost to E/I levels or photons is too large.
    ExcessLeakage { deficit: f64, limit: f64 },
    /// A closed form that only holds for real weights received complex ones.
    ComplexWeights,
}

impl Error {
    /// Stable snake_case code for machine-readable reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::PhotonOutOfRange { .. } => "photon_out_of_range",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::InvalidTruncation { .. } => "invalid_truncation",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::NotNormalized { .. } => "not_normalized",
            Error::NotHermitian { .. } => "not_hermitian",
            Error::InvalidDensity { .. } => "invalid_density",
            Error::Eigendecomposition { .. } => "eigendecomposition",
            Error::AsymmetricCoupling => "asymmetric_coupling",
            Error::ZeroDetuning => "zero_detuning",
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::InvalidDuration { .. } => "invalid_duration",
            Error::StepSizeUnderflow { .. } => "step_size_underflow",
            Error::StepLimit { .. } => "step_limit",
            Error::ExcessLeakage { .. } => "excess_leakage",
            Error::ComplexWeights => "complex_weights",
        }
    }

    /// True for failures caused by the inputs rather than by the numerics.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::Eigendecomposition { .. }
                | Error::StepSizeUnderflow { .. }
                | Error::StepLimit { .. }
                | Error::ExcessLeakage { .. }
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::PhotonOutOfRange { n, n_max } => {
                write!(f, "photon number {n} exceeds truncation n_max = {n_max}")
            }
            Error::IndexOutOfRange { index, dim } => {
                write!(f, "basis index {index} out of range for dimension {dim}")
            }
            Error::InvalidTruncation { n_max } => {
                write!(f, "photon truncation must be at least 1, got {n_max}")
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NotNormalized { norm } => write!(f, "state is not normalized (norm {norm})"),
            Error::NotHermitian { deviation } => {
                write!(f, "operator is not Hermitian (max |A - A^dag| = {deviation:e})")
            }
            Error::InvalidDensity { reason, value } => {
                write!(f, "invalid density matrix: {reason} ({value:e})")
            }
            Error::Eigendecomposition { residual } => {
                write!(f, "eigendecomposition failed (residual {residual:e})")
            }
            Error::AsymmetricCoupling => {
                write!(f, "reduced models require g1 = g2 and omega1 = omega2")
            }
            Error::ZeroDetuning => write!(f, "effective model requires a nonzero detuning"),
            Error::InvalidParameter { name, value } => {
                write!(f, "invalid value for {name}: {value}")
            }
            Error::InvalidDuration { value } => {
                write!(f, "segment duration must be positive and finite, got {value}")
            }
            Error::StepSizeUnderflow { t, h } => {
                write!(f, "integrator step size underflow at t = {t} (h = {h:e})")
            }
            Error::StepLimit { t, steps } => {
                write!(f, "integrator exceeded {steps} steps at t = {t}")
            }
            Error::ExcessLeakage { deficit, limit } => write!(
                f,
                "qubit-subspace trace deficit {deficit:e} exceeds the limit {limit:e}"
            ),
            Error::ComplexWeights => {
                write!(f, "closed-form entries are only defined for real weights")
            }
        }
    }
}

impl core::error::Error for Error {}
