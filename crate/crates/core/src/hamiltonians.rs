//! Hamiltonians of two NV centers coupled to one cavity mode.
//!
//! All rates are in units of the NV-cavity coupling `g` and the frame rotates
//! with the cavity frequency. The hierarchy is
//!
//! * [`build_full`]: cavity coupling `H_c`, laser drive `H_l` and detuning `H_de`
//!   on the full composite space,
//! * [`zeno_eigensystem`] / [`intermediate_picture`]: the eigenbasis of `H_c` and
//!   the drive seen in the frame rotating with it,
//! * [`build_zeno_reduced`]: the three-state model left after discarding the
//!   terms rotating at `sqrt(2) g` and `2 sqrt(2) g`,
//! * [`build_effective`]: the two-state flip-flop model after adiabatically
//!   eliminating the dark excited state `psi_1`.
//!
//! The effective flip-flop element is `<gf|H|fg> = (Omega^2 / 2 Delta) e^{i Phi}`
//! with `Phi = phi1 - phi2`, which is what eliminating `psi_1` from
//! [`build_full`] produces.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
#[allow(unused_imports)] // float math without std
use num_traits::Float;

use nalgebra::SymmetricEigen;

use crate::qcore::{
    lift_nv_operator, photon_annihilator, NvLevel, OperatorMatrix, Site, SpaceSpec, SpectralPropagator, StateVector,
};
use crate::{CMatrix, CVector, Error, Result, C64};

use NvLevel::{E, F, G};

/// Ratio below which a "much smaller than" regime condition counts as met.
pub const ZENO_RATIO: f64 = 0.25;

/// Physical parameters of one simulation, rates in units of `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SystemParams {
    pub g1: f64,
    pub g2: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub phi1: f64,
    pub phi2: f64,
    /// Detuning of both the drive and the cavity from the `g,f <-> e` transitions.
    pub delta: f64,
    /// Cavity field decay rate.
    pub kappa: f64,
    /// Spontaneous emission rate of each `e -> f` and `e -> g` channel.
    pub gamma: f64,
    pub n_max: usize,
}

impl Default for SystemParams {
    /// `Omega = 0.05 g`, `Delta = 0.5 g`, no dissipation, one photon.
    fn default() -> Self {
        SystemParams::symmetric(1.0, 0.05, 0.5)
    }
}

impl SystemParams {
    pub fn symmetric(g: f64, omega: f64, delta: f64) -> Self {
        SystemParams {
            g1: g,
            g2: g,
            omega1: omega,
            omega2: omega,
            phi1: 0.0,
            phi2: 0.0,
            delta,
            kappa: 0.0,
            gamma: 0.0,
            n_max: 1,
        }
    }

    pub fn with_decay(mut self, kappa: f64, gamma: f64) -> Self {
        self.kappa = kappa;
        self.gamma = gamma;
        self
    }

    pub fn with_phases(mut self, phi1: f64, phi2: f64) -> Self {
        self.phi1 = phi1;
        self.phi2 = phi2;
        self
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn space(&self) -> Result<SpaceSpec> {
        SpaceSpec::new(self.n_max)
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = [
            ("g1", self.g1),
            ("g2", self.g2),
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("kappa", self.kappa),
            ("gamma", self.gamma),
        ];
        for (name, value) in nonneg {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        for (name, value) in [("phi1", self.phi1), ("phi2", self.phi2), ("delta", self.delta)] {
            if !value.is_finite() {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        self.space()?;
        Ok(())
    }

    /// `g1 = g2` and `omega1 = omega2`, required by the reduced models.
    pub fn is_symmetric(&self) -> bool {
        (self.g1 - self.g2).abs() <= 1e-12 && (self.omega1 - self.omega2).abs() <= 1e-12
    }

    fn require_symmetric(&self) -> Result<()> {
        if !self.is_symmetric() {
            return Err(Error::AsymmetricCoupling);
        }
        Ok(())
    }

    /// Flip-flop rate `lambda = Omega^2 / Delta` of the effective model.
    pub fn flip_flop_rate(&self) -> Result<f64> {
        self.require_symmetric()?;
        if self.delta == 0.0 {
            return Err(Error::ZeroDetuning);
        }
        Ok(self.omega1 * self.omega1 / self.delta)
    }

    /// Duration `pi |Delta| / Omega^2` of one complete flip-flop.
    pub fn transfer_time(&self) -> Result<f64> {
        let lambda = self.flip_flop_rate()?;
        if lambda == 0.0 {
            return Err(Error::InvalidParameter {
                name: "omega",
                value: self.omega1,
            });
        }
        Ok(PI / lambda.abs())
    }

    /// Non-fatal checks of the Zeno and large-detuning conditions.
    pub fn regime(&self) -> ZenoRegime {
        let g = self.g1.min(self.g2);
        let omega = self.omega1.max(self.omega2);
        ZenoRegime {
            omega_over_g: if g > 0.0 { omega / g } else { f64::INFINITY },
            delta_over_zeno_gap: if g > 0.0 {
                self.delta.abs() / (2.0 * SQRT_2 * g)
            } else {
                f64::INFINITY
            },
            omega_over_delta: if self.delta != 0.0 {
                omega / self.delta.abs()
            } else {
                f64::INFINITY
            },
        }
    }
}

/// Ratios that must be small for the reduced models to hold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZenoRegime {
    /// `Omega / g`.
    pub omega_over_g: f64,
    /// `|Delta| / (2 sqrt(2) g)`.
    pub delta_over_zeno_gap: f64,
    /// `Omega / |Delta|`.
    pub omega_over_delta: f64,
}

impl ZenoRegime {
    pub fn is_satisfied(&self) -> bool {
        self.violations().next().is_none()
    }

    /// Human-readable names of the violated conditions.
    pub fn violations(&self) -> impl Iterator<Item = &'static str> + '_ {
        [
            (self.omega_over_g, "Omega << g"),
            (self.delta_over_zeno_gap, "|Delta| << 2 sqrt(2) g"),
            (self.omega_over_delta, "Omega << |Delta|"),
        ]
        .into_iter()
        .filter(|(ratio, _)| !(*ratio <= ZENO_RATIO))
        .map(|(_, name)| name)
    }
}

/// `H_c = sum_i g_i (|e><g|_i a + h.c.)`.
pub fn build_cavity_coupling(params: &SystemParams) -> Result<OperatorMatrix> {
    params.validate()?;
    let space = params.space()?;
    let a = photon_annihilator(space);
    let mut h = OperatorMatrix::zeros(space);
    for (site, g) in [(Site::One, params.g1), (Site::Two, params.g2)] {
        let raise = &lift_nv_operator(site, E, G, space) * &a;
        h = &h + &raise.scale(C64::new(g, 0.0)).plus_adjoint();
    }
    h.with_hermitian_hint()
}

/// `H_l = sum_i Omega_i (e^{i phi_i} |e><f|_i + h.c.)`.
pub fn build_laser(params: &SystemParams) -> Result<OperatorMatrix> {
    params.validate()?;
    let space = params.space()?;
    let mut h = OperatorMatrix::zeros(space);
    for (site, omega, phi) in [
        (Site::One, params.omega1, params.phi1),
        (Site::Two, params.omega2, params.phi2),
    ] {
        let drive = lift_nv_operator(site, E, F, space).scale(C64::from_polar(omega, phi));
        h = &h + &drive.plus_adjoint();
    }
    h.with_hermitian_hint()
}

/// `H_de = Delta (|e><e|_1 + |e><e|_2)`.
pub fn build_detuning(params: &SystemParams) -> Result<OperatorMatrix> {
    params.validate()?;
    let space = params.space()?;
    let ee = &lift_nv_operator(Site::One, E, E, space) + &lift_nv_operator(Site::Two, E, E, space);
    ee.scale(C64::new(params.delta, 0.0)).with_hermitian_hint()
}

/// Full rotating-frame Hamiltonian `H_c + H_l + H_de`. Level `I` is uncoupled.
pub fn build_full(params: &SystemParams) -> Result<OperatorMatrix> {
    let h = &(&build_cavity_coupling(params)? + &build_laser(params)?) + &build_detuning(params)?;
    h.with_hermitian_hint()
}

/// Projector onto states where at least one NV center sits in level `I`.
pub fn ancilla_projector(space: SpaceSpec) -> OperatorMatrix {
    let i1 = lift_nv_operator(Site::One, NvLevel::I, NvLevel::I, space);
    let i2 = lift_nv_operator(Site::Two, NvLevel::I, NvLevel::I, space);
    &(&i1 + &i2) - &(&i1 * &i2)
}

/// Eigenstates of `H_c` in the one-excitation sector reached from `|gf0>`.
#[derive(Debug, Clone)]
pub struct ZenoEigensystem {
    /// `(|ge0> - |eg0>) / sqrt 2`, dark with respect to the cavity.
    pub psi1: StateVector,
    /// `(|ge0> - sqrt 2 |gg1> + |eg0>) / 2`.
    pub psi2: StateVector,
    /// `(|ge0> + sqrt 2 |gg1> + |eg0>) / 2`.
    pub psi3: StateVector,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
}

impl ZenoEigensystem {
    pub fn states(&self) -> [&StateVector; 3] {
        [&self.psi1, &self.psi2, &self.psi3]
    }

    pub fn energies(&self) -> [f64; 3] {
        [self.lambda1, self.lambda2, self.lambda3]
    }
}

/// Eigenbasis of the cavity coupling for equal couplings `g1 = g2 = g`.
pub fn zeno_eigensystem(params: &SystemParams) -> Result<ZenoEigensystem> {
    params.validate()?;
    if (params.g1 - params.g2).abs() > 1e-12 {
        return Err(Error::AsymmetricCoupling);
    }
    let space = params.space()?;
    let g = params.g1;
    let h = 0.5;
    let r = SQRT_2 * 0.5;
    let c = |x: f64| C64::new(x, 0.0);
    Ok(ZenoEigensystem {
        psi1: StateVector::superposition(space, &[(c(FRAC_1_SQRT_2), (G, E, 0)), (c(-FRAC_1_SQRT_2), (E, G, 0))])?,
        psi2: StateVector::superposition(space, &[(c(h), (G, E, 0)), (c(-r), (G, G, 1)), (c(h), (E, G, 0))])?,
        psi3: StateVector::superposition(space, &[(c(h), (G, E, 0)), (c(r), (G, G, 1)), (c(h), (E, G, 0))])?,
        lambda1: 0.0,
        lambda2: -SQRT_2 * g,
        lambda3: SQRT_2 * g,
    })
}

/// `U_c^dag (H_l + H_de) U_c` with `U_c = exp(-i H_c t)`.
pub fn intermediate_picture(params: &SystemParams, t: f64) -> Result<OperatorMatrix> {
    IntermediatePicture::new(params)?.at(t)
}

/// Precomputed pieces of [`intermediate_picture`] for repeated sampling.
#[derive(Debug, Clone)]
pub struct IntermediatePicture {
    cavity: SpectralPropagator,
    drive: OperatorMatrix,
}

impl IntermediatePicture {
    pub fn new(params: &SystemParams) -> Result<Self> {
        let cavity = SpectralPropagator::new(&build_cavity_coupling(params)?)?;
        let drive = (&build_laser(params)? + &build_detuning(params)?).with_hermitian_hint()?;
        Ok(IntermediatePicture { cavity, drive })
    }

    pub fn at(&self, t: f64) -> Result<OperatorMatrix> {
        let u = self.cavity.unitary(t);
        let m = u.adjoint() * self.drive.entries() * u;
        let m = (&m + m.adjoint()).unscale(2.0);
        OperatorMatrix::from_matrix(self.drive.space(), m)?.with_hermitian_hint()
    }
}

/// One rotating term dropped on the way to the three-state model.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditTerm {
    pub name: &'static str,
    /// Mean modulus of the sampled matrix element.
    pub amplitude: f64,
    /// Angular frequency of the dominant Fourier component, unsigned.
    pub peak_frequency: f64,
}

/// Fourier audit of the discarded intermediate-picture terms.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyAudit {
    /// Smallest allowed rotation frequency, `sqrt(2) g - |Delta|`.
    pub threshold: f64,
    pub terms: Vec<AuditTerm>,
}

impl FrequencyAudit {
    pub fn passes(&self) -> bool {
        self.terms.iter().all(|t| t.peak_frequency >= self.threshold)
    }
}

/// Samples every discarded element of the intermediate-picture drive and
/// locates its dominant frequency by a zero-padded DFT plus golden-section
/// refinement.
pub fn frequency_audit(params: &SystemParams) -> Result<FrequencyAudit> {
    let eig = zeno_eigensystem(params)?;
    let space = params.space()?;
    let picture = IntermediatePicture::new(params)?;
    let gf = StateVector::basis(space, G, F, 0)?;
    let fg = StateVector::basis(space, F, G, 0)?;
    let g = params.g1;

    const SAMPLES: usize = 1024;
    let period = 2.0 * PI / (SQRT_2 * g);
    let window = 40.0 * period;
    let dt = window / SAMPLES as f64;

    let pairs: [(&'static str, &StateVector, &StateVector); 5] = [
        ("<psi2|H|gf0>", &eig.psi2, &gf),
        ("<psi3|H|gf0>", &eig.psi3, &gf),
        ("<psi2|H|fg0>", &eig.psi2, &fg),
        ("<psi3|H|fg0>", &eig.psi3, &fg),
        ("<psi2|H|psi3>", &eig.psi2, &eig.psi3),
    ];
    let mut series: Vec<Vec<C64>> = (0..pairs.len()).map(|_| Vec::with_capacity(SAMPLES)).collect();
    for k in 0..SAMPLES {
        let h = picture.at(k as f64 * dt)?;
        for ((_, bra, ket), out) in pairs.iter().zip(series.iter_mut()) {
            let hk = h.entries() * ket.amplitudes();
            out.push(bra.amplitudes().dotc(&hk));
        }
    }

    let mut terms = Vec::new();
    for ((name, _, _), xs) in pairs.iter().zip(series.iter()) {
        let amplitude = xs.iter().map(|z| z.norm()).sum::<f64>() / SAMPLES as f64;
        if amplitude < 1e-14 {
            continue;
        }
        terms.push(AuditTerm {
            name,
            amplitude,
            peak_frequency: dominant_frequency(xs, dt).abs(),
        });
    }
    Ok(FrequencyAudit {
        threshold: SQRT_2 * g - params.delta.abs(),
        terms,
    })
}

/// Signed angular frequency `w` maximizing `|sum_k x_k e^{-i w k dt}|`.
pub fn dominant_frequency(xs: &[C64], dt: f64) -> f64 {
    let n = xs.len();
    let spectrum = |w: f64| -> f64 {
        xs.iter()
            .enumerate()
            .map(|(k, x)| x * C64::from_polar(1.0, -w * k as f64 * dt))
            .sum::<C64>()
            .norm()
    };
    let nyquist = PI / dt;
    let bins = 4 * n;
    let step = 2.0 * nyquist / bins as f64;
    let mut best = (0.0, -1.0);
    for b in 0..bins {
        let w = -nyquist + b as f64 * step;
        let s = spectrum(w);
        if s > best.1 {
            best = (w, s);
        }
    }
    // golden-section maximization inside the neighbouring bins
    let (mut lo, mut hi) = (best.0 - step, best.0 + step);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..60 {
        let a = hi - ratio * (hi - lo);
        let b = lo + ratio * (hi - lo);
        if spectrum(a) >= spectrum(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    0.5 * (lo + hi)
}

/// Small dense Hamiltonian over a labelled subspace of the composite space.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedHamiltonian {
    pub matrix: CMatrix,
    pub labels: &'static [&'static str],
}

/// Basis of [`build_zeno_reduced`].
pub const ZENO_REDUCED_BASIS: [&str; 3] = ["gf0", "fg0", "psi1"];
/// Basis of [`build_effective`].
pub const EFFECTIVE_BASIS: [&str; 2] = ["gf0", "fg0"];

/// Three-state Zeno model on `{|gf0>, |fg0>, psi_1}`:
/// `<psi1|H|gf0> = Omega e^{i phi2} / sqrt 2`,
/// `<psi1|H|fg0> = -Omega e^{i phi1} / sqrt 2` and `<psi1|H|psi1> = Delta`.
pub fn build_zeno_reduced(params: &SystemParams) -> Result<ReducedHamiltonian> {
    params.validate()?;
    params.require_symmetric()?;
    let omega = params.omega1;
    let to_gf = C64::from_polar(omega * FRAC_1_SQRT_2, params.phi2);
    let to_fg = -C64::from_polar(omega * FRAC_1_SQRT_2, params.phi1);
    let mut m = CMatrix::zeros(3, 3);
    m[(2, 0)] = to_gf;
    m[(0, 2)] = to_gf.conj();
    m[(2, 1)] = to_fg;
    m[(1, 2)] = to_fg.conj();
    m[(2, 2)] = C64::new(params.delta, 0.0);
    Ok(ReducedHamiltonian {
        matrix: m,
        labels: &ZENO_REDUCED_BASIS,
    })
}

/// Laser-phase difference `Phi = phi1 - phi2` entering the flip-flop term.
pub fn effective_phase(params: &SystemParams) -> f64 {
    params.phi1 - params.phi2
}

/// Two-state effective model on `{|gf0>, |fg0>}`:
/// `(Omega^2 / 2 Delta) [[-1, e^{i Phi}], [e^{-i Phi}, -1]]`.
pub fn build_effective(params: &SystemParams) -> Result<ReducedHamiltonian> {
    params.validate()?;
    let lambda = params.flip_flop_rate()?;
    let half = 0.5 * lambda;
    let flip = C64::from_polar(half, effective_phase(params));
    let mut m = CMatrix::zeros(2, 2);
    m[(0, 0)] = C64::new(-half, 0.0);
    m[(1, 1)] = C64::new(-half, 0.0);
    m[(0, 1)] = flip;
    m[(1, 0)] = flip.conj();
    Ok(ReducedHamiltonian {
        matrix: m,
        labels: &EFFECTIVE_BASIS,
    })
}

/// [`build_effective`] placed on the `|gf0>`, `|fg0>` entries of the full
/// space; every other state has zero energy.
pub fn build_effective_embedded(params: &SystemParams) -> Result<OperatorMatrix> {
    let eff = build_effective(params)?;
    let space = params.space()?;
    let idx = [space.basis_index(G, F, 0)?, space.basis_index(F, G, 0)?];
    let mut m = CMatrix::zeros(space.dim(), space.dim());
    for (r, &i) in idx.iter().enumerate() {
        for (c, &j) in idx.iter().enumerate() {
            m[(i, j)] = eff.matrix[(r, c)];
        }
    }
    OperatorMatrix::from_matrix(space, m)?.with_hermitian_hint()
}

/// Exact effective Hamiltonian on the `keep` coordinates of a Hermitian
/// matrix, by block diagonalization.
///
/// Takes the `keep.len()` eigenvectors with the largest weight on the kept
/// coordinates, orthonormalizes their projections (`B (B^dag B)^{-1/2}`) and
/// returns `B_o diag(E) B_o^dag`. Agrees with second-order elimination up to
/// fourth-order corrections.
pub fn eliminate_adiabatically(h: &CMatrix, keep: &[usize]) -> Result<CMatrix> {
    let n = h.nrows();
    let k = keep.len();
    if let Some(&bad) = keep.iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange { index: bad, dim: n });
    }
    let deviation = crate::qcore::state_hermiticity(h);
    if !(deviation <= 1e-12) {
        return Err(Error::NotHermitian { deviation });
    }
    let eig = SymmetricEigen::new(h.clone());

    let mut order: Vec<(usize, f64)> = (0..n)
        .map(|j| (j, keep.iter().map(|&r| eig.eigenvectors[(r, j)].norm_sqr()).sum()))
        .collect();
    order.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(core::cmp::Ordering::Equal));
    let chosen: Vec<usize> = order.iter().take(k).map(|&(j, _)| j).collect();

    let mut b = CMatrix::zeros(k, k);
    for (r, &row) in keep.iter().enumerate() {
        for (c, &col) in chosen.iter().enumerate() {
            b[(r, c)] = eig.eigenvectors[(row, col)];
        }
    }
    let overlap = b.adjoint() * &b;
    let oe = SymmetricEigen::new(overlap);
    if oe.eigenvalues.iter().any(|&x| !(x > 1e-12)) {
        return Err(Error::Eigendecomposition {
            residual: oe.eigenvalues.min(),
        });
    }
    let inv_sqrt = &oe.eigenvectors
        * CMatrix::from_diagonal(&oe.eigenvalues.map(|x| C64::new(1.0 / x.sqrt(), 0.0)))
        * oe.eigenvectors.adjoint();
    let bo = b * inv_sqrt;
    let energies = CVector::from_iterator(k, chosen.iter().map(|&j| C64::new(eig.eigenvalues[j], 0.0)));
    Ok(&bo * CMatrix::from_diagonal(&energies) * bo.adjoint())
}
