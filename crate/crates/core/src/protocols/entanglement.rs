use alloc::vec::Vec;
#[allow(unused_imports)] // float math without std
use num_traits::Float;

use crate::dynamics::{build_collapse_set, lindblad_evolve, Schedule, Segment, TrajectoryStates};
use crate::hamiltonians::SystemParams;
use crate::metrics::{concurrence_closed_form, concurrence_wootters, flip_flop_state, EntanglementParams, QubitRho};
use crate::qcore::{partial_trace_pure, partial_trace_to_qubits, NvLevel, SpectralPropagator, StateVector};
use crate::{Error, Result};

use super::ModelChoice;

/// Both concurrence definitions along a time grid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConcurrenceSeries {
    pub times: Vec<f64>,
    pub wootters: Vec<f64>,
    /// The printed closed-form quantity, equal to the squared Wootters value
    /// (the tangle) on pure flip-flop states.
    pub closed_form: Vec<f64>,
    /// Population outside the `{g,f}` qubit block, before renormalization.
    pub trace_deficit: Vec<f64>,
}

impl ConcurrenceSeries {
    fn push(&mut self, t: f64, rho: &QubitRho) -> Result<()> {
        let deficit = rho.trace_deficit();
        let rho = if deficit > 0.0 {
            rho.renormalized()?
        } else {
            rho.clone()
        };
        self.times.push(t);
        self.wootters.push(concurrence_wootters(&rho)?);
        self.closed_form.push(concurrence_closed_form(&rho.flip_flop_entries()));
        self.trace_deficit.push(deficit);
        Ok(())
    }
}

/// Concurrence of NV 1 and NV 2 starting from `alpha|gf0> + beta|fg0>`.
///
/// The effective model uses the closed-form flip-flop state. Full models set
/// both Rabi frequencies to `sqrt(lambda * Delta)` on `system` and simulate;
/// their reduced states are renormalized when the leaked population is at
/// most 1e-3 and rejected otherwise.
pub fn entanglement_run(
    p: &EntanglementParams,
    t_grid: &[f64],
    model: ModelChoice,
    system: &SystemParams,
) -> Result<ConcurrenceSeries> {
    for w in t_grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidParameter {
                name: "t_grid",
                value: w[1],
            });
        }
    }
    if let Some(&t0) = t_grid.first() {
        if !(t0.is_finite() && t0 >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "t_grid",
                value: t0,
            });
        }
    }
    let mut out = ConcurrenceSeries::default();
    if model == ModelChoice::Effective {
        for &t in t_grid {
            out.push(t, &QubitRho::from_ket(&flip_flop_state(p, t)))?;
        }
        return Ok(out);
    }

    let omega_sq = p.lambda * system.delta;
    if !(omega_sq > 0.0) {
        return Err(Error::InvalidParameter {
            name: "lambda",
            value: p.lambda,
        });
    }
    let mut params = *system;
    params.omega1 = omega_sq.sqrt();
    params.omega2 = params.omega1;
    params.validate()?;
    let space = params.space()?;
    let psi0 = StateVector::superposition(
        space,
        &[
            (p.alpha, (NvLevel::G, NvLevel::F, 0)),
            (p.beta, (NvLevel::F, NvLevel::G, 0)),
        ],
    )?;
    let h = model.hamiltonian(&params)?;

    if !model.is_open() {
        let prop = SpectralPropagator::new(&h)?;
        let c = prop.coefficients(&psi0)?;
        for &t in t_grid {
            out.push(t, &partial_trace_pure(&prop.state_from_coefficients(&c, t)))?;
        }
        return Ok(out);
    }

    let mut segments = Vec::new();
    let mut start = 0.0;
    for &t in t_grid.iter().filter(|&&t| t > 0.0) {
        segments.push(Segment {
            hamiltonian: h.clone(),
            duration: t - start,
        });
        start = t;
    }
    if segments.is_empty() {
        for &t in t_grid {
            out.push(t, &partial_trace_pure(&psi0))?;
        }
        return Ok(out);
    }
    let sched = Schedule::new(segments, start)?;
    let traj = lindblad_evolve(&sched, &build_collapse_set(&params)?, &psi0.to_density())?;
    let TrajectoryStates::Mixed(states) = &traj.states else {
        unreachable!("open evolution yields density matrices")
    };
    // sample times are 0 plus every segment boundary, so each grid time is present
    let mut cursor = 0;
    for &t in t_grid {
        while traj.times[cursor] < t - 1e-12 * t.max(1.0) {
            cursor += 1;
        }
        out.push(t, &partial_trace_to_qubits(&states[cursor]))?;
    }
    Ok(out)
}
