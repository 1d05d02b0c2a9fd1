use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // float math without std
use num_traits::Float;

use crate::dynamics::{build_collapse_set, lindblad_evolve, Schedule, Segment};
use crate::hamiltonians::SystemParams;
use crate::metrics::{fidelity, fidelity_pure};
use crate::qcore::{DensityMatrix, NvLevel, SpaceSpec, SpectralPropagator, StateVector};
use crate::{CMatrix, Error, Result, C64};

use super::{FinalState, GateReport, ModelChoice};

/// Logical inputs in truth-table order: `fg, fi, ig, ii` (NV 1 level, NV 2 level).
pub const LOGICAL_BASIS: [(NvLevel, NvLevel); 4] = [
    (NvLevel::F, NvLevel::G),
    (NvLevel::F, NvLevel::I),
    (NvLevel::I, NvLevel::G),
    (NvLevel::I, NvLevel::I),
];

const IDEAL_SIGNS: [f64; 4] = [-1.0, 1.0, 1.0, 1.0];

/// Two-pulse conditional phase gate on `{f,i}` of NV 1 and `{g,i}` of NV 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpgSpec {
    pub params: SystemParams,
    /// Logical amplitudes over [`LOGICAL_BASIS`]; normalized.
    pub input: [C64; 4],
    /// Relative timing error applied to both pulses.
    pub delta_t_frac: f64,
    pub model: ModelChoice,
    /// Apply the calibrated phase on `|f>` of NV 1 after the gate.
    pub compensate: bool,
    /// For the open model, also run the three coherence experiments that
    /// read out the truth table.
    pub open_truth_table: bool,
}

impl CpgSpec {
    pub fn new(params: SystemParams, model: ModelChoice) -> Self {
        CpgSpec {
            params,
            input: [C64::new(0.5, 0.0); 4],
            delta_t_frac: 0.0,
            model,
            compensate: false,
            open_truth_table: true,
        }
    }

    pub fn with_timing_error(mut self, delta_t_frac: f64) -> Self {
        self.delta_t_frac = delta_t_frac;
        self
    }

    pub fn with_input(mut self, input: [C64; 4]) -> Self {
        self.input = input;
        self
    }

    pub fn with_compensation(mut self, on: bool) -> Self {
        self.compensate = on;
        self
    }

    pub fn with_open_truth_table(mut self, on: bool) -> Self {
        self.open_truth_table = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.delta_t_frac.abs() <= 0.5) {
            return Err(Error::InvalidParameter {
                name: "delta_t_frac",
                value: self.delta_t_frac,
            });
        }
        let norm: f64 = self.input.iter().map(|z| z.norm_sqr()).sum();
        if !((norm - 1.0).abs() <= 1e-12) {
            return Err(Error::NotNormalized { norm: norm.sqrt() });
        }
        Ok(())
    }

    /// Duration of each pulse, `t1 (1 + delta_t_frac)`.
    pub fn pulse_duration(&self) -> Result<f64> {
        Ok(self.params.transfer_time()? * (1.0 + self.delta_t_frac))
    }

    pub fn input_state(&self) -> Result<StateVector> {
        logical_state(self.params.space()?, &self.input)
    }

    /// Input with the ideal `diag(-1, 1, 1, 1)` applied.
    pub fn ideal_state(&self) -> Result<StateVector> {
        let mut amps = self.input;
        for (a, s) in amps.iter_mut().zip(IDEAL_SIGNS) {
            *a *= s;
        }
        logical_state(self.params.space()?, &amps)
    }

    /// Pulse 1 with the configured phases, pulse 2 with `phi2 + pi`.
    pub fn schedule(&self) -> Result<Schedule> {
        let t = self.pulse_duration()?;
        let p = &self.params;
        let flipped = p.with_phases(p.phi1, p.phi2 + PI);
        Schedule::new(
            vec![
                Segment {
                    hamiltonian: self.model.hamiltonian(p)?,
                    duration: t,
                },
                Segment {
                    hamiltonian: self.model.hamiltonian(&flipped)?,
                    duration: t,
                },
            ],
            2.0 * t,
        )
    }
}

fn logical_state(space: SpaceSpec, amps: &[C64; 4]) -> Result<StateVector> {
    let terms: Vec<_> = LOGICAL_BASIS
        .iter()
        .zip(amps)
        .map(|(&(a, b), &z)| (z, (a, b, 0)))
        .collect();
    StateVector::superposition(space, &terms)
}

/// Closed-evolution unitary of the two pulses.
fn gate_unitary(spec: &CpgSpec) -> Result<CMatrix> {
    let sched = spec.schedule()?;
    let mut u: Option<CMatrix> = None;
    for seg in sched.segments() {
        let step = SpectralPropagator::new(&seg.hamiltonian)?.unitary(seg.duration);
        u = Some(match u {
            None => step,
            Some(prev) => step * prev,
        });
    }
    Ok(u.expect("schedule has two segments"))
}

/// `-arg <fi|U|fi>` under the full closed Hamiltonian at zero timing error.
pub(crate) fn compensation_phase(params: &SystemParams) -> Result<f64> {
    let reference = CpgSpec::new(*params, ModelChoice::FullClosed);
    let u = gate_unitary(&reference)?;
    let space = params.space()?;
    let fi = space.basis_index(NvLevel::F, NvLevel::I, 0)?;
    Ok(-u[(fi, fi)].arg())
}

/// Multiplies every component with NV 1 in `|f>` by `e^{i theta}`.
fn phase_on_f1(space: SpaceSpec, theta: f64) -> Vec<C64> {
    (0..space.dim())
        .map(|k| match space.unindex(k) {
            Ok((NvLevel::F, _, _)) => C64::from_polar(1.0, theta),
            _ => C64::new(1.0, 0.0),
        })
        .collect()
}

pub fn cpg_run(spec: &CpgSpec) -> Result<GateReport> {
    spec.validate()?;
    let space = spec.params.space()?;
    let duration = 2.0 * spec.pulse_duration()?;
    let input = spec.input_state()?;
    let ideal = spec.ideal_state()?;
    let theta = if spec.compensate {
        compensation_phase(&spec.params)?
    } else {
        0.0
    };
    let phases = phase_on_f1(space, theta);
    let index = |(a, b): (NvLevel, NvLevel)| space.basis_index(a, b, 0);

    if !spec.model.is_open() {
        let mut u = gate_unitary(spec)?;
        for (r, &ph) in phases.iter().enumerate() {
            for c in 0..space.dim() {
                u[(r, c)] *= ph;
            }
        }
        let out = StateVector::normalized(space, &u * input.amplitudes())?;
        let mut table = [C64::new(0.0, 0.0); 4];
        for (entry, &x) in table.iter_mut().zip(&LOGICAL_BASIS) {
            let k = index(x)?;
            *entry = u[(k, k)];
        }
        return Ok(GateReport {
            model: spec.model,
            fidelity: fidelity_pure(&ideal, &out)?,
            final_state: FinalState::Pure(out),
            optimal: None,
            truth_table: Some(table),
            duration,
            fi_phase: Some(table[1].arg()),
            compensation: theta,
        });
    }

    let sched = spec.schedule()?;
    let collapse = build_collapse_set(&spec.params)?;
    let apply_phase = |rho: &DensityMatrix| -> DensityMatrix {
        let mut m = rho.entries().clone();
        for r in 0..space.dim() {
            for c in 0..space.dim() {
                m[(r, c)] *= phases[r] * phases[c].conj();
            }
        }
        DensityMatrix::from_raw(space, m)
    };
    let evolve = |psi: &StateVector| -> Result<DensityMatrix> {
        let traj = lindblad_evolve(&sched, &collapse, &psi.to_density())?;
        Ok(apply_phase(
            traj.final_mixed().expect("open evolution yields density matrices"),
        ))
    };
    let rho = evolve(&input)?;

    let truth_table = if spec.open_truth_table {
        // |ii> is untouched by the drive and every decay channel, so the
        // coherence with it reads out <x|U|x>.
        let ii = index(LOGICAL_BASIS[3])?;
        let mut table = [C64::new(1.0, 0.0); 4];
        for (entry, &x) in table.iter_mut().zip(&LOGICAL_BASIS[..3]) {
            let probe = StateVector::superposition(
                space,
                &[
                    (C64::new(1.0, 0.0), (x.0, x.1, 0)),
                    (C64::new(1.0, 0.0), (NvLevel::I, NvLevel::I, 0)),
                ],
            )?;
            let out = evolve(&probe)?;
            *entry = out.entries()[(index(x)?, ii)] * 2.0;
        }
        Some(table)
    } else {
        None
    };
    Ok(GateReport {
        model: spec.model,
        fidelity: fidelity(&ideal, &rho)?,
        final_state: FinalState::Mixed(rho),
        optimal: None,
        fi_phase: truth_table.map(|t| t[1].arg()),
        truth_table,
        duration,
        compensation: theta,
    })
}
