use alloc::string::String;
use alloc::vec::Vec;

use crate::qcore::{DensityMatrix, OperatorMatrix, SpaceSpec, SpectralPropagator, StateVector};
use crate::{Error, Result};

/// Number of sampling intervals used when a schedule picks its own `sample_dt`.
pub const DEFAULT_SAMPLES: usize = 400;

/// One piece of a piecewise-constant Hamiltonian.
#[derive(Debug, Clone)]
pub struct Segment {
    pub hamiltonian: OperatorMatrix,
    pub duration: f64,
}

/// Ordered Hamiltonian segments plus an output sampling interval.
#[derive(Debug, Clone)]
pub struct Schedule {
    segments: Vec<Segment>,
    sample_dt: f64,
}

impl Schedule {
    pub fn new(segments: Vec<Segment>, sample_dt: f64) -> Result<Self> {
        let first = segments.first().ok_or(Error::InvalidDuration { value: 0.0 })?;
        let space = first.hamiltonian.space();
        for s in &segments {
            space.check_dim(&s.hamiltonian.space())?;
            if !(s.duration.is_finite() && s.duration > 0.0) {
                return Err(Error::InvalidDuration { value: s.duration });
            }
        }
        if !(sample_dt.is_finite() && sample_dt > 0.0) {
            return Err(Error::InvalidParameter {
                name: "sample_dt",
                value: sample_dt,
            });
        }
        Ok(Schedule { segments, sample_dt })
    }

    /// Samples every `T / 400`.
    pub fn with_default_sampling(segments: Vec<Segment>) -> Result<Self> {
        let total: f64 = segments.iter().map(|s| s.duration).sum();
        Self::new(segments, total / DEFAULT_SAMPLES as f64)
    }

    pub fn single(hamiltonian: OperatorMatrix, duration: f64, sample_dt: f64) -> Result<Self> {
        Self::new(alloc::vec![Segment { hamiltonian, duration }], sample_dt)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn sample_dt(&self) -> f64 {
        self.sample_dt
    }

    pub fn space(&self) -> SpaceSpec {
        self.segments[0].hamiltonian.space()
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Segment end times, cumulative.
    pub fn boundaries(&self) -> Vec<f64> {
        let mut t = 0.0;
        self.segments
            .iter()
            .map(|s| {
                t += s.duration;
                t
            })
            .collect()
    }

    /// `k * sample_dt` for every `k` in range, merged with the segment
    /// boundaries; strictly increasing, starting at 0 and ending at `T`.
    pub fn sample_times(&self) -> Vec<f64> {
        let total = self.total_duration();
        let eps = 1e-12 * total.max(1.0);
        let mut times: Vec<f64> = Vec::new();
        let mut k = 0usize;
        loop {
            let t = k as f64 * self.sample_dt;
            if t > total - eps {
                break;
            }
            times.push(t);
            k += 1;
        }
        times.extend(self.boundaries());
        times.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
        times.dedup_by(|b, a| (*b - *a).abs() <= eps);
        times
    }
}

/// Population of one flat basis index, recorded at every sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    pub name: String,
    pub index: usize,
}

impl Observable {
    pub fn population(name: &str, index: usize) -> Self {
        Observable {
            name: name.into(),
            index,
        }
    }
}

#[derive(Debug, Clone)]
pub enum TrajectoryStates {
    Pure(Vec<StateVector>),
    Mixed(Vec<DensityMatrix>),
}

/// Time-stamped states and scalar series from one propagation.
///
/// Pure trajectories always carry a `norm` series and mixed ones a `trace`
/// series, in addition to the requested populations.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: TrajectoryStates,
    pub observables: Vec<(String, Vec<f64>)>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn observable(&self, name: &str) -> Option<&[f64]> {
        self.observables
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn final_pure(&self) -> Option<&StateVector> {
        match &self.states {
            TrajectoryStates::Pure(v) => v.last(),
            TrajectoryStates::Mixed(_) => None,
        }
    }

    pub fn final_mixed(&self) -> Option<&DensityMatrix> {
        match &self.states {
            TrajectoryStates::Mixed(v) => v.last(),
            TrajectoryStates::Pure(_) => None,
        }
    }

    /// Population of a flat index at each sample, for either kind of state.
    pub fn population_series(&self, index: usize) -> Vec<f64> {
        match &self.states {
            TrajectoryStates::Pure(v) => v.iter().map(|s| s.population(index)).collect(),
            TrajectoryStates::Mixed(v) => v.iter().map(|r| r.population(index)).collect(),
        }
    }
}

pub fn evolve_schedule(schedule: &Schedule, psi0: &StateVector) -> Result<Trajectory> {
    evolve_schedule_observed(schedule, psi0, &[])
}

/// Exact spectral propagation segment by segment.
///
/// Each sample inside a segment is propagated directly from the segment's
/// initial state, so no error accumulates between samples.
pub fn evolve_schedule_observed(
    schedule: &Schedule,
    psi0: &StateVector,
    observables: &[Observable],
) -> Result<Trajectory> {
    schedule.space().check_dim(&psi0.space())?;
    for o in observables {
        if o.index >= psi0.space().dim() {
            return Err(Error::IndexOutOfRange {
                index: o.index,
                dim: psi0.space().dim(),
            });
        }
    }
    let times = schedule.sample_times();
    let mut states = Vec::with_capacity(times.len());
    let mut cursor = times.iter().copied().peekable();

    let mut start = 0.0;
    let mut psi = psi0.clone();
    let n_segments = schedule.segments().len();
    for (k, seg) in schedule.segments().iter().enumerate() {
        let prop = SpectralPropagator::new(&seg.hamiltonian)?;
        let coeffs = prop.coefficients(&psi)?;
        let end = start + seg.duration;
        let last = k + 1 == n_segments;
        while let Some(&t) = cursor.peek() {
            let inside = if last { true } else { t < end - 1e-12 * end.max(1.0) };
            if !inside {
                break;
            }
            states.push(prop.state_from_coefficients(&coeffs, (t - start).max(0.0)));
            cursor.next();
        }
        psi = prop.state_from_coefficients(&coeffs, seg.duration);
        start = end;
    }
    if let Some(last) = states.last_mut() {
        *last = psi;
    }

    let mut series = alloc::vec![(String::from("norm"), states.iter().map(|s| s.norm()).collect())];
    for o in observables {
        series.push((o.name.clone(), states.iter().map(|s| s.population(o.index)).collect()));
    }
    Ok(Trajectory {
        times,
        states: TrajectoryStates::Pure(states),
        observables: series,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::{build_effective_embedded, SystemParams};
    use crate::qcore::NvLevel::*;
    use crate::C64;
    use core::f64::consts::PI;

    #[test]
    fn sample_times_include_boundaries() {
        let s = SpaceSpec::default();
        let h = OperatorMatrix::zeros(s);
        let sched = Schedule::new(
            alloc::vec![
                Segment {
                    hamiltonian: h.clone(),
                    duration: 1.05
                },
                Segment {
                    hamiltonian: h,
                    duration: 1.0
                },
            ],
            0.5,
        )
        .unwrap();
        let t = sched.sample_times();
        assert_eq!(t, alloc::vec![0.0, 0.5, 1.0, 1.05, 1.5, 2.0, 2.05]);
    }

    #[test]
    fn invalid_schedules() {
        let h = OperatorMatrix::zeros(SpaceSpec::default());
        assert!(Schedule::single(h.clone(), 0.0, 0.1).is_err());
        assert!(Schedule::single(h.clone(), -1.0, 0.1).is_err());
        assert!(Schedule::single(h.clone(), 1.0, 0.0).is_err());
        let other = OperatorMatrix::zeros(SpaceSpec::new(2).unwrap());
        let mixed = Schedule::new(
            alloc::vec![
                Segment {
                    hamiltonian: h,
                    duration: 1.0
                },
                Segment {
                    hamiltonian: other,
                    duration: 1.0
                },
            ],
            0.1,
        );
        assert!(matches!(mixed, Err(Error::DimensionMismatch { .. })));
        assert!(Schedule::new(alloc::vec![], 0.1).is_err());
    }

    #[test]
    fn zero_hamiltonian_is_constant() {
        let s = SpaceSpec::default();
        let psi = StateVector::basis(s, G, F, 0).unwrap();
        let sched = Schedule::single(OperatorMatrix::zeros(s), 10.0, 1.0).unwrap();
        let traj = evolve_schedule(&sched, &psi).unwrap();
        assert_eq!(traj.len(), 11);
        let TrajectoryStates::Pure(states) = &traj.states else {
            panic!()
        };
        assert!(states.iter().all(|x| x == &psi));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let s2 = SpaceSpec::new(2).unwrap();
        let psi = StateVector::basis(s2, G, F, 0).unwrap();
        let sched = Schedule::single(OperatorMatrix::zeros(SpaceSpec::default()), 1.0, 0.1).unwrap();
        assert!(matches!(
            evolve_schedule(&sched, &psi),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn effective_transfer_and_phase_flip() {
        let p = SystemParams::default();
        let s = p.space().unwrap();
        let t1 = PI * p.delta / (p.omega1 * p.omega1);
        let fg = StateVector::basis(s, F, G, 0).unwrap();
        let gf_idx = s.basis_index(G, F, 0).unwrap();

        let sched = Schedule::single(build_effective_embedded(&p).unwrap(), t1, t1 / 400.0).unwrap();
        let traj = evolve_schedule_observed(&sched, &fg, &[Observable::population("p_gf", gf_idx)]).unwrap();
        assert!((traj.final_pure().unwrap().population(gf_idx) - 1.0).abs() < 1e-12);
        let p_gf = traj.observable("p_gf").unwrap();
        assert!((p_gf[200] - 0.5).abs() < 1e-9);

        let flipped = p.with_phases(p.phi1, p.phi2 + PI);
        let two = Schedule::new(
            alloc::vec![
                Segment {
                    hamiltonian: build_effective_embedded(&p).unwrap(),
                    duration: t1
                },
                Segment {
                    hamiltonian: build_effective_embedded(&flipped).unwrap(),
                    duration: t1
                },
            ],
            t1 / 100.0,
        )
        .unwrap();
        let out = evolve_schedule(&two, &fg).unwrap();
        let fin = out.final_pure().unwrap();
        assert!((fin.amplitude(F, G, 0).unwrap() - C64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!(out.observable("norm").unwrap().iter().all(|n| (n - 1.0).abs() < 1e-10));
    }
}
