use alloc::vec::Vec;

use crate::dynamics::Schedule;
use crate::hamiltonians::SystemParams;
use crate::qcore::{NvLevel, SpectralPropagator, StateVector};
use crate::{Error, Result};

use super::ModelChoice;

/// Populations of `|gf0>` (P1) and `|fg0>` (P2) from `|gf0>` under the full
/// and the effective Hamiltonian on a shared time grid.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub times: Vec<f64>,
    pub full_p1: Vec<f64>,
    pub full_p2: Vec<f64>,
    pub effective_p1: Vec<f64>,
    pub effective_p2: Vec<f64>,
    pub max_deviation: f64,
}

pub fn compare_hamiltonians(params: &SystemParams, t_end: f64, sample_dt: f64) -> Result<Comparison> {
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::InvalidDuration { value: t_end });
    }
    let probe = Schedule::single(crate::qcore::OperatorMatrix::zeros(params.space()?), t_end, sample_dt)?;
    compare_hamiltonians_at(params, &probe.sample_times())
}

/// [`compare_hamiltonians`] on an explicit, non-negative time grid.
pub fn compare_hamiltonians_at(params: &SystemParams, times: &[f64]) -> Result<Comparison> {
    params.validate()?;
    if let Some(&t) = times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(Error::InvalidDuration { value: t });
    }
    let space = params.space()?;
    let psi0 = StateVector::basis(space, NvLevel::G, NvLevel::F, 0)?;
    let (i1, i2) = (
        space.basis_index(NvLevel::G, NvLevel::F, 0)?,
        space.basis_index(NvLevel::F, NvLevel::G, 0)?,
    );
    let run = |model: ModelChoice| -> Result<(Vec<f64>, Vec<f64>)> {
        let prop = SpectralPropagator::new(&model.hamiltonian(params)?)?;
        let c = prop.coefficients(&psi0)?;
        let mut p1 = Vec::with_capacity(times.len());
        let mut p2 = Vec::with_capacity(times.len());
        for &t in times {
            let psi = prop.state_from_coefficients(&c, t);
            p1.push(psi.population(i1));
            p2.push(psi.population(i2));
        }
        Ok((p1, p2))
    };
    let (full_p1, full_p2) = run(ModelChoice::FullClosed)?;
    let (effective_p1, effective_p2) = run(ModelChoice::Effective)?;
    let max_deviation = full_p1
        .iter()
        .zip(&effective_p1)
        .chain(full_p2.iter().zip(&effective_p2))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(Comparison {
        times: times.to_vec(),
        full_p1,
        full_p2,
        effective_p1,
        effective_p2,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_drive_means_no_motion() {
        let p = SystemParams::symmetric(1.0, 0.0, 0.5);
        let c = compare_hamiltonians(&p, 100.0, 1.0).unwrap();
        assert!(c.max_deviation < 1e-15);
        assert!(c.full_p1.iter().all(|&x| (x - 1.0).abs() < 1e-12));
    }

    #[test]
    fn explicit_grid_matches_sampled_run() {
        let p = SystemParams::symmetric(1.0, 0.05, 0.5);
        let a = compare_hamiltonians(&p, 100.0, 25.0).unwrap();
        let b = compare_hamiltonians_at(&p, &[0.0, 25.0, 50.0, 75.0, 100.0]).unwrap();
        assert_eq!(a.times.len(), 5);
        for (x, y) in a.full_p2.iter().zip(&b.full_p2) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn operating_points_agree_and_improve() {
        let a = SystemParams::symmetric(1.0, 0.05, 0.5);
        let b = SystemParams::symmetric(1.0, 0.01, 0.2);
        let t = |p: &SystemParams| 2.0 * p.transfer_time().unwrap();
        let ca = compare_hamiltonians(&a, t(&a), t(&a) / 400.0).unwrap();
        let cb = compare_hamiltonians(&b, t(&b), t(&b) / 400.0).unwrap();
        assert!(ca.max_deviation <= 0.05, "{}", ca.max_deviation);
        assert!(cb.max_deviation <= 0.02, "{}", cb.max_deviation);
        assert!(cb.max_deviation < ca.max_deviation);
    }
}
