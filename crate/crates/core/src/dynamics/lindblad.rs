use alloc::string::String;
use alloc::vec::Vec;

use super::rk45::DormandPrince;
use super::schedule::{Observable, Schedule, Trajectory, TrajectoryStates};
use crate::hamiltonians::SystemParams;
use crate::qcore::{
    lift_nv_operator, photon_annihilator, DensityMatrix, NvLevel, OperatorMatrix, Site, HERMITIAN_TOL, POSITIVITY_TOL,
    TRACE_TOL,
};
use crate::{CMatrix, Error, Result, C64};

/// One dissipation channel `rate * D[L]`, `D[L] rho = L rho L^dag - {L^dag L, rho} / 2`.
#[derive(Debug, Clone)]
pub struct CollapseChannel {
    pub name: String,
    pub operator: OperatorMatrix,
    pub rate: f64,
}

#[derive(Debug, Clone, Default)]
pub struct CollapseSet {
    channels: Vec<CollapseChannel>,
}

impl CollapseSet {
    pub fn new(channels: Vec<CollapseChannel>) -> Result<Self> {
        if let Some(first) = channels.first() {
            let space = first.operator.space();
            for c in &channels {
                space.check_dim(&c.operator.space())?;
                if !(c.rate.is_finite() && c.rate >= 0.0) {
                    return Err(Error::InvalidParameter {
                        name: "collapse rate",
                        value: c.rate,
                    });
                }
            }
        }
        Ok(CollapseSet { channels })
    }

    pub fn empty() -> Self {
        CollapseSet::default()
    }

    pub fn channels(&self) -> &[CollapseChannel] {
        &self.channels
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }
}

/// Cavity decay `a` at rate `kappa` and the four spontaneous channels
/// `|f><e|_j`, `|g><e|_j` at rate `gamma` each. Zero-rate channels are omitted.
pub fn build_collapse_set(params: &SystemParams) -> Result<CollapseSet> {
    params.validate()?;
    let space = params.space()?;
    let mut channels = Vec::new();
    if params.kappa > 0.0 {
        channels.push(CollapseChannel {
            name: "cavity".into(),
            operator: photon_annihilator(space),
            rate: params.kappa,
        });
    }
    if params.gamma > 0.0 {
        for (site, tag) in [(Site::One, "nv1"), (Site::Two, "nv2")] {
            for lower in [NvLevel::F, NvLevel::G] {
                let mut name = String::from(tag);
                name.push_str(if lower == NvLevel::F { "_e_to_f" } else { "_e_to_g" });
                channels.push(CollapseChannel {
                    name,
                    operator: lift_nv_operator(site, lower, NvLevel::E, space),
                    rate: params.gamma,
                });
            }
        }
    }
    CollapseSet::new(channels)
}

/// Integrator settings for [`lindblad_evolve_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LindbladOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for LindbladOptions {
    fn default() -> Self {
        LindbladOptions {
            rtol: 1e-9,
            atol: 1e-11,
            max_steps: 50_000_000,
        }
    }
}

/// Right-hand side of the master equation for one segment, in sparse form.
///
/// With `H_eff = H - (i/2) sum_k r_k L_k^dag L_k` and Hermitian `rho`,
/// `drho = -i (X - X^dag) + sum_k r_k L_k rho L_k^dag` where `X = H_eff rho`.
struct Liouvillian {
    dim: usize,
    heff: Vec<(usize, usize, C64)>,
    // (row, col, source row, source col, coefficient) of every jump product
    jumps: Vec<(usize, usize, usize, usize, C64)>,
    scratch: Vec<C64>,
}

impl Liouvillian {
    fn new(h: &OperatorMatrix, collapse: &CollapseSet) -> Result<Self> {
        let space = h.space();
        let dim = space.dim();
        let mut heff: CMatrix = h.entries().clone();
        let mut jumps = Vec::new();
        for c in collapse.channels() {
            space.check_dim(&c.operator.space())?;
            if c.rate == 0.0 {
                continue;
            }
            let l = c.operator.entries();
            let ldl = l.adjoint() * l;
            heff -= ldl * C64::new(0.0, 0.5 * c.rate);
            let t = c.operator.triplets();
            for &(i, k, a) in &t {
                for &(j, m, b) in &t {
                    jumps.push((i, j, k, m, a * b.conj() * c.rate));
                }
            }
        }
        let heff = OperatorMatrix::from_matrix(space, heff)?.triplets();
        Ok(Liouvillian {
            dim,
            heff,
            jumps,
            scratch: alloc::vec![C64::new(0.0, 0.0); dim * dim],
        })
    }

    fn apply(&mut self, rho: &[C64], out: &mut [C64]) {
        let d = self.dim;
        let x = &mut self.scratch;
        x.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        for &(i, k, v) in &self.heff {
            let (dst, src) = (&mut x[i * d..(i + 1) * d], &rho[k * d..(k + 1) * d]);
            for (a, b) in dst.iter_mut().zip(src) {
                *a += v * b;
            }
        }
        for i in 0..d {
            for j in 0..d {
                let z = x[i * d + j] - x[j * d + i].conj();
                // -i z
                out[i * d + j] = C64::new(z.im, -z.re);
            }
        }
        for &(i, j, k, m, c) in &self.jumps {
            out[i * d + j] += c * rho[k * d + m];
        }
    }
}

pub fn lindblad_evolve(schedule: &Schedule, collapse: &CollapseSet, rho0: &DensityMatrix) -> Result<Trajectory> {
    lindblad_evolve_with(schedule, collapse, rho0, &LindbladOptions::default(), &[])
}

/// Integrates `drho/dt = -i[H, rho] + sum_k r_k D[L_k] rho` over the schedule
/// with an embedded 5(4) Runge–Kutta pair on the row-major `rho`.
///
/// Samples land exactly on the schedule's sample times; the integrator keeps
/// its step size across samples and segment boundaries.
pub fn lindblad_evolve_with(
    schedule: &Schedule,
    collapse: &CollapseSet,
    rho0: &DensityMatrix,
    options: &LindbladOptions,
    observables: &[Observable],
) -> Result<Trajectory> {
    let space = schedule.space();
    space.check_dim(&rho0.space())?;
    check_physical(rho0)?;
    for o in observables {
        if o.index >= space.dim() {
            return Err(Error::IndexOutOfRange {
                index: o.index,
                dim: space.dim(),
            });
        }
    }
    let d = space.dim();
    let times = schedule.sample_times();
    let boundaries = schedule.boundaries();

    let mut y: Vec<C64> = row_major(rho0.entries());
    let mut rk = DormandPrince::new(d * d, options.rtol, options.atol, options.max_steps);
    let mut states = Vec::with_capacity(times.len());
    states.push(rho0.clone());

    let mut seg_idx = 0;
    let mut liouvillian = Liouvillian::new(&schedule.segments()[0].hamiltonian, collapse)?;
    let mut t = 0.0;
    for &target in times.iter().skip(1) {
        // advance through any segment boundaries before the target
        while t < target {
            let seg_end = boundaries[seg_idx];
            let stop = if target <= seg_end + 1e-12 * seg_end.max(1.0) {
                target
            } else {
                seg_end
            };
            let mut f = |a: &[C64], b: &mut [C64]| liouvillian.apply(a, b);
            rk.integrate(&mut f, &mut y, stop - t)?;
            t = stop;
            let at_boundary = (t - seg_end).abs() <= 1e-12 * seg_end.max(1.0);
            if at_boundary && seg_idx + 1 < schedule.segments().len() {
                seg_idx += 1;
                liouvillian = Liouvillian::new(&schedule.segments()[seg_idx].hamiltonian, collapse)?;
                rk.reset_rhs();
            }
        }
        states.push(DensityMatrix::from_raw(space, from_row_major(d, &y)));
    }

    let mut series = alloc::vec![(String::from("trace"), states.iter().map(|r| r.trace()).collect())];
    for o in observables {
        series.push((o.name.clone(), states.iter().map(|r| r.population(o.index)).collect()));
    }
    Ok(Trajectory {
        times,
        states: TrajectoryStates::Mixed(states),
        observables: series,
    })
}

fn check_physical(rho: &DensityMatrix) -> Result<()> {
    let herm = rho.hermiticity_error();
    if !(herm <= HERMITIAN_TOL) {
        return Err(Error::InvalidDensity {
            reason: "not Hermitian",
            value: herm,
        });
    }
    let tr = rho.trace();
    if !((tr - 1.0).abs() <= TRACE_TOL) {
        return Err(Error::InvalidDensity {
            reason: "trace differs from 1",
            value: tr,
        });
    }
    let min = rho.min_eigenvalue();
    if !(min >= -POSITIVITY_TOL) {
        return Err(Error::InvalidDensity {
            reason: "negative eigenvalue",
            value: min,
        });
    }
    Ok(())
}

fn row_major(m: &CMatrix) -> Vec<C64> {
    let (r, c) = m.shape();
    let mut out = Vec::with_capacity(r * c);
    for i in 0..r {
        for j in 0..c {
            out.push(m[(i, j)]);
        }
    }
    out
}

fn from_row_major(d: usize, y: &[C64]) -> CMatrix {
    CMatrix::from_row_slice(d, d, y)
}
