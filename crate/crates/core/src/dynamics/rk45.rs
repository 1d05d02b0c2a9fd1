//! Dormand–Prince 5(4) embedded pair for autonomous complex ODEs.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // float math without std
use num_traits::Float;

use crate::{Error, Result, C64};

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Adaptive integrator state: stage buffers, the proposed step and the
/// first-same-as-last derivative.
///
/// Accepts a step when the maximum of `err_i / (atol + rtol * max(|y_i|, |y'_i|))`
/// is at most one.
#[derive(Debug, Clone)]
pub struct DormandPrince {
    rtol: f64,
    atol: f64,
    max_steps: usize,
    min_step: f64,
    h: Option<f64>,
    fsal_valid: bool,
    k: [Vec<C64>; 7],
    stage: Vec<C64>,
    next: Vec<C64>,
    stats: StepStats,
}

impl DormandPrince {
    pub fn new(dim: usize, rtol: f64, atol: f64, max_steps: usize) -> Self {
        DormandPrince {
            rtol,
            atol,
            max_steps,
            min_step: 1e-12,
            h: None,
            fsal_valid: false,
            k: core::array::from_fn(|_| vec![C64::new(0.0, 0.0); dim]),
            stage: vec![C64::new(0.0, 0.0); dim],
            next: vec![C64::new(0.0, 0.0); dim],
            stats: StepStats::default(),
        }
    }

    pub fn stats(&self) -> StepStats {
        self.stats
    }

    /// Forgets the cached derivative; call when the right-hand side changes.
    pub fn reset_rhs(&mut self) {
        self.fsal_valid = false;
    }

    /// Advances `y` by `duration` under `dy = f(y)`.
    pub fn integrate<F>(&mut self, f: &mut F, y: &mut [C64], duration: f64) -> Result<()>
    where
        F: FnMut(&[C64], &mut [C64]),
    {
        if duration <= 0.0 {
            return Ok(());
        }
        if !self.fsal_valid {
            f(y, &mut self.k[0]);
            self.stats.evaluations += 1;
            self.fsal_valid = true;
        }
        let mut h = match self.h {
            Some(h) => h,
            None => self.initial_step(f, y, duration),
        };
        let mut t = 0.0;
        let end_eps = 1e-13 * duration.max(1.0);
        while duration - t > end_eps {
            if self.stats.accepted + self.stats.rejected >= self.max_steps {
                return Err(Error::StepLimit {
                    t,
                    steps: self.max_steps,
                });
            }
            let remaining = duration - t;
            let clipped = h >= remaining;
            let step = if clipped { remaining } else { h };

            let err = self.attempt(f, y, step);
            if err <= 1.0 {
                self.stats.accepted += 1;
                t += step;
                y.copy_from_slice(&self.next);
                self.k.swap(0, 6);
                let factor = if err == 0.0 {
                    MAX_FACTOR
                } else {
                    (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
                };
                // a step shortened to land on the end says nothing about h
                if !clipped || factor < 1.0 {
                    h = step * factor;
                }
            } else {
                self.stats.rejected += 1;
                h = step * (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, 1.0);
                if h < self.min_step {
                    return Err(Error::StepSizeUnderflow { t, h });
                }
            }
        }
        self.h = Some(h);
        Ok(())
    }

    fn initial_step<F>(&mut self, f: &mut F, y: &[C64], duration: f64) -> f64
    where
        F: FnMut(&[C64], &mut [C64]),
    {
        let scale = |v: &[C64], y: &[C64], atol: f64, rtol: f64| -> f64 {
            let n = v.len().max(1) as f64;
            (v.iter()
                .zip(y)
                .map(|(a, b)| {
                    let s = atol + rtol * b.norm();
                    (a.norm() / s).powi(2)
                })
                .sum::<f64>()
                / n)
                .sqrt()
        };
        let d0 = scale(y, y, self.atol, self.rtol);
        let d1 = scale(&self.k[0], y, self.atol, self.rtol);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(duration);
        for (s, (a, b)) in self.stage.iter_mut().zip(y.iter().zip(self.k[0].iter())) {
            *s = a + b * h0;
        }
        f(&self.stage, &mut self.k[1]);
        self.stats.evaluations += 1;
        let d2 = self.k[1]
            .iter()
            .zip(self.k[0].iter())
            .zip(y)
            .map(|((a, b), yy)| ((a - b).norm() / (self.atol + self.rtol * yy.norm())).powi(2))
            .sum::<f64>();
        let d2 = (d2 / y.len().max(1) as f64).sqrt() / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(duration)
    }

    /// One trial step from `y` (with `k[0] = f(y)`); fills `next` and `k[6]`
    /// and returns the scaled error norm.
    fn attempt<F>(&mut self, f: &mut F, y: &[C64], h: f64) -> f64
    where
        F: FnMut(&[C64], &mut [C64]),
    {
        let n = y.len();
        macro_rules! stage {
            ($out:expr, $($w:expr => $i:expr),+) => {{
                for j in 0..n {
                    let mut acc = C64::new(0.0, 0.0);
                    $( acc += self.k[$i][j] * ($w); )+
                    self.stage[j] = y[j] + acc * h;
                }
                f(&self.stage, &mut self.k[$out]);
                self.stats.evaluations += 1;
            }};
        }
        stage!(1, A21 => 0);
        stage!(2, A31 => 0, A32 => 1);
        stage!(3, A41 => 0, A42 => 1, A43 => 2);
        stage!(4, A51 => 0, A52 => 1, A53 => 2, A54 => 3);
        stage!(5, A61 => 0, A62 => 1, A63 => 2, A64 => 3, A65 => 4);
        for j in 0..n {
            let acc = self.k[0][j] * B1 + self.k[2][j] * B3 + self.k[3][j] * B4 + self.k[4][j] * B5 + self.k[5][j] * B6;
            self.next[j] = y[j] + acc * h;
        }
        f(&self.next, &mut self.k[6]);
        self.stats.evaluations += 1;
        let mut err: f64 = 0.0;
        for j in 0..n {
            let e = (self.k[0][j] * E1
                + self.k[2][j] * E3
                + self.k[3][j] * E4
                + self.k[4][j] * E5
                + self.k[5][j] * E6
                + self.k[6][j] * E7)
                * h;
            let sc = self.atol + self.rtol * y[j].norm().max(self.next[j].norm());
            err = err.max(e.norm() / sc);
        }
        if err.is_nan() {
            f64::INFINITY
        } else {
            err
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_exponential() {
        // y' = (i w - g) y
        let rate = C64::new(-0.3, 2.0);
        let mut f = |y: &[C64], dy: &mut [C64]| dy[0] = rate * y[0];
        let mut rk = DormandPrince::new(1, 1e-10, 1e-12, 1_000_000);
        let mut y = [C64::new(1.0, 0.0)];
        rk.integrate(&mut f, &mut y, 3.0).unwrap();
        let exact = (rate * 3.0).exp();
        assert!((y[0] - exact).norm() < 1e-8);
        rk.integrate(&mut f, &mut y, 1.5).unwrap();
        assert!((y[0] - (rate * 4.5).exp()).norm() < 1e-8);
    }

    #[test]
    fn harmonic_oscillator_global_error_scales_with_tolerance() {
        let mut f = |y: &[C64], dy: &mut [C64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        };
        let run = |tol: f64, f: &mut dyn FnMut(&[C64], &mut [C64])| {
            let mut rk = DormandPrince::new(2, tol, tol * 1e-2, 1_000_000);
            let mut y = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
            let mut g = |a: &[C64], b: &mut [C64]| f(a, b);
            rk.integrate(&mut g, &mut y, 20.0).unwrap();
            (y[0] - C64::new(20f64.cos(), 0.0)).norm()
        };
        let coarse = run(1e-6, &mut f);
        let fine = run(1e-10, &mut f);
        assert!(coarse < 1e-4);
        assert!(fine < 1e-8);
        assert!(fine < coarse);
    }

    #[test]
    fn step_limit_is_reported() {
        let mut f = |y: &[C64], dy: &mut [C64]| dy[0] = y[0] * C64::new(0.0, 50.0);
        let mut rk = DormandPrince::new(1, 1e-12, 1e-14, 10);
        let mut y = [C64::new(1.0, 0.0)];
        assert!(matches!(
            rk.integrate(&mut f, &mut y, 100.0),
            Err(Error::StepLimit { .. })
        ));
    }
}
