//! Built-in invariant checks reported by `nvzeno validate`.

use std::f64::consts::PI;

use nvzeno_core::hamiltonians::{
    build_effective, build_full, build_zeno_reduced, eliminate_adiabatically, frequency_audit, zeno_eigensystem,
    SystemParams,
};
use nvzeno_core::metrics::{
    concurrence_closed_form, concurrence_wootters, flip_flop_state, EntanglementParams, QubitRho,
};
use nvzeno_core::protocols::ModelChoice;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn from(name: &'static str, r: Result<(bool, String), nvzeno_core::Error>) -> Self {
        match r {
            Ok((passed, detail)) => Check { name, passed, detail },
            Err(e) => Check {
                name,
                passed: false,
                detail: format!("error: {e}"),
            },
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

pub fn run_checks(params: &SystemParams, model: ModelChoice) -> Vec<Check> {
    let mut out = vec![
        Check::from(
            "hermiticity",
            (|| {
                let dev = build_full(params)?.hermiticity_error();
                Ok((dev <= 1e-12, format!("max |H - H^dag| = {dev:.3e}")))
            })(),
        ),
        Check::from(
            "zeno_eigenvalues",
            (|| {
                let e = zeno_eigensystem(params)?.energies();
                let g = params.g1;
                let want = [0.0, -(2f64.sqrt()) * g, 2f64.sqrt() * g];
                let mut got = e;
                got.sort_by(f64::total_cmp);
                let mut sorted_want = want;
                sorted_want.sort_by(f64::total_cmp);
                let ok = got
                    .iter()
                    .zip(&sorted_want)
                    .all(|(a, b)| (a - b).abs() <= 1e-12 * g.max(1.0));
                Ok((
                    ok,
                    format!(
                        "{{{:.12}, {:.12}, {:.12}}} (expected {{0, -sqrt2 g, +sqrt2 g}})",
                        got[0], got[1], got[2]
                    ),
                ))
            })(),
        ),
        Check::from(
            "effective_vs_elimination",
            (|| {
                let reduced = build_zeno_reduced(params)?;
                let eliminated = eliminate_adiabatically(&reduced.matrix, &[0, 1])?;
                let effective = build_effective(params)?;
                let worst = (&eliminated - &effective.matrix)
                    .iter()
                    .map(|z| z.norm())
                    .fold(0.0, f64::max);
                let omega = params.omega1.max(params.omega2);
                let bound = 5.0 * omega.powi(3) / (params.delta * params.delta);
                Ok((
                    worst <= bound,
                    format!("max deviation {worst:.3e} <= bound {bound:.3e}"),
                ))
            })(),
        ),
        Check::from(
            "concurrence_identities",
            (|| {
                let lambda = params.flip_flop_rate()?;
                let n = 400;
                let t_end = 2.0 * PI / lambda.abs();
                let mut worst_const: f64 = 0.0;
                let mut worst_square: f64 = 0.0;
                let mut worst_peak: f64 = 0.0;
                for r in [0.1, 0.5, 1.0, 2.0, 3.0] {
                    let p = EntanglementParams::from_ratio(r, lambda)?;
                    let mut peak: f64 = 0.0;
                    for k in 0..=n {
                        let t = t_end * k as f64 / n as f64;
                        let rho = QubitRho::from_ket(&flip_flop_state(&p, t));
                        let c = concurrence_wootters(&rho)?;
                        peak = peak.max(c);
                        worst_square =
                            worst_square.max((concurrence_closed_form(&rho.flip_flop_entries()) - c * c).abs());
                        if r == 1.0 {
                            worst_const = worst_const.max((c - 1.0).abs());
                        }
                    }
                    // the maximum sits at lambda t = pi / 2
                    let rho = QubitRho::from_ket(&flip_flop_state(&p, 0.5 * PI / lambda));
                    peak = peak.max(concurrence_wootters(&rho)?);
                    worst_peak = worst_peak.max(1.0 - peak);
                }
                let ok = worst_const <= 1e-9 && worst_square <= 1e-9 && worst_peak <= 1e-9;
                Ok((
                    ok,
                    format!(
                        "|C(r=1) - 1| {worst_const:.1e}, |C17 - C^2| {worst_square:.1e}, 1 - max C {worst_peak:.1e}"
                    ),
                ))
            })(),
        ),
        Check::from(
            "frequency_audit",
            (|| {
                let audit = frequency_audit(params)?;
                let slowest = audit
                    .terms
                    .iter()
                    .map(|t| t.peak_frequency)
                    .fold(f64::INFINITY, f64::min);
                Ok((
                    audit.passes(),
                    format!("slowest discarded term {slowest:.4} >= {:.4}", audit.threshold),
                ))
            })(),
        ),
        {
            let regime = params.regime();
            let v: Vec<_> = regime.violations().collect();
            Check {
                name: "zeno_regime",
                passed: v.is_empty(),
                detail: if v.is_empty() {
                    format!(
                        "Omega/g {:.3}, |Delta|/(2 sqrt2 g) {:.3}, Omega/|Delta| {:.3}",
                        regime.omega_over_g, regime.delta_over_zeno_gap, regime.omega_over_delta
                    )
                } else {
                    format!("violated: {}", v.join(", "))
                },
            }
        },
    ];
    if model == ModelChoice::Effective {
        out.push(Check::from(
            "effective_model_defined",
            (|| {
                let lambda = params.flip_flop_rate()?;
                Ok((true, format!("lambda = Omega^2 / Delta = {lambda:.6}")))
            })(),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_parameters_pass() {
        let checks = run_checks(&SystemParams::default(), ModelChoice::Effective);
        for c in &checks {
            assert!(c.passed, "{}", c.line());
        }
        let eig = checks.iter().find(|c| c.name == "zeno_eigenvalues").unwrap();
        assert!(eig.detail.contains("1.414213562373"));
    }

    #[test]
    fn zero_detuning_fails_for_the_effective_model() {
        let p = SystemParams::symmetric(1.0, 0.05, 0.0);
        let checks = run_checks(&p, ModelChoice::Effective);
        let c = checks.iter().find(|c| c.name == "effective_model_defined").unwrap();
        assert!(!c.passed);
        assert!(c.detail.contains("detuning"), "{}", c.detail);
    }
}
