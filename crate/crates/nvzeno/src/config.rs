//! TOML run configuration.
//!
//! Flat keys set parameters and protocol arguments; an optional `[axes]`
//! table lists sweep axes in order. Unknown keys are rejected. See the
//! README for the full grammar.

use std::f64::consts::PI;
use std::path::Path;

use indexmap::IndexMap;
use nvzeno_core::hamiltonians::SystemParams;
use nvzeno_core::protocols::{ModelChoice, DEFAULT_WINDOW};
use serde::Deserialize;

use crate::error::{CliError, CliResult};
use crate::output::{Format, OutputOptions, DEFAULT_PRECISION};
use crate::sweep::{Axis, PhysicalUnits, ProtocolSpec, Scale, SweepSpec, TIME_AXIS};

pub const DEFAULT_TIME_POINTS: usize = 401;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub scale: Scale,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub protocol: Option<String>,
    pub model: Option<String>,
    #[serde(rename = "g_GHz")]
    pub g_ghz: Option<f64>,

    pub g: Option<f64>,
    pub g1: Option<f64>,
    pub g2: Option<f64>,
    pub omega: Option<f64>,
    pub omega1: Option<f64>,
    pub omega2: Option<f64>,
    pub phi1: Option<f64>,
    pub phi2: Option<f64>,
    pub delta: Option<f64>,
    pub kappa: Option<f64>,
    pub gamma: Option<f64>,
    pub n_max: Option<usize>,

    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub window: Option<[f64; 2]>,
    pub optimize: Option<bool>,
    pub delta_t_frac: Option<f64>,
    pub compensate: Option<bool>,
    pub truth_table: Option<bool>,
    pub r: Option<f64>,
    pub lambda: Option<f64>,
    pub t_end: Option<f64>,
    pub t_points: Option<usize>,

    pub metrics: Option<Vec<String>>,
    pub format: Option<String>,
    pub precision: Option<usize>,
    pub run_id: Option<String>,
    pub workers: Option<usize>,

    pub axes: Option<IndexMap<String, AxisConfig>>,
}

pub fn parse_model(s: &str) -> CliResult<ModelChoice> {
    match s {
        "effective" => Ok(ModelChoice::Effective),
        "full" | "full_closed" => Ok(ModelChoice::FullClosed),
        "open" | "full_open" => Ok(ModelChoice::FullOpen),
        other => Err(CliError::config(format!(
            "unknown model `{other}` (effective|full|open)"
        ))),
    }
}

pub fn parse_format(s: &str) -> CliResult<Format> {
    match s {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        other => Err(CliError::config(format!("unknown format `{other}` (csv|json)"))),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::config(e.to_string()))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn units(&self) -> CliResult<Option<PhysicalUnits>> {
        match self.g_ghz {
            None => Ok(None),
            Some(g) if g.is_finite() && g > 0.0 => Ok(Some(PhysicalUnits { g_ghz: g })),
            Some(g) => Err(CliError::config(format!("g_GHz must be positive, got {g}"))),
        }
    }

    fn rate(&self, v: f64) -> CliResult<f64> {
        Ok(self.units()?.map_or(v, |u| u.rate(v)))
    }

    /// Parameters in units of `g`; defaults are `Omega = 0.05`, `Delta = 0.5`,
    /// no decay, one photon.
    pub fn system_params(&self) -> CliResult<SystemParams> {
        let both = |shared: Option<f64>, a: Option<f64>, b: Option<f64>, name: &str| {
            if shared.is_some() && (a.is_some() || b.is_some()) {
                return Err(CliError::config(format!("`{name}` conflicts with `{name}1`/`{name}2`")));
            }
            Ok((a.or(shared), b.or(shared)))
        };
        let g_default = self.g_ghz.unwrap_or(1.0);
        let (g1, g2) = both(self.g, self.g1, self.g2, "g")?;
        let (o1, o2) = both(self.omega, self.omega1, self.omega2, "omega")?;
        let mut p = SystemParams::symmetric(1.0, 0.05, 0.5);
        p.g1 = self.rate(g1.unwrap_or(g_default))?;
        p.g2 = self.rate(g2.unwrap_or(g_default))?;
        if let Some(v) = o1 {
            p.omega1 = self.rate(v)?;
        }
        if let Some(v) = o2 {
            p.omega2 = self.rate(v)?;
        }
        if let Some(v) = self.delta {
            p.delta = self.rate(v)?;
        }
        p.kappa = self.rate(self.kappa.unwrap_or(0.0))?;
        p.gamma = self.rate(self.gamma.unwrap_or(0.0))?;
        p.phi1 = self.phi1.unwrap_or(0.0);
        p.phi2 = self.phi2.unwrap_or(0.0);
        p.n_max = self.n_max.unwrap_or(1);
        p.validate().map_err(|e| CliError::config(e.to_string()))?;
        Ok(p)
    }

    pub fn model(&self, flag: Option<ModelChoice>, default: ModelChoice) -> CliResult<ModelChoice> {
        match (flag, &self.model) {
            (Some(m), _) => Ok(m),
            (None, Some(s)) => parse_model(s),
            (None, None) => Ok(default),
        }
    }

    /// Protocol arguments for `kind` (qst, cpg, concurrence, compare).
    pub fn protocol(&self, kind: &str, model_flag: Option<ModelChoice>) -> CliResult<ProtocolSpec> {
        let unused = |keys: &[(&str, bool)]| -> CliResult<()> {
            match keys.iter().find(|(_, set)| *set) {
                Some((k, _)) => Err(CliError::config(format!("`{k}` does not apply to {kind}"))),
                None => Ok(()),
            }
        };
        let qst_keys = [
            ("alpha", self.alpha.is_some()),
            ("beta", self.beta.is_some()),
            ("window", self.window.is_some()),
            ("optimize", self.optimize.is_some()),
        ];
        let cpg_keys = [
            ("delta_t_frac", self.delta_t_frac.is_some()),
            ("compensate", self.compensate.is_some()),
            ("truth_table", self.truth_table.is_some()),
        ];
        let ent_keys = [("r", self.r.is_some()), ("lambda", self.lambda.is_some())];
        match kind {
            "qst" => {
                unused(&cpg_keys)?;
                unused(&ent_keys)?;
                let w = std::f64::consts::FRAC_1_SQRT_2;
                let window = match (self.optimize, self.window) {
                    (Some(false), _) => None,
                    (_, Some([a, b])) => Some((a, b)),
                    _ => Some(DEFAULT_WINDOW),
                };
                Ok(ProtocolSpec::Qst {
                    alpha: self.alpha.unwrap_or(w),
                    beta: self.beta.unwrap_or(w),
                    model: self.model(model_flag, ModelChoice::FullClosed)?,
                    window,
                })
            }
            "cpg" => {
                unused(&qst_keys)?;
                unused(&ent_keys)?;
                Ok(ProtocolSpec::Cpg {
                    model: self.model(model_flag, ModelChoice::FullClosed)?,
                    delta_t_frac: self.delta_t_frac.unwrap_or(0.0),
                    compensate: self.compensate.unwrap_or(false),
                    truth_table: self.truth_table.unwrap_or(true),
                })
            }
            "concurrence" => {
                unused(&qst_keys)?;
                unused(&cpg_keys)?;
                let p = self.system_params()?;
                let lambda = match self.lambda {
                    Some(l) => self.rate(l)?,
                    None => p.omega1 * p.omega1 / p.delta,
                };
                Ok(ProtocolSpec::Concurrence {
                    r: self.r.unwrap_or(1.0),
                    lambda,
                    model: self.model(model_flag, ModelChoice::Effective)?,
                })
            }
            "compare" => {
                unused(&qst_keys)?;
                unused(&cpg_keys)?;
                unused(&ent_keys)?;
                if self.model.is_some() || model_flag.is_some() {
                    return Err(CliError::config(
                        "compare always runs both the full and effective models",
                    ));
                }
                Ok(ProtocolSpec::Compare)
            }
            other => Err(CliError::config(format!(
                "unknown protocol `{other}` (qst|cpg|concurrence|compare)"
            ))),
        }
    }

    /// Sweep for `kind`; `kind = None` takes the `protocol` key. For compare
    /// and concurrence a `t` axis is appended when none is configured.
    pub fn sweep_spec(&self, kind: Option<&str>, model_flag: Option<ModelChoice>) -> CliResult<SweepSpec> {
        let kind = match (kind, &self.protocol) {
            (Some(k), Some(p)) if k != p => {
                return Err(CliError::config(format!(
                    "config protocol `{p}` does not match command `{k}`"
                )))
            }
            (Some(k), _) => k.to_string(),
            (None, Some(p)) => p.clone(),
            (None, None) => return Err(CliError::config("missing `protocol` key")),
        };
        let base = self.system_params()?;
        let protocol = self.protocol(&kind, model_flag)?;
        let units = self.units()?;
        let mut axes: Vec<Axis> = self
            .axes
            .iter()
            .flatten()
            .map(|(name, a)| Axis {
                name: name.clone(),
                min: a.min,
                max: a.max,
                count: a.count,
                scale: a.scale,
            })
            .collect();

        let wants_time = matches!(protocol, ProtocolSpec::Compare | ProtocolSpec::Concurrence { .. });
        let has_time = axes.iter().any(|a| a.name == TIME_AXIS);
        if wants_time && !has_time {
            let t_end = match self.t_end {
                Some(t) => t,
                None => {
                    let t = match &protocol {
                        ProtocolSpec::Concurrence { lambda, .. } => 4.0 * PI / lambda.abs(),
                        _ => 2.0 * PI * base.delta.abs() / (base.omega1 * base.omega1),
                    };
                    units.map_or(t, |u| u.to_ns(t))
                }
            };
            let count = self.t_points.unwrap_or(DEFAULT_TIME_POINTS);
            axes.push(Axis::linear(TIME_AXIS, 0.0, t_end, count));
        } else if self.t_end.is_some() || self.t_points.is_some() {
            return Err(CliError::config(
                "`t_end`/`t_points` only apply to compare and concurrence without a `t` axis",
            ));
        }

        let spec = SweepSpec {
            base,
            axes,
            protocol,
            metrics: self.metrics.clone().unwrap_or_default(),
            units,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn output_options(
        &self,
        format_flag: Option<Format>,
        precision_flag: Option<usize>,
    ) -> CliResult<OutputOptions> {
        let format = match (format_flag, &self.format) {
            (Some(f), _) => f,
            (None, Some(s)) => parse_format(s)?,
            (None, None) => Format::Csv,
        };
        let opts = OutputOptions {
            format,
            precision: precision_flag.or(self.precision).unwrap_or(DEFAULT_PRECISION),
        };
        opts.validate()?;
        Ok(opts)
    }
}
