//! Declarative parameter grids over the protocols, evaluated in parallel
//! with results in row-major grid order.

use std::f64::consts::PI;

use nvzeno_core::hamiltonians::SystemParams;
use nvzeno_core::metrics::EntanglementParams;
use nvzeno_core::protocols::{
    compare_hamiltonians_at, cpg_run, entanglement_run, qst_run, CpgSpec, GateReport, ModelChoice, QstSpec,
    DEFAULT_WINDOW,
};
use nvzeno_core::C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};
use crate::output::{Cell, Document, Table};

pub const TOOL: &str = "nvzeno";
pub const TIME_AXIS: &str = "t";
pub const STATUS_COLUMN: &str = "status";
pub const STATUS_OK: &str = "ok";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub scale: Scale,
}

impl Axis {
    pub fn linear(name: &str, min: f64, max: f64, count: usize) -> Self {
        Axis {
            name: name.into(),
            min,
            max,
            count,
            scale: Scale::Linear,
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |why: &str| Err(CliError::config(format!("axis `{}`: {why}", self.name)));
        if self.count < 2 {
            return bad("count must be at least 2");
        }
        if !(self.min.is_finite() && self.max.is_finite()) {
            return bad("range must be finite");
        }
        if self.scale == Scale::Log && !(self.min > 0.0 && self.max > 0.0) {
            return bad("log scale needs a positive range");
        }
        Ok(())
    }

    /// Grid values; the end points are exact.
    pub fn values(&self) -> Vec<f64> {
        let last = self.count - 1;
        (0..self.count)
            .map(|k| {
                if k == last {
                    return self.max;
                }
                let u = k as f64 / last as f64;
                match self.scale {
                    Scale::Linear => self.min + (self.max - self.min) * u,
                    Scale::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * u).exp(),
                }
            })
            .collect()
    }
}

/// Which protocol a sweep evaluates, with its fixed arguments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProtocolSpec {
    /// Full against effective populations; needs a `t` axis.
    Compare,
    Qst {
        /// Input weights; normalized before use.
        alpha: f64,
        beta: f64,
        model: ModelChoice,
        window: Option<(f64, f64)>,
    },
    Cpg {
        model: ModelChoice,
        delta_t_frac: f64,
        compensate: bool,
        /// For the open model, also run the truth-table probes.
        truth_table: bool,
    },
    /// Concurrence from `r|gf0> + |fg0>` (normalized); needs a `t` axis.
    Concurrence { r: f64, lambda: f64, model: ModelChoice },
}

impl ProtocolSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ProtocolSpec::Compare => "compare",
            ProtocolSpec::Qst { .. } => "qst",
            ProtocolSpec::Cpg { .. } => "cpg",
            ProtocolSpec::Concurrence { .. } => "concurrence",
        }
    }

    pub fn qst(model: ModelChoice) -> Self {
        let w = std::f64::consts::FRAC_1_SQRT_2;
        ProtocolSpec::Qst {
            alpha: w,
            beta: w,
            model,
            window: Some(DEFAULT_WINDOW),
        }
    }

    pub fn cpg(model: ModelChoice) -> Self {
        ProtocolSpec::Cpg {
            model,
            delta_t_frac: 0.0,
            compensate: false,
            truth_table: true,
        }
    }

    fn needs_time_axis(&self) -> bool {
        matches!(self, ProtocolSpec::Compare | ProtocolSpec::Concurrence { .. })
    }

    /// Every metric column the protocol can produce.
    pub fn metric_names(&self, physical: bool) -> Vec<&'static str> {
        let mut names: Vec<&'static str> = match self {
            ProtocolSpec::Compare => {
                vec!["full_p1", "full_p2", "effective_p1", "effective_p2", "deviation"]
            }
            ProtocolSpec::Qst { .. } => {
                vec!["fidelity", "optimal_fidelity", "optimal_time", "duration", "gate_time"]
            }
            ProtocolSpec::Cpg { .. } => vec![
                "fidelity",
                "duration",
                "fi_phase",
                "compensation",
                "fg_re",
                "fg_im",
                "fi_re",
                "fi_im",
                "ig_re",
                "ig_im",
                "ii_re",
                "ii_im",
            ],
            ProtocolSpec::Concurrence { .. } => vec!["wootters", "closed_form_concurrence", "trace_deficit"],
        };
        if physical {
            names.extend(match self {
                ProtocolSpec::Qst { .. } => &["duration_ns", "optimal_time_ns", "gate_time_ns"][..],
                ProtocolSpec::Cpg { .. } => &["duration_ns"][..],
                _ => &[][..],
            });
        }
        names
    }
}

/// Frequencies given as `value / 2pi` in GHz with `g` at `g_ghz`.
///
/// Rates divide by `g_ghz` to become units of `g`; a time `t` in units of
/// `1/g` is `t / (2 pi g_ghz)` nanoseconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalUnits {
    pub g_ghz: f64,
}

impl PhysicalUnits {
    pub fn rate(&self, ghz: f64) -> f64 {
        ghz / self.g_ghz
    }

    pub fn to_ns(&self, t: f64) -> f64 {
        t / (2.0 * PI * self.g_ghz)
    }

    pub fn from_ns(&self, ns: f64) -> f64 {
        ns * 2.0 * PI * self.g_ghz
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    /// Fixed parameters in units of `g`.
    pub base: SystemParams,
    /// Outer to inner; a `t` axis must come last.
    pub axes: Vec<Axis>,
    pub protocol: ProtocolSpec,
    /// Metric columns to emit; empty means all.
    #[serde(default)]
    pub metrics: Vec<String>,
    /// When set, rate axes are read in GHz and `t` in ns.
    #[serde(default)]
    pub units: Option<PhysicalUnits>,
}

const RATE_AXES: [&str; 9] = ["g", "g1", "g2", "omega", "omega1", "omega2", "delta", "kappa", "gamma"];
const PHASE_AXES: [&str; 2] = ["phi1", "phi2"];

impl SweepSpec {
    pub fn new(base: SystemParams, axes: Vec<Axis>, protocol: ProtocolSpec) -> Self {
        SweepSpec {
            base,
            axes,
            protocol,
            metrics: Vec::new(),
            units: None,
        }
    }

    fn axis_known(&self, name: &str) -> bool {
        RATE_AXES.contains(&name)
            || PHASE_AXES.contains(&name)
            || match &self.protocol {
                ProtocolSpec::Cpg { .. } => name == "delta_t_frac",
                ProtocolSpec::Concurrence { .. } => matches!(name, "r" | "lambda" | TIME_AXIS),
                ProtocolSpec::Compare => name == TIME_AXIS,
                ProtocolSpec::Qst { .. } => matches!(name, "alpha" | "beta"),
            }
    }

    /// Checks axis names, counts, metric names and time-axis placement.
    pub fn validate(&self) -> CliResult<()> {
        if self.axes.len() > 2 {
            return Err(CliError::config("at most two axes"));
        }
        for (k, a) in self.axes.iter().enumerate() {
            a.validate()?;
            if !self.axis_known(&a.name) {
                return Err(CliError::config(format!(
                    "axis `{}` does not resolve to a parameter of {}",
                    a.name,
                    self.protocol.kind()
                )));
            }
            if self.axes[..k].iter().any(|b| b.name == a.name) {
                return Err(CliError::config(format!("axis `{}` given twice", a.name)));
            }
            if a.name == TIME_AXIS && k + 1 != self.axes.len() {
                return Err(CliError::config("the `t` axis must be the last axis"));
            }
            if a.name == TIME_AXIS && a.min < 0.0 {
                return Err(CliError::config("the `t` axis must be non-negative"));
            }
        }
        let has_t = self.axes.last().is_some_and(|a| a.name == TIME_AXIS);
        if self.protocol.needs_time_axis() && !has_t {
            return Err(CliError::config(format!("{} needs a `t` axis", self.protocol.kind())));
        }
        if let Some(u) = &self.units {
            if !(u.g_ghz.is_finite() && u.g_ghz > 0.0) {
                return Err(CliError::config("g_GHz must be positive"));
            }
        }
        let known = self.protocol.metric_names(self.units.is_some());
        for m in &self.metrics {
            if !known.contains(&m.as_str()) {
                return Err(CliError::config(format!(
                    "unknown metric `{m}` for {} (known: {})",
                    self.protocol.kind(),
                    known.join(", ")
                )));
            }
        }
        Ok(())
    }

    pub fn metric_columns(&self) -> Vec<String> {
        if self.metrics.is_empty() {
            self.protocol
                .metric_names(self.units.is_some())
                .into_iter()
                .map(String::from)
                .collect()
        } else {
            self.metrics.clone()
        }
    }

    pub fn columns(&self) -> Vec<String> {
        let mut cols: Vec<String> = self.axes.iter().map(|a| a.name.clone()).collect();
        cols.extend(self.metric_columns());
        cols.push(STATUS_COLUMN.into());
        cols
    }

    /// Number of rows the sweep produces.
    pub fn row_count(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    /// SHA-256 of the canonical JSON form, shortened; the default run id.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("spec serializes");
        let hash = Sha256::digest(&json);
        hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub run_id: String,
    /// Figure panel label, when the sweep is one panel of a figure.
    #[serde(default)]
    pub panel: Option<String>,
    pub spec: SweepSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub provenance: Provenance,
    pub table: Table,
}

impl SweepResult {
    pub fn into_document(self) -> Document {
        Document {
            provenance: vec![self.provenance],
            table: self.table,
        }
    }

    /// Rows whose status is not `ok`.
    pub fn error_rows(&self) -> usize {
        let k = self.table.columns.len() - 1;
        self.table
            .rows
            .iter()
            .filter(|r| r[k].as_str() != Some(STATUS_OK))
            .count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; 0 uses the rayon default.
    pub workers: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { workers: 0 }
    }
}

/// Evaluates the protocol at every grid point.
///
/// Points that fail numerically become rows with null metrics and the
/// error's reason code in `status`; only an invalid spec aborts.
pub fn run_sweep(spec: &SweepSpec, opts: &RunOptions, run_id: Option<&str>) -> CliResult<SweepResult> {
    spec.validate()?;
    let (outer, time): (&[Axis], Option<&Axis>) = match spec.axes.last() {
        Some(a) if a.name == TIME_AXIS => (&spec.axes[..spec.axes.len() - 1], Some(a)),
        _ => (&spec.axes[..], None),
    };
    let outer_values: Vec<Vec<f64>> = outer.iter().map(Axis::values).collect();
    let mut points: Vec<Vec<f64>> = vec![Vec::new()];
    for vals in &outer_values {
        points = points
            .into_iter()
            .flat_map(|p| {
                vals.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    let times = time.map(Axis::values);
    let metric_cols = spec.metric_columns();

    let eval = |point: &Vec<f64>| -> Vec<Vec<Cell>> {
        let rows = evaluate_point(spec, outer, point, times.as_deref());
        let n_times = times.as_ref().map_or(1, Vec::len);
        let mut out = Vec::with_capacity(n_times);
        match rows {
            Ok(rows) => {
                for (k, metrics) in rows.into_iter().enumerate() {
                    let mut row: Vec<Cell> = point.iter().map(|&v| Cell::num(v)).collect();
                    if let Some(ts) = &times {
                        row.push(Cell::num(ts[k]));
                    }
                    for name in &metric_cols {
                        let v = metrics
                            .iter()
                            .find(|(n, _)| n == name)
                            .map_or(Cell::Null, |(_, c)| c.clone());
                        row.push(v);
                    }
                    row.push(Cell::Text(STATUS_OK.into()));
                    out.push(row);
                }
            }
            Err(code) => {
                for k in 0..n_times {
                    let mut row: Vec<Cell> = point.iter().map(|&v| Cell::num(v)).collect();
                    if let Some(ts) = &times {
                        row.push(Cell::num(ts[k]));
                    }
                    row.extend(metric_cols.iter().map(|_| Cell::Null));
                    row.push(Cell::Text(code.clone()));
                    out.push(row);
                }
            }
        }
        out
    };

    let chunks: Vec<Vec<Vec<Cell>>> = if opts.workers == 1 {
        points.iter().map(eval).collect()
    } else {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if opts.workers > 0 {
            builder = builder.num_threads(opts.workers);
        }
        let pool = builder
            .build()
            .map_err(|e| CliError::config(format!("worker pool: {e}")))?;
        pool.install(|| points.par_iter().map(eval).collect())
    };
    let rows: Vec<Vec<Cell>> = chunks.into_iter().flatten().collect();
    debug_assert_eq!(rows.len(), spec.row_count());

    Ok(SweepResult {
        provenance: Provenance {
            tool: TOOL.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            run_id: run_id.map_or_else(|| spec.digest(), String::from),
            panel: None,
            spec: spec.clone(),
        },
        table: Table {
            columns: spec.columns(),
            rows,
        },
    })
}

type Metrics = Vec<(String, Cell)>;

/// Parameters and protocol arguments at one outer grid point, in units of `g`.
struct Point {
    params: SystemParams,
    protocol: ProtocolSpec,
}

fn apply_axes(spec: &SweepSpec, axes: &[Axis], values: &[f64]) -> Point {
    let mut p = spec.base;
    let mut protocol = spec.protocol.clone();
    let units = spec.units;
    for (axis, &v) in axes.iter().zip(values) {
        let rate = units.map_or(v, |u| u.rate(v));
        match axis.name.as_str() {
            "g" => (p.g1, p.g2) = (rate, rate),
            "g1" => p.g1 = rate,
            "g2" => p.g2 = rate,
            "omega" => (p.omega1, p.omega2) = (rate, rate),
            "omega1" => p.omega1 = rate,
            "omega2" => p.omega2 = rate,
            "delta" => p.delta = rate,
            "kappa" => p.kappa = rate,
            "gamma" => p.gamma = rate,
            "phi1" => p.phi1 = v,
            "phi2" => p.phi2 = v,
            name => match (&mut protocol, name) {
                (ProtocolSpec::Cpg { delta_t_frac, .. }, "delta_t_frac") => *delta_t_frac = v,
                (ProtocolSpec::Concurrence { r, .. }, "r") => *r = v,
                (ProtocolSpec::Concurrence { lambda, .. }, "lambda") => *lambda = rate,
                (ProtocolSpec::Qst { alpha, .. }, "alpha") => *alpha = v,
                (ProtocolSpec::Qst { beta, .. }, "beta") => *beta = v,
                _ => unreachable!("axis names are validated"),
            },
        }
    }
    Point { params: p, protocol }
}

fn evaluate_point(
    spec: &SweepSpec,
    axes: &[Axis],
    values: &[f64],
    times: Option<&[f64]>,
) -> Result<Vec<Metrics>, String> {
    let Point { params, protocol } = apply_axes(spec, axes, values);
    let code = |e: nvzeno_core::Error| String::from(e.code());
    let times_g: Option<Vec<f64>> =
        times.map(|ts| ts.iter().map(|&t| spec.units.map_or(t, |u| u.from_ns(t))).collect());
    let num = |name: &str, x: f64| (String::from(name), Cell::num(x));
    match protocol {
        ProtocolSpec::Compare => {
            let c = compare_hamiltonians_at(&params, times_g.as_deref().unwrap_or(&[])).map_err(code)?;
            Ok((0..c.times.len())
                .map(|k| {
                    let dev = (c.full_p1[k] - c.effective_p1[k])
                        .abs()
                        .max((c.full_p2[k] - c.effective_p2[k]).abs());
                    vec![
                        num("full_p1", c.full_p1[k]),
                        num("full_p2", c.full_p2[k]),
                        num("effective_p1", c.effective_p1[k]),
                        num("effective_p2", c.effective_p2[k]),
                        num("deviation", dev),
                    ]
                })
                .collect())
        }
        ProtocolSpec::Qst {
            alpha,
            beta,
            model,
            window,
        } => {
            let norm = alpha.hypot(beta);
            if !(norm > 0.0 && norm.is_finite()) {
                return Err("invalid_parameter".into());
            }
            let qs = QstSpec::new(params, model)
                .with_weights(C64::new(alpha / norm, 0.0), C64::new(beta / norm, 0.0))
                .with_window(window);
            let r = qst_run(&qs).map_err(code)?;
            let mut m = vec![
                num("fidelity", r.fidelity),
                num("optimal_fidelity", r.optimal.map_or(f64::NAN, |o| o.fidelity)),
                num("optimal_time", r.optimal.map_or(f64::NAN, |o| o.time)),
                num("duration", r.duration),
                num("gate_time", 2.0 * r.duration),
            ];
            if let Some(u) = spec.units {
                m.push(num("duration_ns", u.to_ns(r.duration)));
                m.push(num("optimal_time_ns", r.optimal.map_or(f64::NAN, |o| u.to_ns(o.time))));
                m.push(num("gate_time_ns", u.to_ns(2.0 * r.duration)));
            }
            Ok(vec![m])
        }
        ProtocolSpec::Cpg {
            model,
            delta_t_frac,
            compensate,
            truth_table,
        } => {
            let cs = CpgSpec::new(params, model)
                .with_timing_error(delta_t_frac)
                .with_compensation(compensate)
                .with_open_truth_table(truth_table);
            let r = cpg_run(&cs).map_err(code)?;
            Ok(vec![gate_metrics(&r, spec.units)])
        }
        ProtocolSpec::Concurrence { r, lambda, model } => {
            let ep = EntanglementParams::from_ratio(r, lambda).map_err(code)?;
            let s = entanglement_run(&ep, times_g.as_deref().unwrap_or(&[]), model, &params).map_err(code)?;
            Ok((0..s.times.len())
                .map(|k| {
                    vec![
                        num("wootters", s.wootters[k]),
                        num("closed_form_concurrence", s.closed_form[k]),
                        num("trace_deficit", s.trace_deficit[k]),
                    ]
                })
                .collect())
        }
    }
}

fn gate_metrics(r: &GateReport, units: Option<PhysicalUnits>) -> Metrics {
    let num = |name: &str, x: f64| (String::from(name), Cell::num(x));
    let mut m = vec![
        num("fidelity", r.fidelity),
        num("duration", r.duration),
        num("fi_phase", r.fi_phase.unwrap_or(f64::NAN)),
        num("compensation", r.compensation),
    ];
    let labels = [
        ("fg_re", "fg_im"),
        ("fi_re", "fi_im"),
        ("ig_re", "ig_im"),
        ("ii_re", "ii_im"),
    ];
    for (k, (re, im)) in labels.into_iter().enumerate() {
        let z = r.truth_table.map(|t| t[k]);
        m.push(num(re, z.map_or(f64::NAN, |z| z.re)));
        m.push(num(im, z.map_or(f64::NAN, |z| z.im)));
    }
    if let Some(u) = units {
        m.push(num("duration_ns", u.to_ns(r.duration)));
    }
    m
}

/// Canonical sweeps behind one figure, one per panel.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureRecipe {
    pub id: &'static str,
    pub caption: &'static str,
    pub panels: Vec<(String, SweepSpec)>,
}

pub const FIGURE_IDS: [&str; 7] = ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"];

/// Operating point `Omega = 0.05 g`, `Delta = 0.5 g`.
fn operating_point() -> SystemParams {
    SystemParams::symmetric(1.0, 0.05, 0.5)
}

pub fn figure_recipe(id: &str) -> CliResult<FigureRecipe> {
    let single = |spec: SweepSpec| vec![(String::from("main"), spec)];
    let recipe = match id {
        "fig2" => {
            let panel = |omega: f64, delta: f64| {
                let p = SystemParams::symmetric(1.0, omega, delta);
                let t_end = 2.0 * PI * delta / (omega * omega);
                SweepSpec::new(p, vec![Axis::linear(TIME_AXIS, 0.0, t_end, 401)], ProtocolSpec::Compare)
            };
            FigureRecipe {
                id: "fig2",
                caption: "populations of |gf0> and |fg0> under the full and effective Hamiltonians",
                panels: vec![("a".into(), panel(0.05, 0.5)), ("b".into(), panel(0.01, 0.2))],
            }
        }
        "fig3" => FigureRecipe {
            id: "fig3",
            caption: "optimal closed-system transfer fidelity over detuning and drive",
            panels: single(SweepSpec::new(
                operating_point(),
                vec![
                    Axis::linear("delta", 0.4, 0.6, 21),
                    Axis::linear("omega", 0.04, 0.06, 21),
                ],
                ProtocolSpec::qst(ModelChoice::FullClosed),
            )),
        },
        "fig4" => FigureRecipe {
            id: "fig4",
            caption: "open-system transfer fidelity over spontaneous emission and cavity decay",
            panels: single(SweepSpec::new(
                operating_point(),
                vec![
                    Axis::linear("gamma", 0.0, 0.01, 11),
                    Axis::linear("kappa", 0.0, 0.2, 11),
                ],
                ProtocolSpec::Qst {
                    alpha: std::f64::consts::FRAC_1_SQRT_2,
                    beta: std::f64::consts::FRAC_1_SQRT_2,
                    model: ModelChoice::FullOpen,
                    window: None,
                },
            )),
        },
        "fig5" => FigureRecipe {
            id: "fig5",
            caption: "closed-system phase-gate fidelity against relative timing error",
            panels: single(SweepSpec::new(
                operating_point(),
                vec![Axis::linear("delta_t_frac", -0.1, 0.1, 41)],
                ProtocolSpec::cpg(ModelChoice::FullClosed),
            )),
        },
        "fig6" => FigureRecipe {
            id: "fig6",
            caption: "open-system phase-gate fidelity over spontaneous emission and cavity decay",
            panels: single(SweepSpec::new(
                operating_point(),
                vec![Axis::linear("gamma", 0.0, 0.01, 6), Axis::linear("kappa", 0.0, 0.2, 6)],
                ProtocolSpec::Cpg {
                    model: ModelChoice::FullOpen,
                    delta_t_frac: 0.0,
                    compensate: false,
                    truth_table: false,
                },
            )),
        },
        "fig7" => {
            let lambda = 0.05 * 0.05 / 0.5;
            FigureRecipe {
                id: "fig7",
                caption: "concurrence against weight ratio r and interaction time",
                panels: single(SweepSpec::new(
                    operating_point(),
                    vec![
                        Axis::linear("r", 0.05, 3.0, 25),
                        Axis::linear(TIME_AXIS, 0.0, 4.0 * PI / lambda, 400),
                    ],
                    ProtocolSpec::Concurrence {
                        r: 1.0,
                        lambda,
                        model: ModelChoice::Effective,
                    },
                )),
            }
        }
        "fig8" => FigureRecipe {
            id: "fig8",
            caption: "concurrence against flip-flop rate and interaction time at r = 1/3",
            panels: single(SweepSpec::new(
                operating_point(),
                vec![
                    Axis::linear("lambda", 0.001, 0.05, 50),
                    Axis::linear(TIME_AXIS, 0.0, 1500.0, 300),
                ],
                ProtocolSpec::Concurrence {
                    r: 1.0 / 3.0,
                    lambda: 0.005,
                    model: ModelChoice::Effective,
                },
            )),
        },
        other => {
            return Err(CliError::config(format!(
                "unknown figure `{other}` (known: {})",
                FIGURE_IDS.join(", ")
            )))
        }
    };
    Ok(recipe)
}

/// Runs every panel; multi-panel figures get a leading `panel` column.
pub fn run_figure(recipe: &FigureRecipe, opts: &RunOptions, run_id: Option<&str>) -> CliResult<Document> {
    let mut results = Vec::new();
    for (label, spec) in &recipe.panels {
        let mut r = run_sweep(spec, opts, run_id)?;
        r.provenance.panel = Some(label.clone());
        results.push(r);
    }
    Ok(assemble(results))
}

/// Re-runs each sweep recorded in a document's provenance.
pub fn rerun_from_provenance(doc: &Document, opts: &RunOptions) -> CliResult<Document> {
    let mut results = Vec::new();
    for prov in &doc.provenance {
        let mut r = run_sweep(&prov.spec, opts, Some(&prov.run_id))?;
        r.provenance.panel = prov.panel.clone();
        results.push(r);
    }
    Ok(assemble(results))
}

fn assemble(results: Vec<SweepResult>) -> Document {
    let multi = results.len() > 1;
    let mut provenance = Vec::new();
    let mut table = Table::default();
    for r in results {
        if table.columns.is_empty() {
            table.columns = r.table.columns.clone();
            if multi {
                table.columns.insert(0, "panel".into());
            }
        }
        let label = r.provenance.panel.clone().unwrap_or_default();
        for mut row in r.table.rows {
            if multi {
                row.insert(0, Cell::Text(label.clone()));
            }
            table.rows.push(row);
        }
        provenance.push(r.provenance);
    }
    Document { provenance, table }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_values_hit_end_points() {
        let a = Axis::linear("delta", 0.4, 0.6, 21);
        let v = a.values();
        assert_eq!(v.len(), 21);
        assert_eq!(v[0], 0.4);
        assert_eq!(v[20], 0.6);
        let l = Axis {
            scale: Scale::Log,
            ..Axis::linear("lambda", 1e-3, 1e-1, 3)
        };
        let v = l.values();
        assert!((v[1] - 1e-2).abs() < 1e-15);
        assert_eq!(v[2], 1e-1);
    }

    #[test]
    fn rejects_bad_axes() {
        let base = operating_point();
        let qst = ProtocolSpec::qst(ModelChoice::Effective);
        let bad = |axes| SweepSpec::new(base, axes, qst.clone()).validate().is_err();
        assert!(bad(vec![Axis::linear("nonsense", 0.0, 1.0, 3)]));
        assert!(bad(vec![Axis::linear("delta", 0.0, 1.0, 1)]));
        assert!(bad(vec![Axis::linear("delta", 0.0, f64::INFINITY, 3)]));
        assert!(bad(vec![Axis::linear("t", 0.0, 1.0, 3)]));
        let cmp = SweepSpec::new(base, vec![Axis::linear("delta", 0.4, 0.6, 3)], ProtocolSpec::Compare);
        assert!(cmp.validate().is_err());
    }

    #[test]
    fn constant_protocol_on_degenerate_grid() {
        // the ancilla-free ground input is frozen, so every point gives fidelity 1
        let spec = SweepSpec::new(
            operating_point(),
            vec![Axis::linear("kappa", 0.0, 0.0, 2), Axis::linear("gamma", 0.0, 0.0, 2)],
            ProtocolSpec::Qst {
                alpha: 1.0,
                beta: 0.0,
                model: ModelChoice::FullClosed,
                window: None,
            },
        );
        let r = run_sweep(&spec, &RunOptions::default(), None).unwrap();
        let f = r.table.numbers("fidelity").unwrap();
        assert_eq!(f.len(), 4);
        assert!(f.iter().all(|x| *x == f[0]));
    }

    #[test]
    fn numerical_failures_become_error_rows() {
        let spec = SweepSpec::new(
            operating_point(),
            vec![Axis::linear("delta", 0.0, 0.5, 2)],
            ProtocolSpec::qst(ModelChoice::Effective),
        );
        let r = run_sweep(&spec, &RunOptions::default(), None).unwrap();
        let status = r.table.column(STATUS_COLUMN).unwrap();
        assert_eq!(status[0].as_str(), Some("zero_detuning"));
        assert_eq!(status[1].as_str(), Some(STATUS_OK));
        assert_eq!(r.error_rows(), 1);
        assert_eq!(r.table.numbers("fidelity").unwrap()[0], None);
    }

    #[test]
    fn time_axis_rows_are_row_major() {
        let spec = SweepSpec::new(
            operating_point(),
            vec![Axis::linear("r", 0.5, 1.0, 2), Axis::linear(TIME_AXIS, 0.0, 100.0, 3)],
            ProtocolSpec::Concurrence {
                r: 1.0,
                lambda: 0.005,
                model: ModelChoice::Effective,
            },
        );
        let r = run_sweep(&spec, &RunOptions::default(), None).unwrap();
        let rs: Vec<_> = r.table.numbers("r").unwrap().into_iter().flatten().collect();
        let ts: Vec<_> = r.table.numbers("t").unwrap().into_iter().flatten().collect();
        assert_eq!(rs, vec![0.5, 0.5, 0.5, 1.0, 1.0, 1.0]);
        assert_eq!(ts, vec![0.0, 50.0, 100.0, 0.0, 50.0, 100.0]);
    }

    #[test]
    fn every_recipe_validates() {
        for id in FIGURE_IDS {
            let recipe = figure_recipe(id).unwrap();
            for (_, spec) in &recipe.panels {
                spec.validate().unwrap();
            }
        }
        assert!(figure_recipe("fig9").is_err());
    }

    #[test]
    fn physical_units_convert_rates_and_times() {
        let u = PhysicalUnits { g_ghz: 1.0 };
        assert_eq!(u.rate(0.05), 0.05);
        let t = 0.5 * PI / (0.05 * 0.05);
        assert!((u.to_ns(t) - 100.0).abs() < 1e-9);
        assert!((u.from_ns(u.to_ns(t)) - t).abs() < 1e-9);
    }
}
