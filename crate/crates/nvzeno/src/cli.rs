//! Command-line front end.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nvzeno_core::protocols::ModelChoice;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{emit, Document, Format};
use crate::sweep::{figure_recipe, run_figure, run_sweep, PhysicalUnits, ProtocolSpec, RunOptions, SweepSpec};
use crate::validate::run_checks;

#[derive(Debug, Parser)]
#[command(
    name = "nvzeno",
    version,
    about = "Two NV centers, one detuned cavity: transfer, phase gate and entanglement tables"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// State transfer from NV 1 to NV 2.
    Qst(CommonArgs),
    /// Two-pulse conditional phase gate.
    Cpg(CommonArgs),
    /// Concurrence of the two centers over time.
    Concurrence(CommonArgs),
    /// Full against effective populations over time.
    Compare(CommonArgs),
    /// Parameter sweep from a config or a built-in figure recipe.
    Sweep {
        /// Built-in recipe: fig2 ... fig8.
        #[arg(long)]
        figure: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the built-in invariant checks.
    Validate(CommonArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelArg {
    Effective,
    Full,
    Open,
}

impl From<ModelArg> for ModelChoice {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Effective => ModelChoice::Effective,
            ModelArg::Full => ModelChoice::FullClosed,
            ModelArg::Open => ModelChoice::FullOpen,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Refuse any code path that draws random numbers.
    #[arg(long)]
    pub seedless: bool,
    /// Significant digits in CSV output (6-17).
    #[arg(long)]
    pub precision: Option<usize>,
    /// Run id recorded in the provenance (default: digest of the spec).
    #[arg(long)]
    pub run_id: Option<String>,
}

impl CommonArgs {
    fn load(&self) -> CliResult<RunConfig> {
        match &self.config {
            Some(p) => RunConfig::load(p),
            None => Ok(RunConfig::default()),
        }
    }

    fn run_options(&self, cfg: &RunConfig) -> RunOptions {
        RunOptions {
            workers: self.workers.or(cfg.workers).unwrap_or(0),
        }
    }

    fn run_id<'a>(&'a self, cfg: &'a RunConfig) -> Option<&'a str> {
        self.run_id.as_deref().or(cfg.run_id.as_deref())
    }
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nvzeno: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Qst(a) => protocol_command("qst", a),
        Command::Cpg(a) => protocol_command("cpg", a),
        Command::Concurrence(a) => protocol_command("concurrence", a),
        Command::Compare(a) => protocol_command("compare", a),
        Command::Sweep { figure, common } => sweep_command(figure.as_deref(), common),
        Command::Validate(a) => validate_command(a),
    }
}

fn protocol_command(kind: &str, args: &CommonArgs) -> CliResult<()> {
    let cfg = args.load()?;
    let opts = cfg.output_options(args.format.map(Into::into), args.precision)?;
    let spec = cfg.sweep_spec(Some(kind), args.model.map(Into::into))?;
    // every computation here is deterministic; the flag has nothing to refuse
    let _ = args.seedless;
    let result = run_sweep(&spec, &args.run_options(&cfg), args.run_id(&cfg))?;
    for note in notes(&spec) {
        eprintln!("note: {note}");
    }
    let doc = result.into_document();
    report_errors(&doc);
    emit(&doc, &opts, args.out.as_deref())
}

fn sweep_command(figure: Option<&str>, args: &CommonArgs) -> CliResult<()> {
    let cfg = args.load()?;
    let opts = cfg.output_options(args.format.map(Into::into), args.precision)?;
    let run_opts = args.run_options(&cfg);
    let doc = match figure {
        Some(id) => {
            if args.config.is_some() {
                return Err(CliError::config("--figure and --config are exclusive"));
            }
            if args.model.is_some() {
                return Err(CliError::config("figure recipes fix their own model"));
            }
            run_figure(&figure_recipe(id)?, &run_opts, args.run_id(&cfg))?
        }
        None => {
            if args.config.is_none() {
                return Err(CliError::config("sweep needs --config or --figure"));
            }
            let spec = cfg.sweep_spec(None, args.model.map(Into::into))?;
            if spec.axes.is_empty() {
                return Err(CliError::config("a sweep needs at least one axis"));
            }
            run_sweep(&spec, &run_opts, args.run_id(&cfg))?.into_document()
        }
    };
    report_errors(&doc);
    emit(&doc, &opts, args.out.as_deref())
}

fn validate_command(args: &CommonArgs) -> CliResult<()> {
    let cfg = args.load()?;
    let params = cfg.system_params()?;
    let model = cfg.model(args.model.map(Into::into), ModelChoice::Effective)?;
    let checks = run_checks(&params, model);
    let mut out = std::io::stdout().lock();
    for c in &checks {
        writeln!(out, "{}", c.line())?;
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(CliError::ValidationFailed(failed));
    }
    Ok(())
}

fn report_errors(doc: &Document) {
    let Some(k) = doc.table.column_index(crate::sweep::STATUS_COLUMN) else {
        return;
    };
    let bad = doc
        .table
        .rows
        .iter()
        .filter(|r| r[k].as_str() != Some(crate::sweep::STATUS_OK))
        .count();
    if bad > 0 {
        eprintln!(
            "note: {bad} of {} rows failed; see the status column",
            doc.table.rows.len()
        );
    }
}

/// Diagnostics printed alongside a protocol run.
pub fn notes(spec: &SweepSpec) -> Vec<String> {
    let mut out = Vec::new();
    if let (ProtocolSpec::Qst { .. }, Some(units)) = (&spec.protocol, spec.units) {
        if let Some(n) = timing_note(&spec.base, units) {
            out.push(n);
        }
    }
    if let ProtocolSpec::Cpg {
        model: ModelChoice::FullClosed | ModelChoice::FullOpen,
        ..
    } = spec.protocol
    {
        out.push(
            "under the full Hamiltonian |f,i> is only approximately frozen; fi_phase and the fi amplitude \
             report its residual evolution, and the fidelity is taken on the uniform logical input"
                .into(),
        );
    }
    out
}

/// Transfer time next to the two-pulse gate time, in nanoseconds.
pub fn timing_note(params: &nvzeno_core::hamiltonians::SystemParams, units: PhysicalUnits) -> Option<String> {
    let t = params.transfer_time().ok()?;
    Some(format!(
        "transfer time t' = pi|Delta|/Omega^2 = {:.1} ns; two-pulse gate time T = 2t' = {:.1} ns. \
         An operation time near {:.0} ns describes the phase gate, not the state transfer.",
        units.to_ns(t),
        units.to_ns(2.0 * t),
        units.to_ns(2.0 * t),
    ))
}
