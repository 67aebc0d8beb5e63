//! `selcov` command-line driver.
//!
//! Exit codes: 0 on success, 1 when a computation fails, 2 when the input or
//! the command line is invalid.

use std::ffi::OsString;
use std::fs;
use std::io::{ErrorKind, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use selcov::bounds::{self, CovarianceSpec};
use selcov::sharpness::{build_sharpness_instance, certify_sharpness};
use selcov::simlab::{self, CoverageReport, ScreeningDesign, SimulationConfig, DEFAULT_SEED};
use selcov::{JointModel, SymmetricMatrix};

mod format;

pub use format::{markdown_table, significant};

/// Slack allowed when checking a declared alpha against the model.
const ALPHA_SLACK: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(
    name = "selcov",
    version,
    about = "Coverage bounds for confidence sets attached to data-selected targets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Leakage audit of a finite joint model of (selection, data).
    Audit(AuditArgs),
    /// Closed-form noncoverage bounds.
    #[command(subcommand)]
    Bound(BoundCommand),
    /// Noise scale that keeps the Gaussian leakage term at a target value.
    Calibrate(CalibrateArgs),
    /// Build and certify the model on which the TV bound is attained.
    Sharpness(SharpnessArgs),
    /// Monte Carlo coverage of the selected coordinate mean.
    Simulate(SimulateArgs),
    /// Closed-form same-sample coverage Φ(z_{α/2})^p.
    ExactCoverage(ExactCoverageArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum JsonOnly {
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Human-readable (markdown tables, 6 significant digits).
    #[value(alias = "markdown", alias = "md")]
    Text,
    Json,
}

#[derive(Debug, Args)]
struct AuditArgs {
    /// Joint model JSON file, or `-` for standard input. Output of the
    /// `sharpness` subcommand is accepted as well.
    #[arg(long)]
    model: PathBuf,
    /// Declared fixed-target level; must be at least the model's own.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    format: JsonOnly,
}

#[derive(Debug, Subcommand)]
enum BoundCommand {
    /// Gaussian noisy screening, full covariance or trace cap.
    Gaussian(GaussianArgs),
    /// Screening through a finite message.
    FiniteMessage(FiniteMessageArgs),
    /// α + r_m + sqrt(η_m / 2) for a sequence of problems.
    Transfer(TransferArgs),
}

#[derive(Debug, Args)]
struct GaussianArgs {
    #[arg(long)]
    alpha: f64,
    /// Standard deviation of the screening noise.
    #[arg(long)]
    tau: f64,
    /// Covariance JSON file: {"dim": q, "entries": [[...]]}.
    #[arg(long, conflicts_with_all = ["q", "trace"], required_unless_present_all = ["q", "trace"])]
    sigma: Option<PathBuf>,
    /// Dimension of the screening statistic.
    #[arg(long, requires = "trace")]
    q: Option<usize>,
    /// Upper bound on the trace of its covariance.
    #[arg(long, requires = "q")]
    trace: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    format: JsonOnly,
}

#[derive(Debug, Args)]
struct FiniteMessageArgs {
    #[arg(long)]
    alpha: f64,
    /// Entropy of the message in nats.
    #[arg(
        long,
        conflicts_with = "alphabet",
        required_unless_present = "alphabet"
    )]
    entropy: Option<f64>,
    /// Size of the message alphabet.
    #[arg(long)]
    alphabet: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    format: JsonOnly,
}

#[derive(Debug, Args)]
struct TransferArgs {
    #[arg(long)]
    alpha: f64,
    /// Excess fixed-target error r_m.
    #[arg(long)]
    r: f64,
    /// Mutual-information cap η_m.
    #[arg(long)]
    eta: f64,
    #[arg(long, value_enum, default_value = "json")]
    format: JsonOnly,
}

#[derive(Debug, Args)]
struct CalibrateArgs {
    /// Target leakage term ε.
    #[arg(long)]
    epsilon: f64,
    #[arg(long, conflicts_with_all = ["q", "trace"], required_unless_present_all = ["q", "trace"])]
    sigma: Option<PathBuf>,
    #[arg(long, requires = "trace")]
    q: Option<usize>,
    #[arg(long, requires = "q")]
    trace: Option<f64>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Debug, Args)]
struct SharpnessArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    delta: f64,
    #[arg(long, value_enum, default_value = "json")]
    format: JsonOnly,
}

#[derive(Debug, Args)]
#[command(args_conflicts_with_subcommands = true)]
struct SimulateArgs {
    #[command(subcommand)]
    table: Option<SimulateCommand>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Subcommand)]
enum SimulateCommand {
    /// All six reference designs at n = 400, p = 50, α = 0.05.
    Table1(Table1Args),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DesignKind {
    Fixed,
    Same,
    Split,
    Noisy,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, value_enum)]
    design: Option<DesignKind>,
    /// Noise scale for the noisy design.
    #[arg(long)]
    tau: Option<f64>,
    /// Coordinate (1-based) for the fixed design.
    #[arg(long, default_value_t = 1)]
    j: usize,
    #[arg(long, default_value_t = 400)]
    n: usize,
    #[arg(long, default_value_t = 50)]
    p: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 10_000)]
    reps: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads; 0 uses all cores. Does not affect results.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Debug, Args)]
struct Table1Args {
    #[arg(long, default_value_t = 10_000)]
    reps: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Debug, Args)]
struct ExactCoverageArgs {
    #[arg(long)]
    p: usize,
    #[arg(long)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Compute(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Compute(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Compute(m) => m,
        }
    }
}

impl From<selcov::Error> for CliError {
    fn from(e: selcov::Error) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Compute(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parses `args` (program name first), runs the command and returns the exit
/// code. Normal output goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            let code = e.exit_code() as u8;
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Audit(args) => audit(&args, out),
        Command::Bound(kind) => bound(kind, out),
        Command::Calibrate(args) => calibrate(&args, out),
        Command::Sharpness(args) => sharpness(&args, out),
        Command::Simulate(args) => simulate(args, out),
        Command::ExactCoverage(args) => exact_coverage(&args, out),
    }
}

fn write_out(out: &mut dyn Write, text: &str) -> CliResult<()> {
    match out.write_all(text.as_bytes()) {
        // A closed pipe downstream (`| head`) is not our failure.
        Err(e) if e.kind() == ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(CliError::Compute(format!("writing output: {e}"))),
        Ok(()) => Ok(()),
    }
}

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Compute(format!("serialising output: {e}")))?;
    text.push('\n');
    write_out(out, &text)
}

fn emit_line(out: &mut dyn Write, line: &str) -> CliResult<()> {
    write_out(out, &format!("{line}\n"))
}

fn read_input(path: &Path) -> CliResult<String> {
    if path == Path::new("-") {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| CliError::Input(format!("reading standard input: {e}")))?;
        return Ok(text);
    }
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Parses a JSON document, reporting syntax errors with line and column.
fn parse_json(path: &Path, text: &str) -> CliResult<Value> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// A bare joint model, or any object carrying one under `"model"`.
pub fn parse_model(text: &str) -> Result<JointModel, String> {
    let value: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    model_from_value(value)
}

fn model_from_value(mut value: Value) -> Result<JointModel, String> {
    if let Some(inner) = value.get_mut("model") {
        value = inner.take();
    }
    serde_json::from_value(value).map_err(|e| e.to_string())
}

fn load_model(path: &Path) -> CliResult<JointModel> {
    let text = read_input(path)?;
    let value = parse_json(path, &text)?;
    model_from_value(value).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_sigma(path: &Path) -> CliResult<SymmetricMatrix> {
    let text = read_input(path)?;
    let value = parse_json(path, &text)?;
    serde_json::from_value(value).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

#[derive(Debug, Serialize)]
struct AuditReport {
    fixed_target_alpha: f64,
    alpha: f64,
    tv_leakage: f64,
    mutual_information: f64,
    pinsker_bound: f64,
    selected_noncoverage: f64,
    tv_bound: selcov::BoundReport,
    mi_bound: selcov::BoundReport,
    bound_holds: bool,
}

fn audit(args: &AuditArgs, out: &mut dyn Write) -> CliResult<()> {
    let model = load_model(&args.model)?;
    let fixed = model.fixed_target_alpha();
    let alpha = match args.alpha {
        None => fixed,
        Some(a) if !(0.0..=1.0).contains(&a) => {
            return Err(CliError::Input(format!("--alpha {a} is not in [0, 1]")));
        }
        Some(a) if a < fixed - ALPHA_SLACK => {
            return Err(CliError::Input(format!(
                "--alpha {a} is below the model's fixed-target noncoverage {fixed}; \
                 the fixed-target premise fails"
            )));
        }
        Some(a) => a,
    };
    let bounds = model.theorem1_bound_at(alpha);
    let selected = model.selected_noncoverage();
    let report = AuditReport {
        fixed_target_alpha: fixed,
        alpha,
        tv_leakage: model.tv_leakage(),
        mutual_information: model.mutual_information(),
        pinsker_bound: model.pinsker_bound(),
        selected_noncoverage: selected,
        bound_holds: selected <= bounds.tv.value + ALPHA_SLACK
            && selected <= bounds.pinsker.value + ALPHA_SLACK,
        tv_bound: bounds.tv,
        mi_bound: bounds.pinsker,
    };
    emit_json(out, &report)
}

fn covariance(
    sigma: &Option<PathBuf>,
    q: Option<usize>,
    trace: Option<f64>,
) -> CliResult<CovarianceSpec> {
    match (sigma, q, trace) {
        (Some(path), _, _) => Ok(CovarianceSpec::full(load_sigma(path)?)?),
        (None, Some(q), Some(v)) => Ok(CovarianceSpec::trace_bound(q, v)?),
        _ => Err(CliError::Input(
            "give either --sigma FILE or both --q and --trace".into(),
        )),
    }
}

fn bound(kind: BoundCommand, out: &mut dyn Write) -> CliResult<()> {
    let report = match kind {
        BoundCommand::Gaussian(a) => {
            let spec = covariance(&a.sigma, a.q, a.trace)?;
            bounds::gaussian_noncoverage_bound(a.alpha, &spec, a.tau)?
        }
        BoundCommand::FiniteMessage(a) => match (a.entropy, a.alphabet) {
            (Some(h), None) => bounds::finite_message_bound(a.alpha, h)?,
            (None, Some(k)) => bounds::finite_message_alphabet_bound(a.alpha, k)?,
            _ => {
                return Err(CliError::Input(
                    "give exactly one of --entropy and --alphabet".into(),
                ))
            }
        },
        BoundCommand::Transfer(a) => bounds::asymptotic_transfer(a.alpha, a.r, a.eta)?,
    };
    emit_json(out, &report)
}

fn calibrate(args: &CalibrateArgs, out: &mut dyn Write) -> CliResult<()> {
    let spec = covariance(&args.sigma, args.q, args.trace)?;
    let (tau, method) = match &spec {
        CovarianceSpec::Full { sigma } => (
            bounds::calibrate_tau_full(sigma, args.epsilon)?,
            "bisection",
        ),
        CovarianceSpec::TraceBound { q, v } => {
            (bounds::calibrate_tau(*q, *v, args.epsilon)?, "closed_form")
        }
    };
    match args.format {
        Format::Text => emit_line(out, &significant(tau, 6)),
        Format::Json => {
            let achieved = bounds::gaussian_leakage(&spec, tau)?;
            let mut doc = json!({
                "tau": tau,
                "epsilon": args.epsilon,
                "leakage_at_tau": achieved,
                "method": method,
                "q": spec.dim(),
            });
            if let CovarianceSpec::TraceBound { v, .. } = spec {
                doc["trace"] = json!(v);
            }
            emit_json(out, &doc)
        }
    }
}

fn sharpness(args: &SharpnessArgs, out: &mut dyn Write) -> CliResult<()> {
    let instance = build_sharpness_instance(args.alpha, args.delta)?;
    let certificate = certify_sharpness(&instance);
    emit_json(
        out,
        &json!({
            "alpha": instance.alpha,
            "delta": instance.delta,
            "model": instance.model,
            "certificate": certificate,
        }),
    )
}

fn simulate(args: SimulateArgs, out: &mut dyn Write) -> CliResult<()> {
    if let Some(SimulateCommand::Table1(t)) = args.table {
        let rows = simlab::with_thread_count(t.threads, || simlab::table1(t.seed, t.reps))??;
        return emit_reports(out, &rows, t.format);
    }
    let run = args.run;
    let design = match (run.design, run.tau) {
        (None, _) => {
            return Err(CliError::Input(
                "simulate needs --design {fixed|same|split|noisy} or the table1 subcommand".into(),
            ))
        }
        (Some(DesignKind::Noisy), Some(tau)) => ScreeningDesign::NoisyScreening { tau },
        (Some(DesignKind::Noisy), None) => {
            return Err(CliError::Input("--design noisy needs --tau".into()))
        }
        (Some(_), Some(_)) => {
            return Err(CliError::Input(
                "--tau only applies to --design noisy".into(),
            ))
        }
        (Some(DesignKind::Fixed), None) => ScreeningDesign::FixedCoordinate { j: run.j },
        (Some(DesignKind::Same), None) => ScreeningDesign::SameSample,
        (Some(DesignKind::Split), None) => ScreeningDesign::SplitSample,
    };
    let config = SimulationConfig {
        n: run.n,
        p: run.p,
        alpha: run.alpha,
        reps: run.reps,
        seed: run.seed,
        design,
    };
    let report = simlab::with_thread_count(run.threads, || simlab::run_simulation(&config))??;
    emit_reports(out, &[report], run.format)
}

fn emit_reports(out: &mut dyn Write, rows: &[CoverageReport], fmt: Format) -> CliResult<()> {
    match fmt {
        Format::Json => emit_json(out, &rows),
        Format::Text => write_out(out, &markdown_table(rows)),
    }
}

fn exact_coverage(args: &ExactCoverageArgs, out: &mut dyn Write) -> CliResult<()> {
    let value = simlab::exact_same_sample_coverage(args.p, args.alpha)?;
    match args.format {
        Format::Text => emit_line(out, &significant(value, 6)),
        Format::Json => emit_json(
            out,
            &json!({ "p": args.p, "alpha": args.alpha, "exact_coverage": value }),
        ),
    }
}
