//! Command-line driver behind the `bellsim` binary.
//!
//! Exit codes: 0 success, 1 expectation mismatch, 2 argument error, 3 input
//! file error, 4 internal invariant failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::analysis::{bell_report, generate_sequence, mismatch_rate, quantum_mismatch, AnalysisError, BellReport, Model};
use crate::lhv::{builtin_strategy, exact_mismatch, monte_carlo_mismatch, LocalStrategy, BUILTIN_STRATEGIES};
use crate::many_worlds::{
    communicate, distinguishable_records, initial_state, local_measure, locality_audit, AuditReport, BranchState,
    BranchTrace, Event,
};
use crate::orthodox::MeasurementOrder;
use crate::polarization::{
    expand_in_basis, joint_distribution, project, rotate_basis, twin_state, Angle, Outcome, Photon,
};
use crate::rng::derive_seed;

/// Environment variable consulted when `--workers` is not given.
pub const WORKERS_ENV: &str = "BELLSIM_WORKERS";

/// Text tables wrap after this many columns.
pub const TABLE_WIDTH: usize = 32;

pub const EXIT_OK: i32 = 0;
pub const EXIT_EXPECTATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "bellsim", version, about = "Two-photon Bell experiment under collapse, hidden-variable and many-worlds models")]
pub struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write output to this file instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (falls back to BELLSIM_WORKERS, then 1); never changes results
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..=1024))]
    pub workers: Option<u32>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Twin-state algebra: rotation symmetry, joint distribution and the collapsed state
    TwinDemo(TwinDemoArgs),
    /// Paired T/A outcome sequences with mismatches marked
    SequenceTable(SequenceArgs),
    /// Mismatch-form Bell inequality test
    BellTest(BellArgs),
    /// Hidden-variable mismatch curve against the quantum cos² law
    LhvScan(ScanArgs),
    /// Many-worlds branch trace: source, both measurements, communication both ways
    MwiTrace(TraceArgs),
}

#[derive(Debug, Args)]
pub struct TwinDemoArgs {
    #[arg(long, default_value_t = 30.0, allow_negative_numbers = true)]
    pub theta1_deg: f64,
    #[arg(long, default_value_t = -30.0, allow_negative_numbers = true)]
    pub theta2_deg: f64,
    /// Basis for expanding the collapsed state
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub basis_deg: f64,
    /// Rotation used to show the twin state's symmetry
    #[arg(long, default_value_t = 17.0, allow_negative_numbers = true)]
    pub rotate_deg: f64,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// qm, mwi, or lhv:<nearest-axis | malus-stochastic | path to strategy JSON>
    #[arg(long, default_value = "qm")]
    pub model: String,
    /// Which photon the orthodox model measures first
    #[arg(long, default_value = "photon1-first")]
    pub order: MeasurementOrder,
}

#[derive(Debug, Args)]
pub struct SequenceArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta1_deg: f64,
    #[arg(long, default_value_t = 30.0, allow_negative_numbers = true)]
    pub theta2_deg: f64,
    #[arg(long, default_value_t = 24, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BellArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 30.0, allow_negative_numbers = true)]
    pub alpha_deg: f64,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1000..))]
    pub trials: u64,
    #[arg(long)]
    pub seed: u64,
    /// Exit with code 1 unless the inequality is violated
    #[arg(long, conflicts_with = "expect_no_violation")]
    pub expect_violation: bool,
    /// Exit with code 1 if the inequality is violated
    #[arg(long)]
    pub expect_no_violation: bool,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// lhv:<nearest-axis | malus-stochastic | path to strategy JSON>
    #[arg(long, default_value = "lhv:nearest-axis")]
    pub model: String,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub delta_min_deg: f64,
    #[arg(long, default_value_t = 90.0, allow_negative_numbers = true)]
    pub delta_max_deg: f64,
    /// Number of grid points, endpoints included
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(2..=100_000))]
    pub steps: u64,
    /// Integrate exactly instead of sampling
    #[arg(long)]
    pub exact: bool,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    /// Required unless --exact
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[arg(long, default_value_t = 30.0, allow_negative_numbers = true)]
    pub theta1_deg: f64,
    #[arg(long, default_value_t = -30.0, allow_negative_numbers = true)]
    pub theta2_deg: f64,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
    Expectation(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Expectation(_) => EXIT_EXPECTATION,
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Input(_) => EXIT_INPUT,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Input(m) | CliError::Expectation(m) | CliError::Internal(m) => m,
        }
    }
}

/// Rendered command output plus an optional failure that still prints it.
struct Rendered {
    body: String,
    failure: Option<CliError>,
}

impl From<String> for Rendered {
    fn from(body: String) -> Self {
        Rendered { body, failure: None }
    }
}

/// Parse `args` (program name first) and run, returning the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
            } else {
                let _ = stdout.write_all(text.as_bytes());
            }
            return e.exit_code();
        }
    };
    let workers = match resolve_workers(cli.workers) {
        Ok(w) => w,
        Err(e) => return report(e, stderr),
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(p) => p,
        Err(e) => return report(CliError::Internal(format!("cannot start worker pool: {e}")), stderr),
    };
    let rendered = match pool.install(|| execute(&cli)) {
        Ok(r) => r,
        Err(e) => return report(e, stderr),
    };
    if let Err(e) = emit(&rendered.body, cli.out.as_deref(), stdout) {
        return report(e, stderr);
    }
    match rendered.failure {
        Some(e) => report(e, stderr),
        None => EXIT_OK,
    }
}

fn report(e: CliError, stderr: &mut dyn Write) -> i32 {
    let _ = writeln!(stderr, "bellsim: {}", e.message());
    e.exit_code()
}

fn resolve_workers(flag: Option<u32>) -> Result<usize, CliError> {
    if let Some(w) = flag {
        return Ok(w as usize);
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(CliError::Usage(format!("{WORKERS_ENV} must be a positive integer, got `{v}`"))),
        },
        Err(_) => Ok(1),
    }
}

fn emit(body: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(body.as_bytes())
            .map_err(|e| CliError::Internal(format!("cannot write output: {e}"))),
    }
}

fn execute(cli: &Cli) -> Result<Rendered, CliError> {
    match &cli.command {
        Command::TwinDemo(a) => twin_demo(a, cli.format).map(Into::into),
        Command::SequenceTable(a) => sequence_table(a, cli.format).map(Into::into),
        Command::BellTest(a) => bell_test(a, cli.format),
        Command::LhvScan(a) => lhv_scan(a, cli.format).map(Into::into),
        Command::MwiTrace(a) => mwi_trace(a, cli.format),
    }
}

/// Resolve a `--model` value; `lhv:` names that are not built in are read as
/// strategy files.
pub fn resolve_model(spec: &str, order: MeasurementOrder) -> Result<Model, CliError> {
    match spec {
        "qm" | "orthodox" => Ok(Model::Orthodox(order)),
        "mwi" => Ok(Model::ManyWorlds),
        other => match other.strip_prefix("lhv:") {
            Some(name) => load_strategy(name).map(Model::Lhv),
            None => Err(CliError::Usage(AnalysisError::UnknownModel(other.to_string()).to_string())),
        },
    }
}

fn load_strategy(name: &str) -> Result<LocalStrategy, CliError> {
    if BUILTIN_STRATEGIES.contains(&name) {
        return builtin_strategy(name).map_err(|e| CliError::Usage(e.to_string()));
    }
    if name.is_empty() {
        return Err(CliError::Usage("lhv: needs a strategy name or file".into()));
    }
    let text = std::fs::read_to_string(name)
        .map_err(|e| CliError::Input(format!("cannot read strategy file {name}: {e}")))?;
    LocalStrategy::from_json(&text).map_err(|e| CliError::Input(format!("{name}: {e}")))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}

fn twin_demo(a: &TwinDemoArgs, format: Format) -> Result<String, CliError> {
    let twin = twin_state();
    let t1 = Angle::from_degrees(a.theta1_deg);
    let t2 = Angle::from_degrees(a.theta2_deg);
    let basis = Angle::from_degrees(a.basis_deg);
    let rotated = rotate_basis(&twin, Angle::from_degrees(a.rotate_deg));
    let joint = joint_distribution(&twin, t1, t2);
    let collapsed = project(&twin, Photon::First, t1, Outcome::Transmitted)
        .and_then(|s| project(&s, Photon::Second, t2, Outcome::Transmitted));
    let expansion = collapsed.as_ref().ok().map(|s| expand_in_basis(s, basis));

    Ok(match format {
        Format::Json => to_json(&json!({
            "twin_amplitudes": twin.amplitudes(),
            "rotate_deg": a.rotate_deg,
            "rotated_amplitudes": rotated.amplitudes(),
            "theta1_deg": a.theta1_deg,
            "theta2_deg": a.theta2_deg,
            "joint": joint,
            "coincidence": joint.coincidence(),
            "mismatch": joint.mismatch(),
            "basis_deg": a.basis_deg,
            "collapsed_tt_amplitudes": collapsed.as_ref().ok().map(|s| s.amplitudes()),
            "collapsed_tt_expansion": expansion,
        })),
        Format::Csv => {
            let mut out = String::from("quantity,component,value\n");
            let mut row = |q: &str, labels: &[&str], values: &[f64]| {
                for (l, v) in labels.iter().zip(values) {
                    let _ = writeln!(out, "{q},{l},{v}");
                }
            };
            let xy = ["xx", "xy", "yx", "yy"];
            row("twin", &xy, &twin.amplitudes());
            row("rotated", &xy, &rotated.amplitudes());
            row("joint", &["TT", "TA", "AT", "AA"], &joint.to_array());
            row("mismatch", &["total"], &[joint.mismatch()]);
            if let Some(e) = expansion {
                row("collapsed_tt_expansion", &["bb", "bp", "pb", "pp"], &e);
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "twin state [xx, xy, yx, yy]: {}", fmt_vec(&twin.amplitudes()));
            let _ = writeln!(out, "rotated by {}°:            {}", a.rotate_deg, fmt_vec(&rotated.amplitudes()));
            let _ = writeln!(out, "filters θ₁ = {}°, θ₂ = {}°", a.theta1_deg, a.theta2_deg);
            let _ = writeln!(out, "  P(TT, TA, AT, AA) = {}", fmt_vec(&joint.to_array()));
            let _ = writeln!(out, "  coincidence = {:.6}, mismatch = {:.6}", joint.coincidence(), joint.mismatch());
            match expansion {
                Some(e) => {
                    let _ = writeln!(
                        out,
                        "after both transmit, state on the {}° basis [bb, b⊥, ⊥b, ⊥⊥]: {}",
                        a.basis_deg,
                        fmt_vec(&e)
                    );
                }
                None => {
                    let _ = writeln!(out, "both photons cannot be transmitted at these angles");
                }
            }
            out
        }
    })
}

fn fmt_vec(v: &[f64]) -> String {
    let cells: Vec<String> = v.iter().map(|x| format!("{:+.6}", x)).collect();
    format!("[{}]", cells.join(", "))
}

fn sequence_table(a: &SequenceArgs, format: Format) -> Result<String, CliError> {
    let model = resolve_model(&a.model.model, a.model.order)?;
    let t1 = Angle::from_degrees(a.theta1_deg);
    let t2 = Angle::from_degrees(a.theta2_deg);
    let table = generate_sequence(&model, t1, t2, a.trials, a.seed);
    let rate = mismatch_rate(&table).map_err(|e| CliError::Internal(e.to_string()))?;

    Ok(match format {
        Format::Json => {
            let pairs: Vec<_> = table
                .pairs
                .iter()
                .zip(&table.mismatch_flags)
                .map(|((o1, o2), m)| json!({"filter1": o1, "filter2": o2, "mismatch": m}))
                .collect();
            to_json(&json!({
                "model": model.label(),
                "theta1_deg": a.theta1_deg,
                "theta2_deg": a.theta2_deg,
                "trials": a.trials,
                "seed": a.seed,
                "pairs": pairs,
                "mismatches": rate.mismatches,
                "rate": rate.rate,
                "ci_halfwidth": rate.ci_halfwidth,
            }))
        }
        Format::Csv => {
            let mut out = String::from("trial,filter1,filter2,mismatch\n");
            for (i, ((o1, o2), m)) in table.pairs.iter().zip(&table.mismatch_flags).enumerate() {
                let _ = writeln!(out, "{i},{o1},{o2},{}", *m as u8);
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "model {} | θ₁ = {}° | θ₂ = {}° | {} trials | seed {}",
                model.label(),
                a.theta1_deg,
                a.theta2_deg,
                a.trials,
                a.seed
            );
            out.push_str(&render_sequence_rows(&table.pairs));
            let _ = writeln!(
                out,
                "mismatches {}/{} = {:.4} ± {:.4} (3σ)",
                rate.mismatches, rate.trials, rate.rate, rate.ci_halfwidth
            );
            out
        }
    })
}

/// Two labelled rows per block of at most [`TABLE_WIDTH`] columns; a mismatched
/// column gets a trailing `*` on both cells.
pub fn render_sequence_rows(pairs: &[(Outcome, Outcome)]) -> String {
    let mut out = String::new();
    for (block, chunk) in pairs.chunks(TABLE_WIDTH).enumerate() {
        if block > 0 {
            out.push('\n');
        }
        for (label, pick) in [("Filter 1", 0usize), ("Filter 2", 1)] {
            let cells: Vec<String> = chunk
                .iter()
                .map(|(a, b)| {
                    let o = if pick == 0 { a } else { b };
                    let mark = if a != b { '*' } else { ' ' };
                    format!("{o}{mark}")
                })
                .collect();
            let _ = writeln!(out, "{label} | {}", cells.join(" ").trim_end());
        }
    }
    out
}

fn bell_test(a: &BellArgs, format: Format) -> Result<Rendered, CliError> {
    let model = resolve_model(&a.model.model, a.model.order)?;
    let report = bell_report(&model, a.alpha_deg, a.trials, a.seed).map_err(|e| CliError::Usage(e.to_string()))?;
    let body = render_bell(&report, format);
    let failure = if a.expect_violation && !report.violated {
        Some(CliError::Expectation("expected a violation, none found".into()))
    } else if a.expect_no_violation && report.violated {
        Some(CliError::Expectation("expected no violation, found one".into()))
    } else {
        None
    };
    Ok(Rendered { body, failure })
}

fn render_bell(r: &BellReport, format: Format) -> String {
    match format {
        Format::Json => to_json(r),
        Format::Csv => format!(
            "model,alpha_deg,trials,seed,m_left,m_right,m_wide,bound,ci_left,ci_right,ci_wide,violated\n{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.model, r.alpha_deg, r.trials, r.seed, r.m_left, r.m_right, r.m_wide, r.bound, r.ci.m_left, r.ci.m_right, r.ci.m_wide, r.violated
        ),
        Format::Text => {
            let mut out = String::new();
            let a = r.alpha_deg;
            let _ = writeln!(out, "model {} | α = {}° | {} trials per setting | seed {}", r.model, a, r.trials, r.seed);
            let _ = writeln!(out, "M(-{a}°, 0°)   = {:.6} ± {:.6}", r.m_left, r.ci.m_left);
            let _ = writeln!(out, "M(0°, {a}°)    = {:.6} ± {:.6}", r.m_right, r.ci.m_right);
            let _ = writeln!(out, "M(-{a}°, {a}°) = {:.6} ± {:.6}", r.m_wide, r.ci.m_wide);
            let _ = writeln!(out, "bound M(-α,0) + M(0,α) = {:.6}", r.bound);
            let _ = writeln!(
                out,
                "verdict: {}",
                if r.violated { "VIOLATED" } else { "satisfied (within CI)" }
            );
            out
        }
    }
}

#[derive(Serialize)]
struct ScanRow {
    delta_deg: f64,
    lhv_mismatch: f64,
    qm_mismatch: f64,
}

fn lhv_scan(a: &ScanArgs, format: Format) -> Result<String, CliError> {
    let strategy = match resolve_model(&a.model, MeasurementOrder::default())? {
        Model::Lhv(s) => s,
        other => return Err(CliError::Usage(format!("lhv-scan needs an lhv: model, got {}", other.label()))),
    };
    let seed = match (a.exact, a.seed) {
        (_, Some(s)) => Some(s),
        (true, None) => None,
        (false, None) => return Err(CliError::Usage("--seed is required unless --exact is given".into())),
    };
    let zero = Angle::from_degrees(0.0);
    let mut rows = Vec::with_capacity(a.steps as usize);
    for i in 0..a.steps {
        let delta = a.delta_min_deg + (a.delta_max_deg - a.delta_min_deg) * i as f64 / (a.steps - 1) as f64;
        let theta2 = Angle::from_degrees(delta);
        let lhv = if a.exact {
            exact_mismatch(&strategy, zero, theta2)
                .map_err(|e| CliError::Internal(e.to_string()))?
                .mismatch
        } else {
            let seed = seed.expect("checked above");
            monte_carlo_mismatch(&strategy, zero, theta2, a.trials, derive_seed(seed, i)).mismatch
        };
        rows.push(ScanRow {
            delta_deg: delta,
            lhv_mismatch: lhv,
            qm_mismatch: quantum_mismatch(delta),
        });
    }
    let method = if a.exact { "exact-quadrature" } else { "monte-carlo" };

    Ok(match format {
        Format::Json => to_json(&json!({
            "model": format!("lhv:{}", strategy.name),
            "method": method,
            "trials": if a.exact { None } else { Some(a.trials) },
            "seed": seed,
            "rows": rows,
        })),
        Format::Csv => {
            let mut out = String::from("delta_deg,lhv_mismatch,qm_mismatch\n");
            for r in &rows {
                let _ = writeln!(out, "{},{},{}", r.delta_deg, r.lhv_mismatch, r.qm_mismatch);
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "strategy {} ({method})", strategy.name);
            let _ = writeln!(out, "{:>10}  {:>12}  {:>12}", "delta_deg", "lhv", "qm");
            for r in &rows {
                let _ = writeln!(out, "{:>10.4}  {:>12.6}  {:>12.6}", r.delta_deg, r.lhv_mismatch, r.qm_mismatch);
            }
            out
        }
    })
}

#[derive(Serialize)]
struct RecordCounts {
    observer1: usize,
    observer2: usize,
}

#[derive(Serialize)]
struct TraceStep {
    step: usize,
    event: Event,
    branch_count: usize,
    total_weight: f64,
    distinguishable_records: RecordCounts,
    trace: BranchTrace,
}

#[derive(Serialize)]
struct TraceFile {
    theta1_deg: f64,
    theta2_deg: f64,
    steps: Vec<TraceStep>,
    audit: AuditReport,
}

/// Run the full source → measure → measure → communicate walkthrough.
pub fn mwi_walkthrough(theta1: Angle, theta2: Angle) -> Result<Vec<BranchState>, crate::many_worlds::BranchError> {
    let s0 = initial_state();
    let s1 = local_measure(&s0, Photon::First, theta1)?;
    let s2 = local_measure(&s1, Photon::Second, theta2)?;
    let s3 = communicate(&s2, Photon::First, Photon::Second)?;
    let s4 = communicate(&s3, Photon::Second, Photon::First)?;
    Ok(vec![s0, s1, s2, s3, s4])
}

fn mwi_trace(a: &TraceArgs, format: Format) -> Result<Rendered, CliError> {
    let states = mwi_walkthrough(Angle::from_degrees(a.theta1_deg), Angle::from_degrees(a.theta2_deg))
        .map_err(|e| CliError::Internal(e.to_string()))?;
    let steps: Vec<TraceStep> = states
        .iter()
        .enumerate()
        .map(|(i, s)| TraceStep {
            step: i,
            event: *s.events().last().expect("log starts at the source"),
            branch_count: s.branches().len(),
            total_weight: s.total_weight(),
            distinguishable_records: RecordCounts {
                observer1: distinguishable_records(s, Photon::First),
                observer2: distinguishable_records(s, Photon::Second),
            },
            trace: s.trace(),
        })
        .collect();
    let audit = locality_audit(states.last().expect("five states"));
    let failure = (!audit.passed).then(|| CliError::Internal("locality audit failed".into()));
    let file = TraceFile {
        theta1_deg: a.theta1_deg,
        theta2_deg: a.theta2_deg,
        steps,
        audit,
    };

    let body = match format {
        Format::Json => to_json(&file),
        Format::Csv => {
            let mut out = String::from("step,event,location,branch_count,records1,records2,total_weight\n");
            for s in &file.steps {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    s.step,
                    event_name(&s.event),
                    location_name(&s.event),
                    s.branch_count,
                    s.distinguishable_records.observer1,
                    s.distinguishable_records.observer2,
                    s.total_weight
                );
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "θ₁ = {}°, θ₂ = {}°", a.theta1_deg, a.theta2_deg);
            for s in &file.steps {
                let _ = writeln!(
                    out,
                    "{:<2} {:<14} @{:<9} branches {}  records {}/{}  weight {:.12}",
                    s.step,
                    event_name(&s.event),
                    location_name(&s.event),
                    s.branch_count,
                    s.distinguishable_records.observer1,
                    s.distinguishable_records.observer2,
                    s.total_weight
                );
            }
            let _ = writeln!(out, "locality audit: {}", if file.audit.passed { "pass" } else { "FAIL" });
            out
        }
    };
    Ok(Rendered { body, failure })
}

fn event_name(e: &Event) -> String {
    use crate::many_worlds::EventKind;
    match e.kind {
        EventKind::Source => "source".into(),
        EventKind::Measure { observer, .. } => format!("measure{observer}"),
        EventKind::Communicate { from, to } => format!("send{from}to{to}"),
    }
}

fn location_name(e: &Event) -> &'static str {
    use crate::many_worlds::Location;
    match e.location {
        Location::Source => "source",
        Location::Station1 => "station1",
        Location::Station2 => "station2",
    }
}
