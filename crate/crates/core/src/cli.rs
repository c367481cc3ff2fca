//! Batch command interface shared by the `qsep` binary and the tests.
//!
//! [`execute`] never touches the process streams: it returns an [`Outcome`]
//! holding the text for stdout and stderr plus the exit status. On an error
//! stdout stays empty.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::bounds::{bound_report, CloningComparison, DEFAULT_DEPTH};
use crate::construction::{build_isometry, extract_kraus, verify_separation, VerificationReport};
use crate::error::Error;
use crate::feasibility::{
    check_certificate, dependency_propagation_check, discriminate_then_prepare_rates, equivalence_report,
    max_uniform_gamma, optimize_gamma, support_propagation_check, universal_separability, DependencyVerdict,
    GammaSearch, SeparationInstance, StateSet, SuccessVector, DEFAULT_PRECISION,
};
use crate::format::{
    digest, BoundsResult, ChannelFile, ConstructResult, FeasibilityResult, FileError, GenResult, InstanceFile,
    LoadedInstance, Mode, RunReport, RunResults,
};
use crate::oracle::{random_density_ensemble, random_instance, random_pure_ensemble, EnsembleSpec, PriorMode, StateKind};
use crate::qmat::{DensityMatrix, PureState, DEFAULT_PSD_TOL, DEFAULT_RANK_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_INVARIANT: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_SINGULAR: i32 = 4;

/// Significant digits of every number in text and CSV output.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Pure,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PriorArg {
    Uniform,
    Random,
}

/// How `gen` picks targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    /// Independently drawn states of the same kind.
    Random,
    /// Computational basis states of dimension `n`.
    Orthogonal,
    /// The inputs themselves.
    Copy,
}

#[derive(Debug, Parser)]
#[command(name = "qsep", version, about = "Probabilistic quantum state separation")]
pub struct Cli {
    /// PSD and verification tolerance.
    #[arg(long, global = true, default_value_t = DEFAULT_PSD_TOL)]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Depth of the failure-bound hierarchy.
    #[arg(long, global = true, default_value_t = DEFAULT_DEPTH)]
    pub depth: usize,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    /// Artifact destination: the channel for `construct`, the instance for
    /// `gen`, the report otherwise.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether the instance can be realized.
    Feasibility {
        file: PathBuf,
        /// Bisection precision for the uniform success probability.
        #[arg(long, default_value_t = DEFAULT_PRECISION)]
        precision: f64,
        /// Relative singular-value cut for rank and support decisions.
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        rank_tol: f64,
    },
    /// Build the separating channel of a pure instance.
    Construct {
        file: PathBuf,
        /// Success probabilities, comma separated; one value means all equal.
        #[arg(long, value_delimiter = ',')]
        gamma: Vec<f64>,
    },
    /// Lower bounds on the average failure probability.
    Bounds {
        file: PathBuf,
        /// Comparison bounds to report (default: every applicable one).
        #[arg(long, value_delimiter = ',')]
        compare: Vec<String>,
    },
    /// Audit a channel file against an instance.
    Verify {
        file: PathBuf,
        #[arg(long)]
        channel: PathBuf,
        #[arg(long, value_delimiter = ',')]
        gamma: Vec<f64>,
    },
    /// Write a seeded random instance.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        dim: usize,
        #[arg(long, value_enum, default_value_t = KindArg::Pure)]
        kind: KindArg,
        #[arg(long, value_enum, default_value_t = PriorArg::Uniform)]
        priors: PriorArg,
        #[arg(long, value_enum, default_value_t = TargetArg::Random)]
        targets: TargetArg,
        /// Target dimension for random targets (default: `dim`).
        #[arg(long)]
        target_dim: Option<usize>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Feasibility { .. } => "feasibility",
            Command::Construct { .. } => "construct",
            Command::Bounds { .. } => "bounds",
            Command::Verify { .. } => "verify",
            Command::Gen { .. } => "gen",
        }
    }
}

/// What a run printed and how it ended.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub exit: i32,
    /// Present whenever the command got far enough to produce results.
    pub report: Option<RunReport>,
}

/// A failure with its exit status.
#[derive(Debug, Clone, PartialEq)]
struct Failure {
    exit: i32,
    message: String,
}

impl Failure {
    fn new(exit: i32, message: impl Into<String>) -> Self {
        Failure { exit, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let exit = match e {
            Error::Infeasible { .. } => EXIT_INFEASIBLE,
            Error::SingularPair { .. } => EXIT_SINGULAR,
            _ => EXIT_INVARIANT,
        };
        Failure::new(exit, e.to_string())
    }
}

impl From<FileError> for Failure {
    fn from(e: FileError) -> Self {
        match e {
            FileError::Parse(msg) => Failure::new(EXIT_PARSE, msg),
            FileError::Invariant { field, source } => {
                let exit = Failure::from(source.clone()).exit;
                Failure::new(exit, format!("{field}: {source}"))
            }
        }
    }
}

struct Success {
    results: RunResults,
    warnings: Vec<String>,
    exit: i32,
    digest: Option<String>,
    /// Written to stdout instead of the rendered report.
    raw_stdout: Option<String>,
}

pub fn execute(cli: &Cli) -> Outcome {
    let name = cli.command.name();
    let run = match &cli.command {
        Command::Feasibility { file, precision, rank_tol } => feasibility(cli, file, *precision, *rank_tol),
        Command::Construct { file, gamma } => construct(cli, file, gamma),
        Command::Bounds { file, compare } => bounds(cli, file, compare),
        Command::Verify { file, channel, gamma } => verify(cli, file, channel, gamma),
        Command::Gen { n, dim, kind, priors, targets, target_dim } => {
            gen(cli, *n, *dim, *kind, *priors, *targets, target_dim.unwrap_or(*dim))
        }
    };
    let success = match run {
        Ok(s) => s,
        Err(f) => {
            return Outcome { stdout: String::new(), stderr: format!("error: {}\n", f.message), exit: f.exit, report: None }
        }
    };
    let report = RunReport {
        command: name.to_string(),
        input_digest: success.digest,
        results: Some(success.results),
        warnings: success.warnings,
        exit_status: success.exit,
    };
    let rendered = render(&report, cli.format);
    let mut stderr: String = report.warnings.iter().map(|w| format!("warning: {w}\n")).collect();
    let stdout = match (&success.raw_stdout, &cli.out, &cli.command) {
        (Some(raw), _, _) => raw.clone(),
        (None, Some(path), Command::Feasibility { .. } | Command::Bounds { .. } | Command::Verify { .. }) => {
            if let Err(e) = fs::write(path, &rendered) {
                stderr.push_str(&format!("error: cannot write {}: {e}\n", path.display()));
                return Outcome { stdout: String::new(), stderr, exit: EXIT_PARSE, report: Some(report) };
            }
            String::new()
        }
        _ => rendered,
    };
    Outcome { stdout, stderr, exit: report.exit_status, report: Some(report) }
}

fn read_text(path: &Path) -> Result<(String, String), Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::new(EXIT_PARSE, format!("cannot read {}: {e}", path.display())))?;
    let digest = digest(&bytes);
    let text = String::from_utf8(bytes)
        .map_err(|_| Failure::new(EXIT_PARSE, format!("{}: file is not valid UTF-8", path.display())))?;
    Ok((text, digest))
}

fn load(path: &Path) -> Result<(LoadedInstance, String), Failure> {
    let (text, digest) = read_text(path)?;
    let file = InstanceFile::from_json(&text).map_err(|e| prefix(path, e.into()))?;
    let loaded = file.load().map_err(|e| prefix(path, e.into()))?;
    Ok((loaded, digest))
}

fn prefix(path: &Path, f: Failure) -> Failure {
    Failure::new(f.exit, format!("{}: {}", path.display(), f.message))
}

fn write_out(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::new(EXIT_PARSE, format!("cannot write {}: {e}", path.display())))
}

/// A single value expands to a uniform vector.
fn gamma_arg(values: &[f64], n: usize) -> Result<SuccessVector, Failure> {
    let gammas = if values.len() == 1 { vec![values[0]; n] } else { values.to_vec() };
    if gammas.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: gammas.len() }.into());
    }
    Ok(SuccessVector::new(gammas)?)
}

fn uniform_optimum(instance: &SeparationInstance, precision: f64) -> Result<SuccessVector, Failure> {
    let (x, xp) = instance.grams()?;
    Ok(SuccessVector::uniform(instance.n(), max_uniform_gamma(&x, &xp, precision)?)?)
}

const FORBIDDEN_MESSAGE: &str =
    "linearly dependent input states cannot be mapped to linearly independent targets with nonzero success probability";

fn feasibility(cli: &Cli, path: &Path, precision: f64, rank_tol: f64) -> Result<Success, Failure> {
    let (loaded, digest) = load(path)?;
    let instance = &loaded.instance;
    let inputs = instance.inputs().densities();
    let separability = universal_separability(&inputs, rank_tol)?;
    let equivalence = equivalence_report(&inputs, rank_tol)?;
    let dtp = discriminate_then_prepare_rates(&inputs, rank_tol)?;
    let mut warnings = Vec::new();

    let (mode, uniform_gamma, search_certificate, dependency) = if instance.is_pure() {
        let (x, xp) = instance.grams()?;
        let uniform = max_uniform_gamma(&x, &xp, precision)?;
        let search = GammaSearch { precision, tol: cli.tol, ..GammaSearch::default() };
        let gamma = optimize_gamma(&x, &xp, instance.priors(), &search, cli.seed)?;
        let cert = check_certificate(&x, &xp, &gamma, cli.tol)?;
        (Mode::Pure, Some(uniform), Some(cert), dependency_propagation_check(instance, rank_tol)?)
    } else {
        (Mode::Mixed, None, None, support_propagation_check(instance, rank_tol)?)
    };

    let by_certificate = uniform_gamma.is_some_and(|g| g > 0.0);
    let by_protocol = dtp.as_ref().is_some_and(|r| r.iter().all(|&g| g > 0.0));
    let trivial = targets_equal_inputs(instance, cli.tol);
    let feasible = dependency != DependencyVerdict::Forbidden && (by_certificate || by_protocol || trivial);
    if dependency == DependencyVerdict::Forbidden {
        warnings.push(FORBIDDEN_MESSAGE.to_string());
    } else if !feasible && mode == Mode::Mixed {
        warnings.push("no separation found: the inputs are not all separable and no certificate exists for mixed states".into());
    }
    let results = FeasibilityResult {
        mode,
        n: instance.n(),
        uniform_gamma,
        search_certificate,
        discriminate_then_prepare: dtp,
        separability,
        equivalence,
        dependency,
        feasible,
    };
    Ok(Success {
        results: RunResults::Feasibility(results),
        warnings,
        exit: if feasible { EXIT_OK } else { EXIT_INFEASIBLE },
        digest: Some(digest),
        raw_stdout: None,
    })
}

fn targets_equal_inputs(instance: &SeparationInstance, tol: f64) -> bool {
    if instance.inputs().dim() != instance.targets().dim() {
        return false;
    }
    let inputs = instance.inputs().densities();
    let targets = instance.targets().densities();
    inputs.iter().zip(&targets).all(|(a, b)| (a.matrix() - b.matrix()).norm() <= tol.max(1e-12))
}

fn construct(cli: &Cli, path: &Path, gamma: &[f64]) -> Result<Success, Failure> {
    let (loaded, digest) = load(path)?;
    let instance = &loaded.instance;
    if !instance.is_pure() {
        return Err(Failure::new(EXIT_INVARIANT, "construct needs a pure-mode instance"));
    }
    let gamma = if gamma.is_empty() { uniform_optimum(instance, DEFAULT_PRECISION)? } else { gamma_arg(gamma, instance.n())? };
    if gamma.as_slice().iter().all(|&g| g == 0.0) {
        return Err(Failure::new(EXIT_INFEASIBLE, "no positive uniform success probability is certified"));
    }
    let iso = build_isometry(instance, &gamma, cli.tol)?;
    let channel = extract_kraus(&iso);
    let verification = verify_separation(&channel, instance, &gamma, verification_tol(cli.tol))?;
    let mut warnings = Vec::new();
    let channel_path = match &cli.out {
        Some(out) => {
            write_out(out, &ChannelFile::from_channel(&channel).to_json())?;
            Some(out.display().to_string())
        }
        None => {
            warnings.push("no --out given; the channel was not written".into());
            None
        }
    };
    if !verification.pass {
        warnings.push("constructed channel failed verification".into());
    }
    let base_bound = crate::bounds::base_bound(instance).ok();
    let results = ConstructResult {
        gamma: gamma.as_slice().to_vec(),
        isometry_defect: iso.isometry_defect(),
        verification,
        base_bound,
        channel_path,
    };
    let exit = if results.verification.pass { EXIT_OK } else { EXIT_INVARIANT };
    Ok(Success { results: RunResults::Construct(results), warnings, exit, digest: Some(digest), raw_stdout: None })
}

/// Success rates and fidelities are checked no tighter than this.
const MIN_VERIFY_TOL: f64 = 1e-9;

fn verification_tol(tol: f64) -> f64 {
    tol.max(MIN_VERIFY_TOL)
}

pub const COMPARISON_NAMES: [&str; 6] = ["qiu", "cloning", "chefles_barnett", "ud", "jaeger_shimony", "idp"];

fn bounds(cli: &Cli, path: &Path, compare: &[String]) -> Result<Success, Failure> {
    let (loaded, digest) = load(path)?;
    for name in compare {
        if !COMPARISON_NAMES.contains(&name.as_str()) {
            return Err(Failure::new(
                EXIT_PARSE,
                format!("unknown comparison `{name}` (expected one of {})", COMPARISON_NAMES.join(", ")),
            ));
        }
        if matches!(name.as_str(), "cloning" | "chefles_barnett") && loaded.cloning.is_none() {
            return Err(Failure::new(EXIT_INVARIANT, format!("comparison `{name}` needs a cloning block")));
        }
    }
    let cloning = loaded.cloning.map(|block| CloningComparison {
        states: &loaded.single_copy,
        copies_in: block.m,
        copies_out: block.n,
    });
    let report = bound_report(&loaded.instance, cli.depth, cloning)?;
    let mut warnings = Vec::new();
    let compare: Vec<String> = if compare.is_empty() {
        report.comparisons.entries().iter().filter(|(_, v)| v.is_some()).map(|(k, _)| k.to_string()).collect()
    } else {
        for (name, value) in report.comparisons.entries() {
            if value.is_none() && compare.iter().any(|c| c == name) {
                warnings.push(format!("comparison `{name}` does not apply to this instance"));
            }
        }
        compare.to_vec()
    };
    Ok(Success {
        results: RunResults::Bounds(BoundsResult { report, compare }),
        warnings,
        exit: EXIT_OK,
        digest: Some(digest),
        raw_stdout: None,
    })
}

fn verify(cli: &Cli, path: &Path, channel_path: &Path, gamma: &[f64]) -> Result<Success, Failure> {
    let (loaded, digest) = load(path)?;
    let instance = &loaded.instance;
    let (text, _) = read_text(channel_path)?;
    let channel = ChannelFile::from_json(&text)
        .and_then(|f| f.to_channel())
        .map_err(|e| prefix(channel_path, e.into()))?;
    let gamma = if !gamma.is_empty() {
        gamma_arg(gamma, instance.n())?
    } else if instance.is_pure() {
        uniform_optimum(instance, DEFAULT_PRECISION)?
    } else {
        let rates = discriminate_then_prepare_rates(&instance.inputs().densities(), DEFAULT_RANK_TOL)?;
        SuccessVector::new(rates.unwrap_or_else(|| vec![0.0; instance.n()]))?
    };
    let report: VerificationReport = verify_separation(&channel, instance, &gamma, verification_tol(cli.tol))?;
    let mut warnings = Vec::new();
    if !report.pass {
        warnings.push("channel does not realize the separation".into());
    }
    let exit = if report.pass { EXIT_OK } else { EXIT_INVARIANT };
    Ok(Success { results: RunResults::Verify(report), warnings, exit, digest: Some(digest), raw_stdout: None })
}

fn gen(
    cli: &Cli,
    n: usize,
    dim: usize,
    kind: KindArg,
    priors: PriorArg,
    targets: TargetArg,
    target_dim: usize,
) -> Result<Success, Failure> {
    let prior_mode = match priors {
        PriorArg::Uniform => PriorMode::Uniform,
        PriorArg::Random => PriorMode::Random,
    };
    let spec = match kind {
        KindArg::Pure => EnsembleSpec::pure(n, dim, cli.seed),
        KindArg::Mixed => EnsembleSpec::mixed(n, dim, cli.seed),
    }
    .with_priors(prior_mode);
    let instance = match targets {
        TargetArg::Random => random_instance(&spec, target_dim)?,
        TargetArg::Copy | TargetArg::Orthogonal => {
            let (inputs, priors) = match spec.kind {
                StateKind::Pure => {
                    let (s, p) = random_pure_ensemble(&spec)?;
                    (StateSet::Pure(s), p)
                }
                StateKind::Mixed => {
                    let (s, p) = random_density_ensemble(&spec)?;
                    (StateSet::Mixed(s), p)
                }
            };
            let targets = if targets == TargetArg::Copy { inputs.clone() } else { basis_set(spec.kind, n)? };
            SeparationInstance::new(inputs, targets, priors)?
        }
    };
    let text = InstanceFile::from_instance(&instance).to_json();
    let digest = digest(text.as_bytes());
    let effective_target_dim = instance.targets().dim();
    let (instance_path, raw_stdout) = match &cli.out {
        Some(out) => {
            write_out(out, &text)?;
            (Some(out.display().to_string()), None)
        }
        None => (None, Some(text + "\n")),
    };
    let results = GenResult { spec, target_dim: effective_target_dim, instance_path };
    Ok(Success { results: RunResults::Gen(results), warnings: Vec::new(), exit: EXIT_OK, digest: Some(digest), raw_stdout })
}

fn basis_set(kind: StateKind, n: usize) -> Result<StateSet, Failure> {
    let states = (0..n).map(|i| PureState::basis(n, i)).collect::<crate::error::Result<Vec<_>>>()?;
    Ok(match kind {
        StateKind::Pure => StateSet::Pure(states),
        StateKind::Mixed => StateSet::Mixed(states.iter().map(PureState::density).collect::<Vec<DensityMatrix>>()),
    })
}

/// `x` with [`SIGNIFICANT_DIGITS`] significant digits, trailing zeros trimmed.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if (-5..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn list(values: &[f64]) -> String {
    values.iter().map(|&v| format_number(v)).collect::<Vec<_>>().join(" ")
}

fn flags(values: &[bool]) -> String {
    values.iter().map(|&b| if b { "yes" } else { "no" }).collect::<Vec<_>>().join(" ")
}

fn yes_no(b: bool) -> String {
    flags(&[b])
}

/// Flat `(name, value)` rows of a result, shared by text and CSV output.
fn rows(results: &RunResults) -> Vec<(String, String)> {
    let mut rows: Vec<(String, String)> = Vec::new();
    let mut push = |k: &str, v: String| rows.push((k.to_string(), v));
    match results {
        RunResults::Feasibility(r) => {
            push("mode", if r.mode == Mode::Pure { "pure" } else { "mixed" }.into());
            push("states", r.n.to_string());
            if let Some(g) = r.uniform_gamma {
                push("uniform_gamma", format_number(g));
            }
            if let Some(cert) = &r.search_certificate {
                push("search_gamma", list(cert.gamma.as_slice()));
                push("search_residual_min_eigenvalue", format_number(cert.residual_min_eigenvalue));
                push("search_certificate_feasible", yes_no(cert.feasible));
            }
            match &r.discriminate_then_prepare {
                Some(rates) => push("discriminate_then_prepare", list(rates)),
                None => push("discriminate_then_prepare", "unavailable".into()),
            }
            push("separable", flags(&r.separability.per_index));
            push("ud_possible", yes_no(r.equivalence.ud_possible));
            push("cloning_possible", yes_no(r.equivalence.cloning_possible));
            let verdict = match r.dependency {
                DependencyVerdict::Forbidden => "forbidden",
                DependencyVerdict::NotExcluded => "not_excluded",
            };
            push("dependency", verdict.into());
            push("feasible", yes_no(r.feasible));
        }
        RunResults::Construct(r) => {
            push("gamma", list(&r.gamma));
            push("isometry_defect", format_number(r.isometry_defect));
            verification_rows(&r.verification, &mut push);
            if let Some(b) = r.base_bound {
                push("base_bound", format_number(b));
            }
            if let Some(p) = &r.channel_path {
                push("channel", p.clone());
            }
        }
        RunResults::Bounds(r) => {
            for (k, v) in r.report.series.iter().enumerate() {
                push(&format!("pf_{k}"), format_number(*v));
            }
            for (name, value) in r.report.comparisons.entries() {
                if r.compare.iter().any(|c| c == name) {
                    push(name, value.map_or_else(|| "n/a".to_string(), format_number));
                }
            }
        }
        RunResults::Verify(r) => verification_rows(r, &mut push),
        RunResults::Gen(r) => {
            push("n", r.spec.n.to_string());
            push("dim", r.spec.dim.to_string());
            push("target_dim", r.target_dim.to_string());
            push("seed", r.spec.seed.to_string());
            if let Some(p) = &r.instance_path {
                push("instance", p.clone());
            }
        }
    }
    rows
}

fn verification_rows(r: &VerificationReport, push: &mut impl FnMut(&str, String)) {
    for (i, v) in r.per_input.iter().enumerate() {
        push(&format!("success_{i}"), format_number(v.success_probability));
        push(&format!("failure_{i}"), format_number(v.failure_probability));
        push(&format!("fidelity_{i}"), v.success_fidelity.map_or_else(|| "n/a".to_string(), format_number));
    }
    push("completeness_residual", format_number(r.completeness_residual));
    push("average_failure", format_number(r.average_failure));
    push("pass", yes_no(r.pass));
}

pub fn render(report: &RunReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => report.to_json() + "\n",
        OutputFormat::Csv => {
            let header = match report.results {
                Some(RunResults::Bounds(_)) => "bound_name,value",
                _ => "field,value",
            };
            let mut out = format!("{header}\n");
            for (k, v) in report.results.iter().flat_map(rows) {
                let _ = writeln!(out, "{k},{v}");
            }
            out
        }
        OutputFormat::Text => {
            let rows: Vec<(String, String)> = report.results.iter().flat_map(rows).collect();
            let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            let mut out = String::new();
            for (k, v) in rows {
                let _ = writeln!(out, "{k:<width$}  {v}");
            }
            out
        }
    }
}
