//! JSON file schemas: instance files, channel files and run reports.
//!
//! Complex numbers are two-element `[re, im]` arrays. Pure states are arrays of
//! amplitudes; density matrices are arrays of rows. Every file carries a
//! `version` tag, currently [`FORMAT_VERSION`].

use serde::{Deserialize, Serialize};

use crate::bounds::{BoundReport, PriorVector};
use crate::construction::{KrausChannel, VerificationReport};
use crate::error::Error;
use crate::feasibility::{
    DependencyVerdict, EquivalenceReport, FeasibilityCertificate, SeparabilityReport, SeparationInstance, StateSet,
};
use crate::oracle::EnsembleSpec;
use crate::qmat::{c, ComplexMatrix, ComplexVector, DensityMatrix, PureState};

pub const FORMAT_VERSION: u32 = 1;

/// Pure state amplitudes whose norm is within this of 1 are renormalized on load.
pub const FILE_NORM_TOL: f64 = 1e-9;

pub type ComplexPair = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Pure,
    Mixed,
}

/// One state entry: a vector for pure mode, a row list for mixed mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateEntry {
    Vector(Vec<ComplexPair>),
    Matrix(Vec<Vec<ComplexPair>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CloningBlock {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
}

/// On-disk separation instance.
///
/// When `targets` is omitted a `cloning` block is required; the instance is then
/// `states^{⊗M} → states^{⊗N}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub version: u32,
    pub mode: Mode,
    pub states: Vec<StateEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<StateEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priors: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cloning: Option<CloningBlock>,
}

/// Why a file could not be turned into an instance.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FileError {
    /// Malformed JSON or a wrong shape; carries serde's line/column message.
    #[error("parse error: {0}")]
    Parse(String),
    /// Well-formed file whose content violates an invariant.
    #[error("{field}: {source}")]
    Invariant { field: String, source: Error },
}

fn invariant(field: impl Into<String>, source: Error) -> FileError {
    FileError::Invariant { field: field.into(), source }
}

fn complex(p: &ComplexPair) -> num_complex::Complex64 {
    c(p[0], p[1])
}

fn pair(z: &num_complex::Complex64) -> ComplexPair {
    [z.re, z.im]
}

/// Row-major `[re, im]` rows of a matrix.
pub fn matrix_to_rows(m: &ComplexMatrix) -> Vec<Vec<ComplexPair>> {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|k| pair(&m[(r, k)])).collect()).collect()
}

pub fn rows_to_matrix(rows: &[Vec<ComplexPair>], field: &str) -> Result<ComplexMatrix, FileError> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if let Some((r, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != ncols) {
        return Err(invariant(
            format!("{field}[{r}]"),
            Error::DimensionMismatch { expected: ncols, found: row.len() },
        ));
    }
    Ok(ComplexMatrix::from_fn(nrows, ncols, |r, k| complex(&rows[r][k])))
}

fn parse_pure(entry: &StateEntry, field: &str) -> Result<PureState, FileError> {
    let StateEntry::Vector(amps) = entry else {
        return Err(FileError::Parse(format!("{field}: pure mode expects an amplitude array")));
    };
    let v = ComplexVector::from_iterator(amps.len(), amps.iter().map(complex));
    let norm = v.norm();
    if (norm - 1.0).abs() > FILE_NORM_TOL {
        return Err(invariant(field, Error::NotNormalized { norm }));
    }
    PureState::normalized(v).map_err(|e| invariant(field, e))
}

fn parse_mixed(entry: &StateEntry, field: &str) -> Result<DensityMatrix, FileError> {
    let StateEntry::Matrix(rows) = entry else {
        return Err(FileError::Parse(format!("{field}: mixed mode expects a matrix (array of rows)")));
    };
    DensityMatrix::new(rows_to_matrix(rows, field)?).map_err(|e| invariant(field, e))
}

fn parse_set(mode: Mode, entries: &[StateEntry], field: &str) -> Result<StateSet, FileError> {
    Ok(match mode {
        Mode::Pure => StateSet::Pure(
            entries.iter().enumerate().map(|(i, e)| parse_pure(e, &format!("{field}[{i}]"))).collect::<Result<_, _>>()?,
        ),
        Mode::Mixed => StateSet::Mixed(
            entries.iter().enumerate().map(|(i, e)| parse_mixed(e, &format!("{field}[{i}]"))).collect::<Result<_, _>>()?,
        ),
    })
}

fn state_entries(set: &StateSet) -> Vec<StateEntry> {
    match set {
        StateSet::Pure(s) => s.iter().map(|p| StateEntry::Vector(p.amplitudes().iter().map(pair).collect())).collect(),
        StateSet::Mixed(s) => s.iter().map(|r| StateEntry::Matrix(matrix_to_rows(r.matrix()))).collect(),
    }
}

/// A parsed instance file.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedInstance {
    pub instance: SeparationInstance,
    /// Single-copy states when the file has a cloning block.
    pub single_copy: StateSet,
    pub cloning: Option<CloningBlock>,
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self, FileError> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| FileError::Parse(e.to_string()))?;
        if file.version != FORMAT_VERSION {
            return Err(FileError::Parse(format!(
                "version: unsupported version {} (expected {FORMAT_VERSION})",
                file.version
            )));
        }
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance files always serialize")
    }

    pub fn from_instance(instance: &SeparationInstance) -> Self {
        let mode = if instance.is_pure() { Mode::Pure } else { Mode::Mixed };
        let as_mode = |set: &StateSet| match (mode, set) {
            (Mode::Mixed, StateSet::Pure(_)) => state_entries(&StateSet::Mixed(set.densities())),
            _ => state_entries(set),
        };
        InstanceFile {
            version: FORMAT_VERSION,
            mode,
            states: as_mode(instance.inputs()),
            targets: Some(as_mode(instance.targets())),
            priors: Some(instance.priors().as_slice().to_vec()),
            cloning: None,
        }
    }

    /// Validates and builds the instance; missing priors default to uniform.
    pub fn load(&self) -> Result<LoadedInstance, FileError> {
        if self.states.is_empty() {
            return Err(invariant("states", Error::Empty));
        }
        let single_copy = parse_set(self.mode, &self.states, "states")?;
        let (inputs, targets) = match (&self.targets, self.cloning) {
            (Some(t), _) => (single_copy.clone(), parse_set(self.mode, t, "targets")?),
            (None, Some(block)) => {
                if block.m == 0 || block.m > block.n {
                    return Err(invariant(
                        "cloning",
                        Error::InvalidArgument(format!("need 1 ≤ M ≤ N, got M={}, N={}", block.m, block.n)),
                    ));
                }
                let inputs = single_copy.tensor_power(block.m).map_err(|e| invariant("cloning", e))?;
                let targets = single_copy.tensor_power(block.n).map_err(|e| invariant("cloning", e))?;
                (inputs, targets)
            }
            (None, None) => return Err(FileError::Parse("targets: missing (required without a cloning block)".into())),
        };
        let priors = match &self.priors {
            Some(p) => PriorVector::new(p.clone()).map_err(|e| invariant("priors", e))?,
            None => PriorVector::uniform(self.states.len()).map_err(|e| invariant("priors", e))?,
        };
        let instance = SeparationInstance::new(inputs, targets, priors).map_err(|e| invariant("instance", e))?;
        Ok(LoadedInstance { instance, single_copy, cloning: self.cloning })
    }
}

/// On-disk Kraus channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub version: u32,
    pub input_dim: usize,
    pub output_dim: usize,
    pub success_ops: Vec<Vec<Vec<ComplexPair>>>,
    pub failure_ops: Vec<Vec<Vec<ComplexPair>>>,
}

impl ChannelFile {
    pub fn from_channel(ch: &KrausChannel) -> Self {
        ChannelFile {
            version: FORMAT_VERSION,
            input_dim: ch.input_dim(),
            output_dim: ch.output_dim(),
            success_ops: ch.success_ops().iter().map(matrix_to_rows).collect(),
            failure_ops: ch.failure_ops().iter().map(matrix_to_rows).collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, FileError> {
        let file: ChannelFile = serde_json::from_str(text).map_err(|e| FileError::Parse(e.to_string()))?;
        if file.version != FORMAT_VERSION {
            return Err(FileError::Parse(format!("version: unsupported version {}", file.version)));
        }
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("channel files always serialize")
    }

    pub fn to_channel(&self) -> Result<KrausChannel, FileError> {
        let convert = |ops: &[Vec<Vec<ComplexPair>>], name: &str| -> Result<Vec<ComplexMatrix>, FileError> {
            ops.iter()
                .enumerate()
                .map(|(k, rows)| {
                    let field = format!("{name}[{k}]");
                    let m = rows_to_matrix(rows, &field)?;
                    if m.shape() != (self.output_dim, self.input_dim) {
                        return Err(invariant(
                            field,
                            Error::DimensionMismatch {
                                expected: self.output_dim * self.input_dim,
                                found: m.nrows() * m.ncols(),
                            },
                        ));
                    }
                    Ok(m)
                })
                .collect()
        };
        let success = convert(&self.success_ops, "success_ops")?;
        let failure = convert(&self.failure_ops, "failure_ops")?;
        KrausChannel::new(success, failure).map_err(|e| invariant("channel", e))
    }
}

/// Result of the `feasibility` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityResult {
    pub mode: Mode,
    pub n: usize,
    /// Largest `γ` with `Γ = γI` certified (pure mode).
    pub uniform_gamma: Option<f64>,
    /// Certificate found by the prior-weighted search (pure mode).
    pub search_certificate: Option<FeasibilityCertificate>,
    /// Per-state rates of discriminating first and preparing the target after.
    pub discriminate_then_prepare: Option<Vec<f64>>,
    pub separability: SeparabilityReport,
    pub equivalence: EquivalenceReport,
    pub dependency: DependencyVerdict,
    pub feasible: bool,
}

/// Result of the `construct` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructResult {
    pub gamma: Vec<f64>,
    pub isometry_defect: f64,
    pub verification: VerificationReport,
    pub base_bound: Option<f64>,
    pub channel_path: Option<String>,
}

/// Result of the `bounds` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsResult {
    pub report: BoundReport,
    /// Comparison names to display, in output order.
    pub compare: Vec<String>,
}

/// Result of the `gen` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenResult {
    pub spec: EnsembleSpec,
    pub target_dim: usize,
    pub instance_path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RunResults {
    Feasibility(FeasibilityResult),
    Construct(ConstructResult),
    Bounds(BoundsResult),
    Verify(VerificationReport),
    Gen(GenResult),
}

/// Machine-readable record of one command run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    /// SHA-256 of the instance file bytes.
    pub input_digest: Option<String>,
    pub results: Option<RunResults>,
    pub warnings: Vec<String>,
    pub exit_status: i32,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, FileError> {
        serde_json::from_str(text).map_err(|e| FileError::Parse(e.to_string()))
    }
}

pub fn digest(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(bytes))
}
