//! Seeded instance generators and brute-force baselines.
//!
//! Randomness comes from ChaCha20 (`rand_chacha::ChaCha20Rng::seed_from_u64`).
//! A uniform double is `(next_u64() >> 11) · 2⁻⁵³`; standard normals are drawn
//! in pairs by the Box–Muller transform `√(-2 ln(1-u₁))·(cos 2πu₂, sin 2πu₂)`.
//! Complex Gaussians take their real part from the first normal of a pair and
//! their imaginary part from the second. Haar-random pure states are the first
//! column of the Q factor of a `d × 1` complex Gaussian matrix with the R
//! diagonal made positive, i.e. the normalized Gaussian vector.

use std::f64::consts::PI;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::PriorVector;
use crate::construction::{apply_channel, KrausChannel};
use crate::error::{Error, Result};
use crate::feasibility::{SeparationInstance, StateSet};
use crate::qmat::{c, is_psd, ComplexMatrix, ComplexVector, DensityMatrix, GramMatrix, PureState, DEFAULT_PSD_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    Pure,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorMode {
    Uniform,
    Random,
}

/// Parameters of a random ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub n: usize,
    pub dim: usize,
    pub kind: StateKind,
    pub seed: u64,
    pub prior_mode: PriorMode,
}

impl EnsembleSpec {
    pub fn pure(n: usize, dim: usize, seed: u64) -> Self {
        Self { n, dim, kind: StateKind::Pure, seed, prior_mode: PriorMode::Uniform }
    }

    pub fn mixed(n: usize, dim: usize, seed: u64) -> Self {
        Self { n, dim, kind: StateKind::Mixed, seed, prior_mode: PriorMode::Uniform }
    }

    pub fn with_priors(mut self, prior_mode: PriorMode) -> Self {
        self.prior_mode = prior_mode;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 || self.dim < 2 {
            return Err(Error::InvalidArgument(format!(
                "ensembles need n ≥ 2 and dim ≥ 2, got n={}, dim={}",
                self.n, self.dim
            )));
        }
        Ok(())
    }
}

/// The documented sampling stream.
pub struct GaussianStream {
    rng: ChaCha20Rng,
    spare: Option<f64>,
}

impl GaussianStream {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha20Rng::seed_from_u64(seed), spare: None }
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn normal_pair(&mut self) -> (f64, f64) {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * PI * u2;
        (r * theta.cos(), r * theta.sin())
    }

    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let (a, b) = self.normal_pair();
        self.spare = Some(b);
        a
    }

    pub fn complex_normal(&mut self) -> num_complex::Complex64 {
        let re = self.normal();
        let im = self.normal();
        c(re, im)
    }

    pub fn gaussian_matrix(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        // Row-major draw order.
        let entries: Vec<_> = (0..rows * cols).map(|_| self.complex_normal()).collect();
        ComplexMatrix::from_row_slice(rows, cols, &entries)
    }

    pub fn haar_state(&mut self, dim: usize) -> PureState {
        let v = ComplexVector::from_iterator(dim, (0..dim).map(|_| self.complex_normal()));
        PureState::normalized(v).expect("a Gaussian vector is nonzero with probability 1")
    }

    /// `G G† / Tr(G G†)` for a square complex Gaussian `G`.
    pub fn density(&mut self, dim: usize) -> DensityMatrix {
        let g = self.gaussian_matrix(dim, dim);
        DensityMatrix::from_unnormalized(&g * g.adjoint()).expect("G G† is PSD with positive trace")
    }

    /// Flat Dirichlet draw via normalized exponentials.
    pub fn simplex(&mut self, n: usize) -> Vec<f64> {
        let raw: Vec<f64> = (0..n).map(|_| -(1.0 - self.uniform()).ln()).collect();
        let sum: f64 = raw.iter().sum();
        raw.into_iter().map(|x| x / sum).collect()
    }
}

fn draw_priors(stream: &mut GaussianStream, n: usize, mode: PriorMode) -> Result<PriorVector> {
    match mode {
        PriorMode::Uniform => PriorVector::uniform(n),
        PriorMode::Random => {
            let mut p = stream.simplex(n);
            // Keep the sum at 1 to the last bit.
            let head: f64 = p[..n - 1].iter().sum();
            p[n - 1] = (1.0 - head).max(0.0);
            PriorVector::new(p)
        }
    }
}

pub fn random_pure_ensemble(spec: &EnsembleSpec) -> Result<(Vec<PureState>, PriorVector)> {
    spec.validate()?;
    if spec.kind != StateKind::Pure {
        return Err(Error::InvalidArgument("random_pure_ensemble needs kind = pure".into()));
    }
    let mut stream = GaussianStream::new(spec.seed);
    let states = (0..spec.n).map(|_| stream.haar_state(spec.dim)).collect();
    let priors = draw_priors(&mut stream, spec.n, spec.prior_mode)?;
    Ok((states, priors))
}

pub fn random_density_ensemble(spec: &EnsembleSpec) -> Result<(Vec<DensityMatrix>, PriorVector)> {
    spec.validate()?;
    if spec.kind != StateKind::Mixed {
        return Err(Error::InvalidArgument("random_density_ensemble needs kind = mixed".into()));
    }
    let mut stream = GaussianStream::new(spec.seed);
    let states = (0..spec.n).map(|_| stream.density(spec.dim)).collect();
    let priors = draw_priors(&mut stream, spec.n, spec.prior_mode)?;
    Ok((states, priors))
}

/// Random inputs of `spec` plus independently drawn targets of the same kind
/// in `target_dim` (seeded by `spec.seed` with the bits inverted).
pub fn random_instance(spec: &EnsembleSpec, target_dim: usize) -> Result<SeparationInstance> {
    let target_spec = EnsembleSpec { dim: target_dim, seed: !spec.seed, prior_mode: PriorMode::Uniform, ..*spec };
    match spec.kind {
        StateKind::Pure => {
            let (inputs, priors) = random_pure_ensemble(spec)?;
            let (targets, _) = random_pure_ensemble(&target_spec)?;
            SeparationInstance::pure(inputs, targets, priors)
        }
        StateKind::Mixed => {
            let (inputs, priors) = random_density_ensemble(spec)?;
            let (targets, _) = random_density_ensemble(&target_spec)?;
            SeparationInstance::new(StateSet::Mixed(inputs), StateSet::Mixed(targets), priors)
        }
    }
}

/// Best grid points found by exhaustive scanning.
#[derive(Debug, Clone, PartialEq)]
pub struct GridOptimum {
    /// Largest feasible `γ` on the grid with `Γ = γI`.
    pub uniform: f64,
    /// Grid maximizer of `Σ η_i γ_i` over general diagonal `Γ` (n ≤ 3 only).
    pub general: Option<Vec<f64>>,
}

const GRID_POINT_CAP: u64 = 20_000_000;

/// Scans `γ ∈ {0, h, 2h, …, 1}` with `is_psd` at every point. The general scan
/// runs for `n ≤ 3` when the grid has at most 2·10⁷ points; larger requests
/// return [`Error::GridTooLarge`]. Pass `priors = None` to skip it.
pub fn grid_gamma_oracle(
    x: &GramMatrix,
    xp: &GramMatrix,
    priors: Option<&PriorVector>,
    resolution: f64,
) -> Result<GridOptimum> {
    if !(1e-4..=1.0).contains(&resolution) {
        return Err(Error::InvalidArgument(format!("resolution {resolution} outside [1e-4, 1]")));
    }
    let n = x.size();
    if xp.size() != n {
        return Err(Error::DimensionMismatch { expected: n, found: xp.size() });
    }
    let steps = (1.0 / resolution).round() as u64;
    let feasible = |gammas: &[f64]| -> bool {
        let m = ComplexMatrix::from_fn(n, n, |i, j| {
            x.matrix()[(i, j)] - xp.matrix()[(i, j)] * (gammas[i] * gammas[j]).sqrt()
        });
        is_psd(&m, DEFAULT_PSD_TOL).is_ok_and(|p| p.psd)
    };

    let mut uniform = 0.0;
    for k in 0..=steps {
        let g = k as f64 / steps as f64;
        if feasible(&vec![g; n]) {
            uniform = g;
        }
    }

    let general = match priors {
        None => None,
        Some(p) => {
            if n > 3 {
                return Err(Error::GridTooLarge(format!("general grid needs n ≤ 3, got {n}")));
            }
            let points = (steps + 1).pow(n as u32);
            if points > GRID_POINT_CAP {
                return Err(Error::GridTooLarge(format!("{points} grid points")));
            }
            let eta = p.as_slice();
            let mut best: Option<(f64, Vec<f64>)> = None;
            let mut idx = vec![0u64; n];
            'scan: loop {
                let g: Vec<f64> = idx.iter().map(|&k| k as f64 / steps as f64).collect();
                let obj: f64 = g.iter().zip(eta).map(|(a, b)| a * b).sum();
                if best.as_ref().is_none_or(|(b, _)| obj > *b) && feasible(&g) {
                    best = Some((obj, g));
                }
                for pos in 0..n {
                    idx[pos] += 1;
                    if idx[pos] <= steps {
                        continue 'scan;
                    }
                    idx[pos] = 0;
                }
                break;
            }
            best.map(|(_, g)| g)
        }
    };
    Ok(GridOptimum { uniform, general })
}

/// Empirical branch statistics of a channel on one input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleReport {
    pub shots: u64,
    pub counts: Vec<u64>,
    pub frequencies: Vec<f64>,
    pub expected: Vec<f64>,
    /// `|freq - p| / √(p(1-p)/shots)` per branch (0 when `p ∈ {0, 1}` and the
    /// frequency matches exactly).
    pub sigma_deviation: Vec<f64>,
    /// Branches beyond four standard deviations.
    pub flagged: Vec<usize>,
}

impl SampleReport {
    pub fn within_tolerance(&self) -> bool {
        self.flagged.is_empty()
    }
}

/// Draws `shots` branch indices from the exact branch distribution of
/// `apply_channel(ch, rho)` using the documented uniform stream.
pub fn sampled_channel_check(ch: &KrausChannel, rho: &DensityMatrix, shots: u64, seed: u64) -> Result<SampleReport> {
    if shots == 0 {
        return Err(Error::InvalidArgument("at least one shot is required".into()));
    }
    let expected: Vec<f64> = apply_channel(ch, rho)?.iter().map(|o| o.probability).collect();
    let total: f64 = expected.iter().sum();
    let mut cumulative = Vec::with_capacity(expected.len());
    let mut acc = 0.0;
    for p in &expected {
        acc += p / total;
        cumulative.push(acc);
    }
    let mut stream = GaussianStream::new(seed);
    let mut counts = vec![0u64; expected.len()];
    for _ in 0..shots {
        let u = stream.uniform();
        let k = cumulative.iter().position(|&cu| u < cu).unwrap_or(expected.len() - 1);
        counts[k] += 1;
    }
    let frequencies: Vec<f64> = counts.iter().map(|&k| k as f64 / shots as f64).collect();
    let sigma_deviation: Vec<f64> = frequencies
        .iter()
        .zip(&expected)
        .map(|(&f, &p)| {
            let sd = (p * (1.0 - p) / shots as f64).sqrt();
            let diff = (f - p).abs();
            if sd > 0.0 {
                diff / sd
            } else if diff < 1e-12 {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .collect();
    let flagged = sigma_deviation.iter().enumerate().filter(|(_, &z)| z > 4.0).map(|(k, _)| k).collect();
    Ok(SampleReport { shots, counts, frequencies, expected, sigma_deviation, flagged })
}
