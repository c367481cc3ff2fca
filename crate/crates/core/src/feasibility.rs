//! Realizability of separations.
//!
//! For pure states a separation `|ψ_i⟩ → |ψ'_i⟩` with success rates `γ_i`
//! exists when `X - √Γ X' √Γ ⪰ 0`, where `X` and `X'` are the input and target
//! Gram matrices. For arbitrary (mixed) families, every separation is possible
//! exactly when no state's support is covered by the others.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::PriorVector;
use crate::error::{Error, Result};
use crate::qmat::{
    self, c, gram_matrix, hermitian_eigen, is_psd, set_support_basis, set_support_rank, ComplexMatrix,
    DensityMatrix, GramMatrix, PureState, DEFAULT_PSD_TOL,
};

/// Default bisection precision on success probabilities.
pub const DEFAULT_PRECISION: f64 = 1e-8;

/// A family of states, all of one kind and one dimension.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSet {
    Pure(Vec<PureState>),
    Mixed(Vec<DensityMatrix>),
}

impl StateSet {
    pub fn len(&self) -> usize {
        match self {
            StateSet::Pure(s) => s.len(),
            StateSet::Mixed(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_pure(&self) -> bool {
        matches!(self, StateSet::Pure(_))
    }

    pub fn dim(&self) -> usize {
        match self {
            StateSet::Pure(s) => s.first().map_or(0, PureState::dim),
            StateSet::Mixed(s) => s.first().map_or(0, DensityMatrix::dim),
        }
    }

    pub fn pure(&self) -> Option<&[PureState]> {
        match self {
            StateSet::Pure(s) => Some(s),
            StateSet::Mixed(_) => None,
        }
    }

    pub fn densities(&self) -> Vec<DensityMatrix> {
        match self {
            StateSet::Pure(s) => s.iter().map(PureState::density).collect(),
            StateSet::Mixed(s) => s.clone(),
        }
    }

    /// Fidelity between members `i` and `j`; exact overlap moduli for pure sets.
    pub fn fidelity(&self, i: usize, j: usize) -> Result<f64> {
        match self {
            StateSet::Pure(s) => qmat::pure_fidelity(&s[i], &s[j]),
            StateSet::Mixed(s) => qmat::fidelity(&s[i], &s[j]),
        }
    }

    /// Symmetric matrix of pairwise fidelities with unit diagonal.
    pub fn fidelity_table(&self) -> Result<Vec<Vec<f64>>> {
        let n = self.len();
        let mut table = vec![vec![1.0; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let f = self.fidelity(i, j)?;
                table[i][j] = f;
                table[j][i] = f;
            }
        }
        Ok(table)
    }

    pub fn gram(&self) -> Result<GramMatrix> {
        match self {
            StateSet::Pure(s) => gram_matrix(s),
            StateSet::Mixed(_) => Err(Error::MixedStatesUnsupported),
        }
    }

    /// Each member raised to `copies` tensor factors.
    pub fn tensor_power(&self, copies: usize) -> Result<StateSet> {
        Ok(match self {
            StateSet::Pure(s) => StateSet::Pure(s.iter().map(|p| p.tensor_power(copies)).collect::<Result<_>>()?),
            StateSet::Mixed(s) => {
                StateSet::Mixed(s.iter().map(|r| qmat::tensor_power(r, copies)).collect::<Result<_>>()?)
            }
        })
    }

    fn check_uniform_dim(&self) -> Result<()> {
        let d = self.dim();
        let bad = match self {
            StateSet::Pure(s) => s.iter().map(PureState::dim).find(|&x| x != d),
            StateSet::Mixed(s) => s.iter().map(DensityMatrix::dim).find(|&x| x != d),
        };
        match bad {
            Some(found) => Err(Error::DimensionMismatch { expected: d, found }),
            None => Ok(()),
        }
    }
}

/// Inputs, targets and priors of one separation task.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationInstance {
    inputs: StateSet,
    targets: StateSet,
    priors: PriorVector,
}

impl SeparationInstance {
    pub fn new(inputs: StateSet, targets: StateSet, priors: PriorVector) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::Empty);
        }
        if targets.len() != inputs.len() {
            return Err(Error::DimensionMismatch { expected: inputs.len(), found: targets.len() });
        }
        if priors.len() != inputs.len() {
            return Err(Error::InvalidPriors(format!(
                "{} priors for {} states",
                priors.len(),
                inputs.len()
            )));
        }
        inputs.check_uniform_dim()?;
        targets.check_uniform_dim()?;
        Ok(Self { inputs, targets, priors })
    }

    pub fn with_uniform_priors(inputs: StateSet, targets: StateSet) -> Result<Self> {
        let n = inputs.len();
        Self::new(inputs, targets, PriorVector::uniform(n)?)
    }

    /// Pure-state convenience constructor.
    pub fn pure(inputs: Vec<PureState>, targets: Vec<PureState>, priors: PriorVector) -> Result<Self> {
        Self::new(StateSet::Pure(inputs), StateSet::Pure(targets), priors)
    }

    pub fn n(&self) -> usize {
        self.inputs.len()
    }

    pub fn inputs(&self) -> &StateSet {
        &self.inputs
    }

    pub fn targets(&self) -> &StateSet {
        &self.targets
    }

    pub fn priors(&self) -> &PriorVector {
        &self.priors
    }

    pub fn is_pure(&self) -> bool {
        self.inputs.is_pure() && self.targets.is_pure()
    }

    /// `(X, X')` for a pure instance.
    pub fn grams(&self) -> Result<(GramMatrix, GramMatrix)> {
        Ok((self.inputs.gram()?, self.targets.gram()?))
    }
}

/// Per-state success probabilities `γ_i ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SuccessVector(Vec<f64>);

impl SuccessVector {
    pub fn new(gammas: Vec<f64>) -> Result<Self> {
        for (index, &value) in gammas.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidGamma { index, value });
            }
        }
        Ok(Self(gammas))
    }

    pub fn uniform(n: usize, gamma: f64) -> Result<Self> {
        Self::new(vec![gamma; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// `Σ η_i γ_i`.
    pub fn objective(&self, priors: &[f64]) -> f64 {
        self.0.iter().zip(priors).map(|(g, e)| g * e).sum()
    }

    pub fn is_positive_definite(&self) -> bool {
        self.0.iter().all(|&g| g > 0.0)
    }
}

/// Outcome of testing `X - √Γ X' √Γ ⪰ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityCertificate {
    pub gamma: SuccessVector,
    pub residual_min_eigenvalue: f64,
    pub feasible: bool,
    /// Some `γ_i` is zero, so the certificate does not cover every state.
    pub degenerate: bool,
}

fn check_sizes(x: &GramMatrix, xp: &GramMatrix, n: usize) -> Result<()> {
    if x.size() != xp.size() {
        return Err(Error::DimensionMismatch { expected: x.size(), found: xp.size() });
    }
    if n != x.size() {
        return Err(Error::DimensionMismatch { expected: x.size(), found: n });
    }
    Ok(())
}

fn residual_from_roots(x: &GramMatrix, xp: &GramMatrix, roots: &[f64]) -> ComplexMatrix {
    let n = x.size();
    ComplexMatrix::from_fn(n, n, |i, j| x.matrix()[(i, j)] - xp.matrix()[(i, j)] * (roots[i] * roots[j]))
}

/// `R_ij = X_ij - √(γ_i γ_j) X'_ij`.
pub fn residual_matrix(x: &GramMatrix, xp: &GramMatrix, gamma: &SuccessVector) -> Result<ComplexMatrix> {
    check_sizes(x, xp, gamma.len())?;
    let roots: Vec<f64> = gamma.as_slice().iter().map(|g| g.sqrt()).collect();
    Ok(residual_from_roots(x, xp, &roots))
}

/// Tests the Gram certificate for `gamma`.
pub fn check_certificate(
    x: &GramMatrix,
    xp: &GramMatrix,
    gamma: &SuccessVector,
    tol: f64,
) -> Result<FeasibilityCertificate> {
    let residual = residual_matrix(x, xp, gamma)?;
    let check = is_psd(&residual, tol)?;
    Ok(FeasibilityCertificate {
        gamma: gamma.clone(),
        residual_min_eigenvalue: check.min_eigenvalue,
        feasible: check.psd,
        degenerate: !gamma.is_positive_definite(),
    })
}

/// Largest `γ ∈ [0, 1]` with `X - γ X' ⪰ 0`, by bisection.
///
/// Feasibility is monotone in `γ` because `X'` is PSD, so the feasible values
/// form an interval `[0, γ*]`. The returned value is the feasible end of the
/// final bracket.
pub fn max_uniform_gamma(x: &GramMatrix, xp: &GramMatrix, precision: f64) -> Result<f64> {
    check_sizes(x, xp, xp.size())?;
    if x.size() == 1 {
        return Ok(1.0);
    }
    let feasible = |g: f64| -> Result<bool> {
        let r = residual_from_roots(x, xp, &vec![g.sqrt(); x.size()]);
        Ok(is_psd(&r, DEFAULT_PSD_TOL)?.psd)
    };
    if feasible(1.0)? {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > precision {
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Search budget for [`optimize_gamma`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaSearch {
    /// Random ray directions tried in addition to the uniform and grid starts.
    pub starts: usize,
    /// Pattern-search passes per start.
    pub sweeps: usize,
    pub precision: f64,
    pub tol: f64,
}

impl Default for GammaSearch {
    fn default() -> Self {
        Self { starts: 200, sweeps: 50, precision: DEFAULT_PRECISION, tol: DEFAULT_PSD_TOL }
    }
}

/// Feasible region in `t = √γ` coordinates. It is convex and contains the
/// origin, since `α†X α ≥ ‖Σ t_j α_j φ_j‖²` is a norm bound affine in `t`.
struct Landscape<'a> {
    x: &'a GramMatrix,
    xp: &'a GramMatrix,
    priors: &'a [f64],
    search: GammaSearch,
    /// `X^{-1/2}` when `X` is well conditioned.
    whitener: Option<ComplexMatrix>,
}

impl<'a> Landscape<'a> {
    fn new(x: &'a GramMatrix, xp: &'a GramMatrix, priors: &'a [f64], search: GammaSearch) -> Result<Self> {
        let spec = hermitian_eigen(x.matrix(), DEFAULT_PSD_TOL)?;
        let whitener = (spec.min() > 1e-8 * spec.max()).then(|| spec.map(|l| 1.0 / l.sqrt()));
        Ok(Self { x, xp, priors, search, whitener })
    }

    fn feasible(&self, t: &[f64]) -> bool {
        is_psd(&residual_from_roots(self.x, self.xp, t), self.search.tol).is_ok_and(|c| c.psd)
    }

    fn objective(&self, t: &[f64]) -> f64 {
        t.iter().zip(self.priors).map(|(ti, e)| e * ti * ti).sum()
    }

    /// Largest `λ` with `λu` feasible and inside the unit box.
    fn ray_length(&self, u: &[f64]) -> f64 {
        let cap = 1.0 / u.iter().cloned().fold(0.0, f64::max);
        let scaled = |l: f64| -> Vec<f64> { u.iter().map(|v| v * l).collect() };
        if let Some(w) = &self.whitener {
            let n = u.len();
            let b = ComplexMatrix::from_fn(n, n, |i, j| self.xp.matrix()[(i, j)] * (u[i] * u[j]));
            if let Ok(spec) = hermitian_eigen(&(w * b * w), 1e-6) {
                let mu = spec.max();
                let guess = if mu <= 0.0 { cap } else { cap.min(1.0 / mu.sqrt()) };
                for shrink in [1.0, 1.0 - 1e-12, 1.0 - 1e-9] {
                    if self.feasible(&scaled(guess * shrink)) {
                        return guess * shrink;
                    }
                }
            }
        }
        if self.feasible(&scaled(cap)) {
            return cap;
        }
        let (mut lo, mut hi) = (0.0, cap);
        while hi - lo > self.search.precision {
            let mid = 0.5 * (lo + hi);
            if self.feasible(&scaled(mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    fn ray_point(&self, u: &[f64]) -> (Vec<f64>, f64) {
        let l = self.ray_length(u);
        let t: Vec<f64> = u.iter().map(|v| (v * l).min(1.0)).collect();
        let f = self.objective(&t);
        (t, f)
    }

    /// Pattern search over ray directions followed by coordinate ascent.
    fn climb(&self, start: Vec<f64>) -> (Vec<f64>, f64) {
        let n = start.len();
        let mut u = normalize(start);
        let (mut t, mut best) = self.ray_point(&u);
        let mut step = 0.25;
        for _ in 0..self.search.sweeps {
            if step < self.search.precision {
                break;
            }
            let mut improved = false;
            for i in 0..n {
                for sign in [1.0, -1.0] {
                    let mut cand = u.clone();
                    cand[i] = (cand[i] + sign * step).max(0.0);
                    if cand.iter().all(|&v| v == 0.0) {
                        continue;
                    }
                    let cand = normalize(cand);
                    let (ct, cf) = self.ray_point(&cand);
                    if cf > best + 1e-15 {
                        u = cand;
                        t = ct;
                        best = cf;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        self.coordinate_ascent(&mut t);
        let f = self.objective(&t);
        (t, f)
    }

    /// Raises each `t_i` to the edge of its (interval-shaped) feasible slice.
    fn coordinate_ascent(&self, t: &mut [f64]) {
        for _ in 0..self.search.sweeps.max(1) {
            let mut moved = false;
            for i in 0..t.len() {
                let current = t[i];
                if current >= 1.0 {
                    continue;
                }
                let mut probe = t.to_vec();
                probe[i] = 1.0;
                let top = if self.feasible(&probe) {
                    1.0
                } else {
                    let (mut lo, mut hi) = (current, 1.0);
                    while hi - lo > self.search.precision {
                        let mid = 0.5 * (lo + hi);
                        probe[i] = mid;
                        if self.feasible(&probe) {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    lo
                };
                if top > current + self.search.precision {
                    moved = true;
                }
                t[i] = top;
            }
            if !moved {
                break;
            }
        }
    }

    /// Best feasible point of a coarse `γ` grid (n ≤ 3 only).
    fn grid_start(&self) -> Option<Vec<f64>> {
        let n = self.x.size();
        let steps = match n {
            2 => 100,
            3 => 20,
            _ => return None,
        };
        let mut best: Option<(f64, Vec<f64>)> = None;
        let mut idx = vec![0usize; n];
        loop {
            let t: Vec<f64> = idx.iter().map(|&k| (k as f64 / steps as f64).sqrt()).collect();
            if self.feasible(&t) {
                let f = self.objective(&t);
                if best.as_ref().is_none_or(|(b, _)| f > *b) {
                    best = Some((f, t));
                }
            }
            let mut pos = 0;
            loop {
                if pos == n {
                    return best.map(|(_, t)| t).filter(|t| t.iter().any(|&v| v > 0.0));
                }
                idx[pos] += 1;
                if idx[pos] <= steps {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }
}

fn normalize(u: Vec<f64>) -> Vec<f64> {
    let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    u.into_iter().map(|v| v / norm).collect()
}

/// Searches for a certificate maximizing `Σ η_i γ_i`.
///
/// Starts are the uniform direction, the best point of a coarse grid when
/// `n ≤ 3`, and `search.starts` seeded random directions. Each start runs a
/// pattern search over ray directions and finishes with coordinate ascent.
/// The first best objective wins, so the result depends only on `seed`.
pub fn optimize_gamma(
    x: &GramMatrix,
    xp: &GramMatrix,
    priors: &PriorVector,
    search: &GammaSearch,
    seed: u64,
) -> Result<SuccessVector> {
    let n = x.size();
    check_sizes(x, xp, priors.len())?;
    if n == 1 {
        return SuccessVector::uniform(1, 1.0);
    }
    let uniform = max_uniform_gamma(x, xp, search.precision)?;
    let fallback = SuccessVector::uniform(n, uniform)?;

    let land = Landscape::new(x, xp, priors.as_slice(), *search)?;
    let mut starts = vec![vec![1.0; n]];
    if let Some(g) = land.grid_start() {
        starts.push(g);
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    for _ in 0..search.starts {
        let u: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 1e-3).collect();
        starts.push(u);
    }

    let mut best_t = vec![uniform.sqrt(); n];
    let mut best_f = land.objective(&best_t);
    for start in starts {
        let (t, f) = land.climb(start);
        if f > best_f + 1e-14 {
            best_t = t;
            best_f = f;
        }
    }
    let candidate = SuccessVector::new(best_t.iter().map(|t| (t * t).clamp(0.0, 1.0)).collect())?;
    if check_certificate(x, xp, &candidate, search.tol)?.feasible {
        Ok(candidate)
    } else {
        Ok(fallback)
    }
}

/// Support-based separability of each state in a family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparabilityReport {
    /// `per_index[i]` is true iff removing state `i` shrinks the joint support.
    pub per_index: Vec<bool>,
    pub overall: bool,
}

/// Index `i` passes iff `supp(S) ≠ supp(S \ {ρ_i})`, compared via ranks since
/// the second support is contained in the first.
pub fn universal_separability(states: &[DensityMatrix], tol: f64) -> Result<SeparabilityReport> {
    let full = set_support_rank(states, tol)?;
    let per_index = (0..states.len())
        .map(|i| {
            let rest: Vec<DensityMatrix> =
                states.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, s)| s.clone()).collect();
            let reduced = if rest.is_empty() { 0 } else { set_support_rank(&rest, tol)? };
            Ok(full != reduced)
        })
        .collect::<Result<Vec<bool>>>()?;
    let overall = per_index.iter().all(|&b| b);
    Ok(SeparabilityReport { per_index, overall })
}

/// The three equivalent capabilities of a state family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub ud_possible: bool,
    pub cloning_possible: bool,
    pub any_separation_possible: bool,
}

pub fn equivalence_report(states: &[DensityMatrix], tol: f64) -> Result<EquivalenceReport> {
    let overall = universal_separability(states, tol)?.overall;
    Ok(EquivalenceReport { ud_possible: overall, cloning_possible: overall, any_separation_possible: overall })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DependencyVerdict {
    /// Dependent inputs cannot reach independent targets.
    Forbidden,
    NotExcluded,
}

/// Linear dependence must survive any separation of pure states.
pub fn dependency_propagation_check(instance: &SeparationInstance, tol: f64) -> Result<DependencyVerdict> {
    let inputs = instance.inputs().pure().ok_or(Error::MixedStatesUnsupported)?;
    let targets = instance.targets().pure().ok_or(Error::MixedStatesUnsupported)?;
    let forbidden = !qmat::linear_independence(inputs, tol)? && qmat::linear_independence(targets, tol)?;
    Ok(if forbidden { DependencyVerdict::Forbidden } else { DependencyVerdict::NotExcluded })
}

/// Support form of the same rule, valid for mixed families: if state `i` is
/// not separable from the others on the input side, it cannot become separable
/// on the target side.
pub fn support_propagation_check(instance: &SeparationInstance, tol: f64) -> Result<DependencyVerdict> {
    let inputs = universal_separability(&instance.inputs().densities(), tol)?;
    let targets = universal_separability(&instance.targets().densities(), tol)?;
    let forbidden = inputs.per_index.iter().zip(&targets.per_index).any(|(&inp, &tgt)| !inp && tgt);
    Ok(if forbidden { DependencyVerdict::Forbidden } else { DependencyVerdict::NotExcluded })
}

/// Success rates of the discriminate-then-prepare protocol, or `None` when
/// some state is not separable.
///
/// State `i` is flagged by `c·Π_i`, where `Π_i` projects onto the orthogonal
/// complement of the other states' joint support and `c = 1/λ_max(Σ Π_i)`
/// keeps the POVM complete. The rate is `c·Tr(Π_i ρ_i)`.
pub fn discriminate_then_prepare_rates(states: &[DensityMatrix], tol: f64) -> Result<Option<Vec<f64>>> {
    if !universal_separability(states, tol)?.overall {
        return Ok(None);
    }
    let d = states[0].dim();
    let identity = ComplexMatrix::identity(d, d);
    let mut projectors = Vec::with_capacity(states.len());
    for i in 0..states.len() {
        let rest: Vec<DensityMatrix> =
            states.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, s)| s.clone()).collect();
        let p = if rest.is_empty() {
            identity.clone()
        } else {
            let basis = set_support_basis(&rest, tol)?;
            &identity - &basis * basis.adjoint()
        };
        projectors.push(p);
    }
    let total = projectors.iter().fold(ComplexMatrix::zeros(d, d), |acc, p| acc + p);
    let scale = hermitian_eigen(&total, DEFAULT_PSD_TOL)?.max();
    let rates = projectors
        .iter()
        .zip(states)
        .map(|(p, rho)| ((p * rho.matrix()).trace().re / scale).clamp(0.0, 1.0))
        .collect();
    Ok(Some(rates))
}

/// Gram matrix `[[1, s], [s, 1]]` of two states with real overlap `s`.
pub fn overlap_gram(s: f64) -> GramMatrix {
    let mut m = ComplexMatrix::identity(2, 2);
    m[(0, 1)] = c(s, 0.0);
    m[(1, 0)] = c(s, 0.0);
    GramMatrix::new(m).expect("|s| ≤ 1 gives a valid Gram matrix")
}
