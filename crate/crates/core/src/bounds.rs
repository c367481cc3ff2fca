//! Lower bounds on the average failure probability of a separation.
//!
//! For a pair `(i, j)` whose target fidelity does not exceed its input
//! fidelity, any separation has `Σ_k √(f_ik f_jk) ≥ (F - F')/(1 - F')`. Summing
//! these pair terms and nesting Cauchy–Schwarz steps gives a hierarchy
//! `P_f^(0) ≤ P_f^(1) ≤ …` of valid bounds. The module also evaluates the
//! classical comparison bounds on the same instance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feasibility::{SeparationInstance, StateSet};
use crate::qmat::{pure_fidelity, PureState};

/// Default depth of the nested bound series.
pub const DEFAULT_DEPTH: usize = 4;

// A fidelity this close to 1 counts as a coincident pair.
const UNIT_FIDELITY_TOL: f64 = 1e-10;
// Slack on `F' ≤ F` when deciding membership of the index set.
const DELTA_SLACK: f64 = 1e-12;

/// Prior probabilities `η_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PriorVector(Vec<f64>);

impl PriorVector {
    /// Nonnegative entries summing to 1 within `1e-9`.
    pub fn new(etas: Vec<f64>) -> Result<Self> {
        if etas.is_empty() {
            return Err(Error::InvalidPriors("no priors".into()));
        }
        if let Some((i, &e)) = etas.iter().enumerate().find(|(_, e)| !e.is_finite() || **e < 0.0) {
            return Err(Error::InvalidPriors(format!("prior {i} is {e}")));
        }
        let sum: f64 = etas.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidPriors(format!("priors sum to {sum}")));
        }
        Ok(Self(etas))
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPriors("no priors".into()));
        }
        Ok(Self(vec![1.0 / n as f64; n]))
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

    pub fn is_uniform(&self) -> bool {
        let u = 1.0 / self.0.len() as f64;
        self.0.iter().all(|e| (e - u).abs() < 1e-12)
    }
}

impl TryFrom<Vec<f64>> for PriorVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PriorVector> for Vec<f64> {
    fn from(p: PriorVector) -> Self {
        p.0
    }
}

/// Literature bounds evaluated alongside the hierarchy. All values are
/// failure-probability lower bounds; `None` means the bound does not apply.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Comparisons {
    pub qiu: Option<f64>,
    pub cloning: Option<f64>,
    pub chefles_barnett: Option<f64>,
    pub ud: Option<f64>,
    /// Two states, any priors: `2√(η₁η₂) F`.
    pub jaeger_shimony: Option<f64>,
    /// Two states, equal priors: `F`.
    pub idp: Option<f64>,
}

impl Comparisons {
    /// `(name, value)` pairs in fixed column order.
    pub fn entries(&self) -> [(&'static str, Option<f64>); 6] {
        [
            ("qiu", self.qiu),
            ("cloning", self.cloning),
            ("chefles_barnett", self.chefles_barnett),
            ("ud", self.ud),
            ("jaeger_shimony", self.jaeger_shimony),
            ("idp", self.idp),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// `P_f^(0)`.
    pub base: f64,
    /// `P_f^(0)` through `P_f^(r)`.
    pub series: Vec<f64>,
    /// Ordered pairs `(i, j)`, `i ≠ j`, with `F(ρ'_i, ρ'_j) ≤ F(ρ_i, ρ_j)`.
    pub delta_set: Vec<(usize, usize)>,
    pub comparisons: Comparisons,
}

/// Ordered index pairs of the bound together with their weights
/// `η_i η_j ((F - F')/(1 - F'))²`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairTerms {
    pub pairs: Vec<(usize, usize)>,
    pub weights: Vec<f64>,
    pub n: usize,
}

fn require_pairs(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument("failure bounds need at least two states".into()));
    }
    Ok(())
}

/// Collects the index set and per-pair weights of an instance.
///
/// A pair whose targets coincide while its inputs do not is rejected with
/// [`Error::SingularPair`]; a pair coincident on both sides contributes nothing.
pub fn pair_terms(instance: &SeparationInstance) -> Result<PairTerms> {
    let n = instance.n();
    require_pairs(n)?;
    let f_in = instance.inputs().fidelity_table()?;
    let f_out = instance.targets().fidelity_table()?;
    let eta = instance.priors().as_slice();
    let mut pairs = Vec::new();
    let mut weights = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (f, fp) = (f_in[i][j], f_out[i][j]);
            if fp >= 1.0 - UNIT_FIDELITY_TOL {
                if f < 1.0 - UNIT_FIDELITY_TOL {
                    return Err(Error::SingularPair { i, j, input_fidelity: f });
                }
                pairs.push((i, j));
                weights.push(0.0);
                continue;
            }
            if fp <= f + DELTA_SLACK {
                let ratio = (f - fp).max(0.0) / (1.0 - fp);
                pairs.push((i, j));
                weights.push(eta[i] * eta[j] * ratio * ratio);
            }
        }
    }
    Ok(PairTerms { pairs, weights, n })
}

/// `√(C_1 + √(C_2 + √(C_4 + … + √(n/(n-1) C_{2^r}))))` with
/// `C_t = Σ weight^t`.
pub fn nested_bound(terms: &PairTerms, depth: usize) -> f64 {
    // Level L scales like w_max^(2^L), which underflows within a few levels.
    // Dividing it out leaves q_L = S_L + √q_{L+1} with S_L = Σ (w/w_max)^(2^L),
    // and the bound is √(w_max q_0).
    let w_max = terms.weights.iter().copied().fold(0.0, f64::max);
    if w_max == 0.0 {
        return 0.0;
    }
    let s = |level: usize| -> f64 {
        let t = 2f64.powi(level.min(i32::MAX as usize) as i32);
        terms.weights.iter().map(|w| (w / w_max).powf(t)).sum()
    };
    let ratio = terms.n as f64 / (terms.n as f64 - 1.0);
    let mut acc = ratio * s(depth);
    for level in (0..depth).rev() {
        acc = s(level) + acc.sqrt();
    }
    (w_max * acc).sqrt().clamp(0.0, 1.0)
}

/// `P_f^(0)`.
pub fn base_bound(instance: &SeparationInstance) -> Result<f64> {
    Ok(nested_bound(&pair_terms(instance)?, 0))
}

/// `[P_f^(0), …, P_f^(depth)]`.
pub fn iterated_bound(instance: &SeparationInstance, depth: usize) -> Result<Vec<f64>> {
    let terms = pair_terms(instance)?;
    Ok((0..=depth).map(|r| nested_bound(&terms, r)).collect())
}

fn pure_sets(instance: &SeparationInstance) -> Result<(&[PureState], &[PureState])> {
    let inputs = instance.inputs().pure().ok_or(Error::MixedStatesUnsupported)?;
    let targets = instance.targets().pure().ok_or(Error::MixedStatesUnsupported)?;
    Ok((inputs, targets))
}

/// `1 - (1/(n-1)) Σ_{i<j} (η_i + η_j - 2√(η_iη_j)|⟨ψ_i|ψ_j⟩|)/(1 - |⟨ψ'_i|ψ'_j⟩|)`,
/// clamped at 0.
pub fn qiu_bound(instance: &SeparationInstance) -> Result<f64> {
    let (inputs, targets) = pure_sets(instance)?;
    let n = inputs.len();
    require_pairs(n)?;
    let eta = instance.priors().as_slice();
    let mut sum = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let s = pure_fidelity(&inputs[i], &inputs[j])?;
            let sp = pure_fidelity(&targets[i], &targets[j])?;
            if sp >= 1.0 - UNIT_FIDELITY_TOL {
                return Err(Error::CoincidentTargets { i, j });
            }
            sum += (eta[i] + eta[j] - 2.0 * (eta[i] * eta[j]).sqrt() * s) / (1.0 - sp);
        }
    }
    Ok((1.0 - sum / (n as f64 - 1.0)).clamp(0.0, 1.0))
}

fn check_copies(m: usize, n: usize) -> Result<()> {
    if m == 0 || m > n {
        return Err(Error::InvalidArgument(format!("cloning needs 1 ≤ M ≤ N, got M={m}, N={n}")));
    }
    Ok(())
}

/// Exact `M → N` cloning bound from single-copy fidelities.
pub fn cloning_bound(states: &StateSet, priors: &PriorVector, m: usize, n_copies: usize) -> Result<f64> {
    check_copies(m, n_copies)?;
    let n = states.len();
    require_pairs(n)?;
    if priors.len() != n {
        return Err(Error::InvalidPriors(format!("{} priors for {n} states", priors.len())));
    }
    if m == n_copies {
        return Ok(0.0);
    }
    let eta = priors.as_slice();
    let f = states.fidelity_table()?;
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let fm = f[i][j].powi(m as i32);
            let fn_ = f[i][j].powi(n_copies as i32);
            if fn_ >= 1.0 - UNIT_FIDELITY_TOL {
                return Err(Error::SingularPair { i, j, input_fidelity: fm });
            }
            let ratio = (fm - fn_) / (1.0 - fn_);
            sum += eta[i] * eta[j] * ratio * ratio;
        }
    }
    Ok((n as f64 / (n as f64 - 1.0) * sum).sqrt().clamp(0.0, 1.0))
}

/// `1 - (2/(n(n-1))) Σ_{i<j} (1 - |⟨ψ_i|ψ_j⟩|^M)/(1 - |⟨ψ_i|ψ_j⟩|^N)`,
/// the equal-prior cloning bound.
pub fn chefles_barnett_bound(states: &[PureState], m: usize, n_copies: usize) -> Result<f64> {
    check_copies(m, n_copies)?;
    let n = states.len();
    require_pairs(n)?;
    if m == n_copies {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let s = pure_fidelity(&states[i], &states[j])?;
            let sn = s.powi(n_copies as i32);
            if sn >= 1.0 - UNIT_FIDELITY_TOL {
                return Err(Error::SingularPair { i, j, input_fidelity: s });
            }
            sum += (1.0 - s.powi(m as i32)) / (1.0 - sn);
        }
    }
    Ok((1.0 - 2.0 / (n as f64 * (n as f64 - 1.0)) * sum).clamp(0.0, 1.0))
}

/// `√(n/(n-1) Σ_{i≠j} η_iη_j F(ρ_i, ρ_j)²)`.
pub fn ud_bound(states: &StateSet, priors: &PriorVector) -> Result<f64> {
    let n = states.len();
    require_pairs(n)?;
    let eta = priors.as_slice();
    let f = states.fidelity_table()?;
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += eta[i] * eta[j] * f[i][j] * f[i][j];
            }
        }
    }
    Ok((n as f64 / (n as f64 - 1.0) * sum).sqrt().clamp(0.0, 1.0))
}

/// Failure-side two-state floor `2√(η₁η₂) F(ρ₁, ρ₂)`.
pub fn jaeger_shimony_bound(states: &StateSet, priors: &PriorVector) -> Result<f64> {
    if states.len() != 2 {
        return Err(Error::InvalidArgument("two-state bound needs exactly two states".into()));
    }
    let eta = priors.as_slice();
    Ok(2.0 * (eta[0] * eta[1]).sqrt() * states.fidelity(0, 1)?)
}

/// Failure-side two-state floor at equal priors, `F(ρ₁, ρ₂)`.
pub fn idp_bound(states: &StateSet) -> Result<f64> {
    if states.len() != 2 {
        return Err(Error::InvalidArgument("two-state bound needs exactly two states".into()));
    }
    states.fidelity(0, 1)
}

/// Single-copy states and copy numbers for the cloning comparisons.
#[derive(Debug, Clone, Copy)]
pub struct CloningComparison<'a> {
    pub states: &'a StateSet,
    pub copies_in: usize,
    pub copies_out: usize,
}

/// Full report: the hierarchy up to `depth` and every applicable comparison.
pub fn bound_report(
    instance: &SeparationInstance,
    depth: usize,
    cloning: Option<CloningComparison<'_>>,
) -> Result<BoundReport> {
    let terms = pair_terms(instance)?;
    let series: Vec<f64> = (0..=depth).map(|r| nested_bound(&terms, r)).collect();
    let inputs = instance.inputs();
    let priors = instance.priors();

    let mut comparisons = Comparisons {
        ud: Some(ud_bound(inputs, priors)?),
        qiu: if instance.is_pure() { qiu_bound(instance).ok() } else { None },
        ..Default::default()
    };
    if instance.n() == 2 {
        comparisons.jaeger_shimony = Some(jaeger_shimony_bound(inputs, priors)?);
        if priors.is_uniform() {
            comparisons.idp = Some(idp_bound(inputs)?);
        }
    }
    if let Some(task) = cloning {
        comparisons.cloning = Some(cloning_bound(task.states, priors, task.copies_in, task.copies_out)?);
        if let Some(pure) = task.states.pure() {
            comparisons.chefles_barnett = Some(chefles_barnett_bound(pure, task.copies_in, task.copies_out)?);
        }
    }
    Ok(BoundReport { base: series[0], series, delta_set: terms.pairs, comparisons })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(s: f64) -> Vec<PureState> {
        vec![PureState::from_real(&[1.0, 0.0]).unwrap(), PureState::from_real(&[s, (1.0 - s * s).sqrt()]).unwrap()]
    }

    fn orthogonal() -> Vec<PureState> {
        vec![PureState::basis(2, 0).unwrap(), PureState::basis(2, 1).unwrap()]
    }

    fn ud(s: f64, priors: Vec<f64>) -> SeparationInstance {
        SeparationInstance::pure(pair(s), orthogonal(), PriorVector::new(priors).unwrap()).unwrap()
    }

    #[test]
    fn prior_validation() {
        assert!(PriorVector::new(vec![0.5, 0.6]).is_err());
        assert!(PriorVector::new(vec![-0.1, 1.1]).is_err());
        assert!(PriorVector::new(vec![]).is_err());
        assert!(PriorVector::uniform(4).unwrap().is_uniform());
    }

    #[test]
    fn base_bound_examples() {
        let same = SeparationInstance::pure(pair(0.5), pair(0.5), PriorVector::uniform(2).unwrap()).unwrap();
        assert_eq!(base_bound(&same).unwrap(), 0.0);
        assert!((base_bound(&ud(0.5, vec![0.5, 0.5])).unwrap() - 0.5).abs() < 1e-12);
        let direct = (2.0f64 * 2.0 * 0.36 * 0.64 * 0.25).sqrt();
        let got = base_bound(&ud(0.5, vec![0.36, 0.64])).unwrap();
        assert!((got - 0.48).abs() < 1e-12);
        assert!((got - direct).abs() < 1e-15);
    }

    #[test]
    fn deep_levels_keep_growing_for_tiny_weights() {
        let terms = PairTerms { pairs: vec![(0, 1), (1, 0)], weights: vec![1e-7, 1e-7], n: 4 };
        let series: Vec<f64> = (0..40).map(|r| nested_bound(&terms, r)).collect();
        assert!(series[..12].windows(2).all(|w| w[1] > w[0]), "{series:?}");
        assert!(series.windows(2).all(|w| w[1] >= w[0]));
        // Two equal weights w: the scaled recursion q = 2 + √q converges to q = 4.
        assert!((series[39] - (4e-7f64).sqrt()).abs() < 1e-15);
        assert_eq!(nested_bound(&terms, 200), nested_bound(&terms, 200).min(1.0));
    }

    #[test]
    fn singular_targets_are_rejected() {
        let same_target = vec![PureState::basis(2, 0).unwrap(); 2];
        let inst = SeparationInstance::pure(pair(0.5), same_target, PriorVector::uniform(2).unwrap()).unwrap();
        assert!(matches!(base_bound(&inst), Err(Error::SingularPair { .. })));
    }

    #[test]
    fn iterated_examples() {
        let inst = ud(0.5, vec![0.3, 0.7]);
        let series = iterated_bound(&inst, 4).unwrap();
        assert_eq!(series.len(), 5);
        assert_eq!(series[0], base_bound(&inst).unwrap());
        for w in series.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
        let same = SeparationInstance::pure(pair(0.5), pair(0.5), PriorVector::uniform(2).unwrap()).unwrap();
        assert!(iterated_bound(&same, 3).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn nested_bound_depth_one_by_hand() {
        // weights w: C_1 = Σw, C_2 = Σw², n = 3 → √(C_1 + √(1.5 C_2))
        let terms = PairTerms { pairs: vec![(0, 1), (1, 0)], weights: vec![0.04, 0.01], n: 3 };
        let expected = (0.05f64 + (1.5f64 * (0.0016 + 0.0001)).sqrt()).sqrt();
        assert!((nested_bound(&terms, 1) - expected).abs() < 1e-15);
    }

    #[test]
    fn qiu_examples() {
        assert!((qiu_bound(&ud(0.5, vec![0.5, 0.5])).unwrap() - 0.5).abs() < 1e-12);
        let same = SeparationInstance::pure(pair(0.4), pair(0.4), PriorVector::uniform(2).unwrap()).unwrap();
        assert!(qiu_bound(&same).unwrap().abs() < 1e-12);
    }

    #[test]
    fn cloning_examples() {
        let states = StateSet::Pure(pair(0.6));
        let priors = PriorVector::uniform(2).unwrap();
        assert_eq!(cloning_bound(&states, &priors, 2, 2).unwrap(), 0.0);
        assert!((cloning_bound(&states, &priors, 1, 2).unwrap() - 0.375).abs() < 1e-12);
        assert!(cloning_bound(&StateSet::Pure(orthogonal()), &priors, 1, 3).unwrap().abs() < 1e-15);
        assert!(cloning_bound(&states, &priors, 3, 2).is_err());
        let twins = StateSet::Pure(vec![PureState::basis(2, 0).unwrap(); 2]);
        assert!(matches!(cloning_bound(&twins, &priors, 1, 2), Err(Error::SingularPair { .. })));
    }

    #[test]
    fn chefles_barnett_examples() {
        assert!((chefles_barnett_bound(&pair(0.6), 1, 2).unwrap() - 0.375).abs() < 1e-12);
        assert_eq!(chefles_barnett_bound(&pair(0.6), 2, 2).unwrap(), 0.0);
    }

    #[test]
    fn ud_examples() {
        let p = PriorVector::uniform(2).unwrap();
        assert!((ud_bound(&StateSet::Pure(pair(0.5)), &p).unwrap() - 0.5).abs() < 1e-12);
        let skew = PriorVector::new(vec![0.36, 0.64]).unwrap();
        assert!((ud_bound(&StateSet::Pure(pair(0.5)), &skew).unwrap() - 0.48).abs() < 1e-12);
        assert_eq!(ud_bound(&StateSet::Pure(orthogonal()), &p).unwrap(), 0.0);
    }

    #[test]
    fn report_collects_comparisons() {
        let inst = ud(0.5, vec![0.5, 0.5]);
        let single = StateSet::Pure(pair(0.5));
        let cloning = CloningComparison { states: &single, copies_in: 1, copies_out: 2 };
        let report = bound_report(&inst, 2, Some(cloning)).unwrap();
        assert_eq!(report.series.len(), 3);
        assert_eq!(report.delta_set, vec![(0, 1), (1, 0)]);
        let c = &report.comparisons;
        assert!((c.qiu.unwrap() - 0.5).abs() < 1e-12);
        assert!((c.ud.unwrap() - 0.5).abs() < 1e-12);
        assert!((c.idp.unwrap() - 0.5).abs() < 1e-12);
        assert!((c.jaeger_shimony.unwrap() - 0.5).abs() < 1e-12);
        assert!(c.cloning.is_some() && c.chefles_barnett.is_some());
    }
}
