//! Explicit realization of a certified pure-state separation.
//!
//! Given `X - √Γ X' √Γ = C C†`, the vectors
//!
//! ```text
//! w_i = √γ_i |ψ'_i⟩|P_0⟩ + Σ_k conj(C_ik) |χ⟩|P_k⟩,   k = 1..n
//! ```
//!
//! have the same Gram matrix as the inputs, so some isometry `V` maps
//! `|ψ_i⟩ ↦ w_i`. Measuring the probe register then splits `V` into one
//! success operator (probe `P_0`) and `n` failure operators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feasibility::{check_certificate, SeparationInstance, StateSet, SuccessVector};
use crate::qmat::{
    c, complete_basis, fidelity, fidelity_with_pure, gram_schmidt, hermitian_sqrt, independence_ratio,
    spectral_norm, state_columns, ComplexMatrix, DensityMatrix,
};

/// Completeness residual accepted for a valid channel.
pub const COMPLETENESS_TOL: f64 = 1e-8;
/// Inputs whose singular-value ratio falls below this are treated as dependent.
pub const CONDITIONING_GUARD: f64 = 1e-8;
/// Branches less likely than this carry no post-measurement state.
pub const NEGLIGIBLE_PROBABILITY: f64 = 1e-12;

/// `C` with `C C† = R`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualFactor {
    factor: ComplexMatrix,
}

impl ResidualFactor {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.factor
    }
}

/// Factors a PSD residual; the Hermitian square root is the canonical choice.
pub fn kraus_factor(residual: &ComplexMatrix) -> Result<ResidualFactor> {
    Ok(ResidualFactor { factor: hermitian_sqrt(residual)? })
}

/// The isometry `V : H_in → H_target ⊗ H_probe` together with its layout.
///
/// Output index `t·probe_dim + p` addresses target basis state `t` with probe
/// state `p`; probe state 0 flags success.
#[derive(Debug, Clone, PartialEq)]
pub struct IsometryConstruction {
    isometry: ComplexMatrix,
    images: ComplexMatrix,
    input_dim: usize,
    target_dim: usize,
    probe_dim: usize,
}

impl IsometryConstruction {
    pub const PROBE_SUCCESS_INDEX: usize = 0;

    pub fn isometry(&self) -> &ComplexMatrix {
        &self.isometry
    }

    /// Columns are the prescribed images `w_i`.
    pub fn images(&self) -> &ComplexMatrix {
        &self.images
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn probe_dim(&self) -> usize {
        self.probe_dim
    }

    /// `‖V†V - I‖`.
    pub fn isometry_defect(&self) -> f64 {
        let d = self.input_dim;
        spectral_norm(&(self.isometry.adjoint() * &self.isometry - ComplexMatrix::identity(d, d)))
    }
}

/// Builds the isometry for a pure instance whose certificate holds at `gamma`.
///
/// Inputs and images are each orthonormalized in index order; because both
/// families share one Gram matrix their triangular factors agree, so mapping
/// frame to frame sends `|ψ_i⟩` to `w_i`. The orthogonal complement of the
/// input span is sent to a pivoted completion of the image frame.
pub fn build_isometry(instance: &SeparationInstance, gamma: &SuccessVector, tol: f64) -> Result<IsometryConstruction> {
    let inputs = instance.inputs().pure().ok_or(Error::MixedStatesUnsupported)?;
    let targets = instance.targets().pure().ok_or(Error::MixedStatesUnsupported)?;
    let (x, xp) = instance.grams()?;
    let cert = check_certificate(&x, &xp, gamma, tol)?;
    if !cert.feasible {
        return Err(Error::Infeasible { min_eigenvalue: cert.residual_min_eigenvalue });
    }
    let ratio = independence_ratio(inputs)?;
    if ratio < CONDITIONING_GUARD {
        return Err(Error::LinearlyDependent { ratio });
    }

    let n = inputs.len();
    let input_dim = inputs[0].dim();
    let target_dim = targets[0].dim();
    let probe_dim = n + 1;
    let out_dim = target_dim * probe_dim;
    if out_dim < input_dim {
        return Err(Error::InvalidArgument(format!(
            "target ⊗ probe space ({out_dim}) is smaller than the input space ({input_dim})"
        )));
    }

    let residual = crate::feasibility::residual_matrix(&x, &xp, gamma)?;
    let factor = kraus_factor(&residual)?;
    let cm = factor.matrix();

    let mut images = ComplexMatrix::zeros(out_dim, n);
    for (i, target) in targets.iter().enumerate() {
        let root = gamma.as_slice()[i].sqrt();
        for t in 0..target_dim {
            images[(t * probe_dim, i)] = target.amplitudes()[t] * root;
        }
        // Failure slots share the reference vector χ = |0⟩ of the target space.
        for k in 1..=n {
            images[(k, i)] = cm[(i, k - 1)].conj();
        }
    }

    let (q_in, _) = gram_schmidt(&state_columns(inputs));
    let (q_out, _) = gram_schmidt(&images);
    let frame_in = complete_basis(&q_in, input_dim);
    let frame_out = complete_basis(&q_out, input_dim);
    let isometry = &frame_out * frame_in.adjoint();

    Ok(IsometryConstruction { isometry, images, input_dim, target_dim, probe_dim })
}

/// Success and failure Kraus operators, each `d_target × d_in`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    success_ops: Vec<ComplexMatrix>,
    failure_ops: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// All operators must share one shape. Completeness is not enforced here;
    /// see [`KrausChannel::completeness_residual`].
    pub fn new(success_ops: Vec<ComplexMatrix>, failure_ops: Vec<ComplexMatrix>) -> Result<Self> {
        let first = success_ops.first().or(failure_ops.first()).ok_or(Error::Empty)?;
        let shape = first.shape();
        for op in success_ops.iter().chain(&failure_ops) {
            if op.shape() != shape {
                return Err(Error::DimensionMismatch { expected: shape.0 * shape.1, found: op.nrows() * op.ncols() });
            }
            if op.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        Ok(Self { success_ops, failure_ops })
    }

    pub fn success_ops(&self) -> &[ComplexMatrix] {
        &self.success_ops
    }

    pub fn failure_ops(&self) -> &[ComplexMatrix] {
        &self.failure_ops
    }

    pub fn success_ops_mut(&mut self) -> &mut [ComplexMatrix] {
        &mut self.success_ops
    }

    pub fn failure_ops_mut(&mut self) -> &mut [ComplexMatrix] {
        &mut self.failure_ops
    }

    fn all_ops(&self) -> impl Iterator<Item = &ComplexMatrix> {
        self.success_ops.iter().chain(&self.failure_ops)
    }

    pub fn input_dim(&self) -> usize {
        self.all_ops().next().map_or(0, |m| m.ncols())
    }

    pub fn output_dim(&self) -> usize {
        self.all_ops().next().map_or(0, |m| m.nrows())
    }

    /// `‖Σ_k (A_Sk†A_Sk + A_Fk†A_Fk) - I‖`.
    pub fn completeness_residual(&self) -> f64 {
        let d = self.input_dim();
        let sum = self.all_ops().fold(ComplexMatrix::zeros(d, d), |acc, a| acc + a.adjoint() * a);
        spectral_norm(&(sum - ComplexMatrix::identity(d, d)))
    }
}

/// Splits the isometry by probe outcome.
pub fn extract_kraus(iso: &IsometryConstruction) -> KrausChannel {
    let slot = |p: usize| -> ComplexMatrix {
        ComplexMatrix::from_fn(iso.target_dim, iso.input_dim, |t, col| iso.isometry[(t * iso.probe_dim + p, col)])
    };
    let success_ops = vec![slot(IsometryConstruction::PROBE_SUCCESS_INDEX)];
    let failure_ops = (1..iso.probe_dim).map(slot).collect();
    KrausChannel { success_ops, failure_ops }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchKind {
    Success,
    Failure,
}

/// One Kraus branch applied to one input.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchOutcome {
    pub kind: BranchKind,
    /// Position within the success or failure list.
    pub index: usize,
    pub probability: f64,
    /// Normalized `AρA†/p`; absent when `p` is negligible.
    pub post_state: Option<DensityMatrix>,
}

fn hermitian_part(m: ComplexMatrix) -> ComplexMatrix {
    (&m + m.adjoint()).scale(0.5)
}

/// Applies every operator of `ch` to `rho`: success branches first, then
/// failure branches, each in list order.
pub fn apply_channel(ch: &KrausChannel, rho: &DensityMatrix) -> Result<Vec<BranchOutcome>> {
    if ch.input_dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: ch.input_dim(), found: rho.dim() });
    }
    let branch = |kind: BranchKind, index: usize, a: &ComplexMatrix| -> BranchOutcome {
        let out = hermitian_part(a * rho.matrix() * a.adjoint());
        let probability = out.trace().re.max(0.0);
        let post_state = if probability > NEGLIGIBLE_PROBABILITY {
            DensityMatrix::from_unnormalized(out).ok()
        } else {
            None
        };
        BranchOutcome { kind, index, probability, post_state }
    };
    let mut outcomes: Vec<BranchOutcome> =
        ch.success_ops.iter().enumerate().map(|(k, a)| branch(BranchKind::Success, k, a)).collect();
    outcomes.extend(ch.failure_ops.iter().enumerate().map(|(k, a)| branch(BranchKind::Failure, k, a)));
    Ok(outcomes)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputVerification {
    pub success_probability: f64,
    pub failure_probability: f64,
    /// Fidelity of the aggregated success state with the target; absent when
    /// the success branch never fires.
    pub success_fidelity: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub per_input: Vec<InputVerification>,
    pub completeness_residual: f64,
    pub completeness_ok: bool,
    pub worst_fidelity: Option<f64>,
    /// `Σ η_i f_i`.
    pub average_failure: f64,
    pub pass: bool,
}

/// Audits a channel against an instance: completeness, success rates of at
/// least `γ_i - tol`, and success states within `tol` of the targets in
/// fidelity.
pub fn verify_separation(
    ch: &KrausChannel,
    instance: &SeparationInstance,
    gamma: &SuccessVector,
    tol: f64,
) -> Result<VerificationReport> {
    if gamma.len() != instance.n() {
        return Err(Error::DimensionMismatch { expected: instance.n(), found: gamma.len() });
    }
    if ch.output_dim() != instance.targets().dim() {
        return Err(Error::DimensionMismatch { expected: instance.targets().dim(), found: ch.output_dim() });
    }
    let inputs = instance.inputs().densities();
    let out_dim = ch.output_dim();
    let mut per_input = Vec::with_capacity(inputs.len());
    for (i, rho) in inputs.iter().enumerate() {
        let outcomes = apply_channel(ch, rho)?;
        let mut success_probability = 0.0;
        let mut failure_probability = 0.0;
        for o in &outcomes {
            match o.kind {
                BranchKind::Success => success_probability += o.probability,
                BranchKind::Failure => failure_probability += o.probability,
            }
        }
        let success_fidelity = if success_probability > NEGLIGIBLE_PROBABILITY {
            let mut acc = ComplexMatrix::zeros(out_dim, out_dim);
            for a in ch.success_ops() {
                acc += a * rho.matrix() * a.adjoint();
            }
            let state = DensityMatrix::from_unnormalized(hermitian_part(acc))?;
            Some(match instance.targets() {
                StateSet::Pure(t) => fidelity_with_pure(&state, &t[i])?,
                StateSet::Mixed(t) => fidelity(&state, &t[i])?,
            })
        } else {
            None
        };
        let wanted = gamma.as_slice()[i];
        let rate_ok = success_probability >= wanted - tol;
        let fidelity_ok = match success_fidelity {
            Some(f) => f >= 1.0 - tol,
            None => wanted <= tol,
        };
        per_input.push(InputVerification {
            success_probability,
            failure_probability,
            success_fidelity,
            pass: rate_ok && fidelity_ok,
        });
    }
    let completeness_residual = ch.completeness_residual();
    let completeness_ok = completeness_residual <= COMPLETENESS_TOL;
    let worst_fidelity = per_input.iter().filter_map(|v| v.success_fidelity).reduce(f64::min);
    let average_failure =
        per_input.iter().zip(instance.priors().as_slice()).map(|(v, e)| e * v.failure_probability).sum();
    let pass = completeness_ok && per_input.iter().all(|v| v.pass);
    Ok(VerificationReport { per_input, completeness_residual, completeness_ok, worst_fidelity, average_failure, pass })
}

/// The trivial one-operator channel `{I}` on dimension `d`.
pub fn identity_channel(d: usize) -> KrausChannel {
    KrausChannel { success_ops: vec![ComplexMatrix::identity(d, d)], failure_ops: vec![] }
}

/// Projective channel `{|k⟩⟨k|}` with the first projector as success.
pub fn computational_basis_channel(d: usize) -> KrausChannel {
    let proj = |k: usize| {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(k, k)] = c(1.0, 0.0);
        m
    };
    KrausChannel { success_ops: vec![proj(0)], failure_ops: (1..d).map(proj).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::PriorVector;
    use crate::feasibility::max_uniform_gamma;
    use crate::qmat::{PureState, DEFAULT_PSD_TOL};

    fn overlap_pair(s: f64) -> Vec<PureState> {
        vec![PureState::from_real(&[1.0, 0.0]).unwrap(), PureState::from_real(&[s, (1.0 - s * s).sqrt()]).unwrap()]
    }

    fn basis2() -> Vec<PureState> {
        vec![PureState::basis(2, 0).unwrap(), PureState::basis(2, 1).unwrap()]
    }

    fn ud_instance() -> SeparationInstance {
        SeparationInstance::pure(overlap_pair(0.5), basis2(), PriorVector::uniform(2).unwrap()).unwrap()
    }

    #[test]
    fn factor_examples() {
        let z = ComplexMatrix::zeros(2, 2);
        assert_eq!(kraus_factor(&z).unwrap().matrix(), &z);
        let id = ComplexMatrix::identity(2, 2);
        assert!((kraus_factor(&id).unwrap().matrix() - &id).norm() < 1e-14);
        let r = ComplexMatrix::from_element(2, 2, c(0.5, 0.0));
        let f = kraus_factor(&r).unwrap();
        assert!(spectral_norm(&(f.matrix() * f.matrix().adjoint() - &r)) < 1e-10);
        let bad = ComplexMatrix::from_diagonal_element(2, 2, c(-1.0, 0.0));
        assert!(kraus_factor(&bad).is_err());
    }

    #[test]
    fn identity_flow_construction() {
        let states = overlap_pair(0.3);
        let inst = SeparationInstance::pure(states.clone(), states.clone(), PriorVector::uniform(2).unwrap()).unwrap();
        let gamma = SuccessVector::uniform(2, 1.0).unwrap();
        let iso = build_isometry(&inst, &gamma, DEFAULT_PSD_TOL).unwrap();
        assert!(iso.isometry_defect() < 1e-12);
        let ch = extract_kraus(&iso);
        assert_eq!(ch.success_ops().len(), 1);
        for s in &states {
            let out = &ch.success_ops()[0] * s.amplitudes();
            assert!((out - s.amplitudes()).norm() < 1e-10);
        }
        for f in ch.failure_ops() {
            for s in &states {
                assert!((f * s.amplitudes()).norm() < 1e-10);
            }
        }
        let report = verify_separation(&ch, &inst, &gamma, 1e-6).unwrap();
        assert!(report.pass);
        assert!(report.per_input.iter().all(|v| (v.success_probability - 1.0).abs() < 1e-10));
    }

    #[test]
    fn ud_construction_preserves_gram_and_rates() {
        let inst = ud_instance();
        let gamma = SuccessVector::uniform(2, 0.5).unwrap();
        let iso = build_isometry(&inst, &gamma, DEFAULT_PSD_TOL).unwrap();
        let (x, _) = inst.grams().unwrap();
        let image_gram = iso.images().adjoint() * iso.images();
        assert!((image_gram - x.matrix()).norm() < 1e-8);
        let ch = extract_kraus(&iso);
        assert!(ch.completeness_residual() < 1e-8);
        for s in inst.inputs().pure().unwrap() {
            let out = &ch.success_ops()[0] * s.amplitudes();
            assert!((out.norm_squared() - 0.5).abs() < 1e-8);
        }
        let report = verify_separation(&ch, &inst, &gamma, 1e-6).unwrap();
        assert!(report.pass);
        for v in &report.per_input {
            assert!((v.success_probability - 0.5).abs() < 1e-6);
            assert!(v.success_fidelity.unwrap() >= 1.0 - 1e-8);
        }
    }

    #[test]
    fn orthogonal_inputs_cannot_reach_overlapping_targets_at_full_rate() {
        let inst =
            SeparationInstance::pure(basis2(), overlap_pair(0.6), PriorVector::uniform(2).unwrap()).unwrap();
        let gamma = SuccessVector::uniform(2, 1.0).unwrap();
        assert!(matches!(build_isometry(&inst, &gamma, DEFAULT_PSD_TOL), Err(Error::Infeasible { .. })));
    }

    #[test]
    fn dependent_inputs_rejected() {
        let s = PureState::from_real(&[1.0, 1.0]).unwrap();
        let inst = SeparationInstance::pure(vec![s.clone(), s.clone()], vec![s.clone(), s], PriorVector::uniform(2).unwrap())
            .unwrap();
        let gamma = SuccessVector::uniform(2, 1.0).unwrap();
        assert!(matches!(build_isometry(&inst, &gamma, DEFAULT_PSD_TOL), Err(Error::LinearlyDependent { .. })));
    }

    #[test]
    fn mixed_instances_rejected() {
        let m = DensityMatrix::maximally_mixed(2).unwrap();
        let z = PureState::basis(2, 0).unwrap().density();
        let inst =
            SeparationInstance::with_uniform_priors(StateSet::Mixed(vec![m, z.clone()]), StateSet::Mixed(vec![z.clone(), z]))
                .unwrap();
        let gamma = SuccessVector::uniform(2, 0.1).unwrap();
        assert!(matches!(build_isometry(&inst, &gamma, DEFAULT_PSD_TOL), Err(Error::MixedStatesUnsupported)));
    }

    #[test]
    fn apply_channel_examples() {
        let rho = DensityMatrix::new(ComplexMatrix::from_row_slice(2, 2, &[c(0.6, 0.0), c(0.1, 0.0), c(0.1, 0.0), c(0.4, 0.0)]))
            .unwrap();
        let out = apply_channel(&identity_channel(2), &rho).unwrap();
        assert_eq!(out.len(), 1);
        assert!((out[0].probability - 1.0).abs() < 1e-14);
        assert!((out[0].post_state.as_ref().unwrap().matrix() - rho.matrix()).norm() < 1e-14);

        let plus = PureState::from_real(&[1.0, 1.0]).unwrap().density();
        let out = apply_channel(&computational_basis_channel(2), &plus).unwrap();
        assert_eq!(out.len(), 2);
        assert!(out.iter().all(|o| (o.probability - 0.5).abs() < 1e-14));
        assert!(apply_channel(&identity_channel(3), &plus).is_err());
    }

    #[test]
    fn constructed_ud_channel_on_first_input() {
        let inst = ud_instance();
        let (x, xp) = inst.grams().unwrap();
        let g = max_uniform_gamma(&x, &xp, 1e-10).unwrap();
        let gamma = SuccessVector::uniform(2, g).unwrap();
        let ch = extract_kraus(&build_isometry(&inst, &gamma, DEFAULT_PSD_TOL).unwrap());
        let rho = inst.inputs().densities()[0].clone();
        let out = apply_channel(&ch, &rho).unwrap();
        let total: f64 = out.iter().map(|o| o.probability).sum();
        assert!((total - 1.0).abs() < 1e-9);
        let success = &out[0];
        assert_eq!(success.kind, BranchKind::Success);
        assert!((success.probability - 0.5).abs() < 1e-8);
        let target = &inst.targets().pure().unwrap()[0];
        assert!(fidelity_with_pure(success.post_state.as_ref().unwrap(), target).unwrap() >= 1.0 - 1e-8);
    }

    #[test]
    fn corrupted_channel_fails_verification() {
        let inst = ud_instance();
        let gamma = SuccessVector::uniform(2, 0.5).unwrap();
        let mut ch = extract_kraus(&build_isometry(&inst, &gamma, DEFAULT_PSD_TOL).unwrap());
        let d = ch.failure_ops()[0].shape();
        ch.failure_ops_mut()[0] = ComplexMatrix::zeros(d.0, d.1);
        let report = verify_separation(&ch, &inst, &gamma, 1e-6).unwrap();
        assert!(!report.completeness_ok);
        assert!(!report.pass);
    }
}
