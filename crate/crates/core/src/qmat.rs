//! Dense complex linear algebra and quantum-state primitives.
//!
//! Every positive-semidefiniteness check, square root and support computation
//! goes through [`hermitian_eigen`], so the tolerances used downstream compose
//! in one place. Inner products are conjugate-linear in the first argument:
//! `inner(a, b) = a† b`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row/column-indexed complex matrix used for every operator in the crate.
pub type ComplexMatrix = DMatrix<Complex64>;
/// Complex column vector.
pub type ComplexVector = DVector<Complex64>;

/// Default relative tolerance for PSD checks.
pub const DEFAULT_PSD_TOL: f64 = 1e-9;
/// Default relative singular-value cutoff for rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;
/// Unit-norm tolerance for [`PureState`].
pub const NORM_TOL: f64 = 1e-12;
/// Hermiticity / trace tolerance for [`DensityMatrix`].
pub const DENSITY_TOL: f64 = 1e-10;

// Eigenvalues below this fraction of the spectral scale are roundoff and are
// zeroed before taking square roots.
const SQRT_ROUNDOFF: f64 = 1e-14;

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn all_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Largest entrywise deviation `|M_ij - conj(M_ji)|`.
pub fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn max_abs_entry(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Largest singular value.
pub fn spectral_norm(m: &ComplexMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues in ascending order.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    /// Columns are the eigenvectors matching `values`.
    pub vectors: ComplexMatrix,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// `max(|λ|)`, the spectral norm of the decomposed matrix.
    pub fn scale(&self) -> f64 {
        self.min().abs().max(self.max().abs())
    }

    /// Rebuilds `V f(Λ) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            for r in 0..n {
                scaled[(r, k)] *= w;
            }
        }
        &scaled * self.vectors.adjoint()
    }
}

/// Hermitian eigendecomposition. The input is symmetrized before decomposition;
/// deviations from Hermiticity larger than `tol·max(1, max|M_ij|)` are rejected.
pub fn hermitian_eigen(m: &ComplexMatrix, tol: f64) -> Result<Spectrum> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    if !all_finite(m) {
        return Err(Error::NonFinite);
    }
    let deviation = hermitian_deviation(m);
    if deviation > tol * max_abs_entry(m).max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(m.nrows(), order.len(), |r, k| eig.eigenvectors[(r, order[k])]);
    Ok(Spectrum { values, vectors })
}

/// Outcome of a PSD test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdCheck {
    pub psd: bool,
    pub min_eigenvalue: f64,
}

/// True iff `λ_min ≥ -tol·max(1, ‖M‖)`.
pub fn is_psd(m: &ComplexMatrix, tol: f64) -> Result<PsdCheck> {
    let spec = hermitian_eigen(m, tol)?;
    let min_eigenvalue = spec.min();
    Ok(PsdCheck { psd: min_eigenvalue >= -tol * spec.scale().max(1.0), min_eigenvalue })
}

/// Hermitian PSD square root with the default tolerance.
pub fn hermitian_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    hermitian_sqrt_with_tol(m, DEFAULT_PSD_TOL)
}

/// Hermitian PSD square root. Eigenvalues in `[-tol·scale, 0)` are clamped to
/// zero; anything more negative is an error.
pub fn hermitian_sqrt_with_tol(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let spec = hermitian_eigen(m, tol)?;
    let scale = spec.scale().max(1.0);
    if spec.min() < -tol * scale {
        return Err(Error::NotPsd { min_eigenvalue: spec.min() });
    }
    let cut = SQRT_ROUNDOFF * spec.scale();
    Ok(spec.map(|l| if l <= cut { 0.0 } else { l.sqrt() }))
}

/// A normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: ComplexVector,
}

impl PureState {
    /// Accepts amplitudes whose norm is 1 within [`NORM_TOL`].
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let v = ComplexVector::from_vec(amplitudes);
        Self::from_vector(v)
    }

    pub fn from_vector(v: ComplexVector) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::Empty);
        }
        if !v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = v.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amplitudes: v })
    }

    /// Rescales any nonzero vector to unit norm.
    pub fn normalized(v: ComplexVector) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() {
            return Err(Error::NonFinite);
        }
        if norm == 0.0 {
            return Err(Error::NotNormalized { norm });
        }
        Self::from_vector(v.unscale(norm))
    }

    /// Real-amplitude convenience constructor; normalizes its input.
    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::normalized(ComplexVector::from_iterator(amplitudes.len(), amplitudes.iter().map(|&x| c(x, 0.0))))
    }

    /// Canonical basis vector `|index⟩` in dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidArgument(format!("basis index {index} out of range for dimension {dim}")));
        }
        let mut v = ComplexVector::zeros(dim);
        v[index] = c(1.0, 0.0);
        Ok(Self { amplitudes: v })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        PureState { amplitudes: self.amplitudes.kronecker(&other.amplitudes) }
    }

    pub fn tensor_power(&self, copies: usize) -> Result<PureState> {
        if copies == 0 {
            return Err(Error::InvalidArgument("tensor power needs at least one copy".into()));
        }
        let mut out = self.clone();
        for _ in 1..copies {
            out = out.tensor(self);
        }
        Ok(out)
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn density(&self) -> DensityMatrix {
        DensityMatrix { matrix: &self.amplitudes * self.amplitudes.adjoint() }
    }

    /// Multiplies by a global phase `e^{iθ}`.
    pub fn with_phase(&self, theta: f64) -> PureState {
        PureState { amplitudes: self.amplitudes.map(|z| z * Complex64::from_polar(1.0, theta)) }
    }
}

/// A validated density matrix: Hermitian, unit trace, PSD.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.is_empty() {
            return Err(Error::Empty);
        }
        let spec = hermitian_eigen(&matrix, DENSITY_TOL)?;
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > DENSITY_TOL || trace.im.abs() > DENSITY_TOL {
            return Err(Error::BadTrace { trace: trace.re });
        }
        if spec.min() < -DENSITY_TOL {
            return Err(Error::NotPsd { min_eigenvalue: spec.min() });
        }
        Ok(Self { matrix })
    }

    /// Divides a nonzero PSD matrix by its trace.
    pub fn from_unnormalized(matrix: ComplexMatrix) -> Result<Self> {
        let trace = matrix.trace().re;
        if trace.is_nan() || trace <= 0.0 {
            return Err(Error::BadTrace { trace });
        }
        Self::new(matrix.unscale(trace))
    }

    /// `I/d`.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Empty);
        }
        Ok(Self { matrix: ComplexMatrix::identity(dim, dim).unscale(dim as f64) })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix { matrix: self.matrix.kronecker(&other.matrix) }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        // Entries were validated at construction.
        hermitian_eigen(&self.matrix, DENSITY_TOL).map(|s| s.values).unwrap_or_default()
    }
}

/// Gram matrix `[⟨ψ_i|ψ_j⟩]` of a state family.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    matrix: ComplexMatrix,
}

impl GramMatrix {
    /// Validates unit diagonal, Hermiticity and PSD-ness.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let spec = hermitian_eigen(&matrix, DENSITY_TOL)?;
        for i in 0..matrix.nrows() {
            if (matrix[(i, i)] - c(1.0, 0.0)).norm() > DENSITY_TOL {
                return Err(Error::NotNormalized { norm: matrix[(i, i)].norm().sqrt() });
            }
        }
        if spec.min() < -DEFAULT_PSD_TOL {
            return Err(Error::NotPsd { min_eigenvalue: spec.min() });
        }
        Ok(Self { matrix })
    }

    pub fn identity(n: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(n, n) }
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// Builds the Gram matrix of `states`; entry `(i, j)` is `⟨ψ_i|ψ_j⟩`.
pub fn gram_matrix(states: &[PureState]) -> Result<GramMatrix> {
    let first = states.first().ok_or(Error::Empty)?;
    let d = first.dim();
    if let Some(bad) = states.iter().find(|s| s.dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: bad.dim() });
    }
    let cols = state_columns(states);
    let mut matrix = cols.adjoint() * &cols;
    // Exact unit diagonal and exact Hermiticity.
    let n = states.len();
    for i in 0..n {
        matrix[(i, i)] = c(1.0, 0.0);
        for j in 0..i {
            matrix[(i, j)] = matrix[(j, i)].conj();
        }
    }
    Ok(GramMatrix { matrix })
}

/// Stacks states as the columns of a `d × n` matrix.
pub fn state_columns(states: &[PureState]) -> ComplexMatrix {
    let d = states.first().map_or(0, PureState::dim);
    ComplexMatrix::from_fn(d, states.len(), |r, k| states[k].amplitudes[r])
}

/// `|⟨ψ|φ⟩|`.
pub fn pure_fidelity(a: &PureState, b: &PureState) -> Result<f64> {
    Ok(a.inner(b)?.norm().min(1.0))
}

/// `F(ρ, σ) = ‖√ρ √σ‖₁`, the sum of singular values of `√ρ √σ`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: sigma.dim() });
    }
    let product = hermitian_sqrt(&rho.matrix)? * hermitian_sqrt(&sigma.matrix)?;
    let f: f64 = product.singular_values().iter().sum();
    Ok(f.clamp(0.0, 1.0))
}

/// `sqrt(⟨φ|ρ|φ⟩)`, the fidelity between a density matrix and a pure state.
pub fn fidelity_with_pure(rho: &DensityMatrix, phi: &PureState) -> Result<f64> {
    if rho.dim() != phi.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: phi.dim() });
    }
    let v = phi.amplitudes();
    let overlap = v.dotc(&(&rho.matrix * v)).re;
    Ok(overlap.max(0.0).sqrt().min(1.0))
}

/// Orthonormal columns spanning the eigenvectors with eigenvalue above
/// `tol·λ_max`.
pub fn support_basis(rho: &DensityMatrix, tol: f64) -> ComplexMatrix {
    support_of(&rho.matrix, tol)
}

fn support_of(m: &ComplexMatrix, tol: f64) -> ComplexMatrix {
    let spec = match hermitian_eigen(m, DENSITY_TOL) {
        Ok(s) => s,
        Err(_) => return ComplexMatrix::zeros(m.nrows(), 0),
    };
    let cut = tol * spec.max();
    let keep: Vec<usize> = (0..spec.values.len()).filter(|&k| spec.values[k] > cut).collect();
    ComplexMatrix::from_fn(m.nrows(), keep.len(), |r, k| spec.vectors[(r, keep[k])])
}

/// Uniform mixture `(1/n) Σ ρ_i`.
pub fn uniform_mixture(states: &[DensityMatrix]) -> Result<ComplexMatrix> {
    let first = states.first().ok_or(Error::Empty)?;
    let d = first.dim();
    let mut sum = ComplexMatrix::zeros(d, d);
    for s in states {
        if s.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: s.dim() });
        }
        sum += &s.matrix;
    }
    Ok(sum.unscale(states.len() as f64))
}

/// Rank of the support of a state family, measured on the uniform mixture.
pub fn set_support_rank(states: &[DensityMatrix], tol: f64) -> Result<usize> {
    let mix = uniform_mixture(states)?;
    Ok(support_of(&mix, tol).ncols())
}

/// Orthonormal basis of the joint support of a family.
pub fn set_support_basis(states: &[DensityMatrix], tol: f64) -> Result<ComplexMatrix> {
    Ok(support_of(&uniform_mixture(states)?, tol))
}

/// `ρ^{⊗copies}`.
pub fn tensor_power(rho: &DensityMatrix, copies: usize) -> Result<DensityMatrix> {
    if copies == 0 {
        return Err(Error::InvalidArgument("tensor power needs at least one copy".into()));
    }
    let mut out = rho.clone();
    for _ in 1..copies {
        out = out.tensor(rho);
    }
    Ok(out)
}

/// Traces out every subsystem not listed in `keep`. Subsystem 0 is the most
/// significant tensor factor; kept subsystems stay in ascending order.
pub fn partial_trace(rho: &DensityMatrix, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
    let total: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) || total != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: total });
    }
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if let Some(&bad) = kept.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::InvalidArgument(format!("subsystem {bad} out of range")));
    }
    let is_kept: Vec<bool> = (0..dims.len()).map(|s| kept.contains(&s)).collect();
    let out_dim: usize = kept.iter().map(|&k| dims[k]).product();

    let digits = |mut idx: usize| -> Vec<usize> {
        let mut d = vec![0; dims.len()];
        for s in (0..dims.len()).rev() {
            d[s] = idx % dims[s];
            idx /= dims[s];
        }
        d
    };
    let split = |d: &[usize]| -> (usize, usize) {
        let (mut k, mut t) = (0, 0);
        for s in 0..dims.len() {
            if is_kept[s] {
                k = k * dims[s] + d[s];
            } else {
                t = t * dims[s] + d[s];
            }
        }
        (k, t)
    };
    let parts: Vec<(usize, usize)> = (0..total).map(|i| split(&digits(i))).collect();

    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    for i in 0..total {
        let (ki, ti) = parts[i];
        for j in 0..total {
            let (kj, tj) = parts[j];
            if ti == tj {
                out[(ki, kj)] += rho.matrix[(i, j)];
            }
        }
    }
    Ok(DensityMatrix { matrix: out })
}

/// True iff the `d × n` column matrix of `states` has `n` singular values above
/// `tol·σ_max`.
pub fn linear_independence(states: &[PureState], tol: f64) -> Result<bool> {
    Ok(independence_ratio(states)? > tol)
}

/// `σ_min / σ_max` of the state column matrix (0 when `n > d`).
pub fn independence_ratio(states: &[PureState]) -> Result<f64> {
    let first = states.first().ok_or(Error::Empty)?;
    if let Some(bad) = states.iter().find(|s| s.dim() != first.dim()) {
        return Err(Error::DimensionMismatch { expected: first.dim(), found: bad.dim() });
    }
    if states.len() > first.dim() {
        return Ok(0.0);
    }
    let sv = state_columns(states).singular_values();
    Ok(sv.min() / sv.max())
}

/// Thin QR by classical Gram–Schmidt with one reorthogonalization pass.
/// `R` is upper triangular with a nonnegative real diagonal; a zero diagonal
/// entry marks a dependent column (its `Q` column is then zero).
pub fn gram_schmidt(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let (d, n) = a.shape();
    let mut q = ComplexMatrix::zeros(d, n);
    let mut r = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let mut v = a.column(k).into_owned();
        for _pass in 0..2 {
            for j in 0..k {
                let proj = q.column(j).dotc(&v);
                r[(j, k)] += proj;
                v -= q.column(j) * proj;
            }
        }
        let norm = v.norm();
        r[(k, k)] = c(norm, 0.0);
        if norm > 0.0 {
            q.set_column(k, &v.unscale(norm));
        }
    }
    (q, r)
}

/// Extends orthonormal columns `q` (`d × m`) to `total` orthonormal columns by
/// pivoted Gram–Schmidt over the canonical basis: at each step the basis vector
/// with the largest residual is taken, ties going to the lowest index.
pub fn complete_basis(q: &ComplexMatrix, total: usize) -> ComplexMatrix {
    let d = q.nrows();
    let mut cols: Vec<ComplexVector> = q.column_iter().map(|c| c.into_owned()).collect();
    while cols.len() < total.min(d) {
        let mut best: Option<(f64, ComplexVector)> = None;
        for e in 0..d {
            let mut v = ComplexVector::zeros(d);
            v[e] = c(1.0, 0.0);
            for _pass in 0..2 {
                for col in &cols {
                    let proj = col.dotc(&v);
                    v -= col * proj;
                }
            }
            let norm = v.norm();
            if best.as_ref().is_none_or(|(b, _)| norm > b + 1e-12) {
                best = Some((norm, v));
            }
        }
        let (norm, v) = best.expect("dimension is nonzero");
        cols.push(v.unscale(norm));
    }
    ComplexMatrix::from_columns(&cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plus() -> PureState {
        PureState::from_real(&[1.0, 1.0]).unwrap()
    }

    fn real(rows: usize, cols: usize, data: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_row_iterator(rows, cols, data.iter().map(|&x| c(x, 0.0)))
    }

    #[test]
    fn gram_of_basis_and_plus() {
        let e = [PureState::basis(2, 0).unwrap(), PureState::basis(2, 1).unwrap()];
        assert_eq!(gram_matrix(&e).unwrap().matrix(), &ComplexMatrix::identity(2, 2));
        let single = gram_matrix(&[plus()]).unwrap();
        assert_eq!(single.matrix()[(0, 0)], c(1.0, 0.0));

        let pair = [PureState::basis(2, 0).unwrap(), plus()];
        let g = gram_matrix(&pair).unwrap();
        // direct dot products
        let direct = pair[0].amplitudes()[0].conj() * pair[1].amplitudes()[0]
            + pair[0].amplitudes()[1].conj() * pair[1].amplitudes()[1];
        assert!((g.matrix()[(0, 1)] - direct).norm() < 1e-15);
        assert!((g.matrix()[(0, 1)].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn gram_convention_is_conjugate_linear_in_first() {
        let a = PureState::new(vec![c(0.0, 1.0), c(0.0, 0.0)]).unwrap();
        let b = PureState::basis(2, 0).unwrap();
        // ⟨a|b⟩ = conj(i)·1 = -i
        assert_eq!(gram_matrix(&[a, b]).unwrap().matrix()[(0, 1)], c(0.0, -1.0));
    }

    #[test]
    fn gram_rejects_mixed_dimensions() {
        let r = gram_matrix(&[PureState::basis(2, 0).unwrap(), PureState::basis(3, 0).unwrap()]);
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn psd_examples() {
        let id = is_psd(&ComplexMatrix::identity(3, 3), 1e-9).unwrap();
        assert!(id.psd);
        assert!((id.min_eigenvalue - 1.0).abs() < 1e-14);

        let swap = is_psd(&real(2, 2, &[0.0, 1.0, 1.0, 0.0]), 1e-9).unwrap();
        assert!(!swap.psd);
        assert!((swap.min_eigenvalue + 1.0).abs() < 1e-14);

        let half = is_psd(&real(2, 2, &[1.0, 0.5, 0.5, 1.0]), 1e-9).unwrap();
        assert!(half.psd);
        assert!((half.min_eigenvalue - 0.5).abs() < 1e-14);
    }

    #[test]
    fn psd_errors() {
        assert!(matches!(is_psd(&ComplexMatrix::zeros(2, 3), 1e-9), Err(Error::NotSquare { .. })));
        assert!(matches!(is_psd(&real(2, 2, &[1.0, 1.0, 0.0, 1.0]), 1e-9), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn sqrt_examples() {
        let id = ComplexMatrix::identity(2, 2);
        assert!((hermitian_sqrt(&id).unwrap() - &id).norm() < 1e-14);
        let d = hermitian_sqrt(&real(2, 2, &[4.0, 0.0, 0.0, 9.0])).unwrap();
        assert!((d - real(2, 2, &[2.0, 0.0, 0.0, 3.0])).norm() < 1e-14);
        let m = real(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let r = hermitian_sqrt(&m).unwrap();
        assert!(spectral_norm(&(&r * &r - &m)) < 1e-10);
    }

    #[test]
    fn sqrt_clamps_small_negatives_and_rejects_large() {
        let m = real(2, 2, &[1.0, 0.0, 0.0, -1e-12]);
        let r = hermitian_sqrt(&m).unwrap();
        assert_eq!(r[(1, 1)], c(0.0, 0.0));
        let bad = real(2, 2, &[1.0, 0.0, 0.0, -1e-3]);
        assert!(matches!(hermitian_sqrt(&bad), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn fidelity_examples() {
        let zero = PureState::basis(2, 0).unwrap();
        let one = PureState::basis(2, 1).unwrap();
        let rho = DensityMatrix::new(real(2, 2, &[0.7, 0.1, 0.1, 0.3])).unwrap();
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&zero.density(), &one.density()).unwrap() < 1e-15);
        let via_svd = fidelity(&zero.density(), &plus().density()).unwrap();
        let overlap = pure_fidelity(&zero, &plus()).unwrap();
        assert!((via_svd - overlap).abs() < 1e-12);
        assert!((overlap - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((fidelity_with_pure(&zero.density(), &plus()).unwrap() - overlap).abs() < 1e-15);
    }

    #[test]
    fn fidelity_dimension_mismatch() {
        let a = DensityMatrix::maximally_mixed(2).unwrap();
        let b = DensityMatrix::maximally_mixed(3).unwrap();
        assert!(matches!(fidelity(&a, &b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn support_examples() {
        let zero = PureState::basis(2, 0).unwrap().density();
        let s = support_basis(&zero, 1e-8);
        assert_eq!(s.ncols(), 1);
        assert!((s[(0, 0)].norm() - 1.0).abs() < 1e-14);
        assert_eq!(support_basis(&DensityMatrix::maximally_mixed(2).unwrap(), 1e-8).ncols(), 2);
        let skew = DensityMatrix::new(real(2, 2, &[0.99, 0.0, 0.0, 0.01])).unwrap();
        assert_eq!(support_basis(&skew, 1e-8).ncols(), 2);
    }

    #[test]
    fn support_rank_examples() {
        let zero = PureState::basis(2, 0).unwrap().density();
        let one = PureState::basis(2, 1).unwrap().density();
        assert_eq!(set_support_rank(&[zero.clone(), one], 1e-8).unwrap(), 2);
        assert_eq!(set_support_rank(std::slice::from_ref(&zero), 1e-8).unwrap(), 1);
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert_eq!(set_support_rank(&[mixed, zero], 1e-8).unwrap(), 2);
        assert!(matches!(set_support_rank(&[], 1e-8), Err(Error::Empty)));
    }

    #[test]
    fn tensor_power_examples() {
        let rho = DensityMatrix::new(real(2, 2, &[0.8, 0.0, 0.0, 0.2])).unwrap();
        assert_eq!(tensor_power(&rho, 1).unwrap(), rho);
        let zz = tensor_power(&PureState::basis(2, 0).unwrap().density(), 2).unwrap();
        assert_eq!(zz, PureState::basis(4, 0).unwrap().density());
        let mut spec = tensor_power(&rho, 2).unwrap().eigenvalues();
        spec.sort_by(f64::total_cmp);
        let mut expected = vec![0.04, 0.16, 0.16, 0.64];
        expected.sort_by(f64::total_cmp);
        for (a, b) in spec.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(tensor_power(&rho, 0).is_err());
    }

    #[test]
    fn partial_trace_examples() {
        let rho = DensityMatrix::new(real(2, 2, &[0.6, 0.2, 0.2, 0.4])).unwrap();
        let sigma = DensityMatrix::maximally_mixed(3).unwrap();
        let joint = rho.tensor(&sigma);
        let left = partial_trace(&joint, &[2, 3], &[0]).unwrap();
        assert!((left.matrix() - rho.matrix()).norm() < 1e-14);
        let right = partial_trace(&joint, &[2, 3], &[1]).unwrap();
        assert!((right.matrix() - sigma.matrix()).norm() < 1e-14);
        assert_eq!(partial_trace(&joint, &[2, 3], &[0, 1]).unwrap(), joint);

        // Bell state by explicit index sum
        let bell = PureState::from_real(&[1.0, 0.0, 0.0, 1.0]).unwrap().density();
        let reduced = partial_trace(&bell, &[2, 2], &[1]).unwrap();
        let mut oracle = ComplexMatrix::zeros(2, 2);
        for a in 0..2 {
            for b in 0..2 {
                for t in 0..2 {
                    oracle[(a, b)] += bell.matrix()[(t * 2 + a, t * 2 + b)];
                }
            }
        }
        assert!((reduced.matrix() - &oracle).norm() < 1e-15);
        assert!((reduced.matrix() - DensityMatrix::maximally_mixed(2).unwrap().matrix()).norm() < 1e-15);
        assert!(partial_trace(&bell, &[2, 3], &[0]).is_err());
    }

    #[test]
    fn independence_examples() {
        let e0 = PureState::basis(2, 0).unwrap();
        let e1 = PureState::basis(2, 1).unwrap();
        assert!(linear_independence(&[e0.clone(), e1.clone()], 1e-8).unwrap());
        assert!(!linear_independence(&[e0.clone(), e0.clone()], 1e-8).unwrap());
        assert!(!linear_independence(&[e0, plus(), e1], 1e-8).unwrap());
        assert!(linear_independence(&[], 1e-8).is_err());
    }

    #[test]
    fn gram_schmidt_and_completion() {
        let a = real(3, 2, &[1.0, 1.0, 0.0, 1.0, 0.0, 0.0]);
        let (q, r) = gram_schmidt(&a);
        assert!((&q * &r - &a).norm() < 1e-14);
        assert!((q.adjoint() * &q - ComplexMatrix::identity(2, 2)).norm() < 1e-14);
        let full = complete_basis(&q, 3);
        assert_eq!(full.ncols(), 3);
        assert!((full.adjoint() * &full - ComplexMatrix::identity(3, 3)).norm() < 1e-14);
    }

    #[test]
    fn state_validation() {
        assert!(matches!(PureState::new(vec![c(1.0, 0.0), c(1.0, 0.0)]), Err(Error::NotNormalized { .. })));
        assert!(matches!(PureState::new(vec![c(f64::NAN, 0.0)]), Err(Error::NonFinite)));
        assert!(DensityMatrix::new(real(2, 2, &[0.5, 0.0, 0.0, 0.6])).is_err());
        assert!(DensityMatrix::new(real(2, 2, &[1.2, 0.0, 0.0, -0.2])).is_err());
    }
}
