//! Dense complex linear algebra shared by every other module.
//!
//! All operators in this crate live on small tensor-product spaces (a few
//! hundred dimensions at most), so everything here is dense and favors
//! clarity over asymptotic cleverness. Matrices are [`nalgebra`] dynamic
//! matrices over `Complex64`; vectorization is row-major, so the output index
//! of a map is the most significant index of its vectorization.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::tol;

/// Dense complex matrix used throughout the crate.
pub type ComplexMatrix = DMatrix<Complex64>;
/// Dense complex column vector.
pub type ComplexVector = DVector<Complex64>;

pub const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest entrywise absolute value, `max_ij |m_ij|`. Zero for empty matrices.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Entrywise defect from hermiticity, `max |m - m†|`.
pub fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Defect of `v` from being an isometry, `max |v†v - I|`.
pub fn isometry_defect(v: &ComplexMatrix) -> f64 {
    let gram = v.adjoint() * v;
    max_abs(&(&gram - ComplexMatrix::identity(v.ncols(), v.ncols())))
}

/// Errors unless every entry of `m` is finite.
pub fn ensure_finite(m: &ComplexMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput("matrix has non-finite entries".into()))
    }
}

/// Kronecker product with the left factor most significant.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Kronecker product of a list of factors, left to right. An empty list
/// yields the scalar identity `[1]`.
pub fn kron_all(factors: &[&ComplexMatrix]) -> ComplexMatrix {
    let mut out = ComplexMatrix::from_element(1, 1, C_ONE);
    for f in factors {
        out = kron(&out, f);
    }
    out
}

/// Row-major vectorization: `vec(Σ a_ji |j⟩⟨i|) = Σ a_ji |j⟩⊗|i⟩`, so the
/// output (row) index is the most significant index of the result.
pub fn vectorize(m: &ComplexMatrix) -> ComplexVector {
    let (rows, cols) = m.shape();
    ComplexVector::from_fn(rows * cols, |i, _| m[(i / cols, i % cols)])
}

/// Inverse of [`vectorize`] for the given shape.
pub fn devectorize(v: &ComplexVector, rows: usize, cols: usize) -> Result<ComplexMatrix> {
    if v.len() != rows * cols {
        return Err(Error::Dimension(format!(
            "cannot reshape a vector of length {} into {}x{}",
            v.len(),
            rows,
            cols
        )));
    }
    Ok(ComplexMatrix::from_fn(rows, cols, |r, c| v[r * cols + c]))
}

/// Mixed-radix strides for a factor list: `stride[k] = Π_{j>k} dims[j]`.
fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Flat offsets of every multi-index over the selected factors, holding the
/// remaining factors at zero.
fn factor_offsets(dims: &[usize], selected: &[usize]) -> Vec<usize> {
    let all = strides(dims);
    let count: usize = selected.iter().map(|&f| dims[f]).product();
    let mut out = Vec::with_capacity(count);
    for mut idx in 0..count {
        let mut offset = 0;
        for &f in selected.iter().rev() {
            offset += (idx % dims[f]) * all[f];
            idx /= dims[f];
        }
        out.push(offset);
    }
    out
}

/// Partial trace over the factors listed in `traced` (0-based indices into
/// `dims`). The kept factors keep their relative order.
pub fn partial_trace(
    m: &ComplexMatrix,
    dims: &[usize],
    traced: &[usize],
) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if dims.iter().any(|&d| d == 0) {
        return Err(Error::Shape("zero-dimensional tensor factor".into()));
    }
    if m.nrows() != total || m.ncols() != total {
        return Err(Error::Dimension(format!(
            "matrix is {}x{} but the factor dims multiply to {}",
            m.nrows(),
            m.ncols(),
            total
        )));
    }
    let mut is_traced = vec![false; dims.len()];
    for &f in traced {
        if f >= dims.len() {
            return Err(Error::Dimension(format!(
                "traced factor {} out of range for {} factors",
                f,
                dims.len()
            )));
        }
        if std::mem::replace(&mut is_traced[f], true) {
            return Err(Error::InvalidInput(format!("factor {f} traced twice")));
        }
    }
    let kept: Vec<usize> = (0..dims.len()).filter(|&f| !is_traced[f]).collect();
    let traced_sorted: Vec<usize> = (0..dims.len()).filter(|&f| is_traced[f]).collect();
    let kept_offsets = factor_offsets(dims, &kept);
    let traced_offsets = factor_offsets(dims, &traced_sorted);
    let out_dim = kept_offsets.len();
    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    for (r, &ro) in kept_offsets.iter().enumerate() {
        for (c, &co) in kept_offsets.iter().enumerate() {
            let mut acc = C_ZERO;
            for &to in &traced_offsets {
                acc += m[(ro + to, co + to)];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(out)
}

/// A square matrix certified Hermitian on construction and stored in exactly
/// symmetrized form.
#[derive(Clone, Debug)]
pub struct HermitianOperator {
    mat: ComplexMatrix,
}

impl HermitianOperator {
    /// Accepts `m` if it is square, finite, and Hermitian within
    /// [`tol::TOL_HERM`]; stores `(m + m†)/2`.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension(format!(
                "Hermitian operator must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        ensure_finite(&m)?;
        let defect = hermiticity_defect(&m);
        if defect > tol::TOL_HERM {
            return Err(Error::NotHermitian {
                defect,
                tol: tol::TOL_HERM,
            });
        }
        let mat = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        Ok(Self { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    /// Real trace (the imaginary part is zero by construction).
    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }
}

/// Eigendecomposition of a Hermitian operator with eigenvalues ascending.
/// Returns `(values, vectors)` with eigenvector `k` in column `k`.
pub fn eigh(h: &HermitianOperator) -> (Vec<f64>, ComplexMatrix) {
    let se = nalgebra::SymmetricEigen::new(h.matrix().clone());
    let mut order: Vec<usize> = (0..se.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let dim = h.dim();
    let vectors = ComplexMatrix::from_fn(dim, dim, |r, c| se.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Smallest eigenvalue of a Hermitian operator.
pub fn min_eigenvalue(h: &HermitianOperator) -> f64 {
    let (values, _) = eigh(h);
    values.first().copied().unwrap_or(0.0)
}

/// [`eigh`] for a raw matrix, which must be Hermitian within
/// [`tol::TOL_HERM`].
pub fn eigh_of(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    Ok(eigh(&HermitianOperator::new(m.clone())?))
}

/// [`min_eigenvalue`] for a raw matrix, which must be Hermitian within
/// [`tol::TOL_HERM`].
pub fn min_eigenvalue_of(m: &ComplexMatrix) -> Result<f64> {
    Ok(min_eigenvalue(&HermitianOperator::new(m.clone())?))
}

/// Principal square root of a positive semidefinite operator. Eigenvalues in
/// `[-TOL_PSD, 0)` are clamped to zero; anything below is rejected.
pub fn sqrt_psd(h: &HermitianOperator) -> Result<HermitianOperator> {
    let (values, vectors) = eigh(h);
    let min_eig = values.first().copied().unwrap_or(0.0);
    if min_eig < -tol::TOL_PSD {
        return Err(Error::NotPositiveSemidefinite { min_eig });
    }
    let roots = ComplexVector::from_iterator(
        values.len(),
        values
            .iter()
            .map(|&v| Complex64::new(v.max(0.0).sqrt(), 0.0)),
    );
    let mat = &vectors * ComplexMatrix::from_diagonal(&roots) * vectors.adjoint();
    HermitianOperator::new(mat)
}

/// Projection onto the positive semidefinite cone: every negative eigenvalue
/// is clamped to zero, however large. Intended for hygiene on matrices
/// recovered from a numerical solver; use [`sqrt_psd`]'s gate when a genuine
/// PSD certificate is required.
pub fn clamp_psd(h: &HermitianOperator) -> HermitianOperator {
    let (values, vectors) = eigh(h);
    let clamped = ComplexVector::from_iterator(
        values.len(),
        values.iter().map(|&v| Complex64::new(v.max(0.0), 0.0)),
    );
    let mat = &vectors * ComplexMatrix::from_diagonal(&clamped) * vectors.adjoint();
    HermitianOperator::new(mat).expect("projection of a Hermitian matrix stays Hermitian")
}

/// Trace norm: the sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    m.clone().svd(false, false).singular_values.iter().sum()
}

/// Operator norm: the largest singular value. Zero for empty matrices.
pub fn op_norm(m: &ComplexMatrix) -> f64 {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0_f64, |acc, &s| acc.max(s))
}

/// Fidelity `F(p, q) = ‖√p √q‖₁` between positive semidefinite operators.
/// Callers are expected to pass unit-trace states; the value is then in
/// `[0, 1]` up to numerical error.
pub fn state_fidelity(p: &HermitianOperator, q: &HermitianOperator) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::Dimension(format!(
            "state dimensions {} and {} differ",
            p.dim(),
            q.dim()
        )));
    }
    let sp = sqrt_psd(p)?;
    let sq = sqrt_psd(q)?;
    Ok(trace_norm(&(sp.matrix() * sq.matrix())))
}

/// Matrix with independent standard complex Gaussian entries.
pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-random isometry with `rows >= cols`, drawn by QR-decomposing a
/// Gaussian matrix and fixing the phases of R's diagonal.
pub fn haar_isometry<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> Result<ComplexMatrix> {
    if rows < cols {
        return Err(Error::Dimension(format!(
            "an isometry needs rows >= cols, got {rows}x{cols}"
        )));
    }
    let qr = gaussian_matrix(rows, cols, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..cols {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            for i in 0..rows {
                q[(i, j)] *= phase;
            }
        }
    }
    Ok(q)
}

/// Random density matrix of the given rank: `GG†/tr(GG†)` for a Gaussian
/// `dim x rank` factor.
pub fn random_density<R: Rng + ?Sized>(
    dim: usize,
    rank: usize,
    rng: &mut R,
) -> Result<HermitianOperator> {
    if rank == 0 || rank > dim {
        return Err(Error::InvalidInput(format!(
            "density rank {rank} must be in 1..={dim}"
        )));
    }
    let g = gaussian_matrix(dim, rank, rng);
    let gram = &g * g.adjoint();
    let trace = gram.trace().re;
    HermitianOperator::new(gram / Complex64::new(trace, 0.0))
}
