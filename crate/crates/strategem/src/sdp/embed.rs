//! Complex Hermitian to real symmetric embeddings and the scaled
//! triangular vectorization used by conic solvers.
//!
//! A Hermitian operator `h = h_re + i·h_im` embeds as the real symmetric
//! matrix `[[h_re, -h_im], [h_im, h_re]]` of twice the dimension; the
//! embedding doubles every eigenvalue's multiplicity and preserves
//! positivity. Going back, [`hsym`] reads off the Hermitian matrix whose
//! embedding is the structured symmetrization of an arbitrary real
//! symmetric matrix; feasibility and objective values are preserved in both
//! directions, so semidefinite programs over Hermitian operators can be
//! solved entirely over real symmetric cones without extra structure
//! constraints.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::linalg::ComplexMatrix;

pub type RealMatrix = DMatrix<f64>;

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// The real symmetric embedding `[[Re h, -Im h], [Im h, Re h]]`.
pub fn real_embed(h: &ComplexMatrix) -> RealMatrix {
    let n = h.nrows();
    let mut m = RealMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let v = h[(i, j)];
            m[(i, j)] = v.re;
            m[(i, j + n)] = -v.im;
            m[(i + n, j)] = v.im;
            m[(i + n, j + n)] = v.re;
        }
    }
    m
}

/// The Hermitian matrix whose embedding is the structured symmetrization of
/// a real `2n×2n` matrix `[[A, B], [Bᵀ, D]]`: `(A+D)/2 + i(Bᵀ-B)/2`.
///
/// For every Hermitian `g` and real symmetric `m` of matching sizes,
/// `⟨real_embed(g), m⟩ = 2·⟨g, hsym(m)⟩`; this is what makes plain real PSD
/// blocks sufficient for Hermitian programs.
pub fn hsym(m: &RealMatrix) -> ComplexMatrix {
    let n = m.nrows() / 2;
    ComplexMatrix::from_fn(n, n, |i, j| {
        let re = 0.5 * (m[(i, j)] + m[(i + n, j + n)]);
        let im = 0.5 * (m[(j, i + n)] - m[(i, j + n)]);
        Complex64::new(re, im)
    })
}

/// Length of the scaled triangular vectorization of an `n×n` symmetric
/// matrix.
pub fn svec_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Scaled triangular vectorization: upper triangle, column major, with
/// off-diagonal entries multiplied by √2 so that inner products are
/// preserved.
pub fn svec(m: &RealMatrix) -> Vec<f64> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(svec_len(n));
    for j in 0..n {
        for i in 0..=j {
            if i == j {
                out.push(m[(i, j)]);
            } else {
                out.push(SQRT2 * m[(i, j)]);
            }
        }
    }
    out
}

/// Inverse of [`svec`].
pub fn smat(v: &[f64], n: usize) -> RealMatrix {
    assert_eq!(v.len(), svec_len(n), "svec length mismatch");
    let mut m = RealMatrix::zeros(n, n);
    let mut idx = 0;
    for j in 0..n {
        for i in 0..=j {
            if i == j {
                m[(i, j)] = v[idx];
            } else {
                let val = v[idx] / SQRT2;
                m[(i, j)] = val;
                m[(j, i)] = val;
            }
            idx += 1;
        }
    }
    m
}

/// The `(i, j)` entry's position within [`svec`] order, for `i ≤ j`.
pub fn svec_index(i: usize, j: usize) -> usize {
    debug_assert!(i <= j);
    j * (j + 1) / 2 + i
}
