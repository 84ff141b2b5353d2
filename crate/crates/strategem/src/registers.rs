//! Register bookkeeping for tensor-product spaces.
//!
//! Multi-round interactions juggle many named tensor factors: per-round input
//! registers `X(i)`, per-round output registers `Y(i)`, the strategy-side
//! memory `Z`, and the co-strategy-side memory `W`. This module owns the
//! round structure ([`RoundShape`]), ordered labeled factor lists
//! ([`FactorOrder`]), and the permutation and identity-embedding primitives
//! the rest of the crate uses to move operators between factor orders.
//!
//! Flat indices are mixed-radix with the *leftmost factor most significant*,
//! matching [`crate::linalg::kron`].

use crate::error::{Error, Result};
use crate::linalg::{kron, ComplexMatrix, ComplexVector};

/// Number of inputs/outputs per round for one side of an interaction.
///
/// Round `i` (0-based) receives register `X(i)` of dimension `x_dim(i)` and
/// answers with register `Y(i)` of dimension `y_dim(i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundShape {
    x_dims: Vec<usize>,
    y_dims: Vec<usize>,
}

impl RoundShape {
    pub fn new(x_dims: Vec<usize>, y_dims: Vec<usize>) -> Result<Self> {
        if x_dims.is_empty() || x_dims.len() != y_dims.len() {
            return Err(Error::Shape(format!(
                "need equally many input and output dims, at least one round; got {} and {}",
                x_dims.len(),
                y_dims.len()
            )));
        }
        if x_dims.iter().chain(y_dims.iter()).any(|&d| d == 0) {
            return Err(Error::Shape("zero-dimensional register".into()));
        }
        Ok(Self { x_dims, y_dims })
    }

    pub fn rounds(&self) -> usize {
        self.x_dims.len()
    }

    pub fn x_dim(&self, round: usize) -> usize {
        self.x_dims[round]
    }

    pub fn y_dim(&self, round: usize) -> usize {
        self.y_dims[round]
    }

    pub fn x_dims(&self) -> &[usize] {
        &self.x_dims
    }

    pub fn y_dims(&self) -> &[usize] {
        &self.y_dims
    }

    /// Product of all input dimensions.
    pub fn x_total(&self) -> usize {
        self.x_dims.iter().product()
    }

    /// Product of all output dimensions.
    pub fn y_total(&self) -> usize {
        self.y_dims.iter().product()
    }

    /// Dimension of the joint Choi space `Y(0)⊗…⊗Y(r-1)⊗X(0)⊗…⊗X(r-1)`.
    pub fn choi_dim(&self) -> usize {
        self.x_total() * self.y_total()
    }

    /// Canonical Choi factor order: all outputs, then all inputs.
    pub fn choi_order(&self) -> FactorOrder {
        let mut factors = Vec::with_capacity(2 * self.rounds());
        for (i, &d) in self.y_dims.iter().enumerate() {
            factors.push((Factor::Y(i), d));
        }
        for (i, &d) in self.x_dims.iter().enumerate() {
            factors.push((Factor::X(i), d));
        }
        FactorOrder::new(factors).expect("canonical order is well formed")
    }

    /// Factor order of the k-th truncated strategy space
    /// `Y(0..=k)⊗X(0..=k)` (0-based `k < rounds`). These carry the strategy
    /// validation chain.
    pub fn strategy_chain_order(&self, k: usize) -> FactorOrder {
        let mut factors = Vec::new();
        for i in 0..=k {
            factors.push((Factor::Y(i), self.y_dims[i]));
        }
        for i in 0..=k {
            factors.push((Factor::X(i), self.x_dims[i]));
        }
        FactorOrder::new(factors).expect("chain order is well formed")
    }

    /// Factor order of the k-th truncated co-strategy space
    /// `Y(0..k)⊗X(0..=k)` (0-based `k < rounds`; note the outputs stop one
    /// round earlier). These carry the co-strategy validation chain.
    pub fn costrategy_chain_order(&self, k: usize) -> FactorOrder {
        let mut factors = Vec::new();
        for i in 0..k {
            factors.push((Factor::Y(i), self.y_dims[i]));
        }
        for i in 0..=k {
            factors.push((Factor::X(i), self.x_dims[i]));
        }
        FactorOrder::new(factors).expect("chain order is well formed")
    }
}

/// A named tensor factor: a per-round input or output register, or one of
/// the two memory registers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Factor {
    /// Input register of the given 0-based round.
    X(usize),
    /// Output register of the given 0-based round.
    Y(usize),
    /// Strategy-side final memory.
    Z,
    /// Co-strategy-side final memory.
    W,
}

impl std::fmt::Display for Factor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Factor::X(i) => write!(f, "X{i}"),
            Factor::Y(i) => write!(f, "Y{i}"),
            Factor::Z => write!(f, "Z"),
            Factor::W => write!(f, "W"),
        }
    }
}

/// An ordered list of distinct labeled factors with their dimensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorOrder {
    factors: Vec<(Factor, usize)>,
}

impl FactorOrder {
    pub fn new(factors: Vec<(Factor, usize)>) -> Result<Self> {
        for (k, &(label, dim)) in factors.iter().enumerate() {
            if dim == 0 {
                return Err(Error::Shape(format!("factor {label} has dimension zero")));
            }
            if factors[..k].iter().any(|&(other, _)| other == label) {
                return Err(Error::Labels(format!("factor {label} appears twice")));
            }
        }
        Ok(Self { factors })
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|&(_, d)| d).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(|&(_, d)| d).product()
    }

    pub fn factors(&self) -> &[(Factor, usize)] {
        &self.factors
    }

    pub fn position(&self, label: Factor) -> Option<usize> {
        self.factors.iter().position(|&(f, _)| f == label)
    }

    /// The permutation sending `self` to `to`: entry `j` is the position in
    /// `self` of the factor that lands at slot `j` of `to`. Errors unless the
    /// two orders contain exactly the same labeled factors with equal dims.
    pub fn permutation_to(&self, to: &FactorOrder) -> Result<Vec<usize>> {
        if self.len() != to.len() {
            return Err(Error::Labels(format!(
                "factor counts differ: {} vs {}",
                self.len(),
                to.len()
            )));
        }
        let mut src = Vec::with_capacity(to.len());
        for &(label, dim) in &to.factors {
            match self.position(label) {
                Some(p) if self.factors[p].1 == dim => src.push(p),
                Some(p) => {
                    return Err(Error::Dimension(format!(
                        "factor {label} has dim {} on one side and {dim} on the other",
                        self.factors[p].1
                    )))
                }
                None => return Err(Error::Labels(format!("factor {label} missing"))),
            }
        }
        Ok(src)
    }

    /// A copy with one more factor inserted at `position`.
    pub fn with_inserted(&self, position: usize, label: Factor, dim: usize) -> Result<FactorOrder> {
        if position > self.len() {
            return Err(Error::Shape(format!(
                "insert position {position} out of range for {} factors",
                self.len()
            )));
        }
        let mut factors = self.factors.clone();
        factors.insert(position, (label, dim));
        FactorOrder::new(factors)
    }
}

/// Validates that `src` is a permutation of `0..n`.
fn check_permutation(n: usize, src: &[usize]) -> Result<()> {
    if src.len() != n {
        return Err(Error::Shape(format!(
            "permutation length {} does not match {} factors",
            src.len(),
            n
        )));
    }
    let mut seen = vec![false; n];
    for &s in src {
        if s >= n || std::mem::replace(&mut seen[s], true) {
            return Err(Error::Shape("not a permutation".into()));
        }
    }
    Ok(())
}

/// Flat index remap realizing a factor permutation: output slot `j` of the
/// new order is factor `src[j]` of `dims`. `map[old_flat] = new_flat`.
fn flat_remap(dims: &[usize], src: &[usize]) -> Result<Vec<usize>> {
    check_permutation(dims.len(), src)?;
    let n = dims.len();
    let total: usize = dims.iter().product();
    let new_dims: Vec<usize> = src.iter().map(|&s| dims[s]).collect();
    let mut new_strides = vec![1usize; n];
    for k in (0..n.saturating_sub(1)).rev() {
        new_strides[k] = new_strides[k + 1] * new_dims[k + 1];
    }
    // new_stride_by_old[f] = stride of old factor f in the new layout
    let mut stride_by_old = vec![0usize; n];
    for j in 0..n {
        stride_by_old[src[j]] = new_strides[j];
    }
    let mut map = vec![0usize; total];
    for old in 0..total {
        let mut rem = old;
        let mut new = 0;
        for f in (0..n).rev() {
            new += (rem % dims[f]) * stride_by_old[f];
            rem /= dims[f];
        }
        map[old] = new;
    }
    Ok(map)
}

/// Permutes the tensor factors of a vector: slot `j` of the result is factor
/// `src[j]` of the input.
pub fn permute_vector_factors(
    v: &ComplexVector,
    dims: &[usize],
    src: &[usize],
) -> Result<ComplexVector> {
    let total: usize = dims.iter().product();
    if v.len() != total {
        return Err(Error::Dimension(format!(
            "vector length {} does not match factor dims product {}",
            v.len(),
            total
        )));
    }
    let map = flat_remap(dims, src)?;
    let mut out = ComplexVector::zeros(total);
    for (old, &new) in map.iter().enumerate() {
        out[new] = v[old];
    }
    Ok(out)
}

/// Permutes the row factors of a (possibly rectangular) matrix, leaving the
/// column space untouched.
pub fn permute_matrix_rows(
    m: &ComplexMatrix,
    row_dims: &[usize],
    src: &[usize],
) -> Result<ComplexMatrix> {
    let total: usize = row_dims.iter().product();
    if m.nrows() != total {
        return Err(Error::Dimension(format!(
            "matrix has {} rows but factor dims multiply to {}",
            m.nrows(),
            total
        )));
    }
    let map = flat_remap(row_dims, src)?;
    let mut out = ComplexMatrix::zeros(m.nrows(), m.ncols());
    for old in 0..m.nrows() {
        for c in 0..m.ncols() {
            out[(map[old], c)] = m[(old, c)];
        }
    }
    Ok(out)
}

/// Permutes the tensor factors of a square operator (rows and columns move
/// together): slot `j` of the result is factor `src[j]` of the input.
pub fn permute_matrix_factors(
    m: &ComplexMatrix,
    dims: &[usize],
    src: &[usize],
) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if m.nrows() != total || m.ncols() != total {
        return Err(Error::Dimension(format!(
            "matrix is {}x{} but factor dims multiply to {}",
            m.nrows(),
            m.ncols(),
            total
        )));
    }
    let map = flat_remap(dims, src)?;
    let mut out = ComplexMatrix::zeros(total, total);
    for r in 0..total {
        for c in 0..total {
            out[(map[r], map[c])] = m[(r, c)];
        }
    }
    Ok(out)
}

/// Permutes a square operator between two labeled factor orders.
pub fn permute_factors(
    m: &ComplexMatrix,
    from: &FactorOrder,
    to: &FactorOrder,
) -> Result<ComplexMatrix> {
    let src = from.permutation_to(to)?;
    permute_matrix_factors(m, &from.dims(), &src)
}

/// Tensors an identity factor of dimension `id_dim` into `m` at factor slot
/// `position` (0-based, counted in the factor list `dims` of `m`; `position`
/// may equal `dims.len()` to append).
pub fn embed_identity(
    m: &ComplexMatrix,
    dims: &[usize],
    position: usize,
    id_dim: usize,
) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if m.nrows() != total || m.ncols() != total {
        return Err(Error::Dimension(format!(
            "matrix is {}x{} but factor dims multiply to {}",
            m.nrows(),
            m.ncols(),
            total
        )));
    }
    if position > dims.len() {
        return Err(Error::Shape(format!(
            "embed position {position} out of range for {} factors",
            dims.len()
        )));
    }
    if id_dim == 0 {
        return Err(Error::Shape("zero-dimensional identity factor".into()));
    }
    let grown = kron(m, &ComplexMatrix::identity(id_dim, id_dim));
    // Move the appended factor (index dims.len()) to `position`.
    let mut grown_dims: Vec<usize> = dims.to_vec();
    grown_dims.push(id_dim);
    let mut src: Vec<usize> = Vec::with_capacity(grown_dims.len());
    for j in 0..dims.len() + 1 {
        if j == position {
            src.push(dims.len());
        }
        if j < dims.len() {
            src.push(j);
        }
    }
    permute_matrix_factors(&grown, &grown_dims, &src)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{gaussian_matrix, kron_all, max_abs, partial_trace};
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn rng(seed: u64) -> ChaCha12Rng {
        ChaCha12Rng::seed_from_u64(seed)
    }

    fn diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        max_abs(&(a - b))
    }

    #[test]
    fn round_shape_validates() {
        assert!(RoundShape::new(vec![], vec![]).is_err());
        assert!(RoundShape::new(vec![2], vec![2, 2]).is_err());
        assert!(RoundShape::new(vec![2, 0], vec![2, 2]).is_err());
        let s = RoundShape::new(vec![1, 2], vec![2, 3]).unwrap();
        assert_eq!(s.rounds(), 2);
        assert_eq!(s.choi_dim(), 12);
    }

    #[test]
    fn choi_order_lists_outputs_then_inputs() {
        let s = RoundShape::new(vec![2, 3], vec![4, 5]).unwrap();
        let order = s.choi_order();
        assert_eq!(
            order.factors(),
            &[
                (Factor::Y(0), 4),
                (Factor::Y(1), 5),
                (Factor::X(0), 2),
                (Factor::X(1), 3)
            ]
        );
        assert_eq!(order.total_dim(), 120);
    }

    #[test]
    fn permute_matches_kron_reordering_oracle() {
        // Permuting the factors of a ⊗ b ⊗ c must equal the kron built in the
        // permuted order; this pins the index convention.
        let mut r = rng(3);
        let a = gaussian_matrix(2, 2, &mut r);
        let b = gaussian_matrix(3, 3, &mut r);
        let c = gaussian_matrix(2, 2, &mut r);
        let composed = kron_all(&[&a, &b, &c]);
        let perms: [([usize; 3], [&ComplexMatrix; 3]); 3] = [
            ([1, 0, 2], [&b, &a, &c]),
            ([2, 1, 0], [&c, &b, &a]),
            ([1, 2, 0], [&b, &c, &a]),
        ];
        for (src, expect_factors) in perms {
            let permuted = permute_matrix_factors(&composed, &[2, 3, 2], &src).unwrap();
            let expect = kron_all(&expect_factors);
            assert!(diff(&permuted, &expect) < 1e-13, "perm {src:?}");
        }
    }

    #[test]
    fn permute_vector_consistent_with_matrix() {
        let mut r = rng(5);
        let v = crate::linalg::gaussian_matrix(12, 1, &mut r);
        let v = ComplexVector::from_iterator(12, v.iter().copied());
        let dims = [2usize, 3, 2];
        let src = [2usize, 0, 1];
        let pv = permute_vector_factors(&v, &dims, &src).unwrap();
        let outer = &v * v.adjoint();
        let pouter = permute_matrix_factors(&outer, &dims, &src).unwrap();
        assert!(diff(&pouter, &(&pv * pv.adjoint())) < 1e-13);
    }

    #[test]
    fn permute_roundtrip_is_identity() {
        let mut r = rng(7);
        let dims = [2usize, 2, 3];
        let m = gaussian_matrix(12, 12, &mut r);
        let src = [2usize, 0, 1];
        // Inverse permutation: inv[src[j]] = j.
        let mut inv = [0usize; 3];
        for (j, &s) in src.iter().enumerate() {
            inv[s] = j;
        }
        let permuted_dims: Vec<usize> = src.iter().map(|&s| dims[s]).collect();
        let there = permute_matrix_factors(&m, &dims, &src).unwrap();
        let back = permute_matrix_factors(&there, &permuted_dims, &inv).unwrap();
        assert!(diff(&back, &m) < 1e-15);
    }

    #[test]
    fn labeled_permute_checks_labels_and_dims() {
        let from = FactorOrder::new(vec![(Factor::Y(0), 2), (Factor::X(0), 3)]).unwrap();
        let to = FactorOrder::new(vec![(Factor::X(0), 3), (Factor::Y(0), 2)]).unwrap();
        let mut r = rng(11);
        let m = gaussian_matrix(6, 6, &mut r);
        let moved = permute_factors(&m, &from, &to).unwrap();
        let back = permute_factors(&moved, &to, &from).unwrap();
        assert!(diff(&back, &m) < 1e-15);

        let wrong_dim = FactorOrder::new(vec![(Factor::X(0), 2), (Factor::Y(0), 3)]).unwrap();
        assert!(permute_factors(&m, &from, &wrong_dim).is_err());
        let wrong_label = FactorOrder::new(vec![(Factor::X(1), 3), (Factor::Y(0), 2)]).unwrap();
        assert!(permute_factors(&m, &from, &wrong_label).is_err());
        assert!(FactorOrder::new(vec![(Factor::Z, 2), (Factor::Z, 2)]).is_err());
    }

    #[test]
    fn embed_identity_positions() {
        let mut r = rng(13);
        let m = gaussian_matrix(6, 6, &mut r);
        let dims = [2usize, 3];
        let id4 = ComplexMatrix::identity(4, 4);

        let appended = embed_identity(&m, &dims, 2, 4).unwrap();
        assert!(diff(&appended, &kron(&m, &id4)) < 1e-15);

        let prepended = embed_identity(&m, &dims, 0, 4).unwrap();
        assert!(diff(&prepended, &kron(&id4, &m)) < 1e-15);

        // Middle insertion agrees with tracing back out.
        let middle = embed_identity(&m, &dims, 1, 4).unwrap();
        let traced = partial_trace(&middle, &[2, 4, 3], &[1]).unwrap();
        assert!(diff(&traced, &(&m * Complex64::new(4.0, 0.0))) < 1e-13);
        assert!(embed_identity(&m, &dims, 3, 4).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn prop_permute_preserves_trace_and_norm(seed in 0u64..500) {
            let mut r = rng(seed);
            let dims = [2usize, 3, 2];
            let m = gaussian_matrix(12, 12, &mut r);
            let src = [1usize, 2, 0];
            let p = permute_matrix_factors(&m, &dims, &src).unwrap();
            prop_assert!((p.trace() - m.trace()).norm() < 1e-12);
            prop_assert!((max_abs(&p) - max_abs(&m)).abs() < 1e-15);
        }
    }
}
