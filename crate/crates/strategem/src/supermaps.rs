//! Strategy supermaps: completely positive maps between Choi
//! representations of strategies, their adjoints, and monotonicity of the
//! fidelity and the norm under them.
//!
//! A supermap `Υ` takes `r`-round strategies to `r'`-round strategies and is
//! carried here by explicit Kraus factors, `Υ(S) = Σ_k M_k S M_k†`. Two
//! constructions are shipped: composition with a channel on every round's
//! input and output ([`Supermap::from_channel_composition`]), and padding by
//! an inert extra round ([`Supermap::append_reply_round`]). That a
//! construction really preserves strategies is certified empirically on a
//! batch of random strategies at build time; no structural characterization
//! is attempted.
//!
//! The adjoint `Υ*(B) = Σ_k M_k† B M_k` of a strategy supermap sends
//! co-strategies to co-strategies, which [`Supermap::adjoint`] exposes and
//! the tests verify through `validate_costrategy`. On top of the pair sit
//! the two monotonicity statements this module checks empirically:
//! applying a supermap to both strategies can only raise their fidelity
//! ([`monotonicity_check_fidelity`]) and can only shrink the strategy norm
//! of a difference ([`monotonicity_check_norm`]). The fidelity check feeds
//! the solver purifications dilated through the Kraus factors themselves:
//! if `s_a` are memory slices of a purification of `S`, the vectors
//! `M_k s_a` indexed by `(a, k)` purify `Υ(S)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fidelity::{strategy_fidelity, strategy_fidelity_purified};
use crate::linalg::{kron, kron_all, ComplexMatrix, ComplexVector, HermitianOperator};
use crate::norm::strategy_norm;
use crate::registers::{permute_matrix_rows, RoundShape};
use crate::sdp::SolveOptions;
use crate::strategies::{
    random_pure_strategy, strategy_choi, validate_strategy, CoStrategyChoi, Purification,
    PureStrategy, StrategyChoi,
};
use crate::tol;

/// A completely positive map between strategy Choi representations, held as
/// explicit Kraus factors.
#[derive(Clone, Debug)]
pub struct Supermap {
    kraus_factors: Vec<ComplexMatrix>,
    in_shape: RoundShape,
    out_shape: RoundShape,
}

impl Supermap {
    /// Wraps explicit Kraus factors after checking their dimensions. No
    /// strategy-preservation check is run here; see
    /// [`Supermap::certify_strategy_preservation`].
    pub fn new(
        in_shape: RoundShape,
        out_shape: RoundShape,
        kraus_factors: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        if kraus_factors.is_empty() {
            return Err(Error::InvalidInput("no Kraus factors".into()));
        }
        let rows = out_shape.choi_dim();
        let cols = in_shape.choi_dim();
        for (k, m) in kraus_factors.iter().enumerate() {
            if m.nrows() != rows || m.ncols() != cols {
                return Err(Error::Dimension(format!(
                    "Kraus factor {k} is {}x{}, shapes require {rows}x{cols}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        Ok(Self {
            kraus_factors,
            in_shape,
            out_shape,
        })
    }

    /// The supermap that leaves every strategy unchanged.
    pub fn identity(shape: &RoundShape) -> Self {
        let d = shape.choi_dim();
        Self {
            kraus_factors: vec![ComplexMatrix::identity(d, d)],
            in_shape: shape.clone(),
            out_shape: shape.clone(),
        }
    }

    /// The supermap composing a strategy with a channel on every round's
    /// input and output: `pre[i]` (Kraus operators into the old input space
    /// `X_i`) is applied before the strategy sees round `i`, `post[i]`
    /// (Kraus operators out of the old output space `Y_i`) after it replies.
    /// Each channel must be trace preserving. The construction is certified
    /// on a batch of random strategies before it is returned.
    pub fn from_channel_composition(
        in_shape: &RoundShape,
        pre: &[Vec<ComplexMatrix>],
        post: &[Vec<ComplexMatrix>],
    ) -> Result<Self> {
        let r = in_shape.rounds();
        if pre.len() != r || post.len() != r {
            return Err(Error::Shape(format!(
                "{} pre and {} post channels for {r} rounds",
                pre.len(),
                post.len()
            )));
        }
        let mut x_new = Vec::with_capacity(r);
        let mut y_new = Vec::with_capacity(r);
        for i in 0..r {
            let (rows, cols) = channel_dims(&pre[i])?;
            if rows != in_shape.x_dim(i) {
                return Err(Error::Dimension(format!(
                    "pre channel {i} lands in dimension {rows}, round input is {}",
                    in_shape.x_dim(i)
                )));
            }
            x_new.push(cols);
            let (rows, cols) = channel_dims(&post[i])?;
            if cols != in_shape.y_dim(i) {
                return Err(Error::Dimension(format!(
                    "post channel {i} starts from dimension {cols}, round output is {}",
                    in_shape.y_dim(i)
                )));
            }
            y_new.push(rows);
        }
        let out_shape = RoundShape::new(x_new, y_new)?;

        let y_parts: Vec<ComplexMatrix> = index_combinations(
            &post.iter().map(|c| c.len()).collect::<Vec<_>>(),
        )
        .iter()
        .map(|combo| {
            let picks: Vec<&ComplexMatrix> = combo
                .iter()
                .enumerate()
                .map(|(i, &f)| &post[i][f])
                .collect();
            kron_all(&picks)
        })
        .collect();
        let x_parts: Vec<ComplexMatrix> = index_combinations(
            &pre.iter().map(|c| c.len()).collect::<Vec<_>>(),
        )
        .iter()
        .map(|combo| {
            let picks: Vec<ComplexMatrix> = combo
                .iter()
                .enumerate()
                .map(|(i, &e)| pre[i][e].transpose())
                .collect();
            kron_all(&picks.iter().collect::<Vec<_>>())
        })
        .collect();
        let mut kraus_factors = Vec::with_capacity(y_parts.len() * x_parts.len());
        for y_part in &y_parts {
            for x_part in &x_parts {
                kraus_factors.push(kron(y_part, x_part));
            }
        }

        let map = Self::new(in_shape.clone(), out_shape, kraus_factors)?;
        map.certify_strategy_preservation(3, 0x5eed)?;
        Ok(map)
    }

    /// The supermap padding a strategy with one inert round: the new round
    /// ignores its input of dimension `x_dim` and emits the fixed pure
    /// `reply`. Values of the fidelity and the norm are untouched by it.
    pub fn append_reply_round(
        in_shape: &RoundShape,
        x_dim: usize,
        reply: &ComplexVector,
    ) -> Result<Self> {
        if x_dim == 0 || reply.is_empty() {
            return Err(Error::InvalidInput(
                "appended round needs nonempty input and output".into(),
            ));
        }
        if (reply.norm() - 1.0).abs() > tol::TOL_ISOMETRY {
            return Err(Error::InvalidInput(format!(
                "reply state must be normalized, got norm {}",
                reply.norm()
            )));
        }
        let r = in_shape.rounds();
        let y_dim = reply.len();
        let mut x_dims = in_shape.x_dims().to_vec();
        x_dims.push(x_dim);
        let mut y_dims = in_shape.y_dims().to_vec();
        y_dims.push(y_dim);
        let out_shape = RoundShape::new(x_dims, y_dims)?;

        let mut row_dims: Vec<usize> = in_shape.y_dims().to_vec();
        row_dims.extend_from_slice(in_shape.x_dims());
        row_dims.push(y_dim);
        row_dims.push(x_dim);
        let mut src: Vec<usize> = (0..r).collect();
        src.push(2 * r);
        src.extend(r..2 * r);
        src.push(2 * r + 1);

        let eye = ComplexMatrix::identity(in_shape.choi_dim(), in_shape.choi_dim());
        let reply_col = ComplexMatrix::from_fn(y_dim, 1, |i, _| reply[i]);
        let mut kraus_factors = Vec::with_capacity(x_dim);
        for j in 0..x_dim {
            let e_j = ComplexMatrix::from_fn(x_dim, 1, |i, _| {
                if i == j {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            let embedded = kron(&kron(&eye, &reply_col), &e_j);
            kraus_factors.push(permute_matrix_rows(&embedded, &row_dims, &src)?);
        }

        let map = Self::new(in_shape.clone(), out_shape, kraus_factors)?;
        map.certify_strategy_preservation(2, 0x9ad)?;
        Ok(map)
    }

    pub fn in_shape(&self) -> &RoundShape {
        &self.in_shape
    }

    pub fn out_shape(&self) -> &RoundShape {
        &self.out_shape
    }

    pub fn kraus_factors(&self) -> &[ComplexMatrix] {
        &self.kraus_factors
    }

    /// The adjoint map `B ↦ Σ_k M_k† B M_k`. For a strategy supermap this
    /// sends co-strategies on the out-space to co-strategies on the
    /// in-space; apply it through [`Supermap::apply_costrategy`].
    pub fn adjoint(&self) -> Self {
        Self {
            kraus_factors: self.kraus_factors.iter().map(|m| m.adjoint()).collect(),
            in_shape: self.out_shape.clone(),
            out_shape: self.in_shape.clone(),
        }
    }

    /// Applies the map to a strategy Choi operator.
    pub fn apply(&self, s: &StrategyChoi) -> Result<StrategyChoi> {
        if s.shape() != &self.in_shape {
            return Err(Error::Shape(
                "strategy shape does not match the supermap in-shape".into(),
            ));
        }
        StrategyChoi::new(
            self.out_shape.clone(),
            self.apply_hermitian(s.hermitian())?,
        )
    }

    /// Applies the map to a co-strategy Choi operator; meaningful for
    /// adjoints of strategy supermaps.
    pub fn apply_costrategy(&self, b: &CoStrategyChoi) -> Result<CoStrategyChoi> {
        if b.shape() != &self.in_shape {
            return Err(Error::Shape(
                "co-strategy shape does not match the supermap in-shape".into(),
            ));
        }
        CoStrategyChoi::new(
            self.out_shape.clone(),
            self.apply_hermitian(b.hermitian())?,
        )
    }

    /// The linear extension of the map to arbitrary Hermitian operators on
    /// the in-space.
    pub fn apply_hermitian(&self, h: &HermitianOperator) -> Result<HermitianOperator> {
        if h.dim() != self.in_shape.choi_dim() {
            return Err(Error::Dimension(format!(
                "operator dimension {} does not match in-space dimension {}",
                h.dim(),
                self.in_shape.choi_dim()
            )));
        }
        let d = self.out_shape.choi_dim();
        let mut acc = ComplexMatrix::zeros(d, d);
        for m in &self.kraus_factors {
            acc += m * h.matrix() * m.adjoint();
        }
        HermitianOperator::new((&acc + acc.adjoint()) * Complex64::new(0.5, 0.0))
    }

    /// Pushes a purification through the map at the vector level: the
    /// dilated slices `M_k s_a`, indexed by `(a, k)`, purify the image Choi
    /// operator. The result is compressed back to its numerical rank.
    pub fn dilate_purification(&self, p: &Purification) -> Result<Purification> {
        if p.shape() != &self.in_shape {
            return Err(Error::Shape(
                "purification shape does not match the supermap in-shape".into(),
            ));
        }
        let mut slices = Vec::with_capacity(p.memory_dim() * self.kraus_factors.len());
        for a in 0..p.memory_dim() {
            let s_a = p.slice(a);
            for m in &self.kraus_factors {
                slices.push(m * &s_a);
            }
        }
        Ok(Purification::from_slices(self.out_shape.clone(), &slices)?.compress())
    }

    /// Certifies on a batch of random strategies that images pass strategy
    /// validation within [`tol::TOL_FEAS`].
    pub fn certify_strategy_preservation(&self, trials: usize, seed: u64) -> Result<()> {
        for i in 0..trials {
            let s = random_pure_strategy(&self.in_shape, None, seed.wrapping_add(i as u64))?;
            let report = validate_strategy(&self.apply(&strategy_choi(&s))?);
            if !report.passes(tol::TOL_FEAS) {
                return Err(Error::InvalidInput(format!(
                    "supermap image failed strategy validation with residual {:.3e}",
                    report.max_residual()
                )));
            }
        }
        Ok(())
    }
}

/// Both sides of a monotonicity inequality; the direction asserted depends
/// on the check that produced the report.
#[derive(Clone, Copy, Debug)]
pub struct MonotonicityReport {
    /// The value before applying the supermap.
    pub input: f64,
    /// The value after.
    pub output: f64,
    /// Whether the inequality holds within [`tol::TOL_VALUE`].
    pub holds: bool,
}

/// Checks that applying the supermap to both strategies does not lower
/// their fidelity: `F(Υ(S), Υ(T)) ≥ F(S, T)` within [`tol::TOL_VALUE`]. The
/// image fidelity is computed on purifications dilated through the Kraus
/// factors.
pub fn monotonicity_check_fidelity(
    u: &Supermap,
    s: &PureStrategy,
    t: &PureStrategy,
    opts: &SolveOptions,
) -> Result<MonotonicityReport> {
    if s.shape() != t.shape() || s.shape() != u.in_shape() {
        return Err(Error::Shape(
            "strategies do not match the supermap in-shape".into(),
        ));
    }
    let input = strategy_fidelity(s, t, opts)?.value;
    let sp = u.dilate_purification(&Purification::from_pure_strategy(s))?;
    let tp = u.dilate_purification(&Purification::from_pure_strategy(t))?;
    let output = strategy_fidelity_purified(&sp, &tp, opts)?.value;
    Ok(MonotonicityReport {
        input,
        output,
        holds: output >= input - tol::TOL_VALUE,
    })
}

/// Checks that the supermap does not raise the strategy norm:
/// `‖Υ(H)‖ ≤ ‖H‖` within [`tol::TOL_VALUE`].
pub fn monotonicity_check_norm(
    u: &Supermap,
    h: &HermitianOperator,
    opts: &SolveOptions,
) -> Result<MonotonicityReport> {
    let input = strategy_norm(h, u.in_shape(), opts)?.value;
    let output = strategy_norm(&u.apply_hermitian(h)?, u.out_shape(), opts)?.value;
    Ok(MonotonicityReport {
        input,
        output,
        holds: output <= input + tol::TOL_VALUE,
    })
}

/// Checks that a channel's Kraus operators share dimensions and satisfy the
/// completeness identity, returning (rows, cols).
fn channel_dims(kraus: &[ComplexMatrix]) -> Result<(usize, usize)> {
    let first = kraus
        .first()
        .ok_or_else(|| Error::InvalidInput("channel with no Kraus operators".into()))?;
    let (rows, cols) = (first.nrows(), first.ncols());
    let mut gram = ComplexMatrix::zeros(cols, cols);
    for m in kraus {
        if m.nrows() != rows || m.ncols() != cols {
            return Err(Error::Dimension(
                "Kraus operators of one channel differ in dimensions".into(),
            ));
        }
        gram += m.adjoint() * m;
    }
    let defect = crate::linalg::max_abs(&(gram - ComplexMatrix::identity(cols, cols)));
    if defect > tol::TOL_ISOMETRY {
        return Err(Error::InvalidInput(format!(
            "channel is not trace preserving, completeness defect {defect:.3e}"
        )));
    }
    Ok((rows, cols))
}

/// All tuples of indices below the given bounds, in lexicographic order.
fn index_combinations(lens: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = lens.iter().product();
    (0..total)
        .map(|flat| {
            let mut rest = flat;
            let mut combo = vec![0usize; lens.len()];
            for (slot, &len) in lens.iter().enumerate().rev() {
                combo[slot] = rest % len;
                rest /= len;
            }
            combo
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{gaussian_matrix, haar_isometry, max_abs};
    use crate::strategies::{
        costrategy_choi, random_channel_kraus, random_pure_costrategy, validate_costrategy,
    };
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn qubit_shape(rounds: usize) -> RoundShape {
        RoundShape::new(vec![2; rounds], vec![2; rounds]).unwrap()
    }

    fn identity_channel(d: usize) -> Vec<ComplexMatrix> {
        vec![ComplexMatrix::identity(d, d)]
    }

    fn depolarizing_channel(d: usize) -> Vec<ComplexMatrix> {
        let scale = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
        let mut kraus = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut m = ComplexMatrix::zeros(d, d);
                m[(i, j)] = scale;
                kraus.push(m);
            }
        }
        kraus
    }

    fn random_composition(shape: &RoundShape, seed: u64) -> Supermap {
        let r = shape.rounds();
        let pre: Vec<Vec<ComplexMatrix>> = (0..r)
            .map(|i| {
                random_channel_kraus(shape.x_dim(i), shape.x_dim(i), 2, seed + i as u64).unwrap()
            })
            .collect();
        let post: Vec<Vec<ComplexMatrix>> = (0..r)
            .map(|i| {
                random_channel_kraus(shape.y_dim(i), shape.y_dim(i), 2, seed + 50 + i as u64)
                    .unwrap()
            })
            .collect();
        Supermap::from_channel_composition(shape, &pre, &post).unwrap()
    }

    fn random_hermitian(d: usize, seed: u64) -> HermitianOperator {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let g = gaussian_matrix(d, d, &mut rng);
        HermitianOperator::new((&g + g.adjoint()) * Complex64::new(0.5, 0.0)).unwrap()
    }

    #[test]
    fn identity_supermap_fixes_strategies() {
        let shape = qubit_shape(2);
        let u = Supermap::identity(&shape);
        let s = strategy_choi(&random_pure_strategy(&shape, None, 3).unwrap());
        let image = u.apply(&s).unwrap();
        assert!(max_abs(&(image.matrix() - s.matrix())) < 1e-14);

        let b = costrategy_choi(&random_pure_costrategy(&shape, None, 4).unwrap());
        let back = u.adjoint().apply_costrategy(&b).unwrap();
        assert!(max_abs(&(back.matrix() - b.matrix())) < 1e-14);
    }

    #[test]
    fn composing_with_identity_channels_changes_nothing() {
        let shape = qubit_shape(1);
        let u = Supermap::from_channel_composition(
            &shape,
            &[identity_channel(2)],
            &[identity_channel(2)],
        )
        .unwrap();
        assert_eq!(u.out_shape(), &shape);
        let s = strategy_choi(&random_pure_strategy(&shape, None, 5).unwrap());
        let image = u.apply(&s).unwrap();
        assert!(max_abs(&(image.matrix() - s.matrix())) < 1e-14);
    }

    #[test]
    fn depolarizing_post_channel_forgets_the_strategy() {
        let shape = qubit_shape(1);
        let u = Supermap::from_channel_composition(
            &shape,
            &[identity_channel(2)],
            &[depolarizing_channel(2)],
        )
        .unwrap();
        let s = strategy_choi(&random_pure_strategy(&shape, None, 6).unwrap());
        let image = u.apply(&s).unwrap();
        let constant = kron(
            &(ComplexMatrix::identity(2, 2) * Complex64::new(0.5, 0.0)),
            &ComplexMatrix::identity(2, 2),
        );
        assert!(
            max_abs(&(image.matrix() - constant)) < 1e-12,
            "image is not the constant-output Choi operator"
        );
    }

    #[test]
    fn unitary_conjugation_keeps_strategies_valid() {
        let shape = qubit_shape(1);
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let pre = vec![haar_isometry(2, 2, &mut rng).unwrap()];
        let post = vec![haar_isometry(2, 2, &mut rng).unwrap()];
        let u = Supermap::from_channel_composition(&shape, &[pre], &[post]).unwrap();
        for seed in [8u64, 9] {
            let s = strategy_choi(&random_pure_strategy(&shape, None, seed).unwrap());
            let image = u.apply(&s).unwrap();
            assert!(validate_strategy(&image).passes(tol::TOL_FEAS));
        }

        let opts = SolveOptions::default();
        let a = random_pure_strategy(&shape, Some(&[2]), 10).unwrap();
        let b = random_pure_strategy(&shape, Some(&[2]), 11).unwrap();
        let before = strategy_fidelity(&a, &b, &opts).unwrap().value;
        let report = monotonicity_check_fidelity(&u, &a, &b, &opts).unwrap();
        assert!(
            (report.output - before).abs() < tol::TOL_VALUE,
            "unitary conjugation moved the fidelity from {before} to {}",
            report.output
        );
    }

    #[test]
    fn adjoint_satisfies_the_defining_identity() {
        for (shape, seed) in [(qubit_shape(1), 21u64), (qubit_shape(2), 22)] {
            let u = random_composition(&shape, seed);
            let x = random_hermitian(shape.choi_dim(), seed + 1);
            let y = random_hermitian(u.out_shape().choi_dim(), seed + 2);
            let lhs = (u.adjoint().apply_hermitian(&y).unwrap().matrix()
                * x.matrix())
            .trace();
            let rhs = (y.matrix() * u.apply_hermitian(&x).unwrap().matrix()).trace();
            assert!(
                (lhs - rhs).norm() < 1e-10,
                "adjoint identity violated by {}",
                (lhs - rhs).norm()
            );
        }
    }

    #[test]
    fn adjoint_sends_costrategies_to_costrategies() {
        for (rounds, seed) in [(1usize, 31u64), (2, 32)] {
            let shape = qubit_shape(rounds);
            let u = random_composition(&shape, seed);
            let adj = u.adjoint();
            for i in 0..4u64 {
                let b = costrategy_choi(
                    &random_pure_costrategy(u.out_shape(), None, seed + 100 + i).unwrap(),
                );
                let image = adj.apply_costrategy(&b).unwrap();
                let report = validate_costrategy(&image);
                assert!(
                    report.passes(tol::TOL_FEAS),
                    "rounds {rounds} draw {i}: residual {:.3e}",
                    report.max_residual()
                );
            }
        }
    }

    #[test]
    fn identity_supermap_preserves_both_values_exactly() {
        let shape = qubit_shape(1);
        let u = Supermap::identity(&shape);
        let opts = SolveOptions::default();
        let s = random_pure_strategy(&shape, Some(&[2]), 41).unwrap();
        let t = random_pure_strategy(&shape, Some(&[2]), 42).unwrap();

        let fid = monotonicity_check_fidelity(&u, &s, &t, &opts).unwrap();
        assert!(fid.holds);
        assert!(
            (fid.output - fid.input).abs() < tol::TOL_VALUE_TIGHT,
            "identity moved fidelity by {}",
            (fid.output - fid.input).abs()
        );

        let h = HermitianOperator::new(
            strategy_choi(&s).matrix() - strategy_choi(&t).matrix(),
        )
        .unwrap();
        let norm = monotonicity_check_norm(&u, &h, &opts).unwrap();
        assert!(norm.holds);
        assert!(
            (norm.output - norm.input).abs() < tol::TOL_VALUE_TIGHT,
            "identity moved norm by {}",
            (norm.output - norm.input).abs()
        );
    }

    #[test]
    fn depolarizing_everything_sends_fidelity_to_one() {
        let shape = qubit_shape(1);
        let u = Supermap::from_channel_composition(
            &shape,
            &[identity_channel(2)],
            &[depolarizing_channel(2)],
        )
        .unwrap();
        let s = random_pure_strategy(&shape, Some(&[2]), 51).unwrap();
        let t = random_pure_strategy(&shape, Some(&[2]), 52).unwrap();
        let report = monotonicity_check_fidelity(&u, &s, &t, &SolveOptions::default()).unwrap();
        assert!(report.holds, "{report:?}");
        assert!(
            (report.output - 1.0).abs() < tol::TOL_VALUE_TIGHT,
            "coinciding images must have unit fidelity, got {}",
            report.output
        );
    }

    #[test]
    fn fidelity_never_decreases_under_random_supermaps() {
        let opts = SolveOptions::default();
        for (rounds, seed) in [(1usize, 61u64), (1, 62), (2, 63)] {
            let shape = qubit_shape(rounds);
            let memories = vec![2usize; rounds];
            let u = random_composition(&shape, seed);
            let s = random_pure_strategy(&shape, Some(&memories), seed + 10).unwrap();
            let t = random_pure_strategy(&shape, Some(&memories), seed + 20).unwrap();
            let report = monotonicity_check_fidelity(&u, &s, &t, &opts).unwrap();
            assert!(
                report.holds,
                "rounds {rounds} seed {seed}: fidelity fell from {} to {}",
                report.input, report.output
            );
        }
    }

    #[test]
    fn norm_never_increases_under_random_supermaps() {
        let opts = SolveOptions::default();
        let shape = qubit_shape(1);
        let zero = HermitianOperator::new(ComplexMatrix::zeros(4, 4)).unwrap();
        let u = random_composition(&shape, 71);
        let trivial = monotonicity_check_norm(&u, &zero, &opts).unwrap();
        assert!(trivial.holds);
        assert!(trivial.output.abs() < 1e-9);

        for seed in [72u64, 73] {
            let u = random_composition(&shape, seed);
            let s = random_pure_strategy(&shape, Some(&[2]), seed + 10).unwrap();
            let t = random_pure_strategy(&shape, Some(&[2]), seed + 20).unwrap();
            let h = HermitianOperator::new(
                strategy_choi(&s).matrix() - strategy_choi(&t).matrix(),
            )
            .unwrap();
            let report = monotonicity_check_norm(&u, &h, &opts).unwrap();
            assert!(
                report.holds,
                "seed {seed}: norm rose from {} to {}",
                report.input, report.output
            );
        }
    }

    #[test]
    fn appended_reply_round_is_inert() {
        let shape = qubit_shape(1);
        let reply =
            ComplexVector::from_iterator(2, [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        let u = Supermap::append_reply_round(&shape, 2, &reply).unwrap();
        assert_eq!(u.out_shape(), &qubit_shape(2));

        let opts = SolveOptions::default();
        let s = random_pure_strategy(&shape, Some(&[2]), 81).unwrap();
        let t = random_pure_strategy(&shape, Some(&[2]), 82).unwrap();
        let report = monotonicity_check_fidelity(&u, &s, &t, &opts).unwrap();
        assert!(report.holds, "{report:?}");
        assert!(
            (report.output - report.input).abs() < tol::TOL_VALUE,
            "inert round moved the fidelity from {} to {}",
            report.input, report.output
        );
    }

    #[test]
    fn invalid_constructions_are_rejected() {
        let shape = qubit_shape(1);
        let not_complete = vec![ComplexMatrix::identity(2, 2) * Complex64::new(0.7, 0.0)];
        assert!(Supermap::from_channel_composition(
            &shape,
            &[not_complete],
            &[identity_channel(2)]
        )
        .is_err());
        assert!(
            Supermap::from_channel_composition(&shape, &[identity_channel(3)], &[
                identity_channel(2)
            ])
            .is_err()
        );
        assert!(Supermap::new(shape.clone(), shape.clone(), vec![]).is_err());

        let unnormalized =
            ComplexVector::from_iterator(2, [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]);
        assert!(Supermap::append_reply_round(&shape, 2, &unnormalized).is_err());

        let u = Supermap::identity(&shape);
        let wrong = strategy_choi(&random_pure_strategy(&qubit_shape(2), None, 91).unwrap());
        assert!(u.apply(&wrong).is_err());
    }
}
