//! Seed-indexed sampling of sparse random-matrix laws, plus the structural
//! transforms and combinatorial row diagnostics defined on them.
//!
//! An entry `(i, j)` of the sampled matrix is `xi_ij * delta_ij`, where
//! `delta_ij` is a Bernoulli(p) mask and `xi_ij` an i.i.d. draw from the
//! entry distribution. Each entry owns a fixed window of four counter slots
//! in the trial's random stream (slot 0: mask, slots 1..3: value draws), so
//! sampling is a pure function of `(spec, seed)` — byte-identical across
//! runs, platforms, and thread counts.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::matrix::{CsrMatrix, Matrix};
use crate::rng::{SeedSpec, TrialRng};
use crate::Result;

/// Counter slots reserved per matrix entry.
const SLOTS_PER_ENTRY: u64 = 4;

/// Law of a single (pre-mask) matrix entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EntryDistribution {
    /// ±1 with equal probability.
    Rademacher,
    /// N(0, 1).
    StandardGaussian,
    /// Symmetric two-sided Pareto: `P(|xi| > t) = (t/t0)^-rho` for
    /// `t >= t0`, with `t0 = sqrt((rho-2)/rho)` so the variance is 1.
    /// Requires `rho > 2`; moments of order `>= rho` are infinite.
    SymmetricPareto { rho: f64 },
    /// {0, 1} with `P(1) = mu`; the non-centered adjacency entry.
    ShiftedBernoulli { mu: f64 },
    /// Deterministic value.
    Constant { value: f64 },
}

impl EntryDistribution {
    pub fn validate(&self) -> Result<()> {
        match *self {
            EntryDistribution::SymmetricPareto { rho } => {
                if !(rho > 2.0) {
                    return Err(Error::parameter(format!(
                        "SymmetricPareto requires rho > 2 for unit variance, got {rho}"
                    )));
                }
            }
            EntryDistribution::ShiftedBernoulli { mu } => {
                if !(mu > 0.0 && mu < 1.0) {
                    return Err(Error::parameter(format!(
                        "ShiftedBernoulli requires mu in (0,1), got {mu}"
                    )));
                }
            }
            EntryDistribution::Constant { value } if !value.is_finite() => {
                return Err(Error::parameter("Constant value must be finite"));
            }
            _ => {}
        }
        Ok(())
    }

    /// Draws one value using counter slots `base` and `base + 1`.
    #[inline]
    fn sample(&self, rng: &TrialRng, base: u64) -> f64 {
        match *self {
            EntryDistribution::Rademacher => rng.rademacher(base),
            EntryDistribution::StandardGaussian => rng.gaussian(base),
            EntryDistribution::SymmetricPareto { rho } => {
                let t0 = ((rho - 2.0) / rho).sqrt();
                let magnitude = t0 * libm::pow(rng.uniform_open(base), -1.0 / rho);
                magnitude * rng.rademacher(base + 1)
            }
            EntryDistribution::ShiftedBernoulli { mu } => {
                if rng.bernoulli(base, mu) {
                    1.0
                } else {
                    0.0
                }
            }
            EntryDistribution::Constant { value } => value,
        }
    }

    /// A standalone draw stream for moment tests; draw `k` is independent of
    /// draw `k + 1`.
    pub fn sample_stream(&self, rng: &TrialRng, draw_index: u64) -> f64 {
        self.sample(rng, draw_index * 2)
    }

    pub fn is_integer_valued(&self) -> bool {
        match *self {
            EntryDistribution::Rademacher | EntryDistribution::ShiftedBernoulli { .. } => true,
            EntryDistribution::Constant { value } => value.fract() == 0.0,
            _ => false,
        }
    }
}

/// Diagonal policy of the ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagonalPolicy {
    /// Diagonal entries sampled like every other entry.
    Iid,
    /// Diagonal forced to exactly zero before the shift is added.
    Zero,
}

/// Non-random diagonal shift `D_n` added after sampling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DiagonalShift {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl DiagonalShift {
    pub fn zero() -> Self {
        DiagonalShift::Scalar(0.0)
    }

    pub fn value_at(&self, i: usize) -> f64 {
        match self {
            DiagonalShift::Scalar(s) => *s,
            DiagonalShift::Vector(v) => v[i],
        }
    }

    /// `||D_n||`, the largest absolute diagonal entry.
    pub fn inf_norm(&self) -> f64 {
        match self {
            DiagonalShift::Scalar(s) => s.abs(),
            DiagonalShift::Vector(v) => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            DiagonalShift::Scalar(s) => *s == 0.0,
            DiagonalShift::Vector(v) => v.iter().all(|&x| x == 0.0),
        }
    }
}

/// Full description of a random-matrix law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub n: usize,
    /// Sparsity probability of the Bernoulli mask.
    pub p: f64,
    pub dist: EntryDistribution,
    pub diagonal: DiagonalPolicy,
    #[serde(default = "DiagonalShift::zero")]
    pub shift: DiagonalShift,
    /// Raw 0/1 edge sampling with zero diagonal (directed Erdős–Rényi).
    #[serde(default)]
    pub adjacency_mode: bool,
}

impl EnsembleSpec {
    pub fn new(n: usize, p: f64, dist: EntryDistribution, diagonal: DiagonalPolicy) -> Self {
        EnsembleSpec { n, p, dist, diagonal, shift: DiagonalShift::zero(), adjacency_mode: false }
    }

    /// Directed Erdős–Rényi adjacency law: off-diagonal i.i.d. Bernoulli(p)
    /// edges, zero diagonal.
    pub fn adjacency(n: usize, p: f64) -> Self {
        EnsembleSpec {
            n,
            p,
            dist: EntryDistribution::ShiftedBernoulli { mu: p },
            diagonal: DiagonalPolicy::Zero,
            shift: DiagonalShift::zero(),
            adjacency_mode: true,
        }
    }

    pub fn with_shift(mut self, shift: DiagonalShift) -> Self {
        self.shift = shift;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::parameter("dimension n must be >= 1"));
        }
        // p = 0 is tolerated as the degenerate empty mask; p must otherwise
        // lie in (0, 1].
        if !(0.0..=1.0).contains(&self.p) || self.p.is_nan() {
            return Err(Error::parameter(format!("sparsity p must be in [0, 1], got {}", self.p)));
        }
        self.dist.validate()?;
        if self.adjacency_mode {
            if self.diagonal != DiagonalPolicy::Zero {
                return Err(Error::parameter("adjacency_mode forces a zero diagonal"));
            }
            if !(self.p > 0.0 && self.p < 1.0) {
                return Err(Error::parameter(format!(
                    "adjacency_mode requires p in (0, 1), got {}",
                    self.p
                )));
            }
            match self.dist {
                EntryDistribution::ShiftedBernoulli { mu } if mu == self.p => {}
                _ => {
                    return Err(Error::parameter(
                        "adjacency_mode forces dist = ShiftedBernoulli(p)",
                    ))
                }
            }
        }
        if let DiagonalShift::Vector(v) = &self.shift {
            if v.len() != self.n {
                return Err(Error::parameter(format!(
                    "shift vector has length {}, expected n = {}",
                    v.len(),
                    self.n
                )));
            }
        }
        Ok(())
    }

    /// True when every sampled entry is an exact integer (enables exact
    /// singularity detection downstream).
    pub fn is_integer_valued(&self) -> bool {
        let shift_integral = match &self.shift {
            DiagonalShift::Scalar(s) => s.fract() == 0.0,
            DiagonalShift::Vector(v) => v.iter().all(|x| x.fract() == 0.0),
        };
        self.dist.is_integer_valued() && shift_integral
    }

    #[inline]
    fn entry_slot_base(&self, i: usize, j: usize) -> u64 {
        (i as u64 * self.n as u64 + j as u64) * SLOTS_PER_ENTRY
    }

    /// One masked entry draw, before any diagonal shift.
    #[inline]
    fn raw_entry(&self, rng: &TrialRng, i: usize, j: usize) -> f64 {
        if self.diagonal == DiagonalPolicy::Zero && i == j {
            return 0.0;
        }
        let base = self.entry_slot_base(i, j);
        if self.adjacency_mode {
            return if rng.bernoulli(base, self.p) { 1.0 } else { 0.0 };
        }
        if rng.bernoulli(base, self.p) {
            self.dist.sample(rng, base + 1)
        } else {
            0.0
        }
    }
}

/// Samples the dense matrix `A = (xi_ij delta_ij) + D` for one trial.
pub fn sample_matrix(spec: &EnsembleSpec, seed: SeedSpec) -> Result<Matrix> {
    spec.validate()?;
    let rng = TrialRng::new(seed);
    let n = spec.n;
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let v = spec.raw_entry(&rng, i, j);
            if v != 0.0 {
                m[(i, j)] = v;
            }
        }
    }
    if !spec.shift.is_zero() {
        for i in 0..n {
            m[(i, i)] += spec.shift.value_at(i);
        }
    }
    Ok(m)
}

/// Samples the compressed-sparse view directly, without materializing the
/// dense array. Produces exactly the nonzeros of [`sample_matrix`].
pub fn sample_csr(spec: &EnsembleSpec, seed: SeedSpec) -> Result<CsrMatrix> {
    spec.validate()?;
    let rng = TrialRng::new(seed);
    let n = spec.n;
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::new();
    let mut values = Vec::new();
    row_ptr.push(0);
    for i in 0..n {
        for j in 0..n {
            let mut v = spec.raw_entry(&rng, i, j);
            if i == j {
                v += spec.shift.value_at(i);
            }
            if v != 0.0 {
                col_idx.push(j);
                values.push(v);
            }
        }
        row_ptr.push(values.len());
    }
    Ok(CsrMatrix { rows: n, cols: n, row_ptr, col_idx, values })
}

/// Samples the adjacency matrix of a directed Erdős–Rényi graph: zero
/// diagonal, off-diagonal i.i.d. {0,1} with `P(1) = p`.
pub fn sample_directed_er(n: usize, p: f64, seed: SeedSpec) -> Result<Matrix> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::parameter(format!("edge probability must be in (0, 1), got {p}")));
    }
    sample_matrix(&EnsembleSpec::adjacency(n, p), seed)
}

/// Folding transform: the `floor(r/2) x c` matrix whose row `i` is
/// `row_i - row_{i + floor(r/2)}` of the input. For odd row counts the last
/// row is dropped. Satisfies `2 ||M x||^2 >= ||fold(M) x||^2` for every `x`.
pub fn fold_matrix(m: &Matrix) -> Result<Matrix> {
    let r = m.rows();
    if r < 2 {
        return Err(Error::shape(format!("fold needs at least 2 rows, got {r}")));
    }
    let half = r / 2;
    let c = m.cols();
    let mut out = Matrix::zeros(half, c);
    for i in 0..half {
        let top = m.row(i);
        let bottom = m.row(i + half);
        for j in 0..c {
            let d = top[j] - bottom[j];
            if d != 0.0 {
                out[(i, j)] = d;
            }
        }
    }
    Ok(out)
}

/// Counts rows with exactly one entry in the `j_cols` columns that is
/// nonzero (and at least `threshold` in magnitude), zeros at the remaining
/// `j_cols` columns, and zeros at every `jprime_cols` column.
pub fn pattern_count(
    m: &Matrix,
    j_cols: &[usize],
    jprime_cols: &[usize],
    threshold: f64,
) -> Result<usize> {
    for &j in j_cols.iter().chain(jprime_cols) {
        if j >= m.cols() {
            return Err(Error::parameter(format!("column {j} out of range ({} cols)", m.cols())));
        }
    }
    if j_cols.iter().any(|j| jprime_cols.contains(j)) {
        return Err(Error::parameter("J and J' must be disjoint"));
    }
    let mut count = 0;
    'rows: for i in 0..m.rows() {
        let row = m.row(i);
        let mut hits = 0;
        for &j in j_cols {
            let v = row[j];
            if v != 0.0 {
                if v.abs() < threshold {
                    continue 'rows;
                }
                hits += 1;
                if hits > 1 {
                    continue 'rows;
                }
            }
        }
        if hits != 1 {
            continue;
        }
        if jprime_cols.iter().any(|&j| row[j] != 0.0) {
            continue;
        }
        count += 1;
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seed(k: u64) -> SeedSpec {
        SeedSpec::new(0x5eed, k)
    }

    #[test]
    fn p_one_constant_is_all_ones() {
        let spec = EnsembleSpec::new(
            3,
            1.0,
            EntryDistribution::Constant { value: 1.0 },
            DiagonalPolicy::Iid,
        );
        let m = sample_matrix(&spec, seed(0)).unwrap();
        assert!(m.data().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn p_zero_is_zero_matrix() {
        let spec =
            EnsembleSpec::new(2, 0.0, EntryDistribution::Rademacher, DiagonalPolicy::Iid);
        let m = sample_matrix(&spec, seed(3)).unwrap();
        assert!(m.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zero_diagonal_policy_is_exact() {
        let spec = EnsembleSpec::new(
            40,
            0.9,
            EntryDistribution::StandardGaussian,
            DiagonalPolicy::Zero,
        );
        let m = sample_matrix(&spec, seed(1)).unwrap();
        for i in 0..40 {
            assert_eq!(m[(i, i)], 0.0);
        }
    }

    #[test]
    fn shift_lands_on_diagonal_after_zeroing() {
        let spec =
            EnsembleSpec::new(4, 1.0, EntryDistribution::Rademacher, DiagonalPolicy::Zero)
                .with_shift(DiagonalShift::Vector(vec![1.0, -2.0, 0.0, 4.0]));
        let m = sample_matrix(&spec, seed(9)).unwrap();
        assert_eq!(m[(0, 0)], 1.0);
        assert_eq!(m[(1, 1)], -2.0);
        assert_eq!(m[(2, 2)], 0.0);
        assert_eq!(m[(3, 3)], 4.0);
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec =
            EnsembleSpec::new(30, 0.3, EntryDistribution::StandardGaussian, DiagonalPolicy::Iid);
        let a = sample_matrix(&spec, seed(5)).unwrap();
        let b = sample_matrix(&spec, seed(5)).unwrap();
        assert_eq!(a, b);
        let c = sample_matrix(&spec, seed(6)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn csr_sampler_matches_dense_sampler() {
        for (p, dist) in [
            (0.2, EntryDistribution::Rademacher),
            (0.7, EntryDistribution::StandardGaussian),
            (0.5, EntryDistribution::SymmetricPareto { rho: 4.5 }),
        ] {
            let spec = EnsembleSpec::new(25, p, dist, DiagonalPolicy::Zero)
                .with_shift(DiagonalShift::Scalar(0.5));
            let dense = sample_matrix(&spec, seed(2)).unwrap();
            let sparse = sample_csr(&spec, seed(2)).unwrap();
            assert_eq!(dense.csr(), &sparse);
        }
    }

    #[test]
    fn directed_er_has_zero_diagonal_and_binary_entries() {
        let m = sample_directed_er(20, 0.99, seed(4)).unwrap();
        for i in 0..20 {
            assert_eq!(m[(i, i)], 0.0);
            for j in 0..20 {
                assert!(m[(i, j)] == 0.0 || m[(i, j)] == 1.0);
            }
        }
    }

    #[test]
    fn directed_er_one_by_one_is_zero() {
        let m = sample_directed_er(1, 0.5, seed(0)).unwrap();
        assert_eq!(m[(0, 0)], 0.0);
    }

    #[test]
    fn directed_er_rejects_degenerate_p() {
        assert!(sample_directed_er(4, 0.0, seed(0)).is_err());
        assert!(sample_directed_er(4, 1.0, seed(0)).is_err());
    }

    #[test]
    fn pareto_needs_heavy_tail_exponent() {
        let spec = EnsembleSpec::new(
            2,
            0.5,
            EntryDistribution::SymmetricPareto { rho: 2.0 },
            DiagonalPolicy::Iid,
        );
        assert!(matches!(sample_matrix(&spec, seed(0)), Err(Error::Parameter(_))));
    }

    #[test]
    fn fold_identity_four() {
        let folded = fold_matrix(&Matrix::identity(4)).unwrap();
        let expect = Matrix::from_rows(vec![
            vec![1.0, 0.0, -1.0, 0.0],
            vec![0.0, 1.0, 0.0, -1.0],
        ]);
        assert_eq!(folded, expect);
    }

    #[test]
    fn fold_all_ones_cancels() {
        let ones = Matrix::from_data(4, 4, vec![1.0; 16]);
        let folded = fold_matrix(&ones).unwrap();
        assert_eq!(folded.rows(), 2);
        assert!(folded.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn fold_drops_last_row_of_odd_input() {
        let m = Matrix::from_rows(vec![
            vec![1.0, 2.0],
            vec![3.0, 4.0],
            vec![5.0, 6.0],
        ]);
        let folded = fold_matrix(&m).unwrap();
        assert_eq!(folded, Matrix::from_rows(vec![vec![-2.0, -2.0]]));
    }

    #[test]
    fn fold_rejects_single_row() {
        let m = Matrix::from_rows(vec![vec![1.0, 2.0]]);
        assert!(matches!(fold_matrix(&m), Err(Error::Shape(_))));
    }

    #[test]
    fn pattern_count_identity() {
        let m = Matrix::identity(3);
        assert_eq!(pattern_count(&m, &[0], &[1], 1.0).unwrap(), 1);
    }

    #[test]
    fn pattern_count_zero_matrix() {
        let m = Matrix::zeros(5, 5);
        assert_eq!(pattern_count(&m, &[0, 2], &[4], 0.5).unwrap(), 0);
    }

    #[test]
    fn pattern_count_rejects_overlap() {
        let m = Matrix::identity(3);
        assert!(pattern_count(&m, &[0, 1], &[1], 1.0).is_err());
    }

    #[test]
    fn pattern_count_requires_exactly_one_large_hit() {
        let m = Matrix::from_rows(vec![
            vec![2.0, 0.0, 0.0, 0.0], // qualifies
            vec![2.0, 1.5, 0.0, 0.0], // two nonzeros in J
            vec![0.5, 0.0, 0.0, 0.0], // below threshold
            vec![2.0, 0.0, 3.0, 0.0], // nonzero in J'
        ]);
        assert_eq!(pattern_count(&m, &[0, 1], &[2], 1.0).unwrap(), 1);
    }
}
