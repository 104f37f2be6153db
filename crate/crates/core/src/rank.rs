//! Rank ensembles and correlation matrices.
//!
//! An `n x p` data table (rows = observations, columns = variables) is
//! converted per variable into ranks `Q` in `[1, n]` and into the normalized
//! rank sequence
//!
//! ```text
//! x[i][j] = sqrt(12 / (p (n^2 - 1))) * (Q[i][j] - (n + 1) / 2)
//! ```
//!
//! so that the rank correlation matrix `S = X X^T` has `tr S = n` and
//! `s[i][i] = n / p` identically. The scaled off-diagonal `(p/n) s[i][j]` is
//! the classical pairwise Spearman rho.

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

/// How to handle tied observations while ranking.
///
/// Ties cannot occur for continuous data, so they are treated as a data
/// quality signal: the default assigns mid-ranks and raises a flag that
/// callers surface as a warning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TiePolicy {
    /// Tied entries receive the mean of the rank range they cover.
    #[default]
    Average,
    /// Ties are an error.
    Error,
}

/// Raw observations: `n` rows (observations) by `p` columns (variables).
#[derive(Debug, Clone)]
pub struct DataMatrix {
    values: Vec<f64>, // row-major n x p
    n: usize,
    p: usize,
}

impl DataMatrix {
    /// Builds from observation rows. Requires `n >= 2`, `p >= 1`, all
    /// entries finite, and equal row lengths.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(Error::TooFewObservations { got: n, min: 2 });
        }
        let p = rows[0].len();
        if p < 1 {
            return Err(Error::TooFewVariables { got: p, min: 1 });
        }
        let mut values = Vec::with_capacity(n * p);
        for (j, row) in rows.iter().enumerate() {
            if row.len() != p {
                return Err(Error::RaggedRow {
                    row: j,
                    got: row.len(),
                    expected: p,
                });
            }
            for (i, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFiniteInput { row: j, col: i });
                }
                values.push(v);
            }
        }
        Ok(DataMatrix { values, n, p })
    }

    pub fn from_flat(values: Vec<f64>, n: usize, p: usize) -> Result<Self> {
        if values.len() != n * p {
            return Err(Error::RaggedRow {
                row: 0,
                got: values.len(),
                expected: n * p,
            });
        }
        if n < 2 {
            return Err(Error::TooFewObservations { got: n, min: 2 });
        }
        if p < 1 {
            return Err(Error::TooFewVariables { got: p, min: 1 });
        }
        for (idx, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteInput {
                    row: idx / p,
                    col: idx % p,
                });
            }
        }
        Ok(DataMatrix { values, n, p })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    /// Value of variable `i` at observation `j`.
    #[inline]
    pub fn get(&self, j: usize, i: usize) -> f64 {
        self.values[j * self.p + i]
    }

    pub fn column(&self, i: usize) -> Vec<f64> {
        (0..self.n).map(|j| self.get(j, i)).collect()
    }

    /// Applies `f` to every value of variable `i` (used by scale-invariance
    /// checks and data cleanup).
    pub fn map_column(&mut self, i: usize, f: impl Fn(f64) -> f64) {
        for j in 0..self.n {
            self.values[j * self.p + i] = f(self.values[j * self.p + i]);
        }
    }
}

/// Ranks of one variable plus a tie flag.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedColumn {
    pub ranks: Vec<f64>,
    pub tied: bool,
}

/// Ranks `column`, averaging ties or rejecting them per `policy`.
///
/// Sorting is stable (sort by value with index as implicit tiebreaker), so
/// the output is a deterministic function of the input.
pub fn compute_ranks(column: &[f64], policy: TiePolicy) -> Result<RankedColumn> {
    let n = column.len();
    if n < 2 {
        return Err(Error::TooFewObservations { got: n, min: 2 });
    }
    for (j, &v) in column.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFiniteInput { row: j, col: 0 });
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| column[a].partial_cmp(&column[b]).unwrap());

    let mut ranks = vec![0.0; n];
    let mut tied = false;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && column[order[end]] == column[order[start]] {
            end += 1;
        }
        if end - start > 1 {
            if policy == TiePolicy::Error {
                return Err(Error::TiesFound { variable: 0 });
            }
            tied = true;
        }
        // mid-rank of positions start+1 ..= end (1-based)
        let mid = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = mid;
        }
        start = end;
    }
    Ok(RankedColumn { ranks, tied })
}

/// Per-variable ranks `Q` and the normalized rank matrix `X`, stored
/// row-major as `p x n` (variables are rows from here on).
#[derive(Debug, Clone)]
pub struct RankEnsemble {
    ranks: Vec<f64>, // p x n
    x: Vec<f64>,     // p x n
    tie_flags: Vec<bool>,
    n: usize,
    p: usize,
}

impl RankEnsemble {
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    /// Rank row of variable `i` (values in `[1, n]`).
    pub fn rank_row(&self, i: usize) -> &[f64] {
        &self.ranks[i * self.n..(i + 1) * self.n]
    }

    /// Normalized row of variable `i`.
    pub fn x_row(&self, i: usize) -> &[f64] {
        &self.x[i * self.n..(i + 1) * self.n]
    }

    pub fn tie_flags(&self) -> &[bool] {
        &self.tie_flags
    }

    pub fn any_ties(&self) -> bool {
        self.tie_flags.iter().any(|&t| t)
    }
}

/// Ranks every variable and applies the normalization
/// `x = sqrt(12/(p(n^2-1))) (Q - (n+1)/2)`.
pub fn build_ensemble(data: &DataMatrix, policy: TiePolicy) -> Result<RankEnsemble> {
    let (n, p) = (data.n(), data.p());
    let scale = (12.0 / (p as f64 * (n as f64 * n as f64 - 1.0))).sqrt();
    let shift = (n as f64 + 1.0) / 2.0;
    let mut ranks = Vec::with_capacity(p * n);
    let mut x = Vec::with_capacity(p * n);
    let mut tie_flags = Vec::with_capacity(p);
    for i in 0..p {
        let col = data.column(i);
        let ranked = compute_ranks(&col, policy).map_err(|e| match e {
            Error::TiesFound { .. } => Error::TiesFound { variable: i },
            other => other,
        })?;
        tie_flags.push(ranked.tied);
        for &q in &ranked.ranks {
            x.push(scale * (q - shift));
        }
        ranks.extend(ranked.ranks);
    }
    Ok(RankEnsemble {
        ranks,
        x,
        tie_flags,
        n,
        p,
    })
}

/// Spearman's rank correlation matrix `S = X X^T` (`p x p`).
#[derive(Debug, Clone)]
pub struct SpearmanMatrix {
    mat: SquareMatrix,
    n: usize,
    p: usize,
    any_ties: bool,
}

impl SpearmanMatrix {
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.mat
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.mat.get(i, j)
    }

    /// Classical pairwise Spearman rho, `(p/n) s[i][j]`.
    #[inline]
    pub fn rho(&self, i: usize, j: usize) -> f64 {
        self.entry(i, j) * self.p as f64 / self.n as f64
    }

    pub fn any_ties(&self) -> bool {
        self.any_ties
    }
}

/// Forms `S = X X^T`. Only the upper triangle is computed and mirrored.
pub fn spearman_matrix(ens: &RankEnsemble) -> SpearmanMatrix {
    let (n, p) = (ens.n(), ens.p());
    let mut mat = SquareMatrix::zeros(p);
    for i in 0..p {
        let xi = ens.x_row(i);
        for l in i..p {
            let xl = ens.x_row(l);
            let mut acc = 0.0;
            for j in 0..n {
                acc += xi[j] * xl[j];
            }
            mat.set(i, l, acc);
            mat.set(l, i, acc);
        }
    }
    SpearmanMatrix {
        mat,
        n,
        p,
        any_ties: ens.any_ties(),
    }
}

/// Pearson's sample correlation matrix with unit diagonal.
#[derive(Debug, Clone)]
pub struct PearsonMatrix {
    mat: SquareMatrix,
    n: usize,
}

impl PearsonMatrix {
    pub fn matrix(&self) -> &SquareMatrix {
        &self.mat
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.mat.get(i, j)
    }

    pub fn p(&self) -> usize {
        self.mat.dim()
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Product-moment correlations by the two-pass formula (means first, then
/// centered cross products). Off-diagonals are clamped to `[-1, 1]` to keep
/// the unit-bound invariant under roundoff.
pub fn pearson_matrix(data: &DataMatrix) -> Result<PearsonMatrix> {
    let (n, p) = (data.n(), data.p());
    let nf = n as f64;
    let mut means = vec![0.0; p];
    for i in 0..p {
        means[i] = (0..n).map(|j| data.get(j, i)).sum::<f64>() / nf;
    }
    let mut centered = vec![0.0; p * n];
    for i in 0..p {
        for j in 0..n {
            centered[i * n + j] = data.get(j, i) - means[i];
        }
    }
    let mut norms = vec![0.0; p];
    for i in 0..p {
        let ss: f64 = centered[i * n..(i + 1) * n].iter().map(|v| v * v).sum();
        if ss <= 0.0 {
            return Err(Error::ZeroVariance { variable: i });
        }
        norms[i] = ss.sqrt();
    }
    let mut mat = SquareMatrix::identity(p);
    for i in 0..p {
        for l in (i + 1)..p {
            let mut acc = 0.0;
            for j in 0..n {
                acc += centered[i * n + j] * centered[l * n + j];
            }
            let r = (acc / (norms[i] * norms[l])).clamp(-1.0, 1.0);
            mat.set(i, l, r);
            mat.set(l, i, r);
        }
    }
    Ok(PearsonMatrix { mat, n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn ranks_of_distinct_values() {
        let r = compute_ranks(&[3.1, 1.2, 2.7], TiePolicy::Average).unwrap();
        assert_eq!(r.ranks, vec![3.0, 1.0, 2.0]);
        assert!(!r.tied);
    }

    #[test]
    fn mid_ranks_for_ties() {
        let r = compute_ranks(&[5.0, 5.0, 1.0], TiePolicy::Average).unwrap();
        assert_eq!(r.ranks, vec![2.5, 2.5, 1.0]);
        assert!(r.tied);
    }

    #[test]
    fn ties_rejected_under_error_policy() {
        let err = compute_ranks(&[5.0, 5.0, 1.0], TiePolicy::Error).unwrap_err();
        assert!(matches!(err, Error::TiesFound { .. }));
    }

    #[test]
    fn non_finite_rejected() {
        assert!(compute_ranks(&[1.0, f64::NAN], TiePolicy::Average).is_err());
        assert!(compute_ranks(&[1.0, f64::INFINITY], TiePolicy::Average).is_err());
    }

    /// Naive O(n^2) comparison-count definition:
    /// rank = #(strictly smaller) + (#(equal) + 1) / 2.
    fn brute_force_ranks(col: &[f64]) -> Vec<f64> {
        col.iter()
            .map(|&v| {
                let below = col.iter().filter(|&&w| w < v).count();
                let equal = col.iter().filter(|&&w| w == v).count();
                below as f64 + (equal as f64 + 1.0) / 2.0
            })
            .collect()
    }

    #[test]
    fn ranks_match_pairwise_count_oracle() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let col: Vec<f64> = (0..1000).map(|_| rng.random::<f64>()).collect();
        let fast = compute_ranks(&col, TiePolicy::Average).unwrap().ranks;
        let slow = brute_force_ranks(&col);
        for (a, b) in fast.iter().zip(&slow) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn ensemble_single_column() {
        // n=3, p=1, values (10, 20, 30): x = sqrt(12/(1*8)) * (-1, 0, 1)
        let data = DataMatrix::from_rows(&[vec![10.0], vec![20.0], vec![30.0]]).unwrap();
        let ens = build_ensemble(&data, TiePolicy::Average).unwrap();
        let s = (12.0f64 / 8.0).sqrt();
        let row = ens.x_row(0);
        assert!((row[0] + s).abs() < 1e-15);
        assert!(row[1].abs() < 1e-15);
        assert!((row[2] - s).abs() < 1e-15);
    }

    fn random_data(rng: &mut ChaCha12Rng, n: usize, p: usize) -> DataMatrix {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..p).map(|_| rng.random::<f64>()).collect())
            .collect();
        DataMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn x_rows_sum_to_zero_with_norm_n_over_p() {
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        for &(n, p) in &[(10usize, 5usize), (37, 8), (100, 3)] {
            let data = random_data(&mut rng, n, p);
            let ens = build_ensemble(&data, TiePolicy::Average).unwrap();
            for i in 0..p {
                let row = ens.x_row(i);
                let sum: f64 = row.iter().sum();
                let sq: f64 = row.iter().map(|v| v * v).sum();
                assert!(sum.abs() < 1e-12, "row sum {sum}");
                assert!(
                    (sq - n as f64 / p as f64).abs() < 1e-12,
                    "row norm {sq} vs {}",
                    n as f64 / p as f64
                );
            }
        }
    }

    /// Direct summation of sum_{q=1}^{n} (q - (n+1)/2)^2 = n(n^2-1)/12.
    #[test]
    fn centered_rank_sum_of_squares_identity() {
        for n in 2..=100u64 {
            let direct: f64 = (1..=n)
                .map(|q| {
                    let d = q as f64 - (n as f64 + 1.0) / 2.0;
                    d * d
                })
                .sum();
            let closed = n as f64 * (n as f64 * n as f64 - 1.0) / 12.0;
            assert!((direct - closed).abs() < 1e-9 * closed.max(1.0));
        }
    }

    #[test]
    fn spearman_trace_and_diagonal() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let data = random_data(&mut rng, 30, 7);
        let ens = build_ensemble(&data, TiePolicy::Average).unwrap();
        let s = spearman_matrix(&ens);
        assert!((s.matrix().trace() - 30.0).abs() < 1e-10);
        for i in 0..7 {
            assert!((s.entry(i, i) - 30.0 / 7.0).abs() < 1e-12);
        }
    }

    #[test]
    fn concordant_and_discordant_pairs() {
        // identical ranks -> rho = 1; reversed -> rho = -1
        let rows: Vec<Vec<f64>> = (0..9)
            .map(|j| vec![j as f64, (j * j) as f64, -(j as f64)])
            .collect();
        let data = DataMatrix::from_rows(&rows).unwrap();
        let s = spearman_matrix(&build_ensemble(&data, TiePolicy::Average).unwrap());
        assert!((s.rho(0, 1) - 1.0).abs() < 1e-12);
        assert!((s.rho(0, 2) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn monotone_transforms_leave_ranks_unchanged() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let data = random_data(&mut rng, 25, 4);
        let base = build_ensemble(&data, TiePolicy::Average).unwrap();
        let mut exp_data = data.clone();
        for i in 0..4 {
            exp_data.map_column(i, |v| v.exp());
        }
        let mut cube_data = data.clone();
        for i in 0..4 {
            cube_data.map_column(i, |v| v * v * v);
        }
        for transformed in [exp_data, cube_data] {
            let ens = build_ensemble(&transformed, TiePolicy::Average).unwrap();
            for i in 0..4 {
                assert_eq!(base.rank_row(i), ens.rank_row(i));
            }
        }
    }

    #[test]
    fn pearson_duplicate_and_negated_columns() {
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let rows: Vec<Vec<f64>> = (0..12)
            .map(|_| {
                let v: f64 = rng.random();
                vec![v, v, -v]
            })
            .collect();
        let r = pearson_matrix(&DataMatrix::from_rows(&rows).unwrap()).unwrap();
        assert!((r.entry(0, 1) - 1.0).abs() < 1e-12);
        assert!((r.entry(0, 2) + 1.0).abs() < 1e-12);
        assert_eq!(r.entry(0, 0), 1.0);
    }

    #[test]
    fn pearson_matches_two_pass_oracle() {
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        let data = random_data(&mut rng, 50, 5);
        let r = pearson_matrix(&data).unwrap();
        // independent two-pass covariance oracle
        for i in 0..5 {
            for l in 0..5 {
                let xi = data.column(i);
                let xl = data.column(l);
                let mi = xi.iter().sum::<f64>() / 50.0;
                let ml = xl.iter().sum::<f64>() / 50.0;
                let cov: f64 = xi.iter().zip(&xl).map(|(a, b)| (a - mi) * (b - ml)).sum();
                let vi: f64 = xi.iter().map(|a| (a - mi) * (a - mi)).sum();
                let vl: f64 = xl.iter().map(|a| (a - ml) * (a - ml)).sum();
                let expected = cov / (vi * vl).sqrt();
                assert!((r.entry(i, l) - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pearson_zero_variance_detected() {
        let rows = vec![vec![1.0, 2.0], vec![1.0, 3.0], vec![1.0, 4.0]];
        let err = pearson_matrix(&DataMatrix::from_rows(&rows).unwrap()).unwrap_err();
        assert!(matches!(err, Error::ZeroVariance { variable: 0 }));
    }

    #[test]
    fn spearman_matrix_psd_with_rank_bound() {
        use crate::spectral::Spectrum;
        let mut rng = ChaCha12Rng::seed_from_u64(77);
        // p > n - 1 forces rank deficiency
        for &(n, p) in &[(12usize, 5usize), (6, 10)] {
            let data = random_data(&mut rng, n, p);
            let s = spearman_matrix(&build_ensemble(&data, TiePolicy::Average).unwrap());
            let spec = Spectrum::of(s.matrix()).unwrap();
            assert!(spec.lambda_min() >= -1e-10, "min {}", spec.lambda_min());
            let numerical_rank = spec.eigenvalues().iter().filter(|&&l| l > 1e-8).count();
            assert!(numerical_rank <= p.min(n - 1), "rank {numerical_rank}");
        }
    }

    #[test]
    fn pearson_log_det_nonpositive() {
        // AM-GM: a correlation matrix has log|R| <= 0
        use crate::spectral;
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        for _ in 0..10 {
            let data = random_data(&mut rng, 40, 6);
            let r = pearson_matrix(&data).unwrap();
            let ld = spectral::log_det(r.matrix()).unwrap();
            assert!(ld <= 1e-12, "log det {ld}");
        }
    }

    #[test]
    fn observation_permutation_leaves_eigenvalues_invariant() {
        use crate::spectral::Spectrum;
        let mut rng = ChaCha12Rng::seed_from_u64(14);
        let data = random_data(&mut rng, 18, 5);
        let s1 = spearman_matrix(&build_ensemble(&data, TiePolicy::Average).unwrap());
        // jointly permute observations
        let mut perm: Vec<usize> = (0..18).collect();
        for j in (1..18).rev() {
            let k = rng.random_range(0..=j);
            perm.swap(j, k);
        }
        let rows: Vec<Vec<f64>> = perm
            .iter()
            .map(|&j| (0..5).map(|i| data.get(j, i)).collect())
            .collect();
        let s2 = spearman_matrix(
            &build_ensemble(&DataMatrix::from_rows(&rows).unwrap(), TiePolicy::Average).unwrap(),
        );
        let e1 = Spectrum::of(s1.matrix()).unwrap();
        let e2 = Spectrum::of(s2.matrix()).unwrap();
        for (a, b) in e1.eigenvalues().iter().zip(e2.eigenvalues()) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}
