//! Joint probability tables over finite alphabets and the Shannon
//! quantities built from them.
//!
//! A bipartite table `p(i, j)` stores Alice's symbol on the row and Bob's
//! on the column. All entropies are in bits with `0 log 0 = 0`.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{DiscordError, Result};
use crate::{NEGATIVE_TOL, NORMALIZATION_TOL};

/// An entropy-like quantity measured in bits.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntropyBits(pub f64);

impl EntropyBits {
    pub const ZERO: EntropyBits = EntropyBits(0.0);

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for EntropyBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} bits", self.0)
    }
}

impl From<EntropyBits> for f64 {
    fn from(h: EntropyBits) -> f64 {
        h.0
    }
}

/// `-x log2 x` with the `0 log 0 = 0` convention.
#[inline]
pub(crate) fn plogp(x: f64) -> f64 {
    if x > 0.0 {
        -x * x.log2()
    } else {
        0.0
    }
}

/// Entropy of an already validated vector of probabilities.
pub(crate) fn entropy_of<'a, I>(probs: I) -> f64
where
    I: IntoIterator<Item = &'a f64>,
{
    probs.into_iter().map(|&x| plogp(x)).sum()
}

/// Shannon entropy of a probability vector.
pub fn shannon_entropy(v: &[f64]) -> Result<EntropyBits> {
    if v.is_empty() {
        return Err(DiscordError::InvalidDistribution("empty vector".into()));
    }
    for (i, &x) in v.iter().enumerate() {
        if !x.is_finite() {
            return Err(DiscordError::InvalidDistribution(format!(
                "entry {i} is not finite"
            )));
        }
        if x < -NEGATIVE_TOL {
            return Err(DiscordError::InvalidDistribution(format!(
                "entry {i} is negative ({x})"
            )));
        }
    }
    let sum: f64 = v.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(DiscordError::InvalidDistribution(format!(
            "entries sum to {sum}"
        )));
    }
    Ok(EntropyBits(entropy_of(v)))
}

/// Checks entries and normalization, clamps sub-tolerance negatives to zero
/// and rescales so the entries sum to one.
fn validate_and_normalize(
    values: &mut [f64],
    index_of: impl Fn(usize) -> Vec<usize>,
) -> Result<()> {
    for (n, x) in values.iter_mut().enumerate() {
        if !x.is_finite() {
            return Err(DiscordError::NonFinite { index: index_of(n) });
        }
        if *x < -NEGATIVE_TOL {
            return Err(DiscordError::NegativeEntry {
                index: index_of(n),
                value: *x,
            });
        }
        if *x < 0.0 {
            *x = 0.0;
        }
    }
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(DiscordError::NotNormalized { sum });
    }
    // leave roundoff-level drift alone so validation is idempotent
    if (sum - 1.0).abs() > values.len() as f64 * f64::EPSILON {
        values.iter_mut().for_each(|x| *x /= sum);
    }
    Ok(())
}

pub(crate) fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || ncols == 0 {
        return Err(DiscordError::Empty);
    }
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(DiscordError::Ragged);
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

pub(crate) fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

/// A validated joint distribution `p_AB(i, j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "JointRepr", into = "JointRepr")]
pub struct JointDistribution {
    probs: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
struct JointRepr {
    dims: [usize; 2],
    probs: Vec<Vec<f64>>,
}

impl TryFrom<JointRepr> for JointDistribution {
    type Error = DiscordError;

    fn try_from(r: JointRepr) -> Result<Self> {
        let p = JointDistribution::from_rows(&r.probs)?;
        if p.dims() != (r.dims[0], r.dims[1]) {
            return Err(DiscordError::DimensionMismatch {
                expected: r.dims[0] * r.dims[1],
                found: p.dim_a() * p.dim_b(),
            });
        }
        Ok(p)
    }
}

impl From<JointDistribution> for JointRepr {
    fn from(p: JointDistribution) -> Self {
        JointRepr {
            dims: [p.dim_a(), p.dim_b()],
            probs: matrix_to_rows(&p.probs),
        }
    }
}

impl JointDistribution {
    /// Validates a `d_A x d_B` table. Sums within `1e-9` of one are
    /// renormalized; anything further off is rejected.
    pub fn new(mut probs: DMatrix<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(DiscordError::Empty);
        }
        let nrows = probs.nrows();
        // nalgebra storage is column-major
        validate_and_normalize(probs.as_mut_slice(), |n| vec![n % nrows, n / nrows])?;
        Ok(JointDistribution { probs })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(matrix_from_rows(rows)?)
    }

    /// Product distribution `p(i, j) = a(i) b(j)`.
    pub fn product(a: &[f64], b: &[f64]) -> Result<Self> {
        if a.is_empty() || b.is_empty() {
            return Err(DiscordError::Empty);
        }
        Self::new(DMatrix::from_fn(a.len(), b.len(), |i, j| a[i] * b[j]))
    }

    pub(crate) fn from_matrix_unchecked(probs: DMatrix<f64>) -> Self {
        JointDistribution { probs }
    }

    pub fn dim_a(&self) -> usize {
        self.probs.nrows()
    }

    pub fn dim_b(&self) -> usize {
        self.probs.ncols()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a(), self.dim_b())
    }

    pub fn probs(&self) -> &DMatrix<f64> {
        &self.probs
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.probs[(i, j)]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        matrix_to_rows(&self.probs)
    }

    /// Swaps the roles of A and B.
    pub fn transpose(&self) -> JointDistribution {
        JointDistribution {
            probs: self.probs.transpose(),
        }
    }

    /// Row sums, the distribution of A.
    pub fn marginal_a(&self) -> Vec<f64> {
        self.probs.row_iter().map(|r| r.sum()).collect()
    }

    /// Column sums, the distribution of B.
    pub fn marginal_b(&self) -> Vec<f64> {
        self.probs.column_iter().map(|c| c.sum()).collect()
    }

    pub fn entropy_a(&self) -> EntropyBits {
        EntropyBits(entropy_of(&self.marginal_a()))
    }

    pub fn entropy_b(&self) -> EntropyBits {
        EntropyBits(entropy_of(&self.marginal_b()))
    }

    /// `H(A, B)`, the entropy of the flattened table.
    pub fn joint_entropy(&self) -> EntropyBits {
        EntropyBits(entropy_of(self.probs.iter()))
    }

    /// `H(A|B) = H(A, B) - H(B)`.
    pub fn conditional_entropy_a_given_b(&self) -> EntropyBits {
        EntropyBits(self.joint_entropy().0 - self.entropy_b().0)
    }

    /// `H(B|A) = H(A, B) - H(A)`.
    pub fn conditional_entropy_b_given_a(&self) -> EntropyBits {
        EntropyBits(self.joint_entropy().0 - self.entropy_a().0)
    }

    /// `I(A;B) = H(A) + H(B) - H(A, B)`.
    pub fn mutual_information(&self) -> EntropyBits {
        EntropyBits(self.entropy_a().0 + self.entropy_b().0 - self.joint_entropy().0)
    }

    /// Largest absolute entry-wise difference to another table of the same shape.
    pub fn max_abs_diff(&self, other: &JointDistribution) -> f64 {
        assert_eq!(self.dims(), other.dims(), "shape mismatch");
        self.probs
            .iter()
            .zip(other.probs.iter())
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }
}

/// Outcome of the conditional purity test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PurityVerdict {
    pub conditionally_pure: bool,
    /// Support map `i -> f(i)` as `(a, b)` pairs, present when pure.
    pub bijection: Option<Vec<(usize, usize)>>,
}

/// A state is conditionally pure when each party's value determines the
/// other's: the support holds at most one entry per row and per column.
/// Entries at or below `tol` count as zero.
pub fn is_conditionally_pure(p: &JointDistribution, tol: f64) -> PurityVerdict {
    let (da, db) = p.dims();
    let mut column_used = vec![false; db];
    let mut map = Vec::new();
    for i in 0..da {
        let mut hit = None;
        for j in 0..db {
            if p.get(i, j) > tol {
                if hit.is_some() || column_used[j] {
                    return PurityVerdict {
                        conditionally_pure: false,
                        bijection: None,
                    };
                }
                hit = Some(j);
                column_used[j] = true;
            }
        }
        if let Some(j) = hit {
            map.push((i, j));
        }
    }
    PurityVerdict {
        conditionally_pure: true,
        bijection: Some(map),
    }
}

/// One of the three parties of a tripartite table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    A,
    B,
    C,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::A => 0,
            Axis::B => 1,
            Axis::C => 2,
        }
    }
}

/// A validated rank-3 table `p_ABC(i, j, k)`, stored with `k` varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TripartiteRepr", into = "TripartiteRepr")]
pub struct TripartiteDistribution {
    dims: [usize; 3],
    probs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct TripartiteRepr {
    dims: [usize; 3],
    probs: Vec<Vec<Vec<f64>>>,
}

impl TryFrom<TripartiteRepr> for TripartiteDistribution {
    type Error = DiscordError;

    fn try_from(r: TripartiteRepr) -> Result<Self> {
        let t = TripartiteDistribution::from_nested(&r.probs)?;
        if t.dims != r.dims {
            return Err(DiscordError::DimensionMismatch {
                expected: r.dims.iter().product(),
                found: t.dims.iter().product(),
            });
        }
        Ok(t)
    }
}

impl From<TripartiteDistribution> for TripartiteRepr {
    fn from(t: TripartiteDistribution) -> Self {
        let [da, db, dc] = t.dims;
        let probs = (0..da)
            .map(|i| {
                (0..db)
                    .map(|j| (0..dc).map(|k| t.get(i, j, k)).collect())
                    .collect()
            })
            .collect();
        TripartiteRepr { dims: t.dims, probs }
    }
}

impl TripartiteDistribution {
    /// Builds from a flat buffer with `k` fastest, then `j`, then `i`.
    pub fn new(dims: [usize; 3], mut probs: Vec<f64>) -> Result<Self> {
        if dims.contains(&0) {
            return Err(DiscordError::Empty);
        }
        let len: usize = dims.iter().product();
        if probs.len() != len {
            return Err(DiscordError::DimensionMismatch {
                expected: len,
                found: probs.len(),
            });
        }
        let [_, db, dc] = dims;
        validate_and_normalize(&mut probs, |n| vec![n / (db * dc), (n / dc) % db, n % dc])?;
        Ok(TripartiteDistribution { dims, probs })
    }

    pub fn from_nested(nested: &[Vec<Vec<f64>>]) -> Result<Self> {
        let da = nested.len();
        let db = nested.first().map_or(0, Vec::len);
        let dc = nested
            .first()
            .and_then(|m| m.first())
            .map_or(0, Vec::len);
        if da == 0 || db == 0 || dc == 0 {
            return Err(DiscordError::Empty);
        }
        let mut flat = Vec::with_capacity(da * db * dc);
        for m in nested {
            if m.len() != db {
                return Err(DiscordError::Ragged);
            }
            for r in m {
                if r.len() != dc {
                    return Err(DiscordError::Ragged);
                }
                flat.extend_from_slice(r);
            }
        }
        Self::new([da, db, dc], flat)
    }

    pub(crate) fn from_flat_unchecked(dims: [usize; 3], probs: Vec<f64>) -> Self {
        TripartiteDistribution { dims, probs }
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn dim(&self, axis: Axis) -> usize {
        self.dims[axis.index()]
    }

    #[inline]
    pub(crate) fn offset(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.probs[self.offset(i, j, k)]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    /// Iterates over `([i, j, k], p)`.
    pub fn entries(&self) -> impl Iterator<Item = ([usize; 3], f64)> + '_ {
        let [_, db, dc] = self.dims;
        self.probs
            .iter()
            .enumerate()
            .map(move |(n, &p)| ([n / (db * dc), (n / dc) % db, n % dc], p))
    }

    /// Distribution of a single party.
    pub fn marginal(&self, axis: Axis) -> Vec<f64> {
        let mut out = vec![0.0; self.dim(axis)];
        for (idx, p) in self.entries() {
            out[idx[axis.index()]] += p;
        }
        out
    }

    /// Joint distribution of two distinct parties; `rows` indexes the
    /// rows of the result and `cols` its columns.
    pub fn pair_marginal(&self, rows: Axis, cols: Axis) -> Result<JointDistribution> {
        if rows == cols {
            return Err(DiscordError::InvalidDistribution(
                "pair marginal needs two distinct axes".into(),
            ));
        }
        let mut m = DMatrix::zeros(self.dim(rows), self.dim(cols));
        for (idx, p) in self.entries() {
            m[(idx[rows.index()], idx[cols.index()])] += p;
        }
        Ok(JointDistribution::from_matrix_unchecked(m))
    }

    pub fn joint_entropy(&self) -> EntropyBits {
        EntropyBits(entropy_of(&self.probs))
    }

    /// `H(X | rest) = H(A, B, C) - H(rest)`.
    pub fn conditional_entropy_given_rest(&self, axis: Axis) -> EntropyBits {
        let (u, v) = match axis {
            Axis::A => (Axis::B, Axis::C),
            Axis::B => (Axis::C, Axis::A),
            Axis::C => (Axis::A, Axis::B),
        };
        let rest = self
            .pair_marginal(u, v)
            .expect("axes are distinct")
            .joint_entropy();
        EntropyBits(self.joint_entropy().0 - rest.0)
    }
}
