//! Noisy readout channels.
//!
//! A channel is a square column-stochastic matrix: `M(i, j)` is the
//! probability of reading `i` when the true value is `j`, so every column
//! sums to one. Acting on Bob's side of `p_AB` gives `p_AB' = p_AB M^T`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::distributions::{matrix_from_rows, matrix_to_rows, Axis, JointDistribution, TripartiteDistribution};
use crate::error::{DiscordError, Result};
use crate::reshape::kron;
use crate::{NEGATIVE_TOL, NORMALIZATION_TOL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelRepr", into = "ChannelRepr")]
pub struct StochasticChannel {
    matrix: DMatrix<f64>,
}

/// JSON layout; `matrix[i][j] = M(i, j)` with the readout on the row.
#[derive(Serialize, Deserialize)]
struct ChannelRepr {
    dim: usize,
    matrix: Vec<Vec<f64>>,
}

impl TryFrom<ChannelRepr> for StochasticChannel {
    type Error = DiscordError;

    fn try_from(r: ChannelRepr) -> Result<Self> {
        let m = StochasticChannel::from_rows(&r.matrix)?;
        if m.dim() != r.dim {
            return Err(DiscordError::DimensionMismatch {
                expected: r.dim,
                found: m.dim(),
            });
        }
        Ok(m)
    }
}

impl From<StochasticChannel> for ChannelRepr {
    fn from(m: StochasticChannel) -> Self {
        ChannelRepr {
            dim: m.dim(),
            matrix: matrix_to_rows(&m.matrix),
        }
    }
}

impl StochasticChannel {
    /// Validates a column-stochastic matrix. Columns within `1e-9` of unit
    /// sum are rescaled exactly onto it.
    pub fn new(mut matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.is_empty() {
            return Err(DiscordError::Empty);
        }
        if matrix.nrows() != matrix.ncols() {
            return Err(DiscordError::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        for j in 0..matrix.ncols() {
            for i in 0..matrix.nrows() {
                let x = matrix[(i, j)];
                if !x.is_finite() {
                    return Err(DiscordError::NonFinite { index: vec![i, j] });
                }
                if x < -NEGATIVE_TOL {
                    return Err(DiscordError::NegativeEntry {
                        index: vec![i, j],
                        value: x,
                    });
                }
                if x < 0.0 {
                    matrix[(i, j)] = 0.0;
                }
            }
            let sum = matrix.column(j).sum();
            if (sum - 1.0).abs() > NORMALIZATION_TOL {
                return Err(DiscordError::ColumnNotNormalized { column: j, sum });
            }
            if sum != 1.0 {
                matrix.column_mut(j).unscale_mut(sum);
            }
        }
        Ok(StochasticChannel { matrix })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(matrix_from_rows(rows)?)
    }

    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<f64>) -> Self {
        StochasticChannel { matrix }
    }

    /// The noiseless apparatus.
    pub fn identity(d: usize) -> Self {
        assert!(d >= 1, "channel dimension must be positive");
        StochasticChannel {
            matrix: DMatrix::identity(d, d),
        }
    }

    /// The maximally noisy apparatus: every readout equally likely.
    pub fn uniform(d: usize) -> Self {
        assert!(d >= 1, "channel dimension must be positive");
        StochasticChannel {
            matrix: DMatrix::from_element(d, d, 1.0 / d as f64),
        }
    }

    /// One-bit flip with probability `eps`.
    pub fn binary_symmetric(eps: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(DiscordError::OutOfRange {
                name: "eps",
                value: eps,
                min: 0.0,
                max: 1.0,
            });
        }
        Ok(StochasticChannel {
            matrix: DMatrix::from_row_slice(2, 2, &[1.0 - eps, eps, eps, 1.0 - eps]),
        })
    }

    /// Independent channels on two registers, `self ⊗ other`.
    pub fn tensor(&self, other: &StochasticChannel) -> StochasticChannel {
        StochasticChannel {
            matrix: kron(&self.matrix, &other.matrix),
        }
    }

    /// Block-diagonal channel that never mixes the two alphabets.
    pub fn direct_sum(&self, other: &StochasticChannel) -> StochasticChannel {
        let (d1, d2) = (self.dim(), other.dim());
        let mut m = DMatrix::zeros(d1 + d2, d1 + d2);
        m.view_mut((0, 0), (d1, d1)).copy_from(&self.matrix);
        m.view_mut((d1, d1), (d2, d2)).copy_from(&other.matrix);
        StochasticChannel { matrix: m }
    }

    /// `self · first`: apply `first`, then `self`.
    pub fn after(&self, first: &StochasticChannel) -> Result<StochasticChannel> {
        if self.dim() != first.dim() {
            return Err(DiscordError::DimensionMismatch {
                expected: self.dim(),
                found: first.dim(),
            });
        }
        Ok(StochasticChannel {
            matrix: &self.matrix * &first.matrix,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn get(&self, readout: usize, input: usize) -> f64 {
        self.matrix[(readout, input)]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        matrix_to_rows(&self.matrix)
    }

    pub fn is_identity(&self) -> bool {
        self.matrix == DMatrix::identity(self.dim(), self.dim())
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    /// Largest deviation of a column sum from one.
    pub fn column_sum_error(&self) -> f64 {
        self.matrix
            .column_iter()
            .fold(0.0, |acc, c| acc.max((c.sum() - 1.0).abs()))
    }

    /// Apply the channel to a probability vector: `M v`.
    pub fn apply_to_vector(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.dim() {
            return Err(DiscordError::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        let d = self.dim();
        Ok((0..d)
            .map(|i| (0..d).map(|j| self.matrix[(i, j)] * v[j]).sum())
            .collect())
    }
}

/// Noisy readout of Bob's register: `p_AB' = p_AB M^T`.
pub fn apply_to_b(p: &JointDistribution, m: &StochasticChannel) -> Result<JointDistribution> {
    if p.dim_b() != m.dim() {
        return Err(DiscordError::DimensionMismatch {
            expected: p.dim_b(),
            found: m.dim(),
        });
    }
    Ok(JointDistribution::from_matrix_unchecked(
        p.probs() * m.matrix().transpose(),
    ))
}

/// Noisy readout of one party of a tripartite table.
pub fn apply_to_axis(
    t: &TripartiteDistribution,
    m: &StochasticChannel,
    axis: Axis,
) -> Result<TripartiteDistribution> {
    let d = t.dim(axis);
    if d != m.dim() {
        return Err(DiscordError::DimensionMismatch {
            expected: d,
            found: m.dim(),
        });
    }
    let dims = t.dims();
    let mut out = vec![0.0; t.as_slice().len()];
    for (idx, p) in t.entries() {
        if p == 0.0 {
            continue;
        }
        let input = idx[axis.index()];
        for readout in 0..d {
            let mut target = idx;
            target[axis.index()] = readout;
            let off = (target[0] * dims[1] + target[1]) * dims[2] + target[2];
            out[off] += m.get(readout, input) * p;
        }
    }
    Ok(TripartiteDistribution::from_flat_unchecked(dims, out))
}
