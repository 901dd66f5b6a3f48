//! Zero-discord structure in both directions.
//!
//! For a fixed channel the zero-discord states are exactly the tables whose
//! rows are stationary vectors of `M`; they are mixtures of the extreme
//! stationary vectors `m_k`, one per closed recurrent class of the channel
//! seen as a Markov chain. For a fixed table the zero-discord channels form
//! a polytope: the fixed-point condition `p M^T = p` is linear in `vec(M)`.
//! In column-major form it reads `(p ⊗ 1) vec(M) = vec(p^T)`, because
//! `M p^T = p^T` is the transpose of the fixed-point condition.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::channels::StochasticChannel;
use crate::distributions::{matrix_to_rows, JointDistribution};
use crate::error::{DiscordError, Result};
use crate::reshape::{kron, unvec, vec, vec_rows};
use crate::simplex::{LinearProgram, LpOutcome};
use crate::NORMALIZATION_TOL;

const NULLSPACE_RESIDUAL_MAX: f64 = 1e-8;
/// Largest channel dimension for which vertices are enumerated.
pub const MAX_VERTEX_DIM: usize = 3;

/// Extreme stationary vectors of a channel, one per closed class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryFamily {
    pub channel_dim: usize,
    pub vectors: Vec<Vec<f64>>,
    /// Support of each vector, the states of its recurrent class.
    pub classes: Vec<Vec<usize>>,
}

impl StationaryFamily {
    /// Number of linearly independent stationary vectors.
    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    /// Largest `|M m_k - m_k|` over the family.
    pub fn residual(&self, m: &StochasticChannel) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for v in &self.vectors {
            let mv = m.apply_to_vector(v)?;
            worst = mv.iter().zip(v).fold(worst, |acc, (a, b)| acc.max((a - b).abs()));
        }
        Ok(worst)
    }
}

/// Decomposes the transition graph `j -> i` (edge when `M(i, j) > 0`) into
/// strongly connected components, keeps the closed ones and solves for the
/// unique stationary vector supported on each.
pub fn stationary_family(m: &StochasticChannel) -> Result<StationaryFamily> {
    let d = m.dim();
    let mut graph = DiGraph::<usize, ()>::with_capacity(d, d * d);
    let nodes: Vec<_> = (0..d).map(|i| graph.add_node(i)).collect();
    for j in 0..d {
        for i in 0..d {
            if i != j && m.get(i, j) > 0.0 {
                graph.add_edge(nodes[j], nodes[i], ());
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = tarjan_scc(&graph)
        .into_iter()
        .map(|scc| {
            let mut c: Vec<usize> = scc.into_iter().map(|n| graph[n]).collect();
            c.sort_unstable();
            c
        })
        .filter(|class| {
            // closed: nothing leaves the class
            class
                .iter()
                .all(|&j| (0..d).all(|i| class.binary_search(&i).is_ok() || m.get(i, j) == 0.0))
        })
        .collect();
    classes.sort_by_key(|c| c[0]);

    let mut vectors = Vec::with_capacity(classes.len());
    for class in &classes {
        vectors.push(class_stationary_vector(m, class)?);
    }
    Ok(StationaryFamily {
        channel_dim: d,
        vectors,
        classes,
    })
}

/// Solves `(M_CC - 1) x = 0`, `Σ x = 1` on an irreducible closed class by
/// replacing the last balance equation with the normalization.
fn class_stationary_vector(m: &StochasticChannel, class: &[usize]) -> Result<Vec<f64>> {
    let k = class.len();
    let mut a = DMatrix::from_fn(k, k, |r, c| {
        m.get(class[r], class[c]) - if r == c { 1.0 } else { 0.0 }
    });
    a.row_mut(k - 1).fill(1.0);
    let mut rhs = DVector::zeros(k);
    rhs[k - 1] = 1.0;
    let x = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| DiscordError::NumericalFailure(format!("singular balance system for class {class:?}")))?;
    let mut full = vec![0.0; m.dim()];
    for (r, &i) in class.iter().enumerate() {
        full[i] = x[r];
    }
    let mv = m.apply_to_vector(&full)?;
    let residual = mv.iter().zip(&full).fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
    if residual > NULLSPACE_RESIDUAL_MAX || full.iter().any(|&v| v < -NULLSPACE_RESIDUAL_MAX) {
        return Err(DiscordError::NumericalFailure(format!(
            "stationary solve for class {class:?} has residual {residual:e}"
        )));
    }
    full.iter_mut().for_each(|v| *v = v.max(0.0));
    let s: f64 = full.iter().sum();
    full.iter_mut().for_each(|v| *v /= s);
    Ok(full)
}

/// Builds `p = Σ_jk q_jk e_j ⊗ m_k`: row `j` of the table is
/// `Σ_k q_jk m_k`. `weights` is `d_A x R`.
pub fn make_zero_discord_state(family: &StationaryFamily, weights: &[Vec<f64>]) -> Result<JointDistribution> {
    let r = family.rank();
    if weights.is_empty() {
        return Err(DiscordError::InvalidWeights("no rows".into()));
    }
    if let Some(row) = weights.iter().find(|row| row.len() != r) {
        return Err(DiscordError::InvalidWeights(format!(
            "row has {} weights, family has {r} stationary vectors",
            row.len()
        )));
    }
    let mut total = 0.0;
    for (j, row) in weights.iter().enumerate() {
        for (k, &q) in row.iter().enumerate() {
            if !q.is_finite() || q < 0.0 {
                return Err(DiscordError::InvalidWeights(format!("q[{j}][{k}] = {q}")));
            }
            total += q;
        }
    }
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(DiscordError::InvalidWeights(format!("weights sum to {total}")));
    }
    let d = family.channel_dim;
    let table = DMatrix::from_fn(weights.len(), d, |j, i| {
        weights[j]
            .iter()
            .zip(&family.vectors)
            .map(|(q, mk)| q * mk[i])
            .sum::<f64>()
    });
    JointDistribution::new(table)
}

/// Max-norm residual of `(1 ⊗ M) vec_rows(p) = vec_rows(p)`, the flattened
/// fixed-point condition with Alice's index outermost.
pub fn fixed_point_residual(p: &JointDistribution, m: &StochasticChannel) -> Result<f64> {
    if p.dim_b() != m.dim() {
        return Err(DiscordError::DimensionMismatch {
            expected: p.dim_b(),
            found: m.dim(),
        });
    }
    let big = kron(&DMatrix::identity(p.dim_a(), p.dim_a()), m.matrix());
    let v = vec_rows(p.probs());
    Ok((&big * &v - &v).amax())
}

/// Zero-discord channels for a fixed table: column-stochastic `M` with
/// `A_eq vec(M) = b_eq`, where the first `d_A d_B` rows encode the fixed
/// point and the last `d_B` rows the column sums.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelPolytope {
    pub state_dim: usize,
    pub equality_matrix: Vec<Vec<f64>>,
    pub equality_rhs: Vec<f64>,
    /// Minimum-trace member; identity when nothing else is feasible.
    pub sample_channel: StochasticChannel,
    pub min_trace: f64,
}

pub fn zero_discord_channels(p: &JointDistribution) -> Result<ChannelPolytope> {
    let d = p.dim_b();
    let (a, b) = channel_constraints(p);
    let mut objective = DVector::zeros(d * d);
    for i in 0..d {
        objective[i * d + i] = 1.0;
    }
    let lp = LinearProgram::equality(objective, a.clone(), b.clone());
    let x = match lp.solve()? {
        LpOutcome::Optimal { x, .. } => x,
        other => {
            return Err(DiscordError::NumericalFailure(format!(
                "zero-discord channel program returned {other:?}; identity is always feasible"
            )))
        }
    };
    let sample = channel_from_vec(&x, d)?;
    Ok(ChannelPolytope {
        state_dim: d,
        equality_matrix: matrix_to_rows(&a),
        equality_rhs: b.as_slice().to_vec(),
        min_trace: sample.trace(),
        sample_channel: sample,
    })
}

fn channel_constraints(p: &JointDistribution) -> (DMatrix<f64>, DVector<f64>) {
    let d = p.dim_b();
    let fixed = kron(p.probs(), &DMatrix::identity(d, d));
    let rhs = vec(&p.probs().transpose());
    let n_fixed = fixed.nrows();
    let mut a = DMatrix::zeros(n_fixed + d, d * d);
    a.view_mut((0, 0), (n_fixed, d * d)).copy_from(&fixed);
    for j in 0..d {
        for i in 0..d {
            a[(n_fixed + j, j * d + i)] = 1.0;
        }
    }
    let mut b = DVector::from_element(n_fixed + d, 1.0);
    b.rows_mut(0, n_fixed).copy_from(&rhs);
    (a, b)
}

fn channel_from_vec(x: &DVector<f64>, d: usize) -> Result<StochasticChannel> {
    let mut m = unvec(x, d, d)?;
    m.iter_mut().for_each(|v| {
        if *v < 0.0 {
            *v = 0.0
        }
    });
    StochasticChannel::new(m)
}

impl ChannelPolytope {
    fn system(&self) -> (DMatrix<f64>, DVector<f64>) {
        let rows = self.equality_matrix.len();
        let cols = self.state_dim * self.state_dim;
        let a = DMatrix::from_fn(rows, cols, |i, j| self.equality_matrix[i][j]);
        (a, DVector::from_column_slice(&self.equality_rhs))
    }

    /// Max-norm violation of the equality system by `vec(M)`.
    pub fn residual(&self, m: &StochasticChannel) -> Result<f64> {
        if m.dim() != self.state_dim {
            return Err(DiscordError::DimensionMismatch {
                expected: self.state_dim,
                found: m.dim(),
            });
        }
        let (a, b) = self.system();
        Ok((a * vec(m.matrix()) - b).amax())
    }

    pub fn contains(&self, m: &StochasticChannel, tol: f64) -> Result<bool> {
        Ok(self.residual(m)? <= tol)
    }

    /// Member minimizing `Σ_ij C(i, j) M(i, j)`.
    pub fn minimize(&self, cost: &DMatrix<f64>) -> Result<StochasticChannel> {
        let d = self.state_dim;
        if cost.shape() != (d, d) {
            return Err(DiscordError::DimensionMismatch {
                expected: d,
                found: cost.nrows(),
            });
        }
        let (a, b) = self.system();
        match LinearProgram::equality(vec(cost), a, b).solve()? {
            LpOutcome::Optimal { x, .. } => channel_from_vec(&x, d),
            other => Err(DiscordError::NumericalFailure(format!("unexpected LP outcome {other:?}"))),
        }
    }

    /// A member with `trace(M) <= bound`, if one exists.
    pub fn member_with_trace_at_most(&self, bound: f64) -> Result<Option<StochasticChannel>> {
        let d = self.state_dim;
        let (a, b) = self.system();
        let mut trace_row = vec![0.0; d * d];
        for i in 0..d {
            trace_row[i * d + i] = 1.0;
        }
        let lp = LinearProgram::equality(DVector::zeros(d * d), a, b).with_le_row(&trace_row, bound);
        match lp.solve()? {
            LpOutcome::Optimal { x, .. } => Ok(Some(channel_from_vec(&x, d)?)),
            LpOutcome::Infeasible => Ok(None),
            LpOutcome::Unbounded => Err(DiscordError::NumericalFailure("feasibility program unbounded".into())),
        }
    }

    /// All vertices, by enumerating bases of the reduced equality system.
    /// Only offered up to [`MAX_VERTEX_DIM`].
    pub fn vertices(&self) -> Result<Vec<StochasticChannel>> {
        let d = self.state_dim;
        if d > MAX_VERTEX_DIM {
            return Err(DiscordError::DimensionTooLarge {
                what: "vertex enumeration",
                dim: d,
                max: MAX_VERTEX_DIM,
            });
        }
        let (a, b) = self.system();
        let (a, b) = independent_rows(&a, &b, 1e-10);
        let n = d * d;
        let rank = a.nrows();
        let mut out: Vec<StochasticChannel> = Vec::new();
        for cols in (0..n).combinations(rank) {
            let basis = DMatrix::from_fn(rank, rank, |i, j| a[(i, cols[j])]);
            let Some(xb) = basis.clone().lu().solve(&b) else {
                continue;
            };
            if (&basis * &xb - &b).amax() > 1e-9 || basis.determinant().abs() < 1e-12 {
                continue;
            }
            if xb.iter().any(|&v| v < -1e-9) {
                continue;
            }
            let mut x = DVector::zeros(n);
            for (k, &c) in cols.iter().enumerate() {
                x[c] = xb[k];
            }
            let m = channel_from_vec(&x, d)?;
            let dup = out
                .iter()
                .any(|v| (v.matrix() - m.matrix()).amax() < 1e-9);
            if !dup {
                out.push(m);
            }
        }
        Ok(out)
    }
}

/// Keeps a maximal set of linearly independent rows of `[A | b]`
/// (Gram-Schmidt with a relative threshold).
fn independent_rows(a: &DMatrix<f64>, b: &DVector<f64>, tol: f64) -> (DMatrix<f64>, DVector<f64>) {
    let mut kept: Vec<usize> = Vec::new();
    let mut ortho: Vec<DVector<f64>> = Vec::new();
    for r in 0..a.nrows() {
        let row: DVector<f64> = a.row(r).transpose();
        let mut v = row.clone();
        for q in &ortho {
            let c = q.dot(&v);
            v -= q * c;
        }
        let norm = v.norm();
        if norm > tol * row.norm().max(1.0) {
            ortho.push(v / norm);
            kept.push(r);
        }
    }
    let a2 = DMatrix::from_fn(kept.len(), a.ncols(), |i, j| a[(kept[i], j)]);
    let b2 = DVector::from_fn(kept.len(), |i, _| b[kept[i]]);
    (a2, b2)
}
