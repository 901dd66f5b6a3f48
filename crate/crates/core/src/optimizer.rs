//! Stochastic discord: the smallest discord over a family of allowed
//! channels,
//!
//! ```text
//! D_C(p) = min_M [ I(A;B) - J_M(p) ] = min_M [ H(A|B') - H(A|B) ].
//! ```
//!
//! Any family containing the noiseless channel gives zero, so the family is
//! always an explicit argument. The search is a projected Nelder-Mead from
//! several starts; a brute-force grid serves as an independent oracle.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{apply_to_b, StochasticChannel};
use crate::distributions::{EntropyBits, JointDistribution};
use crate::error::{DiscordError, Result};
use crate::merging::binary_entropy;
use crate::sampling::simplex_point;

/// Agreement required between local search and grid oracle to certify.
pub const CERTIFY_TOL: f64 = 1e-6;
const MIN_STARTS: usize = 8;
const FORMS_AGREE_TOL: f64 = 1e-10;

/// Shape of the allowed channel set, as written in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyKind {
    /// Every column-stochastic matrix with all entries at least `epsilon`.
    EntrywiseLowerBound { epsilon: f64 },
    /// Independent binary symmetric noise `BSC(eps)` on each of the
    /// `log2(d)` bits, with `eps` in `[eps_min, eps_max]`.
    ParametricBsc { eps_min: f64, eps_max: f64 },
    ExplicitSet { channels: Vec<StochasticChannel> },
}

/// JSON form of a family; `dim` may be left out and filled in from the state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    #[serde(flatten)]
    pub kind: FamilyKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FamilySpec", into = "FamilySpec")]
pub struct ChannelFamily {
    dim: usize,
    kind: FamilyKind,
}

impl TryFrom<FamilySpec> for ChannelFamily {
    type Error = DiscordError;

    fn try_from(spec: FamilySpec) -> Result<Self> {
        ChannelFamily::from_spec(spec, None)
    }
}

impl From<ChannelFamily> for FamilySpec {
    fn from(f: ChannelFamily) -> Self {
        FamilySpec {
            kind: f.kind,
            dim: Some(f.dim),
        }
    }
}

impl ChannelFamily {
    pub fn new(dim: usize, kind: FamilyKind) -> Result<Self> {
        if dim == 0 {
            return Err(DiscordError::EmptyFamily("dimension 0".into()));
        }
        match &kind {
            FamilyKind::EntrywiseLowerBound { epsilon } => {
                if !(*epsilon >= 0.0 && *epsilon <= 1.0 / dim as f64) {
                    return Err(DiscordError::EmptyFamily(format!(
                        "entry bound {epsilon} must lie in [0, 1/{dim}]"
                    )));
                }
            }
            FamilyKind::ParametricBsc { eps_min, eps_max } => {
                if !(0.0 <= *eps_min && eps_min <= eps_max && *eps_max <= 0.5) {
                    return Err(DiscordError::EmptyFamily(format!(
                        "need 0 <= eps_min <= eps_max <= 1/2, got [{eps_min}, {eps_max}]"
                    )));
                }
                if !dim.is_power_of_two() || dim < 2 {
                    return Err(DiscordError::EmptyFamily(format!(
                        "bitwise symmetric noise needs a power-of-two dimension, got {dim}"
                    )));
                }
            }
            FamilyKind::ExplicitSet { channels } => {
                if channels.is_empty() {
                    return Err(DiscordError::EmptyFamily("no channels listed".into()));
                }
                if let Some(m) = channels.iter().find(|m| m.dim() != dim) {
                    return Err(DiscordError::DimensionMismatch {
                        expected: dim,
                        found: m.dim(),
                    });
                }
            }
        }
        Ok(ChannelFamily { dim, kind })
    }

    /// Resolves a JSON spec, taking `default_dim` when the spec has none.
    /// Explicit sets infer their dimension from the first channel.
    pub fn from_spec(spec: FamilySpec, default_dim: Option<usize>) -> Result<Self> {
        let inferred = match &spec.kind {
            FamilyKind::ExplicitSet { channels } => channels.first().map(|m| m.dim()),
            _ => None,
        };
        let dim = spec
            .dim
            .or(default_dim)
            .or(inferred)
            .ok_or_else(|| DiscordError::EmptyFamily("family dimension not given".into()))?;
        ChannelFamily::new(dim, spec.kind)
    }

    pub fn entrywise_lower_bound(dim: usize, epsilon: f64) -> Result<Self> {
        Self::new(dim, FamilyKind::EntrywiseLowerBound { epsilon })
    }

    pub fn parametric_bsc(dim: usize, eps_min: f64, eps_max: f64) -> Result<Self> {
        Self::new(dim, FamilyKind::ParametricBsc { eps_min, eps_max })
    }

    pub fn explicit(channels: Vec<StochasticChannel>) -> Result<Self> {
        let dim = channels
            .first()
            .map(|m| m.dim())
            .ok_or_else(|| DiscordError::EmptyFamily("no channels listed".into()))?;
        Self::new(dim, FamilyKind::ExplicitSet { channels })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    /// Membership within `tol`.
    pub fn contains(&self, m: &StochasticChannel, tol: f64) -> bool {
        if m.dim() != self.dim {
            return false;
        }
        match &self.kind {
            FamilyKind::EntrywiseLowerBound { epsilon } => {
                m.matrix().iter().all(|&x| x >= epsilon - tol) && m.column_sum_error() <= tol
            }
            FamilyKind::ParametricBsc { eps_min, eps_max } => {
                // the flip rate is read off the (1, 0) entry of the first bit
                let bits = self.dim.trailing_zeros();
                let eps = 1.0 - m.get(0, 0).powf(1.0 / bits as f64);
                eps >= eps_min - tol
                    && eps <= eps_max + tol
                    && bitwise_bsc(self.dim, eps.clamp(0.0, 0.5))
                        .map(|b| (b.matrix() - m.matrix()).amax() <= tol)
                        .unwrap_or(false)
            }
            FamilyKind::ExplicitSet { channels } => channels
                .iter()
                .any(|c| (c.matrix() - m.matrix()).amax() <= tol),
        }
    }
}

/// `BSC(eps)` on every bit of a `d = 2^n` alphabet.
pub fn bitwise_bsc(d: usize, eps: f64) -> Result<StochasticChannel> {
    let bsc = StochasticChannel::binary_symmetric(eps)?;
    let mut m = StochasticChannel::identity(1);
    for _ in 0..d.trailing_zeros() {
        m = m.tensor(&bsc);
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    Converged,
    /// Some start hit its iteration budget; the best point so far is kept.
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizationResult {
    pub min_discord: EntropyBits,
    pub argmin_channel: StochasticChannel,
    pub iterations: usize,
    pub certified: bool,
    pub status: SearchStatus,
}

fn discord_value(p: &JointDistribution, m: &StochasticChannel) -> f64 {
    let noisy = apply_to_b(p, m).expect("dimensions checked by caller");
    p.mutual_information().0 - noisy.mutual_information().0
}

/// Points of a family's parameter space and how they map to channels.
trait Parameterization: Sync {
    fn channel(&self, x: &[f64]) -> StochasticChannel;
    fn project(&self, x: &mut [f64]);
    fn starts(&self, rng: &mut ChaCha8Rng, count: usize) -> Vec<Vec<f64>>;
    fn initial_step(&self) -> f64;
}

struct LowerBoundParams {
    d: usize,
    eps: f64,
}

impl Parameterization for LowerBoundParams {
    fn channel(&self, x: &[f64]) -> StochasticChannel {
        StochasticChannel::from_matrix_unchecked(DMatrix::from_column_slice(self.d, self.d, x))
    }

    fn project(&self, x: &mut [f64]) {
        for col in x.chunks_mut(self.d) {
            project_column(col, self.eps);
        }
    }

    fn starts(&self, rng: &mut ChaCha8Rng, count: usize) -> Vec<Vec<f64>> {
        let d = self.d;
        let (lo, hi) = (self.eps, 1.0 - (d as f64 - 1.0) * self.eps);
        let extreme = |choice: &[usize]| -> Vec<f64> {
            let mut x = vec![lo; d * d];
            for (j, &i) in choice.iter().enumerate() {
                x[j * d + i] = hi;
            }
            x
        };
        let mut out = vec![extreme(&(0..d).collect::<Vec<_>>())];
        let total = d.checked_pow(d as u32).unwrap_or(usize::MAX);
        if total <= 16 {
            for code in 0..total {
                let choice: Vec<usize> = (0..d).map(|j| code / d.pow(j as u32) % d).collect();
                let x = extreme(&choice);
                if !out.contains(&x) {
                    out.push(x);
                }
            }
        } else {
            for _ in 0..4 {
                let choice: Vec<usize> = (0..d).map(|_| rng.random_range(0..d)).collect();
                out.push(extreme(&choice));
            }
        }
        let target = count.max(out.len() + 4);
        while out.len() < target {
            let mut x = Vec::with_capacity(d * d);
            for _ in 0..d {
                let s = simplex_point(rng, d);
                x.extend(s.iter().map(|v| lo + (1.0 - d as f64 * lo) * v));
            }
            out.push(x);
        }
        out
    }

    fn initial_step(&self) -> f64 {
        0.1 * (1.0 - self.d as f64 * self.eps).max(1e-3)
    }
}

/// Euclidean projection of a column onto `{x >= eps, Σ x = 1}`.
fn project_column(col: &mut [f64], eps: f64) {
    let n = col.len();
    let budget = 1.0 - n as f64 * eps;
    if budget <= 0.0 {
        col.iter_mut().for_each(|v| *v = 1.0 / n as f64);
        return;
    }
    let mut sorted: Vec<f64> = col.iter().map(|v| v - eps).collect();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - budget) / (k + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    col.iter_mut().for_each(|v| *v = eps + (*v - eps - theta).max(0.0));
    let s: f64 = col.iter().sum();
    // remove rounding drift so columns sum to one
    let fix = (s - 1.0) / n as f64;
    if fix != 0.0 && col.iter().all(|&v| v - fix >= eps) {
        col.iter_mut().for_each(|v| *v -= fix);
    }
}

struct BscParams {
    d: usize,
    lo: f64,
    hi: f64,
}

impl Parameterization for BscParams {
    fn channel(&self, x: &[f64]) -> StochasticChannel {
        bitwise_bsc(self.d, x[0]).expect("projected rate is in range")
    }

    fn project(&self, x: &mut [f64]) {
        x[0] = x[0].clamp(self.lo, self.hi);
    }

    fn starts(&self, rng: &mut ChaCha8Rng, count: usize) -> Vec<Vec<f64>> {
        let mut out = vec![vec![self.lo], vec![self.hi]];
        while out.len() < count {
            out.push(vec![rng.random_range(self.lo..=self.hi)]);
        }
        out
    }

    fn initial_step(&self) -> f64 {
        ((self.hi - self.lo) * 0.1).max(1e-6)
    }
}

struct LocalOutcome {
    x: Vec<f64>,
    value: f64,
    iterations: usize,
    converged: bool,
}

/// Nelder-Mead where every trial point is projected back onto the family.
fn projected_nelder_mead<P: Parameterization + ?Sized>(
    params: &P,
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    start: &[f64],
    budget: usize,
) -> LocalOutcome {
    let n = start.len();
    let mut x0 = start.to_vec();
    params.project(&mut x0);
    let step = params.initial_step();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.clone(), f(&x0)));
    for k in 0..n {
        let mut v = x0.clone();
        v[k] += step;
        params.project(&mut v);
        if v == x0 {
            v = x0.clone();
            v[k] -= step;
            params.project(&mut v);
        }
        let fv = f(&v);
        simplex.push((v, fv));
    }

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < budget {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        let diameter = simplex[1..]
            .iter()
            .map(|(v, _)| v.iter().zip(&simplex[0].0).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())))
            .fold(0.0, f64::max);
        if spread.abs() <= 1e-14 || diameter <= 1e-12 {
            converged = true;
            break;
        }
        iterations += 1;
        let mut centroid = vec![0.0; n];
        for (v, _) in &simplex[..n] {
            centroid.iter_mut().zip(v).for_each(|(c, x)| *c += x / n as f64);
        }
        let toward = |coef: f64| -> (Vec<f64>, f64) {
            let mut p: Vec<f64> = centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + coef * (c - w))
                .collect();
            params.project(&mut p);
            let fp = f(&p);
            (p, fp)
        };
        let reflected = toward(alpha);
        if reflected.1 < simplex[0].1 {
            let expanded = toward(gamma);
            simplex[n] = if expanded.1 < reflected.1 { expanded } else { reflected };
        } else if reflected.1 < simplex[n - 1].1 {
            simplex[n] = reflected;
        } else {
            let contracted = if reflected.1 < simplex[n].1 { toward(rho) } else { toward(-rho) };
            if contracted.1 < simplex[n].1.min(reflected.1) {
                simplex[n] = contracted;
            } else {
                let best = simplex[0].0.clone();
                for (v, fv) in simplex.iter_mut().skip(1) {
                    v.iter_mut().zip(&best).for_each(|(x, b)| *x = b + sigma * (*x - b));
                    params.project(v);
                    *fv = f(v);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    LocalOutcome {
        x,
        value,
        iterations,
        converged,
    }
}

/// Multi-start projected search for the least discord over `family`.
/// `budget` caps the iterations of each start; `seed` fixes the random
/// interior starts.
pub fn stochastic_discord(
    p: &JointDistribution,
    family: &ChannelFamily,
    budget: usize,
    seed: u64,
) -> Result<MinimizationResult> {
    if family.dim() != p.dim_b() {
        return Err(DiscordError::DimensionMismatch {
            expected: p.dim_b(),
            found: family.dim(),
        });
    }
    if budget == 0 {
        return Err(DiscordError::OutOfRange {
            name: "budget",
            value: 0.0,
            min: 1.0,
            max: f64::INFINITY,
        });
    }
    let d = family.dim();
    let (channel, value, iterations, status) = match family.kind() {
        FamilyKind::ExplicitSet { channels } => {
            let (best, value) = channels
                .iter()
                .map(|m| (m, discord_value(p, m)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("family is nonempty");
            (best.clone(), value, channels.len(), SearchStatus::Converged)
        }
        FamilyKind::EntrywiseLowerBound { epsilon } => {
            let params = LowerBoundParams { d, eps: *epsilon };
            run_starts(p, &params, budget, seed)
        }
        FamilyKind::ParametricBsc { eps_min, eps_max } => {
            let params = BscParams {
                d,
                lo: *eps_min,
                hi: *eps_max,
            };
            run_starts(p, &params, budget, seed)
        }
    };

    let conditional_form = apply_to_b(p, &channel)?.conditional_entropy_a_given_b().0
        - p.conditional_entropy_a_given_b().0;
    if (conditional_form - value).abs() > FORMS_AGREE_TOL {
        return Err(DiscordError::NumericalFailure(format!(
            "I - J = {value} but H(A|B') - H(A|B) = {conditional_form}"
        )));
    }

    let certified = match grid_oracle(p, family, certification_step(family)) {
        Ok(oracle) => value <= oracle.min_discord.0 + CERTIFY_TOL && status == SearchStatus::Converged,
        Err(DiscordError::DimensionTooLarge { .. }) => false,
        Err(e) => return Err(e),
    };
    Ok(MinimizationResult {
        min_discord: EntropyBits(value),
        argmin_channel: channel,
        iterations,
        certified,
        status,
    })
}

fn run_starts<P: Parameterization>(
    p: &JointDistribution,
    params: &P,
    budget: usize,
    seed: u64,
) -> (StochasticChannel, f64, usize, SearchStatus) {
    let f = |x: &[f64]| discord_value(p, &params.channel(x));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts = params.starts(&mut rng, MIN_STARTS);
    let outcomes: Vec<LocalOutcome> = starts
        .par_iter()
        .map(|s| projected_nelder_mead(params, &f, s, budget))
        .collect();
    let iterations = outcomes.iter().map(|o| o.iterations).sum();
    let status = if outcomes.iter().all(|o| o.converged) {
        SearchStatus::Converged
    } else {
        SearchStatus::BudgetExhausted
    };
    let best = outcomes
        .into_iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("at least one start");
    (params.channel(&best.x), best.value, iterations, status)
}

fn certification_step(family: &ChannelFamily) -> f64 {
    match family.kind() {
        FamilyKind::EntrywiseLowerBound { .. } => 2e-3,
        _ => 1e-3,
    }
}

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    if hi <= lo {
        return vec![lo];
    }
    let n = ((hi - lo) / step).ceil() as usize;
    (0..=n).map(|k| (lo + k as f64 * step).min(hi)).collect()
}

/// Exhaustive evaluation over a discretized family. Two-parameter grids
/// are only available for `d = 2` lower-bound families.
pub fn grid_oracle(p: &JointDistribution, family: &ChannelFamily, step: f64) -> Result<MinimizationResult> {
    if !(step > 0.0) {
        return Err(DiscordError::OutOfRange {
            name: "step",
            value: step,
            min: 0.0,
            max: f64::INFINITY,
        });
    }
    if family.dim() != p.dim_b() {
        return Err(DiscordError::DimensionMismatch {
            expected: p.dim_b(),
            found: family.dim(),
        });
    }
    let candidates: Vec<StochasticChannel> = match family.kind() {
        FamilyKind::ExplicitSet { channels } => channels.clone(),
        FamilyKind::ParametricBsc { eps_min, eps_max } => grid(*eps_min, *eps_max, step)
            .into_iter()
            .map(|e| bitwise_bsc(family.dim(), e))
            .collect::<Result<_>>()?,
        FamilyKind::EntrywiseLowerBound { epsilon } => {
            if family.dim() != 2 {
                return Err(DiscordError::DimensionTooLarge {
                    what: "entrywise grid oracle",
                    dim: family.dim(),
                    max: 2,
                });
            }
            let axis = grid(*epsilon, 1.0 - epsilon, step);
            let mut out = Vec::with_capacity(axis.len() * axis.len());
            for &a in &axis {
                for &b in &axis {
                    out.push(StochasticChannel::from_matrix_unchecked(DMatrix::from_row_slice(
                        2,
                        2,
                        &[a, b, 1.0 - a, 1.0 - b],
                    )));
                }
            }
            out
        }
    };
    let values: Vec<f64> = candidates.par_iter().map(|m| discord_value(p, m)).collect();
    let (k, &best) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is nonempty");
    Ok(MinimizationResult {
        min_discord: EntropyBits(best),
        argmin_channel: candidates[k].clone(),
        iterations: candidates.len(),
        certified: true,
        status: SearchStatus::Converged,
    })
}

/// Upper bound on how far the grid minimum can sit above the true minimum.
///
/// Every family member is within total-variation distance `δ` of a grid
/// point in each channel column (`δ = n·step/2` for `n`-bit symmetric
/// noise, `step/2` for the 2x2 lower-bound square), so the noisy tables
/// differ by at most `δ` as well. Continuity of entropy,
/// `|H(r) - H(s)| <= δ log2(N - 1) + h2(δ)` on `N` outcomes, applied to
/// `H(B')` and `H(A,B')` bounds the change of `J`, and `I` is fixed.
pub fn grid_slack(p: &JointDistribution, family: &ChannelFamily, step: f64) -> f64 {
    let delta = match family.kind() {
        FamilyKind::ExplicitSet { .. } => return 0.0,
        FamilyKind::ParametricBsc { .. } => family.dim().trailing_zeros() as f64 * step / 2.0,
        FamilyKind::EntrywiseLowerBound { .. } => step / 2.0,
    }
    .min(0.5);
    let bound = |n: usize| delta * ((n.max(2) - 1) as f64).log2() + binary_entropy(delta).map_or(1.0, |h| h.0);
    bound(p.dim_b()) + bound(p.dim_a() * p.dim_b())
}
