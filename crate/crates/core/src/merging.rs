//! Two-bit classical state merging.
//!
//! The purified triple `(1-q) χ(a,b,c) + q χ(ā,b̄,c̄)` is conditionally pure
//! in every party. For it, the discord from A to a noisy C equals the
//! conditional entropy `H(A|C')`, and with identical noise on B and C also
//! `H(A|B')`:
//!
//! ```text
//! D(A->C) = H(C) - H(A,C) + H(A,C') - H(C') = H(A|C') = H(A|B')
//! ```
//!
//! since `H(C) = H(A,C) = h2(q)`. Classically there is no entanglement of
//! formation term, so nothing else enters the merging cost.

use serde::{Deserialize, Serialize};

use crate::channels::{apply_to_b, StochasticChannel};
use crate::discord::classical_discord;
use crate::distributions::{plogp, Axis, EntropyBits, JointDistribution, TripartiteDistribution};
use crate::error::{DiscordError, Result};

/// `h2(q) = -q log2 q - (1-q) log2 (1-q)`.
pub fn binary_entropy(q: f64) -> Result<EntropyBits> {
    check_unit(q, "q")?;
    Ok(EntropyBits(plogp(q) + plogp(1.0 - q)))
}

fn check_unit(q: f64, name: &'static str) -> Result<()> {
    if !(0.0..=1.0).contains(&q) {
        return Err(DiscordError::OutOfRange {
            name,
            value: q,
            min: 0.0,
            max: 1.0,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PurifiedTriple {
    pub base_bits: [u8; 3],
    pub mixing_q: f64,
    pub distribution: TripartiteDistribution,
}

/// Mass `1-q` on `(a, b, c)` and `q` on the complemented bits.
pub fn purify(a: u8, b: u8, c: u8, q: f64) -> Result<PurifiedTriple> {
    check_unit(q, "q")?;
    for (name, bit) in [("a", a), ("b", b), ("c", c)] {
        if bit > 1 {
            return Err(DiscordError::OutOfRange {
                name,
                value: bit as f64,
                min: 0.0,
                max: 1.0,
            });
        }
    }
    let idx = |x: u8, y: u8, z: u8| (x as usize * 2 + y as usize) * 2 + z as usize;
    let mut probs = vec![0.0; 8];
    probs[idx(a, b, c)] += 1.0 - q;
    probs[idx(1 - a, 1 - b, 1 - c)] += q;
    Ok(PurifiedTriple {
        base_bits: [a, b, c],
        mixing_q: q,
        distribution: TripartiteDistribution::new([2, 2, 2], probs)?,
    })
}

/// Joint table of two parties of a tripartite state.
pub fn pair_marginal(t: &TripartiteDistribution, rows: Axis, cols: Axis) -> Result<JointDistribution> {
    t.pair_marginal(rows, cols)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergingReport {
    #[serde(rename = "lhs_discord_AC")]
    pub discord_ac: EntropyBits,
    #[serde(rename = "mid_H_A_given_Cprime")]
    pub h_a_given_c_noisy: EntropyBits,
    #[serde(rename = "rhs_H_A_given_Bprime")]
    pub h_a_given_b_noisy: EntropyBits,
    pub max_discrepancy: f64,
}

/// The four entropies of the expanded discord expression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MergingTerms {
    pub h_c: f64,
    pub h_ac: f64,
    pub h_ac_noisy: f64,
    pub h_c_noisy: f64,
}

impl MergingTerms {
    /// `H(C) - H(A,C) + H(A,C') - H(C')`.
    pub fn chain(&self) -> f64 {
        self.h_c - self.h_ac + self.h_ac_noisy - self.h_c_noisy
    }
}

pub fn merging_terms(triple: &PurifiedTriple, m: &StochasticChannel) -> Result<MergingTerms> {
    let ac = triple.distribution.pair_marginal(Axis::A, Axis::C)?;
    let ac_noisy = apply_to_b(&ac, m)?;
    Ok(MergingTerms {
        h_c: ac.entropy_b().0,
        h_ac: ac.joint_entropy().0,
        h_ac_noisy: ac_noisy.joint_entropy().0,
        h_c_noisy: ac_noisy.entropy_b().0,
    })
}

/// Checks `D(A->C) = H(A|C') = H(A|B')` on the triple built from `(0,0,0)`
/// with the same channel on B and C.
pub fn verify_merging_identity(q: f64, m: &StochasticChannel) -> Result<MergingReport> {
    verify_merging_identity_for(&purify(0, 0, 0, q)?, m)
}

pub fn verify_merging_identity_for(triple: &PurifiedTriple, m: &StochasticChannel) -> Result<MergingReport> {
    let t = &triple.distribution;
    let ac = t.pair_marginal(Axis::A, Axis::C)?;
    let ab = t.pair_marginal(Axis::A, Axis::B)?;
    let discord = classical_discord(&ac, m)?.discord;
    let mid = apply_to_b(&ac, m)?.conditional_entropy_a_given_b();
    let rhs = apply_to_b(&ab, m)?.conditional_entropy_a_given_b();
    let max_discrepancy = (discord.0 - mid.0)
        .abs()
        .max((mid.0 - rhs.0).abs())
        .max((discord.0 - rhs.0).abs());
    Ok(MergingReport {
        discord_ac: discord,
        h_a_given_c_noisy: mid,
        h_a_given_b_noisy: rhs,
        max_discrepancy,
    })
}

/// Result of the first equality alone, for unequal noise on B and C.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitChannelReport {
    #[serde(rename = "lhs_discord_AC")]
    pub discord_ac: EntropyBits,
    #[serde(rename = "mid_H_A_given_Cprime")]
    pub h_a_given_c_noisy: EntropyBits,
    #[serde(rename = "H_A_given_Bprime")]
    pub h_a_given_b_noisy: EntropyBits,
    /// `|D(A->C) - H(A|C')|`; the B side is not expected to match.
    pub discrepancy: f64,
}

pub fn verify_merging_identity_split(
    triple: &PurifiedTriple,
    channel_b: &StochasticChannel,
    channel_c: &StochasticChannel,
) -> Result<SplitChannelReport> {
    let t = &triple.distribution;
    let ac = t.pair_marginal(Axis::A, Axis::C)?;
    let ab = t.pair_marginal(Axis::A, Axis::B)?;
    let discord = classical_discord(&ac, channel_c)?.discord;
    let mid = apply_to_b(&ac, channel_c)?.conditional_entropy_a_given_b();
    let rhs = apply_to_b(&ab, channel_b)?.conditional_entropy_a_given_b();
    Ok(SplitChannelReport {
        discord_ac: discord,
        h_a_given_c_noisy: mid,
        h_a_given_b_noisy: rhs,
        discrepancy: (discord.0 - mid.0).abs(),
    })
}

/// One row of a merging sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub q: f64,
    pub eps: f64,
    #[serde(flatten)]
    pub report: MergingReport,
}

/// Evenly spaced `q` in `[0, 1]` against binary symmetric noise with
/// `eps` evenly spaced in `[0, 1/2]`.
pub fn merging_sweep(q_points: usize, eps_points: usize) -> Result<Vec<SweepRow>> {
    let grid = |n: usize, hi: f64| -> Vec<f64> {
        match n {
            0 => vec![],
            1 => vec![0.0],
            _ => (0..n).map(|k| hi * k as f64 / (n - 1) as f64).collect(),
        }
    };
    let mut rows = Vec::with_capacity(q_points * eps_points);
    for q in grid(q_points, 1.0) {
        for eps in grid(eps_points, 0.5) {
            let m = StochasticChannel::binary_symmetric(eps)?;
            rows.push(SweepRow {
                q,
                eps,
                report: verify_merging_identity(q, &m)?,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn bsc(eps: f64) -> StochasticChannel {
        StochasticChannel::binary_symmetric(eps).unwrap()
    }

    #[test]
    fn purify_examples() {
        let t = purify(0, 0, 0, 0.0).unwrap();
        assert_eq!(t.distribution.get(0, 0, 0), 1.0);
        assert_eq!(t.distribution.as_slice().iter().sum::<f64>(), 1.0);
        let t = purify(0, 1, 0, 0.5).unwrap();
        assert_eq!(t.distribution.get(0, 1, 0), 0.5);
        assert_eq!(t.distribution.get(1, 0, 1), 0.5);
        let t = purify(0, 0, 0, 0.3).unwrap();
        let ac = pair_marginal(&t.distribution, Axis::A, Axis::C).unwrap();
        assert_abs_diff_eq!(ac.entropy_b().value(), 0.8812908992, epsilon = 1e-10);
        assert_abs_diff_eq!(ac.joint_entropy().value(), 0.8812908992, epsilon = 1e-10);
        assert!(purify(0, 0, 0, 1.5).is_err());
        assert!(purify(2, 0, 0, 0.5).is_err());
    }

    #[test]
    fn binary_entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap().value(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap().value(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap().value(), 0.0);
        // independent evaluation in natural logs
        let q: f64 = 0.11;
        let nats = -q * q.ln() - (1.0 - q) * (1.0 - q).ln();
        assert_abs_diff_eq!(binary_entropy(q).unwrap().value(), nats / std::f64::consts::LN_2, epsilon = 1e-15);
        assert_abs_diff_eq!(binary_entropy(q).unwrap().value(), 0.4999159582, epsilon = 1e-10);
        assert!(binary_entropy(-0.01).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
    }

    #[test]
    fn pair_marginals() {
        let t = purify(0, 0, 0, 0.3).unwrap();
        for (r, c) in [(Axis::A, Axis::C), (Axis::A, Axis::B)] {
            let p = pair_marginal(&t.distribution, r, c).unwrap();
            assert_eq!(p.to_rows(), vec![vec![0.7, 0.0], vec![0.0, 0.3]]);
        }
        let t = purify(1, 0, 1, 0.0).unwrap();
        let p = pair_marginal(&t.distribution, Axis::A, Axis::B).unwrap();
        assert_eq!(p.to_rows(), vec![vec![0.0, 0.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn identity_channel_merging_is_free() {
        let r = verify_merging_identity(0.3, &StochasticChannel::identity(2)).unwrap();
        assert!(r.discord_ac.value().abs() < 1e-12);
        assert!(r.h_a_given_c_noisy.value().abs() < 1e-12);
        assert!(r.h_a_given_b_noisy.value().abs() < 1e-12);
    }

    #[test]
    fn uniform_channel_costs_h_a() {
        for q in [0.0, 0.1, 0.3, 0.5, 0.9] {
            let r = verify_merging_identity(q, &StochasticChannel::uniform(2)).unwrap();
            let h = binary_entropy(q).unwrap().value();
            assert_abs_diff_eq!(r.discord_ac.value(), h, epsilon = 1e-12);
            assert_abs_diff_eq!(r.h_a_given_c_noisy.value(), h, epsilon = 1e-12);
            assert_abs_diff_eq!(r.h_a_given_b_noisy.value(), h, epsilon = 1e-12);
        }
    }

    #[test]
    fn bsc_merging_matches_direct_evaluation() {
        let r = verify_merging_identity(0.3, &bsc(0.1)).unwrap();
        // H(A|C') from the table [[0.63, 0.07], [0.03, 0.27]], spelled out
        let cells = [0.63f64, 0.07, 0.03, 0.27];
        let h_joint: f64 = cells.iter().map(|&x| -x * x.log2()).sum();
        let (c0, c1) = (0.66f64, 0.34f64);
        let h_c = -c0 * c0.log2() - c1 * c1.log2();
        let expect = h_joint - h_c;
        assert_abs_diff_eq!(r.h_a_given_c_noisy.value(), expect, epsilon = 1e-12);
        assert_abs_diff_eq!(r.discord_ac.value(), expect, epsilon = 1e-12);
        assert_abs_diff_eq!(r.h_a_given_b_noisy.value(), expect, epsilon = 1e-12);
        assert!(r.max_discrepancy <= 1e-10);
    }

    #[test]
    fn expanded_chain_cancels() {
        for q in [0.0, 0.2, 0.3, 0.77, 1.0] {
            let t = purify(0, 0, 0, q).unwrap();
            let m = bsc(0.15);
            let terms = merging_terms(&t, &m).unwrap();
            let h2 = binary_entropy(q).unwrap().value();
            assert_abs_diff_eq!(terms.h_c, h2, epsilon = 1e-12);
            assert_abs_diff_eq!(terms.h_ac, h2, epsilon = 1e-12);
            assert_abs_diff_eq!(terms.h_c - terms.h_ac, 0.0, epsilon = 1e-12);
            let r = verify_merging_identity_for(&t, &m).unwrap();
            assert_abs_diff_eq!(terms.chain(), r.h_a_given_c_noisy.value(), epsilon = 1e-12);
            assert_abs_diff_eq!(terms.chain(), r.discord_ac.value(), epsilon = 1e-12);
        }
    }

    #[test]
    fn tripartite_conditional_purity() {
        for bits in 0..8u8 {
            let (a, b, c) = (bits >> 2 & 1, bits >> 1 & 1, bits & 1);
            for q in [0.0, 0.25, 0.5, 0.75, 1.0] {
                let t = purify(a, b, c, q).unwrap();
                for axis in [Axis::A, Axis::B, Axis::C] {
                    let h = t.distribution.conditional_entropy_given_rest(axis).value();
                    assert!(h.abs() <= 1e-10, "H({axis:?}|rest) = {h}");
                }
            }
        }
    }

    #[test]
    fn split_channels_keep_first_equality() {
        let t = purify(0, 1, 1, 0.35).unwrap();
        let r = verify_merging_identity_split(&t, &bsc(0.05), &bsc(0.2)).unwrap();
        assert!(r.discrepancy <= 1e-10);
        assert!((r.h_a_given_b_noisy.value() - r.h_a_given_c_noisy.value()).abs() > 1e-3);
    }

    #[test]
    fn sweep_shape() {
        let rows = merging_sweep(11, 11).unwrap();
        assert_eq!(rows.len(), 121);
        assert_eq!(rows[0].q, 0.0);
        assert_eq!(rows[120].q, 1.0);
        assert_eq!(rows[120].eps, 0.5);
        assert!(rows.iter().all(|r| r.report.max_discrepancy <= 1e-10));
    }

    #[test]
    fn report_json_fields() {
        let r = verify_merging_identity(0.3, &bsc(0.1)).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        for key in ["lhs_discord_AC", "mid_H_A_given_Cprime", "rhs_H_A_given_Bprime", "max_discrepancy"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(serde_json::from_value::<MergingReport>(v).unwrap(), r);
    }
}
