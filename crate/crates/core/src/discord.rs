//! Classical discord `D = I(A;B) - J`, where `J` is the mutual information
//! left after Bob's register is read through a noisy channel.

use serde::{Deserialize, Serialize};

use crate::channels::{apply_to_b, StochasticChannel};
use crate::distributions::{EntropyBits, JointDistribution};
use crate::error::Result;
use crate::DEFAULT_TOL;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscordReport {
    #[serde(rename = "mutual_information_I")]
    pub mutual_information: EntropyBits,
    #[serde(rename = "measured_J")]
    pub measured: EntropyBits,
    pub discord: EntropyBits,
    /// Verdict of the fixed-point test `p M^T = p`.
    pub is_zero: bool,
}

/// `J = I(p M^T)`.
pub fn measured_mutual_information(p: &JointDistribution, m: &StochasticChannel) -> Result<EntropyBits> {
    Ok(apply_to_b(p, m)?.mutual_information())
}

/// Discord from A to B with the default zero tolerance.
pub fn classical_discord(p: &JointDistribution, m: &StochasticChannel) -> Result<DiscordReport> {
    classical_discord_with_tol(p, m, DEFAULT_TOL)
}

pub fn classical_discord_with_tol(
    p: &JointDistribution,
    m: &StochasticChannel,
    tol: f64,
) -> Result<DiscordReport> {
    let noisy = apply_to_b(p, m)?;
    let i = p.mutual_information();
    let j = noisy.mutual_information();
    Ok(DiscordReport {
        mutual_information: i,
        measured: j,
        discord: EntropyBits(i.0 - j.0),
        is_zero: noisy.max_abs_diff(p) <= tol,
    })
}

/// Discord from B to A, computed on the transposed table.
pub fn classical_discord_b_to_a(p: &JointDistribution, m: &StochasticChannel) -> Result<DiscordReport> {
    classical_discord(&p.transpose(), m)
}

/// Fixed-point test `p M^T = p` in max norm. A fixed point always has zero
/// discord. The converse fails when the readout only scrambles parts of B
/// that carry no information about A, e.g. any product state under a
/// channel that moves B's marginal.
pub fn is_zero_discord(p: &JointDistribution, m: &StochasticChannel, tol: f64) -> Result<bool> {
    Ok(apply_to_b(p, m)?.max_abs_diff(p) <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::merging::binary_entropy;
    use approx::assert_abs_diff_eq;

    #[test]
    fn product_states_have_zero_discord_without_being_fixed() {
        let p = JointDistribution::product(&[0.3, 0.7], &[0.9, 0.1]).unwrap();
        let m = bsc(0.2);
        let r = classical_discord(&p, &m).unwrap();
        assert_abs_diff_eq!(r.discord.value(), 0.0, epsilon = 1e-15);
        assert!(!r.is_zero);
        assert!(!is_zero_discord(&p, &m, 1e-9).unwrap());
    }

    fn corr() -> JointDistribution {
        JointDistribution::from_rows(&[vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap()
    }

    fn bsc(eps: f64) -> StochasticChannel {
        StochasticChannel::binary_symmetric(eps).unwrap()
    }

    #[test]
    fn measured_information_examples() {
        let id = StochasticChannel::identity(2);
        assert_eq!(measured_mutual_information(&corr(), &id).unwrap().value(), 1.0);
        assert_eq!(
            measured_mutual_information(&corr(), &StochasticChannel::uniform(2)).unwrap().value(),
            0.0
        );
        let j = measured_mutual_information(&corr(), &bsc(0.1)).unwrap().value();
        assert_abs_diff_eq!(j, 0.5310044064, epsilon = 1e-10);
        // H(A) + H(B') - H(A,B') on [[0.45,0.05],[0.05,0.45]] evaluated by hand
        let h_joint = -(2.0 * 0.45 * 0.45f64.log2() + 2.0 * 0.05 * 0.05f64.log2());
        assert_abs_diff_eq!(j, 2.0 - h_joint, epsilon = 1e-14);
        assert!(measured_mutual_information(&corr(), &StochasticChannel::identity(3)).is_err());
    }

    #[test]
    fn discord_examples() {
        let r = classical_discord(&corr(), &StochasticChannel::identity(2)).unwrap();
        assert_eq!(r.discord.value(), 0.0);
        assert!(r.is_zero);
        let r = classical_discord(&corr(), &bsc(0.1)).unwrap();
        assert_abs_diff_eq!(r.discord.value(), 0.4689955936, epsilon = 1e-10);
        assert_abs_diff_eq!(r.discord.value(), r.mutual_information.value() - r.measured.value(), epsilon = 1e-15);
        assert!(!r.is_zero);
        let prod = JointDistribution::from_rows(&[vec![0.25, 0.25], vec![0.25, 0.25]]).unwrap();
        let z = StochasticChannel::from_rows(&[vec![1.0, 0.3], vec![0.0, 0.7]]).unwrap();
        for m in [bsc(0.1), z, StochasticChannel::uniform(2)] {
            assert!(classical_discord(&prod, &m).unwrap().discord.value().abs() < 1e-10);
        }
    }

    #[test]
    fn zero_discord_examples() {
        assert!(is_zero_discord(&corr(), &StochasticChannel::identity(2), 1e-12).unwrap());
        assert!(!is_zero_discord(&corr(), &bsc(0.1), 1e-9).unwrap());
        let p = JointDistribution::product(&[0.8, 0.2], &[0.5, 0.5]).unwrap();
        assert!(is_zero_discord(&p, &bsc(0.3), 1e-12).unwrap());
        assert!(is_zero_discord(&p, &StochasticChannel::identity(3), 1e-12).is_err());
    }

    #[test]
    fn bsc_discord_is_binary_entropy_and_increasing() {
        let mut last = -1.0;
        for k in 0..=50 {
            let eps = k as f64 / 100.0;
            let d = classical_discord(&corr(), &bsc(eps)).unwrap().discord.value();
            assert_abs_diff_eq!(d, binary_entropy(eps).unwrap().value(), epsilon = 1e-12);
            assert!(d > last, "not increasing at eps={eps}");
            last = d;
        }
    }

    #[test]
    fn reverse_direction_uses_transpose() {
        let p = JointDistribution::from_rows(&[vec![0.4, 0.1, 0.0], vec![0.0, 0.2, 0.3]]).unwrap();
        let m = bsc(0.2);
        let r = classical_discord_b_to_a(&p, &m).unwrap();
        assert_eq!(r, classical_discord(&p.transpose(), &m).unwrap());
        assert!(classical_discord(&p, &m).is_err());
    }

    #[test]
    fn report_json_fields() {
        let r = classical_discord(&corr(), &bsc(0.1)).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        for key in ["mutual_information_I", "measured_J", "discord", "is_zero"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        let back: DiscordReport = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
    }
}
