//! Classical discord of finite bipartite distributions.
//!
//! A joint table `p_AB` is read on Bob's side through a noisy
//! column-stochastic channel `M`, giving `p_AB' = p_AB M^T`. The discord
//! `I(A;B) - I(A;B')` measures the correlation lost to the noise. The crate
//! computes it, constructs every zero-discord state of a channel and every
//! zero-discord channel of a state, minimizes discord over constrained
//! channel families, and checks the merging identity
//! `D(A->C) = H(A|C') = H(A|B')` on purified two-bit triples.
//!
//! ```
//! use cdiscord::{classical_discord, JointDistribution, StochasticChannel};
//!
//! let p = JointDistribution::from_rows(&[vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
//! let m = StochasticChannel::binary_symmetric(0.1).unwrap();
//! let report = classical_discord(&p, &m).unwrap();
//! assert!((report.discord.value() - 0.4689955935892812).abs() < 1e-12);
//! ```

pub mod channels;
pub mod discord;
pub mod distributions;
pub mod error;
pub mod json;
pub mod merging;
pub mod optimizer;
pub mod reshape;
pub mod sampling;
pub mod simplex;
pub mod zero_discord;

pub use channels::{apply_to_axis, apply_to_b, StochasticChannel};
pub use discord::{
    classical_discord, classical_discord_b_to_a, classical_discord_with_tol, is_zero_discord,
    measured_mutual_information, DiscordReport,
};
pub use distributions::{
    is_conditionally_pure, shannon_entropy, Axis, EntropyBits, JointDistribution, PurityVerdict,
    TripartiteDistribution,
};
pub use error::{DiscordError, Result};
pub use merging::{
    binary_entropy, merging_sweep, merging_terms, pair_marginal, purify, verify_merging_identity,
    verify_merging_identity_for, verify_merging_identity_split, MergingReport, PurifiedTriple, SweepRow,
};
pub use optimizer::{
    grid_oracle, grid_slack, stochastic_discord, ChannelFamily, FamilyKind, FamilySpec, MinimizationResult,
    SearchStatus,
};
pub use reshape::{kron, unvec, vec, vec_rows};
pub use zero_discord::{
    fixed_point_residual, make_zero_discord_state, stationary_family, zero_discord_channels, ChannelPolytope,
    StationaryFamily,
};

/// Allowed distance of a total probability from one on input.
pub const NORMALIZATION_TOL: f64 = 1e-9;
/// Entries this close below zero are treated as rounding and clamped.
pub const NEGATIVE_TOL: f64 = 1e-12;
/// Default comparison tolerance for zero tests.
pub const DEFAULT_TOL: f64 = 1e-9;
