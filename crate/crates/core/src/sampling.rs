//! Random distributions and channels for property checks and benchmarks.
//! Tables and channel columns are drawn uniformly from their simplices.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::Exp1;

use crate::channels::StochasticChannel;
use crate::distributions::JointDistribution;

/// A point drawn uniformly from the probability simplex of size `n`.
pub fn simplex_point<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

pub fn random_joint<R: Rng + ?Sized>(rng: &mut R, da: usize, db: usize) -> JointDistribution {
    let v = simplex_point(rng, da * db);
    JointDistribution::new(DMatrix::from_row_slice(da, db, &v)).expect("sampled table is valid")
}

/// Each column drawn independently and uniformly from the simplex.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, d: usize) -> StochasticChannel {
    let mut m = DMatrix::zeros(d, d);
    for j in 0..d {
        let col = simplex_point(rng, d);
        for (i, x) in col.into_iter().enumerate() {
            m[(i, j)] = x;
        }
    }
    StochasticChannel::new(m).expect("sampled channel is valid")
}
