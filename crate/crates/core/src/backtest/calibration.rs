//! Seeded Monte Carlo replications.
//!
//! Every replication owns a generator derived from `(master seed, index)`,
//! so results do not depend on how rayon schedules the work.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::tests::TestResult;
use crate::error::Result;

pub type ReplicationRng = ChaCha8Rng;

/// SplitMix64 mix of the master seed and the replication counter.
pub fn replication_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn replication_rng(master: u64, index: u64) -> ReplicationRng {
    ChaCha8Rng::seed_from_u64(replication_seed(master, index))
}

/// Fraction of replications whose test rejects at `significance`.
pub fn rejection_rate<F>(replications: usize, master_seed: u64, significance: f64, run: F) -> Result<f64>
where
    F: Fn(u64, &mut ReplicationRng) -> Result<TestResult> + Sync,
{
    let outcomes: Vec<bool> = (0..replications as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = replication_rng(master_seed, i);
            run(i, &mut rng).map(|r| r.rejects(significance))
        })
        .collect::<Result<_>>()?;
    Ok(outcomes.iter().filter(|&&b| b).count() as f64 / replications.max(1) as f64)
}
