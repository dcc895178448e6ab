//! Reproducible per-trial random streams.
//!
//! Every trial owns a SplitMix64 stream whose starting state is derived from the
//! master seed and the trial index:
//!
//! ```text
//! state₀(seed, i) = splitmix64_next(seed XOR (i · 0x9E3779B97F4A7C15))
//! u = (next_u64 >> 11) · 2⁻⁵³                        ∈ [0, 1)
//! ```
//!
//! Because a trial's draws depend only on `(seed, i)`, results are identical no
//! matter how trials are scheduled across worker threads.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Derive an independent 64-bit seed for sub-task `index` of `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut sm = SplitMix64::from_seed((seed ^ index.wrapping_mul(GOLDEN_GAMMA)).to_le_bytes());
    sm.next_u64()
}

#[derive(Debug, Clone)]
pub struct TrialStream {
    inner: SplitMix64,
}

impl TrialStream {
    pub fn new(seed: u64, trial: u64) -> Self {
        TrialStream {
            inner: SplitMix64::from_seed(derive_seed(seed, trial).to_le_bytes()),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform variate in `[0, 1)` with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// `true` iff a fresh uniform `u` satisfies `u < p`.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }
}

/// Run `n` trials in parallel on the current rayon pool, keeping trial order.
pub fn map_trials<T, F>(n: u64, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut TrialStream) -> T + Sync,
{
    (0..n)
        .into_par_iter()
        .map(|i| f(&mut TrialStream::new(seed, i)))
        .collect()
}

/// Run `n` trials in parallel and count how often each of four categories comes up.
pub fn tally_trials<F>(n: u64, seed: u64, f: F) -> [u64; 4]
where
    F: Fn(&mut TrialStream) -> usize + Sync,
{
    (0..n)
        .into_par_iter()
        .fold(
            || [0u64; 4],
            |mut acc, i| {
                acc[f(&mut TrialStream::new(seed, i))] += 1;
                acc
            },
        )
        .reduce(|| [0u64; 4], |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]])
}
