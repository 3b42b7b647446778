//! Reproducible uniform sampling of realized profits.
//!
//! Every coordinate gets its own value from a stateless hash of
//! `(master_seed, trial_index, object_index, dimension)`, so trials can be
//! sampled in any order or concurrently. The mapping is fixed:
//!
//! ```text
//! key  = mix(mix(mix(mix(master_seed) ^ trial_index) ^ object_index) ^ dimension)
//! u    = (key >> 11) * 2^-53                      in [0, 1)
//! x    = clamp(lo' + u * (hi' - lo'), lo', hi')
//! ```
//!
//! where `mix` is the SplitMix64 output function, `object_index` counts
//! objects across groups in instance order, and `lo'`/`hi'` are the closest
//! floats inside the rational interval. Changing any of this changes every
//! recorded experiment, so it must stay as is.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{Interval, KnapsackInstance};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SampleSeed {
    pub master_seed: u64,
    pub trial_index: u64,
}

impl SampleSeed {
    pub fn new(master_seed: u64, trial_index: u64) -> Self {
        SampleSeed {
            master_seed,
            trial_index,
        }
    }

    /// Hash key for one profit coordinate.
    pub fn coordinate_key(&self, object_index: u64, dimension: u64) -> u64 {
        let h = splitmix64(self.master_seed);
        let h = splitmix64(h ^ self.trial_index);
        let h = splitmix64(h ^ object_index);
        splitmix64(h ^ dimension)
    }

    /// Uniform value in `[0, 1)` for one profit coordinate.
    pub fn unit(&self, object_index: u64, dimension: u64) -> f64 {
        (self.coordinate_key(object_index, dimension) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

fn splitmix64(z: u64) -> u64 {
    let z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    let z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Maps `u` in `[0, 1)` into the interval. Degenerate intervals return their
/// point; the result is always inside the exact rational bounds when any
/// float is.
pub fn uniform_in(interval: &Interval, u: f64) -> f64 {
    let lo = interval.lo.to_f64_up();
    let hi = interval.hi.to_f64_down();
    if lo > hi {
        // no float inside; the nearest one is the best available
        return interval.lo.to_f64();
    }
    (lo + u * (hi - lo)).clamp(lo, hi)
}

/// Realizes every object's profits from its box. Existing realizations are
/// overwritten.
pub fn sample_instance(instance: &KnapsackInstance, seed: SampleSeed) -> Result<KnapsackInstance> {
    let mut object_index = 0u64;
    let groups = instance
        .groups()
        .iter()
        .map(|g| {
            g.map_objects(|(_, obj)| {
                let idx = object_index;
                object_index += 1;
                let profits = obj
                    .profit_box()
                    .intervals()
                    .iter()
                    .enumerate()
                    .map(|(dim, iv)| uniform_in(iv, seed.unit(idx, dim as u64)))
                    .collect();
                obj.clone().with_profits(profits)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    instance.with_groups(groups)
}
