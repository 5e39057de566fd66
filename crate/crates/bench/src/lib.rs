//! Fixtures shared by the benchmarks.

use cbifree::{ChiMap, Face, Generator, OmegaMap, TwoStateDistribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Faces alternating left, right, left, ...
pub fn alternating(n: usize) -> ChiMap {
    ChiMap::new((0..n).map(|i| if i % 2 == 0 { Face::L } else { Face::R }).collect()).unwrap()
}

/// Colours cycling through `k` families.
pub fn cyclic_colours(n: usize, k: u32) -> OmegaMap {
    OmegaMap::new((0..n as u32).map(|i| i % k).collect())
}

/// One left and one right letter for each family in `families`, random moments.
pub fn random_distribution(families: std::ops::Range<u32>, degree: usize, seed: u64) -> TwoStateDistribution {
    let alphabet = families
        .flat_map(|f| [Generator::new(format!("x{f}"), f, Face::L), Generator::new(format!("y{f}"), f, Face::R)])
        .collect();
    TwoStateDistribution::random(alphabet, degree, &mut ChaCha8Rng::seed_from_u64(seed))
}
