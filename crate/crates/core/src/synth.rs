//! Deterministic synthetic interaction data.
//!
//! Tests, demos, and desk-scale benchmark runs need MovieLens-shaped
//! data with enough latent structure that personalized models beat raw
//! popularity. Users and items are assigned to taste groups; most
//! interactions stay inside the user's group (with a popularity skew
//! inside each group), the rest wander anywhere. Ratings run higher
//! inside the group.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{Interaction, InteractionSet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub n_users: u32,
    pub n_items: u32,
    pub n_interactions: usize,
    pub n_groups: u32,
    /// Probability that an interaction ignores the group structure.
    pub noise: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_users: 200,
            n_items: 400,
            n_interactions: 8_000,
            n_groups: 8,
            noise: 0.1,
            seed: 42,
        }
    }
}

impl SynthConfig {
    /// The shape of the MovieLens 100k release.
    pub fn ml100k_scale(seed: u64) -> Self {
        Self {
            n_users: 943,
            n_items: 1682,
            n_interactions: 100_000,
            n_groups: 12,
            noise: 0.12,
            seed,
        }
    }
}

/// Generate a deduplicated interaction set. Deterministic given the
/// config.
pub fn generate_interactions(cfg: &SynthConfig) -> InteractionSet {
    assert!(cfg.n_users > 0 && cfg.n_items > 0 && cfg.n_groups > 0);
    assert!(
        (cfg.n_interactions as f64) < 0.8 * cfg.n_users as f64 * cfg.n_items as f64,
        "interaction count too close to a dense matrix"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let groups = cfg.n_groups;

    // Popularity skew inside a group: weight 1/(rank + 1)^0.8 over the
    // group's items, sampled through the cumulative distribution.
    let group_size = cfg.n_items.div_ceil(groups);
    let mut cumulative = Vec::with_capacity(group_size as usize);
    let mut total = 0.0f64;
    for rank in 0..group_size {
        total += 1.0 / ((rank + 1) as f64).powf(0.8);
        cumulative.push(total);
    }

    let mut seen = std::collections::HashSet::with_capacity(cfg.n_interactions * 2);
    let mut records = Vec::with_capacity(cfg.n_interactions);
    let mut timestamp = 1_000_000_000i64;
    while records.len() < cfg.n_interactions {
        let user = rng.gen_range(0..cfg.n_users);
        let in_group = rng.gen::<f64>() >= cfg.noise;
        let item = if in_group {
            let group = user % groups;
            let u = rng.gen::<f64>() * total;
            let rank = cumulative.partition_point(|&c| c < u) as u32;
            // Group members are strided across the catalog.
            let item = group + groups * rank.min(group_size - 1);
            item.min(cfg.n_items - 1)
        } else {
            rng.gen_range(0..cfg.n_items)
        };
        if !seen.insert((user, item)) {
            continue;
        }
        let same_group = item % groups == user % groups;
        let rating = if same_group {
            3.0 + rng.gen_range(0..=4) as f64 * 0.5
        } else {
            0.5 + rng.gen_range(0..=4) as f64 * 0.5
        };
        records.push(Interaction { user: user + 1, item: item + 1, rating, timestamp });
        timestamp += 7;
    }
    InteractionSet::from_records(records)
}
