//! Seeded random holdout split.
//!
//! The split is global over interactions: every record draws once from
//! a seeded uniform generator and lands in train, validation, or test
//! according to the cumulative ratios. It is not a per-user leave-out.

use std::io::Write;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{DataSplit, IdMaps, InteractionMatrix, InteractionSet};
use crate::error::{Error, Result};

/// Destination of one interaction under a split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Partition {
    Train,
    Validation,
    Test,
}

fn validate_ratios(ratios: (f64, f64, f64)) -> Result<()> {
    let (a, b, c) = ratios;
    if !(a >= 0.0 && b >= 0.0 && c >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "split ratios must be nonnegative, got ({a}, {b}, {c})"
        )));
    }
    if (a + b + c - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "split ratios must sum to 1, got ({a}, {b}, {c})"
        )));
    }
    Ok(())
}

/// Assign `n` records (in canonical order) to partitions with one
/// uniform draw each. Deterministic given the seed.
pub fn partition_assignments(
    n: usize,
    ratios: (f64, f64, f64),
    seed: u64,
) -> Result<Vec<Partition>> {
    validate_ratios(ratios)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let train_edge = ratios.0;
    let val_edge = ratios.0 + ratios.1;
    Ok((0..n)
        .map(|_| {
            let u: f64 = rng.gen();
            if u < train_edge {
                Partition::Train
            } else if u < val_edge {
                Partition::Validation
            } else {
                Partition::Test
            }
        })
        .collect())
}

/// Split an interaction set into conformable train/validation/test
/// matrices over the full set's dimensions and id maps.
pub fn holdout_split(
    interactions: &InteractionSet,
    ratios: (f64, f64, f64),
    seed: u64,
) -> Result<DataSplit> {
    validate_ratios(ratios)?;
    if interactions.len() < 10 {
        return Err(Error::InvalidInput(format!(
            "need at least 10 interactions to split, got {}",
            interactions.len()
        )));
    }
    let assignments = partition_assignments(interactions.len(), ratios, seed)?;
    let ids = IdMaps::from_set(interactions);
    let mut parts: [Vec<_>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for (rec, part) in interactions.records().iter().zip(&assignments) {
        let slot = match part {
            Partition::Train => 0,
            Partition::Validation => 1,
            Partition::Test => 2,
        };
        parts[slot].push(*rec);
    }
    let [train, validation, test] = parts;
    Ok(DataSplit {
        train: InteractionMatrix::from_records_with_ids(&train, Arc::clone(&ids))?,
        validation: InteractionMatrix::from_records_with_ids(&validation, Arc::clone(&ids))?,
        test: InteractionMatrix::from_records_with_ids(&test, ids)?,
        seed,
        ratios,
    })
}

/// Write the reproducibility manifest for a split: seed, ratios, and
/// per-partition interaction counts.
pub fn write_split_manifest<W: Write>(split: &DataSplit, mut w: W) -> Result<()> {
    writeln!(w, "seed = {}", split.seed)?;
    writeln!(
        w,
        "ratios = [{}, {}, {}]",
        split.ratios.0, split.ratios.1, split.ratios.2
    )?;
    writeln!(w, "n_users = {}", split.train.n_users())?;
    writeln!(w, "n_items = {}", split.train.n_items())?;
    writeln!(w, "train_interactions = {}", split.train.nnz())?;
    writeln!(w, "validation_interactions = {}", split.validation.nnz())?;
    writeln!(w, "test_interactions = {}", split.test.nnz())?;
    Ok(())
}
