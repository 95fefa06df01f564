//! Interaction data: ingestion, sparse matrices, and holdout splits.

mod parse;
mod split;

pub use parse::{parse_interactions, parse_item_features, FeatureStats, SourceFormat};
pub use split::{holdout_split, partition_assignments, write_split_manifest, Partition};

use std::collections::HashMap;
use std::io::Write;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Rating range accepted on ingestion. Implicit-feedback files use 1.
pub const RATING_MIN: f64 = 0.5;
pub const RATING_MAX: f64 = 5.0;

/// One (user, item, rating, timestamp) record with external ids.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interaction {
    pub user: u32,
    pub item: u32,
    pub rating: f64,
    pub timestamp: i64,
}

/// Deduplicated interaction records in canonical (user, item) order.
///
/// When the same (user, item) pair occurs more than once, the record
/// with the latest timestamp wins; on equal timestamps the later row in
/// the source wins.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionSet {
    records: Vec<Interaction>,
}

impl InteractionSet {
    /// Deduplicate and canonicalize a batch of records.
    pub fn from_records(records: Vec<Interaction>) -> Self {
        let mut latest: HashMap<(u32, u32), Interaction> = HashMap::new();
        for rec in records {
            latest
                .entry((rec.user, rec.item))
                .and_modify(|kept| {
                    if rec.timestamp >= kept.timestamp {
                        *kept = rec;
                    }
                })
                .or_insert(rec);
        }
        let mut records: Vec<Interaction> = latest.into_values().collect();
        records.sort_unstable_by_key(|r| (r.user, r.item));
        Self { records }
    }

    pub fn records(&self) -> &[Interaction] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Serialize as tab-separated rows, the same format
    /// [`parse_interactions`] accepts as [`SourceFormat::TabSeparated`].
    pub fn write_tsv<W: Write>(&self, mut w: W) -> Result<()> {
        for r in &self.records {
            writeln!(w, "{}\t{}\t{}\t{}", r.user, r.item, r.rating, r.timestamp)?;
        }
        Ok(())
    }
}

/// Bijection between external ids and dense indices.
#[derive(Debug, Clone, PartialEq)]
pub struct IdMap {
    to_index: HashMap<u32, usize>,
    to_external: Vec<u32>,
}

impl IdMap {
    /// Build from a sorted, deduplicated id list.
    fn from_sorted(ids: Vec<u32>) -> Self {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        let to_index = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        Self { to_index, to_external: ids }
    }

    pub fn len(&self) -> usize {
        self.to_external.len()
    }

    pub fn is_empty(&self) -> bool {
        self.to_external.is_empty()
    }

    pub fn index_of(&self, external: u32) -> Option<usize> {
        self.to_index.get(&external).copied()
    }

    pub fn external_of(&self, index: usize) -> u32 {
        self.to_external[index]
    }
}

/// The user and item id maps shared by every matrix of one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct IdMaps {
    pub users: IdMap,
    pub items: IdMap,
}

impl IdMaps {
    pub fn from_set(set: &InteractionSet) -> Arc<Self> {
        let mut users: Vec<u32> = set.records.iter().map(|r| r.user).collect();
        users.sort_unstable();
        users.dedup();
        let mut items: Vec<u32> = set.records.iter().map(|r| r.item).collect();
        items.sort_unstable();
        items.dedup();
        Arc::new(Self {
            users: IdMap::from_sorted(users),
            items: IdMap::from_sorted(items),
        })
    }
}

/// Sparse user-item rating matrix (the URM) plus its id maps.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionMatrix {
    csr: CsrMatrix,
    ids: Arc<IdMaps>,
}

impl InteractionMatrix {
    /// Build the full matrix of an interaction set.
    pub fn from_set(set: &InteractionSet) -> Result<Self> {
        let ids = IdMaps::from_set(set);
        Self::from_records_with_ids(set.records(), ids)
    }

    /// Build a matrix over a fixed id space; records must map into it.
    pub fn from_records_with_ids(records: &[Interaction], ids: Arc<IdMaps>) -> Result<Self> {
        let mut triplets = Vec::with_capacity(records.len());
        for r in records {
            let u = ids.users.index_of(r.user).ok_or_else(|| {
                Error::InvalidInput(format!("user id {} not in id map", r.user))
            })?;
            let i = ids.items.index_of(r.item).ok_or_else(|| {
                Error::InvalidInput(format!("item id {} not in id map", r.item))
            })?;
            triplets.push((u as u32, i as u32, r.rating));
        }
        let csr = CsrMatrix::from_triplets(ids.users.len(), ids.items.len(), triplets)?;
        Ok(Self { csr, ids })
    }

    pub fn n_users(&self) -> usize {
        self.csr.n_rows()
    }

    pub fn n_items(&self) -> usize {
        self.csr.n_cols()
    }

    pub fn nnz(&self) -> usize {
        self.csr.nnz()
    }

    /// Item indices and ratings of one user's profile.
    pub fn user_row(&self, user: usize) -> (&[u32], &[f64]) {
        self.csr.row(user)
    }

    pub fn ids(&self) -> &Arc<IdMaps> {
        &self.ids
    }

    pub fn csr(&self) -> &CsrMatrix {
        &self.csr
    }
}

/// Sparse item-feature matrix (the ICM), indexed like the URM's items.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemContentMatrix {
    csr: CsrMatrix,
    ids: Arc<IdMaps>,
    feature_names: Vec<String>,
}

impl ItemContentMatrix {
    pub(crate) fn new(
        csr: CsrMatrix,
        ids: Arc<IdMaps>,
        feature_names: Vec<String>,
    ) -> Self {
        debug_assert_eq!(csr.n_rows(), ids.items.len());
        debug_assert_eq!(csr.n_cols(), feature_names.len());
        Self { csr, ids, feature_names }
    }

    /// A featureless ICM; the hybrid KNN degrades to pure interactions.
    pub fn empty(ids: Arc<IdMaps>) -> Self {
        let csr = CsrMatrix::from_triplets(ids.items.len(), 0, Vec::new())
            .expect("empty matrix is always valid");
        Self { csr, ids, feature_names: Vec::new() }
    }

    pub fn n_items(&self) -> usize {
        self.csr.n_rows()
    }

    pub fn n_features(&self) -> usize {
        self.csr.n_cols()
    }

    /// Feature indices and weights of one item.
    pub fn item_row(&self, item: usize) -> (&[u32], &[f64]) {
        self.csr.row(item)
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn ids(&self) -> &Arc<IdMaps> {
        &self.ids
    }

    pub fn csr(&self) -> &CsrMatrix {
        &self.csr
    }
}

/// Train/validation/test partition of one interaction set.
///
/// The three matrices share dimensions and id maps, and their supports
/// are pairwise disjoint with union equal to the source set.
#[derive(Debug, Clone)]
pub struct DataSplit {
    pub train: InteractionMatrix,
    pub validation: InteractionMatrix,
    pub test: InteractionMatrix,
    pub seed: u64,
    pub ratios: (f64, f64, f64),
}
