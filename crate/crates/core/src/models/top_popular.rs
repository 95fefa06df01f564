//! Global popularity baseline.

use crate::data::InteractionMatrix;
use crate::error::{Error, Result};
use crate::models::ItemScoresModel;

/// Score every item by the number of users interacting with it in the
/// training matrix.
pub fn fit_top_popular(train: &InteractionMatrix) -> Result<ItemScoresModel> {
    if train.nnz() == 0 {
        return Err(Error::InvalidInput(
            "cannot fit top-popular on an empty training matrix".into(),
        ));
    }
    let scores = train.csr().col_counts().into_iter().map(|c| c as f64).collect();
    ItemScoresModel::new(scores)
}
