//! Graph random-walk similarity with popularity demotion.
//!
//! Users and items form a bipartite graph with an edge per interaction.
//! The raw weight between items `i` and `j` sums the two-hop walk
//! probabilities `item i -> user u -> item j`, with every transition
//! probability raised to `alpha` before the product. Dividing by
//! `pop(j)^beta` then demotes globally popular destinations:
//!
//! ```text
//! s(i, j) = (sum_u P_iu[i][u]^alpha * P_ui[u][j]^alpha) / pop(j)^beta
//! ```

use crate::data::InteractionMatrix;
use crate::error::Result;
use crate::models::item_knn::{assemble_from_columns, compute_pruned_columns};
use crate::models::{Rp3BetaParams, SimilarityModel};

pub fn fit_rp3beta(
    train: &InteractionMatrix,
    params: &Rp3BetaParams,
) -> Result<SimilarityModel> {
    crate::models::HyperParams::Rp3Beta(*params).validate()?;
    let n_items = train.n_items();
    let binary = train.csr().binarized();
    let by_item = binary.transpose();

    // The walk ignores rating values: an edge either exists or not.
    let item_degree: Vec<usize> = (0..n_items).map(|i| by_item.row_nnz(i)).collect();
    let user_degree: Vec<usize> =
        (0..train.n_users()).map(|u| binary.row_nnz(u)).collect();

    // Transition probabilities raised to alpha, one per node.
    let from_item: Vec<f64> = item_degree
        .iter()
        .map(|&d| if d == 0 { 0.0 } else { (1.0 / d as f64).powf(params.alpha) })
        .collect();
    let from_user: Vec<f64> = user_degree
        .iter()
        .map(|&d| if d == 0 { 0.0 } else { (1.0 / d as f64).powf(params.alpha) })
        .collect();

    let beta = params.beta;
    let columns = compute_pruned_columns(n_items, params.top_k, |j, acc| {
        // A zero-popularity destination has no incoming paths and a
        // zero demotion denominator; leave its column empty.
        let demotion = if item_degree[j] == 0 {
            0.0
        } else {
            1.0 / (item_degree[j] as f64).powf(beta)
        };
        if demotion > 0.0 {
            let (users, _) = by_item.row(j);
            for &u in users {
                let step_to_j = from_user[u as usize];
                let (items, _) = binary.row(u as usize);
                for &i in items {
                    acc[i as usize] += from_item[i as usize] * step_to_j;
                }
            }
        }
        move |_i, walk_weight| walk_weight * demotion
    });

    let sim = assemble_from_columns(n_items, columns)?;
    Ok(SimilarityModel::new(sim, params.top_k))
}
