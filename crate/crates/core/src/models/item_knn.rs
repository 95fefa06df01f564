//! Hybrid item-based KNN: cosine with shrinkage over stacked vectors.
//!
//! Each item is represented by its raw interaction column stacked with
//! its content-feature row scaled by `icm_weight`. The similarity of a
//! pair is the shrunk cosine
//!
//! ```text
//! s(i, j) = <v_i, v_j> / (|v_i| * |v_j| + shrink)
//! ```
//!
//! and only the `top_k` largest entries of each column survive.

use rayon::prelude::*;

use crate::data::{InteractionMatrix, ItemContentMatrix};
use crate::error::{Error, Result};
use crate::models::{ItemKnnParams, SimilarityModel};
use crate::sparse::CsrMatrix;

pub fn fit_itemknn_hybrid(
    train: &InteractionMatrix,
    icm: &ItemContentMatrix,
    params: &ItemKnnParams,
) -> Result<SimilarityModel> {
    crate::models::HyperParams::ItemKnn(*params).validate()?;
    if icm.n_items() != train.n_items() {
        return Err(Error::ShapeMismatch(format!(
            "content matrix covers {} items, training matrix {}",
            icm.n_items(),
            train.n_items()
        )));
    }
    let n_items = train.n_items();
    let w = params.icm_weight;
    let w2 = w * w;
    let train_by_item = train.csr().transpose();
    let icm_by_feature = icm.csr().transpose();

    // Squared norms of the stacked vectors.
    let mut norms = vec![0.0f64; n_items];
    for (i, norm) in norms.iter_mut().enumerate() {
        let (_, ratings) = train_by_item.row(i);
        let interaction_part: f64 = ratings.iter().map(|v| v * v).sum();
        let (_, features) = icm.item_row(i);
        let content_part: f64 = features.iter().map(|v| v * v).sum();
        *norm = (interaction_part + w2 * content_part).sqrt();
    }

    let norms = &norms;
    let columns = compute_pruned_columns(n_items, params.top_k, move |j, acc| {
        // Interaction part: walk the users of item j.
        let (users, j_ratings) = train_by_item.row(j);
        for (&u, &r_uj) in users.iter().zip(j_ratings) {
            let (items, ratings) = train.user_row(u as usize);
            for (&i, &r_ui) in items.iter().zip(ratings) {
                acc[i as usize] += r_ui * r_uj;
            }
        }
        // Content part: walk the features of item j.
        if w2 > 0.0 {
            let (features, j_weights) = icm.item_row(j);
            for (&f, &f_wj) in features.iter().zip(j_weights) {
                let (items, weights) = icm_by_feature.row(f as usize);
                for (&i, &f_wi) in items.iter().zip(weights) {
                    acc[i as usize] += w2 * f_wi * f_wj;
                }
            }
        }
        move |i, dot| {
            // An all-zero stacked vector has no similarity to anything;
            // the shrink term only guards the denominator when h > 0,
            // so guard zero norms explicitly.
            let denom = norms[i] * norms[j] + params.shrink;
            if denom > 0.0 {
                dot / denom
            } else {
                0.0
            }
        }
    });

    let sim = assemble_from_columns(n_items, columns)?;
    Ok(SimilarityModel::new(sim, params.top_k))
}

/// Run a per-column accumulation over all target columns in parallel
/// and keep the `top_k` largest positive entries of each column,
/// excluding the diagonal. `fill` populates the dense accumulator for
/// column `j` and returns the dot-to-similarity map.
pub(crate) fn compute_pruned_columns<F, G>(
    n_items: usize,
    top_k: usize,
    fill: F,
) -> Vec<Vec<(u32, f64)>>
where
    F: Fn(usize, &mut [f64]) -> G + Sync,
    G: Fn(usize, f64) -> f64,
{
    (0..n_items)
        .into_par_iter()
        .map_init(
            || vec![0.0f64; n_items],
            |acc, j| {
                acc.fill(0.0);
                let to_similarity = fill(j, acc);
                let mut entries: Vec<(u32, f64)> = Vec::new();
                for (i, &dot) in acc.iter().enumerate() {
                    if i != j && dot > 0.0 {
                        let s = to_similarity(i, dot);
                        if s > 0.0 {
                            entries.push((i as u32, s));
                        }
                    }
                }
                // Largest similarity first, ascending index on ties.
                let by_value = |a: &(u32, f64), b: &(u32, f64)| {
                    b.1.partial_cmp(&a.1).expect("finite similarity").then(a.0.cmp(&b.0))
                };
                if entries.len() > top_k {
                    entries.select_nth_unstable_by(top_k - 1, by_value);
                    entries.truncate(top_k);
                }
                entries.sort_unstable_by_key(|e| e.0);
                entries
            },
        )
        .collect()
}

/// Assemble per-column entry lists `(row, value)` into a CSR matrix.
pub(crate) fn assemble_from_columns(
    n_items: usize,
    columns: Vec<Vec<(u32, f64)>>,
) -> Result<CsrMatrix> {
    let mut triplets = Vec::with_capacity(columns.iter().map(Vec::len).sum());
    for (j, column) in columns.into_iter().enumerate() {
        for (i, s) in column {
            triplets.push((i, j as u32, s));
        }
    }
    CsrMatrix::from_triplets(n_items, n_items, triplets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::IdMaps;
    use crate::models::test_support::matrix;
    use approx::assert_abs_diff_eq;
    use std::sync::Arc;

    fn no_icm(train: &InteractionMatrix) -> ItemContentMatrix {
        ItemContentMatrix::empty(Arc::clone(train.ids()))
    }

    fn params(top_k: usize, shrink: f64, icm_weight: f64) -> ItemKnnParams {
        ItemKnnParams { top_k, shrink, icm_weight }
    }

    #[test]
    fn identical_columns_have_cosine_one() {
        // Items 10 and 11 are rated identically by the same users.
        let train = matrix(&[
            (1, 10, 2.0),
            (1, 11, 2.0),
            (2, 10, 3.0),
            (2, 11, 3.0),
        ]);
        let model =
            fit_itemknn_hybrid(&train, &no_icm(&train), &params(10, 0.0, 0.0)).unwrap();
        let s = model.similarities().get(0, 1).unwrap();
        assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn orthogonal_columns_have_no_entry() {
        let train = matrix(&[(1, 10, 5.0), (2, 11, 5.0)]);
        let model =
            fit_itemknn_hybrid(&train, &no_icm(&train), &params(10, 0.0, 0.0)).unwrap();
        assert_eq!(model.similarities().nnz(), 0);
    }

    #[test]
    fn shrinkage_arithmetic() {
        // v_i = v_j with |v|^2 = 4 and shrink 4: s = 4 / (4 + 4) = 0.5.
        let train = matrix(&[(1, 10, 2.0), (1, 11, 2.0)]);
        let model =
            fit_itemknn_hybrid(&train, &no_icm(&train), &params(10, 4.0, 0.0)).unwrap();
        let s = model.similarities().get(0, 1).unwrap();
        assert_abs_diff_eq!(s, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn diagonal_is_never_stored() {
        let train = matrix(&[(1, 10, 2.0), (1, 11, 3.0), (2, 10, 1.0)]);
        let model =
            fit_itemknn_hybrid(&train, &no_icm(&train), &params(10, 0.0, 0.0)).unwrap();
        for i in 0..train.n_items() {
            assert_eq!(model.similarities().get(i, i as u32), None);
        }
    }

    #[test]
    fn top_k_bounds_column_entries() {
        // Four items all co-rated; top_k = 2 keeps two entries per column.
        let train = matrix(&[
            (1, 10, 1.0),
            (1, 11, 1.0),
            (1, 12, 1.0),
            (1, 13, 1.0),
            (2, 10, 1.0),
            (2, 11, 1.0),
        ]);
        let model =
            fit_itemknn_hybrid(&train, &no_icm(&train), &params(2, 0.0, 0.0)).unwrap();
        let mut per_column = vec![0usize; train.n_items()];
        for (_, j, _) in model.similarities().iter() {
            per_column[j as usize] += 1;
        }
        assert!(per_column.iter().all(|&c| c <= 2));
    }

    #[test]
    fn content_features_bridge_disjoint_items() {
        // No user co-rates items 10 and 11, but they share a feature.
        let train = matrix(&[(1, 10, 5.0), (2, 11, 5.0)]);
        let ids = Arc::clone(train.ids());
        let i10 = ids.items.index_of(10).unwrap() as u32;
        let i11 = ids.items.index_of(11).unwrap() as u32;
        let csr = CsrMatrix::from_triplets(2, 1, vec![(i10, 0, 1.0), (i11, 0, 1.0)]).unwrap();
        let icm = test_icm(csr, ids);
        let model = fit_itemknn_hybrid(&train, &icm, &params(10, 0.0, 1.0)).unwrap();
        let s = model
            .similarities()
            .get(i10 as usize, i11)
            .expect("feature overlap must create similarity");
        // Stacked vectors: [5; 1] and [5; 1] on disjoint interaction
        // axes -> dot = 1, norms = sqrt(26).
        assert_abs_diff_eq!(s, 1.0 / 26.0, epsilon = 1e-12);
    }

    fn test_icm(csr: CsrMatrix, ids: Arc<IdMaps>) -> ItemContentMatrix {
        ItemContentMatrix::new(csr, ids, vec!["genre:test".into()])
    }

    #[test]
    fn zero_norm_item_has_all_zero_similarity_even_unshrunk() {
        // Item 12 is in the id space but nobody rated it; with shrink 0
        // the denominator for its pairs is 0 and must be guarded.
        let full = matrix(&[(1, 10, 1.0), (1, 11, 1.0), (2, 12, 1.0)]);
        let train = crate::data::InteractionMatrix::from_records_with_ids(
            &[
                crate::data::Interaction { user: 1, item: 10, rating: 1.0, timestamp: 0 },
                crate::data::Interaction { user: 1, item: 11, rating: 1.0, timestamp: 1 },
            ],
            Arc::clone(full.ids()),
        )
        .unwrap();
        let model =
            fit_itemknn_hybrid(&train, &no_icm(&train), &params(10, 0.0, 0.0)).unwrap();
        let idle = train.ids().items.index_of(12).unwrap();
        for j in 0..train.n_items() {
            assert_eq!(model.similarities().get(idle, j as u32), None);
            assert_eq!(model.similarities().get(j, idle as u32), None);
        }
    }
}
