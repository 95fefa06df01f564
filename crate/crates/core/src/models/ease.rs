//! Closed-form ridge item-item model.
//!
//! On the binarized interaction matrix `X`, the model solves
//!
//! ```text
//! G = X'X + lambda * I
//! P = G^-1
//! B[i][j] = -P[i][j] / P[j][j]   (i != j),   B[j][j] = 0
//! ```
//!
//! which is the closed-form minimizer of the zero-diagonal ridge
//! reconstruction, equivalent to a shallow autoencoder over items. The
//! whole cost is one dense symmetric inverse.

use ndarray::{Array2, Axis};
use rayon::prelude::*;

use crate::data::InteractionMatrix;
use crate::dense::spd_inverse;
use crate::error::{Error, Result};
use crate::models::{DenseSimilarityModel, EaseParams};

pub fn fit_ease(
    train: &InteractionMatrix,
    params: &EaseParams,
) -> Result<DenseSimilarityModel> {
    crate::models::HyperParams::Ease(*params).validate()?;
    let n_items = train.n_items();
    if n_items > params.max_items {
        return Err(Error::InvalidInput(format!(
            "{n_items} items exceed the dense solve limit of {} \
             (raise max_items deliberately if the memory is there)",
            params.max_items
        )));
    }

    let x = train.csr().binarized();
    let by_item = x.transpose();

    // Gram matrix of binarized columns: co-occurrence counts.
    let mut gram = Array2::<f64>::zeros((n_items, n_items));
    gram.axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(i, mut row)| {
            let row = row.as_slice_mut().expect("row-major gram");
            let (users, _) = by_item.row(i);
            for &u in users {
                let (items, _) = x.row(u as usize);
                for &j in items {
                    row[j as usize] += 1.0;
                }
            }
        });
    for i in 0..n_items {
        gram[(i, i)] += params.l2;
    }

    let mut inverse = spd_inverse(gram)?;

    // Rescale each column by its own diagonal, then zero the diagonal.
    let diag: Vec<f64> = (0..n_items).map(|j| inverse[(j, j)]).collect();
    if diag.iter().any(|&d| d == 0.0 || !d.is_finite()) {
        return Err(Error::Numeric(
            "inverse Gram matrix has a zero or non-finite diagonal".into(),
        ));
    }
    inverse
        .axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(i, mut row)| {
            let row = row.as_slice_mut().expect("row-major inverse");
            for (j, v) in row.iter_mut().enumerate() {
                *v = if i == j { 0.0 } else { -*v / diag[j] };
            }
        });

    Ok(DenseSimilarityModel::new(inverse))
}
