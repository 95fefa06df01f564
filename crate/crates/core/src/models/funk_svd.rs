//! SGD matrix factorization on explicit ratings.
//!
//! Ratings are approximated by `r_ui ~ <U_u, V_i>`; each observed
//! rating contributes the per-sample loss
//!
//! ```text
//! L = 0.5 * (r - <u, v>)^2 + 0.5 * reg * (|u|^2 + |v|^2)
//! ```
//!
//! and SGD steps both factor rows against the old values:
//! `u += lr * (e*v - reg*u)`, `v += lr * (e*u - reg*v)`. Sample order
//! reshuffles every epoch from the model seed, so a fit is a pure
//! function of (matrix, params).

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::InteractionMatrix;
use crate::error::{Error, Result};
use crate::models::{dot, FactorModel, FunkSvdParams};

/// Per-sample loss; the quantity whose gradient drives the updates.
pub fn sample_loss(u: &[f64], v: &[f64], rating: f64, reg: f64) -> f64 {
    let err = rating - dot(u, v);
    let penalty = dot(u, u) + dot(v, v);
    0.5 * err * err + 0.5 * reg * penalty
}

/// Analytic gradient of [`sample_loss`] with respect to both rows.
pub fn sample_gradient(
    u: &[f64],
    v: &[f64],
    rating: f64,
    reg: f64,
) -> (Vec<f64>, Vec<f64>) {
    let err = rating - dot(u, v);
    let grad_u = u.iter().zip(v).map(|(&uf, &vf)| -err * vf + reg * uf).collect();
    let grad_v = u.iter().zip(v).map(|(&uf, &vf)| -err * uf + reg * vf).collect();
    (grad_u, grad_v)
}

pub fn fit_funksvd(
    train: &InteractionMatrix,
    params: &FunkSvdParams,
) -> Result<FactorModel> {
    crate::models::HyperParams::FunkSvd(*params).validate()?;
    let f = params.factors;
    let n_users = train.n_users();
    let n_items = train.n_items();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    // Uniform [0, 1) scaled by 1/sqrt(f) keeps initial predictions O(1).
    let scale = 1.0 / (f as f64).sqrt();
    let mut user_factors = vec![0.0f64; n_users * f];
    for slot in &mut user_factors {
        *slot = rng.gen::<f64>() * scale;
    }
    let mut item_factors = vec![0.0f64; n_items * f];
    for slot in &mut item_factors {
        *slot = rng.gen::<f64>() * scale;
    }

    let samples: Vec<(u32, u32, f64)> = train
        .csr()
        .iter()
        .map(|(u, i, r)| (u as u32, i, r))
        .collect();
    let mut order: Vec<u32> = (0..samples.len() as u32).collect();

    let lr = params.learn_rate;
    let reg = params.reg;
    for epoch in 0..params.epochs {
        order.shuffle(&mut rng);
        for &s in &order {
            let (u, i, r) = samples[s as usize];
            let u_row = &mut user_factors[u as usize * f..(u as usize + 1) * f];
            let v_row = &mut item_factors[i as usize * f..(i as usize + 1) * f];
            let err = r - dot(u_row, v_row);
            for t in 0..f {
                let uf = u_row[t];
                let vf = v_row[t];
                u_row[t] = uf + lr * (err * vf - reg * uf);
                v_row[t] = vf + lr * (err * uf - reg * vf);
            }
        }
        if user_factors.iter().chain(&item_factors).any(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!(
                "funk-svd diverged at epoch {epoch} \
                 (learn_rate {lr} is too large for this data)"
            )));
        }
    }

    let user_factors = Array2::from_shape_vec((n_users, f), user_factors)
        .expect("construction matches shape");
    let item_factors = Array2::from_shape_vec((n_items, f), item_factors)
        .expect("construction matches shape");
    Ok(FactorModel::new(user_factors, item_factors))
}
