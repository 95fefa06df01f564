//! Nonnegative matrix factorization by multiplicative updates.
//!
//! Minimizes the Frobenius reconstruction error `|X - U V'|_F^2` with
//! `U, V >= 0`, treating unobserved entries as zeros. The Lee-Seung
//! updates
//!
//! ```text
//! U <- U * (X V)  / (U V'V + eps)
//! V <- V * (X'U)  / (V U'U + eps)
//! ```
//!
//! never increase the objective and keep both factors nonnegative; the
//! epsilon only guards empty rows and columns against 0/0.

use ndarray::{Array2, Axis, Zip};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::data::InteractionMatrix;
use crate::error::{Error, Result};
use crate::models::{dot, FactorModel, NmfParams};
use crate::sparse::CsrMatrix;

/// Denominator guard of the multiplicative updates.
pub const NMF_EPS: f64 = 1e-12;

// Multiplicative decay drives unused factor entries toward the
// subnormal range, where x86 arithmetic stalls badly; zero is the
// absorbing state of the update anyway, so flush far below any
// meaningful magnitude.
const FLUSH_TO_ZERO: f64 = 1e-100;

/// Sparse-times-dense product `X * M` with dense output rows.
fn sparse_dense(x: &CsrMatrix, m: &Array2<f64>) -> Array2<f64> {
    let f = m.ncols();
    let mut out = Array2::<f64>::zeros((x.n_rows(), f));
    out.axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(r, mut row)| {
            let row = row.as_slice_mut().expect("row-major output");
            let (cols, vals) = x.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                let m_row = m.row(c as usize);
                let m_row = m_row.as_slice().expect("row-major factors");
                for (slot, &mv) in row.iter_mut().zip(m_row) {
                    *slot += v * mv;
                }
            }
        });
    out
}

/// `|X - U V'|_F^2` without materializing the dense reconstruction:
/// `|X|^2 - 2 <X, UV'> + <U'U, V'V>`.
fn objective(x: &CsrMatrix, x_sq: f64, u: &Array2<f64>, v: &Array2<f64>) -> f64 {
    let mut cross = 0.0;
    for (r, c, value) in x.iter() {
        let u_row = u.row(r);
        let v_row = v.row(c as usize);
        cross += value
            * dot(
                u_row.as_slice().expect("row-major"),
                v_row.as_slice().expect("row-major"),
            );
    }
    let utu = u.t().dot(u);
    let vtv = v.t().dot(v);
    let gram = (&utu * &vtv).sum();
    x_sq - 2.0 * cross + gram
}

pub fn fit_nmf(train: &InteractionMatrix, params: &NmfParams) -> Result<FactorModel> {
    fit_nmf_impl(train, params, false).map(|(model, _)| model)
}

/// Fit and also return the objective value before training and after
/// every iteration (`iterations + 1` entries).
pub fn fit_nmf_with_trace(
    train: &InteractionMatrix,
    params: &NmfParams,
) -> Result<(FactorModel, Vec<f64>)> {
    fit_nmf_impl(train, params, true)
}

fn fit_nmf_impl(
    train: &InteractionMatrix,
    params: &NmfParams,
    track_objective: bool,
) -> Result<(FactorModel, Vec<f64>)> {
    crate::models::HyperParams::Nmf(*params).validate()?;
    let x = train.csr();
    if x.iter().any(|(_, _, v)| v < 0.0) {
        return Err(Error::InvalidInput(
            "nmf requires nonnegative training entries".into(),
        ));
    }
    let f = params.factors;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut u = Array2::<f64>::from_shape_fn((train.n_users(), f), |_| rng.gen::<f64>());
    let mut v = Array2::<f64>::from_shape_fn((train.n_items(), f), |_| rng.gen::<f64>());
    let xt = x.transpose();
    let x_sq: f64 = x.iter().map(|(_, _, val)| val * val).sum();

    let mut trace = Vec::new();
    if track_objective {
        trace.reserve(params.iterations + 1);
        trace.push(objective(x, x_sq, &u, &v));
    }
    for iteration in 0..params.iterations {
        let xv = sparse_dense(x, &v);
        let vtv = v.t().dot(&v);
        let uvtv = u.dot(&vtv);
        Zip::from(&mut u).and(&xv).and(&uvtv).for_each(|uf, &num, &den| {
            *uf *= num / (den + NMF_EPS);
            if *uf < FLUSH_TO_ZERO {
                *uf = 0.0;
            }
        });

        let xtu = sparse_dense(&xt, &u);
        let utu = u.t().dot(&u);
        let vutu = v.dot(&utu);
        Zip::from(&mut v).and(&xtu).and(&vutu).for_each(|vf, &num, &den| {
            *vf *= num / (den + NMF_EPS);
            if *vf < FLUSH_TO_ZERO {
                *vf = 0.0;
            }
        });

        if u.iter().chain(v.iter()).any(|x| !x.is_finite()) {
            return Err(Error::Numeric(format!(
                "nmf produced non-finite factors at iteration {iteration}"
            )));
        }
        if track_objective {
            trace.push(objective(x, x_sq, &u, &v));
        }
    }
    Ok((FactorModel::new(u, v), trace))
}
