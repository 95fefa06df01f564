//! Dense symmetric positive-definite solves.
//!
//! The closed-form ridge model needs the full inverse of the Gram matrix
//! `X'X + lambda*I`, which for a movie catalog is a dense matrix on the
//! order of 10k x 10k. The factorization below is a right-looking
//! blocked Cholesky whose trailing update runs as independent row-block
//! GEMMs, and the inverse is assembled column-by-column from forward and
//! backward substitutions against the factor. Columns are independent,
//! so both stages parallelize without changing any result bit.

use ndarray::{s, Array2, ArrayView2, ArrayViewMut2, Axis, Zip};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Panel width of the blocked factorization. Big enough to keep the
/// trailing GEMM efficient, small enough that the unblocked diagonal
/// factorization stays negligible.
const BLOCK: usize = 96;

/// In-place Cholesky factorization `A = L L'` of a symmetric
/// positive-definite matrix. Only the lower triangle is referenced; the
/// strictly upper triangle holds unspecified leftovers on return.
pub fn cholesky_in_place(a: &mut Array2<f64>) -> Result<()> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::ShapeMismatch(format!(
            "cholesky needs a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    let mut k = 0;
    while k < n {
        let kb = BLOCK.min(n - k);

        // Factor the diagonal block unblocked.
        {
            let mut diag = a.slice_mut(s![k..k + kb, k..k + kb]);
            cholesky_unblocked(&mut diag)?;
        }

        if k + kb < n {
            // Panel solve: A[k+kb.., k..k+kb] <- A[k+kb.., k..k+kb] * L_kk^-T.
            let (diag, mut rest) = a.multi_slice_mut((
                s![k..k + kb, k..k + kb],
                s![k + kb..n, k..k + kb],
            ));
            let diag = diag.view();
            rest.axis_chunks_iter_mut(Axis(0), 256)
                .into_par_iter()
                .for_each(|mut chunk| {
                    for mut row in chunk.rows_mut() {
                        for j in 0..kb {
                            let mut v = row[j];
                            for t in 0..j {
                                v -= row[t] * diag[(j, t)];
                            }
                            row[j] = v / diag[(j, j)];
                        }
                    }
                });

            // Trailing update: A[k+kb.., k+kb..] -= Panel * Panel'.
            // Row blocks are disjoint; each one is a rectangular GEMM
            // against the panel rows it needs.
            let (panel, mut trailing) = a.multi_slice_mut((
                s![k + kb..n, k..k + kb],
                s![k + kb..n, k + kb..n],
            ));
            let panel = panel.view();
            let blocks: Vec<(usize, ArrayViewMut2<f64>)> = {
                let mut out = Vec::new();
                let mut offset = 0;
                let mut rest = trailing.view_mut();
                while rest.nrows() > 0 {
                    let take = 256.min(rest.nrows());
                    let (head, tail) = rest.split_at(Axis(0), take);
                    out.push((offset, head));
                    offset += take;
                    rest = tail;
                }
                out
            };
            blocks.into_par_iter().for_each(|(offset, mut block)| {
                let rows = block.nrows();
                // Cells left of the diagonal are all this block needs.
                let cols = offset + rows;
                let a_rows = panel.slice(s![offset..offset + rows, ..]);
                let b_cols = panel.slice(s![..cols, ..]);
                let mut target = block.slice_mut(s![.., ..cols]);
                ndarray::linalg::general_mat_mul(
                    -1.0,
                    &a_rows,
                    &b_cols.t(),
                    1.0,
                    &mut target,
                );
            });
        }
        k += kb;
    }
    Ok(())
}

fn cholesky_unblocked(a: &mut ArrayViewMut2<f64>) -> Result<()> {
    let n = a.nrows();
    for j in 0..n {
        let mut d = a[(j, j)];
        for t in 0..j {
            d -= a[(j, t)] * a[(j, t)];
        }
        // d <= 0, NaN, and infinity all disqualify the pivot.
        if d <= 0.0 || !d.is_finite() {
            return Err(Error::Numeric(format!(
                "matrix is not positive definite (pivot {d} at index {j})"
            )));
        }
        let d = d.sqrt();
        a[(j, j)] = d;
        for i in j + 1..n {
            let mut v = a[(i, j)];
            for t in 0..j {
                v -= a[(i, t)] * a[(j, t)];
            }
            a[(i, j)] = v / d;
        }
    }
    Ok(())
}

/// Inverse of a symmetric positive-definite matrix via its Cholesky
/// factor: `A^-1 = L^-T L^-1`. The triangular inverse `W = L^-1` is
/// built row-by-row of its transpose (so every substitution is a
/// contiguous dot product), and the final product runs as one GEMM.
pub fn spd_inverse(mut a: Array2<f64>) -> Result<Array2<f64>> {
    cholesky_in_place(&mut a)?;
    let n = a.nrows();
    let l = a.view();

    // wt[j][i] = W[i][j]; row j solves L w = e_j by forward
    // substitution, which only touches w entries from index j on.
    let mut wt = Array2::<f64>::zeros((n, n));
    wt.axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(j, mut row)| {
            let row = row.as_slice_mut().expect("row-major output");
            row[j] = 1.0 / l[(j, j)];
            for i in j + 1..n {
                let l_row = l.row(i);
                let l_row = l_row.to_slice().expect("row-major factor");
                let sum = dot_slices(&l_row[j..i], &row[j..i]);
                row[i] = -sum / l[(i, i)];
            }
        });
    drop(a);

    // A^-1 = W'W = wt * wt'.
    let mut inv = Array2::<f64>::zeros((n, n));
    ndarray::linalg::general_mat_mul(1.0, &wt, &wt.t(), 0.0, &mut inv);
    Ok(inv)
}

#[inline]
fn dot_slices(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Max absolute entry of `A * B - I`; a residual check used by tests.
pub fn identity_residual(a: ArrayView2<f64>, b: ArrayView2<f64>) -> f64 {
    let mut prod = a.dot(&b);
    let n = prod.nrows();
    for i in 0..n {
        prod[(i, i)] -= 1.0;
    }
    let mut worst = 0.0f64;
    Zip::from(&prod).for_each(|v| worst = worst.max(v.abs()));
    worst
}
