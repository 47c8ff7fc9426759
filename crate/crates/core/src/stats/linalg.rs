//! Householder QR least squares over column-major dense matrices.

use alloc::vec;
use alloc::vec::Vec;

/// Relative size below which a diagonal of R marks a dependent column.
const RANK_TOL: f64 = 1e-10;

/// Solves `min ‖A x − b‖²` for a tall `A` given as columns.
///
/// Returns `Err(j)` when column `j` is (numerically) a combination of the
/// columns before it.
pub(crate) fn least_squares(mut cols: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>, usize> {
    let ncols = cols.len();
    let m = b.len();
    debug_assert!(cols.iter().all(|c| c.len() == m));

    let norms: Vec<f64> = cols.iter().map(|c| norm(c)).collect();
    let mut diag = vec![0.0; ncols];

    for k in 0..ncols {
        if k >= m {
            return Err(k);
        }
        let alpha_norm = norm(&cols[k][k..]);
        if alpha_norm <= RANK_TOL * norms[k].max(f64::MIN_POSITIVE) || alpha_norm == 0.0 {
            return Err(k);
        }
        let alpha = if cols[k][k] > 0.0 { -alpha_norm } else { alpha_norm };
        // v overwrites the subdiagonal part of column k
        cols[k][k] -= alpha;
        let vtv: f64 = cols[k][k..].iter().map(|v| v * v).sum();
        diag[k] = alpha;
        if vtv == 0.0 {
            continue;
        }
        let (head, tail) = cols.split_at_mut(k + 1);
        let v = &head[k][k..];
        for col in tail.iter_mut() {
            reflect(v, vtv, &mut col[k..]);
        }
        reflect(v, vtv, &mut b[k..]);
    }

    let mut x = vec![0.0; ncols];
    for k in (0..ncols).rev() {
        let mut s = b[k];
        for j in k + 1..ncols {
            s -= cols[j][k] * x[j];
        }
        x[k] = s / diag[k];
    }
    Ok(x)
}

fn reflect(v: &[f64], vtv: f64, target: &mut [f64]) {
    let dot: f64 = v.iter().zip(target.iter()).map(|(a, b)| a * b).sum();
    let scale = 2.0 * dot / vtv;
    for (t, vi) in target.iter_mut().zip(v) {
        *t -= scale * vi;
    }
}

fn norm(v: &[f64]) -> f64 {
    // scaled to avoid overflow on large entries
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if max == 0.0 {
        return 0.0;
    }
    let ss: f64 = v.iter().map(|x| (x / max) * (x / max)).sum();
    max * libm::sqrt(ss)
}
