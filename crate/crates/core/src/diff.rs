//! Finite-difference derivatives: fourth-order sampled differences and
//! Fornberg stencils for pointwise derivatives of closures.

use crate::error::{FracError, Result};

/// First derivative of equispaced samples, fourth order everywhere.
///
/// Central five-point stencil in the interior, one-sided five-point stencils
/// at the two nodes nearest each end.
pub fn derivative4(values: &[f64], h: f64) -> Result<Vec<f64>> {
    let len = values.len();
    if len < 5 {
        return Err(FracError::InvalidGrid(format!("fourth-order differences need 5 nodes, got {len}")));
    }
    let f = values;
    let inv = 1.0 / (12.0 * h);
    let mut d = vec![0.0; len];
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * inv;
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * inv;
    for i in 2..len - 2 {
        d[i] = (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) * inv;
    }
    let m = len - 1;
    d[m - 1] = (3.0 * f[m] + 10.0 * f[m - 1] - 18.0 * f[m - 2] + 6.0 * f[m - 3] - f[m - 4]) * inv;
    d[m] = (25.0 * f[m] - 48.0 * f[m - 1] + 36.0 * f[m - 2] - 16.0 * f[m - 3] + 3.0 * f[m - 4]) * inv;
    Ok(d)
}

/// Second-order central differences with second-order one-sided ends.
pub fn derivative2(values: &[f64], h: f64) -> Vec<f64> {
    let len = values.len();
    assert!(len >= 3, "second-order differences need 3 nodes");
    let f = values;
    let mut d = vec![0.0; len];
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for i in 1..len - 1 {
        d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    }
    let m = len - 1;
    d[m] = (3.0 * f[m] - 4.0 * f[m - 1] + f[m - 2]) / (2.0 * h);
    d
}

/// Fornberg's recursion: weights `w[k][j]` so that `sum_j w[k][j] f(x[j])`
/// approximates the `k`-th derivative at `z`, for `k = 0..=order`.
pub fn fornberg_weights(z: f64, x: &[f64], order: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// `k`-th derivative of `f` at `t` from an equispaced stencil of `k + extra`
/// points with spacing `step`, centered where possible but never reaching
/// below `lower`.
pub fn pointwise_derivative(f: impl Fn(f64) -> f64, t: f64, k: usize, step: f64, extra: usize, lower: f64) -> f64 {
    if k == 0 {
        return f(t);
    }
    let points = k + extra;
    let half = (points - 1) as f64 / 2.0;
    // Shift the stencil right until its left end clears the lower bound.
    let below = ((lower - (t - half * step)) / step).max(0.0).ceil();
    let start = t - (half - below) * step;
    let x: Vec<f64> = (0..points).map(|j| start + j as f64 * step).collect();
    let w = fornberg_weights(t, &x, k);
    x.iter().zip(&w[k]).map(|(&xj, &wj)| wj * f(xj)).sum()
}
