//! Trapezoid sums, product integration against `|c - s|^(-gamma)` kernels,
//! and graded Gauss-Legendre for endpoint singularities.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

/// Composite trapezoid rule on equispaced samples.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        len => {
            let inner: f64 = values[1..len - 1].iter().sum();
            h * (0.5 * (values[0] + values[len - 1]) + inner)
        }
    }
}

/// Running trapezoid integral, starting at 0 on the first node.
pub fn cumulative_trapezoid(values: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in values.windows(2) {
        acc += 0.5 * h * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// Exact weights `(w0, w1)` with
/// `int_{x0}^{x1} f(s) |c - s|^(-gamma) ds = w0 f(x0) + w1 f(x1)` for linear `f`.
///
/// `c` must lie outside the open cell; `gamma < 1`.
pub fn cell_weights(c: f64, x0: f64, x1: f64, gamma: f64) -> (f64, f64) {
    let h = x1 - x0;
    let p1 = 1.0 - gamma;
    let p2 = 2.0 - gamma;
    if c >= x1 {
        let (d0, d1) = (c - x0, c - x1);
        let i0 = (d0.powf(p1) - d1.powf(p1)) / p1;
        let i1 = (d0.powf(p2) - d1.powf(p2)) / p2;
        let w1 = (d0 * i0 - i1) / h;
        (i0 - w1, w1)
    } else {
        debug_assert!(c <= x0, "kernel center inside the cell");
        let (d0, d1) = (x0 - c, x1 - c);
        let i0 = (d1.powf(p1) - d0.powf(p1)) / p1;
        let i1 = (d1.powf(p2) - d0.powf(p2)) / p2;
        let w1 = (i1 - d0 * i0) / h;
        (i0 - w1, w1)
    }
}

/// Unit-spacing cell weights for the cell whose near node sits `m` steps from
/// the kernel center: returns `(far, near)`.
pub fn unit_cell_weights(m: usize, gamma: f64) -> (f64, f64) {
    let (w0, w1) = cell_weights(m as f64 + 1.0, 0.0, 1.0, gamma);
    (w0, w1)
}

/// Table of [`unit_cell_weights`] for `m = 0..len`.
pub fn unit_cell_table(len: usize, gamma: f64) -> Vec<(f64, f64)> {
    (0..len).map(|m| unit_cell_weights(m, gamma)).collect()
}

/// Product-integration weights of a piecewise-linear interpolant on `nodes`
/// against `|c - s|^(-gamma)`, with `c` outside the open interval.
pub fn product_weights(nodes: &[f64], c: f64, gamma: f64) -> Vec<f64> {
    let mut w = vec![0.0; nodes.len()];
    for j in 0..nodes.len().saturating_sub(1) {
        let (w0, w1) = cell_weights(c, nodes[j], nodes[j + 1], gamma);
        w[j] += w0;
        w[j + 1] += w1;
    }
    w
}

/// `int f(s) |c - s|^(-gamma) ds` over the node range, `f` linear per cell.
pub fn product_integral(values: &[f64], nodes: &[f64], c: f64, gamma: f64) -> f64 {
    debug_assert_eq!(values.len(), nodes.len());
    let mut acc = 0.0;
    for j in 0..nodes.len().saturating_sub(1) {
        let (w0, w1) = cell_weights(c, nodes[j], nodes[j + 1], gamma);
        acc += w0 * values[j] + w1 * values[j + 1];
    }
    acc
}

/// Running product integral from the first node, with a fixed kernel center.
pub fn cumulative_product_integral(values: &[f64], nodes: &[f64], c: f64, gamma: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for j in 0..nodes.len().saturating_sub(1) {
        let (w0, w1) = cell_weights(c, nodes[j], nodes[j + 1], gamma);
        acc += w0 * values[j] + w1 * values[j + 1];
        out.push(acc);
    }
    out
}

/// Exact integral over `[lo, hi]` of the piecewise-linear interpolant of
/// `(nodes, values)`; partial cells at both ends are handled.
pub fn piecewise_linear_integral(nodes: &[f64], values: &[f64], lo: f64, hi: f64) -> f64 {
    let mut acc = 0.0;
    for j in 0..nodes.len().saturating_sub(1) {
        let (x0, x1) = (nodes[j], nodes[j + 1]);
        let (l, r) = (lo.max(x0), hi.min(x1));
        if r <= l {
            continue;
        }
        let slope = (values[j + 1] - values[j]) / (x1 - x0);
        let fl = values[j] + slope * (l - x0);
        let fr = values[j] + slope * (r - x0);
        acc += 0.5 * (r - l) * (fl + fr);
    }
    acc
}

/// Gauss-Legendre on `panels` equal panels after the substitution
/// `t = a + (b - a) s^q`, which absorbs an algebraic singularity at `a`.
pub fn graded_gauss(f: impl Fn(f64) -> f64, a: f64, b: f64, q: u32, panels: usize, degree: usize) -> f64 {
    let rule = GaussLegendre::new(NonZeroUsize::new(degree).expect("degree must be positive"));
    let len = b - a;
    let qf = q as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let s0 = p as f64 / panels as f64;
        let s1 = (p + 1) as f64 / panels as f64;
        total += rule.integrate(s0, s1, |s| {
            let jac = len * qf * s.powi(q as i32 - 1);
            jac * f(a + len * s.powi(q as i32))
        });
    }
    total
}

/// Grading exponent that makes `(t - a)^(-alpha)` integrands smooth enough
/// for Gauss-Legendre after substitution.
pub fn grading_exponent(alpha: f64) -> u32 {
    (3.0 / (1.0 - alpha)).ceil() as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_exact_for_linear() {
        let v: Vec<f64> = (0..=10).map(|i| 2.0 * i as f64 * 0.1 + 1.0).collect();
        assert!((trapezoid(&v, 0.1) - 2.0).abs() < 1e-14);
        let c = cumulative_trapezoid(&v, 0.1);
        assert_eq!(c[0], 0.0);
        assert!((c[10] - 2.0).abs() < 1e-14);
        assert!((c[5] - 0.75).abs() < 1e-14);
    }

    #[test]
    fn cell_weights_integrate_constants_and_lines() {
        let gamma = 0.4;
        // Kernel center to the right.
        let (w0, w1) = cell_weights(1.0, 0.2, 0.5, gamma);
        let exact0 = (0.8f64.powf(0.6) - 0.5f64.powf(0.6)) / 0.6;
        assert!((w0 + w1 - exact0).abs() < 1e-14);
        // f(s) = s: int s (1 - s)^(-gamma) = int (1 - r) r^(-gamma) dr over r in [0.5, 0.8].
        let exact1 = exact0 - (0.8f64.powf(1.6) - 0.5f64.powf(1.6)) / 1.6;
        assert!((0.2 * w0 + 0.5 * w1 - exact1).abs() < 1e-14);
        // Kernel center to the left, touching the cell.
        let (v0, v1) = cell_weights(0.2, 0.2, 0.5, gamma);
        let exact = 0.3f64.powf(0.6) / 0.6;
        assert!((v0 + v1 - exact).abs() < 1e-14);
    }

    #[test]
    fn cell_weights_mirror() {
        let (a0, a1) = cell_weights(1.0, 0.25, 0.5, 0.3);
        let (b0, b1) = cell_weights(0.0, 0.5, 0.75, 0.3);
        assert!((a0 - b1).abs() < 1e-15 && (a1 - b0).abs() < 1e-15);
    }

    #[test]
    fn product_integral_of_smooth_function_converges() {
        // int_0^1 cos(s) (1 - s)^(-1/2) ds, reference from mpmath quad.
        let reference = 1.499_596_609_713_971_7;
        let err = |n: usize| {
            let nodes: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
            let vals: Vec<f64> = nodes.iter().map(|s| s.cos()).collect();
            (product_integral(&vals, &nodes, 1.0, 0.5) - reference).abs()
        };
        assert!(err(64) < 1e-4);
        assert!((err(64) / err(128)).log2() > 1.4);
    }

    #[test]
    fn piecewise_linear_integral_with_partial_cells() {
        let nodes = [0.0, 0.5, 1.0, 1.5];
        let values = [0.0, 0.5, 1.0, 1.5];
        // int_0.2^1.3 t dt
        let v = piecewise_linear_integral(&nodes, &values, 0.2, 1.3);
        assert!((v - 0.5 * (1.3 * 1.3 - 0.2 * 0.2)).abs() < 1e-15);
        assert!((piecewise_linear_integral(&nodes, &values, 0.0, 1.5) - trapezoid(&values, 0.5)).abs() < 1e-15);
    }

    #[test]
    fn graded_gauss_handles_endpoint_singularity() {
        // int_0^1 s^(-0.7) e^s ds = sum_k 1 / (k! (k + 0.3)), summed in mpmath.
        let reference = 4.381_973_658_929_764_6;
        let q = grading_exponent(0.7);
        let v = graded_gauss(|s| s.powf(-0.7) * s.exp(), 0.0, 1.0, q, 8, 20);
        assert!((v - reference).abs() < 1e-10, "{v}");
    }
}
