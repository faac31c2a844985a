//! Left and right Riemann-Liouville integrals and derivatives, Caputo
//! derivatives, their dense matrices, and the pairing identities between them.
//!
//! Every operator is a product-trapezoid rule: the non-kernel factor is
//! linear on each cell and the kernel is integrated exactly. Derivatives use
//! the L1 weights, which already contain the outer `d/dt`. Right operators
//! are the reflection of left operators through the midpoint of the grid.

use std::ops::RangeInclusive;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::diff::derivative4;
use crate::error::{FracError, Result};
use crate::quadrature::{cell_weights, cumulative_product_integral, cumulative_trapezoid, product_integral, trapezoid, unit_cell_table};
use crate::special::{gamma_one_minus, gamma_unchecked};
use crate::types::{Evaluation, FractionalOrder, GridRef, SampledFunction};

/// Endpoint values larger than this multiple of the interior maximum count as divergent.
pub const DIVERGENCE_RATIO: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Integral,
    RlDerivative,
    Caputo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OperatorKind {
    pub side: Side,
    pub family: Family,
}

impl OperatorKind {
    pub const LEFT_INTEGRAL: Self = Self { side: Side::Left, family: Family::Integral };
    pub const RIGHT_INTEGRAL: Self = Self { side: Side::Right, family: Family::Integral };
    pub const LEFT_RL: Self = Self { side: Side::Left, family: Family::RlDerivative };
    pub const RIGHT_RL: Self = Self { side: Side::Right, family: Family::RlDerivative };
    pub const LEFT_CAPUTO: Self = Self { side: Side::Left, family: Family::Caputo };
    pub const RIGHT_CAPUTO: Self = Self { side: Side::Right, family: Family::Caputo };

    pub const ALL: [Self; 6] = [
        Self::LEFT_INTEGRAL,
        Self::RIGHT_INTEGRAL,
        Self::LEFT_RL,
        Self::RIGHT_RL,
        Self::LEFT_CAPUTO,
        Self::RIGHT_CAPUTO,
    ];

    /// Index of the node where the kernel starts.
    fn anchor(self, n: usize) -> usize {
        match self.side {
            Side::Left => 0,
            Side::Right => n,
        }
    }
}

/// Row weights of one operator on one grid size.
struct RowWeights {
    kind: OperatorKind,
    n: usize,
    scale: f64,
    alpha: f64,
    /// `m^(1 - alpha)` for derivatives.
    pow: Vec<f64>,
    /// Unit cell weights `(far, near)` for integrals.
    cells: Vec<(f64, f64)>,
}

impl RowWeights {
    fn new(kind: OperatorKind, alpha: f64, n: usize, h: f64) -> Self {
        match kind.family {
            Family::Integral => Self {
                kind,
                n,
                alpha,
                scale: h.powf(alpha) / gamma_unchecked(alpha),
                pow: Vec::new(),
                cells: unit_cell_table(n, 1.0 - alpha),
            },
            Family::RlDerivative | Family::Caputo => Self {
                kind,
                n,
                alpha,
                scale: h.powf(-alpha) / gamma_unchecked(2.0 - alpha),
                pow: (0..=n).map(|m| (m as f64).powf(1.0 - alpha)).collect(),
                cells: Vec::new(),
            },
        }
    }

    /// `b_m = (m + 1)^(1 - alpha) - m^(1 - alpha)`.
    #[inline]
    fn b(&self, m: usize) -> f64 {
        self.pow[m + 1] - self.pow[m]
    }

    /// Weights of the left operator at node `k >= 1` over columns `0..=k`.
    fn left_row(&self, k: usize, out: &mut [f64]) {
        let s = self.scale;
        match self.kind.family {
            Family::Integral => {
                out[..=k].fill(0.0);
                for j in 0..k {
                    let (far, near) = self.cells[k - 1 - j];
                    out[j] += s * far;
                    out[j + 1] += s * near;
                }
            }
            Family::RlDerivative | Family::Caputo => {
                out[0] = if self.kind.family == Family::Caputo {
                    -s * self.b(k - 1)
                } else {
                    let kf = k as f64;
                    s * ((1.0 - self.alpha) * self.pow[k] / kf - self.pow[k] + self.pow[k - 1])
                };
                for j in 1..k {
                    out[j] = s * (self.b(k - j) - self.b(k - j - 1));
                }
                out[k] = s;
            }
        }
    }

    /// Weights at node `k` for this operator's side; returns the support.
    /// The anchor node has empty support.
    fn row(&self, k: usize, out: &mut [f64], scratch: &mut [f64]) -> Option<RangeInclusive<usize>> {
        let n = self.n;
        match self.kind.side {
            Side::Left => {
                if k == 0 {
                    return None;
                }
                self.left_row(k, out);
                Some(0..=k)
            }
            Side::Right => {
                if k == n {
                    return None;
                }
                let kr = n - k;
                self.left_row(kr, scratch);
                for j in 0..=kr {
                    out[n - j] = scratch[j];
                }
                Some(k..=n)
            }
        }
    }
}

#[inline]
fn dot_on(weights: &[f64], values: &[f64], support: RangeInclusive<usize>) -> f64 {
    let mut acc = 0.0;
    for j in support {
        acc += weights[j] * values[j];
    }
    acc
}

/// One-sided limit at the anchor node: integrals and Caputo derivatives vanish,
/// an RL derivative vanishes only when the function does.
fn anchor_value(kind: OperatorKind, anchor_sample: f64) -> f64 {
    match kind.family {
        Family::Integral | Family::Caputo => 0.0,
        Family::RlDerivative => {
            if anchor_sample == 0.0 {
                0.0
            } else {
                anchor_sample.signum() * f64::INFINITY
            }
        }
    }
}

fn divergence(values: &[f64], anchor: usize) -> bool {
    let interior = values
        .iter()
        .enumerate()
        .filter(|&(j, v)| j != anchor && v.is_finite())
        .fold(0.0f64, |m, (_, v)| m.max(v.abs()));
    let at = values[anchor].abs();
    values.iter().any(|v| !v.is_finite()) || (at > 0.0 && at > DIVERGENCE_RATIO * interior)
}

fn check_order_grid(n: usize) -> Result<()> {
    if n < 4 {
        return Err(FracError::InvalidGrid(format!("operators need n >= 4, got {n}")));
    }
    Ok(())
}

/// Operator values on equispaced samples; the returned flag reports divergence.
pub(crate) fn apply_values(kind: OperatorKind, alpha: f64, values: &[f64], h: f64) -> (Vec<f64>, bool) {
    let n = values.len() - 1;
    let rows = RowWeights::new(kind, alpha, n, h);
    let anchor = kind.anchor(n);
    let out: Vec<f64> = (0..=n)
        .into_par_iter()
        .map_init(
            || (vec![0.0; n + 1], vec![0.0; n + 1]),
            |(w, scratch), k| match rows.row(k, w, scratch) {
                Some(support) => dot_on(w, values, support),
                None => anchor_value(kind, values[anchor]),
            },
        )
        .collect();
    let diverged = divergence(&out, anchor);
    (out, diverged)
}

/// Apply an operator of order `alpha` to `u` at every node.
///
/// At the anchor node (`a` for left operators, `b` for right ones) the value is
/// the one-sided limit; an RL derivative of a function that does not vanish
/// there is reported as an infinity and flagged.
pub fn apply_operator(kind: OperatorKind, alpha: FractionalOrder, u: &SampledFunction) -> Result<Evaluation> {
    let grid = u.grid();
    check_order_grid(grid.n())?;
    let (values, diverged) = apply_values(kind, alpha.value(), u.values(), grid.h());
    let mut eval = Evaluation::clean(SampledFunction::new(grid.clone(), values)?);
    if diverged {
        eval.flags.endpoint_divergence = true;
        eval.notes.push(format!("{kind:?} diverges at its singular endpoint"));
    }
    Ok(eval)
}

/// Dense discretization of an operator; row `k` holds the node-`k` weights.
/// The anchor row is zero: its value is the one-sided limit, not a linear form.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub kind: OperatorKind,
    pub alpha: FractionalOrder,
    pub grid: GridRef,
    pub entries: DMatrix<f64>,
}

impl OperatorMatrix {
    /// Same values as [`apply_operator`], bit for bit.
    pub fn apply(&self, u: &SampledFunction) -> Result<Evaluation> {
        if !self.grid.same_as(u.grid()) {
            return Err(FracError::GridMismatch);
        }
        let n = self.grid.n();
        let anchor = self.kind.anchor(n);
        let x = u.values();
        let values: Vec<f64> = (0..=n)
            .into_par_iter()
            .map(|k| {
                if k == anchor {
                    return anchor_value(self.kind, x[anchor]);
                }
                let support = match self.kind.side {
                    Side::Left => 0..=k,
                    Side::Right => k..=n,
                };
                let mut acc = 0.0;
                for j in support {
                    acc += self.entries[(k, j)] * x[j];
                }
                acc
            })
            .collect();
        let diverged = divergence(&values, anchor);
        let mut eval = Evaluation::clean(SampledFunction::new(u.grid().clone(), values)?);
        eval.flags.endpoint_divergence = diverged;
        Ok(eval)
    }
}

/// Dense matrix of an operator on `grid`.
pub fn build_operator_matrix(kind: OperatorKind, alpha: FractionalOrder, grid: &GridRef) -> Result<OperatorMatrix> {
    let n = grid.n();
    check_order_grid(n)?;
    let rows = RowWeights::new(kind, alpha.value(), n, grid.h());
    let row_data: Vec<Vec<f64>> = (0..=n)
        .into_par_iter()
        .map_init(
            || vec![0.0; n + 1],
            |scratch, k| {
                let mut w = vec![0.0; n + 1];
                if let Some(support) = rows.row(k, &mut w, scratch) {
                    // Entries outside the support are structurally zero.
                    for (j, wj) in w.iter_mut().enumerate() {
                        if !support.contains(&j) {
                            *wj = 0.0;
                        }
                    }
                } else {
                    w.fill(0.0);
                }
                w
            },
        )
        .collect();
    let entries = DMatrix::from_fn(n + 1, n + 1, |i, j| row_data[i][j]);
    Ok(OperatorMatrix { kind, alpha, grid: grid.clone(), entries })
}

/// `RL(u) - Caputo(u) - u(a) (t - a)^(-alpha) / Gamma(1 - alpha)` on the left side.
/// The node `t = a` carries 0.
pub fn rl_caputo_relation_residual(alpha: FractionalOrder, u: &SampledFunction) -> Result<Evaluation> {
    let rl = apply_operator(OperatorKind::LEFT_RL, alpha, u)?;
    let caputo = apply_operator(OperatorKind::LEFT_CAPUTO, alpha, u)?;
    let grid = u.grid();
    let a = alpha.value();
    let g = gamma_one_minus(a);
    let u0 = u.first();
    let values: Vec<f64> = (0..=grid.n())
        .map(|k| {
            if k == 0 {
                return 0.0;
            }
            let boundary = u0 * (grid.node(k) - grid.a()).powf(-a) / g;
            rl.values.values()[k] - caputo.values.values()[k] - boundary
        })
        .collect();
    let mut eval = Evaluation::clean(SampledFunction::new(grid.clone(), values)?);
    eval.flags = rl.flags.merge(caputo.flags);
    Ok(eval)
}

/// Running `int_a^{t_m} f(s) (aD_s^alpha g)(s) ds` for every node `m`.
///
/// The `g(a)` part of the RL derivative is integrated against `f` exactly
/// (product integration), the Caputo part by trapezoid.
pub fn pair_left(alpha: FractionalOrder, f: &SampledFunction, g: &SampledFunction) -> Result<Vec<f64>> {
    f.ensure_same_grid(g)?;
    let grid = f.grid();
    check_order_grid(grid.n())?;
    Ok(pair_left_values(alpha.value(), f.values(), g.values(), grid.nodes(), grid.h()))
}

pub(crate) fn pair_left_values(alpha: f64, f: &[f64], g: &[f64], nodes: &[f64], h: f64) -> Vec<f64> {
    let (caputo, _) = apply_values(OperatorKind::LEFT_CAPUTO, alpha, g, h);
    let product: Vec<f64> = f.iter().zip(&caputo).map(|(x, y)| x * y).collect();
    let regular = cumulative_trapezoid(&product, h);
    if g[0] == 0.0 {
        return regular;
    }
    let singular = cumulative_product_integral(f, nodes, nodes[0], alpha);
    let c = g[0] / gamma_one_minus(alpha);
    regular.iter().zip(&singular).map(|(r, s)| r + c * s).collect()
}

/// Running `int_a^{t_m} f(s) (sD_B^alpha g)(s) ds` for `m = 0..=b_index`, where
/// `B` is node `b_index`.
pub fn pair_right(alpha: FractionalOrder, f: &SampledFunction, g: &SampledFunction, b_index: usize) -> Result<Vec<f64>> {
    f.ensure_same_grid(g)?;
    let grid = f.grid();
    if b_index > grid.n() {
        return Err(FracError::IndexOutOfRange { index: b_index, n: grid.n() });
    }
    if b_index < 4 {
        return Err(FracError::InvalidSubInterval(format!("right pairing needs B at node >= 4, got {b_index}")));
    }
    let r = 0..=b_index;
    Ok(pair_right_values(alpha.value(), &f.values()[r.clone()], &g.values()[r.clone()], &grid.nodes()[r], grid.h()))
}

/// Right pairing on a grid whose last node is `B`.
pub(crate) fn pair_right_values(alpha: f64, f: &[f64], g: &[f64], nodes: &[f64], h: f64) -> Vec<f64> {
    let (caputo, _) = apply_values(OperatorKind::RIGHT_CAPUTO, alpha, g, h);
    let product: Vec<f64> = f.iter().zip(&caputo).map(|(x, y)| x * y).collect();
    let regular = cumulative_trapezoid(&product, h);
    let gb = g[g.len() - 1];
    if gb == 0.0 {
        return regular;
    }
    let singular = cumulative_product_integral(f, nodes, nodes[nodes.len() - 1], alpha);
    let c = gb / gamma_one_minus(alpha);
    regular.iter().zip(&singular).map(|(r, s)| r + c * s).collect()
}

/// `int_a^b f (aD_t^alpha g) dt - int_a^b g (tD_b^alpha f) dt`.
pub fn integration_by_parts_residual(alpha: FractionalOrder, f: &SampledFunction, g: &SampledFunction) -> Result<f64> {
    let n = f.grid().n();
    let left = pair_left(alpha, f, g)?;
    let right = pair_right(alpha, g, f, n)?;
    Ok(left[n] - right[n])
}

/// `J(s) = int_{t_m}^{t_upper} gdot(sigma) (sigma - s)^(-alpha) d sigma` for `s = t_0..=t_m`.
fn inner_kernel_column(alpha: f64, gdot: &[f64], nodes: &[f64], m: usize, upper: usize) -> Vec<f64> {
    if m >= upper {
        return vec![0.0; m + 1];
    }
    let seg = m..=upper;
    (0..=m)
        .map(|j| product_integral(&gdot[seg.clone()], &nodes[seg.clone()], nodes[j], alpha))
        .collect()
}

/// Remainder of the right-to-left transfer identity at node `m`:
/// `(1/Gamma(1-alpha)) int_a^t f(s) [g(b)(b-s)^-alpha - g(t)(t-s)^-alpha - J(s)] ds`.
fn transfer_remainder(alpha: f64, f: &[f64], g: &[f64], gdot: &[f64], nodes: &[f64], h: f64, m: usize, upper: usize) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let n = upper;
    let fr = &f[..=m];
    let xr = &nodes[..=m];
    let outer_b = g[n] * product_integral(fr, xr, nodes[n], alpha);
    let outer_t = g[m] * product_integral(fr, xr, nodes[m], alpha);
    let inner = inner_kernel_column(alpha, gdot, nodes, m, upper);
    let weighted: Vec<f64> = fr.iter().zip(&inner).map(|(x, y)| x * y).collect();
    (outer_b - outer_t - trapezoid(&weighted, h)) / gamma_one_minus(alpha)
}

/// LHS minus RHS of the right-to-left transfer identity at node `t_index`:
/// `int_a^t f (sD_b g) ds - int_a^t (aD_s f) g ds - remainder(t)`.
///
/// At `t_index = n` the remainder vanishes identically and the value equals
/// `-integration_by_parts_residual(alpha, g, f)`.
pub fn rrl_to_lrl_residual(alpha: FractionalOrder, f: &SampledFunction, g: &SampledFunction, t_index: usize) -> Result<f64> {
    f.ensure_same_grid(g)?;
    let grid = f.grid();
    let n = grid.n();
    check_order_grid(n)?;
    if t_index > n {
        return Err(FracError::IndexOutOfRange { index: t_index, n });
    }
    let a = alpha.value();
    let h = grid.h();
    let lhs = pair_right_values(a, f.values(), g.values(), grid.nodes(), h)[t_index];
    let rhs = pair_left_values(a, g.values(), f.values(), grid.nodes(), h)[t_index];
    let gdot = derivative4(g.values(), h)?;
    let rem = transfer_remainder(a, f.values(), g.values(), &gdot, grid.nodes(), h, t_index, n);
    Ok(lhs - rhs - rem)
}

/// The remainder term of the transfer identity at every node `m = 0..=outer`,
/// with outer kernel centered at node `outer` and the inner integral running to
/// node `inner`. Cost is quadratic in the number of nodes.
pub(crate) fn transfer_remainder_series(alpha: f64, f: &[f64], g: &[f64], nodes: &[f64], h: f64, outer: usize, inner: usize) -> Result<Vec<f64>> {
    let gdot = derivative4(g, h)?;
    let gam = gamma_one_minus(alpha);
    // Outer parts are running product integrals with fixed or moving center.
    let outer_b = cumulative_product_integral(&f[..=outer], &nodes[..=outer], nodes[outer], alpha);
    // J(s, t_m) for all s <= m, built backwards in m per s.
    let upper = inner;
    let columns: Vec<Vec<f64>> = (0..=outer)
        .into_par_iter()
        .map(|j| {
            // jrow[m] = int_{t_m}^{t_upper} gdot (sigma - s_j)^-alpha, for m in j..=outer.
            let mut jrow = vec![0.0; outer + 1];
            let mut acc = 0.0;
            let mut m = upper;
            while m > j {
                let (w0, w1) = cell_weights(nodes[j], nodes[m - 1], nodes[m], alpha);
                acc += w0 * gdot[m - 1] + w1 * gdot[m];
                m -= 1;
                if m <= outer {
                    jrow[m] = acc;
                }
            }
            jrow
        })
        .collect();
    let out: Vec<f64> = (0..=outer)
        .into_par_iter()
        .map(|m| {
            if m == 0 {
                return 0.0;
            }
            let fr = &f[..=m];
            let moving = product_integral(fr, &nodes[..=m], nodes[m], alpha);
            let mut inner_sum = 0.0;
            for j in 0..=m {
                let w = if j == 0 || j == m { 0.5 * h } else { h };
                inner_sum += w * f[j] * columns[j][m];
            }
            (g[outer] * outer_b[m] - g[m] * moving - inner_sum) / gam
        })
        .collect();
    Ok(out)
}
