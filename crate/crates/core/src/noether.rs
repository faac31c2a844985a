//! The fractional conserved quantity along a trajectory, in its two
//! equivalent forms, with constancy and classical-limit checks.

use crate::diff::derivative4;
use crate::error::{FracError, Result};
use crate::eulerlagrange::sample_trajectory;
use crate::fracops::{pair_left_values, pair_right_values, transfer_remainder_series};
use crate::types::{FractionalOrder, Lagrangian, NumericalFlags, SampledFunction, VectorField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConservationForm {
    /// `L tau + int_a^t (aD w F - w sD_B F) ds`, `w = xi - u' tau`, `F = dL/dv`.
    Cl,
    /// The same quantity after moving the right derivative onto `w`.
    Cl2,
}

/// Upper limit of the inner integral of [`ConservationForm::Cl2`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum InnerBound {
    /// Inner integral to the end of the grid, `b`.
    #[default]
    GridEnd,
    /// Inner integral to the same `B` as the outer kernel.
    Outer,
}

#[derive(Debug, Clone)]
pub struct ConservedQuantitySeries {
    pub form: ConservationForm,
    /// `C(t)` on nodes `a..=B`.
    pub values: SampledFunction,
    /// `max |C(t_k) - C(t_1)|` over interior nodes `1..B`.
    pub drift: f64,
    /// Mean of `C` over the same nodes.
    pub mean: f64,
    pub flags: NumericalFlags,
}

/// Result of [`constancy_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constancy {
    pub passed: bool,
    pub drift: f64,
    pub threshold: f64,
}

struct Ingredients {
    /// `L tau` along the trajectory.
    l_tau: Vec<f64>,
    /// `w = xi - u' tau`.
    w: Vec<f64>,
    /// `F = dL/dv` at `(t, u, aD u)`.
    f: Vec<f64>,
    flags: NumericalFlags,
}

fn ingredients(lagrangian: &Lagrangian, alpha: FractionalOrder, v: &VectorField, u: &SampledFunction) -> Result<Ingredients> {
    let grid = u.grid();
    let nodes = grid.nodes();
    let uv = u.values();
    let traj = sample_trajectory(lagrangian, alpha, u)?;
    let udot = derivative4(uv, grid.h())?;
    let l_tau = (0..nodes.len()).map(|k| lagrangian.value(nodes[k], uv[k], traj.v[k]) * v.tau(nodes[k], uv[k])).collect();
    let w = (0..nodes.len()).map(|k| v.xi(nodes[k], uv[k]) - udot[k] * v.tau(nodes[k], uv[k])).collect();
    Ok(Ingredients { l_tau, w, f: traj.d3, flags: traj.flags })
}

fn b_index(u: &SampledFunction, b_upper: f64) -> Result<usize> {
    let idx = u.grid().index_of(b_upper)?;
    if idx < 4 {
        return Err(FracError::InvalidSubInterval(format!("B must be at node >= 4, got node {idx}")));
    }
    Ok(idx)
}

/// `C(t)` for `t` in `[a, B]`; the inner integral of `Cl2` runs to `b`.
pub fn conserved_quantity(
    lagrangian: &Lagrangian,
    alpha: FractionalOrder,
    v: &VectorField,
    u: &SampledFunction,
    b_upper: f64,
    form: ConservationForm,
) -> Result<ConservedQuantitySeries> {
    conserved_quantity_with(lagrangian, alpha, v, u, b_upper, form, InnerBound::default())
}

/// [`conserved_quantity`] with an explicit choice of inner bound for `Cl2`.
pub fn conserved_quantity_with(
    lagrangian: &Lagrangian,
    alpha: FractionalOrder,
    v: &VectorField,
    u: &SampledFunction,
    b_upper: f64,
    form: ConservationForm,
    inner: InnerBound,
) -> Result<ConservedQuantitySeries> {
    let bi = b_index(u, b_upper)?;
    let grid = u.grid();
    let (nodes, h) = (grid.nodes(), grid.h());
    let ing = ingredients(lagrangian, alpha, v, u)?;
    let mut flags = ing.flags;
    // Both forms use F(B); only its finiteness matters for the kernel terms.
    if !ing.f[bi].is_finite() {
        flags.endpoint_divergence = true;
    }
    let a = alpha.value();
    let r = 0..=bi;
    let values: Vec<f64> = match form {
        ConservationForm::Cl => {
            let left = pair_left_values(a, &ing.f[r.clone()], &ing.w[r.clone()], &nodes[r.clone()], h);
            let right = pair_right_values(a, &ing.w[r.clone()], &ing.f[r.clone()], &nodes[r.clone()], h);
            (0..=bi).map(|k| ing.l_tau[k] + left[k] - right[k]).collect()
        }
        ConservationForm::Cl2 => {
            let upper = match inner {
                InnerBound::GridEnd => grid.n(),
                InnerBound::Outer => bi,
            };
            let rem = transfer_remainder_series(a, &ing.w, &ing.f, nodes, h, bi, upper)?;
            (0..=bi).map(|k| ing.l_tau[k] - rem[k]).collect()
        }
    };
    let values = SampledFunction::new(std::sync::Arc::new(grid.subgrid(0, bi)?), values)?;
    let (drift, mean) = drift_and_mean(values.values());
    Ok(ConservedQuantitySeries { form, values, drift, mean, flags })
}

/// Drift against node 1 and mean over nodes `1..len-1`.
pub(crate) fn drift_and_mean(c: &[f64]) -> (f64, f64) {
    let last = c.len() - 1;
    if last < 2 {
        return (0.0, c.get(1).copied().unwrap_or(0.0));
    }
    let interior = &c[1..last];
    let anchor = interior[0];
    let drift = interior.iter().map(|x| (x - anchor).abs()).fold(0.0, f64::max);
    let mean = interior.iter().sum::<f64>() / interior.len() as f64;
    (drift, mean)
}

/// `max_k |C_cl(t_k) - C_cl2(t_k)|` over `a..=B`.
pub fn form_equivalence_gap(lagrangian: &Lagrangian, alpha: FractionalOrder, v: &VectorField, u: &SampledFunction, b_upper: f64) -> Result<f64> {
    let c1 = conserved_quantity(lagrangian, alpha, v, u, b_upper, ConservationForm::Cl)?;
    let c2 = conserved_quantity(lagrangian, alpha, v, u, b_upper, ConservationForm::Cl2)?;
    Ok(c1.values.values().iter().zip(c2.values.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

/// Passes when `drift <= tol * max(1, |mean|)`.
pub fn constancy_check(series: &ConservedQuantitySeries, tol: f64) -> Constancy {
    let threshold = tol * series.mean.abs().max(1.0);
    Constancy { passed: series.drift <= threshold, drift: series.drift, threshold }
}

/// Classical Noether quantity `L tau + (xi - u' tau) dL/dv` with `v = u'`.
pub fn classical_conserved_quantity(lagrangian: &Lagrangian, v: &VectorField, u: &SampledFunction) -> Result<SampledFunction> {
    let grid = u.grid();
    let udot = derivative4(u.values(), grid.h())?;
    let nodes = grid.nodes();
    let uv = u.values();
    let values = (0..nodes.len())
        .map(|k| {
            let (t, x, d) = (nodes[k], uv[k], udot[k]);
            lagrangian.value(t, x, d) * v.tau(t, x) + (v.xi(t, x) - d * v.tau(t, x)) * lagrangian.d3(t, x, d)
        })
        .collect();
    SampledFunction::new(grid.clone(), values)
}

/// For each order, the max over interior nodes of the gap between the
/// fractional and classical quantities, both taken relative to node 1. The
/// fractional running integral tends to `w F |_a^t`, so the two differ by the
/// constant `w(a) F(a)` in the limit; anchoring removes it.
pub fn classical_limit_gap(lagrangian: &Lagrangian, v: &VectorField, u: &SampledFunction, alphas: &[FractionalOrder]) -> Result<Vec<f64>> {
    let classical = classical_conserved_quantity(lagrangian, v, u)?;
    let e = classical.values();
    let b = u.grid().b();
    alphas
        .iter()
        .map(|&alpha| {
            let c = conserved_quantity(lagrangian, alpha, v, u, b, ConservationForm::Cl)?;
            let c = c.values.values();
            let last = c.len() - 1;
            Ok((1..last).map(|k| ((c[k] - c[1]) - (e[k] - e[1])).abs()).fold(0.0, f64::max))
        })
        .collect()
}
