//! Point-transformation groups acting on trajectories, first variations of the
//! fractional derivative, the finite action defect and the infinitesimal
//! invariance criterion.
//!
//! Two lower-bound conventions are supported. Under [`BoundPolicy::FixedA`]
//! the transformed derivative is still taken from `a`; under
//! [`BoundPolicy::TransformedA`] it is taken from the image of `a`.

use rayon::prelude::*;

use crate::diff::derivative4;
use crate::error::{FracError, Result};
use crate::fracops::{apply_operator, apply_values, OperatorKind};
use crate::interp::MonotoneCubic;
use crate::quadrature::{graded_gauss, grading_exponent, piecewise_linear_integral, trapezoid};
use crate::special::gamma_one_minus;
use crate::types::{
    make_uniform_grid, AnalyticFunction, Evaluation, FractionalOrder, GroupElement, Lagrangian, NumericalFlags,
    OneParameterGroup, SampledFunction, SubInterval, VectorField,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundPolicy {
    /// The group does not move the lower bound of the derivative.
    FixedA,
    /// The lower bound moves with the group, `a -> Xi_eta(a, u(a))`.
    TransformedA,
}

/// First variations of `u` and of its left RL derivative along a generator.
#[derive(Debug, Clone)]
pub struct VariationReport {
    /// `xi - tau u'`.
    pub delta_u: SampledFunction,
    /// Total variation of the left RL derivative, including `extra_term`.
    pub delta_frac: SampledFunction,
    /// Contribution of a moving lower bound with `u(a) != 0`; zero under fixed `a`.
    pub extra_term: SampledFunction,
    pub flags: NumericalFlags,
    pub notes: Vec<String>,
}

fn vanishes(x: f64, scale: f64) -> bool {
    x.abs() <= 1e-12 * scale.max(1.0)
}

/// Apply `g` to the graph of `u` and resample on a uniform grid with the same
/// number of cells over `[Xi(a, u(a)), Xi(b, u(b))]`.
pub fn apply_group(g: &GroupElement, u: &SampledFunction) -> Result<SampledFunction> {
    let (x, y) = transformed_graph(g, u);
    let spline = MonotoneCubic::new(x, y)?;
    let grid = make_uniform_grid(spline.lower(), spline.upper(), u.grid().n())?;
    Ok(SampledFunction::from_fn(grid, |t| spline.eval(t)))
}

fn transformed_graph(g: &GroupElement, u: &SampledFunction) -> (Vec<f64>, Vec<f64>) {
    let nodes = u.grid().nodes();
    let uv = u.values();
    nodes.iter().zip(uv).map(|(&t, &x)| (g.time(t, x), g.state(t, x))).unzip()
}

/// Left RL derivative of `u` and its time derivative. A divergent anchor value
/// is replaced by linear extrapolation before differencing; the flag reports it.
fn derivative_of_left_rl(alpha: f64, u: &SampledFunction) -> Result<(Vec<f64>, Vec<f64>, bool)> {
    let h = u.grid().h();
    let (dl, diverged) = apply_values(OperatorKind::LEFT_RL, alpha, u.values(), h);
    let mut patched = dl.clone();
    let singular = !patched[0].is_finite();
    if singular {
        patched[0] = 2.0 * patched[1] - patched[2];
    }
    let d = derivative4(&patched, h)?;
    Ok((dl, d, diverged || singular))
}

/// `delta u`, the variation of the left RL derivative and the moving-bound term.
pub fn variation_report(v: &VectorField, alpha: FractionalOrder, u: &SampledFunction, policy: BoundPolicy) -> Result<VariationReport> {
    let grid = u.grid();
    let nodes = grid.nodes();
    let uv = u.values();
    let a = alpha.value();
    let udot = derivative4(uv, grid.h())?;
    let mut delta: Vec<f64> = (0..nodes.len()).map(|k| v.xi(nodes[k], uv[k]) - v.tau(nodes[k], uv[k]) * udot[k]).collect();
    // A one-sided slope leaves difference noise in delta(a) where the exact
    // value is 0; that noise alone would make the anchor value infinite.
    let delta_scale = delta.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    if delta[0].abs() <= f64::EPSILON.sqrt() * delta_scale {
        delta[0] = 0.0;
    }
    let delta_u = SampledFunction::new(grid.clone(), delta)?;
    let d_delta = apply_operator(OperatorKind::LEFT_RL, alpha, &delta_u)?;
    let (_, ddl, dl_singular) = derivative_of_left_rl(a, u)?;

    let mut flags = d_delta.flags;
    let mut notes = d_delta.notes;
    if dl_singular {
        flags.endpoint_divergence = true;
        notes.push("left RL derivative of u diverges at a; its time derivative is unreliable near a".into());
    }

    let weight = match policy {
        BoundPolicy::FixedA => 0.0,
        BoundPolicy::TransformedA => a / gamma_one_minus(a) * uv[0] * v.tau(nodes[0], uv[0]),
    };
    let extra: Vec<f64> = nodes
        .iter()
        .enumerate()
        .map(|(k, &t)| match (k, weight == 0.0) {
            (_, true) => 0.0,
            (0, false) => f64::INFINITY.copysign(weight),
            _ => weight * (t - nodes[0]).powf(-a - 1.0),
        })
        .collect();
    if weight != 0.0 {
        flags.endpoint_divergence = true;
        notes.push("moving lower bound with u(a) != 0: extra term is singular like (t - a)^(-alpha - 1)".into());
    }

    let frac: Vec<f64> = (0..nodes.len())
        .map(|k| d_delta.values.values()[k] + ddl[k] * v.tau(nodes[k], uv[k]) + extra[k])
        .collect();
    Ok(VariationReport {
        delta_u,
        delta_frac: SampledFunction::new(grid.clone(), frac)?,
        extra_term: SampledFunction::new(grid.clone(), extra)?,
        flags,
        notes,
    })
}

/// Pointwise residual of the infinitesimal invariance criterion
/// `tau L_t + xi L_u + (aD(xi - u' tau) + (d/dt aD u) tau) L_v + L tau'`,
/// with `L` and its partials taken at `(t, u, aD u)`.
///
/// Reported at nodes `1..=n`; node `a` is set to 0. The hypothesis of the
/// chosen policy (`u(a) = 0` for a moving bound, `tau(a, u(a)) = 0` for a fixed
/// one) is checked and a violation is flagged, not fixed up.
pub fn infinitesimal_criterion_residual(
    lagrangian: &Lagrangian,
    alpha: FractionalOrder,
    v: &VectorField,
    u: &SampledFunction,
    policy: BoundPolicy,
) -> Result<Evaluation> {
    let grid = u.grid();
    let nodes = grid.nodes();
    let uv = u.values();
    let a = alpha.value();
    let scale = uv.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut flags = NumericalFlags { fd_partials: lagrangian.uses_fd_partials(), ..Default::default() };
    let mut notes = Vec::new();
    match policy {
        BoundPolicy::TransformedA if !vanishes(uv[0], scale) => {
            flags.precondition_violated = true;
            notes.push(format!("moving lower bound requires u(a) = 0, got {}", uv[0]));
        }
        BoundPolicy::FixedA if !vanishes(v.tau(nodes[0], uv[0]), 1.0) => {
            flags.precondition_violated = true;
            notes.push(format!("fixed lower bound requires tau(a, u(a)) = 0, got {}", v.tau(nodes[0], uv[0])));
        }
        _ => {}
    }

    let udot = derivative4(uv, grid.h())?;
    let mut delta: Vec<f64> = (0..nodes.len()).map(|k| v.xi(nodes[k], uv[k]) - v.tau(nodes[k], uv[k]) * udot[k]).collect();
    // A one-sided slope leaves difference noise in delta(a) where the exact
    // value is 0; that noise alone would make the anchor value infinite.
    let delta_scale = delta.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    if delta[0].abs() <= f64::EPSILON.sqrt() * delta_scale {
        delta[0] = 0.0;
    }
    let (d_delta, delta_div) = apply_values(OperatorKind::LEFT_RL, a, &delta, grid.h());
    let (dl, ddl, dl_singular) = derivative_of_left_rl(a, u)?;
    if delta_div || dl_singular {
        flags.endpoint_divergence = true;
    }

    let values: Vec<f64> = (0..nodes.len())
        .into_par_iter()
        .map(|k| {
            if k == 0 {
                return 0.0;
            }
            let (t, x, w) = (nodes[k], uv[k], dl[k]);
            let tau = v.tau(t, x);
            tau * lagrangian.d1(t, x, w)
                + v.xi(t, x) * lagrangian.d2(t, x, w)
                + (d_delta[k] + ddl[k] * tau) * lagrangian.d3(t, x, w)
                + lagrangian.value(t, x, w) * v.tau_dot(t, x, udot[k])
        })
        .collect();
    Ok(Evaluation { values: SampledFunction::new(grid.clone(), values)?, flags, notes })
}

/// Left RL derivative of the transformed trajectory on the grid of the
/// transformed window's policy, together with the Lagrangian samples.
fn transformed_integrand(lagrangian: &Lagrangian, alpha: FractionalOrder, g: &GroupElement, u: &SampledFunction, policy: BoundPolicy) -> Result<(Vec<f64>, Vec<f64>)> {
    let (x, y) = transformed_graph(g, u);
    let spline = MonotoneCubic::new(x, y)?;
    let a = u.grid().a();
    let lower = match policy {
        BoundPolicy::TransformedA => spline.lower(),
        BoundPolicy::FixedA => {
            let moved = spline.lower();
            if moved > a + 1e-12 * (u.grid().b() - a) {
                return Err(FracError::BoundMoved { a, moved });
            }
            a
        }
    };
    let grid = make_uniform_grid(lower, spline.upper(), u.grid().n())?;
    let ubar = SampledFunction::from_fn(grid.clone(), |t| spline.eval(t));
    let d = apply_operator(OperatorKind::LEFT_RL, alpha, &ubar)?;
    let nodes = grid.nodes().to_vec();
    let lv = (0..nodes.len()).map(|k| lagrangian.value(nodes[k], ubar.values()[k], d.values.values()[k])).collect();
    Ok((nodes, lv))
}

fn finite_or_error(values: &[f64], what: &str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(FracError::Precondition(format!("{what} is not finite on the window; start the window after a singular endpoint")))
    }
}

/// Action over `window` on the original trajectory.
pub fn window_action(lagrangian: &Lagrangian, alpha: FractionalOrder, u: &SampledFunction, window: SubInterval) -> Result<f64> {
    let d = apply_operator(OperatorKind::LEFT_RL, alpha, u)?;
    let nodes = u.grid().nodes();
    let lv: Vec<f64> = (window.start_index..=window.end_index)
        .map(|k| lagrangian.value(nodes[k], u.values()[k], d.values.values()[k]))
        .collect();
    finite_or_error(&lv, "Lagrangian")?;
    Ok(trapezoid(&lv, u.grid().h()))
}

/// Action over the transformed window minus the action over `window`.
///
/// Both integrals use the piecewise-linear interpolant of the Lagrangian
/// samples, so at `eta = 0` the defect is exactly zero.
pub fn finite_symmetry_defect(
    lagrangian: &Lagrangian,
    alpha: FractionalOrder,
    g: &GroupElement,
    u: &SampledFunction,
    window: SubInterval,
    policy: BoundPolicy,
) -> Result<f64> {
    let s0 = window_action(lagrangian, alpha, u, window)?;
    if g.eta() == 0.0 {
        return Ok(0.0);
    }
    let uv = u.values();
    let lo = g.time(window.start, uv[window.start_index]);
    let hi = g.time(window.end, uv[window.end_index]);
    let (nodes, lv) = transformed_integrand(lagrangian, alpha, g, u, policy)?;
    let h = nodes[1] - nodes[0];
    let first = ((lo - nodes[0]) / h).floor().max(0.0) as usize;
    let last = (((hi - nodes[0]) / h).ceil() as usize).min(nodes.len() - 1);
    finite_or_error(&lv[first..=last], "transformed Lagrangian")?;
    Ok(piecewise_linear_integral(&nodes[first..=last], &lv[first..=last], lo, hi) - s0)
}

/// Defects over an `eta` ladder with a fitted power law.
#[derive(Debug, Clone)]
pub struct DefectStudy {
    pub etas: Vec<f64>,
    pub defects: Vec<f64>,
    /// Least-squares slope of `log|D|` against `log eta`; infinite when every
    /// defect is below the roundoff floor.
    pub order: f64,
    /// `c1` of the least-squares fit `D = c1 eta + c2 eta^2`.
    pub first_order_coefficient: f64,
    /// Action over the untransformed window.
    pub action: f64,
}

/// Roundoff floor for defects relative to the action magnitude.
pub const DEFECT_FLOOR: f64 = 1e-12;

/// Evaluate [`finite_symmetry_defect`] on each `eta` in parallel and fit the order.
pub fn defect_study(
    lagrangian: &Lagrangian,
    alpha: FractionalOrder,
    group: &OneParameterGroup,
    u: &SampledFunction,
    window: SubInterval,
    policy: BoundPolicy,
    etas: &[f64],
) -> Result<DefectStudy> {
    if etas.len() < 2 || etas.iter().any(|&e| e <= 0.0) {
        return Err(FracError::Invalid("eta ladder needs at least two positive values".into()));
    }
    let action = window_action(lagrangian, alpha, u, window)?;
    let defects = etas
        .par_iter()
        .map(|&e| finite_symmetry_defect(lagrangian, alpha, &group.element(e), u, window, policy))
        .collect::<Result<Vec<f64>>>()?;
    let floor = DEFECT_FLOOR * action.abs().max(1.0);
    let order = if defects.iter().all(|d| d.abs() <= floor) {
        f64::INFINITY
    } else {
        let pts: Vec<(f64, f64)> = etas.iter().zip(&defects).map(|(e, d)| (e.ln(), d.abs().max(floor).ln())).collect();
        least_squares_slope(&pts)
    };
    let first_order_coefficient = linear_quadratic_fit(etas, &defects);
    Ok(DefectStudy { etas: etas.to_vec(), defects, order, first_order_coefficient, action })
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (num, den) = pts.iter().fold((0.0, 0.0), |(n, d), (x, y)| (n + (x - mx) * (y - my), d + (x - mx) * (x - mx)));
    num / den
}

/// `c1` in the least-squares fit `D ~ c1 eta + c2 eta^2`.
fn linear_quadratic_fit(etas: &[f64], d: &[f64]) -> f64 {
    let (mut s2, mut s3, mut s4, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&e, &y) in etas.iter().zip(d) {
        s2 += e * e;
        s3 += e * e * e;
        s4 += e * e * e * e;
        b1 += e * y;
        b2 += e * e * y;
    }
    let det = s2 * s4 - s3 * s3;
    if det.abs() < 1e-300 {
        return b1 / s2;
    }
    (b1 * s4 - b2 * s3) / det
}

/// Integral of a residual over a node-aligned window.
pub fn integrate_on_window(residual: &SampledFunction, window: SubInterval) -> f64 {
    trapezoid(&residual.values()[window.start_index..=window.end_index], residual.grid().h())
}

/// Under a fixed lower bound, translating `(t, u) -> (t + eta, u + eta)` with
/// `eta = shift * h` gives a trajectory whose derivative from `a` picks up the
/// history of `u` on `[a - eta, a]`. Computes that derivative directly and via
/// `aD(u + eta)(t - eta) - alpha/Gamma(1 - alpha) int_{a-eta}^{a} (u(s) + eta)(t - eta - s)^(-alpha-1) ds`
/// and returns the max gap over nodes `t >= a + eta + 0.1 (b - a)`.
///
/// `u` must be defined on `[a - eta, b]`.
pub fn fixed_bound_translation_gap(alpha: FractionalOrder, u: &AnalyticFunction, a: f64, b: f64, n: usize, shift: usize) -> Result<f64> {
    if shift == 0 || shift >= n / 2 {
        return Err(FracError::Invalid(format!("shift must be in 1..{}, got {shift}", n / 2)));
    }
    let grid = make_uniform_grid(a, b, n)?;
    let eta = shift as f64 * grid.h();
    let al = alpha.value();
    let shifted = SampledFunction::from_fn(grid.clone(), |t| u.value(t - eta) + eta);
    let direct = apply_operator(OperatorKind::LEFT_RL, alpha, &shifted)?;
    let lifted = SampledFunction::from_fn(grid.clone(), |t| u.value(t) + eta);
    let base = apply_operator(OperatorKind::LEFT_RL, alpha, &lifted)?;
    let g = gamma_one_minus(al);
    let q = grading_exponent(al);
    let start = a + eta + 0.1 * (b - a);
    let gaps: Vec<f64> = (shift..=n)
        .into_par_iter()
        .filter(|&k| grid.node(k) >= start - 1e-12)
        .map(|k| {
            let t = grid.node(k - shift);
            let history = graded_gauss(|s| (u.value(s) + eta) * (t - s).powf(-al - 1.0), a - eta, a, q.min(4), 8, 16);
            let formula = base.values.values()[k - shift] - al / g * history;
            (direct.values.values()[k] - formula).abs()
        })
        .collect();
    Ok(gaps.into_iter().fold(0.0, f64::max))
}
