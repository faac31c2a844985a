//! Named Lagrangians, generators, groups and trajectories used by the tests,
//! the acceptance suite and the CLI.

use std::f64::consts::PI;

use crate::types::{AnalyticFunction, Lagrangian, OneParameterGroup, VectorField};

/// `v^2/2 - omega^2 u^2/2`.
pub fn oscillator_lagrangian(omega: f64) -> Lagrangian {
    let w2 = omega * omega;
    Lagrangian::new(
        move |_, u, v| 0.5 * v * v - 0.5 * w2 * u * u,
        |_, _, _| 0.0,
        move |_, u, _| -w2 * u,
        |_, _, v| v,
    )
}

/// `v^2/2`: no explicit time and no state dependence.
pub fn free_lagrangian() -> Lagrangian {
    Lagrangian::new(|_, _, v| 0.5 * v * v, |_, _, _| 0.0, |_, _, _| 0.0, |_, _, v| v)
}

/// `t v^2`: explicit time dependence breaks time translation.
pub fn t_explicit_lagrangian() -> Lagrangian {
    Lagrangian::new(|t, _, v| t * v * v, |_, _, v| v * v, |_, _, _| 0.0, |t, _, v| 2.0 * t * v)
}

/// `(b - t)^p v^2/2 - omega^2 u^2/2`: `dL/dv` vanishes to order `p` at `t = b`.
pub fn weighted_oscillator_lagrangian(omega: f64, b: f64, p: i32) -> Lagrangian {
    let w2 = omega * omega;
    Lagrangian::new(
        move |t, u, v| 0.5 * (b - t).powi(p) * v * v - 0.5 * w2 * u * u,
        move |t, _, v| -0.5 * p as f64 * (b - t).powi(p - 1) * v * v,
        move |_, u, _| -w2 * u,
        move |t, _, v| (b - t).powi(p) * v,
    )
}

/// `c[0] v^2 + c[1] u^2 + c[2] u v + c[3] v + c[4] u + c[5] t v^2`.
pub fn polynomial_lagrangian(c: [f64; 6]) -> Lagrangian {
    Lagrangian::new(
        move |t, u, v| c[0] * v * v + c[1] * u * u + c[2] * u * v + c[3] * v + c[4] * u + c[5] * t * v * v,
        move |_, _, v| c[5] * v * v,
        move |_, u, v| 2.0 * c[1] * u + c[2] * v + c[4],
        move |t, u, v| 2.0 * c[0] * v + c[2] * u + c[3] + 2.0 * c[5] * t * v,
    )
}

/// Generator of time translations, `d/dt`.
pub fn time_translation() -> VectorField {
    VectorField::constant(1.0, 0.0)
}

/// Generator of state translations, `d/du`.
pub fn state_translation() -> VectorField {
    VectorField::constant(0.0, 1.0)
}

/// `d/dt + d/du`.
pub fn joint_translation() -> VectorField {
    VectorField::constant(1.0, 1.0)
}

/// `(t, u) -> (t + eta, u)`.
pub fn time_translation_group() -> OneParameterGroup {
    OneParameterGroup::new(|e, t, _| t + e, |_, _, u| u)
}

/// `(t, u) -> (t + eta, u + eta)`.
pub fn joint_translation_group() -> OneParameterGroup {
    OneParameterGroup::new(|e, t, _| t + e, |e, _, u| u + e)
}

/// `(t, u) -> (t, u + eta)`.
pub fn state_translation_group() -> OneParameterGroup {
    OneParameterGroup::new(|_, t, _| t, |e, _, u| u + e)
}

/// `(t - a)^k`.
pub fn power(a: f64, k: usize) -> AnalyticFunction {
    let mut coeffs = vec![0.0; k + 1];
    coeffs[k] = 1.0;
    AnalyticFunction::polynomial(a, coeffs)
}

/// `t sin(pi t)`: vanishes at 0 with zero slope there.
pub fn damped_sine() -> AnalyticFunction {
    AnalyticFunction::polynomial(0.0, vec![0.0, 1.0]).product(&AnalyticFunction::sine(1.0, PI, 0.0))
}

/// `(b - t)^p` as an analytic function.
pub fn vanishing_factor(b: f64, p: usize) -> AnalyticFunction {
    let mut coeffs = vec![0.0; p + 1];
    coeffs[p] = if p % 2 == 0 { 1.0 } else { -1.0 };
    AnalyticFunction::polynomial(b, coeffs)
}

/// `t^2 (1 - t)^5`, a degree-seven polynomial with `u(0) = u'(0) = 0`.
pub fn case_b_polynomial() -> AnalyticFunction {
    AnalyticFunction::polynomial(0.0, vec![0.0, 0.0, 1.0]).product(&vanishing_factor(1.0, 5))
}

/// `t (e^t - 1)(1 - t)^5`.
pub fn case_b_exponential() -> AnalyticFunction {
    AnalyticFunction::exponential(1.0, 1.0, 0.0)
        .sum(&AnalyticFunction::constant(-1.0))
        .product(&AnalyticFunction::polynomial(0.0, vec![0.0, 1.0]))
        .product(&vanishing_factor(1.0, 5))
}
