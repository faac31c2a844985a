//! Truncated integer-order expansions of the left RL derivative and the
//! variational objects built on them: the approximated Lagrangian, its
//! Euler-Lagrange residual, the prolonged criterion and conservation law,
//! and weak pairings against analytic test functions.
//!
//! Every expansion uses the coefficient functions
//! `c_i(t) = (alpha choose i) (t - a)^(i - alpha) / Gamma(i + 1 - alpha)`
//! from a single [`SeriesCoefficients`] value.

use gauss_quad::GaussLegendre;
use rayon::prelude::*;
use std::num::NonZeroUsize;

use crate::diff::pointwise_derivative;
use crate::error::{FracError, Result};
use crate::eulerlagrange::el_residual_rl;
use crate::noether::{conserved_quantity, drift_and_mean, ConservationForm, ConservedQuantitySeries};
use crate::presets;
use crate::quadrature::{graded_gauss, grading_exponent, trapezoid};
use crate::special::{frac_binomial, gamma};
use crate::symmetry::{infinitesimal_criterion_residual, BoundPolicy};
use crate::types::{AnalyticFunction, FractionalOrder, GridRef, Lagrangian, NumericalFlags, SampledFunction, VectorField};

/// Largest truncation level accepted anywhere.
pub const MAX_TRUNCATION: usize = 16;
/// Largest level for operations that difference composite maps.
pub const COMPOSITE_CAP: usize = 8;
/// Extra stencil points beyond the derivative order for composite maps.
const COMPOSITE_EXTRA: usize = 8;
const PAIRING_PANELS: usize = 16;
const PAIRING_DEGREE: usize = 12;
const TAIL_DEGREE: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruncationLevel(usize);

impl TruncationLevel {
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_TRUNCATION {
            return Err(FracError::TruncationTooHigh { requested: n, available: MAX_TRUNCATION });
        }
        Ok(Self(n))
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }
}

/// A named analytic test function.
#[derive(Debug, Clone)]
pub struct TestFunction {
    pub name: String,
    pub f: AnalyticFunction,
}

impl TestFunction {
    pub fn new(name: impl Into<String>, f: AnalyticFunction) -> Self {
        Self { name: name.into(), f }
    }
}

/// Analytic test functions on `(c, d)` with the sup-seminorm windows used for
/// reporting.
#[derive(Debug, Clone)]
pub struct TestFunctionSpace {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub functions: Vec<TestFunction>,
    pub windows: Vec<(f64, f64)>,
}

impl TestFunctionSpace {
    /// Checks that every closed ball `B(t, b - a)`, `t` in `[a, b]`, lies in
    /// `(c, d)` and that the windows are subintervals of `(c, d)`.
    pub fn new(a: f64, b: f64, c: f64, d: f64, functions: Vec<TestFunction>, windows: Vec<(f64, f64)>) -> Result<Self> {
        if !(a < b) {
            return Err(FracError::InvalidSubInterval(format!("[{a}, {b}] is empty")));
        }
        let len = b - a;
        if !(c < a - len && d > b + len) {
            return Err(FracError::Precondition(format!("(c, d) = ({c}, {d}) does not contain every ball B(t, {len}) for t in [{a}, {b}]")));
        }
        if let Some(&(m, n)) = windows.iter().find(|&&(m, n)| !(c < m && m < n && n < d)) {
            return Err(FracError::InvalidSubInterval(format!("window [{m}, {n}] is not inside ({c}, {d})")));
        }
        Ok(Self { a, b, c, d, functions, windows })
    }

    /// `(c, d) = (a - 1.1 (b - a), b + 1.1 (b - a))`, the functions
    /// `1, s, s^2, s^3, e^s` in `s = t - a`, and the window
    /// `[a + 0.1 (b - a), b - 0.1 (b - a)]`.
    pub fn standard(a: f64, b: f64) -> Result<Self> {
        let len = b - a;
        let functions = vec![
            TestFunction::new("1", AnalyticFunction::constant(1.0)),
            TestFunction::new("t", presets::power(a, 1)),
            TestFunction::new("t^2", presets::power(a, 2)),
            TestFunction::new("t^3", presets::power(a, 3)),
            TestFunction::new("exp", AnalyticFunction::exponential(1.0, 1.0, a)),
        ];
        Self::new(a, b, a - 1.1 * len, b + 1.1 * len, functions, vec![(a + 0.1 * len, b - 0.1 * len)])
    }

    /// The first `k` test functions.
    pub fn truncated(&self, k: usize) -> Self {
        Self { functions: self.functions[..k.min(self.functions.len())].to_vec(), ..self.clone() }
    }

    /// `p_[m,n](f)`, the sup of `|f|` sampled at 1001 equispaced points.
    pub fn seminorm(f: impl Fn(f64) -> f64, window: (f64, f64)) -> f64 {
        let (m, n) = window;
        (0..=1000).map(|j| f(m + (n - m) * j as f64 / 1000.0).abs()).fold(0.0, f64::max)
    }
}

/// Coefficient functions `c_i`, `i = 0..=N`, and their derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesCoefficients {
    alpha: f64,
    a: f64,
    prefactors: Vec<f64>,
}

impl SeriesCoefficients {
    pub fn new(alpha: FractionalOrder, a: f64, level: TruncationLevel) -> Result<Self> {
        let prefactors = (0..=level.get())
            .map(|i| Ok(frac_binomial(alpha, i) / gamma(i as f64 + 1.0 - alpha.value())?))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { alpha: alpha.value(), a, prefactors })
    }

    pub fn level(&self) -> usize {
        self.prefactors.len() - 1
    }

    pub fn lower(&self) -> f64 {
        self.a
    }

    /// `(alpha choose i) / Gamma(i + 1 - alpha)`.
    pub fn prefactors(&self) -> &[f64] {
        &self.prefactors
    }

    /// `k`-th derivative of `c_i` at `t >= a`. At `t = a` a positive power
    /// gives 0 and a negative one a signed infinity.
    pub fn derivative(&self, i: usize, k: usize, t: f64) -> f64 {
        let e = i as f64 - self.alpha;
        let mut c = self.prefactors[i];
        for m in 0..k {
            c *= e - m as f64;
        }
        let x = t - self.a;
        let p = e - k as f64;
        if x > 0.0 {
            c * x.powf(p)
        } else if x == 0.0 && p > 0.0 {
            0.0
        } else {
            c.signum() * f64::INFINITY
        }
    }

    pub fn value(&self, i: usize, t: f64) -> f64 {
        self.derivative(i, 0, t)
    }

    /// `table[i][k] = c_i(t_k)`.
    pub fn table(&self, grid: &GridRef) -> Vec<Vec<f64>> {
        (0..=self.level()).map(|i| grid.nodes().iter().map(|&t| self.value(i, t)).collect()).collect()
    }

    /// `sum_i c_i(t) f^(i)(t)`, with the anchor value 0 when `f(a) = 0` and a
    /// signed infinity otherwise.
    fn apply(&self, f: &AnalyticFunction, t: f64) -> f64 {
        if t <= self.a {
            let fa = f.value(self.a);
            return if fa == 0.0 { 0.0 } else { fa.signum() * f64::INFINITY };
        }
        (0..=self.level()).map(|i| self.value(i, t) * f.derivative(i, t)).sum()
    }

    /// `d/dt sum_i c_i f^(i)`; needs `f` to order `N + 1`.
    fn apply_slope(&self, f: &AnalyticFunction, t: f64) -> f64 {
        (0..=self.level()).map(|i| self.derivative(i, 1, t) * f.derivative(i, t) + self.value(i, t) * f.derivative(i + 1, t)).sum()
    }
}

/// Sampled output of a truncated-series operation.
#[derive(Debug, Clone)]
pub struct SeriesEvaluation {
    pub values: SampledFunction,
    pub flags: NumericalFlags,
    pub notes: Vec<String>,
    pub coefficients: SeriesCoefficients,
}

/// Stencil spacing for a `k`-th derivative of a composite map on a span of
/// length `span`: `span * eps^(1 / (k + 8))`, which balances roundoff against
/// truncation and is about `span / 8` at `k = 8`.
fn composite_step(span: f64, k: usize) -> f64 {
    span * f64::EPSILON.powf(1.0 / (k + COMPOSITE_EXTRA) as f64)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

fn require_order(f: &AnalyticFunction, needed: usize) -> Result<()> {
    if needed > f.max_order() {
        return Err(FracError::TruncationTooHigh { requested: needed, available: f.max_order() });
    }
    Ok(())
}

fn require_composite(level: TruncationLevel) -> Result<()> {
    if level.get() > COMPOSITE_CAP {
        return Err(FracError::TruncationTooHigh { requested: level.get(), available: COMPOSITE_CAP });
    }
    Ok(())
}

/// `S_N(t) = sum_{i<=N} c_i(t) f^(i)(t)` on the grid.
pub fn series_left_derivative(f: &AnalyticFunction, alpha: FractionalOrder, level: TruncationLevel, grid: &GridRef) -> Result<SeriesEvaluation> {
    require_order(f, level.get())?;
    let coef = SeriesCoefficients::new(alpha, grid.a(), level)?;
    let values: Vec<f64> = grid.nodes().par_iter().map(|&t| coef.apply(f, t)).collect();
    let mut flags = NumericalFlags::default();
    let mut notes = Vec::new();
    if !values[0].is_finite() {
        flags.endpoint_divergence = true;
        notes.push("f(a) != 0: the i = 0 term diverges at a".into());
    }
    Ok(SeriesEvaluation { values: SampledFunction::new(grid.clone(), values)?, flags, notes, coefficients: coef })
}

/// `sum_{i<=N} (-d/dt)^i (F c_i)` on the grid, by the Leibniz rule with the
/// closed-form derivatives of `c_i`.
pub fn series_right_partial_sum(f: &AnalyticFunction, alpha: FractionalOrder, level: TruncationLevel, grid: &GridRef) -> Result<SeriesEvaluation> {
    let n = level.get();
    require_order(f, n)?;
    let coef = SeriesCoefficients::new(alpha, grid.a(), level)?;
    let a = grid.a();
    let values: Vec<f64> = grid
        .nodes()
        .par_iter()
        .map(|&t| {
            if t <= a {
                // Only the k = 0 terms survive, each proportional to F(a) (t - a)^-alpha.
                let fa = f.value(a);
                if fa == 0.0 {
                    return 0.0;
                }
                let s: f64 = (0..=n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 } * coef.derivative(i, i, a + 1.0)).sum();
                return (s * fa).signum() * f64::INFINITY;
            }
            (0..=n)
                .map(|i| {
                    let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                    sign * (0..=i).map(|k| binomial(i, k) * f.derivative(k, t) * coef.derivative(i, i - k, t)).sum::<f64>()
                })
                .sum()
        })
        .collect();
    let mut flags = NumericalFlags::default();
    let mut notes = Vec::new();
    if !values[0].is_finite() {
        flags.endpoint_divergence = true;
        notes.push("F(a) != 0: the partial sum diverges at a".into());
    }
    let scale = grid.nodes().iter().map(|&t| f.value(t).abs()).fold(1.0, f64::max);
    if let Some(i) = (0..=n).find(|&i| f.derivative(i, grid.b()).abs() > 1e-12 * scale) {
        flags.precondition_violated = true;
        notes.push(format!("F^({i})(b) != 0: the partial sums need not converge weakly"));
    }
    Ok(SeriesEvaluation { values: SampledFunction::new(grid.clone(), values)?, flags, notes, coefficients: coef })
}

/// `L(t, u, S_N u)` viewed as a Lagrangian in `t, u, u', ..., u^(N)`.
#[derive(Debug, Clone)]
pub struct ApproximatedLagrangian {
    lagrangian: Lagrangian,
    u: AnalyticFunction,
    coefficients: SeriesCoefficients,
}

pub fn approximated_lagrangian(
    lagrangian: &Lagrangian,
    alpha: FractionalOrder,
    level: TruncationLevel,
    u: &AnalyticFunction,
    a: f64,
) -> Result<ApproximatedLagrangian> {
    require_order(u, level.get())?;
    Ok(ApproximatedLagrangian { lagrangian: lagrangian.clone(), u: u.clone(), coefficients: SeriesCoefficients::new(alpha, a, level)? })
}

impl ApproximatedLagrangian {
    pub fn coefficients(&self) -> &SeriesCoefficients {
        &self.coefficients
    }

    /// `S_N u (t)`.
    pub fn truncated_derivative(&self, t: f64) -> f64 {
        self.coefficients.apply(&self.u, t)
    }

    pub fn value(&self, t: f64) -> f64 {
        self.lagrangian.value(t, self.u.value(t), self.truncated_derivative(t))
    }

    /// `d Lbar / du = d2 L + d3 L c_0`.
    pub fn partial_state(&self, t: f64) -> f64 {
        let (x, s) = (self.u.value(t), self.truncated_derivative(t));
        self.lagrangian.d2(t, x, s) + self.lagrangian.d3(t, x, s) * self.coefficients.value(0, t)
    }

    /// `d Lbar / du^(i) = d3 L c_i` for `i = 1..=N`.
    pub fn partial_derivative(&self, i: usize, t: f64) -> f64 {
        assert!((1..=self.coefficients.level()).contains(&i), "derivative slot {i} out of range");
        self.lagrangian.d3(t, self.u.value(t), self.truncated_derivative(t)) * self.coefficients.value(i, t)
    }
}

/// Shared pointwise machinery for one `(L, u, N)`.
struct Expansion<'a> {
    l: &'a Lagrangian,
    u: &'a AnalyticFunction,
    coef: SeriesCoefficients,
    b: f64,
}

impl<'a> Expansion<'a> {
    fn new(l: &'a Lagrangian, alpha: FractionalOrder, level: TruncationLevel, u: &'a AnalyticFunction, a: f64, b: f64) -> Result<Self> {
        Ok(Self { l, u, coef: SeriesCoefficients::new(alpha, a, level)?, b })
    }

    fn a(&self) -> f64 {
        self.coef.lower()
    }

    fn n(&self) -> usize {
        self.coef.level()
    }

    fn s(&self, t: f64) -> f64 {
        self.coef.apply(self.u, t)
    }

    /// `d3 L(t, u, S_N u)`.
    fn g(&self, t: f64) -> f64 {
        self.l.d3(t, self.u.value(t), self.s(t))
    }

    /// `G^(k)(t)` for `k = 0..=N` by Fornberg stencils kept above `a`.
    fn g_derivatives(&self, t: f64) -> Vec<f64> {
        let span = self.b - self.a();
        (0..=self.n()).map(|k| pointwise_derivative(|s| self.g(s), t, k, composite_step(span, k), COMPOSITE_EXTRA, self.a())).collect()
    }

    /// `sum_i (-d/dt)^i (c_i G)` at `t > a`.
    fn right_sum(&self, t: f64) -> f64 {
        let gd = self.g_derivatives(t);
        (0..=self.n())
            .map(|i| {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                sign * (0..=i).map(|k| binomial(i, k) * self.coef.derivative(i, i - k, t) * gd[k]).sum::<f64>()
            })
            .sum()
    }

    /// `w^(i)` for `w = xi - u' tau`, `i = 0..=N`.
    fn w_derivatives(&self, v: &VectorField, t: f64) -> Vec<f64> {
        let n = self.n();
        if let Some((tau, xi)) = v.constant_coefficients() {
            return (0..=n).map(|i| if i == 0 { xi - tau * self.u.derivative(1, t) } else { -tau * self.u.derivative(i + 1, t) }).collect();
        }
        let w = |s: f64| {
            let x = self.u.value(s);
            v.xi(s, x) - v.tau(s, x) * self.u.derivative(1, s)
        };
        let span = self.b - self.a();
        (0..=n).map(|i| pointwise_derivative(w, t, i, composite_step(span, i), COMPOSITE_EXTRA, f64::NEG_INFINITY)).collect()
    }

    fn el(&self, t: f64) -> f64 {
        self.l.d2(t, self.u.value(t), self.s(t)) + self.right_sum(t)
    }

    fn criterion(&self, v: &VectorField, t: f64) -> f64 {
        let (x, s) = (self.u.value(t), self.s(t));
        let ud = self.u.derivative(1, t);
        let (tau, xi) = (v.tau(t, x), v.xi(t, x));
        let wd = self.w_derivatives(v, t);
        let sum: f64 = (0..=self.n()).map(|i| self.coef.value(i, t) * wd[i]).sum();
        let slope = self.coef.apply_slope(self.u, t);
        tau * self.l.d1(t, x, s) + xi * self.l.d2(t, x, s) + (sum + slope * tau) * self.l.d3(t, x, s) + self.l.value(t, x, s) * v.tau_dot(t, x, ud)
    }

    /// `Lbar tau` at `t`.
    fn l_tau(&self, v: &VectorField, t: f64) -> f64 {
        let x = self.u.value(t);
        self.l.value(t, x, self.s(t)) * v.tau(t, x)
    }

    /// Integrand of the truncated conservation law.
    fn cl_integrand(&self, v: &VectorField, t: f64) -> f64 {
        let wd = self.w_derivatives(v, t);
        let sum: f64 = (0..=self.n()).map(|i| self.coef.value(i, t) * wd[i]).sum();
        sum * self.g(t) - wd[0] * self.right_sum(t)
    }
}

fn require_zero_start(u: &AnalyticFunction, a: f64) -> Result<()> {
    if u.value(a) != 0.0 {
        return Err(FracError::Precondition(format!("u(a) = {} must vanish for the truncated expansion to be regular at a", u.value(a))));
    }
    Ok(())
}

fn anchored_output(grid: &GridRef, values: Vec<f64>, coef: SeriesCoefficients, extra: Vec<String>) -> Result<SeriesEvaluation> {
    let mut flags = NumericalFlags::default();
    let mut notes = vec!["node a is not evaluated (reported as 0)".to_string()];
    notes.extend(extra);
    if values.iter().any(|v| !v.is_finite()) {
        flags.endpoint_divergence = true;
        notes.push("non-finite values in the interior".into());
    }
    Ok(SeriesEvaluation { values: SampledFunction::new(grid.clone(), values)?, flags, notes, coefficients: coef })
}

/// `d2 L + sum_{i<=N} (-d/dt)^i (d3 L c_i)` with `L` at `(t, u, S_N u)`.
///
/// Derivatives of the composite `d3 L` come from Fornberg stencils (see
/// `composite_step`) combined with the exact derivatives of `c_i`. `d3 L` inherits the `(t - a)^(1 - alpha)` behaviour
/// of `S_N u`, so the pointwise values are accurate away from `a` only; use
/// [`pairing_el_n`] for weak pairings.
pub fn el_n_residual(lagrangian: &Lagrangian, alpha: FractionalOrder, level: TruncationLevel, u: &AnalyticFunction, grid: &GridRef) -> Result<SeriesEvaluation> {
    require_composite(level)?;
    require_order(u, level.get())?;
    let ex = Expansion::new(lagrangian, alpha, level, u, grid.a(), grid.b())?;
    let mut extra = Vec::new();
    if u.value(grid.a()) != 0.0 {
        extra.push("u(a) != 0: the composite d3 L is singular at a".into());
    }
    let values: Vec<f64> = grid.nodes().par_iter().enumerate().map(|(k, &t)| if k == 0 { 0.0 } else { ex.el(t) }).collect();
    let mut out = anchored_output(grid, values, ex.coef.clone(), extra)?;
    out.flags.precondition_violated = u.value(grid.a()) != 0.0;
    Ok(out)
}

/// The criterion for the truncated problem in its consolidated form
/// `tau d1 L + xi d2 L + [sum_i c_i w^(i) + (S_N u)' tau] d3 L + Lbar tau'`,
/// `w = xi - u' tau`, for a generator held fixed in `N`.
pub fn prolonged_criterion_residual(
    lagrangian: &Lagrangian,
    alpha: FractionalOrder,
    level: TruncationLevel,
    v: &VectorField,
    u: &AnalyticFunction,
    grid: &GridRef,
) -> Result<SeriesEvaluation> {
    require_order(u, level.get() + 1)?;
    if v.constant_coefficients().is_none() {
        require_composite(level)?;
    }
    let ex = Expansion::new(lagrangian, alpha, level, u, grid.a(), grid.b())?;
    let values: Vec<f64> = grid.nodes().par_iter().enumerate().map(|(k, &t)| if k == 0 { 0.0 } else { ex.criterion(v, t) }).collect();
    anchored_output(grid, values, ex.coef.clone(), Vec::new())
}

/// `Lbar tau + int_a^t [sum_i c_i w^(i) d3 L - w sum_i (-d/ds)^i (c_i d3 L)] ds`
/// on the grid. Each cell is integrated by 8-point Gauss-Legendre, graded on
/// the first cell where the integrand is singular.
pub fn cl_n_series(
    lagrangian: &Lagrangian,
    alpha: FractionalOrder,
    level: TruncationLevel,
    v: &VectorField,
    u: &AnalyticFunction,
    grid: &GridRef,
) -> Result<ConservedQuantitySeries> {
    require_composite(level)?;
    require_order(u, level.get() + 1)?;
    let ex = Expansion::new(lagrangian, alpha, level, u, grid.a(), grid.b())?;
    let nodes = grid.nodes();
    let q = grading_exponent(alpha.value());
    let cells: Vec<f64> = (0..grid.n())
        .into_par_iter()
        .map(|j| graded_gauss(|s| ex.cl_integrand(v, s), nodes[j], nodes[j + 1], if j == 0 { q } else { 1 }, 1, 8))
        .collect();
    let mut values = Vec::with_capacity(nodes.len());
    let mut acc = 0.0;
    for (k, &t) in nodes.iter().enumerate() {
        if k > 0 {
            acc += cells[k - 1];
        }
        values.push(ex.l_tau(v, t) + acc);
    }
    let mut flags = NumericalFlags::default();
    if values.iter().any(|x| !x.is_finite()) {
        flags.endpoint_divergence = true;
    }
    flags.precondition_violated = u.value(grid.a()) != 0.0;
    let values = SampledFunction::new(grid.clone(), values)?;
    let (drift, mean) = drift_and_mean(values.values());
    Ok(ConservedQuantitySeries { form: ConservationForm::Cl, values, drift, mean, flags })
}

/// `<f, phi> = int_a^b f phi dt` by the trapezoid rule on the grid of `f`.
pub fn weak_pairing(f: &SampledFunction, phi: &AnalyticFunction) -> f64 {
    let grid = f.grid();
    let prod: Vec<f64> = grid.nodes().iter().zip(f.values()).map(|(&t, &x)| x * phi.value(t)).collect();
    trapezoid(&prod, grid.h())
}

/// `int_a^b f phi dt` for a closure `f` that may behave like `(t - a)^-alpha`,
/// by Gauss-Legendre after the substitution `t = a + (b - a) s^q`,
/// `q = ceil(3 / (1 - alpha))`.
pub fn pairing_closure(f: impl Fn(f64) -> f64 + Sync, phi: &AnalyticFunction, alpha: FractionalOrder, a: f64, b: f64) -> f64 {
    graded_gauss(|t| f(t) * phi.value(t), a, b, grading_exponent(alpha.value()), PAIRING_PANELS, PAIRING_DEGREE)
}

/// `<sum_{i<=N} (-d/dt)^i (F c_i), phi> = <F, sum_{i<=N} c_i phi^(i)>`.
/// The transfer needs `F^(m)(b) = 0` for `m < N`; `F(b) != 0` is rejected.
pub fn pairing_right_partial_sum(f: &AnalyticFunction, alpha: FractionalOrder, level: TruncationLevel, phi: &AnalyticFunction, a: f64, b: f64) -> Result<f64> {
    require_order(phi, level.get())?;
    if level.get() > 0 && f.value(b) != 0.0 {
        return Err(FracError::Precondition(format!("F(b) = {} must vanish", f.value(b))));
    }
    let coef = SeriesCoefficients::new(alpha, a, level)?;
    Ok(pairing_closure(|t| f.value(t) * coef.apply(phi, t), &AnalyticFunction::constant(1.0), alpha, a, b))
}

/// `<P_N, phi> = <d2 L, phi> + <d3 L, sum_{i<=N} c_i phi^(i)>`, all at
/// `(t, u, S_N u)`. Needs `u(a) = 0` and `d3 L` vanishing at `b` to order `N`.
pub fn pairing_el_n(lagrangian: &Lagrangian, alpha: FractionalOrder, level: TruncationLevel, u: &AnalyticFunction, phi: &AnalyticFunction, a: f64, b: f64) -> Result<f64> {
    require_order(u, level.get())?;
    require_order(phi, level.get())?;
    require_zero_start(u, a)?;
    let ex = Expansion::new(lagrangian, alpha, level, u, a, b)?;
    let one = AnalyticFunction::constant(1.0);
    Ok(pairing_closure(
        |t| {
            let (x, s) = (u.value(t), ex.s(t));
            lagrangian.d2(t, x, s) * phi.value(t) + lagrangian.d3(t, x, s) * ex.coef.apply(phi, t)
        },
        &one,
        alpha,
        a,
        b,
    ))
}

/// `<IC_N, phi>` from the pointwise criterion.
pub fn pairing_ic_n(
    lagrangian: &Lagrangian,
    alpha: FractionalOrder,
    level: TruncationLevel,
    v: &VectorField,
    u: &AnalyticFunction,
    phi: &AnalyticFunction,
    a: f64,
    b: f64,
) -> Result<f64> {
    require_order(u, level.get() + 1)?;
    if v.constant_coefficients().is_none() {
        require_composite(level)?;
    }
    let ex = Expansion::new(lagrangian, alpha, level, u, a, b)?;
    Ok(pairing_closure(|t| ex.criterion(v, t), phi, alpha, a, b))
}

/// `<CL_N, phi>` with the derivatives moved off `d3 L`:
/// `<Lbar tau, phi> + int_a^b Phi sum_i c_i w^(i) G - sum_i int_a^b (Phi w)^(i) c_i G`,
/// where `Phi(s) = int_s^b phi` and `G = d3 L(s, u, S_N u)`. Needs `u(a) = 0`
/// and `G` vanishing at `b` to order `N`.
#[allow(clippy::too_many_arguments)]
pub fn pairing_cl_n(
    lagrangian: &Lagrangian,
    alpha: FractionalOrder,
    level: TruncationLevel,
    v: &VectorField,
    u: &AnalyticFunction,
    phi: &AnalyticFunction,
    a: f64,
    b: f64,
) -> Result<f64> {
    let n = level.get();
    require_order(u, n + 1)?;
    require_order(phi, n)?;
    require_zero_start(u, a)?;
    if v.constant_coefficients().is_none() {
        require_composite(level)?;
    }
    let ex = Expansion::new(lagrangian, alpha, level, u, a, b)?;
    let tail = GaussLegendre::new(NonZeroUsize::new(TAIL_DEGREE).expect("nonzero"));
    let one = AnalyticFunction::constant(1.0);
    Ok(pairing_closure(
        |t| {
            let wd = ex.w_derivatives(v, t);
            // Phi^(0) = int_t^b phi, Phi^(k) = -phi^(k-1).
            let big_phi: Vec<f64> = (0..=n)
                .map(|k| if k == 0 { tail.integrate(t, b, |s| phi.value(s)) } else { -phi.derivative(k - 1, t) })
                .collect();
            let g = ex.g(t);
            let lead: f64 = (0..=n).map(|i| ex.coef.value(i, t) * wd[i]).sum::<f64>() * g * big_phi[0];
            let moved: f64 = (0..=n)
                .map(|i| {
                    let pw: f64 = (0..=i).map(|k| binomial(i, k) * big_phi[k] * wd[i - k]).sum();
                    pw * ex.coef.value(i, t) * g
                })
                .sum();
            ex.l_tau(v, t) * phi.value(t) + lead - moved
        },
        &one,
        alpha,
        a,
        b,
    ))
}

/// Which truncated object is compared with its fractional limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeakClaim {
    EulerLagrange,
    Criterion,
    ConservationLaw,
}

impl WeakClaim {
    pub const ALL: [WeakClaim; 3] = [WeakClaim::EulerLagrange, WeakClaim::Criterion, WeakClaim::ConservationLaw];

    pub fn name(self) -> &'static str {
        match self {
            WeakClaim::EulerLagrange => "el",
            WeakClaim::Criterion => "ic",
            WeakClaim::ConservationLaw => "cl",
        }
    }
}

/// A problem whose data vanish at `b` to high order, so the truncated
/// expansions converge weakly.
#[derive(Debug, Clone)]
pub struct CaseBProblem {
    pub name: &'static str,
    pub lagrangian: Lagrangian,
    pub alpha: FractionalOrder,
    pub u: AnalyticFunction,
    pub field: VectorField,
    pub a: f64,
    pub b: f64,
    /// Whether the expansion of `u` terminates (polynomial `u`).
    pub terminating: bool,
}

impl CaseBProblem {
    /// `(1 - t)^10 v^2/2 - u^2/2`, `u = t^2 (1 - t)^5`, time translation.
    pub fn polynomial(alpha: FractionalOrder) -> Self {
        Self {
            name: "polynomial",
            lagrangian: presets::weighted_oscillator_lagrangian(1.0, 1.0, 10),
            alpha,
            u: presets::case_b_polynomial(),
            field: presets::time_translation(),
            a: 0.0,
            b: 1.0,
            terminating: true,
        }
    }

    /// As [`CaseBProblem::polynomial`] with `u = t (e^t - 1)(1 - t)^5`.
    pub fn exponential(alpha: FractionalOrder) -> Self {
        Self { name: "exponential", u: presets::case_b_exponential(), terminating: false, ..Self::polynomial(alpha) }
    }
}

#[derive(Debug, Clone)]
pub struct WeakGap {
    pub claim: WeakClaim,
    pub test_function: String,
    pub level: usize,
    /// Pairing of the truncated object.
    pub truncated: f64,
    /// Pairing of the fractional object from the quadrature operators.
    pub limit: f64,
    pub gap: f64,
}

#[derive(Debug, Clone)]
pub struct WeakStudy {
    pub problem: &'static str,
    pub levels: Vec<usize>,
    pub gaps: Vec<WeakGap>,
    /// `(N, p_[m,n](IC_N - IC))` on the first seminorm window.
    pub ic_seminorm: Vec<(usize, f64)>,
}

impl WeakStudy {
    /// Gaps along the level ladder for one claim and test function.
    pub fn ladder(&self, claim: WeakClaim, test_function: &str) -> Vec<f64> {
        self.levels
            .iter()
            .map(|&l| {
                self.gaps
                    .iter()
                    .find(|g| g.claim == claim && g.test_function == test_function && g.level == l)
                    .map_or(f64::NAN, |g| g.gap)
            })
            .collect()
    }

    /// `(claim, test function, N)` wherever the gap grows from the previous level.
    pub fn increases(&self) -> Vec<(WeakClaim, String, usize)> {
        let mut out = Vec::new();
        let mut names: Vec<&str> = self.gaps.iter().map(|g| g.test_function.as_str()).collect();
        names.dedup();
        names.sort_unstable();
        names.dedup();
        for claim in WeakClaim::ALL {
            for &name in &names {
                let l = self.ladder(claim, name);
                for j in 1..l.len() {
                    if !(l[j] <= l[j - 1]) {
                        out.push((claim, name.to_string(), self.levels[j]));
                    }
                }
            }
        }
        out
    }
}

/// Pairings of EL_N, IC_N and CL_N against each test function for each level,
/// compared with the quadrature-based fractional residual, criterion and
/// conserved quantity on a uniform grid of `n` cells.
pub fn weak_convergence_study(problem: &CaseBProblem, levels: &[usize], functions: &[TestFunction], n: usize) -> Result<WeakStudy> {
    let grid = crate::types::make_uniform_grid(problem.a, problem.b, n)?;
    let us = problem.u.sample(&grid);
    let (l, alpha, v) = (&problem.lagrangian, problem.alpha, &problem.field);
    let el = el_residual_rl(l, alpha, &us)?.values;
    let ic = infinitesimal_criterion_residual(l, alpha, v, &us, BoundPolicy::TransformedA)?.values;
    let cl = conserved_quantity(l, alpha, v, &us, problem.b, ConservationForm::Cl)?.values;
    let limits: Vec<(WeakClaim, &SampledFunction)> =
        vec![(WeakClaim::EulerLagrange, &el), (WeakClaim::Criterion, &ic), (WeakClaim::ConservationLaw, &cl)];

    let mut jobs = Vec::new();
    for &level in levels {
        for (claim, limit) in &limits {
            for tf in functions {
                jobs.push((level, *claim, *limit, tf));
            }
        }
    }
    let gaps = jobs
        .par_iter()
        .map(|&(level, claim, limit, tf)| {
            let lv = TruncationLevel::new(level)?;
            let truncated = match claim {
                WeakClaim::EulerLagrange => pairing_el_n(l, alpha, lv, &problem.u, &tf.f, problem.a, problem.b)?,
                WeakClaim::Criterion => pairing_ic_n(l, alpha, lv, v, &problem.u, &tf.f, problem.a, problem.b)?,
                WeakClaim::ConservationLaw => pairing_cl_n(l, alpha, lv, v, &problem.u, &tf.f, problem.a, problem.b)?,
            };
            let limit = weak_pairing(limit, &tf.f);
            Ok(WeakGap { claim, test_function: tf.name.clone(), level, truncated, limit, gap: (truncated - limit).abs() })
        })
        .collect::<Result<Vec<_>>>()?;

    let len = problem.b - problem.a;
    let window = (problem.a + 0.1 * len, problem.b - 0.1 * len);
    let ic_seminorm = levels
        .iter()
        .map(|&level| {
            let r = prolonged_criterion_residual(l, alpha, TruncationLevel::new(level)?, v, &problem.u, &grid)?;
            let worst = grid
                .nodes()
                .iter()
                .enumerate()
                .filter(|(_, &t)| t >= window.0 && t <= window.1)
                .map(|(k, _)| (r.values.values()[k] - ic.values()[k]).abs())
                .fold(0.0, f64::max);
            Ok((level, worst))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WeakStudy { problem: problem.name, levels: levels.to_vec(), gaps, ic_seminorm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::make_uniform_grid;
    use std::f64::consts::PI;

    fn half() -> FractionalOrder {
        FractionalOrder::new(0.5).unwrap()
    }

    fn lv(n: usize) -> TruncationLevel {
        TruncationLevel::new(n).unwrap()
    }

    #[test]
    fn level_bounds() {
        assert!(TruncationLevel::new(MAX_TRUNCATION).is_ok());
        assert!(TruncationLevel::new(MAX_TRUNCATION + 1).is_err());
    }

    #[test]
    fn standard_space_satisfies_ball_condition() {
        let s = TestFunctionSpace::standard(0.0, 1.0).unwrap();
        assert_eq!(s.functions.len(), 5);
        assert!((s.c + 1.1).abs() < 1e-15 && (s.d - 2.1).abs() < 1e-15);
        assert!(TestFunctionSpace::new(0.0, 1.0, -0.9, 2.1, vec![], vec![]).is_err());
        assert!(TestFunctionSpace::new(0.0, 1.0, -1.5, 2.5, vec![], vec![(0.0, 3.0)]).is_err());
        assert_eq!(s.truncated(3).functions.len(), 3);
    }

    #[test]
    fn seminorm_of_monomial() {
        assert!((TestFunctionSpace::seminorm(|t| t * t - 0.5, (0.0, 1.0)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn coefficients_match_binomial_gamma_form() {
        let c = SeriesCoefficients::new(half(), 0.0, lv(4)).unwrap();
        // (alpha choose i) = (-1)^(i-1) alpha Gamma(i - alpha) / (Gamma(1 - alpha) Gamma(i + 1)).
        for i in 1..=4 {
            let sign = if (i - 1) % 2 == 0 { 1.0 } else { -1.0 };
            let fi = i as f64;
            let b = sign * 0.5 * gamma(fi - 0.5).unwrap() / (gamma(0.5).unwrap() * gamma(fi + 1.0).unwrap());
            let expected = b / gamma(fi + 0.5).unwrap();
            assert!((c.prefactors()[i] - expected).abs() < 1e-14, "{i}");
        }
        assert_eq!(c.value(0, 0.0), f64::INFINITY);
        assert_eq!(c.value(1, 0.0), 0.0);
    }

    #[test]
    fn coefficient_derivatives_match_differences() {
        let c = SeriesCoefficients::new(FractionalOrder::new(0.3).unwrap(), 0.2, lv(3)).unwrap();
        let (t, e) = (0.7, 1e-6);
        for i in 0..=3 {
            let fd = (c.value(i, t + e) - c.value(i, t - e)) / (2.0 * e);
            assert!((c.derivative(i, 1, t) - fd).abs() < 1e-7 * (1.0 + fd.abs()), "{i}");
        }
    }

    #[test]
    fn left_series_of_zero_and_of_line() {
        let grid = make_uniform_grid(0.0, 1.0, 8).unwrap();
        let z = series_left_derivative(&AnalyticFunction::zero(), half(), lv(3), &grid).unwrap();
        assert!(z.values.values().iter().all(|&x| x == 0.0));
        let s = series_left_derivative(&presets::power(0.0, 1), half(), lv(1), &grid).unwrap();
        assert!((s.values.last() - 2.0 / PI.sqrt()).abs() < 1e-14);
        assert!(!s.flags.endpoint_divergence);
    }

    #[test]
    fn left_series_flags_nonzero_anchor() {
        let grid = make_uniform_grid(0.0, 1.0, 8).unwrap();
        let s = series_left_derivative(&AnalyticFunction::constant(1.0), half(), lv(2), &grid).unwrap();
        assert_eq!(s.values.first(), f64::INFINITY);
        assert!(s.flags.endpoint_divergence);
    }

    #[test]
    fn left_series_rejects_missing_derivatives() {
        let grid = make_uniform_grid(0.0, 1.0, 8).unwrap();
        let f = AnalyticFunction::new(2, |k, t| if k == 0 { t } else if k == 1 { 1.0 } else { 0.0 });
        assert!(matches!(series_left_derivative(&f, half(), lv(3), &grid), Err(FracError::TruncationTooHigh { .. })));
    }

    #[test]
    fn right_sum_of_zero_and_hypothesis_warning() {
        let grid = make_uniform_grid(0.0, 1.0, 8).unwrap();
        let z = series_right_partial_sum(&AnalyticFunction::zero(), half(), lv(3), &grid).unwrap();
        assert!(z.values.values().iter().all(|&x| x == 0.0) && !z.flags.precondition_violated);
        let w = series_right_partial_sum(&presets::power(0.0, 1), half(), lv(2), &grid).unwrap();
        assert!(w.flags.precondition_violated);
        let ok = series_right_partial_sum(&presets::vanishing_factor(1.0, 6), half(), lv(4), &grid).unwrap();
        assert!(!ok.flags.precondition_violated);
    }

    #[test]
    fn right_sum_matches_direct_differentiation() {
        // (-d/dt)(F c_1) for F = (1 - t)^3 at t = 0.4, by hand.
        let f = presets::vanishing_factor(1.0, 3);
        let grid = make_uniform_grid(0.0, 1.0, 5).unwrap();
        let s = series_right_partial_sum(&f, half(), lv(1), &grid).unwrap();
        let c = SeriesCoefficients::new(half(), 0.0, lv(1)).unwrap();
        let t: f64 = 0.4;
        let fv = (1.0 - t).powi(3);
        let fd = -3.0 * (1.0 - t).powi(2);
        let expected = fv * c.value(0, t) - (fd * c.value(1, t) + fv * c.derivative(1, 1, t));
        assert!((s.values.values()[2] - expected).abs() < 1e-14);
    }

    #[test]
    fn approximated_lagrangian_of_identity_in_v() {
        let l = Lagrangian::new(|_, _, v| v, |_, _, _| 0.0, |_, _, _| 0.0, |_, _, _| 1.0);
        let u = presets::damped_sine();
        let al = approximated_lagrangian(&l, half(), lv(4), &u, 0.0).unwrap();
        let t = 0.6;
        for i in 1..=4 {
            assert_eq!(al.partial_derivative(i, t), al.coefficients().value(i, t));
        }
        assert_eq!(al.value(t), al.truncated_derivative(t));
        assert_eq!(al.partial_state(t), al.coefficients().value(0, t));
    }

    #[test]
    fn approximated_oscillator_lagrangian_on_a_line() {
        let l = presets::oscillator_lagrangian(2.0);
        let al = approximated_lagrangian(&l, half(), lv(1), &presets::power(0.0, 1), 0.0).unwrap();
        let t: f64 = 0.3;
        // S_1 t = t^(1/2) / Gamma(1/2) + (1/2) t^(1/2) / Gamma(3/2) = 2 sqrt(t / pi).
        let s = 2.0 * (t / PI).sqrt();
        assert!((al.value(t) - (0.5 * s * s - 2.0 * t * t)).abs() < 1e-14);
        let z = approximated_lagrangian(&l, half(), lv(1), &AnalyticFunction::zero(), 0.0).unwrap();
        assert_eq!(z.value(t), l.value(t, 0.0, 0.0));
    }

    #[test]
    fn el_n_without_dependence_on_v_is_the_state_partial() {
        let l = Lagrangian::new(|_, u, _| u * u, |_, _, _| 0.0, |_, u, _| 2.0 * u, |_, _, _| 0.0);
        let grid = make_uniform_grid(0.0, 1.0, 16).unwrap();
        let u = presets::damped_sine();
        let r = el_n_residual(&l, half(), lv(3), &u, &grid).unwrap();
        for k in 1..=16 {
            assert!((r.values.values()[k] - 2.0 * u.value(grid.node(k))).abs() < 1e-14);
        }
    }

    #[test]
    fn el_zero_level_closed_form() {
        let l = presets::oscillator_lagrangian(1.5);
        let grid = make_uniform_grid(0.0, 1.0, 16).unwrap();
        let u = presets::damped_sine();
        let r = el_n_residual(&l, half(), lv(0), &u, &grid).unwrap();
        for k in 1..=16 {
            let t = grid.node(k);
            let c0 = t.powf(-0.5) / PI.sqrt();
            let s = c0 * u.value(t);
            let expected = -2.25 * u.value(t) + s * c0;
            assert!((r.values.values()[k] - expected).abs() < 1e-12 * (1.0 + expected.abs()), "{k}");
        }
    }

    #[test]
    fn zero_field_gives_zero_criterion_and_conservation_law() {
        let grid = make_uniform_grid(0.0, 1.0, 16).unwrap();
        let l = presets::oscillator_lagrangian(1.0);
        let u = presets::damped_sine();
        let r = prolonged_criterion_residual(&l, half(), lv(3), &VectorField::zero(), &u, &grid).unwrap();
        assert!(r.values.values().iter().all(|&x| x == 0.0));
        let c = cl_n_series(&l, half(), lv(3), &VectorField::zero(), &u, &grid).unwrap();
        assert!(c.values.values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn criterion_for_identity_lagrangian_regroups() {
        // L = v, tau = 2, xi = 0: tau sum_i c_i' u^(i) is the regrouped sum.
        let l = Lagrangian::new(|_, _, v| v, |_, _, _| 0.0, |_, _, _| 0.0, |_, _, _| 1.0);
        let grid = make_uniform_grid(0.0, 1.0, 16).unwrap();
        let u = presets::damped_sine();
        let r = prolonged_criterion_residual(&l, half(), lv(5), &VectorField::constant(2.0, 0.0), &u, &grid).unwrap();
        let c = &r.coefficients;
        for k in 1..=16 {
            let t = grid.node(k);
            let expected: f64 = 2.0 * (0..=5).map(|i| c.prefactors()[i] * (i as f64 - 0.5) * t.powf(i as f64 - 1.5) * u.derivative(i, t)).sum::<f64>();
            assert!((r.values.values()[k] - expected).abs() < 1e-11 * (1.0 + expected.abs()), "{k}");
        }
    }

    #[test]
    fn general_field_matches_constant_path() {
        // The same constant generator through the differencing path.
        let v = VectorField::new(|_, _| 1.0, |_, _| 0.5, |_, _| 0.0, |_, _| 0.0, |_, _| 0.0, |_, _| 0.0);
        assert!(v.constant_coefficients().is_none());
        let l = presets::oscillator_lagrangian(1.0);
        let grid = make_uniform_grid(0.0, 1.0, 16).unwrap();
        let u = presets::case_b_polynomial();
        let exact = prolonged_criterion_residual(&l, half(), lv(4), &VectorField::constant(1.0, 0.5), &u, &grid).unwrap();
        let fd = prolonged_criterion_residual(&l, half(), lv(4), &v, &u, &grid).unwrap();
        for k in 1..=16 {
            let (x, y) = (exact.values.values()[k], fd.values.values()[k]);
            assert!((x - y).abs() < 1e-6 * (1.0 + x.abs()), "{k}: {x} {y}");
        }
    }

    #[test]
    fn coefficient_tables_are_shared() {
        let grid = make_uniform_grid(0.0, 1.0, 16).unwrap();
        let l = presets::oscillator_lagrangian(1.0);
        let u = presets::case_b_polynomial();
        let s = series_left_derivative(&u, half(), lv(3), &grid).unwrap().coefficients;
        let r = series_right_partial_sum(&u, half(), lv(3), &grid).unwrap().coefficients;
        let e = el_n_residual(&l, half(), lv(3), &u, &grid).unwrap().coefficients;
        let p = prolonged_criterion_residual(&l, half(), lv(3), &presets::time_translation(), &u, &grid).unwrap().coefficients;
        let al = approximated_lagrangian(&l, half(), lv(3), &u, 0.0).unwrap();
        for c in [&r, &e, &p, al.coefficients()] {
            assert_eq!(&s, c);
            assert_eq!(s.table(&grid), c.table(&grid));
        }
    }

    #[test]
    fn weak_pairing_trivial_cases() {
        let grid = make_uniform_grid(0.0, 1.0, 10).unwrap();
        assert_eq!(weak_pairing(&SampledFunction::zeros(grid.clone()), &AnalyticFunction::constant(1.0)), 0.0);
        let one = SampledFunction::from_fn(grid, |_| 1.0);
        assert!((weak_pairing(&one, &AnalyticFunction::constant(1.0)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn graded_pairing_handles_inverse_square_root() {
        // int_0^1 t^-1/2 dt = 2.
        let v = pairing_closure(|t| t.powf(-0.5), &AnalyticFunction::constant(1.0), half(), 0.0, 1.0);
        assert!((v - 2.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn transfer_pairings_reject_nonzero_start() {
        let l = presets::weighted_oscillator_lagrangian(1.0, 1.0, 10);
        let u = AnalyticFunction::constant(1.0);
        let phi = AnalyticFunction::constant(1.0);
        assert!(pairing_el_n(&l, half(), lv(2), &u, &phi, 0.0, 1.0).is_err());
        assert!(pairing_right_partial_sum(&presets::power(0.0, 1), half(), lv(2), &phi, 0.0, 1.0).is_err());
    }

    #[test]
    fn increases_reports_offending_level() {
        let gap = |level, gap| WeakGap { claim: WeakClaim::Criterion, test_function: "1".into(), level, truncated: 0.0, limit: 0.0, gap };
        let s = WeakStudy { problem: "x", levels: vec![2, 4, 8], gaps: vec![gap(2, 1.0), gap(4, 0.5), gap(8, 0.7)], ic_seminorm: vec![] };
        assert_eq!(s.ladder(WeakClaim::Criterion, "1"), vec![1.0, 0.5, 0.7]);
        let inc = s.increases();
        assert!(inc.contains(&(WeakClaim::Criterion, "1".to_string(), 8)));
        // Missing entries for other claims are NaN and count as increases.
        assert!(inc.iter().any(|(c, _, _)| *c == WeakClaim::EulerLagrange));
    }
}
