//! Shared domain types: orders, grids, sampled and analytic functions,
//! Lagrangians, generators and group actions.

use std::fmt;
use std::sync::Arc;

use crate::error::{FracError, Result};

/// Order `alpha` of a fractional operator, restricted to `0 < alpha < 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha < 1.0 {
            Ok(Self(alpha))
        } else {
            Err(FracError::InvalidOrder(alpha))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for FractionalOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Uniform discretization of `[a, b]` into `n` subintervals.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    a: f64,
    b: f64,
    n: usize,
    h: f64,
    nodes: Vec<f64>,
}

pub type GridRef = Arc<TimeGrid>;

impl TimeGrid {
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a >= b {
            return Err(FracError::InvalidGrid(format!("need a < b, got [{a}, {b}]")));
        }
        if n < 2 {
            return Err(FracError::InvalidGrid(format!("need n >= 2, got {n}")));
        }
        let h = (b - a) / n as f64;
        let mut nodes: Vec<f64> = (0..=n).map(|k| a + k as f64 * h).collect();
        nodes[n] = b;
        Ok(Self { a, b, n, h, nodes })
    }

    #[inline]
    pub fn a(&self) -> f64 {
        self.a
    }
    #[inline]
    pub fn b(&self) -> f64 {
        self.b
    }
    /// Number of subintervals.
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }
    #[inline]
    pub fn h(&self) -> f64 {
        self.h
    }
    #[inline]
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
    #[inline]
    pub fn node(&self, k: usize) -> f64 {
        self.nodes[k]
    }
    pub fn len(&self) -> usize {
        self.n + 1
    }
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the node equal to `t` up to a small multiple of the spacing.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let x = (t - self.a) / self.h;
        let k = x.round();
        if k < 0.0 || k > self.n as f64 || (x - k).abs() > 1e-8 {
            return Err(FracError::NotOnGrid(t));
        }
        Ok(k as usize)
    }

    /// Grid over nodes `lo..=hi` of this grid, with the same spacing.
    pub fn subgrid(&self, lo: usize, hi: usize) -> Result<TimeGrid> {
        if hi > self.n || lo + 2 > hi {
            return Err(FracError::InvalidGrid(format!(
                "subgrid {lo}..={hi} of a grid with n = {}",
                self.n
            )));
        }
        Ok(TimeGrid {
            a: self.nodes[lo],
            b: self.nodes[hi],
            n: hi - lo,
            h: self.h,
            nodes: self.nodes[lo..=hi].to_vec(),
        })
    }

    /// Same node set, compared by endpoints and resolution.
    pub fn same_as(&self, other: &TimeGrid) -> bool {
        self.n == other.n && self.a == other.a && self.b == other.b
    }
}

/// Uniform grid of `n` subintervals on `[a, b]`.
pub fn make_uniform_grid(a: f64, b: f64, n: usize) -> Result<GridRef> {
    TimeGrid::uniform(a, b, n).map(Arc::new)
}

/// Node-aligned subinterval `[A, B]` of a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubInterval {
    pub start: f64,
    pub end: f64,
    pub start_index: usize,
    pub end_index: usize,
}

impl SubInterval {
    pub fn on_grid(grid: &TimeGrid, start: f64, end: f64) -> Result<Self> {
        if start >= end {
            return Err(FracError::InvalidSubInterval(format!("[{start}, {end}] is empty")));
        }
        let start_index = grid.index_of(start)?;
        let end_index = grid.index_of(end)?;
        Ok(Self {
            start: grid.node(start_index),
            end: grid.node(end_index),
            start_index,
            end_index,
        })
    }

    pub fn whole(grid: &TimeGrid) -> Self {
        Self { start: grid.a(), end: grid.b(), start_index: 0, end_index: grid.n() }
    }
}

/// Values of a real function on the nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: GridRef,
    values: Vec<f64>,
    boundary: Option<(f64, f64)>,
}

impl SampledFunction {
    pub fn new(grid: GridRef, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(FracError::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        Ok(Self { grid, values, boundary: None })
    }

    pub fn from_fn(grid: GridRef, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().iter().map(|&t| f(t)).collect();
        Self { grid, values, boundary: None }
    }

    pub fn zeros(grid: GridRef) -> Self {
        let values = vec![0.0; grid.len()];
        Self { grid, values, boundary: None }
    }

    /// Attach boundary data `u(a) = a0`, `u(b) = b0`; both must match the samples exactly.
    pub fn with_boundary(mut self, a0: f64, b0: f64) -> Result<Self> {
        let n = self.grid.n();
        for (t, value, sample) in [(self.grid.a(), a0, self.values[0]), (self.grid.b(), b0, self.values[n])] {
            if value != sample {
                return Err(FracError::BoundaryMismatch { t, value, sample });
            }
        }
        self.boundary = Some((a0, b0));
        Ok(self)
    }

    #[inline]
    pub fn grid(&self) -> &GridRef {
        &self.grid
    }
    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
    #[inline]
    pub fn boundary(&self) -> Option<(f64, f64)> {
        self.boundary
    }
    #[inline]
    pub fn first(&self) -> f64 {
        self.values[0]
    }
    #[inline]
    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn ensure_same_grid(&self, other: &SampledFunction) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(FracError::GridMismatch)
        }
    }

    /// Restriction to nodes `lo..=hi`.
    pub fn restrict(&self, lo: usize, hi: usize) -> Result<SampledFunction> {
        let grid = Arc::new(self.grid.subgrid(lo, hi)?);
        Ok(SampledFunction { grid, values: self.values[lo..=hi].to_vec(), boundary: None })
    }

    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> SampledFunction {
        let values = self.grid.nodes().iter().zip(&self.values).map(|(&t, &v)| f(t, v)).collect();
        SampledFunction { grid: self.grid.clone(), values, boundary: None }
    }

    pub fn linear_combination(&self, c1: f64, other: &SampledFunction, c2: f64) -> Result<SampledFunction> {
        self.ensure_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(x, y)| c1 * x + c2 * y).collect();
        Ok(SampledFunction { grid: self.grid.clone(), values, boundary: None })
    }

    /// Max of `|values[k]|` over `range`, ignoring non-finite entries.
    pub fn max_abs_on(&self, range: std::ops::Range<usize>) -> f64 {
        self.values[range].iter().filter(|v| v.is_finite()).fold(0.0, |m, v| m.max(v.abs()))
    }
}

type DerivFn = dyn Fn(usize, f64) -> f64 + Send + Sync;

/// A function given by closed-form derivatives of every order up to `max_order`.
#[derive(Clone)]
pub struct AnalyticFunction {
    eval: Arc<DerivFn>,
    max_order: usize,
}

impl fmt::Debug for AnalyticFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticFunction").field("max_order", &self.max_order).finish()
    }
}

impl AnalyticFunction {
    /// `eval(k, t)` must return the `k`-th derivative at `t` for `k <= max_order`.
    pub fn new(max_order: usize, eval: impl Fn(usize, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { eval: Arc::new(eval), max_order }
    }

    #[inline]
    pub fn max_order(&self) -> usize {
        self.max_order
    }

    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        (self.eval)(0, t)
    }

    /// `k`-th derivative. Panics when `k` exceeds `max_order`.
    #[inline]
    pub fn derivative(&self, k: usize, t: f64) -> f64 {
        assert!(k <= self.max_order, "derivative order {k} > max_order {}", self.max_order);
        (self.eval)(k, t)
    }

    pub fn sample(&self, grid: &GridRef) -> SampledFunction {
        SampledFunction::from_fn(grid.clone(), |t| self.value(t))
    }

    pub fn sample_derivative(&self, k: usize, grid: &GridRef) -> SampledFunction {
        SampledFunction::from_fn(grid.clone(), |t| self.derivative(k, t))
    }

    pub fn zero() -> Self {
        Self::new(usize::MAX, |_, _| 0.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(usize::MAX, move |k, _| if k == 0 { c } else { 0.0 })
    }

    /// Polynomial `sum_j coeffs[j] (t - center)^j`.
    pub fn polynomial(center: f64, coeffs: Vec<f64>) -> Self {
        Self::new(usize::MAX, move |k, t| {
            let x = t - center;
            let mut acc = 0.0;
            for j in (k..coeffs.len()).rev() {
                let mut falling = 1.0;
                for m in 0..k {
                    falling *= (j - m) as f64;
                }
                acc = acc * x + falling * coeffs[j];
            }
            acc
        })
    }

    /// `scale * exp(rate * (t - center))`.
    pub fn exponential(scale: f64, rate: f64, center: f64) -> Self {
        Self::new(usize::MAX, move |k, t| scale * rate.powi(k as i32) * (rate * (t - center)).exp())
    }

    /// `amplitude * sin(freq * t + phase)`.
    pub fn sine(amplitude: f64, freq: f64, phase: f64) -> Self {
        Self::new(usize::MAX, move |k, t| {
            let shift = k as f64 * std::f64::consts::FRAC_PI_2;
            amplitude * freq.powi(k as i32) * (freq * t + phase + shift).sin()
        })
    }

    /// Product by the Leibniz rule.
    pub fn product(&self, other: &AnalyticFunction) -> AnalyticFunction {
        let (f, g) = (self.clone(), other.clone());
        let max_order = self.max_order.min(other.max_order);
        Self::new(max_order, move |k, t| {
            let mut binom = 1.0;
            let mut acc = 0.0;
            for j in 0..=k {
                acc += binom * f.derivative(j, t) * g.derivative(k - j, t);
                binom = binom * (k - j) as f64 / (j + 1) as f64;
            }
            acc
        })
    }

    pub fn sum(&self, other: &AnalyticFunction) -> AnalyticFunction {
        let (f, g) = (self.clone(), other.clone());
        Self::new(self.max_order.min(other.max_order), move |k, t| f.derivative(k, t) + g.derivative(k, t))
    }

    pub fn scaled(&self, c: f64) -> AnalyticFunction {
        let f = self.clone();
        Self::new(self.max_order, move |k, t| c * f.derivative(k, t))
    }

    /// Largest forward-difference inconsistency between the value and the first
    /// derivative over the grid interior, divided by `h`.
    pub fn derivative_consistency(&self, grid: &TimeGrid) -> f64 {
        let h = grid.h();
        (1..grid.n())
            .map(|k| {
                let t = grid.node(k);
                let fd = (self.value(t + h) - self.value(t)) / h;
                (fd - self.derivative(1, t)).abs() / h
            })
            .fold(0.0, f64::max)
    }
}

type Fn3 = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;
type Fn2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

fn fd_step(x: f64) -> f64 {
    1e-6 * x.abs().max(1.0)
}

/// Lagrangian `L(t, u, v)` where `v` stands for the left RL derivative of `u`,
/// with its three partial derivatives.
#[derive(Clone)]
pub struct Lagrangian {
    value: Fn3,
    d1: Fn3,
    d2: Fn3,
    d3: Fn3,
    fd_partials: bool,
}

impl fmt::Debug for Lagrangian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Lagrangian").field("fd_partials", &self.fd_partials).finish()
    }
}

impl Lagrangian {
    pub fn new(
        value: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        d1: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        d2: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        d3: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { value: Arc::new(value), d1: Arc::new(d1), d2: Arc::new(d2), d3: Arc::new(d3), fd_partials: false }
    }

    /// Partials by central differences with step `1e-6 max(1, |x|)`; flagged.
    pub fn from_value(value: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        let value: Fn3 = Arc::new(value);
        let (l1, l2, l3) = (value.clone(), value.clone(), value.clone());
        Self {
            value,
            d1: Arc::new(move |t, u, v| {
                let s = fd_step(t);
                (l1(t + s, u, v) - l1(t - s, u, v)) / (2.0 * s)
            }),
            d2: Arc::new(move |t, u, v| {
                let s = fd_step(u);
                (l2(t, u + s, v) - l2(t, u - s, v)) / (2.0 * s)
            }),
            d3: Arc::new(move |t, u, v| {
                let s = fd_step(v);
                (l3(t, u, v + s) - l3(t, u, v - s)) / (2.0 * s)
            }),
            fd_partials: true,
        }
    }

    #[inline]
    pub fn value(&self, t: f64, u: f64, v: f64) -> f64 {
        (self.value)(t, u, v)
    }
    #[inline]
    pub fn d1(&self, t: f64, u: f64, v: f64) -> f64 {
        (self.d1)(t, u, v)
    }
    #[inline]
    pub fn d2(&self, t: f64, u: f64, v: f64) -> f64 {
        (self.d2)(t, u, v)
    }
    #[inline]
    pub fn d3(&self, t: f64, u: f64, v: f64) -> f64 {
        (self.d3)(t, u, v)
    }

    pub fn uses_fd_partials(&self) -> bool {
        self.fd_partials
    }

    /// `c * L` with scaled partials.
    pub fn scaled(&self, c: f64) -> Lagrangian {
        let (l, l1, l2, l3) = (self.value.clone(), self.d1.clone(), self.d2.clone(), self.d3.clone());
        Lagrangian {
            value: Arc::new(move |t, u, v| c * l(t, u, v)),
            d1: Arc::new(move |t, u, v| c * l1(t, u, v)),
            d2: Arc::new(move |t, u, v| c * l2(t, u, v)),
            d3: Arc::new(move |t, u, v| c * l3(t, u, v)),
            fd_partials: self.fd_partials,
        }
    }

    /// Largest disagreement between the supplied partials and central
    /// differences of the value, over the given sample points.
    pub fn audit_partials(&self, points: &[(f64, f64, f64)]) -> f64 {
        let fd = Lagrangian::from_value({
            let l = self.value.clone();
            move |t, u, v| l(t, u, v)
        });
        points
            .iter()
            .map(|&(t, u, v)| {
                let e1 = (self.d1(t, u, v) - fd.d1(t, u, v)).abs();
                let e2 = (self.d2(t, u, v) - fd.d2(t, u, v)).abs();
                let e3 = (self.d3(t, u, v) - fd.d3(t, u, v)).abs();
                e1.max(e2).max(e3)
            })
            .fold(0.0, f64::max)
    }
}

/// Infinitesimal generator `tau(t, u) d/dt + xi(t, u) d/du` with first partials.
#[derive(Clone)]
pub struct VectorField {
    tau: Fn2,
    xi: Fn2,
    tau_t: Fn2,
    tau_u: Fn2,
    xi_t: Fn2,
    xi_u: Fn2,
    constant: Option<(f64, f64)>,
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VectorField").field("constant", &self.constant).finish()
    }
}

impl VectorField {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        tau: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        xi: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        tau_t: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        tau_u: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        xi_t: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        xi_u: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            tau: Arc::new(tau),
            xi: Arc::new(xi),
            tau_t: Arc::new(tau_t),
            tau_u: Arc::new(tau_u),
            xi_t: Arc::new(xi_t),
            xi_u: Arc::new(xi_u),
            constant: None,
        }
    }

    /// Constant coefficients `tau d/dt + xi d/du`.
    pub fn constant(tau: f64, xi: f64) -> Self {
        let mut field = Self::new(move |_, _| tau, move |_, _| xi, |_, _| 0.0, |_, _| 0.0, |_, _| 0.0, |_, _| 0.0);
        field.constant = Some((tau, xi));
        field
    }

    pub fn zero() -> Self {
        Self::constant(0.0, 0.0)
    }

    /// `(tau, xi)` when both coefficients are constants.
    pub fn constant_coefficients(&self) -> Option<(f64, f64)> {
        self.constant
    }

    #[inline]
    pub fn tau(&self, t: f64, u: f64) -> f64 {
        (self.tau)(t, u)
    }
    #[inline]
    pub fn xi(&self, t: f64, u: f64) -> f64 {
        (self.xi)(t, u)
    }
    #[inline]
    pub fn tau_t(&self, t: f64, u: f64) -> f64 {
        (self.tau_t)(t, u)
    }
    #[inline]
    pub fn tau_u(&self, t: f64, u: f64) -> f64 {
        (self.tau_u)(t, u)
    }
    #[inline]
    pub fn xi_t(&self, t: f64, u: f64) -> f64 {
        (self.xi_t)(t, u)
    }
    #[inline]
    pub fn xi_u(&self, t: f64, u: f64) -> f64 {
        (self.xi_u)(t, u)
    }

    /// Total derivative of `tau` along a trajectory with slope `u_dot`.
    #[inline]
    pub fn tau_dot(&self, t: f64, u: f64, u_dot: f64) -> f64 {
        self.tau_t(t, u) + self.tau_u(t, u) * u_dot
    }

    /// Pointwise sum of two generators.
    pub fn add(&self, other: &VectorField) -> VectorField {
        let (p, q) = (self.clone(), other.clone());
        let pick = |f: fn(&VectorField, f64, f64) -> f64| {
            let (p, q) = (p.clone(), q.clone());
            move |t, u| f(&p, t, u) + f(&q, t, u)
        };
        let mut sum = VectorField::new(
            pick(VectorField::tau),
            pick(VectorField::xi),
            pick(VectorField::tau_t),
            pick(VectorField::tau_u),
            pick(VectorField::xi_t),
            pick(VectorField::xi_u),
        );
        if let (Some((t1, x1)), Some((t2, x2))) = (self.constant, other.constant) {
            sum.constant = Some((t1 + t2, x1 + x2));
        }
        sum
    }

    /// Largest disagreement between supplied partials and central differences.
    pub fn audit_partials(&self, points: &[(f64, f64)]) -> f64 {
        points
            .iter()
            .map(|&(t, u)| {
                let st = fd_step(t);
                let su = fd_step(u);
                let dt = |f: &Fn2| (f(t + st, u) - f(t - st, u)) / (2.0 * st);
                let du = |f: &Fn2| (f(t, u + su) - f(t, u - su)) / (2.0 * su);
                [
                    (self.tau_t(t, u) - dt(&self.tau)).abs(),
                    (self.tau_u(t, u) - du(&self.tau)).abs(),
                    (self.xi_t(t, u) - dt(&self.xi)).abs(),
                    (self.xi_u(t, u) - du(&self.xi)).abs(),
                ]
                .into_iter()
                .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

type GroupMap = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Local one-parameter group `(t, u) -> (Xi_eta(t, u), Psi_eta(t, u))`.
#[derive(Clone)]
pub struct OneParameterGroup {
    time_map: GroupMap,
    state_map: GroupMap,
}

impl fmt::Debug for OneParameterGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("OneParameterGroup")
    }
}

impl OneParameterGroup {
    /// Maps take `(eta, t, u)`.
    pub fn new(
        time_map: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        state_map: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { time_map: Arc::new(time_map), state_map: Arc::new(state_map) }
    }

    pub fn element(&self, eta: f64) -> GroupElement {
        GroupElement { eta, time_map: self.time_map.clone(), state_map: self.state_map.clone() }
    }
}

/// Group element `g_eta`.
#[derive(Clone)]
pub struct GroupElement {
    eta: f64,
    time_map: GroupMap,
    state_map: GroupMap,
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupElement").field("eta", &self.eta).finish()
    }
}

impl GroupElement {
    #[inline]
    pub fn eta(&self) -> f64 {
        self.eta
    }
    /// Transformed time `Xi_eta(t, u)`.
    #[inline]
    pub fn time(&self, t: f64, u: f64) -> f64 {
        (self.time_map)(self.eta, t, u)
    }
    /// Transformed state `Psi_eta(t, u)`.
    #[inline]
    pub fn state(&self, t: f64, u: f64) -> f64 {
        (self.state_map)(self.eta, t, u)
    }
}

/// Numerical conditions worth surfacing alongside a result.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NumericalFlags {
    /// A value at a singular endpoint diverges.
    pub endpoint_divergence: bool,
    /// Partial derivatives came from the finite-difference fallback.
    pub fd_partials: bool,
    /// A theorem hypothesis or precondition does not hold for the inputs.
    pub precondition_violated: bool,
    /// Linear system condition estimate above 1e12.
    pub ill_conditioned: bool,
}

impl NumericalFlags {
    pub fn merge(self, other: NumericalFlags) -> NumericalFlags {
        NumericalFlags {
            endpoint_divergence: self.endpoint_divergence || other.endpoint_divergence,
            fd_partials: self.fd_partials || other.fd_partials,
            precondition_violated: self.precondition_violated || other.precondition_violated,
            ill_conditioned: self.ill_conditioned || other.ill_conditioned,
        }
    }

    pub fn any(&self) -> bool {
        self.endpoint_divergence || self.fd_partials || self.precondition_violated || self.ill_conditioned
    }
}

/// A sampled result with its flags and any diagnostic notes.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub values: SampledFunction,
    pub flags: NumericalFlags,
    pub notes: Vec<String>,
}

impl Evaluation {
    pub fn clean(values: SampledFunction) -> Self {
        Self { values, flags: NumericalFlags::default(), notes: Vec::new() }
    }
}
