//! One module per subcommand. Each turns a config into a [`Report`].

mod approx;
mod deriv;
mod el;
mod identity;
mod noether;
mod oscillator;
mod symmetry;

use std::fmt;

use fracvar_core::error::FracError;
use fracvar_core::types::{make_uniform_grid, FractionalOrder, GridRef, Lagrangian, SubInterval, TimeGrid};

use crate::config::{Command, ExperimentConfig, ValidationError};
use crate::output::Report;
use crate::presets;

/// Residuals and errors at or below this count as converged to roundoff.
pub const ROUNDOFF_FLOOR: f64 = 1e-12;

#[derive(Debug)]
pub enum RunError {
    Invalid(ValidationError),
    Numerical(String),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Invalid(e) => write!(f, "invalid input: {e}"),
            RunError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ValidationError> for RunError {
    fn from(e: ValidationError) -> Self {
        RunError::Invalid(e)
    }
}

impl From<FracError> for RunError {
    fn from(e: FracError) -> Self {
        match e {
            FracError::SingularSystem => RunError::Numerical(e.to_string()),
            other => RunError::Invalid(ValidationError(other.to_string())),
        }
    }
}

pub type Result<T> = std::result::Result<T, RunError>;

pub fn execute(command: Command, cfg: &ExperimentConfig) -> Result<Report> {
    match command {
        Command::Deriv => deriv::run(cfg),
        Command::Identity => identity::run(cfg),
        Command::El => el::run(cfg),
        Command::Symmetry => symmetry::run(cfg),
        Command::Noether => noether::run(cfg),
        Command::Approx => approx::run(cfg),
        Command::Oscillator => oscillator::run(cfg),
    }
}

fn reject(msg: impl Into<String>) -> RunError {
    RunError::Invalid(ValidationError(msg.into()))
}

fn order(x: f64) -> Result<FractionalOrder> {
    FractionalOrder::new(x).map_err(|_| reject(format!("alpha must lie in (0, 1), got {x}")))
}

fn alpha_of(cfg: &ExperimentConfig) -> Result<FractionalOrder> {
    order(cfg.alpha.unwrap_or(0.5))
}

/// `alphas` if given, else `[alpha]`, else `default`.
fn alphas_of(cfg: &ExperimentConfig, default: &[f64]) -> Result<Vec<FractionalOrder>> {
    let list = match (&cfg.alphas, cfg.alpha) {
        (Some(l), _) => l.clone(),
        (None, Some(a)) => vec![a],
        (None, None) => default.to_vec(),
    };
    if list.is_empty() {
        return Err(reject("alphas must not be empty"));
    }
    list.into_iter().map(order).collect()
}

fn check_n(n: usize, min: usize) -> Result<usize> {
    if n < min {
        return Err(reject(format!("n must be at least {min}, got {n}")));
    }
    Ok(n)
}

fn n_of(cfg: &ExperimentConfig, default: usize, min: usize) -> Result<usize> {
    check_n(cfg.n.unwrap_or(default), min)
}

/// `ns` if given, else `[n]`, else `default`; strictly increasing.
fn ns_of(cfg: &ExperimentConfig, default: &[usize], min: usize) -> Result<Vec<usize>> {
    let list = match (&cfg.ns, cfg.n) {
        (Some(l), _) => l.clone(),
        (None, Some(n)) => vec![n],
        (None, None) => default.to_vec(),
    };
    if list.is_empty() || list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(reject(format!("ns must be non-empty and strictly increasing, got {list:?}")));
    }
    list.into_iter().map(|n| check_n(n, min)).collect()
}

fn interval_of(cfg: &ExperimentConfig) -> Result<(f64, f64)> {
    let [a, b] = cfg.interval.unwrap_or([0.0, 1.0]);
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(reject(format!("interval must be finite with a < b, got [{a}, {b}]")));
    }
    Ok((a, b))
}

fn grid(a: f64, b: f64, n: usize) -> Result<GridRef> {
    Ok(make_uniform_grid(a, b, n)?)
}

/// The configured study, checked against the allowed names; the first is the default.
fn study_of<'a>(cfg: &'a ExperimentConfig, allowed: &[&'a str]) -> Result<&'a str> {
    match cfg.study.as_deref() {
        None => Ok(allowed[0]),
        Some(s) if allowed.contains(&s) => Ok(s),
        Some(s) => Err(reject(format!("unknown study {s:?}; expected one of {}", allowed.join(", ")))),
    }
}

fn positive(name: &str, x: f64) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(reject(format!("{name} must be positive and finite, got {x}")))
    }
}

/// Each step decreases strictly unless both ends are at the roundoff floor.
pub fn decreasing_to_floor(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1].abs() < w[0].abs() || w[0].abs().max(w[1].abs()) <= ROUNDOFF_FLOOR)
}

/// Strictly decreasing, no floor.
pub fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

/// Observed orders between consecutive grids; `inf` when both errors sit
/// at the roundoff floor.
pub fn observed_orders(ns: &[usize], errors: &[f64]) -> Vec<f64> {
    ns.windows(2)
        .zip(errors.windows(2))
        .map(|(n, e)| {
            if e[0].abs().max(e[1].abs()) <= ROUNDOFF_FLOOR {
                f64::INFINITY
            } else {
                (e[0].abs() / e[1].abs()).ln() / (n[1] as f64 / n[0] as f64).ln()
            }
        })
        .collect()
}

fn omega_of(cfg: &ExperimentConfig) -> Result<f64> {
    let w = cfg.omega.unwrap_or(1.0);
    if !(w >= 0.0 && w.is_finite()) {
        return Err(reject(format!("omega must be finite and non-negative, got {w}")));
    }
    Ok(w)
}

fn lagrangian_of(cfg: &ExperimentConfig, name: &str, b: f64) -> Result<Lagrangian> {
    Ok(presets::lagrangian(name, omega_of(cfg)?, cfg.coefficients, b)?)
}

fn window_of(cfg: &ExperimentConfig, grid: &TimeGrid, a: f64, b: f64) -> Result<SubInterval> {
    let [lo, hi] = cfg.window.unwrap_or([a + 0.25 * (b - a), a + 0.75 * (b - a)]);
    Ok(SubInterval::on_grid(grid, lo, hi)?)
}

/// Max of `|x|` over interior nodes `1..len-1`.
fn interior_max(values: &[f64]) -> f64 {
    values[1..values.len() - 1].iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_treats_roundoff_as_converged() {
        assert!(decreasing_to_floor(&[1e-3, 1e-4, 3e-14, 5e-14]));
        assert!(!decreasing_to_floor(&[1e-3, 2e-3]));
        assert_eq!(observed_orders(&[8, 16], &[1e-14, 2e-14]), vec![f64::INFINITY]);
        assert!((observed_orders(&[8, 16], &[4.0, 1.0])[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn study_names_are_checked() {
        let cfg = ExperimentConfig { study: Some("nope".into()), ..Default::default() };
        assert!(study_of(&cfg, &["a", "b"]).is_err());
        assert_eq!(study_of(&ExperimentConfig::default(), &["a", "b"]).unwrap(), "a");
    }

    #[test]
    fn ladders_must_increase() {
        let cfg = ExperimentConfig { ns: Some(vec![64, 32]), ..Default::default() };
        assert!(ns_of(&cfg, &[16], 4).is_err());
        let cfg = ExperimentConfig { alpha: Some(1.5), ..Default::default() };
        assert!(alpha_of(&cfg).is_err());
    }
}
