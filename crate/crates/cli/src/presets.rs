//! Name tables for the presets a config can refer to.

use fracvar_core::presets as p;
use fracvar_core::special::gamma;
use fracvar_core::types::{AnalyticFunction, Lagrangian, OneParameterGroup, VectorField};

use crate::config::{invalid, ValidationError};

type Result<T> = std::result::Result<T, ValidationError>;

pub const FUNCTIONS: &[&str] =
    &["power-<k>", "t", "1-t", "sine", "damped-sine", "exp", "case-b-polynomial", "case-b-exponential", "zero"];
pub const LAGRANGIANS: &[&str] = &["oscillator", "t-free-quadratic", "t-explicit-quadratic", "weighted-oscillator", "custom-polynomial"];
pub const FIELDS: &[&str] = &["time-translation", "state-translation", "joint-translation", "zero"];

fn unknown<T>(kind: &str, name: &str, known: &[&str]) -> Result<T> {
    invalid(format!("unknown {kind} preset {name:?}; expected one of {}", known.join(", ")))
}

/// `k` in `power-k`.
fn power_degree(name: &str) -> Option<usize> {
    name.strip_prefix("power-")?.parse().ok().filter(|&k| k <= 12)
}

/// A trajectory or test function; `a` is the left end of the interval.
pub fn function(name: &str, a: f64) -> Result<AnalyticFunction> {
    if let Some(k) = power_degree(name) {
        return Ok(p::power(a, k));
    }
    Ok(match name {
        "t" => AnalyticFunction::polynomial(0.0, vec![0.0, 1.0]),
        "1-t" => AnalyticFunction::polynomial(0.0, vec![1.0, -1.0]),
        "sine" => AnalyticFunction::sine(1.0, 1.0, 0.0),
        "damped-sine" => p::damped_sine(),
        "exp" => AnalyticFunction::exponential(1.0, 1.0, 0.0),
        "case-b-polynomial" => p::case_b_polynomial(),
        "case-b-exponential" => p::case_b_exponential(),
        "zero" => AnalyticFunction::zero(),
        _ => return unknown("function", name, FUNCTIONS),
    })
}

/// Closed form of a left operator applied to `(t - a)^k`, if `name` is a power.
/// `order` is `alpha` for derivatives and `-alpha` for the integral.
pub fn power_rule(name: &str, a: f64, order: f64, caputo: bool) -> Option<impl Fn(f64) -> f64> {
    let k = power_degree(name)?;
    let zero = caputo && k == 0;
    let kf = k as f64;
    let c = if zero { 0.0 } else { gamma(kf + 1.0).ok()? / gamma(kf + 1.0 - order).ok()? };
    Some(move |t: f64| if zero { 0.0 } else { c * (t - a).powf(kf - order) })
}

pub fn lagrangian(name: &str, omega: f64, coefficients: Option<[f64; 6]>, b: f64) -> Result<Lagrangian> {
    Ok(match name {
        "oscillator" => p::oscillator_lagrangian(omega),
        "t-free-quadratic" => p::free_lagrangian(),
        "t-explicit-quadratic" => p::t_explicit_lagrangian(),
        "weighted-oscillator" => p::weighted_oscillator_lagrangian(omega, b, 10),
        "custom-polynomial" => match coefficients {
            Some(c) => p::polynomial_lagrangian(c),
            None => return invalid("custom-polynomial needs `coefficients` (six numbers)"),
        },
        _ => return unknown("lagrangian", name, LAGRANGIANS),
    })
}

pub fn field(name: &str) -> Result<VectorField> {
    Ok(match name {
        "time-translation" => p::time_translation(),
        "state-translation" => p::state_translation(),
        "joint-translation" => p::joint_translation(),
        "zero" => VectorField::zero(),
        _ => return unknown("field", name, FIELDS),
    })
}

/// The one-parameter group generated by a field preset.
pub fn group(name: &str) -> Result<OneParameterGroup> {
    Ok(match name {
        "time-translation" => p::time_translation_group(),
        "state-translation" => p::state_translation_group(),
        "joint-translation" => p::joint_translation_group(),
        "zero" => OneParameterGroup::new(|_, t, _| t, |_, _, u| u),
        _ => return unknown("field", name, FIELDS),
    })
}
