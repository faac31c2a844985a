use fracvar_core::diff::derivative2;
use fracvar_core::fracops::{apply_operator, OperatorKind};
use fracvar_core::noether::classical_limit_gap;
use fracvar_core::solver::{assemble_oscillator_system, solve_linear_system, LinearSolution, OscillatorProblem};
use fracvar_core::types::FractionalOrder;

use super::{
    alpha_of, alphas_of, grid, interior_max, lagrangian_of, n_of, ns_of, observed_orders, omega_of, strictly_decreasing,
    study_of, Result,
};
use crate::config::ExperimentConfig;
use crate::output::{Report, Table};
use crate::presets;

pub(super) fn solve(omega: f64, alpha: FractionalOrder, n: usize) -> Result<LinearSolution> {
    let p = OscillatorProblem::new(omega, alpha, n)?;
    Ok(solve_linear_system(&assemble_oscillator_system(&p)?)?)
}

/// `sin(omega t) / omega`, or `t` for the free particle.
fn classical(omega: f64, t: f64) -> f64 {
    if omega == 0.0 {
        t
    } else {
        (omega * t).sin() / omega
    }
}

fn solution_gap(sol: &LinearSolution, omega: f64) -> f64 {
    let g = sol.trajectory.grid();
    g.nodes().iter().zip(sol.trajectory.values()).map(|(&t, u)| (u - classical(omega, t)).abs()).fold(0.0, f64::max)
}

pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    let study = study_of(cfg, &["solve", "classical-limits"])?;
    let omega = omega_of(cfg)?;
    if study == "classical-limits" {
        return classical_limits(cfg, omega);
    }
    let alpha = alpha_of(cfg)?;
    let ns = ns_of(cfg, &[1024], 16)?;
    let sols = ns.iter().map(|&n| solve(omega, alpha, n)).collect::<Result<Vec<_>>>()?;

    let first = &sols[0];
    let mut table = Table::new(&["t", "u", "classical"]);
    for (&t, &u) in first.trajectory.grid().nodes().iter().zip(first.trajectory.values()) {
        table.push(vec![t.into(), u.into(), classical(omega, t).into()]);
    }
    let mut r = Report::new(table);
    let u = first.trajectory.values();
    let h = first.trajectory.grid().h();
    r.set("ns", ns.clone());
    r.set_reals("conditions", &sols.iter().map(|s| s.condition).collect::<Vec<_>>());
    r.set_reals("relative_residuals", &sols.iter().map(|s| s.relative_residual).collect::<Vec<_>>());
    r.set_real("initial_value", u[0]);
    r.set_real("initial_slope", (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h));
    r.set_reals("classical_gaps", &sols.iter().map(|s| solution_gap(s, omega)).collect::<Vec<_>>());
    if sols.len() > 1 {
        // Successive differences on the coarser grid's nodes.
        let diffs: Vec<f64> = sols
            .windows(2)
            .zip(ns.windows(2))
            .map(|(s, n)| {
                let (c, f) = (s[0].trajectory.values(), s[1].trajectory.values());
                let stride = n[1] / n[0];
                (0..c.len()).map(|k| (c[k] - f[stride * k]).abs()).fold(0.0, f64::max)
            })
            .collect();
        r.set_reals("self_convergence", &diffs);
        r.set_reals("self_convergence_orders", &observed_orders(&ns[1..], &diffs));
    }
    for s in &sols {
        r.flag(s.flags.ill_conditioned, format!("condition estimate {:.3e} above limit", s.condition));
    }
    Ok(r)
}

/// The three order-one limits: left derivative against the central-difference
/// slope, conserved quantity against the classical Noether quantity, and
/// the oscillator solution against `sin(omega t)/omega`.
fn classical_limits(cfg: &ExperimentConfig, omega: f64) -> Result<Report> {
    let alphas = alphas_of(cfg, &[0.9, 0.99, 0.999])?;
    let n = n_of(cfg, 1024, 16)?;
    let gr = grid(0.0, 1.0, n)?;
    let u = presets::function(cfg.trajectory.as_deref().unwrap_or("damped-sine"), 0.0)?.sample(&gr);
    let l = lagrangian_of(cfg, cfg.preset.as_deref().unwrap_or("oscillator"), 1.0)?;
    let v = presets::field(cfg.field.as_deref().unwrap_or("time-translation"))?;

    let slope = derivative2(u.values(), gr.h());
    let mut derivative = Vec::new();
    let mut diverged = false;
    for &alpha in &alphas {
        let d = apply_operator(OperatorKind::LEFT_RL, alpha, &u)?;
        diverged |= d.flags.endpoint_divergence;
        let gap: Vec<f64> = d.values.values().iter().zip(&slope).map(|(x, y)| x - y).collect();
        derivative.push(interior_max(&gap));
    }
    let energy = classical_limit_gap(&l, &v, &u, &alphas)?;
    let solution = alphas.iter().map(|&a| Ok(solution_gap(&solve(omega, a, n)?, omega))).collect::<Result<Vec<f64>>>()?;

    let mut table = Table::new(&["part", "alpha", "gap"]);
    for (part, gaps) in [("derivative", &derivative), ("energy", &energy), ("solution", &solution)] {
        for (a, g) in alphas.iter().zip(gaps.iter()) {
            table.push(vec![part.into(), a.value().into(), (*g).into()]);
        }
    }
    let mut r = Report::new(table);
    r.set_reals("alphas", &alphas.iter().map(|a| a.value()).collect::<Vec<_>>());
    r.set_reals("derivative_gaps", &derivative);
    r.set_reals("energy_gaps", &energy);
    r.set_reals("solution_gaps", &solution);
    r.set("derivative_monotone", strictly_decreasing(&derivative));
    r.set("energy_monotone", strictly_decreasing(&energy));
    r.set("solution_monotone", strictly_decreasing(&solution));
    r.flag(diverged, "left derivative diverges at a");
    Ok(r)
}
