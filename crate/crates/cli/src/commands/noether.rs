use fracvar_core::noether::{conserved_quantity, constancy_check, ConservationForm};
use fracvar_core::types::{FractionalOrder, Lagrangian, SampledFunction, VectorField};

use super::oscillator::solve;
use super::{alpha_of, grid, interval_of, lagrangian_of, ns_of, omega_of, positive, reject, Result};
use crate::config::ExperimentConfig;
use crate::output::{Report, Table};
use crate::presets;

struct Run {
    drift: f64,
    mean: f64,
    passed: bool,
    threshold: f64,
    form_gap: f64,
    bulk_drift: f64,
    condition: f64,
    cl: SampledFunction,
    cl2: Vec<f64>,
    diverged: bool,
    ill_conditioned: bool,
}

/// Max deviation from the first value over nodes in the middle 80% of `[a, B]`.
fn bulk_drift(c: &SampledFunction) -> f64 {
    let g = c.grid();
    let (lo, hi) = (g.a() + 0.1 * (g.b() - g.a()), g.a() + 0.9 * (g.b() - g.a()));
    let bulk: Vec<f64> = g.nodes().iter().zip(c.values()).filter(|(t, _)| **t >= lo && **t <= hi).map(|(_, x)| *x).collect();
    bulk.iter().map(|x| (x - bulk[0]).abs()).fold(0.0, f64::max)
}

struct Setup {
    l: Lagrangian,
    v: VectorField,
    alpha: FractionalOrder,
    omega: f64,
    a: f64,
    b: f64,
    upper: f64,
    tol: f64,
}

fn trajectory(s: &Setup, name: &str, n: usize) -> Result<(SampledFunction, f64, bool)> {
    if name == "solved" {
        let sol = solve(s.omega, s.alpha, n)?;
        return Ok((sol.trajectory, sol.condition, sol.flags.ill_conditioned));
    }
    let g = grid(s.a, s.b, n)?;
    Ok((presets::function(name, s.a)?.sample(&g), f64::NAN, false))
}

fn evaluate(s: &Setup, u: &SampledFunction) -> Result<(fracvar_core::noether::ConservedQuantitySeries, Vec<f64>, f64)> {
    let cl = conserved_quantity(&s.l, s.alpha, &s.v, u, s.upper, ConservationForm::Cl)?;
    let cl2 = conserved_quantity(&s.l, s.alpha, &s.v, u, s.upper, ConservationForm::Cl2)?;
    let gap = cl.values.values().iter().zip(cl2.values.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    Ok((cl, cl2.values.into_values(), gap))
}

fn run_once(s: &Setup, name: &str, n: usize) -> Result<Run> {
    let (u, condition, ill_conditioned) = trajectory(s, name, n)?;
    let (cl, cl2, form_gap) = evaluate(s, &u)?;
    let c = constancy_check(&cl, s.tol);
    Ok(Run {
        drift: cl.drift,
        mean: cl.mean,
        passed: c.passed,
        threshold: c.threshold,
        form_gap,
        bulk_drift: bulk_drift(&cl.values),
        condition,
        diverged: cl.flags.endpoint_divergence,
        ill_conditioned,
        cl: cl.values,
        cl2,
    })
}

pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    let (a, b) = interval_of(cfg)?;
    let preset = cfg.preset.clone().unwrap_or_else(|| "oscillator".into());
    let traj = cfg.trajectory.clone().unwrap_or_else(|| "solved".into());
    if traj == "solved" && (preset != "oscillator" || (a, b) != (0.0, 1.0)) {
        return Err(reject("the solved trajectory is the oscillator extremal on [0, 1]; use preset oscillator"));
    }
    let s = Setup {
        l: lagrangian_of(cfg, &preset, b)?,
        v: presets::field(cfg.field.as_deref().unwrap_or("time-translation"))?,
        alpha: alpha_of(cfg)?,
        omega: omega_of(cfg)?,
        a,
        b,
        upper: cfg.upper.unwrap_or(b),
        tol: positive("tol", cfg.tol.unwrap_or(0.05))?,
    };
    let ns = ns_of(cfg, &[1024], 16)?;
    let runs = ns.iter().map(|&n| run_once(&s, &traj, n)).collect::<Result<Vec<Run>>>()?;

    let first = &runs[0];
    let mut table = Table::new(&["t", "C_cl", "C_cl2"]);
    for (k, (&t, &c)) in first.cl.grid().nodes().iter().zip(first.cl.values()).enumerate() {
        table.push(vec![t.into(), c.into(), first.cl2[k].into()]);
    }
    let mut r = Report::new(table);
    let pick = |f: fn(&Run) -> f64| runs.iter().map(f).collect::<Vec<f64>>();
    let drifts = pick(|x| x.drift);
    r.set("ns", ns.clone());
    r.set_reals("drifts", &drifts);
    r.set_reals("means", &pick(|x| x.mean));
    r.set_reals("thresholds", &pick(|x| x.threshold));
    r.set("passed", runs.iter().map(|x| x.passed).collect::<Vec<bool>>());
    r.set_reals("shrink_factors", &drifts.windows(2).map(|w| w[0] / w[1]).collect::<Vec<f64>>());
    r.set_reals("form_gaps", &pick(|x| x.form_gap));
    r.set_reals("bulk_drifts", &pick(|x| x.bulk_drift));
    if traj == "solved" {
        r.set_reals("conditions", &pick(|x| x.condition));
    }
    if let Some(control) = &cfg.control {
        let c = run_once(&s, control, ns[0])?;
        r.set_real("control_drift", c.drift);
        r.set_real("control_ratio", c.drift / first.drift);
    }
    for x in &runs {
        r.flag(x.diverged, "dL/dv is not finite at B");
        r.flag(x.ill_conditioned, "oscillator system is ill-conditioned");
    }
    Ok(r)
}
