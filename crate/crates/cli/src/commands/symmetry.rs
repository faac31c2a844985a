use serde_json::{Map, Value};

use fracvar_core::fracops::{apply_operator, OperatorKind};
use fracvar_core::symmetry::{defect_study, infinitesimal_criterion_residual, integrate_on_window, BoundPolicy};

use super::{alpha_of, grid, interval_of, lagrangian_of, n_of, positive, reject, window_of, Result};
use crate::config::ExperimentConfig;
use crate::output::{real, Report, Table};
use crate::presets;

fn policy(name: &str) -> Result<BoundPolicy> {
    match name {
        "transformed-a" => Ok(BoundPolicy::TransformedA),
        "fixed-a" => Ok(BoundPolicy::FixedA),
        _ => Err(reject(format!("unknown policy {name:?}; expected transformed-a or fixed-a"))),
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    let (a, b) = interval_of(cfg)?;
    let alpha = alpha_of(cfg)?;
    let n = n_of(cfg, 2048, 8)?;
    let policy = policy(cfg.policy.as_deref().unwrap_or("transformed-a"))?;
    let field_name = cfg.field.as_deref().unwrap_or("time-translation");
    let (v, group) = (presets::field(field_name)?, presets::group(field_name)?);
    let etas = cfg.etas.clone().unwrap_or_else(|| vec![0.04, 0.02, 0.01]);
    for &e in &etas {
        positive("eta", e)?;
    }
    let gr = grid(a, b, n)?;
    let u = presets::function(cfg.trajectory.as_deref().unwrap_or("damped-sine"), a)?.sample(&gr);
    let window = window_of(cfg, &gr, a, b)?;
    let d = apply_operator(OperatorKind::LEFT_RL, alpha, &u)?;
    let (nodes, uv, dv) = (gr.nodes(), u.values(), d.values.values());

    let mut table = Table::new(&["lagrangian", "t", "ic_residual", "tau_dl_dt"]);
    let mut r = Report::default();
    for name in cfg.preset_list("t-free-quadratic") {
        let l = lagrangian_of(cfg, &name, b)?;
        let ic = infinitesimal_criterion_residual(&l, alpha, &v, &u, policy)?;
        let icv = ic.values.values();
        let reference: Vec<f64> = (0..=n).map(|k| v.tau(nodes[k], uv[k]) * l.d1(nodes[k], uv[k], dv[k])).collect();
        for k in 0..=n {
            table.push(vec![name.as_str().into(), nodes[k].into(), icv[k].into(), reference[k].into()]);
        }
        let interior = 1..n;
        let max_ic = interior.clone().map(|k| icv[k].abs()).fold(0.0, f64::max);
        let max_ref = interior.clone().map(|k| reference[k].abs()).fold(0.0, f64::max);
        let gap = interior.map(|k| (icv[k] - reference[k]).abs()).fold(0.0, f64::max);
        let study = defect_study(&l, alpha, &group, &u, window, policy, &etas)?;

        let mut s = Map::new();
        s.insert("max_ic".into(), real(max_ic));
        s.insert("max_tau_dl_dt".into(), real(max_ref));
        s.insert("max_gap_to_tau_dl_dt".into(), real(gap));
        s.insert("etas".into(), Value::Array(etas.iter().map(|&e| real(e)).collect()));
        s.insert("defects".into(), Value::Array(study.defects.iter().map(|&e| real(e)).collect()));
        s.insert("defect_order".into(), real(study.order));
        s.insert("first_order_coefficient".into(), real(study.first_order_coefficient));
        s.insert("integrated_ic".into(), real(integrate_on_window(&ic.values, window)));
        s.insert("precondition_violated".into(), ic.flags.precondition_violated.into());
        r.set(&name, Value::Object(s));
        r.flag(ic.flags.endpoint_divergence, format!("{name}: criterion residual diverges at a"));
        r.notes.extend(ic.notes);
    }
    r.table = table;
    Ok(r)
}
