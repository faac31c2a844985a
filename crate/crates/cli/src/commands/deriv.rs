use fracvar_core::fracops::{apply_operator, Family, OperatorKind, Side};
use fracvar_core::types::FractionalOrder;

use super::{alpha_of, grid, interval_of, n_of, ns_of, observed_orders, reject, study_of, Result};
use crate::config::ExperimentConfig;
use crate::output::{Report, Table};
use crate::presets;

fn operator(name: &str) -> Result<OperatorKind> {
    Ok(match name {
        "left-rl" => OperatorKind::LEFT_RL,
        "right-rl" => OperatorKind::RIGHT_RL,
        "left-caputo" => OperatorKind::LEFT_CAPUTO,
        "right-caputo" => OperatorKind::RIGHT_CAPUTO,
        "left-integral" => OperatorKind::LEFT_INTEGRAL,
        "right-integral" => OperatorKind::RIGHT_INTEGRAL,
        _ => return Err(reject(format!("unknown operator {name:?}"))),
    })
}

struct Sweep {
    t: Vec<f64>,
    value: Vec<f64>,
    exact: Option<Vec<f64>>,
    diverged: bool,
}

impl Sweep {
    /// Max absolute and relative error over interior nodes.
    fn errors(&self) -> Option<(f64, f64)> {
        let exact = self.exact.as_ref()?;
        let last = self.t.len() - 1;
        let (mut abs, mut rel) = (0.0f64, 0.0f64);
        for k in 1..last {
            let e = (self.value[k] - exact[k]).abs();
            abs = abs.max(e);
            if exact[k] != 0.0 {
                rel = rel.max(e / exact[k].abs());
            }
        }
        Some((abs, rel))
    }
}

fn sweep(cfg: &ExperimentConfig, kind: OperatorKind, alpha: FractionalOrder, n: usize) -> Result<Sweep> {
    let (a, b) = interval_of(cfg)?;
    let name = cfg.preset.as_deref().unwrap_or("power-1");
    let f = presets::function(name, a)?;
    let g = grid(a, b, n)?;
    let eval = apply_operator(kind, alpha, &f.sample(&g))?;
    let order = if kind.family == Family::Integral { -alpha.value() } else { alpha.value() };
    let exact = match kind.side {
        Side::Left => presets::power_rule(name, a, order, kind.family == Family::Caputo)
            .map(|rule| g.nodes().iter().map(|&t| rule(t)).collect()),
        Side::Right => None,
    };
    Ok(Sweep { t: g.nodes().to_vec(), value: eval.values.into_values(), exact, diverged: eval.flags.endpoint_divergence })
}

pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    let study = study_of(cfg, &["pointwise", "convergence"])?;
    let kind = operator(cfg.operator.as_deref().unwrap_or("left-rl"))?;
    let alpha = alpha_of(cfg)?;
    if study == "pointwise" {
        let s = sweep(cfg, kind, alpha, n_of(cfg, 1024, 4)?)?;
        let mut r = match &s.exact {
            Some(exact) => {
                let mut t = Table::new(&["t", "value", "abs_error_vs_closed_form"]);
                for k in 0..s.t.len() {
                    t.push(vec![s.t[k].into(), s.value[k].into(), (s.value[k] - exact[k]).abs().into()]);
                }
                Report::new(t)
            }
            None => {
                let mut t = Table::new(&["t", "value"]);
                for k in 0..s.t.len() {
                    t.push(vec![s.t[k].into(), s.value[k].into()]);
                }
                Report::new(t)
            }
        };
        if let Some((abs, rel)) = s.errors() {
            r.set_real("max_interior_abs_error", abs);
            r.set_real("max_interior_rel_error", rel);
        }
        r.flag(s.diverged, "operator diverges at its singular endpoint");
        return Ok(r);
    }

    let ns = ns_of(cfg, &[256, 512, 1024, 2048], 4)?;
    let mut table = Table::new(&["n", "max_abs_error", "max_rel_error"]);
    let (mut abs, mut rel) = (Vec::new(), Vec::new());
    let mut diverged = false;
    for &n in &ns {
        let s = sweep(cfg, kind, alpha, n)?;
        let (ea, er) = s.errors().ok_or_else(|| reject("convergence study needs a power-<k> preset on a left operator"))?;
        diverged |= s.diverged;
        table.push(vec![n.into(), ea.into(), er.into()]);
        abs.push(ea);
        rel.push(er);
    }
    let orders = observed_orders(&ns, &abs);
    let mut r = Report::new(table);
    r.set("ns", ns.clone());
    r.set_reals("abs_errors", &abs);
    r.set_reals("rel_errors", &rel);
    r.set_reals("orders", &orders);
    r.set_real("final_order", orders.last().copied().unwrap_or(f64::NAN));
    r.flag(diverged, "operator diverges at its singular endpoint");
    Ok(r)
}
