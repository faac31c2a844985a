use fracvar_core::eulerlagrange::{el_residual_ab_rl, el_residual_caputo, el_residual_rl, el_residual_subinterval, max_gap};

use super::{alpha_of, grid, interval_of, lagrangian_of, n_of, window_of, Result};
use crate::config::ExperimentConfig;
use crate::output::{Report, Table};
use crate::presets;

pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    let (a, b) = interval_of(cfg)?;
    let alpha = alpha_of(cfg)?;
    let n = n_of(cfg, 2048, 8)?;
    let l = lagrangian_of(cfg, cfg.preset.as_deref().unwrap_or("oscillator"), b)?;
    let gr = grid(a, b, n)?;
    let u = presets::function(cfg.trajectory.as_deref().unwrap_or("damped-sine"), a)?.sample(&gr);
    let ab = window_of(cfg, &gr, a, b)?;

    let rl = el_residual_rl(&l, alpha, &u)?;
    let caputo = el_residual_caputo(&l, alpha, &u)?;
    let (inside, outside) = el_residual_subinterval(&l, alpha, &u, ab)?;
    let ab_rl = el_residual_ab_rl(&l, alpha, &u, ab)?;

    let mut table = Table::new(&["t", "rl", "caputo", "ab_caputo", "ab_rl", "exterior"]);
    let col = |r: &fracvar_core::eulerlagrange::ELResidual, k: usize| r.values.values()[k];
    for (k, &t) in gr.nodes().iter().enumerate() {
        table.push(vec![
            t.into(),
            col(&rl, k).into(),
            col(&caputo, k).into(),
            col(&inside, k).into(),
            col(&ab_rl, k).into(),
            col(&outside, k).into(),
        ]);
    }
    let mut r = Report::new(table);
    r.set_real("gap_ab_caputo_vs_ab_rl", max_gap(&inside, &ab_rl));
    r.set_real("gap_rl_vs_caputo", max_gap(&rl, &caputo));
    r.set_real("max_rl", rl.max_abs());
    r.set_real("max_exterior", outside.max_abs());
    let flags = rl.flags.merge(caputo.flags).merge(inside.flags);
    r.flag(flags.endpoint_divergence, "a residual diverges at an endpoint");
    Ok(r)
}
