use fracvar_core::fracops::{integration_by_parts_residual, rrl_to_lrl_residual};

use super::{alphas_of, decreasing_to_floor, grid, interval_of, ns_of, reject, study_of, Result};
use crate::config::ExperimentConfig;
use crate::output::{Report, Table};
use crate::presets;

pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    let study = study_of(cfg, &["by-parts", "transfer"])?;
    let (a, b) = interval_of(cfg)?;
    let alphas = alphas_of(cfg, &[0.5])?;
    let ns = ns_of(cfg, &[256, 512, 1024, 2048], 4)?;
    let default_pair = if study == "by-parts" { ["t", "1-t"] } else { ["1-t", "t"] };
    let names = cfg.functions.clone().unwrap_or_else(|| default_pair.map(String::from).to_vec());
    let [fname, gname] = names.as_slice() else {
        return Err(reject("functions must name exactly two presets [f, g]"));
    };
    let (f, g) = (presets::function(fname, a)?, presets::function(gname, a)?);

    if study == "by-parts" {
        let mut table = Table::new(&["alpha", "n", "residual"]);
        let (mut finals, mut decreasing) = (Vec::new(), Vec::new());
        for &alpha in &alphas {
            let mut ladder = Vec::new();
            for &n in &ns {
                let gr = grid(a, b, n)?;
                let res = integration_by_parts_residual(alpha, &f.sample(&gr), &g.sample(&gr))?;
                table.push(vec![alpha.value().into(), n.into(), res.into()]);
                ladder.push(res);
            }
            finals.push(*ladder.last().unwrap());
            decreasing.push(decreasing_to_floor(&ladder));
        }
        let mut r = Report::new(table);
        r.set_reals("alphas", &alphas.iter().map(|a| a.value()).collect::<Vec<_>>());
        r.set_reals("final_residuals", &finals);
        r.set_real("max_final_abs", finals.iter().fold(0.0, |m, x| m.max(x.abs())));
        r.set("decreasing", decreasing.clone());
        r.set("all_decreasing", decreasing.iter().all(|&d| d));
        return Ok(r);
    }

    let points = cfg.points.clone().unwrap_or_else(|| vec![a + 0.25 * (b - a), a + 0.5 * (b - a), a + 0.75 * (b - a)]);
    let mut table = Table::new(&["alpha", "t", "n", "residual"]);
    let (mut finals, mut decreasing) = (Vec::new(), Vec::new());
    let mut end_gap = 0.0f64;
    for &alpha in &alphas {
        let mut ladders = vec![Vec::new(); points.len()];
        for &n in &ns {
            let gr = grid(a, b, n)?;
            let (fs, gs) = (f.sample(&gr), g.sample(&gr));
            for (i, &t) in points.iter().enumerate() {
                let res = rrl_to_lrl_residual(alpha, &fs, &gs, gr.index_of(t)?)?;
                table.push(vec![alpha.value().into(), t.into(), n.into(), res.into()]);
                ladders[i].push(res);
            }
            // At t = b the lemma reduces to integration by parts with the roles swapped.
            let at_b = rrl_to_lrl_residual(alpha, &fs, &gs, n)?;
            end_gap = end_gap.max((at_b + integration_by_parts_residual(alpha, &gs, &fs)?).abs());
        }
        for l in &ladders {
            finals.push(*l.last().unwrap());
            decreasing.push(decreasing_to_floor(l));
        }
    }
    let mut r = Report::new(table);
    r.set_reals("points", &points);
    r.set_reals("final_residuals", &finals);
    r.set_real("max_final_abs", finals.iter().fold(0.0, |m, x| m.max(x.abs())));
    r.set("decreasing", decreasing.clone());
    r.set("all_decreasing", decreasing.iter().all(|&d| d));
    r.set_real("end_consistency_gap", end_gap);
    Ok(r)
}
