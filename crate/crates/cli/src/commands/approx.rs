use serde_json::{Map, Value};

use fracvar_core::approx::{weak_convergence_study, CaseBProblem, TestFunctionSpace, WeakClaim, MAX_TRUNCATION};

use super::{alpha_of, n_of, reject, Result};
use crate::config::ExperimentConfig;
use crate::output::{real, Report, Table};

fn problem(name: &str, alpha: fracvar_core::types::FractionalOrder) -> Result<CaseBProblem> {
    match name {
        "polynomial" => Ok(CaseBProblem::polynomial(alpha)),
        "exponential" => Ok(CaseBProblem::exponential(alpha)),
        _ => Err(reject(format!("unknown approx problem {name:?}; expected polynomial or exponential"))),
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    let alpha = alpha_of(cfg)?;
    let n = n_of(cfg, 4096, 64)?;
    let levels = cfg.levels.clone().unwrap_or_else(|| vec![2, 4, 8]);
    if levels.is_empty() || levels.windows(2).any(|w| w[1] <= w[0]) || levels.iter().any(|&l| l > MAX_TRUNCATION) {
        return Err(reject(format!("levels must be strictly increasing and at most {MAX_TRUNCATION}, got {levels:?}")));
    }
    let names = cfg.functions.clone().unwrap_or_else(|| ["1", "t", "t^2"].map(String::from).to_vec());

    let mut table = Table::new(&["problem", "claim", "test_function", "level", "truncated", "limit", "gap"]);
    let mut r = Report::default();
    for pname in cfg.preset_list("polynomial") {
        let p = problem(&pname, alpha)?;
        let space = TestFunctionSpace::standard(p.a, p.b)?;
        let functions = names
            .iter()
            .map(|name| {
                space.functions.iter().find(|f| &f.name == name).cloned().ok_or_else(|| {
                    let known: Vec<&str> = space.functions.iter().map(|f| f.name.as_str()).collect();
                    reject(format!("unknown test function {name:?}; expected one of {}", known.join(", ")))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let study = weak_convergence_study(&p, &levels, &functions, n)?;
        for g in &study.gaps {
            table.push(vec![
                pname.as_str().into(),
                g.claim.name().into(),
                g.test_function.as_str().into(),
                g.level.into(),
                g.truncated.into(),
                g.limit.into(),
                g.gap.into(),
            ]);
        }
        let mut ratios = Map::new();
        let mut worst = 0.0f64;
        for claim in WeakClaim::ALL {
            for name in &names {
                let ladder = study.ladder(claim, name);
                let ratio = ladder[ladder.len() - 1] / ladder[0];
                worst = worst.max(ratio);
                ratios.insert(format!("{}/{name}", claim.name()), real(ratio));
            }
        }
        let mut s = Map::new();
        s.insert("levels".into(), levels.clone().into());
        s.insert("increases".into(), study.increases().len().into());
        s.insert("monotone".into(), study.increases().is_empty().into());
        s.insert("final_to_first".into(), Value::Object(ratios));
        s.insert("max_final_to_first".into(), real(worst));
        s.insert("ic_seminorm".into(), Value::Array(study.ic_seminorm.iter().map(|&(_, x)| real(x)).collect()));
        r.set(&pname, Value::Object(s));
    }
    r.table = table;
    Ok(r)
}
