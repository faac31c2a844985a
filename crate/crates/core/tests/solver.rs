use fracvar_core::eulerlagrange::el_residual_rl;
use fracvar_core::presets;
use fracvar_core::solver::*;
use fracvar_core::types::FractionalOrder;

fn solve(alpha: f64, n: usize) -> LinearSolution {
    let p = OscillatorProblem::new(1.0, FractionalOrder::new(alpha).unwrap(), n).unwrap();
    solve_linear_system(&assemble_oscillator_system(&p).unwrap()).unwrap()
}

#[test]
fn solution_satisfies_the_discrete_el_equation() {
    let sol = solve(0.5, 512);
    assert!(sol.relative_residual < 1e-10);
    assert!(!sol.flags.ill_conditioned, "{}", sol.condition);
    let r = el_residual_rl(&presets::oscillator_lagrangian(1.0), FractionalOrder::new(0.5).unwrap(), &sol.trajectory).unwrap();
    assert!(r.max_abs_trimmed(1) < 1e-10, "{}", r.max_abs_trimmed(1));
}

#[test]
fn self_convergence_has_positive_order() {
    // Differences between successive grids, compared on the coarse nodes.
    let sols: Vec<Vec<f64>> = [128, 256, 512, 1024].iter().map(|&n| solve(0.5, n).trajectory.values().to_vec()).collect();
    let diff = |c: &[f64], f: &[f64]| (0..c.len()).map(|k| (c[k] - f[2 * k]).abs()).fold(0.0, f64::max);
    let d: Vec<f64> = (0..3).map(|i| diff(&sols[i], &sols[i + 1])).collect();
    let order = (d[1] / d[2]).log2();
    assert!(d[2] < d[1] && d[1] < d[0] && order > 0.0, "{d:?}");
}

#[test]
fn approaches_classical_oscillator_as_order_tends_to_one() {
    let gaps: Vec<f64> = [0.9, 0.99, 0.999]
        .iter()
        .map(|&a| {
            let sol = solve(a, 1024);
            let g = sol.trajectory.grid().clone();
            g.nodes().iter().zip(sol.trajectory.values()).map(|(t, u)| (u - t.sin()).abs()).fold(0.0, f64::max)
        })
        .collect();
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
}

#[test]
fn free_case_is_solvable() {
    let p = OscillatorProblem::new(0.0, FractionalOrder::new(0.99).unwrap(), 256).unwrap();
    let sol = solve_linear_system(&assemble_oscillator_system(&p).unwrap()).unwrap();
    let u = sol.trajectory.values();
    // Close to the classical limit u = t away from the singular end.
    assert!((u[128] - 0.5).abs() < 0.1, "{}", u[128]);
}
