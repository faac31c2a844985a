use fracvar_core::fracops::*;
use fracvar_core::presets;
use fracvar_core::special::gamma;
use fracvar_core::types::*;
use proptest::prelude::*;

fn order(a: f64) -> FractionalOrder {
    FractionalOrder::new(a).unwrap()
}

fn power_rule_error(alpha: f64, beta: usize, n: usize) -> f64 {
    let g = make_uniform_grid(0.0, 1.0, n).unwrap();
    let d = apply_operator(OperatorKind::LEFT_RL, order(alpha), &presets::power(0.0, beta).sample(&g)).unwrap();
    let b = beta as f64;
    let c = gamma(b + 1.0).unwrap() / gamma(b + 1.0 - alpha).unwrap();
    g.nodes().iter().zip(d.values.values()).map(|(t, v)| (v - c * t.powf(b - alpha)).abs()).fold(0.0, f64::max)
}

#[test]
fn power_rule_converges_at_two_minus_alpha() {
    for alpha in [0.3, 0.5, 0.7] {
        assert!(power_rule_error(alpha, 1, 2048) < 1e-13);
        for beta in [2, 3] {
            let e: Vec<f64> = [256, 512, 1024, 2048].iter().map(|&n| power_rule_error(alpha, beta, n)).collect();
            let orders: Vec<f64> = e.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
            // Approached from below; the finest pair is within 0.02 of 2 - alpha.
            assert!(orders.windows(2).all(|w| w[1] > w[0]), "{orders:?}");
            assert!(orders[2] >= 2.0 - alpha - 0.05, "alpha {alpha} beta {beta}: {orders:?}");
        }
    }
    // Frozen at n = 2048, alpha = 0.5, beta = 2.
    assert!((power_rule_error(0.5, 2, 2048) - 5.0395e-6).abs() < 1e-9);
}

#[test]
fn left_derivative_tends_to_the_slope() {
    let g = make_uniform_grid(0.0, 1.0, 1024).unwrap();
    let u = presets::damped_sine().sample(&g);
    let slope = fracvar_core::diff::derivative2(u.values(), g.h());
    let gaps: Vec<f64> = [0.9, 0.99, 0.999]
        .iter()
        .map(|&a| {
            let d = apply_operator(OperatorKind::LEFT_RL, order(a), &u).unwrap();
            (1..1024).map(|k| (d.values.values()[k] - slope[k]).abs()).fold(0.0, f64::max)
        })
        .collect();
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2] && gaps[2] < 0.01, "{gaps:?}");
}

#[test]
fn integrals_compose() {
    for (a1, a2) in [(0.3, 0.4), (0.2, 0.5)] {
        let gaps: Vec<f64> = [128, 256, 512, 1024]
            .iter()
            .map(|&n| {
                let g = make_uniform_grid(0.0, 1.0, n).unwrap();
                let u = SampledFunction::from_fn(g, f64::exp);
                let i1 = apply_operator(OperatorKind::LEFT_INTEGRAL, order(a1), &u).unwrap().values;
                let i2 = apply_operator(OperatorKind::LEFT_INTEGRAL, order(a2), &i1).unwrap().values;
                let i3 = apply_operator(OperatorKind::LEFT_INTEGRAL, order(a1 + a2), &u).unwrap().values;
                i2.values().iter().zip(i3.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
            })
            .collect();
        let rate = (gaps[2] / gaps[3]).log2();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]) && rate > 0.5 && gaps[3] < 3e-3, "{gaps:?}");
    }
}

#[test]
fn by_parts_for_the_reference_pair_is_at_roundoff() {
    for alpha in [0.3, 0.5, 0.7] {
        let g = make_uniform_grid(0.0, 1.0, 2048).unwrap();
        let f = SampledFunction::from_fn(g.clone(), |t| t);
        let h = SampledFunction::from_fn(g, |t| 1.0 - t);
        assert!(integration_by_parts_residual(order(alpha), &f, &h).unwrap().abs() < 1e-12);
    }
}

#[test]
fn transfer_lemma_converges_inside_the_interval() {
    let res = |n: usize, t: f64| {
        let g = make_uniform_grid(0.0, 1.0, n).unwrap();
        let f = SampledFunction::from_fn(g.clone(), |s| 1.0 - s);
        let h = SampledFunction::from_fn(g.clone(), |s| s);
        rrl_to_lrl_residual(order(0.5), &f, &h, g.index_of(t).unwrap()).unwrap().abs()
    };
    for t in [0.25, 0.5, 0.75] {
        let r: Vec<f64> = [256, 512, 1024].iter().map(|&n| res(n, t)).collect();
        assert!(r[1] < r[0] && r[2] < r[1] && (r[1] / r[2]).log2() > 1.4, "{t}: {r:?}");
    }
    assert!((res(1024, 0.5) - 3.5476e-6).abs() < 1e-9);
}

fn cubic(c: [f64; 4]) -> impl Fn(f64) -> f64 {
    move |t| c[0] + t * (c[1] + t * (c[2] + t * c[3]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn operators_are_linear(
        c1 in -2.0f64..2.0, c2 in -2.0f64..2.0,
        p in prop::array::uniform4(-1.0f64..1.0), q in prop::array::uniform4(-1.0f64..1.0),
        alpha in 0.05f64..0.95, n in 8usize..96,
    ) {
        let g = make_uniform_grid(0.0, 1.0, n).unwrap();
        // Vanish at both ends so RL derivatives stay finite on either side.
        let (fp, fq) = (cubic(p), cubic(q));
        let u1 = SampledFunction::from_fn(g.clone(), |t| t * (1.0 - t) * fp(t));
        let u2 = SampledFunction::from_fn(g.clone(), |t| t * (1.0 - t) * fq(t));
        let mix = u1.linear_combination(c1, &u2, c2).unwrap();
        for kind in OperatorKind::ALL {
            let a = apply_operator(kind, order(alpha), &u1).unwrap().values;
            let b = apply_operator(kind, order(alpha), &u2).unwrap().values;
            let m = apply_operator(kind, order(alpha), &mix).unwrap().values;
            for k in 0..=n {
                let want = c1 * a.values()[k] + c2 * b.values()[k];
                prop_assert!((m.values()[k] - want).abs() <= 1e-12 * (1.0 + want.abs()), "{kind:?} node {k}");
            }
        }
    }

    #[test]
    fn right_operator_is_the_mirror_of_the_left(p in prop::array::uniform4(-1.0f64..1.0), alpha in 0.05f64..0.95, n in 8usize..64) {
        let g = make_uniform_grid(0.0, 1.0, n).unwrap();
        let f = cubic(p);
        let u = SampledFunction::from_fn(g.clone(), |t| t * f(t));
        let mirrored = SampledFunction::from_fn(g.clone(), |t| (1.0 - t) * f(1.0 - t));
        let left = apply_operator(OperatorKind::LEFT_CAPUTO, order(alpha), &u).unwrap().values;
        let right = apply_operator(OperatorKind::RIGHT_CAPUTO, order(alpha), &mirrored).unwrap().values;
        for k in 0..=n {
            prop_assert!((left.values()[k] - right.values()[n - k]).abs() <= 1e-11 * (1.0 + left.values()[k].abs()));
        }
    }
}
