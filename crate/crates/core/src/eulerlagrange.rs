//! Pointwise residuals of the fractional Euler-Lagrange equations in their
//! RL, Caputo and subinterval forms.

use std::ops::RangeInclusive;

use crate::error::{FracError, Result};
use crate::fracops::{apply_operator, apply_values, OperatorKind};
use crate::special::gamma_one_minus;
use crate::types::{FractionalOrder, Lagrangian, NumericalFlags, SampledFunction, SubInterval};

/// Which Euler-Lagrange equation a residual belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ELForm {
    /// `dL/du + tD_b(F) = 0` on `(a, b)`.
    RlFullInterval,
    /// `dL/du + Caputo tD_b(F) + F(b) (b - t)^-alpha / Gamma(1 - alpha) = 0` on `(a, b)`.
    CaputoWithBoundaryTerm,
    /// Caputo form on `(A, B)` with the boundary term at `B`.
    AbInterior,
    /// `tD_B(F) - tD_A(F) = 0` on `(a, A)`.
    AaExterior,
    /// `dL/du + tD_B(F) = 0` on `(A, B)`.
    AbRl,
}

/// Residual values on the grid of `u`. Entries outside `domain` are zero and
/// carry no meaning.
#[derive(Debug, Clone)]
pub struct ELResidual {
    pub form: ELForm,
    pub values: SampledFunction,
    pub subinterval: Option<SubInterval>,
    /// Node indices where the equation is posed; `None` when that set is empty.
    pub domain: Option<RangeInclusive<usize>>,
    pub flags: NumericalFlags,
}

impl ELResidual {
    /// Max of `|residual|` over the domain.
    pub fn max_abs(&self) -> f64 {
        match &self.domain {
            Some(d) => self.values.max_abs_on(*d.start()..*d.end() + 1),
            None => 0.0,
        }
    }

    /// Max of `|residual|` over the domain minus `skip` nodes at each end.
    pub fn max_abs_trimmed(&self, skip: usize) -> f64 {
        match &self.domain {
            Some(d) if d.end() >= &(d.start() + 2 * skip) => self.values.max_abs_on(d.start() + skip..d.end() + 1 - skip),
            _ => 0.0,
        }
    }
}

/// `u`, `aD_t u`, `dL/du` and `F = dL/d(aD_t u)` along the trajectory.
pub(crate) struct Trajectory {
    pub v: Vec<f64>,
    pub d2: Vec<f64>,
    pub d3: Vec<f64>,
    pub flags: NumericalFlags,
}

pub(crate) fn sample_trajectory(lagrangian: &Lagrangian, alpha: FractionalOrder, u: &SampledFunction) -> Result<Trajectory> {
    let d = apply_operator(OperatorKind::LEFT_RL, alpha, u)?;
    let nodes = u.grid().nodes();
    let uv = u.values();
    let v = d.values.into_values();
    let d2 = (0..nodes.len()).map(|k| lagrangian.d2(nodes[k], uv[k], v[k])).collect();
    let d3 = (0..nodes.len()).map(|k| lagrangian.d3(nodes[k], uv[k], v[k])).collect();
    let mut flags = d.flags;
    flags.fd_partials = lagrangian.uses_fd_partials();
    Ok(Trajectory { v, d2, d3, flags })
}

fn interior(lo: usize, hi: usize) -> Option<RangeInclusive<usize>> {
    (hi >= lo + 2).then(|| lo + 1..=hi - 1)
}

fn residual(form: ELForm, u: &SampledFunction, values: Vec<f64>, domain: Option<RangeInclusive<usize>>, sub: Option<SubInterval>, flags: NumericalFlags) -> Result<ELResidual> {
    let mut values = values;
    for (k, v) in values.iter_mut().enumerate() {
        if !domain.as_ref().is_some_and(|d| d.contains(&k)) {
            *v = 0.0;
        }
    }
    Ok(ELResidual { form, values: SampledFunction::new(u.grid().clone(), values)?, subinterval: sub, domain, flags })
}

/// Right operator of `F` on `[., B]`, `B` at node `b_index`, padded with zeros to the full grid.
fn right_op_to(kind: OperatorKind, alpha: f64, f: &[f64], b_index: usize, h: f64) -> Vec<f64> {
    let mut out = vec![0.0; f.len()];
    if b_index >= 1 {
        let (vals, _) = apply_values(kind, alpha, &f[..=b_index], h);
        out[..=b_index].copy_from_slice(&vals);
    }
    out
}

/// `dL/du + tD_b^alpha F` at interior nodes.
pub fn el_residual_rl(lagrangian: &Lagrangian, alpha: FractionalOrder, u: &SampledFunction) -> Result<ELResidual> {
    let traj = sample_trajectory(lagrangian, alpha, u)?;
    let n = u.grid().n();
    let rf = right_op_to(OperatorKind::RIGHT_RL, alpha.value(), &traj.d3, n, u.grid().h());
    let values = traj.d2.iter().zip(&rf).map(|(p, q)| p + q).collect();
    residual(ELForm::RlFullInterval, u, values, interior(0, n), None, traj.flags)
}

fn caputo_form(traj: &Trajectory, alpha: f64, u: &SampledFunction, b_index: usize) -> Vec<f64> {
    let grid = u.grid();
    let cf = right_op_to(OperatorKind::RIGHT_CAPUTO, alpha, &traj.d3, b_index, grid.h());
    let fb = traj.d3[b_index];
    let tb = grid.node(b_index);
    let g = gamma_one_minus(alpha);
    (0..=grid.n())
        .map(|k| {
            if k >= b_index {
                return 0.0;
            }
            traj.d2[k] + cf[k] + fb * (tb - grid.node(k)).powf(-alpha) / g
        })
        .collect()
}

/// `dL/du + Caputo tD_b^alpha F + F(b) (b - t)^-alpha / Gamma(1 - alpha)` at interior nodes.
pub fn el_residual_caputo(lagrangian: &Lagrangian, alpha: FractionalOrder, u: &SampledFunction) -> Result<ELResidual> {
    let traj = sample_trajectory(lagrangian, alpha, u)?;
    let n = u.grid().n();
    let values = caputo_form(&traj, alpha.value(), u, n);
    residual(ELForm::CaputoWithBoundaryTerm, u, values, interior(0, n), None, traj.flags)
}

/// The pair of equations for a subinterval `(A, B)`: the Caputo form on
/// `(A, B)` and `tD_B F - tD_A F` on `(a, A)`.
pub fn el_residual_subinterval(lagrangian: &Lagrangian, alpha: FractionalOrder, u: &SampledFunction, ab: SubInterval) -> Result<(ELResidual, ELResidual)> {
    let grid = u.grid();
    check_subinterval(&ab, grid.n())?;
    let traj = sample_trajectory(lagrangian, alpha, u)?;
    let (ia, ib) = (ab.start_index, ab.end_index);
    let a = alpha.value();
    let inside = caputo_form(&traj, a, u, ib);
    let first = residual(ELForm::AbInterior, u, inside, interior(ia, ib), Some(ab), traj.flags)?;

    let to_b = right_op_to(OperatorKind::RIGHT_RL, a, &traj.d3, ib, grid.h());
    let to_a = right_op_to(OperatorKind::RIGHT_RL, a, &traj.d3, ia, grid.h());
    let outside = to_b.iter().zip(&to_a).map(|(p, q)| p - q).collect();
    let second = residual(ELForm::AaExterior, u, outside, interior(0, ia), Some(ab), traj.flags)?;
    Ok((first, second))
}

/// `dL/du + tD_B^alpha F` on `(A, B)`.
pub fn el_residual_ab_rl(lagrangian: &Lagrangian, alpha: FractionalOrder, u: &SampledFunction, ab: SubInterval) -> Result<ELResidual> {
    check_subinterval(&ab, u.grid().n())?;
    let traj = sample_trajectory(lagrangian, alpha, u)?;
    let rf = right_op_to(OperatorKind::RIGHT_RL, alpha.value(), &traj.d3, ab.end_index, u.grid().h());
    let values = traj.d2.iter().zip(&rf).map(|(p, q)| p + q).collect();
    residual(ELForm::AbRl, u, values, interior(ab.start_index, ab.end_index), Some(ab), traj.flags)
}

/// Max over interior nodes of `(A, B)` of the gap between the Caputo and RL
/// forms of the subinterval equation.
pub fn el_equivalence_check(lagrangian: &Lagrangian, alpha: FractionalOrder, u: &SampledFunction, ab: SubInterval) -> Result<f64> {
    let (caputo, _) = el_residual_subinterval(lagrangian, alpha, u, ab)?;
    let rl = el_residual_ab_rl(lagrangian, alpha, u, ab)?;
    Ok(max_gap(&caputo, &rl))
}

/// Max over the shared domain of `|r1 - r2|`.
pub fn max_gap(r1: &ELResidual, r2: &ELResidual) -> f64 {
    let Some(d) = r1.domain.clone() else { return 0.0 };
    d.filter(|k| r2.domain.as_ref().is_some_and(|e| e.contains(k)))
        .map(|k| (r1.values.values()[k] - r2.values.values()[k]).abs())
        .fold(0.0, f64::max)
}

fn check_subinterval(ab: &SubInterval, n: usize) -> Result<()> {
    if ab.end_index > n || ab.start_index >= ab.end_index {
        return Err(FracError::InvalidSubInterval(format!("nodes {}..{} on a grid with n = {n}", ab.start_index, ab.end_index)));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fracops::build_operator_matrix;
    use crate::presets;
    use crate::types::make_uniform_grid;
    use std::f64::consts::PI;

    fn half() -> FractionalOrder {
        FractionalOrder::new(0.5).unwrap()
    }

    #[test]
    fn bilinear_lagrangian_at_rest() {
        let g = make_uniform_grid(0.0, 1.0, 32).unwrap();
        let l = Lagrangian::new(|_, u, v| u * v, |_, _, _| 0.0, |_, _, v| v, |_, u, _| u);
        let r = el_residual_rl(&l, half(), &SampledFunction::zeros(g)).unwrap();
        assert_eq!(r.max_abs(), 0.0);
    }

    #[test]
    fn oscillator_residual_matches_matrix_composition() {
        let g = make_uniform_grid(0.0, 1.0, 64).unwrap();
        let u = SampledFunction::from_fn(g.clone(), |t| t);
        let l = presets::oscillator_lagrangian(1.0);
        let r = el_residual_rl(&l, half(), &u).unwrap();
        let ml = build_operator_matrix(OperatorKind::LEFT_RL, half(), &g).unwrap();
        let mr = build_operator_matrix(OperatorKind::RIGHT_RL, half(), &g).unwrap();
        let x = nalgebra::DVector::from_column_slice(u.values());
        let composed = &mr.entries * (&ml.entries * &x);
        for k in 1..64 {
            let oracle = -u.values()[k] + composed[k];
            assert!((r.values.values()[k] - oracle).abs() < 1e-11, "k = {k}");
        }
        assert!(r.max_abs() > 0.1);
    }

    #[test]
    fn rl_and_caputo_forms_agree() {
        let g = make_uniform_grid(0.0, 1.0, 256).unwrap();
        let u = SampledFunction::from_fn(g, |t| t * (PI * t).sin());
        let l = presets::oscillator_lagrangian(1.0);
        let rl = el_residual_rl(&l, half(), &u).unwrap();
        let c = el_residual_caputo(&l, half(), &u).unwrap();
        assert!(max_gap(&rl, &c) < 1e-9);
    }

    #[test]
    fn v_free_lagrangian_reduces_to_du() {
        let g = make_uniform_grid(0.0, 1.0, 32).unwrap();
        let u = SampledFunction::from_fn(g.clone(), |t| t * t);
        let l = Lagrangian::new(|_, u, _| u * u * u, |_, _, _| 0.0, |_, u, _| 3.0 * u * u, |_, _, _| 0.0);
        let r = el_residual_caputo(&l, half(), &u).unwrap();
        for k in 1..32 {
            let t = g.node(k);
            assert!((r.values.values()[k] - 3.0 * t.powi(4)).abs() < 1e-14);
        }
        let ab = SubInterval::on_grid(&g, 0.25, 0.75).unwrap();
        assert_eq!(el_equivalence_check(&l, half(), &u, ab).unwrap(), 0.0);
    }

    #[test]
    fn full_subinterval_reproduces_caputo_form() {
        let g = make_uniform_grid(0.0, 1.0, 64).unwrap();
        let u = SampledFunction::from_fn(g.clone(), |t| (2.0 * t).sin());
        let l = presets::oscillator_lagrangian(2.0);
        let (inside, outside) = el_residual_subinterval(&l, half(), &u, SubInterval::whole(&g)).unwrap();
        let c = el_residual_caputo(&l, half(), &u).unwrap();
        assert!(outside.domain.is_none());
        assert_eq!(inside.domain, c.domain);
        assert_eq!(max_gap(&inside, &c), 0.0);
    }

    #[test]
    fn exterior_residual_for_constant_f() {
        // L = c v + ... has F = c; tD_B c - tD_A c = c/Gamma(1-a) ((B-t)^-a - (A-t)^-a).
        let c = 1.7;
        let g = make_uniform_grid(0.0, 1.0, 80).unwrap();
        let u = SampledFunction::from_fn(g.clone(), |t| t * t);
        let l = Lagrangian::new(move |_, _, v| c * v, |_, _, _| 0.0, |_, _, _| 0.0, move |_, _, _| c);
        let ab = SubInterval::on_grid(&g, 0.5, 0.875).unwrap();
        let (_, outside) = el_residual_subinterval(&l, half(), &u, ab).unwrap();
        let d = outside.domain.clone().unwrap();
        assert_eq!(d, 1..=39);
        for k in d {
            let t = g.node(k);
            let exact = c / PI.sqrt() * ((0.875 - t).powf(-0.5) - (0.5 - t).powf(-0.5));
            assert!((outside.values.values()[k] - exact).abs() < 1e-11 * exact.abs().max(1.0), "k = {k}");
        }
    }

    #[test]
    fn free_lagrangian_at_rest_has_zero_residuals() {
        let g = make_uniform_grid(0.0, 1.0, 32).unwrap();
        let l = presets::free_lagrangian();
        let ab = SubInterval::on_grid(&g, 0.25, 0.75).unwrap();
        let (p, q) = el_residual_subinterval(&l, half(), &SampledFunction::zeros(g), ab).unwrap();
        assert_eq!(p.max_abs(), 0.0);
        assert_eq!(q.max_abs(), 0.0);
    }

    #[test]
    fn residual_is_linear_in_lagrangian() {
        let g = make_uniform_grid(0.0, 1.0, 64).unwrap();
        let u = SampledFunction::from_fn(g, |t| t * (PI * t).sin());
        let l = presets::oscillator_lagrangian(1.3);
        let r = el_residual_rl(&l, half(), &u).unwrap();
        let r3 = el_residual_rl(&l.scaled(-3.0), half(), &u).unwrap();
        for k in 1..64 {
            let (x, y) = (r.values.values()[k], r3.values.values()[k]);
            assert!((y + 3.0 * x).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn subinterval_forms_are_equivalent_for_linear_lagrangian() {
        let g = make_uniform_grid(0.0, 1.0, 2048).unwrap();
        let u = SampledFunction::from_fn(g.clone(), |t| t * (PI * t).sin());
        let l = Lagrangian::new(|t, u, v| t * v + u, |_, _, v| v, |_, _, _| 1.0, |t, _, _| t);
        let ab = SubInterval::on_grid(&g, 0.25, 0.75).unwrap();
        assert!(el_equivalence_check(&l, half(), &u, ab).unwrap() < 1e-9);
    }
}
