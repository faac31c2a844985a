//! Dense linear solves for linear fractional Euler-Lagrange equations, in
//! particular the fractional oscillator `omega^2 u - tD_1 0D_t u = 0` with
//! `u(0) = 0`, `u'(0) = 1`.

use nalgebra::{DMatrix, DVector};

use crate::error::{FracError, Result};
use crate::fracops::{build_operator_matrix, OperatorKind};
use crate::types::{make_uniform_grid, FractionalOrder, GridRef, NumericalFlags, SampledFunction};

/// Condition estimates above this are flagged.
pub const CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct OscillatorProblem {
    pub omega: f64,
    pub alpha: FractionalOrder,
    pub grid: GridRef,
    /// `u(0)`.
    pub initial_value: f64,
    /// `u'(0)`.
    pub initial_slope: f64,
}

impl OscillatorProblem {
    /// The oscillator on `[0, 1]` with `u(0) = 0`, `u'(0) = 1`.
    pub fn new(omega: f64, alpha: FractionalOrder, n: usize) -> Result<Self> {
        if !(omega >= 0.0 && omega.is_finite()) {
            return Err(FracError::Invalid(format!("omega must be finite and non-negative, got {omega}")));
        }
        if n < 16 {
            return Err(FracError::InvalidGrid(format!("oscillator needs n >= 16, got {n}")));
        }
        Ok(Self { omega, alpha, grid: make_uniform_grid(0.0, 1.0, n)?, initial_value: 0.0, initial_slope: 1.0 })
    }
}

#[derive(Debug, Clone)]
pub struct LinearELSystem {
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
    /// Rows replaced by side conditions.
    pub constrained_rows: Vec<usize>,
    pub grid: GridRef,
}

/// `omega^2 I - R L` with row 0 replaced by `u_0 = u(0)` and row `n` by the
/// one-sided second-order difference `(-3 u_0 + 4 u_1 - u_2) / 2h = u'(0)`.
pub fn assemble_oscillator_system(p: &OscillatorProblem) -> Result<LinearELSystem> {
    let n = p.grid.n();
    if n < 16 {
        return Err(FracError::InvalidGrid(format!("oscillator needs n >= 16, got {n}")));
    }
    let left = build_operator_matrix(OperatorKind::LEFT_RL, p.alpha, &p.grid)?;
    let right = build_operator_matrix(OperatorKind::RIGHT_RL, p.alpha, &p.grid)?;
    let mut m = -(&right.entries * &left.entries);
    for k in 0..=n {
        m[(k, k)] += p.omega * p.omega;
    }
    let mut rhs = DVector::zeros(n + 1);
    m.row_mut(0).fill(0.0);
    m[(0, 0)] = 1.0;
    rhs[0] = p.initial_value;
    let h = p.grid.h();
    m.row_mut(n).fill(0.0);
    m[(n, 0)] = -3.0 / (2.0 * h);
    m[(n, 1)] = 4.0 / (2.0 * h);
    m[(n, 2)] = -1.0 / (2.0 * h);
    rhs[n] = p.initial_slope;
    Ok(LinearELSystem { matrix: m, rhs, constrained_rows: vec![0, n], grid: p.grid.clone() })
}

#[derive(Debug, Clone)]
pub struct LinearSolution {
    pub trajectory: SampledFunction,
    /// Estimate of the 1-norm condition number.
    pub condition: f64,
    /// `|A x - b|_inf / (|A|_inf |x|_inf + |b|_inf)`.
    pub relative_residual: f64,
    pub flags: NumericalFlags,
}

/// Direct LU solve with partial pivoting and a condition estimate.
///
/// Constrained rows that pin a single unknown are eliminated first, so those
/// values hold exactly; the rest are solved together with the interior rows.
pub fn solve_linear_system(sys: &LinearELSystem) -> Result<LinearSolution> {
    let len = sys.grid.len();
    if sys.matrix.nrows() != len || sys.matrix.ncols() != len || sys.rhs.len() != len {
        return Err(FracError::LengthMismatch { expected: len, got: sys.matrix.nrows() });
    }
    let mut pinned: Vec<(usize, usize)> = Vec::new();
    for &r in &sys.constrained_rows {
        let row = sys.matrix.row(r);
        let nonzero: Vec<usize> = (0..len).filter(|&j| row[j] != 0.0).collect();
        if let [c] = nonzero[..] {
            if !pinned.iter().any(|&(_, pc)| pc == c) {
                pinned.push((r, c));
            }
        }
    }
    let rows: Vec<usize> = (0..len).filter(|r| !pinned.iter().any(|&(pr, _)| pr == *r)).collect();
    let cols: Vec<usize> = (0..len).filter(|c| !pinned.iter().any(|&(_, pc)| pc == *c)).collect();
    let mut x = DVector::zeros(len);
    for &(r, c) in &pinned {
        x[c] = sys.rhs[r] / sys.matrix[(r, c)];
    }
    let reduced = DMatrix::from_fn(rows.len(), cols.len(), |i, j| sys.matrix[(rows[i], cols[j])]);
    let rhs = DVector::from_fn(rows.len(), |i, _| {
        let r = rows[i];
        sys.rhs[r] - pinned.iter().map(|&(_, c)| sys.matrix[(r, c)] * x[c]).sum::<f64>()
    });
    let lu = reduced.clone().lu();
    let y = lu.solve(&rhs).ok_or(FracError::SingularSystem)?;
    if y.iter().any(|v| !v.is_finite()) {
        return Err(FracError::SingularSystem);
    }
    for (j, &c) in cols.iter().enumerate() {
        x[c] = y[j];
    }
    let condition = one_norm(&reduced) * inverse_one_norm_estimate(&lu, rows.len());
    let r = &sys.matrix * &x - &sys.rhs;
    let a_inf = sys.matrix.row_iter().map(|row| row.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let scale = a_inf * x.amax() + sys.rhs.amax();
    let relative_residual = if scale > 0.0 { r.amax() / scale } else { 0.0 };
    let flags = NumericalFlags { ill_conditioned: !(condition <= CONDITION_LIMIT), ..Default::default() };
    Ok(LinearSolution {
        trajectory: SampledFunction::new(sys.grid.clone(), x.iter().copied().collect())?,
        condition,
        relative_residual,
        flags,
    })
}

fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter().map(|c| c.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Hager's estimator of `|A^-1|_1` from an LU factorization.
fn inverse_one_norm_estimate(lu: &nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>, len: usize) -> f64 {
    let mut x = DVector::from_element(len, 1.0 / len as f64);
    let mut estimate = 0.0;
    for _ in 0..5 {
        let Some(y) = lu.solve(&x) else { return f64::INFINITY };
        let new = y.lp_norm(1);
        if new <= estimate {
            break;
        }
        estimate = new;
        let s = y.map(|v| if v >= 0.0 { 1.0 } else { -1.0 });
        let Some(z) = solve_transpose(lu, &s) else { return f64::INFINITY };
        let (j, zmax) = z.iter().enumerate().fold((0, 0.0), |(bj, bv), (i, v)| if v.abs() > bv { (i, v.abs()) } else { (bj, bv) });
        if zmax <= z.dot(&x) {
            break;
        }
        x.fill(0.0);
        x[j] = 1.0;
    }
    estimate
}

fn solve_transpose(lu: &nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>, b: &DVector<f64>) -> Option<DVector<f64>> {
    // A = P^-1 L U, so A^T y = b becomes U^T L^T (P y) = b.
    let l = lu.l();
    let u = lu.u();
    let w = u.transpose().solve_lower_triangular(b)?;
    let mut v = l.transpose().solve_upper_triangular(&w)?;
    lu.p().inv_permute_rows(&mut v);
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_system_returns_rhs() {
        let grid = make_uniform_grid(0.0, 1.0, 32).unwrap();
        let rhs = DVector::from_iterator(33, grid.nodes().iter().map(|t| t.sin()));
        let sys = LinearELSystem { matrix: DMatrix::identity(33, 33), rhs: rhs.clone(), constrained_rows: vec![], grid };
        let sol = solve_linear_system(&sys).unwrap();
        assert_eq!(sol.trajectory.values(), rhs.as_slice());
        assert!((sol.condition - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singular_system_is_reported() {
        let grid = make_uniform_grid(0.0, 1.0, 16).unwrap();
        let sys = LinearELSystem { matrix: DMatrix::zeros(17, 17), rhs: DVector::zeros(17), constrained_rows: vec![], grid };
        assert!(matches!(solve_linear_system(&sys), Err(FracError::SingularSystem)));
    }

    #[test]
    fn hager_estimate_matches_small_inverse() {
        let grid = make_uniform_grid(0.0, 1.0, 4).unwrap();
        let m = DMatrix::from_row_slice(5, 5, &[
            4.0, 1.0, 0.0, 0.0, 2.0, //
            1.0, 3.0, 1.0, 0.0, 0.0, //
            0.0, 1.0, 5.0, 1.0, 0.0, //
            0.0, 0.0, 1.0, 2.0, 1.0, //
            -1.0, 0.0, 0.0, 1.0, 3.0,
        ]);
        let exact = one_norm(&m) * one_norm(&m.clone().try_inverse().unwrap());
        let sys = LinearELSystem { matrix: m, rhs: DVector::from_element(5, 1.0), constrained_rows: vec![], grid };
        let sol = solve_linear_system(&sys).unwrap();
        assert!(sol.condition <= exact * (1.0 + 1e-12) && sol.condition >= 0.3 * exact, "{} {exact}", sol.condition);
    }

    #[test]
    fn constraint_rows_hold() {
        let p = OscillatorProblem::new(1.0, FractionalOrder::new(0.5).unwrap(), 128).unwrap();
        let sol = solve_linear_system(&assemble_oscillator_system(&p).unwrap()).unwrap();
        let u = sol.trajectory.values();
        let h = p.grid.h();
        assert_eq!(u[0], 0.0);
        assert!(((-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h) - 1.0).abs() < 1e-10);
        assert!(sol.relative_residual < 1e-10, "{}", sol.relative_residual);
    }

    #[test]
    fn rejects_small_grids() {
        assert!(OscillatorProblem::new(1.0, FractionalOrder::new(0.5).unwrap(), 8).is_err());
    }
}
