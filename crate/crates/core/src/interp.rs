//! Fritsch-Carlson monotone piecewise-cubic Hermite interpolation.

use crate::error::{FracError, Result};

#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    /// Interpolant through `(x[k], y[k])`; `x` must be strictly increasing.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let len = x.len();
        if len < 2 || y.len() != len {
            return Err(FracError::Invalid(format!("interpolation needs matching data of length >= 2, got {} and {}", len, y.len())));
        }
        if let Some(w) = x.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(FracError::NonMonotoneTransform(w[0]));
        }
        let secant: Vec<f64> = (0..len - 1).map(|k| (y[k + 1] - y[k]) / (x[k + 1] - x[k])).collect();
        let mut m = vec![0.0; len];
        if len == 2 {
            m[0] = secant[0];
            m[1] = secant[0];
        } else {
            m[0] = end_slope(x[1] - x[0], x[2] - x[1], secant[0], secant[1]);
            m[len - 1] = end_slope(x[len - 1] - x[len - 2], x[len - 2] - x[len - 3], secant[len - 2], secant[len - 3]);
        }
        for k in 1..len - 1 {
            m[k] = if secant[k - 1] * secant[k] > 0.0 { 0.5 * (secant[k - 1] + secant[k]) } else { 0.0 };
        }
        for k in 0..len - 1 {
            let d = secant[k];
            if d == 0.0 {
                m[k] = 0.0;
                m[k + 1] = 0.0;
                continue;
            }
            let a = m[k] / d;
            let b = m[k + 1] / d;
            let r = a * a + b * b;
            if r > 9.0 {
                let s = 3.0 / r.sqrt();
                m[k] = s * a * d;
                m[k + 1] = s * b * d;
            }
        }
        Ok(Self { x, y, slopes: m })
    }

    #[inline]
    pub fn lower(&self) -> f64 {
        self.x[0]
    }

    pub fn upper(&self) -> f64 {
        self.x[self.x.len() - 1]
    }

    /// Value at `t`, clamped to the data range.
    pub fn eval(&self, t: f64) -> f64 {
        let last = self.x.len() - 1;
        if t <= self.x[0] {
            return self.y[0];
        }
        if t >= self.x[last] {
            return self.y[last];
        }
        let k = self.x.partition_point(|&xk| xk <= t) - 1;
        let h = self.x[k + 1] - self.x[k];
        let s = (t - self.x[k]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[k] + h10 * h * self.slopes[k] + h01 * self.y[k + 1] + h11 * h * self.slopes[k + 1]
    }
}

/// Three-point one-sided slope, limited to keep the end cell monotone.
fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m * d0 <= 0.0 {
        0.0
    } else if d0 * d1 < 0.0 && m.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reproduces_nodes_and_lines() {
        let x: Vec<f64> = (0..11).map(|k| k as f64 * 0.1).collect();
        let y: Vec<f64> = x.iter().map(|t| 2.0 * t - 1.0).collect();
        let p = MonotoneCubic::new(x.clone(), y.clone()).unwrap();
        for (xi, yi) in x.iter().zip(&y) {
            assert_eq!(p.eval(*xi), *yi);
        }
        assert!((p.eval(0.537) - 0.074).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_monotone_abscissae() {
        assert!(MonotoneCubic::new(vec![0.0, 0.5, 0.4], vec![0.0; 3]).is_err());
    }

    #[test]
    fn accurate_on_smooth_data() {
        let n = 200;
        let x: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
        let y: Vec<f64> = x.iter().map(|t| (2.0 * t).exp()).collect();
        let p = MonotoneCubic::new(x, y).unwrap();
        for k in 0..1000 {
            let t = (k as f64 + 0.5) / 1000.0;
            assert!((p.eval(t) - (2.0 * t).exp()).abs() < 1e-6);
        }
    }

    proptest! {
        #[test]
        fn monotone_data_gives_monotone_interpolant(steps in prop::collection::vec(0.0f64..1.0, 3..20)) {
            let x: Vec<f64> = (0..steps.len()).map(|k| k as f64).collect();
            let mut acc = 0.0;
            let y: Vec<f64> = steps.iter().map(|s| { acc += s; acc }).collect();
            let p = MonotoneCubic::new(x.clone(), y).unwrap();
            let mut prev = p.eval(0.0);
            for j in 1..=400 {
                let t = j as f64 / 400.0 * (x.len() - 1) as f64;
                let v = p.eval(t);
                prop_assert!(v >= prev - 1e-12);
                prev = v;
            }
        }
    }
}
