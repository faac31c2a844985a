//! Gamma function and generalized binomial coefficients.

use std::f64::consts::PI;

use crate::error::{FracError, Result};
use crate::types::FractionalOrder;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function via the Lanczos approximation (g = 7, nine terms),
/// with the reflection formula below 1/2.
pub fn gamma(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Ok(f64::NAN);
    }
    if x <= 0.0 && x == x.floor() {
        return Err(FracError::GammaPole(x));
    }
    Ok(gamma_unchecked(x))
}

/// Gamma at an argument already known not to be a pole.
pub(crate) fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_unchecked(1.0 - x));
    }
    if x == x.floor() && x <= 171.0 {
        // Factorials exactly where they are representable.
        let mut acc = 1.0;
        let mut k = 2.0;
        while k < x {
            acc *= k;
            k += 1.0;
        }
        return acc;
    }
    let z = x - 1.0;
    let mut series = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * series
}

/// Generalized binomial coefficient `(alpha choose i)`.
///
/// Equal to `(-1)^(i-1) alpha Gamma(i - alpha) / (Gamma(1 - alpha) Gamma(i + 1))`;
/// evaluated by the product recurrence so that large `i` never overflows.
pub fn frac_binomial(alpha: FractionalOrder, i: usize) -> f64 {
    let a = alpha.value();
    match i {
        0 => 1.0,
        1 => a,
        _ => {
            let mut c = a;
            for k in 2..=i {
                c *= (a - k as f64 + 1.0) / k as f64;
            }
            c
        }
    }
}

/// `Gamma(1 - alpha)`, used by every singular boundary term.
pub(crate) fn gamma_one_minus(alpha: f64) -> f64 {
    gamma_unchecked(1.0 - alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn gamma_at_integers_is_factorial() {
        assert_eq!(gamma(1.0).unwrap(), 1.0);
        assert_eq!(gamma(5.0).unwrap(), 24.0);
        assert_eq!(gamma(2.0).unwrap(), 1.0);
    }

    #[test]
    fn gamma_half_matches_reference() {
        // sqrt(pi) to 50 digits, truncated to f64.
        let reference = 1.772_453_850_905_516_027_298_167_483_341_145_182_797_549_456_122_4;
        assert!(rel(gamma(0.5).unwrap(), reference) < 1e-14);
    }

    #[test]
    fn gamma_matches_arbitrary_precision_table() {
        let table = [
            (0.1, 9.513_507_698_668_731_285_807_98),
            (0.3, 2.991_568_987_687_590_744_642_161),
            (1.7, 0.908_638_732_853_290_441_561_565_7),
            (2.5, 1.329_340_388_179_137_020_473_626),
            (7.25, 1_155.381_013_919_989_687_202_704),
            (13.9, 4_801_735_068.172_000_923_960_813),
            (21.3, 6_034_095_982_728_211_864.855_658),
            (29.5, 1.634_812_519_827_426_644_437_881e30),
            (30.0, 8.841_761_993_739_701_954_543_616e30),
            (-0.5, -3.544_907_701_811_032_054_6),
            (-2.5, -0.945_308_720_482_941_881_225_689_3),
        ];
        for (x, g) in table {
            assert!(rel(gamma(x).unwrap(), g) < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn gamma_rejects_poles() {
        assert_eq!(gamma(0.0), Err(FracError::GammaPole(0.0)));
        assert_eq!(gamma(-3.0), Err(FracError::GammaPole(-3.0)));
    }

    #[test]
    fn gamma_recurrence_on_sample() {
        for k in 0..100 {
            let x = 0.1 + 19.9 * (k as f64 + 0.5) / 100.0;
            let lhs = gamma(x + 1.0).unwrap();
            let rhs = x * gamma(x).unwrap();
            assert!(rel(lhs, rhs) < 1e-12, "x = {x}");
        }
    }

    fn binomial_by_gamma_ratio(alpha: f64, i: usize) -> f64 {
        let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
        sign * alpha * gamma(i as f64 - alpha).unwrap()
            / (gamma(1.0 - alpha).unwrap() * gamma(i as f64 + 1.0).unwrap())
    }

    #[test]
    fn binomial_examples() {
        let half = FractionalOrder::new(0.5).unwrap();
        assert_eq!(frac_binomial(half, 0), 1.0);
        assert_eq!(frac_binomial(half, 1), 0.5);
        assert!((frac_binomial(half, 2) + 0.125).abs() < 1e-15);
        // alpha (alpha - 1) / 2! by hand
        assert!((0.5 * (0.5 - 1.0) / 2.0 - frac_binomial(half, 2)).abs() < 1e-15);
    }

    #[test]
    fn binomial_agrees_with_gamma_ratio() {
        for &a in &[0.1, 0.3, 0.5, 0.77, 0.95] {
            let alpha = FractionalOrder::new(a).unwrap();
            for i in 0..20 {
                let direct = frac_binomial(alpha, i);
                let ratio = binomial_by_gamma_ratio(a, i);
                assert!(
                    (direct - ratio).abs() <= 1e-12 * ratio.abs().max(1e-300),
                    "alpha = {a}, i = {i}"
                );
            }
        }
    }

    #[test]
    fn binomial_pascal_recurrence() {
        for &a in &[0.2, 0.5, 0.9] {
            let alpha = FractionalOrder::new(a).unwrap();
            for i in 1..40 {
                let lhs = frac_binomial(alpha, i);
                let rhs = frac_binomial(alpha, i - 1) * (a - i as f64 + 1.0) / i as f64;
                assert!(rel(lhs, rhs) < 1e-12);
            }
        }
    }
}
