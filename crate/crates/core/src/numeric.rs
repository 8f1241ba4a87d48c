//! Floating-point evaluation of the master identity for arbitrary real `p > 0`.

use std::sync::OnceLock;

use num_traits::{Float, FromPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expansion::composition_product_sum;
use crate::scalar::{cst, CompensatedSum, Scalar};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

/// ζ(2..=64).
fn zeta_table() -> &'static [f64; 65] {
    static TABLE: OnceLock<[f64; 65]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; 65];
        let known = [
            1.644_934_066_848_226_4,
            1.202_056_903_159_594_3,
            1.082_323_233_711_138_2,
            1.036_927_755_143_37,
            1.017_343_061_984_449,
            1.008_349_277_381_922_8,
            1.004_077_356_197_944_3,
            1.002_008_392_826_082_2,
            1.000_994_575_127_818_1,
        ];
        t[2..11].copy_from_slice(&known);
        for (k, slot) in t.iter_mut().enumerate().skip(11) {
            // tail beyond m = 60 is below 60^-10
            let s: f64 = (2..=60).rev().map(|m: i32| (m as f64).powi(-(k as i32))).sum();
            *slot = 1.0 + s;
        }
        t
    })
}

/// `ln Γ(1 + z)` for `|z| ≤ 1/2` from its Taylor series in ζ values.
fn ln_gamma_1p<F: Float + FromPrimitive>(z: F) -> F {
    let zeta = zeta_table();
    let minus_z = -z;
    let mut pow = minus_z;
    let mut acc = cst::<F>(EULER_GAMMA) * minus_z;
    for (k, zk) in zeta.iter().enumerate().skip(2) {
        pow = pow * minus_z;
        acc = acc + cst::<F>(zk / k as f64) * pow;
    }
    acc
}

/// Stirling series, accurate for `x ≥ 10`.
fn ln_gamma_stirling<F: Float + FromPrimitive>(x: F) -> F {
    // B_{2m} / (2m (2m-1))
    const COEFFS: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
        -3617.0 / 122_400.0,
    ];
    let half = cst::<F>(0.5);
    let inv = x.recip();
    let inv2 = inv * inv;
    let mut series = F::zero();
    let mut p = inv;
    for c in COEFFS {
        series = series + cst::<F>(c) * p;
        p = p * inv2;
    }
    (x - half) * x.ln() - x + cst::<F>(HALF_LN_TWO_PI) + series
}

/// Natural log of `Γ(x)` for `x > 0`.
///
/// Zeros at 1 and 2 are handled by a Taylor expansion around 1, so the error is
/// relative everywhere on `(0, 10⁴]`, not only away from those points.
pub fn log_gamma<F: Float + FromPrimitive>(x: F) -> Result<F> {
    if !(x > F::zero()) || !x.is_finite() {
        return Err(Error::NonPositiveArgument(format!(
            "{:?}",
            x.to_f64().unwrap_or(f64::NAN)
        )));
    }
    let one = F::one();
    let half = cst::<F>(0.5);
    let ten = cst::<F>(10.0);
    if x == one || x == one + one {
        return Ok(F::zero());
    }
    Ok(if x < half {
        ln_gamma_1p(x) - x.ln()
    } else if x <= one + half {
        ln_gamma_1p(x - one)
    } else if x <= one + one + half {
        let z = x - one - one;
        z.ln_1p() + ln_gamma_1p(z)
    } else if x < ten {
        // shift down into (1.5, 2.5] with a short exact-ish product
        let mut y = x;
        let mut prod = one;
        while y > one + one + half {
            y = y - one;
            prod = prod * y;
        }
        let z = y - one - one;
        prod.ln() + z.ln_1p() + ln_gamma_1p(z)
    } else {
        ln_gamma_stirling(x)
    })
}

/// `ln B(a, b)`.
pub fn log_beta<F: Float + FromPrimitive>(a: F, b: F) -> Result<F> {
    Ok(log_gamma(a)? + log_gamma(b)? - log_gamma(a + b)?)
}

/// Result of a floating-point identity check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FloatVerification {
    pub lhs: f64,
    pub rhs: f64,
    pub abs_diff: f64,
    pub rel_diff: f64,
    /// `Σ|terms| / |result|` on the worse-conditioned side.
    pub condition_number: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl FloatVerification {
    pub fn from_sides(lhs: f64, rhs: f64, condition_number: f64, tolerance: f64) -> Self {
        let abs_diff = (lhs - rhs).abs();
        let scale = lhs.abs().max(rhs.abs());
        let rel_diff = if scale == 0.0 { abs_diff } else { abs_diff / scale };
        let passed = rel_diff <= tolerance * condition_number.max(1.0);
        FloatVerification {
            lhs,
            rhs,
            abs_diff,
            rel_diff,
            condition_number,
            tolerance,
            passed,
        }
    }
}

/// Both normalized expansions as compensated sums (before the common `(2n)!`).
#[derive(Debug, Clone, Copy)]
pub struct FloatMasterSides<F> {
    pub lhs: CompensatedSum<F>,
    pub rhs: CompensatedSum<F>,
    pub factorial_2n: F,
}

impl<F: Float> FloatMasterSides<F> {
    pub fn lhs_value(&self) -> F {
        self.lhs.value() * self.factorial_2n
    }

    pub fn rhs_value(&self) -> F {
        self.rhs.value() * self.factorial_2n
    }

    pub fn condition_number(&self) -> F {
        self.lhs.condition_number().max(self.rhs.condition_number())
    }
}

/// Evaluate both expansions of `E[(Σ cᵢUᵢ)^{2n}]`, divided by `B(p,p)^k`, in `F`.
pub fn float_master_sides<F>(n: u64, c: &[F], p: F) -> Result<FloatMasterSides<F>>
where
    F: Float + FromPrimitive + Scalar<Acc = CompensatedSum<F>>,
{
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if !(p > F::zero()) {
        return Err(Error::NonPositiveArgument("p".into()));
    }
    if c.is_empty() {
        return Err(Error::InvalidParameter("coefficient vector is empty".into()));
    }
    if c.iter().any(|&x| !(x > F::zero()) || !x.is_finite()) {
        return Err(Error::NonPositiveArgument("coefficient".into()));
    }
    let top = 2 * n;
    let two = cst::<F>(2.0);
    let half = cst::<F>(0.5);

    let ln_bpp = log_beta(p, p)?;
    // E[X^j] = B(j+p, p) / B(p, p)
    let x_moments = (0..=top)
        .map(|j| Ok((log_beta(p + cst(j as f64), p)? - ln_bpp).exp()))
        .collect::<Result<Vec<F>>>()?;
    // E[U^{2i}] = B(i+1/2, p) / (B(p, p) 2^{2p-1})
    let ln_shift = (two * p - F::one()) * two.ln();
    let u_moments = (0..=n)
        .map(|i| Ok((log_beta(cst::<F>(i as f64) + half, p)? - ln_bpp - ln_shift).exp()))
        .collect::<Result<Vec<F>>>()?;

    let mut inv_fact = vec![F::one(); top as usize + 1];
    for j in 1..=top as usize {
        inv_fact[j] = inv_fact[j - 1] / cst(j as f64);
    }
    let sum: F = c.iter().fold(F::zero(), |a, &b| a + b);

    let mut lhs_rows = Vec::with_capacity(c.len() + 1);
    lhs_rows.push(
        (0..=top as usize)
            .map(|j| sum.powi(j as i32) * inv_fact[j])
            .collect::<Vec<F>>(),
    );
    for &cs in c {
        let step = -two * cs;
        lhs_rows.push(
            (0..=top as usize)
                .map(|j| step.powi(j as i32) * x_moments[j] * inv_fact[j])
                .collect(),
        );
    }
    let rhs_rows: Vec<Vec<F>> = c
        .iter()
        .map(|&cj| {
            (0..=n as usize)
                .map(|i| cj.powi(2 * i as i32) * u_moments[i] * inv_fact[2 * i])
                .collect()
        })
        .collect();

    let lhs = composition_product_sum(top, &lhs_rows, 1)?;
    let rhs = composition_product_sum(n, &rhs_rows, 1)?;
    let factorial_2n = inv_fact[top as usize].recip();
    Ok(FloatMasterSides {
        lhs,
        rhs,
        factorial_2n,
    })
}

/// Check the master identity in `f64` with a cancellation-scaled tolerance.
pub fn verify_master_float(n: u64, c: &[f64], p: f64, tolerance: f64) -> Result<FloatVerification> {
    let sides = float_master_sides(n, c, p)?;
    Ok(FloatVerification::from_sides(
        sides.lhs_value(),
        sides.rhs_value(),
        sides.condition_number(),
        tolerance,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    // ln Γ reference values from a 50-digit evaluation (mpmath.loggamma).
    // mpmath values at the exact binary64 inputs
    const REFERENCE: [(f64, f64); 12] = [
        (1e-5, 11.512_919_692_895_826),
        (0.1, 2.252_712_651_734_206),
        (0.3, 1.095_797_994_818_075_6),
        (0.999, 5.780_385_328_913_802e-4),
        (1.001, -5.763_935_982_833_062e-4),
        (1.46, -0.121_485_001_004_007_43),
        (1.9999, -4.227_520_877_215_346e-5),
        (2.0001, 4.228_165_811_291_994_5e-5),
        (3.7, 1.428_072_326_665_388),
        (9.99, 12.779_315_214_350_193),
        (10.5, 13.940_625_219_403_763),
        (1234.5, 7_550.550_901_077_895),
    ];

    #[test]
    fn log_gamma_examples() {
        assert_eq!(log_gamma(1.0f64).unwrap(), 0.0);
        assert_eq!(log_gamma(2.0f64).unwrap(), 0.0);
        let half = log_gamma(0.5f64).unwrap();
        assert!((half - 0.572_364_942_924_700_1).abs() < 1e-15);
        let five = log_gamma(5.0f64).unwrap();
        assert!((five - 24f64.ln()).abs() / five < 1e-15);
        assert!(log_gamma(0.0f64).is_err());
        assert!(log_gamma(-1.5f64).is_err());
        assert!(log_gamma(f64::NAN).is_err());
    }

    #[test]
    fn log_gamma_matches_reference_values() {
        for (x, expect) in REFERENCE {
            let got = log_gamma(x).unwrap();
            let rel = ((got - expect) / expect).abs();
            assert!(rel <= 1e-13, "x={x}: got {got}, expected {expect}, rel {rel:e}");
        }
    }

    #[test]
    fn log_gamma_f32() {
        let got = log_gamma(4.5f32).unwrap();
        assert!((got - 2.453_736_6).abs() < 1e-5);
    }

    #[test]
    fn log_gamma_recurrence_holds_across_branches() {
        let mut x = 0.013;
        while x < 40.0 {
            let lhs = log_gamma(x + 1.0).unwrap();
            let rhs = log_gamma(x).unwrap() + f64::ln(x);
            assert!((lhs - rhs).abs() <= 2e-14 * lhs.abs().max(1.0), "x = {x}");
            x += 0.137;
        }
    }

    #[test]
    fn float_master_examples() {
        let v = verify_master_float(1, &[1.0], 1.0, DEFAULT_TOLERANCE).unwrap();
        assert!(v.passed);
        assert!((v.lhs - 1.0 / 3.0).abs() < 1e-14);
        assert!((v.rhs - 1.0 / 3.0).abs() < 1e-14);

        let v = verify_master_float(3, &[0.5, 0.5], 0.5, DEFAULT_TOLERANCE).unwrap();
        assert!(v.passed);
        assert!((v.rhs - 25.0 / 256.0).abs() < 1e-15);

        // E[U^4] at p = 0.3 is (1/2)(3/2)/((0.8)(1.8)) by the moment ratio recurrence
        let v = verify_master_float(2, &[1.0], 0.3, DEFAULT_TOLERANCE).unwrap();
        assert!(v.passed, "{v:?}");
        assert!((v.rhs - 0.75 / 1.44).abs() < 1e-13);
    }

    #[test]
    fn float_master_in_f32() {
        let sides = float_master_sides(2, &[1.0f32, 2.0], 0.7).unwrap();
        let (l, r) = (sides.lhs_value(), sides.rhs_value());
        assert!(((l - r) / r).abs() < 1e-3);
    }

    #[test]
    fn float_master_rejects_bad_input() {
        assert!(verify_master_float(0, &[1.0], 1.0, 1e-10).is_err());
        assert!(verify_master_float(1, &[], 1.0, 1e-10).is_err());
        assert!(verify_master_float(1, &[1.0, -2.0], 1.0, 1e-10).is_err());
        assert!(verify_master_float(1, &[1.0], 0.0, 1e-10).is_err());
    }

    #[test]
    fn pass_criterion_scales_with_condition_number() {
        let v = FloatVerification::from_sides(1.0, 1.0 + 1e-8, 10.0, 1e-10);
        assert!(!v.passed);
        let v = FloatVerification::from_sides(1.0, 1.0 + 1e-8, 1e3, 1e-10);
        assert!(v.passed);
        let v = FloatVerification::from_sides(0.0, 0.0, 1.0, 1e-10);
        assert!(v.passed && v.rel_diff == 0.0);
    }
}
