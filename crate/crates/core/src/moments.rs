//! Even moments of `Σ cᵢUᵢ` for i.i.d. `Uᵢ = 2Xᵢ − 1`, `Xᵢ ~ Be(p, p)`, computed
//! two ways:
//!
//! * expanding `(c₍ₖ₎ − Σ 2cₛXₛ)^{2n}` over compositions of `2n` into `k+1`
//!   parts and using the raw beta moments `E[X^j] = B(j+p, p)/B(p, p)`;
//! * expanding `(Σ cᵢUᵢ)^{2n}` directly, where odd moments of `U` vanish and
//!   only compositions of `n` into `k` doubled parts survive.
//!
//! Both results are normalized by `B(p, p)^k` so that each side is the
//! probabilistic moment itself.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{
    beta_half, big_rational, factorial, pow2, rational_from_uint, HalfInt, PiRational,
};
use crate::expansion::exact_composition_product_sum;
use crate::format::{rational_string, rational_to_f64};
use crate::numeric::verify_master_float;
use crate::report::{params, IdentityReport, Mode, SideValue};

/// Shape of the symmetric beta law `Be(p, p)`, restricted to `p ∈ ½ℤ⁺`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BetaParams {
    p: HalfInt,
}

impl BetaParams {
    pub fn new(p: HalfInt) -> Result<Self> {
        if !p.is_positive() {
            return Err(Error::NonPositiveArgument(p.to_string()));
        }
        Ok(BetaParams { p })
    }

    /// The arcsine law `Be(1/2, 1/2)`.
    pub fn arcsine() -> Self {
        BetaParams { p: HalfInt::HALF }
    }

    pub fn p(&self) -> HalfInt {
        self.p
    }

    /// `2p − 1`, always a non-negative integer.
    pub fn two_p_minus_one(&self) -> i64 {
        self.p.doubled() - 1
    }
}

/// Positive weights `c₁..c_k` with cached sum `c₍ₖ₎`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientVector {
    coeffs: Vec<BigRational>,
    sum: BigRational,
}

impl CoefficientVector {
    pub fn new(coeffs: Vec<BigRational>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("coefficient vector is empty".into()));
        }
        if let Some(bad) = coeffs.iter().find(|c| !c.is_positive()) {
            return Err(Error::NonPositiveArgument(rational_string(bad)));
        }
        let sum = coeffs.iter().fold(BigRational::zero(), |a, c| a + c);
        Ok(CoefficientVector { coeffs, sum })
    }

    /// `k` copies of `c`.
    pub fn uniform(k: usize, c: BigRational) -> Result<Self> {
        Self::new(vec![c; k])
    }

    /// `[1/k, …, 1/k]`: the walk-correspondence weights.
    pub fn walk(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        Self::uniform(k, big_rational(1, k as i64))
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn sum(&self) -> &BigRational {
        &self.sum
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scaled(&self, lambda: &BigRational) -> Result<Self> {
        Self::new(self.coeffs.iter().map(|c| c * lambda).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(rational_to_f64).collect()
    }
}

impl std::fmt::Display for CoefficientVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// `E[U^{2n}] = B(n + 1/2, p) / (B(p, p) · 2^{2p−1})`.
pub fn moment_u2n(n: u64, p: BetaParams) -> Result<PiRational> {
    if n == 0 {
        return Err(Error::InvalidParameter("moment order n must be at least 1".into()));
    }
    let num = beta_half(HalfInt::from_doubled(2 * n as i64 + 1), p.p)?;
    let den = beta_half(p.p, p.p)?.scale(&pow2(p.two_p_minus_one()));
    num.checked_div(&den)
}

/// Odd moments of `U` vanish by symmetry of its density.
pub fn odd_moment_u(_n: u64, _p: BetaParams) -> PiRational {
    PiRational::zero()
}

/// Split a row of PiRationals that share one π power into rational coefficients.
fn split_row(values: Vec<PiRational>) -> Result<(Vec<BigRational>, i64)> {
    let pow = values
        .iter()
        .find(|v| !v.is_zero())
        .map(|v| v.half_pi_pow())
        .unwrap_or(0);
    let mut coeffs = Vec::with_capacity(values.len());
    for v in values {
        if !v.is_zero() && v.half_pi_pow() != pow {
            return Err(Error::IncompatiblePiPowers {
                left: pow,
                right: v.half_pi_pow(),
            });
        }
        coeffs.push(v.coeff().clone());
    }
    Ok((coeffs, pow))
}

fn inv_factorial(j: u64) -> BigRational {
    BigRational::new(BigInt::one(), factorial(j).into())
}

/// Unnormalized first expansion:
/// `Σ_j (2n; j) c₍ₖ₎^{j₁} ∏ₛ (−2cₛ)^{j_{s+1}} B(j_{s+1}+p, p)`.
pub fn lhs_unnormalized(
    n: u64,
    c: &CoefficientVector,
    p: BetaParams,
    threads: usize,
) -> Result<PiRational> {
    let top = 2 * n;
    let betas = (0..=top)
        .map(|j| beta_half(p.p.checked_add_int(j as i64), p.p))
        .collect::<Result<Vec<_>>>()?;
    let (beta_coeffs, beta_pow) = split_row(betas)?;

    let mut rows = Vec::with_capacity(c.len() + 1);
    rows.push(
        (0..=top)
            .map(|j| Pow::pow(c.sum(), j as u32) * inv_factorial(j))
            .collect::<Vec<_>>(),
    );
    for cs in c.coeffs() {
        let step = -(cs * BigRational::from_integer(2.into()));
        rows.push(
            (0..=top)
                .map(|j| Pow::pow(&step, j as u32) * &beta_coeffs[j as usize] * inv_factorial(j))
                .collect(),
        );
    }
    let sum = exact_composition_product_sum(top, &rows, threads)? * rational_from_uint(factorial(top));
    Ok(PiRational::new(sum, beta_pow * c.len() as i64))
}

/// Unnormalized second expansion:
/// `2^{−(2p−1)k} Σ_i (2n; 2i) ∏ⱼ cⱼ^{2iⱼ} B(iⱼ + 1/2, p)`.
pub fn rhs_unnormalized(
    n: u64,
    c: &CoefficientVector,
    p: BetaParams,
    threads: usize,
) -> Result<PiRational> {
    let betas = (0..=n)
        .map(|i| beta_half(HalfInt::from_doubled(2 * i as i64 + 1), p.p))
        .collect::<Result<Vec<_>>>()?;
    let (beta_coeffs, beta_pow) = split_row(betas)?;

    let rows: Vec<Vec<BigRational>> = c
        .coeffs()
        .iter()
        .map(|cj| {
            let sq = cj * cj;
            (0..=n)
                .map(|i| Pow::pow(&sq, i as u32) * &beta_coeffs[i as usize] * inv_factorial(2 * i))
                .collect()
        })
        .collect();
    let k = c.len() as i64;
    let sum = exact_composition_product_sum(n, &rows, threads)?
        * rational_from_uint(factorial(2 * n))
        * pow2(-p.two_p_minus_one() * k);
    Ok(PiRational::new(sum, beta_pow * k))
}

fn normalizer(p: BetaParams, k: usize) -> Result<PiRational> {
    beta_half(p.p, p.p)?.powi(k as i32)
}

/// `E[(Σ cᵢUᵢ)^{2n}]` from the `k+1`-part expansion in raw beta moments.
pub fn lhs_master(n: u64, c: &CoefficientVector, p: BetaParams) -> Result<PiRational> {
    lhs_master_threaded(n, c, p, 1)
}

pub fn lhs_master_threaded(
    n: u64,
    c: &CoefficientVector,
    p: BetaParams,
    threads: usize,
) -> Result<PiRational> {
    check_order(n)?;
    lhs_unnormalized(n, c, p, threads)?.checked_div(&normalizer(p, c.len())?)
}

/// `E[(Σ cᵢUᵢ)^{2n}]` from the even-moment expansion.
pub fn rhs_master(n: u64, c: &CoefficientVector, p: BetaParams) -> Result<PiRational> {
    rhs_master_threaded(n, c, p, 1)
}

pub fn rhs_master_threaded(
    n: u64,
    c: &CoefficientVector,
    p: BetaParams,
    threads: usize,
) -> Result<PiRational> {
    check_order(n)?;
    rhs_unnormalized(n, c, p, threads)?.checked_div(&normalizer(p, c.len())?)
}

fn check_order(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    Ok(())
}

/// Parameter values in the report vocabulary.
fn master_params(n: u64, c: &CoefficientVector, p: &str) -> BTreeMap<String, String> {
    let coeffs: Vec<String> = c.coeffs().iter().map(rational_string).collect();
    params([
        ("n", n.to_string()),
        ("k", c.len().to_string()),
        ("coeffs", coeffs.join(",")),
        ("p", p.to_string()),
    ])
}

/// Check that both expansions agree.
///
/// Exact mode compares `PiRational`s; float mode runs the floating-point
/// evaluator with the given tolerance. Disagreement yields a report with
/// `verified = false`, never an error.
pub fn verify_master(
    n: u64,
    c: &CoefficientVector,
    p: BetaParams,
    mode: Mode,
    tolerance: f64,
    threads: usize,
) -> Result<IdentityReport> {
    let start = Instant::now();
    match mode {
        Mode::Exact => {
            let lhs = lhs_master_threaded(n, c, p, threads)?;
            let rhs = rhs_master_threaded(n, c, p, threads)?;
            Ok(IdentityReport::exact(
                "master",
                master_params(n, c, &p.p().to_string()),
                lhs,
                rhs,
                start.elapsed(),
            ))
        }
        Mode::Float => {
            let fv = verify_master_float(n, &c.to_f64(), p.p().to_f64(), tolerance)?;
            Ok(float_report(n, c, &p.p().to_string(), fv, start))
        }
    }
}

pub(crate) fn float_report(
    n: u64,
    c: &CoefficientVector,
    p: &str,
    fv: crate::numeric::FloatVerification,
    start: Instant,
) -> IdentityReport {
    let mut parameters = master_params(n, c, p);
    parameters.insert("tolerance".into(), format!("{:e}", fv.tolerance));
    IdentityReport {
        identity_name: "master".into(),
        parameters,
        lhs: SideValue::Float(fv.lhs),
        rhs: SideValue::Float(fv.rhs),
        verified: fv.passed,
        mode: Mode::Float,
        elapsed: start.elapsed(),
        notes: vec![format!(
            "relDiff={:e} conditionNumber={:e}",
            fv.rel_diff, fv.condition_number
        )],
        printed_form: None,
    }
}

/// Both sides of the equal-coefficient form with every `cⱼ = 1`, evaluated
/// directly from integer weights `k^{j₁}` and `(−2)^{jₛ}`.
fn equal_coeff_sides(n: u64, k: usize, p: BetaParams) -> Result<(PiRational, PiRational)> {
    let top = 2 * n;
    let betas = (0..=top)
        .map(|j| beta_half(p.p.checked_add_int(j as i64), p.p))
        .collect::<Result<Vec<_>>>()?;
    let (beta_coeffs, beta_pow) = split_row(betas)?;
    let kk = BigRational::from_integer(BigInt::from(k));
    let minus_two = BigRational::from_integer(BigInt::from(-2));
    let mut rows = vec![(0..=top)
        .map(|j| Pow::pow(&kk, j as u32) * inv_factorial(j))
        .collect::<Vec<_>>()];
    let beta_row: Vec<BigRational> = (0..=top)
        .map(|j| Pow::pow(&minus_two, j as u32) * &beta_coeffs[j as usize] * inv_factorial(j))
        .collect();
    rows.extend(std::iter::repeat_n(beta_row, k));
    let lhs = exact_composition_product_sum(top, &rows, 1)? * rational_from_uint(factorial(top));

    let half_betas = (0..=n)
        .map(|i| beta_half(HalfInt::from_doubled(2 * i as i64 + 1), p.p))
        .collect::<Result<Vec<_>>>()?;
    let (half_coeffs, half_pow) = split_row(half_betas)?;
    let row: Vec<BigRational> = (0..=n)
        .map(|i| &half_coeffs[i as usize] * inv_factorial(2 * i))
        .collect();
    let rhs = exact_composition_product_sum(n, &vec![row; k], 1)?
        * rational_from_uint(factorial(top))
        * pow2(-p.two_p_minus_one() * k as i64);
    Ok((
        PiRational::new(lhs, beta_pow * k as i64),
        PiRational::new(rhs, half_pow * k as i64),
    ))
}

/// Weights used to check that equal coefficients only contribute a `c^{2n}` factor.
pub const EQUAL_COEFF_PROBES: [(i64, i64); 3] = [(1, 4), (1, 1), (7, 3)];

/// Verify the equal-coefficient form (all `cⱼ = 1`) and its scale invariance.
pub fn verify_equal_coeff_form(n: u64, k: usize, p: BetaParams) -> Result<IdentityReport> {
    check_order(n)?;
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let start = Instant::now();
    let (lhs, rhs) = equal_coeff_sides(n, k, p)?;
    let mut notes = Vec::new();
    let mut verified = lhs == rhs;

    let base = lhs.checked_div(&normalizer(p, k)?)?;
    for (num, den) in EQUAL_COEFF_PROBES {
        let c = big_rational(num, den);
        let cv = CoefficientVector::uniform(k, c.clone())?;
        let l = lhs_master(n, &cv, p)?;
        let r = rhs_master(n, &cv, p)?;
        let expected = base.scale(&Pow::pow(&c, (2 * n) as u32));
        let ok = l == r && l == expected;
        verified &= ok;
        notes.push(format!(
            "c={}: moment {} = c^{}·{} ({})",
            rational_string(&c),
            l,
            2 * n,
            base,
            if ok { "ok" } else { "MISMATCH" }
        ));
    }
    Ok(IdentityReport {
        identity_name: "equal-coeff".into(),
        parameters: params([
            ("n", n.to_string()),
            ("k", k.to_string()),
            ("p", p.p().to_string()),
        ]),
        lhs: lhs.into(),
        rhs: rhs.into(),
        verified,
        mode: Mode::Exact,
        elapsed: start.elapsed(),
        notes,
        printed_form: None,
    })
}
