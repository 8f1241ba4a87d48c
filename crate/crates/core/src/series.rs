//! Partial sums of the Pochhammer series for `C(2n,n)² / 4^{2n}`.
//!
//! The general term is `t_k = (1/2)_k² / (n+1/2)_{k+1}`, optionally divided
//! by `k!` or `k!²`, and the series is scaled by `1/π`. Terms are exact
//! rationals for the first [`EXACT_PREFIX`] indices; after that each term is
//! the previous one times the exact term ratio, rounded once to `f64`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::{rational_string, rational_to_f64};
use crate::scalar::CompensatedSum;
use crate::walk::closed_form_2d;

pub const DEFAULT_MAX_TERMS: u64 = 1_000_000;
pub const DEFAULT_CUTOFF: f64 = 1e-12;
/// Indices below this are carried as exact rationals.
pub const EXACT_PREFIX: u64 = 200;
/// Number of leading terms and partial sums kept in the report.
pub const RECORDED_TERMS: usize = 32;
/// Length of the trailing window used for the decay and growth tests.
pub const WINDOW: usize = 8;
/// Largest `|limit − target|` still counted as a match.
pub const MATCH_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum SeriesVariant {
    Printed,
    OverKFactorial,
    OverKFactorialSquared,
}

impl SeriesVariant {
    pub const ALL: [SeriesVariant; 3] = [
        SeriesVariant::Printed,
        SeriesVariant::OverKFactorial,
        SeriesVariant::OverKFactorialSquared,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SeriesVariant::Printed => "printed",
            SeriesVariant::OverKFactorial => "overKFactorial",
            SeriesVariant::OverKFactorialSquared => "overKFactorialSquared",
        }
    }

    fn factorial_power(self) -> u32 {
        match self {
            SeriesVariant::Printed => 0,
            SeriesVariant::OverKFactorial => 1,
            SeriesVariant::OverKFactorialSquared => 2,
        }
    }

    /// `t_{k+1} / t_k` as an exact rational.
    fn ratio(self, n: u64, k: u64) -> BigRational {
        let half_k = BigInt::from(2 * k + 1);
        let num = &half_k * &half_k;
        let den = BigInt::from(2 * (2 * n + 2 * k + 3)) * BigInt::from(k + 1).pow(self.factorial_power());
        BigRational::new(num, den)
    }

    /// The same ratio evaluated in `f64`; numerator and denominator are exact below `2^53`.
    fn ratio_f64(self, n: u64, k: u64) -> f64 {
        let half_k = (2 * k + 1) as f64;
        let kk = (k + 1) as f64;
        half_k * half_k / (2.0 * (2 * n + 2 * k + 3) as f64) / kk.powi(self.factorial_power() as i32)
    }
}

impl std::fmt::Display for SeriesVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SeriesVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SeriesVariant::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown series variant {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesOutcome {
    Converged,
    Diverged,
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SeriesEvaluation {
    pub variant_name: String,
    pub n: u64,
    /// Leading unscaled terms `t_k`.
    pub terms: Vec<f64>,
    /// The same terms as exact rationals.
    pub exact_terms: Vec<String>,
    /// Leading partial sums of `(1/π) Σ t_k`.
    pub partial_sums: Vec<f64>,
    pub terms_evaluated: u64,
    pub last_terms: Vec<f64>,
    pub converged: bool,
    pub outcome: SeriesOutcome,
    /// Final partial sum plus a tail estimate; absent once the series diverges.
    pub limit_estimate: Option<f64>,
    pub target: f64,
    pub target_exact: String,
    pub target_gap: Option<f64>,
    pub matches_target: bool,
    pub max_terms: u64,
    pub cutoff: f64,
}

struct Window {
    buf: std::collections::VecDeque<f64>,
}

impl Window {
    fn push(&mut self, t: f64) {
        if self.buf.len() == WINDOW {
            self.buf.pop_front();
        }
        self.buf.push_back(t);
    }

    fn full(&self) -> bool {
        self.buf.len() == WINDOW
    }

    fn decaying(&self) -> bool {
        self.full() && self.buf.iter().zip(self.buf.iter().skip(1)).all(|(a, b)| b <= a)
    }

    fn growing(&self) -> bool {
        self.full()
            && self.buf.iter().zip(self.buf.iter().skip(1)).all(|(a, b)| b > a)
            && self.buf.back().is_some_and(|&t| t > 1.0)
    }

    fn last_two_below(&self, cutoff: f64) -> bool {
        self.buf.len() >= 2 && self.buf.iter().rev().take(2).all(|t| t.abs() < cutoff)
    }
}

/// Remaining mass after term `K`, from the last two terms.
///
/// Geometric decay uses `t r / (1 − r)`; slower decay is treated as `C k^{−s}`
/// with `s` fitted to the last two terms.
fn tail_estimate(k: u64, prev: f64, last: f64) -> Option<f64> {
    if last == 0.0 {
        return Some(0.0);
    }
    let r = last / prev;
    if !(r > 0.0 && r < 1.0) {
        return None;
    }
    if r < 0.999 || k < 2 {
        return Some(last * r / (1.0 - r));
    }
    let kf = k as f64;
    let s = -r.ln() / (kf / (kf - 1.0)).ln();
    if s <= 1.0 {
        return None;
    }
    // ∫_{K+1/2}^∞ t_K (K/x)^s dx
    Some(last * kf.powf(s) * (kf + 0.5).powf(1.0 - s) / (s - 1.0))
}

pub fn evaluate_series(
    n: u64,
    variant: SeriesVariant,
    max_terms: u64,
    cutoff: f64,
) -> Result<SeriesEvaluation> {
    if max_terms == 0 {
        return Err(Error::InvalidParameter("maxTerms must be at least 1".into()));
    }
    if !(cutoff > 0.0 && cutoff.is_finite()) {
        return Err(Error::InvalidParameter(format!("cutoff {cutoff} must be positive")));
    }
    let half_steps = u32::try_from(n).map_err(|_| Error::TooLarge(format!("n = {n}")))?;
    let target_exact = if n == 0 {
        BigRational::one()
    } else {
        closed_form_2d(half_steps)
    };
    let target = rational_to_f64(&target_exact);
    let inv_pi = std::f64::consts::FRAC_1_PI;

    let mut exact_term = BigRational::new(BigInt::from(2), BigInt::from(2 * n + 1));
    let mut term = rational_to_f64(&exact_term);
    let mut sum = CompensatedSum::<f64>::zero();
    let mut window = Window {
        buf: Default::default(),
    };
    let mut terms = Vec::new();
    let mut exact_terms = Vec::new();
    let mut partial_sums = Vec::new();
    let mut outcome = SeriesOutcome::Exhausted;
    let mut evaluated = 0;

    for k in 0..max_terms {
        if !term.is_finite() {
            outcome = SeriesOutcome::Diverged;
            break;
        }
        sum.add(term);
        window.push(term);
        evaluated = k + 1;
        if terms.len() < RECORDED_TERMS {
            terms.push(term);
            exact_terms.push(rational_string(&exact_term));
            partial_sums.push(sum.value() * inv_pi);
        }
        if window.growing() {
            outcome = SeriesOutcome::Diverged;
            break;
        }
        if window.decaying() && window.last_two_below(cutoff) {
            outcome = SeriesOutcome::Converged;
            break;
        }
        if k + 1 < EXACT_PREFIX {
            exact_term *= variant.ratio(n, k);
            term = rational_to_f64(&exact_term);
        } else {
            term *= variant.ratio_f64(n, k);
        }
    }

    let last_terms: Vec<f64> = window.buf.iter().copied().collect();
    let limit_estimate = match outcome {
        SeriesOutcome::Diverged => None,
        _ => {
            let tail = match last_terms.as_slice() {
                [.., prev, last] => tail_estimate(evaluated - 1, *prev, *last),
                _ => None,
            };
            tail.map(|t| (sum.value() + t) * inv_pi)
        }
    };
    let target_gap = limit_estimate.map(|l| (l - target).abs());
    Ok(SeriesEvaluation {
        variant_name: variant.name().to_string(),
        n,
        terms,
        exact_terms,
        partial_sums,
        terms_evaluated: evaluated,
        last_terms,
        converged: outcome == SeriesOutcome::Converged,
        outcome,
        limit_estimate,
        target,
        target_exact: rational_string(&target_exact),
        target_gap,
        matches_target: target_gap.is_some_and(|g| g <= MATCH_TOLERANCE),
        max_terms,
        cutoff,
    })
}

/// `t_k` for `k < count`, exactly.
pub fn exact_terms(n: u64, variant: SeriesVariant, count: u64) -> Vec<BigRational> {
    let mut t = BigRational::new(BigInt::from(2), BigInt::from(2 * n + 1));
    let mut out = Vec::with_capacity(count as usize);
    for k in 0..count {
        out.push(t.clone());
        t *= variant.ratio(n, k);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{big_rational, factorial, pochhammer, rational_from_uint};

    fn direct_term(n: u64, variant: SeriesVariant, k: u64) -> BigRational {
        let half = big_rational(1, 2);
        let a = pochhammer(&half, k);
        let b = pochhammer(&(big_rational(n as i64, 1) + &half), k + 1);
        let f = rational_from_uint(factorial(k));
        let mut t = &a * &a / b;
        for _ in 0..variant.factorial_power() {
            t /= &f;
        }
        t
    }

    #[test]
    fn recurrence_matches_pochhammer_definition() {
        for v in SeriesVariant::ALL {
            for n in 0..4 {
                let terms = exact_terms(n, v, 25);
                for (k, t) in terms.iter().enumerate() {
                    assert_eq!(*t, direct_term(n, v, k as u64), "{v} n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn leading_terms_at_zero() {
        let t = exact_terms(0, SeriesVariant::Printed, 4);
        assert_eq!(t[0], big_rational(2, 1));
        assert_eq!(t[1], big_rational(1, 3));
        assert_eq!(t[2], big_rational(3, 10));
        let t = exact_terms(0, SeriesVariant::OverKFactorialSquared, 3);
        assert_eq!(t[2], big_rational(3, 40));
    }

    #[test]
    fn printed_variant_diverges() {
        for n in 0..3 {
            let e = evaluate_series(n, SeriesVariant::Printed, DEFAULT_MAX_TERMS, DEFAULT_CUTOFF).unwrap();
            assert_eq!(e.outcome, SeriesOutcome::Diverged, "n={n}");
            assert!(!e.converged);
            assert!(e.limit_estimate.is_none());
            assert!(!e.matches_target);
        }
        let e = evaluate_series(0, SeriesVariant::Printed, DEFAULT_MAX_TERMS, DEFAULT_CUTOFF).unwrap();
        assert_eq!(&e.exact_terms[..3], ["2/1", "1/3", "3/10"]);
        let tail = &e.last_terms;
        assert!(tail.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn single_factorial_reaches_target() {
        for n in 0..4 {
            let e = evaluate_series(n, SeriesVariant::OverKFactorial, DEFAULT_MAX_TERMS, DEFAULT_CUTOFF)
                .unwrap();
            assert!(e.matches_target, "n={n} {:?}", e.target_gap);
        }
        let e = evaluate_series(3, SeriesVariant::OverKFactorial, DEFAULT_MAX_TERMS, DEFAULT_CUTOFF).unwrap();
        assert!(e.converged);
        assert_eq!(e.target_exact, "25/256");
    }

    #[test]
    fn squared_factorial_converges_elsewhere() {
        let e = evaluate_series(0, SeriesVariant::OverKFactorialSquared, DEFAULT_MAX_TERMS, DEFAULT_CUTOFF)
            .unwrap();
        assert!(e.converged);
        assert!(!e.matches_target);
        assert!((e.limit_estimate.unwrap() - 0.7722797).abs() < 1e-5, "{:?}", e.limit_estimate);
    }

    #[test]
    fn partial_sums_are_nondecreasing() {
        for v in SeriesVariant::ALL {
            let e = evaluate_series(1, v, 500, DEFAULT_CUTOFF).unwrap();
            assert!(e.partial_sums.windows(2).all(|w| w[1] >= w[0]), "{v}");
        }
    }

    #[test]
    fn exhaustion_is_reported_not_raised() {
        let e = evaluate_series(0, SeriesVariant::OverKFactorial, 10, DEFAULT_CUTOFF).unwrap();
        assert_eq!(e.outcome, SeriesOutcome::Exhausted);
        assert_eq!(e.terms_evaluated, 10);
        assert!(!e.converged);
        assert!(evaluate_series(0, SeriesVariant::Printed, 0, DEFAULT_CUTOFF).is_err());
        assert!(evaluate_series(0, SeriesVariant::Printed, 10, 0.0).is_err());
    }

    #[test]
    fn variant_names_round_trip() {
        for v in SeriesVariant::ALL {
            assert_eq!(v.name().parse::<SeriesVariant>().unwrap(), v);
        }
        assert!("bogus".parse::<SeriesVariant>().is_err());
    }
}
