//! Registry of standalone binomial/beta identities with exact verifiers.
//!
//! Several formulas fail when evaluated exactly as printed. Those entries are
//! verified in corrected form, and every report still carries the printed
//! form's two sides so the failure is reproducible.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{
    beta_half, big_rational, binomial, factorial, gamma_half, pow2, rational_from_uint, HalfInt,
    PiRational,
};
use crate::expansion::exact_composition_product_sum;
use crate::moments::{lhs_master, BetaParams, CoefficientVector};
use crate::report::{params, IdentityReport, PrintedForm};
use crate::walk::{closed_form_2d, returning_paths};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Printed,
    Corrected,
}

/// One parameter point of an entry's declared range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Point {
    N(u64),
    NP(u64, HalfInt),
    NK(u64, u32),
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CatalogEntry {
    pub name: &'static str,
    /// Where the identity appears in the source text.
    #[serde(rename = "paperLocation")]
    pub location: &'static str,
    pub variant: Variant,
    pub parameter_range: &'static str,
    /// What differs from the printed form, for corrected entries.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub erratum: Option<&'static str>,
}

impl CatalogEntry {
    /// Parameter points covered by `catalog verify`.
    pub fn points(&self) -> Vec<Point> {
        match self.name {
            "convolution" | "alternating" => (1..=50).map(Point::N).collect(),
            "one-dim-general-p" => {
                let ps = [1, 2, 3, 4, 5].map(HalfInt::from_doubled);
                (1..=12)
                    .flat_map(|n| ps.iter().map(move |&p| Point::NP(n, p)))
                    .collect()
            }
            "two-dim-remark" => (1..=12).map(Point::N).collect(),
            "three-dim-remark" => (1..=8).map(Point::N).collect(),
            "k-dim-remark" => (1..=6)
                .flat_map(|n| (1..=4).map(move |k| Point::NK(n, k)))
                .collect(),
            "vandermonde" => (1..=100).map(Point::N).collect(),
            "duplication" => (0..=100).map(Point::N).collect(),
            _ => Vec::new(),
        }
    }

    pub fn verify_point(&self, point: Point) -> Result<IdentityReport> {
        match (self.name, point) {
            ("convolution", Point::N(n)) => verify_convolution(n),
            ("alternating", Point::N(n)) => verify_alternating(n),
            ("one-dim-general-p", Point::NP(n, p)) => {
                verify_one_dim_general_p(n, BetaParams::new(p)?)
            }
            ("two-dim-remark", Point::N(n)) => verify_two_dim_remark(n),
            ("three-dim-remark", Point::N(n)) => verify_three_dim_remark(n),
            ("k-dim-remark", Point::NK(n, k)) => verify_k_dim_remark(n, k),
            ("vandermonde", Point::N(n)) => verify_vandermonde(n),
            ("duplication", Point::N(n)) => verify_duplication(n),
            (name, point) => Err(Error::InvalidParameter(format!(
                "{point:?} is not a parameter point of {name}"
            ))),
        }
    }

    /// Verify every point of the declared range; report order follows [`Self::points`].
    pub fn verify_all(&self) -> Result<Vec<IdentityReport>> {
        self.points()
            .into_par_iter()
            .map(|pt| self.verify_point(pt))
            .collect()
    }

    /// The point at which the printed form is shown to fail.
    pub fn counterexample(&self) -> Option<Result<IdentityReport>> {
        let point = match self.name {
            "convolution" | "alternating" | "two-dim-remark" => Point::N(1),
            "one-dim-general-p" => Point::NP(1, HalfInt::HALF),
            "k-dim-remark" => Point::NK(1, 1),
            _ => return None,
        };
        Some(self.verify_point(point))
    }
}

pub const CATALOG: [CatalogEntry; 8] = [
    CatalogEntry {
        name: "convolution",
        location: "introduction: central binomial convolution summing to 4^n",
        variant: Variant::Corrected,
        parameter_range: "1 <= n <= 50",
        erratum: Some("printed sum starts at k=1 and then equals 4^n - C(2n,n); the sum must start at k=0"),
    },
    CatalogEntry {
        name: "alternating",
        location: "introduction: alternating central binomial identity; restated in the remark closing the one-dimensional walk section",
        variant: Variant::Corrected,
        parameter_range: "1 <= n <= 50",
        erratum: Some("the remark's restatement sums j only up to n; the upper limit must be 2n"),
    },
    CatalogEntry {
        name: "one-dim-general-p",
        location: "special case with a single coefficient (all other c_s = 0)",
        variant: Variant::Corrected,
        parameter_range: "1 <= n <= 12, p in {1/2, 1, 3/2, 2, 5/2}",
        erratum: Some("printed sum stops at j=n; the single-coefficient expansion runs j up to 2n"),
    },
    CatalogEntry {
        name: "two-dim-remark",
        location: "remark closing the two-dimensional walk section",
        variant: Variant::Corrected,
        parameter_range: "1 <= n <= 12",
        erratum: Some("remark says p=2, but the displayed identity is the p=1/2 specialization; at p=2 the two-coefficient identity has a different value"),
    },
    CatalogEntry {
        name: "three-dim-remark",
        location: "remark closing the three-dimensional walk section",
        variant: Variant::Printed,
        parameter_range: "1 <= n <= 8",
        erratum: None,
    },
    CatalogEntry {
        name: "k-dim-remark",
        location: "remark closing the k-dimensional generalization",
        variant: Variant::Corrected,
        parameter_range: "1 <= n <= 6, 1 <= k <= 4",
        erratum: Some("printed weight (-2/k)^j with prefactor 1/k^{2n}; substituting p=1/2, c=1/k gives (-1/(2k))^j and (1/(2k))^{2n}"),
    },
    CatalogEntry {
        name: "vandermonde",
        location: "two-dimensional path count, Vandermonde step",
        variant: Variant::Printed,
        parameter_range: "1 <= n <= 100",
        erratum: None,
    },
    CatalogEntry {
        name: "duplication",
        location: "one-dimensional walk section: gamma duplication ratio",
        variant: Variant::Printed,
        parameter_range: "0 <= n <= 100",
        erratum: None,
    },
];

pub fn entry(name: &str) -> Option<&'static CatalogEntry> {
    CATALOG.iter().find(|e| e.name == name)
}

fn q(num: BigInt) -> BigRational {
    BigRational::from_integer(num)
}

fn cb(n: u64) -> BigRational {
    rational_from_uint(binomial(2 * n, n as i64))
}

fn exact(r: BigRational) -> PiRational {
    PiRational::rational(r)
}

fn printed(lhs: PiRational, rhs: PiRational, description: &str) -> PrintedForm {
    PrintedForm {
        holds: lhs == rhs,
        lhs,
        rhs,
        description: description.to_string(),
    }
}

fn finish(
    name: &str,
    parameters: std::collections::BTreeMap<String, String>,
    lhs: PiRational,
    rhs: PiRational,
    start: Instant,
    printed_form: Option<PrintedForm>,
) -> IdentityReport {
    let mut report = IdentityReport::exact(name, parameters, lhs, rhs, start.elapsed());
    if let Some(pf) = &printed_form {
        if !pf.holds {
            report
                .notes
                .push(format!("ERRATUM: printed form fails here ({})", pf.description));
        }
    }
    report.printed_form = printed_form;
    report
}

fn need_positive(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    Ok(())
}

/// `Σ_{k=0}^{n} C(2k,k) C(2n−2k,n−k) = 4ⁿ`.
pub fn verify_convolution(n: u64) -> Result<IdentityReport> {
    need_positive(n)?;
    let start = Instant::now();
    let term = |k: u64| cb(k) * cb(n - k);
    let from_one: BigRational = (1..=n).map(term).sum();
    let lhs = &from_one + term(0);
    let rhs = q(BigInt::from(4).pow(n as u32));
    Ok(finish(
        "convolution",
        params([("n", n)]),
        exact(lhs),
        exact(rhs.clone()),
        start,
        Some(printed(exact(from_one), exact(rhs), "sum from k=1")),
    ))
}

/// `Σ_{k=0}^{2n} (−1)ᵏ C(2n,k) C(2k,k) / 2ᵏ = C(2n,n) / 4ⁿ`.
pub fn verify_alternating(n: u64) -> Result<IdentityReport> {
    need_positive(n)?;
    let start = Instant::now();
    let term = |k: u64| {
        let sign = if k.is_multiple_of(2) { 1 } else { -1 };
        rational_from_uint(binomial(2 * n, k as i64) * binomial(2 * k, k as i64))
            * pow2(-(k as i64))
            * big_rational(sign, 1)
    };
    let to_n: BigRational = (0..=n).map(term).sum();
    let lhs = &to_n + (n + 1..=2 * n).map(term).sum::<BigRational>();
    let rhs = cb(n) * pow2(-2 * n as i64);
    Ok(finish(
        "alternating",
        params([("n", n)]),
        exact(lhs),
        exact(rhs.clone()),
        start,
        Some(printed(exact(to_n), exact(rhs), "upper limit n")),
    ))
}

/// `Σ_{j=0}^{2n} C(2n,j) (−2)ʲ B(j+p,p) = B(n+1/2,p) / 2^{2p−1}`.
pub fn verify_one_dim_general_p(n: u64, p: BetaParams) -> Result<IdentityReport> {
    need_positive(n)?;
    let start = Instant::now();
    let term = |j: u64| -> Result<PiRational> {
        let w = rational_from_uint(binomial(2 * n, j as i64)) * Pow::pow(big_rational(-2, 1), j as u32);
        Ok(beta_half(p.p().checked_add_int(j as i64), p.p())?.scale(&w))
    };
    let mut to_n = PiRational::zero();
    for j in 0..=n {
        to_n = to_n.try_add(&term(j)?)?;
    }
    let mut lhs = to_n.clone();
    for j in n + 1..=2 * n {
        lhs = lhs.try_add(&term(j)?)?;
    }
    let rhs = beta_half(HalfInt::from_doubled(2 * n as i64 + 1), p.p())?
        .scale(&pow2(-p.two_p_minus_one()));
    Ok(finish(
        "one-dim-general-p",
        params([("n", n.to_string()), ("p", p.p().to_string())]),
        lhs,
        rhs.clone(),
        start,
        Some(printed(to_n, rhs, "upper limit n")),
    ))
}

/// `Σ_{j ⊢ 2n, k+1 parts} (2n; j) ∏ₛ w^{j_{s+1}} C(2j_{s+1}, j_{s+1})` for weight `w`.
fn central_binomial_expansion(n: u64, k: usize, weight: &BigRational) -> Result<BigRational> {
    let top = 2 * n;
    let inv_fact = |j: u64| BigRational::new(BigInt::one(), factorial(j).into());
    let mut rows = vec![(0..=top).map(inv_fact).collect::<Vec<_>>()];
    let row: Vec<BigRational> = (0..=top)
        .map(|j| Pow::pow(weight, j as u32) * cb(j) * inv_fact(j))
        .collect();
    rows.extend(std::iter::repeat_n(row, k));
    Ok(exact_composition_product_sum(top, &rows, 1)? * rational_from_uint(factorial(top)))
}

/// The p = 1/2, c = (1/2, 1/2) two-coefficient identity, equal to `C(2n,n)²/4^{2n}`.
pub fn verify_two_dim_remark(n: u64) -> Result<IdentityReport> {
    need_positive(n)?;
    let start = Instant::now();
    let lhs = central_binomial_expansion(n, 2, &big_rational(-1, 4))?;
    let rhs = closed_form_2d(n as u32);
    // the same two-coefficient identity evaluated at the labelled p = 2
    let at_p2 = lhs_master(
        n,
        &CoefficientVector::walk(2)?,
        BetaParams::new(HalfInt::from_int(2))?,
    )?;
    Ok(finish(
        "two-dim-remark",
        params([("n", n.to_string()), ("p", "1/2".to_string())]),
        exact(lhs),
        exact(rhs.clone()),
        start,
        Some(printed(at_p2, exact(rhs), "two-coefficient identity at the labelled p=2")),
    ))
}

/// `(1/(2k))^{2n} Σ (2n)!/∏ iⱼ!²`.
fn walk_side(n: u64, k: u32) -> Result<BigRational> {
    let count = rational_from_uint(returning_paths(k, n as u32)?);
    Ok(count * Pow::pow(big_rational(1, 2 * k as i64), (2 * n) as u32))
}

/// The p = 1/2, c = (1/3, 1/3, 1/3) identity, as printed.
pub fn verify_three_dim_remark(n: u64) -> Result<IdentityReport> {
    need_positive(n)?;
    let start = Instant::now();
    let lhs = central_binomial_expansion(n, 3, &big_rational(-1, 6))?;
    let rhs = walk_side(n, 3)?;
    Ok(finish(
        "three-dim-remark",
        params([("n", n)]),
        exact(lhs),
        exact(rhs),
        start,
        None,
    ))
}

/// The p = 1/2, c = (1/k, …) identity with weight `(−1/(2k))ʲ` and prefactor `(1/(2k))^{2n}`.
pub fn verify_k_dim_remark(n: u64, k: u32) -> Result<IdentityReport> {
    need_positive(n)?;
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let start = Instant::now();
    let lhs = central_binomial_expansion(n, k as usize, &big_rational(-1, 2 * k as i64))?;
    let rhs = walk_side(n, k)?;
    let printed_lhs = central_binomial_expansion(n, k as usize, &big_rational(-2, k as i64))?;
    let printed_rhs = rational_from_uint(returning_paths(k, n as u32)?)
        * Pow::pow(big_rational(1, k as i64), (2 * n) as u32);
    Ok(finish(
        "k-dim-remark",
        params([("n", n), ("k", k as u64)]),
        exact(lhs),
        exact(rhs),
        start,
        Some(printed(
            exact(printed_lhs),
            exact(printed_rhs),
            "weight (-2/k)^j, prefactor 1/k^{2n}",
        )),
    ))
}

/// `Σ_{k=0}^{n} C(n,k) C(n,n−k) = C(2n,n)`.
pub fn verify_vandermonde(n: u64) -> Result<IdentityReport> {
    need_positive(n)?;
    let start = Instant::now();
    let lhs: BigRational = (0..=n)
        .map(|k| rational_from_uint(binomial(n, k as i64) * binomial(n, (n - k) as i64)))
        .sum();
    Ok(finish(
        "vandermonde",
        params([("n", n)]),
        exact(lhs),
        exact(cb(n)),
        start,
        None,
    ))
}

/// `Γ(n+1/2)/Γ(1/2) = C(2n,n) n! / 4ⁿ`.
pub fn verify_duplication(n: u64) -> Result<IdentityReport> {
    let start = Instant::now();
    let lhs = gamma_half(HalfInt::from_doubled(2 * n as i64 + 1))?
        .checked_div(&gamma_half(HalfInt::HALF)?)?;
    let rhs = cb(n) * rational_from_uint(factorial(n)) * pow2(-2 * n as i64);
    Ok(finish(
        "duplication",
        params([("n", n)]),
        lhs,
        exact(rhs),
        start,
        None,
    ))
}

/// Exact value of a rational-only report side, for tests and tables.
pub fn rational_side(v: &crate::report::SideValue) -> Option<BigRational> {
    v.as_exact().and_then(|p| p.as_rational().cloned())
}
