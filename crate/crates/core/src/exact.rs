//! Exact integer/rational kernels and the π-power closure of gamma and beta
//! at half-integer arguments.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Mul, Neg};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::sync::RwLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::{parse_rational, rational_string};

/// Default number of factorials kept in the shared memo table.
pub const DEFAULT_FACTORIAL_CACHE_CAP: usize = 100_000;

static FACTORIALS: RwLock<Vec<BigUint>> = RwLock::new(Vec::new());
static FACTORIAL_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_FACTORIAL_CACHE_CAP);

/// Change the memo cap. Entries already cached beyond the new cap are kept.
pub fn set_factorial_cache_cap(cap: usize) {
    FACTORIAL_CAP.store(cap.max(1), AtomicOrdering::Relaxed);
}

pub fn factorial_cache_cap() -> usize {
    FACTORIAL_CAP.load(AtomicOrdering::Relaxed)
}

/// `n!`, memoized up to the cache cap.
pub fn factorial(n: u64) -> BigUint {
    let idx = n as usize;
    {
        let table = FACTORIALS.read().unwrap_or_else(|e| e.into_inner());
        if let Some(v) = table.get(idx) {
            return v.clone();
        }
    }
    let cap = factorial_cache_cap();
    if idx >= cap {
        // Start from the largest cached value instead of from 1.
        let (start, mut acc) = {
            let table = FACTORIALS.read().unwrap_or_else(|e| e.into_inner());
            match table.last() {
                Some(last) => (table.len() as u64, last.clone()),
                None => (1, BigUint::one()),
            }
        };
        for i in start..=n {
            acc *= i;
        }
        return acc;
    }
    let mut table = FACTORIALS.write().unwrap_or_else(|e| e.into_inner());
    if table.is_empty() {
        table.push(BigUint::one());
    }
    while table.len() <= idx {
        let i = table.len() as u64;
        let next = &table[table.len() - 1] * i;
        table.push(next);
    }
    table[idx].clone()
}

/// Binomial coefficient `C(n, k)`, zero outside `0 ≤ k ≤ n`.
pub fn binomial(n: u64, k: i64) -> BigUint {
    if k < 0 || k as u64 > n {
        return BigUint::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `n! / ∏ parts[i]!`; the parts must sum to `n`.
pub fn multinomial(n: u64, parts: &[u64]) -> Result<BigUint> {
    let actual: u64 = parts.iter().sum();
    if actual != n {
        return Err(Error::CompositionSumMismatch { expected: n, actual });
    }
    let mut denom = BigUint::one();
    for &p in parts {
        if p > 1 {
            denom *= factorial(p);
        }
    }
    Ok(factorial(n) / denom)
}

/// Rising factorial `a (a+1) ⋯ (a+m-1)`; `1` when `m = 0`.
pub fn pochhammer(a: &BigRational, m: u64) -> BigRational {
    let mut acc = BigRational::one();
    let mut x = a.clone();
    for _ in 0..m {
        acc *= &x;
        x += BigRational::one();
    }
    acc
}

pub fn big_rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rational_from_uint(value: BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(value))
}

/// A number `doubled / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfInt {
    doubled: i64,
}

impl HalfInt {
    pub const HALF: HalfInt = HalfInt { doubled: 1 };
    pub const ONE: HalfInt = HalfInt { doubled: 2 };

    pub const fn from_doubled(doubled: i64) -> Self {
        HalfInt { doubled }
    }

    pub const fn from_int(value: i64) -> Self {
        HalfInt { doubled: 2 * value }
    }

    pub const fn doubled(self) -> i64 {
        self.doubled
    }

    pub fn is_positive(self) -> bool {
        self.doubled > 0
    }

    pub fn is_integer(self) -> bool {
        self.doubled % 2 == 0
    }

    pub fn to_rational(self) -> BigRational {
        big_rational(self.doubled, 2)
    }

    pub fn to_f64(self) -> f64 {
        self.doubled as f64 / 2.0
    }

    pub fn checked_add_int(self, n: i64) -> HalfInt {
        HalfInt::from_doubled(self.doubled + 2 * n)
    }

    /// Exact conversion from a rational whose double is an integer.
    pub fn from_rational(r: &BigRational) -> Option<HalfInt> {
        let doubled = r * BigRational::from_integer(BigInt::from(2));
        if !doubled.is_integer() {
            return None;
        }
        doubled.to_integer().to_i64().map(HalfInt::from_doubled)
    }
}

impl std::ops::Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt::from_doubled(self.doubled + rhs.doubled)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.doubled % 2 == 0 {
            write!(f, "{}", self.doubled / 2)
        } else {
            write!(f, "{}/2", self.doubled)
        }
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let r = parse_rational(s)?;
        HalfInt::from_rational(&r)
            .ok_or_else(|| Error::InvalidParameter(format!("{s} is not a multiple of 1/2")))
    }
}

/// Exact value `coeff · π^(half_pi_pow / 2)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PiRational {
    coeff: BigRational,
    half_pi_pow: i64,
}

impl PiRational {
    pub fn new(coeff: BigRational, half_pi_pow: i64) -> Self {
        if coeff.is_zero() {
            PiRational::zero()
        } else {
            PiRational { coeff, half_pi_pow }
        }
    }

    pub fn rational(coeff: BigRational) -> Self {
        PiRational::new(coeff, 0)
    }

    pub fn zero() -> Self {
        PiRational {
            coeff: BigRational::zero(),
            half_pi_pow: 0,
        }
    }

    pub fn one() -> Self {
        PiRational::rational(BigRational::one())
    }

    pub fn coeff(&self) -> &BigRational {
        &self.coeff
    }

    /// Exponent of `√π`.
    pub fn half_pi_pow(&self) -> i64 {
        self.half_pi_pow
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    /// The rational coefficient when no π factor remains.
    pub fn as_rational(&self) -> Option<&BigRational> {
        (self.half_pi_pow == 0).then_some(&self.coeff)
    }

    pub fn try_add(&self, other: &PiRational) -> Result<PiRational> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.half_pi_pow != other.half_pi_pow {
            return Err(Error::IncompatiblePiPowers {
                left: self.half_pi_pow,
                right: other.half_pi_pow,
            });
        }
        Ok(PiRational::new(&self.coeff + &other.coeff, self.half_pi_pow))
    }

    pub fn try_sub(&self, other: &PiRational) -> Result<PiRational> {
        self.try_add(&-other.clone())
    }

    pub fn checked_div(&self, other: &PiRational) -> Result<PiRational> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(PiRational::new(
            &self.coeff / &other.coeff,
            self.half_pi_pow - other.half_pi_pow,
        ))
    }

    pub fn recip(&self) -> Result<PiRational> {
        PiRational::one().checked_div(self)
    }

    pub fn scale(&self, factor: &BigRational) -> PiRational {
        PiRational::new(&self.coeff * factor, self.half_pi_pow)
    }

    pub fn powi(&self, exp: i32) -> Result<PiRational> {
        if exp < 0 {
            return self.recip()?.powi(-exp);
        }
        if exp == 0 {
            return Ok(PiRational::one());
        }
        Ok(PiRational::new(
            Pow::pow(&self.coeff, exp as u32),
            self.half_pi_pow * exp as i64,
        ))
    }

    pub fn to_f64(&self) -> f64 {
        let c = crate::format::rational_to_f64(&self.coeff);
        c * std::f64::consts::PI.powf(self.half_pi_pow as f64 / 2.0)
    }
}

impl Mul for PiRational {
    type Output = PiRational;
    fn mul(self, rhs: PiRational) -> PiRational {
        &self * &rhs
    }
}

impl Mul<&PiRational> for &PiRational {
    type Output = PiRational;
    fn mul(self, rhs: &PiRational) -> PiRational {
        PiRational::new(&self.coeff * &rhs.coeff, self.half_pi_pow + rhs.half_pi_pow)
    }
}

impl Neg for PiRational {
    type Output = PiRational;
    fn neg(self) -> PiRational {
        PiRational {
            coeff: -self.coeff,
            half_pi_pow: self.half_pi_pow,
        }
    }
}

impl PartialOrd for PiRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.half_pi_pow == other.half_pi_pow || self.is_zero() || other.is_zero() {
            Some(self.coeff.cmp(&other.coeff))
        } else {
            self.to_f64().partial_cmp(&other.to_f64())
        }
    }
}

impl fmt::Display for PiRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.half_pi_pow {
            0 => write!(f, "{}", self.coeff),
            2 => write!(f, "{}·π", self.coeff),
            e if e % 2 == 0 => write!(f, "{}·π^{}", self.coeff, e / 2),
            e => write!(f, "{}·π^({}/2)", self.coeff, e),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PiRationalRepr {
    coeff: String,
    #[serde(rename = "sqrtPiPow")]
    sqrt_pi_pow: i64,
}

impl Serialize for PiRational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PiRationalRepr {
            coeff: rational_string(&self.coeff),
            sqrt_pi_pow: self.half_pi_pow,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PiRational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = PiRationalRepr::deserialize(d)?;
        let coeff = parse_rational(&repr.coeff).map_err(serde::de::Error::custom)?;
        Ok(PiRational::new(coeff, repr.sqrt_pi_pow))
    }
}

/// `Γ(a)` for `a ∈ ½ℤ⁺`.
pub fn gamma_half(a: HalfInt) -> Result<PiRational> {
    if !a.is_positive() {
        return Err(Error::NonPositiveArgument(a.to_string()));
    }
    let d = a.doubled() as u64;
    if d.is_multiple_of(2) {
        Ok(PiRational::rational(rational_from_uint(factorial(d / 2 - 1))))
    } else {
        // Γ(n + 1/2) = (2n)! / (4^n n!) · √π
        let n = (d - 1) / 2;
        let num = factorial(2 * n);
        let den = factorial(n) << (2 * n as usize);
        Ok(PiRational::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            1,
        ))
    }
}

/// `B(a, b) = Γ(a)Γ(b)/Γ(a+b)` for `a, b ∈ ½ℤ⁺`.
pub fn beta_half(a: HalfInt, b: HalfInt) -> Result<PiRational> {
    if !a.is_positive() {
        return Err(Error::NonPositiveArgument(a.to_string()));
    }
    if !b.is_positive() {
        return Err(Error::NonPositiveArgument(b.to_string()));
    }
    let num = gamma_half(a)? * gamma_half(b)?;
    num.checked_div(&gamma_half(a + b)?)
}

/// `2^e` as an exact rational for any integer `e`.
pub fn pow2(e: i64) -> BigRational {
    let p = BigInt::one() << e.unsigned_abs() as usize;
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// Least common multiple of the denominators of `values`.
pub(crate) fn common_denominator<'a, I>(values: I) -> BigInt
where
    I: IntoIterator<Item = &'a BigRational>,
{
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Scale a row of rationals to integers sharing one denominator.
pub(crate) fn integerize(row: &[BigRational]) -> (Vec<BigInt>, BigInt) {
    let den = common_denominator(row);
    let ints = row
        .iter()
        .map(|v| v.numer() * (&den / v.denom()))
        .collect();
    (ints, den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        big_rational(n, d)
    }

    #[test]
    fn factorial_examples() {
        assert_eq!(factorial(0), BigUint::from(1u32));
        assert_eq!(factorial(5), BigUint::from(120u32));
        assert_eq!(factorial(12), BigUint::from(479_001_600u64));
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(4, 2), BigUint::from(6u32));
        assert_eq!(binomial(6, 3), BigUint::from(20u32));
        assert_eq!(binomial(3, 5), BigUint::zero());
        assert_eq!(binomial(3, -1), BigUint::zero());
        assert_eq!(binomial(0, 0), BigUint::one());
    }

    #[test]
    fn multinomial_examples() {
        assert_eq!(multinomial(2, &[1, 1]).unwrap(), BigUint::from(2u32));
        assert_eq!(multinomial(6, &[2, 2, 2]).unwrap(), BigUint::from(90u32));
        assert_eq!(multinomial(4, &[2, 1, 1]).unwrap(), BigUint::from(12u32));
        assert_eq!(
            multinomial(4, &[2, 1]),
            Err(Error::CompositionSumMismatch {
                expected: 4,
                actual: 3
            })
        );
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(&r(1, 2), 0), r(1, 1));
        assert_eq!(pochhammer(&r(1, 2), 3), r(15, 8));
        assert_eq!(pochhammer(&r(2, 1), 4), r(120, 1));
    }

    #[test]
    fn gamma_half_examples() {
        assert_eq!(
            gamma_half(HalfInt::HALF).unwrap(),
            PiRational::new(r(1, 1), 1)
        );
        assert_eq!(
            gamma_half(HalfInt::from_doubled(5)).unwrap(),
            PiRational::new(r(3, 4), 1)
        );
        assert_eq!(
            gamma_half(HalfInt::from_int(4)).unwrap(),
            PiRational::rational(r(6, 1))
        );
        assert!(matches!(
            gamma_half(HalfInt::from_int(0)),
            Err(Error::NonPositiveArgument(_))
        ));
        assert!(gamma_half(HalfInt::from_doubled(-3)).is_err());
    }

    #[test]
    fn beta_half_examples() {
        assert_eq!(
            beta_half(HalfInt::HALF, HalfInt::HALF).unwrap(),
            PiRational::new(r(1, 1), 2)
        );
        assert_eq!(
            beta_half(HalfInt::from_doubled(3), HalfInt::HALF).unwrap(),
            PiRational::new(r(1, 2), 2)
        );
        assert_eq!(
            beta_half(HalfInt::from_int(2), HalfInt::from_int(1)).unwrap(),
            PiRational::rational(r(1, 2))
        );
        assert!(beta_half(HalfInt::from_int(0), HalfInt::ONE).is_err());
        assert!(beta_half(HalfInt::ONE, HalfInt::from_doubled(-1)).is_err());
    }

    #[test]
    fn pi_rational_zero_is_canonical() {
        let z = PiRational::new(r(0, 1), 7);
        assert_eq!(z.half_pi_pow(), 0);
        assert_eq!(z, PiRational::zero());
        let x = PiRational::new(r(3, 2), 3);
        assert_eq!(x.try_add(&PiRational::zero()).unwrap(), x);
        assert_eq!(x.try_sub(&x).unwrap(), PiRational::zero());
    }

    #[test]
    fn pi_rational_rejects_mixed_addition_and_zero_division() {
        let a = PiRational::new(r(1, 2), 1);
        let b = PiRational::new(r(1, 3), 2);
        assert_eq!(
            a.try_add(&b),
            Err(Error::IncompatiblePiPowers { left: 1, right: 2 })
        );
        assert_eq!(a.checked_div(&PiRational::zero()), Err(Error::DivisionByZero));
        assert_eq!(PiRational::zero().recip(), Err(Error::DivisionByZero));
    }

    #[test]
    fn pi_rational_pow_and_div() {
        let a = PiRational::new(r(2, 3), 1);
        assert_eq!(a.powi(3).unwrap(), PiRational::new(r(8, 27), 3));
        assert_eq!(a.powi(-2).unwrap(), PiRational::new(r(9, 4), -2));
        assert_eq!(a.checked_div(&a).unwrap(), PiRational::one());
    }

    #[test]
    fn pi_rational_json_shape() {
        let v = PiRational::new(r(3, 4), 1);
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, r#"{"coeff":"3/4","sqrtPiPow":1}"#);
        let back: PiRational = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
        let int = serde_json::to_string(&PiRational::rational(r(5, 1))).unwrap();
        assert_eq!(int, r#"{"coeff":"5/1","sqrtPiPow":0}"#);
    }

    #[test]
    fn half_int_parse_and_display() {
        assert_eq!("3/2".parse::<HalfInt>().unwrap(), HalfInt::from_doubled(3));
        assert_eq!("2".parse::<HalfInt>().unwrap(), HalfInt::from_int(2));
        assert_eq!("4/8".parse::<HalfInt>().unwrap(), HalfInt::HALF);
        assert!("1/3".parse::<HalfInt>().is_err());
        assert_eq!(HalfInt::from_doubled(5).to_string(), "5/2");
        assert_eq!(HalfInt::from_int(3).to_string(), "3");
    }

    #[test]
    fn duplication_formula_small_range() {
        let root = gamma_half(HalfInt::HALF).unwrap();
        for n in 0..=40u64 {
            let ratio = gamma_half(HalfInt::from_doubled(2 * n as i64 + 1))
                .unwrap()
                .checked_div(&root)
                .unwrap();
            let expect = BigRational::new(
                BigInt::from(binomial(2 * n, n as i64) * factorial(n)),
                BigInt::from(BigUint::one() << (2 * n as usize)),
            );
            assert_eq!(ratio.half_pi_pow(), 0);
            assert_eq!(ratio.coeff(), &expect, "n = {n}");
        }
    }

    #[test]
    fn factorial_beyond_cap_is_still_exact() {
        // factorial(30) with a cold path uses the cached prefix when present
        let direct: BigUint = (1..=30u64).fold(BigUint::one(), |acc, i| acc * i);
        assert_eq!(factorial(30), direct);
    }

    #[test]
    fn factorial_concurrent_reads_agree() {
        let handles: Vec<_> = (0..8)
            .map(|t| std::thread::spawn(move || factorial(200 + t)))
            .collect();
        for (t, h) in handles.into_iter().enumerate() {
            let got = h.join().unwrap();
            let direct: BigUint = (1..=200 + t as u64).fold(BigUint::one(), |acc, i| acc * i);
            assert_eq!(got, direct);
        }
    }

    #[test]
    fn integerize_shares_denominator() {
        let row = vec![r(1, 2), r(2, 3), r(-5, 6)];
        let (ints, den) = integerize(&row);
        assert_eq!(den, BigInt::from(6));
        assert_eq!(ints, vec![BigInt::from(3), BigInt::from(4), BigInt::from(-5)]);
    }
}
