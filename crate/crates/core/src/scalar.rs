//! Scalar abstraction shared by the exact and floating-point expansion paths.
//!
//! The multinomial kernels in [`crate::expansion`] only need a commutative ring
//! with a way to accumulate terms. Exact types (`BigInt`, `BigRational`) sum
//! with plain addition; floats sum through a Neumaier compensated accumulator
//! that also tracks the absolute mass of the terms, which is what the
//! cancellation diagnostics need.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num};

/// A running sum of terms of type `T`.
pub trait Accumulator<T>: Clone + Send {
    fn new() -> Self;
    fn push(&mut self, term: T);
    /// Append another partial sum. Merging in a fixed order keeps float results reproducible.
    fn merge(&mut self, other: Self);
    fn total(&self) -> T;
}

/// Ring element usable by the expansion kernels.
pub trait Scalar: Num + Neg<Output = Self> + Clone + Debug + Send + Sync {
    type Acc: Accumulator<Self>;

    fn from_bigint(value: &BigInt) -> Self;
}

/// Exact accumulator: addition never rounds so order is irrelevant.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactSum<T> {
    total: T,
}

impl<T: Num + Clone + Send> Accumulator<T> for ExactSum<T> {
    fn new() -> Self {
        ExactSum { total: T::zero() }
    }

    fn push(&mut self, term: T) {
        let acc = std::mem::replace(&mut self.total, T::zero());
        self.total = acc + term;
    }

    fn merge(&mut self, other: Self) {
        self.push(other.total);
    }

    fn total(&self) -> T {
        self.total.clone()
    }
}

/// Kahan-Babuska-Neumaier summation, plus the running sum of `|term|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompensatedSum<F> {
    sum: F,
    compensation: F,
    abs_sum: F,
    abs_compensation: F,
    count: u64,
}

#[inline]
fn two_sum<F: Float>(acc: F, term: F) -> (F, F) {
    let s = acc + term;
    let c = if acc.abs() >= term.abs() {
        (acc - s) + term
    } else {
        (term - s) + acc
    };
    (s, c)
}

impl<F: Float> CompensatedSum<F> {
    pub fn zero() -> Self {
        CompensatedSum {
            sum: F::zero(),
            compensation: F::zero(),
            abs_sum: F::zero(),
            abs_compensation: F::zero(),
            count: 0,
        }
    }

    pub fn add(&mut self, term: F) {
        let (s, c) = two_sum(self.sum, term);
        self.sum = s;
        self.compensation = self.compensation + c;
        let (a, ac) = two_sum(self.abs_sum, term.abs());
        self.abs_sum = a;
        self.abs_compensation = self.abs_compensation + ac;
        self.count += 1;
    }

    pub fn value(&self) -> F {
        self.sum + self.compensation
    }

    /// Sum of absolute values of every term pushed so far.
    pub fn abs_value(&self) -> F {
        self.abs_sum + self.abs_compensation
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// `Σ|t| / |Σ t|`; infinite when the sum cancels to exactly zero with non-zero mass.
    pub fn condition_number(&self) -> F {
        let value = self.value().abs();
        let mass = self.abs_value();
        if mass.is_zero() {
            F::one()
        } else if value.is_zero() {
            F::infinity()
        } else {
            mass / value
        }
    }

    pub fn absorb(&mut self, other: &Self) {
        let (s, c) = two_sum(self.sum, other.sum);
        self.sum = s;
        self.compensation = self.compensation + c + other.compensation;
        let (a, ac) = two_sum(self.abs_sum, other.abs_sum);
        self.abs_sum = a;
        self.abs_compensation = self.abs_compensation + ac + other.abs_compensation;
        self.count += other.count;
    }
}

impl<F: Float> Default for CompensatedSum<F> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<F: Float + Send> Accumulator<F> for CompensatedSum<F> {
    fn new() -> Self {
        Self::zero()
    }

    fn push(&mut self, term: F) {
        self.add(term);
    }

    fn merge(&mut self, other: Self) {
        self.absorb(&other);
    }

    fn total(&self) -> F {
        self.value()
    }
}

impl<F: Float> FromIterator<F> for CompensatedSum<F> {
    fn from_iter<I: IntoIterator<Item = F>>(iter: I) -> Self {
        let mut acc = Self::zero();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

impl Scalar for f64 {
    type Acc = CompensatedSum<f64>;

    fn from_bigint(value: &BigInt) -> Self {
        num_traits::ToPrimitive::to_f64(value).unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {
    type Acc = CompensatedSum<f32>;

    fn from_bigint(value: &BigInt) -> Self {
        num_traits::ToPrimitive::to_f32(value).unwrap_or(f32::NAN)
    }
}

impl Scalar for BigInt {
    type Acc = ExactSum<BigInt>;

    fn from_bigint(value: &BigInt) -> Self {
        value.clone()
    }
}

impl Scalar for BigRational {
    type Acc = ExactSum<BigRational>;

    fn from_bigint(value: &BigInt) -> Self {
        BigRational::from_integer(value.clone())
    }
}

/// Convert an `f64` constant into any float type.
#[inline]
pub(crate) fn cst<F: Float + FromPrimitive>(x: f64) -> F {
    F::from_f64(x).expect("constant representable in target float type")
}
