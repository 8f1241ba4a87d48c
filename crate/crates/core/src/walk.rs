//! Return probabilities of the simple symmetric walk on `ℤᵏ`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{big_rational, binomial, factorial, rational_from_uint};
use crate::expansion::exact_composition_product_sum;

/// Default cap on the number of paths the exhaustive oracle will visit.
pub const DEFAULT_PATH_BUDGET: u64 = 10_000_000;

/// A walk of `2·half_steps` steps on `ℤ^dimension`, each unit move with probability `1/(2k)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WalkSpec {
    dimension: u32,
    half_steps: u32,
}

impl WalkSpec {
    pub fn new(dimension: u32, half_steps: u32) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        if half_steps == 0 {
            return Err(Error::InvalidParameter("half-steps must be at least 1".into()));
        }
        Ok(WalkSpec {
            dimension,
            half_steps,
        })
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn half_steps(&self) -> u32 {
        self.half_steps
    }

    pub fn steps(&self) -> u32 {
        2 * self.half_steps
    }

    pub fn step_probability(&self) -> BigRational {
        big_rational(1, 2 * self.dimension as i64)
    }
}

/// Number of returning paths `N₂ₙ` out of `(2k)^{2n}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathCount {
    pub count: BigUint,
    pub total_paths: BigUint,
}

impl PathCount {
    pub fn probability(&self) -> BigRational {
        BigRational::new(self.count.clone().into(), self.total_paths.clone().into())
    }
}

fn check(k: u32, n: u32) -> Result<()> {
    WalkSpec::new(k, n).map(|_| ())
}

/// `N₂ₙ = Σ_{i ⊢ n into k parts} (2n)! / ∏ iⱼ!²`, the number of closed paths.
pub fn returning_paths(k: u32, n: u32) -> Result<BigUint> {
    check(k, n)?;
    let row: Vec<BigRational> = (0..=n as u64)
        .map(|i| {
            let f: BigInt = factorial(i).into();
            BigRational::new(BigInt::one(), &f * &f)
        })
        .collect();
    let sum = exact_composition_product_sum(n as u64, &vec![row; k as usize], 1)?
        * rational_from_uint(factorial(2 * n as u64));
    debug_assert!(sum.is_integer());
    Ok(sum
        .to_integer()
        .to_biguint()
        .expect("path count is non-negative"))
}

/// `P₀₀²ⁿ(k) = (1/(2k))^{2n} N₂ₙ`.
pub fn return_probability(k: u32, n: u32) -> Result<BigRational> {
    let count = returning_paths(k, n)?;
    let total = Pow::pow(BigUint::from(2 * k), 2 * n);
    Ok(BigRational::new(count.into(), total.into()))
}

/// The walk changes parity every step, so odd-length returns are impossible.
pub fn return_probability_odd(k: u32, steps: u32) -> Result<BigRational> {
    if k == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    if steps.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("{steps} steps is not odd")));
    }
    Ok(BigRational::zero())
}

/// `C(2n, n) / 4ⁿ`.
pub fn closed_form_1d(n: u32) -> BigRational {
    let n = n as u64;
    BigRational::new(
        binomial(2 * n, n as i64).into(),
        BigInt::from(4).pow(n as u32),
    )
}

/// `C(2n, n)² / 4^{2n}`.
pub fn closed_form_2d(n: u32) -> BigRational {
    let one = closed_form_1d(n);
    &one * &one
}

/// Visit all `(2k)^{2n}` step sequences and count those ending at the origin.
///
/// The sequence is an odometer over base-`2k` digits; direction `d` moves along
/// axis `d / 2` by `+1` for even `d`, `−1` for odd. Displacements are updated
/// incrementally so each path costs amortized O(1).
pub fn brute_force_return(k: u32, n: u32, budget: u64) -> Result<PathCount> {
    check(k, n)?;
    let base = 2 * k as u64;
    let steps = 2 * n as usize;
    let total = Pow::pow(BigUint::from(base), steps as u32);
    let within = u64::try_from(&total).ok().filter(|&t| t <= budget);
    let Some(total_u64) = within else {
        return Err(Error::BudgetExceeded {
            required: total.to_string(),
            budget,
        });
    };

    let mut digits = vec![0u64; steps];
    let mut disp = vec![0i64; k as usize];
    // every step starts as direction 0: +1 on axis 0
    disp[0] = steps as i64;
    let mut off_origin = usize::from(disp[0] != 0);
    let mut count: u64 = 0;

    let shift = |disp: &mut [i64], off: &mut usize, dir: u64, sign: i64| {
        let axis = (dir / 2) as usize;
        let delta = if dir.is_multiple_of(2) { sign } else { -sign };
        let before = disp[axis] != 0;
        disp[axis] += delta;
        let after = disp[axis] != 0;
        match (before, after) {
            (true, false) => *off -= 1,
            (false, true) => *off += 1,
            _ => {}
        }
    };

    for _ in 0..total_u64 {
        if off_origin == 0 {
            count += 1;
        }
        // odometer increment
        for d in digits.iter_mut() {
            shift(&mut disp, &mut off_origin, *d, -1);
            if *d + 1 < base {
                *d += 1;
                shift(&mut disp, &mut off_origin, *d, 1);
                break;
            }
            *d = 0;
            shift(&mut disp, &mut off_origin, 0, 1);
        }
    }
    Ok(PathCount {
        count: BigUint::from(count),
        total_paths: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        big_rational(n, d)
    }

    #[test]
    fn return_probability_examples() {
        assert_eq!(return_probability(1, 1).unwrap(), r(1, 2));
        assert_eq!(return_probability(2, 1).unwrap(), r(1, 4));
        assert_eq!(return_probability(3, 2).unwrap(), r(5, 72));
        assert_eq!(return_probability(3, 3).unwrap(), r(155, 3888));
        assert!(return_probability(0, 1).is_err());
        assert!(return_probability(1, 0).is_err());
    }

    #[test]
    fn odd_lengths_never_return() {
        assert!(return_probability_odd(1, 3).unwrap().is_zero());
        assert!(return_probability_odd(2, 1).unwrap().is_zero());
        assert!(return_probability_odd(5, 7).unwrap().is_zero());
        assert!(return_probability_odd(2, 4).is_err());
    }

    #[test]
    fn closed_forms() {
        assert_eq!(closed_form_1d(2), r(3, 8));
        assert_eq!(closed_form_2d(1), r(1, 4));
        assert_eq!(closed_form_2d(5), r(3969, 65536));
    }

    #[test]
    fn brute_force_examples() {
        let c = brute_force_return(1, 2, DEFAULT_PATH_BUDGET).unwrap();
        assert_eq!((c.count, c.total_paths), (6u32.into(), 16u32.into()));
        let c = brute_force_return(2, 2, DEFAULT_PATH_BUDGET).unwrap();
        assert_eq!((c.count, c.total_paths), (36u32.into(), 256u32.into()));
        let c = brute_force_return(3, 2, DEFAULT_PATH_BUDGET).unwrap();
        assert_eq!((c.count, c.total_paths), (90u32.into(), 1296u32.into()));
    }

    #[test]
    fn brute_force_refuses_over_budget() {
        match brute_force_return(3, 10, DEFAULT_PATH_BUDGET) {
            Err(Error::BudgetExceeded { required, budget }) => {
                assert_eq!(required, "3656158440062976");
                assert_eq!(budget, DEFAULT_PATH_BUDGET);
            }
            other => panic!("expected refusal, got {other:?}"),
        }
        assert!(brute_force_return(1, 2, 15).is_err());
        assert!(brute_force_return(1, 2, 16).is_ok());
    }

    #[test]
    fn closed_forms_match_composition_sum() {
        for n in 1..=30 {
            assert_eq!(return_probability(1, n).unwrap(), closed_form_1d(n));
        }
        for n in 1..=20 {
            assert_eq!(return_probability(2, n).unwrap(), closed_form_2d(n));
        }
    }

    #[test]
    fn probabilities_decrease_and_stay_in_unit_interval() {
        for k in 1..=5 {
            let mut prev = BigRational::one();
            for n in 1..=12 {
                let p = return_probability(k, n).unwrap();
                assert!(p > BigRational::zero() && p <= BigRational::one());
                assert!(p < prev, "k={k} n={n}");
                prev = p;
            }
        }
    }

    #[test]
    fn walk_spec_invariants() {
        let s = WalkSpec::new(3, 2).unwrap();
        assert_eq!(s.step_probability() * r(6, 1), BigRational::one());
        assert_eq!(s.steps(), 4);
        assert!(WalkSpec::new(0, 2).is_err());
        assert!(WalkSpec::new(2, 0).is_err());
    }
}
