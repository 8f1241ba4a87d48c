//! Multinomial expansion kernels, generic over the scalar type.
//!
//! Both expansions of `E[(Σ cᵢUᵢ)^{2n}]` reduce to
//!
//! ```text
//! Σ_{a ∈ weak compositions of `total` into m parts}  ∏_s rows[s][a_s]
//! ```
//!
//! with the multinomial's `1/a_s!` folded into the rows. The same code runs on
//! `f32`/`f64` (compensated), `BigRational`, or `BigInt` rows that were scaled
//! to a common denominator, which is how the exact path avoids a gcd per term.

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::compositions::{count_u64, rank_chunks, WeakCompositions};
use crate::error::{Error, Result};
use crate::exact::integerize;
use crate::scalar::{Accumulator, Scalar};

/// Below this many terms the kernel never spawns a pool.
const PARALLEL_THRESHOLD: u64 = 20_000;

fn term<T: Scalar>(rows: &[Vec<T>], parts: &[u64]) -> T {
    let mut acc = rows[0][parts[0] as usize].clone();
    for (row, &p) in rows.iter().zip(parts).skip(1) {
        acc = acc * row[p as usize].clone();
    }
    acc
}

fn check_rows<T>(total: u64, rows: &[Vec<T>]) -> Result<u64> {
    if rows.is_empty() {
        return Err(Error::InvalidParameter("expansion needs at least one row".into()));
    }
    if let Some(short) = rows.iter().position(|r| (r.len() as u64) <= total) {
        return Err(Error::InvalidParameter(format!(
            "row {short} has {} entries, needs {}",
            rows[short].len(),
            total + 1
        )));
    }
    count_u64(total, rows.len() as u64)
        .ok_or_else(|| Error::TooLarge(format!("compositions of {total} into {}", rows.len())))
}

/// Sum of `∏_s rows[s][a_s]` over all weak compositions `a` of `total`.
///
/// With `threads > 1` the colex stream is split into rank ranges and the partial
/// accumulators are merged in range order, so exact scalars give identical
/// results for every thread count and floats give identical results for a
/// fixed thread count.
pub fn composition_product_sum<T: Scalar>(
    total: u64,
    rows: &[Vec<T>],
    threads: usize,
) -> Result<T::Acc> {
    let len = check_rows(total, rows)?;
    let parts = rows.len();
    let run = |start: u64, size: u64| -> Result<T::Acc> {
        let mut acc = T::Acc::new();
        WeakCompositions::range(total, parts, start, size)?
            .for_each_slice(|a| acc.push(term(rows, a)));
        Ok(acc)
    };
    if threads <= 1 || len < PARALLEL_THRESHOLD {
        return run(0, len);
    }
    let ranges = rank_chunks(len, threads * 4);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let partials: Vec<Result<T::Acc>> =
        pool.install(|| ranges.par_iter().map(|&(s, l)| run(s, l)).collect());
    let mut acc = T::Acc::new();
    for p in partials {
        acc.merge(p?);
    }
    Ok(acc)
}

/// Exact version of [`composition_product_sum`] for rational rows.
///
/// Each row is scaled to integers over its own common denominator; the sum runs
/// in `BigInt` and is divided by the product of denominators once at the end.
pub fn exact_composition_product_sum(
    total: u64,
    rows: &[Vec<BigRational>],
    threads: usize,
) -> Result<BigRational> {
    let mut int_rows = Vec::with_capacity(rows.len());
    let mut den = BigInt::from(1);
    for row in rows {
        let (ints, d) = integerize(row);
        int_rows.push(ints);
        den *= d;
    }
    let sum = composition_product_sum::<BigInt>(total, &int_rows, threads)?.total();
    Ok(BigRational::new(sum, den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compositions::weak_compositions;
    use crate::exact::{big_rational as r, factorial, multinomial, rational_from_uint};
    use num_traits::{One, ToPrimitive};

    fn brute<T: Scalar>(total: u64, rows: &[Vec<T>]) -> T {
        weak_compositions(total, rows.len())
            .unwrap()
            .fold(T::zero(), |acc, c| {
                let mut t = T::one();
                for (row, &p) in rows.iter().zip(c.iter()) {
                    t = t * row[p as usize].clone();
                }
                acc + t
            })
    }

    #[test]
    fn multinomial_theorem_with_unit_rows() {
        // Σ (m)!/∏a! over compositions of m into k parts = k^m
        for k in 1..=4usize {
            for m in 0..=8u64 {
                let row: Vec<BigRational> = (0..=m)
                    .map(|j| BigRational::new(1.into(), factorial(j).into()))
                    .collect();
                let rows = vec![row; k];
                let s = exact_composition_product_sum(m, &rows, 1).unwrap()
                    * rational_from_uint(factorial(m));
                assert_eq!(s, BigRational::from_integer((k as i64).pow(m as u32).into()));
            }
        }
    }

    #[test]
    fn scalar_types_agree() {
        let rows_q = vec![
            vec![r(1, 1), r(-2, 3), r(5, 7), r(1, 9)],
            vec![r(2, 1), r(1, 5), r(-1, 2), r(3, 4)],
            vec![r(1, 3), r(1, 1), r(2, 9), r(-7, 11)],
        ];
        let exact = exact_composition_product_sum(3, &rows_q, 1).unwrap();
        let direct = composition_product_sum::<BigRational>(3, &rows_q, 1)
            .unwrap()
            .total();
        assert_eq!(exact, direct);
        assert_eq!(exact, brute(3, &rows_q));
        let rows_f: Vec<Vec<f64>> = rows_q
            .iter()
            .map(|row| row.iter().map(|v| v.to_f64().unwrap()).collect())
            .collect();
        let float = composition_product_sum::<f64>(3, &rows_f, 1).unwrap().total();
        assert!((float - exact.to_f64().unwrap()).abs() < 1e-14);
        let rows_f32: Vec<Vec<f32>> = rows_f
            .iter()
            .map(|row| row.iter().map(|&v| v as f32).collect())
            .collect();
        let f32_sum = composition_product_sum::<f32>(3, &rows_f32, 1).unwrap().total();
        assert!((f32_sum as f64 - exact.to_f64().unwrap()).abs() < 1e-5);
    }

    #[test]
    fn exact_result_independent_of_threads() {
        let row: Vec<BigRational> = (0..=16).map(|j| r(if j % 2 == 0 { 1 } else { -3 }, j + 1)).collect();
        let rows = vec![row; 5];
        let seq = exact_composition_product_sum(16, &rows, 1).unwrap();
        for threads in [2usize, 3, 8] {
            assert_eq!(exact_composition_product_sum(16, &rows, threads).unwrap(), seq);
        }
    }

    #[test]
    fn multinomial_is_product_of_prefix_binomials() {
        use crate::exact::binomial;
        for n in 0..=12u64 {
            for k in 1..=5usize {
                for c in weak_compositions(n, k).unwrap() {
                    let mut prefix = 0u64;
                    let mut prod = num_bigint::BigUint::one();
                    for &p in c.iter() {
                        prefix += p;
                        prod *= binomial(prefix, p as i64);
                    }
                    assert_eq!(multinomial(n, &c).unwrap(), prod);
                }
            }
        }
    }

    #[test]
    fn rejects_short_rows() {
        let rows = vec![vec![1.0f64, 2.0]];
        assert!(composition_product_sum::<f64>(3, &rows, 1).is_err());
        assert!(composition_product_sum::<f64>(0, &[], 1).is_err());
    }
}
