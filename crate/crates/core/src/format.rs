//! Text forms of exact values.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Parse `"a/b"` or `"a"` (optionally signed, no spaces).
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidParameter(format!("not a rational: {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let valid = |t: &str| {
        let digits = t.strip_prefix('-').unwrap_or(t);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(num) || !valid(den) {
        return Err(bad());
    }
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(BigRational::new(num, den))
}

/// Always `"numerator/denominator"`, including `"n/1"` for integers.
pub fn rational_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Decimal rendering correctly rounded (half away from zero) to `sig` significant digits.
///
/// Plain notation is used for magnitudes in `[1e-6, 1e15)`, scientific otherwise.
pub fn decimal_string(r: &BigRational, sig: usize) -> String {
    assert!(sig >= 1);
    if r.is_zero() {
        return "0".to_string();
    }
    let negative = r.is_negative();
    let x = r.abs();
    // exponent e with 10^e <= x < 10^(e+1)
    let mut e = x.numer().to_string().len() as i64 - x.denom().to_string().len() as i64;
    if pow10(e) > x {
        e -= 1;
    }
    if pow10(e + 1) <= x {
        e += 1;
    }
    let shift = sig as i64 - 1 - e;
    let scaled = &x * pow10(shift);
    let (q, rem) = scaled.numer().div_rem(scaled.denom());
    let mut digits = q;
    if BigInt::from(2) * rem >= *scaled.denom() {
        digits += 1;
    }
    let mut text = digits.to_string();
    if text.len() > sig {
        // rounding carried into a new leading digit (e.g. 9.99 -> 10.0)
        text.truncate(sig);
        e += 1;
    }
    let sign = if negative { "-" } else { "" };
    if !(-6..15).contains(&e) {
        let (head, tail) = text.split_at(1);
        let tail = tail.trim_end_matches('0');
        return if tail.is_empty() {
            format!("{sign}{head}e{e}")
        } else {
            format!("{sign}{head}.{tail}e{e}")
        };
    }
    let body = if e >= 0 {
        let int_len = e as usize + 1;
        if text.len() <= int_len {
            format!("{}{}", text, "0".repeat(int_len - text.len()))
        } else {
            let (i, f) = text.split_at(int_len);
            let f = f.trim_end_matches('0');
            if f.is_empty() {
                i.to_string()
            } else {
                format!("{i}.{f}")
            }
        }
    } else {
        let zeros = (-e - 1) as usize;
        let frac = format!("{}{}", "0".repeat(zeros), text);
        format!("0.{}", frac.trim_end_matches('0'))
    };
    format!("{sign}{body}")
}

fn pow10(e: i64) -> BigRational {
    let p = num_traits::pow(BigInt::from(10), e.unsigned_abs() as usize);
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// Natural log of a positive rational, computed from the leading bits of numerator and denominator.
pub fn ln_rational(r: &BigRational) -> f64 {
    assert!(r.is_positive(), "ln of non-positive rational");
    ln_bigint(r.numer()) - ln_bigint(r.denom())
}

fn ln_bigint(x: &BigInt) -> f64 {
    debug_assert_eq!(x.sign(), Sign::Plus);
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("small bigint fits f64").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift as usize).to_f64().expect("64-bit head");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}
