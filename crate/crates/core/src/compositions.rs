//! Weak compositions: ordered tuples of non-negative integers with a fixed sum.
//!
//! Enumeration is in colexicographic order (the last part varies slowest), e.g. for
//! total 2 into 3 parts: `(2,0,0) (1,1,0) (0,2,0) (1,0,1) (0,1,1) (0,0,2)`.
//! The order is part of the contract: [`unrank`] maps a rank back to the
//! composition at that position, so a stream can be split into disjoint rank
//! ranges and reduced in parallel.

use std::ops::Deref;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::exact::binomial;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Composition {
    parts: Vec<u64>,
    total: u64,
}

impl Composition {
    pub fn new(parts: Vec<u64>) -> Self {
        let total = parts.iter().sum();
        Composition { parts, total }
    }

    /// Build and check that the parts sum to `total`.
    pub fn with_total(parts: Vec<u64>, total: u64) -> Result<Self> {
        let actual: u64 = parts.iter().sum();
        if actual != total {
            return Err(Error::CompositionSumMismatch {
                expected: total,
                actual,
            });
        }
        Ok(Composition { parts, total })
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Every part multiplied by two; a composition of `2·total`.
    pub fn doubled(&self) -> Composition {
        Composition {
            parts: self.parts.iter().map(|p| 2 * p).collect(),
            total: 2 * self.total,
        }
    }
}

impl Deref for Composition {
    type Target = [u64];
    fn deref(&self) -> &[u64] {
        &self.parts
    }
}

/// `C(total + parts - 1, parts - 1)` as a big integer.
pub fn count_weak_compositions(total: u64, parts: u64) -> BigUint {
    if parts == 0 {
        return if total == 0 {
            BigUint::from(1u32)
        } else {
            BigUint::from(0u32)
        };
    }
    binomial(total + parts - 1, parts as i64 - 1)
}

/// Same count in machine integers; `None` on overflow.
pub fn count_u64(total: u64, parts: u64) -> Option<u64> {
    if parts == 0 {
        return Some(u64::from(total == 0));
    }
    let n = total.checked_add(parts - 1)? as u128;
    let k = (parts - 1).min(total) as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    u64::try_from(acc).ok()
}

fn validate(total: u64, parts: usize) -> Result<()> {
    if parts == 0 && total > 0 {
        return Err(Error::ZeroParts);
    }
    Ok(())
}

/// Streaming iterator over all weak compositions of `total` into `parts` parts.
#[derive(Debug, Clone)]
pub struct WeakCompositions {
    current: Vec<u64>,
    total: u64,
    remaining: Option<u64>,
    done: bool,
}

/// Iterate every weak composition of `total` into `parts` parts.
pub fn weak_compositions(total: u64, parts: usize) -> Result<WeakCompositions> {
    validate(total, parts)?;
    let mut current = vec![0; parts];
    if let Some(first) = current.first_mut() {
        *first = total;
    }
    Ok(WeakCompositions {
        current,
        total,
        remaining: None,
        done: false,
    })
}

impl WeakCompositions {
    /// Restrict to `len` items starting at colex rank `start`.
    pub fn range(total: u64, parts: usize, start: u64, len: u64) -> Result<Self> {
        let current = unrank(total, parts, start)?;
        Ok(WeakCompositions {
            current: current.parts,
            total,
            remaining: Some(len),
            done: len == 0,
        })
    }

    /// Visit each composition by reference without allocating.
    pub fn for_each_slice<F: FnMut(&[u64])>(mut self, mut f: F) {
        while !self.done {
            if let Some(r) = self.remaining.as_mut() {
                if *r == 0 {
                    break;
                }
                *r -= 1;
            }
            f(&self.current);
            self.done = !advance(&mut self.current);
        }
    }
}

/// Colex successor in place. Returns `false` when `parts` was the last composition.
pub fn advance(parts: &mut [u64]) -> bool {
    let len = parts.len();
    let Some(i) = parts.iter().position(|&p| p > 0) else {
        return false;
    };
    if i + 1 >= len {
        return false;
    }
    let v = parts[i];
    parts[i] = 0;
    parts[i + 1] += 1;
    parts[0] = v - 1;
    true
}

impl Iterator for WeakCompositions {
    type Item = Composition;

    fn next(&mut self) -> Option<Composition> {
        if self.done {
            return None;
        }
        if let Some(r) = self.remaining.as_mut() {
            if *r == 0 {
                self.done = true;
                return None;
            }
            *r -= 1;
        }
        let item = Composition {
            parts: self.current.clone(),
            total: self.total,
        };
        self.done = !advance(&mut self.current);
        Some(item)
    }
}

/// Colex rank of a composition.
pub fn rank(parts: &[u64]) -> Result<u64> {
    let mut remaining: u64 = parts.iter().sum();
    let mut r: u64 = 0;
    for pos in (1..parts.len()).rev() {
        let last = parts[pos];
        for u in 0..last {
            let c = count_u64(remaining - u, pos as u64)
                .ok_or_else(|| Error::TooLarge(format!("rank of {parts:?}")))?;
            r = r
                .checked_add(c)
                .ok_or_else(|| Error::TooLarge(format!("rank of {parts:?}")))?;
        }
        remaining -= last;
    }
    Ok(r)
}

/// The composition at colex position `index`.
pub fn unrank(total: u64, parts: usize, index: u64) -> Result<Composition> {
    validate(total, parts)?;
    let len = count_u64(total, parts as u64)
        .ok_or_else(|| Error::TooLarge(format!("compositions of {total} into {parts}")))?;
    if index >= len {
        return Err(Error::RankOutOfRange { rank: index, len });
    }
    let mut out = vec![0u64; parts];
    let mut remaining = total;
    let mut r = index;
    for pos in (1..parts).rev() {
        for v in 0..=remaining {
            let c = count_u64(remaining - v, pos as u64)
                .ok_or_else(|| Error::TooLarge(format!("compositions of {total} into {parts}")))?;
            if r < c {
                out[pos] = v;
                remaining -= v;
                break;
            }
            r -= c;
        }
    }
    if parts > 0 {
        out[0] = remaining;
    }
    Ok(Composition {
        parts: out,
        total,
    })
}

/// Split `0..len` into at most `chunks` contiguous `(start, len)` ranges.
pub fn rank_chunks(len: u64, chunks: usize) -> Vec<(u64, u64)> {
    let chunks = (chunks.max(1) as u64).min(len.max(1));
    let base = len / chunks;
    let extra = len % chunks;
    let mut out = Vec::with_capacity(chunks as usize);
    let mut start = 0;
    for c in 0..chunks {
        let size = base + u64::from(c < extra);
        out.push((start, size));
        start += size;
    }
    out
}
