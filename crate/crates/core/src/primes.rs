//! Segmented sieve of Eratosthenes and prime harmonic sums.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_arith::{ExactSum, Rational};

/// Numbers per sieve segment.
const SEGMENT: u64 = 1 << 18;

/// Largest `Y` for which [`harmonic_h`] returns an exact value.
pub const EXACT_HARMONIC_LIMIT: u64 = 10_000;

/// All primes up to `bound`, ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeTable {
    bound: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.primes.binary_search(&n).is_ok()
    }

    /// Primes `p` with `lo < p <= hi`.
    pub fn between(&self, lo: u64, hi: u64) -> &[u64] {
        let start = self.primes.partition_point(|&p| p <= lo);
        let end = self.primes.partition_point(|&p| p <= hi);
        &self.primes[start..end.max(start)]
    }

    /// Number of primes `<= n` for `n <= bound`.
    pub fn pi(&self, n: u64) -> usize {
        self.primes.partition_point(|&p| p <= n)
    }
}

fn small_primes(limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Marks composites of `[lo, lo + len)` using `base` (all primes up to
/// `sqrt(lo + len - 1)`); returns the primality flags.
fn sieve_segment(lo: u64, len: u64, base: &[u64]) -> Vec<bool> {
    let mut is_prime = vec![true; len as usize];
    let hi = lo + len;
    for n in lo..hi.min(2) {
        is_prime[(n - lo) as usize] = false;
    }
    for &p in base {
        if p * p >= hi {
            break;
        }
        let mut m = (lo.div_ceil(p) * p).max(p * p);
        while m < hi {
            is_prime[(m - lo) as usize] = false;
            m += p;
        }
    }
    is_prime
}

fn segments(bound: u64) -> impl IndexedParallelIterator<Item = (u64, u64)> {
    let count = (bound + 1).div_ceil(SEGMENT) as usize;
    (0..count).into_par_iter().map(move |i| {
        let lo = i as u64 * SEGMENT;
        (lo, SEGMENT.min(bound + 1 - lo))
    })
}

/// All primes up to `bound`. Segments are sieved independently (and in
/// parallel), so working memory beyond the output is `O(sqrt(bound))` per
/// segment.
pub fn sieve_range(bound: u64) -> Result<PrimeTable> {
    if bound < 2 {
        return Err(Error::BoundTooSmall(bound));
    }
    let base = small_primes(isqrt(bound));
    let chunks: Vec<Vec<u64>> = segments(bound)
        .map(|(lo, len)| {
            sieve_segment(lo, len, &base)
                .into_iter()
                .enumerate()
                .filter(|(_, prime)| *prime)
                .map(|(i, _)| lo + i as u64)
                .collect()
        })
        .collect();
    Ok(PrimeTable { bound, primes: chunks.concat() })
}

/// `pi(bound)` without materializing the list.
pub fn prime_count(bound: u64) -> u64 {
    if bound < 2 {
        return 0;
    }
    let base = small_primes(isqrt(bound));
    segments(bound)
        .map(|(lo, len)| sieve_segment(lo, len, &base).into_iter().filter(|b| *b).count() as u64)
        .sum()
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: u64) -> u64 {
    let mut m = n + 1;
    while !is_prime(m) {
        m += 1;
    }
    m
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Value of a prime harmonic sum, exact where the range allows.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "mode", content = "value", rename_all = "lowercase")]
pub enum HarmonicSum {
    Exact(Rational),
    Float(f64),
}

impl HarmonicSum {
    pub fn to_f64(&self) -> f64 {
        match self {
            HarmonicSum::Exact(r) => r.to_f64(),
            HarmonicSum::Float(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            HarmonicSum::Exact(r) => Some(r),
            HarmonicSum::Float(_) => None,
        }
    }
}

fn integer_part(x: &Rational) -> u64 {
    let f = x.floor();
    if f.sign() == num_bigint::Sign::Minus {
        0
    } else {
        num_traits::ToPrimitive::to_u64(&f).unwrap_or(u64::MAX)
    }
}

/// `H_{X,Y} = sum over primes X < p <= Y of 1/p`, exact.
pub fn harmonic_exact(x: &Rational, y: &Rational) -> Rational {
    let lo = integer_part(x);
    let hi = integer_part(y);
    if hi < 2 || hi <= lo {
        return Rational::zero();
    }
    let table = sieve_range(hi).expect("hi >= 2");
    sum_reciprocals(table.between(lo, hi))
}

/// `sum 1/p` over the given primes, exact.
pub fn sum_reciprocals(primes: &[u64]) -> Rational {
    let mut acc = ExactSum::new();
    for &p in primes {
        acc.add_frac(1, p);
    }
    acc.finish()
}

/// `H_{X,Y}`: exact for `Y <= EXACT_HARMONIC_LIMIT`, double precision
/// beyond. An empty range gives exact zero.
pub fn harmonic_h(x: &Rational, y: &Rational) -> HarmonicSum {
    let lo = integer_part(x);
    let hi = integer_part(y);
    if hi <= EXACT_HARMONIC_LIMIT || hi <= lo {
        return HarmonicSum::Exact(harmonic_exact(x, y));
    }
    let table = sieve_range(hi).expect("hi >= 2");
    HarmonicSum::Float(table.between(lo, hi).iter().map(|&p| 1.0 / p as f64).sum())
}

/// Meissel–Mertens constant.
pub const MERTENS: f64 = 0.261_497_212_847_642_8;
