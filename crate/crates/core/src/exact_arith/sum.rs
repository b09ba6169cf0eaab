use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::Rational;

/// Exact accumulator for many fractions with few distinct denominators.
///
/// Terms are bucketed by denominator and the buckets are combined with a
/// balanced pairwise reduction at the end, so a sum of `n` terms over `k`
/// denominators costs `O(n)` machine additions plus `O(k log k)` bignum
/// operations instead of `n` full rational additions.
#[derive(Debug, Default, Clone)]
pub struct ExactSum {
    small: BTreeMap<u64, i128>,
    big: Vec<BigRational>,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `num / den`. Requires `den > 0` and `|num| < 2^63`.
    #[inline]
    pub fn add_frac(&mut self, num: i128, den: u64) {
        debug_assert!(den > 0);
        *self.small.entry(den).or_insert(0) += num;
    }

    pub fn add(&mut self, r: &Rational) {
        match (num_traits::ToPrimitive::to_i64(r.numer()), num_traits::ToPrimitive::to_u64(r.denom())) {
            (Some(n), Some(d)) => self.add_frac(n as i128, d),
            _ => self.big.push(r.as_big().clone()),
        }
    }

    pub fn add_scaled(&mut self, r: &Rational, k: i64) {
        if k == 0 {
            return;
        }
        match (num_traits::ToPrimitive::to_i64(r.numer()), num_traits::ToPrimitive::to_u64(r.denom())) {
            (Some(n), Some(d)) => self.add_frac(n as i128 * k as i128, d),
            _ => self.big.push(r.as_big() * BigRational::from_integer(k.into())),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.big.is_empty() && self.small.values().all(|n| *n == 0)
    }

    pub fn finish(self) -> Rational {
        let mut terms: Vec<BigRational> = self
            .small
            .into_iter()
            .filter(|(_, n)| *n != 0)
            .map(|(d, n)| BigRational::new(BigInt::from(n), BigInt::from(d)))
            .chain(self.big)
            .collect();
        if terms.is_empty() {
            return Rational::zero();
        }
        while terms.len() > 1 {
            let mut next = Vec::with_capacity(terms.len().div_ceil(2));
            let mut it = terms.into_iter();
            while let Some(a) = it.next() {
                match it.next() {
                    Some(b) => next.push(a + b),
                    None => next.push(a),
                }
            }
            terms = next;
        }
        let total = terms.pop().unwrap_or_else(BigRational::zero);
        Rational::from_big(total)
    }
}
