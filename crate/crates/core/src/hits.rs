//! Hit primes `|x - a_p/p| <= c/p` for a given `x`, and the one-sided
//! equidistribution count `{xp} < c`.
//!
//! Irrational `x` enter as certified approximants `value ± η`. A prime is a
//! hit or a miss only when the answer is the same for every real in that
//! interval; otherwise it is reported as ambiguous.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_arith::{validate_c, Rational};
use crate::primes::{sieve_range, MERTENS};
use crate::sequences::NumeratorSequence;

/// A real number known to lie in `[value - error_bound, value + error_bound]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RealApproximant {
    pub value: Rational,
    pub error_bound: Rational,
    pub label: String,
}

impl RealApproximant {
    pub fn exact(value: Rational) -> Self {
        let label = format!("rational {value}");
        RealApproximant { value, error_bound: Rational::zero(), label }
    }

    pub fn new(value: Rational, error_bound: Rational, label: impl Into<String>) -> Result<Self> {
        if error_bound.is_negative() {
            return Err(Error::Parse(format!("negative error bound {error_bound}")));
        }
        Ok(RealApproximant { value, error_bound, label: label.into() })
    }

    /// Convergent `h/k` of `[a0; period, period, ...]` with the first
    /// certified error `1/(k k')` that is at most `eta`, where `k'` is the next
    /// denominator.
    pub fn from_periodic_cf(label: &str, a0: u64, period: &[u64], eta: &Rational) -> Result<Self> {
        if !eta.is_positive() || period.is_empty() {
            return Err(Error::Parse(format!("{label} needs a positive eta")));
        }
        let (mut h_prev, mut h) = (BigInt::one(), BigInt::from(a0));
        let (mut k_prev, mut k) = (BigInt::zero(), BigInt::one());
        for &a in period.iter().cycle() {
            let h_next = &h * a + &h_prev;
            let k_next = &k * a + &k_prev;
            let err = Rational::new(BigInt::one(), &k * &k_next)?;
            if err <= *eta {
                return Ok(RealApproximant {
                    value: Rational::new(h, k)?,
                    error_bound: err,
                    label: label.to_string(),
                });
            }
            (h_prev, h) = (h, h_next);
            (k_prev, k) = (k, k_next);
        }
        unreachable!("cycle over a non-empty period never ends")
    }

    pub fn sqrt2(eta: &Rational) -> Result<Self> {
        Self::from_periodic_cf("sqrt2", 1, &[2], eta)
    }

    /// `(1 + sqrt 5) / 2`.
    pub fn golden(eta: &Rational) -> Result<Self> {
        Self::from_periodic_cf("golden", 1, &[1], eta)
    }

    pub fn named(name: &str, eta: &Rational) -> Result<Self> {
        match name {
            "sqrt2" => Self::sqrt2(eta),
            "golden" => Self::golden(eta),
            other => Err(Error::Parse(format!("unknown named real {other:?} (known: sqrt2, golden)"))),
        }
    }
}

/// Distance from `x` to the nearest point of `y + Z`.
pub fn circle_distance(x: &Rational, y: &Rational) -> Rational {
    let d = (x - y).fract();
    let other = Rational::one() - &d;
    d.min(other)
}

/// Per-prime line of a hit report. For [`hit_primes`] `distance` is the
/// circle distance to `a_p/p`; for [`fractional_hits`] it is `{value * p}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HitRow {
    pub p: u64,
    pub distance: Rational,
    pub hit: bool,
    pub ambiguous: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HitReport {
    pub bound: u64,
    pub hits: Vec<u64>,
    pub ambiguous: Vec<u64>,
    pub heuristic: f64,
    pub ratio: Option<f64>,
    /// `sum 1/p` over the hit primes.
    pub reciprocal_sum: f64,
    #[serde(skip)]
    pub rows: Vec<HitRow>,
}

impl HitReport {
    fn from_rows(bound: u64, rows: Vec<HitRow>, heuristic: f64) -> Self {
        let hits: Vec<u64> = rows.iter().filter(|r| r.hit).map(|r| r.p).collect();
        let ambiguous = rows.iter().filter(|r| r.ambiguous).map(|r| r.p).collect();
        let reciprocal_sum = hits.iter().map(|&p| 1.0 / p as f64).sum();
        let ratio = (heuristic > 0.0).then(|| hits.len() as f64 / heuristic);
        HitReport { bound, hits, ambiguous, heuristic, ratio, reciprocal_sum, rows }
    }
}

/// Primes `p <= bound` with `|x - a_p/p| <= c/p` on the circle, `c` taken
/// from `seq`. The heuristic is `2c sum_{p <= bound} 1/p`.
pub fn hit_primes(x: &RealApproximant, seq: &NumeratorSequence, bound: u64) -> Result<HitReport> {
    let table = sieve_range(bound)?;
    let c = seq.c();
    let eta = &x.error_bound;
    let mut rows = Vec::with_capacity(table.len());
    for &p in table.primes() {
        let a = seq.require(p)?;
        let p_r = Rational::from(p);
        let distance = circle_distance(&x.value, &(Rational::from(a) / &p_r));
        let threshold = c / &p_r;
        let hit = &distance + eta <= threshold;
        let miss = &distance - eta > threshold;
        rows.push(HitRow { p, distance, hit, ambiguous: !hit && !miss });
    }
    let heuristic = loglog_heuristic(c, bound)?.sum;
    Ok(HitReport::from_rows(bound, rows, heuristic))
}

/// Primes `p <= bound` with `{x p} < c`. The heuristic is the
/// equidistribution prediction `c π(bound)`.
pub fn fractional_hits(x: &RealApproximant, c: &Rational, bound: u64) -> Result<HitReport> {
    validate_c(c)?;
    if &x.error_bound * Rational::from(bound) >= Rational::frac(1, 4) {
        return Err(Error::ImpreciseApproximant { bound });
    }
    let table = sieve_range(bound)?;
    let one = Rational::one();
    let mut rows = Vec::with_capacity(table.len());
    for &p in table.primes() {
        let p_r = Rational::from(p);
        let frac = (&x.value * &p_r).fract();
        // x p lies within `radius` of value * p, and radius < 1/4.
        let radius = &x.error_bound * &p_r;
        let hit = frac >= radius && &frac + &radius < *c;
        let miss = frac >= c + &radius && &frac + &radius < one;
        rows.push(HitRow { p, distance: frac, hit, ambiguous: !hit && !miss });
    }
    let heuristic = c.to_f64() * table.len() as f64;
    Ok(HitReport::from_rows(bound, rows, heuristic))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogLogHeuristic {
    /// `2c sum_{p <= bound} 1/p`.
    pub sum: f64,
    /// `2c (ln ln bound + M)` with the Meissel–Mertens constant `M`.
    pub asymptotic: f64,
}

pub fn loglog_heuristic(c: &Rational, bound: u64) -> Result<LogLogHeuristic> {
    let table = sieve_range(bound)?;
    let two_c = 2.0 * c.to_f64();
    let sum: f64 = table.primes().iter().map(|&p| 1.0 / p as f64).sum();
    Ok(LogLogHeuristic { sum: two_c * sum, asymptotic: two_c * ((bound as f64).ln().ln() + MERTENS) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primes::sum_reciprocals;
    use crate::sequences::{constant_sequence, random_sequence, Method};
    use crate::sieve_lab::level_sets;

    fn r(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    fn seq_from(c: Rational, bound: u64, f: impl Fn(u64) -> u64) -> NumeratorSequence {
        let entries = sieve_range(bound).unwrap().primes().iter().map(|&p| (p, f(p))).collect();
        NumeratorSequence::new(c, Method::Custom, None, entries).unwrap()
    }

    #[test]
    fn convergents_are_certified() {
        let eta: Rational = "1e-14".parse().unwrap();
        let s2 = RealApproximant::sqrt2(&eta).unwrap();
        assert!(s2.error_bound <= eta);
        assert!((s2.value.to_f64() - std::f64::consts::SQRT_2).abs() < 1e-14);
        // value² - 2 has the sign pattern of a convergent and is tiny.
        let sq = &s2.value * &s2.value - Rational::from(2i64);
        assert!(sq.abs().to_f64() < 1e-13);
        let g = RealApproximant::golden(&r(1, 1_000_000)).unwrap();
        assert!((g.value.to_f64() - (1.0 + 5f64.sqrt()) / 2.0).abs() <= g.error_bound.to_f64());
        assert!(RealApproximant::sqrt2(&Rational::zero()).is_err());
        assert!(RealApproximant::named("pi", &eta).is_err());
    }

    #[test]
    fn one_third_hits_everywhere() {
        let bound = 500;
        // a_p is the residue nearest to p/3.
        let seq = seq_from(r(1, 2), bound, |p| ((2 * p + 3) / 6) % p);
        let report = hit_primes(&RealApproximant::exact(r(1, 3)), &seq, bound).unwrap();
        assert_eq!(report.hits.len(), sieve_range(bound).unwrap().len());
        assert!(report.ambiguous.is_empty());
        for row in &report.rows {
            let expected = if row.p == 3 { Rational::zero() } else { Rational::frac(1, 3 * row.p as i64) };
            assert_eq!(row.distance, expected, "p={}", row.p);
        }
    }

    #[test]
    fn zero_with_constant_and_half() {
        let bound = 200;
        let constant = constant_sequence(bound, &r(1, 4)).unwrap();
        let report = hit_primes(&RealApproximant::exact(Rational::zero()), &constant, bound).unwrap();
        assert_eq!(report.hits.len(), sieve_range(bound).unwrap().len());

        let halves = seq_from(r(1, 3), bound, |p| p / 2);
        let report = hit_primes(&RealApproximant::exact(Rational::zero()), &halves, bound).unwrap();
        assert!(report.hits.iter().all(|&p| p == 2), "{:?}", report.hits);
    }

    #[test]
    fn missing_prime_rejected() {
        let seq = seq_from(r(1, 2), 10, |_| 0);
        assert_eq!(hit_primes(&RealApproximant::exact(r(1, 3)), &seq, 20), Err(Error::MissingPrime(11)));
    }

    #[test]
    fn fractional_examples() {
        let zero = fractional_hits(&RealApproximant::exact(Rational::zero()), &r(1, 4), 100).unwrap();
        assert_eq!(zero.hits.len(), 25);
        let half = fractional_hits(&RealApproximant::exact(r(1, 2)), &r(1, 4), 100).unwrap();
        assert_eq!(half.hits, vec![2]);
        assert!(half.ambiguous.is_empty());
        let rough = RealApproximant::new(r(1, 3), r(1, 100), "rough").unwrap();
        assert_eq!(fractional_hits(&rough, &r(1, 4), 25), Err(Error::ImpreciseApproximant { bound: 25 }));
    }

    #[test]
    fn fractional_period_of_rationals() {
        // For p coprime to q, {a p / q} depends only on p mod q.
        let q = 7u64;
        let x = RealApproximant::exact(r(3, 7));
        let c = r(2, 5);
        let report = fractional_hits(&x, &c, 2000).unwrap();
        let hit_residues: Vec<u64> = (1..q).filter(|m| Rational::frac((3 * m % q) as i64, q as i64) < c).collect();
        for row in &report.rows {
            if row.p % q != 0 {
                assert_eq!(row.hit, hit_residues.contains(&(row.p % q)), "p={}", row.p);
            }
        }
    }

    #[test]
    fn refinement_is_sound() {
        let coarse = RealApproximant::golden(&r(1, 10_000_000)).unwrap();
        let fine = RealApproximant::golden(&"1e-15".parse().unwrap()).unwrap();
        let seq = random_sequence(3000, &r(1, 2), 3).unwrap();
        let a = hit_primes(&coarse, &seq, 3000).unwrap();
        let b = hit_primes(&fine, &seq, 3000).unwrap();
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            if !ra.ambiguous {
                assert_eq!((ra.hit, rb.hit, rb.ambiguous), (ra.hit, ra.hit, false), "p={}", ra.p);
            }
        }
        let fa = fractional_hits(&coarse, &r(1, 4), 2000).unwrap();
        let fb = fractional_hits(&fine, &r(1, 4), 2000).unwrap();
        for (ra, rb) in fa.rows.iter().zip(&fb.rows) {
            if !ra.ambiguous {
                assert_eq!((rb.hit, rb.ambiguous), (ra.hit, false), "p={}", ra.p);
            }
        }
    }

    #[test]
    fn expected_hit_count_is_heuristic() {
        // ∫ #hits(x) dx over [0,1) = ∫ N_{1,bound} = 2c sum 1/p.
        let c = r(1, 3);
        let seq = random_sequence(300, &c, 17).unwrap();
        let prof = level_sets(&seq, 1, 300).unwrap();
        let exact = Rational::frac(2, 1) * &c * sum_reciprocals(sieve_range(300).unwrap().primes());
        assert_eq!(prof.first_moment(), exact);
        let report = hit_primes(&RealApproximant::exact(r(1, 7)), &seq, 300).unwrap();
        assert!((report.heuristic - exact.to_f64()).abs() < 1e-12);
    }

    #[test]
    fn loglog_examples() {
        let h = loglog_heuristic(&r(1, 2), 10).unwrap();
        assert!((h.sum - (0.5 + 1.0 / 3.0 + 0.2 + 1.0 / 7.0)).abs() < 1e-15);
        let h2 = loglog_heuristic(&Rational::one(), 10).unwrap();
        assert!((h2.sum - 2.0 * h.sum).abs() < 1e-15);
        let c = r(1, 4);
        let big = loglog_heuristic(&c, 1_000_000).unwrap();
        let small = loglog_heuristic(&c, 1000).unwrap();
        let predicted = 0.5 * (1e6f64.ln().ln() - 1e3f64.ln().ln());
        assert!(((big.sum - small.sum) - predicted).abs() <= 0.05 * predicted);
    }

    #[test]
    fn deterministic() {
        let x = RealApproximant::sqrt2(&r(1, 1_000_000_000)).unwrap();
        let seq = random_sequence(1000, &r(1, 2), 1).unwrap();
        assert_eq!(hit_primes(&x, &seq, 1000).unwrap(), hit_primes(&x, &seq, 1000).unwrap());
    }
}
