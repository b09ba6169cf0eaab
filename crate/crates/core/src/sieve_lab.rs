//! Exact and Monte-Carlo evaluation of the quantities in the sieve bound
//! `E(λ(Ω_{X,Y})) << 1/H_{X,Y}`: the counting function `N_{X,Y}`, its mean
//! `ν = 2c H_{X,Y}`, its variance `α`, the Markov step and the expected
//! overlap of two random arcs.

use std::collections::BTreeMap;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact_arith::point::{level_measures, Cover, Piece, Point, PrimeArcs};
use crate::exact_arith::{validate_c, ExactSum, Rational};
use crate::primes::{sieve_range, sum_reciprocals};
use crate::sequences::{arc_pieces, random_numerators, NumeratorSequence};

/// Cap on `sum 2p` over the range for [`omega_expectation_exact`].
pub const MAX_EXACT_ENDPOINTS: u64 = 400_000;

/// Exact distribution of the step function `N_{X,Y}(x) = #{X < p <= Y : x in I_p(a_p)}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelSetProfile {
    pub range: (u64, u64),
    pub nu: Rational,
    #[serde(serialize_with = "string_keys")]
    pub levels: BTreeMap<usize, Rational>,
}

fn string_keys<S: Serializer>(levels: &BTreeMap<usize, Rational>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_map(levels.iter().map(|(k, v)| (k.to_string(), v)))
}

impl LevelSetProfile {
    pub fn level(&self, k: usize) -> Rational {
        self.levels.get(&k).cloned().unwrap_or_else(Rational::zero)
    }

    /// `sum_k λ(N = k)`; always 1.
    pub fn total(&self) -> Rational {
        self.levels.values().sum()
    }

    /// `sum_k k λ(N = k) = ∫ N`.
    pub fn first_moment(&self) -> Rational {
        let mut acc = ExactSum::new();
        for (k, v) in &self.levels {
            acc.add_scaled(v, *k as i64);
        }
        acc.finish()
    }
}

/// Upper bound `α/ν²` from the Markov step, or `+∞` when `ν = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MarkovBound {
    Finite(Rational),
    Infinite,
}

impl Serialize for MarkovBound {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            MarkovBound::Finite(r) => r.serialize(s),
            MarkovBound::Infinite => s.serialize_str("inf"),
        }
    }
}

impl MarkovBound {
    pub fn holds_for(&self, value: &Rational) -> bool {
        match self {
            MarkovBound::Finite(b) => value <= b,
            MarkovBound::Infinite => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SieveReport {
    pub profile: LevelSetProfile,
    pub alpha: Rational,
    pub omega_measure: Rational,
    pub markov_bound: MarkovBound,
}

impl SieveReport {
    pub fn markov_holds(&self) -> bool {
        self.markov_bound.holds_for(&self.omega_measure)
    }
}

/// Level sets of `N_{X,Y}` for `seq`, by an exact endpoint sweep.
pub fn level_sets(seq: &NumeratorSequence, x: u64, y: u64) -> Result<LevelSetProfile> {
    if y <= x {
        return Err(Error::InvalidRange(format!("need X < Y, got X={x}, Y={y}")));
    }
    let entries = seq.range(x, y)?;
    let max_p = entries.last().map(|e| e.0).unwrap_or(1);
    let arcs = PrimeArcs::new(seq.c(), max_p)?;
    let levels = level_measures(&arc_pieces(&arcs, &entries));
    let primes: Vec<u64> = entries.iter().map(|e| e.0).collect();
    let nu = Rational::frac(2, 1) * seq.c() * sum_reciprocals(&primes);
    Ok(LevelSetProfile { range: (x, y), nu, levels })
}

/// `α = sum_k (k - ν)² λ(N = k)` and the Markov bound `λ(N = 0) <= α/ν²`.
pub fn alpha_and_markov(profile: &LevelSetProfile) -> SieveReport {
    let mut acc = ExactSum::new();
    for (k, v) in &profile.levels {
        let dev = Rational::from(*k as u64) - &profile.nu;
        acc.add(&(&dev * &dev * v));
    }
    let alpha = acc.finish();
    let markov_bound = if profile.nu.is_zero() {
        MarkovBound::Infinite
    } else {
        MarkovBound::Finite(&alpha / (&profile.nu * &profile.nu))
    };
    let report = SieveReport {
        omega_measure: profile.level(0),
        profile: profile.clone(),
        alpha,
        markov_bound,
    };
    debug_assert!(report.markov_holds());
    report
}

/// `E(λ(I_{p1} ∩ I_{p2}))` over independent uniform `a_{p1}`, `a_{p2}`.
///
/// For `2c <= 1` the arcs `I_{p2}(b)` are pairwise disjoint up to endpoints,
/// so the sum over `b` equals `λ(I_{p1}(a) ∩ ⋃_b I_{p2}(b))`.
pub fn pair_expectation(p1: u64, p2: u64, c: &Rational) -> Result<Rational> {
    if p1 >= p2 {
        return Err(Error::InvalidRange(format!("need p1 < p2, got {p1}, {p2}")));
    }
    let arcs = PrimeArcs::new(c, p2)?;
    let all_b = Cover::from_pieces((0..p2).flat_map(|b| arcs.pieces(p2, b).as_slice().to_vec()).collect());
    let mut acc = ExactSum::new();
    for a in 0..p1 {
        for piece in arcs.pieces(p1, a).as_slice() {
            all_b.overlap_exact(*piece, &mut acc);
        }
    }
    Ok(acc.finish() / Rational::from(p1 * p2))
}

/// `E(λ(Ω_{X,Y}))` under the uniform product measure on sequences, exactly.
///
/// By independence, `E(1[x ∈ Ω]) = prod_p (1 - e_p(x)/p)` where `e_p(x)`
/// indicates that some `I_p(a)` contains `x`. The integrand is constant on
/// the cells of the arrangement of all `I_p(a)`, `X < p <= Y`, `0 <= a < p`,
/// so one sweep over those `sum 2p` endpoints integrates it.
pub fn omega_expectation_exact(x: u64, y: u64, c: &Rational) -> Result<Rational> {
    validate_c(c)?;
    if y <= x {
        return Err(Error::InvalidRange(format!("need X < Y, got X={x}, Y={y}")));
    }
    if y < 2 {
        return Ok(Rational::one());
    }
    let table = sieve_range(y)?;
    let primes = table.between(x, y);
    let endpoints: u64 = primes.iter().map(|p| 2 * p).sum();
    if endpoints > MAX_EXACT_ENDPOINTS {
        return Err(Error::RangeTooLarge(format!(
            "({x}, {y}] has {endpoints} arc endpoints, limit {MAX_EXACT_ENDPOINTS}"
        )));
    }
    let arcs = PrimeArcs::new(c, y)?;

    // Events carry the index of the prime; depth[i] counts open arcs of it.
    let mut events: Vec<(Point, i32, usize)> = Vec::with_capacity(endpoints as usize);
    for (i, &p) in primes.iter().enumerate() {
        for a in 0..p {
            for piece in arcs.pieces(p, a).as_slice() {
                events.push((piece.lo, 1, i));
                events.push((piece.hi, -1, i));
            }
        }
    }
    // Openings before closings at equal points keeps depth non-negative.
    events.sort_unstable_by(|u, v| u.0.cmp(&v.0).then(v.1.cmp(&u.1)));

    let survival: Vec<Rational> = primes.iter().map(|&p| Rational::frac(p as i64 - 1, p as i64)).collect();
    let mut depth = vec![0u32; primes.len()];
    // Weight of the current cell, kept as a product of survival factors.
    let mut weight = Rational::one();
    let mut cell_lengths: BTreeMap<Rational, ExactSum> = BTreeMap::new();
    let mut cursor = Point::ZERO;
    let mut i = 0;
    loop {
        let next = events.get(i).map(|e| e.0).unwrap_or(Point::ONE);
        if cursor < next {
            Piece { lo: cursor, hi: next }.add_length(cell_lengths.entry(weight.clone()).or_default(), 1);
            cursor = next;
        }
        if i >= events.len() {
            break;
        }
        while i < events.len() && events[i].0 == next {
            let (_, delta, k) = events[i];
            if delta > 0 {
                if depth[k] == 0 {
                    weight = &weight * &survival[k];
                }
                depth[k] += 1;
            } else {
                depth[k] -= 1;
                if depth[k] == 0 {
                    weight = &weight / &survival[k];
                }
            }
            i += 1;
        }
    }

    let mut total = ExactSum::new();
    for (w, len) in cell_lengths {
        total.add(&(w * len.finish()));
    }
    Ok(total.finish())
}

/// Monte-Carlo estimate of `E(λ(Ω_{X,Y}))`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonteCarlo {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
}

/// Exact `λ(Ω_{X,Y})` for `trials` independent uniform sequences. Trial `i`
/// draws from ChaCha8 seeded with `seed` on stream `i`, and results are
/// reduced in trial order, so the output does not depend on scheduling.
pub fn omega_expectation_mc(x: u64, y: u64, c: &Rational, trials: u64, seed: u64) -> Result<MonteCarlo> {
    validate_c(c)?;
    if y <= x {
        return Err(Error::InvalidRange(format!("need X < Y, got X={x}, Y={y}")));
    }
    if trials == 0 {
        return Err(Error::InvalidRange("trials must be at least 1".into()));
    }
    let primes: Vec<u64> = if y < 2 { Vec::new() } else { sieve_range(y)?.between(x, y).to_vec() };
    let arcs = PrimeArcs::new(c, y.max(2))?;
    let samples: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let entries = random_numerators(&primes, &mut rng);
            let cover = Cover::from_pieces(arc_pieces(&arcs, &entries));
            (Rational::one() - cover.measure()).to_f64()
        })
        .collect();
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let stderr = if samples.len() > 1 {
        let var = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(MonteCarlo { mean, stderr, trials, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::{arc_of, intersect_measure};
    use crate::sequences::{random_sequence, uncovered_measure, Method};

    fn r(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    fn custom(c: Rational, entries: &[(u64, u64)]) -> NumeratorSequence {
        NumeratorSequence::new(c, Method::Custom, None, entries.to_vec()).unwrap()
    }

    /// `α` expanded as `sum_{p1,p2} ∫(φ_{p1} - 2c/p1)(φ_{p2} - 2c/p2)`, with
    /// every cross term `λ(I_{p1} ∩ I_{p2}) - 4c²/(p1 p2)` from arc
    /// intersections.
    fn alpha_by_expansion(seq: &NumeratorSequence, x: u64, y: u64) -> Rational {
        let c = seq.c();
        let entries = seq.range(x, y).unwrap();
        let mut total = Rational::zero();
        for &(p1, a1) in &entries {
            for &(p2, a2) in &entries {
                let m1 = Rational::frac(2, 1) * c / Rational::from(p1);
                let m2 = Rational::frac(2, 1) * c / Rational::from(p2);
                if p1 == p2 {
                    total += &m1 * (Rational::one() - &m1);
                } else {
                    let i = intersect_measure(&arc_of(p1, a1, c).unwrap(), &arc_of(p2, a2, c).unwrap());
                    total += i - m1 * m2;
                }
            }
        }
        total
    }

    #[test]
    fn level_examples() {
        let seq = custom(r(1, 2), &[(2, 0), (3, 1), (5, 3)]);
        let prof = level_sets(&seq, 3, 5).unwrap();
        assert_eq!(prof.levels, BTreeMap::from([(0, r(4, 5)), (1, r(1, 5))]));

        let prof = level_sets(&seq, 1, 3).unwrap();
        assert_eq!(prof.levels, BTreeMap::from([(0, r(1, 4)), (1, r(2, 3)), (2, r(1, 12))]));
        assert_eq!(prof.total(), Rational::one());
        assert_eq!(prof.first_moment(), r(1, 2) + r(1, 3));
        assert_eq!(prof.nu, r(5, 6));
    }

    #[test]
    fn first_moment_is_nu() {
        for seed in 0..10 {
            let seq = random_sequence(150, &r(1, 3), seed).unwrap();
            let prof = level_sets(&seq, 1 + seed, 150).unwrap();
            assert_eq!(prof.total(), Rational::one());
            assert_eq!(prof.first_moment(), prof.nu);
        }
    }

    #[test]
    fn bernoulli_alpha() {
        let seq = custom(r(1, 2), &[(5, 2)]);
        let report = alpha_and_markov(&level_sets(&seq, 3, 5).unwrap());
        assert_eq!(report.alpha, r(4, 25));
        assert!(report.markov_holds());
    }

    #[test]
    fn degenerate_profile() {
        let seq = custom(r(1, 2), &[(2, 1), (3, 1)]);
        let prof = level_sets(&seq, 3, 4).unwrap();
        assert_eq!(prof.levels, BTreeMap::from([(0, Rational::one())]));
        let report = alpha_and_markov(&prof);
        assert_eq!(report.alpha, Rational::zero());
        assert_eq!(report.profile.nu, Rational::zero());
        assert_eq!(report.markov_bound, MarkovBound::Infinite);
        assert_eq!(serde_json::to_value(&report.markov_bound).unwrap(), "inf");
    }

    #[test]
    fn alpha_two_routes() {
        let seq = custom(r(1, 2), &[(2, 0), (3, 1)]);
        let report = alpha_and_markov(&level_sets(&seq, 1, 3).unwrap());
        assert_eq!(report.alpha, alpha_by_expansion(&seq, 1, 3));
        for seed in 0..6 {
            for c in [r(1, 2), r(1, 4), r(2, 7)] {
                let seq = random_sequence(13, &c, seed).unwrap();
                let report = alpha_and_markov(&level_sets(&seq, 1, 13).unwrap());
                assert_eq!(report.alpha, alpha_by_expansion(&seq, 1, 13), "seed {seed} c {c}");
                assert!(report.markov_holds());
            }
        }
    }

    fn pair_brute(p1: u64, p2: u64, c: &Rational) -> Rational {
        let mut total = Rational::zero();
        for a in 0..p1 {
            for b in 0..p2 {
                total += intersect_measure(&arc_of(p1, a, c).unwrap(), &arc_of(p2, b, c).unwrap());
            }
        }
        total / Rational::from(p1 * p2)
    }

    #[test]
    fn pair_examples() {
        assert_eq!(pair_expectation(2, 3, &r(1, 2)).unwrap(), r(1, 6));
        assert_eq!(pair_brute(2, 3, &r(1, 2)), r(1, 6));
        let e = pair_expectation(2, 3, &r(1, 4)).unwrap();
        assert_eq!(e, pair_brute(2, 3, &r(1, 4)));
        assert!((e - r(1, 24)).abs() <= r(2, 9));
        assert!(pair_expectation(3, 3, &r(1, 4)).is_err());
        for (p1, p2) in [(3, 5), (5, 7), (2, 11), (7, 13)] {
            for c in [r(1, 8), r(1, 3), r(1, 2)] {
                assert_eq!(pair_expectation(p1, p2, &c).unwrap(), pair_brute(p1, p2, &c));
            }
        }
    }

    #[test]
    fn summed_pair_error() {
        let c = r(1, 4);
        let table = sieve_range(100).unwrap();
        let ps = table.primes();
        let mut err = Rational::zero();
        let mut bound = Rational::zero();
        for (j, &p2) in ps.iter().enumerate() {
            for &p1 in &ps[..j] {
                let e = pair_expectation(p1, p2, &c).unwrap();
                err += (e - r(4, 1) * &c * &c / Rational::from(p1 * p2)).abs();
            }
            bound += Rational::from(2 * (j as u64 + 1)) / Rational::from(p2 * p2);
        }
        assert!(err <= bound, "{} > {}", err.to_f64(), bound.to_f64());
    }

    /// Average of `λ(Ω)` over every sequence on the primes of `(x, y]`.
    fn enumerate_average(x: u64, y: u64, c: &Rational) -> Rational {
        let primes = sieve_range(y).unwrap().between(x, y).to_vec();
        let mut total = Rational::zero();
        let mut count = 0u64;
        let mut digits = vec![0u64; primes.len()];
        loop {
            let entries: Vec<(u64, u64)> = primes.iter().copied().zip(digits.iter().copied()).collect();
            let seq = NumeratorSequence::new(c.clone(), Method::Custom, None, entries).unwrap();
            total += uncovered_measure(&seq, x, y).unwrap();
            count += 1;
            let mut k = 0;
            loop {
                if k == digits.len() {
                    return total / Rational::from(count);
                }
                digits[k] += 1;
                if digits[k] < primes[k] {
                    break;
                }
                digits[k] = 0;
                k += 1;
            }
        }
    }

    #[test]
    fn expectation_examples() {
        assert_eq!(omega_expectation_exact(2, 3, &r(1, 2)).unwrap(), r(2, 3));
        assert_eq!(omega_expectation_exact(2, 3, &r(1, 5)).unwrap(), r(13, 15));
        // c = 1/2 arcs of each prime tile the circle.
        assert_eq!(omega_expectation_exact(2, 7, &r(1, 2)).unwrap(), r(16, 35));
        for c in [r(1, 2), r(1, 4), r(1, 3), r(1, 7)] {
            assert_eq!(omega_expectation_exact(2, 7, &c).unwrap(), enumerate_average(2, 7, &c), "c={c}");
            assert_eq!(omega_expectation_exact(1, 7, &c).unwrap(), enumerate_average(1, 7, &c), "c={c}");
        }
    }

    #[test]
    fn expectation_monotone() {
        let c = r(1, 4);
        let mut prev = Rational::one();
        for y in [3, 5, 7, 11, 13, 30, 60, 100] {
            let e = omega_expectation_exact(2, y, &c).unwrap();
            assert!(e <= prev);
            prev = e;
        }
        assert!(matches!(omega_expectation_exact(2, 10_000, &c), Err(Error::RangeTooLarge(_))));
    }

    #[test]
    fn mc_single_trial_is_a_sample() {
        let mc = omega_expectation_mc(2, 50, &r(1, 4), 1, 99).unwrap();
        let primes = sieve_range(50).unwrap().between(2, 50).to_vec();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        rng.set_stream(0);
        let entries = random_numerators(&primes, &mut rng);
        let seq = NumeratorSequence::new(r(1, 4), Method::Custom, None, entries).unwrap();
        assert_eq!(mc.mean, uncovered_measure(&seq, 2, 50).unwrap().to_f64());
        assert_eq!(mc.stderr, 0.0);
    }

    #[test]
    fn mc_matches_exact() {
        let exact = omega_expectation_exact(2, 7, &r(1, 4)).unwrap().to_f64();
        let mc = omega_expectation_mc(2, 7, &r(1, 4), 4000, 5).unwrap();
        assert!((mc.mean - exact).abs() <= 3.0 * mc.stderr, "{mc:?} vs {exact}");
    }
}
