//! Numerator sequences `p -> a_p`: random under the uniform product measure,
//! greedy, block-certified and the constant baseline.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_arith::point::{Cover, Piece, PrimeArcs};
use crate::exact_arith::{validate_c, ExactSum, Rational};
use crate::primes::{is_prime, sieve_range};

/// Candidates whose floating-point gain is this close to the best one are
/// re-evaluated exactly.
const GAIN_SLACK: f64 = 1e-9;

/// Candidate scans at or above this prime run on the rayon pool.
const PARALLEL_SCAN_FROM: u64 = 4096;

/// Seed of the fallback stream used when no candidate of a block prime gains
/// anything.
const BLOCK_FALLBACK_SEED: u64 = 0x5eed_b10c;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Random,
    Greedy,
    Blocks,
    Constant,
    Custom,
}

/// A finite sequence `(p, a_p)` over primes, with `0 <= a_p < p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSequence")]
pub struct NumeratorSequence {
    c: Rational,
    method: Method,
    seed: Option<u64>,
    entries: Vec<(u64, u64)>,
}

#[derive(Deserialize)]
struct RawSequence {
    c: Rational,
    method: Method,
    seed: Option<u64>,
    entries: Vec<(u64, u64)>,
}

impl TryFrom<RawSequence> for NumeratorSequence {
    type Error = Error;

    fn try_from(raw: RawSequence) -> Result<Self> {
        NumeratorSequence::new(raw.c, raw.method, raw.seed, raw.entries)
    }
}

impl NumeratorSequence {
    pub fn new(c: Rational, method: Method, seed: Option<u64>, entries: Vec<(u64, u64)>) -> Result<Self> {
        validate_c(&c)?;
        let mut prev = 0;
        for &(p, a) in &entries {
            if p <= prev {
                return Err(Error::InvalidSequence(format!("primes not strictly ascending at {p}")));
            }
            if !is_prime(p) {
                return Err(Error::InvalidSequence(format!("{p} is not prime")));
            }
            if a >= p {
                return Err(Error::NumeratorOutOfRange { p, a });
            }
            prev = p;
        }
        Ok(NumeratorSequence { c, method, seed, entries })
    }

    pub fn c(&self) -> &Rational {
        &self.c
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn entries(&self) -> &[(u64, u64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_prime(&self) -> Option<u64> {
        self.entries.last().map(|e| e.0)
    }

    pub fn get(&self, p: u64) -> Option<u64> {
        self.entries.binary_search_by_key(&p, |e| e.0).ok().map(|i| self.entries[i].1)
    }

    pub fn require(&self, p: u64) -> Result<u64> {
        self.get(p).ok_or(Error::MissingPrime(p))
    }

    /// Entries for every prime `X < p <= Y`; fails on the first prime the
    /// sequence lacks.
    pub fn range(&self, x: u64, y: u64) -> Result<Vec<(u64, u64)>> {
        if y < 2 || y <= x {
            return Ok(Vec::new());
        }
        let table = sieve_range(y)?;
        table.between(x, y).iter().map(|&p| Ok((p, self.require(p)?))).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("sequence serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(format!("sequence file: {e}")))
    }
}

/// Independent uniform `a_p` in `0..p` for every prime `p <= bound`, drawn
/// from a ChaCha8 stream seeded with `seed`.
pub fn random_sequence(bound: u64, c: &Rational, seed: u64) -> Result<NumeratorSequence> {
    validate_c(c)?;
    let table = sieve_range(bound)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries = random_numerators(table.primes(), &mut rng);
    Ok(NumeratorSequence { c: c.clone(), method: Method::Random, seed: Some(seed), entries })
}

/// One uniform draw per prime; `random_range` rejects rather than reducing
/// modulo `p`, so there is no bias.
pub fn random_numerators<R: Rng>(primes: &[u64], rng: &mut R) -> Vec<(u64, u64)> {
    primes.iter().map(|&p| (p, rng.random_range(0..p))).collect()
}

/// `a_p = 0` for every prime `p <= bound`.
pub fn constant_sequence(bound: u64, c: &Rational) -> Result<NumeratorSequence> {
    validate_c(c)?;
    let table = sieve_range(bound)?;
    let entries = table.primes().iter().map(|&p| (p, 0)).collect();
    Ok(NumeratorSequence { c: c.clone(), method: Method::Constant, seed: None, entries })
}

/// One recorded greedy choice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GreedyStep {
    pub p: u64,
    pub a: u64,
    pub gain: Rational,
}

/// Incremental greedy cover: each call to [`Greedy::step`] picks the `a`
/// maximizing the measure added to the covered set.
#[derive(Clone, Debug)]
pub struct Greedy {
    arcs: PrimeArcs,
    cover: Cover,
}

impl Greedy {
    pub fn new(c: &Rational, max_p: u64) -> Result<Self> {
        Ok(Greedy { arcs: PrimeArcs::new(c, max_p)?, cover: Cover::new() })
    }

    pub fn cover(&self) -> &Cover {
        &self.cover
    }

    /// Exact measure that `I_p(a)` would add to the covered set.
    pub fn exact_gain(&self, p: u64, a: u64) -> Rational {
        let mut acc = ExactSum::new();
        let mut any = false;
        for piece in self.arcs.pieces(p, a).as_slice() {
            any |= self.cover.overlap_exact(*piece, &mut acc);
        }
        let full = self.arcs.arc_length(p);
        if any {
            full - acc.finish()
        } else {
            full
        }
    }

    fn approx_gain(&self, p: u64, a: u64, full: f64) -> f64 {
        let overlap: f64 = self
            .arcs
            .pieces(p, a)
            .as_slice()
            .iter()
            .map(|q| self.cover.overlap_f64(q.lo.to_f64(), q.hi.to_f64()))
            .sum();
        full - overlap
    }

    /// Best `a` for prime `p` and its exact gain; ties go to the smallest
    /// `a`. Does not modify the cover.
    pub fn best(&self, p: u64) -> (u64, Rational) {
        if self.cover.is_full() {
            return (0, Rational::zero());
        }
        let full = self.arcs.arc_length_f64(p);
        let approx: Vec<f64> = if p >= PARALLEL_SCAN_FROM {
            (0..p).into_par_iter().map(|a| self.approx_gain(p, a, full)).collect()
        } else {
            (0..p).map(|a| self.approx_gain(p, a, full)).collect()
        };
        let top = approx.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut best: Option<(u64, Rational)> = None;
        for (a, _) in approx.iter().enumerate().filter(|(_, g)| **g >= top - GAIN_SLACK) {
            let gain = self.exact_gain(p, a as u64);
            if best.as_ref().is_none_or(|(_, b)| gain > *b) {
                best = Some((a as u64, gain));
            }
        }
        best.expect("p >= 1 candidate")
    }

    pub fn commit(&mut self, p: u64, a: u64) {
        let arc = self.arcs.pieces(p, a);
        self.cover.insert_arc(&arc);
    }

    pub fn step(&mut self, p: u64) -> GreedyStep {
        let (a, gain) = self.best(p);
        self.commit(p, a);
        GreedyStep { p, a, gain }
    }
}

/// Greedy over all primes `p <= bound` in increasing order, starting from
/// an empty cover.
pub fn greedy_sequence(bound: u64, c: &Rational) -> Result<NumeratorSequence> {
    greedy_trace(bound, c).map(|(seq, _)| seq)
}

/// [`greedy_sequence`] together with the exact gain of every step.
pub fn greedy_trace(bound: u64, c: &Rational) -> Result<(NumeratorSequence, Vec<GreedyStep>)> {
    validate_c(c)?;
    let table = sieve_range(bound)?;
    let mut greedy = Greedy::new(c, bound)?;
    let steps: Vec<GreedyStep> = table.primes().iter().map(|&p| greedy.step(p)).collect();
    let entries = steps.iter().map(|s| (s.p, s.a)).collect();
    let seq = NumeratorSequence { c: c.clone(), method: Method::Greedy, seed: None, entries };
    Ok((seq, steps))
}

/// One block `(start, end]` of primes and its coverage certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Block {
    pub start: u64,
    pub end: u64,
    pub epsilon: Rational,
    pub achieved_uncovered: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize)]
pub struct BlockSchedule {
    pub blocks: Vec<Block>,
}

impl BlockSchedule {
    pub fn final_bound(&self) -> Option<u64> {
        self.blocks.last().map(|b| b.end)
    }
}

/// Builds consecutive blocks `(X_n, X_{n+1}]` with `X_1 = 1`. Inside each
/// block the greedy runs on an empty cover over successive primes until the
/// uncovered measure of that block is at most `epsilons[n]`. A prime none of
/// whose candidates gains anything gets a numerator from a seeded fallback
/// stream instead of the tie-break.
pub fn block_construction(
    epsilons: &[Rational],
    c: &Rational,
    max_bound: u64,
) -> Result<(NumeratorSequence, BlockSchedule)> {
    validate_c(c)?;
    for eps in epsilons {
        if !eps.is_positive() || *eps >= Rational::one() {
            return Err(Error::InvalidEpsilon(eps.to_string()));
        }
    }
    let table = sieve_range(max_bound)?;
    let mut entries = Vec::new();
    let mut schedule = BlockSchedule::default();
    let mut start = 1;

    for (n, eps) in epsilons.iter().enumerate() {
        let mut greedy = Greedy::new(c, max_bound)?;
        let mut fallback = ChaCha8Rng::seed_from_u64(BLOCK_FALLBACK_SEED);
        fallback.set_stream(n as u64);
        let target = 1.0 - eps.to_f64() - GAIN_SLACK;
        let mut done = None;

        for &p in table.between(start, max_bound) {
            let (mut a, gain) = greedy.best(p);
            if gain.is_zero() && !greedy.cover().is_full() {
                a = fallback.random_range(0..p);
            }
            greedy.commit(p, a);
            entries.push((p, a));
            if greedy.cover().measure_f64() >= target {
                let uncovered = Rational::one() - greedy.cover().measure();
                if uncovered <= *eps {
                    done = Some((p, uncovered));
                    break;
                }
            }
        }

        match done {
            Some((end, achieved_uncovered)) => {
                schedule.blocks.push(Block { start, end, epsilon: eps.clone(), achieved_uncovered });
                start = end;
            }
            None => {
                let uncovered = Rational::one() - greedy.cover().measure();
                return Err(Error::BudgetExhausted {
                    block: n + 1,
                    max_bound,
                    epsilon: eps.to_string(),
                    uncovered: format!("{:.6}", uncovered.to_f64()),
                });
            }
        }
    }

    let seq = NumeratorSequence { c: c.clone(), method: Method::Blocks, seed: None, entries };
    Ok((seq, schedule))
}

/// Linear pieces of `I_p(a_p)` for the given entries.
pub(crate) fn arc_pieces(arcs: &PrimeArcs, entries: &[(u64, u64)]) -> Vec<Piece> {
    entries.iter().flat_map(|&(p, a)| arcs.pieces(p, a).as_slice().to_vec()).collect()
}

/// Exact uncovered measure of a set of entries.
pub(crate) fn uncovered_of(c: &Rational, entries: &[(u64, u64)]) -> Result<Rational> {
    let max_p = entries.iter().map(|e| e.0).max().unwrap_or(1);
    let arcs = PrimeArcs::new(c, max_p)?;
    let cover = Cover::from_pieces(arc_pieces(&arcs, entries));
    Ok(Rational::one() - cover.measure())
}

/// `λ(Ω_{X,Y})`: exact measure of the points outside every `I_p(a_p)` with
/// `X < p <= Y`.
pub fn uncovered_measure(seq: &NumeratorSequence, x: u64, y: u64) -> Result<Rational> {
    if y <= x {
        return Err(Error::InvalidRange(format!("need X < Y, got X={x}, Y={y}")));
    }
    let entries = seq.range(x, y)?;
    uncovered_of(&seq.c, &entries)
}
