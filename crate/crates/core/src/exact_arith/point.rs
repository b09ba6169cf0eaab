//! Allocation-free exact geometry for the arcs `I_p(a)`.
//!
//! With `c = u/v`, every endpoint of `I_p(a)` is `n / (p v)` for an integer
//! `n`, so endpoints fit in a pair of machine words and compare exactly by
//! 128-bit cross-multiplication. Lengths are accumulated per denominator in
//! an [`ExactSum`] and only turned into bignum rationals once per result.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use super::{ExactSum, Rational};
use crate::error::{Error, Result};

/// Largest admissible `p * v`; keeps cross products inside `i128` and
/// bucket numerators below `2^63`.
const MAX_DEN: u64 = 1 << 62;

/// A point `num/den` of `[0, 1]`, not necessarily in lowest terms.
#[derive(Clone, Copy, Debug)]
pub struct Point {
    num: u64,
    den: u64,
}

impl Point {
    pub const ZERO: Point = Point { num: 0, den: 1 };
    pub const ONE: Point = Point { num: 1, den: 1 };

    pub fn new(num: u64, den: u64) -> Self {
        debug_assert!(den > 0 && num <= den && den <= MAX_DEN);
        Point { num, den }
    }

    pub fn num(self) -> u64 {
        self.num
    }

    pub fn den(self) -> u64 {
        self.den
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn to_rational(self) -> Rational {
        Rational::frac(self.num as i64, self.den as i64)
    }
}

impl PartialEq for Point {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Point {}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Point {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

/// A closed linear interval `[lo, hi]` inside `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Piece {
    pub lo: Point,
    pub hi: Point,
}

impl Piece {
    /// Adds `hi - lo` to `acc` with the given multiplicity.
    #[inline]
    pub fn add_length(&self, acc: &mut ExactSum, k: i128) {
        acc.add_frac(k * self.hi.num as i128, self.hi.den);
        acc.add_frac(-k * self.lo.num as i128, self.lo.den);
    }
}

/// The one or two linear pieces of a circle arc.
#[derive(Clone, Copy, Debug)]
pub struct ArcPieces {
    pieces: [Piece; 2],
    len: usize,
}

impl ArcPieces {
    pub fn as_slice(&self) -> &[Piece] {
        &self.pieces[..self.len]
    }
}

/// Generator for the arcs `I_p(a)` of a fixed radius `c = u/v`.
#[derive(Clone, Copy, Debug)]
pub struct PrimeArcs {
    u: u64,
    v: u64,
}

impl PrimeArcs {
    /// Validates `c` in `(0, 1/2]` and that all endpoints for primes up to
    /// `max_p` fit the machine-word representation.
    pub fn new(c: &Rational, max_p: u64) -> Result<Self> {
        super::validate_c(c)?;
        let (u, v) = c
            .to_u64_parts()
            .ok_or_else(|| Error::DenominatorTooLarge(format!("c = {c}")))?;
        match max_p.max(1).checked_mul(v) {
            Some(d) if d <= MAX_DEN => Ok(PrimeArcs { u, v }),
            _ => Err(Error::DenominatorTooLarge(format!(
                "c = {c} with primes up to {max_p}"
            ))),
        }
    }

    pub fn c(&self) -> Rational {
        Rational::frac(self.u as i64, self.v as i64)
    }

    /// `I_p(a) = [a/p - c/p, a/p + c/p]` on the circle. Only `a = 0` wraps,
    /// since `c < 1` keeps the right end of every other arc below 1.
    pub fn pieces(&self, p: u64, a: u64) -> ArcPieces {
        debug_assert!(a < p);
        let den = p * self.v;
        let hi = a * self.v + self.u;
        if a == 0 {
            ArcPieces {
                pieces: [
                    Piece { lo: Point::new(den - self.u, den), hi: Point::ONE },
                    Piece { lo: Point::ZERO, hi: Point::new(self.u, den) },
                ],
                len: 2,
            }
        } else {
            let lo = a * self.v - self.u;
            let piece = Piece { lo: Point::new(lo, den), hi: Point::new(hi, den) };
            ArcPieces { pieces: [piece, piece], len: 1 }
        }
    }

    /// Exact length `2c/p` of each arc `I_p(a)`.
    pub fn arc_length(&self, p: u64) -> Rational {
        Rational::frac(2 * self.u as i64, (p * self.v) as i64)
    }

    pub fn arc_length_f64(&self, p: u64) -> f64 {
        2.0 * self.u as f64 / (p as f64 * self.v as f64)
    }
}

#[derive(Clone, Copy, Debug)]
struct CoverPiece {
    lo: Point,
    hi: Point,
    lo_f: f64,
    hi_f: f64,
}

/// A closed subset of `[0, 1]` kept as sorted, pairwise separated pieces.
///
/// Each piece caches its endpoints as `f64` so candidate scans can run in
/// floating point before an exact recheck.
#[derive(Clone, Debug, Default)]
pub struct Cover {
    pieces: Vec<CoverPiece>,
}

impl Cover {
    pub fn new() -> Self {
        Self::default()
    }

    /// Union of arbitrary pieces, by sort and merge.
    pub fn from_pieces(mut pieces: Vec<Piece>) -> Self {
        pieces.sort_unstable_by_key(|p| p.lo);
        let mut merged: Vec<CoverPiece> = Vec::with_capacity(pieces.len());
        for piece in pieces {
            match merged.last_mut() {
                Some(last) if piece.lo <= last.hi => {
                    if piece.hi > last.hi {
                        last.hi = piece.hi;
                        last.hi_f = piece.hi.to_f64();
                    }
                }
                _ => merged.push(CoverPiece {
                    lo: piece.lo,
                    hi: piece.hi,
                    lo_f: piece.lo.to_f64(),
                    hi_f: piece.hi.to_f64(),
                }),
            }
        }
        Cover { pieces: merged }
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn pieces(&self) -> impl Iterator<Item = Piece> + '_ {
        self.pieces.iter().map(|q| Piece { lo: q.lo, hi: q.hi })
    }

    pub fn is_full(&self) -> bool {
        matches!(self.pieces.as_slice(), [only] if only.lo == Point::ZERO && only.hi == Point::ONE)
    }

    pub fn insert(&mut self, piece: Piece) {
        let start = self.pieces.partition_point(|q| q.hi < piece.lo);
        let end = self.pieces.partition_point(|q| q.lo <= piece.hi);
        let mut lo = piece.lo;
        let mut hi = piece.hi;
        if start < end {
            lo = lo.min(self.pieces[start].lo);
            hi = hi.max(self.pieces[end - 1].hi);
        }
        let merged = CoverPiece { lo, hi, lo_f: lo.to_f64(), hi_f: hi.to_f64() };
        self.pieces.splice(start..end, std::iter::once(merged));
    }

    pub fn insert_arc(&mut self, arc: &ArcPieces) {
        for piece in arc.as_slice() {
            self.insert(*piece);
        }
    }

    /// Approximate `λ(self ∩ [lo, hi])`.
    pub fn overlap_f64(&self, lo: f64, hi: f64) -> f64 {
        let start = self.pieces.partition_point(|q| q.hi_f <= lo);
        let mut total = 0.0;
        for q in &self.pieces[start..] {
            if q.lo_f >= hi {
                break;
            }
            let w = hi.min(q.hi_f) - lo.max(q.lo_f);
            if w > 0.0 {
                total += w;
            }
        }
        total
    }

    /// Adds the exact `λ(self ∩ piece)` to `acc`; returns whether any
    /// positive-length overlap was found.
    pub fn overlap_exact(&self, piece: Piece, acc: &mut ExactSum) -> bool {
        let start = self.pieces.partition_point(|q| q.hi <= piece.lo);
        let mut any = false;
        for q in &self.pieces[start..] {
            if q.lo >= piece.hi {
                break;
            }
            let lo = q.lo.max(piece.lo);
            let hi = q.hi.min(piece.hi);
            if lo < hi {
                Piece { lo, hi }.add_length(acc, 1);
                any = true;
            }
        }
        any
    }

    pub fn measure(&self) -> Rational {
        let mut acc = ExactSum::new();
        for q in &self.pieces {
            Piece { lo: q.lo, hi: q.hi }.add_length(&mut acc, 1);
        }
        acc.finish()
    }

    pub fn measure_f64(&self) -> f64 {
        self.pieces.iter().map(|q| q.hi_f - q.lo_f).sum()
    }
}

/// Sweeps the arrangement of `pieces` over `[0, 1]` and returns, for every
/// covering multiplicity `k` that occurs on a set of positive length, the
/// exact measure of `{x : #pieces containing x = k}`. Levels between 0 and
/// the maximum that have zero measure are reported as 0.
pub fn level_measures(pieces: &[Piece]) -> BTreeMap<usize, Rational> {
    let mut events: Vec<(Point, i32)> = Vec::with_capacity(2 * pieces.len() + 2);
    for piece in pieces {
        events.push((piece.lo, 1));
        events.push((piece.hi, -1));
    }
    events.sort_unstable_by_key(|e| e.0);

    let mut sums: Vec<ExactSum> = Vec::new();
    let mut touched: Vec<bool> = Vec::new();
    let mut depth: i64 = 0;
    let mut cursor = Point::ZERO;
    let mut i = 0;
    loop {
        let next = if i < events.len() { events[i].0 } else { Point::ONE };
        if cursor < next {
            let k = depth as usize;
            if sums.len() <= k {
                sums.resize_with(k + 1, ExactSum::new);
                touched.resize(k + 1, false);
            }
            Piece { lo: cursor, hi: next }.add_length(&mut sums[k], 1);
            touched[k] = true;
            cursor = next;
        }
        if i >= events.len() {
            break;
        }
        while i < events.len() && events[i].0 == next {
            depth += events[i].1 as i64;
            i += 1;
        }
    }

    let top = touched.iter().rposition(|t| *t).unwrap_or(0);
    let mut levels = BTreeMap::new();
    let mut sums = sums.into_iter();
    for k in 0..=top {
        let value = sums.next().map(ExactSum::finish).unwrap_or_else(Rational::zero);
        levels.insert(k, value);
    }
    levels
}
