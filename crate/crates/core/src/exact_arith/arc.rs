use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{validate_c, ExactSum, Rational};
use crate::error::{Error, Result};

/// Closed arc `{left + t mod 1 : 0 <= t <= length}` of the circle `R/Z`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Arc {
    left: Rational,
    length: Rational,
}

impl Arc {
    /// `left` is reduced mod 1; `length` must lie in `[0, 1]`.
    pub fn new(left: Rational, length: Rational) -> Result<Self> {
        if length.is_negative() || length > Rational::one() {
            return Err(Error::InvalidRange(format!("arc length {length} outside [0,1]")));
        }
        Ok(Arc { left: left.fract(), length })
    }

    pub fn left(&self) -> &Rational {
        &self.left
    }

    pub fn length(&self) -> &Rational {
        &self.length
    }

    /// Right endpoint reduced mod 1.
    pub fn right(&self) -> Rational {
        (&self.left + &self.length).fract()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        (x - &self.left).fract() <= self.length
    }

    /// The arc as one or two closed intervals of `[0, 1]`.
    pub fn linear_pieces(&self) -> Vec<(Rational, Rational)> {
        let end = &self.left + &self.length;
        if end <= Rational::one() {
            vec![(self.left.clone(), end)]
        } else {
            vec![(self.left.clone(), Rational::one()), (Rational::zero(), end - Rational::one())]
        }
    }
}

/// The arc `I_p(a)`: centered at `a/p` with length `2c/p`, wrapping around
/// the circle rather than being clipped to `[0, 1]`.
pub fn arc_of(p: u64, a: u64, c: &Rational) -> Result<Arc> {
    if a >= p {
        return Err(Error::NumeratorOutOfRange { p, a });
    }
    validate_c(c)?;
    let p_r = Rational::from(p);
    let center = Rational::frac(a as i64, 1) / &p_r;
    let half = c / &p_r;
    Arc::new(&center - &half, &half + &half)
}

/// Exact measure of the intersection of two arcs.
pub fn intersect_measure(a: &Arc, b: &Arc) -> Rational {
    let mut acc = ExactSum::new();
    for (lo1, hi1) in a.linear_pieces() {
        for (lo2, hi2) in b.linear_pieces() {
            let lo = std::cmp::max(&lo1, &lo2);
            let hi = std::cmp::min(&hi1, &hi2);
            if lo < hi {
                acc.add(&(hi - lo));
            }
        }
    }
    acc.finish()
}

/// A finite union of closed arcs in maximal normal form: pairwise disjoint,
/// no two touching, sorted by left endpoint, with at most one arc crossing 0.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ArcUnion {
    arcs: Vec<Arc>,
}

impl ArcUnion {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn full() -> Self {
        ArcUnion { arcs: vec![Arc { left: Rational::zero(), length: Rational::one() }] }
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn measure(&self) -> Rational {
        let mut acc = ExactSum::new();
        for arc in &self.arcs {
            acc.add(&arc.length);
        }
        acc.finish()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.arcs.iter().any(|arc| arc.contains(x))
    }

    /// Closure of the complement. Boundary points are shared with `self`,
    /// which leaves every measure unchanged.
    pub fn complement(&self) -> ArcUnion {
        match self.arcs.as_slice() {
            [] => return ArcUnion::full(),
            [only] if only.length == Rational::one() => return ArcUnion::empty(),
            _ => {}
        }
        let n = self.arcs.len();
        let gaps: Vec<Arc> = (0..n)
            .map(|i| {
                let start = self.arcs[i].right();
                let next = &self.arcs[(i + 1) % n].left;
                let length = if n == 1 {
                    Rational::one() - &self.arcs[0].length
                } else {
                    (next - &start).fract()
                };
                Arc { left: start, length }
            })
            .collect();
        normalize_union(gaps)
    }
}

/// Normal form of the union of `arcs`; idempotent and independent of input
/// order.
pub fn normalize_union(arcs: impl IntoIterator<Item = Arc>) -> ArcUnion {
    let mut pieces: Vec<(Rational, Rational)> =
        arcs.into_iter().flat_map(|a| a.linear_pieces()).collect();
    if pieces.is_empty() {
        return ArcUnion::empty();
    }
    pieces.sort();
    let mut merged: Vec<(Rational, Rational)> = Vec::with_capacity(pieces.len());
    for (lo, hi) in pieces {
        match merged.last_mut() {
            Some(last) if lo <= last.1 => {
                if hi > last.1 {
                    last.1 = hi;
                }
            }
            _ => merged.push((lo, hi)),
        }
    }

    let one = Rational::one();
    let zero = Rational::zero();
    if merged.len() == 1 && merged[0].0 == zero && merged[0].1 == one {
        return ArcUnion::full();
    }
    // Join the piece ending at 1 with the piece starting at 0.
    let wrap = merged.len() >= 2 && merged[0].0 == zero && merged[merged.len() - 1].1 == one;
    let mut arcs = Vec::with_capacity(merged.len());
    let head_hi = if wrap { Some(merged[0].1.clone()) } else { None };
    let body = if wrap { &merged[1..] } else { &merged[..] };
    for (i, (lo, hi)) in body.iter().enumerate() {
        let is_last = i + 1 == body.len();
        let length = match (&head_hi, is_last) {
            (Some(extra), true) => hi - lo + extra,
            _ => hi - lo,
        };
        arcs.push(Arc { left: lo.fract(), length });
    }
    ArcUnion { arcs }
}

impl Serialize for ArcUnion {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.arcs.len()))?;
        for arc in &self.arcs {
            seq.serialize_element(&(&arc.left, &arc.length))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for ArcUnion {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw: Vec<(Rational, Rational)> = Vec::deserialize(deserializer)?;
        let arcs = raw
            .into_iter()
            .map(|(left, length)| Arc::new(left, length))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        Ok(normalize_union(arcs))
    }
}
