//! Exact rationals, arcs of the circle `R/Z` and their measures.
//!
//! Public values use [`Rational`] throughout. The [`point`] submodule holds a
//! machine-word representation of the endpoints of the arcs `I_p(a)` that the
//! sweeps in the other modules run on; it never rounds.

mod arc;
pub mod point;
mod rational;
mod sum;

pub use arc::{arc_of, intersect_measure, normalize_union, Arc, ArcUnion};
pub use rational::Rational;
pub use sum::ExactSum;

use crate::error::{Error, Result};

/// Checks `0 < c <= 1/2`.
pub fn validate_c(c: &Rational) -> Result<()> {
    if c.is_positive() && *c <= Rational::frac(1, 2) {
        Ok(())
    } else {
        Err(Error::InvalidC)
    }
}

/// Measure of a union of arcs; shorthand for `normalize_union(..).measure()`.
pub fn measure(u: &ArcUnion) -> Rational {
    u.measure()
}
