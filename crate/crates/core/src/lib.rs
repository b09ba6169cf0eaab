//! Exact experiments on rational approximation where every prime denominator
//! `p` gets a single numerator `a_p`.
//!
//! The circle `R/Z` is the ambient space: the arc `I_p(a)` is centered at
//! `a/p` with half-width `c/p` and wraps around 0, so its measure is exactly
//! `2c/p` for every `a`. All measures are exact [`Rational`]s.

pub mod ergodic;
pub mod error;
pub mod exact_arith;
pub mod hits;
pub mod primes;
pub mod sequences;
pub mod sieve_lab;

pub use error::{Error, Result};
pub use exact_arith::{arc_of, intersect_measure, normalize_union, Arc, ArcUnion, Rational};
pub use primes::{harmonic_h, sieve_range, HarmonicSum, PrimeTable};
pub use sequences::{
    block_construction, greedy_sequence, random_sequence, uncovered_measure, BlockSchedule, Method,
    NumeratorSequence,
};
pub use hits::{fractional_hits, hit_primes, loglog_heuristic, HitReport, RealApproximant};
pub use sieve_lab::{
    alpha_and_markov, level_sets, omega_expectation_exact, omega_expectation_mc, pair_expectation, LevelSetProfile,
    SieveReport,
};
pub use ergodic::{convergence_series, s_closed, s_direct, sparse_prime_set, ErgodicSample, SparseMode, SparsePrimeSet};
