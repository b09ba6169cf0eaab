//! The twisted averages `s_p(x, y) = (1/p) sum_{n<p} e(-n a_p/p) e(x + n y)`
//! along the shear `f(x, y) = (x + y, y)`.
//!
//! Summing the geometric progression gives, with `d = y - a_p/p`,
//! `s_p = e(x)/p * sin(π p d)/sin(π d) * e((p-1) d / 2)`, so `|s_p|` is a
//! Dirichlet kernel in `d`: at least `2/π` when `p|d| <= 1/2` and at most
//! `1/(2 p |d|)` otherwise. Both the direct sum and the closed form are
//! provided; the direct sum is the reference.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::primes::{next_prime, sieve_range};
use crate::sequences::NumeratorSequence;

/// Below this `|sin(π d)|` the closed form hands over to the direct sum.
pub const SINGULAR_SIN: f64 = 1e-8;

/// `e(t) = exp(2πi t)`, with `t` reduced mod 1 first.
pub fn e(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * t.rem_euclid(1.0))
}

/// Neumaier-compensated complex sum.
#[derive(Default)]
struct CompensatedSum {
    re: (f64, f64),
    im: (f64, f64),
}

fn neumaier(acc: &mut (f64, f64), x: f64) {
    let (sum, comp) = *acc;
    let t = sum + x;
    let c = if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
    *acc = (t, comp + c);
}

impl CompensatedSum {
    fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, z.re);
        neumaier(&mut self.im, z.im);
    }

    fn total(&self) -> Complex64 {
        Complex64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

/// `(1/p) sum_{0<=n<p} e(-n a/p) e(x + n y)`, term by term.
///
/// Term `n` is `e(x + n d)` with `d = y - a/p` reduced to `(-1/2, 1/2]`,
/// which is the same point of the circle. Working with `d` keeps the phases
/// small and makes `y = a/p` (as a float) give exactly `e(x)`.
pub fn s_direct(p: u64, a: u64, x: f64, y: f64) -> Complex64 {
    debug_assert!(a < p);
    let d = reduced_offset(p, a, y);
    let mut acc = CompensatedSum::default();
    for n in 0..p {
        acc.add(e(x + (n as f64 * d).rem_euclid(1.0)));
    }
    acc.total() / p as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalMethod {
    Direct,
    Closed,
}

/// `y - a/p` reduced to `(-1/2, 1/2]`.
pub fn reduced_offset(p: u64, a: u64, y: f64) -> f64 {
    let d = y - a as f64 / p as f64;
    let d = d - d.round();
    if d <= -0.5 {
        d + 1.0
    } else {
        d
    }
}

/// Closed form of `s_p`; near the removable singularity `d = 0` this falls
/// back to [`s_direct`], and the returned method says which was used.
pub fn s_closed(p: u64, a: u64, x: f64, y: f64) -> (Complex64, EvalMethod) {
    let d = reduced_offset(p, a, y);
    let denom = (PI * d).sin();
    if denom.abs() < SINGULAR_SIN {
        return (s_direct(p, a, x, y), EvalMethod::Direct);
    }
    let kernel = (PI * p as f64 * d).sin() / (p as f64 * denom);
    (e(x) * e((p as f64 - 1.0) * d / 2.0) * kernel, EvalMethod::Closed)
}

/// One evaluation of `s_p(x, y)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErgodicSample {
    pub p: u64,
    pub a_p: u64,
    pub x: f64,
    pub y: f64,
    #[serde(serialize_with = "complex_pair")]
    pub s: Complex64,
    pub method: EvalMethod,
    /// Signed offset `d = y - a_p/p` in `(-1/2, 1/2]`.
    pub d: f64,
    /// `|d|`, the circle distance from `y` to `a_p/p`.
    pub distance: f64,
    /// `p |d| <= c`.
    pub is_hit: bool,
}

fn complex_pair<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    (z.re, z.im).serialize(s)
}

impl ErgodicSample {
    pub fn abs_s(&self) -> f64 {
        self.s.norm()
    }
}

/// `s_p(x, y)` for each listed prime, classified by whether `y` lies within
/// `c/p` of `a_p/p`.
pub fn convergence_series(seq: &NumeratorSequence, x: f64, y: f64, primes: &[u64]) -> Result<Vec<ErgodicSample>> {
    let c = seq.c().to_f64();
    primes
        .iter()
        .map(|&p| {
            let a_p = seq.require(p)?;
            let d = reduced_offset(p, a_p, y);
            let (s, method) = s_closed(p, a_p, x, y);
            let distance = d.abs();
            Ok(ErgodicSample { p, a_p, x, y, s, method, d, distance, is_hit: p as f64 * distance <= c })
        })
        .collect()
}

/// Fraction of `samples` uniform `y` for which some listed prime is a hit.
pub fn hit_fraction(seq: &NumeratorSequence, primes: &[u64], samples: u64, seed: u64) -> Result<f64> {
    let c = seq.c().to_f64();
    let numerators: Vec<(u64, u64)> = primes.iter().map(|&p| Ok((p, seq.require(p)?))).collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    for _ in 0..samples {
        let y: f64 = rng.random();
        if numerators.iter().any(|&(p, a)| p as f64 * reduced_offset(p, a, y).abs() <= c) {
            hits += 1;
        }
    }
    Ok(hits as f64 / samples.max(1) as f64)
}

/// Growth function `ψ` for the generalized sparseness condition
/// `sum_{p in P} ψ(p)/p < ∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Psi {
    Log,
    LogLog,
    Sqrt,
}

impl Psi {
    pub fn name(self) -> &'static str {
        match self {
            Psi::Log => "log",
            Psi::LogLog => "loglog",
            Psi::Sqrt => "sqrt",
        }
    }

    pub fn eval(self, p: u64) -> f64 {
        let t = p as f64;
        match self {
            Psi::Log => t.ln(),
            Psi::LogLog => t.ln().ln(),
            Psi::Sqrt => t.sqrt(),
        }
    }
}

impl std::str::FromStr for Psi {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log" => Ok(Psi::Log),
            "loglog" => Ok(Psi::LogLog),
            "sqrt" => Ok(Psi::Sqrt),
            other => Err(Error::UnknownPsi(other.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SparseMode {
    /// Least prime above `4^n`, weighted by `log p / p`.
    Geometric,
    /// Least prime above `2^n`, weighted by `ψ(p)/p`.
    Psi(Psi),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SparsePrimeSet {
    pub primes: Vec<u64>,
    /// `sum ψ(p)/p` over the members (`ψ = log` in geometric mode).
    pub weight_sum: f64,
    pub generator: String,
}

fn least_primes_above_powers(base: u64, bound: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut power = base;
    while power < bound {
        let p = next_prime(power);
        if p > bound {
            break;
        }
        out.push(p);
        match power.checked_mul(base) {
            Some(next) => power = next,
            None => break,
        }
    }
    out
}

pub fn sparse_prime_set(bound: u64, mode: SparseMode) -> Result<SparsePrimeSet> {
    if bound < 2 {
        return Err(Error::BoundTooSmall(bound));
    }
    let (primes, psi, generator) = match mode {
        SparseMode::Geometric => {
            (least_primes_above_powers(4, bound), Psi::Log, "least prime > 4^n, n >= 1; weight log p / p".to_string())
        }
        SparseMode::Psi(psi) => (
            least_primes_above_powers(2, bound),
            psi,
            format!("least prime > 2^n, n >= 1; weight {} p / p", psi.name()),
        ),
    };
    let weight_sum = primes.iter().map(|&p| psi.eval(p) / p as f64).sum();
    Ok(SparsePrimeSet { primes, weight_sum, generator })
}

/// Primes up to `bound`; convenience for building series inputs.
pub fn primes_up_to(bound: u64) -> Result<Vec<u64>> {
    Ok(sieve_range(bound)?.primes().to_vec())
}
