use proptest::prelude::*;

use ratapprox_core::ergodic::{reduced_offset, s_closed, s_direct};
use ratapprox_core::exact_arith::point::{Cover, PrimeArcs};
use ratapprox_core::exact_arith::{intersect_measure, ExactSum};
use ratapprox_core::sequences::Greedy;
use ratapprox_core::{
    alpha_and_markov, arc_of, level_sets, normalize_union, Arc, Method, NumeratorSequence, Rational,
};

fn rational_unit(den_max: i64) -> impl Strategy<Value = Rational> {
    (1..=den_max).prop_flat_map(|d| (0..=d).prop_map(move |n| Rational::frac(n, d)))
}

fn arc() -> impl Strategy<Value = Arc> {
    (rational_unit(24), rational_unit(12)).prop_map(|(l, len)| Arc::new(l, len).unwrap())
}

fn lattice_arc() -> impl Strategy<Value = Arc> {
    (0i64..24, 0i64..=12).prop_map(|(l, len)| Arc::new(Rational::frac(l, 24), Rational::frac(len, 24)).unwrap())
}

fn small_c() -> impl Strategy<Value = Rational> {
    (1i64..=8).prop_flat_map(|d| (1..=d).prop_map(move |n| Rational::frac(n, 2 * d)))
}

fn random_seq(max_p: u64) -> impl Strategy<Value = NumeratorSequence> {
    let primes: Vec<u64> = ratapprox_core::sieve_range(max_p).unwrap().primes().to_vec();
    (small_c(), proptest::collection::vec(any::<u64>(), primes.len())).prop_map(move |(c, raw)| {
        let entries = primes.iter().zip(raw).map(|(&p, r)| (p, r % p)).collect();
        NumeratorSequence::new(c, Method::Custom, None, entries).unwrap()
    })
}

proptest! {
    #[test]
    fn normalize_is_idempotent_and_order_free(arcs in proptest::collection::vec(arc(), 0..8)) {
        let u = normalize_union(arcs.clone());
        prop_assert_eq!(normalize_union(u.arcs().to_vec()), u.clone());
        let mut reversed = arcs.clone();
        reversed.reverse();
        prop_assert_eq!(normalize_union(reversed), u.clone());
        let mut rotated = arcs;
        if !rotated.is_empty() {
            rotated.rotate_left(1);
        }
        prop_assert_eq!(normalize_union(rotated), u);
    }

    #[test]
    fn complement_measures_sum_to_one(arcs in proptest::collection::vec(arc(), 0..8)) {
        let u = normalize_union(arcs);
        prop_assert_eq!(u.measure() + u.complement().measure(), Rational::one());
        prop_assert!(u.measure() <= Rational::one());
    }

    #[test]
    fn membership_matches_sources(arcs in proptest::collection::vec(arc(), 0..6), x in rational_unit(60)) {
        let x = x.fract();
        let u = normalize_union(arcs.clone());
        prop_assert_eq!(u.contains(&x), arcs.iter().any(|a| a.contains(&x)));
    }

    #[test]
    fn union_measure_subadditive(arcs in proptest::collection::vec(lattice_arc(), 1..6)) {
        let u = normalize_union(arcs.clone());
        let total: Rational = arcs.iter().map(|a| a.length().clone()).sum();
        let disjoint = arcs.iter().enumerate().all(|(i, a)| {
            arcs[i + 1..].iter().all(|b| intersect_measure(a, b).is_zero())
        });
        prop_assert!(u.measure() <= total);
        prop_assert_eq!(u.measure() == total, disjoint);

        // Endpoints sit on the 1/24 lattice, so midpoint counting is exact.
        let n = 24;
        let inside = (0..n).filter(|i| u.contains(&Rational::frac(2 * i + 1, 2 * n))).count();
        prop_assert_eq!(Rational::frac(inside as i64, n), u.measure());
    }

    #[test]
    fn sequence_json_round_trip(seq in random_seq(60)) {
        prop_assert_eq!(NumeratorSequence::from_json(&seq.to_json()).unwrap(), seq);
    }

    #[test]
    fn sieve_identities(seq in random_seq(80), x in 0u64..40) {
        let prof = level_sets(&seq, x, 80).unwrap();
        prop_assert_eq!(prof.total(), Rational::one());
        prop_assert_eq!(prof.first_moment(), prof.nu.clone());
        let report = alpha_and_markov(&prof);
        prop_assert!(report.markov_holds());
    }

    #[test]
    fn closed_form_agrees(p_idx in 0usize..1229, a_raw in any::<u64>(), x in 0.0f64..1.0, y in 0.0f64..1.0) {
        let p = ratapprox_core::sieve_range(9973).unwrap().primes()[p_idx];
        let a = a_raw % p;
        let (s, _) = s_closed(p, a, x, y);
        prop_assert!((s - s_direct(p, a, x, y)).norm() <= 1e-9);
        let d = reduced_offset(p, a, y).abs();
        prop_assert!(s.norm() <= 1.0 + 1e-12);
        if d > 0.0 {
            prop_assert!(s.norm() <= 1.0 / (2.0 * p as f64 * d) + 1e-9);
        }
        if p as f64 * d <= 0.5 {
            prop_assert!(s.norm() >= 2.0 / std::f64::consts::PI - 1e-9);
        }
    }

    #[test]
    fn greedy_choice_is_exhaustive_max(c in small_c(), picks in proptest::collection::vec(any::<u64>(), 8)) {
        // Start the greedy from an arbitrary cover, then check one step.
        let primes = [2u64, 3, 5, 7, 11, 13, 17, 19];
        let mut greedy = Greedy::new(&c, 23).unwrap();
        for (&p, r) in primes.iter().zip(picks) {
            greedy.commit(p, r % p);
        }
        let (best_a, best_gain) = greedy.best(23);
        let arcs = PrimeArcs::new(&c, 23).unwrap();
        let before = greedy.cover().measure();
        for a in 0..23 {
            let mut pieces: Vec<_> = greedy.cover().pieces().collect();
            pieces.extend_from_slice(arcs.pieces(23, a).as_slice());
            let gain = Cover::from_pieces(pieces).measure() - &before;
            prop_assert!(gain <= best_gain);
            if a < best_a {
                prop_assert!(gain < best_gain);
            }
            if a == best_a {
                prop_assert_eq!(gain, best_gain.clone());
            }
        }
    }
}

#[test]
fn exact_sum_matches_public_arc_lengths() {
    let c = Rational::frac(1, 3);
    let mut acc = ExactSum::new();
    for a in 0..7 {
        acc.add(arc_of(7, a, &c).unwrap().length());
    }
    assert_eq!(acc.finish(), Rational::frac(2, 3));
}
