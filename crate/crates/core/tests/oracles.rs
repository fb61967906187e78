mod common;

use common::*;
use lacunary::equidistribution::{
    power_mean_gap, power_mean_gap_bound, sample_points, sup_norm_via_grid, weyl_mean, CirclePoint,
    SparsePolynomial, DEFAULT_GRID_CAP,
};
use lacunary::integer_sets::{generate_geometric, generate_primes, generate_range, sieve_primes};
use lacunary::relations::{count_representations, enumerate_relations, is_s_independent};
use lacunary::IntegerSet;
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn relation_tables_match_box_scan() {
    for s in 1..=3 {
        let rs = enumerate_relations(s).unwrap();
        for m in 3..=2 * s as usize {
            let mut ours: Vec<Vec<i64>> = rs.of_length(m).iter().map(|r| r.coefficients().to_vec()).collect();
            ours.sort();
            assert_eq!(ours, brute_relations(s, m), "s = {s}, m = {m}");
        }
        for m in 2 * s as usize + 1..=8 {
            assert!(rs.of_length(m).is_empty());
        }
    }
    assert_eq!(enumerate_relations(1).unwrap().count(), 0);
    assert_eq!(enumerate_relations(2).unwrap().count(), 12);
    assert_eq!(brute_relations(2, 3).len(), 6);
    assert_eq!(brute_relations(2, 4).len(), 6);
}

#[test]
fn independence_matches_naive_oracle_on_random_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let tables = [brute_relation_table(2), brute_relation_table(3)];
    for _ in 0..400 {
        let n = rng.random_range(0..=7);
        let hi = rng.random_range(8..200);
        let mut v: Vec<i64> = (0..n).map(|_| rng.random_range(-hi..=hi)).collect();
        v.sort_unstable();
        v.dedup();
        let set = IntegerSet::from_i64("r", v.clone());
        for (s, table) in [2u32, 3].iter().zip(&tables) {
            let report = is_s_independent(&set, *s).unwrap();
            assert_eq!(report.independent, !naive_dependent(&v, table), "{v:?}, s = {s}");
            if let Some(w) = report.witness {
                assert_eq!(w.relation.evaluate(&w.elements), BigInt::from(0));
                let mut distinct = w.elements.clone();
                distinct.sort();
                distinct.dedup();
                assert_eq!(distinct.len(), w.elements.len());
                assert!(w.elements.iter().all(|e| set.contains(e)));
            }
        }
    }
}

#[test]
fn large_sets_agree_with_naive_oracle() {
    // past the direct-enumeration threshold, so the split search is used
    let table = brute_relation_table(2);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let mut v: Vec<i64> = (0..30).map(|_| rng.random_range(1..1_000_000)).collect();
        v.sort_unstable();
        v.dedup();
        let set = IntegerSet::from_i64("r", v.clone());
        assert_eq!(is_s_independent(&set, 2).unwrap().independent, !naive_dependent(&v, &table));
    }
    let sidon: Vec<i64> = (0..30).map(|i| (1i64 << i) + 1).collect();
    assert!(is_s_independent(&IntegerSet::from_i64("p", sidon.clone()), 2).unwrap().independent);
    assert!(!naive_dependent(&sidon, &table));
}

#[test]
fn moment_matches_pair_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let mut v: Vec<i64> = (0..rng.random_range(1..10)).map(|_| rng.random_range(0..=60)).collect();
        v.sort_unstable();
        v.dedup();
        let m = count_representations(&IntegerSet::from_i64("r", v.clone()), 2).unwrap().moment;
        assert_eq!(m as u64, pair_moment(&v));
    }
    assert_eq!(count_representations(&IntegerSet::from_i64("s", [0, 1, 3]), 2).unwrap().moment, 15);
}

#[test]
fn primes_match_trial_division() {
    let slow: Vec<u64> = (2..5000u64).filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)).collect();
    assert_eq!(sieve_primes(4999), slow);
    assert_eq!(generate_primes(100).len(), 25);
}

#[test]
fn grid_sup_matches_direct_summation() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let terms: Vec<(i64, f64)> = (0..=64)
            .filter_map(|n| match rng.random_range(0..3) {
                0 => None,
                1 => Some((n, 1.0)),
                _ => Some((n, -1.0)),
            })
            .collect();
        let poly = SparsePolynomial::from_real(terms.iter().map(|&(n, c)| (BigInt::from(n), c)));
        let g = sup_norm_via_grid(&poly, DEFAULT_GRID_CAP);
        let direct = direct_grid_sup(&terms, g.grid_size.max(1));
        assert!((g.sup - direct).abs() < 1e-9, "{} vs {direct}", g.sup);
    }
}

#[test]
fn rational_means_match_float_evaluation() {
    let e = generate_range(1, 5000);
    for (a, q) in [(1i64, 7u64), (3, 10), (-2, 9), (5, 1_000_003)] {
        let exact = weyl_mean(&e, 5000, &CirclePoint::rational(a, q).unwrap()).unwrap();
        let terms: Vec<(i64, f64)> = (1..=5000).map(|n| (n, 1.0 / 5000.0)).collect();
        let float = direct_eval(&terms, a as f64 / q as f64);
        assert!((exact - float).norm() < 1e-10, "{a}/{q}");
    }
}

#[test]
fn power_mean_gap_stays_below_bound() {
    let base = generate_geometric(3, 20).unwrap();
    let points = sample_points(12, &[2, 3]);
    for k in 2..=12 {
        let gap = power_mean_gap(&base, k, 2, &points).unwrap();
        assert!(gap <= power_mean_gap_bound(k, 2) + 1e-12, "k = {k}: {gap}");
    }
}
