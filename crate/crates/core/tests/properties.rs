mod common;

use common::*;
use lacunary::equidistribution::{
    psi, summing_matrix_check, sup_norm_via_grid, weyl_mean, CirclePoint, SparsePolynomial, DEFAULT_GRID_CAP,
};
use lacunary::integer_sets::{generate_geometric, generate_range, generate_sumset};
use lacunary::partitions::decompose;
use lacunary::random_selection::{
    block_count_stats, blockwise_schedule, bourgain_schedule, select, BourgainForm, DensitySchedule,
};
use lacunary::relations::{count_representations, enumerate_relations, is_s_independent};
use lacunary::{IntegerSet, Partition, Rational, Scalar};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn small_set() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::btree_set(-300i64..300, 0..12).prop_map(|s| s.into_iter().collect())
}

fn nonnegative_set() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::btree_set(0i64..=60, 1..10).prop_map(|s| s.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn distribution_function_is_monotone(v in small_set(), ts in prop::collection::vec(0u64..400, 1..20)) {
        let e = IntegerSet::from_i64("p", v.clone());
        let mut ts = ts;
        ts.sort_unstable();
        let counts: Vec<usize> = ts.iter().map(|&t| e.distribution_at(t)).collect();
        prop_assert!(counts.windows(2).all(|w| w[0] <= w[1]));
        let max = e.max_abs().unwrap_or_default();
        prop_assert_eq!(e.distribution_function(&max), e.len());
        for (&t, &c) in ts.iter().zip(&counts) {
            prop_assert_eq!(c, v.iter().filter(|x| x.unsigned_abs() <= t).count());
        }
    }

    #[test]
    fn elements_are_ordered_by_absolute_value(v in small_set()) {
        let e = IntegerSet::from_i64("p", v.iter().rev().copied());
        let again = IntegerSet::from_i64("p", v.clone());
        prop_assert_eq!(e.elements(), again.elements());
        for w in e.elements().windows(2) {
            let (a, b) = (w[0].magnitude(), w[1].magnitude());
            prop_assert!(a < b || (a == b && w[0] < w[1]));
        }
    }

    #[test]
    fn geometric_sumsets_have_binomial_size(k in 2u32..14, j in 1usize..4) {
        let base = generate_geometric(3, k).unwrap();
        let j = j.min(base.len());
        let sums = generate_sumset(&base, j).unwrap();
        let n = base.len() as u64;
        let binom = (0..j as u64).fold(1u64, |acc, i| acc * (n - i) / (i + 1));
        prop_assert_eq!(sums.len() as u64, binom);
    }

    #[test]
    fn dyadic_blocks_cover_each_integer_once(k_max in 1u32..8) {
        let p = Partition::dyadic(k_max).unwrap();
        let top = 1i64 << k_max;
        for n in -top..=top {
            let n = BigInt::from(n);
            let hits = (0..p.num_blocks()).filter(|&k| p.contains(k, &n)).count();
            prop_assert_eq!(hits, 1);
            prop_assert!(p.block_of(&n).is_some_and(|k| p.contains(k, &n)));
        }
        prop_assert!(p.block_of(&BigInt::from(top + 1)).is_none());
    }

    #[test]
    fn decomposition_preserves_cardinality(v in small_set(), k_max in 1u32..9) {
        let e = IntegerSet::from_i64("p", v);
        let d = decompose(&e, &Partition::dyadic(k_max).unwrap());
        prop_assert_eq!(d.total_len(), e.len());
        let mut joined: Vec<BigInt> = d.blocks.iter().flat_map(|b| b.elements.elements().to_vec()).collect();
        joined.extend(d.remainder.elements().iter().cloned());
        prop_assert_eq!(joined.as_slice(), e.elements());
    }

    #[test]
    fn relation_tables_are_symmetric(s in 1u32..4) {
        let rs = enumerate_relations(s).unwrap();
        let all: std::collections::BTreeSet<Vec<i64>> = rs.iter().map(|r| r.coefficients().to_vec()).collect();
        for r in &all {
            prop_assert_eq!(r.iter().sum::<i64>(), 0);
            prop_assert!(r.iter().map(|c| c.abs()).sum::<i64>() <= 2 * i64::from(s));
            let neg: Vec<i64> = r.iter().map(|c| -c).collect();
            prop_assert!(all.contains(&neg));
            for i in 0..r.len() {
                for j in i + 1..r.len() {
                    let mut sw = r.clone();
                    sw.swap(i, j);
                    prop_assert!(all.contains(&sw));
                }
            }
        }
    }

    #[test]
    fn independence_is_monotone_in_s(v in small_set()) {
        let e = IntegerSet::from_i64("p", v);
        if is_s_independent(&e, 3).unwrap().independent {
            prop_assert!(is_s_independent(&e, 2).unwrap().independent);
        }
    }

    #[test]
    fn adding_elements_keeps_dependence(v in small_set(), extra in -300i64..300) {
        let e = IntegerSet::from_i64("p", v.clone());
        if !is_s_independent(&e, 2).unwrap().independent {
            let mut w = v;
            w.push(extra);
            w.sort_unstable();
            w.dedup();
            prop_assert!(!is_s_independent(&IntegerSet::from_i64("q", w), 2).unwrap().independent);
        }
    }

    #[test]
    fn moment_identity_characterizes_independence(v in nonnegative_set()) {
        let e = IntegerSet::from_i64("p", v);
        let n = e.len() as u128;
        let m = count_representations(&e, 2).unwrap().moment;
        prop_assert_eq!(m == 2 * n * n - n, is_s_independent(&e, 2).unwrap().independent);
    }

    #[test]
    fn selection_is_reproducible(seed in any::<u64>(), d in 0.0f64..=1.0) {
        let e = generate_range(1, 300);
        let s = DensitySchedule::uniform(&e, d).unwrap();
        let a = select(&e, &s, seed).unwrap();
        let b = select(&e, &s, seed).unwrap();
        prop_assert_eq!(&a, &b);
        let prefix = select(&e.prefix(100), &DensitySchedule::uniform(&e.prefix(100), d).unwrap(), seed).unwrap();
        prop_assert_eq!(&prefix.indices[..], &a.indices[..prefix.indices.len()]);
        prop_assert!(a.indices.iter().skip(prefix.indices.len()).all(|&i| i >= 100));
    }

    #[test]
    fn exact_and_float_selections_agree_on_dyadic_densities(seed in any::<u64>(), num in 0u64..=64) {
        let e = generate_range(1, 200);
        let f = select(&e, &DensitySchedule::uniform(&e, num as f64 / 64.0).unwrap(), seed).unwrap();
        let x = select(&e, &DensitySchedule::uniform(&e, Rational::ratio(num, 64)).unwrap(), seed).unwrap();
        prop_assert_eq!(f.indices, x.indices);
    }

    #[test]
    fn bourgain_schedules_are_nonincreasing(alpha in 0.0f64..=1.0, n in 2i64..200) {
        let e = generate_range(1, n);
        let (s, _) = bourgain_schedule::<Rational>(&e, &BourgainForm::PowerLaw { alpha }, 1).unwrap();
        prop_assert!(s.deltas().windows(2).all(|w| w[1] <= w[0]));
        let (p, _) = bourgain_schedule::<f64>(&e, &BourgainForm::PaceBased, 1).unwrap();
        prop_assert!(p.deltas().windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn summing_rows_telescope(raw in prop::collection::vec(1u64..1000, 1..40)) {
        let mut nums = raw;
        nums.sort_unstable_by(|a, b| b.cmp(a));
        let e = generate_range(1, nums.len() as i64);
        let deltas: Vec<Rational> = nums.iter().map(|&n| Rational::ratio(n, 1000)).collect();
        let s = DensitySchedule::from_deltas(&e, deltas.clone()).unwrap();
        let r = summing_matrix_check(&s, nums.len()).unwrap();
        prop_assert!(r.is_regular());
        for k in 1..=nums.len() {
            let sigma: Rational = deltas[..k].iter().fold(Rational::zero(), |a, d| a + d);
            let row: Vec<Rational> = deltas[..k].iter().map(|d| d / &sigma).collect();
            let tele = (0..k).fold(Rational::zero(), |acc, j| {
                let next = row.get(j + 1).cloned().unwrap_or_else(Rational::zero);
                acc + Rational::ratio(j as u64 + 1, 1) * (&row[j] - next)
            });
            prop_assert!(tele.is_one());
            prop_assert_eq!(&r.variation_sums[k - 1], &tele);
        }
    }

    #[test]
    fn weyl_means_are_bounded(v in small_set(), a in -50i64..50, q in 1u64..60, t in 0.0f64..1.0) {
        let e = IntegerSet::from_i64("p", v);
        prop_assume!(!e.is_empty());
        for p in [CirclePoint::rational(a, q).unwrap(), CirclePoint::from_turns(t)] {
            prop_assert!(weyl_mean(&e, e.len(), &p).unwrap().norm() <= 1.0 + 1e-12);
        }
        prop_assert_eq!(weyl_mean(&e, e.len(), &CirclePoint::one()).unwrap().re, 1.0);
    }

    #[test]
    fn grid_bound_covers_fine_grid(signs in prop::collection::vec(prop::option::of(any::<bool>()), 1..=257)) {
        let terms: Vec<(i64, f64)> = signs
            .iter()
            .enumerate()
            .filter_map(|(n, s)| s.map(|b| (n as i64, if b { 1.0 } else { -1.0 })))
            .collect();
        prop_assume!(!terms.is_empty());
        let poly = SparsePolynomial::from_real(terms.iter().map(|&(n, c)| (BigInt::from(n), c)));
        let g = sup_norm_via_grid(&poly, DEFAULT_GRID_CAP);
        prop_assert!(g.certified);
        let n = terms.iter().map(|t| t.0).max().unwrap_or(0).max(1) as u64;
        let fine = poly.moduli_on_grid(32 * n).into_iter().fold(0.0, f64::max);
        prop_assert!(fine <= g.bound + 1e-9);
        prop_assert_eq!(g.required_size, BigUint::from(4 * terms.iter().map(|t| t.0).max().unwrap_or(0) as u64));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn psi_vanishes_for_full_density(seed in any::<u64>()) {
        let e = generate_range(1, 200);
        let s = DensitySchedule::uniform(&e, 1.0).unwrap();
        let t = select(&e, &s, seed).unwrap();
        prop_assert_eq!(t.selected.len(), 200);
        let v = psi(&e, &t, &s, 200, DEFAULT_GRID_CAP).unwrap();
        prop_assert!(v.grid.sup < 1e-12);
    }
}

#[test]
fn block_counts_follow_budgets() {
    let e = generate_range(1, 1 << 12);
    let d = decompose(&e, &Partition::dyadic(12).unwrap());
    let ells: Vec<u64> = (0..=12u64).map(|k| k.min(d.blocks[k as usize].len() as u64)).collect();
    let s = blockwise_schedule::<f64>(&d, &ells).unwrap();
    let trials: Vec<_> = (0..1000u64).map(|t| select(&e, &s, t).unwrap()).collect();
    for st in block_count_stats(&trials) {
        let gap = (st.mean - st.ell as f64).abs();
        if st.standard_error == 0.0 {
            assert!(gap < 1e-12, "{st:?}");
        } else {
            assert!(gap <= 3.0 * st.standard_error, "{st:?}");
        }
    }
}

#[test]
fn exact_unit_densities_select_everything() {
    let e = IntegerSet::from_i64("b", [1, 5, 9]);
    let s = DensitySchedule::from_deltas(&e, vec![Rational::one(); 3]).unwrap();
    assert_eq!(select(&e, &s, 1).unwrap().selected.elements(), big(&[1, 5, 9]).as_slice());
}
