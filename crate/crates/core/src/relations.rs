//! Arithmetic relations `Ζ_s^m`, s-independence and representation counts.
//!
//! A relation of length `m` is a tuple of nonzero integers `ζ` with `Σζ_i = 0`
//! and `Σ|ζ_i| ≤ 2s`. A set is s-independent when no relation with
//! `3 ≤ m ≤ 2s` vanishes on distinct elements. Length-two relations are
//! multiples of `(1, -1)` and never vanish on distinct elements, so they are
//! left out.

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;
use std::ops::{Add, ControlFlow, Mul, Neg};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integer_sets::IntegerSet;

/// Largest `s` accepted by [`enumerate_relations`].
pub const DEFAULT_S_MAX: u32 = 4;

/// Below this many elements the independence search enumerates tuples
/// directly instead of hashing partial sums.
pub const FULL_ENUMERATION_THRESHOLD: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Relation {
    coefficients: Vec<i64>,
}

impl Relation {
    pub fn new(coefficients: Vec<i64>) -> Result<Self> {
        if coefficients.contains(&0) || coefficients.iter().sum::<i64>() != 0 {
            return Err(Error::InvalidArgument(format!(
                "{coefficients:?} is not a relation (nonzero entries summing to 0)"
            )));
        }
        Ok(Self { coefficients })
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coefficients
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `Σ|ζ_i|`.
    pub fn weight(&self) -> i64 {
        self.coefficients.iter().map(|c| c.abs()).sum()
    }

    /// `Σ ζ_i q_i` in exact arithmetic.
    pub fn evaluate(&self, elements: &[BigInt]) -> BigInt {
        self.coefficients
            .iter()
            .zip(elements)
            .map(|(&c, q)| BigInt::from(c) * q)
            .sum()
    }

    /// Sorted coefficients, choosing between `ζ` and `-ζ` the lexicographically
    /// smaller one. Two relations share a class iff they vanish on the same
    /// sets of distinct elements.
    pub fn class_representative(&self) -> Relation {
        let mut pos = self.coefficients.clone();
        pos.sort_unstable();
        let mut neg: Vec<i64> = self.coefficients.iter().map(|c| -c).collect();
        neg.sort_unstable();
        Relation {
            coefficients: pos.min(neg),
        }
    }
}

/// All relations of `Ζ_s^m` for `3 ≤ m ≤ 2s`, as ordered tuples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationSet {
    s: u32,
    by_length: BTreeMap<usize, Vec<Relation>>,
}

impl RelationSet {
    pub fn s(&self) -> u32 {
        self.s
    }

    /// `C(s)`: the number of ordered relations.
    pub fn count(&self) -> usize {
        self.by_length.values().map(Vec::len).sum()
    }

    pub fn of_length(&self, m: usize) -> &[Relation] {
        self.by_length.get(&m).map_or(&[], Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Relation> {
        self.by_length.values().flatten()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    /// Canonical sorted list, one relation per line.
    pub fn canonical_lines(&self) -> Vec<String> {
        let mut all: Vec<&Relation> = self.iter().collect();
        all.sort();
        all.iter()
            .map(|r| {
                r.coefficients
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect()
    }

    /// One representative per permutation/negation class, ordered by length
    /// then lexicographically.
    pub fn classes(&self) -> Vec<Relation> {
        let mut reps: Vec<Relation> = self.iter().map(Relation::class_representative).collect();
        reps.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        reps.dedup();
        reps
    }

    /// Distinct relations up to coordinate permutation (not negation).
    pub fn up_to_permutation(&self) -> Vec<Relation> {
        let mut reps: Vec<Relation> = self
            .iter()
            .map(|r| {
                let mut c = r.coefficients.clone();
                c.sort_unstable();
                Relation { coefficients: c }
            })
            .collect();
        reps.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        reps.dedup();
        reps
    }
}

/// Upper bound on `C(s)`: at most `4s` choices for each of `m - 1` free entries.
fn relation_count_bound(s: u32) -> u128 {
    (3..=2 * u128::from(s))
        .map(|m| (4 * u128::from(s)).saturating_pow(m as u32 - 1))
        .fold(0u128, u128::saturating_add)
}

pub fn enumerate_relations(s: u32) -> Result<RelationSet> {
    enumerate_relations_with_limit(s, DEFAULT_S_MAX)
}

pub fn enumerate_relations_with_limit(s: u32, s_max: u32) -> Result<RelationSet> {
    if s == 0 {
        return Err(Error::InvalidArgument("s must be at least 1".into()));
    }
    if s > s_max {
        return Err(Error::RelationExplosion {
            s,
            s_max,
            bound: relation_count_bound(s),
        });
    }
    let budget = 2 * i64::from(s);
    let mut by_length = BTreeMap::new();
    for m in 3..=2 * s as usize {
        let mut found = Vec::new();
        let mut prefix = Vec::with_capacity(m);
        extend_relations(m, budget, 0, &mut prefix, &mut found);
        by_length.insert(m, found);
    }
    Ok(RelationSet { s, by_length })
}

fn extend_relations(m: usize, budget: i64, sum: i64, prefix: &mut Vec<i64>, out: &mut Vec<Relation>) {
    let used: i64 = prefix.iter().map(|c| c.abs()).sum();
    let left = budget - used;
    if prefix.len() == m - 1 {
        let last = -sum;
        if last != 0 && last.abs() <= left {
            let mut c = prefix.clone();
            c.push(last);
            out.push(Relation { coefficients: c });
        }
        return;
    }
    // every remaining slot needs |ζ_i| ≥ 1
    let room = left - (m - prefix.len() - 1) as i64;
    for c in (-room..=room).filter(|&c| c != 0) {
        prefix.push(c);
        extend_relations(m, budget, sum + c, prefix, out);
        prefix.pop();
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub relation: Relation,
    #[serde(with = "crate::serde_decimal::vec")]
    pub elements: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependenceReport {
    pub s: u32,
    pub independent: bool,
    pub witness: Option<Witness>,
}

impl IndependenceReport {
    fn independent(s: u32) -> Self {
        Self {
            s,
            independent: true,
            witness: None,
        }
    }
}

/// Decides s-independence of `set`.
///
/// Relations are searched class by class (see [`RelationSet::classes`]); the
/// returned witness is the first one found in that fixed order, so the output
/// does not depend on hashing or thread scheduling.
pub fn is_s_independent(set: &IntegerSet, s: u32) -> Result<IndependenceReport> {
    if s <= 1 || set.len() < 3 {
        return Ok(IndependenceReport::independent(s));
    }
    let classes = enumerate_relations(s)?.classes();
    let elems = set.elements();
    let fits_i128 = set
        .max_abs()
        .is_some_and(|m| m.bits() <= 100);
    let found = if fits_i128 {
        let values: Vec<i128> = elems.iter().map(|n| n.to_i128().expect("fits")).collect();
        search_classes(&classes, &values)
    } else {
        search_classes(&classes, elems)
    };
    Ok(match found {
        None => IndependenceReport::independent(s),
        Some((relation, indices)) => {
            let elements: Vec<BigInt> = indices.iter().map(|&i| elems[i as usize].clone()).collect();
            assert!(
                relation.evaluate(&elements).is_zero(),
                "independence search produced an invalid witness"
            );
            IndependenceReport {
                s,
                independent: false,
                witness: Some(Witness { relation, elements }),
            }
        }
    })
}

trait Exact: Clone + Eq + Hash + Zero + From<i64> + Add<Output = Self> + Mul<Output = Self> + Neg<Output = Self> {}
impl<T> Exact for T where T: Clone + Eq + Hash + Zero + From<i64> + Add<Output = T> + Mul<Output = T> + Neg<Output = T> {}

fn search_classes<K: Exact>(classes: &[Relation], values: &[K]) -> Option<(Relation, Vec<u32>)> {
    classes.iter().find_map(|rel| {
        if rel.len() > values.len() {
            return None;
        }
        let hit = if values.len() <= FULL_ENUMERATION_THRESHOLD {
            search_direct(rel.coefficients(), values)
        } else {
            search_meet_in_middle(rel.coefficients(), values)
        };
        hit.map(|idx| (rel.clone(), idx))
    })
}

/// Calls `visit` on every tuple of distinct indices for `coeffs`, with indices
/// increasing across runs of equal coefficients.
fn for_each_tuple<K: Exact>(
    coeffs: &[i64],
    values: &[K],
    visit: &mut dyn FnMut(&[u32], &K) -> ControlFlow<()>,
) -> ControlFlow<()> {
    fn rec<K: Exact>(
        coeffs: &[i64],
        values: &[K],
        tuple: &mut Vec<u32>,
        sum: K,
        visit: &mut dyn FnMut(&[u32], &K) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let pos = tuple.len();
        if pos == coeffs.len() {
            return visit(tuple, &sum);
        }
        let start = if pos > 0 && coeffs[pos] == coeffs[pos - 1] {
            tuple[pos - 1] + 1
        } else {
            0
        };
        let c = K::from(coeffs[pos]);
        for i in start..values.len() as u32 {
            if tuple.contains(&i) {
                continue;
            }
            tuple.push(i);
            let next = sum.clone() + c.clone() * values[i as usize].clone();
            let flow = rec(coeffs, values, tuple, next, visit);
            tuple.pop();
            flow?;
        }
        ControlFlow::Continue(())
    }
    rec(coeffs, values, &mut Vec::with_capacity(coeffs.len()), K::zero(), visit)
}

fn search_direct<K: Exact>(coeffs: &[i64], values: &[K]) -> Option<Vec<u32>> {
    let mut hit = None;
    let _ = for_each_tuple(coeffs, values, &mut |t, sum| {
        if sum.is_zero() {
            hit = Some(t.to_vec());
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    hit
}

fn disjoint(a: &[u32], b: &[u32]) -> bool {
    a.iter().all(|x| !b.contains(x))
}

fn search_meet_in_middle<K: Exact>(coeffs: &[i64], values: &[K]) -> Option<Vec<u32>> {
    let half = coeffs.len() / 2;
    let (left, right) = coeffs.split_at(half);
    let mirrored = {
        let mut neg: Vec<i64> = left.iter().map(|c| -c).collect();
        neg.sort_unstable();
        neg == right
    };
    let mut buckets: HashMap<K, Vec<Vec<u32>>> = HashMap::new();
    let mut hit = None;

    if mirrored {
        // Σ left·q = Σ left·q' over two disjoint tuples; probe while building.
        let _ = for_each_tuple(left, values, &mut |t, sum| {
            let bucket = buckets.entry(sum.clone()).or_default();
            if let Some(prev) = bucket.iter().find(|p| disjoint(p, t)) {
                // right = sorted(-left) = reverse of -left
                let mut w = prev.clone();
                w.extend(t.iter().rev());
                hit = Some(w);
                return ControlFlow::Break(());
            }
            bucket.push(t.to_vec());
            ControlFlow::Continue(())
        });
        return hit;
    }

    let _ = for_each_tuple(left, values, &mut |t, sum| {
        buckets.entry(sum.clone()).or_default().push(t.to_vec());
        ControlFlow::Continue(())
    });
    let _ = for_each_tuple(right, values, &mut |t, sum| {
        if let Some(bucket) = buckets.get(&-sum.clone()) {
            if let Some(l) = bucket.iter().find(|l| disjoint(l, t)) {
                let mut w = l.clone();
                w.extend_from_slice(t);
                hit = Some(w);
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    });
    hit
}

/// `r_s(n)`, the number of ordered `s`-tuples of `E` summing to `n`, and the
/// moment `M = Σ_n r_s(n)^2`, which equals `‖Σ_{n∈E} e_n‖_{2s}^{2s}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepresentationCounts {
    pub s: u32,
    pub counts: BTreeMap<u128, u128>,
    pub moment: u128,
}

pub fn count_representations(set: &IntegerSet, s: u32) -> Result<RepresentationCounts> {
    if s == 0 {
        return Err(Error::InvalidArgument("s must be at least 1".into()));
    }
    let values: Vec<u128> = set
        .elements()
        .iter()
        .map(|n| n.to_u64().map(u128::from))
        .collect::<Option<_>>()
        .ok_or_else(|| {
            Error::InvalidArgument("representation counts need elements in [0, 2^64)".into())
        })?;
    let mut counts: BTreeMap<u128, u128> = values.iter().map(|&v| (v, 1)).collect();
    for _ in 1..s {
        let mut next = BTreeMap::new();
        for (&sum, &c) in &counts {
            for &v in &values {
                *next.entry(sum + v).or_insert(0u128) += c;
            }
        }
        counts = next;
    }
    let moment = counts
        .values()
        .try_fold(0u128, |acc, &r| r.checked_mul(r).and_then(|sq| acc.checked_add(sq)))
        .ok_or_else(|| Error::InvalidArgument("moment overflows u128".into()))?;
    Ok(RepresentationCounts { s, counts, moment })
}

/// `C(s) ℓ^{2s} / |E|`: the bound on the probability that a uniform selection
/// of expected size `ℓ` from `E` is s-dependent. May exceed one.
pub fn dependence_probability_bound(s: u32, ell: u64, set_size: u64) -> Result<f64> {
    if s < 2 {
        return Err(Error::InvalidArgument("the dependence bound needs s >= 2".into()));
    }
    if ell > set_size {
        return Err(Error::BudgetExceedsSet { ell, size: set_size });
    }
    if ell == 0 {
        return Ok(0.0);
    }
    let c = enumerate_relations(s)?.count() as f64;
    Ok(c * (ell as f64).powi(2 * s as i32) / set_size as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(values: &[i64]) -> IntegerSet {
        IntegerSet::from_i64("t", values.iter().copied())
    }

    #[test]
    fn relation_counts_for_small_s() {
        assert_eq!(enumerate_relations(1).unwrap().count(), 0);
        let r2 = enumerate_relations(2).unwrap();
        assert_eq!(r2.count(), 12);
        assert_eq!(r2.of_length(3).len(), 6);
        assert_eq!(r2.of_length(4).len(), 6);
        assert!(r2.of_length(5).is_empty());
        assert!(r2.of_length(2).is_empty());
        let mut m3: Vec<Vec<i64>> = r2.of_length(3).iter().map(|r| r.coefficients().to_vec()).collect();
        m3.sort();
        assert_eq!(
            m3,
            vec![
                vec![-2, 1, 1],
                vec![-1, -1, 2],
                vec![-1, 2, -1],
                vec![1, -2, 1],
                vec![1, 1, -2],
                vec![2, -1, -1]
            ]
        );
    }

    #[test]
    fn relation_explosion_is_reported() {
        match enumerate_relations(5) {
            Err(Error::RelationExplosion { s: 5, bound, .. }) => assert!(bound > 0),
            other => panic!("{other:?}"),
        }
        assert!(enumerate_relations_with_limit(5, 5).is_ok());
    }

    #[test]
    fn relations_are_closed_under_permutation_and_negation() {
        for s in 2..=3 {
            let set = enumerate_relations(s).unwrap();
            let all: std::collections::HashSet<_> = set.iter().cloned().collect();
            for r in set.iter() {
                assert_eq!(r.coefficients().iter().sum::<i64>(), 0);
                assert!(r.weight() <= 2 * i64::from(s));
                let neg = Relation::new(r.coefficients().iter().map(|c| -c).collect()).unwrap();
                assert!(all.contains(&neg));
                let mut rotated = r.coefficients().to_vec();
                rotated.rotate_left(1);
                assert!(all.contains(&Relation::new(rotated).unwrap()));
            }
        }
    }

    #[test]
    fn classes_of_s2() {
        let classes = enumerate_relations(2).unwrap().classes();
        let c: Vec<&[i64]> = classes.iter().map(Relation::coefficients).collect();
        assert_eq!(c, vec![&[-2, 1, 1][..], &[-1, -1, 1, 1][..]]);
        assert_eq!(enumerate_relations(2).unwrap().up_to_permutation().len(), 3);
    }

    #[test]
    fn independence_examples() {
        let r = is_s_independent(&set(&[1, 2, 3]), 2).unwrap();
        assert!(!r.independent);
        let w = r.witness.unwrap();
        assert!(w.relation.evaluate(&w.elements).is_zero());
        let mut e: Vec<i64> = w.elements.iter().map(|x| x.to_i64().unwrap()).collect();
        e.sort();
        assert_eq!(e, vec![1, 2, 3]);

        assert!(is_s_independent(&set(&[1, 3, 9, 27]), 2).unwrap().independent);
        assert!(is_s_independent(&set(&[1, 2]), 3).unwrap().independent);
        assert!(is_s_independent(&set(&[1, 2, 3]), 1).unwrap().independent);
    }

    #[test]
    fn meet_in_the_middle_finds_both_relation_shapes() {
        // Large 3-AP-free set of powers of two plus a crafted Sidon violation.
        let mut v: Vec<i64> = (0..40).map(|i| 1i64 << i).collect();
        assert!(is_s_independent(&set(&v), 2).unwrap().independent);
        v.push((1 << 5) + (1 << 7) - (1 << 2)); // 32 + 128 = 4 + 156
        let r = is_s_independent(&set(&v), 2).unwrap();
        let w = r.witness.expect("dependent");
        assert!(w.relation.evaluate(&w.elements).is_zero());
        assert_eq!(w.elements.len(), 4);

        let mut ap: Vec<i64> = (0..30).map(|i| 1i64 << (2 * i)).collect();
        ap.push(((1 << 10) + (1 << 20)) / 2);
        let r = is_s_independent(&set(&ap), 2).unwrap();
        let w = r.witness.expect("3-AP");
        assert_eq!(w.relation.coefficients(), &[-2, 1, 1]);
        assert!(w.relation.evaluate(&w.elements).is_zero());
    }

    #[test]
    fn bignum_elements_use_exact_path() {
        let big = BigInt::from(3).pow(90);
        let vals = vec![big.clone(), big.clone() * 2, big.clone() * 3];
        let r = is_s_independent(&IntegerSet::new("b", vals), 2).unwrap();
        assert!(!r.independent);
        let geo = crate::integer_sets::generate_geometric(3, 90).unwrap();
        assert!(is_s_independent(&geo, 2).unwrap().independent);
    }

    #[test]
    fn representation_moments() {
        let r = count_representations(&set(&[0, 1, 3]), 2).unwrap();
        assert_eq!(r.moment, 15);
        assert_eq!(r.counts.get(&4), Some(&2));
        assert_eq!(count_representations(&set(&[7]), 3).unwrap().moment, 1);
        assert!(count_representations(&set(&[-1, 2]), 2).is_err());
    }

    #[test]
    fn dependence_bound_examples() {
        assert_eq!(dependence_probability_bound(2, 2, 4096).unwrap(), 0.046875);
        assert_eq!(dependence_probability_bound(2, 0, 4096).unwrap(), 0.0);
        assert_eq!(dependence_probability_bound(2, 4, 4096).unwrap(), 0.75);
        assert!(matches!(
            dependence_probability_bound(2, 5, 4),
            Err(Error::BudgetExceedsSet { .. })
        ));
    }
}
