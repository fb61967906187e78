//! Brute-force reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;

/// Every coefficient vector of length `m` with nonzero entries, zero sum and
/// `Σ|ζ_i| ≤ 2s`, found by scanning the whole box `[-2s, 2s]^m`.
pub fn brute_relations(s: u32, m: usize) -> Vec<Vec<i64>> {
    let b = 2 * i64::from(s);
    let side = (2 * b + 1) as usize;
    let total = side.pow(m as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let mut v = Vec::with_capacity(m);
        for _ in 0..m {
            v.push((c % side) as i64 - b);
            c /= side;
        }
        if v.iter().all(|&x| x != 0) && v.iter().sum::<i64>() == 0 && v.iter().map(|x| x.abs()).sum::<i64>() <= b {
            out.push(v);
        }
    }
    out.sort();
    out
}

/// All relations of every length `3..=2s`.
pub fn brute_relation_table(s: u32) -> Vec<Vec<Vec<i64>>> {
    (3..=2 * s as usize).map(|m| brute_relations(s, m)).collect()
}

/// Tests every relation in `table` against every ordered tuple of distinct
/// elements of `elems`.
pub fn naive_dependent(elems: &[i64], table: &[Vec<Vec<i64>>]) -> bool {
    let n = elems.len();
    for rels in table {
        let Some(m) = rels.first().map(Vec::len) else { continue };
        if m > n {
            continue;
        }
        let mut idx = vec![0usize; m];
        if tuples(n, &mut idx, 0, &mut |t| {
            rels.iter()
                .any(|r| r.iter().zip(t).map(|(c, &i)| c * elems[i]).sum::<i64>() == 0)
        }) {
            return true;
        }
    }
    false
}

fn tuples(n: usize, idx: &mut Vec<usize>, pos: usize, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    if pos == idx.len() {
        return f(idx);
    }
    for i in 0..n {
        if idx[..pos].contains(&i) {
            continue;
        }
        idx[pos] = i;
        if tuples(n, idx, pos + 1, f) {
            return true;
        }
    }
    false
}

/// `Σ_n r(n)^2` with `r(n)` the number of ordered pairs summing to `n`.
pub fn pair_moment(elems: &[i64]) -> u64 {
    let mut r: BTreeMap<i64, u64> = BTreeMap::new();
    for a in elems {
        for b in elems {
            *r.entry(a + b).or_default() += 1;
        }
    }
    r.values().map(|c| c * c).sum()
}

/// `Σ c_n e^{2πi n t}` summed term by term.
pub fn direct_eval(terms: &[(i64, f64)], t: f64) -> Complex64 {
    terms
        .iter()
        .map(|&(n, c)| {
            // reduce n·t modulo 1 before scaling to keep the phase accurate
            let x = (n as f64 * t).rem_euclid(1.0);
            c * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * x)
        })
        .sum()
}

/// `max_r |f(r/m)|` by direct summation.
pub fn direct_grid_sup(terms: &[(i64, f64)], m: u64) -> f64 {
    (0..m)
        .map(|r| direct_eval(terms, r as f64 / m as f64).norm())
        .fold(0.0, f64::max)
}

pub fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// All subsets of `{1..=n}` with at most `max_size` elements, in
/// lexicographic order of their sorted element lists.
pub fn small_subsets(n: i64, max_size: usize) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    let mut cur = Vec::new();
    fn go(start: i64, n: i64, max: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        for x in start..=n {
            cur.push(x);
            out.push(cur.clone());
            if cur.len() < max {
                go(x + 1, n, max, cur, out);
            }
            cur.pop();
        }
    }
    go(1, n, max_size, &mut cur, &mut out);
    out
}
