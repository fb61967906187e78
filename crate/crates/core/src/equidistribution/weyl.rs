//! Successive means `f_k(t) = (1/k) Σ_{j≤k} e_{n_j}(t)`.

use num_bigint::BigInt;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::circle::{residue, root_table, CirclePoint};
use crate::error::{Error, Result};
use crate::integer_sets::IntegerSet;

/// Points within `radius_constant / k` of some `a/q` with `q ≤ max_denominator`
/// are excluded at index `k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exclusion {
    pub max_denominator: u64,
    pub radius_constant: f64,
}

pub const DEFAULT_EXCLUSION_DENOMINATOR: u64 = 16;
pub const DEFAULT_EXCLUSION_RADIUS: f64 = 0.01;

impl Default for Exclusion {
    fn default() -> Self {
        Self {
            max_denominator: DEFAULT_EXCLUSION_DENOMINATOR,
            radius_constant: DEFAULT_EXCLUSION_RADIUS,
        }
    }
}

impl Exclusion {
    pub fn radius(&self, k: usize) -> f64 {
        self.radius_constant / k.max(1) as f64
    }

    pub fn excludes(&self, point: &CirclePoint, k: usize) -> bool {
        let (d, _, _) = point.nearest_small_rational(self.max_denominator);
        d == 0.0 || d < self.radius(k)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeylValue {
    pub point: CirclePoint,
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
    pub excluded: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeylReport {
    pub k: usize,
    pub exclusion: Option<Exclusion>,
    pub values: Vec<WeylValue>,
    /// `max |f_k(t)|` over the points outside the exclusion set.
    pub max_modulus_off_exclusion: Option<f64>,
}

const MAX_HISTOGRAM: u64 = 1 << 22;

/// `f_k` at a rational point through the residue histogram of `n_j a mod q`.
fn rational_mean(elems: &[BigInt], a: u64, q: u64) -> Complex64 {
    let k = elems.len();
    if q == 1 {
        return Complex64::new(1.0, 0.0);
    }
    if q > MAX_HISTOGRAM {
        let p = CirclePoint::Rational { a, q };
        return elems.iter().map(|n| p.character(n)).sum::<Complex64>() / k as f64;
    }
    let mut counts = vec![0u64; q as usize];
    for n in elems {
        let r = (residue(n, q) as u128 * a as u128 % q as u128) as usize;
        counts[r] += 1;
    }
    let table = root_table(q);
    let sum = counts
        .iter()
        .zip(&table)
        .filter(|(c, _)| **c > 0)
        .fold(Complex64::new(0.0, 0.0), |acc, (c, z)| acc + z * *c as f64);
    sum / k as f64
}

/// `f_k(t)` at one point.
pub fn weyl_mean(set: &IntegerSet, k: usize, point: &CirclePoint) -> Result<Complex64> {
    if k == 0 || k > set.len() {
        return Err(Error::InvalidArgument(format!(
            "k = {k} outside 1..={}",
            set.len()
        )));
    }
    let elems = &set.elements()[..k];
    Ok(match *point {
        CirclePoint::Rational { a, q } => rational_mean(elems, a, q),
        CirclePoint::Turns { .. } => {
            elems.iter().map(|n| point.character(n)).sum::<Complex64>() / k as f64
        }
    })
}

pub fn weyl_means(set: &IntegerSet, k: usize, points: &[CirclePoint], exclusion: Option<Exclusion>) -> Result<WeylReport> {
    let values = points
        .par_iter()
        .map(|p| {
            let z = weyl_mean(set, k, p)?;
            Ok(WeylValue {
                point: *p,
                re: z.re,
                im: z.im,
                modulus: z.norm().min(1.0),
                excluded: exclusion.is_some_and(|e| e.excludes(p, k)),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_modulus_off_exclusion = values
        .iter()
        .filter(|v| !v.excluded)
        .map(|v| v.modulus)
        .max_by(f64::total_cmp);
    Ok(WeylReport {
        k,
        exclusion,
        values,
        max_modulus_off_exclusion,
    })
}

/// `f_k(t)` for every `k` in `ks` (sorted, each in `1..=|E|`) from one pass
/// over the elements.
pub fn weyl_series(set: &IntegerSet, ks: &[usize], point: &CirclePoint) -> Result<Vec<Complex64>> {
    if ks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("k values must be strictly increasing".into()));
    }
    let Some(&last) = ks.last() else {
        return Ok(Vec::new());
    };
    if ks[0] == 0 || last > set.len() {
        return Err(Error::InvalidArgument(format!(
            "k values must lie in 1..={}",
            set.len()
        )));
    }
    let table = match *point {
        CirclePoint::Rational { q, .. } if q <= MAX_HISTOGRAM => Some(root_table(q)),
        _ => None,
    };
    let mut out = Vec::with_capacity(ks.len());
    let mut sum = Complex64::new(0.0, 0.0);
    let mut next = ks.iter().peekable();
    for (j, n) in set.elements()[..last].iter().enumerate() {
        sum += match (&table, point) {
            (Some(t), CirclePoint::Rational { a, q }) => {
                t[(residue(n, *q) as u128 * *a as u128 % *q as u128) as usize]
            }
            _ => point.character(n),
        };
        if next.peek() == Some(&&(j + 1)) {
            next.next();
            out.push(sum / (j + 1) as f64);
        }
    }
    Ok(out)
}
