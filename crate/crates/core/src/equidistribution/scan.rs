//! Decay of `max |f_k(t)|` over a grid of sample points, away from small
//! rational obstructions.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::circle::CirclePoint;
use super::grid::SparsePolynomial;
use super::weyl::{weyl_series, Exclusion};
use crate::error::{Error, Result};
use crate::integer_sets::{generate_sumset, IntegerSet};

/// Every reduced `a/q` with `q ≤ max_q`, plus fractional parts of `√m` for
/// the listed non-squares.
pub fn sample_points(max_q: u64, sqrt_of: &[u64]) -> Vec<CirclePoint> {
    let mut out = Vec::new();
    for q in 1..=max_q {
        for a in 0..q {
            if num_integer::gcd(a, q) == 1 {
                out.push(CirclePoint::Rational { a, q });
            }
        }
    }
    out.extend(sqrt_of.iter().map(|&m| CirclePoint::sqrt_fraction(m)));
    out
}

pub const DEFAULT_SCAN_DENOMINATOR: u64 = 40;
pub const DEFAULT_SCAN_SQRTS: [u64; 8] = [2, 3, 5, 6, 7, 10, 11, 13];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub k: usize,
    pub radius: f64,
    pub excluded_points: usize,
    pub max_modulus_off_exclusion: Option<f64>,
    pub argmax: Option<CirclePoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanTrend {
    pub first: Option<f64>,
    pub last: Option<f64>,
    /// Fraction of consecutive rows where the maximum did not increase.
    pub nonincreasing_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub label: String,
    pub exclusion: Exclusion,
    pub points: usize,
    pub rows: Vec<ScanRow>,
    pub trend: ScanTrend,
}

impl ScanReport {
    /// `k,max_modulus` rows; empty value when every point was excluded.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,max_modulus_off_exclusion\n");
        for r in &self.rows {
            let v = r.max_modulus_off_exclusion.map(|v| v.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{v}\n", r.k));
        }
        out
    }
}

/// `max |f_k(t)|` over `points` outside the exclusion set, for each `k` in
/// `ks` (strictly increasing).
pub fn equidistribution_scan(
    set: &IntegerSet,
    ks: &[usize],
    points: &[CirclePoint],
    exclusion: Exclusion,
) -> Result<ScanReport> {
    let series: Vec<Vec<Complex64>> = points
        .par_iter()
        .map(|p| weyl_series(set, ks, p))
        .collect::<Result<_>>()?;
    let rows: Vec<ScanRow> = ks
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let mut excluded_points = 0;
            let mut best: Option<(f64, CirclePoint)> = None;
            for (p, s) in points.iter().zip(&series) {
                if exclusion.excludes(p, k) {
                    excluded_points += 1;
                    continue;
                }
                let m = s[i].norm().min(1.0);
                if best.is_none_or(|(b, _)| m > b) {
                    best = Some((m, *p));
                }
            }
            ScanRow {
                k,
                radius: exclusion.radius(k),
                excluded_points,
                max_modulus_off_exclusion: best.map(|b| b.0),
                argmax: best.map(|b| b.1),
            }
        })
        .collect();
    let maxima: Vec<f64> = rows.iter().filter_map(|r| r.max_modulus_off_exclusion).collect();
    let steps = maxima.len().saturating_sub(1);
    let trend = ScanTrend {
        first: maxima.first().copied(),
        last: maxima.last().copied(),
        nonincreasing_fraction: if steps == 0 {
            1.0
        } else {
            maxima.windows(2).filter(|w| w[1] <= w[0]).count() as f64 / steps as f64
        },
    };
    Ok(ScanReport {
        label: set.label().to_string(),
        exclusion,
        points: points.len(),
        rows,
        trend,
    })
}

/// Roughly geometric checkpoints `1 ≤ k ≤ k_max`, always ending at `k_max`.
pub fn log_spaced(k_max: usize, per_decade: usize) -> Vec<usize> {
    if k_max == 0 {
        return Vec::new();
    }
    let step = 10f64.powf(1.0 / per_decade.max(1) as f64);
    let mut out = vec![1usize];
    let mut x = 1.0f64;
    while *out.last().unwrap_or(&k_max) < k_max {
        x *= step;
        let k = (x.round() as usize).min(k_max);
        if k > *out.last().unwrap_or(&0) {
            out.push(k);
        }
    }
    out
}

/// `sup |f_k^j − f^{(j)}_{C(k,j)}|` over `points`, where `f_k` are the means
/// of `base` and `f^{(j)}` the means of the sums of `j` distinct elements of
/// the first `k` elements of `base`.
///
/// The two sides agree with the means of the full sumset whenever every sum
/// of `j` distinct elements among the first `k` precedes all other sums, as
/// for geometric bases.
pub fn power_mean_gap(base: &IntegerSet, k: usize, j: usize, points: &[CirclePoint]) -> Result<f64> {
    if j == 0 || k < j || k > base.len() {
        return Err(Error::InvalidArgument(format!(
            "need 1 ≤ j ≤ k ≤ |E|, got j = {j}, k = {k}"
        )));
    }
    let prefix = base.prefix(k);
    let sums = generate_sumset(&prefix, j)?;
    let inv = 1.0 / sums.len() as f64;
    let mean = SparsePolynomial::from_real(prefix.elements().iter().map(|n| (n.clone(), 1.0 / k as f64)));
    let distinct = SparsePolynomial::from_real(sums.elements().iter().map(|n| (n.clone(), inv)));
    let gaps: Vec<f64> = points
        .par_iter()
        .map(|p| (mean.evaluate(p).powu(j as u32) - distinct.evaluate(p)).norm())
        .collect();
    Ok(gaps.into_iter().fold(0.0, f64::max))
}

/// `2(1 − k!/(k^j (k−j)!))`.
pub fn power_mean_gap_bound(k: usize, j: usize) -> f64 {
    let falling: f64 = (0..j).map(|i| (k - i) as f64 / k as f64).product();
    2.0 * (1.0 - falling)
}
