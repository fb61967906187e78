//! Regularity of the summing matrix `a_{k,j} = δ_{n_j} / σ_k` (`j ≤ k`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::random_selection::DensitySchedule;
use crate::scalar::Scalar;

/// Row sums `Σ_j a_{k,j}` and variation sums `Σ_j j|a_{k,j} − a_{k,j+1}|`
/// for `k = 1..=k_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: std::fmt::Display", deserialize = "T: std::str::FromStr"))]
pub struct SummingMatrixReport<T> {
    pub k_max: usize,
    pub exact: bool,
    pub nonnegative: bool,
    pub nonincreasing: bool,
    /// First `j` with `δ_{n_{j+1}} > δ_{n_j}`.
    pub first_increase: Option<usize>,
    #[serde(with = "display_vec")]
    pub row_sums: Vec<T>,
    #[serde(with = "display_vec")]
    pub variation_sums: Vec<T>,
    /// Largest `|row sum − 1|`, as `f64`.
    pub max_row_error: f64,
    /// Largest `|variation sum − 1|`, as `f64`.
    pub max_variation_error: f64,
}

impl<T> SummingMatrixReport<T> {
    /// Tolerance used by [`rows_sum_to_one`](Self::rows_sum_to_one) in floating
    /// point; exact scalars compare with zero tolerance.
    pub const FLOAT_TOLERANCE: f64 = 1e-9;

    fn tolerance(&self) -> f64 {
        if self.exact {
            0.0
        } else {
            Self::FLOAT_TOLERANCE
        }
    }

    pub fn rows_sum_to_one(&self) -> bool {
        self.max_row_error <= self.tolerance()
    }

    pub fn variations_equal_one(&self) -> bool {
        self.max_variation_error <= self.tolerance()
    }

    /// Nonnegative, nonincreasing, and both sums equal to one on every row.
    pub fn is_regular(&self) -> bool {
        self.nonnegative && self.nonincreasing && self.rows_sum_to_one() && self.variations_equal_one()
    }
}

mod display_vec {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};
    use std::fmt::Display;
    use std::str::FromStr;

    pub fn serialize<T: Display, S: Serializer>(v: &[T], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(ToString::to_string))
    }

    pub fn deserialize<'de, T: FromStr, D: Deserializer<'de>>(d: D) -> Result<Vec<T>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| s.parse().map_err(|_| D::Error::custom(format!("bad scalar {s:?}"))))
            .collect()
    }
}

/// Builds rows `1..=k_max` and sums them directly. An increasing schedule is
/// reported (not rejected): its variation sums exceed one.
pub fn summing_matrix_check<T: Scalar>(schedule: &DensitySchedule<T>, k_max: usize) -> Result<SummingMatrixReport<T>> {
    if k_max > schedule.len() {
        return Err(Error::InvalidArgument(format!(
            "k_max = {k_max} exceeds schedule length {}",
            schedule.len()
        )));
    }
    let deltas = &schedule.deltas()[..k_max];
    let first_increase = deltas.windows(2).position(|w| w[1] > w[0]).map(|i| i + 1);
    let nonnegative = deltas.iter().all(|d| !d.is_negative());
    let mut row_sums = Vec::with_capacity(k_max);
    let mut variation_sums = Vec::with_capacity(k_max);
    let mut max_row_error = 0.0f64;
    let mut max_variation_error = 0.0f64;
    for k in 1..=k_max {
        let sigma = schedule.sigma_at(k);
        if !sigma.is_positive() {
            return Err(Error::InvalidArgument(format!("σ_{k} = 0")));
        }
        let row: Vec<T> = deltas[..k].iter().map(|d| d.clone() / sigma.clone()).collect();
        let sum = row.iter().fold(T::zero(), |acc, a| acc + a.clone());
        let variation = row.iter().enumerate().fold(T::zero(), |acc, (j, a)| {
            let next = row.get(j + 1).cloned().unwrap_or_else(T::zero);
            acc + T::from_usize(j + 1).unwrap_or_else(T::zero) * (a.clone() - next).abs()
        });
        max_row_error = max_row_error.max((sum.clone() - T::one()).abs().to_f64_lossy());
        max_variation_error = max_variation_error.max((variation.clone() - T::one()).abs().to_f64_lossy());
        row_sums.push(sum);
        variation_sums.push(variation);
    }
    Ok(SummingMatrixReport {
        k_max,
        exact: T::EXACT,
        nonnegative,
        nonincreasing: first_increase.is_none(),
        first_increase,
        row_sums,
        variation_sums,
        max_row_error,
        max_variation_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integer_sets::generate_range;
    use crate::Rational;
    use num_traits::One;

    #[test]
    fn constant_schedule_is_cesaro() {
        let e = generate_range(1, 30);
        let s = DensitySchedule::uniform(&e, Rational::ratio(1, 3)).unwrap();
        let r = summing_matrix_check(&s, 30).unwrap();
        assert!(r.is_regular());
        assert!(r.row_sums.iter().all(Rational::is_one));
    }

    #[test]
    fn harmonic_schedule_is_exact() {
        let e = generate_range(1, 60);
        let s = DensitySchedule::from_deltas(&e, (1..=60).map(|j| Rational::ratio(1, j)).collect()).unwrap();
        let r = summing_matrix_check(&s, 60).unwrap();
        assert!(r.is_regular());
        assert_eq!(r.max_row_error, 0.0);
        assert_eq!(r.max_variation_error, 0.0);
    }

    #[test]
    fn increasing_schedule_is_flagged() {
        let e = generate_range(1, 3);
        let deltas = vec![Rational::ratio(1, 4), Rational::ratio(1, 2), Rational::ratio(1, 2)];
        let s = DensitySchedule::from_deltas(&e, deltas).unwrap();
        let r = summing_matrix_check(&s, 3).unwrap();
        assert!(!r.is_regular());
        assert_eq!(r.first_increase, Some(1));
        assert!(r.rows_sum_to_one() && !r.variations_equal_one());
    }

    #[test]
    fn float_schedule_within_tolerance() {
        let e = generate_range(1, 100);
        let s = DensitySchedule::from_deltas(&e, (1..=100).map(|j| 1.0 / j as f64).collect()).unwrap();
        assert!(summing_matrix_check(&s, 100).unwrap().is_regular());
    }

    #[test]
    fn report_serializes_scalars_as_strings() {
        let e = generate_range(1, 2);
        let s = DensitySchedule::uniform(&e, Rational::ratio(1, 2)).unwrap();
        let r = summing_matrix_check(&s, 2).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["row_sums"][1], "1");
        let back: SummingMatrixReport<Rational> = serde_json::from_value(json).unwrap();
        assert_eq!(back, r);
    }
}
