//! Scalar abstraction for densities and summing-matrix weights.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive};

/// Field-like scalar used for densities `δ_n`, partial sums `σ_k` and summing
/// matrix entries.
///
/// Implemented for `f32`, `f64` and [`BigRational`]. `EXACT` scalars make
/// identities such as "row sums equal one" hold bit-for-bit.
pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync
{
    const EXACT: bool;

    /// `num / den`. Panics if `den == 0`.
    fn ratio(num: u64, den: u64) -> Self;

    /// `k^{-alpha}` for `k >= 1`; exact when `alpha` is `0` or `1`.
    fn inverse_power(k: u64, alpha: f64) -> Self {
        if alpha == 0.0 {
            Self::one()
        } else if alpha == 1.0 {
            Self::ratio(1, k)
        } else {
            Self::from_f64((k as f64).powf(-alpha)).unwrap_or_else(Self::zero)
        }
    }

    /// Bernoulli draw: true iff `word / 2^64 < self`.
    fn accepts(&self, word: u64) -> bool;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

fn unit_interval(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn ratio(num: u64, den: u64) -> Self {
        assert!(den != 0, "zero denominator");
        num as f64 / den as f64
    }

    fn accepts(&self, word: u64) -> bool {
        unit_interval(word) < *self
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn ratio(num: u64, den: u64) -> Self {
        assert!(den != 0, "zero denominator");
        (num as f64 / den as f64) as f32
    }

    fn accepts(&self, word: u64) -> bool {
        unit_interval(word) < f64::from(*self)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn ratio(num: u64, den: u64) -> Self {
        assert!(den != 0, "zero denominator");
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn accepts(&self, word: u64) -> bool {
        if !self.is_positive() {
            return false;
        }
        if *self >= BigRational::one() {
            return true;
        }
        // word / 2^64 < p / q  <=>  word * q < p * 2^64
        let lhs = BigInt::from(word) * self.denom();
        let rhs = self.numer() << 64u32;
        lhs < rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn inverse_power_is_exact_for_unit_exponent() {
        assert_eq!(BigRational::inverse_power(7, 1.0), BigRational::ratio(1, 7));
        assert_eq!(f64::inverse_power(4, 0.0), 1.0);
        assert!((f64::inverse_power(4, 0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn exact_and_float_bernoulli_agree_on_dyadic_densities() {
        let half_exact = BigRational::ratio(1, 2);
        for word in [0u64, 1 << 62, (1 << 63) - 1, 1 << 63, u64::MAX] {
            assert_eq!(half_exact.accepts(word), 0.5f64.accepts(word), "word {word}");
        }
        assert!(!BigRational::zero().accepts(0));
        assert!(BigRational::one().accepts(u64::MAX));
        assert!(1.0f64.accepts(u64::MAX));
        assert!(!0.0f32.accepts(0));
    }
}
