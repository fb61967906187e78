//! Logarithms and conversions for arbitrary-precision integers.

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;

/// `log2 |n|` from bit length plus the leading 64 bits; `-inf` for zero.
pub fn log2_magnitude(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 64 {
        return n.to_u64().map_or(f64::NAN, |v| (v as f64).log2());
    }
    let shift = bits - 64;
    let top = (n >> shift).to_u64().unwrap_or(u64::MAX);
    (top as f64).log2() + shift as f64
}

pub fn ln_magnitude(n: &BigUint) -> f64 {
    log2_magnitude(n) * std::f64::consts::LN_2
}

pub fn ln_abs(n: &BigInt) -> f64 {
    ln_magnitude(n.magnitude())
}

/// `n mod 2^128` in two's complement.
pub fn low_u128(n: &BigInt) -> u128 {
    let digits = n.magnitude().to_u64_digits();
    let lo = digits.first().copied().unwrap_or(0) as u128;
    let hi = digits.get(1).copied().unwrap_or(0) as u128;
    let mag = lo | (hi << 64);
    if n.sign() == num_bigint::Sign::Minus {
        mag.wrapping_neg()
    } else {
        mag
    }
}

/// `n! `, saturating at `u64::MAX`.
pub fn factorial_saturating(n: u64) -> u64 {
    (1..=n).try_fold(1u64, |acc, i| acc.checked_mul(i)).unwrap_or(u64::MAX)
}
