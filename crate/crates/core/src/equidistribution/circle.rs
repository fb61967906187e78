//! Points of the circle group, as fractions of a full turn.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::low_u128;

/// `t = e^{2πiθ}` with `θ` either a reduced fraction `a/q` or a 128-bit
/// binary fraction of a turn.
///
/// Binary fractions make `n·θ mod 1` exact for any integer `n`: the phase is
/// `(n mod 2^128)·θ mod 2^128`, so bignum frequencies keep full accuracy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CirclePoint {
    Rational { a: u64, q: u64 },
    Turns {
        #[serde(with = "u128_decimal")]
        fraction: u128,
    },
}

mod u128_decimal {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u128, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u128, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

impl CirclePoint {
    /// `a/q` of a turn, reduced into `[0, 1)`.
    pub fn rational(a: i64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::ZeroDenominator);
        }
        let a = a.rem_euclid(q as i64) as u64;
        let g = a.gcd(&q);
        Ok(Self::Rational { a: a / g, q: q / g })
    }

    pub fn one() -> Self {
        Self::Rational { a: 0, q: 1 }
    }

    pub fn half_turn() -> Self {
        Self::Rational { a: 1, q: 2 }
    }

    /// Nearest 128-bit binary fraction to `turns mod 1`. Only 53 bits are
    /// meaningful.
    pub fn from_turns(turns: f64) -> Self {
        let frac = turns - turns.floor();
        let bits = (frac * (1u64 << 53) as f64) as u128;
        Self::Turns {
            fraction: bits << 75,
        }
    }

    /// Fractional part of `√m`, to 128 bits.
    pub fn sqrt_fraction(m: u64) -> Self {
        let scaled = (BigUint::from(m) << 256u32).sqrt();
        let low = low_u128(&BigInt::from(scaled));
        Self::Turns { fraction: low }
    }

    /// `θ` as an `f64` in `[0, 1)`.
    pub fn turns(&self) -> f64 {
        match *self {
            Self::Rational { a, q } => a as f64 / q as f64,
            Self::Turns { fraction } => (fraction >> 75) as f64 / (1u64 << 53) as f64,
        }
    }

    /// Phase of `e_n(t)` as a fraction of a turn.
    pub fn phase(&self, n: &BigInt) -> Phase {
        match *self {
            Self::Rational { a, q } => {
                let r = residue(n, q);
                Phase::Rational {
                    r: ((r as u128 * a as u128) % q as u128) as u64,
                    q,
                }
            }
            Self::Turns { fraction } => Phase::Binary(low_u128(n).wrapping_mul(fraction)),
        }
    }

    /// `e_n(t) = e^{2πi n θ}`.
    pub fn character(&self, n: &BigInt) -> Complex64 {
        self.phase(n).value()
    }

    /// Distance on `ℝ/ℤ` from `θ` to the nearest `a/q` with `q ≤ max_q`,
    /// together with that fraction. Rational points with small denominator
    /// are at distance zero.
    pub fn nearest_small_rational(&self, max_q: u64) -> (f64, u64, u64) {
        if let Self::Rational { a, q } = *self {
            if q <= max_q {
                return (0.0, a, q);
            }
        }
        let theta = self.turns();
        let mut best = (f64::INFINITY, 0, 1);
        for q in 1..=max_q.max(1) {
            let a = (theta * q as f64).round();
            let d = (theta - a / q as f64).abs();
            if d < best.0 {
                let a = (a as u64) % q;
                let g = a.gcd(&q);
                best = (d, a / g, q / g);
            }
        }
        best
    }
}

impl fmt::Display for CirclePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Rational { a, q } => write!(f, "{a}/{q}"),
            Self::Turns { .. } => write!(f, "{:.17}", self.turns()),
        }
    }
}

impl FromStr for CirclePoint {
    type Err = Error;

    /// `a/q`, `sqrt:m` (fractional part of `√m`) or a decimal number of turns.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidArgument(format!("cannot parse circle point {s:?}"));
        if let Some((a, q)) = s.split_once('/') {
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let q: u64 = q.trim().parse().map_err(|_| bad())?;
            return Self::rational(a, q);
        }
        if let Some(m) = s.strip_prefix("sqrt:") {
            return Ok(Self::sqrt_fraction(m.trim().parse().map_err(|_| bad())?));
        }
        let t: f64 = s.parse().map_err(|_| bad())?;
        if !t.is_finite() {
            return Err(bad());
        }
        Ok(Self::from_turns(t))
    }
}

/// `|n| mod q` with the sign applied, as a residue in `[0, q)`.
pub(crate) fn residue(n: &BigInt, q: u64) -> u64 {
    let r = (n.magnitude() % q).to_u64().unwrap_or(0);
    if n.sign() == num_bigint::Sign::Minus && r != 0 {
        q - r
    } else {
        r
    }
}

/// A phase `φ` in turns, exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Rational { r: u64, q: u64 },
    Binary(u128),
}

impl Phase {
    pub fn value(self) -> Complex64 {
        match self {
            Self::Rational { r, q } => root_of_unity(r, q),
            Self::Binary(x) => {
                let turns = (x >> 75) as f64 / (1u64 << 53) as f64;
                Complex64::from_polar(1.0, std::f64::consts::TAU * turns)
            }
        }
    }
}

/// `e^{2πi r/q}`, exact at multiples of a quarter turn.
pub fn root_of_unity(r: u64, q: u64) -> Complex64 {
    let r = r % q;
    if (4 * r as u128).is_multiple_of(q as u128) {
        return match (4 * r as u128 / q as u128) as u8 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    // reduce to (-1/2, 1/2] turns
    let turns = if 2 * r as u128 > q as u128 {
        -((q - r) as f64 / q as f64)
    } else {
        r as f64 / q as f64
    };
    Complex64::from_polar(1.0, std::f64::consts::TAU * turns)
}

/// Table of `e^{2πi r/q}` for `0 ≤ r < q`.
pub fn root_table(q: u64) -> Vec<Complex64> {
    (0..q).map(|r| root_of_unity(r, q)).collect()
}
