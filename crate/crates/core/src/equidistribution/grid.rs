//! Sup-norms of trigonometric polynomials through a root-of-unity grid.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::circle::{residue, CirclePoint};
use crate::serde_decimal;

/// Default ceiling on the number of grid points evaluated.
pub const DEFAULT_GRID_CAP: u64 = 1 << 22;

/// Ratio between `‖f‖_∞` and the sup over a grid of at least `4N` equally
/// spaced points, for `N` the largest frequency magnitude.
pub const GRID_FACTOR: f64 = 5.0;

/// `f = Σ c_n e_n` with finitely many nonzero coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparsePolynomial {
    terms: BTreeMap<BigInt, Complex64>,
}

impl SparsePolynomial {
    /// Sums coefficients of repeated frequencies and drops zero terms.
    pub fn new(terms: impl IntoIterator<Item = (BigInt, Complex64)>) -> Self {
        let mut map: BTreeMap<BigInt, Complex64> = BTreeMap::new();
        for (n, c) in terms {
            *map.entry(n).or_default() += c;
        }
        map.retain(|_, c| !c.is_zero());
        Self { terms: map }
    }

    pub fn from_real(terms: impl IntoIterator<Item = (BigInt, f64)>) -> Self {
        Self::new(terms.into_iter().map(|(n, c)| (n, Complex64::new(c, 0.0))))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigInt, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.is_empty()
    }

    /// `N = max |n|` over the support; zero for the zero polynomial.
    pub fn max_frequency(&self) -> BigUint {
        self.terms
            .keys()
            .map(|n| n.magnitude().clone())
            .max()
            .unwrap_or_default()
    }

    pub fn evaluate(&self, point: &CirclePoint) -> Complex64 {
        self.terms.iter().map(|(n, c)| c * point.character(n)).sum()
    }

    /// `|f|` at the `m` points `e^{2πi r/m}`, by one inverse FFT of the
    /// coefficients folded modulo `m`.
    pub fn moduli_on_grid(&self, m: u64) -> Vec<f64> {
        let len = m as usize;
        let mut buf = vec![Complex64::zero(); len];
        for (n, c) in &self.terms {
            buf[residue(n, m) as usize] += c;
        }
        let fft = FftPlanner::<f64>::new().plan_fft_inverse(len);
        fft.process(&mut buf);
        buf.iter().map(|z| z.norm()).collect()
    }
}

/// Coarse grid sup `S` and the bound `5S`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSup {
    /// Points actually evaluated.
    pub grid_size: u64,
    /// `4N`, the size the bound requires.
    #[serde(with = "serde_decimal::uint")]
    pub required_size: BigUint,
    pub capped: bool,
    pub sup: f64,
    /// `r` with `|f(e^{2πi r/grid_size})| = sup`.
    pub argmax: u64,
    /// `5·sup`. An upper bound on `‖f‖_∞` only when `certified`.
    pub bound: f64,
    pub certified: bool,
}

/// Evaluates `|f|` on `M ≥ 4N` roots of unity (the next power of two, for
/// the FFT) and returns `S = sup |f|` there with the bound `‖f‖_∞ ≤ 5S`.
///
/// If `M` would exceed `cap`, `cap` points are used instead, `S` becomes a
/// lower estimate of `‖f‖_∞` and `certified` is false.
pub fn sup_norm_via_grid(poly: &SparsePolynomial, cap: u64) -> GridSup {
    let required_size = poly.max_frequency() * 4u32;
    if poly.is_zero() {
        return GridSup {
            grid_size: 0,
            required_size,
            capped: false,
            sup: 0.0,
            argmax: 0,
            bound: 0.0,
            certified: true,
        };
    }
    let wanted = required_size
        .to_u64()
        .and_then(|r| r.max(4).checked_next_power_of_two());
    let (grid_size, capped) = match wanted {
        Some(m) if m <= cap => (m, false),
        _ => (cap.max(1), true),
    };
    let moduli = poly.moduli_on_grid(grid_size);
    let (argmax, sup) = moduli
        .iter()
        .copied()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((0, 0.0));
    GridSup {
        grid_size,
        required_size,
        capped,
        sup,
        argmax: argmax as u64,
        bound: GRID_FACTOR * sup,
        certified: !capped,
    }
}

/// `max |f(t)|` over the given points.
pub fn sup_on_points(poly: &SparsePolynomial, points: &[CirclePoint]) -> f64 {
    use rayon::prelude::*;
    points
        .par_iter()
        .map(|p| poly.evaluate(p).norm())
        .reduce(|| 0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(terms: &[(i64, f64)]) -> SparsePolynomial {
        SparsePolynomial::from_real(terms.iter().map(|&(n, c)| (BigInt::from(n), c)))
    }

    #[test]
    fn single_character() {
        let g = sup_norm_via_grid(&poly(&[(37, 1.0)]), DEFAULT_GRID_CAP);
        assert!((g.sup - 1.0).abs() < 1e-12);
        assert!((g.bound - 5.0).abs() < 1e-11);
        assert!(g.certified && g.grid_size >= 148);
    }

    #[test]
    fn two_characters_peak_at_one() {
        let g = sup_norm_via_grid(&poly(&[(1, 1.0), (2, 1.0)]), DEFAULT_GRID_CAP);
        assert!((g.sup - 2.0).abs() < 1e-12);
        assert_eq!(g.argmax, 0);
        assert!((g.bound - 10.0).abs() < 1e-11);
    }

    #[test]
    fn zero_polynomial() {
        let g = sup_norm_via_grid(&poly(&[(3, 1.0), (3, -1.0)]), DEFAULT_GRID_CAP);
        assert_eq!((g.sup, g.bound, g.grid_size), (0.0, 0.0, 0));
    }

    #[test]
    fn negative_frequencies_fold_correctly() {
        let p = poly(&[(-5, 1.0), (5, 1.0)]);
        // 2 cos(2π·5θ)
        let m = p.moduli_on_grid(40);
        for (r, v) in m.iter().enumerate() {
            let want = (2.0 * (std::f64::consts::TAU * 5.0 * r as f64 / 40.0).cos()).abs();
            assert!((v - want).abs() < 1e-12);
        }
    }

    #[test]
    fn cap_is_reported() {
        let p = poly(&[(1 << 30, 1.0), (1, 1.0)]);
        let g = sup_norm_via_grid(&p, 1 << 10);
        assert!(g.capped && !g.certified);
        assert_eq!(g.grid_size, 1 << 10);
        assert_eq!(g.required_size, BigUint::from(1u64 << 32));
    }

    #[test]
    fn evaluate_matches_grid() {
        let p = poly(&[(3, 0.5), (-2, 1.5), (7, -1.0)]);
        let m = p.moduli_on_grid(32);
        for r in [0, 5, 31] {
            let t = CirclePoint::rational(r, 32).unwrap();
            assert!((p.evaluate(&t).norm() - m[r as usize]).abs() < 1e-12);
        }
    }
}
