//! Binomial confidence intervals.

use serde::{Deserialize, Serialize};

/// Two-sided 99% standard normal quantile.
pub const Z_99: f64 = 2.575_829_303_548_900_4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WilsonInterval {
    pub lower: f64,
    pub upper: f64,
    pub half_width: f64,
    pub z: f64,
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> WilsonInterval {
    if trials == 0 {
        return WilsonInterval {
            lower: 0.0,
            upper: 1.0,
            half_width: 0.5,
            z,
        };
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    WilsonInterval {
        lower: (centre - half).max(0.0),
        upper: (centre + half).min(1.0),
        half_width: half,
        z,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_matches_reference_values() {
        // 10 of 100 at 95%: [0.0552, 0.1744]
        let w = wilson_interval(10, 100, 1.959_963_984_540_054);
        assert!((w.lower - 0.05523).abs() < 1e-4, "{w:?}");
        assert!((w.upper - 0.17437).abs() < 1e-4, "{w:?}");
        let zero = wilson_interval(0, 2000, Z_99);
        assert_eq!(zero.lower, 0.0);
        assert!(zero.upper > 0.0 && zero.upper < 0.01);
    }
}
