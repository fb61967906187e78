//! Bernstein's tail bound for sums of bounded centered variables, and its
//! Monte Carlo validation.

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{derive_seed, trial_rng};
use crate::scalar::Scalar;
use crate::stats::{wilson_interval, WilsonInterval, Z_99};

/// `P(|X_1 + … + X_n| ≥ a) < 4 exp(−a² / 4(σ + a))` for independent
/// `|X_i| ≤ 1`, `E X_i = 0`, `σ = Σ E|X_i|²`.
pub fn bernstein_bound(sigma: f64, a: f64) -> Result<f64> {
    if a.is_nan() || a <= 0.0 {
        return Err(Error::InvalidArgument(format!("deviation a = {a} must be positive")));
    }
    if sigma.is_nan() || sigma < 0.0 {
        return Err(Error::InvalidArgument(format!("variance σ = {sigma} must be nonnegative")));
    }
    Ok(4.0 * (-(a * a) / (4.0 * (sigma + a))).exp())
}

/// Law of each summand.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BernsteinDistribution {
    /// `±1` with equal probability.
    Rademacher,
    /// `ξ − δ` with `ξ` Bernoulli of mean `δ`.
    CenteredSelector { delta: f64 },
    /// `±scale` with equal probability.
    ScaledRademacher { scale: f64 },
}

impl BernsteinDistribution {
    fn validate(&self) -> Result<()> {
        match *self {
            Self::Rademacher => Ok(()),
            Self::CenteredSelector { delta } if (0.0..=1.0).contains(&delta) => Ok(()),
            Self::CenteredSelector { delta } => Err(Error::UnboundedDistribution(format!(
                "selector mean {delta} outside [0, 1]"
            ))),
            Self::ScaledRademacher { scale } if scale.is_finite() && scale.abs() <= 1.0 => Ok(()),
            Self::ScaledRademacher { scale } => Err(Error::UnboundedDistribution(format!(
                "summands of size {scale} exceed 1"
            ))),
        }
    }

    /// `E|X|²`.
    pub fn variance(&self) -> f64 {
        match *self {
            Self::Rademacher => 1.0,
            Self::CenteredSelector { delta } => delta * (1.0 - delta),
            Self::ScaledRademacher { scale } => scale * scale,
        }
    }

    fn sample_sum(&self, n: u64, rng: &mut impl RngCore) -> f64 {
        match *self {
            Self::Rademacher | Self::ScaledRademacher { .. } => {
                let mut ones = 0u64;
                let mut left = n;
                while left > 0 {
                    let take = left.min(64);
                    let w = rng.next_u64();
                    let w = if take == 64 { w } else { w & ((1u64 << take) - 1) };
                    ones += u64::from(w.count_ones());
                    left -= take;
                }
                let s = 2.0 * ones as f64 - n as f64;
                match *self {
                    Self::ScaledRademacher { scale } => scale * s,
                    _ => s,
                }
            }
            Self::CenteredSelector { delta } => {
                let hits = (0..n).filter(|_| delta.accepts(rng.next_u64())).count();
                hits as f64 - n as f64 * delta
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BernsteinRow {
    pub a: f64,
    pub exceedances: u64,
    pub frequency: f64,
    pub interval: WilsonInterval,
    pub bound: f64,
}

impl BernsteinRow {
    pub fn within_bound(&self) -> bool {
        self.frequency <= self.bound
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BernsteinReport {
    pub n: u64,
    pub distribution: BernsteinDistribution,
    pub sigma: f64,
    pub trials: u64,
    pub seed: u64,
    pub rows: Vec<BernsteinRow>,
}

/// Empirical `P(|ΣX_i| ≥ a)` over `trials` independent sums, one row per `a`.
pub fn monte_carlo_bernstein(
    n: u64,
    distribution: BernsteinDistribution,
    a_values: &[f64],
    trials: u64,
    seed: u64,
) -> Result<BernsteinReport> {
    distribution.validate()?;
    let sigma = n as f64 * distribution.variance();
    let bounds = a_values
        .iter()
        .map(|&a| bernstein_bound(sigma, a))
        .collect::<Result<Vec<_>>>()?;
    let sums: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| distribution.sample_sum(n, &mut trial_rng(derive_seed(seed, t))).abs())
        .collect();
    let rows = a_values
        .iter()
        .zip(bounds)
        .map(|(&a, bound)| {
            let exceedances = sums.iter().filter(|&&s| s >= a).count() as u64;
            BernsteinRow {
                a,
                exceedances,
                frequency: if trials == 0 { 0.0 } else { exceedances as f64 / trials as f64 },
                interval: wilson_interval(exceedances, trials, Z_99),
                bound,
            }
        })
        .collect();
    Ok(BernsteinReport {
        n,
        distribution,
        sigma,
        trials,
        seed,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        assert!((bernstein_bound(1.0, 1.0).unwrap() - 4.0 * (-0.125f64).exp()).abs() < 1e-15);
        assert!((bernstein_bound(1.0, 1.0).unwrap() - 3.5300).abs() < 1e-4);
        assert!((bernstein_bound(100.0, 60.0).unwrap() - 0.014426).abs() < 1e-6);
        assert!(bernstein_bound(0.0, 400.0).unwrap() < 4.0 * (-99.0f64).exp());
        assert!(bernstein_bound(1.0, 0.0).is_err());
        assert!(bernstein_bound(-1.0, 1.0).is_err());
    }

    #[test]
    fn impossible_deviation_never_happens() {
        let r = monte_carlo_bernstein(50, BernsteinDistribution::Rademacher, &[51.0], 2000, 1).unwrap();
        assert_eq!(r.rows[0].exceedances, 0);
    }

    #[test]
    fn unbounded_summands_are_rejected() {
        let d = BernsteinDistribution::ScaledRademacher { scale: 1.5 };
        assert!(matches!(
            monte_carlo_bernstein(10, d, &[1.0], 10, 0),
            Err(Error::UnboundedDistribution(_))
        ));
    }

    #[test]
    fn rademacher_sums_have_the_right_parity_and_spread() {
        let mut rng = trial_rng(3);
        let d = BernsteinDistribution::Rademacher;
        let sums: Vec<f64> = (0..4000).map(|_| d.sample_sum(100, &mut rng)).collect();
        assert!(sums.iter().all(|s| (*s as i64) % 2 == 0));
        let var = sums.iter().map(|s| s * s).sum::<f64>() / sums.len() as f64;
        assert!((var - 100.0).abs() < 10.0, "{var}");
    }
}
