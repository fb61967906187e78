//! Experiment configuration, persisted as versioned JSON.

use std::path::Path;

use anyhow::{bail, Context, Result};
use lacunary::integer_sets::{
    generate_geometric, generate_polynomial, generate_powers, generate_primes, generate_range,
};
use lacunary::partitions::{GrossSchedule, DEFAULT_GROSS_RATIO};
use lacunary::random_selection::factorial_budget;
use lacunary::{IntegerSet, Partition};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineKind {
    /// Per-block s-independence frequencies against the per-block bound.
    BlockIndependence,
    /// Growth, budgets, block independence, `ψ(k)` decay and a scan of `E'`.
    MainTheorem,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceSpec {
    Primes { limit: u64 },
    Powers { d: u32, k_max: u64 },
    /// Coefficients as decimal strings, constant term first.
    Polynomial { coefficients: Vec<String>, k_max: u64 },
    Range { lo: i64, hi: i64 },
    Geometric { base: u64, k_max: u32 },
}

impl SourceSpec {
    pub fn build(&self) -> Result<IntegerSet> {
        Ok(match self {
            Self::Primes { limit } => generate_primes(*limit),
            Self::Powers { d, k_max } => generate_powers(*d, *k_max)?,
            Self::Polynomial { coefficients, k_max } => {
                let coeffs = coefficients
                    .iter()
                    .map(|c| c.trim().parse::<BigInt>().with_context(|| format!("bad coefficient {c:?}")))
                    .collect::<Result<Vec<_>>>()?;
                generate_polynomial(&coeffs, *k_max)?.set
            }
            Self::Range { lo, hi } => generate_range(*lo, *hi),
            Self::Geometric { base, k_max } => generate_geometric(*base, *k_max)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PartitionSpec {
    Dyadic {
        k_max: u32,
    },
    Gross {
        k_max: u32,
        /// Exponents `e_k` with `p_k = 2^{e_k}`; factorial when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        exponents: Option<Vec<u64>>,
        #[serde(default = "default_gross_ratio")]
        ratio_threshold: f64,
    },
    Custom {
        cut_points: Vec<String>,
    },
}

fn default_gross_ratio() -> f64 {
    DEFAULT_GROSS_RATIO
}

impl PartitionSpec {
    pub fn build(&self) -> Result<Partition> {
        Ok(match self {
            Self::Dyadic { k_max } => Partition::dyadic(*k_max)?,
            Self::Gross {
                k_max,
                exponents,
                ratio_threshold,
            } => {
                let schedule = match exponents {
                    Some(e) => GrossSchedule::Exponents(e.clone()),
                    None => GrossSchedule::Factorial,
                };
                Partition::gross(*k_max, &schedule, *ratio_threshold)?
            }
            Self::Custom { cut_points } => Partition::custom(
                cut_points
                    .iter()
                    .map(|c| c.trim().parse::<BigInt>().with_context(|| format!("bad cut point {c:?}")))
                    .collect::<Result<_>>()?,
            )?,
        })
    }
}

/// Nominal per-block budget `ℓ_k` before any cap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BudgetSpec {
    /// `ℓ_k = k`.
    Linear,
    /// `ℓ_k = (k+2)!`.
    Factorial,
    Constant { ell: u64 },
    /// `ℓ_k = |E_k|`.
    Full,
    Explicit { values: Vec<u64> },
}

impl BudgetSpec {
    /// `None` means "the whole block".
    pub fn nominal(&self, k: usize) -> Option<u64> {
        match self {
            Self::Linear => Some(k as u64),
            Self::Factorial => Some(factorial_budget(k)),
            Self::Constant { ell } => Some(*ell),
            Self::Full => None,
            Self::Explicit { values } => Some(values.get(k).copied().unwrap_or(0)),
        }
    }
}

/// Seeds-over-threshold criteria replacing almost-sure statements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    /// Required fraction of seeds in which every tail block is independent.
    pub independence_frequency: f64,
    /// Required fraction of seeds with `ψ(K) < ψ(⌈K/4⌉)`.
    pub psi_decay_frequency: f64,
    /// Allowed excess of a block frequency over its bound, in Wilson
    /// half-widths.
    pub bound_half_widths: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            independence_frequency: 0.95,
            psi_decay_frequency: 0.90,
            bound_half_widths: 3.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    /// Every reduced `a/q` with `q` up to this is sampled.
    pub sample_denominator: u64,
    /// Fractional parts of `√m` sampled as irrational points.
    pub sqrt_points: Vec<u64>,
    pub exclusion_denominator: u64,
    pub exclusion_radius: f64,
    pub checkpoints_per_decade: usize,
}

impl Default for ScanSpec {
    fn default() -> Self {
        use lacunary::equidistribution as eq;
        Self {
            sample_denominator: eq::DEFAULT_SCAN_DENOMINATOR,
            sqrt_points: eq::DEFAULT_SCAN_SQRTS.to_vec(),
            exclusion_denominator: eq::DEFAULT_EXCLUSION_DENOMINATOR,
            exclusion_radius: eq::DEFAULT_EXCLUSION_RADIUS,
            checkpoints_per_decade: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub pipeline: PipelineKind,
    pub source: SourceSpec,
    pub partition: PartitionSpec,
    pub budget: BudgetSpec,
    /// Lower each budget to `|E_k|` instead of failing.
    #[serde(default)]
    pub cap_budgets: bool,
    pub s: Vec<u32>,
    pub trials: u64,
    pub seed: u64,
    /// First block of the declared tail.
    pub tail_start: usize,
    pub grid_cap: u64,
    /// Indices `k` for `ψ(k)`; `[⌈K/4⌉, K]` with `K = |E|` when empty.
    #[serde(default)]
    pub psi_ks: Vec<usize>,
    #[serde(default)]
    pub scan: ScanSpec,
    #[serde(default)]
    pub thresholds: Thresholds,
    /// Check the source for polynomial growth first.
    #[serde(default = "yes")]
    pub require_polynomial_growth: bool,
}

fn yes() -> bool {
    true
}

impl ExperimentConfig {
    /// Primes up to `2^20`, dyadic blocks, `ℓ_k = k`, `s = 2`, 100 seeds.
    pub fn main_theorem_dyadic() -> Self {
        Self {
            schema: SCHEMA_VERSION,
            pipeline: PipelineKind::MainTheorem,
            source: SourceSpec::Primes { limit: 1 << 20 },
            partition: PartitionSpec::Dyadic { k_max: 20 },
            budget: BudgetSpec::Linear,
            cap_budgets: true,
            s: vec![2],
            trials: 100,
            seed: 0,
            tail_start: 12,
            grid_cap: lacunary::equidistribution::DEFAULT_GRID_CAP,
            psi_ks: Vec::new(),
            scan: ScanSpec::default(),
            thresholds: Thresholds::default(),
            require_polynomial_growth: true,
        }
    }

    /// Gross blocks `p_j = 2^{j!}` with `ℓ_j = min((j+2)!, |E_j|)`.
    pub fn main_theorem_gross() -> Self {
        Self {
            source: SourceSpec::Range { lo: 1, hi: 1 << 16 },
            partition: PartitionSpec::Gross {
                k_max: 4,
                exponents: None,
                ratio_threshold: DEFAULT_GROSS_RATIO,
            },
            budget: BudgetSpec::Factorial,
            tail_start: 3,
            ..Self::main_theorem_dyadic()
        }
    }

    /// `[1, 2^18]`, dyadic blocks, `ℓ_k = k`, `s = 2`.
    pub fn block_independence() -> Self {
        Self {
            pipeline: PipelineKind::BlockIndependence,
            source: SourceSpec::Range { lo: 1, hi: 1 << 18 },
            partition: PartitionSpec::Dyadic { k_max: 18 },
            cap_budgets: false,
            tail_start: 16,
            ..Self::main_theorem_dyadic()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            bail!("unsupported config schema {} (expected {SCHEMA_VERSION})", self.schema);
        }
        if self.s.is_empty() || self.s.contains(&0) {
            bail!("s values must be positive");
        }
        if self.trials == 0 {
            bail!("trials must be positive");
        }
        if self.grid_cap == 0 {
            bail!("grid_cap must be positive");
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).context("malformed experiment config")?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the compact JSON encoding, hex.
    pub fn hash(&self) -> String {
        let compact = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&compact).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_round_trip() {
        for c in [
            ExperimentConfig::main_theorem_dyadic(),
            ExperimentConfig::main_theorem_gross(),
            ExperimentConfig::block_independence(),
        ] {
            let back = ExperimentConfig::from_json(&c.to_json()).unwrap();
            assert_eq!(back, c);
            assert_eq!(back.hash(), c.hash());
        }
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig::main_theorem_dyadic();
        let mut b = a.clone();
        b.seed = 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn unknown_fields_and_schemas_are_rejected() {
        let mut v = serde_json::to_value(ExperimentConfig::main_theorem_dyadic()).unwrap();
        v["schema"] = 2.into();
        assert!(ExperimentConfig::from_json(&v.to_string()).is_err());
        v["schema"] = 1.into();
        v["bogus"] = true.into();
        assert!(ExperimentConfig::from_json(&v.to_string()).is_err());
        assert!(ExperimentConfig::from_json("{").is_err());
    }

    #[test]
    fn sources_build() {
        let p = SourceSpec::Primes { limit: 100 }.build().unwrap();
        assert_eq!(p.len(), 25);
        let sq = SourceSpec::Polynomial {
            coefficients: vec!["0".into(), "0".into(), "1".into()],
            k_max: 10,
        };
        assert_eq!(sq.build().unwrap().to_i64_vec().unwrap().last(), Some(&100));
    }
}
