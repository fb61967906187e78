//! Annular Littlewood–Paley partitions of ℤ and block decompositions.
//!
//! A partition is given by cut points `p_0 < p_1 < … < p_K`. Block 0 is
//! `[-p_0, p_0]` and block `k ≥ 1` is the annulus
//! `I_k = [-p_k, -p_{k-1}) ∪ (p_{k-1}, p_k]`. Elements beyond `p_K` are kept in
//! an explicit remainder.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integer_sets::IntegerSet;
use crate::numeric::{factorial_saturating, ln_magnitude};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionKind {
    Dyadic,
    Gross,
    Custom,
}

/// Exponent schedule for a gross partition `p_k = 2^{e_k}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrossSchedule {
    /// `e_k = k!`.
    Factorial,
    /// Explicit `e_1 < e_2 < …`.
    Exponents(Vec<u64>),
}

/// Default lower bound on `e_k / e_{k-1}` for a custom gross schedule.
pub const DEFAULT_GROSS_RATIO: f64 = 1.5;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    kind: PartitionKind,
    #[serde(with = "crate::serde_decimal::vec")]
    cut_points: Vec<BigInt>,
}

impl Partition {
    /// Cut points `1, 2, 4, …, 2^{k_max}`.
    pub fn dyadic(k_max: u32) -> Result<Self> {
        if k_max == 0 {
            return Err(Error::InvalidArgument("dyadic partition needs k_max >= 1".into()));
        }
        Ok(Self {
            kind: PartitionKind::Dyadic,
            cut_points: (0..=k_max).map(|k| BigInt::one() << k).collect(),
        })
    }

    /// Cut points `p_0 = 1` and `p_k = 2^{e_k}` for `1 ≤ k ≤ k_max`.
    pub fn gross(k_max: u32, schedule: &GrossSchedule, ratio_threshold: f64) -> Result<Self> {
        if k_max == 0 {
            return Err(Error::InvalidArgument("gross partition needs k_max >= 1".into()));
        }
        let exponents: Vec<u64> = match schedule {
            GrossSchedule::Factorial => {
                let e: Vec<u64> = (1..=u64::from(k_max)).map(factorial_saturating).collect();
                if e.last() == Some(&u64::MAX) {
                    return Err(Error::InvalidArgument(format!("2^({k_max}!) is out of reach")));
                }
                e
            }
            GrossSchedule::Exponents(e) => {
                if e.len() < k_max as usize {
                    return Err(Error::InvalidGrossSchedule(format!(
                        "{} exponents for k_max = {k_max}",
                        e.len()
                    )));
                }
                let e = e[..k_max as usize].to_vec();
                validate_gross_exponents(&e, ratio_threshold)?;
                e
            }
        };
        let mut cut_points = vec![BigInt::one()];
        cut_points.extend(exponents.iter().map(|&e| BigInt::one() << e));
        Ok(Self {
            kind: PartitionKind::Gross,
            cut_points,
        })
    }

    pub fn custom(cut_points: Vec<BigInt>) -> Result<Self> {
        if cut_points.is_empty() {
            return Err(Error::InvalidArgument("no cut points".into()));
        }
        if cut_points[0] < BigInt::one() || cut_points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "cut points must be positive and strictly increasing".into(),
            ));
        }
        Ok(Self {
            kind: PartitionKind::Custom,
            cut_points,
        })
    }

    pub fn kind(&self) -> PartitionKind {
        self.kind
    }

    pub fn cut_points(&self) -> &[BigInt] {
        &self.cut_points
    }

    /// Number of blocks, counting block 0.
    pub fn num_blocks(&self) -> usize {
        self.cut_points.len()
    }

    /// Index of the block containing `n`, or `None` beyond `p_K`.
    pub fn block_of(&self, n: &BigInt) -> Option<usize> {
        let mag = n.magnitude();
        let k = self.cut_points.partition_point(|p| p.magnitude() < mag);
        (k < self.cut_points.len()).then_some(k)
    }

    pub fn contains(&self, k: usize, n: &BigInt) -> bool {
        self.block_of(n) == Some(k)
    }

    /// `|I_k|`: `2 p_0 + 1` for block 0, `2 (p_k - p_{k-1})` otherwise.
    pub fn block_size(&self, k: usize) -> BigUint {
        let p = self.cut_points[k].magnitude();
        if k == 0 {
            2u32 * p + 1u32
        } else {
            2u32 * (p - self.cut_points[k - 1].magnitude())
        }
    }
}

fn validate_gross_exponents(e: &[u64], ratio_threshold: f64) -> Result<()> {
    if e.first().is_some_and(|&e1| e1 == 0) || e.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidGrossSchedule(
            "exponents must be positive and strictly increasing".into(),
        ));
    }
    let ratios: Vec<f64> = e.windows(2).map(|w| w[1] as f64 / w[0] as f64).collect();
    if let Some(i) = ratios.iter().position(|&r| r <= ratio_threshold) {
        return Err(Error::InvalidGrossSchedule(format!(
            "e_{}/e_{} = {} <= {ratio_threshold}",
            i + 2,
            i + 1,
            ratios[i]
        )));
    }
    if let Some(i) = ratios.windows(2).position(|w| w[1] < w[0]) {
        return Err(Error::InvalidGrossSchedule(format!(
            "exponent ratios decrease at k = {}",
            i + 3
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub k: usize,
    /// Exclusive inner radius `p_{k-1}`; `None` for block 0.
    #[serde(with = "crate::serde_decimal::opt_int")]
    pub inner: Option<BigInt>,
    /// Inclusive outer radius `p_k`.
    #[serde(with = "crate::serde_decimal::int")]
    pub outer: BigInt,
    #[serde(with = "crate::serde_decimal::uint")]
    pub interval_size: BigUint,
    pub elements: IntegerSet,
}

impl Block {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// `E_k = E ∩ I_k` for every block, plus elements beyond the last cut point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockDecomposition {
    pub kind: PartitionKind,
    pub blocks: Vec<Block>,
    pub remainder: IntegerSet,
}

impl BlockDecomposition {
    pub fn total_len(&self) -> usize {
        self.blocks.iter().map(Block::len).sum::<usize>() + self.remainder.len()
    }

    /// Block sizes `|E_k|` in block order.
    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Block::len).collect()
    }

    /// Per-block counts, with the elements inline when `inline` is set.
    pub fn summary(&self, inline: bool) -> DecompositionSummary {
        DecompositionSummary {
            kind: self.kind,
            blocks: self
                .blocks
                .iter()
                .map(|b| BlockSummary {
                    k: b.k,
                    inner: b.inner.as_ref().map(ToString::to_string),
                    outer: b.outer.to_string(),
                    interval_size: b.interval_size.to_string(),
                    count: b.len(),
                    elements: inline
                        .then(|| b.elements.elements().iter().map(ToString::to_string).collect()),
                })
                .collect(),
            remainder_count: self.remainder.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSummary {
    pub k: usize,
    pub inner: Option<String>,
    pub outer: String,
    pub interval_size: String,
    pub count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionSummary {
    pub kind: PartitionKind,
    pub blocks: Vec<BlockSummary>,
    pub remainder_count: usize,
}

/// Splits `set` along `partition`.
pub fn decompose(set: &IntegerSet, partition: &Partition) -> BlockDecomposition {
    let elems = set.elements();
    let mut start = 0;
    let mut blocks = Vec::with_capacity(partition.num_blocks());
    for (k, outer) in partition.cut_points().iter().enumerate() {
        // elements are sorted by |n|, so every block is a contiguous run
        let end = start + elems[start..].partition_point(|n| n.magnitude() <= outer.magnitude());
        blocks.push(Block {
            k,
            inner: (k > 0).then(|| partition.cut_points()[k - 1].clone()),
            outer: outer.clone(),
            interval_size: partition.block_size(k),
            elements: IntegerSet::from_sorted_unchecked(
                format!("{} ∩ I_{k}", set.label()),
                elems[start..end].to_vec(),
            ),
        });
        start = end;
    }
    BlockDecomposition {
        kind: partition.kind(),
        blocks,
        remainder: IntegerSet::from_sorted_unchecked(
            format!("{} beyond p_K", set.label()),
            elems[start..].to_vec(),
        ),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockGrowth {
    pub k: usize,
    pub size: usize,
    pub log_interval_size: f64,
    /// `log|E_k| / log|I_k|`; `None` for an empty block.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockGrowthReport {
    pub tail_start: usize,
    pub blocks: Vec<BlockGrowth>,
    /// Minimum ratio over non-empty tail blocks.
    pub tail_min: Option<f64>,
    /// Tail blocks with `E_k = ∅`.
    pub empty_in_tail: Vec<usize>,
}

/// Ratios `log|E_k| / log|I_k|` per block, summarised over `k ≥ tail_start`.
pub fn verify_block_growth(decomposition: &BlockDecomposition, tail_start: usize) -> BlockGrowthReport {
    let blocks: Vec<BlockGrowth> = decomposition
        .blocks
        .iter()
        .map(|b| {
            let log_interval_size = ln_magnitude(&b.interval_size);
            BlockGrowth {
                k: b.k,
                size: b.len(),
                log_interval_size,
                ratio: (!b.is_empty()).then(|| (b.len() as f64).ln() / log_interval_size),
            }
        })
        .collect();
    let tail = blocks.iter().filter(|b| b.k >= tail_start);
    let tail_min = tail
        .clone()
        .filter_map(|b| b.ratio)
        .min_by(|a, b| a.total_cmp(b));
    let empty_in_tail = tail.filter(|b| b.ratio.is_none()).map(|b| b.k).collect();
    BlockGrowthReport {
        tail_start,
        blocks,
        tail_min,
        empty_in_tail,
    }
}

/// `|I_k|` as `f64` where it fits; used for reporting only.
pub fn interval_size_f64(partition: &Partition, k: usize) -> f64 {
    partition.block_size(k).to_f64().unwrap_or(f64::INFINITY)
}
