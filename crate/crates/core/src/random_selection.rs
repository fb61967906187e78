//! Selector constructions: independent Bernoulli selectors `ξ_n` with means
//! `δ_n`, and the random subset `E' = {n ∈ E : ξ_n = 1}`.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integer_sets::IntegerSet;
use crate::numeric::{factorial_saturating, ln_abs, ln_magnitude};
use crate::partitions::{BlockDecomposition, PartitionKind};
use crate::relations::{dependence_probability_bound, is_s_independent};
use crate::rng::{derive_seed, selector_stream};
use crate::scalar::Scalar;
use crate::stats::{wilson_interval, WilsonInterval, Z_99};

/// Constant density `ℓ_k / |E_k|` on a block of consecutive elements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockDensity<T> {
    pub k: usize,
    pub ell: u64,
    pub size: u64,
    pub delta: T,
    /// Element index range `start..end` of the block inside the schedule.
    pub start: usize,
    pub end: usize,
}

/// Densities `δ_{n_1}, δ_{n_2}, …` aligned with an [`IntegerSet`], with the
/// partial sums `σ_k = δ_{n_1} + … + δ_{n_k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensitySchedule<T: Scalar> {
    elements: Vec<BigInt>,
    deltas: Vec<T>,
    sigma: Vec<T>,
    blocks: Option<Vec<BlockDensity<T>>>,
}

impl<T: Scalar> DensitySchedule<T> {
    pub fn from_deltas(set: &IntegerSet, deltas: Vec<T>) -> Result<Self> {
        if deltas.len() != set.len() {
            return Err(Error::MisalignedSchedule(format!(
                "{} densities for {} elements",
                deltas.len(),
                set.len()
            )));
        }
        if let Some(i) = deltas
            .iter()
            .position(|d| *d < T::zero() || *d > T::one())
        {
            return Err(Error::InvalidArgument(format!(
                "density {} at index {i} is outside [0, 1]",
                deltas[i]
            )));
        }
        let sigma = deltas
            .iter()
            .scan(T::zero(), |acc, d| {
                *acc = acc.clone() + d.clone();
                Some(acc.clone())
            })
            .collect();
        Ok(Self {
            elements: set.elements().to_vec(),
            deltas,
            sigma,
            blocks: None,
        })
    }

    pub fn uniform(set: &IntegerSet, delta: T) -> Result<Self> {
        Self::from_deltas(set, vec![delta; set.len()])
    }

    pub fn len(&self) -> usize {
        self.deltas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deltas.is_empty()
    }

    pub fn elements(&self) -> &[BigInt] {
        &self.elements
    }

    pub fn deltas(&self) -> &[T] {
        &self.deltas
    }

    /// `σ_1, …, σ_K`.
    pub fn sigma(&self) -> &[T] {
        &self.sigma
    }

    /// `σ_k` for `1 ≤ k ≤ len`; `σ_0 = 0`.
    pub fn sigma_at(&self, k: usize) -> T {
        if k == 0 {
            T::zero()
        } else {
            self.sigma[k - 1].clone()
        }
    }

    pub fn blocks(&self) -> Option<&[BlockDensity<T>]> {
        self.blocks.as_deref()
    }

    /// Index of the first `j` with `δ_{j+1} > δ_j`, if any.
    pub fn first_increase(&self) -> Option<usize> {
        self.deltas.windows(2).position(|w| w[1] > w[0]).map(|i| i + 1)
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.first_increase().is_none()
    }

    pub fn check_aligned(&self, set: &IntegerSet) -> Result<()> {
        if self.elements.len() != set.len() {
            return Err(Error::MisalignedSchedule(format!(
                "schedule has {} entries, set has {} elements",
                self.elements.len(),
                set.len()
            )));
        }
        if let Some(i) = self
            .elements
            .iter()
            .zip(set.elements())
            .position(|(a, b)| a != b)
        {
            return Err(Error::MisalignedSchedule(format!(
                "entry {i} is {} but the set has {}",
                self.elements[i],
                set.elements()[i]
            )));
        }
        Ok(())
    }

    /// JSON-friendly view: `{blocks: [{k, ell, size, delta}], sigma: [...]}`.
    pub fn summary(&self) -> ScheduleSummary {
        ScheduleSummary {
            exact: T::EXACT,
            blocks: self.blocks.as_ref().map(|b| {
                b.iter()
                    .map(|b| BlockSummary {
                        k: b.k,
                        ell: b.ell,
                        size: b.size,
                        delta: b.delta.to_string(),
                    })
                    .collect()
            }),
            deltas: self.deltas.iter().map(ToString::to_string).collect(),
            sigma: self.sigma.iter().map(ToString::to_string).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSummary {
    pub k: usize,
    pub ell: u64,
    pub size: u64,
    pub delta: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleSummary {
    pub exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<BlockSummary>>,
    pub deltas: Vec<String>,
    pub sigma: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockCount {
    pub k: usize,
    pub ell: u64,
    pub size: u64,
    pub selected: u64,
}

/// One draw of the selectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionTrial {
    pub seed: u64,
    pub source_label: String,
    pub source_len: usize,
    /// Indices into the source set of the selected elements, increasing.
    pub indices: Vec<usize>,
    pub selected: IntegerSet,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block_counts: Option<Vec<BlockCount>>,
}

impl SelectionTrial {
    /// Selection mask packed least-significant-bit first, as hex.
    pub fn bitmap_hex(&self) -> String {
        let mut bytes = vec![0u8; self.source_len.div_ceil(8)];
        for &i in &self.indices {
            bytes[i / 8] |= 1 << (i % 8);
        }
        bytes.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Number of selected elements among the first `k` of the source.
    pub fn selected_in_prefix(&self, k: usize) -> usize {
        self.indices.partition_point(|&i| i < k)
    }
}

/// Draws `E'`: element `i` is kept iff its selector word under `seed` falls
/// below `δ_{n_i}`.
pub fn select<T: Scalar>(set: &IntegerSet, schedule: &DensitySchedule<T>, seed: u64) -> Result<SelectionTrial> {
    schedule.check_aligned(set)?;
    Ok(select_unchecked(set, schedule, seed))
}

fn select_unchecked<T: Scalar>(set: &IntegerSet, schedule: &DensitySchedule<T>, seed: u64) -> SelectionTrial {
    let mut words = selector_stream(seed, 0);
    let indices: Vec<usize> = schedule
        .deltas
        .iter()
        .enumerate()
        .filter_map(|(i, d)| d.accepts(words.next_u64()).then_some(i))
        .collect();
    let elems = set.elements();
    let selected = IntegerSet::from_sorted_unchecked(
        format!("{} selected (seed {seed})", set.label()),
        indices.iter().map(|&i| elems[i].clone()).collect(),
    );
    let block_counts = schedule.blocks.as_ref().map(|blocks| {
        blocks
            .iter()
            .map(|b| BlockCount {
                k: b.k,
                ell: b.ell,
                size: b.size,
                selected: (indices.partition_point(|&i| i < b.end)
                    - indices.partition_point(|&i| i < b.start)) as u64,
            })
            .collect()
    });
    SelectionTrial {
        seed,
        source_label: set.label().to_string(),
        source_len: set.len(),
        indices,
        selected,
        block_counts,
    }
}

/// `δ_n = ℓ_k / |E_k|` on each block; remainder elements get density zero.
pub fn blockwise_schedule<T: Scalar>(decomposition: &BlockDecomposition, ells: &[u64]) -> Result<DensitySchedule<T>> {
    if ells.len() != decomposition.blocks.len() {
        return Err(Error::InvalidArgument(format!(
            "{} budgets for {} blocks",
            ells.len(),
            decomposition.blocks.len()
        )));
    }
    let mut deltas = Vec::new();
    let mut elements = Vec::new();
    let mut blocks = Vec::new();
    for (b, &ell) in decomposition.blocks.iter().zip(ells) {
        let size = b.len() as u64;
        if ell > size {
            return Err(Error::BudgetExceedsBlock { k: b.k, ell, size });
        }
        let delta = if size == 0 { T::zero() } else { T::ratio(ell, size) };
        let start = deltas.len();
        deltas.extend(std::iter::repeat_n(delta.clone(), b.len()));
        elements.extend(b.elements.elements().iter().cloned());
        blocks.push(BlockDensity {
            k: b.k,
            ell,
            size,
            delta,
            start,
            end: deltas.len(),
        });
    }
    deltas.extend(std::iter::repeat_n(T::zero(), decomposition.remainder.len()));
    elements.extend(decomposition.remainder.elements().iter().cloned());
    let set = IntegerSet::from_sorted_unchecked("blockwise", elements);
    let mut schedule = DensitySchedule::from_deltas(&set, deltas)?;
    schedule.blocks = Some(blocks);
    Ok(schedule)
}

/// Budgets `ℓ_k = min(cap(k), |E_k|)`.
pub fn capped_budgets(decomposition: &BlockDecomposition, cap: impl Fn(usize) -> u64) -> Vec<u64> {
    decomposition
        .blocks
        .iter()
        .map(|b| cap(b.k).min(b.len() as u64))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetRow {
    pub k: usize,
    pub ell: u64,
    pub size: u64,
    /// The budget was lowered to `|E_k|`.
    pub capped: bool,
    /// `ℓ_k / log p_{k+1}`; large values support `ℓ_k ≫ log p_{k+1}`.
    pub ell_over_log_next_cut: Option<f64>,
    /// `log ℓ_k / log p_k`; small values support `log ℓ_k ≪ log p_k`.
    pub log_ell_over_log_cut: Option<f64>,
    /// `(ℓ_1 + … + ℓ_{k-1}) / log p_k`, the lower bound on `σ_j / log|n_j|`
    /// for `n_j` in block `k`.
    pub prior_budget_over_log_cut: Option<f64>,
}

/// Growth ratios of a blockwise budget against the cut points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetReport {
    pub rows: Vec<BudgetRow>,
}

/// Ratios for budgets `ells`, where `nominal(k)` is the budget before capping.
pub fn budget_report(decomposition: &BlockDecomposition, ells: &[u64], nominal: impl Fn(usize) -> u64) -> BudgetReport {
    let blocks = &decomposition.blocks;
    let mut prior = 0u64;
    let rows = blocks
        .iter()
        .zip(ells)
        .map(|(b, &ell)| {
            let log_cut = ln_abs(&b.outer);
            let next = blocks.get(b.k + 1).map(|n| ln_abs(&n.outer));
            let row = BudgetRow {
                k: b.k,
                ell,
                size: b.len() as u64,
                capped: ell < nominal(b.k),
                ell_over_log_next_cut: next.map(|l| ell as f64 / l),
                log_ell_over_log_cut: (ell > 0 && log_cut > 0.0).then(|| (ell as f64).ln() / log_cut),
                prior_budget_over_log_cut: (b.k > 0 && log_cut > 0.0).then(|| prior as f64 / log_cut),
            };
            if b.k > 0 {
                prior = prior.saturating_add(ell);
            }
            row
        })
        .collect();
    BudgetReport { rows }
}

/// `(k+2)!`.
pub fn factorial_budget(k: usize) -> u64 {
    factorial_saturating(k as u64 + 2)
}

/// Budgets `ℓ_j = min((j+2)!, |E_j|)` on a gross partition, with the ratios
/// behind the growth conditions on `ℓ_j`.
pub fn katznelson_li_schedule<T: Scalar>(
    decomposition: &BlockDecomposition,
) -> Result<(DensitySchedule<T>, BudgetReport)> {
    if decomposition.kind != PartitionKind::Gross {
        return Err(Error::InvalidArgument(
            "the (j+2)! budget schedule expects a gross partition".into(),
        ));
    }
    let ells = capped_budgets(decomposition, factorial_budget);
    let report = budget_report(decomposition, &ells, factorial_budget);
    Ok((blockwise_schedule(decomposition, &ells)?, report))
}

/// Families of nonincreasing schedules for equidistribution of `E'`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BourgainForm<T> {
    /// `δ_{n_k} = min(1, k^{-α})` with `0 ≤ α ≤ 1`.
    PowerLaw { alpha: f64 },
    /// Smallest nonincreasing schedule dominating the pace
    /// `(|n_k| - |n_{k-1}|) / |n_{k-1}|`, capped at one.
    PaceBased,
    Custom(Vec<T>),
}

/// Finite-data margins for the sufficient conditions on a schedule; ratios
/// are reported, never thresholded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BourgainDiagnostics {
    pub tail_start: usize,
    /// `min δ_{n_k} / min(1, pace_k)` over the tail.
    pub pace_ratio_min: Option<f64>,
    /// `min k·δ_{n_k}` over the tail.
    pub harmonic_ratio_min: Option<f64>,
    /// `σ_K / log|n_K|` at the last index.
    pub sigma_over_log_final: Option<f64>,
    /// `min σ_k / log|n_k|` over the tail.
    pub sigma_over_log_min: Option<f64>,
}

fn pace(elems: &[BigInt], k: usize) -> Option<f64> {
    // k is 0-based and ≥ 1
    let prev = elems[k - 1].magnitude();
    let cur = elems[k].magnitude();
    if prev.is_zero() || cur <= prev {
        return None;
    }
    Some((ln_magnitude(&(cur - prev)) - ln_magnitude(prev)).exp())
}

/// Nonincreasing schedule of the requested form plus diagnostics on
/// `k ≥ tail_start` (1-based).
pub fn bourgain_schedule<T: Scalar>(
    set: &IntegerSet,
    form: &BourgainForm<T>,
    tail_start: usize,
) -> Result<(DensitySchedule<T>, BourgainDiagnostics)> {
    let elems = set.elements();
    let deltas: Vec<T> = match form {
        BourgainForm::PowerLaw { alpha } => {
            if !(0.0..=1.0).contains(alpha) {
                return Err(Error::InvalidArgument(format!(
                    "power-law exponent {alpha} outside [0, 1]"
                )));
            }
            (1..=elems.len() as u64)
                .map(|k| T::inverse_power(k, *alpha))
                .collect()
        }
        BourgainForm::PaceBased => {
            let mut out = vec![T::one(); elems.len()];
            let mut running = 0.0f64;
            for k in (1..elems.len()).rev() {
                running = running.max(pace(elems, k).unwrap_or(0.0).min(1.0));
                out[k] = T::from_f64(running).unwrap_or_else(T::one);
            }
            out
        }
        BourgainForm::Custom(d) => d.clone(),
    };
    let schedule = DensitySchedule::from_deltas(set, deltas)?;
    if let Some(index) = schedule.first_increase() {
        return Err(Error::IncreasingSchedule { index });
    }
    let diagnostics = bourgain_diagnostics(&schedule, tail_start);
    Ok((schedule, diagnostics))
}

pub fn bourgain_diagnostics<T: Scalar>(schedule: &DensitySchedule<T>, tail_start: usize) -> BourgainDiagnostics {
    let elems = schedule.elements();
    let tail = tail_start.max(1)..=elems.len();
    let min = |it: &mut dyn Iterator<Item = f64>| it.min_by(|a, b| a.total_cmp(b));
    let delta = |k: usize| schedule.deltas[k - 1].to_f64_lossy();
    let sigma_over_log = |k: usize| {
        let l = ln_abs(&elems[k - 1]);
        (l > 0.0).then(|| schedule.sigma[k - 1].to_f64_lossy() / l)
    };
    BourgainDiagnostics {
        tail_start,
        pace_ratio_min: min(&mut tail
            .clone()
            .filter(|&k| k >= 2)
            .filter_map(|k| pace(elems, k - 1).map(|p| delta(k) / p.min(1.0)))),
        harmonic_ratio_min: min(&mut tail.clone().map(|k| k as f64 * delta(k))),
        sigma_over_log_final: (!elems.is_empty()).then(|| sigma_over_log(elems.len())).flatten(),
        sigma_over_log_min: min(&mut tail.filter_map(sigma_over_log)),
    }
}

/// Monte Carlo frequency of s-dependence for uniform selections.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DependenceEstimate {
    pub s: u32,
    pub ell: u64,
    pub set_size: u64,
    pub trials: u64,
    pub dependent: u64,
    pub frequency: f64,
    pub interval: WilsonInterval,
    /// `C(s) ℓ^{2s} / |E|`.
    pub bound: f64,
}

impl DependenceEstimate {
    /// `frequency ≤ bound + z_mult · half_width`.
    pub fn within_bound(&self, half_widths: f64) -> bool {
        self.frequency <= self.bound + half_widths * self.interval.half_width
    }
}

/// Fraction of `trials` uniform selections of density `ℓ/|E|` that are
/// s-dependent, with a 99% Wilson interval. Trial `i` uses
/// `derive_seed(seed, i)`.
pub fn monte_carlo_dependence(set: &IntegerSet, ell: u64, s: u32, trials: u64, seed: u64) -> Result<DependenceEstimate> {
    let size = set.len() as u64;
    let bound = dependence_probability_bound(s, ell, size)?;
    let delta = if size == 0 { 0.0 } else { f64::ratio(ell, size) };
    let schedule = DensitySchedule::uniform(set, delta)?;
    let outcomes: Vec<Result<bool>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let trial = select_unchecked(set, &schedule, derive_seed(seed, t));
            Ok(!is_s_independent(&trial.selected, s)?.independent)
        })
        .collect();
    let mut dependent = 0u64;
    for o in outcomes {
        dependent += u64::from(o?);
    }
    Ok(DependenceEstimate {
        s,
        ell,
        set_size: size,
        trials,
        dependent,
        frequency: if trials == 0 { 0.0 } else { dependent as f64 / trials as f64 },
        interval: wilson_interval(dependent, trials, Z_99),
        bound,
    })
}

/// Mean block counts `|E'_k|` over seeds, for law-of-large-numbers checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockCountStats {
    pub k: usize,
    pub ell: u64,
    pub size: u64,
    pub mean: f64,
    pub standard_error: f64,
}

pub fn block_count_stats(trials: &[SelectionTrial]) -> Vec<BlockCountStats> {
    let Some(first) = trials.first().and_then(|t| t.block_counts.as_ref()) else {
        return Vec::new();
    };
    let n = trials.len() as f64;
    first
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let counts: Vec<f64> = trials
                .iter()
                .map(|t| t.block_counts.as_ref().map_or(0, |c| c[i].selected) as f64)
                .collect();
            let mean = counts.iter().sum::<f64>() / n;
            let var = if trials.len() > 1 {
                counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            BlockCountStats {
                k: b.k,
                ell: b.ell,
                size: b.size,
                mean,
                standard_error: (var / n).sqrt(),
            }
        })
        .collect()
}

/// Expected size `Σ δ_n` of the selection, as `f64`.
pub fn expected_size<T: Scalar>(schedule: &DensitySchedule<T>) -> f64 {
    schedule.sigma.last().map_or(0.0, Scalar::to_f64_lossy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integer_sets::{generate_powers, generate_range};
    use crate::partitions::{decompose, GrossSchedule, Partition, DEFAULT_GROSS_RATIO};
    use crate::Rational;
    use num_traits::One;

    #[test]
    fn certain_and_impossible_selections() {
        let e = generate_range(1, 100);
        let all = select(&e, &DensitySchedule::uniform(&e, 1.0).unwrap(), 3).unwrap();
        assert_eq!(all.selected.elements(), e.elements());
        let none = select(&e, &DensitySchedule::uniform(&e, 0.0).unwrap(), 3).unwrap();
        assert!(none.selected.is_empty());
    }

    #[test]
    fn selection_is_reproducible_and_exact_matches_float() {
        let e = generate_range(1, 2000);
        let f = DensitySchedule::uniform(&e, 0.25f64).unwrap();
        let x = DensitySchedule::uniform(&e, Rational::ratio(1, 4)).unwrap();
        let a = select(&e, &f, 11).unwrap();
        assert_eq!(a, select(&e, &f, 11).unwrap());
        assert_eq!(a.indices, select(&e, &x, 11).unwrap().indices);
        assert_ne!(a.indices, select(&e, &f, 12).unwrap().indices);
    }

    #[test]
    fn misaligned_schedule_is_rejected() {
        let e = generate_range(1, 10);
        let other = generate_range(2, 11);
        let s = DensitySchedule::uniform(&other, 0.5).unwrap();
        assert!(matches!(select(&e, &s, 0), Err(Error::MisalignedSchedule(_))));
        assert!(DensitySchedule::from_deltas(&e, vec![0.5; 9]).is_err());
        assert!(DensitySchedule::from_deltas(&e, vec![1.5; 10]).is_err());
    }

    #[test]
    fn half_density_sizes_concentrate() {
        let e = generate_range(1, 10_000);
        let s = DensitySchedule::uniform(&e, 0.5).unwrap();
        let inside = (0..1000u64)
            .filter(|&seed| {
                let n = select(&e, &s, seed).unwrap().selected.len();
                (4700..=5300).contains(&n)
            })
            .count();
        assert!(inside >= 990, "{inside}");
    }

    #[test]
    fn blockwise_schedules() {
        let e = generate_range(1, 1 << 10);
        let d = decompose(&e, &Partition::dyadic(10).unwrap());
        let full: DensitySchedule<Rational> = blockwise_schedule(&d, &capped_budgets(&d, |_| u64::MAX)).unwrap();
        assert!(full.deltas().iter().all(|x| *x == Rational::one()));
        let zero: DensitySchedule<f64> = blockwise_schedule(&d, &[0; 11]).unwrap();
        assert!(zero.deltas().iter().all(|&x| x == 0.0));

        let ells: Vec<u64> = (0..=10).collect();
        let s: DensitySchedule<Rational> = blockwise_schedule(&d, &ells).unwrap();
        for b in s.blocks().unwrap().iter().filter(|b| b.k >= 1) {
            assert_eq!(b.size, 1 << (b.k - 1));
            assert_eq!(b.delta, Rational::ratio(b.k as u64, 1 << (b.k - 1)));
        }
        let too_many = vec![5u64; 11];
        assert!(matches!(
            blockwise_schedule::<f64>(&d, &too_many),
            Err(Error::BudgetExceedsBlock { k: 0, .. })
        ));
    }

    #[test]
    fn sigma_is_recomputable() {
        let e = generate_range(1, 50);
        let d = decompose(&e, &Partition::dyadic(6).unwrap());
        let s: DensitySchedule<Rational> = blockwise_schedule(&d, &capped_budgets(&d, |k| k as u64)).unwrap();
        let mut acc = Rational::zero();
        for (k, delta) in s.deltas().iter().enumerate() {
            acc += delta.clone();
            assert_eq!(s.sigma_at(k + 1), acc);
        }
        assert_eq!(s.sigma_at(0), Rational::zero());
    }

    #[test]
    fn katznelson_li_budgets() {
        let e = generate_range(-3000, 3000);
        let d = decompose(&e, &Partition::gross(4, &GrossSchedule::Factorial, DEFAULT_GROSS_RATIO).unwrap());
        let (s, report) = katznelson_li_schedule::<Rational>(&d).unwrap();
        let ells: Vec<u64> = report.rows.iter().map(|r| r.ell).collect();
        // |E_0| = 3, |E_1| = 2 and |E_2| = 4 cap the budget; |E_3| = 120 = 5!
        assert_eq!(ells, vec![2, 2, 4, 120, 720]);
        assert!(report.rows[1].capped && !report.rows[3].capped);
        let b3 = &s.blocks().unwrap()[3];
        assert_eq!(b3.delta, Rational::ratio(120, b3.size));
        assert!(report.rows[4].ell_over_log_next_cut.is_none());

        let dyadic = decompose(&e, &Partition::dyadic(4).unwrap());
        assert!(katznelson_li_schedule::<f64>(&dyadic).is_err());
    }

    #[test]
    fn power_law_schedule_and_diagnostics() {
        let sq = generate_powers(2, 10_000).unwrap();
        let (s, diag) = bourgain_schedule::<f64>(&sq, &BourgainForm::PowerLaw { alpha: 1.0 }, 10).unwrap();
        assert!(s.is_nonincreasing());
        assert!((diag.harmonic_ratio_min.unwrap() - 1.0).abs() < 1e-12);
        let sigma = s.sigma_at(10_000);
        assert!((sigma - 9.787_606).abs() < 1e-5, "{sigma}");
        let ratio = diag.sigma_over_log_final.unwrap();
        assert!((ratio - 9.787_606 / (1e8f64).ln()).abs() < 1e-5, "{ratio}");

        let (ones, _) = bourgain_schedule::<Rational>(&sq, &BourgainForm::PowerLaw { alpha: 0.0 }, 1).unwrap();
        assert!(ones.deltas().iter().all(|d| *d == Rational::one()));
        assert!(bourgain_schedule::<f64>(&sq, &BourgainForm::PowerLaw { alpha: 1.5 }, 1).is_err());
    }

    #[test]
    fn pace_based_schedule_dominates_pace() {
        let sq = generate_powers(2, 500).unwrap();
        let (s, diag) = bourgain_schedule::<f64>(&sq, &BourgainForm::PaceBased, 2).unwrap();
        assert!(s.is_nonincreasing());
        assert!(diag.pace_ratio_min.unwrap() >= 1.0 - 1e-12, "{diag:?}");
    }

    #[test]
    fn increasing_custom_schedule_is_an_error() {
        let e = generate_range(1, 4);
        let custom = BourgainForm::Custom(vec![0.5, 0.25, 0.5, 0.1]);
        assert_eq!(
            bourgain_schedule(&e, &custom, 1).unwrap_err(),
            Error::IncreasingSchedule { index: 2 }
        );
    }

    #[test]
    fn monte_carlo_edge_cases() {
        let e = generate_range(1, 64);
        let none = monte_carlo_dependence(&e, 0, 2, 50, 1).unwrap();
        assert_eq!(none.dependent, 0);
        let tiny = IntegerSet::from_i64("t", [1, 2, 3]);
        let all = monte_carlo_dependence(&tiny, 3, 2, 50, 1).unwrap();
        assert_eq!(all.frequency, 1.0);
        assert_eq!(all, monte_carlo_dependence(&tiny, 3, 2, 50, 1).unwrap());
    }

    #[test]
    fn bitmap_marks_selected_positions() {
        let e = generate_range(1, 10);
        let t = select(&e, &DensitySchedule::uniform(&e, 1.0).unwrap(), 0).unwrap();
        assert_eq!(t.bitmap_hex(), "ff03");
        assert_eq!(t.selected_in_prefix(4), 4);
    }
}
