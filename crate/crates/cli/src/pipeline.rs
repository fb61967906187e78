//! End-to-end experiments: block independence and the combined
//! independence/equidistribution run.

use anyhow::Result;
use lacunary::equidistribution::{
    equidistribution_scan, log_spaced, psi, sample_points, Exclusion, PsiValue, ScanReport,
};
use lacunary::integer_sets::{classify_growth, FitRange, DEFAULT_GROWTH_MARGIN};
use lacunary::partitions::decompose;
use lacunary::random_selection::{
    blockwise_schedule, budget_report, select, BlockDensity, DensitySchedule, SelectionTrial,
};
use lacunary::relations::{dependence_probability_bound, is_s_independent};
use lacunary::rng::derive_seed;
use lacunary::stats::{wilson_interval, WilsonInterval, Z_99};
use lacunary::{BlockDecomposition, Error, IntegerSet};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, PipelineKind};
use crate::record::{now_ms, Check, ExperimentRecord};
use crate::PreconditionError;

/// Budgets `ℓ_k` for every block: the nominal budget, capped at `|E_k|` when
/// the config allows it.
pub fn budgets(config: &ExperimentConfig, decomposition: &BlockDecomposition) -> Result<Vec<u64>> {
    decomposition
        .blocks
        .iter()
        .map(|b| {
            let size = b.len() as u64;
            match config.budget.nominal(b.k) {
                None => Ok(size),
                Some(ell) if ell <= size => Ok(ell),
                Some(_) if config.cap_budgets => Ok(size),
                Some(ell) => Err(Error::BudgetExceedsBlock { k: b.k, ell, size }.into()),
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockIndependenceRow {
    pub k: usize,
    pub s: u32,
    pub ell: u64,
    pub size: u64,
    pub trials: u64,
    pub dependent: u64,
    pub frequency: f64,
    pub interval: WilsonInterval,
    /// `C(s) ℓ_k^{2s} / |E_k|`.
    pub bound: f64,
    pub within_bound: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailIndependence {
    pub s: u32,
    pub tail_start: usize,
    /// Seeds in which every tail block of `E'` is s-independent.
    pub independent_seeds: u64,
    pub trials: u64,
    pub frequency: f64,
    pub interval: WilsonInterval,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockCountRow {
    pub k: usize,
    pub ell: u64,
    pub expected: f64,
    pub mean: f64,
    pub standard_error: f64,
    /// `|mean − expected| / standard_error`; zero when both vanish.
    pub z: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockSummaryRow {
    pub k: usize,
    pub ell: u64,
    pub size: u64,
    pub delta: f64,
}

/// Outcome of one seed.
struct SeedRun {
    /// `dependent[block][s_index]`.
    dependent: Vec<Vec<bool>>,
    counts: Vec<u64>,
    /// `None` where no element of the prefix was selected.
    psi: Vec<Option<PsiValue>>,
    trial: Option<SelectionTrial>,
}

fn block_selection(set: &IntegerSet, trial: &SelectionTrial, block: &BlockDensity<f64>) -> IntegerSet {
    let lo = trial.indices.partition_point(|&i| i < block.start);
    let hi = trial.indices.partition_point(|&i| i < block.end);
    let elems = set.elements();
    IntegerSet::new(
        format!("E'_{}", block.k),
        trial.indices[lo..hi].iter().map(|&i| elems[i].clone()),
    )
}

fn run_seed(
    config: &ExperimentConfig,
    set: &IntegerSet,
    schedule: &DensitySchedule<f64>,
    psi_ks: &[usize],
    t: u64,
) -> Result<SeedRun> {
    let trial = select(set, schedule, derive_seed(config.seed, t))?;
    let blocks = schedule.blocks().unwrap_or_default();
    let mut dependent = Vec::with_capacity(blocks.len());
    let mut counts = Vec::with_capacity(blocks.len());
    for b in blocks {
        let chosen = block_selection(set, &trial, b);
        counts.push(chosen.len() as u64);
        dependent.push(
            config
                .s
                .iter()
                .map(|&s| Ok(!is_s_independent(&chosen, s)?.independent))
                .collect::<Result<Vec<bool>>>()?,
        );
    }
    let psi = psi_ks
        .iter()
        .map(|&k| match psi(set, &trial, schedule, k, config.grid_cap) {
            Ok(v) => Ok(Some(v)),
            Err(Error::PsiUndefined(_)) => Ok(None),
            Err(e) => Err(e.into()),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SeedRun {
        dependent,
        counts,
        psi,
        trial: (t == 0).then_some(trial),
    })
}

struct Prepared {
    set: IntegerSet,
    decomposition: BlockDecomposition,
    ells: Vec<u64>,
    schedule: DensitySchedule<f64>,
}

fn prepare(config: &ExperimentConfig, record: &mut ExperimentRecord) -> Result<Prepared> {
    let set = config.source.build()?;
    if config.require_polynomial_growth {
        let growth = classify_growth(&set, &FitRange::tail(&set), DEFAULT_GROWTH_MARGIN)?;
        record.stage("growth", &growth)?;
        if !growth.is_polynomial {
            return Err(PreconditionError::new(
                "source does not have polynomial growth",
                serde_json::to_value(&growth)?,
            )
            .into());
        }
    }
    let partition = config.partition.build()?;
    let decomposition = decompose(&set, &partition);
    record.stage("decomposition", decomposition.summary(false))?;
    let ells = budgets(config, &decomposition)?;
    let nominal = |k: usize| config.budget.nominal(k).unwrap_or(u64::MAX);
    record.stage("budgets", budget_report(&decomposition, &ells, nominal))?;
    let schedule: DensitySchedule<f64> = blockwise_schedule(&decomposition, &ells)?;
    let blocks: Vec<BlockSummaryRow> = schedule
        .blocks()
        .unwrap_or_default()
        .iter()
        .map(|b| BlockSummaryRow {
            k: b.k,
            ell: b.ell,
            size: b.size,
            delta: b.delta,
        })
        .collect();
    record.stage(
        "schedule",
        serde_json::json!({
            "blocks": blocks,
            "sigma_total": schedule.sigma().last().copied().unwrap_or(0.0),
        }),
    )?;
    Ok(Prepared {
        set,
        decomposition,
        ells,
        schedule,
    })
}

/// `[⌈K/4⌉, K]` for `K = |E|` unless the config lists indices.
pub fn psi_indices(config: &ExperimentConfig, set_len: usize) -> Vec<usize> {
    if !config.psi_ks.is_empty() {
        return config.psi_ks.clone();
    }
    let quarter = set_len.div_ceil(4);
    if quarter == set_len {
        vec![set_len]
    } else {
        vec![quarter, set_len]
    }
}

/// Runs the configured pipeline.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentRecord> {
    config.validate()?;
    let mut record = ExperimentRecord::new(config, now_ms());
    let p = prepare(config, &mut record)?;
    let with_psi = config.pipeline == PipelineKind::MainTheorem;
    let psi_ks = if with_psi { psi_indices(config, p.set.len()) } else { Vec::new() };

    let runs = (0..config.trials)
        .into_par_iter()
        .map(|t| run_seed(config, &p.set, &p.schedule, &psi_ks, t))
        .collect::<Result<Vec<_>>>()?;

    independence_stage(config, &p, &runs, &mut record)?;
    block_count_stage(&p, &runs, &mut record)?;
    if with_psi {
        psi_stage(config, &psi_ks, &runs, &mut record)?;
        if let Some(trial) = runs.first().and_then(|r| r.trial.as_ref()) {
            record.stage("scan", scan_selection(config, &trial.selected)?)?;
        }
    }
    record.finish();
    Ok(record)
}

fn independence_stage(
    config: &ExperimentConfig,
    p: &Prepared,
    runs: &[SeedRun],
    record: &mut ExperimentRecord,
) -> Result<()> {
    let trials = runs.len() as u64;
    let h = config.thresholds.bound_half_widths;
    let mut rows = Vec::new();
    for (bi, b) in p.decomposition.blocks.iter().enumerate() {
        for (si, &s) in config.s.iter().enumerate() {
            let dependent = runs.iter().filter(|r| r.dependent[bi][si]).count() as u64;
            let size = b.len() as u64;
            let bound = if s >= 2 { dependence_probability_bound(s, p.ells[bi], size)? } else { 0.0 };
            let frequency = dependent as f64 / trials as f64;
            let interval = wilson_interval(dependent, trials, Z_99);
            rows.push(BlockIndependenceRow {
                k: b.k,
                s,
                ell: p.ells[bi],
                size,
                trials,
                dependent,
                frequency,
                within_bound: frequency <= bound + h * interval.half_width,
                interval,
                bound,
            });
        }
    }
    let tail: Vec<TailIndependence> = config
        .s
        .iter()
        .enumerate()
        .map(|(si, &s)| {
            let independent_seeds = runs
                .iter()
                .filter(|r| {
                    p.decomposition
                        .blocks
                        .iter()
                        .enumerate()
                        .filter(|(_, b)| b.k >= config.tail_start)
                        .all(|(bi, _)| !r.dependent[bi][si])
                })
                .count() as u64;
            TailIndependence {
                s,
                tail_start: config.tail_start,
                independent_seeds,
                trials,
                frequency: independent_seeds as f64 / trials as f64,
                interval: wilson_interval(independent_seeds, trials, Z_99),
            }
        })
        .collect();

    for s in &config.s {
        let tail_rows: Vec<&BlockIndependenceRow> =
            rows.iter().filter(|r| r.s == *s && r.k >= config.tail_start).collect();
        let worst = tail_rows
            .iter()
            .map(|r| r.frequency - r.bound - h * r.interval.half_width)
            .fold(f64::NEG_INFINITY, f64::max);
        record.check(Check {
            name: format!("block frequencies within bound (s = {s})"),
            holds: tail_rows.iter().all(|r| r.within_bound),
            observed: if tail_rows.is_empty() { 0.0 } else { worst },
            required: 0.0,
            detail: format!(
                "max over blocks k >= {} of frequency - bound - {h} half-widths",
                config.tail_start
            ),
        });
    }
    for t in &tail {
        record.check(Check {
            name: format!("tail blocks independent (s = {})", t.s),
            holds: t.frequency >= config.thresholds.independence_frequency,
            observed: t.frequency,
            required: config.thresholds.independence_frequency,
            detail: format!(
                "{} of {} seeds, 99% Wilson [{:.4}, {:.4}]",
                t.independent_seeds, t.trials, t.interval.lower, t.interval.upper
            ),
        });
    }
    record.stage("independence", serde_json::json!({ "blocks": rows, "tail": tail }))
}

fn block_count_stage(p: &Prepared, runs: &[SeedRun], record: &mut ExperimentRecord) -> Result<()> {
    let n = runs.len() as f64;
    let rows: Vec<BlockCountRow> = p
        .schedule
        .blocks()
        .unwrap_or_default()
        .iter()
        .enumerate()
        .map(|(bi, b)| {
            let counts: Vec<f64> = runs.iter().map(|r| r.counts[bi] as f64).collect();
            let mean = counts.iter().sum::<f64>() / n;
            let var = if runs.len() > 1 {
                counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            let standard_error = (var / n).sqrt();
            let expected = b.delta * b.size as f64;
            let gap = (mean - expected).abs();
            BlockCountRow {
                k: b.k,
                ell: b.ell,
                expected,
                mean,
                standard_error,
                z: if gap < 1e-9 { 0.0 } else { gap / standard_error },
            }
        })
        .collect();
    let worst = rows.iter().map(|r| r.z).fold(0.0, f64::max);
    record.check(Check {
        name: "block counts match budgets".into(),
        holds: worst <= MAX_COUNT_Z,
        observed: worst,
        required: MAX_COUNT_Z,
        detail: "max over blocks of |mean |E'_k| - expected| / standard error".into(),
    });
    record.stage("block_counts", rows)
}

/// Largest tolerated standard score of a mean block count.
const MAX_COUNT_Z: f64 = 4.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiSeedRow {
    pub seed: u64,
    pub values: Vec<Option<PsiValue>>,
}

fn psi_stage(config: &ExperimentConfig, ks: &[usize], runs: &[SeedRun], record: &mut ExperimentRecord) -> Result<()> {
    let rows: Vec<PsiSeedRow> = runs
        .iter()
        .enumerate()
        .map(|(t, r)| PsiSeedRow {
            seed: derive_seed(config.seed, t as u64),
            values: r.psi.clone(),
        })
        .collect();
    if ks.len() >= 2 {
        let decays = runs
            .iter()
            .filter(|r| match (&r.psi[0], &r.psi[r.psi.len() - 1]) {
                (Some(first), Some(last)) => last.value() < first.value(),
                _ => false,
            })
            .count() as u64;
        let trials = runs.len() as u64;
        let frequency = decays as f64 / trials as f64;
        let interval = wilson_interval(decays, trials, Z_99);
        let certified = runs.iter().flat_map(|r| &r.psi).flatten().all(|v| v.grid.certified);
        record.check(Check {
            name: format!("psi({}) < psi({})", ks[ks.len() - 1], ks[0]),
            holds: frequency >= config.thresholds.psi_decay_frequency,
            observed: frequency,
            required: config.thresholds.psi_decay_frequency,
            detail: format!(
                "{decays} of {trials} seeds, 99% Wilson [{:.4}, {:.4}], grids {}",
                interval.lower,
                interval.upper,
                if certified { "certified" } else { "capped" }
            ),
        });
    }
    record.stage("psi", serde_json::json!({ "ks": ks, "grid_cap": config.grid_cap, "seeds": rows }))
}

pub fn scan_selection(config: &ExperimentConfig, selected: &IntegerSet) -> Result<ScanReport> {
    let points = sample_points(config.scan.sample_denominator, &config.scan.sqrt_points);
    let exclusion = Exclusion {
        max_denominator: config.scan.exclusion_denominator,
        radius_constant: config.scan.exclusion_radius,
    };
    let ks = log_spaced(selected.len(), config.scan.checkpoints_per_decade);
    Ok(equidistribution_scan(selected, &ks, &points, exclusion)?)
}

/// `(k, ψ(k))` rows of every seed, for plotting.
pub fn psi_csv(record: &ExperimentRecord) -> Option<String> {
    let seeds = record.stages.get("psi")?.get("seeds")?.as_array()?;
    let mut out = String::from("seed,k,psi,bound,certified\n");
    for s in seeds {
        let row: PsiSeedRow = serde_json::from_value(s.clone()).ok()?;
        for v in row.values.into_iter().flatten() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                row.seed, v.k, v.grid.sup, v.grid.bound, v.grid.certified
            ));
        }
    }
    Some(out)
}

/// `k,s,frequency,bound` rows.
pub fn independence_csv(record: &ExperimentRecord) -> Option<String> {
    let rows = record.stages.get("independence")?.get("blocks")?.as_array()?;
    let mut out = String::from("k,s,ell,size,frequency,lower,upper,bound\n");
    for r in rows {
        let r: BlockIndependenceRow = serde_json::from_value(r.clone()).ok()?;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.k, r.s, r.ell, r.size, r.frequency, r.interval.lower, r.interval.upper, r.bound
        ));
    }
    Some(out)
}
