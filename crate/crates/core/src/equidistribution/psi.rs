//! The discrepancy `ψ(k)` between the mean over selected characters and the
//! `δ`-weighted mean over all of them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{sup_norm_via_grid, GridSup, SparsePolynomial};
use crate::error::{Error, Result};
use crate::integer_sets::IntegerSet;
use crate::numeric::ln_abs;
use crate::random_selection::{DensitySchedule, SelectionTrial};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiValue {
    pub k: usize,
    /// `|E' ∩ {n_1, …, n_k}|`.
    pub selected: usize,
    pub sigma: f64,
    pub log_n_k: f64,
    /// `a_k = (12 σ_k log|n_k|)^{1/2}`.
    pub a_k: f64,
    pub a_k_over_sigma: f64,
    /// Coarse-grid sup (the reported `ψ(k)`) with its `5×` bound.
    pub grid: GridSup,
}

impl PsiValue {
    pub fn value(&self) -> f64 {
        self.grid.sup
    }
}

/// The difference polynomial
/// `|E'_k|^{-1} Σ_{selected} e_n − σ_k^{-1} Σ_{j≤k} δ_{n_j} e_{n_j}`.
pub fn psi_polynomial<T: Scalar>(
    set: &IntegerSet,
    trial: &SelectionTrial,
    schedule: &DensitySchedule<T>,
    k: usize,
) -> Result<SparsePolynomial> {
    schedule.check_aligned(set)?;
    if trial.source_len != set.len() {
        return Err(Error::MisalignedSchedule(format!(
            "selection drawn from {} elements, set has {}",
            trial.source_len,
            set.len()
        )));
    }
    if k == 0 || k > set.len() {
        return Err(Error::InvalidArgument(format!("k = {k} outside 1..={}", set.len())));
    }
    let selected = trial.selected_in_prefix(k);
    if selected == 0 {
        return Err(Error::PsiUndefined(format!("no element among the first {k} is selected")));
    }
    let sigma = schedule.sigma_at(k);
    if !sigma.is_positive() {
        return Err(Error::PsiUndefined(format!("σ_{k} = 0")));
    }
    let inv_count = T::ratio(1, selected as u64);
    let chosen = &trial.indices[..selected];
    let elems = set.elements();
    let mut next = chosen.iter().peekable();
    let terms = (0..k).map(|j| {
        let mut c = -(schedule.deltas()[j].clone() / sigma.clone());
        if next.peek() == Some(&&j) {
            next.next();
            c = c + inv_count.clone();
        }
        (elems[j].clone(), Complex64::new(c.to_f64_lossy(), 0.0))
    });
    Ok(SparsePolynomial::new(terms))
}

/// `ψ(k)` on the coarse grid, with `a_k` for comparison against `σ_k`.
pub fn psi<T: Scalar>(
    set: &IntegerSet,
    trial: &SelectionTrial,
    schedule: &DensitySchedule<T>,
    k: usize,
    grid_cap: u64,
) -> Result<PsiValue> {
    let poly = psi_polynomial(set, trial, schedule, k)?;
    let sigma = schedule.sigma_at(k).to_f64_lossy();
    let log_n_k = ln_abs(&set.elements()[k - 1]);
    let a_k = (12.0 * sigma * log_n_k.max(0.0)).sqrt();
    Ok(PsiValue {
        k,
        selected: trial.selected_in_prefix(k),
        sigma,
        log_n_k,
        a_k,
        a_k_over_sigma: a_k / sigma,
        grid: sup_norm_via_grid(&poly, grid_cap),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiSeries {
    pub seed: u64,
    pub grid_cap: u64,
    pub values: Vec<PsiValue>,
}

impl PsiSeries {
    /// `k,psi,bound,a_k_over_sigma` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,psi,bound,certified,a_k_over_sigma\n");
        for v in &self.values {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                v.k, v.grid.sup, v.grid.bound, v.grid.certified, v.a_k_over_sigma
            ));
        }
        out
    }
}

pub fn psi_series<T: Scalar>(
    set: &IntegerSet,
    trial: &SelectionTrial,
    schedule: &DensitySchedule<T>,
    ks: &[usize],
    grid_cap: u64,
) -> Result<PsiSeries> {
    Ok(PsiSeries {
        seed: trial.seed,
        grid_cap,
        values: ks
            .iter()
            .map(|&k| psi(set, trial, schedule, k, grid_cap))
            .collect::<Result<_>>()?,
    })
}
