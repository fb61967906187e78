//! Finite integer sets ordered by absolute value, sequence generators and
//! growth classification.

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::log2_magnitude;

/// Total order used for every [`IntegerSet`]: by `|n|`, and `-n` before `n`.
pub fn abs_order(a: &BigInt, b: &BigInt) -> Ordering {
    a.magnitude().cmp(b.magnitude()).then_with(|| a.cmp(b))
}

/// A finite set `E = {n_1, n_2, …}` with `|n_1| ≤ |n_2| ≤ …`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegerSet {
    #[serde(default)]
    label: String,
    #[serde(with = "crate::serde_decimal::vec")]
    elements: Vec<BigInt>,
}

impl IntegerSet {
    /// Builds a set from arbitrary values; duplicates collapse.
    pub fn new(label: impl Into<String>, values: impl IntoIterator<Item = BigInt>) -> Self {
        Self::with_duplicate_count(label, values).0
    }

    /// Like [`IntegerSet::new`] but also returns how many duplicates collapsed.
    pub fn with_duplicate_count(
        label: impl Into<String>,
        values: impl IntoIterator<Item = BigInt>,
    ) -> (Self, usize) {
        let mut elements: Vec<BigInt> = values.into_iter().collect();
        let before = elements.len();
        elements.sort_by(abs_order);
        elements.dedup();
        let collapsed = before - elements.len();
        (
            Self {
                label: label.into(),
                elements,
            },
            collapsed,
        )
    }

    pub fn from_i64(label: impl Into<String>, values: impl IntoIterator<Item = i64>) -> Self {
        Self::new(label, values.into_iter().map(BigInt::from))
    }

    /// Trusts that `elements` is already strictly increasing in [`abs_order`].
    pub(crate) fn from_sorted_unchecked(label: impl Into<String>, elements: Vec<BigInt>) -> Self {
        debug_assert!(elements
            .windows(2)
            .all(|w| abs_order(&w[0], &w[1]) == Ordering::Less));
        Self {
            label: label.into(),
            elements,
        }
    }

    pub fn empty(label: impl Into<String>) -> Self {
        Self::from_sorted_unchecked(label, Vec::new())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn elements(&self) -> &[BigInt] {
        &self.elements
    }

    pub fn into_elements(self) -> Vec<BigInt> {
        self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, n: &BigInt) -> bool {
        self.elements
            .binary_search_by(|probe| abs_order(probe, n))
            .is_ok()
    }

    pub fn max_abs(&self) -> Option<BigUint> {
        self.elements.last().map(|n| n.magnitude().clone())
    }

    /// The first `k` elements `{n_1, …, n_k}`.
    pub fn prefix(&self, k: usize) -> IntegerSet {
        let k = k.min(self.len());
        Self::from_sorted_unchecked(self.label.clone(), self.elements[..k].to_vec())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.elements.iter().all(|n| !n.is_negative())
    }

    pub fn is_positive(&self) -> bool {
        self.elements.iter().all(|n| n.is_positive())
    }

    /// Machine-word copy of the elements, when they all fit.
    pub fn to_i64_vec(&self) -> Option<Vec<i64>> {
        self.elements.iter().map(|n| n.to_i64()).collect()
    }

    /// `E[t] = |E ∩ [-t, t]|`.
    pub fn distribution_function(&self, t: &BigUint) -> usize {
        self.elements.partition_point(|n| n.magnitude() <= t)
    }

    pub fn distribution_at(&self, t: u64) -> usize {
        self.distribution_function(&BigUint::from(t))
    }

    /// One integer per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for n in &self.elements {
            let _ = writeln!(out, "{n}");
        }
        out
    }

    /// Parses one integer per line; blank lines and `#` comments are skipped.
    pub fn from_text(label: impl Into<String>, text: &str) -> Result<Self> {
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let n = line.parse::<BigInt>().map_err(|e| {
                Error::InvalidArgument(format!("line {}: {e}: {line:?}", lineno + 1))
            })?;
            values.push(n);
        }
        Ok(Self::new(label, values))
    }
}

/// A generated set together with the number of values that collapsed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generated {
    pub set: IntegerSet,
    pub collapsed: usize,
}

/// `{P(1), …, P(k_max)}` where `coefficients[i]` multiplies `k^i`.
pub fn generate_polynomial(coefficients: &[BigInt], k_max: u64) -> Result<Generated> {
    let degree = coefficients.iter().rposition(|c| !c.is_zero());
    if degree.unwrap_or(0) == 0 {
        return Err(Error::DegeneratePolynomial);
    }
    let values = (1..=k_max).map(|k| {
        let k = BigInt::from(k);
        coefficients
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * &k + c)
    });
    let label = format!("polynomial{:?}", coefficients.iter().map(|c| c.to_string()).collect::<Vec<_>>());
    let (set, collapsed) = IntegerSet::with_duplicate_count(label, values);
    Ok(Generated { set, collapsed })
}

/// `{k^d : 1 ≤ k ≤ k_max}`.
pub fn generate_powers(d: u32, k_max: u64) -> Result<IntegerSet> {
    let mut coefficients = vec![BigInt::zero(); d as usize + 1];
    coefficients[d as usize] = BigInt::one();
    Ok(generate_polynomial(&coefficients, k_max)?
        .set
        .with_label(format!("powers(d={d},k<={k_max})")))
}

/// Odd-only segmented sieve of Eratosthenes; all primes `≤ limit`.
pub fn sieve_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let mut root = (limit as f64).sqrt() as u64;
    while root * root > limit {
        root -= 1;
    }
    while (root + 1) * (root + 1) <= limit {
        root += 1;
    }

    // Base primes up to sqrt(limit) with a plain sieve.
    let mut small = vec![true; root as usize + 1];
    let mut base = Vec::new();
    for i in 2..=root as usize {
        if small[i] {
            base.push(i as u64);
            let mut j = i * i;
            while j <= root as usize {
                small[j] = false;
                j += i;
            }
        }
    }

    const SEGMENT: u64 = 1 << 18;
    let mut primes = vec![2u64];
    let mut seg = vec![true; SEGMENT as usize];
    let mut lo = 3u64;
    while lo <= limit {
        // segment covers odd numbers lo, lo+2, …
        let hi = (lo + 2 * SEGMENT - 1).min(limit);
        let count = ((hi - lo) / 2 + 1) as usize;
        seg[..count].iter_mut().for_each(|b| *b = true);
        for &p in base.iter().skip(1) {
            if p * p > hi {
                break;
            }
            let mut start = (p * p).max(lo.div_ceil(p) * p);
            if start % 2 == 0 {
                start += p;
            }
            let mut idx = ((start - lo) / 2) as usize;
            while idx < count {
                seg[idx] = false;
                idx += p as usize;
            }
        }
        primes.extend(
            seg[..count]
                .iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(i, _)| lo + 2 * i as u64),
        );
        if hi == limit {
            break;
        }
        // hi = lo + 2 * SEGMENT - 1 is even here
        lo = hi + 1;
    }
    primes
}

/// All primes `≤ limit`; empty when `limit < 2`.
pub fn generate_primes(limit: u64) -> IntegerSet {
    let primes = sieve_primes(limit).into_iter().map(BigInt::from).collect();
    IntegerSet::from_sorted_unchecked(format!("primes(<={limit})"), primes)
}

/// `{base^1, …, base^k_max}`.
pub fn generate_geometric(base: u64, k_max: u32) -> Result<IntegerSet> {
    if base < 2 {
        return Err(Error::InvalidArgument(format!("geometric base {base} < 2")));
    }
    let b = BigInt::from(base);
    let mut current = BigInt::one();
    let mut elements = Vec::with_capacity(k_max as usize);
    for _ in 0..k_max {
        current *= &b;
        elements.push(current.clone());
    }
    Ok(IntegerSet::from_sorted_unchecked(
        format!("geometric(base={base},k<={k_max})"),
        elements,
    ))
}

/// `{lo, lo+1, …, hi}`.
pub fn generate_range(lo: i64, hi: i64) -> IntegerSet {
    IntegerSet::from_i64(format!("range[{lo},{hi}]"), lo..=hi)
}

/// `F = ∪_{k < levels} (2^{2^{2k}}, 2^{2^{2k}+1}]`: polynomial growth but
/// `F[2t] = F[t]` on long stretches.
pub fn generate_irregular(levels: u32) -> Result<IntegerSet> {
    if levels > 3 {
        return Err(Error::InvalidArgument(format!(
            "irregular set with {levels} levels needs 2^{} elements",
            1u64 << (2 * (levels - 1))
        )));
    }
    let mut values = Vec::new();
    for k in 0..levels {
        let e = 1u64 << (2 * k);
        let lo = 1u64 << e;
        values.extend((lo + 1..=2 * lo).map(BigInt::from));
    }
    Ok(IntegerSet::new(format!("irregular(levels={levels})"), values))
}

/// All sums of `j` distinct elements of a strictly positive base, deduplicated.
pub fn generate_sumset(base: &IntegerSet, j: usize) -> Result<IntegerSet> {
    if j == 0 || j > base.len() {
        return Err(Error::SumsetOrder {
            j,
            size: base.len(),
        });
    }
    if !base.is_positive() {
        return Err(Error::InvalidArgument(
            "sumset base must be strictly positive".into(),
        ));
    }
    let elems = base.elements();
    let mut sums = Vec::new();
    let mut stack: Vec<usize> = Vec::with_capacity(j);
    // iterative k-combination walk
    fn walk(elems: &[BigInt], j: usize, start: usize, acc: &BigInt, stack: &mut Vec<usize>, out: &mut Vec<BigInt>) {
        if stack.len() == j {
            out.push(acc.clone());
            return;
        }
        let remaining = j - stack.len();
        for i in start..=elems.len() - remaining {
            stack.push(i);
            walk(elems, j, i + 1, &(acc + &elems[i]), stack, out);
            stack.pop();
        }
    }
    walk(elems, j, 0, &BigInt::zero(), &mut stack, &mut sums);
    Ok(IntegerSet::new(format!("sumset(j={j}) of {}", base.label()), sums))
}

/// Closed range of `t` values over which growth is fitted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitRange {
    #[serde(with = "crate::serde_decimal::uint")]
    pub t_min: BigUint,
    #[serde(with = "crate::serde_decimal::uint")]
    pub t_max: BigUint,
}

impl FitRange {
    pub fn new(t_min: impl Into<BigUint>, t_max: impl Into<BigUint>) -> Self {
        Self {
            t_min: t_min.into(),
            t_max: t_max.into(),
        }
    }

    /// `[sqrt(max|n|), max|n| / 2]`: the upper half of the scale, in log terms.
    pub fn tail(set: &IntegerSet) -> Self {
        let max = set.max_abs().unwrap_or_default();
        Self {
            t_min: max.sqrt().max(BigUint::from(2u32)),
            t_max: &max >> 1u32,
        }
    }
}

/// Finite-data growth classification over a declared fit range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    /// `min log E[t] / log t` over the sampled `t`.
    pub epsilon_hat: f64,
    /// `min E[2t] / E[t]` over the sampled `t`.
    pub c_hat: f64,
    pub is_polynomial: bool,
    pub is_regular: bool,
    /// Effective range after clamping `t_max ≤ max|n| / 2`.
    pub fit_range: FitRange,
    pub samples: usize,
    pub margin: f64,
}

pub const DEFAULT_GROWTH_MARGIN: f64 = 0.05;
const GROWTH_SAMPLES: usize = 64;
const MIN_ELEMENTS_IN_RANGE: usize = 16;

/// Fits `E[t] ⪰ t^ε` and `E[2t] ≥ c E[t]` on log-spaced samples of `fit_range`.
pub fn classify_growth(set: &IntegerSet, fit_range: &FitRange, margin: f64) -> Result<GrowthReport> {
    let max = set
        .max_abs()
        .ok_or_else(|| Error::InsufficientData("empty set".into()))?;
    let t_min = fit_range.t_min.clone().max(BigUint::from(2u32));
    let t_max = fit_range.t_max.clone().min(&max >> 1u32);
    if t_max <= t_min {
        return Err(Error::InsufficientData(format!(
            "fit range [{t_min}, {t_max}] is empty after clamping to max|n|/2"
        )));
    }
    let in_range = set.distribution_function(&t_max) - set.distribution_function(&t_min);
    if in_range < MIN_ELEMENTS_IN_RANGE {
        return Err(Error::InsufficientData(format!(
            "{in_range} elements in fit range, need {MIN_ELEMENTS_IN_RANGE}"
        )));
    }
    let lo = log2_magnitude(&t_min);
    let hi = log2_magnitude(&t_max);
    if hi > 1000.0 {
        return Err(Error::InvalidArgument("fit range beyond 2^1000".into()));
    }
    let mut epsilon_hat = f64::INFINITY;
    let mut c_hat = f64::INFINITY;
    let mut samples = 0;
    for i in 0..GROWTH_SAMPLES {
        let x = lo + (hi - lo) * i as f64 / (GROWTH_SAMPLES - 1) as f64;
        let t = num_traits::FromPrimitive::from_f64(x.exp2().floor())
            .unwrap_or_else(|| t_min.clone())
            .clamp(t_min.clone(), t_max.clone());
        let count = set.distribution_function(&t);
        let double = set.distribution_function(&(&t << 1u32));
        samples += 1;
        let eps = if count == 0 {
            0.0
        } else {
            (count as f64).ln() / (log2_magnitude(&t) * std::f64::consts::LN_2)
        };
        epsilon_hat = epsilon_hat.min(eps);
        if count > 0 {
            c_hat = c_hat.min(double as f64 / count as f64);
        }
    }
    if !c_hat.is_finite() {
        c_hat = 1.0;
    }
    let is_polynomial = epsilon_hat > margin;
    let is_regular = is_polynomial && c_hat > 1.0 + margin;
    Ok(GrowthReport {
        epsilon_hat,
        c_hat,
        is_polynomial,
        is_regular,
        fit_range: FitRange { t_min, t_max },
        samples,
        margin,
    })
}
