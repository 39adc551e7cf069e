//! The Hill-function subset-selection model.
//!
//! A rank-`r` word is kept in the subset with probability
//! `1 / (1 + (r / r_mid)^gamma)` — a decreasing Hill function of rank that
//! is 0.5 at `r_mid`. The expected subset rank of the word at full-set rank
//! `r` is the cumulative sum of that probability over `1..=r`; the
//! complement (non-selected) side uses the increasing Hill form. This module
//! fits `(r_mid, gamma)` to observed rank mappings by brute-force grid
//! search, runs the deterministic integer-crossing simulation that realizes
//! the model on a synthetic Zipf population, and computes the asymptotic
//! BRF exponent `beta = alpha / (gamma - 1)` the model predicts.

use serde::{Deserialize, Serialize};

use crate::corpus::{RankFrequencyTable, RankMapping, RankRecord};
use crate::error::{Error, Result};

/// Hill curve parameters: the half-selection rank and the steepness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HillParams {
    pub r_mid: f64,
    pub gamma: f64,
}

impl HillParams {
    pub fn new(r_mid: f64, gamma: f64) -> Result<Self> {
        if !(r_mid > 0.0) || !r_mid.is_finite() || !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidInput(format!(
                "Hill parameters must be positive finite reals, got r_mid={r_mid}, gamma={gamma}"
            )));
        }
        Ok(HillParams { r_mid, gamma })
    }
}

/// Which side of the selection the subset collects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    /// Words kept by the selection (the stopword side).
    Selected,
    /// Words the selection rejects (the non-stopword side).
    Complement,
}

impl std::str::FromStr for SelectionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "selected" => Ok(SelectionMode::Selected),
            "complement" => Ok(SelectionMode::Complement),
            other => Err(Error::InvalidInput(format!(
                "unknown mode `{other}` (expected selected or complement)"
            ))),
        }
    }
}

/// How a cumulative expected rank is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CumulativeMethod {
    /// Exact sum over integer ranks.
    Sum,
    /// Adaptive quadrature of the continuous relaxation over `[1, r]`.
    Integral,
}

fn check_rank(r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidInput(format!(
            "rank must be a positive real, got {r}"
        )));
    }
    Ok(())
}

/// Probability that the rank-`r` word is selected: the decreasing Hill
/// function `1 / (1 + (r / r_mid)^gamma)`. Strictly decreasing in `r`,
/// equal to 0.5 at `r = r_mid`.
pub fn prob_selected(r: f64, params: &HillParams) -> Result<f64> {
    check_rank(r)?;
    Ok(prob_selected_raw(r, params))
}

#[inline]
fn prob_selected_raw(r: f64, params: &HillParams) -> f64 {
    1.0 / (1.0 + (r / params.r_mid).powf(params.gamma))
}

/// Probability that the rank-`r` word is not selected. Computed as the
/// exact complement of [`prob_selected`], which algebraically equals the
/// increasing Hill form `1 / (1 + (r_mid / r)^gamma)` (Michaelis-Menten
/// `r / (r + r_mid)` at `gamma = 1`).
pub fn prob_not_selected(r: f64, params: &HillParams) -> Result<f64> {
    check_rank(r)?;
    Ok(1.0 - prob_selected_raw(r, params))
}

/// Expected subset rank of the word at full-set rank `r`: the cumulative
/// selection probability over ranks `1..=r`. Nondecreasing in `r` and
/// bounded by `r`.
pub fn cumulative_new_rank(r: u32, params: &HillParams, method: CumulativeMethod) -> Result<f64> {
    if r < 1 {
        return Err(Error::InvalidInput("rank must be >= 1".into()));
    }
    Ok(match method {
        CumulativeMethod::Sum => sum_selected(r, params),
        CumulativeMethod::Integral => {
            adaptive_simpson(|u| prob_selected_raw(u, params), 1.0, f64::from(r), 1e-8)
        }
    })
}

/// Expected complement rank of the word at full-set rank `r`. In sum mode
/// this is exactly `r - cumulative_new_rank(r)`, so the two cumulatives
/// partition `r` with no rounding gap.
pub fn cumulative_nonstop_rank(
    r: u32,
    params: &HillParams,
    method: CumulativeMethod,
) -> Result<f64> {
    if r < 1 {
        return Err(Error::InvalidInput("rank must be >= 1".into()));
    }
    Ok(match method {
        CumulativeMethod::Sum => f64::from(r) - sum_selected(r, params),
        CumulativeMethod::Integral => adaptive_simpson(
            |u| 1.0 - prob_selected_raw(u, params),
            1.0,
            f64::from(r),
            1e-8,
        ),
    })
}

fn sum_selected(r: u32, params: &HillParams) -> f64 {
    (1..=r).map(|u| prob_selected_raw(f64::from(u), params)).sum()
}

/// The BRF tail exponent implied by a Zipf full set with exponent `alpha`
/// filtered through a Hill selection with coefficient `gamma`:
/// `beta = alpha / (gamma - 1)`.
///
/// Requires `gamma > 1`; at or below 1 the tail of the cumulative diverges
/// and the asymptotic form does not hold.
pub fn predicted_beta(alpha: f64, gamma: f64) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidInput(format!(
            "alpha must be a positive real, got {alpha}"
        )));
    }
    if !(gamma > 1.0) || !gamma.is_finite() {
        return Err(Error::InvalidInput(format!(
            "predicted_beta needs gamma > 1, got {gamma}"
        )));
    }
    Ok(alpha / (gamma - 1.0))
}

/// A deterministic synthetic population: `n` word types whose counts follow
/// `round(top_count / r^alpha)`, floored at one token.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticZipfPopulation {
    pub n: u32,
    pub alpha: f64,
    pub top_count: u64,
}

impl SyntheticZipfPopulation {
    pub fn new(n: u32, alpha: f64, top_count: u64) -> Result<Self> {
        if n < 1 || top_count < 1 {
            return Err(Error::InvalidInput(
                "population needs n >= 1 and top_count >= 1".into(),
            ));
        }
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "population alpha must be a positive real, got {alpha}"
            )));
        }
        Ok(SyntheticZipfPopulation { n, alpha, top_count })
    }

    /// Token count of the rank-`r` word.
    pub fn count_at(&self, r: u32) -> u64 {
        let c = (self.top_count as f64 / f64::from(r).powf(self.alpha)).round();
        (c as u64).max(1)
    }

    /// The full population as a rank-frequency table with synthetic words
    /// `w1, w2, ..`.
    pub fn to_table(&self) -> RankFrequencyTable {
        let records = (1..=self.n)
            .map(|r| RankRecord {
                rank: r,
                word: format!("w{r}"),
                count: self.count_at(r),
            })
            .collect();
        RankFrequencyTable::from_records(records).expect("population counts are non-increasing")
    }
}

/// A simulated subset: its re-ranked table and the (r, r_new) mapping back
/// to the population.
#[derive(Debug, Clone)]
pub struct SimulatedSubset {
    pub table: RankFrequencyTable,
    pub mapping: RankMapping,
}

/// Walks the population from rank 1 to `n` and keeps rank `r` whenever the
/// cumulative expected subset rank crosses a new integer (its floor
/// strictly exceeds the floor at `r - 1`). Complement mode keeps exactly
/// the ranks the selection drops, so the two modes always partition the
/// population. The subset table is re-ranked `1..=size` with the population
/// counts; the mapping records `(r, r_new)`.
///
/// The cumulative is accumulated with Kahan compensation: the crossing test
/// compares floors, and a bare running sum can round up onto an exact
/// integer and spuriously absorb the next crossing.
///
/// Errors only in the degenerate corner where the subset comes out empty.
pub fn simulate_subset(
    population: &SyntheticZipfPopulation,
    params: &HillParams,
    mode: SelectionMode,
) -> Result<SimulatedSubset> {
    let mut records = Vec::new();
    let mut pairs = Vec::new();
    let mut cum = 0.0f64;
    let mut compensation = 0.0f64;
    let mut prev_floor = 0.0f64;
    for r in 1..=population.n {
        let term = prob_selected_raw(f64::from(r), params) - compensation;
        let next = cum + term;
        compensation = (next - cum) - term;
        cum = next;
        let floor = (cum - compensation).floor();
        let crossed = floor > prev_floor;
        prev_floor = floor;
        let keep = match mode {
            SelectionMode::Selected => crossed,
            SelectionMode::Complement => !crossed,
        };
        if keep {
            let r_new = records.len() as u32 + 1;
            pairs.push((r, r_new));
            records.push(RankRecord {
                rank: r_new,
                word: format!("w{r}"),
                count: population.count_at(r),
            });
        }
    }
    if records.is_empty() {
        return Err(Error::Degenerate(format!(
            "selection kept no rank out of {} (r_mid={}, gamma={})",
            population.n, params.r_mid, params.gamma
        )));
    }
    Ok(SimulatedSubset {
        table: RankFrequencyTable::from_records(records)
            .expect("subset counts inherit population order"),
        mapping: RankMapping::new(pairs).expect("crossing ranks increase strictly"),
    })
}

/// A rectangular search lattice over `(r_mid, gamma)`.
#[derive(Debug, Clone)]
pub struct HillGrid {
    pub r_mid: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl Default for HillGrid {
    /// `r_mid` in `{10, 11, .., 400}`, `gamma` in `{0.50, 0.55, .., 5.00}`.
    /// Spans all parameter scales relevant to English stopword lists with
    /// wide margin.
    fn default() -> Self {
        HillGrid {
            r_mid: (10..=400).map(f64::from).collect(),
            gamma: (10..=100).map(|k| f64::from(k * 5) / 100.0).collect(),
        }
    }
}

impl HillGrid {
    pub fn new(r_mid: Vec<f64>, gamma: Vec<f64>) -> Result<Self> {
        if r_mid.is_empty() || gamma.is_empty() {
            return Err(Error::InvalidInput("empty Hill grid axis".into()));
        }
        for v in r_mid.iter().chain(gamma.iter()) {
            if !(*v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "Hill grid values must be positive finite reals, got {v}"
                )));
            }
        }
        Ok(HillGrid { r_mid, gamma })
    }

    /// All lattice points in lexicographic `(r_mid, gamma)` order.
    pub fn lattice(&self) -> Vec<HillParams> {
        let mut points = Vec::with_capacity(self.r_mid.len() * self.gamma.len());
        for &r_mid in &self.r_mid {
            for &gamma in &self.gamma {
                points.push(HillParams { r_mid, gamma });
            }
        }
        points
    }
}

/// The fit objective: squared error between predicted and observed subset
/// ranks in log scale, with the prediction from the sum-form cumulative of
/// the mode's selection probability.
pub fn hill_objective(mapping: &RankMapping, params: &HillParams, mode: SelectionMode) -> f64 {
    let pairs = mapping.pairs();
    let max_r = match pairs.last() {
        Some(&(r, _)) => r,
        None => return 0.0,
    };
    let ln_u: Vec<f64> = (0..=max_r).map(|u| f64::from(u).ln()).collect();
    objective_kernel(pairs, &ln_u, params.gamma, params.r_mid, mode, None)
}

/// Shared evaluation kernel. `pow_gamma`, when given, caches
/// `exp(gamma * ln u)` for `u = 0..=max_r`; the uncached path computes the
/// same expression term by term so both paths produce identical floats.
fn objective_kernel(
    pairs: &[(u32, u32)],
    ln_u: &[f64],
    gamma: f64,
    r_mid: f64,
    mode: SelectionMode,
    pow_gamma: Option<&[f64]>,
) -> f64 {
    let inv_mid = (-gamma * r_mid.ln()).exp();
    let mut cum = 0.0f64;
    let mut objective = 0.0f64;
    let mut next = 0usize;
    let max_r = pairs.last().map_or(0, |&(r, _)| r);
    for u in 1..=max_r as usize {
        let pw = match pow_gamma {
            Some(cache) => cache[u],
            None => (gamma * ln_u[u]).exp(),
        };
        cum += 1.0 / (1.0 + pw * inv_mid);
        while next < pairs.len() && pairs[next].0 as usize == u {
            let predicted = match mode {
                SelectionMode::Selected => cum,
                SelectionMode::Complement => u as f64 - cum,
            };
            let diff = predicted.ln() - f64::from(pairs[next].1).ln();
            objective += diff * diff;
            next += 1;
        }
    }
    objective
}

/// Exhaustive grid fit of the Hill parameters to an observed rank mapping.
///
/// Minimizes [`hill_objective`]; ties resolve to the lexicographically
/// smallest `(r_mid, gamma)`. Equivalent to scanning
/// [`HillGrid::lattice`] with [`crate::fitting::grid_search`], but walks
/// gamma in the outer loop so the `u^gamma` table is shared across `r_mid`
/// candidates.
pub fn fit_hill(
    mapping: &RankMapping,
    grid: &HillGrid,
    mode: SelectionMode,
) -> Result<(HillParams, f64)> {
    if mapping.is_empty() {
        return Err(Error::InvalidInput("empty rank mapping".into()));
    }
    if grid.r_mid.is_empty() || grid.gamma.is_empty() {
        return Err(Error::InvalidInput("empty Hill grid".into()));
    }
    let pairs = mapping.pairs();
    let max_r = pairs.last().expect("non-empty").0 as usize;
    let ln_u: Vec<f64> = (0..=max_r).map(|u| u as f64).map(f64::ln).collect();
    let mut pow_gamma = vec![0.0f64; max_r + 1];
    let mut best: Option<(HillParams, f64)> = None;
    for &gamma in &grid.gamma {
        for u in 1..=max_r {
            pow_gamma[u] = (gamma * ln_u[u]).exp();
        }
        for &r_mid in &grid.r_mid {
            let value = objective_kernel(pairs, &ln_u, gamma, r_mid, mode, Some(&pow_gamma));
            let candidate = HillParams { r_mid, gamma };
            let better = match &best {
                None => true,
                Some((cur, cur_value)) => {
                    value < *cur_value
                        || (value == *cur_value
                            && (r_mid, gamma) < (cur.r_mid, cur.gamma))
                }
            };
            if better {
                best = Some((candidate, value));
            }
        }
    }
    Ok(best.expect("non-empty grid"))
}

/// [`fit_hill`] followed by one local refinement pass at 10x resolution
/// around the coarse optimum (`r_mid` within ±1.0 in steps of 0.1, `gamma`
/// within ±0.05 in steps of 0.005).
pub fn fit_hill_refined(
    mapping: &RankMapping,
    grid: &HillGrid,
    mode: SelectionMode,
) -> Result<(HillParams, f64)> {
    let (coarse, _) = fit_hill(mapping, grid, mode)?;
    let refine = |center: f64, step: f64| -> Vec<f64> {
        (0..=20)
            .map(|k| center + step * (f64::from(k) - 10.0))
            .filter(|v| *v > 0.0)
            .collect()
    };
    let fine = HillGrid {
        r_mid: refine(coarse.r_mid, 0.1),
        gamma: refine(coarse.gamma, 0.005),
    };
    fit_hill(mapping, &fine, mode)
}

/// Adaptive Simpson quadrature with relative tolerance `rel_tol`.
fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fm = f(0.5 * (a + b));
    let fb = f(b);
    let whole = simpson(a, b, fa, fm, fb);
    let eps = rel_tol * whole.abs().max(1e-300);
    simpson_step(&f, a, b, fa, fm, fb, whole, eps, 52)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
    }
}
