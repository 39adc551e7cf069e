//! Rank-frequency model fitting in log-log space.
//!
//! Four models are supported, all fitted on `log T` versus `log r`:
//!
//! * power law (Zipf): `log T = c' - alpha * log r`
//! * quadratic correction: `log T = c' - alpha * log r - kappa * (log r)^2`
//! * beta rank function (BRF): `log T = c' - alpha * log r + beta * log(r_max + 1 - r)`
//! * Mandelbrot: `log T = c' - alpha * log(r + B)`
//!
//! The first three are plain linear least squares. The Mandelbrot offset `B`
//! cannot be linearized, so it is chosen by brute-force search over a grid,
//! with a linear fit at each candidate. Natural logs throughout; the base
//! only shifts `c'`.

use serde::{Deserialize, Serialize};

use crate::corpus::RankFrequencyTable;
use crate::error::{Error, Result};
use crate::sampling;

/// The four model kinds, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    Zipf,
    Quadratic,
    Brf,
    Mandelbrot,
}

impl FitModel {
    pub const ALL: [FitModel; 4] = [
        FitModel::Zipf,
        FitModel::Quadratic,
        FitModel::Brf,
        FitModel::Mandelbrot,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FitModel::Zipf => "zipf",
            FitModel::Quadratic => "quadratic",
            FitModel::Brf => "brf",
            FitModel::Mandelbrot => "mandelbrot",
        }
    }
}

impl std::str::FromStr for FitModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zipf" => Ok(FitModel::Zipf),
            "quadratic" => Ok(FitModel::Quadratic),
            "brf" => Ok(FitModel::Brf),
            "mandelbrot" => Ok(FitModel::Mandelbrot),
            other => Err(Error::InvalidInput(format!("unknown model `{other}`"))),
        }
    }
}

/// Fitted parameters, named per model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", content = "params", rename_all = "snake_case")]
pub enum FitParams {
    Zipf {
        c_prime: f64,
        alpha: f64,
    },
    Quadratic {
        c_prime: f64,
        alpha: f64,
        kappa: f64,
    },
    Brf {
        c_prime: f64,
        alpha: f64,
        beta: f64,
        r_max: u32,
    },
    Mandelbrot {
        c_prime: f64,
        alpha: f64,
        b: f64,
    },
}

impl FitParams {
    pub fn model(&self) -> FitModel {
        match self {
            FitParams::Zipf { .. } => FitModel::Zipf,
            FitParams::Quadratic { .. } => FitModel::Quadratic,
            FitParams::Brf { .. } => FitModel::Brf,
            FitParams::Mandelbrot { .. } => FitModel::Mandelbrot,
        }
    }

    /// The decay exponent `alpha`.
    pub fn alpha(&self) -> f64 {
        match *self {
            FitParams::Zipf { alpha, .. }
            | FitParams::Quadratic { alpha, .. }
            | FitParams::Brf { alpha, .. }
            | FitParams::Mandelbrot { alpha, .. } => alpha,
        }
    }

    /// Model value of `log T` at rank `r`. NaN outside the model's domain
    /// (BRF beyond `r_max`).
    pub fn predict_log(&self, r: f64) -> f64 {
        match *self {
            FitParams::Zipf { c_prime, alpha } => c_prime - alpha * r.ln(),
            FitParams::Quadratic {
                c_prime,
                alpha,
                kappa,
            } => {
                let x = r.ln();
                c_prime - alpha * x - kappa * x * x
            }
            FitParams::Brf {
                c_prime,
                alpha,
                beta,
                r_max,
            } => c_prime - alpha * r.ln() + beta * (f64::from(r_max) + 1.0 - r).ln(),
            FitParams::Mandelbrot { c_prime, alpha, b } => c_prime - alpha * (r + b).ln(),
        }
    }

    /// Model value of `T` at rank `r`.
    pub fn predict_count(&self, r: f64) -> f64 {
        self.predict_log(r).exp()
    }
}

/// Outcome of one model fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    #[serde(flatten)]
    pub params: FitParams,
    pub adjusted_r2: f64,
    pub n_points: usize,
    pub residual_sum_squares: f64,
}

impl FitResult {
    pub fn model(&self) -> FitModel {
        self.params.model()
    }
}

/// The `(rank, count)` points entering a fit, plus the `r_max` of the table
/// they came from (the BRF bend point).
///
/// Ranks are distinct and in `1..=r_max`; counts are `>= 1` so every log is
/// finite.
#[derive(Debug, Clone)]
pub struct FitInput {
    points: Vec<(u32, f64)>,
    r_max: u32,
}

impl FitInput {
    pub fn new(mut points: Vec<(u32, f64)>, r_max: u32) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("no points".into()));
        }
        points.sort_unstable_by_key(|&(r, _)| r);
        for w in points.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidInput(format!("duplicate rank {}", w[0].0)));
            }
        }
        for &(r, t) in &points {
            if r < 1 || r > r_max {
                return Err(Error::InvalidInput(format!(
                    "rank {r} outside 1..={r_max}"
                )));
            }
            if !(t >= 1.0) || !t.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "count {t} at rank {r} must be a finite real >= 1"
                )));
            }
        }
        Ok(FitInput { points, r_max })
    }

    /// All points of a table.
    pub fn from_table(table: &RankFrequencyTable) -> FitInput {
        let points = table
            .records()
            .iter()
            .map(|rec| (rec.rank, rec.count as f64))
            .collect();
        FitInput {
            points,
            r_max: table.r_max(),
        }
    }

    /// The table restricted to the given ranks (which must exist in it).
    pub fn from_table_at_ranks(table: &RankFrequencyTable, ranks: &[u32]) -> Result<FitInput> {
        let mut points = Vec::with_capacity(ranks.len());
        for &r in ranks {
            let rec = table.record(r).ok_or_else(|| {
                Error::InvalidInput(format!("rank {r} not in table (r_max {})", table.r_max()))
            })?;
            points.push((r, rec.count as f64));
        }
        FitInput::new(points, table.r_max())
    }

    /// The table at the default log-even rank sample.
    pub fn log_even_from_table(table: &RankFrequencyTable) -> FitInput {
        let ranks = sampling::log_even_ranks_default(table.r_max())
            .expect("table r_max >= 1 by construction");
        Self::from_table_at_ranks(table, &ranks).expect("sampled ranks exist in table")
    }

    pub fn points(&self) -> &[(u32, f64)] {
        &self.points
    }

    pub fn r_max(&self) -> u32 {
        self.r_max
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn log_ranks(&self) -> Vec<f64> {
        self.points.iter().map(|&(r, _)| f64::from(r).ln()).collect()
    }

    fn log_counts(&self) -> Vec<f64> {
        self.points.iter().map(|&(_, t)| t.ln()).collect()
    }
}

/// Ordinary least squares solution.
#[derive(Debug, Clone)]
pub struct Lsq {
    pub coefficients: Vec<f64>,
    pub residual_sum_squares: f64,
}

/// Solves `design * x = response` in the least-squares sense via SVD.
///
/// `design` is given as rows. Requires at least as many rows as columns and
/// full column rank; a rank-deficient design (e.g. all ranks equal) is
/// reported as degenerate.
pub fn linear_least_squares(design: &[Vec<f64>], response: &[f64]) -> Result<Lsq> {
    let nrows = design.len();
    if nrows == 0 {
        return Err(Error::InvalidInput("empty design matrix".into()));
    }
    let ncols = design[0].len();
    if ncols == 0 || design.iter().any(|row| row.len() != ncols) {
        return Err(Error::InvalidInput("ragged or empty design rows".into()));
    }
    if response.len() != nrows {
        return Err(Error::InvalidInput(format!(
            "design has {nrows} rows but response has {} entries",
            response.len()
        )));
    }
    if nrows < ncols {
        return Err(Error::TooFewPoints {
            op: "linear_least_squares",
            needed: ncols,
            got: nrows,
        });
    }
    let m = nalgebra::DMatrix::from_fn(nrows, ncols, |i, j| design[i][j]);
    let y = nalgebra::DVector::from_column_slice(response);
    let svd = m.clone().svd(true, true);
    let max_sv = svd.singular_values.max();
    let eps = max_sv * nrows.max(ncols) as f64 * f64::EPSILON;
    if svd.rank(eps) < ncols {
        return Err(Error::Degenerate(
            "design matrix is rank-deficient".into(),
        ));
    }
    let coeffs = svd
        .solve(&y, eps)
        .map_err(|e| Error::Degenerate(e.to_string()))?;
    let fitted = &m * &coeffs;
    let rss = (&y - &fitted).iter().map(|e| e * e).sum();
    Ok(Lsq {
        coefficients: coeffs.iter().copied().collect(),
        residual_sum_squares: rss,
    })
}

/// Number of fitted coefficients charged to each model in adjusted R²:
/// all linear coefficients (intercept included) plus one per grid-searched
/// parameter, so Mandelbrot pays for its offset.
fn coefficient_count(model: FitModel) -> usize {
    match model {
        FitModel::Zipf => 2,
        FitModel::Quadratic => 3,
        FitModel::Brf => 3,
        FitModel::Mandelbrot => 3,
    }
}

/// Residual threshold under which a fit counts as exact.
fn is_exact(rss: f64, tss: f64) -> bool {
    rss <= 1e-12 * tss.max(1e-300)
}

fn finish(params: FitParams, response: &[f64], rss: f64) -> Result<FitResult> {
    let n = response.len();
    let p = coefficient_count(params.model());
    let mean = response.iter().sum::<f64>() / n as f64;
    let tss: f64 = response.iter().map(|y| (y - mean) * (y - mean)).sum();
    let adjusted_r2 = if is_exact(rss, tss) {
        1.0
    } else {
        let r2 = if tss > 0.0 { 1.0 - rss / tss } else { 0.0 };
        let dof = n as i64 - p as i64 - 1;
        if dof < 1 {
            return Err(Error::TooFewPoints {
                op: "adjusted R²",
                needed: p + 2,
                got: n,
            });
        }
        1.0 - (1.0 - r2) * (n as f64 - 1.0) / dof as f64
    };
    Ok(FitResult {
        params,
        adjusted_r2,
        n_points: n,
        residual_sum_squares: rss,
    })
}

/// Fits the power law of `log T` on `log r`. Needs >= 3 points.
pub fn fit_zipf(input: &FitInput) -> Result<FitResult> {
    require_points("fit_zipf", input, 3)?;
    let x = input.log_ranks();
    let y = input.log_counts();
    let rows: Vec<Vec<f64>> = x.iter().map(|&xi| vec![1.0, xi]).collect();
    let lsq = linear_least_squares(&rows, &y)?;
    let params = FitParams::Zipf {
        c_prime: lsq.coefficients[0],
        alpha: -lsq.coefficients[1],
    };
    finish(params, &y, lsq.residual_sum_squares)
}

/// Fits the quadratic correction with regressors `log r` and `(log r)^2`.
pub fn fit_quadratic(input: &FitInput) -> Result<FitResult> {
    require_points("fit_quadratic", input, 3)?;
    let x = input.log_ranks();
    let y = input.log_counts();
    let rows: Vec<Vec<f64>> = x.iter().map(|&xi| vec![1.0, xi, xi * xi]).collect();
    let lsq = linear_least_squares(&rows, &y)?;
    let params = FitParams::Quadratic {
        c_prime: lsq.coefficients[0],
        alpha: -lsq.coefficients[1],
        kappa: -lsq.coefficients[2],
    };
    finish(params, &y, lsq.residual_sum_squares)
}

/// Fits the beta rank function with regressors `log r` and
/// `log(r_max + 1 - r)`. Needs >= 4 points; every point must lie within the
/// originating table so the bend term stays finite.
pub fn fit_brf(input: &FitInput) -> Result<FitResult> {
    require_points("fit_brf", input, 4)?;
    let r_max = f64::from(input.r_max());
    let y = input.log_counts();
    let rows: Vec<Vec<f64>> = input
        .points()
        .iter()
        .map(|&(r, _)| {
            let r = f64::from(r);
            vec![1.0, r.ln(), (r_max + 1.0 - r).ln()]
        })
        .collect();
    let lsq = linear_least_squares(&rows, &y)?;
    let params = FitParams::Brf {
        c_prime: lsq.coefficients[0],
        alpha: -lsq.coefficients[1],
        beta: lsq.coefficients[2],
        r_max: input.r_max(),
    };
    finish(params, &y, lsq.residual_sum_squares)
}

/// Default Mandelbrot offset grid: every integer in `0..=100`, then
/// `110, 120, .., 500`.
pub fn default_mandelbrot_grid() -> Vec<f64> {
    let mut grid: Vec<f64> = (0..=100).map(f64::from).collect();
    grid.extend((11..=50).map(|k| f64::from(k) * 10.0));
    grid
}

/// Fits the Mandelbrot function by fixing each candidate `B` in turn,
/// linearly fitting `log T` on `log(r + B)`, and keeping the residual
/// minimizer. Ties go to the smallest `B`.
pub fn fit_mandelbrot(input: &FitInput, b_grid: &[f64]) -> Result<FitResult> {
    require_points("fit_mandelbrot", input, 3)?;
    if b_grid.is_empty() {
        return Err(Error::InvalidInput("empty Mandelbrot B grid".into()));
    }
    let mut grid: Vec<f64> = b_grid.to_vec();
    if grid.iter().any(|b| !b.is_finite() || *b < 0.0) {
        return Err(Error::InvalidInput(
            "Mandelbrot B candidates must be finite and >= 0".into(),
        ));
    }
    grid.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();
    let y = input.log_counts();
    let mut best: Option<(f64, Lsq)> = None;
    for &b in &grid {
        let rows: Vec<Vec<f64>> = input
            .points()
            .iter()
            .map(|&(r, _)| vec![1.0, (f64::from(r) + b).ln()])
            .collect();
        let lsq = linear_least_squares(&rows, &y)?;
        if best
            .as_ref()
            .is_none_or(|(_, cur)| lsq.residual_sum_squares < cur.residual_sum_squares)
        {
            best = Some((b, lsq));
        }
    }
    let (b, lsq) = best.expect("non-empty grid");
    let params = FitParams::Mandelbrot {
        c_prime: lsq.coefficients[0],
        alpha: -lsq.coefficients[1],
        b,
    };
    finish(params, &y, lsq.residual_sum_squares)
}

/// Exhaustive minimization of `objective` over `grid`.
///
/// Deterministic: the first strictly-better point wins, so with a grid laid
/// out in lexicographic parameter order, ties resolve to the
/// lexicographically smallest tuple. The objective must be total over the
/// grid (no NaN).
pub fn grid_search<P: Clone, F: FnMut(&P) -> f64>(
    mut objective: F,
    grid: &[P],
) -> Result<(P, f64)> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty grid".into()));
    }
    let mut best_idx = 0;
    let mut best_value = objective(&grid[0]);
    for (i, p) in grid.iter().enumerate().skip(1) {
        let value = objective(p);
        if value < best_value {
            best_value = value;
            best_idx = i;
        }
    }
    Ok((grid[best_idx].clone(), best_value))
}

/// Runs every requested model on the same points and returns the results
/// ordered by adjusted R², best first. Ties keep the canonical model order.
pub fn compare_models(input: &FitInput, models: &[FitModel]) -> Result<Vec<FitResult>> {
    let mut seen = Vec::new();
    let mut results = Vec::new();
    for &m in models {
        if seen.contains(&m) {
            continue;
        }
        seen.push(m);
        let fit = match m {
            FitModel::Zipf => fit_zipf(input)?,
            FitModel::Quadratic => fit_quadratic(input)?,
            FitModel::Brf => fit_brf(input)?,
            FitModel::Mandelbrot => fit_mandelbrot(input, &default_mandelbrot_grid())?,
        };
        results.push(fit);
    }
    results.sort_by(|a, b| b.adjusted_r2.partial_cmp(&a.adjusted_r2).unwrap());
    Ok(results)
}

fn require_points(op: &'static str, input: &FitInput, needed: usize) -> Result<()> {
    if input.len() < needed {
        return Err(Error::TooFewPoints {
            op,
            needed,
            got: input.len(),
        });
    }
    Ok(())
}
