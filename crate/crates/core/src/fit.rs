//! Least-squares fitting of the latency models to measured traces.
//!
//! The power-law fit uses variable projection: for a fixed exponent `b` the
//! model `a * f^(-b) + c` is linear in `(a, c)`, so the best non-negative pair
//! has a closed form. The exponent is found by scanning a log-spaced grid over
//! `(0.05, 4]` and refining the best grid cell with a golden-section search.
//! Repeated samples at one frequency are averaged first.

use serde::{Deserialize, Serialize};

use crate::error::FitError;
use crate::model::{CpuDvfsModel, Frequency, PowerLawModel, MAX_EXPONENT};
use crate::trace::{TracePoint, TraceSeries};

/// Number of exponent candidates in the outer scan.
pub const EXPONENT_GRID_POINTS: usize = 400;
/// Exclusive lower end of the exponent search range.
pub const EXPONENT_GRID_MIN: f64 = 0.05;
/// Width below which the golden-section bracket stops shrinking.
/// Well under the 1e-4 resolution the exponent is reported at.
pub const EXPONENT_REFINE_TOL: f64 = 1e-9;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FittedModel {
    PowerLaw(PowerLawModel),
    CpuDvfs(CpuDvfsModel),
}

impl FittedModel {
    pub fn latency_ms(&self, f: Frequency) -> f64 {
        match self {
            FittedModel::PowerLaw(m) => m.latency_ms(f),
            FittedModel::CpuDvfs(m) => m.latency_ms(f),
        }
    }

    pub fn power_law(&self) -> Option<PowerLawModel> {
        match self {
            FittedModel::PowerLaw(m) => Some(*m),
            FittedModel::CpuDvfs(_) => None,
        }
    }

    pub fn cpu_dvfs(&self) -> Option<CpuDvfsModel> {
        match self {
            FittedModel::CpuDvfs(m) => Some(*m),
            FittedModel::PowerLaw(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Goodness {
    pub rmse: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: FittedModel,
    pub rmse: f64,
    pub r_squared: f64,
    /// Set when the data carry no frequency-dependent component, so `b` is
    /// reported as 1 by convention.
    #[serde(default)]
    pub unidentifiable_exponent: bool,
}

/// The exponent candidates scanned by [`fit_power_law`], ascending, ending at 4.
pub fn exponent_grid() -> Vec<f64> {
    let ratio = MAX_EXPONENT / EXPONENT_GRID_MIN;
    (1..=EXPONENT_GRID_POINTS)
        .map(|i| {
            if i == EXPONENT_GRID_POINTS {
                MAX_EXPONENT
            } else {
                EXPONENT_GRID_MIN * ratio.powf(i as f64 / EXPONENT_GRID_POINTS as f64)
            }
        })
        .collect()
}

/// Best non-negative `(a, c)` for a fixed exponent and its sum of squared residuals.
pub fn fit_with_fixed_exponent(series: &TraceSeries, b: f64) -> (PowerLawModel, f64) {
    let (a, c, sse) = solve_linear_part(&series.points, b);
    (PowerLawModel { a, b, c }, sse)
}

fn sse(points: &[TracePoint], a: f64, b: f64, c: f64) -> f64 {
    points
        .iter()
        .map(|p| {
            let r = a * p.freq_ghz.powf(-b) + c - p.latency_ms;
            r * r
        })
        .sum()
}

/// Non-negative least squares in `(a, c)` for `t ≈ a x + c`, `x = f^(-b)`.
///
/// The problem is a convex quadratic over the quadrant, so the optimum is the
/// unconstrained solution when it is feasible and otherwise lies on one of the
/// two faces `a = 0` or `c = 0`, each solved in closed form.
fn solve_linear_part(points: &[TracePoint], b: f64) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.freq_ghz.powf(-b)).collect();
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_t = points.iter().map(|p| p.latency_ms).sum::<f64>() / n;
    let (mut sxx, mut sxt, mut xx, mut xt) = (0.0, 0.0, 0.0, 0.0);
    for (x, p) in xs.iter().zip(points) {
        let dx = x - mean_x;
        sxx += dx * dx;
        sxt += dx * (p.latency_ms - mean_t);
        xx += x * x;
        xt += x * p.latency_ms;
    }

    if sxx > 0.0 {
        let a = sxt / sxx;
        let c = mean_t - a * mean_x;
        if a >= 0.0 && c >= 0.0 {
            return (a, c, sse(points, a, b, c));
        }
    }

    // a = 0 face
    let c0 = mean_t.max(0.0);
    let sse_a0 = sse(points, 0.0, b, c0);
    // c = 0 face
    let a0 = if xx > 0.0 { (xt / xx).max(0.0) } else { 0.0 };
    let sse_c0 = sse(points, a0, b, 0.0);
    if sse_c0 < sse_a0 {
        (a0, 0.0, sse_c0)
    } else {
        (0.0, c0, sse_a0)
    }
}

/// Fits `t = a f^(-b) + c` with `a, c >= 0` and `b ∈ (0.05, 4]`.
///
/// The returned residual is never worse than the best grid candidate.
pub fn fit_power_law(series: &TraceSeries) -> Result<FitResult, FitError> {
    let series = series.averaged();
    let distinct = series.points.len();
    if distinct < 3 {
        return Err(FitError::InsufficientData(format!(
            "power-law fit needs at least 3 distinct frequencies, got {distinct}"
        )));
    }
    let points = &series.points;

    let grid = exponent_grid();
    let scan: Vec<(f64, f64, f64)> = grid.iter().map(|&b| solve_linear_part(points, b)).collect();

    if scan.iter().all(|&(a, _, _)| a == 0.0) {
        let (_, c, _) = solve_linear_part(points, 1.0);
        let model = PowerLawModel { a: 0.0, b: 1.0, c };
        let g = fit_goodness(&series, &FittedModel::PowerLaw(model));
        return Ok(FitResult {
            model: FittedModel::PowerLaw(model),
            rmse: g.rmse,
            r_squared: g.r_squared,
            unidentifiable_exponent: true,
        });
    }

    // first index wins ties, independent of evaluation order
    let best = scan
        .iter()
        .enumerate()
        .fold(0, |best, (i, s)| if s.2 < scan[best].2 { i } else { best });

    let lo = if best == 0 { EXPONENT_GRID_MIN } else { grid[best - 1] };
    let hi = if best + 1 == grid.len() { MAX_EXPONENT } else { grid[best + 1] };
    let refined_b = golden_section(lo, hi, |b| solve_linear_part(points, b).2);

    let (a, b, c) = {
        let (ra, rc, rsse) = solve_linear_part(points, refined_b);
        let (ga, gc, gsse) = scan[best];
        if rsse < gsse {
            (ra, refined_b, rc)
        } else {
            (ga, grid[best], gc)
        }
    };

    let model = PowerLawModel { a, b, c };
    let g = fit_goodness(&series, &FittedModel::PowerLaw(model));
    Ok(FitResult {
        model: FittedModel::PowerLaw(model),
        rmse: g.rmse,
        r_squared: g.r_squared,
        unidentifiable_exponent: false,
    })
}

fn golden_section(mut lo: f64, mut hi: f64, objective: impl Fn(f64) -> f64) -> f64 {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = objective(x1);
    let mut f2 = objective(x2);
    while hi - lo > EXPONENT_REFINE_TOL {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = objective(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = objective(x2);
        }
    }
    if f1 <= f2 {
        x1
    } else {
        x2
    }
}

/// Fits `t = coeff / f` in closed form: `coeff = Σ(t/f) / Σ(1/f²)`.
pub fn fit_cpu_dvfs(series: &TraceSeries) -> Result<FitResult, FitError> {
    let series = series.averaged();
    if series.is_empty() {
        return Err(FitError::InsufficientData("cpu-dvfs fit needs at least one sample".into()));
    }
    let (num, den) = series.points.iter().fold((0.0, 0.0), |(num, den), p| {
        let inv = 1.0 / p.freq_ghz;
        (num + p.latency_ms * inv, den + inv * inv)
    });
    let coeff = (num / den).max(0.0);
    if coeff == 0.0 {
        return Err(FitError::Degenerate("all latencies are zero; cpu-dvfs coefficient must be positive".into()));
    }
    let model = FittedModel::CpuDvfs(CpuDvfsModel::new(coeff)?);
    let g = fit_goodness(&series, &model);
    Ok(FitResult { model, rmse: g.rmse, r_squared: g.r_squared, unidentifiable_exponent: false })
}

/// Root-mean-square residual and coefficient of determination.
///
/// When the data have no variance, `r²` is 1 for a perfect fit and 0 otherwise.
pub fn fit_goodness(series: &TraceSeries, model: &FittedModel) -> Goodness {
    let n = series.points.len();
    if n == 0 {
        return Goodness { rmse: 0.0, r_squared: 1.0 };
    }
    let mean = series.points.iter().map(|p| p.latency_ms).sum::<f64>() / n as f64;
    let (mut ss_res, mut ss_tot) = (0.0, 0.0);
    for p in &series.points {
        let predicted = match Frequency::ghz(p.freq_ghz) {
            Ok(f) => model.latency_ms(f),
            Err(_) => f64::NAN,
        };
        ss_res += (predicted - p.latency_ms).powi(2);
        ss_tot += (p.latency_ms - mean).powi(2);
    }
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else if ss_res == 0.0 {
        1.0
    } else {
        0.0
    };
    Goodness { rmse: (ss_res / n as f64).sqrt(), r_squared }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub pearson_r: f64,
}

/// Ordinary least-squares line of latency against FLOPs, with Pearson's r.
///
/// `r` is reported as 0 when the latencies have no variance.
pub fn fit_linear_flops(points: &[(f64, f64)]) -> Result<LinearFit, FitError> {
    if points.len() < 2 {
        return Err(FitError::InsufficientData(format!("linear fit needs at least 2 points, got {}", points.len())));
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (dx, dy) = (x - mean_x, y - mean_y);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if !(sxx > 0.0) {
        return Err(FitError::Degenerate("all FLOP counts are identical".into()));
    }
    let slope = sxy / sxx;
    let pearson_r = if syy > 0.0 { (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0) } else { 0.0 };
    Ok(LinearFit { slope, intercept: mean_y - slope * mean_x, pearson_r })
}
