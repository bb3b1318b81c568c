//! Ordinary least squares on one regressor, used for log-log scaling checks.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// standard error of the slope; 0 when the fit is exact or m = 2
    pub slope_stderr: f64,
    pub r_squared: f64,
    pub points: usize,
}

impl LinearFit {
    /// Half-width of the ~95% confidence interval under a normal
    /// approximation of the slope estimator.
    pub fn slope_ci95(&self) -> f64 {
        1.96 * self.slope_stderr
    }
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::invalid("need at least two paired points"));
    }
    let m = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / m;
    let mean_y = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("regressor is constant"));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let syy: f64 = ys.iter().map(|y| (y - mean_y).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum();
    let dof = (xs.len().saturating_sub(2)) as f64;
    let slope_stderr = if dof > 0.0 { (ss_res / dof / sxx).sqrt() } else { 0.0 };
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(LinearFit { slope, intercept, slope_stderr, r_squared, points: xs.len() })
}

/// Fit in log-log space; every coordinate must be positive.
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.iter().chain(ys).any(|&v| v <= 0.0) {
        return Err(Error::invalid("log-log fit needs positive coordinates"));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    linear_fit(&lx, &ly)
}
