//! Ordinary least-squares line fits and log-log scaling exponents.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn ols(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::InvalidSweep(
            "need at least two points to fit".into(),
        ));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidSweep("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let ss_tot: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let r2 = if ss_tot == 0.0 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok(LinearFit {
        slope,
        intercept,
        r2,
    })
}

/// Fit `log₂ value = slope · log₂ n + c`, skipping the first `skip` points.
pub fn log2_fit(ns: &[f64], values: &[f64], skip: usize) -> Result<LinearFit> {
    if ns.len() != values.len() {
        return Err(Error::LengthMismatch {
            expected: ns.len(),
            actual: values.len(),
        });
    }
    if let Some(bad) = ns
        .iter()
        .chain(values)
        .find(|v| !(**v > 0.0 && v.is_finite()))
    {
        return Err(Error::InvalidSweep(format!(
            "log-log fit needs positive finite data, got {bad}"
        )));
    }
    let x: Vec<f64> = ns.iter().skip(skip).map(|v| v.log2()).collect();
    let y: Vec<f64> = values.iter().skip(skip).map(|v| v.log2()).collect();
    ols(&x, &y)
}
