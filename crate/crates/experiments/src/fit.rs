//! Log-log least-squares fits.

use serde::{Deserialize, Serialize};

/// Slope fits need at least this many points.
pub const MIN_FIT_POINTS: usize = 3;

/// Gates use a fitted slope only below this residual.
pub const MAX_FIT_RESIDUAL: f64 = 0.1;

/// `ln y = slope·ln x + intercept`; `residual` is the RMS of the fit residuals in `ln y`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    pub points: usize,
}

impl Fit {
    pub fn usable(&self) -> bool {
        self.residual < MAX_FIT_RESIDUAL
    }
}

/// `None` when fewer than [`MIN_FIT_POINTS`] positive finite pairs are given
/// or all abscissae coincide.
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Option<Fit> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < MIN_FIT_POINTS || pts.len() != xs.len().min(ys.len()) {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = pts
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum();
    Some(Fit {
        slope,
        intercept,
        residual: (ss / n).sqrt(),
        points: pts.len(),
    })
}
