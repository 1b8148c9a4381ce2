use serde::Serialize;

use crate::error::{param, Result};

/// Least-squares line through `(x, log₂ y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in `log₂` units.
    pub residual: f64,
}

pub fn fit_log_slope(points: &[(f64, f64)]) -> Result<LogFit> {
    if points.len() < 3 {
        return param(format!("log-slope fit needs at least 3 points, got {}", points.len()));
    }
    if let Some(p) = points
        .iter()
        .find(|p| !(p.1 > 0.0) || !p.1.is_finite() || !p.0.is_finite())
    {
        return param(format!(
            "log-slope fit needs finite x and positive y, got ({}, {})",
            p.0, p.1
        ));
    }
    let n = points.len() as f64;
    let ly: Vec<f64> = points.iter().map(|p| p.1.log2()).collect();
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return param("log-slope fit needs at least two distinct x values");
    }
    let sxy: f64 = points.iter().zip(&ly).map(|(p, y)| (p.0 - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = points
        .iter()
        .zip(&ly)
        .map(|(p, y)| (y - intercept - slope * p.0).powi(2))
        .sum();
    Ok(LogFit {
        slope,
        intercept,
        residual: (ss / n).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn exact_power_law() {
        let pts: Vec<(f64, f64)> = (0..8).map(|x| (x as f64, 2f64.powi(-x))).collect();
        let f = fit_log_slope(&pts).unwrap();
        assert_eq!(f.slope, -1.0);
        assert!(f.residual < 1e-15);
    }

    #[test]
    fn constant() {
        let pts: Vec<(f64, f64)> = (0..5).map(|x| (x as f64, 3.7)).collect();
        assert_eq!(fit_log_slope(&pts).unwrap().slope, 0.0);
    }

    #[test]
    fn noisy_power_law() {
        let mut rng = crate::sparse::trial_rng(5, 0);
        let pts: Vec<(f64, f64)> = (0..12)
            .map(|x| (x as f64, 2f64.powi(-x) * (1.0 + rng.random_range(-0.01..0.01))))
            .collect();
        let f = fit_log_slope(&pts).unwrap();
        assert!((-1.05..=-0.95).contains(&f.slope));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_log_slope(&[(0.0, 1.0), (1.0, 2.0)]).is_err());
        assert!(fit_log_slope(&[(0.0, 1.0), (1.0, 0.0), (2.0, 1.0)]).is_err());
    }
}
