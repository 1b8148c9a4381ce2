//! Composite Gauss–Legendre quadrature on uniform panels.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

/// Nodes per panel.
pub const GL_NODES: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSettings {
    /// Panels per unit of phase variation; at least 4.
    pub panels_per_oscillation: f64,
    /// Absolute tolerance of the panel-doubling check.
    pub tolerance: f64,
    /// Floor on the panel count of each smooth piece.
    pub min_panels: usize,
    /// Panel count at which the evaluation gives up.
    pub max_panels: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            panels_per_oscillation: 4.0,
            tolerance: 1e-9,
            min_panels: 4,
            max_panels: 1 << 20,
        }
    }
}

impl QuadratureSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.panels_per_oscillation >= 4.0) {
            return param("panels_per_oscillation must be at least 4");
        }
        if !(self.tolerance > 0.0) {
            return param("quadrature tolerance must be positive");
        }
        if self.min_panels == 0 || self.max_panels < self.min_panels {
            return param("panel bounds are inconsistent");
        }
        Ok(())
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| legendre_rule(GL_NODES))
}

fn legendre_rule(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Tricomi initial guess, then Newton on P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Nodes and weights of the composite rule with `panels` equal panels on `[a, b]`.
pub fn composite_nodes(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let rule = gauss_legendre();
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * rule.len());
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        for &(x, w) in rule {
            out.push((mid + 0.5 * h * x, 0.5 * h * w));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two_and_integrate_polynomials() {
        let rule = gauss_legendre();
        let total: f64 = rule.iter().map(|p| p.1).sum();
        assert!((total - 2.0).abs() < 1e-14);
        // exact through degree 63
        for deg in [2u32, 10, 40, 62] {
            let got: f64 = rule.iter().map(|&(x, w)| w * x.powi(deg as i32)).sum();
            let want = 2.0 / (deg as f64 + 1.0);
            assert!((got - want).abs() < 1e-13, "deg {deg}");
        }
    }

    #[test]
    fn composite_rule_on_oscillatory_integrand() {
        // ∫_0^1 cos(2π·40 t) dt = 0 and ∫_0^1 exp(t) dt = e - 1
        let nodes = composite_nodes(0.0, 1.0, 160);
        let osc: f64 = nodes
            .iter()
            .map(|&(t, w)| w * (std::f64::consts::TAU * 40.0 * t).cos())
            .sum();
        assert!(osc.abs() < 1e-13);
        let ex: f64 = nodes.iter().map(|&(t, w)| w * t.exp()).sum();
        assert!((ex - (std::f64::consts::E - 1.0)).abs() < 1e-13);
    }
}
