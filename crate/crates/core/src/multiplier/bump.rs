//! Smooth bumps.
//!
//! `φ` is a smooth plateau with `φ = 1` on `[-1/2, 1/2]` and support in `[-1, 1]`,
//! `ρ(t) = φ(t) - φ(2t)` and `ψ(t) = ρ(t)/t`. Then `ψ` is odd, vanishes off
//! `1/4 <= |t| <= 1`, and `Σ_{j>=0} 2^{-j} ψ(2^{-j} t)` telescopes to `1/t` for
//! `|t| >= 1/2`. The cutoff is `χ(t) = φ(5t)`, equal to one on `[-1/10, 1/10]`
//! and supported in `[-1/5, 1/5]`.

use serde::Serialize;

use crate::error::{LabError, Result};

/// Smooth transition: 0 for `t <= 0`, 1 for `t >= 1`.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

/// The plateau `φ`.
pub fn plateau(t: f64) -> f64 {
    1.0 - smooth_step(2.0 * t.abs() - 1.0)
}

pub fn psi(t: f64) -> f64 {
    let a = t.abs();
    if a <= 0.25 || a >= 1.0 {
        return 0.0;
    }
    (plateau(t) - plateau(2.0 * t)) / t
}

/// `ψ_j(t) = 2^{-j} ψ(2^{-j} t)`.
pub fn psi_j(j: u32, t: f64) -> f64 {
    let scale = 2f64.powi(-(j as i32));
    scale * psi(scale * t)
}

pub fn chi(t: f64) -> f64 {
    plateau(5.0 * t)
}

/// `χ_s(t) = χ(10^s t)`.
pub fn chi_s(s: u32, t: f64) -> f64 {
    chi(10f64.powi(s as i32) * t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BumpKind {
    Psi,
    Chi,
}

/// One of the two bumps together with its certified support.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BumpFunction {
    pub kind: BumpKind,
}

#[derive(Clone, Debug, Serialize)]
pub struct BumpCheck {
    pub points: usize,
    pub sup_norm: f64,
    /// Largest deviation from the telescoping identity (ψ) or the sandwich bounds (χ).
    pub max_identity_error: f64,
}

impl BumpFunction {
    pub fn new(kind: BumpKind) -> Self {
        Self { kind }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self.kind {
            BumpKind::Psi => psi(t),
            BumpKind::Chi => chi(t),
        }
    }

    /// `(lo, hi)` with the bump vanishing unless `lo < |t| < hi`.
    pub fn support_abs(&self) -> (f64, f64) {
        match self.kind {
            BumpKind::Psi => (0.25, 1.0),
            BumpKind::Chi => (0.0, 0.2),
        }
    }

    /// Grid check of symmetry, support and the defining identity.
    pub fn check(&self, points: usize) -> Result<BumpCheck> {
        let (lo, hi) = self.support_abs();
        let mut sup: f64 = 0.0;
        let mut worst: f64 = 0.0;
        for i in 0..=points {
            let t = 2.0 * i as f64 / points as f64;
            let v = self.eval(t);
            sup = sup.max(v.abs());
            let (symmetric, outside) = match self.kind {
                BumpKind::Psi => (v == -self.eval(-t), !(lo < t && t < hi)),
                BumpKind::Chi => (v == self.eval(-t), t >= hi),
            };
            if !symmetric || (outside && v != 0.0) {
                return Err(LabError::Numeric(format!(
                    "{:?} fails symmetry/support at t = {t}",
                    self.kind
                )));
            }
            match self.kind {
                BumpKind::Psi => {
                    if t >= 1.0 {
                        let s: f64 = (0..=64).map(|j| psi_j(j, t)).sum();
                        worst = worst.max((s - 1.0 / t).abs() * t);
                    }
                }
                BumpKind::Chi => {
                    let floor = if t <= 0.1 { 1.0 } else { 0.0 };
                    let ceil = if t <= 0.2 { 1.0 } else { 0.0 };
                    worst = worst.max((floor - v).max(0.0)).max((v - ceil).max(0.0));
                }
            }
        }
        Ok(BumpCheck {
            points,
            sup_norm: sup,
            max_identity_error: worst,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_j_vanishes_at_zero_and_is_odd() {
        for j in 0..10 {
            assert_eq!(psi_j(j, 0.0), 0.0);
            for k in 1..200 {
                let t = k as f64 * 0.37;
                assert_eq!(psi_j(j, -t), -psi_j(j, t));
            }
        }
    }

    #[test]
    fn psi_j_support() {
        for j in 0..12u32 {
            let lo = 2f64.powi(j as i32 - 2);
            let hi = 2f64.powi(j as i32);
            for k in 0..4000 {
                let t = k as f64 * hi / 1000.0;
                if t <= lo || t >= hi {
                    assert_eq!(psi_j(j, t), 0.0, "j={j} t={t}");
                }
            }
        }
    }

    #[test]
    fn telescoping_sum() {
        for t in [1.0, 3.7, 100.0, 2f64.powi(18)] {
            let s: f64 = (0..=20).map(|j| psi_j(j, t)).sum();
            assert!((s - 1.0 / t).abs() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn partition_identity_on_integers() {
        for m in 1..=(1i64 << 20) {
            if m > 5000 && m % 997 != 0 {
                continue;
            }
            let t = m as f64;
            let s: f64 = (0..=22).map(|j| psi_j(j, t)).sum();
            assert!((s - 1.0 / t).abs() < 1e-10, "m={m}");
            let s_neg: f64 = (0..=22).map(|j| psi_j(j, -t)).sum();
            assert!((s_neg + 1.0 / t).abs() < 1e-10);
        }
    }

    #[test]
    fn chi_sandwich() {
        let c = BumpFunction::new(BumpKind::Chi).check(20_000).unwrap();
        assert_eq!(c.max_identity_error, 0.0);
        assert_eq!(chi(0.1), 1.0);
        assert_eq!(chi(0.2), 0.0);
        assert!(chi(0.15) > 0.0 && chi(0.15) < 1.0);
        assert_eq!(chi_s(2, 0.002), 0.0);
        assert_eq!(chi_s(2, 0.001), 1.0);
    }

    #[test]
    fn psi_check_passes() {
        let c = BumpFunction::new(BumpKind::Psi).check(20_000).unwrap();
        assert!(c.max_identity_error < 1e-12);
        // ρ = φ(t) - φ(2t) lies in [0, 1], so |ψ| <= 1/|t| <= 4 on the support
        assert!(c.sup_norm <= 4.0);
    }
}
