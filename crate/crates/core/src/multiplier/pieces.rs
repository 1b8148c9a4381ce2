//! `M_j^α(β) = Σ_m e(αm² - βm) ψ_j(m)` and the partial sums of `M^α`.
//!
//! Both are odd sums in `m`, so `m` and `-m` are paired as
//! `e(αm²) (-2i sin 2πβm) c_m`. Phases go through exact reduction.
//! Grids fold the coefficients modulo `L` before one FFT, which samples the
//! finite sum exactly at `β = k/L` for every `L`.

use num_complex::Complex64;
use rayon::prelude::*;

use super::bump::psi_j;
use super::sup::BetaEvaluator;
use super::GridFunction;
use crate::error::{param, LabError, Result};
use crate::fft;
use crate::phase::{frac_mul_f64, TorusPoint};

/// Largest `j` for single-point evaluation of `M_j`.
pub const MAX_J_POINT: u32 = 26;
/// Largest `N` for partial sums of `M`.
pub const MAX_TRUNCATION: u64 = 1 << 26;

const CHUNK: usize = 1 << 12;

/// Sum of `f(i)` for `i < n`, split into fixed chunks so the rounding does not
/// depend on the thread count.
pub(crate) fn chunked_sum(n: usize, f: impl Fn(usize) -> Complex64 + Sync) -> Complex64 {
    let partial: Vec<Complex64> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                acc += f(i);
            }
            acc
        })
        .collect();
    partial.into_iter().sum()
}

/// `-2i sin(2π β m)` with `βm` reduced exactly.
#[inline]
fn odd_factor(beta: f64, m: i64) -> Complex64 {
    let t = frac_mul_f64(beta, m as i128);
    Complex64::new(0.0, -2.0 * (std::f64::consts::TAU * t).sin())
}

/// Positive `m` in the support of `ψ_j`.
fn mj_range(j: u32) -> (i64, i64) {
    let hi = 1i64 << j;
    ((hi / 4).max(1), hi)
}

/// Precomputed coefficients `e(αm²) ψ_j(m)`, `m > 0`, for repeated `β` queries.
#[derive(Clone, Debug)]
pub struct MjEvaluator {
    j: u32,
    m0: i64,
    coeffs: Vec<Complex64>,
}

impl MjEvaluator {
    pub fn new(alpha: &TorusPoint, j: u32) -> Result<Self> {
        if j > MAX_J_POINT {
            return Err(LabError::Resource(format!(
                "M_j is capped at j <= {MAX_J_POINT}, got {j}"
            )));
        }
        let (m0, m1) = mj_range(j);
        let coeffs = (m0..=m1)
            .into_par_iter()
            .map(|m| alpha.e_mul((m as i128) * (m as i128)) * psi_j(j, m as f64))
            .collect();
        Ok(Self { j, m0, coeffs })
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    pub fn eval(&self, beta: f64) -> Complex64 {
        let m0 = self.m0;
        chunked_sum(self.coeffs.len(), |i| self.coeffs[i] * odd_factor(beta, m0 + i as i64))
    }

    /// `M_j(k/L)` for `k = 0..L`.
    pub fn grid(&self, l: usize) -> Result<GridFunction> {
        if l == 0 {
            return param("grid size must be positive");
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); l];
        let li = l as i64;
        for (i, c) in self.coeffs.iter().enumerate() {
            let m = self.m0 + i as i64;
            buf[m.rem_euclid(li) as usize] += c;
            buf[(-m).rem_euclid(li) as usize] -= c;
        }
        fft::forward(&mut buf);
        GridFunction::new(buf)
    }

    /// The kernel `e(αm²) ψ_j(m)`.
    pub fn kernel_value(&self, m: i64) -> Complex64 {
        let a = m.abs();
        let i = a - self.m0;
        if i < 0 || i as usize >= self.coeffs.len() {
            return Complex64::new(0.0, 0.0);
        }
        let c = self.coeffs[i as usize];
        if m > 0 {
            c
        } else {
            -c
        }
    }
}

impl BetaEvaluator for MjEvaluator {
    fn eval(&self, beta: f64) -> Result<Complex64> {
        Ok(MjEvaluator::eval(self, beta))
    }

    fn grid(&self, l: usize) -> Result<Vec<Complex64>> {
        Ok(MjEvaluator::grid(self, l)?.values().to_vec())
    }
}

/// `M_j^α(β)` by exact summation over `2^{j-2} <= |m| <= 2^j`.
pub fn eval_mj(alpha: &TorusPoint, beta: f64, j: u32) -> Result<Complex64> {
    if j > MAX_J_POINT {
        return Err(LabError::Resource(format!(
            "M_j is capped at j <= {MAX_J_POINT}, got {j}"
        )));
    }
    let (m0, m1) = mj_range(j);
    Ok(chunked_sum((m1 - m0 + 1) as usize, |i| {
        let m = m0 + i as i64;
        alpha.e_mul((m as i128) * (m as i128)) * psi_j(j, m as f64) * odd_factor(beta, m)
    }))
}

/// `M_j^α(k/L)` for `k = 0..L`.
pub fn mj_grid(alpha: &TorusPoint, j: u32, l: usize) -> Result<GridFunction> {
    MjEvaluator::new(alpha, j)?.grid(l)
}

fn check_truncation(n: u64) -> Result<()> {
    if n == 0 {
        return param("truncation N must be positive");
    }
    if n > MAX_TRUNCATION {
        return Err(LabError::Resource(format!("truncation N is capped at 2^26, got {n}")));
    }
    Ok(())
}

/// `Σ_{0<|m|<=N} e(αm² - βm)/m`.
pub fn eval_m_truncated(alpha: &TorusPoint, beta: f64, n: u64) -> Result<Complex64> {
    check_truncation(n)?;
    Ok(chunked_sum(n as usize, |i| {
        let m = i as i64 + 1;
        alpha.e_mul((m as i128) * (m as i128)) * odd_factor(beta, m) / m as f64
    }))
}

/// `M^{α,N}(k/L)` for `k = 0..L`.
pub fn m_truncated_grid(alpha: &TorusPoint, n: u64, l: usize) -> Result<GridFunction> {
    check_truncation(n)?;
    if l == 0 {
        return param("grid size must be positive");
    }
    let coeffs: Vec<Complex64> = (1..=n as i64)
        .into_par_iter()
        .map(|m| alpha.e_mul((m as i128) * (m as i128)) / m as f64)
        .collect();
    let li = l as i64;
    let mut buf = vec![Complex64::new(0.0, 0.0); l];
    for (i, c) in coeffs.iter().enumerate() {
        let m = i as i64 + 1;
        buf[m.rem_euclid(li) as usize] += c;
        buf[(-m).rem_euclid(li) as usize] -= c;
    }
    fft::forward(&mut buf);
    GridFunction::new(buf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::e;
    use std::f64::consts::PI;

    fn real(x: f64) -> TorusPoint {
        TorusPoint::real(x).unwrap()
    }

    /// Oracle: the two-sided sum written out with floating phases.
    fn naive_mj(alpha: f64, beta: f64, j: u32) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for m in -(1i64 << j)..=(1i64 << j) {
            let mf = m as f64;
            acc += e(alpha * mf * mf - beta * mf) * psi_j(j, mf);
        }
        acc
    }

    #[test]
    fn zero_at_origin() {
        for j in 1..12 {
            assert_eq!(eval_mj(&TorusPoint::zero(), 0.0, j).unwrap(), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn matches_two_sided_sum() {
        for &(a, b, j) in &[(0.3, 0.11, 7), (0.618, 0.5, 9), (0.0, 0.25, 5)] {
            let got = eval_mj(&real(a), b, j).unwrap();
            assert!((got - naive_mj(a, b, j)).norm() < 1e-11, "{a} {b} {j}");
        }
    }

    #[test]
    fn conjugation_symmetry() {
        let a = real(0.37);
        for &(b, j) in &[(0.2, 8), (0.91, 10)] {
            let lhs = eval_mj(&a.neg(), 1.0 - b, j).unwrap();
            let rhs = eval_mj(&a, b, j).unwrap().conj();
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn grid_agrees_with_points() {
        let a = TorusPoint::rational(2, 5).unwrap();
        let g = mj_grid(&a, 8, 64).unwrap();
        for k in [0, 1, 17, 40, 63] {
            let p = eval_mj(&a, k as f64 / 64.0, 8).unwrap();
            assert!((g.values()[k] - p).norm() < 1e-12);
        }
    }

    #[test]
    fn over_cap_is_resource_error() {
        assert!(matches!(
            eval_mj(&TorusPoint::zero(), 0.1, 27),
            Err(LabError::Resource(_))
        ));
    }

    #[test]
    fn truncated_two_terms() {
        let (a, b) = (0.3, 0.2);
        let got = eval_m_truncated(&real(a), b, 1).unwrap();
        assert!((got - (e(a - b) - e(a + b))).norm() < 1e-15);
    }

    #[test]
    fn sawtooth_closed_form() {
        // Σ_{m≠0} e(-βm)/m = -iπ(1 - 2β) on (0, 1)
        let q = eval_m_truncated(&TorusPoint::zero(), 0.25, 100_000).unwrap();
        assert!((q + Complex64::new(0.0, PI / 2.0)).norm() < 1e-3);
        let t = eval_m_truncated(&TorusPoint::zero(), 0.75, 100_000).unwrap();
        assert!((t - Complex64::new(0.0, PI / 2.0)).norm() < 1e-3);
        let g = m_truncated_grid(&TorusPoint::zero(), 100_000, 8).unwrap();
        assert!((g.values()[2] - q).norm() < 1e-9);
    }

    #[test]
    fn pieces_telescope_to_partial_sum() {
        // ψ_j(m) sums to 1/m, so Σ_{j<=J} M_j equals M^{α,N} on |m| < 2^{J-1}
        // plus pieces beyond; compare on a range where both are complete.
        let a = real(0.2137);
        let b = 0.377;
        let sum: Complex64 = (0..=12).map(|j| eval_mj(&a, b, j).unwrap()).sum();
        // the j = 12 piece reaches 2^12, so compare with partial sums up to 2^11
        // plus the partial contributions on (2^11, 2^12]
        let mut tail = Complex64::new(0.0, 0.0);
        for m in 2049i64..=4096 {
            let w: f64 = (0..=12).map(|j| psi_j(j, m as f64)).sum();
            tail += a.e_mul((m * m) as i128) * odd_factor(b, m) * w;
        }
        let head = eval_m_truncated(&a, b, 2048).unwrap();
        assert!((sum - head - tail).norm() < 1e-10);
    }
}
