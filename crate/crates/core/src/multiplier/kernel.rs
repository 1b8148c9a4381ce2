//! The convolution kernel `F⁻¹E_j(m)`.
//!
//! `F⁻¹M_j(m) = e(αm²) ψ_j(m)` exactly; `F⁻¹L_j` is the inverse DFT of `L_j`
//! sampled at `k/L`. The kernel is split at `|m| <= 2^{3j}` into a near and
//! a far part; at desk scale the far part is usually empty.

use num_complex::Complex64;

use super::major::EjEvaluator;
use super::MultiplierModel;
use crate::error::{param, Result};
use crate::fft;
use crate::phase::TorusPoint;
use crate::signal::Signal;

#[derive(Clone, Debug)]
pub struct EjKernel {
    /// `F⁻¹E_j(m)` for `m ∈ [-L/2, L/2)`.
    pub kernel: Signal,
    pub near: Signal,
    pub far: Signal,
    /// `2^{3j}`, saturating.
    pub split: i64,
    pub grid_len: usize,
}

/// `F⁻¹E_j^α` on `[-L/2, L/2)`; needs `L >= 2^{j+3}`.
pub fn kernel_ej(alpha: &TorusPoint, j: u32, model: &MultiplierModel, l: usize) -> Result<EjKernel> {
    let need = 1usize << (j + 3);
    if l < need {
        return param(format!("kernel grid needs L >= 2^(j+3) = {need}, got {l}"));
    }
    let ev = EjEvaluator::new(alpha, j, model)?;
    let mut lj = ev.lj_grid(l)?;
    fft::inverse(&mut lj);
    let half = (l / 2) as i64;
    let li = l as i64;
    let values: Vec<Complex64> = (-half..half)
        .map(|m| ev.mj().kernel_value(m) - lj[m.rem_euclid(li) as usize])
        .collect();
    let split = 1i64.checked_shl(3 * j).filter(|v| *v > 0).unwrap_or(i64::MAX);
    let near: Vec<Complex64> = (-half..half)
        .zip(&values)
        .map(|(m, v)| if m.abs() <= split { *v } else { Complex64::new(0.0, 0.0) })
        .collect();
    let far: Vec<Complex64> = values.iter().zip(&near).map(|(v, n)| v - n).collect();
    Ok(EjKernel {
        kernel: Signal::new(-half, values),
        near: Signal::new(-half, near),
        far: Signal::new(-half, far),
        split,
        grid_len: l,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiplier::bump::psi_j;
    use crate::multiplier::BetaEvaluator;
    use crate::signal::dft_on_grid;

    #[test]
    fn minor_alpha_gives_exact_mj_kernel() {
        let a = TorusPoint::golden();
        let m = MultiplierModel::with_epsilon(0.05).unwrap();
        let k = kernel_ej(&a, 8, &m, 1 << 11).unwrap();
        for n in [-256i64, -100, -64, 0, 63, 64, 200, 256] {
            let want = a.e_mul((n as i128) * (n as i128)) * psi_j(8, n as f64);
            assert!((k.kernel.get(n) - want).norm() < 1e-15, "m = {n}");
        }
        assert!(k.far.is_zero());
    }

    #[test]
    fn round_trip_recovers_ej() {
        let a = TorusPoint::rational(1, 2).unwrap();
        let m = MultiplierModel::with_epsilon(0.15).unwrap();
        let l = 1 << 11;
        let k = kernel_ej(&a, 8, &m, l).unwrap();
        let ev = EjEvaluator::new(&a, 8, &m).unwrap();
        let dft = dft_on_grid(&k.kernel, l).unwrap();
        let lj_nonzero = ev.lj_grid(l).unwrap().iter().any(|v| v.norm() > 1e-6);
        assert!(lj_nonzero);
        for idx in [0usize, 5, l / 2 - 3, l / 2, l / 2 + 7, l - 1] {
            let want = BetaEvaluator::eval(&ev, idx as f64 / l as f64).unwrap();
            assert!((dft[idx] - want).norm() < 1e-9, "k = {idx}");
        }
    }

    #[test]
    fn coarse_grid_rejected() {
        let m = MultiplierModel::default();
        assert!(kernel_ej(&TorusPoint::zero(), 8, &m, 1 << 10).is_err());
    }
}
