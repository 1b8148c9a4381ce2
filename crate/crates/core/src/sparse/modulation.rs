//! Modulation projections `f_{s,B/Q} = F⁻¹(χ_s^{1/2}) * Mod_{-B/Q} f` and the
//! transfer of `⟨T_{Ľ^{α,s}} f, g⟩` onto them.
//!
//! Everything is computed on a frequency grid `k/L` with `L` a multiple of `Q`,
//! so the shift by `B/Q` is an exact index shift. The windows
//! `{|β - B/Q| < radius(χ_s)}` around distinct `B/Q` are disjoint, which makes
//! Bessel's inequality exact on the grid.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{param, Result};
use crate::fft;
use crate::multiplier::{chi_s, eval_uj, MultiplierModel};
use crate::number_theory::{find_alpha_s, gauss_sum, ReducedFraction};
use crate::phase::{gcd, signed_torus_diff};
use crate::signal::Signal;

/// `f_s^α = {f_{s,B/Q}}` over `B/Q` with `B` coprime to the denominator of `α_s`.
#[derive(Clone, Debug)]
pub struct ModulationFamily {
    pub s: u32,
    pub alpha_s: Option<ReducedFraction>,
    pub grid_len: usize,
    /// Spatial window start; each component is stored on `[start, start + L)`.
    pub start: i64,
    pub components: Vec<(ReducedFraction, Signal)>,
    spectra: Vec<Vec<Complex64>>,
}

impl ModulationFamily {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// `Σ ‖f_{s,B/Q}‖²`.
    pub fn energy(&self) -> f64 {
        self.components.iter().map(|(_, c)| c.norm_sq()).sum()
    }

    /// Grid samples of `f̂_{s,B/Q}` in component order.
    pub fn spectra(&self) -> &[Vec<Complex64>] {
        &self.spectra
    }

    /// The source windows `{k : χ_s(k/L - B/Q) > 0}` are pairwise disjoint.
    pub fn source_windows_disjoint(&self) -> bool {
        let l = self.grid_len;
        let mut owner = vec![usize::MAX; l];
        for (idx, (b, _)) in self.components.iter().enumerate() {
            for (k, slot) in owner.iter_mut().enumerate() {
                let y = signed_torus_diff(k as f64 / l as f64, b.value());
                if chi_s(self.s, y) > 0.0 {
                    if *slot != usize::MAX {
                        return false;
                    }
                    *slot = idx;
                }
            }
        }
        true
    }
}

/// Smallest multiple of `q` that is at least `l`.
fn round_up(l: usize, q: u64) -> usize {
    l.div_ceil(q as usize) * q as usize
}

/// Grid length actually used: at least `l` and a multiple of the denominator.
pub fn projection_grid(l: usize, q: u64) -> usize {
    round_up(l, q)
}

/// `f̂(k/L)` with `f` folded modulo `L`.
fn spectrum(f: &Signal, l: usize) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); l];
    for (i, v) in f.values().iter().enumerate() {
        let n = f.offset() + i as i64;
        buf[n.rem_euclid(l as i64) as usize] += v;
    }
    fft::forward(&mut buf);
    buf
}

/// Grid for level `s`: `L >= 10^{s+2}` resolves `χ_s`, and `L` must hold `f`.
fn check_grid(f: &Signal, s: u32, l: usize) -> Result<()> {
    let need = 10usize.pow(s + 2);
    if l < need {
        return param(format!("grid {l} cannot resolve χ_{s}; need L >= 10^(s+2) = {need}"));
    }
    if l < f.values().len() {
        return param(format!(
            "grid {l} is shorter than the support length {}",
            f.values().len()
        ));
    }
    Ok(())
}

/// Samples of `χ_s^{1/2}(k/L)`, `k` read as a signed frequency.
fn sqrt_chi_grid(s: u32, l: usize) -> Vec<f64> {
    (0..l)
        .map(|k| chi_s(s, signed_torus_diff(k as f64 / l as f64, 0.0)).sqrt())
        .collect()
}

/// Residues `B` coprime to `q` (just `0` when `q = 1`).
fn residues(q: u64) -> Vec<u64> {
    (0..q).filter(|&b| gcd(b, q) == 1).collect()
}

/// The family `f_s^α` on a grid of at least `l` points (rounded up to a
/// multiple of `Q`); empty when no level-`s` fraction is near `α`.
pub fn modulation_projection(f: &Signal, s: u32, alpha: f64, l: usize) -> Result<ModulationFamily> {
    check_grid(f, s, l)?;
    let center = f.support().map(|i| (i.a() + i.b()) / 2).unwrap_or(0);
    let Some(a) = find_alpha_s(alpha, s) else {
        return Ok(ModulationFamily {
            s,
            alpha_s: None,
            grid_len: l,
            start: center - (l / 2) as i64,
            components: Vec::new(),
            spectra: Vec::new(),
        });
    };
    let q = a.den();
    let l = round_up(l, q);
    let start = center - (l / 2) as i64;
    let fh = spectrum(f, l);
    let root = sqrt_chi_grid(s, l);
    let step = l / q as usize;
    let parts: Vec<(ReducedFraction, Signal, Vec<Complex64>)> = residues(q)
        .into_par_iter()
        .map(|b| {
            let shift = b as usize * step;
            let spec: Vec<Complex64> = (0..l).map(|k| fh[(k + shift) % l] * root[k]).collect();
            let mut buf = spec.clone();
            fft::inverse(&mut buf);
            let values = (0..l as i64)
                .map(|i| buf[(start + i).rem_euclid(l as i64) as usize])
                .collect();
            (
                ReducedFraction::new(b as i64, q).expect("coprime"),
                Signal::new(start, values),
                spec,
            )
        })
        .collect();
    let mut components = Vec::with_capacity(parts.len());
    let mut spectra = Vec::with_capacity(parts.len());
    for (b, sig, spec) in parts {
        components.push((b, sig));
        spectra.push(spec);
    }
    Ok(ModulationFamily {
        s,
        alpha_s: Some(a),
        grid_len: l,
        start,
        components,
        spectra,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TransferReport {
    pub s: u32,
    pub alpha: f64,
    pub alpha_s: Option<String>,
    pub grid_len: usize,
    pub j_range: (u32, u32),
    pub lhs_re: f64,
    pub lhs_im: f64,
    pub rhs_re: f64,
    pub rhs_im: f64,
    pub relative_discrepancy: f64,
    /// `max|S| · Σ_B ‖f_{s,B/Q}‖ ‖g_{s,B/Q}‖ · max|χ_s(α-α_s) U^s|`.
    pub gauss_bound: f64,
    pub bound_holds: bool,
}

/// Both sides of
/// `⟨T_{Ľ^{α,s}} f, g⟩ = χ_s(α - α_s) Σ_{B/Q} S(α_s, B/Q) ⟨T_{Ǔ^s} f_{s,B/Q}, g_{s,B/Q}⟩`
/// with `L^{α,s} = Σ_j L_{j,s}` and `U^s = Σ_j U_j(α - α_s, ·)` over
/// `⌈s/ε⌉ <= j <= j_max`.
pub fn major_transfer_check(
    f: &Signal,
    g: &Signal,
    s: u32,
    alpha: f64,
    model: &MultiplierModel,
    j_max: u32,
    l: usize,
) -> Result<TransferReport> {
    let j_min = (s as f64 / model.epsilon - 1e-9).ceil().max(1.0) as u32;
    if j_max < j_min {
        return param(format!("j_max = {j_max} is below the first active piece j = {j_min}"));
    }
    check_grid(f, s, l)?;
    check_grid(g, s, l)?;
    let zero_report = |l: usize| TransferReport {
        s,
        alpha,
        alpha_s: None,
        grid_len: l,
        j_range: (j_min, j_max),
        lhs_re: 0.0,
        lhs_im: 0.0,
        rhs_re: 0.0,
        rhs_im: 0.0,
        relative_discrepancy: 0.0,
        gauss_bound: 0.0,
        bound_holds: true,
    };
    let Some(a) = find_alpha_s(alpha, s) else {
        return Ok(zero_report(l));
    };
    let q = a.den();
    let l = round_up(l, q);
    let x = signed_torus_diff(alpha, a.value());
    let wx = chi_s(s, x);
    let quad = &model.quadrature;
    let u_sum = |y: f64| -> Result<Complex64> { (j_min..=j_max).map(|j| eval_uj(x, y, j, quad)).sum() };

    // left side: the multiplier L^{α,s} on the grid against f̂ conj(ĝ)
    let fh = spectrum(f, l);
    let gh = spectrum(g, l);
    let res = residues(q);
    let sums: Vec<Complex64> = res
        .iter()
        .map(|&b| gauss_sum(a.num() as i64, b as i64, q))
        .collect::<Result<_>>()?;
    let lhs_terms: Vec<Complex64> = (0..l)
        .into_par_iter()
        .map(|k| {
            let beta = k as f64 / l as f64;
            let mut acc = Complex64::new(0.0, 0.0);
            for (&b, sg) in res.iter().zip(&sums) {
                let y = signed_torus_diff(beta, b as f64 / q as f64);
                let wy = chi_s(s, y);
                if wy > 0.0 {
                    acc += sg * u_sum(y)? * (wx * wy) * fh[k] * gh[k].conj();
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let lhs: Complex64 = lhs_terms.iter().sum::<Complex64>() / l as f64;

    // right side: through the projections
    let pf = modulation_projection(f, s, alpha, l)?;
    let pg = modulation_projection(g, s, alpha, l)?;
    let window: Vec<usize> = (0..l)
        .filter(|&k| chi_s(s, signed_torus_diff(k as f64 / l as f64, 0.0)) > 0.0)
        .collect();
    let u_vals: Vec<Complex64> = window
        .par_iter()
        .map(|&k| u_sum(signed_torus_diff(k as f64 / l as f64, 0.0)))
        .collect::<Result<_>>()?;
    let mut rhs = Complex64::new(0.0, 0.0);
    let mut bound_sum = 0.0;
    for (i, sg) in sums.iter().enumerate() {
        let (sf, sgr) = (&pf.spectra()[i], &pg.spectra()[i]);
        let inner: Complex64 = window
            .iter()
            .zip(&u_vals)
            .map(|(&k, u)| u * sf[k] * sgr[k].conj())
            .sum::<Complex64>()
            / l as f64;
        rhs += sg * inner;
        bound_sum += pf.components[i].1.norm_l2() * pg.components[i].1.norm_l2();
    }
    rhs *= wx;
    let max_s = sums.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let max_u = u_vals.iter().map(|v| v.norm()).fold(0.0, f64::max) * wx;
    let gauss_bound = max_s * bound_sum * max_u;
    let scale = lhs.norm().max(rhs.norm());
    let relative_discrepancy = if scale == 0.0 { 0.0 } else { (lhs - rhs).norm() / scale };
    Ok(TransferReport {
        s,
        alpha,
        alpha_s: Some(a.to_string()),
        grid_len: l,
        j_range: (j_min, j_max),
        lhs_re: lhs.re,
        lhs_im: lhs.im,
        rhs_re: rhs.re,
        rhs_im: rhs.im,
        relative_discrepancy,
        gauss_bound,
        bound_holds: lhs.norm() <= gauss_bound * (1.0 + 1e-9) + 1e-300,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::ratio::{trial_rng, Ensemble};

    fn random(n: usize, seed: u64) -> Signal {
        Ensemble::Gaussian.draw(n, 0, &mut trial_rng(seed, 0))
    }

    #[test]
    fn bessel_on_random_signals() {
        for s in 1..=3 {
            for seed in 0..3 {
                let f = random(256, seed);
                let fam = modulation_projection(&f, s, 0.5, 10usize.pow(s + 2)).unwrap();
                assert!(fam.len() <= 1 << (2 * s));
                assert!(fam.energy() <= f.norm_sq() + 1e-10);
                assert!(fam.source_windows_disjoint());
            }
        }
    }

    #[test]
    fn no_alpha_s_gives_empty_family() {
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        let fam = modulation_projection(&random(64, 1), 2, golden, 10_000).unwrap();
        assert!(fam.is_empty());
    }

    #[test]
    fn coarse_grid_rejected() {
        assert!(modulation_projection(&random(64, 1), 2, 0.5, 9_999).is_err());
    }

    /// `f` with `f̂` a prescribed grid function, via one inverse DFT.
    fn from_spectrum(spec: Vec<Complex64>) -> Signal {
        let mut buf = spec;
        fft::inverse(&mut buf);
        Signal::new(0, buf)
    }

    #[test]
    fn single_window_components() {
        // f̂ = χ_s^{1/2}(· - 1/3) gives one component with f̂_{1/3} = χ_s
        let (s, l) = (2u32, 30_000usize);
        let c = 1.0 / 3.0;
        let spec: Vec<Complex64> = (0..l)
            .map(|k| Complex64::new(chi_s(s, signed_torus_diff(k as f64 / l as f64, c)).sqrt(), 0.0))
            .collect();
        let f = from_spectrum(spec);
        let fam = modulation_projection(&f, s, 1.0 / 3.0, l).unwrap();
        assert_eq!(fam.grid_len, l);
        let want: f64 = (0..l)
            .map(|k| chi_s(s, signed_torus_diff(k as f64 / l as f64, 0.0)).powi(2))
            .sum::<f64>()
            / l as f64;
        for (b, comp) in &fam.components {
            if b.num() == 1 {
                assert!((comp.norm_sq() - want).abs() < 1e-12);
            } else {
                assert!(comp.norm_sq() < 1e-24);
            }
        }
        // spectrum supported where χ_s = 1: equality in Bessel
        let spec: Vec<Complex64> = (0..l)
            .map(|k| {
                let on = chi_s(s, signed_torus_diff(k as f64 / l as f64, c)) == 1.0;
                Complex64::new(if on { 1.0 } else { 0.0 }, 0.0)
            })
            .collect();
        let f = from_spectrum(spec);
        let fam = modulation_projection(&f, s, 1.0 / 3.0, l).unwrap();
        assert!((fam.energy() - f.norm_sq()).abs() < 1e-12);
    }

    #[test]
    fn transfer_identity_at_half() {
        let m = MultiplierModel::default();
        let f = random(256, 11);
        let g = random(256, 12);
        let j_max = (1.0 / m.epsilon).ceil() as u32 + 4;
        let r = major_transfer_check(&f, &g, 1, 0.5, &m, j_max, 1000).unwrap();
        assert!(r.lhs_re.hypot(r.lhs_im) > 0.0);
        assert!(r.relative_discrepancy <= 1e-6, "{r:?}");
        assert!(r.bound_holds);
        let r2 = major_transfer_check(&f.scale(Complex64::new(2.0, 0.0)), &g, 1, 0.5, &m, j_max, 1000).unwrap();
        assert!((r2.lhs_re - 2.0 * r.lhs_re).abs() <= 1e-12 * r.lhs_re.abs().max(1.0));
        assert!((r2.rhs_im - 2.0 * r.rhs_im).abs() <= 1e-12 * r.rhs_im.abs().max(1.0));
    }

    #[test]
    fn transfer_vanishes_without_alpha_s() {
        let m = MultiplierModel::default();
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        let r = major_transfer_check(&random(64, 1), &random(64, 2), 1, golden, &m, 11, 1000).unwrap();
        assert_eq!((r.lhs_re, r.rhs_re, r.relative_discrepancy), (0.0, 0.0, 0.0));
    }
}
