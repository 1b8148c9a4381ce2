//! Sup-norm estimates over `β ∈ 𝕋`.
//!
//! A uniform grid of `L` points is refined near every `B/Q` with `Q < 2^{εj}`
//! (where the major-arc structure lives) with step `10^{-s-2}` across the
//! `χ_s` window. The result is a lower bound for the true sup; the missed mass
//! is at most `2^{2j} h²` by the second-derivative bound, reported as
//! `derivative_slack`. The largest grid peaks are then polished by a
//! golden-section search within one grid step.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{param, Result};
use crate::number_theory::{chi_s_radius, level_of};
use crate::phase::{gcd, wrap_unit};

/// Something that can be evaluated at a frequency `β`.
pub trait BetaEvaluator: Sync {
    fn eval(&self, beta: f64) -> Result<Complex64>;

    /// Values at `k/L`; the default evaluates pointwise.
    fn grid(&self, l: usize) -> Result<Vec<Complex64>> {
        (0..l).into_par_iter().map(|k| self.eval(k as f64 / l as f64)).collect()
    }
}

impl<F> BetaEvaluator for F
where
    F: Fn(f64) -> Result<Complex64> + Sync,
{
    fn eval(&self, beta: f64) -> Result<Complex64> {
        self(beta)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupEstimate {
    pub sup: f64,
    pub argmax_beta: f64,
    pub grid_len: usize,
    pub refined_points: usize,
    pub polished_peaks: usize,
    /// `L / 2^{j+1}`: grid points per oscillation of the widest kernel frequency.
    pub oversampling: f64,
    /// `2^{2j} / L²`, the second-order grid error allowance.
    pub derivative_slack: f64,
}

/// Refinement points near every `B/Q` with `Q < 2^{εj}`.
pub fn refinement_points(epsilon: f64, j: u32) -> Vec<f64> {
    let qmax = 2f64.powf(epsilon * j as f64);
    let mut out = Vec::new();
    let mut q = 1u64;
    while (q as f64) < qmax {
        let s = level_of(q);
        let step = 10f64.powi(-(s as i32) - 2);
        let half = (chi_s_radius(s) / step).round() as i64;
        for b in 0..q {
            if gcd(b, q) != 1 && !(b == 0 && q == 1) {
                continue;
            }
            let c = b as f64 / q as f64;
            out.extend((-half..=half).map(|i| wrap_unit(c + i as f64 * step)));
        }
        q += 1;
    }
    out
}

const POLISHED_PEAKS: usize = 8;

/// Indices of the largest circular local maxima of `|g|`.
fn top_local_maxima(grid: &[Complex64], count: usize) -> Vec<usize> {
    let n = grid.len();
    let mut peaks: Vec<(f64, usize)> = (0..n)
        .filter_map(|k| {
            let v = grid[k].norm();
            let l = grid[(k + n - 1) % n].norm();
            let r = grid[(k + 1) % n].norm();
            (v > 0.0 && v >= l && v >= r).then_some((v, k))
        })
        .collect();
    peaks.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    peaks.truncate(count);
    peaks.into_iter().map(|p| p.1).collect()
}

/// Golden-section search for the max of `|g|` on `[lo, hi]`.
fn golden_max(ev: &dyn BetaEvaluator, mut lo: f64, mut hi: f64) -> Result<(f64, f64)> {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let f = |b: f64| ev.eval(wrap_unit(b)).map(|v| v.norm());
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..40 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// `max |g(β)|` over `β = k/L` and the rational refinement points.
pub fn sup_on_grid(ev: &dyn BetaEvaluator, epsilon: f64, j: u32, l: usize) -> Result<SupEstimate> {
    let need = 1usize << (j + 3);
    if l < need {
        return param(format!("sup grid needs L >= 2^(j+3) = {need}, got {l}"));
    }
    let grid = ev.grid(l)?;
    let mut sup = 0.0;
    let mut arg = 0.0;
    for (k, v) in grid.iter().enumerate() {
        if v.norm() > sup {
            sup = v.norm();
            arg = k as f64 / l as f64;
        }
    }
    let extra = refinement_points(epsilon, j);
    let vals: Vec<Complex64> = extra.par_iter().map(|&b| ev.eval(b)).collect::<Result<_>>()?;
    for (b, v) in extra.iter().zip(&vals) {
        if v.norm() > sup {
            sup = v.norm();
            arg = *b;
        }
    }
    let h = 1.0 / l as f64;
    let peaks = top_local_maxima(&grid, POLISHED_PEAKS);
    let polished: Vec<(f64, f64)> = peaks
        .par_iter()
        .map(|&k| golden_max(ev, k as f64 * h - h, k as f64 * h + h))
        .collect::<Result<_>>()?;
    for (b, v) in &polished {
        if *v > sup {
            sup = *v;
            arg = wrap_unit(*b);
        }
    }
    let scale = 2f64.powi(j as i32);
    Ok(SupEstimate {
        sup,
        argmax_beta: arg,
        grid_len: l,
        refined_points: extra.len(),
        polished_peaks: polished.len(),
        oversampling: l as f64 / (2.0 * scale),
        derivative_slack: scale * scale / (l as f64 * l as f64),
    })
}
