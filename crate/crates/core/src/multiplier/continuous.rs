//! `U_j(x, y) = ∫ e(x t² - y t) ψ_j(t) dt`.
//!
//! After `t = 2^j u` this is `∫ e(X u² - Y u) ψ(u) du` with `X = 4^j x`,
//! `Y = 2^j y`. Folding `±u` together gives
//! `∫_{1/4}^{1} e(X u²) (-2i sin 2πYu) ψ(u) du`, which is exactly zero at
//! `Y = 0` and exactly imaginary at `X = 0`. The two smooth pieces
//! `[1/4, 1/2]` and `[1/2, 1]` of `ψ` are integrated separately.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use super::bump::psi;
use super::quadrature::{composite_nodes, QuadratureSettings};
use crate::error::{LabError, Result};

const CACHE_LIMIT: usize = 1 << 14;

/// `(u, w ψ(u))` for the composite rule with `panels` panels on each piece.
fn psi_nodes(panels: usize) -> Arc<Vec<(f64, f64)>> {
    let build = || {
        let mut v = composite_nodes(0.25, 0.5, panels);
        v.extend(composite_nodes(0.5, 1.0, panels));
        Arc::new(v.into_iter().map(|(u, w)| (u, w * psi(u))).collect::<Vec<_>>())
    };
    if panels > CACHE_LIMIT {
        return build();
    }
    type Nodes = Arc<Vec<(f64, f64)>>;
    static CACHE: OnceLock<Mutex<HashMap<usize, Nodes>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().unwrap().get(&panels) {
        return v.clone();
    }
    let v = build();
    cache.lock().unwrap().insert(panels, v.clone());
    v
}

fn integrate(xs: f64, ys: f64, panels: usize) -> Complex64 {
    let nodes = psi_nodes(panels);
    let tau = std::f64::consts::TAU;
    let mut acc = Complex64::new(0.0, 0.0);
    for &(u, wpsi) in nodes.iter() {
        let ph = xs * u * u;
        let ph = ph - ph.floor();
        let (s, c) = (tau * ph).sin_cos();
        let sy = (tau * ys * u).sin();
        // e(X u²) · (-2i sin 2πYu)
        acc += Complex64::new(2.0 * s * sy, -2.0 * c * sy) * wpsi;
    }
    acc
}

/// `U_j(x, y)` by panel quadrature with one doubling check and one retry.
pub fn eval_uj(x: f64, y: f64, j: u32, quad: &QuadratureSettings) -> Result<Complex64> {
    let xs = x * 4f64.powi(j as i32);
    let ys = y * 2f64.powi(j as i32);
    if ys == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let wanted = (quad.panels_per_oscillation * (1.0 + xs.abs() + ys.abs())).ceil();
    if !wanted.is_finite() || wanted > quad.max_panels as f64 {
        return Err(LabError::Numeric(format!(
            "U_{j}({x:e}, {y:e}): {wanted} panels needed, cap {}",
            quad.max_panels
        )));
    }
    let n = (wanted as usize).max(quad.min_panels).next_power_of_two();
    let coarse = integrate(xs, ys, n);
    let fine = integrate(xs, ys, 2 * n);
    let diff = (fine - coarse).norm();
    if diff < quad.tolerance {
        return Ok(fine);
    }
    if 4 * n <= quad.max_panels {
        let finer = integrate(xs, ys, 4 * n);
        let diff2 = (finer - fine).norm();
        if diff2 < quad.tolerance {
            return Ok(finer);
        }
        return Err(LabError::Numeric(format!(
            "U_{j}({x:e}, {y:e}) did not settle: panel doubling changed the value by {diff:e} then {diff2:e} (tolerance {:e}, {} panels)",
            quad.tolerance,
            4 * n
        )));
    }
    Err(LabError::Numeric(format!(
        "U_{j}({x:e}, {y:e}) did not settle: change {diff:e} at {} panels, cap {}",
        2 * n,
        quad.max_panels
    )))
}

/// `Σ_{j=j_lo}^{j_hi} U_j(x, y)`.
pub fn eval_u_sum(x: f64, y: f64, j_lo: u32, j_hi: u32, quad: &QuadratureSettings) -> Result<Complex64> {
    (j_lo..=j_hi).map(|j| eval_uj(x, y, j, quad)).sum()
}
