//! The centered Hardy–Littlewood maximal function on ℤ.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::signal::{Signal, Window};

/// `M_HL f(n) = sup_{N>=0} (2N+1)⁻¹ Σ_{|j|<=N} |f(n-j)|` for `n` in the window.
///
/// Radii beyond the farthest support point only dilute the average, so the
/// sup runs over `N <= max(|n - a|, |n - b|)` with prefix sums.
pub fn mhl(f: &Signal, window: &Window) -> Signal {
    let w = window.interval();
    let Some(supp) = f.support() else {
        return Signal::zero();
    };
    let mut prefix = vec![0.0];
    let mut acc = 0.0;
    for v in f.values() {
        acc += v.norm();
        prefix.push(acc);
    }
    let (a, b) = (supp.a(), supp.b());
    let mass = |lo: i64, hi: i64| -> f64 {
        let lo = (lo.max(a) - a) as usize;
        let hi = hi.min(b) - a + 1;
        if hi <= lo as i64 {
            0.0
        } else {
            prefix[hi as usize] - prefix[lo]
        }
    };
    let values: Vec<Complex64> = w
        .iter()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&n| {
            // radii below the distance to the support give zero
            let start = if n < a {
                a - n
            } else if n > b {
                n - b
            } else {
                0
            };
            let end = (n - a).abs().max((n - b).abs());
            let best = (start..=end)
                .map(|r| mass(n - r, n + r) / (2 * r + 1) as f64)
                .fold(0.0, f64::max);
            Complex64::new(best, 0.0)
        })
        .collect();
    Signal::new(w.a(), values)
}
