//! Thin wrappers over `rustfft` with the sign conventions used in the lab.
//!
//! `forward` computes `X[k] = Σ_n x[n] e(-kn/L)` (the `f̂(k/L)` convention) and
//! `inverse` computes `x[n] = L⁻¹ Σ_k X[k] e(kn/L)`.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    // plans are cached per thread
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub fn forward(buf: &mut [Complex64]) {
    if buf.is_empty() {
        return;
    }
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()));
    fft.process(buf);
}

pub fn inverse(buf: &mut [Complex64]) {
    if buf.is_empty() {
        return;
    }
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()));
    fft.process(buf);
    let scale = 1.0 / buf.len() as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

/// Circular convolution of two equal-length buffers.
pub fn circular_convolve(a: &mut [Complex64], b: &mut [Complex64]) -> Vec<Complex64> {
    debug_assert_eq!(a.len(), b.len());
    forward(a);
    forward(b);
    let mut out: Vec<Complex64> = a.iter().zip(b.iter()).map(|(x, y)| x * y).collect();
    inverse(&mut out);
    out
}
