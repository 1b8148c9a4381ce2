//! A numerical laboratory for the discrete quadratic-phase Hilbert transform
//!
//! ```text
//! H^α f(n) = Σ_{m≠0} e(α m²) f(n - m) / m,     e(t) = exp(2πi t),
//! ```
//!
//! its circle-method multiplier decomposition, and sparse bilinear forms.
//!
//! Module map:
//!
//! * [`signal`]: signals on ℤ, `L^r` averages, `H^α` by direct summation or FFT.
//! * [`number_theory`]: reduced fractions, rational levels, Gauss sums,
//!   continued fractions, major-arc boxes.
//! * [`multiplier`]: the bumps `ψ`, `χ`, the pieces `M_j`, `U_j`, `L_{j,s}`, `E_j`
//!   and their kernels.
//! * [`sparse`]: sparse collections and forms, the universal sparse form, the
//!   Hardy–Littlewood maximal function, modulation projections.
//! * [`weights`]: `A_2` and reverse-Hölder characteristics and weighted ratios.
//! * [`harness`]: experiment configuration, the experiment registry and reports.

// `!(x > 0.0)` style guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fft;
pub mod harness;
pub mod multiplier;
pub mod number_theory;
pub mod phase;
pub mod signal;
pub mod sparse;
pub mod weights;

pub use error::{LabError, Result};
pub use num_complex::Complex64;
pub use phase::{e, TorusPoint};
pub use signal::{apply_halpha, dft_on_grid, inner_product, lr_average, DiscreteInterval, Method, Signal, Window};
