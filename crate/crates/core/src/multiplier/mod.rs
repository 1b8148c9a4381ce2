//! The multiplier `M^α(β) = Σ_{m≠0} e(αm² - βm)/m` and its circle-method pieces.
//!
//! * [`bump`]: the dyadic resolution `ψ_j` of `1/t` and the cutoff `χ_s`.
//! * [`quadrature`]: composite Gauss–Legendre panels.
//! * [`pieces`]: `M_j` and truncated `M` by exact summation or FFT grids.
//! * [`continuous`]: the oscillatory integral `U_j`.
//! * [`major`]: `L_{j,s}`, `L_j` and the error `E_j = M_j - L_j`.
//! * [`kernel`]: `F⁻¹E_j` on a grid.
//! * [`sup`]: sup-norm estimates over `β`.

pub mod bump;
pub mod continuous;
pub mod kernel;
pub mod major;
pub mod pieces;
pub mod quadrature;
pub mod sup;

use serde::{Deserialize, Serialize};

pub use bump::{chi, chi_s, psi, psi_j, BumpFunction, BumpKind};
pub use continuous::{eval_u_sum, eval_uj};
pub use kernel::{kernel_ej, EjKernel};
pub use major::{eval_box_model, eval_ej, eval_lj, eval_ljs, EjEvaluator};
pub use pieces::{eval_m_truncated, eval_mj, m_truncated_grid, mj_grid, MjEvaluator, MAX_J_POINT, MAX_TRUNCATION};
pub use quadrature::QuadratureSettings;
pub use sup::{refinement_points, sup_on_grid, BetaEvaluator, SupEstimate};

use crate::error::{param, Result};

/// Samples `g(k/L)` for `k = 0..L`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    values: Vec<num_complex::Complex64>,
}

impl GridFunction {
    pub fn new(values: Vec<num_complex::Complex64>) -> Result<Self> {
        if values.is_empty() {
            return param("grid function needs at least one sample");
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return param("grid function has non-finite samples");
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[num_complex::Complex64] {
        &self.values
    }

    pub fn beta(&self, k: usize) -> f64 {
        k as f64 / self.values.len() as f64
    }

    /// `(max_k |g(k/L)|, argmax k)`, first maximizer on ties.
    pub fn sup(&self) -> (f64, usize) {
        let mut best = (f64::NEG_INFINITY, 0);
        for (k, v) in self.values.iter().enumerate() {
            let a = v.norm();
            if a > best.0 {
                best = (a, k);
            }
        }
        best
    }
}

/// Bumps, the arc parameter `ε` and quadrature settings used by the evaluators.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MultiplierModel {
    pub epsilon: f64,
    pub quadrature: QuadratureSettings,
}

impl MultiplierModel {
    pub fn new(epsilon: f64, quadrature: QuadratureSettings) -> Result<Self> {
        crate::number_theory::ArcParams::new(epsilon, 1)?;
        quadrature.validate()?;
        Ok(Self { epsilon, quadrature })
    }

    pub fn with_epsilon(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, QuadratureSettings::default())
    }

    pub fn psi(&self) -> BumpFunction {
        BumpFunction::new(BumpKind::Psi)
    }

    pub fn chi(&self) -> BumpFunction {
        BumpFunction::new(BumpKind::Chi)
    }

    pub fn arc(&self, j: u32) -> Result<crate::number_theory::ArcParams> {
        crate::number_theory::ArcParams::new(self.epsilon, j)
    }
}

impl Default for MultiplierModel {
    fn default() -> Self {
        Self {
            epsilon: 0.15,
            quadrature: QuadratureSettings::default(),
        }
    }
}
