//! Weights on a window, their `A_2` and reverse-Hölder characteristics over
//! dyadic subintervals, and weighted `ℓ²` ratios of `H^α`.

use serde::{Deserialize, Serialize};

use crate::error::{param, LabError, Result};
use crate::phase::TorusPoint;
use crate::signal::{apply_halpha, DiscreteInterval, Method, Signal, Window};

/// Weight description used in configs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WeightSpec {
    /// `(1 + |n - mid|)^exponent`, renormalized to mean one.
    Power { exponent: f64 },
    /// Values listed from the left end of the window.
    Explicit { values: Vec<f64> },
}

impl WeightSpec {
    pub fn build(&self, window: Window) -> Result<Weight> {
        match self {
            WeightSpec::Power { exponent } => Weight::power(window, *exponent),
            WeightSpec::Explicit { values } => Weight::new(window, values.clone()),
        }
    }
}

/// A strictly positive function on a window.
#[derive(Clone, Debug, PartialEq)]
pub struct Weight {
    window: Window,
    values: Vec<f64>,
}

impl Weight {
    pub fn new(window: Window, values: Vec<f64>) -> Result<Self> {
        if values.len() != window.len() {
            return param(format!(
                "weight has {} values for a window of length {}",
                values.len(),
                window.len()
            ));
        }
        if let Some(i) = values.iter().position(|v| !(*v > 0.0 && v.is_finite())) {
            return param(format!(
                "weight value {} at offset {i} is not positive and finite",
                values[i]
            ));
        }
        Ok(Self { window, values })
    }

    pub fn constant(window: Window, c: f64) -> Result<Self> {
        Self::new(window, vec![c; window.len()])
    }

    /// `(1 + |n - mid|)^γ` on the window, scaled to mean one.
    pub fn power(window: Window, gamma: f64) -> Result<Self> {
        let w = window.interval();
        let mid = (w.a() as f64 + w.b() as f64) / 2.0;
        let raw: Vec<f64> = w.iter().map(|n| (1.0 + (n as f64 - mid).abs()).powf(gamma)).collect();
        let mean = raw.iter().sum::<f64>() / raw.len() as f64;
        Self::new(window, raw.into_iter().map(|v| v / mean).collect())
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, n: i64) -> f64 {
        self.values[(n - self.window.interval().a()) as usize]
    }

    pub fn inverse(&self) -> Weight {
        Weight {
            window: self.window,
            values: self.values.iter().map(|v| 1.0 / v).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Result<Weight> {
        Weight::new(self.window, self.values.iter().map(|v| v * c).collect())
    }
}

/// The window itself plus every dyadic block `[a + i 2^k, a + (i+1) 2^k)` inside it.
pub fn dyadic_family(window: Window) -> Vec<DiscreteInterval> {
    let w = window.interval();
    let n = w.len();
    let mut out = vec![w];
    let mut len = 1usize;
    while len <= n {
        for i in 0..n / len {
            let iv = DiscreteInterval::with_len(w.a() + (i * len) as i64, len).expect("nonempty");
            if iv != w {
                out.push(iv);
            }
        }
        len *= 2;
    }
    out
}

fn prefix(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut p = vec![0.0];
    let mut acc = 0.0;
    for v in values {
        acc += v;
        p.push(acc);
    }
    p
}

fn mean(p: &[f64], a0: i64, iv: &DiscreteInterval) -> f64 {
    let lo = (iv.a() - a0) as usize;
    let hi = (iv.b() - a0) as usize + 1;
    (p[hi] - p[lo]) / iv.len() as f64
}

/// `max_I ⟨w⟩_I ⟨w⁻¹⟩_I` over [`dyadic_family`].
pub fn a2_characteristic(w: &Weight) -> f64 {
    let a0 = w.window.interval().a();
    let pw = prefix(w.values.iter().copied());
    let pinv = prefix(w.values.iter().map(|v| 1.0 / v));
    dyadic_family(w.window)
        .iter()
        .map(|iv| mean(&pw, a0, iv) * mean(&pinv, a0, iv))
        .fold(1.0, f64::max)
}

/// `max_I ⟨w⟩_{I,r} / ⟨w⟩_{I,1}` over [`dyadic_family`]; needs `r > 1`.
pub fn rh_characteristic(w: &Weight, r: f64) -> Result<f64> {
    if !(r > 1.0) || !r.is_finite() {
        return param(format!("reverse Hölder exponent must be finite and > 1, got {r}"));
    }
    let a0 = w.window.interval().a();
    let pw = prefix(w.values.iter().copied());
    let pr = prefix(w.values.iter().map(|v| v.powf(r)));
    Ok(dyadic_family(w.window)
        .iter()
        .map(|iv| mean(&pr, a0, iv).powf(1.0 / r) / mean(&pw, a0, iv))
        .fold(1.0, f64::max))
}

/// `Σ |h(n)|² w(n)` over the weight's window.
pub fn weighted_norm_sq(h: &Signal, w: &Weight) -> f64 {
    w.window
        .interval()
        .iter()
        .zip(&w.values)
        .map(|(n, wv)| h.get(n).norm_sqr() * wv)
        .sum()
}

/// `‖H^α f‖_{ℓ²(w)} / ‖f‖_{ℓ²(w)}` with the output measured on the weight's window.
pub fn weighted_norm_ratio(alpha: &TorusPoint, f: &Signal, w: &Weight) -> Result<f64> {
    if f.is_zero() {
        return Err(LabError::Structural("weighted ratio of the zero signal".into()));
    }
    let h = apply_halpha(f, alpha, &w.window, Method::Fft)?;
    Ok((weighted_norm_sq(&h, w) / weighted_norm_sq(f, w)).sqrt())
}
