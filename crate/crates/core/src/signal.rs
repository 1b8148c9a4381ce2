//! Finitely supported signals on ℤ and the operator `H^α`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, LabError, Result};
use crate::fft;
use crate::phase::TorusPoint;

/// `ℤ ∩ [a, b]` with `a <= b`; its length is the cardinality `b - a + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DiscreteInterval {
    a: i64,
    b: i64,
}

impl DiscreteInterval {
    pub fn new(a: i64, b: i64) -> Result<Self> {
        if a > b {
            return param(format!("empty interval [{a}, {b}]"));
        }
        Ok(Self { a, b })
    }

    /// `[start, start + len)`; `len` must be positive.
    pub fn with_len(start: i64, len: usize) -> Result<Self> {
        if len == 0 {
            return param("interval of length zero");
        }
        Self::new(start, start + len as i64 - 1)
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn len(&self) -> usize {
        (self.b - self.a + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, n: i64) -> bool {
        self.a <= n && n <= self.b
    }

    pub fn contains_interval(&self, other: &DiscreteInterval) -> bool {
        self.a <= other.a && other.b <= self.b
    }

    pub fn hull(&self, other: &DiscreteInterval) -> DiscreteInterval {
        DiscreteInterval {
            a: self.a.min(other.a),
            b: self.b.max(other.b),
        }
    }

    pub fn intersect(&self, other: &DiscreteInterval) -> Option<DiscreteInterval> {
        let a = self.a.max(other.a);
        let b = self.b.min(other.b);
        (a <= b).then_some(DiscreteInterval { a, b })
    }

    /// Grow by `margin` points on each side.
    pub fn expand(&self, margin: i64) -> DiscreteInterval {
        DiscreteInterval {
            a: self.a - margin,
            b: self.b + margin,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.a..=self.b
    }
}

/// The computation domain of an operator output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window(pub DiscreteInterval);

impl Window {
    pub fn new(a: i64, b: i64) -> Result<Self> {
        Ok(Window(DiscreteInterval::new(a, b)?))
    }

    /// Support hull expanded by four times its diameter on each side.
    pub fn around(f: &Signal) -> Result<Self> {
        let hull = f
            .support()
            .ok_or_else(|| LabError::Parameter("zero signal has no support".into()))?;
        Ok(Window(hull.expand(4 * hull.len() as i64)))
    }

    pub fn interval(&self) -> DiscreteInterval {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// A finitely supported complex function on ℤ.
///
/// Values outside `offset..offset + values.len()` are zero, and the stored
/// range is trimmed so that its first and last entries are nonzero.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Signal {
    offset: i64,
    values: Vec<Complex64>,
}

impl Signal {
    pub fn new(offset: i64, values: Vec<Complex64>) -> Self {
        let mut s = Signal { offset, values };
        s.normalize();
        s
    }

    pub fn from_real(offset: i64, values: &[f64]) -> Self {
        Self::new(offset, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Signal::default()
    }

    pub fn delta(n: i64) -> Self {
        Signal {
            offset: n,
            values: vec![Complex64::new(1.0, 0.0)],
        }
    }

    pub fn indicator(i: DiscreteInterval) -> Self {
        Signal {
            offset: i.a(),
            values: vec![Complex64::new(1.0, 0.0); i.len()],
        }
    }

    /// Samples `g(n)` for every `n` in `i`.
    pub fn from_fn(i: DiscreteInterval, g: impl Fn(i64) -> Complex64) -> Self {
        Self::new(i.a(), i.iter().map(g).collect())
    }

    fn normalize(&mut self) {
        let zero = Complex64::new(0.0, 0.0);
        let lead = self.values.iter().take_while(|v| **v == zero).count();
        if lead == self.values.len() {
            self.values.clear();
            self.offset = 0;
            return;
        }
        let trail = self.values.iter().rev().take_while(|v| **v == zero).count();
        self.values.truncate(self.values.len() - trail);
        self.values.drain(..lead);
        self.offset += lead as i64;
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// Smallest interval containing the support, `None` for the zero signal.
    pub fn support(&self) -> Option<DiscreteInterval> {
        if self.values.is_empty() {
            None
        } else {
            Some(DiscreteInterval {
                a: self.offset,
                b: self.offset + self.values.len() as i64 - 1,
            })
        }
    }

    pub fn get(&self, n: i64) -> Complex64 {
        let k = n - self.offset;
        if k < 0 || k >= self.values.len() as i64 {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[k as usize]
        }
    }

    /// Dense samples on `i` (zeros outside the support).
    pub fn samples_on(&self, i: DiscreteInterval) -> Vec<Complex64> {
        i.iter().map(|n| self.get(n)).collect()
    }

    pub fn conj(&self) -> Signal {
        Signal {
            offset: self.offset,
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Signal {
        Signal::new(self.offset, self.values.iter().map(|v| v * c).collect())
    }

    pub fn abs(&self) -> Signal {
        Signal::new(
            self.offset,
            self.values.iter().map(|v| Complex64::new(v.norm(), 0.0)).collect(),
        )
    }

    pub fn add(&self, other: &Signal) -> Signal {
        let hull = match (self.support(), other.support()) {
            (None, _) => return other.clone(),
            (_, None) => return self.clone(),
            (Some(x), Some(y)) => x.hull(&y),
        };
        Signal::from_fn(hull, |n| self.get(n) + other.get(n))
    }

    pub fn restrict(&self, i: DiscreteInterval) -> Signal {
        match self.support().and_then(|s| s.intersect(&i)) {
            Some(j) => Signal::from_fn(j, |n| self.get(n)),
            None => Signal::zero(),
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn norm_l2(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

#[derive(Serialize, Deserialize)]
struct SignalJson {
    offset: i64,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for Signal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SignalJson {
            offset: self.offset,
            re: self.values.iter().map(|v| v.re).collect(),
            im: self.values.iter().map(|v| v.im).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Signal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SignalJson::deserialize(d)?;
        if raw.re.len() != raw.im.len() {
            return Err(serde::de::Error::custom(format!(
                "re has {} entries but im has {}",
                raw.re.len(),
                raw.im.len()
            )));
        }
        let values = raw
            .re
            .iter()
            .zip(&raw.im)
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect();
        Ok(Signal::new(raw.offset, values))
    }
}

/// `Σ_n f(n) conj(g(n))`.
pub fn inner_product(f: &Signal, g: &Signal) -> Complex64 {
    let (sf, sg) = match (f.support(), g.support()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Complex64::new(0.0, 0.0),
    };
    match sf.intersect(&sg) {
        Some(i) => i.iter().map(|n| f.get(n) * g.get(n).conj()).sum(),
        None => Complex64::new(0.0, 0.0),
    }
}

/// `[ |I|⁻¹ Σ_{x∈I} |f(x)|^r ]^{1/r}`.
pub fn lr_average(f: &Signal, i: DiscreteInterval, r: f64) -> Result<f64> {
    if !(r >= 1.0) || !r.is_finite() {
        return param(format!("L^r average needs finite r >= 1, got {r}"));
    }
    let s: f64 = match f.support().and_then(|s| s.intersect(&i)) {
        Some(j) => j.iter().map(|n| f.get(n).norm().powf(r)).sum(),
        None => 0.0,
    };
    Ok((s / i.len() as f64).powf(1.0 / r))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    Fft,
}

/// The kernel `e(α m²)/m` (zero at `m = 0`) on `m_lo..=m_hi`.
pub fn halpha_kernel(alpha: &TorusPoint, m_lo: i64, m_hi: i64) -> Vec<Complex64> {
    (m_lo..=m_hi)
        .map(|m| {
            if m == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                let m = m as i128;
                alpha.e_mul(m * m) / m as f64
            }
        })
        .collect()
}

/// `H^α f` restricted to `window`.
pub fn apply_halpha(f: &Signal, alpha: &TorusPoint, window: &Window, method: Method) -> Result<Signal> {
    let supp = match f.support() {
        Some(s) => s,
        None => return Ok(Signal::zero()),
    };
    let w = window.interval();
    if !w.contains_interval(&supp) {
        return param(format!(
            "window [{}, {}] does not cover the support [{}, {}]",
            w.a(),
            w.b(),
            supp.a(),
            supp.b()
        ));
    }
    let m_lo = w.a() - supp.b();
    let m_hi = w.b() - supp.a();
    let kernel = halpha_kernel(alpha, m_lo, m_hi);
    let values = convolve_on_window(f, &kernel, m_lo, w, method);
    Ok(Signal::new(w.a(), values))
}

/// `Σ_k f(k) K(n - k)` for `n ∈ w`, where `kernel[i] = K(m_lo + i)` covers every
/// needed difference.
pub(crate) fn convolve_on_window(
    f: &Signal,
    kernel: &[Complex64],
    m_lo: i64,
    w: DiscreteInterval,
    method: Method,
) -> Vec<Complex64> {
    let supp = f.support().expect("nonzero signal");
    let fv = f.values();
    match method {
        Method::Direct => (0..w.len())
            .into_par_iter()
            .map(|i| {
                let n = w.a() + i as i64;
                let mut acc = Complex64::new(0.0, 0.0);
                for (t, v) in fv.iter().enumerate() {
                    let m = n - (supp.a() + t as i64);
                    acc += v * kernel[(m - m_lo) as usize];
                }
                acc
            })
            .collect(),
        Method::Fft => {
            let ls = fv.len();
            let size = (w.len() + ls).next_power_of_two();
            let mut x = vec![Complex64::new(0.0, 0.0); size];
            x[..ls].copy_from_slice(fv);
            let mut h = vec![Complex64::new(0.0, 0.0); size];
            h[..kernel.len()].copy_from_slice(kernel);
            let c = fft::circular_convolve(&mut x, &mut h);
            // n - k - m_lo = (n - w.a) + (supp.b - supp.a) - t
            let shift = (w.a() - m_lo - supp.a()) as usize;
            (0..w.len()).map(|i| c[i + shift]).collect()
        }
    }
}

/// `f̂(k/L) = Σ_n f(n) e(-kn/L)` for `k = 0..L`.
pub fn dft_on_grid(f: &Signal, l: usize) -> Result<Vec<Complex64>> {
    if l == 0 || l < f.values().len() {
        return param(format!(
            "grid of size {l} cannot resolve a support of length {}",
            f.values().len()
        ));
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); l];
    for (t, v) in f.values().iter().enumerate() {
        let n = f.offset() + t as i64;
        buf[n.rem_euclid(l as i64) as usize] = *v;
    }
    fft::forward(&mut buf);
    Ok(buf)
}
