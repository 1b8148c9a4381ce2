//! Points of the torus and exact phase reduction.
//!
//! Every exponential `e(t) = exp(2πi t)` in the lab goes through [`TorusPoint::frac_mul`]
//! so that phases like `α m²` are reduced modulo one before any rounding happens.
//! A real `α` is treated as the exact dyadic rational its `f64` encodes, so
//! `frac(α m²)` is computed exactly in 128-bit integer arithmetic.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// `e(t) = exp(2πi t)`, with `t` reduced modulo one first.
#[inline]
pub fn e(t: f64) -> Complex64 {
    let r = t - t.floor();
    let (s, c) = (std::f64::consts::TAU * r).sin_cos();
    Complex64::new(c, s)
}

/// `e(k / q)` for integer `k`, exact reduction.
#[inline]
pub fn e_ratio(k: i128, q: u64) -> Complex64 {
    let r = k.rem_euclid(q as i128) as f64 / q as f64;
    e(r)
}

/// Distance on `𝕋 = ℝ/ℤ`.
#[inline]
pub fn torus_dist(x: f64, y: f64) -> f64 {
    signed_torus_diff(x, y).abs()
}

/// Representative of `x - y` in `[-1/2, 1/2)`.
#[inline]
pub fn signed_torus_diff(x: f64, y: f64) -> f64 {
    let d = x - y;
    let r = d - d.round();
    if r >= 0.5 {
        r - 1.0
    } else {
        r
    }
}

/// Representative of `x - num/den` in `[-1/2, 1/2)`, without rounding
/// `num/den` first; the offset keeps full relative precision near the fraction.
#[inline]
pub fn offset_from_fraction(x: f64, num: i64, den: u64) -> f64 {
    let q = den as f64;
    // both reductions are exact
    let x = x - x.floor();
    let t = x.mul_add(q, -(num.rem_euclid(den as i64) as f64));
    fold_half((t - (t / q).round() * q) / q)
}

/// Representative of `k/l - num/den` in `[-1/2, 1/2)`, exact up to one rounding.
#[inline]
pub fn grid_offset(k: i64, l: usize, num: i64, den: u64) -> f64 {
    let m = (l as i128) * (den as i128);
    let n = (k as i128 * den as i128 - num as i128 * l as i128).rem_euclid(m);
    let n = if 2 * n >= m { n - m } else { n };
    n as f64 / m as f64
}

#[inline]
fn fold_half(d: f64) -> f64 {
    if d >= 0.5 {
        d - 1.0
    } else if d < -0.5 {
        d + 1.0
    } else {
        d
    }
}

/// Reduce a real to `[0, 1)`.
#[inline]
pub fn wrap_unit(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// A point of the torus, either an exact fraction or a real number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TorusPoint {
    /// `num/den` with `den >= 1`; stored with `0 <= num < den`.
    Rational { num: i64, den: u64 },
    /// A real in `[0, 1)`.
    Real(f64),
}

impl TorusPoint {
    pub fn rational(num: i64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(LabError::Parameter("zero denominator".into()));
        }
        let num = num.rem_euclid(den as i64);
        let g = gcd(num.unsigned_abs(), den);
        Ok(TorusPoint::Rational {
            num: num / g as i64,
            den: den / g,
        })
    }

    pub fn real(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(LabError::Parameter(format!("non-finite torus point {x}")));
        }
        Ok(TorusPoint::Real(wrap_unit(x)))
    }

    pub fn zero() -> Self {
        TorusPoint::Rational { num: 0, den: 1 }
    }

    /// The golden ratio minus one.
    pub fn golden() -> Self {
        TorusPoint::Real((5f64.sqrt() - 1.0) / 2.0)
    }

    /// Representative in `[0, 1)` as a float.
    pub fn value(&self) -> f64 {
        match *self {
            TorusPoint::Rational { num, den } => num as f64 / den as f64,
            TorusPoint::Real(x) => x,
        }
    }

    /// `-self` on the torus.
    pub fn neg(&self) -> Self {
        match *self {
            TorusPoint::Rational { num, den } => TorusPoint::Rational {
                num: (-num).rem_euclid(den as i64),
                den,
            },
            TorusPoint::Real(x) => TorusPoint::Real(wrap_unit(-x)),
        }
    }

    /// `frac(self · n)` in `[0, 1)`.
    pub fn frac_mul(&self, n: i128) -> f64 {
        match *self {
            TorusPoint::Rational { num, den } => {
                let r = (num as i128 * n).rem_euclid(den as i128);
                r as f64 / den as f64
            }
            TorusPoint::Real(x) => frac_mul_f64(x, n),
        }
    }

    /// `e(self · n)`.
    #[inline]
    pub fn e_mul(&self, n: i128) -> Complex64 {
        e(self.frac_mul(n))
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TorusPoint::Rational { num, den } => write!(f, "{num}/{den}"),
            TorusPoint::Real(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for TorusPoint {
    type Err = LabError;

    /// Accepts `A/Q`, a decimal, or one of the named constants
    /// `golden-1`, `sqrt2-1`, `pi-3`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t {
            "golden-1" | "golden" => return Ok(TorusPoint::golden()),
            "sqrt2-1" => return TorusPoint::real(std::f64::consts::SQRT_2 - 1.0),
            "pi-3" => return TorusPoint::real(std::f64::consts::PI - 3.0),
            _ => {}
        }
        if let Some((a, q)) = t.split_once('/') {
            let a: i64 = a
                .trim()
                .parse()
                .map_err(|_| LabError::Parameter(format!("bad numerator in {t:?}")))?;
            let q: u64 = q
                .trim()
                .parse()
                .map_err(|_| LabError::Parameter(format!("bad denominator in {t:?}")))?;
            return TorusPoint::rational(a, q);
        }
        let x: f64 = t
            .parse()
            .map_err(|_| LabError::Parameter(format!("cannot parse torus point {t:?}")))?;
        TorusPoint::real(x)
    }
}

impl Serialize for TorusPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for TorusPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => TorusPoint::real(x).map_err(serde::de::Error::custom),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// `frac(x · n)` treating `x` as the exact dyadic rational it encodes.
pub fn frac_mul_f64(x: f64, n: i128) -> f64 {
    if x == 0.0 || n == 0 {
        return 0.0;
    }
    let bits = x.abs().to_bits();
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let (mantissa, exponent) = if exp_bits == 0 {
        (bits & ((1u64 << 52) - 1), -1074i64)
    } else {
        ((bits & ((1u64 << 52) - 1)) | (1u64 << 52), exp_bits - 1075)
    };
    let neg = (x < 0.0) != (n < 0);
    let n_abs = n.unsigned_abs();
    let r = if exponent >= 0 {
        0.0
    } else {
        let k = (-exponent) as u32;
        // mantissa < 2^53 and |n| < 2^74 keep the product inside u128
        if k <= 127 && n_abs < (1u128 << 74) {
            let modulus = 1u128 << k;
            let prod = (mantissa as u128).wrapping_mul(n_abs) & (modulus - 1);
            prod as f64 / modulus as f64
        } else {
            let v = x.abs() * n_abs as f64;
            v - v.floor()
        }
    };
    let r = if neg && r != 0.0 { 1.0 - r } else { r };
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_keep_relative_precision() {
        // fl(1/3) = 6004799503160661 / 2^54, so fl(1/3) - 1/3 = -1 / (3 2^54)
        let want = -1.0 / (3.0 * 2f64.powi(54));
        assert_eq!(offset_from_fraction(1.0 / 3.0, 1, 3), want);
        assert_eq!(offset_from_fraction(1.0 / 3.0, 4, 3), want);
        // fl(0.9) = 8106479329266893 / 2^53
        assert_eq!(offset_from_fraction(0.9, 9, 10), 1.0 / (5.0 * 2f64.powi(53)));
        assert_eq!(offset_from_fraction(0.9, 1, 10), -0.2);
        assert_eq!(grid_offset(1, 4, 1, 3), -1.0 / 12.0);
        assert_eq!(grid_offset(5, 4, 1, 3), -1.0 / 12.0);
        assert_eq!(grid_offset(3, 4, 0, 1), -0.25);
    }

    #[test]
    fn frac_mul_matches_exact_rational() {
        let x = TorusPoint::Real(0.375);
        assert_eq!(x.frac_mul(3), 0.125);
        assert_eq!(x.frac_mul(-3), 0.875);
        let big = 1i128 << 40;
        // 0.375 · 2^40 is an integer
        assert_eq!(x.frac_mul(big), 0.0);
    }

    #[test]
    fn frac_mul_large_argument_is_exact() {
        // x = 1/3 rounded to f64 is M / 2^54; frac(x · m²) must equal (M m² mod 2^54) / 2^54.
        let x = 1.0f64 / 3.0;
        let m: i128 = 65_521;
        let v = frac_mul_f64(x, m * m);
        let exact = {
            let mant = (x * (1u64 << 54) as f64) as u128;
            let prod = (mant * (m * m) as u128) % (1u128 << 54);
            prod as f64 / (1u128 << 54) as f64
        };
        assert_eq!(v, exact);
    }

    #[test]
    fn rational_parsing_and_reduction() {
        let p: TorusPoint = "2/6".parse().unwrap();
        assert_eq!(p, TorusPoint::Rational { num: 1, den: 3 });
        let q: TorusPoint = "-1/4".parse().unwrap();
        assert_eq!(q, TorusPoint::Rational { num: 3, den: 4 });
        let g: TorusPoint = "golden-1".parse().unwrap();
        assert!((g.value() - 0.618_033_988_749_895).abs() < 1e-15);
        assert!("1/0".parse::<TorusPoint>().is_err());
    }

    #[test]
    fn torus_distance_wraps() {
        assert!((torus_dist(0.99, 0.01) - 0.02).abs() < 1e-15);
        assert!((signed_torus_diff(0.01, 0.99) - 0.02).abs() < 1e-15);
        assert_eq!(torus_dist(0.5, 0.5), 0.0);
    }
}
