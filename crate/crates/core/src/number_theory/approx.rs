//! Continued fractions and Farey/Stern–Brocot navigation.

use super::levels::level_range;
use super::{chi_s_radius, ReducedFraction};
use crate::phase::{torus_dist, wrap_unit};

/// A convergent `p/q` of a real number.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Convergent {
    pub p: u64,
    pub q: u64,
}

/// Convergents of `x ∈ [0, 1)` with denominator at most `max_den`.
///
/// The expansion runs on the exact dyadic rational encoded by the `f64`, so
/// partial quotients are never polluted by rounding.
pub fn convergents(x: f64, max_den: u64) -> Vec<Convergent> {
    let x = wrap_unit(x);
    let mut out = vec![Convergent { p: 0, q: 1 }];
    if x == 0.0 {
        return out;
    }
    let (mut num, mut den) = match dyadic(x) {
        Some(v) => v,
        None => {
            // below 2^-120: the next convergent 1/⌊1/x⌋ is far beyond any cap in use
            let a1 = (1.0 / x).floor();
            if a1 <= max_den as f64 {
                out.push(Convergent { p: 1, q: a1 as u64 });
            }
            return out;
        }
    };
    // x = num/den with num < den; a0 = 0 already emitted
    let (mut h2, mut h1) = (1u128, 0u128);
    let (mut k2, mut k1) = (0u128, 1u128);
    std::mem::swap(&mut num, &mut den);
    while den != 0 {
        let a = num / den;
        let r = num % den;
        let h = a * h1 + h2;
        let k = a * k1 + k2;
        if k > max_den as u128 {
            break;
        }
        out.push(Convergent {
            p: h as u64,
            q: k as u64,
        });
        h2 = h1;
        h1 = h;
        k2 = k1;
        k1 = k;
        num = den;
        den = r;
    }
    out
}

/// `x = num / 2^k` exactly, when `k <= 120`.
fn dyadic(x: f64) -> Option<(u128, u128)> {
    let bits = x.to_bits();
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    if exp_bits == 0 {
        return None;
    }
    let mant = (bits & ((1u64 << 52) - 1)) | (1u64 << 52);
    let k = 1075 - exp_bits;
    if !(1..=120).contains(&k) {
        return None;
    }
    let tz = mant.trailing_zeros().min(k as u32);
    Some(((mant >> tz) as u128, 1u128 << (k as u32 - tz)))
}

/// Consecutive terms `a/b <= x < c/d` of the Farey sequence of order `n`
/// (extended periodically to all of ℝ), found by Stern–Brocot descent with
/// batched steps.
pub fn farey_bracket(x: f64, n: u64) -> ((i64, u64), (i64, u64)) {
    assert!(n >= 1);
    let fl = x.floor();
    let y = x - fl;
    let (mut a, mut b, mut c, mut d) = (0u64, 1u64, 1u64, 1u64);
    let below = |p: u64, q: u64| y < p as f64 / q as f64;
    while b + d <= n {
        if below(a + c, b + d) {
            // pull the right end toward a/b
            let num = c as f64 - y * d as f64;
            let den = y * b as f64 - a as f64;
            let k_den = (n - d) / b;
            let mut k = if den <= 0.0 {
                k_den
            } else {
                (((num / den).ceil() - 1.0).max(1.0) as u64).min(k_den)
            };
            while k > 1 && !below(c + k * a, d + k * b) {
                k -= 1;
            }
            c += k * a;
            d += k * b;
        } else {
            let num = y * b as f64 - a as f64;
            let den = c as f64 - y * d as f64;
            let k_den = (n - b) / d;
            let mut k = (((num / den).floor()).max(1.0) as u64).min(k_den);
            while k > 1 && below(a + k * c, b + k * d) {
                k -= 1;
            }
            a += k * c;
            b += k * d;
        }
    }
    let shift = fl as i64;
    ((a as i64 + shift * b as i64, b), (c as i64 + shift * d as i64, d))
}

/// Walks the Farey sequence of order `n` upward through `[lo, hi]`.
pub struct FareyWalk {
    n: u64,
    hi: f64,
    prev: (i64, u64),
    cur: (i64, u64),
    pending_first: Option<(i64, u64)>,
}

impl Iterator for FareyWalk {
    type Item = (i64, u64);

    fn next(&mut self) -> Option<(i64, u64)> {
        if let Some(f) = self.pending_first.take() {
            return Some(f);
        }
        let (c, d) = self.cur;
        if c as f64 / d as f64 > self.hi {
            return None;
        }
        let (a, b) = self.prev;
        let k = ((self.n + b) / d) as i64;
        let next = (k * c - a, (k * d as i64 - b as i64) as u64);
        self.prev = self.cur;
        self.cur = next;
        Some((c, d))
    }
}

/// Every `p/q` in `[lo, hi]` with `1 <= q <= n`, in increasing order.
pub fn fractions_in_interval(lo: f64, hi: f64, n: u64) -> FareyWalk {
    let (left, right) = farey_bracket(lo, n);
    let first = (left.0 as f64 / left.1 as f64 >= lo && left.0 as f64 / left.1 as f64 <= hi).then_some(left);
    FareyWalk {
        n,
        hi,
        prev: left,
        cur: right,
        pending_first: first,
    }
}

/// The level-`s` fraction within the support radius of `χ_s` of `α`, if any.
///
/// Since the radius is below `1/(2Q²)` for every level-`s` denominator, such a
/// fraction is a convergent of `α` (Legendre), so only convergents are examined.
pub fn find_alpha_s(alpha: f64, s: u32) -> Option<ReducedFraction> {
    let (lo, hi) = level_range(s);
    let radius = chi_s_radius(s);
    let alpha = wrap_unit(alpha);
    convergents(alpha, hi)
        .into_iter()
        .filter(|c| c.q >= lo)
        .find(|c| torus_dist(alpha, c.p as f64 / c.q as f64) < radius)
        .map(|c| ReducedFraction::new_unchecked(c.p % c.q, c.q))
}
