use num_complex::Complex64;

use super::levels::{level_range, MAX_LEVEL};
use super::ReducedFraction;
use crate::error::{param, LabError, Result};
use crate::fft;
use crate::phase::{e_ratio, gcd};

/// Complete Gauss sum `S(A/Q, B/Q) = Q⁻¹ Σ_{r<Q} e((A r² - B r)/Q)`.
///
/// Phases are reduced modulo `Q` in integer arithmetic before evaluation.
pub fn gauss_sum(a: i64, b: i64, q: u64) -> Result<Complex64> {
    check_coprime(a, q)?;
    let qi = q as i128;
    let (a, b) = (a as i128, b as i128);
    let sum: Complex64 = (0..qi).map(|r| e_ratio(a * r * r - b * r, q)).sum();
    Ok(sum / q as f64)
}

/// `S(A/Q, B/Q)` for every `B = 0..Q` at once, via one DFT of `r ↦ e(A r²/Q)`.
pub fn gauss_sums_all_b(a: i64, q: u64) -> Result<Vec<Complex64>> {
    check_coprime(a, q)?;
    let a = a as i128;
    let mut buf: Vec<Complex64> = (0..q as i128).map(|r| e_ratio(a * r * r, q)).collect();
    fft::forward(&mut buf);
    let inv = 1.0 / q as f64;
    Ok(buf.into_iter().map(|v| v * inv).collect())
}

fn check_coprime(a: i64, q: u64) -> Result<()> {
    if q == 0 {
        return param("Gauss sum with zero denominator");
    }
    if gcd(a.rem_euclid(q as i64) as u64, q) != 1 {
        return param(format!("numerator {a} is not coprime to {q}"));
    }
    Ok(())
}

/// `max |S|` over the pairs of level `s`, together with a maximizing pair.
pub fn level_max_gauss_modulus(s: u32) -> Result<(f64, ReducedFraction, ReducedFraction)> {
    if s == 0 || s > MAX_LEVEL {
        return Err(LabError::Resource(format!("level {s} outside 1..={MAX_LEVEL}")));
    }
    let (qlo, qhi) = level_range(s);
    let mut best = (-1.0, ReducedFraction::zero(), ReducedFraction::zero());
    for q in qlo..=qhi {
        for a in (0..q).filter(|&a| gcd(a, q) == 1) {
            let sums = gauss_sums_all_b(a as i64, q)?;
            for (b, v) in sums.iter().enumerate() {
                let b = b as u64;
                if gcd(b, q) != 1 {
                    continue;
                }
                let m = v.norm();
                if m > best.0 {
                    best = (
                        m,
                        ReducedFraction::new_unchecked(a, q),
                        ReducedFraction::new_unchecked(b, q),
                    );
                }
            }
        }
    }
    Ok(best)
}
