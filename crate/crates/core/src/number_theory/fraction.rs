use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::phase::{gcd, TorusPoint};

/// `A/Q` on the torus with `gcd(A, Q) = 1` and `0 <= A < Q`, or `0/1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ReducedFraction {
    num: u64,
    den: u64,
}

impl ReducedFraction {
    /// Requires `gcd(num, den) = 1`; the numerator is taken modulo `den`.
    pub fn new(num: i64, den: u64) -> Result<Self> {
        if den == 0 {
            return param("zero denominator");
        }
        let a = num.rem_euclid(den as i64) as u64;
        if gcd(a, den) != 1 {
            return param(format!("{num}/{den} is not reduced"));
        }
        Ok(Self { num: a, den })
    }

    /// Divides out the common factor.
    pub fn reduce(num: i64, den: u64) -> Result<Self> {
        if den == 0 {
            return param("zero denominator");
        }
        let a = num.rem_euclid(den as i64) as u64;
        let g = gcd(a, den);
        Ok(Self {
            num: a / g,
            den: den / g,
        })
    }

    pub(crate) fn new_unchecked(num: u64, den: u64) -> Self {
        debug_assert!(gcd(num, den) == 1 && num < den.max(1));
        Self { num, den }
    }

    pub fn zero() -> Self {
        Self { num: 0, den: 1 }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn to_torus(&self) -> TorusPoint {
        TorusPoint::Rational {
            num: self.num as i64,
            den: self.den,
        }
    }
}

impl fmt::Display for ReducedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction() {
        assert_eq!(ReducedFraction::new(-1, 3).unwrap().num(), 2);
        assert!(ReducedFraction::new(2, 4).is_err());
        assert_eq!(
            ReducedFraction::reduce(2, 4).unwrap(),
            ReducedFraction::new(1, 2).unwrap()
        );
        assert_eq!(ReducedFraction::new(0, 1).unwrap(), ReducedFraction::zero());
        assert!(ReducedFraction::new(0, 2).is_err());
    }
}
