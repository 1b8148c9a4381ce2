use super::ReducedFraction;
use crate::error::{LabError, Result};
use crate::phase::gcd;

/// Largest level that [`enumerate_level`] will materialize.
pub const MAX_LEVEL: u32 = 12;

/// Denominator range of level `s`: `[1, 2]` for `s = 1` and `(2^{s-1}, 2^s]` after,
/// so every `Q >= 1` lies in exactly one level.
pub fn level_range(s: u32) -> (u64, u64) {
    assert!(s >= 1, "levels start at 1");
    if s == 1 {
        (1, 2)
    } else {
        ((1u64 << (s - 1)) + 1, 1u64 << s)
    }
}

/// The level containing denominator `q`.
pub fn level_of(q: u64) -> u32 {
    assert!(q >= 1);
    if q <= 2 {
        1
    } else {
        64 - (q - 1).leading_zeros()
    }
}

pub fn totient(q: u64) -> u64 {
    let mut n = q;
    let mut out = q;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if n > 1 {
        out -= out / n;
    }
    out
}

/// All pairs `(A/Q, B/Q)` with both fractions reduced and `Q` in the level range.
///
/// Stored per denominator as the list of residues coprime to `Q`; a pair is any
/// two residues of the same denominator.
#[derive(Clone, Debug)]
pub struct RationalPairLevel {
    s: u32,
    classes: Vec<(u64, Vec<u64>)>,
}

impl RationalPairLevel {
    pub fn s(&self) -> u32 {
        self.s
    }

    /// Denominators with their reduced residues.
    pub fn classes(&self) -> &[(u64, Vec<u64>)] {
        &self.classes
    }

    /// Number of pairs, `Σ_Q φ(Q)²`.
    pub fn len(&self) -> usize {
        self.classes.iter().map(|(_, r)| r.len() * r.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn pairs(&self) -> impl Iterator<Item = (ReducedFraction, ReducedFraction)> + '_ {
        self.classes.iter().flat_map(|(q, res)| {
            res.iter().flat_map(move |&a| {
                res.iter().map(move |&b| {
                    (
                        ReducedFraction::new_unchecked(a, *q),
                        ReducedFraction::new_unchecked(b, *q),
                    )
                })
            })
        })
    }
}

pub fn enumerate_level(s: u32) -> Result<RationalPairLevel> {
    if s == 0 {
        return Err(LabError::Parameter("levels start at s = 1".into()));
    }
    if s > MAX_LEVEL {
        return Err(LabError::Resource(format!("level {s} exceeds the cap {MAX_LEVEL}")));
    }
    let (lo, hi) = level_range(s);
    let classes = (lo..=hi)
        .map(|q| (q, (0..q).filter(|&a| gcd(a, q) == 1).collect()))
        .collect();
    Ok(RationalPairLevel { s, classes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_partition_denominators() {
        for q in 1..=5000u64 {
            let s = level_of(q);
            let (lo, hi) = level_range(s);
            assert!(lo <= q && q <= hi, "q={q} s={s}");
        }
        assert_eq!(level_range(1), (1, 2));
        assert_eq!(level_range(2), (3, 4));
        assert_eq!(level_range(3), (5, 8));
    }

    #[test]
    fn level_one_by_hand() {
        let pairs: Vec<_> = enumerate_level(1).unwrap().pairs().collect();
        let z = ReducedFraction::zero();
        let h = ReducedFraction::new(1, 2).unwrap();
        assert_eq!(pairs, vec![(z, z), (h, h)]);
    }

    #[test]
    fn level_two_brute_force() {
        // brute force over all triples with 3 <= Q <= 4
        let mut count = 0;
        for q in 3u64..=4 {
            for a in 0..q {
                for b in 0..q {
                    if gcd(a, q) == 1 && gcd(b, q) == 1 {
                        count += 1;
                    }
                }
            }
        }
        let level = enumerate_level(2).unwrap();
        assert_eq!(level.len(), count);
        assert_eq!(level.len(), 8);
        assert_eq!(level.pairs().count(), 8);
    }

    #[test]
    fn cardinality_is_sum_of_squared_totients() {
        for s in 1..=7 {
            let level = enumerate_level(s).unwrap();
            let (lo, hi) = level_range(s);
            let expected: u64 = (lo..=hi).map(|q| totient(q).pow(2)).sum();
            assert_eq!(level.len() as u64, expected);
            assert!(level
                .pairs()
                .all(|(a, b)| gcd(a.num(), a.den()) == 1 && gcd(b.num(), b.den()) == 1 && a.den() == b.den()));
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(enumerate_level(13), Err(LabError::Resource(_))));
        assert!(enumerate_level(12).is_ok());
    }
}
