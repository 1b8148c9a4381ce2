//! `ρ`-sparse collections: intervals `S` with witness sets `E_S ⊆ S` such that
//! `|E_S| > ρ|S|` and no point lies in more than `⌈1/ρ⌉` witness sets.

use bitvec::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, LabError, Result};
use crate::signal::DiscreteInterval;

/// One interval and its witness set, stored as a bitset over the interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseEntry {
    interval: DiscreteInterval,
    witness: BitVec,
}

impl SparseEntry {
    /// Fails with a structural error if a witness point falls outside the interval.
    pub fn new(interval: DiscreteInterval, witness: impl IntoIterator<Item = i64>) -> Result<Self> {
        let mut bits = bitvec![0; interval.len()];
        for x in witness {
            if !interval.contains(x) {
                return Err(LabError::Structural(format!(
                    "witness point {x} lies outside [{}, {}]",
                    interval.a(),
                    interval.b()
                )));
            }
            bits.set((x - interval.a()) as usize, true);
        }
        Ok(Self {
            interval,
            witness: bits,
        })
    }

    /// `E_S = S`.
    pub fn full(interval: DiscreteInterval) -> Self {
        Self {
            interval,
            witness: bitvec![1; interval.len()],
        }
    }

    pub(crate) fn from_bits(interval: DiscreteInterval, witness: BitVec) -> Self {
        debug_assert_eq!(witness.len(), interval.len());
        Self { interval, witness }
    }

    pub fn interval(&self) -> DiscreteInterval {
        self.interval
    }

    pub fn witness_len(&self) -> usize {
        self.witness.count_ones()
    }

    pub fn witness_points(&self) -> impl Iterator<Item = i64> + '_ {
        let a = self.interval.a();
        self.witness.iter_ones().map(move |i| a + i as i64)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SparseCollection {
    entries: Vec<SparseEntry>,
    rho: f64,
}

impl SparseCollection {
    pub fn new(entries: Vec<SparseEntry>, rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho <= 1.0) {
            return param(format!("sparsity constant must lie in (0, 1], got {rho}"));
        }
        Ok(Self { entries, rho })
    }

    pub fn entries(&self) -> &[SparseEntry] {
        &self.entries
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        Self::new(self.entries.clone(), rho)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawCollection = serde_json::from_str(text)?;
        raw.try_into()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&RawCollection::from(self))?)
    }
}

/// JSON form: witness sets are lists of inclusive runs `[lo, hi]`.
#[derive(Serialize, Deserialize)]
struct RawCollection {
    rho: f64,
    entries: Vec<RawEntry>,
}

#[derive(Serialize, Deserialize)]
struct RawEntry {
    a: i64,
    b: i64,
    witness: Vec<[i64; 2]>,
}

impl TryFrom<RawCollection> for SparseCollection {
    type Error = LabError;

    fn try_from(raw: RawCollection) -> Result<Self> {
        let entries = raw
            .entries
            .into_iter()
            .map(|e| {
                let iv = DiscreteInterval::new(e.a, e.b).map_err(|err| LabError::Structural(err.to_string()))?;
                let mut pts = Vec::new();
                for [lo, hi] in e.witness {
                    if lo > hi {
                        return Err(LabError::Structural(format!("empty witness run [{lo}, {hi}]")));
                    }
                    if hi - lo > iv.len() as i64 {
                        return Err(LabError::Structural(format!(
                            "witness run [{lo}, {hi}] is longer than [{}, {}]",
                            e.a, e.b
                        )));
                    }
                    pts.extend(lo..=hi);
                }
                SparseEntry::new(iv, pts)
            })
            .collect::<Result<_>>()?;
        SparseCollection::new(entries, raw.rho)
    }
}

impl From<&SparseCollection> for RawCollection {
    fn from(c: &SparseCollection) -> Self {
        let entries = c
            .entries
            .iter()
            .map(|e| {
                let mut runs: Vec<[i64; 2]> = Vec::new();
                for x in e.witness_points() {
                    match runs.last_mut() {
                        Some(r) if r[1] + 1 == x => r[1] = x,
                        _ => runs.push([x, x]),
                    }
                }
                RawEntry {
                    a: e.interval.a(),
                    b: e.interval.b(),
                    witness: runs,
                }
            })
            .collect();
        RawCollection { rho: c.rho, entries }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SparseReport {
    pub sparse: bool,
    /// Index of the first entry with `|E_S| <= ρ|S|`.
    pub thin_entry: Option<usize>,
    /// A point of maximal witness overlap and that overlap.
    pub max_overlap: usize,
    pub max_overlap_point: Option<i64>,
    pub overlap_bound: usize,
    pub diagnostics: Vec<String>,
}

/// Checks `|E_S| > ρ|S|` for every entry and the overlap bound `⌈1/ρ⌉`.
pub fn verify_sparse(c: &SparseCollection) -> SparseReport {
    let mut diagnostics = Vec::new();
    let mut thin_entry = None;
    for (i, e) in c.entries.iter().enumerate() {
        let w = e.witness_len();
        if !(w as f64 > c.rho * e.interval.len() as f64) {
            thin_entry.get_or_insert(i);
            diagnostics.push(format!(
                "entry {i} [{}, {}]: |E_S| = {w} is not > {} * {}",
                e.interval.a(),
                e.interval.b(),
                c.rho,
                e.interval.len()
            ));
        }
    }
    let overlap_bound = (1.0 / c.rho).ceil() as usize;
    let (mut max_overlap, mut max_overlap_point) = (0, None);
    if let Some(first) = c.entries.first() {
        let hull = c.entries.iter().fold(first.interval, |h, e| h.hull(&e.interval));
        let mut counts = vec![0usize; hull.len()];
        for e in &c.entries {
            let off = (e.interval.a() - hull.a()) as usize;
            for i in e.witness.iter_ones() {
                counts[off + i] += 1;
            }
        }
        for (i, &k) in counts.iter().enumerate() {
            if k > max_overlap {
                max_overlap = k;
                max_overlap_point = Some(hull.a() + i as i64);
            }
        }
    }
    if max_overlap > overlap_bound {
        diagnostics.push(format!(
            "point {} lies in {max_overlap} witness sets, bound {overlap_bound}",
            max_overlap_point.unwrap_or_default()
        ));
    }
    SparseReport {
        sparse: thin_entry.is_none() && max_overlap <= overlap_bound,
        thin_entry,
        max_overlap,
        max_overlap_point,
        overlap_bound,
        diagnostics,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(a: i64, b: i64) -> DiscreteInterval {
        DiscreteInterval::new(a, b).unwrap()
    }

    fn tower(rho: f64) -> SparseCollection {
        let entries = (1..=10)
            .map(|k| SparseEntry::new(iv(0, (1 << k) - 1), (1i64 << (k - 1))..(1i64 << k)).unwrap())
            .collect();
        SparseCollection::new(entries, rho).unwrap()
    }

    #[test]
    fn dyadic_tower() {
        assert!(!verify_sparse(&tower(0.5)).sparse);
        let r = verify_sparse(&tower(0.49));
        assert!(r.sparse, "{:?}", r.diagnostics);
        assert_eq!(r.max_overlap, 1);
    }

    #[test]
    fn three_thirds() {
        let entries = vec![
            SparseEntry::new(iv(0, 8), 0..3).unwrap(),
            SparseEntry::new(iv(0, 8), 3..6).unwrap(),
            SparseEntry::new(iv(0, 8), 6..9).unwrap(),
        ];
        let c = SparseCollection::new(entries, 1.0 / 3.0).unwrap();
        assert!(!verify_sparse(&c).sparse);
        assert!(verify_sparse(&c.with_rho(0.33).unwrap()).sparse);
    }

    #[test]
    fn full_single_interval() {
        let c = SparseCollection::new(vec![SparseEntry::full(iv(0, 8))], 1.0).unwrap();
        let r = verify_sparse(&c);
        assert!(!r.sparse);
        assert_eq!(r.thin_entry, Some(0));
        assert!(verify_sparse(&c.with_rho(0.99).unwrap()).sparse);
    }

    #[test]
    fn overlap_violation_is_named() {
        let entries = vec![SparseEntry::full(iv(0, 3)); 3];
        let r = verify_sparse(&SparseCollection::new(entries, 0.5).unwrap());
        assert!(!r.sparse);
        assert_eq!(r.max_overlap, 3);
        assert_eq!(r.max_overlap_point, Some(0));
        assert_eq!(r.thin_entry, None);
    }

    #[test]
    fn witness_outside_interval() {
        assert!(matches!(SparseEntry::new(iv(0, 3), [5]), Err(LabError::Structural(_))));
        let text = r#"{"rho": 0.5, "entries": [{"a": 0, "b": 3, "witness": [[2, 6]]}]}"#;
        assert!(matches!(
            SparseCollection::from_json(text),
            Err(LabError::Structural(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let c = tower(0.49);
        let back = SparseCollection::from_json(&c.to_json().unwrap()).unwrap();
        assert_eq!(back, c);
    }
}
