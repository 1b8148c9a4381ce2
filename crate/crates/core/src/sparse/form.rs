//! Sparse forms `Λ_{S,r,s}(f, g) = Σ_S ⟨f⟩_{S,r} ⟨g⟩_{S,s} |S|` and the
//! universal dominating form built by a dyadic stopping time.

use bitvec::prelude::*;
use serde::{Deserialize, Serialize};

use super::collection::{SparseCollection, SparseEntry};
use crate::error::{param, LabError, Result};
use crate::signal::{DiscreteInterval, Signal};

/// Exponents `(r, s)` of a sparse form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseFormParams {
    pub r: f64,
    pub s: f64,
}

impl SparseFormParams {
    pub fn new(r: f64, s: f64) -> Result<Self> {
        for (name, v) in [("r", r), ("s", s)] {
            if !(v >= 1.0 && v.is_finite()) {
                return param(format!("sparse exponent {name} must be finite and >= 1, got {v}"));
            }
        }
        Ok(Self { r, s })
    }
}

/// `L^r` averages over arbitrary intervals from prefix sums of `|f|^r`.
pub(crate) struct Averager {
    a0: i64,
    prefix: Vec<f64>,
    r: f64,
}

impl Averager {
    pub(crate) fn new(f: &Signal, r: f64) -> Self {
        let mut prefix = Vec::with_capacity(f.values().len() + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for v in f.values() {
            acc += v.norm().powf(r);
            prefix.push(acc);
        }
        Self {
            a0: f.offset(),
            prefix,
            r,
        }
    }

    /// `Σ_{x∈I} |f(x)|^r`.
    pub(crate) fn mass(&self, i: &DiscreteInterval) -> f64 {
        let n = self.prefix.len() as i64 - 1;
        let lo = (i.a() - self.a0).clamp(0, n) as usize;
        let hi = (i.b() - self.a0 + 1).clamp(0, n) as usize;
        self.prefix[hi] - self.prefix[lo]
    }

    pub(crate) fn average(&self, i: &DiscreteInterval) -> f64 {
        (self.mass(i) / i.len() as f64).powf(1.0 / self.r)
    }
}

pub fn eval_sparse_form(c: &SparseCollection, f: &Signal, g: &Signal, p: SparseFormParams) -> f64 {
    let af = Averager::new(f, p.r);
    let ag = Averager::new(g, p.s);
    c.entries()
        .iter()
        .map(|e| {
            let i = e.interval();
            af.average(&i) * ag.average(&i) * i.len() as f64
        })
        .sum()
}

/// The universal sparse collection of `(f, g)` with sparsity `ρ`.
///
/// The root is the dyadic interval `[a, a + 2^k)` anchored at the left end `a`
/// of the joint support hull. Below each stopping interval `S` the maximal
/// dyadic `I ⊊ S` with `⟨f⟩_{I,r} > c⟨f⟩_{S,r}` or `⟨g⟩_{I,s} > c⟨g⟩_{S,s}` are
/// selected, `c = 2/(1-ρ)`, and `E_S` is `S` minus those children. Each family of
/// children covers less than `|S|/c`, which gives `|E_S| > ρ|S|`; the witness
/// sets are pairwise disjoint.
pub fn build_universal_sparse(f: &Signal, g: &Signal, p: SparseFormParams, rho: f64) -> Result<SparseCollection> {
    let hull = match (f.support(), g.support()) {
        (Some(a), Some(b)) => a.hull(&b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => return Err(LabError::Structural("universal form of two zero signals".into())),
    };
    let len = hull.len().next_power_of_two();
    build_universal_sparse_on(DiscreteInterval::with_len(hull.a(), len)?, f, g, p, rho)
}

/// As [`build_universal_sparse`] with a given root whose length is a power of two.
pub fn build_universal_sparse_on(
    root: DiscreteInterval,
    f: &Signal,
    g: &Signal,
    p: SparseFormParams,
    rho: f64,
) -> Result<SparseCollection> {
    if !(rho > 0.0 && rho < 1.0) {
        return param(format!("universal construction needs ρ in (0, 1), got {rho}"));
    }
    if !root.len().is_power_of_two() {
        return param(format!("root length {} is not a power of two", root.len()));
    }
    if f.is_zero() && g.is_zero() {
        return Err(LabError::Structural("universal form of two zero signals".into()));
    }
    let c = 2.0 / (1.0 - rho);
    let af = Averager::new(f, p.r);
    let ag = Averager::new(g, p.s);
    let mut entries = Vec::new();
    let mut stack = vec![root];
    let mut children = Vec::new();
    while let Some(s) = stack.pop() {
        let (tf, tg) = (c * af.average(&s), c * ag.average(&s));
        children.clear();
        let mut probe = halves(&s);
        while let Some(i) = probe.pop() {
            if af.average(&i) > tf || ag.average(&i) > tg {
                children.push(i);
            } else if i.len() > 1 {
                probe.extend(halves(&i));
            }
        }
        let mut witness = bitvec![1; s.len()];
        for ch in &children {
            let off = (ch.a() - s.a()) as usize;
            witness[off..off + ch.len()].fill(false);
        }
        entries.push(SparseEntry::from_bits(s, witness));
        stack.extend(children.iter().copied());
    }
    entries.sort_by_key(|e| (e.interval().a(), std::cmp::Reverse(e.interval().len())));
    SparseCollection::new(entries, rho)
}

fn halves(i: &DiscreteInterval) -> Vec<DiscreteInterval> {
    if i.len() < 2 {
        return Vec::new();
    }
    let h = i.len() / 2;
    vec![
        DiscreteInterval::with_len(i.a() + h as i64, h).expect("nonempty"),
        DiscreteInterval::with_len(i.a(), h).expect("nonempty"),
    ]
}
