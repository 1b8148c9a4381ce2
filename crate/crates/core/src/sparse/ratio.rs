//! Empirical sparse-norm proxies and the truncated-kernel certificate.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::collection::{SparseCollection, SparseEntry};
use super::form::{build_universal_sparse, eval_sparse_form, SparseFormParams};
use crate::error::{param, LabError, Result};
use crate::fft;
use crate::signal::{inner_product, DiscreteInterval, Signal};

/// `|⟨op f, g⟩| / Λ*(f, g)` with `Λ*` the universal form at `ρ = 1/2`.
pub fn estimate_sparse_ratio(
    op: impl Fn(&Signal) -> Result<Signal>,
    f: &Signal,
    g: &Signal,
    p: SparseFormParams,
) -> Result<f64> {
    let c = build_universal_sparse(f, g, p, 0.5)?;
    let den = eval_sparse_form(&c, f, g, p);
    if !(den > 0.0) {
        return Err(LabError::Structural("universal sparse form vanishes".into()));
    }
    Ok(inner_product(&op(f)?, g).norm() / den)
}

/// Upper-bound certificate `N^{1/r + 1/s - 1} ‖T_K : ℓ^r → ℓ^{s'}‖` for a kernel
/// supported in `[-N, N]`.
///
/// The operator norm is exact at `(1, ∞)` (`max |K|`) and `(2, 2)` (`max |K̂|`, on a
/// grid oversampled eightfold); in between it is the Riesz–Thorin interpolant,
/// which lies on the line `s = r`. Hence only `1 <= r = s <= 2` is accepted.
pub fn truncated_kernel_estimate(k: &Signal, p: SparseFormParams) -> Result<f64> {
    if (p.r - p.s).abs() > 1e-12 || p.r > 2.0 {
        return param(format!(
            "truncated-kernel estimate interpolates between (1,1) and (2,2) only; got (r, s) = ({}, {})",
            p.r, p.s
        ));
    }
    let Some(supp) = k.support() else {
        return Ok(0.0);
    };
    let n = supp.a().abs().max(supp.b().abs()).max(1) as f64;
    let sup_k = k.sup_norm();
    let len = (supp.b() - supp.a() + 1) as usize;
    let l = (8 * len).next_power_of_two().max(64);
    let mut buf = vec![Complex64::new(0.0, 0.0); l];
    for (i, v) in k.values().iter().enumerate() {
        let m = supp.a() + i as i64;
        buf[m.rem_euclid(l as i64) as usize] += v;
    }
    fft::forward(&mut buf);
    let sup_hat = buf.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let theta = 2.0 * (1.0 - 1.0 / p.r);
    let norm = sup_k.powf(1.0 - theta) * sup_hat.powf(theta);
    Ok(n.powf(2.0 / p.r - 1.0) * norm)
}

/// Random signal families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ensemble {
    Rademacher,
    Gaussian,
    Indicator,
}

impl std::str::FromStr for Ensemble {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rademacher" => Ok(Ensemble::Rademacher),
            "gaussian" => Ok(Ensemble::Gaussian),
            "indicator" => Ok(Ensemble::Indicator),
            _ => param(format!(
                "unknown ensemble {s:?}; expected rademacher, gaussian or indicator"
            )),
        }
    }
}

/// The generator of trial `trial` under `seed`: one ChaCha stream per trial, so
/// results do not depend on scheduling.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

impl Ensemble {
    /// A real signal on `[offset, offset + n)`.
    pub fn draw(&self, n: usize, offset: i64, rng: &mut impl Rng) -> Signal {
        let v: Vec<f64> = match self {
            Ensemble::Rademacher => (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect(),
            Ensemble::Gaussian => (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect(),
            Ensemble::Indicator => {
                let a = rng.random_range(0..n);
                let b = rng.random_range(a..n);
                (0..n).map(|i| if (a..=b).contains(&i) { 1.0 } else { 0.0 }).collect()
            }
        };
        Signal::from_real(offset, &v)
    }
}

/// A random `1/2`-sparse collection inside `hull`: each interval receives a few
/// random disjoint subintervals covering less than half of it, and the witness
/// set is the uncovered part.
pub fn random_sparse_collection(hull: DiscreteInterval, rng: &mut impl Rng, max_entries: usize) -> SparseCollection {
    let mut entries = Vec::new();
    let mut queue = std::collections::VecDeque::from([hull]);
    while let Some(s) = queue.pop_front() {
        if entries.len() >= max_entries {
            break;
        }
        let n = s.len();
        let mut covered = vec![false; n];
        let mut kids = Vec::new();
        if n >= 4 {
            let budget = (n - 1) / 2;
            let mut used = 0;
            for _ in 0..rng.random_range(0..4) {
                let len = rng.random_range(1..=(n / 4).max(1));
                if used + len > budget {
                    break;
                }
                let start = rng.random_range(0..=n - len);
                if covered[start..start + len].iter().any(|&c| c) {
                    continue;
                }
                covered[start..start + len].fill(true);
                used += len;
                kids.push(DiscreteInterval::with_len(s.a() + start as i64, len).expect("nonempty"));
            }
        }
        let witness = covered
            .iter()
            .enumerate()
            .filter(|(_, &c)| !c)
            .map(|(i, _)| s.a() + i as i64);
        entries.push(SparseEntry::new(s, witness).expect("witness inside interval"));
        queue.extend(kids);
    }
    SparseCollection::new(entries, 0.5).expect("valid rho")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::verify_sparse;

    fn p(r: f64) -> SparseFormParams {
        SparseFormParams::new(r, r).unwrap()
    }

    #[test]
    fn identity_on_delta() {
        let d = Signal::delta(0);
        let r = estimate_sparse_ratio(|f| Ok(f.clone()), &d, &d, p(1.0)).unwrap();
        assert!(r <= 1.0);
    }

    #[test]
    fn kernel_certificates() {
        assert!((truncated_kernel_estimate(&Signal::delta(0), p(2.0)).unwrap() - 1.0).abs() < 1e-15);
        let k = Signal::from_real(-1, &[-1.0, 0.0, 1.0]);
        assert!((truncated_kernel_estimate(&k, p(2.0)).unwrap() - 2.0).abs() < 1e-12);
        // (1,1): N · max|K|
        assert!((truncated_kernel_estimate(&k, p(1.0)).unwrap() - 1.0).abs() < 1e-15);
        assert!(truncated_kernel_estimate(&k, SparseFormParams::new(1.5, 2.0).unwrap()).is_err());
        assert!(truncated_kernel_estimate(&k, p(3.0)).is_err());
    }

    #[test]
    fn interpolation_is_between_endpoints() {
        let k = Signal::from_real(-3, &[0.2, -1.0, 0.5, 0.0, 0.5, 1.0, -0.2]);
        let n: f64 = 3.0;
        for r in [1.25, 1.5, 1.75] {
            let v = truncated_kernel_estimate(&k, p(r)).unwrap() / n.powf(2.0 / r - 1.0);
            let lo = truncated_kernel_estimate(&k, p(1.0)).unwrap() / n;
            let hi = truncated_kernel_estimate(&k, p(2.0)).unwrap();
            assert!(v >= lo.min(hi) - 1e-12 && v <= lo.max(hi) + 1e-12);
        }
    }

    #[test]
    fn random_collections_are_sparse() {
        for t in 0..50 {
            let mut rng = trial_rng(7, t);
            let c = random_sparse_collection(DiscreteInterval::new(0, 255).unwrap(), &mut rng, 64);
            let r = verify_sparse(&c);
            assert!(r.sparse, "{:?}", r.diagnostics);
        }
    }

    #[test]
    fn streams_are_reproducible() {
        let a = Ensemble::Gaussian.draw(16, 0, &mut trial_rng(3, 9));
        let b = Ensemble::Gaussian.draw(16, 0, &mut trial_rng(3, 9));
        let c = Ensemble::Gaussian.draw(16, 0, &mut trial_rng(3, 10));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
