//! The experiment registry.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use super::config::{EnsembleSpec, ExperimentConfig};
use super::fit::fit_log_slope;
use super::plot::Series;
use super::report::{Check, NamedFit, Plot, Table};
use crate::error::{LabError, Result};
use crate::multiplier::{
    eval_box_model, eval_m_truncated, kernel_ej, m_truncated_grid, sup_on_grid, EjEvaluator, MjEvaluator,
    MultiplierModel,
};
use crate::number_theory::{
    gauss_sums_all_b, level_max_gauss_modulus, verify_major_arc_disjointness, verify_major_arc_disjointness_with,
    ArcParams, DisjointnessOptions, FractionPair, ReducedFraction,
};
use crate::phase::{gcd, wrap_unit, TorusPoint};
use crate::row;
use crate::signal::{apply_halpha, DiscreteInterval, Method, Signal, Window};
use crate::sparse::{
    build_universal_sparse, eval_sparse_form, major_transfer_check, mhl, modulation_projection,
    random_sparse_collection, trial_rng, verify_sparse, Ensemble, SparseFormParams,
};
use crate::weights::{a2_characteristic, rh_characteristic, weighted_norm_ratio, WeightSpec};

/// Output of one experiment before the orchestrator adds timing and the config echo.
#[derive(Default)]
pub(crate) struct Outcome {
    pub tables: Vec<Table>,
    pub fits: Vec<NamedFit>,
    pub checks: Vec<Check>,
    pub metadata: serde_json::Map<String, serde_json::Value>,
    pub plots: Vec<Plot>,
}

impl Outcome {
    fn meta(&mut self, k: &str, v: serde_json::Value) {
        self.metadata.insert(k.into(), v);
    }

    fn fit(&mut self, name: String, pts: &[(f64, f64)]) -> Result<super::fit::LogFit> {
        let fit = fit_log_slope(pts)?;
        self.fits.push(NamedFit { name, fit });
        Ok(fit)
    }
}

pub(crate) type Runner = fn(&ExperimentConfig) -> Result<Outcome>;

/// `(name, what it probes, runner)`.
pub(crate) const REGISTRY: &[(&str, &str, Runner)] = &[
    (
        "gauss-decay",
        "max |S(A/Q,B/Q)| over a level decays like 2^{-s/2}",
        gauss_decay,
    ),
    (
        "gauss-law",
        "|S(A/Q,B/Q)| <= sqrt(2/Q), with equality 1/sqrt(Q) for odd Q",
        gauss_law,
    ),
    ("closed-form", "M^0(beta) = -i pi (1 - 2 beta) on (0, 1)", closed_form),
    (
        "l2-uniformity",
        "sup_beta |M^{alpha,N}(beta)| is bounded uniformly in alpha",
        l2_uniformity,
    ),
    (
        "minor-arc-decay",
        "||E_j||_inf decays geometrically in j, uniformly in alpha",
        minor_arc_decay,
    ),
    (
        "major-arc-approx",
        "M_j - S U_j is O(2^{(3 eps - 1) j}) on a major box",
        major_arc_approx,
    ),
    (
        "ej-kernel-bound",
        "|F^{-1}E_j(m)| <~ min(2^{-eps j}, 2^{2j}/(1+m^2))",
        ej_kernel_bound,
    ),
    ("ej-derivative", "|d^2/dbeta^2 E_j| <~ 2^{2j}", ej_derivative),
    (
        "sparse-ratio",
        "|<H^alpha f, g>| is dominated by a sparse form uniformly in alpha and scale",
        sparse_ratio,
    ),
    (
        "mhl-sparse",
        "universal sparse forms are sparse and dominate; M_HL has (1,1) sparse bounds",
        mhl_sparse,
    ),
    ("bessel", "modulation projections satisfy Bessel's inequality", bessel),
    (
        "transfer-identity",
        "<T_{L^{alpha,s}} f, g> equals the Gauss-sum weighted projected forms",
        transfer_identity,
    ),
    (
        "disjointness",
        "major-arc boxes are disjoint for small eps",
        disjointness,
    ),
    (
        "weighted",
        "H^alpha is bounded on l^2(w) for w, 1/w in A_2 and RH_r",
        weighted,
    ),
];

pub fn registry_names() -> Vec<&'static str> {
    REGISTRY.iter().map(|r| r.0).collect()
}

pub(crate) fn lookup(name: &str) -> Result<(&'static str, Runner)> {
    REGISTRY
        .iter()
        .find(|r| r.0 == name)
        .map(|r| (r.1, r.2))
        .ok_or_else(|| {
            LabError::Config(format!(
                "unknown experiment {name:?}; registry: {}",
                registry_names().join(", ")
            ))
        })
}

pub fn default_alphas() -> Vec<TorusPoint> {
    ["0/1", "1/2", "1/3", "2/5", "1/7", "golden-1", "sqrt2-1", "pi-3"]
        .iter()
        .map(|s| s.parse().expect("valid alpha"))
        .collect()
}

fn alphas(c: &ExperimentConfig, default: &[&str]) -> Vec<TorusPoint> {
    c.alphas
        .clone()
        .unwrap_or_else(|| default.iter().map(|s| s.parse().expect("valid alpha")).collect())
}

fn range(r: Option<[u32; 2]>, default: [u32; 2]) -> Vec<u32> {
    let [lo, hi] = r.unwrap_or(default);
    (lo..=hi).collect()
}

fn ensemble(c: &ExperimentConfig, kind: Ensemble, count: usize) -> EnsembleSpec {
    c.ensemble.clone().unwrap_or(EnsembleSpec { kind, count })
}

fn spread(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    max / min
}

fn plot(title: &str, xlabel: &str, ylabel: &str, series: Vec<Series>) -> Plot {
    Plot {
        title: title.into(),
        xlabel: xlabel.into(),
        ylabel: ylabel.into(),
        series,
    }
}

fn gauss_decay(c: &ExperimentConfig) -> Result<Outcome> {
    let mut o = Outcome::default();
    let mut t = Table::new("levels", &["s", "Q", "A", "B", "max_abs_S", "normalized"]);
    let levels = range(c.s_range, [1, 9]);
    let rows: Vec<_> = levels
        .par_iter()
        .map(|&s| level_max_gauss_modulus(s))
        .collect::<Result<_>>()?;
    let mut pts = Vec::new();
    for (&s, (m, a, b)) in levels.iter().zip(rows) {
        t.push(row![s, a.den(), a.num(), b.num(), m, m * 2f64.powf(s as f64 / 2.0)]);
        pts.push((s as f64, m));
    }
    let fit = o.fit("log2 max|S| vs s".into(), &pts)?;
    o.checks
        .push(Check::at_most("slope of log2 max|S| vs s", fit.slope, -0.5 + 0.05));
    // Q > 2^{s-1} on level s, so sqrt(2/Q) 2^{s/2} < 2
    let normalized = pts.iter().map(|&(s, m)| m * 2f64.powf(s / 2.0)).fold(0.0, f64::max);
    o.checks
        .push(Check::at_most("max over s of 2^{s/2} max|S|", normalized, 2.0));
    o.plots.push(plot(
        "max |S| per level",
        "s",
        "max |S|",
        vec![Series {
            label: "max |S|".into(),
            points: pts,
        }],
    ));
    o.tables.push(t);
    Ok(o)
}

fn gauss_law(c: &ExperimentConfig) -> Result<Outcome> {
    let qmax = c.grid.unwrap_or(512) as u64;
    let mut o = Outcome::default();
    let mut t = Table::new("law", &["Q", "max_abs_S", "bound", "excess", "odd_max_dev"]);
    let per_q: Vec<(u64, f64, f64)> = (1..=qmax)
        .into_par_iter()
        .map(|q| {
            let mut max: f64 = 0.0;
            let mut dev: f64 = 0.0;
            for a in (0..q).filter(|&a| gcd(a, q) == 1) {
                for v in gauss_sums_all_b(a as i64, q)? {
                    max = max.max(v.norm());
                    if q % 2 == 1 {
                        dev = dev.max((v.norm() - (q as f64).powf(-0.5)).abs());
                    }
                }
            }
            Ok((q, max, dev))
        })
        .collect::<Result<_>>()?;
    let (mut worst_excess, mut worst_dev) = (f64::NEG_INFINITY, 0.0f64);
    for (q, max, dev) in per_q {
        let bound = (2.0 / q as f64).sqrt();
        worst_excess = worst_excess.max(max - bound);
        worst_dev = worst_dev.max(dev);
        t.push(row![q, max, bound, max - bound, dev]);
    }
    o.checks
        .push(Check::at_most("max over Q of |S| - sqrt(2/Q)", worst_excess, 1e-12));
    o.checks
        .push(Check::at_most("max over odd Q of ||S| - Q^{-1/2}|", worst_dev, 1e-12));
    o.tables.push(t);
    Ok(o)
}

fn closed_form(c: &ExperimentConfig) -> Result<Outcome> {
    let n = c.lengths.as_ref().and_then(|l| l.first().copied()).unwrap_or(100_000) as u64;
    let mut o = Outcome::default();
    let mut t = Table::new("closed_form", &["beta", "N", "re", "im", "target_im", "error"]);
    for beta in [0.25, 0.75] {
        let v = eval_m_truncated(&TorusPoint::zero(), beta, n)?;
        let target = Complex64::new(0.0, -PI * (1.0 - 2.0 * beta));
        let err = (v - target).norm();
        t.push(row![beta, n, v.re, v.im, target.im, err]);
        o.checks.push(Check::at_most(
            format!("|M^(0,N)({beta}) - (-i pi (1 - 2 beta))|"),
            err,
            1e-3,
        ));
    }
    o.tables.push(t);
    Ok(o)
}

fn l2_uniformity(c: &ExperimentConfig) -> Result<Outcome> {
    let n = c.lengths.as_ref().and_then(|l| l.first().copied()).unwrap_or(1 << 14) as u64;
    let l = c.grid.unwrap_or(1 << 17);
    let al = c.alphas.clone().unwrap_or_else(default_alphas);
    let mut o = Outcome::default();
    let mut t = Table::new("uniformity", &["alpha", "N", "L", "sup", "argmax_beta"]);
    let mut sups = Vec::new();
    for a in &al {
        let g = m_truncated_grid(a, n, l)?;
        let (sup, k) = g.sup();
        t.push(row![a.to_string(), n, l, sup, g.beta(k)]);
        o.checks.push(Check::at_most(
            format!("sup |M^(alpha,N)| at alpha = {a}"),
            sup,
            2.0 * PI,
        ));
        sups.push(sup);
    }
    o.checks
        .push(Check::at_most("max/min of sup over alpha", spread(&sups), 2.0));
    o.tables.push(t);
    Ok(o)
}

fn minor_arc_decay(c: &ExperimentConfig) -> Result<Outcome> {
    let al = alphas(c, &["golden-1", "sqrt2-1"]);
    let eps = c.epsilon.unwrap_or(0.05);
    let js = range(c.j_range, [8, 14]);
    let model = MultiplierModel::with_epsilon(eps)?;
    let mut o = Outcome::default();
    let mut t = Table::new(
        "sup",
        &[
            "alpha",
            "eps",
            "j",
            "L",
            "sup_Ej",
            "argmax_beta",
            "refined_points",
            "derivative_slack",
        ],
    );
    let mut series = Vec::new();
    for a in &al {
        let mut pts = Vec::new();
        for &j in &js {
            let l = c.grid.map_or(1usize << (j + 3), |g| g.max(1 << (j + 3)));
            let ev = EjEvaluator::new(a, j, &model)?;
            let est = sup_on_grid(&ev, eps, j, l)?;
            t.push(row![
                a.to_string(),
                eps,
                j,
                l,
                est.sup,
                est.argmax_beta,
                est.refined_points,
                est.derivative_slack
            ]);
            pts.push((j as f64, est.sup));
        }
        let fit = o.fit(format!("log2 sup|E_j| vs j, alpha = {a}"), &pts)?;
        o.checks
            .push(Check::at_most(format!("slope, alpha = {a}"), fit.slope, -0.25));
        o.checks
            .push(Check::below(format!("fit residual, alpha = {a}"), fit.residual, 0.15));
        let decreasing = pts.windows(2).all(|w| w[1].1 < w[0].1);
        o.checks.push(Check::holds(
            format!("sup strictly decreasing in j, alpha = {a}"),
            decreasing,
        ));
        series.push(Series {
            label: a.to_string(),
            points: pts,
        });
    }
    o.plots
        .push(plot("minor-arc decay of sup |E_j|", "j", "sup |E_j|", series));
    o.tables.push(t);
    Ok(o)
}

fn major_arc_approx(c: &ExperimentConfig) -> Result<Outcome> {
    let center = match alphas(c, &["1/3"]).first() {
        Some(TorusPoint::Rational { num, den }) => ReducedFraction::new(*num, *den)?,
        _ => {
            return Err(LabError::Config(
                "major-arc-approx needs a rational center alpha".into(),
            ))
        }
    };
    let eps = c.epsilon.unwrap_or(0.2);
    let js = range(c.j_range, [10, 16]);
    let per_axis = c.grid.unwrap_or(33).max(2);
    let model = MultiplierModel::with_epsilon(eps)?;
    let box_c = FractionPair {
        alpha: center,
        beta: center,
    };
    let mut o = Outcome::default();
    let mut t = Table::new(
        "box_error",
        &[
            "center",
            "eps",
            "j",
            "points_per_axis",
            "max_error",
            "alpha_at_max",
            "beta_at_max",
            "max_abs_Mj",
            "error_over_ulp",
        ],
    );
    let mut pts = Vec::new();
    for &j in &js {
        let arc = ArcParams::new(eps, j)?;
        let (ra, rb) = (arc.alpha_radius(), arc.beta_radius());
        let coord = |i: usize, r: f64| -r + 2.0 * r * i as f64 / (per_axis - 1) as f64;
        let cells: Vec<(f64, f64)> = (0..per_axis)
            .flat_map(|i| (0..per_axis).map(move |k| (i, k)))
            .map(|(i, k)| (center.value() + coord(i, ra), center.value() + coord(k, rb)))
            .collect();
        let alphas_here: Vec<f64> = (0..per_axis).map(|i| center.value() + coord(i, ra)).collect();
        let evals: Vec<MjEvaluator> = alphas_here
            .par_iter()
            .map(|&a| MjEvaluator::new(&TorusPoint::real(wrap_unit(a))?, j))
            .collect::<Result<_>>()?;
        let vals: Vec<(f64, f64)> = cells
            .par_iter()
            .enumerate()
            .map(|(idx, &(a, b))| {
                let m = evals[idx / per_axis].eval(wrap_unit(b));
                let model_val = eval_box_model(a, b, j, &box_c, &model)?;
                Ok(((m - model_val).norm(), m.norm()))
            })
            .collect::<Result<_>>()?;
        let (mut worst, mut at, mut mmax) = (0.0, 0usize, 0.0f64);
        for (i, &(e, m)) in vals.iter().enumerate() {
            if e > worst {
                worst = e;
                at = i;
            }
            mmax = mmax.max(m);
        }
        // errors of a few dozen ulp of |M_j| are rounding, not approximation error
        let ulps = worst / (f64::EPSILON * mmax);
        t.push(row![
            center.to_string(),
            eps,
            j,
            per_axis,
            worst,
            cells[at].0,
            cells[at].1,
            mmax,
            ulps
        ]);
        pts.push((j as f64, worst));
    }
    let fit = o.fit("log2 max box error vs j".into(), &pts)?;
    o.checks.push(Check::at_most(
        "slope of max |M_j - S U_j|",
        fit.slope,
        3.0 * eps - 1.0 + 0.1,
    ));
    o.plots.push(plot(
        "major-arc approximation error",
        "j",
        "max |M_j - S U_j|",
        vec![Series {
            label: format!("center {center}"),
            points: pts,
        }],
    ));
    o.tables.push(t);
    Ok(o)
}

fn kernel_bound(eps: f64, j: u32, m: i64) -> f64 {
    let a = 2f64.powf(-eps * j as f64);
    let b = 4f64.powi(j as i32) / (1.0 + (m as f64).powi(2));
    a.min(b)
}

fn ej_kernel_bound(c: &ExperimentConfig) -> Result<Outcome> {
    let al = alphas(c, &["1/2", "golden-1"]);
    let eps = c.epsilon.unwrap_or(0.15);
    let [j_cal, j_hi] = c.j_range.unwrap_or([6, 12]);
    let model = MultiplierModel::with_epsilon(eps)?;
    let mut o = Outcome::default();
    let mut t = Table::new(
        "kernel",
        &[
            "alpha",
            "eps",
            "j",
            "L",
            "max_abs_kernel",
            "max_ratio",
            "argmax_m",
            "C",
            "far_empty",
        ],
    );
    for a in &al {
        let mut cal = None;
        let mut worst: f64 = 0.0;
        for j in (j_cal..=j_hi).step_by(2) {
            let l = c.grid.map_or(1usize << (j + 3), |g| g.max(1 << (j + 3)));
            let k = kernel_ej(a, j, &model, l)?;
            let (mut ratio, mut arg) = (0.0, 0i64);
            for (i, v) in k.kernel.values().iter().enumerate() {
                let m = k.kernel.offset() + i as i64;
                let r = v.norm() / kernel_bound(eps, j, m);
                if r > ratio {
                    ratio = r;
                    arg = m;
                }
            }
            let cval = *cal.get_or_insert(ratio);
            if j > j_cal {
                worst = worst.max(ratio / cval);
            }
            t.push(row![
                a.to_string(),
                eps,
                j,
                l,
                k.kernel.sup_norm(),
                ratio,
                arg,
                cval,
                k.far.is_zero()
            ]);
        }
        o.checks.push(Check::at_most(
            format!("max over j of (kernel ratio / C), alpha = {a}"),
            worst,
            1.0,
        ));
    }
    o.tables.push(t);
    Ok(o)
}

fn ej_derivative(c: &ExperimentConfig) -> Result<Outcome> {
    let al = alphas(c, &["1/2", "golden-1"]);
    let eps = c.epsilon.unwrap_or(0.15);
    let js = range(c.j_range, [6, 12]);
    let model = MultiplierModel::with_epsilon(eps)?;
    let mut o = Outcome::default();
    let mut t = Table::new(
        "second_difference",
        &["alpha", "eps", "j", "h", "max_second_difference", "C_j"],
    );
    for a in &al {
        let mut cs = Vec::new();
        for &j in &js {
            let l = 1usize << (j + 4);
            let g = <EjEvaluator as crate::multiplier::BetaEvaluator>::grid(&EjEvaluator::new(a, j, &model)?, l)?;
            let h = 1.0 / l as f64;
            let d2 = (0..l)
                .map(|k| (g[(k + 1) % l] - 2.0 * g[k] + g[(k + l - 1) % l]).norm())
                .fold(0.0, f64::max);
            let cj = d2 / (h * h) / 4f64.powi(j as i32);
            t.push(row![a.to_string(), eps, j, h, d2, cj]);
            cs.push(cj);
        }
        let first = cs[0];
        let worst = cs.iter().map(|v| v / first).fold(0.0, f64::max);
        o.checks
            .push(Check::at_most(format!("max_j C_j / C_first, alpha = {a}"), worst, 2.0));
    }
    o.tables.push(t);
    Ok(o)
}

/// `(f, g)` for a trial: two independent draws from the trial's stream.
fn pair(kind: Ensemble, n: usize, offset: i64, seed: u64, trial: u64) -> (Signal, Signal) {
    let mut rng = trial_rng(seed, trial);
    let f = kind.draw(n, offset, &mut rng);
    let g = kind.draw(n, offset, &mut rng);
    (f, g)
}

/// Ratios `|⟨H^α f, g⟩| / Λ*_{r,s}(f, g)` for one `α` and length.
pub(crate) fn halpha_ratios(
    a: &TorusPoint,
    n: usize,
    p: SparseFormParams,
    ens: &EnsembleSpec,
    seed: u64,
) -> Result<Vec<f64>> {
    let w = Window::new(0, n as i64 - 1)?;
    (0..ens.count as u64)
        .into_par_iter()
        .map(|trial| {
            let (f, g) = pair(ens.kind, n, 0, seed, trial);
            if f.is_zero() || g.is_zero() {
                return Ok(0.0);
            }
            crate::sparse::estimate_sparse_ratio(|x| apply_halpha(x, a, &w, Method::Fft), &f, &g, p)
        })
        .collect()
}

fn sparse_ratio(c: &ExperimentConfig) -> Result<Outcome> {
    let al = c.alphas.clone().unwrap_or_else(default_alphas);
    let lengths = c.lengths.clone().unwrap_or(vec![1 << 8, 1 << 12]);
    let r = c.r.unwrap_or(1.5);
    let p = SparseFormParams::new(r, c.s.unwrap_or(r))?;
    let ens = ensemble(c, Ensemble::Rademacher, 200);
    let mut o = Outcome::default();
    let mut t = Table::new(
        "ratio",
        &[
            "alpha",
            "N",
            "r",
            "s",
            "trials",
            "max_ratio",
            "argmax_trial",
            "mean_ratio",
        ],
    );
    let mut trials = Table::new("trials", &["alpha", "N", "trial", "ratio"]);
    let mut maxes = vec![vec![0.0; al.len()]; lengths.len()];
    let mut overall = (0.0, 0u64);
    for (li, &n) in lengths.iter().enumerate() {
        for (ai, a) in al.iter().enumerate() {
            let ratios = halpha_ratios(a, n, p, &ens, c.seed)?;
            let (mut mx, mut arg) = (0.0, 0usize);
            for (i, &v) in ratios.iter().enumerate() {
                trials.push(row![a.to_string(), n, i, v]);
                if v > mx {
                    mx = v;
                    arg = i;
                }
            }
            let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
            t.push(row![a.to_string(), n, p.r, p.s, ens.count, mx, arg, mean]);
            o.checks.push(Check::holds(
                format!("ratio finite, alpha = {a}, N = {n}"),
                mx.is_finite(),
            ));
            maxes[li][ai] = mx;
            if mx > overall.0 {
                overall = (mx, arg as u64);
            }
        }
    }
    let mut spreads = Vec::new();
    for (li, &n) in lengths.iter().enumerate() {
        let sp = spread(&maxes[li]);
        spreads.push(sp);
        o.checks
            .push(Check::at_most(format!("alpha spread of max ratio, N = {n}"), sp, 4.0));
    }
    if lengths.len() >= 2 {
        let (first, last) = (0, lengths.len() - 1);
        for (ai, a) in al.iter().enumerate() {
            let growth = maxes[last][ai] / maxes[first][ai];
            o.checks.push(Check::at_most(
                format!(
                    "growth of max ratio from N = {} to N = {}, alpha = {a}",
                    lengths[first], lengths[last]
                ),
                growth,
                2.0,
            ));
        }
    }
    o.meta("max_ratio", json!(overall.0));
    o.meta("argmax_seed", json!({"seed": c.seed, "trial": overall.1}));
    o.meta("alpha_spread", json!(spreads));
    o.tables.push(t);
    o.tables.push(trials);
    Ok(o)
}

fn mhl_sparse(c: &ExperimentConfig) -> Result<Outcome> {
    let n = c.lengths.as_ref().and_then(|l| l.first().copied()).unwrap_or(1 << 8);
    let count = c.ensemble.as_ref().map_or(1000, |e| e.count);
    let kinds = [Ensemble::Rademacher, Ensemble::Gaussian, Ensemble::Indicator];
    let exps = [1.0, 1.5, 2.0];
    let mut o = Outcome::default();

    // universal collections are 1/2-sparse
    let checks: Vec<(bool, usize)> = (0..count as u64)
        .into_par_iter()
        .map(|trial| {
            let kind = kinds[trial as usize % 3];
            let r = exps[(trial as usize / 3) % 3];
            let (f, g) = pair(kind, n, 0, c.seed, trial);
            if f.is_zero() && g.is_zero() {
                return Ok((true, 0));
            }
            let col = build_universal_sparse(&f, &g, SparseFormParams::new(r, r)?, 0.5)?;
            Ok((verify_sparse(&col).sparse, col.len()))
        })
        .collect::<Result<_>>()?;
    let failures = checks.iter().filter(|c| !c.0).count();
    o.checks.push(Check::at_most(
        "universal collections failing verify_sparse(1/2)",
        failures as f64,
        0.0,
    ));

    // (1,1) sparse ratio of the maximal function on nonnegative inputs
    let p11 = SparseFormParams::new(1.0, 1.0)?;
    let w = Window::new(0, n as i64 - 1)?;
    let mhl_ratios: Vec<f64> = (0..count as u64)
        .into_par_iter()
        .map(|trial| {
            let (f, g) = pair(kinds[trial as usize % 3], n, 0, c.seed ^ 0x5eed, trial);
            let (f, g) = (f.abs(), g.abs());
            if f.is_zero() || g.is_zero() {
                return Ok(0.0);
            }
            crate::sparse::estimate_sparse_ratio(|x| Ok(mhl(x, &w)), &f, &g, p11)
        })
        .collect::<Result<_>>()?;
    let mhl_max = mhl_ratios.iter().copied().fold(0.0, f64::max);
    o.checks
        .push(Check::at_most("ensemble max (1,1) sparse ratio of M_HL", mhl_max, 10.0));

    // random sparse collections are dominated by the universal one
    let hull = DiscreteInterval::new(0, n as i64 - 1)?;
    let mut dom = Table::new(
        "domination",
        &["r", "s", "trial", "entries", "random_form", "universal_form", "ratio"],
    );
    let mut dom_max: f64 = 0.0;
    for r in [1.0, 1.5] {
        let p = SparseFormParams::new(r, r)?;
        let rows: Vec<(u64, usize, f64, f64)> = (0..100u64)
            .into_par_iter()
            .map(|trial| {
                let mut rng = trial_rng(c.seed ^ 0xd0, trial);
                let f = Ensemble::Gaussian.draw(n, 0, &mut rng).abs();
                let g = Ensemble::Gaussian.draw(n, 0, &mut rng).abs();
                let cap = rng.random_range(1..=64);
                let col = random_sparse_collection(hull, &mut rng, cap);
                let uni = build_universal_sparse(&f, &g, p, 0.5)?;
                Ok((
                    trial,
                    col.len(),
                    eval_sparse_form(&col, &f, &g, p),
                    eval_sparse_form(&uni, &f, &g, p),
                ))
            })
            .collect::<Result<_>>()?;
        for (trial, len, a, b) in rows {
            dom_max = dom_max.max(a / b);
            dom.push(row![r, r, trial, len, a, b, a / b]);
        }
    }
    o.checks
        .push(Check::at_most("max random/universal sparse form ratio", dom_max, 16.0));

    let mut t = Table::new(
        "summary",
        &[
            "N",
            "trials",
            "sparse_failures",
            "max_entries",
            "mhl_max_ratio",
            "domination_max",
        ],
    );
    let max_entries = checks.iter().map(|c| c.1).max().unwrap_or(0);
    t.push(row![n, count, failures, max_entries, mhl_max, dom_max]);
    o.tables.push(t);
    o.tables.push(dom);
    Ok(o)
}

fn bessel(c: &ExperimentConfig) -> Result<Outcome> {
    let levels = range(c.s_range, [1, 3]);
    let al = alphas(c, &["1/2", "1/3", "3/8"]);
    let n = c.lengths.as_ref().and_then(|l| l.first().copied()).unwrap_or(256);
    let ens = ensemble(c, Ensemble::Gaussian, 10);
    let mut o = Outcome::default();
    let mut t = Table::new(
        "bessel",
        &[
            "s",
            "alpha",
            "trial",
            "L",
            "components",
            "windows_disjoint",
            "energy",
            "norm_sq",
            "ratio",
        ],
    );
    let mut worst: f64 = 0.0;
    let mut disjoint = true;
    for &s in &levels {
        let l = c.grid.unwrap_or(0).max(10usize.pow(s + 2));
        for a in &al {
            let rows: Vec<_> = (0..ens.count as u64)
                .into_par_iter()
                .map(|trial| {
                    let f = ens.kind.draw(n, 0, &mut trial_rng(c.seed, trial));
                    let fam = modulation_projection(&f, s, a.value(), l)?;
                    Ok((
                        trial,
                        fam.grid_len,
                        fam.len(),
                        fam.source_windows_disjoint(),
                        fam.energy(),
                        f.norm_sq(),
                    ))
                })
                .collect::<Result<_>>()?;
            for (trial, gl, len, dj, en, ns) in rows {
                let ratio = if ns > 0.0 { en / ns } else { 0.0 };
                worst = worst.max(ratio);
                disjoint &= dj;
                t.push(row![s, a.to_string(), trial, gl, len, dj, en, ns, ratio]);
            }
        }
    }
    o.checks.push(Check::at_most(
        "max energy ratio sum ||f_(s,B/Q)||^2 / ||f||^2",
        worst,
        1.0 + 1e-10,
    ));
    o.checks
        .push(Check::holds("source windows pairwise disjoint", disjoint));
    o.tables.push(t);
    Ok(o)
}

fn transfer_identity(c: &ExperimentConfig) -> Result<Outcome> {
    let levels = range(c.s_range, [1, 1]);
    let al = alphas(c, &["1/2"]);
    let eps = c.epsilon.unwrap_or(0.15);
    let model = MultiplierModel::with_epsilon(eps)?;
    let n = c.lengths.as_ref().and_then(|l| l.first().copied()).unwrap_or(256);
    let ens = ensemble(c, Ensemble::Gaussian, 3);
    let mut o = Outcome::default();
    let mut t = Table::new(
        "transfer",
        &[
            "s",
            "alpha",
            "trial",
            "L",
            "j_min",
            "j_max",
            "lhs_re",
            "lhs_im",
            "rhs_re",
            "rhs_im",
            "relative_discrepancy",
            "gauss_bound",
        ],
    );
    let mut worst: f64 = 0.0;
    let mut bounds = true;
    for &s in &levels {
        let l = c.grid.unwrap_or(0).max(10usize.pow(s + 2));
        let j_max = (s as f64 / eps).ceil() as u32 + 4;
        for a in &al {
            for trial in 0..ens.count as u64 {
                let (f, g) = pair(ens.kind, n, 0, c.seed, trial);
                let r = major_transfer_check(&f, &g, s, a.value(), &model, j_max, l)?;
                worst = worst.max(r.relative_discrepancy);
                bounds &= r.bound_holds;
                t.push(row![
                    s,
                    a.to_string(),
                    trial,
                    r.grid_len,
                    r.j_range.0,
                    r.j_range.1,
                    r.lhs_re,
                    r.lhs_im,
                    r.rhs_re,
                    r.rhs_im,
                    r.relative_discrepancy,
                    r.gauss_bound
                ]);
            }
        }
    }
    o.checks.push(Check::at_most(
        "max relative discrepancy of the transfer identity",
        worst,
        1e-6,
    ));
    o.checks
        .push(Check::holds("|lhs| within the Gauss-sum weighted bound", bounds));
    o.tables.push(t);
    Ok(o)
}

fn disjointness(_c: &ExperimentConfig) -> Result<Outcome> {
    let mut o = Outcome::default();
    let mut t = Table::new(
        "boxes",
        &[
            "eps",
            "j",
            "max_den",
            "radius_scale",
            "alpha_radius",
            "beta_radius",
            "disjoint",
            "min_alpha_gap",
            "min_beta_gap",
            "alpha_close_pairs",
        ],
    );
    let cases: [(f64, u32, Option<u64>, f64); 6] = [
        (0.05, 40, None, 1.0),
        (0.1, 10, None, 1.0),
        (0.15, 8, None, 1.0),
        (1.0 / 6.0, 6, None, 1.0),
        (1.0 / 6.0, 6, Some(2), 1.0),
        (1.0 / 6.0, 6, Some(2), 4096.0),
    ];
    for (eps, j, den, scale) in cases {
        let params = ArcParams::new(eps, j)?;
        let rep = if den.is_none() && scale == 1.0 {
            verify_major_arc_disjointness(&params)?
        } else {
            verify_major_arc_disjointness_with(
                &params,
                DisjointnessOptions {
                    max_den: den,
                    radius_scale: scale,
                },
            )?
        };
        t.push(row![
            eps,
            j,
            rep.max_den,
            scale,
            rep.alpha_radius,
            rep.beta_radius,
            rep.disjoint,
            rep.min_alpha_gap,
            rep.min_beta_gap,
            rep.alpha_close_pairs
        ]);
        if (eps, j, den, scale) == (0.05, 40, None, 1.0) {
            o.checks
                .push(Check::holds("boxes disjoint at eps = 0.05, j = 40", rep.disjoint));
        }
        if scale > 1.0 {
            o.checks.push(Check::holds("inflated boxes overlap", !rep.disjoint));
        }
    }
    o.tables.push(t);
    Ok(o)
}

fn weighted(c: &ExperimentConfig) -> Result<Outcome> {
    let al = c.alphas.clone().unwrap_or_else(default_alphas);
    let lengths = c.lengths.clone().unwrap_or(vec![1 << 8, 1 << 12]);
    let specs = c.weights.clone().unwrap_or_else(|| {
        [-0.5, -0.25, 0.0, 0.25, 0.5]
            .iter()
            .map(|&g| WeightSpec::Power { exponent: g })
            .collect()
    });
    let r = c.r.unwrap_or(1.5);
    let ens = ensemble(c, Ensemble::Gaussian, 10);
    let mut o = Outcome::default();
    let mut ch = Table::new(
        "characteristics",
        &[
            "weight",
            "N",
            "a2_w",
            "a2_w_inv",
            "rh_w",
            "rh_w_inv",
            "r",
            "in_test_set",
        ],
    );
    let mut t = Table::new("ratios", &["weight", "N", "alpha", "trials", "max_ratio"]);
    for (wi, spec) in specs.iter().enumerate() {
        let label = match spec {
            WeightSpec::Power { exponent } => format!("power {exponent}"),
            WeightSpec::Explicit { .. } => format!("explicit #{wi}"),
        };
        let mut per_n = Vec::new();
        let mut in_set = true;
        for &n in &lengths {
            let w = spec.build(Window::new(0, n as i64 - 1)?)?;
            let inv = w.inverse();
            let (a2, a2i) = (a2_characteristic(&w), a2_characteristic(&inv));
            let (rh, rhi) = (rh_characteristic(&w, r)?, rh_characteristic(&inv, r)?);
            let ok = a2 <= 4.0 && a2i <= 4.0 && rh <= 2.0 && rhi <= 2.0;
            in_set &= ok;
            ch.push(row![label.clone(), n, a2, a2i, rh, rhi, r, ok]);
            let mut per_alpha = Vec::new();
            for a in &al {
                let ratios: Vec<f64> = (0..ens.count as u64)
                    .into_par_iter()
                    .map(|trial| {
                        let f = ens.kind.draw(n / 2, (n / 4) as i64, &mut trial_rng(c.seed, trial));
                        if f.is_zero() {
                            return Ok(0.0);
                        }
                        weighted_norm_ratio(a, &f, &w)
                    })
                    .collect::<Result<_>>()?;
                let mx = ratios.iter().copied().fold(0.0, f64::max);
                t.push(row![label.clone(), n, a.to_string(), ens.count, mx]);
                per_alpha.push(mx);
            }
            per_n.push(per_alpha);
        }
        if !in_set {
            continue;
        }
        for (ni, &n) in lengths.iter().enumerate() {
            o.checks.push(Check::below(
                format!("alpha spread, {label}, N = {n}"),
                spread(&per_n[ni]),
                2.0,
            ));
        }
        if lengths.len() >= 2 {
            let first = per_n[0].iter().copied().fold(0.0, f64::max);
            let last = per_n[lengths.len() - 1].iter().copied().fold(0.0, f64::max);
            o.checks.push(Check::below(
                format!(
                    "window stability, {label}, N = {} to {}",
                    lengths[0],
                    lengths[lengths.len() - 1]
                ),
                spread(&[first, last]),
                2.0,
            ));
        }
    }
    o.tables.push(t);
    o.tables.push(ch);
    Ok(o)
}
