//! Acceptance suite: runs every criterion at its stated tolerance and prints
//! one PASS/FAIL line per criterion. Exits nonzero if any criterion fails.
//!
//! `cargo test -p oqhlab-core --test acceptance`; pass criterion numbers as
//! arguments to run a subset, e.g. `-- 1 2 11`.

use std::time::Instant;

use oqhlab_core::harness::{registry_names, run_experiment, Check, EnsembleSpec, ExperimentConfig, Report};
use oqhlab_core::sparse::Ensemble;
use oqhlab_core::{Result, TorusPoint};

const SEED: u64 = 20240611;

fn config(name: &str) -> ExperimentConfig {
    ExperimentConfig::new(name, SEED)
}

fn alphas(list: &[&str]) -> Option<Vec<TorusPoint>> {
    Some(list.iter().map(|s| s.parse().unwrap()).collect())
}

/// Runs an experiment and returns its checks, optionally filtered by name.
fn checks(c: &ExperimentConfig, keep: impl Fn(&Check) -> bool) -> Result<(Report, Vec<Check>)> {
    let r = run_experiment(c)?;
    let cs = r.checks.iter().filter(|k| keep(k)).cloned().collect();
    Ok((r, cs))
}

fn all(_: &Check) -> bool {
    true
}

fn gauss_law() -> Result<Vec<Check>> {
    let mut c = config("gauss-law");
    c.grid = Some(512);
    Ok(checks(&c, all)?.1)
}

fn closed_form() -> Result<Vec<Check>> {
    let mut c = config("closed-form");
    c.lengths = Some(vec![100_000]);
    Ok(checks(&c, all)?.1)
}

fn l2_uniformity() -> Result<Vec<Check>> {
    let mut c = config("l2-uniformity");
    c.lengths = Some(vec![1 << 14]);
    c.grid = Some(1 << 17);
    c.alphas = alphas(&["0/1", "1/2", "1/3", "2/5", "1/7", "golden-1", "sqrt2-1", "pi-3"]);
    Ok(checks(&c, all)?.1)
}

fn minor_arc_decay() -> Result<Vec<Check>> {
    let mut c = config("minor-arc-decay");
    c.alphas = alphas(&["golden-1"]);
    c.epsilon = Some(0.05);
    c.j_range = Some([8, 14]);
    Ok(checks(&c, |k| {
        k.name.starts_with("slope") || k.name.starts_with("fit residual")
    })?
    .1)
}

fn major_arc_approx() -> Result<Vec<Check>> {
    let mut c = config("major-arc-approx");
    c.alphas = alphas(&["1/3"]);
    c.epsilon = Some(0.2);
    c.j_range = Some([10, 16]);
    Ok(checks(&c, all)?.1)
}

fn kernel_bound() -> Result<Vec<Check>> {
    let mut c = config("ej-kernel-bound");
    c.j_range = Some([6, 12]);
    Ok(checks(&c, all)?.1)
}

fn sparse_machinery() -> Result<Vec<Check>> {
    let mut c = config("mhl-sparse");
    c.ensemble = Some(EnsembleSpec {
        kind: Ensemble::Rademacher,
        count: 1000,
    });
    Ok(checks(&c, all)?.1)
}

fn sparse_ratio_proxy() -> Result<Vec<Check>> {
    let mut c = config("sparse-ratio");
    c.r = Some(1.5);
    c.s = Some(1.5);
    c.lengths = Some(vec![1 << 8, 1 << 12]);
    c.ensemble = Some(EnsembleSpec {
        kind: Ensemble::Rademacher,
        count: 200,
    });
    Ok(checks(&c, all)?.1)
}

fn bessel_transfer() -> Result<Vec<Check>> {
    let mut b = config("bessel");
    b.s_range = Some([1, 3]);
    let mut t = config("transfer-identity");
    t.s_range = Some([1, 1]);
    t.alphas = alphas(&["1/2"]);
    let mut out = checks(&b, all)?.1;
    out.extend(checks(&t, all)?.1);
    Ok(out)
}

fn weighted() -> Result<Vec<Check>> {
    let mut c = config("weighted");
    c.lengths = Some(vec![1 << 8, 1 << 12]);
    Ok(checks(&c, all)?.1)
}

/// A reduced configuration of every registry experiment, run twice: once on
/// three threads and once on a single thread.
fn small(name: &str) -> ExperimentConfig {
    let mut c = config(name);
    match name {
        "gauss-decay" => c.s_range = Some([1, 5]),
        "gauss-law" => c.grid = Some(64),
        "closed-form" => c.lengths = Some(vec![1000]),
        "l2-uniformity" => {
            c.lengths = Some(vec![256]);
            c.grid = Some(4096);
            c.alphas = alphas(&["1/3", "golden-1", "pi-3"]);
        }
        "minor-arc-decay" => c.j_range = Some([6, 8]),
        "major-arc-approx" => {
            c.j_range = Some([6, 8]);
            c.grid = Some(5);
        }
        "ej-kernel-bound" => c.j_range = Some([4, 8]),
        "ej-derivative" => c.j_range = Some([4, 6]),
        "sparse-ratio" => {
            c.lengths = Some(vec![64, 128]);
            c.alphas = alphas(&["0/1", "golden-1"]);
            c.ensemble = Some(EnsembleSpec {
                kind: Ensemble::Rademacher,
                count: 10,
            });
        }
        "mhl-sparse" => {
            c.lengths = Some(vec![64]);
            c.ensemble = Some(EnsembleSpec {
                kind: Ensemble::Gaussian,
                count: 30,
            });
        }
        "bessel" => {
            c.s_range = Some([1, 2]);
            c.ensemble = Some(EnsembleSpec {
                kind: Ensemble::Gaussian,
                count: 3,
            });
        }
        "transfer-identity" => {
            c.ensemble = Some(EnsembleSpec {
                kind: Ensemble::Gaussian,
                count: 1,
            });
        }
        "weighted" => {
            c.lengths = Some(vec![64, 128]);
            c.alphas = alphas(&["1/2", "golden-1"]);
            c.ensemble = Some(EnsembleSpec {
                kind: Ensemble::Gaussian,
                count: 3,
            });
        }
        _ => {}
    }
    c
}

fn csv_bytes(r: &Report) -> Result<Vec<String>> {
    r.tables.iter().map(|t| t.to_csv()).collect()
}

fn determinism() -> Result<Vec<Check>> {
    let pool = |n| rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
    let (single, several) = (pool(1), pool(3));
    let mut out = Vec::new();
    for name in registry_names() {
        let c = small(name);
        let a = csv_bytes(&several.install(|| run_experiment(&c))?)?;
        let b = single.install(|| run_experiment(&c))?;
        let b = csv_bytes(&b)?;
        out.push(Check::holds(format!("{name} CSV byte-identical on re-run"), a == b));
    }
    Ok(out)
}

type Criterion = (u32, &'static str, fn() -> Result<Vec<Check>>);

const CRITERIA: &[Criterion] = &[
    (1, "Gauss-sum law for Q <= 512", gauss_law),
    (2, "closed-form multiplier at beta = 1/4, 3/4", closed_form),
    (3, "l2 uniformity of sup |M^(alpha,N)|", l2_uniformity),
    (4, "minor-arc decay of sup |E_j| for golden - 1", minor_arc_decay),
    (5, "major-arc approximation error slope", major_arc_approx),
    (6, "kernel bound for E_j", kernel_bound),
    (7, "sparse machinery", sparse_machinery),
    (8, "sparse-ratio proxy for the main bound", sparse_ratio_proxy),
    (9, "Bessel inequality and transfer identity", bessel_transfer),
    (10, "weighted proxy", weighted),
    (11, "determinism of CSV output", determinism),
];

fn main() {
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for &(n, what, run) in CRITERIA {
        if !wanted.is_empty() && !wanted.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let (ok, detail) = match run() {
            Ok(cs) if cs.is_empty() => (false, "no checks produced".to_string()),
            Ok(cs) => {
                let ok = cs.iter().all(|c| c.passed);
                let detail = cs
                    .iter()
                    .map(|c| {
                        let mark = if c.passed { "ok" } else { "violated" };
                        format!(
                            "    {}: {:e} {} {:e} ({mark})",
                            c.name, c.value, c.relation, c.threshold
                        )
                    })
                    .collect::<Vec<_>>()
                    .join("\n");
                (ok, detail)
            }
            Err(e) => (false, format!("    error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "[{}] criterion {n}: {what} ({:.1}s)\n{detail}",
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
