//! `oqhlab`: command-line front end to the experiment registry and evaluators.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use oqhlab_core::harness::{registry_names, run_experiment, Cell, EnsembleSpec, ExperimentConfig, Report, Table};
use oqhlab_core::multiplier::{
    eval_uj, kernel_ej, mj_grid, sup_on_grid, BetaEvaluator, EjEvaluator, MjEvaluator, MultiplierModel,
};
use oqhlab_core::number_theory::{enumerate_level, gauss_sums_all_b, MAX_LEVEL};
use oqhlab_core::sparse::{verify_sparse, Ensemble, SparseCollection};
use oqhlab_core::weights::WeightSpec;
use oqhlab_core::{apply_halpha, LabError, Method, Result, Signal, TorusPoint, Window};

#[derive(Parser)]
#[command(
    name = "oqhlab",
    version,
    about = "Numerical laboratory for the quadratic-phase discrete Hilbert transform"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Experiment configuration (JSON); flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Seed for every random draw.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a registry experiment.
    ///
    /// Writes <name>.csv (main table), <name>-<table>.csv for further tables,
    /// <name>.json (config echo, fits, checks, metadata, wall clock) and
    /// <name>.svg when the experiment has a plot. Columns are listed in the
    /// header row of each CSV. Exit code 0 iff every threshold check passes.
    Experiment {
        /// Experiment name; overrides the name in --config.
        #[arg(long)]
        name: Option<String>,
        /// List the registry and exit.
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Apply H^alpha to a signal.
    ///
    /// Input and output are signal JSON {"offset", "re", "im"}. Also writes
    /// transform.csv with columns: n, re, im, abs.
    Transform {
        /// Input signal JSON.
        #[arg(long)]
        input: PathBuf,
        /// alpha as a decimal, A/Q, or one of golden-1, sqrt2-1, pi-3.
        #[arg(long)]
        alpha: TorusPoint,
        #[arg(long, value_enum, default_value = "fft")]
        method: MethodArg,
        /// Output window as "a,b"; defaults to the support hull expanded by 4x its diameter.
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        window: Option<(i64, i64)>,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate a multiplier piece on a uniform beta grid.
    ///
    /// Writes multiplier.csv with columns: beta, re, im, abs (for --what
    /// kernel: m, re, im, abs) and multiplier.json with the grid sup, its
    /// argmax and grid metadata.
    Multiplier {
        #[arg(long)]
        alpha: TorusPoint,
        #[arg(long)]
        j: u32,
        #[arg(long, default_value_t = 0.15)]
        eps: f64,
        /// Grid length; defaults to 2^(j+3).
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, value_enum, default_value = "ej")]
        what: Piece,
        #[command(flatten)]
        common: Common,
    },
    /// Complete Gauss sums over rational levels.
    ///
    /// Writes gauss.csv with columns: s, Q, A, B, abs_S, arg_S, one row per
    /// pair (A/Q, B/Q) of each level with gcd(A, Q) = 1 and B in 0..Q.
    Gauss {
        /// Levels as "lo,hi".
        #[arg(long, value_parser = parse_pair, default_value = "1,4")]
        levels: (i64, i64),
        #[command(flatten)]
        common: Common,
    },
    /// Verify a sparse collection given as JSON.
    ///
    /// Input: {"rho", "entries": [{"a", "b", "witness": [[lo, hi], ...]}]}.
    /// Writes sparse-check.json with the report. Exit code 0 iff the
    /// collection is rho-sparse.
    SparseCheck {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Ensemble estimate of |<H^alpha f, g>| / Lambda*_(r,s)(f, g).
    ///
    /// Writes sparse-ratio.csv with columns: alpha, N, r, s, trials,
    /// max_ratio, argmax_trial, mean_ratio; sparse-ratio-trials.csv with
    /// columns: alpha, N, trial, ratio; and sparse-ratio.json whose metadata
    /// holds {max_ratio, argmax_seed, alpha_spread}.
    SparseRatio {
        /// Comma-separated alphas.
        #[arg(long = "alpha-set", value_delimiter = ',')]
        alpha_set: Option<Vec<TorusPoint>>,
        /// Comma-separated signal lengths.
        #[arg(long = "N", value_delimiter = ',')]
        lengths: Option<Vec<usize>>,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long, value_enum)]
        ensemble: Option<EnsembleArg>,
        /// Number of (f, g) pairs per alpha and length.
        #[arg(long)]
        count: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Weighted-norm experiment for power weights or explicit weights from --config.
    ///
    /// Writes weighted.csv with columns: weight, N, alpha, trials, max_ratio
    /// and weighted-characteristics.csv with columns: weight, N, a2_w,
    /// a2_w_inv, rh_w, rh_w_inv, r, in_test_set.
    Weights {
        /// Comma-separated power-weight exponents.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        power: Option<Vec<f64>>,
        /// Comma-separated window lengths.
        #[arg(long = "N", value_delimiter = ',')]
        lengths: Option<Vec<usize>>,
        /// Reverse-Hoelder exponent.
        #[arg(long)]
        r: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Direct,
    Fft,
}

#[derive(Clone, Copy, ValueEnum)]
enum Piece {
    Mj,
    Uj,
    Lj,
    Ej,
    Kernel,
}

#[derive(Clone, Copy, ValueEnum)]
enum EnsembleArg {
    Rademacher,
    Gaussian,
    Indicator,
}

impl From<EnsembleArg> for Ensemble {
    fn from(e: EnsembleArg) -> Self {
        match e {
            EnsembleArg::Rademacher => Ensemble::Rademacher,
            EnsembleArg::Gaussian => Ensemble::Gaussian,
            EnsembleArg::Indicator => Ensemble::Indicator,
        }
    }
}

fn parse_pair(s: &str) -> std::result::Result<(i64, i64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected \"a,b\", got {s:?}"))?;
    let p = |t: &str| t.trim().parse::<i64>().map_err(|e| e.to_string());
    Ok((p(a)?, p(b)?))
}

/// Config from --config, or a fresh one; --seed overrides.
fn load_config(common: &Common, name: &str) -> Result<ExperimentConfig> {
    let mut c = match &common.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::new(name, 0),
    };
    if let Some(seed) = common.seed {
        c.seed = seed;
    }
    Ok(c)
}

fn finish(report: &Report, out: &Path) -> Result<bool> {
    for p in report.write(out)? {
        println!("wrote {}", p.display());
    }
    for c in &report.checks {
        println!("{c}");
    }
    Ok(report.passed())
}

fn plain_report(
    name: &str,
    probes: &str,
    config: Value,
    tables: Vec<Table>,
    metadata: Map<String, Value>,
    start: Instant,
) -> Report {
    Report {
        experiment: name.into(),
        probes: probes.into(),
        config,
        tables,
        fits: Vec::new(),
        checks: Vec::new(),
        metadata,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        plots: Vec::new(),
    }
}

fn experiment(name: Option<String>, list: bool, common: &Common) -> Result<bool> {
    if list {
        for n in registry_names() {
            println!("{n}");
        }
        return Ok(true);
    }
    if name.is_none() && common.config.is_none() {
        return Err(LabError::Config("give --config or --name".into()));
    }
    let mut c = load_config(common, name.as_deref().unwrap_or_default())?;
    if let Some(n) = name {
        c.name = n;
    }
    let out = c.out_dir.as_ref().map_or(common.out.clone(), PathBuf::from);
    finish(&run_experiment(&c)?, &out)
}

fn transform(
    input: &Path,
    alpha: &TorusPoint,
    method: MethodArg,
    window: Option<(i64, i64)>,
    common: &Common,
) -> Result<bool> {
    let start = Instant::now();
    let f: Signal = serde_json::from_str(&std::fs::read_to_string(input)?)?;
    let w = match window {
        Some((a, b)) => Window::new(a, b)?,
        None => Window::around(&f)?,
    };
    let method = match method {
        MethodArg::Direct => Method::Direct,
        MethodArg::Fft => Method::Fft,
    };
    let h = apply_halpha(&f, alpha, &w, method)?;
    let mut t = Table::new("transform", &["n", "re", "im", "abs"]);
    for n in w.interval().iter() {
        let v = h.get(n);
        t.push(vec![Cell::from(n), v.re.into(), v.im.into(), v.norm().into()]);
    }
    std::fs::create_dir_all(&common.out)?;
    let p = common.out.join("transform-signal.json");
    std::fs::write(&p, serde_json::to_string(&h)? + "\n")?;
    println!("wrote {}", p.display());
    let mut meta = Map::new();
    meta.insert("window".into(), json!([w.interval().a(), w.interval().b()]));
    let config = json!({"alpha": alpha.to_string(), "input": input.display().to_string()});
    finish(
        &plain_report(
            "transform",
            "H^alpha f on an explicit window",
            config,
            vec![t],
            meta,
            start,
        ),
        &common.out,
    )
}

fn multiplier(alpha: &TorusPoint, j: u32, eps: f64, grid: Option<usize>, what: Piece, common: &Common) -> Result<bool> {
    let start = Instant::now();
    let model = MultiplierModel::with_epsilon(eps)?;
    let l = grid.unwrap_or(1usize << (j + 3).min(22));
    let mut meta = Map::new();
    let mut t;
    if let Piece::Kernel = what {
        let k = kernel_ej(alpha, j, &model, l)?;
        t = Table::new("multiplier", &["m", "re", "im", "abs"]);
        let (mut sup, mut arg) = (0.0, 0i64);
        for (i, v) in k.kernel.values().iter().enumerate() {
            let m = k.kernel.offset() + i as i64;
            if v.norm() > sup {
                sup = v.norm();
                arg = m;
            }
            t.push(vec![Cell::from(m), v.re.into(), v.im.into(), v.norm().into()]);
        }
        meta.insert("sup".into(), json!(sup));
        meta.insert("argmax".into(), json!(arg));
    } else {
        let values = match what {
            Piece::Mj => mj_grid(alpha, j, l)?.values().to_vec(),
            Piece::Lj => EjEvaluator::new(alpha, j, &model)?.lj_grid(l)?,
            Piece::Ej => EjEvaluator::new(alpha, j, &model)?.grid(l)?,
            Piece::Uj => (0..l)
                .map(|k| {
                    let y = k as f64 / l as f64;
                    let y = if y > 0.5 { y - 1.0 } else { y };
                    eval_uj(alpha.value(), y, j, &model.quadrature)
                })
                .collect::<Result<_>>()?,
            Piece::Kernel => unreachable!(),
        };
        t = Table::new("multiplier", &["beta", "re", "im", "abs"]);
        let (mut sup, mut arg) = (0.0, 0.0);
        for (k, v) in values.iter().enumerate() {
            let beta = k as f64 / l as f64;
            if v.norm() > sup {
                sup = v.norm();
                arg = beta;
            }
            t.push(vec![Cell::from(beta), v.re.into(), v.im.into(), v.norm().into()]);
        }
        meta.insert("sup".into(), json!(sup));
        meta.insert("argmax".into(), json!(arg));
        // refined estimate when the grid is fine enough for it
        let refined = match what {
            Piece::Mj => Some(sup_on_grid(&MjEvaluator::new(alpha, j)?, eps, j, l)),
            Piece::Ej => Some(sup_on_grid(&EjEvaluator::new(alpha, j, &model)?, eps, j, l)),
            _ => None,
        };
        if let Some(Ok(est)) = refined {
            meta.insert(
                "refined".into(),
                json!({"sup": est.sup, "argmax": est.argmax_beta, "refined_points": est.refined_points,
                       "derivative_slack": est.derivative_slack}),
            );
        }
    }
    meta.insert("grid_len".into(), json!(l));
    meta.insert("grid_step".into(), json!(1.0 / l as f64));
    let what_name = match what {
        Piece::Mj => "Mj",
        Piece::Uj => "Uj",
        Piece::Lj => "Lj",
        Piece::Ej => "Ej",
        Piece::Kernel => "kernel",
    };
    let config = json!({"alpha": alpha.to_string(), "j": j, "eps": eps, "grid": l, "what": what_name});
    finish(
        &plain_report(
            "multiplier",
            "a multiplier piece on a beta grid",
            config,
            vec![t],
            meta,
            start,
        ),
        &common.out,
    )
}

fn gauss(levels: (i64, i64), common: &Common) -> Result<bool> {
    let start = Instant::now();
    let (lo, hi) = levels;
    if lo < 1 || hi < lo || hi > MAX_LEVEL as i64 {
        return Err(LabError::Config(format!(
            "levels must satisfy 1 <= lo <= hi <= {MAX_LEVEL}"
        )));
    }
    let mut t = Table::new("gauss", &["s", "Q", "A", "B", "abs_S", "arg_S"]);
    for s in lo as u32..=hi as u32 {
        for (q, numerators) in enumerate_level(s)?.classes() {
            for &a in numerators {
                for (b, v) in gauss_sums_all_b(a as i64, *q)?.iter().enumerate() {
                    t.push(vec![
                        Cell::from(s),
                        (*q).into(),
                        a.into(),
                        b.into(),
                        v.norm().into(),
                        v.arg().into(),
                    ]);
                }
            }
        }
    }
    let config = json!({"levels": [lo, hi]});
    finish(
        &plain_report(
            "gauss",
            "complete Gauss sums per level",
            config,
            vec![t],
            Map::new(),
            start,
        ),
        &common.out,
    )
}

fn sparse_check(input: &Path, common: &Common) -> Result<bool> {
    let c = SparseCollection::from_json(&std::fs::read_to_string(input)?)?;
    let r = verify_sparse(&c);
    std::fs::create_dir_all(&common.out)?;
    let p = common.out.join("sparse-check.json");
    std::fs::write(&p, serde_json::to_string_pretty(&r)? + "\n")?;
    println!("wrote {}", p.display());
    println!(
        "{}: {} entries, max overlap {} (bound {})",
        if r.sparse { "sparse" } else { "not sparse" },
        c.len(),
        r.max_overlap,
        r.overlap_bound
    );
    Ok(r.sparse)
}

#[allow(clippy::too_many_arguments)]
fn sparse_ratio(
    alpha_set: Option<Vec<TorusPoint>>,
    lengths: Option<Vec<usize>>,
    r: Option<f64>,
    s: Option<f64>,
    ensemble: Option<EnsembleArg>,
    count: Option<usize>,
    common: &Common,
) -> Result<bool> {
    let mut c = load_config(common, "sparse-ratio")?;
    c.name = "sparse-ratio".into();
    c.alphas = alpha_set.or(c.alphas);
    c.lengths = lengths.or(c.lengths);
    c.r = r.or(c.r);
    c.s = s.or(c.s);
    if ensemble.is_some() || count.is_some() {
        let base = c.ensemble.clone().unwrap_or(EnsembleSpec {
            kind: Ensemble::Rademacher,
            count: 200,
        });
        c.ensemble = Some(EnsembleSpec {
            kind: ensemble.map_or(base.kind, Ensemble::from),
            count: count.unwrap_or(base.count),
        });
    }
    finish(&run_experiment(&c)?, &common.out)
}

fn weights(power: Option<Vec<f64>>, lengths: Option<Vec<usize>>, r: Option<f64>, common: &Common) -> Result<bool> {
    let mut c = load_config(common, "weighted")?;
    c.name = "weighted".into();
    if let Some(ps) = power {
        c.weights = Some(ps.into_iter().map(|exponent| WeightSpec::Power { exponent }).collect());
    }
    c.lengths = lengths.or(c.lengths);
    c.r = r.or(c.r);
    finish(&run_experiment(&c)?, &common.out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Experiment { name, list, common } => experiment(name, list, &common),
        Command::Transform {
            input,
            alpha,
            method,
            window,
            common,
        } => transform(&input, &alpha, method, window, &common),
        Command::Multiplier {
            alpha,
            j,
            eps,
            grid,
            what,
            common,
        } => multiplier(&alpha, j, eps, grid, what, &common),
        Command::Gauss { levels, common } => gauss(levels, &common),
        Command::SparseCheck { input, common } => sparse_check(&input, &common),
        Command::SparseRatio {
            alpha_set,
            lengths,
            r,
            s,
            ensemble,
            count,
            common,
        } => sparse_ratio(alpha_set, lengths, r, s, ensemble, count, &common),
        Command::Weights {
            power,
            lengths,
            r,
            common,
        } => weights(power, lengths, r, &common),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
