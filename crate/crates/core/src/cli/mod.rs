//! The `wpcurv` command-line front end.
//!
//! Settings come from built-in defaults, then a flat `key = value` config file,
//! then command-line flags. The config file is named by `--config` unless the
//! `WPCURV_CONFIG` environment variable points elsewhere.
//!
//! Exit codes: `0` success, `2` argument, configuration or domain errors, `3`
//! accuracy or convergence failures.

mod config;
mod output;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use config::{OutputFormat, RunConfig, CONFIG_ENV};
pub use output::{write_atomic, ConfigSummary, ResultRecord, ResultRow};

use crate::beltrami::{
    basis_element, sup_norm_exact, sup_norm_numeric, thick_part_constant, ProjectionKernel,
};
use crate::curvature::{thick_part_bounds, CurvatureContext, CurvatureReport};
use crate::error::{Error, Result};
use crate::geometry::build_grid;
use crate::resolvent::{
    resolvent_selftest, structural_checks, GridFunction, ResolventCache, ResolventOperator,
    StructuralTolerances,
};

#[derive(Debug, Parser)]
#[command(
    name = "wpcurv",
    version,
    about = "Weil-Petersson curvature of universal Teichmuller space"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// Flat key = value config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    radial_count: Option<usize>,
    #[arg(long, global = true)]
    angular_order: Option<usize>,
    #[arg(long, global = true)]
    solver_tol: Option<f64>,
    /// Largest accepted est_error relative to max(|value|, 1).
    #[arg(long, global = true)]
    report_rtol: Option<f64>,
    /// mode_bvp or kernel_convolution.
    #[arg(long, global = true)]
    backend: Option<String>,
    /// Directory for persisted resolvent solves.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    output: Option<OutputFormat>,
    /// Write results here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Holomorphic sectional curvatures s_n.
    Holo {
        #[arg(long, default_value_t = 2)]
        n_min: usize,
        #[arg(long, default_value_t = 40)]
        n_max: usize,
    },
    /// Sectional curvatures K_{m,n}; all pairs m < n ≤ max-index unless --m and --n are given.
    Sect {
        #[arg(long, requires = "n")]
        m: Option<usize>,
        #[arg(long, requires = "m")]
        n: Option<usize>,
        #[arg(long, default_value_t = 12)]
        max_index: usize,
    },
    /// A single curvature tensor entry R_{αβ̄λδ̄}.
    Riemann {
        #[arg(num_args = 4, required = true, value_names = ["ALPHA", "BETA", "LAMBDA", "DELTA"])]
        indices: Vec<usize>,
    },
    /// Ricci partial sums with Aitken extrapolation.
    Ricci {
        #[arg(long, default_value_t = 2)]
        alpha: usize,
        #[arg(long, default_value_t = 64)]
        cutoff: usize,
    },
    /// Thick-part curvature bounds for moduli space.
    Bounds {
        #[arg(long)]
        genus: u32,
        #[arg(long)]
        inj_radius: f64,
    },
    /// Sup-norms of basis elements, numeric and closed form.
    Supnorm {
        #[arg(long, default_value_t = 2)]
        n_min: usize,
        #[arg(long, default_value_t = 20)]
        n_max: usize,
    },
    /// The constant C(r) on a log-spaced sweep.
    ConstC {
        #[arg(long, default_value_t = 1e-3)]
        r_min: f64,
        #[arg(long, default_value_t = 20.0)]
        r_max: f64,
        #[arg(long, default_value_t = 50)]
        points: usize,
    },
    /// G(1) = 1 and manufactured-solution checks.
    ResolventSelftest,
    /// Positivity, mass, maximum-principle and Cauchy-Schwarz checks on random functions.
    #[command(name = "lemma1")]
    Structural {
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        max_mode: usize,
        #[arg(long, default_value_t = 3)]
        degree: usize,
    },
    /// Sup of the truncated projection-kernel density for N = 2 … n-max.
    KernelLambda {
        #[arg(long, default_value_t = 64)]
        n_max: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Holo { .. } => "holo",
            Command::Sect { .. } => "sect",
            Command::Riemann { .. } => "riemann",
            Command::Ricci { .. } => "ricci",
            Command::Bounds { .. } => "bounds",
            Command::Supnorm { .. } => "supnorm",
            Command::ConstC { .. } => "const-c",
            Command::ResolventSelftest => "resolvent-selftest",
            Command::Structural { .. } => "lemma1",
            Command::KernelLambda { .. } => "kernel-lambda",
        }
    }

    fn params(&self) -> BTreeMap<String, String> {
        let pairs: Vec<(&str, String)> = match self {
            Command::Holo { n_min, n_max } => {
                vec![("n_min", n_min.to_string()), ("n_max", n_max.to_string())]
            }
            Command::Sect { m, n, max_index } => vec![
                ("m", m.map_or("all".into(), |v| v.to_string())),
                ("n", n.map_or("all".into(), |v| v.to_string())),
                ("max_index", max_index.to_string()),
            ],
            Command::Riemann { indices } => vec![("indices", join(indices))],
            Command::Ricci { alpha, cutoff } => {
                vec![("alpha", alpha.to_string()), ("cutoff", cutoff.to_string())]
            }
            Command::Bounds { genus, inj_radius } => {
                vec![
                    ("genus", genus.to_string()),
                    ("inj_radius", inj_radius.to_string()),
                ]
            }
            Command::Supnorm { n_min, n_max } => {
                vec![("n_min", n_min.to_string()), ("n_max", n_max.to_string())]
            }
            Command::ConstC {
                r_min,
                r_max,
                points,
            } => vec![
                ("r_min", r_min.to_string()),
                ("r_max", r_max.to_string()),
                ("points", points.to_string()),
            ],
            Command::ResolventSelftest => vec![],
            Command::Structural {
                samples,
                seed,
                max_mode,
                degree,
            } => vec![
                ("samples", samples.to_string()),
                ("seed", seed.to_string()),
                ("max_mode", max_mode.to_string()),
                ("degree", degree.to_string()),
            ],
            Command::KernelLambda { n_max } => vec![("n_max", n_max.to_string())],
        };
        pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    fn uses_resolvent(&self) -> bool {
        matches!(
            self,
            Command::Holo { .. }
                | Command::Sect { .. }
                | Command::Riemann { .. }
                | Command::Ricci { .. }
                | Command::ResolventSelftest
                | Command::Structural { .. }
        )
    }
}

fn join(v: &[usize]) -> String {
    v.iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with_env(argv, std::env::var_os(CONFIG_ENV).map(PathBuf::from))
}

/// As [`run`], with the config-path override passed explicitly.
pub fn run_with_env<I, T>(argv: I, env_config: Option<PathBuf>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli, env_config) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("wpcurv: {e}");
            match e {
                Error::Domain(_) | Error::Config(_) => 2,
                Error::Accuracy(_) | Error::Numerical { .. } => 3,
            }
        }
    }
}

fn resolve_config(global: &GlobalOpts, env_config: Option<PathBuf>) -> Result<RunConfig> {
    let path = env_config.or_else(|| global.config.clone());
    let mut cfg = match path {
        Some(p) => RunConfig::from_file(&p)?,
        None => RunConfig::default(),
    };
    if let Some(v) = global.radial_count {
        cfg.radial_count = v;
    }
    if let Some(v) = global.angular_order {
        cfg.angular_order = v;
    }
    if let Some(v) = global.solver_tol {
        cfg.solver_tol = v;
    }
    if let Some(v) = global.report_rtol {
        cfg.report_rtol = v;
    }
    if let Some(v) = &global.backend {
        cfg.backend = v.parse()?;
    }
    if let Some(v) = &global.cache_dir {
        cfg.cache_dir = Some(v.clone());
    }
    if let Some(v) = global.output {
        cfg.output = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cache_path(dir: &Path, digest: &str) -> PathBuf {
    dir.join(format!("resolvent-{digest}.json"))
}

fn execute(cli: Cli, env_config: Option<PathBuf>) -> Result<()> {
    let cfg = resolve_config(&cli.global, env_config)?;
    let digest = cfg.digest();
    let cache = Arc::new(ResolventCache::new());
    let persisted = cfg
        .cache_dir
        .as_ref()
        .filter(|_| cli.command.uses_resolvent())
        .map(|d| cache_path(d, &digest));
    if let Some(p) = &persisted {
        cache.import(p, &digest)?;
    }

    let results = compute(&cli.command, &cfg, &cache)?;

    if let Some(p) = &persisted {
        cache.export(p, &digest)?;
    }
    let record = ResultRecord {
        command: cli.command.name().to_string(),
        params: cli.command.params(),
        results,
        config: ConfigSummary::from(&cfg),
        timestamp: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };
    let text = record.render(cfg.output)?;
    match &cli.global.out {
        Some(p) => write_atomic(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn context(cfg: &RunConfig, cache: &Arc<ResolventCache>) -> Result<CurvatureContext> {
    Ok(CurvatureContext::new(
        build_grid(cfg.radial_count, cfg.angular_order)?,
        cfg.backend,
        cfg.solver_tol,
    )?
    .with_cache(cache.clone()))
}

fn operator(cfg: &RunConfig, cache: &Arc<ResolventCache>) -> Result<ResolventOperator> {
    Ok(ResolventOperator::with_tolerance(
        build_grid(cfg.radial_count, cfg.angular_order)?,
        cfg.backend,
        cfg.solver_tol,
    )?
    .with_cache(cache.clone()))
}

/// Fails with an accuracy error listing rows whose error estimate is too large.
fn check_accuracy(rows: &[ResultRow], rtol: f64) -> Result<()> {
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| !(r.est_error <= rtol * r.value.abs().max(1.0)))
        .map(|r| {
            format!(
                "{}[{}] = {:e} ± {:e}",
                r.quantity, r.index, r.value, r.est_error
            )
        })
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::accuracy(format!(
            "error estimate above report_rtol {rtol:e} for {}",
            bad.join("; ")
        )))
    }
}

fn curvature_rows(reports: &[CurvatureReport]) -> Vec<ResultRow> {
    reports
        .iter()
        .map(|r| {
            ResultRow::new(
                r.quantity.as_str(),
                join(&r.indices),
                r.value.re,
                r.est_error,
            )
        })
        .collect()
}

fn index_range(n_min: usize, n_max: usize, what: &str) -> Result<Vec<usize>> {
    if n_min < 2 || n_max < 2 {
        return Err(Error::domain(format!(
            "{what} requires n ≥ 2, got range {n_min}..={n_max}"
        )));
    }
    if n_min > n_max {
        return Err(Error::domain(format!(
            "empty index range {n_min}..={n_max}"
        )));
    }
    Ok((n_min..=n_max).collect())
}

fn compute(
    command: &Command,
    cfg: &RunConfig,
    cache: &Arc<ResolventCache>,
) -> Result<Vec<ResultRow>> {
    let rows = match command {
        Command::Holo { n_min, n_max } => {
            let ns = index_range(*n_min, *n_max, "holo")?;
            let rows = curvature_rows(&context(cfg, cache)?.holo_sweep(&ns)?);
            check_accuracy(&rows, cfg.report_rtol)?;
            rows
        }
        Command::Sect { m, n, max_index } => {
            let pairs: Vec<(usize, usize)> = match (m, n) {
                (Some(m), Some(n)) => vec![(*m, *n)],
                _ => {
                    index_range(2, *max_index, "sect")?;
                    (2..=*max_index)
                        .flat_map(|m| (m + 1..=*max_index).map(move |n| (m, n)))
                        .collect()
                }
            };
            let rows = curvature_rows(&context(cfg, cache)?.sectional_sweep(&pairs)?);
            check_accuracy(&rows, cfg.report_rtol)?;
            rows
        }
        Command::Riemann { indices } => {
            let r = context(cfg, cache)?
                .riemann_entry(indices[0], indices[1], indices[2], indices[3])?;
            let idx = join(indices);
            let rows = vec![
                ResultRow::new("riemann_entry_re", &idx, r.value.re, r.est_error),
                ResultRow::new("riemann_entry_im", &idx, r.value.im, r.est_error),
            ];
            check_accuracy(&rows, cfg.report_rtol)?;
            rows
        }
        Command::Ricci { alpha, cutoff } => {
            let series = context(cfg, cache)?.ricci_partial(*alpha, *cutoff)?;
            let mut rows: Vec<ResultRow> = series
                .cutoffs
                .iter()
                .zip(&series.partial_sums)
                .zip(&series.est_errors)
                .map(|((n, s), e)| ResultRow::new("ricci_partial", format!("{alpha},{n}"), *s, *e))
                .collect();
            check_accuracy(&rows, cfg.report_rtol)?;
            if let Some(a) = series.aitken() {
                let tail = series.partial_sums.len();
                let gap = if tail >= 2 {
                    (a - series.raw()).abs()
                } else {
                    0.0
                };
                rows.push(ResultRow::new(
                    "ricci_aitken",
                    format!("{alpha},{cutoff}"),
                    a,
                    gap,
                ));
            }
            rows
        }
        Command::Bounds { genus, inj_radius } => {
            let b = thick_part_bounds(*genus, *inj_radius)?;
            let idx = format!("g={genus};r={inj_radius}");
            b.named_values()
                .iter()
                .map(|(name, v)| ResultRow::new(*name, &idx, *v, 0.0))
                .collect()
        }
        Command::Supnorm { n_min, n_max } => {
            let mut rows = Vec::new();
            for n in index_range(*n_min, *n_max, "supnorm")? {
                let exact = sup_norm_exact(n)?;
                let numeric = sup_norm_numeric(&basis_element(n)?);
                let gap = (numeric.value - exact).abs();
                rows.push(ResultRow::new("sup_norm_exact", n, exact, 0.0));
                rows.push(ResultRow::new("sup_norm_numeric", n, numeric.value, gap));
                let radius = ((n as f64 - 2.0) / (n as f64 + 2.0)).sqrt();
                rows.push(ResultRow::new(
                    "sup_radius",
                    n,
                    numeric.radius,
                    (numeric.radius - radius).abs(),
                ));
            }
            rows
        }
        Command::ConstC {
            r_min,
            r_max,
            points,
        } => {
            if !(*r_min > 0.0 && r_max >= r_min) || *points < 1 {
                return Err(Error::domain(format!(
                    "need 0 < r_min ≤ r_max and points ≥ 1, got {r_min}, {r_max}, {points}"
                )));
            }
            let ratio = if *points > 1 {
                (r_max / r_min).ln() / (*points - 1) as f64
            } else {
                0.0
            };
            (0..*points)
                .map(|j| {
                    let r = r_min * (ratio * j as f64).exp();
                    thick_part_constant(r).map(|c| ResultRow::new("c_value", r, c.value, 0.0))
                })
                .collect::<Result<Vec<_>>>()?
        }
        Command::ResolventSelftest => {
            let report = resolvent_selftest(&operator(cfg, cache)?)?;
            if !report.passed() {
                let failed: Vec<String> = report
                    .checks
                    .iter()
                    .filter(|c| !c.passed)
                    .map(|c| format!("{}: {:e} > {:e}", c.name, c.error, c.tolerance))
                    .collect();
                return Err(Error::accuracy(format!(
                    "resolvent self-test failed: {}",
                    failed.join("; ")
                )));
            }
            report
                .checks
                .iter()
                .map(|c| ResultRow::new("selftest_error", &c.name, c.error, 0.0))
                .collect()
        }
        Command::Structural {
            samples,
            seed,
            max_mode,
            degree,
        } => {
            let op = operator(cfg, cache)?;
            if 2 * max_mode > cfg.angular_order {
                return Err(Error::config(format!(
                    "max_mode {max_mode} needs angular_order ≥ {}",
                    2 * max_mode
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let tol = StructuralTolerances::default();
            let mut worst = [f64::INFINITY, 0.0, f64::INFINITY, f64::NEG_INFINITY];
            let mut failures = 0usize;
            for _ in 0..*samples {
                let f = GridFunction::random_band_limited(op.grid(), &mut rng, *max_mode, *degree);
                let g = GridFunction::random_band_limited(op.grid(), &mut rng, *max_mode, *degree);
                let r = structural_checks(&op, &f, &g, &tol)?;
                worst[0] = worst[0].min(r.quadratic_form);
                worst[1] = f64::max(
                    worst[1],
                    (r.mass_out - r.mass_in).abs() / r.mass_in.abs().max(1.0),
                );
                worst[2] = worst[2].min(r.min_value);
                worst[3] = worst[3].max(r.cauchy_schwarz_excess);
                failures += usize::from(!r.passed());
            }
            if failures > 0 {
                return Err(Error::accuracy(format!(
                    "{failures} of {samples} samples violated a property; worst values {worst:?}"
                )));
            }
            vec![
                ResultRow::new("positivity_min", "A", worst[0], 0.0),
                ResultRow::new("mass_rel_error_max", "B", worst[1], 0.0),
                ResultRow::new("nonnegativity_min", "C", worst[2], 0.0),
                ResultRow::new("cauchy_schwarz_excess_max", "D", worst[3], 0.0),
            ]
        }
        Command::KernelLambda { n_max } => {
            if *n_max < 2 {
                return Err(Error::domain(format!(
                    "kernel-lambda requires n ≥ 2, got {n_max}"
                )));
            }
            (2..=*n_max)
                .map(|n| {
                    ProjectionKernel::new(n)
                        .map(|k| ResultRow::new("lambda_sup", n, k.lambda_sup().value, 0.0))
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(rows)
}
