//! Command-line front end: `run`, `spectrum`, `sweep` and `selftest`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use crate::dense::DEFAULT_DENSE_CAP;
use crate::error::{Error, Result};
use crate::io::{
    execute_to_bundle, fmt_f64, parse_scenario_file, resolve, Executed, ParseReport, Scenario, ScenarioFile,
    ScenarioKind,
};
use crate::lattice::build_lattice;
use crate::selftest::run_selftest;
use crate::spectral::{bloch_eigenphases, flat_band_phases, kappa_labels, lambda_sweep, Branch};

pub const OUT_ENV: &str = "LATTICEWAVE_OUT";

#[derive(Debug, Parser)]
#[command(name = "latticewave", version, about = "Coined quantum walks on periodic lattices")]
struct Cli {
    /// Worker threads for stepping and sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Largest state dimension for which dense matrices are built.
    #[arg(long, global = true)]
    dense_cap: Option<usize>,
    /// Seed for the random states of `selftest`; the simulations themselves are deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (overridden by LATTICEWAVE_OUT).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Reject unknown keys in scenario files.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Execute a scenario file and write a result bundle.
    Run { scenario: PathBuf },
    /// Print the Bloch band table, or eigenphases near zero over a λ range.
    Spectrum {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        /// `start:stop:step`.
        #[arg(long)]
        lambda_sweep: Option<String>,
        /// Marked vertex for the sweep, comma separated (default: origin).
        #[arg(long)]
        mark: Option<String>,
        /// Half-width of the phase window around zero (default: 4ε).
        #[arg(long)]
        window: Option<f64>,
    },
    /// Repeat a scenario over mark detunings or lattice sizes.
    Sweep {
        scenario: PathBuf,
        /// `start:stop:step`, applied to every mark.
        #[arg(long, conflicts_with = "sizes")]
        lambda: Option<String>,
        /// Comma-separated lattice sides.
        #[arg(long = "n", value_delimiter = ',')]
        sizes: Vec<usize>,
    },
    /// Check invariants and oracle equivalence on tiny lattices.
    Selftest,
}

/// Parses `start:stop:step` into an inclusive grid.
pub fn parse_range(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidConfig(format!("expected start:stop:step, got `{text}`"));
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let [start, stop, step] = parts[..] else { return Err(bad()) };
    if !(step > 0.0) || stop < start {
        return Err(bad());
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

/// Runs the CLI and returns the process exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Run { scenario } => cmd_run(cli, scenario),
        Command::Spectrum {
            d,
            n,
            lambda_sweep,
            mark,
            window,
        } => cmd_spectrum(cli, *d, *n, lambda_sweep.as_deref(), mark.as_deref(), *window),
        Command::Sweep {
            scenario,
            lambda,
            sizes,
        } => cmd_sweep(cli, scenario, lambda.as_deref(), sizes),
        Command::Selftest => cmd_selftest(cli),
    }
}

fn out_dir(cli: &Cli, scenario: Option<&Scenario>, fallback: &str) -> PathBuf {
    if let Some(env) = std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(env);
    }
    cli.out
        .clone()
        .or_else(|| scenario.and_then(|s| s.out_path.clone()))
        .unwrap_or_else(|| Path::new("out").join(fallback))
}

fn load(cli: &Cli, path: &Path) -> Result<ScenarioFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let (file, ParseReport { unknown_keys }) = parse_scenario_file(&text, cli.strict)?;
    for key in unknown_keys {
        eprintln!("warning: ignoring unknown key `{key}` (use --strict to reject)");
    }
    Ok(file)
}

fn configure(cli: &Cli, mut scenario: Scenario) -> Scenario {
    scenario.config.threads = cli.threads.max(1);
    scenario.config.dense_cap = cli.dense_cap.unwrap_or(DEFAULT_DENSE_CAP);
    scenario
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or("run".into(), |s| s.to_string_lossy().into_owned())
}

fn cmd_run(cli: &Cli, path: &Path) -> Result<i32> {
    let file = load(cli, path)?;
    let scenario = match resolve(&file) {
        Ok(s) => configure(cli, s),
        Err(e) => {
            let dir = out_dir(cli, None, &stem(path));
            crate::io::write_bundle(&dir, None, crate::io::Outcome::Failed(&e), 0.0)?;
            return Err(e);
        }
    };
    let dir = out_dir(cli, Some(&scenario), &stem(path));
    let done = execute_to_bundle(&scenario, &dir)?;
    println!("{}", describe(&done));
    println!("bundle written to {}", dir.display());
    Ok(0)
}

fn describe(done: &Executed) -> String {
    match done {
        Executed::Sweep(rows) => format!("{} detunings probed", rows.len()),
        Executed::Run(r) => {
            if let Some(s) = &r.summary.search {
                format!(
                    "search: peak probability {:.4} at step {} (predicted T0 = {})",
                    s.peak_probability, s.peak_step, s.predicted_t0
                )
            } else if let Some(t) = &r.summary.transfer {
                format!("transfer over {} steps: fidelity per mark {:?}", t.steps, t.fidelity)
            } else {
                format!("{} steps, final norm {:.6}", r.steps(), r.series.last().map_or(0.0, |row| row.norm))
            }
        }
    }
}

fn cmd_spectrum(cli: &Cli, d: usize, n: usize, sweep: Option<&str>, mark: Option<&str>, window: Option<f64>) -> Result<i32> {
    let spec = build_lattice(d, n)?;
    let mut table = String::new();
    match sweep {
        None => {
            let header: Vec<String> = (0..d).map(|i| format!("kappa_{i}")).collect();
            table.push_str(&format!("{},band,phase\n", header.join(",")));
            let modes = bloch_eigenphases(&spec);
            let flat = flat_band_phases(&spec);
            let per_kappa = flat.len() / spec.vertex_count();
            for (i, kappa) in kappa_labels(&spec).enumerate() {
                let k: Vec<String> = kappa.iter().map(|c| c.to_string()).collect();
                for m in &modes[2 * i..2 * i + 2] {
                    let band = match m.branch {
                        Branch::Plus => "plus",
                        Branch::Minus => "minus",
                    };
                    table.push_str(&format!("{},{band},{}\n", k.join(","), fmt_f64(m.phase())));
                }
                for p in &flat[i * per_kappa..(i + 1) * per_kappa] {
                    table.push_str(&format!("{},flat,{}\n", k.join(","), fmt_f64(*p)));
                }
            }
        }
        Some(range) => {
            let lambdas = parse_range(range)?;
            let coords: Vec<i64> = match mark {
                Some(text) => text
                    .split(',')
                    .map(|c| c.trim().parse().map_err(|_| Error::InvalidConfig(format!("bad vertex `{text}`"))))
                    .collect::<Result<_>>()?,
                None => vec![0; d],
            };
            let target = spec.vertex_signed(&coords)?;
            let cap = cli.dense_cap.unwrap_or(DEFAULT_DENSE_CAP);
            let result = lambda_sweep(&spec, &target, &lambdas, window, cap)?;
            table.push_str("lambda,phase,crossing\n");
            for row in &result.rows {
                for &p in &row.phases {
                    let crossing = row.crossing.iter().any(|c| (c - p).abs() < 1e-14);
                    table.push_str(&format!("{},{},{}\n", fmt_f64(row.lambda), fmt_f64(p), crossing as u8));
                }
            }
        }
    }
    if let Some(dir) = cli.out.clone().or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from)) {
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let path = dir.join("spectrum.csv");
        std::fs::write(&path, &table).map_err(|e| Error::io(&path, e))?;
    }
    std::io::stdout()
        .write_all(table.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))?;
    Ok(0)
}

fn cmd_sweep(cli: &Cli, path: &Path, lambda: Option<&str>, sizes: &[usize]) -> Result<i32> {
    let base = load(cli, path)?;
    if base.scenario.kind == ScenarioKind::Sweep {
        return Err(Error::InvalidConfig("sweep kind scenarios already sweep λ; use `run`".into()));
    }
    let variants: Vec<(String, ScenarioFile)> = match (lambda, sizes) {
        (Some(range), _) => parse_range(range)?
            .into_iter()
            .map(|l| {
                let mut f = base.clone();
                f.marks.iter_mut().for_each(|m| m.lambda = l);
                (format!("lambda_{l:.4}"), f)
            })
            .collect(),
        (None, sizes) if !sizes.is_empty() => sizes
            .iter()
            .map(|&n| {
                let mut f = base.clone();
                f.lattice.n = n;
                (format!("n_{n}"), f)
            })
            .collect(),
        _ => return Err(Error::InvalidConfig("sweep needs --lambda or --n".into())),
    };
    let root = out_dir(cli, None, &format!("{}_sweep", stem(path)));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let results: Vec<(String, Result<Executed>)> = pool.install(|| {
        variants
            .into_par_iter()
            .map(|(label, file)| {
                let dir = root.join(&label);
                let outcome = match resolve(&file) {
                    Ok(s) => {
                        // each instance steps serially; the sweep itself is the parallel axis
                        let mut s = configure(cli, s);
                        s.config.threads = 1;
                        execute_to_bundle(&s, &dir)
                    }
                    Err(e) => crate::io::write_bundle(&dir, None, crate::io::Outcome::Failed(&e), 0.0)
                        .and(Err(e)),
                };
                (label, outcome)
            })
            .collect()
    });

    let summary = root.join("sweep_summary.csv");
    let mut w = csv::Writer::from_path(&summary)?;
    w.write_record(["label", "status", "detail"])?;
    let mut failures = 0;
    for (label, r) in &results {
        let (status, detail) = match r {
            Ok(done) => ("ok", describe(done)),
            Err(e) => {
                failures += 1;
                ("error", e.to_string())
            }
        };
        println!("{label}: {status}: {detail}");
        w.write_record([label.as_str(), status, detail.as_str()])?;
    }
    w.flush().map_err(|e| Error::io(&summary, e))?;
    Ok(if failures == 0 { 0 } else { 1 })
}

fn cmd_selftest(cli: &Cli) -> Result<i32> {
    let checks = run_selftest(cli.seed.unwrap_or(0))?;
    let mut ok = true;
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        ok &= c.passed;
    }
    Ok(if ok { 0 } else { 1 })
}
