//! Command-line front end: `solve`, `lp`, `exact`, `gen`, `verify-rounding`
//! and `bench`.
//!
//! Exit codes: 0 success, 1 invalid or infeasible input, 2 internal
//! consistency failure, 3 statistical suite failure.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
use crate::instance::{generate, parse_instance, serialize_instance, validate_metric, GenMode, Instance};
use crate::lp::{build_lp, solve_lp};
use crate::oracle::{exact_opt, ratio_report_prepared, ratio_report_with, MAX_EXACT_FACILITIES};
use crate::pipeline::{PipelineOptions, Prepared};
use crate::report::{emit_csv, emit_json, SolveRecord};
use crate::rounding::suite::{run_property_suite, SuiteConfig};

/// Exit code for a failed statistical suite.
pub const EXIT_SUITE_FAILED: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ftfl",
    about = "Fault-tolerant facility location by dependent LP rounding",
    after_help = "Set FTFL_THREADS to cap worker threads (0 = one per core)."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the rounding pipeline for many seeded trials.
    Solve {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Override the scaling constant; must lie in (1, 2).
        #[arg(long)]
        gamma: Option<f64>,
        /// Emit a JSON record instead of the text summary.
        #[arg(long)]
        json: bool,
        /// LP feasibility tolerance.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Accept non-metric instances (disables the coverage radius check).
        #[arg(long)]
        no_metric_check: bool,
        /// Also compute the exact optimum (at most 20 facilities).
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the LP relaxation and print the fractional optimum.
    Lp {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Exact optimum by enumeration (at most 20 facilities).
    Exact { file: PathBuf },
    /// Generate a random metric instance.
    Gen {
        #[arg(long, default_value = "euclidean")]
        mode: GenMode,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        rmax: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized property suite for dependent rounding.
    VerifyRounding {
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fixed k for the min-k checks (random per triple otherwise).
        #[arg(long)]
        k: Option<usize>,
    },
    /// One ratio report per instance file in a directory, as CSV.
    Bench {
        dir: PathBuf,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        no_metric_check: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let threads = std::env::var("FTFL_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return 2;
        }
    };
    match pool.install(|| dispatch(cli.command)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn read_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_instance(&text)
}

fn require_metric(inst: &Instance) -> Result<()> {
    let report = validate_metric(inst, 1e-9);
    match report.violations.first() {
        None => Ok(()),
        Some(v) => Err(Error::NonMetric(format!(
            "c({}, {}) = {} exceeds the path through facility {} and client {} of length {} ({} violations)",
            v.facility,
            v.client,
            v.direct,
            v.via_facility,
            v.via_client,
            v.detour,
            report.violations.len()
        ))),
    }
}

fn check_gamma(gamma: Option<f64>) -> Result<()> {
    match gamma {
        Some(g) if !(g > 1.0 && g < 2.0) => Err(Error::InvalidInput(format!("--gamma {g} must lie in (1, 2)"))),
        _ => Ok(()),
    }
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidInput("--trials must be at least 1".into()));
    }
    Ok(())
}

fn output(out: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match out {
        Some(path) => {
            let mut file = io::BufWriter::new(
                fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
            );
            write(&mut file)?;
            file.flush()?;
            Ok(())
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Solve {
            file,
            seed,
            trials,
            gamma,
            json,
            tol,
            no_metric_check,
            exact,
            out,
        } => {
            check_trials(trials)?;
            check_gamma(gamma)?;
            let inst = read_instance(&file)?;
            if !no_metric_check {
                require_metric(&inst)?;
            }
            let opts = PipelineOptions {
                gamma,
                lp_tol: tol,
                check_radius: !no_metric_check,
            };
            let prep = Prepared::with_options(&inst, opts)?;
            let mut report = ratio_report_prepared(&prep, trials, seed, exact)?;
            let diag = prep.diagnostics();
            report.instance = file.display().to_string();
            let record = SolveRecord::new(seed, diag, &report);
            output(out.as_deref(), |w| {
                if json {
                    emit_json(&record, w)
                } else {
                    write_summary(&record, w)
                }
            })?;
            if record.feasibility_failures > 0 {
                return Err(Error::internal(
                    "feasibility",
                    format!("{} infeasible trials", record.feasibility_failures),
                ));
            }
            Ok(0)
        }
        Command::Lp { file, tol, json } => {
            let inst = read_instance(&file)?;
            let sol = solve_lp(&build_lp(&inst), tol)?;
            let mut out = io::stdout().lock();
            if json {
                let value = serde_json::json!({
                    "objective": sol.objective,
                    "y": sol.y,
                    "x": sol.x,
                });
                emit_json(&value, &mut out)?;
            } else {
                writeln!(out, "lp_cost {}", sol.objective)?;
                for (i, y) in sol.y.iter().enumerate() {
                    if *y > 0.0 {
                        writeln!(out, "y[{i}] = {y}")?;
                    }
                }
                for (j, row) in sol.x.iter().enumerate() {
                    for (i, x) in row.iter().enumerate() {
                        if *x > 0.0 {
                            writeln!(out, "x[{i}][{j}] = {x}")?;
                        }
                    }
                }
            }
            Ok(0)
        }
        Command::Exact { file } => {
            let inst = read_instance(&file)?;
            if inst.num_facilities() > MAX_EXACT_FACILITIES {
                return Err(Error::Size(format!(
                    "{} facilities; exact enumeration supports at most {MAX_EXACT_FACILITIES}",
                    inst.num_facilities()
                )));
            }
            let sol = exact_opt(&inst)?;
            let open: Vec<String> = sol.open.iter().map(usize::to_string).collect();
            println!("opt {}", sol.cost);
            println!("open {}", open.join(" "));
            Ok(0)
        }
        Command::Gen {
            mode,
            m,
            n,
            rmax,
            seed,
            out,
        } => {
            let inst = generate(mode, m, n, rmax, seed)?;
            output(out.as_deref(), |w| {
                w.write_all(serialize_instance(&inst).as_bytes())?;
                w.write_all(b"\n")?;
                Ok(())
            })?;
            Ok(0)
        }
        Command::VerifyRounding { n, trials, seed, k } => {
            check_trials(trials)?;
            if n < 2 {
                return Err(Error::InvalidInput("--n must be at least 2".into()));
            }
            let cfg = SuiteConfig {
                k,
                ..SuiteConfig::new(n, trials, seed)
            };
            let report = run_property_suite(&cfg)?;
            print!("{}", report.render());
            Ok(if report.all_passed() { 0 } else { EXIT_SUITE_FAILED })
        }
        Command::Bench {
            dir,
            trials,
            seed,
            gamma,
            tol,
            no_metric_check,
            out,
        } => {
            check_trials(trials)?;
            check_gamma(gamma)?;
            let mut files: Vec<PathBuf> = fs::read_dir(&dir)
                .map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "ftfl"))
                .collect();
            files.sort();
            if files.is_empty() {
                return Err(Error::InvalidInput(format!("no .ftfl files in {}", dir.display())));
            }
            let opts = PipelineOptions {
                gamma,
                lp_tol: tol,
                check_radius: !no_metric_check,
            };
            let mut reports = Vec::with_capacity(files.len());
            for path in &files {
                let inst = read_instance(path)?;
                if !no_metric_check {
                    require_metric(&inst)?;
                }
                let mut report = ratio_report_with(&inst, trials, seed, true, opts)?;
                report.instance = path
                    .file_name()
                    .map_or_else(|| path.display().to_string(), |f| f.to_string_lossy().into_owned());
                reports.push(report);
            }
            output(out.as_deref(), |w| emit_csv(&reports, w))?;
            Ok(0)
        }
    }
}

fn write_summary(rec: &SolveRecord, w: &mut dyn Write) -> Result<()> {
    for (t, c) in rec.costs.iter().enumerate() {
        writeln!(w, "trial {t} cost {c}")?;
    }
    writeln!(w, "gamma {}", rec.gamma)?;
    writeln!(w, "lp_cost {}", rec.lp_cost)?;
    if let Some(opt) = rec.opt_cost {
        writeln!(w, "opt_cost {opt}")?;
    }
    writeln!(w, "trials {}", rec.trials)?;
    writeln!(w, "mean {}", rec.mean)?;
    writeln!(w, "stderr {}", rec.stderr)?;
    writeln!(w, "ratio_to_lp {}", rec.ratio_to_lp)?;
    writeln!(w, "preopened {} clusters {}", rec.preopened, rec.cluster_count)?;
    Ok(())
}
