use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use nsk_harness::run::{read_report, read_series, run_batch, series_header};
use nsk_harness::verify::{format_verdict, measure_dispersion, tensor_equivalence, DispersionSetup};
use nsk_harness::{load_config, verify_suite, Level, Verdict};

#[derive(Parser)]
#[command(name = "nsk", version, about = "Navier-Stokes-Korteweg pseudospectral runs and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more scenario configs (concurrently), writing series.csv and report.json.
    Run {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
        /// Output directory (one subdirectory per config when several are given).
        #[arg(long, default_value = "runs")]
        out: PathBuf,
        /// Validate and echo the config without integrating.
        #[arg(long)]
        dry_run: bool,
    },
    /// Run the verification suite.
    Verify {
        #[arg(long, value_enum, default_value = "quick")]
        level: LevelArg,
        /// Also write the verdicts as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Compare the primitive and A/B forms of div K for a power law.
    TensorCheck {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value_t = 128)]
        n: usize,
    },
    /// Measure the linear frequency of mode k against the dispersion relation.
    Dispersion {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 256)]
        n: usize,
        #[arg(long, default_value_t = 0.1)]
        kappa: f64,
        #[arg(long, default_value_t = 1e-4)]
        amplitude: f64,
    },
    /// Summarize a finished run directory.
    Report { run_dir: PathBuf },
}

fn print_verdicts(verdicts: &[Verdict]) {
    for v in verdicts {
        println!("{}", format_verdict(v));
    }
}

fn exit(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn main() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Run { configs, out, dry_run } => {
            let mut jobs = Vec::new();
            for path in &configs {
                let config = load_config(path)?;
                let dir = if configs.len() == 1 {
                    out.clone()
                } else {
                    out.join(path.file_stem().context("config path has no file name")?)
                };
                jobs.push((config, dir));
            }
            let mut ok = true;
            for ((_, dir), result) in jobs.iter().zip(run_batch(&jobs, dry_run)) {
                let report = result.with_context(|| format!("run writing to {}", dir.display()))?;
                println!("{}: {:?}, {} steps", dir.display(), report.termination, report.steps);
                if dry_run {
                    println!("{}", serde_json::to_string_pretty(&report.config)?);
                }
                print_verdicts(&report.checks);
                ok &= report.passed;
            }
            Ok(exit(ok))
        }
        Command::Verify { level, json } => {
            let level = match level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            let report = verify_suite(level);
            for g in &report.groups {
                println!("== {} ({:.1} s)", g.name, g.seconds);
                print_verdicts(&g.verdicts);
            }
            println!("total {:.1} s, {} failure(s)", report.seconds, report.failures().len());
            if let Some(path) = json {
                std::fs::write(&path, serde_json::to_string_pretty(&report)?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(exit(report.passed()))
        }
        Command::TensorCheck { alpha, n } => {
            let mut ok = true;
            for dim in [1, 2] {
                let t = Instant::now();
                let r = tensor_equivalence(alpha, dim, n)?;
                let secs = t.elapsed().as_secs_f64();
                let v = Verdict::at_most(&format!("tensor_equivalence_{dim}d_n{n}_alpha{alpha}"), r, 1e-8);
                println!("{} ({secs:.3} s)", format_verdict(&v));
                ok &= v.passed;
            }
            Ok(exit(ok))
        }
        Command::Dispersion { k, n, kappa, amplitude } => {
            let m = measure_dispersion(DispersionSetup { n, kappa, amplitude, ..DispersionSetup::new(k) })?;
            println!("omega measured {:.10} theory {:.10}", m.omega, m.omega_theory);
            let v = Verdict::at_most(&format!("dispersion_k{k}"), m.relative_error, 5e-3);
            println!("{}", format_verdict(&v));
            Ok(exit(v.passed))
        }
        Command::Report { run_dir } => {
            let report = read_report(&run_dir)?;
            println!("scenario {} ({}D, n={})", report.config.scenario.id.as_str(), report.config.domain.dim, report.config.domain.n);
            println!("termination {:?}, {} steps", report.termination, report.steps);
            let i = &report.initial;
            println!(
                "initial: |grad rho| {:.4e}, |sqrt(rho) u| {:.4e}, |j_gamma|_1 {:.4e}, |grad A| {:.4e}",
                i.grad_rho, i.sqrt_rho_u, i.j_gamma, i.grad_a
            );
            if let Some(f) = &report.final_diagnostics {
                println!(
                    "final t={}: E {:.6e}, budget residual {:.3e}, rho in [{:.4}, {:.4}], gain norm {:.6e}, concentration {:.4e}",
                    f.t, f.energy, f.budget_residual, f.rho_min, f.rho_max, f.gain_norm, f.concentration_max
                );
            }
            let mut ok = report.passed;
            if !report.dry_run {
                let (header, rows) = read_series(&run_dir)?;
                let expected = series_header(report.config.domain.dim);
                let columns_ok = header == expected && rows.iter().all(|r| r.len() == expected.len());
                println!("series: {} rows, columns {}", rows.len(), if columns_ok { "ok" } else { "MISMATCH" });
                ok &= columns_ok;
            }
            print_verdicts(&report.checks);
            Ok(exit(ok))
        }
    }
}
