//! `llt-lab`: deterministic experiment runner for the local-limit
//! laboratory. Parses a TOML config, dispatches the enabled check
//! groups, and writes CSV/JSON reports plus plot-ready data series.

mod config;
mod output;
mod runner;

use anyhow::Context;
use clap::{Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "llt-lab",
    about = "Density laboratory for normalized sums: grids, CF analytics, and bound checks",
    long_about = "Computes densities of normalized sums of independent random vectors via \
                  characteristic-function products and Fourier inversion, and verifies the \
                  quantitative inequalities relating sup|p_n - phi| to the moment functionals. \
                  Grid memory can be capped with the LLT_LAB_MAX_GRID_BYTES environment variable."
)]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

#[derive(Subcommand)]
enum Commands {
    /// Run the experiments described by a TOML config.
    Run {
        /// Path to the configuration file.
        config: PathBuf,
        /// Output directory (overrides the config's output_dir).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated check groups to run (overrides the config).
        #[arg(long)]
        checks: Option<String>,
        /// Worker thread cap for per-experiment parallelism.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// List the distribution catalog.
    Families,
    /// Regenerate every frozen fixture with its independent oracle and
    /// compare.
    VerifyFixtures,
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Commands::Run {
            config,
            out,
            checks,
            jobs,
        } => run_command(&config, out, checks, jobs),
        Commands::Families => families_command(),
        Commands::VerifyFixtures => verify_fixtures_command(),
    };
    match code {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(2);
        }
    }
}

fn run_command(
    config_path: &PathBuf,
    out: Option<PathBuf>,
    checks: Option<String>,
    jobs: Option<usize>,
) -> anyhow::Result<i32> {
    let text = std::fs::read_to_string(config_path)
        .with_context(|| format!("reading {}", config_path.display()))?;
    let mut cfg = config::parse_config(&text)?;
    if let Some(list) = checks {
        cfg.checks = list
            .split(',')
            .map(|s| config::CheckGroup::parse(s.trim()))
            .collect::<anyhow::Result<_>>()?;
    }
    if let Some(j) = jobs {
        cfg.jobs = Some(j);
    }
    let out_dir = out.unwrap_or_else(|| cfg.output_dir.clone());

    let summary = match cfg.jobs {
        Some(j) if j > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .context("building worker pool")?
            .install(|| runner::run(&cfg, &out_dir))?,
        _ => runner::run(&cfg, &out_dir)?,
    };

    println!(
        "checks: {} passed, {} failed ({} total)",
        summary.passed, summary.failed, summary.total
    );
    if let Some(c) = summary.c_min_global {
        println!("C_min over the suite: {c:.6}");
    }
    if let Some(c) = summary.c_feasible {
        println!("c_feasible over the suite: {c:.6}");
    }
    for (label, rate) in &summary.rates {
        println!(
            "rate {label}: slope {:.4} +- {:.4}{}",
            rate.slope,
            rate.stderr,
            if rate.dropped_smallest {
                " (smallest n dropped)"
            } else {
                ""
            }
        );
    }
    for f in &summary.failures {
        println!(
            "FAIL {} {} {}: observed {:.6e}, required {:.6e}",
            f.family,
            f.n.map(|n| format!("n={n}")).unwrap_or_default(),
            f.check,
            f.observed,
            f.required
        );
    }
    println!("reports written to {}", out_dir.display());
    Ok(summary.exit_code())
}

fn families_command() -> anyhow::Result<i32> {
    use llt_core::distributions::FamilyCatalog;
    for id in FamilyCatalog::ids() {
        println!("{id:<22} {}", FamilyCatalog::describe(id).unwrap_or(""));
    }
    Ok(0)
}

fn verify_fixtures_command() -> anyhow::Result<i32> {
    let checks = llt_core::oracle::regenerate_all();
    let mut failed = 0;
    for c in &checks {
        let status = if c.ok { "ok " } else { "FAIL" };
        println!(
            "{status} {:<28} frozen {:>20.15e}  regenerated {:>20.15e}  (tol {:.1e})",
            c.name, c.frozen, c.regenerated, c.tol
        );
        if !c.ok {
            failed += 1;
        }
    }
    println!(
        "{} fixtures checked, {} failed",
        checks.len(),
        failed
    );
    Ok(if failed == 0 { 0 } else { 1 })
}
