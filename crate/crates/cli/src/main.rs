#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod plot;
mod report;
mod suites;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use rayon::prelude::*;

use config::{Config, DEFAULTS_HELP, SUITES};

#[derive(Parser)]
#[command(name = "lab", version, about = "Run the qlab experiment suites and write CSV reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one suite (or all) and write report.csv plus artifacts into the output directory.
    #[command(after_help = DEFAULTS_HELP)]
    Run {
        /// norms, ktau, cubes, kernels, blocks, fourier or all
        #[arg(long)]
        suite: String,
        /// TOML config; omitted keys take the defaults listed below
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the config seed
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads for running suites side by side (default: all cores)
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Print the available suite names.
    ListSuites,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ListSuites => {
            for s in SUITES {
                println!("{s}");
            }
            println!("all");
            ExitCode::SUCCESS
        }
        Command::Run { suite, config, out, seed, threads } => match run(&suite, config.as_deref(), &out, seed, threads) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(1),
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(2)
            }
        },
    }
}

fn run(suite: &str, config: Option<&Path>, out: &Path, seed: Option<u64>, threads: Option<usize>) -> anyhow::Result<bool> {
    let names: Vec<&str> = match suite {
        "all" => SUITES.to_vec(),
        s if SUITES.contains(&s) => vec![s],
        s => anyhow::bail!("unknown suite '{s}' (try `lab list-suites`)"),
    };
    let mut cfg = match config {
        Some(p) => {
            let src = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Config::parse(&src).map_err(|e| anyhow::anyhow!("{}: {e}", p.display()))?
        }
        None => Config::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    // dense kernels run single-threaded so results do not depend on the thread count
    faer::set_global_parallelism(faer::Par::Seq);
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        pool = pool.num_threads(t.max(1));
    }
    let pool = pool.build().context("building the worker pool")?;
    let outputs: Vec<_> = pool.install(|| names.par_iter().map(|s| suites::run_suite(s, &cfg)).collect());

    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut rows = Vec::new();
    for o in outputs {
        for (name, bytes) in &o.files {
            std::fs::write(out.join(name), bytes).with_context(|| format!("writing {name}"))?;
        }
        rows.extend(o.rows);
    }
    std::fs::write(out.join("report.csv"), report::write_csv(&rows)?).context("writing report.csv")?;
    let echo = format!("# suite = \"{suite}\"\n{}", toml::to_string(&cfg).context("serializing config")?);
    std::fs::write(out.join("config_echo.toml"), echo).context("writing config_echo.toml")?;

    let failed: Vec<_> = rows.iter().filter(|r| !r.pass).collect();
    for r in &failed {
        eprintln!("FAIL {}/{} [{}]: measured {} vs {}", r.suite, r.check, r.case, r.measured, r.bound);
    }
    println!("{} checks, {} failed; report in {}", rows.len(), failed.len(), out.join("report.csv").display());
    Ok(failed.is_empty())
}
