use clap::{Parser, Subcommand};
use rayon::prelude::*;
use std::path::PathBuf;
use std::process::ExitCode;
use tentlab::cli::{presets, run_and_write, ExperimentConfig};

#[derive(Parser)]
#[command(name = "lab", about = "Weighted Bergman and tent space experiments on a discretized disc")]
struct Args {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one or more experiment configs; several configs run in parallel.
    Run {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
        /// Output directory for the JSON report and CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the grid depth.
        #[arg(long)]
        depth: Option<u32>,
        /// Overrides the seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List weight, measure and experiment presets.
    Presets,
}

/// 0 on success, 1 when a run raised invariant flags, 2 on config or run errors.
fn run_one(path: &PathBuf, out: Option<&PathBuf>, depth: Option<u32>, seed: Option<u64>) -> u8 {
    let mut cfg = match ExperimentConfig::load(path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return 2;
        }
    };
    if let Some(d) = depth {
        cfg.grid.depth = d;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    match run_and_write(&cfg, out.map(|p| p.as_path())) {
        Ok((outcome, json, csv)) => {
            println!("{}: wrote {} and {}", path.display(), json.display(), csv.display());
            for f in &outcome.flags {
                eprintln!("{}: flag: {f}", path.display());
            }
            u8::from(!outcome.flags.is_empty())
        }
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            2
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Some(n) = std::env::var("LAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("LAB_THREADS ignored: {e}");
        }
    }
    match args.cmd {
        Cmd::Presets => {
            print!("{}", presets());
            ExitCode::SUCCESS
        }
        Cmd::Run { configs, out, depth, seed } => {
            let codes: Vec<u8> = configs.par_iter().map(|c| run_one(c, out.as_ref(), depth, seed)).collect();
            ExitCode::from(codes.into_iter().max().unwrap_or(0))
        }
    }
}
