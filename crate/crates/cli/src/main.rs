use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use swapsim::bsm::BsmPolicy;
use swapsim::config::{parse_config, Config};
use swapsim::field::SqueezeParams;
use swapsim::harness::{run_point, run_sweep, Executor, RowStatus, SweepGrid, SweepResult};
use swapsim::oracle;
use swapsim::output::write_results;
use swapsim::tomography::Projection;

/// Entanglement swapping with random Jones vectors and threshold detectors.
#[derive(Parser)]
#[command(name = "swapsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the configured point and print its statistics.
    Run(RunArgs),
    /// Simulate every grid point and write results.csv plus state documents.
    Sweep(RunArgs),
    /// Run the covariance and tomography oracles.
    Validate {
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides master_seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides out_dir. `run` writes files only when this is given.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Overrides bsm_policy.
    #[arg(long)]
    policy: Option<BsmPolicy>,
}

const EXIT_INVALID: u8 = 1;
const EXIT_INSUFFICIENT: u8 = 2;
const EXIT_IO: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => load(&args).map_or_else(ExitCode::from, |cfg| run(&args, cfg)),
        Command::Sweep(args) => load(&args).map_or_else(ExitCode::from, |cfg| sweep(&args, cfg)),
        Command::Validate { seed } => validate(seed.unwrap_or(1)),
    }
}

fn load(args: &RunArgs) -> Result<Config, u8> {
    let text = fs::read_to_string(&args.config).map_err(|e| {
        eprintln!("error: {}: {e}", args.config.display());
        EXIT_IO
    })?;
    let mut cfg = parse_config(&text).map_err(|e| {
        eprintln!("error: {}: {e}", args.config.display());
        EXIT_INVALID
    })?;
    if let Some(seed) = args.seed {
        cfg.run.master_seed = seed;
    }
    if let Some(policy) = args.policy {
        cfg.run.bsm_policy = policy;
    }
    if let Some(out) = &args.out {
        cfg.out_dir = out.clone();
    }
    Ok(cfg)
}

fn finish(sweep: &SweepResult, out: Option<&PathBuf>) -> ExitCode {
    if let Some(dir) = out {
        if let Err(e) = write_results(sweep, dir) {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_IO);
        }
    }
    if sweep.all_insufficient() {
        eprintln!("error: no point completed all of its trials (event cap reached or a setting without valid coincidences)");
        return ExitCode::from(EXIT_INSUFFICIENT);
    }
    ExitCode::SUCCESS
}

fn fmt_stat(s: Option<swapsim::harness::Stat>) -> String {
    s.map_or_else(|| "-".into(), |s| format!("{:.4} ± {:.4}", s.mean, s.std))
}

fn run(args: &RunArgs, cfg: Config) -> ExitCode {
    let exec = Executor::new(args.workers);
    let row = run_point(&cfg.run, 0, &exec);
    let c = &row.config;
    println!(
        "r={} gamma_bsm={} gamma_qst={} policy={} units={} trials={} target={}",
        c.r, c.gamma_bsm, c.gamma_qst, c.bsm_policy, c.threshold_units, c.trials, c.target_bsm_events
    );
    println!("bsm efficiency  {}", fmt_stat(row.bsm_efficiency));
    println!("qst efficiency  {}", fmt_stat(row.qst_efficiency));
    println!("fidelity        {}", fmt_stat(row.fidelity));
    println!("chsh ({})  {}", c.chsh_estimator, fmt_stat(row.chsh));
    if row.status == RowStatus::InsufficientEvents {
        for t in &row.trials {
            if let Err(e) = &t.result {
                println!("trial {}: {e}", t.trial);
            }
        }
    }
    let out = args.out.as_ref().map(|_| &cfg.out_dir);
    finish(&SweepResult { rows: vec![row] }, out)
}

fn sweep(args: &RunArgs, cfg: Config) -> ExitCode {
    let exec = Executor::new(args.workers);
    let grid: &SweepGrid = &cfg.grid;
    eprintln!("{} points × {} trials", grid.len(), cfg.run.trials);
    let result = run_sweep(grid, &cfg.run, &exec);
    for row in &result.rows {
        let c = &row.config;
        eprintln!(
            "r={} gamma_bsm={} gamma_qst={} F={} S={} {}",
            c.r,
            c.gamma_bsm,
            c.gamma_qst,
            fmt_stat(row.fidelity),
            fmt_stat(row.chsh),
            row.status.name()
        );
    }
    finish(&result, Some(&cfg.out_dir))
}

fn validate(seed: u64) -> ExitCode {
    let mut ok = true;
    let p = SqueezeParams::new(0.9, 1.0).expect("valid parameters");
    let checks = oracle::covariance_checks(&p, 1_000_000, seed);
    let worst = checks.iter().max_by(|a, b| a.z_score().total_cmp(&b.z_score())).expect("non-empty");
    let pass = worst.z_score() < 5.0;
    ok &= pass;
    println!(
        "{} covariance: {} moments at r=0.9, worst {} at {:.2} SE",
        verdict(pass),
        checks.len(),
        worst.name,
        worst.z_score()
    );

    let rho = oracle::werner(0.9);
    for method in Projection::ALL {
        let rt = oracle::tomography_round_trip(&rho, &oracle::exact_counts(&rho, 1e8), method);
        let pass = rt.max_entry_error < 1e-4 && (rt.fidelity - 0.925).abs() < 1e-4;
        ok &= pass;
        println!(
            "{} tomography round trip ({method}): max entry error {:.2e}, F = {:.6}",
            verdict(pass),
            rt.max_entry_error,
            rt.fidelity
        );
    }
    let rt = oracle::tomography_round_trip(&rho, &oracle::sampled_counts(&rho, 100_000, seed), Projection::Euclidean);
    let pass = rt.max_entry_error < 0.01;
    ok &= pass;
    println!("{} sampled round trip: max entry error {:.2e}", verdict(pass), rt.max_entry_error);

    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_INVALID)
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}
