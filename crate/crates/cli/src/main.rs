//! Experiment runner CLI.
//!
//! Subcommands:
//!   run <config>                          one run, CSV to the config's output path
//!   sweep <config> --seeds A..B [--parallel N]
//!                                         seed sweep with mean / mean+std CSV
//!   validate <config>                     parse + validate, no execution
//!   oracle <config>                       brute-force DP cross-checks (small K)
//!
//! Exit codes: 0 success, 1 config error, 2 invariant violation, 3 I/O error.
//! Set AOEECC_LOG=1|2 for diagnostics on stderr.

use std::path::Path;
use std::process::ExitCode;

use aoeecc::harness::{self, config, oracle, RunConfig};
use aoeecc::Error;

const USAGE: &str = "\
usage: aoeecc <command> [args]

commands:
  run <config>                         execute one experiment run
  sweep <config> --seeds A..B [--parallel N]
                                       run a seed range, aggregate mean/std
  validate <config>                    check a config file and exit
  oracle <config>                      brute-force sampler checks (small K)
";

fn load_config(path: &str) -> Result<RunConfig, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
    config::parse_config(&text)
}

fn parse_seed_range(spec: &str) -> Result<Vec<u64>, Error> {
    let err = || {
        Error::Config(format!(
            "--seeds: expected A..B or a single seed, got '{spec}'"
        ))
    };
    if let Some((a, b)) = spec.split_once("..") {
        let lo: u64 = a.trim().parse().map_err(|_| err())?;
        let hi: u64 = b.trim().parse().map_err(|_| err())?;
        if hi < lo {
            return Err(err());
        }
        Ok((lo..=hi).collect())
    } else {
        let s: u64 = spec.trim().parse().map_err(|_| err())?;
        Ok(vec![s])
    }
}

fn cmd_run(path: &str) -> Result<(), Error> {
    let cfg = load_config(path)?;
    let result = harness::run_experiment(&cfg)?;
    match &cfg.output {
        Some(out) => {
            harness::write_records_csv(&result, Path::new(out))?;
            println!(
                "run complete: policy={} regime={} seed={} rounds={} regret={:.4} violation={:.4} -> {out}",
                result.policy.as_str(),
                result.regime.as_str(),
                result.seed,
                cfg.n_rounds,
                result.records.last().map(|r| r.regret).unwrap_or(0.0),
                result.violation,
            );
        }
        None => {
            // No output path: print the CSV body itself.
            print!("{}", harness::csv::records_to_csv(&result));
        }
    }
    Ok(())
}

fn cmd_sweep(path: &str, seeds: &[u64], parallelism: usize) -> Result<(), Error> {
    let cfg = load_config(path)?;
    let result = harness::sweep(&cfg, seeds, parallelism)?;
    for (seed, msg) in &result.failures {
        eprintln!("seed {seed} failed: {msg}");
    }
    match &cfg.output {
        Some(out) => {
            harness::write_sweep_csv(&result, Path::new(out))?;
            println!(
                "sweep complete: {} seeds ({} failed), final mean regret {:.4} -> {out}",
                seeds.len(),
                result.failures.len(),
                result.final_regret_mean(),
            );
        }
        None => print!("{}", harness::csv::sweep_to_csv(&result)),
    }
    if !result.failures.is_empty() {
        return Err(Error::Invariant(format!(
            "{} of {} seeds failed",
            result.failures.len(),
            seeds.len()
        )));
    }
    Ok(())
}

fn cmd_validate(path: &str) -> Result<(), Error> {
    let cfg = load_config(path)?;
    println!(
        "ok: K={} k={} policy={} regime={} rounds={}",
        cfg.num_channels,
        cfg.k,
        cfg.policy.as_str(),
        cfg.regime.as_str(),
        cfg.n_rounds
    );
    Ok(())
}

fn cmd_oracle(path: &str) -> Result<(), Error> {
    let cfg = load_config(path)?;
    let report = oracle::check(cfg.num_channels, cfg.k, 25, cfg.seed)?;
    println!(
        "oracle: K={} k={} draws={} prob_err={:.3e} marginal_err={:.3e} norm_err={:.3e} hindsight_err={:.3e}",
        report.num_channels,
        report.k,
        report.weight_draws,
        report.max_prob_err,
        report.max_marginal_err,
        report.max_norm_err,
        report.max_hindsight_err,
    );
    if report.worst() > 1e-10 {
        return Err(Error::Invariant(format!(
            "oracle deviation {} exceeds 1e-10",
            report.worst()
        )));
    }
    println!("oracle: all checks within 1e-10");
    Ok(())
}

fn dispatch(args: &[String]) -> Result<(), Error> {
    match args {
        [cmd, path] if cmd == "run" => cmd_run(path),
        [cmd, path] if cmd == "validate" => cmd_validate(path),
        [cmd, path] if cmd == "oracle" => cmd_oracle(path),
        [cmd, rest @ ..] if cmd == "sweep" => {
            let mut path: Option<&str> = None;
            let mut seeds: Vec<u64> = vec![1];
            let mut parallelism = 1usize;
            let mut it = rest.iter();
            while let Some(arg) = it.next() {
                match arg.as_str() {
                    "--seeds" => {
                        let v = it
                            .next()
                            .ok_or_else(|| Error::Config("--seeds: missing value".into()))?;
                        seeds = parse_seed_range(v)?;
                    }
                    "--parallel" => {
                        let v = it
                            .next()
                            .ok_or_else(|| Error::Config("--parallel: missing value".into()))?;
                        parallelism = v
                            .parse()
                            .map_err(|_| Error::Config(format!("--parallel: bad value '{v}'")))?;
                    }
                    other if path.is_none() => path = Some(other),
                    other => return Err(Error::Config(format!("unexpected argument '{other}'"))),
                }
            }
            let path = path.ok_or_else(|| Error::Config("sweep: missing config path".into()))?;
            cmd_sweep(path, &seeds, parallelism)
        }
        _ => {
            eprint!("{USAGE}");
            Err(Error::Config("unknown or incomplete command".into()))
        }
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match dispatch(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
