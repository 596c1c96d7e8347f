use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lcstar_verify::{
    check_instance, gen_instance, run_suite_with_workers, Error, Instance, InstanceSpec, Result,
    Suite, SuiteReport,
};

#[derive(Parser)]
#[command(
    name = "lcstar",
    version,
    about = "Randomized checks for finite C*-algebra systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a property suite over generated instances.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[command(flatten)]
        spec: SpecArgs,
        /// Write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Generate one instance and print it as JSON.
    Gen {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-run a suite on one instance, stored or regenerated from a seed.
    Check {
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

/// Instance flags; each overrides the `--spec` file, which overrides defaults.
#[derive(Args)]
struct SpecArgs {
    /// JSON file with any subset of the spec fields.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    blocks: Option<usize>,
    #[arg(long)]
    max_dim: Option<usize>,
    #[arg(long)]
    depth: Option<usize>,
}

impl SpecArgs {
    fn resolve(&self) -> Result<InstanceSpec> {
        let mut spec: InstanceSpec = match &self.spec {
            Some(path) => lcstar::json::from_json(&read(path)?)?,
            None => InstanceSpec::default(),
        };
        spec.seed = self.seed.unwrap_or(spec.seed);
        spec.trials = self.trials.unwrap_or(spec.trials);
        spec.tol = self.tol.unwrap_or(spec.tol);
        spec.block_count = self.blocks.unwrap_or(spec.block_count);
        spec.max_block_dim = self.max_dim.unwrap_or(spec.max_block_dim);
        spec.chain_depth = self.depth.unwrap_or(spec.chain_depth);
        spec.validate()?;
        Ok(spec)
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn summarize(report: &SuiteReport) {
    println!(
        "suite {} | rng {} | seed {} | trials {}",
        report.suite,
        report.rng,
        report.config.seed,
        report.instances.len()
    );
    for p in &report.properties {
        let status = if p.failed == 0 { "ok  " } else { "FAIL" };
        println!(
            "{status} {:<40} {:>7}/{:<7} worst {:.3e}",
            p.name, p.passed, p.checked, p.worst_residual
        );
    }
    for f in &report.failed_trials {
        println!(
            "failed {} on trial {} ({}): {}",
            f.property, f.trial, f.digest, f.detail
        );
        println!("  replay: {}", f.replay);
    }
    println!("{} checks, {} failures", report.checks, report.failures);
}

fn finish(report: &SuiteReport, json: Option<&Path>) -> Result<bool> {
    if let Some(path) = json {
        write(path, &report.to_json()?)?;
    }
    summarize(report);
    Ok(report.passed())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Verify {
            suite,
            spec,
            json,
            workers,
        } => {
            let report = run_suite_with_workers(suite, &spec.resolve()?, workers)?;
            finish(&report, json.as_deref())
        }
        Command::Gen { spec, out } => {
            let text = gen_instance(&spec.resolve()?)?.to_json()?;
            match out {
                Some(path) => write(&path, &text)?,
                None => println!("{text}"),
            }
            Ok(true)
        }
        Command::Check {
            instance,
            suite,
            spec,
            json,
        } => {
            let resolved = spec.resolve()?;
            let inst = match instance {
                Some(path) => Instance::from_json(&read(&path)?)?,
                None => gen_instance(&resolved)?,
            };
            finish(&check_instance(suite, &inst, resolved.tol), json.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
