use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use h2potential::config::{Overrides, RunConfig};
use h2potential::pipeline::{write_fixture, Pipeline, Stage};
use h2potential::water::{Climate, ScenarioName};
use h2potential::Error;

#[derive(Parser)]
#[command(name = "h2potential", version, about = "Regional green-hydrogen cost-potential analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Run configuration (TOML)
    #[arg(long, short)]
    config: PathBuf,
    /// Output directory, overrides output_dir
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run year (2030 or 2050)
    #[arg(long)]
    year: Option<u32>,
    /// Groundwater scenario: conservative, medium or extreme
    #[arg(long)]
    water_scenario: Option<ScenarioName>,
    /// Climate pathway: rcp26 or rcp85
    #[arg(long)]
    climate: Option<Climate>,
    /// Worker threads, 0 for all cores
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the configuration and inputs without running anything
    Validate(RunArgs),
    /// Land eligibility and capacity placement
    Eligibility(RunArgs),
    /// Hourly generation profiles
    Simulate(RunArgs),
    /// Groundwater budgets and desalination costs
    Water(RunArgs),
    /// Least-cost systems and regional cost-potential curves
    Optimize(RunArgs),
    /// National curves and domestic demand set-aside
    Curves(RunArgs),
    /// Socio-economic indicators
    Socio(RunArgs),
    /// Summary of a finished run
    Report(RunArgs),
    /// Every stage, then the manifest and report
    Run(RunArgs),
    /// Write a synthetic study area with a ready config.toml
    Fixture {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

fn overrides(a: &RunArgs) -> Overrides {
    Overrides {
        output_dir: a.out.clone(),
        year: a.year,
        scenario: a.water_scenario,
        climate: a.climate,
        threads: a.threads,
    }
}

fn exit_for(e: &Error) -> u8 {
    match e {
        Error::Config(_) => 2,
        Error::Stage { .. } => 3,
        _ => 1,
    }
}

fn open(a: &RunArgs) -> Result<Pipeline, Error> {
    let p = Pipeline::new(&a.config, &overrides(a))?;
    let threads = p.config.threads;
    // fails only if a pool already exists
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(p)
}

fn stage_cmd(a: &RunArgs, stages: &[Stage]) -> Result<(), Error> {
    let mut p = open(a)?;
    for &s in stages {
        p.run_through(s)?;
    }
    for l in &p.log {
        println!("{l}");
    }
    p.write_manifest()?;
    Ok(())
}

fn run(cmd: Command) -> Result<(), Error> {
    match cmd {
        Command::Validate(a) => {
            let cfg = RunConfig::load(&a.config)?.map_err(Error::Config)?;
            let mut cfg = cfg;
            cfg.apply(&overrides(&a));
            let f = cfg.validate();
            if !f.is_empty() {
                return Err(Error::Config(f));
            }
            println!("configuration ok");
            Ok(())
        }
        Command::Eligibility(a) => stage_cmd(&a, &[Stage::Placement]),
        Command::Simulate(a) => stage_cmd(&a, &[Stage::Simulation]),
        Command::Water(a) => stage_cmd(&a, &[Stage::Water]),
        Command::Optimize(a) => stage_cmd(&a, &[Stage::Optimization]),
        Command::Curves(a) => stage_cmd(&a, &[Stage::SetAside]),
        Command::Socio(a) => stage_cmd(&a, &[Stage::Socio]),
        Command::Report(a) => {
            let p = open(&a)?;
            let path = p.write_report()?;
            print!("{}", std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?);
            Ok(())
        }
        Command::Run(a) => {
            let mut p = open(&a)?;
            p.run_all()?;
            for l in &p.log {
                println!("{l}");
            }
            let path = p.write_report()?;
            println!("report: {}", path.display());
            Ok(())
        }
        Command::Fixture { out, seed } => {
            let s = write_fixture(seed, &out)?;
            println!("{} regions in {} countries; config at {}", s.regions.len(), s.countries.len(), s.config_path.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                Error::Config(f) => {
                    eprintln!("configuration invalid:");
                    for m in f {
                        eprintln!("  {m}");
                    }
                }
                other => eprintln!("error: {other}"),
            }
            ExitCode::from(exit_for(&e))
        }
    }
}
