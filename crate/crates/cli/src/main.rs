//! `moga-vrptw`: solve VRPTW instances from the command line.

mod table;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::AtomicBool;
use std::sync::Arc;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use moga_vrptw::ga::run;
use moga_vrptw::io::{
    emit_solomon, generate_random_instance, parse_solomon_bytes, read_front, write_front, FrontDocument,
    GeneratorParams,
};
use moga_vrptw::{FitnessParams, GaConfig, Objective, TimingPolicy};

#[derive(Parser)]
#[command(name = "moga-vrptw", version, about = "Multi-objective GA for vehicle routing with time windows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the optimizer on a Solomon-format instance and write the front.
    Solve(SolveArgs),
    /// Write a random Solomon-format instance.
    GenInstance(GenArgs),
    /// Inspect a front document.
    Front {
        #[command(subcommand)]
        command: FrontCommand,
    },
}

#[derive(Subcommand)]
enum FrontCommand {
    /// Print one row per alternative.
    Summary { path: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Wait,
    Nowait,
}

impl From<Policy> for TimingPolicy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Wait => TimingPolicy::WaitAllowed,
            Policy::Nowait => TimingPolicy::NoWait,
        }
    }
}

#[derive(clap::Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, default_value_t = 100)]
    pop: usize,
    #[arg(long, default_value_t = 500)]
    generations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Policy::Wait)]
    policy: Policy,
    #[arg(long, default_value_t = 100.0)]
    fmax: f64,
    #[arg(long, default_value_t = 1.0)]
    fmin: f64,
    #[arg(long, default_value_t = 0.9)]
    crossover_rate: f64,
    #[arg(long, default_value_t = 0.2)]
    mutation_rate: f64,
    #[arg(long, default_value = "front.json")]
    out: PathBuf,
    /// Print only the path of the written front.
    #[arg(long)]
    quiet: bool,
}

#[derive(clap::Args)]
struct GenArgs {
    #[arg(long, default_value_t = 25)]
    customers: u32,
    #[arg(long, default_value_t = 100.0)]
    extent: f64,
    /// 0 gives the whole horizon, 1 gives windows as narrow as the service time.
    #[arg(long, default_value_t = 0.5)]
    tightness: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200.0)]
    capacity: f64,
    /// Defaults to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Parse(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Parse(_) => 3,
            Failure::Io(_) => 4,
        }
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Parse(format!("cannot read {}: {e}", path.display())))
}

fn write_output(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
}

fn usage_error(message: String) -> ! {
    Cli::command().error(ErrorKind::ValueValidation, message).exit()
}

fn source_date_epoch() -> Option<u64> {
    std::env::var("SOURCE_DATE_EPOCH").ok()?.trim().parse().ok()
}

fn solve(args: SolveArgs) -> Result<(), Failure> {
    let fitness_params = FitnessParams::new(args.fmax, args.fmin).unwrap_or_else(|e| usage_error(e.to_string()));
    let config = GaConfig {
        population_size: args.pop,
        generations: args.generations,
        rng_seed: args.seed,
        timing_policy: args.policy.into(),
        fitness_params,
        crossover_rate: args.crossover_rate,
        mutation_rate: args.mutation_rate,
        ..GaConfig::default()
    };
    if let Err(e) = config.validate() {
        usage_error(e.to_string());
    }

    let bytes = read_input(&args.instance)?;
    let instance =
        parse_solomon_bytes(&bytes).map_err(|e| Failure::Parse(format!("{}: {e}", args.instance.display())))?;
    let instance = Arc::new(instance);

    let quiet = args.quiet;
    let progress = |s: &moga_vrptw::GenerationSnapshot| {
        if quiet || !s.generation_index.is_multiple_of(10) {
            return;
        }
        let best = |o: Objective| s.archive_objectives.iter().map(|v| v.get(o)).fold(f64::INFINITY, f64::min);
        println!(
            "gen {:>6}  archive {:>4}  distance {:>10.3}  vehicles {:>3}  tw_violation {:>10.3}  violated {:>3}",
            s.generation_index,
            s.archive_objectives.len(),
            best(Objective::TotalDistance),
            best(Objective::VehicleCount),
            best(Objective::TotalTwViolation),
            best(Objective::ViolatedTwCount),
        );
    };
    let outcome = run(instance.clone(), config.clone(), progress, &AtomicBool::new(false))
        .unwrap_or_else(|e| usage_error(e.to_string()));

    let doc =
        FrontDocument::from_archive(&instance, &config, &outcome.archive, config.generations, source_date_epoch())
            .map_err(|e| Failure::Parse(e.to_string()))?;
    let text = write_front(&doc).map_err(|e| Failure::Parse(e.to_string()))?;
    write_output(&args.out, &text)?;

    if !quiet {
        print!("{}", table::render(&doc.entries));
    }
    println!("{}", args.out.display());
    Ok(())
}

fn gen_instance(args: GenArgs) -> Result<(), Failure> {
    let params = GeneratorParams {
        customers: args.customers,
        extent: args.extent,
        tightness: args.tightness,
        seed: args.seed,
        vehicle_capacity: args.capacity,
        ..GeneratorParams::default()
    };
    let instance = generate_random_instance(&params).unwrap_or_else(|e| usage_error(e.to_string()));
    let text = emit_solomon(&instance);
    match args.out {
        Some(path) => write_output(&path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn front_summary(path: &Path) -> Result<(), Failure> {
    let bytes = read_input(path)?;
    let text = String::from_utf8(bytes).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    let read = read_front(&text).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    for w in &read.warnings {
        eprintln!("warning: {w}");
    }
    print!("{}", table::render(&read.document.entries));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => solve(args),
        Command::GenInstance(args) => gen_instance(args),
        Command::Front { command: FrontCommand::Summary { path } } => front_summary(&path),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Parse(m) | Failure::Io(m)) = &f;
            eprintln!("error: {m}");
            ExitCode::from(f.code())
        }
    }
}
