//! Command-line front end: validate, solve, oracle, sweep, generate,
//! convert.
//!
//! Data artifacts go to files or stdout; progress and diagnostics go to
//! stderr. Exit codes: 0 success, 1 I/O, 2 validation, 3 configuration,
//! 4 oracle size cap.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use rcpsp_ga::experiment::{
    best_settings, generate_instance, run_sweep, sweep_csv, ConvergenceSink, GeneratorSpec,
    SweepSpec,
};
use rcpsp_ga::ga::{evolve, CrossoverKind, GaConfig, MutationKind};
use rcpsp_ga::io::{parse_native, parse_psplib, serialize_native, write_convergence, write_schedule};
use rcpsp_ga::model::{validate_instance, Instance};
use rcpsp_ga::oracle::{brute_force_optimum, DEFAULT_VISIT_CAP};
use rcpsp_ga::sgs::Policy;

#[derive(Debug, Parser)]
#[command(
    name = "rcpsp-ga",
    about = "Genetic-algorithm solver for resource-constrained project scheduling",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check an instance file and report every violation.
    Validate(InputArgs),
    /// Run the genetic algorithm and write schedule, convergence and
    /// summary artifacts.
    Solve(SolveArgs),
    /// Exhaustively enumerate feasible activity lists (small instances).
    Oracle(OracleArgs),
    /// Run a full-factorial parameter sweep.
    Sweep(SweepArgs),
    /// Generate a synthetic instance from a generator spec.
    Generate(GenerateArgs),
    /// Convert an instance (e.g. PSPLIB .sm) to the native JSON format.
    Convert(ConvertArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum FormatArg {
    Native,
    Psplib,
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Instance file to read.
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// Instance format; default is guessed from the extension (.sm means
    /// psplib, anything else native).
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Directory for schedule.csv, convergence.csv and summary.json.
    #[arg(long, value_name = "DIR")]
    out_dir: PathBuf,
    /// Unit-allocation policy.
    #[arg(long, default_value = "est")]
    policy: Policy,
    /// Population size.
    #[arg(long, default_value_t = 10)]
    pop: usize,
    /// Crossover probability.
    #[arg(long, default_value_t = 0.7)]
    pc: f64,
    /// Mutation probability.
    #[arg(long, default_value_t = 0.1)]
    pm: f64,
    /// Crossover operator.
    #[arg(long, default_value = "pmx")]
    crossover: CrossoverKind,
    /// Mutation operator.
    #[arg(long, default_value = "swap")]
    mutation: MutationKind,
    /// Members copied unchanged into each generation.
    #[arg(long, default_value_t = 1)]
    elite: usize,
    /// Random seed; identical seeds give byte-identical artifacts under
    /// generation-based stopping.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Wall-clock limit per run, in milliseconds.
    #[arg(long, value_name = "MS")]
    time_limit_ms: Option<u64>,
    /// Generation cap (default 200 when no time limit is given).
    #[arg(long)]
    max_generations: Option<u64>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Unit-allocation policy for the reported optimal schedule.
    #[arg(long, default_value = "est")]
    policy: Policy,
    /// Abort after enumerating this many feasible lists.
    #[arg(long, default_value_t = DEFAULT_VISIT_CAP)]
    visit_cap: u64,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Directory for sweep_results.csv, best_settings.csv and per-run
    /// convergence CSVs.
    #[arg(long, value_name = "DIR")]
    out_dir: PathBuf,
    /// Sweep spec as JSON; omitted fields take the default factorial
    /// design (360 runs at a 2 s budget).
    #[arg(long, value_name = "FILE")]
    sweep_spec: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// Generator spec as JSON; omitted fields take the default synthetic
    /// shape (317 activities, 5 workgroups, 12 resource groups).
    #[arg(long, value_name = "FILE")]
    gen_spec: Option<PathBuf>,
    /// Directory for instance.json.
    #[arg(long, value_name = "DIR")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct ConvertArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Directory for instance.json.
    #[arg(long, value_name = "DIR")]
    out_dir: PathBuf,
}

/// An error carrying the process exit code.
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn io(message: impl Into<String>) -> Self {
        CliError { code: 1, message: message.into() }
    }

    fn validation(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }

    fn config(message: impl Into<String>) -> Self {
        CliError { code: 3, message: message.into() }
    }

    fn size_cap(message: impl Into<String>) -> Self {
        CliError { code: 4, message: message.into() }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{err}");
                return ExitCode::SUCCESS;
            }
            eprint!("{err}");
            return ExitCode::from(3);
        }
    };

    if let Ok(threads) = std::env::var("RCPSP_GA_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("warning: ignoring invalid RCPSP_GA_THREADS={threads}"),
        }
    }

    let outcome = match cli.command {
        Command::Validate(args) => cmd_validate(&args),
        Command::Solve(args) => cmd_solve(&args),
        Command::Oracle(args) => cmd_oracle(&args),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Generate(args) => cmd_generate(&args),
        Command::Convert(args) => cmd_convert(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}

fn read_instance(args: &InputArgs) -> Result<Instance, CliError> {
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", args.input.display())))?;
    let format = args.format.unwrap_or_else(|| {
        match args.input.extension().and_then(|e| e.to_str()) {
            Some("sm") => FormatArg::Psplib,
            _ => FormatArg::Native,
        }
    });
    let parsed = match format {
        FormatArg::Native => parse_native(&text),
        FormatArg::Psplib => parse_psplib(&text),
    };
    parsed.map_err(|e| CliError::validation(format!("{}: {e}", args.input.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}

fn ensure_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", path.display())))
}

fn cmd_validate(args: &InputArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", args.input.display())))?;
    let format = args.format.unwrap_or_else(|| {
        match args.input.extension().and_then(|e| e.to_str()) {
            Some("sm") => FormatArg::Psplib,
            _ => FormatArg::Native,
        }
    });
    let parsed = match format {
        FormatArg::Native => parse_native(&text),
        FormatArg::Psplib => parse_psplib(&text),
    };
    match parsed {
        Ok(instance) => {
            // Parsing already validates; report the clean bill explicitly.
            let report = validate_instance(&instance);
            println!("{report}");
            Ok(())
        }
        Err(err) => {
            println!("{err}");
            Err(CliError::validation(format!("{} is not a valid instance", args.input.display())))
        }
    }
}

#[derive(Serialize)]
struct SolveSummary<'a> {
    instance: &'a str,
    seed: u64,
    config: &'a GaConfig,
    best_makespan_ticks: u64,
    best_makespan_days: f64,
    initial_best_ticks: u64,
    generations: u64,
    evaluations: u64,
    best_list: &'a [u32],
}

fn cmd_solve(args: &SolveArgs) -> Result<(), CliError> {
    let instance = read_instance(&args.input)?;
    let config = GaConfig {
        population_size: args.pop,
        crossover: args.crossover,
        crossover_prob: args.pc,
        mutation: args.mutation,
        mutation_prob: args.pm,
        policy: args.policy,
        elite_count: args.elite,
        max_generations: match (args.max_generations, args.time_limit_ms) {
            (Some(g), _) => Some(g),
            (None, Some(_)) => None,
            (None, None) => Some(200),
        },
        time_limit_ms: args.time_limit_ms,
        seed: args.seed,
    };
    config.validate().map_err(|e| CliError::config(e.to_string()))?;
    ensure_dir(&args.out_dir)?;

    eprintln!(
        "solving {} ({} activities) with {} policy, Ps={}, seed={}",
        instance.name,
        instance.activities.len(),
        config.policy,
        config.population_size,
        config.seed
    );
    let result = evolve(&instance, &config).map_err(|e| CliError::config(e.to_string()))?;
    eprintln!(
        "best makespan {} ticks ({} days) after {} generations, {:.2?}",
        result.best_makespan, result.best_makespan_days, result.generations, result.wall_time
    );

    write_file(&args.out_dir.join("schedule.csv"), &write_schedule(&result.best_schedule))?;
    write_file(
        &args.out_dir.join("convergence.csv"),
        &write_convergence(&result.log, instance.ticks_per_day),
    )?;
    let summary = SolveSummary {
        instance: &instance.name,
        seed: config.seed,
        config: &config,
        best_makespan_ticks: result.best_makespan,
        best_makespan_days: result.best_makespan_days,
        initial_best_ticks: result.initial_best,
        generations: result.generations,
        evaluations: result.evaluations,
        best_list: result.best.genes(),
    };
    let mut json = serde_json::to_string_pretty(&summary).expect("summary always serialises");
    json.push('\n');
    write_file(&args.out_dir.join("summary.json"), &json)?;
    Ok(())
}

fn cmd_oracle(args: &OracleArgs) -> Result<(), CliError> {
    let instance = read_instance(&args.input)?;
    let result = brute_force_optimum(&instance, args.policy, args.visit_cap).map_err(|e| {
        match e {
            rcpsp_ga::oracle::OracleError::VisitCapExceeded { .. } => CliError::size_cap(e.to_string()),
            other => CliError::validation(other.to_string()),
        }
    })?;
    println!(
        "optimum {} ticks, {} feasible lists",
        result.optimal_makespan, result.feasible_lists
    );
    println!("optimum days: {}", instance.days(result.optimal_makespan));
    let genes: Vec<String> = result.optimal_list.genes().iter().map(|g| g.to_string()).collect();
    println!("optimal list: {}", genes.join(" "));
    eprintln!("enumerated in {:.2?}", result.elapsed);
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let instance = read_instance(&args.input)?;
    let spec: SweepSpec = match &args.sweep_spec {
        None => SweepSpec::default(),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?
        }
    };
    spec.validate().map_err(|e| CliError::config(e.to_string()))?;

    ensure_dir(&args.out_dir)?;
    let convergence_dir = args.out_dir.join("convergence");
    ensure_dir(&convergence_dir)?;

    eprintln!(
        "sweeping {} rows over {} ({} activities)",
        spec.row_count(),
        instance.name,
        instance.activities.len()
    );
    let result = run_sweep(&instance, &spec, ConvergenceSink::Directory(&convergence_dir))
        .map_err(|e| CliError::config(e.to_string()))?;
    write_file(&args.out_dir.join("sweep_results.csv"), &sweep_csv(&result))?;
    write_file(&args.out_dir.join("best_settings.csv"), &sweep_csv(&best_settings(&result)))?;
    eprintln!("wrote {} rows to {}", result.rows.len(), args.out_dir.display());
    Ok(())
}

fn cmd_generate(args: &GenerateArgs) -> Result<(), CliError> {
    let spec: GeneratorSpec = match &args.gen_spec {
        None => GeneratorSpec::default(),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?
        }
    };
    let instance = generate_instance(&spec).map_err(|e| CliError::config(e.to_string()))?;
    ensure_dir(&args.out_dir)?;
    let path = args.out_dir.join("instance.json");
    write_file(&path, &serialize_native(&instance))?;
    eprintln!(
        "generated {} ({} activities, {} groups) at {}",
        instance.name,
        instance.activities.len(),
        instance.groups.len(),
        path.display()
    );
    Ok(())
}

fn cmd_convert(args: &ConvertArgs) -> Result<(), CliError> {
    let instance = read_instance(&args.input)?;
    ensure_dir(&args.out_dir)?;
    let path = args.out_dir.join("instance.json");
    write_file(&path, &serialize_native(&instance))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}
