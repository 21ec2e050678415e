use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use getf_core::analysis::separation_report;
use getf_core::generate::{Family, SelfComm, WeightMode};
use getf_core::scheduler::verify_schedule;
use getf_core::{generate_instance, GeneratorSpec, GroupAssignment, Instance, PipelineConfig, Schedule, TieBreakRule};
use getf_cli::{
    bounds_are_binding, compare_batch, load_instance, parse_list, parse_range, read_file, run_algorithm, write_file,
    Algorithm, CompareOptions, Failure, RunOptions, EXIT_OK, EXIT_USAGE,
};
use serde::de::DeserializeOwned;

#[derive(Parser)]
#[command(name = "getf", version, about = "Schedule task DAGs on related machines with communication delays")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random instance as JSON.
    Generate(GenerateArgs),
    /// Schedule an instance and check the bound reports.
    Solve(SolveArgs),
    /// Check a schedule against an instance.
    Verify {
        instance: PathBuf,
        schedule: PathBuf,
        /// Group assignment that restricts machines per task.
        #[arg(long)]
        groups: Option<PathBuf>,
    },
    /// Run several algorithms over a directory of instances and print CSV.
    Compare {
        dir: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "getf-makespan,etf,sls")]
        algos: Vec<Algorithm>,
        /// Tie-break seeds; ties go by index when omitted.
        #[arg(long, value_parser = parse_list::<u64>)]
        seeds: Option<std::vec::Vec<u64>>,
        #[arg(long)]
        theta: Option<f64>,
        /// Fill the runtime_ms column.
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a schedule as task,machine,start,end rows.
    Gantt { schedule: PathBuf },
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value = "layered", value_parser = parse_enum::<Family>)]
    family: Family,
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, default_value_t = 4)]
    m: usize,
    #[arg(long, default_value_t = 0.3)]
    density: f64,
    #[arg(long, default_value = "1,10", value_parser = parse_range)]
    demand: (f64, f64),
    #[arg(long, default_value = "1,4", value_parser = parse_range)]
    speed: (f64, f64),
    #[arg(long, default_value = "1,4", value_parser = parse_range)]
    comm: (f64, f64),
    #[arg(long, default_value = "0,5", value_parser = parse_range)]
    data: (f64, f64),
    #[arg(long, default_value = "infinite", value_parser = parse_enum::<SelfComm>)]
    self_comm: SelfComm,
    #[arg(long, default_value = "zero", value_parser = parse_enum::<WeightMode>)]
    weights: WeightMode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, default_value = "getf-makespan")]
    algo: Algorithm,
    /// by-index, random:<seed>, largest-demand or most-succ.
    #[arg(long, default_value = "by-index")]
    tie: TieBreakRule,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Comma-separated task order for sls.
    #[arg(long, value_parser = parse_list::<usize>)]
    priority: Option<std::vec::Vec<usize>>,
    /// Schedule JSON destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    groups_out: Option<PathBuf>,
}

fn parse_enum<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_owned())).map_err(|e| e.to_string())
}

fn emit(path: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => write_file(p, text),
        None => {
            println!("{}", text.trim_end());
            Ok(())
        }
    }
}

fn config(theta: Option<f64>, gamma: Option<f64>, tie: TieBreakRule) -> Result<PipelineConfig, Failure> {
    let defaults = PipelineConfig::default();
    let theta = theta.unwrap_or(defaults.theta);
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Failure::usage(format!("--theta must lie in (0, 1), got {theta}")));
    }
    if let Some(g) = gamma {
        if !(g > 1.0 && g.is_finite()) {
            return Err(Failure::usage(format!("--gamma must exceed 1, got {g}")));
        }
    }
    Ok(PipelineConfig { theta, gamma, tie })
}

fn generate(a: GenerateArgs) -> Result<(), Failure> {
    let spec = GeneratorSpec {
        family: a.family,
        n: a.n,
        m: a.m,
        density: a.density,
        demand_range: a.demand,
        speed_range: a.speed,
        comm_range: a.comm,
        data_range: a.data,
        self_comm: a.self_comm,
        weights: a.weights,
        seed: a.seed,
    };
    let inst: Instance = generate_instance(&spec).map_err(|e| Failure::usage(e.to_string()))?;
    emit(a.out.as_ref(), &inst.to_json())
}

fn solve(a: SolveArgs) -> Result<(), Failure> {
    let inst = load_instance(&a.instance)?;
    let opts = RunOptions {
        config: config(a.theta, a.gamma, a.tie)?,
        priority: a.priority,
    };
    let outcome = run_algorithm(&inst, a.algo, &opts)?;
    for r in &outcome.reports {
        for q in r.failures() {
            log::warn!("{} bound `{}` violated: {} > {}", r.kind, q.name, q.lhs, q.rhs);
        }
    }
    emit(a.out.as_ref(), &outcome.schedule.to_json(&inst.graph))?;
    if let Some(p) = &a.report {
        let reports: Vec<serde_json::Value> = outcome
            .reports
            .iter()
            .map(|r| serde_json::from_str(&r.to_json()).expect("report JSON is valid"))
            .collect();
        write_file(p, &serde_json::to_string_pretty(&reports).expect("serializable"))?;
    }
    if let Some(p) = &a.groups_out {
        write_file(p, &outcome.assignment.to_json())?;
    }
    let failed = outcome.failed_reports();
    if bounds_are_binding(a.algo) && !failed.is_empty() {
        let names: Vec<&str> = failed.iter().map(|r| r.kind.as_str()).collect();
        return Err(Failure::bound(format!("bound check failed: {}", names.join(", "))));
    }
    Ok(())
}

fn verify(instance: PathBuf, schedule: PathBuf, groups: Option<PathBuf>) -> Result<(), Failure> {
    let inst = load_instance(&instance)?;
    let s = Schedule::from_json(&read_file(&schedule)?, inst.n())?;
    let f = match &groups {
        Some(p) => GroupAssignment::from_json(&read_file(p)?, &inst.platform, inst.n())?,
        None => GroupAssignment::trivial(&inst.platform, inst.n()),
    };
    let feasibility = verify_schedule(&inst, &s, groups.as_ref().map(|_| &f));
    let mut doc = serde_json::json!({ "feasibility": feasibility });
    if feasibility.feasible {
        let sep = separation_report(&s, &inst, &f)?;
        doc["separation"] = serde_json::from_str(&sep.to_json()).expect("report JSON is valid");
    }
    println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
    if feasibility.feasible {
        Ok(())
    } else {
        Err(Failure::invalid("schedule is infeasible"))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Generate(a) => generate(a),
        Command::Solve(a) => solve(a),
        Command::Verify { instance, schedule, groups } => verify(instance, schedule, groups),
        Command::Compare { dir, algos, seeds, theta, timing, out } => {
            let opts = CompareOptions {
                config: config(theta, None, TieBreakRule::ByIndex)?,
                timing,
            };
            let table = compare_batch(&dir, &algos, &seeds.unwrap_or_default(), &opts)?;
            emit(out.as_ref(), &table)
        }
        Command::Gantt { schedule } => {
            let s = Schedule::from_json_unchecked_size(&read_file(&schedule)?)?;
            print!("{}", s.to_gantt_csv());
            Ok(())
        }
    }
}

fn init_logging() {
    let level = match std::env::var("GETF_LOG").as_deref() {
        Ok("quiet") => log::LevelFilter::Off,
        Ok("debug") => log::LevelFilter::Debug,
        Ok("info") => log::LevelFilter::Info,
        _ => log::LevelFilter::Warn,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
}

fn main() -> ExitCode {
    init_logging();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code as u8)
        }
    }
}
