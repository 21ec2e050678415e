//! Library side of the `getf` command: algorithm dispatch, batch comparison
//! and the mapping from failures to process exit codes.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use getf_core::analysis::separation_report;
use getf_core::model::topological_order;
use getf_core::pipeline::{run_makespan, run_weighted};
use getf_core::scheduler::{etf_schedule, sls_schedule, verify_schedule};
use getf_core::{BoundReport, GroupAssignment, Instance, PipelineConfig, Schedule, TieBreakRule};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_BOUND: i32 = 3;

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }

    pub fn bound(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_BOUND,
            message: message.into(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}

impl From<getf_core::Error> for Failure {
    fn from(e: getf_core::Error) -> Self {
        Failure::invalid(e.to_string())
    }
}

pub fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

pub fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

pub fn load_instance(path: &Path) -> Result<Instance, Failure> {
    getf_core::model::parse_instance(&read_file(path)?)
        .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    GetfMakespan,
    GetfWeighted,
    Etf,
    Sls,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::GetfMakespan,
        Algorithm::GetfWeighted,
        Algorithm::Etf,
        Algorithm::Sls,
    ];
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::GetfMakespan => "getf-makespan",
            Algorithm::GetfWeighted => "getf-weighted",
            Algorithm::Etf => "etf",
            Algorithm::Sls => "sls",
        })
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.to_string() == s)
            .ok_or_else(|| format!("unknown algorithm `{s}` (expected getf-makespan, getf-weighted, etf or sls)"))
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub config: PipelineConfig,
    /// SLS priority list; a topological order by id when absent.
    pub priority: Option<Vec<usize>>,
}

/// A schedule plus everything checked about it.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub schedule: Schedule,
    pub assignment: GroupAssignment,
    /// Bound reports in the order they were produced; the first is always
    /// the separation check for the emitted schedule.
    pub reports: Vec<BoundReport>,
}

impl Outcome {
    pub fn separation(&self) -> &BoundReport {
        &self.reports[0]
    }

    pub fn failed_reports(&self) -> Vec<&BoundReport> {
        self.reports.iter().filter(|r| !r.passed()).collect()
    }
}

pub fn run_algorithm(inst: &Instance, algo: Algorithm, opts: &RunOptions) -> Result<Outcome, Failure> {
    let cfg = &opts.config;
    let outcome = match algo {
        Algorithm::GetfMakespan => {
            let run = run_makespan(inst, cfg)?;
            Outcome {
                schedule: run.schedule,
                assignment: run.assignment,
                reports: vec![run.separation, run.theorem],
            }
        }
        Algorithm::GetfWeighted => {
            let run = run_weighted(inst, cfg)?;
            let separation = separation_report(&run.schedule, inst, &run.assignment)?;
            Outcome {
                schedule: run.schedule,
                assignment: run.assignment,
                reports: vec![separation, run.separation, run.theorem],
            }
        }
        Algorithm::Etf => {
            let schedule = etf_schedule(inst, cfg.tie)?;
            let assignment = GroupAssignment::trivial(&inst.platform, inst.n());
            let separation = separation_report(&schedule, inst, &assignment)?;
            Outcome {
                schedule,
                assignment,
                reports: vec![separation],
            }
        }
        Algorithm::Sls => {
            let assignment = GroupAssignment::trivial(&inst.platform, inst.n());
            let priority = match &opts.priority {
                Some(p) => p.clone(),
                None => topological_order(&inst.graph)?,
            };
            let schedule = sls_schedule(inst, &assignment, &priority)?;
            let separation = separation_report(&schedule, inst, &assignment)?;
            Outcome {
                schedule,
                assignment,
                reports: vec![separation],
            }
        }
    };
    let feasibility = verify_schedule(inst, &outcome.schedule, Some(&outcome.assignment));
    if let Some(v) = feasibility.earliest() {
        return Err(Failure::invalid(format!("{algo} produced an infeasible schedule: {}", v.message)));
    }
    Ok(outcome)
}

/// Whether a bound violation should fail the run. The list-scheduling
/// baseline carries no guarantee, so its report is informational.
pub fn bounds_are_binding(algo: Algorithm) -> bool {
    algo != Algorithm::Sls
}

#[derive(Clone, Debug, Default)]
pub struct CompareOptions {
    pub config: PipelineConfig,
    /// Fill the runtime column; off by default so that output is reproducible.
    pub timing: bool,
}

#[derive(Clone, Debug, Default)]
struct Aggregate {
    runs: usize,
    makespan: f64,
    weighted: f64,
    p: f64,
    d: f64,
    c: f64,
    min_slack: f64,
    runtime_ms: f64,
}

pub const COMPARE_HEADER: [&str; 11] = [
    "instance",
    "algorithm",
    "tie_seed",
    "makespan",
    "weighted_completion",
    "P",
    "sum_D",
    "C",
    "bound_slack",
    "runtime_ms",
    "error",
];

/// Instance files (`*.json`) in `dir`, sorted by file name.
pub fn instance_files(dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let entries = fs::read_dir(dir).map_err(|e| Failure::usage(format!("cannot read {}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

/// Runs every algorithm on every instance in `dir`, once per tie seed
/// (`by-index` ties when `seeds` is empty), and returns the table as CSV.
pub fn compare_batch(dir: &Path, algorithms: &[Algorithm], seeds: &[u64], opts: &CompareOptions) -> Result<String, Failure> {
    let files = instance_files(dir)?;
    let mut out = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Failure::usage(format!("csv: {e}"));
    out.write_record(COMPARE_HEADER).map_err(csv_err)?;
    let ties: Vec<(String, TieBreakRule)> = if seeds.is_empty() {
        vec![(String::new(), TieBreakRule::ByIndex)]
    } else {
        seeds.iter().map(|&s| (s.to_string(), TieBreakRule::Random(s))).collect()
    };
    let mut totals = vec![Aggregate::default(); algorithms.len()];
    for path in &files {
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let inst = load_instance(path);
        for (a, &algo) in algorithms.iter().enumerate() {
            for (seed, tie) in &ties {
                let mut row = vec![String::new(); COMPARE_HEADER.len()];
                row[0] = name.clone();
                row[1] = algo.to_string();
                row[2] = seed.clone();
                let t0 = Instant::now();
                let result = inst.as_ref().map_err(|e| Failure::invalid(e.message.clone())).and_then(|inst| {
                    let run = RunOptions {
                        config: PipelineConfig { tie: *tie, ..opts.config },
                        priority: None,
                    };
                    run_algorithm(inst, algo, &run).map(|o| (o, inst))
                });
                let elapsed = t0.elapsed().as_secs_f64() * 1e3;
                match result {
                    Ok((outcome, inst)) => {
                        let sep = outcome.separation();
                        let makespan = outcome.schedule.makespan();
                        let weighted = outcome.schedule.weighted_completion(&inst.graph);
                        let p = sep.chain_processing.unwrap_or(0.0);
                        let d: f64 = sep.group_loads.iter().sum();
                        let c = sep.chain_comm.unwrap_or(0.0);
                        let slack = sep.get("separation").map_or(f64::NAN, |q| q.slack);
                        row[3] = makespan.to_string();
                        row[4] = weighted.to_string();
                        row[5] = p.to_string();
                        row[6] = d.to_string();
                        row[7] = c.to_string();
                        row[8] = slack.to_string();
                        let t = &mut totals[a];
                        if t.runs == 0 {
                            t.min_slack = slack;
                        }
                        t.runs += 1;
                        t.makespan += makespan;
                        t.weighted += weighted;
                        t.p += p;
                        t.d += d;
                        t.c += c;
                        t.min_slack = t.min_slack.min(slack);
                        t.runtime_ms += elapsed;
                    }
                    Err(e) => row[10] = e.message,
                }
                if opts.timing {
                    row[9] = format!("{elapsed:.3}");
                }
                out.write_record(&row).map_err(csv_err)?;
            }
        }
    }
    if !files.is_empty() {
        for (algo, t) in algorithms.iter().zip(&totals) {
            let mut row = vec![String::new(); COMPARE_HEADER.len()];
            row[0] = "SUMMARY".into();
            row[1] = algo.to_string();
            if t.runs > 0 {
                let k = t.runs as f64;
                row[3] = (t.makespan / k).to_string();
                row[4] = (t.weighted / k).to_string();
                row[5] = (t.p / k).to_string();
                row[6] = (t.d / k).to_string();
                row[7] = (t.c / k).to_string();
                row[8] = t.min_slack.to_string();
                if opts.timing {
                    row[9] = format!("{:.3}", t.runtime_ms);
                }
            } else {
                row[10] = "no successful runs".into();
            }
            out.write_record(&row).map_err(csv_err)?;
        }
    }
    let bytes = out.into_inner().map_err(|e| Failure::usage(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Parses `"lo,hi"` or a single value.
pub fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("bad number `{v}`: {e}"));
    match s.split_once(',') {
        Some((lo, hi)) => Ok((parse(lo)?, parse(hi)?)),
        None => {
            let v = parse(s)?;
            Ok((v, v))
        }
    }
}

pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>, String>
where
    T::Err: fmt::Display,
{
    s.split(',')
        .filter(|v| !v.trim().is_empty())
        .map(|v| v.trim().parse::<T>().map_err(|e| format!("bad list entry `{v}`: {e}")))
        .collect()
}
