//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use common::Ensemble;
use getf_core::analysis::{identical_report, separation_report};
use getf_core::generate::WeightMode;
use getf_core::grouping::{
    build_makespan_lp, build_weighted_lp, partition_machines, solve_makespan_relaxation, GroupingConfig,
};
use getf_core::lp::{solve_lp, LpStatus, Relation};
use getf_core::model::parse_instance;
use getf_core::pipeline::{run_makespan, run_weighted};
use getf_core::scheduler::{etf_schedule, getf_schedule, sls_schedule, verify_schedule};
use getf_core::{
    brute_force_schedule, CommSpeed, GroupAssignment, Instance, LinearProgram, Objective, OracleLimits,
    PipelineConfig, Platform, TieBreakRule,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXAMPLE1: &str = include_str!("data/example1.json");
const TOL: f64 = 1e-9;

struct Tally {
    runs: usize,
    failures: usize,
    first: Option<String>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            runs: 0,
            failures: 0,
            first: None,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.runs += 1;
        if !ok {
            self.failures += 1;
            if self.first.is_none() {
                self.first = Some(what());
            }
        }
    }

    fn ok(&self) -> bool {
        self.failures == 0
    }

    fn summary(&self, label: &str) -> String {
        match &self.first {
            None => format!("{label} {}/{}", self.runs, self.runs),
            Some(first) => format!(
                "{label} {}/{} (first failure: {first})",
                self.runs - self.failures,
                self.runs
            ),
        }
    }
}

fn example1() -> Instance {
    parse_instance(EXAMPLE1).unwrap()
}

fn ac1() -> (bool, String) {
    let inst = example1();
    let f = GroupAssignment::trivial(&inst.platform, inst.n());
    let getf = getf_schedule(&inst, &f, TieBreakRule::ByIndex).unwrap();
    let sls = sls_schedule(&inst, &f, &[0, 1, 2, 3]).unwrap();
    let idle = sls.idle_within(1, 1.0, 3.0);
    let ok = (getf.makespan() - 5.0).abs() <= TOL
        && getf.machine[3] == 0
        && (getf.start[3] - 2.0).abs() <= TOL
        && (sls.makespan() - 6.0).abs() <= TOL
        && (idle - 2.0).abs() <= TOL;
    (
        ok,
        format!(
            "getf makespan {} (task 3 on m{} at {}), sls makespan {} with idle {idle} on m1 in [1,3]",
            getf.makespan(),
            getf.machine[3],
            getf.start[3],
            sls.makespan()
        ),
    )
}

/// Random group assignment over the nonempty bands (or the trivial one).
fn random_assignment(inst: &Instance, rng: &mut ChaCha8Rng) -> GroupAssignment {
    if rng.gen_bool(0.3) {
        return GroupAssignment::trivial(&inst.platform, inst.n());
    }
    let groups = partition_machines(&inst.platform, &GroupingConfig::default());
    let nonempty: Vec<usize> = (1..=groups.k).filter(|&k| !groups.members(k).is_empty()).collect();
    let group_of_task: Vec<usize> = (0..inst.n()).map(|_| nonempty[rng.gen_range(0..nonempty.len())]).collect();
    GroupAssignment {
        groups,
        thresholds: group_of_task.clone(),
        group_of_task,
    }
}

fn ac2() -> (bool, String) {
    let ens = Ensemble::new((1, 50), (1, 16));
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC2);
    let mut sep = Tally::new();
    let mut idle = Tally::new();
    let mut corrected = Tally::new();
    let mut best_chain = Tally::new();
    for idx in 0..1000 {
        let inst = ens.instance(0xAC2, idx);
        let f = random_assignment(&inst, &mut rng);
        for tie in TieBreakRule::all_with_seed(idx) {
            let s = getf_schedule(&inst, &f, tie).unwrap();
            let r = separation_report(&s, &inst, &f).unwrap();
            let main = r.get("separation").unwrap();
            sep.check(main.pass, || format!("instance {idx} {tie}: {} > {}", main.lhs, main.rhs));
            for q in r.inequalities.iter().filter(|q| q.name.starts_with("idle")) {
                idle.check(q.pass, || format!("instance {idx} {tie} {}: {} > {}", q.name, q.lhs, q.rhs));
            }
            for (tally, q) in [(&mut corrected, &r.diagnostics[0]), (&mut best_chain, &r.diagnostics[1])] {
                tally.check(q.pass, || format!("instance {idx} {tie}: {} > {}", q.lhs, q.rhs));
            }
        }
    }
    let detail = format!(
        "{}; {}; [diagnostics] {}; {}",
        sep.summary("separation"),
        idle.summary("idle links"),
        best_chain.summary("best chain for P + C"),
        corrected.summary("all-predecessor delays")
    );
    (sep.ok() && idle.ok(), detail)
}

fn ac3() -> (bool, String) {
    let ens = Ensemble::new((1, 30), (1, 8));
    let mut chain_tally = Tally::new();
    let mut load_tally = Tally::new();
    let mut total = Tally::new();
    for idx in 0..200 {
        let inst = ens.instance(0xAC3, idx);
        let cfg = PipelineConfig {
            tie: TieBreakRule::all_with_seed(idx)[idx as usize % 4],
            ..PipelineConfig::default()
        };
        let run = run_makespan(&inst, &cfg).unwrap();
        let r = &run.theorem;
        for (tally, name) in [
            (&mut chain_tally, "chain_processing"),
            (&mut load_tally, "group_loads"),
            (&mut total, "makespan"),
        ] {
            let q = r.get(name).unwrap();
            tally.check(q.pass, || format!("instance {idx}: {} > {}", q.lhs, q.rhs));
        }
    }
    let detail = format!(
        "{}; {}; {}",
        chain_tally.summary("P <= 2γT*"),
        load_tally.summary("ΣD <= 2KT*"),
        total.summary("makespan")
    );
    (chain_tally.ok() && load_tally.ok() && total.ok(), detail)
}

fn retained_platform(inst: &Instance, retained: &[usize]) -> Instance {
    let speeds: Vec<f64> = retained.iter().map(|&i| inst.platform.speed(i)).collect();
    Instance::new(
        inst.graph.clone(),
        Platform::uniform(&speeds, CommSpeed::Infinite, CommSpeed::Infinite),
    )
    .unwrap()
}

fn ac4() -> (bool, String) {
    let ens = Ensemble {
        with_comm: false,
        ..Ensemble::new((1, 6), (1, 3))
    };
    let mut tally = Tally::new();
    let mut full = Tally::new();
    for idx in 0..50 {
        let inst = ens.instance(0xAC4, idx);
        let groups = partition_machines(&inst.platform, &GroupingConfig::default());
        let t_star = solve_makespan_relaxation(&inst, &groups).unwrap().t_star;
        let sub = retained_platform(&inst, &groups.retained);
        let (opt, _) = brute_force_schedule(&sub, true, Objective::Makespan, OracleLimits::default()).unwrap();
        tally.check(t_star <= opt + 1e-6 * opt.max(1.0), || {
            format!("instance {idx}: T* {t_star} > OPT {opt}")
        });
        let (opt_all, _) = brute_force_schedule(&inst, true, Objective::Makespan, OracleLimits::default()).unwrap();
        full.check(t_star <= opt_all + 1e-6 * opt_all.max(1.0), || {
            format!("instance {idx}: T* {t_star} > OPT {opt_all}")
        });
    }
    let detail = format!(
        "{}; [diagnostic, all machines] {}",
        tally.summary("T* <= OPT on retained machines"),
        full.summary("T* <= OPT")
    );
    (tally.ok(), detail)
}

fn ac5() -> (bool, String) {
    let inst = example1();
    let s = etf_schedule(&inst, TieBreakRule::ByIndex).unwrap();
    let (opt, _) = brute_force_schedule(&inst, true, Objective::Makespan, OracleLimits::default()).unwrap();
    let r = identical_report(&s, &inst, Some(opt)).unwrap();
    let graham = r.get("graham").unwrap();
    let example_ok = (r.chain_comm.unwrap() - 0.75).abs() <= TOL
        && (opt - 4.0).abs() <= TOL
        && (graham.rhs - 6.75).abs() <= TOL
        && graham.lhs <= graham.rhs;

    let ens = Ensemble {
        identical: true,
        ..Ensemble::new((1, 40), (1, 12))
    };
    let tiny = Ensemble {
        identical: true,
        ..Ensemble::new((1, 6), (1, 3))
    };
    let mut inter = Tally::new();
    let mut bound = Tally::new();
    for idx in 0..500u64 {
        let is_tiny = idx % 5 == 0;
        let inst = if is_tiny { tiny.instance(0xAC5, idx) } else { ens.instance(0xAC5, idx) };
        let tie = TieBreakRule::all_with_seed(idx)[idx as usize % 4];
        let s = etf_schedule(&inst, tie).unwrap();
        let opt = is_tiny.then(|| {
            brute_force_schedule(&inst, true, Objective::Makespan, OracleLimits::default())
                .unwrap()
                .0
        });
        let r = identical_report(&s, &inst, opt).unwrap();
        let q = r.get("intermediate").unwrap();
        inter.check(q.pass, || format!("instance {idx}: {} > {}", q.lhs, q.rhs));
        if let Some(q) = r.get("graham") {
            bound.check(q.pass, || format!("instance {idx}: {} > {}", q.lhs, q.rhs));
        }
    }
    let detail = format!(
        "example C'={} OPT={opt} bound={}; {}; {}",
        r.chain_comm.unwrap(),
        graham.rhs,
        inter.summary("intermediate"),
        bound.summary("(2-1/m)OPT + C'")
    );
    (example_ok && inter.ok() && bound.ok(), detail)
}

fn ac6() -> (bool, String) {
    let ens = Ensemble {
        weights: &[WeightMode::Uniform, WeightMode::SinkOnly],
        ..Ensemble::new((1, 12), (1, 4))
    };
    let mut per_task = Tally::new();
    let mut aggregate = Tally::new();
    let mut interval = Tally::new();
    let mut slices = Tally::new();
    for idx in 0..200 {
        let inst = ens.instance(0xAC6, idx);
        let cfg = PipelineConfig {
            tie: TieBreakRule::all_with_seed(idx)[idx as usize % 4],
            ..PipelineConfig::default()
        };
        let run = run_weighted(&inst, &cfg).unwrap();
        for q in &run.theorem.inequalities {
            let tally = if q.name.starts_with("per_task") {
                &mut per_task
            } else if q.name.starts_with("interval") {
                &mut interval
            } else if q.name.starts_with("slice") {
                &mut slices
            } else {
                &mut aggregate
            };
            tally.check(q.pass, || format!("instance {idx} {}: {} > {}", q.name, q.lhs, q.rhs));
        }
    }
    let detail = format!(
        "{}; {}; {}; {}",
        per_task.summary("per-task"),
        aggregate.summary("aggregate"),
        interval.summary("2^(q-1) <= 2C*"),
        slices.summary("slice feasibility")
    );
    (
        per_task.ok() && aggregate.ok() && interval.ok() && slices.ok(),
        detail,
    )
}

/// Solves a square system by Gaussian elimination with partial pivoting.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-10 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in 0..n {
            if r != c {
                let k = a[r][c] / a[c][c];
                for col in c..n {
                    a[r][col] -= k * a[c][col];
                }
                b[r] -= k * b[c];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Minimum over all basic feasible points of `{x ≥ 0, rows}` with `rows` in `a·x ≤ b` form.
fn vertex_minimum(obj: &[f64], rows: &[(Vec<f64>, f64)]) -> Option<f64> {
    let n = obj.len();
    let mut all: Vec<(Vec<f64>, f64)> = rows.to_vec();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = -1.0;
        all.push((e, 0.0));
    }
    let mut best: Option<f64> = None;
    let mut pick = Vec::with_capacity(n);
    fn rec(start: usize, pick: &mut Vec<usize>, all: &[(Vec<f64>, f64)], obj: &[f64], best: &mut Option<f64>) {
        let n = obj.len();
        if pick.len() == n {
            let a = pick.iter().map(|&r| all[r].0.clone()).collect();
            let b = pick.iter().map(|&r| all[r].1).collect();
            if let Some(x) = solve_square(a, b) {
                let feasible = all
                    .iter()
                    .all(|(row, rhs)| row.iter().zip(&x).map(|(c, v)| c * v).sum::<f64>() <= rhs + 1e-9);
                if feasible {
                    let v: f64 = obj.iter().zip(&x).map(|(c, v)| c * v).sum();
                    if best.map_or(true, |b| v < b) {
                        *best = Some(v);
                    }
                }
            }
            return;
        }
        for r in start..all.len() {
            pick.push(r);
            rec(r + 1, pick, all, obj, best);
            pick.pop();
        }
    }
    rec(0, &mut pick, &all, obj, &mut best);
    best
}

fn ac7() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC7);
    let mut tally = Tally::new();
    for idx in 0..100 {
        let n = rng.gen_range(1..=6);
        let k = rng.gen_range(1..=8);
        let mut lp = LinearProgram::new(n);
        lp.objective = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let mut rows = Vec::new();
        for _ in 0..k {
            let coeffs: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let rhs = rng.gen_range(-2.0..10.0);
            match rng.gen_range(0..5) {
                0 => {
                    lp.add_dense(&coeffs, Relation::Ge, rhs);
                    rows.push((coeffs.iter().map(|c| -c).collect(), -rhs));
                }
                1 => {
                    lp.add_dense(&coeffs, Relation::Eq, rhs);
                    rows.push((coeffs.iter().map(|c| -c).collect(), -rhs));
                    rows.push((coeffs, rhs));
                }
                _ => {
                    lp.add_dense(&coeffs, Relation::Le, rhs);
                    rows.push((coeffs, rhs));
                }
            }
        }
        lp.add_dense(&vec![1.0; n], Relation::Le, 10.0);
        rows.push((vec![1.0; n], 10.0));
        let expected = vertex_minimum(&lp.objective, &rows);
        let got = solve_lp(&lp).unwrap();
        let ok = match expected {
            None => got.status == LpStatus::Infeasible,
            Some(v) => got.status == LpStatus::Optimal && (got.objective - v).abs() <= 1e-7 * v.abs().max(1.0),
        };
        tally.check(ok, || format!("lp {idx}: expected {expected:?}, got {:?} {}", got.status, got.objective));
    }

    let inst = example1();
    let groups = partition_machines(&inst.platform, &GroupingConfig::default());
    let t_star = solve_lp(&build_makespan_lp(&inst, &groups).lp).unwrap().objective;
    let mut weighted = inst.clone();
    weighted.graph = weighted.graph.with_weights(&[0.0, 0.0, 0.0, 1.0]);
    let w_star = solve_lp(&build_weighted_lp(&weighted, &groups).lp).unwrap().objective;
    let example_ok = (t_star - 4.0).abs() <= 1e-7 && (w_star - 4.0).abs() <= 1e-7;
    (
        tally.ok() && example_ok,
        format!("{}; example T*={t_star} Σω C*={w_star}", tally.summary("vertex enumeration")),
    )
}

fn ac8() -> (bool, String) {
    let ens = Ensemble {
        weights: &[WeightMode::Zero, WeightMode::Uniform, WeightMode::SinkOnly],
        ..Ensemble::new((1, 15), (1, 5))
    };
    let mut feasible = Tally::new();
    let mut stable = Tally::new();
    for idx in 0..60 {
        let inst = ens.instance(0xAC8, idx);
        let tie = TieBreakRule::all_with_seed(idx)[idx as usize % 4];
        let cfg = PipelineConfig {
            tie,
            ..PipelineConfig::default()
        };
        let emit = |inst: &Instance| -> Vec<(String, String, Option<GroupAssignment>)> {
            let mk = run_makespan(inst, &cfg).unwrap();
            let wt = run_weighted(inst, &cfg).unwrap();
            let etf = etf_schedule(inst, tie).unwrap();
            let trivial = GroupAssignment::trivial(&inst.platform, inst.n());
            let order = getf_core::model::topological_order(&inst.graph).unwrap();
            let sls = sls_schedule(inst, &trivial, &order).unwrap();
            vec![
                ("getf-makespan".into(), mk.schedule.to_json(&inst.graph), Some(mk.assignment)),
                ("getf-weighted".into(), wt.schedule.to_json(&inst.graph), Some(wt.assignment)),
                ("etf".into(), etf.to_json(&inst.graph), None),
                ("sls".into(), sls.to_json(&inst.graph), None),
            ]
        };
        let first = emit(&inst);
        let again = emit(&ens.instance(0xAC8, idx));
        for ((algo, json, f), (_, json2, _)) in first.iter().zip(&again) {
            stable.check(json == json2, || format!("instance {idx} {algo}"));
            let s = getf_core::Schedule::from_json(json, inst.n()).unwrap();
            let report = verify_schedule(&inst, &s, f.as_ref());
            feasible.check(report.feasible, || {
                let mut msg = format!("instance {idx} {algo}:");
                for v in &report.violations {
                    let _ = write!(msg, " {}", v.message);
                }
                msg
            });
        }
    }
    (
        feasible.ok() && stable.ok(),
        format!("{}; {}", feasible.summary("feasible"), stable.summary("byte-identical reruns")),
    )
}

fn main() {
    type Criterion = (&'static str, Duration, fn() -> (bool, String));
    let criteria: [Criterion; 8] = [
        ("AC1 example 1 golden schedules", Duration::from_secs(1), ac1),
        ("AC2 separation suite", Duration::from_secs(120), ac2),
        ("AC3 makespan bound suite", Duration::from_secs(120), ac3),
        ("AC4 LP lower bound", Duration::from_secs(60), ac4),
        ("AC5 identical-machine suite", Duration::from_secs(120), ac5),
        ("AC6 weighted suite", Duration::from_secs(300), ac6),
        ("AC7 LP solver oracle", Duration::from_secs(60), ac7),
        ("AC8 feasibility and determinism", Duration::from_secs(600), ac8),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, budget, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let t0 = Instant::now();
        let (ok, detail) = run();
        let elapsed = t0.elapsed();
        let in_time = elapsed <= budget;
        let verdict = if ok && in_time { "PASS" } else { "FAIL" };
        if verdict == "FAIL" {
            failed += 1;
        }
        let timing = if in_time {
            format!("{:.2}s", elapsed.as_secs_f64())
        } else {
            format!("{:.2}s, over the {}s budget", elapsed.as_secs_f64(), budget.as_secs())
        };
        println!("{verdict} {name} [{timing}]: {detail}");
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
