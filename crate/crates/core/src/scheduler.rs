//! List schedulers: GETF, ETF and a fixed-priority SLS baseline.
//!
//! All of them place tasks append-only: a machine becomes available again at
//! the finish of the last task placed on it, and gaps are never back-filled.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grouping::GroupAssignment;
use crate::model::{Adjacency, Instance, TaskGraph};
use crate::scalar::{cmp, Scalar};

/// A complete schedule; every vector is indexed by task id.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule<T> {
    pub machine: Vec<usize>,
    pub start: Vec<T>,
    pub finish: Vec<T>,
    /// Tasks in the order the scheduler committed them.
    pub iteration_order: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct AssignmentRow<T> {
    task: usize,
    machine: usize,
    start: T,
    end: T,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct ScheduleDoc<T> {
    assignments: Vec<AssignmentRow<T>>,
    iteration_order: Vec<usize>,
    #[serde(default)]
    makespan: T,
    #[serde(default)]
    weighted_completion: T,
}

impl<T: Scalar> Schedule<T> {
    pub fn n(&self) -> usize {
        self.machine.len()
    }

    pub fn makespan(&self) -> T {
        self.finish.iter().copied().fold(T::zero(), T::max)
    }

    pub fn weighted_completion(&self, graph: &TaskGraph<T>) -> T {
        graph.tasks.iter().map(|t| t.weight * self.finish[t.id]).sum()
    }

    /// Tasks on each machine ordered by start time.
    pub fn timelines(&self, m: usize) -> Vec<Vec<usize>> {
        let mut lines = vec![Vec::new(); m];
        for j in 0..self.n() {
            if let Some(line) = lines.get_mut(self.machine[j]) {
                line.push(j);
            }
        }
        for line in &mut lines {
            line.sort_by(|&a, &b| {
                cmp(&self.start[a], &self.start[b])
                    .then(cmp(&self.finish[a], &self.finish[b]))
                    .then(a.cmp(&b))
            });
        }
        lines
    }

    /// Total idle time on `machine` inside the window `[from, to]`.
    pub fn idle_within(&self, machine: usize, from: T, to: T) -> T {
        if to <= from {
            return T::zero();
        }
        // Busy intervals on one machine are disjoint in a feasible schedule,
        // so the clipped busy time can simply be summed.
        let busy: T = (0..self.n())
            .filter(|&j| self.machine[j] == machine)
            .map(|j| (self.finish[j].min(to) - self.start[j].max(from)).max(T::zero()))
            .sum();
        (to - from - busy).max(T::zero())
    }

    pub fn to_json(&self, graph: &TaskGraph<T>) -> String {
        let doc = ScheduleDoc {
            assignments: (0..self.n())
                .map(|j| AssignmentRow {
                    task: j,
                    machine: self.machine[j],
                    start: self.start[j],
                    end: self.finish[j],
                })
                .collect(),
            iteration_order: self.iteration_order.clone(),
            makespan: self.makespan(),
            weighted_completion: self.weighted_completion(graph),
        };
        serde_json::to_string_pretty(&doc).expect("schedule serializes")
    }

    /// Parses schedule JSON; every task of a graph with `n` tasks must appear once.
    pub fn from_json(text: &str, n: usize) -> Result<Self> {
        Self::from_doc(serde_json::from_str(text)?, n)
    }

    /// Parses schedule JSON, taking the task count from the assignment list.
    pub fn from_json_unchecked_size(text: &str) -> Result<Self> {
        let doc: ScheduleDoc<T> = serde_json::from_str(text)?;
        let n = doc.assignments.len();
        Self::from_doc(doc, n)
    }

    fn from_doc(doc: ScheduleDoc<T>, n: usize) -> Result<Self> {
        let mut machine = vec![usize::MAX; n];
        let mut start = vec![T::zero(); n];
        let mut finish = vec![T::zero(); n];
        for (k, row) in doc.assignments.iter().enumerate() {
            if row.task >= n {
                return Err(Error::UnknownTask { task: row.task });
            }
            if machine[row.task] != usize::MAX {
                return Err(Error::schema(
                    format!("assignments[{k}].task"),
                    format!("task {} assigned twice", row.task),
                ));
            }
            machine[row.task] = row.machine;
            start[row.task] = row.start;
            finish[row.task] = row.end;
        }
        if let Some(j) = machine.iter().position(|&i| i == usize::MAX) {
            return Err(Error::schema("assignments", format!("task {j} is not assigned")));
        }
        Ok(Schedule {
            machine,
            start,
            finish,
            iteration_order: doc.iteration_order,
        })
    }

    /// Gantt rows `task,machine,start,end`, one per task in id order.
    pub fn to_gantt_csv(&self) -> String {
        let mut out = String::from("task,machine,start,end\n");
        for j in 0..self.n() {
            out.push_str(&format!("{},{},{},{}\n", j, self.machine[j], self.start[j], self.finish[j]));
        }
        out
    }
}

/// A schedule under construction.
#[derive(Clone, Debug)]
pub struct PartialSchedule<T> {
    pub machine: Vec<Option<usize>>,
    pub start: Vec<T>,
    pub finish: Vec<T>,
    /// Finish of the last task appended to each machine.
    pub available: Vec<T>,
    pub iteration_order: Vec<usize>,
}

impl<T: Scalar> PartialSchedule<T> {
    pub fn new(n: usize, m: usize) -> Self {
        PartialSchedule {
            machine: vec![None; n],
            start: vec![T::zero(); n],
            finish: vec![T::zero(); n],
            available: vec![T::zero(); m],
            iteration_order: Vec::with_capacity(n),
        }
    }

    pub fn is_scheduled(&self, task: usize) -> bool {
        self.machine[task].is_some()
    }

    pub fn place(&mut self, inst: &Instance<T>, task: usize, machine: usize, start: T) {
        let finish = start + inst.processing_time(task, machine);
        self.machine[task] = Some(machine);
        self.start[task] = start;
        self.finish[task] = finish;
        self.available[machine] = finish;
        self.iteration_order.push(task);
    }

    pub fn finish(self) -> Schedule<T> {
        Schedule {
            machine: self.machine.into_iter().map(|m| m.expect("all tasks placed")).collect(),
            start: self.start,
            finish: self.finish,
            iteration_order: self.iteration_order,
        }
    }
}

pub fn earliest_start<T: Scalar>(task: usize, machine: usize, partial: &PartialSchedule<T>, inst: &Instance<T>, adj: &Adjacency<T>) -> Result<T> {
    let mut t = partial.available[machine];
    for &(pred, data) in &adj.preds[task] {
        let Some(pm) = partial.machine[pred] else {
            return Err(Error::UnscheduledPredecessor { task, pred });
        };
        t = t.max(partial.finish[pred] + inst.comm_delay(data, pm, machine));
    }
    Ok(t)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum TieBreakRule {
    #[default]
    ByIndex,
    Random(u64),
    LargestDemand,
    MostSuccessors,
}

impl TieBreakRule {
    pub fn all_with_seed(seed: u64) -> [TieBreakRule; 4] {
        [
            TieBreakRule::ByIndex,
            TieBreakRule::Random(seed),
            TieBreakRule::LargestDemand,
            TieBreakRule::MostSuccessors,
        ]
    }

    pub fn seed(self) -> Option<u64> {
        match self {
            TieBreakRule::Random(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for TieBreakRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TieBreakRule::ByIndex => write!(f, "by-index"),
            TieBreakRule::Random(s) => write!(f, "random:{s}"),
            TieBreakRule::LargestDemand => write!(f, "largest-demand"),
            TieBreakRule::MostSuccessors => write!(f, "most-succ"),
        }
    }
}

impl FromStr for TieBreakRule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "by-index" => Ok(TieBreakRule::ByIndex),
            "largest-demand" => Ok(TieBreakRule::LargestDemand),
            "most-succ" => Ok(TieBreakRule::MostSuccessors),
            _ => match s.strip_prefix("random:") {
                Some(seed) => seed
                    .parse()
                    .map(TieBreakRule::Random)
                    .map_err(|e| format!("bad seed `{seed}`: {e}")),
                None => Err(format!(
                    "unknown tie rule `{s}` (expected by-index, random:<seed>, largest-demand or most-succ)"
                )),
            },
        }
    }
}

/// Stateful chooser for one run of a [`TieBreakRule`].
pub struct TieBreaker {
    rule: TieBreakRule,
    rng: Option<ChaCha8Rng>,
}

impl TieBreaker {
    pub fn new(rule: TieBreakRule) -> Self {
        TieBreaker {
            rule,
            rng: rule.seed().map(ChaCha8Rng::seed_from_u64),
        }
    }

    /// Picks one of `candidates` (ascending task ids, nonempty).
    pub fn pick<T: Scalar>(&mut self, candidates: &[usize], graph: &TaskGraph<T>, adj: &Adjacency<T>) -> usize {
        debug_assert!(!candidates.is_empty());
        if candidates.len() == 1 {
            return candidates[0];
        }
        match self.rule {
            TieBreakRule::ByIndex => candidates[0],
            TieBreakRule::Random(_) => {
                let rng = self.rng.as_mut().expect("seeded");
                candidates[rng.gen_range(0..candidates.len())]
            }
            TieBreakRule::LargestDemand => {
                let mut best = candidates[0];
                for &j in &candidates[1..] {
                    if graph.demand(j) > graph.demand(best) {
                        best = j;
                    }
                }
                best
            }
            TieBreakRule::MostSuccessors => {
                let mut best = candidates[0];
                for &j in &candidates[1..] {
                    if adj.succs[j].len() > adj.succs[best].len() {
                        best = j;
                    }
                }
                best
            }
        }
    }
}

/// Best machine for `task` among `machines`: minimum earliest start, then
/// fastest, then lowest id.
fn best_machine<T: Scalar>(task: usize, machines: &[usize], partial: &PartialSchedule<T>, inst: &Instance<T>, adj: &Adjacency<T>, prefer_speed: bool) -> Result<(usize, T)> {
    let starts: Vec<T> = machines
        .iter()
        .map(|&i| earliest_start(task, i, partial, inst, adj))
        .collect::<Result<_>>()?;
    let min = starts.iter().copied().fold(T::infinity(), T::min);
    let mut best: Option<(usize, T)> = None;
    for (&i, &t) in machines.iter().zip(&starts) {
        if !t.le_tol(min) {
            continue;
        }
        best = match best {
            None => Some((i, t)),
            Some((b, bt)) => {
                let (si, sb) = (inst.platform.speed(i), inst.platform.speed(b));
                let better = if prefer_speed && si != sb { si > sb } else { i < b };
                if better {
                    Some((i, t))
                } else {
                    Some((b, bt))
                }
            }
        };
    }
    best.ok_or(Error::NoGroup { task })
}

pub fn getf_schedule<T: Scalar>(inst: &Instance<T>, f: &GroupAssignment<T>, tie: TieBreakRule) -> Result<Schedule<T>> {
    let n = inst.n();
    if f.group_of_task.len() != n {
        return Err(Error::Dimension(format!(
            "group assignment covers {} tasks, instance has {n}",
            f.group_of_task.len()
        )));
    }
    let adj = inst.graph.adjacency();
    let mut partial = PartialSchedule::new(n, inst.m());
    let mut missing: Vec<usize> = adj.preds.iter().map(Vec::len).collect();
    let mut ready: Vec<usize> = (0..n).filter(|&j| missing[j] == 0).collect();
    let mut breaker = TieBreaker::new(tie);
    while !ready.is_empty() {
        let options: Vec<(usize, usize, T)> = ready
            .iter()
            .map(|&j| best_machine(j, f.machines_for(j), &partial, inst, &adj, true).map(|(i, t)| (j, i, t)))
            .collect::<Result<_>>()?;
        let min = options.iter().map(|o| o.2).fold(T::infinity(), T::min);
        let tied: Vec<usize> = options.iter().filter(|o| o.2.le_tol(min)).map(|o| o.0).collect();
        let chosen = breaker.pick(&tied, &inst.graph, &adj);
        let &(_, machine, start) = options.iter().find(|o| o.0 == chosen).expect("chosen is ready");
        partial.place(inst, chosen, machine, start);
        ready.retain(|&j| j != chosen);
        for &(s, _) in &adj.succs[chosen] {
            missing[s] -= 1;
            if missing[s] == 0 {
                let pos = ready.partition_point(|&j| j < s);
                ready.insert(pos, s);
            }
        }
    }
    Ok(partial.finish())
}

pub fn etf_schedule<T: Scalar>(inst: &Instance<T>, tie: TieBreakRule) -> Result<Schedule<T>> {
    getf_schedule(inst, &GroupAssignment::trivial(&inst.platform, inst.n()), tie)
}

pub fn sls_schedule<T: Scalar>(inst: &Instance<T>, f: &GroupAssignment<T>, priority: &[usize]) -> Result<Schedule<T>> {
    let n = inst.n();
    let mut seen = vec![false; n];
    for &j in priority {
        if j >= n {
            return Err(Error::UnknownTask { task: j });
        }
        if seen[j] {
            return Err(Error::NotTopological(format!("task {j} appears twice")));
        }
        seen[j] = true;
    }
    if let Some(j) = seen.iter().position(|&s| !s) {
        return Err(Error::NotTopological(format!("task {j} is missing")));
    }
    let adj = inst.graph.adjacency();
    let mut partial = PartialSchedule::new(n, inst.m());
    for &j in priority {
        if let Some(&(p, _)) = adj.preds[j].iter().find(|&&(p, _)| !partial.is_scheduled(p)) {
            return Err(Error::NotTopological(format!("task {j} precedes its predecessor {p}")));
        }
        let (machine, start) = best_machine(j, f.machines_for(j), &partial, inst, &adj, false)?;
        partial.place(inst, j, machine, start);
    }
    Ok(partial.finish())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Overlap,
    Precedence,
    Duration,
    Group,
    UnknownMachine,
    IterationOrder,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub task: usize,
    /// Time at which the violation manifests (start of the offending task).
    pub time: f64,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    /// Sorted by time, earliest first.
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn earliest(&self) -> Option<&Violation> {
        self.violations.first()
    }
}

fn slack_tol<T: Scalar>(v: T) -> T {
    T::TIME_TOL * (T::one() + v.abs())
}

pub fn verify_schedule<T: Scalar>(inst: &Instance<T>, s: &Schedule<T>, f: Option<&GroupAssignment<T>>) -> FeasibilityReport {
    let n = inst.n();
    let m = inst.m();
    let mut out = Vec::new();
    let mut push = |kind, task: usize, time: T, message: String| {
        out.push(Violation {
            kind,
            task,
            time: time.to_f64_lossy(),
            message,
        });
    };
    if s.n() != n {
        push(
            ViolationKind::IterationOrder,
            0,
            T::zero(),
            format!("schedule has {} tasks, instance has {n}", s.n()),
        );
        return finish_report(out);
    }
    let mut placed = true;
    for j in 0..n {
        let i = s.machine[j];
        if i >= m {
            push(ViolationKind::UnknownMachine, j, s.start[j], format!("task {j} on unknown machine {i}"));
            placed = false;
            continue;
        }
        let dur = inst.processing_time(j, i);
        if (s.finish[j] - s.start[j] - dur).abs() > slack_tol(dur) {
            push(
                ViolationKind::Duration,
                j,
                s.start[j],
                format!("task {j} runs {} but needs {dur}", s.finish[j] - s.start[j]),
            );
        }
        if s.start[j] < -T::TIME_TOL {
            push(ViolationKind::Precedence, j, s.start[j], format!("task {j} starts before time 0"));
        }
        if let Some(f) = f {
            if !f.allows(j, i) {
                push(
                    ViolationKind::Group,
                    j,
                    s.start[j],
                    format!("task {j} on machine {i} outside its group {}", f.group_of_task[j]),
                );
            }
        }
    }
    if placed {
        for line in s.timelines(m) {
            for w in line.windows(2) {
                let (a, b) = (w[0], w[1]);
                if s.start[b] + slack_tol(s.finish[a]) < s.finish[a] {
                    push(
                        ViolationKind::Overlap,
                        b,
                        s.start[b],
                        format!("tasks {a} and {b} overlap on machine {}", s.machine[a]),
                    );
                }
            }
        }
        for e in &inst.graph.edges {
            let ready = s.finish[e.src] + inst.comm_delay(e.data, s.machine[e.src], s.machine[e.dst]);
            if s.start[e.dst] + slack_tol(ready) < ready {
                push(
                    ViolationKind::Precedence,
                    e.dst,
                    s.start[e.dst],
                    format!("task {} starts at {} before its input from {} arrives at {ready}", e.dst, s.start[e.dst], e.src),
                );
            }
        }
    }
    if !s.iteration_order.is_empty() {
        let mut pos = vec![usize::MAX; n];
        for (k, &j) in s.iteration_order.iter().enumerate() {
            if j < n && pos[j] == usize::MAX {
                pos[j] = k;
            } else {
                push(ViolationKind::IterationOrder, j.min(n.saturating_sub(1)), T::zero(), format!("iteration order repeats or invents task {j}"));
            }
        }
        if pos.contains(&usize::MAX) {
            push(ViolationKind::IterationOrder, 0, T::zero(), "iteration order misses tasks".into());
        } else {
            for e in &inst.graph.edges {
                if pos[e.src] > pos[e.dst] {
                    push(
                        ViolationKind::IterationOrder,
                        e.dst,
                        s.start[e.dst],
                        format!("task {} committed before its predecessor {}", e.dst, e.src),
                    );
                }
            }
        }
    }
    finish_report(out)
}

fn finish_report(mut violations: Vec<Violation>) -> FeasibilityReport {
    violations.sort_by(|a, b| a.time.total_cmp(&b.time).then(a.task.cmp(&b.task)));
    FeasibilityReport {
        feasible: violations.is_empty(),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::EXAMPLE1;
    use crate::model::{parse_instance, CommSpeed, Platform};

    fn example1() -> Instance<f64> {
        parse_instance(EXAMPLE1).unwrap()
    }

    #[test]
    fn earliest_start_examples() {
        let inst = example1();
        let adj = inst.graph.adjacency();
        let mut p = PartialSchedule::new(4, 2);
        assert_eq!(earliest_start(0, 0, &p, &inst, &adj).unwrap(), 0.0);
        assert!(matches!(
            earliest_start(3, 0, &p, &inst, &adj),
            Err(Error::UnscheduledPredecessor { task: 3, pred: 0 })
        ));
        p.place(&inst, 0, 0, 0.0);
        p.place(&inst, 1, 1, 0.0);
        assert_eq!(earliest_start(3, 0, &p, &inst, &adj).unwrap(), 2.0);
        assert_eq!(earliest_start(2, 1, &p, &inst, &adj).unwrap(), 3.0);
    }

    #[test]
    fn getf_example1() {
        let inst = example1();
        let f = GroupAssignment::trivial(&inst.platform, 4);
        let s = getf_schedule(&inst, &f, TieBreakRule::ByIndex).unwrap();
        assert_eq!(s.machine, vec![0, 1, 1, 0]);
        assert_eq!(s.start, vec![0.0, 0.0, 3.0, 2.0]);
        assert_eq!(s.finish, vec![1.0, 1.0, 4.0, 5.0]);
        assert_eq!(s.iteration_order, vec![0, 1, 3, 2]);
        assert_eq!(s.makespan(), 5.0);
        assert_eq!(etf_schedule(&inst, TieBreakRule::ByIndex).unwrap(), s);
        assert!(verify_schedule(&inst, &s, Some(&f)).feasible);
    }

    #[test]
    fn sls_example1() {
        let inst = example1();
        let f = GroupAssignment::trivial(&inst.platform, 4);
        let s = sls_schedule(&inst, &f, &[0, 1, 2, 3]).unwrap();
        assert_eq!((s.machine[2], s.start[2], s.finish[2]), (0, 3.0, 4.0));
        assert_eq!((s.machine[3], s.start[3], s.finish[3]), (1, 3.0, 6.0));
        assert_eq!(s.makespan(), 6.0);
        assert_eq!(s.idle_within(1, 1.0, 3.0), 2.0);
        assert!(verify_schedule(&inst, &s, Some(&f)).feasible);
        assert!(matches!(
            sls_schedule(&inst, &f, &[2, 0, 1, 3]),
            Err(Error::NotTopological(_))
        ));
    }

    #[test]
    fn lone_task_on_fast_group() {
        let platform = Platform::uniform(&[1.0, 2.0], CommSpeed::Infinite, CommSpeed::Infinite);
        let inst = Instance::new(TaskGraph::from_demands(&[2.0], &[]), platform).unwrap();
        let groups = crate::grouping::partition_machines(&inst.platform, &Default::default());
        let fast = groups.group_of[1].unwrap();
        let f = GroupAssignment {
            groups,
            group_of_task: vec![fast],
            thresholds: vec![fast],
        };
        let s = getf_schedule(&inst, &f, TieBreakRule::ByIndex).unwrap();
        assert_eq!((s.machine[0], s.start[0], s.finish[0]), (1, 0.0, 1.0));
    }

    #[test]
    fn self_link_beats_cross_link() {
        let platform = Platform::uniform(&[1.0, 1.0], CommSpeed::Finite(1.0), CommSpeed::Infinite);
        let inst = Instance::new(TaskGraph::from_demands(&[1.0, 1.0], &[(0, 1, 4.0)]), platform).unwrap();
        let s = etf_schedule(&inst, TieBreakRule::ByIndex).unwrap();
        assert_eq!(s.machine[0], s.machine[1]);
        assert_eq!(s.start[1], 1.0);
    }

    #[test]
    fn machine_ties_prefer_speed() {
        let platform = Platform::uniform(&[1.0, 2.0], CommSpeed::Infinite, CommSpeed::Infinite);
        let inst = Instance::new(TaskGraph::from_demands(&[2.0], &[]), platform).unwrap();
        let s = etf_schedule(&inst, TieBreakRule::ByIndex).unwrap();
        assert_eq!(s.machine[0], 1);
        let s = sls_schedule(&inst, &GroupAssignment::trivial(&inst.platform, 1), &[0]).unwrap();
        assert_eq!(s.machine[0], 0);
    }

    #[test]
    fn single_machine_is_serial() {
        let platform = Platform::uniform(&[2.0], CommSpeed::Infinite, CommSpeed::Infinite);
        let g = TaskGraph::from_demands(&[2.0, 4.0, 2.0], &[(0, 2, 1.0)]);
        let inst = Instance::new(g, platform).unwrap();
        let s = etf_schedule(&inst, TieBreakRule::ByIndex).unwrap();
        assert_eq!(s.makespan(), 4.0);
    }

    #[test]
    fn tie_rules() {
        let g = TaskGraph::from_demands(&[1.0, 3.0, 2.0, 1.0], &[(2, 3, 0.0)]);
        let adj = g.adjacency();
        assert_eq!(TieBreaker::new(TieBreakRule::ByIndex).pick(&[0, 1, 2], &g, &adj), 0);
        assert_eq!(TieBreaker::new(TieBreakRule::LargestDemand).pick(&[0, 1, 2], &g, &adj), 1);
        assert_eq!(TieBreaker::new(TieBreakRule::MostSuccessors).pick(&[0, 1, 2], &g, &adj), 2);
        let a: Vec<usize> = {
            let mut b = TieBreaker::new(TieBreakRule::Random(7));
            (0..20).map(|_| b.pick(&[0, 1, 2], &g, &adj)).collect()
        };
        let mut b = TieBreaker::new(TieBreakRule::Random(7));
        let again: Vec<usize> = (0..20).map(|_| b.pick(&[0, 1, 2], &g, &adj)).collect();
        assert_eq!(a, again);
        assert!(a.iter().any(|&x| x != a[0]));
    }

    #[test]
    fn tie_rule_strings() {
        for rule in TieBreakRule::all_with_seed(42) {
            assert_eq!(rule.to_string().parse::<TieBreakRule>().unwrap(), rule);
        }
        assert!("random:x".parse::<TieBreakRule>().is_err());
        assert!("first".parse::<TieBreakRule>().is_err());
    }

    #[test]
    fn verify_catches_overlap_and_precedence() {
        let inst = example1();
        let mut s = etf_schedule(&inst, TieBreakRule::ByIndex).unwrap();
        s.machine[1] = 0;
        let r = verify_schedule(&inst, &s, None);
        assert!(!r.feasible);
        assert!(r.violations.iter().any(|v| v.kind == ViolationKind::Overlap));

        let mut s = etf_schedule(&inst, TieBreakRule::ByIndex).unwrap();
        s.start[3] = 1.5;
        s.finish[3] = 4.5;
        let r = verify_schedule(&inst, &s, None);
        assert_eq!(r.earliest().unwrap().kind, ViolationKind::Precedence);
        assert_eq!(r.earliest().unwrap().task, 3);

        let mut s = etf_schedule(&inst, TieBreakRule::ByIndex).unwrap();
        s.finish[2] = 3.5;
        assert_eq!(verify_schedule(&inst, &s, None).violations[0].kind, ViolationKind::Duration);
    }

    #[test]
    fn schedule_json_round_trip() {
        let inst = example1();
        let s = etf_schedule(&inst, TieBreakRule::ByIndex).unwrap();
        let text = s.to_json(&inst.graph);
        assert!(text.contains("\"makespan\": 5.0"));
        assert!(text.contains("\"weighted_completion\": 5.0"));
        assert_eq!(Schedule::from_json(&text, 4).unwrap(), s);
        assert!(Schedule::<f64>::from_json(&text, 5).is_err());
        assert!(s.to_gantt_csv().starts_with("task,machine,start,end\n0,0,0,1\n"));
    }
}
