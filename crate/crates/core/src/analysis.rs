//! Terminal chains and the per-schedule bound checks.
//!
//! A terminal chain walks backwards from a task through "latest finishing"
//! immediate predecessors until it reaches a source. Every bound here is
//! evaluated on a concrete chain of the schedule under test; where a choice
//! exists the chain minimizing the bound is used, found by [`min_cost_chain`].

use log::debug;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grouping::{slice_feasibility, GroupAssignment, WeightedFractional};
use crate::model::{topological_order, Adjacency, Instance, TaskGraph};
use crate::scalar::Scalar;
use crate::scheduler::{Schedule, TieBreakRule, TieBreaker};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TerminalChain {
    /// `c_1 ≺ … ≺ c_N`; the last entry is the anchor.
    pub tasks: Vec<usize>,
}

impl TerminalChain {
    pub fn anchor(&self) -> usize {
        *self.tasks.last().expect("chains are nonempty")
    }

    pub fn links(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.tasks.windows(2).map(|w| (w[0], w[1]))
    }
}

/// Immediate predecessors of `task` finishing last (within tolerance), ascending.
pub fn latest_predecessors<T: Scalar>(s: &Schedule<T>, adj: &Adjacency<T>, task: usize) -> Vec<usize> {
    let last = adj.preds[task]
        .iter()
        .map(|&(p, _)| s.finish[p])
        .fold(T::neg_infinity(), T::max);
    adj.preds[task]
        .iter()
        .filter(|&&(p, _)| s.finish[p] >= last - T::TIME_TOL)
        .map(|&(p, _)| p)
        .collect()
}

/// Tasks finishing at the makespan (within tolerance), ascending.
pub fn latest_tasks<T: Scalar>(s: &Schedule<T>) -> Vec<usize> {
    let last = s.makespan();
    (0..s.n()).filter(|&j| s.finish[j] >= last - T::TIME_TOL).collect()
}

pub fn terminal_chain<T: Scalar>(s: &Schedule<T>, g: &TaskGraph<T>, anchor: Option<usize>, tie: TieBreakRule) -> Result<TerminalChain> {
    let adj = g.adjacency();
    let mut breaker = TieBreaker::new(tie);
    let anchor = match anchor {
        Some(a) if a >= s.n() || a >= g.n() => return Err(Error::UnknownTask { task: a }),
        Some(a) => a,
        None => {
            let last = latest_tasks(s);
            if last.is_empty() {
                return Err(Error::Invalid("empty schedule has no terminal chain".into()));
            }
            breaker.pick(&last, g, &adj)
        }
    };
    let mut tasks = vec![anchor];
    let mut cur = anchor;
    loop {
        let preds = latest_predecessors(s, &adj, cur);
        if preds.is_empty() {
            break;
        }
        cur = breaker.pick(&preds, g, &adj);
        tasks.push(cur);
    }
    tasks.reverse();
    Ok(TerminalChain { tasks })
}

/// `w / s̄`: the data volume over the slowest link from `from_machine` into
/// any machine allowed for the successor.
pub fn link_delay<T: Scalar>(inst: &Instance<T>, f: &GroupAssignment<T>, data: T, from_machine: usize, succ: usize) -> T {
    f.machines_for(succ)
        .iter()
        .map(|&i| inst.comm_delay(data, from_machine, i))
        .fold(T::zero(), T::max)
}

fn edge_data<T: Scalar>(adj: &Adjacency<T>, src: usize, dst: usize) -> T {
    adj.preds[dst]
        .iter()
        .find(|&&(p, _)| p == src)
        .map(|&(_, w)| w)
        .expect("chain links are edges")
}

pub fn chain_comm_time<T: Scalar>(chain: &TerminalChain, s: &Schedule<T>, f: &GroupAssignment<T>, inst: &Instance<T>) -> T {
    let adj = inst.graph.adjacency();
    chain
        .links()
        .map(|(a, b)| link_delay(inst, f, edge_data(&adj, a, b), s.machine[a], b))
        .sum()
}

pub fn chain_processing_time<T: Scalar>(chain: &TerminalChain, s: &Schedule<T>, inst: &Instance<T>) -> T {
    chain.tasks.iter().map(|&j| inst.processing_time(j, s.machine[j])).sum()
}

/// Cheapest terminal chain ending at every task, for additive costs.
#[derive(Clone, Debug)]
pub struct ChainTable<T> {
    pub cost: Vec<T>,
    back: Vec<Option<usize>>,
}

impl<T: Scalar> ChainTable<T> {
    pub fn chain_to(&self, task: usize) -> TerminalChain {
        let mut tasks = vec![task];
        let mut cur = task;
        while let Some(p) = self.back[cur] {
            tasks.push(p);
            cur = p;
        }
        tasks.reverse();
        TerminalChain { tasks }
    }

    /// Cheapest chain among those anchored at a latest-finishing task.
    pub fn best_terminal(&self, s: &Schedule<T>) -> (TerminalChain, T) {
        let mut best: Option<usize> = None;
        for j in latest_tasks(s) {
            if best.map_or(true, |b| self.cost[j] < self.cost[b]) {
                best = Some(j);
            }
        }
        let b = best.expect("nonempty schedule");
        (self.chain_to(b), self.cost[b])
    }
}

/// `cost(j) = node(j) + min over latest-finishing preds p of cost(p) + link(p, j, w_pj)`.
/// Ties go to the lower predecessor id.
pub fn min_cost_chain<T: Scalar>(s: &Schedule<T>, g: &TaskGraph<T>, node: impl Fn(usize) -> T, link: impl Fn(usize, usize, T) -> T) -> Result<ChainTable<T>> {
    let adj = g.adjacency();
    let n = g.n();
    let mut cost = vec![T::zero(); n];
    let mut back = vec![None; n];
    for j in topological_order(g)? {
        let mut best: Option<(usize, T)> = None;
        for p in latest_predecessors(s, &adj, j) {
            let c = cost[p] + link(p, j, edge_data(&adj, p, j));
            if best.map_or(true, |(_, b)| c < b) {
                best = Some((p, c));
            }
        }
        cost[j] = node(j) + best.map_or(T::zero(), |(_, c)| c);
        back[j] = best.map(|(p, _)| p);
    }
    Ok(ChainTable { cost, back })
}

fn comm_table<T: Scalar>(s: &Schedule<T>, inst: &Instance<T>, f: &GroupAssignment<T>) -> Result<ChainTable<T>> {
    min_cost_chain(s, &inst.graph, |_| T::zero(), |p, j, w| link_delay(inst, f, w, s.machine[p], j))
}

pub fn min_comm_terminal_chain<T: Scalar>(s: &Schedule<T>, inst: &Instance<T>, f: &GroupAssignment<T>) -> Result<(TerminalChain, T)> {
    Ok(comm_table(s, inst, f)?.best_terminal(s))
}

/// `C(S, j)` for every task: communication time of the cheapest terminal
/// chain ending at `j` within the prefix of the iteration order up to `j`.
pub fn per_task_chain_comm<T: Scalar>(s: &Schedule<T>, inst: &Instance<T>, f: &GroupAssignment<T>) -> Result<Vec<T>> {
    // Predecessors are committed before their successors, so the prefix
    // up to `j` already holds every chain ending at `j`.
    let table = comm_table(s, inst, f)?;
    log_non_latest_anchors(s);
    Ok(table.cost)
}

fn log_non_latest_anchors<T: Scalar>(s: &Schedule<T>) {
    let mut latest = T::neg_infinity();
    for &j in &s.iteration_order {
        latest = latest.max(s.finish[j]);
        if s.finish[j] < latest - T::TIME_TOL {
            debug!("task {j} is not the latest finisher of its prefix ({} < {latest})", s.finish[j]);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Inequality {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
}

impl Inequality {
    /// `lhs ≤ rhs` up to the relative report tolerance.
    pub fn new<T: Scalar>(name: impl Into<String>, lhs: T, rhs: T) -> Self {
        let slack = rhs - lhs;
        Inequality {
            name: name.into(),
            lhs: lhs.to_f64_lossy(),
            rhs: rhs.to_f64_lossy(),
            slack: slack.to_f64_lossy(),
            pass: slack >= -T::REPORT_TOL * T::one().max(rhs.abs()),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct BoundReport {
    pub kind: String,
    pub objective: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain_processing: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub group_loads: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain_comm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lp_bound: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub chain: Vec<usize>,
    pub inequalities: Vec<Inequality>,
    /// Informational checks that do not affect [`BoundReport::passed`].
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<Inequality>,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.inequalities.iter().all(|q| q.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Inequality> {
        self.inequalities.iter().filter(|q| !q.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Inequality> {
        self.inequalities.iter().find(|q| q.name == name)
    }

    /// Smallest slack over all inequalities.
    pub fn min_slack(&self) -> f64 {
        self.inequalities.iter().map(|q| q.slack).fold(f64::INFINITY, f64::min)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// `D_k`: total demand assigned to group `k` over its total (real) speed.
pub fn group_loads<T: Scalar>(inst: &Instance<T>, f: &GroupAssignment<T>, tasks: impl Iterator<Item = usize>) -> Vec<T> {
    let mut demand = vec![T::zero(); f.groups.k];
    for j in tasks {
        let k = f.group_of_task[j];
        demand[k - 1] = demand[k - 1] + inst.graph.demand(j);
    }
    demand
        .iter()
        .enumerate()
        .map(|(k, &d)| if d.is_zero() { d } else { d / f.groups.actual_speed(k + 1) })
        .collect()
}

struct Decomposition<T> {
    chain: TerminalChain,
    p: T,
    d: Vec<T>,
    c: T,
}

fn decompose<T: Scalar>(s: &Schedule<T>, inst: &Instance<T>, f: &GroupAssignment<T>) -> Result<Decomposition<T>> {
    let (chain, c) = min_comm_terminal_chain(s, inst, f)?;
    Ok(Decomposition {
        p: chain_processing_time(&chain, s, inst),
        d: group_loads(inst, f, 0..inst.n()),
        chain,
        c,
    })
}

/// Idle-time replay along a chain: on every machine allowed for `c_j`, the
/// idle time between `c_{j-1}` finishing and `c_j` starting is at most the
/// link delay, and no allowed machine for `c_1` idles before it starts.
pub fn idle_checks<T: Scalar>(chain: &TerminalChain, s: &Schedule<T>, inst: &Instance<T>, f: &GroupAssignment<T>) -> Vec<Inequality> {
    let adj = inst.graph.adjacency();
    let first = chain.tasks[0];
    let lead_in = f
        .machines_for(first)
        .iter()
        .map(|&i| s.idle_within(i, T::zero(), s.start[first]))
        .fold(T::zero(), T::max);
    let mut out = vec![Inequality::new(format!("idle(0->{first})"), lead_in, T::zero())];
    for (a, b) in chain.links() {
        let bound = link_delay(inst, f, edge_data(&adj, a, b), s.machine[a], b);
        let idle = f
            .machines_for(b)
            .iter()
            .map(|&i| s.idle_within(i, s.finish[a], s.start[b]))
            .fold(T::zero(), T::max);
        out.push(Inequality::new(format!("idle({a}->{b})"), idle, bound));
    }
    out
}

/// Chain communication charged with the slowest incoming edge of each chain
/// task rather than only the chain edge.
fn all_preds_comm<T: Scalar>(chain: &TerminalChain, s: &Schedule<T>, inst: &Instance<T>, f: &GroupAssignment<T>) -> T {
    let adj = inst.graph.adjacency();
    chain
        .links()
        .map(|(_, b)| {
            adj.preds[b]
                .iter()
                .map(|&(p, w)| link_delay(inst, f, w, s.machine[p], b))
                .fold(T::zero(), T::max)
        })
        .sum()
}

/// `makespan ≤ P + ΣD_k + C` on the cheapest-communication terminal chain,
/// plus the idle-time replay along that chain.
pub fn separation_report<T: Scalar>(s: &Schedule<T>, inst: &Instance<T>, f: &GroupAssignment<T>) -> Result<BoundReport> {
    let dec = decompose(s, inst, f)?;
    let sum_d: T = dec.d.iter().copied().sum();
    let makespan = s.makespan();
    let mut inequalities = vec![Inequality::new("separation", makespan, dec.p + sum_d + dec.c)];
    inequalities.extend(idle_checks(&dec.chain, s, inst, f));
    let c_all = all_preds_comm(&dec.chain, s, inst, f);
    let best = min_cost_chain(
        s,
        &inst.graph,
        |j| inst.processing_time(j, s.machine[j]),
        |p, j, w| link_delay(inst, f, w, s.machine[p], j),
    )?
    .best_terminal(s)
    .1;
    Ok(BoundReport {
        kind: "separation".into(),
        objective: makespan.to_f64_lossy(),
        chain_processing: Some(dec.p.to_f64_lossy()),
        group_loads: dec.d.iter().map(|d| d.to_f64_lossy()).collect(),
        chain_comm: Some(dec.c.to_f64_lossy()),
        gamma: Some(f.groups.gamma.to_f64_lossy()),
        k: Some(f.groups.k),
        lp_bound: None,
        chain: dec.chain.tasks,
        inequalities,
        diagnostics: vec![
            Inequality::new("separation_all_preds", makespan, dec.p + sum_d + c_all),
            Inequality::new("separation_best_chain", makespan, best + sum_d),
        ],
    })
}

/// Constants of the makespan guarantee for threshold `theta`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundConstants<T> {
    pub gamma: T,
    pub k: usize,
    pub theta: T,
}

impl<T: Scalar> BoundConstants<T> {
    pub fn new(f: &GroupAssignment<T>, theta: T) -> Self {
        BoundConstants {
            gamma: f.groups.gamma,
            k: f.groups.k,
            theta,
        }
    }

    /// `γ / (1 - θ)`; `2γ` at `θ = 1/2`.
    pub fn chain_factor(&self) -> T {
        self.gamma / (T::one() - self.theta)
    }

    /// `K / θ`; `2K` at `θ = 1/2`.
    pub fn load_factor(&self) -> T {
        T::from_usize_lossy(self.k) / self.theta
    }

    pub fn makespan_factor(&self) -> T {
        self.chain_factor() + self.load_factor()
    }

    /// `16 (γ/(1-θ) + K/θ)`; `32(γ + K)` at `θ = 1/2`.
    pub fn weighted_factor(&self) -> T {
        T::lit(16.0) * self.makespan_factor()
    }
}

pub fn makespan_theorem_report<T: Scalar>(s: &Schedule<T>, inst: &Instance<T>, f: &GroupAssignment<T>, t_star: T, theta: T) -> Result<BoundReport> {
    let dec = decompose(s, inst, f)?;
    let consts = BoundConstants::new(f, theta);
    let sum_d: T = dec.d.iter().copied().sum();
    let makespan = s.makespan();
    let inequalities = vec![
        Inequality::new("chain_processing", dec.p, consts.chain_factor() * t_star),
        Inequality::new("group_loads", sum_d, consts.load_factor() * t_star),
        Inequality::new("makespan", makespan, consts.makespan_factor() * t_star + dec.c),
    ];
    Ok(BoundReport {
        kind: "makespan_theorem".into(),
        objective: makespan.to_f64_lossy(),
        chain_processing: Some(dec.p.to_f64_lossy()),
        group_loads: dec.d.iter().map(|d| d.to_f64_lossy()).collect(),
        chain_comm: Some(dec.c.to_f64_lossy()),
        gamma: Some(consts.gamma.to_f64_lossy()),
        k: Some(consts.k),
        lp_bound: Some(t_star.to_f64_lossy()),
        chain: dec.chain.tasks,
        inequalities,
        diagnostics: Vec::new(),
    })
}

/// Identical-machine guarantee for ETF schedules. The chain used minimizes
/// `((m-1)/m)·P + C'` where `C'` averages each chain edge's delay over all
/// machines. `opt` is an optimal communication-free makespan, if known.
pub fn identical_report<T: Scalar>(s: &Schedule<T>, inst: &Instance<T>, opt: Option<T>) -> Result<BoundReport> {
    let speed = inst.platform.speed(0);
    if inst.platform.machines.iter().any(|mc| mc.speed != speed) {
        return Err(Error::NotIdentical);
    }
    let m = inst.m();
    let mf = T::from_usize_lossy(m);
    let share = (mf - T::one()) / mf;
    let spread = |p: usize, w: T| -> T { (0..m).map(|i| inst.comm_delay(w, s.machine[p], i)).sum::<T>() / mf };
    let table = min_cost_chain(s, &inst.graph, |j| share * inst.graph.demand(j) / speed, |p, _, w| spread(p, w))?;
    let (chain, _) = table.best_terminal(s);
    let adj = inst.graph.adjacency();
    let chain_p = chain_processing_time(&chain, s, inst);
    let c_prime: T = chain.links().map(|(a, b)| spread(a, edge_data(&adj, a, b))).sum();
    let work: T = inst.graph.tasks.iter().map(|t| t.demand).sum::<T>() / speed / mf;
    let makespan = s.makespan();
    let mut inequalities = vec![Inequality::new("intermediate", makespan, work + share * chain_p + c_prime)];
    if let Some(opt) = opt {
        inequalities.push(Inequality::new("graham", makespan, (T::lit(2.0) - T::one() / mf) * opt + c_prime));
    }
    Ok(BoundReport {
        kind: "identical".into(),
        objective: makespan.to_f64_lossy(),
        chain_processing: Some(chain_p.to_f64_lossy()),
        group_loads: Vec::new(),
        chain_comm: Some(c_prime.to_f64_lossy()),
        gamma: None,
        k: None,
        lp_bound: opt.map(|o| o.to_f64_lossy()),
        chain: chain.tasks,
        inequalities,
        diagnostics: Vec::new(),
    })
}

/// Weighted-completion guarantee on a schedule built from the collapsed
/// time-indexed relaxation `wf`.
pub fn weighted_theorem_report<T: Scalar>(s: &Schedule<T>, inst: &Instance<T>, f: &GroupAssignment<T>, wf: &WeightedFractional<T>, theta: T) -> Result<BoundReport> {
    let n = inst.n();
    let consts = BoundConstants::new(f, theta);
    let factor = consts.weighted_factor();
    let table = comm_table(s, inst, f)?;
    log_non_latest_anchors(s);
    let mut inequalities = Vec::new();
    let mut lp_sum = T::zero();
    let mut comm_sum = T::zero();
    let mut pos = vec![0; n];
    for (k, &j) in s.iteration_order.iter().enumerate() {
        pos[j] = k;
    }
    for j in 0..n {
        let chain = table.chain_to(j);
        let p = chain_processing_time(&chain, s, inst);
        let prefix = s.iteration_order[..=pos[j]].iter().copied();
        let d: T = group_loads(inst, f, prefix).into_iter().sum();
        inequalities.push(Inequality::new(format!("per_task[{j}]"), p + d, factor * wf.completion[j]));
        let w = inst.graph.tasks[j].weight;
        lp_sum = lp_sum + w * wf.completion[j];
        comm_sum = comm_sum + w * table.cost[j];
    }
    for j in 0..n {
        let left = wf.tau[wf.q_of[j] - 1];
        inequalities.push(Inequality::new(format!("interval[{j}]"), left, T::lit(2.0) * wf.completion[j]));
    }
    for slice in slice_feasibility(inst, &f.groups, wf) {
        inequalities.push(Inequality::new(format!("slice[{}]", slice.q), T::lit(slice.max_violation), T::lit(slice.allowed)));
    }
    let objective = s.weighted_completion(&inst.graph);
    inequalities.push(Inequality::new("weighted", objective, factor * lp_sum + comm_sum));
    Ok(BoundReport {
        kind: "weighted_theorem".into(),
        objective: objective.to_f64_lossy(),
        chain_processing: None,
        group_loads: group_loads(inst, f, 0..n).iter().map(|d| d.to_f64_lossy()).collect(),
        chain_comm: Some(comm_sum.to_f64_lossy()),
        gamma: Some(consts.gamma.to_f64_lossy()),
        k: Some(consts.k),
        lp_bound: Some(lp_sum.to_f64_lossy()),
        chain: Vec::new(),
        inequalities,
        diagnostics: Vec::new(),
    })
}
