//! Exact optima for tiny instances, plus cheap lower bounds.
//!
//! The search branches over (ready task, machine) at every step and places the
//! task at its earliest start. Each leaf is one machine assignment together
//! with one topological order, and every per-machine order consistent with
//! precedence arises from some topological order. Placing each task as early
//! as possible is optimal for a fixed assignment and per-machine order because
//! the resulting starts are componentwise minimal, and both objectives are
//! monotone in the finish times. Branches whose partial objective already
//! reaches the incumbent are cut.

use crate::error::{Error, Result};
use crate::model::{Adjacency, Instance};
use crate::scalar::Scalar;
use crate::scheduler::{earliest_start, etf_schedule, PartialSchedule, Schedule, TieBreakRule};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_tasks: usize,
    pub max_machines: usize,
    /// Search nodes visited before giving up.
    pub max_states: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_tasks: 7,
            max_machines: 3,
            max_states: 100_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    Makespan,
    WeightedCompletion,
}

impl Objective {
    pub fn of<T: Scalar>(self, s: &Schedule<T>, inst: &Instance<T>) -> T {
        match self {
            Objective::Makespan => s.makespan(),
            Objective::WeightedCompletion => s.weighted_completion(&inst.graph),
        }
    }
}

struct Search<'a, T> {
    inst: &'a Instance<T>,
    adj: Adjacency<T>,
    objective: Objective,
    missing: Vec<usize>,
    partial: PartialSchedule<T>,
    best: T,
    best_schedule: Option<PartialSchedule<T>>,
    states: u64,
    limit: u64,
}

impl<T: Scalar> Search<'_, T> {
    fn dfs(&mut self, value: T) -> Result<()> {
        self.states += 1;
        if self.states > self.limit {
            return Err(Error::LimitsExceeded(format!("more than {} search states", self.limit)));
        }
        let n = self.inst.n();
        if self.partial.iteration_order.len() == n {
            if value < self.best {
                self.best = value;
                self.best_schedule = Some(self.partial.clone());
            }
            return Ok(());
        }
        for j in 0..n {
            if self.partial.is_scheduled(j) || self.missing[j] > 0 {
                continue;
            }
            for i in 0..self.inst.m() {
                let start = earliest_start(j, i, &self.partial, self.inst, &self.adj)?;
                let finish = start + self.inst.processing_time(j, i);
                let next = match self.objective {
                    Objective::Makespan => value.max(finish),
                    Objective::WeightedCompletion => value + self.inst.graph.tasks[j].weight * finish,
                };
                if next >= self.best {
                    continue;
                }
                let saved = (self.partial.available[i], self.partial.start[j], self.partial.finish[j]);
                self.partial.place(self.inst, j, i, start);
                for &(s, _) in &self.adj.succs[j] {
                    self.missing[s] -= 1;
                }
                let res = self.dfs(next);
                for &(s, _) in &self.adj.succs[j] {
                    self.missing[s] += 1;
                }
                self.partial.iteration_order.pop();
                self.partial.machine[j] = None;
                (self.partial.available[i], self.partial.start[j], self.partial.finish[j]) = saved;
                res?;
            }
        }
        Ok(())
    }
}

/// Optimal objective value and a schedule achieving it. With `ignore_comm`
/// all links are treated as infinitely fast.
pub fn brute_force_schedule<T: Scalar>(inst: &Instance<T>, ignore_comm: bool, objective: Objective, limits: OracleLimits) -> Result<(T, Schedule<T>)> {
    if inst.n() > limits.max_tasks || inst.m() > limits.max_machines {
        return Err(Error::LimitsExceeded(format!(
            "instance has {} tasks on {} machines, limit is {} on {}",
            inst.n(),
            inst.m(),
            limits.max_tasks,
            limits.max_machines
        )));
    }
    let stripped;
    let inst = if ignore_comm {
        stripped = inst.without_communication();
        &stripped
    } else {
        inst
    };
    // A heuristic incumbent; the search only keeps strictly better leaves.
    let incumbent = etf_schedule(inst, TieBreakRule::ByIndex)?;
    let adj = inst.graph.adjacency();
    let mut search = Search {
        inst,
        missing: adj.preds.iter().map(Vec::len).collect(),
        adj,
        objective,
        partial: PartialSchedule::new(inst.n(), inst.m()),
        best: objective.of(&incumbent, inst),
        best_schedule: None,
        states: 0,
        limit: limits.max_states,
    };
    search.dfs(T::zero())?;
    let schedule = search.best_schedule.map_or(incumbent, PartialSchedule::finish);
    Ok((search.best, schedule))
}

/// `(Σp / Σs, longest demand path / s_max)`; both are lower bounds on the
/// communication-free optimum.
pub fn lower_bounds<T: Scalar>(inst: &Instance<T>) -> Result<(T, T)> {
    let total: T = inst.graph.tasks.iter().map(|t| t.demand).sum();
    let work = total / inst.platform.total_speed();
    let adj = inst.graph.adjacency();
    let mut longest = vec![T::zero(); inst.n()];
    for j in crate::model::topological_order(&inst.graph)? {
        let before = adj.preds[j].iter().map(|&(p, _)| longest[p]).fold(T::zero(), T::max);
        longest[j] = before + inst.graph.demand(j);
    }
    let path = longest.into_iter().fold(T::zero(), T::max);
    Ok((work, path / inst.platform.max_speed()))
}
