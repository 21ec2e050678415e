//! Speed-band machine groups and the LP-driven group assignment rules.
//!
//! Machines slower than `s_max / m` are discarded. The rest are rescaled so
//! the fastest runs at speed `m`, then banded into `[γ^{k-1}, γ^k)` for
//! `k = 1..K` (the top band is closed). Rescaled speeds are only used for the
//! banding; every LP and every load bound works in the instance's own speed
//! units so that LP optima stay comparable with real schedules.

use std::collections::BTreeMap;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram, LpSolution, LpStatus, Relation};
use crate::model::{Instance, Platform, TaskGraph};
use crate::scalar::Scalar;

/// Overrides for [`partition_machines`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GroupingConfig<T> {
    /// Band ratio; must exceed 1. Defaults to `max(2, log₂m / log₂log₂m)`.
    pub gamma: Option<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MachineGroups<T> {
    pub gamma: T,
    /// Number of bands `K`.
    pub k: usize,
    /// Retained machine ids, ascending.
    pub retained: Vec<usize>,
    /// Factor mapping real speeds onto the banding scale (fastest retained = m).
    pub rescale: T,
    /// Band of each machine (1-based), `None` when discarded.
    pub group_of: Vec<Option<usize>>,
    /// `s(M_k)` on the rescaled scale, indexed by `k - 1`.
    pub group_speed: Vec<T>,
    /// `s(M_k)` in real speed units, indexed by `k - 1`.
    pub group_speed_actual: Vec<T>,
    members: Vec<Vec<usize>>,
}

impl<T: Scalar> MachineGroups<T> {
    pub fn members(&self, k: usize) -> &[usize] {
        &self.members[k - 1]
    }

    pub fn speed(&self, k: usize) -> T {
        self.group_speed[k - 1]
    }

    pub fn actual_speed(&self, k: usize) -> T {
        self.group_speed_actual[k - 1]
    }

    /// Every machine in one group: the identical-machines / ETF setting.
    pub fn single_group(platform: &Platform<T>) -> Self {
        let m = platform.m();
        let rescale = T::from_usize_lossy(m) / platform.max_speed();
        let all: Vec<usize> = (0..m).collect();
        let actual = platform.total_speed();
        MachineGroups {
            gamma: default_gamma(m),
            k: 1,
            retained: all.clone(),
            rescale,
            group_of: vec![Some(1); m],
            group_speed: vec![actual * rescale],
            group_speed_actual: vec![actual],
            members: vec![all],
        }
    }

    fn from_bands(platform: &Platform<T>, gamma: T, k: usize, group_of: Vec<Option<usize>>) -> Self {
        let m = platform.m();
        let retained: Vec<usize> = (0..m).filter(|&i| group_of[i].is_some()).collect();
        let fastest = retained
            .iter()
            .map(|&i| platform.speed(i))
            .fold(T::zero(), T::max);
        let rescale = T::from_usize_lossy(m) / fastest;
        let mut members = vec![Vec::new(); k];
        let mut group_speed_actual = vec![T::zero(); k];
        for &i in &retained {
            let g = group_of[i].expect("retained");
            members[g - 1].push(i);
            group_speed_actual[g - 1] = group_speed_actual[g - 1] + platform.speed(i);
        }
        MachineGroups {
            gamma,
            k,
            retained,
            rescale,
            group_of,
            group_speed: group_speed_actual.iter().map(|&s| s * rescale).collect(),
            group_speed_actual,
            members,
        }
    }

    pub fn discarded(&self) -> Vec<usize> {
        (0..self.group_of.len())
            .filter(|&i| self.group_of[i].is_none())
            .collect()
    }
}

pub fn default_gamma<T: Scalar>(m: usize) -> T {
    let two = T::lit(2.0);
    if m <= 2 {
        return two;
    }
    let lg = T::from_usize_lossy(m).log2();
    two.max(lg / lg.log2())
}

pub fn partition_machines<T: Scalar>(platform: &Platform<T>, config: &GroupingConfig<T>) -> MachineGroups<T> {
    let m = platform.m();
    let mf = T::from_usize_lossy(m);
    let gamma = config.gamma.unwrap_or_else(|| default_gamma(m));
    // K = ⌈log_γ m⌉, taken as the least k ≥ 1 with γ^k ≥ m.
    let mut k = 1usize;
    while gamma.powi(k as i32) * (T::one() + T::TIME_TOL) < mf {
        k += 1;
    }
    let fastest = platform.max_speed();
    let rescale = mf / fastest;
    let group_of = (0..m)
        .map(|i| {
            let s = platform.speed(i);
            if s < fastest / mf {
                return None;
            }
            let sigma = s * rescale;
            let mut g = 1;
            while g < k && sigma >= gamma.powi(g as i32) * (T::one() - T::TIME_TOL) {
                g += 1;
            }
            Some(g)
        })
        .collect();
    MachineGroups::from_bands(platform, gamma, k, group_of)
}

/// Task → group mapping `f(·)` together with the groups it refers to.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupAssignment<T> {
    pub groups: MachineGroups<T>,
    /// 1-based group of each task.
    pub group_of_task: Vec<usize>,
    /// Threshold index `ℓ_j` behind each choice (1 for the trivial assignment).
    pub thresholds: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct GroupAssignmentDoc<T> {
    gamma: T,
    #[serde(rename = "K")]
    k: usize,
    groups: BTreeMap<usize, usize>,
    tasks: BTreeMap<usize, usize>,
}

impl<T: Scalar> GroupAssignment<T> {
    /// Everything in one group over all machines.
    pub fn trivial(platform: &Platform<T>, n: usize) -> Self {
        GroupAssignment {
            groups: MachineGroups::single_group(platform),
            group_of_task: vec![1; n],
            thresholds: vec![1; n],
        }
    }

    pub fn machines_for(&self, task: usize) -> &[usize] {
        self.groups.members(self.group_of_task[task])
    }

    pub fn allows(&self, task: usize, machine: usize) -> bool {
        self.groups.group_of.get(machine).copied().flatten() == Some(self.group_of_task[task])
    }

    pub fn to_json(&self) -> String {
        let doc = GroupAssignmentDoc {
            gamma: self.groups.gamma,
            k: self.groups.k,
            groups: self
                .groups
                .retained
                .iter()
                .map(|&i| (i, self.groups.group_of[i].expect("retained")))
                .collect(),
            tasks: self.group_of_task.iter().copied().enumerate().collect(),
        };
        serde_json::to_string_pretty(&doc).expect("assignment serializes")
    }

    pub fn from_json(text: &str, platform: &Platform<T>, n: usize) -> Result<Self> {
        let doc: GroupAssignmentDoc<T> = serde_json::from_str(text)?;
        let m = platform.m();
        let mut group_of = vec![None; m];
        for (&i, &g) in &doc.groups {
            if i >= m {
                return Err(Error::UnknownMachine { machine: i });
            }
            if g == 0 || g > doc.k {
                return Err(Error::schema(format!("groups.{i}"), format!("group {g} outside 1..{}", doc.k)));
            }
            group_of[i] = Some(g);
        }
        let mut group_of_task = vec![0; n];
        for (&j, &g) in &doc.tasks {
            if j >= n {
                return Err(Error::UnknownTask { task: j });
            }
            if g == 0 || g > doc.k {
                return Err(Error::schema(format!("tasks.{j}"), format!("group {g} outside 1..{}", doc.k)));
            }
            group_of_task[j] = g;
        }
        if let Some(j) = group_of_task.iter().position(|&g| g == 0) {
            return Err(Error::schema("tasks", format!("task {j} has no group")));
        }
        let groups = MachineGroups::from_bands(platform, doc.gamma, doc.k, group_of);
        if let Some(j) = (0..n).find(|&j| groups.members(group_of_task[j]).is_empty()) {
            return Err(Error::schema("tasks", format!("task {j} is mapped to an empty group")));
        }
        Ok(GroupAssignment {
            groups,
            group_of_task,
            thresholds: vec![1; n],
        })
    }
}

/// Threshold rule shared by the makespan and weighted assignments.
///
/// `fractions[i][j]` is the share of task `j` on machine `i` (indexed by
/// machine id). For each task, `ℓ_j` is the largest band whose tail mass
/// reaches `theta`; the task goes to the band of largest total speed among
/// `ℓ_j..=K`, ties towards the faster (higher) band.
pub fn assign_groups<T: Scalar>(fractions: &[Vec<T>], groups: &MachineGroups<T>, theta: T) -> Result<GroupAssignment<T>> {
    let n = fractions.first().map_or(0, Vec::len);
    let mut group_of_task = Vec::with_capacity(n);
    let mut thresholds = Vec::with_capacity(n);
    for j in 0..n {
        let mass = band_mass(fractions, groups, j);
        let mut tail = T::zero();
        let mut ell = None;
        for k in (1..=groups.k).rev() {
            tail = tail + mass[k - 1];
            if tail >= theta - T::TIME_TOL {
                ell = Some(k);
                break;
            }
        }
        let ell = ell.ok_or(Error::NoGroup { task: j })?;
        let mut best = ell;
        for k in ell..=groups.k {
            if groups.speed(k) >= groups.speed(best) * (T::one() - T::TIME_TOL) {
                best = k;
            }
        }
        group_of_task.push(best);
        thresholds.push(ell);
    }
    Ok(GroupAssignment {
        groups: groups.clone(),
        group_of_task,
        thresholds,
    })
}

/// `x_{M_k, j}` for every band.
pub fn band_mass<T: Scalar>(fractions: &[Vec<T>], groups: &MachineGroups<T>, task: usize) -> Vec<T> {
    let mut mass = vec![T::zero(); groups.k];
    for (i, row) in fractions.iter().enumerate() {
        if let Some(Some(g)) = groups.group_of.get(i) {
            mass[g - 1] = mass[g - 1] + row[task];
        }
    }
    mass
}

/// Makespan relaxation together with its variable layout.
#[derive(Clone, Debug)]
pub struct MakespanLp<T> {
    pub lp: LinearProgram<T>,
    retained: Vec<usize>,
    m: usize,
    n: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MakespanFractional<T> {
    /// `x[i][j]` by machine id (zero rows for discarded machines).
    pub x: Vec<Vec<T>>,
    pub completion: Vec<T>,
    pub t_star: T,
}

pub fn build_makespan_lp<T: Scalar>(inst: &Instance<T>, groups: &MachineGroups<T>) -> MakespanLp<T> {
    let n = inst.n();
    let retained = groups.retained.clone();
    let r = retained.len();
    let xv = |ri: usize, j: usize| ri * n + j;
    let cv = |j: usize| r * n + j;
    let tv = r * n + n;
    let mut names = Vec::with_capacity(tv + 1);
    for &i in &retained {
        for j in 0..n {
            names.push(format!("x_{i}_{j}"));
        }
    }
    names.extend((0..n).map(|j| format!("C_{j}")));
    names.push("T".into());
    let mut lp = LinearProgram::new(tv + 1).with_names(names);
    lp.objective[tv] = T::one();

    let proc_terms = |j: usize| -> Vec<(usize, T)> {
        let p = inst.graph.demand(j);
        retained
            .iter()
            .enumerate()
            .map(|(ri, &i)| (xv(ri, j), p / inst.platform.speed(i)))
            .collect()
    };
    for j in 0..n {
        lp.add((0..r).map(|ri| (xv(ri, j), T::one())).collect(), Relation::Eq, T::one());
    }
    for j in 0..n {
        let mut t = proc_terms(j);
        t.push((cv(j), -T::one()));
        lp.add(t, Relation::Le, T::zero());
    }
    for e in &inst.graph.edges {
        let mut t = proc_terms(e.dst);
        t.push((cv(e.src), T::one()));
        t.push((cv(e.dst), -T::one()));
        lp.add(t, Relation::Le, T::zero());
    }
    for (ri, &i) in retained.iter().enumerate() {
        let s = inst.platform.speed(i);
        let mut t: Vec<(usize, T)> = (0..n).map(|j| (xv(ri, j), inst.graph.demand(j) / s)).collect();
        t.push((tv, -T::one()));
        lp.add(t, Relation::Le, T::zero());
    }
    for j in 0..n {
        lp.add(vec![(cv(j), T::one()), (tv, -T::one())], Relation::Le, T::zero());
    }
    MakespanLp {
        lp,
        retained,
        m: inst.m(),
        n,
    }
}

impl<T: Scalar> MakespanLp<T> {
    pub fn extract(&self, sol: &LpSolution<T>) -> Result<MakespanFractional<T>> {
        if sol.status != LpStatus::Optimal {
            return Err(Error::LpStatus(format!("{:?}", sol.status)));
        }
        let (n, r) = (self.n, self.retained.len());
        let mut x = vec![vec![T::zero(); n]; self.m];
        for (ri, &i) in self.retained.iter().enumerate() {
            x[i].copy_from_slice(&sol.x[ri * n..(ri + 1) * n]);
        }
        Ok(MakespanFractional {
            x,
            completion: sol.x[r * n..r * n + n].to_vec(),
            t_star: sol.x[r * n + n],
        })
    }

    /// Candidate point for this program, in its variable layout.
    pub fn point(&self, x: &[Vec<T>], completion: &[T], t: T) -> Vec<T> {
        let mut v = Vec::with_capacity(self.lp.num_vars);
        for &i in &self.retained {
            v.extend_from_slice(&x[i]);
        }
        v.extend_from_slice(completion);
        v.push(t);
        v
    }
}

pub fn solve_makespan_relaxation<T: Scalar>(inst: &Instance<T>, groups: &MachineGroups<T>) -> Result<MakespanFractional<T>> {
    let built = build_makespan_lp(inst, groups);
    built.extract(&solve_lp(&built.lp)?)
}

pub fn assign_groups_makespan<T: Scalar>(sol: &MakespanFractional<T>, groups: &MachineGroups<T>, theta: T) -> Result<GroupAssignment<T>> {
    assign_groups(&sol.x, groups, theta)
}

/// Time-indexed relaxation together with its variable layout.
#[derive(Clone, Debug)]
pub struct WeightedLp<T> {
    pub lp: LinearProgram<T>,
    pub q_max: usize,
    retained: Vec<usize>,
    m: usize,
    n: usize,
}

/// Number of doubling intervals: `max(1, ⌈log₂(Σp / min retained speed)⌉)`.
pub fn interval_count<T: Scalar>(inst: &Instance<T>, groups: &MachineGroups<T>) -> usize {
    let total: T = inst.graph.tasks.iter().map(|t| t.demand).sum();
    let slowest = groups
        .retained
        .iter()
        .map(|&i| inst.platform.speed(i))
        .fold(T::infinity(), T::min);
    let horizon = total / slowest;
    let mut q = 1usize;
    while T::lit(2.0).powi(q as i32) * (T::one() + T::TIME_TOL) < horizon {
        q += 1;
    }
    q
}

pub fn build_weighted_lp<T: Scalar>(inst: &Instance<T>, groups: &MachineGroups<T>) -> WeightedLp<T> {
    let n = inst.n();
    let q_max = interval_count(inst, groups);
    let retained = groups.retained.clone();
    let r = retained.len();
    let xv = |ri: usize, j: usize, q: usize| (ri * n + j) * q_max + (q - 1);
    let cv = |j: usize| r * n * q_max + j;
    let nv = r * n * q_max + n;
    let tau = |q: usize| T::lit(2.0).powi(q as i32);
    let mut names = Vec::with_capacity(nv);
    for &i in &retained {
        for j in 0..n {
            for q in 1..=q_max {
                names.push(format!("x_{i}_{j}_{q}"));
            }
        }
    }
    names.extend((0..n).map(|j| format!("C_{j}")));
    let mut lp = LinearProgram::new(nv).with_names(names);
    for j in 0..n {
        lp.objective[cv(j)] = inst.graph.tasks[j].weight;
    }

    let proc_terms = |j: usize| -> Vec<(usize, T)> {
        let p = inst.graph.demand(j);
        let mut t = Vec::with_capacity(r * q_max);
        for (ri, &i) in retained.iter().enumerate() {
            let c = p / inst.platform.speed(i);
            t.extend((1..=q_max).map(|q| (xv(ri, j, q), c)));
        }
        t
    };
    for j in 0..n {
        let mut t = Vec::with_capacity(r * q_max);
        for ri in 0..r {
            t.extend((1..=q_max).map(|q| (xv(ri, j, q), T::one())));
        }
        lp.add(t, Relation::Eq, T::one());
    }
    for j in 0..n {
        let mut t = proc_terms(j);
        t.push((cv(j), -T::one()));
        lp.add(t, Relation::Le, T::zero());
    }
    for e in &inst.graph.edges {
        let mut t = proc_terms(e.dst);
        t.push((cv(e.src), T::one()));
        t.push((cv(e.dst), -T::one()));
        lp.add(t, Relation::Le, T::zero());
    }
    for e in &inst.graph.edges {
        for q in 1..=q_max {
            let mut t = Vec::with_capacity(2 * r * q);
            for ri in 0..r {
                for s in 1..=q {
                    t.push((xv(ri, e.dst, s), T::one()));
                    t.push((xv(ri, e.src, s), -T::one()));
                }
            }
            lp.add(t, Relation::Le, T::zero());
        }
    }
    // Completion no earlier than the left end of the chosen interval; the
    // strict form is not representable, the non-strict one is what is used.
    for j in 0..n {
        let mut t = Vec::with_capacity(r * q_max + 1);
        for ri in 0..r {
            t.extend((1..=q_max).map(|q| (xv(ri, j, q), tau(q - 1))));
        }
        t.push((cv(j), -T::one()));
        lp.add(t, Relation::Le, T::zero());
    }
    for (ri, &i) in retained.iter().enumerate() {
        let s = inst.platform.speed(i);
        for q in 1..=q_max {
            let mut t = Vec::with_capacity(n * q);
            for j in 0..n {
                let c = inst.graph.demand(j) / s;
                t.extend((1..=q).map(|u| (xv(ri, j, u), c)));
            }
            lp.add(t, Relation::Le, tau(q));
        }
    }
    WeightedLp {
        lp,
        q_max,
        retained,
        m: inst.m(),
        n,
    }
}

/// Raw time-indexed optimum: `x[i][j][q-1]` by machine id, and `C*`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeIndexed<T> {
    pub q_max: usize,
    pub x: Vec<Vec<Vec<T>>>,
    pub completion: Vec<T>,
}

impl<T: Scalar> WeightedLp<T> {
    pub fn extract(&self, sol: &LpSolution<T>) -> Result<TimeIndexed<T>> {
        if sol.status != LpStatus::Optimal {
            return Err(Error::LpStatus(format!("{:?}", sol.status)));
        }
        let (n, q_max, r) = (self.n, self.q_max, self.retained.len());
        let mut x = vec![vec![vec![T::zero(); q_max]; n]; self.m];
        for (ri, &i) in self.retained.iter().enumerate() {
            for j in 0..n {
                let base = (ri * n + j) * q_max;
                x[i][j].copy_from_slice(&sol.x[base..base + q_max]);
            }
        }
        Ok(TimeIndexed {
            q_max,
            x,
            completion: sol.x[r * n * q_max..r * n * q_max + n].to_vec(),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedFractional<T> {
    pub q_max: usize,
    /// `τ_q = 2^q` for `q = 0..=Q`.
    pub tau: Vec<T>,
    pub x: Vec<Vec<Vec<T>>>,
    pub completion: Vec<T>,
    /// Interval estimate `q(j)`, 1-based.
    pub q_of: Vec<usize>,
    /// Mass of each task captured in intervals `1..=q(j)`.
    pub alpha: Vec<T>,
    /// Collapsed assignment `x̃[i][j]`, by machine id.
    pub x_tilde: Vec<Vec<T>>,
    /// Tasks whose `q(j)` hit the clamp at `Q`.
    pub clamped: Vec<usize>,
}

/// Fills `q(j)`, `α_j` and the collapsed assignment `x̃` from a time-indexed optimum.
pub fn collapse_time_indexed<T: Scalar>(raw: TimeIndexed<T>) -> Result<WeightedFractional<T>> {
    let TimeIndexed { q_max, x, completion } = raw;
    let m = x.len();
    let n = completion.len();
    let half = T::lit(0.5);
    let tau: Vec<T> = (0..=q_max).map(|q| T::lit(2.0).powi(q as i32)).collect();
    let mut q_of = Vec::with_capacity(n);
    let mut alpha = Vec::with_capacity(n);
    let mut clamped = Vec::new();
    let mut x_tilde = vec![vec![T::zero(); n]; m];
    for j in 0..n {
        let mut cum = T::zero();
        let mut chosen = None;
        let mut cum_at = Vec::with_capacity(q_max);
        for q in 1..=q_max {
            cum = cum + (0..m).map(|i| x[i][j][q - 1]).sum::<T>();
            cum_at.push(cum);
            if chosen.is_none() && cum >= half - T::TIME_TOL && completion[j].le_tol(tau[q]) {
                chosen = Some(q);
            }
        }
        let q = match chosen {
            Some(q) => q,
            None => {
                warn!(
                    "task {j}: interval estimate clamped to Q={q_max} (C* = {})",
                    completion[j]
                );
                clamped.push(j);
                q_max
            }
        };
        let a = cum_at.get(q - 1).copied().unwrap_or_else(T::zero);
        if a < T::lit(1e-9) {
            return Err(Error::ZeroMass {
                task: j,
                alpha: a.to_f64_lossy(),
            });
        }
        for i in 0..m {
            let s: T = x[i][j][..q].iter().copied().sum();
            x_tilde[i][j] = s / a;
        }
        q_of.push(q);
        alpha.push(a);
    }
    Ok(WeightedFractional {
        q_max,
        tau,
        x,
        completion,
        q_of,
        alpha,
        x_tilde,
        clamped,
    })
}

pub fn solve_weighted_relaxation<T: Scalar>(inst: &Instance<T>, groups: &MachineGroups<T>) -> Result<(WeightedFractional<T>, T)> {
    let built = build_weighted_lp(inst, groups);
    let sol = solve_lp(&built.lp)?;
    let frac = collapse_time_indexed(built.extract(&sol)?)?;
    Ok((frac, sol.objective))
}

pub fn assign_groups_weighted<T: Scalar>(sol: &WeightedFractional<T>, groups: &MachineGroups<T>, theta: T) -> Result<GroupAssignment<T>> {
    assign_groups(&sol.x_tilde, groups, theta)
}

/// Outcome of substituting a collapsed slice into the makespan relaxation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SliceFeasibility {
    pub q: usize,
    pub tasks: Vec<usize>,
    pub max_violation: f64,
    /// Violation accepted as round-off at this slice's scale.
    pub allowed: f64,
    pub feasible: bool,
}

/// For every interval `q`, checks that `(x̃, 2C*, 2^{q+1})` restricted to the
/// tasks with `q(j) = q` satisfies the makespan relaxation built over exactly
/// those tasks.
pub fn slice_feasibility<T: Scalar>(inst: &Instance<T>, groups: &MachineGroups<T>, wf: &WeightedFractional<T>) -> Vec<SliceFeasibility> {
    let mut out = Vec::new();
    for q in 1..=wf.q_max {
        let tasks: Vec<usize> = (0..inst.n()).filter(|&j| wf.q_of[j] == q).collect();
        if tasks.is_empty() {
            continue;
        }
        let sub = sub_instance(inst, &tasks);
        let built = build_makespan_lp(&sub, groups);
        let x: Vec<Vec<T>> = wf
            .x_tilde
            .iter()
            .map(|row| tasks.iter().map(|&j| row[j]).collect())
            .collect();
        let c: Vec<T> = tasks.iter().map(|&j| T::lit(2.0) * wf.completion[j]).collect();
        let t = T::lit(2.0).powi(q as i32 + 1);
        let point = built.point(&x, &c, t);
        let viol = built.lp.max_violation(&point);
        let allowed = T::REPORT_TOL * (T::one() + t);
        out.push(SliceFeasibility {
            q,
            tasks,
            max_violation: viol.to_f64_lossy(),
            allowed: allowed.to_f64_lossy(),
            feasible: viol <= allowed,
        });
    }
    out
}

/// Induced subinstance on `tasks` (ids remapped to positions in `tasks`).
pub fn sub_instance<T: Scalar>(inst: &Instance<T>, tasks: &[usize]) -> Instance<T> {
    let mut index = vec![usize::MAX; inst.n()];
    for (k, &j) in tasks.iter().enumerate() {
        index[j] = k;
    }
    let demands: Vec<T> = tasks.iter().map(|&j| inst.graph.demand(j)).collect();
    let edges: Vec<(usize, usize, T)> = inst
        .graph
        .edges
        .iter()
        .filter(|e| index[e.src] != usize::MAX && index[e.dst] != usize::MAX)
        .map(|e| (index[e.src], index[e.dst], e.data))
        .collect();
    let weights: Vec<T> = tasks.iter().map(|&j| inst.graph.tasks[j].weight).collect();
    Instance {
        graph: TaskGraph::from_demands(&demands, &edges).with_weights(&weights),
        platform: inst.platform.clone(),
    }
}
