//! End-to-end runs: relaxation, group assignment, GETF and the bound reports.

use crate::analysis::{makespan_theorem_report, separation_report, weighted_theorem_report, BoundReport};
use crate::error::{Error, Result};
use crate::grouping::{
    assign_groups_makespan, assign_groups_weighted, partition_machines, solve_makespan_relaxation,
    solve_weighted_relaxation, GroupAssignment, GroupingConfig, MachineGroups, MakespanFractional,
    WeightedFractional,
};
use crate::model::{normalize_demands, Instance};
use crate::scalar::Scalar;
use crate::scheduler::{getf_schedule, Schedule, TieBreakRule};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PipelineConfig<T> {
    /// Tail-mass threshold of the group assignment rule, in `(0, 1)`.
    pub theta: T,
    pub gamma: Option<T>,
    pub tie: TieBreakRule,
}

impl<T: Scalar> Default for PipelineConfig<T> {
    fn default() -> Self {
        PipelineConfig {
            theta: T::lit(0.5),
            gamma: None,
            tie: TieBreakRule::ByIndex,
        }
    }
}

impl<T: Scalar> PipelineConfig<T> {
    fn check(&self) -> Result<()> {
        if !(self.theta > T::zero() && self.theta < T::one()) {
            return Err(Error::Invalid(format!("theta {} outside (0, 1)", self.theta)));
        }
        if let Some(g) = self.gamma {
            if !(g > T::one() && g.is_finite()) {
                return Err(Error::Invalid(format!("gamma {g} must exceed 1")));
            }
        }
        Ok(())
    }

    fn groups(&self, inst: &Instance<T>) -> MachineGroups<T> {
        partition_machines(&inst.platform, &GroupingConfig { gamma: self.gamma })
    }
}

#[derive(Clone, Debug)]
pub struct MakespanRun<T> {
    pub relaxation: MakespanFractional<T>,
    pub assignment: GroupAssignment<T>,
    pub schedule: Schedule<T>,
    pub separation: BoundReport,
    pub theorem: BoundReport,
}

pub fn run_makespan<T: Scalar>(inst: &Instance<T>, cfg: &PipelineConfig<T>) -> Result<MakespanRun<T>> {
    cfg.check()?;
    let groups = cfg.groups(inst);
    let relaxation = solve_makespan_relaxation(inst, &groups)?;
    let assignment = assign_groups_makespan(&relaxation, &groups, cfg.theta)?;
    let schedule = getf_schedule(inst, &assignment, cfg.tie)?;
    let separation = separation_report(&schedule, inst, &assignment)?;
    let theorem = makespan_theorem_report(&schedule, inst, &assignment, relaxation.t_star, cfg.theta)?;
    Ok(MakespanRun {
        relaxation,
        assignment,
        schedule,
        separation,
        theorem,
    })
}

#[derive(Clone, Debug)]
pub struct WeightedRun<T> {
    /// Instance with demands scaled so every processing time is at least one.
    pub normalized: Instance<T>,
    pub scale: T,
    pub relaxation: WeightedFractional<T>,
    pub lp_objective: T,
    pub assignment: GroupAssignment<T>,
    /// GETF on the normalized instance; the bound reports refer to it.
    pub normalized_schedule: Schedule<T>,
    /// GETF on the original instance with the same assignment.
    pub schedule: Schedule<T>,
    pub separation: BoundReport,
    pub theorem: BoundReport,
}

pub fn run_weighted<T: Scalar>(inst: &Instance<T>, cfg: &PipelineConfig<T>) -> Result<WeightedRun<T>> {
    cfg.check()?;
    let (normalized, scale) = normalize_demands(inst);
    let groups = cfg.groups(&normalized);
    let (relaxation, lp_objective) = solve_weighted_relaxation(&normalized, &groups)?;
    let assignment = assign_groups_weighted(&relaxation, &groups, cfg.theta)?;
    let normalized_schedule = getf_schedule(&normalized, &assignment, cfg.tie)?;
    let separation = separation_report(&normalized_schedule, &normalized, &assignment)?;
    let theorem = weighted_theorem_report(&normalized_schedule, &normalized, &assignment, &relaxation, cfg.theta)?;
    let schedule = getf_schedule(inst, &assignment, cfg.tie)?;
    Ok(WeightedRun {
        normalized,
        scale,
        relaxation,
        lp_objective,
        assignment,
        normalized_schedule,
        schedule,
        separation,
        theorem,
    })
}
