//! Scheduling instances: a task DAG plus a platform of related machines.
//!
//! The JSON layout is flat (`tasks`, `edges`, `machines`, `comm_speed`); a
//! `null` communication speed means the link is infinitely fast, i.e. the
//! delay over it is zero regardless of the data volume.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Task<T> {
    pub id: usize,
    /// Processing units; the task runs for `demand / speed` on a machine.
    pub demand: T,
    #[serde(default)]
    pub weight: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Edge<T> {
    pub src: usize,
    pub dst: usize,
    /// Units of data shipped from `src` to `dst`.
    pub data: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TaskGraph<T> {
    pub tasks: Vec<Task<T>>,
    pub edges: Vec<Edge<T>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Machine<T> {
    pub id: usize,
    pub speed: T,
}

/// Data units per time unit between two machines.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", from = "Option<T>", into = "Option<T>")]
pub enum CommSpeed<T> {
    Finite(T),
    Infinite,
}

impl<T> From<Option<T>> for CommSpeed<T> {
    fn from(v: Option<T>) -> Self {
        match v {
            Some(s) => CommSpeed::Finite(s),
            None => CommSpeed::Infinite,
        }
    }
}

impl<T> From<CommSpeed<T>> for Option<T> {
    fn from(v: CommSpeed<T>) -> Self {
        match v {
            CommSpeed::Finite(s) => Some(s),
            CommSpeed::Infinite => None,
        }
    }
}

impl<T: Scalar> CommSpeed<T> {
    /// Time needed to ship `data` units over this link.
    pub fn delay(self, data: T) -> T {
        match self {
            CommSpeed::Finite(s) => data / s,
            CommSpeed::Infinite => T::zero(),
        }
    }

    /// Numeric value with `Infinite` mapped to +inf, for min/max comparisons.
    pub fn as_scalar(self) -> T {
        match self {
            CommSpeed::Finite(s) => s,
            CommSpeed::Infinite => T::infinity(),
        }
    }

    /// Inverse of [`CommSpeed::as_scalar`].
    pub fn from_scalar(s: T) -> Self {
        if s.is_infinite() {
            CommSpeed::Infinite
        } else {
            CommSpeed::Finite(s)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Platform<T> {
    pub machines: Vec<Machine<T>>,
    /// Row = source machine, column = destination machine.
    pub comm_speed: Vec<Vec<CommSpeed<T>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Instance<T> {
    #[serde(flatten)]
    pub graph: TaskGraph<T>,
    #[serde(flatten)]
    pub platform: Platform<T>,
}

/// Predecessor and successor lists with the data volume of each edge.
#[derive(Clone, Debug)]
pub struct Adjacency<T> {
    pub preds: Vec<Vec<(usize, T)>>,
    pub succs: Vec<Vec<(usize, T)>>,
}

impl<T: Scalar> TaskGraph<T> {
    /// Graph with tasks `0..demands.len()` of zero weight.
    pub fn from_demands(demands: &[T], edges: &[(usize, usize, T)]) -> Self {
        TaskGraph {
            tasks: demands
                .iter()
                .enumerate()
                .map(|(id, &demand)| Task {
                    id,
                    demand,
                    weight: T::zero(),
                })
                .collect(),
            edges: edges
                .iter()
                .map(|&(src, dst, data)| Edge { src, dst, data })
                .collect(),
        }
    }

    pub fn with_weights(mut self, weights: &[T]) -> Self {
        for (t, &w) in self.tasks.iter_mut().zip(weights) {
            t.weight = w;
        }
        self
    }

    pub fn n(&self) -> usize {
        self.tasks.len()
    }

    /// Assumes edge endpoints are in range; see [`validate_instance`].
    pub fn adjacency(&self) -> Adjacency<T> {
        let n = self.n();
        let mut preds = vec![Vec::new(); n];
        let mut succs = vec![Vec::new(); n];
        for e in &self.edges {
            preds[e.dst].push((e.src, e.data));
            succs[e.src].push((e.dst, e.data));
        }
        for list in preds.iter_mut().chain(succs.iter_mut()) {
            list.sort_by_key(|&(j, _)| j);
        }
        Adjacency { preds, succs }
    }

    pub fn demand(&self, task: usize) -> T {
        self.tasks[task].demand
    }
}

impl<T: Scalar> Platform<T> {
    /// Platform whose links all run at `cross`, except machine-local transfers at `local`.
    pub fn uniform(speeds: &[T], cross: CommSpeed<T>, local: CommSpeed<T>) -> Self {
        let m = speeds.len();
        Platform {
            machines: speeds
                .iter()
                .enumerate()
                .map(|(id, &speed)| Machine { id, speed })
                .collect(),
            comm_speed: (0..m)
                .map(|a| (0..m).map(|b| if a == b { local } else { cross }).collect())
                .collect(),
        }
    }

    pub fn with_matrix(speeds: &[T], comm_speed: Vec<Vec<CommSpeed<T>>>) -> Self {
        Platform {
            machines: speeds
                .iter()
                .enumerate()
                .map(|(id, &speed)| Machine { id, speed })
                .collect(),
            comm_speed,
        }
    }

    pub fn m(&self) -> usize {
        self.machines.len()
    }

    pub fn speed(&self, machine: usize) -> T {
        self.machines[machine].speed
    }

    pub fn link(&self, from: usize, to: usize) -> CommSpeed<T> {
        self.comm_speed[from][to]
    }

    pub fn max_speed(&self) -> T {
        self.machines
            .iter()
            .map(|m| m.speed)
            .fold(T::zero(), T::max)
    }

    pub fn total_speed(&self) -> T {
        self.machines.iter().map(|m| m.speed).sum()
    }

    /// Same platform with every link set to infinite speed.
    pub fn without_communication(&self) -> Self {
        let m = self.m();
        Platform {
            machines: self.machines.clone(),
            comm_speed: vec![vec![CommSpeed::Infinite; m]; m],
        }
    }
}

impl<T: Scalar> Instance<T> {
    /// Builds an instance and rejects it if validation reports any violation.
    pub fn new(graph: TaskGraph<T>, platform: Platform<T>) -> Result<Self> {
        let inst = Instance { graph, platform };
        validate_instance(&inst).into_result()?;
        Ok(inst)
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn m(&self) -> usize {
        self.platform.m()
    }

    /// Processing time of `task` on `machine`.
    pub fn processing_time(&self, task: usize, machine: usize) -> T {
        self.graph.demand(task) / self.platform.speed(machine)
    }

    /// Communication delay for edge data `data` from machine `from` to machine `to`.
    pub fn comm_delay(&self, data: T, from: usize, to: usize) -> T {
        self.platform.link(from, to).delay(data)
    }

    /// Same instance with every communication delay removed.
    pub fn without_communication(&self) -> Self {
        Instance {
            graph: self.graph.clone(),
            platform: self.platform.without_communication(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }
}

/// One validation finding, tagged with the JSON path it concerns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub field: String,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Finding>,
    pub warnings: Vec<Finding>,
    /// Set when the violations include a cycle; holds a task on it.
    #[serde(skip)]
    pub cycle_task: Option<usize>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    fn violation(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Finding {
            field: field.into(),
            message: message.into(),
        });
    }

    fn warning(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.warnings.push(Finding {
            field: field.into(),
            message: message.into(),
        });
    }

    /// First violation as an error, cycles mapped to [`Error::Cycle`].
    pub fn into_result(self) -> Result<()> {
        if let Some(task) = self.cycle_task {
            return Err(Error::Cycle { task });
        }
        match self.violations.into_iter().next() {
            None => Ok(()),
            Some(f) => Err(Error::schema(f.field, f.message)),
        }
    }
}

pub fn validate_instance<T: Scalar>(inst: &Instance<T>) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = inst.graph.tasks.len();
    let m = inst.platform.machines.len();

    let mut seen = vec![false; n];
    for (pos, t) in inst.graph.tasks.iter().enumerate() {
        if t.id >= n || seen[t.id] {
            report.violation(
                format!("tasks[{pos}].id"),
                format!("task ids must be unique and in 0..{n}, got {}", t.id),
            );
        } else {
            seen[t.id] = true;
        }
        if !(t.demand.is_finite() && t.demand > T::zero()) {
            report.violation(
                format!("tasks[{pos}].demand"),
                format!("nonpositive demand, task {}", t.id),
            );
        }
        if !(t.weight.is_finite() && t.weight >= T::zero()) {
            report.violation(
                format!("tasks[{pos}].weight"),
                format!("negative weight, task {}", t.id),
            );
        }
    }
    let ids_ok = report.violations.iter().all(|f| !f.field.ends_with(".id"));
    let mut ordered = true;
    for (pos, t) in inst.graph.tasks.iter().enumerate() {
        ordered &= t.id == pos;
    }
    if ids_ok && !ordered {
        report.violation("tasks", "tasks must be listed in id order");
    }

    let mut pairs = BTreeSet::new();
    let mut edges_ok = true;
    for (pos, e) in inst.graph.edges.iter().enumerate() {
        if e.src >= n || e.dst >= n {
            report.violation(
                format!("edges[{pos}]"),
                format!("edge ({} -> {}) references a missing task", e.src, e.dst),
            );
            edges_ok = false;
            continue;
        }
        if e.src == e.dst {
            report.violation(format!("edges[{pos}]"), format!("self-edge on task {}", e.src));
            edges_ok = false;
        }
        if !pairs.insert((e.src, e.dst)) {
            report.violation(
                format!("edges[{pos}]"),
                format!("parallel edge ({} -> {})", e.src, e.dst),
            );
        }
        if !(e.data.is_finite() && e.data >= T::zero()) {
            report.violation(
                format!("edges[{pos}].data"),
                format!("negative data on edge ({} -> {})", e.src, e.dst),
            );
        } else if e.data == T::zero() {
            report.warning(
                format!("edges[{pos}].data"),
                format!("zero-data edge ({} -> {})", e.src, e.dst),
            );
        }
    }

    if m == 0 {
        report.violation("machines", "at least one machine is required");
    }
    let mut seen = vec![false; m];
    for (pos, mach) in inst.platform.machines.iter().enumerate() {
        if mach.id != pos || seen[pos] {
            report.violation(
                format!("machines[{pos}].id"),
                format!("machine ids must be 0..{m} in order, got {}", mach.id),
            );
        } else {
            seen[pos] = true;
        }
        if !(mach.speed.is_finite() && mach.speed > T::zero()) {
            report.violation(
                format!("machines[{pos}].speed"),
                format!("nonpositive speed, machine {}", mach.id),
            );
        }
    }
    if inst.platform.comm_speed.len() != m {
        report.violation(
            "comm_speed",
            format!("expected {m} rows, got {}", inst.platform.comm_speed.len()),
        );
    }
    for (a, row) in inst.platform.comm_speed.iter().enumerate() {
        if row.len() != m {
            report.violation(
                format!("comm_speed[{a}]"),
                format!("expected {m} columns, got {}", row.len()),
            );
        }
        for (b, s) in row.iter().enumerate() {
            if let CommSpeed::Finite(v) = *s {
                if !(v.is_finite() && v > T::zero()) {
                    report.violation(
                        format!("comm_speed[{a}][{b}]"),
                        "communication speed must be positive or null",
                    );
                }
            }
        }
    }

    if edges_ok {
        if let Err(Error::Cycle { task }) = topological_order(&inst.graph) {
            report.violation("edges", format!("cycle detected involving task {task}"));
            report.cycle_task = Some(task);
        } else if n > 1 && components(&inst.graph) > 1 {
            report.warning("edges", "task graph is disconnected");
        }
    }
    report
}

fn components<T: Scalar>(g: &TaskGraph<T>) -> usize {
    let n = g.n();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut count = n;
    for e in &g.edges {
        let (a, b) = (find(&mut parent, e.src), find(&mut parent, e.dst));
        if a != b {
            parent[a] = b;
            count -= 1;
        }
    }
    count
}

/// Kahn's algorithm, always releasing the lowest available id first.
pub fn topological_order<T: Scalar>(g: &TaskGraph<T>) -> Result<Vec<usize>> {
    let n = g.n();
    let mut indeg = vec![0usize; n];
    let mut succs = vec![Vec::new(); n];
    for e in &g.edges {
        if e.src >= n || e.dst >= n {
            return Err(Error::UnknownTask {
                task: e.src.max(e.dst),
            });
        }
        indeg[e.dst] += 1;
        succs[e.src].push(e.dst);
    }
    let mut heap: BinaryHeap<Reverse<usize>> =
        (0..n).filter(|&j| indeg[j] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(j)) = heap.pop() {
        order.push(j);
        for &s in &succs[j] {
            indeg[s] -= 1;
            if indeg[s] == 0 {
                heap.push(Reverse(s));
            }
        }
    }
    if order.len() < n {
        let task = (0..n).find(|&j| indeg[j] > 0).unwrap_or(0);
        return Err(Error::Cycle { task });
    }
    Ok(order)
}

pub fn parse_instance<T: Scalar>(text: &str) -> Result<Instance<T>> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    for key in ["tasks", "edges", "machines", "comm_speed"] {
        match value.get(key) {
            Some(v) if v.is_array() => {}
            Some(_) => return Err(Error::schema(key, "expected an array")),
            None => return Err(Error::schema(key, "missing field")),
        }
    }
    let inst: Instance<T> =
        serde_json::from_value(value).map_err(|e| Error::schema("instance", e.to_string()))?;
    validate_instance(&inst).into_result()?;
    Ok(inst)
}

/// Scales demands so that every task needs at least one time unit on every machine.
///
/// Returns the scaled instance and the factor applied (1 when nothing changed).
pub fn normalize_demands<T: Scalar>(inst: &Instance<T>) -> (Instance<T>, T) {
    let fastest = inst.platform.max_speed();
    let min_ratio = inst
        .graph
        .tasks
        .iter()
        .map(|t| t.demand / fastest)
        .fold(T::infinity(), T::min);
    if !min_ratio.is_finite() || min_ratio >= T::one() - T::TIME_TOL {
        return (inst.clone(), T::one());
    }
    let scale = T::one() / min_ratio;
    let mut out = inst.clone();
    for t in &mut out.graph.tasks {
        t.demand = t.demand * scale;
    }
    (out, scale)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) const EXAMPLE1: &str = r#"{
        "tasks": [{"id":0,"demand":1.0,"weight":0.0},{"id":1,"demand":1.0,"weight":0.0},
                  {"id":2,"demand":1.0,"weight":0.0},{"id":3,"demand":3.0,"weight":1.0}],
        "edges": [{"src":0,"dst":2,"data":2.0},{"src":0,"dst":3,"data":2.0},
                  {"src":1,"dst":2,"data":2.0},{"src":1,"dst":3,"data":1.0}],
        "machines": [{"id":0,"speed":1.0},{"id":1,"speed":1.0}],
        "comm_speed": [[2.0,1.0],[1.0,2.0]]
    }"#;

    fn single(demand: f64) -> Instance<f64> {
        Instance::new(
            TaskGraph::from_demands(&[demand], &[]),
            Platform::uniform(&[1.0], CommSpeed::Infinite, CommSpeed::Infinite),
        )
        .unwrap()
    }

    #[test]
    fn parses_example_one() {
        let inst: Instance<f64> = parse_instance(EXAMPLE1).unwrap();
        assert_eq!(inst.n(), 4);
        assert_eq!(inst.m(), 2);
        assert_eq!(inst.platform.link(0, 0), CommSpeed::Finite(2.0));
        assert!(validate_instance(&inst).is_clean());
    }

    #[test]
    fn parses_minimal_instance_and_null_speed() {
        let text = r#"{"tasks":[{"id":0,"demand":1}],"edges":[],
            "machines":[{"id":0,"speed":1}],"comm_speed":[[null]]}"#;
        let inst: Instance<f64> = parse_instance(text).unwrap();
        assert_eq!(inst.platform.link(0, 0), CommSpeed::Infinite);
        assert_eq!(inst.graph.tasks[0].weight, 0.0);
    }

    #[test]
    fn two_cycle_is_rejected() {
        let text = r#"{"tasks":[{"id":0,"demand":1},{"id":1,"demand":1}],
            "edges":[{"src":0,"dst":1,"data":0},{"src":1,"dst":0,"data":0}],
            "machines":[{"id":0,"speed":1}],"comm_speed":[[null]]}"#;
        assert!(matches!(parse_instance::<f64>(text), Err(Error::Cycle { .. })));
    }

    #[test]
    fn errors_name_the_field() {
        let text = r#"{"tasks":[{"id":0,"demand":0}],"edges":[],
            "machines":[{"id":0,"speed":1}],"comm_speed":[[null]]}"#;
        match parse_instance::<f64>(text) {
            Err(Error::Schema { field, reason }) => {
                assert_eq!(field, "tasks[0].demand");
                assert_eq!(reason, "nonpositive demand, task 0");
            }
            other => panic!("unexpected {other:?}"),
        }
        let text = r#"{"tasks":[],"edges":[],"machines":[{"id":0,"speed":-1}],"comm_speed":[[1]]}"#;
        assert!(
            matches!(parse_instance::<f64>(text), Err(Error::Schema { field, .. }) if field == "machines[0].speed")
        );
        assert!(matches!(parse_instance::<f64>("{not json"), Err(Error::Json(_))));
        assert!(matches!(
            parse_instance::<f64>(r#"{"tasks":[],"edges":[],"machines":[]}"#),
            Err(Error::Schema { field, .. }) if field == "comm_speed"
        ));
    }

    #[test]
    fn self_and_parallel_edges_rejected() {
        let mut inst = single(1.0);
        inst.graph.edges.push(Edge { src: 0, dst: 0, data: 1.0 });
        assert!(!validate_instance(&inst).is_clean());
        let mut g = TaskGraph::from_demands(&[1.0, 1.0], &[(0, 1, 1.0), (0, 1, 2.0)]);
        g.tasks[1].weight = 0.0;
        let inst = Instance {
            graph: g,
            platform: Platform::uniform(&[1.0], CommSpeed::Infinite, CommSpeed::Infinite),
        };
        let report = validate_instance(&inst);
        assert!(report.violations[0].message.contains("parallel edge"));
    }

    #[test]
    fn zero_demand_is_a_violation() {
        let mut inst = single(1.0);
        inst.graph.tasks[0].demand = 0.0;
        let report = validate_instance(&inst);
        assert_eq!(report.violations[0].message, "nonpositive demand, task 0");
    }

    #[test]
    fn disconnected_graph_only_warns() {
        let inst = Instance::new(
            TaskGraph::from_demands(&[1.0, 1.0, 1.0, 1.0], &[(0, 1, 0.0), (2, 3, 1.0)]),
            Platform::uniform(&[1.0, 1.0], CommSpeed::Finite(1.0), CommSpeed::Infinite),
        )
        .unwrap();
        let report = validate_instance(&inst);
        assert!(report.is_clean());
        assert!(report.warnings.iter().any(|w| w.message.contains("disconnected")));
        assert!(report.warnings.iter().any(|w| w.message.contains("zero-data")));
    }

    #[test]
    fn topological_orders() {
        let chain = TaskGraph::from_demands(&[1.0, 1.0, 1.0], &[(1, 2, 0.0), (0, 1, 0.0)]);
        assert_eq!(topological_order(&chain).unwrap(), vec![0, 1, 2]);
        let ex: Instance<f64> = parse_instance(EXAMPLE1).unwrap();
        assert_eq!(topological_order(&ex.graph).unwrap(), vec![0, 1, 2, 3]);
        let empty = TaskGraph::<f64>::from_demands(&[], &[]);
        assert!(topological_order(&empty).unwrap().is_empty());
        let rev = TaskGraph::from_demands(&[1.0, 1.0, 1.0], &[(2, 0, 0.0)]);
        assert_eq!(topological_order(&rev).unwrap(), vec![1, 2, 0]);
    }

    #[test]
    fn normalization_examples() {
        let inst = Instance::new(
            TaskGraph::from_demands(&[0.5, 2.0], &[]),
            Platform::uniform(&[2.0], CommSpeed::Infinite, CommSpeed::Infinite),
        )
        .unwrap();
        let (norm, scale) = normalize_demands(&inst);
        assert_eq!(scale, 4.0);
        assert_eq!(norm.graph.tasks[0].demand, 2.0);
        assert_eq!(norm.graph.tasks[1].demand, 8.0);
        let (_, again) = normalize_demands(&norm);
        assert_eq!(again, 1.0);

        let ex: Instance<f64> = parse_instance(EXAMPLE1).unwrap();
        let (norm, scale) = normalize_demands(&ex);
        assert_eq!(scale, 1.0);
        assert_eq!(norm, ex);
        assert_eq!(normalize_demands(&single(3.0)).1, 1.0);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let ex: Instance<f64> = parse_instance(EXAMPLE1).unwrap();
        let back: Instance<f64> = parse_instance(&ex.to_json()).unwrap();
        assert_eq!(back, ex);
        assert_eq!(back.to_json(), ex.to_json());
    }

    #[test]
    fn single_precision_instance() {
        let ex: Instance<f32> = parse_instance(EXAMPLE1).unwrap();
        assert_eq!(ex.processing_time(3, 0), 3.0f32);
        assert_eq!(ex.comm_delay(2.0, 0, 1), 2.0f32);
    }
}
