//! Dense two-phase primal simplex.
//!
//! Every variable is implicitly nonnegative and the objective is minimized.
//! Pivoting follows Bland's rule (lowest entering index, lowest leaving basic
//! index among ratio ties), which rules out cycling and keeps the solver
//! deterministic: identical programs produce bit-identical solutions.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// Sparse row: `Σ coeff·x[var] (relation) rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint<T> {
    pub terms: Vec<(usize, T)>,
    pub relation: Relation,
    pub rhs: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram<T> {
    pub num_vars: usize,
    /// Minimized.
    pub objective: Vec<T>,
    pub constraints: Vec<Constraint<T>>,
    /// Optional labels, used by the text dump.
    pub names: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpSolution<T> {
    pub status: LpStatus,
    pub x: Vec<T>,
    pub objective: T,
}

impl<T: Scalar> LinearProgram<T> {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            objective: vec![T::zero(); num_vars],
            constraints: Vec::new(),
            names: Vec::new(),
        }
    }

    pub fn with_names(mut self, names: Vec<String>) -> Self {
        self.names = names;
        self
    }

    pub fn add(&mut self, terms: Vec<(usize, T)>, relation: Relation, rhs: T) {
        self.constraints.push(Constraint {
            terms,
            relation,
            rhs,
        });
    }

    /// Dense-row convenience used by tests and small hand-built programs.
    pub fn add_dense(&mut self, coeffs: &[T], relation: Relation, rhs: T) {
        let terms = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, &c)| (i, c))
            .collect();
        self.add(terms, relation, rhs);
    }

    pub fn check_dimensions(&self) -> Result<()> {
        if self.objective.len() != self.num_vars {
            return Err(Error::Dimension(format!(
                "objective has {} coefficients for {} variables",
                self.objective.len(),
                self.num_vars
            )));
        }
        if !self.names.is_empty() && self.names.len() != self.num_vars {
            return Err(Error::Dimension(format!(
                "{} names for {} variables",
                self.names.len(),
                self.num_vars
            )));
        }
        for (r, c) in self.constraints.iter().enumerate() {
            if let Some(&(v, _)) = c.terms.iter().find(|(v, _)| *v >= self.num_vars) {
                return Err(Error::Dimension(format!(
                    "constraint {r} references variable {v} of {}",
                    self.num_vars
                )));
            }
            if !c.rhs.is_finite() || c.terms.iter().any(|(_, a)| !a.is_finite()) {
                return Err(Error::Dimension(format!("constraint {r} has a non-finite entry")));
            }
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::Dimension("objective has a non-finite entry".into()));
        }
        Ok(())
    }

    /// Largest violation of any constraint (or of nonnegativity) at `x`.
    pub fn max_violation(&self, x: &[T]) -> T {
        let mut worst = x.iter().fold(T::zero(), |w, &v| w.max(-v));
        for c in &self.constraints {
            let lhs: T = c.terms.iter().map(|&(v, a)| a * x[v]).sum();
            let v = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Ge => c.rhs - lhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(v);
        }
        worst
    }

    pub fn evaluate(&self, x: &[T]) -> T {
        self.objective.iter().zip(x).map(|(&c, &v)| c * v).sum()
    }

    fn name(&self, v: usize) -> String {
        self.names.get(v).cloned().unwrap_or_else(|| format!("x{v}"))
    }

    /// CPLEX-style LP text, for cross-checking with external solvers.
    pub fn to_lp_format(&self) -> String {
        let mut out = String::from("\\ generated by getf-core\nMinimize\n obj:");
        let obj: Vec<(usize, T)> = self
            .objective
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, &c)| (i, c))
            .collect();
        write_terms(&mut out, &obj, |v| self.name(v));
        out.push_str("\nSubject To\n");
        for (r, c) in self.constraints.iter().enumerate() {
            let _ = write!(out, " c{r}:");
            write_terms(&mut out, &c.terms, |v| self.name(v));
            let rel = match c.relation {
                Relation::Le => "<=",
                Relation::Eq => "=",
                Relation::Ge => ">=",
            };
            let _ = writeln!(out, " {rel} {}", c.rhs);
        }
        out.push_str("End\n");
        out
    }
}

fn write_terms<T: Scalar>(out: &mut String, terms: &[(usize, T)], name: impl Fn(usize) -> String) {
    if terms.is_empty() {
        out.push_str(" 0");
    }
    for (k, &(v, a)) in terms.iter().enumerate() {
        let sign = match (a < T::zero(), k) {
            (true, _) => " -",
            (false, 0) => "",
            (false, _) => " +",
        };
        let _ = write!(out, "{sign} {} {}", a.abs(), name(v));
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ColKind {
    Structural,
    Slack,
    Artificial,
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    basis: Vec<usize>,
    kinds: Vec<ColKind>,
    /// Reduced costs of the active phase.
    cost: Vec<T>,
    value: T,
}

impl<T: Scalar> Tableau<T> {
    fn cols(&self) -> usize {
        self.kinds.len()
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let p = self.rows[pr][pc];
        for a in self.rows[pr].iter_mut() {
            *a = *a / p;
        }
        self.rhs[pr] = self.rhs[pr] / p;
        self.rows[pr][pc] = T::one();
        let support: Vec<usize> = (0..self.cols())
            .filter(|&c| !self.rows[pr][c].is_zero())
            .collect();
        let (pivot_row, pivot_rhs) = (self.rows[pr].clone(), self.rhs[pr]);
        for r in 0..self.rows.len() {
            if r == pr {
                continue;
            }
            let f = self.rows[r][pc];
            if f.is_zero() {
                continue;
            }
            let row = &mut self.rows[r];
            for &c in &support {
                row[c] = row[c] - f * pivot_row[c];
            }
            row[pc] = T::zero();
            self.rhs[r] = self.rhs[r] - f * pivot_rhs;
            if self.rhs[r] < T::zero() && self.rhs[r] > -T::PIVOT_TOL {
                self.rhs[r] = T::zero();
            }
        }
        let f = self.cost[pc];
        if !f.is_zero() {
            for &c in &support {
                self.cost[c] = self.cost[c] - f * pivot_row[c];
            }
            self.cost[pc] = T::zero();
            self.value = self.value - f * pivot_rhs;
        }
        self.basis[pr] = pc;
    }

    /// Runs Bland-rule pivots until optimal; `false` means unbounded.
    fn optimize(&mut self, allowed: impl Fn(usize) -> bool) -> bool {
        loop {
            let entering = (0..self.cols()).find(|&c| allowed(c) && self.cost[c] < -T::PIVOT_TOL);
            let Some(pc) = entering else { return true };
            let mut best: Option<(usize, T)> = None;
            for r in 0..self.rows.len() {
                let a = self.rows[r][pc];
                if a <= T::PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs[r] / a;
                best = match best {
                    None => Some((r, ratio)),
                    Some((br, bratio)) => {
                        let tie = (ratio - bratio).abs() <= T::PIVOT_TOL * (T::one() + bratio.abs());
                        if ratio < bratio && !tie
                            || tie && self.basis[r] < self.basis[br]
                        {
                            Some((r, ratio))
                        } else {
                            Some((br, bratio))
                        }
                    }
                };
            }
            match best {
                None => return false,
                Some((pr, _)) => self.pivot(pr, pc),
            }
        }
    }

    fn load_cost(&mut self, costs: &[T]) {
        self.cost = costs.to_vec();
        self.value = T::zero();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = costs[b];
            if cb.is_zero() {
                continue;
            }
            for (c, &a) in self.rows[r].iter().enumerate() {
                if !a.is_zero() {
                    self.cost[c] = self.cost[c] - cb * a;
                }
            }
            self.value = self.value - cb * self.rhs[r];
        }
    }
}

/// Solves `lp` to optimality or reports infeasibility / unboundedness.
pub fn solve_lp<T: Scalar>(lp: &LinearProgram<T>) -> Result<LpSolution<T>> {
    lp.check_dimensions()?;
    let n = lp.num_vars;

    // Orient every row so its right-hand side is nonnegative.
    let rows: Vec<(Vec<(usize, T)>, Relation, T)> = lp
        .constraints
        .iter()
        .map(|c| {
            if c.rhs < T::zero() {
                let rel = match c.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (c.terms.iter().map(|&(v, a)| (v, -a)).collect(), rel, -c.rhs)
            } else {
                (c.terms.clone(), c.relation, c.rhs)
            }
        })
        .collect();

    let mut kinds = vec![ColKind::Structural; n];
    let mut extra = Vec::with_capacity(rows.len());
    for (_, rel, _) in &rows {
        match rel {
            Relation::Le => {
                kinds.push(ColKind::Slack);
                extra.push((Some(kinds.len() - 1), None));
            }
            Relation::Ge => {
                kinds.push(ColKind::Slack);
                let surplus = kinds.len() - 1;
                kinds.push(ColKind::Artificial);
                extra.push((Some(surplus), Some(kinds.len() - 1)));
            }
            Relation::Eq => {
                kinds.push(ColKind::Artificial);
                extra.push((None, Some(kinds.len() - 1)));
            }
        }
    }
    let cols = kinds.len();
    let mut tab = Tableau {
        rows: Vec::with_capacity(rows.len()),
        rhs: Vec::with_capacity(rows.len()),
        basis: Vec::with_capacity(rows.len()),
        kinds,
        cost: Vec::new(),
        value: T::zero(),
    };
    for ((terms, rel, b), (slack, art)) in rows.iter().zip(&extra) {
        let mut row = vec![T::zero(); cols];
        for &(v, a) in terms {
            row[v] = row[v] + a;
        }
        let basic = match (rel, slack, art) {
            (Relation::Le, Some(s), _) => {
                row[*s] = T::one();
                *s
            }
            (Relation::Ge, Some(s), Some(a)) => {
                row[*s] = -T::one();
                row[*a] = T::one();
                *a
            }
            (_, _, Some(a)) => {
                row[*a] = T::one();
                *a
            }
            _ => unreachable!("every row has a basic column"),
        };
        tab.rows.push(row);
        tab.rhs.push(*b);
        tab.basis.push(basic);
    }

    // Phase one: drive the artificial mass to zero.
    let has_artificial = tab.kinds.contains(&ColKind::Artificial);
    if has_artificial {
        let phase1: Vec<T> = tab
            .kinds
            .iter()
            .map(|k| if *k == ColKind::Artificial { T::one() } else { T::zero() })
            .collect();
        tab.load_cost(&phase1);
        tab.optimize(|_| true);
        let scale = T::one() + tab.rhs.iter().fold(T::zero(), |m, &b| m.max(b));
        if -tab.value > T::FEAS_TOL * scale {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: vec![T::zero(); n],
                objective: T::nan(),
            });
        }
        // Pivot remaining (zero-valued) artificials out, dropping redundant rows.
        let mut r = 0;
        while r < tab.rows.len() {
            if tab.kinds[tab.basis[r]] == ColKind::Artificial {
                let col = (0..cols).find(|&c| {
                    tab.kinds[c] != ColKind::Artificial && tab.rows[r][c].abs() > T::PIVOT_TOL
                });
                match col {
                    Some(c) => tab.pivot(r, c),
                    None => {
                        tab.rows.remove(r);
                        tab.rhs.remove(r);
                        tab.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
    }

    let mut phase2 = lp.objective.clone();
    phase2.resize(cols, T::zero());
    tab.load_cost(&phase2);
    let kinds = tab.kinds.clone();
    if !tab.optimize(|c| kinds[c] != ColKind::Artificial) {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            x: vec![T::zero(); n],
            objective: T::neg_infinity(),
        });
    }

    let mut x = vec![T::zero(); n];
    for (r, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.rhs[r].max(T::zero());
        }
    }
    if lp.max_violation(&x) > T::FEAS_TOL {
        polish(lp, &rows, &tab, &mut x);
    }
    let objective = lp.evaluate(&x);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        x,
        objective,
    })
}

/// Recomputes the basic solution from the original data by Gaussian
/// elimination, discarding the round-off accumulated in the tableau.
fn polish<T: Scalar>(
    lp: &LinearProgram<T>,
    rows: &[(Vec<(usize, T)>, Relation, T)],
    tab: &Tableau<T>,
    x: &mut [T],
) {
    let n = lp.num_vars;
    // Column index of each row's slack/surplus in the tableau layout.
    let mut slack_of_row = Vec::with_capacity(rows.len());
    let mut col = n;
    for (_, rel, _) in rows {
        match rel {
            Relation::Le => {
                slack_of_row.push(Some((col, T::one())));
                col += 1;
            }
            Relation::Ge => {
                slack_of_row.push(Some((col, -T::one())));
                col += 2;
            }
            Relation::Eq => {
                slack_of_row.push(None);
                col += 1;
            }
        }
    }
    let basis = &tab.basis;
    let k = basis.len();
    let pos: std::collections::HashMap<usize, usize> =
        basis.iter().enumerate().map(|(i, &b)| (b, i)).collect();
    // Original rows restricted to basic columns; redundant rows were dropped,
    // so keep the first k independent ones greedily via elimination.
    let mut mat: Vec<Vec<T>> = Vec::with_capacity(rows.len());
    let mut rhs = Vec::with_capacity(rows.len());
    for (r, (terms, _, b)) in rows.iter().enumerate() {
        let mut row = vec![T::zero(); k];
        for &(v, a) in terms {
            if let Some(&p) = pos.get(&v) {
                row[p] = row[p] + a;
            }
        }
        if let Some((c, s)) = slack_of_row[r] {
            if let Some(&p) = pos.get(&c) {
                row[p] = s;
            }
        }
        mat.push(row);
        rhs.push(*b);
    }
    let Some(sol) = solve_square(mat, rhs, k) else { return };
    for (i, &b) in basis.iter().enumerate() {
        if b < n {
            x[b] = sol[i].max(T::zero());
        }
    }
}

/// Least-squares-free elimination of an over-determined but consistent system
/// with `k` unknowns: partial pivoting over all rows.
fn solve_square<T: Scalar>(mut a: Vec<Vec<T>>, mut b: Vec<T>, k: usize) -> Option<Vec<T>> {
    let rows = a.len();
    let mut pivot_rows = Vec::with_capacity(k);
    let mut used = vec![false; rows];
    for c in 0..k {
        let p = (0..rows)
            .filter(|&r| !used[r])
            .max_by(|&r1, &r2| crate::scalar::cmp(&a[r1][c].abs(), &a[r2][c].abs()))?;
        if a[p][c].abs() <= T::PIVOT_TOL {
            return None;
        }
        used[p] = true;
        pivot_rows.push(p);
        let prow = a[p].clone();
        let pb = b[p];
        for r in 0..rows {
            if r == p || a[r][c].is_zero() {
                continue;
            }
            let f = a[r][c] / prow[c];
            for cc in c..k {
                a[r][cc] = a[r][cc] - f * prow[cc];
            }
            b[r] = b[r] - f * pb;
        }
    }
    Some((0..k).map(|c| b[pivot_rows[c]] / a[pivot_rows[c]][c]).collect())
}
