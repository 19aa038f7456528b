//! Dense two-phase simplex with Bland's anti-cycling rule.
//!
//! Problems are stated as `maximize cᵀx` subject to linear rows and `x ≥ 0`.
//! Sizes here are a few hundred columns at most, so the tableau is kept dense
//! and reduced costs are recomputed from scratch at every pivot.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Pivot and feasibility tolerance.
pub const PIVOT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    LessEq,
    GreaterEq,
    Equal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `maximize objective·x` over `x ≥ 0` subject to `constraints`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LpFailure {
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("pivot limit reached")]
    IterationLimit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ColumnKind {
    Original,
    Slack,
    Artificial,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    kinds: Vec<ColumnKind>,
    pivots: usize,
    max_pivots: usize,
}

enum Step {
    Optimal,
    Pivoted,
}

impl Tableau {
    fn reduced_costs(&self, cost: &[f64], allowed: impl Fn(usize) -> bool) -> Vec<f64> {
        let cols = self.kinds.len();
        let mut reduced = cost.to_vec();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = cost[b];
            if cb != 0.0 {
                for j in 0..cols {
                    reduced[j] -= cb * row[j];
                }
            }
        }
        for (j, r) in reduced.iter_mut().enumerate() {
            if !allowed(j) {
                *r = 0.0;
            }
        }
        reduced
    }

    fn objective(&self, cost: &[f64]) -> f64 {
        self.basis
            .iter()
            .zip(&self.rhs)
            .map(|(&b, &v)| cost[b] * v)
            .sum()
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col];
        for v in self.rows[row].iter_mut() {
            *v /= p;
        }
        self.rhs[row] /= p;
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row];
        for (i, (r, b)) in self.rows.iter_mut().zip(self.rhs.iter_mut()).enumerate() {
            if i == row {
                continue;
            }
            let f = r[col];
            if f != 0.0 {
                for (x, &y) in r.iter_mut().zip(&pivot_row) {
                    *x -= f * y;
                }
                r[col] = 0.0;
                *b -= f * pivot_rhs;
                if libm::fabs(*b) < 1e-15 {
                    *b = 0.0;
                }
            }
        }
        self.basis[row] = col;
        self.pivots += 1;
    }

    /// One Bland's-rule iteration.
    fn step(&mut self, cost: &[f64], allowed: &dyn Fn(usize) -> bool) -> Result<Step, LpFailure> {
        if self.pivots >= self.max_pivots {
            return Err(LpFailure::IterationLimit);
        }
        let reduced = self.reduced_costs(cost, allowed);
        let Some(entering) = reduced.iter().position(|&r| r > PIVOT_TOLERANCE) else {
            return Ok(Step::Optimal);
        };
        let mut leaving: Option<(usize, f64)> = None;
        for (i, row) in self.rows.iter().enumerate() {
            let a = row[entering];
            if a > PIVOT_TOLERANCE {
                let ratio = self.rhs[i] / a;
                leaving = match leaving {
                    None => Some((i, ratio)),
                    Some((best, best_ratio)) => {
                        if ratio < best_ratio - PIVOT_TOLERANCE
                            || (ratio <= best_ratio + PIVOT_TOLERANCE
                                && self.basis[i] < self.basis[best])
                        {
                            Some((i, ratio))
                        } else {
                            Some((best, best_ratio))
                        }
                    }
                };
            }
        }
        let Some((row, _)) = leaving else {
            return Err(LpFailure::Unbounded);
        };
        self.pivot(row, entering);
        Ok(Step::Pivoted)
    }

    fn optimize(&mut self, cost: &[f64], allowed: &dyn Fn(usize) -> bool) -> Result<(), LpFailure> {
        loop {
            match self.step(cost, allowed)? {
                Step::Optimal => return Ok(()),
                Step::Pivoted => {}
            }
        }
    }
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        Self {
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn constrain(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        self
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if n == 0 {
            return Err(Error::InvalidProgram("no variables"));
        }
        if !self.objective.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidProgram("non-finite objective coefficient"));
        }
        for c in &self.constraints {
            if c.coeffs.len() != n {
                return Err(Error::InvalidProgram(
                    "constraint width differs from variable count",
                ));
            }
            if !c.rhs.is_finite() || !c.coeffs.iter().all(|v| v.is_finite()) {
                return Err(Error::InvalidProgram("non-finite constraint coefficient"));
            }
        }
        Ok(())
    }

    /// Solves the program. The outer `Result` rejects malformed programs; the
    /// inner one reports infeasibility and unboundedness as data.
    pub fn solve(&self) -> Result<Result<LpSolution, LpFailure>> {
        self.validate()?;
        Ok(self.solve_valid())
    }

    fn solve_valid(&self) -> Result<LpSolution, LpFailure> {
        let n = self.num_vars();
        let m = self.constraints.len();

        // Column layout: originals, then one slack/surplus per inequality,
        // then one artificial per row that lacks a natural basic column.
        let mut kinds = vec![ColumnKind::Original; n];
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut relations = Vec::with_capacity(m);
        for c in &self.constraints {
            let (sign, relation) = if c.rhs < 0.0 {
                let flipped = match c.relation {
                    Relation::LessEq => Relation::GreaterEq,
                    Relation::GreaterEq => Relation::LessEq,
                    Relation::Equal => Relation::Equal,
                };
                (-1.0, flipped)
            } else {
                (1.0, c.relation)
            };
            rows.push(c.coeffs.iter().map(|v| sign * v).collect::<Vec<_>>());
            rhs.push(sign * c.rhs);
            relations.push(relation);
        }

        let mut basis = vec![usize::MAX; m];
        for (i, relation) in relations.iter().enumerate() {
            let coeff = match relation {
                Relation::LessEq => 1.0,
                Relation::GreaterEq => -1.0,
                Relation::Equal => continue,
            };
            let col = kinds.len();
            kinds.push(ColumnKind::Slack);
            for (k, row) in rows.iter_mut().enumerate() {
                row.push(if k == i { coeff } else { 0.0 });
            }
            if *relation == Relation::LessEq {
                basis[i] = col;
            }
        }
        for i in 0..m {
            if basis[i] != usize::MAX {
                continue;
            }
            let col = kinds.len();
            kinds.push(ColumnKind::Artificial);
            for (k, row) in rows.iter_mut().enumerate() {
                row.push(if k == i { 1.0 } else { 0.0 });
            }
            basis[i] = col;
        }

        let cols = kinds.len();
        let mut tableau = Tableau {
            rows,
            rhs,
            basis,
            kinds,
            pivots: 0,
            max_pivots: 50 * (cols + m + 1),
        };

        // Phase I: maximize −Σ artificials.
        let has_artificials = tableau.kinds.contains(&ColumnKind::Artificial);
        if has_artificials {
            let phase1: Vec<f64> = tableau
                .kinds
                .iter()
                .map(|k| {
                    if *k == ColumnKind::Artificial {
                        -1.0
                    } else {
                        0.0
                    }
                })
                .collect();
            tableau.optimize(&phase1, &|_| true)?;
            if tableau.objective(&phase1) < -PIVOT_TOLERANCE {
                return Err(LpFailure::Infeasible);
            }
            self.expel_artificials(&mut tableau);
        }

        // Phase II on the original objective, artificial columns frozen.
        let mut cost = vec![0.0; cols];
        cost[..n].copy_from_slice(&self.objective);
        let kinds = tableau.kinds.clone();
        tableau.optimize(&cost, &|j| kinds[j] != ColumnKind::Artificial)?;

        let mut x = vec![0.0; n];
        for (&b, &v) in tableau.basis.iter().zip(&tableau.rhs) {
            if b < n {
                x[b] = v.max(0.0);
            }
        }
        let objective = self.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        Ok(LpSolution {
            x,
            objective,
            pivots: tableau.pivots,
        })
    }

    /// Pivots basic artificials (at zero level) onto real columns, dropping
    /// rows that turn out to be redundant.
    fn expel_artificials(&self, tableau: &mut Tableau) {
        let mut i = 0;
        while i < tableau.basis.len() {
            if tableau.kinds[tableau.basis[i]] != ColumnKind::Artificial {
                i += 1;
                continue;
            }
            let replacement = (0..tableau.kinds.len()).find(|&j| {
                tableau.kinds[j] != ColumnKind::Artificial
                    && libm::fabs(tableau.rows[i][j]) > PIVOT_TOLERANCE
            });
            match replacement {
                Some(j) => {
                    tableau.pivot(i, j);
                    i += 1;
                }
                None => {
                    tableau.rows.remove(i);
                    tableau.rhs.remove(i);
                    tableau.basis.remove(i);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn solve(lp: &LinearProgram) -> Result<LpSolution, LpFailure> {
        lp.solve().unwrap()
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), value 36.
        let mut lp = LinearProgram::new(vec![3.0, 5.0]);
        lp.constrain(vec![1.0, 0.0], Relation::LessEq, 4.0)
            .constrain(vec![0.0, 2.0], Relation::LessEq, 12.0)
            .constrain(vec![3.0, 2.0], Relation::LessEq, 18.0);
        let s = solve(&lp).unwrap();
        assert!((s.objective - 36.0).abs() < 1e-9);
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn equality_and_greater_rows() {
        // max −x − y, x + y = 1, x ≥ 0.25 → value −1 with x ≥ 0.25.
        let mut lp = LinearProgram::new(vec![-1.0, -1.0]);
        lp.constrain(vec![1.0, 1.0], Relation::Equal, 1.0)
            .constrain(vec![1.0, 0.0], Relation::GreaterEq, 0.25);
        let s = solve(&lp).unwrap();
        assert!((s.objective + 1.0).abs() < 1e-9);
        assert!(s.x[0] >= 0.25 - 1e-9);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.constrain(vec![1.0], Relation::LessEq, 1.0).constrain(
            vec![1.0],
            Relation::GreaterEq,
            2.0,
        );
        assert_eq!(solve(&lp), Err(LpFailure::Infeasible));

        let mut lp = LinearProgram::new(vec![1.0, 0.0]);
        lp.constrain(vec![-1.0, 1.0], Relation::LessEq, 1.0);
        assert_eq!(solve(&lp), Err(LpFailure::Unbounded));
    }

    #[test]
    fn negative_rhs_rows_are_flipped() {
        // −x ≤ −3 means x ≥ 3; min x → 3.
        let mut lp = LinearProgram::new(vec![-1.0]);
        lp.constrain(vec![-1.0], Relation::LessEq, -3.0);
        let s = solve(&lp).unwrap();
        assert!((s.x[0] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn redundant_equalities_are_dropped() {
        let mut lp = LinearProgram::new(vec![1.0, 2.0]);
        lp.constrain(vec![1.0, 1.0], Relation::Equal, 1.0)
            .constrain(vec![2.0, 2.0], Relation::Equal, 2.0);
        let s = solve(&lp).unwrap();
        assert!((s.objective - 2.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's example, which cycles under the largest-coefficient rule.
        let mut lp = LinearProgram::new(vec![0.75, -150.0, 0.02, -6.0]);
        lp.constrain(vec![0.25, -60.0, -0.04, 9.0], Relation::LessEq, 0.0)
            .constrain(vec![0.5, -90.0, -0.02, 3.0], Relation::LessEq, 0.0)
            .constrain(vec![0.0, 0.0, 1.0, 0.0], Relation::LessEq, 1.0);
        let s = solve(&lp).unwrap();
        assert!((s.objective - 0.05).abs() < 1e-9);
    }

    #[test]
    fn malformed_programs_are_errors() {
        let mut lp = LinearProgram::new(vec![1.0, 1.0]);
        lp.constrain(vec![1.0], Relation::LessEq, 1.0);
        assert!(lp.solve().is_err());
        assert!(LinearProgram::new(vec![]).solve().is_err());
    }

    /// Brute-force oracle for two-variable LPs with `≤` rows: evaluate every
    /// intersection of two boundary lines (axes included) that is feasible.
    fn vertex_oracle(obj: [f64; 2], rows: &[([f64; 2], f64)]) -> Option<f64> {
        let mut lines: Vec<([f64; 2], f64)> = rows.to_vec();
        lines.push(([1.0, 0.0], 0.0));
        lines.push(([0.0, 1.0], 0.0));
        let feasible = |x: f64, y: f64| {
            x >= -1e-9 && y >= -1e-9 && rows.iter().all(|(a, b)| a[0] * x + a[1] * y <= b + 1e-9)
        };
        let mut best: Option<f64> = None;
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                let ([a1, b1], c1) = lines[i];
                let ([a2, b2], c2) = lines[j];
                let det = a1 * b2 - a2 * b1;
                if det.abs() < 1e-12 {
                    continue;
                }
                let x = (c1 * b2 - c2 * b1) / det;
                let y = (a1 * c2 - a2 * c1) / det;
                if feasible(x, y) {
                    let v = obj[0] * x + obj[1] * y;
                    best = Some(best.map_or(v, |b: f64| b.max(v)));
                }
            }
        }
        best
    }

    proptest! {
        // Bounded feasible region: nonnegative rows with positive rhs plus a
        // box, so the optimum is always attained at a vertex.
        #[test]
        fn matches_vertex_enumeration(
            obj in proptest::array::uniform2(-5.0..5.0f64),
            rows in proptest::collection::vec(
                (proptest::array::uniform2(-3.0..3.0f64), 0.5..10.0f64), 0..4),
        ) {
            let mut all = rows.clone();
            all.push(([1.0, 1.0], 20.0));
            let mut lp = LinearProgram::new(obj.to_vec());
            for (a, b) in &all {
                lp.constrain(a.to_vec(), Relation::LessEq, *b);
            }
            let oracle = vertex_oracle(obj, &all).unwrap();
            let s = solve(&lp).unwrap();
            prop_assert!((s.objective - oracle).abs() < 1e-7, "{} vs {}", s.objective, oracle);
        }
    }
}
