//! Dense two-phase simplex for small linear programs.
//!
//! Problems are stated over nonnegative variables:
//!
//! ```text
//! min c·x   s.t.   A_eq x = b_eq,   A_le x <= b_le,   x >= 0.
//! ```
//!
//! Bland's rule is used throughout, so the method terminates on degenerate
//! instances. All data is dense; instances in this crate stay below ~60
//! variables and ~60 rows.

use super::LP_TOL;

#[derive(Debug, Clone)]
pub struct Lp {
    pub num_vars: usize,
    /// Objective coefficients over the structural variables. May be empty for
    /// pure feasibility problems (treated as zero).
    pub objective: Vec<f64>,
    pub eq: Vec<(Vec<f64>, f64)>,
    pub le: Vec<(Vec<f64>, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

impl Lp {
    pub fn feasibility(num_vars: usize) -> Self {
        Lp {
            num_vars,
            objective: vec![0.0; num_vars],
            eq: Vec::new(),
            le: Vec::new(),
        }
    }

    pub fn minimize(num_vars: usize, objective: Vec<f64>) -> Self {
        assert_eq!(objective.len(), num_vars);
        Lp {
            num_vars,
            objective,
            eq: Vec::new(),
            le: Vec::new(),
        }
    }

    pub fn push_eq(&mut self, row: Vec<f64>, rhs: f64) {
        assert_eq!(row.len(), self.num_vars);
        self.eq.push((row, rhs));
    }

    pub fn push_le(&mut self, row: Vec<f64>, rhs: f64) {
        assert_eq!(row.len(), self.num_vars);
        self.le.push((row, rhs));
    }
}

struct Tableau {
    /// m x (ncols + 1) rows; last column is the RHS.
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    ncols: usize,
    n_structural: usize,
    art_start: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.ncols]
    }

    /// One simplex phase: minimize `cost` (length ncols) from the current
    /// basic feasible tableau. `banned` columns never enter.
    fn run_phase(&mut self, cost: &[f64], banned_from: usize) -> PhaseOutcome {
        let m = self.rows.len();
        loop {
            // Reduced costs z_j = c_j - c_B^T B^{-1} A_j, computed from the
            // current tableau rows.
            let mut reduced: Vec<f64> = cost.to_vec();
            for i in 0..m {
                let cb = cost[self.basis[i]];
                if cb != 0.0 {
                    for j in 0..self.ncols {
                        reduced[j] -= cb * self.rows[i][j];
                    }
                }
            }
            // Bland: smallest eligible index with negative reduced cost.
            let entering = (0..self.ncols)
                .find(|&j| j < banned_from && reduced[j] < -LP_TOL && !self.is_basic(j));
            let entering = match entering {
                Some(j) => j,
                None => return PhaseOutcome::Optimal,
            };
            // Ratio test, ties broken by smallest basis variable (Bland).
            let mut leaving: Option<(usize, f64)> = None;
            for i in 0..m {
                let a = self.rows[i][entering];
                if a > LP_TOL {
                    let ratio = self.rhs(i) / a;
                    match leaving {
                        None => leaving = Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - LP_TOL
                                || (ratio < lr + LP_TOL && self.basis[i] < self.basis[li])
                            {
                                leaving = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            let (pivot_row, _) = match leaving {
                Some(l) => l,
                None => return PhaseOutcome::Unbounded,
            };
            self.pivot(pivot_row, entering);
        }
    }

    fn is_basic(&self, j: usize) -> bool {
        self.basis.contains(&j)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col];
        for v in self.rows[row].iter_mut() {
            *v /= p;
        }
        for i in 0..self.rows.len() {
            if i == row {
                continue;
            }
            let f = self.rows[i][col];
            if f != 0.0 {
                for j in 0..=self.ncols {
                    let v = self.rows[row][j];
                    self.rows[i][j] -= f * v;
                }
            }
        }
        self.basis[row] = col;
    }
}

enum PhaseOutcome {
    Optimal,
    Unbounded,
}

/// Solve a small dense LP. See the module docs for the problem form.
pub fn solve(lp: &Lp) -> LpOutcome {
    let n = lp.num_vars;
    let n_slack = lp.le.len();
    let m = lp.eq.len() + lp.le.len();
    let art_start = n + n_slack;
    let ncols = art_start + m;

    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(m);
    for (i, (row, rhs)) in lp.eq.iter().chain(lp.le.iter()).enumerate() {
        let is_le = i >= lp.eq.len();
        let mut r = vec![0.0; ncols + 1];
        r[..n].copy_from_slice(row);
        if is_le {
            r[n + (i - lp.eq.len())] = 1.0;
        }
        r[ncols] = *rhs;
        if r[ncols] < 0.0 {
            for v in r.iter_mut() {
                *v = -*v;
            }
        }
        r[art_start + i] = 1.0;
        rows.push(r);
    }

    let mut t = Tableau {
        rows,
        basis: (art_start..art_start + m).collect(),
        ncols,
        n_structural: n,
        art_start,
    };

    // Phase 1: minimize the sum of artificials.
    let mut phase1_cost = vec![0.0; ncols];
    for c in phase1_cost[art_start..].iter_mut() {
        *c = 1.0;
    }
    match t.run_phase(&phase1_cost, ncols) {
        PhaseOutcome::Optimal => {}
        PhaseOutcome::Unbounded => unreachable!("phase 1 objective is bounded below by 0"),
    }
    let phase1_value: f64 = (0..m)
        .filter(|&i| t.basis[i] >= art_start)
        .map(|i| t.rhs(i))
        .sum();
    if phase1_value > 1e-7 {
        return LpOutcome::Infeasible;
    }
    // Pivot basic artificials (at level 0) out where possible.
    for i in 0..m {
        if t.basis[i] >= t.art_start {
            if let Some(j) = (0..t.art_start).find(|&j| t.rows[i][j].abs() > 1e-7) {
                t.pivot(i, j);
            }
        }
    }

    // Phase 2: original objective; artificial columns may not re-enter.
    let mut phase2_cost = vec![0.0; ncols];
    if !lp.objective.is_empty() {
        phase2_cost[..n].copy_from_slice(&lp.objective);
    }
    let outcome = t.run_phase(&phase2_cost, t.art_start);
    match outcome {
        PhaseOutcome::Unbounded => LpOutcome::Unbounded,
        PhaseOutcome::Optimal => {
            let mut x = vec![0.0; t.n_structural];
            for i in 0..m {
                if t.basis[i] < t.n_structural {
                    x[t.basis[i]] = t.rhs(i);
                }
            }
            let value = lp
                .objective
                .iter()
                .zip(&x)
                .map(|(c, v)| c * v)
                .sum::<f64>();
            LpOutcome::Optimal { x, value }
        }
    }
}

/// Phase-1 feasibility: `Some(x)` for a feasible point, `None` otherwise.
pub fn feasible(lp: &Lp) -> Option<Vec<f64>> {
    let mut probe = lp.clone();
    probe.objective = vec![0.0; lp.num_vars];
    match solve(&probe) {
        LpOutcome::Optimal { x, .. } => Some(x),
        LpOutcome::Infeasible => None,
        LpOutcome::Unbounded => unreachable!("zero objective cannot be unbounded"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_minimization() {
        // min -x1 - 2 x2  s.t. x1 + x2 <= 4, x2 <= 2, x >= 0.
        let mut lp = Lp::minimize(2, vec![-1.0, -2.0]);
        lp.push_le(vec![1.0, 1.0], 4.0);
        lp.push_le(vec![0.0, 1.0], 2.0);
        match solve(&lp) {
            LpOutcome::Optimal { x, value } => {
                assert!((x[0] - 2.0).abs() < 1e-9);
                assert!((x[1] - 2.0).abs() < 1e-9);
                assert!((value + 6.0).abs() < 1e-9);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn equality_constraints() {
        // min x1 + x2  s.t. x1 + 2 x2 = 3, x >= 0 -> x = (0, 1.5).
        let mut lp = Lp::minimize(2, vec![1.0, 1.0]);
        lp.push_eq(vec![1.0, 2.0], 3.0);
        match solve(&lp) {
            LpOutcome::Optimal { x, value } => {
                assert!((value - 1.5).abs() < 1e-9);
                assert!((x[1] - 1.5).abs() < 1e-9);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn detects_infeasible() {
        let mut lp = Lp::feasibility(1);
        lp.push_eq(vec![1.0], -1.0); // x = -1 with x >= 0
        assert!(feasible(&lp).is_none());
    }

    #[test]
    fn detects_unbounded() {
        let lp = Lp::minimize(1, vec![-1.0]);
        assert_eq!(solve(&lp), LpOutcome::Unbounded);
    }

    #[test]
    fn negative_rhs_rows_are_handled() {
        // -x1 <= -2  (i.e. x1 >= 2), min x1 -> 2.
        let mut lp = Lp::minimize(1, vec![1.0]);
        lp.push_le(vec![-1.0], -2.0);
        match solve(&lp) {
            LpOutcome::Optimal { value, .. } => assert!((value - 2.0).abs() < 1e-9),
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = Lp::minimize(2, vec![1.0, 0.0]);
        lp.push_eq(vec![1.0, 1.0], 2.0);
        lp.push_eq(vec![2.0, 2.0], 4.0);
        match solve(&lp) {
            LpOutcome::Optimal { value, .. } => assert!(value.abs() < 1e-9),
            other => panic!("unexpected outcome {other:?}"),
        }
    }
}
