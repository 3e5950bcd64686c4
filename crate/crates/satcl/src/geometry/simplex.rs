//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! Solves `minimize c.x  subject to  A x <= b,  x >= 0`. Every pivot is
//! exact, so feasibility answers are decisions, not estimates. Bland's
//! anti-cycling rule (lowest-index entering column; lowest-index basic
//! variable among ratio ties) guarantees termination and makes the chosen
//! vertex a deterministic function of the row and column order.
//!
//! The scale this crate works at (a handful of structural variables, at
//! most a few dozen rows) makes a dense rational tableau the right tool;
//! there is no sparsity or refactorization machinery here.

use num_traits::{One, Signed, Zero};

use crate::rat::Rat;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    /// Optimal basic solution: values of the structural variables and the
    /// exact objective value.
    Optimal {
        x: Vec<Rat>,
        value: Rat,
    },
    Infeasible,
    Unbounded,
}

/// One inequality `coeffs . x <= rhs` over the structural variables.
#[derive(Debug, Clone)]
pub struct Row {
    pub coeffs: Vec<Rat>,
    pub rhs: Rat,
}

struct Tableau {
    /// m rows, each of width `cols + 1` (last entry is the rhs).
    rows: Vec<Vec<Rat>>,
    /// Basic variable of each row; the corresponding column is a unit
    /// column with its 1 in that row.
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rat {
        &self.rows[i][self.cols]
    }

    /// Pivot on (row, col): scales the pivot row to make the entry 1 and
    /// eliminates the column from every other row and from `obj`.
    fn pivot(&mut self, row: usize, col: usize, obj: &mut [Rat]) {
        let piv = self.rows[row][col].clone();
        debug_assert!(!piv.is_zero());
        for entry in self.rows[row].iter_mut() {
            *entry = &*entry / &piv;
        }
        let pivot_row = self.rows[row].clone();
        for (r, current) in self.rows.iter_mut().enumerate() {
            if r == row {
                continue;
            }
            let factor = current[col].clone();
            if factor.is_zero() {
                continue;
            }
            for (entry, p) in current.iter_mut().zip(pivot_row.iter()) {
                *entry = &*entry - &factor * p;
            }
        }
        let factor = obj[col].clone();
        if !factor.is_zero() {
            for (entry, p) in obj.iter_mut().zip(pivot_row.iter()) {
                *entry = &*entry - &factor * p;
            }
        }
        self.basis[row] = col;
    }
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

/// Runs Bland pivoting for the cost vector `costs` until no entering
/// column remains. `costs` has one entry per column (rhs excluded).
fn run_phase(t: &mut Tableau, costs: &[Rat]) -> PhaseEnd {
    // Reduced-cost row: start from the raw costs and eliminate the basic
    // columns so every basic variable has reduced cost zero.
    let mut obj: Vec<Rat> = costs.to_vec();
    obj.push(Rat::zero());
    for (i, &b) in t.basis.iter().enumerate() {
        let c = obj[b].clone();
        if c.is_zero() {
            continue;
        }
        let row = t.rows[i].clone();
        for (entry, p) in obj.iter_mut().zip(row.iter()) {
            *entry = &*entry - &c * p;
        }
    }
    loop {
        // Bland: entering column = smallest index with negative reduced cost.
        let entering = match (0..t.cols).find(|&j| obj[j].is_negative()) {
            Some(j) => j,
            None => return PhaseEnd::Optimal,
        };
        // Leaving row: minimum ratio rhs / coeff over positive coefficients;
        // ties broken by the smallest basic-variable index.
        let mut leave: Option<(usize, Rat)> = None;
        for i in 0..t.rows.len() {
            let coeff = &t.rows[i][entering];
            if !coeff.is_positive() {
                continue;
            }
            let ratio = t.rhs(i) / coeff;
            match &leave {
                Some((best, best_ratio)) => {
                    if ratio < *best_ratio || (ratio == *best_ratio && t.basis[i] < t.basis[*best])
                    {
                        leave = Some((i, ratio));
                    }
                }
                None => leave = Some((i, ratio)),
            }
        }
        match leave {
            Some((row, _)) => t.pivot(row, entering, &mut obj),
            None => return PhaseEnd::Unbounded,
        }
    }
}

/// Minimizes `objective . x` over `{x >= 0 : rows hold}`.
pub fn solve_min(rows: &[Row], objective: &[Rat]) -> LpOutcome {
    let n = objective.len();
    if rows.is_empty() {
        return if objective.iter().any(|c| c.is_negative()) {
            LpOutcome::Unbounded
        } else {
            LpOutcome::Optimal {
                x: vec![Rat::zero(); n],
                value: Rat::zero(),
            }
        };
    }
    let m = rows.len();
    debug_assert!(rows.iter().all(|r| r.coeffs.len() == n));

    // Standard form: one slack per row. Rows with negative rhs are negated
    // first, which flips their slack to -1, so those rows get an artificial
    // variable to form the initial basis.
    let art_rows: Vec<usize> = (0..m).filter(|&i| rows[i].rhs.is_negative()).collect();
    let k = art_rows.len();
    let cols = n + m + k;
    let mut t = Tableau {
        rows: Vec::with_capacity(m),
        basis: vec![0; m],
        cols,
    };
    let mut art_seen = 0usize;
    for (i, row) in rows.iter().enumerate() {
        let negate = row.rhs.is_negative();
        let mut tr = vec![Rat::zero(); cols + 1];
        for (j, a) in row.coeffs.iter().enumerate() {
            tr[j] = if negate { -a } else { a.clone() };
        }
        tr[n + i] = if negate { -Rat::one() } else { Rat::one() };
        tr[cols] = if negate { -&row.rhs } else { row.rhs.clone() };
        if negate {
            let art_col = n + m + art_seen;
            tr[art_col] = Rat::one();
            t.basis[i] = art_col;
            art_seen += 1;
        } else {
            t.basis[i] = n + i;
        }
        t.rows.push(tr);
    }

    if k > 0 {
        // Phase 1: minimize the sum of artificials.
        let mut phase1_costs = vec![Rat::zero(); cols];
        for c in phase1_costs.iter_mut().skip(n + m) {
            *c = Rat::one();
        }
        match run_phase(&mut t, &phase1_costs) {
            PhaseEnd::Unbounded => unreachable!("phase-1 objective is bounded below by zero"),
            PhaseEnd::Optimal => {}
        }
        let infeasibility: Rat = t
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| b >= n + m)
            .map(|(i, _)| t.rhs(i).clone())
            .fold(Rat::zero(), |acc, v| acc + v);
        if !infeasibility.is_zero() {
            return LpOutcome::Infeasible;
        }
        // Drive any zero-valued basic artificials out of the basis; rows
        // with no structural or slack coefficient left are redundant.
        let mut dummy_obj = vec![Rat::zero(); cols + 1];
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= n + m {
                match (0..n + m).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(j) => t.pivot(i, j, &mut dummy_obj),
                    None => {
                        t.rows.remove(i);
                        t.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
        // Drop the artificial columns.
        for row in t.rows.iter_mut() {
            let rhs = row[cols].clone();
            row.truncate(n + m);
            row.push(rhs);
        }
        t.cols = n + m;
    }

    let mut phase2_costs = vec![Rat::zero(); t.cols];
    phase2_costs[..n].clone_from_slice(objective);
    match run_phase(&mut t, &phase2_costs) {
        PhaseEnd::Unbounded => return LpOutcome::Unbounded,
        PhaseEnd::Optimal => {}
    }
    let mut x = vec![Rat::zero(); n];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] = t.rhs(i).clone();
        }
    }
    let value = objective
        .iter()
        .zip(x.iter())
        .fold(Rat::zero(), |acc, (c, v)| acc + c * v);
    LpOutcome::Optimal { x, value }
}
