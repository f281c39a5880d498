//! The covering LP `min c.w  s.t.  A w >= 1, w >= 0` where row `r` of `A`
//! marks the branches satisfying requirement `r`.
//!
//! The solver runs the simplex method with Bland's rule on the dual
//! `max 1.y  s.t.  A^T y <= c, y >= 0`, whose origin is feasible because
//! every cost is nonnegative. The primal weights are read off the reduced
//! costs of the dual slacks at the optimum.

use crate::error::{Error, Result};

const EPS: f64 = 1e-12;

/// A set-covering problem: `covers[j]` lists the requirements branch `j`
/// satisfies, `costs[j]` its cost.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverProblem {
    pub requirements: usize,
    pub costs: Vec<f64>,
    pub covers: Vec<Vec<usize>>,
}

impl CoverProblem {
    /// Requirements no branch satisfies.
    pub fn uncovered(&self) -> Vec<usize> {
        let mut seen = vec![false; self.requirements];
        for c in &self.covers {
            for &r in c {
                seen[r] = true;
            }
        }
        (0..self.requirements).filter(|&r| !seen[r]).collect()
    }

    pub fn check(&self) -> Result<()> {
        if self.costs.len() != self.covers.len() {
            return Err(Error::InvalidInput(
                "costs and covers differ in length".into(),
            ));
        }
        if self.costs.iter().any(|&c| !(c >= 0.0 && c.is_finite())) {
            return Err(Error::InvalidInput(
                "branch costs must be finite and nonnegative".into(),
            ));
        }
        if self
            .covers
            .iter()
            .flatten()
            .any(|&r| r >= self.requirements)
        {
            return Err(Error::InvalidInput("requirement index out of range".into()));
        }
        match self.uncovered().first() {
            Some(r) => Err(Error::Domain(format!(
                "requirement {r} is satisfied by no branch"
            ))),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub weights: Vec<f64>,
    pub objective: f64,
}

pub fn solve_lp(p: &CoverProblem) -> Result<LpSolution> {
    p.check()?;
    let n = p.costs.len();
    let m = p.requirements;
    if m == 0 {
        return Ok(LpSolution {
            weights: vec![0.0; n],
            objective: 0.0,
        });
    }
    // Columns: y_0..y_{m-1}, then slacks s_0..s_{n-1}, then the right-hand side.
    let width = m + n + 1;
    let rhs = m + n;
    let mut t = vec![vec![0.0; width]; n];
    for (j, row) in t.iter_mut().enumerate() {
        for &r in &p.covers[j] {
            row[r] = 1.0;
        }
        row[m + j] = 1.0;
        row[rhs] = p.costs[j];
    }
    let mut obj = vec![0.0; width];
    for x in obj.iter_mut().take(m) {
        *x = -1.0;
    }
    let mut basis: Vec<usize> = (m..m + n).collect();
    while let Some(enter) = (0..m + n).find(|&k| obj[k] < -EPS) {
        let mut leave: Option<usize> = None;
        for i in 0..n {
            let a = t[i][enter];
            if a > EPS {
                let ratio = t[i][rhs] / a;
                let better = match leave {
                    None => true,
                    Some(l) => {
                        let best = t[l][rhs] / t[l][enter];
                        ratio < best - EPS || (ratio <= best + EPS && basis[i] < basis[l])
                    }
                };
                if better {
                    leave = Some(i);
                }
            }
        }
        let Some(row) = leave else {
            return Err(Error::Domain("covering LP is infeasible".into()));
        };
        pivot(&mut t, &mut obj, row, enter);
        basis[row] = enter;
    }
    let weights = (0..n).map(|j| obj[m + j].max(0.0)).collect();
    Ok(LpSolution {
        weights,
        objective: obj[rhs],
    })
}

fn pivot(t: &mut [Vec<f64>], obj: &mut [f64], row: usize, col: usize) {
    let p = t[row][col];
    for x in t[row].iter_mut() {
        *x /= p;
    }
    let pivot_row = t[row].clone();
    for (i, r) in t.iter_mut().enumerate() {
        if i != row {
            let f = r[col];
            if f != 0.0 {
                for (x, &y) in r.iter_mut().zip(&pivot_row) {
                    *x -= f * y;
                }
            }
        }
    }
    let f = obj[col];
    if f != 0.0 {
        for (x, &y) in obj.iter_mut().zip(&pivot_row) {
            *x -= f * y;
        }
    }
}
