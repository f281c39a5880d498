//! Minimum-cost set cover with 0/1 weights, by depth-first branch and
//! bound: pick the uncovered requirement with the fewest candidate
//! branches and try each of them, cheapest first.

use super::lp::CoverProblem;
use crate::error::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct IlpSolution {
    /// Indices of the selected branches, increasing.
    pub selected: Vec<usize>,
    pub objective: f64,
}

/// The optimal selection.
pub fn solve_ilp(p: &CoverProblem) -> Result<IlpSolution> {
    Ok(solve_ilp_within(p, f64::INFINITY)?.expect("a feasible problem has a cover"))
}

/// The optimal selection among those with objective at most `limit`, or
/// `None` when every cover costs more.
pub fn solve_ilp_within(p: &CoverProblem, limit: f64) -> Result<Option<IlpSolution>> {
    p.check()?;
    let mut by_req: Vec<Vec<usize>> = vec![Vec::new(); p.requirements];
    for (j, c) in p.covers.iter().enumerate() {
        for &r in c {
            by_req[r].push(j);
        }
    }
    for list in &mut by_req {
        list.sort_by(|&a, &b| p.costs[a].total_cmp(&p.costs[b]).then(a.cmp(&b)));
    }
    let mut search = Search {
        p,
        by_req: &by_req,
        covered: vec![0; p.requirements],
        chosen: Vec::new(),
        best: None,
        bound: limit,
    };
    search.run(0.0);
    Ok(search.best.map(|mut selected| {
        selected.sort_unstable();
        let objective = selected.iter().map(|&j| p.costs[j]).sum();
        IlpSolution {
            selected,
            objective,
        }
    }))
}

struct Search<'a> {
    p: &'a CoverProblem,
    by_req: &'a [Vec<usize>],
    covered: Vec<u32>,
    chosen: Vec<usize>,
    best: Option<Vec<usize>>,
    bound: f64,
}

impl Search<'_> {
    fn run(&mut self, cost: f64) {
        // Lower bound: the dearest cheapest way to cover one open requirement.
        let mut target: Option<usize> = None;
        let mut extra = 0.0f64;
        for r in 0..self.p.requirements {
            if self.covered[r] > 0 {
                continue;
            }
            let options = &self.by_req[r];
            extra = extra.max(self.p.costs[options[0]]);
            if target.is_none_or(|t| options.len() < self.by_req[t].len()) {
                target = Some(r);
            }
        }
        let Some(r) = target else {
            if cost <= self.bound {
                self.bound = cost;
                self.best = Some(self.chosen.clone());
            }
            return;
        };
        if cost + extra > self.bound {
            return;
        }
        for &j in self.by_req[r].iter() {
            if self.chosen.contains(&j) {
                continue;
            }
            let next = cost + self.p.costs[j];
            if next > self.bound {
                break;
            }
            self.chosen.push(j);
            for &q in &self.p.covers[j] {
                self.covered[q] += 1;
            }
            self.run(next);
            for &q in &self.p.covers[j] {
                self.covered[q] -= 1;
            }
            self.chosen.pop();
        }
    }
}
