//! Candidate branches with their cost bounds, pruned by dominance.
//!
//! A branch is a nonempty set of configuration vertices put into the cover,
//! stored as a bit mask over vertex identifiers.

use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::boundary::{CoverOracle, ReqBits};
use crate::config::{LocalConfiguration, CONFIG_CAP};
use crate::error::{Error, Result};
use crate::graph::bits;
use crate::measure::{Measure, Rational};
use crate::subspace::Assertions;

pub type Branch = u32;

pub fn branch_vertices(b: Branch) -> Vec<usize> {
    bits(b).collect()
}

pub fn branch_from(vertices: &[usize]) -> Branch {
    vertices.iter().fold(0, |m, &v| m | 1 << v)
}

/// Every nonempty subset of the configuration's vertices.
pub fn seed_branches(l: &LocalConfiguration) -> Result<Vec<Branch>> {
    let verts: Vec<usize> = l.vertices().collect();
    if verts.len() > CONFIG_CAP {
        return Err(Error::Capacity {
            what: "configuration",
            size: verts.len(),
            cap: CONFIG_CAP,
        });
    }
    Ok((1u32..1 << verts.len())
        .map(|sub| crate::boundary::spread(sub, &verts))
        .collect())
}

/// Accounts for the new edge `{u, v}`: every previous branch `b`, and `b`
/// extended by `u`, by `v` and by both. The empty branch takes part as a
/// basis element, so `{u}`, `{v}` and `{u, v}` are always present; it is
/// never itself returned. An empty `prev` stays empty.
pub fn extend_branches(prev: &[Branch], u: usize, v: usize) -> Vec<Branch> {
    if prev.is_empty() {
        return Vec::new();
    }
    let (bu, bv) = (1u32 << u, 1u32 << v);
    let mut out: Vec<Branch> = std::iter::once(0)
        .chain(prev.iter().copied())
        .flat_map(|b| [b, b | bu, b | bv, b | bu | bv])
        .filter(|&b| b != 0)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Removes the branch from the configuration; survivors keep their
/// incomplete-edge counts.
pub fn apply_branch(l: &LocalConfiguration, b: Branch) -> Result<LocalConfiguration> {
    let take = branch_vertices(b);
    if let Some(&v) = take.iter().find(|&&v| !l.graph().contains(v)) {
        return Err(Error::UnknownVertex(v));
    }
    l.remove(&take)
}

/// Boundary vertices counted by (true degree, incomplete edges). Removed
/// vertices are keyed by their degree before the branch, survivors by their
/// degree after it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryProfile {
    /// `removed[t][j]`: removed boundary vertices of true degree `t` with `j`
    /// incomplete edges.
    pub removed: [[u32; 4]; 4],
    /// `remaining[t][j]`: surviving boundary vertices likewise.
    pub remaining: [[u32; 4]; 4],
}

impl BoundaryProfile {
    pub fn of(l: &LocalConfiguration, b: Branch) -> BoundaryProfile {
        let mut p = BoundaryProfile::default();
        for v in l.boundary() {
            let j = l.incomplete(v);
            if b >> v & 1 == 1 {
                p.removed[l.tdeg(v)][j] += 1;
            } else {
                let lost = l.graph().neighbors(v).filter(|&u| b >> u & 1 == 1).count();
                p.remaining[l.tdeg(v) - lost][j] += 1;
            }
        }
        p
    }

    pub fn d31(&self) -> u32 {
        self.removed[3][1]
    }
    pub fn d32(&self) -> u32 {
        self.removed[3][2]
    }
    pub fn d21(&self) -> u32 {
        self.removed[2][1]
    }
    pub fn r21(&self) -> u32 {
        self.remaining[2][1]
    }
    pub fn r22(&self) -> u32 {
        self.remaining[2][2]
    }
    pub fn r11(&self) -> u32 {
        self.remaining[1][1]
    }

    /// Incomplete edges of surviving vertices whose degree may still drop
    /// into a lower weight class: `r21 + 2 r22 + r11`.
    pub fn survivor_slack(&self) -> u32 {
        (1..=2)
            .flat_map(|t| (1..=t).map(move |j| (t, j)))
            .map(|(t, j)| j as u32 * self.remaining[t][j])
            .sum()
    }

    /// Degree-drop count for the given lemma. With only the keyed classes
    /// present these are
    /// `d31 + 2 d32 + min(d21, s)`, `d31 + d32 + min(d32 + d21, s)` and
    /// `min(d31 + 2 d32 + d21, s)` where `s` is [`Self::survivor_slack`].
    /// Removed vertices of true degree 3 with three incomplete edges and of
    /// true degree 2 with two count in the same way, edge by edge.
    pub fn correction_count(&self, lemma: u8) -> u32 {
        let s = self.survivor_slack();
        let weighted = |t: usize| -> u32 { (1..=3).map(|j| j as u32 * self.removed[t][j]).sum() };
        let high = weighted(3);
        let low = weighted(2);
        let ones = weighted(1);
        match lemma {
            12 => high + ones + low.min(s),
            13 => {
                let first: u32 = (1..=3).map(|j| self.removed[3][j]).sum();
                first + ones + (high - first + low).min(s)
            }
            _ => (high + low + ones).min(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CostBound {
    pub exponent: Rational,
    pub lemma: u8,
    pub dk: i64,
    pub dn: [i64; 3],
    pub profile: BoundaryProfile,
}

impl CostBound {
    /// `2^exponent`, rounded upward: exact for integer exponents, otherwise
    /// enlarged by a relative margin of `2^-40`.
    pub fn cost(&self) -> f64 {
        upward_pow2(&self.exponent)
    }
}

pub fn upward_pow2(e: &Rational) -> f64 {
    if e.is_integer() {
        return 2f64.powi(e.to_integer() as i32);
    }
    let x = e.to_f64().expect("finite exponent");
    x.exp2() * (1.0 + 2f64.powi(-40))
}

/// Cost-bound variant for a subspace: 14 without degree-2 vertices, 13 without a
/// degree-3 vertex next to two degree-2 vertices, 12 otherwise.
pub fn lemma_for(assertions: &Assertions) -> u8 {
    if assertions.no_degree_2 {
        14
    } else if assertions.no_deg3_two_deg2 {
        13
    } else {
        12
    }
}

/// Per-degree counts of configuration vertices by true degree.
fn degree_counts(l: &LocalConfiguration, deg: impl Fn(usize) -> usize, skip: Branch) -> [i64; 3] {
    let mut n = [0i64; 3];
    for v in l.vertices().filter(|&v| skip >> v & 1 == 0) {
        if let d @ 1..=3 = deg(v) {
            n[d - 1] += 1
        }
    }
    n
}

pub fn cost_bound(
    l: &LocalConfiguration,
    b: Branch,
    m: &Measure,
    assertions: &Assertions,
) -> CostBound {
    cost_bound_with_lemma(l, b, m, lemma_for(assertions))
}

pub fn cost_bound_with_lemma(
    l: &LocalConfiguration,
    b: Branch,
    m: &Measure,
    lemma: u8,
) -> CostBound {
    let before = degree_counts(l, |v| l.tdeg(v), 0);
    let after = degree_counts(
        l,
        |v| l.tdeg(v) - l.graph().neighbors(v).filter(|&u| b >> u & 1 == 1).count(),
        b,
    );
    let dn = [
        after[0] - before[0],
        after[1] - before[1],
        after[2] - before[2],
    ];
    let dk = -(b.count_ones() as i64);
    let profile = BoundaryProfile::of(l, b);
    let [b1, b2, _] = m.beta;
    let multiplier = (b1 - b2).max(-b1);
    let correction = (multiplier * profile.correction_count(lemma) as i64).max(Rational::zero());
    let exponent =
        m.alpha * dk + m.beta[0] * dn[0] + m.beta[1] * dn[1] + m.beta[2] * dn[2] + correction;
    CostBound {
        exponent,
        lemma,
        dk,
        dn,
        profile,
    }
}

/// One candidate with its cost and satisfied requirements.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub branch: Branch,
    pub cost: f64,
    pub eb: ReqBits,
}

/// Evaluates every branch against `reqs`.
pub fn evaluate_candidates(
    l: &LocalConfiguration,
    branches: &[Branch],
    reqs: &[crate::boundary::Requirement],
    oracle: &CoverOracle,
    m: &Measure,
    lemma: u8,
) -> Vec<Candidate> {
    branches
        .iter()
        .map(|&b| Candidate {
            branch: b,
            cost: cost_bound_with_lemma(l, b, m, lemma).cost(),
            eb: crate::boundary::eb_bits(oracle, b, reqs),
        })
        .collect()
}

/// `a` dominates `b` when it is no costlier and satisfies every requirement
/// `b` does; exact ties go to the earlier position.
fn dominates(a: &Candidate, ia: usize, b: &Candidate, ib: usize) -> bool {
    if a.cost > b.cost || !b.eb.is_subset(&a.eb) {
        return false;
    }
    a.cost < b.cost || a.eb != b.eb || ia < ib
}

/// Keeps the candidates no other candidate dominates, in input order.
pub fn prune_dominated(cands: Vec<Candidate>) -> Vec<Candidate> {
    let keep: Vec<bool> = (0..cands.len())
        .map(|i| !(0..cands.len()).any(|j| j != i && dominates(&cands[j], j, &cands[i], i)))
        .collect();
    cands
        .into_iter()
        .zip(keep)
        .filter_map(|(c, k)| k.then_some(c))
        .collect()
}
