//! The five answer-preserving simplification rules, on instances and on
//! local configurations.
//!
//! 1. isolated vertex: delete it
//! 2. degree-1 vertex: take its neighbor
//! 3. degree-2 vertex with adjacent neighbors: take both neighbors
//! 4. two adjacent degree-2 vertices: fold the chain, `k -= 1`
//! 5. even cycle alternating degree 2 and higher degree: take the higher
//!    degree vertices
//!
//! Rules are tried in that order; within a rule the lexicographically
//! smallest witness wins.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::config::LocalConfiguration;
use crate::error::{Error, Result};
use crate::graph::{enumerate_cycles, Graph, Instance, MAX_CYCLE_LEN};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplificationSite {
    pub rule: u8,
    pub witness: Vec<usize>,
}

/// What an application did, enough to lift a cover of the reduced graph
/// back to a cover of the original one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reduction {
    /// These vertices join the cover.
    Take(Vec<usize>),
    /// Chain `a - u - v - b` was folded into the edge `a - b`: a cover of the
    /// folded graph plus `v` (if it holds `a`) or `u` (otherwise) covers the chain.
    Fold { a: usize, u: usize, v: usize },
}

impl Reduction {
    pub fn lift(&self, cover: &mut BTreeSet<usize>) {
        match self {
            Reduction::Take(vs) => cover.extend(vs.iter().copied()),
            Reduction::Fold { a, u, v } => {
                cover.insert(if cover.contains(a) { *v } else { *u });
            }
        }
    }
}

pub fn find_site(inst: &Instance) -> Option<SimplificationSite> {
    find_site_with(&inst.graph, |v| inst.graph.degree(v), |_| true)
}

/// Site detection shared by instances and configurations. `deg` is the
/// (true) degree; `complete(v)` says all of `v`'s edges are present in `g`.
fn find_site_with(
    g: &Graph,
    deg: impl Fn(usize) -> usize,
    complete: impl Fn(usize) -> bool,
) -> Option<SimplificationSite> {
    let site = |rule, witness| Some(SimplificationSite { rule, witness });
    if let Some(v) = g.vertices().find(|&v| deg(v) == 0) {
        return site(1, vec![v]);
    }
    if let Some(v) = g.vertices().find(|&v| deg(v) == 1) {
        return site(2, vec![v]);
    }
    for v in g.vertices() {
        if deg(v) == 2 && complete(v) {
            let n: Vec<usize> = g.neighbors(v).collect();
            if n.len() == 2 && g.has_edge(n[0], n[1]) {
                return site(3, vec![v]);
            }
        }
    }
    for (u, v) in g.edges() {
        if deg(u) == 2 && deg(v) == 2 {
            return site(4, vec![u, v]);
        }
    }
    alternating_cycle(g, &deg).map(|c| SimplificationSite {
        rule: 5,
        witness: c,
    })
}

/// Alternating cycles are exactly the cycles of the subgraph keeping only
/// edges between a degree-2 vertex and a vertex of higher degree.
fn alternating_cycle(g: &Graph, deg: &impl Fn(usize) -> usize) -> Option<Vec<usize>> {
    if !g.vertices().any(|v| deg(v) == 2) {
        return None;
    }
    let mut sub = g.clone();
    for (u, v) in g.edges() {
        if (deg(u) == 2) == (deg(v) == 2) || deg(u) < 2 || deg(v) < 2 {
            sub.remove_edge(u, v).expect("edge exists");
        }
    }
    enumerate_cycles(&sub, MAX_CYCLE_LEN).into_iter().min()
}

fn is_alternating(c: &[usize], deg: &impl Fn(usize) -> usize) -> bool {
    c.len().is_multiple_of(2)
        && (0..c.len()).all(|i| {
            let (a, b) = (deg(c[i]), deg(c[(i + 1) % c.len()]));
            (a == 2 && b >= 3) || (a >= 3 && b == 2)
        })
}

/// Applies a site, returning the reduced instance and the lifting record.
pub fn apply_with_reduction(
    inst: &Instance,
    site: &SimplificationSite,
) -> Result<(Instance, Reduction)> {
    let g = &inst.graph;
    let stale = || Error::Contract(format!("stale simplification site {site:?}"));
    let w = &site.witness;
    if w.is_empty() || w.iter().any(|&v| !g.contains(v)) {
        return Err(stale());
    }
    let (graph, budget, red) = match site.rule {
        1 => {
            if g.degree(w[0]) != 0 {
                return Err(stale());
            }
            (
                g.delete_vertices(&w[..1])?,
                inst.budget,
                Reduction::Take(vec![]),
            )
        }
        2 => {
            if g.degree(w[0]) != 1 {
                return Err(stale());
            }
            let u = g.neighbors(w[0]).next().expect("degree 1");
            (
                g.delete_vertices(&[w[0], u])?,
                inst.budget - 1,
                Reduction::Take(vec![u]),
            )
        }
        3 => {
            let n: Vec<usize> = g.neighbors(w[0]).collect();
            if n.len() != 2 || !g.has_edge(n[0], n[1]) {
                return Err(stale());
            }
            (
                g.delete_vertices(&[w[0], n[0], n[1]])?,
                inst.budget - 2,
                Reduction::Take(n),
            )
        }
        4 => {
            let (u, v) = match w[..] {
                [u, v] if g.has_edge(u, v) && g.degree(u) == 2 && g.degree(v) == 2 => (u, v),
                _ => return Err(stale()),
            };
            let a = g.neighbors(u).find(|&x| x != v).expect("degree 2");
            let b = g.neighbors(v).find(|&x| x != u).expect("degree 2");
            if a == b {
                return Err(Error::Contract(format!(
                    "chain {u}-{v} closes a triangle; the triangle rule applies"
                )));
            }
            if g.has_edge(a, b) && g.degree(a) == 2 && g.degree(b) == 2 {
                // The whole component is a 4-cycle of degree-2 vertices.
                (
                    g.delete_vertices(&[a, u, v, b])?,
                    inst.budget - 2,
                    Reduction::Take(vec![u, b]),
                )
            } else {
                let mut h = g.delete_vertices(&[u, v])?;
                h.add_edge(a, b)?;
                (h, inst.budget - 1, Reduction::Fold { a, u, v })
            }
        }
        5 => {
            let deg = |v: usize| g.degree(v);
            let closed = (0..w.len()).all(|i| g.has_edge(w[i], w[(i + 1) % w.len()]));
            let distinct = w.iter().collect::<BTreeSet<_>>().len() == w.len();
            if !closed || !distinct || w.len() < 4 || !is_alternating(w, &deg) {
                return Err(stale());
            }
            let high: Vec<usize> = w.iter().copied().filter(|&v| g.degree(v) >= 3).collect();
            (
                g.delete_vertices(w)?,
                inst.budget - (w.len() / 2) as i64,
                Reduction::Take(high),
            )
        }
        r => {
            return Err(Error::InvalidInput(format!(
                "unknown simplification rule {r}"
            )))
        }
    };
    Ok((Instance::new(graph, budget), red))
}

pub fn apply(inst: &Instance, site: &SimplificationSite) -> Result<Instance> {
    apply_with_reduction(inst, site).map(|(i, _)| i)
}

/// Applies rules until none fires.
pub fn simplify(inst: &Instance) -> (Instance, Vec<Reduction>) {
    let mut cur = inst.clone();
    let mut log = Vec::new();
    while let Some(site) = find_site(&cur) {
        let (next, red) = apply_with_reduction(&cur, &site).expect("fresh site applies");
        cur = next;
        log.push(red);
    }
    (cur, log)
}

/// A rule certain to fire on every instance that expands `l`, judged from
/// true degrees and edges fully present in `l`.
pub fn config_site(l: &LocalConfiguration) -> Option<SimplificationSite> {
    find_site_with(l.graph(), |v| l.tdeg(v), |v| l.incomplete(v) == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::vc_oracle;

    fn claw() -> Graph {
        Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap()
    }

    #[test]
    fn find_site_examples() {
        assert_eq!(find_site(&Instance::new(Graph::complete(4), 3)), None);
        assert_eq!(
            find_site(&Instance::new(claw(), 1)),
            Some(SimplificationSite {
                rule: 2,
                witness: vec![1]
            })
        );
        // C6 with pendants on alternate vertices: the pendants trigger rule 2 first.
        let mut g = Graph::cycle(6);
        for i in [0, 2, 4] {
            let p = g.add_vertex();
            g.add_edge(i, p).unwrap();
        }
        assert_eq!(find_site(&Instance::new(g, 3)).unwrap().rule, 2);
    }

    #[test]
    fn rule2_on_claw() {
        let inst = Instance::new(claw(), 1);
        let out = apply(&inst, &find_site(&inst).unwrap()).unwrap();
        assert_eq!(out.budget, 0);
        assert_eq!(out.graph.vertex_count(), 2);
        assert!(out.graph.is_edgeless());
        assert!(out.is_yes().unwrap() && inst.is_yes().unwrap());
    }

    #[test]
    fn rule4_on_c5() {
        let inst = Instance::new(Graph::cycle(5), 3);
        let site = SimplificationSite {
            rule: 4,
            witness: vec![1, 2],
        };
        let out = apply(&inst, &site).unwrap();
        assert_eq!(out.budget, 2);
        assert_eq!(
            out.graph.edges().collect::<Vec<_>>(),
            vec![(0, 3), (0, 4), (3, 4)]
        );
        assert_eq!(vc_oracle(&inst.graph).unwrap(), 3);
        assert_eq!(vc_oracle(&out.graph).unwrap(), 2);
    }

    #[test]
    fn rule4_closing_triangle_is_rejected() {
        let inst = Instance::new(Graph::complete(3), 2);
        let site = SimplificationSite {
            rule: 4,
            witness: vec![0, 1],
        };
        assert!(matches!(apply(&inst, &site), Err(Error::Contract(_))));
        assert_eq!(find_site(&inst).unwrap().rule, 3);
    }

    #[test]
    fn rule4_on_isolated_square() {
        let inst = Instance::new(Graph::cycle(4), 2);
        let site = find_site(&inst).unwrap();
        assert_eq!(site.rule, 4);
        let (out, red) = apply_with_reduction(&inst, &site).unwrap();
        assert_eq!(out.graph.vertex_count(), 0);
        assert_eq!(out.budget, 0);
        let mut cover = BTreeSet::new();
        red.lift(&mut cover);
        assert!(inst.graph.is_vertex_cover(&cover));
    }

    #[test]
    fn rule5_on_square_with_two_degree3_corners() {
        // a=0, b=1, c=2, d=3 square; b and d have one extra neighbor each.
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 0), (1, 4), (3, 5)]).unwrap();
        let inst = Instance::new(g, 2);
        // Vertices 4 and 5 have degree 1, so force rule 5 directly.
        let site = SimplificationSite {
            rule: 5,
            witness: vec![0, 1, 2, 3],
        };
        let out = apply(&inst, &site).unwrap();
        assert_eq!(out.budget, 0);
        assert_eq!(out.graph.vertices().collect::<Vec<_>>(), vec![4, 5]);
        assert_eq!(inst.is_yes().unwrap(), out.is_yes().unwrap());
    }

    #[test]
    fn stale_sites_rejected() {
        let inst = Instance::new(Graph::complete(4), 3);
        for rule in 1..=5 {
            let site = SimplificationSite {
                rule,
                witness: vec![0, 1, 2, 3],
            };
            assert!(apply(&inst, &site).is_err(), "rule {rule}");
        }
    }

    #[test]
    fn config_site_examples() {
        let mut l = LocalConfiguration::new(Graph::path(2), vec![0, 2], 3).unwrap();
        assert_eq!(config_site(&l).unwrap().rule, 2);
        l = LocalConfiguration::lone(3, 3);
        assert_eq!(config_site(&l), None);
        // Apex 0 of true degree 2; base vertices 1, 2 of true degree 3.
        let tri = LocalConfiguration::new(Graph::complete(3), vec![0, 1, 1], 3).unwrap();
        assert_eq!(
            config_site(&tri),
            Some(SimplificationSite {
                rule: 3,
                witness: vec![0]
            })
        );
        // Apex with an incomplete edge is not a certain triangle-rule site.
        let open = LocalConfiguration::new(Graph::path(3), vec![1, 1, 1], 3).unwrap();
        assert_eq!(config_site(&open), None);
    }

    #[test]
    fn reductions_lift_to_covers() {
        let mut g = Graph::cycle(7);
        g.add_edge(0, 3).unwrap();
        let inst = Instance::new(g.clone(), 4);
        let (out, log) = simplify(&inst);
        assert!(out.graph.is_edgeless());
        let mut cover = BTreeSet::new();
        for r in log.iter().rev() {
            r.lift(&mut cover);
        }
        assert!(g.is_vertex_cover(&cover));
        assert_eq!(cover.len() as i64, inst.budget - out.budget);
        assert_eq!(cover.len(), vc_oracle(&g).unwrap());
    }
}
