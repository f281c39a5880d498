//! Boundary requirements: which boundary vertices the unseen exterior may
//! force into the cover, and the reduced (crucial) family of them that a
//! rule has to satisfy.
//!
//! Requirements and branches are bit masks over configuration vertex
//! identifiers.

use std::cell::RefCell;
use std::collections::HashMap;

use crate::config::LocalConfiguration;
use crate::error::{Error, Result};
use crate::graph::{bits, min_cover_size};

/// Largest boundary whose requirement lattice is enumerated.
pub const BOUNDARY_CAP: usize = 12;

/// A set of boundary vertices, as a bit mask over vertex identifiers.
pub type Requirement = u32;

/// Memoized minimum vertex cover sizes of `H - X` for one configuration.
pub struct CoverOracle {
    adj: Vec<u32>,
    all: u32,
    memo: RefCell<HashMap<u32, u32>>,
}

impl CoverOracle {
    pub fn new(l: &LocalConfiguration) -> Result<CoverOracle> {
        if l.graph().id_bound() > 32 {
            return Err(Error::Capacity {
                what: "configuration identifier range",
                size: l.graph().id_bound(),
                cap: 32,
            });
        }
        Ok(CoverOracle {
            adj: l.adjacency_bits(),
            all: l.vertex_bits(),
            memo: RefCell::new(HashMap::new()),
        })
    }

    /// `VC(H - removed)`.
    pub fn vc_without(&self, removed: u32) -> u32 {
        let alive = self.all & !removed;
        if let Some(&v) = self.memo.borrow().get(&alive) {
            return v;
        }
        let v = min_cover_size(&self.adj, alive);
        self.memo.borrow_mut().insert(alive, v);
        v
    }

    /// Branch `b` satisfies `r` when `VC(H - r) = VC(H - r - b) + |b \ r|`.
    pub fn satisfies(&self, b: u32, r: Requirement) -> bool {
        self.vc_without(r) == self.vc_without(r | b) + (b & !r).count_ones()
    }

    /// `VC(H - r) + |r|`: the cheapest cover of `H` containing `r`.
    pub fn forced_cost(&self, r: Requirement) -> u32 {
        self.vc_without(r) + r.count_ones()
    }
}

/// Requirements with no incoming edge in the requirement DAG. Between `r`
/// and `r + v` the edge points to `r` when adding `v` costs nothing extra,
/// and to `r + v` otherwise.
pub fn crucial_set(l: &LocalConfiguration) -> Result<Vec<Requirement>> {
    let oracle = CoverOracle::new(l)?;
    crucial_set_with(l, &oracle)
}

pub fn crucial_set_with(l: &LocalConfiguration, oracle: &CoverOracle) -> Result<Vec<Requirement>> {
    let delta = l.boundary();
    if delta.len() > BOUNDARY_CAP {
        return Err(Error::Capacity {
            what: "boundary",
            size: delta.len(),
            cap: BOUNDARY_CAP,
        });
    }
    let mut out = Vec::new();
    for sub in 0u32..1 << delta.len() {
        let r = spread(sub, &delta);
        let f = oracle.forced_cost(r);
        let has_incoming = delta.iter().any(|&v| {
            let bit = 1u32 << v;
            if r & bit != 0 {
                // Edge between r - v and r points to r when f grows.
                oracle.forced_cost(r & !bit) != f
            } else {
                // Edge between r and r + v points to r when f stays.
                oracle.forced_cost(r | bit) == f
            }
        });
        if !has_incoming {
            out.push(r);
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// The requirements of `reqs` that branch `b` satisfies.
pub fn eb(l: &LocalConfiguration, b: u32, reqs: &[Requirement]) -> Result<Vec<Requirement>> {
    let oracle = CoverOracle::new(l)?;
    Ok(reqs
        .iter()
        .copied()
        .filter(|&r| oracle.satisfies(b, r))
        .collect())
}

/// Maps the low bits of `sub` onto the vertices listed in `verts`.
pub fn spread(sub: u32, verts: &[usize]) -> u32 {
    bits(sub).fold(0, |m, i| m | 1 << verts[i])
}

/// A fixed-width set of indices into a requirement list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReqBits(Vec<u64>);

impl ReqBits {
    pub fn empty(len: usize) -> ReqBits {
        ReqBits(vec![0; len.div_ceil(64)])
    }

    pub fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn is_subset(&self, other: &ReqBits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn union_with(&mut self, other: &ReqBits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= b;
        }
    }

    pub fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Indices into `reqs` of the requirements `b` satisfies.
pub fn eb_bits(oracle: &CoverOracle, b: u32, reqs: &[Requirement]) -> ReqBits {
    let mut out = ReqBits::empty(reqs.len());
    for (i, &r) in reqs.iter().enumerate() {
        if oracle.satisfies(b, r) {
            out.insert(i);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn edge22() -> LocalConfiguration {
        LocalConfiguration::new(Graph::path(2), vec![2, 2], 3).unwrap()
    }

    #[test]
    fn crucial_set_examples() {
        assert_eq!(
            crucial_set(&LocalConfiguration::lone(3, 3)).unwrap(),
            vec![0]
        );
        assert_eq!(crucial_set(&edge22()).unwrap(), vec![0b01, 0b10]);
        let k4 = LocalConfiguration::from_graph(&Graph::complete(4), 3).unwrap();
        assert_eq!(crucial_set(&k4).unwrap(), vec![0]);
    }

    #[test]
    fn eb_examples() {
        let l = edge22();
        let reqs = crucial_set(&l).unwrap();
        assert_eq!(eb(&l, 0b01, &reqs).unwrap(), vec![0b01]);
        assert_eq!(eb(&l, 0, &reqs).unwrap(), reqs);
        assert_eq!(eb(&l, 0b11, &reqs).unwrap(), Vec::<u32>::new());
    }

    #[test]
    fn boundary_cap() {
        let l = LocalConfiguration::new(Graph::with_vertices(13), vec![1; 13], 3).unwrap();
        assert!(matches!(crucial_set(&l), Err(Error::Capacity { .. })));
    }

    #[test]
    fn req_bits_ops() {
        let mut a = ReqBits::empty(70);
        let mut b = ReqBits::empty(70);
        a.insert(65);
        b.insert(65);
        b.insert(3);
        assert!(a.is_subset(&b) && !b.is_subset(&a));
        assert!(b.contains(3) && !a.contains(3));
        assert_eq!(b.count(), 2);
        a.union_with(&b);
        assert_eq!(a, b);
        assert!(ReqBits::empty(5).is_empty());
    }
}
