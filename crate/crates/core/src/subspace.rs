//! The partition of subcubic instances into subspaces P1 to P19, each with
//! its root configuration and the facts every member instance guarantees.

use serde::{Deserialize, Serialize};

use crate::config::LocalConfiguration;
use crate::error::{Error, Result};
use crate::graph::{cycle_edges, enumerate_cycles, Graph, MAX_CYCLE_LEN};

pub const SUBSPACE_COUNT: u8 = 19;

/// Facts that hold in every instance of a subspace.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assertions {
    pub no_degree_le1: bool,
    pub no_deg3_two_deg2: bool,
    pub no_degree_2: bool,
    /// The structures of subspaces `1..excluded_before` are absent.
    pub excluded_before: u8,
}

impl Assertions {
    pub fn for_subspace(id: u8) -> Assertions {
        Assertions {
            no_degree_le1: id >= 2,
            no_deg3_two_deg2: id >= 3,
            no_degree_2: id >= 7,
            excluded_before: id,
        }
    }

    /// True when `l` realizes an excluded structure, so no instance of the
    /// subspace expands it.
    pub fn forbids(&self, l: &LocalConfiguration) -> bool {
        contains_forbidden(l, self.excluded_before)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceDescriptor {
    pub id: u8,
    pub assertions: Assertions,
    pub root: LocalConfiguration,
    pub cost_lemma: u8,
}

pub fn name(id: u8) -> String {
    format!("P{id}")
}

/// Parses `P7`, `p7` or `7`.
pub fn parse_name(s: &str) -> Result<u8> {
    let digits = s.strip_prefix(['P', 'p']).unwrap_or(s);
    match digits.parse::<u8>() {
        Ok(id) if (1..=SUBSPACE_COUNT).contains(&id) => Ok(id),
        _ => Err(Error::InvalidInput(format!("unknown subspace `{s}`"))),
    }
}

pub fn descriptor(id: u8) -> Result<SubspaceDescriptor> {
    let assertions = Assertions::for_subspace(id);
    Ok(SubspaceDescriptor {
        id,
        assertions,
        root: root_config(id)?,
        cost_lemma: crate::branching::lemma_for(&assertions),
    })
}

/// The structure defining subspace `id`, with each vertex's remaining
/// degree expressed as incomplete edges.
pub fn root_config(id: u8) -> Result<LocalConfiguration> {
    let ring = |n: usize, d: Vec<usize>| LocalConfiguration::new(Graph::cycle(n), d, 3);
    let with_one_deg2 = |n: usize| {
        let mut d = vec![1; n];
        d[0] = 0;
        ring(n, d)
    };
    match id {
        1 => Ok(LocalConfiguration::lone(1, 3)),
        2 => LocalConfiguration::new(Graph::path(3), vec![1, 1, 1], 3).and_then(|l| {
            // Centre of the path is the degree-3 vertex.
            l.permuted(&[1, 0, 2])
        }),
        3 => with_one_deg2(4),
        4 => with_one_deg2(5),
        5 => with_one_deg2(6),
        6 => Ok(LocalConfiguration::lone(2, 3)),
        7 => ring(3, vec![1; 3]),
        8 => ring(4, vec![1; 4]),
        9..=11 => ring(5, vec![1; 5]),
        12 | 13 => ring(6, vec![1; 6]),
        14..=17 => ring(7, vec![1; 7]),
        18 => ring(8, vec![1; 8]),
        19 => Ok(LocalConfiguration::lone(3, 3)),
        _ => Err(Error::InvalidInput(format!(
            "subspace id {id} outside 1..=19"
        ))),
    }
}

type Edges = Vec<(usize, usize)>;

/// Degree-aware view shared by instances and configurations.
struct View<'a, F: Fn(usize) -> usize> {
    g: &'a Graph,
    deg: F,
    cycles: Vec<Vec<usize>>,
}

impl<F: Fn(usize) -> usize> View<'_, F> {
    fn cycles_of(&self, len: usize) -> impl Iterator<Item = &Vec<usize>> {
        self.cycles.iter().filter(move |c| c.len() == len)
    }

    fn cycle_with(&self, len: usize, deg3: usize, deg2: usize) -> bool {
        self.cycles_of(len).any(|c| {
            let threes = c.iter().filter(|&&v| (self.deg)(v) == 3).count();
            let twos = c.iter().filter(|&&v| (self.deg)(v) == 2).count();
            threes == deg3 && twos == deg2
        })
    }

    fn sharing(&self, la: usize, lb: usize, shared: impl Fn(usize) -> bool) -> bool {
        let a: Vec<Vec<(usize, usize)>> = self.cycles_of(la).map(|c| cycle_edges(c)).collect();
        let b: Vec<(&Vec<usize>, Edges)> =
            self.cycles_of(lb).map(|c| (c, cycle_edges(c))).collect();
        self.cycles_of(la).zip(&a).any(|(ca, ea)| {
            b.iter()
                .any(|(cb, eb)| *cb != ca && shared(ea.iter().filter(|e| eb.contains(e)).count()))
        })
    }

    fn detect(&self, id: u8) -> bool {
        let verts = || self.g.vertices();
        match id {
            1 => verts().any(|v| (self.deg)(v) <= 1),
            2 => verts().any(|v| {
                (self.deg)(v) == 3
                    && self.g.neighbors(v).filter(|&u| (self.deg)(u) == 2).count() >= 2
            }),
            3 => self.cycle_with(4, 3, 1),
            4 => self.cycle_with(5, 4, 1),
            5 => self.cycle_with(6, 5, 1),
            6 => verts().any(|v| (self.deg)(v) == 2),
            7 => self.cycles_of(3).next().is_some(),
            8 => self.cycles_of(4).next().is_some(),
            9 => self.sharing(5, 5, |s| s >= 1),
            10 => self.sharing(5, 7, |s| s >= 1),
            11 => self.cycles_of(5).next().is_some(),
            12 => self.sharing(6, 6, |s| s >= 1),
            13 => self.cycles_of(6).next().is_some(),
            14 => self.sharing(7, 7, |s| s == 3),
            15 => self.sharing(7, 7, |s| s == 2),
            16 => self.sharing(7, 7, |s| s == 1),
            17 => self.cycles_of(7).next().is_some(),
            18 => self.cycles_of(8).next().is_some(),
            _ => false,
        }
    }
}

/// The smallest subspace whose structure the graph contains; 19 if none.
pub fn classify(g: &Graph) -> Result<u8> {
    if g.max_degree() > 3 {
        return Err(Error::Domain(format!(
            "maximum degree {} above 3",
            g.max_degree()
        )));
    }
    let view = View {
        g,
        deg: |v| g.degree(v),
        cycles: enumerate_cycles(g, MAX_CYCLE_LEN),
    };
    Ok((1..SUBSPACE_COUNT)
        .find(|&id| view.detect(id))
        .unwrap_or(SUBSPACE_COUNT))
}

/// Whether `l` realizes, through true degrees and its own edges, the
/// structure of a subspace numbered below `id`.
pub fn contains_forbidden(l: &LocalConfiguration, id: u8) -> bool {
    if id <= 1 {
        return false;
    }
    let view = View {
        g: l.graph(),
        deg: |v| l.tdeg(v),
        cycles: enumerate_cycles(l.graph(), MAX_CYCLE_LEN),
    };
    (1..id.min(SUBSPACE_COUNT)).any(|j| view.detect(j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::is_expansion;

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&Graph::complete(4)).unwrap(), 7);
        assert_eq!(classify(&Graph::cycle(8)).unwrap(), 6);
        assert_eq!(classify(&Graph::petersen()).unwrap(), 9);
        assert_eq!(classify(&Graph::path(3)).unwrap(), 1);
        assert!(matches!(
            classify(&Graph::complete(5)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn root_examples() {
        assert_eq!(root_config(19).unwrap(), LocalConfiguration::lone(3, 3));
        let p7 = root_config(7).unwrap();
        assert_eq!(p7.graph().edge_count(), 3);
        assert!(p7.vertices().all(|v| p7.incomplete(v) == 1));
        assert_eq!(root_config(6).unwrap(), LocalConfiguration::lone(2, 3));
        let p2 = root_config(2).unwrap();
        assert_eq!(p2.tdeg(0), 3);
        assert_eq!((p2.tdeg(1), p2.tdeg(2)), (2, 2));
        assert!(root_config(20).is_err());
    }

    #[test]
    fn forbidden_examples() {
        assert!(!contains_forbidden(&root_config(7).unwrap(), 7));
        let tri = LocalConfiguration::new(Graph::complete(3), vec![1, 1, 1], 3).unwrap();
        assert!(contains_forbidden(&tri, 8));
        let two = LocalConfiguration::new(Graph::path(2), vec![2, 1], 3).unwrap();
        assert!(contains_forbidden(&two, 7));
        assert!(!contains_forbidden(&two, 1));
    }

    #[test]
    fn roots_detect_their_own_structure() {
        for id in 2..=18u8 {
            let root = root_config(id).unwrap();
            let view = View {
                g: root.graph(),
                deg: |v| root.tdeg(v),
                cycles: enumerate_cycles(root.graph(), MAX_CYCLE_LEN),
            };
            // Roots for the shared-cycle subspaces hold one cycle only.
            let expected = !matches!(id, 9 | 10 | 12 | 14 | 15 | 16);
            assert_eq!(view.detect(id), expected, "P{id}");
        }
    }

    #[test]
    fn petersen_anchors_its_root() {
        let g = Graph::petersen();
        let big = LocalConfiguration::from_graph(&g, 3).unwrap();
        assert!(is_expansion(&big, &root_config(9).unwrap()).is_some());
    }

    #[test]
    fn names() {
        assert_eq!(parse_name("P19").unwrap(), 19);
        assert_eq!(parse_name("7").unwrap(), 7);
        assert!(parse_name("P0").is_err());
        assert_eq!(name(3), "P3");
    }
}
