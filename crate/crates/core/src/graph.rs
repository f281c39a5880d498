//! Simple undirected graphs and budgeted instances, with an exact vertex
//! cover oracle for small graphs.
//!
//! Vertex identifiers are dense `usize` values. Deleting a vertex leaves a gap
//! instead of renumbering, so identifiers stay valid across deletions and any
//! embedding into a graph survives the removal of unrelated vertices.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Largest graph the exact oracle accepts.
pub const ORACLE_CAP: usize = 24;

/// Longest cycle `enumerate_cycles` searches for.
pub const MAX_CYCLE_LEN: usize = 8;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<Option<BTreeSet<usize>>>,
}

impl Graph {
    /// Graph on vertices `0..n` with no edges.
    pub fn with_vertices(n: usize) -> Self {
        Graph {
            adj: vec![Some(BTreeSet::new()); n],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::with_vertices(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::with_vertices(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v).expect("valid endpoints");
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Graph::with_vertices(n);
        for u in 0..n {
            g.add_edge(u, (u + 1) % n).expect("valid endpoints");
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Graph::with_vertices(n);
        for u in 1..n {
            g.add_edge(u - 1, u).expect("valid endpoints");
        }
        g
    }

    pub fn petersen() -> Self {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        Graph::from_edges(10, &edges).expect("valid endpoints")
    }

    /// One past the largest identifier ever allocated.
    pub fn id_bound(&self) -> usize {
        self.adj.len()
    }

    pub fn add_vertex(&mut self) -> usize {
        self.adj.push(Some(BTreeSet::new()));
        self.adj.len() - 1
    }

    pub fn contains(&self, v: usize) -> bool {
        matches!(self.adj.get(v), Some(Some(_)))
    }

    fn nbrs(&self, v: usize) -> Result<&BTreeSet<usize>> {
        self.adj
            .get(v)
            .and_then(Option::as_ref)
            .ok_or(Error::UnknownVertex(v))
    }

    fn nbrs_mut(&mut self, v: usize) -> Result<&mut BTreeSet<usize>> {
        self.adj
            .get_mut(v)
            .and_then(Option::as_mut)
            .ok_or(Error::UnknownVertex(v))
    }

    /// Adds `{u, v}`. Returns `false` when the edge was already present.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<bool> {
        if u == v {
            return Err(Error::InvalidInput(format!("self-loop at vertex {u}")));
        }
        self.nbrs(v)?;
        let fresh = self.nbrs_mut(u)?.insert(v);
        self.nbrs_mut(v)?.insert(u);
        Ok(fresh)
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> Result<bool> {
        self.nbrs(v)?;
        let had = self.nbrs_mut(u)?.remove(&v);
        self.nbrs_mut(v)?.remove(&u);
        Ok(had)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.nbrs(u).map(|n| n.contains(&v)).unwrap_or(false)
    }

    /// Neighbors in increasing order. Panics on unknown vertices; use
    /// [`Graph::contains`] first when the identifier is untrusted.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.nbrs(v).expect("known vertex").iter().copied()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.nbrs(v).map(BTreeSet::len).unwrap_or(0)
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.adj
            .iter()
            .enumerate()
            .filter_map(|(v, n)| n.as_ref().map(|_| v))
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.iter().filter(|n| n.is_some()).count()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().flatten().map(BTreeSet::len).sum::<usize>() / 2
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.vertices().flat_map(move |u| {
            self.neighbors(u)
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn max_degree(&self) -> usize {
        self.vertices().map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn is_edgeless(&self) -> bool {
        self.adj.iter().flatten().all(BTreeSet::is_empty)
    }

    /// Removes one vertex in place.
    pub fn remove_vertex(&mut self, v: usize) -> Result<()> {
        let nbrs = std::mem::take(self.nbrs_mut(v)?);
        for u in nbrs {
            self.nbrs_mut(u)?.remove(&v);
        }
        self.adj[v] = None;
        Ok(())
    }

    /// Induced subgraph on `V \ s`. Identifiers are kept.
    pub fn delete_vertices(&self, s: &[usize]) -> Result<Graph> {
        let mut g = self.clone();
        for &v in s {
            if !self.contains(v) {
                return Err(Error::UnknownVertex(v));
            }
            if g.contains(v) {
                g.remove_vertex(v)?;
            }
        }
        Ok(g)
    }

    /// Connected component containing `v`, in increasing order.
    pub fn component(&self, v: usize) -> Vec<usize> {
        let mut seen = BTreeSet::from([v]);
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            for y in self.neighbors(x) {
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// Checks that `cover` touches every edge.
    pub fn is_vertex_cover(&self, cover: &BTreeSet<usize>) -> bool {
        self.edges()
            .all(|(u, v)| cover.contains(&u) || cover.contains(&v))
    }

    /// Renders the `p vc <n> <m>` text format. `n` is the identifier bound so
    /// that gaps survive a round trip.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "p vc {} {}", self.id_bound(), self.edge_count());
        for v in 0..self.id_bound() {
            if !self.contains(v) {
                let _ = writeln!(out, "c deleted {v}");
            }
        }
        for (u, v) in self.edges() {
            let _ = writeln!(out, "e {u} {v}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Graph> {
        Ok(parse_document(text)?.graph)
    }
}

/// A graph together with a vertex cover budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub graph: Graph,
    pub budget: i64,
}

impl Instance {
    pub fn new(graph: Graph, budget: i64) -> Self {
        Instance { graph, budget }
    }

    pub fn to_text(&self) -> String {
        let mut out = self.graph.to_text();
        let _ = writeln!(out, "k {}", self.budget);
        out
    }

    pub fn parse(text: &str) -> Result<Instance> {
        let doc = parse_document(text)?;
        let budget = doc.budget.ok_or(Error::Parse {
            line: 0,
            msg: "missing `k <budget>` line".into(),
        })?;
        Ok(Instance::new(doc.graph, budget))
    }

    /// Decides the instance with the exact oracle.
    pub fn is_yes(&self) -> Result<bool> {
        Ok(self.budget >= 0 && vc_oracle(&self.graph)? as i64 <= self.budget)
    }
}

/// Everything the shared text format can carry: the graph, an optional
/// budget line and optional `d <v> <count>` lines used by configurations.
#[derive(Debug, Default)]
pub(crate) struct Document {
    pub graph: Graph,
    pub budget: Option<i64>,
    pub incomplete: Vec<(usize, usize)>,
}

pub(crate) fn parse_document(text: &str) -> Result<Document> {
    let mut doc = Document::default();
    let mut declared_edges = None;
    let mut deleted = Vec::new();
    let mut seen_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |msg: &str| Error::Parse {
            line,
            msg: msg.to_string(),
        };
        let fields: Vec<&str> = raw.split_whitespace().collect();
        let Some(&tag) = fields.first() else { continue };
        let num = |i: usize| -> Result<i64> {
            fields
                .get(i)
                .ok_or_else(|| err("missing field"))?
                .parse::<i64>()
                .map_err(|_| err("expected an integer"))
        };
        let idx_field = |i: usize| -> Result<usize> {
            let x = num(i)?;
            usize::try_from(x).map_err(|_| err("negative identifier"))
        };
        match tag {
            "c" => {
                if fields.get(1) == Some(&"deleted") {
                    deleted.push(idx_field(2)?);
                }
            }
            "p" => {
                if seen_header {
                    return Err(err("duplicate header"));
                }
                if fields.get(1) != Some(&"vc") {
                    return Err(err("header must be `p vc <n> <m>`"));
                }
                doc.graph = Graph::with_vertices(idx_field(2)?);
                declared_edges = Some(idx_field(3)?);
                seen_header = true;
            }
            "e" => {
                if !seen_header {
                    return Err(err("edge before header"));
                }
                let (u, v) = (idx_field(1)?, idx_field(2)?);
                if u >= doc.graph.id_bound() || v >= doc.graph.id_bound() {
                    return Err(err("endpoint out of range"));
                }
                if !doc.graph.add_edge(u, v).map_err(|e| err(&e.to_string()))? {
                    return Err(err("parallel edge"));
                }
            }
            "k" => doc.budget = Some(num(1)?),
            "d" => doc.incomplete.push((idx_field(1)?, idx_field(2)?)),
            _ => return Err(err("unknown line tag")),
        }
    }
    if !seen_header {
        return Err(Error::Parse {
            line: 0,
            msg: "missing `p vc <n> <m>` header".into(),
        });
    }
    if declared_edges != Some(doc.graph.edge_count()) {
        return Err(Error::Parse {
            line: 0,
            msg: format!(
                "header declares {} edges, found {}",
                declared_edges.unwrap_or(0),
                doc.graph.edge_count()
            ),
        });
    }
    for v in deleted {
        if doc.graph.contains(v) {
            if doc.graph.degree(v) > 0 {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("deleted vertex {v} has edges"),
                });
            }
            doc.graph.adj[v] = None;
        }
    }
    Ok(doc)
}

/// Bit-level adjacency over the live vertices of a graph, used by the
/// oracle. `index[i]` is the graph vertex at bit `i`.
pub(crate) struct BitGraph {
    pub adj: Vec<u32>,
    pub index: Vec<usize>,
}

impl BitGraph {
    pub fn new(g: &Graph) -> Result<BitGraph> {
        let index: Vec<usize> = g.vertices().collect();
        if index.len() > ORACLE_CAP {
            return Err(Error::Capacity {
                what: "oracle graph",
                size: index.len(),
                cap: ORACLE_CAP,
            });
        }
        let mut pos = vec![usize::MAX; g.id_bound()];
        for (i, &v) in index.iter().enumerate() {
            pos[v] = i;
        }
        let adj = index
            .iter()
            .map(|&v| g.neighbors(v).fold(0u32, |m, u| m | 1 << pos[u]))
            .collect();
        Ok(BitGraph { adj, index })
    }

    pub fn full(&self) -> u32 {
        low_mask(self.adj.len())
    }
}

pub(crate) fn low_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Minimum vertex cover of the subgraph induced by `alive`, as a bit set.
pub(crate) fn min_cover_mask(adj: &[u32], alive: u32) -> u32 {
    let mut best = alive;
    let mut bound = alive.count_ones();
    cover_search(adj, alive, 0, &mut best, &mut bound);
    best
}

/// Size of a minimum vertex cover of the subgraph induced by `alive`.
pub(crate) fn min_cover_size(adj: &[u32], alive: u32) -> u32 {
    min_cover_mask(adj, alive).count_ones()
}

fn cover_search(adj: &[u32], mut alive: u32, mut taken: u32, best: &mut u32, bound: &mut u32) {
    // Forced moves: isolated vertices leave, a degree-1 vertex's neighbor joins.
    loop {
        let mut changed = false;
        let mut rest = alive;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if alive & (1 << v) == 0 {
                continue;
            }
            let nb = adj[v] & alive;
            match nb.count_ones() {
                0 => {
                    alive &= !(1 << v);
                    changed = true;
                }
                1 => {
                    taken |= nb;
                    alive &= !(nb | 1 << v);
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }
    if taken.count_ones() >= *bound {
        return;
    }
    if alive == 0 {
        *bound = taken.count_ones();
        *best = taken;
        return;
    }
    // Branch on a maximum degree vertex: take it, or take all its neighbors.
    let mut v = alive.trailing_zeros() as usize;
    let mut rest = alive;
    while rest != 0 {
        let u = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if (adj[u] & alive).count_ones() > (adj[v] & alive).count_ones() {
            v = u;
        }
    }
    let nb = adj[v] & alive;
    // Lower bound: a cover needs at least (remaining edges) / (max degree).
    let deg = nb.count_ones();
    let edges: u32 = bits(alive)
        .map(|u| (adj[u] & alive).count_ones())
        .sum::<u32>()
        / 2;
    if taken.count_ones() + edges.div_ceil(deg) >= *bound {
        return;
    }
    cover_search(adj, alive & !(1 << v), taken | 1 << v, best, bound);
    cover_search(adj, alive & !(nb | 1 << v), taken | nb, best, bound);
}

pub(crate) fn bits(mut m: u32) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

/// Exact minimum vertex cover size.
pub fn vc_oracle(g: &Graph) -> Result<usize> {
    let bg = BitGraph::new(g)?;
    Ok(min_cover_size(&bg.adj, bg.full()) as usize)
}

/// An explicit minimum vertex cover.
pub fn min_vertex_cover(g: &Graph) -> Result<BTreeSet<usize>> {
    let bg = BitGraph::new(g)?;
    Ok(bits(min_cover_mask(&bg.adj, bg.full()))
        .map(|i| bg.index[i])
        .collect())
}

/// A minimum vertex cover of a graph of any size: components within the
/// oracle cap go to the oracle, larger ones are split by branching on a
/// vertex of maximum degree (take it, or take all its neighbors).
pub fn exact_cover(g: &Graph) -> BTreeSet<usize> {
    let mut seen = BTreeSet::new();
    let mut cover = BTreeSet::new();
    for v in g.vertices() {
        if seen.contains(&v) {
            continue;
        }
        let comp = g.component(v);
        seen.extend(comp.iter().copied());
        let others: Vec<usize> = g.vertices().filter(|u| !comp.contains(u)).collect();
        let sub = g.delete_vertices(&others).expect("vertices exist");
        cover.extend(large_cover(&sub));
    }
    cover
}

fn large_cover(g: &Graph) -> BTreeSet<usize> {
    if g.vertex_count() <= ORACLE_CAP {
        return min_vertex_cover(g).expect("within the oracle cap");
    }
    let v = g
        .vertices()
        .max_by_key(|&v| (g.degree(v), std::cmp::Reverse(v)))
        .expect("nonempty graph");
    if g.degree(v) == 0 {
        return BTreeSet::new();
    }
    let nbrs: Vec<usize> = g.neighbors(v).collect();
    let mut with_v = exact_cover(&g.delete_vertices(&[v]).expect("vertex exists"));
    with_v.insert(v);
    let mut closed = nbrs.clone();
    closed.push(v);
    let mut with_nbrs = exact_cover(&g.delete_vertices(&closed).expect("vertices exist"));
    with_nbrs.extend(nbrs);
    if with_nbrs.len() < with_v.len() {
        with_nbrs
    } else {
        with_v
    }
}

/// A random graph of maximum degree 3 on `n` vertices: `attempts` random
/// vertex pairs are tried and kept when both ends still have room.
pub fn random_subcubic(n: usize, attempts: usize, rng: &mut impl rand::Rng) -> Graph {
    let mut g = Graph::with_vertices(n);
    if n < 2 {
        return g;
    }
    for _ in 0..attempts {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v && g.degree(u) < 3 && g.degree(v) < 3 {
            g.add_edge(u, v).expect("distinct vertices");
        }
    }
    g
}

/// Every simple cycle with 3 to `max_len` vertices, once each. A cycle is
/// reported starting at its smallest vertex and continuing toward the smaller
/// of that vertex's two cycle neighbors.
pub fn enumerate_cycles(g: &Graph, max_len: usize) -> Vec<Vec<usize>> {
    let max_len = max_len.min(MAX_CYCLE_LEN);
    let mut out = Vec::new();
    let mut path = Vec::with_capacity(max_len);
    for s in g.vertices() {
        path.push(s);
        extend_cycle(g, s, max_len, &mut path, &mut out);
        path.pop();
    }
    out
}

fn extend_cycle(
    g: &Graph,
    s: usize,
    max_len: usize,
    path: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let last = *path.last().expect("nonempty path");
    for x in g.neighbors(last) {
        if x == s && path.len() >= 3 && path[1] < last {
            out.push(path.clone());
        } else if x > s && path.len() < max_len && !path.contains(&x) {
            path.push(x);
            extend_cycle(g, s, max_len, path, out);
            path.pop();
        }
    }
}

/// Edges of a cycle given as a vertex sequence, normalized `(min, max)`.
pub fn cycle_edges(cycle: &[usize]) -> Vec<(usize, usize)> {
    (0..cycle.len())
        .map(|i| {
            let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
            (a.min(b), a.max(b))
        })
        .collect()
}
