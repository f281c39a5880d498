//! Local configurations: a graph fragment whose vertices carry a count of
//! incomplete edges that lead to the unseen rest of an instance.

use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{parse_document, Graph};

/// Largest configuration canonicalized or branched on.
pub const CONFIG_CAP: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalConfiguration {
    h: Graph,
    d: Vec<usize>,
    delta: usize,
}

/// How a child of [`LocalConfiguration::expand`] resolved the incomplete
/// edge at the selected vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ChildLabel {
    /// The edge ends at this existing boundary vertex.
    Internal(usize),
    /// The edge ends at a fresh vertex of this true degree.
    New(usize),
}

impl fmt::Display for ChildLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChildLabel::Internal(u) => write!(f, "internal({u})"),
            ChildLabel::New(d) => write!(f, "new({d})"),
        }
    }
}

impl LocalConfiguration {
    /// Builds a configuration, checking `deg(v) + d(v) <= delta` everywhere.
    /// `d` is indexed by vertex identifier; entries for absent vertices are ignored.
    pub fn new(h: Graph, mut d: Vec<usize>, delta: usize) -> Result<Self> {
        if d.len() < h.id_bound() {
            return Err(Error::InvalidInput(format!(
                "incomplete-edge counts cover {} of {} vertices",
                d.len(),
                h.id_bound()
            )));
        }
        d.truncate(h.id_bound());
        for (v, dv) in d.iter_mut().enumerate() {
            if !h.contains(v) {
                *dv = 0;
            } else if h.degree(v) + *dv > delta {
                return Err(Error::InvalidInput(format!(
                    "vertex {v} has true degree {} above {delta}",
                    h.degree(v) + d[v]
                )));
            }
        }
        Ok(LocalConfiguration { h, d, delta })
    }

    /// A single vertex with `d` incomplete edges.
    pub fn lone(d: usize, delta: usize) -> Self {
        LocalConfiguration::new(Graph::with_vertices(1), vec![d], delta).expect("valid lone vertex")
    }

    /// An instance graph viewed as a configuration with no incomplete edges.
    pub fn from_graph(g: &Graph, delta: usize) -> Result<Self> {
        LocalConfiguration::new(g.clone(), vec![0; g.id_bound()], delta)
    }

    pub fn graph(&self) -> &Graph {
        &self.h
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn incomplete(&self, v: usize) -> usize {
        if self.h.contains(v) {
            self.d[v]
        } else {
            0
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.h.vertices()
    }

    pub fn vertex_count(&self) -> usize {
        self.h.vertex_count()
    }

    /// Vertices with at least one incomplete edge, in increasing order.
    pub fn boundary(&self) -> Vec<usize> {
        self.h.vertices().filter(|&v| self.d[v] > 0).collect()
    }

    pub fn true_degree(&self, v: usize) -> Result<usize> {
        if !self.h.contains(v) {
            return Err(Error::UnknownVertex(v));
        }
        Ok(self.h.degree(v) + self.d[v])
    }

    pub(crate) fn tdeg(&self, v: usize) -> usize {
        self.h.degree(v) + self.d[v]
    }

    /// The boundary vertex the next expansion resolves: fewest incomplete
    /// edges, then lowest degree in `h`, then smallest identifier.
    pub fn selected_vertex(&self) -> Option<usize> {
        self.boundary()
            .into_iter()
            .min_by_key(|&v| (self.d[v], self.h.degree(v), v))
    }

    /// The expansion cover: one child per way of resolving one incomplete
    /// edge of the selected vertex, either into a non-adjacent boundary vertex
    /// or into a fresh vertex of true degree `1..=delta`.
    pub fn expand(&self) -> Result<Vec<(ChildLabel, LocalConfiguration)>> {
        let v = self.selected_vertex().ok_or_else(|| {
            Error::Contract("expand called on a configuration with an empty boundary".into())
        })?;
        let mut out = Vec::new();
        for u in self.boundary() {
            if u == v || self.h.has_edge(u, v) {
                continue;
            }
            let mut child = self.clone();
            child.h.add_edge(u, v)?;
            child.d[u] -= 1;
            child.d[v] -= 1;
            out.push((ChildLabel::Internal(u), child));
        }
        for dd in 1..=self.delta {
            let mut child = self.clone();
            let u = child.h.add_vertex();
            child.d.push(dd - 1);
            child.h.add_edge(u, v)?;
            child.d[v] -= 1;
            out.push((ChildLabel::New(dd), child));
        }
        Ok(out)
    }

    /// Applies one child label directly, mirroring [`Self::expand`].
    pub fn expand_one(&self, label: ChildLabel) -> Result<LocalConfiguration> {
        self.expand()?
            .into_iter()
            .find(|(l, _)| *l == label)
            .map(|(_, c)| c)
            .ok_or_else(|| Error::Contract(format!("no child labelled {label}")))
    }

    /// Removes `take` from `h`; survivors keep their incomplete-edge counts.
    pub fn remove(&self, take: &[usize]) -> Result<LocalConfiguration> {
        let h = self.h.delete_vertices(take)?;
        let mut d = self.d.clone();
        for &v in take {
            d[v] = 0;
        }
        Ok(LocalConfiguration {
            h,
            d,
            delta: self.delta,
        })
    }

    /// Same configuration with vertex `v` renamed to `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<LocalConfiguration> {
        let n = self.h.id_bound();
        let mut h = Graph::with_vertices(n);
        let mut d = vec![0; n];
        for v in self.h.vertices() {
            d[perm[v]] = self.d[v];
        }
        for (u, v) in self.h.edges() {
            h.add_edge(perm[u], perm[v])?;
        }
        for (v, &p) in perm.iter().enumerate().take(n) {
            if !self.h.contains(v) {
                h.remove_vertex(p)?;
            }
        }
        LocalConfiguration::new(h, d, self.delta)
    }

    pub fn to_text(&self) -> String {
        let mut out = self.h.to_text();
        for v in self.h.vertices() {
            if self.d[v] > 0 {
                let _ = writeln!(out, "d {v} {}", self.d[v]);
            }
        }
        out
    }

    pub fn parse(text: &str, delta: usize) -> Result<LocalConfiguration> {
        let doc = parse_document(text)?;
        let mut d = vec![0; doc.graph.id_bound()];
        for (v, c) in doc.incomplete {
            if !doc.graph.contains(v) {
                return Err(Error::UnknownVertex(v));
            }
            d[v] = c;
        }
        LocalConfiguration::new(doc.graph, d, delta)
    }

    /// Bit-level adjacency of `h`; requires identifiers below 32.
    pub(crate) fn adjacency_bits(&self) -> Vec<u32> {
        (0..self.h.id_bound())
            .map(|v| {
                if self.h.contains(v) {
                    self.h.neighbors(v).fold(0u32, |m, u| m | 1 << u)
                } else {
                    0
                }
            })
            .collect()
    }

    pub(crate) fn vertex_bits(&self) -> u32 {
        self.h.vertices().fold(0u32, |m, v| m | 1 << v)
    }
}

impl fmt::Display for LocalConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self.h.edges().map(|(u, v)| format!("{u}-{v}")).collect();
        let ds: Vec<String> = self
            .h
            .vertices()
            .map(|v| format!("{v}:{}", self.d[v]))
            .collect();
        write!(f, "[{}] d={{{}}}", edges.join(" "), ds.join(" "))
    }
}

/// Searches for an injective map `phi` from `small` into `big` that
/// preserves edges and conserves true degree at every mapped vertex.
/// Returns `phi` indexed by `small`'s vertex identifiers (`usize::MAX` at gaps).
pub fn is_expansion(big: &LocalConfiguration, small: &LocalConfiguration) -> Option<Vec<usize>> {
    let order: Vec<usize> = small.vertices().collect();
    let mut phi = vec![usize::MAX; small.graph().id_bound()];
    let mut used = vec![false; big.graph().id_bound()];
    if embed(big, small, &order, 0, &mut phi, &mut used) {
        Some(phi)
    } else {
        None
    }
}

fn embed(
    big: &LocalConfiguration,
    small: &LocalConfiguration,
    order: &[usize],
    i: usize,
    phi: &mut [usize],
    used: &mut [bool],
) -> bool {
    let Some(&v) = order.get(i) else { return true };
    let sh = small.graph();
    let bh = big.graph();
    for x in bh.vertices() {
        if used[x]
            || big.tdeg(x) != small.tdeg(v)
            || bh.degree(x) < sh.degree(v)
            || order[..i]
                .iter()
                .any(|&u| sh.has_edge(u, v) && !bh.has_edge(phi[u], x))
        {
            continue;
        }
        phi[v] = x;
        used[x] = true;
        if embed(big, small, order, i + 1, phi, used) {
            return true;
        }
        used[x] = false;
        phi[v] = usize::MAX;
    }
    false
}

/// Canonical form of a configuration: `key` is equal for two configurations
/// iff they are isomorphic respecting incomplete-edge counts; `order[i]` is
/// the vertex placed at canonical position `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    pub key: Vec<u8>,
    pub order: Vec<usize>,
}

impl LocalConfiguration {
    pub fn canonical_key(&self) -> Result<Vec<u8>> {
        Ok(self.canonical_form()?.key)
    }

    /// Color refinement on `(d, degree)` fixes a canonical cell order; the
    /// lexicographically smallest adjacency encoding over all orderings that
    /// respect the cells is then found by pruned backtracking.
    pub fn canonical_form(&self) -> Result<CanonicalForm> {
        let verts: Vec<usize> = self.vertices().collect();
        let n = verts.len();
        if n > CONFIG_CAP {
            return Err(Error::Capacity {
                what: "configuration",
                size: n,
                cap: CONFIG_CAP,
            });
        }
        let colors = refine_colors(self, &verts);
        let mut local_adj = vec![0u32; n];
        for (i, &v) in verts.iter().enumerate() {
            for (j, &u) in verts.iter().enumerate() {
                if self.h.has_edge(u, v) {
                    local_adj[i] |= 1 << j;
                }
            }
        }
        let mut search = CanonSearch {
            adj: &local_adj,
            colors: &colors,
            best: None,
            cur: Vec::with_capacity(n),
            cur_code: Vec::with_capacity(n),
        };
        search.run();
        let (code, perm) = search.best.unwrap_or_default();
        let mut key = Vec::with_capacity(2 + 2 * n + 4 * n);
        key.push(self.delta as u8);
        key.push(n as u8);
        for &i in &perm {
            key.push(self.d[verts[i]] as u8);
        }
        for row in code {
            key.extend_from_slice(&row.to_le_bytes());
        }
        Ok(CanonicalForm {
            key,
            order: perm.into_iter().map(|i| verts[i]).collect(),
        })
    }
}

/// Stable refined colors; color values are canonical (derived only from
/// isomorphism-invariant data).
fn refine_colors(l: &LocalConfiguration, verts: &[usize]) -> Vec<u32> {
    let n = verts.len();
    let pos = |v: usize| verts.iter().position(|&x| x == v).expect("vertex present");
    let nbrs: Vec<Vec<usize>> = verts
        .iter()
        .map(|&v| l.h.neighbors(v).map(pos).collect())
        .collect();
    let mut sigs: Vec<Vec<u32>> = verts
        .iter()
        .map(|&v| vec![l.d[v] as u32, l.h.degree(v) as u32])
        .collect();
    let mut colors = rank(&sigs);
    loop {
        sigs = (0..n)
            .map(|i| {
                let mut s: Vec<u32> = nbrs[i].iter().map(|&j| colors[j]).collect();
                s.sort_unstable();
                s.insert(0, colors[i]);
                s
            })
            .collect();
        let next = rank(&sigs);
        let classes = |c: &[u32]| {
            let mut c = c.to_vec();
            c.sort_unstable();
            c.dedup();
            c.len()
        };
        if classes(&next) == classes(&colors) {
            return next;
        }
        colors = next;
    }
}

fn rank(sigs: &[Vec<u32>]) -> Vec<u32> {
    let mut sorted: Vec<&Vec<u32>> = sigs.iter().collect();
    sorted.sort();
    sorted.dedup();
    sigs.iter()
        .map(|s| sorted.binary_search(&s).expect("present") as u32)
        .collect()
}

struct CanonSearch<'a> {
    adj: &'a [u32],
    colors: &'a [u32],
    best: Option<(Vec<u32>, Vec<usize>)>,
    cur: Vec<usize>,
    cur_code: Vec<u32>,
}

impl CanonSearch<'_> {
    /// Row `i` of the code: bit `j` set when positions `i` and `j < i` are adjacent.
    /// Rows compare as larger-is-better so connected orderings win early.
    fn run(&mut self) {
        let n = self.colors.len();
        if self.cur.len() == n {
            let better = match &self.best {
                None => true,
                Some((code, _)) => self.cur_code > *code,
            };
            if better {
                self.best = Some((self.cur_code.clone(), self.cur.clone()));
            }
            return;
        }
        let i = self.cur.len();
        let next_color = (0..n)
            .filter(|v| !self.cur.contains(v))
            .map(|v| self.colors[v])
            .min()
            .expect("unplaced vertex");
        for v in 0..n {
            if self.cur.contains(&v) || self.colors[v] != next_color {
                continue;
            }
            let row = self.cur.iter().enumerate().fold(0u32, |m, (j, &u)| {
                if self.adj[v] & (1 << u) != 0 {
                    m | 1 << j
                } else {
                    m
                }
            });
            self.cur_code.push(row);
            let keep = match &self.best {
                None => true,
                Some((code, _)) => self.cur_code[..] >= code[..=i],
            };
            if keep {
                self.cur.push(v);
                self.run();
                self.cur.pop();
            }
            self.cur_code.pop();
        }
    }
}
