//! Expansion trees and matching them against concrete instances.
//!
//! Isomorphic configurations share a single node, so the structure is a DAG.
//! A link to a shared node carries `relabel`, mapping each vertex of the
//! target node's configuration to the vertex it corresponds to in the child
//! produced by expanding the parent.

use serde::{Deserialize, Serialize};

use crate::config::{ChildLabel, LocalConfiguration};
use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionTree {
    pub root: usize,
    pub nodes: Vec<TreeNode>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    #[serde(with = "config_repr")]
    pub config: LocalConfiguration,
    pub kind: NodeKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Expanded {
        selected: usize,
        children: Vec<ChildLink>,
    },
    /// Index into the owning table's leaf array.
    Leaf(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChildLink {
    pub label: ChildLabel,
    /// `None` when the child was pruned as unreachable under the table's
    /// subspace assertions.
    pub target: Option<usize>,
    pub relabel: Vec<usize>,
}

impl ExpansionTree {
    /// Walks from the root to a leaf, extending the embedding `anchor`
    /// (root configuration vertex -> instance vertex) one resolved edge at a
    /// time. Returns the leaf node and the final embedding.
    pub fn match_instance(&self, g: &Graph, anchor: &[usize]) -> Result<(usize, Vec<usize>)> {
        let mut node = self.root;
        let mut phi = anchor.to_vec();
        loop {
            let current = &self.nodes[node];
            debug_assert!(
                embeds(&current.config, g, &phi),
                "node {node} does not embed"
            );
            let (selected, children) = match &current.kind {
                NodeKind::Leaf(_) => return Ok((node, phi)),
                NodeKind::Expanded { selected, children } => (*selected, children),
            };
            let cfg = &current.config;
            let at = phi[selected];
            let resolved = g
                .neighbors(at)
                .find_map(|x| match phi.iter().position(|&p| p == x) {
                    Some(u) if cfg.graph().has_edge(u, selected) => None,
                    Some(u) => Some((x, ChildLabel::Internal(u))),
                    None => Some((x, ChildLabel::New(g.degree(x)))),
                });
            let (x, label) = resolved.ok_or_else(|| {
                Error::CertificateViolation(format!(
                    "node {node}: selected vertex {selected} has no unresolved instance edge"
                ))
            })?;
            let link = children.iter().find(|c| c.label == label).ok_or_else(|| {
                Error::CertificateViolation(format!("node {node}: no child for {label}"))
            })?;
            let target = link.target.ok_or_else(|| {
                Error::CertificateViolation(format!(
                    "node {node}: instance reached child {label}, pruned as unreachable"
                ))
            })?;
            if let ChildLabel::New(_) = label {
                phi.push(x);
            }
            phi = link.relabel.iter().map(|&c| phi[c]).collect();
            node = target;
        }
    }
}

/// True when `phi` maps `cfg` into `g` preserving edges and true degrees.
pub fn embeds(cfg: &LocalConfiguration, g: &Graph, phi: &[usize]) -> bool {
    cfg.vertices().all(|v| {
        let x = phi[v];
        g.contains(x)
            && cfg.tdeg(v) == g.degree(x)
            && cfg.graph().neighbors(v).all(|u| g.has_edge(x, phi[u]))
    })
}

/// Finds the first embedding of `root` into `g` in identifier order.
pub fn find_anchor(root: &LocalConfiguration, g: &Graph) -> Option<Vec<usize>> {
    let big = LocalConfiguration::from_graph(g, root.delta().max(g.max_degree())).ok()?;
    crate::config::is_expansion(&big, root)
}

pub(crate) mod config_repr {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::config::LocalConfiguration;
    use crate::graph::Graph;

    #[derive(Serialize, Deserialize)]
    struct Repr {
        vertices: usize,
        edges: Vec<(usize, usize)>,
        d: Vec<usize>,
        delta: usize,
    }

    pub fn serialize<S: Serializer>(c: &LocalConfiguration, s: S) -> Result<S::Ok, S::Error> {
        let n = c.graph().id_bound();
        Repr {
            vertices: n,
            edges: c.graph().edges().collect(),
            d: (0..n).map(|v| c.incomplete(v)).collect(),
            delta: c.delta(),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<LocalConfiguration, D::Error> {
        let r = Repr::deserialize(d)?;
        let g = Graph::from_edges(r.vertices, &r.edges).map_err(serde::de::Error::custom)?;
        LocalConfiguration::new(g, r.d, r.delta).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Lone degree-3 root expanded once; every child is a leaf.
    fn one_level() -> ExpansionTree {
        let root = LocalConfiguration::lone(3, 3);
        let mut nodes = vec![TreeNode {
            config: root.clone(),
            kind: NodeKind::Leaf(0),
        }];
        let mut children = Vec::new();
        for (i, (label, child)) in root.expand().unwrap().into_iter().enumerate() {
            nodes.push(TreeNode {
                config: child,
                kind: NodeKind::Leaf(i + 1),
            });
            children.push(ChildLink {
                label,
                target: Some(i + 1),
                relabel: vec![0, 1],
            });
        }
        nodes[0].kind = NodeKind::Expanded {
            selected: 0,
            children,
        };
        ExpansionTree { root: 0, nodes }
    }

    #[test]
    fn depth_zero_returns_anchor() {
        let t = ExpansionTree {
            root: 0,
            nodes: vec![TreeNode {
                config: LocalConfiguration::lone(3, 3),
                kind: NodeKind::Leaf(0),
            }],
        };
        let g = Graph::complete(4);
        assert_eq!(t.match_instance(&g, &[2]).unwrap(), (0, vec![2]));
    }

    #[test]
    fn k4_descends_new3() {
        let t = one_level();
        let (node, phi) = t.match_instance(&Graph::complete(4), &[0]).unwrap();
        assert_eq!(node, 3);
        assert_eq!(phi, vec![0, 1]);
    }

    #[test]
    fn claw_descends_new1() {
        let t = one_level();
        let claw = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let (node, phi) = t.match_instance(&claw, &[0]).unwrap();
        assert_eq!(node, 1);
        assert_eq!(phi, vec![0, 1]);
    }

    #[test]
    fn anchor_search() {
        let lone = LocalConfiguration::lone(3, 3);
        let claw = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(find_anchor(&lone, &claw), Some(vec![0]));
        assert_eq!(find_anchor(&lone, &Graph::cycle(5)), None);
    }

    #[test]
    fn missing_child_is_certificate_violation() {
        let mut t = one_level();
        if let NodeKind::Expanded { children, .. } = &mut t.nodes[0].kind {
            children.pop();
        }
        let err = t.match_instance(&Graph::complete(4), &[0]).unwrap_err();
        assert!(matches!(err, Error::CertificateViolation(_)));
    }
}
