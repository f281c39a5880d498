//! Independent re-checking of a rule table: every leaf rule is re-derived
//! from its configuration and every expanded node is compared with a fresh
//! expansion.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::{exact_objective, within_one, RuleKind, RuleMode, RuleTable};
use crate::boundary::{crucial_set_with, CoverOracle};
use crate::branching::{branch_from, cost_bound_with_lemma, lemma_for};
use crate::config::LocalConfiguration;
use crate::measure::FeasibilityReport;
use crate::simplify::config_site;
use crate::subspace::{root_config, Assertions};
use crate::tree::NodeKind;

#[derive(Clone, Debug, PartialEq)]
pub struct LeafCheck {
    pub leaf: usize,
    pub node: usize,
    pub kind: RuleKind,
    /// Exact weighted cost sum, for branching rules.
    pub objective: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NodeCheck {
    pub node: usize,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub pass: bool,
    pub feasibility: FeasibilityReport,
    pub leaves: Vec<LeafCheck>,
    pub nodes: Vec<NodeCheck>,
    /// Table-wide problems such as a wrong root.
    pub problems: Vec<String>,
}

impl Certificate {
    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> = self.problems.clone();
        if !self.feasibility.pass {
            out.push(format!(
                "measure infeasible: {}",
                self.feasibility.violations.join(", ")
            ));
        }
        for n in &self.nodes {
            if let Some(e) = &n.error {
                out.push(format!("node {}: {e}", n.node));
            }
        }
        for l in &self.leaves {
            if let Some(e) = &l.error {
                out.push(format!("leaf {} (node {}): {e}", l.leaf, l.node));
            }
        }
        out
    }

    pub fn max_objective(&self) -> Option<f64> {
        self.leaves
            .iter()
            .filter_map(|l| l.objective)
            .reduce(f64::max)
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verdict: {}", if self.pass { "PASS" } else { "FAIL" })?;
        writeln!(
            f,
            "nodes: {}, leaves: {}, largest objective: {}",
            self.nodes.len(),
            self.leaves.len(),
            self.max_objective()
                .map_or("-".into(), |o| format!("{o:.9}"))
        )?;
        for l in &self.leaves {
            if let Some(o) = l.objective {
                writeln!(f, "leaf {} (node {}): objective {o:.9}", l.leaf, l.node)?;
            }
        }
        for failure in self.failures() {
            writeln!(f, "FAIL {failure}")?;
        }
        Ok(())
    }
}

pub fn verify_table(t: &RuleTable) -> Certificate {
    let feasibility = t.measure.check_feasibility();
    let mut problems = Vec::new();
    let nodes = &t.tree.nodes;
    if t.tree.root >= nodes.len() {
        problems.push(format!("root index {} out of range", t.tree.root));
    }
    if let Some(id) = t.subspace {
        if t.assertions != Assertions::for_subspace(id) {
            problems.push(format!("assertions do not match subspace P{id}"));
        }
        match root_config(id) {
            Ok(root) if nodes.get(t.tree.root).is_some_and(|n| n.config == root) => {}
            _ => problems.push(format!("root configuration is not the P{id} root")),
        }
    }
    let lemma = lemma_for(&t.assertions);
    let mut node_checks = Vec::new();
    let mut leaf_checks = Vec::new();
    let mut used = vec![false; t.leaves.len()];
    for (i, node) in nodes.iter().enumerate() {
        let l = &node.config;
        match &node.kind {
            NodeKind::Leaf(li) => {
                let Some(rule) = t.leaves.get(*li) else {
                    node_checks.push(NodeCheck {
                        node: i,
                        error: Some(format!("leaf index {li} out of range")),
                    });
                    continue;
                };
                used[*li] = true;
                node_checks.push(NodeCheck {
                    node: i,
                    error: None,
                });
                let (objective, error) = check_leaf(t, l, rule, lemma);
                leaf_checks.push(LeafCheck {
                    leaf: *li,
                    node: i,
                    kind: rule.kind,
                    objective,
                    error,
                });
            }
            NodeKind::Expanded { selected, children } => {
                let error = check_expansion(t, l, *selected, children).err();
                node_checks.push(NodeCheck { node: i, error });
            }
        }
    }
    if let Some(li) = used.iter().position(|u| !u) {
        problems.push(format!("leaf {li} is attached to no node"));
    }
    let pass = feasibility.pass
        && problems.is_empty()
        && node_checks.iter().all(|n| n.error.is_none())
        && leaf_checks.iter().all(|l| l.error.is_none());
    Certificate {
        pass,
        feasibility,
        leaves: leaf_checks,
        nodes: node_checks,
        problems,
    }
}

fn check_expansion(
    t: &RuleTable,
    l: &LocalConfiguration,
    selected: usize,
    children: &[crate::tree::ChildLink],
) -> Result<(), String> {
    if l.selected_vertex() != Some(selected) {
        return Err(format!(
            "selected vertex {selected}, expansion selects {:?}",
            l.selected_vertex()
        ));
    }
    let expected = l.expand().map_err(|e| e.to_string())?;
    if expected.len() != children.len() {
        return Err(format!(
            "{} children recorded, expansion has {}",
            children.len(),
            expected.len()
        ));
    }
    for ((label, child), link) in expected.iter().zip(children) {
        if *label != link.label {
            return Err(format!(
                "child {} recorded where {label} expected",
                link.label
            ));
        }
        match link.target {
            None => {
                if !t.assertions.forbids(child) {
                    return Err(format!("child {label} marked unreachable but is allowed"));
                }
            }
            Some(target) => {
                let Some(node) = t.tree.nodes.get(target) else {
                    return Err(format!("child {label} points to missing node {target}"));
                };
                let n = node.config.graph().id_bound();
                let mut seen = vec![false; child.graph().id_bound()];
                let bijective = link.relabel.len() == n
                    && n == seen.len()
                    && link
                        .relabel
                        .iter()
                        .all(|&x| x < n && !std::mem::replace(&mut seen[x], true));
                if !bijective {
                    return Err(format!("child {label} has a malformed relabelling"));
                }
                match node.config.permuted(&link.relabel) {
                    Ok(p) if p == *child => {}
                    _ => return Err(format!("child {label} does not match node {target}")),
                }
            }
        }
    }
    Ok(())
}

fn check_leaf(
    t: &RuleTable,
    l: &LocalConfiguration,
    rule: &super::LeafRule,
    lemma: u8,
) -> (Option<f64>, Option<String>) {
    match rule.kind {
        RuleKind::Simplification { rule: id } => match config_site(l) {
            Some(site) if site.rule == id => (None, None),
            other => (
                None,
                Some(format!(
                    "simplification rule {id} recorded, configuration gives {:?}",
                    other.map(|s| s.rule)
                )),
            ),
        },
        RuleKind::Constant => {
            if l.boundary().is_empty() {
                (None, None)
            } else {
                (None, Some("constant leaf with a nonempty boundary".into()))
            }
        }
        RuleKind::Randomized | RuleKind::Deterministic => {
            match check_branching(t, l, rule, lemma) {
                Ok(obj) => (Some(obj), None),
                Err((obj, e)) => (obj, Some(e)),
            }
        }
    }
}

type LeafFailure = (Option<f64>, String);

fn check_branching(
    t: &RuleTable,
    l: &LocalConfiguration,
    rule: &super::LeafRule,
    lemma: u8,
) -> Result<f64, LeafFailure> {
    let fail = |e: String| (None, e);
    let expected_kind = match t.mode {
        RuleMode::Randomized => RuleKind::Randomized,
        RuleMode::Deterministic => RuleKind::Deterministic,
    };
    if rule.kind != expected_kind {
        return Err(fail(format!("{:?} rule in a {} table", rule.kind, t.mode)));
    }
    if rule.branches.len() != rule.weights.len() {
        return Err(fail("branch and weight counts differ".into()));
    }
    let weights = rule.weight_values().map_err(|e| fail(e.to_string()))?;
    for w in &weights {
        let ok = match t.mode {
            RuleMode::Deterministic => w.is_one(),
            RuleMode::Randomized => *w >= BigRational::zero() && *w <= BigRational::one(),
        };
        if !ok {
            return Err(fail(format!(
                "weight {w} not allowed in a {} table",
                t.mode
            )));
        }
    }
    let mut branches = Vec::new();
    for b in &rule.branches {
        if b.is_empty() || b.iter().any(|&v| !l.graph().contains(v)) {
            return Err(fail(format!(
                "branch {b:?} is not a nonempty vertex set of the leaf"
            )));
        }
        branches.push(branch_from(b));
    }
    let oracle = CoverOracle::new(l).map_err(|e| fail(e.to_string()))?;
    let reqs = crucial_set_with(l, &oracle).map_err(|e| fail(e.to_string()))?;
    let costs: Vec<f64> = branches
        .iter()
        .map(|&b| cost_bound_with_lemma(l, b, &t.measure, lemma).cost())
        .collect();
    let exact = exact_objective(&weights, &costs);
    let objective = exact.to_f64().unwrap_or(f64::MAX);
    for &r in &reqs {
        let covered = branches
            .iter()
            .zip(&weights)
            .filter(|(&b, _)| oracle.satisfies(b, r))
            .fold(BigRational::zero(), |a, (_, w)| a + w);
        if covered < BigRational::one() {
            let verts: Vec<usize> = crate::graph::bits(r).collect();
            return Err((
                Some(objective),
                format!("coverage violation: requirement {verts:?} has weight {covered}"),
            ));
        }
    }
    if !within_one(&exact) {
        return Err((
            Some(objective),
            format!("objective {objective:.12} exceeds 1"),
        ));
    }
    Ok(objective)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Measure;
    use crate::rulegen::{gensa, GenConfig};
    use crate::tree::NodeKind;

    fn table() -> RuleTable {
        let cfg = GenConfig::generic(Measure::pure_k(), RuleMode::Randomized);
        gensa(&LocalConfiguration::lone(3, 3), &cfg).unwrap().table
    }

    #[test]
    fn generated_table_passes() {
        let cert = verify_table(&table());
        assert!(cert.pass, "{cert}");
    }

    #[test]
    fn lowered_weight_fails_coverage() {
        let mut t = table();
        let li = t.leaves.iter().position(|r| r.is_branching()).unwrap();
        t.leaves[li].weights[0] = "0.5".into();
        let cert = verify_table(&t);
        assert!(!cert.pass);
        let bad = cert.leaves.iter().find(|l| l.leaf == li).unwrap();
        assert!(bad.error.as_ref().unwrap().contains("coverage"));
    }

    #[test]
    fn removed_child_fails_cover_check() {
        let mut t = table();
        let ni = t
            .tree
            .nodes
            .iter()
            .position(|n| matches!(n.kind, NodeKind::Expanded { .. }))
            .unwrap();
        if let NodeKind::Expanded { children, .. } = &mut t.tree.nodes[ni].kind {
            children.pop();
        }
        let cert = verify_table(&t);
        assert!(!cert.pass);
        assert!(cert.nodes[ni].error.is_some());
    }
}
