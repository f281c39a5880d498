//! The recursive generator: attach a rule to a configuration when one
//! exists, otherwise expand it and recurse on the children.

use std::collections::HashMap;
use std::time::Instant;

use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::{
    exact_objective, format_units, round_weights, solve_ilp_within, solve_lp, within_one,
    CoverProblem, LeafRule, Metadata, RuleKind, RuleMode, RuleTable, WEIGHT_SCALE,
};
use crate::boundary::{crucial_set_with, CoverOracle, BOUNDARY_CAP};
use crate::branching::{
    branch_vertices, evaluate_candidates, extend_branches, lemma_for, prune_dominated,
    seed_branches, Branch,
};
use crate::config::{ChildLabel, LocalConfiguration, CONFIG_CAP};
use crate::measure::Measure;
use crate::simplify::config_site;
use crate::subspace::Assertions;
use crate::tree::{ChildLink, ExpansionTree, NodeKind, TreeNode};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Limits {
    pub max_depth: usize,
    pub max_nodes: usize,
    pub max_seconds: f64,
    /// Configurations with at most this many vertices consider every
    /// nonempty vertex subset as a candidate branch, on top of the branches
    /// extended from the parent.
    pub seed_all_up_to: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_depth: 12,
            max_nodes: 200_000,
            max_seconds: 600.0,
            seed_all_up_to: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenConfig {
    pub measure: Measure,
    pub mode: RuleMode,
    pub delta: usize,
    pub subspace: Option<u8>,
    pub assertions: Assertions,
    pub limits: Limits,
}

impl GenConfig {
    /// A table that serves every instance: no assertions, no subspace.
    pub fn generic(measure: Measure, mode: RuleMode) -> GenConfig {
        GenConfig {
            measure,
            mode,
            delta: 3,
            subspace: None,
            assertions: Assertions::default(),
            limits: Limits::default(),
        }
    }

    pub fn for_subspace(measure: Measure, mode: RuleMode, id: u8) -> GenConfig {
        GenConfig {
            subspace: Some(id),
            assertions: Assertions::for_subspace(id),
            ..GenConfig::generic(measure, mode)
        }
    }
}

/// Solver outcome at one configuration where a rule was attempted.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeRecord {
    pub node: usize,
    pub lp_objective: f64,
    /// Best 0/1 objective not above 1, when the ILP ran and found one.
    pub ilp_objective: Option<f64>,
    pub accepted: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct GenStats {
    pub records: Vec<NodeRecord>,
    pub rules: usize,
    pub simplification_leaves: usize,
    pub constant_leaves: usize,
    pub unreachable_links: usize,
    pub shared_links: usize,
    pub max_depth: usize,
}

#[derive(Clone, Debug)]
pub struct Generation {
    pub table: RuleTable,
    pub stats: GenStats,
}

/// Why generation stopped, with the path of configurations from the root
/// to the one that could not be resolved.
#[derive(Clone, Debug)]
pub struct GenFailure {
    pub reason: String,
    pub chain: Vec<String>,
    pub partial: Box<RuleTable>,
    pub stats: Box<GenStats>,
}

impl std::fmt::Display for GenFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "generation failed: {}", self.reason)?;
        for (i, step) in self.chain.iter().enumerate() {
            writeln!(f, "  {i:>2}: {step}")?;
        }
        Ok(())
    }
}

struct Abort {
    reason: String,
    chain: Vec<String>,
}

struct Generator<'a> {
    cfg: &'a GenConfig,
    lemma: u8,
    start: Instant,
    nodes: Vec<TreeNode>,
    orders: Vec<Option<Vec<usize>>>,
    memo: HashMap<Vec<u8>, usize>,
    leaves: Vec<LeafRule>,
    stats: GenStats,
    chain: Vec<String>,
}

pub fn gensa(root: &LocalConfiguration, cfg: &GenConfig) -> Result<Generation, GenFailure> {
    let mut g = Generator {
        cfg,
        lemma: lemma_for(&cfg.assertions),
        start: Instant::now(),
        nodes: Vec::new(),
        orders: Vec::new(),
        memo: HashMap::new(),
        leaves: Vec::new(),
        stats: GenStats::default(),
        chain: vec![format!("root {root}")],
    };
    let report = cfg.measure.check_feasibility();
    if !report.pass {
        return Err(g.fail(Abort {
            reason: format!("measure is not feasible: {}", report.violations.join(", ")),
            chain: Vec::new(),
        }));
    }
    match g.visit(root.clone(), None, 0) {
        Ok(_) => {
            let table = g.table();
            Ok(Generation {
                table,
                stats: g.stats,
            })
        }
        Err(abort) => Err(g.fail(abort)),
    }
}

impl Generator<'_> {
    fn table(&self) -> RuleTable {
        RuleTable {
            subspace: self.cfg.subspace,
            measure: self.cfg.measure,
            mode: self.cfg.mode,
            delta: self.cfg.delta,
            assertions: self.cfg.assertions,
            tree: ExpansionTree {
                root: 0,
                nodes: self.nodes.clone(),
            },
            leaves: self.leaves.clone(),
            metadata: Metadata {
                limits: self.cfg.limits,
                node_count: self.nodes.len(),
                leaf_count: self.leaves.len(),
                max_depth: self.stats.max_depth,
                shared_links: self.stats.shared_links,
                unreachable_links: self.stats.unreachable_links,
            },
        }
    }

    fn fail(&self, abort: Abort) -> GenFailure {
        GenFailure {
            reason: abort.reason,
            chain: abort.chain,
            partial: Box::new(self.table()),
            stats: Box::new(self.stats.clone()),
        }
    }

    fn abort(&self, reason: String) -> Abort {
        Abort {
            reason,
            chain: self.chain.clone(),
        }
    }

    /// Returns the node for `l` and the map from that node's vertices to `l`'s.
    fn visit(
        &mut self,
        l: LocalConfiguration,
        basis: Option<Vec<Branch>>,
        depth: usize,
    ) -> Result<(usize, Vec<usize>), Abort> {
        let form = l.canonical_form().ok();
        if let Some(form) = &form {
            if let Some(&idx) = self.memo.get(&form.key) {
                let order0 = self.orders[idx]
                    .as_ref()
                    .expect("memoized nodes keep their order");
                let mut relabel = vec![0; l.graph().id_bound()];
                for (i, &x) in order0.iter().enumerate() {
                    relabel[x] = form.order[i];
                }
                self.stats.shared_links += 1;
                return Ok((idx, relabel));
            }
        }
        let idx = self.nodes.len();
        if idx >= self.cfg.limits.max_nodes {
            return Err(self.abort(format!("node limit {} reached", self.cfg.limits.max_nodes)));
        }
        if self.start.elapsed().as_secs_f64() > self.cfg.limits.max_seconds {
            return Err(self.abort(format!(
                "time limit of {} s reached",
                self.cfg.limits.max_seconds
            )));
        }
        self.stats.max_depth = self.stats.max_depth.max(depth);
        self.nodes.push(TreeNode {
            config: l.clone(),
            kind: NodeKind::Leaf(usize::MAX),
        });
        if let Some(form) = form {
            self.memo.insert(form.key, idx);
            self.orders.push(Some(form.order));
        } else {
            self.orders.push(None);
        }
        let identity: Vec<usize> = (0..l.graph().id_bound()).collect();

        if let Some(site) = config_site(&l) {
            self.stats.simplification_leaves += 1;
            self.set_leaf(
                idx,
                LeafRule::marker(RuleKind::Simplification { rule: site.rule }),
            );
            return Ok((idx, identity));
        }
        if l.boundary().is_empty() {
            self.stats.constant_leaves += 1;
            self.set_leaf(idx, LeafRule::marker(RuleKind::Constant));
            return Ok((idx, identity));
        }
        let (rule, survivors) = self.try_rule(idx, &l, basis);
        if let Some(rule) = rule {
            self.stats.rules += 1;
            self.set_leaf(idx, rule);
            return Ok((idx, identity));
        }
        if depth >= self.cfg.limits.max_depth {
            return Err(self.abort(format!(
                "depth limit {} reached without a rule",
                self.cfg.limits.max_depth
            )));
        }
        let selected = l.selected_vertex().expect("nonempty boundary");
        let children = l
            .expand()
            .map_err(|e| self.abort(format!("expansion failed: {e}")))?;
        let mut links = Vec::with_capacity(children.len());
        for (label, child) in children {
            if self.cfg.assertions.forbids(&child) {
                self.stats.unreachable_links += 1;
                links.push(ChildLink {
                    label,
                    target: None,
                    relabel: Vec::new(),
                });
                continue;
            }
            let other = match label {
                ChildLabel::Internal(u) => u,
                ChildLabel::New(_) => child.graph().id_bound() - 1,
            };
            let child_basis = extend_branches(&survivors, selected, other);
            self.chain.push(format!("{label} -> {child}"));
            let (target, relabel) = self.visit(child, Some(child_basis), depth + 1)?;
            self.chain.pop();
            links.push(ChildLink {
                label,
                target: Some(target),
                relabel,
            });
        }
        self.nodes[idx].kind = NodeKind::Expanded {
            selected,
            children: links,
        };
        Ok((idx, identity))
    }

    fn set_leaf(&mut self, idx: usize, rule: LeafRule) {
        self.nodes[idx].kind = NodeKind::Leaf(self.leaves.len());
        self.leaves.push(rule);
    }

    /// Builds, prunes and solves the branch set of `l`. Returns the rule if
    /// one meets the objective bound, and the surviving branches either way.
    fn try_rule(
        &mut self,
        idx: usize,
        l: &LocalConfiguration,
        basis: Option<Vec<Branch>>,
    ) -> (Option<LeafRule>, Vec<Branch>) {
        let mut branches = basis.clone().unwrap_or_default();
        if basis.is_none() || l.vertex_count() <= self.cfg.limits.seed_all_up_to {
            if let Ok(all) = seed_branches(l) {
                branches.extend(all);
            }
        }
        branches.sort_unstable();
        branches.dedup();
        if l.boundary().len() > BOUNDARY_CAP || l.vertex_count() > CONFIG_CAP {
            return (None, branches);
        }
        let Ok(oracle) = CoverOracle::new(l) else {
            return (None, branches);
        };
        let Ok(reqs) = crucial_set_with(l, &oracle) else {
            return (None, branches);
        };
        let cands =
            evaluate_candidates(l, &branches, &reqs, &oracle, &self.cfg.measure, self.lemma);
        let kept = prune_dominated(cands);
        let survivors: Vec<Branch> = kept.iter().map(|c| c.branch).collect();
        let problem = CoverProblem {
            requirements: reqs.len(),
            costs: kept.iter().map(|c| c.cost).collect(),
            covers: kept
                .iter()
                .map(|c| (0..reqs.len()).filter(|&r| c.eb.contains(r)).collect())
                .collect(),
        };
        if !problem.uncovered().is_empty() {
            return (None, survivors);
        }
        let Ok(lp) = solve_lp(&problem) else {
            return (None, survivors);
        };
        let mut record = NodeRecord {
            node: idx,
            lp_objective: lp.objective,
            ilp_objective: None,
            accepted: false,
        };
        let rule = match self.cfg.mode {
            RuleMode::Randomized => {
                let units = round_weights(&problem, &lp.weights);
                let weights: Vec<BigRational> = units
                    .iter()
                    .map(|&u| BigRational::new(u.into(), WEIGHT_SCALE.into()))
                    .collect();
                let exact = exact_objective(&weights, &problem.costs);
                within_one(&exact).then(|| {
                    let chosen: Vec<usize> = (0..units.len()).filter(|&j| units[j] > 0).collect();
                    LeafRule {
                        kind: RuleKind::Randomized,
                        branches: chosen
                            .iter()
                            .map(|&j| branch_vertices(survivors[j]))
                            .collect(),
                        weights: chosen.iter().map(|&j| format_units(units[j])).collect(),
                        objective: Some(
                            num_traits::ToPrimitive::to_f64(&exact).unwrap_or(f64::MAX),
                        ),
                    }
                })
            }
            RuleMode::Deterministic => {
                let ilp = if lp.objective <= 1.0 + 1e-9 {
                    solve_ilp_within(&problem, 1.0).ok().flatten()
                } else {
                    None
                };
                record.ilp_objective = ilp.as_ref().map(|s| s.objective);
                ilp.and_then(|s| {
                    let ones = vec![BigRational::one(); s.selected.len()];
                    let costs: Vec<f64> = s.selected.iter().map(|&j| problem.costs[j]).collect();
                    let exact = exact_objective(&ones, &costs);
                    within_one(&exact).then(|| LeafRule {
                        kind: RuleKind::Deterministic,
                        branches: s
                            .selected
                            .iter()
                            .map(|&j| branch_vertices(survivors[j]))
                            .collect(),
                        weights: vec!["1".to_string(); s.selected.len()],
                        objective: Some(
                            num_traits::ToPrimitive::to_f64(&exact).unwrap_or(f64::MAX),
                        ),
                    })
                })
            }
        };
        record.accepted = rule.is_some();
        self.stats.records.push(record);
        (rule, survivors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::measure::Rational;

    #[test]
    fn pure_k_edge_branching() {
        let cfg = GenConfig::generic(Measure::pure_k(), RuleMode::Deterministic);
        let out = gensa(&LocalConfiguration::lone(3, 3), &cfg).unwrap();
        let t = &out.table;
        assert!(t
            .leaves
            .iter()
            .all(|r| r.objective.is_none_or(|o| o <= 1.0)));
        let rules: Vec<&LeafRule> = t.leaves.iter().filter(|r| r.is_branching()).collect();
        assert!(!rules.is_empty());
        for r in rules {
            assert_eq!(r.branches.len(), 2);
            assert_eq!(r.objective, Some(1.0));
        }
    }

    #[test]
    fn empty_boundary_is_constant_leaf() {
        let l = LocalConfiguration::from_graph(&Graph::complete(4), 3).unwrap();
        let cfg = GenConfig::generic(Measure::pure_k(), RuleMode::Deterministic);
        let out = gensa(&l, &cfg).unwrap();
        assert_eq!(out.table.tree.nodes.len(), 1);
        assert_eq!(out.table.leaves[0].kind, RuleKind::Constant);
    }

    #[test]
    fn tiny_weight_fails_with_chain() {
        let m = Measure::n_mode(
            Rational::from_integer(0),
            Rational::from_integer(0),
            Rational::new(1, 1000),
        );
        let mut cfg = GenConfig::for_subspace(m, RuleMode::Randomized, 19);
        cfg.limits.max_depth = 3;
        let err = gensa(&LocalConfiguration::lone(3, 3), &cfg).unwrap_err();
        assert!(err.reason.contains("depth limit"));
        assert_eq!(err.chain.len(), 4);
    }

    #[test]
    fn infeasible_measure_is_rejected() {
        let m = Measure::k_mode(
            Rational::new(178, 1000),
            Rational::new(1, 100),
            Rational::new(-89, 1000),
        );
        let cfg = GenConfig::generic(m, RuleMode::Deterministic);
        let err = gensa(&LocalConfiguration::lone(3, 3), &cfg).unwrap_err();
        assert!(err.reason.contains("not feasible"));
    }

    #[test]
    fn star_rule_for_cubic_girth_nine() {
        let m = Measure::n_mode(
            Rational::from_integer(0),
            Rational::from_integer(0),
            Rational::new(1, 4),
        );
        let cfg = GenConfig::for_subspace(m, RuleMode::Deterministic, 19);
        let out = gensa(&LocalConfiguration::lone(3, 3), &cfg).unwrap();
        assert!(out.table.leaves.iter().any(|r| r.is_branching()));
    }

    #[test]
    fn deterministic_serialization() {
        let cfg = GenConfig::generic(Measure::pure_k(), RuleMode::Randomized);
        let a = gensa(&LocalConfiguration::lone(3, 3), &cfg)
            .unwrap()
            .table
            .to_json()
            .unwrap();
        let b = gensa(&LocalConfiguration::lone(3, 3), &cfg)
            .unwrap()
            .table
            .to_json()
            .unwrap();
        assert_eq!(a, b);
        assert_eq!(RuleTable::from_json(&a).unwrap().to_json().unwrap(), a);
    }
}
