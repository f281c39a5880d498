//! Executing rule tables, either as repeated randomized walks or as a
//! deterministic search over every branch.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use log::warn;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{exact_cover, Graph, Instance};
use crate::measure::Measure;
use crate::rulegen::{verify_table, RuleKind, RuleMode, RuleTable};
use crate::simplify::{simplify, Reduction};
use crate::subspace::classify;
use crate::tree::{find_anchor, NodeKind};

/// Certified tables indexed by subspace, with an optional table serving
/// every subspace that has none of its own.
#[derive(Clone, Debug)]
pub struct TableSet {
    generic: Option<RuleTable>,
    by_subspace: BTreeMap<u8, RuleTable>,
    measure: Measure,
    mode: RuleMode,
}

impl TableSet {
    /// Accepts only tables whose certificate passes and which agree on the
    /// measure and the mode.
    pub fn new(tables: Vec<RuleTable>) -> Result<TableSet> {
        let first = tables
            .first()
            .ok_or_else(|| Error::InvalidInput("no rule tables given".into()))?;
        let (measure, mode) = (first.measure, first.mode);
        let mut set = TableSet {
            generic: None,
            by_subspace: BTreeMap::new(),
            measure,
            mode,
        };
        for t in tables {
            let cert = verify_table(&t);
            if !cert.pass {
                return Err(Error::CertificateViolation(format!(
                    "table for {} is not certified: {}",
                    t.subspace
                        .map_or("all subspaces".into(), crate::subspace::name),
                    cert.failures().join("; ")
                )));
            }
            if t.measure != measure || t.mode != mode {
                return Err(Error::InvalidInput(
                    "rule tables disagree on measure or mode".into(),
                ));
            }
            let slot = match t.subspace {
                None => set.generic.replace(t),
                Some(id) => set.by_subspace.insert(id, t),
            };
            if slot.is_some() {
                return Err(Error::InvalidInput(
                    "two tables for the same subspace".into(),
                ));
            }
        }
        Ok(set)
    }

    pub fn measure(&self) -> &Measure {
        &self.measure
    }

    pub fn mode(&self) -> RuleMode {
        self.mode
    }

    /// The table for the instance and its subspace (`None` when only the
    /// generic table is present and no classification was needed).
    fn table_for(&self, g: &Graph) -> Result<(Option<u8>, &RuleTable)> {
        if self.by_subspace.is_empty() {
            if let Some(t) = &self.generic {
                return Ok((None, t));
            }
        }
        let id = classify(g)?;
        self.by_subspace
            .get(&id)
            .or(self.generic.as_ref())
            .map(|t| (Some(id), t))
            .ok_or_else(|| Error::InvalidInput(format!("no rule table covers subspace P{id}")))
    }
}

/// One branching decision of a walk.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceStep {
    pub subspace: Option<u8>,
    pub leaf: usize,
    pub branch: Vec<usize>,
    pub probability: f64,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = self.subspace.map_or("*".into(), crate::subspace::name);
        let branch: Vec<String> = self.branch.iter().map(|v| v.to_string()).collect();
        write!(
            f,
            "{sub} {} {{{}}} {}",
            self.leaf,
            branch.join(","),
            self.probability
        )
    }
}

/// Changes made along a walk, replayed backwards to build a cover.
#[derive(Clone, Debug)]
enum Event {
    Reduce(Reduction),
    Take(Vec<usize>),
}

#[derive(Clone, Debug)]
struct State {
    inst: Instance,
    events: Vec<Event>,
}

enum Step {
    Done(bool),
    /// Branch alternatives: taken vertices, weight, and the child state.
    Branch {
        subspace: Option<u8>,
        leaf: usize,
        options: Vec<(Vec<usize>, f64, State)>,
    },
}

impl State {
    fn new(inst: &Instance) -> Result<State> {
        if inst.graph.max_degree() > 3 {
            return Err(Error::Domain(format!(
                "maximum degree {} above 3",
                inst.graph.max_degree()
            )));
        }
        Ok(State {
            inst: inst.clone(),
            events: Vec::new(),
        })
    }

    fn take(&mut self, vs: Vec<usize>) -> Result<()> {
        self.inst.graph = self.inst.graph.delete_vertices(&vs)?;
        self.inst.budget -= vs.len() as i64;
        self.events.push(Event::Take(vs));
        Ok(())
    }

    fn cover(&self) -> BTreeSet<usize> {
        let mut cover = BTreeSet::new();
        for e in self.events.iter().rev() {
            match e {
                Event::Take(vs) => cover.extend(vs.iter().copied()),
                Event::Reduce(r) => r.lift(&mut cover),
            }
        }
        cover
    }

    /// Simplifies, settles terminal cases and whole components, and returns
    /// either an answer or the branches of the matched rule.
    fn advance(&mut self, tables: &TableSet) -> Result<Step> {
        loop {
            let (reduced, log) = simplify(&self.inst);
            self.inst = reduced;
            self.events.extend(log.into_iter().map(Event::Reduce));
            let g = &self.inst.graph;
            if g.is_edgeless() {
                return Ok(Step::Done(self.inst.budget >= 0));
            }
            if self.inst.budget <= 0 {
                return Ok(Step::Done(false));
            }
            if tables.measure.mode == crate::measure::Mode::K
                && tables.measure.evaluate(&self.inst)? <= num_traits::Zero::zero()
            {
                warn!(
                    "measure is not positive on an instance with {} edges; solving it exactly",
                    g.edge_count()
                );
                let cover = exact_cover(g);
                self.take(cover.into_iter().collect())?;
                continue;
            }
            let (subspace, table) = tables.table_for(g)?;
            let root = &table.tree.nodes[table.tree.root].config;
            let anchor = find_anchor(root, g).ok_or_else(|| {
                Error::CertificateViolation(format!(
                    "root configuration of {} does not embed",
                    subspace.map_or("the generic table".into(), crate::subspace::name)
                ))
            })?;
            let (node, phi) = table.tree.match_instance(g, &anchor)?;
            let NodeKind::Leaf(li) = table.tree.nodes[node].kind else {
                unreachable!("matching stops at leaves");
            };
            let rule = &table.leaves[li];
            match rule.kind {
                RuleKind::Simplification { rule } => {
                    return Err(Error::CertificateViolation(format!(
                        "reached a leaf for simplification rule {rule} on a simplified instance"
                    )));
                }
                RuleKind::Constant => {
                    let leaf_cfg = &table.tree.nodes[node].config;
                    let comp: Vec<usize> = leaf_cfg.vertices().map(|v| phi[v]).collect();
                    let others: Vec<usize> = g.vertices().filter(|v| !comp.contains(v)).collect();
                    let sub = g.delete_vertices(&others)?;
                    let cover = crate::graph::min_vertex_cover(&sub)?;
                    let mut rest: Vec<usize> = comp;
                    rest.retain(|v| !cover.contains(v));
                    self.take(cover.into_iter().collect())?;
                    // The uncovered rest of the component is now isolated.
                    self.inst.graph = self.inst.graph.delete_vertices(&rest)?;
                    continue;
                }
                RuleKind::Randomized | RuleKind::Deterministic => {
                    let weights = rule.weight_values()?;
                    let mut options = Vec::with_capacity(rule.branches.len());
                    for (b, w) in rule.branches.iter().zip(weights) {
                        let mapped: Vec<usize> = b.iter().map(|&v| phi[v]).collect();
                        let mut child = self.clone();
                        child.take(mapped.clone())?;
                        options.push((mapped, w.to_f64().unwrap_or(0.0), child));
                    }
                    return Ok(Step::Branch {
                        subspace,
                        leaf: li,
                        options,
                    });
                }
            }
        }
    }
}

/// Result of one walk or search: the cover witnessing YES, if found.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub cover: Option<BTreeSet<usize>>,
    pub trace: Vec<TraceStep>,
}

impl Outcome {
    pub fn is_yes(&self) -> bool {
        self.cover.is_some()
    }
}

fn finish(original: &Instance, state: &State, yes: bool) -> Result<Option<BTreeSet<usize>>> {
    if !yes {
        return Ok(None);
    }
    let cover = state.cover();
    if !original.graph.is_vertex_cover(&cover) || cover.len() as i64 > original.budget {
        return Err(Error::CertificateViolation(format!(
            "walk ended in YES but built an invalid cover of size {}",
            cover.len()
        )));
    }
    Ok(Some(cover))
}

/// One random root-to-leaf walk. Child `i` is chosen with probability
/// proportional to `w_i * 2^mu(I_i)`.
pub fn rsearch(inst: &Instance, tables: &TableSet, rng: &mut impl Rng) -> Result<Outcome> {
    let m = tables.measure;
    let mut state = State::new(inst)?;
    let mut trace = Vec::new();
    loop {
        match state.advance(tables)? {
            Step::Done(yes) => {
                let cover = finish(inst, &state, yes)?;
                return Ok(Outcome { cover, trace });
            }
            Step::Branch {
                subspace,
                leaf,
                options,
            } => {
                let here = m.evaluate(&state.inst)?;
                let mut scores = Vec::with_capacity(options.len());
                for (_, w, child) in &options {
                    let rel = crate::measure::to_f64(m.evaluate(&child.inst)? - here);
                    scores.push(w * rel.exp2());
                }
                let total: f64 = scores.iter().sum();
                let probs: Vec<f64> = scores.iter().map(|s| s / total).collect();
                debug_assert!((probs.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
                let mut x: f64 = rng.gen::<f64>();
                let mut pick = probs.len() - 1;
                for (i, p) in probs.iter().enumerate() {
                    if x < *p {
                        pick = i;
                        break;
                    }
                    x -= p;
                }
                let (branch, _, child) = options.into_iter().nth(pick).expect("valid pick");
                trace.push(TraceStep {
                    subspace,
                    leaf,
                    branch,
                    probability: probs[pick],
                });
                state = child;
            }
        }
    }
}

/// Number of independent walks and the seed they derive from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrialPlan {
    pub trials: u64,
    pub base_seed: u64,
}

impl TrialPlan {
    /// `ceil(2^mu(I)) * safety` trials, at least one.
    pub fn for_instance(
        inst: &Instance,
        m: &Measure,
        safety: u64,
        base_seed: u64,
    ) -> Result<TrialPlan> {
        let mu = crate::measure::to_f64(m.evaluate(inst)?);
        let base = mu.max(0.0).exp2().ceil();
        let trials = if base >= u64::MAX as f64 {
            u64::MAX
        } else {
            (base as u64).saturating_mul(safety)
        };
        Ok(TrialPlan {
            trials: trials.max(1),
            base_seed,
        })
    }

    /// The generator for trial `i`: one ChaCha stream per trial.
    pub fn rng(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.base_seed);
        rng.set_stream(trial);
        rng
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RandomizedOutcome {
    pub cover: Option<BTreeSet<usize>>,
    pub trials_run: u64,
}

/// YES as soon as one of the planned walks finds a cover.
pub fn solve_randomized(
    inst: &Instance,
    tables: &TableSet,
    plan: &TrialPlan,
) -> Result<RandomizedOutcome> {
    for t in 0..plan.trials {
        let out = rsearch(inst, tables, &mut plan.rng(t))?;
        if out.cover.is_some() {
            return Ok(RandomizedOutcome {
                cover: out.cover,
                trials_run: t + 1,
            });
        }
    }
    Ok(RandomizedOutcome {
        cover: None,
        trials_run: plan.trials,
    })
}

/// Explores every branch of every matched rule.
pub fn solve_deterministic(inst: &Instance, tables: &TableSet) -> Result<Outcome> {
    let state = State::new(inst)?;
    let mut trace = Vec::new();
    let cover = search(inst, tables, state, &mut trace)?;
    Ok(Outcome { cover, trace })
}

fn search(
    original: &Instance,
    tables: &TableSet,
    mut state: State,
    trace: &mut Vec<TraceStep>,
) -> Result<Option<BTreeSet<usize>>> {
    match state.advance(tables)? {
        Step::Done(yes) => finish(original, &state, yes),
        Step::Branch {
            subspace,
            leaf,
            options,
        } => {
            for (branch, w, child) in options {
                if w <= 0.0 {
                    continue;
                }
                trace.push(TraceStep {
                    subspace,
                    leaf,
                    branch,
                    probability: 1.0,
                });
                if let Some(c) = search(original, tables, child, trace)? {
                    return Ok(Some(c));
                }
            }
            Ok(None)
        }
    }
}
