//! Fixtures shared by the integration tests: the configuration corpus and
//! concrete neighbourhoods completing a configuration.

#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vcsynth::config::LocalConfiguration;
use vcsynth::graph::{random_subcubic, Graph, Instance};
use vcsynth::measure::{Measure, Rational};
use vcsynth::simplify::config_site;
use vcsynth::subspace::{root_config, SUBSPACE_COUNT};

/// Every configuration reachable by expansion from a lone vertex or a
/// subspace root, up to isomorphism, with at most `max_vertices` vertices.
pub fn corpus(max_vertices: usize) -> Vec<LocalConfiguration> {
    let mut queue: VecDeque<LocalConfiguration> =
        (1..=3).map(|d| LocalConfiguration::lone(d, 3)).collect();
    for id in 1..=SUBSPACE_COUNT {
        queue.push_back(root_config(id).unwrap());
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    while let Some(l) = queue.pop_front() {
        if l.vertex_count() > max_vertices || !seen.insert(l.canonical_key().unwrap()) {
            continue;
        }
        if !l.boundary().is_empty() {
            for (_, child) in l.expand().unwrap() {
                queue.push_back(child);
            }
        }
        out.push(l);
    }
    out
}

/// A configuration together with one concrete neighbourhood: every
/// incomplete edge now ends in an exterior vertex of known degree.
pub struct Completion {
    /// Configuration vertices keep their identifiers; exterior vertices
    /// follow. Exterior vertices keep the edges they have outside as
    /// incomplete edges.
    pub closed: LocalConfiguration,
    pub inner: usize,
}

impl Completion {
    pub fn degree(&self, v: usize) -> usize {
        self.closed.true_degree(v).unwrap()
    }

    /// Exponent `mu(I - b) - mu(I)` realized on this neighbourhood; vertices
    /// further away keep their degree.
    pub fn realized(&self, m: &Measure, b: u32) -> Rational {
        let g = self.closed.graph();
        let weight = |d: usize| {
            if d == 0 {
                Rational::from_integer(0)
            } else {
                m.beta[d - 1]
            }
        };
        let mut e = m.alpha * -(b.count_ones() as i64);
        for v in g.vertices() {
            let before = weight(self.degree(v));
            if v < self.inner && b >> v & 1 == 1 {
                e -= before;
            } else {
                let lost = g
                    .neighbors(v)
                    .filter(|&u| u < self.inner && b >> u & 1 == 1)
                    .count();
                e += weight(self.degree(v) - lost) - before;
            }
        }
        e
    }

    pub fn has_degree_2(&self) -> bool {
        self.closed.vertices().any(|v| self.degree(v) == 2)
    }

    pub fn has_deg3_with_two_deg2(&self) -> bool {
        let g = self.closed.graph();
        g.vertices().any(|v| {
            self.degree(v) == 3 && g.neighbors(v).filter(|&u| self.degree(u) == 2).count() >= 2
        })
    }
}

/// All ways to attach exterior vertices of degree 2 or 3 to the incomplete
/// edges of `l` such that no simplification rule is certain to fire.
pub fn completions(l: &LocalConfiguration) -> Vec<Completion> {
    let stubs: Vec<usize> = l
        .vertices()
        .flat_map(|v| std::iter::repeat_n(v, l.incomplete(v)))
        .collect();
    let inner = l.graph().id_bound();
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    partitions(&stubs, 0, &mut groups, &mut |groups| {
        let mut key: Vec<Vec<usize>> = groups.to_vec();
        key.sort();
        if !seen.insert(key) {
            return;
        }
        let n = groups.len();
        for mask in 0..1u32 << n {
            let degrees: Vec<usize> = (0..n)
                .map(|i| if mask >> i & 1 == 1 { 3 } else { 2 })
                .collect();
            if groups.iter().zip(&degrees).any(|(g, &t)| g.len() > t) {
                continue;
            }
            let mut h = l.graph().clone();
            let mut d = vec![0; inner];
            for (g, &t) in groups.iter().zip(&degrees) {
                let x = h.add_vertex();
                for &v in g {
                    h.add_edge(v, x).unwrap();
                }
                d.push(t - g.len());
            }
            let closed = LocalConfiguration::new(h, d, 3).unwrap();
            if config_site(&closed).is_none() {
                out.push(Completion { closed, inner });
            }
        }
    });
    out
}

/// Set partitions of `stubs` into groups of at most three distinct vertices.
fn partitions(
    stubs: &[usize],
    i: usize,
    groups: &mut Vec<Vec<usize>>,
    emit: &mut impl FnMut(&[Vec<usize>]),
) {
    if i == stubs.len() {
        emit(groups);
        return;
    }
    let v = stubs[i];
    for g in 0..groups.len() {
        if groups[g].len() < 3 && !groups[g].contains(&v) {
            groups[g].push(v);
            partitions(stubs, i + 1, groups, emit);
            groups[g].pop();
        }
    }
    groups.push(vec![v]);
    partitions(stubs, i + 1, groups, emit);
    groups.pop();
}

/// Seeded random subcubic instances with budgets around the optimum.
pub fn random_instances(count: usize, max_n: usize, seed: u64) -> Vec<Instance> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=max_n);
            let g: Graph = random_subcubic(n, 3 * n, &mut rng);
            let vc = vcsynth::vc_oracle(&g).unwrap() as i64;
            let k = vc + rng.gen_range(-1..=1);
            Instance::new(g, k)
        })
        .collect()
}

/// Branches of `l` as vertex masks, the empty branch included.
pub fn all_branches(l: &LocalConfiguration) -> Vec<u32> {
    let verts: Vec<usize> = l.vertices().collect();
    (0u32..1 << verts.len())
        .map(|s| vcsynth::boundary::spread(s, &verts))
        .collect()
}

/// Requirements of `l`: every subset of its boundary.
pub fn all_requirements(l: &LocalConfiguration) -> Vec<u32> {
    let delta = l.boundary();
    (0u32..1 << delta.len())
        .map(|s| vcsynth::boundary::spread(s, &delta))
        .collect()
}

/// Cases where a requirement is satisfied by some branch set covering the
/// crucial set, yet is left unsatisfied: for each requirement `R` there
/// must be a crucial `S` with every branch satisfying `S` satisfying `R`.
pub fn crucial_set_exceptions(corpus: &[LocalConfiguration]) -> (usize, usize) {
    use vcsynth::boundary::{crucial_set_with, CoverOracle};
    let (mut checked, mut bad) = (0, 0);
    for l in corpus {
        let oracle = CoverOracle::new(l).unwrap();
        let crucial = crucial_set_with(l, &oracle).unwrap();
        let branches = all_branches(l);
        let sat =
            |r: u32| -> Vec<bool> { branches.iter().map(|&b| oracle.satisfies(b, r)).collect() };
        let crucial_sats: Vec<Vec<bool>> = crucial.iter().map(|&s| sat(s)).collect();
        for r in all_requirements(l) {
            checked += 1;
            let want = sat(r);
            let implied = crucial_sats
                .iter()
                .any(|s| s.iter().zip(&want).all(|(&a, &b)| !a || b));
            if !implied {
                bad += 1;
            }
        }
    }
    (checked, bad)
}

/// Cases breaking the implication between neighbouring requirements `C`
/// and `C + v`: when the forced cost stays, satisfying `C + v` implies
/// satisfying `C`; when it grows, satisfying `C` implies satisfying `C + v`.
pub fn neighbour_implication_exceptions(corpus: &[LocalConfiguration]) -> (usize, usize) {
    use vcsynth::boundary::CoverOracle;
    let (mut checked, mut bad) = (0, 0);
    for l in corpus {
        let oracle = CoverOracle::new(l).unwrap();
        let branches = all_branches(l);
        for c in all_requirements(l) {
            for v in l.boundary().into_iter().filter(|&v| c >> v & 1 == 0) {
                let cv = c | 1 << v;
                let stays = oracle.forced_cost(c) == oracle.forced_cost(cv);
                for &b in &branches {
                    checked += 1;
                    let (sc, scv) = (oracle.satisfies(b, c), oracle.satisfies(b, cv));
                    let holds = if stays { !scv || sc } else { !sc || scv };
                    if !holds {
                        bad += 1;
                    }
                }
            }
        }
    }
    (checked, bad)
}

/// Completions where the realized measure change of a branch exceeds the
/// bound of a lemma whose precondition the completion meets, per lemma.
pub fn cost_bound_exceptions(
    corpus: &[LocalConfiguration],
    m: &Measure,
) -> ([usize; 3], [usize; 3]) {
    use vcsynth::branching::cost_bound_with_lemma;
    let (mut checked, mut bad) = ([0; 3], [0; 3]);
    for l in corpus {
        let comps = completions(l);
        for b in all_branches(l).into_iter().filter(|&b| b != 0) {
            for (i, lemma) in [12u8, 13, 14].into_iter().enumerate() {
                let bound = cost_bound_with_lemma(l, b, m, lemma).exponent;
                for c in &comps {
                    let applies = match lemma {
                        12 => true,
                        13 => !c.has_deg3_with_two_deg2(),
                        _ => !c.has_degree_2(),
                    };
                    if applies {
                        checked[i] += 1;
                        if c.realized(m, b) > bound {
                            bad[i] += 1;
                        }
                    }
                }
            }
        }
    }
    (checked, bad)
}

/// Pairs where a tighter lemma, applicable to the configuration, gives a
/// larger exponent than a looser one.
pub fn lemma_order_exceptions(corpus: &[LocalConfiguration], m: &Measure) -> (usize, usize) {
    use vcsynth::branching::cost_bound_with_lemma;
    use vcsynth::subspace::Assertions;
    let no_deg3_two_deg2 = Assertions {
        no_deg3_two_deg2: true,
        ..Assertions::default()
    };
    let no_deg2 = Assertions {
        no_degree_2: true,
        no_deg3_two_deg2: true,
        ..Assertions::default()
    };
    let (mut checked, mut bad) = (0, 0);
    for l in corpus {
        for b in all_branches(l).into_iter().filter(|&b| b != 0) {
            let e = |lemma| cost_bound_with_lemma(l, b, m, lemma).exponent;
            if !no_deg3_two_deg2.forbids(l) {
                checked += 1;
                bad += usize::from(e(13) > e(12));
            }
            if !no_deg2.forbids(l) {
                checked += 1;
                bad += usize::from(e(14) > e(13) || e(14) > e(12));
            }
        }
    }
    (checked, bad)
}

/// The standard measures plus a steeper degree-3 weight.
pub fn test_measures() -> Vec<Measure> {
    vec![
        Measure::mu1(),
        Measure::mu2(),
        Measure::pure_k(),
        "n-mode b3=0.2".parse().unwrap(),
    ]
}
