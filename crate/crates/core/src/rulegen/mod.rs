//! Rule synthesis: the recursive generator and its covering LP/ILP solvers,
//! producing rule tables that are checked by an independent certifier.

pub mod certify;
pub mod gensa;
pub mod ilp;
pub mod lp;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::subspace::Assertions;
use crate::tree::ExpansionTree;

pub use certify::{verify_table, Certificate};
pub use gensa::{gensa, GenConfig, GenFailure, GenStats, Generation, Limits};
pub use ilp::{solve_ilp, solve_ilp_within, IlpSolution};
pub use lp::{solve_lp, CoverProblem, LpSolution};

/// Weights are stored as multiples of `1 / WEIGHT_SCALE`.
pub const WEIGHT_SCALE: u64 = 1_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleMode {
    Randomized,
    Deterministic,
}

impl fmt::Display for RuleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleMode::Randomized => "randomized",
            RuleMode::Deterministic => "deterministic",
        })
    }
}

impl std::str::FromStr for RuleMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<RuleMode> {
        match s {
            "randomized" | "rand" => Ok(RuleMode::Randomized),
            "deterministic" | "det" => Ok(RuleMode::Deterministic),
            _ => Err(Error::InvalidInput(format!("unknown mode `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    Randomized,
    Deterministic,
    /// A simplification rule is certain to fire.
    Simplification {
        rule: u8,
    },
    /// The configuration is a whole connected component.
    Constant,
}

/// What a leaf of the expansion tree does.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeafRule {
    pub kind: RuleKind,
    /// Branches as vertex lists of the leaf configuration.
    pub branches: Vec<Vec<usize>>,
    /// Decimal weights, one per branch.
    pub weights: Vec<String>,
    /// Weighted cost sum recorded at generation time.
    pub objective: Option<f64>,
}

impl LeafRule {
    pub fn marker(kind: RuleKind) -> LeafRule {
        LeafRule {
            kind,
            branches: Vec::new(),
            weights: Vec::new(),
            objective: None,
        }
    }

    pub fn is_branching(&self) -> bool {
        matches!(self.kind, RuleKind::Randomized | RuleKind::Deterministic)
    }

    pub fn weight_values(&self) -> Result<Vec<BigRational>> {
        self.weights.iter().map(|w| parse_decimal(w)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub limits: Limits,
    pub node_count: usize,
    pub leaf_count: usize,
    pub max_depth: usize,
    pub shared_links: usize,
    pub unreachable_links: usize,
}

/// A generated algorithm for one subspace, or for every instance when
/// `subspace` is absent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleTable {
    pub subspace: Option<u8>,
    pub measure: Measure,
    pub mode: RuleMode,
    pub delta: usize,
    pub assertions: Assertions,
    #[serde(flatten)]
    pub tree: ExpansionTree,
    pub leaves: Vec<LeafRule>,
    pub metadata: Metadata,
}

impl RuleTable {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<RuleTable> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Exact value of a decimal string such as `0.333333334` or `1`.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidInput(format!("malformed weight `{s}`"));
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if int.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let num: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    Ok(BigRational::new(
        num,
        BigInt::from(10u32).pow(frac.len() as u32),
    ))
}

/// `units / WEIGHT_SCALE` as a trimmed decimal.
pub fn format_units(units: u64) -> String {
    let int = units / WEIGHT_SCALE;
    let frac = units % WEIGHT_SCALE;
    if frac == 0 {
        return int.to_string();
    }
    let digits = format!("{frac:09}");
    format!("{int}.{}", digits.trim_end_matches('0'))
}

/// Rounds LP weights to the fixed-point grid, then tops up any requirement
/// left below full coverage through its cheapest satisfying branch.
pub fn round_weights(p: &CoverProblem, weights: &[f64]) -> Vec<u64> {
    let scale = WEIGHT_SCALE as f64;
    let mut units: Vec<u64> = weights
        .iter()
        .map(|&w| (w.clamp(0.0, 1.0) * scale).round() as u64)
        .collect();
    let mut by_req: Vec<Vec<usize>> = vec![Vec::new(); p.requirements];
    for (j, c) in p.covers.iter().enumerate() {
        for &r in c {
            by_req[r].push(j);
        }
    }
    for (r, options) in by_req.iter().enumerate() {
        let have: u64 = options.iter().map(|&j| units[j]).sum();
        if have >= WEIGHT_SCALE {
            continue;
        }
        let cheapest = options
            .iter()
            .copied()
            .filter(|&j| units[j] < WEIGHT_SCALE)
            .min_by(|&a, &b| p.costs[a].total_cmp(&p.costs[b]).then(a.cmp(&b)))
            .unwrap_or_else(|| panic!("requirement {r} has no branch below full weight"));
        units[cheapest] = (units[cheapest] + WEIGHT_SCALE - have).min(WEIGHT_SCALE);
    }
    units
}

/// Exact `sum w_i * c_i`, reading each cost as the exact value of its `f64`.
pub fn exact_objective(weights: &[BigRational], costs: &[f64]) -> BigRational {
    weights
        .iter()
        .zip(costs)
        .map(|(w, &c)| w * BigRational::from_float(c).expect("finite cost"))
        .fold(BigRational::zero(), |a, b| a + b)
}

pub fn within_one(x: &BigRational) -> bool {
    *x <= BigRational::one()
}
