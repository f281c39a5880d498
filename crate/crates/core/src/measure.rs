//! The measure `alpha*k + b1*n1 + b2*n2 + b3*n3` with its feasibility
//! conditions, plus running-time arithmetic on branching vectors.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Instance;

pub type Rational = Ratio<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    /// Running time in terms of the number of vertices: `alpha = 0`.
    #[serde(rename = "n-mode")]
    N,
    /// Running time in terms of the budget: all vertex weights nonpositive.
    #[serde(rename = "k-mode")]
    K,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::N => "n-mode",
            Mode::K => "k-mode",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "n-mode" | "n" => Ok(Mode::N),
            "k-mode" | "k" => Ok(Mode::K),
            _ => Err(Error::InvalidInput(format!("unknown measure mode `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Measure {
    pub mode: Mode,
    pub alpha: Rational,
    /// Weights of degree-1, degree-2 and degree-3 vertices.
    pub beta: [Rational; 3],
}

/// Per-degree vertex counts and budget of an instance.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counts {
    pub k: i64,
    pub n: [i64; 3],
}

impl Counts {
    pub fn of(inst: &Instance) -> Result<Counts> {
        let mut n = [0i64; 3];
        for v in inst.graph.vertices() {
            match inst.graph.degree(v) {
                0 => {}
                d @ 1..=3 => n[d - 1] += 1,
                d => {
                    return Err(Error::Domain(format!(
                        "vertex {v} has degree {d}; the measure covers degrees up to 3"
                    )))
                }
            }
        }
        Ok(Counts { k: inst.budget, n })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibilityReport {
    pub pass: bool,
    pub violations: Vec<String>,
}

impl Measure {
    pub fn n_mode(beta1: Rational, beta2: Rational, beta3: Rational) -> Measure {
        Measure {
            mode: Mode::N,
            alpha: Rational::zero(),
            beta: [beta1, beta2, beta3],
        }
    }

    pub fn k_mode(alpha: Rational, beta1: Rational, beta2: Rational) -> Measure {
        Measure {
            mode: Mode::K,
            alpha,
            beta: [beta1, beta2, Rational::zero()],
        }
    }

    /// `0.106 * n3`.
    pub fn mu1() -> Measure {
        Measure::n_mode(Rational::zero(), Rational::zero(), Rational::new(106, 1000))
    }

    /// `0.178 * k - 0.0445 * n1 - 0.089 * n2`.
    pub fn mu2() -> Measure {
        Measure::k_mode(
            Rational::new(178, 1000),
            Rational::new(-445, 10000),
            Rational::new(-89, 1000),
        )
    }

    /// The measure `k`.
    pub fn pure_k() -> Measure {
        Measure::k_mode(
            Rational::from_integer(1),
            Rational::zero(),
            Rational::zero(),
        )
    }

    pub fn evaluate(&self, inst: &Instance) -> Result<Rational> {
        Ok(self.evaluate_counts(&Counts::of(inst)?))
    }

    pub fn evaluate_counts(&self, c: &Counts) -> Rational {
        self.alpha * c.k + self.beta[0] * c.n[0] + self.beta[1] * c.n[1] + self.beta[2] * c.n[2]
    }

    pub fn evaluate_f64(&self, inst: &Instance) -> Result<f64> {
        Ok(to_f64(self.evaluate(inst)?))
    }

    /// Checks the inequalities that keep simplification from increasing the
    /// measure. In k-mode the measure `alpha * k` with all vertex weights
    /// zero is accepted as well: no rule ever increases `k`.
    pub fn check_feasibility(&self) -> FeasibilityReport {
        let mut violations = Vec::new();
        let mut need = |ok: bool, what: &str| {
            if !ok {
                violations.push(what.to_string());
            }
        };
        let zero = Rational::zero();
        let [b1, b2, b3] = self.beta;
        let a = self.alpha;
        match self.mode {
            Mode::N => {
                need(a == zero, "alpha = 0");
                need(b3 >= zero, "b3 >= 0");
                need(zero <= b1 * 3 / 4, "0 <= 3*b1/4");
                need(b1 * 3 / 4 <= b2 * 3 / 4, "3*b1/4 <= 3*b2/4");
                need(b2 * 3 / 4 <= b3, "3*b2/4 <= b3");
            }
            Mode::K => {
                need(a > zero, "alpha > 0");
                need(b1 <= zero, "b1 <= 0");
                need(b2 <= zero, "b2 <= 0");
                need(b3 == zero, "b3 = 0");
                if b1 != zero || b2 != zero {
                    need(-a / 2 <= b2, "-alpha/2 <= b2");
                    need(b2 <= -a / 3, "b2 <= -alpha/3");
                    need(-a / 2 - b2 / 2 <= b1, "-alpha/2 - b2/2 <= b1");
                    need(b1 <= a / 2 + b2 * 3 / 2, "b1 <= alpha/2 + 3*b2/2");
                }
            }
        }
        FeasibilityReport {
            pass: violations.is_empty(),
            violations,
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "measure {} alpha={} b1={} b2={} b3={}",
            self.mode,
            format_rational(&self.alpha),
            format_rational(&self.beta[0]),
            format_rational(&self.beta[1]),
            format_rational(&self.beta[2])
        )
    }
}

impl FromStr for Measure {
    type Err = Error;

    /// Parses `[measure] <mode> key=value...` with keys `alpha` (or `a`),
    /// `b1`, `b2`, `b3`; omitted weights are zero.
    fn from_str(s: &str) -> Result<Measure> {
        let mut words = s.split_whitespace().peekable();
        if words.peek() == Some(&"measure") {
            words.next();
        }
        let mode: Mode = words
            .next()
            .ok_or_else(|| Error::InvalidInput("empty measure".into()))?
            .parse()?;
        let mut m = Measure {
            mode,
            alpha: Rational::zero(),
            beta: [Rational::zero(); 3],
        };
        for w in words {
            let (key, value) = w
                .split_once('=')
                .ok_or_else(|| Error::InvalidInput(format!("expected key=value, got `{w}`")))?;
            let r = parse_rational(value)?;
            match key {
                "alpha" | "a" => m.alpha = r,
                "b1" => m.beta[0] = r,
                "b2" => m.beta[1] = r,
                "b3" => m.beta[2] = r,
                _ => {
                    return Err(Error::InvalidInput(format!(
                        "unknown measure weight `{key}`"
                    )))
                }
            }
        }
        Ok(m)
    }
}

impl Serialize for Measure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Measure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Measure, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a decimal (`-0.0445`), an integer, or a fraction (`3/4`).
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::InvalidInput(format!("malformed number `{s}`"));
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if (int.is_empty() && frac.is_empty())
        || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
        || frac.len() > 15
    {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let num: i64 = if digits.is_empty() {
        0
    } else {
        digits.parse().map_err(|_| bad())?
    };
    let r = Rational::new(num, 10i64.pow(frac.len() as u32));
    Ok(if neg { -r } else { r })
}

/// Exact decimal when the denominator divides a power of ten, else `p/q`.
pub fn format_rational(r: &Rational) -> String {
    let mut den = *r.denom();
    let mut places = 0u32;
    for p in [2, 5] {
        while den % p == 0 {
            den /= p;
        }
    }
    if den != 1 {
        return format!("{}/{}", r.numer(), r.denom());
    }
    while 10i64.pow(places) % r.denom() != 0 {
        places += 1;
    }
    let scaled = (r * 10i64.pow(places)).to_integer();
    if places == 0 {
        return scaled.to_string();
    }
    let sign = if scaled < 0 { "-" } else { "" };
    let abs = scaled.abs();
    let unit = 10i64.pow(places);
    format!(
        "{sign}{}.{:0width$}",
        abs / unit,
        abs % unit,
        width = places as usize
    )
}

pub fn to_f64(r: Rational) -> f64 {
    r.to_f64().expect("finite rational")
}

/// Weighted measure decreases of one rule's branches.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchVector {
    /// `(weight, decrease)` pairs.
    pub entries: Vec<(f64, f64)>,
}

impl BranchVector {
    pub fn new(entries: Vec<(f64, f64)>) -> Result<BranchVector> {
        if entries.is_empty() {
            return Err(Error::Domain("branching vector has no entries".into()));
        }
        for &(w, dec) in &entries {
            if !(w >= 0.0 && w.is_finite()) || !(dec > 0.0 && dec.is_finite()) {
                return Err(Error::Domain(format!(
                    "entry ({w}, {dec}) needs weight >= 0 and decrease > 0"
                )));
            }
        }
        Ok(BranchVector { entries })
    }

    /// All weights one.
    pub fn deterministic(decreases: &[f64]) -> Result<BranchVector> {
        BranchVector::new(decreases.iter().map(|&d| (1.0, d)).collect())
    }

    fn sum_at(&self, x: f64) -> f64 {
        self.entries.iter().map(|&(w, d)| w * x.powf(-d)).sum()
    }
}

/// The smallest `x >= 1` with `sum w_i x^(-d_i) <= 1`, to within 1e-9.
pub fn branching_number(v: &BranchVector) -> f64 {
    if v.sum_at(1.0) <= 1.0 {
        return 1.0;
    }
    let mut lo = 1.0;
    let mut hi = 2.0;
    while v.sum_at(hi) > 1.0 {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if v.sum_at(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Combines an algorithm running in `e^(a*k + b*n)` with one running in
/// `e^(c*n)` on a vertex-deletion-closed class, giving `e^(d*k)` with
/// `d = 2c(a+b)/(a+2c)`.
pub fn combine_bound(a: f64, b: f64, c: f64) -> Result<f64> {
    if a < 0.0 || b < 0.0 || c < 0.0 {
        return Err(Error::Domain(format!(
            "negative argument in ({a}, {b}, {c})"
        )));
    }
    let den = a + 2.0 * c;
    if den == 0.0 {
        return Err(Error::Domain("a + 2c = 0".into()));
    }
    Ok(2.0 * c * (a + b) / den)
}
