//! Evaluators for the anti-concentration bounds.
//!
//! Bounds whose absolute constant is unspecified are evaluated with constant 1
//! and flagged `constant_mode`; sweeps fit the constant empirically. Square
//! roots and logarithms are rounded in the direction that makes the reported
//! value an upper bound on the formula (see [`precision`]).

pub mod precision;
pub mod soze;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::engines::{perm_sum_distribution, SumMode};
use crate::error::{Error, Result};
use crate::numerics::{format_rational, int, rational_to_f64, RationalVector};
use precision::round_up;

pub use soze::{soze_decay_profile, soze_exact_probability, SozeNormalization, SozeProfile, SozeRow};

/// The statement a bound or sweep refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statement {
    /// `(1 + |I| / (Δ(v)(w_(n−i2) − w_(i1)))) / ((i1 + i2)√min(i1, i2))`
    Main,
    /// `|I|√(log n) / (nσΔ(v)) + 1/n`
    Sigma,
    /// `1 / (ε n^(3/2))`
    Repetition,
    /// `1/n` (n odd), `1/(n − 1)` (n even); sharp, no constant.
    Pawlowski,
    /// `1 / (n√k)`
    LemmaWith,
    /// `1 / (n√min(k, n − k))`
    LemmaWithout,
    /// `(1/n) e^(−c|L|)`; `c` is unspecified.
    Soze,
    /// Width of the dominance poset against `C(n, k) / (n√min(k, n − k))`.
    Width,
}

impl Statement {
    pub const ALL: [Statement; 8] = [
        Statement::Main,
        Statement::Sigma,
        Statement::Repetition,
        Statement::Pawlowski,
        Statement::LemmaWith,
        Statement::LemmaWithout,
        Statement::Soze,
        Statement::Width,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Statement::Main => "main",
            Statement::Sigma => "sigma",
            Statement::Repetition => "repetition",
            Statement::Pawlowski => "pawlowski",
            Statement::LemmaWith => "lemma-with",
            Statement::LemmaWithout => "lemma-without",
            Statement::Soze => "soze",
            Statement::Width => "width",
        }
    }

    /// Sharp statements are checked directly; the others carry an unknown constant.
    pub fn constant_mode(self) -> bool {
        self != Statement::Pawlowski
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Statement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Statement::ALL
            .into_iter()
            .find(|st| st.label() == s)
            .ok_or_else(|| Error::Config(format!("unknown statement `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundValue {
    Finite(BigRational),
    Infinite,
}

impl BoundValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            BoundValue::Finite(x) => rational_to_f64(x),
            BoundValue::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundValue::Finite(x) => f.write_str(&format_rational(x)),
            BoundValue::Infinite => f.write_str("inf"),
        }
    }
}

/// How a bound's constant is to be read in reports.
pub fn constant_mode_label(constant_mode: bool) -> &'static str {
    if constant_mode {
        "up to absolute constant"
    } else {
        "sharp"
    }
}

/// An evaluated bound: value, inputs, and which preconditions failed.
///
/// `value` is `Infinite` exactly when some precondition failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub statement: Statement,
    pub value: BoundValue,
    pub violations: Vec<String>,
    pub inputs: Vec<(String, String)>,
    pub constant_mode: bool,
    pub notes: Vec<String>,
}

impl BoundReport {
    fn start(statement: Statement) -> Self {
        Self {
            statement,
            value: BoundValue::Infinite,
            violations: Vec::new(),
            inputs: Vec::new(),
            constant_mode: statement.constant_mode(),
            notes: Vec::new(),
        }
    }

    fn input(&mut self, key: &str, value: impl ToString) {
        self.inputs.push((key.to_string(), value.to_string()));
    }

    fn require(&mut self, ok: bool, what: impl Into<String>) -> bool {
        if !ok {
            self.violations.push(what.into());
        }
        ok
    }

    fn finish(mut self, value: impl FnOnce() -> BigRational) -> Self {
        if self.violations.is_empty() {
            self.value = BoundValue::Finite(value());
        }
        self
    }

    pub fn preconditions_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn finite_value(&self) -> Option<&BigRational> {
        match &self.value {
            BoundValue::Finite(x) => Some(x),
            BoundValue::Infinite => None,
        }
    }

    pub fn value_f64(&self) -> f64 {
        self.value.to_f64()
    }

    /// Line-oriented `key=value` rendering.
    pub fn key_values(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("statement".to_string(), self.statement.to_string()),
            ("preconditions_ok".to_string(), self.preconditions_ok().to_string()),
            ("value".to_string(), self.value.to_string()),
            ("value_f64".to_string(), self.value_f64().to_string()),
            (
                "constant_mode".to_string(),
                constant_mode_label(self.constant_mode).to_string(),
            ),
        ];
        for (k, v) in &self.inputs {
            out.push((format!("input.{k}"), v.clone()));
        }
        for v in &self.violations {
            out.push(("violation".to_string(), v.clone()));
        }
        for n in &self.notes {
            out.push(("note".to_string(), n.clone()));
        }
        out
    }
}

fn check_lengths(w: &RationalVector, v: &RationalVector) -> Result<usize> {
    if w.len() != v.len() {
        return Err(Error::LengthMismatch { w: w.len(), v: v.len() });
    }
    Ok(w.len())
}

/// Multiply `numerator` by an enclosure reciprocal and round the result up.
/// Stays exact when every ingredient is exact.
fn upper_quotient(numerator: BigRational, denominator_lo: &BigRational, exact: bool) -> BigRational {
    let q = numerator / denominator_lo;
    if exact {
        q
    } else {
        round_up(&q)
    }
}

/// Minimum pairwise gap `min_{i≠j} |v_i − v_j|`; zero when a value repeats.
pub fn delta(v: &RationalVector) -> Result<BigRational> {
    if v.len() < 2 {
        return Err(Error::Precondition("Δ(v) needs at least two coordinates".into()));
    }
    let s = v.sorted();
    Ok(s.coords()
        .windows(2)
        .map(|p| &p[1] - &p[0])
        .min()
        .expect("n >= 2"))
}

/// `Σ (w_i − w̄)²`.
pub fn centered_sum_of_squares(w: &RationalVector) -> BigRational {
    let mean = w.mean();
    w.coords().iter().map(|x| (x - &mean) * (x - &mean)).sum()
}

/// Sorted `w` and `Δ(v)`, shared by the main bound and the index search.
#[derive(Clone, Debug)]
pub struct MainTheoremInput {
    w: RationalVector,
    delta: BigRational,
    sorted_note: Option<String>,
}

impl MainTheoremInput {
    pub fn new(w: &RationalVector, v: &RationalVector) -> Result<Self> {
        check_lengths(w, v)?;
        let delta = if v.len() >= 2 { delta(v)? } else { BigRational::zero() };
        let sorted_note = match (w.is_increasing(), v.is_increasing()) {
            (true, true) => None,
            (wi, vi) => Some(format!(
                "sorted increasingly before indexing:{}{}",
                if wi { "" } else { " w" },
                if vi { "" } else { " v" }
            )),
        };
        Ok(Self { w: w.sorted(), delta, sorted_note })
    }

    pub fn n(&self) -> usize {
        self.w.len()
    }

    pub fn delta(&self) -> &BigRational {
        &self.delta
    }

    /// `w_(n−i2) − w_(i1)`, read as the smallest of the top `i2` entries minus the
    /// largest of the bottom `i1` entries (0-based `w[n − i2] − w[i1 − 1]`).
    pub fn spread(&self, i1: usize, i2: usize) -> Option<BigRational> {
        let n = self.n();
        (i1 >= 1 && i2 >= 1 && i1 + i2 <= n).then(|| self.w.get(n - i2) - self.w.get(i1 - 1))
    }

    pub fn evaluate(&self, len_i: &BigRational, i1: usize, i2: usize) -> Result<BoundReport> {
        if len_i.is_negative() {
            return Err(Error::NegativeLength);
        }
        let n = self.n();
        let mut r = BoundReport::start(Statement::Main);
        r.input("n", n);
        r.input("len_I", format_rational(len_i));
        r.input("i1", i1);
        r.input("i2", i2);
        r.input("delta", format_rational(&self.delta));
        if let Some(note) = &self.sorted_note {
            r.notes.push(note.clone());
        }
        r.require(self.delta.is_positive(), "Δ(v) > 0");
        let indices_ok = r.require(i1 >= 1 && i2 >= 1, "i1 >= 1 and i2 >= 1")
            & r.require(i1 + i2 <= n, "i1 + i2 <= n");
        let spread = if indices_ok { self.spread(i1, i2) } else { None };
        if let Some(s) = &spread {
            r.input("spread", format_rational(s));
            r.require(s.is_positive(), "w_(n-i2) - w_(i1) > 0");
        }
        let delta = self.delta.clone();
        Ok(r.finish(|| {
            let s = spread.expect("checked");
            let factor = BigRational::one() + len_i / (&delta * &s);
            let m = int(i1.min(i2) as i64);
            let root = precision::sqrt(&m);
            upper_quotient(factor, &(int((i1 + i2) as i64) * &root.lo), root.is_exact())
        }))
    }
}

/// The main theorem's bound for `P(w_π · v ∈ I)` at indices `(i1, i2)`.
pub fn main_theorem_bound(
    w: &RationalVector,
    v: &RationalVector,
    len_i: &BigRational,
    i1: usize,
    i2: usize,
) -> Result<BoundReport> {
    MainTheoremInput::new(w, v)?.evaluate(len_i, i1, i2)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexChoice {
    pub i1: usize,
    pub i2: usize,
    pub report: BoundReport,
}

/// Exhaustive search over valid `(i1, i2)` for the smallest main-theorem bound.
/// Ties go to the smaller `i1`, then the smaller `i2`.
pub fn optimize_indices(
    w: &RationalVector,
    v: &RationalVector,
    len_i: &BigRational,
) -> Result<IndexChoice> {
    let input = MainTheoremInput::new(w, v)?;
    optimize_prepared(&input, len_i)
}

pub fn optimize_prepared(input: &MainTheoremInput, len_i: &BigRational) -> Result<IndexChoice> {
    if !input.delta().is_positive() {
        return Err(Error::Precondition("Δ(v) > 0".into()));
    }
    let n = input.n();
    let mut best: Option<IndexChoice> = None;
    for i1 in 1..n {
        for i2 in 1..=n - i1 {
            if !input.spread(i1, i2).is_some_and(|s| s.is_positive()) {
                continue;
            }
            let report = input.evaluate(len_i, i1, i2)?;
            let better = match &best {
                None => true,
                Some(b) => report.finite_value() < b.report.finite_value(),
            };
            if better {
                best = Some(IndexChoice { i1, i2, report });
            }
        }
    }
    best.ok_or(Error::NoValidIndices)
}

/// `1 / (ε n^(3/2))` when `v` is all-distinct and no value of `w` repeats more
/// than `(1 − ε) n` times.
pub fn repetition_corollary_bound(
    w: &RationalVector,
    v: &RationalVector,
    eps: &BigRational,
) -> Result<BoundReport> {
    let n = check_lengths(w, v)?;
    let mut r = BoundReport::start(Statement::Repetition);
    let mult = w.max_multiplicity();
    r.input("n", n);
    r.input("eps", format_rational(eps));
    r.input("max_multiplicity", mult);
    let eps_ok = r.require(eps.is_positive() && eps <= &BigRational::one(), "0 < eps <= 1");
    r.require(v.all_distinct(), "v has distinct coordinates");
    if eps_ok {
        r.require(
            int(mult as i64) <= (BigRational::one() - eps) * int(n as i64),
            "no w value repeats more than (1 - eps) n times",
        );
    }
    let eps = eps.clone();
    Ok(r.finish(|| {
        let nn = int(n as i64);
        let root = precision::sqrt(&nn);
        upper_quotient(BigRational::one(), &(eps * nn * &root.lo), root.is_exact())
    }))
}

/// `|I|√(log n) / (nσΔ(v)) + 1/n` with `σ² = Σ(w_i − w̄)²` and natural log.
pub fn sigma_corollary_bound(
    w: &RationalVector,
    v: &RationalVector,
    len_i: &BigRational,
) -> Result<BoundReport> {
    let n = check_lengths(w, v)?;
    if len_i.is_negative() {
        return Err(Error::NegativeLength);
    }
    let mut r = BoundReport::start(Statement::Sigma);
    let sigma_sq = centered_sum_of_squares(w);
    let d = if n >= 2 { delta(v)? } else { BigRational::zero() };
    r.input("n", n);
    r.input("len_I", format_rational(len_i));
    r.input("sigma_sq", format_rational(&sigma_sq));
    r.input("delta", format_rational(&d));
    r.require(sigma_sq.is_positive(), "sigma > 0 (w nonconstant)");
    r.require(d.is_positive(), "Δ(v) > 0");
    let len_i = len_i.clone();
    Ok(r.finish(|| {
        let nn = int(n as i64);
        let base = BigRational::one() / &nn;
        if len_i.is_zero() {
            return base;
        }
        let log_root = precision::sqrt(&precision::ln(n as u64).hi);
        let sigma = precision::sqrt(&sigma_sq);
        let exact = log_root.is_exact() && sigma.is_exact();
        let first = upper_quotient(&len_i * &log_root.hi, &(&nn * &sigma.lo * &d), exact);
        first + base
    }))
}

/// `1/n` for odd `n`, `1/(n − 1)` for even `n`.
pub fn pawlowski_bound(n: usize) -> BigRational {
    let n = n.max(1) as i64;
    if n % 2 == 1 {
        BigRational::new(BigInt::one(), n.into())
    } else {
        BigRational::new(BigInt::one(), (n - 1).into())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PawlowskiCheck {
    pub n: usize,
    pub bound: BigRational,
    pub max_mass: BigRational,
    pub witness: BigRational,
    pub satisfied: bool,
    pub notes: Vec<String>,
}

/// Compare the exact maximal point mass of `w_π · v` with the sharp bound.
///
/// The hypothesis checked is "w nonconstant" rather than the literal `w · 1 ≠ 0`:
/// the point mass is invariant under `w → w + c·1`, so only constancy matters.
pub fn pawlowski_check(w: &RationalVector, v: &RationalVector, cap: usize) -> Result<PawlowskiCheck> {
    let n = check_lengths(w, v)?;
    if !v.all_distinct() {
        return Err(Error::Precondition("v has distinct coordinates".into()));
    }
    if w.is_constant() {
        return Err(Error::Precondition("w nonconstant".into()));
    }
    let (max_mass, witness) = perm_sum_distribution(w, v, cap)?.max_point_mass();
    let bound = pawlowski_bound(n);
    let mut notes = Vec::new();
    if w.sum().is_zero() {
        notes.push("w · 1 = 0: the literal hypothesis w · 1 ≠ 0 fails; checked under w nonconstant".into());
    }
    Ok(PawlowskiCheck { n, satisfied: max_mass <= bound, bound, max_mass, witness, notes })
}

/// `1/(n√k)` with replacement, `1/(n√min(k, n − k))` without.
pub fn subset_lemma_bound(n: usize, k: usize, mode: SumMode) -> Result<BoundReport> {
    let effective = match mode {
        SumMode::WithReplacement if k >= 1 => k,
        SumMode::WithoutReplacement if k >= 1 && k < n => k.min(n - k),
        _ => return Err(Error::KOutOfRange { k, n }),
    };
    let statement = match mode {
        SumMode::WithReplacement => Statement::LemmaWith,
        SumMode::WithoutReplacement => Statement::LemmaWithout,
    };
    let mut r = BoundReport::start(statement);
    r.input("n", n);
    r.input("k", k);
    Ok(r.finish(|| {
        let root = precision::sqrt(&int(effective as i64));
        upper_quotient(BigRational::one(), &(int(n as i64) * &root.lo), root.is_exact())
    }))
}

/// Envelope `1/n` of the decay statement at a given `L`. The factor `e^(−c|L|)`
/// is dropped because `c` has no stated value; it is at most 1.
pub fn soze_bound(n: usize, l: &BigRational) -> BoundReport {
    let mut r = BoundReport::start(Statement::Soze);
    r.input("n", n);
    r.input("L", format_rational(l));
    r.notes.push("decay constant c unspecified; e^(-c|L|) <= 1 omitted".into());
    r.require(n >= 2, "n >= 2");
    r.finish(|| BigRational::new(BigInt::one(), (n as i64).into()))
}
