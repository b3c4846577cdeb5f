//! Bound-satisfaction sweeps driven by a TOML config.
//!
//! A sweep expands its generator into a canonical list of instances, evaluates
//! them in parallel, and keeps records in generation order, so a rerun of the
//! same config reproduces the CSV byte for byte.

use std::path::{Path, PathBuf};

use itertools::Itertools;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    constant_mode_label, optimize_prepared, pawlowski_check, repetition_corollary_bound, sigma_corollary_bound,
    soze_bound, soze_decay_profile, subset_lemma_bound, BoundReport, BoundValue, MainTheoremInput,
    Statement,
};
use crate::engines::{perm_sum_distribution, SumMode, DEFAULT_PERM_CAP};
use crate::error::{Error, Result};
use crate::numerics::{format_rational, parse_rational, rational_to_f64, RationalVector};
use crate::poset::stanley_width;
use crate::sampling::{partial_shuffle, split_seed, substream_rng, uniform_below, with_pool, McConfig};

use super::scaling::{per_size_maxima, scaling_rows, trend_of, width_fraction, KRule};
use super::trend::TrendTest;

fn default_step() -> usize {
    1
}
fn default_lengths() -> Vec<String> {
    vec!["0".into()]
}
fn default_samples() -> u64 {
    100_000
}
fn default_levels() -> Vec<String> {
    vec!["0".into(), "1".into(), "2".into()]
}
fn default_cap() -> usize {
    DEFAULT_PERM_CAP
}
fn default_w_min() -> i64 {
    -2
}
fn default_w_max() -> i64 {
    2
}
fn default_v_min() -> i64 {
    1
}
fn default_w_bound() -> i64 {
    3
}
fn default_v_bound() -> i64 {
    12
}
fn default_per_size() -> usize {
    1
}
fn default_denominator() -> i64 {
    16
}

/// Instance generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    /// Every non-decreasing nonconstant `w` in `[w_min, w_max]^n` against every
    /// strictly increasing `v` in `[v_min, v_max]` (`v_max` defaults to `n + v_min`).
    Grid {
        #[serde(default = "default_w_min")]
        w_min: i64,
        #[serde(default = "default_w_max")]
        w_max: i64,
        #[serde(default = "default_v_min")]
        v_min: i64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        v_max: Option<i64>,
    },
    /// `instances` seeded draws: `n` uniform over the size range, `w` uniform in
    /// `[−w_bound, w_bound]^n` (repeats allowed, resampled until nonconstant), `v` a
    /// uniform `n`-subset of `[−v_bound, v_bound]`.
    Random {
        instances: usize,
        #[serde(default = "default_w_bound")]
        w_bound: i64,
        #[serde(default = "default_v_bound")]
        v_bound: i64,
    },
    Explicit { instances: Vec<ExplicitInstance> },
    /// `w = v = A = (1, …, n)`.
    Sequence,
    /// `A_i = i + r_i / denominator` with `r_i` uniform in `[0, denominator)`; distinct by construction.
    Perturbed {
        #[serde(default = "default_per_size")]
        per_size: usize,
        #[serde(default = "default_denominator")]
        denominator: i64,
    },
}

impl GeneratorSpec {
    fn name(&self) -> &'static str {
        match self {
            GeneratorSpec::Grid { .. } => "grid",
            GeneratorSpec::Random { .. } => "random",
            GeneratorSpec::Explicit { .. } => "explicit",
            GeneratorSpec::Sequence => "sequence",
            GeneratorSpec::Perturbed { .. } => "perturbed",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitInstance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<String>,
    /// Ground set for the lemma statements.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub len: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub statement: Statement,
    #[serde(default)]
    pub seed: u64,
    pub n_min: usize,
    pub n_max: usize,
    #[serde(default = "default_step")]
    pub n_step: usize,
    #[serde(default)]
    pub k: KRule,
    /// Interval lengths for main, sigma and repetition; cycled over random instances.
    #[serde(default = "default_lengths")]
    pub interval_lengths: Vec<String>,
    /// Monte Carlo samples per instance (soze).
    #[serde(default = "default_samples")]
    pub samples: u64,
    /// Levels `L` (soze).
    #[serde(default = "default_levels")]
    pub levels: Vec<String>,
    #[serde(default = "default_cap")]
    pub cap: usize,
    /// Ratios above this count as violations for constant-mode statements.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ceiling: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    pub generator: GeneratorSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

impl SweepConfig {
    pub fn new(statement: Statement, n_min: usize, n_max: usize, generator: GeneratorSpec) -> Self {
        Self {
            statement,
            seed: 0,
            n_min,
            n_max,
            n_step: 1,
            k: KRule::default(),
            interval_lengths: default_lengths(),
            samples: default_samples(),
            levels: default_levels(),
            cap: DEFAULT_PERM_CAP,
            ceiling: None,
            threads: None,
            generator,
            output: OutputSpec::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim().replace('\n', " ")))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is serializable")
    }

    pub fn sizes(&self) -> Result<Vec<usize>> {
        if self.n_min == 0 || self.n_min > self.n_max || self.n_step == 0 {
            return Err(Error::Config("need 1 <= n_min <= n_max and n_step >= 1".into()));
        }
        Ok((self.n_min..=self.n_max).step_by(self.n_step).collect())
    }

    fn lengths(&self) -> Result<Vec<BigRational>> {
        let out = self.interval_lengths.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
        if out.is_empty() {
            return Err(Error::Config("interval_lengths is empty".into()));
        }
        if out.iter().any(|l| l.is_negative()) {
            return Err(Error::NegativeLength);
        }
        Ok(out)
    }

    fn level_values(&self) -> Result<Vec<BigRational>> {
        self.levels.iter().map(|s| parse_rational(s)).collect()
    }
}

/// One evaluated `(instance, parameter)` pair.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub statement: Statement,
    pub n: usize,
    /// Statement parameter: interval length, `k`, or level `L`.
    pub param: String,
    pub instance: String,
    /// Exact probability as `p/q`, or a Monte Carlo estimate.
    pub lhs: String,
    pub lhs_f64: f64,
    pub bound: BoundValue,
    /// `lhs / bound`; `None` exactly when a precondition failed.
    pub ratio: Option<f64>,
    pub running_max: f64,
    pub violation: bool,
    /// `lhs == bound` exactly.
    pub equality: bool,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSummary {
    pub statement: Statement,
    pub records: usize,
    pub valid: usize,
    /// Largest ratio: the fitted constant.
    pub c_star: f64,
    pub c_star_instance: String,
    pub per_size: Vec<(usize, f64)>,
    pub trend: Option<TrendTest>,
    pub violations: Vec<String>,
    /// Sizes where some instance meets the bound with equality.
    pub equality_sizes: Vec<usize>,
    pub pass: bool,
}

impl SweepSummary {
    pub fn key_values(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("statement".into(), self.statement.to_string()),
            ("constant_mode".into(), constant_mode_label(self.statement.constant_mode()).into()),
            ("records".into(), self.records.to_string()),
            ("valid".into(), self.valid.to_string()),
            ("c_star".into(), self.c_star.to_string()),
            ("c_star_instance".into(), self.c_star_instance.clone()),
            (
                "per_size_max".into(),
                self.per_size.iter().map(|(n, r)| format!("{n}:{r}")).join(" "),
            ),
        ];
        match &self.trend {
            Some(t) => out.extend([
                ("trend_tau".into(), t.tau.to_string()),
                ("trend_p".into(), t.p_value.to_string()),
                ("trend_exact".into(), t.exact.to_string()),
                ("trend_significant".into(), t.significant.to_string()),
            ]),
            None => out.push(("trend".into(), "not applicable (fewer than 3 sizes)".into())),
        }
        out.push(("violations".into(), self.violations.len().to_string()));
        for v in &self.violations {
            out.push(("violation".into(), v.clone()));
        }
        out.push(("equality_sizes".into(), self.equality_sizes.iter().join(" ")));
        out.push(("pass".into(), self.pass.to_string()));
        out
    }

    pub fn to_text(&self) -> String {
        self.key_values().into_iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepOutcome {
    pub records: Vec<SweepRecord>,
    pub summary: SweepSummary,
}

/// Bumped whenever `CSV_HEADER` changes.
pub const CSV_SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: [&str; 12] = [
    "statement", "n", "param", "instance", "lhs", "lhs_f64", "bound", "bound_f64", "ratio",
    "running_max", "violation", "note",
];

impl SweepOutcome {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        for r in &self.records {
            w.write_record([
                r.statement.to_string(),
                r.n.to_string(),
                r.param.clone(),
                r.instance.clone(),
                r.lhs.clone(),
                r.lhs_f64.to_string(),
                r.bound.to_string(),
                r.bound.to_f64().to_string(),
                r.ratio.map_or(String::new(), |x| x.to_string()),
                r.running_max.to_string(),
                r.violation.to_string(),
                r.note.clone(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }
}

enum Job {
    Perm { w: RationalVector, v: RationalVector, len: BigRational },
    Subset { a: RationalVector },
    Width { n: usize },
}

fn describe_perm(w: &RationalVector, v: &RationalVector) -> String {
    format!("w={w};v={v}")
}

fn perm_statement(s: Statement) -> bool {
    matches!(
        s,
        Statement::Main | Statement::Sigma | Statement::Repetition | Statement::Pawlowski | Statement::Soze
    )
}

fn unsupported(cfg: &SweepConfig) -> Error {
    Error::Config(format!(
        "generator `{}` does not apply to statement `{}`",
        cfg.generator.name(),
        cfg.statement
    ))
}

fn random_perm_instance(
    sizes: &[usize],
    w_bound: i64,
    v_bound: i64,
    rng: &mut crate::sampling::StreamRng,
) -> Result<(RationalVector, RationalVector)> {
    let n = sizes[uniform_below(rng, sizes.len() as u64) as usize];
    if 2 * v_bound + 1 < n as i64 || w_bound < 1 {
        return Err(Error::Config("v_bound too small for distinct v, or w_bound < 1".into()));
    }
    let w = loop {
        let w: Vec<i64> = (0..n)
            .map(|_| uniform_below(rng, (2 * w_bound + 1) as u64) as i64 - w_bound)
            .collect();
        if n == 1 || w.iter().any(|&x| x != w[0]) {
            break w;
        }
    };
    let mut pool: Vec<i64> = (-v_bound..=v_bound).collect();
    partial_shuffle(&mut pool, n, rng);
    let mut v = pool[..n].to_vec();
    v.sort_unstable();
    Ok((RationalVector::from_integers(&w)?, RationalVector::from_integers(&v)?))
}

fn build_jobs(cfg: &SweepConfig) -> Result<Vec<Job>> {
    let sizes = cfg.sizes()?;
    let lengths = cfg.lengths()?;
    let st = cfg.statement;
    // pawlowski and soze ignore the interval length
    let perm_lengths = if matches!(st, Statement::Pawlowski | Statement::Soze) {
        vec![BigRational::zero()]
    } else {
        lengths.clone()
    };
    let mut jobs = Vec::new();
    match (&cfg.generator, st) {
        (GeneratorSpec::Grid { w_min, w_max, v_min, v_max }, s) if perm_statement(s) => {
            for &n in &sizes {
                let v_hi = v_max.unwrap_or(*v_min + n as i64);
                for v in (*v_min..=v_hi).combinations(n) {
                    for w in (*w_min..=*w_max).combinations_with_replacement(n) {
                        if w[0] == w[n - 1] {
                            continue;
                        }
                        for len in &perm_lengths {
                            jobs.push(Job::Perm {
                                w: RationalVector::from_integers(&w)?,
                                v: RationalVector::from_integers(&v)?,
                                len: len.clone(),
                            });
                        }
                    }
                }
            }
        }
        (GeneratorSpec::Random { instances, w_bound, v_bound }, s) if perm_statement(s) => {
            for i in 0..*instances {
                let mut rng = substream_rng(cfg.seed, i as u64);
                let (w, v) = random_perm_instance(&sizes, *w_bound, *v_bound, &mut rng)?;
                let len = perm_lengths[i % perm_lengths.len()].clone();
                jobs.push(Job::Perm { w, v, len });
            }
        }
        (GeneratorSpec::Sequence, s) if perm_statement(s) => {
            for &n in &sizes {
                let a = RationalVector::arithmetic(n)?;
                for len in &perm_lengths {
                    jobs.push(Job::Perm { w: a.clone(), v: a.clone(), len: len.clone() });
                }
            }
        }
        (GeneratorSpec::Explicit { instances }, s) if perm_statement(s) => {
            for inst in instances {
                let w: RationalVector = inst
                    .w
                    .as_deref()
                    .ok_or_else(|| Error::Config("explicit instance needs `w`".into()))?
                    .parse()?;
                let v = match (&inst.v, s) {
                    (Some(v), _) => v.parse()?,
                    (None, Statement::Soze) => RationalVector::arithmetic(w.len())?,
                    (None, _) => return Err(Error::Config("explicit instance needs `v`".into())),
                };
                let lens = match &inst.len {
                    Some(l) => vec![parse_rational(l)?],
                    None => perm_lengths.clone(),
                };
                for len in lens {
                    jobs.push(Job::Perm { w: w.clone(), v: v.clone(), len });
                }
            }
        }
        (GeneratorSpec::Sequence, Statement::LemmaWith | Statement::LemmaWithout) => {
            for &n in &sizes {
                jobs.push(Job::Subset { a: RationalVector::arithmetic(n)? });
            }
        }
        (GeneratorSpec::Perturbed { per_size, denominator }, Statement::LemmaWith | Statement::LemmaWithout) => {
            if *denominator < 1 {
                return Err(Error::Config("denominator >= 1 required".into()));
            }
            let mut stream = 0u64;
            for &n in &sizes {
                for _ in 0..*per_size {
                    let mut rng = substream_rng(cfg.seed, stream);
                    stream += 1;
                    let coords = (1..=n as i64)
                        .map(|i| {
                            let r = uniform_below(&mut rng, *denominator as u64) as i64;
                            BigRational::new((i * denominator + r).into(), (*denominator).into())
                        })
                        .collect();
                    jobs.push(Job::Subset { a: RationalVector::new(coords)? });
                }
            }
        }
        (GeneratorSpec::Explicit { instances }, Statement::LemmaWith | Statement::LemmaWithout) => {
            for inst in instances {
                let a = inst
                    .a
                    .as_deref()
                    .or(inst.w.as_deref())
                    .ok_or_else(|| Error::Config("explicit lemma instance needs `a`".into()))?;
                jobs.push(Job::Subset { a: a.parse()? });
            }
        }
        (GeneratorSpec::Sequence, Statement::Width) => {
            jobs.extend(sizes.iter().map(|&n| Job::Width { n }));
        }
        _ => return Err(unsupported(cfg)),
    }
    Ok(jobs)
}

struct Eval {
    param: String,
    instance: String,
    lhs: String,
    lhs_f64: f64,
    /// Exact ratio when both sides are exact.
    ratio: Option<f64>,
    report_ok: bool,
    bound: BoundValue,
    equality: bool,
    note: String,
    n: usize,
}

fn exact_eval(n: usize, param: String, instance: String, lhs: &BigRational, report: &BoundReport) -> Eval {
    let ratio = report.finite_value().map(|b| {
        if b.is_zero() {
            f64::INFINITY
        } else {
            rational_to_f64(&(lhs / b))
        }
    });
    Eval {
        n,
        param,
        instance,
        lhs: format_rational(lhs),
        lhs_f64: rational_to_f64(lhs),
        ratio,
        report_ok: report.preconditions_ok(),
        equality: report.finite_value() == Some(lhs),
        bound: report.value.clone(),
        note: report.violations.iter().chain(&report.notes).join("; "),
    }
}

fn invalid_eval(n: usize, param: String, instance: String, reason: String) -> Eval {
    Eval {
        n,
        param,
        instance,
        lhs: String::new(),
        lhs_f64: f64::NAN,
        ratio: None,
        report_ok: false,
        bound: BoundValue::Infinite,
        equality: false,
        note: reason,
    }
}

fn recoverable(e: &Error) -> bool {
    matches!(e, Error::Precondition(_) | Error::NoValidIndices | Error::KOutOfRange { .. })
}

fn evaluate_job(cfg: &SweepConfig, index: usize, job: &Job, levels: &[BigRational]) -> Result<Vec<Eval>> {
    let st = cfg.statement;
    match job {
        Job::Perm { w, v, len } => {
            let n = w.len();
            let instance = describe_perm(w, v);
            let len_param = format!("len={}", format_rational(len));
            match st {
                Statement::Soze => {
                    let mc = McConfig::new(cfg.samples, split_seed(cfg.seed, index as u64));
                    let profile = match soze_decay_profile(w, levels, &mc) {
                        Ok(p) => p,
                        Err(e) if recoverable(&e) => {
                            return Ok(vec![invalid_eval(n, "L=*".into(), instance, e.to_string())])
                        }
                        Err(e) => return Err(e),
                    };
                    let instance = format!("w={w}");
                    Ok(profile
                        .rows
                        .iter()
                        .map(|row| {
                            let report = soze_bound(n, &row.l);
                            let est = row.estimate.estimate;
                            Eval {
                                n,
                                param: format!("L={}", format_rational(&row.l)),
                                instance: instance.clone(),
                                lhs: est.to_string(),
                                lhs_f64: est,
                                ratio: report.finite_value().map(|b| est / rational_to_f64(b)),
                                report_ok: report.preconditions_ok(),
                                equality: false,
                                bound: report.value.clone(),
                                note: format!(
                                    "stderr={};seed={};{}",
                                    row.estimate.stderr,
                                    row.estimate.seed,
                                    profile.normalization.describe()
                                ),
                            }
                        })
                        .collect())
                }
                Statement::Pawlowski => match pawlowski_check(w, v, cfg.cap) {
                    Ok(c) => {
                        let mut e = exact_eval(
                            n,
                            "-".into(),
                            instance,
                            &c.max_mass,
                            &BoundReport {
                                statement: st,
                                value: BoundValue::Finite(c.bound.clone()),
                                violations: Vec::new(),
                                inputs: Vec::new(),
                                constant_mode: false,
                                notes: c.notes.clone(),
                            },
                        );
                        e.note = format!("witness={}", format_rational(&c.witness));
                        Ok(vec![e])
                    }
                    Err(e) if recoverable(&e) => Ok(vec![invalid_eval(n, "-".into(), instance, e.to_string())]),
                    Err(e) => Err(e),
                },
                _ => {
                    let dist = perm_sum_distribution(w, v, cfg.cap)?;
                    let lhs = dist.concentration_function(len)?;
                    match st {
                        Statement::Main => {
                            let input = MainTheoremInput::new(w, v)?;
                            match optimize_prepared(&input, len) {
                                Ok(choice) => Ok(vec![exact_eval(
                                    n,
                                    format!("{len_param};i1={};i2={}", choice.i1, choice.i2),
                                    instance,
                                    &lhs,
                                    &choice.report,
                                )]),
                                Err(e) if recoverable(&e) => {
                                    Ok(vec![invalid_eval(n, len_param, instance, e.to_string())])
                                }
                                Err(e) => Err(e),
                            }
                        }
                        Statement::Sigma => {
                            let report = sigma_corollary_bound(w, v, len)?;
                            Ok(vec![exact_eval(n, len_param, instance, &lhs, &report)])
                        }
                        Statement::Repetition => {
                            // largest admissible ε; point mass, so the length is not used
                            let lhs = dist.max_point_mass().0;
                            let eps = BigRational::from_integer(1.into())
                                - BigRational::new((w.max_multiplicity() as i64).into(), (n as i64).into());
                            let report = repetition_corollary_bound(w, v, &eps)?;
                            Ok(vec![exact_eval(n, format!("eps={}", format_rational(&eps)), instance, &lhs, &report)])
                        }
                        _ => unreachable!("perm statements handled above"),
                    }
                }
            }
        }
        Job::Subset { a } => {
            let mode = if st == Statement::LemmaWith { SumMode::WithReplacement } else { SumMode::WithoutReplacement };
            let ks = cfg.k.resolve(a.len(), mode);
            let instance = format!("a={a}");
            Ok(scaling_rows(a, mode, &ks)?
                .into_iter()
                .map(|row| {
                    let report = subset_lemma_bound(row.n, row.k, mode).expect("k resolved in range");
                    exact_eval(row.n, format!("k={}", row.k), instance.clone(), &row.max_mass, &report)
                })
                .collect())
        }
        Job::Width { n } => {
            let n = *n;
            cfg.k
                .resolve(n, SumMode::WithoutReplacement)
                .into_iter()
                .map(|k| {
                    let width = stanley_width(n, k)?;
                    let frac = width_fraction(&width, n, k);
                    let report = subset_lemma_bound(n, k, SumMode::WithoutReplacement)?;
                    let mut e = exact_eval(n, format!("k={k}"), format!("n={n}"), &frac, &report);
                    e.note = format!("width={width}");
                    Ok(e)
                })
                .collect()
        }
    }
}

/// Run a sweep and summarize it.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutcome> {
    let jobs = build_jobs(cfg)?;
    let levels = cfg.level_values()?;
    let evals: Vec<Vec<Eval>> = with_pool(cfg.threads, || {
        jobs.par_iter()
            .enumerate()
            .map(|(i, job)| evaluate_job(cfg, i, job, &levels))
            .collect::<Result<Vec<_>>>()
    })??;

    let sharp = !cfg.statement.constant_mode();
    let mut records = Vec::new();
    let mut running_max = f64::NEG_INFINITY;
    for e in evals.into_iter().flatten() {
        let ratio = if e.report_ok { e.ratio } else { None };
        if let Some(r) = ratio {
            running_max = running_max.max(r);
        }
        let violation = match ratio {
            Some(r) if sharp => r > 1.0,
            Some(r) => cfg.ceiling.is_some_and(|c| r > c),
            None => false,
        };
        records.push(SweepRecord {
            statement: cfg.statement,
            n: e.n,
            param: e.param,
            instance: e.instance,
            lhs: e.lhs,
            lhs_f64: e.lhs_f64,
            bound: e.bound,
            ratio,
            running_max,
            violation,
            equality: e.equality && ratio.is_some(),
            note: e.note,
        });
    }
    let valid: Vec<&SweepRecord> = records.iter().filter(|r| r.ratio.is_some()).collect();
    if valid.is_empty() {
        return Err(Error::Config("generator produced no valid instances".into()));
    }
    let best = valid
        .iter()
        .fold(None::<&SweepRecord>, |b, r| match b {
            Some(b) if b.ratio >= r.ratio => Some(b),
            _ => Some(r),
        })
        .expect("non-empty");
    let per_size = per_size_maxima(valid.iter().map(|r| (r.n, r.ratio.expect("valid"))));
    let trend = trend_of(&per_size);
    let violations: Vec<String> = records
        .iter()
        .filter(|r| r.violation)
        .map(|r| format!("{} {} ratio={}", r.instance, r.param, r.ratio.unwrap_or(f64::NAN)))
        .collect();
    let equality_sizes: Vec<usize> = records.iter().filter(|r| r.equality).map(|r| r.n).unique().sorted().collect();
    let pass = violations.is_empty() && (sharp || trend.as_ref().is_none_or(|t| !t.significant));
    let summary = SweepSummary {
        statement: cfg.statement,
        records: records.len(),
        valid: valid.len(),
        c_star: best.ratio.expect("valid"),
        c_star_instance: format!("{} {}", best.instance, best.param),
        per_size,
        trend,
        violations,
        equality_sizes,
        pass,
    };
    Ok(SweepOutcome { records, summary })
}
