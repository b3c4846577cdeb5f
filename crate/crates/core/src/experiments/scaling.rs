//! Scaling of the maximal point mass of `k`-element sums against the lemma bounds.

use num_bigint::BigUint;
use num_integer::binomial;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::bounds::subset_lemma_bound;
use crate::engines::{subset_sum_with_replacement_profile, subset_sum_without_replacement_profile, SumMode};
use crate::error::{Error, Result};
use crate::numerics::{rational_to_f64, RationalVector};

use super::trend::{kendall_trend, TrendTest};

/// Which `k` to evaluate for a ground set of size `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KRule {
    Named(KName),
    List(Vec<usize>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KName {
    /// Every `k` the lemma allows.
    All,
    /// `⌊n/2⌋`.
    Half,
    /// `k = n`.
    N,
    One,
}

impl Default for KRule {
    fn default() -> Self {
        KRule::Named(KName::All)
    }
}

impl KRule {
    /// The requested `k` that `mode` allows for a ground set of size `n`.
    pub fn resolve(&self, n: usize, mode: SumMode) -> Vec<usize> {
        let (lo, hi) = match mode {
            SumMode::WithReplacement => (1, n),
            SumMode::WithoutReplacement => (1, n.saturating_sub(1)),
        };
        let wanted: Vec<usize> = match self {
            KRule::Named(KName::All) => (lo..=hi).collect(),
            KRule::Named(KName::Half) => vec![n / 2],
            KRule::Named(KName::N) => vec![n],
            KRule::Named(KName::One) => vec![1],
            KRule::List(ks) => ks.clone(),
        };
        wanted.into_iter().filter(|k| (lo..=hi).contains(k)).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingRow {
    pub n: usize,
    pub k: usize,
    pub max_mass: BigRational,
    pub bound: BigRational,
    pub ratio: f64,
}

/// One row per `k` for the ground set `a`.
pub fn scaling_rows(a: &RationalVector, mode: SumMode, ks: &[usize]) -> Result<Vec<ScalingRow>> {
    let n = a.len();
    let Some(&k_max) = ks.iter().max() else {
        return Ok(Vec::new());
    };
    let laws = match mode {
        SumMode::WithReplacement => {
            let mut p = subset_sum_with_replacement_profile(a, k_max)?;
            p.insert(0, crate::numerics::DiscreteDistribution::point_mass_at(p[0].grid().clone(), 0));
            p
        }
        SumMode::WithoutReplacement => subset_sum_without_replacement_profile(a)?,
    };
    ks.iter()
        .map(|&k| {
            let max_mass = laws[k].max_point_mass().0;
            let bound = subset_lemma_bound(n, k, mode)?
                .finite_value()
                .cloned()
                .expect("lemma bound has no failing preconditions");
            let ratio = rational_to_f64(&(&max_mass / &bound));
            Ok(ScalingRow { n, k, max_mass, bound, ratio })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingStudy {
    pub mode: SumMode,
    pub rows: Vec<ScalingRow>,
    /// Largest ratio over all rows.
    pub c_star: f64,
    /// `(n, max ratio over k)` in increasing `n`.
    pub per_size: Vec<(usize, f64)>,
    pub trend: Option<TrendTest>,
}

impl ScalingStudy {
    /// Bounded constant: finite `C*` and no significant increasing trend of the per-size maxima.
    pub fn bounded(&self) -> bool {
        self.c_star.is_finite() && self.trend.as_ref().is_none_or(|t| !t.significant)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,k,max_mass,bound,ratio\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.n,
                r.k,
                crate::numerics::format_rational(&r.max_mass),
                crate::numerics::format_rational(&r.bound),
                r.ratio
            ));
        }
        out
    }
}

/// `(n, max ratio)` pairs from rows sorted by `n`.
pub fn per_size_maxima(rows: impl IntoIterator<Item = (usize, f64)>) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = Vec::new();
    for (n, r) in rows {
        match out.iter_mut().find(|(m, _)| *m == n) {
            Some((_, best)) => *best = best.max(r),
            None => out.push((n, r)),
        }
    }
    out.sort_by_key(|&(n, _)| n);
    out
}

pub fn trend_of(per_size: &[(usize, f64)]) -> Option<TrendTest> {
    let xs: Vec<f64> = per_size.iter().map(|&(n, _)| n as f64).collect();
    let ys: Vec<f64> = per_size.iter().map(|&(_, r)| r).collect();
    kendall_trend(&xs, &ys).ok()
}

/// Scaling study on `A = (1, …, n)` for each `n` in `sizes`.
pub fn scaling_study(mode: SumMode, sizes: &[usize], k_rule: &KRule) -> Result<ScalingStudy> {
    let mut rows = Vec::new();
    for &n in sizes {
        let a = RationalVector::arithmetic(n)?;
        rows.extend(scaling_rows(&a, mode, &k_rule.resolve(n, mode))?);
    }
    if rows.is_empty() {
        return Err(Error::Config("no valid (n, k) pairs".into()));
    }
    let per_size = per_size_maxima(rows.iter().map(|r| (r.n, r.ratio)));
    let c_star = per_size.iter().map(|&(_, r)| r).fold(f64::NEG_INFINITY, f64::max);
    Ok(ScalingStudy { mode, trend: trend_of(&per_size), rows, c_star, per_size })
}

/// `stanley_width(n, k) / C(n, k)` without going through a distribution.
pub fn width_fraction(width: &BigUint, n: usize, k: usize) -> BigRational {
    BigRational::new(width.clone().into(), binomial(BigUint::from(n), BigUint::from(k)).into())
}
