//! Search for instances that maximize the point mass or `Q(·, t)` of `w_π · v`.
//!
//! Coordinates range over `{−B, …, B}`, `v` is strictly increasing and `w`
//! nonconstant. The law of `w_π · v` depends on `w` only through its multiset,
//! so `w` is enumerated as a non-decreasing vector.

use itertools::Itertools;
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use crate::engines::{perm_sum_distribution, DEFAULT_PERM_CAP};
use crate::error::{Error, Result};
use crate::numerics::{format_rational, RationalVector};
use crate::sampling::{partial_shuffle, substream_rng, uniform_below, StreamRng};

pub const EXHAUSTIVE_MAX_N: usize = 5;
/// Largest number of `(w, v)` pairs the exhaustive mode will evaluate.
pub const EXHAUSTIVE_LIMIT: u64 = 500_000;
pub const DEFAULT_RESTARTS: usize = 32;
const MAX_CLIMB_STEPS: usize = 500;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Objective {
    PointMass,
    /// `Q(·, t)`.
    Concentration(BigRational),
}

impl std::fmt::Display for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Objective::PointMass => f.write_str("point-mass"),
            Objective::Concentration(t) => write!(f, "concentration:{}", format_rational(t)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub n: usize,
    pub coord_bound: i64,
    pub objective: Objective,
    pub seed: u64,
    pub restarts: usize,
    pub cap: usize,
}

impl SearchConfig {
    pub fn new(n: usize, coord_bound: i64) -> Self {
        Self {
            n,
            coord_bound,
            objective: Objective::PointMass,
            seed: 0,
            restarts: DEFAULT_RESTARTS,
            cap: DEFAULT_PERM_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub w: Vec<i64>,
    pub v: Vec<i64>,
    pub value: BigRational,
    /// Attaining value (point mass) or left end of a best window (`Q`).
    pub witness: BigRational,
    pub exhaustive: bool,
    pub evaluated: u64,
}

fn evaluate(w: &[i64], v: &[i64], objective: &Objective, cap: usize) -> Result<(BigRational, BigRational)> {
    let dist = perm_sum_distribution(&RationalVector::from_integers(w)?, &RationalVector::from_integers(v)?, cap)?;
    Ok(match objective {
        Objective::PointMass => dist.max_point_mass(),
        Objective::Concentration(t) => {
            let (count, lo) = dist.concentration_window(t)?;
            (BigRational::new(count.into(), dist.total().clone().into()), dist.grid().value(lo))
        }
    })
}

fn validate(cfg: &SearchConfig) -> Result<()> {
    if cfg.n < 2 {
        return Err(Error::Precondition("search needs n >= 2".into()));
    }
    if cfg.coord_bound < 1 {
        return Err(Error::Precondition("coord_bound >= 1 required".into()));
    }
    if (2 * cfg.coord_bound + 1) < cfg.n as i64 {
        return Err(Error::Precondition("grid too small for a strictly increasing v".into()));
    }
    if cfg.n > cfg.cap {
        return Err(Error::CapExceeded { n: cfg.n, cap: cfg.cap });
    }
    if let Objective::Concentration(t) = &cfg.objective {
        if t < &BigRational::zero() {
            return Err(Error::NegativeLength);
        }
    }
    Ok(())
}

pub fn extremal_search(cfg: &SearchConfig) -> Result<SearchResult> {
    validate(cfg)?;
    if cfg.n <= EXHAUSTIVE_MAX_N {
        exhaustive(cfg)
    } else {
        hill_climb(cfg)
    }
}

fn exhaustive(cfg: &SearchConfig) -> Result<SearchResult> {
    let (n, b) = (cfg.n, cfg.coord_bound);
    let size = (2 * b + 1) as u64;
    let count = |m: u64, k: u64| num_integer::binomial(BigUint::from(m), BigUint::from(k));
    let pairs = count(size, n as u64) * count(size + n as u64 - 1, n as u64);
    if pairs > BigUint::from(EXHAUSTIVE_LIMIT) {
        return Err(Error::OracleCap {
            size: usize::try_from(pairs).unwrap_or(usize::MAX),
            cap: EXHAUSTIVE_LIMIT as usize,
        });
    }
    let vs: Vec<Vec<i64>> = (-b..=b).combinations(n).collect();
    let ws: Vec<Vec<i64>> = (-b..=b)
        .combinations_with_replacement(n)
        .filter(|w| w[0] != w[n - 1])
        .collect();
    let jobs: Vec<(usize, usize)> = (0..vs.len()).cartesian_product(0..ws.len()).collect();
    let scored = jobs
        .par_iter()
        .map(|&(iv, iw)| evaluate(&ws[iw], &vs[iv], &cfg.objective, cfg.cap).map(|s| (iv, iw, s)))
        .collect::<Result<Vec<_>>>()?;
    // first strict maximum in enumeration order
    let mut best: Option<&(usize, usize, (BigRational, BigRational))> = None;
    for s in &scored {
        if best.is_none_or(|b| s.2 .0 > b.2 .0) {
            best = Some(s);
        }
    }
    let (iv, iw, (value, witness)) = best.expect("grid is non-empty").clone();
    Ok(SearchResult {
        w: ws[iw].clone(),
        v: vs[iv].clone(),
        value,
        witness,
        exhaustive: true,
        evaluated: scored.len() as u64,
    })
}

fn random_start(n: usize, b: i64, rng: &mut StreamRng) -> (Vec<i64>, Vec<i64>) {
    let mut pool: Vec<i64> = (-b..=b).collect();
    partial_shuffle(&mut pool, n, rng);
    let mut v = pool[..n].to_vec();
    v.sort_unstable();
    loop {
        let mut w: Vec<i64> = (0..n)
            .map(|_| uniform_below(rng, (2 * b + 1) as u64) as i64 - b)
            .collect();
        w.sort_unstable();
        if w[0] != w[n - 1] {
            return (w, v);
        }
    }
}

/// Single-coordinate ±1 moves that keep `w` nonconstant and `v` strictly increasing.
fn neighbours(w: &[i64], v: &[i64], b: i64) -> Vec<(Vec<i64>, Vec<i64>)> {
    let mut out = Vec::new();
    for i in 0..w.len() {
        for d in [-1, 1] {
            let x = w[i] + d;
            if x.abs() <= b {
                let mut nw = w.to_vec();
                nw[i] = x;
                nw.sort_unstable();
                if nw[0] != nw[nw.len() - 1] && nw != w {
                    out.push((nw, v.to_vec()));
                }
            }
        }
    }
    for i in 0..v.len() {
        for d in [-1, 1] {
            let x = v[i] + d;
            let ok = x.abs() <= b
                && (i == 0 || v[i - 1] < x)
                && (i + 1 == v.len() || x < v[i + 1]);
            if ok {
                let mut nv = v.to_vec();
                nv[i] = x;
                out.push((w.to_vec(), nv));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

fn hill_climb(cfg: &SearchConfig) -> Result<SearchResult> {
    let (n, b) = (cfg.n, cfg.coord_bound);
    let runs = (0..cfg.restarts.max(1))
        .into_par_iter()
        .map(|r| -> Result<(SearchResult, u64)> {
            let mut rng = substream_rng(cfg.seed, r as u64);
            let (mut w, mut v) = random_start(n, b, &mut rng);
            let (mut value, mut witness) = evaluate(&w, &v, &cfg.objective, cfg.cap)?;
            let mut evaluated = 1u64;
            for _ in 0..MAX_CLIMB_STEPS {
                let mut improved = None;
                for (nw, nv) in neighbours(&w, &v, b) {
                    let (val, wit) = evaluate(&nw, &nv, &cfg.objective, cfg.cap)?;
                    evaluated += 1;
                    let best_so_far = improved.as_ref().map_or(&value, |(_, _, bv, _)| bv);
                    if &val > best_so_far {
                        improved = Some((nw, nv, val, wit));
                    }
                }
                match improved {
                    Some((nw, nv, val, wit)) => {
                        (w, v, value, witness) = (nw, nv, val, wit);
                    }
                    None => break,
                }
            }
            Ok((SearchResult { w, v, value, witness, exhaustive: false, evaluated: 0 }, evaluated))
        })
        .collect::<Result<Vec<_>>>()?;
    let total: u64 = runs.iter().map(|(_, e)| e).sum();
    let mut best: Option<SearchResult> = None;
    for (r, _) in runs {
        if best.as_ref().is_none_or(|b| r.value > b.value) {
            best = Some(r);
        }
    }
    let mut best = best.expect("at least one restart");
    best.evaluated = total;
    Ok(best)
}
