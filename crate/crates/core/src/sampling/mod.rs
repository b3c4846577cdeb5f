//! Seeded Monte Carlo estimators.
//!
//! Samples are drawn in fixed chunks of [`CHUNK_SIZE`]; chunk `c` owns the
//! sub-stream `substream_rng(seed, c)`. Chunk results are merged in chunk
//! order, so an estimate depends only on `(seed, samples, instance)` and never
//! on the number of worker threads.

pub mod rng;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;

use crate::engines::SumMode;
use crate::error::{Error, Result};
use crate::numerics::{embed, Grid, Interval, RationalVector};
pub use rng::{split_seed, stream_rng, substream_rng, uniform_below, StreamRng};

pub const CHUNK_SIZE: u64 = 4096;
pub const DEFAULT_BOOTSTRAP_RESAMPLES: usize = 200;

/// Stream index reserved for bootstrap resampling; chunk streams count up from 0.
const BOOTSTRAP_STREAM_BASE: u64 = 1 << 62;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self { samples, seed, threads: None }
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }
}

/// Hit-frequency estimate with its binomial standard error.
#[derive(Clone, Debug, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub hits: u64,
    pub samples: u64,
    pub seed: u64,
}

impl McEstimate {
    pub fn from_hits(hits: u64, samples: u64, seed: u64) -> Self {
        let p = hits as f64 / samples as f64;
        Self {
            estimate: p,
            stderr: (p * (1.0 - p) / samples as f64).sqrt(),
            hits,
            samples,
            seed,
        }
    }
}

pub(crate) fn with_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| Error::Config(e.to_string()))?;
            Ok(pool.install(job))
        }
        None => Ok(job()),
    }
}

/// Run `work(rng, count)` on every chunk and return the results in chunk order.
pub fn run_chunks<T, F>(cfg: &McConfig, work: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut StreamRng, u64) -> T + Sync + Send,
{
    if cfg.samples == 0 {
        return Err(Error::NoSamples);
    }
    let chunks = cfg.samples.div_ceil(CHUNK_SIZE);
    let (samples, seed) = (cfg.samples, cfg.seed);
    with_pool(cfg.threads, || {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let count = CHUNK_SIZE.min(samples - c * CHUNK_SIZE);
                let mut rng = substream_rng(seed, c);
                work(&mut rng, count)
            })
            .collect()
    })
}

/// Fisher–Yates: position `i` swaps with a uniform position in `i..n`.
/// Consumes `n − 1` bounded draws.
pub fn shuffle<T, R: rand_core::RngCore>(items: &mut [T], rng: &mut R) {
    partial_shuffle(items, items.len().saturating_sub(1), rng);
}

/// Shuffle only the first `k` slots: afterwards `items[..k]` is a uniform
/// ordered `k`-sample without replacement.
pub fn partial_shuffle<T, R: rand_core::RngCore>(items: &mut [T], k: usize, rng: &mut R) {
    let n = items.len();
    for i in 0..k.min(n) {
        let j = i + uniform_below(rng, (n - i) as u64) as usize;
        items.swap(i, j);
    }
}

/// A uniform permutation of `0..n`, as the image list `π(0), …, π(n − 1)`.
pub fn sample_permutation<R: rand_core::RngCore>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    shuffle(&mut p, rng);
    p
}

/// Draws `w_π · v` in grid units of `grid()`.
#[derive(Clone, Debug)]
pub struct PermSumSampler {
    w: Vec<i64>,
    v: Vec<i64>,
    grid: Grid,
}

impl PermSumSampler {
    pub fn new(w: &RationalVector, v: &RationalVector) -> Result<Self> {
        if w.len() != v.len() {
            return Err(Error::LengthMismatch { w: w.len(), v: v.len() });
        }
        let ew = embed(w)?;
        let ev = embed(v)?;
        let bound: i128 = ew
            .values
            .iter()
            .map(|x| (*x as i128).abs())
            .max()
            .unwrap_or(0)
            * ev.values.iter().map(|x| (*x as i128).abs()).sum::<i128>();
        if bound > i64::MAX as i128 {
            return Err(Error::GridOverflow);
        }
        Ok(Self {
            w: ew.values,
            v: ev.values,
            grid: Grid::with_scale(ew.grid.scale * ev.grid.scale),
        })
    }

    pub fn n(&self) -> usize {
        self.w.len()
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Reshuffles `perm` in place and returns the resulting sum. `perm` must hold a
    /// permutation of `0..n`; shuffling any arrangement yields a uniform one.
    pub fn sample_with(&self, rng: &mut StreamRng, perm: &mut [usize]) -> i64 {
        shuffle(perm, rng);
        perm.iter()
            .zip(&self.w)
            .map(|(&p, &wi)| wi * self.v[p])
            .sum()
    }

    pub fn identity(&self) -> Vec<usize> {
        (0..self.n()).collect()
    }

    /// Grid-unit bounds of a closed value interval (empty when `lo > hi`).
    pub fn grid_bounds(&self, interval: &Interval) -> (i64, i64) {
        grid_bounds(&self.grid, interval)
    }
}

pub(crate) fn grid_bounds(grid: &Grid, interval: &Interval) -> (i64, i64) {
    let clamp = |x: BigInt| {
        x.to_i64()
            .unwrap_or(if x.is_negative() { i64::MIN } else { i64::MAX })
    };
    (
        clamp(grid.ceil_position(interval.lo())),
        clamp(grid.floor_position(interval.hi())),
    )
}

/// Fraction of sampled permutations with `w_π · v ∈ I`; membership is an exact
/// integer comparison on the grid.
pub fn estimate_interval_mass(
    w: &RationalVector,
    v: &RationalVector,
    interval: &Interval,
    cfg: &McConfig,
) -> Result<McEstimate> {
    let sampler = PermSumSampler::new(w, v)?;
    let (lo, hi) = sampler.grid_bounds(interval);
    let hits = run_chunks(cfg, |rng, count| {
        let mut perm = sampler.identity();
        (0..count)
            .filter(|_| {
                let s = sampler.sample_with(rng, &mut perm);
                lo <= s && s <= hi
            })
            .count() as u64
    })?;
    Ok(McEstimate::from_hits(hits.into_iter().sum(), cfg.samples, cfg.seed))
}

pub fn estimate_point_mass(
    w: &RationalVector,
    v: &RationalVector,
    x: &BigRational,
    cfg: &McConfig,
) -> Result<McEstimate> {
    estimate_interval_mass(w, v, &Interval::point(x.clone()), cfg)
}

/// One draw of a `k`-element sum from distinct values, in grid units of `grid()`.
#[derive(Clone, Debug)]
pub struct SubsetSampler {
    values: Vec<i64>,
    k: usize,
    mode: SumMode,
    grid: Grid,
}

impl SubsetSampler {
    pub fn new(a: &RationalVector, k: usize, mode: SumMode) -> Result<Self> {
        if !a.all_distinct() {
            return Err(Error::RepeatedCoordinates);
        }
        let n = a.len();
        let k_ok = match mode {
            SumMode::WithReplacement => k >= 1,
            SumMode::WithoutReplacement => k <= n,
        };
        if !k_ok {
            return Err(Error::KOutOfRange { k, n });
        }
        let e = embed(a)?;
        let max = e.values.iter().map(|x| (*x as i128).abs()).max().unwrap_or(0);
        if max * k as i128 > i64::MAX as i128 {
            return Err(Error::GridOverflow);
        }
        Ok(Self { values: e.values, k, mode, grid: e.grid })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `scratch` must hold a permutation of `0..n` (used only without replacement).
    pub fn sample_with(&self, rng: &mut StreamRng, scratch: &mut [usize]) -> i64 {
        match self.mode {
            SumMode::WithReplacement => (0..self.k)
                .map(|_| self.values[uniform_below(rng, self.values.len() as u64) as usize])
                .sum(),
            SumMode::WithoutReplacement => {
                partial_shuffle(scratch, self.k, rng);
                scratch[..self.k].iter().map(|&i| self.values[i]).sum()
            }
        }
    }

    pub fn scratch(&self) -> Vec<usize> {
        (0..self.values.len()).collect()
    }
}

/// One draw of the sum of `k` elements of `a`.
pub fn sample_subset_sum(
    a: &RationalVector,
    k: usize,
    mode: SumMode,
    rng: &mut StreamRng,
) -> Result<BigRational> {
    let s = SubsetSampler::new(a, k, mode)?;
    let mut scratch = s.scratch();
    let x = s.sample_with(rng, &mut scratch);
    Ok(s.grid.value(x))
}

/// Empirical concentration function with a bootstrap standard error.
///
/// The plug-in maximum over windows is biased upward for `Q`; the bias is
/// reported, not corrected.
#[derive(Clone, Debug, PartialEq)]
pub struct ConcentrationEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
    pub resamples: usize,
}

impl ConcentrationEstimate {
    pub const BIAS_NOTE: &'static str = "plug-in maximum; biased upward for Q";
}

fn window_max(support: &[i64], counts: &[u64], width: i64) -> u64 {
    let mut best = 0;
    let mut window = 0;
    let mut right = 0;
    for left in 0..support.len() {
        while right < support.len() && support[right] - support[left] <= width {
            window += counts[right];
            right += 1;
        }
        best = best.max(window);
        window -= counts[left];
    }
    best
}

/// Estimate `Q(S, t)` from `cfg.samples` draws of `sampler` (grid units of `grid`).
pub fn estimate_concentration_function<F>(
    sampler: F,
    grid: &Grid,
    t: &BigRational,
    cfg: &McConfig,
    resamples: usize,
) -> Result<ConcentrationEstimate>
where
    F: Fn(&mut StreamRng) -> i64 + Sync + Send,
{
    if t.is_negative() {
        return Err(Error::NegativeLength);
    }
    let width = grid
        .length_units(t)
        .floor()
        .to_integer()
        .to_i64()
        .unwrap_or(i64::MAX);
    let mut draws: Vec<i64> = run_chunks(cfg, |rng, count| {
        (0..count).map(|_| sampler(rng)).collect::<Vec<_>>()
    })?
    .into_iter()
    .flatten()
    .collect();
    draws.sort_unstable();

    let mut support: Vec<i64> = Vec::new();
    let mut counts: Vec<u64> = Vec::new();
    let mut slot_of_draw = Vec::with_capacity(draws.len());
    for &x in &draws {
        if support.last() != Some(&x) {
            support.push(x);
            counts.push(0);
        }
        *counts.last_mut().unwrap() += 1;
        slot_of_draw.push(support.len() - 1);
    }
    let n = draws.len() as u64;
    let estimate = window_max(&support, &counts, width) as f64 / n as f64;

    let seed = cfg.seed;
    let replicates: Vec<f64> = with_pool(cfg.threads, || {
        (0..resamples as u64)
            .into_par_iter()
            .map(|b| {
                let mut rng = substream_rng(seed, BOOTSTRAP_STREAM_BASE + b);
                let mut c = vec![0u64; support.len()];
                for _ in 0..n {
                    c[slot_of_draw[uniform_below(&mut rng, n) as usize]] += 1;
                }
                window_max(&support, &c, width) as f64 / n as f64
            })
            .collect()
    })?;
    let stderr = if replicates.len() > 1 {
        let m = replicates.iter().sum::<f64>() / replicates.len() as f64;
        (replicates.iter().map(|r| (r - m).powi(2)).sum::<f64>() / (replicates.len() - 1) as f64)
            .sqrt()
    } else {
        0.0
    };
    Ok(ConcentrationEstimate { estimate, stderr, samples: cfg.samples, seed, resamples })
}

/// `Q(w_π · v, t)` by Monte Carlo.
pub fn estimate_perm_concentration(
    w: &RationalVector,
    v: &RationalVector,
    t: &BigRational,
    cfg: &McConfig,
) -> Result<ConcentrationEstimate> {
    let sampler = PermSumSampler::new(w, v)?;
    let n = sampler.n();
    estimate_concentration_function(
        |rng| {
            let mut perm: Vec<usize> = (0..n).collect();
            sampler.sample_with(rng, &mut perm)
        },
        sampler.grid(),
        t,
        cfg,
        DEFAULT_BOOTSTRAP_RESAMPLES,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::parse_rational;
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    use std::collections::HashMap;

    fn vec_of(s: &str) -> RationalVector {
        s.parse().unwrap()
    }

    fn chi_square_p(observed: &[u64], expected: &[f64]) -> f64 {
        let stat: f64 = observed
            .iter()
            .zip(expected)
            .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
            .sum();
        let dist = ChiSquared::new((observed.len() - 1) as f64).unwrap();
        1.0 - dist.cdf(stat)
    }

    #[test]
    fn trivial_permutations() {
        let mut rng = stream_rng(3);
        assert_eq!(sample_permutation(1, &mut rng), vec![0]);
        assert!(sample_permutation(0, &mut rng).is_empty());
    }

    #[test]
    fn fixed_seed_reproduces_permutations() {
        let a: Vec<Vec<usize>> = {
            let mut r = stream_rng(11);
            (0..20).map(|_| sample_permutation(6, &mut r)).collect()
        };
        let b: Vec<Vec<usize>> = {
            let mut r = stream_rng(11);
            (0..20).map(|_| sample_permutation(6, &mut r)).collect()
        };
        assert_eq!(a, b);
        // pinned first draw guards against silent algorithm drift across platforms
        let mut r = stream_rng(11);
        assert_eq!(sample_permutation(6, &mut r), vec![5, 0, 1, 4, 3, 2]);
        let mut r = stream_rng(0);
        assert_eq!(rand_core::RngCore::next_u64(&mut r), 0x5317_5d61_490b_23df);
    }

    #[test]
    fn permutation_sampler_is_uniform_chi_square() {
        for n in 2..=4usize {
            let draws = 600_000u64;
            let mut counts: HashMap<Vec<usize>, u64> = HashMap::new();
            let mut rng = stream_rng(1000 + n as u64);
            for _ in 0..draws {
                *counts.entry(sample_permutation(n, &mut rng)).or_insert(0) += 1;
            }
            let cells = (1..=n as u64).product::<u64>();
            assert_eq!(counts.len() as u64, cells);
            let expected = vec![draws as f64 / cells as f64; cells as usize];
            let observed: Vec<u64> = counts.values().copied().collect();
            let p = chi_square_p(&observed, &expected);
            assert!(p > 1e-6, "n = {n}: p = {p}");
            if n == 3 {
                // each frequency within 5σ of 1/6
                let sigma = (draws as f64 * (1.0 / 6.0) * (5.0 / 6.0)).sqrt();
                for &o in &observed {
                    assert!((o as f64 - draws as f64 / 6.0).abs() < 5.0 * sigma);
                }
            }
        }
    }

    #[test]
    fn subset_sampler_matches_exact_laws() {
        let mut rng = stream_rng(5);
        let s = SubsetSampler::new(&vec_of("1,2,3"), 2, SumMode::WithoutReplacement).unwrap();
        let mut scratch = s.scratch();
        let mut counts = [0u64; 3];
        for _ in 0..100_000 {
            counts[(s.sample_with(&mut rng, &mut scratch) - 3) as usize] += 1;
        }
        assert!(chi_square_p(&counts, &[100_000.0 / 3.0; 3]) > 1e-6, "{counts:?}");

        let s = SubsetSampler::new(&vec_of("0,1"), 2, SumMode::WithReplacement).unwrap();
        let mut counts = [0u64; 3];
        for _ in 0..100_000 {
            counts[s.sample_with(&mut rng, &mut scratch) as usize] += 1;
        }
        assert!(chi_square_p(&counts, &[25_000.0, 50_000.0, 25_000.0]) > 1e-6, "{counts:?}");

        let a = vec_of("1/2,3,7");
        for _ in 0..10 {
            assert_eq!(
                sample_subset_sum(&a, 3, SumMode::WithoutReplacement, &mut rng).unwrap(),
                parse_rational("21/2").unwrap()
            );
        }
    }

    #[test]
    fn subset_sampler_preconditions() {
        assert!(SubsetSampler::new(&vec_of("1,1"), 1, SumMode::WithReplacement).is_err());
        assert!(SubsetSampler::new(&vec_of("1,2"), 0, SumMode::WithReplacement).is_err());
        assert!(SubsetSampler::new(&vec_of("1,2"), 3, SumMode::WithoutReplacement).is_err());
    }

    #[test]
    fn interval_mass_edge_cases() {
        let (w, v) = (vec_of("1,-1,0"), vec_of("1,2,3"));
        let cfg = McConfig::new(10_000, 9);
        let all = estimate_interval_mass(&w, &v, &"-100:100".parse().unwrap(), &cfg).unwrap();
        assert_eq!((all.estimate, all.stderr), (1.0, 0.0));
        let none = estimate_interval_mass(&w, &v, &"3:10".parse().unwrap(), &cfg).unwrap();
        assert_eq!(none.estimate, 0.0);
        let off_grid = estimate_point_mass(&w, &v, &parse_rational("1/2").unwrap(), &cfg).unwrap();
        assert_eq!(off_grid.estimate, 0.0);
        assert!(matches!(
            estimate_interval_mass(&w, &vec_of("1"), &"0:1".parse().unwrap(), &cfg),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            estimate_interval_mass(&w, &v, &"0:1".parse().unwrap(), &McConfig::new(0, 1)),
            Err(Error::NoSamples)
        ));
    }

    #[test]
    fn point_mass_estimate_is_close_to_exact() {
        let est = estimate_point_mass(
            &vec_of("1,-1,0"),
            &vec_of("1,2,3"),
            &parse_rational("1").unwrap(),
            &McConfig::new(100_000, 21),
        )
        .unwrap();
        assert!((est.estimate - 1.0 / 3.0).abs() <= 3.0 * est.stderr, "{est:?}");
    }

    #[test]
    fn large_n_tight_instance() {
        let n = 1000;
        let mut w = vec![0i64; n];
        w[0] = 1;
        w[1] = -1;
        let est = estimate_point_mass(
            &RationalVector::from_integers(&w).unwrap(),
            &RationalVector::arithmetic(n).unwrap(),
            &parse_rational("1").unwrap(),
            &McConfig::new(100_000, 77),
        )
        .unwrap();
        assert!((est.estimate - 1.0 / n as f64).abs() <= 3.0 * est.stderr, "{est:?}");
    }

    #[test]
    fn estimates_do_not_depend_on_thread_count() {
        let (w, v) = (vec_of("3,-1,0,2,5,1"), vec_of("1,2,3,4,5,6"));
        let i: Interval = "10:20".parse().unwrap();
        let one = estimate_interval_mass(&w, &v, &i, &McConfig::new(50_000, 4).with_threads(1)).unwrap();
        let four = estimate_interval_mass(&w, &v, &i, &McConfig::new(50_000, 4).with_threads(4)).unwrap();
        assert_eq!(one, four);
        let t = parse_rational("2").unwrap();
        let q1 = estimate_perm_concentration(&w, &v, &t, &McConfig::new(20_000, 4).with_threads(1)).unwrap();
        let q3 = estimate_perm_concentration(&w, &v, &t, &McConfig::new(20_000, 4).with_threads(3)).unwrap();
        assert_eq!(q1, q3);
    }

    #[test]
    fn concentration_estimates() {
        let cfg = McConfig::new(60_000, 8);
        let uniform = SubsetSampler::new(&vec_of("1,2,3"), 2, SumMode::WithoutReplacement).unwrap();
        let one = parse_rational("1").unwrap();
        let q = estimate_concentration_function(
            |rng| uniform.sample_with(rng, &mut uniform.scratch()),
            uniform.grid(),
            &one,
            &cfg,
            100,
        )
        .unwrap();
        assert!((q.estimate - 2.0 / 3.0).abs() <= 4.0 * q.stderr.max(1e-3), "{q:?}");

        let constant = estimate_concentration_function(|_| 7, &Grid::unit(), &one, &cfg, 50).unwrap();
        assert_eq!((constant.estimate, constant.stderr), (1.0, 0.0));

        let wide = estimate_concentration_function(
            |rng| uniform.sample_with(rng, &mut uniform.scratch()),
            uniform.grid(),
            &parse_rational("10").unwrap(),
            &cfg,
            20,
        )
        .unwrap();
        assert_eq!(wide.estimate, 1.0);

        assert!(matches!(
            estimate_concentration_function(|_| 0, &Grid::unit(), &parse_rational("-1").unwrap(), &cfg, 10),
            Err(Error::NegativeLength)
        ));
    }
}
