//! Exact-arithmetic foundation.
//!
//! Inputs are vectors of exact rationals. Every engine works on an integer
//! grid obtained by clearing denominators, so probabilities are ratios of
//! big integers and point-mass comparisons are exact.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Parse `p/q` or a plain integer into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::ParseRational(s.to_string()));
    }
    let parsed = match t.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| Error::ParseRational(s.to_string()))?;
            let q = BigInt::from_str(q.trim()).map_err(|_| Error::ParseRational(s.to_string()))?;
            if q.is_zero() {
                return Err(Error::ParseRational(s.to_string()));
            }
            BigRational::new(p, q)
        }
        None => BigRational::from_integer(
            BigInt::from_str(t).map_err(|_| Error::ParseRational(s.to_string()))?,
        ),
    };
    Ok(parsed)
}

/// Render a rational as `p/q`, or `p` when the denominator is 1.
pub fn format_rational(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn rational_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn int(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// A nonempty vector of exact rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalVector {
    coords: Vec<BigRational>,
}

impl RationalVector {
    pub fn new(coords: Vec<BigRational>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyVector);
        }
        Ok(Self { coords })
    }

    pub fn from_integers(values: &[i64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| int(x)).collect())
    }

    /// `(1, 2, ..., n)`.
    pub fn arithmetic(n: usize) -> Result<Self> {
        Self::new((1..=n as i64).map(int).collect())
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    /// Always false: construction rejects empty vectors.
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn get(&self, i: usize) -> &BigRational {
        &self.coords[i]
    }

    pub fn sorted(&self) -> Self {
        let mut coords = self.coords.clone();
        coords.sort();
        Self { coords }
    }

    pub fn is_increasing(&self) -> bool {
        self.coords.windows(2).all(|p| p[0] <= p[1])
    }

    pub fn is_constant(&self) -> bool {
        self.coords.iter().all(|c| c == &self.coords[0])
    }

    pub fn all_distinct(&self) -> bool {
        self.max_multiplicity() == 1
    }

    /// Largest number of times any single value repeats.
    pub fn max_multiplicity(&self) -> usize {
        let mut sorted = self.coords.clone();
        sorted.sort();
        let mut best = 0;
        let mut run = 0;
        for i in 0..sorted.len() {
            if i > 0 && sorted[i] == sorted[i - 1] {
                run += 1;
            } else {
                run = 1;
            }
            best = best.max(run);
        }
        best
    }

    pub fn sum(&self) -> BigRational {
        self.coords.iter().fold(BigRational::zero(), |acc, c| acc + c)
    }

    pub fn mean(&self) -> BigRational {
        self.sum() / int(self.len() as i64)
    }

    pub fn map(&self, f: impl Fn(&BigRational) -> BigRational) -> Self {
        Self { coords: self.coords.iter().map(f).collect() }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(rational_to_f64).collect()
    }
}

impl FromStr for RationalVector {
    type Err = Error;

    /// Comma-separated rationals, e.g. `1/2,3,-1`.
    fn from_str(s: &str) -> Result<Self> {
        let coords = s
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(parse_rational)
            .collect::<Result<Vec<_>>>()?;
        Self::new(coords)
    }
}

impl fmt::Display for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(format_rational).collect();
        f.write_str(&parts.join(","))
    }
}

/// Map between integer grid units and exact values: `value = (x + offset) / scale`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Grid {
    pub scale: BigInt,
    pub offset: BigInt,
}

impl Grid {
    pub fn unit() -> Self {
        Self { scale: BigInt::one(), offset: BigInt::zero() }
    }

    pub fn with_scale(scale: BigInt) -> Self {
        Self { scale, offset: BigInt::zero() }
    }

    pub fn value(&self, x: i64) -> BigRational {
        BigRational::new(BigInt::from(x) + &self.offset, self.scale.clone())
    }

    /// Exact grid position of `value`, if it lies on the grid.
    pub fn position(&self, value: &BigRational) -> Option<BigInt> {
        let g = value * BigRational::from_integer(self.scale.clone())
            - BigRational::from_integer(self.offset.clone());
        g.is_integer().then(|| g.to_integer())
    }

    /// Smallest grid position whose value is `>= value`.
    pub fn ceil_position(&self, value: &BigRational) -> BigInt {
        (value * BigRational::from_integer(self.scale.clone())
            - BigRational::from_integer(self.offset.clone()))
        .ceil()
        .to_integer()
    }

    /// Largest grid position whose value is `<= value`.
    pub fn floor_position(&self, value: &BigRational) -> BigInt {
        (value * BigRational::from_integer(self.scale.clone())
            - BigRational::from_integer(self.offset.clone()))
        .floor()
        .to_integer()
    }

    /// A length in value units expressed in grid units (offset does not apply).
    pub fn length_units(&self, length: &BigRational) -> BigRational {
        length * BigRational::from_integer(self.scale.clone())
    }
}

/// A rational vector placed on its minimal integer grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridEmbedding {
    pub grid: Grid,
    pub values: Vec<i64>,
}

impl GridEmbedding {
    pub fn scale(&self) -> &BigInt {
        &self.grid.scale
    }

    pub fn offset(&self) -> &BigInt {
        &self.grid.offset
    }

    pub fn reconstruct(&self) -> RationalVector {
        RationalVector {
            coords: self.values.iter().map(|&x| self.grid.value(x)).collect(),
        }
    }
}

/// Clear denominators with their least common multiple.
pub fn embed(v: &RationalVector) -> Result<GridEmbedding> {
    let scale = v
        .coords
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let values = v
        .coords
        .iter()
        .map(|c| {
            (c.numer() * (&scale / c.denom()))
                .to_i64()
                .ok_or(Error::GridOverflow)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GridEmbedding { grid: Grid::with_scale(scale), values })
}

/// Closed interval `[lo, hi]` of exact values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: BigRational,
    hi: BigRational,
}

impl Interval {
    pub fn new(lo: BigRational, hi: BigRational) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidInterval(format!(
                "{}:{}",
                format_rational(&lo),
                format_rational(&hi)
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn point(x: BigRational) -> Self {
        Self { lo: x.clone(), hi: x }
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn length(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }
}

impl FromStr for Interval {
    type Err = Error;

    /// `lo:hi`.
    fn from_str(s: &str) -> Result<Self> {
        let (lo, hi) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidInterval(s.to_string()))?;
        Self::new(parse_rational(lo)?, parse_rational(hi)?)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", format_rational(&self.lo), format_rational(&self.hi))
    }
}

/// An interval already expressed in grid units of a particular grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridInterval {
    pub grid: Grid,
    pub lo: i64,
    pub hi: i64,
}

/// Exact finite distribution on an integer grid with big-integer counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteDistribution {
    support: Vec<i64>,
    counts: Vec<BigUint>,
    total: BigUint,
    grid: Grid,
}

impl DiscreteDistribution {
    /// Build from `(grid position, count)` pairs; duplicates merge and zero counts drop.
    pub fn from_counts(grid: Grid, pairs: impl IntoIterator<Item = (i64, BigUint)>) -> Result<Self> {
        let mut merged: BTreeMap<i64, BigUint> = BTreeMap::new();
        for (x, c) in pairs {
            if !c.is_zero() {
                *merged.entry(x).or_default() += c;
            }
        }
        if merged.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        let total = merged.values().sum();
        let (support, counts) = merged.into_iter().unzip();
        Ok(Self { support, counts, total, grid })
    }

    pub fn point_mass_at(grid: Grid, x: i64) -> Self {
        Self { support: vec![x], counts: vec![BigUint::one()], total: BigUint::one(), grid }
    }

    pub fn support(&self) -> &[i64] {
        &self.support
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    pub fn total(&self) -> &BigUint {
        &self.total
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Exact values with their probabilities, in increasing order.
    pub fn iter_values(&self) -> impl Iterator<Item = (BigRational, BigRational)> + '_ {
        self.support
            .iter()
            .zip(&self.counts)
            .map(|(&x, c)| (self.grid.value(x), self.ratio(c)))
    }

    pub fn value(&self, index: usize) -> BigRational {
        self.grid.value(self.support[index])
    }

    pub fn probability(&self, index: usize) -> BigRational {
        self.ratio(&self.counts[index])
    }

    fn ratio(&self, count: &BigUint) -> BigRational {
        BigRational::new(BigInt::from(count.clone()), BigInt::from(self.total.clone()))
    }

    /// Support width in grid units.
    pub fn diameter_units(&self) -> i64 {
        self.support[self.support.len() - 1] - self.support[0]
    }

    /// `P(S = x)`; zero when `x` is off the grid or off the support.
    pub fn point_mass(&self, x: &BigRational) -> BigRational {
        match self.grid.position(x).and_then(|g| g.to_i64()) {
            Some(g) => match self.support.binary_search(&g) {
                Ok(i) => self.probability(i),
                Err(_) => BigRational::zero(),
            },
            None => BigRational::zero(),
        }
    }

    /// Largest point mass and the smallest value attaining it.
    pub fn max_point_mass(&self) -> (BigRational, BigRational) {
        let mut best = 0;
        for i in 1..self.counts.len() {
            if self.counts[i] > self.counts[best] {
                best = i;
            }
        }
        (self.probability(best), self.value(best))
    }

    pub fn max_count(&self) -> &BigUint {
        self.counts.iter().max().expect("support is nonempty")
    }

    /// Sum of counts over support points in `[lo, hi]` (grid units).
    pub fn count_in_units(&self, lo: i64, hi: i64) -> BigUint {
        if lo > hi {
            return BigUint::zero();
        }
        let start = self.support.partition_point(|&x| x < lo);
        let end = self.support.partition_point(|&x| x <= hi);
        self.counts[start..end].iter().sum()
    }

    /// `P(S ∈ I)` for a closed interval of exact values.
    pub fn prob_mass(&self, interval: &Interval) -> BigRational {
        let lo = self.grid.ceil_position(interval.lo());
        let hi = self.grid.floor_position(interval.hi());
        let lo = clamp_i64(&lo);
        let hi = clamp_i64(&hi);
        self.ratio(&self.count_in_units(lo, hi))
    }

    /// `P(S ∈ I)` for an interval given in grid units; the grids must agree.
    pub fn prob_mass_units(&self, interval: &GridInterval) -> Result<BigRational> {
        if interval.grid != self.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self.ratio(&self.count_in_units(interval.lo, interval.hi)))
    }

    /// Concentration function: the largest mass of any closed interval of length `t`.
    ///
    /// Any optimal interval can be slid right until its left end meets a support
    /// point without losing mass, so it suffices to scan windows
    /// `[s, s + t]` anchored at support points `s`.
    pub fn concentration_function(&self, t: &BigRational) -> Result<BigRational> {
        let (count, _) = self.concentration_window(t)?;
        Ok(self.ratio(&count))
    }

    /// Concentration function together with the left end (grid units) of a best window.
    pub fn concentration_window(&self, t: &BigRational) -> Result<(BigUint, i64)> {
        if t.is_negative() {
            return Err(Error::NegativeLength);
        }
        let width = self.grid.length_units(t).floor().to_integer();
        if width >= BigInt::from(self.diameter_units()) {
            return Ok((self.total.clone(), self.support[0]));
        }
        let width = width.to_i64().expect("width below diameter fits i64");
        let mut best = BigUint::zero();
        let mut best_lo = self.support[0];
        let mut window = BigUint::zero();
        let mut right = 0;
        for left in 0..self.support.len() {
            while right < self.support.len() && self.support[right] - self.support[left] <= width {
                window += &self.counts[right];
                right += 1;
            }
            if window > best {
                best = window.clone();
                best_lo = self.support[left];
            }
            window -= &self.counts[left];
        }
        Ok((best, best_lo))
    }
}

fn clamp_i64(x: &BigInt) -> i64 {
    x.to_i64().unwrap_or(if x.is_negative() { i64::MIN } else { i64::MAX })
}
