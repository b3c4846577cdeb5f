//! Exact distribution engines.
//!
//! * [`perm_sum_distribution`]: law of `w_π · v` for uniform `π ∈ S_n`.
//! * [`subset_sum_with_replacement`] / [`subset_sum_without_replacement`]:
//!   sums of `k` uniform draws from a set of distinct values.
//! * [`rademacher_sum_distribution`]: the classical `Σ ξ_i v_i` baseline.
//!
//! All counts are exact; totals are `n!`, `n^k`, `C(n, k)` and `2^n` respectively.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::numerics::{embed, DiscreteDistribution, Grid, RationalVector};

pub const DEFAULT_PERM_CAP: usize = 12;

/// How the `k` summands are drawn from the value set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum SumMode {
    #[serde(rename = "with")]
    WithReplacement,
    #[serde(rename = "without")]
    WithoutReplacement,
}

impl std::fmt::Display for SumMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SumMode::WithReplacement => "with",
            SumMode::WithoutReplacement => "without",
        })
    }
}

impl std::str::FromStr for SumMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "with" => Ok(SumMode::WithReplacement),
            "without" => Ok(SumMode::WithoutReplacement),
            other => Err(Error::Config(format!("unknown sampling mode `{other}`"))),
        }
    }
}

/// Exact law of a `k`-element sum in the given mode.
pub fn subset_sum_distribution(a: &RationalVector, k: usize, mode: SumMode) -> Result<DiscreteDistribution> {
    match mode {
        SumMode::WithReplacement => subset_sum_with_replacement(a, k),
        SumMode::WithoutReplacement => subset_sum_without_replacement(a, k),
    }
}

/// Counts of arrangements are held in `u128` during enumeration; `34!` is the
/// largest factorial that fits.
pub const MAX_PERM_N: usize = 34;

/// Dense count tables are used while the value span stays below this many cells.
const DENSE_SPAN_LIMIT: i64 = 1 << 22;

fn check_lengths(w: &RationalVector, v: &RationalVector) -> Result<usize> {
    if w.len() != v.len() {
        return Err(Error::LengthMismatch { w: w.len(), v: v.len() });
    }
    Ok(w.len())
}

/// Distinct values of a multiset with their multiplicities, plus a mixed-radix
/// encoding of "how many of each value are used".
struct MultisetLayout {
    values: Vec<i64>,
    mult: Vec<usize>,
    radix: Vec<usize>,
}

impl MultisetLayout {
    fn new(grid_values: &[i64]) -> Self {
        let mut sorted = grid_values.to_vec();
        sorted.sort_unstable();
        let mut values = Vec::new();
        let mut mult: Vec<usize> = Vec::new();
        for x in sorted {
            if values.last() == Some(&x) {
                *mult.last_mut().unwrap() += 1;
            } else {
                values.push(x);
                mult.push(1);
            }
        }
        let mut radix = Vec::with_capacity(mult.len());
        let mut r = 1;
        for &m in &mult {
            radix.push(r);
            r *= m + 1;
        }
        Self { values, mult, radix }
    }

    fn full_state(&self) -> usize {
        self.mult.iter().zip(&self.radix).map(|(m, r)| m * r).sum()
    }

    fn used(&self, state: usize, j: usize) -> usize {
        (state / self.radix[j]) % (self.mult[j] + 1)
    }

    /// `n! / Π m_j!` as a float, for choosing the cheaper side.
    fn log_arrangements(&self) -> f64 {
        let lf = |k: usize| (1..=k).map(|i| (i as f64).ln()).sum::<f64>();
        lf(self.mult.iter().sum()) - self.mult.iter().map(|&m| lf(m)).sum::<f64>()
    }

    /// `Π m_j!`: the number of permutations behind each distinct arrangement.
    fn symmetry_weight(&self) -> u128 {
        self.mult
            .iter()
            .map(|&m| (1..=m as u128).product::<u128>())
            .product()
    }
}

type SumCounts = FxHashMap<i64, u128>;

/// Distributions of partial sums `Σ_p positions[p] · value(assigned p)` over all
/// distinct assignments of multiset values to `positions`, keyed by the used-state.
fn assignment_layer(layout: &MultisetLayout, positions: &[i64]) -> FxHashMap<usize, SumCounts> {
    let mut layer: FxHashMap<usize, SumCounts> = FxHashMap::default();
    layer.entry(0).or_default().insert(0, 1);
    for &p in positions {
        let mut next: FxHashMap<usize, SumCounts> = FxHashMap::default();
        for (&state, sums) in &layer {
            for j in 0..layout.values.len() {
                if layout.used(state, j) == layout.mult[j] {
                    continue;
                }
                let delta = layout.values[j] * p;
                let target = next.entry(state + layout.radix[j]).or_default();
                for (&s, &c) in sums {
                    *target.entry(s + delta).or_insert(0) += c;
                }
            }
        }
        layer = next;
    }
    layer
}

/// Exact law of `w_π · v` over uniform `π ∈ S_n`, total `n!`.
///
/// Enumerates distinct assignments of one vector's multiset of values to the
/// other's positions, each weighted by the product of multiplicity factorials.
/// The positions are split in half; both halves are enumerated independently
/// and joined on complementary used-states.
pub fn perm_sum_distribution(
    w: &RationalVector,
    v: &RationalVector,
    cap: usize,
) -> Result<DiscreteDistribution> {
    let n = check_lengths(w, v)?;
    if n > cap.min(MAX_PERM_N) {
        return Err(Error::CapExceeded { n, cap: cap.min(MAX_PERM_N) });
    }
    let ew = embed(w)?;
    let ev = embed(v)?;
    let grid = Grid::with_scale(ew.scale() * ev.scale());

    // The law is symmetric in (w, v); enumerate over the side with fewer arrangements.
    let lw = MultisetLayout::new(&ew.values);
    let lv = MultisetLayout::new(&ev.values);
    let (layout, positions) = if lv.log_arrangements() < lw.log_arrangements() {
        (lv, &ew.values)
    } else {
        (lw, &ev.values)
    };

    let max_abs_value = layout.values.iter().map(|x| (*x as i128).abs()).max().unwrap_or(0);
    let bound: i128 = positions.iter().map(|&p| (p as i128).abs() * max_abs_value).sum();
    if bound > i64::MAX as i128 / 2 {
        return Err(Error::GridOverflow);
    }

    let half = n / 2;
    let front = assignment_layer(&layout, &positions[..half]);
    let back = assignment_layer(&layout, &positions[half..]);
    let full = layout.full_state();

    let front: Vec<(usize, SumCounts)> = front.into_iter().collect();
    let joined = front
        .par_iter()
        .fold(SumCounts::default, |mut acc, (state, f)| {
            if let Some(g) = back.get(&(full - state)) {
                for (&a, &ca) in f {
                    for (&b, &cb) in g {
                        *acc.entry(a + b).or_insert(0) += ca * cb;
                    }
                }
            }
            acc
        })
        .reduce(SumCounts::default, merge_counts);

    let weight = BigUint::from(layout.symmetry_weight());
    DiscreteDistribution::from_counts(
        grid,
        joined.into_iter().map(|(x, c)| (x, BigUint::from(c) * &weight)),
    )
}

fn merge_counts(mut a: SumCounts, b: SumCounts) -> SumCounts {
    if a.len() < b.len() {
        return merge_counts(b, a);
    }
    for (x, c) in b {
        *a.entry(x).or_insert(0) += c;
    }
    a
}

/// `P(w_π · v = x)`.
pub fn point_mass(
    w: &RationalVector,
    v: &RationalVector,
    x: &num_rational::BigRational,
    cap: usize,
) -> Result<num_rational::BigRational> {
    Ok(perm_sum_distribution(w, v, cap)?.point_mass(x))
}

/// Largest point mass of `w_π · v` and the smallest value attaining it.
pub fn max_point_mass(
    w: &RationalVector,
    v: &RationalVector,
    cap: usize,
) -> Result<(num_rational::BigRational, num_rational::BigRational)> {
    Ok(perm_sum_distribution(w, v, cap)?.max_point_mass())
}

/// Counts indexed by integer value, dense while the span is small.
#[derive(Clone)]
enum CountTable {
    Dense { base: i64, cells: Vec<BigUint> },
    Sparse(FxHashMap<i64, BigUint>),
}

impl CountTable {
    fn unit() -> Self {
        CountTable::Dense { base: 0, cells: vec![BigUint::one()] }
    }

    fn bounds(&self) -> (i64, i64) {
        match self {
            CountTable::Dense { base, cells } => (*base, base + cells.len() as i64 - 1),
            CountTable::Sparse(m) => (
                *m.keys().min().expect("nonempty"),
                *m.keys().max().expect("nonempty"),
            ),
        }
    }

    /// One convolution step: every current sum moves by each of `moves` (with multiplicity).
    fn step(&self, moves: &[i64]) -> Self {
        let (lo, hi) = self.bounds();
        let mlo = *moves.iter().min().expect("moves nonempty");
        let mhi = *moves.iter().max().expect("moves nonempty");
        let (nlo, nhi) = (lo + mlo, hi + mhi);
        if nhi - nlo < DENSE_SPAN_LIMIT {
            let mut cells = vec![BigUint::zero(); (nhi - nlo + 1) as usize];
            self.for_each(|x, c| {
                for &m in moves {
                    cells[(x + m - nlo) as usize] += c;
                }
            });
            CountTable::Dense { base: nlo, cells }
        } else {
            let mut out: FxHashMap<i64, BigUint> = FxHashMap::default();
            self.for_each(|x, c| {
                for &m in moves {
                    *out.entry(x + m).or_default() += c;
                }
            });
            CountTable::Sparse(out)
        }
    }

    fn for_each(&self, mut f: impl FnMut(i64, &BigUint)) {
        match self {
            CountTable::Dense { base, cells } => {
                for (i, c) in cells.iter().enumerate() {
                    if !c.is_zero() {
                        f(base + i as i64, c);
                    }
                }
            }
            CountTable::Sparse(m) => {
                for (&x, c) in m {
                    f(x, c);
                }
            }
        }
    }

    fn into_distribution(self, grid: Grid) -> Result<DiscreteDistribution> {
        let mut pairs = Vec::new();
        self.for_each(|x, c| pairs.push((x, c.clone())));
        DiscreteDistribution::from_counts(grid, pairs)
    }
}

fn distinct_embedding(a: &RationalVector) -> Result<crate::numerics::GridEmbedding> {
    if !a.all_distinct() {
        return Err(Error::RepeatedCoordinates);
    }
    let e = embed(a)?;
    let span = e.values.iter().map(|x| (*x as i128).abs()).max().unwrap_or(0);
    if span * (a.len() as i128) * (a.len() as i128 + 1) > i64::MAX as i128 / 4 {
        return Err(Error::GridOverflow);
    }
    Ok(e)
}

/// Law of the sum of `k` i.i.d. uniform draws from the distinct values `a`; total `n^k`.
pub fn subset_sum_with_replacement(a: &RationalVector, k: usize) -> Result<DiscreteDistribution> {
    if k == 0 {
        return Err(Error::KOutOfRange { k, n: a.len() });
    }
    Ok(subset_sum_with_replacement_profile(a, k)?
        .pop()
        .expect("profile has k entries"))
}

/// Laws for every `k = 1..=k_max`, computed by successive convolution.
pub fn subset_sum_with_replacement_profile(
    a: &RationalVector,
    k_max: usize,
) -> Result<Vec<DiscreteDistribution>> {
    let e = distinct_embedding(a)?;
    let span = e.values.iter().max().unwrap() - e.values.iter().min().unwrap();
    if (span as i128) * (k_max as i128) > i64::MAX as i128 / 4 {
        return Err(Error::GridOverflow);
    }
    let mut table = CountTable::unit();
    let mut out = Vec::with_capacity(k_max);
    for _ in 0..k_max {
        table = table.step(&e.values);
        out.push(table.clone().into_distribution(e.grid.clone())?);
    }
    Ok(out)
}

/// Law of the sum of a uniform `k`-subset of the distinct values `a`; total `C(n, k)`.
pub fn subset_sum_without_replacement(a: &RationalVector, k: usize) -> Result<DiscreteDistribution> {
    if k > a.len() {
        return Err(Error::KOutOfRange { k, n: a.len() });
    }
    Ok(subset_sum_without_replacement_profile_upto(a, k)?
        .pop()
        .expect("profile has k + 1 entries"))
}

/// Laws for every `k = 0..=n`.
pub fn subset_sum_without_replacement_profile(a: &RationalVector) -> Result<Vec<DiscreteDistribution>> {
    subset_sum_without_replacement_profile_upto(a, a.len())
}

/// DP over elements tracking (cardinality, sum). Values are shifted to start at 0
/// so row `c` spans `[0, c · (max − min)]`.
fn subset_sum_without_replacement_profile_upto(
    a: &RationalVector,
    k_max: usize,
) -> Result<Vec<DiscreteDistribution>> {
    let e = distinct_embedding(a)?;
    let min = *e.values.iter().min().unwrap();
    let shifted: Vec<i64> = e.values.iter().map(|x| x - min).collect();
    let span = *shifted.iter().max().unwrap();

    let dense = (span as i128) * (k_max as i128) < DENSE_SPAN_LIMIT as i128;
    let mut out = Vec::with_capacity(k_max + 1);
    if dense {
        let mut rows: Vec<Vec<BigUint>> = (0..=k_max)
            .map(|c| vec![BigUint::zero(); c * span as usize + 1])
            .collect();
        rows[0][0] = BigUint::one();
        for (i, &x) in shifted.iter().enumerate() {
            let x = x as usize;
            for c in (1..=k_max.min(i + 1)).rev() {
                let (lower, upper) = rows.split_at_mut(c);
                let prev = &lower[c - 1];
                let row = &mut upper[0];
                for (s, cnt) in prev.iter().enumerate() {
                    if !cnt.is_zero() {
                        row[s + x] += cnt;
                    }
                }
            }
        }
        for (c, row) in rows.into_iter().enumerate() {
            let shift = c as i64 * min;
            out.push(DiscreteDistribution::from_counts(
                e.grid.clone(),
                row.into_iter()
                    .enumerate()
                    .map(|(s, cnt)| (s as i64 + shift, cnt)),
            )?);
        }
    } else {
        let mut rows: Vec<FxHashMap<i64, BigUint>> = vec![FxHashMap::default(); k_max + 1];
        rows[0].insert(0, BigUint::one());
        for (i, &x) in shifted.iter().enumerate() {
            for c in (1..=k_max.min(i + 1)).rev() {
                let moved: Vec<(i64, BigUint)> =
                    rows[c - 1].iter().map(|(&s, cnt)| (s + x, cnt.clone())).collect();
                for (s, cnt) in moved {
                    *rows[c].entry(s).or_default() += cnt;
                }
            }
        }
        for (c, row) in rows.into_iter().enumerate() {
            let shift = c as i64 * min;
            out.push(DiscreteDistribution::from_counts(
                e.grid.clone(),
                row.into_iter().map(|(s, cnt)| (s + shift, cnt)),
            )?);
        }
    }
    Ok(out)
}

/// Law of `Σ ξ_i v_i` with independent uniform signs `ξ_i ∈ {−1, +1}`; total `2^n`.
pub fn rademacher_sum_distribution(v: &RationalVector) -> Result<DiscreteDistribution> {
    let e = embed(v)?;
    let span: i128 = e.values.iter().map(|x| (*x as i128).abs()).sum();
    if span > i64::MAX as i128 / 4 {
        return Err(Error::GridOverflow);
    }
    let mut table = CountTable::unit();
    for &x in &e.values {
        table = table.step(&[-x, x]);
    }
    table.into_distribution(e.grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::parse_rational;
    use itertools::Itertools;
    use num_rational::BigRational;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    fn vec_of(s: &str) -> RationalVector {
        s.parse().unwrap()
    }

    fn law(d: &DiscreteDistribution) -> Vec<(BigRational, BigRational)> {
        d.iter_values().collect()
    }

    fn pairs(items: &[(&str, &str)]) -> Vec<(BigRational, BigRational)> {
        items.iter().map(|(x, p)| (q(x), q(p))).collect()
    }

    /// All n! permutations, no deduplication, exact rational sums.
    fn naive_perm_law(w: &RationalVector, v: &RationalVector) -> BTreeMap<BigRational, u64> {
        let n = w.len();
        let mut out = BTreeMap::new();
        for perm in (0..n).permutations(n) {
            let s: BigRational = (0..n).map(|i| w.get(i) * v.get(perm[i])).sum();
            *out.entry(s).or_insert(0) += 1;
        }
        out
    }

    fn as_count_map(d: &DiscreteDistribution) -> BTreeMap<BigRational, u64> {
        (0..d.len())
            .map(|i| (d.value(i), u64::try_from(&d.counts()[i]).unwrap()))
            .collect()
    }

    #[test]
    fn perm_sum_examples() {
        let d = perm_sum_distribution(&vec_of("1,1"), &vec_of("3,5"), 12).unwrap();
        assert_eq!(law(&d), pairs(&[("8", "1")]));

        let d = perm_sum_distribution(&vec_of("1,-1,0"), &vec_of("1,2,3"), 12).unwrap();
        assert_eq!(
            law(&d),
            pairs(&[("-2", "1/6"), ("-1", "1/3"), ("1", "1/3"), ("2", "1/6")])
        );
        assert_eq!(d.total(), &BigUint::from(6u32));
    }

    #[test]
    fn tight_instance_has_mass_one_over_n() {
        for n in 2..=8usize {
            let mut w = vec![0i64; n];
            w[0] = 1;
            w[1] = -1;
            let (mass, _) = max_point_mass(
                &RationalVector::from_integers(&w).unwrap(),
                &RationalVector::arithmetic(n).unwrap(),
                12,
            )
            .unwrap();
            assert_eq!(mass, BigRational::new(1.into(), (n as i64).into()), "n = {n}");
        }
    }

    #[test]
    fn point_mass_examples() {
        assert_eq!(point_mass(&vec_of("1,-1,0"), &vec_of("1,2,3"), &q("1"), 12).unwrap(), q("1/3"));
        assert_eq!(point_mass(&vec_of("1,1"), &vec_of("3,5"), &q("9"), 12).unwrap(), q("0"));
        assert_eq!(point_mass(&vec_of("1,2"), &vec_of("0,1"), &q("1"), 12).unwrap(), q("1/2"));
        assert_eq!(point_mass(&vec_of("1,2"), &vec_of("0,1"), &q("1/2"), 12).unwrap(), q("0"));
    }

    #[test]
    fn max_point_mass_examples() {
        assert_eq!(
            max_point_mass(&vec_of("1,-1,0"), &vec_of("1,2,3"), 12).unwrap(),
            (q("1/3"), q("-1"))
        );
        assert_eq!(
            max_point_mass(&vec_of("2,2,2"), &vec_of("1,2,5"), 12).unwrap(),
            (q("1"), q("16"))
        );
        let (m, _) = max_point_mass(&vec_of("1,-1,0,0"), &vec_of("1,2,3,4"), 12).unwrap();
        assert!(m <= q("1/3"));
    }

    #[test]
    fn perm_sum_errors() {
        assert!(matches!(
            perm_sum_distribution(&vec_of("1,-1"), &vec_of("1"), 12),
            Err(Error::LengthMismatch { w: 2, v: 1 })
        ));
        let w = RationalVector::arithmetic(13).unwrap();
        assert!(matches!(
            perm_sum_distribution(&w, &w, 12),
            Err(Error::CapExceeded { n: 13, cap: 12 })
        ));
    }

    #[test]
    fn perm_sum_with_rationals_matches_oracle() {
        let w = vec_of("1/2,-1/3,0,1/2,2");
        let v = vec_of("1,5/4,-2,7,1/6");
        let d = perm_sum_distribution(&w, &v, 12).unwrap();
        assert_eq!(as_count_map(&d), naive_perm_law(&w, &v));
    }

    #[test]
    fn single_coordinate_is_a_point_mass() {
        let d = perm_sum_distribution(&vec_of("3"), &vec_of("-2/3"), 12).unwrap();
        assert_eq!(law(&d), pairs(&[("-2", "1")]));
    }

    #[test]
    fn subset_sum_with_replacement_examples() {
        let d = subset_sum_with_replacement(&vec_of("0,1"), 2).unwrap();
        assert_eq!(law(&d), pairs(&[("0", "1/4"), ("1", "1/2"), ("2", "1/4")]));

        let d = subset_sum_with_replacement(&vec_of("5/2"), 3).unwrap();
        assert_eq!(law(&d), pairs(&[("15/2", "1")]));

        let d = subset_sum_with_replacement(&vec_of("1,2,3"), 2).unwrap();
        assert_eq!(
            law(&d),
            pairs(&[("2", "1/9"), ("3", "2/9"), ("4", "3/9"), ("5", "2/9"), ("6", "1/9")])
        );
    }

    #[test]
    fn subset_sum_preconditions() {
        assert!(matches!(
            subset_sum_with_replacement(&vec_of("1,1,2"), 2),
            Err(Error::RepeatedCoordinates)
        ));
        assert!(matches!(
            subset_sum_with_replacement(&vec_of("1,2"), 0),
            Err(Error::KOutOfRange { .. })
        ));
        assert!(matches!(
            subset_sum_without_replacement(&vec_of("1,2"), 3),
            Err(Error::KOutOfRange { .. })
        ));
        assert!(matches!(
            subset_sum_without_replacement(&vec_of("2,2"), 1),
            Err(Error::RepeatedCoordinates)
        ));
    }

    #[test]
    fn subset_sum_without_replacement_examples() {
        let a = vec_of("1,2,3");
        let d = subset_sum_without_replacement(&a, 2).unwrap();
        assert_eq!(law(&d), pairs(&[("3", "1/3"), ("4", "1/3"), ("5", "1/3")]));

        let d = subset_sum_without_replacement(&a, 0).unwrap();
        assert_eq!(law(&d), pairs(&[("0", "1")]));

        let d = subset_sum_without_replacement(&a, 3).unwrap();
        assert_eq!(law(&d), pairs(&[("6", "1")]));
    }

    #[test]
    fn rademacher_examples() {
        let d = rademacher_sum_distribution(&vec_of("1")).unwrap();
        assert_eq!(law(&d), pairs(&[("-1", "1/2"), ("1", "1/2")]));

        let d = rademacher_sum_distribution(&vec_of("1,1")).unwrap();
        assert_eq!(law(&d), pairs(&[("-2", "1/4"), ("0", "1/2"), ("2", "1/4")]));

        let d = rademacher_sum_distribution(&vec_of("1,1,1,1")).unwrap();
        assert_eq!(d.concentration_function(&q("0")).unwrap(), q("3/8"));
        assert_eq!(d.total(), &BigUint::from(16u32));
    }

    #[test]
    fn sparse_tables_agree_with_dense() {
        // a span above the dense limit forces the sparse path
        let a = vec_of("0,1,5000000");
        let d = subset_sum_with_replacement(&a, 2).unwrap();
        let mut direct: BTreeMap<BigRational, u64> = BTreeMap::new();
        for x in a.coords() {
            for y in a.coords() {
                *direct.entry(x + y).or_insert(0) += 1;
            }
        }
        assert_eq!(as_count_map(&d), direct);

        let d = subset_sum_without_replacement(&a, 2).unwrap();
        assert_eq!(law(&d), pairs(&[("1", "1/3"), ("5000000", "1/3"), ("5000001", "1/3")]));
    }

    fn arb_vector(max_n: usize) -> impl Strategy<Value = RationalVector> {
        prop::collection::vec((-4i64..5, prop::sample::select(vec![1i64, 1, 1, 2, 3])), 1..=max_n)
            .prop_map(|p| {
                RationalVector::new(
                    p.into_iter().map(|(a, b)| BigRational::new(a.into(), b.into())).collect(),
                )
                .unwrap()
            })
    }

    fn arb_pair(max_n: usize) -> impl Strategy<Value = (RationalVector, RationalVector)> {
        (1..=max_n).prop_flat_map(|n| {
            let coords = prop::collection::vec(-4i64..5, n);
            (coords.clone(), coords).prop_map(|(a, b)| {
                (RationalVector::from_integers(&a).unwrap(), RationalVector::from_integers(&b).unwrap())
            })
        })
    }

    fn distinct_set(max_n: usize) -> impl Strategy<Value = RationalVector> {
        prop::collection::btree_set(-12i64..12, 1..=max_n).prop_map(|s| {
            RationalVector::from_integers(&s.into_iter().collect::<Vec<_>>()).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn perm_sum_matches_naive_oracle((w, v) in arb_pair(6)) {
            let d = perm_sum_distribution(&w, &v, 12).unwrap();
            prop_assert_eq!(as_count_map(&d), naive_perm_law(&w, &v));
        }

        #[test]
        fn exchange_and_permutation_symmetry((w, v) in arb_pair(6), rot in 0usize..6) {
            let d = perm_sum_distribution(&w, &v, 12).unwrap();
            let swapped = perm_sum_distribution(&v, &w, 12).unwrap();
            prop_assert_eq!(law(&d), law(&swapped));
            let mut c = w.coords().to_vec();
            let r = rot % c.len();
            c.rotate_left(r);
            let rotated = perm_sum_distribution(&RationalVector::new(c).unwrap(), &v, 12).unwrap();
            prop_assert_eq!(law(&d), law(&rotated));
        }

        #[test]
        fn translation_and_scaling_covariance(
            (w, v) in arb_pair(5), shift in -3i64..4, lambda in prop::sample::select(vec![-2i64, -1, 2, 3])
        ) {
            let d = perm_sum_distribution(&w, &v, 12).unwrap();
            let c = BigRational::from_integer(shift.into());
            let shifted = perm_sum_distribution(&w.map(|x| x + &c), &v, 12).unwrap();
            let offset = &c * v.sum();
            let expect: Vec<_> = law(&d).into_iter().map(|(x, p)| (x + &offset, p)).collect();
            prop_assert_eq!(law(&shifted), expect);

            let l = BigRational::from_integer(lambda.into());
            let scaled = perm_sum_distribution(&w.map(|x| x * &l), &v, 12).unwrap();
            let mut expect: Vec<_> = law(&d).into_iter().map(|(x, p)| (x * &l, p)).collect();
            expect.sort();
            prop_assert_eq!(law(&scaled), expect);

            let shifted_v = perm_sum_distribution(&w, &v.map(|x| x + &c), 12).unwrap();
            prop_assert_eq!(shifted_v.max_point_mass().0, d.max_point_mass().0);
        }

        #[test]
        fn rational_inputs_match_oracle(w in arb_vector(5)) {
            let v = RationalVector::arithmetic(w.len()).unwrap();
            let d = perm_sum_distribution(&w, &v, 12).unwrap();
            prop_assert_eq!(as_count_map(&d), naive_perm_law(&w, &v));
        }

        #[test]
        fn subset_engines_match_enumeration(a in distinct_set(6), k in 1usize..=3) {
            let n = a.len();
            let mut ordered: BTreeMap<BigRational, u64> = BTreeMap::new();
            for tuple in (0..k).map(|_| 0..n).multi_cartesian_product() {
                let s: BigRational = tuple.iter().map(|&i| a.get(i).clone()).sum();
                *ordered.entry(s).or_insert(0) += 1;
            }
            prop_assert_eq!(as_count_map(&subset_sum_with_replacement(&a, k).unwrap()), ordered);

            if k <= n {
                let mut subsets: BTreeMap<BigRational, u64> = BTreeMap::new();
                for c in (0..n).combinations(k) {
                    let s: BigRational = c.iter().map(|&i| a.get(i).clone()).sum();
                    *subsets.entry(s).or_insert(0) += 1;
                }
                prop_assert_eq!(as_count_map(&subset_sum_without_replacement(&a, k).unwrap()), subsets);
            }
        }

        #[test]
        fn complement_map_relates_k_and_n_minus_k(a in distinct_set(8), k in 0usize..9) {
            let n = a.len();
            let k = k % (n + 1);
            let total = a.sum();
            let d = subset_sum_without_replacement(&a, k).unwrap();
            let comp = subset_sum_without_replacement(&a, n - k).unwrap();
            let mut mapped: Vec<_> = law(&comp).into_iter().map(|(x, p)| (&total - x, p)).collect();
            mapped.sort();
            prop_assert_eq!(law(&d), mapped);
        }
    }
}
