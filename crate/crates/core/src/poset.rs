//! The dominance order on `k`-subsets and the chain argument behind the main bound.
//!
//! Orientation: `U ⪯ V` iff the sorted lists satisfy `U_i ≤ V_i` for every `i`,
//! equivalently `|U ∩ (−∞, x]| ≥ |V ∩ (−∞, x]|` for every `x`. Moving an element
//! of `U` upward climbs the order.
//!
//! In the permutation construction the tracked subset is the set of `v`
//! positions taken by the upper block `B = {i : w_i ≥ t2}`. Under this
//! orientation every upward step raises `S` by at least `Δ(v)(t2 − t1)`.
//! Tracking the lower block instead gives the complementary poset, which is
//! isomorphic.

use itertools::Itertools;
use num_bigint::BigUint;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::bounds::delta;
use crate::engines::subset_sum_without_replacement;
use crate::error::{Error, Result};
use crate::numerics::{Interval, RationalVector};
use crate::sampling::{sample_permutation, StreamRng};

/// Largest poset the matching oracle will build.
pub const DEFAULT_ORACLE_CAP: usize = 500;
/// Largest poset [`DominancePoset`] will enumerate.
pub const MAX_ENUMERATED: usize = 1 << 20;

/// Sorted-coordinatewise dominance. Inputs must be sorted and of equal size.
pub fn dominance_leq(u: &[usize], v: &[usize]) -> Result<bool> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch { w: u.len(), v: v.len() });
    }
    Ok(u.iter().zip(v).all(|(a, b)| a <= b))
}

/// Prefix-count form: `|U ∩ (−∞, x]| ≥ |V ∩ (−∞, x]|` for all `x`.
pub fn dominance_leq_by_prefix_counts(u: &[usize], v: &[usize]) -> Result<bool> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch { w: u.len(), v: v.len() });
    }
    let count = |s: &[usize], x: usize| s.iter().filter(|&&e| e <= x).count();
    Ok(u.iter().chain(v).all(|&x| count(u, x) >= count(v, x)))
}

fn strictly_below(u: &[usize], v: &[usize]) -> bool {
    u != v && u.iter().zip(v).all(|(a, b)| a <= b)
}

/// All `k`-subsets of `ground` (sorted), in lexicographic order.
pub fn k_subsets(ground: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut g = ground.to_vec();
    g.sort_unstable();
    g.into_iter().combinations(k).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominancePoset {
    ground: Vec<usize>,
    k: usize,
    elements: Vec<Vec<usize>>,
}

impl DominancePoset {
    /// `k`-subsets of `{1, …, n}`.
    pub fn new(n: usize, k: usize) -> Result<Self> {
        Self::over(&(1..=n).collect::<Vec<_>>(), k)
    }

    pub fn over(ground: &[usize], k: usize) -> Result<Self> {
        let n = ground.len();
        if k > n {
            return Err(Error::KOutOfRange { k, n });
        }
        let size = binomial(BigUint::from(n), BigUint::from(k));
        if size > BigUint::from(MAX_ENUMERATED) {
            return Err(Error::OracleCap {
                size: size.to_usize().unwrap_or(usize::MAX),
                cap: MAX_ENUMERATED,
            });
        }
        let mut g = ground.to_vec();
        g.sort_unstable();
        g.dedup();
        if g.len() != n {
            return Err(Error::RepeatedCoordinates);
        }
        Ok(Self { elements: k_subsets(&g, k), ground: g, k })
    }

    pub fn ground(&self) -> &[usize] {
        &self.ground
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn elements(&self) -> &[Vec<usize>] {
        &self.elements
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.elements[a].iter().zip(&self.elements[b]).all(|(x, y)| x <= y)
    }
}

/// Largest number of `k`-subsets of `{1, …, n}` sharing one sum, from the
/// without-replacement subset-sum engine.
pub fn stanley_width(n: usize, k: usize) -> Result<BigUint> {
    if k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    if k == 0 || k == n {
        return Ok(BigUint::one());
    }
    // Complements biject k-subsets with (n − k)-subsets and reflect sums, so
    // the smaller side gives the same level-set sizes.
    let a = RationalVector::arithmetic(n)?;
    Ok(subset_sum_without_replacement(&a, k.min(n - k))?.max_count().clone())
}

/// Coefficients of the Gaussian binomial `[n choose k]_q`, lowest degree first.
/// Independent of the subset-sum engine: `[n,k] = [n−1,k−1] + q^k [n−1,k]`.
pub fn gaussian_binomial_coefficients(n: usize, k: usize) -> Vec<BigUint> {
    if k > n {
        return vec![BigUint::zero()];
    }
    // row[j] holds [m choose j]_q for the current m
    let mut row: Vec<Vec<BigUint>> = vec![vec![BigUint::one()]];
    for m in 1..=n {
        let mut next = Vec::with_capacity(row.len() + 1);
        for j in 0..=m.min(k) {
            let degree = j * (m - j) + 1;
            let mut c = vec![BigUint::zero(); degree];
            if j >= 1 {
                for (d, x) in row[j - 1].iter().enumerate() {
                    c[d] += x;
                }
            }
            if j < m {
                for (d, x) in row[j].iter().enumerate() {
                    c[d + j] += x;
                }
            }
            next.push(c);
        }
        row = next;
    }
    row.swap_remove(k)
}

fn max_bipartite_matching(adj: &[Vec<usize>], right: usize) -> Vec<Option<usize>> {
    // Kuhn's augmenting paths; returns the left partner of each right vertex
    fn augment(u: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                if owner[v].is_none_or(|o| augment(o, adj, seen, owner)) {
                    owner[v] = Some(u);
                    return true;
                }
            }
        }
        false
    }
    let mut owner = vec![None; right];
    // Greedy pass first; on near-chains it leaves almost nothing to augment.
    let mut matched = vec![false; adj.len()];
    for (u, edges) in adj.iter().enumerate() {
        if let Some(&v) = edges.iter().find(|&&v| owner[v].is_none()) {
            owner[v] = Some(u);
            matched[u] = true;
        }
    }
    let mut seen = vec![false; right];
    for u in (0..adj.len()).filter(|&u| !matched[u]) {
        seen.iter_mut().for_each(|s| *s = false);
        augment(u, adj, &mut seen, &mut owner);
    }
    owner
}

/// Minimum chain cover of a family of sorted equal-size subsets under dominance,
/// from a maximum matching on the strict-order bipartite graph. Each chain is a
/// list of indices in increasing order.
pub fn min_chain_cover(elements: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let m = elements.len();
    let adj: Vec<Vec<usize>> = (0..m)
        .map(|a| (0..m).filter(|&b| strictly_below(&elements[a], &elements[b])).collect())
        .collect();
    let owner = max_bipartite_matching(&adj, m);
    let mut next = vec![None; m];
    let mut has_pred = vec![false; m];
    for (b, o) in owner.iter().enumerate() {
        if let Some(a) = *o {
            next[a] = Some(b);
            has_pred[b] = true;
        }
    }
    (0..m)
        .filter(|&s| !has_pred[s])
        .map(|s| {
            let mut chain = vec![s];
            while let Some(b) = next[*chain.last().expect("non-empty")] {
                chain.push(b);
            }
            chain
        })
        .collect()
}

/// Width of the dominance poset by Dilworth's theorem: size minus a maximum
/// matching. Built without reference to subset sums.
pub fn dilworth_width_oracle(n: usize, k: usize, cap: usize) -> Result<usize> {
    if k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    let size = binomial(BigUint::from(n), BigUint::from(k));
    if size > BigUint::from(cap) {
        return Err(Error::OracleCap { size: size.to_usize().unwrap_or(usize::MAX), cap });
    }
    Ok(min_chain_cover(DominancePoset::new(n, k)?.elements()).len())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WidthCertificate {
    pub n: usize,
    pub k: usize,
    pub stanley_width: BigUint,
    /// `None` when the poset exceeds the oracle cap.
    pub dilworth_width: Option<usize>,
    /// `None` when there was nothing to compare.
    pub agree: Option<bool>,
}

pub fn width_certificate(n: usize, k: usize, cap: usize) -> Result<WidthCertificate> {
    let stanley = stanley_width(n, k)?;
    let dilworth = match dilworth_width_oracle(n, k, cap) {
        Ok(w) => Some(w),
        Err(Error::OracleCap { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(WidthCertificate {
        n,
        k,
        agree: dilworth.map(|d| BigUint::from(d) == stanley),
        stanley_width: stanley,
        dilworth_width: dilworth,
    })
}

/// Outcomes of the first two steps of the conditional permutation construction.
///
/// `σ` maps `w`-indices to `v`-positions and `S(σ) = Σ w_i v_σ(i)`. Indices with
/// `t1 ≤ w_i < t2` have fixed positions; inside the lower block
/// `A = {i : w_i < t1}` and upper block `B = {i : w_i ≥ t2}` only the relative
/// order of positions is fixed. What remains is which positions of the free
/// set `X` go to `B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationContext {
    w: RationalVector,
    v: RationalVector,
    t1: BigRational,
    t2: BigRational,
    /// `(index, position)` for indices outside both blocks.
    fixed: Vec<(usize, usize)>,
    /// Lower-block indices in the order of their positions.
    lower_order: Vec<usize>,
    /// Upper-block indices in the order of their positions.
    upper_order: Vec<usize>,
    free: Vec<usize>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidContext(msg.into())
}

impl PermutationContext {
    /// `fixed_positions[j]` is the position of the `j`-th middle index (in index order).
    pub fn new(
        w: &RationalVector,
        v: &RationalVector,
        t1: BigRational,
        t2: BigRational,
        fixed_positions: &[usize],
        lower_order: Vec<usize>,
        upper_order: Vec<usize>,
    ) -> Result<Self> {
        let n = w.len();
        if v.len() != n {
            return Err(Error::LengthMismatch { w: n, v: v.len() });
        }
        if t1 >= t2 {
            return Err(invalid("t1 < t2 required"));
        }
        if !w.is_increasing() || !v.is_increasing() {
            return Err(invalid("w and v must be increasing"));
        }
        if !delta(v)?.is_positive() {
            return Err(invalid("Δ(v) > 0 required"));
        }
        let lower: Vec<usize> = (0..n).filter(|&i| w.get(i) < &t1).collect();
        let upper: Vec<usize> = (0..n).filter(|&i| w.get(i) >= &t2).collect();
        let middle: Vec<usize> = (0..n).filter(|&i| w.get(i) >= &t1 && w.get(i) < &t2).collect();
        if fixed_positions.len() != middle.len() {
            return Err(invalid(format!("{} fixed positions for {} middle indices", fixed_positions.len(), middle.len())));
        }
        let mut taken = vec![false; n];
        for &p in fixed_positions {
            if p >= n || std::mem::replace(&mut taken[p], true) {
                return Err(invalid("fixed positions must be distinct and in range"));
            }
        }
        let is_perm_of = |order: &[usize], set: &[usize]| order.iter().copied().sorted().eq(set.iter().copied());
        if !is_perm_of(&lower_order, &lower) || !is_perm_of(&upper_order, &upper) {
            return Err(invalid("block orders must list each block index once"));
        }
        Ok(Self {
            w: w.clone(),
            v: v.clone(),
            t1,
            t2,
            fixed: middle.into_iter().zip(fixed_positions.iter().copied()).collect(),
            lower_order,
            upper_order,
            free: (0..n).filter(|&p| !taken[p]).collect(),
        })
    }

    /// Context read off a uniform permutation, plus that permutation's upper-block positions.
    pub fn random(
        w: &RationalVector,
        v: &RationalVector,
        t1: BigRational,
        t2: BigRational,
        rng: &mut StreamRng,
    ) -> Result<(Self, Vec<usize>)> {
        let n = w.len();
        let sigma = sample_permutation(n, rng);
        let by_position = |pred: &dyn Fn(&BigRational) -> bool| -> Vec<usize> {
            (0..n).filter(|&i| pred(w.get(i))).sorted_by_key(|&i| sigma[i]).collect()
        };
        let lower = by_position(&|x| x < &t1);
        let upper = by_position(&|x| x >= &t2);
        let fixed: Vec<usize> = (0..n)
            .filter(|&i| w.get(i) >= &t1 && w.get(i) < &t2)
            .map(|i| sigma[i])
            .collect();
        let u: Vec<usize> = upper.iter().map(|&i| sigma[i]).sorted().collect();
        Ok((Self::new(w, v, t1, t2, &fixed, lower, upper)?, u))
    }

    /// Free positions `X`.
    pub fn free(&self) -> &[usize] {
        &self.free
    }

    pub fn upper_size(&self) -> usize {
        self.upper_order.len()
    }

    /// `Δ(v)(t2 − t1)`.
    pub fn gap_floor(&self) -> BigRational {
        delta(&self.v).expect("validated") * (&self.t2 - &self.t1)
    }

    fn check_subset(&self, u: &[usize]) -> Result<()> {
        if u.len() != self.upper_size() || !u.windows(2).all(|p| p[0] < p[1]) {
            return Err(invalid("subset must be sorted with one position per upper index"));
        }
        if !u.iter().all(|p| self.free.binary_search(p).is_ok()) {
            return Err(invalid("subset must lie in the free positions"));
        }
        Ok(())
    }

    /// The permutation obtained by giving the upper block the positions `u`.
    pub fn assemble(&self, u: &[usize]) -> Result<Vec<usize>> {
        self.check_subset(u)?;
        let mut sigma = vec![0; self.w.len()];
        for &(i, p) in &self.fixed {
            sigma[i] = p;
        }
        for (&i, &p) in self.upper_order.iter().zip(u) {
            sigma[i] = p;
        }
        let rest = self.free.iter().filter(|p| u.binary_search(p).is_err());
        for (&i, &p) in self.lower_order.iter().zip(rest) {
            sigma[i] = p;
        }
        Ok(sigma)
    }

    /// `S` of the assembled permutation.
    pub fn sum(&self, u: &[usize]) -> Result<BigRational> {
        let sigma = self.assemble(u)?;
        Ok(sigma
            .iter()
            .enumerate()
            .map(|(i, &p)| self.w.get(i) * self.v.get(p))
            .sum())
    }

    /// Every choice of upper-block positions with its sum, restricted to `interval`.
    pub fn level_set(&self, interval: &Interval) -> Result<(Vec<Vec<usize>>, Vec<BigRational>)> {
        let mut elements = Vec::new();
        let mut sums = Vec::new();
        for u in k_subsets(&self.free, self.upper_size()) {
            let s = self.sum(&u)?;
            if interval.contains(&s) {
                elements.push(u);
                sums.push(s);
            }
        }
        Ok((elements, sums))
    }
}

/// `V` is `U` with exactly one element replaced by a larger one.
pub fn is_upward_exchange(u: &[usize], v: &[usize]) -> bool {
    let removed: Vec<usize> = u.iter().filter(|x| !v.contains(x)).copied().collect();
    let added: Vec<usize> = v.iter().filter(|x| !u.contains(x)).copied().collect();
    u.len() == v.len() && removed.len() == 1 && added.len() == 1 && added[0] > removed[0]
}

/// `S(V) − S(U)` for an upward exchange. Always at least `Δ(v)(t2 − t1)`:
/// upper-block entries only move up, lower-block entries only move down, and
/// both move by the same total `v_y − v_x ≥ Δ(v)`.
pub fn covering_step_gap(ctx: &PermutationContext, u: &[usize], v: &[usize]) -> Result<BigRational> {
    ctx.check_subset(u)?;
    ctx.check_subset(v)?;
    if !is_upward_exchange(u, v) {
        return Err(Error::NotCovering("V must be U with one element moved upward".into()));
    }
    Ok(ctx.sum(v)? - ctx.sum(u)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainDecomposition {
    /// Index lists into the input family, each increasing in the order.
    pub chains: Vec<Vec<usize>>,
    /// True when the chain count is the minimum (computed by matching).
    pub optimal: bool,
    /// `1 + |I| / gap`.
    pub chain_bound: BigRational,
    pub longest_chain: usize,
    /// `Some` when every element's sum lies in `I`, so the chain bound applies.
    pub within_bound: Option<bool>,
}

/// Chain decomposition of `elements` (sorted equal-size subsets with sums `sums`).
/// Optimal up to `cap` elements, greedy after a topological sort otherwise.
pub fn chain_decompose(
    elements: &[Vec<usize>],
    sums: &[BigRational],
    interval: &Interval,
    delta_gap: &BigRational,
    cap: usize,
) -> Result<ChainDecomposition> {
    if !delta_gap.is_positive() {
        return Err(Error::Precondition("delta_gap > 0".into()));
    }
    if elements.len() != sums.len() {
        return Err(Error::LengthMismatch { w: elements.len(), v: sums.len() });
    }
    let optimal = elements.len() <= cap;
    let chains = if optimal {
        min_chain_cover(elements)
    } else {
        // element sums strictly increase along the order, so this is a linear extension
        let order = (0..elements.len()).sorted_by_key(|&i| (elements[i].iter().sum::<usize>(), elements[i].clone()));
        let mut chains: Vec<Vec<usize>> = Vec::new();
        for i in order {
            match chains
                .iter_mut()
                .find(|c| strictly_below(&elements[*c.last().expect("non-empty")], &elements[i]))
            {
                Some(c) => c.push(i),
                None => chains.push(vec![i]),
            }
        }
        chains
    };
    let chain_bound = BigRational::one() + interval.length() / delta_gap;
    let longest_chain = chains.iter().map(Vec::len).max().unwrap_or(0);
    let within_bound = sums
        .iter()
        .all(|s| interval.contains(s))
        .then(|| BigRational::from_integer(longest_chain.into()) <= chain_bound);
    Ok(ChainDecomposition { chains, optimal, chain_bound, longest_chain, within_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{int, parse_rational};
    use crate::sampling::stream_rng;
    use crate::sampling::rng::uniform_below;
    use proptest::prelude::*;

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn dominance_examples() {
        assert!(dominance_leq(&[1, 2], &[1, 3]).unwrap());
        assert!(!dominance_leq(&[1, 3], &[1, 2]).unwrap());
        assert!(!dominance_leq(&[1, 4], &[2, 3]).unwrap());
        assert!(!dominance_leq(&[2, 3], &[1, 4]).unwrap());
        assert!(dominance_leq(&[2, 5], &[2, 5]).unwrap());
        assert!(dominance_leq(&[1], &[1, 2]).is_err());
    }

    #[test]
    fn characterizations_agree_and_order_axioms_hold() {
        for n in 1..=8 {
            for k in 0..=n {
                let p = DominancePoset::new(n, k).unwrap();
                let els = p.elements();
                for a in els {
                    for b in els {
                        let x = dominance_leq(a, b).unwrap();
                        assert_eq!(x, dominance_leq_by_prefix_counts(a, b).unwrap(), "{a:?} {b:?}");
                        if x && dominance_leq(b, a).unwrap() {
                            assert_eq!(a, b);
                        }
                    }
                }
                if n <= 6 {
                    for a in els {
                        for b in els {
                            for c in els {
                                if dominance_leq(a, b).unwrap() && dominance_leq(b, c).unwrap() {
                                    assert!(dominance_leq(a, c).unwrap());
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn poset_sizes() {
        assert_eq!(DominancePoset::new(6, 3).unwrap().elements().len(), 20);
        assert_eq!(DominancePoset::new(4, 0).unwrap().elements(), &[Vec::<usize>::new()]);
        assert!(DominancePoset::new(3, 4).is_err());
        assert!(DominancePoset::over(&[1, 1, 2], 1).is_err());
    }

    #[test]
    fn stanley_examples() {
        assert_eq!(stanley_width(4, 2).unwrap(), 2u32.into());
        assert_eq!(stanley_width(6, 3).unwrap(), 3u32.into());
        assert_eq!(stanley_width(7, 0).unwrap(), 1u32.into());
        assert_eq!(stanley_width(7, 7).unwrap(), 1u32.into());
        assert!(stanley_width(3, 4).is_err());
    }

    #[test]
    fn gaussian_binomials() {
        let c = gaussian_binomial_coefficients(4, 2);
        assert_eq!(c, [1u32, 1, 2, 1, 1].map(BigUint::from).to_vec());
        for n in 0..=14 {
            for k in 0..=n {
                let c = gaussian_binomial_coefficients(n, k);
                let total: BigUint = c.iter().sum();
                assert_eq!(total, binomial(BigUint::from(n), BigUint::from(k)));
                if n >= 1 {
                    assert_eq!(c.iter().max().unwrap(), &stanley_width(n, k).unwrap(), "{n} {k}");
                }
            }
        }
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(dilworth_width_oracle(4, 2, DEFAULT_ORACLE_CAP).unwrap(), 2);
        assert_eq!(dilworth_width_oracle(3, 1, DEFAULT_ORACLE_CAP).unwrap(), 1);
        assert_eq!(dilworth_width_oracle(5, 2, DEFAULT_ORACLE_CAP).unwrap(), 2);
        assert!(matches!(dilworth_width_oracle(12, 6, DEFAULT_ORACLE_CAP), Err(Error::OracleCap { .. })));
        let cert = width_certificate(12, 6, DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!((cert.dilworth_width, cert.agree), (None, None));
    }

    #[test]
    fn stanley_matches_oracle_within_cap() {
        for n in 1..=12 {
            for k in 0..=n {
                match width_certificate(n, k, DEFAULT_ORACLE_CAP).unwrap() {
                    WidthCertificate { agree: Some(ok), .. } => assert!(ok, "{n} {k}"),
                    WidthCertificate { agree: None, .. } => assert!(binomial(n, k) > DEFAULT_ORACLE_CAP),
                }
            }
        }
    }

    #[test]
    fn ground_set_only_matters_through_its_size() {
        let x = [1usize, 2, 3, 5];
        let on_x = DominancePoset::over(&x, 2).unwrap();
        assert_eq!(min_chain_cover(on_x.elements()).len(), 2);
        assert_eq!(stanley_width(4, 2).unwrap(), 2u32.into());
        // summing the actual values of X instead of their ranks undercounts
        let a = RationalVector::from_integers(&[1, 2, 3, 5]).unwrap();
        assert_eq!(subset_sum_without_replacement(&a, 2).unwrap().max_count(), &BigUint::one());
    }

    #[test]
    fn chain_cover_is_a_partition_into_chains() {
        let p = DominancePoset::new(7, 3).unwrap();
        let chains = min_chain_cover(p.elements());
        let mut seen: Vec<usize> = chains.iter().flatten().copied().collect();
        seen.sort();
        assert_eq!(seen, (0..35).collect::<Vec<_>>());
        for c in &chains {
            for pair in c.windows(2) {
                assert!(strictly_below(&p.elements()[pair[0]], &p.elements()[pair[1]]));
            }
        }
        assert_eq!(BigUint::from(chains.len()), stanley_width(7, 3).unwrap());
    }

    fn example_context() -> PermutationContext {
        PermutationContext::new(
            &"0,0,1,1".parse().unwrap(),
            &"1,2,3,4".parse().unwrap(),
            q("1/4"),
            q("3/4"),
            &[],
            vec![0, 1],
            vec![2, 3],
        )
        .unwrap()
    }

    #[test]
    fn covering_gap_example() {
        let ctx = example_context();
        assert_eq!(ctx.free(), &[0, 1, 2, 3]);
        assert_eq!(ctx.sum(&[0, 1]).unwrap(), q("3"));
        let gap = covering_step_gap(&ctx, &[0, 1], &[0, 2]).unwrap();
        assert_eq!(gap, q("1"));
        assert!(gap >= ctx.gap_floor());
        assert_eq!(ctx.gap_floor(), q("1/2"));
        assert!(matches!(covering_step_gap(&ctx, &[0, 1], &[0, 1]), Err(Error::NotCovering(_))));
        assert!(matches!(covering_step_gap(&ctx, &[0, 2], &[0, 1]), Err(Error::NotCovering(_))));
    }

    #[test]
    fn malformed_contexts() {
        let w: RationalVector = "0,0,1,1".parse().unwrap();
        let v: RationalVector = "1,2,3,4".parse().unwrap();
        let build = |t1: &str, t2: &str, fixed: &[usize], lo: Vec<usize>, up: Vec<usize>| {
            PermutationContext::new(&w, &v, q(t1), q(t2), fixed, lo, up)
        };
        assert!(build("1/2", "1/2", &[], vec![0, 1], vec![2, 3]).is_err());
        assert!(build("1/4", "3/4", &[], vec![0], vec![2, 3]).is_err());
        assert!(build("1/4", "3/4", &[0], vec![0, 1], vec![2, 3]).is_err());
        // t1 = 0: index 0, 1 become middle indices with fixed positions
        assert!(build("0", "1", &[1, 1], vec![], vec![2, 3]).is_err());
        let ctx = build("0", "1", &[3, 0], vec![], vec![3, 2]).unwrap();
        assert_eq!(ctx.free(), &[1, 2]);
        assert!(ctx.sum(&[0, 1]).is_err());
        assert_eq!(ctx.assemble(&[1, 2]).unwrap(), vec![3, 0, 2, 1]);
    }

    #[test]
    fn randomized_covering_gaps() {
        let mut rng = stream_rng(2024);
        let mut draw = |bound: usize| uniform_below(&mut rng, bound as u64) as usize;
        let mut trials = 0;
        let mut ctx_rng = stream_rng(7);
        while trials < 10_000 {
            let n = 2 + draw(7);
            let mut w: Vec<i64> = (0..n).map(|_| draw(9) as i64 - 4).collect();
            w.sort();
            let mut v: Vec<i64> = (0..n).map(|_| draw(40) as i64).collect();
            v.sort();
            v.dedup();
            if v.len() < n {
                continue;
            }
            let (lo, hi) = (draw(9) as i64 - 4, draw(9) as i64 - 4);
            if lo >= hi {
                continue;
            }
            let t1 = BigRational::new(lo.into(), 2.into());
            let t2 = BigRational::new(hi.into(), 2.into());
            let w = RationalVector::from_integers(&w).unwrap();
            let v = RationalVector::from_integers(&v).unwrap();
            let (ctx, u) = PermutationContext::random(&w, &v, t1, t2, &mut ctx_rng).unwrap();
            let outside: Vec<usize> = ctx.free().iter().filter(|p| !u.contains(p)).copied().collect();
            if u.is_empty() || outside.is_empty() {
                continue;
            }
            let x = u[draw(u.len())];
            let ups: Vec<usize> = outside.into_iter().filter(|&y| y > x).collect();
            if ups.is_empty() {
                continue;
            }
            let y = ups[draw(ups.len())];
            let mut moved: Vec<usize> = u.iter().map(|&e| if e == x { y } else { e }).collect();
            moved.sort();
            let gap = covering_step_gap(&ctx, &u, &moved).unwrap();
            assert!(gap >= ctx.gap_floor(), "gap {gap} floor {}", ctx.gap_floor());
            trials += 1;
        }
    }

    #[test]
    fn chain_decomposition_examples() {
        let antichain = vec![vec![1, 4], vec![2, 3]];
        let sums = vec![q("0"), q("0")];
        let d = chain_decompose(&antichain, &sums, &Interval::point(q("0")), &q("1"), DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(d.chains.len(), 2);
        assert_eq!(d.longest_chain, 1);

        let chain = vec![vec![1, 2], vec![1, 3], vec![2, 3]];
        let sums = vec![q("0"), q("1"), q("2")];
        let iv = Interval::new(q("0"), q("2")).unwrap();
        let d = chain_decompose(&chain, &sums, &iv, &q("1"), DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(d.chains, vec![vec![0, 1, 2]]);
        assert_eq!(d.within_bound, Some(true));
        let greedy = chain_decompose(&chain, &sums, &iv, &q("1"), 0).unwrap();
        assert!(!greedy.optimal);
        assert_eq!(greedy.chains.len(), 1);
        assert!(chain_decompose(&chain, &sums, &iv, &q("0"), 10).is_err());
    }

    #[test]
    fn level_sets_respect_the_chain_bound() {
        let mut rng = stream_rng(99);
        for trial in 0..40 {
            let n = 4 + trial % 3;
            let w = RationalVector::from_integers(&(0..n as i64).map(|i| i / 2).collect::<Vec<_>>()).unwrap();
            let v = RationalVector::arithmetic(n).unwrap();
            let (ctx, _) = PermutationContext::random(&w, &v, q("1/2"), q("3/2"), &mut rng).unwrap();
            let all = Interval::new(q("-1000"), q("1000")).unwrap();
            let (_, sums) = ctx.level_set(&all).unwrap();
            let lo = sums.iter().min().unwrap().clone();
            let iv = Interval::new(lo.clone(), lo + int(2 + (trial % 4) as i64)).unwrap();
            let (els, sums) = ctx.level_set(&iv).unwrap();
            let d = chain_decompose(&els, &sums, &iv, &ctx.gap_floor(), DEFAULT_ORACLE_CAP).unwrap();
            assert_eq!(d.within_bound, Some(true));
            let greedy = chain_decompose(&els, &sums, &iv, &ctx.gap_floor(), 0).unwrap();
            assert_eq!(greedy.within_bound, Some(true));
            assert!(greedy.chains.len() >= d.chains.len());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn width_is_complement_symmetric(n in 1usize..40, k in 0usize..40) {
            prop_assume!(k <= n);
            prop_assert_eq!(stanley_width(n, k).unwrap(), stanley_width(n, n - k).unwrap());
        }

        #[test]
        fn matching_chains_equal_oracle_on_random_families(n in 3usize..7, k in 1usize..4, mask in any::<u64>()) {
            prop_assume!(k < n);
            let p = DominancePoset::new(n, k).unwrap();
            let family: Vec<Vec<usize>> = p.elements().iter().enumerate()
                .filter(|(i, _)| mask >> (i % 64) & 1 == 1)
                .map(|(_, e)| e.clone())
                .collect();
            prop_assume!(!family.is_empty());
            let sums = vec![BigRational::zero(); family.len()];
            let d = chain_decompose(&family, &sums, &Interval::point(BigRational::zero()), &BigRational::one(), 500).unwrap();
            // brute-force maximum antichain
            let m = family.len();
            prop_assume!(m <= 16);
            let mut best = 0;
            for sel in 0u32..(1 << m) {
                let idx: Vec<usize> = (0..m).filter(|i| sel >> i & 1 == 1).collect();
                let anti = idx.iter().all(|&a| idx.iter().all(|&b| a == b || !dominance_leq(&family[a], &family[b]).unwrap()));
                if anti { best = best.max(idx.len()); }
            }
            prop_assert_eq!(d.chains.len(), best);
        }
    }
}
