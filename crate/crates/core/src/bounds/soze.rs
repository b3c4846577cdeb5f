//! Decay of `P(|w_π · v − Ln| ≤ 1)` in `L` for unit, centered `w` and `v = (1, …, n)`.
//!
//! Any nonconstant `w` is mapped to `(w − w̄) / ‖w − w̄‖`. The event is decided
//! exactly: with `g` the centered vector on its integer grid, `S2 = Σ g_i²` and
//! `A = Σ g_π(i) · i`, it reads `(Ln − 1)√S2 ≤ A ≤ (Ln + 1)√S2`, and both ends
//! are rounded to integers with exact integer square roots.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::engines::perm_sum_distribution;
use crate::error::{Error, Result};
use crate::numerics::{embed, format_rational, int, RationalVector};
use crate::sampling::{run_chunks, McConfig, McEstimate, PermSumSampler};

/// `floor(num · √s2 / den)` for `den > 0`, `s2 >= 0`.
fn floor_mul_sqrt(num: &BigInt, den: &BigInt, s2: &BigInt) -> BigInt {
    let radicand = num * num * s2;
    let root = radicand.sqrt();
    if !num.is_negative() {
        return root.div_floor(den);
    }
    let ceil = if &root * &root == radicand {
        root.div_ceil(den)
    } else {
        root.div_floor(den) + 1
    };
    -ceil
}

fn ceil_mul_sqrt(num: &BigInt, den: &BigInt, s2: &BigInt) -> BigInt {
    -floor_mul_sqrt(&-num, den, s2)
}

fn clamp_i64(x: BigInt) -> i64 {
    x.to_i64()
        .unwrap_or(if x.is_negative() { i64::MIN } else { i64::MAX })
}

/// The affine map taking `w` to a centered unit vector, and its grid form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SozeNormalization {
    /// `w̄`, subtracted first.
    pub mean: BigRational,
    /// `‖w − w̄‖²`; the centered vector is divided by its square root.
    pub centered_norm_sq: BigRational,
    centered: RationalVector,
    norm_sq_units: BigInt,
}

impl SozeNormalization {
    pub fn new(w: &RationalVector) -> Result<Self> {
        if w.is_constant() {
            return Err(Error::Precondition(
                "w constant: cannot be centered to a unit vector".into(),
            ));
        }
        let mean = w.mean();
        let centered = w.map(|x| x - &mean);
        let g = embed(&centered)?;
        let norm_sq_units: BigInt = g.values.iter().map(|&x| BigInt::from(x) * x).sum();
        let centered_norm_sq = centered.coords().iter().map(|x| x * x).sum();
        Ok(Self { mean, centered_norm_sq, centered, norm_sq_units })
    }

    pub fn n(&self) -> usize {
        self.centered.len()
    }

    pub fn centered(&self) -> &RationalVector {
        &self.centered
    }

    /// Inclusive grid-unit range of `A` for the event at `L`; empty when `lo > hi`.
    pub fn event_bounds(&self, l: &BigRational) -> (i64, i64) {
        let n = int(self.n() as i64);
        let lo = l * &n - int(1);
        let hi = l * &n + int(1);
        let (lo_num, lo_den) = (lo.numer().clone(), lo.denom().clone());
        let (hi_num, hi_den) = (hi.numer().clone(), hi.denom().clone());
        (
            clamp_i64(ceil_mul_sqrt(&lo_num, &lo_den, &self.norm_sq_units)),
            clamp_i64(floor_mul_sqrt(&hi_num, &hi_den, &self.norm_sq_units)),
        )
    }

    pub fn describe(&self) -> String {
        format!(
            "w -> (w - {}) / sqrt({})",
            format_rational(&self.mean),
            format_rational(&self.centered_norm_sq)
        )
    }
}

fn positions(n: usize) -> RationalVector {
    RationalVector::arithmetic(n).expect("n >= 1")
}

#[derive(Clone, Debug, PartialEq)]
pub struct SozeRow {
    pub l: BigRational,
    pub estimate: McEstimate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SozeProfile {
    pub normalization: SozeNormalization,
    pub rows: Vec<SozeRow>,
}

/// Monte Carlo estimates of the event probability for each `L`. All `L` share
/// the same sampled permutations.
pub fn soze_decay_profile(
    w: &RationalVector,
    l_values: &[BigRational],
    cfg: &McConfig,
) -> Result<SozeProfile> {
    let normalization = SozeNormalization::new(w)?;
    let sampler = PermSumSampler::new(normalization.centered(), &positions(w.len()))?;
    let ranges: Vec<(i64, i64)> = l_values.iter().map(|l| normalization.event_bounds(l)).collect();
    let per_chunk = run_chunks(cfg, |rng, count| {
        let mut perm = sampler.identity();
        let mut hits = vec![0u64; ranges.len()];
        for _ in 0..count {
            let a = sampler.sample_with(rng, &mut perm);
            for (h, &(lo, hi)) in hits.iter_mut().zip(&ranges) {
                if lo <= a && a <= hi {
                    *h += 1;
                }
            }
        }
        hits
    })?;
    let rows = l_values
        .iter()
        .enumerate()
        .map(|(j, l)| SozeRow {
            l: l.clone(),
            estimate: McEstimate::from_hits(per_chunk.iter().map(|h| h[j]).sum(), cfg.samples, cfg.seed),
        })
        .collect();
    Ok(SozeProfile { normalization, rows })
}

/// Exact event probability from the permutation engine (subject to its cap).
pub fn soze_exact_probability(w: &RationalVector, l: &BigRational, cap: usize) -> Result<BigRational> {
    let normalization = SozeNormalization::new(w)?;
    let dist = perm_sum_distribution(normalization.centered(), &positions(w.len()), cap)?;
    let (lo, hi) = normalization.event_bounds(l);
    if lo > hi {
        return Ok(BigRational::zero());
    }
    Ok(BigRational::new(
        dist.count_in_units(lo, hi).into(),
        dist.total().clone().into(),
    ))
}
