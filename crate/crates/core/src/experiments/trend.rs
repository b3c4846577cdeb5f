//! One-sided Kendall tau test for an increasing trend of `y` in `x`.
//!
//! Without ties (and `n ≤ EXACT_MAX_N`) the p-value comes from the exact null
//! law of the inversion count. Otherwise it uses the normal approximation with
//! the tie-corrected variance of `S` and a continuity correction of 1.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Significance level for "no increasing trend".
pub const TREND_LEVEL: f64 = 0.01;
pub const EXACT_MAX_N: usize = 60;

#[derive(Clone, Debug, PartialEq)]
pub struct TrendTest {
    pub n: usize,
    /// `Σ_{i<j} sign(x_j − x_i) sign(y_j − y_i)`.
    pub s: i64,
    /// Tau-b.
    pub tau: f64,
    /// `P(S ≥ s)` under independence.
    pub p_value: f64,
    pub exact: bool,
    pub significant: bool,
}

fn sign(a: f64, b: f64) -> i64 {
    match b.partial_cmp(&a) {
        Some(std::cmp::Ordering::Greater) => 1,
        Some(std::cmp::Ordering::Less) => -1,
        _ => 0,
    }
}

fn tie_groups(xs: &[f64]) -> Vec<f64> {
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted
        .chunk_by(|a, b| a == b)
        .map(|g| g.len() as f64)
        .filter(|&t| t > 1.0)
        .collect()
}

/// Probability that a uniform permutation of `n` has at most `max_inv` inversions.
fn inversions_cdf(n: usize, max_inv: i64) -> f64 {
    if max_inv < 0 {
        return 0.0;
    }
    let total = n * n.saturating_sub(1) / 2;
    let mut dist = vec![1.0f64];
    for m in 1..=n {
        // inserting the m-th element adds 0..m inversions uniformly
        let mut next = vec![0.0; dist.len() + m - 1];
        let mut window = 0.0;
        for (j, slot) in next.iter_mut().enumerate() {
            if j < dist.len() {
                window += dist[j];
            }
            if j >= m && j - m < dist.len() {
                window -= dist[j - m];
            }
            *slot = window / m as f64;
        }
        dist = next;
    }
    debug_assert_eq!(dist.len(), total + 1);
    dist.iter().take((max_inv as usize + 1).min(dist.len())).sum::<f64>().min(1.0)
}

pub fn kendall_trend(xs: &[f64], ys: &[f64]) -> Result<TrendTest> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch { w: xs.len(), v: ys.len() });
    }
    let n = xs.len();
    if n < 3 {
        return Err(Error::Precondition("trend test needs at least 3 points".into()));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::Precondition("trend test needs finite values".into()));
    }
    let mut s = 0i64;
    for i in 0..n {
        for j in i + 1..n {
            s += sign(xs[i], xs[j]) * sign(ys[i], ys[j]);
        }
    }
    let nf = n as f64;
    let pairs = nf * (nf - 1.0) / 2.0;
    let tx = tie_groups(xs);
    let ty = tie_groups(ys);
    let tied_pairs = |t: &[f64]| t.iter().map(|t| t * (t - 1.0) / 2.0).sum::<f64>();
    let denom = ((pairs - tied_pairs(&tx)) * (pairs - tied_pairs(&ty))).sqrt();
    let tau = if denom > 0.0 { s as f64 / denom } else { 0.0 };

    let exact = tx.is_empty() && ty.is_empty() && n <= EXACT_MAX_N;
    let p_value = if exact {
        // S = M − 2·inv, so S ≥ s  ⇔  inv ≤ (M − s) / 2
        let m = (n * (n - 1) / 2) as i64;
        inversions_cdf(n, (m - s).div_euclid(2))
    } else {
        let f = |t: &[f64], a: fn(f64) -> f64| t.iter().map(|&t| a(t)).sum::<f64>();
        let v0 = nf * (nf - 1.0) * (2.0 * nf + 5.0);
        let vt = f(&tx, |t| t * (t - 1.0) * (2.0 * t + 5.0));
        let vu = f(&ty, |t| t * (t - 1.0) * (2.0 * t + 5.0));
        let var = (v0 - vt - vu) / 18.0
            + f(&tx, |t| t * (t - 1.0) * (t - 2.0)) * f(&ty, |t| t * (t - 1.0) * (t - 2.0))
                / (9.0 * nf * (nf - 1.0) * (nf - 2.0))
            + f(&tx, |t| t * (t - 1.0)) * f(&ty, |t| t * (t - 1.0)) / (2.0 * nf * (nf - 1.0));
        if var <= 0.0 || s <= 0 {
            if s > 0 { 0.0 } else { 1.0 }
        } else {
            let z = (s as f64 - 1.0) / var.sqrt();
            let normal = Normal::new(0.0, 1.0).expect("standard normal");
            1.0 - normal.cdf(z)
        }
    };
    Ok(TrendTest { n, s, tau, p_value, exact, significant: p_value < TREND_LEVEL })
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;

    #[test]
    fn exact_null_matches_enumeration() {
        // P(S ≥ s) for n = 5 by brute force over all rankings of y
        let xs: Vec<f64> = (0..5).map(f64::from).collect();
        let mut all = Vec::new();
        for perm in (0..5).permutations(5) {
            let ys: Vec<f64> = perm.iter().map(|&p| p as f64).collect();
            all.push(kendall_trend(&xs, &ys).unwrap().s);
        }
        for probe in (0..5).permutations(5).step_by(7) {
            let ys: Vec<f64> = probe.iter().map(|&p| p as f64).collect();
            let t = kendall_trend(&xs, &ys).unwrap();
            let brute = all.iter().filter(|&&s| s >= t.s).count() as f64 / 120.0;
            assert!((t.p_value - brute).abs() < 1e-12, "{t:?} vs {brute}");
            assert!(t.exact);
        }
    }

    #[test]
    fn monotone_sequences() {
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let up = kendall_trend(&xs, &xs).unwrap();
        assert_eq!(up.tau, 1.0);
        assert!((up.p_value - 1.0 / 3_628_800.0).abs() < 1e-18);
        assert!(up.significant);
        let down: Vec<f64> = xs.iter().rev().copied().collect();
        let t = kendall_trend(&xs, &down).unwrap();
        assert_eq!(t.tau, -1.0);
        assert!((t.p_value - 1.0).abs() < 1e-12);
        assert!(!t.significant);
    }

    #[test]
    fn ties_use_the_normal_approximation() {
        let xs = [1.0, 1.0, 2.0, 2.0, 3.0, 3.0, 4.0, 4.0];
        let flat = [5.0; 8];
        let t = kendall_trend(&xs, &flat).unwrap();
        assert!(!t.exact && !t.significant && t.s == 0);
        let ys = [1.0, 2.0, 2.0, 3.0, 4.0, 5.0, 5.0, 6.0];
        let t = kendall_trend(&xs, &ys).unwrap();
        assert!(!t.exact && t.tau > 0.8 && t.p_value < 0.01);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(kendall_trend(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(kendall_trend(&[1.0, 2.0, 3.0], &[1.0, f64::NAN, 2.0]).is_err());
        assert!(kendall_trend(&[1.0, 2.0, 3.0], &[1.0, 2.0]).is_err());
    }
}
