//! Directed rounding for the irrational pieces of the bound formulas.
//!
//! Square roots and logarithms are evaluated on the dyadic grid `2^-FRACTION_BITS`
//! with an explicit rounding direction, so every reported bound is an upper
//! bound on the exact formula value. Perfect squares stay exact.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub const FRACTION_BITS: u32 = 64;

fn grid_denominator() -> BigInt {
    BigInt::one() << FRACTION_BITS
}

/// A non-negative real bracketed on the dyadic grid. `exact` means `lo == hi == value`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Enclosure {
    pub fn exact(x: BigRational) -> Self {
        Self { lo: x.clone(), hi: x }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }
}

/// Smallest multiple of `2^-FRACTION_BITS` that is `>= x`.
pub fn round_up(x: &BigRational) -> BigRational {
    let d = grid_denominator();
    BigRational::new((x * BigRational::from_integer(d.clone())).ceil().to_integer(), d)
}

/// Largest multiple of `2^-FRACTION_BITS` that is `<= x`.
pub fn round_down(x: &BigRational) -> BigRational {
    let d = grid_denominator();
    BigRational::new((x * BigRational::from_integer(d.clone())).floor().to_integer(), d)
}

fn isqrt(x: &BigInt) -> BigInt {
    BigInt::from(x.magnitude().sqrt())
}

/// Exact rational square root, when there is one.
pub fn exact_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let p = x.numer().magnitude();
    let q = x.denom().magnitude();
    let (rp, rq): (BigUint, BigUint) = (p.sqrt(), q.sqrt());
    (&rp * &rp == *p && &rq * &rq == *q)
        .then(|| BigRational::new(BigInt::from(rp), BigInt::from(rq)))
}

/// Enclosure of `√x` for `x >= 0`.
pub fn sqrt(x: &BigRational) -> Enclosure {
    assert!(!x.is_negative(), "sqrt of a negative value");
    if let Some(r) = exact_sqrt(x) {
        return Enclosure::exact(r);
    }
    let d = grid_denominator();
    // √x · 2^F = √(x · 2^2F)
    let scaled = x * BigRational::from_integer(&d * &d);
    let lo_int = isqrt(&scaled.floor().to_integer());
    let hi_cand = isqrt(&scaled.ceil().to_integer());
    let hi_int = if &hi_cand * &hi_cand == scaled.ceil().to_integer() {
        hi_cand
    } else {
        hi_cand + 1
    };
    Enclosure {
        lo: BigRational::new(lo_int, d.clone()),
        hi: BigRational::new(hi_int, d),
    }
}

/// Enclosure of `atanh(z)` for `0 <= z <= 1/3` from the odd power series.
fn atanh_small(z: &BigRational) -> (BigRational, BigRational) {
    const TERMS: u32 = 48;
    let z2 = z * z;
    let mut power = z.clone();
    let mut sum = BigRational::zero();
    for k in 0..TERMS {
        sum += &power / BigRational::from_integer((2 * k + 1).into());
        power *= &z2;
    }
    // tail ≤ z^(2T+1) / ((2T+1)(1 − z²))
    let tail = &power
        / (BigRational::from_integer((2 * TERMS + 1).into()) * (BigRational::one() - &z2));
    let upper = &sum + tail;
    (sum, upper)
}

/// Enclosure of `ln n` for an integer `n >= 1`.
pub fn ln(n: u64) -> Enclosure {
    assert!(n >= 1, "ln of zero");
    if n == 1 {
        return Enclosure::exact(BigRational::zero());
    }
    // n = 2^e · m with m ∈ [1, 2); ln y = 2 atanh((y − 1)/(y + 1))
    let e = 63 - n.leading_zeros() as i64;
    let m = BigRational::new(BigInt::from(n), BigInt::one() << e as usize);
    let one = BigRational::one();
    let third = BigRational::new(1.into(), 3.into());
    let (ln2_lo, ln2_hi) = atanh_small(&third);
    let zm = (&m - &one) / (&m + &one);
    let (lm_lo, lm_hi) = atanh_small(&zm);
    let two = BigRational::from_integer(2.into());
    let ef = BigRational::from_integer(e.into());
    let lo = &two * (&ef * ln2_lo + lm_lo);
    let hi = &two * (&ef * ln2_hi + lm_hi);
    Enclosure { lo: round_down(&lo), hi: round_up(&hi) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{parse_rational, rational_to_f64};

    #[test]
    fn perfect_squares_are_exact() {
        assert!(sqrt(&parse_rational("9/4").unwrap()).is_exact());
        assert_eq!(sqrt(&parse_rational("16").unwrap()).hi, parse_rational("4").unwrap());
        assert!(sqrt(&BigRational::zero()).is_exact());
    }

    #[test]
    fn sqrt_brackets_the_true_value() {
        for x in ["2", "3", "1/3", "1000001", "7/5"] {
            let v = parse_rational(x).unwrap();
            let e = sqrt(&v);
            assert!(&e.lo * &e.lo <= v && v <= &e.hi * &e.hi, "{x}");
            let width = rational_to_f64(&(&e.hi - &e.lo));
            assert!(width <= 2f64.powi(-63), "{x}: {width}");
        }
    }

    #[test]
    fn ln_brackets_the_true_value() {
        for n in [2u64, 3, 4, 10, 97, 1000, 1 << 40, u64::MAX] {
            let e = ln(n);
            let f = (n as f64).ln();
            assert!(rational_to_f64(&e.lo) <= f + 1e-12 && f - 1e-12 <= rational_to_f64(&e.hi), "{n}");
            assert!(rational_to_f64(&(&e.hi - &e.lo)) < 1e-15, "{n}");
        }
        assert!(ln(1).is_exact());
    }

    #[test]
    fn rounding_directions() {
        let x = parse_rational("1/3").unwrap();
        assert!(round_down(&x) < x && x < round_up(&x));
        let y = parse_rational("3/4").unwrap();
        assert_eq!(round_up(&y), y);
    }
}
