//! Fixed instances shared by the benchmarks.

use anticonc_core::RationalVector;

/// `w = (1, -1, 0, …, 0)`, `v = (1, …, n)`: the point-mass extremal family.
pub fn tight_instance(n: usize) -> (RationalVector, RationalVector) {
    let mut w = vec![0i64; n];
    w[0] = 1;
    w[1] = -1;
    (RationalVector::from_integers(&w).unwrap(), RationalVector::arithmetic(n).unwrap())
}

/// A deterministic instance with repeated values in `w` (alphabet of size 3).
pub fn repeated_instance(n: usize) -> (RationalVector, RationalVector) {
    let w: Vec<i64> = (0..n as i64).map(|i| (i * 7 + 3) % 3 - 1).collect();
    (RationalVector::from_integers(&w).unwrap(), RationalVector::arithmetic(n).unwrap())
}

/// `w` with all coordinates distinct; the hardest case for the exact engine.
pub fn distinct_instance(n: usize) -> (RationalVector, RationalVector) {
    let w: Vec<i64> = (0..n as i64).map(|i| i * i - 3 * i).collect();
    (RationalVector::from_integers(&w).unwrap(), RationalVector::arithmetic(n).unwrap())
}
