//! Tolerance policy and the few float helpers core does not provide.
//!
//! Two regimes are kept apart deliberately. Identities that hold in exact
//! arithmetic (rank-one reconstruction of the transition matrix, symmetry,
//! cross-block zeros) are checked against [`EQ_TOL`]. Comparisons between two
//! differently truncated series carry an extra `C^(K+1)` truncation gap and
//! go through [`oracle_tol`].

/// Bound for identities that are exact up to float rounding.
pub const EQ_TOL: f64 = 1e-12;

/// Bound for comparing an incrementally maintained result against a freshly
/// recomputed one. Both sides truncate the same series at `K`, but at
/// different base points, so the gap scales with the series tail `C^(K+1)`.
/// The floor keeps the bound meaningful when the tail underflows rounding
/// noise.
pub fn oracle_tol(c: f64, k: u32) -> f64 {
    let tail = 3.0 * powi(c, k + 1);
    if tail > 1e-10 {
        tail
    } else {
        1e-10
    }
}

/// `|x|` by clearing the sign bit. Works without std and maps `-0.0` to
/// `0.0`, which the zero-outside-the-affected-area checks rely on.
#[inline]
pub fn fabs(x: f64) -> f64 {
    f64::from_bits(x.to_bits() & (u64::MAX >> 1))
}

/// Integer power by binary exponentiation; used for series tails.
pub fn powi(base: f64, mut exp: u32) -> f64 {
    let mut acc = 1.0;
    let mut b = base;
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= b;
        }
        b *= b;
        exp >>= 1;
    }
    acc
}

/// Largest `|a[i] - b[i]|`; the slices must have equal length.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut worst = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        let d = fabs(x - y);
        if d > worst {
            worst = d;
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fabs_clears_sign() {
        assert_eq!(fabs(-3.5), 3.5);
        assert_eq!(fabs(3.5), 3.5);
        assert_eq!(fabs(-0.0).to_bits(), 0.0f64.to_bits());
    }

    #[test]
    fn powi_matches_repeated_multiplication() {
        let mut acc = 1.0;
        for k in 0..12u32 {
            assert!(fabs(powi(0.8, k) - acc) < 1e-15);
            acc *= 0.8;
        }
        assert_eq!(powi(0.6, 0), 1.0);
    }

    #[test]
    fn oracle_tol_floors_at_1e10() {
        assert_eq!(oracle_tol(0.4, 30), 1e-10);
        let t = oracle_tol(0.8, 30);
        assert!(t > 2.9e-3 && t < 3.0e-3);
    }
}
