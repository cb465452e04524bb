//! Exact subspace counts of P_{d,e}.
//!
//! Exponents are carried doubled (`e2 = 2e`) so that half-integral powers of
//! a square order `q = s^2` become integral powers of `s`.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{invalid, Result};

/// `s` with `s^2 = q`, if any.
pub fn integer_sqrt(q: u64) -> Option<u64> {
    let s = (q as f64).sqrt().round() as u64;
    (s * s == q).then_some(s)
}

/// `q^(x/2)`; needs `x` even or `q` a perfect square.
pub fn q_half_pow(q: u64, x: u32) -> Result<BigUint> {
    if x.is_multiple_of(2) {
        Ok(BigUint::from(q).pow(x / 2))
    } else {
        let s = integer_sqrt(q).ok_or_else(|| invalid(format!("q = {q} is not a square")))?;
        Ok(BigUint::from(s).pow(x))
    }
}

pub fn gaussian_binomial(q: u64, n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let q = BigUint::from(q);
    let one = BigUint::one();
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= q.pow(n - i) - &one;
        den *= q.pow(i + 1) - &one;
    }
    num / den
}

/// Number of totally isotropic (k-1)-spaces of P_{d,e} with `e = e2/2`:
/// `[d k]_q * prod_{i=1..k} (q^(d+e-i) + 1)`.
pub fn count_subspaces(d: u32, e2: u32, q: u64, k: u32) -> Result<BigUint> {
    if k > d {
        return Err(invalid(format!("k = {k} exceeds the rank {d}")));
    }
    if e2 > 4 {
        return Err(invalid(format!("e = {e2}/2 is not a polar space parameter")));
    }
    let mut total = gaussian_binomial(q, d, k);
    for i in 1..=k {
        total *= q_half_pow(q, 2 * (d - i) + e2)? + BigUint::one();
    }
    Ok(total)
}

/// `|M_{P_{r,e}}|`: generators of a rank-`r` polar space (1 when `r = 0`).
pub fn generator_count(r: u32, e2: u32, q: u64) -> Result<BigUint> {
    count_subspaces(r, e2, q, r)
}

/// Generators through a fixed (k-1)-space of P_{d,e}: `|M_{P_{d-k,e}}|`.
pub fn generators_through(d: u32, e2: u32, q: u64, k: u32) -> Result<BigUint> {
    if k > d {
        return Err(invalid(format!("k = {k} exceeds the rank {d}")));
    }
    generator_count(d - k, e2, q)
}

/// Machine-integer convenience for sizes known to be small.
pub fn to_u64(x: &BigUint) -> u64 {
    u64::try_from(x).expect("count fits in 64 bits")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(count_subspaces(2, 4, 3, 1).unwrap(), BigUint::from(112u32));
        assert_eq!(count_subspaces(2, 4, 3, 2).unwrap(), BigUint::from(280u32));
        assert_eq!(count_subspaces(4, 2, 2, 4).unwrap(), BigUint::from(2295u32));
        assert_eq!(count_subspaces(2, 2, 2, 2).unwrap(), BigUint::from(15u32));
        assert_eq!(count_subspaces(3, 0, 2, 1).unwrap(), BigUint::from(35u32));
        assert_eq!(count_subspaces(3, 0, 2, 3).unwrap(), BigUint::from(30u32));
        // H(3,4): 45 points, 27 lines
        assert_eq!(count_subspaces(2, 1, 4, 1).unwrap(), BigUint::from(45u32));
        assert_eq!(count_subspaces(2, 1, 4, 2).unwrap(), BigUint::from(27u32));
        assert!(count_subspaces(2, 1, 3, 1).is_err());
        assert!(count_subspaces(2, 0, 3, 3).is_err());
    }

    #[test]
    fn generators_through_points() {
        // Q-(5,3): 10 lines on a point; Q(6,3): 4 planes on a line
        assert_eq!(generators_through(2, 4, 3, 1).unwrap(), BigUint::from(10u32));
        assert_eq!(generators_through(3, 2, 3, 2).unwrap(), BigUint::from(4u32));
        assert_eq!(generators_through(3, 0, 2, 3).unwrap(), BigUint::from(1u32));
    }
}
