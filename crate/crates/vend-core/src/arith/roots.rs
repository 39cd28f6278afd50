//! Decide whether every complex root of a rational polynomial lies strictly
//! inside the unit circle.
//!
//! The test substitutes x = (1+w)/(1-w), which carries the open unit disk to
//! the open left half-plane, and then runs the Routh array on the transformed
//! polynomial with exact rational arithmetic. A zero or negative pivot means
//! some root is on or outside the circle. Roots at x = 0 are stripped first
//! (they are inside), and p(1) = 0 or p(-1) = 0 are immediate failures since
//! those roots sit on the boundary and the substitution would degenerate.

use alloc::vec;
use alloc::vec::Vec;
use num_traits::{One, Signed, Zero};

use super::{rat, ArithError, Rat, RatPoly};

pub fn all_roots_inside_unit_circle(p: &RatPoly) -> Result<bool, ArithError> {
    if p.is_zero() {
        return Err(ArithError::ZeroPolynomial);
    }
    // Strip roots at the origin.
    let mut coeffs = p.coeffs().to_vec();
    let first_nonzero = coeffs.iter().position(|c| !c.is_zero()).unwrap();
    coeffs.drain(..first_nonzero);
    let p = RatPoly::new(coeffs);
    let n = p.degree().unwrap();
    if n == 0 {
        return Ok(true);
    }
    let one = Rat::one();
    if p.eval(&one).is_zero() || p.eval(&(-one)).is_zero() {
        return Ok(false);
    }

    // q(w) = (1-w)^n * p((1+w)/(1-w)) = sum_i a_i (1+w)^i (1-w)^{n-i}.
    let plus = RatPoly::new(vec![Rat::one(), Rat::one()]);
    let minus = RatPoly::new(vec![Rat::one(), -Rat::one()]);
    let mut plus_pow = vec![RatPoly::one()];
    let mut minus_pow = vec![RatPoly::one()];
    for i in 1..=n {
        plus_pow.push(plus_pow[i - 1].mul(&plus));
        minus_pow.push(minus_pow[i - 1].mul(&minus));
    }
    let mut q = RatPoly::zero();
    for (i, a) in p.coeffs().iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        q = q.add(&plus_pow[i].mul(&minus_pow[n - i]).scale(a));
    }
    // Leading coefficient of q is (-1)^n p(-1) != 0, so deg q = n.
    debug_assert_eq!(q.degree(), Some(n));
    if q.leading().unwrap().is_negative() {
        q = q.neg();
    }
    Ok(routh_hurwitz_stable(&q))
}

/// True iff all roots of `q` (leading coefficient positive) are in the open
/// left half-plane. Exact Routh array; any non-positive pivot fails.
fn routh_hurwitz_stable(q: &RatPoly) -> bool {
    let n = q.degree().unwrap();
    if n == 0 {
        return true;
    }
    // Rows hold coefficients in decreasing degree: row0 = q_n, q_{n-2}, ...
    // row1 = q_{n-1}, q_{n-3}, ...
    let coeff_desc = |k: usize| q.coeff(n - k);
    let width = n / 2 + 1;
    let mut row0: Vec<Rat> = (0..width)
        .map(|j| if 2 * j <= n { coeff_desc(2 * j) } else { Rat::zero() })
        .collect();
    let mut row1: Vec<Rat> = (0..width)
        .map(|j| if 2 * j < n { coeff_desc(2 * j + 1) } else { Rat::zero() })
        .collect();
    let positive = |r: &Rat| r > &rat(0, 1);
    if !positive(&row0[0]) {
        return false;
    }
    // n more pivots to check (rows s^{n-1} down to s^0).
    for _ in 0..n {
        if !positive(&row1[0]) {
            return false;
        }
        let mut next = vec![Rat::zero(); width];
        for j in 0..width - 1 {
            // next[j] = (row1[0]*row0[j+1] - row0[0]*row1[j+1]) / row1[0]
            let num = &row1[0] * &row0[j + 1] - &row0[0] * &row1[j + 1];
            next[j] = num / &row1[0];
        }
        row0 = row1;
        row1 = next;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn poly(cs: &[(i64, i64)]) -> RatPoly {
        RatPoly::new(cs.iter().map(|&(p, q)| rat(p, q)).collect())
    }

    #[test]
    fn contraction_passes() {
        // x - 1/2: root 1/2.
        assert!(all_roots_inside_unit_circle(&poly(&[(-1, 2), (1, 1)])).unwrap());
    }

    #[test]
    fn boundary_and_outside_fail() {
        // x - 1: root on the circle.
        assert!(!all_roots_inside_unit_circle(&poly(&[(-1, 1), (1, 1)])).unwrap());
        // x^2 - x/2 - 1: roots (1 +- sqrt(17))/4, one outside.
        assert!(!all_roots_inside_unit_circle(&poly(&[(-1, 1), (-1, 2), (1, 1)])).unwrap());
        // x^2 + 1: both roots on the circle.
        assert!(!all_roots_inside_unit_circle(&poly(&[(1, 1), (0, 1), (1, 1)])).unwrap());
    }

    #[test]
    fn product_of_contractions_passes() {
        // (x - 1/2)(x + 1/3)
        let p = RatPoly::linear_minus(rat(1, 2)).mul(&RatPoly::linear_minus(rat(-1, 3)));
        assert!(all_roots_inside_unit_circle(&p).unwrap());
    }

    #[test]
    fn roots_at_zero_are_inside() {
        // x^3
        assert!(all_roots_inside_unit_circle(&poly(&[(0, 1), (0, 1), (0, 1), (1, 1)])).unwrap());
        // x^2 (x - 2)
        assert!(!all_roots_inside_unit_circle(&poly(&[(0, 1), (0, 1), (-2, 1), (1, 1)])).unwrap());
    }

    #[test]
    fn constants_have_no_roots() {
        assert!(all_roots_inside_unit_circle(&poly(&[(7, 3)])).unwrap());
        assert!(all_roots_inside_unit_circle(&RatPoly::one()).unwrap());
        assert!(all_roots_inside_unit_circle(&RatPoly::zero()).is_err());
    }

    #[test]
    fn multiplicative_over_products() {
        let inside = poly(&[(-1, 2), (1, 1)]);
        let outside = poly(&[(-2, 1), (1, 1)]);
        let prod = inside.mul(&outside);
        assert!(!all_roots_inside_unit_circle(&prod).unwrap());
        let both = inside.mul(&poly(&[(1, 3), (1, 1)]));
        assert!(all_roots_inside_unit_circle(&both).unwrap());
    }
}
