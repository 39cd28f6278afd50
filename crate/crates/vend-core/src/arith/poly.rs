//! Dense univariate polynomials, exact coefficients, lowest degree first.
//!
//! The canonical form has no trailing zero coefficients; the zero polynomial
//! is the empty coefficient vector. Keeping the constant term at index 0
//! makes `coeff(i)` the coefficient of `x^i` with no off-by-one gymnastics.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use num_traits::{One, Signed, Zero};

use super::{int, rat_int, rat_string, Int, Rat};

/// Polynomial over the rationals.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RatPoly {
    coeffs: Vec<Rat>,
}

/// Polynomial over the integers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct IntPoly {
    coeffs: Vec<Int>,
}

fn trim_rat(mut c: Vec<Rat>) -> Vec<Rat> {
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    c
}

fn trim_int(mut c: Vec<Int>) -> Vec<Int> {
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    c
}

impl RatPoly {
    pub fn new(coeffs: Vec<Rat>) -> Self {
        RatPoly { coeffs: trim_rat(coeffs) }
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        RatPoly { coeffs: vec![Rat::one()] }
    }

    /// `x - c` for a rational constant.
    pub fn linear_minus(c: Rat) -> Self {
        RatPoly::new(vec![-c, Rat::one()])
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree of the zero polynomial is `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| c.is_one())
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn add(&self, other: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + other.coeff(i));
        }
        RatPoly::new(out)
    }

    pub fn sub(&self, other: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) - other.coeff(i));
        }
        RatPoly::new(out)
    }

    pub fn neg(&self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }

    pub fn mul(&self, other: &RatPoly) -> RatPoly {
        if self.is_zero() || other.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        RatPoly::new(out)
    }

    pub fn scale(&self, c: &Rat) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Euclidean division. Panics if `div` is zero.
    pub fn divrem(&self, div: &RatPoly) -> (RatPoly, RatPoly) {
        assert!(!div.is_zero(), "division by zero polynomial");
        let dlead = div.leading().unwrap().clone();
        let ddeg = div.degree().unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() < div.coeffs.len() {
            return (RatPoly::zero(), self.clone());
        }
        let qlen = rem.len() - ddeg;
        let mut q = vec![Rat::zero(); qlen];
        for k in (0..qlen).rev() {
            let c = &rem[k + ddeg] / &dlead;
            if c.is_zero() {
                continue;
            }
            for (j, d) in div.coeffs.iter().enumerate() {
                rem[k + j] = &rem[k + j] - &(&c * d);
            }
            q[k] = c;
        }
        (RatPoly::new(q), RatPoly::new(rem))
    }

    /// True when `div` divides exactly.
    pub fn divides_exactly(&self, div: &RatPoly) -> bool {
        self.divrem(div).1.is_zero()
    }

    pub fn derivative(&self) -> RatPoly {
        if self.coeffs.len() <= 1 {
            return RatPoly::zero();
        }
        let mut out = Vec::with_capacity(self.coeffs.len() - 1);
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            out.push(c * rat_int(int(i as i64)));
        }
        RatPoly::new(out)
    }

    /// Monic gcd via the Euclidean algorithm over Q.
    pub fn gcd(&self, other: &RatPoly) -> RatPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let lead = a.leading().unwrap().clone();
        a.scale(&(Rat::one() / lead))
    }

    /// Clear denominators: returns `(d, f)` with `d > 0` minimal such that
    /// `d * self` has integer coefficients, and `f = d * self` as an `IntPoly`.
    pub fn clear_denominators(&self) -> (Int, IntPoly) {
        let d = super::common_denominator(&self.coeffs);
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let v = c * rat_int(d.clone());
                debug_assert!(v.is_integer());
                v.to_integer()
            })
            .collect();
        (d, IntPoly::new(coeffs))
    }

    /// Pretty form like `x^2 - 1/2*x - 1`, highest degree first.
    pub fn pretty(&self) -> String {
        if self.is_zero() {
            return String::from("0");
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let unit = abs.is_one();
            match (i, unit) {
                (0, _) => out.push_str(&rat_string(&abs)),
                (_, false) => {
                    out.push_str(&rat_string(&abs));
                    out.push('*');
                }
                (_, true) => {}
            }
            match i {
                0 => {}
                1 => out.push('x'),
                _ => out.push_str(&alloc::format!("x^{i}")),
            }
        }
        out
    }
}

impl IntPoly {
    pub fn new(coeffs: Vec<Int>) -> Self {
        IntPoly { coeffs: trim_int(coeffs) }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        IntPoly::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        IntPoly { coeffs: vec![Int::one()] }
    }

    pub fn coeffs(&self) -> &[Int] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Int {
        self.coeffs.get(i).cloned().unwrap_or_else(Int::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Int> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| c.is_one())
    }

    pub fn to_rat(&self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().cloned().map(rat_int).collect())
    }

    pub fn eval(&self, x: &Int) -> Int {
        let mut acc = Int::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![Int::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        IntPoly::new(out)
    }

    pub fn scale(&self, c: &Int) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Content: gcd of coefficients, carrying the sign of the leading one.
    /// Content of zero is zero.
    pub fn content(&self) -> Int {
        use num_integer::Integer;
        let mut g = Int::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
        }
        if self.leading().is_some_and(|l| l.is_negative()) {
            g = -g;
        }
        g
    }

    /// Primitive part; leading coefficient is positive for nonzero input.
    pub fn primitive_part(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let c = self.content();
        IntPoly::new(self.coeffs.iter().map(|a| a / &c).collect())
    }

    pub fn derivative(&self) -> IntPoly {
        if self.coeffs.len() <= 1 {
            return IntPoly::zero();
        }
        let mut out = Vec::with_capacity(self.coeffs.len() - 1);
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            out.push(c * int(i as i64));
        }
        IntPoly::new(out)
    }

    /// Exact division in Z[x]; `None` when `div` does not divide.
    pub fn div_exact(&self, div: &IntPoly) -> Option<IntPoly> {
        if div.is_zero() {
            return None;
        }
        let (q, r) = self.to_rat().divrem(&div.to_rat());
        if !r.is_zero() {
            return None;
        }
        let mut out = Vec::with_capacity(q.coeffs().len());
        for c in q.coeffs() {
            if !c.is_integer() {
                return None;
            }
            out.push(c.to_integer());
        }
        Some(IntPoly::new(out))
    }

    /// Largest coefficient magnitude.
    pub fn height(&self) -> Int {
        let mut h = Int::zero();
        for c in &self.coeffs {
            let a = c.abs();
            if a > h {
                h = a;
            }
        }
        h
    }

    /// Order by degree first, then coefficient vector from the constant term
    /// up. This is the deterministic order factor lists are sorted in.
    pub fn cmp_deg_lex(&self, other: &IntPoly) -> core::cmp::Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }

    pub fn pretty(&self) -> String {
        self.to_rat().pretty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn p(cs: &[i64]) -> RatPoly {
        RatPoly::new(cs.iter().map(|&c| rat(c, 1)).collect())
    }

    #[test]
    fn canonical_form_trims_trailing_zeros() {
        let q = RatPoly::new(alloc::vec![rat(1, 2), rat(0, 1), rat(0, 1)]);
        assert_eq!(q.degree(), Some(0));
        assert!(RatPoly::new(alloc::vec![]).is_zero());
    }

    #[test]
    fn divrem_reconstructs() {
        let a = p(&[-1, 0, 0, 1]); // x^3 - 1
        let b = p(&[-1, 1]); // x - 1
        let (q, r) = a.divrem(&b);
        assert!(r.is_zero());
        assert_eq!(q, p(&[1, 1, 1]));
        assert_eq!(q.mul(&b).add(&r), a);
    }

    #[test]
    fn gcd_is_monic() {
        let a = p(&[-1, 0, 1]); // (x-1)(x+1)
        let b = p(&[1, -2, 1]); // (x-1)^2
        assert_eq!(a.gcd(&b), p(&[-1, 1]));
    }

    #[test]
    fn pretty_matches_handwritten() {
        let q = RatPoly::new(alloc::vec![rat(-1, 1), rat(-1, 2), rat(1, 1)]);
        assert_eq!(q.pretty(), "x^2 - 1/2*x - 1");
        assert_eq!(RatPoly::zero().pretty(), "0");
        assert_eq!(p(&[0, -1]).pretty(), "-x");
    }

    #[test]
    fn clear_denominators_minimal() {
        let q = RatPoly::new(alloc::vec![rat(1, 1), rat(-5, 2), rat(1, 1)]);
        let (d, f) = q.clear_denominators();
        assert_eq!(d, int(2));
        assert_eq!(f, IntPoly::from_i64(&[2, -5, 2]));
    }

    #[test]
    fn int_content_carries_leading_sign() {
        let f = IntPoly::from_i64(&[2, 4, -6]);
        assert_eq!(f.content(), int(-2));
        assert_eq!(f.primitive_part(), IntPoly::from_i64(&[-1, -2, 3]));
    }
}
