//! Exact scalar arithmetic and the polynomial/matrix layer on top of it.
//!
//! `Int` is an arbitrary precision integer, `Rat` a reduced fraction of two
//! of them. Rationals serialize as `p/q` with the `/q` dropped when the
//! denominator is one; that convention is shared by the CLI config format
//! and the reports.

mod factor;
mod matrix;
mod poly;
mod roots;

pub use factor::{factor_int_poly, monic_integral_part, Factorization, FACTOR_DEGREE_CAP};
pub use matrix::{IntMatrix, RatMatrix};
pub use poly::{IntPoly, RatPoly};
pub use roots::all_roots_inside_unit_circle;

use alloc::string::{String, ToString};
use alloc::vec::Vec;

pub type Int = num_bigint::BigInt;
pub type Rat = num_rational::Ratio<Int>;

/// Errors surfaced by the exact-arithmetic layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArithError {
    /// Operation needs a square matrix.
    NonSquare { rows: usize, cols: usize },
    /// Matrix or vector shapes do not line up.
    DimMismatch { left: (usize, usize), right: (usize, usize) },
    /// A matrix that had to be invertible was not.
    Singular,
    /// Polynomial factorization refuses degrees above this cap.
    DegreeCap { degree: usize, cap: usize },
    /// A value that had to be an integer was a proper fraction.
    NotIntegral(String),
    /// Bad text passed to one of the parsers.
    Parse(String),
    /// The zero polynomial has no well-defined root set.
    ZeroPolynomial,
}

impl core::fmt::Display for ArithError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ArithError::NonSquare { rows, cols } => {
                write!(f, "expected a square matrix, got {rows}x{cols}")
            }
            ArithError::DimMismatch { left, right } => write!(
                f,
                "dimension mismatch: {}x{} vs {}x{}",
                left.0, left.1, right.0, right.1
            ),
            ArithError::Singular => write!(f, "matrix is singular"),
            ArithError::DegreeCap { degree, cap } => {
                write!(f, "refusing to factor degree {degree} (cap is {cap})")
            }
            ArithError::NotIntegral(what) => write!(f, "not integral: {what}"),
            ArithError::Parse(what) => write!(f, "parse error: {what}"),
            ArithError::ZeroPolynomial => write!(f, "zero polynomial"),
        }
    }
}

/// `Int` from a machine integer.
pub fn int(v: i64) -> Int {
    Int::from(v)
}

/// Reduced fraction `p/q`. Panics if `q == 0`, same as `Ratio::new`.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(int(p), int(q))
}

/// Embed an `Int` as a rational.
pub fn rat_int(v: Int) -> Rat {
    Rat::from_integer(v)
}

/// Render a rational as `p/q`, omitting `/q` when the denominator is one.
pub fn rat_string(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        alloc::format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse the `p/q` form accepted by configs. Whitespace is not trimmed.
pub fn parse_rat(s: &str) -> Result<Rat, ArithError> {
    let bad = || ArithError::Parse(alloc::format!("bad rational '{s}'"));
    match s.split_once('/') {
        None => {
            let p: Int = s.parse().map_err(|_| bad())?;
            Ok(rat_int(p))
        }
        Some((ps, qs)) => {
            let p: Int = ps.parse().map_err(|_| bad())?;
            let q: Int = qs.parse().map_err(|_| bad())?;
            if num_traits::Zero::is_zero(&q) {
                return Err(bad());
            }
            Ok(Rat::new(p, q))
        }
    }
}

/// Least common multiple of the denominators of a slice of rationals.
pub fn common_denominator(vals: &[Rat]) -> Int {
    use num_integer::Integer;
    let mut d = int(1);
    for v in vals {
        d = d.lcm(v.denom());
    }
    d
}

/// Exact square root floor for non-negative `Int`.
pub fn isqrt(n: &Int) -> Int {
    use num_traits::Zero;
    assert!(n >= &Int::zero(), "isqrt of negative");
    n.sqrt()
}

/// Lift a slice of integers to rationals.
pub fn vec_rat_from_int(v: &[Int]) -> Vec<Rat> {
    v.iter().cloned().map(rat_int).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rat_strings_drop_unit_denominator() {
        assert_eq!(rat_string(&rat(4, 2)), "2");
        assert_eq!(rat_string(&rat(-3, 6)), "-1/2");
        assert_eq!(rat_string(&rat(0, 5)), "0");
    }

    #[test]
    fn parse_roundtrip() {
        for s in ["7", "-7", "3/4", "-12/5", "0"] {
            let r = parse_rat(s).expect("parses");
            assert_eq!(rat_string(&r), s);
        }
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
        assert!(parse_rat("1/ 2").is_err());
    }
}
