//! Sublattices of Z^n, kept in row Hermite normal form so that equality of
//! lattices is equality of representations.
//!
//! Conventions: basis vectors are rows, maps act on the right (`v * A`).
//! The HNF here has positive pivots, entries above a pivot reduced into
//! `[0, pivot)`, and pivot columns strictly increasing. The zero lattice is
//! the empty basis. Rationals enter only through images and preimages under
//! rational matrices; the lattices themselves are integral.

#![allow(clippy::needless_range_loop)]

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{
    common_denominator, int, monic_integral_part, rat_int, ArithError, Int, IntMatrix, Rat,
    RatMatrix, RatPoly,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatticeError {
    /// Two lattices that had to share an ambient dimension did not.
    AmbientMismatch { left: usize, right: usize },
    /// A lattice expected to contain another did not.
    NotSublattice,
    /// An image or preimage needed integral data and got fractions.
    NotIntegral(String),
    Arith(ArithError),
}

impl From<ArithError> for LatticeError {
    fn from(e: ArithError) -> Self {
        LatticeError::Arith(e)
    }
}

impl core::fmt::Display for LatticeError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            LatticeError::AmbientMismatch { left, right } => {
                write!(f, "ambient dimensions differ: {left} vs {right}")
            }
            LatticeError::NotSublattice => write!(f, "not a sublattice"),
            LatticeError::NotIntegral(w) => write!(f, "not integral: {w}"),
            LatticeError::Arith(e) => write!(f, "{e}"),
        }
    }
}

/// Index of a sublattice, which is infinite exactly when the rank drops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IndexResult {
    Finite(Int),
    Infinite,
}

impl IndexResult {
    pub fn finite(&self) -> Option<&Int> {
        match self {
            IndexResult::Finite(v) => Some(v),
            IndexResult::Infinite => None,
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, IndexResult::Finite(v) if v.is_one())
    }
}

impl core::fmt::Display for IndexResult {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            IndexResult::Finite(v) => write!(f, "{v}"),
            IndexResult::Infinite => write!(f, "infinite"),
        }
    }
}

/// Row HNF of `m`, together with a unimodular `u` such that `u * m` equals
/// the HNF padded with zero rows, and the rank.
pub fn hnf_with_transform(m: &IntMatrix) -> (IntMatrix, IntMatrix, usize) {
    let rows = m.rows();
    let cols = m.cols();
    let mut h = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut rank = 0usize;

    let row_sub = |h: &mut IntMatrix, u: &mut IntMatrix, dst: usize, src: usize, q: &Int| {
        if q.is_zero() {
            return;
        }
        for j in 0..h.cols() {
            let v = h.at(dst, j) - &(q * h.at(src, j));
            *h.at_mut(dst, j) = v;
        }
        for j in 0..u.cols() {
            let v = u.at(dst, j) - &(q * u.at(src, j));
            *u.at_mut(dst, j) = v;
        }
    };
    let row_swap = |h: &mut IntMatrix, u: &mut IntMatrix, a: usize, b: usize| {
        if a == b {
            return;
        }
        for j in 0..h.cols() {
            let tmp = h.at(a, j).clone();
            *h.at_mut(a, j) = h.at(b, j).clone();
            *h.at_mut(b, j) = tmp;
        }
        for j in 0..u.cols() {
            let tmp = u.at(a, j).clone();
            *u.at_mut(a, j) = u.at(b, j).clone();
            *u.at_mut(b, j) = tmp;
        }
    };
    let row_neg = |h: &mut IntMatrix, u: &mut IntMatrix, r: usize| {
        for j in 0..h.cols() {
            let v = -h.at(r, j).clone();
            *h.at_mut(r, j) = v;
        }
        for j in 0..u.cols() {
            let v = -u.at(r, j).clone();
            *u.at_mut(r, j) = v;
        }
    };

    for col in 0..cols {
        if rank == rows {
            break;
        }
        // Euclid on the column entries at and below `rank`.
        loop {
            let mut best: Option<(usize, Int)> = None;
            for r in rank..rows {
                let v = h.at(r, col);
                if v.is_zero() {
                    continue;
                }
                let a = v.abs();
                if best.as_ref().is_none_or(|(_, b)| &a < b) {
                    best = Some((r, a));
                }
            }
            let Some((pr, _)) = best else {
                break;
            };
            row_swap(&mut h, &mut u, rank, pr);
            let pivot = h.at(rank, col).clone();
            let mut clean = true;
            for r in rank + 1..rows {
                if h.at(r, col).is_zero() {
                    continue;
                }
                let q = h.at(r, col).div_floor(&pivot);
                row_sub(&mut h, &mut u, r, rank, &q);
                if !h.at(r, col).is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if h.at(rank, col).is_zero() {
            continue;
        }
        if h.at(rank, col).is_negative() {
            row_neg(&mut h, &mut u, rank);
        }
        let pivot = h.at(rank, col).clone();
        for r in 0..rank {
            let q = h.at(r, col).div_floor(&pivot);
            row_sub(&mut h, &mut u, r, rank, &q);
        }
        rank += 1;
    }
    (h, u, rank)
}

/// Row HNF with zero rows dropped.
pub fn hnf(m: &IntMatrix) -> IntMatrix {
    let (h, _, rank) = hnf_with_transform(m);
    IntMatrix::from_rows(m.cols(), &h.row_vecs()[..rank])
}

/// Smith normal form data: `u * m * v = d` with `u`, `v` unimodular and the
/// diagonal of `d` a divisibility chain of non-negative invariant factors.
/// `vinv` is maintained alongside so callers can read off bases.
pub struct Snf {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub vinv: IntMatrix,
    pub rank: usize,
}

pub fn snf(m: &IntMatrix) -> Snf {
    let rows = m.rows();
    let cols = m.cols();
    let mut d = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let mut vinv = IntMatrix::identity(cols);

    fn row_sub(d: &mut IntMatrix, u: &mut IntMatrix, dst: usize, src: usize, q: &Int) {
        if q.is_zero() {
            return;
        }
        for j in 0..d.cols() {
            let val = d.at(dst, j) - &(q * d.at(src, j));
            *d.at_mut(dst, j) = val;
        }
        for j in 0..u.cols() {
            let val = u.at(dst, j) - &(q * u.at(src, j));
            *u.at_mut(dst, j) = val;
        }
    }
    fn col_sub(d: &mut IntMatrix, v: &mut IntMatrix, vinv: &mut IntMatrix, dst: usize, src: usize, q: &Int) {
        // col_dst -= q * col_src; vinv row_src += q * row_dst.
        if q.is_zero() {
            return;
        }
        for i in 0..d.rows() {
            let val = d.at(i, dst) - &(q * d.at(i, src));
            *d.at_mut(i, dst) = val;
        }
        for i in 0..v.rows() {
            let val = v.at(i, dst) - &(q * v.at(i, src));
            *v.at_mut(i, dst) = val;
        }
        for j in 0..vinv.cols() {
            let val = vinv.at(src, j) + &(q * vinv.at(dst, j));
            *vinv.at_mut(src, j) = val;
        }
    }
    fn row_swap(d: &mut IntMatrix, u: &mut IntMatrix, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..d.cols() {
            let tmp = d.at(a, j).clone();
            *d.at_mut(a, j) = d.at(b, j).clone();
            *d.at_mut(b, j) = tmp;
        }
        for j in 0..u.cols() {
            let tmp = u.at(a, j).clone();
            *u.at_mut(a, j) = u.at(b, j).clone();
            *u.at_mut(b, j) = tmp;
        }
    }
    fn col_swap(d: &mut IntMatrix, v: &mut IntMatrix, vinv: &mut IntMatrix, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..d.rows() {
            let tmp = d.at(i, a).clone();
            *d.at_mut(i, a) = d.at(i, b).clone();
            *d.at_mut(i, b) = tmp;
        }
        for i in 0..v.rows() {
            let tmp = v.at(i, a).clone();
            *v.at_mut(i, a) = v.at(i, b).clone();
            *v.at_mut(i, b) = tmp;
        }
        for j in 0..vinv.cols() {
            let tmp = vinv.at(a, j).clone();
            *vinv.at_mut(a, j) = vinv.at(b, j).clone();
            *vinv.at_mut(b, j) = tmp;
        }
    }
    fn row_neg(d: &mut IntMatrix, u: &mut IntMatrix, r: usize) {
        for j in 0..d.cols() {
            let val = -d.at(r, j).clone();
            *d.at_mut(r, j) = val;
        }
        for j in 0..u.cols() {
            let val = -u.at(r, j).clone();
            *u.at_mut(r, j) = val;
        }
    }

    let steps = rows.min(cols);
    let mut t = 0usize;
    while t < steps {
        // Find minimal nonzero entry in the trailing block.
        let mut best: Option<(usize, usize, Int)> = None;
        for i in t..rows {
            for j in t..cols {
                let val = d.at(i, j);
                if val.is_zero() {
                    continue;
                }
                let a = val.abs();
                if best.as_ref().is_none_or(|(_, _, b)| &a < b) {
                    best = Some((i, j, a));
                }
            }
        }
        let Some((bi, bj, _)) = best else {
            break;
        };
        row_swap(&mut d, &mut u, t, bi);
        col_swap(&mut d, &mut v, &mut vinv, t, bj);

        // Clear row and column t; restart if a division leaves a remainder
        // smaller than the pivot, which replaces the pivot.
        let mut dirty = true;
        while dirty {
            dirty = false;
            for i in t + 1..rows {
                if d.at(i, t).is_zero() {
                    continue;
                }
                let q = d.at(i, t).div_floor(d.at(t, t));
                row_sub(&mut d, &mut u, i, t, &q);
                if !d.at(i, t).is_zero() {
                    row_swap(&mut d, &mut u, t, i);
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if d.at(t, j).is_zero() {
                    continue;
                }
                let q = d.at(t, j).div_floor(d.at(t, t));
                col_sub(&mut d, &mut v, &mut vinv, j, t, &q);
                if !d.at(t, j).is_zero() {
                    col_swap(&mut d, &mut v, &mut vinv, t, j);
                    dirty = true;
                }
            }
        }
        if d.at(t, t).is_negative() {
            row_neg(&mut d, &mut u, t);
        }
        // Enforce the divisibility chain: fold any non-multiple into row t.
        let pivot = d.at(t, t).clone();
        let mut offender = None;
        'scan: for i in t + 1..rows {
            for j in t + 1..cols {
                if !d.at(i, j).mod_floor(&pivot).is_zero() {
                    offender = Some(i);
                    break 'scan;
                }
            }
        }
        if let Some(i) = offender {
            // Add row i to row t and redo this step.
            let minus_one = -Int::one();
            row_sub(&mut d, &mut u, t, i, &minus_one);
            continue;
        }
        t += 1;
    }
    let rank = (0..steps).take_while(|&i| !d.at(i, i).is_zero()).count();
    Snf { d, u, v, vinv, rank }
}

/// A sublattice of Z^n in canonical (HNF) form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Lattice {
    ambient: usize,
    basis: IntMatrix,
}

impl Lattice {
    pub fn from_matrix(ambient: usize, m: &IntMatrix) -> Self {
        assert_eq!(m.cols(), ambient, "generator width must match ambient");
        Lattice { ambient, basis: hnf(m) }
    }

    pub fn from_rows(ambient: usize, rows: &[Vec<Int>]) -> Self {
        Lattice::from_matrix(ambient, &IntMatrix::from_rows(ambient, rows))
    }

    pub fn from_i64_rows(ambient: usize, rows: &[&[i64]]) -> Self {
        let rows: Vec<Vec<Int>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| int(v)).collect())
            .collect();
        Lattice::from_rows(ambient, &rows)
    }

    pub fn zero(ambient: usize) -> Self {
        Lattice { ambient, basis: IntMatrix::zero(0, ambient) }
    }

    pub fn full(ambient: usize) -> Self {
        Lattice { ambient, basis: IntMatrix::identity(ambient) }
    }

    /// `c * Z^n` scaled copy of the full lattice, or of self.
    pub fn scaled(&self, c: &Int) -> Lattice {
        if c.is_zero() {
            return Lattice::zero(self.ambient);
        }
        let rows: Vec<Vec<Int>> = self
            .basis
            .row_vecs()
            .into_iter()
            .map(|r| r.into_iter().map(|x| x * c).collect())
            .collect();
        Lattice::from_rows(self.ambient, &rows)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn is_zero(&self) -> bool {
        self.rank() == 0
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.ambient
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn basis_rows(&self) -> Vec<Vec<Int>> {
        self.basis.row_vecs()
    }

    /// Pivot column of each basis row.
    fn pivot_cols(&self) -> Vec<usize> {
        (0..self.rank())
            .map(|i| {
                (0..self.ambient)
                    .find(|&j| !self.basis.at(i, j).is_zero())
                    .expect("basis rows are nonzero")
            })
            .collect()
    }

    /// Reduce `v` modulo the lattice. Coordinates outside the column span of
    /// the basis pass through untouched; `v` is a member iff this is zero.
    pub fn canonical_residue(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(v.len(), self.ambient, "vector length must match ambient");
        let mut w: Vec<Int> = v.to_vec();
        for (i, col) in self.pivot_cols().into_iter().enumerate() {
            let pivot = self.basis.at(i, col);
            let q = w[col].div_floor(pivot);
            if q.is_zero() {
                continue;
            }
            for j in col..self.ambient {
                let val = &w[j] - &(&q * self.basis.at(i, j));
                w[j] = val;
            }
        }
        w
    }

    pub fn member(&self, v: &[Int]) -> bool {
        self.canonical_residue(v).iter().all(|c| c.is_zero())
    }

    /// Coordinates of `v` in the basis rows, or None when `v` is not a member.
    pub fn coordinates(&self, v: &[Int]) -> Option<Vec<Int>> {
        assert_eq!(v.len(), self.ambient, "vector length must match ambient");
        let mut w: Vec<Int> = v.to_vec();
        let mut coords = Vec::with_capacity(self.rank());
        for (i, col) in self.pivot_cols().into_iter().enumerate() {
            let pivot = self.basis.at(i, col);
            let (q, r) = w[col].div_rem(pivot);
            if !r.is_zero() {
                return None;
            }
            if !q.is_zero() {
                for j in col..self.ambient {
                    let val = &w[j] - &(&q * self.basis.at(i, j));
                    w[j] = val;
                }
            }
            coords.push(q);
        }
        if w.iter().all(|c| c.is_zero()) {
            Some(coords)
        } else {
            None
        }
    }

    pub fn contains(&self, other: &Lattice) -> bool {
        debug_assert_eq!(self.ambient, other.ambient);
        (0..other.rank()).all(|i| self.member(other.basis.row(i)))
    }

    pub fn sum(&self, other: &Lattice) -> Result<Lattice, LatticeError> {
        self.check_ambient(other)?;
        let mut rows = self.basis_rows();
        rows.extend(other.basis_rows());
        Ok(Lattice::from_rows(self.ambient, &rows))
    }

    pub fn intersect(&self, other: &Lattice) -> Result<Lattice, LatticeError> {
        self.check_ambient(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Lattice::zero(self.ambient));
        }
        // Kernel of the stacked matrix [B1; B2]: a kernel row (x, y) gives
        // x*B1 = -y*B2, a point of the intersection.
        let mut rows = self.basis_rows();
        rows.extend(other.basis_rows());
        let stacked = IntMatrix::from_rows(self.ambient, &rows);
        let kernel = int_row_kernel(&stacked);
        let r1 = self.rank();
        let mut out = Vec::new();
        for krow in kernel.basis_rows() {
            let x = &krow[..r1];
            let mut v = vec![Int::zero(); self.ambient];
            for (i, c) in x.iter().enumerate() {
                for j in 0..self.ambient {
                    let val = &v[j] + &(c * self.basis.at(i, j));
                    v[j] = val;
                }
            }
            out.push(v);
        }
        Ok(Lattice::from_rows(self.ambient, &out))
    }

    /// Index `[self : sub]`; errors if `sub` is not contained in `self`.
    pub fn index_of_sublattice(&self, sub: &Lattice) -> Result<IndexResult, LatticeError> {
        self.check_ambient(sub)?;
        if !self.contains(sub) {
            return Err(LatticeError::NotSublattice);
        }
        if sub.rank() < self.rank() {
            return Ok(IndexResult::Infinite);
        }
        // Coordinates of sub's basis in self's basis are integral here.
        let big = self.basis.to_rat();
        let mut det_rows: Vec<Vec<Rat>> = Vec::with_capacity(sub.rank());
        for row in sub.basis_rows() {
            let rhs: Vec<Rat> = row.into_iter().map(rat_int).collect();
            let sol = big.solve_row(&rhs).ok_or(LatticeError::NotSublattice)?;
            det_rows.push(sol);
        }
        let c = RatMatrix::from_rows(self.rank(), &det_rows);
        let d = c.det()?;
        debug_assert!(d.is_integer());
        Ok(IndexResult::Finite(d.to_integer().abs()))
    }

    /// Index `[Z^n : self]`.
    pub fn index_in_ambient(&self) -> IndexResult {
        Lattice::full(self.ambient)
            .index_of_sublattice(self)
            .expect("every lattice sits inside the full lattice")
    }

    /// Saturation (isolator in Z^n): all integer points of the rational span.
    pub fn saturate(&self) -> Lattice {
        if self.is_zero() {
            return Lattice::zero(self.ambient);
        }
        let s = snf(&self.basis);
        // basis = u^-1 d vinv, so the span is spanned by the first `rank`
        // rows of vinv; those rows are a basis of the saturation.
        let rows = s.vinv.row_vecs();
        Lattice::from_rows(self.ambient, &rows[..s.rank])
    }

    pub fn is_saturated(&self) -> bool {
        *self == self.saturate()
    }

    /// Image lattice under a rational map with integral values on self.
    pub fn map_image(&self, a: &RatMatrix) -> Result<Lattice, LatticeError> {
        assert_eq!(a.rows(), self.ambient, "map domain mismatch");
        let mut rows = Vec::with_capacity(self.rank());
        for row in self.basis_rows() {
            let rv: Vec<Rat> = row.into_iter().map(rat_int).collect();
            let img = a.apply_row(&rv);
            let mut out = Vec::with_capacity(a.cols());
            for c in img {
                if !c.is_integer() {
                    return Err(LatticeError::NotIntegral(String::from(
                        "image of a basis row under the map",
                    )));
                }
                out.push(c.to_integer());
            }
            rows.push(out);
        }
        Ok(Lattice::from_rows(a.cols(), &rows))
    }

    /// `{ v in Z^m : v * a in self }` for a rational `m x n` map.
    pub fn map_preimage(&self, a: &RatMatrix) -> Lattice {
        assert_eq!(a.cols(), self.ambient, "map codomain mismatch");
        let m = a.rows();
        let mut flat: Vec<Rat> = Vec::new();
        for i in 0..m {
            flat.extend(a.row(i).iter().cloned());
        }
        let d = common_denominator(&flat);
        // v*a in L  iff  v*(d*a) in d*L  iff  exists y: v*(d*a) + y*(d*B) = 0
        // with B the basis; project kernel rows to the v part.
        let mut rows: Vec<Vec<Int>> = Vec::new();
        for i in 0..m {
            let mut r = Vec::with_capacity(self.ambient);
            for j in 0..self.ambient {
                let v = a.at(i, j) * rat_int(d.clone());
                debug_assert!(v.is_integer());
                r.push(v.to_integer());
            }
            rows.push(r);
        }
        for row in self.basis_rows() {
            rows.push(row.into_iter().map(|c| c * &d).collect());
        }
        let stacked = IntMatrix::from_rows(self.ambient, &rows);
        let kernel = int_row_kernel(&stacked);
        let mut out = Vec::new();
        for krow in kernel.basis_rows() {
            out.push(krow[..m].to_vec());
        }
        Lattice::from_rows(m, &out)
    }

    /// True when `self * a` is integral and contained in `self`.
    pub fn is_invariant_under(&self, a: &RatMatrix) -> bool {
        match self.map_image(a) {
            Ok(img) => self.contains(&img),
            Err(_) => false,
        }
    }

    fn check_ambient(&self, other: &Lattice) -> Result<(), LatticeError> {
        if self.ambient != other.ambient {
            return Err(LatticeError::AmbientMismatch {
                left: self.ambient,
                right: other.ambient,
            });
        }
        Ok(())
    }

    /// Enumerate canonical residues modulo a full-rank lattice, in
    /// lexicographic order (leftmost coordinate most significant). `None`
    /// when the rank is deficient (infinitely many residues).
    pub fn residues(&self) -> Option<Vec<Vec<Int>>> {
        if !self.is_full_rank() {
            return None;
        }
        let pivots: Vec<Int> = (0..self.ambient)
            .map(|i| self.basis.at(i, i).clone())
            .collect();
        let mut out = Vec::new();
        let mut cur = vec![Int::zero(); self.ambient];
        loop {
            out.push(cur.clone());
            // Odometer, rightmost digit fastest.
            let mut pos = self.ambient;
            loop {
                if pos == 0 {
                    return Some(out);
                }
                pos -= 1;
                cur[pos] = &cur[pos] + int(1);
                if cur[pos] < pivots[pos] {
                    break;
                }
                cur[pos] = Int::zero();
            }
        }
    }
}

/// Basis of `{ v : v * m = 0 }`, which is automatically saturated.
pub fn int_row_kernel(m: &IntMatrix) -> Lattice {
    let (h, u, rank) = hnf_with_transform(m);
    let _ = h;
    let rows = u.row_vecs();
    Lattice::from_rows(m.rows(), &rows[rank..])
}

/// Saturated lattice of integer points in the row kernel of a rational map.
pub fn rat_row_kernel(a: &RatMatrix) -> Lattice {
    let mut flat: Vec<Rat> = Vec::new();
    for i in 0..a.rows() {
        flat.extend(a.row(i).iter().cloned());
    }
    let d = common_denominator(&flat);
    let mut rows = Vec::with_capacity(a.rows());
    for i in 0..a.rows() {
        let mut r = Vec::with_capacity(a.cols());
        for j in 0..a.cols() {
            let v = a.at(i, j) * rat_int(d.clone());
            debug_assert!(v.is_integer());
            r.push(v.to_integer());
        }
        rows.push(r);
    }
    int_row_kernel(&IntMatrix::from_rows(a.cols(), &rows))
}

/// Evaluate a rational polynomial at a square rational matrix.
pub fn poly_at_matrix(p: &RatPoly, a: &RatMatrix) -> RatMatrix {
    assert!(a.is_square());
    let n = a.rows();
    let mut acc = RatMatrix::zero(n, n);
    for c in p.coeffs().iter().rev() {
        acc = acc.mul(a);
        for i in 0..n {
            let v = acc.at(i, i) + c;
            *acc.at_mut(i, i) = v;
        }
    }
    acc
}

/// Largest sublattice `K` of `h` with `K * a` contained in `K`.
///
/// Requires `h * a` integral. The computation first cuts down to the kernel
/// of `g(a)` where `g` is the largest monic integral divisor of the
/// characteristic polynomial (any invariant lattice must live there, by
/// Cayley-Hamilton applied to the restriction), then runs the descending
/// chain `L ∩ preimage(L)` to its fixed point. The chain terminates because
/// the kernel subspace carries a full-rank invariant lattice commensurable
/// with the starting point.
pub fn invariant_core(h: &Lattice, a: &RatMatrix) -> Result<Lattice, LatticeError> {
    let n = h.ambient();
    assert_eq!(a.rows(), n, "map must act on the ambient space of h");
    assert_eq!(a.cols(), n, "map must be square");
    for row in h.basis_rows() {
        let rv: Vec<Rat> = row.into_iter().map(rat_int).collect();
        if a.apply_row(&rv).iter().any(|c| !c.is_integer()) {
            return Err(LatticeError::NotIntegral(String::from(
                "h * a must be integral for the invariant core",
            )));
        }
    }
    let g = monic_integral_part(&a.charpoly()?)?;
    if g.is_one() {
        return Ok(Lattice::zero(n));
    }
    let ga = poly_at_matrix(&g, a);
    let vg = rat_row_kernel(&ga);
    let mut l = h.intersect(&vg)?;
    let mut guard = 0usize;
    loop {
        let next = l.intersect(&l.map_preimage(a))?;
        if next == l {
            return Ok(l);
        }
        l = next;
        guard += 1;
        assert!(guard < 100_000, "invariant core chain failed to stabilize");
    }
}

/// Matrix of the map induced by `a` on the quotient of the ambient space by
/// the span of `k`, valid when that span is invariant under `a`. Returns the
/// quotient matrix together with the unimodular basis matrix whose first
/// `rank(saturate(k))` rows span the subspace.
pub fn quotient_map(a: &RatMatrix, k: &Lattice) -> Result<(RatMatrix, IntMatrix), LatticeError> {
    let n = k.ambient();
    assert_eq!((a.rows(), a.cols()), (n, n));
    let sat = k.saturate();
    let r = sat.rank();
    let s = snf(sat.basis());
    // Rows of vinv form a basis of Z^n whose first r rows span sat(k).
    debug_assert!((0..r).all(|i| s.d.at(i, i).is_one()));
    let p = s.vinv.clone();
    let p_rat = p.to_rat();
    let p_inv = p_rat.inverse()?;
    let m = p_rat.mul(a).mul(&p_inv);
    // Invariance of the span shows up as zeros in the top-right block.
    for i in 0..r {
        for j in r..n {
            if !m.at(i, j).is_zero() {
                return Err(LatticeError::NotIntegral(String::from(
                    "span of k is not invariant under the map",
                )));
            }
        }
    }
    let mut q = RatMatrix::zero(n - r, n - r);
    for i in r..n {
        for j in r..n {
            *q.at_mut(i - r, j - r) = m.at(i, j).clone();
        }
    }
    Ok((q, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn hnf_canonical_examples() {
        let l = Lattice::from_i64_rows(2, &[&[1, 1], &[0, 2]]);
        assert_eq!(l.basis(), &IntMatrix::from_i64(&[&[1, 1], &[0, 2]]));
        // Same lattice from messier generators.
        let l2 = Lattice::from_i64_rows(2, &[&[1, 3], &[2, 2], &[1, 1]]);
        assert_eq!(l, l2);
        let z = Lattice::from_i64_rows(2, &[&[0, 0]]);
        assert!(z.is_zero());
    }

    #[test]
    fn residue_example() {
        let l = Lattice::from_i64_rows(2, &[&[1, 1], &[0, 2]]);
        let r = l.canonical_residue(&[int(1), int(0)]);
        assert_eq!(r, alloc::vec![int(0), int(1)]);
        assert!(!l.member(&[int(1), int(0)]));
        assert!(l.member(&[int(1), int(3)]));
    }

    #[test]
    fn coordinates_invert_the_basis() {
        let l = Lattice::from_i64_rows(2, &[&[1, 1], &[0, 2]]);
        assert_eq!(
            l.coordinates(&[int(3), int(7)]),
            Some(alloc::vec![int(3), int(2)])
        );
        assert_eq!(l.coordinates(&[int(1), int(0)]), None);
        let line = Lattice::from_i64_rows(2, &[&[0, 2]]);
        assert_eq!(line.coordinates(&[int(1), int(2)]), None);
        assert_eq!(line.coordinates(&[int(0), int(-6)]), Some(alloc::vec![int(-3)]));
    }

    #[test]
    fn transform_reconstructs() {
        let m = IntMatrix::from_i64(&[&[4, 2, 8], &[6, 3, 9], &[2, 1, 5]]);
        let (h, u, rank) = hnf_with_transform(&m);
        assert_eq!(u.mul(&m), h);
        assert_eq!(u.det().unwrap().abs(), int(1));
        assert!(rank <= 3);
    }

    #[test]
    fn snf_reconstructs_with_divisibility() {
        let m = IntMatrix::from_i64(&[&[2, 4, 4], &[-6, 6, 12], &[10, 4, 16]]);
        let s = snf(&m);
        assert_eq!(s.u.mul(&m).mul(&s.v), s.d);
        assert_eq!(s.u.det().unwrap().abs(), int(1));
        assert_eq!(s.v.det().unwrap().abs(), int(1));
        assert!(s.v.mul(&s.vinv).is_identity());
        // Divisibility chain.
        for i in 1..s.rank {
            assert!(s.d.at(i, i).mod_floor(s.d.at(i - 1, i - 1)).is_zero());
        }
    }

    #[test]
    fn saturation_removes_finite_index() {
        let l = Lattice::from_i64_rows(2, &[&[2, 4]]);
        assert_eq!(l.saturate(), Lattice::from_i64_rows(2, &[&[1, 2]]));
        assert!(Lattice::full(3).is_saturated());
    }

    #[test]
    fn kernel_is_saturated() {
        let m = IntMatrix::from_i64(&[&[2, 0], &[4, 0], &[0, 0]]);
        let k = int_row_kernel(&m);
        assert_eq!(k.rank(), 2);
        assert!(k.is_saturated());
        // v * m = 0 for kernel rows.
        for row in k.basis_rows() {
            let mut prod = alloc::vec![int(0); m.cols()];
            for (i, c) in row.iter().enumerate() {
                for j in 0..m.cols() {
                    let v = &prod[j] + &(c * m.at(i, j));
                    prod[j] = v;
                }
            }
            assert!(prod.iter().all(|c| c.is_zero()));
        }
    }

    #[test]
    fn index_and_second_isomorphism() {
        let l = Lattice::from_i64_rows(2, &[&[2, 0], &[0, 3]]);
        assert_eq!(l.index_in_ambient(), IndexResult::Finite(int(6)));
        let m = Lattice::from_i64_rows(2, &[&[1, 1], &[0, 4]]);
        let sum = l.sum(&m).unwrap();
        let cap = l.intersect(&m).unwrap();
        let il = l.index_in_ambient().finite().unwrap().clone();
        let im = m.index_in_ambient().finite().unwrap().clone();
        let is = sum.index_in_ambient().finite().unwrap().clone();
        let ic = cap.index_in_ambient().finite().unwrap().clone();
        assert_eq!(il * im, is * ic);
        let thin = Lattice::from_i64_rows(2, &[&[5, 0]]);
        assert_eq!(thin.index_in_ambient(), IndexResult::Infinite);
        assert!(l.index_of_sublattice(&thin).is_err());
    }

    #[test]
    fn preimage_examples() {
        // x -> x/2 on Z: preimage of 2Z is 4Z.
        let two_z = Lattice::from_i64_rows(1, &[&[2]]);
        let half = RatMatrix::new(1, 1, alloc::vec![rat(1, 2)]);
        assert_eq!(two_z.map_preimage(&half), Lattice::from_i64_rows(1, &[&[4]]));
        // Image wants integrality.
        assert!(two_z.map_image(&half).is_ok());
        let odd = Lattice::from_i64_rows(1, &[&[1]]);
        assert!(odd.map_image(&half).is_err());
    }

    #[test]
    fn invariant_core_contraction_is_zero() {
        let h = Lattice::from_i64_rows(1, &[&[2]]);
        let a = RatMatrix::new(1, 1, alloc::vec![rat(1, 2)]);
        let core = invariant_core(&h, &a).unwrap();
        assert!(core.is_zero());
    }

    #[test]
    fn invariant_core_diagonal_example() {
        // diag(1, 1/3) on <(3,0),(0,3)>: core is <(3,0)>.
        let h = Lattice::from_i64_rows(2, &[&[3, 0], &[0, 3]]);
        let a = RatMatrix::new(
            2,
            2,
            alloc::vec![rat(1, 1), rat(0, 1), rat(0, 1), rat(1, 3)],
        );
        let core = invariant_core(&h, &a).unwrap();
        assert_eq!(core, Lattice::from_i64_rows(2, &[&[3, 0]]));
        // Maximality certificate: quotient map has trivial monic part.
        let (q, _) = quotient_map(&a, &core).unwrap();
        let part = monic_integral_part(&q.charpoly().unwrap()).unwrap();
        assert!(part.is_one());
    }

    #[test]
    fn residue_enumeration_lex() {
        let l = Lattice::from_i64_rows(2, &[&[2, 1], &[0, 2]]);
        let rs = l.residues().unwrap();
        assert_eq!(rs.len(), 4);
        assert_eq!(rs[0], alloc::vec![int(0), int(0)]);
        assert_eq!(rs[1], alloc::vec![int(0), int(1)]);
        assert_eq!(rs[2], alloc::vec![int(1), int(0)]);
        assert_eq!(rs[3], alloc::vec![int(1), int(1)]);
        for r in &rs {
            assert_eq!(&l.canonical_residue(r), r);
        }
        assert!(Lattice::from_i64_rows(2, &[&[1, 0]]).residues().is_none());
    }
}
