//! Dense exact matrices, row major. Vectors are row vectors throughout the
//! crate and maps act on the right, so `v * A` is the image of `v`.

#![allow(clippy::needless_range_loop)]

use alloc::vec;
use alloc::vec::Vec;
use num_traits::{One, Zero};

use super::{int, rat_int, ArithError, Int, Rat, RatPoly};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Rat>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        RatMatrix { rows, cols, data }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMatrix::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Rat::one();
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend(row.iter().map(|&v| rat_int(int(v))));
        }
        RatMatrix::new(r, c, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn from_rows(cols: usize, rows: &[Vec<Rat>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols);
            data.extend(r.iter().cloned());
        }
        RatMatrix::new(rows.len(), cols, data)
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut out = RatMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *out.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        out
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(
            self.cols, other.rows,
            "matrix product shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = RatMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = a * other.at(k, j);
                    *out.at_mut(i, j) = out.at(i, j) + v;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a + b)
            .collect();
        RatMatrix::new(self.rows, self.cols, data)
    }

    pub fn sub(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a - b)
            .collect();
        RatMatrix::new(self.rows, self.cols, data)
    }

    pub fn scale(&self, c: &Rat) -> RatMatrix {
        RatMatrix::new(self.rows, self.cols, self.data.iter().map(|a| a * c).collect())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == RatMatrix::identity(self.rows)
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|c| c.is_integer())
    }

    pub fn to_integral(&self) -> Option<IntMatrix> {
        if !self.is_integral() {
            return None;
        }
        Some(IntMatrix::new(
            self.rows,
            self.cols,
            self.data.iter().map(|c| c.to_integer()).collect(),
        ))
    }

    /// Row vector times matrix.
    pub fn apply_row(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.rows, "row vector length mismatch");
        let mut out = vec![Rat::zero(); self.cols];
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                out[j] = &out[j] + &(c * self.at(i, j));
            }
        }
        out
    }

    /// Determinant by exact Gaussian elimination.
    pub fn det(&self) -> Result<Rat, ArithError> {
        if !self.is_square() {
            return Err(ArithError::NonSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rat::one();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !m.at(r, col).is_zero());
            let Some(p) = pivot else {
                return Ok(Rat::zero());
            };
            if p != col {
                m.swap_rows(p, col);
                det = -det;
            }
            let pv = m.at(col, col).clone();
            det *= &pv;
            for r in col + 1..n {
                let factor = m.at(r, col) / &pv;
                if factor.is_zero() {
                    continue;
                }
                for j in col..n {
                    let v = m.at(r, j) - &(&factor * m.at(col, j));
                    *m.at_mut(r, j) = v;
                }
            }
        }
        Ok(det)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Exact inverse; `Err(Singular)` when it does not exist.
    pub fn inverse(&self) -> Result<RatMatrix, ArithError> {
        if !self.is_square() {
            return Err(ArithError::NonSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = RatMatrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !m.at(r, col).is_zero());
            let Some(p) = pivot else {
                return Err(ArithError::Singular);
            };
            m.swap_rows(p, col);
            inv.swap_rows(p, col);
            let pv = m.at(col, col).clone();
            for j in 0..n {
                *m.at_mut(col, j) = m.at(col, j) / &pv;
                *inv.at_mut(col, j) = inv.at(col, j) / &pv;
            }
            for r in 0..n {
                if r == col || m.at(r, col).is_zero() {
                    continue;
                }
                let factor = m.at(r, col).clone();
                for j in 0..n {
                    let v = m.at(r, j) - &(&factor * m.at(col, j));
                    *m.at_mut(r, j) = v;
                    let w = inv.at(r, j) - &(&factor * inv.at(col, j));
                    *inv.at_mut(r, j) = w;
                }
            }
        }
        Ok(inv)
    }

    /// Integer power; negative exponents require invertibility.
    pub fn pow(&self, e: i64) -> Result<RatMatrix, ArithError> {
        if !self.is_square() {
            return Err(ArithError::NonSquare { rows: self.rows, cols: self.cols });
        }
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = RatMatrix::identity(self.rows);
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&sq);
            }
            k >>= 1;
            if k > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(acc)
    }

    /// Solve `x * self = rhs` for a single row vector; `None` if inconsistent.
    /// `self` need not be square; the solution is not unique when the rows of
    /// `self` are dependent, in which case any solution is returned.
    pub fn solve_row(&self, rhs: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(rhs.len(), self.cols, "rhs length mismatch");
        // Solve self^T y^T = rhs^T by elimination on the transpose.
        let t = self.transpose();
        let n = t.rows; // = self.cols
        let m = t.cols; // = self.rows, number of unknowns
        let mut a = t;
        let mut b: Vec<Rat> = rhs.to_vec();
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut row = 0;
        for col in 0..m {
            let Some(p) = (row..n).find(|&r| !a.at(r, col).is_zero()) else {
                continue;
            };
            a.swap_rows(p, row);
            b.swap(p, row);
            let pv = a.at(row, col).clone();
            for j in 0..m {
                *a.at_mut(row, j) = a.at(row, j) / &pv;
            }
            b[row] = &b[row] / &pv;
            for r in 0..n {
                if r == row || a.at(r, col).is_zero() {
                    continue;
                }
                let factor = a.at(r, col).clone();
                for j in 0..m {
                    let v = a.at(r, j) - &(&factor * a.at(row, j));
                    *a.at_mut(r, j) = v;
                }
                b[r] = &b[r] - &(&factor * &b[row]);
            }
            pivots.push((row, col));
            row += 1;
            if row == n {
                break;
            }
        }
        for r in row..n {
            if !b[r].is_zero() {
                return None;
            }
        }
        let mut x = vec![Rat::zero(); m];
        for (r, c) in pivots {
            x[c] = b[r].clone();
        }
        Some(x)
    }

    /// Characteristic polynomial `det(xI - A)`, computed exactly by
    /// evaluating the determinant at `n + 1` integer points and
    /// interpolating. Result is monic of degree `n`.
    pub fn charpoly(&self) -> Result<RatPoly, ArithError> {
        if !self.is_square() {
            return Err(ArithError::NonSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(RatPoly::one());
        }
        let mut points = Vec::with_capacity(n + 1);
        for t in 0..=n as i64 {
            let mut m = self.scale(&-Rat::one());
            for i in 0..n {
                *m.at_mut(i, i) = m.at(i, i) + rat_int(int(t));
            }
            points.push((rat_int(int(t)), m.det()?));
        }
        let p = lagrange_interpolate(&points);
        debug_assert_eq!(p.degree(), Some(n));
        debug_assert!(p.is_monic());
        Ok(p)
    }
}

/// Unique interpolating polynomial through distinct points.
fn lagrange_interpolate(points: &[(Rat, Rat)]) -> RatPoly {
    let mut acc = RatPoly::zero();
    for (i, (xi, yi)) in points.iter().enumerate() {
        if yi.is_zero() {
            continue;
        }
        let mut term = RatPoly::one();
        let mut denom = Rat::one();
        for (j, (xj, _)) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            term = term.mul(&RatPoly::linear_minus(xj.clone()));
            denom *= xi - xj;
        }
        acc = acc.add(&term.scale(&(yi / &denom)));
    }
    acc
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Int>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        IntMatrix { rows, cols, data }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![Int::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Int::one();
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend(row.iter().map(|&v| int(v)));
        }
        IntMatrix::new(r, c, data)
    }

    pub fn from_rows(cols: usize, rows: &[Vec<Int>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols);
            data.extend(r.iter().cloned());
        }
        IntMatrix::new(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &Int {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Int {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Int>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn to_rat(&self) -> RatMatrix {
        RatMatrix::new(
            self.rows,
            self.cols,
            self.data.iter().cloned().map(rat_int).collect(),
        )
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = IntMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *out.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        out
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = a * other.at(k, j);
                    *out.at_mut(i, j) = out.at(i, j) + v;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a + b)
            .collect();
        IntMatrix::new(self.rows, self.cols, data)
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a - b)
            .collect();
        IntMatrix::new(self.rows, self.cols, data)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == IntMatrix::identity(self.rows)
    }

    pub fn det(&self) -> Result<Int, ArithError> {
        let d = self.to_rat().det()?;
        debug_assert!(d.is_integer());
        Ok(d.to_integer())
    }

    /// Exact integer inverse; requires `det = ±1`.
    pub fn inverse_unimodular(&self) -> Result<IntMatrix, ArithError> {
        let inv = self.to_rat().inverse()?;
        inv.to_integral().ok_or(ArithError::NotIntegral(alloc::string::String::from(
            "inverse of a non-unimodular matrix",
        )))
    }

    /// Integer power; negative exponents require `det = ±1`.
    pub fn pow(&self, e: i64) -> Result<IntMatrix, ArithError> {
        if e >= 0 {
            let mut acc = IntMatrix::identity(self.rows);
            let mut sq = self.clone();
            let mut k = e as u64;
            if !self.is_square() {
                return Err(ArithError::NonSquare { rows: self.rows, cols: self.cols });
            }
            while k > 0 {
                if k & 1 == 1 {
                    acc = acc.mul(&sq);
                }
                k >>= 1;
                if k > 0 {
                    sq = sq.mul(&sq);
                }
            }
            Ok(acc)
        } else {
            self.inverse_unimodular()?.pow(-e)
        }
    }

    /// Row vector times matrix.
    pub fn apply_row(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(v.len(), self.rows, "row vector length mismatch");
        let mut out = vec![Int::zero(); self.cols];
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                out[j] = &out[j] + &(c * self.at(i, j));
            }
        }
        out
    }

    /// Smallest `k >= 0` with `(self - I)^k = 0`, or `None` if `self` is not
    /// unipotent. The bound `k <= n` is a standard nilpotency fact.
    pub fn unipotency_class(&self) -> Option<usize> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let nmat = self.sub(&IntMatrix::identity(n));
        let mut acc = IntMatrix::identity(n);
        for k in 0..=n {
            if acc.is_zero() {
                return Some(k);
            }
            acc = acc.mul(&nmat);
        }
        if acc.is_zero() {
            Some(n)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn charpoly_examples() {
        let a = RatMatrix::new(1, 1, alloc::vec![rat(1, 2)]);
        let p = a.charpoly().unwrap();
        assert_eq!(p, RatPoly::new(alloc::vec![rat(-1, 2), rat(1, 1)]));

        let i3 = RatMatrix::identity(3);
        let p = i3.charpoly().unwrap();
        // (x-1)^3 = x^3 - 3x^2 + 3x - 1
        assert_eq!(
            p,
            RatPoly::new(alloc::vec![rat(-1, 1), rat(3, 1), rat(-3, 1), rat(1, 1)])
        );

        let a = RatMatrix::new(2, 2, alloc::vec![rat(1, 2), rat(1, 1), rat(1, 1), rat(0, 1)]);
        let p = a.charpoly().unwrap();
        // x^2 - x/2 - 1
        assert_eq!(p, RatPoly::new(alloc::vec![rat(-1, 1), rat(-1, 2), rat(1, 1)]));
    }

    /// Second route to the characteristic polynomial, used as an oracle.
    fn charpoly_faddeev(a: &RatMatrix) -> RatPoly {
        let n = a.rows();
        let mut coeffs = alloc::vec![Rat::zero(); n + 1];
        coeffs[n] = Rat::one();
        let mut m = RatMatrix::identity(n);
        for k in 1..=n {
            m = a.mul(&m);
            let mut tr = Rat::zero();
            for i in 0..n {
                tr += m.at(i, i);
            }
            let c = -tr / rat(k as i64, 1);
            coeffs[n - k] = c.clone();
            for i in 0..n {
                *m.at_mut(i, i) = m.at(i, i) + &c;
            }
        }
        RatPoly::new(coeffs)
    }

    #[test]
    fn charpoly_agrees_with_faddeev_leverrier() {
        let mats = [
            RatMatrix::from_i64(&[&[2, 1, 0], &[0, 2, 1], &[1, 0, 3]]),
            RatMatrix::new(
                2,
                2,
                alloc::vec![rat(1, 2), rat(1, 1), rat(1, 1), rat(0, 1)],
            ),
            RatMatrix::from_i64(&[&[0, 0], &[0, 0]]),
        ];
        for a in &mats {
            assert_eq!(a.charpoly().unwrap(), charpoly_faddeev(a));
        }
    }

    #[test]
    fn inverse_and_solve() {
        let a = RatMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).is_identity());
        let sol = a.solve_row(&[rat(3, 1), rat(2, 1)]).unwrap();
        assert_eq!(sol, alloc::vec![rat(1, 1), rat(1, 1)]);
        let singular = RatMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert_eq!(singular.inverse(), Err(ArithError::Singular));
        assert!(singular.solve_row(&[rat(1, 1), rat(2, 1)]).is_some());
        assert!(singular.solve_row(&[rat(1, 1), rat(0, 1)]).is_none());
    }

    #[test]
    fn unipotency_class_detects_unipotent() {
        let x = IntMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        assert_eq!(x.unipotency_class(), Some(2));
        assert_eq!(IntMatrix::identity(3).unipotency_class(), Some(1));
        let y = IntMatrix::from_i64(&[&[2, 0], &[0, 1]]);
        assert_eq!(y.unipotency_class(), None);
    }

    #[test]
    fn negative_powers_of_unimodular() {
        let x = IntMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        let xm2 = x.pow(-2).unwrap();
        assert_eq!(xm2, IntMatrix::from_i64(&[&[1, -2], &[0, 1]]));
        assert!(x.pow(2).unwrap().mul(&xm2).is_identity());
    }
}
