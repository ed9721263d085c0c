//! Dense matrices over a finite field with exact Gaussian elimination.
//!
//! Pivoting always takes the first nonzero entry of a column, so every
//! reduction is deterministic.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

/// Rank of the row-major `rows × cols` matrix stored in `buf`, destroying it.
///
/// This is the hot path of every enumeration; it allocates nothing.
pub fn rank_in_place(field: &Field, buf: &mut [Elem], rows: usize, cols: usize) -> usize {
    let q = field.order();
    let add = field.add_table();
    let mul = field.mul_table();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&r| buf[r * cols + c] != 0) else {
            continue;
        };
        if piv != rank {
            for j in c..cols {
                buf.swap(piv * cols + j, rank * cols + j);
            }
        }
        let inv = field.inv_nz(buf[rank * cols + c]);
        for r in rank + 1..rows {
            let lead = buf[r * cols + c];
            if lead == 0 {
                continue;
            }
            let factor = field.neg(mul[lead as usize * q + inv as usize]) as usize * q;
            for j in c..cols {
                let pv = buf[rank * cols + j] as usize;
                let cur = buf[r * cols + j] as usize;
                buf[r * cols + j] = add[cur * q + mul[factor + pv] as usize];
            }
        }
        rank += 1;
    }
    rank
}

/// Result of reducing a matrix to reduced row-echelon form.
#[derive(Clone, Debug)]
pub struct Rref {
    pub reduced: Matrix,
    /// Invertible matrix `T` with `T · original = reduced`.
    pub transform: Matrix,
    pub pivots: Vec<usize>,
}

impl Matrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Self {
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// `J_r`: the identity on the first `r` coordinates, zero elsewhere.
    pub fn j_r(field: &Field, rows: usize, cols: usize, r: usize) -> Self {
        let mut m = Self::zeros(field, rows, cols);
        for i in 0..r.min(rows).min(cols) {
            m.data[i * cols + i] = 1;
        }
        m
    }

    /// The elementary matrix `E_ij` (0-based).
    pub fn unit(field: &Field, rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(field, rows, cols);
        m.data[i * cols + j] = 1;
        m
    }

    pub fn from_vec(field: &Field, rows: usize, cols: usize, data: Vec<Elem>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::usage(format!(
                "{} entries given for a {rows}×{cols} matrix",
                data.len()
            )));
        }
        if let Some(&bad) = data.iter().find(|&&e| !field.is_valid(e as u64)) {
            return Err(Error::usage(format!("encoding {bad} is not an element of {field}")));
        }
        Ok(Matrix {
            field: field.clone(),
            rows,
            cols,
            data,
        })
    }

    /// Builds a matrix from nested rows. Panics on ragged or invalid input;
    /// meant for literals in tests and constructors.
    pub fn from_rows(field: &Field, rows: &[&[Elem]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let data = rows.concat();
        Self::from_vec(field, rows.len(), cols, data).expect("valid matrix literal")
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[Elem] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Elem> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Elem> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&e| e == 0)
    }

    fn same_shape(&self, other: &Matrix, op: &str) -> Result<()> {
        if self.field != other.field {
            return Err(Error::usage(format!("{op}: operands over different fields")));
        }
        if self.shape() != other.shape() {
            return Err(Error::usage(format!(
                "{op}: shape {:?} vs {:?}",
                self.shape(),
                other.shape()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.same_shape(other, "add")?;
        let f = &self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(Matrix { data, ..self.clone() })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.same_shape(other, "sub")?;
        let f = &self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.sub(a, b)).collect();
        Ok(Matrix { data, ..self.clone() })
    }

    /// `self + c · other`, shapes assumed equal.
    pub(crate) fn add_scaled_mut(&mut self, c: Elem, other: &Matrix) {
        debug_assert_eq!(self.shape(), other.shape());
        if c == 0 {
            return;
        }
        let f = &self.field;
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = f.add(*a, f.mul(c, b));
        }
    }

    pub fn scale(&self, c: Elem) -> Matrix {
        let f = &self.field;
        Matrix {
            data: self.data.iter().map(|&a| f.mul(c, a)).collect(),
            ..self.clone()
        }
    }

    pub fn neg(&self) -> Matrix {
        self.scale(self.field.neg(1))
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.field != other.field {
            return Err(Error::usage("mul: operands over different fields"));
        }
        if self.cols != other.rows {
            return Err(Error::usage(format!(
                "mul: {:?} · {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let f = &self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out.get(i, j), f.mul(a, other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Elem]) -> Vec<Elem> {
        assert_eq!(v.len(), self.cols);
        let f = &self.field;
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn pow(&self, e: u32) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::usage("pow of a non-square matrix"));
        }
        let mut acc = Matrix::identity(&self.field, self.rows);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// The sub-block of rows `r0..r1` and columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Matrix {
        let mut b = Matrix::zeros(&self.field, r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                b.set(i - r0, j - c0, self.get(i, j));
            }
        }
        b
    }

    /// Overwrites the block whose top-left corner is `(r0, c0)` with `b`.
    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Matrix) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self.set(r0 + i, c0 + j, b.get(i, j));
            }
        }
    }

    /// Block-diagonal matrix with the given square or rectangular blocks.
    pub fn block_diag(field: &Field, blocks: &[&Matrix]) -> Matrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Matrix::zeros(field, rows, cols);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            m.set_block(r, c, b);
            r += b.rows;
            c += b.cols;
        }
        m
    }

    pub fn rank(&self) -> usize {
        let mut buf = self.data.clone();
        rank_in_place(&self.field, &mut buf, self.rows, self.cols)
    }

    /// Reduced row-echelon form together with the row operations applied.
    pub fn rref(&self) -> Rref {
        let f = &self.field;
        let mut m = self.clone();
        let mut t = Matrix::identity(f, self.rows);
        let mut pivots = Vec::new();
        let mut row = 0;
        for c in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(piv) = (row..self.rows).find(|&r| m.get(r, c) != 0) else {
                continue;
            };
            m.swap_rows(piv, row);
            t.swap_rows(piv, row);
            let inv = f.inv_nz(m.get(row, c));
            m.scale_row(row, inv);
            t.scale_row(row, inv);
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let lead = m.get(r, c);
                if lead != 0 {
                    let factor = f.neg(lead);
                    m.add_row_multiple(r, row, factor);
                    t.add_row_multiple(r, row, factor);
                }
            }
            pivots.push(c);
            row += 1;
        }
        Rref {
            reduced: m,
            transform: t,
            pivots,
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn scale_row(&mut self, r: usize, c: Elem) {
        for j in 0..self.cols {
            let v = self.field.mul(c, self.get(r, j));
            self.set(r, j, v);
        }
    }

    /// row `dst` += `c` · row `src`
    fn add_row_multiple(&mut self, dst: usize, src: usize, c: Elem) {
        for j in 0..self.cols {
            let v = self.field.add(self.get(dst, j), self.field.mul(c, self.get(src, j)));
            self.set(dst, j, v);
        }
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::usage("inverse of a non-square matrix"));
        }
        let r = self.rref();
        if r.pivots.len() != self.rows {
            return Err(Error::domain("matrix is singular"));
        }
        Ok(r.transform)
    }

    /// Invertible `(P, Q)` with `P · self · Q = J_rank`.
    pub fn rank_decomposition(&self) -> (Matrix, Matrix) {
        // P·M = R is reduced echelon; the rows of R are independent, so the
        // reduced form of R^T is J_r^T and Q1·R^T = J_r^T gives R·Q1^T = J_r.
        let row_pass = self.rref();
        let col_pass = row_pass.reduced.transpose().rref();
        (row_pass.transform, col_pass.transform.transpose())
    }

    /// Basis of the right null space `{x : self · x = 0}`, canonical order.
    pub fn kernel(&self) -> Vec<Vec<Elem>> {
        let f = &self.field;
        let r = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !r.pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![0; self.cols];
                v[fc] = 1;
                for (row, &pc) in r.pivots.iter().enumerate() {
                    v[pc] = f.neg(r.reduced.get(row, fc));
                }
                v
            })
            .collect()
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.field)?;
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for (j, e) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{e}")?;
            }
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gf(q: u32) -> Field {
        Field::with_order(q).unwrap()
    }

    fn random(f: &Field, rows: usize, cols: usize, rng: &mut impl Rng) -> Matrix {
        let data = (0..rows * cols).map(|_| rng.gen_range(0..f.order()) as Elem).collect();
        Matrix::from_vec(f, rows, cols, data).unwrap()
    }

    fn random_invertible(f: &Field, n: usize, rng: &mut impl Rng) -> Matrix {
        loop {
            let m = random(f, n, n, rng);
            if m.is_invertible() {
                return m;
            }
        }
    }

    /// Rank by brute force: the largest k with a nonzero k×k minor, via
    /// enumerating nonzero combinations of rows (size of the row space).
    fn rank_oracle(m: &Matrix) -> usize {
        let f = m.field();
        let q = f.order();
        let mut seen = std::collections::HashSet::new();
        let total = q.pow(m.rows() as u32);
        for code in 0..total {
            let mut c = code;
            let mut v = vec![0; m.cols()];
            for i in 0..m.rows() {
                let coef = (c % q) as Elem;
                c /= q;
                for (j, slot) in v.iter_mut().enumerate() {
                    *slot = f.add(*slot, f.mul(coef, m.get(i, j)));
                }
            }
            seen.insert(v);
        }
        // |row space| = q^rank
        let mut rank = 0;
        while q.pow(rank as u32) < seen.len() {
            rank += 1;
        }
        rank
    }

    #[test]
    fn rank_examples() {
        let f3 = gf(3);
        assert_eq!(Matrix::j_r(&f3, 3, 2, 2).rank(), 2);
        assert_eq!(Matrix::zeros(&f3, 2, 3).rank(), 0);
        let f4 = gf(4);
        let m = Matrix::from_rows(&f4, &[&[1, 2], &[2, 3]]);
        assert_eq!(m.rank(), 1);
        assert_eq!(rank_oracle(&m), 1);
    }

    #[test]
    fn rank_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for q in [2, 3, 4, 5] {
            let f = gf(q);
            for _ in 0..60 {
                let (r, c) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
                let m = random(&f, r, c, &mut rng);
                assert_eq!(m.rank(), rank_oracle(&m), "{m:?}");
            }
        }
    }

    #[test]
    fn rank_invariant_under_equivalence() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for q in [2, 3, 4, 5] {
            let f = gf(q);
            for _ in 0..100 {
                let (n, p) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
                let m = random(&f, n, p, &mut rng);
                let a = random_invertible(&f, n, &mut rng);
                let b = random_invertible(&f, p, &mut rng);
                assert_eq!(a.mul(&m).unwrap().mul(&b).unwrap().rank(), m.rank());
            }
        }
    }

    #[test]
    fn rank_decomposition_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for q in [2, 3, 4, 5] {
            let f = gf(q);
            for _ in 0..1000 {
                let (n, p) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
                let m = random(&f, n, p, &mut rng);
                let (pm, qm) = m.rank_decomposition();
                assert!(pm.is_invertible() && qm.is_invertible());
                let prod = pm.mul(&m).unwrap().mul(&qm).unwrap();
                assert_eq!(prod, Matrix::j_r(&f, n, p, m.rank()));
            }
        }
        let f3 = gf(3);
        let m = Matrix::from_rows(&f3, &[&[0, 1], &[0, 0]]);
        let (pm, qm) = m.rank_decomposition();
        assert_eq!(
            pm.mul(&m).unwrap().mul(&qm).unwrap(),
            Matrix::from_rows(&f3, &[&[1, 0], &[0, 0]])
        );
    }

    #[test]
    fn inverse_and_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = gf(5);
        for _ in 0..50 {
            let m = random_invertible(&f, 3, &mut rng);
            assert_eq!(m.mul(&m.inverse().unwrap()).unwrap(), Matrix::identity(&f, 3));
            let s = random(&f, 2, 4, &mut rng);
            let ker = s.kernel();
            assert_eq!(ker.len(), 4 - s.rank());
            for v in ker {
                assert!(s.mul_vec(&v).iter().all(|&e| e == 0));
            }
        }
        assert!(Matrix::zeros(&f, 2, 2).inverse().is_err());
    }
}
