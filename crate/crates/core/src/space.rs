//! Affine subspaces of `n × p` matrices: a base point plus a translation
//! space, stored as a canonical subspace of F^{np} (row-major flattening).

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::matrix::Matrix;
use crate::subspace::VectorSubspace;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AffineMatrixSpace {
    rows: usize,
    cols: usize,
    base: Matrix,
    directions: VectorSubspace,
}

/// An equivalence `M ↦ P · M · Q` with `P`, `Q` invertible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceWitness {
    pub p: Matrix,
    pub q: Matrix,
}

impl EquivalenceWitness {
    pub fn new(p: Matrix, q: Matrix) -> Result<Self> {
        if !p.is_invertible() || !q.is_invertible() {
            return Err(Error::usage("equivalence witness must be invertible"));
        }
        Ok(EquivalenceWitness { p, q })
    }

    pub fn identity(field: &Field, rows: usize, cols: usize) -> Self {
        EquivalenceWitness {
            p: Matrix::identity(field, rows),
            q: Matrix::identity(field, cols),
        }
    }

    /// The witness of applying `self` first, then `next`.
    pub fn then(&self, next: &EquivalenceWitness) -> Result<Self> {
        Ok(EquivalenceWitness {
            p: next.p.mul(&self.p)?,
            q: self.q.mul(&next.q)?,
        })
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(EquivalenceWitness {
            p: self.p.inverse()?,
            q: self.q.inverse()?,
        })
    }

    pub fn apply(&self, m: &Matrix) -> Result<Matrix> {
        self.p.mul(m)?.mul(&self.q)
    }
}

impl AffineMatrixSpace {
    /// `base + span(basis)`; the basis is re-reduced, so dependent input
    /// collapses to its span.
    pub fn new(base: Matrix, basis: &[Matrix]) -> Result<Self> {
        let (rows, cols) = base.shape();
        let mut dirs = VectorSubspace::zero(base.field(), rows * cols);
        for b in basis {
            if b.shape() != (rows, cols) || b.field() != base.field() {
                return Err(Error::usage(format!(
                    "basis matrix of shape {:?} for a space of {rows}×{cols} matrices",
                    b.shape()
                )));
            }
            dirs.insert(b.as_slice())?;
        }
        Ok(AffineMatrixSpace {
            rows,
            cols,
            base,
            directions: dirs,
        })
    }

    pub fn from_parts(base: Matrix, directions: VectorSubspace) -> Result<Self> {
        let (rows, cols) = base.shape();
        if directions.ambient_dim() != rows * cols || directions.field() != base.field() {
            return Err(Error::usage("translation space does not match the base shape"));
        }
        Ok(AffineMatrixSpace {
            rows,
            cols,
            base,
            directions,
        })
    }

    /// The singleton `{m}`.
    pub fn point(m: Matrix) -> Self {
        let dirs = VectorSubspace::zero(m.field(), m.rows() * m.cols());
        AffineMatrixSpace {
            rows: m.rows(),
            cols: m.cols(),
            base: m,
            directions: dirs,
        }
    }

    pub fn field(&self) -> &Field {
        self.base.field()
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

    pub fn dim(&self) -> usize {
        self.directions.dim()
    }

    pub fn base(&self) -> &Matrix {
        &self.base
    }

    pub fn directions(&self) -> &VectorSubspace {
        &self.directions
    }

    /// Canonical basis of the translation space as matrices.
    pub fn basis(&self) -> Vec<Matrix> {
        self.directions
            .basis()
            .iter()
            .map(|v| Matrix::from_vec(self.field(), self.rows, self.cols, v.clone()).unwrap())
            .collect()
    }

    /// Same set, different distinguished point. `base` must lie in the space.
    pub fn rebased(&self, base: Matrix) -> Result<Self> {
        if !self.contains(&base)? {
            return Err(Error::usage("new base point is not in the space"));
        }
        Ok(AffineMatrixSpace {
            base,
            ..self.clone()
        })
    }

    /// Base point reduced against the translation basis: a canonical point.
    pub fn canonical_base(&self) -> Matrix {
        let v = self.directions.residual(self.base.as_slice());
        Matrix::from_vec(self.field(), self.rows, self.cols, v).unwrap()
    }

    /// Number of elements, `q^dim`, if it fits.
    pub fn cardinality(&self) -> u128 {
        (self.field().order() as u128)
            .checked_pow(self.dim() as u32)
            .unwrap_or(u128::MAX)
    }

    pub fn contains(&self, m: &Matrix) -> Result<bool> {
        if m.shape() != self.shape() || m.field() != self.field() {
            return Err(Error::usage("contains: shape mismatch"));
        }
        let d = m.sub(&self.base)?;
        self.directions.contains(d.as_slice())
    }

    /// Set equality: same translation space and base in the other space.
    pub fn same_set(&self, other: &AffineMatrixSpace) -> bool {
        self.shape() == other.shape()
            && self.field() == other.field()
            && self.directions == other.directions
            && other.contains(&self.base).unwrap_or(false)
    }

    /// The element with the `index`-th coefficient tuple, tuples ordered
    /// lexicographically with the first coefficient most significant.
    pub fn element(&self, index: u128) -> Matrix {
        let mut out = self.base.as_slice().to_vec();
        self.element_into(index, &mut out);
        Matrix::from_vec(self.field(), self.rows, self.cols, out).unwrap()
    }

    /// Writes element `index` into `out` (length `rows·cols`).
    pub(crate) fn element_into(&self, index: u128, out: &mut [Elem]) {
        let f = self.field();
        let q = f.order() as u128;
        out.copy_from_slice(self.base.as_slice());
        let mut idx = index;
        for v in self.directions.basis().iter().rev() {
            let c = (idx % q) as Elem;
            idx /= q;
            if c != 0 {
                for (x, &b) in out.iter_mut().zip(v) {
                    *x = f.add(*x, f.mul(c, b));
                }
            }
        }
    }

    /// Every element exactly once, in coefficient-lexicographic order.
    pub fn enumerate(&self, cap: u64) -> Result<impl Iterator<Item = Matrix> + '_> {
        let count = self.cardinality();
        Error::check_cap("space enumeration", count, cap)?;
        Ok((0..count).map(move |i| self.element(i)))
    }

    /// `P · S · Q`.
    pub fn transform(&self, w: &EquivalenceWitness) -> Result<Self> {
        if w.p.shape() != (self.rows, self.rows) || w.q.shape() != (self.cols, self.cols) {
            return Err(Error::usage("witness shape does not match the space"));
        }
        if !w.p.is_invertible() || !w.q.is_invertible() {
            return Err(Error::usage("equivalence witness must be invertible"));
        }
        let base = w.apply(&self.base)?;
        let basis = self
            .basis()
            .iter()
            .map(|b| w.apply(b))
            .collect::<Result<Vec<_>>>()?;
        AffineMatrixSpace::new(base, &basis)
    }

    pub fn transpose(&self) -> Self {
        let basis: Vec<Matrix> = self.basis().iter().map(Matrix::transpose).collect();
        AffineMatrixSpace::new(self.base.transpose(), &basis).unwrap()
    }

    /// An independent spanning set of the linear span of the set.
    pub fn linear_span(&self) -> Vec<Matrix> {
        let mut s = self.directions.clone();
        s.insert(self.base.as_slice()).unwrap();
        s.basis()
            .iter()
            .map(|v| Matrix::from_vec(self.field(), self.rows, self.cols, v.clone()).unwrap())
            .collect()
    }
}

impl fmt::Debug for AffineMatrixSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} {}×{} space: {} + span{{", self.field(), self.rows, self.cols, self.base)?;
        for (i, b) in self.basis().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for AffineMatrixSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(q: u32) -> Field {
        Field::with_order(q).unwrap()
    }

    fn e(f: &Field, n: usize, i: usize, j: usize) -> Matrix {
        Matrix::unit(f, n, n, i, j)
    }

    fn upper_unitriangular(f: &Field) -> AffineMatrixSpace {
        AffineMatrixSpace::new(Matrix::identity(f, 2), &[e(f, 2, 0, 1)]).unwrap()
    }

    #[test]
    fn reduction_collapses_dependent_input() {
        let f3 = gf(3);
        let s = AffineMatrixSpace::new(
            Matrix::j_r(&f3, 2, 2, 1),
            &[e(&f3, 2, 1, 0), e(&f3, 2, 1, 0).scale(2)],
        )
        .unwrap();
        assert_eq!(s.dim(), 1);
        let zero = AffineMatrixSpace::new(Matrix::zeros(&f3, 2, 2), &[]).unwrap();
        assert_eq!(zero.dim(), 0);
        assert_eq!(zero.enumerate(10).unwrap().count(), 1);
        assert!(AffineMatrixSpace::new(Matrix::zeros(&f3, 2, 2), &[Matrix::zeros(&f3, 2, 3)]).is_err());
    }

    #[test]
    fn enumeration_and_membership() {
        let f5 = gf(5);
        let s = upper_unitriangular(&f5);
        let all: Vec<_> = s.enumerate(100).unwrap().collect();
        assert_eq!(all.len(), 5);
        for m in &all {
            assert!(s.contains(m).unwrap());
            assert_eq!((m.get(0, 0), m.get(1, 0), m.get(1, 1)), (1, 0, 1));
        }
        assert!(s.contains(&Matrix::from_rows(&f5, &[&[1, 4], &[0, 1]])).unwrap());
        let bad = Matrix::identity(&f5, 2).add(&e(&f5, 2, 1, 0)).unwrap();
        assert!(!s.contains(&bad).unwrap());
        assert!(matches!(s.enumerate(4), Err(Error::Resource { .. })));
    }

    #[test]
    fn linear_span_sizes() {
        let f3 = gf(3);
        assert!(AffineMatrixSpace::point(Matrix::zeros(&f3, 2, 2)).linear_span().is_empty());
        assert_eq!(upper_unitriangular(&f3).linear_span().len(), 2);
        let s = AffineMatrixSpace::new(Matrix::j_r(&f3, 2, 2, 1), &[e(&f3, 2, 1, 1)]).unwrap();
        assert_eq!(s.linear_span().len(), 2);
    }

    #[test]
    fn transform_identity_and_inverse() {
        let f3 = gf(3);
        let s = upper_unitriangular(&f3);
        let id = EquivalenceWitness::identity(&f3, 2, 2);
        assert!(s.transform(&id).unwrap().same_set(&s));
        let w = EquivalenceWitness::new(
            Matrix::from_rows(&f3, &[&[1, 2], &[1, 0]]),
            Matrix::from_rows(&f3, &[&[0, 1], &[1, 1]]),
        )
        .unwrap();
        let back = s.transform(&w).unwrap().transform(&w.inverse().unwrap()).unwrap();
        assert!(back.same_set(&s));
        let singular = EquivalenceWitness {
            p: Matrix::zeros(&f3, 2, 2),
            q: Matrix::identity(&f3, 2),
        };
        assert!(matches!(s.transform(&singular), Err(Error::Usage(_))));
    }
}
