//! Subspaces of F^m held in reduced row-echelon form.
//!
//! The echelon basis is canonical, so two subspaces are equal exactly when
//! their stored bases are equal.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::matrix::Matrix;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VectorSubspace {
    field: Field,
    ambient: usize,
    basis: Vec<Vec<Elem>>,
    pivots: Vec<usize>,
}

/// Number of `d`-dimensional subspaces of F_q^m (the Gaussian binomial).
pub fn gaussian_binomial(q: u64, m: usize, d: usize) -> u128 {
    if d > m {
        return 0;
    }
    let q = q as u128;
    let (mut num, mut den) = (1u128, 1u128);
    for i in 0..d {
        num *= q.pow((m - i) as u32) - 1;
        den *= q.pow((i + 1) as u32) - 1;
        let g = gcd(num, den);
        num /= g;
        den /= g;
    }
    num / den
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl VectorSubspace {
    pub fn zero(field: &Field, ambient: usize) -> Self {
        VectorSubspace {
            field: field.clone(),
            ambient,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: &Field, ambient: usize) -> Self {
        let basis = (0..ambient).map(|i| unit(ambient, i)).collect();
        VectorSubspace {
            field: field.clone(),
            ambient,
            basis,
            pivots: (0..ambient).collect(),
        }
    }

    /// The span of `vectors`, canonicalized.
    pub fn span<V: AsRef<[Elem]>>(field: &Field, ambient: usize, vectors: &[V]) -> Result<Self> {
        let mut s = Self::zero(field, ambient);
        for v in vectors {
            s.insert(v.as_ref())?;
        }
        Ok(s)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Echelon basis rows, pivot positions increasing.
    pub fn basis(&self) -> &[Vec<Elem>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn check_len(&self, v: &[Elem]) -> Result<()> {
        if v.len() != self.ambient {
            return Err(Error::usage(format!(
                "vector of length {} in F^{}",
                v.len(),
                self.ambient
            )));
        }
        Ok(())
    }

    fn check_compatible(&self, other: &VectorSubspace) -> Result<()> {
        if self.field != other.field || self.ambient != other.ambient {
            return Err(Error::usage(format!(
                "ambient mismatch: F^{} vs F^{}",
                self.ambient, other.ambient
            )));
        }
        Ok(())
    }

    /// `v` minus its projection onto the echelon basis along pivot columns.
    pub fn residual(&self, v: &[Elem]) -> Vec<Elem> {
        let f = &self.field;
        let mut v = v.to_vec();
        for (row, &pc) in self.basis.iter().zip(&self.pivots) {
            let c = v[pc];
            if c != 0 {
                let nc = f.neg(c);
                for (x, &b) in v.iter_mut().zip(row) {
                    *x = f.add(*x, f.mul(nc, b));
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[Elem]) -> Result<bool> {
        self.check_len(v)?;
        Ok(self.residual(v).iter().all(|&e| e == 0))
    }

    /// Adds `v` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, v: &[Elem]) -> Result<bool> {
        self.check_len(v)?;
        let f = self.field.clone();
        let mut r = self.residual(v);
        let Some(pc) = r.iter().position(|&e| e != 0) else {
            return Ok(false);
        };
        let inv = f.inv_nz(r[pc]);
        for x in r.iter_mut() {
            *x = f.mul(inv, *x);
        }
        // clear the new pivot column from existing rows
        for row in self.basis.iter_mut() {
            let c = row[pc];
            if c != 0 {
                let nc = f.neg(c);
                for (x, &b) in row.iter_mut().zip(&r) {
                    *x = f.add(*x, f.mul(nc, b));
                }
            }
        }
        let at = self.pivots.partition_point(|&p| p < pc);
        self.pivots.insert(at, pc);
        self.basis.insert(at, r);
        Ok(true)
    }

    pub fn sum(&self, other: &VectorSubspace) -> Result<VectorSubspace> {
        self.check_compatible(other)?;
        let mut s = self.clone();
        for v in &other.basis {
            s.insert(v)?;
        }
        Ok(s)
    }

    pub fn is_contained_in(&self, other: &VectorSubspace) -> Result<bool> {
        self.check_compatible(other)?;
        for v in &self.basis {
            if !other.contains(v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// A hyperplane containing this subspace, or `None` when it is all of F^m.
    ///
    /// The choice is canonical: the basis is completed by the standard
    /// vectors of every non-pivot column except the last one.
    pub fn hyperplane_envelope(&self) -> Option<VectorSubspace> {
        if self.dim() == self.ambient {
            return None;
        }
        let free: Vec<usize> = (0..self.ambient).filter(|c| !self.pivots.contains(c)).collect();
        let mut h = self.clone();
        for &c in &free[..free.len() - 1] {
            h.insert(&unit(self.ambient, c)).expect("same ambient");
        }
        Some(h)
    }

    /// Coordinates of `v` in the echelon basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[Elem]) -> Result<Option<Vec<Elem>>> {
        if !self.contains(v)? {
            return Ok(None);
        }
        Ok(Some(self.pivots.iter().map(|&pc| v[pc]).collect()))
    }

    /// Basis vectors as the rows of a matrix (`dim × m`).
    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_vec(&self.field, self.dim(), self.ambient, self.basis.concat())
            .expect("valid basis")
    }

    /// Image under a linear map given as an `m' × m` matrix.
    pub fn image(&self, map: &Matrix) -> Result<VectorSubspace> {
        if map.cols() != self.ambient {
            return Err(Error::usage("image: map does not act on this ambient space"));
        }
        let imgs: Vec<Vec<Elem>> = self.basis.iter().map(|v| map.mul_vec(v)).collect();
        VectorSubspace::span(&self.field, map.rows(), &imgs)
    }
}

pub(crate) fn unit(m: usize, i: usize) -> Vec<Elem> {
    let mut v = vec![0; m];
    v[i] = 1;
    v
}

impl fmt::Debug for VectorSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "span{:?} ⊆ F^{}", self.basis, self.ambient)
    }
}

impl fmt::Display for VectorSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "span{{")?;
        for (i, v) in self.basis.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "(")?;
            for (j, e) in v.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{e}")?;
            }
            write!(f, ")")?;
        }
        write!(f, "}} (dim {} in F^{})", self.dim(), self.ambient)
    }
}

/// Iterator over all `d`-dimensional subspaces of F^m.
///
/// Order: pivot sets in lexicographic order, then the free echelon entries
/// lexicographically, earliest entry most significant.
pub struct SubspaceIter {
    field: Field,
    m: usize,
    d: usize,
    pivots: Option<Vec<usize>>,
    free: Vec<(usize, usize)>,
    counter: Vec<Elem>,
    fresh: bool,
}

/// Enumerates subspaces of dimension `d` in F^m, refusing when there are
/// more than `cap` of them.
pub fn enumerate_subspaces(field: &Field, m: usize, d: usize, cap: u64) -> Result<SubspaceIter> {
    if d > m {
        return Err(Error::usage(format!("no {d}-dimensional subspaces of F^{m}")));
    }
    let count = gaussian_binomial(field.order() as u64, m, d);
    Error::check_cap("subspace enumeration", count, cap)?;
    let pivots: Vec<usize> = (0..d).collect();
    let mut it = SubspaceIter {
        field: field.clone(),
        m,
        d,
        pivots: Some(pivots),
        free: Vec::new(),
        counter: Vec::new(),
        fresh: true,
    };
    it.reset_free();
    Ok(it)
}

impl SubspaceIter {
    fn reset_free(&mut self) {
        let pivots = self.pivots.as_ref().unwrap();
        self.free.clear();
        for (row, &pc) in pivots.iter().enumerate() {
            for c in pc + 1..self.m {
                if !pivots.contains(&c) {
                    self.free.push((row, c));
                }
            }
        }
        self.counter = vec![0; self.free.len()];
        self.fresh = true;
    }

    fn next_pivots(&mut self) {
        let Some(p) = self.pivots.as_mut() else { return };
        let (m, d) = (self.m, self.d);
        // next combination in lexicographic order
        let mut i = d;
        while i > 0 {
            i -= 1;
            if p[i] < m - d + i {
                p[i] += 1;
                for j in i + 1..d {
                    p[j] = p[j - 1] + 1;
                }
                self.reset_free();
                return;
            }
        }
        self.pivots = None;
    }

    fn current(&self) -> VectorSubspace {
        let pivots = self.pivots.clone().unwrap();
        let mut basis: Vec<Vec<Elem>> = pivots.iter().map(|&pc| unit(self.m, pc)).collect();
        for (&(row, col), &v) in self.free.iter().zip(&self.counter) {
            basis[row][col] = v;
        }
        VectorSubspace {
            field: self.field.clone(),
            ambient: self.m,
            basis,
            pivots,
        }
    }
}

impl Iterator for SubspaceIter {
    type Item = VectorSubspace;

    fn next(&mut self) -> Option<VectorSubspace> {
        loop {
            self.pivots.as_ref()?;
            if self.fresh {
                self.fresh = false;
                return Some(self.current());
            }
            // advance the free-entry odometer, last entry fastest
            let q = self.field.order() as Elem as usize;
            let mut i = self.counter.len();
            let mut advanced = false;
            while i > 0 {
                i -= 1;
                if (self.counter[i] as usize) + 1 < q {
                    self.counter[i] += 1;
                    for c in &mut self.counter[i + 1..] {
                        *c = 0;
                    }
                    advanced = true;
                    break;
                }
            }
            if advanced {
                return Some(self.current());
            }
            self.next_pivots();
        }
    }
}
