//! Normalization to `J_r`, the `(s, t)` invariants, decomposition of maximal
//! constant-rank spaces into wedge form, and brute-force equivalence.
//!
//! For a space containing `J_r` every matrix is cut as
//!
//! ```text
//! [ A  C ]    A: r × r        C: r × (p−r)
//! [ B  D ]    B: (n−r) × r    D: (n−r) × (p−r)
//! ```
//!
//! and `U` is the sum of the column spaces of the `C` blocks of the
//! translation space. `s = dim U`, `t = r − s`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::matrix::{rank_in_place, Matrix};
use crate::space::{AffineMatrixSpace, EquivalenceWitness};
use crate::subspace::{unit, VectorSubspace};
use crate::verify::{constant_rank, is_optimal};
use crate::{choose2, construct, find_first, Limits};

/// The four blocks of a matrix cut at `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockView {
    pub r: usize,
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
    pub d: Matrix,
}

/// Blocks after `U` has been moved to `F^s × {0}`:
/// `A = [A11 A12; A21 A22]`, `B = [B1 B2]`, `C = [C1; C2]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinedBlocks {
    pub a11: Matrix,
    pub a12: Matrix,
    pub a21: Matrix,
    pub a22: Matrix,
    pub b1: Matrix,
    pub b2: Matrix,
    pub c1: Matrix,
    pub c2: Matrix,
}

impl BlockView {
    pub fn new(m: &Matrix, r: usize) -> Self {
        let (n, p) = m.shape();
        BlockView {
            r,
            a: m.block(0, r, 0, r),
            b: m.block(r, n, 0, r),
            c: m.block(0, r, r, p),
            d: m.block(r, n, r, p),
        }
    }

    pub fn refined(&self, s: usize) -> RefinedBlocks {
        let r = self.r;
        RefinedBlocks {
            a11: self.a.block(0, s, 0, s),
            a12: self.a.block(0, s, s, r),
            a21: self.a.block(s, r, 0, s),
            a22: self.a.block(s, r, s, r),
            b1: self.b.block(0, self.b.rows(), 0, s),
            b2: self.b.block(0, self.b.rows(), s, r),
            c1: self.c.block(0, s, 0, self.c.cols()),
            c2: self.c.block(s, r, 0, self.c.cols()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReferenceDims {
    /// Largest dimension with constant rank `r` (valid when `|F| > r + 1`).
    pub d_eq: usize,
    /// Largest dimension with rank at most `r`.
    pub d_le: usize,
    /// Largest dimension with rank at least `r`.
    pub d_ge: usize,
}

pub fn reference_dims(n: usize, p: usize, r: usize) -> Result<ReferenceDims> {
    if !(n >= p && p >= r && r >= 1) {
        return Err(Error::usage(format!("need n ≥ p ≥ r ≥ 1, got n={n}, p={p}, r={r}")));
    }
    Ok(ReferenceDims {
        d_eq: choose2(r) + r * (n - r),
        d_le: n * r,
        d_ge: n * p - choose2(r + 1),
    })
}

/// An equivalent space containing `J_r`, rebased at `J_r`, with the witness.
///
/// The rank-`r` element used is the base point if it qualifies, otherwise the
/// first one in enumeration order. Spaces with more than `max_enum`
/// elements are sampled with the configured seed instead.
pub fn normalize(
    s: &AffineMatrixSpace,
    r: usize,
    limits: &Limits,
) -> Result<(AffineMatrixSpace, EquivalenceWitness)> {
    let (n, p) = s.shape();
    if r == 0 || r > n.min(p) {
        return Err(Error::usage(format!("rank {r} out of range for {n}×{p}")));
    }
    let anchor = if s.base().rank() == r {
        s.base().clone()
    } else {
        let count = s.cardinality();
        let f = s.field();
        if count > limits.max_enum as u128 {
            return sampled_anchor(s, r, limits).and_then(|m| finish_normalize(s, r, &m));
        }
        let hit = find_first(
            count,
            || (vec![0; n * p], vec![0; n * p]),
            |(elem, scratch), i| {
                s.element_into(i, elem);
                scratch.copy_from_slice(elem);
                (rank_in_place(f, scratch, n, p) == r).then(|| elem.clone())
            },
        );
        match hit {
            Some((_, data)) => Matrix::from_vec(f, n, p, data)?,
            None => return Err(Error::domain(format!("no element of rank {r} in the space"))),
        }
    };
    finish_normalize(s, r, &anchor)
}

/// Up to `max_enum` seeded random elements, for spaces too large to scan.
fn sampled_anchor(s: &AffineMatrixSpace, r: usize, limits: &Limits) -> Result<Matrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(limits.seed);
    let q = s.field().order();
    let basis = s.basis();
    for _ in 0..limits.max_enum {
        let mut m = s.base().clone();
        for b in &basis {
            m.add_scaled_mut(rng.gen_range(0..q) as Elem, b);
        }
        if m.rank() == r {
            return Ok(m);
        }
    }
    Err(Error::domain(format!(
        "no element of rank {r} among {} samples (seed {})",
        limits.max_enum, limits.seed
    )))
}

fn finish_normalize(s: &AffineMatrixSpace, r: usize, anchor: &Matrix) -> Result<(AffineMatrixSpace, EquivalenceWitness)> {
    let (n, p) = s.shape();
    let (pm, qm) = anchor.rank_decomposition();
    let w = EquivalenceWitness { p: pm, q: qm };
    let j = Matrix::j_r(s.field(), n, p, r);
    let t = s.transform(&w)?.rebased(j)?;
    Ok((t, w))
}

fn require_j_r(s: &AffineMatrixSpace, r: usize) -> Result<()> {
    let (n, p) = s.shape();
    if !s.contains(&Matrix::j_r(s.field(), n, p, r))? {
        return Err(Error::usage(format!("space does not contain J_{r}")));
    }
    Ok(())
}

/// `U`: the sum of the column spaces of `C(M)` over the translation space.
/// `C` is linear, so the translation basis suffices.
pub fn compute_u(s: &AffineMatrixSpace, r: usize) -> Result<VectorSubspace> {
    require_j_r(s, r)?;
    let mut u = VectorSubspace::zero(s.field(), r);
    for m in s.basis() {
        let c = BlockView::new(&m, r).c;
        for j in 0..c.cols() {
            u.insert(&c.column(j))?;
        }
    }
    Ok(u)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InvariantSignature {
    pub n: usize,
    pub p: usize,
    pub r: usize,
    pub dim: usize,
    pub s: usize,
    pub t: usize,
    /// `(s, t)` is an equivalence invariant: the space has the maximal
    /// dimension and `p > r`. Otherwise it only describes the chosen
    /// normalization.
    pub invariant: bool,
}

impl fmt::Display for InvariantSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} p={} r={} dim={} s={} t={} invariant={}",
            self.n, self.p, self.r, self.dim, self.s, self.t, self.invariant
        )
    }
}

/// Normalizes and reads off `(s, t)`. The caller asserts constant rank `r`.
pub fn st_invariants(s: &AffineMatrixSpace, r: usize, limits: &Limits) -> Result<InvariantSignature> {
    let (n, p) = s.shape();
    let (norm, _) = normalize(s, r, limits)?;
    let u = compute_u(&norm, r)?;
    let maximal = n >= p && reference_dims(n, p, r).map(|d| d.d_eq == s.dim()).unwrap_or(false);
    Ok(InvariantSignature {
        n,
        p,
        r,
        dim: s.dim(),
        s: u.dim(),
        t: r - u.dim(),
        invariant: maximal && p > r,
    })
}

/// A maximal space taken apart: `transform(input, witness)` equals
/// `wedge(m_space, n_space, n, p)` as sets.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub s: usize,
    pub t: usize,
    pub witness: EquivalenceWitness,
    /// Optimal `t × t` factor; `None` when `t = 0`.
    pub m_space: Option<AffineMatrixSpace>,
    /// Optimal `s × s` factor; `None` when `s = 0`.
    pub n_space: Option<AffineMatrixSpace>,
}

/// Checks that the quadratic map `M ↦ form(M, M)` vanishes on the span of
/// `dirs`, through its values on the basis and its polar form on pairs.
fn check_quadratic(dirs: &[Matrix], what: &str, form: impl Fn(&Matrix, &Matrix) -> Matrix) -> Result<()> {
    for m in dirs {
        if !form(m, m).is_zero() {
            return Err(Error::invariant(format!("{what} fails"), Some(m)));
        }
    }
    for (i, a) in dirs.iter().enumerate() {
        for b in &dirs[i + 1..] {
            let polar = form(a, b).add(&form(b, a)).unwrap();
            if !polar.is_zero() {
                return Err(Error::invariant(format!("{what} fails"), Some(&a.add(b).unwrap())));
            }
        }
    }
    Ok(())
}

fn require_zero(dirs: &[Matrix], what: &str, block: impl Fn(&Matrix) -> Matrix) -> Result<()> {
    match dirs.iter().find(|m| !block(m).is_zero()) {
        Some(m) => Err(Error::invariant(format!("{what} is not identically zero"), Some(m))),
        None => Ok(()),
    }
}

/// The projection of `s` onto a block, as an affine space.
fn project(s: &AffineMatrixSpace, r0: usize, r1: usize, c0: usize, c1: usize) -> Result<AffineMatrixSpace> {
    let base = s.base().block(r0, r1, c0, c1);
    let basis: Vec<Matrix> = s.basis().iter().map(|m| m.block(r0, r1, c0, c1)).collect();
    AffineMatrixSpace::new(base, &basis)
}

/// Column permutation matrix `Π` with `(M · Π)[:, j] = M[:, order[j]]`.
fn column_permutation(field: &Field, order: &[usize]) -> Matrix {
    let p = order.len();
    let mut m = Matrix::zeros(field, p, p);
    for (j, &src) in order.iter().enumerate() {
        m.set(src, j, 1);
    }
    m
}

/// Decomposes a constant-rank-`r` space of maximal dimension into wedge
/// form, checking every intermediate identity on the way.
///
/// Any identity found violated is reported as [`Error::Invariant`] with the
/// offending matrix; on valid input over a field with more than `r + 1`
/// elements this does not happen.
pub fn decompose_max(s: &AffineMatrixSpace, r: usize, limits: &Limits) -> Result<Decomposition> {
    let (n, p) = s.shape();
    let dims = reference_dims(n, p, r)?;
    if s.dim() != dims.d_eq {
        return Err(Error::precondition(format!(
            "dimension {} is not the maximal {}",
            s.dim(),
            dims.d_eq
        )));
    }
    let cr = constant_rank(s, r, limits)?;
    if !cr.holds() {
        return Err(Error::precondition(format!("space is not of constant rank {r}: {}", cr.detail)));
    }
    let field = s.field().clone();

    // Step 1: normalize so that J_r is the base point.
    let (norm, w0) = normalize(s, r, limits)?;
    let dirs = norm.basis();
    require_zero(&dirs, "D(M)", |m| BlockView::new(m, r).d)?;
    check_quadratic(&dirs, "B(M)·C(M) = 0", |x, y| {
        BlockView::new(x, r).b.mul(&BlockView::new(y, r).c).unwrap()
    })?;

    // Step 2: the affine subspace T of elements supported on the A block.
    let bcd: Vec<Vec<u8>> = dirs
        .iter()
        .map(|m| {
            let bv = BlockView::new(m, r);
            [bv.b.into_vec(), bv.c.into_vec(), bv.d.into_vec()].concat()
        })
        .collect();
    let width = bcd.first().map_or(0, |v| v.len());
    let mut cols = Vec::with_capacity(width * dirs.len());
    for k in 0..width {
        for v in &bcd {
            cols.push(v[k]);
        }
    }
    let coeffs = Matrix::from_vec(&field, width, dirs.len(), cols)?.kernel();
    let t_dirs: Vec<Matrix> = coeffs
        .iter()
        .map(|c| {
            let mut m = Matrix::zeros(&field, n, p);
            for (&ci, d) in c.iter().zip(&dirs) {
                m.add_scaled_mut(ci, d);
            }
            m.block(0, r, 0, r)
        })
        .collect();
    let a_t = AffineMatrixSpace::new(Matrix::identity(&field, r), &t_dirs)?;
    if a_t.dim() != choose2(r) {
        return Err(Error::invariant(
            format!("A(T) has dimension {} instead of C({r},2)", a_t.dim()),
            None,
        ));
    }
    let mut a_gens = a_t.basis();
    a_gens.push(Matrix::identity(&field, r));
    for a in &a_gens {
        check_quadratic(&dirs, "B(M)·A'·C(M) = 0 for A' in A(T)", |x, y| {
            BlockView::new(x, r)
                .b
                .mul(a)
                .unwrap()
                .mul(&BlockView::new(y, r).c)
                .unwrap()
        })?;
    }

    // Step 3: U and its invariance under A(T).
    let u = compute_u(&norm, r)?;
    let (s_dim, t_dim) = (u.dim(), r - u.dim());
    if n > p && s_dim > 0 {
        return Err(Error::invariant(format!("n > p but dim U = {s_dim}"), None));
    }
    for a in &a_gens {
        for v in u.basis() {
            if !u.contains(&a.mul_vec(v))? {
                return Err(Error::invariant("U is not invariant under A(T)", Some(a)));
            }
        }
    }

    // Step 4: change basis of F^r so that U = F^s × {0}.
    let mut rcols: Vec<Vec<u8>> = u.basis().to_vec();
    rcols.extend(complement_units(&u));
    let rmat = columns_matrix(&field, r, &rcols);
    let rinv = rmat.inverse()?;
    let w1 = EquivalenceWitness {
        p: Matrix::block_diag(&field, &[&rinv, &Matrix::identity(&field, n - r)]),
        q: Matrix::block_diag(&field, &[&rmat, &Matrix::identity(&field, p - r)]),
    };
    let j = Matrix::j_r(&field, n, p, r);
    let refined = norm.transform(&w1)?.rebased(j)?;
    let rdirs = refined.basis();
    let rb = |m: &Matrix| BlockView::new(m, r).refined(s_dim);
    require_zero(&rdirs, "C2(M)", |m| rb(m).c2)?;
    require_zero(&rdirs, "B1(M)", |m| rb(m).b1)?;
    require_zero(&rdirs, "A21(M)", |m| rb(m).a21)?;
    require_zero(&rdirs, "D(M)", |m| BlockView::new(m, r).d)?;

    // Step 5: swap the first two column blocks; the result must be a wedge.
    let order: Vec<usize> = (s_dim..r).chain(0..s_dim).chain(r..p).collect();
    let w2 = EquivalenceWitness {
        p: Matrix::identity(&field, n),
        q: column_permutation(&field, &order),
    };
    let permuted = refined.transform(&w2)?;

    // Step 6: the lower-left block K (rows s.., first t columns) and the
    // transposed upper-right block L are brought to tilde form, by rows of K
    // and columns of L respectively.
    let p1 = if t_dim > 0 {
        let k = project(&permuted, s_dim, n, 0, t_dim)?;
        tilde_change(&k, n - r, "K")?.inverse()?
    } else {
        Matrix::identity(&field, n - s_dim)
    };
    let q2 = if s_dim > 0 {
        let l = project(&permuted, 0, s_dim, t_dim, p)?.transpose();
        tilde_change(&l, p - r, "L")?.inverse()?.transpose()
    } else {
        Matrix::identity(&field, p - t_dim)
    };
    let w3 = EquivalenceWitness {
        p: Matrix::block_diag(&field, &[&Matrix::identity(&field, s_dim), &p1]),
        q: Matrix::block_diag(&field, &[&Matrix::identity(&field, t_dim), &q2]),
    };
    let shaped = permuted.transform(&w3)?;
    let m_space = (t_dim > 0).then(|| project(&shaped, s_dim, r, 0, t_dim)).transpose()?;
    let n_space = (s_dim > 0).then(|| project(&shaped, 0, s_dim, t_dim, r)).transpose()?;
    for (name, part) in [("M", &m_space), ("N", &n_space)] {
        if let Some(sp) = part {
            let check = is_optimal(sp, limits)?;
            if !check.holds() {
                let witness = match &check.counterexample {
                    Some(crate::verify::Counterexample::Matrix(m)) => Some(m.clone()),
                    _ => None,
                };
                return Err(Error::invariant(
                    format!("recovered factor {name} is not optimal: {}", check.detail),
                    witness.as_ref(),
                ));
            }
        }
    }
    let target = construct::wedge(m_space.as_ref(), n_space.as_ref(), n, p, limits)?;
    let witness = w0.then(&w1)?.then(&w2)?.then(&w3)?;
    if !shaped.same_set(&target) || !s.transform(&witness)?.same_set(&target) {
        return Err(Error::invariant("normalized space is not the wedge of its factors", None));
    }
    Ok(Decomposition {
        s: s_dim,
        t: t_dim,
        witness,
        m_space,
        n_space,
    })
}

/// Standard vectors `e_j` for the non-pivot columns of `w`, ascending.
fn complement_units(w: &VectorSubspace) -> Vec<Vec<Elem>> {
    let m = w.ambient_dim();
    (0..m).filter(|c| !w.pivots().contains(c)).map(|c| unit(m, c)).collect()
}

fn columns_matrix(field: &Field, m: usize, cols: &[Vec<Elem>]) -> Matrix {
    let mut out = Matrix::zeros(field, m, cols.len());
    for (j, col) in cols.iter().enumerate() {
        for (i, &e) in col.iter().enumerate() {
            out.set(i, j, e);
        }
    }
    out
}

/// For a space of `m × c` matrices: all `w ∈ F^m` such that `w·xᵀ` is a
/// translation for every `x ∈ F^c`.
fn free_directions(s: &AffineMatrixSpace) -> Result<VectorSubspace> {
    let (m, c) = s.shape();
    let f = s.field();
    let perp: Vec<Vec<Elem>> = if s.dim() == 0 {
        (0..m * c).map(|i| unit(m * c, i)).collect()
    } else {
        s.directions().to_matrix().kernel()
    };
    let mut rows = Vec::new();
    for h in &perp {
        for j in 0..c {
            rows.extend((0..m).map(|i| h[i * c + j]));
        }
    }
    if rows.is_empty() {
        return Ok(VectorSubspace::full(f, m));
    }
    let conditions = Matrix::from_vec(f, perp.len() * c, m, rows)?;
    VectorSubspace::span(f, m, &conditions.kernel())
}

/// `R` such that `R⁻¹ · S` has its last `free` rows unconstrained.
fn tilde_change(s: &AffineMatrixSpace, free: usize, name: &str) -> Result<Matrix> {
    let w = free_directions(s)?;
    if w.dim() != free {
        return Err(Error::invariant(
            format!("block {name} has {} free row directions, expected {free}", w.dim()),
            None,
        ));
    }
    let mut cols = complement_units(&w);
    cols.extend(w.basis().iter().cloned());
    Ok(columns_matrix(s.field(), s.rows(), &cols))
}

/// `|GL_n(F_q)|`.
pub fn gl_order(q: u128, n: usize) -> u128 {
    let qn = q.pow(n as u32);
    (0..n).map(|i| qn - q.pow(i as u32)).product()
}

fn invertible_matrices(field: &Field, n: usize) -> Vec<Matrix> {
    let q = field.order();
    let total = (q as u128).pow((n * n) as u32);
    (0..total)
        .filter_map(|code| {
            let data = crate::verify::digits(code, n * n, q);
            let m = Matrix::from_vec(field, n, n, data).unwrap();
            m.is_invertible().then_some(m)
        })
        .collect()
}

fn rank_profile(s: &AffineMatrixSpace, limits: &Limits) -> Option<Vec<u128>> {
    let count = s.cardinality();
    if count > limits.max_enum as u128 {
        return None;
    }
    let mut hist = vec![0u128; s.rows().min(s.cols()) + 1];
    for m in s.enumerate(limits.max_enum).ok()? {
        hist[m.rank()] += 1;
    }
    Some(hist)
}

/// Brute force over `GL_n × GL_p` for a witness `P · a · Q = b`.
pub fn equiv_exhaustive(
    a: &AffineMatrixSpace,
    b: &AffineMatrixSpace,
    limits: &Limits,
) -> Result<Option<EquivalenceWitness>> {
    if a.shape() != b.shape() || a.field() != b.field() {
        return Err(Error::usage("spaces of different shapes or fields"));
    }
    if a.dim() != b.dim() {
        return Ok(None);
    }
    let (n, p) = a.shape();
    let q = a.field().order() as u128;
    let pairs = gl_order(q, n).saturating_mul(gl_order(q, p));
    if pairs > limits.max_enum as u128 {
        return Err(Error::Resource {
            what: "witness search (compare st_invariants signatures instead)".into(),
            needed: pairs,
            cap: limits.max_enum,
        });
    }
    if let (Some(ha), Some(hb)) = (rank_profile(a, limits), rank_profile(b, limits)) {
        if ha != hb {
            return Ok(None);
        }
    }
    let field = a.field();
    let left = invertible_matrices(field, n);
    let right = invertible_matrices(field, p);
    let hit = find_first(
        left.len() as u128,
        || (),
        |_, i| {
            let pm = &left[i as usize];
            right.iter().find_map(|qm| {
                let w = EquivalenceWitness {
                    p: pm.clone(),
                    q: qm.clone(),
                };
                a.transform(&w).ok().filter(|t| t.same_set(b)).map(|_| w)
            })
        },
    );
    Ok(hit.map(|(_, w)| w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{nt_space, tilde, wedge};
    use crate::verify::fa_check;

    fn gf(q: u32) -> Field {
        Field::with_order(q).unwrap()
    }

    fn lim() -> Limits {
        Limits::default()
    }

    fn one(f: &Field) -> AffineMatrixSpace {
        AffineMatrixSpace::point(Matrix::identity(f, 1))
    }

    fn scramble(s: &AffineMatrixSpace) -> AffineMatrixSpace {
        let f = s.field();
        let (n, p) = s.shape();
        // fixed invertible witnesses: unit lower plus upper shifts
        let mut pm = Matrix::identity(f, n);
        for i in 1..n {
            pm.set(i, i - 1, 1);
            pm.set(0, i, f.neg(1));
        }
        let mut qm = Matrix::identity(f, p);
        for i in 1..p {
            qm.set(i - 1, i, 2 % f.order() as u8);
        }
        if p > 1 {
            qm.set(p - 1, 0, 1);
        }
        let w = EquivalenceWitness::new(pm, qm).unwrap();
        s.transform(&w).unwrap()
    }

    #[test]
    fn reference_dim_values() {
        assert_eq!(reference_dims(3, 2, 2).unwrap().d_eq, 3);
        assert_eq!(
            reference_dims(2, 2, 2).unwrap(),
            ReferenceDims { d_eq: 1, d_le: 4, d_ge: 1 }
        );
        assert_eq!(reference_dims(4, 4, 2).unwrap().d_eq, 5);
        assert!(reference_dims(2, 3, 1).is_err());
        assert!(reference_dims(2, 2, 0).is_err());
    }

    #[test]
    fn normalize_examples() {
        let f3 = gf(3);
        let w = nt_space(&f3, 2);
        let (norm, wit) = normalize(&w, 2, &lim()).unwrap();
        assert!(norm.contains(&Matrix::identity(&f3, 2)).unwrap());
        assert!(w.transform(&wit).unwrap().same_set(&norm));

        let single = AffineMatrixSpace::point(Matrix::from_rows(&f3, &[&[0, 1], &[0, 0]]));
        let (norm, _) = normalize(&single, 1, &lim()).unwrap();
        assert_eq!(norm.base(), &Matrix::j_r(&f3, 2, 2, 1));
        assert_eq!(norm.dim(), 0);

        let f4 = gf(4);
        let t = scramble(&tilde(&nt_space(&f4, 2), 3, 2).unwrap());
        let (norm, _) = normalize(&t, 2, &lim()).unwrap();
        assert!(fa_check(&norm, 2, &lim()).unwrap().holds());

        let zero = AffineMatrixSpace::point(Matrix::zeros(&f3, 2, 2));
        assert!(matches!(normalize(&zero, 1, &lim()), Err(Error::Domain(_))));

        // too large to scan at this cap: sampled
        let big = AffineMatrixSpace::new(Matrix::zeros(&f3, 2, 2), &[Matrix::identity(&f3, 2), Matrix::unit(&f3, 2, 2, 0, 1)]).unwrap();
        let (norm, wit) = normalize(&big, 2, &Limits::with_cap(4)).unwrap();
        assert!(big.transform(&wit).unwrap().same_set(&norm));
    }

    #[test]
    fn u_examples() {
        let f3 = gf(3);
        let t = tilde(&nt_space(&f3, 2), 3, 3).unwrap();
        assert_eq!(compute_u(&t, 2).unwrap().dim(), 0);
        let w = wedge(Some(&one(&f3)), Some(&one(&f3)), 3, 3, &lim()).unwrap();
        let (norm, _) = normalize(&w, 2, &lim()).unwrap();
        assert_eq!(compute_u(&norm, 2).unwrap().dim(), 1);
        // all C blocks free
        let mut basis = vec![];
        for i in 0..2 {
            basis.push(Matrix::unit(&f3, 3, 3, i, 2));
        }
        let full = AffineMatrixSpace::new(Matrix::j_r(&f3, 3, 3, 2), &basis).unwrap();
        assert_eq!(compute_u(&full, 2).unwrap(), VectorSubspace::full(&f3, 2));
        assert!(compute_u(&nt_space(&f3, 2).transform(&EquivalenceWitness::new(
            Matrix::from_rows(&f3, &[&[0, 1], &[1, 0]]),
            Matrix::identity(&f3, 2)).unwrap()).unwrap(), 2).is_err());
    }

    #[test]
    fn signatures() {
        let f3 = gf(3);
        let t = tilde(&nt_space(&f3, 2), 3, 2).unwrap();
        let sig = st_invariants(&t, 2, &lim()).unwrap();
        assert_eq!((sig.s, sig.t, sig.invariant), (0, 2, false));
        let t = tilde(&nt_space(&f3, 2), 3, 3).unwrap();
        let sig = st_invariants(&t, 2, &lim()).unwrap();
        assert_eq!((sig.s, sig.t, sig.invariant), (0, 2, true));
        let w = wedge(Some(&one(&f3)), Some(&one(&f3)), 3, 3, &lim()).unwrap();
        let sig = st_invariants(&w, 2, &lim()).unwrap();
        assert_eq!((sig.s, sig.t), (1, 1));
        let d = wedge(Some(&nt_space(&f3, 2)), None, 3, 3, &lim()).unwrap();
        assert_eq!(st_invariants(&d, 2, &lim()).unwrap().s, 0);
        // p = r: no invariance claim
        let sq = nt_space(&f3, 2);
        assert!(!st_invariants(&sq, 2, &lim()).unwrap().invariant);
    }

    #[test]
    fn decompose_wedge_round_trip() {
        let f3 = gf(3);
        let w = wedge(Some(&one(&f3)), Some(&one(&f3)), 3, 3, &lim()).unwrap();
        let input = scramble(&w);
        let d = decompose_max(&input, 2, &lim()).unwrap();
        assert_eq!((d.s, d.t), (1, 1));
        let rebuilt = wedge(d.m_space.as_ref(), d.n_space.as_ref(), 3, 3, &lim()).unwrap();
        assert!(input.transform(&d.witness).unwrap().same_set(&rebuilt));
    }

    #[test]
    fn decompose_tilde_round_trip() {
        let f4 = gf(4);
        let input = scramble(&tilde(&nt_space(&f4, 2), 3, 2).unwrap());
        let d = decompose_max(&input, 2, &lim()).unwrap();
        assert_eq!((d.s, d.t), (0, 2));
        assert!(d.n_space.is_none());
        let m = d.m_space.unwrap();
        assert!(equiv_exhaustive(&m, &nt_space(&f4, 2), &lim()).unwrap().is_some());
    }

    #[test]
    fn decompose_rejects_small_spaces() {
        let f4 = gf(4);
        let s = nt_space(&f4, 2);
        let small = AffineMatrixSpace::point(Matrix::j_r(&f4, 3, 2, 2));
        assert!(matches!(decompose_max(&small, 2, &lim()), Err(Error::Precondition(_))));
        assert!(decompose_max(&s, 2, &lim()).is_ok());
    }

    #[test]
    fn exhaustive_equivalence() {
        let f3 = gf(3);
        let s = nt_space(&f3, 2);
        let moved = scramble(&s);
        let w = equiv_exhaustive(&s, &moved, &lim()).unwrap().unwrap();
        assert!(s.transform(&w).unwrap().same_set(&moved));
        let bad = AffineMatrixSpace::new(Matrix::zeros(&f3, 2, 2), &[Matrix::identity(&f3, 2)]).unwrap();
        assert!(equiv_exhaustive(&s, &bad, &lim()).unwrap().is_none());
        assert_eq!(gl_order(3, 2), 48);
        assert_eq!(gl_order(3, 3), 11_232);

        let a = wedge(Some(&one(&f3)), Some(&one(&f3)), 3, 3, &lim()).unwrap();
        let b = wedge(Some(&nt_space(&f3, 2)), None, 3, 3, &lim()).unwrap();
        assert!(matches!(equiv_exhaustive(&a, &b, &lim()), Err(Error::Resource { .. })));
    }
}
