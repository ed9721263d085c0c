//! Constructions of constant-rank spaces: `I_r + NT_r`, alternating spaces,
//! nonisotropic blocks, joints, tilde extensions and wedges.
//!
//! Free blocks are materialized as unit matrices in row-major order.

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::matrix::Matrix;
use crate::space::AffineMatrixSpace;
use crate::verify::{digits, is_optimal};
use crate::Limits;

/// `I_r + NT_r(F)`: upper unitriangular matrices, dimension `C(r,2)`.
pub fn nt_space(field: &Field, r: usize) -> AffineMatrixSpace {
    let basis: Vec<Matrix> = (0..r)
        .flat_map(|i| (i + 1..r).map(move |j| (i, j)))
        .map(|(i, j)| Matrix::unit(field, r, r, i, j))
        .collect();
    AffineMatrixSpace::new(Matrix::identity(field, r), &basis).unwrap()
}

/// Basis `E_ij − E_ji (i < j)` of the alternating `s × s` matrices. In
/// characteristic 2 these are the symmetric matrices with zero diagonal.
pub fn alternating_space(field: &Field, s: usize) -> Vec<Matrix> {
    let mut out = Vec::new();
    for i in 0..s {
        for j in i + 1..s {
            let mut m = Matrix::zeros(field, s, s);
            m.set(i, j, 1);
            m.set(j, i, field.neg(1));
            out.push(m);
        }
    }
    out
}

/// A square matrix `P` viewed through its quadratic form `X ↦ X^T P X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm {
    matrix: Matrix,
}

impl QuadraticForm {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::usage("quadratic form matrix must be square"));
        }
        if !matrix.is_invertible() {
            return Err(Error::domain(format!("form matrix {matrix} is singular")));
        }
        Ok(QuadraticForm { matrix })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    pub fn evaluate(&self, x: &[Elem]) -> Elem {
        let f = self.matrix.field();
        let px = self.matrix.mul_vec(x);
        x.iter().zip(&px).fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
    }
}

/// The first nonzero `X` (lexicographic, first coordinate most significant)
/// with `X^T P X = 0`, or `None` when `P` is nonisotropic.
pub fn isotropic_vector(p: &Matrix, limits: &Limits) -> Result<Option<Vec<Elem>>> {
    if !p.is_square() {
        return Err(Error::usage("nonisotropy is defined for square matrices"));
    }
    let s = p.rows();
    let q = p.field().order();
    let count = (q as u128).checked_pow(s as u32).unwrap_or(u128::MAX);
    Error::check_cap("isotropy scan", count, limits.max_enum)?;
    let form = QuadraticForm { matrix: p.clone() };
    Ok((1..count).map(|c| digits(c, s, q)).find(|x| form.evaluate(x) == 0))
}

pub fn is_nonisotropic(p: &Matrix, limits: &Limits) -> Result<bool> {
    Ok(isotropic_vector(p, limits)?.is_none())
}

/// `(P_1 + Mata_{n1}) ∨ … ∨ (P_d + Mata_{nd})` for nonisotropic `P_i`.
pub fn optimal_from_forms(forms: &[QuadraticForm], limits: &Limits) -> Result<AffineMatrixSpace> {
    if forms.is_empty() {
        return Err(Error::usage("at least one form is required"));
    }
    let field = forms[0].matrix.field().clone();
    let mut blocks = Vec::with_capacity(forms.len());
    for (i, form) in forms.iter().enumerate() {
        if form.matrix.field() != &field {
            return Err(Error::usage("forms over different fields"));
        }
        if let Some(x) = isotropic_vector(&form.matrix, limits)? {
            return Err(Error::domain(format!(
                "form #{i} ({}) is isotropic: X = {x:?} gives X^T P X = 0",
                form.matrix
            )));
        }
        let alt = alternating_space(&field, form.size());
        blocks.push(AffineMatrixSpace::new(form.matrix.clone(), &alt)?);
    }
    joint(&blocks)
}

/// Block upper-triangular assembly: the given spaces on the diagonal, every
/// block above the diagonal free.
pub fn joint(spaces: &[AffineMatrixSpace]) -> Result<AffineMatrixSpace> {
    let Some(first) = spaces.first() else {
        return Err(Error::usage("joint of no spaces"));
    };
    let field = first.field().clone();
    if spaces.iter().any(|s| s.rows() != s.cols() || s.field() != &field) {
        return Err(Error::usage("joint needs square spaces over one field"));
    }
    let sizes: Vec<usize> = spaces.iter().map(|s| s.rows()).collect();
    let total: usize = sizes.iter().sum();
    let offsets: Vec<usize> = sizes.iter().scan(0, |acc, &n| {
        let o = *acc;
        *acc += n;
        Some(o)
    }).collect();
    let block_of = |i: usize| offsets.iter().rposition(|&o| o <= i).unwrap();

    let mut base = Matrix::zeros(&field, total, total);
    let mut basis = Vec::new();
    for (s, &o) in spaces.iter().zip(&offsets) {
        base.set_block(o, o, s.base());
        for b in s.basis() {
            let mut m = Matrix::zeros(&field, total, total);
            m.set_block(o, o, &b);
            basis.push(m);
        }
    }
    for i in 0..total {
        for j in 0..total {
            if block_of(i) < block_of(j) {
                basis.push(Matrix::unit(&field, total, total, i, j));
            }
        }
    }
    AffineMatrixSpace::new(base, &basis)
}

/// The extension of a square `r × r` space `W` to `n × p`: `W` top-left, the
/// `(n−r) × r` block below it free, the last `p − r` columns zero.
pub fn tilde(w: &AffineMatrixSpace, n: usize, p: usize) -> Result<AffineMatrixSpace> {
    let r = w.rows();
    if w.cols() != r {
        return Err(Error::usage("tilde needs a square inner space"));
    }
    if n < p || p < r {
        return Err(Error::usage(format!("tilde needs n ≥ p ≥ r, got n={n}, p={p}, r={r}")));
    }
    let f = w.field();
    let mut base = Matrix::zeros(f, n, p);
    base.set_block(0, 0, w.base());
    let mut basis: Vec<Matrix> = w
        .basis()
        .iter()
        .map(|b| {
            let mut m = Matrix::zeros(f, n, p);
            m.set_block(0, 0, b);
            m
        })
        .collect();
    for i in r..n {
        for j in 0..r {
            basis.push(Matrix::unit(f, n, p, i, j));
        }
    }
    AffineMatrixSpace::new(base, &basis)
}

/// `M ∧_{n,p} N` for optimal `M` (`t × t`) and `N` (`s × s`), `r = s + t`.
///
/// Row blocks have sizes `(s, t, n−r)` and column blocks `(t, s, p−r)`:
///
/// ```text
/// [ ?  N  ? ]
/// [ M  0  0 ]
/// [ ?  0  0 ]
/// ```
///
/// Either factor may be absent (size 0); both inputs are checked for
/// optimality by enumeration.
pub fn wedge(
    m: Option<&AffineMatrixSpace>,
    nn: Option<&AffineMatrixSpace>,
    n: usize,
    p: usize,
    limits: &Limits,
) -> Result<AffineMatrixSpace> {
    let field = match (m, nn) {
        (Some(a), _) | (None, Some(a)) => a.field().clone(),
        (None, None) => return Err(Error::usage("wedge needs at least one factor")),
    };
    for (name, part) in [("M", m), ("N", nn)] {
        if let Some(sp) = part {
            if sp.field() != &field {
                return Err(Error::usage("wedge factors over different fields"));
            }
            let check = is_optimal(sp, limits)?;
            if !check.holds() {
                return Err(Error::domain(format!("wedge factor {name} is not optimal: {}", check.detail)));
            }
        }
    }
    let t = m.map_or(0, |x| x.rows());
    let s = nn.map_or(0, |x| x.rows());
    let r = s + t;
    if n < p || p < r {
        return Err(Error::usage(format!("wedge needs n ≥ p ≥ r, got n={n}, p={p}, r={r}")));
    }
    let mut base = Matrix::zeros(&field, n, p);
    let mut basis = Vec::new();
    if let Some(ms) = m {
        base.set_block(s, 0, ms.base());
        for b in ms.basis() {
            let mut x = Matrix::zeros(&field, n, p);
            x.set_block(s, 0, &b);
            basis.push(x);
        }
    }
    if let Some(ns) = nn {
        base.set_block(0, t, ns.base());
        for b in ns.basis() {
            let mut x = Matrix::zeros(&field, n, p);
            x.set_block(0, t, &b);
            basis.push(x);
        }
    }
    for i in 0..n {
        for j in 0..p {
            let free = (i < s && j < t) || (i < s && j >= r) || (i >= r && j < t);
            if free {
                basis.push(Matrix::unit(&field, n, p, i, j));
            }
        }
    }
    AffineMatrixSpace::new(base, &basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choose2;
    use crate::verify::{constant_rank, Verdict};

    fn gf(q: u32) -> Field {
        Field::with_order(q).unwrap()
    }

    fn lim() -> Limits {
        Limits::default()
    }

    fn one(f: &Field) -> AffineMatrixSpace {
        AffineMatrixSpace::point(Matrix::identity(f, 1))
    }

    #[test]
    fn nt_examples() {
        let f5 = gf(5);
        assert_eq!(nt_space(&f5, 1).dim(), 0);
        let s = nt_space(&f5, 3);
        assert_eq!(s.dim(), 3);
        assert!(constant_rank(&s, 3, &lim()).unwrap().holds());
        let f4 = gf(4);
        let c = constant_rank(&nt_space(&f4, 2), 2, &lim()).unwrap();
        assert_eq!((c.verdict, c.instances_checked), (Verdict::Holds, 4));
    }

    #[test]
    fn alternating_examples() {
        let f3 = gf(3);
        assert!(alternating_space(&f3, 1).is_empty());
        assert_eq!(alternating_space(&f3, 3).len(), 3);
        let f2 = gf(2);
        assert_eq!(alternating_space(&f2, 2), vec![Matrix::from_rows(&f2, &[&[0, 1], &[1, 0]])]);
        for m in alternating_space(&f3, 3) {
            assert_eq!(m.transpose(), m.neg());
        }
    }

    #[test]
    fn nonisotropy_examples() {
        let f3 = gf(3);
        assert!(is_nonisotropic(&Matrix::identity(&f3, 2), &lim()).unwrap());
        let f5 = gf(5);
        assert_eq!(isotropic_vector(&Matrix::identity(&f5, 2), &lim()).unwrap(), Some(vec![1, 2]));
        for q in [2, 3, 4, 5, 7] {
            assert!(is_nonisotropic(&Matrix::identity(&gf(q), 1), &lim()).unwrap());
        }
    }

    #[test]
    fn forms_examples() {
        let f3 = gf(3);
        let i1 = QuadraticForm::new(Matrix::identity(&f3, 1)).unwrap();
        let single = optimal_from_forms(&[i1.clone()], &lim()).unwrap();
        assert!(single.same_set(&one(&f3)));
        let two = optimal_from_forms(&[i1.clone(), i1], &lim()).unwrap();
        assert_eq!(two.dim(), 1);
        assert_eq!(two.base(), &Matrix::identity(&f3, 2));
        assert_eq!(two.basis(), vec![Matrix::unit(&f3, 2, 2, 0, 1)]);
        assert!(constant_rank(&two, 2, &lim()).unwrap().holds());

        let i2 = QuadraticForm::new(Matrix::identity(&f3, 2)).unwrap();
        let s = optimal_from_forms(&[i2], &lim()).unwrap();
        assert_eq!(s.dim(), 1);
        assert!(constant_rank(&s, 2, &lim()).unwrap().holds());

        let f5 = gf(5);
        let iso = QuadraticForm::new(Matrix::identity(&f5, 2)).unwrap();
        assert!(matches!(optimal_from_forms(&[iso], &lim()), Err(Error::Domain(m)) if m.contains("[1, 2]")));
    }

    #[test]
    fn joint_examples() {
        let f4 = gf(4);
        let s = nt_space(&f4, 2);
        assert!(joint(&[s.clone()]).unwrap().same_set(&s));
        assert_eq!(joint(&[one(&f4), one(&f4)]).unwrap().dim(), 1);
        let f5 = gf(5);
        let j = joint(&[nt_space(&f5, 2), nt_space(&f5, 1)]).unwrap();
        assert_eq!(j.dim(), 3);
        assert!(j.same_set(&nt_space(&f5, 3)));
        assert!(constant_rank(&j, 3, &lim()).unwrap().holds());
    }

    #[test]
    fn tilde_examples() {
        let f4 = gf(4);
        let w = nt_space(&f4, 2);
        assert!(tilde(&w, 2, 2).unwrap().same_set(&w));
        let t = tilde(&w, 3, 2).unwrap();
        assert_eq!(t.dim(), choose2(2) + 2 * (3 - 2));
        assert!(constant_rank(&t, 2, &lim()).unwrap().holds());
        assert!(matches!(tilde(&w, 2, 3), Err(Error::Usage(_))));
        assert!(matches!(tilde(&w, 3, 1), Err(Error::Usage(_))));
    }

    #[test]
    fn wedge_examples() {
        let f3 = gf(3);
        let w = wedge(Some(&one(&f3)), Some(&one(&f3)), 3, 3, &lim()).unwrap();
        assert_eq!(w.dim(), 3);
        let c = constant_rank(&w, 2, &lim()).unwrap();
        assert!(c.holds());
        assert_eq!(c.instances_checked, 27);

        let m = nt_space(&f3, 2);
        let degenerate = wedge(Some(&m), None, 4, 3, &lim()).unwrap();
        assert!(degenerate.same_set(&tilde(&m, 4, 3).unwrap()));

        let not_opt = AffineMatrixSpace::point(Matrix::zeros(&f3, 1, 1));
        assert!(matches!(wedge(Some(&not_opt), None, 2, 2, &lim()), Err(Error::Domain(_))));
    }

    #[test]
    fn wedge_dimension_formula() {
        let f4 = gf(4);
        for n in 1..=4usize {
            for p in 1..=n {
                for r in 1..=p {
                    for s in 0..=r {
                        let t = r - s;
                        let m = (t > 0).then(|| nt_space(&f4, t));
                        let nn = (s > 0).then(|| nt_space(&f4, s));
                        let w = wedge(m.as_ref(), nn.as_ref(), n, p, &lim()).unwrap();
                        assert_eq!(w.dim(), choose2(r) + s * (p - r) + (n - r) * t);
                        let d_eq = choose2(r) + r * (n - r);
                        if n == p {
                            assert_eq!(w.dim(), d_eq);
                        } else if s > 0 && t > 0 {
                            assert!(w.dim() < d_eq);
                        }
                    }
                }
            }
        }
    }
}
