//! Executable checks: constant rank, trivial spectrum, the Flanders–Atkinson
//! identities, optimality, adapted vectors, transitivity exclusions and
//! orthogonal subspace pairs.
//!
//! Enumerating checks return the counterexample that comes first in the
//! space's enumeration order, independent of the number of workers.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analyze::BlockView;
use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::matrix::{rank_in_place, Matrix};
use crate::space::AffineMatrixSpace;
use crate::subspace::{enumerate_subspaces, gaussian_binomial, VectorSubspace};
use crate::{choose2, find_first, Limits};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated,
    NotCertified,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::NotCertified => "not_certified",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Counterexample {
    Matrix(Matrix),
    /// A matrix with the nonzero eigenvalue it has.
    Eigen { matrix: Matrix, eigenvalue: Elem },
    Vector(Vec<Elem>),
    Dimension { found: usize, expected: usize },
    Space(AffineMatrixSpace),
    /// All orthogonal pairs found, when uniqueness fails.
    OrthoPairs(Vec<(VectorSubspace, VectorSubspace)>),
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Counterexample::Matrix(m) => write!(f, "matrix {m} (rank {})", m.rank()),
            Counterexample::Eigen { matrix, eigenvalue } => {
                write!(f, "matrix {matrix} with eigenvalue {eigenvalue}")
            }
            Counterexample::Vector(v) => write!(f, "vector {v:?}"),
            Counterexample::Dimension { found, expected } => {
                write!(f, "dimension {found}, expected {expected}")
            }
            Counterexample::Space(s) => write!(f, "space {s}"),
            Counterexample::OrthoPairs(pairs) => {
                write!(f, "{} orthogonal pairs", pairs.len())?;
                for (a, b) in pairs {
                    write!(f, "; ({a}, {b})")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub verdict: Verdict,
    pub counterexample: Option<Counterexample>,
    pub detail: String,
    pub instances_checked: u128,
}

impl CheckResult {
    pub(crate) fn pass(detail: impl Into<String>, instances: u128) -> Self {
        CheckResult {
            verdict: Verdict::Holds,
            counterexample: None,
            detail: detail.into(),
            instances_checked: instances,
        }
    }

    pub(crate) fn fail(cx: Counterexample, detail: impl Into<String>, instances: u128) -> Self {
        CheckResult {
            verdict: Verdict::Violated,
            counterexample: Some(cx),
            detail: detail.into(),
            instances_checked: instances,
        }
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    pub fn is_violated(&self) -> bool {
        self.verdict == Verdict::Violated
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "verdict: {}\ninstances_checked: {}", self.verdict, self.instances_checked)?;
        if !self.detail.is_empty() {
            write!(f, "\ndetail: {}", self.detail)?;
        }
        if let Some(cx) = &self.counterexample {
            write!(f, "\ncounterexample: {cx}")?;
        }
        Ok(())
    }
}

/// Certifies that every element of `s` has rank exactly `r`.
pub fn constant_rank(s: &AffineMatrixSpace, r: usize, limits: &Limits) -> Result<CheckResult> {
    let count = s.cardinality();
    Error::check_cap("constant-rank certification", count, limits.max_enum)?;
    let (n, p) = s.shape();
    let f = s.field();
    let hit = find_first(
        count,
        || (vec![0; n * p], vec![0; n * p]),
        |(elem, scratch), i| {
            s.element_into(i, elem);
            scratch.copy_from_slice(elem);
            (rank_in_place(f, scratch, n, p) != r).then(|| elem.clone())
        },
    );
    Ok(match hit {
        None => CheckResult::pass(format!("all {count} elements have rank {r}"), count),
        Some((i, data)) => {
            let m = Matrix::from_vec(f, n, p, data).unwrap();
            let detail = format!("element #{i} has rank {}, expected {r}", m.rank());
            CheckResult::fail(Counterexample::Matrix(m), detail, i + 1)
        }
    })
}

/// Draws `samples` random elements with a seeded generator. A pass is only
/// ever reported as `NotCertified`.
pub fn constant_rank_sampled(s: &AffineMatrixSpace, r: usize, samples: u64, seed: u64) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = s.field();
    let q = f.order();
    let basis = s.basis();
    for i in 0..samples {
        let mut m = s.base().clone();
        for b in &basis {
            m.add_scaled_mut(rng.gen_range(0..q) as Elem, b);
        }
        if m.rank() != r {
            let detail = format!("sample #{i} (seed {seed}) has rank {}", m.rank());
            return CheckResult::fail(Counterexample::Matrix(m), detail, i as u128 + 1);
        }
    }
    CheckResult {
        verdict: Verdict::NotCertified,
        counterexample: None,
        detail: format!("{samples} samples with seed {seed} all have rank {r}"),
        instances_checked: samples as u128,
    }
}

fn linear_space(field: &Field, n: usize, basis: &[Matrix]) -> Result<AffineMatrixSpace> {
    if basis.iter().any(|b| b.shape() != (n, n)) {
        return Err(Error::usage(format!("linear space of {n}×{n} matrices expected")));
    }
    AffineMatrixSpace::new(Matrix::zeros(field, n, n), basis)
}

/// Checks that no element of `span(basis)` ⊆ M_n has a nonzero eigenvalue in F.
pub fn trivial_spectrum(field: &Field, n: usize, basis: &[Matrix], limits: &Limits) -> Result<CheckResult> {
    let l = linear_space(field, n, basis)?;
    let count = l.cardinality();
    Error::check_cap("trivial-spectrum check", count, limits.max_enum)?;
    let q = field.order();
    let hit = find_first(
        count,
        || (vec![0; n * n], vec![0; n * n]),
        |(elem, scratch), i| {
            l.element_into(i, elem);
            (1..q as Elem).find_map(|lambda| {
                scratch.copy_from_slice(elem);
                for d in 0..n {
                    scratch[d * n + d] = field.sub(scratch[d * n + d], lambda);
                }
                (rank_in_place(field, scratch, n, n) < n).then(|| (elem.clone(), lambda))
            })
        },
    );
    Ok(match hit {
        None => CheckResult::pass("no element has a nonzero eigenvalue", count),
        Some((i, (data, lambda))) => {
            let m = Matrix::from_vec(field, n, n, data).unwrap();
            CheckResult::fail(
                Counterexample::Eigen {
                    matrix: m,
                    eigenvalue: lambda,
                },
                format!("element #{i} has eigenvalue {lambda}"),
                i + 1,
            )
        }
    })
}

/// The Flanders–Atkinson identities on a space containing `J_r`: every
/// translation element has `D = 0` and `B · A^k · C = 0` for `0 ≤ k < r`.
///
/// Powers `k ≥ r` are combinations of lower ones (Cayley–Hamilton on the
/// `r × r` block `A`), so the finite range is complete.
pub fn fa_check(s: &AffineMatrixSpace, r: usize, limits: &Limits) -> Result<CheckResult> {
    let (n, p) = s.shape();
    if r == 0 || r > n.min(p) {
        return Err(Error::usage(format!("rank {r} out of range for {n}×{p}")));
    }
    let j = Matrix::j_r(s.field(), n, p, r);
    if !s.contains(&j)? {
        return Err(Error::precondition(format!("J_{r} is not in the space")));
    }
    for (i, m) in s.basis().iter().enumerate() {
        if !BlockView::new(m, r).d.is_zero() {
            return Ok(CheckResult::fail(
                Counterexample::Matrix(m.clone()),
                format!("translation basis element #{i} has D ≠ 0"),
                i as u128 + 1,
            ));
        }
    }
    if n == r || p == r {
        return Ok(CheckResult::pass("B or C block is empty", s.dim() as u128));
    }
    let dirs = AffineMatrixSpace::from_parts(Matrix::zeros(s.field(), n, p), s.directions().clone())?;
    let count = dirs.cardinality();
    Error::check_cap("Flanders–Atkinson check", count, limits.max_enum)?;
    let hit = find_first(
        count,
        || (),
        |_, i| {
            let m = dirs.element(i);
            first_fa_violation(&m, r).map(|k| (m, k))
        },
    );
    Ok(match hit {
        None => CheckResult::pass(format!("D = 0 and B·A^k·C = 0 for k < {r}"), count),
        Some((i, (m, k))) => CheckResult::fail(
            Counterexample::Matrix(m),
            format!("translation element #{i} has B·A^{k}·C ≠ 0"),
            i + 1,
        ),
    })
}

/// Smallest `k < r` with `B · A^k · C ≠ 0`, if any.
pub(crate) fn first_fa_violation(m: &Matrix, r: usize) -> Option<usize> {
    let bv = BlockView::new(m, r);
    let mut x = bv.c.clone();
    for k in 0..r {
        if !bv.b.mul(&x).unwrap().is_zero() {
            return Some(k);
        }
        x = bv.a.mul(&x).unwrap();
    }
    None
}

/// Square, dimension `C(n,2)`, and inside `GL_n`.
pub fn is_optimal(s: &AffineMatrixSpace, limits: &Limits) -> Result<CheckResult> {
    if s.rows() != s.cols() {
        return Err(Error::usage("optimality is defined for square spaces only"));
    }
    let n = s.rows();
    if s.dim() != choose2(n) {
        return Ok(CheckResult::fail(
            Counterexample::Dimension {
                found: s.dim(),
                expected: choose2(n),
            },
            format!("dimension {} ≠ C({n},2)", s.dim()),
            0,
        ));
    }
    constant_rank(s, n, limits)
}

/// Indices `i` (0-based) such that `e_i` is adapted: the space contains no
/// nonzero matrix whose columns all lie on the line `F · e_i`.
///
/// Solved as an injectivity test, one small rank computation per index.
pub fn adapted_vectors(field: &Field, n: usize, basis: &[Matrix], limits: &Limits) -> Result<Vec<usize>> {
    let ts = trivial_spectrum(field, n, basis, limits)?;
    if !ts.holds() {
        return Err(Error::precondition(format!(
            "space does not have trivial spectrum: {}",
            ts.counterexample.map(|c| c.to_string()).unwrap_or_default()
        )));
    }
    let l = linear_space(field, n, basis)?;
    let dim = l.dim();
    let rows: Vec<Vec<Elem>> = l.directions().basis().to_vec();
    let adapted: Vec<usize> = (0..n)
        .filter(|&i| {
            // entries outside row i, one line per basis element
            let data: Vec<Elem> = rows
                .iter()
                .flat_map(|v| {
                    v.iter()
                        .enumerate()
                        .filter(|(pos, _)| pos / n != i)
                        .map(|(_, &e)| e)
                        .collect::<Vec<_>>()
                })
                .collect();
            let m = Matrix::from_vec(field, dim, n * (n - 1), data).unwrap();
            m.rank() == dim
        })
        .collect();
    if adapted.is_empty() {
        return Err(Error::invariant(
            "no standard basis vector is adapted for a trivial-spectrum space",
            None,
        ));
    }
    Ok(adapted)
}

/// A hyperplane `H` of F^n such that `span(S) · X = F^n` for every `X ∉ H`.
pub fn transitivity_exclusion(s: &AffineMatrixSpace, limits: &Limits) -> Result<VectorSubspace> {
    let opt = is_optimal(s, limits)?;
    if !opt.holds() {
        return Err(Error::precondition(format!("space is not optimal: {}", opt.detail)));
    }
    let n = s.rows();
    let f = s.field();
    let q = f.order() as u128;
    let count = q.checked_pow(n as u32).unwrap_or(u128::MAX);
    Error::check_cap("transitivity scan", count, limits.max_enum)?;
    let span = s.linear_span();
    let mut bad = VectorSubspace::zero(f, n);
    for code in 1..count {
        let x = digits(code, n, f.order());
        let images: Vec<Elem> = span.iter().flat_map(|m| m.mul_vec(&x)).collect();
        let mut buf = images;
        // images as rows; rank < n means they fail to span F^n
        if rank_in_place(f, &mut buf, span.len(), n) < n {
            bad.insert(&x)?;
        }
    }
    bad.hyperplane_envelope().ok_or_else(|| {
        Error::invariant("vectors with non-spanning orbit span the whole space", None)
    })
}

/// Base-q digits of `code`, most significant first.
pub(crate) fn digits(mut code: u128, len: usize, q: usize) -> Vec<Elem> {
    let mut v = vec![0; len];
    for slot in v.iter_mut().rev() {
        *slot = (code % q as u128) as Elem;
        code /= q as u128;
    }
    v
}

fn bilinear(x: &[Elem], m: &Matrix, y: &[Elem]) -> Elem {
    let f = m.field();
    let my = m.mul_vec(y);
    x.iter().zip(&my).fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
}

/// `X^T M Y = 0` for all `X ∈ left`, `Y ∈ right`, `M ∈ S`. By bilinearity and
/// affinity the base point and translation basis suffice.
pub fn ortho_check(s: &AffineMatrixSpace, left: &VectorSubspace, right: &VectorSubspace) -> Result<bool> {
    if left.ambient_dim() != s.rows() || right.ambient_dim() != s.cols() {
        return Err(Error::usage("orthogonality: subspace dimensions do not match the space"));
    }
    let mut gens = s.basis();
    gens.push(s.base().clone());
    Ok(gens.iter().all(|m| {
        left.basis()
            .iter()
            .all(|x| right.basis().iter().all(|y| bilinear(x, m, y) == 0))
    }))
}

/// The largest `G` with `left ⊥_S G`.
fn right_orthogonal(s: &AffineMatrixSpace, left: &VectorSubspace) -> VectorSubspace {
    let f = s.field();
    let mut gens = s.basis();
    gens.push(s.base().clone());
    // rows x^T M, one per (x, M)
    let mut rows = Vec::new();
    for m in &gens {
        let mt = m.transpose();
        for x in left.basis() {
            rows.extend(mt.mul_vec(x));
        }
    }
    let count = rows.len() / s.cols();
    let ker = Matrix::from_vec(f, count, s.cols(), rows).unwrap().kernel();
    VectorSubspace::span(f, s.cols(), &ker).unwrap()
}

/// Every pair `(F', G')` of subspaces of F^n with `dim F' + dim G' = 2n − r`
/// and `F' ⊥_S G'`.
pub fn orthogonal_pairs(
    s: &AffineMatrixSpace,
    r: usize,
    limits: &Limits,
) -> Result<Vec<(VectorSubspace, VectorSubspace)>> {
    if s.rows() != s.cols() {
        return Err(Error::usage("orthogonal pairs need a square space"));
    }
    let n = s.rows();
    if r > n {
        return Err(Error::usage("rank exceeds size"));
    }
    let f = s.field();
    let q = f.order() as u64;
    let target = 2 * n - r;
    let dims: Vec<(usize, usize)> = (0..=n)
        .filter(|&d1| target >= d1 && target - d1 <= n)
        .map(|d1| (d1, target - d1))
        .collect();
    let total: u128 = dims
        .iter()
        .map(|&(a, b)| gaussian_binomial(q, n, a) * gaussian_binomial(q, n, b))
        .sum();
    Error::check_cap("orthogonal pair enumeration", total, limits.max_enum)?;
    let mut found = Vec::new();
    for (d1, d2) in dims {
        for left in enumerate_subspaces(f, n, d1, u64::MAX)? {
            let g = right_orthogonal(s, &left);
            if g.dim() < d2 {
                continue;
            }
            for right in enumerate_subspaces(f, n, d2, u64::MAX)? {
                if right.is_contained_in(&g)? {
                    found.push((left.clone(), right));
                }
            }
        }
    }
    Ok(found)
}

/// Holds iff exactly one orthogonal pair of total dimension `2n − r` exists.
pub fn unique_ortho_pair(s: &AffineMatrixSpace, r: usize, limits: &Limits) -> Result<CheckResult> {
    let pairs = orthogonal_pairs(s, r, limits)?;
    let n = s.rows();
    let total: u128 = (0..=n)
        .filter(|&d1| 2 * n - r >= d1 && 2 * n - r - d1 <= n)
        .map(|d1| {
            gaussian_binomial(s.field().order() as u64, n, d1)
                * gaussian_binomial(s.field().order() as u64, n, 2 * n - r - d1)
        })
        .sum();
    if pairs.len() == 1 {
        let (a, b) = &pairs[0];
        Ok(CheckResult::pass(format!("unique pair F' = {a}, G' = {b}"), total))
    } else {
        let detail = format!("{} orthogonal pairs found", pairs.len());
        Ok(CheckResult::fail(Counterexample::OrthoPairs(pairs), detail, total))
    }
}
