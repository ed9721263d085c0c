//! Certified searches for the largest dimension of a constant-rank affine
//! space on small instances.
//!
//! *Extension* mode grows translation spaces `V` with `J_r + V` of constant
//! rank, one direction at a time. Every linear subspace is visited once: a
//! space is reached only through its greedy generating sequence (each new
//! direction is the smallest projective point outside the span so far).
//! When `|F| > r + 1` the directions are restricted to `D = 0`.
//!
//! *Exhaustive* mode enumerates every affine subspace of a given dimension
//! (a linear subspace plus a coset representative) against a rank table.

use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::analyze::reference_dims;
use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::matrix::{rank_in_place, Matrix};
use crate::space::AffineMatrixSpace;
use crate::subspace::{enumerate_subspaces, gaussian_binomial, VectorSubspace};
use crate::verify::{constant_rank, first_fa_violation, CheckResult, Counterexample};
use crate::{spacefile, Limits};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    Extension,
    Exhaustive,
}

impl fmt::Display for SearchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchMode::Extension => "extension",
            SearchMode::Exhaustive => "exhaustive",
        })
    }
}

impl std::str::FromStr for SearchMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "extension" => Ok(SearchMode::Extension),
            "exhaustive" => Ok(SearchMode::Exhaustive),
            _ => Err(Error::usage(format!("unknown search mode {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchVerdict {
    MatchesFormula,
    ExceedsFormula,
    BelowFormula,
    NotCertified,
}

impl fmt::Display for SearchVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchVerdict::MatchesFormula => "matches_formula",
            SearchVerdict::ExceedsFormula => "exceeds_formula",
            SearchVerdict::BelowFormula => "below_formula",
            SearchVerdict::NotCertified => "not_certified",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    pub q: usize,
    pub n: usize,
    pub p: usize,
    pub r: usize,
    pub mode: SearchMode,
    /// Whether directions were restricted by the Flanders–Atkinson identities.
    pub fa_pruning: bool,
    /// Exact when certified, otherwise the best lower bound reached.
    pub found_max_dim: usize,
    pub formula_value: usize,
    pub verdict: SearchVerdict,
    pub example_space: Option<AffineMatrixSpace>,
    pub spaces_examined: u128,
    pub elapsed: Duration,
}

impl SearchReport {
    pub fn certified(&self) -> bool {
        self.verdict != SearchVerdict::NotCertified
    }

    pub fn to_json(&self) -> Value {
        json!({
            "q": self.q,
            "n": self.n,
            "p": self.p,
            "r": self.r,
            "mode": self.mode.to_string(),
            "fa_pruning": self.fa_pruning,
            "found_max_dim": self.found_max_dim,
            "formula_value": self.formula_value,
            "verdict": self.verdict.to_string(),
            "example_space": self.example_space.as_ref().map(spacefile::to_value),
            "spaces_examined": self.spaces_examined.to_string(),
            "elapsed_ms": self.elapsed.as_millis() as u64,
        })
    }
}

impl fmt::Display for SearchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "instance: q={} n={} p={} r={}", self.q, self.n, self.p, self.r)?;
        writeln!(f, "mode: {}", self.mode)?;
        writeln!(f, "fa_pruning: {}", self.fa_pruning)?;
        writeln!(f, "found_max_dim: {}", self.found_max_dim)?;
        writeln!(f, "formula_value: {}", self.formula_value)?;
        writeln!(f, "verdict: {}", self.verdict)?;
        writeln!(f, "spaces_examined: {}", self.spaces_examined)?;
        write!(f, "elapsed: {:.3}s", self.elapsed.as_secs_f64())?;
        if let Some(s) = &self.example_space {
            write!(f, "\nexample_space: {s}")?;
        }
        Ok(())
    }
}

/// Vectors of `F^m` as integers: coordinate 0 is the most significant
/// base-`q` digit. Arithmetic goes through lookup tables on groups of
/// digits (each group a byte), so no per-coordinate work is needed.
struct Packed {
    q: usize,
    m: usize,
    /// `q^c`, the value range of one group.
    group: usize,
    groups: usize,
    weights: Vec<u32>,
    add: Vec<u8>,
    /// `mul[c * group + g]`: scaling a group by field element `c`.
    mul: Vec<u8>,
    size: u32,
}

const MAX_GROUPS: usize = 32;

#[derive(Clone, Copy)]
struct Pv {
    idx: u32,
    g: [u8; MAX_GROUPS],
}

impl Packed {
    fn new(field: &Field, m: usize) -> Self {
        let q = field.order();
        let mut c = 1;
        while q.pow(c as u32 + 1) <= 256 {
            c += 1;
        }
        let group = q.pow(c as u32);
        let groups = m.div_ceil(c).max(1);
        assert!(groups <= MAX_GROUPS);
        let weights = (0..groups).map(|j| group.pow(j as u32) as u32).collect();
        let split = |v: usize| -> Vec<Elem> { (0..c).map(|i| (v / q.pow(i as u32) % q) as Elem).collect() };
        let join = |d: &[Elem]| -> usize { d.iter().rev().fold(0, |acc, &x| acc * q + x as usize) };
        let mut add = vec![0u8; group * group];
        for a in 0..group {
            let da = split(a);
            for b in 0..group {
                let db = split(b);
                let s: Vec<Elem> = da.iter().zip(&db).map(|(&x, &y)| field.add(x, y)).collect();
                add[a * group + b] = join(&s) as u8;
            }
        }
        let mut mul = vec![0u8; q * group];
        for s in 0..q {
            for a in 0..group {
                let d: Vec<Elem> = split(a).iter().map(|&x| field.mul(s as Elem, x)).collect();
                mul[s * group + a] = join(&d) as u8;
            }
        }
        Packed {
            q,
            m,
            group,
            groups,
            weights,
            add,
            mul,
            size: q.pow(m as u32) as u32,
        }
    }

    fn from_idx(&self, idx: u32) -> Pv {
        let mut g = [0u8; MAX_GROUPS];
        let mut v = idx as usize;
        for slot in g.iter_mut().take(self.groups) {
            *slot = (v % self.group) as u8;
            v /= self.group;
        }
        Pv { idx, g }
    }

    fn from_digits(&self, d: &[Elem]) -> Pv {
        let idx = d.iter().fold(0usize, |acc, &x| acc * self.q + x as usize);
        self.from_idx(idx as u32)
    }

    fn digits(&self, idx: u32) -> Vec<Elem> {
        let mut out = vec![0; self.m];
        let mut v = idx as usize;
        for slot in out.iter_mut().rev() {
            *slot = (v % self.q) as Elem;
            v /= self.q;
        }
        out
    }

    #[inline]
    fn add_idx(&self, a: &Pv, b: &Pv) -> u32 {
        let mut idx = 0;
        for j in 0..self.groups {
            let s = self.add[a.g[j] as usize * self.group + b.g[j] as usize];
            idx += s as u32 * self.weights[j];
        }
        idx
    }

    fn add(&self, a: &Pv, b: &Pv) -> Pv {
        let mut g = [0u8; MAX_GROUPS];
        let mut idx = 0;
        for j in 0..self.groups {
            g[j] = self.add[a.g[j] as usize * self.group + b.g[j] as usize];
            idx += g[j] as u32 * self.weights[j];
        }
        Pv { idx, g }
    }

    fn scale(&self, c: Elem, a: &Pv) -> Pv {
        let mut g = [0u8; MAX_GROUPS];
        let mut idx = 0;
        for j in 0..self.groups {
            g[j] = self.mul[c as usize * self.group + a.g[j] as usize];
            idx += g[j] as u32 * self.weights[j];
        }
        Pv { idx, g }
    }
}

/// The matrix `base + Σ v_k E_{pos_k}`.
fn embed(base: &[Elem], field: &Field, positions: &[usize], v: &[Elem], out: &mut [Elem]) {
    out.copy_from_slice(base);
    for (&pos, &x) in positions.iter().zip(v) {
        out[pos] = field.add(out[pos], x);
    }
}

const NONE: u32 = u32::MAX;

struct Extension<'a> {
    packed: &'a Packed,
    /// For a direction `v`: its normalized projective representative if the
    /// whole line `J_r + F·v` has rank `r`, else `NONE`.
    rep: Vec<u32>,
    q: usize,
    cap: u64,
    nodes: AtomicU64,
    aborted: AtomicBool,
}

struct Branch {
    best: usize,
    seq: Vec<u32>,
    nodes: u64,
}

impl Extension<'_> {
    fn count_node(&self) -> bool {
        let total = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if total > self.cap {
            self.aborted.store(true, Ordering::Relaxed);
        }
        !self.aborted.load(Ordering::Relaxed)
    }

    /// Candidates `y` of `cands` that can follow `x` on top of the elements
    /// `w_elems` of `W`: every `y + a·x + w` (a ≠ 0) is good and its
    /// representative is larger than `y`.
    fn filter(&self, cands: &[Pv], z: &[Pv], x: u32) -> Vec<Pv> {
        cands
            .iter()
            .filter(|y| y.idx > x)
            .filter(|y| {
                z.iter().all(|zz| {
                    let r = self.rep[self.packed.add_idx(y, zz) as usize];
                    r != NONE && r > y.idx
                })
            })
            .copied()
            .collect()
    }

    /// Elements of `span(W, x) \ W` given all elements of `W`.
    fn new_elements(&self, w_elems: &[Pv], x: &Pv) -> Vec<Pv> {
        let mut out = Vec::with_capacity(w_elems.len() * (self.q - 1));
        for c in 1..self.q as Elem {
            let cx = self.packed.scale(c, x);
            for w in w_elems {
                out.push(self.packed.add(&cx, w));
            }
        }
        out
    }

    fn dfs(&self, w_elems: &[Pv], seq: &mut Vec<u32>, cands: &[Pv], out: &mut Branch) {
        let dim = seq.len();
        for (i, x) in cands.iter().enumerate() {
            if dim + (cands.len() - i) <= out.best {
                return;
            }
            if !self.count_node() {
                return;
            }
            out.nodes += 1;
            let z = self.new_elements(w_elems, x);
            let next = self.filter(&cands[i + 1..], &z, x.idx);
            seq.push(x.idx);
            if dim + 1 > out.best {
                out.best = dim + 1;
                out.seq = seq.clone();
            }
            if !next.is_empty() && dim + 1 + next.len() > out.best {
                let mut w2 = w_elems.to_vec();
                w2.extend_from_slice(&z);
                self.dfs(&w2, seq, &next, out);
            }
            seq.pop();
        }
    }
}

struct Instance {
    field: Field,
    n: usize,
    p: usize,
    r: usize,
    formula: usize,
}

fn instance(field: &Field, n: usize, p: usize, r: usize) -> Result<Instance> {
    let dims = reference_dims(n, p, r)?;
    Ok(Instance {
        field: field.clone(),
        n,
        p,
        r,
        formula: dims.d_eq,
    })
}

fn table_cap(what: &str, size: u128, cap: u64) -> Result<()> {
    Error::check_cap(what, size, cap.min(u32::MAX as u64 - 1))
}

/// Outcome of one search strategy: maximum found, whether it is certified,
/// an example and the work done.
struct Outcome {
    found: usize,
    certified: bool,
    example: Option<AffineMatrixSpace>,
    examined: u128,
}

fn run_extension(inst: &Instance, fa: bool, limits: &Limits) -> Result<Outcome> {
    let (n, p, r) = (inst.n, inst.p, inst.r);
    let f = &inst.field;
    let positions: Vec<usize> = (0..n * p).filter(|&k| !(fa && k / p >= r && k % p >= r)).collect();
    let m = positions.len();
    let size = (f.order() as u128).saturating_pow(m as u32);
    let jr = Matrix::j_r(f, n, p, r);
    let seed_only = || Outcome {
        found: 0,
        certified: false,
        example: Some(AffineMatrixSpace::point(jr.clone())),
        examined: 0,
    };
    if table_cap("direction table", size, limits.max_enum).is_err() {
        return Ok(seed_only());
    }
    let packed = Packed::new(f, m);
    let q = f.order();
    let mut rep = vec![NONE; packed.size as usize];
    let mut mat = vec![0; n * p];
    let mut scratch = vec![0; n * p];
    for idx in 1..packed.size {
        let v = packed.digits(idx);
        if v.iter().find(|&&x| x != 0) != Some(&1) {
            continue;
        }
        if fa {
            embed(&vec![0; n * p], f, &positions, &v, &mut mat);
            let mm = Matrix::from_vec(f, n, p, mat.clone())?;
            if first_fa_violation(&mm, r).is_some() {
                continue;
            }
        }
        let good = (1..q as Elem).all(|t| {
            let tv: Vec<Elem> = v.iter().map(|&x| f.mul(t, x)).collect();
            embed(jr.as_slice(), f, &positions, &tv, &mut mat);
            scratch.copy_from_slice(&mat);
            rank_in_place(f, &mut scratch, n, p) == r
        });
        if good {
            let pv = packed.from_idx(idx);
            for t in 1..q as Elem {
                rep[packed.scale(t, &pv).idx as usize] = idx;
            }
        }
    }
    let ext = Extension {
        packed: &packed,
        rep,
        q,
        cap: limits.max_enum,
        nodes: AtomicU64::new(0),
        aborted: AtomicBool::new(false),
    };
    let roots: Vec<Pv> = (1..packed.size)
        .filter(|&i| ext.rep[i as usize] == i)
        .map(|i| packed.from_idx(i))
        .collect();
    let zero = vec![packed.from_idx(0)];
    let branches: Vec<Branch> = (0..roots.len())
        .into_par_iter()
        .map(|i| {
            let x = &roots[i];
            let mut out = Branch {
                best: 1,
                seq: vec![x.idx],
                nodes: 1,
            };
            if ext.count_node() {
                let z = ext.new_elements(&zero, x);
                let next = ext.filter(&roots[i + 1..], &z, x.idx);
                let mut w = zero.clone();
                w.extend_from_slice(&z);
                ext.dfs(&w, &mut vec![x.idx], &next, &mut out);
            }
            out
        })
        .collect();
    let examined = ext.nodes.load(Ordering::Relaxed).min(limits.max_enum) as u128;
    let aborted = ext.aborted.load(Ordering::Relaxed);
    let mut best: Option<&Branch> = None;
    for b in &branches {
        if best.is_none_or(|x| b.best > x.best) {
            best = Some(b);
        }
    }
    let (found, seq) = best.map_or((0, vec![]), |b| (b.best, b.seq.clone()));
    let basis: Vec<Matrix> = seq
        .iter()
        .map(|&idx| {
            let mut data = vec![0; n * p];
            embed(&vec![0; n * p], f, &positions, &packed.digits(idx), &mut data);
            Matrix::from_vec(f, n, p, data).unwrap()
        })
        .collect();
    Ok(Outcome {
        found,
        certified: !aborted,
        example: Some(AffineMatrixSpace::new(jr, &basis)?),
        examined: if aborted { examined } else { branches.iter().map(|b| b.nodes as u128).sum() },
    })
}

/// Rank table and arithmetic for the exhaustive mode.
struct Ambient {
    packed: Packed,
    ok: Vec<bool>,
}

fn ambient(inst: &Instance, limits: &Limits) -> Result<Ambient> {
    let (n, p) = (inst.n, inst.p);
    let f = &inst.field;
    let size = (f.order() as u128).saturating_pow((n * p) as u32);
    table_cap("rank table", size, limits.max_enum)?;
    let packed = Packed::new(f, n * p);
    let mut scratch = vec![0; n * p];
    let ok = (0..packed.size)
        .map(|idx| {
            scratch.copy_from_slice(&packed.digits(idx));
            rank_in_place(f, &mut scratch, n, p) == inst.r
        })
        .collect();
    Ok(Ambient { packed, ok })
}

/// First affine subspace `b + V` of dimension `d` (in subspace order, then
/// coset order) with constant rank, and the number examined before it.
fn first_space(inst: &Instance, amb: &Ambient, d: usize, limits: &Limits) -> Result<(Option<AffineMatrixSpace>, u128)> {
    let f = &inst.field;
    let m = inst.n * inst.p;
    let q = f.order() as u128;
    let subspaces = gaussian_binomial(q as u64, m, d);
    let total = subspaces.saturating_mul(q.pow((m - d) as u32));
    Error::check_cap(&format!("affine subspaces of dimension {d}"), total, limits.max_enum)?;
    let pk = &amb.packed;
    let test = |v: &VectorSubspace| -> Option<Vec<Elem>> {
        let basis: Vec<Pv> = v.basis().iter().map(|b| pk.from_digits(b)).collect();
        let mut elems = vec![pk.from_idx(0)];
        for b in basis.iter().rev() {
            let cur = elems.len();
            for c in 1..pk.q as Elem {
                let cb = pk.scale(c, b);
                for k in 0..cur {
                    let e = pk.add(&elems[k], &cb);
                    elems.push(e);
                }
            }
        }
        let free: Vec<usize> = (0..m).filter(|c| !v.pivots().contains(c)).collect();
        let reps = q.pow(free.len() as u32);
        let mut digits = vec![0 as Elem; m];
        (0..reps).find_map(|code| {
            let mut c = code;
            for &pos in free.iter().rev() {
                digits[pos] = (c % q) as Elem;
                c /= q;
            }
            let b = pk.from_digits(&digits);
            elems
                .iter()
                .all(|e| amb.ok[pk.add_idx(&b, e) as usize])
                .then(|| digits.clone())
        })
    };
    let mut iter = enumerate_subspaces(f, m, d, limits.max_enum)?;
    let per = q.pow((m - d) as u32);
    let mut seen: u128 = 0;
    const BATCH: usize = 512;
    loop {
        let batch: Vec<VectorSubspace> = iter.by_ref().take(BATCH).collect();
        if batch.is_empty() {
            return Ok((None, seen));
        }
        let hit = batch.par_iter().enumerate().find_map_first(|(i, v)| test(v).map(|b| (i, b)));
        if let Some((i, b)) = hit {
            let v = &batch[i];
            let base = Matrix::from_vec(f, inst.n, inst.p, b)?;
            let basis: Vec<Matrix> = v
                .basis()
                .iter()
                .map(|x| Matrix::from_vec(f, inst.n, inst.p, x.clone()).unwrap())
                .collect();
            seen += i as u128 * per + 1;
            return Ok((Some(AffineMatrixSpace::new(base, &basis)?), seen));
        }
        seen += batch.len() as u128 * per;
    }
}

fn run_exhaustive(inst: &Instance, limits: &Limits) -> Result<Outcome> {
    let m = inst.n * inst.p;
    let mut examined = 0u128;
    let mut lower: Option<(usize, AffineMatrixSpace)> = None;
    let amb = match ambient(inst, limits) {
        Ok(a) => a,
        Err(Error::Resource { .. }) => {
            return Ok(Outcome {
                found: 0,
                certified: false,
                example: Some(AffineMatrixSpace::point(Matrix::j_r(&inst.field, inst.n, inst.p, inst.r))),
                examined,
            })
        }
        Err(e) => return Err(e),
    };
    let try_dim = |d: usize, examined: &mut u128| -> Result<Option<Option<AffineMatrixSpace>>> {
        match first_space(inst, &amb, d, limits) {
            Ok((s, n)) => {
                *examined += n;
                Ok(Some(s))
            }
            Err(Error::Resource { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let start = (inst.formula + 1).min(m);
    let uncertified = |lower: Option<(usize, AffineMatrixSpace)>, examined| Outcome {
        found: lower.as_ref().map_or(0, |l| l.0),
        certified: false,
        example: lower.map(|l| l.1),
        examined,
    };
    let Some(first) = try_dim(start, &mut examined)? else {
        return Ok(uncertified(lower, examined));
    };
    match first {
        Some(s) => {
            lower = Some((start, s));
            let mut d = start;
            while d < m {
                match try_dim(d + 1, &mut examined)? {
                    None => return Ok(uncertified(lower, examined)),
                    Some(None) => break,
                    Some(Some(s)) => {
                        d += 1;
                        lower = Some((d, s));
                    }
                }
            }
        }
        None => {
            let mut d = start;
            loop {
                if d == 0 {
                    break;
                }
                d -= 1;
                match try_dim(d, &mut examined)? {
                    None => return Ok(uncertified(lower, examined)),
                    Some(None) => continue,
                    Some(Some(s)) => {
                        lower = Some((d, s));
                        break;
                    }
                }
            }
        }
    }
    Ok(Outcome {
        found: lower.as_ref().map_or(0, |l| l.0),
        certified: lower.is_some(),
        example: lower.map(|l| l.1),
        examined,
    })
}

/// Largest `d` such that some `d`-dimensional affine space of `n × p`
/// matrices has constant rank `r`, compared with `C(r,2) + r(n−r)`.
///
/// Running out of budget yields a `NotCertified` report, not an error.
pub fn search_max_dim(
    field: &Field,
    n: usize,
    p: usize,
    r: usize,
    mode: SearchMode,
    limits: &Limits,
) -> Result<SearchReport> {
    let inst = instance(field, n, p, r)?;
    let start = Instant::now();
    let fa = mode == SearchMode::Extension && field.order() > r + 1;
    let out = match mode {
        SearchMode::Extension => run_extension(&inst, fa, limits)?,
        SearchMode::Exhaustive => run_exhaustive(&inst, limits)?,
    };
    if let Some(s) = &out.example {
        let check = constant_rank(s, r, limits)?;
        if !check.holds() || s.dim() != out.found {
            return Err(Error::invariant(
                format!("search example does not re-verify: {}", check.detail),
                None,
            ));
        }
    }
    let verdict = if !out.certified {
        SearchVerdict::NotCertified
    } else {
        match out.found.cmp(&inst.formula) {
            std::cmp::Ordering::Equal => SearchVerdict::MatchesFormula,
            std::cmp::Ordering::Greater => SearchVerdict::ExceedsFormula,
            std::cmp::Ordering::Less => SearchVerdict::BelowFormula,
        }
    };
    Ok(SearchReport {
        q: field.order(),
        n,
        p,
        r,
        mode,
        fa_pruning: fa,
        found_max_dim: out.found,
        formula_value: inst.formula,
        verdict,
        example_space: out.example,
        spaces_examined: out.examined,
        elapsed: start.elapsed(),
    })
}

/// Holds iff no `d`-dimensional affine subspace of `n × p` matrices has
/// constant rank `r`; otherwise the first such space is the counterexample.
pub fn certify_no_dim(field: &Field, n: usize, p: usize, r: usize, d: usize, limits: &Limits) -> Result<CheckResult> {
    if r == 0 || r > n.min(p) {
        return Err(Error::usage(format!("rank {r} out of range for {n}×{p}")));
    }
    if d > n * p {
        return Err(Error::usage(format!("dimension {d} exceeds {}", n * p)));
    }
    let inst = Instance {
        field: field.clone(),
        n,
        p,
        r,
        formula: 0,
    };
    let amb = ambient(&inst, limits)?;
    let (hit, seen) = first_space(&inst, &amb, d, limits)?;
    Ok(match hit {
        None => CheckResult::pass(format!("no {d}-dimensional affine space has constant rank {r}"), seen),
        Some(s) => CheckResult::fail(
            Counterexample::Space(s),
            format!("found a {d}-dimensional space of constant rank {r}"),
            seen,
        ),
    })
}

/// The search on a field with `|F| ≤ r + 1`, where the dimension formula
/// is not known to hold. Identity-based pruning is off.
pub fn probe_small_field(
    field: &Field,
    n: usize,
    p: usize,
    r: usize,
    mode: SearchMode,
    limits: &Limits,
) -> Result<SearchReport> {
    if field.order() > r + 1 {
        return Err(Error::usage(format!(
            "probe needs |F| ≤ r + 1, got |F| = {} and r = {r}",
            field.order()
        )));
    }
    search_max_dim(field, n, p, r, mode, limits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(q: u32) -> Field {
        Field::with_order(q).unwrap()
    }

    fn lim() -> Limits {
        Limits::default()
    }

    #[test]
    fn packed_arithmetic_matches_digits() {
        for q in [2, 3, 4, 5, 9] {
            let f = gf(q);
            let pk = Packed::new(&f, 5);
            for (a, b) in [(0u32, 1u32), (7, 11), (pk.size - 1, 3), (100 % pk.size, 200 % pk.size)] {
                let (da, db) = (pk.digits(a), pk.digits(b));
                let sum: Vec<Elem> = da.iter().zip(&db).map(|(&x, &y)| f.add(x, y)).collect();
                let (pa, pb) = (pk.from_idx(a), pk.from_idx(b));
                assert_eq!(pk.add_idx(&pa, &pb), pk.from_digits(&sum).idx);
                let sc: Vec<Elem> = da.iter().map(|&x| f.mul((q - 1) as Elem, x)).collect();
                assert_eq!(pk.scale((q - 1) as Elem, &pa).idx, pk.from_digits(&sc).idx);
            }
        }
    }

    #[test]
    fn certify_examples() {
        let f3 = gf(3);
        let c = certify_no_dim(&f3, 2, 2, 1, 2, &lim()).unwrap();
        assert!(c.holds());
        assert_eq!(c.instances_checked, 1170);
        let c = certify_no_dim(&f3, 2, 2, 1, 1, &lim()).unwrap();
        match c.counterexample {
            Some(Counterexample::Space(s)) => {
                assert_eq!(s.dim(), 1);
                assert!(constant_rank(&s, 1, &lim()).unwrap().holds());
            }
            other => panic!("expected a space, got {other:?}"),
        }
        assert!(certify_no_dim(&gf(4), 2, 2, 2, 2, &lim()).unwrap().holds());
        assert!(matches!(
            certify_no_dim(&gf(4), 2, 2, 2, 2, &Limits::with_cap(100)),
            Err(Error::Resource { .. })
        ));
    }

    #[test]
    fn search_examples() {
        let r = search_max_dim(&gf(3), 2, 2, 1, SearchMode::Exhaustive, &lim()).unwrap();
        assert_eq!((r.found_max_dim, r.verdict), (1, SearchVerdict::MatchesFormula));
        let r = search_max_dim(&gf(4), 2, 2, 2, SearchMode::Exhaustive, &lim()).unwrap();
        assert_eq!((r.found_max_dim, r.verdict), (1, SearchVerdict::MatchesFormula));
        let r = search_max_dim(&gf(5), 3, 2, 2, SearchMode::Extension, &lim()).unwrap();
        assert_eq!((r.found_max_dim, r.verdict), (3, SearchVerdict::MatchesFormula));
        assert!(r.fa_pruning);
    }

    #[test]
    fn modes_agree_on_small_instances() {
        for (q, n, p, r) in [(2, 2, 2, 1), (3, 2, 2, 1), (2, 2, 2, 2), (3, 2, 2, 2), (2, 3, 2, 1), (4, 2, 2, 1)] {
            let f = gf(q);
            let a = search_max_dim(&f, n, p, r, SearchMode::Extension, &lim()).unwrap();
            let b = search_max_dim(&f, n, p, r, SearchMode::Exhaustive, &lim()).unwrap();
            assert!(a.certified() && b.certified(), "{q} {n} {p} {r}");
            assert_eq!(a.found_max_dim, b.found_max_dim, "{q} {n} {p} {r}");
        }
    }

    #[test]
    fn small_caps_give_not_certified() {
        let r = search_max_dim(&gf(5), 3, 2, 2, SearchMode::Extension, &Limits::with_cap(10)).unwrap();
        assert_eq!(r.verdict, SearchVerdict::NotCertified);
        assert!(constant_rank(r.example_space.as_ref().unwrap(), 2, &lim()).unwrap().holds());
        let r = search_max_dim(&gf(5), 3, 2, 2, SearchMode::Exhaustive, &Limits::with_cap(1000)).unwrap();
        assert_eq!(r.verdict, SearchVerdict::NotCertified);
    }

    #[test]
    fn probe_requires_small_field() {
        assert!(matches!(
            probe_small_field(&gf(5), 2, 2, 1, SearchMode::Extension, &lim()),
            Err(Error::Usage(_))
        ));
        let r = probe_small_field(&gf(2), 2, 2, 1, SearchMode::Exhaustive, &lim()).unwrap();
        assert_eq!(r.formula_value, 1);
        assert!(!r.fa_pruning);
        assert!(r.certified());
    }
}
