//! `crlab`: build, check, analyze and search constant-rank matrix spaces.
//!
//! Exit codes: 0 success or property holds, 1 property violated, 2 usage or
//! parse error, 3 enumeration cap exceeded.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crlab::analyze::{decompose_max, equiv_exhaustive, reference_dims, st_invariants};
use crlab::construct::{self, QuadraticForm};
use crlab::search::{probe_small_field, search_max_dim, SearchMode};
use crlab::verify::{self, CheckResult, Verdict};
use crlab::{spacefile, AffineMatrixSpace, Elem, Error, Field, Limits, Matrix, VectorSubspace};

#[derive(Parser)]
#[command(name = "crlab", version, about = "Constant-rank affine matrix spaces over finite fields")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a space and print it as a space file.
    Construct(ConstructArgs),
    /// Run one check on a space file.
    Verify(VerifyArgs),
    /// Print the (s, t) signature of a constant-rank space.
    Invariants(SpaceRank),
    /// Split a maximal space into wedge form.
    Decompose(DecomposeArgs),
    /// Compare two spaces up to equivalence.
    Equiv(EquivArgs),
    /// Certify the largest constant-rank dimension of an instance.
    Search(SearchArgs),
    /// The same search on a field with at most r + 1 elements.
    ProbeSmallField(SearchArgs),
    /// Print the reference dimensions for n, p, r.
    Formulas(FormulaArgs),
}

#[derive(Args, Clone)]
struct FieldArgs {
    /// Field order, or the prime when --k is given.
    #[arg(long)]
    q: u32,
    /// Extension degree.
    #[arg(long)]
    k: Option<u32>,
}

#[derive(Copy, Clone, ValueEnum)]
enum Kind {
    Nt,
    Alternating,
    Joint,
    Tilde,
    Wedge,
    OptimalFromForms,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[command(flatten)]
    field: FieldArgs,
    /// Size for nt and alternating.
    #[arg(long)]
    size: Option<usize>,
    /// Inner space for tilde, or a comma-separated list for joint:
    /// `nt:R`, `forms:i2+i1`, `file:PATH`.
    #[arg(long)]
    inner: Option<String>,
    /// Wedge factor M (t × t); `none` for t = 0.
    #[arg(long)]
    inner_m: Option<String>,
    /// Wedge factor N (s × s); `none` for s = 0.
    #[arg(long)]
    inner_n: Option<String>,
    /// Forms for optimal-from-forms, e.g. `i2,i1` (`iK` is the K × K identity).
    #[arg(long)]
    forms: Option<String>,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Check {
    ConstantRank,
    Fa,
    Optimal,
    TrivialSpectrum,
    Transitivity,
    Adapted,
    Ortho,
}

#[derive(Args)]
struct SpaceRank {
    /// Space file; standard input when absent or `-`.
    #[arg(long)]
    space: Option<PathBuf>,
    /// Rank; defaults to the rank of the base point.
    #[arg(long)]
    rank: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    check: Check,
    #[command(flatten)]
    input: SpaceRank,
    /// constant-rank only: test this many seeded random elements instead.
    #[arg(long)]
    sample: Option<u64>,
    /// ortho: left subspace of F^n, vectors separated by `;` (or `zero`).
    #[arg(long)]
    left: Option<String>,
    /// ortho: right subspace of F^p.
    #[arg(long)]
    right: Option<String>,
    /// fa: move the space to one containing J_r first.
    #[arg(long)]
    normalize: bool,
}

#[derive(Args)]
struct DecomposeArgs {
    #[command(flatten)]
    input: SpaceRank,
    /// Write witness.json, m_space.json and n_space.json here.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct EquivArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[arg(long)]
    rank: Option<usize>,
    /// Search GL_n × GL_p for a witness.
    #[arg(long)]
    exhaustive: bool,
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long)]
    rows: usize,
    #[arg(long)]
    cols: usize,
    #[arg(long)]
    rank: usize,
    #[arg(long, default_value = "extension")]
    mode: String,
    /// Overrides CRLAB_MAX_ENUM for this search.
    #[arg(long)]
    cap: Option<u64>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct FormulaArgs {
    #[arg(long)]
    rows: usize,
    #[arg(long)]
    cols: usize,
    #[arg(long)]
    rank: usize,
}

type CliResult = Result<u8, Error>;

fn usage(msg: impl Into<String>) -> Error {
    // the library keeps its constructors private; parse errors go through here
    Error::Usage(msg.into())
}

fn field_of(a: &FieldArgs) -> Result<Field, Error> {
    match a.k {
        Some(k) if crlab::field::is_prime(a.q) => Field::new(a.q, k),
        Some(k) => {
            let f = Field::with_order(a.q)?;
            if f.degree() != k {
                return Err(usage(format!("--q {} is GF({}^{}), not degree {k}", a.q, f.characteristic(), f.degree())));
            }
            Ok(f)
        }
        None => Field::with_order(a.q),
    }
}

fn read_space(path: Option<&Path>) -> Result<AffineMatrixSpace, Error> {
    let text = match path {
        None => read_stdin()?,
        Some(p) if p.as_os_str() == "-" => read_stdin()?,
        Some(p) => fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?,
    };
    let parsed = spacefile::parse(&text)?;
    for w in &parsed.warnings {
        eprintln!("warning: {w}");
    }
    Ok(parsed.space)
}

fn read_stdin() -> Result<String, Error> {
    let mut s = String::new();
    io::stdin()
        .read_to_string(&mut s)
        .map_err(|e| usage(format!("standard input: {e}")))?;
    Ok(s)
}

fn inner_space(spec: &str, field: &Field, limits: &Limits) -> Result<AffineMatrixSpace, Error> {
    let (kind, arg) = spec
        .split_once(':')
        .ok_or_else(|| usage(format!("inner space {spec:?}: expected nt:R, forms:LIST or file:PATH")))?;
    match kind {
        "nt" => {
            let r = arg.parse().map_err(|_| usage(format!("nt:{arg}: not a size")))?;
            if r == 0 {
                return Err(usage("nt:0 is empty"));
            }
            Ok(construct::nt_space(field, r))
        }
        "forms" => construct::optimal_from_forms(&parse_forms(arg, '+', field)?, limits),
        "file" => {
            let s = read_space(Some(Path::new(arg)))?;
            if s.field() != field {
                return Err(usage(format!("{arg}: space is over {:?}, expected {field:?}", s.field())));
            }
            Ok(s)
        }
        _ => Err(usage(format!("unknown inner space kind {kind:?}"))),
    }
}

fn parse_forms(list: &str, sep: char, field: &Field) -> Result<Vec<QuadraticForm>, Error> {
    list.split(sep)
        .map(|tok| {
            let tok = tok.trim();
            let k: usize = tok
                .strip_prefix('i')
                .and_then(|x| x.parse().ok())
                .filter(|&k| k > 0)
                .ok_or_else(|| usage(format!("form {tok:?}: expected iK, e.g. i2")))?;
            QuadraticForm::new(Matrix::identity(field, k))
        })
        .collect()
}

fn need<T: Copy>(v: Option<T>, flag: &str, kind: &str) -> Result<T, Error> {
    v.ok_or_else(|| usage(format!("{kind} needs {flag}")))
}

fn construct_cmd(a: &ConstructArgs, limits: &Limits) -> CliResult {
    let f = field_of(&a.field)?;
    let space = match a.kind {
        Kind::Nt => {
            let r = need(a.size, "--size", "nt")?;
            if r == 0 {
                return Err(usage("--size must be positive"));
            }
            construct::nt_space(&f, r)
        }
        Kind::Alternating => {
            let s = need(a.size, "--size", "alternating")?;
            if s == 0 {
                return Err(usage("--size must be positive"));
            }
            AffineMatrixSpace::new(Matrix::zeros(&f, s, s), &construct::alternating_space(&f, s))?
        }
        Kind::Joint => {
            let list = a.inner.as_deref().ok_or_else(|| usage("joint needs --inner"))?;
            let parts = list
                .split(',')
                .map(|s| inner_space(s.trim(), &f, limits))
                .collect::<Result<Vec<_>, _>>()?;
            construct::joint(&parts)?
        }
        Kind::Tilde => {
            let inner = inner_space(a.inner.as_deref().ok_or_else(|| usage("tilde needs --inner"))?, &f, limits)?;
            let n = need(a.rows, "--rows", "tilde")?;
            let p = need(a.cols, "--cols", "tilde")?;
            construct::tilde(&inner, n, p)?
        }
        Kind::Wedge => {
            let factor = |s: &Option<String>, flag: &str| -> Result<Option<AffineMatrixSpace>, Error> {
                match s.as_deref() {
                    None => Err(usage(format!("wedge needs {flag} (use `none` for an empty factor)"))),
                    Some("none") => Ok(None),
                    Some(spec) => inner_space(spec, &f, limits).map(Some),
                }
            };
            let m = factor(&a.inner_m, "--inner-m")?;
            let nn = factor(&a.inner_n, "--inner-n")?;
            let n = need(a.rows, "--rows", "wedge")?;
            let p = need(a.cols, "--cols", "wedge")?;
            construct::wedge(m.as_ref(), nn.as_ref(), n, p, limits)?
        }
        Kind::OptimalFromForms => {
            let list = a.forms.as_deref().ok_or_else(|| usage("optimal-from-forms needs --forms"))?;
            construct::optimal_from_forms(&parse_forms(list, ',', &f)?, limits)?
        }
    };
    print!("{}", spacefile::to_string(&space));
    Ok(0)
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Holds | Verdict::NotCertified => 0,
        Verdict::Violated => 1,
    }
}

fn report(c: &CheckResult) -> u8 {
    println!("{c}");
    verdict_code(c.verdict)
}

fn rank_or_base(rank: Option<usize>, s: &AffineMatrixSpace) -> usize {
    rank.unwrap_or_else(|| s.base().rank())
}

fn parse_subspace(spec: &str, field: &Field, dim: usize, flag: &str) -> Result<VectorSubspace, Error> {
    if spec.trim() == "zero" {
        return Ok(VectorSubspace::zero(field, dim));
    }
    let vectors = spec
        .split(';')
        .map(|v| {
            let entries = v
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<u64>()
                        .ok()
                        .filter(|&e| field.is_valid(e))
                        .map(|e| e as Elem)
                        .ok_or_else(|| usage(format!("{flag}: bad entry {x:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            if entries.len() != dim {
                return Err(usage(format!("{flag}: vector {v:?} should have {dim} entries")));
            }
            Ok(entries)
        })
        .collect::<Result<Vec<_>, _>>()?;
    VectorSubspace::span(field, dim, &vectors)
}

fn verify_cmd(a: &VerifyArgs, limits: &Limits) -> CliResult {
    let s = read_space(a.input.space.as_deref())?;
    let rank = rank_or_base(a.input.rank, &s);
    let f = s.field().clone();
    match a.check {
        Check::ConstantRank => match a.sample {
            Some(n) => Ok(report(&verify::constant_rank_sampled(&s, rank, n, limits.seed))),
            None => Ok(report(&verify::constant_rank(&s, rank, limits)?)),
        },
        Check::Fa => {
            let target = if a.normalize {
                crlab::analyze::normalize(&s, rank, limits)?.0
            } else {
                s
            };
            Ok(report(&verify::fa_check(&target, rank, limits)?))
        }
        Check::Optimal => Ok(report(&verify::is_optimal(&s, limits)?)),
        Check::TrivialSpectrum => {
            if !s.base().is_zero() {
                eprintln!("warning: base point ignored; checking the span of the basis");
            }
            Ok(report(&verify::trivial_spectrum(&f, s.rows(), &s.basis(), limits)?))
        }
        Check::Transitivity => {
            let h = verify::transitivity_exclusion(&s, limits)?;
            println!("verdict: holds\nhyperplane: {h}");
            Ok(0)
        }
        Check::Adapted => {
            let idx = verify::adapted_vectors(&f, s.rows(), &s.basis(), limits)?;
            let shown: Vec<String> = idx.iter().map(|i| format!("e{}", i + 1)).collect();
            println!("verdict: holds\nadapted: {}", shown.join(" "));
            Ok(0)
        }
        Check::Ortho => match (&a.left, &a.right) {
            (Some(l), Some(r)) => {
                let left = parse_subspace(l, &f, s.rows(), "--left")?;
                let right = parse_subspace(r, &f, s.cols(), "--right")?;
                let ok = verify::ortho_check(&s, &left, &right)?;
                println!("verdict: {}", if ok { "holds" } else { "violated" });
                Ok(if ok { 0 } else { 1 })
            }
            (None, None) => Ok(report(&verify::unique_ortho_pair(&s, rank, limits)?)),
            _ => Err(usage("ortho needs both --left and --right, or neither")),
        },
    }
}

fn matrix_json(m: &Matrix) -> serde_json::Value {
    json!((0..m.rows()).map(|i| m.row(i).to_vec()).collect::<Vec<_>>())
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<(), Error> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn decompose_cmd(a: &DecomposeArgs, limits: &Limits) -> CliResult {
    let s = read_space(a.input.space.as_deref())?;
    let r = rank_or_base(a.input.rank, &s);
    let d = decompose_max(&s, r, limits)?;
    println!("s: {}\nt: {}", d.s, d.t);
    println!("witness P: {}\nwitness Q: {}", d.witness.p, d.witness.q);
    let witness = serde_json::to_string_pretty(&json!({
        "p": matrix_json(&d.witness.p),
        "q": matrix_json(&d.witness.q),
    }))
    .unwrap();
    match &a.out_dir {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
            write_file(dir, "witness.json", &(witness + "\n"))?;
            for (name, part) in [("m_space.json", &d.m_space), ("n_space.json", &d.n_space)] {
                if let Some(sp) = part {
                    write_file(dir, name, &spacefile::to_string(sp))?;
                }
            }
            println!("written to {}", dir.display());
        }
        None => {
            for (name, part) in [("M", &d.m_space), ("N", &d.n_space)] {
                match part {
                    Some(sp) => print!("{name}:\n{}", spacefile::to_string(sp)),
                    None => println!("{name}: none"),
                }
            }
        }
    }
    Ok(0)
}

fn equiv_cmd(a: &EquivArgs, limits: &Limits) -> CliResult {
    let x = read_space(Some(&a.a))?;
    let y = read_space(Some(&a.b))?;
    if x.shape() != y.shape() || x.field() != y.field() {
        return Err(usage("spaces have different shapes or fields"));
    }
    if a.exhaustive {
        println!("mode: exhaustive");
        return Ok(match equiv_exhaustive(&x, &y, limits)? {
            Some(w) => {
                println!("verdict: equivalent\nwitness P: {}\nwitness Q: {}", w.p, w.q);
                0
            }
            None => {
                println!("verdict: not_equivalent");
                1
            }
        });
    }
    println!("mode: invariants");
    if x.dim() != y.dim() {
        println!("verdict: not_equivalent\ndetail: dimensions {} and {}", x.dim(), y.dim());
        return Ok(1);
    }
    let r = rank_or_base(a.rank, &x);
    let (sx, sy) = (st_invariants(&x, r, limits)?, st_invariants(&y, r, limits)?);
    println!("a: {sx}\nb: {sy}");
    if sx.invariant && sy.invariant && (sx.s, sx.t) != (sy.s, sy.t) {
        println!("verdict: not_equivalent");
        Ok(1)
    } else {
        println!("verdict: not_certified\ndetail: signatures do not separate the spaces; use --exhaustive");
        Ok(0)
    }
}

fn search_cmd(a: &SearchArgs, limits: &Limits, probe: bool) -> CliResult {
    let f = field_of(&a.field)?;
    let mode: SearchMode = a.mode.parse()?;
    let lim = Limits {
        max_enum: a.cap.unwrap_or(limits.max_enum),
        ..*limits
    };
    let rep = if probe {
        probe_small_field(&f, a.rows, a.cols, a.rank, mode, &lim)?
    } else {
        search_max_dim(&f, a.rows, a.cols, a.rank, mode, &lim)?
    };
    if a.json {
        println!("{}", serde_json::to_string_pretty(&rep.to_json()).unwrap());
    } else {
        println!("{rep}");
    }
    Ok(0)
}

fn formulas_cmd(a: &FormulaArgs) -> CliResult {
    let d = reference_dims(a.rows, a.cols, a.rank)?;
    println!("d_eq={}\nd_le={}\nd_ge={}", d.d_eq, d.d_le, d.d_ge);
    Ok(0)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Usage(_) | Error::Precondition(_) => 2,
        Error::Domain(_) | Error::Invariant { .. } => 1,
        Error::Resource { .. } => 3,
    }
}

fn setup_threads() -> Result<(), Error> {
    if let Ok(v) = std::env::var("CRLAB_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| usage(format!("CRLAB_THREADS: cannot parse {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| usage(format!("CRLAB_THREADS: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    setup_threads()?;
    let limits = Limits::from_env()?;
    match &cli.cmd {
        Cmd::Construct(a) => construct_cmd(a, &limits),
        Cmd::Verify(a) => verify_cmd(a, &limits),
        Cmd::Invariants(a) => {
            let s = read_space(a.space.as_deref())?;
            let r = rank_or_base(a.rank, &s);
            println!("{}", st_invariants(&s, r, &limits)?);
            Ok(0)
        }
        Cmd::Decompose(a) => decompose_cmd(a, &limits),
        Cmd::Equiv(a) => equiv_cmd(a, &limits),
        Cmd::Search(a) => search_cmd(a, &limits, false),
        Cmd::ProbeSmallField(a) => search_cmd(a, &limits, true),
        Cmd::Formulas(a) => formulas_cmd(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(c) => c,
        Err(e) => {
            if let Error::Invariant { witness: Some(m), .. } = &e {
                println!("counterexample: {m}");
            }
            eprintln!("error: {e}");
            exit_code(&e)
        }
    };
    io::stdout().flush().ok();
    ExitCode::from(code)
}
