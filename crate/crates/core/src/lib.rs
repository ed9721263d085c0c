//! Constant-rank affine subspaces of matrices over finite fields.
//!
//! The crate builds the classical maximal constructions (upper unitriangular
//! spaces, joints, tilde extensions and wedges), checks constant rank and the
//! rank identities such spaces must satisfy, decomposes maximal spaces back
//! into wedge form, and searches small instances exhaustively for the
//! largest constant-rank dimension.
//!
//! ```
//! use crlab::{construct, verify, Field, Limits};
//!
//! let f = Field::with_order(4).unwrap();
//! let w = construct::tilde(&construct::nt_space(&f, 2), 3, 2).unwrap();
//! assert_eq!(w.dim(), 3);
//! let check = verify::constant_rank(&w, 2, &Limits::default()).unwrap();
//! assert!(check.holds());
//! ```

pub mod analyze;
pub mod construct;
pub mod error;
pub mod field;
pub mod matrix;
pub mod search;
pub mod space;
pub mod spacefile;
pub mod subspace;
pub mod verify;

pub use error::{Error, Result};
pub use field::{Elem, Field};
pub use matrix::Matrix;
pub use space::{AffineMatrixSpace, EquivalenceWitness};
pub use subspace::VectorSubspace;

use rayon::prelude::*;

/// Default cap on the number of items any single enumeration may visit.
pub const DEFAULT_MAX_ENUM: u64 = 10_000_000;

/// Enumeration limits and the seed used by sampling modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_enum: u64,
    pub seed: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_enum: DEFAULT_MAX_ENUM,
            seed: 0,
        }
    }
}

impl Limits {
    pub fn with_cap(max_enum: u64) -> Self {
        Limits {
            max_enum,
            ..Default::default()
        }
    }

    /// Reads `CRLAB_MAX_ENUM` and `CRLAB_SEED`, falling back to defaults.
    pub fn from_env() -> Result<Self> {
        let mut l = Limits::default();
        if let Ok(v) = std::env::var("CRLAB_MAX_ENUM") {
            l.max_enum = v
                .trim()
                .replace('_', "")
                .parse()
                .map_err(|_| Error::usage(format!("CRLAB_MAX_ENUM: cannot parse {v:?}")))?;
        }
        if let Ok(v) = std::env::var("CRLAB_SEED") {
            l.seed = v
                .trim()
                .parse()
                .map_err(|_| Error::usage(format!("CRLAB_SEED: cannot parse {v:?}")))?;
        }
        Ok(l)
    }
}

/// `C(n, 2)`.
pub fn choose2(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// The smallest index in `0..count` for which `f` yields a value.
///
/// Work is split across the rayon pool; the answer does not depend on the
/// number of workers. `init` builds per-worker scratch state.
pub(crate) fn find_first<S, T, I, F>(count: u128, init: I, f: F) -> Option<(u128, T)>
where
    T: Send,
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, u128) -> Option<T> + Sync + Send,
{
    const CHUNK: u128 = 1 << 14;
    if count <= CHUNK {
        let mut st = init();
        return (0..count).find_map(|i| f(&mut st, i).map(|t| (i, t)));
    }
    let chunks = count.div_ceil(CHUNK) as usize;
    (0..chunks).into_par_iter().find_map_first(|c| {
        let mut st = init();
        let lo = c as u128 * CHUNK;
        let hi = (lo + CHUNK).min(count);
        (lo..hi).find_map(|i| f(&mut st, i).map(|t| (i, t)))
    })
}
