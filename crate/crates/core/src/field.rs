//! Finite fields GF(p^k) with elements encoded as integers in `[0, q)`.
//!
//! The base-p digits of an encoding are the coefficients of the element's
//! polynomial representative, least significant first. `0` and `1` are the
//! additive and multiplicative identities. All arithmetic goes through
//! precomputed tables, so a [`Field`] is cheap to clone and share between
//! threads.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};

/// A field element, given by its canonical encoding.
pub type Elem = u8;

/// Largest supported field order; encodings must fit in an [`Elem`].
pub const MAX_ORDER: usize = 256;

/// Default moduli for every prime power up to 49: the lexicographically
/// smallest monic irreducible polynomial, coefficients little-endian.
const MODULUS_TABLE: &[(u32, u32, &[u32])] = &[
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 0, 1, 1]),
    (2, 4, &[1, 0, 0, 1, 1]),
    (2, 5, &[1, 0, 0, 1, 0, 1]),
    (3, 2, &[1, 0, 1]),
    (3, 3, &[1, 0, 2, 1]),
    (5, 2, &[1, 1, 1]),
    (7, 2, &[1, 0, 1]),
];

struct Tables {
    p: u32,
    k: u32,
    q: usize,
    modulus: Vec<u32>,
    add: Vec<Elem>,
    mul: Vec<Elem>,
    neg: Vec<Elem>,
    inv: Vec<Elem>,
}

/// The field GF(p^k) together with its chosen modulus.
#[derive(Clone)]
pub struct Field {
    t: Arc<Tables>,
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` as `p^k` with `p` prime, if possible.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let (mut rest, mut k) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

/// Remainder of `a` modulo the monic polynomial `m` over GF(p).
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut a = a.to_vec();
    let dm = m.len() - 1;
    while a.len() > dm {
        let lead = a.pop().unwrap() % p;
        if lead != 0 {
            let shift = a.len() - dm;
            for (i, &c) in m[..dm].iter().enumerate() {
                a[shift + i] = (a[shift + i] + (p - lead) * c % p) % p;
            }
        }
    }
    a
}

/// Irreducibility of a monic polynomial over GF(p), by trial division with
/// every monic polynomial of degree at most half its degree.
pub fn validate_modulus(p: u32, coeffs: &[u32]) -> Result<bool> {
    if !is_prime(p) {
        return Err(Error::usage(format!("{p} is not prime")));
    }
    if coeffs.len() < 2 {
        return Err(Error::usage("modulus must have degree at least 1"));
    }
    if coeffs.iter().any(|&c| c >= p) {
        return Err(Error::usage(format!(
            "modulus coefficients must lie in [0, {p})"
        )));
    }
    if *coeffs.last().unwrap() != 1 {
        return Err(Error::usage("modulus is not monic"));
    }
    let deg = coeffs.len() - 1;
    for d in 1..=deg / 2 {
        // all monic divisors of degree d
        let count = (p as usize).pow(d as u32);
        for code in 0..count {
            let mut div = Vec::with_capacity(d + 1);
            let mut c = code;
            for _ in 0..d {
                div.push((c % p as usize) as u32);
                c /= p as usize;
            }
            div.push(1);
            if poly_rem(coeffs, &div, p).iter().all(|&x| x == 0) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn default_modulus(p: u32, k: u32) -> Vec<u32> {
    if k == 1 {
        return vec![0, 1];
    }
    if let Some((_, _, m)) = MODULUS_TABLE.iter().find(|(tp, tk, _)| *tp == p && *tk == k) {
        return m.to_vec();
    }
    // Beyond the table: same rule, found by search (c0 most significant).
    let count = (p as usize).pow(k);
    for code in 0..count {
        let mut coeffs = vec![0u32; k as usize];
        let mut c = code;
        for slot in coeffs.iter_mut().rev() {
            *slot = (c % p as usize) as u32;
            c /= p as usize;
        }
        coeffs.push(1);
        if validate_modulus(p, &coeffs).unwrap_or(false) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl Field {
    /// GF(p^k) with the built-in default modulus.
    pub fn new(p: u32, k: u32) -> Result<Self> {
        Self::check_order(p, k)?;
        let m = default_modulus(p, k);
        Self::build(p, k, m)
    }

    /// GF(q) for a prime power `q`.
    pub fn with_order(q: u32) -> Result<Self> {
        let (p, k) =
            prime_power(q).ok_or_else(|| Error::usage(format!("{q} is not a prime power")))?;
        Self::new(p, k)
    }

    /// GF(p^k) with a caller-supplied modulus, which must be monic and
    /// irreducible of degree `k`. For `k = 1` the modulus must be `[0, 1]`.
    pub fn with_modulus(p: u32, k: u32, modulus: &[u32]) -> Result<Self> {
        Self::check_order(p, k)?;
        if modulus.len() != k as usize + 1 {
            return Err(Error::usage(format!(
                "modulus must have {} coefficients for k = {k}",
                k + 1
            )));
        }
        if k == 1 {
            if modulus != [0, 1] {
                return Err(Error::usage("for k = 1 the modulus must be [0, 1]"));
            }
        } else if !validate_modulus(p, modulus)? {
            return Err(Error::usage("reducible modulus"));
        }
        Self::build(p, k, modulus.to_vec())
    }

    fn check_order(p: u32, k: u32) -> Result<()> {
        if !is_prime(p) {
            return Err(Error::usage(format!("characteristic {p} is not prime")));
        }
        if k == 0 {
            return Err(Error::usage("degree must be at least 1"));
        }
        match (p as usize).checked_pow(k) {
            Some(q) if q <= MAX_ORDER => Ok(()),
            _ => Err(Error::usage(format!(
                "field order {p}^{k} exceeds the supported maximum {MAX_ORDER}"
            ))),
        }
    }

    fn build(p: u32, k: u32, modulus: Vec<u32>) -> Result<Self> {
        let q = (p as usize).pow(k);
        let ku = k as usize;
        let digits = |mut x: usize| -> Vec<u32> {
            let mut d = Vec::with_capacity(ku);
            for _ in 0..ku {
                d.push((x % p as usize) as u32);
                x /= p as usize;
            }
            d
        };
        let encode = |d: &[u32]| -> usize { d.iter().rev().fold(0, |acc, &c| acc * p as usize + c as usize) };

        let mut add = vec![0; q * q];
        let mut mul = vec![0; q * q];
        for a in 0..q {
            let da = digits(a);
            for b in 0..q {
                let db = digits(b);
                let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * q + b] = encode(&sum) as Elem;

                let mut prod = vec![0u32; 2 * ku - 1];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                let red = if ku == 1 { prod } else { poly_rem(&prod, &modulus, p) };
                let mut red = red;
                red.resize(ku, 0);
                mul[a * q + b] = encode(&red) as Elem;
            }
        }
        let mut neg = vec![0; q];
        let mut inv = vec![0; q];
        for a in 0..q {
            neg[a] = (0..q).find(|&b| add[a * q + b] == 0).unwrap() as Elem;
            if a != 0 {
                inv[a] = (0..q)
                    .find(|&b| mul[a * q + b] == 1)
                    .ok_or_else(|| Error::usage("modulus does not define a field"))?
                    as Elem;
            }
        }
        Ok(Field {
            t: Arc::new(Tables {
                p,
                k,
                q,
                modulus,
                add,
                mul,
                neg,
                inv,
            }),
        })
    }

    pub fn characteristic(&self) -> u32 {
        self.t.p
    }

    pub fn degree(&self) -> u32 {
        self.t.k
    }

    /// The field order q = p^k.
    pub fn order(&self) -> usize {
        self.t.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.t.modulus
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        self.t.add[a as usize * self.t.q + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.t.mul[a as usize * self.t.q + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.t.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a == 0 {
            Err(Error::domain("inversion of zero"))
        } else {
            Ok(self.t.inv[a as usize])
        }
    }

    /// Inverse of a known-nonzero element.
    #[inline]
    pub(crate) fn inv_nz(&self, a: Elem) -> Elem {
        debug_assert!(a != 0);
        self.t.inv[a as usize]
    }

    pub fn is_valid(&self, a: u64) -> bool {
        (a as usize) < self.t.q
    }

    /// All elements in increasing encoding order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (0..self.t.q).map(|e| e as Elem)
    }

    /// Row-major addition table, used by hot loops that index it directly.
    pub(crate) fn add_table(&self) -> &[Elem] {
        &self.t.add
    }

    pub(crate) fn mul_table(&self) -> &[Elem] {
        &self.t.mul
    }

    /// `a^e` by square-and-multiply.
    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let (mut base, mut acc) = (a, 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.t, &other.t)
            || (self.t.p == other.t.p && self.t.k == other.t.k && self.t.modulus == other.t.modulus)
    }
}

impl Eq for Field {}

impl Hash for Field {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.t.p.hash(state);
        self.t.k.hash(state);
        self.t.modulus.hash(state);
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.t.k == 1 {
            write!(f, "GF({})", self.t.p)
        } else {
            write!(f, "GF({}^{}; {:?})", self.t.p, self.t.k, self.t.modulus)
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.t.q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(q: u32) -> Field {
        Field::with_order(q).unwrap()
    }

    #[test]
    fn small_arithmetic() {
        let f5 = gf(5);
        assert_eq!(f5.add(3, 4), 2);
        let f4 = gf(4);
        assert_eq!(f4.modulus(), &[1, 1, 1]);
        assert_eq!(f4.mul(2, 3), 1);
        assert_eq!(f4.inv(2).unwrap(), 3);
        assert_eq!(gf(7).inv(3).unwrap(), 5);
        assert!(matches!(f5.inv(0), Err(Error::Domain(_))));
    }

    #[test]
    fn enumeration_order() {
        assert_eq!(gf(3).elements().collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(gf(4).elements().collect::<Vec<_>>(), vec![0, 1, 2, 3]);
        let f9 = Field::with_modulus(3, 2, &[1, 0, 1]).unwrap();
        assert_eq!(f9.elements().count(), 9);
        assert_eq!(f9, gf(9));
    }

    #[test]
    fn modulus_validation() {
        assert!(validate_modulus(2, &[1, 1, 1]).unwrap());
        assert!(!validate_modulus(2, &[1, 0, 1]).unwrap());
        assert!(validate_modulus(3, &[1, 0, 1]).unwrap());
        assert!(matches!(validate_modulus(2, &[1, 1, 0]), Err(Error::Usage(_))));
        assert!(matches!(
            Field::with_modulus(2, 2, &[1, 0, 1]),
            Err(Error::Usage(m)) if m.contains("reducible")
        ));
    }

    /// The built-in table must agree with a fresh lexicographic search.
    #[test]
    fn table_is_lexicographically_smallest() {
        for &(p, k, m) in MODULUS_TABLE {
            let count = (p as usize).pow(k);
            let first = (0..count)
                .map(|code| {
                    let mut c = code;
                    let mut v = vec![0u32; k as usize];
                    for slot in v.iter_mut().rev() {
                        *slot = (c % p as usize) as u32;
                        c /= p as usize;
                    }
                    v.push(1);
                    v
                })
                .find(|v| validate_modulus(p, v).unwrap())
                .unwrap();
            assert_eq!(first, m, "p={p} k={k}");
        }
    }

    #[test]
    fn field_axioms_exhaustive() {
        for q in (2..=49).filter(|&q| prime_power(q).is_some()) {
            let f = gf(q);
            let p = f.characteristic();
            for a in f.elements() {
                // closure is implied by the encoding range; check identities
                assert_eq!(f.add(a, 0), a);
                assert_eq!(f.mul(a, 1), a);
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                let mut acc = 0;
                for _ in 0..p {
                    acc = f.add(acc, a);
                }
                assert_eq!(acc, 0, "characteristic in GF({q})");
                assert_eq!(f.pow(a, q as u64), a, "Frobenius in GF({q})");
                for b in f.elements() {
                    assert!((f.add(a, b) as usize) < f.order());
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in f.elements().step_by(1 + f.order() / 7) {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(49), Some((7, 2)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
        assert!(Field::with_order(6).is_err());
    }
}
