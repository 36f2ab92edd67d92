//! Finite fields GF(p^k).
//!
//! Elements are stored as their index `c0 + c1*p + ... + c_{k-1}*p^(k-1)` in
//! the polynomial basis, and all arithmetic goes through tables precomputed
//! when the [`Field`] is built. Fields are cheap to clone and share.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest q accepted by [`Field::new`].
pub const DEFAULT_FIELD_CAP: u32 = 64;

/// Hard ceiling for any configured cap; element indices are `u16` and the
/// tables are q × q.
pub const MAX_FIELD_ORDER: u32 = 4096;

/// An element of some [`Field`], identified by its coefficient index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElement(u16);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct FieldData {
    p: u32,
    k: u32,
    q: u32,
    /// Monic modulus, coefficients from the constant term up, length k + 1.
    modulus: Vec<u32>,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
    trace: Vec<u32>,
}

/// The finite field with `q = p^k` elements.
#[derive(Clone)]
pub struct Field(Arc<FieldData>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.k == other.0.k && self.0.modulus == other.0.modulus)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}, modulus {:?})", self.0.p, self.0.k, self.0.modulus)
    }
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// Polynomials over Z_p as coefficient vectors, constant term first.

fn poly_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    // m is monic
    let mut r = poly_trim(a.to_vec());
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        for (i, &c) in m.iter().enumerate() {
            let t = (lead as u64 * c as u64 % p as u64) as u32;
            r[shift + i] = (r[shift + i] + p - t) % p;
        }
        r = poly_trim(r);
    }
    r
}

/// Monic polynomial of degree `deg` whose lower coefficients, read as base-p
/// digits with the constant term least significant, encode `code`.
fn monic_from_code(code: u64, deg: u32, p: u32) -> Vec<u32> {
    let mut c = code;
    let mut out = Vec::with_capacity(deg as usize + 1);
    for _ in 0..deg {
        out.push((c % p as u64) as u32);
        c /= p as u64;
    }
    out.push(1);
    out
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = (f.len() - 1) as u32;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d);
        for code in 0..count {
            let g = monic_from_code(code, d, p);
            if poly_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// The smallest monic irreducible polynomial of degree `k` over Z_p, ordering
/// candidates by their coefficient list read from the leading term down.
pub fn smallest_irreducible(p: u32, k: u32) -> Option<Vec<u32>> {
    let count = (p as u64).checked_pow(k)?;
    (0..count)
        .map(|code| monic_from_code(code, k, p))
        .find(|f| is_irreducible(f, p))
}

impl Field {
    /// GF(p^k) with the default size cap.
    pub fn new(p: u32, k: u32) -> Result<Field> {
        Field::with_cap(p, k, DEFAULT_FIELD_CAP)
    }

    /// Prime field Z_p.
    pub fn prime(p: u32) -> Result<Field> {
        Field::new(p, 1)
    }

    pub fn with_cap(p: u32, k: u32, cap: u32) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::Argument(format!("{p} is not prime")));
        }
        if k == 0 {
            return Err(Error::Argument("extension degree must be at least 1".into()));
        }
        let cap = cap.min(MAX_FIELD_ORDER);
        let q = (p as u64)
            .checked_pow(k)
            .filter(|&q| q <= cap as u64)
            .ok_or_else(|| Error::ResourceLimit {
                what: format!("field GF({p}^{k})"),
                needed: (p as u128).saturating_pow(k),
                cap: cap as u128,
            })? as u32;
        let modulus = smallest_irreducible(p, k)
            .ok_or_else(|| Error::Internal(format!("no irreducible of degree {k} over Z_{p}")))?;
        Ok(Field(Arc::new(build_tables(p, k, q, modulus))))
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn k(&self) -> u32 {
        self.0.k
    }

    pub fn q(&self) -> u32 {
        self.0.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn is_prime_field(&self) -> bool {
        self.0.k == 1
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    /// Element with the given coefficient index; `None` when out of range.
    pub fn element(&self, index: u32) -> Option<FieldElement> {
        (index < self.0.q).then_some(FieldElement(index as u16))
    }

    /// Embeds an integer through the prime subfield.
    pub fn from_int(&self, v: i64) -> FieldElement {
        FieldElement(v.rem_euclid(self.0.p as i64) as u16)
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() != self.0.k as usize || coeffs.iter().any(|&c| c >= self.0.p) {
            return Err(Error::Argument(format!(
                "{coeffs:?} is not a coefficient vector for GF({}^{})",
                self.0.p, self.0.k
            )));
        }
        let idx = coeffs.iter().rev().fold(0u32, |acc, &c| acc * self.0.p + c);
        Ok(FieldElement(idx as u16))
    }

    pub fn coeffs(&self, a: FieldElement) -> Vec<u32> {
        let mut idx = a.0 as u32;
        (0..self.0.k)
            .map(|_| {
                let c = idx % self.0.p;
                idx /= self.0.p;
                c
            })
            .collect()
    }

    /// All elements in index order, zero first.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + Clone {
        (0..self.0.q as u16).map(FieldElement)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> + Clone {
        (1..self.0.q as u16).map(FieldElement)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.0.add[a.index() * self.0.q as usize + b.index()])
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(self.0.neg[a.index()])
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.0.mul[a.index() * self.0.q as usize + b.index()])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::Domain("inverse of zero".into()));
        }
        Ok(FieldElement(self.0.inv[a.index()]))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Absolute trace to Z_p, `a + a^p + ... + a^(p^(k-1))`.
    #[inline]
    pub fn trace(&self, a: FieldElement) -> u32 {
        self.0.trace[a.index()]
    }

    /// Prime fields print as integers, extension fields as `[c0,c1,...]`.
    pub fn format(&self, a: FieldElement) -> String {
        if self.is_prime_field() {
            a.0.to_string()
        } else {
            let parts: Vec<String> = self.coeffs(a).iter().map(|c| c.to_string()).collect();
            format!("[{}]", parts.join(","))
        }
    }

    /// Inverse of [`Field::format`]. A bare integer is also accepted for
    /// extension fields and read as the element index.
    pub fn parse(&self, s: &str) -> Result<FieldElement> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let coeffs = inner
                .split(',')
                .map(|c| c.trim().parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse(format!("field element {s:?}: {e}")))?;
            return self.from_coeffs(&coeffs);
        }
        let v: u32 = s
            .parse()
            .map_err(|e| Error::Parse(format!("field element {s:?}: {e}")))?;
        self.element(v)
            .ok_or_else(|| Error::Parse(format!("field element {v} out of range for q = {}", self.0.q)))
    }
}

fn build_tables(p: u32, k: u32, q: u32, modulus: Vec<u32>) -> FieldData {
    let qs = q as usize;
    let to_coeffs = |mut idx: u32| -> Vec<u32> {
        (0..k)
            .map(|_| {
                let c = idx % p;
                idx /= p;
                c
            })
            .collect()
    };
    let to_index = |c: &[u32]| -> u16 {
        let mut padded = c.to_vec();
        padded.resize(k as usize, 0);
        padded.iter().rev().fold(0u32, |acc, &x| acc * p + x) as u16
    };
    let coeffs: Vec<Vec<u32>> = (0..q).map(to_coeffs).collect();

    let mut add = vec![0u16; qs * qs];
    let mut mul = vec![0u16; qs * qs];
    for a in 0..qs {
        for b in 0..qs {
            let s: Vec<u32> = coeffs[a].iter().zip(&coeffs[b]).map(|(x, y)| (x + y) % p).collect();
            add[a * qs + b] = to_index(&s);
            let mut prod = vec![0u32; 2 * k as usize];
            for (i, &x) in coeffs[a].iter().enumerate() {
                for (j, &y) in coeffs[b].iter().enumerate() {
                    prod[i + j] = (prod[i + j] + x * y) % p;
                }
            }
            mul[a * qs + b] = to_index(&poly_rem(&prod, &modulus, p));
        }
    }
    let mut neg = vec![0u16; qs];
    let mut inv = vec![0u16; qs];
    for a in 0..qs {
        neg[a] = (0..qs).find(|&b| add[a * qs + b] == 0).unwrap() as u16;
        if a != 0 {
            inv[a] = (0..qs).find(|&b| mul[a * qs + b] == 1).unwrap() as u16;
        }
    }
    let mut trace = vec![0u32; qs];
    for (a, slot) in trace.iter_mut().enumerate() {
        // a, a^p, a^(p^2), ...
        let mut power = a;
        let mut sum = 0usize;
        for _ in 0..k {
            sum = add[sum * qs + power] as usize;
            let mut next = 1usize;
            for _ in 0..p {
                next = mul[next * qs + power] as usize;
            }
            power = next;
        }
        debug_assert!(sum < p as usize, "trace must land in the prime subfield");
        *slot = sum as u32;
    }
    FieldData {
        p,
        k,
        q,
        modulus,
        add,
        mul,
        neg,
        inv,
        trace,
    }
}
