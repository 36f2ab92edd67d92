//! Strictly upper-triangular matrices, unipotent group elements and linear
//! functionals on the nilpotent algebra, with the left, right and two-sided
//! actions of the group on both.
//!
//! Positions are 1-based `(i, j)` with `i < j`. Only non-zero entries are
//! stored.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::gf::{Field, FieldElement};
use crate::linalg;

pub type Pos = (usize, usize);

/// Sparse map from positions above the diagonal to non-zero field values.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Entries {
    n: usize,
    map: BTreeMap<Pos, FieldElement>,
}

impl Entries {
    fn new(n: usize) -> Self {
        Entries { n, map: BTreeMap::new() }
    }

    fn from_iter<I>(n: usize, items: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, FieldElement)>,
    {
        let mut out = Entries::new(n);
        for (i, j, v) in items {
            if !(1 <= i && i < j && j <= n) {
                return Err(Error::Argument(format!("position ({i},{j}) is not above the diagonal of a {n}x{n} matrix")));
            }
            out.put(i, j, v);
        }
        Ok(out)
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> FieldElement {
        self.map.get(&(i, j)).copied().unwrap_or_default()
    }

    #[inline]
    fn put(&mut self, i: usize, j: usize, v: FieldElement) {
        if v.is_zero() {
            self.map.remove(&(i, j));
        } else {
            self.map.insert((i, j), v);
        }
    }

    #[inline]
    fn bump(&mut self, field: &Field, i: usize, j: usize, delta: FieldElement) {
        if !delta.is_zero() {
            let v = field.add(self.get(i, j), delta);
            self.put(i, j, v);
        }
    }

    fn iter(&self) -> impl Iterator<Item = (usize, usize, FieldElement)> + '_ {
        self.map.iter().map(|(&(i, j), &v)| (i, j, v))
    }

    fn row(&self, i: usize) -> impl Iterator<Item = (usize, FieldElement)> + '_ {
        self.map.range((i, 0)..(i + 1, 0)).map(|(&(_, j), &v)| (j, v))
    }

    fn add(&self, field: &Field, other: &Entries) -> Entries {
        let mut out = self.clone();
        for (i, j, v) in other.iter() {
            out.bump(field, i, j, v);
        }
        out
    }

    fn scale(&self, field: &Field, a: FieldElement) -> Entries {
        let mut out = Entries::new(self.n);
        for (i, j, v) in self.iter() {
            out.put(i, j, field.mul(a, v));
        }
        out
    }

    fn product(&self, field: &Field, other: &Entries) -> Entries {
        let mut out = Entries::new(self.n);
        for (i, k, x) in self.iter() {
            for (j, y) in other.row(k) {
                out.bump(field, i, j, field.mul(x, y));
            }
        }
        out
    }

    fn dense(&self) -> Vec<Vec<FieldElement>> {
        let mut rows = vec![vec![FieldElement::ZERO; self.n]; self.n];
        for (i, j, v) in self.iter() {
            rows[i - 1][j - 1] = v;
        }
        rows
    }

    fn text(&self, field: &Field) -> String {
        if self.map.is_empty() {
            return "0".to_string();
        }
        self.iter()
            .map(|(i, j, v)| format!("({i},{j})={}", field.format(v)))
            .collect::<Vec<_>>()
            .join(";")
    }

    fn to_json(&self, field: &Field, kind: &str) -> Value {
        let entries: Vec<Value> = self
            .iter()
            .map(|(i, j, v)| json!({"i": i, "j": j, "v": field.format(v)}))
            .collect();
        json!({"kind": kind, "n": self.n, "entries": entries})
    }

    fn from_json(field: &Field, value: &Value, kind: &str) -> Result<Entries> {
        let bad = |what: &str| Error::Parse(format!("{kind} json: {what}"));
        if value.get("kind").and_then(Value::as_str) != Some(kind) {
            return Err(bad("kind tag mismatch"));
        }
        let n = value.get("n").and_then(Value::as_u64).ok_or_else(|| bad("missing n"))? as usize;
        let list = value.get("entries").and_then(Value::as_array).ok_or_else(|| bad("missing entries"))?;
        let mut items = Vec::with_capacity(list.len());
        for e in list {
            let i = e.get("i").and_then(Value::as_u64).ok_or_else(|| bad("entry without i"))? as usize;
            let j = e.get("j").and_then(Value::as_u64).ok_or_else(|| bad("entry without j"))? as usize;
            let v = e.get("v").and_then(Value::as_str).ok_or_else(|| bad("entry without v"))?;
            items.push((i, j, field.parse(v)?));
        }
        Entries::from_iter(n, items)
    }
}

fn same_size(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::Argument(format!("size mismatch: {a} vs {b}")))
    }
}

/// An element of the nilpotent algebra u(n).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NilMatrix(Entries);

/// An element `I + X` of the unipotent group U(n).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UniMatrix(NilMatrix);

/// A linear functional on u(n), stored by its values on the basis `e_ij`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Functional(Entries);

macro_rules! entry_accessors {
    ($t:ty) => {
        impl $t {
            pub fn n(&self) -> usize {
                self.0.n
            }

            pub fn get(&self, i: usize, j: usize) -> FieldElement {
                self.0.get(i, j)
            }

            /// Non-zero entries in `(i, j)` order.
            pub fn entries(&self) -> impl Iterator<Item = (usize, usize, FieldElement)> + '_ {
                self.0.iter()
            }

            pub fn support(&self) -> impl Iterator<Item = Pos> + '_ {
                self.0.map.keys().copied()
            }

            pub fn nnz(&self) -> usize {
                self.0.map.len()
            }

            pub fn is_zero(&self) -> bool {
                self.0.map.is_empty()
            }

            pub fn set(&mut self, i: usize, j: usize, v: FieldElement) -> Result<()> {
                if !(1 <= i && i < j && j <= self.0.n) {
                    return Err(Error::Argument(format!("position ({i},{j}) out of range")));
                }
                self.0.put(i, j, v);
                Ok(())
            }

            pub fn add(&self, field: &Field, other: &Self) -> Result<Self> {
                same_size(self.n(), other.n())?;
                Ok(Self(self.0.add(field, &other.0)))
            }

            pub fn sub(&self, field: &Field, other: &Self) -> Result<Self> {
                self.add(field, &other.scale(field, field.neg(field.one())))
            }

            pub fn scale(&self, field: &Field, a: FieldElement) -> Self {
                Self(self.0.scale(field, a))
            }

            pub fn neg(&self, field: &Field) -> Self {
                self.scale(field, field.neg(field.one()))
            }

            /// `(i,j)=v` cells joined by `;`, or `0`.
            pub fn text(&self, field: &Field) -> String {
                self.0.text(field)
            }
        }
    };
}

entry_accessors!(NilMatrix);
entry_accessors!(Functional);

impl NilMatrix {
    pub fn zero(n: usize) -> Self {
        NilMatrix(Entries::new(n))
    }

    pub fn from_entries<I>(n: usize, items: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, FieldElement)>,
    {
        Entries::from_iter(n, items).map(NilMatrix)
    }

    /// `a · e_ij`.
    pub fn unit(n: usize, i: usize, j: usize, a: FieldElement) -> Result<Self> {
        Self::from_entries(n, [(i, j, a)])
    }

    pub fn mul(&self, field: &Field, other: &NilMatrix) -> Result<NilMatrix> {
        same_size(self.n(), other.n())?;
        Ok(NilMatrix(self.0.product(field, &other.0)))
    }

    pub fn rank(&self, field: &Field) -> usize {
        linalg::rank(field, self.0.dense())
    }

    /// The functional `ε(X)` with the same coefficients as this matrix.
    pub fn to_functional(&self) -> Functional {
        Functional(self.0.clone())
    }

    pub fn to_json(&self, field: &Field) -> Value {
        self.0.to_json(field, "nil")
    }

    pub fn from_json(field: &Field, value: &Value) -> Result<Self> {
        Entries::from_json(field, value, "nil").map(NilMatrix)
    }
}

impl Functional {
    pub fn zero(n: usize) -> Self {
        Functional(Entries::new(n))
    }

    pub fn from_entries<I>(n: usize, items: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, FieldElement)>,
    {
        Entries::from_iter(n, items).map(Functional)
    }

    /// `a · ε_ij`.
    pub fn unit(n: usize, i: usize, j: usize, a: FieldElement) -> Result<Self> {
        Self::from_entries(n, [(i, j, a)])
    }

    /// The matrix `e(λ)` carrying this functional's coefficients.
    pub fn to_matrix(&self) -> NilMatrix {
        NilMatrix(self.0.clone())
    }

    pub fn eval(&self, field: &Field, x: &NilMatrix) -> Result<FieldElement> {
        same_size(self.n(), x.n())?;
        Ok(self.eval_unchecked(field, x))
    }

    pub(crate) fn eval_unchecked(&self, field: &Field, x: &NilMatrix) -> FieldElement {
        let (small, large) = if self.nnz() <= x.nnz() { (&self.0, &x.0) } else { (&x.0, &self.0) };
        small
            .iter()
            .fold(FieldElement::ZERO, |acc, (i, j, v)| field.add(acc, field.mul(v, large.get(i, j))))
    }

    pub fn to_json(&self, field: &Field) -> Value {
        self.0.to_json(field, "fun")
    }

    pub fn from_json(field: &Field, value: &Value) -> Result<Self> {
        Entries::from_json(field, value, "fun").map(Functional)
    }
}

impl UniMatrix {
    pub fn identity(n: usize) -> Self {
        UniMatrix(NilMatrix::zero(n))
    }

    /// `I + X`.
    pub fn from_nil(x: NilMatrix) -> Self {
        UniMatrix(x)
    }

    /// `I + a · e_ij`.
    pub fn elementary(n: usize, i: usize, j: usize, a: FieldElement) -> Result<Self> {
        NilMatrix::unit(n, i, j, a).map(UniMatrix)
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    /// `g - I`.
    pub fn off(&self) -> &NilMatrix {
        &self.0
    }

    pub fn into_off(self) -> NilMatrix {
        self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_zero()
    }

    /// `(I + X)(I + Y) = I + X + Y + XY`.
    pub fn mul(&self, field: &Field, other: &UniMatrix) -> Result<UniMatrix> {
        same_size(self.n(), other.n())?;
        Ok(self.mul_unchecked(field, other))
    }

    pub(crate) fn mul_unchecked(&self, field: &Field, other: &UniMatrix) -> UniMatrix {
        let x = &self.0 .0;
        let y = &other.0 .0;
        UniMatrix(NilMatrix(x.add(field, y).add(field, &x.product(field, y))))
    }

    /// `I - X + X^2 - ...`, at most n - 1 terms.
    pub fn inv(&self, field: &Field) -> UniMatrix {
        let minus_x = self.0 .0.scale(field, field.neg(field.one()));
        let mut total = Entries::new(self.n());
        let mut power = minus_x.clone();
        while !power.map.is_empty() {
            total = total.add(field, &power);
            power = power.product(field, &minus_x);
        }
        UniMatrix(NilMatrix(total))
    }

    pub fn to_json(&self, field: &Field) -> Value {
        self.0 .0.to_json(field, "uni")
    }

    pub fn from_json(field: &Field, value: &Value) -> Result<Self> {
        Entries::from_json(field, value, "uni").map(|e| UniMatrix(NilMatrix(e)))
    }

    pub fn text(&self, field: &Field) -> String {
        format!("I+{}", self.0.text(field))
    }
}

/// `g · X`.
pub fn act_left(field: &Field, g: &UniMatrix, x: &NilMatrix) -> Result<NilMatrix> {
    same_size(g.n(), x.n())?;
    Ok(NilMatrix(x.0.add(field, &g.0 .0.product(field, &x.0))))
}

/// `X · g`.
pub fn act_right(field: &Field, x: &NilMatrix, g: &UniMatrix) -> Result<NilMatrix> {
    same_size(g.n(), x.n())?;
    Ok(NilMatrix(x.0.add(field, &x.0.product(field, &g.0 .0))))
}

/// `g · X · g⁻¹`.
pub fn act_adjoint(field: &Field, g: &UniMatrix, x: &NilMatrix) -> Result<NilMatrix> {
    let gx = act_left(field, g, x)?;
    act_right(field, &gx, &g.inv(field))
}

/// `(g * λ)(X) = λ(X · g)`.
pub fn coact_left(field: &Field, g: &UniMatrix, lambda: &Functional) -> Result<Functional> {
    same_size(g.n(), lambda.n())?;
    Ok(coact_left_unchecked(field, g, lambda))
}

pub(crate) fn coact_left_unchecked(field: &Field, g: &UniMatrix, lambda: &Functional) -> Functional {
    // (g*λ)_kl = λ_kl + Σ_{m>l} g_lm λ_km
    let mut out = lambda.0.clone();
    for (k, m, v) in lambda.0.iter() {
        for (l, mm, gv) in g.0 .0.iter() {
            if mm == m && l > k {
                out.bump(field, k, l, field.mul(gv, v));
            }
        }
    }
    Functional(out)
}

/// `(λ * g)(X) = λ(g · X)`.
pub fn coact_right(field: &Field, lambda: &Functional, g: &UniMatrix) -> Result<Functional> {
    same_size(g.n(), lambda.n())?;
    Ok(coact_right_unchecked(field, lambda, g))
}

pub(crate) fn coact_right_unchecked(field: &Field, lambda: &Functional, g: &UniMatrix) -> Functional {
    // (λ*g)_kl = λ_kl + Σ_{m<k} g_mk λ_ml
    let mut out = lambda.0.clone();
    for (m, l, v) in lambda.0.iter() {
        for (k, gv) in g.0 .0.row(m) {
            if k < l {
                out.bump(field, k, l, field.mul(gv, v));
            }
        }
    }
    Functional(out)
}

/// `λ^g(X) = λ(g⁻¹ · X · g)`.
pub fn coact_coadjoint(field: &Field, lambda: &Functional, g: &UniMatrix) -> Result<Functional> {
    let left = coact_left(field, g, lambda)?;
    coact_right(field, &left, &g.inv(field))
}

/// Every point of u(n) (or u*(n), reinterpreted) in lexicographic order of
/// the coefficient vector over positions sorted by `(i, j)`.
pub(crate) fn all_entries(field: &Field, n: usize) -> impl Iterator<Item = Vec<(usize, usize, FieldElement)>> + '_ {
    let positions: Vec<Pos> = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect();
    let q = field.q() as u64;
    let total = q.pow(positions.len() as u32);
    (0..total).map(move |mut code| {
        let mut digits = vec![0u64; positions.len()];
        for d in digits.iter_mut().rev() {
            *d = code % q;
            code /= q;
        }
        positions
            .iter()
            .zip(digits)
            .filter(|(_, d)| *d != 0)
            .map(|(&(i, j), d)| (i, j, field.element(d as u32).unwrap()))
            .collect()
    })
}
