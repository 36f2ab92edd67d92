//! Classification of adjoint and coadjoint clusters by rook-placement
//! templates, and the numerical invariants attached to them.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Pow, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::gf::{Field, FieldElement};
use crate::linalg;
use crate::matrix::{Functional, NilMatrix, Pos, UniMatrix};

/// A rook placement above the diagonal with non-zero values. The same type
/// names adjoint clusters (read as a matrix) and coadjoint clusters (read as
/// a functional).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Template {
    n: usize,
    cells: Vec<(usize, usize, FieldElement)>,
}

impl Template {
    pub fn empty(n: usize) -> Template {
        Template { n, cells: Vec::new() }
    }

    pub fn new<I>(n: usize, cells: I) -> Result<Template>
    where
        I: IntoIterator<Item = (usize, usize, FieldElement)>,
    {
        let mut cells: Vec<_> = cells.into_iter().collect();
        cells.sort_by_key(|&(i, j, _)| (i, j));
        let mut rows = BTreeSet::new();
        let mut cols = BTreeSet::new();
        for &(i, j, a) in &cells {
            if !(1 <= i && i < j && j <= n) {
                return Err(Error::Argument(format!("cell ({i},{j}) is not above the diagonal for n = {n}")));
            }
            if a.is_zero() {
                return Err(Error::Argument(format!("cell ({i},{j}) has value zero")));
            }
            if !rows.insert(i) || !cols.insert(j) {
                return Err(Error::Argument(format!("cells share a row or column at ({i},{j})")));
            }
        }
        Ok(Template { n, cells })
    }

    /// `a · ε_ij` (or the trivial template when `a` is zero).
    pub fn primary(n: usize, i: usize, j: usize, a: FieldElement) -> Result<Template> {
        if a.is_zero() {
            if !(1 <= i && i < j && j <= n) {
                return Err(Error::Argument(format!("cell ({i},{j}) is not above the diagonal for n = {n}")));
            }
            return Ok(Template::empty(n));
        }
        Template::new(n, [(i, j, a)])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Cells sorted by `(i, j)`.
    pub fn cells(&self) -> &[(usize, usize, FieldElement)] {
        &self.cells
    }

    pub fn support(&self) -> impl Iterator<Item = Pos> + '_ {
        self.cells.iter().map(|&(i, j, _)| (i, j))
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.cells
            .iter()
            .find(|&&(a, b, _)| (a, b) == (i, j))
            .map_or(FieldElement::ZERO, |c| c.2)
    }

    pub fn row_of_col(&self, j: usize) -> Option<(usize, FieldElement)> {
        self.cells.iter().find(|c| c.1 == j).map(|c| (c.0, c.2))
    }

    pub fn col_of_row(&self, i: usize) -> Option<(usize, FieldElement)> {
        self.cells.iter().find(|c| c.0 == i).map(|c| (c.1, c.2))
    }

    pub fn to_functional(&self) -> Functional {
        Functional::from_entries(self.n, self.cells.iter().copied()).expect("template cells are valid")
    }

    pub fn to_matrix(&self) -> NilMatrix {
        NilMatrix::from_entries(self.n, self.cells.iter().copied()).expect("template cells are valid")
    }

    /// The template with every value negated.
    pub fn neg(&self, field: &Field) -> Template {
        Template {
            n: self.n,
            cells: self.cells.iter().map(|&(i, j, a)| (i, j, field.neg(a))).collect(),
        }
    }

    /// Returns the functional as a template when its support is a rook placement.
    pub fn from_functional(lambda: &Functional) -> Option<Template> {
        Template::new(lambda.n(), lambda.entries()).ok()
    }

    pub fn from_matrix(x: &NilMatrix) -> Option<Template> {
        Template::new(x.n(), x.entries()).ok()
    }

    /// `(i,j)=v` cells joined by `;`; the empty template is `0`.
    pub fn text(&self, field: &Field) -> String {
        if self.cells.is_empty() {
            return "0".into();
        }
        self.cells
            .iter()
            .map(|&(i, j, a)| format!("({i},{j})={}", field.format(a)))
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn parse(field: &Field, n: usize, s: &str) -> Result<Template> {
        let s = s.trim();
        if s == "0" || s.is_empty() {
            return Ok(Template::empty(n));
        }
        let mut cells = Vec::new();
        for part in s.split(';') {
            let bad = || Error::Parse(format!("template cell {part:?}"));
            let (pos, val) = part.split_once('=').ok_or_else(bad)?;
            let pos = pos.trim().strip_prefix('(').and_then(|p| p.strip_suffix(')')).ok_or_else(bad)?;
            let (i, j) = pos.split_once(',').ok_or_else(bad)?;
            let i: usize = i.trim().parse().map_err(|_| bad())?;
            let j: usize = j.trim().parse().map_err(|_| bad())?;
            cells.push((i, j, field.parse(val)?));
        }
        Template::new(n, cells)
    }

    pub fn to_json(&self, field: &Field) -> Value {
        let cells: Vec<Value> = self
            .cells
            .iter()
            .map(|&(i, j, a)| json!({"i": i, "j": j, "v": field.format(a)}))
            .collect();
        json!({"n": self.n, "cells": cells, "text": self.text(field)})
    }

    fn order_key(&self) -> (usize, Vec<(usize, usize)>, Vec<FieldElement>) {
        let mut keyed: Vec<_> = self.cells.iter().map(|&(i, j, a)| ((j - i, i), a)).collect();
        keyed.sort();
        let (pos, vals) = keyed.into_iter().unzip();
        (self.cells.len(), pos, vals)
    }
}

/// Templates are ordered by number of cells, then by their positions read
/// diagonal by diagonal (distance from the main diagonal, then row), then by
/// values. For n = 3 this gives `0, e12, e23, e13, e12+e23`.
impl Ord for Template {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| self.order_key().cmp(&other.order_key()))
    }
}

impl PartialOrd for Template {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cells.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.cells.iter().map(|&(i, j, a)| format!("({i},{j})={}", a.index())).collect();
        write!(f, "{}", parts.join(";"))
    }
}

/// A template together with group elements `g, h` that carry the input onto it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub template: Template,
    pub g: UniMatrix,
    pub h: UniMatrix,
}

type Dense = Vec<Vec<FieldElement>>;

fn dense(n: usize, entries: impl Iterator<Item = (usize, usize, FieldElement)>) -> Dense {
    let mut w = vec![vec![FieldElement::ZERO; n + 1]; n + 1];
    for (i, j, v) in entries {
        w[i][j] = v;
    }
    w
}

fn template_from_dense(n: usize, w: &Dense) -> Template {
    let cells = (1..=n)
        .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
        .filter(|&(i, j)| !w[i][j].is_zero())
        .map(|(i, j)| (i, j, w[i][j]));
    Template::new(n, cells).expect("reduction ends in a rook placement")
}

/// Elementary factors `(i, j, a)` standing for `I + a e_ij`, applied in order.
#[derive(Default)]
struct Witness {
    left: Vec<(usize, usize, FieldElement)>,
    right: Vec<(usize, usize, FieldElement)>,
}

impl Witness {
    fn into_pair(self, field: &Field, n: usize) -> (UniMatrix, UniMatrix) {
        let elem = |&(i, j, a): &(usize, usize, FieldElement)| UniMatrix::elementary(n, i, j, a).unwrap();
        // left factors act in sequence, so g = g_k ... g_1; right: h = h_1 ... h_m
        let g = self
            .left
            .iter()
            .fold(UniMatrix::identity(n), |acc, f| elem(f).mul_unchecked(field, &acc));
        let h = self
            .right
            .iter()
            .fold(UniMatrix::identity(n), |acc, f| acc.mul_unchecked(field, &elem(f)));
        (g, h)
    }
}

fn reduce_adjoint(field: &Field, n: usize, w: &mut Dense, mut witness: Option<&mut Witness>) {
    let mut pivot_col: Vec<Option<usize>> = vec![None; n + 1];
    for c in 2..=n {
        // column operations against pivots to the left
        for r in 1..c {
            if w[r][c].is_zero() {
                continue;
            }
            if let Some(pc) = pivot_col[r] {
                let a = field.neg(field.div(w[r][c], w[r][pc]).unwrap());
                for row in w.iter_mut() {
                    let delta = field.mul(a, row[pc]);
                    row[c] = field.add(row[c], delta);
                }
                if let Some(wit) = witness.as_deref_mut() {
                    wit.right.push((pc, c, a));
                }
            }
        }
        // row operations keep the bottom entry
        let Some(bottom) = (1..c).rev().find(|&r| !w[r][c].is_zero()) else {
            continue;
        };
        for r in 1..bottom {
            if w[r][c].is_zero() {
                continue;
            }
            let a = field.neg(field.div(w[r][c], w[bottom][c]).unwrap());
            for col in 1..=n {
                let delta = field.mul(a, w[bottom][col]);
                w[r][col] = field.add(w[r][col], delta);
            }
            if let Some(wit) = witness.as_deref_mut() {
                wit.left.push((r, bottom, a));
            }
        }
        pivot_col[bottom] = Some(c);
    }
}

fn reduce_coadjoint(field: &Field, n: usize, w: &mut Dense, mut witness: Option<&mut Witness>) {
    let mut pivot_col: Vec<Option<usize>> = vec![None; n + 1];
    for c in (2..=n).rev() {
        // restricted column operations (left action) against pivots to the right
        for r in 1..c {
            if w[r][c].is_zero() {
                continue;
            }
            if let Some(pc) = pivot_col[r] {
                let a = field.neg(field.div(w[r][c], w[r][pc]).unwrap());
                for row in w.iter_mut().take(c).skip(1) {
                    let delta = field.mul(a, row[pc]);
                    row[c] = field.add(row[c], delta);
                }
                if let Some(wit) = witness.as_deref_mut() {
                    wit.left.push((c, pc, a));
                }
            }
        }
        // restricted row operations (right action) keep the top entry
        let Some(top) = (1..c).find(|&r| !w[r][c].is_zero()) else {
            continue;
        };
        for r in top + 1..c {
            if w[r][c].is_zero() {
                continue;
            }
            let a = field.neg(field.div(w[r][c], w[top][c]).unwrap());
            for col in r + 1..=n {
                let delta = field.mul(a, w[top][col]);
                w[r][col] = field.add(w[r][col], delta);
            }
            if let Some(wit) = witness.as_deref_mut() {
                wit.right.push((top, r, a));
            }
        }
        pivot_col[top] = Some(c);
    }
}

/// The adjoint template in the double orbit of `x`, with `g · x · h = e(T)`.
pub fn adjoint_template_of(field: &Field, x: &NilMatrix) -> Reduction {
    let n = x.n();
    let mut w = dense(n, x.entries());
    let mut witness = Witness::default();
    reduce_adjoint(field, n, &mut w, Some(&mut witness));
    let template = template_from_dense(n, &w);
    let (g, h) = witness.into_pair(field, n);
    Reduction { template, g, h }
}

/// The coadjoint template in the double orbit of `λ`, with `g * λ * h = τ`.
pub fn coadjoint_template_of(field: &Field, lambda: &Functional) -> Reduction {
    let n = lambda.n();
    let mut w = dense(n, lambda.entries());
    let mut witness = Witness::default();
    reduce_coadjoint(field, n, &mut w, Some(&mut witness));
    let template = template_from_dense(n, &w);
    let (g, h) = witness.into_pair(field, n);
    Reduction { template, g, h }
}

/// Template only, no witnesses.
pub fn classify_coadjoint(field: &Field, lambda: &Functional) -> Template {
    let n = lambda.n();
    let mut w = dense(n, lambda.entries());
    reduce_coadjoint(field, n, &mut w, None);
    template_from_dense(n, &w)
}

pub fn classify_adjoint(field: &Field, x: &NilMatrix) -> Template {
    let n = x.n();
    let mut w = dense(n, x.entries());
    reduce_adjoint(field, n, &mut w, None);
    template_from_dense(n, &w)
}

fn check_window(n: usize, i: usize, j: usize) -> Result<()> {
    if 1 <= i && i < j && j <= n {
        Ok(())
    } else {
        Err(Error::Argument(format!("window ({i},{j}) invalid for n = {n}")))
    }
}

/// Rank of the part of `x` inside the square window `i ≤ k < l ≤ j`.
pub fn rank_invariant(field: &Field, i: usize, j: usize, x: &NilMatrix) -> Result<usize> {
    check_window(x.n(), i, j)?;
    let rows: Vec<Vec<FieldElement>> = (i..=j).map(|k| (i..=j).map(|l| if k < l { x.get(k, l) } else { FieldElement::ZERO }).collect()).collect();
    Ok(linalg::rank(field, rows))
}

/// Rank of the part of `e(λ)` in rows `1..=i` and columns `j..=n`.
pub fn rank_invariant_dual(field: &Field, i: usize, j: usize, lambda: &Functional) -> Result<usize> {
    let n = lambda.n();
    check_window(n, i, j)?;
    let rows: Vec<Vec<FieldElement>> = (1..=i).map(|k| (j..=n).map(|l| lambda.get(k, l)).collect()).collect();
    Ok(linalg::rank(field, rows))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterInvariants {
    /// Dimension index.
    pub d: u32,
    /// Intertwining index.
    pub i: u32,
    /// `d_rows[k - 1]` counts support cells `(a, b)` with `a < k < b`, for k = 1..n-1.
    pub d_rows: Vec<u32>,
}

/// Invariants read off the support of a template.
pub fn invariants_of(tau: &Template) -> ClusterInvariants {
    let n = tau.n();
    let d = tau.cells().iter().map(|&(i, j, _)| (j - i - 1) as u32).sum();
    let hooks = (1..=n)
        .flat_map(|a| (a + 1..=n).map(move |b| (a, b)))
        .filter(|&(a, b)| {
            tau.row_of_col(b).is_some_and(|(r, _)| r < a) && tau.col_of_row(a).is_some_and(|(c, _)| c > b)
        })
        .count() as u32;
    let d_rows = (1..n)
        .map(|k| tau.cells().iter().filter(|&&(i, j, _)| i < k && k < j).count() as u32)
        .collect();
    ClusterInvariants { d, i: hooks, d_rows }
}

fn position_index(n: usize) -> impl Fn(usize, usize) -> usize {
    move |i, j| (i - 1) * n - (i - 1) * i / 2 + (j - i - 1)
}

fn span_dims(field: &Field, left: Vec<Vec<FieldElement>>, right: Vec<Vec<FieldElement>>) -> (usize, usize, usize) {
    let dl = linalg::rank(field, left.clone());
    let dr = linalg::rank(field, right.clone());
    let mut both = left;
    both.extend(right);
    let sum = if both.is_empty() { 0 } else { linalg::rank(field, both) };
    (dl, dr, dl + dr - sum)
}

/// Dimensions of `{X ↦ λ(X·Y)}`, `{X ↦ λ(Y·X)}` and their intersection, with
/// `Y` ranging over u(n).
pub fn dual_dims(field: &Field, lambda: &Functional) -> (usize, usize, usize) {
    let n = lambda.n();
    let dim = n * (n.saturating_sub(1)) / 2;
    let idx = position_index(n);
    let mut left = Vec::new();
    let mut right = Vec::new();
    for k in 1..=n {
        for l in k + 1..=n {
            // Y = e_kl: λ(e_ab e_kl) = [b = k] λ_al ; λ(e_kl e_ab) = [a = l] λ_kb
            let mut lv = vec![FieldElement::ZERO; dim];
            for a in 1..k {
                lv[idx(a, k)] = lambda.get(a, l);
            }
            let mut rv = vec![FieldElement::ZERO; dim];
            for b in l + 1..=n {
                rv[idx(l, b)] = lambda.get(k, b);
            }
            left.push(lv);
            right.push(rv);
        }
    }
    span_dims(field, left, right)
}

pub fn lhat_dim(field: &Field, lambda: &Functional) -> usize {
    dual_dims(field, lambda).0
}

pub fn rhat_dim(field: &Field, lambda: &Functional) -> usize {
    dual_dims(field, lambda).1
}

pub fn intersection_dim(field: &Field, lambda: &Functional) -> usize {
    dual_dims(field, lambda).2
}

pub fn pow_q(field: &Field, e: u32) -> BigUint {
    BigUint::from(field.q()).pow(e)
}

/// Size of the coadjoint cluster of a template, `q^(2d - i)`.
pub fn cluster_size(field: &Field, tau: &Template) -> BigUint {
    let inv = invariants_of(tau);
    pow_q(field, 2 * inv.d - inv.i)
}

/// Size of the adjoint cluster `U·X·U`, from `|U·X|·|X·U| / |U·X ∩ X·U|`.
pub fn adjoint_cluster_size(field: &Field, x: &NilMatrix) -> BigUint {
    let n = x.n();
    let dim = n * n.saturating_sub(1) / 2;
    let idx = position_index(n);
    let mut left = Vec::new();
    let mut right = Vec::new();
    for k in 1..=n {
        for l in k + 1..=n {
            // e_kl · X keeps row l of X, moved to row k; X · e_kl keeps column k, moved to column l
            let mut lv = vec![FieldElement::ZERO; dim];
            for b in l + 1..=n {
                lv[idx(k, b)] = x.get(l, b);
            }
            let mut rv = vec![FieldElement::ZERO; dim];
            for a in 1..k {
                rv[idx(a, l)] = x.get(a, k);
            }
            left.push(lv);
            right.push(rv);
        }
    }
    let (a, b, c) = span_dims(field, left, right);
    pow_q(field, (a + b - c) as u32)
}

/// The primary pieces `a · E_ij` whose sum is the cluster of `τ`.
pub fn primary_components(tau: &Template) -> Vec<(usize, usize, FieldElement)> {
    tau.cells().to_vec()
}

/// Every template for u(n) over the field, in template order.
pub fn enumerate_templates(field: &Field, n: usize) -> Vec<Template> {
    fn place(
        field: &Field,
        n: usize,
        positions: &[(usize, usize)],
        start: usize,
        used_rows: &mut Vec<bool>,
        used_cols: &mut Vec<bool>,
        current: &mut Vec<(usize, usize, FieldElement)>,
        out: &mut Vec<Template>,
    ) {
        out.push(Template::new(n, current.iter().copied()).unwrap());
        for (idx, &(i, j)) in positions.iter().enumerate().skip(start) {
            if used_rows[i] || used_cols[j] {
                continue;
            }
            used_rows[i] = true;
            used_cols[j] = true;
            for a in field.nonzero_elements() {
                current.push((i, j, a));
                place(field, n, positions, idx + 1, used_rows, used_cols, current, out);
                current.pop();
            }
            used_rows[i] = false;
            used_cols[j] = false;
        }
    }
    let positions: Vec<(usize, usize)> = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    place(field, n, &positions, 0, &mut vec![false; n + 1], &mut vec![false; n + 1], &mut Vec::new(), &mut out);
    out.sort();
    out
}

fn binomial(n: usize, k: usize) -> BigUint {
    (0..k).fold(BigUint::one(), |acc, t| acc * BigUint::from(n - t) / BigUint::from(t + 1))
}

/// Number of templates for u(n) over F_q, from
/// `B(n+1) = Σ_k C(n,k) (q-1)^(n-k) B(k)` with `B(0) = 1`.
pub fn bell_poly(n: usize, q: u32) -> BigUint {
    bell_poly_all(n, q).pop().unwrap()
}

/// `B(0, q), ..., B(n, q)`.
pub fn bell_poly_all(n: usize, q: u32) -> Vec<BigUint> {
    let qm1 = BigUint::from(q.saturating_sub(1));
    let mut b = vec![BigUint::one()];
    for m in 0..n {
        let next = (0..=m).fold(BigUint::zero(), |acc, k| {
            acc + binomial(m, k) * Pow::pow(&qm1, (m - k) as u32) * &b[k]
        });
        b.push(next);
    }
    b
}

/// All elements of the primary cluster `a · E_ij`.
pub fn primary_cluster_elements(field: &Field, n: usize, i: usize, j: usize, a: FieldElement) -> Vec<Functional> {
    let inner: Vec<usize> = (i + 1..j).collect();
    let m = inner.len();
    let a_inv = field.inv(a).expect("primary value is non-zero");
    let q = field.q() as u64;
    let mut out = Vec::with_capacity(q.pow(2 * m as u32) as usize);
    for code in 0..q.pow(2 * m as u32) {
        let mut c = code;
        let mut digits = Vec::with_capacity(2 * m);
        for _ in 0..2 * m {
            digits.push(field.element((c % q) as u32).unwrap());
            c /= q;
        }
        let (col, row) = digits.split_at(m);
        let mut cells = vec![(i, j, a)];
        for (t, &k) in inner.iter().enumerate() {
            cells.push((k, j, col[t]));
            cells.push((i, k, row[t]));
        }
        for (s, &k) in inner.iter().enumerate() {
            for (t, &l) in inner.iter().enumerate() {
                if k < l {
                    cells.push((k, l, field.mul(a_inv, field.mul(col[s], row[t]))));
                }
            }
        }
        out.push(Functional::from_entries(n, cells).unwrap());
    }
    out
}

/// Every element of the coadjoint cluster of `τ`, built as the sum of its
/// primary clusters. Sorted and free of duplicates.
pub fn cluster_elements(field: &Field, tau: &Template) -> Vec<Functional> {
    let n = tau.n();
    let mut sums: BTreeSet<Functional> = BTreeSet::new();
    sums.insert(Functional::zero(n));
    for &(i, j, a) in tau.cells() {
        let piece = primary_cluster_elements(field, n, i, j, a);
        let mut next = BTreeSet::new();
        for s in &sums {
            for p in &piece {
                next.insert(s.add(field, p).unwrap());
            }
        }
        sums = next;
    }
    sums.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{act_left, act_right, coact_left, coact_right};

    fn tmpl(field: &Field, n: usize, cells: &[(usize, usize, i64)]) -> Template {
        Template::new(n, cells.iter().map(|&(i, j, a)| (i, j, field.from_int(a)))).unwrap()
    }

    fn fun(field: &Field, n: usize, cells: &[(usize, usize, i64)]) -> Functional {
        Functional::from_entries(n, cells.iter().map(|&(i, j, a)| (i, j, field.from_int(a)))).unwrap()
    }

    fn nil(field: &Field, n: usize, cells: &[(usize, usize, i64)]) -> NilMatrix {
        NilMatrix::from_entries(n, cells.iter().map(|&(i, j, a)| (i, j, field.from_int(a)))).unwrap()
    }

    #[test]
    fn template_validation() {
        let f = Field::prime(3).unwrap();
        assert!(Template::new(3, [(1, 2, f.one()), (1, 3, f.one())]).is_err());
        assert!(Template::new(3, [(1, 3, f.one()), (2, 3, f.one())]).is_err());
        assert!(Template::new(3, [(2, 2, f.one())]).is_err());
        assert!(Template::new(3, [(1, 2, f.zero())]).is_err());
        let t = tmpl(&f, 3, &[(2, 3, 1), (1, 2, 2)]);
        assert_eq!(t.text(&f), "(1,2)=2;(2,3)=1");
        assert_eq!(Template::parse(&f, 3, "(1,2)=2;(2,3)=1").unwrap(), t);
        assert_eq!(Template::empty(3).text(&f), "0");
        assert_eq!(Template::parse(&f, 3, "0").unwrap(), Template::empty(3));
    }

    #[test]
    fn adjoint_examples() {
        let f2 = Field::prime(2).unwrap();
        assert!(adjoint_template_of(&f2, &NilMatrix::zero(3)).template.is_empty());
        // e12 · (I + e23) = e12 + e13, while the double orbit of e13 is {e13}
        let r = adjoint_template_of(&f2, &nil(&f2, 3, &[(1, 3, 1), (1, 2, 1)]));
        assert_eq!(r.template, tmpl(&f2, 3, &[(1, 2, 1)]));
        let r = adjoint_template_of(&f2, &nil(&f2, 3, &[(1, 2, 1), (2, 3, 1)]));
        assert_eq!(r.template, tmpl(&f2, 3, &[(1, 2, 1), (2, 3, 1)]));
    }

    #[test]
    fn coadjoint_examples() {
        let f2 = Field::prime(2).unwrap();
        assert!(coadjoint_template_of(&f2, &Functional::zero(3)).template.is_empty());
        let r = coadjoint_template_of(&f2, &fun(&f2, 3, &[(1, 3, 1), (2, 3, 1)]));
        assert_eq!(r.template, tmpl(&f2, 3, &[(1, 3, 1)]));
        let r = coadjoint_template_of(&f2, &fun(&f2, 3, &[(1, 2, 1), (2, 3, 1)]));
        assert_eq!(r.template, tmpl(&f2, 3, &[(1, 2, 1), (2, 3, 1)]));
    }

    #[test]
    fn witnesses_reproduce_templates() {
        for field in [Field::prime(2).unwrap(), Field::prime(3).unwrap()] {
            for n in [3, 4] {
                for e in crate::matrix::all_entries(&field, n) {
                    let x = NilMatrix::from_entries(n, e.iter().copied()).unwrap();
                    let r = adjoint_template_of(&field, &x);
                    let moved = act_right(&field, &act_left(&field, &r.g, &x).unwrap(), &r.h).unwrap();
                    assert_eq!(moved, r.template.to_matrix());
                    assert_eq!(classify_adjoint(&field, &x), r.template);

                    let lam = Functional::from_entries(n, e).unwrap();
                    let r = coadjoint_template_of(&field, &lam);
                    let moved = coact_right(&field, &coact_left(&field, &r.g, &lam).unwrap(), &r.h).unwrap();
                    assert_eq!(moved, r.template.to_functional());
                }
            }
        }
    }

    #[test]
    fn rank_windows() {
        let f = Field::prime(5).unwrap();
        assert_eq!(rank_invariant(&f, 1, 4, &NilMatrix::zero(4)).unwrap(), 0);
        assert_eq!(rank_invariant(&f, 1, 3, &nil(&f, 3, &[(1, 2, 1), (2, 3, 1)])).unwrap(), 2);
        assert_eq!(rank_invariant_dual(&f, 2, 3, &fun(&f, 3, &[(1, 3, 1)])).unwrap(), 1);
        assert!(rank_invariant(&f, 2, 2, &NilMatrix::zero(3)).is_err());
        assert!(rank_invariant_dual(&f, 1, 4, &Functional::zero(3)).is_err());
    }

    #[test]
    fn invariant_examples() {
        let f = Field::prime(3).unwrap();
        let inv = invariants_of(&tmpl(&f, 3, &[(1, 3, 1)]));
        assert_eq!(inv, ClusterInvariants { d: 1, i: 0, d_rows: vec![0, 1] });
        let inv = invariants_of(&tmpl(&f, 3, &[(1, 2, 1), (2, 3, 1)]));
        assert_eq!((inv.d, inv.i), (0, 0));
        let inv = invariants_of(&tmpl(&f, 4, &[(1, 4, 1), (2, 3, 1)]));
        assert_eq!((inv.d, inv.i), (2, 0));
        // (1,3) and (2,4): corner (2,3) has (1,3) above and (2,4) to the right
        let inv = invariants_of(&tmpl(&f, 4, &[(1, 3, 1), (2, 4, 1)]));
        assert_eq!((inv.d, inv.i), (2, 1));
    }

    #[test]
    fn dual_dim_examples() {
        let f = Field::prime(2).unwrap();
        assert_eq!(dual_dims(&f, &Functional::zero(3)), (0, 0, 0));
        assert_eq!(dual_dims(&f, &fun(&f, 3, &[(1, 3, 1)])), (1, 1, 0));
        assert_eq!(dual_dims(&f, &fun(&f, 3, &[(1, 3, 1), (1, 2, 1)])), (1, 1, 0));
    }

    #[test]
    fn combinatorial_invariants_match_ranks() {
        for field in [Field::prime(2).unwrap(), Field::prime(3).unwrap()] {
            for n in 1..=4 {
                for t in enumerate_templates(&field, n) {
                    let inv = invariants_of(&t);
                    let (l, r, both) = dual_dims(&field, &t.to_functional());
                    assert_eq!((l as u32, r as u32, both as u32), (inv.d, inv.d, inv.i), "{t}");
                    assert_eq!(inv.d_rows.iter().sum::<u32>(), inv.d);
                }
            }
        }
    }

    #[test]
    fn sizes() {
        let f2 = Field::prime(2).unwrap();
        assert_eq!(cluster_size(&f2, &Template::empty(3)), BigUint::one());
        assert_eq!(cluster_size(&f2, &tmpl(&f2, 3, &[(1, 3, 1)])), BigUint::from(4u32));
        let sizes: Vec<BigUint> = enumerate_templates(&f2, 3).iter().map(|t| cluster_size(&f2, t)).collect();
        let expect: Vec<BigUint> = [1u32, 1, 1, 4, 1].iter().map(|&v| BigUint::from(v)).collect();
        assert_eq!(sizes, expect);
        for field in [f2.clone(), Field::prime(3).unwrap(), Field::new(2, 2).unwrap()] {
            for n in 1..=4 {
                let total: BigUint = enumerate_templates(&field, n).iter().map(|t| cluster_size(&field, t)).sum();
                assert_eq!(total, pow_q(&field, (n * (n - 1) / 2) as u32));
                let total: BigUint =
                    enumerate_templates(&field, n).iter().map(|t| adjoint_cluster_size(&field, &t.to_matrix())).sum();
                assert_eq!(total, pow_q(&field, (n * (n - 1) / 2) as u32));
            }
        }
    }

    #[test]
    fn primary_pieces() {
        let f = Field::prime(3).unwrap();
        assert!(primary_components(&Template::empty(3)).is_empty());
        let t = tmpl(&f, 3, &[(1, 2, 2), (2, 3, 1)]);
        assert_eq!(primary_components(&t), vec![(1, 2, f.from_int(2)), (2, 3, f.one())]);
    }

    #[test]
    fn structured_clusters_classify_back() {
        for field in [Field::prime(2).unwrap(), Field::prime(3).unwrap()] {
            for n in 2..=4 {
                for t in enumerate_templates(&field, n) {
                    let elems = cluster_elements(&field, &t);
                    assert_eq!(BigUint::from(elems.len()), cluster_size(&field, &t), "{t}");
                    for e in &elems {
                        assert_eq!(classify_coadjoint(&field, e), t);
                    }
                }
            }
        }
    }

    #[test]
    fn enumeration() {
        let f2 = Field::prime(2).unwrap();
        let n2 = enumerate_templates(&f2, 2);
        assert_eq!(n2, vec![Template::empty(2), tmpl(&f2, 2, &[(1, 2, 1)])]);
        let n3: Vec<String> = enumerate_templates(&f2, 3).iter().map(|t| t.text(&f2)).collect();
        assert_eq!(n3, ["0", "(1,2)=1", "(2,3)=1", "(1,3)=1", "(1,2)=1;(2,3)=1"]);
        assert_eq!(enumerate_templates(&f2, 4).len(), 15);
    }

    #[test]
    fn bell_polynomials() {
        for q in 2u32..=9 {
            let m = BigUint::from(q - 1);
            assert_eq!(bell_poly(0, q), BigUint::one());
            assert_eq!(bell_poly(1, q), BigUint::one());
            assert_eq!(bell_poly(2, q), BigUint::from(q));
            assert_eq!(bell_poly(3, q), BigUint::one() + 3u32 * &m + &m * &m);
            assert_eq!(bell_poly(4, q), BigUint::one() + 6u32 * &m + 7u32 * &m * &m + &m * &m * &m);
        }
        assert_eq!(bell_poly(4, 2), BigUint::from(15u32));
        let as_u32: Vec<u32> = bell_poly_all(4, 2).iter().map(|b| b.try_into().unwrap()).collect();
        assert_eq!(as_u32, [1, 1, 2, 5, 15]);
        for (p, k) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
            let field = Field::new(p, k).unwrap();
            for n in 1..=4 {
                assert_eq!(BigUint::from(enumerate_templates(&field, n).len()), bell_poly(n, field.q()));
            }
        }
    }
}
