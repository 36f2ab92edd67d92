//! Decomposing tensor products of cluster characters.
//!
//! Two independent routes: a rewrite system on primary factors, and direct
//! counting of `Ψ1 + Ψ2` against the cluster invariants.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::clusters::{classify_coadjoint, cluster_elements, cluster_size, invariants_of, pow_q, Template};
use crate::config::Caps;
use crate::error::{check_cap, Error, Result};
use crate::gf::{Field, FieldElement};

/// A primary factor `χ(i, j, a)`.
pub type Factor = (usize, usize, FieldElement);

/// A non-negative integer combination of cluster characters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharSum {
    n: usize,
    terms: BTreeMap<Template, BigUint>,
}

impl CharSum {
    pub fn new(n: usize) -> CharSum {
        CharSum { n, terms: BTreeMap::new() }
    }

    pub fn single(t: Template) -> CharSum {
        let mut s = CharSum::new(t.n());
        s.add_term(t, BigUint::from(1u32));
        s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_term(&mut self, t: Template, mult: BigUint) {
        if !mult.is_zero() {
            *self.terms.entry(t).or_default() += mult;
        }
    }

    pub fn merge(&mut self, other: &CharSum) {
        for (t, m) in &other.terms {
            self.add_term(t.clone(), m.clone());
        }
    }

    pub fn multiplicity(&self, t: &Template) -> BigUint {
        self.terms.get(t).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> &BTreeMap<Template, BigUint> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Σ mult · χ(τ)(1)`.
    pub fn total_degree(&self, field: &Field) -> BigUint {
        self.terms
            .iter()
            .map(|(t, m)| m * pow_q(field, invariants_of(t).d))
            .sum()
    }

    pub fn text(&self, field: &Field) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(t, m)| format!("{m}*chi[{}]", t.text(field)))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn to_json(&self, field: &Field) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(t, m)| {
                let mult = m.to_u64().map_or_else(|| json!(m.to_string()), |v| json!(v));
                json!({"template": t.text(field), "mult": mult})
            })
            .collect();
        json!({"n": self.n, "terms": terms, "total_degree": self.total_degree(field).to_string()})
    }
}

/// Which of the two equivalent expansions to use when two factors sit on
/// the same cell with values that do not cancel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SameCellExpansion {
    /// Add characters in column `j` below the cell.
    #[default]
    Column,
    /// Add characters in row `i` left of the cell.
    Row,
}

type Terms = BTreeMap<Template, BigUint>;

/// The rewrite system with its memo table; reuse one engine across many
/// products of the same size.
pub struct TensorEngine {
    field: Field,
    n: usize,
    rule: SameCellExpansion,
    memo: HashMap<Vec<Factor>, Terms>,
}

fn collide(x: &Factor, y: &Factor) -> bool {
    x.0 == y.0 || x.1 == y.1
}

impl TensorEngine {
    pub fn new(field: &Field, n: usize) -> TensorEngine {
        TensorEngine::with_rule(field, n, SameCellExpansion::Column)
    }

    pub fn with_rule(field: &Field, n: usize, rule: SameCellExpansion) -> TensorEngine {
        TensorEngine { field: field.clone(), n, rule, memo: HashMap::new() }
    }

    /// Decomposes the product of the given primary factors.
    pub fn product(&mut self, factors: &[Factor]) -> Result<CharSum> {
        for &(i, j, _) in factors {
            if !(1 <= i && i < j && j <= self.n) {
                return Err(Error::Argument(format!("factor ({i},{j}) is not above the diagonal for n = {}", self.n)));
            }
        }
        let terms = self.expand(factors.to_vec());
        Ok(CharSum { n: self.n, terms })
    }

    /// Product of the cluster characters of two templates.
    pub fn product_of(&mut self, t1: &Template, t2: &Template) -> Result<CharSum> {
        if t1.n() != self.n || t2.n() != self.n {
            return Err(Error::Argument("template size differs from the engine size".into()));
        }
        let factors: Vec<Factor> = t1.cells().iter().chain(t2.cells()).copied().collect();
        self.product(&factors)
    }

    fn absorb(&self, fs: &mut Vec<Factor>) {
        let f = &self.field;
        'outer: loop {
            for x in 0..fs.len() {
                if fs[x].1 != fs[x].0 + 1 {
                    continue;
                }
                for y in 0..fs.len() {
                    if y == x || !collide(&fs[x], &fs[y]) {
                        continue;
                    }
                    if (fs[x].0, fs[x].1) == (fs[y].0, fs[y].1) {
                        fs[x].2 = f.add(fs[x].2, fs[y].2);
                        fs.remove(y);
                        fs.retain(|c| !c.2.is_zero());
                    } else {
                        // the other factor is strictly above the second
                        // diagonal and swallows this one
                        fs.remove(x);
                    }
                    continue 'outer;
                }
            }
            return;
        }
    }

    fn nonzero_cells(&self, cells: impl Iterator<Item = (usize, usize)>) -> Vec<Option<Factor>> {
        let mut out = vec![None];
        for (i, j) in cells {
            out.extend(self.field.nonzero_elements().map(|c| Some((i, j, c))));
        }
        out
    }

    fn expand(&mut self, mut fs: Vec<Factor>) -> Terms {
        fs.retain(|c| !c.2.is_zero());
        self.absorb(&mut fs);
        fs.sort();
        if let Some(hit) = self.memo.get(&fs) {
            return hit.clone();
        }
        let pair = (0..fs.len())
            .flat_map(|x| (x + 1..fs.len()).map(move |y| (x, y)))
            .find(|&(x, y)| collide(&fs[x], &fs[y]));
        let Some((x, y)) = pair else {
            let t = Template::new(self.n, fs.iter().copied()).expect("rewrite produced a rook placement");
            let terms = Terms::from([(t, BigUint::from(1u32))]);
            self.memo.insert(fs, terms.clone());
            return terms;
        };
        let rest: Vec<Factor> = fs.iter().enumerate().filter(|&(k, _)| k != x && k != y).map(|(_, c)| *c).collect();
        let (i, j, a) = fs[x];
        let (i2, j2, b) = fs[y];
        let branches: Vec<Vec<Factor>> = if (i, j) == (i2, j2) {
            let s = self.field.add(a, b);
            if !s.is_zero() {
                let extras = match self.rule {
                    SameCellExpansion::Column => self.nonzero_cells((i + 1..j).map(|r| (r, j))),
                    SameCellExpansion::Row => self.nonzero_cells((i + 1..j).map(|c| (i, c))),
                };
                extras.into_iter().map(|e| [vec![(i, j, s)], e.into_iter().collect()].concat()).collect()
            } else {
                let down = self.nonzero_cells((i + 1..j).map(|r| (r, j)));
                let left = self.nonzero_cells((i + 1..j).map(|c| (i, c)));
                down.iter()
                    .flat_map(|u| left.iter().map(move |v| u.iter().chain(v).copied().collect()))
                    .collect()
            }
        } else if j == j2 {
            // sorted, so i < i2: keep the upper factor
            self.nonzero_cells((i2 + 1..j).map(|c| (i2, c)))
                .into_iter()
                .map(|e| [vec![(i, j, a)], e.into_iter().collect()].concat())
                .collect()
        } else {
            // same row; keep the factor further right
            let ((_, jr, ar), jl) = if j > j2 { ((i, j, a), j2) } else { ((i2, j2, b), j) };
            self.nonzero_cells((i + 1..jl).map(|r| (r, jl)))
                .into_iter()
                .map(|e| [vec![(i, jr, ar)], e.into_iter().collect()].concat())
                .collect()
        };
        let mut terms = Terms::new();
        for branch in branches {
            let sub = self.expand([rest.clone(), branch].concat());
            for (t, m) in sub {
                *terms.entry(t).or_default() += m;
            }
        }
        self.memo.insert(fs, terms.clone());
        terms
    }
}

pub fn tensor_rewrite(field: &Field, n: usize, factors: &[Factor]) -> Result<CharSum> {
    TensorEngine::new(field, n).product(factors)
}

pub fn tensor_rewrite_with(field: &Field, n: usize, factors: &[Factor], rule: SameCellExpansion) -> Result<CharSum> {
    TensorEngine::with_rule(field, n, rule).product(factors)
}

pub fn primary_product(field: &Field, n: usize, f1: Factor, f2: Factor) -> Result<CharSum> {
    tensor_rewrite(field, n, &[f1, f2])
}

pub fn tensor_templates(field: &Field, t1: &Template, t2: &Template) -> Result<CharSum> {
    if t1.n() != t2.n() {
        return Err(Error::Argument(format!("size mismatch: {} vs {}", t1.n(), t2.n())));
    }
    TensorEngine::new(field, t1.n()).product_of(t1, t2)
}

/// For every template `τ`, the number of pairs `(λ1, λ2) ∈ Ψ1 × Ψ2` with
/// `λ1 + λ2 ∈ Ψ(τ)`.
pub fn c_counts(field: &Field, t1: &Template, t2: &Template, caps: &Caps) -> Result<BTreeMap<Template, BigUint>> {
    if t1.n() != t2.n() {
        return Err(Error::Argument(format!("size mismatch: {} vs {}", t1.n(), t2.n())));
    }
    let pairs = cluster_size(field, t1) * cluster_size(field, t2);
    check_cap("cluster pairs", pairs.to_u128().unwrap_or(u128::MAX), caps.orbit)?;
    let e1 = cluster_elements(field, t1);
    let e2 = cluster_elements(field, t2);
    let counts = e1
        .par_iter()
        .fold(HashMap::<Template, u64>::new, |mut acc, a| {
            for b in &e2 {
                let s = a.add(field, b).expect("same size");
                *acc.entry(classify_coadjoint(field, &s)).or_default() += 1;
            }
            acc
        })
        .reduce(HashMap::new, |mut x, y| {
            for (t, c) in y {
                *x.entry(t).or_default() += c;
            }
            x
        });
    Ok(counts.into_iter().map(|(t, c)| (t, BigUint::from(c))).collect())
}

pub fn c_count(field: &Field, t1: &Template, t2: &Template, t: &Template, caps: &Caps) -> Result<BigUint> {
    Ok(c_counts(field, t1, t2, caps)?.remove(t).unwrap_or_default())
}

/// Decomposition from the counts: the multiplicity of `χ(τ)` is
/// `q^(i1 + i2 - d1 - d2 - d) · C(Ψ1, Ψ2, Ψ(τ))`.
pub fn tensor_by_counting(field: &Field, t1: &Template, t2: &Template, caps: &Caps) -> Result<CharSum> {
    let (a, b) = (invariants_of(t1), invariants_of(t2));
    let mut out = CharSum::new(t1.n());
    for (t, c) in c_counts(field, t1, t2, caps)? {
        let inv = invariants_of(&t);
        let num = c * pow_q(field, a.i + b.i);
        let den = pow_q(field, a.d + b.d + inv.d);
        let (m, r) = num.div_rem(&den);
        if !r.is_zero() {
            return Err(Error::InvariantViolation(format!(
                "multiplicity of {} in {} x {} is {num}/{den}, not an integer",
                t.text(field),
                t1.text(field),
                t2.text(field)
            )));
        }
        out.add_term(t, m);
    }
    Ok(out)
}

/// Multiplicity of the trivial character in `χ(τ1) ⊗ χ(τ2)`: `q^i(τ1)` when
/// `τ2 = -τ1`, zero otherwise.
pub fn trivial_multiplicity(field: &Field, t1: &Template, t2: &Template) -> BigUint {
    if *t2 == t1.neg(field) {
        pow_q(field, invariants_of(t1).i)
    } else {
        BigUint::zero()
    }
}
