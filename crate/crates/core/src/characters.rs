//! Cluster characters and the supercharacter table.
//!
//! The additive character is `θ(x) = ζ_p^Tr(x)`, so every value lives in
//! Q(ζ_p) and is computed exactly.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::clusters::{adjoint_cluster_size, cluster_elements, enumerate_templates, invariants_of, pow_q, Template};
use crate::config::Caps;
use crate::cyclotomic::Cyclotomic;
use crate::error::{check_cap, Error, Result};
use crate::gf::{Field, FieldElement};
use crate::matrix::{Functional, UniMatrix};

pub fn theta_of(field: &Field, x: FieldElement) -> Cyclotomic {
    Cyclotomic::zeta_pow(field.p(), field.trace(x) as i64)
}

/// The Fourier basis function `v(λ)` evaluated at `g`: `θ[λ(g - I)]`.
pub fn fourier_value(field: &Field, lambda: &Functional, g: &UniMatrix) -> Result<Cyclotomic> {
    Ok(theta_of(field, lambda.eval(field, g.off())?))
}

fn same_n(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::Argument(format!("size mismatch: {a} vs {b}")))
    }
}

/// Value of `χ(τ)` at `I + X` for an adjoint template `X`, read off the two
/// supports: zero when `X` has an entry below or left of a support cell of
/// `τ`, otherwise `q^(d(τ) - hooks) · θ[τ(X)]` where a hook is a corner
/// with a support cell of `τ` to its right and an entry of `X` below it.
pub fn char_value_closed(field: &Field, tau: &Template, x: &Template) -> Result<Cyclotomic> {
    same_n(tau.n(), x.n())?;
    let p = field.p();
    let blocked = tau.cells().iter().any(|&(a, b, _)| {
        x.row_of_col(b).is_some_and(|(r, _)| r > a) || x.col_of_row(a).is_some_and(|(c, _)| c < b)
    });
    if blocked {
        return Ok(Cyclotomic::zero(p));
    }
    let n = tau.n();
    let hooks = (1..=n)
        .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
        .filter(|&(i, j)| {
            tau.col_of_row(i).is_some_and(|(c, _)| c > j) && x.row_of_col(j).is_some_and(|(r, _)| r > i)
        })
        .count() as u32;
    let d = invariants_of(tau).d;
    let pairing = tau
        .cells()
        .iter()
        .fold(field.zero(), |acc, &(i, j, a)| field.add(acc, field.mul(a, x.get(i, j))));
    let scale = BigRational::from_integer(BigInt::from(pow_q(field, d - hooks)));
    Ok(theta_of(field, pairing).scale(&scale))
}

/// `Σ_{λ ∈ points} θ[λ(X)]`, accumulated as exponent counts.
pub(crate) fn theta_sum<'a>(field: &Field, points: impl Iterator<Item = &'a Functional>, g: &UniMatrix) -> Cyclotomic {
    let mut counts = vec![0i64; field.p() as usize];
    for lam in points {
        counts[field.trace(lam.eval_unchecked(field, g.off())) as usize] += 1;
    }
    Cyclotomic::from_exponent_counts(field.p(), &counts)
}

/// Character value from the cluster average, `q^(i - d) Σ_{λ ∈ Ψ(τ)} θ[λ(g - I)]`.
pub fn char_value_sum(field: &Field, tau: &Template, g: &UniMatrix) -> Result<Cyclotomic> {
    same_n(tau.n(), g.n())?;
    let elems = cluster_elements(field, tau);
    Ok(char_value_sum_over(field, tau, &elems, g))
}

/// Same as [`char_value_sum`] with the cluster already enumerated.
pub fn char_value_sum_over(field: &Field, tau: &Template, cluster: &[Functional], g: &UniMatrix) -> Cyclotomic {
    let inv = invariants_of(tau);
    let denom = BigInt::from(pow_q(field, inv.d - inv.i));
    theta_sum(field, cluster.iter(), g).scale(&BigRational::new(BigInt::one(), denom))
}

pub fn degree(field: &Field, tau: &Template) -> BigUint {
    pow_q(field, invariants_of(tau).d)
}

pub fn self_intertwining(field: &Field, tau: &Template) -> BigUint {
    pow_q(field, invariants_of(tau).i)
}

/// The supercharacter table: rows are coadjoint templates (cluster
/// characters), columns adjoint templates (conjugacy clusters).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterTable {
    pub field: Field,
    pub n: usize,
    pub rows: Vec<Template>,
    pub cols: Vec<Template>,
    pub values: Vec<Vec<Cyclotomic>>,
    pub row_degrees: Vec<BigUint>,
    pub row_selfint: Vec<BigUint>,
    pub col_sizes: Vec<BigUint>,
}

pub fn build_table(field: &Field, n: usize, caps: &Caps) -> Result<CharacterTable> {
    if n == 0 {
        return Err(Error::Argument("n must be at least 1".into()));
    }
    let count = crate::clusters::bell_poly(n, field.q());
    check_cap("character table rows", u128::try_from(&count).unwrap_or(u128::MAX), caps.table)?;
    let templates = enumerate_templates(field, n);
    let values = templates
        .par_iter()
        .map(|tau| {
            templates
                .iter()
                .map(|x| char_value_closed(field, tau, x))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CharacterTable {
        field: field.clone(),
        n,
        row_degrees: templates.iter().map(|t| degree(field, t)).collect(),
        row_selfint: templates.iter().map(|t| self_intertwining(field, t)).collect(),
        col_sizes: templates.iter().map(|t| adjoint_cluster_size(field, &t.to_matrix())).collect(),
        rows: templates.clone(),
        cols: templates,
        values,
    })
}

impl CharacterTable {
    pub fn group_order(&self) -> BigUint {
        pow_q(&self.field, (self.n * (self.n - 1) / 2) as u32)
    }

    pub fn row_index(&self, tau: &Template) -> Option<usize> {
        self.rows.binary_search(tau).ok()
    }

    pub fn col_index(&self, x: &Template) -> Option<usize> {
        self.cols.binary_search(x).ok()
    }

    pub fn row(&self, tau: &Template) -> Option<&[Cyclotomic]> {
        self.row_index(tau).map(|r| self.values[r].as_slice())
    }

    /// `(1/|U|) Σ_c |K_c| f(c) conj(h(c))` for class functions given by
    /// their values on the columns.
    pub fn inner_product(&self, f: &[Cyclotomic], h: &[Cyclotomic]) -> Result<Cyclotomic> {
        if f.len() != self.cols.len() || h.len() != self.cols.len() {
            return Err(Error::Argument("class function length does not match the table".into()));
        }
        let p = self.field.p();
        let mut acc = Cyclotomic::zero(p);
        for ((a, b), size) in f.iter().zip(h).zip(&self.col_sizes) {
            if a.is_zero() || b.is_zero() {
                continue;
            }
            let w = BigRational::from_integer(BigInt::from(size.clone()));
            acc += &(a * &b.conj()).scale(&w);
        }
        Ok(acc.scale(&BigRational::new(BigInt::one(), BigInt::from(self.group_order()))))
    }

    pub fn to_json(&self) -> Value {
        let f = &self.field;
        json!({
            "n": self.n,
            "p": f.p(),
            "k": f.k(),
            "modulus": f.modulus(),
            "rows": self.rows.iter().map(|t| t.text(f)).collect::<Vec<_>>(),
            "cols": self.cols.iter().map(|t| t.text(f)).collect::<Vec<_>>(),
            "values": self.values.iter().map(|r| r.iter().map(Cyclotomic::to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "degrees": self.row_degrees.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "self_intertwining": self.row_selfint.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "col_sizes": self.col_sizes.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(value: &Value) -> Result<CharacterTable> {
        let bad = |what: &str| Error::Parse(format!("table json: {what}"));
        let get_u = |key: &str| value.get(key).and_then(Value::as_u64).ok_or_else(|| bad(key));
        let n = get_u("n")? as usize;
        let field = Field::with_cap(get_u("p")? as u32, get_u("k")? as u32, crate::gf::MAX_FIELD_ORDER)?;
        if let Some(m) = value.get("modulus") {
            let m: Vec<u32> = serde_json::from_value(m.clone()).map_err(|e| bad(&e.to_string()))?;
            if m.as_slice() != field.modulus() {
                return Err(bad("modulus differs from the canonical one"));
            }
        }
        let strings = |key: &str| -> Result<Vec<String>> {
            serde_json::from_value(value.get(key).cloned().ok_or_else(|| bad(key))?).map_err(|e| bad(&e.to_string()))
        };
        let templates = |key: &str| -> Result<Vec<Template>> {
            strings(key)?.iter().map(|s| Template::parse(&field, n, s)).collect()
        };
        let biguints = |key: &str| -> Result<Vec<BigUint>> {
            strings(key)?.iter().map(|s| s.parse::<BigUint>().map_err(|_| bad(key))).collect()
        };
        let values = value
            .get("values")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("values"))?
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| bad("values row"))?
                    .iter()
                    .map(Cyclotomic::from_json)
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CharacterTable {
            rows: templates("rows")?,
            cols: templates("cols")?,
            values,
            row_degrees: biguints("degrees")?,
            row_selfint: biguints("self_intertwining")?,
            col_sizes: biguints("col_sizes")?,
            field,
            n,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomCheck {
    pub name: &'static str,
    pub failures: Vec<String>,
}

impl AxiomCheck {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(AxiomCheck::passed)
    }

    pub fn failures(&self) -> Vec<String> {
        self.checks
            .iter()
            .flat_map(|c| c.failures.iter().map(move |f| format!("{}: {f}", c.name)))
            .collect()
    }
}

/// Checks the supercharacter-theory axioms on a built table, itemizing every
/// failure.
pub fn verify_axioms(table: &CharacterTable) -> AxiomReport {
    let f = &table.field;
    let p = f.p();
    let order = table.group_order();
    let identity_col = table.col_index(&Template::empty(table.n));
    let mut checks = Vec::new();

    let mut failures = Vec::new();
    if table.rows.len() != table.cols.len() {
        failures.push(format!("{} characters vs {} classes", table.rows.len(), table.cols.len()));
    }
    let expected = crate::clusters::bell_poly(table.n, f.q());
    if BigUint::from(table.rows.len()) != expected {
        failures.push(format!("{} rows, expected B(n,q) = {expected}", table.rows.len()));
    }
    checks.push(AxiomCheck { name: "counts", failures });

    let mut failures = Vec::new();
    let total: BigUint = table.col_sizes.iter().sum();
    if total != order {
        failures.push(format!("superclass sizes sum to {total}, group order is {order}"));
    }
    if identity_col.is_none_or(|c| !table.col_sizes[c].is_one()) {
        failures.push("identity is not its own superclass".into());
    }
    checks.push(AxiomCheck { name: "superclasses", failures });

    let mut failures = Vec::new();
    let mut regular = vec![Cyclotomic::zero(p); table.cols.len()];
    for (r, tau) in table.rows.iter().enumerate() {
        let inv = invariants_of(tau);
        if inv.d < inv.i {
            failures.push(format!("row {} has d < i; multiplicity q^(d-i) is not integral", tau.text(f)));
            continue;
        }
        let mult = BigRational::from_integer(BigInt::from(pow_q(f, inv.d - inv.i)));
        for (c, v) in table.values[r].iter().enumerate() {
            regular[c] += &v.scale(&mult);
        }
    }
    for (c, v) in regular.iter().enumerate() {
        let expect = if Some(c) == identity_col {
            Cyclotomic::from_int(p, BigInt::from(order.clone()))
        } else {
            Cyclotomic::zero(p)
        };
        if *v != expect {
            failures.push(format!("at {}: {} instead of {}", table.cols[c].text(f), v, expect));
        }
    }
    checks.push(AxiomCheck { name: "regular-character", failures });

    let mut failures = Vec::new();
    if let Some(c) = identity_col {
        for (r, tau) in table.rows.iter().enumerate() {
            let expect = Cyclotomic::from_int(p, BigInt::from(table.row_degrees[r].clone()));
            if table.values[r][c] != expect {
                failures.push(format!("{} has identity value {}, degree {}", tau.text(f), table.values[r][c], expect));
            }
        }
    }
    checks.push(AxiomCheck { name: "degrees", failures });

    let pairs: Vec<(usize, usize)> = (0..table.rows.len()).flat_map(|r| (r..table.rows.len()).map(move |s| (r, s))).collect();
    let failures: Vec<String> = pairs
        .par_iter()
        .filter_map(|&(r, s)| {
            let got = table.inner_product(&table.values[r], &table.values[s]).ok()?;
            let expect = if r == s {
                Cyclotomic::from_int(p, BigInt::from(table.row_selfint[r].clone()))
            } else {
                Cyclotomic::zero(p)
            };
            (got != expect).then(|| {
                format!("<{}, {}> = {}, expected {}", table.rows[r].text(f), table.rows[s].text(f), got, expect)
            })
        })
        .collect();
    checks.push(AxiomCheck { name: "orthogonality", failures });

    AxiomReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clusters::classify_adjoint;
    use crate::matrix::NilMatrix;

    fn tmpl(field: &Field, n: usize, cells: &[(usize, usize, i64)]) -> Template {
        Template::new(n, cells.iter().map(|&(i, j, a)| (i, j, field.from_int(a)))).unwrap()
    }

    fn uni(field: &Field, n: usize, cells: &[(usize, usize, i64)]) -> UniMatrix {
        UniMatrix::from_nil(NilMatrix::from_entries(n, cells.iter().map(|&(i, j, a)| (i, j, field.from_int(a)))).unwrap())
    }

    fn ints(p: u32, vals: &[i64]) -> Vec<Cyclotomic> {
        vals.iter().map(|&v| Cyclotomic::from_int(p, v)).collect()
    }

    #[test]
    fn theta_values() {
        let f2 = Field::prime(2).unwrap();
        assert_eq!(theta_of(&f2, f2.zero()), Cyclotomic::one(2));
        assert_eq!(theta_of(&f2, f2.one()), Cyclotomic::from_int(2, -1));
        let f3 = Field::prime(3).unwrap();
        assert_eq!(theta_of(&f3, f3.one()).coeffs(), Cyclotomic::zeta_pow(3, 1).coeffs());
        for a in f3.elements() {
            for b in f3.elements() {
                assert_eq!(theta_of(&f3, f3.add(a, b)), &theta_of(&f3, a) * &theta_of(&f3, b));
            }
        }
    }

    #[test]
    fn fourier_examples() {
        let f2 = Field::prime(2).unwrap();
        let eps13 = tmpl(&f2, 3, &[(1, 3, 1)]).to_functional();
        let eps12 = tmpl(&f2, 3, &[(1, 2, 1)]).to_functional();
        assert_eq!(fourier_value(&f2, &Functional::zero(3), &uni(&f2, 3, &[(1, 2, 1)])).unwrap(), Cyclotomic::one(2));
        assert_eq!(fourier_value(&f2, &eps13, &uni(&f2, 3, &[(1, 3, 1)])).unwrap(), Cyclotomic::from_int(2, -1));
        assert_eq!(fourier_value(&f2, &eps12, &uni(&f2, 3, &[(2, 3, 1)])).unwrap(), Cyclotomic::one(2));
        // v(λ1 + λ2) = v(λ1) v(λ2)
        let g = uni(&f2, 3, &[(1, 2, 1), (1, 3, 1)]);
        let sum = eps12.add(&f2, &eps13).unwrap();
        assert_eq!(
            fourier_value(&f2, &sum, &g).unwrap(),
            &fourier_value(&f2, &eps12, &g).unwrap() * &fourier_value(&f2, &eps13, &g).unwrap()
        );
    }

    #[test]
    fn closed_form_examples() {
        let f2 = Field::prime(2).unwrap();
        let eps13 = tmpl(&f2, 3, &[(1, 3, 1)]);
        assert_eq!(char_value_closed(&f2, &eps13, &eps13).unwrap(), Cyclotomic::from_int(2, -2));
        assert!(char_value_closed(&f2, &eps13, &tmpl(&f2, 3, &[(1, 2, 1)])).unwrap().is_zero());
        for field in [f2.clone(), Field::prime(3).unwrap()] {
            for t in enumerate_templates(&field, 4) {
                let at_identity = char_value_closed(&field, &t, &Template::empty(4)).unwrap();
                assert_eq!(at_identity, Cyclotomic::from_int(field.p(), BigInt::from(degree(&field, &t))));
            }
        }
        assert!(char_value_closed(&f2, &eps13, &Template::empty(4)).is_err());
    }

    #[test]
    fn sum_form_examples() {
        let f2 = Field::prime(2).unwrap();
        let eps13 = tmpl(&f2, 3, &[(1, 3, 1)]);
        for g in [uni(&f2, 3, &[(1, 2, 1)]), uni(&f2, 3, &[(1, 3, 1), (2, 3, 1)])] {
            assert_eq!(char_value_sum(&f2, &Template::empty(3), &g).unwrap(), Cyclotomic::one(2));
        }
        assert_eq!(char_value_sum(&f2, &eps13, &uni(&f2, 3, &[(1, 3, 1)])).unwrap(), Cyclotomic::from_int(2, -2));
        assert!(char_value_sum(&f2, &eps13, &uni(&f2, 3, &[(1, 2, 1), (1, 3, 1)])).unwrap().is_zero());
    }

    #[test]
    fn closed_and_sum_forms_agree() {
        for field in [Field::prime(2).unwrap(), Field::prime(3).unwrap(), Field::new(2, 2).unwrap()] {
            let n = if field.q() == 2 { 4 } else { 3 };
            let templates = enumerate_templates(&field, n);
            for tau in &templates {
                let cluster = cluster_elements(&field, tau);
                for x in &templates {
                    let g = UniMatrix::from_nil(x.to_matrix());
                    assert_eq!(
                        char_value_closed(&field, tau, x).unwrap(),
                        char_value_sum_over(&field, tau, &cluster, &g),
                        "{tau} at {x}"
                    );
                }
            }
        }
    }

    #[test]
    fn sum_form_is_constant_on_conjugacy_clusters() {
        let field = Field::prime(3).unwrap();
        let n = 3;
        let templates = enumerate_templates(&field, n);
        for tau in &templates {
            let cluster = cluster_elements(&field, tau);
            for e in crate::matrix::all_entries(&field, n) {
                let x = NilMatrix::from_entries(n, e).unwrap();
                let rep = classify_adjoint(&field, &x);
                let g = UniMatrix::from_nil(x);
                assert_eq!(
                    char_value_sum_over(&field, tau, &cluster, &g),
                    char_value_closed(&field, tau, &rep).unwrap()
                );
            }
        }
    }

    #[test]
    fn degrees_and_self_intertwining() {
        let f2 = Field::prime(2).unwrap();
        let f3 = Field::prime(3).unwrap();
        assert_eq!(degree(&f2, &Template::empty(3)), BigUint::one());
        assert_eq!(self_intertwining(&f2, &Template::empty(3)), BigUint::one());
        let eps13 = tmpl(&f2, 3, &[(1, 3, 1)]);
        assert_eq!((degree(&f2, &eps13), self_intertwining(&f2, &eps13)), (BigUint::from(2u32), BigUint::one()));
        let eps14 = tmpl(&f3, 4, &[(1, 4, 1)]);
        assert_eq!((degree(&f3, &eps14), self_intertwining(&f3, &eps14)), (BigUint::from(9u32), BigUint::one()));
    }

    #[test]
    fn small_tables() {
        let caps = Caps::default();
        let f2 = Field::prime(2).unwrap();
        let t2 = build_table(&f2, 2, &caps).unwrap();
        assert_eq!(t2.values, vec![ints(2, &[1, 1]), ints(2, &[1, -1])]);
        let t3 = build_table(&f2, 3, &caps).unwrap();
        assert_eq!(t3.rows.len(), 5);
        let eps13 = tmpl(&f2, 3, &[(1, 3, 1)]);
        assert_eq!(t3.row(&eps13).unwrap(), ints(2, &[2, 0, 0, -2, 0]).as_slice());
        for t in [&t2, &t3] {
            assert!(t.values[0].iter().all(|v| *v == Cyclotomic::one(2)));
        }
        let tiny = Caps { table: 4, ..caps };
        assert!(matches!(build_table(&f2, 3, &tiny), Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn inner_products() {
        let f2 = Field::prime(2).unwrap();
        let t = build_table(&f2, 3, &Caps::default()).unwrap();
        let row = |cells: &[(usize, usize, i64)]| t.row(&tmpl(&f2, 3, cells)).unwrap().to_vec();
        let triv = row(&[]);
        assert_eq!(t.inner_product(&triv, &triv).unwrap(), Cyclotomic::one(2));
        assert_eq!(t.inner_product(&row(&[(1, 3, 1)]), &row(&[(1, 3, 1)])).unwrap(), Cyclotomic::one(2));
        assert!(t.inner_product(&row(&[(1, 2, 1)]), &row(&[(1, 3, 1)])).unwrap().is_zero());
        assert!(t.inner_product(&triv[..2], &triv).is_err());
    }

    #[test]
    fn axioms_hold() {
        let caps = Caps::default();
        for (p, k, n) in [(2, 1, 2), (2, 1, 3), (3, 1, 3), (2, 1, 4), (2, 2, 3), (5, 1, 3)] {
            let f = Field::new(p, k).unwrap();
            let report = verify_axioms(&build_table(&f, n, &caps).unwrap());
            assert!(report.all_passed(), "{:?}", report.failures());
        }
    }

    #[test]
    fn regular_character_identity_value_n3_q2() {
        let f2 = Field::prime(2).unwrap();
        let mults: Vec<BigUint> = enumerate_templates(&f2, 3)
            .iter()
            .map(|t| {
                let inv = invariants_of(t);
                pow_q(&f2, inv.d - inv.i)
            })
            .collect();
        assert_eq!(mults, [1u32, 1, 1, 2, 1].map(BigUint::from));
        let identity: BigUint = mults.iter().zip(enumerate_templates(&f2, 3)).map(|(m, t)| m * degree(&f2, &t)).sum();
        assert_eq!(identity, BigUint::from(8u32));
    }

    #[test]
    fn table_json_round_trip() {
        let f = Field::new(2, 2).unwrap();
        let t = build_table(&f, 3, &Caps::default()).unwrap();
        let text = serde_json::to_string(&t.to_json()).unwrap();
        let back = CharacterTable::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, t);
    }
}
