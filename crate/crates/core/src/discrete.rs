//! The discrete-series character of U(n, F_q), as a combination of cluster
//! characters.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::characters::char_value_closed;
use crate::clusters::{bell_poly, enumerate_templates, invariants_of, pow_q, Template};
use crate::config::Caps;
use crate::cyclotomic::Cyclotomic;
use crate::error::{check_cap, Error, Result};
use crate::gf::Field;
use crate::matrix::{Functional, UniMatrix};

/// Whether the support of `λ` meets each of the rows `1..n-1`.
pub fn in_delta(lambda: &Functional) -> bool {
    (1..lambda.n()).all(|k| lambda.support().any(|(i, _)| i == k))
}

/// `(q - 1)(q^2 - 1)···(q^m - 1)`.
fn q_factorial(field: &Field, m: usize) -> BigUint {
    (1..=m as u32).map(|e| pow_q(field, e) - 1u32).product()
}

/// The value at the identity, `(q - 1)(q^2 - 1)···(q^(n-1) - 1)`.
pub fn identity_value(field: &Field, n: usize) -> BigUint {
    q_factorial(field, n.saturating_sub(1))
}

/// `δ(g) = (-1)^r (q - 1)···(q^(n-1-r) - 1)` where `r` is the rank of `g - I`.
pub fn delta_value(field: &Field, g: &UniMatrix) -> BigInt {
    let r = g.off().rank(field);
    let v = BigInt::from(q_factorial(field, g.n().saturating_sub(1 + r)));
    if r % 2 == 0 {
        v
    } else {
        -v
    }
}

/// Rows `k` in `1..n-1` that the support misses.
fn missing_rows(tau: &Template) -> impl Iterator<Item = usize> + '_ {
    (1..tau.n()).filter(|&k| tau.col_of_row(k).is_none())
}

/// Whether `τ` splits into diagonal blocks, i.e. some missing row `k` has
/// no support cell strictly straddling it.
pub fn is_degenerate(tau: &Template) -> bool {
    let inv = invariants_of(tau);
    missing_rows(tau).any(|k| inv.d_rows[k - 1] == 0)
}

/// Multiplicity of `χ(τ)` in `δ`: `q^(d - i) Π_{k ∈ Z} (1 - q^(-d_k))` over
/// the missing rows `Z`.
pub fn delta_multiplicity(field: &Field, tau: &Template) -> Result<BigUint> {
    if is_degenerate(tau) {
        return Ok(BigUint::zero());
    }
    let inv = invariants_of(tau);
    let mut num = pow_q(field, inv.d);
    let mut den = pow_q(field, inv.i);
    for k in missing_rows(tau) {
        let qk = pow_q(field, inv.d_rows[k - 1]);
        num *= &qk - 1u32;
        den *= qk;
    }
    let (m, r) = num.div_rem(&den);
    if !r.is_zero() {
        return Err(Error::InvariantViolation(format!(
            "discrete-series multiplicity of {} is {num}/{den}",
            tau.text(field)
        )));
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaDecomposition {
    pub field: Field,
    pub n: usize,
    /// Non-degenerate templates with their (positive) multiplicities.
    pub terms: BTreeMap<Template, BigUint>,
    pub identity_value: BigUint,
}

impl DeltaDecomposition {
    pub fn multiplicity(&self, tau: &Template) -> BigUint {
        self.terms.get(tau).cloned().unwrap_or_default()
    }

    /// `Σ mult · q^d`.
    pub fn total_degree(&self) -> BigUint {
        self.terms
            .iter()
            .map(|(t, m)| m * pow_q(&self.field, invariants_of(t).d))
            .sum()
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(t, m)| {
                let mult = m.to_u64().map_or_else(|| json!(m.to_string()), |v| json!(v));
                json!({"template": t.text(&self.field), "mult": mult})
            })
            .collect();
        json!({
            "n": self.n,
            "p": self.field.p(),
            "k": self.field.k(),
            "identity_value": self.identity_value.to_string(),
            "terms": terms,
        })
    }
}

/// Multiplicities of every template, checked against the rank formula at
/// every adjoint template and against the degree identity.
pub fn delta_decompose(field: &Field, n: usize, caps: &Caps) -> Result<DeltaDecomposition> {
    if n == 0 {
        return Err(Error::Argument("n must be at least 1".into()));
    }
    let count = bell_poly(n, field.q());
    check_cap("templates", count.to_u128().unwrap_or(u128::MAX), caps.table)?;
    let templates = enumerate_templates(field, n);
    let mults = templates
        .par_iter()
        .map(|t| delta_multiplicity(field, t))
        .collect::<Result<Vec<_>>>()?;
    let terms: BTreeMap<Template, BigUint> = templates
        .iter()
        .zip(&mults)
        .filter(|(_, m)| !m.is_zero())
        .map(|(t, m)| (t.clone(), m.clone()))
        .collect();
    let dec = DeltaDecomposition { field: field.clone(), n, terms, identity_value: identity_value(field, n) };
    if dec.total_degree() != dec.identity_value {
        return Err(Error::InvariantViolation(format!(
            "discrete-series degrees sum to {}, expected {}",
            dec.total_degree(),
            dec.identity_value
        )));
    }
    let p = field.p();
    templates.par_iter().try_for_each(|x| {
        let mut value = Cyclotomic::zero(p);
        for (t, m) in &dec.terms {
            let mult = BigRational::from_integer(BigInt::from(m.clone()));
            value += &char_value_closed(field, t, x)?.scale(&mult);
        }
        let expect = delta_value(field, &UniMatrix::from_nil(x.to_matrix()));
        if value != Cyclotomic::from_int(p, expect.clone()) {
            return Err(Error::InvariantViolation(format!(
                "discrete series at {}: decomposition gives {value}, rank formula {expect}",
                x.text(field)
            )));
        }
        Ok(())
    })?;
    Ok(dec)
}
