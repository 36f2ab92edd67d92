//! End-to-end certification of the fast paths against the oracle for one
//! `(n, q)`, reported per result.

use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::characters::{build_table, char_value_sum_over, verify_axioms, CharacterTable};
use crate::clusters::{
    adjoint_cluster_size, adjoint_template_of, bell_poly, cluster_elements, cluster_size, coadjoint_template_of,
    enumerate_templates, invariants_of, pow_q, primary_components, Template,
};
use crate::config::Caps;
use crate::cyclotomic::Cyclotomic;
use crate::discrete::{delta_decompose, delta_value, is_degenerate};
use crate::error::{Error, Result};
use crate::gf::Field;
use crate::matrix::{act_left, act_right, coact_left, coact_right, Functional, NilMatrix, UniMatrix};
use crate::oracle::{self, BruteTable, OrbitDecomposition};
use crate::tensor::{tensor_by_counting, trivial_multiplicity, TensorEngine};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyOptions {
    pub caps: Caps,
    /// Seed for sampling tensor pairs when there are too many to check all.
    pub seed: u64,
    /// Check every ordered pair of templates when there are at most this many.
    pub exhaustive_pairs: usize,
    /// Otherwise check this many random pairs.
    pub sampled_pairs: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { caps: Caps::default(), seed: 0, exhaustive_pairs: 2500, sampled_pairs: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyEntry {
    pub key: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub n: usize,
    pub p: u32,
    pub k: u32,
    pub entries: Vec<VerifyEntry>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn entry(&self, key: &str) -> Option<&VerifyEntry> {
        self.entries.iter().find(|e| e.key == key)
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let _ = writeln!(out, "{:<7} {}  {}", e.key, if e.passed { "PASS" } else { "FAIL" }, e.detail);
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "p": self.p,
            "k": self.k,
            "passed": self.all_passed(),
            "results": self.entries.iter().map(|e| json!({"key": e.key, "passed": e.passed, "detail": e.detail})).collect::<Vec<_>>(),
        })
    }
}

/// Outcome of one check: a summary on success, the first few failures
/// otherwise.
struct Outcome {
    summary: String,
    failures: Vec<String>,
}

fn record(entries: &mut Vec<VerifyEntry>, key: &'static str, run: impl FnOnce() -> Result<Outcome>) -> Result<()> {
    let (passed, detail) = match run() {
        Ok(o) if o.failures.is_empty() => (true, o.summary),
        Ok(o) => {
            let shown: Vec<&str> = o.failures.iter().take(5).map(String::as_str).collect();
            (false, format!("{} failure(s): {}", o.failures.len(), shown.join("; ")))
        }
        Err(Error::InvariantViolation(msg)) => (false, msg),
        Err(e) => return Err(e),
    };
    entries.push(VerifyEntry { key, passed, detail });
    Ok(())
}

struct Context<'a> {
    field: &'a Field,
    n: usize,
    duals: OrbitDecomposition<Functional>,
    nils: OrbitDecomposition<NilMatrix>,
    brute: BruteTable,
    table: CharacterTable,
    group: Vec<UniMatrix>,
    /// Brute-force character values at every group element, per row.
    on_group: Vec<Vec<Cyclotomic>>,
}

pub fn verify(field: &Field, n: usize, opts: &VerifyOptions) -> Result<VerifyReport> {
    if n < 2 {
        return Err(Error::Argument("verification needs n >= 2".into()));
    }
    let caps = &opts.caps;
    let duals = oracle::decompose_dual(field, n, caps)?;
    let nils = oracle::decompose_nil(field, n, caps)?;
    let brute = oracle::brute_table_from(field, &duals, &nils)?;
    let table = build_table(field, n, caps)?;
    let group = oracle::enumerate_group(field, n, caps)?;
    let on_group = brute.rows.iter().map(|t| oracle::brute_char_on(field, t, &group)).collect();
    let cx = Context { field, n, duals, nils, brute, table, group, on_group };

    let mut entries = Vec::new();
    record(&mut entries, "Thm4.1", || adjoint_classification(&cx))?;
    record(&mut entries, "Thm4.2", || coadjoint_classification(&cx))?;
    record(&mut entries, "Thm5.1", || counting(&cx))?;
    record(&mut entries, "Thm6.2", || sizes_and_degrees(&cx))?;
    record(&mut entries, "Thm3.5", || orbit_sum_formula(&cx))?;
    record(&mut entries, "A.1", || closed_form(&cx))?;
    record(&mut entries, "A.2", || axioms(&cx))?;
    record(&mut entries, "Thm7.1", || primary_factorization(&cx))?;
    record(&mut entries, "Thm8.6", || tensor_products(&cx, opts))?;
    record(&mut entries, "Thm9.1", || discrete_values(&cx, caps))?;
    record(&mut entries, "Thm9.3", || discrete_decomposition(&cx, caps))?;
    Ok(VerifyReport { n, p: field.p(), k: field.k(), entries })
}

fn adjoint_classification(cx: &Context) -> Result<Outcome> {
    let f = cx.field;
    let failures: Vec<String> = cx
        .nils
        .points
        .par_iter()
        .filter_map(|x| {
            let r = adjoint_template_of(f, x);
            let orbit = cx.nils.orbit_of(x)?;
            if r.template != cx.nils.representatives[orbit] {
                return Some(format!("{} reduces to {}, its orbit holds {}", x.text(f), r.template.text(f), cx.nils.representatives[orbit].text(f)));
            }
            let moved = act_right(f, &act_left(f, &r.g, x).ok()?, &r.h).ok()?;
            (moved != r.template.to_matrix()).then(|| format!("witness for {} does not reach its template", x.text(f)))
        })
        .collect();
    Ok(Outcome { summary: format!("{} points, {} adjoint clusters, one template each", cx.nils.points.len(), cx.nils.representatives.len()), failures })
}

fn coadjoint_classification(cx: &Context) -> Result<Outcome> {
    let f = cx.field;
    let mut failures: Vec<String> = cx
        .duals
        .points
        .par_iter()
        .filter_map(|l| {
            let r = coadjoint_template_of(f, l);
            let orbit = cx.duals.orbit_of(l)?;
            if r.template != cx.duals.representatives[orbit] {
                return Some(format!("{} reduces to {}, its orbit holds {}", l.text(f), r.template.text(f), cx.duals.representatives[orbit].text(f)));
            }
            let moved = coact_right(f, &coact_left(f, &r.g, l).ok()?, &r.h).ok()?;
            (moved != r.template.to_functional()).then(|| format!("witness for {} does not reach its template", l.text(f)))
        })
        .collect();
    if enumerate_templates(f, cx.n) != cx.duals.representatives {
        failures.push("template enumeration differs from the orbit representatives".into());
    }
    Ok(Outcome { summary: format!("{} points, {} coadjoint clusters, one template each", cx.duals.points.len(), cx.duals.representatives.len()), failures })
}

fn counting(cx: &Context) -> Result<Outcome> {
    let b = bell_poly(cx.n, cx.field.q());
    let mut failures = Vec::new();
    for (what, got) in [("coadjoint", cx.duals.representatives.len()), ("adjoint", cx.nils.representatives.len())] {
        if BigUint::from(got) != b {
            failures.push(format!("{got} {what} clusters, B(n,q) = {b}"));
        }
    }
    Ok(Outcome { summary: format!("B({},{}) = {b}", cx.n, cx.field.q()), failures })
}

fn sizes_and_degrees(cx: &Context) -> Result<Outcome> {
    let f = cx.field;
    let mut failures = Vec::new();
    for (t, &size) in cx.duals.representatives.iter().zip(&cx.duals.sizes) {
        if cluster_size(f, t) != BigUint::from(size) {
            failures.push(format!("coadjoint cluster of {} has {size} points, formula {}", t.text(f), cluster_size(f, t)));
        }
    }
    for (t, &size) in cx.nils.representatives.iter().zip(&cx.nils.sizes) {
        if adjoint_cluster_size(f, &t.to_matrix()) != BigUint::from(size) {
            failures.push(format!("adjoint cluster of {} has {size} points", t.text(f)));
        }
    }
    let total: BigUint = cx.duals.representatives.iter().map(|t| cluster_size(f, t)).sum();
    if total != oracle::group_order(f, cx.n) {
        failures.push(format!("cluster sizes sum to {total}"));
    }
    let identity = cx.brute.cols.binary_search(&Template::empty(cx.n)).ok();
    for (r, t) in cx.brute.rows.iter().enumerate() {
        let inv = invariants_of(t);
        let deg = Cyclotomic::from_int(f.p(), BigInt::from(pow_q(f, inv.d)));
        if identity.map(|c| &cx.brute.values[r][c]) != Some(&deg) {
            failures.push(format!("degree of {} is not q^d", t.text(f)));
        }
        let si = oracle::brute_inner(&cx.on_group[r], &cx.on_group[r])?;
        if si != Cyclotomic::from_int(f.p(), BigInt::from(pow_q(f, inv.i))) {
            failures.push(format!("<chi, chi> for {} is {si}, expected q^i", t.text(f)));
        }
    }
    Ok(Outcome { summary: "cluster sizes q^(2d-i), degrees q^d, self-intertwining q^i".into(), failures })
}

fn orbit_sum_formula(cx: &Context) -> Result<Outcome> {
    let f = cx.field;
    let failures: Vec<String> = cx
        .brute
        .rows
        .par_iter()
        .enumerate()
        .flat_map_iter(|(r, t)| {
            let cluster = cluster_elements(f, t);
            let mut out = Vec::new();
            for (c, x) in cx.brute.cols.iter().enumerate() {
                let v = char_value_sum_over(f, t, &cluster, &UniMatrix::from_nil(x.to_matrix()));
                if v != cx.brute.values[r][c] {
                    out.push(format!("{} at {}: cluster sum {v}, trace {}", t.text(f), x.text(f), cx.brute.values[r][c]));
                }
            }
            // the trace is constant on conjugacy clusters
            for (g, v) in cx.group.iter().zip(&cx.on_group[r]) {
                let c = cx.nils.orbit_of(g.off()).expect("enumerated");
                if *v != cx.brute.values[r][c] {
                    out.push(format!("{} is not constant on the cluster of {}", t.text(f), g.off().text(f)));
                    break;
                }
            }
            out
        })
        .collect();
    Ok(Outcome { summary: format!("{} rows, constant on {} group elements", cx.brute.rows.len(), cx.group.len()), failures })
}

fn closed_form(cx: &Context) -> Result<Outcome> {
    let f = cx.field;
    let mut failures = Vec::new();
    if cx.table.rows != cx.brute.rows || cx.table.cols != cx.brute.cols {
        failures.push("row or column labels differ from the oracle".into());
    } else {
        for (r, t) in cx.table.rows.iter().enumerate() {
            for (c, x) in cx.table.cols.iter().enumerate() {
                if cx.table.values[r][c] != cx.brute.values[r][c] {
                    failures.push(format!("{} at {}: closed {}, trace {}", t.text(f), x.text(f), cx.table.values[r][c], cx.brute.values[r][c]));
                }
            }
        }
    }
    Ok(Outcome { summary: format!("{0}x{0} table matches the traces", cx.table.rows.len()), failures })
}

fn axioms(cx: &Context) -> Result<Outcome> {
    let f = cx.field;
    let mut failures = verify_axioms(&cx.table).failures();
    let b = cx.on_group.len();
    let pairs: Vec<(usize, usize)> = (0..b).flat_map(|r| (r + 1..b).map(move |s| (r, s))).collect();
    let bad: Vec<String> = pairs
        .par_iter()
        .filter_map(|&(r, s)| {
            let v = oracle::brute_inner(&cx.on_group[r], &cx.on_group[s]).ok()?;
            (!v.is_zero()).then(|| format!("{} and {} are not orthogonal over the group", cx.brute.rows[r].text(f), cx.brute.rows[s].text(f)))
        })
        .collect();
    failures.extend(bad);
    Ok(Outcome { summary: "partition, regular character, orthogonality, degrees".into(), failures })
}

fn pointwise_product(rows: &[&[Cyclotomic]], p: u32, len: usize) -> Vec<Cyclotomic> {
    (0..len).map(|c| rows.iter().fold(Cyclotomic::one(p), |acc, r| &acc * &r[c])).collect()
}

fn primary_factorization(cx: &Context) -> Result<Outcome> {
    let f = cx.field;
    let n = cx.n;
    let mut failures = Vec::new();
    for (r, t) in cx.brute.rows.iter().enumerate() {
        let parts: Vec<Template> = primary_components(t)
            .into_iter()
            .map(|(i, j, a)| Template::primary(n, i, j, a))
            .collect::<Result<_>>()?;
        let rows: Vec<&[Cyclotomic]> = parts.iter().filter_map(|p| cx.brute.row(p)).collect();
        if rows.len() != parts.len() {
            failures.push(format!("a primary factor of {} is not a row", t.text(f)));
            continue;
        }
        if pointwise_product(&rows, f.p(), cx.brute.cols.len()) != cx.brute.values[r] {
            failures.push(format!("{} is not the product of its primary characters", t.text(f)));
        }
    }
    Ok(Outcome { summary: "every row is the product of its primary rows".into(), failures })
}

fn tensor_pairs(cx: &Context, opts: &VerifyOptions) -> (Vec<(usize, usize)>, bool) {
    let b = cx.brute.rows.len();
    if b * b <= opts.exhaustive_pairs {
        ((0..b).flat_map(|r| (0..b).map(move |s| (r, s))).collect(), true)
    } else {
        let mut rng = StdRng::seed_from_u64(opts.seed);
        ((0..opts.sampled_pairs).map(|_| (rng.gen_range(0..b), rng.gen_range(0..b))).collect(), false)
    }
}

fn tensor_products(cx: &Context, opts: &VerifyOptions) -> Result<Outcome> {
    let f = cx.field;
    let (pairs, exhaustive) = tensor_pairs(cx, opts);
    let mut failures = Vec::new();
    let mut engine = TensorEngine::new(f, cx.n);
    for &(r, s) in &pairs {
        let (a, b) = (&cx.brute.rows[r], &cx.brute.rows[s]);
        let label = format!("{} x {}", a.text(f), b.text(f));
        let rewrite = engine.product_of(a, b)?;
        let counted = tensor_by_counting(f, a, b, &opts.caps)?;
        let solved = cx.brute.tensor(a, b)?;
        if rewrite != counted || rewrite != solved {
            failures.push(format!("{label}: rewrite {}, counting {}, solve {}", rewrite.text(f), counted.text(f), solved.text(f)));
        }
        let deg = |t: &Template| pow_q(f, invariants_of(t).d);
        if rewrite.total_degree(f) != deg(a) * deg(b) {
            failures.push(format!("{label}: degree not conserved"));
        }
        if rewrite.multiplicity(&Template::empty(cx.n)) != trivial_multiplicity(f, a, b) {
            failures.push(format!("{label}: wrong trivial multiplicity"));
        }
    }
    let how = if exhaustive { "all".to_string() } else { format!("seed {} sampled", opts.seed) };
    Ok(Outcome { summary: format!("{} pairs ({how}): rewrite = counting = solve", pairs.len()), failures })
}

fn discrete_values(cx: &Context, caps: &Caps) -> Result<Outcome> {
    let f = cx.field;
    let failures: Vec<String> = oracle::brute_delta(f, cx.n, caps)?
        .par_iter()
        .filter_map(|(g, v)| {
            let formula = Cyclotomic::from_int(f.p(), delta_value(f, g));
            (formula != *v).then(|| format!("at {}: rank formula {formula}, trace {v}", g.off().text(f)))
        })
        .collect();
    Ok(Outcome { summary: format!("rank formula matches the trace at {} elements", cx.group.len()), failures })
}

fn discrete_decomposition(cx: &Context, caps: &Caps) -> Result<Outcome> {
    let f = cx.field;
    let dec = delta_decompose(f, cx.n, caps)?;
    let counts = oracle::brute_delta_orbit_counts(f, cx.n, caps)?;
    let mut failures = Vec::new();
    for t in &cx.brute.rows {
        let m = dec.multiplicity(t);
        let orbits = counts.get(t).copied().unwrap_or(0);
        if m.to_usize() != Some(orbits) {
            failures.push(format!("{}: multiplicity {m}, {orbits} left orbits", t.text(f)));
        }
        if (m > BigUint::ZERO) == is_degenerate(t) {
            failures.push(format!("{}: multiplicity {m} disagrees with degeneracy", t.text(f)));
        }
    }
    Ok(Outcome { summary: format!("{} constituents, degree {}", dec.terms.len(), dec.identity_value), failures })
}
