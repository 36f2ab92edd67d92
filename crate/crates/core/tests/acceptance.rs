//! Acceptance suite: eight exact criteria, one PASS/FAIL line each.
//!
//! Runs with its own harness so the report prints in order; the process
//! exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::Value;

use supercluster::characters::{build_table, char_value_closed, char_value_sum_over, verify_axioms};
use supercluster::clusters::{
    adjoint_cluster_size, adjoint_template_of, bell_poly, cluster_elements, cluster_size, coadjoint_template_of,
    enumerate_templates, invariants_of, pow_q, Template,
};
use supercluster::config::Caps;
use supercluster::cyclotomic::Cyclotomic;
use supercluster::discrete::{delta_decompose, delta_value, identity_value, is_degenerate};
use supercluster::matrix::UniMatrix;
use supercluster::oracle;
use supercluster::tensor::{tensor_by_counting, trivial_multiplicity, TensorEngine};
use supercluster::verify::{verify, VerifyOptions};
use supercluster::Field;

type Check = Result<String, String>;

const SMALL: [(u32, usize); 3] = [(2, 3), (3, 3), (2, 4)];

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn prime(p: u32) -> Field {
    Field::prime(p).unwrap()
}

fn golden(n: usize, q: u32) -> Value {
    let path = format!("{}/tests/golden/n{n}_q{q}.json", env!("CARGO_MANIFEST_DIR"));
    serde_json::from_str(&std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))).unwrap()
}

fn counting() -> Check {
    let closed = |n: usize, q: u32| -> BigUint {
        let x = BigUint::from(q - 1);
        let one = BigUint::from(1u32);
        match n {
            0 | 1 => one,
            2 => BigUint::from(q),
            3 => one + 3u32 * &x + &x * &x,
            4 => one + 6u32 * &x + 7u32 * &x * &x + &x * &x * &x,
            _ => unreachable!(),
        }
    };
    for q in [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27, 49, 64] {
        for n in 0..=4 {
            ensure(bell_poly(n, q) == closed(n, q), || format!("B({n},{q}) = {}, polynomial {}", bell_poly(n, q), closed(n, q)))?;
        }
    }
    for (q, n) in [(2, 3), (3, 3), (2, 4), (3, 4), (2, 5)] {
        let found = enumerate_templates(&prime(q), n).len();
        ensure(BigUint::from(found) == bell_poly(n, q), || format!("{found} templates at n={n} q={q}"))?;
    }
    Ok("recurrence = polynomials for n <= 4; enumeration counts 5, 11, 15, 49, 52".into())
}

fn classification() -> Check {
    let caps = Caps::default();
    for (q, n) in SMALL {
        let f = prime(q);
        let duals = oracle::decompose_dual(&f, n, &caps).map_err(|e| e.to_string())?;
        for l in &duals.points {
            let rep = &duals.representatives[duals.orbit_of(l).unwrap()];
            let got = coadjoint_template_of(&f, l).template;
            ensure(got == *rep, || format!("n={n} q={q}: {} reduces to {got}, orbit holds {rep}", l.text(&f)))?;
        }
        let nils = oracle::decompose_nil(&f, n, &caps).map_err(|e| e.to_string())?;
        for x in &nils.points {
            let rep = &nils.representatives[nils.orbit_of(x).unwrap()];
            let got = adjoint_template_of(&f, x).template;
            ensure(got == *rep, || format!("n={n} q={q}: {} reduces to {got}, orbit holds {rep}", x.text(&f)))?;
        }
    }
    Ok("every BFS double orbit holds one template, equal to the reduction (both sides)".into())
}

fn sizes() -> Check {
    let caps = Caps::default();
    for (q, n) in SMALL {
        let f = prime(q);
        let total: BigUint = enumerate_templates(&f, n).iter().map(|t| cluster_size(&f, t)).sum();
        ensure(total == pow_q(&f, (n * (n - 1) / 2) as u32), || format!("n={n} q={q}: sizes sum to {total}"))?;
        let duals = oracle::decompose_dual(&f, n, &caps).map_err(|e| e.to_string())?;
        for (t, &s) in duals.representatives.iter().zip(&duals.sizes) {
            ensure(cluster_size(&f, t) == BigUint::from(s), || format!("n={n} q={q}: orbit of {t} has {s} points"))?;
        }
        let nils = oracle::decompose_nil(&f, n, &caps).map_err(|e| e.to_string())?;
        for (t, &s) in nils.representatives.iter().zip(&nils.sizes) {
            let size = adjoint_cluster_size(&f, &t.to_matrix());
            ensure(size == BigUint::from(s), || format!("n={n} q={q}: adjoint orbit of {t} has {s} points"))?;
        }
    }
    Ok("sum of q^(2d-i) = q^(n(n-1)/2); each BFS orbit has q^(2d-i) points".into())
}

fn character_table() -> Check {
    let caps = Caps::default();
    for (q, n) in SMALL {
        let f = prime(q);
        let table = build_table(&f, n, &caps).map_err(|e| e.to_string())?;
        let brute = oracle::brute_table(&f, n, &caps).map_err(|e| e.to_string())?;
        ensure(brute.rows == table.rows && brute.cols == table.cols, || "labels differ".into())?;
        let gold = golden(n, q);
        let gold_values = gold["values"].as_array().unwrap();
        for (r, tau) in table.rows.iter().enumerate() {
            let cluster = cluster_elements(&f, tau);
            for (c, x) in table.cols.iter().enumerate() {
                let closed = char_value_closed(&f, tau, x).unwrap();
                let sum = char_value_sum_over(&f, tau, &cluster, &UniMatrix::from_nil(x.to_matrix()));
                let from_file = Cyclotomic::from_json(&gold_values[r][c]).unwrap();
                ensure(closed == sum && sum == brute.values[r][c] && closed == from_file, || {
                    format!("n={n} q={q} {tau} at {x}: closed {closed}, sum {sum}, trace {}, golden {from_file}", brute.values[r][c])
                })?;
            }
        }
    }
    let f = prime(2);
    let t = build_table(&f, 3, &caps).unwrap();
    let e13 = Template::new(3, [(1, 3, f.one())]).unwrap();
    let expect: Vec<Cyclotomic> = [2, 0, 0, -2, 0].iter().map(|&v| Cyclotomic::from_int(2, v)).collect();
    ensure(t.row(&e13).unwrap() == expect.as_slice(), || "row of e13 at n=3 q=2 is not (2,0,0,-2,0)".into())?;
    Ok("closed = cluster sum = trace = golden at every entry; e13 row (2,0,0,-2,0)".into())
}

fn axioms() -> Check {
    for (q, n) in SMALL {
        let f = prime(q);
        let table = build_table(&f, n, &Caps::default()).map_err(|e| e.to_string())?;
        let report = verify_axioms(&table);
        ensure(report.all_passed(), || format!("n={n} q={q}: {:?}", report.failures()))?;
        ensure(BigUint::from(table.rows.len()) == bell_poly(n, q) && table.rows.len() == table.cols.len(), || "table shape".into())?;
    }
    Ok("regular character, orthogonality q^i, |rows| = |cols| = B(n,q)".into())
}

fn tensor_ring() -> Check {
    let caps = Caps::default();
    let mut checked = 0;
    for (q, n, sample) in [(2, 3, None), (3, 3, None), (2, 4, Some(250))] {
        let f = prime(q);
        let brute = oracle::brute_table(&f, n, &caps).map_err(|e| e.to_string())?;
        let ts = &brute.rows;
        let pairs: Vec<(usize, usize)> = match sample {
            None => (0..ts.len()).flat_map(|a| (0..ts.len()).map(move |b| (a, b))).collect(),
            Some(k) => {
                let mut rng = StdRng::seed_from_u64(2024);
                (0..k).map(|_| (rng.gen_range(0..ts.len()), rng.gen_range(0..ts.len()))).collect()
            }
        };
        let mut engine = TensorEngine::new(&f, n);
        for (a, b) in pairs {
            let (t1, t2) = (&ts[a], &ts[b]);
            let rewrite = engine.product_of(t1, t2).map_err(|e| e.to_string())?;
            let counted = tensor_by_counting(&f, t1, t2, &caps).map_err(|e| e.to_string())?;
            let solved = brute.tensor(t1, t2).map_err(|e| e.to_string())?;
            ensure(rewrite == counted && counted == solved, || format!("n={n} q={q} {t1} x {t2}: paths disagree"))?;
            let deg = |t: &Template| pow_q(&f, invariants_of(t).d);
            ensure(rewrite.total_degree(&f) == deg(t1) * deg(t2), || format!("{t1} x {t2}: degree"))?;
            if n == 3 {
                let triv = rewrite.multiplicity(&Template::empty(n));
                ensure(triv == trivial_multiplicity(&f, t1, t2), || format!("{t1} x {t2}: trivial multiplicity {triv}"))?;
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} products: rewrite = counting = exact solve, degrees conserved, trivial rule holds"))
}

fn discrete_series() -> Check {
    let caps = Caps::default();
    for (q, n) in [(2, 2), (3, 2), (2, 3), (3, 3), (2, 4), (3, 4)] {
        let f = prime(q);
        for (g, trace) in oracle::brute_delta(&f, n, &caps).map_err(|e| e.to_string())? {
            let formula = Cyclotomic::from_int(q, delta_value(&f, &g));
            ensure(formula == trace, || format!("n={n} q={q} at {}: {formula} vs trace {trace}", g.off().text(&f)))?;
        }
        let dec = delta_decompose(&f, n, &caps).map_err(|e| e.to_string())?;
        ensure(dec.total_degree() == identity_value(&f, n), || format!("n={n} q={q}: degree identity"))?;
        for t in enumerate_templates(&f, n) {
            ensure(dec.terms.contains_key(&t) != is_degenerate(&t), || format!("{t}: positivity vs degeneracy"))?;
        }
        if n == 3 || (n == 4 && q == 2) {
            let counts = oracle::brute_delta_orbit_counts(&f, n, &caps).map_err(|e| e.to_string())?;
            let mults: BTreeMap<Template, usize> =
                dec.terms.iter().map(|(t, m)| (t.clone(), m.try_into().unwrap())).collect();
            ensure(mults == counts, || format!("n={n} q={q}: multiplicities differ from left-orbit counts"))?;
            let gold = &golden(n, q)["delta"];
            let gold_terms: BTreeMap<Template, usize> = gold["terms"]
                .as_array()
                .unwrap()
                .iter()
                .map(|v| (Template::parse(&f, n, v["template"].as_str().unwrap()).unwrap(), v["mult"].as_u64().unwrap() as usize))
                .collect();
            ensure(gold_terms == mults, || format!("n={n} q={q}: golden decomposition differs"))?;
            ensure(gold["identity_value"].as_str() == Some(&dec.identity_value.to_string()), || "golden identity value".into())?;
        }
    }
    let f3 = prime(3);
    let d = delta_decompose(&f3, 3, &caps).unwrap();
    ensure(d.identity_value == BigUint::from(16u32), || "identity value at n=3 q=3".into())?;
    Ok("rank formula = trace at every element (n <= 4, q <= 3); degrees, positivity, orbit counts".into())
}

fn scale_probe() -> Check {
    let opts = VerifyOptions { caps: Caps { group: 1024, ..Caps::default() }, ..VerifyOptions::default() };
    let report = verify(&prime(2), 5, &opts).map_err(|e| e.to_string())?;
    ensure(report.all_passed(), || report.text())?;
    Ok(format!("verify n=5 q=2: {} results pass", report.entries.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Check, Duration); 8] = [
        ("counting", counting, Duration::from_secs(1)),
        ("classification", classification, Duration::from_secs(30)),
        ("sizes", sizes, Duration::from_secs(30)),
        ("character table", character_table, Duration::from_secs(60)),
        ("axioms", axioms, Duration::from_secs(60)),
        ("tensor ring", tensor_ring, Duration::from_secs(300)),
        ("discrete series", discrete_series, Duration::from_secs(60)),
        ("scale probe", scale_probe, Duration::from_secs(600)),
    ];
    let mut failed = 0;
    for (k, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > *budget => Err(format!("{msg}; took {elapsed:.2?}, budget {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("criterion {} {name}: PASS ({elapsed:.2?}) {msg}", k + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({elapsed:.2?}) {msg}", k + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
