//! Brute-force ground truth for small n and q.
//!
//! Everything here works from the raw group actions by BFS and explicit
//! traces. It deliberately avoids the template reductions, invariants and
//! closed forms, so it can certify them.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::hash::Hash;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::clusters::Template;
use crate::config::Caps;
use crate::cyclotomic::Cyclotomic;
use crate::error::{check_cap, Error, Result};
use crate::gf::Field;
use crate::matrix::{all_entries, coact_left_unchecked, coact_right_unchecked, Functional, NilMatrix, UniMatrix};
use crate::tensor::CharSum;

fn space_size(field: &Field, n: usize, caps: &Caps) -> Result<u128> {
    let dim = (n * n.saturating_sub(1) / 2) as u32;
    let size = (field.q() as u128).checked_pow(dim).unwrap_or(u128::MAX);
    check_cap("enumerated space", size, caps.group)?;
    Ok(size)
}

pub fn enumerate_nil(field: &Field, n: usize, caps: &Caps) -> Result<Vec<NilMatrix>> {
    space_size(field, n, caps)?;
    Ok(all_entries(field, n).map(|e| NilMatrix::from_entries(n, e).expect("valid")).collect())
}

pub fn enumerate_group(field: &Field, n: usize, caps: &Caps) -> Result<Vec<UniMatrix>> {
    Ok(enumerate_nil(field, n, caps)?.into_iter().map(UniMatrix::from_nil).collect())
}

pub fn enumerate_dual(field: &Field, n: usize, caps: &Caps) -> Result<Vec<Functional>> {
    space_size(field, n, caps)?;
    Ok(all_entries(field, n).map(|e| Functional::from_entries(n, e).expect("valid")).collect())
}

/// `I + a·e_ij` for every position and non-zero `a`.
pub fn generators(field: &Field, n: usize) -> Vec<UniMatrix> {
    let mut out = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            for a in field.nonzero_elements() {
                out.push(UniMatrix::elementary(n, i, j, a).expect("valid"));
            }
        }
    }
    out
}

fn bfs<P: Clone + Ord>(start: &P, step: impl Fn(&P, &mut Vec<P>)) -> BTreeSet<P> {
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start.clone()]);
    let mut next = Vec::new();
    while let Some(p) = queue.pop_front() {
        next.clear();
        step(&p, &mut next);
        for x in next.drain(..) {
            if seen.insert(x.clone()) {
                queue.push_back(x);
            }
        }
    }
    seen
}

fn nil_step<'a>(field: &'a Field, gens: &'a [UniMatrix]) -> impl Fn(&NilMatrix, &mut Vec<NilMatrix>) + 'a {
    move |x, out| {
        for g in gens {
            out.push(g.off().mul(field, x).expect("same size").add(field, x).expect("same size"));
            out.push(x.mul(field, g.off()).expect("same size").add(field, x).expect("same size"));
        }
    }
}

fn dual_step<'a>(field: &'a Field, gens: &'a [UniMatrix]) -> impl Fn(&Functional, &mut Vec<Functional>) + 'a {
    move |l, out| {
        for g in gens {
            out.push(coact_left_unchecked(field, g, l));
            out.push(coact_right_unchecked(field, l, g));
        }
    }
}

/// The adjoint cluster `U·X·U`, by closing under elementary generators.
pub fn bfs_double_orbit_nil(field: &Field, start: &NilMatrix) -> BTreeSet<NilMatrix> {
    let gens = generators(field, start.n());
    bfs(start, nil_step(field, &gens))
}

/// The coadjoint cluster `U*λ*U`.
pub fn bfs_double_orbit_dual(field: &Field, start: &Functional) -> BTreeSet<Functional> {
    let gens = generators(field, start.n());
    bfs(start, dual_step(field, &gens))
}

/// The left orbit `U*λ`.
pub fn left_orbit(field: &Field, start: &Functional) -> BTreeSet<Functional> {
    let gens = generators(field, start.n());
    bfs(start, |l: &Functional, out: &mut Vec<Functional>| {
        out.extend(gens.iter().map(|g| coact_left_unchecked(field, g, l)));
    })
}

/// A partition of the whole space into double orbits, each labelled by the
/// unique rook placement it contains. Orbits are numbered in template order.
#[derive(Debug, Clone)]
pub struct OrbitDecomposition<P> {
    pub points: Vec<P>,
    pub orbit_id: Vec<usize>,
    pub representatives: Vec<Template>,
    pub sizes: Vec<usize>,
    index: HashMap<P, usize>,
}

impl<P: Clone + Eq + Hash> OrbitDecomposition<P> {
    pub fn orbit_of(&self, p: &P) -> Option<usize> {
        self.index.get(p).map(|&k| self.orbit_id[k])
    }

    pub fn members(&self, orbit: usize) -> impl Iterator<Item = &P> {
        self.points.iter().zip(&self.orbit_id).filter(move |(_, &o)| o == orbit).map(|(p, _)| p)
    }
}

fn decompose<P>(
    n: usize,
    points: Vec<P>,
    orbit: impl Fn(&P) -> BTreeSet<P>,
    as_template: impl Fn(&P) -> Option<Template>,
) -> Result<OrbitDecomposition<P>>
where
    P: Clone + Ord + Hash,
{
    let index: HashMap<P, usize> = points.iter().cloned().enumerate().map(|(k, p)| (p, k)).collect();
    let mut raw_id = vec![usize::MAX; points.len()];
    let mut reps = Vec::new();
    for k in 0..points.len() {
        if raw_id[k] != usize::MAX {
            continue;
        }
        let members = orbit(&points[k]);
        let templates: Vec<Template> = members.iter().filter_map(&as_template).collect();
        if templates.len() != 1 {
            return Err(Error::InvariantViolation(format!(
                "a double orbit of size {} in n = {n} contains {} rook placements",
                members.len(),
                templates.len()
            )));
        }
        for m in &members {
            raw_id[index[m]] = reps.len();
        }
        reps.push(templates.into_iter().next().expect("one"));
    }
    let mut order: Vec<usize> = (0..reps.len()).collect();
    order.sort_by(|&a, &b| reps[a].cmp(&reps[b]));
    let mut rank = vec![0; reps.len()];
    for (new, &old) in order.iter().enumerate() {
        rank[old] = new;
    }
    let orbit_id: Vec<usize> = raw_id.iter().map(|&r| rank[r]).collect();
    let mut sizes = vec![0; reps.len()];
    for &o in &orbit_id {
        sizes[o] += 1;
    }
    let representatives = order.iter().map(|&o| reps[o].clone()).collect();
    Ok(OrbitDecomposition { points, orbit_id, representatives, sizes, index })
}

pub fn decompose_nil(field: &Field, n: usize, caps: &Caps) -> Result<OrbitDecomposition<NilMatrix>> {
    let gens = generators(field, n);
    let step = nil_step(field, &gens);
    decompose(n, enumerate_nil(field, n, caps)?, |x| bfs(x, &step), Template::from_matrix)
}

pub fn decompose_dual(field: &Field, n: usize, caps: &Caps) -> Result<OrbitDecomposition<Functional>> {
    let gens = generators(field, n);
    let step = dual_step(field, &gens);
    decompose(n, enumerate_dual(field, n, caps)?, |x| bfs(x, &step), Template::from_functional)
}

fn theta(field: &Field, x: crate::gf::FieldElement) -> usize {
    field.trace(x) as usize
}

/// Whether no support position of `λ` lies above a non-zero entry of `X`
/// in the same column.
pub fn fixed_by_criterion(lambda: &Functional, x: &NilMatrix) -> bool {
    !lambda.support().any(|(a, b)| x.support().any(|(r, c)| c == b && a < r))
}

/// Trace of `g` on the span of the Fourier vectors over `points`, a set
/// closed under the left action: `Σ_{g*λ = λ} θ[λ(g - I)]`.
pub fn trace_on(field: &Field, points: &[Functional], g: &UniMatrix) -> Cyclotomic {
    let mut counts = vec![0i64; field.p() as usize];
    for lam in points {
        if coact_left_unchecked(field, g, lam) == *lam {
            counts[theta(field, lam.eval_unchecked(field, g.off()))] += 1;
        }
    }
    Cyclotomic::from_exponent_counts(field.p(), &counts)
}

/// The character of the left orbit of `τ` at `I + X` for each column `X`,
/// checking the fixed-point criterion for templates along the way.
pub fn brute_char(field: &Field, tau: &Template, cols: &[Template]) -> Result<Vec<Cyclotomic>> {
    let orbit: Vec<Functional> = left_orbit(field, &tau.to_functional()).into_iter().collect();
    cols.iter()
        .map(|x| {
            if x.n() != tau.n() {
                return Err(Error::Argument("column size differs from template size".into()));
            }
            let xm = x.to_matrix();
            let g = UniMatrix::from_nil(xm.clone());
            for lam in &orbit {
                let direct = coact_left_unchecked(field, &g, lam) == *lam;
                if direct != fixed_by_criterion(lam, &xm) {
                    return Err(Error::InvariantViolation(format!(
                        "fixed-point criterion fails for {} at {}",
                        lam.text(field),
                        x.text(field)
                    )));
                }
            }
            Ok(trace_on(field, &orbit, &g))
        })
        .collect()
}

/// Values of the character of `τ` at every group element, in the order
/// given.
pub fn brute_char_on(field: &Field, tau: &Template, group: &[UniMatrix]) -> Vec<Cyclotomic> {
    let orbit: Vec<Functional> = left_orbit(field, &tau.to_functional()).into_iter().collect();
    group.par_iter().map(|g| trace_on(field, &orbit, g)).collect()
}

/// `(1/|G|) Σ_g f(g) conj(h(g))`, one term per group element.
pub fn brute_inner(f: &[Cyclotomic], h: &[Cyclotomic]) -> Result<Cyclotomic> {
    if f.len() != h.len() || f.is_empty() {
        return Err(Error::Argument("class functions must have the same non-zero length".into()));
    }
    let p = f[0].p();
    let mut acc = Cyclotomic::zero(p);
    for (a, b) in f.iter().zip(h) {
        acc += &(a * &b.conj());
    }
    Ok(acc.scale(&BigRational::new(One::one(), (f.len() as i64).into())))
}

/// The character table computed by brute force, with rows and columns
/// found from the orbit decompositions.
#[derive(Debug)]
pub struct BruteTable {
    pub field: Field,
    pub n: usize,
    pub rows: Vec<Template>,
    pub cols: Vec<Template>,
    pub values: Vec<Vec<Cyclotomic>>,
    pub row_orbit_sizes: Vec<usize>,
    pub col_orbit_sizes: Vec<usize>,
    inverse: OnceLock<std::result::Result<Vec<Vec<Cyclotomic>>, String>>,
}

pub fn brute_table(field: &Field, n: usize, caps: &Caps) -> Result<BruteTable> {
    brute_table_from(field, &decompose_dual(field, n, caps)?, &decompose_nil(field, n, caps)?)
}

/// As [`brute_table`], reusing orbit decompositions already computed.
pub fn brute_table_from(
    field: &Field,
    duals: &OrbitDecomposition<Functional>,
    nils: &OrbitDecomposition<NilMatrix>,
) -> Result<BruteTable> {
    if duals.representatives.len() != nils.representatives.len() {
        return Err(Error::InvariantViolation(format!(
            "{} coadjoint clusters but {} adjoint clusters",
            duals.representatives.len(),
            nils.representatives.len()
        )));
    }
    let n = duals.representatives.first().map_or(0, Template::n);
    let cols = nils.representatives.clone();
    let values = duals
        .representatives
        .par_iter()
        .map(|t| brute_char(field, t, &cols))
        .collect::<Result<Vec<_>>>()?;
    Ok(BruteTable {
        field: field.clone(),
        n,
        rows: duals.representatives.clone(),
        cols,
        values,
        row_orbit_sizes: duals.sizes.clone(),
        col_orbit_sizes: nils.sizes.clone(),
        inverse: OnceLock::new(),
    })
}

fn invert(p: u32, m: &[Vec<Cyclotomic>]) -> std::result::Result<Vec<Vec<Cyclotomic>>, String> {
    let b = m.len();
    let mut a: Vec<Vec<Cyclotomic>> = m
        .iter()
        .enumerate()
        .map(|(r, row)| {
            let mut v = row.clone();
            v.extend((0..b).map(|c| if c == r { Cyclotomic::one(p) } else { Cyclotomic::zero(p) }));
            v
        })
        .collect();
    for col in 0..b {
        let piv = (col..b).find(|&r| !a[r][col].is_zero()).ok_or("table is singular")?;
        a.swap(col, piv);
        let inv = a[col][col].inv().map_err(|e| e.to_string())?;
        a[col] = a[col].iter().map(|v| v * &inv).collect();
        let pivot_row = a[col].clone();
        a.par_iter_mut().enumerate().for_each(|(r, row)| {
            if r == col || row[col].is_zero() {
                return;
            }
            let factor = row[col].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v = &*v - &(&factor * pv);
                }
            }
        });
    }
    Ok(a.into_iter().map(|row| row[b..].to_vec()).collect())
}

impl BruteTable {
    pub fn row(&self, tau: &Template) -> Option<&[Cyclotomic]> {
        self.rows.binary_search(tau).ok().map(|r| self.values[r].as_slice())
    }

    /// Writes a class function, given on the columns, as a combination of
    /// rows by exact linear algebra; fails unless every coefficient is a
    /// non-negative integer.
    pub fn decompose(&self, v: &[Cyclotomic]) -> Result<CharSum> {
        if v.len() != self.cols.len() {
            return Err(Error::Argument("class function length does not match the table".into()));
        }
        let inverse = self
            .inverse
            .get_or_init(|| invert(self.field.p(), &self.values))
            .as_ref()
            .map_err(|e| Error::InvariantViolation(e.clone()))?;
        let p = self.field.p();
        let mut out = CharSum::new(self.n);
        for (r, tau) in self.rows.iter().enumerate() {
            let mut m = Cyclotomic::zero(p);
            for (c, x) in v.iter().enumerate() {
                if !x.is_zero() && !inverse[c][r].is_zero() {
                    m += &(x * &inverse[c][r]);
                }
            }
            let m = m
                .to_integer()
                .and_then(|z| z.to_biguint())
                .ok_or_else(|| Error::InvariantViolation(format!("coefficient of {} is {m}", tau.text(&self.field))))?;
            out.add_term(tau.clone(), m);
        }
        Ok(out)
    }

    /// `χ(τ1) ⊗ χ(τ2)` decomposed against the table.
    pub fn tensor(&self, t1: &Template, t2: &Template) -> Result<CharSum> {
        let (a, b) = (
            self.row(t1).ok_or_else(|| Error::Argument(format!("{t1} is not a row")))?,
            self.row(t2).ok_or_else(|| Error::Argument(format!("{t2} is not a row")))?,
        );
        let product: Vec<Cyclotomic> = a.iter().zip(b).map(|(x, y)| x * y).collect();
        self.decompose(&product)
    }
}

pub fn brute_tensor(field: &Field, t1: &Template, t2: &Template, caps: &Caps) -> Result<CharSum> {
    brute_table(field, t1.n(), caps)?.tensor(t1, t2)
}

fn delta_points(field: &Field, n: usize, caps: &Caps) -> Result<Vec<Functional>> {
    Ok(enumerate_dual(field, n, caps)?
        .into_iter()
        .filter(|l| (1..n).all(|k| l.support().any(|(i, _)| i == k)))
        .collect())
}

/// The discrete-series character as the trace on the Fourier vectors over
/// functionals whose support meets each of the first n-1 rows, evaluated
/// at every group element.
pub fn brute_delta(field: &Field, n: usize, caps: &Caps) -> Result<Vec<(UniMatrix, Cyclotomic)>> {
    let points = delta_points(field, n, caps)?;
    let group = enumerate_group(field, n, caps)?;
    Ok(group.into_par_iter().map(|g| {
        let v = trace_on(field, &points, &g);
        (g, v)
    }).collect())
}

/// For each coadjoint cluster, the number of left orbits inside its
/// intersection with the discrete-series support.
pub fn brute_delta_orbit_counts(field: &Field, n: usize, caps: &Caps) -> Result<BTreeMap<Template, usize>> {
    let duals = decompose_dual(field, n, caps)?;
    let mut counts = vec![0usize; duals.representatives.len()];
    let mut seen: BTreeSet<Functional> = BTreeSet::new();
    for l in delta_points(field, n, caps)? {
        if seen.contains(&l) {
            continue;
        }
        let orbit = left_orbit(field, &l);
        counts[duals.orbit_of(&l).expect("enumerated")] += 1;
        seen.extend(orbit);
    }
    Ok(duals
        .representatives
        .into_iter()
        .zip(counts)
        .filter(|(_, c)| *c > 0)
        .collect())
}

/// Reference data derived purely by brute force, for committing as golden
/// files.
pub fn golden(field: &Field, n: usize, caps: &Caps) -> Result<Value> {
    let table = brute_table(field, n, caps)?;
    let text = |ts: &[Template]| ts.iter().map(|t| t.text(field)).collect::<Vec<_>>();
    let delta = brute_delta_orbit_counts(field, n, caps)?;
    let points = delta_points(field, n, caps)?;
    Ok(json!({
        "n": n,
        "p": field.p(),
        "k": field.k(),
        "rows": text(&table.rows),
        "cols": text(&table.cols),
        "values": table.values.iter().map(|r| r.iter().map(Cyclotomic::to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "row_cluster_sizes": table.row_orbit_sizes,
        "col_cluster_sizes": table.col_orbit_sizes,
        "delta": {
            "identity_value": points.len().to_string(),
            "terms": delta.iter().map(|(t, m)| json!({"template": t.text(field), "mult": m})).collect::<Vec<_>>(),
        },
    }))
}

/// Number of elements of the group, `q^(n(n-1)/2)`, as a big integer.
pub fn group_order(field: &Field, n: usize) -> BigUint {
    BigUint::from(field.q()).pow((n * n.saturating_sub(1) / 2) as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmpl(field: &Field, n: usize, cells: &[(usize, usize, i64)]) -> Template {
        Template::new(n, cells.iter().map(|&(i, j, a)| (i, j, field.from_int(a)))).unwrap()
    }

    fn ints(p: u32, vals: &[i64]) -> Vec<Cyclotomic> {
        vals.iter().map(|&v| Cyclotomic::from_int(p, v)).collect()
    }

    #[test]
    fn enumeration_sizes() {
        let caps = Caps::default();
        let f2 = Field::prime(2).unwrap();
        assert_eq!(enumerate_group(&f2, 2, &caps).unwrap().len(), 2);
        assert_eq!(enumerate_group(&f2, 3, &caps).unwrap().len(), 8);
        assert_eq!(enumerate_dual(&Field::prime(3).unwrap(), 4, &caps).unwrap().len(), 729);
        let tight = Caps { group: 32, ..caps };
        assert!(matches!(enumerate_group(&f2, 4, &tight), Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn double_orbits() {
        let f2 = Field::prime(2).unwrap();
        assert_eq!(bfs_double_orbit_dual(&f2, &Functional::zero(3)).len(), 1);
        let orbit = bfs_double_orbit_dual(&f2, &tmpl(&f2, 3, &[(1, 3, 1)]).to_functional());
        let expect: BTreeSet<Functional> = [
            vec![(1, 3, 1)],
            vec![(1, 3, 1), (1, 2, 1)],
            vec![(1, 3, 1), (2, 3, 1)],
            vec![(1, 3, 1), (1, 2, 1), (2, 3, 1)],
        ]
        .iter()
        .map(|c| Functional::from_entries(3, c.iter().map(|&(i, j, a)| (i, j, f2.from_int(a)))).unwrap())
        .collect();
        assert_eq!(orbit, expect);
        let x = tmpl(&f2, 3, &[(1, 2, 1), (2, 3, 1)]).to_matrix();
        // {X, X + e13}: the five adjoint clusters split the 8 points as 1+2+2+1+2
        assert_eq!(bfs_double_orbit_nil(&f2, &x).len(), 2);
    }

    #[test]
    fn decompositions_partition_the_space() {
        let caps = Caps::default();
        let f2 = Field::prime(2).unwrap();
        let d = decompose_dual(&f2, 3, &caps).unwrap();
        assert_eq!(d.representatives.len(), 5);
        assert_eq!(d.sizes, vec![1, 1, 1, 4, 1]);
        let a = decompose_nil(&f2, 3, &caps).unwrap();
        assert_eq!(a.sizes.iter().sum::<usize>(), 8);
        assert_eq!(a.representatives, d.representatives);
    }

    #[test]
    fn brute_characters() {
        let f2 = Field::prime(2).unwrap();
        let table = brute_table(&f2, 3, &Caps::default()).unwrap();
        assert_eq!(table.values[0], ints(2, &[1, 1, 1, 1, 1]));
        assert_eq!(table.row(&tmpl(&f2, 3, &[(1, 3, 1)])).unwrap(), ints(2, &[2, 0, 0, -2, 0]).as_slice());
        assert_eq!(
            table.row(&tmpl(&f2, 3, &[(1, 2, 1), (2, 3, 1)])).unwrap(),
            ints(2, &[1, -1, -1, 1, 1]).as_slice()
        );
    }

    #[test]
    fn fixed_point_criterion_exhaustive_n3() {
        for p in [2, 3] {
            let f = Field::prime(p).unwrap();
            let caps = Caps::default();
            let nils = decompose_nil(&f, 3, &caps).unwrap();
            for lam in enumerate_dual(&f, 3, &caps).unwrap() {
                for x in &nils.representatives {
                    let xm = x.to_matrix();
                    let g = UniMatrix::from_nil(xm.clone());
                    assert_eq!(coact_left_unchecked(&f, &g, &lam) == lam, fixed_by_criterion(&lam, &xm));
                }
            }
        }
    }

    #[test]
    fn left_orbits_fill_the_space() {
        let f = Field::prime(3).unwrap();
        let caps = Caps::default();
        let mut seen = BTreeSet::new();
        let mut total = 0;
        for l in enumerate_dual(&f, 3, &caps).unwrap() {
            if !seen.contains(&l) {
                let o = left_orbit(&f, &l);
                total += o.len();
                seen.extend(o);
            }
        }
        assert_eq!(total, 27);
    }

    #[test]
    fn inner_products() {
        let f2 = Field::prime(2).unwrap();
        let group = enumerate_group(&f2, 3, &Caps::default()).unwrap();
        let triv = brute_char_on(&f2, &Template::empty(3), &group);
        assert_eq!(brute_inner(&triv, &triv).unwrap(), Cyclotomic::one(2));
        let e13 = brute_char_on(&f2, &tmpl(&f2, 3, &[(1, 3, 1)]), &group);
        assert_eq!(brute_inner(&e13, &e13).unwrap(), Cyclotomic::one(2));
        assert!(brute_inner(&e13, &triv).unwrap().is_zero());
    }

    #[test]
    fn tensor_solve() {
        let f2 = Field::prime(2).unwrap();
        let e13 = tmpl(&f2, 3, &[(1, 3, 1)]);
        let got = brute_tensor(&f2, &e13, &e13, &Caps::default()).unwrap();
        assert_eq!(got.len(), 4);
        assert_eq!(got.multiplicity(&Template::empty(3)), BigUint::one());
    }

    #[test]
    fn discrete_series_by_brute_force() {
        let f3 = Field::prime(3).unwrap();
        let counts = brute_delta_orbit_counts(&f3, 3, &Caps::default()).unwrap();
        assert_eq!(counts.get(&tmpl(&f3, 3, &[(1, 3, 1)])), Some(&2));
        assert_eq!(counts.len(), 6);
        let values = brute_delta(&f3, 3, &Caps::default()).unwrap();
        assert_eq!(values[0].1, Cyclotomic::from_int(3, 16));
    }
}
