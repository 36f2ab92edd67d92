//! Exact arithmetic in the cyclotomic field Q(ζ_p), p prime.
//!
//! Elements are kept in the basis `1, ζ, ..., ζ^(p-2)`, reducing with
//! `1 + ζ + ... + ζ^(p-1) = 0`, so equality is coefficient-wise.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cyclotomic {
    p: u32,
    coeffs: Vec<BigRational>,
}

impl Cyclotomic {
    pub fn zero(p: u32) -> Cyclotomic {
        assert!(p >= 2, "root order must be a prime");
        Cyclotomic {
            p,
            coeffs: vec![BigRational::zero(); (p - 1) as usize],
        }
    }

    pub fn one(p: u32) -> Cyclotomic {
        Cyclotomic::from_rational(p, BigRational::one())
    }

    pub fn from_int(p: u32, v: impl Into<BigInt>) -> Cyclotomic {
        Cyclotomic::from_rational(p, BigRational::from_integer(v.into()))
    }

    pub fn from_rational(p: u32, v: BigRational) -> Cyclotomic {
        let mut z = Cyclotomic::zero(p);
        z.coeffs[0] = v;
        z
    }

    /// Builds an element from coefficients in the basis `1, ζ, ..., ζ^(p-2)`.
    pub fn from_coeffs(p: u32, coeffs: Vec<BigRational>) -> Result<Cyclotomic> {
        if coeffs.len() != (p - 1) as usize {
            return Err(Error::Argument(format!("Q(ζ_{p}) needs {} coefficients", p - 1)));
        }
        Ok(Cyclotomic { p, coeffs })
    }

    /// `ζ^m`.
    pub fn zeta_pow(p: u32, m: i64) -> Cyclotomic {
        let mut counts = vec![0i64; p as usize];
        counts[m.rem_euclid(p as i64) as usize] = 1;
        Cyclotomic::from_exponent_counts(p, &counts)
    }

    /// `Σ_m counts[m] ζ^m` over all exponents `0..p`.
    pub fn from_exponent_counts(p: u32, counts: &[i64]) -> Cyclotomic {
        assert_eq!(counts.len(), p as usize);
        let top = counts[p as usize - 1];
        let coeffs = counts[..p as usize - 1]
            .iter()
            .map(|&c| BigRational::from_integer(BigInt::from(c - top)))
            .collect();
        Cyclotomic { p, coeffs }
    }

    fn from_full(p: u32, mut full: Vec<BigRational>) -> Cyclotomic {
        debug_assert_eq!(full.len(), p as usize);
        let top = full.pop().unwrap();
        if !top.is_zero() {
            for c in full.iter_mut() {
                *c -= &top;
            }
        }
        Cyclotomic { p, coeffs: full }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The rational value when the element lies in Q.
    pub fn to_rational(&self) -> Option<BigRational> {
        self.coeffs[1..].iter().all(Zero::is_zero).then(|| self.coeffs[0].clone())
    }

    pub fn to_integer(&self) -> Option<BigInt> {
        self.to_rational().filter(|r| r.is_integer()).map(|r| r.to_integer())
    }

    pub fn scale(&self, r: &BigRational) -> Cyclotomic {
        Cyclotomic {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Image under the automorphism `ζ ↦ ζ^a`, `a` prime to p.
    pub fn galois(&self, a: u32) -> Cyclotomic {
        let p = self.p as usize;
        assert!(a as usize % p != 0, "galois exponent must be a unit mod p");
        let mut full = vec![BigRational::zero(); p];
        for (m, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                full[m * a as usize % p] += c;
            }
        }
        Cyclotomic::from_full(self.p, full)
    }

    /// Complex conjugate, `ζ ↦ ζ^(p-1)`.
    pub fn conj(&self) -> Cyclotomic {
        self.galois(self.p - 1)
    }

    /// Product of all Galois conjugates; a rational number.
    pub fn norm(&self) -> BigRational {
        let prod = (2..self.p).fold(self.clone(), |acc, a| &acc * &self.galois(a));
        prod.to_rational().expect("norm lies in Q")
    }

    pub fn inv(&self) -> Result<Cyclotomic> {
        if self.is_zero() {
            return Err(Error::Domain("inverse of zero in Q(ζ_p)".into()));
        }
        let others = (2..self.p).fold(Cyclotomic::one(self.p), |acc, a| &acc * &self.galois(a));
        let norm = (&others * self).to_rational().expect("norm lies in Q");
        Ok(others.scale(&norm.recip()))
    }

    /// Polynomial text in `z = ζ_p`, e.g. `2`, `-2`, `1-z`, `3+(1/2)z^2`.
    pub fn to_poly_string(&self) -> String {
        let mut out = String::new();
        for (m, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let negative = c.is_negative();
            let mag = c.abs();
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push(if negative { '-' } else { '+' });
            }
            let mag_text = if mag.is_integer() {
                mag.to_integer().to_string()
            } else {
                format!("({}/{})", mag.numer(), mag.denom())
            };
            match m {
                0 => out.push_str(&mag_text),
                _ => {
                    if !mag.is_one() {
                        out.push_str(&mag_text);
                    }
                    out.push('z');
                    if m > 1 {
                        out.push_str(&format!("^{m}"));
                    }
                }
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    /// `{"p": 3, "coeffs": ["1/1", "0/1"]}`.
    pub fn to_json(&self) -> Value {
        let coeffs: Vec<String> = self.coeffs.iter().map(|c| format!("{}/{}", c.numer(), c.denom())).collect();
        json!({"p": self.p, "coeffs": coeffs})
    }

    pub fn from_json(value: &Value) -> Result<Cyclotomic> {
        let bad = |what: &str| Error::Parse(format!("cyclotomic json: {what}"));
        let p = value.get("p").and_then(Value::as_u64).ok_or_else(|| bad("missing p"))? as u32;
        let list = value.get("coeffs").and_then(Value::as_array).ok_or_else(|| bad("missing coeffs"))?;
        let coeffs = list
            .iter()
            .map(|c| {
                let s = c.as_str().ok_or_else(|| bad("coefficient is not a string"))?;
                parse_rational(s)
            })
            .collect::<Result<Vec<_>>>()?;
        Cyclotomic::from_coeffs(p, coeffs)
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("rational {s:?}"));
    let (num, den) = s.split_once('/').unwrap_or((s, "1"));
    let num: BigInt = num.trim().parse().map_err(|_| bad())?;
    let den: BigInt = den.trim().parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_poly_string())
    }
}

impl Add for &Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: &Cyclotomic) -> Cyclotomic {
        assert_eq!(self.p, rhs.p, "mixed cyclotomic fields");
        Cyclotomic {
            p: self.p,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl AddAssign<&Cyclotomic> for Cyclotomic {
    fn add_assign(&mut self, rhs: &Cyclotomic) {
        assert_eq!(self.p, rhs.p, "mixed cyclotomic fields");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl Sub for &Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: &Cyclotomic) -> Cyclotomic {
        assert_eq!(self.p, rhs.p, "mixed cyclotomic fields");
        Cyclotomic {
            p: self.p,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: &Cyclotomic) -> Cyclotomic {
        assert_eq!(self.p, rhs.p, "mixed cyclotomic fields");
        let p = self.p as usize;
        let mut full = vec![BigRational::zero(); p];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    full[(i + j) % p] += a * b;
                }
            }
        }
        Cyclotomic::from_full(self.p, full)
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr for Cyclotomic {
            type Output = Cyclotomic;
            fn $m(self, rhs: Cyclotomic) -> Cyclotomic {
                (&self).$m(&rhs)
            }
        }
    };
}

owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn roots_of_unity() {
        assert_eq!(Cyclotomic::zeta_pow(2, 1), Cyclotomic::from_int(2, -1));
        let z = Cyclotomic::zeta_pow(3, 1);
        assert_eq!(z.coeffs(), &[rat(0, 1), rat(1, 1)]);
        assert_eq!(&z * &z, Cyclotomic::zeta_pow(3, 2));
        assert_eq!(&(&z * &z) * &z, Cyclotomic::one(3));
        let sum = (0..5).fold(Cyclotomic::zero(5), |acc, m| &acc + &Cyclotomic::zeta_pow(5, m));
        assert!(sum.is_zero());
        assert_eq!(z.conj(), Cyclotomic::zeta_pow(3, 2));
    }

    #[test]
    fn formatting() {
        assert_eq!(Cyclotomic::from_int(3, 2).to_poly_string(), "2");
        assert_eq!(Cyclotomic::from_int(2, -2).to_poly_string(), "-2");
        let one_minus_z = &Cyclotomic::one(3) - &Cyclotomic::zeta_pow(3, 1);
        assert_eq!(one_minus_z.to_poly_string(), "1-z");
        assert_eq!(Cyclotomic::zero(5).to_poly_string(), "0");
        assert_eq!(Cyclotomic::zeta_pow(5, 3).scale(&rat(1, 2)).to_poly_string(), "(1/2)z^3");
        let v = Cyclotomic::one(3).to_json();
        assert_eq!(v, json!({"p": 3, "coeffs": ["1/1", "0/1"]}));
        assert_eq!(Cyclotomic::from_json(&v).unwrap(), Cyclotomic::one(3));
    }

    #[test]
    fn inverse_of_zero_is_an_error() {
        assert!(Cyclotomic::zero(3).inv().is_err());
    }

    fn arb_cyc(p: u32) -> impl Strategy<Value = Cyclotomic> {
        proptest::collection::vec((-20i64..20, 1i64..5), (p - 1) as usize)
            .prop_map(move |cs| Cyclotomic::from_coeffs(p, cs.into_iter().map(|(n, d)| rat(n, d)).collect()).unwrap())
    }

    proptest! {
        #[test]
        fn field_laws_p5(a in arb_cyc(5), b in arb_cyc(5), c in arb_cyc(5)) {
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
            if !a.is_zero() {
                prop_assert_eq!(&a * &a.inv().unwrap(), Cyclotomic::one(5));
            }
        }

        #[test]
        fn json_round_trip_p3(a in arb_cyc(3)) {
            prop_assert_eq!(Cyclotomic::from_json(&a.to_json()).unwrap(), a);
        }
    }
}
