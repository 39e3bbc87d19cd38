//! Finite fields `F_{p^n}` as `F_p[X]/(m(X))` with `m` the smallest monic
//! irreducible polynomial of degree `n`.
//!
//! "Smallest" is by the integer code `Σ c_i p^i` of the non-leading
//! coefficients, so `F_4` uses `X² + X + 1` and `F_9` uses `X² + 1`.
//! Elements are coefficient vectors (constant term first) and render as
//! polynomials in `x`, highest degree first: `0`, `2`, `x+1`, `2x^2+x`.
//! An element's index is the same base-`p` code of its coefficients.

use std::fmt;

use serde::Serialize;

use crate::error::{check_bound, invalid, Error, Result};
use crate::numtheory::{is_prime, pow_mod};

/// Largest field that is ever enumerated.
pub const FIELD_ENUMERATION_LIMIT: u64 = 1_000_000;

/// Polynomials over `F_p`, constant term first, no trailing zeros.
pub mod poly {
    use crate::numtheory::pow_mod;

    pub fn trim(mut v: Vec<u64>) -> Vec<u64> {
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    }

    pub fn degree(a: &[u64]) -> Option<usize> {
        a.iter().rposition(|&c| c != 0)
    }

    pub fn add(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        trim((0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p)
            .collect())
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        trim((0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0) % p) % p)
            .collect())
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = ((out[i + j] as u128 + x as u128 * y as u128) % p as u128) as u64;
            }
        }
        trim(out)
    }

    /// Quotient and remainder; `b` must be nonzero.
    pub fn divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
        let db = degree(b).expect("division by the zero polynomial");
        let lead_inv = pow_mod(b[db], p - 2, p);
        let mut r = trim(a.to_vec());
        if r.len() <= db {
            return (Vec::new(), r);
        }
        let mut q = vec![0u64; r.len() - db];
        while let Some(dr) = degree(&r) {
            if dr < db {
                break;
            }
            let c = ((r[dr] as u128 * lead_inv as u128) % p as u128) as u64;
            let shift = dr - db;
            q[shift] = c;
            for (i, &bi) in b.iter().enumerate().take(db + 1) {
                let t = ((c as u128 * bi as u128) % p as u128) as u64;
                r[shift + i] = (r[shift + i] + p - t) % p;
            }
            r = trim(r);
        }
        (trim(q), r)
    }

    pub fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        divrem(a, b, p).1
    }

    /// `(g, s)` with `s·a ≡ g (mod m)` and `g = gcd(a, m)` made monic.
    pub fn gcd_with_inverse(a: &[u64], m: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
        let (mut r0, mut r1) = (trim(m.to_vec()), trim(a.to_vec()));
        let (mut s0, mut s1): (Vec<u64>, Vec<u64>) = (Vec::new(), vec![1]);
        while !r1.is_empty() {
            let (q, r) = divrem(&r0, &r1, p);
            let s = sub(&s0, &mul(&q, &s1, p), p);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        if let Some(d) = degree(&r0) {
            let inv = pow_mod(r0[d], p - 2, p);
            let scale = |v: &[u64]| trim(v.iter().map(|&c| (c as u128 * inv as u128 % p as u128) as u64).collect());
            (scale(&r0), scale(&s0))
        } else {
            (r0, s0)
        }
    }

    /// Monic polynomial of degree `deg` whose lower coefficients are the
    /// base-`p` digits of `code`.
    pub fn monic_from_code(mut code: u64, deg: usize, p: u64) -> Vec<u64> {
        let mut v = Vec::with_capacity(deg + 1);
        for _ in 0..deg {
            v.push(code % p);
            code /= p;
        }
        v.push(1);
        v
    }

    /// Irreducibility by trial division by every monic of degree `1..=deg/2`.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let Some(deg) = degree(f) else { return false };
        if deg == 0 {
            return false;
        }
        for d in 1..=deg / 2 {
            for code in 0..p.pow(d as u32) {
                let g = monic_from_code(code, d, p);
                if rem(f, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }
}

/// Deterministic smallest monic irreducible polynomial of degree `n`.
pub fn find_irreducible(p: u64, n: usize) -> Result<Vec<u64>> {
    if !is_prime(p) {
        return invalid(format!("characteristic {p} is not prime"));
    }
    if n == 0 {
        return invalid("extension degree must be >= 1");
    }
    let count = (p as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    check_bound("field size", count, FIELD_ENUMERATION_LIMIT as u128)?;
    for code in 0..count as u64 {
        let f = poly::monic_from_code(code, n, p);
        if poly::is_irreducible(&f, p) {
            return Ok(f);
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// `F_{p^n}` with a fixed monic irreducible modulus.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FieldSpec {
    p: u64,
    n: usize,
    modulus: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FieldElement(Vec<u64>);

impl FieldElement {
    pub fn coeffs(&self) -> &[u64] {
        &self.0
    }
}

impl FieldSpec {
    pub fn new(p: u64, n: usize) -> Result<Self> {
        let modulus = find_irreducible(p, n)?;
        Ok(FieldSpec { p, n, modulus })
    }

    pub fn prime(p: u64) -> Result<Self> {
        Self::new(p, 1)
    }

    /// Uses a caller-chosen modulus, which must be monic and irreducible.
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Self> {
        if !is_prime(p) {
            return invalid(format!("characteristic {p} is not prime"));
        }
        let modulus = poly::trim(modulus.into_iter().map(|c| c % p).collect());
        let Some(n) = poly::degree(&modulus) else {
            return invalid("modulus is zero");
        };
        if modulus[n] != 1 {
            return invalid("modulus must be monic");
        }
        if !poly::is_irreducible(&modulus, p) {
            return invalid("modulus is reducible");
        }
        Ok(FieldSpec { p, n, modulus })
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn size(&self) -> u64 {
        self.p.pow(self.n as u32)
    }

    fn wrap(&self, v: Vec<u64>) -> FieldElement {
        let mut c = poly::rem(&v, &self.modulus, self.p);
        c.resize(self.n, 0);
        FieldElement(c)
    }

    fn check(&self, a: &FieldElement) -> Result<()> {
        if a.0.len() != self.n || a.0.iter().any(|&c| c >= self.p) {
            return Err(Error::Mismatch(format!("{:?} is not an element of F_{}", a.0, self.size())));
        }
        Ok(())
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(vec![0; self.n])
    }

    pub fn one(&self) -> FieldElement {
        self.from_int(1)
    }

    /// The image of an integer under `Z -> F_p -> F_q`.
    pub fn from_int(&self, v: i64) -> FieldElement {
        let mut c = vec![0; self.n];
        c[0] = (v as i128).rem_euclid(self.p as i128) as u64;
        FieldElement(c)
    }

    /// Reduces arbitrary coefficients (any length) into the field.
    pub fn from_coeffs(&self, coeffs: &[u64]) -> FieldElement {
        self.wrap(poly::trim(coeffs.iter().map(|&c| c % self.p).collect()))
    }

    /// The class of `X`.
    pub fn generator(&self) -> FieldElement {
        self.from_coeffs(&[0, 1])
    }

    pub fn from_index(&self, mut index: u64) -> Result<FieldElement> {
        if index >= self.size() {
            return invalid(format!("index {index} outside a field of size {}", self.size()));
        }
        let mut c = vec![0; self.n];
        for slot in c.iter_mut() {
            *slot = index % self.p;
            index /= self.p;
        }
        Ok(FieldElement(c))
    }

    pub fn index_of(&self, a: &FieldElement) -> u64 {
        a.0.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    pub fn is_zero(&self, a: &FieldElement) -> bool {
        a.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement(a.0.iter().zip(&b.0).map(|(&x, &y)| (x + y) % self.p).collect())
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement(a.0.iter().zip(&b.0).map(|(&x, &y)| (x + self.p - y) % self.p).collect())
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        FieldElement(a.0.iter().map(|&x| (self.p - x) % self.p).collect())
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.wrap(poly::mul(&poly::trim(a.0.clone()), &poly::trim(b.0.clone()), self.p))
    }

    pub fn scale(&self, k: i64, a: &FieldElement) -> FieldElement {
        self.mul(&self.from_int(k), a)
    }

    pub fn square(&self, a: &FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    pub fn pow(&self, a: &FieldElement, mut e: u64) -> FieldElement {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Inverse by the extended Euclidean algorithm on polynomials.
    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        if self.is_zero(a) {
            return Err(Error::NotInvertible("0 has no multiplicative inverse".into()));
        }
        let (g, s) = poly::gcd_with_inverse(&poly::trim(a.0.clone()), &self.modulus, self.p);
        debug_assert_eq!(g, vec![1]);
        Ok(self.wrap(s))
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn frobenius(&self, a: &FieldElement) -> FieldElement {
        self.pow(a, self.p)
    }

    /// All `q` elements in index order.
    pub fn enumerate(&self) -> Result<Vec<FieldElement>> {
        check_bound("field size", self.size() as u128, FIELD_ENUMERATION_LIMIT as u128)?;
        (0..self.size()).map(|i| self.from_index(i)).collect()
    }

    pub fn render(&self, a: &FieldElement) -> String {
        let mut terms = Vec::new();
        for (deg, &c) in a.0.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let coeff = if c == 1 && deg > 0 { String::new() } else { c.to_string() };
            terms.push(match deg {
                0 => coeff,
                1 => format!("{coeff}x"),
                _ => format!("{coeff}x^{deg}"),
            });
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }

    /// Embedding `sub -> self`, defined when both share the characteristic
    /// and `sub.degree()` divides `self.degree()`. The image of `sub`'s `x`
    /// is the smallest-index root of `sub`'s modulus in `self`.
    pub fn embedding_from(&self, sub: &FieldSpec) -> Result<Embedding> {
        if sub.p != self.p || !self.n.is_multiple_of(sub.n) {
            return invalid(format!(
                "F_{} is not a subfield of F_{}",
                sub.size(),
                self.size()
            ));
        }
        let image_of_x = if sub.n == 1 {
            // sub's modulus is X, so x maps to 0 and constants map to constants.
            self.zero()
        } else {
            check_bound("field size", self.size() as u128, FIELD_ENUMERATION_LIMIT as u128)?;
            (0..self.size())
                .map(|i| self.from_index(i).expect("index in range"))
                .find(|beta| {
                    let mut acc = self.zero();
                    for &c in sub.modulus.iter().rev() {
                        acc = self.add(&self.mul(&acc, beta), &self.from_int(c as i64));
                    }
                    self.is_zero(&acc)
                })
                .expect("a degree-dividing extension contains every root")
        };
        Ok(Embedding {
            sub: sub.clone(),
            sup: self.clone(),
            image_of_x,
        })
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.size())
    }
}

/// A field homomorphism `F_{p^m} -> F_{p^n}`.
#[derive(Debug, Clone)]
pub struct Embedding {
    sub: FieldSpec,
    sup: FieldSpec,
    image_of_x: FieldElement,
}

impl Embedding {
    pub fn source(&self) -> &FieldSpec {
        &self.sub
    }

    pub fn target(&self) -> &FieldSpec {
        &self.sup
    }

    pub fn apply(&self, a: &FieldElement) -> FieldElement {
        let k = &self.sup;
        let mut acc = k.zero();
        for &c in a.0.iter().rev() {
            acc = k.add(&k.mul(&acc, &self.image_of_x), &k.from_int(c as i64));
        }
        acc
    }
}

/// Log/antilog tables for fast arithmetic on element indices.
#[derive(Debug, Clone)]
pub struct FieldTables {
    p: u64,
    n: usize,
    q: u64,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl FieldTables {
    pub fn new(field: &FieldSpec) -> Result<Self> {
        let q = field.size();
        check_bound("field size", q as u128, FIELD_ENUMERATION_LIMIT as u128)?;
        let order = q - 1;
        let prime_factors: Vec<u64> = if order > 1 {
            crate::numtheory::factorize(order)?.primes().collect()
        } else {
            Vec::new()
        };
        let is_primitive = |g: &FieldElement| {
            !field.is_zero(g)
                && prime_factors
                    .iter()
                    .all(|&r| field.pow(g, order / r) != field.one())
        };
        let g = (1..q)
            .map(|i| field.from_index(i).expect("index in range"))
            .find(is_primitive)
            .expect("the multiplicative group of a finite field is cyclic");
        let mut exp = vec![0u32; order as usize];
        let mut log = vec![u32::MAX; q as usize];
        let mut x = field.one();
        for k in 0..order as usize {
            let idx = field.index_of(&x) as u32;
            exp[k] = idx;
            log[idx as usize] = k as u32;
            x = field.mul(&x, &g);
        }
        Ok(FieldTables {
            p: field.p,
            n: field.n,
            q,
            exp,
            log,
        })
    }

    pub fn size(&self) -> u64 {
        self.q
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a as u64, b as u64);
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.n {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out as u32
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let order = self.q - 1;
        let k = (self.log[a as usize] as u64 + self.log[b as usize] as u64) % order;
        self.exp[k as usize]
    }

    pub fn pow(&self, a: u32, e: u32) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let order = self.q - 1;
        let k = (self.log[a as usize] as u64 * e as u64) % order;
        self.exp[k as usize]
    }
}

/// Exact `pow_mod` re-export for callers working in prime fields.
pub fn prime_pow(a: u64, e: u64, p: u64) -> u64 {
    pow_mod(a, e, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_exercise_tables() {
        let f4 = FieldSpec::new(2, 2).unwrap();
        assert_eq!(f4.modulus(), &[1, 1, 1]);
        let zero = f4.zero();
        let one = f4.one();
        let x = f4.generator();
        let y = f4.add(&one, &x);
        assert_eq!(f4.mul(&x, &y), one);
        assert_eq!(f4.mul(&x, &x), y);
        assert_eq!(f4.add(&one, &x), y);
        assert_eq!(f4.add(&x, &y), one);
        assert_eq!(f4.add(&one, &y), x);
        assert_eq!(f4.enumerate().unwrap(), vec![zero, one.clone(), x, y]);
        assert_eq!(f4.render(&f4.add(&one, &f4.generator())), "x+1");
    }

    #[test]
    fn prime_field_inverse() {
        let f5 = FieldSpec::prime(5).unwrap();
        assert_eq!(f5.inv(&f5.from_int(2)).unwrap(), f5.from_int(3));
        assert!(f5.inv(&f5.zero()).is_err());
        let v: Vec<u64> = f5.enumerate().unwrap().iter().map(|e| e.coeffs()[0]).collect();
        assert_eq!(v, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn irreducible_examples() {
        assert_eq!(find_irreducible(2, 2).unwrap(), vec![1, 1, 1]);
        assert_eq!(find_irreducible(7, 1).unwrap(), vec![0, 1]);
        assert_eq!(find_irreducible(3, 2).unwrap(), vec![1, 0, 1]);
        // X^2 + 1 has no root in F_3.
        assert!((0..3u64).all(|t| (t * t + 1) % 3 != 0));
        assert!(find_irreducible(4, 2).is_err());
        assert!(FieldSpec::with_modulus(2, vec![1, 0, 1]).is_err());
    }

    #[test]
    fn irreducible_polynomials_have_no_roots_and_right_degree() {
        for (p, n) in [(2, 3), (2, 4), (3, 3), (5, 2), (5, 3), (7, 2)] {
            let f = find_irreducible(p, n).unwrap();
            assert_eq!(poly::degree(&f), Some(n));
            for t in 0..p {
                let v = f.iter().rev().fold(0u64, |acc, &c| (acc * t + c) % p);
                assert_ne!(v, 0);
            }
        }
    }

    #[test]
    fn embedding_preserves_operations() {
        let f2 = FieldSpec::prime(2).unwrap();
        let f4 = FieldSpec::new(2, 2).unwrap();
        let e = f4.embedding_from(&f2).unwrap();
        assert_eq!(e.apply(&f2.one()), f4.one());

        let f16 = FieldSpec::new(2, 4).unwrap();
        let e = f16.embedding_from(&f4).unwrap();
        let small = f4.enumerate().unwrap();
        for a in &small {
            for b in &small {
                assert_eq!(e.apply(&f4.add(a, b)), f16.add(&e.apply(a), &e.apply(b)));
                assert_eq!(e.apply(&f4.mul(a, b)), f16.mul(&e.apply(a), &e.apply(b)));
            }
        }
        let f8 = FieldSpec::new(2, 3).unwrap();
        assert!(f8.embedding_from(&f4).is_err());
        assert!(f16.embedding_from(&FieldSpec::prime(3).unwrap()).is_err());
    }

    #[test]
    fn tables_agree_with_polynomial_arithmetic() {
        for (p, n) in [(2, 3), (3, 2), (5, 1), (5, 2)] {
            let f = FieldSpec::new(p, n).unwrap();
            let t = FieldTables::new(&f).unwrap();
            let all = f.enumerate().unwrap();
            for a in &all {
                for b in &all {
                    let (ia, ib) = (f.index_of(a) as u32, f.index_of(b) as u32);
                    assert_eq!(t.add(ia, ib) as u64, f.index_of(&f.add(a, b)));
                    assert_eq!(t.mul(ia, ib) as u64, f.index_of(&f.mul(a, b)));
                }
                assert_eq!(t.pow(f.index_of(a) as u32, 3) as u64, f.index_of(&f.pow(a, 3)));
            }
        }
    }

    #[test]
    fn rendering() {
        let f9 = FieldSpec::new(3, 2).unwrap();
        assert_eq!(f9.render(&f9.zero()), "0");
        assert_eq!(f9.render(&f9.from_coeffs(&[2, 2])), "2x+2");
        let f27 = FieldSpec::new(3, 3).unwrap();
        assert_eq!(f27.render(&f27.from_coeffs(&[0, 1, 2])), "2x^2+x");
    }
}
