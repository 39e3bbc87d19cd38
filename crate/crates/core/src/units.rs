//! Rings of integers of quadratic fields `Q(√m)`, norms, units, Pell
//! equations and fundamental units via continued fractions.
//!
//! Elements are `a + bω` with `ω = √m` for `m ≡ 2, 3 (mod 4)` and
//! `ω = (1+√m)/2` for `m ≡ 1 (mod 4)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::numtheory::factorize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Omega {
    /// `ω = √m`.
    Sqrt,
    /// `ω = (1+√m)/2`.
    HalfOnePlusSqrt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct QuadField {
    m: i64,
    omega: Omega,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadInt {
    field: QuadField,
    a: BigInt,
    b: BigInt,
}

fn is_squarefree(m: i64) -> Result<bool> {
    let n = m.unsigned_abs();
    if n == 1 {
        return Ok(true);
    }
    Ok(factorize(n)?.pairs().iter().all(|&(_, e)| e == 1))
}

/// The `ω` of `O_K` for `K = Q(√m)`.
pub fn ring_basis(m: i64) -> Result<QuadField> {
    if m == 0 || m == 1 {
        return invalid(format!("m = {m} does not give a quadratic field"));
    }
    if !is_squarefree(m)? {
        return invalid(format!("m = {m} is not squarefree"));
    }
    let omega = if m.rem_euclid(4) == 1 {
        Omega::HalfOnePlusSqrt
    } else {
        Omega::Sqrt
    };
    Ok(QuadField { m, omega })
}

impl QuadField {
    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn omega(&self) -> Omega {
        self.omega
    }

    pub fn elem(&self, a: impl Into<BigInt>, b: impl Into<BigInt>) -> QuadInt {
        QuadInt {
            field: *self,
            a: a.into(),
            b: b.into(),
        }
    }

    pub fn one(&self) -> QuadInt {
        self.elem(1, 0)
    }

    /// `(x + y√m)/2`, which must lie in `O_K`.
    pub fn from_halves(&self, x: impl Into<BigInt>, y: impl Into<BigInt>) -> Result<QuadInt> {
        let (x, y): (BigInt, BigInt) = (x.into(), y.into());
        match self.omega {
            Omega::Sqrt => {
                if x.is_odd() || y.is_odd() {
                    return invalid("element is not in the ring of integers");
                }
                Ok(self.elem(x / 2, y / 2))
            }
            Omega::HalfOnePlusSqrt => {
                // (x + y√m)/2 = (x - y)/2 + yω.
                let d = &x - &y;
                if d.is_odd() {
                    return invalid("element is not in the ring of integers");
                }
                Ok(self.elem(d / 2, y))
            }
        }
    }

    /// `a + b√m` with integer `a`, `b`.
    pub fn from_sqrt_coords(&self, a: impl Into<BigInt>, b: impl Into<BigInt>) -> QuadInt {
        let (a, b): (BigInt, BigInt) = (a.into(), b.into());
        self.from_halves(a * 2, b * 2).expect("Z[√m] lies in O_K")
    }

    fn check(&self, x: &QuadInt) -> Result<()> {
        if x.field != *self {
            return Err(Error::Mismatch(format!(
                "element of Q(√{}) used in Q(√{})",
                x.field.m, self.m
            )));
        }
        Ok(())
    }
}

impl fmt::Display for QuadField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(√{})", self.m)
    }
}

impl QuadInt {
    pub fn field(&self) -> &QuadField {
        &self.field
    }

    /// Coordinates `(a, b)` in the basis `1, ω`.
    pub fn coords(&self) -> (&BigInt, &BigInt) {
        (&self.a, &self.b)
    }

    /// `(x, y)` with `self = (x + y√m)/2`.
    pub fn halves(&self) -> (BigInt, BigInt) {
        match self.field.omega {
            Omega::Sqrt => (&self.a * 2, &self.b * 2),
            Omega::HalfOnePlusSqrt => (&self.a * 2 + &self.b, self.b.clone()),
        }
    }

    pub fn mul(&self, other: &QuadInt) -> Result<QuadInt> {
        self.field.check(other)?;
        let (a, b, c, d) = (&self.a, &self.b, &other.a, &other.b);
        let bd = b * d;
        let (ca, cb) = match self.field.omega {
            Omega::Sqrt => (a * c + &bd * self.field.m, a * d + b * c),
            // ω² = ω + (m - 1)/4
            Omega::HalfOnePlusSqrt => {
                let k = (self.field.m - 1) / 4;
                (a * c + &bd * k, a * d + b * c + bd)
            }
        };
        Ok(self.field.elem(ca, cb))
    }

    pub fn neg(&self) -> QuadInt {
        self.field.elem(-&self.a, -&self.b)
    }

    pub fn conj(&self) -> QuadInt {
        match self.field.omega {
            Omega::Sqrt => self.field.elem(self.a.clone(), -&self.b),
            Omega::HalfOnePlusSqrt => self.field.elem(&self.a + &self.b, -&self.b),
        }
    }

    pub fn norm(&self) -> BigInt {
        let (a, b) = (&self.a, &self.b);
        match self.field.omega {
            Omega::Sqrt => a * a - b * b * self.field.m,
            Omega::HalfOnePlusSqrt => a * a + a * b + b * b * ((1 - self.field.m) / 4),
        }
    }

    pub fn trace(&self) -> BigInt {
        match self.field.omega {
            Omega::Sqrt => &self.a * 2,
            Omega::HalfOnePlusSqrt => &self.a * 2 + &self.b,
        }
    }

    pub fn pow(&self, mut e: u64) -> QuadInt {
        let mut acc = self.field.one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same field");
            }
            base = base.mul(&base).expect("same field");
            e >>= 1;
        }
        acc
    }

    /// Units are exactly the elements of norm `±1`.
    pub fn is_unit(&self) -> bool {
        self.norm().abs().is_one()
    }

    /// `x^{-1} = x̄ / N(x)` lies in `O_K`, i.e. `x·O_K = O_K`.
    pub fn has_inverse_in_ring(&self) -> bool {
        let n = self.norm();
        if n.is_zero() {
            return false;
        }
        let c = self.conj();
        c.a.is_multiple_of(&n) && c.b.is_multiple_of(&n)
    }

    pub fn inverse(&self) -> Result<QuadInt> {
        if !self.has_inverse_in_ring() {
            return Err(Error::NotInvertible(format!("{self} is not a unit")));
        }
        let n = self.norm();
        let c = self.conj();
        Ok(self.field.elem(c.a / &n, c.b / &n))
    }

    /// Real value, for `m > 0`.
    pub fn to_f64(&self) -> f64 {
        let (x, y) = self.halves();
        let m = self.field.m as f64;
        (big_to_f64(&x) + big_to_f64(&y) * m.sqrt()) / 2.0
    }
}

fn big_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(if x.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

/// `ln |x|` of a big integer, valid beyond the `f64` range.
fn big_ln(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return big_to_f64(x).abs().ln();
    }
    let shift = bits - 64;
    big_to_f64(&(x.abs() >> shift)).ln() + shift as f64 * std::f64::consts::LN_2
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (x, y) = self.halves();
        let (x, y, halved) = if x.is_even() && y.is_even() {
            (x / 2, y / 2, false)
        } else {
            (x, y, true)
        };
        let m = self.field.m;
        let root = match y.to_i64() {
            Some(1) => format!("√{m}"),
            Some(-1) => format!("-√{m}"),
            _ => format!("{y}√{m}"),
        };
        let body = if y.is_zero() {
            x.to_string()
        } else if x.is_zero() {
            root
        } else if y.is_negative() {
            format!("{x}{root}")
        } else {
            format!("{x}+{root}")
        };
        if halved {
            write!(f, "({body})/2")
        } else {
            write!(f, "{body}")
        }
    }
}

/// Continued fraction of the reduced `ξ = (P + √d)/Q` over one period:
/// returns `(q_{ℓ-1}, q_{ℓ-2})` for the convergent denominators.
fn periodic_denominators(d: &BigInt, p0: &BigInt, q0: &BigInt) -> (BigInt, BigInt) {
    let s = d.sqrt();
    let (mut p, mut q) = (p0.clone(), q0.clone());
    // q_{-1} = 0, q_{-2} = 1
    let (mut q_prev, mut q_cur) = (BigInt::one(), BigInt::zero());
    loop {
        let a = if q.is_positive() {
            (&p + &s).div_floor(&q)
        } else {
            (&p + &s + BigInt::one()).div_floor(&q)
        };
        let next = &a * &q_cur + &q_prev;
        q_prev = std::mem::replace(&mut q_cur, next);
        p = &a * &q - &p;
        q = (d - &p * &p) / &q;
        if &p == p0 && &q == q0 {
            return (q_cur, q_prev);
        }
    }
}

/// Smallest unit `ε₀ > 1` of `O_K`, for squarefree `m > 1`.
pub fn fundamental_unit(m: i64) -> Result<QuadInt> {
    if m <= 1 {
        return invalid(format!("fundamental unit needs m > 1, got {m}"));
    }
    let field = ring_basis(m)?;
    let d = BigInt::from(m);
    let r = d.sqrt();
    match field.omega {
        Omega::Sqrt => {
            // ξ = ⌊√m⌋ + √m
            let (qa, qb) = periodic_denominators(&d, &r, &BigInt::one());
            Ok(field.elem(&qa * &r + qb, qa))
        }
        Omega::HalfOnePlusSqrt => {
            // ξ = (b + √m)/2 = (b-1)/2 + ω with b the largest odd integer below √m.
            let b = if r.is_odd() { r } else { r - 1 };
            let (qa, qb) = periodic_denominators(&d, &b, &BigInt::from(2));
            let shift: BigInt = (&b - 1) / 2;
            Ok(field.elem(&qa * shift + qb, qa))
        }
    }
}

/// `ln ε₀`.
pub fn regulator(m: i64) -> Result<f64> {
    let e = fundamental_unit(m)?;
    let t = e.trace();
    let n = big_to_f64(&e.norm());
    // ε₀ = (t + √(t² - 4N))/2
    let tf = big_to_f64(&t);
    if tf.is_finite() && tf < 1e150 {
        Ok(((tf + (tf * tf - 4.0 * n).sqrt()) / 2.0).ln())
    } else {
        Ok(big_ln(&t))
    }
}

/// Least positive solution of `x² - m y² = 1` for nonsquare `m > 1`.
pub fn pell_fundamental(m: i64) -> Result<(BigInt, BigInt)> {
    if m <= 1 {
        return invalid(format!("Pell equation needs m > 1, got {m}"));
    }
    let d = BigInt::from(m);
    let r = d.sqrt();
    if &r * &r == d {
        return invalid(format!("m = {m} is a perfect square"));
    }
    let (qa, qb) = periodic_denominators(&d, &r, &BigInt::one());
    let (mut x, mut y) = (&qa * &r + qb, qa);
    if &x * &x - &d * &y * &y != BigInt::one() {
        // Norm -1: square it.
        let (x2, y2) = (&x * &x + &d * &y * &y, BigInt::from(2) * &x * &y);
        x = x2;
        y = y2;
    }
    if &x * &x - &d * &y * &y != BigInt::one() {
        return Err(Error::VerificationFailed(format!("x² - {m}y² ≠ 1 for ({x}, {y})")));
    }
    Ok((x, y))
}

/// Smallest solution of `x² - m y² = 1` by scanning `y = 1, 2, ...`.
pub fn pell_bruteforce(m: i64, max_y: u64) -> Option<(u64, u64)> {
    (1..=max_y).find_map(|y| {
        let t = m as u128 * y as u128 * y as u128 + 1;
        let x = t.sqrt();
        (x * x == t).then_some((x as u64, y))
    })
}

/// Every unit `a + bω` with `|a|, |b| <= bound`, found by solving the norm
/// equation for `a` at each `b`.
pub fn units_with_bounded_coefficients(field: &QuadField, bound: i64) -> Vec<QuadInt> {
    let m = field.m as i128;
    let mut out = Vec::new();
    for b in -bound..=bound {
        let b = b as i128;
        for sign in [1i128, -1] {
            let (disc, base) = match field.omega {
                // a² = m b² ± 1
                Omega::Sqrt => (m * b * b + sign, 0i128),
                // a² + ab + b²(1-m)/4 = ±1  ⇒  (2a + b)² = m b² ± 4
                Omega::HalfOnePlusSqrt => (m * b * b + 4 * sign, -b),
            };
            if disc < 0 {
                continue;
            }
            let s = (disc as u128).sqrt() as i128;
            if s * s != disc {
                continue;
            }
            for root in [s, -s] {
                let num = base + root;
                let a = match field.omega {
                    Omega::Sqrt => root,
                    Omega::HalfOnePlusSqrt => {
                        if num % 2 != 0 {
                            continue;
                        }
                        num / 2
                    }
                };
                if a.abs() <= bound as i128 {
                    out.push(field.elem(a, b));
                }
            }
        }
    }
    out.sort_by(|x, y| (&x.a, &x.b).cmp(&(&y.a, &y.b)));
    out.dedup();
    out
}

/// `±ε₀ⁿ` with both coefficients bounded by `bound`.
pub fn unit_powers_with_bounded_coefficients(m: i64, bound: i64) -> Result<Vec<QuadInt>> {
    let e = fundamental_unit(m)?;
    let field = *e.field();
    let inv = e.inverse()?;
    let bound = BigInt::from(bound);
    let small = |x: &QuadInt| x.a.abs() <= bound && x.b.abs() <= bound;
    let mut out = Vec::new();
    for step in [&e, &inv] {
        let mut x = field.one();
        // Coefficients grow geometrically in both directions.
        for _ in 0..10_000 {
            if small(&x) {
                out.push(x.clone());
                out.push(x.neg());
            } else if x != field.one() {
                break;
            }
            x = x.mul(step)?;
        }
    }
    out.sort_by(|x, y| (&x.a, &x.b).cmp(&(&y.a, &y.b)));
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bases() {
        assert_eq!(ring_basis(5).unwrap().omega(), Omega::HalfOnePlusSqrt);
        assert_eq!(ring_basis(2).unwrap().omega(), Omega::Sqrt);
        assert_eq!(ring_basis(-5).unwrap().omega(), Omega::Sqrt);
        assert_eq!(ring_basis(-3).unwrap().omega(), Omega::HalfOnePlusSqrt);
        assert!(ring_basis(12).is_err());
        assert!(ring_basis(1).is_err());
        assert!(ring_basis(0).is_err());
    }

    #[test]
    fn products_and_norms() {
        let k = ring_basis(5).unwrap();
        let u = k.from_sqrt_coords(9, 4);
        assert_eq!(u.mul(&u.conj()).unwrap(), k.one());
        assert_eq!(u.to_string(), "9+4√5");
        assert_eq!(u.conj().to_string(), "9-4√5");
        let k5 = ring_basis(-5).unwrap();
        assert_eq!(k5.elem(1, 1).norm(), BigInt::from(6));
        assert_eq!(k5.one().norm(), BigInt::one());
        assert!(u.mul(&k5.one()).is_err());
    }

    #[test]
    fn unit_tests() {
        let k = ring_basis(5).unwrap();
        assert!(k.from_sqrt_coords(9, 4).is_unit());
        assert!(!k.elem(2, 0).is_unit());
        let phi = k.from_halves(1, 1).unwrap();
        assert_eq!(phi.norm(), BigInt::from(-1));
        assert!(phi.is_unit());
        assert_eq!(phi.to_string(), "(1+√5)/2");
    }

    #[test]
    fn fundamental_units() {
        let k5 = ring_basis(5).unwrap();
        let e = fundamental_unit(5).unwrap();
        assert_eq!(e, k5.from_halves(1, 1).unwrap());
        assert_eq!(e.pow(6), k5.from_sqrt_coords(9, 4));
        assert_eq!(fundamental_unit(2).unwrap(), ring_basis(2).unwrap().elem(1, 1));
        assert!((regulator(5).unwrap() - 0.481_211_825).abs() < 1e-6);
        assert!(fundamental_unit(4).is_err());
    }

    #[test]
    fn fundamental_unit_is_smallest_unit_above_one() {
        for m in [2i64, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17, 19, 21, 22, 23, 29, 33, 37, 41] {
            let e = fundamental_unit(m).unwrap();
            assert!(e.is_unit(), "m={m}");
            let k = *e.field();
            let units = units_with_bounded_coefficients(&k, 2_000);
            let smallest = units
                .iter()
                .filter(|u| u.to_f64() > 1.0 + 1e-9)
                .min_by(|x, y| x.to_f64().partial_cmp(&y.to_f64()).unwrap())
                .unwrap();
            assert_eq!(&e, smallest, "m={m}");
        }
    }

    #[test]
    fn pell_examples() {
        let as_u = |(x, y): (BigInt, BigInt)| (x.to_u64().unwrap(), y.to_u64().unwrap());
        assert_eq!(as_u(pell_fundamental(5).unwrap()), (9, 4));
        assert_eq!(as_u(pell_fundamental(2).unwrap()), (3, 2));
        assert_eq!(as_u(pell_fundamental(3).unwrap()), (2, 1));
        for m in 2..200i64 {
            if (m as u64).sqrt().pow(2) == m as u64 {
                assert!(pell_fundamental(m).is_err());
                continue;
            }
            let (x, y) = pell_fundamental(m).unwrap();
            if let Some(b) = pell_bruteforce(m, 100_000) {
                assert_eq!((x.to_u64().unwrap(), y.to_u64().unwrap()), b, "m={m}");
            }
        }
        let (x, y) = pell_fundamental(61).unwrap();
        assert_eq!(x.to_string(), "1766319049");
        assert_eq!(y.to_string(), "226153980");
    }

    #[test]
    fn bounded_units_are_powers() {
        for m in [2i64, 5, 13] {
            let k = ring_basis(m).unwrap();
            assert_eq!(
                units_with_bounded_coefficients(&k, 10_000),
                unit_powers_with_bounded_coefficients(m, 10_000).unwrap()
            );
        }
    }

    #[test]
    fn non_unique_factorization_witness() {
        let k = ring_basis(-5).unwrap();
        let (two, three) = (k.elem(2, 0), k.elem(3, 0));
        let (p, q) = (k.elem(1, 1), k.elem(1, -1));
        assert_eq!(two.norm() * three.norm(), BigInt::from(36));
        assert_eq!(p.norm() * q.norm(), BigInt::from(36));
        assert_eq!(p.mul(&q).unwrap(), two.mul(&three).unwrap());
        for x in [&two, &three, &p, &q] {
            assert!(!x.is_unit());
            assert!(!x.has_inverse_in_ring());
        }
    }
}
