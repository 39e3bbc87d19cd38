//! Modular arithmetic, gcd machinery, Euler's totient, multiplicative orders
//! and continued-fraction convergents.
//!
//! Everything here is classical and exact. The quantum pipelines in
//! [`crate::shor`] use these functions for post-processing and as the
//! ground-truth oracles their results are checked against.

use std::fmt;

use num_integer::{Integer, Roots};
use num_traits::Signed;
use serde::Serialize;

use crate::error::{invalid, Result};

/// Largest modulus for which [`multiplicative_order_naive`] will iterate.
pub const NAIVE_ORDER_LIMIT: u64 = 1_000_000;

/// Extended Euclid: returns `(g, u, v)` with `g = gcd(a, b) >= 0` and
/// `u*a + v*b = g`.
pub fn egcd<T>(a: T, b: T) -> Result<(T, T, T)>
where
    T: Integer + Signed + Clone,
{
    if a.is_zero() && b.is_zero() {
        return invalid("egcd(0, 0) is undefined");
    }
    let (mut old_r, mut r) = (a, b);
    let (mut old_u, mut u) = (T::one(), T::zero());
    let (mut old_v, mut v) = (T::zero(), T::one());
    while !r.is_zero() {
        let q = old_r.div_floor(&r);
        let next_r = old_r - q.clone() * r.clone();
        old_r = std::mem::replace(&mut r, next_r);
        let next_u = old_u - q.clone() * u.clone();
        old_u = std::mem::replace(&mut u, next_u);
        let next_v = old_v - q * v.clone();
        old_v = std::mem::replace(&mut v, next_v);
    }
    if old_r.is_negative() {
        Ok((-old_r, -old_u, -old_v))
    } else {
        Ok((old_r, old_u, old_v))
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

/// `base^exp mod modulus` with 128-bit intermediates.
pub fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let m = modulus as u128;
    let mut b = (base as u128) % m;
    let mut acc: u128 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

pub fn mul_mod(a: u64, b: u64, modulus: u64) -> u64 {
    ((a as u128 * b as u128) % modulus as u128) as u64
}

/// An element of Z/NZ, always stored reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    pub fn new(value: u64, modulus: u64) -> Result<Self> {
        if modulus < 2 {
            return invalid(format!("modulus must be >= 2, got {modulus}"));
        }
        Ok(Residue {
            value: value % modulus,
            modulus,
        })
    }

    /// Canonical representative of a possibly negative integer.
    pub fn from_signed(value: i128, modulus: u64) -> Result<Self> {
        if modulus < 2 {
            return invalid(format!("modulus must be >= 2, got {modulus}"));
        }
        let v = value.rem_euclid(modulus as i128) as u64;
        Ok(Residue { value: v, modulus })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_unit(&self) -> bool {
        gcd(self.value, self.modulus) == 1
    }

    pub fn mul(&self, other: &Residue) -> Residue {
        debug_assert_eq!(self.modulus, other.modulus);
        Residue {
            value: mul_mod(self.value, other.value, self.modulus),
            modulus: self.modulus,
        }
    }

    pub fn inverse(&self) -> Result<Residue> {
        mod_inverse(*self)
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

/// `a^e` in O(log e) multiplications.
pub fn mod_pow(a: Residue, e: u64) -> Residue {
    Residue {
        value: pow_mod(a.value, e, a.modulus),
        modulus: a.modulus,
    }
}

pub fn mod_inverse(a: Residue) -> Result<Residue> {
    let (g, u, _) = egcd(a.value as i128, a.modulus as i128)?;
    if g != 1 {
        return Err(crate::Error::NotInvertible(format!(
            "{} shares the factor {g} with its modulus",
            a
        )));
    }
    Residue::from_signed(u, a.modulus)
}

/// Prime factorization as strictly increasing `(prime, exponent)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Factorization {
    pairs: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn pairs(&self) -> &[(u64, u32)] {
        &self.pairs
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.pairs.iter().map(|&(p, _)| p)
    }

    pub fn value(&self) -> u64 {
        self.pairs.iter().map(|&(p, e)| p.pow(e)).product()
    }

    pub fn is_prime(&self) -> bool {
        self.pairs.len() == 1 && self.pairs[0].1 == 1
    }

    pub fn is_prime_power(&self) -> bool {
        self.pairs.len() == 1
    }
}

/// Deterministic trial division up to the square root.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return invalid("cannot factor 0");
    }
    let mut rest = n;
    let mut pairs = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= rest {
        if rest.is_multiple_of(p) {
            let mut e = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            pairs.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        pairs.push((rest, 1));
    }
    Ok(Factorization { pairs })
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n).map(|f| f.is_prime()).unwrap_or(false)
}

/// Euler's totient via `N * prod(1 - 1/p)`.
pub fn euler_phi(n: u64) -> Result<u64> {
    if n < 2 {
        return invalid(format!("euler_phi requires N >= 2, got {n}"));
    }
    let f = factorize(n)?;
    Ok(f.primes().fold(n, |acc, p| acc / p * (p - 1)))
}

/// Smallest `r >= 1` with `a^r = 1`, found by descending from `phi(N)`
/// through its prime divisors.
pub fn multiplicative_order(a: Residue) -> Result<u64> {
    if !a.is_unit() {
        return invalid(format!("{a} is not invertible, so it has no order"));
    }
    let phi = euler_phi(a.modulus)?;
    let mut r = phi;
    for p in factorize(phi)?.primes() {
        while r % p == 0 && pow_mod(a.value, r / p, a.modulus) == 1 {
            r /= p;
        }
    }
    Ok(r)
}

/// Order by direct iteration of `a, a^2, ...`; only for small moduli.
pub fn multiplicative_order_naive(a: Residue) -> Result<u64> {
    if !a.is_unit() {
        return invalid(format!("{a} is not invertible, so it has no order"));
    }
    crate::error::check_bound(
        "modulus for naive order",
        a.modulus as u128,
        NAIVE_ORDER_LIMIT as u128,
    )?;
    let mut x = a.value;
    let mut r = 1;
    while x != 1 {
        x = mul_mod(x, a.value, a.modulus);
        r += 1;
    }
    Ok(r)
}

/// A fraction `numer/denom` with `denom > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Fraction {
    pub numer: i128,
    pub denom: i128,
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer, self.denom)
    }
}

/// Continued-fraction convergents of `numerator/denominator`, at most
/// `count_limit` of them. Each is in lowest terms and denominators are
/// nondecreasing.
pub fn convergents(numerator: i128, denominator: i128, count_limit: usize) -> Result<Vec<Fraction>> {
    if denominator == 0 {
        return invalid("continued fraction of x/0");
    }
    let (mut num, mut den) = if denominator < 0 {
        (-numerator, -denominator)
    } else {
        (numerator, denominator)
    };
    // p_{k-2}, p_{k-1} and q_{k-2}, q_{k-1}
    let (mut p0, mut p1) = (0i128, 1i128);
    let (mut q0, mut q1) = (1i128, 0i128);
    let mut out = Vec::new();
    while out.len() < count_limit {
        let a = Integer::div_floor(&num, &den);
        let p = a * p1 + p0;
        let q = a * q1 + q0;
        out.push(Fraction { numer: p, denom: q });
        (p0, p1, q0, q1) = (p1, p, q1, q);
        let rem = num - a * den;
        if rem == 0 {
            break;
        }
        (num, den) = (den, rem);
    }
    Ok(out)
}

/// Integer square root, `floor(sqrt(n))`.
pub fn isqrt(n: u64) -> u64 {
    n.sqrt()
}

pub fn is_perfect_square(n: u64) -> bool {
    let r = isqrt(n);
    r * r == n
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn phi_by_count(n: u64) -> u64 {
        (1..n).filter(|&a| gcd(a, n) == 1).count() as u64
    }

    #[test]
    fn egcd_examples() {
        let (g, u, v) = egcd(2i64, 13).unwrap();
        assert_eq!(g, 1);
        assert_eq!(u * 2 + v * 13, 1);
        assert_eq!(u.rem_euclid(13), 7);
        assert_eq!(egcd(21i64, 21).unwrap().0, 21);
        assert_eq!(egcd(9i64, 6).unwrap().0, 3);
        assert_eq!(egcd(-9i64, 6).unwrap().0, 3);
        assert!(egcd(0i64, 0).is_err());
    }

    #[test]
    fn egcd_bigint() {
        let a: BigInt = BigInt::from(1u8) << 200;
        let b = BigInt::from(3u8).pow(120);
        let (g, u, v) = egcd(a.clone(), b.clone()).unwrap();
        assert_eq!(g, BigInt::from(1));
        assert_eq!(u * a + v * b, g);
    }

    #[test]
    fn pow_examples() {
        let four = Residue::new(4, 9).unwrap();
        assert_eq!(mod_pow(four, 2).value(), 7);
        assert_eq!(mod_pow(four, 0).value(), 1);
        assert_eq!(mod_pow(Residue::new(2, 21).unwrap(), 6).value(), 1);
        assert_eq!(Residue::new(341, 10).unwrap().value(), 1);
        assert_eq!(Residue::from_signed(-1, 3).unwrap().value(), 2);
    }

    #[test]
    fn inverse_of_two_mod_13() {
        let inv = mod_inverse(Residue::new(2, 13).unwrap()).unwrap();
        assert_eq!(inv.value(), 7);
        assert!(mod_inverse(Residue::new(2, 6).unwrap()).is_err());
    }

    #[test]
    fn phi_examples() {
        assert_eq!(euler_phi(9).unwrap(), 6);
        assert_eq!(euler_phi(21).unwrap(), 12);
        for p in [2u64, 3, 5, 7, 97, 101] {
            assert_eq!(euler_phi(p).unwrap(), p - 1);
        }
        assert!(euler_phi(1).is_err());
        assert!(euler_phi(0).is_err());
    }

    #[test]
    fn phi_agrees_with_counting_up_to_1000() {
        for n in 2..=1000 {
            assert_eq!(euler_phi(n).unwrap(), phi_by_count(n), "N = {n}");
        }
    }

    #[test]
    fn factorization_invariants() {
        for n in 1..2000u64 {
            let f = factorize(n).unwrap();
            assert_eq!(f.value(), n);
            assert!(f.pairs().windows(2).all(|w| w[0].0 < w[1].0));
            assert!(f.pairs().iter().all(|&(p, e)| e >= 1 && is_prime(p)));
        }
    }

    #[test]
    fn order_examples() {
        assert_eq!(multiplicative_order(Residue::new(4, 9).unwrap()).unwrap(), 3);
        assert_eq!(multiplicative_order(Residue::new(1, 21).unwrap()).unwrap(), 1);
        assert_eq!(multiplicative_order(Residue::new(8, 21).unwrap()).unwrap(), 2);
        assert!(multiplicative_order(Residue::new(3, 21).unwrap()).is_err());
    }

    #[test]
    fn order_divides_phi_and_matches_iteration() {
        for n in 2..=200u64 {
            let phi = euler_phi(n).unwrap();
            for a in 1..n {
                let x = Residue::new(a, n).unwrap();
                if !x.is_unit() {
                    continue;
                }
                let r = multiplicative_order(x).unwrap();
                assert_eq!(phi % r, 0);
                assert_eq!(r, multiplicative_order_naive(x).unwrap());
            }
        }
    }

    #[test]
    fn convergent_examples() {
        let c = convergents(1, 3, 10).unwrap();
        assert_eq!(
            c,
            vec![Fraction { numer: 0, denom: 1 }, Fraction { numer: 1, denom: 3 }]
        );
        let c = convergents(355, 113, 10).unwrap();
        assert_eq!(*c.last().unwrap(), Fraction { numer: 355, denom: 113 });
        // |85/256 - 1/3| = 1/768 < 1/18, so Legendre puts 1/3 among the convergents.
        assert!((85.0f64 / 256.0 - 1.0 / 3.0).abs() < 1.0 / 18.0);
        let c = convergents(85, 256, 20).unwrap();
        assert!(c.contains(&Fraction { numer: 1, denom: 3 }));
        assert!(convergents(1, 0, 5).is_err());
    }

    #[test]
    fn convergents_are_reduced_and_monotone() {
        for den in 1..200i128 {
            for num in -50..250i128 {
                let c = convergents(num, den, 64).unwrap();
                assert!(c.windows(2).all(|w| w[0].denom <= w[1].denom));
                assert!(c.iter().all(|f| f.denom > 0 && f.numer.gcd(&f.denom) == 1));
                let last = c.last().unwrap();
                assert_eq!(last.numer * den, num * last.denom);
            }
        }
    }
}
