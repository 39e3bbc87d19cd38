//! Projective plane curves over `F_q`, their point counts `N_r` over
//! `F_{q^r}`, and the zeta series `Z(T) = exp(Σ N_r T^r / r)` in exact
//! rational arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::ecurve::Curve;
use crate::error::{check_bound, invalid, Result};
use crate::ffield::{FieldElement, FieldSpec, FieldTables, FIELD_ENUMERATION_LIMIT};

/// Largest number of affine points `q^{2r}` visited by [`ProjectiveCurve::count_points`].
pub const EVALUATION_LIMIT: u64 = 100_000_000;

/// Homogeneous `f(X, Y, Z) = Σ c · X^i Y^j Z^k` over a finite field.
#[derive(Debug, Clone)]
pub struct ProjectiveCurve {
    field: FieldSpec,
    terms: Vec<(FieldElement, [u32; 3])>,
    degree: u32,
}

impl ProjectiveCurve {
    pub fn new(field: FieldSpec, terms: Vec<(FieldElement, [u32; 3])>) -> Result<Self> {
        let terms: Vec<_> = terms.into_iter().filter(|(c, _)| !field.is_zero(c)).collect();
        let Some((_, e)) = terms.first() else {
            return invalid("the zero polynomial does not define a curve");
        };
        let degree = e.iter().sum();
        if terms.iter().any(|(_, e)| e.iter().sum::<u32>() != degree) {
            return invalid("polynomial is not homogeneous");
        }
        Ok(ProjectiveCurve { field, terms, degree })
    }

    /// `Z^d · f(X/Z, Y/Z)` for an affine `f(x, y)` of total degree `d`.
    pub fn from_affine(field: FieldSpec, terms: Vec<(FieldElement, [u32; 2])>) -> Result<Self> {
        let d = terms
            .iter()
            .filter(|(c, _)| !field.is_zero(c))
            .map(|(_, [i, j])| i + j)
            .max()
            .unwrap_or(0);
        let homogeneous = terms.into_iter().map(|(c, [i, j])| (c, [i, j, d - i - j])).collect();
        Self::new(field, homogeneous)
    }

    /// `Y²Z - X³ - αXZ² - βZ³`.
    pub fn weierstrass(curve: &Curve) -> Result<Self> {
        let f = curve.field();
        Self::from_affine(
            f.clone(),
            vec![
                (f.one(), [0, 2]),
                (f.neg(&f.one()), [3, 0]),
                (f.neg(curve.alpha()), [1, 0]),
                (f.neg(curve.beta()), [0, 0]),
            ],
        )
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Number of points of `P²(F_{q^r})` where `f` vanishes.
    pub fn count_points(&self, r: u32) -> Result<u64> {
        if r == 0 {
            return invalid("extension degree must be >= 1");
        }
        let base = &self.field;
        let n = base.degree() * r as usize;
        let size = (base.characteristic() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        check_bound("field size", size, FIELD_ENUMERATION_LIMIT as u128)?;
        check_bound("affine evaluations", size * size, EVALUATION_LIMIT as u128)?;
        let big = FieldSpec::new(base.characteristic(), n)?;
        let emb = big.embedding_from(base)?;
        let t = FieldTables::new(&big)?;
        let terms: Vec<(u32, [u32; 3])> = self
            .terms
            .iter()
            .map(|(c, e)| (big.index_of(&emb.apply(c)) as u32, *e))
            .collect();
        let q = t.size() as u32;
        let eval = |x: u32, y: u32, z: u32| -> bool {
            let mut acc = 0u32;
            for &(c, [i, j, k]) in &terms {
                let m = t.mul(t.mul(c, t.pow(x, i)), t.mul(t.pow(y, j), t.pow(z, k)));
                acc = t.add(acc, m);
            }
            acc == 0
        };
        let mut count = 0u64;
        for x in 0..q {
            for y in 0..q {
                count += eval(x, y, 1) as u64;
            }
            count += eval(x, 1, 0) as u64;
        }
        count += eval(1, 0, 0) as u64;
        Ok(count)
    }

    /// `N_1, ..., N_r`.
    pub fn counts(&self, r: u32) -> Result<Vec<u64>> {
        (1..=r).map(|k| self.count_points(k)).collect()
    }
}

/// `Z(T)` truncated after `T^R`; `coeffs[0] = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZetaSeries {
    coeffs: Vec<BigRational>,
}

impl ZetaSeries {
    pub fn new(coeffs: Vec<BigRational>) -> Result<Self> {
        if coeffs.first() != Some(&BigRational::one()) {
            return invalid("zeta series must start with constant coefficient 1");
        }
        Ok(ZetaSeries { coeffs })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficients as `"a"` or `"a/b"`.
    pub fn render(&self) -> Vec<String> {
        self.coeffs.iter().map(ToString::to_string).collect()
    }
}

fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `exp(Σ N_r T^r / r)` via `n z_n = Σ_{k=1}^{n} N_k z_{n-k}`.
pub fn zeta_from_counts(counts: &[u64]) -> Result<ZetaSeries> {
    if counts.is_empty() {
        return invalid("at least one count is required");
    }
    let mut z = vec![BigRational::one()];
    for n in 1..=counts.len() {
        let mut s = BigRational::zero();
        for k in 1..=n {
            s += rat(counts[k - 1]) * &z[n - k];
        }
        z.push(s / rat(n as u64));
    }
    ZetaSeries::new(z)
}

/// Inverse of [`zeta_from_counts`]: `N_n = n z_n - Σ_{k<n} N_k z_{n-k}`.
pub fn counts_from_zeta(series: &ZetaSeries) -> Vec<BigRational> {
    let z = &series.coeffs;
    let mut counts: Vec<BigRational> = Vec::new();
    for n in 1..z.len() {
        let mut s = rat(n as u64) * &z[n];
        for k in 1..n {
            s -= &counts[k - 1] * &z[n - k];
        }
        counts.push(s);
    }
    counts
}

/// `(d - 1)(d - 2) / 2`.
pub fn genus(d: u32) -> Result<u64> {
    if d == 0 {
        return invalid("degree must be >= 1");
    }
    let d = d as u64;
    Ok((d - 1) * d.saturating_sub(2) / 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e5_projective() -> ProjectiveCurve {
        ProjectiveCurve::weierstrass(&Curve::over_prime(5, 2, 1).unwrap()).unwrap()
    }

    #[test]
    fn counts_e5() {
        let c = e5_projective();
        assert_eq!(c.degree(), 3);
        assert_eq!(c.count_points(1).unwrap(), 7);
        let counts = c.counts(4).unwrap();
        assert!(counts.windows(2).all(|w| w[0] <= w[1]));
        // N_r = q^r + 1 - s_r, with s_1 = a and s_r = a s_{r-1} - q s_{r-2}.
        let q = 5i64;
        let a = q + 1 - counts[0] as i64;
        let mut s = vec![2i64, a];
        for r in 2..=4 {
            s.push(a * s[r - 1] - q * s[r - 2]);
        }
        for r in 1..=4 {
            assert_eq!(counts[r - 1] as i64, q.pow(r as u32) + 1 - s[r]);
        }
    }

    #[test]
    fn line_counts() {
        for (p, n) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
            let f = FieldSpec::new(p, n).unwrap();
            let line = ProjectiveCurve::new(f.clone(), vec![(f.one(), [1, 0, 0])]).unwrap();
            let q = f.size();
            for r in 1..=3u32 {
                if q.pow(2 * r) > 1_000_000 {
                    continue;
                }
                assert_eq!(line.count_points(r).unwrap(), q.pow(r) + 1);
            }
        }
    }

    #[test]
    fn degenerate_inputs() {
        let f = FieldSpec::prime(3).unwrap();
        assert!(ProjectiveCurve::new(f.clone(), vec![(f.zero(), [1, 1, 1])]).is_err());
        assert!(ProjectiveCurve::new(f.clone(), vec![(f.one(), [1, 1, 0]), (f.one(), [1, 0, 0])]).is_err());
        // XYZ: the three coordinate lines meet in 3 points, so 3(q+1) - 3.
        let xyz = ProjectiveCurve::new(f.clone(), vec![(f.one(), [1, 1, 1])]).unwrap();
        assert_eq!(xyz.count_points(1).unwrap(), 3 * 4 - 3);
    }

    #[test]
    fn zeta_examples() {
        let z = zeta_from_counts(&[0, 0, 0]).unwrap();
        assert!(z.coeffs()[1..].iter().all(Zero::is_zero));
        // Line over F_q: 1/((1-T)(1-qT)) = Σ (q^{n+1}-1)/(q-1) T^n.
        let q = 3u64;
        let z = zeta_from_counts(&[q + 1, q * q + 1, q.pow(3) + 1, q.pow(4) + 1]).unwrap();
        for (n, c) in z.coeffs().iter().enumerate() {
            assert_eq!(*c, rat((q.pow(n as u32 + 1) - 1) / (q - 1)));
        }
        let counts = e5_projective().counts(4).unwrap();
        let z = zeta_from_counts(&counts).unwrap();
        let back: Vec<BigRational> = counts.iter().map(|&n| rat(n)).collect();
        assert_eq!(counts_from_zeta(&z), back);
    }

    #[test]
    fn genus_formula() {
        assert_eq!(genus(3).unwrap(), 1);
        assert_eq!(genus(1).unwrap(), 0);
        assert_eq!(genus(4).unwrap(), 3);
        assert!(genus(0).is_err());
    }

    #[test]
    fn extension_base_field() {
        let f4 = FieldSpec::new(2, 2).unwrap();
        let conic = ProjectiveCurve::new(
            f4.clone(),
            vec![(f4.one(), [2, 0, 0]), (f4.generator(), [0, 1, 1])],
        )
        .unwrap();
        // A smooth conic over F_4 has q + 1 points.
        assert_eq!(conic.count_points(1).unwrap(), 5);
        assert_eq!(conic.count_points(2).unwrap(), 17);
    }
}
