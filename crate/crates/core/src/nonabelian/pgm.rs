use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;

use super::rep::max_abs;
use super::{Dihedral, Group};
use crate::error::{invalid, Result};

/// Eigenvalues at or below this are treated as zero.
pub const SUPPORT_CUTOFF: f64 = 1e-10;

const HERMITIAN_TOL: f64 = 1e-9;

type CMat = DMatrix<Complex64>;

/// `(w_i, ρ_i)` pairs: prior weights and density operators.
pub type Ensemble = Vec<(f64, CMat)>;

#[derive(Debug, Clone)]
pub struct Povm {
    pub elements: Vec<CMat>,
    /// Projector onto the support of `S = Σ w_i ρ_i`.
    pub support: CMat,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PovmCheck {
    pub min_eigenvalue: f64,
    pub completeness_error: f64,
}

impl PovmCheck {
    pub fn is_valid(&self, tol: f64) -> bool {
        self.min_eigenvalue >= -tol && self.completeness_error <= tol
    }
}

impl Povm {
    /// Smallest eigenvalue over all `Π_i` and `|ΣΠ_i - P_S|`.
    pub fn check(&self) -> PovmCheck {
        let dim = self.support.nrows();
        let mut min_eigenvalue = f64::INFINITY;
        let mut total = CMat::zeros(dim, dim);
        for p in &self.elements {
            let h = hermitize(p);
            let eig = SymmetricEigen::new(h.clone());
            min_eigenvalue = min_eigenvalue.min(eig.eigenvalues.min());
            total += h;
        }
        PovmCheck {
            min_eigenvalue,
            completeness_error: max_abs(&(total - &self.support)),
        }
    }
}

fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

fn validate(ensemble: &[(f64, CMat)]) -> Result<usize> {
    let Some((_, first)) = ensemble.first() else {
        return invalid("ensemble is empty");
    };
    let dim = first.nrows();
    for (i, (w, rho)) in ensemble.iter().enumerate() {
        if !(w.is_finite() && *w >= 0.0) {
            return invalid(format!("weight {i} is not a nonnegative number"));
        }
        if rho.nrows() != dim || rho.ncols() != dim {
            return invalid(format!("operator {i} is not {dim}x{dim}"));
        }
        if max_abs(&(rho - rho.adjoint())) > HERMITIAN_TOL {
            return invalid(format!("operator {i} is not Hermitian"));
        }
    }
    Ok(dim)
}

/// `Π_i = S^{-1/2} w_i ρ_i S^{-1/2}` with `S = Σ w_j ρ_j`, the inverse
/// square root taken on the support of `S`.
pub fn pgm(ensemble: &[(f64, CMat)]) -> Result<Povm> {
    let dim = validate(ensemble)?;
    let mut s = CMat::zeros(dim, dim);
    for (w, rho) in ensemble {
        s += rho.scale(*w);
    }
    let eig = SymmetricEigen::new(hermitize(&s));
    let v = &eig.eigenvectors;
    let mut inv_sqrt = CMat::zeros(dim, dim);
    let mut support = CMat::zeros(dim, dim);
    for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda > SUPPORT_CUTOFF {
            let col = v.column(j);
            let outer = col * col.adjoint();
            inv_sqrt += outer.scale(1.0 / lambda.sqrt());
            support += outer;
        }
    }
    let elements = ensemble
        .iter()
        .map(|(w, rho)| &inv_sqrt * rho.scale(*w) * &inv_sqrt)
        .collect();
    Ok(Povm { elements, support })
}

/// `Σ w_i tr(Π_i ρ_i)`.
pub fn pgm_success(ensemble: &[(f64, CMat)]) -> Result<f64> {
    let povm = pgm(ensemble)?;
    Ok(ensemble
        .iter()
        .zip(&povm.elements)
        .map(|((w, rho), p)| w * (p * rho).trace().re)
        .sum())
}

fn random_density<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> CMat {
    let a = CMat::from_fn(dim, rank, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let rho = &a * a.adjoint();
    let t = rho.trace().re;
    rho.unscale(t)
}

/// `count` density operators of random rank with random normalized priors.
pub fn random_ensemble<R: Rng + ?Sized>(dim: usize, count: usize, rng: &mut R) -> Result<Ensemble> {
    if dim == 0 || count == 0 {
        return invalid("dimension and count must be positive");
    }
    let weights: Vec<f64> = (0..count).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    Ok(weights
        .into_iter()
        .map(|w| {
            let rank = rng.gen_range(1..=dim);
            (w / total, random_density(dim, rank, rng))
        })
        .collect())
}

/// Coset states of `H_s = {(0,0), (s,1)}` in `C[D_n]`, averaged over the
/// `n` left cosets; one equally weighted state per shift `s`.
pub fn hidden_shift_coset_ensemble(n: u64) -> Result<Ensemble> {
    let g = Dihedral::new(n)?;
    let dim = 2 * n as usize;
    let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut out = Vec::with_capacity(n as usize);
    for s in 0..n {
        let h = g.elem(s as i64, 1);
        let mut rho = CMat::zeros(dim, dim);
        for l in 0..n {
            let x = g.elem(l as i64, 0);
            let y = g.mul(&x, &h);
            let mut psi = DMatrix::<Complex64>::zeros(dim, 1);
            psi[(g.index(&x), 0)] = amp;
            psi[(g.index(&y), 0)] = amp;
            rho += &psi * psi.adjoint();
        }
        out.push((1.0 / n as f64, rho.unscale(n as f64)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::rng_from_seed;

    fn pure(v: &[Complex64]) -> CMat {
        let psi = DMatrix::from_column_slice(v.len(), 1, v);
        &psi * psi.adjoint()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn orthogonal_ensemble_is_perfect() {
        let e: Ensemble = (0..3)
            .map(|i| {
                let mut v = vec![c(0.0); 4];
                v[i] = c(1.0);
                (1.0 / 3.0, pure(&v))
            })
            .collect();
        assert!((pgm_success(&e).unwrap() - 1.0).abs() < 1e-12);
        assert!(pgm(&e).unwrap().check().is_valid(1e-9));
    }

    #[test]
    fn single_state_gives_support_projector() {
        let rho = pure(&[c(0.6), c(0.8), c(0.0)]);
        let povm = pgm(&[(1.0, rho.clone())]).unwrap();
        assert!(max_abs(&(&povm.elements[0] - &rho)) < 1e-12);
    }

    #[test]
    fn two_pure_states() {
        // Equal priors: success (1 + sqrt(1 - |<a|b>|²)) / 2.
        for theta in [0.1f64, 0.5, 1.0, 1.4] {
            let a = pure(&[c(1.0), c(0.0)]);
            let b = pure(&[c(theta.cos()), c(theta.sin())]);
            let got = pgm_success(&[(0.5, a), (0.5, b)]).unwrap();
            let ov = theta.cos().powi(2);
            assert!((got - (1.0 + (1.0 - ov).sqrt()) / 2.0).abs() < 1e-12, "{theta}: {got}");
        }
    }

    #[test]
    fn random_ensembles_are_valid() {
        let mut rng = rng_from_seed(5);
        for dim in 1..=6 {
            let e = random_ensemble(dim, 3, &mut rng).unwrap();
            let check = pgm(&e).unwrap().check();
            assert!(check.is_valid(1e-9), "{check:?}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        let m = CMat::from_row_slice(2, 2, &[c(1.0), c(1.0), c(0.0), c(0.0)]);
        assert!(pgm(&[(1.0, m)]).is_err());
        assert!(pgm(&[]).is_err());
        assert!(pgm(&[(1.0, CMat::identity(2, 2)), (1.0, CMat::identity(3, 3))]).is_err());
    }

    #[test]
    fn hidden_shift_ensemble() {
        let e = hidden_shift_coset_ensemble(5).unwrap();
        for (_, rho) in &e {
            assert!((rho.trace().re - 1.0).abs() < 1e-12);
        }
        let p = pgm_success(&e).unwrap();
        assert!(p > 1.0 / 5.0 && p <= 1.0 + 1e-9);
        assert!(pgm(&e).unwrap().check().is_valid(1e-9));
    }
}
