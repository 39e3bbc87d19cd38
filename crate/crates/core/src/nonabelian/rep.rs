use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::FiniteGroup;
use crate::error::{invalid, Result};
use crate::qsim::Distribution;

/// Numerical tolerance for homomorphism and unitarity checks.
pub const REP_TOL: f64 = 1e-9;

type CMat = DMatrix<Complex64>;

/// Matrices `ρ(x)` for every element index `x` of a [`FiniteGroup`].
#[derive(Debug, Clone)]
pub struct Representation {
    pub label: String,
    pub matrices: Vec<CMat>,
}

impl Representation {
    pub fn dim(&self) -> usize {
        self.matrices.first().map_or(0, |m| m.nrows())
    }

    /// Largest entry of `ρ(x)ρ(y) - ρ(xy)` over all pairs.
    pub fn homomorphism_error(&self, g: &FiniteGroup) -> f64 {
        let n = g.order();
        let mut worst = 0.0f64;
        for x in 0..n {
            for y in 0..n {
                let d = &self.matrices[x] * &self.matrices[y] - &self.matrices[g.product(x, y)];
                worst = worst.max(max_abs(&d));
            }
        }
        worst
    }

    pub fn unitarity_error(&self) -> f64 {
        let id = CMat::identity(self.dim(), self.dim());
        self.matrices
            .iter()
            .map(|m| max_abs(&(m * m.adjoint() - &id)))
            .fold(0.0, f64::max)
    }

    pub fn is_faithful(&self) -> bool {
        let n = self.matrices.len();
        (0..n).all(|i| (i + 1..n).all(|j| max_abs(&(&self.matrices[i] - &self.matrices[j])) > REP_TOL))
    }

    pub fn is_valid(&self, g: &FiniteGroup) -> bool {
        self.matrices.len() == g.order()
            && self.homomorphism_error(g) <= REP_TOL
            && self.unitarity_error() <= REP_TOL
            && max_abs(&(&self.matrices[g.identity_index()] - CMat::identity(self.dim(), self.dim())))
                <= REP_TOL
    }
}

pub(crate) fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// A list of irreducible representations of one group.
#[derive(Debug, Clone)]
pub struct IrrepSet {
    pub irreps: Vec<Representation>,
}

impl IrrepSet {
    pub fn dims(&self) -> Vec<usize> {
        self.irreps.iter().map(Representation::dim).collect()
    }

    /// `Σ d_ρ²`.
    pub fn plancherel_sum(&self) -> usize {
        self.dims().iter().map(|d| d * d).sum()
    }

    pub fn labels(&self) -> Vec<String> {
        self.irreps.iter().map(|r| r.label.clone()).collect()
    }
}

fn phase(k: i64, n: u64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (k.rem_euclid(n as i64)) as f64 / n as f64)
}

fn scalar(z: Complex64) -> CMat {
    CMat::from_element(1, 1, z)
}

/// `diag(ω^{hl}, ω^{-hl}) · T^k` with `T` the swap, for `A^l B^k` or `(l, k)`.
fn two_dim(h: i64, n: u64, l: u64, k: u64) -> CMat {
    let d = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
        phase(h * l as i64, n),
        phase(-h * (l as i64), n),
    ]));
    if k == 0 {
        d
    } else {
        let t = CMat::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0].map(|x| Complex64::new(x, 0.0)));
        d * t
    }
}

fn dihedral_coords(n: u64) -> impl Iterator<Item = (u64, u64)> {
    (0..2).flat_map(move |k| (0..n).map(move |l| (l, k)))
}

/// Complete irreducible representations of `D_n` (element `k·n + l`):
/// trivial, sign, two more characters for even `n`, and the 2-dimensional
/// `ρ_h` for `h = 1..⌈n/2⌉-1` with rotation diagonal and reflection swap.
pub fn dihedral_irreps(n: u64) -> Result<IrrepSet> {
    if n < 3 {
        return invalid(format!("dihedral group needs n >= 3, got {n}"));
    }
    let one_dim = |label: &str, chi: &dyn Fn(u64, u64) -> f64| Representation {
        label: label.into(),
        matrices: dihedral_coords(n)
            .map(|(l, k)| scalar(Complex64::new(chi(l, k), 0.0)))
            .collect(),
    };
    let sgn = |e: u64| if e.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut irreps = vec![one_dim("trivial", &|_, _| 1.0), one_dim("sign", &|_, k| sgn(k))];
    if n.is_multiple_of(2) {
        irreps.push(one_dim("alt", &|l, _| sgn(l)));
        irreps.push(one_dim("alt_sign", &|l, k| sgn(l + k)));
    }
    for h in 1..n.div_ceil(2) {
        irreps.push(Representation {
            label: format!("rho_{h}"),
            matrices: dihedral_coords(n).map(|(l, k)| two_dim(h as i64, n, l, k)).collect(),
        });
    }
    Ok(IrrepSet { irreps })
}

/// Irreps of the exercise group: trivial, sign and the faithful
/// `ρ(A) = diag(e^{2πi/3}, e^{-2πi/3})`, `ρ(B) = swap`.
pub fn exercise_irreps() -> IrrepSet {
    let mut set = dihedral_irreps(3).expect("n = 3 is valid");
    set.irreps[2].label = "rho".into();
    set
}

/// The characters `x ↦ e^{2πi a x / n}` of `Z/n`.
pub fn cyclic_irreps(n: usize) -> IrrepSet {
    IrrepSet {
        irreps: (0..n)
            .map(|a| Representation {
                label: format!("chi_{a}"),
                matrices: (0..n).map(|x| scalar(phase((a * x) as i64, n as u64))).collect(),
            })
            .collect(),
    }
}

pub fn direct_sum(a: &Representation, b: &Representation) -> Representation {
    let (da, db) = (a.dim(), b.dim());
    Representation {
        label: format!("{}+{}", a.label, b.label),
        matrices: a
            .matrices
            .iter()
            .zip(&b.matrices)
            .map(|(x, y)| {
                let mut m = CMat::zeros(da + db, da + db);
                m.view_mut((0, 0), (da, da)).copy_from(x);
                m.view_mut((da, da), (db, db)).copy_from(y);
                m
            })
            .collect(),
    }
}

pub fn tensor(a: &Representation, b: &Representation) -> Representation {
    Representation {
        label: format!("{}*{}", a.label, b.label),
        matrices: a.matrices.iter().zip(&b.matrices).map(|(x, y)| x.kronecker(y)).collect(),
    }
}

/// Largest deviation from `(d_ρ/|G|) Σ_x ρ(x)_{jk} conj(ρ'(x)_{j'k'}) = δδδ`.
pub fn schur_orthogonality_error(g: &FiniteGroup, set: &IrrepSet) -> f64 {
    let n = g.order() as f64;
    let mut worst = 0.0f64;
    for (ri, r) in set.irreps.iter().enumerate() {
        for (si, s) in set.irreps.iter().enumerate() {
            for j in 0..r.dim() {
                for k in 0..r.dim() {
                    for j2 in 0..s.dim() {
                        for k2 in 0..s.dim() {
                            let sum: Complex64 = (0..g.order())
                                .map(|x| r.matrices[x][(j, k)] * s.matrices[x][(j2, k2)].conj())
                                .sum();
                            let got = sum * (r.dim() as f64 / n);
                            let want = if ri == si && j == j2 && k == k2 { 1.0 } else { 0.0 };
                            worst = worst.max((got - Complex64::new(want, 0.0)).norm());
                        }
                    }
                }
            }
        }
    }
    worst
}

/// `|G|×|G|` matrix with rows `(ρ, j, k)` in irrep order and row-major
/// `(j, k)`, columns `x`, entries `√(d_ρ/|G|) ρ(x)_{jk}`.
pub fn qft_nonabelian(g: &FiniteGroup, set: &IrrepSet) -> Result<CMat> {
    let n = g.order();
    if set.plancherel_sum() != n {
        return invalid(format!(
            "irrep set is incomplete: Σ d² = {} but |G| = {n}",
            set.plancherel_sum()
        ));
    }
    if set.irreps.iter().any(|r| r.matrices.len() != n) {
        return invalid("irrep matrices do not cover the group");
    }
    let mut f = CMat::zeros(n, n);
    let mut row = 0;
    for r in &set.irreps {
        let d = r.dim();
        let scale = (d as f64 / n as f64).sqrt();
        for j in 0..d {
            for k in 0..d {
                for x in 0..n {
                    f[(row, x)] = r.matrices[x][(j, k)] * scale;
                }
                row += 1;
            }
        }
    }
    Ok(f)
}

/// Distribution of the irrep label after the QFT of the uniform mixture of
/// left-coset states `|xH⟩`.
pub fn weak_sampling_distribution(g: &FiniteGroup, set: &IrrepSet, h: &[usize]) -> Result<Distribution> {
    if !g.is_subgroup(h) {
        return invalid("H is not a subgroup");
    }
    let f = qft_nonabelian(g, set)?;
    let cosets = g.left_cosets(h);
    let amp = 1.0 / (h.len() as f64).sqrt();
    let mut probs = vec![0.0; set.irreps.len()];
    for c in &cosets {
        let mut v = nalgebra::DVector::<Complex64>::zeros(g.order());
        for &x in c {
            v[x] = Complex64::new(amp, 0.0);
        }
        let out = &f * v;
        let mut row = 0;
        for (i, r) in set.irreps.iter().enumerate() {
            for _ in 0..r.dim() * r.dim() {
                probs[i] += out[row].norm_sqr() / cosets.len() as f64;
                row += 1;
            }
        }
    }
    Distribution::new(probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AbelianGroupSpec;
    use crate::nonabelian::{cyclic_group, dihedral_group, exercise_group};

    fn unitarity(f: &CMat) -> f64 {
        max_abs(&(f * f.adjoint() - CMat::identity(f.nrows(), f.nrows())))
    }

    #[test]
    fn dihedral_irrep_dims() {
        assert_eq!(dihedral_irreps(3).unwrap().dims(), vec![1, 1, 2]);
        assert_eq!(dihedral_irreps(4).unwrap().dims(), vec![1, 1, 1, 1, 2]);
        for n in 3..=12 {
            let g = dihedral_group(n).unwrap();
            let set = dihedral_irreps(n).unwrap();
            assert_eq!(set.plancherel_sum(), 2 * n as usize);
            for r in &set.irreps {
                assert!(r.is_valid(&g), "n={n} {}", r.label);
            }
            assert!(set.irreps[0].matrices.iter().all(|m| m[(0, 0)] == Complex64::new(1.0, 0.0)));
        }
    }

    #[test]
    fn schur_orthogonality() {
        for n in 3..=8 {
            let g = dihedral_group(n).unwrap();
            assert!(schur_orthogonality_error(&g, &dihedral_irreps(n).unwrap()) < REP_TOL);
        }
    }

    #[test]
    fn qft_unitary() {
        for n in 3..=8 {
            let g = dihedral_group(n).unwrap();
            let f = qft_nonabelian(&g, &dihedral_irreps(n).unwrap()).unwrap();
            assert!(unitarity(&f) < REP_TOL);
        }
        let g = exercise_group().unwrap();
        let set = exercise_irreps();
        assert!(set.irreps[2].is_faithful());
        let f = qft_nonabelian(&g, &set).unwrap();
        assert!(unitarity(&f) < REP_TOL);
        let d3 = qft_nonabelian(&dihedral_group(3).unwrap(), &dihedral_irreps(3).unwrap()).unwrap();
        assert!(max_abs(&(f - d3)) < REP_TOL);
        let mut partial = dihedral_irreps(4).unwrap();
        partial.irreps.pop();
        assert!(qft_nonabelian(&dihedral_group(4).unwrap(), &partial).is_err());
    }

    #[test]
    fn abelian_case_matches_qsim() {
        for n in [2usize, 5, 6] {
            let f = qft_nonabelian(&cyclic_group(n).unwrap(), &cyclic_irreps(n)).unwrap();
            let q = crate::qsim::qft(&AbelianGroupSpec::cyclic(n as u64).unwrap()).unwrap();
            assert!(max_abs(&(f - q)) < 1e-12);
        }
    }

    #[test]
    fn sums_and_products() {
        let g = dihedral_group(5).unwrap();
        let set = dihedral_irreps(5).unwrap();
        for a in &set.irreps {
            for b in &set.irreps {
                let s = direct_sum(a, b);
                let t = tensor(a, b);
                assert_eq!(s.dim(), a.dim() + b.dim());
                assert_eq!(t.dim(), a.dim() * b.dim());
                assert!(s.is_valid(&g) && t.is_valid(&g));
            }
        }
    }

    #[test]
    fn weak_sampling_examples() {
        let g = dihedral_group(4).unwrap();
        let set = dihedral_irreps(4).unwrap();
        let d = weak_sampling_distribution(&g, &set, &[g.identity_index()]).unwrap();
        for (i, r) in set.irreps.iter().enumerate() {
            assert!((d.prob(i) - (r.dim() * r.dim()) as f64 / 8.0).abs() < 1e-12);
        }
        let all: Vec<usize> = (0..8).collect();
        let d = weak_sampling_distribution(&g, &set, &all).unwrap();
        assert!((d.prob(0) - 1.0).abs() < 1e-12);
        // {e, (0,1)} and {e, (2,1)} are conjugate.
        let h1 = g.generate(&[4]);
        let h2 = g.generate(&[6]);
        assert_eq!(g.conjugate(&h1, 1), h2);
        let d1 = weak_sampling_distribution(&g, &set, &h1).unwrap();
        let d2 = weak_sampling_distribution(&g, &set, &h2).unwrap();
        assert!(d1.max_abs_diff(&d2) < 1e-12);
    }
}
