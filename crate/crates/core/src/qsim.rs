//! Exact state-vector simulation of the Fourier-sampling pipelines: uniform
//! superposition, oracle application, discarding a register, the Abelian QFT
//! and exact measurement distributions.
//!
//! Mixtures are kept as explicit branch lists rather than density matrices.
//! Sampling draws from a `ChaCha8Rng` seeded with
//! [`rand::SeedableRng::seed_from_u64`]; each draw consumes one uniform `f64`
//! and inverts the cumulative distribution over outcomes in index order.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftPlanner};

use crate::algebra::AbelianGroupSpec;
use crate::error::{check_bound, invalid, Error, Result};

/// Maximum number of amplitudes in any simulated register.
pub const AMPLITUDE_LIMIT: u64 = 1 << 20;

/// Largest group whose QFT is materialized as a dense matrix.
pub const QFT_MATRIX_LIMIT: u64 = 2048;

pub const NORM_TOL: f64 = 1e-9;

/// Named generator used for every seeded draw.
pub type SimRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Normalized amplitude vector over `0..dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return invalid("state needs at least one amplitude");
        }
        check_bound("amplitudes", amplitudes.len() as u128, AMPLITUDE_LIMIT as u128)?;
        let n: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (n - 1.0).abs() > NORM_TOL {
            return invalid(format!("state has squared norm {n}, expected 1"));
        }
        Ok(PureState { amplitudes })
    }

    /// Rescales to unit norm; fails on the zero vector.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let n: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if n == 0.0 {
            return invalid("cannot normalize the zero vector");
        }
        for a in &mut amplitudes {
            *a /= n;
        }
        Self::new(amplitudes)
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return invalid(format!("basis index {index} out of range for dimension {dim}"));
        }
        let mut v = vec![Complex64::zero(); dim];
        v[index] = Complex64::new(1.0, 0.0);
        Self::new(v)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn with_global_phase(&self, theta: f64) -> PureState {
        let phase = Complex64::from_polar(1.0, theta);
        PureState {
            amplitudes: self.amplitudes.iter().map(|a| a * phase).collect(),
        }
    }
}

/// One component of a mixture, stored sparsely.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub probability: f64,
    pub support: Vec<(usize, Complex64)>,
}

/// `Σ_b p_b |ψ_b⟩⟨ψ_b|` as an explicit branch list over `0..dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedState {
    dim: usize,
    branches: Vec<Branch>,
}

impl MixedState {
    pub fn new(dim: usize, branches: Vec<Branch>) -> Result<Self> {
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        if (total - 1.0).abs() > 1e-12 || branches.iter().any(|b| b.probability < 0.0) {
            return invalid(format!("branch probabilities sum to {total}"));
        }
        Ok(MixedState { dim, branches })
    }

    pub fn pure(state: &PureState) -> Self {
        MixedState {
            dim: state.dim(),
            branches: vec![Branch {
                probability: 1.0,
                support: state.amplitudes.iter().copied().enumerate().collect(),
            }],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn branch_state(&self, i: usize) -> PureState {
        let mut v = vec![Complex64::zero(); self.dim];
        for &(x, a) in &self.branches[i].support {
            v[x] = a;
        }
        PureState { amplitudes: v }
    }

    /// Index of a branch drawn with the branch probabilities.
    pub fn sample_branch<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        inverse_cdf(self.branches.iter().map(|b| b.probability), u)
    }
}

/// Which half of a `|x, f(x)⟩` register pair to trace out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Register {
    Left,
    Right,
}

/// `Σ_x α_x |x, f(x)⟩`, one term per basis index of the input.
#[derive(Debug, Clone)]
pub struct EntangledState<V> {
    left_dim: usize,
    terms: Vec<(V, Complex64)>,
}

/// `|x⟩ ↦ |x, f(x)⟩` applied to every basis component.
pub fn apply_oracle<V, F>(state: &PureState, mut f: F) -> EntangledState<V>
where
    F: FnMut(usize) -> V,
{
    EntangledState {
        left_dim: state.dim(),
        terms: state.amplitudes.iter().enumerate().map(|(x, &a)| (f(x), a)).collect(),
    }
}

impl<V: Clone + Ord> EntangledState<V> {
    pub fn left_dim(&self) -> usize {
        self.left_dim
    }

    pub fn amplitude(&self, x: usize, v: &V) -> Complex64 {
        match self.terms.get(x) {
            Some((fx, a)) if fx == v => *a,
            _ => Complex64::zero(),
        }
    }

    /// Pairs `(x, f(x))` carrying nonzero amplitude.
    pub fn support(&self) -> Vec<(usize, V)> {
        self.terms
            .iter()
            .enumerate()
            .filter(|(_, (_, a))| !a.is_zero())
            .map(|(x, (v, _))| (x, v.clone()))
            .collect()
    }

    /// Distinct right-register values, sorted.
    pub fn values(&self) -> Vec<V> {
        let mut v: Vec<V> = self.terms.iter().map(|(v, _)| v.clone()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Traces out one register. Discarding the right register yields one
    /// branch per observed value `v`, the normalized restriction of the
    /// state to `f^{-1}(v)`. Discarding the left register yields, per `x`,
    /// the basis state of `f(x)` indexed into [`Self::values`].
    pub fn discard(&self, which: Register) -> MixedState {
        match which {
            Register::Right => {
                let mut groups: BTreeMap<&V, Vec<(usize, Complex64)>> = BTreeMap::new();
                for (x, (v, a)) in self.terms.iter().enumerate() {
                    if !a.is_zero() {
                        groups.entry(v).or_default().push((x, *a));
                    }
                }
                let branches = groups
                    .into_values()
                    .map(|mut support| {
                        let w: f64 = support.iter().map(|(_, a)| a.norm_sqr()).sum();
                        let s = w.sqrt();
                        for (_, a) in &mut support {
                            *a /= s;
                        }
                        Branch {
                            probability: w,
                            support,
                        }
                    })
                    .collect();
                MixedState {
                    dim: self.left_dim,
                    branches: normalize_weights(branches),
                }
            }
            Register::Left => {
                let values = self.values();
                let mut weights: BTreeMap<usize, f64> = BTreeMap::new();
                for (v, a) in &self.terms {
                    let idx = values.binary_search(v).expect("value listed");
                    *weights.entry(idx).or_default() += a.norm_sqr();
                }
                let branches = weights
                    .into_iter()
                    .filter(|&(_, w)| w > 0.0)
                    .map(|(idx, w)| Branch {
                        probability: w,
                        support: vec![(idx, Complex64::new(1.0, 0.0))],
                    })
                    .collect();
                MixedState {
                    dim: values.len(),
                    branches: normalize_weights(branches),
                }
            }
        }
    }
}

fn normalize_weights(mut branches: Vec<Branch>) -> Vec<Branch> {
    let total: f64 = branches.iter().map(|b| b.probability).sum();
    for b in &mut branches {
        b.probability /= total;
    }
    branches
}

/// Amplitudes `1/√|G|` over every element of `G`.
pub fn uniform_superposition(g: &AbelianGroupSpec) -> Result<PureState> {
    check_bound("amplitudes", g.order() as u128, AMPLITUDE_LIMIT as u128)?;
    let n = g.order() as usize;
    let a = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    Ok(PureState {
        amplitudes: vec![a; n],
    })
}

/// Dense QFT matrix with entry `(a, x) = Ψ_a(x)/√|G|`, built as the
/// Kronecker product of the cyclic-factor transforms.
pub fn qft(g: &AbelianGroupSpec) -> Result<DMatrix<Complex64>> {
    check_bound("QFT matrix dimension", g.order() as u128, QFT_MATRIX_LIMIT as u128)?;
    let mut acc = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
    for &m in g.moduli() {
        let m = m as usize;
        let scale = 1.0 / (m as f64).sqrt();
        let factor = DMatrix::from_fn(m, m, |a, x| {
            let k = (a * x) % m;
            Complex64::from_polar(scale, 2.0 * std::f64::consts::PI * k as f64 / m as f64)
        });
        acc = acc.kronecker(&factor);
    }
    Ok(acc)
}

/// Applies the QFT over `G` axis by axis with FFTs.
pub fn qft_apply(g: &AbelianGroupSpec, state: &PureState) -> Result<PureState> {
    if state.dim() as u64 != g.order() {
        return Err(Error::Mismatch(format!(
            "state of dimension {} vs group of order {}",
            state.dim(),
            g.order()
        )));
    }
    let mut planner = FftPlanner::<f64>::new();
    let mut data = state.amplitudes.clone();
    let moduli = g.moduli();
    for axis in 0..moduli.len() {
        let m = moduli[axis] as usize;
        let stride: usize = moduli[axis + 1..].iter().map(|&x| x as usize).product();
        let outer: usize = moduli[..axis].iter().map(|&x| x as usize).product();
        // rustfft's inverse direction uses e^{+2πi kn/m}, matching Ψ.
        let fft: Arc<dyn Fft<f64>> = planner.plan_fft_inverse(m);
        let scale = 1.0 / (m as f64).sqrt();
        let mut line = vec![Complex64::zero(); m];
        for o in 0..outer {
            for s in 0..stride {
                let base = o * m * stride + s;
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + k * stride];
                }
                fft.process(&mut line);
                for (k, v) in line.iter().enumerate() {
                    data[base + k * stride] = v * scale;
                }
            }
        }
    }
    Ok(PureState { amplitudes: data })
}

/// Outcome probabilities over `0..len`.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.iter().any(|&p| p < -NORM_TOL || !p.is_finite()) {
            return invalid("negative or non-finite probability");
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORM_TOL {
            return invalid(format!("probabilities sum to {total}"));
        }
        Ok(Distribution { probs })
    }

    pub fn point_mass(len: usize, index: usize) -> Self {
        let mut probs = vec![0.0; len];
        probs[index] = 1.0;
        Distribution { probs }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob(&self, outcome: usize) -> f64 {
        self.probs.get(outcome).copied().unwrap_or(0.0)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Outcomes with probability above `tol`.
    pub fn support(&self, tol: f64) -> Vec<usize> {
        (0..self.probs.len()).filter(|&i| self.probs[i] > tol).collect()
    }

    pub fn total_variation(&self, other: &Distribution) -> f64 {
        let n = self.len().max(other.len());
        0.5 * (0..n).map(|i| (self.prob(i) - other.prob(i)).abs()).sum::<f64>()
    }

    pub fn max_abs_diff(&self, other: &Distribution) -> f64 {
        let n = self.len().max(other.len());
        (0..n).map(|i| (self.prob(i) - other.prob(i)).abs()).fold(0.0, f64::max)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        inverse_cdf(self.probs.iter().copied(), u)
    }

    /// One reproducible draw from a fresh generator seeded with `seed`.
    pub fn sample_seeded(&self, seed: u64) -> usize {
        self.sample(&mut rng_from_seed(seed))
    }
}

fn inverse_cdf(weights: impl Iterator<Item = f64>, u: f64) -> usize {
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, w) in weights.enumerate() {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        last_positive = i;
        if u < acc {
            return i;
        }
    }
    // Rounding left u beyond the accumulated total.
    last_positive
}

/// `|α_x|²` for every basis index.
pub fn measure_distribution(state: &PureState) -> Distribution {
    Distribution {
        probs: state.amplitudes.iter().map(|a| a.norm_sqr()).collect(),
    }
}

/// Mixture-weighted computational-basis distribution.
pub fn measure_mixed_distribution(state: &MixedState) -> Distribution {
    let mut probs = vec![0.0; state.dim];
    for b in &state.branches {
        for &(x, a) in &b.support {
            probs[x] += b.probability * a.norm_sqr();
        }
    }
    Distribution { probs }
}

/// Exact outcome distribution of measuring `QFT_G` applied to a mixture.
pub fn fourier_distribution(g: &AbelianGroupSpec, state: &MixedState) -> Result<Distribution> {
    let mut probs = vec![0.0; state.dim];
    for i in 0..state.branches.len() {
        let out = qft_apply(g, &state.branch_state(i))?;
        let w = state.branches[i].probability;
        for (p, a) in probs.iter_mut().zip(out.amplitudes()) {
            *p += w * a.norm_sqr();
        }
    }
    Ok(Distribution { probs })
}
