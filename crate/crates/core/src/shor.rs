//! End-to-end quantum pipelines simulated on [`crate::qsim`]: period finding,
//! factoring, discrete logarithms, the Abelian hidden subgroup problem,
//! periods over the integers and decomposition of encoded Abelian groups.
//!
//! Every pipeline prepares a uniform superposition, applies the oracle,
//! discards the value register, Fourier transforms and samples. Classical
//! post-processing always finishes with an exact verification, so a
//! returned answer is correct or the call fails with an error.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::Rng;
use serde::Serialize;

use crate::algebra::{
    smith_normal_form, subgroup_from_character_samples, AbelianGroupSpec, Character, GroupElement,
    IntMatrix, Subgroup,
};
use crate::error::{check_bound, invalid, Error, Result};
use crate::numtheory::{convergents, egcd, factorize, gcd, is_prime, lcm, mod_inverse, pow_mod, Residue};
use crate::qsim::{
    apply_oracle, fourier_distribution, measure_distribution, qft_apply, uniform_superposition,
    Distribution, MixedState, Register, AMPLITUDE_LIMIT,
};

/// Extra samples beyond `ceil(log2 |G|)` before a stable candidate is accepted.
pub const SAMPLE_MARGIN: usize = 4;

/// Cached per-branch distributions are dropped beyond this many amplitudes.
const CACHE_AMPLITUDES: usize = 1 << 24;

pub fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// Fewest rounds any budget allows; `4·log₂|G|` alone is too tight for
/// groups of order 2 or 4.
pub const MIN_ROUNDS: usize = 20;

/// Default round budget for a group of order `n`.
pub fn round_budget(n: u64) -> usize {
    let l = ceil_log2(n) as usize;
    (4 * l).max(MIN_ROUNDS)
}

/// Fourier samples of the coset mixture left after discarding `F`'s value
/// register. Each draw picks a coset branch, then a character from that
/// branch's exact output distribution.
pub struct FourierSampler {
    group: AbelianGroupSpec,
    state: MixedState,
    cache: HashMap<usize, Distribution>,
}

impl FourierSampler {
    pub fn new<V, F>(group: &AbelianGroupSpec, f: F) -> Result<Self>
    where
        V: Clone + Ord,
        F: FnMut(usize) -> V,
    {
        let psi = uniform_superposition(group)?;
        let state = apply_oracle(&psi, f).discard(Register::Right);
        Ok(FourierSampler {
            group: group.clone(),
            state,
            cache: HashMap::new(),
        })
    }

    pub fn group(&self) -> &AbelianGroupSpec {
        &self.group
    }

    pub fn coset_count(&self) -> usize {
        self.state.branches().len()
    }

    /// Exact distribution of the measured character index.
    pub fn exact_distribution(&self) -> Result<Distribution> {
        fourier_distribution(&self.group, &self.state)
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<usize> {
        let b = self.state.sample_branch(rng);
        if let Some(d) = self.cache.get(&b) {
            return Ok(d.sample(rng));
        }
        let d = measure_distribution(&qft_apply(&self.group, &self.state.branch_state(b))?);
        let out = d.sample(rng);
        if (self.cache.len() + 1) * self.state.dim() <= CACHE_AMPLITUDES {
            self.cache.insert(b, d);
        }
        Ok(out)
    }
}

/// A function on `Z/N` promised (optionally) to have period `r | N`.
pub struct PeriodicOracle<'a> {
    domain: u64,
    f: Box<dyn Fn(u64) -> u64 + 'a>,
    promised_period: Option<u64>,
}

impl<'a> PeriodicOracle<'a> {
    pub fn new(domain: u64, f: impl Fn(u64) -> u64 + 'a) -> Result<Self> {
        if domain == 0 {
            return invalid("domain size must be positive");
        }
        check_bound("amplitudes", domain as u128, AMPLITUDE_LIMIT as u128)?;
        Ok(PeriodicOracle {
            domain,
            f: Box::new(f),
            promised_period: None,
        })
    }

    /// Records the promised period; it must divide the domain size.
    pub fn with_promise(mut self, r: u64) -> Result<Self> {
        if r == 0 || !self.domain.is_multiple_of(r) {
            return Err(Error::PromiseViolation(format!(
                "promised period {r} does not divide N = {}",
                self.domain
            )));
        }
        self.promised_period = Some(r);
        Ok(self)
    }

    pub fn domain(&self) -> u64 {
        self.domain
    }

    pub fn eval(&self, x: u64) -> u64 {
        (self.f)(x)
    }

    fn sampler(&self) -> Result<FourierSampler> {
        FourierSampler::new(&AbelianGroupSpec::cyclic(self.domain)?, |x| self.eval(x as u64))
    }

    fn is_period(&self, c: u64) -> bool {
        let n = self.domain;
        (0..n).all(|x| self.eval(x) == self.eval((x + c) % n))
    }
}

/// Exact outcome distribution of one period-finding round.
pub fn period_distribution(oracle: &PeriodicOracle) -> Result<Distribution> {
    if oracle.domain == 1 {
        return Ok(Distribution::point_mass(1, 0));
    }
    oracle.sampler()?.exact_distribution()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeriodReport {
    pub period: u64,
    pub samples: Vec<u64>,
}

/// Period of `f` on `Z/N` from gcd-accumulated Fourier samples.
pub fn find_period<R: Rng + ?Sized>(
    oracle: &PeriodicOracle,
    max_rounds: usize,
    rng: &mut R,
) -> Result<PeriodReport> {
    let n = oracle.domain;
    if n == 1 {
        return Ok(PeriodReport {
            period: 1,
            samples: vec![0],
        });
    }
    let mut sampler = oracle.sampler()?;
    let mut acc = 0u64;
    let mut samples = Vec::new();
    while samples.len() < max_rounds.max(1) {
        let s = sampler.sample(rng)? as u64;
        samples.push(s);
        if let Some(r) = oracle.promised_period {
            if !s.is_multiple_of(n / r) {
                return Err(Error::PromiseViolation(format!(
                    "outcome {s} is not a multiple of N/r = {}",
                    n / r
                )));
            }
        }
        acc = gcd(acc, s);
        let candidate = n / gcd(acc, n);
        if oracle.eval(0) == oracle.eval(candidate % n) && oracle.is_period(candidate) {
            return Ok(PeriodReport {
                period: candidate,
                samples,
            });
        }
    }
    if let Some(r) = oracle.promised_period {
        if !oracle.is_period(r) {
            return Err(Error::PromiseViolation(format!("f is not {r}-periodic")));
        }
    }
    Err(Error::BudgetExhausted {
        rounds: samples.len(),
        reason: "sampled outcomes never pinned down a period".into(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntegerPeriodReport {
    pub period: u64,
    pub register_size: u64,
    pub samples: Vec<u64>,
}

/// Period `p <= bound` of a function on the nonnegative integers, found on
/// a register of size `Q = 2^t >= bound²` with continued fractions.
pub fn hidden_period_over_z<V, F, R>(f: F, bound: u64, rng: &mut R) -> Result<IntegerPeriodReport>
where
    V: Clone + Ord,
    F: Fn(u64) -> V,
    R: Rng + ?Sized,
{
    if bound == 0 {
        return invalid("period bound must be positive");
    }
    let t = ceil_log2((bound as u128 * bound as u128).min(u64::MAX as u128) as u64).max(1);
    check_bound("amplitudes", 1u128 << t, AMPLITUDE_LIMIT as u128)?;
    let q = 1u64 << t;
    let group = AbelianGroupSpec::cyclic(q)?;
    let values: Vec<V> = (0..q).map(&f).collect();
    let f0 = values[0].clone();
    let mut sampler = FourierSampler::new(&group, |x| values[x].clone())?;
    let holds = |c: u64| -> bool {
        if c < q {
            values[c as usize] == f0
        } else {
            f(c) == f0
        }
    };
    let budget = round_budget(q);
    // Every lcm of sampled denominators that stays within the bound; a
    // stray sample cannot poison the others.
    let mut candidates: BTreeSet<u64> = BTreeSet::from([1]);
    let mut samples = Vec::new();
    while samples.len() < budget {
        let s = sampler.sample(rng)? as u64;
        samples.push(s);
        let denom = convergents(s as i128, q as i128, 128)?
            .into_iter().rfind(|c| c.denom as u128 <= bound as u128)
            .map(|c| c.denom as u64)
            .unwrap_or(1);
        let fresh: Vec<u64> = candidates
            .iter()
            .map(|&c| lcm(c, denom))
            .filter(|&c| c <= bound && !candidates.contains(&c))
            .collect();
        candidates.extend(fresh);
        if let Some(&c) = candidates.iter().find(|&&c| holds(c)) {
            // Strip prime factors that are not needed for periodicity.
            let mut p = c;
            for prime in factorize(c.max(2))?.primes().collect::<Vec<_>>() {
                while p % prime == 0 && holds(p / prime) {
                    p /= prime;
                }
            }
            return Ok(IntegerPeriodReport {
                period: p,
                register_size: q,
                samples,
            });
        }
    }
    Err(Error::BudgetExhausted {
        rounds: samples.len(),
        reason: format!("no period <= {bound} verified"),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AttemptOutcome {
    /// `gcd(a, N) > 1` already gave a factor.
    SharedFactor,
    /// The order was odd.
    OddOrder,
    /// `a^{r/2} ≡ -1 (mod N)`.
    MinusOne,
    Factor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorAttempt {
    pub a: u64,
    pub order: Option<u64>,
    pub factor: Option<u64>,
    pub outcome: AttemptOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorReport {
    pub n: u64,
    pub factor: u64,
    pub cofactor: u64,
    pub attempts: Vec<FactorAttempt>,
}

/// Rejects inputs outside the reach of the order-finding reduction.
pub fn check_factorable(n: u64) -> Result<()> {
    if n < 3 {
        return invalid(format!("{n} has no nontrivial factorization to find"));
    }
    if n.is_multiple_of(2) {
        return invalid(format!("{n} is even; 2 is a factor"));
    }
    if is_prime(n) {
        return invalid(format!("{n} is prime"));
    }
    let f = factorize(n)?;
    if f.is_prime_power() {
        let (p, k) = f.pairs()[0];
        return invalid(format!("{n} = {p}^{k} is a prime power"));
    }
    Ok(())
}

/// One pass of the reduction for a fixed base `a`.
pub fn miller_attempt<R: Rng + ?Sized>(n: u64, a: u64, rng: &mut R) -> Result<FactorAttempt> {
    let a = a % n;
    let d = gcd(a, n);
    if d > 1 {
        return Ok(FactorAttempt {
            a,
            order: None,
            factor: (d < n).then_some(d),
            outcome: AttemptOutcome::SharedFactor,
        });
    }
    let r = hidden_period_over_z(|x| pow_mod(a, x, n), n, rng)?.period;
    if r % 2 == 1 {
        return Ok(FactorAttempt {
            a,
            order: Some(r),
            factor: None,
            outcome: AttemptOutcome::OddOrder,
        });
    }
    let y = pow_mod(a, r / 2, n);
    if y == n - 1 {
        return Ok(FactorAttempt {
            a,
            order: Some(r),
            factor: None,
            outcome: AttemptOutcome::MinusOne,
        });
    }
    let d = gcd((y + n - 1) % n, n);
    if d <= 1 || d >= n {
        return Err(Error::VerificationFailed(format!(
            "gcd(a^(r/2) - 1, N) = {d} for a = {a}, r = {r}"
        )));
    }
    Ok(FactorAttempt {
        a,
        order: Some(r),
        factor: Some(d),
        outcome: AttemptOutcome::Factor,
    })
}

/// A nontrivial factor of an odd composite `n` that is not a prime power.
/// `first_base`, when given, is tried before random bases.
pub fn miller_factor<R: Rng + ?Sized>(
    n: u64,
    first_base: Option<u64>,
    max_attempts: usize,
    rng: &mut R,
) -> Result<FactorReport> {
    check_factorable(n)?;
    let mut attempts = Vec::new();
    for i in 0..max_attempts.max(1) {
        let a = match (i, first_base) {
            (0, Some(a)) => a,
            _ => rng.gen_range(2..n),
        };
        let attempt = miller_attempt(n, a, rng)?;
        let found = attempt.factor;
        attempts.push(attempt);
        if let Some(d) = found {
            return Ok(FactorReport {
                n,
                factor: d,
                cofactor: n / d,
                attempts,
            });
        }
    }
    Err(Error::BudgetExhausted {
        rounds: attempts.len(),
        reason: format!("no useful base found for {n}"),
    })
}

/// A group in which discrete logarithms are taken.
pub trait CyclicGroup {
    type Elem: Clone + Ord + Hash + Debug;

    fn identity(&self) -> Self::Elem;
    fn op(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut acc = self.identity();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.op(&acc, &base);
            }
            base = self.op(&base, &base);
            e >>= 1;
        }
        acc
    }
}

/// Encoded Abelian group: an injective encoding with computable sum and
/// negation of encoded elements.
pub trait GroupEncoding {
    type Code: Clone + Ord + Hash + Debug;

    fn identity(&self) -> Self::Code;
    fn add(&self, a: &Self::Code, b: &Self::Code) -> Self::Code;
    fn neg(&self, a: &Self::Code) -> Self::Code;
}

/// `(Z/NZ)^×` under multiplication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MulModN {
    pub n: u64,
}

impl CyclicGroup for MulModN {
    type Elem = u64;

    fn identity(&self) -> u64 {
        1 % self.n
    }

    fn op(&self, a: &u64, b: &u64) -> u64 {
        crate::numtheory::mul_mod(*a, *b, self.n)
    }

    fn pow(&self, a: &u64, e: u64) -> u64 {
        pow_mod(*a, e, self.n)
    }
}

impl GroupEncoding for MulModN {
    type Code = u64;

    fn identity(&self) -> u64 {
        1 % self.n
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        crate::numtheory::mul_mod(*a, *b, self.n)
    }

    fn neg(&self, a: &u64) -> u64 {
        Residue::new(*a, self.n)
            .and_then(mod_inverse)
            .map(|r| r.value())
            .expect("encoded elements are units")
    }
}

/// Smallest `k >= 1` with `g^k = e`, by scanning up to `limit`.
pub fn element_order<G: CyclicGroup>(group: &G, g: &G::Elem, limit: u64) -> Result<u64> {
    let e = group.identity();
    let mut x = g.clone();
    for k in 1..=limit {
        if x == e {
            return Ok(k);
        }
        x = group.op(&x, g);
    }
    Err(Error::BoundExceeded {
        what: "element order",
        size: limit as u128 + 1,
        limit: limit as u128,
    })
}

pub struct DlogInstance<G: CyclicGroup> {
    pub group: G,
    pub order: u64,
    pub generator: G::Elem,
    pub target: G::Elem,
}

impl<G: CyclicGroup> DlogInstance<G> {
    /// Computes the order of `generator` by scanning.
    pub fn new(group: G, generator: G::Elem, target: G::Elem) -> Result<Self> {
        let order = element_order(&group, &generator, AMPLITUDE_LIMIT)?;
        Ok(DlogInstance {
            group,
            order,
            generator,
            target,
        })
    }

    /// Uses a caller-supplied order, checked to be exact.
    pub fn with_order(group: G, generator: G::Elem, target: G::Elem, order: u64) -> Result<Self> {
        if order == 0 || group.pow(&generator, order) != group.identity() {
            return invalid(format!("generator does not have order dividing {order}"));
        }
        if order > 1 {
            for q in factorize(order)?.primes() {
                if group.pow(&generator, order / q) == group.identity() {
                    return invalid(format!("generator order is a proper divisor of {order}"));
                }
            }
        }
        Ok(DlogInstance {
            group,
            order,
            generator,
            target,
        })
    }

    pub fn verifies(&self, l: u64) -> bool {
        self.group.pow(&self.generator, l) == self.target
    }
}

/// Linear scan for the smallest `ℓ` with `g^ℓ = x`.
pub fn dlog_bruteforce<G: CyclicGroup>(inst: &DlogInstance<G>) -> Result<u64> {
    let mut y = inst.group.identity();
    for l in 0..inst.order {
        if y == inst.target {
            return Ok(l);
        }
        y = inst.group.op(&y, &inst.generator);
    }
    Err(Error::NotInSubgroup(format!(
        "{:?} is not a power of {:?}",
        inst.target, inst.generator
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DlogMethod {
    /// A single sample with `γ` a unit mod `N`.
    Unit,
    /// Two samples with `gcd(γ, γ', N) = 1`.
    Pair,
    /// Congruences from several samples combined by CRT.
    Crt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DlogReport {
    pub log: u64,
    pub method: DlogMethod,
    /// Sampled `(γ·ℓ, γ)` pairs.
    pub samples: Vec<(u64, u64)>,
}

fn sampler_for<G: CyclicGroup>(inst: &DlogInstance<G>) -> Result<FourierSampler> {
    let n = inst.order;
    check_bound("amplitudes", n as u128 * n as u128, AMPLITUDE_LIMIT as u128)?;
    let group = AbelianGroupSpec::new(vec![n, n])?;
    let mut xp = Vec::with_capacity(n as usize);
    let mut gp = Vec::with_capacity(n as usize);
    let (mut x, mut g) = (inst.group.identity(), inst.group.identity());
    for _ in 0..n {
        xp.push(x.clone());
        gp.push(g.clone());
        x = inst.group.op(&x, &inst.target);
        g = inst.group.op(&g, &inst.generator);
    }
    let n = n as usize;
    FourierSampler::new(&group, |i| inst.group.op(&xp[i / n], &gp[i % n]))
}

/// Exact distribution of the sampled pair, indexed `u·N + v`.
pub fn dlog_distribution<G: CyclicGroup>(inst: &DlogInstance<G>) -> Result<Distribution> {
    if inst.order == 1 {
        return Ok(Distribution::point_mass(1, 0));
    }
    sampler_for(inst)?.exact_distribution()
}

fn modinv(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (g, u, _) = egcd(a as i128, m as i128).ok()?;
    (g == 1).then(|| u.rem_euclid(m as i128) as u64)
}

/// `ℓ ≡ r (mod m)` from `γ ℓ ≡ u (mod N)`, or `None` if inconsistent.
fn congruence(u: u64, v: u64, n: u64) -> Option<(u64, u64)> {
    let d = gcd(v, n);
    if !u.is_multiple_of(d) {
        return None;
    }
    let m = n / d;
    let inv = modinv((v / d) % m, m)?;
    Some((((u / d) as u128 * inv as u128 % m as u128) as u64, m))
}

/// Merges two congruences with possibly non-coprime moduli.
fn crt(a: (u64, u64), b: (u64, u64)) -> Option<(u64, u64)> {
    let ((r1, m1), (r2, m2)) = ((a.0 as i128, a.1 as i128), (b.0 as i128, b.1 as i128));
    let (g, p, _) = egcd(m1, m2).ok()?;
    if (r2 - r1) % g != 0 {
        return None;
    }
    let l = m1 / g * m2;
    let k = ((r2 - r1) / g * p).rem_euclid(m2 / g);
    Some(((r1 + m1 * k).rem_euclid(l) as u64, l as u64))
}

/// Discrete logarithm through Fourier sampling on `(Z/N)²`.
pub fn dlog_quantum<G: CyclicGroup, R: Rng + ?Sized>(
    inst: &DlogInstance<G>,
    rng: &mut R,
) -> Result<DlogReport> {
    let n = inst.order;
    if n == 1 {
        return if inst.verifies(0) {
            Ok(DlogReport {
                log: 0,
                method: DlogMethod::Unit,
                samples: vec![(0, 0)],
            })
        } else {
            Err(Error::NotInSubgroup(format!("{:?} is not the identity", inst.target)))
        };
    }
    let mut sampler = sampler_for(inst)?;
    let budget = round_budget(n * n);
    let mut samples: Vec<(u64, u64)> = Vec::new();
    let mut acc: Option<(u64, u64)> = Some((0, 1));
    while samples.len() < budget {
        let idx = sampler.sample(rng)? as u64;
        let (u, v) = (idx / n, idx % n);
        if let Some(inv) = modinv(v, n) {
            let l = (u as u128 * inv as u128 % n as u128) as u64;
            if inst.verifies(l) {
                samples.push((u, v));
                return Ok(DlogReport {
                    log: l,
                    method: DlogMethod::Unit,
                    samples,
                });
            }
        }
        for &(u2, v2) in &samples {
            // s·γ + t·γ' ≡ 1 (mod N) makes s·u + t·u' ≡ ℓ.
            let (Ok((d, s1, t1)), true) = (egcd(v as i128, v2 as i128), v != 0 || v2 != 0) else {
                continue;
            };
            let Some(k) = modinv(d.rem_euclid(n as i128) as u64, n) else {
                continue;
            };
            let s = (s1 * k as i128).rem_euclid(n as i128);
            let t = (t1 * k as i128).rem_euclid(n as i128);
            let l = ((s * u as i128 + t * u2 as i128).rem_euclid(n as i128)) as u64;
            if inst.verifies(l) {
                samples.push((u, v));
                return Ok(DlogReport {
                    log: l,
                    method: DlogMethod::Pair,
                    samples,
                });
            }
        }
        samples.push((u, v));
        acc = match (acc, congruence(u, v, n)) {
            (Some(a), Some(c)) => crt(a, c),
            _ => None,
        };
        if let Some((r, m)) = acc {
            if m == n && inst.verifies(r) {
                return Ok(DlogReport {
                    log: r,
                    method: DlogMethod::Crt,
                    samples,
                });
            }
        }
    }
    Err(Error::NotInSubgroup(format!(
        "no candidate logarithm of {:?} verified after {} samples",
        inst.target,
        samples.len()
    )))
}

#[derive(Debug, Clone)]
pub struct HspReport {
    pub subgroup: Subgroup,
    pub samples: Vec<Character>,
}

/// Hidden subgroup of an Abelian group from Fourier samples of the coset
/// states of `f`. The result is checked against `f` on every element.
pub fn abelian_hsp<V, F, R>(group: &AbelianGroupSpec, f: F, rng: &mut R) -> Result<HspReport>
where
    V: Clone + Ord,
    F: Fn(&GroupElement) -> V,
    R: Rng + ?Sized,
{
    check_bound("amplitudes", group.order() as u128, AMPLITUDE_LIMIT as u128)?;
    let values: Vec<V> = (0..group.order()).map(|i| f(&group.element_at(i))).collect();
    let mut sampler = FourierSampler::new(group, |i| values[i].clone())?;
    let min_samples = ceil_log2(group.order()) as usize + SAMPLE_MARGIN;
    let budget = round_budget(group.order());
    let mut samples = Vec::new();
    let mut last_order = u64::MAX;
    let mut stable = 0usize;
    while samples.len() < budget {
        let a = group.element_at(sampler.sample(rng)? as u64);
        samples.push(Character::from_index(a));
        let k = subgroup_from_character_samples(group, &samples)?;
        let order = k.order()?;
        if order == last_order {
            stable += 1;
        } else {
            stable = 0;
            last_order = order;
        }
        if samples.len() >= min_samples && stable >= 1 && hides(group, &values, &k)? {
            return Ok(HspReport { subgroup: k, samples });
        }
    }
    let k = subgroup_from_character_samples(group, &samples)?;
    if hides(group, &values, &k)? {
        return Ok(HspReport { subgroup: k, samples });
    }
    Err(Error::VerificationFailed(format!(
        "no subgroup hidden by F was confirmed after {} samples",
        samples.len()
    )))
}

/// `F(x) = F(y)` iff `x - y ∈ H`, from a table of values indexed like `G`.
fn hides<V: Clone + Ord>(group: &AbelianGroupSpec, values: &[V], h: &Subgroup) -> Result<bool> {
    for gen in h.generators() {
        for i in 0..group.order() {
            let x = group.element_at(i);
            let j = group.index_of(&group.add(&x, gen)?);
            if values[i as usize] != values[j as usize] {
                return Ok(false);
            }
        }
    }
    let distinct: BTreeSet<&V> = values.iter().collect();
    Ok(distinct.len() as u64 * h.order()? == group.order())
}

/// Checks that `f` hides `h`, by exhaustive comparison.
pub fn hides_subgroup<V, F>(group: &AbelianGroupSpec, f: F, h: &Subgroup) -> Result<bool>
where
    V: Clone + Ord,
    F: Fn(&GroupElement) -> V,
{
    check_bound("group order", group.order() as u128, AMPLITUDE_LIMIT as u128)?;
    let values: Vec<V> = (0..group.order()).map(|i| f(&group.element_at(i))).collect();
    hides(group, &values, h)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    /// Invariant factors `d_1 | d_2 | ...`, all greater than 1.
    pub invariant_factors: Vec<u64>,
    /// Orders of the input generators.
    pub generator_orders: Vec<u64>,
    /// Generators of the relation lattice, modulo the generator orders.
    pub relations: Vec<Vec<u64>>,
    /// For each cyclic factor, its generator as coefficients of the inputs.
    pub factor_generators: Vec<Vec<u64>>,
    /// For each input generator, its coordinates in the cyclic factors.
    pub generator_coordinates: Vec<Vec<u64>>,
}

fn multiples<E: GroupEncoding>(enc: &E, g: &E::Code, count: u64) -> Vec<E::Code> {
    let mut out = Vec::with_capacity(count as usize);
    let mut x = enc.identity();
    for _ in 0..count {
        out.push(x.clone());
        x = enc.add(&x, g);
    }
    out
}

fn combine<E: GroupEncoding>(enc: &E, gens: &[E::Code], coeffs: &[u64]) -> E::Code {
    let mut acc = enc.identity();
    for (g, &c) in gens.iter().zip(coeffs) {
        let mut base = g.clone();
        let mut e = c;
        while e > 0 {
            if e & 1 == 1 {
                acc = enc.add(&acc, &base);
            }
            base = enc.add(&base, &base);
            e >>= 1;
        }
    }
    acc
}

/// Cyclic decomposition of the group generated by `generators`, whose
/// element orders are at most `order_bound`.
pub fn decompose_abelian<E, R>(
    enc: &E,
    generators: &[E::Code],
    order_bound: u64,
    rng: &mut R,
) -> Result<Decomposition>
where
    E: GroupEncoding,
    R: Rng + ?Sized,
{
    if generators.is_empty() {
        return invalid("at least one generator is required");
    }
    let mut orders = Vec::new();
    for g in generators {
        let q = 1u64 << ceil_log2(order_bound.saturating_mul(order_bound)).max(1);
        check_bound("amplitudes", q as u128, AMPLITUDE_LIMIT as u128)?;
        let table = multiples(enc, g, q);
        let o = hidden_period_over_z(
            |k| {
                if k < q {
                    table[k as usize].clone()
                } else {
                    combine(enc, std::slice::from_ref(g), &[k])
                }
            },
            order_bound,
            rng,
        )?
        .period;
        // Negation must undo the generator; an inconsistent encoding fails here.
        if enc.add(&table[(o - 1) as usize], g) != enc.identity() || enc.neg(g) != table[(o - 1) as usize] {
            return Err(Error::VerificationFailed(format!(
                "encoding is inconsistent for a generator of order {o}"
            )));
        }
        orders.push(o);
    }
    let moduli: Vec<u64> = orders.iter().copied().filter(|&o| o > 1).collect();
    let active: Vec<usize> = (0..orders.len()).filter(|&i| orders[i] > 1).collect();
    let k = active.len();
    let active_gens: Vec<E::Code> = active.iter().map(|&i| generators[i].clone()).collect();

    let mut relations: Vec<Vec<u64>> = Vec::new();
    if k > 0 {
        let cube = AbelianGroupSpec::new(moduli.clone())?;
        let hsp = abelian_hsp(&cube, |c| combine(enc, &active_gens, c.coords()), rng)?;
        relations = hsp.subgroup.generators().iter().map(|g| g.coords().to_vec()).collect();
    }
    let mut rows: Vec<Vec<i64>> = relations
        .iter()
        .map(|r| r.iter().map(|&c| c as i64).collect())
        .collect();
    for (i, &m) in moduli.iter().enumerate() {
        let mut r = vec![0i64; k];
        r[i] = m as i64;
        rows.push(r);
    }
    let (mut invariant_factors, mut factor_generators, mut coords_active) = (Vec::new(), Vec::new(), vec![Vec::new(); k]);
    if k > 0 {
        let snf = smith_normal_form(&IntMatrix::from_rows(&rows));
        let diag = snf.diagonal();
        for (j, d) in diag.iter().enumerate() {
            let d = d.to_u64().expect("invariant factor fits in u64");
            if d <= 1 {
                continue;
            }
            invariant_factors.push(d);
            let big_d = BigInt::from(d);
            factor_generators.push(
                (0..k)
                    .map(|i| {
                        let m = BigInt::from(moduli[i]);
                        snf.v_inv.get(j, i).mod_floor(&m).to_u64().expect("reduced")
                    })
                    .collect::<Vec<u64>>(),
            );
            for (i, c) in coords_active.iter_mut().enumerate() {
                c.push(snf.v.get(i, j).mod_floor(&big_d).to_u64().expect("reduced"));
            }
        }
    }
    let expand = |coeffs: &[u64]| -> Vec<u64> {
        let mut full = vec![0u64; orders.len()];
        for (slot, &c) in active.iter().zip(coeffs) {
            full[*slot] = c;
        }
        full
    };
    let nf = invariant_factors.len();
    let mut generator_coordinates = vec![vec![0u64; nf]; orders.len()];
    for (a, &i) in active.iter().enumerate() {
        generator_coordinates[i] = coords_active[a].clone();
    }
    let relations = relations.iter().map(|r| expand(r)).collect();
    let factor_generators = factor_generators.iter().map(|c| expand(c)).collect();
    Ok(Decomposition {
        invariant_factors,
        generator_orders: orders,
        relations,
        factor_generators,
        generator_coordinates,
    })
}

/// Elements of the group generated by `generators`, by closure.
pub fn closure<E: GroupEncoding>(enc: &E, generators: &[E::Code], limit: usize) -> Result<Vec<E::Code>> {
    let mut seen: BTreeSet<E::Code> = BTreeSet::from([enc.identity()]);
    let mut frontier = vec![enc.identity()];
    while let Some(x) = frontier.pop() {
        for g in generators {
            let y = enc.add(&x, g);
            if seen.insert(y.clone()) {
                check_bound("group order", seen.len() as u128, limit as u128)?;
                frontier.push(y);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// Sorted multiset of element orders of an encoded group, by brute force.
pub fn order_profile<E: GroupEncoding>(enc: &E, elements: &[E::Code]) -> Vec<u64> {
    let mut out: Vec<u64> = elements
        .iter()
        .map(|g| {
            let mut x = g.clone();
            let mut k = 1;
            while x != enc.identity() {
                x = enc.add(&x, g);
                k += 1;
            }
            k
        })
        .collect();
    out.sort_unstable();
    out
}

/// Sorted multiset of element orders of `⊕ Z/d_i`.
pub fn order_profile_of(moduli: &[u64]) -> Result<Vec<u64>> {
    let g = AbelianGroupSpec::new(moduli.to_vec())?;
    let mut out: Vec<u64> = g
        .elements()?
        .iter()
        .map(|x| {
            x.coords()
                .iter()
                .zip(moduli)
                .fold(1u64, |acc, (&c, &m)| lcm(acc, m / gcd(c, m)))
        })
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// Checks a decomposition against the brute-force structure of the
/// encoded group.
pub fn verify_decomposition<E: GroupEncoding>(
    enc: &E,
    generators: &[E::Code],
    dec: &Decomposition,
    limit: usize,
) -> Result<bool> {
    let elems = closure(enc, generators, limit)?;
    let size: u64 = dec.invariant_factors.iter().product();
    if elems.len() as u64 != size {
        return Ok(false);
    }
    if order_profile(enc, &elems) != order_profile_of(&dec.invariant_factors)? {
        return Ok(false);
    }
    for (coeffs, &d) in dec.factor_generators.iter().zip(&dec.invariant_factors) {
        let h = combine(enc, generators, coeffs);
        if order_profile(enc, &[h]) != vec![d] {
            return Ok(false);
        }
    }
    Ok(true)
}
