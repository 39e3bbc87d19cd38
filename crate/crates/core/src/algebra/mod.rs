//! Finite Abelian groups `Z/m_1 ⊕ ... ⊕ Z/m_k`, their characters, subgroups,
//! cosets and annihilators.
//!
//! Characters are indexed by vectors `a` in the same group, with
//! `Ψ_a(x) = exp(2πi Σ a_i x_i / m_i)`. Phases are computed as exact
//! integers modulo `L = lcm(m_i)` before the single conversion to a complex
//! number, so `Ψ_a(x) = 1` is decided exactly by [`AbelianGroupSpec::pairing`].

pub mod snf;

use std::collections::{HashSet, VecDeque};
use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{check_bound, invalid, Error, Result};
pub use snf::{integer_kernel, smith_normal_form, IntMatrix, SmithForm};

/// Largest group (or subgroup) that is ever enumerated element by element.
pub const ENUMERATION_LIMIT: u64 = 1_000_000;

/// Tolerance for deciding that a character sum equals 0 or 1.
pub const CHARACTER_TOL: f64 = 1e-12;

/// `⊕_i Z/m_i Z`, each `m_i >= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct AbelianGroupSpec {
    moduli: Vec<u64>,
}

/// Residue vector of an [`AbelianGroupSpec`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GroupElement(Vec<u64>);

impl GroupElement {
    pub fn coords(&self) -> &[u64] {
        &self.0
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return write!(f, "{}", self.0[0]);
        }
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// The character `Ψ_a`, identified by its index vector `a`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Character(GroupElement);

impl Character {
    pub fn index(&self) -> &GroupElement {
        &self.0
    }

    pub fn from_index(a: GroupElement) -> Self {
        Character(a)
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ψ_{}", self.0)
    }
}

impl AbelianGroupSpec {
    pub fn new(moduli: Vec<u64>) -> Result<Self> {
        if moduli.is_empty() {
            return invalid("a group needs at least one cyclic factor");
        }
        if let Some(m) = moduli.iter().find(|&&m| m < 2) {
            return invalid(format!("cyclic factor modulus must be >= 2, got {m}"));
        }
        let mut order: u128 = 1;
        for &m in &moduli {
            order = order.saturating_mul(m as u128);
        }
        check_bound("group order", order, u64::MAX as u128)?;
        Ok(AbelianGroupSpec { moduli })
    }

    pub fn cyclic(n: u64) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn order(&self) -> u64 {
        self.moduli.iter().product()
    }

    /// `lcm(m_i)`, the common denominator of all character phases.
    pub fn exponent(&self) -> u64 {
        self.moduli.iter().fold(1, |acc, &m| acc.lcm(&m))
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(vec![0; self.rank()])
    }

    /// Canonicalizes arbitrary integers into a group element.
    pub fn element(&self, coords: &[i64]) -> Result<GroupElement> {
        if coords.len() != self.rank() {
            return Err(Error::Mismatch(format!(
                "element has {} coordinates, group has rank {}",
                coords.len(),
                self.rank()
            )));
        }
        Ok(GroupElement(
            coords
                .iter()
                .zip(&self.moduli)
                .map(|(&c, &m)| (c as i128).rem_euclid(m as i128) as u64)
                .collect(),
        ))
    }

    pub fn character(&self, index: &[i64]) -> Result<Character> {
        Ok(Character(self.element(index)?))
    }

    fn check(&self, x: &GroupElement) -> Result<()> {
        if x.0.len() != self.rank() || x.0.iter().zip(&self.moduli).any(|(&c, &m)| c >= m) {
            return Err(Error::Mismatch(format!("{x} is not an element of {self}")));
        }
        Ok(())
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        self.check(x).is_ok()
    }

    pub fn add(&self, x: &GroupElement, y: &GroupElement) -> Result<GroupElement> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.add_unchecked(x, y))
    }

    pub(crate) fn add_unchecked(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        GroupElement(
            x.0.iter()
                .zip(&y.0)
                .zip(&self.moduli)
                .map(|((&a, &b), &m)| ((a as u128 + b as u128) % m as u128) as u64)
                .collect(),
        )
    }

    pub fn neg(&self, x: &GroupElement) -> Result<GroupElement> {
        self.check(x)?;
        Ok(GroupElement(
            x.0.iter().zip(&self.moduli).map(|(&a, &m)| (m - a) % m).collect(),
        ))
    }

    pub fn sub(&self, x: &GroupElement, y: &GroupElement) -> Result<GroupElement> {
        let ny = self.neg(y)?;
        self.add(x, &ny)
    }

    pub fn scalar_mul(&self, k: i64, x: &GroupElement) -> Result<GroupElement> {
        self.check(x)?;
        Ok(GroupElement(
            x.0.iter()
                .zip(&self.moduli)
                .map(|(&a, &m)| ((k as i128 * a as i128).rem_euclid(m as i128)) as u64)
                .collect(),
        ))
    }

    /// Mixed-radix index, first coordinate most significant.
    pub fn index_of(&self, x: &GroupElement) -> u64 {
        x.0.iter().zip(&self.moduli).fold(0, |acc, (&c, &m)| acc * m + c)
    }

    pub fn element_at(&self, mut index: u64) -> GroupElement {
        let mut coords = vec![0; self.rank()];
        for (slot, &m) in coords.iter_mut().zip(&self.moduli).rev() {
            *slot = index % m;
            index /= m;
        }
        GroupElement(coords)
    }

    /// All elements in index order.
    pub fn elements(&self) -> Result<Vec<GroupElement>> {
        check_bound("group order", self.order() as u128, ENUMERATION_LIMIT as u128)?;
        Ok((0..self.order()).map(|i| self.element_at(i)).collect())
    }

    /// `Σ a_i x_i L/m_i mod L` where `L` is the exponent; `Ψ_a(x) =
    /// exp(2πi · pairing / L)`.
    pub fn pairing(&self, a: &GroupElement, x: &GroupElement) -> u64 {
        let l = self.exponent() as u128;
        let mut acc: u128 = 0;
        for ((&ai, &xi), &m) in a.0.iter().zip(&x.0).zip(&self.moduli) {
            let scale = l / m as u128;
            acc = (acc + (ai as u128 * xi as u128 % m as u128) * scale) % l;
        }
        acc as u64
    }

    pub fn character_eval(&self, a: &Character, x: &GroupElement) -> Result<Complex64> {
        self.check(&a.0)?;
        self.check(x)?;
        let phase = self.pairing(&a.0, x) as f64 / self.exponent() as f64;
        Ok(Complex64::from_polar(1.0, 2.0 * PI * phase))
    }

    pub fn is_trivial_on(&self, a: &Character, x: &GroupElement) -> bool {
        self.pairing(&a.0, x) == 0
    }
}

impl fmt::Display for AbelianGroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.moduli.iter().map(|m| format!("Z/{m}")).collect();
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

/// A subgroup stored by generators, with its element set enumerated on
/// demand and cached.
#[derive(Debug, Clone)]
pub struct Subgroup {
    group: AbelianGroupSpec,
    generators: Vec<GroupElement>,
    elements: OnceLock<Vec<u64>>,
}

/// One coset `representative + H`, listed in index order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Coset {
    pub representative: GroupElement,
    pub elements: Vec<GroupElement>,
}

impl Subgroup {
    pub fn generated_by(group: &AbelianGroupSpec, generators: Vec<GroupElement>) -> Result<Self> {
        for g in &generators {
            group.check(g)?;
        }
        let generators = generators.into_iter().filter(|g| g.0.iter().any(|&c| c != 0)).collect();
        Ok(Subgroup {
            group: group.clone(),
            generators,
            elements: OnceLock::new(),
        })
    }

    pub fn trivial(group: &AbelianGroupSpec) -> Self {
        Subgroup {
            group: group.clone(),
            generators: Vec::new(),
            elements: OnceLock::new(),
        }
    }

    pub fn whole(group: &AbelianGroupSpec) -> Self {
        let gens = (0..group.rank())
            .map(|i| {
                let mut c = vec![0; group.rank()];
                c[i] = 1;
                GroupElement(c)
            })
            .collect();
        Subgroup {
            group: group.clone(),
            generators: gens,
            elements: OnceLock::new(),
        }
    }

    /// Builds a subgroup from an element set known to be closed, choosing a
    /// small generating set greedily.
    fn from_closed_set(group: &AbelianGroupSpec, mut indices: Vec<u64>) -> Self {
        indices.sort_unstable();
        let mut span: HashSet<u64> = HashSet::from([0]);
        let mut gens = Vec::new();
        for &i in &indices {
            if span.contains(&i) {
                continue;
            }
            let g = group.element_at(i);
            let mut next = span.clone();
            let mut frontier: Vec<u64> = span.iter().copied().collect();
            while let Some(s) = frontier.pop() {
                let t = group.index_of(&group.add_unchecked(&group.element_at(s), &g));
                if next.insert(t) {
                    frontier.push(t);
                }
            }
            span = next;
            gens.push(g);
        }
        let sub = Subgroup {
            group: group.clone(),
            generators: gens,
            elements: OnceLock::new(),
        };
        let _ = sub.elements.set(indices);
        sub
    }

    pub fn group(&self) -> &AbelianGroupSpec {
        &self.group
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    /// Sorted element indices (see [`AbelianGroupSpec::index_of`]).
    pub fn element_indices(&self) -> Result<&[u64]> {
        if let Some(e) = self.elements.get() {
            return Ok(e);
        }
        let g = &self.group;
        let mut seen: HashSet<u64> = HashSet::from([0]);
        let mut queue = VecDeque::from([g.identity()]);
        while let Some(x) = queue.pop_front() {
            for h in &self.generators {
                let y = g.add_unchecked(&x, h);
                if seen.insert(g.index_of(&y)) {
                    check_bound("subgroup order", seen.len() as u128, ENUMERATION_LIMIT as u128)?;
                    queue.push_back(y);
                }
            }
        }
        let mut v: Vec<u64> = seen.into_iter().collect();
        v.sort_unstable();
        Ok(self.elements.get_or_init(|| v))
    }

    pub fn elements(&self) -> Result<Vec<GroupElement>> {
        Ok(self
            .element_indices()?
            .iter()
            .map(|&i| self.group.element_at(i))
            .collect())
    }

    pub fn order(&self) -> Result<u64> {
        if self.elements.get().is_none() && self.group.order() > ENUMERATION_LIMIT {
            return self.order_via_annihilator();
        }
        Ok(self.element_indices()?.len() as u64)
    }

    fn order_via_annihilator(&self) -> Result<u64> {
        // |H| = |G| / |perp(H)|, and |perp(H)| comes from the Smith form of
        // the generator relation lattice of perp(H).
        let perp = annihilator(self)?;
        Ok(self.group.order() / subgroup_order_snf(&perp))
    }

    pub fn contains(&self, x: &GroupElement) -> Result<bool> {
        self.group.check(x)?;
        if let Some(e) = self.elements.get() {
            return Ok(e.binary_search(&self.group.index_of(x)).is_ok());
        }
        if self.group.order() <= ENUMERATION_LIMIT {
            let idx = self.group.index_of(x);
            return Ok(self.element_indices()?.binary_search(&idx).is_ok());
        }
        // x ∈ H iff every character trivial on H is trivial on x.
        let perp = annihilator(self)?;
        Ok(perp.generators.iter().all(|a| self.group.pairing(a, x) == 0))
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> Result<bool> {
        if self.group != other.group {
            return Ok(false);
        }
        for g in &self.generators {
            if !other.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn same_as(&self, other: &Subgroup) -> Result<bool> {
        Ok(self.is_subgroup_of(other)? && other.is_subgroup_of(self)?)
    }
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other).unwrap_or(false)
    }
}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.generators.iter().map(|g| g.to_string()).collect();
        write!(f, "<{}>", gens.join(", "))
    }
}

/// `|H|` for a subgroup of `⊕ Z/m_i` from the Smith form of its relation
/// lattice `[generators; diag(m_i)]`.
fn subgroup_order_snf(h: &Subgroup) -> u64 {
    let g = &h.group;
    let k = g.rank();
    // H = Λ / ⊕ m_i Z where Λ is spanned by the generators and the m_i e_i,
    // so |H| = |G| / [Z^k : Λ] and the index is the product of invariants.
    let mut rows: Vec<Vec<BigInt>> = h
        .generators
        .iter()
        .map(|x| x.0.iter().map(|&c| BigInt::from(c)).collect())
        .collect();
    for (i, &m) in g.moduli.iter().enumerate() {
        let mut r = vec![BigInt::zero(); k];
        r[i] = BigInt::from(m);
        rows.push(r);
    }
    let snf = smith_normal_form(&IntMatrix::from_rows(&rows));
    let index: BigInt = snf.diagonal().iter().product();
    g.order() / index.to_u64().expect("index divides the group order")
}

/// `G = ⊔ (r + H)`, representatives chosen as the smallest index in each
/// coset, cosets listed by representative.
pub fn coset_decomposition(group: &AbelianGroupSpec, h: &Subgroup) -> Result<Vec<Coset>> {
    if h.group != *group {
        return Err(Error::Mismatch("subgroup belongs to another group".into()));
    }
    check_bound("group order", group.order() as u128, ENUMERATION_LIMIT as u128)?;
    let hs = h.elements()?;
    let mut assigned = vec![false; group.order() as usize];
    let mut out = Vec::new();
    for i in 0..group.order() {
        if assigned[i as usize] {
            continue;
        }
        let r = group.element_at(i);
        let mut elems: Vec<GroupElement> = hs.iter().map(|x| group.add_unchecked(&r, x)).collect();
        elems.sort_by_key(|e| group.index_of(e));
        for e in &elems {
            assigned[group.index_of(e) as usize] = true;
        }
        out.push(Coset {
            representative: r,
            elements: elems,
        });
    }
    Ok(out)
}

/// `(1/|H|) Σ_{x∈H} Ψ_a(x)`.
pub fn character_average_over(h: &Subgroup, a: &Character) -> Result<Complex64> {
    let g = &h.group;
    let elems = h.elements()?;
    let mut sum = Complex64::zero();
    for x in &elems {
        sum += g.character_eval(a, x)?;
    }
    Ok(sum / elems.len() as f64)
}

/// `{a : Ψ_a(h) = 1 for all h ∈ H}` as a subgroup of the dual group, which
/// shares `H`'s group spec.
pub fn annihilator(h: &Subgroup) -> Result<Subgroup> {
    pairing_kernel(&h.group, &h.generators)
}

/// `perp(perp(H))`, which equals `H`.
pub fn double_annihilator(h: &Subgroup) -> Result<Subgroup> {
    annihilator(&annihilator(h)?)
}

/// `{x : Ψ_a(x) = 1 for every sampled a}`. Brute force for groups up to
/// [`ENUMERATION_LIMIT`], Smith normal form otherwise.
pub fn subgroup_from_character_samples(
    group: &AbelianGroupSpec,
    samples: &[Character],
) -> Result<Subgroup> {
    let vecs: Vec<GroupElement> = samples.iter().map(|c| c.0.clone()).collect();
    for v in &vecs {
        group.check(v)?;
    }
    if group.order() <= ENUMERATION_LIMIT {
        kernel_bruteforce(group, &vecs)
    } else {
        kernel_snf(group, &vecs)
    }
}

fn pairing_kernel(group: &AbelianGroupSpec, vectors: &[GroupElement]) -> Result<Subgroup> {
    if group.order() <= ENUMERATION_LIMIT {
        kernel_bruteforce(group, vectors)
    } else {
        kernel_snf(group, vectors)
    }
}

/// Kernel of the pairing against `vectors` by scanning every element.
pub fn kernel_bruteforce(group: &AbelianGroupSpec, vectors: &[GroupElement]) -> Result<Subgroup> {
    check_bound("group order", group.order() as u128, ENUMERATION_LIMIT as u128)?;
    let mut hits = Vec::new();
    for i in 0..group.order() {
        let x = group.element_at(i);
        if vectors.iter().all(|a| group.pairing(a, &x) == 0) {
            hits.push(i);
        }
    }
    Ok(Subgroup::from_closed_set(group, hits))
}

/// Kernel of the pairing against `vectors` by integer linear algebra.
///
/// With `L = lcm(m_i)` and `c_ji = a_ji · L/m_i`, the kernel is the image
/// mod `m_i` of `{x ∈ Z^k : C x ∈ L Z^s}`, i.e. the projection of the
/// integer kernel of `[C | -L I]`.
pub fn kernel_snf(group: &AbelianGroupSpec, vectors: &[GroupElement]) -> Result<Subgroup> {
    for v in vectors {
        group.check(v)?;
    }
    let k = group.rank();
    let s = vectors.len();
    if s == 0 {
        return Ok(Subgroup::whole(group));
    }
    let l = group.exponent();
    let mut rows = Vec::with_capacity(s);
    for (j, a) in vectors.iter().enumerate() {
        let mut row = vec![BigInt::zero(); k + s];
        for i in 0..k {
            row[i] = BigInt::from(a.0[i]) * BigInt::from(l / group.moduli[i]);
        }
        row[k + j] = -BigInt::from(l);
        rows.push(row);
    }
    let basis = integer_kernel(&IntMatrix::from_rows(&rows));
    let gens = basis
        .into_iter()
        .map(|col| {
            GroupElement(
                (0..k)
                    .map(|i| {
                        let m = BigInt::from(group.moduli[i]);
                        col[i].mod_floor(&m).to_u64().expect("reduced below modulus")
                    })
                    .collect(),
            )
        })
        .collect();
    Subgroup::generated_by(group, gens)
}

/// A random subgroup generated by `n_gens` uniformly chosen elements.
pub fn random_subgroup<R: Rng + ?Sized>(group: &AbelianGroupSpec, n_gens: usize, rng: &mut R) -> Subgroup {
    let gens = (0..n_gens)
        .map(|_| GroupElement(group.moduli.iter().map(|&m| rng.gen_range(0..m)).collect()))
        .collect();
    Subgroup::generated_by(group, gens).expect("generated elements lie in the group")
}
