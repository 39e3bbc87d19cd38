//! Small non-Abelian groups: explicit Cayley tables, dihedral groups as
//! `Z/n ⋊ Z/2`, symmetric groups, their representations, the non-Abelian
//! Fourier transform, weak Fourier sampling, hidden-shift and graph
//! automorphism instances, and the pretty good measurement.

mod instances;
mod pgm;
mod rep;

use std::collections::{BTreeSet, HashMap};
use std::fmt::Debug;
use std::hash::Hash;

use serde::Serialize;

use crate::error::{check_bound, invalid, Error, Result};

pub use instances::{
    graph_aut_instance, hidden_shift_bruteforce, hidden_shift_instance, parse_edge_list, GraphAut,
    HiddenShift, MAX_GRAPH_VERTICES,
};
pub use pgm::{
    hidden_shift_coset_ensemble, pgm, pgm_success, random_ensemble, Ensemble, Povm, PovmCheck,
    SUPPORT_CUTOFF,
};
pub use rep::{
    cyclic_irreps, dihedral_irreps, direct_sum, exercise_irreps, qft_nonabelian, schur_orthogonality_error,
    tensor, weak_sampling_distribution, Representation, IrrepSet, REP_TOL,
};

/// Largest group stored as an explicit Cayley table.
pub const CAYLEY_LIMIT: usize = 5040;

/// A finite group given by enumerable elements and a product rule.
pub trait Group {
    type Elem: Clone + Eq + Hash + Ord + Debug;

    fn elements(&self) -> Vec<Self::Elem>;
    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
}

/// Group with elements `0..n` and an explicit product table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    labels: Vec<String>,
    table: Vec<u32>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    /// Validates closure, identity, inverses and associativity exhaustively.
    pub fn from_table(labels: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = labels.len();
        check_bound("group order", n as u128, CAYLEY_LIMIT as u128)?;
        if n == 0 || table.len() != n || table.iter().any(|r| r.len() != n) {
            return invalid("product table must be square with one row per element");
        }
        if table.iter().flatten().any(|&x| x >= n) {
            return invalid("product table is not closed");
        }
        let flat: Vec<u32> = table.iter().flatten().map(|&x| x as u32).collect();
        let g = Self::assemble(labels, flat)?;
        g.check_associative()?;
        Ok(g)
    }

    fn assemble(labels: Vec<String>, table: Vec<u32>) -> Result<Self> {
        let n = labels.len();
        let at = |a: usize, b: usize| table[a * n + b] as usize;
        let Some(identity) = (0..n).find(|&e| (0..n).all(|x| at(e, x) == x && at(x, e) == x)) else {
            return invalid("no identity element");
        };
        let mut inverse = Vec::with_capacity(n);
        for a in 0..n {
            match (0..n).find(|&b| at(a, b) == identity && at(b, a) == identity) {
                Some(b) => inverse.push(b),
                None => return invalid(format!("element {} has no inverse", labels[a])),
            }
        }
        Ok(FiniteGroup {
            labels,
            table,
            identity,
            inverse,
        })
    }

    fn check_associative(&self) -> Result<()> {
        let n = self.order();
        for a in 0..n {
            for b in 0..n {
                let ab = self.product(a, b);
                for c in 0..n {
                    if self.product(ab, c) != self.product(a, self.product(b, c)) {
                        return invalid(format!(
                            "associativity fails for ({}, {}, {})",
                            self.labels[a], self.labels[b], self.labels[c]
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Tabulates any enumerable group; element `i` is `elements()[i]`.
    pub fn from_group<G: Group>(g: &G, label: impl Fn(&G::Elem) -> String) -> Result<Self> {
        let elems = g.elements();
        let n = elems.len();
        check_bound("group order", n as u128, CAYLEY_LIMIT as u128)?;
        let index: HashMap<&G::Elem, usize> = elems.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let mut table = Vec::with_capacity(n * n);
        for a in &elems {
            for b in &elems {
                let c = g.mul(a, b);
                let Some(&i) = index.get(&c) else {
                    return invalid("product leaves the element list");
                };
                table.push(i as u32);
            }
        }
        Self::assemble(elems.iter().map(label).collect(), table)
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn product(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order() + b] as usize
    }

    pub fn inverse_of(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn identity_index(&self) -> usize {
        self.identity
    }

    /// Re-runs the exhaustive axiom checks.
    pub fn verify_axioms(&self) -> Result<()> {
        self.check_associative()?;
        let again = Self::assemble(self.labels.clone(), self.table.clone())?;
        if again.identity != self.identity || again.inverse != self.inverse {
            return invalid("identity or inverse map is inconsistent");
        }
        Ok(())
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.product(a, b) == self.product(b, a)))
    }

    /// Subgroup generated by `gens`, as sorted element indices.
    pub fn generate(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = BTreeSet::from([self.identity]);
        let mut frontier = vec![self.identity];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.product(x, g);
                if seen.insert(y) {
                    frontier.push(y);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// Every subgroup generated by at most two elements.
    pub fn subgroups_two_generated(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        let mut out = BTreeSet::new();
        for a in 0..n {
            for b in a..n {
                out.insert(self.generate(&[a, b]));
            }
        }
        out.into_iter().collect()
    }

    pub fn is_subgroup(&self, h: &[usize]) -> bool {
        let set: BTreeSet<usize> = h.iter().copied().collect();
        set.contains(&self.identity)
            && h.iter().all(|&a| h.iter().all(|&b| set.contains(&self.product(a, self.inverse[b]))))
    }

    pub fn conjugate(&self, h: &[usize], g: usize) -> Vec<usize> {
        let gi = self.inverse[g];
        let mut out: Vec<usize> = h.iter().map(|&x| self.product(self.product(g, x), gi)).collect();
        out.sort_unstable();
        out
    }

    pub fn is_normal(&self, h: &[usize]) -> bool {
        let mut sorted = h.to_vec();
        sorted.sort_unstable();
        (0..self.order()).all(|g| self.conjugate(&sorted, g) == sorted)
    }

    /// Left cosets `xH`, each sorted, ordered by smallest element.
    pub fn left_cosets(&self, h: &[usize]) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.order()];
        let mut out = Vec::new();
        for x in 0..self.order() {
            if seen[x] {
                continue;
            }
            let mut c: Vec<usize> = h.iter().map(|&y| self.product(x, y)).collect();
            c.sort_unstable();
            for &y in &c {
                seen[y] = true;
            }
            out.push(c);
        }
        out
    }
}

impl Group for FiniteGroup {
    type Elem = usize;

    fn elements(&self) -> Vec<usize> {
        (0..self.order()).collect()
    }

    fn identity(&self) -> usize {
        self.identity
    }

    fn mul(&self, a: &usize, b: &usize) -> usize {
        self.product(*a, *b)
    }

    fn inv(&self, a: &usize) -> usize {
        self.inverse[*a]
    }
}

/// `(l, k)` in `Z/n ⋊ Z/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DihedralElement {
    pub l: u64,
    pub k: u64,
}

/// `D_n` with `(l₁, k₁)(l₂, k₂) = (l₁ + (-1)^{k₁} l₂, k₁ + k₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dihedral {
    n: u64,
}

impl Dihedral {
    pub fn new(n: u64) -> Result<Self> {
        if n < 3 {
            return invalid(format!("dihedral group needs n >= 3, got {n}"));
        }
        Ok(Dihedral { n })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn elem(&self, l: i64, k: i64) -> DihedralElement {
        DihedralElement {
            l: l.rem_euclid(self.n as i64) as u64,
            k: k.rem_euclid(2) as u64,
        }
    }

    /// Cayley-table index `k·n + l`.
    pub fn index(&self, x: &DihedralElement) -> usize {
        (x.k * self.n + x.l) as usize
    }
}

impl Group for Dihedral {
    type Elem = DihedralElement;

    /// Ordered by `k`, then `l`, matching [`Dihedral::index`].
    fn elements(&self) -> Vec<DihedralElement> {
        (0..2).flat_map(|k| (0..self.n).map(move |l| DihedralElement { l, k })).collect()
    }

    fn identity(&self) -> DihedralElement {
        DihedralElement { l: 0, k: 0 }
    }

    fn mul(&self, a: &DihedralElement, b: &DihedralElement) -> DihedralElement {
        let l = if a.k == 0 { a.l + b.l } else { a.l + self.n - b.l };
        DihedralElement {
            l: l % self.n,
            k: (a.k + b.k) % 2,
        }
    }

    fn inv(&self, a: &DihedralElement) -> DihedralElement {
        if a.k == 0 {
            DihedralElement {
                l: (self.n - a.l) % self.n,
                k: 0,
            }
        } else {
            *a
        }
    }
}

/// `S_n` acting on `0..n`; `(a·b)(i) = a(b(i))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Symmetric {
    n: usize,
}

/// Lexicographic successor of a permutation, in place.
pub fn next_permutation(p: &mut [u8]) -> bool {
    let Some(i) = p.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = p.iter().rposition(|&x| x > p[i]).expect("a larger element exists");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

impl Symmetric {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > 10 {
            return invalid(format!("symmetric group degree must be in 1..=10, got {n}"));
        }
        Ok(Symmetric { n })
    }

    pub fn degree(&self) -> usize {
        self.n
    }
}

impl Group for Symmetric {
    type Elem = Vec<u8>;

    /// All permutations in lexicographic order.
    fn elements(&self) -> Vec<Vec<u8>> {
        let mut p: Vec<u8> = (0..self.n as u8).collect();
        let mut out = vec![p.clone()];
        while next_permutation(&mut p) {
            out.push(p.clone());
        }
        out
    }

    fn identity(&self) -> Vec<u8> {
        (0..self.n as u8).collect()
    }

    fn mul(&self, a: &Vec<u8>, b: &Vec<u8>) -> Vec<u8> {
        b.iter().map(|&i| a[i as usize]).collect()
    }

    fn inv(&self, a: &Vec<u8>) -> Vec<u8> {
        let mut out = vec![0u8; a.len()];
        for (i, &x) in a.iter().enumerate() {
            out[x as usize] = i as u8;
        }
        out
    }
}

/// `D_n` as a Cayley table, element `k·n + l` labelled `"(l,k)"`.
pub fn dihedral_group(n: u64) -> Result<FiniteGroup> {
    let d = Dihedral::new(n)?;
    check_bound("group order", 2 * n as u128, CAYLEY_LIMIT as u128)?;
    FiniteGroup::from_group(&d, |x| format!("({},{})", x.l, x.k))
}

/// `Z/n` as a Cayley table.
pub fn cyclic_group(n: usize) -> Result<FiniteGroup> {
    if n == 0 {
        return invalid("cyclic group needs n >= 1");
    }
    let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    FiniteGroup::from_table((0..n).map(|a| a.to_string()).collect(), table)
}

type IntMat3 = [[i64; 3]; 3];

fn mat3_mul(a: &IntMat3, b: &IntMat3) -> IntMat3 {
    let mut c = [[0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

/// The group generated by the two 3×3 permutation matrices
/// `A` (cyclic shift) and `B` (swap of the last two coordinates).
/// Element `k·3 + l` is `A^l B^k`.
pub fn exercise_matrices() -> (IntMat3, IntMat3) {
    let a = [[0, 1, 0], [0, 0, 1], [1, 0, 0]];
    let b = [[1, 0, 0], [0, 0, 1], [0, 1, 0]];
    (a, b)
}

pub fn exercise_group() -> Result<FiniteGroup> {
    let (a, b) = exercise_matrices();
    let id = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
    // Closure under multiplication, to confirm the order independently.
    let mut seen = BTreeSet::from([id]);
    let mut frontier = vec![id];
    while let Some(x) = frontier.pop() {
        for g in [&a, &b] {
            let y = mat3_mul(&x, g);
            if seen.insert(y) {
                frontier.push(y);
            }
        }
    }
    let mut elems = Vec::new();
    for k in 0..2 {
        for l in 0..3 {
            let mut m = id;
            for _ in 0..l {
                m = mat3_mul(&m, &a);
            }
            if k == 1 {
                m = mat3_mul(&m, &b);
            }
            elems.push(m);
        }
    }
    let distinct: BTreeSet<IntMat3> = elems.iter().copied().collect();
    if distinct != seen {
        return Err(Error::VerificationFailed("A^l B^k does not list the generated group".into()));
    }
    let index: HashMap<IntMat3, usize> = elems.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let table = elems
        .iter()
        .map(|x| elems.iter().map(|y| index[&mat3_mul(x, y)]).collect())
        .collect();
    let labels = (0..2)
        .flat_map(|k| (0..3).map(move |l| format!("A^{l}B^{k}")))
        .collect();
    FiniteGroup::from_table(labels, table)
}

/// `F` is constant on each left coset `xH` and distinct across cosets,
/// i.e. `F(x) = F(y)` iff `x⁻¹y ∈ H`.
pub fn hides_check<G, V, F>(group: &G, f: F, h: &[G::Elem]) -> bool
where
    G: Group,
    V: Eq + Hash,
    F: Fn(&G::Elem) -> V,
{
    let hset: BTreeSet<&G::Elem> = h.iter().collect();
    let mut fibers: HashMap<V, (G::Elem, usize)> = HashMap::new();
    for x in group.elements() {
        let v = f(&x);
        match fibers.get_mut(&v) {
            None => {
                fibers.insert(v, (x, 1));
            }
            Some((rep, count)) => {
                if !hset.contains(&group.mul(&group.inv(rep), &x)) {
                    return false;
                }
                *count += 1;
            }
        }
    }
    fibers.values().all(|&(_, c)| c == hset.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dihedral_examples() {
        let d = Dihedral::new(3).unwrap();
        assert_eq!(dihedral_group(3).unwrap().order(), 6);
        assert_eq!(d.mul(&d.elem(1, 1), &d.elem(1, 1)), d.elem(0, 0));
        for l in 0..3 {
            for s in 0..3 {
                assert_eq!(d.mul(&d.elem(l, 0), &d.elem(s, 1)), d.elem(l + s, 1));
            }
        }
        assert!(Dihedral::new(2).is_err());
        for n in 3..=12 {
            let g = dihedral_group(n).unwrap();
            g.verify_axioms().unwrap();
            assert!(!g.is_abelian());
        }
    }

    #[test]
    fn exercise_group_facts() {
        let g = exercise_group().unwrap();
        assert_eq!(g.order(), 6);
        let (a, b) = (1usize, 3usize);
        assert_eq!(g.label(a), "A^1B^0");
        assert_eq!(g.label(b), "A^0B^1");
        assert_eq!(g.product(g.product(a, b), a), b);
        assert_eq!(g.product(a, b), 4);
        // Same multiplication law as D_3 under A ↦ (1,0), B ↦ (0,1).
        assert_eq!(g, {
            let mut d = dihedral_group(3).unwrap();
            d.labels = g.labels.clone();
            d
        });
    }

    #[test]
    fn subgroups_of_d4() {
        let g = dihedral_group(4).unwrap();
        let subs = g.subgroups_two_generated();
        assert_eq!(subs.len(), 10);
        assert!(subs.iter().all(|h| g.is_subgroup(h)));
        let normal: Vec<_> = subs.iter().filter(|h| g.is_normal(h)).collect();
        assert_eq!(normal.len(), 6);
    }

    #[test]
    fn symmetric_group() {
        let s3 = Symmetric::new(3).unwrap();
        let t = FiniteGroup::from_group(&s3, |p| format!("{p:?}")).unwrap();
        assert_eq!(t.order(), 6);
        t.verify_axioms().unwrap();
        assert_eq!(Symmetric::new(5).unwrap().elements().len(), 120);
    }

    #[test]
    fn hides_examples() {
        let g = dihedral_group(5).unwrap();
        assert!(hides_check(&g, |&x| x, &[g.identity_index()]));
        assert!(hides_check(&g, |_| 0, &g.elements()));
        assert!(!hides_check(&g, |&x| x % 2, &[g.identity_index()]));
    }

    #[test]
    fn bad_tables_rejected() {
        let labels = vec!["a".to_string(), "b".to_string()];
        assert!(FiniteGroup::from_table(labels.clone(), vec![vec![0, 0], vec![0, 0]]).is_err());
        assert!(FiniteGroup::from_table(labels.clone(), vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(FiniteGroup::from_table(labels, vec![vec![0, 1], vec![1, 0]]).is_ok());
    }
}
