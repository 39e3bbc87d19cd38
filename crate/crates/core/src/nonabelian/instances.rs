use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::{hides_check, Dihedral, DihedralElement, Group, Symmetric};
use crate::error::{check_bound, invalid, Error, Result};

/// Largest graph accepted by [`graph_aut_instance`].
pub const MAX_GRAPH_VERTICES: usize = 8;

/// `f₁(x) = f₀(x - s)` on `Z/n`, packaged as `F(x, 0) = f₀(x)`,
/// `F(x, 1) = f₁(x)` on `D_n`, which hides `{(0,0), (s,1)}`.
#[derive(Debug, Clone, Serialize)]
pub struct HiddenShift {
    pub n: u64,
    pub s: u64,
    pub f0: Vec<u64>,
    pub f1: Vec<u64>,
}

impl HiddenShift {
    pub fn from_f0(n: u64, s: u64, f0: Vec<u64>) -> Result<Self> {
        if s >= n {
            return invalid(format!("shift {s} must be below n = {n}"));
        }
        if f0.len() as u64 != n {
            return invalid("f0 must have one value per residue");
        }
        if f0.iter().collect::<BTreeSet<_>>().len() != f0.len() {
            return invalid("f0 must be injective");
        }
        let f1 = (0..n).map(|x| f0[((x + n - s) % n) as usize]).collect();
        Ok(HiddenShift { n, s, f0, f1 })
    }

    pub fn group(&self) -> Result<Dihedral> {
        Dihedral::new(self.n)
    }

    /// `F` on `D_n`; `F(x, 0) = F(x + s, 1)`.
    pub fn eval(&self, x: &DihedralElement) -> u64 {
        if x.k == 0 {
            self.f0[x.l as usize]
        } else {
            self.f1[x.l as usize]
        }
    }

    pub fn hidden_subgroup(&self) -> Vec<DihedralElement> {
        vec![DihedralElement { l: 0, k: 0 }, DihedralElement { l: self.s, k: 1 }]
    }

    pub fn verify(&self) -> Result<bool> {
        let g = self.group()?;
        Ok(hides_check(&g, |x| self.eval(x), &self.hidden_subgroup()))
    }
}

/// Planted instance with a random injective `f₀`.
pub fn hidden_shift_instance<R: Rng + ?Sized>(n: u64, s: u64, rng: &mut R) -> Result<HiddenShift> {
    Dihedral::new(n)?;
    let mut f0: Vec<u64> = (0..n).collect();
    f0.shuffle(rng);
    HiddenShift::from_f0(n, s, f0)
}

/// The unique `s` with `f₁(x) = f₀(x - s)` for all `x`, by scanning.
pub fn hidden_shift_bruteforce(f0: &[u64], f1: &[u64]) -> Result<u64> {
    let n = f0.len();
    if f1.len() != n || n == 0 {
        return invalid("f0 and f1 must have the same nonzero length");
    }
    if f0.iter().collect::<BTreeSet<_>>().len() != n {
        return invalid("f0 must be injective");
    }
    (0..n)
        .find(|&s| (0..n).all(|x| f1[x] == f0[(x + n - s) % n]))
        .map(|s| s as u64)
        .ok_or_else(|| Error::VerificationFailed("f1 is not a shift of f0".into()))
}

/// A simple graph on `0..n` with `F(π) = π(E)` on `S_n` and its
/// automorphism group found by brute force.
#[derive(Debug, Clone, Serialize)]
pub struct GraphAut {
    pub vertices: usize,
    pub edges: Vec<(u8, u8)>,
    pub automorphisms: Vec<Vec<u8>>,
}

fn normalize_edges(edges: &[(usize, usize)], n: usize) -> Result<Vec<(u8, u8)>> {
    let mut out = BTreeSet::new();
    for &(u, v) in edges {
        if u >= n || v >= n {
            return invalid(format!("edge ({u}, {v}) uses a vertex outside 0..{n}"));
        }
        if u == v {
            return invalid(format!("self-loop at vertex {u}"));
        }
        out.insert((u.min(v) as u8, u.max(v) as u8));
    }
    Ok(out.into_iter().collect())
}

impl GraphAut {
    pub fn image(&self, pi: &[u8]) -> Vec<(u8, u8)> {
        let mut e: Vec<(u8, u8)> = self
            .edges
            .iter()
            .map(|&(u, v)| {
                let (a, b) = (pi[u as usize], pi[v as usize]);
                (a.min(b), a.max(b))
            })
            .collect();
        e.sort_unstable();
        e
    }

    pub fn group(&self) -> Result<Symmetric> {
        Symmetric::new(self.vertices)
    }

    pub fn verify(&self) -> Result<bool> {
        let g = self.group()?;
        Ok(hides_check(&g, |p| self.image(p), &self.automorphisms))
    }
}

/// Instance for a graph on `n <= 8` vertices (0-indexed edges).
pub fn graph_aut_instance(n: usize, edges: &[(usize, usize)]) -> Result<GraphAut> {
    if n == 0 {
        return invalid("graph needs at least one vertex");
    }
    check_bound("graph vertices", n as u128, MAX_GRAPH_VERTICES as u128)?;
    let mut g = GraphAut {
        vertices: n,
        edges: normalize_edges(edges, n)?,
        automorphisms: Vec::new(),
    };
    let sym = Symmetric::new(n)?;
    g.automorphisms = sym.elements().into_iter().filter(|p| g.image(p) == g.edges).collect();
    Ok(g)
}

/// Parses `"i j"` lines (1-indexed); blank lines and `#` comments are
/// skipped. Returns the vertex count (largest index, or `vertices` when
/// given) and 0-indexed edges.
pub fn parse_edge_list(text: &str, vertices: Option<usize>) -> Result<(usize, Vec<(usize, usize)>)> {
    let mut edges = Vec::new();
    let mut max_v = 0usize;
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let [a, b] = parts[..] else {
            return invalid(format!("line {}: expected two vertex numbers", no + 1));
        };
        let parse = |s: &str| -> Result<usize> {
            match s.parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v),
                _ => invalid(format!("line {}: bad vertex {s:?} (vertices are 1-indexed)", no + 1)),
            }
        };
        let (u, v) = (parse(a)?, parse(b)?);
        max_v = max_v.max(u).max(v);
        edges.push((u - 1, v - 1));
    }
    let n = match vertices {
        Some(n) if n < max_v => return invalid(format!("edge uses vertex {max_v} but only {n} declared")),
        Some(n) => n,
        None => max_v,
    };
    Ok((n, edges))
}
