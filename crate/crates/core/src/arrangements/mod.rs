//! Discriminantal configurations `C_{n;m}`: the Orlik–Solomon algebra, the flag complex,
//! the maps `φ^k` and `S^k`, and the top-degree forms attached to `ω(z, t)`.
//!
//! Edges are computed combinatorially. For pairwise distinct `z` an edge is a partition of
//! the variables into blocks, each block either free or pinned to one `z_j`.

mod flags;
mod forms;
mod os;

pub use flags::{ChainReport, FlagElement, FlagSpace};
pub use forms::{eta_top, os_rational, weight_rational, Poly, RationalSum};
pub use os::{OsDegree, OsElement};

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use num::{One, Zero};

use crate::error::{KzError, Result};
use crate::linalg::QMatrix;
use crate::rational::Q;

/// `H_{kl}: t_k = t_l` with `k < l`, or `H_k^j: t_k = z_j` (0-based indices).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Hyperplane {
    Diag(usize, usize),
    Point(usize, usize),
}

impl Hyperplane {
    /// `H_{kl}` with the indices put in canonical order.
    pub fn diag(k: usize, l: usize) -> Self {
        Hyperplane::Diag(k.min(l), k.max(l))
    }
}

impl fmt::Display for Hyperplane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hyperplane::Diag(k, l) => write!(f, "H_{}{}", k + 1, l + 1),
            Hyperplane::Point(k, j) => write!(f, "H_{}^{}", k + 1, j + 1),
        }
    }
}

/// A weighted discriminantal configuration. Hyperplanes are listed with all `H_{kl}`
/// first and then all `H_k^j`, each lexicographically; this is also the order used for
/// broken circuits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub n: usize,
    pub m: usize,
    pub hyperplanes: Vec<Hyperplane>,
    #[serde(with = "crate::rational::serde_q::vec")]
    pub weights: Vec<Q>,
}

impl Configuration {
    /// `C_{n;m}` with the given weights (in hyperplane order), or all weights 1.
    pub fn discriminantal(n: usize, m: usize, weights: Option<Vec<Q>>) -> Result<Self> {
        let mut hyperplanes = Vec::new();
        for k in 0..m {
            for l in k + 1..m {
                hyperplanes.push(Hyperplane::Diag(k, l));
            }
        }
        for k in 0..m {
            for j in 0..n {
                hyperplanes.push(Hyperplane::Point(k, j));
            }
        }
        let weights = match weights {
            Some(w) if w.len() != hyperplanes.len() => {
                return Err(KzError::Dimension(format!(
                    "C_{{{n};{m}}} has {} hyperplanes, got {} weights",
                    hyperplanes.len(),
                    w.len()
                )))
            }
            Some(w) => w,
            None => vec![Q::from_integer(1.into()); hyperplanes.len()],
        };
        Ok(Configuration {
            n,
            m,
            hyperplanes,
            weights,
        })
    }

    pub fn index_of(&self, h: Hyperplane) -> Option<usize> {
        self.hyperplanes.iter().position(|&x| x == h)
    }

    pub fn weight(&self, h: usize) -> &Q {
        &self.weights[h]
    }
}

/// An edge: `label[k]` is `m + j` when `t_k` is pinned to `z_j`, otherwise the smallest
/// variable in its block.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge(Vec<usize>);

impl Edge {
    pub fn whole(m: usize) -> Self {
        Edge((0..m).collect())
    }

    pub fn codim(&self) -> usize {
        let m = self.0.len();
        let mut free: Vec<usize> = self.0.iter().copied().filter(|&x| x < m).collect();
        free.sort_unstable();
        free.dedup();
        m - free.len()
    }

    fn relabel(&self, from: usize, to: usize) -> Edge {
        Edge(self.0.iter().map(|&x| if x == from { to } else { x }).collect())
    }

    /// `L ∩ H`, or `None` when empty.
    pub fn meet(&self, h: Hyperplane) -> Option<Edge> {
        let m = self.0.len();
        match h {
            Hyperplane::Diag(k, l) => {
                let (a, b) = (self.0[k], self.0[l]);
                if a == b {
                    Some(self.clone())
                } else if a >= m && b >= m {
                    None
                } else {
                    let (keep, drop) = if a >= m || (b < m && a < b) { (a, b) } else { (b, a) };
                    Some(self.relabel(drop, keep))
                }
            }
            Hyperplane::Point(k, j) => {
                let a = self.0[k];
                if a == m + j {
                    Some(self.clone())
                } else if a >= m {
                    None
                } else {
                    Some(self.relabel(a, m + j))
                }
            }
        }
    }

    /// `L ⊂ H`.
    pub fn inside(&self, h: Hyperplane) -> bool {
        let m = self.0.len();
        match h {
            Hyperplane::Diag(k, l) => self.0[k] == self.0[l],
            Hyperplane::Point(k, j) => self.0[k] == m + j,
        }
    }

    /// `self ⊃ other`.
    pub fn contains(&self, other: &Edge) -> bool {
        let m = self.0.len();
        (0..m).all(|k| {
            let a = self.0[k];
            if a >= m {
                other.0[k] == a
            } else {
                other.0[k] == other.0[a]
            }
        })
    }
}

/// The configuration together with its intersection lattice, Orlik–Solomon algebra and
/// flag spaces in every degree.
#[derive(Debug)]
pub struct Arrangement {
    pub config: Configuration,
    pub edges: Vec<Edge>,
    edge_index: HashMap<Edge, usize>,
    /// `below[e]`: edges of codimension one more contained in `e`.
    below: Vec<Vec<usize>>,
    pub os: Vec<OsDegree>,
    pub flags: Vec<FlagSpace>,
}

impl Arrangement {
    pub fn new(config: Configuration) -> Self {
        let m = config.m;
        let mut edges = vec![Edge::whole(m)];
        let mut edge_index: HashMap<Edge, usize> = HashMap::new();
        edge_index.insert(edges[0].clone(), 0);
        let mut i = 0;
        while i < edges.len() {
            for &h in &config.hyperplanes {
                if let Some(e) = edges[i].meet(h) {
                    if !edge_index.contains_key(&e) {
                        edge_index.insert(e.clone(), edges.len());
                        edges.push(e);
                    }
                }
            }
            i += 1;
        }
        let below = edges
            .iter()
            .map(|e| {
                (0..edges.len())
                    .filter(|&f| edges[f].codim() == e.codim() + 1 && e.contains(&edges[f]))
                    .collect()
            })
            .collect();
        let mut arr = Arrangement {
            config,
            edges,
            edge_index,
            below,
            os: Vec::new(),
            flags: Vec::new(),
        };
        arr.os = (0..=m).map(|k| OsDegree::new(&arr, k)).collect();
        arr.flags = (0..=m).map(|k| FlagSpace::new(&arr, k)).collect();
        arr
    }

    pub fn m(&self) -> usize {
        self.config.m
    }

    pub fn hyperplane(&self, i: usize) -> Hyperplane {
        self.config.hyperplanes[i]
    }

    pub fn edge_id(&self, e: &Edge) -> Option<usize> {
        self.edge_index.get(e).copied()
    }

    /// Intersection of a set of hyperplanes (by index), or `None` when empty.
    pub fn meet_all(&self, hs: &[usize]) -> Option<Edge> {
        hs.iter()
            .try_fold(Edge::whole(self.m()), |e, &h| e.meet(self.hyperplane(h)))
    }

    /// True when the hyperplanes meet in codimension equal to their number.
    pub fn general_position(&self, hs: &[usize]) -> bool {
        self.meet_all(hs).is_some_and(|e| e.codim() == hs.len())
    }

    /// The flag `F(H_1, .., H_k) = (H_1 ⊃ H_1∩H_2 ⊃ ..)` as edge ids, for a tuple in
    /// general position.
    pub fn flag_of(&self, hs: &[usize]) -> Option<Vec<usize>> {
        let mut e = Edge::whole(self.m());
        let mut out = Vec::with_capacity(hs.len());
        for (i, &h) in hs.iter().enumerate() {
            e = e.meet(self.hyperplane(h))?;
            if e.codim() != i + 1 {
                return None;
            }
            out.push(self.edge_id(&e)?);
        }
        Some(out)
    }

    /// Hyperplanes containing the edge.
    pub fn hyperplanes_over(&self, e: usize) -> Vec<usize> {
        (0..self.config.hyperplanes.len())
            .filter(|&h| self.edges[e].inside(self.hyperplane(h)))
            .collect()
    }
}

/// A quotient of the free space on `ngens` generators by relation rows, with a normal form
/// onto the surviving generators. Columns are eliminated in the given order, so earlier
/// generators become pivots first.
#[derive(Clone, Debug)]
pub(crate) struct Quotient {
    /// Surviving generators, in increasing id order.
    pub basis: Vec<usize>,
    /// Normal form of each generator as `(basis position, coefficient)` pairs.
    pub nf: Vec<Vec<(usize, Q)>>,
}

impl Quotient {
    pub fn new(ngens: usize, relations: &[Vec<(usize, Q)>], order: &[usize]) -> Self {
        let col_of: HashMap<usize, usize> = order.iter().enumerate().map(|(c, &g)| (g, c)).collect();
        let mut mat = QMatrix::zeros(relations.len(), ngens);
        for (r, row) in relations.iter().enumerate() {
            for (g, v) in row {
                let c = col_of[g];
                mat[(r, c)] = &mat[(r, c)] + v;
            }
        }
        let (red, pivots) = mat.rref();
        let pivot_row: HashMap<usize, usize> = pivots.iter().enumerate().map(|(r, &c)| (c, r)).collect();
        let mut basis: Vec<usize> = (0..ngens).filter(|&c| !pivot_row.contains_key(&c)).map(|c| order[c]).collect();
        basis.sort_unstable();
        let pos: HashMap<usize, usize> = basis.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let nf = (0..ngens)
            .map(|g| {
                let c = col_of[&g];
                match pivot_row.get(&c) {
                    None => vec![(pos[&g], Q::one())],
                    Some(&r) => (0..ngens)
                        .filter(|cc| !pivot_row.contains_key(cc) && !red[(r, *cc)].is_zero())
                        .map(|cc| (pos[&order[cc]], -red[(r, cc)].clone()))
                        .collect(),
                }
            })
            .collect();
        Quotient { basis, nf }
    }

    /// Reduces a combination of generators to coordinates on the basis.
    pub fn reduce(&self, combo: impl IntoIterator<Item = (usize, Q)>) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.basis.len()];
        for (g, c) in combo {
            for (b, v) in &self.nf[g] {
                out[*b] += &c * v;
            }
        }
        out
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// All permutations of `0..k` with their signs.
pub(crate) fn permutations(k: usize) -> Vec<(Vec<usize>, i64)> {
    fn go(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; k], &mut out);
    out.into_iter().map(|p| {
        let s = permutation_sign(&p);
        (p, s)
    })
    .collect()
}

/// Sign of a sequence of distinct integers, relative to its sorted order.
pub(crate) fn permutation_sign(p: &[usize]) -> i64 {
    let mut inv = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_of_c12() {
        let c = Configuration::discriminantal(1, 2, None).unwrap();
        assert_eq!(c.hyperplanes.len(), 3);
        let a = Arrangement::new(c);
        // W, three lines, one point
        assert_eq!(a.edges.len(), 5);
        assert!(a.general_position(&[0, 1]));
        assert!(!a.general_position(&[0, 1, 2]));
        let c = Configuration::discriminantal(2, 1, None).unwrap();
        let a = Arrangement::new(c);
        assert!(!a.general_position(&[0, 1]));
    }
}
