//! Weight spaces of tensor products of Verma modules `M(Λ_1) ⊗ .. ⊗ M(Λ_n)` over the
//! Kac–Moody algebra without Serre relations.
//!
//! The basis vector `f_I v` is `f_{I_1} v_1 ⊗ .. ⊗ f_{I_n} v_n`, where each group `I_j`
//! is a word in the generators applied to the highest vector of factor `j`.

mod operators;

pub use operators::{DeltaMethod, DeltaOperator, NuImage};

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use num::traits::Zero;

use crate::error::{KzError, Result};
use crate::free_kac_moody::{word_degree, words_of_degree, KacMoody, LieElement, MultiDegree, Side, Word};
use crate::linalg::QMatrix;
use crate::rational::{qi, Q};

/// Pairing tables for the highest weights: `(Λ_j, α_i)` and `(Λ_i, Λ_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HighestWeightData {
    pub n: usize,
    /// `lam_alpha[j][i] = (Λ_j, α_i)`.
    pub lam_alpha: Vec<Vec<Q>>,
    pub lam_lam: QMatrix,
}

impl HighestWeightData {
    pub fn new(lam_alpha: Vec<Vec<Q>>, lam_lam: QMatrix) -> Result<Self> {
        let n = lam_alpha.len();
        if lam_lam.nrows() != n || lam_lam.ncols() != n {
            return Err(KzError::Dimension(format!(
                "(Λ_i,Λ_j) table must be {n}x{n}, got {}x{}",
                lam_lam.nrows(),
                lam_lam.ncols()
            )));
        }
        if !lam_lam.is_symmetric() {
            return Err(KzError::Domain("(Λ_i,Λ_j) table must be symmetric".into()));
        }
        if let Some(r) = lam_alpha.first().map(|row| row.len()) {
            if lam_alpha.iter().any(|row| row.len() != r) {
                return Err(KzError::Dimension("ragged (Λ_j,α_i) table".into()));
            }
        }
        Ok(HighestWeightData { n, lam_alpha, lam_lam })
    }

    pub fn rank(&self) -> usize {
        self.lam_alpha.first().map_or(0, |r| r.len())
    }

    /// `(Λ_j, α)` for a multidegree `α`.
    pub fn lam_pair(&self, j: usize, alpha: &MultiDegree) -> Q {
        alpha
            .0
            .iter()
            .zip(&self.lam_alpha[j])
            .fold(Q::zero(), |acc, (&m, p)| acc + p * qi(m as i64))
    }
}

/// Group separator in the flattened encoding. It sorts after every letter.
const SEP: u8 = u8::MAX;

/// A sequence `I = (i^1_1..i^1_{s_1}; ..; i^n_1..i^n_{s_n})`, stored flattened with every
/// group terminated by a separator. The derived order is the basis order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TensorIndex {
    flat: Vec<u8>,
}

impl TensorIndex {
    pub fn from_groups<W: AsRef<[u8]>>(groups: &[W]) -> Self {
        let mut flat = Vec::new();
        for g in groups {
            flat.extend_from_slice(g.as_ref());
            flat.push(SEP);
        }
        TensorIndex { flat }
    }

    /// The highest-weight vector `v_1 ⊗ .. ⊗ v_n`.
    pub fn vacuum(n: usize) -> Self {
        TensorIndex { flat: vec![SEP; n] }
    }

    pub fn groups(&self) -> Vec<&[u8]> {
        let mut out: Vec<&[u8]> = self.flat.split(|&c| c == SEP).collect();
        out.pop();
        out
    }

    pub fn n_groups(&self) -> usize {
        self.flat.iter().filter(|&&c| c == SEP).count()
    }

    pub fn group(&self, j: usize) -> &[u8] {
        self.groups()[j]
    }

    /// All letters in order, groups concatenated.
    pub fn letters(&self) -> Word {
        self.flat.iter().copied().filter(|&c| c != SEP).collect()
    }

    pub fn degree(&self, rank: usize) -> MultiDegree {
        word_degree(&self.letters(), rank)
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        self.groups().iter().map(|g| g.len()).collect()
    }

    pub fn with_group(&self, j: usize, w: &[u8]) -> TensorIndex {
        let mut groups: Vec<Word> = self.groups().into_iter().map(|g| g.to_vec()).collect();
        groups[j] = w.to_vec();
        TensorIndex::from_groups(&groups)
    }
}

impl fmt::Display for TensorIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .groups()
            .iter()
            .map(|g| {
                if g.is_empty() {
                    "∅".to_string()
                } else {
                    g.iter().map(|&c| (c + 1).to_string()).collect::<Vec<_>>().join(",")
                }
            })
            .collect();
        write!(f, "({})", parts.join(";"))
    }
}

impl std::str::FromStr for TensorIndex {
    type Err = KzError;

    /// Parses the display form such as `(1,2;∅)`. An empty group may also be left blank.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || KzError::schema("index", format!("cannot parse index {s:?}"));
        let inner = s.trim().strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
        let mut groups = Vec::new();
        for part in inner.split(';') {
            let part = part.trim();
            if part.is_empty() || part == "∅" {
                groups.push(Vec::new());
                continue;
            }
            let g = part
                .split(',')
                .map(|x| match x.trim().parse::<u8>() {
                    Ok(c) if (1..SEP).contains(&c) => Ok(c - 1),
                    _ => Err(bad()),
                })
                .collect::<Result<Vec<u8>>>()?;
            groups.push(g);
        }
        Ok(TensorIndex::from_groups(&groups))
    }
}

impl serde::Serialize for TensorIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for TensorIndex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `P(λ, n)` in basis order.
pub fn enumerate_basis(lambda: &MultiDegree, n: usize) -> Vec<TensorIndex> {
    let words = if lambda.is_zero() {
        vec![vec![]]
    } else {
        words_of_degree(lambda)
    };
    let m = lambda.total() as usize;
    let mut cuts = Vec::new();
    compositions(m, n, &mut Vec::new(), &mut cuts);
    let mut out = Vec::with_capacity(words.len() * cuts.len());
    for w in &words {
        for c in &cuts {
            let mut groups = Vec::with_capacity(n);
            let mut pos = 0;
            for &s in c {
                groups.push(&w[pos..pos + s]);
                pos += s;
            }
            out.push(TensorIndex::from_groups(&groups));
        }
    }
    out.sort();
    out
}

fn compositions(m: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if n == 0 {
        if m == 0 {
            out.push(cur.clone());
        }
        return;
    }
    if n == 1 {
        cur.push(m);
        out.push(cur.clone());
        cur.pop();
        return;
    }
    for s in 0..=m {
        cur.push(s);
        compositions(m - s, n - 1, cur, out);
        cur.pop();
    }
}

/// Sparse vector of the tensor product with exact coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ModVec {
    terms: BTreeMap<TensorIndex, Q>,
}

impl ModVec {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(idx: TensorIndex) -> Self {
        let mut v = Self::zero();
        v.add_term(idx, qi(1));
        v
    }

    pub fn add_term(&mut self, idx: TensorIndex, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(idx).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add_scaled(&mut self, other: &ModVec, s: &Q) {
        if s.is_zero() {
            return;
        }
        for (k, c) in &other.terms {
            self.add_term(k.clone(), c * s);
        }
    }

    pub fn coefficient(&self, idx: &TensorIndex) -> Q {
        self.terms.get(idx).cloned().unwrap_or_else(Q::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TensorIndex, &Q)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// An ordered weight space `M_λ` with a lookup table.
#[derive(Clone, Debug)]
pub struct WeightSpace {
    pub lambda: MultiDegree,
    pub n: usize,
    pub basis: Vec<TensorIndex>,
    index: HashMap<TensorIndex, usize>,
}

impl WeightSpace {
    pub fn new(lambda: &MultiDegree, n: usize) -> Self {
        let basis = enumerate_basis(lambda, n);
        let index = basis.iter().enumerate().map(|(k, b)| (b.clone(), k)).collect();
        WeightSpace {
            lambda: lambda.clone(),
            n,
            basis,
            index,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn position(&self, idx: &TensorIndex) -> Option<usize> {
        self.index.get(idx).copied()
    }

    /// Coordinates of `v`; every term must lie in this weight space.
    pub fn coords(&self, v: &ModVec) -> Result<Vec<Q>> {
        let mut out = vec![Q::zero(); self.dim()];
        for (k, c) in v.iter() {
            let p = self
                .position(k)
                .ok_or_else(|| KzError::Range(format!("{k} is outside the weight space {}", self.lambda)))?;
            out[p] += c;
        }
        Ok(out)
    }
}

/// Values `⟨α_i, μ⟩` and `⟨Λ_j, μ⟩` of a dynamical parameter or direction.
#[derive(Clone, Debug, PartialEq)]
pub struct MuVector<T> {
    pub alpha: Vec<T>,
    pub lam: Vec<T>,
}

impl<T: crate::linalg::Scalar> MuVector<T> {
    pub fn new(alpha: Vec<T>, lam: Vec<T>) -> Self {
        MuVector { alpha, lam }
    }

    /// `⟨α, μ⟩` for a multidegree `α`.
    pub fn pair_root(&self, a: &MultiDegree) -> T {
        let mut acc = T::zero();
        for (k, &m) in a.0.iter().enumerate() {
            for _ in 0..m {
                acc = acc + self.alpha[k].clone();
            }
        }
        acc
    }

    pub fn scale(&self, s: &T) -> Self {
        MuVector {
            alpha: self.alpha.iter().map(|x| x.clone() * s.clone()).collect(),
            lam: self.lam.iter().map(|x| x.clone() * s.clone()).collect(),
        }
    }

    pub fn lincomb(a: &T, x: &Self, b: &T, y: &Self) -> Self {
        let comb = |u: &[T], v: &[T]| -> Vec<T> {
            u.iter()
                .zip(v)
                .map(|(p, q)| a.clone() * p.clone() + b.clone() * q.clone())
                .collect()
        };
        MuVector {
            alpha: comb(&x.alpha, &y.alpha),
            lam: comb(&x.lam, &y.lam),
        }
    }
}

/// The tensor product of Verma modules together with the algebra it lives over.
#[derive(Debug)]
pub struct TensorVerma {
    pub km: Arc<KacMoody>,
    pub hw: HighestWeightData,
    shap: Mutex<HashMap<(usize, Word, Word), Q>>,
    nu: Mutex<HashMap<(usize, Word), Arc<BTreeMap<Word, LieElement>>>>,
}

impl TensorVerma {
    pub fn new(km: Arc<KacMoody>, hw: HighestWeightData) -> Result<Self> {
        if hw.n > 0 && hw.rank() != km.rank() {
            return Err(KzError::Dimension(format!(
                "weight tables have rank {} but the algebra has rank {}",
                hw.rank(),
                km.rank()
            )));
        }
        Ok(TensorVerma {
            km,
            hw,
            shap: Mutex::new(HashMap::new()),
            nu: Mutex::new(HashMap::new()),
        })
    }

    pub fn n(&self) -> usize {
        self.hw.n
    }

    pub fn rank(&self) -> usize {
        self.km.rank()
    }

    pub fn space(&self, lambda: &MultiDegree) -> Result<WeightSpace> {
        if lambda.rank() != self.rank() {
            return Err(KzError::Dimension(format!("λ = {lambda} does not match rank {}", self.rank())));
        }
        Ok(WeightSpace::new(lambda, self.n()))
    }

    /// `⟨Λ_j − α(word), h_i⟩`, the `h_i`-eigenvalue of `f_word v_j`.
    pub fn h_eigen(&self, j: usize, i: usize, word: &[u8]) -> Q {
        let mut e = self.hw.lam_alpha[j][i].clone();
        for &l in word {
            e -= self.km.b(l as usize, i);
        }
        e
    }

    /// `e_i f_{w_1}..f_{w_s} v_j` expanded over words.
    pub fn e_on_word(&self, j: usize, i: usize, w: &[u8]) -> Vec<(Word, Q)> {
        let mut out = Vec::new();
        for k in 0..w.len() {
            if w[k] as usize != i {
                continue;
            }
            let c = self.h_eigen(j, i, &w[k + 1..]);
            if c.is_zero() {
                continue;
            }
            let mut u = w.to_vec();
            u.remove(k);
            out.push((u, c));
        }
        out
    }

    /// `e_i^{(j)} v`.
    pub fn apply_e(&self, i: usize, j: usize, v: &ModVec) -> ModVec {
        let mut out = ModVec::zero();
        for (idx, c) in v.iter() {
            for (u, a) in self.e_on_word(j, i, idx.group(j)) {
                out.add_term(idx.with_group(j, &u), c * a);
            }
        }
        out
    }

    /// `f_i^{(j)} v`.
    pub fn apply_f(&self, i: usize, j: usize, v: &ModVec) -> ModVec {
        self.apply_f_word(&[i as u8], j, v)
    }

    /// `f_{w_1}..f_{w_k}` on factor `j`.
    pub fn apply_f_word(&self, w: &[u8], j: usize, v: &ModVec) -> ModVec {
        let mut out = ModVec::zero();
        for (idx, c) in v.iter() {
            let mut g = w.to_vec();
            g.extend_from_slice(idx.group(j));
            out.add_term(idx.with_group(j, &g), c.clone());
        }
        out
    }

    /// `e_{w_1}..e_{w_k}` on factor `j`, rightmost letter first.
    pub fn apply_e_word(&self, w: &[u8], j: usize, v: &ModVec) -> ModVec {
        let mut cur = v.clone();
        for &l in w.iter().rev() {
            if cur.is_zero() {
                break;
            }
            cur = self.apply_e(l as usize, j, &cur);
        }
        cur
    }

    /// Action of a homogeneous Lie element on factor `j`.
    pub fn apply_lie_on(&self, x: &LieElement, j: usize, v: &ModVec) -> ModVec {
        let mut out = ModVec::zero();
        for (w, c) in self.km.monomial_expansion(x).iter() {
            let t = match x.side {
                Side::Minus => self.apply_f_word(w, j, v),
                Side::Plus => self.apply_e_word(w, j, v),
            };
            out.add_scaled(&t, c);
        }
        out
    }

    /// Action of a Lie element on the tensor product: `Σ_j x^{(j)}`.
    pub fn apply_lie(&self, x: &LieElement, v: &ModVec) -> ModVec {
        let mut out = ModVec::zero();
        for j in 0..self.n() {
            let t = self.apply_lie_on(x, j, v);
            out.add_scaled(&t, &qi(1));
        }
        out
    }

    /// Contravariant form on one factor, `S(f_w v_j, f_u v_j)`.
    pub fn factor_shapovalov(&self, j: usize, w: &[u8], u: &[u8]) -> Q {
        if w.len() != u.len() {
            return Q::zero();
        }
        if w.is_empty() {
            return qi(1);
        }
        let r = self.rank();
        if word_degree(w, r) != word_degree(u, r) {
            return Q::zero();
        }
        let key = (j, w.to_vec(), u.to_vec());
        if let Some(x) = self.shap.lock().unwrap().get(&key) {
            return x.clone();
        }
        // S(f_i x, y) = S(x, e_i y)
        let mut acc = Q::zero();
        for (u2, c) in self.e_on_word(j, w[0] as usize, u) {
            acc += c * self.factor_shapovalov(j, &w[1..], &u2);
        }
        self.shap.lock().unwrap().insert(key, acc.clone());
        acc
    }

    pub fn shapovalov(&self, a: &TensorIndex, b: &TensorIndex) -> Q {
        let (ga, gb) = (a.groups(), b.groups());
        let mut acc = qi(1);
        for j in 0..self.n() {
            acc *= self.factor_shapovalov(j, ga[j], gb[j]);
            if acc.is_zero() {
                break;
            }
        }
        acc
    }

    /// Gram matrix of the contravariant form on `M_λ`.
    pub fn shapovalov_gram(&self, lambda: &MultiDegree) -> Result<QMatrix> {
        let sp = self.space(lambda)?;
        Ok(QMatrix::from_fn(sp.dim(), sp.dim(), |a, b| {
            self.shapovalov(&sp.basis[a], &sp.basis[b])
        }))
    }

    /// The weight `Λ_j − α(I_j)` of factor `j` paired with that of factor `k`.
    pub fn factor_weight_pairing(&self, idx: &TensorIndex, j: usize, k: usize) -> Q {
        let r = self.rank();
        let dj = word_degree(idx.group(j), r);
        let dk = word_degree(idx.group(k), r);
        let mut p = self.hw.lam_lam[(j, k)].clone();
        p -= self.hw.lam_pair(j, &dk);
        p -= self.hw.lam_pair(k, &dj);
        for a in 0..r {
            for b in 0..r {
                if dj.0[a] > 0 && dk.0[b] > 0 {
                    p += self.km.b(a, b) * qi((dj.0[a] * dk.0[b]) as i64);
                }
            }
        }
        p
    }

    /// `⟨Λ_i − α(I_i), μ⟩` for every basis vector: the diagonal of `μ^{(i)}`.
    pub fn mu_diagonal<T>(&self, sp: &WeightSpace, i: usize, mu: &MuVector<T>) -> Vec<T>
    where
        T: crate::linalg::Scalar,
    {
        sp.basis
            .iter()
            .map(|idx| {
                let d = word_degree(idx.group(i), self.rank());
                mu.lam[i].clone() - mu.pair_root(&d)
            })
            .collect()
    }

    /// Words of each degree, used by the Δ functionals.
    pub(crate) fn words(&self, alpha: &MultiDegree) -> Vec<Word> {
        words_of_degree(alpha)
    }
}
