//! The negative nilpotent part of a Kac–Moody algebra without Serre relations.
//!
//! `n_-` is the free Lie algebra on `f_1..f_r`. Elements are stored in the basis
//! of standard bracketings of Lyndon words and are moved in and out of the
//! tensor algebra for brackets. The positive part `n_+` is never built
//! separately: an element with [`Side::Plus`] is the mirror image of the same
//! bracket tree with `e` leaves.

mod forms;
mod words;

pub use forms::{AdResult, QuotientDual};
pub use words::{is_lyndon, lyndon_words, word_degree, words_of_degree, BracketTree, Word, WordCombination};

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num::traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{KzError, Result};
use crate::linalg::QMatrix;
use crate::rational::{qi, Q};

/// Counts of each simple root, `λ' = (m'_1, .., m'_r)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiDegree(pub Vec<u32>);

impl MultiDegree {
    pub fn zero(rank: usize) -> Self {
        MultiDegree(vec![0; rank])
    }

    pub fn unit(i: usize, rank: usize) -> Self {
        let mut d = vec![0; rank];
        d[i] = 1;
        MultiDegree(d)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &MultiDegree) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &MultiDegree) -> MultiDegree {
        MultiDegree(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn checked_sub(&self, other: &MultiDegree) -> Option<MultiDegree> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiDegree)
    }

    /// All nonzero `α` with `α <= self`, in lexicographic order.
    pub fn nonzero_below(&self) -> Vec<MultiDegree> {
        let mut out = vec![vec![]];
        for &m in &self.0 {
            out = out
                .into_iter()
                .flat_map(|p: Vec<u32>| {
                    (0..=m).map(move |k| {
                        let mut q = p.clone();
                        q.push(k);
                        q
                    })
                })
                .collect();
        }
        out.into_iter().map(MultiDegree).filter(|d| !d.is_zero()).collect()
    }
}

impl fmt::Display for MultiDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Free,
    Sln(usize),
}

/// Rank, Gram matrix `b_ij = (α_i, α_j)` and the mode flag.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraData {
    pub rank: usize,
    pub gram: QMatrix,
    pub mode: Mode,
}

impl AlgebraData {
    pub fn free(gram: QMatrix) -> Result<Self> {
        if !gram.is_square() || gram.nrows() == 0 {
            return Err(KzError::Domain("gram must be a nonempty square matrix".into()));
        }
        if !gram.is_symmetric() {
            return Err(KzError::Domain("gram must be symmetric".into()));
        }
        Ok(AlgebraData {
            rank: gram.nrows(),
            gram,
            mode: Mode::Free,
        })
    }

    /// Cartan form of `A_{N-1}`.
    pub fn sln(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(KzError::Domain(format!("sl_N needs N >= 2, got {n}")));
        }
        let r = n - 1;
        let gram = QMatrix::from_fn(r, r, |i, j| {
            if i == j {
                qi(2)
            } else if i.abs_diff(j) == 1 {
                qi(-1)
            } else {
                Q::zero()
            }
        });
        Ok(AlgebraData {
            rank: r,
            gram,
            mode: Mode::Sln(n),
        })
    }

    pub fn b(&self, i: usize, j: usize) -> &Q {
        &self.gram[(i, j)]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// `n_-`, generated by the `f_i`.
    Minus,
    /// `n_+`, generated by the `e_i`.
    Plus,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Minus => Side::Plus,
            Side::Plus => Side::Minus,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Side::Minus => 'f',
            Side::Plus => 'e',
        }
    }
}

/// Homogeneous element of `n_-` or `n_+` in the Lyndon basis of its degree.
#[derive(Clone, Debug, PartialEq)]
pub struct LieElement {
    pub side: Side,
    pub degree: MultiDegree,
    /// Empty for the zero element.
    pub coeffs: Vec<Q>,
}

impl LieElement {
    pub fn zero(side: Side, degree: MultiDegree) -> Self {
        LieElement {
            side,
            degree,
            coeffs: vec![],
        }
    }

    fn normalized(side: Side, degree: MultiDegree, coeffs: Vec<Q>) -> Self {
        if coeffs.iter().all(|c| c.is_zero()) {
            Self::zero(side, degree)
        } else {
            LieElement { side, degree, coeffs }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coefficient(&self, k: usize) -> Q {
        self.coeffs.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn scale(&self, s: &Q) -> Self {
        Self::normalized(
            self.side,
            self.degree.clone(),
            self.coeffs.iter().map(|c| c * s).collect(),
        )
    }

    pub fn add(&self, other: &LieElement) -> Result<Self> {
        if self.side != other.side || self.degree != other.degree {
            return Err(KzError::Domain("adding elements of different degree or side".into()));
        }
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coefficient(k) + other.coefficient(k)).collect();
        Ok(Self::normalized(self.side, self.degree.clone(), coeffs))
    }
}

/// Basis of one multigraded piece: Lyndon words, their standard bracketings and expansions.
#[derive(Debug)]
pub struct LyndonPiece {
    pub degree: MultiDegree,
    pub words: Vec<Word>,
    pub trees: Vec<BracketTree>,
    pub expansions: Vec<WordCombination>,
    index: HashMap<Word, usize>,
}

impl LyndonPiece {
    fn build(degree: MultiDegree) -> Self {
        let words = lyndon_words(&degree);
        let trees: Vec<BracketTree> = words.iter().map(|w| BracketTree::standard(w)).collect();
        let expansions = trees.iter().map(|t| t.expand()).collect();
        let index = words.iter().enumerate().map(|(k, w)| (w.clone(), k)).collect();
        LyndonPiece {
            degree,
            words,
            trees,
            expansions,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Coordinates of a Lie polynomial. The standard bracketing of `w` is `w` plus
    /// lexicographically larger words, so peeling off the smallest word terminates.
    fn decompose(&self, mut x: WordCombination) -> Result<Vec<Q>> {
        let mut coeffs = vec![Q::zero(); self.len()];
        while let Some((w, c)) = x.leading() {
            let Some(&k) = self.index.get(w) else {
                return Err(KzError::Domain(format!(
                    "word combination is not a Lie element (stuck at {w:?})"
                )));
            };
            let c = c.clone();
            x.add_scaled(&self.expansions[k], &(-c.clone()));
            coeffs[k] += c;
        }
        Ok(coeffs)
    }
}

/// Algebra context: the data plus memoized bases, Gram matrices and dual bases.
/// Tables are immutable once inserted and the context can be shared across threads.
#[derive(Debug)]
pub struct KacMoody {
    pub data: AlgebraData,
    pieces: Mutex<HashMap<MultiDegree, Arc<LyndonPiece>>>,
    grams: Mutex<HashMap<MultiDegree, Arc<QMatrix>>>,
    duals: Mutex<HashMap<MultiDegree, Arc<QuotientDual>>>,
}

impl KacMoody {
    pub fn new(data: AlgebraData) -> Self {
        KacMoody {
            data,
            pieces: Mutex::new(HashMap::new()),
            grams: Mutex::new(HashMap::new()),
            duals: Mutex::new(HashMap::new()),
        }
    }

    pub fn rank(&self) -> usize {
        self.data.rank
    }

    pub fn b(&self, i: usize, j: usize) -> &Q {
        self.data.b(i, j)
    }

    fn check_degree(&self, d: &MultiDegree) -> Result<()> {
        if d.rank() != self.rank() {
            return Err(KzError::Domain(format!(
                "multidegree {d} has length {} but rank is {}",
                d.rank(),
                self.rank()
            )));
        }
        Ok(())
    }

    /// Lyndon basis of `(n_-)_{λ'}`; its size is the multigraded Witt number.
    pub fn lyndon_basis(&self, degree: &MultiDegree) -> Result<Arc<LyndonPiece>> {
        self.check_degree(degree)?;
        if degree.is_zero() {
            return Err(KzError::Domain("lyndon_basis of the zero multidegree".into()));
        }
        if let Some(p) = self.pieces.lock().unwrap().get(degree) {
            return Ok(p.clone());
        }
        let piece = Arc::new(LyndonPiece::build(degree.clone()));
        self.pieces
            .lock()
            .unwrap()
            .entry(degree.clone())
            .or_insert(piece.clone());
        Ok(piece)
    }

    pub fn generator(&self, side: Side, i: usize) -> LieElement {
        LieElement {
            side,
            degree: MultiDegree::unit(i, self.rank()),
            coeffs: vec![qi(1)],
        }
    }

    /// Basis element number `k` of the given degree.
    pub fn basis_element(&self, side: Side, degree: &MultiDegree, k: usize) -> Result<LieElement> {
        let piece = self.lyndon_basis(degree)?;
        if k >= piece.len() {
            return Err(KzError::Range(format!("basis index {k} out of range in degree {degree}")));
        }
        let mut coeffs = vec![Q::zero(); piece.len()];
        coeffs[k] = qi(1);
        Ok(LieElement {
            side,
            degree: degree.clone(),
            coeffs,
        })
    }

    /// Reduces a Lie polynomial in the tensor algebra to Lyndon coordinates.
    pub fn from_words(&self, side: Side, degree: &MultiDegree, x: WordCombination) -> Result<LieElement> {
        if x.is_zero() {
            return Ok(LieElement::zero(side, degree.clone()));
        }
        let piece = self.lyndon_basis(degree)?;
        let coeffs = piece.decompose(x)?;
        Ok(LieElement::normalized(side, degree.clone(), coeffs))
    }

    pub fn from_tree(&self, side: Side, tree: &BracketTree) -> Result<LieElement> {
        let d = tree.degree(self.rank());
        self.from_words(side, &d, tree.expand())
    }

    /// Image in the tensor algebra (words in `f` for `n_-`, in `e` for `n_+`).
    pub fn monomial_expansion(&self, x: &LieElement) -> WordCombination {
        let mut out = WordCombination::zero();
        if x.is_zero() {
            return out;
        }
        let piece = self.lyndon_basis(&x.degree).expect("nonzero element has a basis");
        for (k, c) in x.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out.add_scaled(&piece.expansions[k], c);
            }
        }
        out
    }

    /// Coefficient of the monomial `f_{σ_1}..f_{σ_k}` in the expansion of `x`.
    /// A word of a different multidegree gives 0.
    pub fn delta_functional(&self, word: &[u8], x: &LieElement) -> Q {
        if word_degree(word, self.rank()) != x.degree {
            return Q::zero();
        }
        self.monomial_expansion(x).coefficient(word)
    }

    /// Free bracket `[x, y]` reduced to the Lyndon basis.
    pub fn bracket_reduce(&self, x: &LieElement, y: &LieElement) -> Result<LieElement> {
        if x.side != y.side {
            return Err(KzError::Domain("bracket_reduce needs both arguments on one side".into()));
        }
        let degree = x.degree.add(&y.degree);
        if x.is_zero() || y.is_zero() {
            return Ok(LieElement::zero(x.side, degree));
        }
        let w = self.monomial_expansion(x).commutator(&self.monomial_expansion(y));
        self.from_words(x.side, &degree, w)
    }

    /// The involution `τ`: `f_i ↦ -e_i`, `e_i ↦ -f_i`.
    pub fn tau(&self, x: &LieElement) -> LieElement {
        let sign = if x.degree.total().is_multiple_of(2) { qi(1) } else { qi(-1) };
        LieElement {
            side: x.side.flip(),
            degree: x.degree.clone(),
            coeffs: x.coeffs.iter().map(|c| c * &sign).collect(),
        }
    }
}
