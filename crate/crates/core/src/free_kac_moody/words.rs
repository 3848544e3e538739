//! Words in the generators, the tensor algebra, Lyndon words and bracket trees.

use std::collections::BTreeMap;
use std::fmt;

use num::traits::Zero;

use crate::rational::{fmt_q, qi, Q};

use super::MultiDegree;

/// A word `x_{w_0} x_{w_1} ...` with zero-based generator indices.
pub type Word = Vec<u8>;

pub fn word_degree(w: &[u8], rank: usize) -> MultiDegree {
    let mut d = vec![0u32; rank];
    for &c in w {
        d[c as usize] += 1;
    }
    MultiDegree(d)
}

/// Finite combination of words: an element of the free associative algebra.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WordCombination {
    terms: BTreeMap<Word, Q>,
}

impl WordCombination {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn word(w: Word) -> Self {
        let mut c = Self::zero();
        c.add_term(w, qi(1));
        c
    }

    pub fn add_term(&mut self, w: Word, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get().clone() + c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &WordCombination, s: &Q) {
        for (w, c) in &other.terms {
            self.add_term(w.clone(), c.clone() * s.clone());
        }
    }

    pub fn coefficient(&self, w: &[u8]) -> Q {
        self.terms.get(w).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &Q)> {
        self.terms.iter()
    }

    /// Lexicographically smallest word with a nonzero coefficient.
    pub fn leading(&self) -> Option<(&Word, &Q)> {
        self.terms.iter().next()
    }

    /// Concatenation product.
    pub fn product(&self, other: &WordCombination) -> WordCombination {
        let mut out = WordCombination::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let mut w = a.clone();
                w.extend_from_slice(b);
                out.add_term(w, ca.clone() * cb.clone());
            }
        }
        out
    }

    pub fn commutator(&self, other: &WordCombination) -> WordCombination {
        let mut out = self.product(other);
        out.add_scaled(&other.product(self), &qi(-1));
        out
    }

    pub fn format_with(&self, letter: char) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| {
                let mono: String = w.iter().map(|&x| format!("{letter}{}", x + 1)).collect();
                format!("({}){}", fmt_q(c), mono)
            })
            .collect();
        parts.join(" + ")
    }
}

/// True when `w` is a Lyndon word: strictly smaller than each proper suffix.
pub fn is_lyndon(w: &[u8]) -> bool {
    !w.is_empty() && (1..w.len()).all(|i| w < &w[i..])
}

/// All words with the given letter counts, in lexicographic order.
pub fn words_of_degree(deg: &MultiDegree) -> Vec<Word> {
    let mut counts: Vec<u32> = deg.0.clone();
    let total = deg.total() as usize;
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(total);
    fn rec(counts: &mut [u32], cur: &mut Word, total: usize, out: &mut Vec<Word>) {
        if cur.len() == total {
            out.push(cur.clone());
            return;
        }
        for i in 0..counts.len() {
            if counts[i] > 0 {
                counts[i] -= 1;
                cur.push(i as u8);
                rec(counts, cur, total, out);
                cur.pop();
                counts[i] += 1;
            }
        }
    }
    rec(&mut counts, &mut cur, total, &mut out);
    out
}

pub fn lyndon_words(deg: &MultiDegree) -> Vec<Word> {
    words_of_degree(deg).into_iter().filter(|w| is_lyndon(w)).collect()
}

/// A bracketing of generators. Leaves are zero-based generator indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BracketTree {
    Leaf(u8),
    Node(Box<BracketTree>, Box<BracketTree>),
}

impl BracketTree {
    pub fn node(a: BracketTree, b: BracketTree) -> Self {
        BracketTree::Node(Box::new(a), Box::new(b))
    }

    /// Standard bracketing of a Lyndon word (split at the longest proper Lyndon suffix).
    pub fn standard(w: &[u8]) -> Self {
        debug_assert!(is_lyndon(w));
        if w.len() == 1 {
            return BracketTree::Leaf(w[0]);
        }
        let split = (1..w.len()).find(|&i| is_lyndon(&w[i..])).expect("nonempty suffix");
        BracketTree::node(Self::standard(&w[..split]), Self::standard(&w[split..]))
    }

    pub fn leaves(&self) -> Word {
        match self {
            BracketTree::Leaf(i) => vec![*i],
            BracketTree::Node(a, b) => {
                let mut w = a.leaves();
                w.extend(b.leaves());
                w
            }
        }
    }

    pub fn degree(&self, rank: usize) -> MultiDegree {
        word_degree(&self.leaves(), rank)
    }

    /// Image in the tensor algebra: brackets become commutators.
    pub fn expand(&self) -> WordCombination {
        match self {
            BracketTree::Leaf(i) => WordCombination::word(vec![*i]),
            BracketTree::Node(a, b) => a.expand().commutator(&b.expand()),
        }
    }

    /// Every bracketing of every arrangement of the given letters.
    pub fn all_bracketings(deg: &MultiDegree) -> Vec<BracketTree> {
        let mut out = Vec::new();
        for w in words_of_degree(deg) {
            out.extend(Self::bracketings_of_word(&w));
        }
        out
    }

    fn bracketings_of_word(w: &[u8]) -> Vec<BracketTree> {
        if w.len() == 1 {
            return vec![BracketTree::Leaf(w[0])];
        }
        let mut out = Vec::new();
        for k in 1..w.len() {
            let left = Self::bracketings_of_word(&w[..k]);
            let right = Self::bracketings_of_word(&w[k..]);
            for a in &left {
                for b in &right {
                    out.push(BracketTree::node(a.clone(), b.clone()));
                }
            }
        }
        out
    }

    pub fn format_with(&self, letter: char) -> String {
        match self {
            BracketTree::Leaf(i) => format!("{letter}{}", i + 1),
            BracketTree::Node(a, b) => {
                format!("[{},{}]", a.format_with(letter), b.format_with(letter))
            }
        }
    }
}

impl fmt::Display for BracketTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.format_with('f'))
    }
}
