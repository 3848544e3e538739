//! Adjoint actions between `n_+` and `n_-`, the invariant form `K`, the
//! contravariant form `S` on graded pieces, and the quotient dual bases.

use std::sync::Arc;

use num::traits::Zero;

use crate::error::{KzError, Result};
use crate::linalg::QMatrix;
use crate::rational::{qi, Q};

use super::words::{BracketTree, WordCombination};
use super::{KacMoody, LieElement, MultiDegree, Side};

/// Result of `[e_i, x]` (or `[f_i, y]`): a Lie element one degree lower, plus the
/// coefficient `c` of a Cartan part `c·h_i` that appears only when `x` has degree `α_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdResult {
    pub lie: Option<LieElement>,
    pub cartan: Q,
}

/// Representatives of the quotient `ḡ_{-λ'}` and their `K`-dual family in `ḡ_{λ'}`.
#[derive(Clone, Debug)]
pub struct QuotientDual {
    pub degree: MultiDegree,
    /// Positions of the representatives inside the Lyndon basis.
    pub pivots: Vec<usize>,
    pub kernel_dim: usize,
    pub f_bar: Vec<LieElement>,
    pub e_bar: Vec<LieElement>,
    /// Tensor-algebra images, used when the elements act on modules.
    pub f_words: Vec<WordCombination>,
    pub e_words: Vec<WordCombination>,
}

impl QuotientDual {
    pub fn len(&self) -> usize {
        self.f_bar.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f_bar.is_empty()
    }
}

impl KacMoody {
    /// `[e_i, x]` for `x ∈ n_-`, using `[e_i, f_j] = δ_ij h_i` and `[h, f_j] = -<α_j, h> f_j`.
    pub fn ad_e(&self, i: usize, x: &LieElement) -> Result<AdResult> {
        if x.side != Side::Minus {
            return Err(KzError::Domain("ad_e expects an element of n_-".into()));
        }
        self.ad_lower(i, x)
    }

    /// `[f_i, y]` for `y ∈ n_+`, obtained from `ad_e` through `τ`.
    pub fn ad_f(&self, i: usize, y: &LieElement) -> Result<AdResult> {
        if y.side != Side::Plus {
            return Err(KzError::Domain("ad_f expects an element of n_+".into()));
        }
        let r = self.ad_lower(i, &self.tau(y))?;
        Ok(AdResult {
            lie: r.lie.map(|l| self.tau(&l).scale(&qi(-1))),
            cartan: r.cartan,
        })
    }

    fn ad_lower(&self, i: usize, x: &LieElement) -> Result<AdResult> {
        let r = self.rank();
        if x.degree.0[i] == 0 || x.is_zero() {
            let lie = x
                .degree
                .checked_sub(&MultiDegree::unit(i, r))
                .filter(|d| !d.is_zero())
                .map(|d| LieElement::zero(x.side, d));
            return Ok(AdResult { lie, cartan: Q::zero() });
        }
        let target = x.degree.checked_sub(&MultiDegree::unit(i, r)).unwrap();
        if target.is_zero() {
            return Ok(AdResult {
                lie: None,
                cartan: x.coefficient(0),
            });
        }
        // [e_i, f_w] = Σ_{p: w_p = i} f_{w without p} (h_i - Σ_{l>p} b_{w_l, i}); the h_i
        // terms cancel for Lie elements of degree >= 2.
        let mut out = WordCombination::zero();
        for (w, c) in self.monomial_expansion(x).iter() {
            for p in 0..w.len() {
                if w[p] as usize != i {
                    continue;
                }
                let tail: Q = w[p + 1..]
                    .iter()
                    .fold(Q::zero(), |acc, &l| acc + self.b(l as usize, i));
                if tail.is_zero() {
                    continue;
                }
                let mut v = w.clone();
                v.remove(p);
                out.add_term(v, -(c * &tail));
            }
        }
        Ok(AdResult {
            lie: Some(self.from_words(x.side, &target, out)?),
            cartan: Q::zero(),
        })
    }

    /// Applies `ad` of a word of generators of the opposite side, last letter first.
    fn ad_word(&self, word: &[u8], x: &LieElement) -> Result<LieElement> {
        let mut cur = x.clone();
        for &l in word.iter().rev() {
            let r = match cur.side {
                Side::Minus => self.ad_e(l as usize, &cur)?,
                Side::Plus => self.ad_f(l as usize, &cur)?,
            };
            match r.lie {
                Some(e) => cur = e,
                None => {
                    return Err(KzError::Domain(
                        "adjoint string reached the Cartan subalgebra before its end".into(),
                    ))
                }
            }
        }
        Ok(cur)
    }

    /// `ad_a(x)` for a bracket tree `a` on the side opposite to `x`.
    fn ad_tree(&self, a: &BracketTree, x: &LieElement) -> Result<LieElement> {
        let target = x
            .degree
            .checked_sub(&a.degree(self.rank()))
            .ok_or_else(|| KzError::Domain("ad_tree degree underflow".into()))?;
        let mut acc = LieElement::zero(x.side, target);
        for (w, c) in a.expand().iter() {
            let term = self.ad_word(w, x)?;
            acc = acc.add(&term.scale(c))?;
        }
        Ok(acc)
    }

    fn check_k_args(&self, x: &LieElement, y: &LieElement) -> Result<()> {
        if x.side != Side::Minus || y.side != Side::Plus {
            return Err(KzError::Domain("K expects (n_-, n_+) arguments".into()));
        }
        if x.degree != y.degree {
            return Err(KzError::Domain(format!(
                "K pairs opposite degrees only: {} vs {}",
                x.degree, y.degree
            )));
        }
        Ok(())
    }

    /// Invariant form `K(x, y)`, `x ∈ n_-`, `y ∈ n_+`, by recursion on the bracket
    /// structure of `y`: `K(x, [a, b]) = K([x, a], b) = -K(ad_a x, b)`.
    pub fn invariant_form_k(&self, x: &LieElement, y: &LieElement) -> Result<Q> {
        self.check_k_args(x, y)?;
        if x.is_zero() || y.is_zero() {
            return Ok(Q::zero());
        }
        let piece = self.lyndon_basis(&y.degree)?;
        let mut acc = Q::zero();
        for (k, c) in y.coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc += c * self.k_on_tree(x, &piece.trees[k])?;
            }
        }
        Ok(acc)
    }

    /// `K(x, y)` where `y` is the `e`-mirror of an arbitrary bracket tree.
    pub fn k_on_tree(&self, x: &LieElement, y: &BracketTree) -> Result<Q> {
        if x.degree != y.degree(self.rank()) {
            return Err(KzError::Domain("K pairs opposite degrees only".into()));
        }
        match y {
            BracketTree::Leaf(_) => Ok(x.coefficient(0)),
            BracketTree::Node(a, b) => {
                let xa = self.ad_tree(a, x)?;
                Ok(-self.k_on_tree(&xa, b)?)
            }
        }
    }

    /// Second route to `K`, recursing on the bracket structure of `x` instead:
    /// `K([a, b], y) = K(a, [b, y]) = K(a, ad_b y)`.
    pub fn invariant_form_k_via_minus(&self, x: &LieElement, y: &LieElement) -> Result<Q> {
        self.check_k_args(x, y)?;
        if x.is_zero() || y.is_zero() {
            return Ok(Q::zero());
        }
        let piece = self.lyndon_basis(&x.degree)?;
        let mut acc = Q::zero();
        for (k, c) in x.coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc += c * self.k_tree_minus(&piece.trees[k], y)?;
            }
        }
        Ok(acc)
    }

    fn k_tree_minus(&self, x: &BracketTree, y: &LieElement) -> Result<Q> {
        match x {
            BracketTree::Leaf(_) => Ok(y.coefficient(0)),
            BracketTree::Node(a, b) => {
                let by = self.ad_tree(b, y)?;
                self.k_tree_minus(a, &by)
            }
        }
    }

    /// Gram matrix of `S(x, y) = -K(τx, y)` on the Lyndon basis of `(n_-)_{λ'}`.
    pub fn contravariant_gram_n(&self, degree: &MultiDegree) -> Result<Arc<QMatrix>> {
        if let Some(g) = self.grams.lock().unwrap().get(degree) {
            return Ok(g.clone());
        }
        let piece = self.lyndon_basis(degree)?;
        let n = piece.len();
        let mut g = QMatrix::zeros(n, n);
        for a in 0..n {
            let ta = self.tau(&self.basis_element(Side::Minus, degree, a)?);
            for b in 0..n {
                let pb = self.basis_element(Side::Minus, degree, b)?;
                g[(a, b)] = -self.invariant_form_k(&pb, &ta)?;
            }
        }
        let g = Arc::new(g);
        self.grams
            .lock()
            .unwrap()
            .entry(degree.clone())
            .or_insert(g.clone());
        Ok(g)
    }

    /// Quotient of `(n_-)_{λ'}` by `ker S`, with a `K`-dual family on the `e` side.
    /// Representatives are the pivot Lyndon elements of the exact row reduction.
    pub fn quotient_dual_bases(&self, degree: &MultiDegree) -> Result<Arc<QuotientDual>> {
        if let Some(d) = self.duals.lock().unwrap().get(degree) {
            return Ok(d.clone());
        }
        let gram = self.contravariant_gram_n(degree)?;
        let (_, pivots) = gram.rref();
        let sub = gram.submatrix(&pivots, &pivots);
        let inv = sub
            .inverse()
            .expect("principal submatrix on independent columns of a symmetric matrix is invertible");
        let f_bar: Vec<LieElement> = pivots
            .iter()
            .map(|&p| self.basis_element(Side::Minus, degree, p))
            .collect::<Result<_>>()?;
        let tau_f: Vec<LieElement> = f_bar.iter().map(|x| self.tau(x)).collect();
        // ē_k = -Σ_q (G_P^{-1})_{kq} τ(f̄_q), so K(f̄_l, ē_k) = δ_lk.
        let mut e_bar = Vec::with_capacity(pivots.len());
        for k in 0..pivots.len() {
            let mut acc = LieElement::zero(Side::Plus, degree.clone());
            for (qd, t) in tau_f.iter().enumerate() {
                let c = -inv[(k, qd)].clone();
                if !c.is_zero() {
                    acc = acc.add(&t.scale(&c))?;
                }
            }
            e_bar.push(acc);
        }
        let f_words = f_bar.iter().map(|x| self.monomial_expansion(x)).collect();
        let e_words = e_bar.iter().map(|x| self.monomial_expansion(x)).collect();
        let d = Arc::new(QuotientDual {
            degree: degree.clone(),
            kernel_dim: gram.nrows() - pivots.len(),
            pivots,
            f_bar,
            e_bar,
            f_words,
            e_words,
        });
        self.duals
            .lock()
            .unwrap()
            .entry(degree.clone())
            .or_insert(d.clone());
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_kac_moody::AlgebraData;
    use crate::rational::q;

    fn km_with_b12(b12: Q) -> KacMoody {
        let g = QMatrix::from_rows(vec![vec![qi(2), b12.clone()], vec![b12, q(3, 2)]]);
        KacMoody::new(AlgebraData::free(g).unwrap())
    }

    #[test]
    fn ad_e_examples() {
        let b12 = q(-2, 5);
        let km = km_with_b12(b12.clone());
        let f1 = km.generator(Side::Minus, 0);
        let f2 = km.generator(Side::Minus, 1);
        let r = km.ad_e(0, &f1).unwrap();
        assert!(r.lie.is_none());
        assert_eq!(r.cartan, qi(1));
        let r = km.ad_e(1, &f1).unwrap();
        assert!(r.lie.is_none());
        assert!(r.cartan.is_zero());
        let f12 = km.bracket_reduce(&f1, &f2).unwrap();
        let r = km.ad_e(0, &f12).unwrap();
        assert_eq!(r.lie.unwrap(), f2.scale(&(-b12)));
    }

    #[test]
    fn k_examples() {
        let b12 = q(7, 3);
        let km = km_with_b12(b12.clone());
        let f1 = km.generator(Side::Minus, 0);
        let f2 = km.generator(Side::Minus, 1);
        let e1 = km.generator(Side::Plus, 0);
        let e2 = km.generator(Side::Plus, 1);
        assert_eq!(km.invariant_form_k(&f1, &e1).unwrap(), qi(1));
        assert!(km.invariant_form_k(&f1, &e2).is_err());
        let f12 = km.bracket_reduce(&f1, &f2).unwrap();
        let e12 = km.bracket_reduce(&e1, &e2).unwrap();
        assert_eq!(km.invariant_form_k(&f12, &e12).unwrap(), b12);
        assert_eq!(km.invariant_form_k_via_minus(&f12, &e12).unwrap(), b12);
    }

    #[test]
    fn gram_examples() {
        let b12 = q(7, 3);
        let km = km_with_b12(b12.clone());
        let g1 = km.contravariant_gram_n(&MultiDegree(vec![1, 0])).unwrap();
        assert_eq!(*g1, QMatrix::from_rows(vec![vec![qi(1)]]));
        let g11 = km.contravariant_gram_n(&MultiDegree(vec![1, 1])).unwrap();
        assert_eq!(*g11, QMatrix::from_rows(vec![vec![-b12]]));
        let km0 = km_with_b12(qi(0));
        let g0 = km0.contravariant_gram_n(&MultiDegree(vec![1, 1])).unwrap();
        assert!(g0.is_zero());
    }

    #[test]
    fn quotient_examples() {
        let b12 = q(7, 3);
        let km = km_with_b12(b12.clone());
        let d = km.quotient_dual_bases(&MultiDegree(vec![1, 0])).unwrap();
        assert_eq!(d.f_bar, vec![km.generator(Side::Minus, 0)]);
        assert_eq!(d.e_bar, vec![km.generator(Side::Plus, 0)]);
        let d = km.quotient_dual_bases(&MultiDegree(vec![1, 1])).unwrap();
        let e12 = km
            .bracket_reduce(&km.generator(Side::Plus, 0), &km.generator(Side::Plus, 1))
            .unwrap();
        assert_eq!(d.e_bar, vec![e12.scale(&(qi(1) / b12))]);
        let km0 = km_with_b12(qi(0));
        let d0 = km0.quotient_dual_bases(&MultiDegree(vec![1, 1])).unwrap();
        assert!(d0.is_empty());
        assert_eq!(d0.kernel_dim, 1);
    }
}
