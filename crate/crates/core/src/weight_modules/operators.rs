//! Casimir operators, the map `ν_{M−}`, and the dynamical operators `Δ_{±,α}`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{KzError, Result};
use crate::free_kac_moody::{LieElement, MultiDegree, Side, Word, WordCombination};
use crate::linalg::QMatrix;
use crate::rational::{qi, Q};

use super::{ModVec, TensorIndex, TensorVerma, WeightSpace};

/// An element of `n_− ⊗ M`, grouped by the module basis vector.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NuImage {
    pub terms: BTreeMap<TensorIndex, LieElement>,
}

impl NuImage {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add(&mut self, key: TensorIndex, x: &LieElement) -> Result<()> {
        if x.is_zero() {
            return Ok(());
        }
        let sum = match self.terms.get(&key) {
            Some(prev) => prev.add(x)?,
            None => x.clone(),
        };
        if sum.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, sum);
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeltaMethod {
    /// Through `ν_{M−}` and the coefficient functionals, transposed to `M`.
    Dual,
    /// `Σ_l f̄_l ē_l` over the quotient dual bases.
    Quotient,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeltaOperator {
    pub alpha: MultiDegree,
    pub matrix: QMatrix,
    /// Set when `S` is degenerate on `M_λ` or on `(n_−)_α`.
    pub degenerate: bool,
    /// In the degenerate regime the quotient result is compared against the dual one.
    pub agrees_with_dual: Option<bool>,
}

impl TensorVerma {
    fn apply_words_on(&self, words: &WordCombination, side: Side, j: usize, v: &ModVec) -> ModVec {
        let mut out = ModVec::zero();
        for (w, c) in words.iter() {
            let t = match side {
                Side::Minus => self.apply_f_word(w, j, v),
                Side::Plus => self.apply_e_word(w, j, v),
            };
            out.add_scaled(&t, c);
        }
        out
    }

    /// `Ω^{(ij)}` on `M_λ`: the Cartan part `(ν_i, ν_j)` plus
    /// `Σ_{λ'} Σ_l (ē_l^{(i)} f̄_l^{(j)} + f̄_l^{(i)} ē_l^{(j)})`.
    pub fn casimir_operator(&self, i: usize, j: usize, lambda: &MultiDegree) -> Result<QMatrix> {
        if i == j {
            return Err(KzError::Domain("Casimir Ω^(ij) needs i != j".into()));
        }
        if i >= self.n() || j >= self.n() {
            return Err(KzError::Range(format!("factor index out of range for n = {}", self.n())));
        }
        let sp = self.space(lambda)?;
        let duals = lambda
            .nonzero_below()
            .iter()
            .map(|d| self.km.quotient_dual_bases(d))
            .collect::<Result<Vec<_>>>()?;
        let columns: Vec<Result<Vec<Q>>> = sp
            .basis
            .par_iter()
            .map(|idx| {
                let v = ModVec::basis(idx.clone());
                let mut out = ModVec::zero();
                out.add_term(idx.clone(), self.factor_weight_pairing(idx, i, j));
                for qd in &duals {
                    for l in 0..qd.len() {
                        for (a, b) in [(i, j), (j, i)] {
                            let e = self.apply_words_on(&qd.e_words[l], Side::Plus, a, &v);
                            if e.is_zero() {
                                continue;
                            }
                            let fe = self.apply_words_on(&qd.f_words[l], Side::Minus, b, &e);
                            out.add_scaled(&fe, &qi(1));
                        }
                    }
                }
                sp.coords(&out)
            })
            .collect();
        columns_to_matrix(&sp, columns)
    }

    /// `ν_{M−}` on one factor, keyed by the module word.
    fn nu_factor(&self, j: usize, w: &[u8]) -> Result<Arc<BTreeMap<Word, LieElement>>> {
        if let Some(x) = self.nu.lock().unwrap().get(&(j, w.to_vec())) {
            return Ok(x.clone());
        }
        let mut out: BTreeMap<Word, LieElement> = BTreeMap::new();
        let mut add = |key: Word, x: LieElement| -> Result<()> {
            if x.is_zero() {
                return Ok(());
            }
            let s = match out.get(&key) {
                Some(p) => p.add(&x)?,
                None => x,
            };
            if s.is_zero() {
                out.remove(&key);
            } else {
                out.insert(key, s);
            }
            Ok(())
        };
        if let Some((&i, rest)) = w.split_first() {
            let fi = self.km.generator(Side::Minus, i as usize);
            // ν(f_i x) = f_i ⊗ h_i x + [f_i, ν(x)] + ν(x) with f_i on the module part
            let c = self.h_eigen(j, i as usize, rest);
            add(rest.to_vec(), fi.scale(&c))?;
            for (u, l) in self.nu_factor(j, rest)?.iter() {
                add(u.clone(), self.km.bracket_reduce(&fi, l)?)?;
                let mut fu = vec![i];
                fu.extend_from_slice(u);
                add(fu, l.clone())?;
            }
        }
        let out = Arc::new(out);
        self.nu.lock().unwrap().insert((j, w.to_vec()), out.clone());
        Ok(out)
    }

    /// `ν_{M−}(f_I v) = Σ_k ν^{(k)}(f_I v)`, where `ν^{(k)}` acts on factor `k` and leaves
    /// the other factors in place.
    pub fn nu_m_minus(&self, idx: &TensorIndex) -> Result<NuImage> {
        let mut out = NuImage::default();
        for k in 0..self.n() {
            for (u, l) in self.nu_factor(k, idx.group(k))?.iter() {
                out.add(idx.with_group(k, u), l)?;
            }
        }
        Ok(out)
    }

    /// Both sides of `S(ν_{M−}(x), a ⊗ y) = S(x, a y)` for `a ∈ n_−`.
    pub fn cd_lemma_sides(&self, x: &TensorIndex, a: &LieElement, y: &TensorIndex) -> Result<(Q, Q)> {
        let mut lhs = Q::zero();
        for (m, l) in self.nu_m_minus(x)?.terms.iter() {
            if l.degree != a.degree {
                continue;
            }
            let s_m = self.shapovalov(m, y);
            if s_m.is_zero() {
                continue;
            }
            let g = self.km.contravariant_gram_n(&a.degree)?;
            let mut s_n = Q::zero();
            for p in 0..l.coeffs.len() {
                for q in 0..a.coeffs.len() {
                    s_n += &l.coeffs[p] * &a.coeffs[q] * &g[(p, q)];
                }
            }
            lhs += s_n * s_m;
        }
        let ay = self.apply_lie(a, &ModVec::basis(y.clone()));
        let rhs = ay
            .iter()
            .fold(Q::zero(), |acc, (k, c)| acc + c * self.shapovalov(x, k));
        Ok((lhs, rhs))
    }

    /// Both sides of the Cartan half: `S(½ h_{wt(x)} ⊗ x, h_i ⊗ y)` and `½ S(x, h_i y)`.
    pub fn cd_lemma_cartan_sides(&self, x: &TensorIndex, i: usize, y: &TensorIndex) -> (Q, Q) {
        let half = Q::new(1.into(), 2.into());
        let s = self.shapovalov(x, y);
        let wt = |t: &TensorIndex| -> Q {
            (0..self.n()).fold(Q::zero(), |acc, j| acc + self.h_eigen(j, i, t.group(j)))
        };
        (&half * wt(x) * &s, half * wt(y) * s)
    }

    /// Matrix of `−Δ_{−,α}` on `M*_λ` in the dual basis `(f_I v)*`:
    /// `Σ_w Δ_w ∘ (Σ_j e_{w_k}^{(j)}..e_{w_1}^{(j)})` with the coefficient functionals
    /// `Δ_w` read off `ν_{M−}`.
    pub fn delta_minus(&self, alpha: &MultiDegree, lambda: &MultiDegree) -> Result<QMatrix> {
        let sp = self.space(lambda)?;
        if alpha.rank() != self.rank() || alpha.is_zero() {
            return Err(KzError::Domain(format!("Δ needs a positive multidegree, got {alpha}")));
        }
        if !alpha.le(lambda) {
            return Ok(QMatrix::zeros(sp.dim(), sp.dim()));
        }
        let words = self.words(alpha);
        // Row J: the functional (f_J v)* ∘ (−Δ_−)^T, i.e. the image of f_J v.
        let rows: Vec<Result<Vec<Q>>> = sp
            .basis
            .par_iter()
            .map(|idx| {
                let mut y = ModVec::zero();
                for (m, l) in self.nu_m_minus(idx)?.terms.iter() {
                    if l.degree != *alpha {
                        continue;
                    }
                    let mv = ModVec::basis(m.clone());
                    for w in &words {
                        let d = self.km.delta_functional(w, l);
                        if d.is_zero() {
                            continue;
                        }
                        for j in 0..self.n() {
                            y.add_scaled(&self.apply_f_word(w, j, &mv), &d);
                        }
                    }
                }
                sp.coords(&y)
            })
            .collect();
        let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
        Ok(QMatrix::from_rows(rows))
    }

    fn delta_plus_quotient_matrix(&self, alpha: &MultiDegree, sp: &WeightSpace) -> Result<QMatrix> {
        let qd = self.km.quotient_dual_bases(alpha)?;
        let columns: Vec<Result<Vec<Q>>> = sp
            .basis
            .par_iter()
            .map(|idx| {
                let v = ModVec::basis(idx.clone());
                let mut out = ModVec::zero();
                for l in 0..qd.len() {
                    let mut e = ModVec::zero();
                    for j in 0..self.n() {
                        e.add_scaled(&self.apply_words_on(&qd.e_words[l], Side::Plus, j, &v), &qi(1));
                    }
                    if e.is_zero() {
                        continue;
                    }
                    for j in 0..self.n() {
                        out.add_scaled(&self.apply_words_on(&qd.f_words[l], Side::Minus, j, &e), &qi(1));
                    }
                }
                sp.coords(&out)
            })
            .collect();
        columns_to_matrix(sp, columns)
    }

    /// `Δ_{+,α}` on `M_λ`; zero when `α` is not below `λ`.
    pub fn delta_plus(&self, alpha: &MultiDegree, lambda: &MultiDegree, method: DeltaMethod) -> Result<DeltaOperator> {
        let sp = self.space(lambda)?;
        if alpha.rank() != self.rank() || alpha.is_zero() {
            return Err(KzError::Domain(format!("Δ needs a positive multidegree, got {alpha}")));
        }
        if !alpha.le(lambda) {
            return Ok(DeltaOperator {
                alpha: alpha.clone(),
                matrix: QMatrix::zeros(sp.dim(), sp.dim()),
                degenerate: false,
                agrees_with_dual: None,
            });
        }
        let degenerate = self.km.quotient_dual_bases(alpha)?.kernel_dim > 0
            || self.shapovalov_gram(lambda)?.rank() < sp.dim();
        let dual = || -> Result<QMatrix> { Ok(self.delta_minus(alpha, lambda)?.transpose()) };
        let (matrix, agrees_with_dual) = match method {
            DeltaMethod::Dual => (dual()?, None),
            DeltaMethod::Quotient => {
                let m = self.delta_plus_quotient_matrix(alpha, &sp)?;
                let agree = if degenerate { Some(m == dual()?) } else { None };
                (m, agree)
            }
        };
        Ok(DeltaOperator {
            alpha: alpha.clone(),
            matrix,
            degenerate,
            agrees_with_dual,
        })
    }
}

fn columns_to_matrix(sp: &WeightSpace, columns: Vec<Result<Vec<Q>>>) -> Result<QMatrix> {
    let columns = columns.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(QMatrix::from_fn(sp.dim(), sp.dim(), |a, b| columns[b][a].clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_kac_moody::{AlgebraData, KacMoody};
    use crate::rational::q;
    use crate::weight_modules::HighestWeightData;

    fn sl2_like(a1: Q, a2: Q, l12: Q) -> TensorVerma {
        let km = Arc::new(KacMoody::new(AlgebraData::free(QMatrix::from_rows(vec![vec![qi(2)]])).unwrap()));
        let hw = HighestWeightData::new(
            vec![vec![a1], vec![a2]],
            QMatrix::from_rows(vec![vec![qi(0), l12.clone()], vec![l12, qi(0)]]),
        )
        .unwrap();
        TensorVerma::new(km, hw).unwrap()
    }

    #[test]
    fn casimir_sl2_like() {
        let (a1, a2, l12) = (q(3, 4), q(-2, 7), q(5, 9));
        let tv = sl2_like(a1.clone(), a2.clone(), l12.clone());
        let om0 = tv.casimir_operator(0, 1, &MultiDegree(vec![0])).unwrap();
        assert_eq!(om0, QMatrix::from_rows(vec![vec![l12.clone()]]));
        let om = tv.casimir_operator(0, 1, &MultiDegree(vec![1])).unwrap();
        let expect = QMatrix::from_rows(vec![
            vec![&l12 - &a2, a2.clone()],
            vec![a1.clone(), &l12 - &a1],
        ]);
        assert_eq!(om, expect);
        assert_eq!(tv.casimir_operator(1, 0, &MultiDegree(vec![1])).unwrap(), om);
        assert!(tv.casimir_operator(0, 0, &MultiDegree(vec![1])).is_err());
    }

    #[test]
    fn nu_one_step() {
        let a = q(3, 4);
        let km = Arc::new(KacMoody::new(AlgebraData::free(QMatrix::from_rows(vec![vec![qi(2)]])).unwrap()));
        let hw = HighestWeightData::new(vec![vec![a.clone()]], QMatrix::from_rows(vec![vec![qi(0)]])).unwrap();
        let tv = TensorVerma::new(km.clone(), hw).unwrap();
        assert!(tv.nu_m_minus(&TensorIndex::vacuum(1)).unwrap().is_zero());
        let nu = tv.nu_m_minus(&TensorIndex::from_groups(&[vec![0u8]])).unwrap();
        assert_eq!(nu.terms.len(), 1);
        assert_eq!(nu.terms[&TensorIndex::vacuum(1)], km.generator(Side::Minus, 0).scale(&a));
    }

    #[test]
    fn delta_plus_sl2_like() {
        let (a1, a2) = (q(3, 4), q(-2, 7));
        let tv = sl2_like(a1.clone(), a2.clone(), qi(1));
        let lam = MultiDegree(vec![1]);
        let expect = QMatrix::from_rows(vec![vec![a1.clone(), a2.clone()], vec![a1, a2]]);
        for m in [DeltaMethod::Dual, DeltaMethod::Quotient] {
            let d = tv.delta_plus(&MultiDegree(vec![1]), &lam, m).unwrap();
            assert_eq!(d.matrix, expect);
        }
        let z = tv.delta_plus(&MultiDegree(vec![2]), &lam, DeltaMethod::Dual).unwrap();
        assert!(z.matrix.is_zero());
    }
}
