//! Lifting a weight `λ` to `(1, .., 1)` with one generator per integration variable, the
//! sets `Σ(I)`, and the projection `π` of lifted solutions.

use std::sync::Arc;

use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::connections::{ConnectionParams, Field, KzSystem};
use crate::error::{KzError, Result};
use crate::free_kac_moody::{AlgebraData, KacMoody, MultiDegree};
use crate::hypergeometric::{canonical_lift, colors, lifts, Hypergeometric, QuadratureSettings};
use crate::linalg::QMatrix;
use crate::weight_modules::{DeltaMethod, HighestWeightData, MuVector, TensorIndex, TensorVerma};

/// Pairing tables of the lifted data: generators `α̃_1..α̃_m` with `α̃_j ↦ α_{c(j)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftData<T> {
    pub colors: Vec<usize>,
    /// `(α̃_j, α̃_k) = (α_{c(j)}, α_{c(k)})`.
    pub gram: QMatrix,
    /// `(Λ̃_l, α̃_j) = (Λ_l, α_{c(j)})` and `(Λ̃_l, Λ̃_k) = (Λ_l, Λ_k)`.
    pub hw: HighestWeightData,
    /// `⟨α̃_j, μ̃⟩ = ⟨α_{c(j)}, μ⟩`, `⟨Λ̃_l, μ̃⟩ = ⟨Λ_l, μ⟩`.
    pub mu: MuVector<T>,
}

pub fn lift<T: Field>(lambda: &MultiDegree, alg: &AlgebraData, hw: &HighestWeightData, mu: &MuVector<T>) -> Result<LiftData<T>> {
    let r = alg.gram.nrows();
    if lambda.rank() != r || hw.rank() != r || mu.alpha.len() != r {
        return Err(KzError::Dimension(format!(
            "rank mismatch: λ has {}, gram {r}, weights {}, μ {}",
            lambda.rank(),
            hw.rank(),
            mu.alpha.len()
        )));
    }
    let c = colors(lambda);
    let m = c.len();
    let gram = QMatrix::from_fn(m, m, |j, k| alg.b(c[j], c[k]).clone());
    let lam_alpha = hw
        .lam_alpha
        .iter()
        .map(|row| c.iter().map(|&cj| row[cj].clone()).collect())
        .collect();
    let hw = HighestWeightData::new(lam_alpha, hw.lam_lam.clone())?;
    let mu = MuVector::new(c.iter().map(|&cj| mu.alpha[cj].clone()).collect(), mu.lam.clone());
    Ok(LiftData { colors: c, gram, hw, mu })
}

impl<T: Field> LiftData<T> {
    pub fn m(&self) -> usize {
        self.colors.len()
    }

    /// `λ̃ = (1, .., 1)`.
    pub fn lifted_lambda(&self) -> MultiDegree {
        MultiDegree(vec![1; self.m()])
    }

    /// The lifted algebra, without Serre relations, on the lifted gram.
    pub fn algebra(&self) -> Result<AlgebraData> {
        AlgebraData::free(self.gram.clone())
    }

    /// True when pulling the lifted tables back along `c` gives the original ones.
    pub fn pulls_back_to(&self, alg: &AlgebraData, hw: &HighestWeightData, mu: &MuVector<T>) -> bool {
        let c = &self.colors;
        let m = c.len();
        (0..m).all(|j| (0..m).all(|k| self.gram[(j, k)] == *alg.b(c[j], c[k])))
            && hw.lam_alpha.iter().zip(&self.hw.lam_alpha).all(|(orig, lifted)| {
                lifted.len() == m && (0..m).all(|j| lifted[j] == orig[c[j]])
            })
            && self.hw.lam_lam == hw.lam_lam
            && (0..m).all(|j| self.mu.alpha[j] == mu.alpha[c[j]])
            && self.mu.lam == mu.lam
    }

    /// `s_h^*`: a lifted multidegree pushed forward along the coloring.
    pub fn push_degree(&self, lifted: &MultiDegree) -> MultiDegree {
        let r = self.colors.iter().max().map_or(0, |&x| x + 1);
        let mut d = vec![0; r];
        for (j, &k) in lifted.0.iter().enumerate() {
            d[self.colors[j]] += k;
        }
        MultiDegree(d)
    }
}

fn lift_index(l: &[Vec<usize>]) -> TensorIndex {
    let groups: Vec<Vec<u8>> = l.iter().map(|g| g.iter().map(|&v| v as u8).collect()).collect();
    TensorIndex::from_groups(&groups)
}

/// `Σ(I)` as lifted indices `K` with `c(K) = I`.
pub fn sigma_of(idx: &TensorIndex, lambda: &MultiDegree) -> Vec<TensorIndex> {
    lifts(idx, &colors(lambda)).iter().map(|l| lift_index(l)).collect()
}

/// `π`: `u_I = Σ_{K ∈ Σ(I)} ũ_K`, on vectors indexed by `lifted_basis`, returned in the
/// order of `basis`.
pub fn project_pi<T: Field>(lambda: &MultiDegree, basis: &[TensorIndex], lifted_basis: &[TensorIndex], u_tilde: &[T]) -> Result<Vec<T>> {
    if lifted_basis.len() != u_tilde.len() {
        return Err(KzError::Dimension(format!(
            "lifted vector has {} entries for a basis of {}",
            u_tilde.len(),
            lifted_basis.len()
        )));
    }
    basis
        .iter()
        .map(|i| {
            sigma_of(i, lambda).iter().try_fold(T::zero(), |acc, k| {
                let pos = lifted_basis
                    .iter()
                    .position(|b| b == k)
                    .ok_or_else(|| KzError::Dimension(format!("{k} missing from the lifted basis")))?;
                Ok(acc + u_tilde[pos].clone())
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetrizationReport {
    pub dim: usize,
    pub lifted_dim: usize,
    pub max_abs_diff: f64,
    pub rel_diff: f64,
}

/// Computes the solution matrix on `M_λ` directly and through the lifted system, then
/// compares row by row after projecting the lifted columns with `π`.
pub fn end_to_end(tv: Arc<TensorVerma>, lambda: &MultiDegree, p: &ConnectionParams<f64>, st: &QuadratureSettings) -> Result<SymmetrizationReport> {
    let direct_sys = Arc::new(KzSystem::new(tv.clone(), lambda, DeltaMethod::Quotient)?);
    let direct = Hypergeometric::new(direct_sys.clone()).solution_matrix(p, st)?;

    let ld = lift(lambda, &tv.km.data, &tv.hw, &p.mu)?;
    let lifted_tv = Arc::new(TensorVerma::new(Arc::new(KacMoody::new(ld.algebra()?)), ld.hw.clone())?);
    let lifted_sys = Arc::new(KzSystem::new(lifted_tv, &ld.lifted_lambda(), DeltaMethod::Quotient)?);
    let lifted_p = ConnectionParams {
        z: p.z.clone(),
        mu: ld.mu.clone(),
        kappa: p.kappa,
    };
    let lifted = Hypergeometric::new(lifted_sys.clone()).solution_matrix(&lifted_p, st)?;

    let cols = colors(lambda);
    let mut max_abs = 0.0f64;
    let scale = direct.u.max_abs().max(f64::MIN_POSITIVE);
    for (row, cell) in direct.cells.iter().enumerate() {
        let k = lift_index(&canonical_lift(&cell.index, &cols));
        let lrow = lifted
            .cells
            .iter()
            .position(|c| c.index == k)
            .ok_or_else(|| KzError::Dimension(format!("no lifted chamber for {k}")))?;
        let projected: Vec<Complex64> = project_pi(lambda, &direct.columns, &lifted.columns, lifted.u.row(lrow))?;
        for (a, b) in projected.iter().zip(direct.u.row(row)) {
            max_abs = max_abs.max((a - b).norm());
        }
    }
    Ok(SymmetrizationReport {
        dim: direct.u.nrows(),
        lifted_dim: lifted.u.nrows(),
        max_abs_diff: max_abs,
        rel_diff: max_abs / scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi, Q};
    use crate::weight_modules::enumerate_basis;

    #[test]
    fn lift_examples() {
        let alg = AlgebraData::sln(2).unwrap();
        let hw = HighestWeightData::new(vec![vec![q(-3, 5)]], QMatrix::from_rows(vec![vec![q(1, 2)]])).unwrap();
        let mu: MuVector<Q> = MuVector::new(vec![q(2, 3)], vec![q(1, 7)]);
        let ld = lift(&MultiDegree(vec![2]), &alg, &hw, &mu).unwrap();
        assert_eq!(ld.gram, QMatrix::from_rows(vec![vec![qi(2), qi(2)], vec![qi(2), qi(2)]]));
        assert_eq!(ld.mu.lam, mu.lam);
        assert!(ld.pulls_back_to(&alg, &hw, &mu));
        assert_eq!(ld.push_degree(&MultiDegree(vec![1, 1])), MultiDegree(vec![2]));
    }

    #[test]
    fn sigma_examples() {
        let lam = MultiDegree(vec![1, 1]);
        for i in enumerate_basis(&lam, 2) {
            assert_eq!(sigma_of(&i, &lam).len(), 1);
        }
        let lam = MultiDegree(vec![2]);
        let i = TensorIndex::from_groups(&[vec![0u8, 0]]);
        let s = sigma_of(&i, &lam);
        assert_eq!(
            s,
            vec![TensorIndex::from_groups(&[vec![0u8, 1]]), TensorIndex::from_groups(&[vec![1u8, 0]])]
        );
        let lifted = enumerate_basis(&MultiDegree(vec![1, 1]), 1);
        let u = project_pi(&lam, &[i], &lifted, &[qi(3), qi(4)]).unwrap();
        assert_eq!(u, vec![qi(7)]);
    }
}
