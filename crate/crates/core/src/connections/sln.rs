//! The `sl_N` specialization: pairing tables from Dynkin labels, coordinates of `μ` in
//! the fundamental coweights, and the operators `T(ν, μ)`.

use std::sync::Arc;

use num::traits::Zero;

use crate::error::{KzError, Result};
use crate::free_kac_moody::{AlgebraData, KacMoody, MultiDegree};
use crate::linalg::{Matrix, QMatrix};
use crate::rational::{qi, Q};
use crate::weight_modules::{HighestWeightData, ModVec, MuVector, TensorVerma};

use super::Field;

#[derive(Clone, Debug, PartialEq)]
pub struct SlnData {
    pub n_rank: usize,
    /// Dynkin labels of each `Λ_j`.
    pub labels: Vec<Vec<Q>>,
    /// Inverse Cartan matrix, `⟨ω_a, ϖ_b⟩`.
    pub inv_cartan: QMatrix,
}

/// Builds the `A_{N−1}` data and the weight tables for highest weights given by
/// Dynkin labels.
pub fn sln_setup(n: usize, labels: Vec<Vec<Q>>) -> Result<(AlgebraData, HighestWeightData, SlnData)> {
    let alg = AlgebraData::sln(n)?;
    let r = n - 1;
    if labels.iter().any(|l| l.len() != r) {
        return Err(KzError::Dimension(format!("sl_{n} weights need {r} Dynkin labels each")));
    }
    let inv = QMatrix::from_fn(r, r, |a, b| {
        let (a, b) = (a + 1, b + 1);
        Q::new(((a.min(b) * (n - a.max(b))) as i64).into(), (n as i64).into())
    });
    let lam_lam = QMatrix::from_fn(labels.len(), labels.len(), |i, j| {
        let mut s = Q::zero();
        for a in 0..r {
            for b in 0..r {
                s += &labels[i][a] * &inv[(a, b)] * &labels[j][b];
            }
        }
        s
    });
    let hw = HighestWeightData::new(labels.clone(), lam_lam)?;
    Ok((
        alg,
        hw,
        SlnData {
            n_rank: n,
            labels,
            inv_cartan: inv,
        },
    ))
}

impl SlnData {
    pub fn rank(&self) -> usize {
        self.n_rank - 1
    }

    /// Pairings of `μ = Σ_a μ_a ϖ_a`: `⟨α_i, μ⟩ = μ_i`, `⟨Λ_j, μ⟩ = Σ labels·A^{-1}·μ`.
    pub fn mu_vector<T: Field>(&self, coords: &[T]) -> Result<MuVector<T>> {
        let r = self.rank();
        if coords.len() != r {
            return Err(KzError::Dimension(format!("sl_{} needs {r} coordinates", self.n_rank)));
        }
        let lam = self
            .labels
            .iter()
            .map(|l| {
                let mut s = T::zero();
                for a in 0..r {
                    for b in 0..r {
                        s = s + T::from_q(&(&l[a] * &self.inv_cartan[(a, b)])) * coords[b].clone();
                    }
                }
                s
            })
            .collect();
        Ok(MuVector::new(coords.to_vec(), lam))
    }

    /// Positive roots `α_b + .. + α_{c−1}` for `1 ≤ b < c ≤ N`, with their `(b, c)`.
    pub fn positive_roots(&self) -> Vec<((usize, usize), MultiDegree)> {
        let r = self.rank();
        let mut out = Vec::new();
        for b in 1..self.n_rank {
            for c in b + 1..=self.n_rank {
                let d = (0..r).map(|k| u32::from(k + 1 >= b && k + 1 < c)).collect();
                out.push(((b, c), MultiDegree(d)));
            }
        }
        out
    }

    /// `⟨α_b + .. + α_{c−1}, μ⟩ = μ_b + .. + μ_{c−1}` in coweight coordinates.
    pub fn root_denominator<T: Field>(&self, b: usize, c: usize, coords: &[T]) -> T {
        coords[b - 1..c - 1].iter().fold(T::zero(), |acc, x| acc + x.clone())
    }
}

/// `f̄_α ē_α + ē_α f̄_α` on `M_λ` for each positive root of `sl_N`, acting on the whole
/// tensor product. `T(ν, μ)` is a combination of these.
#[derive(Debug)]
pub struct RootPairOperators {
    pub roots: Vec<(MultiDegree, QMatrix)>,
}

impl RootPairOperators {
    pub fn new(tv: &TensorVerma, sln: &SlnData, lambda: &MultiDegree) -> Result<Self> {
        let sp = tv.space(lambda)?;
        let mut roots = Vec::new();
        for (_, alpha) in sln.positive_roots() {
            let qd = tv.km.quotient_dual_bases(&alpha)?;
            let mut m = QMatrix::zeros(sp.dim(), sp.dim());
            for (col, idx) in sp.basis.iter().enumerate() {
                let v = ModVec::basis(idx.clone());
                let mut out = ModVec::zero();
                for l in 0..qd.len() {
                    let fe = tv.apply_lie(&qd.f_bar[l], &tv.apply_lie(&qd.e_bar[l], &v));
                    let ef = tv.apply_lie(&qd.e_bar[l], &tv.apply_lie(&qd.f_bar[l], &v));
                    out.add_scaled(&fe, &qi(1));
                    out.add_scaled(&ef, &qi(1));
                }
                for (row, c) in sp.coords(&out)?.into_iter().enumerate() {
                    m[(row, col)] = c;
                }
            }
            roots.push((alpha, m));
        }
        Ok(RootPairOperators { roots })
    }

    /// `T(ν, μ) = Σ_{α ∈ Δ} (⟨α,ν⟩/⟨α,μ⟩) e_{−α} e_α`, both signs of each root.
    pub fn t_operator<T: Field>(&self, nu: &MuVector<T>, mu: &MuVector<T>) -> Result<Matrix<T>> {
        let dim = self.roots.first().map_or(0, |(_, m)| m.nrows());
        let mut t = Matrix::zeros(dim, dim);
        for (alpha, m) in &self.roots {
            let den = mu.pair_root(alpha);
            if den.is_zero() {
                return Err(KzError::Resonance { alpha: alpha.0.clone() });
            }
            t.axpy(&(nu.pair_root(alpha) / den), &m.to_field());
        }
        Ok(t)
    }
}

/// Convenience constructor for an `sl_N` tensor product of Verma modules.
pub fn sln_verma(n: usize, labels: Vec<Vec<Q>>) -> Result<(Arc<TensorVerma>, SlnData)> {
    let (alg, hw, sln) = sln_setup(n, labels)?;
    let km = Arc::new(KacMoody::new(alg));
    Ok((Arc::new(TensorVerma::new(km, hw)?), sln))
}

/// True when no Serre relation lives in a degree `≤ λ`, so the weight space of the
/// Verma module without Serre relations coincides with that of the `sl_N` Verma module.
pub fn serre_free_below(km: &KacMoody, lambda: &MultiDegree) -> Result<bool> {
    for d in lambda.nonzero_below() {
        if km.lyndon_basis(&d)?.is_empty() {
            continue;
        }
        if km.quotient_dual_bases(&d)?.kernel_dim > 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn setup_examples() {
        let (a, _, _) = sln_setup(2, vec![vec![qi(1)]]).unwrap();
        assert_eq!(a.gram, QMatrix::from_rows(vec![vec![qi(2)]]));
        let (a, hw, s) = sln_setup(3, vec![vec![qi(1), qi(0)], vec![qi(0), qi(1)]]).unwrap();
        assert_eq!(a.gram, QMatrix::from_rows(vec![vec![qi(2), qi(-1)], vec![qi(-1), qi(2)]]));
        assert_eq!(hw.lam_lam[(0, 1)], q(1, 3));
        assert_eq!(hw.lam_lam[(0, 0)], q(2, 3));
        let mu = [q(2, 5), q(3, 7)];
        assert_eq!(s.root_denominator(1, 3, &mu), q(2, 5) + q(3, 7));
        assert_eq!(s.positive_roots().len(), 3);
        assert!(sln_setup(1, vec![]).is_err());
    }

    #[test]
    fn t_commutes_sl3() {
        let (tv, s) = sln_verma(3, vec![vec![q(2, 3), q(-1, 5)]]).unwrap();
        let lam = MultiDegree(vec![1, 1]);
        let ops = RootPairOperators::new(&tv, &s, &lam).unwrap();
        let mu = s.mu_vector(&[q(3, 7), q(5, 11)]).unwrap();
        let n1 = s.mu_vector(&[q(1, 2), q(-2, 3)]).unwrap();
        let n2 = s.mu_vector(&[q(4, 5), q(1, 9)]).unwrap();
        let t1 = ops.t_operator(&n1, &mu).unwrap();
        let t2 = ops.t_operator(&n2, &mu).unwrap();
        assert!(t1.commutator(&t2).is_zero());
        assert!(serre_free_below(&tv.km, &lam).unwrap());
        assert!(!serre_free_below(&tv.km, &MultiDegree(vec![2, 1])).unwrap());
    }
}
