//! The KZ operators `B_i`, the dynamical operators `C_{μ'}`, their closed-form
//! derivatives, and exact compatibility checks.

mod sln;

pub use sln::{serre_free_below, sln_setup, sln_verma, RootPairOperators, SlnData};

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{KzError, Result};
use crate::free_kac_moody::{word_degree, MultiDegree};
use crate::linalg::{Matrix, QMatrix, Scalar};
use crate::rational::{FromQ, Magnitude};
use crate::weight_modules::{DeltaMethod, MuVector, TensorVerma, WeightSpace};

/// Scalars the operators can be assembled over: exact rationals or floats.
pub trait Field: Scalar + FromQ + Magnitude {}
impl<T: Scalar + FromQ + Magnitude> Field for T {}

#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionParams<T> {
    pub z: Vec<T>,
    pub mu: MuVector<T>,
    pub kappa: T,
}

impl<T: Field> ConnectionParams<T> {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.z.len() != n || self.mu.lam.len() != n {
            return Err(KzError::Dimension(format!(
                "expected {n} points and {n} values <Λ_j, μ>, got {} and {}",
                self.z.len(),
                self.mu.lam.len()
            )));
        }
        if self.kappa.is_zero() {
            return Err(KzError::Domain("κ must be nonzero".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if (self.z[i].clone() - self.z[j].clone()).is_zero() {
                    return Err(KzError::Singular(format!("z_{} = z_{}", j + 1, i + 1)));
                }
            }
        }
        Ok(())
    }
}

/// Exact structure of the system on `M_λ`: Casimirs, dynamical operators and the
/// group degrees needed for the diagonal terms. Parameters enter only at assembly.
#[derive(Debug)]
pub struct KzSystem {
    pub tv: Arc<TensorVerma>,
    pub space: WeightSpace,
    /// `omega[i][j]` for `i < j`.
    pub omega: Vec<Vec<QMatrix>>,
    /// `Δ_{+,α}` for every `0 < α ≤ λ` with a nonzero matrix.
    pub deltas: Vec<(MultiDegree, QMatrix)>,
    /// Multidegree of each group of each basis vector.
    group_degrees: Vec<Vec<MultiDegree>>,
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyResidual {
    pub max_abs: f64,
    pub exact_zero: bool,
}

/// Residuals `κ(∂_u A_v − ∂_v A_u) − [A_u, A_v]` for the three pair families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatnessReport {
    pub zz: FamilyResidual,
    pub zmu: FamilyResidual,
    pub mumu: FamilyResidual,
}

impl FlatnessReport {
    pub fn all_zero(&self) -> bool {
        self.zz.exact_zero && self.zmu.exact_zero && self.mumu.exact_zero
    }
}

impl KzSystem {
    pub fn new(tv: Arc<TensorVerma>, lambda: &MultiDegree, method: DeltaMethod) -> Result<Self> {
        let space = tv.space(lambda)?;
        let n = tv.n();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let mats = pairs
            .par_iter()
            .map(|&(i, j)| tv.casimir_operator(i, j, lambda))
            .collect::<Result<Vec<_>>>()?;
        let mut omega = vec![Vec::new(); n];
        for (&(i, _), m) in pairs.iter().zip(mats) {
            omega[i].push(m);
        }
        let mut deltas = Vec::new();
        let mut degenerate = false;
        for alpha in lambda.nonzero_below() {
            let d = tv.delta_plus(&alpha, lambda, method)?;
            degenerate |= d.degenerate;
            if !d.matrix.is_zero() {
                deltas.push((alpha, d.matrix));
            }
        }
        let r = tv.rank();
        let group_degrees = space
            .basis
            .iter()
            .map(|idx| idx.groups().iter().map(|g| word_degree(g, r)).collect())
            .collect();
        Ok(KzSystem {
            tv,
            space,
            omega,
            deltas,
            group_degrees,
            degenerate,
        })
    }

    pub fn n(&self) -> usize {
        self.tv.n()
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// `Ω^{(ij)}` for any ordered pair `i != j`.
    pub fn omega(&self, i: usize, j: usize) -> &QMatrix {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        &self.omega[a][b - a - 1]
    }

    /// Diagonal of `μ^{(i)}`: `⟨Λ_i − α(I_i), μ⟩`.
    pub fn mu_diag<T: Field>(&self, i: usize, mu: &MuVector<T>) -> Matrix<T> {
        let d: Vec<T> = self
            .group_degrees
            .iter()
            .map(|g| mu.lam[i].clone() - mu.pair_root(&g[i]))
            .collect();
        Matrix::diagonal(&d)
    }

    /// `B_i = μ^{(i)} + Σ_{j≠i} Ω^{(ij)}/(z_i − z_j)`.
    pub fn kz_matrix<T: Field>(&self, i: usize, p: &ConnectionParams<T>) -> Result<Matrix<T>> {
        p.validate(self.n())?;
        let mut b = self.mu_diag(i, &p.mu);
        for j in 0..self.n() {
            if j != i {
                let s = T::one() / (p.z[i].clone() - p.z[j].clone());
                b.axpy(&s, &self.omega(i, j).to_field());
            }
        }
        Ok(b)
    }

    fn ratio<T: Field>(&self, alpha: &MultiDegree, num: &MuVector<T>, mu: &MuVector<T>) -> Result<T> {
        let den = mu.pair_root(alpha);
        if den.is_zero() {
            return Err(KzError::Resonance { alpha: alpha.0.clone() });
        }
        Ok(num.pair_root(alpha) / den)
    }

    /// `C_{μ'} = Σ_i z_i μ'^{(i)} + Σ_{0<α≤λ} (⟨α,μ'⟩/⟨α,μ⟩) Δ_{+,α}`.
    pub fn dyn_matrix<T: Field>(&self, dir: &MuVector<T>, p: &ConnectionParams<T>) -> Result<Matrix<T>> {
        p.validate(self.n())?;
        let mut c = Matrix::zeros(self.dim(), self.dim());
        for i in 0..self.n() {
            c.axpy(&p.z[i], &self.mu_diag(i, dir));
        }
        for (alpha, d) in &self.deltas {
            let r = self.ratio(alpha, dir, &p.mu)?;
            c.axpy(&r, &d.to_field());
        }
        Ok(c)
    }

    /// `∂B_i/∂z_j` for `j != i`, and `−Σ_k Ω^{(ik)}/(z_i − z_k)²` for `j = i`.
    pub fn d_kz_dz<T: Field>(&self, i: usize, j: usize, p: &ConnectionParams<T>) -> Matrix<T> {
        let mut out = Matrix::zeros(self.dim(), self.dim());
        for k in 0..self.n() {
            if k == i || (j != i && k != j) {
                continue;
            }
            let d = p.z[i].clone() - p.z[k].clone();
            let s = T::one() / (d.clone() * d);
            let s = if j == i { -s } else { s };
            out.axpy(&s, &self.omega(i, k).to_field());
        }
        out
    }

    /// `∂B_i` in the direction `μ''`: the diagonal `μ''^{(i)}`.
    pub fn d_kz_dmu<T: Field>(&self, i: usize, dir: &MuVector<T>) -> Matrix<T> {
        self.mu_diag(i, dir)
    }

    /// `∂C_{μ'}/∂z_i = μ'^{(i)}`.
    pub fn d_dyn_dz<T: Field>(&self, i: usize, dir: &MuVector<T>) -> Matrix<T> {
        self.mu_diag(i, dir)
    }

    /// `∂C_{μ'}` in the direction `μ''`: `−Σ_α ⟨α,μ'⟩⟨α,μ''⟩/⟨α,μ⟩² Δ_{+,α}`.
    pub fn d_dyn_dmu<T: Field>(&self, dir: &MuVector<T>, dir2: &MuVector<T>, p: &ConnectionParams<T>) -> Result<Matrix<T>> {
        let mut out = Matrix::zeros(self.dim(), self.dim());
        for (alpha, d) in &self.deltas {
            let r1 = self.ratio(alpha, dir, &p.mu)?;
            let r2 = self.ratio(alpha, dir2, &p.mu)?;
            out.axpy(&(-(r1 * r2)), &d.to_field());
        }
        Ok(out)
    }

    /// Compatibility residuals for all `z`-pairs, all `(z_i, μ')`, `(z_i, μ'')` pairs and
    /// the pair `(μ', μ'')`.
    pub fn flatness_report<T: Field>(
        &self,
        p: &ConnectionParams<T>,
        dir1: &MuVector<T>,
        dir2: &MuVector<T>,
    ) -> Result<FlatnessReport> {
        let n = self.n();
        let kz: Vec<Matrix<T>> = (0..n).map(|i| self.kz_matrix(i, p)).collect::<Result<_>>()?;
        let c1 = self.dyn_matrix(dir1, p)?;
        let c2 = self.dyn_matrix(dir2, p)?;
        let residual = |du_av: Matrix<T>, dv_au: Matrix<T>, au: &Matrix<T>, av: &Matrix<T>| -> Matrix<T> {
            let mut r = (&du_av - &dv_au).scale(&p.kappa);
            r.axpy(&(-T::one()), &au.commutator(av));
            r
        };
        let mut zz = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                zz.push(residual(self.d_kz_dz(j, i, p), self.d_kz_dz(i, j, p), &kz[i], &kz[j]));
            }
        }
        let mut zmu = Vec::new();
        for i in 0..n {
            for (dir, c) in [(dir1, &c1), (dir2, &c2)] {
                zmu.push(residual(self.d_dyn_dz(i, dir), self.d_kz_dmu(i, dir), &kz[i], c));
            }
        }
        let mumu = vec![residual(
            self.d_dyn_dmu(dir2, dir1, p)?,
            self.d_dyn_dmu(dir1, dir2, p)?,
            &c1,
            &c2,
        )];
        let summarize = |ms: &[Matrix<T>]| FamilyResidual {
            max_abs: ms.iter().map(|m| m.max_abs()).fold(0.0, f64::max),
            exact_zero: ms.iter().all(|m| m.is_zero()),
        };
        Ok(FlatnessReport {
            zz: summarize(&zz),
            zmu: summarize(&zmu),
            mumu: summarize(&mumu),
        })
    }

    /// `ε_ij = tr Ω^{(ij)}`.
    pub fn casimir_trace(&self, i: usize, j: usize) -> crate::rational::Q {
        self.omega(i, j).trace()
    }

    /// `δ_α = tr Δ_{+,α}`; zero for every `α` not below `λ`.
    pub fn delta_trace(&self, alpha: &MultiDegree) -> crate::rational::Q {
        self.deltas
            .iter()
            .find(|(a, _)| a == alpha)
            .map(|(_, d)| d.trace())
            .unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_kac_moody::{AlgebraData, KacMoody};
    use crate::rational::{q, qi, Q};
    use crate::weight_modules::HighestWeightData;

    fn sl2_like(n: usize) -> Arc<TensorVerma> {
        let km = Arc::new(KacMoody::new(AlgebraData::sln(2).unwrap()));
        let la = (0..n).map(|j| vec![q(3 + j as i64, 4)]).collect();
        let ll = QMatrix::from_fn(n, n, |i, j| q((i + j) as i64 + 1, 3));
        Arc::new(TensorVerma::new(km, HighestWeightData::new(la, ll).unwrap()).unwrap())
    }

    fn params(n: usize) -> ConnectionParams<Q> {
        ConnectionParams {
            z: (0..n).map(|i| q(2 * i as i64 + 1, 3)).collect(),
            mu: MuVector::new(vec![q(5, 7)], (0..n).map(|j| q(j as i64 - 2, 5)).collect()),
            kappa: q(3, 2),
        }
    }

    #[test]
    fn scalar_case() {
        let tv = sl2_like(2);
        let sys = KzSystem::new(tv, &MultiDegree(vec![0]), DeltaMethod::Quotient).unwrap();
        let p = params(2);
        let b = sys.kz_matrix(0, &p).unwrap();
        let expect = &p.mu.lam[0] + q(2, 3) / (&p.z[0] - &p.z[1]);
        assert_eq!(b, QMatrix::from_rows(vec![vec![expect]]));
        let dir = MuVector::new(vec![qi(1)], vec![qi(2), qi(-1)]);
        let c = sys.dyn_matrix(&dir, &p).unwrap();
        assert_eq!(c[(0, 0)], &p.z[0] * qi(2) - &p.z[1]);
    }

    #[test]
    fn flat_sl2() {
        for n in 2..=3 {
            let sys = KzSystem::new(sl2_like(n), &MultiDegree(vec![1]), DeltaMethod::Quotient).unwrap();
            let p = params(n);
            let d1 = MuVector::new(vec![q(1, 2)], (0..n).map(|j| q(j as i64, 3)).collect());
            let d2 = MuVector::new(vec![q(-4, 3)], (0..n).map(|j| q(1, j as i64 + 2)).collect());
            let rep = sys.flatness_report(&p, &d1, &d2).unwrap();
            assert!(rep.all_zero(), "{rep:?}");
        }
    }

    #[test]
    fn resonance_is_reported() {
        let sys = KzSystem::new(sl2_like(2), &MultiDegree(vec![1]), DeltaMethod::Quotient).unwrap();
        let mut p = params(2);
        p.mu.alpha[0] = qi(0);
        let dir = p.mu.clone();
        assert_eq!(
            sys.dyn_matrix(&dir, &p).unwrap_err(),
            KzError::Resonance { alpha: vec![1] }
        );
    }
}
