#![allow(dead_code)]

pub mod oracles;

use std::sync::Arc;

use kzd::free_kac_moody::{AlgebraData, KacMoody};
use kzd::linalg::QMatrix;
use kzd::rational::{q, Q};
use kzd::weight_modules::{HighestWeightData, TensorVerma};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random rational p/q with small numerator and denominator, never zero.
pub fn rq(r: &mut ChaCha8Rng) -> Q {
    loop {
        let p: i64 = r.gen_range(-23..=23);
        let d: i64 = r.gen_range(1..=13);
        if p != 0 {
            return q(p, d);
        }
    }
}

pub fn random_gram(r: &mut ChaCha8Rng, rank: usize) -> QMatrix {
    let mut g = QMatrix::zeros(rank, rank);
    for i in 0..rank {
        for j in i..rank {
            let x = rq(r);
            g[(i, j)] = x.clone();
            g[(j, i)] = x;
        }
    }
    g
}

pub fn random_hw(r: &mut ChaCha8Rng, n: usize, rank: usize) -> HighestWeightData {
    let la = (0..n).map(|_| (0..rank).map(|_| rq(r)).collect()).collect();
    HighestWeightData::new(la, random_gram(r, n)).unwrap()
}

pub fn generic_verma(seed: u64, rank: usize, n: usize) -> TensorVerma {
    let mut r = rng(seed);
    let km = Arc::new(KacMoody::new(AlgebraData::free(random_gram(&mut r, rank)).unwrap()));
    let hw = random_hw(&mut r, n, rank);
    TensorVerma::new(km, hw).unwrap()
}

use kzd::connections::ConnectionParams;
use kzd::weight_modules::MuVector;

pub fn random_mu(r: &mut ChaCha8Rng, rank: usize, n: usize) -> MuVector<Q> {
    MuVector::new((0..rank).map(|_| rq(r)).collect(), (0..n).map(|_| rq(r)).collect())
}

/// Distinct random rational points, a random `μ` and `κ`.
pub fn random_params(r: &mut ChaCha8Rng, rank: usize, n: usize) -> ConnectionParams<Q> {
    let mut z: Vec<Q> = Vec::new();
    while z.len() < n {
        let x = rq(r);
        if !z.contains(&x) {
            z.push(x);
        }
    }
    ConnectionParams {
        z,
        mu: random_mu(r, rank, n),
        kappa: rq(r),
    }
}

use kzd::connections::KzSystem;
use kzd::free_kac_moody::MultiDegree;
use kzd::weight_modules::DeltaMethod;

/// The sl_2-like system in the convergence regime: `(Λ_j, α) = −3/5`, `κ = 1`,
/// `⟨α, μ⟩ = 1`, real increasing `z`.
pub fn sl2_pinned(n: usize, lambda: u32) -> (Arc<KzSystem>, ConnectionParams<f64>, MuVector<f64>) {
    let km = Arc::new(KacMoody::new(AlgebraData::sln(2).unwrap()));
    let la = (0..n).map(|_| vec![q(-3, 5)]).collect();
    let ll = QMatrix::from_fn(n, n, |i, j| if i == j { q(3, 10) } else { q(1 + (i + j) as i64, 5) });
    let tv = Arc::new(TensorVerma::new(km, HighestWeightData::new(la, ll).unwrap()).unwrap());
    let sys = Arc::new(KzSystem::new(tv, &MultiDegree(vec![lambda]), DeltaMethod::Quotient).unwrap());
    let z = [0.4, 1.3, 2.1, 3.2][..n].to_vec();
    let lam = [0.3, -0.2, 0.15, 0.05][..n].to_vec();
    let p = ConnectionParams {
        z,
        mu: MuVector::new(vec![1.0], lam),
        kappa: 1.0,
    };
    let dir = MuVector::new(vec![0.7], [0.2, 0.5, -0.3, 0.1][..n].to_vec());
    (sys, p, dir)
}
