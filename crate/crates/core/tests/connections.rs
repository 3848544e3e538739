mod common;

use std::sync::Arc;

use kzd::connections::{sln_verma, ConnectionParams, KzSystem};
use kzd::free_kac_moody::MultiDegree;
use kzd::rational::{q, qi, Q};
use kzd::weight_modules::{DeltaMethod, MuVector};

fn check_flat(sys: &KzSystem, seed: u64, points: usize, sln: Option<&kzd::connections::SlnData>) {
    let mut r = common::rng(seed);
    let rank = sys.tv.rank();
    let n = sys.n();
    for _ in 0..points {
        let (p, d1, d2) = match sln {
            None => (
                common::random_params(&mut r, rank, n),
                common::random_mu(&mut r, rank, n),
                common::random_mu(&mut r, rank, n),
            ),
            Some(s) => {
                let mut coords = || (0..rank).map(|_| common::rq(&mut r)).collect::<Vec<Q>>();
                let (mu, d1, d2) = (coords(), coords(), coords());
                let mut p = common::random_params(&mut r, rank, n);
                p.mu = s.mu_vector(&mu).unwrap();
                (p, s.mu_vector(&d1).unwrap(), s.mu_vector(&d2).unwrap())
            }
        };
        match sys.flatness_report(&p, &d1, &d2) {
            Ok(rep) => assert!(rep.all_zero(), "{rep:?}"),
            Err(kzd::KzError::Resonance { .. }) => continue,
            Err(e) => panic!("{e}"),
        }
    }
}

#[test]
fn flat_free_rank_two() {
    for (k, lam) in [vec![1, 1], vec![2, 1], vec![1, 2]].into_iter().enumerate() {
        for n in 2..=3 {
            let tv = Arc::new(common::generic_verma(7 + k as u64, 2, n));
            let sys = KzSystem::new(tv, &MultiDegree(lam.clone()), DeltaMethod::Quotient).unwrap();
            check_flat(&sys, 40 + k as u64, 5, None);
        }
    }
}

#[test]
fn flat_sl3() {
    let (tv, s) = sln_verma(3, vec![vec![q(2, 3), q(-1, 5)], vec![q(7, 4), q(3, 8)]]).unwrap();
    for lam in [vec![1, 0], vec![1, 1]] {
        let sys = KzSystem::new(tv.clone(), &MultiDegree(lam), DeltaMethod::Quotient).unwrap();
        check_flat(&sys, 3, 5, Some(&s));
    }
}

#[test]
fn corrupted_delta_breaks_flatness() {
    let tv = Arc::new(common::generic_verma(5, 2, 2));
    let mut sys = KzSystem::new(tv, &MultiDegree(vec![1, 1]), DeltaMethod::Quotient).unwrap();
    let mut r = common::rng(9);
    let p = common::random_params(&mut r, 2, 2);
    let (d1, d2) = (common::random_mu(&mut r, 2, 2), common::random_mu(&mut r, 2, 2));
    let last = sys.deltas.len() - 1;
    sys.deltas[last].1[(0, 0)] += qi(1);
    let rep = sys.flatness_report(&p, &d1, &d2).unwrap();
    assert!(!rep.mumu.exact_zero);
}

#[test]
fn dyn_matrix_is_linear_in_direction() {
    let tv = Arc::new(common::generic_verma(21, 2, 2));
    let sys = KzSystem::new(tv, &MultiDegree(vec![2, 1]), DeltaMethod::Dual).unwrap();
    let mut r = common::rng(22);
    let p: ConnectionParams<Q> = common::random_params(&mut r, 2, 2);
    let (d1, d2) = (common::random_mu(&mut r, 2, 2), common::random_mu(&mut r, 2, 2));
    let (a, b) = (q(3, 7), q(-5, 2));
    let comb = MuVector::lincomb(&a, &d1, &b, &d2);
    let lhs = sys.dyn_matrix(&comb, &p).unwrap();
    let mut rhs = sys.dyn_matrix(&d1, &p).unwrap().scale(&a);
    rhs.axpy(&b, &sys.dyn_matrix(&d2, &p).unwrap());
    assert_eq!(lhs, rhs);
}
