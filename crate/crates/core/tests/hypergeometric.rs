mod common;

use kzd::hypergeometric::quadrature::{integrate_half_line, integrate_unit};
use kzd::hypergeometric::{Hypergeometric, QuadratureSettings};
use statrs::function::gamma::{gamma, ln_gamma};

#[test]
fn beta_integral() {
    let (v, _) = integrate_unit(|u, om| u.sqrt() * om.cbrt(), Some(0.5), Some(1.0 / 3.0), 1e-12).unwrap();
    let exact = (ln_gamma(1.5) + ln_gamma(4.0 / 3.0) - ln_gamma(1.5 + 4.0 / 3.0)).exp();
    assert!((v - exact).abs() < 1e-10 * exact, "{v} vs {exact}");
}

#[test]
fn gamma_integral() {
    let (v, _) = integrate_half_line(|t| (-t).exp() * t.sqrt(), Some(0.5), 1.0, 1e-12).unwrap();
    assert!((v - gamma(1.5)).abs() < 1e-10, "{v}");
}

#[test]
fn sl2_residuals_one_variable() {
    let (sys, p, dir) = common::sl2_pinned(2, 1);
    let h = Hypergeometric::new(sys);
    let st = QuadratureSettings::default();
    let rep = h.residuals(&p, &dir, &st).unwrap();
    println!("{rep:?}");
    assert!(rep.max < 1e-6, "{rep:?}");
}

#[test]
fn sl2_residuals_two_variables() {
    let (sys, p, dir) = common::sl2_pinned(2, 2);
    let h = Hypergeometric::new(sys);
    let st = QuadratureSettings { tol: 1e-8, ..Default::default() };
    let rep = h.residuals(&p, &dir, &st).unwrap();
    println!("{rep:?}");
    assert!(rep.max < 1e-4, "{rep:?}");
}

use kzd::connections::ConnectionParams;
use kzd::free_kac_moody::MultiDegree;
use kzd::hypergeometric::{cells, vacuum_solution};
use kzd::linalg::CMatrix;
use kzd::rational::q;
use kzd::weight_modules::MuVector;
use num::complex::Complex64;

fn nearby(p: &ConnectionParams<f64>) -> ConnectionParams<f64> {
    let mut p2 = p.clone();
    p2.z[0] += 0.03;
    p2.z[1] -= 0.02;
    p2.mu = MuVector::lincomb(&1.0, &p.mu, &0.05, &MuVector::new(vec![1.0], vec![0.4; p.z.len()]));
    p2
}

#[test]
fn determinant_increment_one_variable() {
    let (sys, p, _) = common::sl2_pinned(2, 1);
    let alpha = MultiDegree(vec![1]);
    // δ_α = (Λ_1, α) + (Λ_2, α) and ε_12 = (Λ_1 − α, Λ_2) + (Λ_1, Λ_2 − α).
    assert_eq!(sys.delta_trace(&alpha), q(-6, 5));
    let hw = &sys.tv.hw;
    assert_eq!(
        sys.casimir_trace(0, 1),
        &hw.lam_lam[(0, 1)] * q(2, 1) - &hw.lam_alpha[1][0] - &hw.lam_alpha[0][0]
    );
    assert_eq!(sys.delta_trace(&MultiDegree(vec![2])), q(0, 1));
    let h = Hypergeometric::new(sys);
    let rep = h.determinant_check(&p, &nearby(&p), &QuadratureSettings::default()).unwrap();
    println!("{rep:?}");
    assert!(rep.closed_form.abs() > 1e-3);
    assert!(rep.rel_error < 1e-6, "{rep:?}");
    assert!(rep.condition.0 < 1e6);
}

#[test]
fn determinant_increment_two_variables() {
    let (sys, p, _) = common::sl2_pinned(2, 2);
    let h = Hypergeometric::new(sys);
    let st = QuadratureSettings { tol: 1e-9, ..Default::default() };
    let rep = h.determinant_check(&p, &nearby(&p), &st).unwrap();
    println!("{rep:?}");
    assert!(rep.rel_error < 1e-6, "{rep:?}");
}

#[test]
fn vacuum_solution_is_closed_form() {
    let (sys, p, dir) = common::sl2_pinned(3, 0);
    let h = Hypergeometric::new(sys);
    let st = QuadratureSettings::default();
    let u = h.solution_matrix(&p, &st).unwrap();
    assert_eq!(u.u.nrows(), 1);
    let ex = h.exponents(&p).unwrap();
    assert!((u.u[(0, 0)] - vacuum_solution(&ex, &p.z)).norm() < 1e-14);
    let rep = h.residuals(&p, &dir, &st).unwrap();
    assert!(rep.max < 1e-9, "{rep:?}");
    assert_eq!(cells(&p.z, &MultiDegree(vec![0]), 3).unwrap().len(), 1);
}

#[test]
fn corrupted_dynamical_operator_is_detected() {
    let (sys, p, dir) = common::sl2_pinned(2, 1);
    let h = Hypergeometric::new(sys.clone());
    let pc = ConnectionParams {
        z: p.z.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        mu: MuVector::new(vec![Complex64::new(1.0, 0.0)], p.mu.lam.iter().map(|&x| Complex64::new(x, 0.0)).collect()),
        kappa: Complex64::new(1.0, 0.0),
    };
    let dirc = MuVector::new(
        dir.alpha.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        dir.lam.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
    );
    let kz: Vec<CMatrix> = (0..2).map(|i| sys.kz_matrix(i, &pc).unwrap()).collect();
    // flip the sign of the Δ part only
    let mut c = sys.dyn_matrix(&dirc, &pc).unwrap();
    for (alpha, d) in &sys.deltas {
        let r = dirc.pair_root(alpha) / pc.mu.pair_root(alpha);
        c.axpy(&(r * -2.0), &d.to_field());
    }
    let st = QuadratureSettings::default();
    let good = h.residuals(&p, &dir, &st).unwrap();
    let bad = h.residuals_against(&p, &dir, &st, &kz, &c).unwrap();
    assert!(bad.dynamical > 1e4 * good.dynamical.max(1e-12), "{bad:?}");
}

#[test]
fn second_order_residual_scales_with_step() {
    let (sys, p, dir) = common::sl2_pinned(2, 1);
    let h = Hypergeometric::new(sys);
    let res: Vec<f64> = [1e-2, 5e-3, 2.5e-3]
        .iter()
        .map(|&fd_step| {
            let st = QuadratureSettings { fd_step, fd_order: 2, ..Default::default() };
            h.residuals(&p, &dir, &st).unwrap().max
        })
        .collect();
    println!("{res:?}");
    for w in res.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.0..5.0).contains(&ratio), "{res:?}");
    }
}

#[test]
fn refinement_stays_within_estimate() {
    let (sys, p, _) = common::sl2_pinned(2, 1);
    let h = Hypergeometric::new(sys);
    let coarse = h.solution_matrix(&p, &QuadratureSettings { tol: 1e-8, ..Default::default() }).unwrap();
    let fine = h.solution_matrix(&p, &QuadratureSettings { tol: 1e-13, ..Default::default() }).unwrap();
    let scale = fine.u.max_abs();
    let diff = (&fine.u - &coarse.u).max_abs();
    assert!(diff <= coarse.error_estimate.max(1e-14) * scale, "{diff} vs {}", coarse.error_estimate);
}

#[test]
fn out_of_regime_is_rejected() {
    let (sys, mut p, _) = common::sl2_pinned(2, 1);
    p.mu.alpha[0] = -1.0;
    let h = Hypergeometric::new(sys);
    assert!(matches!(
        h.solution_matrix(&p, &QuadratureSettings::default()),
        Err(kzd::KzError::Convergence(_))
    ));
}
