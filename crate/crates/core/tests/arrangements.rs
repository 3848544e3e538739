mod common;

use kzd::arrangements::{eta_top, os_rational, weight_rational, Arrangement, Configuration, Hyperplane};
use kzd::free_kac_moody::MultiDegree;
use kzd::hypergeometric::weight_function;
use kzd::rational::{qi, Q};
use kzd::weight_modules::enumerate_basis;

fn arrangement(n: usize, m: usize, seed: u64) -> Arrangement {
    let nh = m * (m - 1) / 2 + m * n;
    let mut r = common::rng(seed);
    let w: Vec<Q> = (0..nh).map(|_| common::rq(&mut r)).collect();
    Arrangement::new(Configuration::discriminantal(n, m, Some(w)).unwrap())
}

/// Coefficients of `Π_{k<m} (1 + (n + k) x)`.
fn poincare(n: usize, m: usize) -> Vec<usize> {
    let mut p = vec![1usize];
    for k in 0..m {
        let mut next = vec![0; p.len() + 1];
        for (i, c) in p.iter().enumerate() {
            next[i] += c;
            next[i + 1] += c * (n + k);
        }
        p = next;
    }
    p
}

#[test]
fn boundary_relation_in_c12() {
    let a = arrangement(1, 2, 1);
    let c = &a.config;
    let h12 = c.index_of(Hyperplane::Diag(0, 1)).unwrap();
    let h1 = c.index_of(Hyperplane::Point(0, 0)).unwrap();
    let h2 = c.index_of(Hyperplane::Point(1, 0)).unwrap();
    let x = a.os_combination(2, [(vec![h12, h1], qi(1)), (vec![h12, h2], qi(-1)), (vec![h1, h2], qi(1))]);
    assert!(x.is_zero(), "{}", a.os_display(&x));
    // antisymmetry and general position
    assert_eq!(a.os_tuple(&[h1, h12]), a.os_tuple(&[h12, h1]).scale(&qi(-1)));
    assert!(a.os_tuple(&[h1, h1]).is_zero());
    assert!(!a.os_tuple(&[h12, h1]).is_zero());
}

#[test]
fn dimensions_follow_the_product_formula() {
    for (n, m) in [(1, 1), (1, 2), (2, 2), (0, 3), (1, 3), (2, 3)] {
        let a = arrangement(n, m, 2);
        let p = poincare(n, m);
        for k in 0..=m {
            assert_eq!(a.os[k].dim(), p[k], "A^{k} of C_{{{n};{m}}}");
            assert_eq!(a.flags[k].dim(), p[k], "Fl^{k} of C_{{{n};{m}}}");
            assert_eq!(a.os[k].nbc_count(&a), p[k]);
        }
    }
}

#[test]
fn flag_and_orlik_solomon_complexes_match() {
    for (n, m, seed) in [(1, 2, 3), (2, 2, 4), (0, 3, 5), (1, 3, 6)] {
        let a = arrangement(n, m, seed);
        let rep = a.chain_check();
        assert!(rep.passes(), "C_{{{n};{m}}}: {rep:?}");
        assert!(rep.negative_control_detected(), "C_{{{n};{m}}}: dropped sign not caught");
    }
}

#[test]
fn flag_product_is_graded_commutative() {
    // C_{2;3}: variables {t1, t2} with z1 against {t3} with z2
    let a = arrangement(2, 3, 7);
    let c = &a.config;
    let left: Vec<usize> = [Hyperplane::Diag(0, 1), Hyperplane::Point(0, 0), Hyperplane::Point(1, 0)]
        .iter()
        .map(|&h| c.index_of(h).unwrap())
        .collect();
    let right = vec![c.index_of(Hyperplane::Point(2, 1)).unwrap()];
    let tuples = |hs: &[usize], k: usize| -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..k {
            out = out
                .into_iter()
                .flat_map(|t| {
                    hs.iter()
                        .filter(|h| !t.contains(h))
                        .map(|&h| [t.clone(), vec![h]].concat())
                        .collect::<Vec<_>>()
                })
                .collect();
        }
        out.into_iter().filter(|t| a.general_position(t)).collect()
    };
    let mut checked = 0;
    for k in 1..=2 {
        for x in tuples(&left, k) {
            for y in tuples(&right, 1) {
                let xy = a.flag_product(&x, &y);
                let yx = a.flag_product(&y, &x);
                let sign = if k % 2 == 1 { -1 } else { 1 };
                let diff: Vec<Q> = xy.coeffs.iter().zip(&yx.coeffs).map(|(p, q)| p - q * qi(sign)).collect();
                assert!(diff.iter().all(|d| *d == qi(0)), "{x:?} ∘ {y:?}");
                assert!(!xy.is_zero());
                checked += 1;
            }
        }
    }
    assert!(checked >= 8);
}

#[test]
fn eta_top_gives_the_weight_function() {
    let cases: Vec<(usize, MultiDegree)> = vec![
        (1, MultiDegree(vec![1])),
        (2, MultiDegree(vec![1])),
        (1, MultiDegree(vec![1, 1])),
        (2, MultiDegree(vec![1, 1])),
        (1, MultiDegree(vec![2])),
        (2, MultiDegree(vec![2])),
        (1, MultiDegree(vec![1, 1, 1])),
        (2, MultiDegree(vec![2, 1])),
    ];
    for (n, lambda) in cases {
        let m = lambda.0.iter().sum::<u32>() as usize;
        let a = arrangement(n, m, 8);
        for idx in enumerate_basis(&lambda, n) {
            let eta = eta_top(&a, &lambda, &idx).unwrap();
            let lhs = os_rational(&a, &eta).unwrap();
            let rhs = weight_rational(&a, &lambda, &idx).unwrap();
            assert!(lhs.same_function(&rhs, &a.config), "{idx} for λ = {lambda}, n = {n}");
        }
    }
}

#[test]
fn weight_rational_agrees_with_weight_function() {
    let mut r = common::rng(9);
    for (n, lambda) in [(2, MultiDegree(vec![1, 1])), (2, MultiDegree(vec![2])), (1, MultiDegree(vec![2, 1]))] {
        let m = lambda.0.iter().sum::<u32>() as usize;
        let a = arrangement(n, m, 10);
        for idx in enumerate_basis(&lambda, n) {
            let w = weight_rational(&a, &lambda, &idx).unwrap();
            for _ in 0..5 {
                let z: Vec<Q> = (0..n).map(|_| common::rq(&mut r)).collect();
                let t: Vec<Q> = (0..m).map(|_| common::rq(&mut r)).collect();
                match (w.eval(&a.config, &z, &t), weight_function(&lambda, &idx, &z, &t)) {
                    (Ok(x), Ok(y)) => assert_eq!(x, y),
                    (Err(_), Err(_)) => {}
                    other => panic!("disagreement on singularity: {other:?}"),
                }
            }
        }
    }
}

#[test]
fn s_form_on_c12_is_diagonal_in_degree_one() {
    let a = arrangement(1, 2, 11);
    let s = a.s_form_matrix(1);
    for (i, &f) in a.flags[1].basis().iter().enumerate() {
        let e = a.flags[1].flags[f][0];
        let h = a.hyperplanes_over(e);
        assert_eq!(h.len(), 1);
        for j in 0..s.ncols() {
            let want = if i == j { a.config.weight(h[0]).clone() } else { qi(0) };
            assert_eq!(s[(i, j)], want);
        }
    }
}
