use proptest::prelude::*;

use kzd::arrangements::{Arrangement, Configuration};
use kzd::free_kac_moody::{AlgebraData, KacMoody, LieElement, MultiDegree, Side};
use kzd::hypergeometric::weight_function;
use kzd::linalg::QMatrix;
use kzd::rational::{q, Q};
use kzd::weight_modules::enumerate_basis;

fn rational() -> impl Strategy<Value = Q> {
    (-20i64..=20, 1i64..=9).prop_map(|(p, d)| q(p, d))
}

fn nonzero_rational() -> impl Strategy<Value = Q> {
    (prop_oneof![-20i64..=-1, 1i64..=20], 1i64..=9).prop_map(|(p, d)| q(p, d))
}

fn gram2() -> impl Strategy<Value = QMatrix> {
    (rational(), rational(), rational()).prop_map(|(a, b, c)| QMatrix::from_rows(vec![vec![a, b.clone()], vec![b, c]]))
}

fn combination(km: &KacMoody, side: Side, d: &MultiDegree, coeffs: &[Q]) -> LieElement {
    let len = km.lyndon_basis(d).unwrap().len();
    (0..len).fold(LieElement::zero(side, d.clone()), |acc, k| {
        let b = km.basis_element(side, d, k).unwrap();
        acc.add(&b.scale(&coeffs[k % coeffs.len()])).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn k_form_routes_agree(g in gram2(), cx in prop::collection::vec(rational(), 3), cy in prop::collection::vec(rational(), 3), which in 0usize..4) {
        let km = KacMoody::new(AlgebraData::free(g).unwrap());
        let d = [MultiDegree(vec![1, 1]), MultiDegree(vec![2, 1]), MultiDegree(vec![1, 2]), MultiDegree(vec![2, 2])][which].clone();
        let x = combination(&km, Side::Minus, &d, &cx);
        let y = combination(&km, Side::Plus, &d, &cy);
        prop_assert_eq!(km.invariant_form_k(&x, &y).unwrap(), km.invariant_form_k_via_minus(&x, &y).unwrap());
    }

    #[test]
    fn brackets_are_antisymmetric_and_satisfy_jacobi(g in gram2(), c in prop::collection::vec(rational(), 3), a in 0usize..3, b in 0usize..3, e in 0usize..3) {
        let km = KacMoody::new(AlgebraData::free(g).unwrap());
        let degs = [MultiDegree(vec![1, 0]), MultiDegree(vec![0, 1]), MultiDegree(vec![1, 1])];
        let x = combination(&km, Side::Minus, &degs[a], &c);
        let y = combination(&km, Side::Minus, &degs[b], &c[1..]);
        let z = combination(&km, Side::Minus, &degs[e], &c[2..]);
        let xy = km.bracket_reduce(&x, &y).unwrap();
        let yx = km.bracket_reduce(&y, &x).unwrap();
        prop_assert_eq!(xy.clone(), yx.scale(&q(-1, 1)));
        let j1 = km.bracket_reduce(&xy, &z).unwrap();
        let j2 = km.bracket_reduce(&km.bracket_reduce(&y, &z).unwrap(), &x).unwrap();
        let j3 = km.bracket_reduce(&km.bracket_reduce(&z, &x).unwrap(), &y).unwrap();
        prop_assert!(j1.add(&j2).unwrap().add(&j3).unwrap().is_zero());
    }

    /// Swapping two variables of the same color leaves every weight function unchanged.
    #[test]
    fn weight_function_is_symmetric_within_colors(z in prop::collection::vec(rational(), 2), t in prop::collection::vec(rational(), 3)) {
        let lambda = MultiDegree(vec![2, 1]);
        let mut swapped = t.clone();
        swapped.swap(0, 1);
        for idx in enumerate_basis(&lambda, 2) {
            match (weight_function(&lambda, &idx, &z, &t), weight_function(&lambda, &idx, &z, &swapped)) {
                (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
                (Err(_), Err(_)) => {}
                other => prop_assert!(false, "{:?}", other),
            }
        }
    }

    #[test]
    fn orlik_solomon_tuples_change_sign_under_transpositions(w in prop::collection::vec(nonzero_rational(), 5), i in 0usize..5, j in 0usize..5) {
        let a = Arrangement::new(Configuration::discriminantal(2, 2, Some(w)).unwrap());
        let x = a.os_tuple(&[i, j]);
        let y = a.os_tuple(&[j, i]);
        prop_assert_eq!(x, y.scale(&q(-1, 1)));
    }

    #[test]
    fn s_map_is_a_chain_map_for_any_weights(w in prop::collection::vec(nonzero_rational(), 3)) {
        let a = Arrangement::new(Configuration::discriminantal(1, 2, Some(w)).unwrap());
        let r = a.chain_check();
        prop_assert!(r.passes(), "{:?}", r);
        prop_assert!(r.negative_control_detected());
    }
}
