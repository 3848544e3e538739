//! Lyndon bases of a free rank-2 algebra and the invariant form on them.

use kzd::free_kac_moody::{AlgebraData, KacMoody, MultiDegree, Side};
use kzd::linalg::QMatrix;
use kzd::rational::q;

fn main() -> kzd::Result<()> {
    let gram = QMatrix::from_rows(vec![vec![q(2, 1), q(-1, 3)], vec![q(-1, 3), q(5, 4)]]);
    let km = KacMoody::new(AlgebraData::free(gram)?);
    for d in MultiDegree(vec![3, 3]).nonzero_below() {
        let piece = km.lyndon_basis(&d)?;
        if piece.is_empty() {
            println!("degree {d}: dimension 0");
            continue;
        }
        let x = km.basis_element(Side::Minus, &d, 0)?;
        let y = km.basis_element(Side::Plus, &d, 0)?;
        println!("degree {d}: dimension {}, (f_0, e_0) = {}", piece.len(), km.invariant_form_k(&x, &y)?);
    }
    Ok(())
}
