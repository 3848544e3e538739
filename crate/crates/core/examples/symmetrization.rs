//! Solutions for λ = 2α obtained by symmetrizing the two-color lift.

use std::sync::Arc;

use kzd::connections::{ConnectionParams, KzSystem};
use kzd::free_kac_moody::{AlgebraData, KacMoody, MultiDegree};
use kzd::hypergeometric::QuadratureSettings;
use kzd::linalg::QMatrix;
use kzd::rational::q;
use kzd::symmetrization::end_to_end;
use kzd::weight_modules::{DeltaMethod, HighestWeightData, MuVector, TensorVerma};

fn main() -> kzd::Result<()> {
    let km = Arc::new(KacMoody::new(AlgebraData::sln(2)?));
    let hw = HighestWeightData::new(
        vec![vec![q(-3, 5)], vec![q(-3, 5)]],
        QMatrix::from_rows(vec![vec![q(3, 10), q(2, 5)], vec![q(2, 5), q(3, 10)]]),
    )?;
    let tv = Arc::new(TensorVerma::new(km, hw)?);
    let lambda = MultiDegree(vec![2]);
    // validates the weight space before the lift is built
    KzSystem::new(tv.clone(), &lambda, DeltaMethod::Quotient)?;

    let p = ConnectionParams { z: vec![0.4, 1.3], mu: MuVector::new(vec![1.0], vec![0.3, -0.2]), kappa: 1.0 };
    let rep = end_to_end(tv, &lambda, &p, &QuadratureSettings { tol: 1e-9, ..Default::default() })?;
    println!("dim M_λ = {}, dim of lifted space = {}", rep.dim, rep.lifted_dim);
    println!("max |difference| {:.2e}, relative {:.2e}", rep.max_abs_diff, rep.rel_diff);
    Ok(())
}
