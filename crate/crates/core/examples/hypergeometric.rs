//! Hypergeometric solutions for sl_2 with two points: solution matrix, ODE
//! residuals and the determinant increment.

use std::sync::Arc;

use kzd::connections::{ConnectionParams, KzSystem};
use kzd::free_kac_moody::{AlgebraData, KacMoody, MultiDegree};
use kzd::hypergeometric::{Hypergeometric, QuadratureSettings};
use kzd::linalg::QMatrix;
use kzd::rational::q;
use kzd::weight_modules::{DeltaMethod, HighestWeightData, MuVector, TensorVerma};

fn main() -> kzd::Result<()> {
    let km = Arc::new(KacMoody::new(AlgebraData::sln(2)?));
    let hw = HighestWeightData::new(
        vec![vec![q(-3, 5)], vec![q(-3, 5)]],
        QMatrix::from_rows(vec![vec![q(3, 10), q(2, 5)], vec![q(2, 5), q(3, 10)]]),
    )?;
    let tv = Arc::new(TensorVerma::new(km, hw)?);
    let sys = Arc::new(KzSystem::new(tv, &MultiDegree(vec![1]), DeltaMethod::Quotient)?);
    let h = Hypergeometric::new(sys);

    let p = ConnectionParams { z: vec![0.4, 1.3], mu: MuVector::new(vec![1.0], vec![0.3, -0.2]), kappa: 1.0 };
    let st = QuadratureSettings { tol: 1e-10, ..Default::default() };

    let u = h.solution_matrix(&p, &st)?;
    println!("solution matrix ({} chambers):", u.cells.len());
    for r in 0..u.u.nrows() {
        let row: Vec<String> = (0..u.u.ncols()).map(|c| format!("{:.8}", u.u[(r, c)])).collect();
        println!("  [{}]", row.join(", "));
    }

    let dir = MuVector::new(vec![0.7], vec![0.2, 0.5]);
    let res = h.residuals(&p, &dir, &st)?;
    println!("max relative ODE residual {:.2e}", res.max);

    let mut p2 = p.clone();
    p2.z[0] += 0.03;
    p2.z[1] -= 0.02;
    let det = h.determinant_check(&p, &p2, &st)?;
    println!("log det increment {:.10}, closed form {:.10}", det.numeric.0, det.closed_form);
    Ok(())
}
