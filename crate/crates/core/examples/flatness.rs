//! Exact flatness of the KZ and dynamical connections on an sl_3 weight space.

use kzd::connections::{sln_verma, ConnectionParams, KzSystem};
use kzd::free_kac_moody::MultiDegree;
use kzd::rational::q;
use kzd::weight_modules::DeltaMethod;

fn main() -> kzd::Result<()> {
    let (tv, sln) = sln_verma(3, vec![vec![q(2, 3), q(-1, 5)], vec![q(7, 4), q(3, 8)]])?;
    let sys = KzSystem::new(tv, &MultiDegree(vec![1, 1]), DeltaMethod::Quotient)?;
    println!("weight space dimension {}", sys.dim());

    let p = ConnectionParams {
        z: vec![q(1, 3), q(-5, 2)],
        mu: sln.mu_vector(&[q(3, 7), q(-2, 9)])?,
        kappa: q(5, 4),
    };
    let d1 = sln.mu_vector(&[q(1, 2), q(4, 3)])?;
    let d2 = sln.mu_vector(&[q(-7, 5), q(1, 6)])?;
    let rep = sys.flatness_report(&p, &d1, &d2)?;
    println!("zz exact zero: {}", rep.zz.exact_zero);
    println!("zμ exact zero: {}", rep.zmu.exact_zero);
    println!("μμ exact zero: {}", rep.mumu.exact_zero);
    Ok(())
}
