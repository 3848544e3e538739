//! Orlik-Solomon and flag complexes of a discriminantal arrangement, and the
//! contravariant map between them.

use kzd::arrangements::{Arrangement, Configuration};
use kzd::rational::q;

fn main() -> kzd::Result<()> {
    let w = vec![q(1, 2), q(-2, 3), q(3, 4), q(5, 7), q(-1, 3)];
    let a = Arrangement::new(Configuration::discriminantal(2, 2, Some(w))?);
    let rep = a.chain_check();
    println!("degree  dim A^k  dim Fl^k  nbc");
    for (k, (os, fl, nbc)) in rep.dims.iter().enumerate() {
        println!("{k:>6}  {os:>7}  {fl:>8}  {nbc:>3}");
    }
    println!("S is a chain map: {}", rep.s_chain_map);
    println!("all checks pass: {}", rep.passes());
    println!("dropping the sign breaks the chain map: {}", rep.negative_control_detected());
    println!("ω = {}", a.os_display(&a.omega()));
    Ok(())
}
