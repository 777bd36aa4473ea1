//! The link product as composition: feeding a state through a channel,
//! chaining channels, and compiling a circuit into its comb.
//!
//! ```text
//! cargo run --example link_product
//! ```

use comblab::comb::{choi_of_unitary, compile, link, Channel};
use comblab::constructions::{circuit_bell_teleport, phi_plus};
use comblab::random::{haar_unitary, rng, state};
use comblab::tensor::partial_trace;

fn main() -> comblab::Result<()> {
    let mut r = rng(1);
    let u = choi_of_unitary(&haar_unitary(2, &mut r), &[("X", 2)], &[("Y", 2)])?;
    let v = choi_of_unitary(&haar_unitary(2, &mut r), &[("Y", 2)], &[("Z", 2)])?;
    let rho = state(&[2], &["X"], 2, &mut r)?;

    // a state linked with a channel is the channel applied to the state
    let fed = link(&rho, u.op())?;
    println!("rho * U vs U(rho): {:.1e}", fed.distance(&u.apply(&rho)?)?);

    // chaining: (rho * U) * V = rho * (U * V)
    let uv = link(u.op(), v.op())?;
    let lhs = link(&fed, v.op())?;
    let rhs = link(&rho, &uv)?;
    println!("associativity: {:.1e}", lhs.distance(&rhs.aligned(&lhs)?)?);

    // the identity channel is a maximally entangled Choi operator
    let id = Channel::identity("P", "Q", 2)?;
    println!("identity channel vs |phi+><phi+| * 2: {:.1e}", id.op().distance(&phi_plus("Q", "P").scale(2.0).aligned(id.op())?)?);

    // a whole circuit compiles to one comb
    let tele = compile(&circuit_bell_teleport())?;
    println!("teleportation comb on {:?}, trace {:.1}", tele.op().labels(), tele.op().real_trace());
    let rest = partial_trace(tele.op(), &[tele.legs().last().unwrap().label.as_str()])?;
    println!("  with the last output discarded: trace {:.1}", rest.real_trace());
    Ok(())
}
