//! Born probabilities and conditioning on a comb leg: teleportation with a
//! fixed outcome, and a controlled-Z circuit whose conditionals are
//! entangled while their average is entanglement breaking.
//!
//! ```text
//! cargo run --example teleport
//! ```

use comblab::comb::{born_probability, compile, condition, Channel};
use comblab::constructions::{circuit_alice_cz, circuit_bell_teleport, product_projector};
use comblab::entanglement::{eb_check, ppt_min_eig, CutSpec};
use comblab::random::{rng, state};
use comblab::{ChannelKind, Operator};

fn main() -> comblab::Result<()> {
    let tele = compile(&circuit_bell_teleport())?;
    let mut r = rng(3);
    for _ in 0..5 {
        let tau = state(&[2], &["B"], 2, &mut r)?;
        let p = born_probability(
            &tele,
            &[Operator::identity(vec![2], vec!["A"])?, tau, product_projector(&["C"], "0").transpose()],
        )?;
        println!("teleport: p(outcome 0) = {p:.15}");
    }

    let cz = compile(&circuit_alice_cz())?;
    let cut: CutSpec = "B:C".parse()?;
    let mut avg: Option<Operator> = None;
    for bit in ["0", "1"] {
        let cond = condition(&cz, "A", &product_projector(&["A"], bit))?;
        println!("controlled-Z, A = {bit}: min eigenvalue of the B:C partial transpose {:+.3}", ppt_min_eig(&cond, &cut)?);
        avg = Some(match avg {
            None => cond,
            Some(a) => a.add(&cond)?,
        });
    }
    let ch = Channel::new(avg.expect("two outcomes"), &["B"], ChannelKind::Cptp)?;
    println!("averaged channel: {:?}", eb_check(&ch)?.verdict);
    Ok(())
}
