//! Build a comb from a separable decomposition across the first output and
//! recover a circuit whose first wire passes through an
//! entanglement-breaking channel.
//!
//! ```text
//! cargo run --example eb_representations
//! ```

use comblab::comb::compile;
use comblab::constructions::{eb_representation, Decomposition};
use comblab::random::{cptp_channel, rng, state};
use comblab::tensor::{kron, permute_subsystems};
use comblab::{Comb, Leg};

fn main() -> comblab::Result<()> {
    let mut r = rng(5);
    let weights = [0.4, 0.3, 0.2, 0.1];
    let mut terms = Vec::new();
    let mut total = None;
    for w in weights {
        let rho = state(&[2], &["A"], 2, &mut r)?;
        let ch = cptp_channel(&[("B", 2)], &[("C", 2)], 2, &mut r)?;
        let g = permute_subsystems(ch.op(), &["B", "C"])?.scale(w);
        let t = kron(&rho, &g)?;
        total = Some(match total {
            None => t,
            Some(acc) => t.add(&acc)?,
        });
        terms.push((rho, g));
    }
    let legs = vec![Leg::out("A", 1), Leg::input("B", 1), Leg::out("C", 2)];
    let comb = Comb::new(total.expect("four terms"), legs)?;

    let rep = eb_representation(&comb, &Decomposition::FirstOutput { terms })?;
    println!("wire {} carries a measure-and-prepare channel with {} outcomes", rep.wire, rep.channel.povm.len());
    println!("register dimension {}", rep.register_dim);
    println!("circuit has {} steps, round trip residual {:.1e}", rep.circuit.steps().len(), rep.residual);
    println!("recompiled trace {:.3}", compile(&rep.circuit)?.op().real_trace());
    Ok(())
}
