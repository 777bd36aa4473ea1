//! Channel steering: measure the first output of a comb and ask whether the
//! resulting assemblage on the remaining legs admits a local hidden-state
//! model.
//!
//! ```text
//! cargo run --example steering
//! ```

use comblab::comb::{build_assemblage, choi_of_unitary, compile, Circuit};
use comblab::constructions::{bloch_projector, phi_plus};
use comblab::entanglement::lhs_feasibility;
use comblab::random::{rng, state};
use comblab::tensor::{kron, CMat, C64};
use comblab::{Leg, Operator};

fn pauli_povm(label: &str, axis: usize) -> comblab::Result<Vec<Operator>> {
    let mut n = [0.0; 3];
    n[axis] = 1.0;
    let up = bloch_projector(label, n);
    let down = Operator::identity(vec![2], vec![label])?.sub(&up)?;
    Ok(vec![up, down])
}

fn main() -> comblab::Result<()> {
    let mut swap = CMat::zeros(4, 4);
    for (r, c) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        swap[(r, c)] = C64::new(1.0, 0.0);
    }
    let legs = || vec![Leg::out("A", 1), Leg::input("B", 1), Leg::out("C", 2)];
    let step = || choi_of_unitary(&swap, &[("B", 2), ("R", 2)], &[("C", 2), ("E", 2)]);
    let povms = vec![pauli_povm("A", 0)?, pauli_povm("A", 2)?];

    let mut r = rng(6);
    let product = kron(&state(&[2], &["A"], 2, &mut r)?, &state(&[2], &["R"], 2, &mut r)?)?;
    for (name, initial) in [("maximally entangled memory", phi_plus("A", "R")), ("product memory", product)] {
        let comb = compile(&Circuit::new(initial, vec![step()?], legs())?)?;
        let asm = build_assemblage(&comb, "A", &povms)?;
        let rep = lhs_feasibility(&asm)?;
        println!(
            "{name}: {:?} (margin {:+.4}, {} deterministic strategies, no-signalling residual {:.1e})",
            rep.verdict,
            rep.margin,
            rep.strategies,
            asm.no_signalling_residual()?
        );
    }
    Ok(())
}
