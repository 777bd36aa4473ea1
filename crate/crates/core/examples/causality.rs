//! Check the causal constraints of the named combs, level by level, and
//! show that a doubled GHZ state is rejected.
//!
//! ```text
//! cargo run --example causality
//! ```

use comblab::comb::{verify_causality, Comb, CausalityReport};
use comblab::constructions::{example_ghz_comb, example_sqrt_swap_comb, example_w_comb, ghz_state};
use comblab::Leg;

fn show(name: &str, r: &CausalityReport) {
    println!(
        "{name}: {} (trace {:.3} of {:.0}, min eigenvalue {:+.2e})",
        if r.passed { "comb" } else { "not a comb" },
        r.trace,
        r.expected_trace,
        r.min_eigenvalue
    );
    for level in &r.levels {
        println!("  tr {:?} -> identity on {:?}: residual {:.1e}", level.traced, level.inputs, level.residual);
    }
}

fn main() -> comblab::Result<()> {
    show("w-comb", &verify_causality(&example_w_comb())?);
    show("sqrt-swap", &verify_causality(&example_sqrt_swap_comb())?);
    for n in 3..=5 {
        show(&format!("ghz-comb n={n}"), &verify_causality(&example_ghz_comb(n)?)?);
    }
    let legs = vec![Leg::out("A", 2), Leg::input("B", 2), Leg::out("C", 2)];
    let doubled = Comb::new(ghz_state(&["A", "B", "C"]).scale(2.0), legs)?;
    show("2 x GHZ", &verify_causality(&doubled)?);
    Ok(())
}
