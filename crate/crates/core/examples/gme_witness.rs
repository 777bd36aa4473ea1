//! Genuine multipartite entanglement of combs: the PPT-mixture witness and
//! the biseparability inequality.
//!
//! ```text
//! cargo run --release --example gme_witness
//! ```

use comblab::constructions::{
    example_bisep_k, example_ghz_comb, example_sqrt_swap_comb, example_w_comb, ghz_state,
};
use comblab::entanglement::{bisep_inequality, gme_witness};
use comblab::Operator;

fn main() -> comblab::Result<()> {
    let named: Vec<(&str, Operator)> = vec![
        ("w-comb", example_w_comb().op().clone()),
        ("sqrt-swap", example_sqrt_swap_comb().op().clone()),
        ("GHZ state", ghz_state(&["A", "B", "C"])),
        ("bisep k(0.6)", example_bisep_k(0.6)?.op().clone()),
    ];
    for (name, op) in &named {
        let w = gme_witness(op)?;
        println!("{name}: tr(W rho) = {:+.5} ({:?}, {} iterations)", w.value, w.verdict, w.iterations);
    }
    for n in 3..=6 {
        let r = bisep_inequality(example_ghz_comb(n)?.op())?;
        println!("ghz-comb n={n}: corner coherence {:.4} vs biseparable bound {:.4}, violated {}", r.lhs, r.rhs, r.violated);
    }
    Ok(())
}
