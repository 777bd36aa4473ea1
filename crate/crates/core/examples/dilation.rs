//! Dilate the W-type comb into a circuit and audit where entanglement sits
//! inside the dilation.
//!
//! ```text
//! cargo run --example dilation
//! ```

use comblab::comb::compile;
use comblab::constructions::{audit, dilate, example_w_comb, round_trip_residual};

fn main() -> comblab::Result<()> {
    let w = example_w_comb();
    let d = dilate(&w)?;
    println!(
        "environment dimension {}, discarded dimension {}, isometry {}x{}",
        d.environment_dim,
        d.discarded_dim,
        d.isometry.nrows(),
        d.isometry.ncols()
    );
    println!("initial state on {:?}", d.circuit.initial().labels());
    println!("compile(dilation) vs comb: {:.1e}", round_trip_residual(&w, &d)?);
    println!("recompiled trace {:.3}", compile(&d.circuit)?.op().real_trace());

    let a = audit(&d)?;
    println!("min partial-transpose eigenvalues inside the dilation:");
    println!("  initial state          {:+.4}", a.initial);
    println!("  input fixed to |0>     {:+.4}", a.fixed_input);
    println!("  environment fixed      {:+.4}", a.fixed_environment);
    println!("  output fixed to |0>    {:+.4}", a.fixed_output);
    println!("entangled everywhere: {}", a.all_entangled());
    Ok(())
}
