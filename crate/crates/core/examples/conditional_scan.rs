//! Scan the shipped three-qubit comb whose conditionals stay PPT, and the
//! W-type comb whose conditionals do not.
//!
//! ```text
//! cargo run --release --example conditional_scan -- [samples] [seed]
//! ```

use comblab::constructions::{conditional_scan, example_ppt_conditionals_comb, example_w_comb, ScanOptions};

fn main() -> comblab::Result<()> {
    let mut args = std::env::args().skip(1);
    let samples = args.next().and_then(|s| s.parse().ok()).unwrap_or(500_000);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(42);
    let opts = ScanOptions { samples, seed, ..Default::default() };

    for (name, comb) in [("ppt-conditionals", example_ppt_conditionals_comb()?), ("w-comb", example_w_comb())] {
        let start = std::time::Instant::now();
        let report = conditional_scan(&comb, &opts)?;
        println!("{name}: {samples} samples, seed {seed}, {:.2?}", start.elapsed());
        for p in &report.parties {
            println!(
                "  condition {} -> {}: min eigenvalue {:+.6} at theta {:.4}, phi {:.4} (sample {}, {} skipped)",
                p.party, p.pair, p.min_eig, p.theta, p.phi, p.index, p.skipped
            );
        }
        println!("  all strictly PPT: {}", report.all_positive());
    }
    Ok(())
}
