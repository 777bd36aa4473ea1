//! Alternate witness and comb SDPs from random starting combs until one is
//! genuinely multipartite entangled while all its conditionals stay PPT.
//!
//! ```text
//! cargo run --release --example seesaw -- [first seed] [seeds]
//! ```

use comblab::constructions::{seesaw, SeesawOptions};

fn main() -> comblab::Result<()> {
    let mut args = std::env::args().skip(1);
    let first: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    let count: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);
    let opts = SeesawOptions::default();
    for seed in first..first + count {
        let start = std::time::Instant::now();
        let out = seesaw(&[2, 2, 2], seed, &opts)?;
        println!("seed {seed}: {} after {:.1?}", out.audit.stop, start.elapsed());
        for r in &out.audit.trace {
            print!(
                "  it {:2}  witness {:+.6}  effect margin {:+.5}  causality {:.1e}",
                r.iteration, r.witness_value, r.effect_min, r.causality_residual
            );
            if let Some(s) = r.scan {
                print!("  scan [{:+.5}, {:+.5}, {:+.5}] cuts {}", s[0], s[1], s[2], r.cuts_added);
            }
            println!();
        }
        if let Some(scan) = &out.final_scan {
            for p in &scan.parties {
                println!("  fresh scan: condition {} -> {} min {:+.6}", p.party, p.pair, p.min_eig);
            }
        }
    }
    Ok(())
}
