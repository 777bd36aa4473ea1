//! The interior-point solver on its own: minimise tr(X) over 2x2 Hermitian
//! X >= 0 with tr(sigma_x X) = 1 and tr(sigma_y X) = 0.5, then print the
//! optimality certificate.
//!
//! ```text
//! cargo run --example sdp_solver
//! ```

use comblab::sdp::{solve, HermTerm, SdpOptions, SdpProblem};
use comblab::tensor::{CMat, C64};

fn main() -> comblab::Result<()> {
    let c = |re: f64, im: f64| C64::new(re, im);
    let sx = CMat::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
    let sy = CMat::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]);

    let mut p = SdpProblem::new();
    let b = p.add_block("X", 2);
    p.set_objective(b, CMat::identity(2, 2));
    p.add_constraint(vec![(b, HermTerm::from_dense(&sx))], 1.0);
    p.add_constraint(vec![(b, HermTerm::from_dense(&sy))], 0.5);

    let sol = solve(&p, &SdpOptions::default())?;
    println!("status {:?} after {} iterations", sol.status, sol.iterations);
    println!("objective {:.9} (exact: sqrt(1.25) = {:.9})", sol.objective(), 1.25f64.sqrt());
    println!("X = {:.6}", sol.x[0]);
    let k = p.kkt(&sol);
    println!(
        "primal residual {:.1e}, dual residual {:.1e}, gap {:.1e}, min eig X {:+.1e}, min eig S {:+.1e}",
        k.primal_residual, k.dual_residual, k.gap, k.min_eig_x, k.min_eig_s
    );
    Ok(())
}
