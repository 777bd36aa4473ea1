mod common;

use common::{constructed_problem, planted_problem, random_hermitian};
use comblab::random::rng;
use comblab::sdp::{
    complex_to_real_embedding, embed_hermitian, solve, HermTerm, SdpOptions, SdpProblem, SdpStatus,
};
use comblab::tensor::{CMat, Operator, C64};
use nalgebra::DMatrix;

fn cm(rows: &[[(f64, f64); 2]; 2]) -> CMat {
    CMat::from_fn(2, 2, |r, c| C64::new(rows[r][c].0, rows[r][c].1))
}

fn sigma_x() -> CMat {
    cm(&[[(0., 0.), (1., 0.)], [(1., 0.), (0., 0.)]])
}

fn sigma_y() -> CMat {
    cm(&[[(0., 0.), (0., -1.)], [(0., 1.), (0., 0.)]])
}

fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn sym_eigs(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

fn min_eig(m: &CMat) -> f64 {
    m.clone().symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

#[test]
fn trace_minimisation_with_a_pauli_constraint() {
    let mut p = SdpProblem::new();
    let b = p.add_block("X", 2);
    p.set_objective(b, CMat::identity(2, 2));
    p.add_constraint(vec![(b, HermTerm::from_dense(&sigma_x()))], 1.0);
    let sol = solve(&p, &SdpOptions::default()).unwrap();
    assert_eq!(sol.status, SdpStatus::Optimal);
    assert!((sol.objective() - 1.0).abs() < 1e-7, "{}", sol.objective());
    let expected = (CMat::identity(2, 2) + sigma_x()) * C64::new(0.5, 0.0);
    assert!(max_abs(&(&sol.x[0] - expected)) < 1e-6);
}

#[test]
fn embedding_basics() {
    assert_eq!(complex_to_real_embedding(&CMat::identity(2, 2)), DMatrix::<f64>::identity(4, 4));
    let e = sym_eigs(&complex_to_real_embedding(&sigma_y()));
    for (got, want) in e.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
        assert!((got - want).abs() < 1e-12);
    }
    let mut r = rng(3);
    let x = random_hermitian(3, &mut r);
    let y = random_hermitian(3, &mut r);
    let lhs = complex_to_real_embedding(&x) + complex_to_real_embedding(&y);
    let rhs = complex_to_real_embedding(&(&x + &y));
    assert!((lhs - rhs).abs().max() < 1e-15);

    let bad = Operator::new(vec![2], vec!["A"], cm(&[[(0., 0.), (1., 0.)], [(0., 0.), (0., 0.)]])).unwrap();
    assert!(embed_hermitian(&bad).is_err());
}

#[test]
fn constructed_feasible_instances_meet_kkt_tolerances() {
    for seed in 0..20 {
        let (p, _) = constructed_problem(seed);
        let sol = solve(&p, &SdpOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal, "seed {seed}");
        let kkt = p.kkt(&sol);
        assert!(kkt.primal_residual <= 1e-7, "seed {seed}: {kkt:?}");
        assert!(kkt.dual_residual <= 1e-7, "seed {seed}: {kkt:?}");
        assert!(kkt.gap <= 1e-7 * (1.0 + sol.objective().abs()), "seed {seed}: {kkt:?}");
        assert!(kkt.min_eig_x >= -1e-8 && kkt.min_eig_s >= -1e-8, "seed {seed}: {kkt:?}");
        assert!(sol.primal_objective >= sol.dual_objective - 1e-6, "seed {seed}");
    }
}

#[test]
fn feasibility_mode_returns_an_interior_point() {
    for seed in 100..120 {
        let (mut p, _) = constructed_problem(seed);
        for k in 0..p.blocks.len() {
            let n = p.blocks[k].size;
            p.set_objective(k, CMat::zeros(n, n));
        }
        let sol = solve(&p, &SdpOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal, "seed {seed}");
        assert!(p.kkt(&sol).primal_residual <= 1e-7);
        for x in &sol.x {
            assert!(min_eig(x) >= 1e-6, "seed {seed}: min eig {}", min_eig(x));
        }
    }
}

#[test]
fn planted_optimum_is_recovered() {
    for seed in 300..320 {
        let (p, xs) = planted_problem(seed);
        let sol = solve(&p, &SdpOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal, "seed {seed}");
        let want: f64 = p.objective.iter().zip(&xs).map(|(c, x)| (c * x).trace().re).sum();
        assert!((sol.objective() - want).abs() <= 1e-7 * (1.0 + want.abs()), "seed {seed}");
        // off the central path the iterate error scales like sqrt(gap)
        for (x, want) in sol.x.iter().zip(&xs) {
            assert!(max_abs(&(x - want)) <= 1e-4, "seed {seed}: {}", max_abs(&(x - want)));
        }
        let tight = solve(&p, &SdpOptions { tol: 1e-13, ..Default::default() }).unwrap();
        for (x, want) in tight.x.iter().zip(&xs) {
            assert!(max_abs(&(x - want)) <= 1e-7, "seed {seed}: {}", max_abs(&(x - want)));
        }
    }
}

#[test]
fn objective_scaling_scales_the_value_only() {
    for seed in 200..220 {
        let (p, _) = planted_problem(seed);
        let base = solve(&p, &SdpOptions::default()).unwrap();
        let mut q = p.clone();
        let c = 7.5;
        for o in q.objective.iter_mut() {
            *o *= C64::new(c, 0.0);
        }
        let scaled = solve(&q, &SdpOptions::default()).unwrap();
        assert!((scaled.objective() - c * base.objective()).abs() <= 1e-6 * (1.0 + scaled.objective().abs()));
        for (a, b) in base.x.iter().zip(&scaled.x) {
            assert!(max_abs(&(a - b)) <= 1e-6, "seed {seed}: {}", max_abs(&(a - b)));
        }
    }
}

#[test]
fn dependent_rows_are_removed() {
    let mut p = SdpProblem::new();
    let b = p.add_block("X", 2);
    p.set_objective(b, CMat::identity(2, 2));
    p.add_constraint(vec![(b, HermTerm::from_dense(&sigma_x()))], 1.0);
    p.add_constraint(vec![(b, HermTerm::from_dense(&(sigma_x() * C64::new(2.0, 0.0))))], 2.0);
    let sol = solve(&p, &SdpOptions::default()).unwrap();
    assert_eq!(sol.status, SdpStatus::Optimal);
    assert_eq!(sol.removed_constraints.len(), 1);
    assert!((sol.objective() - 1.0).abs() < 1e-7);

    // same rows, contradictory right-hand sides
    p.constraints[1].rhs = 3.0;
    let sol = solve(&p, &SdpOptions::default()).unwrap();
    assert_eq!(sol.status, SdpStatus::Infeasible);
}

#[test]
fn infeasible_problem_is_reported() {
    // X >= 0 with tr(X) = -1
    let mut p = SdpProblem::new();
    let b = p.add_block("X", 2);
    p.add_constraint(vec![(b, HermTerm::from_dense(&CMat::identity(2, 2)))], -1.0);
    let sol = solve(&p, &SdpOptions::default()).unwrap();
    assert_ne!(sol.status, SdpStatus::Optimal);
}

#[test]
fn solves_are_deterministic() {
    let (p, _) = constructed_problem(42);
    let a = solve(&p, &SdpOptions::default()).unwrap();
    let b = solve(&p, &SdpOptions::default()).unwrap();
    assert_eq!(a.objective().to_bits(), b.objective().to_bits());
    assert_eq!(a.iterations, b.iterations);
}
