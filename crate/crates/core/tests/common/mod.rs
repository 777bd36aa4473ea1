//! Random instances shared by the integration tests.
#![allow(dead_code)]

use comblab::comb::{compile, Channel, Circuit, Comb, Leg};
use comblab::constructions::Decomposition;
use comblab::random::{cptp_channel, ginibre, haar_unitary, psd_matrix, pure_state, rng, state, SeededRng};
use comblab::sdp::{HermTerm, SdpProblem};
use comblab::tensor::{kron, permute_subsystems, CMat, Operator, C64};
use rand::Rng;

pub fn out_in_out() -> Vec<Leg> {
    vec![Leg::out("A", 1), Leg::input("B", 1), Leg::out("C", 2)]
}

/// Random two-step qubit circuit `rho_AR`, then `(B, R) -> (C, E)` with `E` discarded.
pub fn random_circuit(rng: &mut SeededRng, env_dim: usize) -> Circuit {
    let rank = 1 + (ginibre(1, 1, rng)[(0, 0)].re.abs() * 2.0) as usize % 4;
    let initial = state(&[2, env_dim], &["A", "R"], rank.max(1), rng).unwrap();
    let step = cptp_channel(&[("B", 2), ("R", env_dim)], &[("C", 2)], env_dim.max(2), rng).unwrap();
    Circuit::new(initial, vec![step], out_in_out()).unwrap()
}

/// Random POVM with `n` elements on a `d`-dimensional system.
pub fn random_povm(label: &str, d: usize, n: usize, rng: &mut SeededRng) -> Vec<Operator> {
    let raw: Vec<CMat> = (0..n).map(|_| psd_matrix(d, 1, rng)).collect();
    let s: CMat = raw.iter().fold(CMat::zeros(d, d), |acc, m| acc + m);
    let e = s.clone().symmetric_eigen();
    let mut isq = CMat::zeros(d, d);
    for k in 0..d {
        let v = e.eigenvectors.column(k);
        isq += &v * v.adjoint() * C64::new(1.0 / e.eigenvalues[k].sqrt(), 0.0);
    }
    raw.iter()
        .map(|m| {
            let f = &isq * m * &isq;
            let f = (&f + f.adjoint()) * C64::new(0.5, 0.0);
            Operator::new(vec![d], vec![label], f).unwrap()
        })
        .collect()
}

/// Comb separable across `C:AB` with its decomposition: a random circuit
/// ending on an auxiliary output, followed by a measure-and-prepare channel.
pub fn random_last_output(rng: &mut SeededRng) -> (Comb, Decomposition) {
    let initial = state(&[2, 2], &["A", "R"], 2, rng).unwrap();
    let step = cptp_channel(&[("B", 2), ("R", 2)], &[("X", 2)], 2, rng).unwrap();
    let legs = vec![Leg::out("A", 1), Leg::input("B", 1), Leg::out("X", 2)];
    let inner = compile(&Circuit::new(initial, vec![step], legs).unwrap()).unwrap();
    let povm = random_povm("X", 2, 3, rng);
    let mut terms = Vec::new();
    let mut total: Option<Operator> = None;
    for f in &povm {
        let xi = comblab::comb::link(inner.op(), &f.transpose()).unwrap();
        let weight = xi.real_trace() / 2.0;
        let xi = permute_subsystems(&xi.scale(1.0 / xi.real_trace()), &["A", "B"]).unwrap();
        let eta = state(&[2], &["C"], 2, rng).unwrap();
        let t = kron(&xi, &eta).unwrap().scale(2.0 * weight);
        total = Some(match total {
            None => t,
            Some(a) => a.add(&t).unwrap(),
        });
        terms.push((weight, xi, eta));
    }
    let comb = Comb::new(total.unwrap(), out_in_out()).unwrap();
    (comb, Decomposition::LastOutput { terms })
}

/// `sum_a rho_A^(a) (x) mu_a J(Lambda_a)` with four random qubit states.
pub fn random_first_output(rng: &mut SeededRng) -> (Comb, Decomposition) {
    let raw: Vec<f64> = (0..4).map(|_| 0.2 + ginibre(1, 1, rng)[(0, 0)].norm()).collect();
    let sum: f64 = raw.iter().sum();
    let mut terms = Vec::new();
    let mut total: Option<Operator> = None;
    for w in raw {
        let rho = state(&[2], &["A"], 2, rng).unwrap();
        let ch = cptp_channel(&[("B", 2)], &[("C", 2)], 2, rng).unwrap();
        let g = permute_subsystems(ch.op(), &["B", "C"]).unwrap().scale(w / sum);
        let t = kron(&rho, &g).unwrap();
        total = Some(match total {
            None => t,
            Some(a) => a.add(&t).unwrap(),
        });
        terms.push((rho, g));
    }
    (Comb::new(total.unwrap(), out_in_out()).unwrap(), Decomposition::FirstOutput { terms })
}

/// `sum_a F_a^T (x) (1 (x) Lambda_a)(rho_AR)` for a random four-outcome POVM.
pub fn random_input(rng: &mut SeededRng) -> (Comb, Decomposition) {
    let rho_ar = state(&[2, 2], &["A", "R"], 2, rng).unwrap();
    let povm = random_povm("B", 2, 4, rng);
    let mut terms = Vec::new();
    let mut total: Option<Operator> = None;
    for f in &povm {
        let ch = cptp_channel(&[("R", 2)], &[("C", 2)], 2, rng).unwrap();
        let g = permute_subsystems(&comblab::comb::link(&rho_ar, ch.op()).unwrap(), &["A", "C"]).unwrap();
        let p = f.real_trace() / 2.0;
        let e = f.transpose().scale(1.0 / f.real_trace());
        let t = permute_subsystems(&kron(&e, &g).unwrap().scale(2.0 * p), &["A", "B", "C"]).unwrap();
        total = Some(match total {
            None => t,
            Some(a) => a.add(&t).unwrap(),
        });
        terms.push((p, e, g));
    }
    (Comb::new(total.unwrap(), out_in_out()).unwrap(), Decomposition::Input { terms })
}

pub fn random_pure(label: &str, rng: &mut SeededRng) -> Operator {
    pure_state(&[2], &[label], rng).unwrap()
}

pub fn random_unitary_channel(input: &str, output: &str, rng: &mut SeededRng) -> Channel {
    let u = haar_unitary(2, rng);
    comblab::comb::choi_of_unitary(&u, &[(input, 2)], &[(output, 2)]).unwrap()
}

pub fn random_hermitian<R: Rng>(n: usize, rng: &mut R) -> CMat {
    let g = ginibre(n, n, rng);
    (&g + g.adjoint()) * C64::new(0.5, 0.0)
}

/// Random problem with a known strictly feasible primal point `x0` and a
/// dual-feasible objective, so that an optimum exists.
pub fn constructed_problem(seed: u64) -> (SdpProblem, Vec<CMat>) {
    let mut r = rng(seed);
    let nblocks = r.random_range(1..=3);
    let mut p = SdpProblem::new();
    let mut x0 = Vec::new();
    for k in 0..nblocks {
        let n = r.random_range(2..=5);
        let b = p.add_block(format!("X{k}"), n);
        let x = psd_matrix(n, n, &mut r) + CMat::identity(n, n) * C64::new(0.1, 0.0);
        x0.push(x);
        let c = psd_matrix(n, n, &mut r) + CMat::identity(n, n) * C64::new(0.05, 0.0);
        p.set_objective(b, c);
    }
    let m = r.random_range(2..=8);
    for _ in 0..m {
        let mut terms = Vec::new();
        let mut rhs = 0.0;
        for (k, x) in x0.iter().enumerate() {
            let a = random_hermitian(x.nrows(), &mut r);
            rhs += (&a * x).trace().re;
            terms.push((k, HermTerm::from_dense(&a)));
        }
        p.add_constraint(terms, rhs);
    }
    (p, x0)
}

/// Problem with a planted optimum: rank-one `X*` per block, a strictly
/// complementary `S*` and enough constraints for both to be unique.
pub fn planted_problem(seed: u64) -> (SdpProblem, Vec<CMat>) {
    let mut r = rng(seed);
    let nblocks = r.random_range(1..=3);
    let mut p = SdpProblem::new();
    let mut xs = Vec::new();
    let mut ss = Vec::new();
    for k in 0..nblocks {
        let n = r.random_range(2..=5);
        p.add_block(format!("X{k}"), n);
        let v = comblab::random::haar_vector(n, &mut r);
        let vv = &v * v.adjoint();
        let t = r.random_range(0.5..2.0);
        xs.push(&vv * C64::new(t, 0.0));
        let perp = CMat::identity(n, n) - &vv;
        let w = psd_matrix(n, n, &mut r) + CMat::identity(n, n) * C64::new(0.5, 0.0);
        ss.push(&perp * w * &perp);
    }
    let m = r.random_range(nblocks + 2..=3 * nblocks + 1);
    let mut c = ss.clone();
    for _ in 0..m {
        let y: f64 = r.random_range(-1.0..1.0);
        let mut terms = Vec::new();
        let mut rhs = 0.0;
        for k in 0..nblocks {
            let a = random_hermitian(xs[k].nrows(), &mut r);
            rhs += (&a * &xs[k]).trace().re;
            c[k] += &a * C64::new(y, 0.0);
            terms.push((k, HermTerm::from_dense(&a)));
        }
        p.add_constraint(terms, rhs);
    }
    for (k, ck) in c.into_iter().enumerate() {
        p.set_objective(k, ck);
    }
    (p, xs)
}
