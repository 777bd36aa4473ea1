mod common;

use comblab::comb::{
    born_probability, build_assemblage, choi_of_unitary, compile, condition, link, link_all, marginal, verify_causality,
    verify_causality_with, Channel, Circuit, Comb, Leg,
};
use comblab::constructions::*;
use comblab::entanglement::{ppt_min_eig, CutSpec};
use comblab::random::{psd_matrix, rng, state, SeededRng};
use comblab::tensor::{kron, partial_trace, permute_subsystems, CMat, Operator};
use comblab::C64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn id(label: &str) -> Operator {
    Operator::identity(vec![2], vec![label]).unwrap()
}

fn zero(label: &str) -> Operator {
    product_projector(&[label], "0")
}

fn psd(dims: &[usize], labels: &[&str], r: &mut SeededRng) -> Operator {
    let n: usize = dims.iter().product();
    Operator::new(dims.to_vec(), labels.to_vec(), psd_matrix(n, n, r)).unwrap()
}

fn aligned_distance(a: &Operator, b: &Operator) -> f64 {
    let order: Vec<&str> = b.labels().iter().map(String::as_str).collect();
    permute_subsystems(a, &order).unwrap().distance(b).unwrap()
}

#[test]
fn link_examples() {
    let mut r = rng(1);
    let rho = state(&[2], &["X"], 2, &mut r).unwrap();
    let out = link(&rho, Channel::identity("X", "Y", 2).unwrap().op()).unwrap();
    assert!(out.distance(&rho.relabel("X", "Y").unwrap()).unwrap() < 1e-15);
    let t = link(&rho, &id("X")).unwrap();
    assert!(t.labels().is_empty());
    assert!((t.trace() - rho.trace()).norm() < 1e-15);
    // disjoint labels give the tensor product
    let sigma = state(&[3], &["Z"], 3, &mut r).unwrap();
    assert_eq!(link(&rho, &sigma).unwrap(), kron(&rho, &sigma).unwrap());
    let wrong = Operator::identity(vec![3], vec!["X"]).unwrap();
    assert!(link(&rho, &wrong).is_err());
}

#[test]
fn link_is_commutative_and_associative() {
    let mut r = rng(2);
    for _ in 0..20 {
        let f = psd(&[2, 3], &["X", "Y"], &mut r);
        let g = psd(&[3, 2], &["Y", "Z"], &mut r);
        let h = psd(&[2, 2], &["Z", "W"], &mut r);
        assert!(aligned_distance(&link(&f, &g).unwrap(), &link(&g, &f).unwrap()) < 1e-10);
        let left = link(&link(&f, &g).unwrap(), &h).unwrap();
        let right = link(&f, &link(&g, &h).unwrap()).unwrap();
        assert!(aligned_distance(&left, &right) < 1e-10);
        assert!(aligned_distance(&link_all(&[&f, &g, &h]).unwrap(), &right) < 1e-10);
    }
}

#[test]
fn link_preserves_positivity() {
    let mut r = rng(3);
    for _ in 0..100 {
        let f = psd(&[2, 2], &["X", "Y"], &mut r);
        let g = psd(&[2, 3], &["Y", "Z"], &mut r);
        let out = link(&f, &g).unwrap();
        assert!(out.min_eigenvalue().unwrap() >= -1e-10 * out.max_abs().max(1.0));
    }
}

#[test]
fn causality_examples() {
    let w = verify_causality(&example_w_comb()).unwrap();
    assert!(w.is_proper_comb());
    assert!(w.max_residual() < 1e-15);

    let ghz = Comb::new(ghz_state(&["A", "B", "C"]).scale(2.0), common::out_in_out()).unwrap();
    let rep = verify_causality(&ghz).unwrap();
    assert!(!rep.passed);
    assert!(rep.max_residual() > 0.1);

    for n in 3..=6 {
        let comb = example_ghz_comb(n).unwrap();
        assert!(verify_causality(&comb).unwrap().passed, "n = {n}");
        let labels = party_labels(n);
        let last = partial_trace(comb.op(), &[labels[n - 1].as_str()]).unwrap();
        let rest: Vec<&str> = labels[..n - 1].iter().map(String::as_str).collect();
        let want = Operator::identity(vec![2; n - 1], rest).unwrap().scale(2f64.powf(-(n as f64 - 1.0) / 2.0));
        assert!(last.distance(&want).unwrap() < 1e-15, "n = {n}");
    }
}

#[test]
fn loose_causality_mode_accepts_rounded_data() {
    let w = example_w_comb();
    let mut m = w.op().matrix().clone();
    for i in 0..8 {
        for j in 0..8 {
            m[(i, j)] = c((m[(i, j)].re * 1000.0).round() / 1000.0, (m[(i, j)].im * 1000.0).round() / 1000.0);
        }
    }
    let rounded = w.with_op(w.op().with_matrix(m)).unwrap();
    assert!(!verify_causality(&rounded).unwrap().passed);
    let loose = verify_causality_with(&rounded, 0.02).unwrap();
    assert!(loose.max_residual() <= 0.02);
}

#[test]
fn compile_examples() {
    let mut r = rng(4);
    let psi = comblab::random::pure_state(&[2], &["A"], &mut r).unwrap();
    let circuit = Circuit::new(psi.clone(), vec![Channel::identity("B", "C", 2).unwrap()], common::out_in_out()).unwrap();
    let comb = compile(&circuit).unwrap();
    let want = kron(&psi, &phi_plus("B", "C").scale(2.0)).unwrap();
    assert!(aligned_distance(comb.op(), &want) < 1e-15);
    let rep = verify_causality(&comb).unwrap();
    assert!(rep.is_proper_comb());
    assert!((comb.op().real_trace() - 2.0).abs() < 1e-14);

    for k in 0..20 {
        let circuit = common::random_circuit(&mut r, 1 + k % 3);
        let comb = compile(&circuit).unwrap();
        assert!(verify_causality(&comb).unwrap().is_proper_comb());
    }
}

#[test]
fn choi_of_unitary_examples() {
    let ident = choi_of_unitary(&CMat::identity(2, 2), &[("B", 2)], &[("C", 2)]).unwrap();
    assert!(aligned_distance(ident.op(), &phi_plus("B", "C").scale(2.0)) < 1e-15);
    let mut z = CMat::identity(2, 2);
    z[(1, 1)] = c(-1.0, 0.0);
    let zc = choi_of_unitary(&z, &[("B", 2)], &[("C", 2)]).unwrap();
    assert!(aligned_distance(zc.op(), &phi_minus("B", "C").scale(2.0)) < 1e-15);

    let s = choi_of_unitary(&sqrt_swap_matrix(), &[("B", 2), ("R", 2)], &[("C", 2), ("D", 2)]).unwrap();
    assert_eq!(s.op().dim(), 16);
    let ev = s.op().eigenvalues().unwrap();
    assert!((ev[15] - 4.0).abs() < 1e-12 && ev[..15].iter().all(|x| x.abs() < 1e-12));
    assert!(s.tp_residual().unwrap() < 1e-12);

    let mut bad = CMat::identity(2, 2);
    bad[(0, 1)] = c(0.5, 0.0);
    assert!(choi_of_unitary(&bad, &[("B", 2)], &[("C", 2)]).is_err());
}

#[test]
fn condition_examples() {
    let k = example_bisep_k(0.6).unwrap();
    let ab = condition(&k, "C", &zero("C")).unwrap();
    assert!(ppt_min_eig(&ab, &"A:B".parse::<CutSpec>().unwrap()).unwrap() >= -1e-14);

    let bob = compile(&circuit_bob_controls()).unwrap();
    let ac = condition(&bob, "B", &zero("B")).unwrap();
    assert!(aligned_distance(&ac, &phi_plus("A", "C")) < 1e-14);

    let w = example_w_comb();
    let traced = condition(&w, "C", &id("C")).unwrap();
    assert!(traced.distance(&marginal(&w, &["C"]).unwrap()).unwrap() < 1e-15);

    // role checks
    assert!(condition(&w, "B", &id("B")).is_err());
    assert!(condition(&w, "C", &id("C").scale(2.0)).is_err());
    let neg = Operator::new(vec![2], vec!["C"], CMat::from_diagonal_element(2, 2, c(-0.5, 0.0))).unwrap();
    assert!(condition(&w, "C", &neg).is_err());
    assert!(condition(&w, "Q", &id("Q")).is_err());
}

#[test]
fn born_rule_examples() {
    let mut r = rng(5);
    for k in 0..10 {
        let comb = compile(&common::random_circuit(&mut r, 1 + k % 2)).unwrap();
        let tau = state(&[2], &["B"], 2, &mut r).unwrap();
        let p = born_probability(&comb, &[id("A"), tau, id("C")]).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
    }

    let teleport = compile(&circuit_bell_teleport()).unwrap();
    for _ in 0..5 {
        let tau = state(&[2], &["B"], 2, &mut r).unwrap();
        let p = born_probability(&teleport, &[id("A"), tau, zero("C").transpose()]).unwrap();
        assert!((p - 0.25).abs() < 1e-12);
    }

    let cz = compile(&circuit_alice_cz()).unwrap();
    let tau = state(&[2], &["B"], 2, &mut r).unwrap();
    let p = born_probability(&cz, &[zero("A").transpose(), tau, id("C")]).unwrap();
    assert!((p - 0.5).abs() < 1e-12);

    assert!(born_probability(&cz, &[id("A"), id("C")]).is_err());
    assert!(born_probability(&cz, &[id("A"), id("A")]).is_err());
}

#[test]
fn assemblage_examples() {
    let cz = compile(&circuit_alice_cz()).unwrap();
    let trivial = build_assemblage(&cz, "A", &[vec![id("A")]]).unwrap();
    assert!(trivial.elements[0][0].distance(&trivial.reference).unwrap() < 1e-15);

    let basis = vec![zero("A"), product_projector(&["A"], "1")];
    let asm = build_assemblage(&cz, "A", &[basis]).unwrap();
    let k0 = &asm.elements[0][0];
    let k1 = &asm.elements[0][1];
    // each member is half of an identity or Z Choi
    assert!(aligned_distance(k0, &phi_plus("B", "C")) < 1e-14);
    assert!(aligned_distance(k1, &phi_minus("B", "C")) < 1e-14);
    assert!(asm.no_signalling_residual().unwrap() < 1e-15);

    let incomplete = vec![zero("A")];
    assert!(build_assemblage(&cz, "A", &[incomplete]).is_err());
}

#[test]
fn later_choices_do_not_signal_backwards() {
    let mut r = rng(6);
    let mut worst = 0.0f64;
    for k in 0..100 {
        let comb = compile(&common::random_circuit(&mut r, 1 + k % 3)).unwrap();
        let reference = marginal(&comb, &["C"]).unwrap();
        for _ in 0..2 {
            let povm = common::random_povm("C", 2, 3, &mut r);
            let mut acc = condition(&comb, "C", &povm[0]).unwrap();
            for e in &povm[1..] {
                acc = acc.add(&condition(&comb, "C", e).unwrap()).unwrap();
            }
            worst = worst.max(acc.distance(&reference).unwrap());
        }
        // whatever enters at B, the first output keeps the same state
        let rho_a = partial_trace(&reference, &["B"]).unwrap().scale(0.5);
        let tau = state(&[2], &["B"], 2, &mut r).unwrap();
        let first = link(&reference, &tau).unwrap();
        worst = worst.max(first.distance(&rho_a).unwrap());
    }
    assert!(worst <= 1e-10, "{worst}");
}

#[test]
fn conditioning_is_linear() {
    let mut r = rng(7);
    let comb = compile(&common::random_circuit(&mut r, 2)).unwrap();
    let povm = common::random_povm("A", 2, 4, &mut r);
    let mut sum = condition(&comb, "A", &povm[0]).unwrap();
    for e in &povm[1..] {
        sum = sum.add(&condition(&comb, "A", e).unwrap()).unwrap();
    }
    assert!(sum.distance(&condition(&comb, "A", &id("A")).unwrap()).unwrap() < 1e-12);

    let t1 = state(&[2], &["B"], 2, &mut r).unwrap();
    let t2 = state(&[2], &["B"], 1, &mut r).unwrap();
    let mix = t1.scale(0.3).add(&t2.scale(0.7)).unwrap();
    let lhs = condition(&comb, "B", &mix).unwrap();
    let rhs = condition(&comb, "B", &t1).unwrap().scale(0.3).add(&condition(&comb, "B", &t2).unwrap().scale(0.7)).unwrap();
    assert!(lhs.distance(&rhs).unwrap() < 1e-12);
}

#[test]
fn comb_json_round_trip() {
    let w = example_w_comb();
    let back = Comb::from_json(&w.to_json()).unwrap();
    assert_eq!(back, w);
    let circuit = circuit_alice_cz();
    let again = Circuit::from_json(&circuit.to_json()).unwrap();
    assert!(compile(&again).unwrap().op().distance(compile(&circuit).unwrap().op()).unwrap() < 1e-15);
    assert!(Comb::from_json(r#"{"dims":[2],"labels":["A"],"matrix":[[[1,0],[0,0]],[[0,0],[1,0]]],"legs":[]}"#).is_err());
    let legs = vec![Leg::out("A", 1)];
    assert!(Comb::new(id("B"), legs).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn compiled_circuits_are_proper_combs(seed in any::<u64>(), env in 1usize..4) {
        let mut r = rng(seed);
        let comb = compile(&common::random_circuit(&mut r, env)).unwrap();
        let rep = verify_causality(&comb).unwrap();
        prop_assert!(rep.is_proper_comb(), "residual {}", rep.max_residual());
    }

    #[test]
    fn link_with_identity_is_partial_trace(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = psd(&[2, 3], &["X", "Y"], &mut r);
        let y = Operator::identity(vec![3], vec!["Y"]).unwrap();
        prop_assert!(link(&x, &y).unwrap().distance(&partial_trace(&x, &["Y"]).unwrap()).unwrap() <= 1e-12 * (1.0 + x.max_abs()));
    }
}
