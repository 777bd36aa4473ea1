use comblab::random::{psd_matrix, rng, state};
use comblab::tensor::{herm_eig, kron, kron_all, partial_trace, partial_transpose, permute_subsystems, purify, CMat, Operator};
use comblab::{Error, C64};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn pauli(k: usize, label: &str) -> Operator {
    let m = match k {
        0 => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
        1 => [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]],
        _ => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]],
    };
    Operator::new(vec![2], vec![label], CMat::from_fn(2, 2, |i, j| m[i][j])).unwrap()
}

fn id(label: &str, d: usize) -> Operator {
    Operator::identity(vec![d], vec![label]).unwrap()
}

fn phi_plus_normalized() -> Operator {
    let mut m = CMat::zeros(4, 4);
    for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        m[(i, j)] = c(0.5, 0.0);
    }
    Operator::new(vec![2, 2], vec!["A", "B"], m).unwrap()
}

fn random_op(dims: &[usize], labels: &[&str], seed: u64) -> Operator {
    let n: usize = dims.iter().product();
    Operator::new(dims.to_vec(), labels.to_vec(), comblab::random::ginibre(n, n, &mut rng(seed))).unwrap()
}

#[test]
fn kron_examples() {
    let a = kron(&id("A", 2), &id("B", 2)).unwrap();
    assert_eq!(a.matrix(), &CMat::identity(4, 4));
    let z = kron(&pauli(2, "A"), &id("B", 2)).unwrap();
    let diag: Vec<f64> = (0..4).map(|i| z.matrix()[(i, i)].re).collect();
    assert_eq!(diag, vec![1.0, 1.0, -1.0, -1.0]);
    let mut p0 = CMat::zeros(2, 2);
    p0[(0, 0)] = c(1.0, 0.0);
    let k = kron(&Operator::single("A", p0).unwrap(), &pauli(0, "B")).unwrap();
    let mut want = CMat::zeros(4, 4);
    want[(0, 1)] = c(1.0, 0.0);
    want[(1, 0)] = c(1.0, 0.0);
    assert_eq!(k.matrix(), &want);
    assert_eq!(k.labels(), ["A", "B"]);
    assert!(matches!(kron(&id("A", 2), &id("A", 2)), Err(Error::InvalidInput(_))));
}

#[test]
fn partial_trace_examples() {
    let r = partial_trace(&phi_plus_normalized(), &["B"]).unwrap();
    assert!(r.distance(&id("A", 2).scale(0.5)).unwrap() < 1e-15);
    let w = comblab::constructions::example_w_comb();
    let ab = partial_trace(w.op(), &["C"]).unwrap();
    let want = Operator::identity(vec![2, 2], vec!["A", "B"]).unwrap().scale(0.5);
    assert!(ab.distance(&want).unwrap() < 1e-15);
    assert!(partial_trace(w.op(), &["Z"]).is_err());
}

#[test]
fn partial_transpose_examples() {
    let pt = partial_transpose(&phi_plus_normalized(), &["B"]).unwrap();
    let e = herm_eig(&pt).unwrap();
    for (got, want) in e.values.iter().zip([-0.5, 0.5, 0.5, 0.5]) {
        assert!((got - want).abs() < 1e-14);
    }
    let mut r = rng(3);
    let sep = kron(&state(&[2], &["A"], 2, &mut r).unwrap(), &state(&[2], &["B"], 2, &mut r).unwrap()).unwrap();
    assert!(partial_transpose(&sep, &["B"]).unwrap().min_eigenvalue().unwrap() >= -1e-14);
    let x = random_op(&[2, 3], &["A", "B"], 5);
    assert_eq!(partial_transpose(&x, &["A", "B"]).unwrap(), x.transpose());
    assert!(partial_transpose(&x, &["Q"]).is_err());
}

#[test]
fn permutation_examples() {
    let x = random_op(&[2, 3, 2], &["A", "B", "C"], 8);
    assert_eq!(permute_subsystems(&x, &["A", "B", "C"]).unwrap(), x);
    let mut r = rng(9);
    let rho = state(&[2], &["A"], 2, &mut r).unwrap();
    let sigma = state(&[3], &["B"], 3, &mut r).unwrap();
    let swapped = permute_subsystems(&kron(&rho, &sigma).unwrap(), &["B", "A"]).unwrap();
    assert!(swapped.distance(&kron(&sigma, &rho).unwrap()).unwrap() < 1e-15);
    let once = permute_subsystems(&x, &["B", "C", "A"]).unwrap();
    let twice = permute_subsystems(&once, &["C", "A", "B"]).unwrap();
    assert_eq!(permute_subsystems(&twice, &["A", "B", "C"]).unwrap(), x);
    assert!(permute_subsystems(&x, &["A", "B"]).is_err());
    assert!(permute_subsystems(&x, &["A", "B", "B"]).is_err());
}

#[test]
fn herm_eig_examples() {
    assert_eq!(herm_eig(&Operator::identity(vec![4], vec!["A"]).unwrap()).unwrap().values, vec![1.0; 4]);
    assert_eq!(herm_eig(&pauli(2, "A")).unwrap().values, vec![-1.0, 1.0]);
    let skew = Operator::new(vec![2], vec!["A"], pauli(1, "A").matrix() * c(0.0, 1.0)).unwrap();
    match herm_eig(&skew) {
        Err(Error::NotHermitian { residual }) => assert!((residual - 2.0).abs() < 1e-15),
        other => panic!("expected a Hermiticity error, got {other:?}"),
    }
}

#[test]
fn purify_examples() {
    let mut p0 = CMat::zeros(2, 2);
    p0[(0, 0)] = c(1.0, 0.0);
    let psi = purify(&Operator::single("A", p0).unwrap(), "R").unwrap();
    assert_eq!(psi.dims(), [2, 1]);
    assert!((psi.amplitude(0).norm() - 1.0).abs() < 1e-15);

    let psi = purify(&id("A", 2).scale(0.5), "R").unwrap();
    assert_eq!(psi.dims(), [2, 2]);
    let back = partial_trace(&psi.projector(), &["R"]).unwrap();
    assert!(back.distance(&id("A", 2).scale(0.5)).unwrap() < 1e-15);
    assert!((psi.norm() - 1.0).abs() < 1e-15);
    // maximally entangled: the other marginal is maximally mixed too
    let other = partial_trace(&psi.projector(), &["A"]).unwrap();
    assert!(other.distance(&id("R", 2).scale(0.5)).unwrap() < 1e-15);

    // causal marginal of the W-type comb: rank 4, so a four-level ancilla
    let w = comblab::constructions::example_w_comb();
    let marginal = partial_trace(w.op(), &["C"]).unwrap();
    let psi = purify(&marginal, "R").unwrap();
    assert_eq!(psi.dims(), [2, 2, 4]);
    assert!(partial_trace(&psi.projector(), &["R"]).unwrap().distance(&marginal).unwrap() < 1e-14);

    assert!(matches!(purify(&pauli(2, "A"), "R"), Err(Error::NotPositive { .. })));
    assert!(purify(&id("A", 2), "A").is_err());
}

#[test]
fn json_round_trip_and_rejection() {
    let x = random_op(&[2, 3], &["A", "B"], 11);
    assert_eq!(Operator::from_json(&x.to_json()).unwrap(), x);
    assert!(Operator::from_json(r#"{"dims":[2],"labels":["A"],"matrix":[[[1,0],[0,0]],[[0,0]]]}"#).is_err());
    assert!(Operator::from_json(r#"{"dims":[3],"labels":["A"],"matrix":[[[1,0],[0,0]],[[0,0],[1,0]]]}"#).is_err());
    assert!(Operator::from_json(r#"{"dims":[2,2],"labels":["A","A"],"matrix":[]}"#).is_err());
}

fn dims_strategy() -> impl Strategy<Value = usize> {
    prop_oneof![Just(2usize), Just(3), Just(4)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trace_of_product_factor(da in dims_strategy(), db in dims_strategy(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = Operator::new(vec![da], vec!["A"], psd_matrix(da, da, &mut r)).unwrap();
        let y = Operator::new(vec![db], vec!["B"], psd_matrix(db, db, &mut r)).unwrap();
        let t = partial_trace(&kron(&x, &y).unwrap(), &["B"]).unwrap();
        prop_assert!(t.distance(&x.scale(y.real_trace())).unwrap() <= 1e-10 * (1.0 + x.max_abs() * y.real_trace()));
    }

    #[test]
    fn partial_transpose_is_an_exact_involution(da in dims_strategy(), db in dims_strategy(), seed in any::<u64>()) {
        let x = random_op(&[da, db], &["A", "B"], seed);
        let h = x.hermitian_part();
        let t = partial_transpose(&h, &["A"]).unwrap();
        prop_assert_eq!(partial_transpose(&t, &["A"]).unwrap(), h.clone());
        prop_assert_eq!(t.trace(), h.trace());
        prop_assert!(t.hermiticity_residual() == 0.0);
    }

    #[test]
    fn eigen_sum_and_orthonormality(d in 1usize..9, seed in any::<u64>()) {
        let x = random_op(&[d], &["A"], seed).hermitian_part();
        let e = herm_eig(&x).unwrap();
        let sum: f64 = e.values.iter().sum();
        prop_assert!((sum - x.real_trace()).abs() <= 1e-10 * (1.0 + x.max_abs()));
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        let gram = e.vectors.adjoint() * &e.vectors - CMat::identity(d, d);
        prop_assert!(gram.iter().all(|z| z.norm() <= 1e-9));
        let rec = e.reconstruct() - x.matrix();
        prop_assert!(rec.iter().all(|z| z.norm() <= 1e-9 * (1.0 + x.max_abs())));
    }

    #[test]
    fn purification_round_trip(d in dims_strategy(), rank in 1usize..5, seed in any::<u64>()) {
        let rank = rank.min(d);
        let rho = Operator::new(vec![d], vec!["A"], psd_matrix(d, rank, &mut rng(seed))).unwrap();
        let psi = purify(&rho, "R").unwrap();
        prop_assert_eq!(psi.dims()[1], rank);
        let back = partial_trace(&psi.projector(), &["R"]).unwrap();
        prop_assert!(back.distance(&rho).unwrap() <= 1e-9);
    }

    #[test]
    fn permutation_preserves_spectrum(seed in any::<u64>()) {
        let x = random_op(&[2, 3, 2], &["A", "B", "C"], seed).hermitian_part();
        let y = permute_subsystems(&x, &["C", "A", "B"]).unwrap();
        let (a, b) = (x.eigenvalues().unwrap(), y.eigenvalues().unwrap());
        prop_assert!(a.iter().zip(&b).all(|(p, q)| (p - q).abs() <= 1e-10 * (1.0 + x.max_abs())));
        // a permuted Kronecker product is the product in the new order
        let parts = [random_op(&[2], &["A"], seed ^ 1), random_op(&[3], &["B"], seed ^ 2), random_op(&[2], &["C"], seed ^ 3)];
        let k = kron_all(&[&parts[0], &parts[1], &parts[2]]).unwrap();
        let want = kron_all(&[&parts[2], &parts[0], &parts[1]]).unwrap();
        prop_assert!(permute_subsystems(&k, &["C", "A", "B"]).unwrap().distance(&want).unwrap() <= 1e-12);
    }
}
