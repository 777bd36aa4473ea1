use sha2::{Digest, Sha256};

use crate::comb::{
    alternating_legs, choi_of_unitary, compile, Channel, ChannelKind, Circuit, Comb, Dir, Leg, MeasurePrepare,
};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::tensor::{c, kron, kron_all, permute_subsystems, real, CMat, CVec, Operator, C64};

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Computational basis vector for a bit string such as `"010"`.
pub(crate) fn ket(bits: &str) -> CVec {
    let n = bits.len();
    let idx = usize::from_str_radix(bits, 2).expect("bit string");
    let mut v = CVec::zeros(1 << n);
    v[idx] = real(1.0);
    v
}

fn outer(v: &CVec) -> CMat {
    v * v.adjoint()
}

fn qubits(labels: &[&str], m: CMat) -> Operator {
    Operator::new(vec![2; labels.len()], labels.to_vec(), m).expect("qubit operator shape")
}

/// Normalised `|Phi+> = (|00> + |11>)/sqrt(2)` projector on two labels.
pub fn phi_plus(a: &str, b: &str) -> Operator {
    let v = (ket("00") + ket("11")) * real(SQRT_HALF);
    qubits(&[a, b], outer(&v))
}

/// `|Phi-><Phi-|` on two labels.
pub fn phi_minus(a: &str, b: &str) -> Operator {
    let v = (ket("00") - ket("11")) * real(SQRT_HALF);
    qubits(&[a, b], outer(&v))
}

/// `|GHZ_n><GHZ_n|` on the given labels.
pub fn ghz_state(labels: &[&str]) -> Operator {
    // entries written as exact halves rather than (1/sqrt2)^2
    let d = 1usize << labels.len();
    let mut m = CMat::zeros(d, d);
    for (i, j) in [(0, 0), (0, d - 1), (d - 1, 0), (d - 1, d - 1)] {
        m[(i, j)] = real(0.5);
    }
    qubits(labels, m)
}

fn basis_projector(label: &str, bit: usize) -> Operator {
    let mut m = CMat::zeros(2, 2);
    m[(bit, bit)] = real(1.0);
    qubits(&[label], m)
}

fn identity(label: &str) -> Operator {
    qubits(&[label], CMat::identity(2, 2))
}

fn out_in_out() -> Vec<Leg> {
    alternating_legs(&["A", "B", "C"], &[Dir::Out, Dir::In, Dir::Out])
}

/// Rank-two comb `|s1><s1| + |s2><s2|` with
/// `|s1> = |001>/sqrt2 + (|010> + |100>)/2` and
/// `|s2> = |110>/sqrt2 + i(|101> - |011>)/2`; legs `A` out, `B` in, `C` out.
pub fn example_w_comb() -> Comb {
    let s1 = ket("001") * real(SQRT_HALF) + (ket("010") + ket("100")) * real(0.5);
    let s2 = ket("110") * real(SQRT_HALF) + (ket("101") - ket("011")) * c(0.0, 0.5);
    let op = qubits(&["A", "B", "C"], outer(&s1) + outer(&s2));
    Comb::new(op, out_in_out()).expect("fixed comb")
}

/// Labels `A, B, C, ...` for `n` parties.
pub fn party_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| ((b'A' + i as u8) as char).to_string()).collect()
}

/// The `n`-qubit family
/// `2^{-(n-3)/2} |GHZ_n><GHZ_n| + 2^{-(n-1)/2} (1_{n-1} - |0..0><0..0| - |1..1><1..1|) (x) |0><0|`.
///
/// Legs alternate so that the last one is an output: `out, in, ..., out`
/// for odd `n` and `in, out, ..., out` for even `n`. Odd `n` gives a
/// normalised comb; for even `n` the trace is `2^{n/2 - 1/2}`, so the
/// causality levels hold but the normalisation is off by `sqrt 2`.
pub fn example_ghz_comb(n: usize) -> Result<Comb> {
    if !(3..=8).contains(&n) {
        return Err(Error::invalid(format!("the GHZ comb family is built for 3 <= n <= 8, got {n}")));
    }
    let labels = party_labels(n);
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    let ghz = ghz_state(&refs);
    let d = 1usize << (n - 1);
    let mut rest = CMat::identity(d, d);
    rest[(0, 0)] = real(0.0);
    rest[(d - 1, d - 1)] = real(0.0);
    let rest = Operator::new(vec![2; n - 1], refs[..n - 1].to_vec(), rest)?;
    let tail = kron(&rest, &basis_projector(refs[n - 1], 0))?;
    let a = 2f64.powf(-(n as f64 - 3.0) / 2.0);
    let b = 2f64.powf(-(n as f64 - 1.0) / 2.0);
    let op = ghz.scale(a).add(&tail.scale(b))?;
    let dirs: Vec<Dir> = (0..n)
        .map(|i| if (n - 1 - i) % 2 == 0 { Dir::Out } else { Dir::In })
        .collect();
    Comb::new(op, alternating_legs(&refs, &dirs))
}

fn check_open_unit(p: f64, lo: f64, hi: f64, what: &str) -> Result<()> {
    if !(p > lo && p < hi) || !p.is_finite() {
        return Err(Error::invalid(format!("{what}: p = {p} outside ({lo}, {hi})")));
    }
    Ok(())
}

/// `2p |0><0|_A (x) Phi+_BC + (1-p) 1_B (x) Phi+_AC`, written as the mixture
/// of its two terms (product across `A:BC` and across `B:AC`
/// respectively), so it is biseparable by construction.
pub fn example_bisep_k(p: f64) -> Result<Comb> {
    check_open_unit(p, 0.0, 1.0, "biseparable mixture")?;
    let first = kron(&basis_projector("A", 0), &phi_plus("B", "C"))?.scale(2.0 * p);
    let second = permute_subsystems(&kron(&identity("B"), &phi_plus("A", "C"))?, &["A", "B", "C"])?.scale(1.0 - p);
    Comb::new(first.add(&second)?, out_in_out())
}

/// Lower end of the parameter window of [`example_bisep_conditional`].
pub fn bisep_conditional_min() -> f64 {
    (33f64.sqrt() - 3.0) / 12.0
}

/// Biseparable comb with conditional entanglement in every pair:
/// `2p |0><0|_A Phi+_BC + p 1_B Phi+_AC + (1-2p)/2 (Phi+_AB |0><0|_C +
/// Phi-_AB |1><1|_C + |010><010| + |101><101|)`, for
/// `(sqrt33 - 3)/12 < p < 1/2`.
pub fn example_bisep_conditional(p: f64) -> Result<Comb> {
    check_open_unit(p, bisep_conditional_min(), 0.5, "conditional example")?;
    let t1 = kron(&basis_projector("A", 0), &phi_plus("B", "C"))?.scale(2.0 * p);
    let t2 = permute_subsystems(&kron(&identity("B"), &phi_plus("A", "C"))?, &["A", "B", "C"])?.scale(p);
    let mut t3 = kron(&phi_plus("A", "B"), &basis_projector("C", 0))?;
    t3 = t3.add(&kron(&phi_minus("A", "B"), &basis_projector("C", 1))?)?;
    let extra = outer(&ket("010")) + outer(&ket("101"));
    t3 = t3.add(&qubits(&["A", "B", "C"], extra))?;
    let op = t1.add(&t2)?.add(&t3.scale((1.0 - 2.0 * p) / 2.0))?;
    Comb::new(op, out_in_out())
}

/// `1/2 [[2,0,0,0],[0,1+i,1-i,0],[0,1-i,1+i,0],[0,0,0,2]]`.
pub fn sqrt_swap_matrix() -> CMat {
    let mut m = CMat::zeros(4, 4);
    m[(0, 0)] = real(1.0);
    m[(3, 3)] = real(1.0);
    m[(1, 1)] = c(0.5, 0.5);
    m[(2, 2)] = c(0.5, 0.5);
    m[(1, 2)] = c(0.5, -0.5);
    m[(2, 1)] = c(0.5, -0.5);
    m
}

fn swap_matrix() -> CMat {
    let mut m = CMat::zeros(4, 4);
    for (r, col) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        m[(r, col)] = real(1.0);
    }
    m
}

fn two_swap_circuit(u: &CMat) -> Result<Circuit> {
    let env = basis_projector("E0", 0);
    let first = choi_of_unitary(u, &[("A", 2), ("E0", 2)], &[("B", 2), ("E1", 2)])?;
    let second = choi_of_unitary(u, &[("C", 2), ("E1", 2)], &[("D", 2), ("E2", 2)])?;
    let legs = alternating_legs(&["A", "B", "C", "D"], &[Dir::In, Dir::Out, Dir::In, Dir::Out]);
    Circuit::new(env, vec![first, second], legs)
}

/// Four-leg circuit: a qubit environment starts in `|0>`, the system
/// entering at `A` interacts with it through `sqrt(SWAP)`, leaves at `B`,
/// re-enters at `C`, interacts again and leaves at `D`.
pub fn sqrt_swap_circuit() -> Circuit {
    two_swap_circuit(&sqrt_swap_matrix()).expect("fixed circuit")
}

/// [`sqrt_swap_circuit`] with a full `SWAP`, which compiles to
/// `2 Phi+_AD (x) |0><0|_B (x) 1_C`.
pub fn full_swap_circuit() -> Circuit {
    two_swap_circuit(&swap_matrix()).expect("fixed circuit")
}

/// Compiled [`sqrt_swap_circuit`]: rank two, eigenvalues `5/2` and `3/2`.
pub fn example_sqrt_swap_comb() -> Comb {
    compile(&sqrt_swap_circuit()).expect("fixed circuit compiles")
}

const PPT_CONDITIONALS_JSON: &str = include_str!("../../data/ppt_conditionals_comb.json");

/// SHA-256 of the shipped data file.
pub const PPT_CONDITIONALS_SHA256: &str = "044f60079759d82e4e8b9a41c5b08f8df8bc9ced0c5cb00d2061006f28c70050";

/// The shipped JSON text of [`example_ppt_conditionals_comb`].
pub fn ppt_conditionals_json() -> &'static str {
    PPT_CONDITIONALS_JSON
}

/// Hex SHA-256 of some bytes.
pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// A GME three-qubit comb whose conditional two-party operators are all
/// PPT, given to three decimals. Rounding leaves it slightly off: the
/// causality levels hold to about `1e-3` and it has a small negative
/// eigenvalue, so it is validated with [`Tolerances::causality_loose`].
pub fn example_ppt_conditionals_comb() -> Result<Comb> {
    let digest = sha256_hex(PPT_CONDITIONALS_JSON.as_bytes());
    if digest != PPT_CONDITIONALS_SHA256 {
        return Err(Error::invalid(format!("data file checksum mismatch: {digest}")));
    }
    let comb = Comb::from_json(PPT_CONDITIONALS_JSON)?;
    let report = crate::comb::verify_causality_with(&comb, Tolerances::default().causality_loose)?;
    if !report.passed {
        return Err(Error::invalid("shipped comb fails the loose causality check"));
    }
    Ok(comb)
}

/// Controlled-unitary helper: `|0><0| (x) 1 + |1><1| (x) u` on (control, target).
fn controlled(u: &CMat) -> CMat {
    let d = u.nrows();
    let mut m = CMat::zeros(2 * d, 2 * d);
    for i in 0..d {
        m[(i, i)] = real(1.0);
    }
    m.view_mut((d, d), (d, d)).copy_from(u);
    m
}

/// Environment starts maximally entangled with `A`. The input at `B`
/// controls what happens to the environment: `|0>` leaves it alone, `|1>`
/// sends it through complete dephasing. The environment then leaves at `C`
/// and the control is discarded.
pub fn circuit_bob_controls() -> Circuit {
    let initial = phi_plus("A", "R");
    let identity_cr = Channel::identity("R", "C", 2).expect("identity").op().clone();
    let mut deph = CMat::zeros(4, 4);
    deph[(0, 0)] = real(1.0);
    deph[(3, 3)] = real(1.0);
    let deph = qubits(&["C", "R"], deph);
    let on0 = kron(&basis_projector("B", 0), &identity_cr).unwrap();
    let on1 = kron(&basis_projector("B", 1), &deph).unwrap();
    let op = permute_subsystems(&on0.add(&on1).unwrap(), &["C", "B", "R"]).unwrap();
    let step = Channel::new(op, &["B", "R"], ChannelKind::Cptp).expect("controlled channel is CPTP");
    Circuit::new(initial, vec![step], out_in_out()).expect("fixed circuit")
}

/// Environment maximally entangled with `A`; a controlled-Z with control
/// on the environment acts on the system entering at `B`, which then
/// leaves at `C`.
pub fn circuit_alice_cz() -> Circuit {
    let initial = phi_plus("A", "R");
    let mut z = CMat::identity(2, 2);
    z[(1, 1)] = real(-1.0);
    // control R (first factor), target B
    let cz = controlled(&z);
    let step = choi_of_unitary(&cz, &[("R", 2), ("B", 2)], &[("E", 2), ("C", 2)]).expect("unitary");
    Circuit::new(initial, vec![step], out_in_out()).expect("fixed circuit")
}

/// Environment maximally entangled with `A`; the input at `B` and the
/// environment are measured with `{Phi+_BR, 1 - Phi+_BR}` and the outcome
/// is written to `C` in the computational basis.
pub fn circuit_bell_teleport() -> Circuit {
    let initial = phi_plus("A", "R");
    let f0 = phi_plus("B", "R");
    let f1 = Operator::identity(vec![2, 2], vec!["B", "R"]).unwrap().sub(&f0).unwrap();
    let mp = MeasurePrepare { povm: vec![f0, f1], states: vec![basis_projector("C", 0), basis_projector("C", 1)] };
    let step = mp.to_channel().expect("valid measure-and-prepare channel");
    Circuit::new(initial, vec![step], out_in_out()).expect("fixed circuit")
}

/// Pure product operators used by several tests: `|psi><psi|` for a Bloch
/// direction.
pub fn bloch_projector(label: &str, n: [f64; 3]) -> Operator {
    let m = CMat::from_row_slice(
        2,
        2,
        &[
            real(0.5 * (1.0 + n[2])),
            C64::new(0.5 * n[0], -0.5 * n[1]),
            C64::new(0.5 * n[0], 0.5 * n[1]),
            real(0.5 * (1.0 - n[2])),
        ],
    );
    qubits(&[label], m)
}

/// `|0><0|`-type product projector on several qubits.
pub fn product_projector(labels: &[&str], bits: &str) -> Operator {
    let ops: Vec<Operator> = labels
        .iter()
        .zip(bits.chars())
        .map(|(l, b)| basis_projector(l, if b == '1' { 1 } else { 0 }))
        .collect();
    let refs: Vec<&Operator> = ops.iter().collect();
    kron_all(&refs).expect("disjoint labels")
}
