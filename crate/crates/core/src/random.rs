//! Seeded random states, unitaries and channels for tests and examples.

use crate::comb::Channel;
use crate::error::Result;
use crate::tensor::{real, CMat, CVec, Operator, C64};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix of independent standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Haar-random unitary via QR of a Ginibre matrix with phase correction.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMat {
    let z = ginibre(d, d, rng);
    let qr = z.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { real(1.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Haar-random pure state vector.
pub fn haar_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CVec {
    let v = ginibre(d, 1, rng).column(0).into_owned();
    let n = v.norm();
    v / real(n)
}

/// Random density matrix of the given rank (induced measure).
pub fn density_matrix<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> CMat {
    let g = ginibre(d, rank.max(1), rng);
    let m = &g * g.adjoint();
    let t = m.trace().re;
    m / real(t)
}

/// Random density operator on labelled qubits or qudits.
pub fn state<R: Rng + ?Sized>(dims: &[usize], labels: &[&str], rank: usize, rng: &mut R) -> Result<Operator> {
    let d = dims.iter().product();
    Operator::new(dims.to_vec(), labels.to_vec(), density_matrix(d, rank, rng))
}

/// Random pure-state projector.
pub fn pure_state<R: Rng + ?Sized>(dims: &[usize], labels: &[&str], rng: &mut R) -> Result<Operator> {
    state(dims, labels, 1, rng)
}

/// Random positive semidefinite matrix (not normalised).
pub fn psd_matrix<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> CMat {
    let g = ginibre(d, rank.max(1), rng);
    &g * g.adjoint()
}

/// Random CPTP channel from a Haar isometry into output (x) environment.
pub fn cptp_channel<R: Rng + ?Sized>(
    inputs: &[(&str, usize)],
    outputs: &[(&str, usize)],
    kraus_rank: usize,
    rng: &mut R,
) -> Result<Channel> {
    let din: usize = inputs.iter().map(|x| x.1).product();
    let dout: usize = outputs.iter().map(|x| x.1).product();
    let big = haar_unitary(dout * kraus_rank.max(1) * din.max(1), rng);
    // first din columns of a Haar unitary form a Haar isometry
    let v = big.columns(0, din).into_owned();
    let v = v.rows(0, dout * kraus_rank.max(1)).into_owned();
    // the truncated columns are not orthonormal in general; fix with a polar step
    let svd = v.svd(true, true);
    let iso = svd.u.unwrap() * svd.v_t.unwrap();
    Channel::from_isometry(&iso, inputs, outputs, kraus_rank.max(1))
}

/// Uniformly random point on the Bloch sphere.
pub fn bloch_vector<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let z: f64 = rng.random_range(-1.0..1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).max(0.0).sqrt();
    [r * phi.cos(), r * phi.sin(), z]
}
