//! Conditional-entanglement scan of three-qubit combs: condition one party
//! on many pure effects and track the smallest partial-transpose
//! eigenvalue of what is left for the other two.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::comb::{Comb, Dir};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::random::rng;
use crate::tensor::{permute_subsystems, real, C64};

use nalgebra::{Matrix2, Matrix4};

pub(crate) type M2 = Matrix2<C64>;
pub(crate) type M4 = Matrix4<C64>;

/// How the angles `(theta, phi)` are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Sampling {
    /// `theta` uniform in `[0, pi]`, `phi` uniform in `[0, 2 pi]`. Since
    /// `sin(theta) >= 0` this covers the upper Bloch hemisphere only.
    #[default]
    Rectangle,
    /// Uniform on the whole Bloch sphere: `sin(theta)` uniform in `[-1, 1]`.
    Haar,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanOptions {
    pub samples: usize,
    pub seed: u64,
    pub sampling: Sampling,
    /// Parties to condition on; all three when empty.
    pub parties: Vec<String>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { samples: 500_000, seed: 42, sampling: Sampling::Rectangle, parties: Vec::new() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PartyScan {
    /// The conditioned party.
    pub party: String,
    /// The remaining pair, in comb order (for example `"AB"`).
    pub pair: String,
    /// Smallest partial-transpose eigenvalue of the normalised conditional.
    pub min_eig: f64,
    pub theta: f64,
    pub phi: f64,
    /// Index of the sample that attains the minimum.
    pub index: usize,
    /// Samples whose conditional had trace below the cut-off.
    pub skipped: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub samples: usize,
    pub seed: u64,
    pub sampling: Sampling,
    /// `[theta range, phi range]`.
    pub angle_ranges: [[f64; 2]; 2],
    pub parties: Vec<PartyScan>,
}

impl ScanReport {
    pub fn party(&self, name: &str) -> Option<&PartyScan> {
        self.parties.iter().find(|p| p.party == name)
    }

    /// Every scanned conditional is strictly PPT.
    pub fn all_positive(&self) -> bool {
        self.parties.iter().all(|p| p.min_eig > 0.0)
    }
}

/// The pure effect `(1 + cos t cos p X + cos t sin p Y + sin t Z) / 2`.
pub fn effect(theta: f64, phi: f64) -> M2 {
    let (x, y, z) = (theta.cos() * phi.cos(), theta.cos() * phi.sin(), theta.sin());
    M2::new(real(0.5 * (1.0 + z)), C64::new(0.5 * x, -0.5 * y), C64::new(0.5 * x, 0.5 * y), real(0.5 * (1.0 - z)))
}

/// Draw `(theta, phi)` pairs sequentially from the seed.
pub fn sample_angles(samples: usize, seed: u64, sampling: Sampling) -> Vec<(f64, f64)> {
    let mut r = rng(seed);
    (0..samples)
        .map(|_| {
            let phi = r.random_range(0.0..std::f64::consts::TAU);
            let theta = match sampling {
                Sampling::Rectangle => r.random_range(0.0..std::f64::consts::PI),
                Sampling::Haar => {
                    let s: f64 = r.random_range(-1.0..1.0);
                    // theta in [-pi/2, pi/2] with sin(theta) = s; cos(theta) >= 0
                    s.asin()
                }
            };
            (theta, phi)
        })
        .collect()
}

/// A three-qubit operator split into 4x4 blocks with respect to one party.
#[derive(Debug, Clone)]
pub(crate) struct PartyBlocks {
    pub party: String,
    pub pair: [String; 2],
    /// Input legs receive the state itself; output legs are conditioned on
    /// the effect, which enters transposed.
    pub input: bool,
    /// `blocks[x][y]` is the block `<x|_X U |y>_X` on the pair.
    pub blocks: [[M4; 2]; 2],
}

impl PartyBlocks {
    pub fn new(c: &Comb, party: &str) -> Result<PartyBlocks> {
        Self::from_matrix(c, party, c.op().matrix())
    }

    /// Blocks of an arbitrary 8x8 matrix laid out like `c`.
    pub fn from_matrix(c: &Comb, party: &str, m: &crate::tensor::CMat) -> Result<PartyBlocks> {
        let leg = c.leg(party).ok_or_else(|| Error::invalid(format!("comb has no leg {party}")))?;
        let labels: Vec<String> = c.op().labels().to_vec();
        let pair: Vec<String> = labels.iter().filter(|l| l.as_str() != party).cloned().collect();
        let order = [party, pair[0].as_str(), pair[1].as_str()];
        let op = permute_subsystems(&c.op().with_matrix(m.clone()), &order)?;
        let pm = op.matrix();
        let block = |x: usize, y: usize| M4::from_fn(|i, j| pm[(4 * x + i, 4 * y + j)]);
        Ok(PartyBlocks {
            party: party.to_string(),
            pair: [pair[0].clone(), pair[1].clone()],
            input: leg.dir == Dir::In,
            blocks: [[block(0, 0), block(0, 1)], [block(1, 0), block(1, 1)]],
        })
    }

    /// Unnormalised two-party operator left after conditioning on `e`.
    pub fn conditional(&self, e: &M2) -> M4 {
        // output leg: tr_X[(E (x) 1) U] = sum_xy E[y, x] U_xy
        // input leg:  tr_X[U (tau^T (x) 1)] = sum_xy tau[x, y] U_xy
        let mut out = M4::zeros();
        for x in 0..2 {
            for y in 0..2 {
                let w = if self.input { e[(x, y)] } else { e[(y, x)] };
                out += self.blocks[x][y] * w;
            }
        }
        out
    }
}

/// Partial transpose on the first qubit of a two-qubit matrix.
pub(crate) fn pt_first(m: &M4) -> M4 {
    M4::from_fn(|r, c| {
        let (a, b) = (r / 2, r % 2);
        let (a2, b2) = (c / 2, c % 2);
        m[(a2 * 2 + b, a * 2 + b2)]
    })
}

pub(crate) fn min_eig4(m: &M4) -> f64 {
    let h = (m + m.adjoint()) * real(0.5);
    h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

fn scan_party(blocks: &PartyBlocks, angles: &[(f64, f64)]) -> PartyScan {
    let cut = Tolerances::default().scan_min_trace;
    // (value, index) with ties to the smaller index; skipped count
    let (best, skipped) = angles
        .par_iter()
        .enumerate()
        .fold(
            || ((f64::INFINITY, usize::MAX), 0usize),
            |(best, skipped), (i, &(t, p))| {
                let m = blocks.conditional(&effect(t, p));
                let tr = m.trace().re;
                if !(tr > cut) {
                    return (best, skipped + 1);
                }
                let v = min_eig4(&pt_first(&(m / real(tr))));
                (better(best, (v, i)), skipped)
            },
        )
        .reduce(|| ((f64::INFINITY, usize::MAX), 0), |(a, s1), (b, s2)| (better(a, b), s1 + s2));
    let (min_eig, index) = best;
    let (theta, phi) = if index < angles.len() { angles[index] } else { (f64::NAN, f64::NAN) };
    PartyScan {
        party: blocks.party.clone(),
        pair: format!("{}{}", blocks.pair[0], blocks.pair[1]),
        min_eig,
        theta,
        phi,
        index,
        skipped,
    }
}

fn better(a: (f64, usize), b: (f64, usize)) -> (f64, usize) {
    if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) || a.0.is_nan() {
        b
    } else {
        a
    }
}

/// Build a worker pool sized by `COMBLAB_THREADS` when it is set.
pub(crate) fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    match std::env::var("COMBLAB_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        Some(n) if n > 0 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        _ => f(),
    }
}

/// Condition each party of a three-qubit comb on sampled pure effects and
/// report the smallest partial-transpose eigenvalue of the normalised
/// remainder. Angles are drawn sequentially from `seed`, then evaluated in
/// parallel; the result does not depend on the number of workers.
pub fn conditional_scan(c: &Comb, opts: &ScanOptions) -> Result<ScanReport> {
    if c.op().dims() != [2, 2, 2] {
        return Err(Error::invalid("the conditional scan needs a three-qubit comb"));
    }
    if opts.samples == 0 {
        return Err(Error::invalid("at least one sample is needed"));
    }
    let parties: Vec<String> = if opts.parties.is_empty() {
        c.op().labels().to_vec()
    } else {
        opts.parties.clone()
    };
    let blocks: Vec<PartyBlocks> = parties.iter().map(|p| PartyBlocks::new(c, p)).collect::<Result<_>>()?;
    let angles = sample_angles(opts.samples, opts.seed, opts.sampling);
    let parties = with_pool(|| blocks.iter().map(|b| scan_party(b, &angles)).collect());
    let theta_range = match opts.sampling {
        Sampling::Rectangle => [0.0, std::f64::consts::PI],
        Sampling::Haar => [-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2],
    };
    Ok(ScanReport {
        samples: opts.samples,
        seed: opts.seed,
        sampling: opts.sampling,
        angle_ranges: [theta_range, [0.0, std::f64::consts::TAU]],
        parties,
    })
}

/// The effect at given angles as a labelled operator, for replaying a
/// reported minimum through [`crate::comb::condition`].
pub fn effect_operator(label: &str, theta: f64, phi: f64) -> crate::tensor::Operator {
    let e = effect(theta, phi);
    let m = crate::tensor::CMat::from_fn(2, 2, |i, j| e[(i, j)]);
    crate::tensor::Operator::new(vec![2], vec![label], m).expect("qubit effect")
}
