//! See-saw search for a three-qubit comb that is genuinely multipartite
//! entangled while every conditional two-party operator stays strictly PPT.
//!
//! The two half-steps are both SDPs: the PPT-mixture witness for the
//! current comb, then the comb minimising that witness subject to causality
//! and strict positivity of the conditional partial transposes on a finite
//! set of effects. Combs are written as `1/4 + sum_i y_i B_i` over an
//! orthonormal basis `B_i` of the traceless causal directions, so every
//! iterate satisfies the causality equalities exactly.

use nalgebra::DMatrix;
use serde::Serialize;

use super::scan::{conditional_scan, min_eig4, pt_first, PartyBlocks, ScanOptions, ScanReport, Sampling, M2, M4};
use crate::comb::{compile, verify_causality, Channel, Circuit, Comb, Leg};
use crate::entanglement::gme_witness;
use crate::error::{Error, Result};
use crate::random::{haar_unitary, haar_vector, rng};
use crate::sdp::{solve, HermTerm, SdpOptions, SdpProblem, SdpStatus};
use crate::tensor::{real, CMat, Operator, C64};

const LABELS: [&str; 3] = ["A", "B", "C"];

#[derive(Debug, Clone, Serialize)]
pub struct SeesawOptions {
    pub iterations: usize,
    /// Required normalised partial-transpose margin on the effect set.
    pub eps_margin: f64,
    /// Effects per party, spread over the Bloch sphere.
    pub effects_per_party: usize,
    /// Most effects added as cuts from failed scans.
    pub scan_constraint_count: usize,
    /// Witness value below which a candidate is checked.
    pub target: f64,
    /// Samples of the fresh conditional scan on a candidate.
    pub scan_samples: usize,
}

impl Default for SeesawOptions {
    fn default() -> Self {
        SeesawOptions {
            iterations: 12,
            eps_margin: 0.01,
            effects_per_party: 150,
            scan_constraint_count: 60,
            target: -1e-4,
            scan_samples: 500_000,
        }
    }
}

/// One conditioning effect in the constraint set.
#[derive(Debug, Clone, Serialize)]
pub struct EffectConstraint {
    pub party: String,
    pub bloch: [f64; 3],
    /// Added after a failed scan rather than part of the initial grid.
    pub cut: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Witness value of the iterate entering this iteration (unit trace).
    pub witness_value: f64,
    /// Smallest normalised conditional partial-transpose eigenvalue over
    /// the constraint set, for the iterate entering this iteration.
    pub effect_min: f64,
    /// Largest causality residual of that iterate.
    pub causality_residual: f64,
    pub scan: Option<[f64; 3]>,
    pub cuts_added: usize,
    /// `tr(W U)` at unit trace for the comb produced by this iteration.
    pub sdp_objective: Option<f64>,
    pub sdp_status: Option<SdpStatus>,
}

/// Everything the search knows after it stops.
#[derive(Debug, Clone, Serialize)]
pub struct SeesawState {
    pub seed: u64,
    pub comb: Comb,
    pub witness: Option<Operator>,
    pub iteration: usize,
    pub eps_margin: f64,
    pub constraints: Vec<EffectConstraint>,
    pub trace: Vec<IterationRecord>,
    /// Why the search stopped.
    pub stop: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeesawOutcome {
    /// A comb with witness value below the target whose fresh scan is
    /// strictly positive for every party, if one was reached.
    pub candidate: Option<Comb>,
    pub final_scan: Option<ScanReport>,
    pub audit: SeesawState,
}

fn legs() -> Vec<Leg> {
    vec![Leg::out("A", 1), Leg::input("B", 1), Leg::out("C", 2)]
}

fn comb_from(m: CMat) -> Result<Comb> {
    Comb::new(Operator::new(vec![2, 2, 2], LABELS.to_vec(), m)?, legs())
}

/// Random starting comb: Haar pure `rho_AR`, then a Haar unitary on `(B, R)`
/// whose outputs are `C` and a discarded qubit.
pub fn random_start(seed: u64) -> Result<Comb> {
    let mut r = rng(seed);
    let psi = haar_vector(4, &mut r);
    let initial = Operator::new(vec![2, 2], vec!["A", "R"], &psi * psi.adjoint())?;
    let u = haar_unitary(4, &mut r);
    let step = Channel::from_isometry(&u, &[("B", 2), ("R", 2)], &[("C", 2)], 2)?;
    compile(&Circuit::new(initial, vec![step], legs())?)
}

/// Orthonormal Hermitian basis of the 8x8 matrices.
fn hermitian_basis(d: usize) -> Vec<CMat> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for u in 0..d {
        let mut m = CMat::zeros(d, d);
        m[(u, u)] = real(1.0);
        out.push(m);
        for v in u + 1..d {
            let mut m = CMat::zeros(d, d);
            m[(u, v)] = real(h);
            m[(v, u)] = real(h);
            out.push(m);
            let mut m = CMat::zeros(d, d);
            m[(u, v)] = C64::new(0.0, h);
            m[(v, u)] = C64::new(0.0, -h);
            out.push(m);
        }
    }
    out
}

/// Linear part of the causality constraints for legs `A` out, `B` in,
/// `C` out: `tr_C H - tr_BC(H) (x) 1_B / 2` and `tr H`.
fn causal_defect(h: &CMat) -> Vec<f64> {
    let mut k = CMat::zeros(4, 4);
    for ab in 0..4 {
        for ab2 in 0..4 {
            k[(ab, ab2)] = h[(2 * ab, 2 * ab2)] + h[(2 * ab + 1, 2 * ab2 + 1)];
        }
    }
    let mut out = Vec::with_capacity(33);
    for a in 0..2 {
        for b in 0..2 {
            for a2 in 0..2 {
                for b2 in 0..2 {
                    let rho = k[(2 * a, 2 * a2)] + k[(2 * a + 1, 2 * a2 + 1)];
                    let id = if b == b2 { 0.5 } else { 0.0 };
                    let z = k[(2 * a + b, 2 * a2 + b2)] - rho * id;
                    out.push(z.re);
                    out.push(z.im);
                }
            }
        }
    }
    out.push(h.trace().re);
    out
}

/// Orthonormal basis of the Hermitian `H` with zero causal defect.
fn causal_directions() -> Vec<CMat> {
    let basis = hermitian_basis(8);
    let cols: Vec<Vec<f64>> = basis.iter().map(causal_defect).collect();
    let a = DMatrix::from_fn(cols[0].len(), basis.len(), |r, c| cols[c][r]);
    let ata = a.transpose() * &a;
    let eig = ata.symmetric_eigen();
    let mut out = Vec::new();
    for k in 0..basis.len() {
        if eig.eigenvalues[k].abs() < 1e-9 {
            let v = eig.eigenvectors.column(k);
            let mut m = CMat::zeros(8, 8);
            for (t, b) in basis.iter().enumerate() {
                m += b * real(v[t]);
            }
            out.push(m);
        }
    }
    out
}

/// Evenly spread points on the sphere.
pub fn fibonacci_sphere(n: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let p = k as f64 * golden;
            [r * p.cos(), r * p.sin(), z]
        })
        .collect()
}

fn bloch_effect(n: &[f64; 3]) -> M2 {
    M2::new(
        real(0.5 * (1.0 + n[2])),
        C64::new(0.5 * n[0], -0.5 * n[1]),
        C64::new(0.5 * n[0], 0.5 * n[1]),
        real(0.5 * (1.0 - n[2])),
    )
}

fn bloch_of(theta: f64, phi: f64) -> [f64; 3] {
    [theta.cos() * phi.cos(), theta.cos() * phi.sin(), theta.sin()]
}

/// `PT(cond(H)) - eps tr(cond(H)) 1` as a dense 4x4 matrix.
fn margin_block(b: &PartyBlocks, e: &M2, eps: f64) -> CMat {
    let m = b.conditional(e);
    let t = m.trace().re;
    let out: M4 = pt_first(&m) - M4::identity() * real(eps * t);
    CMat::from_fn(4, 4, |i, j| out[(i, j)])
}

fn effect_min(comb: &Comb, constraints: &[EffectConstraint]) -> Result<f64> {
    let mut best = f64::INFINITY;
    let mut cache: Vec<(String, PartyBlocks)> = Vec::new();
    for c in constraints {
        if !cache.iter().any(|(p, _)| p == &c.party) {
            cache.push((c.party.clone(), PartyBlocks::new(comb, &c.party)?));
        }
        let b = &cache.iter().find(|(p, _)| p == &c.party).expect("cached").1;
        let m = b.conditional(&bloch_effect(&c.bloch));
        let t = m.trace().re;
        if t > 1e-12 {
            best = best.min(min_eig4(&pt_first(&(m / real(t)))));
        }
    }
    Ok(best)
}

struct CombStep {
    comb: Comb,
    objective: f64,
    status: SdpStatus,
}

/// Minimise `tr(W U)` over causal `U >= 0` with the conditional margins.
fn comb_step(w: &Operator, dirs: &[CMat], constraints: &[EffectConstraint], eps: f64) -> Result<CombStep> {
    let base = CMat::identity(8, 8) * real(0.25);
    let template = comb_from(base.clone())?;
    let mut p = SdpProblem::new();
    let main = p.add_block("U", 8);
    p.set_objective(main, base.clone());

    // per party: blocks of 1/4 and of every direction
    let mut party_blocks: Vec<(String, PartyBlocks, Vec<PartyBlocks>)> = Vec::new();
    for c in constraints {
        if party_blocks.iter().any(|(q, _, _)| q == &c.party) {
            continue;
        }
        let b0 = PartyBlocks::from_matrix(&template, &c.party, &base)?;
        let bs = dirs
            .iter()
            .map(|d| PartyBlocks::from_matrix(&template, &c.party, d))
            .collect::<Result<Vec<_>>>()?;
        party_blocks.push((c.party.clone(), b0, bs));
    }
    let mut block_terms: Vec<(usize, Vec<HermTerm>)> = Vec::new();
    for c in constraints {
        let (_, b0, bs) = party_blocks.iter().find(|(q, _, _)| q == &c.party).expect("party blocks");
        let e = bloch_effect(&c.bloch);
        let k = p.add_block(format!("{}:{:.3},{:.3},{:.3}", c.party, c.bloch[0], c.bloch[1], c.bloch[2]), 4);
        p.set_objective(k, margin_block(b0, &e, eps));
        let terms = bs.iter().map(|b| HermTerm::from_dense(&(-margin_block(b, &e, eps)))).collect();
        block_terms.push((k, terms));
    }
    let wm = w.matrix();
    for (i, d) in dirs.iter().enumerate() {
        let mut terms = vec![(main, HermTerm::from_dense(&(-d)))];
        for (k, t) in &block_terms {
            terms.push((*k, t[i].clone()));
        }
        let rhs = -(wm * d).trace().re;
        p.add_constraint(terms, rhs);
    }
    let sol = solve(&p, &SdpOptions::default())?;
    if sol.status != SdpStatus::Optimal {
        return Ok(CombStep { comb: template, objective: f64::NAN, status: sol.status });
    }
    let mut m = base.clone();
    for (i, d) in dirs.iter().enumerate() {
        m += d * real(sol.y[i]);
    }
    let m = (&m + m.adjoint()) * real(0.5);
    // pull tiny negative eigenvalues back with a little of 1/4, which keeps
    // the causality equalities
    let lo = m.clone().symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
    let m = if lo < 0.0 {
        let t = -lo / (0.25 - lo);
        &m * real(1.0 - t) + &base * real(t)
    } else {
        m
    };
    let objective = (wm * &m).trace().re / m.trace().re;
    Ok(CombStep { comb: comb_from(m)?, objective, status: sol.status })
}

/// Run the see-saw from a random starting comb.
pub fn seesaw(dims: &[usize], seed: u64, opts: &SeesawOptions) -> Result<SeesawOutcome> {
    if dims != [2, 2, 2] {
        return Err(Error::invalid("the see-saw search is built for three qubits"));
    }
    if !(opts.eps_margin >= 0.0 && opts.eps_margin < 0.25) {
        return Err(Error::invalid("eps_margin must lie in [0, 1/4)"));
    }
    let dirs = causal_directions();
    debug_assert_eq!(dirs.len(), 51);
    let mut constraints: Vec<EffectConstraint> = Vec::new();
    for party in LABELS {
        for n in fibonacci_sphere(opts.effects_per_party) {
            constraints.push(EffectConstraint { party: party.to_string(), bloch: n, cut: false });
        }
    }
    let mut comb = random_start(seed)?;
    let mut state = SeesawState {
        seed,
        comb: comb.clone(),
        witness: None,
        iteration: 0,
        eps_margin: opts.eps_margin,
        constraints: Vec::new(),
        trace: Vec::new(),
        stop: String::new(),
    };
    let mut cuts = 0;
    for it in 0..opts.iterations {
        let wr = gme_witness(comb.op())?;
        let causality = verify_causality(&comb)?.max_residual();
        let mut rec = IterationRecord {
            iteration: it,
            witness_value: wr.value,
            effect_min: effect_min(&comb, &constraints)?,
            causality_residual: causality,
            scan: None,
            cuts_added: 0,
            sdp_objective: None,
            sdp_status: None,
        };
        log::info!("see-saw {it}: witness {:.6}, effect margin {:.6}", wr.value, rec.effect_min);
        if it > 0 && wr.value < opts.target {
            let scan = conditional_scan(
                &comb,
                &ScanOptions {
                    samples: opts.scan_samples,
                    seed: seed.wrapping_mul(1000).wrapping_add(it as u64),
                    sampling: Sampling::Rectangle,
                    parties: Vec::new(),
                },
            )?;
            let mins = [scan.parties[0].min_eig, scan.parties[1].min_eig, scan.parties[2].min_eig];
            rec.scan = Some(mins);
            if scan.all_positive() {
                state.trace.push(rec);
                state.comb = comb.clone();
                state.witness = Some(wr.witness);
                state.iteration = it;
                state.constraints = constraints;
                state.stop = "candidate passed the fresh scan".into();
                return Ok(SeesawOutcome { candidate: Some(comb), final_scan: Some(scan), audit: state });
            }
            for p in &scan.parties {
                if p.min_eig <= opts.eps_margin && cuts < opts.scan_constraint_count {
                    constraints.push(EffectConstraint {
                        party: p.party.clone(),
                        bloch: bloch_of(p.theta, p.phi),
                        cut: true,
                    });
                    cuts += 1;
                    rec.cuts_added += 1;
                }
            }
        }
        let step = comb_step(&wr.witness, &dirs, &constraints, opts.eps_margin)?;
        rec.sdp_objective = Some(step.objective);
        rec.sdp_status = Some(step.status);
        state.trace.push(rec);
        state.witness = Some(wr.witness);
        state.iteration = it;
        if step.status != SdpStatus::Optimal {
            state.stop = format!("comb step ended with status {:?}", step.status);
            state.comb = comb;
            state.constraints = constraints;
            return Ok(SeesawOutcome { candidate: None, final_scan: None, audit: state });
        }
        comb = step.comb;
    }
    state.comb = comb;
    state.constraints = constraints;
    state.stop = "iteration cap".into();
    Ok(SeesawOutcome { candidate: None, final_scan: None, audit: state })
}
