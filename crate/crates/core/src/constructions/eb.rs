//! Circuits with an entanglement-breaking channel on one wire, built from a
//! supplied separable decomposition of a two-step comb.
//!
//! Nothing here searches for decompositions: the caller provides one and
//! the constructions check the hypotheses they rely on.

use nalgebra::DMatrix;
use serde::Serialize;

use super::dilation::{dilate, fresh_label};
use crate::comb::{compile, link, Channel, Circuit, Comb, Dir, Leg, MeasurePrepare};
use crate::config::Tolerances;
use crate::entanglement::CutSpec;
use crate::error::{Error, Result};
use crate::tensor::{kron, partial_trace, permute_subsystems, real, CMat, Operator};

/// A separable decomposition of a comb with legs `A` out, `B` in, `C` out.
/// Labels are taken from the comb; the operators must carry them.
#[derive(Debug, Clone)]
pub enum Decomposition {
    /// `U = d_B sum_a p_a xi_AB^(a) (x) eta_C^(a)` with unit-trace states.
    LastOutput { terms: Vec<(f64, Operator, Operator)> },
    /// `U = sum_a rho_A^(a) (x) G_BC^(a)` with states `rho_A` and `G >= 0`.
    FirstOutput { terms: Vec<(Operator, Operator)> },
    /// `U = d_B sum_a p_a E_B^(a) (x) G_AC^(a)` with unit-trace `E`, `G >= 0`.
    Input { terms: Vec<(f64, Operator, Operator)> },
}

impl Decomposition {
    /// The cut across which the decomposition is separable.
    pub fn cut(&self, a: &str, b: &str, c: &str) -> CutSpec {
        let (x, y): (Vec<&str>, Vec<&str>) = match self {
            Decomposition::LastOutput { .. } => (vec![c], vec![a, b]),
            Decomposition::FirstOutput { .. } => (vec![a], vec![b, c]),
            Decomposition::Input { .. } => (vec![b], vec![a, c]),
        };
        CutSpec::bipartite(&x, &y).expect("distinct labels")
    }
}

/// Output of [`eb_representation`].
#[derive(Debug, Clone)]
pub struct EbRepresentation {
    pub circuit: Circuit,
    /// The entanglement-breaking channel, as measure and prepare.
    pub channel: MeasurePrepare,
    /// Label of the leg whose wire carries the channel.
    pub wire: String,
    /// Dimension of the classical register the channel writes to or reads
    /// from. No minimality is claimed.
    pub register_dim: usize,
    /// `max |compile(circuit) - U|`.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EbOptions {
    /// Largest accepted `max |sum of terms - U|`.
    pub decomposition_tol: f64,
    /// Relative singular-value threshold for linear independence.
    pub rank_tol: f64,
}

impl Default for EbOptions {
    fn default() -> Self {
        EbOptions { decomposition_tol: 1e-8, rank_tol: Tolerances::default().rank }
    }
}

struct Legs {
    a: String,
    b: String,
    c: String,
}

fn comb_legs(c: &Comb) -> Result<Legs> {
    let legs = c.ordered_legs();
    let dirs: Vec<Dir> = legs.iter().map(|l| l.dir).collect();
    if dirs != [Dir::Out, Dir::In, Dir::Out] {
        return Err(Error::invalid("entanglement-breaking representations need legs out, in, out"));
    }
    Ok(Legs { a: legs[0].label.clone(), b: legs[1].label.clone(), c: legs[2].label.clone() })
}

fn psd_check(op: &Operator, what: &str) -> Result<()> {
    let m = op.min_eigenvalue()?;
    if m < -1e-9 * op.max_abs().max(1.0) {
        return Err(Error::Hypothesis(format!("{what} is not positive semidefinite (min eigenvalue {m:.3e})")));
    }
    Ok(())
}

fn sum_ops(ops: &[Operator]) -> Result<Operator> {
    let mut acc = ops[0].clone();
    for o in &ops[1..] {
        acc = acc.add(o)?;
    }
    Ok(acc)
}

fn basis_state(label: &str, n: usize, k: usize) -> Operator {
    let mut m = CMat::zeros(n, n);
    m[(k, k)] = real(1.0);
    Operator::new(vec![n], vec![label], m).expect("register state")
}

fn aligned_to(op: &Operator, c: &Comb) -> Result<Operator> {
    let order: Vec<&str> = c.op().labels().iter().map(String::as_str).collect();
    permute_subsystems(op, &order)
}

/// Real coordinates of Hermitian operators (one column each), for rank tests
/// and linear solves.
fn hermitian_coords(ops: &[&Operator]) -> DMatrix<f64> {
    let d = ops[0].dim();
    DMatrix::from_fn(2 * d * d, ops.len(), |r, col| {
        let m = ops[col].matrix();
        let (i, j) = ((r / 2) / d, (r / 2) % d);
        if r % 2 == 0 {
            m[(i, j)].re
        } else {
            m[(i, j)].im
        }
    })
}

fn check_independent(ops: &[&Operator], what: &str, tol: f64) -> Result<()> {
    let coords = hermitian_coords(ops);
    let sv = coords.singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if ops.len() > coords.nrows() / 2 || !(min > tol * max) {
        return Err(Error::Hypothesis(format!(
            "the {what} are linearly dependent (smallest relative singular value {:.3e})",
            if max > 0.0 { min / max } else { 0.0 }
        )));
    }
    Ok(())
}

/// Dual set `tr(x_a D_b) = delta_ab` inside the span of Hermitian `x_a`.
///
/// Taken from the SVD of the coordinate matrix `X = U S V^T` as the columns
/// of `U S^-1 V^T`; going through the Gram matrix would square its condition
/// number.
fn duals(ops: &[&Operator]) -> Result<Vec<Operator>> {
    let d = ops[0].dim();
    let svd = hermitian_coords(ops).svd(true, true);
    let (u, vt) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    if svd.singular_values.iter().any(|s| !(*s > 0.0)) {
        return Err(Error::Hypothesis("the operators are linearly dependent".into()));
    }
    let inv = DMatrix::from_diagonal(&svd.singular_values.map(|s| 1.0 / s));
    let coords = u * inv * vt;
    let mut out = Vec::with_capacity(ops.len());
    for b in 0..ops.len() {
        let m = CMat::from_fn(d, d, |i, j| {
            let r = 2 * (i * d + j);
            crate::tensor::C64::new(coords[(r, b)], coords[(r + 1, b)])
        });
        out.push(Operator::new(ops[0].dims().to_vec(), ops[0].labels().to_vec(), m)?.hermitian_part());
    }
    Ok(out)
}

/// `d^2` rank-one projectors spanning the operators on a `d`-dimensional
/// space: `|i>`, `(|i>+|j>)/sqrt2` and `(|i>+i|j>)/sqrt2`.
fn spanning_projectors(label: &str, d: usize) -> Vec<Operator> {
    let mut out = Vec::with_capacity(d * d);
    let proj = |v: nalgebra::DVector<crate::tensor::C64>| {
        Operator::new(vec![d], vec![label], &v * v.adjoint()).expect("projector")
    };
    for i in 0..d {
        let mut v = nalgebra::DVector::zeros(d);
        v[i] = real(1.0);
        out.push(proj(v));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..d {
        for j in i + 1..d {
            let mut v = nalgebra::DVector::zeros(d);
            v[i] = real(h);
            v[j] = real(h);
            out.push(proj(v.clone()));
            v[j] = crate::tensor::C64::new(0.0, h);
            out.push(proj(v));
        }
    }
    out
}

/// Informationally complete POVM: `S^{-1/2} P_j S^{-1/2}` with `S = sum P_j`.
fn ic_povm(label: &str, d: usize) -> Result<Vec<Operator>> {
    let ps = spanning_projectors(label, d);
    let s = sum_ops(&ps)?;
    let e = crate::tensor::herm_eig(&s)?;
    let mut isq = CMat::zeros(d, d);
    for k in 0..d {
        let v = e.vectors.column(k);
        isq += &v * v.adjoint() * real(1.0 / e.values[k].sqrt());
    }
    ps.iter().map(|p| p.conjugate_by(&isq)).collect()
}

/// Coefficients `c` with `target = sum_j c_j basis_j` (Hermitian, real `c`).
fn expand(target: &Operator, basis: &[Operator]) -> Result<Vec<f64>> {
    let refs: Vec<&Operator> = basis.iter().collect();
    let a = hermitian_coords(&refs);
    let t = hermitian_coords(&[target]);
    let svd = a.svd(true, true);
    let x = svd
        .solve(&t, 1e-12)
        .map_err(|e| Error::Numerical(format!("expansion failed: {e}")))?;
    Ok(x.column(0).iter().copied().collect())
}

fn check_sum(c: &Comb, terms: &[Operator], tol: f64) -> Result<()> {
    let total = aligned_to(&sum_ops(terms)?, c)?;
    let r = total.distance(c.op())?;
    if r > tol {
        return Err(Error::Hypothesis(format!("the decomposition does not reproduce the comb (residual {r:.3e})")));
    }
    Ok(())
}

/// Circuit with an entanglement-breaking channel on the wire of the cut
/// named by the decomposition, reproducing `c`.
///
/// * `LastOutput`: the comb is lifted to `d_B sum p xi_AB (x) |a><a|_C'`,
///   which is a proper comb and is dilated; the channel `C' -> C` measures
///   `|a>` and prepares `eta^(a)`.
/// * `FirstOutput`: the duals `D^(b)` of the (linearly independent) states
///   `rho^(a)` are expanded in an informationally complete POVM `{E_j^T}`,
///   and `G^(a) = sum_j c_j^(a) (U * E_j)` is recovered from the conditional
///   channels. Each `G^(a)` then satisfies `tr_C G = mu_a 1_B`; the circuit
///   prepares `sum_a mu_a |aa><aa|_{A'R}`, sends `A'` through the channel
///   `|a> -> rho^(a)` and applies `sum_a |a><a|_R (x) G^(a)/mu_a`.
/// * `Input`: the duals of the (linearly independent) `E^(a)` are expanded
///   in `d_B^2` states, `G^(a)` is recovered from the comb, and
///   `sum_a |a><a|_B' (x) G^(a)` is dilated behind the channel
///   `B -> B'` with POVM `d_B p_a (E^(a))^T`.
pub fn eb_representation(c: &Comb, dec: &Decomposition) -> Result<EbRepresentation> {
    eb_representation_with(c, dec, &EbOptions::default())
}

pub fn eb_representation_with(c: &Comb, dec: &Decomposition, opts: &EbOptions) -> Result<EbRepresentation> {
    let legs = comb_legs(c)?;
    let rep = match dec {
        Decomposition::LastOutput { terms } => last_output(c, &legs, terms, opts)?,
        Decomposition::FirstOutput { terms } => first_output(c, &legs, terms, opts)?,
        Decomposition::Input { terms } => input_wire(c, &legs, terms, opts)?,
    };
    Ok(rep)
}

fn finish(c: &Comb, circuit: Circuit, channel: MeasurePrepare, wire: &str, register_dim: usize) -> Result<EbRepresentation> {
    let back = compile(&circuit)?;
    let residual = aligned_to(back.op(), c)?.distance(c.op())?;
    Ok(EbRepresentation { circuit, channel, wire: wire.to_string(), register_dim, residual })
}

fn last_output(c: &Comb, l: &Legs, terms: &[(f64, Operator, Operator)], opts: &EbOptions) -> Result<EbRepresentation> {
    if terms.is_empty() {
        return Err(Error::invalid("empty decomposition"));
    }
    let db = c.op().dim_of(&l.b)? as f64;
    let n = terms.len();
    let cp = fresh_label(&format!("{}'", l.c), &[&l.a, &l.b, &l.c]);
    let mut products = Vec::with_capacity(n);
    let mut lifted = Vec::with_capacity(n);
    for (k, (p, xi, eta)) in terms.iter().enumerate() {
        if *p < 0.0 {
            return Err(Error::Hypothesis("negative weight".into()));
        }
        psd_check(xi, "xi")?;
        psd_check(eta, "eta")?;
        products.push(kron(xi, eta)?.scale(db * p));
        lifted.push(kron(xi, &basis_state(&cp, n, k))?.scale(db * p));
    }
    check_sum(c, &products, opts.decomposition_tol)?;
    let lifted_op = permute_subsystems(&sum_ops(&lifted)?, &[&l.a, &l.b, &cp])?;
    let lifted_comb = Comb::new(lifted_op, vec![Leg::out(&l.a, 1), Leg::input(&l.b, 1), Leg::out(&cp, 2)])?;
    let inner = dilate(&lifted_comb)?;

    let povm: Vec<Operator> = (0..n).map(|k| basis_state(&cp, n, k)).collect();
    let states: Vec<Operator> = terms.iter().map(|t| t.2.normalized()).collect::<Result<_>>()?;
    let mp = MeasurePrepare { povm, states };
    let mut steps = inner.circuit.steps().to_vec();
    steps.push(mp.to_channel()?);
    let circuit = Circuit::new(inner.circuit.initial().clone(), steps, c.legs().to_vec())?;
    finish(c, circuit, mp, &l.c, n)
}

fn first_output(c: &Comb, l: &Legs, terms: &[(Operator, Operator)], opts: &EbOptions) -> Result<EbRepresentation> {
    if terms.is_empty() {
        return Err(Error::invalid("empty decomposition"));
    }
    let n = terms.len();
    let mut products = Vec::with_capacity(n);
    for (rho, g) in terms {
        psd_check(rho, "rho")?;
        psd_check(g, "G")?;
        if (rho.real_trace() - 1.0).abs() > 1e-9 {
            return Err(Error::Hypothesis("the first-output factors must be unit-trace states".into()));
        }
        products.push(kron(rho, g)?);
    }
    check_sum(c, &products, opts.decomposition_tol)?;
    let rhos: Vec<&Operator> = terms.iter().map(|t| &t.0).collect();
    check_independent(&rhos, "first-output states", opts.rank_tol)?;

    // duals, expanded in an informationally complete POVM {E_j^T}
    let da = c.op().dim_of(&l.a)?;
    let db = c.op().dim_of(&l.b)?;
    let dual = duals(&rhos)?;
    let povm = ic_povm(&l.a, da)?;
    let povm_t: Vec<Operator> = povm.iter().map(Operator::transpose).collect();
    // F_j = U * E_j = tr_A[U E_j^T]; q_j = tr(F_j)/d_B
    let conditionals: Vec<Operator> = povm.iter().map(|e| link(c.op(), e)).collect::<Result<_>>()?;
    let mut recovered = Vec::with_capacity(n);
    let mut mus = Vec::with_capacity(n);
    for d in &dual {
        let coeff = expand(d, &povm_t)?;
        let mut g = conditionals[0].scale(coeff[0]);
        for j in 1..coeff.len() {
            g = g.add(&conditionals[j].scale(coeff[j]))?;
        }
        let g = permute_subsystems(&g, &[&l.b, &l.c])?;
        let marg = partial_trace(&g, &[&l.c])?;
        let mu = marg.real_trace() / db as f64;
        let id = Operator::identity(marg.dims().to_vec(), marg.labels().to_vec())?;
        let dev = marg.distance(&id.scale(mu))?;
        if dev > 1e-8 || mu <= 0.0 {
            return Err(Error::Hypothesis(format!(
                "a recovered term is not proportional to a channel (deviation {dev:.3e})"
            )));
        }
        recovered.push(g);
        mus.push(mu);
    }

    // sum_a mu_a = 1 up to rounding; the flag state must be exactly normalised
    let total: f64 = mus.iter().sum();
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::Hypothesis(format!("recovered weights sum to {total}")));
    }
    mus.iter_mut().for_each(|m| *m /= total);
    let taken = [l.a.as_str(), l.b.as_str(), l.c.as_str()];
    let ap = fresh_label(&format!("{}'", l.a), &taken);
    let r = fresh_label("R", &taken);
    // classical-flag initial state sum_a mu_a |aa><aa|
    let mut init = CMat::zeros(n * n, n * n);
    for (k, mu) in mus.iter().enumerate() {
        init[(k * n + k, k * n + k)] = real(*mu);
    }
    let initial = Operator::new(vec![n, n], vec![ap.as_str(), r.as_str()], init)?;
    let mp = MeasurePrepare {
        povm: (0..n).map(|k| basis_state(&ap, n, k)).collect(),
        states: rhos.iter().map(|&x| x.relabel_to(&l.a)).collect::<Result<_>>()?,
    };
    let eb = mp.to_channel()?;
    // L = sum_a |a><a|_R (x) G^(a)/mu_a, stored as (C, B, R)
    let mut lop: Option<Operator> = None;
    for (k, g) in recovered.iter().enumerate() {
        let term = kron(&permute_subsystems(g, &[&l.c, &l.b])?.scale(1.0 / mus[k]), &basis_state(&r, n, k))?;
        lop = Some(match lop {
            None => term,
            Some(acc) => acc.add(&term)?,
        });
    }
    let lop = lop.expect("nonempty").hermitian_part();
    let step = Channel::with_tolerance(lop, &[&l.b, &r], crate::comb::ChannelKind::Cptp, 1e-8)?;
    let circuit = Circuit::new(initial, vec![eb, step], c.legs().to_vec())?;
    finish(c, circuit, mp, &l.a, n)
}

fn input_wire(c: &Comb, l: &Legs, terms: &[(f64, Operator, Operator)], opts: &EbOptions) -> Result<EbRepresentation> {
    if terms.is_empty() {
        return Err(Error::invalid("empty decomposition"));
    }
    let n = terms.len();
    let db = c.op().dim_of(&l.b)?;
    let mut products = Vec::with_capacity(n);
    for (p, e, g) in terms {
        if *p <= 0.0 {
            return Err(Error::Hypothesis("weights must be positive".into()));
        }
        psd_check(e, "E")?;
        psd_check(g, "G")?;
        products.push(kron(e, g)?.scale(db as f64 * p));
    }
    check_sum(c, &products, opts.decomposition_tol)?;
    let es: Vec<&Operator> = terms.iter().map(|t| &t.1).collect();
    check_independent(&es, "input-leg operators", opts.rank_tol)?;

    // duals of E, expanded in d_B^2 states tau_j; G^(a) = U * (D^(a))^T / (d_B p_a)
    let dual = duals(&es)?;
    let taus: Vec<Operator> = spanning_projectors(&l.b, db);
    let fed: Vec<Operator> = taus.iter().map(|t| link(c.op(), &t.transpose())).collect::<Result<_>>()?;
    let mut recovered = Vec::with_capacity(n);
    let mut marginal: Option<Operator> = None;
    for (k, d) in dual.iter().enumerate() {
        let coeff = expand(d, &taus)?;
        let norm: f64 = coeff.iter().sum();
        let p = terms[k].0;
        if (norm - db as f64 * p).abs() > 1e-8 {
            return Err(Error::Hypothesis(format!(
                "dual normalisation {norm} differs from d_B p = {}",
                db as f64 * p
            )));
        }
        let mut g = fed[0].scale(coeff[0]);
        for j in 1..coeff.len() {
            g = g.add(&fed[j].scale(coeff[j]))?;
        }
        let g = permute_subsystems(&g.scale(1.0 / (db as f64 * p)), &[&l.a, &l.c])?;
        let ga = partial_trace(&g, &[&l.c])?;
        match &marginal {
            None => marginal = Some(ga),
            Some(m) => {
                let dev = m.distance(&ga)?;
                if dev > 1e-8 {
                    return Err(Error::Hypothesis(format!("recovered terms have different A marginals ({dev:.3e})")));
                }
            }
        }
        recovered.push(g);
    }

    let bp = fresh_label(&format!("{}'", l.b), &[&l.a, &l.b, &l.c]);
    let mut lifted = Vec::with_capacity(n);
    for (k, g) in recovered.iter().enumerate() {
        lifted.push(kron(&basis_state(&bp, n, k), g)?);
    }
    let lifted_op = permute_subsystems(&sum_ops(&lifted)?, &[&l.a, &bp, &l.c])?.hermitian_part();
    let lifted_comb = Comb::new(lifted_op, vec![Leg::out(&l.a, 1), Leg::input(&bp, 1), Leg::out(&l.c, 2)])?;
    let inner = dilate(&lifted_comb)?;

    // B -> B': POVM d_B p_a (E^(a))^T, prepare |a>
    let mp = MeasurePrepare {
        povm: terms.iter().map(|(p, e, _)| e.transpose().scale(db as f64 * p)).collect(),
        states: (0..n).map(|k| basis_state(&bp, n, k)).collect(),
    };
    let eb = crate::comb::Channel::with_tolerance(
        mp_choi(&mp)?,
        &[&l.b],
        crate::comb::ChannelKind::Cptp,
        1e-8,
    )?;
    let mut steps = vec![eb];
    steps.extend(inner.circuit.steps().iter().cloned());
    let circuit = Circuit::new(inner.circuit.initial().clone(), steps, c.legs().to_vec())?;
    finish(c, circuit, mp, &l.b, n)
}

/// Choi operator of a measure-and-prepare channel without the strict
/// completeness check (supplied weights carry rounding).
fn mp_choi(mp: &MeasurePrepare) -> Result<Operator> {
    mp.validate(1e-8)?;
    let mut acc: Option<Operator> = None;
    for (f, eta) in mp.povm.iter().zip(&mp.states) {
        let term = kron(eta, &f.transpose())?;
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term)?,
        });
    }
    Ok(acc.expect("nonempty").hermitian_part())
}

/// Product form `U = sum_ab w_ab eta_A^(a) (x) F_B^(b)T (x) xi_C^(ab)` of a
/// circuit with entanglement-breaking channels on the first output wire
/// and on the input wire.
#[derive(Debug, Clone)]
pub struct ProductForm {
    /// `(eta_A, F_B^T, xi_C)`; each factor is positive semidefinite.
    pub terms: Vec<[Operator; 3]>,
    pub residual: f64,
}

/// Two entanglement-breaking channels make the comb fully separable:
/// expand `rho_{A'R} * N_{A'->A} * L_{B'R->C} * M_{B->B'}` into product
/// terms and compare their sum with the compiled comb.
///
/// `initial` lives on `(A', R)`, `first` maps `A' -> A`, `second` maps the
/// input leg `B -> B'` and `l` maps `(B', R) -> C`.
pub fn two_eb_product_form(
    initial: &Operator,
    first: &MeasurePrepare,
    second: &MeasurePrepare,
    l: &Channel,
    legs: Vec<Leg>,
) -> Result<ProductForm> {
    let n1 = first.to_channel()?;
    let m = second.to_channel()?;
    let circuit = Circuit::new(initial.clone(), vec![n1, m, l.clone()], legs)?;
    let comb = compile(&circuit)?;
    let mut terms = Vec::new();
    let mut acc: Option<Operator> = None;
    for (e, eta) in first.povm.iter().zip(&first.states) {
        // rho_{A'R} * E^T on A' leaves a (weighted) state on R
        let rest = link(initial, &e.transpose())?;
        for (f, tau) in second.povm.iter().zip(&second.states) {
            let xi = link(&link(&rest, tau)?, l.op())?;
            let t = [eta.clone(), f.transpose(), xi];
            let prod = crate::tensor::kron_all(&[&t[0], &t[1], &t[2]])?;
            acc = Some(match acc {
                None => prod,
                Some(a) => a.add(&prod)?,
            });
            terms.push(t);
        }
    }
    let total = aligned_to(&acc.expect("nonempty"), &comb)?;
    let residual = total.distance(comb.op())?;
    Ok(ProductForm { terms, residual })
}

trait RelabelTo {
    fn relabel_to(&self, label: &str) -> Result<Operator>;
}

impl RelabelTo for Operator {
    fn relabel_to(&self, label: &str) -> Result<Operator> {
        if self.labels().len() != 1 {
            return Err(Error::invalid("expected a single-system operator"));
        }
        self.relabel(&self.labels()[0].clone(), label)
    }
}
