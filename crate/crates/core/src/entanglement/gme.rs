use serde::Serialize;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::sdp::{solve, HermTerm, SdpOptions, SdpProblem, SdpStatus};
use crate::tensor::{partial_transpose, CMat, Operator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GmeVerdict {
    /// Negative witness value: not a PPT mixture, hence genuinely
    /// multipartite entangled.
    Gme,
    /// Optimal value nonnegative: the input is a PPT mixture, so GME cannot
    /// be decided by this test.
    PptMixture,
    /// The solver did not reach the required accuracy; no verdict.
    SolverFailure,
}

/// `W = Q_M + P_M^{T_M}` for one bipartition, `M` being the transposed side.
#[derive(Debug, Clone, Serialize)]
pub struct CutDecomposition {
    pub side: Vec<String>,
    pub p: Operator,
    pub q: Operator,
    /// `||W - Q_M - P_M^{T_M}||_max`.
    pub residual: f64,
    pub min_eig_p: f64,
    pub min_eig_q: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    /// Optimal witness, unit trace.
    pub witness: Operator,
    /// `tr(W rho)` with `rho` normalised to unit trace.
    pub value: f64,
    /// Trace of the input before normalisation.
    pub scale: f64,
    pub verdict: GmeVerdict,
    pub decompositions: Vec<CutDecomposition>,
    pub status: SdpStatus,
    pub iterations: usize,
    pub gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
}

/// Representatives of the bipartitions of `labels`: every side `M` with
/// fewer than half of the parties, plus the halves containing the first
/// label when the count is even.
pub fn bipartitions(labels: &[String]) -> Vec<Vec<String>> {
    let n = labels.len();
    let mut out = Vec::new();
    for size in 1..=n / 2 {
        for mask in 1u64..(1u64 << n) {
            if mask.count_ones() as usize != size {
                continue;
            }
            if 2 * size == n && mask & 1 == 0 {
                continue;
            }
            out.push((0..n).filter(|i| mask >> i & 1 == 1).map(|i| labels[i].clone()).collect());
        }
    }
    out
}

/// Flat-index map implementing the partial transpose on the parties whose
/// bit is set in `mask`.
struct PtMap {
    strides: Vec<usize>,
    dims: Vec<usize>,
    mask: Vec<bool>,
}

impl PtMap {
    fn new(dims: &[usize], mask: Vec<bool>) -> PtMap {
        let mut strides = vec![1; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        PtMap { strides, dims: dims.to_vec(), mask }
    }

    fn apply(&self, r: usize, c: usize) -> (usize, usize) {
        let (mut r2, mut c2) = (0, 0);
        for k in 0..self.dims.len() {
            let dr = r / self.strides[k] % self.dims[k];
            let dc = c / self.strides[k] % self.dims[k];
            if self.mask[k] {
                r2 += dc * self.strides[k];
                c2 += dr * self.strides[k];
            } else {
                r2 += dr * self.strides[k];
                c2 += dc * self.strides[k];
            }
        }
        (r2, c2)
    }
}

/// PPT-mixture witness at the default tolerances.
pub fn gme_witness(rho: &Operator) -> Result<WitnessReport> {
    gme_witness_with(rho, &SdpOptions::default(), &Tolerances::default())
}

/// Solve `min tr(W rho)` over `W = Q_M + P_M^{T_M}` for every bipartition
/// `M`, `tr W = 1`, `P_M, Q_M >= 0`, on the unit-trace normalisation of `rho`.
///
/// `W` is eliminated through the first bipartition, so the program has one
/// `(P_M, Q_M)` block pair per bipartition and one Hermitian equality per
/// matrix entry tying every other pair to the first.
pub fn gme_witness_with(rho: &Operator, opts: &SdpOptions, tol: &Tolerances) -> Result<WitnessReport> {
    if rho.labels().len() < 2 {
        return Err(Error::invalid("need at least two parties"));
    }
    let herm = rho.hermiticity_residual();
    if herm > tol.hermiticity * rho.max_abs().max(1.0) {
        return Err(Error::NotHermitian { residual: herm });
    }
    let scale = rho.real_trace();
    if scale <= 1e-300 {
        return Err(Error::Numerical("input has no positive trace to normalise".into()));
    }
    let rho_n = rho.hermitian_part().scale(1.0 / scale);
    let d = rho.dim();
    let cuts = bipartitions(rho.labels());
    let maps: Vec<PtMap> = cuts
        .iter()
        .map(|side| PtMap::new(rho.dims(), rho.labels().iter().map(|l| side.contains(l)).collect()))
        .collect();

    let mut p = SdpProblem::new();
    let mut pq = Vec::new();
    for side in &cuts {
        let name = side.concat();
        let pb = p.add_block(format!("P_{name}"), d);
        let qb = p.add_block(format!("Q_{name}"), d);
        pq.push((pb, qb));
    }
    let first: Vec<&str> = cuts[0].iter().map(String::as_str).collect();
    let rho_t0 = partial_transpose(&rho_n, &first)?;
    p.set_objective(pq[0].1, rho_n.matrix().clone());
    p.set_objective(pq[0].0, rho_t0.matrix().clone());

    let mut basis = Vec::with_capacity(d * d);
    for u in 0..d {
        basis.push(HermTerm::diagonal(u));
        for v in u + 1..d {
            basis.push(HermTerm::real_pair(u, v));
            basis.push(HermTerm::imag_pair(u, v));
        }
    }
    for (k, map) in maps.iter().enumerate().skip(1) {
        for e in &basis {
            let terms = vec![
                (pq[0].1, e.clone()),
                (pq[0].0, e.map_indices(|r, c| maps[0].apply(r, c))),
                (pq[k].1, e.scaled(-1.0)),
                (pq[k].0, e.map_indices(|r, c| map.apply(r, c)).scaled(-1.0)),
            ];
            p.add_constraint(terms, 0.0);
        }
    }
    let trace = HermTerm::from_dense(&CMat::identity(d, d));
    p.add_constraint(vec![(pq[0].1, trace.clone()), (pq[0].0, trace)], 1.0);

    let sol = solve(&p, opts)?;
    let dims = rho.dims().to_vec();
    let labels = rho.labels().to_vec();
    let as_op = |m: &CMat| Operator::new(dims.clone(), labels.clone(), m.clone());

    let q0 = as_op(&sol.x[pq[0].1])?;
    let p0 = as_op(&sol.x[pq[0].0])?;
    let witness = q0.add(&partial_transpose(&p0, &first)?)?.hermitian_part();
    let mut decompositions = Vec::with_capacity(cuts.len());
    for (k, side) in cuts.iter().enumerate() {
        let pk = as_op(&sol.x[pq[k].0])?.hermitian_part();
        let qk = as_op(&sol.x[pq[k].1])?.hermitian_part();
        let sides: Vec<&str> = side.iter().map(String::as_str).collect();
        let rebuilt = qk.add(&partial_transpose(&pk, &sides)?)?;
        decompositions.push(CutDecomposition {
            side: side.clone(),
            residual: witness.distance(&rebuilt)?,
            min_eig_p: pk.min_eigenvalue()?,
            min_eig_q: qk.min_eigenvalue()?,
            p: pk,
            q: qk,
        });
    }
    let value = witness.inner(&rho_n)?.re;
    let verdict = if sol.status != SdpStatus::Optimal {
        GmeVerdict::SolverFailure
    } else if value < -tol.witness {
        GmeVerdict::Gme
    } else {
        GmeVerdict::PptMixture
    };
    Ok(WitnessReport {
        witness,
        value,
        scale,
        verdict,
        decompositions,
        status: sol.status,
        iterations: sol.iterations,
        gap: sol.gap,
        primal_residual: sol.primal_residual,
        dual_residual: sol.dual_residual,
    })
}

/// `tr(W rho)` with `rho` normalised to unit trace.
pub fn witness_expectation(w: &Operator, rho: &Operator) -> Result<f64> {
    if w.dims().len() != rho.dims().len() || w.dim() != rho.dim() {
        return Err(Error::dim("witness and state live on different spaces"));
    }
    let t = rho.real_trace();
    if t.abs() <= 1e-300 {
        return Err(Error::Numerical("state has zero trace".into()));
    }
    Ok(w.inner(rho)?.re / t)
}
