//! Semidefinite programs over complex Hermitian blocks.
//!
//! Standard form:
//!
//! ```text
//! minimise    sum_k tr(C_k X_k)
//! subject to  sum_k tr(A_ik X_k) = b_i,   X_k >= 0
//! ```
//!
//! with dual `maximise b^T y` subject to `sum_i y_i A_ik + S_k = C_k`,
//! `S_k >= 0`. Each complex block is solved through its real embedding
//! `[[Re, -Im], [Im, Re]]`; iterates keep that structure, so no extra tying
//! constraints are needed and the complex solution is read back from the
//! blocks of the real one.

mod embed;
mod ipm;
mod presolve;

pub use embed::{complex_to_real_embedding, real_to_complex};

/// Real embedding of a Hermitian operator; eigenvalues are those of `h`,
/// each with doubled multiplicity.
pub fn embed_hermitian(h: &crate::tensor::Operator) -> Result<DMatrix<f64>> {
    let res = h.hermiticity_residual();
    if res > crate::config::Tolerances::default().hermiticity * h.max_abs().max(1.0) {
        return Err(Error::NotHermitian { residual: res });
    }
    Ok(complex_to_real_embedding(h.matrix()))
}

use crate::error::{Error, Result};
use crate::tensor::{max_abs, CMat, C64};
use nalgebra::DMatrix;
use serde::Serialize;
use std::collections::BTreeMap;

/// Largest embedded (real) block side the solver accepts.
pub const MAX_EMBEDDED_DIM: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub label: String,
    /// Side length of the complex Hermitian block.
    pub size: usize,
}

/// Sparse Hermitian matrix: every nonzero entry, both triangles.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct HermTerm {
    pub entries: Vec<(usize, usize, C64)>,
}

impl HermTerm {
    pub fn from_dense(m: &CMat) -> HermTerm {
        let mut entries = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                let z = m[(r, c)];
                if z.re != 0.0 || z.im != 0.0 {
                    entries.push((r, c, z));
                }
            }
        }
        HermTerm { entries }
    }

    /// `E_uu`.
    pub fn diagonal(u: usize) -> HermTerm {
        HermTerm { entries: vec![(u, u, C64::new(1.0, 0.0))] }
    }

    /// `E_uv + E_vu`, so that `tr(term X) = 2 Re X_uv`.
    pub fn real_pair(u: usize, v: usize) -> HermTerm {
        let one = C64::new(1.0, 0.0);
        HermTerm { entries: vec![(u, v, one), (v, u, one)] }
    }

    /// `i (E_uv - E_vu)`, so that `tr(term X) = 2 Im X_uv`.
    pub fn imag_pair(u: usize, v: usize) -> HermTerm {
        HermTerm { entries: vec![(u, v, C64::new(0.0, 1.0)), (v, u, C64::new(0.0, -1.0))] }
    }

    pub fn scaled(&self, s: f64) -> HermTerm {
        HermTerm { entries: self.entries.iter().map(|&(r, c, z)| (r, c, z * s)).collect() }
    }

    /// Apply an index map to both row and column (e.g. a partial transpose
    /// expressed on flat indices).
    pub fn map_indices(&self, f: impl Fn(usize, usize) -> (usize, usize)) -> HermTerm {
        HermTerm {
            entries: self
                .entries
                .iter()
                .map(|&(r, c, z)| {
                    let (r2, c2) = f(r, c);
                    (r2, c2, z)
                })
                .collect(),
        }
    }

    pub fn to_dense(&self, n: usize) -> CMat {
        let mut m = CMat::zeros(n, n);
        for &(r, c, z) in &self.entries {
            m[(r, c)] += z;
        }
        m
    }

    /// `tr(term * X)`.
    pub fn trace_with(&self, x: &CMat) -> C64 {
        self.entries.iter().map(|&(r, c, z)| z * x[(c, r)]).sum()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Constraint {
    /// `(block index, coefficient)` pairs.
    pub terms: Vec<(usize, HermTerm)>,
    pub rhs: f64,
}

#[derive(Debug, Clone, Default)]
pub struct SdpProblem {
    pub blocks: Vec<Block>,
    /// One Hermitian objective matrix per block.
    pub objective: Vec<CMat>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, Copy)]
pub struct SdpOptions {
    pub max_iter: usize,
    /// Relative accuracy targeted for infeasibilities and the duality gap.
    pub tol: f64,
    /// Iterations without improvement of the merit function before giving up.
    pub stall_iters: usize,
    /// Dual objective beyond which the primal is declared infeasible.
    pub infeasibility_bound: f64,
    /// Fraction of the step to the boundary that is taken.
    pub step_fraction: f64,
}

impl Default for SdpOptions {
    fn default() -> Self {
        SdpOptions { max_iter: 150, tol: 1e-9, stall_iters: 30, infeasibility_bound: 1e6, step_fraction: 0.98 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    MaxIter,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub x: Vec<CMat>,
    pub y: Vec<f64>,
    pub s: Vec<CMat>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// `|primal - dual|`.
    pub gap: f64,
    /// Max-norm of `b - A(X)`.
    pub primal_residual: f64,
    /// Max-norm of `C - S - A*(y)`.
    pub dual_residual: f64,
    pub iterations: usize,
    /// Constraint rows dropped as linearly dependent.
    pub removed_constraints: Vec<usize>,
}

impl SdpSolution {
    pub fn objective(&self) -> f64 {
        self.primal_objective
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SdpStatus::Optimal
    }
}

/// KKT diagnostics of a solution, recomputed in complex arithmetic.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Kkt {
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap: f64,
    pub min_eig_x: f64,
    pub min_eig_s: f64,
    pub complementarity: f64,
}

impl SdpProblem {
    pub fn new() -> Self {
        SdpProblem::default()
    }

    /// Add a block with a zero objective; returns its index.
    pub fn add_block(&mut self, label: impl Into<String>, size: usize) -> usize {
        self.blocks.push(Block { label: label.into(), size });
        self.objective.push(CMat::zeros(size, size));
        self.blocks.len() - 1
    }

    pub fn set_objective(&mut self, block: usize, c: CMat) {
        self.objective[block] = c;
    }

    pub fn add_constraint(&mut self, terms: Vec<(usize, HermTerm)>, rhs: f64) {
        self.constraints.push(Constraint { terms, rhs });
    }

    pub fn validate(&self) -> Result<()> {
        if self.objective.len() != self.blocks.len() {
            return Err(Error::invalid("one objective matrix per block required"));
        }
        for (k, b) in self.blocks.iter().enumerate() {
            if b.size == 0 {
                return Err(Error::invalid(format!("block {} is empty", b.label)));
            }
            if 2 * b.size > MAX_EMBEDDED_DIM {
                return Err(Error::invalid(format!(
                    "block {} embeds to dimension {} > {MAX_EMBEDDED_DIM}",
                    b.label,
                    2 * b.size
                )));
            }
            let c = &self.objective[k];
            if c.nrows() != b.size || c.ncols() != b.size {
                return Err(Error::dim(format!("objective of block {} has the wrong size", b.label)));
            }
            if max_abs(&(c - c.adjoint())) > 1e-10 * max_abs(c).max(1.0) {
                return Err(Error::invalid(format!("objective of block {} is not Hermitian", b.label)));
            }
        }
        for (i, con) in self.constraints.iter().enumerate() {
            if !con.rhs.is_finite() {
                return Err(Error::invalid(format!("constraint {i} has a non-finite right-hand side")));
            }
            let mut per_block: BTreeMap<usize, BTreeMap<(usize, usize), C64>> = BTreeMap::new();
            for (k, t) in &con.terms {
                let size = self
                    .blocks
                    .get(*k)
                    .ok_or_else(|| Error::invalid(format!("constraint {i} references block {k}")))?
                    .size;
                let acc = per_block.entry(*k).or_default();
                for &(r, c, z) in &t.entries {
                    if r >= size || c >= size {
                        return Err(Error::invalid(format!("constraint {i} entry out of range")));
                    }
                    *acc.entry((r, c)).or_insert(C64::new(0.0, 0.0)) += z;
                }
            }
            for acc in per_block.values() {
                for (&(r, c), z) in acc {
                    let w = acc.get(&(c, r)).copied().unwrap_or(C64::new(0.0, 0.0));
                    if (z - w.conj()).norm() > 1e-12 * z.norm().max(1.0) {
                        return Err(Error::invalid(format!("constraint {i} is not Hermitian")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Recompute residuals, gap and positivity of a solution.
    pub fn kkt(&self, sol: &SdpSolution) -> Kkt {
        let mut primal_residual = 0.0f64;
        let mut aty: Vec<CMat> = self.blocks.iter().map(|b| CMat::zeros(b.size, b.size)).collect();
        for (i, con) in self.constraints.iter().enumerate() {
            let mut ax = 0.0;
            for (k, t) in &con.terms {
                ax += t.trace_with(&sol.x[*k]).re;
                for &(r, c, z) in &t.entries {
                    aty[*k][(r, c)] += z * sol.y[i];
                }
            }
            primal_residual = primal_residual.max((con.rhs - ax).abs());
        }
        let mut dual_residual = 0.0f64;
        let mut min_eig_x = f64::INFINITY;
        let mut min_eig_s = f64::INFINITY;
        let mut complementarity = 0.0;
        let mut pobj = 0.0;
        for k in 0..self.blocks.len() {
            let rd = &self.objective[k] - &sol.s[k] - &aty[k];
            dual_residual = dual_residual.max(max_abs(&rd));
            min_eig_x = min_eig_x.min(min_eig(&sol.x[k]));
            min_eig_s = min_eig_s.min(min_eig(&sol.s[k]));
            complementarity += (&sol.x[k] * &sol.s[k]).trace().re;
            pobj += (&self.objective[k] * &sol.x[k]).trace().re;
        }
        let dobj: f64 = self.constraints.iter().zip(&sol.y).map(|(c, y)| c.rhs * y).sum();
        Kkt { primal_residual, dual_residual, gap: (pobj - dobj).abs(), min_eig_x, min_eig_s, complementarity }
    }
}

fn min_eig(m: &CMat) -> f64 {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Solve an SDP in standard form.
pub fn solve(problem: &SdpProblem, opts: &SdpOptions) -> Result<SdpSolution> {
    problem.validate()?;
    let real = embed::RealProblem::from_complex(problem);
    let pre = presolve::presolve(&real)?;
    if pre.inconsistent {
        log::warn!("linearly dependent constraints with inconsistent right-hand sides");
        return Ok(infeasible_solution(problem, pre.removed));
    }
    if !pre.removed.is_empty() {
        log::warn!("removed {} linearly dependent constraint rows", pre.removed.len());
    }
    let mut out = ipm::run(&pre.problem, opts);
    pre.unscale(&mut out);
    let mut y = vec![0.0; problem.constraints.len()];
    for (pos, &i) in pre.kept.iter().enumerate() {
        y[i] = out.y[pos];
    }
    let x: Vec<CMat> = out.x.iter().map(real_to_complex).collect();
    let s: Vec<CMat> = out.s.iter().map(real_to_complex).collect();
    let mut sol = SdpSolution {
        status: out.status,
        x,
        y,
        s,
        primal_objective: 0.0,
        dual_objective: 0.0,
        gap: 0.0,
        primal_residual: 0.0,
        dual_residual: 0.0,
        iterations: out.iterations,
        removed_constraints: pre.removed,
    };
    let kkt = problem.kkt(&sol);
    sol.primal_objective = problem
        .objective
        .iter()
        .zip(&sol.x)
        .map(|(c, x)| (c * x).trace().re)
        .sum();
    sol.dual_objective = problem.constraints.iter().zip(&sol.y).map(|(c, y)| c.rhs * y).sum();
    sol.gap = kkt.gap;
    sol.primal_residual = kkt.primal_residual;
    sol.dual_residual = kkt.dual_residual;
    if sol.status == SdpStatus::MaxIter && meets_acceptance(problem, &sol) {
        // stalled, but already within the reporting tolerance
        sol.status = SdpStatus::Optimal;
    }
    Ok(sol)
}

/// The accuracy every `Optimal` solution is expected to reach.
pub const ACCEPT_TOL: f64 = 1e-7;

fn meets_acceptance(problem: &SdpProblem, sol: &SdpSolution) -> bool {
    let bmax = problem.constraints.iter().fold(1.0f64, |a, c| a.max(c.rhs.abs()));
    let cmax = problem.objective.iter().fold(1.0f64, |a, c| a.max(max_abs(c)));
    sol.gap <= ACCEPT_TOL * (1.0 + sol.primal_objective.abs())
        && sol.primal_residual <= ACCEPT_TOL * bmax
        && sol.dual_residual <= ACCEPT_TOL * cmax
}

fn infeasible_solution(problem: &SdpProblem, removed: Vec<usize>) -> SdpSolution {
    SdpSolution {
        status: SdpStatus::Infeasible,
        x: problem.blocks.iter().map(|b| CMat::zeros(b.size, b.size)).collect(),
        y: vec![0.0; problem.constraints.len()],
        s: problem.blocks.iter().map(|b| CMat::zeros(b.size, b.size)).collect(),
        primal_objective: f64::NAN,
        dual_objective: f64::NAN,
        gap: f64::NAN,
        primal_residual: f64::NAN,
        dual_residual: f64::NAN,
        iterations: 0,
        removed_constraints: removed,
    }
}

pub(crate) type RMat = DMatrix<f64>;
