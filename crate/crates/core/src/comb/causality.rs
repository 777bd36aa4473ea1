use serde::Serialize;

use super::{Comb, Dir};
use crate::config::Tolerances;
use crate::error::Result;
use crate::tensor::{kron, partial_trace, Operator};

/// One level of the trace hierarchy: after discarding everything later, the
/// operator must factor as the identity on `inputs` times a lower comb.
#[derive(Debug, Clone, Serialize)]
pub struct CausalityLevel {
    /// `Out` legs traced out just before this check.
    pub traced: Vec<String>,
    /// `In` legs that must carry an identity factor.
    pub inputs: Vec<String>,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CausalityReport {
    pub levels: Vec<CausalityLevel>,
    pub min_eigenvalue: f64,
    pub trace: f64,
    pub expected_trace: f64,
    /// `|trace - expected_trace|`.
    pub normalization_residual: f64,
    pub tolerance: f64,
    /// All level residuals within tolerance and the operator PSD. The
    /// hierarchy is scale-free, so normalisation is reported separately.
    pub passed: bool,
}

impl CausalityReport {
    pub fn max_residual(&self) -> f64 {
        self.levels.iter().map(|l| l.residual).fold(0.0, f64::max)
    }

    pub fn is_normalized(&self) -> bool {
        self.normalization_residual <= self.tolerance * self.expected_trace.max(1.0)
    }

    /// Passed and correctly normalised.
    pub fn is_proper_comb(&self) -> bool {
        self.passed && self.is_normalized()
    }
}

/// Check the causality hierarchy at the default tolerance.
pub fn verify_causality(c: &Comb) -> Result<CausalityReport> {
    verify_causality_with(c, Tolerances::default().causality)
}

/// Walk the legs from last to first. A trailing group of `Out` legs is traced
/// out; a group of `In` legs must then appear as an identity factor,
/// `X = 1_in (x) tr_in(X) / d_in`, and is removed by that normalised trace.
pub fn verify_causality_with(c: &Comb, tol: f64) -> Result<CausalityReport> {
    let ordered = c.ordered_legs();
    let mut groups: Vec<(Dir, Vec<String>)> = Vec::new();
    for leg in &ordered {
        match groups.last_mut() {
            Some((d, g)) if *d == leg.dir => g.push(leg.label.clone()),
            _ => groups.push((leg.dir, vec![leg.label.clone()])),
        }
    }

    let mut current = c.op().clone();
    let mut levels = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    for (dir, group) in groups.iter().rev() {
        let names: Vec<&str> = group.iter().map(String::as_str).collect();
        match dir {
            Dir::Out => {
                current = partial_trace(&current, &names)?;
                pending.extend(group.iter().cloned());
            }
            Dir::In => {
                let d: usize = names.iter().map(|l| current.dim_of(l).unwrap()).product();
                let reduced = partial_trace(&current, &names)?.scale(1.0 / d as f64);
                let dims: Vec<usize> = names.iter().map(|l| current.dim_of(l).unwrap()).collect();
                let id = Operator::identity(dims, names.clone())?;
                let rebuilt = kron(&id, &reduced)?;
                let residual = current.distance(&rebuilt)?;
                levels.push(CausalityLevel {
                    traced: std::mem::take(&mut pending),
                    inputs: group.clone(),
                    residual,
                });
                current = reduced;
            }
        }
    }

    let eig = c.op().eigenvalues()?;
    let min_eigenvalue = eig.first().copied().unwrap_or(0.0);
    let trace = c.op().real_trace();
    let expected_trace = c.expected_trace();
    let psd_ok = min_eigenvalue >= -tol * c.op().max_abs().max(1.0);
    let passed = psd_ok && levels.iter().all(|l| l.residual <= tol);
    Ok(CausalityReport {
        levels,
        min_eigenvalue,
        trace,
        expected_trace,
        normalization_residual: (trace - expected_trace).abs(),
        tolerance: tol,
        passed,
    })
}
