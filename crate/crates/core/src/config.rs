//! Numerical tolerances shared across the crate.
//!
//! Every check that compares floating point quantities reads its threshold
//! from a [`Tolerances`] value. Functions without an explicit tolerance
//! argument use [`Tolerances::default`].

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Max-norm of `M - M^dagger` accepted as Hermitian.
    pub hermiticity: f64,
    /// Relative max-norm reconstruction error of an eigendecomposition.
    pub eig_reconstruction: f64,
    /// Eigenvalues above `-psd` count as non-negative.
    pub psd: f64,
    /// Residual of each causality level.
    pub causality: f64,
    /// Causality residual used for operators transcribed with rounded entries.
    pub causality_loose: f64,
    /// Singular values below this (relative) are treated as zero when
    /// testing linear independence.
    pub rank: f64,
    /// Positivity margin for the steering feasibility problem.
    pub steering_margin: f64,
    /// A witness value below `-witness` certifies genuine multipartite
    /// entanglement.
    pub witness: f64,
    /// Largest condition number accepted for a local filter.
    pub filter_condition: f64,
    /// Conditioned operators with trace below this are skipped in scans.
    pub scan_min_trace: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hermiticity: 1e-10,
            eig_reconstruction: 1e-9,
            psd: 1e-9,
            causality: 1e-9,
            causality_loose: 0.02,
            rank: 1e-8,
            steering_margin: 1e-8,
            witness: 1e-6,
            filter_condition: 1e8,
            scan_min_trace: 1e-12,
        }
    }
}
