use super::{max_abs, real, CMat, CVec, Operator, StateVector};
use crate::config::Tolerances;
use crate::error::{Error, Result};

/// Eigenvalues in ascending order with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl HermEig {
    pub fn reconstruct(&self) -> CMat {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            for i in 0..n {
                scaled[(i, j)] *= real(self.values[j]);
            }
        }
        scaled * self.vectors.adjoint()
    }
}

pub fn herm_eig(op: &Operator) -> Result<HermEig> {
    herm_eig_matrix(op.matrix(), &Tolerances::default())
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input is symmetrised before decomposing; a Hermiticity residual or
/// reconstruction error above the configured tolerances is an error.
pub fn herm_eig_matrix(m: &CMat, tol: &Tolerances) -> Result<HermEig> {
    let scale = max_abs(m).max(1.0);
    let residual = max_abs(&(m - m.adjoint()));
    if residual > tol.hermiticity * scale {
        return Err(Error::NotHermitian { residual });
    }
    let sym = (m + m.adjoint()) * real(0.5);
    let n = sym.nrows();
    if n == 0 {
        return Ok(HermEig { values: vec![], vectors: CMat::zeros(0, 0) });
    }
    let eig = sym.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    let out = HermEig { values, vectors };
    let err = max_abs(&(out.reconstruct() - &sym));
    if !err.is_finite() || err > tol.eig_reconstruction * scale {
        return Err(Error::Numerical(format!("eigendecomposition reconstruction error {err:.3e}")));
    }
    Ok(out)
}

/// Purification `|psi> = sum_k sqrt(l_k) |v_k> (x) |k>` with the ancilla
/// appended as the last subsystem. The ancilla dimension equals the rank.
pub fn purify(rho: &Operator, ancilla: &str) -> Result<StateVector> {
    if rho.has_label(ancilla) {
        return Err(Error::invalid(format!("ancilla label {ancilla} already in use")));
    }
    let tol = Tolerances::default();
    let e = herm_eig_matrix(rho.matrix(), &tol)?;
    let scale = rho.max_abs().max(1.0);
    if e.values[0] < -tol.psd * scale {
        return Err(Error::NotPositive { min_eig: e.values[0] });
    }
    let lmax = e.values.last().copied().unwrap_or(0.0);
    let cut = 1e-12 * lmax.max(1e-300);
    let kept: Vec<usize> = (0..e.values.len()).filter(|&k| e.values[k] > cut).collect();
    let r = kept.len().max(1);
    let n = rho.dim();
    let mut v = CVec::zeros(n * r);
    for (a, &k) in kept.iter().enumerate() {
        let s = e.values[k].sqrt();
        for i in 0..n {
            v[i * r + a] = e.vectors[(i, k)] * real(s);
        }
    }
    let mut dims = rho.dims().to_vec();
    dims.push(r);
    let mut labels = rho.labels().to_vec();
    labels.push(ancilla.to_string());
    StateVector::new(dims, labels, v)
}
