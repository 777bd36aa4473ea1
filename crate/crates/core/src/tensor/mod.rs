//! Labelled operators on finite-dimensional tensor-product spaces.
//!
//! An [`Operator`] carries a list of subsystem labels and dimensions next to
//! its matrix. The first label is the most significant tensor factor, so the
//! basis of an operator on `A, B, C` is ordered `|0_A 0_B 0_C>, |0_A 0_B 1_C>, ...`.

mod eig;
mod index;
mod json;

pub use eig::{herm_eig, herm_eig_matrix, purify, HermEig};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

pub type C64 = nalgebra::Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub(crate) fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dims: Vec<usize>,
    labels: Vec<String>,
    matrix: CMat,
}

impl Operator {
    pub fn new<S: Into<String>>(dims: Vec<usize>, labels: Vec<S>, matrix: CMat) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if dims.len() != labels.len() {
            return Err(Error::dim(format!("{} dims for {} labels", dims.len(), labels.len())));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::dim("zero subsystem dimension"));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::invalid(format!("duplicate label {l}")));
            }
        }
        let total: usize = dims.iter().product();
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::dim(format!("matrix is {}x{}", matrix.nrows(), matrix.ncols())));
        }
        if matrix.nrows() != total {
            return Err(Error::dim(format!("matrix side {} but dims multiply to {total}", matrix.nrows())));
        }
        Ok(Operator { dims, labels, matrix })
    }

    /// A 1x1 operator on no subsystems.
    pub fn scalar(value: C64) -> Self {
        Operator { dims: vec![], labels: vec![], matrix: CMat::from_element(1, 1, value) }
    }

    pub fn identity<S: Into<String>>(dims: Vec<usize>, labels: Vec<S>) -> Result<Self> {
        let n = dims.iter().product();
        Operator::new(dims, labels, CMat::identity(n, n))
    }

    pub fn zeros<S: Into<String>>(dims: Vec<usize>, labels: Vec<S>) -> Result<Self> {
        let n = dims.iter().product();
        Operator::new(dims, labels, CMat::zeros(n, n))
    }

    /// Build from a row-major list of real entries.
    pub fn from_real<S: Into<String>>(dims: Vec<usize>, labels: Vec<S>, rows: &[f64]) -> Result<Self> {
        let n: usize = dims.iter().product();
        if rows.len() != n * n {
            return Err(Error::dim(format!("{} entries for a {n}x{n} matrix", rows.len())));
        }
        Operator::new(dims, labels, CMat::from_fn(n, n, |i, j| real(rows[i * n + j])))
    }

    /// Single-system operator with label `label`.
    pub fn single(label: &str, matrix: CMat) -> Result<Self> {
        let d = matrix.nrows();
        Operator::new(vec![d], vec![label], matrix)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn has_label(&self, label: &str) -> bool {
        self.position(label).is_some()
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        self.position(label)
            .map(|i| self.dims[i])
            .ok_or_else(|| Error::invalid(format!("no subsystem labelled {label}")))
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn real_trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn hermiticity_residual(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() <= tol
    }

    pub fn hermitian_part(&self) -> Operator {
        let m = (&self.matrix + self.matrix.adjoint()) * real(0.5);
        self.with_matrix(m)
    }

    pub fn adjoint(&self) -> Operator {
        self.with_matrix(self.matrix.adjoint())
    }

    /// Full transpose in the computational basis.
    pub fn transpose(&self) -> Operator {
        self.with_matrix(self.matrix.transpose())
    }

    pub fn scale(&self, s: f64) -> Operator {
        self.with_matrix(&self.matrix * real(s))
    }

    pub fn scale_complex(&self, s: C64) -> Operator {
        self.with_matrix(&self.matrix * s)
    }

    /// Same subsystems, different matrix. Panics on a size mismatch.
    pub fn with_matrix(&self, matrix: CMat) -> Operator {
        assert_eq!(matrix.nrows(), self.dim(), "matrix size does not match subsystems");
        Operator { dims: self.dims.clone(), labels: self.labels.clone(), matrix }
    }

    /// Divide by the trace.
    pub fn normalized(&self) -> Result<Operator> {
        let t = self.real_trace();
        if t.abs() < 1e-300 {
            return Err(Error::Numerical("cannot normalise a traceless operator".into()));
        }
        Ok(self.scale(1.0 / t))
    }

    /// Rename every subsystem at once.
    pub fn with_labels<S: Into<String>>(&self, labels: Vec<S>) -> Result<Operator> {
        Operator::new(self.dims.clone(), labels, self.matrix.clone())
    }

    pub fn relabel(&self, from: &str, to: &str) -> Result<Operator> {
        let i = self
            .position(from)
            .ok_or_else(|| Error::invalid(format!("no subsystem labelled {from}")))?;
        let mut labels = self.labels.clone();
        labels[i] = to.to_string();
        Operator::new(self.dims.clone(), labels, self.matrix.clone())
    }

    /// Bring `other` into this operator's label order.
    pub fn aligned(&self, other: &Operator) -> Result<Operator> {
        if other.labels == self.labels {
            if other.dims != self.dims {
                return Err(Error::dim("same labels with different dimensions"));
            }
            return Ok(other.clone());
        }
        let order: Vec<&str> = self.labels.iter().map(String::as_str).collect();
        let p = permute_subsystems(other, &order)?;
        if p.dims != self.dims {
            return Err(Error::dim("same labels with different dimensions"));
        }
        Ok(p)
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        let o = self.aligned(other)?;
        Ok(self.with_matrix(&self.matrix + o.matrix))
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        let o = self.aligned(other)?;
        Ok(self.with_matrix(&self.matrix - o.matrix))
    }

    /// Max-norm distance after aligning label order.
    pub fn distance(&self, other: &Operator) -> Result<f64> {
        let o = self.aligned(other)?;
        Ok(max_abs(&(&self.matrix - o.matrix)))
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.matrix)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(herm_eig(self)?.values)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(herm_eig(self)?.values[0])
    }

    pub fn is_psd(&self, tol: &Tolerances) -> Result<bool> {
        Ok(self.min_eigenvalue()? >= -tol.psd * self.max_abs().max(1.0))
    }

    /// `A X A^dagger` with `A` acting on the whole space.
    pub fn conjugate_by(&self, a: &CMat) -> Result<Operator> {
        if a.ncols() != self.dim() || a.nrows() != self.dim() {
            return Err(Error::dim("conjugating matrix has the wrong size"));
        }
        Ok(self.with_matrix(a * &self.matrix * a.adjoint()))
    }

    /// Expectation `tr(self * other)` after aligning labels.
    pub fn inner(&self, other: &Operator) -> Result<C64> {
        let o = self.aligned(other)?;
        let mut s = C64::new(0.0, 0.0);
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                s += self.matrix[(i, j)] * o.matrix[(j, i)];
            }
        }
        Ok(s)
    }
}

pub(crate) fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0f64, |a, z| a.max(z.norm()))
}

/// A pure state with labelled subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    dims: Vec<usize>,
    labels: Vec<String>,
    vector: CVec,
}

impl StateVector {
    pub fn new<S: Into<String>>(dims: Vec<usize>, labels: Vec<S>, vector: CVec) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if dims.len() != labels.len() {
            return Err(Error::dim("dims and labels differ in length"));
        }
        let total: usize = dims.iter().product();
        if vector.len() != total {
            return Err(Error::dim(format!("vector length {} but dims multiply to {total}", vector.len())));
        }
        Ok(StateVector { dims, labels, vector })
    }

    /// Computational basis vector from a bit-string style list of digits.
    pub fn basis<S: Into<String>>(dims: Vec<usize>, labels: Vec<S>, digits: &[usize]) -> Result<Self> {
        let total: usize = dims.iter().product();
        if digits.len() != dims.len() || digits.iter().zip(&dims).any(|(d, n)| d >= n) {
            return Err(Error::invalid("basis digits out of range"));
        }
        let idx = digits.iter().zip(&dims).fold(0, |acc, (d, n)| acc * n + d);
        let mut v = CVec::zeros(total);
        v[idx] = real(1.0);
        StateVector::new(dims, labels, v)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vector(&self) -> &CVec {
        &self.vector
    }

    pub fn norm(&self) -> f64 {
        self.vector.norm()
    }

    pub fn normalized(&self) -> StateVector {
        let n = self.norm();
        StateVector { dims: self.dims.clone(), labels: self.labels.clone(), vector: &self.vector / real(n) }
    }

    /// `|psi><psi|` as an operator.
    pub fn projector(&self) -> Operator {
        let m = &self.vector * self.vector.adjoint();
        Operator { dims: self.dims.clone(), labels: self.labels.clone(), matrix: m }
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.vector[index]
    }
}

/// Tensor product; the labels of `a` and `b` must be disjoint.
pub fn kron(a: &Operator, b: &Operator) -> Result<Operator> {
    if let Some(l) = a.labels.iter().find(|l| b.labels.contains(l)) {
        return Err(Error::invalid(format!("label {l} appears in both factors")));
    }
    let dims = a.dims.iter().chain(&b.dims).copied().collect();
    let labels = a.labels.iter().chain(&b.labels).cloned().collect::<Vec<_>>();
    Operator::new(dims, labels, a.matrix.kronecker(&b.matrix))
}

/// Tensor product of several operators, left to right.
pub fn kron_all(ops: &[&Operator]) -> Result<Operator> {
    let mut acc = Operator::scalar(real(1.0));
    for op in ops {
        acc = kron(&acc, op)?;
    }
    Ok(acc)
}

fn positions(op: &Operator, labels: &[&str]) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(labels.len());
    for l in labels {
        let p = op.position(l).ok_or_else(|| Error::invalid(format!("no subsystem labelled {l}")))?;
        if out.contains(&p) {
            return Err(Error::invalid(format!("label {l} listed twice")));
        }
        out.push(p);
    }
    Ok(out)
}

/// Trace out the listed subsystems. The remaining labels keep their order.
pub fn partial_trace(op: &Operator, traced: &[&str]) -> Result<Operator> {
    let tr = positions(op, traced)?;
    let keep: Vec<usize> = (0..op.dims.len()).filter(|i| !tr.contains(i)).collect();
    let layout = index::Layout::new(&op.dims);
    let ko = layout.offsets(&keep);
    let to = layout.offsets(&tr);
    let n = ko.len();
    let mut out = CMat::zeros(n, n);
    for r in 0..n {
        for cc in 0..n {
            let mut s = C64::new(0.0, 0.0);
            for t in &to {
                s += op.matrix[(ko[r] + t, ko[cc] + t)];
            }
            out[(r, cc)] = s;
        }
    }
    Operator::new(
        keep.iter().map(|&i| op.dims[i]).collect(),
        keep.iter().map(|&i| op.labels[i].clone()).collect(),
        out,
    )
}

/// Trace out everything except the listed subsystems, returned in the listed order.
pub fn reduce_to(op: &Operator, kept: &[&str]) -> Result<Operator> {
    let traced: Vec<&str> = op
        .labels
        .iter()
        .map(String::as_str)
        .filter(|l| !kept.contains(l))
        .collect();
    let r = partial_trace(op, &traced)?;
    permute_subsystems(&r, kept)
}

/// Transpose the listed subsystems in the computational basis.
pub fn partial_transpose(op: &Operator, transposed: &[&str]) -> Result<Operator> {
    let s = positions(op, transposed)?;
    let rest: Vec<usize> = (0..op.dims.len()).filter(|i| !s.contains(i)).collect();
    let layout = index::Layout::new(&op.dims);
    let so = layout.offsets(&s);
    let no = layout.offsets(&rest);
    let n = op.dim();
    let mut out = CMat::zeros(n, n);
    for &a in &so {
        for &b in &no {
            for &cc in &so {
                for &d in &no {
                    out[(a + b, cc + d)] = op.matrix[(cc + b, a + d)];
                }
            }
        }
    }
    Ok(op.with_matrix(out))
}

/// Reorder subsystems so that the labels appear in `order`.
pub fn permute_subsystems(op: &Operator, order: &[&str]) -> Result<Operator> {
    if order.len() != op.labels.len() {
        return Err(Error::invalid(format!(
            "permutation lists {} labels, operator has {}",
            order.len(),
            op.labels.len()
        )));
    }
    let p = positions(op, order)?;
    if p.iter().enumerate().all(|(i, &j)| i == j) {
        return Ok(op.clone());
    }
    let layout = index::Layout::new(&op.dims);
    let po = layout.offsets(&p);
    let n = op.dim();
    let out = CMat::from_fn(n, n, |i, j| op.matrix[(po[i], po[j])]);
    Operator::new(
        p.iter().map(|&i| op.dims[i]).collect(),
        p.iter().map(|&i| op.labels[i].clone()).collect(),
        out,
    )
}

/// Embed `op` into a larger space as `op (x) 1` on the extra labels.
pub fn extend_identity(op: &Operator, extra: &[(&str, usize)]) -> Result<Operator> {
    let id = Operator::identity(
        extra.iter().map(|e| e.1).collect(),
        extra.iter().map(|e| e.0).collect(),
    )?;
    kron(op, &id)
}
