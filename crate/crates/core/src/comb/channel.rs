use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::tensor::{herm_eig, max_abs, partial_trace, permute_subsystems, real, CMat, CVec, Operator};
use serde::{Deserialize, Serialize};

use super::link::link;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelKind {
    Cptp,
    TraceNonIncreasing,
}

/// A completely positive map stored as its Choi operator on
/// outputs (x) inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    op: Operator,
    inputs: Vec<String>,
    outputs: Vec<String>,
    kind: ChannelKind,
}

impl Channel {
    /// Wrap a Choi operator. Labels not listed in `inputs` are outputs.
    /// Checks positivity and the trace condition for `kind` at the default
    /// tolerance.
    pub fn new(op: Operator, inputs: &[&str], kind: ChannelKind) -> Result<Channel> {
        Channel::with_tolerance(op, inputs, kind, Tolerances::default().causality)
    }

    pub fn with_tolerance(op: Operator, inputs: &[&str], kind: ChannelKind, tol: f64) -> Result<Channel> {
        for l in inputs {
            if !op.has_label(l) {
                return Err(Error::invalid(format!("input {l} is not a subsystem of the Choi operator")));
            }
        }
        let outputs: Vec<String> = op
            .labels()
            .iter()
            .filter(|l| !inputs.contains(&l.as_str()))
            .cloned()
            .collect();
        let ch = Channel { op, inputs: inputs.iter().map(|s| s.to_string()).collect(), outputs, kind };
        let scale = ch.op.max_abs().max(1.0);
        let herm = ch.op.hermiticity_residual();
        if herm > Tolerances::default().hermiticity * scale {
            return Err(Error::NotHermitian { residual: herm });
        }
        let min = ch.op.min_eigenvalue()?;
        if min < -tol * scale {
            return Err(Error::NotPositive { min_eig: min });
        }
        match kind {
            ChannelKind::Cptp => {
                let r = ch.tp_residual()?;
                if r > tol {
                    return Err(Error::invalid(format!("channel is not trace preserving (residual {r:.3e})")));
                }
            }
            ChannelKind::TraceNonIncreasing => {
                let gap = ch.identity_gap()?;
                if gap.min_eigenvalue()? < -tol {
                    return Err(Error::invalid("channel increases the trace"));
                }
            }
        }
        Ok(ch)
    }

    /// Channel `rho -> sum_e K_e rho K_e^dag` with `K_e[o, i] = V[o * env + e, i]`,
    /// i.e. an isometry into outputs (x) environment followed by discarding
    /// the environment.
    pub fn from_isometry(
        v: &CMat,
        inputs: &[(&str, usize)],
        outputs: &[(&str, usize)],
        env_dim: usize,
    ) -> Result<Channel> {
        let din: usize = inputs.iter().map(|x| x.1).product();
        let dout: usize = outputs.iter().map(|x| x.1).product();
        if v.nrows() != dout * env_dim || v.ncols() != din {
            return Err(Error::dim(format!(
                "isometry is {}x{}, expected {}x{}",
                v.nrows(),
                v.ncols(),
                dout * env_dim,
                din
            )));
        }
        let defect = max_abs(&(v.adjoint() * v - CMat::identity(din, din)));
        if defect > 1e-10 {
            return Err(Error::invalid(format!("matrix is not an isometry (residual {defect:.3e})")));
        }
        let kraus: Vec<CMat> = (0..env_dim)
            .map(|e| CMat::from_fn(dout, din, |o, i| v[(o * env_dim + e, i)]))
            .collect();
        Channel::from_kraus(&kraus, inputs, outputs)
    }

    /// Channel with the given Kraus operators (`dout x din` matrices).
    pub fn from_kraus(kraus: &[CMat], inputs: &[(&str, usize)], outputs: &[(&str, usize)]) -> Result<Channel> {
        let din: usize = inputs.iter().map(|x| x.1).product();
        let dout: usize = outputs.iter().map(|x| x.1).product();
        let n = din * dout;
        let mut choi = CMat::zeros(n, n);
        let mut tp = CMat::zeros(din, din);
        for k in kraus {
            if k.nrows() != dout || k.ncols() != din {
                return Err(Error::dim("Kraus operator has the wrong shape"));
            }
            let vec = CVec::from_fn(n, |r, _| k[(r / din, r % din)]);
            choi += &vec * vec.adjoint();
            tp += k.adjoint() * k;
        }
        let defect = max_abs(&(&tp - CMat::identity(din, din)));
        let kind = if defect <= 1e-10 {
            ChannelKind::Cptp
        } else {
            ChannelKind::TraceNonIncreasing
        };
        let dims = outputs.iter().chain(inputs).map(|x| x.1).collect();
        let labels: Vec<&str> = outputs.iter().chain(inputs).map(|x| x.0).collect();
        let op = Operator::new(dims, labels, choi)?;
        let ins: Vec<&str> = inputs.iter().map(|x| x.0).collect();
        Channel::new(op, &ins, kind)
    }

    /// Identity channel from `input` to `output`; Choi `sum_ij |ii><jj|`.
    pub fn identity(input: &str, output: &str, d: usize) -> Result<Channel> {
        Channel::from_kraus(&[CMat::identity(d, d)], &[(input, d)], &[(output, d)])
    }

    /// Discard a system: Choi is the identity on the input, no outputs.
    pub fn discard(input: &str, d: usize) -> Result<Channel> {
        let op = Operator::identity(vec![d], vec![input])?;
        Channel::new(op, &[input], ChannelKind::Cptp)
    }

    /// Prepare a fixed state; no inputs.
    pub fn preparation(state: &Operator) -> Result<Channel> {
        Channel::new(state.clone(), &[], ChannelKind::Cptp)
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    fn input_dim(&self) -> usize {
        self.inputs.iter().map(|l| self.op.dim_of(l).unwrap()).product()
    }

    fn output_dim(&self) -> usize {
        self.outputs.iter().map(|l| self.op.dim_of(l).unwrap()).product()
    }

    /// `tr_out(M)`, which equals the identity on the inputs for a CPTP map.
    pub fn input_marginal(&self) -> Result<Operator> {
        let outs: Vec<&str> = self.outputs.iter().map(String::as_str).collect();
        partial_trace(&self.op, &outs)
    }

    fn identity_gap(&self) -> Result<Operator> {
        let m = self.input_marginal()?;
        let id = Operator::identity(m.dims().to_vec(), m.labels().to_vec())?;
        id.sub(&m)
    }

    /// `||tr_out(M) - 1||_max`.
    pub fn tp_residual(&self) -> Result<f64> {
        Ok(self.identity_gap()?.max_abs())
    }

    /// Kraus operators (`dout x din`, outputs and inputs in stored label
    /// order) from the spectral decomposition of the Choi operator.
    pub fn kraus(&self) -> Result<Vec<CMat>> {
        let order: Vec<&str> = self.outputs.iter().chain(&self.inputs).map(String::as_str).collect();
        let m = permute_subsystems(&self.op, &order)?;
        let eig = herm_eig(&m)?;
        let top = eig.values.last().copied().unwrap_or(0.0).max(0.0);
        let (din, dout) = (self.input_dim(), self.output_dim());
        let mut out = Vec::new();
        for (k, &lam) in eig.values.iter().enumerate() {
            if lam <= 1e-12 * top.max(1e-300) || lam <= 0.0 {
                continue;
            }
            let s = real(lam.sqrt());
            let col = eig.vectors.column(k);
            out.push(CMat::from_fn(dout, din, |o, i| col[o * din + i] * s));
        }
        Ok(out)
    }

    /// Apply the map to an operator on the input labels. Works for any
    /// square operator, Hermitian or not.
    pub fn apply(&self, x: &Operator) -> Result<Operator> {
        if x.labels().len() != self.inputs.len() || !self.inputs.iter().all(|l| x.has_label(l)) {
            return Err(Error::invalid("operator must be defined on exactly the channel inputs"));
        }
        let y = link(x, &self.op)?;
        let outs: Vec<&str> = self.outputs.iter().map(String::as_str).collect();
        permute_subsystems(&y, &outs)
    }

    /// The same channel with one label renamed.
    pub fn relabel(&self, from: &str, to: &str) -> Result<Channel> {
        let op = self.op.relabel(from, to)?;
        let rename = |l: &String| if l == from { to.to_string() } else { l.clone() };
        Ok(Channel {
            op,
            inputs: self.inputs.iter().map(rename).collect(),
            outputs: self.outputs.iter().map(rename).collect(),
            kind: self.kind,
        })
    }
}

/// Choi operator of `rho -> U rho U^dag`.
pub fn choi_of_unitary(u: &CMat, inputs: &[(&str, usize)], outputs: &[(&str, usize)]) -> Result<Channel> {
    let din: usize = inputs.iter().map(|x| x.1).product();
    let dout: usize = outputs.iter().map(|x| x.1).product();
    if din != dout || u.nrows() != dout || u.ncols() != din {
        return Err(Error::dim("unitary shape does not match the labelled dimensions"));
    }
    let defect = max_abs(&(u.adjoint() * u - CMat::identity(din, din)));
    if defect > 1e-10 {
        return Err(Error::invalid(format!("matrix is not unitary (residual {defect:.3e})")));
    }
    Channel::from_kraus(std::slice::from_ref(u), inputs, outputs)
}

/// Measure-and-prepare channel `rho -> sum_a tr(F_a rho) eta_a`: the general
/// form of an entanglement-breaking channel.
#[derive(Debug, Clone)]
pub struct MeasurePrepare {
    pub povm: Vec<Operator>,
    pub states: Vec<Operator>,
}

impl MeasurePrepare {
    /// Checks that the POVM elements are positive and complete and that the
    /// prepared states are density operators.
    pub fn validate(&self, tol: f64) -> Result<()> {
        if self.povm.is_empty() || self.povm.len() != self.states.len() {
            return Err(Error::invalid("need one prepared state per POVM element"));
        }
        let mut sum = self.povm[0].clone();
        for f in &self.povm[1..] {
            sum = sum.add(f)?;
        }
        let id = Operator::identity(sum.dims().to_vec(), sum.labels().to_vec())?;
        let r = sum.distance(&id)?;
        if r > tol {
            return Err(Error::invalid(format!("POVM does not sum to the identity (residual {r:.3e})")));
        }
        for f in &self.povm {
            let m = f.min_eigenvalue()?;
            if m < -tol {
                return Err(Error::NotPositive { min_eig: m });
            }
        }
        for s in &self.states {
            let m = s.min_eigenvalue()?;
            if m < -tol {
                return Err(Error::NotPositive { min_eig: m });
            }
            if (s.real_trace() - 1.0).abs() > tol {
                return Err(Error::invalid("prepared state does not have unit trace"));
            }
        }
        Ok(())
    }

    /// Choi operator `sum_a eta_a (x) F_a^T`.
    pub fn to_channel(&self) -> Result<Channel> {
        self.validate(1e-9)?;
        let mut acc: Option<Operator> = None;
        for (f, eta) in self.povm.iter().zip(&self.states) {
            let term = crate::tensor::kron(eta, &f.transpose())?;
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term)?,
            });
        }
        let op = acc.unwrap();
        let inputs: Vec<&str> = self.povm[0].labels().iter().map(String::as_str).collect();
        Channel::new(op, &inputs, ChannelKind::Cptp)
    }
}
