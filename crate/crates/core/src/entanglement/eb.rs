use serde::Serialize;

use super::ppt::{ppt_min_eig, CutSpec};
use crate::comb::{Channel, ChannelKind, Circuit, Dir};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::tensor::{kron, partial_trace, permute_subsystems, CMat, Operator, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EbVerdict {
    Eb,
    NotEb,
    /// PPT Choi operator on a space where PPT does not imply separability.
    PptInconclusive,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EbReport {
    pub verdict: EbVerdict,
    /// Smallest eigenvalue of the partial transpose of the unit-trace Choi
    /// operator across outputs : inputs.
    pub ppt_min_eig: f64,
    pub dimension: usize,
}

/// Entanglement-breaking test through the PPT criterion on the Choi
/// operator, exact when the total dimension is at most 6.
pub fn eb_check(ch: &Channel) -> Result<EbReport> {
    if ch.inputs().is_empty() || ch.outputs().is_empty() {
        // preparations and discards are trivially entanglement breaking
        return Ok(EbReport { verdict: EbVerdict::Eb, ppt_min_eig: 0.0, dimension: ch.op().dim() });
    }
    let outs: Vec<&str> = ch.outputs().iter().map(String::as_str).collect();
    let ins: Vec<&str> = ch.inputs().iter().map(String::as_str).collect();
    let cut = CutSpec::bipartite(&outs, &ins)?;
    let e = ppt_min_eig(ch.op(), &cut)?;
    let tol = Tolerances::default().psd;
    let dimension = ch.op().dim();
    let verdict = if e < -tol {
        EbVerdict::NotEb
    } else if dimension <= 6 {
        EbVerdict::Eb
    } else {
        EbVerdict::PptInconclusive
    };
    Ok(EbReport { verdict, ppt_min_eig: e, dimension })
}

/// The channel `Sigma[w] = tr_R[L(rho_R (x) w)]` from the input leg to the
/// final output leg of a two-step circuit, where `rho_R` is the environment
/// marginal of the initial state and `L` its only channel. Evaluated from
/// the Kraus operators of `L` on the matrix units `|i><j|`.
pub fn sigma_map(circuit: &Circuit) -> Result<Channel> {
    let legs = circuit.legs();
    let dirs: Vec<Dir> = legs.iter().map(|l| l.dir).collect();
    if dirs != [Dir::Out, Dir::In, Dir::Out] || circuit.steps().len() != 1 {
        return Err(Error::invalid(
            "the Sigma map needs a two-step circuit: legs out, in, out and a single channel",
        ));
    }
    let (a, b, c) = (&legs[0].label, &legs[1].label, &legs[2].label);
    let step = &circuit.steps()[0];
    if !circuit.initial().has_label(a) {
        return Err(Error::invalid(format!("the first leg {a} must come from the initial state")));
    }
    if !step.inputs().contains(b) || !step.outputs().contains(c) {
        return Err(Error::invalid("the channel must consume the input leg and produce the last leg"));
    }
    // environment marginal, restricted to the wires the channel consumes
    let env_in: Vec<&str> = step.inputs().iter().map(String::as_str).filter(|l| *l != b).collect();
    let rho_r = crate::tensor::reduce_to(circuit.initial(), &env_in)?;

    let db = step.op().dim_of(b)?;
    let order: Vec<&str> = step.inputs().iter().map(String::as_str).collect();
    let kraus = step.kraus()?;
    let out_labels: Vec<&str> = step.outputs().iter().map(String::as_str).collect();
    let out_dims: Vec<usize> = out_labels.iter().map(|l| step.op().dim_of(l).unwrap()).collect();
    let traced: Vec<&str> = out_labels.iter().copied().filter(|l| *l != c).collect();
    let dc = step.op().dim_of(c)?;
    let dout: usize = out_dims.iter().product();

    let mut choi = CMat::zeros(dc * db, dc * db);
    for i in 0..db {
        for j in 0..db {
            let mut unit = CMat::zeros(db, db);
            unit[(i, j)] = C64::new(1.0, 0.0);
            let w = Operator::new(vec![db], vec![b.as_str()], unit)?;
            let input = permute_subsystems(&kron(&rho_r, &w)?, &order)?;
            let mut out = CMat::zeros(dout, dout);
            for k in &kraus {
                out += k * input.matrix() * k.adjoint();
            }
            let y = Operator::new(out_dims.clone(), out_labels.clone(), out)?;
            let yc = partial_trace(&y, &traced)?;
            for r in 0..dc {
                for s in 0..dc {
                    choi[(r * db + i, s * db + j)] = yc.matrix()[(r, s)];
                }
            }
        }
    }
    let op = Operator::new(vec![dc, db], vec![c.as_str(), b.as_str()], choi)?.hermitian_part();
    Channel::new(op, &[b.as_str()], ChannelKind::Cptp)
}
