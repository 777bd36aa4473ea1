//! Channels, circuits and combs.
//!
//! Channels are stored through their Choi operator
//! `M = sum_ij M[|i><j|] (x) |i><j|` (outputs first). Operators are glued
//! together with the [`link`] product, which contracts every label the two
//! factors share.
//!
//! Leg directions are given from the point of view of the process: an
//! [`Dir::Out`] leg carries a system out of the process to an experimenter,
//! an [`Dir::In`] leg carries a system from an experimenter back into the
//! process. A comb is normalised to the product of its `In` dimensions.

mod causality;
mod channel;
mod circuit;
mod json;
mod link;

pub use causality::{verify_causality, verify_causality_with, CausalityLevel, CausalityReport};
pub use channel::{choi_of_unitary, Channel, ChannelKind, MeasurePrepare};
pub use circuit::{compile, Circuit};
pub use link::{link, link_all};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::tensor::{partial_trace, Operator};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dir {
    In,
    Out,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Leg {
    pub label: String,
    pub dir: Dir,
    pub step: usize,
}

impl Leg {
    pub fn new(label: impl Into<String>, dir: Dir, step: usize) -> Leg {
        Leg { label: label.into(), dir, step }
    }

    pub fn out(label: impl Into<String>, step: usize) -> Leg {
        Leg::new(label, Dir::Out, step)
    }

    pub fn input(label: impl Into<String>, step: usize) -> Leg {
        Leg::new(label, Dir::In, step)
    }
}

/// Legs alternating out/in from a direction list, advancing the time step
/// each time an `Out` leg follows an `In` leg.
pub fn alternating_legs(labels: &[&str], dirs: &[Dir]) -> Vec<Leg> {
    let mut step = 1;
    let mut prev: Option<Dir> = None;
    labels
        .iter()
        .zip(dirs)
        .map(|(l, &d)| {
            if prev == Some(Dir::In) && d == Dir::Out {
                step += 1;
            }
            prev = Some(d);
            Leg::new(*l, d, step)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comb {
    op: Operator,
    legs: Vec<Leg>,
}

impl Comb {
    /// Checks that the legs name exactly the operator's subsystems and that
    /// the operator is Hermitian. Causality is checked by [`verify_causality`].
    pub fn new(op: Operator, legs: Vec<Leg>) -> Result<Comb> {
        if legs.len() != op.labels().len() {
            return Err(Error::invalid(format!("{} legs for {} subsystems", legs.len(), op.labels().len())));
        }
        for leg in &legs {
            if !op.has_label(&leg.label) {
                return Err(Error::invalid(format!("leg {} is not a subsystem of the operator", leg.label)));
            }
            if leg.step == 0 {
                return Err(Error::invalid("time steps start at 1"));
            }
        }
        let tol = Tolerances::default();
        let res = op.hermiticity_residual();
        if res > tol.hermiticity * op.max_abs().max(1.0) {
            return Err(Error::NotHermitian { residual: res });
        }
        Ok(Comb { op, legs })
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    pub fn leg(&self, label: &str) -> Option<&Leg> {
        self.legs.iter().find(|l| l.label == label)
    }

    /// Legs in temporal order; within a time step outputs precede inputs.
    pub fn ordered_legs(&self) -> Vec<&Leg> {
        let mut v: Vec<&Leg> = self.legs.iter().collect();
        v.sort_by_key(|l| (l.step, matches!(l.dir, Dir::In)));
        v
    }

    /// Product of the dimensions of the `In` legs.
    pub fn expected_trace(&self) -> f64 {
        self.legs
            .iter()
            .filter(|l| l.dir == Dir::In)
            .map(|l| self.op.dim_of(&l.label).unwrap() as f64)
            .product()
    }

    /// Multiply the operator by a positive constant.
    pub fn scaled(&self, s: f64) -> Comb {
        Comb { op: self.op.scale(s), legs: self.legs.clone() }
    }

    /// The same comb with its operator replaced (labels must match).
    pub fn with_op(&self, op: Operator) -> Result<Comb> {
        Comb::new(op, self.legs.clone())
    }
}

/// Choi operator of the measurement `rho -> tr(E rho)`, i.e. `E^T`.
pub fn effect_choi(effect: &Operator) -> Operator {
    effect.transpose()
}

/// Condition a comb on what happens at one leg.
///
/// On an `Out` leg `effect` is a POVM element `E` and the result is
/// `comb * E^T = tr_X[(E (x) 1) comb]`. On an `In` leg `effect` is the state
/// fed into the process and enters the link product directly. The result is
/// not renormalised; its trace carries the outcome weight.
pub fn condition(c: &Comb, leg: &str, effect: &Operator) -> Result<Operator> {
    let l = c.leg(leg).ok_or_else(|| Error::invalid(format!("comb has no leg {leg}")))?;
    if effect.labels().len() != 1 || effect.labels()[0] != leg {
        return Err(Error::invalid(format!("effect must act on the single subsystem {leg}")));
    }
    if effect.dim() != c.op.dim_of(leg)? {
        return Err(Error::dim(format!("effect dimension does not match leg {leg}")));
    }
    let tol = Tolerances::default();
    let e = effect.eigenvalues()?;
    let scale = effect.max_abs().max(1.0);
    if e[0] < -tol.psd * scale {
        return Err(Error::NotPositive { min_eig: e[0] });
    }
    match l.dir {
        Dir::In => {
            if (effect.real_trace() - 1.0).abs() > 1e-9 {
                return Err(Error::invalid("state fed into an input leg must have unit trace"));
            }
            link(&c.op, effect)
        }
        Dir::Out => {
            if e[e.len() - 1] > 1.0 + tol.psd {
                return Err(Error::invalid("POVM element exceeds the identity"));
            }
            link(&c.op, &effect_choi(effect))
        }
    }
}

/// Probability of a sequence of instrument outcomes: the link product of
/// the comb with the Choi operators of every outcome, which together must
/// cover each leg exactly once.
pub fn born_probability(c: &Comb, instruments: &[Operator]) -> Result<f64> {
    let mut covered: Vec<&str> = Vec::new();
    for m in instruments {
        for l in m.labels() {
            if c.leg(l).is_none() {
                return Err(Error::invalid(format!("instrument acts on {l}, which is not a leg")));
            }
            if covered.contains(&l.as_str()) {
                return Err(Error::invalid(format!("leg {l} covered twice")));
            }
            covered.push(l);
        }
    }
    if covered.len() != c.legs.len() {
        return Err(Error::invalid("instruments must cover every leg"));
    }
    let mut acc = c.op.clone();
    for m in instruments {
        acc = link(&acc, m)?;
    }
    let p = acc.trace();
    if p.im.abs() > 1e-9 * p.re.abs().max(1.0) {
        return Err(Error::Numerical(format!("probability has imaginary part {:.3e}", p.im)));
    }
    Ok(p.re)
}

/// Conditional operators `K^{a|x}` for several POVMs on one leg, together
/// with the channel they all sum to.
#[derive(Debug, Clone)]
pub struct Assemblage {
    /// `elements[x][a]`.
    pub elements: Vec<Vec<Operator>>,
    pub reference: Operator,
}

impl Assemblage {
    pub fn settings(&self) -> usize {
        self.elements.len()
    }

    pub fn outcomes(&self, x: usize) -> usize {
        self.elements[x].len()
    }

    /// `sum_a K^{a|x}`.
    pub fn marginal(&self, x: usize) -> Result<Operator> {
        let mut acc = self.elements[x][0].clone();
        for k in &self.elements[x][1..] {
            acc = acc.add(k)?;
        }
        Ok(acc)
    }

    /// Largest deviation of any `sum_a K^{a|x}` from the reference channel.
    pub fn no_signalling_residual(&self) -> Result<f64> {
        let mut worst = 0.0f64;
        for x in 0..self.settings() {
            worst = worst.max(self.marginal(x)?.distance(&self.reference)?);
        }
        Ok(worst)
    }
}

/// `K^{a|x} = comb * (E^{a|x})^T` for POVMs `povms[x][a]` on leg `leg`.
pub fn build_assemblage(c: &Comb, leg: &str, povms: &[Vec<Operator>]) -> Result<Assemblage> {
    if povms.is_empty() {
        return Err(Error::invalid("no measurement settings"));
    }
    let mut elements = Vec::with_capacity(povms.len());
    for (x, povm) in povms.iter().enumerate() {
        if povm.is_empty() {
            return Err(Error::invalid(format!("setting {x} has no outcomes")));
        }
        let mut sum = povm[0].clone();
        for e in &povm[1..] {
            sum = sum.add(e)?;
        }
        let id = Operator::identity(sum.dims().to_vec(), sum.labels().to_vec())?;
        if sum.distance(&id)? > 1e-9 {
            return Err(Error::invalid(format!("setting {x} does not sum to the identity")));
        }
        let mut row = Vec::with_capacity(povm.len());
        for e in povm {
            row.push(condition(c, leg, e)?);
        }
        elements.push(row);
    }
    let reference = partial_trace(&c.op, &[leg])?;
    Ok(Assemblage { elements, reference })
}

/// Trace out a list of labels from a comb's operator.
pub fn marginal(c: &Comb, traced: &[&str]) -> Result<Operator> {
    partial_trace(&c.op, traced)
}
