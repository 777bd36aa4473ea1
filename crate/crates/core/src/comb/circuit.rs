use std::collections::HashSet;

use super::channel::{Channel, ChannelKind};
use super::link::link;
use super::{Comb, Dir, Leg};
use crate::error::{Error, Result};
use crate::tensor::{partial_trace, permute_subsystems, Operator};

/// An initial system-environment state followed by channels applied in order.
///
/// Wires are identified by label. Every label is produced once (by the
/// initial state or as a channel output) and consumed at most once, except
/// `In` legs, which are never produced and are consumed by exactly one
/// channel. Produced labels that are never consumed must be `Out` legs or are
/// discarded at the end.
#[derive(Debug, Clone)]
pub struct Circuit {
    initial: Operator,
    steps: Vec<Channel>,
    legs: Vec<Leg>,
}

impl Circuit {
    pub fn new(initial: Operator, steps: Vec<Channel>, legs: Vec<Leg>) -> Result<Circuit> {
        let min = initial.min_eigenvalue()?;
        if min < -1e-9 {
            return Err(Error::NotPositive { min_eig: min });
        }
        if (initial.real_trace() - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("initial state must have unit trace"));
        }
        let mut names = HashSet::new();
        for l in &legs {
            if !names.insert(l.label.as_str()) {
                return Err(Error::invalid(format!("leg {} listed twice", l.label)));
            }
        }
        let is_in = |l: &str| legs.iter().any(|g| g.label == l && g.dir == Dir::In);

        let mut live: HashSet<String> = initial.labels().iter().cloned().collect();
        let mut seen: HashSet<String> = live.clone();
        for l in initial.labels() {
            if is_in(l) {
                return Err(Error::invalid(format!("input leg {l} cannot be prepared by the initial state")));
            }
        }
        for (k, step) in steps.iter().enumerate() {
            if step.kind() != ChannelKind::Cptp {
                return Err(Error::invalid(format!("step {k} is not trace preserving")));
            }
            for i in step.inputs() {
                if is_in(i) {
                    if seen.contains(i) {
                        return Err(Error::invalid(format!("input leg {i} consumed twice")));
                    }
                    seen.insert(i.clone());
                } else if !live.remove(i) {
                    return Err(Error::invalid(format!("step {k} consumes {i}, which is not available")));
                }
                let d = step.op().dim_of(i)?;
                if let Some(dd) = dims_seen(&initial, &steps[..k], i) {
                    if dd != d {
                        return Err(Error::dim(format!("wire {i} changes dimension")));
                    }
                }
            }
            for o in step.outputs() {
                if seen.contains(o) || is_in(o) {
                    return Err(Error::invalid(format!("step {k} produces {o}, which already exists")));
                }
                seen.insert(o.clone());
                live.insert(o.clone());
            }
        }
        for l in &legs {
            match l.dir {
                Dir::Out if !live.contains(&l.label) => {
                    return Err(Error::invalid(format!("output leg {} is not an open wire", l.label)));
                }
                Dir::In if !seen.contains(&l.label) => {
                    return Err(Error::invalid(format!("input leg {} is never consumed", l.label)));
                }
                _ => {}
            }
        }
        Ok(Circuit { initial, steps, legs })
    }

    pub fn initial(&self) -> &Operator {
        &self.initial
    }

    pub fn steps(&self) -> &[Channel] {
        &self.steps
    }

    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }
}

fn dims_seen(initial: &Operator, steps: &[Channel], label: &str) -> Option<usize> {
    if let Ok(d) = initial.dim_of(label) {
        return Some(d);
    }
    steps.iter().find_map(|s| s.op().dim_of(label).ok())
}

/// Fold the link product over the initial state and the steps, discard the
/// wires that are not legs and order the result by the leg list.
pub fn compile(circuit: &Circuit) -> Result<Comb> {
    let mut acc = circuit.initial.clone();
    for step in &circuit.steps {
        acc = link(&acc, step.op())?;
    }
    let leftover: Vec<String> = acc
        .labels()
        .iter()
        .filter(|l| circuit.legs.iter().all(|g| &g.label != *l))
        .cloned()
        .collect();
    let leftover: Vec<&str> = leftover.iter().map(String::as_str).collect();
    let acc = partial_trace(&acc, &leftover)?;
    let order: Vec<&str> = circuit.legs.iter().map(|l| l.label.as_str()).collect();
    let acc = permute_subsystems(&acc, &order)?;
    Comb::new(acc.hermitian_part(), circuit.legs.clone())
}
