//! Comb JSON is Operator JSON plus a `legs` array. Circuit JSON is
//! `{"initial": <Operator>, "steps": [<Operator>, ...], "legs": [...]}`; a
//! step may carry an `inputs` array, otherwise its inputs are the labels
//! that are open wires or input legs at that point.

use std::collections::HashSet;

use serde_json::{json, Value};

use super::channel::{Channel, ChannelKind};
use super::{Circuit, Comb, Dir, Leg};
use crate::error::{Error, Result};
use crate::tensor::Operator;

fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value> {
    v.get(name).ok_or_else(|| Error::invalid(format!("missing field \"{name}\"")))
}

impl Comb {
    pub fn from_json(text: &str) -> Result<Comb> {
        let v: Value = serde_json::from_str(text)?;
        Comb::from_value(&v)
    }

    pub fn from_value(v: &Value) -> Result<Comb> {
        let op: Operator = serde_json::from_value(v.clone())?;
        let legs: Vec<Leg> = serde_json::from_value(field(v, "legs")?.clone())?;
        Comb::new(op, legs)
    }

    pub fn to_value(&self) -> Value {
        let mut v = serde_json::to_value(self.op()).expect("operator serialisation cannot fail");
        v["legs"] = serde_json::to_value(self.legs()).expect("leg serialisation cannot fail");
        v
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("comb serialisation cannot fail")
    }
}

impl Circuit {
    pub fn from_json(text: &str) -> Result<Circuit> {
        let v: Value = serde_json::from_str(text)?;
        Circuit::from_value(&v)
    }

    pub fn from_value(v: &Value) -> Result<Circuit> {
        let initial: Operator = serde_json::from_value(field(v, "initial")?.clone())?;
        let legs: Vec<Leg> = serde_json::from_value(field(v, "legs")?.clone())?;
        let raw = field(v, "steps")?
            .as_array()
            .ok_or_else(|| Error::invalid("\"steps\" must be an array"))?;
        let in_legs: HashSet<&str> =
            legs.iter().filter(|l| l.dir == Dir::In).map(|l| l.label.as_str()).collect();
        let mut live: HashSet<String> = initial.labels().iter().cloned().collect();
        let mut steps = Vec::with_capacity(raw.len());
        for s in raw {
            let op: Operator = serde_json::from_value(s.clone())?;
            let inputs: Vec<String> = match s.get("inputs") {
                Some(list) => serde_json::from_value(list.clone())?,
                None => op
                    .labels()
                    .iter()
                    .filter(|l| live.contains(*l) || in_legs.contains(l.as_str()))
                    .cloned()
                    .collect(),
            };
            let ins: Vec<&str> = inputs.iter().map(String::as_str).collect();
            let ch = Channel::new(op, &ins, ChannelKind::Cptp)?;
            for i in ch.inputs() {
                live.remove(i);
            }
            live.extend(ch.outputs().iter().cloned());
            steps.push(ch);
        }
        Circuit::new(initial, steps, legs)
    }

    pub fn to_value(&self) -> Value {
        let steps: Vec<Value> = self
            .steps()
            .iter()
            .map(|s| {
                let mut v = serde_json::to_value(s.op()).expect("operator serialisation cannot fail");
                v["inputs"] = json!(s.inputs());
                v
            })
            .collect();
        json!({
            "initial": self.initial(),
            "steps": steps,
            "legs": self.legs(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("circuit serialisation cannot fail")
    }
}

impl serde::Serialize for Comb {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_value().serialize(s)
    }
}

impl serde::Serialize for Circuit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_value().serialize(s)
    }
}
