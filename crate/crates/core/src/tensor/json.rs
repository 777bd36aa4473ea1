//! JSON form: `{"dims":[2,2],"labels":["A","B"],"matrix":[[[re,im],...],...]}`.

use super::{CMat, Operator, C64};
use crate::error::Error;
use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize)]
pub(crate) struct OperatorJson {
    dims: Vec<usize>,
    labels: Vec<String>,
    matrix: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<OperatorJson> for Operator {
    type Error = Error;

    fn try_from(j: OperatorJson) -> Result<Self, Error> {
        let n = j.matrix.len();
        if let Some(row) = j.matrix.iter().find(|r| r.len() != n) {
            return Err(Error::dim(format!("matrix is not square: {n} rows, a row of length {}", row.len())));
        }
        let m = CMat::from_fn(n, n, |r, c| C64::new(j.matrix[r][c][0], j.matrix[r][c][1]));
        Operator::new(j.dims, j.labels, m)
    }
}

impl From<&Operator> for OperatorJson {
    fn from(op: &Operator) -> Self {
        let n = op.dim();
        let matrix = (0..n)
            .map(|r| (0..n).map(|c| [op.matrix[(r, c)].re, op.matrix[(r, c)].im]).collect())
            .collect();
        OperatorJson { dims: op.dims.clone(), labels: op.labels.clone(), matrix }
    }
}

impl Serialize for Operator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        OperatorJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Operator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = OperatorJson::deserialize(d)?;
        Operator::try_from(j).map_err(serde::de::Error::custom)
    }
}

impl Operator {
    pub fn from_json(text: &str) -> crate::Result<Operator> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("operator serialisation cannot fail")
    }
}
