use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::{partial_transpose, reduce_to, Operator};

/// A bipartition `first : second` of (some of) an operator's labels, or all
/// bipartitions at once for the GME test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CutSpec {
    Bipartite(Vec<String>, Vec<String>),
    Gme,
}

impl CutSpec {
    pub fn bipartite(first: &[&str], second: &[&str]) -> Result<CutSpec> {
        if first.is_empty() || second.is_empty() {
            return Err(Error::invalid("both sides of a cut must be nonempty"));
        }
        if first.iter().any(|l| second.contains(l)) {
            return Err(Error::invalid("the two sides of a cut overlap"));
        }
        let mut all: Vec<&&str> = first.iter().chain(second).collect();
        all.sort();
        all.dedup();
        if all.len() != first.len() + second.len() {
            return Err(Error::invalid("repeated label in cut"));
        }
        Ok(CutSpec::Bipartite(
            first.iter().map(|s| s.to_string()).collect(),
            second.iter().map(|s| s.to_string()).collect(),
        ))
    }
}

impl FromStr for CutSpec {
    type Err = Error;

    /// `"A:BC"` (single-character labels) or `"A1,A2:B"` (comma separated),
    /// or `"GME"`.
    fn from_str(s: &str) -> Result<CutSpec> {
        if s.eq_ignore_ascii_case("gme") {
            return Ok(CutSpec::Gme);
        }
        let (l, r) = s
            .split_once(':')
            .ok_or_else(|| Error::invalid(format!("cut \"{s}\" must look like A:BC")))?;
        let side = |t: &str| -> Vec<String> {
            if t.contains(',') {
                t.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect()
            } else {
                t.chars().filter(|c| !c.is_whitespace()).map(String::from).collect()
            }
        };
        let (a, b) = (side(l), side(r));
        let a: Vec<&str> = a.iter().map(String::as_str).collect();
        let b: Vec<&str> = b.iter().map(String::as_str).collect();
        CutSpec::bipartite(&a, &b)
    }
}

impl fmt::Display for CutSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CutSpec::Gme => write!(f, "GME"),
            CutSpec::Bipartite(a, b) => {
                let join = |v: &[String]| {
                    if v.iter().all(|x| x.chars().count() == 1) {
                        v.concat()
                    } else {
                        v.join(",")
                    }
                };
                write!(f, "{}:{}", join(a), join(b))
            }
        }
    }
}

/// Smallest eigenvalue of the partial transpose across a bipartite cut, on
/// the unit-trace normalisation of `rho`. Labels not named by the cut are
/// traced out first, so `A:C` on an `ABC` operator tests the `AC` marginal.
pub fn ppt_min_eig(rho: &Operator, cut: &CutSpec) -> Result<f64> {
    let CutSpec::Bipartite(a, b) = cut else {
        return Err(Error::invalid("ppt_min_eig needs a bipartite cut"));
    };
    for l in a.iter().chain(b) {
        if !rho.has_label(l) {
            return Err(Error::invalid(format!("cut names {l}, which is not a subsystem")));
        }
    }
    let kept: Vec<&str> = rho
        .labels()
        .iter()
        .map(String::as_str)
        .filter(|l| a.iter().chain(b).any(|x| x == l))
        .collect();
    let reduced = reduce_to(rho, &kept)?;
    let t = reduced.real_trace();
    if t <= 1e-300 {
        return Err(Error::Numerical("operator has no positive trace to normalise".into()));
    }
    let side: Vec<&str> = a.iter().map(String::as_str).collect();
    let pt = partial_transpose(&reduced.scale(1.0 / t), &side)?;
    pt.min_eigenvalue()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BisepReport {
    /// `|<0...0|rho|1...1>|`.
    pub lhs: f64,
    /// Half the sum over tuples of weight `1..n-1` of `sqrt(rho_II rho_JJ)`
    /// with `J` the complement of `I`.
    pub rhs: f64,
    /// `lhs > rhs + 1e-12`, which certifies GME.
    pub violated: bool,
}

/// Matrix-element criterion for biseparability of `n`-qubit states. The
/// inequality is homogeneous, so no normalisation is applied.
pub fn bisep_inequality(rho: &Operator) -> Result<BisepReport> {
    if rho.dims().iter().any(|&d| d != 2) || rho.dims().len() < 2 {
        return Err(Error::dim("the biseparability inequality needs at least two qubits"));
    }
    let n = rho.dims().len();
    let full = (1usize << n) - 1;
    let m = rho.matrix();
    let lhs = m[(0, full)].norm();
    let mut rhs = 0.0;
    for i in 1..full {
        let j = full ^ i;
        let prod = m[(i, i)].re * m[(j, j)].re;
        rhs += prod.max(0.0).sqrt();
    }
    rhs *= 0.5;
    Ok(BisepReport { lhs, rhs, violated: lhs > rhs + 1e-12 })
}
