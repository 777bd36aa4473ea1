use serde::Serialize;

use crate::comb::Assemblage;
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::sdp::{solve, HermTerm, SdpOptions, SdpProblem, SdpStatus};
use crate::tensor::{CMat, Operator, C64};

/// Most deterministic strategies the search enumerates.
const MAX_STRATEGIES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SteeringVerdict {
    /// A local hidden model `K^{a|x} = sum_l D_l(a|x) K^l` with `K^l >= 0` exists.
    Unsteerable,
    Steerable,
}

#[derive(Debug, Clone, Serialize)]
pub struct SteeringReport {
    pub verdict: SteeringVerdict,
    /// Largest `t` with `K^l >= t 1` for every hidden element, on the
    /// assemblage normalised to unit total trace. A model exists iff
    /// `t >= -margin`.
    pub margin: f64,
    pub strategies: usize,
    pub status: SdpStatus,
    /// Hidden elements `K^l` (in the input's normalisation) when a model exists.
    pub model: Option<Vec<Operator>>,
}

/// Deterministic response functions: `strategies[l][x]` is the outcome
/// assigned to setting `x`.
fn strategies(outcomes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &n in outcomes {
        let mut next = Vec::with_capacity(out.len() * n);
        for s in &out {
            for a in 0..n {
                let mut t = s.clone();
                t.push(a);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// Search for a local hidden model of a channel assemblage.
///
/// Writes `K^l = H^l + (u - 1) 1` with `H^l >= 0`, `u >= 0` and maximises
/// `u` subject to `sum_l D_l(a|x) K^l = K^{a|x}`. The optimum
/// `t = u - 1` is the best uniform positivity margin of the hidden elements;
/// a diverging or infeasible program is read as steerable.
pub fn lhs_feasibility(asm: &Assemblage) -> Result<SteeringReport> {
    let nx = asm.settings();
    if nx == 0 || nx > 4 {
        return Err(Error::invalid("between one and four settings are supported"));
    }
    let outcomes: Vec<usize> = (0..nx).map(|x| asm.outcomes(x)).collect();
    if outcomes.iter().any(|&n| n == 0 || n > 4) {
        return Err(Error::invalid("between one and four outcomes per setting are supported"));
    }
    let lambdas = strategies(&outcomes);
    if lambdas.len() > MAX_STRATEGIES {
        return Err(Error::invalid("too many deterministic strategies"));
    }
    let reference = &asm.reference;
    let total = reference.real_trace();
    if total <= 1e-300 {
        return Err(Error::Numerical("assemblage has zero total weight".into()));
    }
    let template = &asm.elements[0][0];
    let d = template.dim();

    let mut p = SdpProblem::new();
    let blocks: Vec<usize> = (0..lambdas.len()).map(|l| p.add_block(format!("K{l}"), d)).collect();
    let ub = p.add_block("u", 1);
    p.set_objective(ub, CMat::from_element(1, 1, C64::new(-1.0, 0.0)));

    let mut basis = Vec::with_capacity(d * d);
    for u in 0..d {
        basis.push(HermTerm::diagonal(u));
        for v in u + 1..d {
            basis.push(HermTerm::real_pair(u, v));
            basis.push(HermTerm::imag_pair(u, v));
        }
    }
    for x in 0..nx {
        for a in 0..outcomes[x] {
            let k = template.aligned(&asm.elements[x][a])?.scale(1.0 / total);
            let members: Vec<usize> = (0..lambdas.len()).filter(|&l| lambdas[l][x] == a).collect();
            let count = members.len() as f64;
            for e in &basis {
                let tr_e = e.trace_with(&CMat::identity(d, d)).re;
                let mut terms: Vec<(usize, HermTerm)> = members.iter().map(|&l| (blocks[l], e.clone())).collect();
                if tr_e != 0.0 {
                    terms.push((ub, HermTerm::diagonal(0).scaled(count * tr_e)));
                }
                let rhs = e.trace_with(k.matrix()).re + count * tr_e;
                p.add_constraint(terms, rhs);
            }
        }
    }
    let sol = solve(&p, &SdpOptions::default())?;
    let margin_tol = Tolerances::default().steering_margin;
    match sol.status {
        SdpStatus::MaxIter => Err(Error::Solver("steering program did not converge".into())),
        SdpStatus::Infeasible => Ok(SteeringReport {
            verdict: SteeringVerdict::Steerable,
            margin: f64::NEG_INFINITY,
            strategies: lambdas.len(),
            status: sol.status,
            model: None,
        }),
        SdpStatus::Optimal => {
            let t = sol.x[ub][(0, 0)].re - 1.0;
            let unsteerable = t >= -margin_tol;
            let model = if unsteerable {
                let shift = CMat::identity(d, d) * C64::new(t, 0.0);
                let mut v = Vec::with_capacity(lambdas.len());
                for &b in &blocks {
                    v.push(template.with_matrix((&sol.x[b] + &shift) * C64::new(total, 0.0)));
                }
                Some(v)
            } else {
                None
            };
            Ok(SteeringReport {
                verdict: if unsteerable { SteeringVerdict::Unsteerable } else { SteeringVerdict::Steerable },
                margin: t,
                strategies: lambdas.len(),
                status: sol.status,
                model,
            })
        }
    }
}
