use super::{RMat, SdpProblem};
use crate::tensor::{CMat, C64};
use std::collections::BTreeMap;

/// `[[Re M, -Im M], [Im M, Re M]]`.
pub fn complex_to_real_embedding(m: &CMat) -> RMat {
    let n = m.nrows();
    let mut out = RMat::zeros(2 * n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            let z = m[(r, c)];
            out[(r, c)] = z.re;
            out[(r + n, c + n)] = z.re;
            out[(r + n, c)] = z.im;
            out[(r, c + n)] = -z.im;
        }
    }
    out
}

/// Inverse of [`complex_to_real_embedding`], averaging the two copies.
pub fn real_to_complex(m: &RMat) -> CMat {
    let n = m.nrows() / 2;
    CMat::from_fn(n, n, |r, c| {
        C64::new(
            0.5 * (m[(r, c)] + m[(r + n, c + n)]),
            0.5 * (m[(r + n, c)] - m[(r, c + n)]),
        )
    })
}

/// One constraint restricted to one block: `(row, col, value)` entries.
pub(crate) type Entries = Vec<(usize, usize, f64)>;

/// Real symmetric SDP obtained by embedding every block.
#[derive(Debug, Clone)]
pub(crate) struct RealProblem {
    pub sizes: Vec<usize>,
    pub c: Vec<RMat>,
    /// Per constraint: `(block, entries)`.
    pub a: Vec<Vec<(usize, Entries)>>,
    pub b: Vec<f64>,
}

impl RealProblem {
    pub fn from_complex(p: &SdpProblem) -> RealProblem {
        let sizes: Vec<usize> = p.blocks.iter().map(|b| 2 * b.size).collect();
        let c = p.objective.iter().map(complex_to_real_embedding).collect();
        let mut a = Vec::with_capacity(p.constraints.len());
        let mut b = Vec::with_capacity(p.constraints.len());
        for con in &p.constraints {
            let mut per_block: BTreeMap<usize, BTreeMap<(usize, usize), f64>> = BTreeMap::new();
            for (k, t) in &con.terms {
                let n = p.blocks[*k].size;
                let acc = per_block.entry(*k).or_default();
                for &(r, cc, z) in &t.entries {
                    if z.re != 0.0 {
                        *acc.entry((r, cc)).or_insert(0.0) += z.re;
                        *acc.entry((r + n, cc + n)).or_insert(0.0) += z.re;
                    }
                    if z.im != 0.0 {
                        *acc.entry((r + n, cc)).or_insert(0.0) += z.im;
                        *acc.entry((r, cc + n)).or_insert(0.0) -= z.im;
                    }
                }
            }
            let row: Vec<(usize, Entries)> = per_block
                .into_iter()
                .map(|(k, m)| (k, m.into_iter().filter(|e| e.1 != 0.0).map(|((r, c), v)| (r, c, v)).collect::<Entries>()))
                .filter(|(_, e)| !e.is_empty())
                .collect();
            a.push(row);
            // <emb(A), emb(X)> = 2 tr(AX)
            b.push(2.0 * con.rhs);
        }
        RealProblem { sizes, c, a, b }
    }

    pub fn m(&self) -> usize {
        self.b.len()
    }
}
