//! Row normalisation, removal of linearly dependent constraints and
//! objective scaling ahead of the interior-point iterations.

use super::embed::RealProblem;
use super::ipm::RealOut;
use super::RMat;
use crate::error::Result;
use std::collections::HashMap;

pub(crate) struct Presolved {
    pub problem: RealProblem,
    /// Original indices of the rows that were kept, in order.
    pub kept: Vec<usize>,
    pub removed: Vec<usize>,
    pub inconsistent: bool,
    row_scale: Vec<f64>,
    b_scale: f64,
    c_scale: f64,
}

const DEPENDENCE_TOL: f64 = 1e-10;

pub(crate) fn presolve(p: &RealProblem) -> Result<Presolved> {
    let m = p.m();
    let mut row_scale = vec![1.0; m];
    let mut a = p.a.clone();
    let mut b = p.b.clone();
    for i in 0..m {
        let norm: f64 = a[i].iter().flat_map(|(_, e)| e.iter()).map(|e| e.2 * e.2).sum::<f64>().sqrt();
        if norm == 0.0 {
            row_scale[i] = 0.0;
            continue;
        }
        row_scale[i] = norm;
        for (_, e) in a[i].iter_mut() {
            for x in e.iter_mut() {
                x.2 /= norm;
            }
        }
        b[i] /= norm;
    }

    let gram = gram_matrix(&a, p.sizes.len());
    let (kept, removed) = independent_rows(&gram, &row_scale);
    let mut inconsistent = false;
    if !removed.is_empty() {
        inconsistent = check_consistency(&gram, &b, &kept, &removed, &row_scale, &p.b);
    }

    let b_kept: Vec<f64> = kept.iter().map(|&i| b[i]).collect();
    // homogeneous in b and C, so rescaling either leaves the iterates unchanged
    let b_scale = positive_or_one(b_kept.iter().fold(0.0f64, |acc, v| acc.max(v.abs())));
    let c_scale = positive_or_one(p.c.iter().fold(0.0f64, |acc, c| acc.max(c.norm())));
    let problem = RealProblem {
        sizes: p.sizes.clone(),
        c: p.c.iter().map(|c| c / c_scale).collect(),
        a: kept.iter().map(|&i| a[i].clone()).collect(),
        b: b_kept.iter().map(|v| v / b_scale).collect(),
    };
    Ok(Presolved { problem, kept, removed, inconsistent, row_scale, b_scale, c_scale })
}

fn positive_or_one(v: f64) -> f64 {
    if v > 0.0 && v.is_finite() {
        v
    } else {
        1.0
    }
}

impl Presolved {
    /// Undo the scaling on an interior-point result. `y` is returned in the
    /// order of the kept rows.
    pub fn unscale(&self, out: &mut RealOut) {
        for x in out.x.iter_mut() {
            *x *= self.b_scale;
        }
        for s in out.s.iter_mut() {
            *s *= self.c_scale;
        }
        for (pos, &i) in self.kept.iter().enumerate() {
            out.y[pos] *= self.c_scale / self.row_scale[i];
        }
    }
}

fn gram_matrix(a: &[Vec<(usize, Vec<(usize, usize, f64)>)>], nblocks: usize) -> RMat {
    let m = a.len();
    let mut by_entry: Vec<HashMap<(usize, usize), Vec<(usize, f64)>>> = vec![HashMap::new(); nblocks];
    for (i, row) in a.iter().enumerate() {
        for (k, e) in row {
            for &(r, c, v) in e {
                by_entry[*k].entry((r, c)).or_default().push((i, v));
            }
        }
    }
    let mut g = RMat::zeros(m, m);
    for map in &by_entry {
        for list in map.values() {
            for &(i, vi) in list {
                for &(j, vj) in list {
                    g[(i, j)] += vi * vj;
                }
            }
        }
    }
    g
}

/// Greedy pivoted Cholesky on the Gram matrix. Rows whose residual norm
/// falls below the tolerance are linearly dependent on the kept ones.
fn independent_rows(g: &RMat, row_scale: &[f64]) -> (Vec<usize>, Vec<usize>) {
    let m = g.nrows();
    let zero_rows: Vec<usize> = (0..m).filter(|&i| row_scale[i] == 0.0).collect();
    if zero_rows.is_empty() {
        if let Some(ch) = g.clone().cholesky() {
            let l = ch.l();
            let min_pivot = (0..m).map(|i| l[(i, i)] * l[(i, i)]).fold(f64::INFINITY, f64::min);
            if min_pivot > DEPENDENCE_TOL {
                return ((0..m).collect(), vec![]);
            }
        }
    }
    let mut d: Vec<f64> = (0..m).map(|i| g[(i, i)]).collect();
    let mut chosen: Vec<usize> = Vec::new();
    let mut cols: Vec<Vec<f64>> = Vec::new();
    let mut active = vec![true; m];
    for &i in &zero_rows {
        active[i] = false;
    }
    loop {
        let mut best = None;
        let mut best_d = DEPENDENCE_TOL;
        for i in 0..m {
            if active[i] && d[i] > best_d {
                best_d = d[i];
                best = Some(i);
            }
        }
        let Some(p) = best else { break };
        let sp = d[p].sqrt();
        let mut col = vec![0.0; m];
        for j in 0..m {
            if !active[j] {
                continue;
            }
            let mut v = g[(j, p)];
            for prev in &cols {
                v -= prev[j] * prev[p];
            }
            col[j] = v / sp;
        }
        for j in 0..m {
            if active[j] {
                d[j] -= col[j] * col[j];
            }
        }
        active[p] = false;
        chosen.push(p);
        cols.push(col);
    }
    chosen.sort_unstable();
    let removed = (0..m).filter(|i| !chosen.contains(i)).collect();
    (chosen, removed)
}

/// A dependent row must have the right-hand side implied by the rows it
/// depends on; otherwise the constraint system has no solution.
fn check_consistency(
    g: &RMat,
    b: &[f64],
    kept: &[usize],
    removed: &[usize],
    row_scale: &[f64],
    b_raw: &[f64],
) -> bool {
    let bmax = b.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    for &j in removed {
        if row_scale[j] == 0.0 {
            if b_raw[j].abs() > 1e-9 * bmax {
                return true;
            }
            continue;
        }
        if kept.is_empty() {
            return true;
        }
        let n = kept.len();
        let gs = RMat::from_fn(n, n, |r, c| g[(kept[r], kept[c])]);
        let rhs = nalgebra::DVector::from_fn(n, |r, _| g[(kept[r], j)]);
        let coef = match gs.clone().cholesky() {
            Some(ch) => ch.solve(&rhs),
            None => match gs.svd(true, true).solve(&rhs, 1e-12) {
                Ok(c) => c,
                Err(_) => return true,
            },
        };
        let implied: f64 = kept.iter().zip(coef.iter()).map(|(&k, c)| b[k] * c).sum();
        if (implied - b[j]).abs() > 1e-8 * bmax {
            return true;
        }
    }
    false
}
