//! Infeasible-start primal-dual path following with Nesterov-Todd scaling
//! and a Mehrotra predictor-corrector, on real symmetric blocks.

use super::embed::RealProblem;
use super::{RMat, SdpOptions, SdpStatus};
use nalgebra::DVector;

pub(crate) struct RealOut {
    pub x: Vec<RMat>,
    pub y: Vec<f64>,
    pub s: Vec<RMat>,
    pub status: SdpStatus,
    pub iterations: usize,
}

/// NT scaling of one block: `W = G G^T` with `G^{-1} X G^{-T} = G^T S G = diag(lambda)`.
struct Scaling {
    g: RMat,
    ginv: RMat,
    w: RMat,
    lambda: DVector<f64>,
}

fn scaling(x: &RMat, s: &RMat) -> Option<Scaling> {
    let lx = x.clone().cholesky()?.unpack();
    let mt = lx.transpose() * s * &lx;
    let mt = (&mt + mt.transpose()) * 0.5;
    let eig = mt.symmetric_eigen();
    let n = x.nrows();
    if eig.eigenvalues.iter().any(|&v| !(v > 0.0)) {
        return None;
    }
    let q = eig.eigenvectors;
    let q4: Vec<f64> = eig.eigenvalues.iter().map(|v| v.powf(0.25)).collect();
    let mut g = &lx * &q;
    for j in 0..n {
        let f = 1.0 / q4[j];
        g.column_mut(j).scale_mut(f);
    }
    let lx_inv = lx.solve_lower_triangular(&RMat::identity(n, n))?;
    let mut ginv = q.transpose() * lx_inv;
    for i in 0..n {
        let f = q4[i];
        ginv.row_mut(i).scale_mut(f);
    }
    let w = &g * g.transpose();
    let lambda = DVector::from_iterator(n, eig.eigenvalues.iter().map(|v| v.sqrt()));
    Some(Scaling { g, ginv, w, lambda })
}

struct Ops<'a> {
    p: &'a RealProblem,
    /// For each block: `(constraint, position of the block in that row)`.
    by_block: Vec<Vec<(usize, usize)>>,
}

impl<'a> Ops<'a> {
    fn new(p: &'a RealProblem) -> Self {
        let mut by_block = vec![Vec::new(); p.sizes.len()];
        for (i, row) in p.a.iter().enumerate() {
            for (pos, (k, _)) in row.iter().enumerate() {
                by_block[*k].push((i, pos));
            }
        }
        Ops { p, by_block }
    }

    fn a(&self, x: &[RMat]) -> Vec<f64> {
        self.p
            .a
            .iter()
            .map(|row| {
                row.iter()
                    .map(|(k, e)| e.iter().map(|&(r, c, v)| v * x[*k][(r, c)]).sum::<f64>())
                    .sum()
            })
            .collect()
    }

    fn at(&self, y: &[f64]) -> Vec<RMat> {
        let mut out: Vec<RMat> = self.p.sizes.iter().map(|&n| RMat::zeros(n, n)).collect();
        for (i, row) in self.p.a.iter().enumerate() {
            if y[i] == 0.0 {
                continue;
            }
            for (k, e) in row {
                for &(r, c, v) in e {
                    out[*k][(r, c)] += v * y[i];
                }
            }
        }
        out
    }

    /// `M_ij = sum_k tr(A_ik W_k A_jk W_k)`.
    fn schur(&self, sc: &[Scaling]) -> RMat {
        let m = self.p.m();
        let mut mm = RMat::zeros(m, m);
        for (k, list) in self.by_block.iter().enumerate() {
            let w = &sc[k].w;
            let n = w.nrows();
            for (pos, &(i, ri)) in list.iter().enumerate() {
                let ei = &self.p.a[i][ri].1;
                let t = if ei.len() > 2 * n {
                    let mut a = RMat::zeros(n, n);
                    for &(r, c, v) in ei {
                        a[(r, c)] += v;
                    }
                    w * a * w
                } else {
                    let mut t = RMat::zeros(n, n);
                    for &(pp, q, v) in ei {
                        for s in 0..n {
                            let f = v * w[(q, s)];
                            if f != 0.0 {
                                t.column_mut(s).axpy(f, &w.column(pp), 1.0);
                            }
                        }
                    }
                    t
                };
                for &(j, rj) in &list[pos..] {
                    let ej = &self.p.a[j][rj].1;
                    let v: f64 = ej.iter().map(|&(r, c, b)| b * t[(r, c)]).sum();
                    mm[(i, j)] += v;
                    if i != j {
                        mm[(j, i)] += v;
                    }
                }
            }
        }
        mm
    }
}

fn dot(a: &[RMat], b: &[RMat]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn sym(m: &RMat) -> RMat {
    (m + m.transpose()) * 0.5
}

/// Project onto embedded complex matrices `[[A, -B], [B, A]]`.
fn structured(m: &RMat) -> RMat {
    let n = m.nrows() / 2;
    let mut out = sym(m);
    for r in 0..n {
        for c in 0..n {
            let a = 0.5 * (out[(r, c)] + out[(r + n, c + n)]);
            let b = 0.5 * (out[(r + n, c)] - out[(r, c + n)]);
            out[(r, c)] = a;
            out[(r + n, c + n)] = a;
            out[(r + n, c)] = b;
            out[(r, c + n)] = -b;
        }
    }
    out
}

/// Largest step keeping `diag(lambda) + alpha * d` positive semidefinite.
fn max_step(lambda: &DVector<f64>, d: &RMat) -> f64 {
    let n = lambda.len();
    let b = RMat::from_fn(n, n, |i, j| d[(i, j)] / (lambda[i] * lambda[j]).sqrt());
    let b = sym(&b);
    let nu = b.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
    if nu >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / nu
    }
}

struct Direction {
    dx: Vec<RMat>,
    dy: Vec<f64>,
    ds: Vec<RMat>,
}

fn solve_schur(chol: &nalgebra::Cholesky<f64, nalgebra::Dyn>, rhs: Vec<f64>) -> Vec<f64> {
    let v = DVector::from_vec(rhs);
    chol.solve(&v).iter().copied().collect()
}

pub(crate) fn run(p: &RealProblem, opts: &SdpOptions) -> RealOut {
    let ops = Ops::new(p);
    let m = p.m();
    let nb = p.sizes.len();
    let total: usize = p.sizes.iter().sum();
    let bnorm = p.b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let cnorm = p.c.iter().map(|c| c.norm_squared()).sum::<f64>().sqrt();

    // starting point in the spirit of SDPT3's infeasible start
    let mut x = Vec::with_capacity(nb);
    let mut s = Vec::with_capacity(nb);
    for k in 0..nb {
        let n = p.sizes[k] as f64;
        let mut xi = 10f64.max(n.sqrt());
        let mut eta = 10f64.max(n.sqrt()).max(p.c[k].norm());
        for &(i, pos) in &ops.by_block[k] {
            let an: f64 = p.a[i][pos].1.iter().map(|e| e.2 * e.2).sum::<f64>().sqrt();
            xi = xi.max(n * (1.0 + p.b[i].abs()) / (1.0 + an));
            eta = eta.max(an);
        }
        x.push(RMat::identity(p.sizes[k], p.sizes[k]) * xi);
        s.push(RMat::identity(p.sizes[k], p.sizes[k]) * (eta / n.sqrt()).max(1.0));
    }
    let mut y = vec![0.0; m];

    let mut best_merit = f64::INFINITY;
    let mut stall = 0usize;
    let mut status = SdpStatus::MaxIter;
    let mut iterations = 0usize;

    for iter in 0..opts.max_iter {
        iterations = iter;
        let ax = ops.a(&x);
        let rp: Vec<f64> = p.b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let aty = ops.at(&y);
        let rd: Vec<RMat> = (0..nb).map(|k| &p.c[k] - &s[k] - &aty[k]).collect();
        let pobj = dot(&p.c, &x);
        let dobj: f64 = p.b.iter().zip(&y).map(|(b, y)| b * y).sum();
        let xs = dot(&x, &s);
        let mu = xs / total as f64;

        let pinf = rp.iter().map(|v| v * v).sum::<f64>().sqrt() / (1.0 + bnorm);
        let dinf = rd.iter().map(|r| r.norm_squared()).sum::<f64>().sqrt() / (1.0 + cnorm);
        let relgap = (pobj - dobj).abs().max(xs.abs()) / (1.0 + pobj.abs() + dobj.abs());
        let merit = pinf.max(dinf).max(relgap);
        log::trace!("iter {iter}: pobj {pobj:.9e} dobj {dobj:.9e} pinf {pinf:.2e} dinf {dinf:.2e} gap {relgap:.2e}");

        if merit <= opts.tol {
            status = SdpStatus::Optimal;
            break;
        }
        if dobj > opts.infeasibility_bound || -pobj > opts.infeasibility_bound {
            status = SdpStatus::Infeasible;
            break;
        }
        if merit < best_merit * (1.0 - 1e-3) {
            best_merit = merit;
            stall = 0;
        } else {
            stall += 1;
            if stall >= opts.stall_iters {
                break;
            }
        }

        let Some(sc) = (0..nb).map(|k| scaling(&x[k], &s[k])).collect::<Option<Vec<_>>>() else {
            log::debug!("scaling failed at iteration {iter}");
            break;
        };
        let mut mm = ops.schur(&sc);
        let maxdiag = (0..m).map(|i| mm[(i, i)]).fold(0.0f64, f64::max).max(1e-300);
        let mut chol = None;
        let mut reg = 0.0;
        for _ in 0..6 {
            if let Some(c) = mm.clone().cholesky() {
                chol = Some(c);
                break;
            }
            reg = if reg == 0.0 { 1e-14 * maxdiag } else { reg * 100.0 };
            for i in 0..m {
                mm[(i, i)] += reg;
            }
        }
        let Some(chol) = chol else {
            log::debug!("Schur complement factorisation failed at iteration {iter}");
            break;
        };

        let wrdw: Vec<RMat> = (0..nb).map(|k| &sc[k].w * &rd[k] * &sc[k].w).collect();
        let a_wrdw = ops.a(&wrdw);
        let direction = |t: &[RMat]| -> Direction {
            let gtg: Vec<RMat> = (0..nb).map(|k| &sc[k].g * &t[k] * sc[k].g.transpose()).collect();
            let a_gtg = ops.a(&gtg);
            let rhs: Vec<f64> = (0..m).map(|i| rp[i] - a_gtg[i] + a_wrdw[i]).collect();
            let dy = solve_schur(&chol, rhs);
            let atdy = ops.at(&dy);
            let ds: Vec<RMat> = (0..nb).map(|k| sym(&(&rd[k] - &atdy[k]))).collect();
            let dx: Vec<RMat> = (0..nb).map(|k| sym(&(&gtg[k] - &sc[k].w * &ds[k] * &sc[k].w))).collect();
            Direction { dx, dy, ds }
        };
        let steps = |d: &Direction| -> (f64, f64, Vec<RMat>, Vec<RMat>) {
            let mut ap = f64::INFINITY;
            let mut ad = f64::INFINITY;
            let mut dxt = Vec::with_capacity(nb);
            let mut dst = Vec::with_capacity(nb);
            for k in 0..nb {
                let xt = sym(&(&sc[k].ginv * &d.dx[k] * sc[k].ginv.transpose()));
                let st = sym(&(sc[k].g.transpose() * &d.ds[k] * &sc[k].g));
                ap = ap.min(max_step(&sc[k].lambda, &xt));
                ad = ad.min(max_step(&sc[k].lambda, &st));
                dxt.push(xt);
                dst.push(st);
            }
            (ap, ad, dxt, dst)
        };

        // predictor
        let t_aff: Vec<RMat> = sc.iter().map(|c| RMat::from_diagonal(&(-&c.lambda))).collect();
        let aff = direction(&t_aff);
        let (ap, ad, dxt, dst) = steps(&aff);
        let ap = ap.min(1.0);
        let ad = ad.min(1.0);
        let mut xs_aff = 0.0;
        for k in 0..nb {
            let xa = &x[k] + &aff.dx[k] * ap;
            let sa = &s[k] + &aff.ds[k] * ad;
            xs_aff += xa.dot(&sa);
        }
        let mu_aff = xs_aff / total as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // corrector
        let t_cor: Vec<RMat> = (0..nb)
            .map(|k| {
                let lam = &sc[k].lambda;
                let n = lam.len();
                let prod = &dxt[k] * &dst[k];
                let jordan = (&prod + prod.transpose()) * 0.5;
                RMat::from_fn(n, n, |i, j| {
                    let mut rc = -jordan[(i, j)];
                    if i == j {
                        rc += sigma * mu - lam[i] * lam[i];
                    }
                    2.0 * rc / (lam[i] + lam[j])
                })
            })
            .collect();
        let dir = direction(&t_cor);
        let (ap, ad, _, _) = steps(&dir);
        let ap = (opts.step_fraction * ap).min(1.0);
        let ad = (opts.step_fraction * ad).min(1.0);
        for k in 0..nb {
            x[k] += &dir.dx[k] * ap;
            s[k] += &dir.ds[k] * ad;
            x[k] = structured(&x[k]);
            s[k] = structured(&s[k]);
        }
        for i in 0..m {
            y[i] += ad * dir.dy[i];
        }
        iterations = iter + 1;
    }

    RealOut { x, y, s, status, iterations }
}
