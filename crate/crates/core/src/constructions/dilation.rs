use crate::comb::{compile, verify_causality, Channel, Circuit, Comb, Dir, Leg};
use crate::error::{Error, Result};
use crate::tensor::{herm_eig, permute_subsystems, real, CMat, Operator, C64};

/// A circuit realising a two-step comb: an initial state on the first
/// output leg and an environment `R`, then an isometry from the input leg
/// and `R` into the last output leg and a discarded system.
#[derive(Debug, Clone)]
pub struct Dilation {
    pub circuit: Circuit,
    /// Rows indexed by (output leg, discarded system), columns by
    /// (input leg, `R`), most significant first.
    pub isometry: CMat,
    pub environment_dim: usize,
    pub discarded_dim: usize,
}

/// Eigenvalues below this fraction of the largest are treated as zero.
const RANK_CUT: f64 = 1e-10;

/// Stinespring dilation of a comb with legs `out, in, out`.
///
/// The comb is purified to `|U>` on the legs and a system `D` of dimension
/// `rank(U)`. Its causal marginal `1_B (x) rho_A` has the purification
/// `(sqrt(rho_A) (x) 1)|Phi~>_{AR} (x) |Phi~>_{BB'}` when `rho_A` has full
/// rank (so `R` copies `A`), and the spectral purification with `dim R =
/// rank(rho_A)` otherwise. Both purify the same operator, so an isometry on
/// the purifying systems maps one to the other; it is read off block by
/// block as `V_b^T = sqrt(rho_A)^+ U_b`.
pub fn dilate(c: &Comb) -> Result<Dilation> {
    let legs = c.ordered_legs();
    let dirs: Vec<Dir> = legs.iter().map(|l| l.dir).collect();
    if dirs != [Dir::Out, Dir::In, Dir::Out] {
        return Err(Error::invalid("dilation needs a two-step comb with legs out, in, out"));
    }
    let report = verify_causality(c)?;
    if !report.is_proper_comb() {
        return Err(Error::invalid(format!(
            "input is not a proper comb (level residual {:.3e}, trace {} expected {})",
            report.max_residual(),
            report.trace,
            report.expected_trace
        )));
    }
    let (a, b, cl) = (legs[0].label.as_str(), legs[1].label.as_str(), legs[2].label.as_str());
    let op = permute_subsystems(c.op(), &[a, b, cl])?;
    let (da, db, dc) = (op.dims()[0], op.dims()[1], op.dims()[2]);

    // purification of the comb: columns (c, d) for each row (a, b)
    let eig = herm_eig(&op)?;
    let top = eig.values.last().copied().unwrap_or(0.0);
    let kept: Vec<usize> = (0..eig.values.len()).filter(|&k| eig.values[k] > RANK_CUT * top).collect();
    let dd = kept.len();
    let m = CMat::from_fn(da * db, dc * dd, |ab, cd| {
        let (ci, di) = (cd / dd, cd % dd);
        let k = kept[di];
        eig.vectors[(ab * dc + ci, k)] * real(eig.values[k].sqrt())
    });

    // first-output marginal and the inverse square root on its support
    let rho_a = crate::tensor::reduce_to(&op, &[a])?.scale(1.0 / db as f64);
    let e = herm_eig(&rho_a)?;
    let rtop = e.values.last().copied().unwrap_or(0.0);
    let support: Vec<usize> = (0..da).filter(|&k| e.values[k] > RANK_CUT * rtop).collect();
    let full_rank = support.len() == da;
    let dr = support.len();
    // initial state psi[a, r] and the left inverse used to recover V
    let (psi, left_inv) = if full_rank {
        let mut sq = CMat::zeros(da, da);
        let mut inv = CMat::zeros(da, da);
        for k in 0..da {
            let v = e.vectors.column(k);
            let s = e.values[k].sqrt();
            sq += &v * v.adjoint() * real(s);
            inv += &v * v.adjoint() * real(1.0 / s);
        }
        // |psi> = sum_{a,r} sqrt(rho)[a, r] |a r>; psi as a matrix is sqrt(rho)
        (sq, inv)
    } else {
        let mut p = CMat::zeros(da, dr);
        let mut inv = CMat::zeros(dr, da);
        for (j, &k) in support.iter().enumerate() {
            let s = e.values[k].sqrt();
            for i in 0..da {
                p[(i, j)] = e.vectors[(i, k)] * real(s);
                inv[(j, i)] = e.vectors[(i, k)].conj() * real(1.0 / s);
            }
        }
        (p, inv)
    };

    // U[(a,b),(c,d)] = sum_r psi[a, r] V[(c,d),(b,r)]  =>  V_b^T = psi^+ U_b
    let mut v = CMat::zeros(dc * dd, db * dr);
    for bi in 0..db {
        let ub = CMat::from_fn(da, dc * dd, |ai, cd| m[(ai * db + bi, cd)]);
        let vt = &left_inv * ub; // dr x (dc dd)
        for r in 0..dr {
            for cd in 0..dc * dd {
                v[(cd, bi * dr + r)] = vt[(r, cd)];
            }
        }
    }
    let defect = crate::tensor::max_abs(&(v.adjoint() * &v - CMat::identity(db * dr, db * dr)));
    if defect > 1e-8 {
        return Err(Error::Numerical(format!("recovered map is not an isometry (residual {defect:.3e})")));
    }
    // polish to an exact isometry (polar factor)
    let v = polar(&v);

    let r_label = fresh_label("R", &[a, b, cl]);
    let initial_vec: Vec<C64> = (0..da * dr).map(|i| psi[(i / dr, i % dr)]).collect();
    let psi_vec = nalgebra::DVector::from_vec(initial_vec);
    let initial = Operator::new(vec![da, dr], vec![a, r_label.as_str()], &psi_vec * psi_vec.adjoint())?;
    let initial = initial.scale(1.0 / initial.real_trace());
    let step = Channel::from_isometry(&v, &[(b, db), (r_label.as_str(), dr)], &[(cl, dc)], dd)?;
    let circuit = Circuit::new(
        initial,
        vec![step],
        vec![Leg::out(a, 1), Leg::input(b, 1), Leg::out(cl, 2)],
    )?;
    Ok(Dilation { circuit, isometry: v, environment_dim: dr, discarded_dim: dd })
}

/// `max |compile(d) - c|`.
pub fn round_trip_residual(c: &Comb, d: &Dilation) -> Result<f64> {
    let back = compile(&d.circuit)?;
    let order: Vec<&str> = c.op().labels().iter().map(String::as_str).collect();
    permute_subsystems(back.op(), &order)?.distance(c.op())
}

fn polar(v: &CMat) -> CMat {
    let svd = v.clone().svd(true, true);
    svd.u.expect("u requested") * svd.v_t.expect("v_t requested")
}

/// `base`, or `base` followed by primes until it is not in `taken`.
pub(crate) fn fresh_label(base: &str, taken: &[&str]) -> String {
    let mut l = base.to_string();
    while taken.contains(&l.as_str()) {
        l.push('\'');
    }
    l
}

/// Entanglement checks on the pieces of a two-step dilation. Each entry is
/// the smallest eigenvalue of a partial transpose at unit trace; a negative
/// value means the piece is entangled.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct DilationAudit {
    /// Initial state across first output : environment.
    pub initial: f64,
    /// `L` with `|0><0|` fed on the input leg: channel environment -> output.
    pub fixed_input: f64,
    /// `L` with `|0><0|` fed on the environment: channel input -> output.
    pub fixed_environment: f64,
    /// `L` conditioned on `|0><0|` at the output: operator on input : environment.
    pub fixed_output: f64,
}

impl DilationAudit {
    /// All four pieces are entangled.
    pub fn all_entangled(&self) -> bool {
        let t = -crate::config::Tolerances::default().psd;
        self.initial < t && self.fixed_input < t && self.fixed_environment < t && self.fixed_output < t
    }
}

/// Evaluate the four checks for a dilation produced by [`dilate`].
pub fn audit(d: &Dilation) -> Result<DilationAudit> {
    use crate::comb::link;
    use crate::entanglement::{ppt_min_eig, CutSpec};
    let legs = d.circuit.legs();
    let (a, b, c) = (legs[0].label.as_str(), legs[1].label.as_str(), legs[2].label.as_str());
    let init = d.circuit.initial();
    let r = init.labels().iter().find(|l| l.as_str() != a).cloned().unwrap_or_default();
    let l = d.circuit.steps()[0].op();
    let zero = |label: &str| -> Result<Operator> {
        let n = l.dim_of(label)?;
        let mut m = CMat::zeros(n, n);
        m[(0, 0)] = real(1.0);
        Operator::new(vec![n], vec![label], m)
    };
    let pt = |op: &Operator, x: &str, y: &str| -> Result<f64> {
        if op.dim_of(x)? == 1 || op.dim_of(y)? == 1 {
            return Ok(0.0);
        }
        ppt_min_eig(op, &CutSpec::bipartite(&[x], &[y])?)
    };
    let initial = if init.labels().len() == 2 { pt(init, a, &r)? } else { 0.0 };
    let fixed_input = pt(&link(l, &zero(b)?)?, c, &r)?;
    let fixed_environment = pt(&link(l, &zero(&r)?)?, c, b)?;
    let fixed_output = pt(&link(l, &zero(c)?)?, b, &r)?;
    Ok(DilationAudit { initial, fixed_input, fixed_environment, fixed_output })
}
