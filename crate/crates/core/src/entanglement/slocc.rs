use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::tensor::{kron_all, real, CMat, Operator, StateVector, C64};

/// `(3/4) 1 - |GHZ><GHZ|` on qubits `A, B, C`. Nonnegative on every state in
/// the W class.
pub fn ghz_slocc_witness() -> Operator {
    let mut m = CMat::identity(8, 8) * real(0.75);
    for &(r, c) in &[(0, 0), (0, 7), (7, 0), (7, 7)] {
        m[(r, c)] -= real(0.5);
    }
    Operator::new(vec![2, 2, 2], vec!["A", "B", "C"], m).expect("fixed shape")
}

/// Three-tangle of a pure three-qubit state, `4 |Det|` with `Det` Cayley's
/// hyperdeterminant of the amplitude tensor.
pub fn pure_tangle(psi: &StateVector) -> Result<f64> {
    if psi.dims() != [2, 2, 2] {
        return Err(Error::dim("the three-tangle is defined for three qubits"));
    }
    let n = psi.norm();
    if (n - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!("state is not normalised (norm {n})")));
    }
    let a = |i: usize| psi.amplitude(i);
    let (a000, a001, a010, a011) = (a(0), a(1), a(2), a(3));
    let (a100, a101, a110, a111) = (a(4), a(5), a(6), a(7));
    let sq = |z: C64| z * z;
    let d1 = sq(a000) * sq(a111) + sq(a001) * sq(a110) + sq(a010) * sq(a101) + sq(a100) * sq(a011);
    let d2 = a000 * a111 * a011 * a100
        + a000 * a111 * a101 * a010
        + a000 * a111 * a110 * a001
        + a011 * a100 * a101 * a010
        + a011 * a100 * a110 * a001
        + a101 * a010 * a110 * a001;
    let d3 = a000 * a110 * a101 * a011 + a111 * a001 * a010 * a100;
    let det = d1 - d2 * 2.0 + d3 * 4.0;
    Ok(4.0 * det.norm())
}

/// `A rho A^dag / tr(A rho A^dag)` with `A` the tensor product of the given
/// local filters (identity on parties without one).
pub fn local_filter(rho: &Operator, filters: &[(&str, CMat)]) -> Result<Operator> {
    let tol = Tolerances::default();
    let mut factors = Vec::with_capacity(rho.labels().len());
    for (k, l) in rho.labels().iter().enumerate() {
        let d = rho.dims()[k];
        let m = match filters.iter().find(|f| f.0 == l) {
            Some((_, m)) => {
                if m.nrows() != d || m.ncols() != d {
                    return Err(Error::dim(format!("filter on {l} has the wrong size")));
                }
                let sv = m.singular_values();
                let (max, min) = sv.iter().fold((0.0f64, f64::INFINITY), |(a, b), &s| (a.max(s), b.min(s)));
                if !(min > 0.0) || max / min > tol.filter_condition {
                    return Err(Error::invalid(format!("filter on {l} is singular or badly conditioned")));
                }
                m.clone()
            }
            None => CMat::identity(d, d),
        };
        factors.push(Operator::new(vec![d], vec![l.as_str()], m)?);
    }
    for (l, _) in filters {
        if !rho.has_label(l) {
            return Err(Error::invalid(format!("filter on unknown subsystem {l}")));
        }
    }
    let refs: Vec<&Operator> = factors.iter().collect();
    let a = kron_all(&refs)?;
    let out = rho.conjugate_by(a.matrix())?;
    let t = out.real_trace();
    if t <= 1e-300 {
        return Err(Error::Numerical("filtered operator has zero trace".into()));
    }
    Ok(out.scale(1.0 / t))
}
