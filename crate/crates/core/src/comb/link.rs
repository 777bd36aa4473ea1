use crate::error::{Error, Result};
use crate::tensor::{permute_subsystems, real, CMat, Operator};

/// Link product `F * G = tr_y[(F (x) 1_z)(G^{T_y} (x) 1_x)]`, contracting the
/// labels `y` the two operators share. With no shared labels this is the
/// tensor product. The result carries the labels of `a` followed by those of `b`.
pub fn link(a: &Operator, b: &Operator) -> Result<Operator> {
    let shared: Vec<&str> = a
        .labels()
        .iter()
        .filter(|l| b.has_label(l))
        .map(String::as_str)
        .collect();
    for l in &shared {
        if a.dim_of(l)? != b.dim_of(l)? {
            return Err(Error::dim(format!("label {l} has different dimensions in the two factors")));
        }
    }
    let xs: Vec<&str> = a.labels().iter().map(String::as_str).filter(|l| !shared.contains(l)).collect();
    let zs: Vec<&str> = b.labels().iter().map(String::as_str).filter(|l| !shared.contains(l)).collect();

    let fa: Vec<&str> = xs.iter().chain(&shared).copied().collect();
    let gb: Vec<&str> = shared.iter().chain(&zs).copied().collect();
    let f = permute_subsystems(a, &fa)?;
    let g = permute_subsystems(b, &gb)?;
    let dx: usize = xs.iter().map(|l| a.dim_of(l).unwrap()).product();
    let dy: usize = shared.iter().map(|l| a.dim_of(l).unwrap()).product();
    let dz: usize = zs.iter().map(|l| b.dim_of(l).unwrap()).product();

    // R[(x z),(x' z')] = sum_{y y'} F[(x y),(x' y')] G[(y z),(y' z')]
    let fm = f.matrix();
    let gm = g.matrix();
    let fhat = CMat::from_fn(dx * dx, dy * dy, |r, c| {
        let (x, xp) = (r / dx, r % dx);
        let (y, yp) = (c / dy, c % dy);
        fm[(x * dy + y, xp * dy + yp)]
    });
    let ghat = CMat::from_fn(dy * dy, dz * dz, |r, c| {
        let (y, yp) = (r / dy, r % dy);
        let (z, zp) = (c / dz, c % dz);
        gm[(y * dz + z, yp * dz + zp)]
    });
    let rhat = fhat * ghat;
    let n = dx * dz;
    let out = CMat::from_fn(n, n, |r, c| {
        let (x, z) = (r / dz, r % dz);
        let (xp, zp) = (c / dz, c % dz);
        rhat[(x * dx + xp, z * dz + zp)]
    });
    let dims = xs
        .iter()
        .map(|l| a.dim_of(l).unwrap())
        .chain(zs.iter().map(|l| b.dim_of(l).unwrap()))
        .collect();
    let labels: Vec<&str> = xs.iter().chain(&zs).copied().collect();
    Operator::new(dims, labels, out)
}

/// Left-to-right fold of [`link`].
pub fn link_all(ops: &[&Operator]) -> Result<Operator> {
    let mut acc = Operator::scalar(real(1.0));
    for op in ops {
        acc = link(&acc, op)?;
    }
    Ok(acc)
}
