//! Implicit QL iteration for real symmetric tridiagonal matrices, with
//! optional tracking of selected eigenvector components.

use crate::error::{Error, Result};

pub struct TridiagEigen {
    pub values: Vec<f64>,
    /// `components[r][j]` is entry `rows[r]` of the j-th normalised eigenvector.
    pub components: Vec<Vec<f64>>,
}

/// Eigenvalues (ascending) of the symmetric tridiagonal matrix with diagonal
/// `diag` and off-diagonal `off`, plus the requested eigenvector rows.
pub fn symmetric_tridiagonal(diag: &[f64], off: &[f64], rows: &[usize]) -> Result<TridiagEigen> {
    let n = diag.len();
    if n == 0 {
        return Ok(TridiagEigen { values: vec![], components: vec![vec![]; rows.len()] });
    }
    if off.len() + 1 != n {
        return Err(Error::InvalidArgument("off-diagonal length must be n-1".into()));
    }
    if rows.iter().any(|&r| r >= n) {
        return Err(Error::InvalidArgument("tracked row out of range".into()));
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    let mut z: Vec<Vec<f64>> = rows
        .iter()
        .map(|&r| {
            let mut v = vec![0.0; n];
            v[r] = 1.0;
            v
        })
        .collect();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::EigFail(format!("tridiagonal QL stalled at index {} of {}", l, n)));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut early = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for zr in z.iter_mut() {
                    let t = zr[i + 1];
                    zr[i + 1] = s * zr[i] + c * t;
                    zr[i] = c * zr[i] - s * t;
                }
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap_or(std::cmp::Ordering::Equal));
    let values = idx.iter().map(|&k| d[k]).collect();
    let components = z.iter().map(|zr| idx.iter().map(|&k| zr[k]).collect()).collect();
    Ok(TridiagEigen { values, components })
}
