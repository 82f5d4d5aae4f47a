//! Polynomial roots through companion-matrix eigenvalues.

use super::{eig, CMatrix, C64};
use crate::error::{Error, Result};

/// Evaluates `Σ coeffs[k] z^k` by Horner's rule.
pub fn eval(coeffs: &[C64], z: C64) -> C64 {
    coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

/// Roots of `Σ coeffs[k] z^k` (ascending coefficients). Trailing zero
/// coefficients are trimmed; a polynomial with all-zero coefficients fails.
pub fn roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::RootFindFail("zero or non-finite polynomial".into()));
    }
    let mut deg = coeffs.len() - 1;
    while coeffs[deg].norm() <= 1e-300 * scale.max(1.0) {
        deg -= 1;
    }
    // roots at the origin
    let mut low = 0;
    while low < deg && coeffs[low].norm() == 0.0 {
        low += 1;
    }
    let mut out = vec![C64::new(0.0, 0.0); low];
    let c = &coeffs[low..=deg];
    let d = c.len() - 1;
    if d == 0 {
        return Ok(out);
    }
    let lead = c[d];
    let mut m = CMatrix::zeros(d, d);
    for j in 0..d {
        m[(0, j)] = -c[d - 1 - j] / lead;
    }
    for i in 1..d {
        m[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    let r = eig::hessenberg_eigenvalues(&m).map_err(|e| Error::RootFindFail(e.to_string()))?;
    out.extend(r);
    Ok(out)
}

/// Ascending coefficients of `Π (z - r_k)`.
pub fn from_roots(rs: &[C64]) -> Vec<C64> {
    let mut p = vec![C64::new(1.0, 0.0)];
    for &r in rs {
        let mut q = vec![C64::new(0.0, 0.0); p.len() + 1];
        for (k, &a) in p.iter().enumerate() {
            q[k + 1] += a;
            q[k] -= a * r;
        }
        p = q;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_unity() {
        let mut c = vec![C64::new(0.0, 0.0); 8];
        c[0] = C64::new(-1.0, 0.0);
        c[7] = C64::new(1.0, 0.0);
        let r = roots(&c).unwrap();
        assert_eq!(r.len(), 7);
        for z in r {
            assert!((z.powu(7) - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn roundtrip_from_roots() {
        let rs = [C64::new(1.0, 2.0), C64::new(-0.5, 0.0), C64::new(0.0, -3.0), C64::new(0.0, 0.0)];
        let p = from_roots(&rs);
        let r = roots(&p).unwrap();
        for z in rs {
            assert!(r.iter().any(|q| (q - z).norm() < 1e-10));
        }
    }
}
