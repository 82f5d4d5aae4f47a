//! Eigenvalues of dense complex matrices: diagonal balancing, Householder
//! reduction to upper Hessenberg form, then single-shift implicit QR with
//! Wilkinson shifts. Only eigenvalues are computed.

use super::{CMatrix, C64};
use crate::error::{Error, Result};

pub const MAX_DIM: usize = 600;

#[inline]
fn cabs1(z: C64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Power-of-two diagonal scaling that equalises row and column norms.
fn balance(a: &mut [C64], n: usize) {
    const RADIX: f64 = 2.0;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += cabs1(a[j * n + i]);
                    r += cabs1(a[i * n + j]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let inv = 1.0 / f;
                for j in 0..n {
                    a[i * n + j] *= inv;
                }
                for j in 0..n {
                    a[j * n + i] *= f;
                }
            }
        }
    }
}

fn hessenberg(a: &mut [C64], n: usize) {
    if n < 3 {
        return;
    }
    let mut v = vec![C64::new(0.0, 0.0); n];
    for k in 0..n - 2 {
        let mut norm2 = 0.0;
        for i in k + 1..n {
            norm2 += a[i * n + k].norm_sqr();
        }
        let norm = norm2.sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1) * n + k];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C64::new(1.0, 0.0) };
        let alpha = -phase * norm;
        for i in k + 1..n {
            v[i] = a[i * n + k];
        }
        v[k + 1] -= alpha;
        let vnorm2: f64 = (k + 1..n).map(|i| v[i].norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        // left: A <- (I - beta v v^H) A on rows k+1.., columns k..
        for j in k..n {
            let mut s = C64::new(0.0, 0.0);
            for i in k + 1..n {
                s += v[i].conj() * a[i * n + j];
            }
            s *= beta;
            for i in k + 1..n {
                a[i * n + j] -= v[i] * s;
            }
        }
        // right: A <- A (I - beta v v^H) on columns k+1..
        for i in 0..n {
            let row = &mut a[i * n..(i + 1) * n];
            let mut s = C64::new(0.0, 0.0);
            for j in k + 1..n {
                s += row[j] * v[j];
            }
            s *= beta;
            for j in k + 1..n {
                row[j] -= s * v[j].conj();
            }
        }
        for i in k + 2..n {
            a[i * n + k] = C64::new(0.0, 0.0);
        }
    }
}

/// Unitary rotation `[[c, s], [-conj(s), c]]` mapping `(a, b)` to `(r, 0)`.
#[inline]
fn givens(a: C64, b: C64) -> (f64, C64) {
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    let na = a.norm();
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let nr = na.hypot(nb);
    (na / nr, (a / na) * b.conj() / nr)
}

/// Eigenvalues of an upper Hessenberg matrix (overwritten).
fn hessenberg_qr(h: &mut [C64], n: usize) -> Result<Vec<C64>> {
    let mut eig = vec![C64::new(0.0, 0.0); n];
    if n == 0 {
        return Ok(eig);
    }
    let ulp = f64::EPSILON;
    let small = f64::MIN_POSITIVE * (n as f64) / ulp;
    let max_iter = 60 * n.max(10);
    let mut total_iter = 0usize;
    let mut ihi = n as isize - 1;
    let mut its = 0usize;
    while ihi >= 0 {
        let hi = ihi as usize;
        // locate the bottom of the active block
        let mut l = hi;
        while l > 0 {
            let sub = cabs1(h[l * n + l - 1]);
            if sub <= small {
                break;
            }
            let mut tst = cabs1(h[(l - 1) * n + l - 1]) + cabs1(h[l * n + l]);
            if tst == 0.0 {
                if l >= 2 {
                    tst += h[(l - 1) * n + l - 2].re.abs();
                }
                if l + 1 <= hi {
                    tst += h[(l + 1) * n + l].re.abs();
                }
            }
            if sub <= ulp * tst {
                // Ahues-Tisseur refinement
                let ab = sub.max(cabs1(h[(l - 1) * n + l]));
                let ba = sub.min(cabs1(h[(l - 1) * n + l]));
                let d = h[(l - 1) * n + l - 1] - h[l * n + l];
                let aa = cabs1(h[l * n + l]).max(cabs1(d));
                let bb = cabs1(h[l * n + l]).min(cabs1(d));
                let s = aa + ab;
                if ba * (ab / s) <= small.max(ulp * (bb * (aa / s))) {
                    break;
                }
            }
            l -= 1;
        }
        if l > 0 {
            h[l * n + l - 1] = C64::new(0.0, 0.0);
        }
        if l == hi {
            eig[hi] = h[hi * n + hi];
            ihi -= 1;
            its = 0;
            continue;
        }
        its += 1;
        total_iter += 1;
        if total_iter > max_iter {
            return Err(Error::EigFail(format!(
                "QR did not converge: {} iterations, active block {}..={} of {}",
                total_iter, l, hi, n
            )));
        }
        let shift = if its % 10 == 0 {
            // exceptional shift
            h[hi * n + hi] + C64::new(0.75 * h[hi * n + hi - 1].re.abs(), 0.0)
        } else if its % 10 == 5 {
            h[l * n + l] + C64::new(0.75 * h[(l + 1) * n + l].re.abs(), 0.0)
        } else {
            let a = h[(hi - 1) * n + hi - 1];
            let b = h[(hi - 1) * n + hi];
            let cc = h[hi * n + hi - 1];
            let d = h[hi * n + hi];
            let tr = (a + d) * 0.5;
            let disc = ((a - d) * 0.5 * ((a - d) * 0.5) + b * cc).sqrt();
            let (e1, e2) = (tr + disc, tr - disc);
            if (e1 - d).norm() < (e2 - d).norm() {
                e1
            } else {
                e2
            }
        };
        // implicit single-shift sweep over rows l..=hi
        let (cs, sn) = givens(h[l * n + l] - shift, h[(l + 1) * n + l]);
        apply_rot(h, n, l, l, hi, cs, sn);
        for k in l + 1..hi {
            let (cs, sn) = givens(h[k * n + k - 1], h[(k + 1) * n + k - 1]);
            apply_rot_from(h, n, k, k - 1, l, hi, cs, sn);
            h[(k + 1) * n + k - 1] = C64::new(0.0, 0.0);
        }
    }
    Ok(eig)
}

#[inline]
fn apply_rot(h: &mut [C64], n: usize, k: usize, l: usize, hi: usize, cs: f64, sn: C64) {
    apply_rot_from(h, n, k, k.max(l), l, hi, cs, sn)
}

/// Similarity by the rotation acting on indices k, k+1: rows updated over
/// columns col0..=hi, columns updated over rows l..=min(k+2, hi).
#[inline]
#[allow(clippy::too_many_arguments)]
fn apply_rot_from(h: &mut [C64], n: usize, k: usize, col0: usize, l: usize, hi: usize, cs: f64, sn: C64) {
    let snc = sn.conj();
    for j in col0..=hi {
        let x = h[k * n + j];
        let y = h[(k + 1) * n + j];
        h[k * n + j] = x * cs + sn * y;
        h[(k + 1) * n + j] = -snc * x + y * cs;
    }
    let rmax = (k + 2).min(hi);
    for i in l..=rmax {
        let x = h[i * n + k];
        let y = h[i * n + k + 1];
        h[i * n + k] = x * cs + snc * y;
        h[i * n + k + 1] = -sn * x + y * cs;
    }
}

/// All eigenvalues of a square complex matrix.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    if !m.is_square() {
        return Err(Error::InvalidArgument("eigenvalues of a non-square matrix".into()));
    }
    let n = m.rows();
    if n > MAX_DIM {
        return Err(Error::InvalidArgument(format!("matrix dimension {} exceeds {}", n, MAX_DIM)));
    }
    if m.as_slice().iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NonFinite("matrix entries".into()));
    }
    let mut a = m.as_slice().to_vec();
    balance(&mut a, n);
    hessenberg(&mut a, n);
    hessenberg_qr(&mut a, n)
}

/// Eigenvalues of a matrix already in upper Hessenberg form (for example a
/// companion matrix). Balancing preserves the Hessenberg structure.
pub fn hessenberg_eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    let n = m.rows();
    let mut a = m.as_slice().to_vec();
    balance(&mut a, n);
    hessenberg_qr(&mut a, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        v
    }

    #[test]
    fn diagonal_matrix() {
        let d = [C64::new(3.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.5, -2.0)];
        let m = CMatrix::from_fn(3, 3, |i, j| if i == j { d[i] } else { C64::new(0.0, 0.0) });
        let e = sorted(eigenvalues(&m).unwrap());
        let d = sorted(d.to_vec());
        for (x, y) in e.iter().zip(&d) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn similarity_of_known_spectrum() {
        // upper triangular T with known diagonal, conjugated by a dense matrix
        let n = 12;
        let diag: Vec<C64> = (0..n).map(|k| C64::new(k as f64 - 5.0, (k as f64 * 0.7).sin())).collect();
        let t = CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                diag[i]
            } else if j > i {
                C64::new(((i * 3 + j) % 7) as f64 * 0.3, 0.1)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let s = CMatrix::from_fn(n, n, |i, j| C64::new(if i == j { 3.0 } else { 0.0 } + ((i * j + 1) % 5) as f64 * 0.2, ((i + 2 * j) % 3) as f64 * 0.1));
        let sinv_cols: Vec<Vec<C64>> = (0..n)
            .map(|j| {
                let mut e = vec![C64::new(0.0, 0.0); n];
                e[j] = C64::new(1.0, 0.0);
                s.solve(&e).unwrap()
            })
            .collect();
        let sinv = CMatrix::from_fn(n, n, |i, j| sinv_cols[j][i]);
        let a = s.mul(&t).mul(&sinv);
        let e = eigenvalues(&a).unwrap();
        for d in &diag {
            let best = e.iter().map(|x| (x - d).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-9, "eigenvalue {} missed by {}", d, best);
        }
    }

    #[test]
    fn trace_and_determinant_are_preserved() {
        let n = 40;
        let mut s = 7u64;
        let mut rnd = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        let m = CMatrix::from_fn(n, n, |_, _| C64::new(rnd(), rnd()));
        let e = eigenvalues(&m).unwrap();
        let tr: C64 = e.iter().sum();
        assert!((tr - m.trace()).norm() < 1e-10);
        let (ld, _) = m.log_det();
        let le: f64 = e.iter().map(|z| z.norm().ln()).sum();
        assert!((ld - le).abs() < 1e-8);
    }

    #[test]
    fn jordan_block_is_handled() {
        let n = 6;
        let m = CMatrix::from_fn(n, n, |i, j| if j == i + 1 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
        let e = eigenvalues(&m).unwrap();
        assert!(e.iter().all(|z| z.norm() < 1e-12));
    }
}
