//! Adaptive Gauss-Kronrod (7/15) quadrature and fixed Gauss-Legendre rules.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        rk += WGK[j] * s;
        if j % 2 == 1 {
            rg += WG[j / 2] * s;
        }
    }
    (rk * h, ((rk - rg) * h).abs())
}

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of subintervals.
    pub limit: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { abs_tol: 1e-11, rel_tol: 1e-11, limit: 2000 }
    }
}

/// Globally adaptive integral of `f` over `[a, b]`: the subinterval with the
/// largest error estimate is bisected until the summed estimate meets the
/// tolerance.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opt: QuadOptions) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut parts = vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    loop {
        if !total.is_finite() {
            return Err(Error::QuadratureFail(format!("non-finite integrand on [{}, {}]", a, b)));
        }
        let tol = opt.abs_tol.max(opt.rel_tol * total.abs());
        if err <= tol {
            return Ok(total);
        }
        if parts.len() >= opt.limit {
            return Err(Error::QuadratureFail(format!(
                "error estimate {:e} above tolerance {:e} on [{}, {}] after {} subintervals",
                err, tol, a, b, parts.len()
            )));
        }
        let (k, _) = parts
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, p)| if p.3 > best.1 { (i, p.3) } else { best });
        let (lo, hi, pv, pe) = parts.swap_remove(k);
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            return Err(Error::QuadratureFail(format!("interval [{}, {}] cannot be bisected further", lo, hi)));
        }
        let (l, el) = gk15(&mut f, lo, m);
        let (r, er) = gk15(&mut f, m, hi);
        total += l + r - pv;
        err += el + er - pe;
        parts.push((lo, m, l, el));
        parts.push((m, hi, r, er));
        if parts.len() % 64 == 0 {
            // refresh the running sums against drift
            total = parts.iter().map(|p| p.2).sum();
            err = parts.iter().map(|p| p.3).sum();
        }
    }
}

/// Integral over `[a, b]` split at the given interior break points.
pub fn integrate_split<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, breaks: &[f64], opt: QuadOptions) -> Result<f64> {
    let mut pts = vec![a];
    let mut bs: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    bs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.extend(bs);
    pts.push(b);
    let mut s = 0.0;
    for w in pts.windows(2) {
        s += integrate(&mut f, w[0], w[1], opt)?;
    }
    Ok(s)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite midpoint rule on a periodic interval; spectrally accurate for
/// smooth periodic integrands.
pub fn periodic_mean<F: FnMut(f64) -> f64>(mut f: F, period: f64, n: usize) -> f64 {
    let h = period / n as f64;
    (0..n).map(|k| f((k as f64 + 0.5) * h)).sum::<f64>() / n as f64
}
