//! Periodic Jacobi matrices and their spectra.
//!
//! Scalar convention: `(Lu)_n = a_n u_{n+1} + c_{n−1} u_{n−1} + b_n u_n`, Bloch
//! waves `u_{n+p} = w u_n`, and `Δ(z, w) = det(z − L_per(w))` (monic in z).
//! With this sign `Δ(z, w) = Δ(z) − a w − c/w − b` holds exactly for
//! `a = ∏a_j`, `c = ∏c_j`, `b = −a − c`.

use crate::cocycle::Cocycle2;
use crate::dynamics::{BaseMap, TorusPoint};
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::linalg::{eig, poly, tridiag, CMatrix, Mat2, Mat4, C64};
use std::f64::consts::{PI, TAU};

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicJacobi {
    pub a: Vec<C64>,
    pub b: Vec<C64>,
    pub c: Vec<C64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeltaStructure {
    /// Coefficients of `Δ(z) = det(z − L_per(1))`, ascending, monic.
    pub coeffs: Vec<C64>,
    pub a: C64,
    pub c: C64,
    pub b: C64,
}

impl DeltaStructure {
    pub fn delta(&self, z: C64) -> C64 {
        poly::eval(&self.coeffs, z)
    }

    pub fn delta_zw(&self, z: C64, w: C64) -> C64 {
        self.delta(z) - self.a * w - self.c / w - self.b
    }

    /// `a e^{iθ} + b + c e^{−iθ}`: the ellipse traced by Δ on the spectrum.
    pub fn symbol(&self, theta: f64) -> C64 {
        let w = C64::from_polar(1.0, theta);
        self.a * w + self.b + self.c / w
    }
}

fn finite(v: &[C64]) -> bool {
    v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn poly_mul_linear(p: &[C64], root: C64) -> Vec<C64> {
    // p(z)·(z − root)
    let mut out = vec![C64::new(0.0, 0.0); p.len() + 1];
    for (k, &v) in p.iter().enumerate() {
        out[k + 1] += v;
        out[k] -= v * root;
    }
    out
}

fn poly_sub(p: &[C64], q: &[C64], s: C64) -> Vec<C64> {
    // p − s·q
    let mut out = p.to_vec();
    if out.len() < q.len() {
        out.resize(q.len(), C64::new(0.0, 0.0));
    }
    for (k, &v) in q.iter().enumerate() {
        out[k] -= s * v;
    }
    out
}

/// `D_{i..j}`: determinant polynomial of `z − L` restricted to sites `i..=j`
/// (empty range gives 1).
fn tridiag_det_poly(a: &[C64], b: &[C64], c: &[C64], i: usize, j: isize) -> Vec<C64> {
    let one = vec![C64::new(1.0, 0.0)];
    if j < i as isize {
        return one;
    }
    let mut prev = one;
    let mut cur = poly_mul_linear(&prev, b[i]);
    for k in i + 1..=j as usize {
        let next = poly_sub(&poly_mul_linear(&cur, b[k]), &prev, a[k - 1] * c[k - 1]);
        prev = cur;
        cur = next;
    }
    cur
}

impl PeriodicJacobi {
    pub fn new(a: Vec<C64>, b: Vec<C64>, c: Vec<C64>) -> Result<Self> {
        if b.is_empty() || a.len() != b.len() || c.len() != b.len() {
            return Err(Error::InvalidArgument("a, b, c must have equal positive length".into()));
        }
        if !(finite(&a) && finite(&b) && finite(&c)) {
            return Err(Error::NonFinite("Jacobi coefficients".into()));
        }
        Ok(PeriodicJacobi { a, b, c })
    }

    /// `a_n = c_n = 1`, `b_n = v_n`.
    pub fn schrodinger(v: Vec<C64>) -> Result<Self> {
        let one = vec![C64::new(1.0, 0.0); v.len()];
        Self::new(one.clone(), v, one)
    }

    pub fn p(&self) -> usize {
        self.b.len()
    }

    pub fn is_selfadjoint(&self, tol: f64) -> bool {
        (0..self.p()).all(|n| self.b[n].im.abs() <= tol && (self.a[n] - self.c[n].conj()).norm() <= tol)
    }

    pub fn l_per(&self, w: C64) -> CMatrix {
        let p = self.p();
        let mut m = CMatrix::zeros(p, p);
        for n in 0..p {
            m[(n, n)] += self.b[n];
            let (up, fu) = if n + 1 == p { (0, w) } else { (n + 1, C64::new(1.0, 0.0)) };
            m[(n, up)] += self.a[n] * fu;
            let (dn, fd) = if n == 0 { (p - 1, 1.0 / w) } else { (n - 1, C64::new(1.0, 0.0)) };
            m[(n, dn)] += self.c[dn] * fd;
        }
        m
    }

    pub fn delta_structure(&self) -> DeltaStructure {
        let p = self.p();
        let (a, b, c) = (&self.a, &self.b, &self.c);
        let aprod = a.iter().product::<C64>();
        let cprod = c.iter().product::<C64>();
        let full = tridiag_det_poly(a, b, c, 0, p as isize - 1);
        // cyclic expansion: the corner pair contributes −a_{p−1}c_{p−1} D_{1..p−2}
        let mut coeffs = if p == 1 { full } else { poly_sub(&full, &tridiag_det_poly(a, b, c, 1, p as isize - 2), a[p - 1] * c[p - 1]) };
        coeffs[0] -= aprod + cprod;
        DeltaStructure { coeffs, a: aprod, c: cprod, b: -aprod - cprod }
    }

    /// Upper bound from Polya's lemma for the projected length of the
    /// spectrum onto any line: `4 ((|a| + |c|)/2)^{1/p}`.
    pub fn polya_bound(&self) -> f64 {
        let d = self.delta_structure();
        4.0 * ((d.a.norm() + d.c.norm()) / 2.0).powf(1.0 / self.p() as f64)
    }
}

/// `det(z − L_per(w))` by dense LU; the oracle for the structural identity.
pub fn dense_delta(j: &PeriodicJacobi, z: C64, w: C64) -> C64 {
    let p = j.p();
    let mut m = j.l_per(w).scaled(C64::new(-1.0, 0.0));
    for i in 0..p {
        m[(i, i)] += z;
    }
    m.det()
}

#[derive(Clone, Debug)]
pub struct SpectrumCurves {
    pub thetas: Vec<f64>,
    /// `roots[k][i]`: point of curve i at `thetas[k]`.
    pub roots: Vec<Vec<C64>>,
    /// Samples where two roots came closer than the step of the matching.
    pub near_collisions: usize,
}

impl SpectrumCurves {
    pub fn curves(&self) -> usize {
        self.roots.first().map_or(0, |r| r.len())
    }

    /// `(θ, curve id, z)` for every sample.
    pub fn points(&self) -> impl Iterator<Item = (f64, usize, C64)> + '_ {
        self.thetas.iter().zip(&self.roots).flat_map(|(&t, rs)| rs.iter().enumerate().map(move |(i, &z)| (t, i, z)))
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.points().map(|(_, _, z)| z.im.abs()).fold(0.0, f64::max)
    }

    /// Lebesgue measure of the projection of the sampled curves (as
    /// polylines) onto the line through 0 with direction angle `phi`.
    pub fn projection_measure(&self, phi: f64) -> f64 {
        let rot = C64::from_polar(1.0, -phi);
        let m = self.roots.len();
        let mut iv: Vec<(f64, f64)> = Vec::new();
        for k in 0..m {
            let next = if k + 1 < m { &self.roots[k + 1] } else { &self.roots[0] };
            let cur = &self.roots[k];
            for i in 0..cur.len() {
                let s = (cur[i] * rot).re;
                let t = if k + 1 < m {
                    (next[i] * rot).re
                } else {
                    // closing segment: the curve id need not be preserved over a full turn
                    next.iter().map(|z| (*z * rot).re).min_by(|x, y| (x - s).abs().partial_cmp(&(y - s).abs()).unwrap()).unwrap()
                };
                iv.push((s.min(t), s.max(t)));
            }
        }
        union_length(iv)
    }
}

fn union_length(mut iv: Vec<(f64, f64)>) -> f64 {
    iv.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut total = 0.0;
    let mut cur: Option<(f64, f64)> = None;
    for (a, b) in iv {
        match cur {
            Some((s, e)) if a <= e => cur = Some((s, e.max(b))),
            Some((s, e)) => {
                total += e - s;
                cur = Some((a, b));
            }
            None => cur = Some((a, b)),
        }
    }
    if let Some((s, e)) = cur {
        total += e - s;
    }
    total
}

/// Orders `new` so that entry i continues curve i of `old`: greedy
/// nearest-neighbour over all pairs, shortest first. Returns whether an
/// ambiguous match (two candidates within a factor 2) occurred.
fn match_roots(old: &[C64], new: Vec<C64>) -> (Vec<C64>, bool) {
    let p = old.len();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(p * p);
    for (i, o) in old.iter().enumerate() {
        for (j, z) in new.iter().enumerate() {
            pairs.push(((o - z).norm(), i, j));
        }
    }
    pairs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut out = vec![C64::new(f64::NAN, 0.0); p];
    let (mut used_i, mut used_j) = (vec![false; p], vec![false; p]);
    let mut max_step = 0.0f64;
    for &(d, i, j) in &pairs {
        if !used_i[i] && !used_j[j] {
            used_i[i] = true;
            used_j[j] = true;
            out[i] = new[j];
            max_step = max_step.max(d);
        }
    }
    let mut min_sep = f64::INFINITY;
    for i in 0..p {
        for j in i + 1..p {
            min_sep = min_sep.min((out[i] - out[j]).norm());
        }
    }
    (out, p > 1 && min_sep < 2.0 * max_step)
}

/// Samples the p spectral curves `{z : Δ(z) = a e^{iθ} + b + c e^{−iθ}}` at
/// m angles; roots from the companion matrix.
pub fn spectrum_curves(j: &PeriodicJacobi, m: usize, exec: Exec) -> Result<SpectrumCurves> {
    if m < 64 {
        return Err(Error::InvalidArgument("need at least 64 angle samples".into()));
    }
    let d = j.delta_structure();
    let thetas: Vec<f64> = (0..m).map(|k| TAU * k as f64 / m as f64).collect();
    let raw = exec::map_slice(exec, &thetas, |&t| {
        let mut co = d.coeffs.clone();
        co[0] -= d.symbol(t);
        poly::roots(&co)
    });
    let mut roots: Vec<Vec<C64>> = Vec::with_capacity(m);
    let mut near = 0;
    for r in raw {
        let r = r?;
        match roots.last() {
            None => roots.push(r),
            Some(prev) => {
                let (ordered, amb) = match_roots(prev, r);
                near += amb as usize;
                roots.push(ordered);
            }
        }
    }
    Ok(SpectrumCurves { thetas, roots, near_collisions: near })
}

/// Jacobi operator on `l²(ℤ, ℂ^N)` with k-periodic N×N blocks:
/// `(Lu)_j = a_j u_{j+1} + c_{j−1} u_{j−1} + b_j u_j`.
#[derive(Clone, Debug)]
pub struct BlockJacobi {
    pub n: usize,
    pub a: Vec<CMatrix>,
    pub b: Vec<CMatrix>,
    pub c: Vec<CMatrix>,
}

impl BlockJacobi {
    pub fn new(n: usize, a: Vec<CMatrix>, b: Vec<CMatrix>, c: Vec<CMatrix>) -> Result<Self> {
        let k = b.len();
        if k == 0 || a.len() != k || c.len() != k {
            return Err(Error::InvalidArgument("block sequences must have equal positive length".into()));
        }
        if a.iter().chain(&b).chain(&c).any(|m| m.rows() != n || m.cols() != n) {
            return Err(Error::InvalidArgument(format!("all blocks must be {}×{}", n, n)));
        }
        Ok(BlockJacobi { n, a, b, c })
    }

    pub fn k(&self) -> usize {
        self.b.len()
    }

    /// Direct sum of N scalar periodic Jacobi matrices with a common period.
    pub fn diagonal(parts: &[PeriodicJacobi]) -> Result<Self> {
        let n = parts.len();
        let k = parts.first().map_or(0, |p| p.p());
        if n == 0 || parts.iter().any(|p| p.p() != k) {
            return Err(Error::InvalidArgument("parts must share one period".into()));
        }
        let diag = |f: &dyn Fn(&PeriodicJacobi) -> C64| {
            CMatrix::from_fn(n, n, |r, s| if r == s { f(&parts[r]) } else { C64::new(0.0, 0.0) })
        };
        let (mut a, mut b, mut c) = (Vec::new(), Vec::new(), Vec::new());
        for j in 0..k {
            a.push(diag(&|p| p.a[j]));
            b.push(diag(&|p| p.b[j]));
            c.push(diag(&|p| p.c[j]));
        }
        Self::new(n, a, b, c)
    }

    /// Bloch matrix for `u_{j+k} = w u_j`, of size kN.
    pub fn l_per(&self, w: C64) -> CMatrix {
        let (k, n) = (self.k(), self.n);
        let mut m = CMatrix::zeros(k * n, k * n);
        for j in 0..k {
            let up = (j + 1) % k;
            let fu = if j + 1 == k { w } else { C64::new(1.0, 0.0) };
            let dn = (j + k - 1) % k;
            let fd = if j == 0 { 1.0 / w } else { C64::new(1.0, 0.0) };
            for r in 0..n {
                for s in 0..n {
                    m[(j * n + r, j * n + s)] += self.b[j][(r, s)];
                    m[(j * n + r, up * n + s)] += self.a[j][(r, s)] * fu;
                    m[(j * n + r, dn * n + s)] += self.c[dn][(r, s)] * fd;
                }
            }
        }
        m
    }
}

/// Eigenvalues of `L_per(e^{iθ})` at m equally spaced angles: kN per angle.
pub fn strip_spectrum(bj: &BlockJacobi, m: usize, exec: Exec) -> Result<Vec<(f64, Vec<C64>)>> {
    let thetas: Vec<f64> = (0..m).map(|k| TAU * k as f64 / m as f64).collect();
    exec::map_slice(exec, &thetas, |&t| eig::eigenvalues(&bj.l_per(C64::from_polar(1.0, t))).map(|e| (t, e)))
        .into_iter()
        .collect()
}

/// Product `L⁽¹⁾L⁽²⁾` of `L⁽ᵏ⁾ = τ + τ* + V⁽ᵏ⁾` with potentials of a common
/// period `len`; row n reads
/// `u_{n+2} + a_n u_{n+1} + b_n u_n + c_n u_{n−1} + u_{n−2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductOperator {
    pub v1: Vec<C64>,
    pub v2: Vec<C64>,
}

impl ProductOperator {
    pub fn new(v1: Vec<C64>, v2: Vec<C64>) -> Result<Self> {
        if v1.len() != v2.len() || v1.len() < 2 {
            return Err(Error::InvalidArgument("potentials need equal length ≥ 2".into()));
        }
        Ok(ProductOperator { v1, v2 })
    }

    /// Potentials `V(T_k^n(p_k))` sampled along two orbits.
    pub fn from_orbits(t1: &BaseMap, p1: TorusPoint, v1: &dyn Fn(TorusPoint) -> C64, t2: &BaseMap, p2: TorusPoint, v2: &dyn Fn(TorusPoint) -> C64, len: usize) -> Result<Self> {
        let o1 = crate::dynamics::orbit(p1, t1, len);
        let o2 = crate::dynamics::orbit(p2, t2, len);
        Self::new(o1[..len].iter().map(|&p| v1(p)).collect(), o2[..len].iter().map(|&p| v2(p)).collect())
    }

    pub fn len(&self) -> usize {
        self.v1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v1.is_empty()
    }

    fn at(v: &[C64], n: isize) -> C64 {
        v[n.rem_euclid(v.len() as isize) as usize]
    }

    pub fn a(&self, n: isize) -> C64 {
        Self::at(&self.v1, n) + Self::at(&self.v2, n + 1)
    }
    pub fn b(&self, n: isize) -> C64 {
        Self::at(&self.v1, n) * Self::at(&self.v2, n) + 2.0
    }
    pub fn c(&self, n: isize) -> C64 {
        Self::at(&self.v1, n) + Self::at(&self.v2, n - 1)
    }

    /// Row-assembled operator on periodic vectors of length `len`.
    pub fn apply_periodic(&self, u: &[C64]) -> Vec<C64> {
        let l = u.len() as isize;
        let g = |k: isize| u[k.rem_euclid(l) as usize];
        (0..l).map(|n| g(n + 2) + self.a(n) * g(n + 1) + self.b(n) * g(n) + self.c(n) * g(n - 1) + g(n - 2)).collect()
    }

    /// `L⁽¹⁾(L⁽²⁾u)` on periodic vectors, the composition oracle.
    pub fn apply_factors_periodic(&self, u: &[C64]) -> Vec<C64> {
        let jac = |v: &[C64], u: &[C64]| -> Vec<C64> {
            let l = u.len() as isize;
            let g = |k: isize| u[k.rem_euclid(l) as usize];
            (0..l).map(|n| g(n + 1) + g(n - 1) + Self::at(v, n) * g(n)).collect()
        };
        jac(&self.v1, &jac(&self.v2, u))
    }

    /// Dirichlet truncation to sites `0..n`.
    pub fn dense_truncation(&self, n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |r, s| {
            let (r, s) = (r as isize, s as isize);
            match s - r {
                2 | -2 => C64::new(1.0, 0.0),
                1 => self.a(r),
                0 => self.b(r),
                -1 => self.c(r),
                _ => C64::new(0.0, 0.0),
            }
        })
    }

    /// Bloch matrix on one period, `u_{n+len} = w u_n`.
    pub fn l_per(&self, w: C64) -> CMatrix {
        let l = self.len();
        let mut m = CMatrix::zeros(l, l);
        for r in 0..l {
            for (off, v) in [(-2isize, C64::new(1.0, 0.0)), (-1, self.c(r as isize)), (0, self.b(r as isize)), (1, self.a(r as isize)), (2, C64::new(1.0, 0.0))] {
                let s = r as isize + off;
                let wraps = s.div_euclid(l as isize);
                m[(r, s.rem_euclid(l as isize) as usize)] += v * w.powi(wraps as i32);
            }
        }
        m
    }

    /// Block form on `l²(ℤ, ℂ²)` with `U_j = (u_{2j−1}, u_{2j})`; needs even length.
    pub fn to_block(&self) -> Result<BlockJacobi> {
        if self.len() % 2 != 0 {
            return Err(Error::InvalidArgument("block form needs an even period".into()));
        }
        let k = self.len() / 2;
        let m2 = |a: C64, b: C64, c: C64, d: C64| CMatrix::from_fn(2, 2, |r, s| [[a, b], [c, d]][r][s]);
        let (one, zero) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        let (mut a, mut b, mut c) = (Vec::new(), Vec::new(), Vec::new());
        for j in 0..k as isize {
            let n = 2 * j;
            a.push(m2(one, zero, self.a(n), one));
            b.push(m2(self.b(n - 1), self.a(n - 1), self.c(n), self.b(n)));
            c.push(m2(one, self.c(n + 1), zero, one));
        }
        BlockJacobi::new(2, a, b, c)
    }

    /// One two-site transfer step at even site n: maps
    /// `(u_{n−1}, a_{n−2}u_{n−1} + u_n, u_{n−3}, u_{n−2})` to
    /// `(u_{n+1}, a_n u_{n+1} + u_{n+2}, u_{n−1}, u_n)` for solutions of `Lu = E u`.
    pub fn transfer4(&self, e: C64, n: isize) -> Mat4 {
        let (a1, a2) = (self.a(n - 1), self.a(n - 2));
        let (b1, b0) = (self.b(n - 1), self.b(n));
        let (c1, c0) = (self.c(n - 1), self.c(n));
        let (one, zero) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        Mat4([
            [e - b1 + a1 * a2, -a1, -one, -c1],
            [a2 * (b0 - e) - c0, e - b0, zero, -one],
            [one, zero, zero, zero],
            [-a2, one, zero, zero],
        ])
    }

    /// Product of the two-site steps over one period (`len` even).
    pub fn monodromy4(&self, e: C64) -> Result<Mat4> {
        if self.len() % 2 != 0 {
            return Err(Error::InvalidArgument("monodromy needs an even period".into()));
        }
        let mut m = Mat4::identity();
        for j in 0..(self.len() / 2) as isize {
            m = self.transfer4(e, 2 * j + 2).mul(&m);
        }
        Ok(m)
    }
}

pub fn mat4_to_dense(m: &Mat4) -> CMatrix {
    CMatrix::from_fn(4, 4, |r, s| m.0[r][s])
}

/// Potentials `V_w(x_k)` of a cocycle along the base orbit of `seed`.
pub fn orbit_potential(cfg: &Cocycle2, seed: TorusPoint, n: usize) -> Vec<C64> {
    crate::dynamics::orbit(seed, &cfg.base, n)[..n].iter().map(|p| cfg.potential_at(p.x)).collect()
}

/// Eigenvalues of the Dirichlet truncation of `τ + τ* + diag(v)`;
/// real potentials go to the symmetric tridiagonal solver.
pub fn truncated_eigenvalues(v: &[C64]) -> Result<Vec<C64>> {
    let n = v.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty truncation".into()));
    }
    if v.iter().all(|z| z.im == 0.0) {
        let d: Vec<f64> = v.iter().map(|z| z.re).collect();
        let t = tridiag::symmetric_tridiagonal(&d, &vec![1.0; n - 1], &[])?;
        return Ok(t.values.into_iter().map(|x| C64::new(x, 0.0)).collect());
    }
    if n > eig::MAX_DIM {
        return Err(Error::InvalidArgument(format!("complex truncation size must be in 1..={}", eig::MAX_DIM)));
    }
    let m = CMatrix::from_fn(n, n, |r, s| {
        if r == s {
            v[r]
        } else if r.abs_diff(s) == 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    eig::eigenvalues(&m)
}

/// Eigenvalues of the Dirichlet truncation of a product operator (sites `0..n`).
pub fn truncated_product_eigenvalues(op: &ProductOperator, n: usize) -> Result<Vec<C64>> {
    if n == 0 || n > eig::MAX_DIM {
        return Err(Error::InvalidArgument(format!("truncation size must be in 1..={}", eig::MAX_DIM)));
    }
    eig::eigenvalues(&op.dense_truncation(n))
}

/// x-coordinates along one period of a periodic base starting at `seed`.
pub fn cycle_points(base: &BaseMap, seed: TorusPoint) -> Result<Vec<f64>> {
    let p = base.period().ok_or_else(|| Error::InvalidArgument(format!("base '{}' is not periodic", base.name())))?;
    let mut xs = Vec::with_capacity(p);
    let mut q = seed;
    for _ in 0..p {
        xs.push(q.x);
        q = base.step(q);
    }
    Ok(xs)
}

/// `tr(A_w(x_{p−1}) ⋯ A_w(x_0))` with `A_w(x) = [[E − V_w(x), −1], [1, 0]]`
/// and `V_w(x) = (λ/2)(e^{ix}/w + w e^{−ix})`.
pub fn w_trace(xs: &[f64], e: C64, lambda: f64, w: C64) -> C64 {
    let mut m = Mat2::<C64>::identity();
    for &x in xs {
        let z = C64::from_polar(1.0, x);
        let v = 0.5 * lambda * (z / w + w / z);
        m = m.lmul_transfer(e - v);
    }
    m.trace()
}

/// The 2p roots `w` of `tr(A^p_w) = 2 cos θ`, from the linearized quadratic
/// eigenvalue problem `(w² K₂ + w K₁ + K₀) u = 0` with Bloch phase e^{iθ}.
pub fn periodic_w_roots(xs: &[f64], e: C64, lambda: f64, theta: f64) -> Result<Vec<C64>> {
    let p = xs.len();
    if p == 0 || lambda == 0.0 {
        return Err(Error::InvalidArgument("need p ≥ 1 and λ ≠ 0".into()));
    }
    let zs: Vec<C64> = xs.iter().map(|&x| C64::from_polar(1.0, x)).collect();
    let phase = C64::from_polar(1.0, theta);
    // S_θ − E: Bloch sum of shifts
    let mut k1 = CMatrix::zeros(p, p);
    for n in 0..p {
        k1[(n, n)] -= e;
        let up = (n + 1) % p;
        k1[(n, up)] += if n + 1 == p { phase } else { C64::new(1.0, 0.0) };
        let dn = (n + p - 1) % p;
        k1[(n, dn)] += if n == 0 { phase.conj() } else { C64::new(1.0, 0.0) };
    }
    let mut lin = CMatrix::zeros(2 * p, 2 * p);
    for n in 0..p {
        lin[(n, p + n)] = C64::new(1.0, 0.0);
        // K₂⁻¹K₀ = diag(z²), K₂⁻¹K₁ = diag(2z/λ)(S − E)
        lin[(p + n, n)] = -zs[n] * zs[n];
        for s in 0..p {
            lin[(p + n, p + s)] = -(2.0 * zs[n] / lambda) * k1[(n, s)];
        }
    }
    eig::eigenvalues(&lin)
}

#[derive(Clone, Debug)]
pub struct WSpectrum {
    pub thetas: Vec<f64>,
    pub roots: Vec<Vec<C64>>,
    /// Band count on `|w| = 1` read from the roots at θ = π/2.
    pub bands_on_circle: usize,
    pub bands_off_circle: usize,
}

impl WSpectrum {
    /// `(w, weight)` atoms of the w-density of states (total mass 2).
    pub fn atoms(&self) -> Vec<(C64, f64)> {
        let p = self.roots.first().map_or(1, |r| r.len() / 2).max(1) as f64;
        let unit = 1.0 / (p * self.roots.len() as f64);
        self.roots.iter().flatten().map(|&w| (w, unit)).collect()
    }
}

/// Samples the periodic w-spectrum at m angles (midpoints of `[0, 2π)`).
pub fn periodic_w_spectrum(xs: &[f64], e: C64, lambda: f64, m: usize, exec: Exec) -> Result<WSpectrum> {
    if m == 0 {
        return Err(Error::InvalidArgument("need at least one angle".into()));
    }
    let thetas: Vec<f64> = (0..m).map(|k| TAU * (k as f64 + 0.5) / m as f64).collect();
    let roots: Vec<Vec<C64>> = exec::map_slice(exec, &thetas, |&t| periodic_w_roots(xs, e, lambda, t)).into_iter().collect::<Result<_>>()?;
    let mid = periodic_w_roots(xs, e, lambda, PI / 2.0)?;
    let on = mid.iter().filter(|w| (w.norm() - 1.0).abs() < 1e-8).count();
    Ok(WSpectrum { thetas, bands_on_circle: on, bands_off_circle: mid.len() - on, roots })
}

#[derive(Clone, Debug)]
pub struct WGrid {
    pub re: (f64, f64),
    pub im: (f64, f64),
    pub nx: usize,
    pub ny: usize,
}

impl WGrid {
    pub fn square(half_width: f64, n: usize) -> Self {
        WGrid { re: (-half_width, half_width), im: (-half_width, half_width), nx: n, ny: n }
    }

    pub fn point(&self, i: usize, j: usize) -> C64 {
        let fx = if self.nx > 1 { i as f64 / (self.nx - 1) as f64 } else { 0.5 };
        let fy = if self.ny > 1 { j as f64 / (self.ny - 1) as f64 } else { 0.5 };
        C64::new(self.re.0 + fx * (self.re.1 - self.re.0), self.im.0 + fy * (self.im.1 - self.im.0))
    }

    pub fn spacing(&self) -> f64 {
        ((self.re.1 - self.re.0) / (self.nx.max(2) - 1) as f64).max((self.im.1 - self.im.0) / (self.ny.max(2) - 1) as f64)
    }
}

#[derive(Clone, Debug)]
pub struct WSpectrumField {
    pub grid: WGrid,
    /// Row-major in the imaginary index: `inside[j * nx + i]`.
    pub inside: Vec<bool>,
    /// `(1/p) log ρ(A^p_w)` at each grid point.
    pub exponent: Vec<f64>,
    pub components: usize,
}

/// Marks grid points with `(1/p) log ρ(A^p_w) ≤ tol`, a thickening of
/// `{w : tr(A^p_w) ∈ [−2, 2]}`, and counts 8-connected components.
pub fn w_spectrum_scan(xs: &[f64], e: C64, lambda: f64, grid: WGrid, tol: f64, exec: Exec) -> Result<WSpectrumField> {
    if xs.is_empty() || grid.nx == 0 || grid.ny == 0 {
        return Err(Error::InvalidArgument("empty cycle or grid".into()));
    }
    let p = xs.len() as f64;
    let nx = grid.nx;
    let exponent: Vec<f64> = exec::map_indexed(exec, nx * grid.ny, |k| {
        let w = grid.point(k % nx, k / nx);
        if w.norm() == 0.0 {
            return f64::INFINITY;
        }
        let t = w_trace(xs, e, lambda, w) / 2.0;
        let r = (t + (t * t - 1.0).sqrt()).norm();
        r.max(1.0 / r).ln() / p
    });
    let inside: Vec<bool> = exponent.iter().map(|&v| v <= tol).collect();
    let components = count_components(&inside, nx, grid.ny);
    Ok(WSpectrumField { grid, inside, exponent, components })
}

fn count_components(mask: &[bool], nx: usize, ny: usize) -> usize {
    let mut seen = vec![false; mask.len()];
    let mut count = 0;
    let mut stack = Vec::new();
    for s in 0..mask.len() {
        if !mask[s] || seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        stack.push(s);
        while let Some(k) = stack.pop() {
            let (i, j) = ((k % nx) as isize, (k / nx) as isize);
            for di in -1..=1 {
                for dj in -1..=1 {
                    let (a, b) = (i + di, j + dj);
                    if a < 0 || b < 0 || a >= nx as isize || b >= ny as isize {
                        continue;
                    }
                    let q = b as usize * nx + a as usize;
                    if mask[q] && !seen[q] {
                        seen[q] = true;
                        stack.push(q);
                    }
                }
            }
        }
    }
    count
}
