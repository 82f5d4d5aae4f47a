//! Transfer cocycles `A(x) = [[E − V_w(x), −1], [1, 0]]` over a base map,
//! renormalised Lyapunov exponents, finite-n subharmonic approximants, the
//! rotated-Jacobian scan and a cone-field hyperbolicity certificate.

use crate::bounds;
use crate::dynamics::{BaseMap, KickFunction, MapForm, MapSpec, TorusPoint};
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::linalg::{Mat2, Scalar, C64};
use std::f64::consts::{PI, TAU};

/// The x-dependent potential before the spectral parameter is applied.
#[derive(Clone, Debug, PartialEq)]
pub enum Potential {
    /// `λ cos x`; with parameter w it becomes `λ (w⁻¹ e^{ix} + w e^{−ix}) / 2`.
    Cos,
    /// `−λ f'(x)`, so that E = 2 reproduces the Jacobian of the twist map.
    KickDerivative(KickFunction),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Form {
    A,
    /// `B(w) = w A(w)`, polynomial in w for the cos potential.
    B,
}

#[derive(Clone, Debug)]
pub struct Cocycle2 {
    pub e: C64,
    pub lambda: f64,
    pub potential: Potential,
    pub w: C64,
    pub base: BaseMap,
}

/// One cosine harmonic `amp · cos(m x + phase)` of a potential.
#[derive(Clone, Copy, Debug)]
struct CosTerm {
    m: u32,
    amp: f64,
    phase: f64,
}

impl Cocycle2 {
    /// Schrödinger cocycle with potential `λ cos x` at energy E.
    pub fn cos(e: f64, lambda: f64, base: BaseMap) -> Self {
        Cocycle2 { e: C64::new(e, 0.0), lambda, potential: Potential::Cos, w: C64::new(1.0, 0.0), base }
    }

    /// The derivative cocycle of the twist map `spec` over itself.
    pub fn jacobian(spec: &MapSpec) -> Self {
        let spec = spec.clone().with_form(MapForm::Twist);
        Cocycle2 {
            e: C64::new(spec.e as f64, 0.0),
            lambda: spec.lambda,
            potential: Potential::KickDerivative(spec.kick.clone()),
            w: C64::new(1.0, 0.0),
            base: BaseMap::StandardMap(spec),
        }
    }

    pub fn with_w(mut self, w: C64) -> Self {
        self.w = w;
        self
    }

    pub fn with_e(mut self, e: C64) -> Self {
        self.e = e;
        self
    }

    pub fn with_base(mut self, base: BaseMap) -> Self {
        self.base = base;
        self
    }

    fn terms(&self) -> Vec<CosTerm> {
        match &self.potential {
            Potential::Cos => vec![CosTerm { m: 1, amp: self.lambda, phase: 0.0 }],
            Potential::KickDerivative(k) => k
                .harmonics
                .iter()
                .map(|h| CosTerm { m: h.m, amp: -self.lambda * h.amplitude * h.m as f64, phase: h.phase })
                .collect(),
        }
    }

    /// True when every one-step matrix is real: real E and |w| = 1.
    pub fn is_real(&self) -> bool {
        self.e.im == 0.0 && (self.w.norm() - 1.0).abs() < 1e-15
    }

    /// `V_w(x) = V(x + i log w)`.
    pub fn potential_at(&self, x: f64) -> C64 {
        let mut v = C64::new(0.0, 0.0);
        for t in self.terms() {
            let wm = self.w.powi(t.m as i32);
            let th = t.m as f64 * x + t.phase;
            let e = C64::from_polar(1.0, th);
            v += (e / wm + wm * e.conj()) * (t.amp / 2.0);
        }
        v
    }

    /// `w · V_w(x)`, finite at w = 0 for first harmonics.
    pub fn w_potential_at(&self, x: f64) -> C64 {
        let mut v = C64::new(0.0, 0.0);
        for t in self.terms() {
            let m = t.m as i32;
            let th = t.m as f64 * x + t.phase;
            let e = C64::from_polar(1.0, th);
            v += (self.w.powi(1 - m) * e + self.w.powi(1 + m) * e.conj()) * (t.amp / 2.0);
        }
        v
    }

    /// Real potential `V(x − arg w)` when `is_real()`.
    fn real_potential(&self) -> impl Fn(f64) -> f64 + '_ {
        let shift = self.w.arg();
        let terms = self.terms();
        move |x| terms.iter().map(|t| t.amp * (t.m as f64 * (x - shift) + t.phase).cos()).sum()
    }
}

pub fn one_step_matrix(x: f64, cfg: &Cocycle2, form: Form) -> Mat2<C64> {
    let one = C64::new(1.0, 0.0);
    match form {
        Form::A => Mat2::new(cfg.e - cfg.potential_at(x), -one, one, C64::new(0.0, 0.0)),
        Form::B => Mat2::new(cfg.w * cfg.e - cfg.w_potential_at(x), -cfg.w, cfg.w, C64::new(0.0, 0.0)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LyapunovEstimate {
    pub value: f64,
    pub n_steps: usize,
    pub std_error: f64,
    pub seed: TorusPoint,
}

const BLOCKS: usize = 16;

/// Accumulates `Π [[t_k, −1], [1, 0]]` with column-max rescaling; returns
/// (log of the 2-norm of the product, per-block growth rates).
fn accumulate<T: Scalar>(n: usize, renorm_every: usize, mut next_t: impl FnMut() -> T) -> Result<(f64, Vec<f64>)> {
    let mut m = Mat2::<T>::identity();
    let mut log_acc = 0.0;
    let block = (n / BLOCKS).max(1);
    let mut rates = Vec::with_capacity(BLOCKS + 1);
    let mut last = 0.0;
    let mut last_k = 0;
    for k in 1..=n {
        m = m.lmul_transfer(next_t());
        if k % renorm_every == 0 || k == n {
            let s = m.max_col_norm();
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::NonFinite(format!("product norm {} after {} steps (renorm_every = {})", s, k, renorm_every)));
            }
            m = m.scale(1.0 / s);
            log_acc += s.ln();
        }
        if k % block == 0 || k == n {
            let cur = log_acc + m.norm2().ln();
            if k > last_k {
                rates.push((cur - last) / (k - last_k) as f64);
            }
            last = cur;
            last_k = k;
        }
    }
    let total = log_acc + m.norm2().ln();
    if !total.is_finite() {
        return Err(Error::NonFinite("accumulated log-norm".into()));
    }
    Ok((total, rates))
}

fn std_error(rates: &[f64]) -> f64 {
    let k = rates.len();
    if k < 2 {
        return 0.0;
    }
    let mean = rates.iter().sum::<f64>() / k as f64;
    let var = rates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
    (var / k as f64).sqrt()
}

/// Lyapunov exponent `(1/n) log ||A^n(p0)||` along the base orbit of `p0`.
pub fn lyapunov_orbit(cfg: &Cocycle2, p0: TorusPoint, n: usize, renorm_every: usize) -> Result<LyapunovEstimate> {
    if n == 0 || renorm_every == 0 || renorm_every > n {
        return Err(Error::InvalidArgument(format!("need n >= renorm_every >= 1 (n = {}, renorm_every = {})", n, renorm_every)));
    }
    let (total, rates) = if cfg.is_real() {
        // fused loop for the Jacobian cocycle of a plain-sine twist map
        let fused = match (&cfg.potential, &cfg.base) {
            (Potential::KickDerivative(k), BaseMap::StandardMap(s))
                if k.is_plain_sin() && s.kick.is_plain_sin() && s.form == MapForm::Twist && s.lambda == cfg.lambda && cfg.w == C64::new(1.0, 0.0) =>
            {
                Some((s.e as f64, s.lambda))
            }
            _ => None,
        };
        if let Some((e_map, lam)) = fused {
            let e = cfg.e.re;
            let (mut x, mut y) = (p0.x, p0.y);
            accumulate::<f64>(n, renorm_every, || {
                let (s, c) = x.sin_cos();
                let t = e + lam * c;
                let nx = crate::dynamics::wrap(e_map * x - y + lam * s);
                y = x;
                x = nx;
                t
            })?
        } else {
            let v = cfg.real_potential();
            let e = cfg.e.re;
            let mut p = p0;
            accumulate::<f64>(n, renorm_every, || {
                let t = e - v(p.x);
                p = cfg.base.step(p);
                t
            })?
        }
    } else {
        let mut p = p0;
        accumulate::<C64>(n, renorm_every, || {
            let t = cfg.e - cfg.potential_at(p.x);
            p = cfg.base.step(p);
            t
        })?
    };
    Ok(LyapunovEstimate { value: total / n as f64, n_steps: n, std_error: std_error(&rates), seed: p0 })
}

#[derive(Clone, Debug)]
pub struct GridAverage {
    pub g: usize,
    /// Row-major over (iy, ix); `None` marks a cell that failed.
    pub cells: Vec<Option<LyapunovEstimate>>,
    pub mean: f64,
    pub invalid: usize,
    /// Sorted valid values; the empirical CDF at v is the fraction ≤ v.
    pub sorted: Vec<f64>,
}

impl GridAverage {
    pub fn cdf(&self, v: f64) -> f64 {
        if self.sorted.is_empty() {
            return 0.0;
        }
        let k = self.sorted.partition_point(|&s| s <= v);
        k as f64 / self.sorted.len() as f64
    }

    /// Fraction of valid cells with |value| < eps.
    pub fn atom_at_zero(&self, eps: f64) -> f64 {
        if self.sorted.is_empty() {
            return 0.0;
        }
        self.sorted.iter().filter(|v| v.abs() < eps).count() as f64 / self.sorted.len() as f64
    }

    pub fn std_error_mean(&self) -> f64 {
        let k = self.sorted.len();
        if k < 2 {
            return 0.0;
        }
        let var = self.sorted.iter().map(|v| (v - self.mean).powi(2)).sum::<f64>() / (k - 1) as f64;
        (var / k as f64).sqrt()
    }
}

/// Cell centres `((i + 1/2) / g · 2π, (j + 1/2) / g · 2π)`, row-major in j.
pub fn grid_seeds(g: usize) -> Vec<TorusPoint> {
    let h = TAU / g as f64;
    let mut out = Vec::with_capacity(g * g);
    for j in 0..g {
        for i in 0..g {
            out.push(TorusPoint { x: (i as f64 + 0.5) * h, y: (j as f64 + 0.5) * h });
        }
    }
    out
}

pub fn grid_lyapunov(cfg: &Cocycle2, g: usize, n: usize, renorm_every: usize, exec: Exec) -> Result<GridAverage> {
    if g < 2 {
        return Err(Error::InvalidArgument("grid size must be at least 2".into()));
    }
    if n == 0 || renorm_every == 0 || renorm_every > n {
        return Err(Error::InvalidArgument("need n >= renorm_every >= 1".into()));
    }
    let seeds = grid_seeds(g);
    let cells: Vec<Option<LyapunovEstimate>> =
        exec::map_slice(exec, &seeds, |&p| lyapunov_orbit(cfg, p, n, renorm_every).ok());
    Ok(summarize(g, cells))
}

pub fn summarize(g: usize, cells: Vec<Option<LyapunovEstimate>>) -> GridAverage {
    let mut sorted: Vec<f64> = cells.iter().flatten().map(|e| e.value).collect();
    let invalid = cells.len() - sorted.len();
    // sequential sum in cell order, independent of the thread count
    let mean = if sorted.is_empty() { f64::NAN } else { sorted.iter().sum::<f64>() / sorted.len() as f64 };
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    GridAverage { g, cells, mean, invalid, sorted }
}

/// `log |[M^n]_{11}|` along the orbit of p, with M the one-step matrix.
fn log_entry11(cfg: &Cocycle2, p0: TorusPoint, n: usize, form: Form) -> f64 {
    let mut m = Mat2::<C64>::identity();
    let mut log_acc = 0.0;
    let mut p = p0;
    for k in 1..=n {
        m = one_step_matrix(p.x, cfg, form).mul(&m);
        p = cfg.base.step(p);
        if k % 16 == 0 || k == n {
            let s = m.max_col_norm();
            if s == 0.0 || !s.is_finite() {
                return if s == 0.0 { f64::NEG_INFINITY } else { f64::NAN };
            }
            m = m.scale(1.0 / s);
            log_acc += s.ln();
        }
    }
    m.0[0][0].norm().ln() + log_acc
}

/// `(1/n) log |[M^n(w)]_{11}|` at one seed; a vanishing entry is retried once
/// with the seed moved by half a grid cell `h`.
pub fn mu_n_point(cfg: &Cocycle2, p: TorusPoint, n: usize, form: Form, h: f64) -> Result<f64> {
    let v = log_entry11(cfg, p, n, form);
    if v.is_finite() {
        return Ok(v / n as f64);
    }
    let q = TorusPoint::new(p.x + h / 2.0, p.y + h / 2.0);
    let v = log_entry11(cfg, q, n, form);
    if v.is_finite() {
        Ok(v / n as f64)
    } else if v.is_nan() {
        Err(Error::NonFinite(format!("[M^n]_11 at {:?}", p)))
    } else {
        Err(Error::LogOfZero(format!("[M^n]_11 vanishes at {:?} and at the shifted seed", p)))
    }
}

/// Grid average of `(1/n) log |[M^n(w)]_{11}|`.
pub fn mu_n_subharmonic(cfg: &Cocycle2, w: C64, n: usize, g: usize, form: Form, exec: Exec) -> Result<f64> {
    if n == 0 || g == 0 {
        return Err(Error::InvalidArgument("n and g must be positive".into()));
    }
    let cfg = cfg.clone().with_w(w);
    let h = TAU / g as f64;
    let seeds = grid_seeds(g);
    let vals = exec::map_slice(exec, &seeds, |&p| mu_n_point(&cfg, p, n, form, h));
    let mut s = 0.0;
    for v in vals {
        s += v?;
    }
    Ok(s / seeds.len() as f64)
}

/// Grid average of `(1/n) log ||A^n||` for fixed n (no limit taken).
pub fn mean_log_norm(cfg: &Cocycle2, n: usize, g: usize, exec: Exec) -> Result<f64> {
    let cells = exec::map_slice(exec, &grid_seeds(g), |&p| lyapunov_orbit(cfg, p, n, n.min(16)).map(|e| e.value));
    let mut s = 0.0;
    for v in &cells {
        s += v.clone()?;
    }
    Ok(s / cells.len() as f64)
}

/// `R(e^{iβ}) = [[cos β, sin β], [−sin β, cos β]]`.
pub fn herman_rotation(beta: f64) -> Mat2<f64> {
    let (s, c) = beta.sin_cos();
    Mat2::new(c, s, -s, c)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConeWitness {
    /// Direction of the cone axis in the real plane.
    pub axis: f64,
    pub half_angle: f64,
    /// Largest image-to-input aperture ratio over the sample.
    pub ratio: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConeResult {
    pub uniform: bool,
    pub witness: Option<ConeWitness>,
}

#[derive(Clone, Debug)]
pub struct ConeOptions {
    pub margin: f64,
    pub half_angles: Vec<f64>,
    pub axes: usize,
}

impl Default for ConeOptions {
    fn default() -> Self {
        ConeOptions { margin: 0.05, half_angles: (0..10).map(|k| PI / 4.0 / 2f64.powi(k)).collect(), axes: 180 }
    }
}

/// Aperture of the image of the disc cone `{(1, η): |η| ≤ r}` under M, in
/// the same coordinates; infinite if the cone meets the kernel direction.
pub fn cone_image_radius(m: &Mat2<C64>, r: f64) -> f64 {
    let a = m.0[0][0];
    let b = m.0[0][1] * r;
    let c = m.0[1][0];
    let d = m.0[1][1] * r;
    let den = a.norm_sqr() - b.norm_sqr();
    if den <= 0.0 {
        return f64::INFINITY;
    }
    ((c * a.conj() - d * b.conj()).norm() + (c * b - a * d).norm()) / den
}

/// Searches for a constant cone field `{v : angle(v, u) ≤ φ}` (as a disc in
/// projective coordinates) that every matrix maps into the cone of aperture
/// `(1 − margin) φ`. The cone around the first basis vector is the
/// axis-0 candidate.
pub fn cone_test(mats: &[Mat2<C64>], opt: &ConeOptions) -> ConeResult {
    for &phi in &opt.half_angles {
        let r = phi.tan();
        for k in 0..opt.axes.max(1) {
            let th = PI * k as f64 / opt.axes.max(1) as f64;
            let (s, c) = th.sin_cos();
            let q = Mat2::new(C64::new(c, 0.0), C64::new(-s, 0.0), C64::new(s, 0.0), C64::new(c, 0.0));
            let qt = Mat2::new(C64::new(c, 0.0), C64::new(s, 0.0), C64::new(-s, 0.0), C64::new(c, 0.0));
            let mut worst: f64 = 0.0;
            let mut ok = true;
            for m in mats {
                let mm = qt.mul(m).mul(&q);
                let rho = cone_image_radius(&mm, r);
                worst = worst.max(rho / r);
                if !(rho <= (1.0 - opt.margin) * r) {
                    ok = false;
                    break;
                }
            }
            if ok {
                return ConeResult { uniform: true, witness: Some(ConeWitness { axis: th, half_angle: phi, ratio: worst }) };
            }
        }
    }
    ConeResult { uniform: false, witness: None }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermanPoint {
    pub beta: f64,
    pub exponent: f64,
    pub uniform: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct HermanOptions {
    pub grid: usize,
    pub n: usize,
    pub cone_samples: usize,
}

impl Default for HermanOptions {
    fn default() -> Self {
        HermanOptions { grid: 8, n: 20_000, cone_samples: 2000 }
    }
}

/// Exponents of `R(β) · dT` along orbits of the Hamiltonian-form map, where
/// `dT = [[1 + λf'(x), 1], [λf'(x), 1]]`, with a cone certificate per β.
pub fn herman_scan(spec: &MapSpec, betas: &[f64], opt: HermanOptions, exec: Exec) -> Result<Vec<HermanPoint>> {
    let spec = spec.clone().with_form(MapForm::Hamiltonian);
    let seeds = grid_seeds(opt.grid);
    let sample = {
        let mut pts = Vec::with_capacity(opt.cone_samples);
        let per = (opt.cone_samples + seeds.len() - 1) / seeds.len();
        for &s in &seeds {
            let mut p = s;
            for _ in 0..per {
                pts.push(p);
                p = spec.step(p);
            }
        }
        pts.truncate(opt.cone_samples);
        pts
    };
    exec::map_slice(exec, betas, |&beta| {
        let r = herman_rotation(beta);
        let mut total = 0.0;
        for &s in &seeds {
            let mut p = s;
            let mut m = Mat2::<f64>::identity();
            let mut log_acc = 0.0;
            for k in 1..=opt.n {
                m = r.mul(&spec.jacobian(p)).mul(&m);
                p = spec.step(p);
                if k % 16 == 0 || k == opt.n {
                    let sc = m.max_col_norm();
                    if !(sc.is_finite() && sc > 0.0) {
                        return Err(Error::NonFinite("rotated Jacobian product".into()));
                    }
                    m = m.scale(1.0 / sc);
                    log_acc += sc.ln();
                }
            }
            total += (log_acc + m.norm2().ln()) / opt.n as f64;
        }
        let mats: Vec<Mat2<C64>> = sample.iter().map(|&p| r.mul(&spec.jacobian(p)).to_c64()).collect();
        let uniform = cone_test(&mats, &ConeOptions::default()).uniform;
        Ok(HermanPoint { beta, exponent: total / seeds.len() as f64, uniform })
    })
    .into_iter()
    .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PesinRegion {
    pub fraction: f64,
    /// Analytic lower bound, when λ exceeds λ₀.
    pub analytic: Option<f64>,
}

pub fn pesin_region_size(grid: &GridAverage, tau: f64, lambda: f64) -> Result<PesinRegion> {
    if tau < 0.0 {
        return Err(Error::InvalidArgument("threshold must be nonnegative".into()));
    }
    let valid = grid.sorted.len();
    let fraction = if valid == 0 { 0.0 } else { grid.sorted.iter().filter(|&&v| v > tau).count() as f64 / valid as f64 };
    Ok(PesinRegion { fraction, analytic: bounds::pesin_lower(lambda).ok() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn one_step_examples() {
        let cfg = Cocycle2::cos(0.0, 0.0, BaseMap::Identity);
        let m = one_step_matrix(0.3, &cfg, Form::A);
        assert_eq!(m, Mat2::new(C64::new(0.0, 0.0), C64::new(-1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)));
        let cfg = Cocycle2::cos(1.3, 3.0, BaseMap::Identity).with_w(C64::new(0.0, 0.0));
        let x = 0.8;
        let b = one_step_matrix(x, &cfg, Form::B);
        let expect = C64::from_polar(1.0, x) * (-1.5);
        assert!((b.0[0][0] - expect).norm() < 1e-15);
        assert!((b.0[0][0].norm() - 1.5).abs() < 1e-15);
        assert_eq!(b.0[0][1].norm() + b.0[1][0].norm() + b.0[1][1].norm(), 0.0);
    }

    #[test]
    fn b_form_is_w_times_a_form() {
        let w = C64::new(0.4, -0.7);
        let cfg = Cocycle2::cos(0.5, 2.5, BaseMap::Identity).with_w(w);
        let a = one_step_matrix(1.1, &cfg, Form::A);
        let b = one_step_matrix(1.1, &cfg, Form::B);
        for i in 0..2 {
            for j in 0..2 {
                assert!((b.0[i][j] - w * a.0[i][j]).norm() < 1e-14);
            }
        }
        assert!((b.det() - w * w).norm() < 1e-13);
    }

    #[test]
    fn w_one_is_lambda_cos() {
        let cfg = Cocycle2::cos(0.0, 4.0, BaseMap::Identity);
        assert!((cfg.potential_at(0.7) - C64::new(4.0 * 0.7f64.cos(), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn kick_derivative_gives_twist_jacobian() {
        let spec = MapSpec::standard(5.0);
        let cfg = Cocycle2::jacobian(&spec);
        let p = TorusPoint::new(0.9, 0.1);
        let a = one_step_matrix(p.x, &cfg, Form::A);
        let j = spec.jacobian(p).to_c64();
        for i in 0..2 {
            for k in 0..2 {
                assert!((a.0[i][k] - j.0[i][k]).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn determinant_one_on_unit_circle() {
        let mut r = crate::rng::stream(1, 0);
        for _ in 0..10_000 {
            let w = C64::from_polar(1.0, r.gen::<f64>() * TAU);
            let cfg = Cocycle2::cos(r.gen::<f64>() * 4.0 - 2.0, 3.0, BaseMap::Identity).with_w(w);
            let d = one_step_matrix(r.gen::<f64>() * TAU, &cfg, Form::A).det();
            assert!((d - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn constant_cocycles() {
        let p = TorusPoint::new(0.3, 0.4);
        let e0 = lyapunov_orbit(&Cocycle2::cos(0.0, 0.0, BaseMap::Identity), p, 10_000, 8).unwrap();
        assert!(e0.value.abs() < 1e-10);
        let e3 = lyapunov_orbit(&Cocycle2::cos(3.0, 0.0, BaseMap::Identity), p, 10_000, 8).unwrap();
        assert!((e3.value - ((3.0 + 5f64.sqrt()) / 2.0).ln()).abs() < 1e-3);
    }

    #[test]
    fn renormalisation_invariance() {
        let cfg = Cocycle2::jacobian(&MapSpec::standard(6.0));
        let p = TorusPoint::new(1.0, 2.0);
        let v: Vec<f64> = [1, 8, 64].iter().map(|&r| lyapunov_orbit(&cfg, p, 4096, r).unwrap().value).collect();
        assert!((v[0] - v[1]).abs() < 1e-6 && (v[0] - v[2]).abs() < 1e-6);
    }

    #[test]
    fn fused_and_generic_paths_agree() {
        let spec = MapSpec::standard(4.0);
        let cfg = Cocycle2::jacobian(&spec);
        let generic = cfg.clone().with_base(BaseMap::Composition(vec![BaseMap::StandardMap(spec)]));
        let p = TorusPoint::new(0.2, 5.0);
        // short orbit: rounding differences grow like e^{n μ}
        let a = lyapunov_orbit(&cfg, p, 16, 8).unwrap().value;
        let b = lyapunov_orbit(&generic, p, 16, 8).unwrap().value;
        assert!((a - b).abs() < 1e-9, "{} {}", a, b);
    }

    #[test]
    fn complex_path_matches_real_path() {
        let cfg = Cocycle2::cos(0.3, 2.5, BaseMap::golden_rotation());
        let p = TorusPoint::new(0.2, 0.0);
        let a = lyapunov_orbit(&cfg, p, 2000, 8).unwrap().value;
        let b = lyapunov_orbit(&cfg.clone().with_e(C64::new(0.3, 1e-300)), p, 2000, 8).unwrap().value;
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn overflow_is_reported() {
        let cfg = Cocycle2::cos(1e6, 0.0, BaseMap::Identity);
        let r = lyapunov_orbit(&cfg, TorusPoint::new(0.0, 0.0), 200, 200);
        assert!(matches!(r, Err(Error::NonFinite(_))));
    }

    #[test]
    fn conjugated_base_with_shifted_argument() {
        let alpha = 0.9;
        let t = BaseMap::golden_rotation();
        let conj = BaseMap::Composition(vec![
            BaseMap::Rotation { alpha },
            t.clone(),
            BaseMap::Rotation { alpha: -alpha },
        ]);
        // shifting the seed by α and the potential by w = e^{iα} leaves the products unchanged
        let base_cfg = Cocycle2::cos(0.0, 2.0, t);
        let shifted = base_cfg.clone().with_base(conj).with_w(C64::from_polar(1.0, alpha));
        let p = TorusPoint::new(0.4, 1.3);
        let a = lyapunov_orbit(&base_cfg, p, 3000, 8).unwrap().value;
        let b = lyapunov_orbit(&shifted, TorusPoint::new(p.x + alpha, p.y), 3000, 8).unwrap().value;
        assert!((a - b).abs() < 1e-6, "{} {}", a, b);
    }

    #[test]
    fn mu_n_at_zero_is_log_half_lambda() {
        for lambda in [3.0, 8.0] {
            let cfg = Cocycle2::cos(0.7, lambda, BaseMap::standard(lambda));
            let v = mu_n_subharmonic(&cfg, C64::new(0.0, 0.0), 50, 10, Form::B, Exec::Sequential).unwrap();
            assert!((v - (lambda / 2.0).ln()).abs() < 1e-10);
        }
    }

    #[test]
    fn mu_one_is_log_two_at_lambda_four() {
        let cfg = Cocycle2::cos(0.0, 4.0, BaseMap::Identity);
        // midpoint rule on a log singularity converges like 1/g
        let v = mu_n_subharmonic(&cfg, C64::new(1.0, 0.0), 1, 2000, Form::A, Exec::Sequential).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-3, "{}", v);
    }

    #[test]
    fn cone_examples() {
        let model = |lambda: f64, eps: f64, k: usize| {
            let mut r = crate::rng::stream(3, k as u64);
            let mut g = || C64::new((r.gen::<f64>() - 0.5) * 2.0 * eps, (r.gen::<f64>() - 0.5) * 2.0 * eps);
            Mat2::new(C64::new(lambda / 2.0, 0.0) + g(), g(), g(), g())
        };
        let opt = ConeOptions { axes: 1, half_angles: vec![PI / 4.0, PI / 8.0], margin: 0.05 };
        let zero: Vec<_> = (0..1000).map(|k| model(3.0, 0.0, k)).collect();
        assert!(cone_test(&zero, &opt).uniform);
        let eps: Vec<_> = (0..1000).map(|k| model(10.0, 0.05, k)).collect();
        let r = cone_test(&eps, &opt);
        assert!(r.uniform);
        let w = r.witness.unwrap();
        assert_eq!(w.axis, 0.0);
        assert_eq!(w.half_angle, PI / 4.0);
        let spec = MapSpec::standard(3.4);
        let mut p = TorusPoint::new(PI + 0.05, PI);
        let mut mats = Vec::new();
        for _ in 0..1000 {
            mats.push(spec.jacobian(p).to_c64());
            p = spec.step(p);
        }
        assert!(!cone_test(&mats, &ConeOptions::default()).uniform);
    }

    #[test]
    fn herman_examples() {
        let spec = MapSpec::standard(10.0);
        let opt = HermanOptions { grid: 4, n: 20_000, cone_samples: 1000 };
        let pts = herman_scan(&spec, &[-PI / 4.0, 0.0], opt, Exec::Sequential).unwrap();
        assert!((pts[0].exponent - 2f64.sqrt().ln()).abs() < 1e-3, "{}", pts[0].exponent);
        assert!(pts[0].uniform);
        assert!(!pts[1].uniform);
    }
}
