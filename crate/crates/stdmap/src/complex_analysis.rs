//! Argument changes of analytic functions, the Jensen formula in a sector,
//! radial argument sums over cube-exchange bases, harmonic continuation
//! series of circle measures, and Harnack lower bounds.
//!
//! Angle integrals use the normalized measure dθ/2π and argument changes are
//! reported in turns (radians / 2π) wherever they enter such integrals.

use crate::dynamics::{BaseMap, TorusPoint};
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::linalg::C64;
use crate::quad::{integrate, QuadOptions};
use std::f64::consts::{FRAC_PI_4, TAU};

/// Relative small-|g| guard for zero detection on a path.
pub const ZERO_GUARD: f64 = 1e-12;
const MAX_DEPTH: u32 = 48;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Path {
    Segment { from: C64, to: C64 },
    /// Counter-clockwise from `start` to `end` (radians) when `end > start`.
    Arc { center: C64, radius: f64, start: f64, end: f64 },
}

impl Path {
    pub fn point(&self, t: f64) -> C64 {
        match *self {
            Path::Segment { from, to } => from + (to - from) * t,
            Path::Arc { center, radius, start, end } => center + C64::from_polar(radius, start + (end - start) * t),
        }
    }

    pub fn circle(center: C64, radius: f64) -> Self {
        Path::Arc { center, radius, start: 0.0, end: TAU }
    }

    pub fn ray(angle: f64, from: f64, to: f64) -> Self {
        Path::Segment { from: C64::from_polar(from, angle), to: C64::from_polar(to, angle) }
    }
}

/// Continuous-branch increment of `arg g` along the path (radians), by
/// adaptive bisection keeping every accepted step below π/4.
pub fn arg_change<F: Fn(C64) -> C64>(g: F, path: &Path, steps: usize) -> Result<f64> {
    let steps = steps.max(4);
    let vals: Vec<C64> = (0..=steps).map(|i| g(path.point(i as f64 / steps as f64))).collect();
    let scale = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if !scale.is_finite() {
        return Err(Error::NonFinite("g is not finite on the path".into()));
    }
    let guard = ZERO_GUARD * scale;
    let mut total = 0.0;
    for i in 0..steps {
        let t0 = i as f64 / steps as f64;
        let t1 = (i + 1) as f64 / steps as f64;
        total += refine(&g, path, t0, t1, vals[i], vals[i + 1], guard, 0)?;
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(C64) -> C64>(g: &F, path: &Path, t0: f64, t1: f64, g0: C64, g1: C64, guard: f64, depth: u32) -> Result<f64> {
    if g0.norm() <= guard || g1.norm() <= guard || !(g0.norm().is_finite() && g1.norm().is_finite()) {
        return Err(Error::ZeroOnPath(format!("|g| below guard near {}", path.point(t0))));
    }
    let tm = 0.5 * (t0 + t1);
    let gm = g(path.point(tm));
    if gm.norm() <= guard {
        return Err(Error::ZeroOnPath(format!("|g| below guard near {}", path.point(tm))));
    }
    let d = (g1 / g0).arg();
    let d1 = (gm / g0).arg();
    let d2 = (g1 / gm).arg();
    if d.abs() < FRAC_PI_4 && d1.abs() < FRAC_PI_4 && d2.abs() < FRAC_PI_4 && (d1 + d2 - d).abs() < 1e-12 {
        return Ok(d);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::ZeroOnPath(format!("argument not resolved near {}", path.point(tm))));
    }
    Ok(refine(g, path, t0, tm, g0, gm, guard, depth + 1)? + refine(g, path, tm, t1, gm, g1, guard, depth + 1)?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sector {
    pub r: f64,
    pub big_r: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl Sector {
    pub fn new(r: f64, big_r: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !(r > 0.0 && r < big_r) || !(alpha < beta && beta <= alpha + TAU + 1e-15) {
            return Err(Error::InvalidArgument("need 0 < r < R and α < β ≤ α + 2π".into()));
        }
        Ok(Sector { r, big_r, alpha, beta })
    }

    /// The k sectors `[2πj/k, 2π(j+1)/k)` of the annulus `r ≤ |z| ≤ R`.
    pub fn partition(r: f64, big_r: f64, k: usize) -> Result<Vec<Sector>> {
        (0..k).map(|j| Sector::new(r, big_r, TAU * j as f64 / k as f64, TAU * (j + 1) as f64 / k as f64)).collect()
    }

    fn arc(&self, t: f64) -> Path {
        Path::Arc { center: C64::new(0.0, 0.0), radius: t, start: self.alpha, end: self.beta }
    }
}

/// Boundary argument changes of g on a sector, in turns. The zero count
/// inside is `outer − inner + ray_start − ray_end`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectorArgs {
    /// Along `|z| = R` from α to β.
    pub outer: f64,
    /// Along `|z| = r` from α to β.
    pub inner: f64,
    /// Along the ray at α from r to R.
    pub ray_start: f64,
    /// Along the ray at β from r to R.
    pub ray_end: f64,
}

impl SectorArgs {
    pub fn angular(&self) -> f64 {
        self.outer - self.inner
    }

    pub fn radial(&self) -> f64 {
        self.ray_start - self.ray_end
    }

    pub fn zero_count(&self) -> f64 {
        self.angular() + self.radial()
    }
}

pub fn sector_args<F: Fn(C64) -> C64>(g: F, s: &Sector, steps: usize) -> Result<SectorArgs> {
    Ok(SectorArgs {
        outer: arg_change(&g, &s.arc(s.big_r), steps)? / TAU,
        inner: arg_change(&g, &s.arc(s.r), steps)? / TAU,
        ray_start: arg_change(&g, &Path::ray(s.alpha, s.r, s.big_r), steps)? / TAU,
        ray_end: arg_change(&g, &Path::ray(s.beta, s.r, s.big_r), steps)? / TAU,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct JensenReport {
    /// `∫_α^β log|g(Re^{iθ})| dθ/2π`.
    pub lhs: f64,
    /// `∫_α^β log|g(re^{iθ})| dθ/2π + ∫_r^R Arg_{γ_t}(g) dt/t`.
    pub rhs: f64,
    pub args: SectorArgs,
}

impl JensenReport {
    pub fn difference(&self) -> f64 {
        self.lhs - self.rhs
    }

    pub fn residual(&self) -> f64 {
        self.difference().abs()
    }
}

fn jensen_opts() -> QuadOptions {
    QuadOptions { abs_tol: 1e-11, rel_tol: 1e-11, limit: 4000 }
}

fn arc_log_mean<F: Fn(C64) -> C64>(g: &F, t: f64, a: f64, b: f64) -> Result<f64> {
    Ok(integrate(|th| g(C64::from_polar(t, th)).norm().ln(), a, b, jensen_opts())? / TAU)
}

/// Both sides of the sector Jensen formula by adaptive quadrature.
pub fn jensen_sector<F: Fn(C64) -> C64>(g: F, s: &Sector, steps: usize) -> Result<JensenReport> {
    let lhs = arc_log_mean(&g, s.big_r, s.alpha, s.beta)?;
    let inner = arc_log_mean(&g, s.r, s.alpha, s.beta)?;
    let mut fail = None;
    let radial = integrate(
        |t| {
            // the arcs through zeros form a finite set; step off them
            let v = arg_change(&g, &s.arc(t), steps).or_else(|e| match e {
                Error::ZeroOnPath(_) => arg_change(&g, &s.arc(t * (1.0 + 1e-9)), steps),
                e => Err(e),
            });
            match v {
                Ok(a) => a / (TAU * t),
                Err(e) => {
                    fail.get_or_insert(e);
                    0.0
                }
            }
        },
        s.r,
        s.big_r,
        jensen_opts(),
    )?;
    if let Some(e) = fail {
        return Err(e);
    }
    Ok(JensenReport { lhs, rhs: inner + radial, args: sector_args(&g, s, steps)? })
}

pub fn jensen_sector_residual<F: Fn(C64) -> C64>(g: F, s: &Sector, steps: usize) -> Result<f64> {
    Ok(jensen_sector(g, s, steps)?.residual())
}

/// Signed classical annulus Jensen difference
/// `∫ log|g(Re^{iθ})| − ∫ log|g(re^{iθ})| − ∫_r^R n(t) dt/t`.
pub fn annulus_jensen_difference<F: Fn(C64) -> C64>(g: F, r: f64, big_r: f64, steps: usize) -> Result<f64> {
    let s = Sector::new(r, big_r, 0.0, TAU)?;
    Ok(jensen_sector(g, &s, steps)?.difference())
}

/// Phase offsets `x_i − x_0` of the base orbit of `seed`, `i < n`.
pub fn orbit_phases(base: &BaseMap, seed: TorusPoint, n: usize) -> Vec<f64> {
    let mut p = seed;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(p.x - seed.x);
        p = base.step(p);
    }
    out
}

/// `[B(z e^{iδ_{n−1}}) ⋯ B(z e^{iδ_0})]_11` with
/// `B(z) = z [[E − λ(z + 1/z)/2, −1], [1, 0]]`, a polynomial in z.
pub fn g_n(phases: &[f64], e: C64, lambda: f64, z: C64) -> C64 {
    let (mut a, mut b, mut c, mut d) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    for &ph in phases {
        let u = z * C64::from_polar(1.0, ph);
        let m11 = e * u - 0.5 * lambda * (u * u + 1.0);
        let m12 = -u;
        let m21 = u;
        let (na, nb) = (m11 * a + m12 * c, m11 * b + m12 * d);
        let (nc, nd) = (m21 * a, m21 * b);
        a = na;
        b = nb;
        c = nc;
        d = nd;
    }
    a
}

#[derive(Clone, Debug)]
pub struct RadialSum {
    /// Seed-averaged radial sum in turns, divided by n.
    pub mean: f64,
    pub per_seed: Vec<f64>,
    /// Seeds whose y had to be shifted off a zero.
    pub perturbed: usize,
}

/// Sum over the k sectors of the annulus `s ≤ |z| ≤ t` of the radial
/// argument changes of the sector functions: in sector j the orbit phases
/// are those of the cell `[2πj/k, 2π(j+1)/k)` at height y. Averaged over
/// `seeds` heights and normalized by n.
#[allow(clippy::too_many_arguments)]
pub fn radial_argument_sum(base: &BaseMap, k: usize, e: C64, lambda: f64, n: usize, annulus: (f64, f64), seeds: usize, exec: Exec) -> Result<RadialSum> {
    let (s, t) = annulus;
    if k == 0 || n == 0 || seeds == 0 || !(s > 0.0 && s < t) {
        return Err(Error::InvalidArgument("need k, n, seeds > 0 and 0 < s < t".into()));
    }
    let h = TAU / k as f64;
    let one = |y: f64| -> Result<f64> {
        let mut sum = 0.0;
        for j in 0..k {
            let ph = orbit_phases(base, TorusPoint::new(h * (j as f64 + 0.5), y), n);
            let g = |z: C64| g_n(&ph, e, lambda, z);
            let a = arg_change(g, &Path::ray(h * j as f64, s, t), 16)?;
            let b = arg_change(g, &Path::ray(h * (j + 1) as f64, s, t), 16)?;
            sum += (a - b) / TAU;
        }
        Ok(sum / n as f64)
    };
    let res = exec::map_indexed(exec, seeds, |l| {
        let dy = TAU / seeds as f64;
        let y = dy * (l as f64 + 0.5);
        match one(y) {
            Ok(v) => Ok((v, false)),
            Err(Error::ZeroOnPath(_)) => one(y + 0.25 * dy).map(|v| (v, true)),
            Err(e) => Err(e),
        }
    });
    let mut per_seed = Vec::with_capacity(seeds);
    let mut perturbed = 0;
    for r in res {
        let (v, p) = r?;
        per_seed.push(v);
        perturbed += p as usize;
    }
    let mean = per_seed.iter().sum::<f64>() / seeds as f64;
    Ok(RadialSum { mean, per_seed, perturbed })
}

/// Fourier coefficients `a_n = ∫ e^{−inx} dk(x)` of a measure on the unit
/// circle, `|n| ≤ n_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleMeasureSeries {
    pub n_max: usize,
    /// `coeffs[n_max + n] = a_n`.
    pub coeffs: Vec<C64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Continuation {
    pub h_plus: C64,
    pub h_minus: C64,
    pub alpha: f64,
}

impl CircleMeasureSeries {
    pub fn from_coeffs(n_max: usize, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != 2 * n_max + 1 {
            return Err(Error::InvalidArgument("need 2·n_max + 1 coefficients".into()));
        }
        Ok(CircleMeasureSeries { n_max, coeffs })
    }

    /// Atoms at `e^{iθ_j}` with weights `w_j`.
    pub fn from_atoms(atoms: &[(f64, f64)], n_max: usize) -> Self {
        let coeffs = (-(n_max as i64)..=n_max as i64)
            .map(|n| atoms.iter().map(|&(th, w)| C64::from_polar(w, -(n as f64) * th)).sum())
            .collect();
        CircleMeasureSeries { n_max, coeffs }
    }

    /// Push-forward of dx/2π under `x ↦ x + φ(x)` (trapezoid rule on
    /// `samples` points, exponentially accurate for smooth φ).
    pub fn from_pushforward<F: Fn(f64) -> f64>(phi: F, n_max: usize, samples: usize) -> Self {
        let xs: Vec<f64> = (0..samples).map(|i| TAU * i as f64 / samples as f64).map(|x| x + phi(x)).collect();
        let atoms: Vec<(f64, f64)> = xs.iter().map(|&t| (t, 1.0 / samples as f64)).collect();
        Self::from_atoms(&atoms, n_max)
    }

    pub fn a(&self, n: i64) -> C64 {
        self.coeffs[(self.n_max as i64 + n) as usize]
    }

    /// Root-test estimate of `limsup |a_{±n}|^{1/n}` from the upper half of
    /// the coefficients.
    pub fn growth(&self, sign: i64) -> f64 {
        let lo = (self.n_max / 2).max(1);
        (lo..=self.n_max).map(|n| self.a(sign * n as i64).norm().powf(1.0 / n as f64)).fold(0.0, f64::max)
    }

    /// `H₋(z) = −Σ_{n≥1} zⁿ a_n / n`, the expansion of `∫ log(z − a) dk` at 0
    /// normalized to vanish there.
    pub fn h_minus(&self, z: C64) -> Result<C64> {
        if z.norm() * self.growth(1) >= 1.0 - 1e-9 && z.norm() > 0.0 {
            return Err(Error::Divergence(format!("expansion at 0 diverges at |z| = {}", z.norm())));
        }
        let mut s = C64::new(0.0, 0.0);
        let mut zn = C64::new(1.0, 0.0);
        for n in 1..=self.n_max {
            zn *= z;
            s -= zn * self.a(n as i64) / n as f64;
        }
        Ok(s)
    }

    /// `H₊(z) = −Σ_{n≥1} z^{−n} a_{−n} / n`, the expansion at ∞ after removing
    /// `log z`.
    pub fn h_plus(&self, z: C64) -> Result<C64> {
        if self.growth(-1) >= z.norm() * (1.0 - 1e-9) {
            return Err(Error::Divergence(format!("expansion at ∞ diverges at |z| = {}", z.norm())));
        }
        let zi = 1.0 / z;
        let mut s = C64::new(0.0, 0.0);
        let mut zn = C64::new(1.0, 0.0);
        for n in 1..=self.n_max {
            zn *= zi;
            s -= zn * self.a(-(n as i64)) / n as f64;
        }
        Ok(s)
    }

    /// `H₋`, `H₊` where they converge, and the argument change α(z) of
    /// `∫ log(z − a) dk` from 0 to z along the segment.
    pub fn continuation(&self, z: C64) -> Result<Continuation> {
        let r = z.norm();
        if r <= 1.0 {
            let hm = self.h_minus(z)?;
            let hp = if r > 0.0 { self.h_plus(z).unwrap_or(C64::new(f64::NAN, f64::NAN)) } else { C64::new(f64::NAN, f64::NAN) };
            Ok(Continuation { h_plus: hp, h_minus: hm, alpha: hm.im })
        } else {
            let hp = self.h_plus(z)?;
            let u = z / r;
            let boundary = self.h_minus(u)? - self.h_plus(u)?;
            let hm = self.h_minus(z).unwrap_or(C64::new(f64::NAN, f64::NAN));
            Ok(Continuation { h_plus: hp, h_minus: hm, alpha: hp.im + boundary.im })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HarnackVariant {
    A,
    B,
}

/// Lower bound on `min_{|z|=1} h` for harmonic h with `h(0) = 0` and
/// `h ≤ C` on `|z| ≤ r`.
pub fn harnack_bound(c: f64, r: f64, variant: HarnackVariant) -> Result<f64> {
    if !(r > 1.0) {
        return Err(Error::DomainError(format!("radius {} must exceed 1", r)));
    }
    if !(c >= 0.0) {
        return Err(Error::InvalidArgument("C must be nonnegative".into()));
    }
    Ok(match variant {
        HarnackVariant::A => -2.0 * c / (r - 1.0),
        HarnackVariant::B => -c * (1.0 + (1.0 + 1.0 / r) / (1.0 - 1.0 / r).powi(3)),
    })
}

#[derive(Clone, Copy, Debug)]
pub struct HarnackHarness {
    pub trials: usize,
    pub violations: usize,
    /// Smallest `min_{|z|=1} h − bound` seen.
    pub worst_margin: f64,
}

/// Random `h = Re Σ_{k=1}^{deg} c_k z^k`, rescaled so `max_{|z|=r} h = C`,
/// checked against the bound on the unit circle.
pub fn harnack_harness(r: f64, variant: HarnackVariant, trials: usize, degree: usize, seed: u64, exec: Exec) -> Result<HarnackHarness> {
    let bound = harnack_bound(1.0, r, variant)?;
    let q = 2048;
    let margins = exec::map_indexed(exec, trials, |i| {
        let mut rng = crate::rng::stream(seed, i as u64);
        let c: Vec<C64> = (0..degree).map(|_| C64::new(normal(&mut rng), normal(&mut rng))).collect();
        let h = |z: C64| {
            let mut s = C64::new(0.0, 0.0);
            let mut zk = C64::new(1.0, 0.0);
            for ck in &c {
                zk *= z;
                s += ck * zk;
            }
            s.re
        };
        let circle = |rad: f64, off: f64| (0..q).map(move |k| C64::from_polar(rad, TAU * (k as f64 + off) / q as f64));
        // h(0) = 0 forces a positive maximum; the grid max is refined locally
        let (mut best, mut arg) = (f64::NEG_INFINITY, 0.0);
        for (k, z) in circle(r, 0.0).enumerate() {
            let v = h(z);
            if v > best {
                best = v;
                arg = TAU * k as f64 / q as f64;
            }
        }
        let mut step = TAU / q as f64;
        for _ in 0..40 {
            for cand in [arg - step, arg + step] {
                let v = h(C64::from_polar(r, cand));
                if v > best {
                    best = v;
                    arg = cand;
                }
            }
            step *= 0.5;
        }
        let min1 = circle(1.0, 0.5).map(h).fold(f64::INFINITY, f64::min) / best;
        min1 - bound
    });
    let violations = margins.iter().filter(|&&m| m < 0.0).count();
    let worst_margin = margins.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(HarnackHarness { trials, violations, worst_margin })
}

/// Standard normal variate by Box–Muller.
fn normal<R: rand::Rng>(rng: &mut R) -> f64 {
    let u: f64 = 1.0 - rng.gen::<f64>();
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (TAU * v).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lax::lax_approximate;
    use rand::Rng;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn z0() -> C64 {
        C64::new(0.0, 0.0)
    }

    #[test]
    fn winding_examples() {
        let c = Path::circle(z0(), 1.0);
        assert!((arg_change(|z| z, &c, 8).unwrap() - TAU).abs() < 1e-12);
        let a = C64::from_polar(0.5, 1.0);
        assert!((arg_change(|z| z - a, &c, 8).unwrap() - TAU).abs() < 1e-12);
        assert!(arg_change(|z| z - a, &Path::circle(z0(), 0.3), 8).unwrap().abs() < 1e-12);
        assert!(matches!(arg_change(|z| z - 1.0, &c, 8), Err(Error::ZeroOnPath(_))));
    }

    #[test]
    fn quarter_arc_closed_form() {
        let b = C64::from_polar(1.3, PI / 3.0);
        let g = |z: C64| (z - 0.8) * (z - b);
        let arc = Path::Arc { center: z0(), radius: 1.0, start: 0.0, end: PI / 2.0 };
        // each factor's argument moves continuously; neither crosses its branch cut
        let exact = |z: C64| (z - 0.8).arg() + ((z - b) / (1.0 - b)).arg();
        let expect = exact(C64::new(0.0, 1.0)) - exact(C64::new(1.0, 0.0));
        assert!((arg_change(g, &arc, 4).unwrap() - expect).abs() < 1e-8);
    }

    #[test]
    fn closed_contours_count_zeros() {
        let mut rng = crate::rng::stream(30, 0);
        for _ in 0..50 {
            let roots: Vec<C64> = (0..5).map(|_| C64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5))).collect();
            let inside = roots.iter().filter(|r| r.norm() < 1.0).count();
            if roots.iter().any(|r| (r.norm() - 1.0).abs() < 1e-3) {
                continue;
            }
            let g = |z: C64| roots.iter().fold(C64::new(1.0, 0.0), |acc, r| acc * (z - r));
            let w = arg_change(g, &Path::circle(z0(), 1.0), 16).unwrap() / TAU;
            assert!((w - inside as f64).abs() < 1e-6);
        }
    }

    #[test]
    fn jensen_for_the_identity() {
        let s = Sector::new(0.5, 2.0, 0.3, 1.7).unwrap();
        let rep = jensen_sector(|z| z, &s, 8).unwrap();
        assert!((rep.lhs - 2f64.ln() * 1.4 / TAU).abs() < 1e-12);
        assert!(rep.residual() < 1e-10);
        assert!((rep.args.angular() - 0.0).abs() < 1e-12);
    }

    #[test]
    fn jensen_with_a_zero_in_the_sector() {
        let zero = C64::from_polar(1.1, 0.9);
        let s = Sector::new(0.6, 1.8, 0.2, 1.6).unwrap();
        let rep = jensen_sector(|z| z - zero, &s, 8).unwrap();
        assert!(rep.residual() < 1e-8, "{}", rep.residual());
        assert!((rep.args.zero_count() - 1.0).abs() < 1e-9);
        assert!(Sector::new(2.0, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn sector_partition_sums_to_annulus_jensen() {
        let roots = [C64::from_polar(0.9, 0.4), C64::from_polar(1.2, 2.5), C64::from_polar(0.3, 4.0), C64::from_polar(1.4, 5.9)];
        let g = |z: C64| roots.iter().fold(C64::new(2.0, 0.0), |acc, r| acc * (z - r));
        let total: f64 = Sector::partition(0.5, 1.6, 5).unwrap().iter().map(|s| jensen_sector(g, s, 8).unwrap().difference()).sum();
        let annulus = annulus_jensen_difference(g, 0.5, 1.6, 8).unwrap();
        assert!((total - annulus).abs() < 1e-6);
        assert!(annulus.abs() < 1e-8);
    }

    #[test]
    fn cauchy_riemann_for_log_g() {
        let g = |z: C64| (z - 0.3) * (z + C64::new(0.2, 1.7));
        let (r, th, h) = (1.1, 0.7, 1e-5);
        let arg = |r: f64, t: f64| g(C64::from_polar(r, t)).arg();
        let lg = |r: f64, t: f64| g(C64::from_polar(r, t)).norm().ln();
        let d_arg = (arg(r, th + h) - arg(r, th - h)) / (2.0 * h) / r;
        let d_log = (lg(r + h, th) - lg(r - h, th)) / (2.0 * h);
        assert!((d_arg - d_log).abs() < 1e-3);
    }

    fn lax_base(k: usize) -> BaseMap {
        BaseMap::CubeExchange(Arc::new(lax_approximate(&BaseMap::standard(4.0), k, Exec::Sequential).unwrap().cube))
    }

    #[test]
    fn jensen_for_a_cocycle_entry() {
        let k = 8;
        let base = lax_base(k);
        let h = TAU / k as f64;
        let j = 3;
        let ph = orbit_phases(&base, TorusPoint::new(h * (j as f64 + 0.5), 1.3), 6);
        let s = Sector::partition(0.8, 1.25, k).unwrap()[j];
        let rep = jensen_sector(|z| g_n(&ph, C64::new(0.0, 0.0), 4.0, z), &s, 16).unwrap();
        assert!(rep.residual() < 1e-3, "{}", rep.residual());
        let a = rep.args;
        assert!((a.zero_count() - a.zero_count().round()).abs() < 1e-6);
    }

    #[test]
    fn g_n_matches_matrix_products() {
        let ph = [0.0, 0.7, 2.2];
        let z = C64::new(0.4, 0.9);
        let (e, l) = (C64::new(0.3, 0.0), 2.5);
        let mut m = crate::linalg::Mat2::<C64>::identity();
        for &p in &ph {
            let u = z * C64::from_polar(1.0, p);
            let t = m.lmul_transfer(e - 0.5 * l * (u + 1.0 / u));
            m = crate::linalg::Mat2(t.0.map(|row| row.map(|x| x * u)));
        }
        assert!((g_n(&ph, e, l, z) - m.0[0][0]).norm() < 1e-12);
    }

    #[test]
    fn radial_sums_vanish_without_coupling_or_for_rotations() {
        let e = C64::new(0.0, 0.0);
        let lax = lax_base(8);
        let free = radial_argument_sum(&lax, 8, e, 0.0, 10, (0.8, 1.25), 4, Exec::Sequential).unwrap();
        assert!(free.mean.abs() < 1e-12);
        let rot = radial_argument_sum(&BaseMap::golden_rotation(), 8, e, 4.0, 10, (0.8, 1.25), 4, Exec::Sequential).unwrap();
        assert!(rot.mean.abs() < 1e-8);
    }

    #[test]
    fn radial_sum_on_a_standard_map_lax_base() {
        let base = BaseMap::CubeExchange(Arc::new(lax_approximate(&BaseMap::standard(6.0), 8, Exec::Sequential).unwrap().cube));
        let rs = radial_argument_sum(&base, 8, C64::new(0.0, 0.0), 6.0, 20, (0.8, 1.25), 16, Exec::Parallel).unwrap();
        // every y-cell is sampled, so this is the exact average for the base
        assert!(rs.mean > 0.1 && rs.mean < 0.25, "{}", rs.mean);
    }

    #[test]
    fn harmonic_continuation_of_an_atom() {
        let s = CircleMeasureSeries::from_atoms(&[(0.0, 1.0)], 60);
        for z in [C64::new(0.3, 0.4), C64::new(-0.2, -0.1)] {
            assert!((s.h_minus(z).unwrap() - (1.0 - z).ln()).norm() < 1e-10);
        }
        let z = C64::new(1.2, 1.6);
        assert!((s.h_plus(z).unwrap() - (1.0 - 1.0 / z).ln()).norm() < 1e-10);
        assert!(matches!(s.h_minus(C64::new(1.0, 0.0)), Err(Error::Divergence(_))));
    }

    #[test]
    fn continuation_symmetry_and_convergence() {
        let phi = |x: f64| 0.3 * x.sin();
        let s = CircleMeasureSeries::from_pushforward(phi, 60, 512);
        assert!((s.a(0) - 1.0).norm() < 1e-12);
        for z in [C64::new(0.3, 0.2), C64::new(1.5, 0.7)] {
            let a = s.continuation(z).unwrap().alpha;
            let b = s.continuation(z.conj()).unwrap().alpha;
            assert!((a + b).abs() < 1e-10);
        }
        let z = C64::from_polar(0.5, 1.0);
        let big = CircleMeasureSeries::from_pushforward(phi, 120, 1024);
        assert!((s.continuation(z).unwrap().alpha - big.continuation(z).unwrap().alpha).abs() < 1e-8);
    }

    #[test]
    fn continuation_matches_the_argument_change() {
        // α(z) = ∫ Arg(1 − z/a(x)) dx/2π, the argument change of ∫ log(z − a) dk along [0, z]
        let phi = |x: f64| 0.3 * x.sin() + 0.1 * (2.0 * x).cos();
        let s = CircleMeasureSeries::from_pushforward(phi, 80, 256);
        for z in [C64::from_polar(0.7, 2.0), C64::from_polar(1.6, -1.0)] {
            let f = |x: f64| (1.0 - z / C64::from_polar(1.0, x + phi(x))).arg() / TAU;
            // a(x) crosses the segment where x + φ(x) = arg z
            let th = z.arg().rem_euclid(TAU);
            let (mut lo, mut hi) = (th - 1.0, th + 1.0);
            for _ in 0..80 {
                let m = 0.5 * (lo + hi);
                if m + phi(m) < th {
                    lo = m;
                } else {
                    hi = m;
                }
            }
            let xs = lo.rem_euclid(TAU);
            let opts = QuadOptions { abs_tol: 1e-12, rel_tol: 1e-12, limit: 4000 };
            let alpha = crate::quad::integrate_split(f, 0.0, TAU, &[xs], opts).unwrap();
            assert!((s.continuation(z).unwrap().alpha - alpha).abs() < 1e-8, "{} {}", s.continuation(z).unwrap().alpha, alpha);
        }
    }

    #[test]
    fn harnack_examples() {
        assert_eq!(harnack_bound(1.0, 3.0, HarnackVariant::A).unwrap(), -1.0);
        assert!((harnack_bound(1.0, 3.0, HarnackVariant::B).unwrap() + 5.5).abs() < 1e-12);
        assert!(matches!(harnack_bound(1.0, 1.0, HarnackVariant::A), Err(Error::DomainError(_))));
        for r in [2.0, 3.0, 5.0] {
            let h = harnack_harness(r, HarnackVariant::A, 1000, 6, 31, Exec::Parallel).unwrap();
            assert_eq!(h.violations, 0, "r = {} margin {}", r, h.worst_margin);
        }
    }
}
