//! Empirical spectral measures and their logarithmic potentials: density of
//! states, Thouless residuals, Fuglede–Kadison determinants, log-Hölder
//! profiles, capacity, and projection onto the unit circle.

use crate::cocycle::{lyapunov_orbit, Cocycle2};
use crate::dynamics::TorusPoint;
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::jacobi::{self, mat4_to_dense, ProductOperator, WSpectrum};
use crate::lax::halton_points;
use crate::linalg::{eig, Mat2, C64};
use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalMeasure {
    pub atoms: Vec<(C64, f64)>,
}

impl EmpiricalMeasure {
    pub fn new(atoms: Vec<(C64, f64)>) -> Result<Self> {
        if atoms.iter().any(|a| !(a.1 > 0.0) || !a.0.re.is_finite() || !a.0.im.is_finite()) {
            return Err(Error::InvalidArgument("atoms need finite locations and positive weights".into()));
        }
        Ok(EmpiricalMeasure { atoms })
    }

    /// Equal weights summing to `mass`.
    pub fn uniform(points: &[C64], mass: f64) -> Self {
        let w = mass / points.len() as f64;
        EmpiricalMeasure { atoms: points.iter().map(|&z| (z, w)).collect() }
    }

    /// `n` atoms at `2 cos(π(k + ½)/n)`: the arcsine law on `[−2, 2]`.
    pub fn arcsine(n: usize) -> Self {
        let pts: Vec<C64> = (0..n).map(|k| C64::new(2.0 * (PI * (k as f64 + 0.5) / n as f64).cos(), 0.0)).collect();
        Self::uniform(&pts, 1.0)
    }

    /// `n` equally spaced atoms on `|z| = radius`.
    pub fn circle(n: usize, radius: f64) -> Self {
        let pts: Vec<C64> = (0..n).map(|k| C64::from_polar(radius, TAU * (k as f64 + 0.5) / n as f64)).collect();
        Self::uniform(&pts, 1.0)
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    pub fn normalized(&self) -> Self {
        let m = self.total_mass();
        EmpiricalMeasure { atoms: self.atoms.iter().map(|&(z, w)| (z, w / m)).collect() }
    }

    /// `Σ wᵢ log|z − zᵢ|`; `−∞` when z is an atom.
    pub fn potential(&self, z: C64) -> f64 {
        self.atoms.iter().map(|&(a, w)| w * (z - a).norm().ln()).sum()
    }

    pub fn mass_in_ball(&self, c: C64, r: f64) -> f64 {
        self.atoms.iter().filter(|a| (a.0 - c).norm() < r).map(|a| a.1).sum()
    }

    /// Mass on `Re z ≤ x`, normalized by the total mass.
    pub fn cdf_real(&self, x: f64) -> f64 {
        self.atoms.iter().filter(|a| a.0.re <= x).map(|a| a.1).sum::<f64>() / self.total_mass()
    }

    /// Kolmogorov–Smirnov distance of the real parts to a reference CDF.
    pub fn ks_distance(&self, cdf: impl Fn(f64) -> f64) -> f64 {
        let mut v: Vec<(f64, f64)> = self.atoms.iter().map(|a| (a.0.re, a.1)).collect();
        v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let total = self.total_mass();
        let mut acc = 0.0;
        let mut d = 0.0f64;
        for (x, w) in v {
            let f = cdf(x);
            d = d.max((acc / total - f).abs());
            acc += w;
            d = d.max((acc / total - f).abs());
        }
        d
    }

    /// Kolmogorov–Smirnov distance between the real-part distributions.
    pub fn ks_between(&self, o: &EmpiricalMeasure) -> f64 {
        let mut xs: Vec<f64> = self.atoms.iter().chain(&o.atoms).map(|a| a.0.re).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        xs.iter().map(|&x| (self.cdf_real(x) - o.cdf_real(x)).abs()).fold(0.0, f64::max)
    }

    pub fn min_distance_to(&self, z: C64) -> f64 {
        self.atoms.iter().map(|a| (a.0 - z).norm()).fold(f64::INFINITY, f64::min)
    }

    /// Projection `z ↦ z/|z|` onto the unit circle.
    pub fn project_to_circle(&self) -> Result<Self> {
        if self.atoms.iter().any(|a| a.0.norm() == 0.0) {
            return Err(Error::SupportViolation("atom at the origin cannot be projected".into()));
        }
        Ok(EmpiricalMeasure { atoms: self.atoms.iter().map(|&(z, w)| (z / z.norm(), w)).collect() })
    }
}

/// The larger root modulus `|ζ|` of `ζ + 1/ζ = z`; `∫ log|z − 2cos θ| dθ/2π = log|ζ|`.
pub fn free_potential(z: C64) -> f64 {
    let h = z / 2.0;
    let s = (h * h - 1.0).sqrt();
    (h + s).norm().max((h - s).norm()).ln()
}

/// Pooled eigenvalues of m Dirichlet truncations of `τ + τ* + V_w` of size
/// n along base orbits from Halton seeds; total mass 1.
pub fn density_of_states(cfg: &Cocycle2, n: usize, m: usize, exec: Exec) -> Result<EmpiricalMeasure> {
    if n * m > 100_000 || n == 0 || m == 0 {
        return Err(Error::InvalidArgument("need 1 ≤ n·m ≤ 10⁵ atoms".into()));
    }
    let seeds = halton_points(m);
    let evs = exec::map_slice(exec, &seeds, |&s| jacobi::truncated_eigenvalues(&jacobi::orbit_potential(cfg, s, n)));
    let mut pts = Vec::with_capacity(n * m);
    for e in evs {
        pts.extend(e?);
    }
    Ok(EmpiricalMeasure::uniform(&pts, 1.0))
}

#[derive(Clone, Debug)]
pub struct ThoulessReport {
    /// `(point, lhs, rhs)`.
    pub points: Vec<(C64, f64, f64)>,
    pub residual: f64,
}

impl ThoulessReport {
    fn from_points(points: Vec<(C64, f64, f64)>) -> Self {
        let residual = points.iter().map(|p| (p.1 - p.2).abs()).fold(0.0, f64::max);
        ThoulessReport { points, residual }
    }
}

/// Minimum distance from the evaluation points to the support.
const SUPPORT_BUFFER: f64 = 0.1;

/// `μ(A_E)` (orbit average over the DOS seeds, `steps` cocycle steps) against
/// the potential of the truncation DOS at each E.
pub fn thouless_residual(cfg: &Cocycle2, energies: &[C64], n: usize, m: usize, steps: usize, exec: Exec) -> Result<ThoulessReport> {
    let dk = density_of_states(cfg, n, m, exec)?;
    for &e in energies {
        if dk.min_distance_to(e) < SUPPORT_BUFFER {
            return Err(Error::DomainError(format!("energy {} is within {} of the spectrum", e, SUPPORT_BUFFER)));
        }
    }
    let seeds = halton_points(m);
    let mut pts = Vec::new();
    for &e in energies {
        let c = cfg.clone().with_e(e);
        let vals = exec::map_slice(exec, &seeds, |&s| lyapunov_orbit(&c, s, steps, 16).map(|v| v.value));
        let mut lhs = 0.0;
        for v in vals {
            lhs += v?;
        }
        pts.push((e, lhs / m as f64, dk.potential(e)));
    }
    Ok(ThoulessReport::from_points(pts))
}

/// `(1/p) log ρ(A_w(x_{p−1}) ⋯ A_w(x_0))` with rescaling.
pub fn w_cycle_exponent(xs: &[f64], e: C64, lambda: f64, w: C64) -> f64 {
    let mut m = Mat2::<C64>::identity();
    let mut log_acc = 0.0;
    for (k, &x) in xs.iter().enumerate() {
        let z = C64::from_polar(1.0, x);
        m = m.lmul_transfer(e - 0.5 * lambda * (z / w + w / z));
        if k % 8 == 7 {
            let s = m.max_col_norm();
            m = m.scale(1.0 / s);
            log_acc += s.ln();
        }
    }
    (log_acc + m.spectral_radius().ln()) / xs.len() as f64
}

/// Residual of `μ(B(w)) = ∫ log|w − w′| dk(w′) + log(λ/2)` over one base
/// cycle, `B = wA`, on the circles `|w| = r` (q points each); dk from the
/// periodic w-spectrum with m angles.
pub fn thouless_w_residual(xs: &[f64], lambda: f64, radii: &[f64], q: usize, m: usize, exec: Exec) -> Result<ThoulessReport> {
    let e = C64::new(0.0, 0.0);
    let spec = jacobi::periodic_w_spectrum(xs, e, lambda, m, exec)?;
    let dk = EmpiricalMeasure::new(spec.atoms())?;
    let mut ws = Vec::new();
    for &r in radii {
        for k in 0..q {
            ws.push(C64::from_polar(r, TAU * (k as f64 + 0.25) / q as f64));
        }
    }
    let pts = exec::map_slice(exec, &ws, |&w| (w, w.norm().ln() + w_cycle_exponent(xs, e, lambda, w), dk.potential(w) + (lambda / 2.0).ln()));
    Ok(ThoulessReport::from_points(pts))
}

/// Mass of the Riesz measure of `μ(A(w))` near 0, read from the slope of the
/// circle means in `log r` between `r` and `r/2` (the atom at 0 is negative).
pub fn w_atom_at_zero(xs: &[f64], lambda: f64, r: f64, q: usize) -> f64 {
    let e = C64::new(0.0, 0.0);
    let mean = |rad: f64| (0..q).map(|k| w_cycle_exponent(xs, e, lambda, C64::from_polar(rad, TAU * (k as f64 + 0.5) / q as f64))).sum::<f64>() / q as f64;
    -(mean(r) - mean(r / 2.0)) / 2f64.ln()
}

/// Sum of the two leading Lyapunov exponents per site of the 4×4 strip
/// cocycle along `op` (one pass over its sites), by QR renormalization of a
/// two-frame.
pub fn strip_top_two(op: &ProductOperator, e: C64) -> Result<f64> {
    let steps = op.len() / 2;
    if steps == 0 {
        return Err(Error::InvalidArgument("operator too short".into()));
    }
    let mut f = [[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.3, 0.0), C64::new(0.0, 0.1)], [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, -0.2), C64::new(0.4, 0.0)]];
    let mut acc = 0.0;
    for j in 0..steps {
        let m = op.transfer4(e, 2 * j as isize + 2);
        let a = m.apply(&f[0]);
        let b = m.apply(&f[1]);
        let na = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let q0: Vec<C64> = a.iter().map(|z| z / na).collect();
        let proj: C64 = q0.iter().zip(&b).map(|(x, y)| x.conj() * y).sum();
        let r: Vec<C64> = b.iter().zip(&q0).map(|(y, x)| y - proj * x).collect();
        let nb = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(na > 0.0 && nb > 0.0 && na.is_finite() && nb.is_finite()) {
            return Err(Error::NonFinite("strip frame degenerated".into()));
        }
        acc += na.ln() + nb.ln();
        for k in 0..4 {
            f[0][k] = q0[k];
            f[1][k] = r[k] / nb;
        }
    }
    Ok(acc / (2 * steps) as f64)
}

/// Same quantity for a periodic operator from the monodromy eigenvalues.
pub fn strip_top_two_periodic(op: &ProductOperator, e: C64) -> Result<f64> {
    let m = mat4_to_dense(&op.monodromy4(e)?);
    let mut ev: Vec<f64> = eig::eigenvalues(&m)?.iter().map(|z| z.norm()).collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok((ev[0].ln() + ev[1].ln()) / op.len() as f64)
}

/// Pooled eigenvalues of `windows` Dirichlet truncations of size `n` taken
/// at evenly spaced offsets along `op`.
pub fn product_dos(op: &ProductOperator, n: usize, windows: usize, exec: Exec) -> Result<EmpiricalMeasure> {
    if n == 0 || windows == 0 || n > eig::MAX_DIM {
        return Err(Error::InvalidArgument("bad truncation size or window count".into()));
    }
    let span = op.len().saturating_sub(n).max(1);
    let offsets: Vec<usize> = (0..windows).map(|k| k * span / windows).collect();
    let evs = exec::map_slice(exec, &offsets, |&o| {
        let shifted = ProductOperator { v1: rotate(&op.v1, o), v2: rotate(&op.v2, o) };
        jacobi::truncated_product_eigenvalues(&shifted, n)
    });
    let mut pts = Vec::new();
    for e in evs {
        pts.extend(e?);
    }
    Ok(EmpiricalMeasure::uniform(&pts, 1.0))
}

fn rotate(v: &[C64], o: usize) -> Vec<C64> {
    let mut r = v.to_vec();
    r.rotate_left(o % v.len());
    r
}

/// `μ(∧²A_E)/2` per site (two-frame QR along `op`) against the potential of
/// the pooled truncation DOS.
pub fn strip_thouless_residual(op: &ProductOperator, energies: &[C64], n: usize, windows: usize, exec: Exec) -> Result<ThoulessReport> {
    let dk = product_dos(op, n, windows, exec)?;
    let mut pts = Vec::new();
    for &e in energies {
        if dk.min_distance_to(e) < SUPPORT_BUFFER {
            return Err(Error::DomainError(format!("energy {} is within {} of the spectrum", e, SUPPORT_BUFFER)));
        }
        pts.push((e, strip_top_two(op, e)?, dk.potential(e)));
    }
    Ok(ThoulessReport::from_points(pts))
}

/// `∫ log|E| dk`; `−∞` if an atom sits at 0.
pub fn fk_determinant(dk: &EmpiricalMeasure) -> f64 {
    dk.normalized().potential(C64::new(0.0, 0.0))
}

#[derive(Clone, Copy, Debug)]
pub struct ProductFormula {
    pub logdet_product: f64,
    pub logdet_first: f64,
    pub logdet_second: f64,
    pub residual: f64,
}

/// `|logdet(L₁L₂) − logdet L₁ − logdet L₂|` from pooled truncation DOS of
/// the three operators at size n.
pub fn product_formula_residual(op: &ProductOperator, n: usize, windows: usize, exec: Exec) -> Result<ProductFormula> {
    let span = op.len().saturating_sub(n).max(1);
    let offsets: Vec<usize> = (0..windows).map(|k| k * span / windows).collect();
    let scalar_dos = |v: &[C64]| -> Result<EmpiricalMeasure> {
        let evs = exec::map_slice(exec, &offsets, |&o| jacobi::truncated_eigenvalues(&rotate(v, o)[..n]));
        let mut pts = Vec::new();
        for e in evs {
            pts.extend(e?);
        }
        Ok(EmpiricalMeasure::uniform(&pts, 1.0))
    };
    if n == 0 || n > op.len() {
        return Err(Error::InvalidArgument("truncation size must be in 1..=len".into()));
    }
    let d1 = fk_determinant(&scalar_dos(&op.v1)?);
    let d2 = fk_determinant(&scalar_dos(&op.v2)?);
    let d12 = fk_determinant(&product_dos(op, n, windows, exec)?);
    Ok(ProductFormula { logdet_product: d12, logdet_first: d1, logdet_second: d2, residual: (d12 - d1 - d2).abs() })
}

#[derive(Clone, Debug)]
pub struct LogHolderProfile {
    /// Ball diameters `|B|`.
    pub diameters: Vec<f64>,
    /// `max_B dk(B) log(1/|B|)` per diameter.
    pub values: Vec<f64>,
    pub c_hat: f64,
    /// Profile grows by more than half as the diameter shrinks, as for an atom.
    pub violation: bool,
}

/// Max over balls centred at atoms of `dk(B) log(1/|B|)` for each diameter.
pub fn log_holder_profile(dk: &EmpiricalMeasure, diameters: &[f64]) -> Result<LogHolderProfile> {
    if diameters.iter().any(|&d| !(d > 0.0 && d < 1.0)) {
        return Err(Error::InvalidArgument("diameters must lie in (0, 1)".into()));
    }
    let mut values = Vec::new();
    for &d in diameters {
        let r = d / 2.0;
        let key = |z: C64| ((z.re / d).floor() as i64, (z.im / d).floor() as i64);
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, a) in dk.atoms.iter().enumerate() {
            buckets.entry(key(a.0)).or_default().push(i);
        }
        let mut best = 0.0f64;
        for a in &dk.atoms {
            let (kx, ky) = key(a.0);
            let mut mass = 0.0;
            for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(ids) = buckets.get(&(kx + dx, ky + dy)) {
                        mass += ids.iter().filter(|&&j| (dk.atoms[j].0 - a.0).norm() < r).map(|&j| dk.atoms[j].1).sum::<f64>();
                    }
                }
            }
            best = best.max(mass);
        }
        values.push(best * (1.0 / d).ln());
    }
    let c_hat = values.iter().cloned().fold(0.0, f64::max);
    let mut order: Vec<usize> = (0..diameters.len()).collect();
    order.sort_by(|&a, &b| diameters[b].partial_cmp(&diameters[a]).unwrap());
    let first = values[order[0]];
    let last = values[*order.last().unwrap()];
    let increasing = order.windows(2).all(|w| values[w[1]] >= values[w[0]]);
    let violation = increasing && last > 1.5 * first && diameters.len() > 1;
    Ok(LogHolderProfile { diameters: diameters.to_vec(), values, c_hat, violation })
}

#[derive(Clone, Copy, Debug)]
pub struct CapacityEnergy {
    pub energy: f64,
    pub capacity: f64,
}

/// Discrete logarithmic energy of the normalized measure with the diagonal
/// excluded, and `e^{−I}`.
pub fn capacity_energy(dk: &EmpiricalMeasure, exec: Exec) -> Result<CapacityEnergy> {
    if dk.atoms.len() < 2 {
        return Err(Error::InvalidArgument("need at least two atoms".into()));
    }
    let nu = dk.normalized();
    let at = &nu.atoms;
    let rows = exec::map_indexed(exec, at.len(), |i| {
        let mut s = 0.0;
        for (j, b) in at.iter().enumerate() {
            if j != i {
                let d = (at[i].0 - b.0).norm();
                if d > 0.0 {
                    s += b.1 * d.ln();
                }
            }
        }
        at[i].1 * s
    });
    let energy = -rows.iter().sum::<f64>();
    Ok(CapacityEnergy { energy, capacity: (-energy).exp() })
}

/// The w-spectrum measure as an empirical measure (mass 2).
pub fn w_measure(spec: &WSpectrum) -> Result<EmpiricalMeasure> {
    EmpiricalMeasure::new(spec.atoms())
}

#[derive(Clone, Copy, Debug)]
pub struct ProjectionDeficit {
    pub r: f64,
    /// `max_z potential(π*dk, z) − potential(dk, z)` over the circle grid.
    pub deficit: f64,
    /// `Σ wᵢ max_z (log|z − π(zᵢ)| − log|z − zᵢ|)`, an upper bound.
    pub bound: f64,
}

/// Compares the potential of dk with that of its projection to the circle on
/// q points of `|z| = 1`; dk must lie in `r < |z| < 1/r`.
pub fn circle_projection_compare(dk: &EmpiricalMeasure, r: f64, q: usize) -> Result<ProjectionDeficit> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidArgument("r must lie in (0, 1)".into()));
    }
    if let Some(a) = dk.atoms.iter().find(|a| !(a.0.norm() > r && a.0.norm() < 1.0 / r)) {
        return Err(Error::SupportViolation(format!("atom {} outside the annulus ({}, {})", a.0, r, 1.0 / r)));
    }
    let proj = dk.project_to_circle()?;
    let grid: Vec<C64> = (0..q).map(|k| C64::from_polar(1.0, TAU * (k as f64 + 0.5) / q as f64)).collect();
    let deficit = grid
        .iter()
        .map(|&z| {
            let a = proj.potential(z);
            let b = dk.potential(z);
            if a.is_finite() && b.is_finite() {
                a - b
            } else {
                f64::NEG_INFINITY
            }
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let bound = dk
        .atoms
        .iter()
        .zip(&proj.atoms)
        .map(|(a, p)| {
            a.1 * grid
                .iter()
                .map(|&z| {
                    let v = (z - p.0).norm().ln() - (z - a.0).norm().ln();
                    if v.is_finite() {
                        v
                    } else {
                        f64::NEG_INFINITY
                    }
                })
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .sum();
    Ok(ProjectionDeficit { r, deficit, bound })
}

/// Seeds used by the DOS and Thouless routines, exposed for reproducibility.
pub fn dos_seeds(m: usize) -> Vec<TorusPoint> {
    halton_points(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::BaseMap;
    use crate::jacobi::{cycle_points, periodic_w_spectrum};
    use crate::lax::{AnnulusPermutation, CubeExchange};
    use rand::Rng;
    use std::sync::Arc;

    fn arcsine_cdf(x: f64) -> f64 {
        if x <= -2.0 {
            0.0
        } else if x >= 2.0 {
            1.0
        } else {
            0.5 + (x / 2.0).asin() / PI
        }
    }

    #[test]
    fn potential_examples() {
        let one = EmpiricalMeasure::new(vec![(C64::new(0.0, 0.0), 1.0)]).unwrap();
        assert!((one.potential(C64::new(0.3, 0.4)) - 0.5f64.ln()).abs() < 1e-15);
        assert_eq!(one.potential(C64::new(0.0, 0.0)), f64::NEG_INFINITY);
        assert!(EmpiricalMeasure::arcsine(1000).potential(C64::new(0.0, 0.0)).abs() < 5e-3);
        let circ = EmpiricalMeasure::circle(1000, 1.0);
        assert!(circ.potential(C64::new(0.5, 0.0)).abs() < 5e-3);
        assert!((circ.potential(C64::new(0.0, 2.0)) - 2f64.ln()).abs() < 5e-3);
    }

    #[test]
    fn potential_is_harmonic_off_support() {
        let mut r = crate::rng::stream(20, 0);
        let pts: Vec<C64> = (0..50).map(|_| C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect();
        let dk = EmpiricalMeasure::uniform(&pts, 1.0);
        let z = C64::new(2.0, 1.5);
        let h = 1e-3;
        let lap = dk.potential(z + h) + dk.potential(z - h) + dk.potential(z + C64::new(0.0, h)) + dk.potential(z - C64::new(0.0, h)) - 4.0 * dk.potential(z);
        assert!(lap.abs() / (h * h) < 1e-4 / (h * h));
        // mean value over a circle avoiding the support
        let mean = (0..256).map(|k| dk.potential(z + C64::from_polar(0.3, TAU * k as f64 / 256.0))).sum::<f64>() / 256.0;
        assert!((mean - dk.potential(z)).abs() < 1e-6);
    }

    #[test]
    fn free_dos_is_arcsine() {
        let cfg = Cocycle2::cos(0.0, 0.0, BaseMap::golden_rotation());
        let dk = density_of_states(&cfg, 400, 2, Exec::Sequential).unwrap();
        assert!(dk.ks_distance(arcsine_cdf) < 0.03);
        assert!((dk.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mathieu_dos_support_and_symmetry() {
        let cfg = Cocycle2::cos(0.0, 4.0, BaseMap::golden_rotation());
        let dk = density_of_states(&cfg, 200, 20, Exec::Parallel).unwrap();
        assert!(dk.atoms.iter().all(|a| a.0.re.abs() <= 6.0 + 1e-9));
        let mirrored = EmpiricalMeasure { atoms: dk.atoms.iter().map(|&(z, w)| (-z, w)).collect() };
        assert!(dk.ks_between(&mirrored) < 0.05);
        // KS distance between successive truncation sizes shrinks
        let d: Vec<EmpiricalMeasure> = [100, 200, 400, 800].iter().map(|&n| density_of_states(&cfg, n, 4, Exec::Parallel).unwrap()).collect();
        let k1 = d[0].ks_between(&d[1]);
        let k2 = d[1].ks_between(&d[2]);
        let k3 = d[2].ks_between(&d[3]);
        assert!(k1 >= k2 && k2 >= k3, "{} {} {}", k1, k2, k3);
    }

    #[test]
    fn w_dos_leaves_the_real_axis() {
        let cfg = Cocycle2::cos(0.0, 3.0, BaseMap::standard(3.0)).with_w(C64::new(0.7, 0.0));
        let dk = density_of_states(&cfg, 100, 3, Exec::Sequential).unwrap();
        assert!(dk.atoms.iter().any(|a| a.0.im.abs() > 0.1));
    }

    #[test]
    fn thouless_free_case() {
        let cfg = Cocycle2::cos(0.0, 0.0, BaseMap::golden_rotation());
        let rep = thouless_residual(&cfg, &[C64::new(3.0, 0.0)], 400, 2, 20_000, Exec::Sequential).unwrap();
        let lhs = ((3.0 + 5f64.sqrt()) / 2.0).ln();
        assert!((rep.points[0].1 - lhs).abs() < 1e-3);
        assert!(rep.residual < 5e-3, "{}", rep.residual);
        assert!(thouless_residual(&cfg, &[C64::new(1.0, 0.0)], 100, 1, 100, Exec::Sequential).is_err());
    }

    #[test]
    fn w_thouless_on_a_periodic_base() {
        let xs = [0.3, 2.0, 4.1, 5.5, 1.2, 3.3, 0.9];
        let rep = thouless_w_residual(&xs, 4.0, &[0.5, 1.5], 16, 256, Exec::Sequential).unwrap();
        assert!(rep.residual < 1e-3, "{}", rep.residual);
        // mass of the negative atom at 0
        assert!((w_atom_at_zero(&xs, 4.0, 0.05, 16) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn strip_exponents_periodic_vs_qr() {
        let mut r = crate::rng::stream(21, 0);
        let base: Vec<(C64, C64)> = (0..6).map(|_| (C64::new(r.gen_range(-1.0..1.0), 0.0), C64::new(r.gen_range(-1.0..1.0), 0.0))).collect();
        let reps = 4000;
        let v1: Vec<C64> = (0..6 * reps).map(|k| base[k % 6].0).collect();
        let v2: Vec<C64> = (0..6 * reps).map(|k| base[k % 6].1).collect();
        let long = ProductOperator::new(v1, v2).unwrap();
        let short = ProductOperator::new(base.iter().map(|b| b.0).collect(), base.iter().map(|b| b.1).collect()).unwrap();
        for e in [C64::new(-2.0, 0.0), C64::new(1.0, 2.0)] {
            let a = strip_top_two(&long, e).unwrap();
            let b = strip_top_two_periodic(&short, e).unwrap();
            assert!((a - b).abs() < 1e-3, "{} {}", a, b);
        }
    }

    #[test]
    fn strip_thouless_free_case() {
        let zero = vec![C64::new(0.0, 0.0); 4000];
        let op = ProductOperator::new(zero.clone(), zero).unwrap();
        for e in [C64::new(-1.0, 0.0), C64::new(5.0, 0.0), C64::new(2.0, 1.0)] {
            // (τ + τ*)² − E factors through ±√E
            let s = e.sqrt();
            let exact = free_potential(s) + free_potential(-s);
            assert!((strip_top_two(&op, e).unwrap() - exact).abs() < 1e-3);
        }
        let rep = strip_thouless_residual(&op, &[C64::new(-1.0, 0.0), C64::new(5.0, 0.0)], 300, 1, Exec::Sequential).unwrap();
        assert!(rep.residual < 1e-2, "{}", rep.residual);
    }

    #[test]
    fn strip_thouless_equal_factors() {
        // V¹ = V² from the same rotation orbit: each side is twice the scalar exponent
        let cfg = Cocycle2::cos(0.0, 1.0, BaseMap::golden_rotation());
        let v = jacobi::orbit_potential(&cfg, TorusPoint::new(0.4, 0.0), 20_000);
        let op = ProductOperator::new(v.clone(), v).unwrap();
        let e = C64::new(0.0, 3.0);
        let lhs = strip_top_two(&op, e).unwrap();
        // L² − E = (L − √E)(L + √E)
        let s = e.sqrt();
        let scalar = |z: C64| lyapunov_orbit(&cfg.clone().with_e(z), TorusPoint::new(0.4, 0.0), 20_000, 16).unwrap().value;
        assert!((lhs - scalar(s) - scalar(-s)).abs() < 2e-2, "{}", lhs);
        let rep = strip_thouless_residual(&op, &[e], 300, 4, Exec::Sequential).unwrap();
        assert!(rep.residual < 2e-2, "{}", rep.residual);
    }

    #[test]
    fn determinant_product_formula() {
        let five = vec![C64::new(5.0, 0.0); 2000];
        let op = ProductOperator::new(five.clone(), five).unwrap();
        let f = product_formula_residual(&op, 400, 1, Exec::Sequential).unwrap();
        let exact = free_potential(C64::new(5.0, 0.0));
        assert!((f.logdet_first - exact).abs() < 1e-2);
        assert!((f.logdet_product - 2.0 * exact).abs() < 1e-2);
        assert!(f.residual < 1e-2);
        let mut r = crate::rng::stream(22, 0);
        let p4: Vec<C64> = (0..4).map(|_| C64::new(r.gen_range(2.5..4.0), 0.0)).collect();
        let q4: Vec<C64> = (0..4).map(|_| C64::new(r.gen_range(-4.0..-2.5), 0.0)).collect();
        let op = ProductOperator::new((0..2000).map(|k| p4[k % 4]).collect(), (0..2000).map(|k| q4[k % 4]).collect()).unwrap();
        assert!(product_formula_residual(&op, 400, 2, Exec::Sequential).unwrap().residual < 1e-2);
    }

    #[test]
    fn free_and_mathieu_determinants() {
        assert!(fk_determinant(&EmpiricalMeasure::arcsine(1000)).abs() < 5e-3);
        let cfg = Cocycle2::cos(0.0, 4.0, BaseMap::golden_rotation());
        let dk = density_of_states(&cfg, 400, 10, Exec::Parallel).unwrap();
        assert!(fk_determinant(&dk) >= 2f64.ln() - 2e-2);
    }

    #[test]
    fn log_holder_examples() {
        let circ = EmpiricalMeasure::circle(20_000, 1.0);
        let p = log_holder_profile(&circ, &[0.1, 0.03, 0.01]).unwrap();
        assert!((p.values[0] - 0.1 / TAU * 10f64.ln()).abs() < 1e-2);
        assert!(!p.violation);
        let atom = EmpiricalMeasure::new(vec![(C64::new(0.2, 0.0), 1.0), (C64::new(1.0, 0.0), 1.0)]).unwrap();
        assert!(log_holder_profile(&atom, &[0.1, 0.01, 0.001]).unwrap().violation);
        assert!(log_holder_profile(&atom, &[1.5]).is_err());
    }

    #[test]
    fn capacity_examples() {
        let c = capacity_energy(&EmpiricalMeasure::circle(2000, 1.0), Exec::Parallel).unwrap();
        assert!((c.capacity - 1.0).abs() < 1e-2);
        let a = capacity_energy(&EmpiricalMeasure::arcsine(1000), Exec::Parallel).unwrap();
        assert!((a.capacity - 1.0).abs() < 0.02, "{}", a.capacity);
    }

    #[test]
    fn w_capacity_on_a_period_seven_base() {
        let base = BaseMap::AnnulusPermutation(Arc::new(AnnulusPermutation::from_cycle(&[0, 3, 5, 1, 6, 2, 4]).unwrap()));
        let xs = cycle_points(&base, TorusPoint::new(0.2, 0.3)).unwrap();
        assert_eq!(xs.len(), 7);
        let spec = periodic_w_spectrum(&xs, C64::new(0.0, 0.0), 8.0, 256, Exec::Parallel).unwrap();
        let dk = w_measure(&spec).unwrap();
        assert!((dk.total_mass() - 2.0).abs() < 1e-12);
        let c = capacity_energy(&dk, Exec::Parallel).unwrap();
        assert!((c.capacity / 0.5 - 1.0).abs() < 0.15, "{}", c.capacity);
        assert!((c.capacity - 0.5).abs() < 5e-3, "{}", c.capacity);
    }

    #[test]
    fn circle_projection_examples() {
        let on = EmpiricalMeasure::circle(100, 1.0);
        assert!(circle_projection_compare(&on, 0.9, 64).unwrap().deficit.abs() <= 1e-12);
        let single = EmpiricalMeasure::new(vec![(C64::new(0.9, 0.0), 1.0)]).unwrap();
        let d = circle_projection_compare(&single, 0.85, 2).unwrap();
        // grid {e^{iπ/2}, e^{3iπ/2}} avoids the atom; the maximizing point is on it
        let z = C64::new(0.0, 1.0);
        let expect = (z - 1.0).norm().ln() - (z - 0.9).norm().ln();
        assert!((d.deficit - expect).abs() < 1e-12);
        let m = EmpiricalMeasure::new(vec![(C64::new(0.9, 0.0), 1.0)]).unwrap();
        let at = |z: C64| m.project_to_circle().unwrap().potential(z) - m.potential(z);
        assert!((at(C64::new(-1.0, 0.0)) - (2f64.ln() - 1.9f64.ln())).abs() < 1e-12);
        assert!(d.deficit <= d.bound + 1e-12);
        assert!(matches!(circle_projection_compare(&single, 0.95, 8), Err(Error::SupportViolation(_))));
        let _ = CubeExchange::identity(1);
    }
}
