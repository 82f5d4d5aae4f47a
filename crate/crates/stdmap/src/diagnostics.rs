//! Spectral-measure Wiener test, Aubry duality gap, momentum diffusion, and
//! Lyapunov-exponent distributions.

use crate::cocycle::{grid_lyapunov, Cocycle2, GridAverage};
use crate::dynamics::{BaseMap, MapSpec, TorusPoint};
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::jacobi::orbit_potential;
use crate::linalg::{tridiag, C64};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use std::f64::consts::TAU;

/// Largest truncation for spectral measures.
pub const MAX_TRUNCATION: usize = 600;

/// Spectral measure of δ at the centre site `N/2` for the Dirichlet
/// truncation of `τ + τ* + V` along the orbit of `seed`: atoms `(E_j, |ψ_j(N/2)|²)`.
pub fn spectral_measure(cfg: &Cocycle2, seed: TorusPoint, n: usize) -> Result<Vec<(f64, f64)>> {
    if n == 0 || n > MAX_TRUNCATION {
        return Err(Error::InvalidArgument(format!("truncation size must be in 1..={}", MAX_TRUNCATION)));
    }
    if !cfg.is_real() {
        return Err(Error::InvalidArgument("spectral measures need a selfadjoint operator".into()));
    }
    let v: Vec<f64> = orbit_potential(cfg, seed, n).iter().map(|z| z.re).collect();
    let t = tridiag::symmetric_tridiagonal(&v, &vec![1.0; n - 1], &[n / 2])?;
    Ok(t.values.iter().zip(&t.components[0]).map(|(&e, &c)| (e, c * c)).collect())
}

/// `μ̂_k = Σ_j p_j e^{−ikE_j}` for `k = 0..=k_max`; `μ̂_{−k}` is the conjugate.
/// Beyond k ≈ N/4 the truncation boundary leaks into the coefficients.
pub fn spectral_fourier(atoms: &[(f64, f64)], k_max: usize) -> Vec<C64> {
    let mut ph: Vec<C64> = atoms.iter().map(|a| C64::new(a.1, 0.0)).collect();
    let rot: Vec<C64> = atoms.iter().map(|a| C64::from_polar(1.0, -a.0)).collect();
    let mut out = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        if k > 0 {
            for (p, r) in ph.iter_mut().zip(&rot) {
                *p *= r;
            }
            if k % 256 == 0 {
                // re-anchor the phases against drift
                for (p, a) in ph.iter_mut().zip(atoms) {
                    *p = C64::from_polar(a.1, -(k as f64) * a.0);
                }
            }
        }
        out.push(ph.iter().sum());
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct WienerReport {
    pub lambda: f64,
    pub n_max: usize,
    pub truncation: usize,
    /// `s_n = n⁻¹ Σ_{k=1}^n |μ̂_k|²` for `n = 1..=n_max`.
    pub s: Vec<f64>,
    pub limit: f64,
}

/// Cesàro means of `|μ̂_k|²` for an atomic measure.
pub fn wiener_means(atoms: &[(f64, f64)], n_max: usize) -> Vec<f64> {
    let mu = spectral_fourier(atoms, n_max);
    let mut acc = 0.0;
    (1..=n_max)
        .map(|n| {
            acc += mu[n].norm_sqr();
            acc / n as f64
        })
        .collect()
}

/// Wiener test for the operator over `cfg` at the seed, truncation N.
pub fn wiener_test(cfg: &Cocycle2, seed: TorusPoint, n: usize, n_max: usize) -> Result<WienerReport> {
    let atoms = spectral_measure(cfg, seed, n)?;
    let s = wiener_means(&atoms, n_max);
    let limit = *s.last().unwrap_or(&0.0);
    Ok(WienerReport { lambda: cfg.lambda, n_max, truncation: n, s, limit })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct AubryGap {
    pub lambda: f64,
    pub mu: f64,
    pub mu_dual: f64,
    /// `μ(λ) − log(λ/2) − μ(4/λ)`.
    pub gap: f64,
}

/// Duality gap at E = 0 for the `λ cos` potential over `base`, both
/// exponents grid-averaged at the same resolution.
pub fn aubry_gap(base: &BaseMap, lambda: f64, grid: usize, n: usize, exec: Exec) -> Result<AubryGap> {
    if !(lambda > 2.0) {
        return Err(Error::DomainError("duality gap needs λ > 2".into()));
    }
    let mu = grid_lyapunov(&Cocycle2::cos(0.0, lambda, base.clone()), grid, n, 16, exec)?.mean;
    let mu_dual = grid_lyapunov(&Cocycle2::cos(0.0, 4.0 / lambda, base.clone()), grid, n, 16, exec)?.mean;
    Ok(AubryGap { lambda, mu, mu_dual, gap: mu - (lambda / 2.0).ln() - mu_dual })
}

#[derive(Clone, Debug, Serialize)]
pub struct DiffusionReport {
    pub lambda: f64,
    pub ensemble: usize,
    /// `Var[S_n]` for `n = 1..=n_max`.
    pub variance: Vec<f64>,
    /// Stationary autocorrelations `E[X_0 X_j]`, `j = 0..n_max`.
    pub autocorrelation: Vec<f64>,
    /// `n C(0) + 2 Σ_{j=1}^{n−1} (n − j) C(j)`.
    pub reconstructed: Vec<f64>,
    pub beta: f64,
    /// Standard error of the slope.
    pub beta_se: f64,
    /// Maximum relative gap between reconstructed and direct variance for
    /// `n ≥ n_max/10`.
    pub identity_error: f64,
}

/// Least-squares slope of `log v` against `log n` over the upper half of
/// `1..=len`, with its standard error.
pub fn loglog_slope(v: &[f64]) -> (f64, f64) {
    let lo = v.len() / 2;
    let pts: Vec<(f64, f64)> = (lo..v.len()).filter(|&i| v[i] > 0.0).map(|i| (((i + 1) as f64).ln(), v[i].ln())).collect();
    let m = pts.len() as f64;
    if m < 3.0 {
        return (f64::NAN, f64::NAN);
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let b = sxy / sxx;
    let res: f64 = pts.iter().map(|p| (p.1 - my - b * (p.0 - mx)).powi(2)).sum();
    (b, (res / (m - 2.0) / sxx).sqrt())
}

fn diffusion_stats(lambda: f64, xs: &[Vec<f64>], exec: Exec) -> DiffusionReport {
    let ens = xs.len();
    let n_max = xs[0].len();
    let mean = xs.iter().flatten().sum::<f64>() / (ens * n_max) as f64;
    let centred: Vec<Vec<f64>> = xs.iter().map(|r| r.iter().map(|x| x - mean).collect()).collect();
    let mut variance = vec![0.0; n_max];
    let mut sums = vec![0.0; ens];
    for (n, var) in variance.iter_mut().enumerate() {
        for (s, row) in sums.iter_mut().zip(&centred) {
            *s += row[n];
        }
        let m = sums.iter().sum::<f64>() / ens as f64;
        *var = sums.iter().map(|s| (s - m).powi(2)).sum::<f64>() / (ens - 1) as f64;
    }
    let autocorrelation = exec::map_indexed(exec, n_max, |j| {
        let mut s = 0.0;
        for row in &centred {
            for t in 0..n_max - j {
                s += row[t] * row[t + j];
            }
        }
        s / (ens * (n_max - j)) as f64
    });
    let mut reconstructed = Vec::with_capacity(n_max);
    let (mut a, mut b) = (0.0, 0.0);
    // R(n) = n C0 + 2 Σ_{j<n} (n − j) C_j, updated with Σ C_j and Σ j C_j
    for n in 1..=n_max {
        if n >= 2 {
            a += autocorrelation[n - 1];
            b += (n - 1) as f64 * autocorrelation[n - 1];
        }
        reconstructed.push(n as f64 * autocorrelation[0] + 2.0 * (n as f64 * a - b));
    }
    let identity_error = (n_max / 10..n_max)
        .filter(|&i| variance[i] > 0.0)
        .map(|i| (reconstructed[i] - variance[i]).abs() / variance[i])
        .fold(0.0, f64::max);
    let (beta, beta_se) = loglog_slope(&variance);
    DiffusionReport { lambda, ensemble: ens, variance, autocorrelation, reconstructed, beta, beta_se, identity_error }
}

fn kicks(lambda: f64, ensemble: usize, n_max: usize, seed: u64, exec: Exec) -> Vec<Vec<f64>> {
    let spec = MapSpec::hamiltonian(lambda);
    exec::map_indexed(exec, ensemble, |i| {
        let mut rng = crate::rng::stream(seed, i as u64);
        let mut p = TorusPoint::new(rng.gen::<f64>() * TAU, rng.gen::<f64>() * TAU);
        let mut row = Vec::with_capacity(n_max);
        for _ in 0..n_max {
            row.push(lambda * spec.kick.value(p.x));
            p = spec.step(p);
        }
        row
    })
}

/// `S_n = Σ_{j<n} λ f(x_j)` for the Hamiltonian-form map from uniform seeds.
pub fn diffusion(lambda: f64, ensemble: usize, n_max: usize, seed: u64, exec: Exec) -> Result<DiffusionReport> {
    if ensemble < 2 || n_max < 4 {
        return Err(Error::InvalidArgument("need ensemble ≥ 2 and n_max ≥ 4".into()));
    }
    Ok(diffusion_stats(lambda, &kicks(lambda, ensemble, n_max, seed, exec), exec))
}

/// Same statistics after a global shuffle of all kicks, an i.i.d. control.
pub fn diffusion_shuffled(lambda: f64, ensemble: usize, n_max: usize, seed: u64, exec: Exec) -> Result<DiffusionReport> {
    if ensemble < 2 || n_max < 4 {
        return Err(Error::InvalidArgument("need ensemble ≥ 2 and n_max ≥ 4".into()));
    }
    let mut all: Vec<f64> = kicks(lambda, ensemble, n_max, seed, exec).into_iter().flatten().collect();
    all.shuffle(&mut crate::rng::stream(seed, u64::MAX));
    let rows: Vec<Vec<f64>> = all.chunks(n_max).map(|c| c.to_vec()).collect();
    Ok(diffusion_stats(lambda, &rows, exec))
}

#[derive(Clone, Debug, Serialize)]
pub struct LyapunovDistribution {
    pub lambda: f64,
    pub grid: usize,
    pub n: usize,
    /// Sorted raw exponents.
    pub raw: Vec<f64>,
    pub mean: f64,
    pub std_dev: f64,
    /// Mass of `|X| < 0.005`.
    pub atom_at_zero: f64,
}

/// Bin half-width for the zero-exponent atom.
pub const ZERO_BIN: f64 = 0.005;

impl LyapunovDistribution {
    pub fn from_grid(lambda: f64, n: usize, g: &GridAverage) -> Self {
        let k = g.sorted.len() as f64;
        let var = g.sorted.iter().map(|v| (v - g.mean).powi(2)).sum::<f64>() / (k - 1.0).max(1.0);
        LyapunovDistribution { lambda, grid: g.g, n, raw: g.sorted.clone(), mean: g.mean, std_dev: var.sqrt(), atom_at_zero: g.atom_at_zero(ZERO_BIN) }
    }

    pub fn cdf(&self, v: f64) -> f64 {
        self.raw.partition_point(|&s| s <= v) as f64 / self.raw.len().max(1) as f64
    }

    /// CDF of `X* = (X − E X)/√Var X`.
    pub fn normalized_cdf(&self, v: f64) -> f64 {
        self.cdf(self.mean + v * self.std_dev)
    }
}

/// Exponents of the standard map's derivative cocycle over a grid of seeds.
pub fn lyapunov_cdf(lambda: f64, grid: usize, n: usize, exec: Exec) -> Result<LyapunovDistribution> {
    let g = grid_lyapunov(&Cocycle2::jacobian(&MapSpec::standard(lambda)), grid, n, 16, exec)?;
    Ok(LyapunovDistribution::from_grid(lambda, n, &g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, QuadOptions};

    fn golden(l: f64) -> Cocycle2 {
        Cocycle2::cos(0.0, l, BaseMap::golden_rotation())
    }

    #[test]
    fn free_fourier_coefficients() {
        let atoms = spectral_measure(&golden(0.0), TorusPoint::new(0.0, 0.0), 400).unwrap();
        let mu = spectral_fourier(&atoms, 60);
        assert!((mu[0] - 1.0).norm() < 1e-12);
        for k in [1usize, 7, 30, 60] {
            let re = integrate(|t| (k as f64 * 2.0 * t.cos()).cos(), 0.0, TAU, QuadOptions::default()).unwrap() / TAU;
            let im = -integrate(|t| (k as f64 * 2.0 * t.cos()).sin(), 0.0, TAU, QuadOptions::default()).unwrap() / TAU;
            assert!((mu[k] - C64::new(re, im)).norm() < 1e-6, "k = {}", k);
        }
    }

    #[test]
    fn pure_point_surrogate() {
        assert!(wiener_means(&[(0.7, 1.0)], 100).iter().all(|&s| (s - 1.0).abs() < 1e-12));
        let (p, q, d) = (0.3, 0.7, 0.9);
        let s = wiener_means(&[(0.0, p), (d, q)], 500);
        for n in [1usize, 17, 500] {
            let sum_cos: f64 = (1..=n).map(|k| (k as f64 * d).cos()).sum();
            let exact = p * p + q * q + 2.0 * p * q * sum_cos / n as f64;
            assert!((s[n - 1] - exact).abs() < 1e-10);
        }
    }

    #[test]
    fn fourier_long_range_is_stable() {
        let atoms = [(0.3, 0.5), (1.7, 0.5)];
        let mu = spectral_fourier(&atoms, 5000);
        let exact = C64::from_polar(0.5, -5000.0 * 0.3) + C64::from_polar(0.5, -5000.0 * 1.7);
        assert!((mu[5000] - exact).norm() < 1e-10);
    }

    #[test]
    fn wiener_transition_for_mathieu() {
        let o = TorusPoint::new(0.0, 0.0);
        let sub = wiener_test(&golden(1.0), o, 400, 10_000).unwrap();
        let sup = wiener_test(&golden(4.0), o, 400, 10_000).unwrap();
        assert!(sub.limit < 0.02, "{}", sub.limit);
        assert!(sup.limit > 0.1, "{}", sup.limit);
        assert!(sub.s.iter().all(|&s| (0.0..=1.0 + 1e-12).contains(&s)));
    }

    #[test]
    fn wiener_for_the_standard_map() {
        let cfg = Cocycle2::cos(0.0, 6.0, BaseMap::standard(6.0));
        let r = wiener_test(&cfg, TorusPoint::new(0.3, 0.2), 400, 10_000).unwrap();
        assert!(r.limit > 0.01, "{}", r.limit);
    }

    #[test]
    fn aubry_gap_mathieu_and_standard() {
        let m = aubry_gap(&BaseMap::golden_rotation(), 4.0, 10, 100_000, Exec::Parallel).unwrap();
        assert!(m.gap.abs() < 2e-2, "{:?}", m);
        let s = aubry_gap(&BaseMap::standard(10.0), 10.0, 20, 20_000, Exec::Parallel).unwrap();
        assert!(s.gap.abs() < 0.05, "{:?}", s);
        assert!(aubry_gap(&BaseMap::golden_rotation(), 1.5, 4, 10, Exec::Sequential).is_err());
    }

    #[test]
    fn diffusion_without_kicks_is_zero() {
        let r = diffusion(0.0, 16, 20, 1, Exec::Sequential).unwrap();
        assert!(r.variance.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn diffusion_identity_and_controls() {
        let r = diffusion(10.0, 10_000, 200, 2, Exec::Parallel).unwrap();
        assert!(r.identity_error < 0.05, "{}", r.identity_error);
        assert!(r.autocorrelation[0] > 0.0);
        let long = diffusion(10.0, 1000, 1000, 3, Exec::Parallel).unwrap();
        assert!((0.8..=1.3).contains(&long.beta), "{}", long.beta);
        let sh = diffusion_shuffled(10.0, 1000, 1000, 3, Exec::Parallel).unwrap();
        assert!((sh.beta - 1.0).abs() < 0.1, "{}", sh.beta);
    }

    #[test]
    fn loglog_slope_recovers_powers() {
        let v: Vec<f64> = (1..=200).map(|n| 3.0 * (n as f64).powf(1.4)).collect();
        let (b, se) = loglog_slope(&v);
        assert!((b - 1.4).abs() < 1e-12 && se < 1e-10);
    }

    #[test]
    fn kam_atom_in_the_exponent_distribution() {
        let low = lyapunov_cdf(2.0, 40, 100_000, Exec::Parallel).unwrap();
        assert!(low.atom_at_zero > 0.1, "{}", low.atom_at_zero);
        let high = lyapunov_cdf(10.0, 40, 100_000, Exec::Parallel).unwrap();
        assert!(high.atom_at_zero < 0.05, "{}", high.atom_at_zero);
        let mut prev = 0.0;
        for k in -40..=40 {
            let c = high.normalized_cdf(k as f64 * 0.1);
            assert!(c >= prev);
            prev = c;
        }
        assert_eq!(high.cdf(-1.0), 0.0);
        assert_eq!(high.cdf(100.0), 1.0);
    }
}
