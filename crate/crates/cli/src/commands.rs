//! Subcommand parameters and their runners.

use crate::config::{config_err, parse_range, Cx};
use crate::output::{num, Artifacts, Table};
use anyhow::Result;
use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::f64::consts::PI;
use std::sync::Arc;
use stdmap::bounds;
use stdmap::cocycle::{grid_lyapunov, grid_seeds, herman_scan, Cocycle2, HermanOptions};
use stdmap::complex_analysis::{self as ca, harnack_harness, CircleMeasureSeries, HarnackVariant, Sector};
use stdmap::diagnostics::{aubry_gap, diffusion, diffusion_shuffled, lyapunov_cdf, wiener_test};
use stdmap::dynamics::orbit;
use stdmap::jacobi::{cycle_points, periodic_w_spectrum, spectrum_curves, w_spectrum_scan, PeriodicJacobi, ProductOperator, WGrid};
use stdmap::lax::{lax_approximate, periodic_lyapunov, permutation_experiment, rho_distance, AnnulusPermutation, PermutationMode};
use stdmap::potential::{capacity_energy, density_of_states, product_formula_residual, thouless_residual, w_measure};
use stdmap::suite::period_seven_base;
use stdmap::{BaseMap, Exec, MapSpec, TorusPoint, C64};

/// Parses a base-map name: `golden`, `standard`, `identity`, `period7`,
/// `rotation:<alpha>`, `annulus:<cycle order>` or `lax:<n>` (cube-exchange
/// approximation of the standard map at `lambda`).
pub fn base_map(spec: &str, lambda: f64, exec: Exec) -> Result<BaseMap> {
    let (head, arg) = spec.split_once(':').map_or((spec, None), |(h, a)| (h, Some(a)));
    let bad = || config_err(format!("bad base map {:?}", spec));
    Ok(match (head, arg) {
        ("golden", None) => BaseMap::golden_rotation(),
        ("standard", None) => BaseMap::standard(lambda),
        ("identity", None) => BaseMap::Identity,
        ("period7", None) => period_seven_base(),
        ("rotation", Some(a)) => BaseMap::Rotation { alpha: a.trim().parse().map_err(|_| bad())? },
        ("annulus", Some(a)) => {
            let order: Vec<usize> = a.split(',').map(|s| s.trim().parse()).collect::<Result<_, _>>().map_err(|_| bad())?;
            BaseMap::AnnulusPermutation(Arc::new(AnnulusPermutation::from_cycle(&order).map_err(|e| config_err(e.to_string()))?))
        }
        ("lax", Some(a)) => {
            let n: usize = a.trim().parse().map_err(|_| bad())?;
            BaseMap::CubeExchange(Arc::new(lax_approximate(&BaseMap::standard(lambda), n, exec)?.cube))
        }
        _ => return Err(bad()),
    })
}

fn pt(p: TorusPoint) -> serde_json::Value {
    json!([num(p.x), num(p.y)])
}

// ---------------------------------------------------------------- lyapunov

#[derive(Args, Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct LyapunovParams {
    #[arg(long, default_value_t = 10.0)]
    pub lambda: f64,
    /// Seeds per axis.
    #[arg(long, default_value_t = 40)]
    pub grid: usize,
    #[arg(long, default_value_t = 100_000)]
    pub steps: usize,
    #[arg(long, default_value_t = 16)]
    pub renorm: usize,
    /// Optional `start:stop:step` sweep of λ at the same grid and steps.
    #[arg(long)]
    pub sweep: Option<String>,
    /// Orbit points per seed for a phase portrait (0 = none).
    #[arg(long, default_value_t = 0)]
    pub portrait: usize,
    /// Seeds per axis for the portrait.
    #[arg(long, default_value_t = 6)]
    pub portrait_grid: usize,
}

pub fn lyapunov(p: &LyapunovParams, exec: Exec) -> Result<Artifacts> {
    let g = grid_lyapunov(&Cocycle2::jacobian(&MapSpec::standard(p.lambda)), p.grid, p.steps, p.renorm, exec)?;
    let floor = (p.lambda / 2.0).ln();
    let mut cells = Table::new("lyapunov", &["ix", "iy", "x", "y", "exponent", "std_error"]);
    for (k, (seed, c)) in grid_seeds(p.grid).iter().zip(&g.cells).enumerate() {
        let (v, se) = c.as_ref().map_or((f64::NAN, f64::NAN), |e| (e.value, e.std_error));
        cells.push(vec![(k % p.grid).into(), (k / p.grid).into(), seed.x.into(), seed.y.into(), v.into(), se.into()]);
    }
    let mut report = json!({
        "lambda": p.lambda,
        "grid": p.grid,
        "steps": p.steps,
        "mean": num(g.mean),
        "std_error_mean": num(g.std_error_mean()),
        "invalid": g.invalid,
        "log_half_lambda": num(floor),
        "excess": num(g.mean - floor),
        "upper": bounds::hadamard_c(2.0, p.lambda).map(|c| num(floor + c)).unwrap_or(serde_json::Value::Null),
    });
    let mut a = Artifacts::new(serde_json::Value::Null).with(cells);
    if let Some(s) = &p.sweep {
        let mut t = Table::new("lyapunov_sweep", &["lambda", "mean", "log_half_lambda", "excess", "invalid"]);
        for l in parse_range(s)? {
            let g = grid_lyapunov(&Cocycle2::jacobian(&MapSpec::standard(l)), p.grid, p.steps, p.renorm, exec)?;
            let f = (l / 2.0).ln();
            t.push(vec![l.into(), g.mean.into(), f.into(), (g.mean - f).into(), g.invalid.into()]);
        }
        report["sweep_points"] = t.rows.len().into();
        a = a.with(t);
    }
    if p.portrait > 0 {
        let map = BaseMap::standard(p.lambda);
        let mut t = Table::new("orbit", &["seed", "k", "x", "y"]);
        for (s, &seed) in grid_seeds(p.portrait_grid).iter().enumerate() {
            for (k, q) in orbit(seed, &map, p.portrait).iter().enumerate() {
                t.push(vec![s.into(), k.into(), q.x.into(), q.y.into()]);
            }
        }
        a = a.with(t);
    }
    a.report = report;
    Ok(a)
}

// ------------------------------------------------------------------ bounds

#[derive(Args, Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsParams {
    /// `start:stop:step`.
    #[arg(long, default_value = "0.5:12:0.1")]
    pub lambda_grid: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub e: f64,
}

pub fn bounds_cmd(p: &BoundsParams, _exec: Exec) -> Result<Artifacts> {
    let grid = parse_range(&p.lambda_grid)?;
    if grid.iter().any(|&l| l <= 0.0) {
        return Err(config_err("lambda must be positive"));
    }
    let mut t = Table::new("bounds", &["lambda", "m", "c_e", "c_lambda", "hadamard_c", "c2", "entropy_lower", "entropy_upper", "pesin_lower"]);
    let mut crossing = None;
    let mut prev: Option<(f64, f64)> = None;
    for &l in &grid {
        let r = bounds::report(p.e, l)?;
        t.push(vec![l.into(), r.m.into(), r.c_e.into(), r.c_lambda.into(), r.hadamard_c.into(), r.c2.into(), r.entropy_lower.into(), r.entropy_upper.into(), r.pesin_lower.unwrap_or(f64::NAN).into()]);
        if let Some((l0, c0)) = prev {
            if crossing.is_none() && c0 < 0.0 && r.entropy_lower >= 0.0 {
                crossing = Some(l0 + (l - l0) * (-c0) / (r.entropy_lower - c0));
            }
        }
        prev = Some((l, r.entropy_lower));
    }
    let l0 = bounds::lambda0();
    let report = json!({
        "lambda0": l0,
        "c_at_lambda0": bounds::c_lambda(l0),
        "limit": (2.0 / 3f64.sqrt()).ln(),
        "entropy_lower_at_lambda0": bounds::entropy_lower(l0),
        "entropy_lower_crossing": crossing.map(num),
        "points": grid.len(),
    });
    Ok(Artifacts::new(report).with(t))
}

// --------------------------------------------------------------------- lax

#[derive(Args, Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct LaxParams {
    #[arg(long, default_value_t = 3.0)]
    pub lambda: f64,
    /// Cells per axis.
    #[arg(long, default_value_t = 16)]
    pub n: usize,
    /// Sample points for the ρ distance.
    #[arg(long, default_value_t = 4096)]
    pub samples: usize,
    /// Nodes per cell for the periodic exponent of `λ cos` at E = 0.
    #[arg(long, default_value_t = 4)]
    pub q: usize,
    /// Annulus count for the cyclic permutation experiment (0 = skip).
    #[arg(long, default_value_t = 0)]
    pub experiment_n: usize,
    /// Sampled cycles for the experiment (0 = exhaustive).
    #[arg(long, default_value_t = 0)]
    pub experiment_samples: usize,
    #[arg(long, default_value_t = 4.0)]
    pub experiment_lambda: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

pub fn lax(p: &LaxParams, exec: Exec) -> Result<Artifacts> {
    let target = BaseMap::standard(p.lambda);
    let l = lax_approximate(&target, p.n, exec)?;
    let cube = Arc::new(l.cube.clone());
    let base = BaseMap::CubeExchange(cube.clone());
    let rho = rho_distance(&target, &base, p.samples);
    let exponent = periodic_lyapunov(&base, &Cocycle2::cos(0.0, p.lambda, base.clone()), p.q)?;
    let mut t = Table::new("lax", &["cell", "image", "x", "y", "image_x", "image_y"]);
    for (i, &j) in cube.perm.iter().enumerate() {
        let (a, b) = (cube.cell_center(i), cube.cell_center(j));
        t.push(vec![i.into(), j.into(), a.x.into(), a.y.into(), b.x.into(), b.y.into()]);
    }
    let mut report = json!({
        "lambda": p.lambda,
        "n": p.n,
        "cyclic": cube.is_cyclic(),
        "cycles": cube.cycles().len(),
        "matched_cycles": l.matched_cycles,
        "repair_swaps": l.repair_swaps,
        "exact_matching": l.exact_matching,
        "matched_overlap": l.matched_overlap,
        "rho": num(rho),
        "cell_diameter": num(cube.cell_size() * 2f64.sqrt()),
        "exponent": num(exponent),
        "log_half_lambda": num((p.lambda / 2.0).ln()),
    });
    let mut a = Artifacts::new(serde_json::Value::Null).with(t);
    if p.experiment_n > 0 {
        let mode = if p.experiment_samples == 0 { PermutationMode::Exhaustive } else { PermutationMode::Sampled { count: p.experiment_samples, seed: p.seed } };
        let r = permutation_experiment(p.experiment_n, p.experiment_lambda, mode, p.q, exec)?;
        let mut e = Table::new("lax_permutations", &["rank", "exceedance"]);
        for (k, &v) in r.exceedances.iter().enumerate() {
            e.push(vec![k.into(), v.into()]);
        }
        report["experiment"] = json!({"n": p.experiment_n, "lambda": p.experiment_lambda, "count": r.exceedances.len(), "mean": num(r.mean), "min": num(r.min), "max": num(r.max), "fraction_negative": num(r.fraction_negative)});
        a = a.with(e);
    }
    a.report = report;
    Ok(a)
}

// ---------------------------------------------------------------- spectrum

#[derive(Args, Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumParams {
    /// Diagonal b_n over one period, `re,im` each (repeat the flag).
    #[arg(long = "b", allow_hyphen_values = true, default_values_t = [Cx(1.0, 0.0), Cx(-0.5, 0.3), Cx(0.2, -0.1)])]
    pub b: Vec<Cx>,
    /// Off-diagonal a_n; empty means 1.
    #[arg(long = "a", allow_hyphen_values = true)]
    pub a: Vec<Cx>,
    /// Off-diagonal c_n; empty means 1.
    #[arg(long = "c", allow_hyphen_values = true)]
    pub c: Vec<Cx>,
    /// Angles θ on the unit circle of w.
    #[arg(long, default_value_t = 256)]
    pub m: usize,
}

pub fn spectrum(p: &SpectrumParams, exec: Exec) -> Result<Artifacts> {
    let n = p.b.len();
    let side = |v: &[Cx], what: &str| -> Result<Vec<C64>> {
        match v.len() {
            0 => Ok(vec![C64::new(1.0, 0.0); n]),
            k if k == n => Ok(v.iter().map(|z| z.c64()).collect()),
            _ => Err(config_err(format!("{} needs {} entries", what, n))),
        }
    };
    let j = PeriodicJacobi::new(side(&p.a, "a")?, p.b.iter().map(|z| z.c64()).collect(), side(&p.c, "c")?)?;
    let s = spectrum_curves(&j, p.m, exec)?;
    let mut t = Table::new("spectrum", &["re", "im", "theta", "curve"]);
    for (th, i, z) in s.points() {
        t.push(vec![z.re.into(), z.im.into(), th.into(), i.into()]);
    }
    let report = json!({
        "p": j.p(),
        "curves": s.curves(),
        "selfadjoint": j.is_selfadjoint(1e-12),
        "max_abs_imag": num(s.max_abs_imag()),
        "near_collisions": s.near_collisions,
        "projection_real": num(s.projection_measure(0.0)),
        "projection_imag": num(s.projection_measure(PI / 2.0)),
        "polya_bound": num(j.polya_bound()),
    });
    Ok(Artifacts::new(report).with(t))
}

// --------------------------------------------------------------- wspectrum

#[derive(Args, Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct WSpectrumParams {
    /// Potential strength of `λ cos`.
    #[arg(long, default_value_t = 2.1)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub e: f64,
    /// Base map name; `lax` uses a `lax_k`×`lax_k` cube exchange.
    #[arg(long, default_value = "lax")]
    pub base: String,
    #[arg(long, default_value_t = 7)]
    pub lax_k: usize,
    /// λ of the standard map being approximated; defaults to `lambda`.
    #[arg(long)]
    pub map_lambda: Option<f64>,
    /// Grid points per axis of the w scan.
    #[arg(long, default_value_t = 400)]
    pub wgrid: usize,
    #[arg(long, default_value_t = 2.0)]
    pub half_width: f64,
    /// Exponent threshold marking a grid point as spectrum.
    #[arg(long, default_value_t = 0.02)]
    pub tol: f64,
    /// Angles for the exact w-density atoms.
    #[arg(long, default_value_t = 256)]
    pub angles: usize,
    #[arg(long, default_value_t = 0.2)]
    pub seed_x: f64,
    #[arg(long, default_value_t = 0.3)]
    pub seed_y: f64,
}

pub fn wspectrum(p: &WSpectrumParams, exec: Exec) -> Result<Artifacts> {
    let name = if p.base == "lax" { format!("lax:{}", p.lax_k) } else { p.base.clone() };
    let base = base_map(&name, p.map_lambda.unwrap_or(p.lambda), exec)?;
    let xs = cycle_points(&base, TorusPoint::new(p.seed_x, p.seed_y))?;
    let e = C64::new(p.e, 0.0);
    let f = w_spectrum_scan(&xs, e, p.lambda, WGrid::square(p.half_width, p.wgrid), p.tol, exec)?;
    let mut t = Table::new("wspectrum", &["i", "j", "re", "im", "exponent", "inside"]);
    for (k, (&v, &inside)) in f.exponent.iter().zip(&f.inside).enumerate() {
        let (i, j) = (k % p.wgrid, k / p.wgrid);
        let w = f.grid.point(i, j);
        t.push(vec![i.into(), j.into(), w.re.into(), w.im.into(), v.into(), inside.into()]);
    }
    let s = periodic_w_spectrum(&xs, e, p.lambda, p.angles, exec)?;
    let mut m = Table::new("wspectrum_measure", &["re", "im", "weight", "theta"]);
    let unit = s.atoms().first().map_or(0.0, |a| a.1);
    for (th, roots) in s.thetas.iter().zip(&s.roots) {
        for w in roots {
            m.push(vec![w.re.into(), w.im.into(), unit.into(), (*th).into()]);
        }
    }
    let cap = capacity_energy(&w_measure(&s)?, exec)?;
    let report = json!({
        "lambda": p.lambda,
        "base": name,
        "period": xs.len(),
        "components": f.components,
        "inside_points": f.inside.iter().filter(|&&b| b).count(),
        "spacing": num(f.grid.spacing()),
        "bands_on_circle": s.bands_on_circle,
        "bands_off_circle": s.bands_off_circle,
        "capacity": num(cap.capacity),
        "energy": num(cap.energy),
        "sqrt_two_over_lambda": num((2.0 / p.lambda).sqrt()),
    });
    Ok(Artifacts::new(report).with(t).with(m))
}

// --------------------------------------------------------------------- dos

#[derive(Args, Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct DosParams {
    #[arg(long, default_value_t = 4.0)]
    pub lambda: f64,
    #[arg(long, default_value = "golden")]
    pub base: String,
    /// Truncation size.
    #[arg(long, default_value_t = 400)]
    pub n: usize,
    /// Seeds pooled.
    #[arg(long, default_value_t = 50)]
    pub m: usize,
}

fn measure_table(name: &str, atoms: &[(C64, f64)]) -> Table {
    let mut t = Table::new(name, &["re", "im", "weight"]);
    for &(z, w) in atoms {
        t.push(vec![z.re.into(), z.im.into(), w.into()]);
    }
    t
}

pub fn dos(p: &DosParams, exec: Exec) -> Result<Artifacts> {
    let base = base_map(&p.base, p.lambda, exec)?;
    let dk = density_of_states(&Cocycle2::cos(0.0, p.lambda, base), p.n, p.m, exec)?;
    let (lo, hi) = dk.atoms.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), z| (a.min(z.0.re), b.max(z.0.re)));
    let report = json!({
        "lambda": p.lambda,
        "atoms": dk.atoms.len(),
        "mass": num(dk.total_mass()),
        "min_re": num(lo),
        "max_re": num(hi),
        "max_abs_im": num(dk.atoms.iter().map(|a| a.0.im.abs()).fold(0.0, f64::max)),
    });
    Ok(Artifacts::new(report).with(measure_table("dos", &dk.atoms)))
}

// ---------------------------------------------------------------- thouless

#[derive(Args, Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ThoulessParams {
    #[arg(long, default_value_t = 4.0)]
    pub lambda: f64,
    #[arg(long, default_value = "golden")]
    pub base: String,
    /// Off-spectrum energies `re,im` (repeat the flag).
    #[arg(long = "energy", allow_hyphen_values = true, default_values_t = [Cx(0.0, 4.0), Cx(7.0, 0.0)])]
    pub energies: Vec<Cx>,
    #[arg(long, default_value_t = 400)]
    pub n: usize,
    #[arg(long, default_value_t = 50)]
    pub m: usize,
    /// Orbit length for the exponent side.
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
}

pub fn thouless(p: &ThoulessParams, exec: Exec) -> Result<Artifacts> {
    let base = base_map(&p.base, p.lambda, exec)?;
    let es: Vec<C64> = p.energies.iter().map(|z| z.c64()).collect();
    let r = thouless_residual(&Cocycle2::cos(0.0, p.lambda, base), &es, p.n, p.m, p.steps, exec)?;
    let mut t = Table::new("thouless", &["re", "im", "exponent", "potential"]);
    for &(z, l, rhs) in &r.points {
        t.push(vec![z.re.into(), z.im.into(), l.into(), rhs.into()]);
    }
    Ok(Artifacts::new(json!({"lambda": p.lambda, "residual": num(r.residual)})).with(t))
}

// ----------------------------------------------------------------- detprod

#[derive(Args, Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct DetProdParams {
    /// One period of the first factor's potential.
    #[arg(long = "v1", allow_hyphen_values = true, default_values_t = [Cx(5.0, 0.0)])]
    pub v1: Vec<Cx>,
    /// One period of the second factor's potential.
    #[arg(long = "v2", allow_hyphen_values = true, default_values_t = [Cx(5.0, 0.0)])]
    pub v2: Vec<Cx>,
    /// Length of the sampled potentials.
    #[arg(long, default_value_t = 2000)]
    pub length: usize,
    /// Truncation size.
    #[arg(long, default_value_t = 400)]
    pub n: usize,
    #[arg(long, default_value_t = 4)]
    pub windows: usize,
}

pub fn detprod(p: &DetProdParams, exec: Exec) -> Result<Artifacts> {
    if p.v1.is_empty() || p.v2.is_empty() {
        return Err(config_err("v1 and v2 need at least one value"));
    }
    let rep = |v: &[Cx]| (0..p.length).map(|k| v[k % v.len()].c64()).collect::<Vec<_>>();
    let r = product_formula_residual(&ProductOperator::new(rep(&p.v1), rep(&p.v2))?, p.n, p.windows, exec)?;
    Ok(Artifacts::new(json!({
        "logdet_product": num(r.logdet_product),
        "logdet_first": num(r.logdet_first),
        "logdet_second": num(r.logdet_second),
        "residual": num(r.residual),
    })))
}

// ------------------------------------------------------------------ jensen

#[derive(Args, Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct JensenParams {
    /// `polynomial` (zeros from `roots`) or `cocycle` (g_n over a Lax base).
    #[arg(long, default_value = "polynomial")]
    pub mode: String,
    #[arg(long = "root", allow_hyphen_values = true, default_values_t = [Cx(0.5, 0.3), Cx(-0.9, 0.7), Cx(-0.2, -0.25)])]
    pub roots: Vec<Cx>,
    #[arg(long, default_value_t = 0.5)]
    pub r: f64,
    #[arg(long, default_value_t = 1.6)]
    pub big_r: f64,
    #[arg(long, default_value_t = 5)]
    pub sectors: usize,
    /// Initial quadrature steps per path.
    #[arg(long, default_value_t = 8)]
    pub steps: usize,
    #[arg(long, default_value_t = 4.0)]
    pub lambda: f64,
    /// Cocycle length n of g_n.
    #[arg(long = "length", default_value_t = 6)]
    pub n: usize,
    /// Cells per axis of the Lax base.
    #[arg(long, default_value_t = 8)]
    pub lax_n: usize,
    /// Height of the seeds in cocycle mode.
    #[arg(long, default_value_t = 1.3)]
    pub y: f64,
}

pub fn jensen(p: &JensenParams, exec: Exec) -> Result<Artifacts> {
    let sectors = Sector::partition(p.r, p.big_r, p.sectors)?;
    let mut t = Table::new("jensen", &["sector", "alpha", "beta", "lhs", "rhs", "residual", "zero_count", "angular", "radial"]);
    let mut worst = 0.0f64;
    let mut total = 0.0;
    let mut push = |j: usize, s: &Sector, r: ca::JensenReport, t: &mut Table| {
        worst = worst.max(r.residual());
        total += r.difference();
        t.push(vec![j.into(), s.alpha.into(), s.beta.into(), r.lhs.into(), r.rhs.into(), r.residual().into(), r.args.zero_count().into(), r.args.angular().into(), r.args.radial().into()]);
    };
    let annulus = match p.mode.as_str() {
        "polynomial" => {
            let roots: Vec<C64> = p.roots.iter().map(|z| z.c64()).collect();
            let g = |z: C64| roots.iter().fold(C64::new(1.0, 0.0), |acc, r| acc * (z - r));
            for (j, s) in sectors.iter().enumerate() {
                push(j, s, ca::jensen_sector(g, s, p.steps)?, &mut t);
            }
            Some(ca::annulus_jensen_difference(g, p.r, p.big_r, p.steps)?)
        }
        "cocycle" => {
            let base = base_map(&format!("lax:{}", p.lax_n), p.lambda, exec)?;
            let h = std::f64::consts::TAU / p.sectors as f64;
            for (j, s) in sectors.iter().enumerate() {
                let ph = ca::orbit_phases(&base, TorusPoint::new(h * (j as f64 + 0.5), p.y), p.n);
                push(j, s, ca::jensen_sector(|z| ca::g_n(&ph, C64::new(0.0, 0.0), p.lambda, z), s, p.steps)?, &mut t);
            }
            None
        }
        other => return Err(config_err(format!("unknown jensen mode {:?}", other))),
    };
    let report = json!({
        "mode": p.mode,
        "sectors": p.sectors,
        "max_residual": num(worst),
        "partition_sum": num(total),
        "annulus": annulus.map(num),
        "partition_error": annulus.map(|a| num((a - total).abs())),
    });
    Ok(Artifacts::new(report).with(t))
}

// ---------------------------------------------------------------- harmonic

#[derive(Args, Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct HarmonicParams {
    /// Harnack bound variant, `a` or `b`.
    #[arg(long, default_value = "a")]
    pub variant: String,
    #[arg(long = "radius", default_values_t = [2.0, 3.0, 5.0])]
    pub radii: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 6)]
    pub degree: usize,
    #[arg(long, default_value_t = 0x4a2)]
    pub seed: u64,
    /// Amplitude a of the push-forward `x ↦ x + a sin x` continued off the circle.
    #[arg(long, default_value_t = 0.5)]
    pub kick: f64,
    #[arg(long, default_value_t = 64)]
    pub n_max: usize,
    /// Radii `start:stop:step` along the ray of the continuation.
    #[arg(long, default_value = "0.2:3.0:0.1")]
    pub line: String,
    #[arg(long, default_value_t = 0.7, allow_hyphen_values = true)]
    pub angle: f64,
}

pub fn harmonic(p: &HarmonicParams, exec: Exec) -> Result<Artifacts> {
    let variant = match p.variant.as_str() {
        "a" => HarnackVariant::A,
        "b" => HarnackVariant::B,
        other => return Err(config_err(format!("unknown variant {:?}", other))),
    };
    let mut h = Table::new("harmonic", &["r", "trials", "violations", "worst_margin"]);
    let mut violations = 0;
    for &r in &p.radii {
        let x = harnack_harness(r, variant, p.trials, p.degree, p.seed, exec)?;
        violations += x.violations;
        h.push(vec![r.into(), x.trials.into(), x.violations.into(), x.worst_margin.into()]);
    }
    let kick = p.kick;
    let series = CircleMeasureSeries::from_pushforward(|x| kick * x.sin(), p.n_max, 4 * p.n_max.max(16));
    let mut c = Table::new("harmonic_continuation", &["t", "re", "im", "alpha", "ok"]);
    let mut failed = 0;
    for t in parse_range(&p.line)? {
        let z = C64::from_polar(t, p.angle);
        let (alpha, ok) = match series.continuation(z) {
            Ok(v) => (v.alpha, true),
            Err(e) if e.is_numerical() => (f64::NAN, false),
            Err(e) => return Err(e.into()),
        };
        failed += usize::from(!ok);
        c.push(vec![t.into(), z.re.into(), z.im.into(), alpha.into(), ok.into()]);
    }
    let report = json!({
        "variant": p.variant,
        "violations": violations,
        "continuation_failures": failed,
        "growth_plus": num(series.growth(1)),
        "growth_minus": num(series.growth(-1)),
    });
    Ok(Artifacts::new(report).with(h).with(c))
}

// ------------------------------------------------------------------ wiener

#[derive(Args, Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct WienerParams {
    #[arg(long, default_value_t = 4.0)]
    pub lambda: f64,
    #[arg(long, default_value = "golden")]
    pub base: String,
    #[arg(long, default_value_t = 0.0)]
    pub x: f64,
    #[arg(long, default_value_t = 0.0)]
    pub y: f64,
    /// Truncation size.
    #[arg(long, default_value_t = 400)]
    pub n: usize,
    #[arg(long, default_value_t = 10_000)]
    pub n_max: usize,
}

pub fn wiener(p: &WienerParams, exec: Exec) -> Result<Artifacts> {
    let base = base_map(&p.base, p.lambda, exec)?;
    let r = wiener_test(&Cocycle2::cos(0.0, p.lambda, base), TorusPoint::new(p.x, p.y), p.n, p.n_max)?;
    let mut t = Table::new("wiener", &["n", "s"]);
    for (k, &s) in r.s.iter().enumerate() {
        t.push(vec![(k + 1).into(), s.into()]);
    }
    Ok(Artifacts::new(json!({"lambda": r.lambda, "base": p.base, "seed": pt(TorusPoint::new(p.x, p.y)), "truncation": r.truncation, "n_max": r.n_max, "limit": num(r.limit)})).with(t))
}

// ---------------------------------------------------------------- duality

#[derive(Args, Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct DualityParams {
    #[arg(long, default_value_t = 4.0)]
    pub lambda: f64,
    #[arg(long, default_value = "golden")]
    pub base: String,
    #[arg(long, default_value_t = 10)]
    pub grid: usize,
    #[arg(long, default_value_t = 100_000)]
    pub steps: usize,
}

pub fn duality(p: &DualityParams, exec: Exec) -> Result<Artifacts> {
    let base = base_map(&p.base, p.lambda, exec)?;
    let g = aubry_gap(&base, p.lambda, p.grid, p.steps, exec)?;
    Ok(Artifacts::new(json!({"lambda": g.lambda, "base": p.base, "mu": num(g.mu), "mu_dual": num(g.mu_dual), "gap": num(g.gap)})))
}

// --------------------------------------------------------------- diffusion

#[derive(Args, Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct DiffusionParams {
    #[arg(long, default_value_t = 10.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1000)]
    pub ensemble: usize,
    #[arg(long, default_value_t = 200)]
    pub n_max: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Shuffle the kicks across the ensemble (i.i.d. control).
    #[arg(long, default_value_t = false)]
    pub shuffled: bool,
}

pub fn diffusion_cmd(p: &DiffusionParams, exec: Exec) -> Result<Artifacts> {
    let r = if p.shuffled { diffusion_shuffled(p.lambda, p.ensemble, p.n_max, p.seed, exec)? } else { diffusion(p.lambda, p.ensemble, p.n_max, p.seed, exec)? };
    let mut t = Table::new("diffusion", &["n", "variance", "autocorrelation", "reconstructed"]);
    for k in 0..r.variance.len() {
        t.push(vec![(k + 1).into(), r.variance[k].into(), r.autocorrelation.get(k).copied().unwrap_or(f64::NAN).into(), r.reconstructed.get(k).copied().unwrap_or(f64::NAN).into()]);
    }
    let report = json!({"lambda": r.lambda, "ensemble": r.ensemble, "shuffled": p.shuffled, "beta": num(r.beta), "beta_se": num(r.beta_se), "identity_error": num(r.identity_error)});
    Ok(Artifacts::new(report).with(t))
}

// ------------------------------------------------------------ distribution

#[derive(Args, Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct DistributionParams {
    #[arg(long, default_value_t = 6.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 40)]
    pub grid: usize,
    #[arg(long, default_value_t = 100_000)]
    pub steps: usize,
}

pub fn distribution(p: &DistributionParams, exec: Exec) -> Result<Artifacts> {
    let d = lyapunov_cdf(p.lambda, p.grid, p.steps, exec)?;
    let mut t = Table::new("distribution", &["value", "cdf", "normalized"]);
    let k = d.raw.len() as f64;
    for (i, &v) in d.raw.iter().enumerate() {
        let norm = if d.std_dev > 0.0 { (v - d.mean) / d.std_dev } else { f64::NAN };
        t.push(vec![v.into(), ((i + 1) as f64 / k).into(), norm.into()]);
    }
    let report = json!({"lambda": d.lambda, "grid": d.grid, "n": d.n, "mean": num(d.mean), "std_dev": num(d.std_dev), "atom_at_zero": num(d.atom_at_zero), "log_half_lambda": num((p.lambda / 2.0).ln())});
    Ok(Artifacts::new(report).with(t))
}

// ------------------------------------------------------------------ herman

#[derive(Args, Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct HermanParams {
    #[arg(long, default_value_t = 10.0)]
    pub lambda: f64,
    /// Rotation angles β (repeat the flag).
    #[arg(long = "beta", allow_hyphen_values = true, default_values_t = [-PI / 4.0, 0.0])]
    pub betas: Vec<f64>,
    #[arg(long, default_value_t = 4)]
    pub grid: usize,
    #[arg(long, default_value_t = 20_000)]
    pub steps: usize,
    #[arg(long, default_value_t = 1000)]
    pub cone_samples: usize,
}

pub fn herman(p: &HermanParams, exec: Exec) -> Result<Artifacts> {
    let opt = HermanOptions { grid: p.grid, n: p.steps, cone_samples: p.cone_samples };
    let pts = herman_scan(&MapSpec::standard(p.lambda), &p.betas, opt, exec)?;
    let mut t = Table::new("herman", &["beta", "exponent", "uniform"]);
    for h in &pts {
        t.push(vec![h.beta.into(), h.exponent.into(), h.uniform.into()]);
    }
    let report = json!({"lambda": p.lambda, "uniform": pts.iter().filter(|h| h.uniform).count(), "points": pts.len()});
    Ok(Artifacts::new(report).with(t))
}
