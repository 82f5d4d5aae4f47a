//! Acceptance and invariant batteries with one verdict per criterion.

use crate::bounds::{c_lambda, hadamard_c, lambda0};
use crate::cocycle::{grid_lyapunov, herman_scan, mu_n_point, mu_n_subharmonic, Cocycle2, Form, HermanOptions};
use crate::complex_analysis::{self as ca, harnack_harness, HarnackVariant, Sector};
use crate::diagnostics::{aubry_gap, lyapunov_cdf, wiener_test};
use crate::dynamics::{BaseMap, MapSpec, TorusPoint};
use crate::error::Result;
use crate::exec::Exec;
use crate::jacobi::{self, cycle_points, dense_delta, periodic_w_spectrum, spectrum_curves, PeriodicJacobi, ProductOperator};
use crate::lax::{lax_approximate, AnnulusPermutation};
use crate::linalg::C64;
use crate::potential::{capacity_energy, product_formula_residual, thouless_residual, thouless_w_residual, w_measure, EmpiricalMeasure};
use rand::Rng;
use serde::Serialize;
use std::f64::consts::{PI, TAU};
use std::sync::Arc;

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    fn from(name: &str, r: Result<(bool, String)>) -> Self {
        match r {
            Ok((pass, detail)) => Verdict { name: name.into(), pass, detail },
            Err(e) => Verdict { name: name.into(), pass: false, detail: format!("error: {}", e) },
        }
    }

    pub fn line(&self) -> String {
        format!("{} {}: {}", if self.pass { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

/// The cyclic seven-annulus base used for period-7 checks.
pub fn period_seven_base() -> BaseMap {
    BaseMap::AnnulusPermutation(Arc::new(AnnulusPermutation::from_cycle(&[0, 3, 5, 1, 6, 2, 4]).expect("valid cycle")))
}

/// Names of the acceptance criteria in run order.
pub const ACCEPTANCE: [&str; 13] = [
    "constants",
    "lyapunov_floor",
    "mu_n_anchor",
    "thouless",
    "determinant_product",
    "jacobi_oracles",
    "jensen_sector",
    "wiener_transition",
    "aubry_gap",
    "kam_atom",
    "herman_spectrum",
    "harnack_harness",
    "capacity",
];

pub fn acceptance_one(name: &str, exec: Exec) -> Option<Verdict> {
    let r = match name {
        "constants" => constants(),
        "lyapunov_floor" => lyapunov_floor(exec),
        "mu_n_anchor" => mu_n_anchor(exec),
        "thouless" => thouless(exec),
        "determinant_product" => determinant_product(exec),
        "jacobi_oracles" => jacobi_oracles(exec),
        "jensen_sector" => jensen(),
        "wiener_transition" => wiener(),
        "aubry_gap" => aubry(exec),
        "kam_atom" => kam(exec),
        "herman_spectrum" => herman(exec),
        "harnack_harness" => harnack(exec),
        "capacity" => capacity(exec),
        _ => return None,
    };
    Some(Verdict::from(name, r))
}

pub fn acceptance(exec: Exec) -> Vec<Verdict> {
    ACCEPTANCE.iter().filter_map(|n| acceptance_one(n, exec)).collect()
}

fn constants() -> Result<(bool, String)> {
    let l0 = lambda0();
    let closed = (8.0 / (6.0 - 3.0 * 3f64.sqrt())).sqrt();
    let c0 = c_lambda(l0);
    let tail = (c_lambda(1e6) - (2.0 / 3f64.sqrt()).ln()).abs();
    let a = (l0 - 3.15470).abs() < 1e-4 && (l0 - closed).abs() < 1e-12;
    let b = c0.abs() < 1e-10;
    let c = tail < 1e-6;
    let mark = |ok: bool| if ok { "ok" } else { "FAILED" };
    Ok((
        a && b && c,
        format!(
            "lambda0={:.6} (closed form {:.6}) {}; C(lambda0)={:.6} (target 0 ± 1e-10) {}; |C(1e6) - log(2/sqrt3)|={:.17e} (tol 1e-6) {}",
            l0,
            closed,
            mark(a),
            c0,
            mark(b),
            tail,
            mark(c)
        ),
    ))
}

fn lyapunov_floor(exec: Exec) -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for l in [4.0, 6.0, 10.0] {
        let g = grid_lyapunov(&Cocycle2::jacobian(&MapSpec::standard(l)), 40, 100_000, 16, exec)?;
        let lo = (l / 2.0).ln() - 0.02;
        let hi = (l / 2.0).ln() + hadamard_c(2.0, l)? + 0.05;
        ok &= g.mean >= lo && g.mean <= hi;
        parts.push(format!("lambda={}: {:.4} in [{:.4}, {:.4}]", l, g.mean, lo, hi));
    }
    Ok((ok, parts.join("; ")))
}

fn mu_n_anchor(exec: Exec) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for l in [3.0, 8.0] {
        let cfg = Cocycle2::cos(0.0, l, BaseMap::standard(l));
        let v = mu_n_subharmonic(&cfg, C64::new(0.0, 0.0), 50, 8, Form::B, exec)?;
        worst = worst.max((v - (l / 2.0).ln()).abs());
    }
    Ok((worst < 1e-10, format!("max |mu_n(0) - log(lambda/2)| = {:.2e}", worst)))
}

fn thouless(exec: Exec) -> Result<(bool, String)> {
    let free = thouless_residual(&Cocycle2::cos(0.0, 0.0, BaseMap::golden_rotation()), &[C64::new(3.0, 0.0)], 400, 2, 20_000, exec)?;
    let mathieu = thouless_residual(&Cocycle2::cos(0.0, 4.0, BaseMap::golden_rotation()), &[C64::new(0.0, 4.0)], 400, 50, 10_000, exec)?;
    let xs = cycle_points(&period_seven_base(), TorusPoint::new(0.2, 0.3))?;
    let w = thouless_w_residual(&xs, 4.0, &[0.5, 1.5], 32, 256, exec)?;
    let ok = free.residual < 2e-2 && mathieu.residual < 2e-2 && w.residual < 2e-2;
    Ok((ok, format!("free {:.2e}, Mathieu {:.2e}, w-form period 7 {:.2e} (tol 2e-2)", free.residual, mathieu.residual, w.residual)))
}

fn determinant_product(exec: Exec) -> Result<(bool, String)> {
    let five = vec![C64::new(5.0, 0.0); 2000];
    let c = product_formula_residual(&ProductOperator::new(five.clone(), five)?, 400, 1, exec)?;
    let exact = 2.0 * ((5.0 + 21f64.sqrt()) / 2.0).ln();
    let mut r = crate::rng::stream(0xd37, 0);
    let p4: Vec<C64> = (0..4).map(|_| C64::new(r.gen_range(2.5..4.0), 0.0)).collect();
    let q4: Vec<C64> = (0..4).map(|_| C64::new(r.gen_range(-4.0..-2.5), 0.0)).collect();
    let op = ProductOperator::new((0..2000).map(|k| p4[k % 4]).collect(), (0..2000).map(|k| q4[k % 4]).collect())?;
    let p = product_formula_residual(&op, 400, 4, exec)?;
    let ok = c.residual < 1e-2 && (c.logdet_product - exact).abs() < 1e-2 && p.residual < 1e-2;
    Ok((ok, format!("constant: residual {:.2e}, logdet {:.5} vs {:.5}; period 4: residual {:.2e}", c.residual, c.logdet_product, exact, p.residual)))
}

fn jacobi_oracles(exec: Exec) -> Result<(bool, String)> {
    let mut r = crate::rng::stream(0x1ac, 0);
    let rc = |r: &mut crate::rng::Stream| C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
    let mut worst = 0.0f64;
    for i in 0..100 {
        let p = 1 + i % 8;
        let a: Vec<C64> = (0..p).map(|_| rc(&mut r) + 1.5).collect();
        let b: Vec<C64> = (0..p).map(|_| rc(&mut r) * 2.0).collect();
        let c: Vec<C64> = (0..p).map(|_| rc(&mut r) + 1.5).collect();
        let j = PeriodicJacobi::new(a, b, c)?;
        let z = rc(&mut r) * 2.0;
        let w = C64::from_polar(r.gen_range(0.5..2.0), r.gen_range(0.0..TAU));
        let dense = dense_delta(&j, z, w);
        worst = worst.max((j.delta_structure().delta_zw(z, w) - dense).norm() / dense.norm().max(1.0));
    }
    let mut imag = 0.0f64;
    for p in 1..=6 {
        let a: Vec<C64> = (0..p).map(|_| C64::new(r.gen_range(0.5..1.5), 0.0)).collect();
        let b: Vec<C64> = (0..p).map(|_| C64::new(r.gen_range(-2.0..2.0), 0.0)).collect();
        let j = PeriodicJacobi::new(a.clone(), b, a)?;
        imag = imag.max(spectrum_curves(&j, 128, exec)?.max_abs_imag());
    }
    let n = 200;
    let ev = jacobi::truncated_eigenvalues(&vec![C64::new(0.0, 0.0); n])?;
    let mut free = 0.0f64;
    for (k, e) in ev.iter().enumerate() {
        let exact = 2.0 * (PI * (n - k) as f64 / (n + 1) as f64).cos();
        free = free.max((e.re - exact).abs());
    }
    let ok = worst < 1e-9 && imag < 1e-8 && free < 1e-10;
    Ok((ok, format!("delta identity rel {:.2e}; selfadjoint |Im| {:.2e}; free truncation {:.2e}", worst, imag, free)))
}

fn jensen() -> Result<(bool, String)> {
    let zero = C64::from_polar(1.1, 0.9);
    let s = Sector::new(0.6, 1.8, 0.2, 1.6)?;
    let poly = ca::jensen_sector(|z| (z - zero) * (z - C64::from_polar(1.4, 1.2)), &s, 8)?.residual();
    let base = BaseMap::CubeExchange(Arc::new(lax_approximate(&BaseMap::standard(4.0), 8, Exec::Sequential)?.cube));
    let h = TAU / 8.0;
    let mut g6 = 0.0f64;
    for (j, sec) in Sector::partition(0.8, 1.25, 8)?.iter().enumerate() {
        let ph = ca::orbit_phases(&base, TorusPoint::new(h * (j as f64 + 0.5), 1.3), 6);
        g6 = g6.max(ca::jensen_sector(|z| ca::g_n(&ph, C64::new(0.0, 0.0), 4.0, z), sec, 16)?.residual());
    }
    let roots = [C64::from_polar(0.9, 0.4), C64::from_polar(1.2, 2.5), C64::from_polar(0.3, 4.0)];
    let g = |z: C64| roots.iter().fold(C64::new(1.0, 0.0), |acc, r| acc * (z - r));
    let mut total = 0.0;
    for sec in Sector::partition(0.5, 1.6, 5)? {
        total += ca::jensen_sector(g, &sec, 8)?.difference();
    }
    let part = (total - ca::annulus_jensen_difference(g, 0.5, 1.6, 8)?).abs();
    let ok = poly < 1e-8 && g6 < 1e-3 && part < 1e-6;
    Ok((ok, format!("polynomial {:.2e}; g_6 over Lax base (8 sectors) {:.2e}; partition vs annulus {:.2e}", poly, g6, part)))
}

fn wiener() -> Result<(bool, String)> {
    let o = TorusPoint::new(0.0, 0.0);
    let sub = wiener_test(&Cocycle2::cos(0.0, 1.0, BaseMap::golden_rotation()), o, 400, 10_000)?.limit;
    let sup = wiener_test(&Cocycle2::cos(0.0, 4.0, BaseMap::golden_rotation()), o, 400, 10_000)?.limit;
    let std = wiener_test(&Cocycle2::cos(0.0, 6.0, BaseMap::standard(6.0)), TorusPoint::new(0.3, 0.2), 400, 10_000)?.limit;
    Ok((sub < 0.02 && sup > 0.1 && std > 0.01, format!("Mathieu lambda=1 {:.4} (<0.02), lambda=4 {:.4} (>0.1); standard lambda=6 {:.4} (>0.01)", sub, sup, std)))
}

fn aubry(exec: Exec) -> Result<(bool, String)> {
    let m = aubry_gap(&BaseMap::golden_rotation(), 4.0, 10, 100_000, exec)?;
    let s = aubry_gap(&BaseMap::standard(10.0), 10.0, 20, 20_000, exec)?;
    Ok((m.gap.abs() < 2e-2 && s.gap.abs() < 0.05, format!("Mathieu lambda=4 gap {:+.4}; standard lambda=10 gap {:+.4}", m.gap, s.gap)))
}

fn kam(exec: Exec) -> Result<(bool, String)> {
    let low = lyapunov_cdf(2.0, 40, 100_000, exec)?.atom_at_zero;
    let high = lyapunov_cdf(10.0, 40, 100_000, exec)?.atom_at_zero;
    Ok((low > 0.1 && high < 0.05, format!("atom at 0: lambda=2 {:.4} (>0.1), lambda=10 {:.4} (<0.05)", low, high)))
}

fn herman(exec: Exec) -> Result<(bool, String)> {
    let opt = HermanOptions { grid: 4, n: 20_000, cone_samples: 1000 };
    let pts = herman_scan(&MapSpec::standard(10.0), &[-PI / 4.0, 0.0], opt, exec)?;
    let d = (pts[0].exponent - 2f64.sqrt().ln()).abs();
    Ok((d < 1e-3 && pts[0].uniform && !pts[1].uniform, format!("beta=-pi/4 exponent {:.5} (|diff| {:.1e}), certificate {}; beta=0 certificate {}", pts[0].exponent, d, pts[0].uniform, pts[1].uniform)))
}

fn harnack(exec: Exec) -> Result<(bool, String)> {
    let mut v = 0;
    let mut parts = Vec::new();
    for r in [2.0, 3.0, 5.0] {
        let h = harnack_harness(r, HarnackVariant::A, 1000, 6, 0x4a2, exec)?;
        v += h.violations;
        parts.push(format!("r={} margin {:.3}", r, h.worst_margin));
    }
    Ok((v == 0, format!("{} violations in 3000 trials; {}", v, parts.join(", "))))
}

fn capacity(exec: Exec) -> Result<(bool, String)> {
    let xs = cycle_points(&period_seven_base(), TorusPoint::new(0.2, 0.3))?;
    let spec = periodic_w_spectrum(&xs, C64::new(0.0, 0.0), 8.0, 256, exec)?;
    let c = capacity_energy(&w_measure(&spec)?, exec)?.capacity;
    let target = (2.0f64 / 8.0).sqrt();
    Ok(((c / target - 1.0).abs() < 0.15, format!("capacity {:.4} vs sqrt(2/8) = {:.4}", c, target)))
}

/// Quick structural invariants across modules.
pub fn invariants(exec: Exec) -> Vec<Verdict> {
    let mut out = Vec::new();
    out.push(Verdict::from("potential_mean_value", (|| {
        let dk = EmpiricalMeasure::arcsine(200);
        let z = C64::new(0.5, 2.0);
        let mean = (0..256).map(|k| dk.potential(z + C64::from_polar(0.5, TAU * k as f64 / 256.0))).sum::<f64>() / 256.0;
        let d = (mean - dk.potential(z)).abs();
        Ok((d < 1e-6, format!("{:.2e}", d)))
    })()));
    out.push(Verdict::from("argument_principle", (|| {
        let roots = [C64::new(0.2, 0.1), C64::new(-0.5, 0.4), C64::new(1.5, 0.0)];
        let g = |z: C64| roots.iter().fold(C64::new(1.0, 0.0), |a, r| a * (z - r));
        let w = ca::arg_change(g, &ca::Path::circle(C64::new(0.0, 0.0), 1.0), 16)? / TAU;
        Ok(((w - 2.0).abs() < 1e-6, format!("winding {:.9}", w)))
    })()));
    out.push(Verdict::from("transfer4_unimodular", (|| {
        let v: Vec<C64> = (0..12).map(|k| C64::new((k as f64).sin(), 0.2 * (k as f64).cos())).collect();
        let op = ProductOperator::new(v.clone(), v.iter().rev().cloned().collect())?;
        let d = crate::jacobi::mat4_to_dense(&op.transfer4(C64::new(0.3, 0.1), 4)).det();
        Ok(((d - 1.0).norm() < 1e-10, format!("|det - 1| = {:.2e}", (d - 1.0).norm())))
    })()));
    out.push(Verdict::from("w_phase_shift", (|| {
        // arg w acts as a shift of the seed along a rotation
        let cfg = Cocycle2::cos(0.0, 3.0, BaseMap::golden_rotation());
        let (r, phi) = (0.8, 0.6);
        let a = mu_n_point(&cfg.clone().with_w(C64::from_polar(r, phi)), TorusPoint::new(0.4, 0.0), 60, Form::A, 0.1)?;
        let b = mu_n_point(&cfg.with_w(C64::new(r, 0.0)), TorusPoint::new(0.4 - phi, 0.0), 60, Form::A, 0.1)?;
        Ok(((a - b).abs() < 1e-9, format!("{:.2e}", (a - b).abs())))
    })()));
    out.push(Verdict::from("lax_bijective", (|| {
        let l = lax_approximate(&BaseMap::standard(3.0), 16, exec)?;
        let n = l.cube.n;
        let mut seen = vec![false; n * n];
        for &p in &l.cube.perm {
            seen[p] = true;
        }
        Ok((seen.iter().all(|&s| s) && l.cube.is_cyclic(), format!("{} cells, cyclic {}", n * n, l.cube.is_cyclic())))
    })()));
    out.push(Verdict::from("w_mass_two", (|| {
        let xs = cycle_points(&period_seven_base(), TorusPoint::new(0.2, 0.3))?;
        let m = w_measure(&periodic_w_spectrum(&xs, C64::new(0.0, 0.0), 4.0, 32, exec)?)?.total_mass();
        Ok(((m - 2.0).abs() < 1e-12, format!("mass {:.12}", m)))
    })()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariants_hold() {
        for v in invariants(Exec::Sequential) {
            assert!(v.pass, "{}", v.line());
        }
    }

    #[test]
    fn unknown_criterion_is_none() {
        assert!(acceptance_one("nope", Exec::Sequential).is_none());
    }
}
