//! Closed-form and quadrature upper/lower bound constants for the
//! Lyapunov exponent of `A_{E, λ cos}` and the derived entropy estimates.

use crate::error::{Error, Result};
use crate::linalg::{Mat2, C64};
use crate::quad::{self, QuadOptions};
use std::f64::consts::TAU;

/// `λ₀ = 2 √(2 / (6 − 3√3))`, where `log(λ/2) = C(λ)`.
pub fn lambda0() -> f64 {
    2.0 * (2.0 / (6.0 - 3.0 * 3f64.sqrt())).sqrt()
}

/// `M(E, λ) = |E + i + √((E + i)² − λ²)| / √3`, root with positive imaginary part.
pub fn m_bound(e: C64, lambda: f64) -> f64 {
    let a = e + C64::new(0.0, 1.0);
    let mut s = (a * a - lambda * lambda).sqrt();
    if s.im < 0.0 {
        s = -s;
    }
    (a + s).norm() / 3f64.sqrt()
}

/// `m(E, λ) = log M(E, λ)`, an upper bound for `∫ log ||A_{E,λcos}||`.
pub fn m_upper(e: f64, lambda: f64) -> f64 {
    m_bound(C64::new(e, 0.0), lambda).ln()
}

/// `C(E, λ) = log M(E, λ) − log(λ/2)`.
pub fn c_e(e: f64, lambda: f64) -> f64 {
    m_upper(e, lambda) - (lambda / 2.0).ln()
}

/// `C(λ) = arcsinh(1/λ) + log(2/√3)`.
pub fn c_lambda(lambda: f64) -> f64 {
    (1.0 / lambda).asinh() + (2.0 / 3f64.sqrt()).ln()
}

/// `log(λ/2) − C(λ)`, positive exactly for λ > λ₀.
pub fn entropy_lower(lambda: f64) -> f64 {
    (lambda / 2.0).ln() - c_lambda(lambda)
}

fn opts() -> QuadOptions {
    QuadOptions { abs_tol: 1e-12, rel_tol: 1e-12, limit: 4000 }
}

/// `c(E, λ) = (1/2π) ∫ log √(2 + (E + λ cos x)²) dx`.
pub fn hadamard_c(e: f64, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument("λ must be positive".into()));
    }
    let v = quad::integrate(|x| 0.5 * (2.0 + (e + lambda * x.cos()).powi(2)).ln(), 0.0, TAU, opts())?;
    Ok(v / TAU)
}

/// Entropy upper bound `c(2, λ)` from the Hadamard inequality.
pub fn entropy_upper(lambda: f64) -> Result<f64> {
    hadamard_c(2.0, lambda)
}

/// Two-step constant: `(1/2) ∫∫ log ||A(y) A(x)|| dx dy/(2π)² − log(λ/2)` with
/// `A(x) = [[E − λ cos x, −1], [1, 0]]`.
pub fn c2(e: f64, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument("λ must be positive".into()));
    }
    let inner_opts = QuadOptions { abs_tol: 1e-12, rel_tol: 1e-12, limit: 4000 };
    let mut err = None;
    let outer = quad::integrate(
        |y| {
            let ay = Mat2::new(e - lambda * y.cos(), -1.0, 1.0, 0.0);
            match quad::integrate(
                |x| {
                    let ax = Mat2::new(e - lambda * x.cos(), -1.0, 1.0, 0.0);
                    ay.mul(&ax).norm2().ln()
                },
                0.0,
                TAU,
                inner_opts,
            ) {
                Ok(v) => v,
                Err(e) => {
                    err = Some(e);
                    0.0
                }
            }
        },
        0.0,
        TAU,
        QuadOptions { abs_tol: 1e-10, rel_tol: 1e-11, limit: 4000 },
    )?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(outer / (TAU * TAU) / 2.0 - (lambda / 2.0).ln())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PesinDenominator {
    /// `C(E = 2, λ)` from the closed-form norm bound.
    #[default]
    NormBound,
    /// `c(2, λ) − log(λ/2)` from the Hadamard bound.
    Hadamard,
}

/// `(log(λ/2) − C(λ)) / (log(λ/2) + C(2, λ))`.
pub fn pesin_lower_with(lambda: f64, den: PesinDenominator) -> Result<f64> {
    let l0 = lambda0();
    if !(lambda > l0) {
        return Err(Error::DomainError(format!("λ = {} ≤ λ₀ = {}: bound vacuous", lambda, l0)));
    }
    let half = (lambda / 2.0).ln();
    let extra = match den {
        PesinDenominator::NormBound => c_e(2.0, lambda),
        PesinDenominator::Hadamard => hadamard_c(2.0, lambda)? - half,
    };
    Ok(((half - c_lambda(lambda)) / (half + extra)).clamp(0.0, 1.0))
}

pub fn pesin_lower(lambda: f64) -> Result<f64> {
    pesin_lower_with(lambda, PesinDenominator::NormBound)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundReport {
    pub lambda: f64,
    pub e: f64,
    pub m: f64,
    pub c_e: f64,
    pub c_lambda: f64,
    pub hadamard_c: f64,
    pub c2: f64,
    pub lambda0: f64,
    pub entropy_lower: f64,
    pub entropy_upper: f64,
    pub pesin_lower: Option<f64>,
}

pub fn report(e: f64, lambda: f64) -> Result<BoundReport> {
    Ok(BoundReport {
        lambda,
        e,
        m: m_bound(C64::new(e, 0.0), lambda),
        c_e: c_e(e, lambda),
        c_lambda: c_lambda(lambda),
        hadamard_c: hadamard_c(e, lambda)?,
        c2: c2(e, lambda)?,
        lambda0: lambda0(),
        entropy_lower: entropy_lower(lambda),
        entropy_upper: entropy_upper(lambda)?,
        pesin_lower: pesin_lower(lambda).ok(),
    })
}

/// Gauss-Legendre reference for `c(E, λ)` on `n` panels of order 20, used as
/// an independent check of the adaptive rule.
pub fn hadamard_c_reference(e: f64, lambda: f64, panels: usize) -> f64 {
    let (x, w) = quad::gauss_legendre(20);
    let h = TAU / panels as f64;
    let mut s = 0.0;
    for p in 0..panels {
        let a = p as f64 * h;
        for (xi, wi) in x.iter().zip(&w) {
            let t = a + (xi + 1.0) * h / 2.0;
            s += wi * h / 2.0 * 0.5 * (2.0 + (e + lambda * t.cos()).powi(2)).ln();
        }
    }
    s / TAU
}
