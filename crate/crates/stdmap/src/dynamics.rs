//! Standard-map family, general measure-preserving base maps, orbits, lifts
//! and Jacobians. Angles live on `[0, 2π)`; figures in units of 2π are a
//! plotting concern.

use crate::lax::{AnnulusPermutation, CubeExchange};
use crate::linalg::Mat2;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::sync::Arc;

/// Reduces an angle into `[0, 2π)`. `rem_euclid` can round up to exactly 2π
/// for tiny negative inputs; that single case is mapped to 0.
#[inline]
pub fn wrap(v: f64) -> f64 {
    let r = v.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Signed difference `a - b` reduced into `[-π, π)`.
#[inline]
pub fn angle_diff(a: f64, b: f64) -> f64 {
    wrap(a - b + std::f64::consts::PI) - std::f64::consts::PI
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint {
    pub x: f64,
    pub y: f64,
}

impl TorusPoint {
    pub fn new(x: f64, y: f64) -> Self {
        TorusPoint { x: wrap(x), y: wrap(y) }
    }

    /// Geodesic distance on the flat torus of side 2π.
    pub fn dist(&self, o: &TorusPoint) -> f64 {
        angle_diff(self.x, o.x).hypot(angle_diff(self.y, o.y))
    }

    pub fn neg(&self) -> TorusPoint {
        TorusPoint::new(-self.x, -self.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftedPoint {
    pub x: f64,
    pub y: f64,
}

impl LiftedPoint {
    pub fn project(&self) -> TorusPoint {
        TorusPoint::new(self.x, self.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub m: u32,
    pub amplitude: f64,
    pub phase: f64,
}

/// `f(x) = Σ amplitude · sin(m x + phase)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KickFunction {
    pub harmonics: Vec<Harmonic>,
}

impl Default for KickFunction {
    fn default() -> Self {
        Self::sin()
    }
}

impl KickFunction {
    pub fn sin() -> Self {
        KickFunction { harmonics: vec![Harmonic { m: 1, amplitude: 1.0, phase: 0.0 }] }
    }

    pub fn sin_m(m: u32) -> Self {
        KickFunction { harmonics: vec![Harmonic { m, amplitude: 1.0, phase: 0.0 }] }
    }

    pub fn is_plain_sin(&self) -> bool {
        matches!(self.harmonics.as_slice(), [Harmonic { m: 1, amplitude, phase }] if *amplitude == 1.0 && *phase == 0.0)
    }

    pub fn value(&self, x: f64) -> f64 {
        self.value_and_derivative(x).0
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.value_and_derivative(x).1
    }

    #[inline]
    pub fn value_and_derivative(&self, x: f64) -> (f64, f64) {
        if let [h] = self.harmonics.as_slice() {
            let (s, c) = (h.m as f64 * x + h.phase).sin_cos();
            return (h.amplitude * s, h.amplitude * h.m as f64 * c);
        }
        let mut f = 0.0;
        let mut d = 0.0;
        for h in &self.harmonics {
            let (s, c) = (h.m as f64 * x + h.phase).sin_cos();
            f += h.amplitude * s;
            d += h.amplitude * h.m as f64 * c;
        }
        (f, d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum MapForm {
    /// `(x, y) ↦ (E x − y + λ f(x), x)`
    #[default]
    Twist,
    /// `(x, y) ↦ (x + y + λ f(x), y + λ f(x))`, the E = 2 map written in
    /// momentum coordinates `y = x_n − x_{n−1}`.
    Hamiltonian,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapSpec {
    pub e: i32,
    pub lambda: f64,
    pub kick: KickFunction,
    pub form: MapForm,
}

impl MapSpec {
    pub fn standard(lambda: f64) -> Self {
        MapSpec { e: 2, lambda, kick: KickFunction::sin(), form: MapForm::Twist }
    }

    pub fn hamiltonian(lambda: f64) -> Self {
        MapSpec { e: 2, lambda, kick: KickFunction::sin(), form: MapForm::Hamiltonian }
    }

    pub fn with_form(mut self, form: MapForm) -> Self {
        self.form = form;
        self
    }

    #[inline]
    pub fn step(&self, p: TorusPoint) -> TorusPoint {
        let f = self.lambda * self.kick.value(p.x);
        match self.form {
            MapForm::Twist => TorusPoint { x: wrap(self.e as f64 * p.x - p.y + f), y: p.x },
            MapForm::Hamiltonian => {
                let y = p.y + f;
                TorusPoint { x: wrap(p.x + y), y: wrap(y) }
            }
        }
    }

    /// Jacobian of `step` at `p`. In twist form this is
    /// `[[E + λ f'(x), −1], [1, 0]]`.
    pub fn jacobian(&self, p: TorusPoint) -> Mat2<f64> {
        let d = self.lambda * self.kick.derivative(p.x);
        match self.form {
            MapForm::Twist => Mat2::new(self.e as f64 + d, -1.0, 1.0, 0.0),
            MapForm::Hamiltonian => Mat2::new(1.0 + d, 1.0, d, 1.0),
        }
    }
}

/// Twist coordinates `(x_n, x_{n−1})` to Hamiltonian `(x_n, x_n − x_{n−1})`.
pub fn twist_to_hamiltonian(p: TorusPoint) -> TorusPoint {
    TorusPoint::new(p.x, p.x - p.y)
}

pub fn hamiltonian_to_twist(p: TorusPoint) -> TorusPoint {
    TorusPoint::new(p.x, p.x - p.y)
}

#[derive(Clone, Debug)]
pub enum BaseMap {
    StandardMap(MapSpec),
    /// `(x, y) ↦ (x + α, y)`
    Rotation { alpha: f64 },
    CubeExchange(Arc<CubeExchange>),
    AnnulusPermutation(Arc<AnnulusPermutation>),
    Identity,
    /// `Composition([A, B])` applies B first, then A.
    Composition(Vec<BaseMap>),
}

impl BaseMap {
    pub fn standard(lambda: f64) -> Self {
        BaseMap::StandardMap(MapSpec::standard(lambda))
    }

    /// Rotation by 2π times the golden mean.
    pub fn golden_rotation() -> Self {
        BaseMap::Rotation { alpha: TAU * (5f64.sqrt() - 1.0) / 2.0 }
    }

    #[inline]
    pub fn step(&self, p: TorusPoint) -> TorusPoint {
        match self {
            BaseMap::StandardMap(s) => s.step(p),
            BaseMap::Rotation { alpha } => TorusPoint { x: wrap(p.x + alpha), y: p.y },
            BaseMap::CubeExchange(c) => c.apply(p),
            BaseMap::AnnulusPermutation(a) => a.apply(p),
            BaseMap::Identity => p,
            BaseMap::Composition(list) => list.iter().rev().fold(p, |q, m| m.step(q)),
        }
    }

    /// Period of every orbit when the map is a cyclic cell permutation.
    pub fn period(&self) -> Option<usize> {
        match self {
            BaseMap::CubeExchange(c) if c.is_cyclic() => Some(c.n * c.n),
            BaseMap::AnnulusPermutation(a) if a.is_cyclic() => Some(a.n()),
            BaseMap::Identity => Some(1),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BaseMap::StandardMap(_) => "standard",
            BaseMap::Rotation { .. } => "rotation",
            BaseMap::CubeExchange(_) => "cube_exchange",
            BaseMap::AnnulusPermutation(_) => "annulus_permutation",
            BaseMap::Identity => "identity",
            BaseMap::Composition(_) => "composition",
        }
    }
}

pub fn step(p: TorusPoint, map: &BaseMap) -> TorusPoint {
    map.step(p)
}

/// `n + 1` points starting at `p0`.
pub fn orbit(p0: TorusPoint, map: &BaseMap, n: usize) -> Vec<TorusPoint> {
    let mut out = Vec::with_capacity(n + 1);
    let mut p = p0;
    out.push(p);
    for _ in 0..n {
        p = map.step(p);
        out.push(p);
    }
    out
}

/// Orbit of the Hamiltonian-form map in the universal cover (`n + 1` points).
pub fn lifted_orbit(p0: TorusPoint, spec: &MapSpec, n: usize) -> Vec<LiftedPoint> {
    let mut out = Vec::with_capacity(n + 1);
    let mut q = LiftedPoint { x: p0.x, y: p0.y };
    out.push(q);
    for _ in 0..n {
        let y = q.y + spec.lambda * spec.kick.value(q.x);
        q = LiftedPoint { x: q.x + y, y };
        out.push(q);
    }
    out
}

pub fn jacobian(p: TorusPoint, spec: &MapSpec) -> Mat2<f64> {
    spec.jacobian(p)
}
