//! Numerical laboratory for standard-map families: transfer cocycles and
//! Lyapunov exponents over measure-preserving base maps, periodic Jacobi
//! spectra, densities of states, Thouless and determinant identities, Lax
//! cube-exchange approximation and a small complex-analysis toolkit.

pub mod error;
pub mod exec;
pub mod linalg;
pub mod quad;
pub mod rng;
pub mod suite;

pub use error::{Error, Result};
pub use exec::Exec;
pub use linalg::C64;

pub mod bounds;
pub mod cocycle;
pub mod diagnostics;
pub mod complex_analysis;
pub mod dynamics;
pub mod jacobi;
pub mod lax;
pub mod potential;

pub use dynamics::{BaseMap, KickFunction, MapForm, MapSpec, TorusPoint};
