//! Small fixed-size matrices, a dense complex matrix type and the eigenvalue
//! kernels used throughout the crate.

pub mod dense;
pub mod eig;
pub mod poly;
pub mod small;
pub mod tridiag;

pub use dense::CMatrix;
pub use small::{Mat2, Mat4, Scalar};

pub type C64 = num_complex::Complex64;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
