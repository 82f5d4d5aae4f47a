use super::C64;
use std::ops::{Index, IndexMut};

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn mul(&self, o: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, o.rows);
        let mut r = CMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let orow = &o.data[k * o.cols..(k + 1) * o.cols];
                let rrow = &mut r.data[i * o.cols..(i + 1) * o.cols];
                for (x, y) in rrow.iter_mut().zip(orow) {
                    *x += a * y;
                }
            }
        }
        r
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `self - z I`.
    pub fn shifted(&self, z: C64) -> CMatrix {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            m[(i, i)] -= z;
        }
        m
    }

    pub fn scaled(&self, s: C64) -> CMatrix {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..=i).all(|j| (self[(i, j)] - self[(j, i)].conj()).norm() <= tol))
    }

    /// Determinant by partial-pivoting LU, returned as (log |det|, det / |det|).
    /// A singular matrix yields `(-inf, 0)`.
    pub fn log_det(&self) -> (f64, C64) {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.data.clone();
        let mut log_abs = 0.0;
        let mut phase = C64::new(1.0, 0.0);
        for k in 0..n {
            let (mut p, mut best) = (k, a[k * n + k].norm());
            for i in k + 1..n {
                let v = a[i * n + k].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return (f64::NEG_INFINITY, C64::new(0.0, 0.0));
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                phase = -phase;
            }
            let piv = a[k * n + k];
            log_abs += piv.norm().ln();
            phase *= piv / piv.norm();
            for i in k + 1..n {
                let f = a[i * n + k] / piv;
                if f.re == 0.0 && f.im == 0.0 {
                    continue;
                }
                for j in k + 1..n {
                    let t = a[k * n + j];
                    a[i * n + j] -= f * t;
                }
            }
        }
        (log_abs, phase)
    }

    pub fn det(&self) -> C64 {
        let (l, ph) = self.log_det();
        if l == f64::NEG_INFINITY {
            C64::new(0.0, 0.0)
        } else {
            ph * l.exp()
        }
    }

    /// Solves `self * x = b` by partial-pivoting Gaussian elimination.
    pub fn solve(&self, b: &[C64]) -> Option<Vec<C64>> {
        let n = self.rows;
        assert!(self.is_square() && b.len() == n);
        let mut a = self.data.clone();
        let mut x = b.to_vec();
        for k in 0..n {
            let (mut p, mut best) = (k, a[k * n + k].norm());
            for i in k + 1..n {
                let v = a[i * n + k].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return None;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                x.swap(k, p);
            }
            let piv = a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / piv;
                for j in k + 1..n {
                    let t = a[k * n + j];
                    a[i * n + j] -= f * t;
                }
                let t = x[k];
                x[i] -= f * t;
            }
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for j in k + 1..n {
                s -= a[k * n + j] * x[j];
            }
            x[k] = s / a[k * n + k];
        }
        Some(x)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_of_triangular_is_diagonal_product() {
        let m = CMatrix::from_fn(4, 4, |i, j| if j >= i { C64::new((i + j + 1) as f64, i as f64) } else { C64::new(0.0, 0.0) });
        let expect: C64 = (0..4).map(|i| m[(i, i)]).product();
        assert!((m.det() - expect).norm() < 1e-12 * expect.norm());
    }

    #[test]
    fn solve_roundtrip() {
        let m = CMatrix::from_fn(5, 5, |i, j| C64::new(((i * 7 + j * 3) % 5) as f64 + if i == j { 4.0 } else { 0.0 }, (i as f64 - j as f64) * 0.1));
        let x: Vec<C64> = (0..5).map(|k| C64::new(k as f64, 1.0)).collect();
        let b = m.mul_vec(&x);
        let y = m.solve(&b).unwrap();
        for (p, q) in x.iter().zip(&y) {
            assert!((p - q).norm() < 1e-12);
        }
    }
}
