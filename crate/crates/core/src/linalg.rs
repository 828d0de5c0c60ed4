//! Dense complex LU factorisation with partial pivoting.
//!
//! The scattering systems are tiny (at most a few dozen unknowns), so the
//! factorisation is done in place on a row-major buffer and the 1-norm
//! condition number is obtained from the explicit inverse.

use num_complex::Complex64;

/// Row-major square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "row {i} has wrong length");
            m.data[i * n..(i + 1) * n].copy_from_slice(row);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] += v;
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum()).collect()
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        (0..self.n).map(|j| (0..self.n).map(|i| self.get(i, j).norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j).norm()).sum::<f64>()).fold(0.0, f64::max)
    }
}

pub fn norm_inf_vec(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// `P A = L U` with unit-diagonal `L` stored below the diagonal.
#[derive(Clone, Debug)]
pub struct Lu {
    factors: Matrix,
    perm: Vec<usize>,
}

impl Lu {
    /// Returns `None` when a pivot is exactly zero.
    pub fn factor(a: &Matrix) -> Option<Self> {
        let n = a.n;
        let mut f = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, best) =
                (k..n).map(|i| (i, f.get(i, k).norm())).fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best == 0.0 {
                return None;
            }
            if p != k {
                for j in 0..n {
                    f.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = f.get(k, k);
            for i in k + 1..n {
                let l = f.get(i, k) / pivot;
                f.set(i, k, l);
                if l != Complex64::new(0.0, 0.0) {
                    for j in k + 1..n {
                        let v = f.get(k, j);
                        f.data[i * n + j] -= l * v;
                    }
                }
            }
        }
        Some(Self { factors: f, perm })
    }

    #[allow(clippy::needless_range_loop)]
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.factors.n;
        let f = &self.factors;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= f.get(i, j) * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= f.get(i, j) * x[j];
            }
            x[i] = s / f.get(i, i);
        }
        x
    }

    #[allow(clippy::needless_range_loop)]
    pub fn inverse(&self) -> Matrix {
        let n = self.factors.n;
        let mut inv = Matrix::zeros(n);
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            e[j] = Complex64::new(1.0, 0.0);
            let col = self.solve(&e);
            for i in 0..n {
                inv.set(i, j, col[i]);
            }
        }
        inv
    }
}

/// 1-norm condition number, `+inf` for an exactly singular matrix.
pub fn condition_1(a: &Matrix, lu: Option<&Lu>) -> f64 {
    match lu {
        Some(lu) => {
            let c = a.norm_1() * lu.inverse().norm_1();
            if c.is_finite() {
                c
            } else {
                f64::INFINITY
            }
        }
        None => f64::INFINITY,
    }
}

/// `‖A x − b‖∞ / (‖A‖∞ ‖x‖∞ + ‖b‖∞)`.
pub fn relative_residual(a: &Matrix, x: &[Complex64], b: &[Complex64]) -> f64 {
    let ax = a.mul_vec(x);
    let r: Vec<Complex64> = ax.iter().zip(b).map(|(u, v)| u - v).collect();
    let scale = a.norm_inf() * norm_inf_vec(x) + norm_inf_vec(b);
    if scale == 0.0 {
        0.0
    } else {
        norm_inf_vec(&r) / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn solves_small_system() {
        let a = Matrix::from_rows(&[
            vec![c(0.0, 0.0), c(2.0, 1.0), c(1.0, 0.0)],
            vec![c(1.0, -1.0), c(0.0, 3.0), c(0.0, 0.0)],
            vec![c(4.0, 0.0), c(1.0, 0.0), c(-1.0, 2.0)],
        ]);
        let x = vec![c(1.0, 2.0), c(-0.5, 0.0), c(0.0, -1.0)];
        let b = a.mul_vec(&x);
        let lu = Lu::factor(&a).unwrap();
        let y = lu.solve(&b);
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).norm() < 1e-14);
        }
        assert!(relative_residual(&a, &y, &b) < 1e-15);
    }

    #[test]
    fn singular_detected() {
        let a = Matrix::from_rows(&[vec![c(1.0, 1.0), c(2.0, 2.0)], vec![c(0.5, 0.5), c(1.0, 1.0)]]);
        let lu = Lu::factor(&a);
        assert!(lu.is_none() || condition_1(&a, lu.as_ref()) > 1e15);
    }

    #[test]
    fn identity_condition_is_one() {
        let mut a = Matrix::zeros(4);
        for i in 0..4 {
            a.set(i, i, c(0.0, 1.0));
        }
        let lu = Lu::factor(&a).unwrap();
        assert!((condition_1(&a, Some(&lu)) - 1.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn inverse_roundtrip(vals in prop::collection::vec(-1.0f64..1.0, 2 * 36)) {
            let n = 6;
            let mut a = Matrix::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    let k = 2 * (i * n + j);
                    a.set(i, j, c(vals[k], vals[k + 1]));
                }
                a.add(i, i, c(3.0, 0.0));
            }
            let lu = Lu::factor(&a).unwrap();
            let inv = lu.inverse();
            for i in 0..n {
                for j in 0..n {
                    let s: Complex64 = (0..n).map(|k| a.get(i, k) * inv.get(k, j)).sum();
                    let target = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((s - c(target, 0.0)).norm() < 1e-12);
                }
            }
        }
    }
}
