//! Minimal fixed-size 3D vectors, 3x3 matrices and a one-sided Jacobi SVD.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use serde::Serialize;

use crate::scalar::{lit, Real};

/// A vector (or point) of R^3.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Vec3<T>(pub [T; 3]);

/// Points and vectors share a representation.
pub type Point3<T> = Vec3<T>;

impl<T: Real> Vec3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Vec3([x, y, z])
    }

    pub fn zero() -> Self {
        Vec3([T::zero(); 3])
    }

    /// Unit vector along axis `i`.
    pub fn axis(i: usize) -> Self {
        let mut v = Self::zero();
        v.0[i] = T::one();
        v
    }

    pub fn x(&self) -> T {
        self.0[0]
    }

    pub fn y(&self) -> T {
        self.0[1]
    }

    pub fn z(&self) -> T {
        self.0[2]
    }

    pub fn dot(&self, other: &Self) -> T {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn cross(&self, other: &Self) -> Self {
        let [a1, a2, a3] = self.0;
        let [b1, b2, b3] = other.0;
        Vec3([a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1])
    }

    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, s: T) -> Self {
        Vec3(self.0.map(|c| c * s))
    }

    /// Returns `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n > T::zero() && n.is_finite() {
            Some(self.scale(T::one() / n))
        } else {
            None
        }
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Largest absolute component difference.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        (0..3).fold(T::zero(), |m, i| m.max((self.0[i] - other.0[i]).abs()))
    }

    pub fn cast<U: Real>(&self) -> Vec3<U> {
        Vec3(self.0.map(|c| U::from(c).expect("castable scalar")))
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Vec3([
            self.0[0] + rhs.0[0],
            self.0[1] + rhs.0[1],
            self.0[2] + rhs.0[2],
        ])
    }
}

impl<T: Real> AddAssign for Vec3<T> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Vec3([
            self.0[0] - rhs.0[0],
            self.0[1] - rhs.0[1],
            self.0[2] - rhs.0[2],
        ])
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Vec3(self.0.map(|c| -c))
    }
}

impl<T: Real> Mul<T> for Vec3<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        self.scale(s)
    }
}

impl<T> Index<usize> for Vec3<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T> IndexMut<usize> for Vec3<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.0[i]
    }
}

/// Row-major 3x3 matrix; `m.0[i][j]` is row `i`, column `j`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Mat3<T>(pub [[T; 3]; 3]);

impl<T: Real> Mat3<T> {
    pub fn zero() -> Self {
        Mat3([[T::zero(); 3]; 3])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            m.0[i][i] = T::one();
        }
        m
    }

    pub fn from_rows(rows: [Vec3<T>; 3]) -> Self {
        Mat3(rows.map(|r| r.0))
    }

    pub fn from_cols(cols: [Vec3<T>; 3]) -> Self {
        Self::from_rows(cols).transpose()
    }

    pub fn row(&self, i: usize) -> Vec3<T> {
        Vec3(self.0[i])
    }

    pub fn col(&self, j: usize) -> Vec3<T> {
        Vec3([self.0[0][j], self.0[1][j], self.0[2][j]])
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                t.0[j][i] = self.0[i][j];
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &Vec3<T>) -> Vec3<T> {
        Vec3([self.row(0).dot(v), self.row(1).dot(v), self.row(2).dot(v)])
    }

    /// `vᵀ M`.
    pub fn left_mul_vec(&self, v: &Vec3<T>) -> Vec3<T> {
        self.transpose().mul_vec(v)
    }

    pub fn mul_mat(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] = self.row(i).dot(&other.col(j));
            }
        }
        out
    }

    pub fn determinant(&self) -> T {
        self.row(0).dot(&self.row(1).cross(&self.row(2)))
    }

    pub fn max_abs(&self) -> T {
        self.0
            .iter()
            .flatten()
            .fold(T::zero(), |m, &c| m.max(c.abs()))
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut m = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                m = m.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        m
    }

    pub fn cast<U: Real>(&self) -> Mat3<U> {
        Mat3(
            self.0
                .map(|r| r.map(|c| U::from(c).expect("castable scalar"))),
        )
    }

    /// Rotation by `angle` radians about `axis` (Rodrigues).
    pub fn rotation(axis: Vec3<T>, angle: T) -> Self {
        let k = axis.normalized().expect("nonzero rotation axis");
        let (s, c) = angle.sin_cos();
        let kx = Mat3([
            [T::zero(), -k[2], k[1]],
            [k[2], T::zero(), -k[0]],
            [-k[1], k[0], T::zero()],
        ]);
        let kk = kx.mul_mat(&kx);
        let mut r = Self::identity();
        for i in 0..3 {
            for j in 0..3 {
                r.0[i][j] = r.0[i][j] + s * kx.0[i][j] + (T::one() - c) * kk.0[i][j];
            }
        }
        r
    }
}

/// Singular value decomposition `A = U Σ Vᵀ` of a 3x3 matrix.
#[derive(Clone, Copy, Debug)]
pub struct Svd3<T> {
    /// Singular values, sorted descending.
    pub singular_values: [T; 3],
    /// Right singular vectors as columns, matching `singular_values`.
    pub v: Mat3<T>,
}

/// One-sided Jacobi SVD. Accurate to rounding for the small singular
/// values that rank decisions depend on (no `AᵀA` squaring).
pub fn svd3<T: Real>(a: &Mat3<T>) -> Svd3<T> {
    let mut cols = [a.col(0), a.col(1), a.col(2)];
    let mut v = [Vec3::axis(0), Vec3::axis(1), Vec3::axis(2)];
    let eps = T::epsilon();
    for _sweep in 0..60 {
        let mut rotated = false;
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let alpha = cols[p].dot(&cols[p]);
            let beta = cols[q].dot(&cols[q]);
            let gamma = cols[p].dot(&cols[q]);
            if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                continue;
            }
            rotated = true;
            let zeta = (beta - alpha) / (lit::<T>(2.0) * gamma);
            let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
            let c = T::one() / (T::one() + t * t).sqrt();
            let s = c * t;
            let (cp, cq) = (cols[p], cols[q]);
            cols[p] = cp * c - cq * s;
            cols[q] = cp * s + cq * c;
            let (vp, vq) = (v[p], v[q]);
            v[p] = vp * c - vq * s;
            v[q] = vp * s + vq * c;
        }
        if !rotated {
            break;
        }
    }
    let mut order = [0usize, 1, 2];
    let norms = cols.map(|c| c.norm());
    order.sort_by(|&i, &j| {
        norms[j]
            .partial_cmp(&norms[i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Svd3 {
        singular_values: order.map(|i| norms[i]),
        v: Mat3::from_cols(order.map(|i| v[i])),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_is_right_handed() {
        let x = Vec3::<f64>::axis(0);
        let y = Vec3::axis(1);
        assert_eq!(x.cross(&y), Vec3::axis(2));
    }

    #[test]
    fn svd_matches_nalgebra() {
        let a = Mat3([[0.3, -1.2, 2.0], [0.7, 0.1, -0.4], [1.5, 2.2, 0.9]]);
        let ours = svd3(&a);
        let m = nalgebra::Matrix3::from_row_slice(&[0.3, -1.2, 2.0, 0.7, 0.1, -0.4, 1.5, 2.2, 0.9]);
        let mut theirs: Vec<f64> = m.singular_values().iter().copied().collect();
        theirs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (i, want) in theirs.iter().enumerate() {
            approx::assert_relative_eq!(ours.singular_values[i], *want, epsilon = 1e-13);
            // A v_i has norm sigma_i.
            let av = a.mul_vec(&ours.v.col(i));
            approx::assert_relative_eq!(av.norm(), ours.singular_values[i], epsilon = 1e-13);
        }
    }

    #[test]
    fn svd_rank_one_keeps_tiny_values_tiny() {
        let u = Vec3::new(1.0, 2.0, -0.5);
        let w = Vec3::new(0.3, -0.1, 0.7);
        let mut a = Mat3::zero();
        for i in 0..3 {
            for j in 0..3 {
                a.0[i][j] = u[i] * w[j];
            }
        }
        let s = svd3(&a);
        approx::assert_relative_eq!(s.singular_values[0], u.norm() * w.norm(), epsilon = 1e-14);
        assert!(s.singular_values[1] < 1e-15);
        assert!(s.singular_values[2] < 1e-15);
    }

    #[test]
    fn rotation_is_orthogonal() {
        let r = Mat3::rotation(Vec3::new(1.0f64, 2.0, 3.0), 0.7);
        let rtr = r.transpose().mul_mat(&r);
        assert!(rtr.0.iter().enumerate().all(|(i, row)| row
            .iter()
            .enumerate()
            .all(|(j, &c)| (c - if i == j { 1.0 } else { 0.0 }).abs() < 1e-15)));
        approx::assert_relative_eq!(r.determinant(), 1.0, epsilon = 1e-15);
    }
}
