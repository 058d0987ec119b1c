//! Fixed-dimension vectors and matrices.

use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use crate::math;

/// A point (or vector) of `ℝ^D`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point<const D: usize>(pub [f64; D]);

impl<const D: usize> Default for Point<D> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<const D: usize> Point<D> {
    pub const fn new(coords: [f64; D]) -> Self {
        Self(coords)
    }

    pub const fn zero() -> Self {
        Self([0.0; D])
    }

    pub fn splat(v: f64) -> Self {
        Self([v; D])
    }

    /// The `i`-th canonical basis vector.
    pub fn unit(i: usize) -> Self {
        let mut p = Self::zero();
        p.0[i] = 1.0;
        p
    }

    pub fn coords(&self) -> &[f64; D] {
        &self.0
    }

    pub fn dot(&self, other: &Self) -> f64 {
        let mut s = 0.0;
        for i in 0..D {
            s += self.0[i] * other.0[i];
        }
        s
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        math::sqrt(self.norm_sq())
    }

    pub fn dist(&self, other: &Self) -> f64 {
        (*self - *other).norm()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// `self / |self|`, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(*self * (1.0 / n))
        } else {
            None
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let mut out = *self;
        for v in out.0.iter_mut() {
            *v = f(*v);
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

impl<const D: usize> Index<usize> for Point<D> {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl<const D: usize> IndexMut<usize> for Point<D> {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl<const D: usize> Add for Point<D> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl<const D: usize> Sub for Point<D> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self -= rhs;
        self
    }
}

impl<const D: usize> AddAssign for Point<D> {
    fn add_assign(&mut self, rhs: Self) {
        for i in 0..D {
            self.0[i] += rhs.0[i];
        }
    }
}

impl<const D: usize> SubAssign for Point<D> {
    fn sub_assign(&mut self, rhs: Self) {
        for i in 0..D {
            self.0[i] -= rhs.0[i];
        }
    }
}

impl<const D: usize> Mul<f64> for Point<D> {
    type Output = Self;
    fn mul(mut self, rhs: f64) -> Self {
        for v in self.0.iter_mut() {
            *v *= rhs;
        }
        self
    }
}

impl<const D: usize> Neg for Point<D> {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}

/// A `D × D` real matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat<const D: usize>(pub [[f64; D]; D]);

impl<const D: usize> Default for Mat<D> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<const D: usize> Mat<D> {
    pub const fn zero() -> Self {
        Self([[0.0; D]; D])
    }

    pub fn identity() -> Self {
        Self::diag(&[1.0; D])
    }

    pub fn scalar(v: f64) -> Self {
        Self::diag(&[v; D])
    }

    pub fn diag(entries: &[f64; D]) -> Self {
        let mut m = Self::zero();
        for i in 0..D {
            m.0[i][i] = entries[i];
        }
        m
    }

    pub fn outer(a: &Point<D>, b: &Point<D>) -> Self {
        let mut m = Self::zero();
        for i in 0..D {
            for j in 0..D {
                m.0[i][j] = a[i] * b[j];
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..D {
            for j in 0..D {
                m.0[i][j] = self.0[j][i];
            }
        }
        m
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        let mut m = Self::zero();
        for i in 0..D {
            for k in 0..D {
                let a = self.0[i][k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..D {
                    m.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        m
    }

    /// `Q Qᵀ`.
    pub fn gram(&self) -> Self {
        self.matmul(&self.transpose())
    }

    pub fn mul_vec(&self, v: &Point<D>) -> Point<D> {
        let mut out = Point::zero();
        for i in 0..D {
            let mut s = 0.0;
            for j in 0..D {
                s += self.0[i][j] * v[j];
            }
            out[i] = s;
        }
        out
    }

    /// `aᵀ M a`.
    pub fn quad(&self, a: &Point<D>) -> f64 {
        a.dot(&self.mul_vec(a))
    }

    pub fn trace(&self) -> f64 {
        (0..D).map(|i| self.0[i][i]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut m = *self;
        for row in m.0.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        m
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut m = *self;
        for i in 0..D {
            for j in 0..D {
                m.0[i][j] += rhs.0[i][j];
            }
        }
        m
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale(-1.0))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..D).all(|i| (0..D).all(|j| (self.0[i][j] - self.0[j][i]).abs() <= tol))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|r| r.iter().all(|v| v.is_finite()))
    }

    pub fn is_diagonal(&self) -> bool {
        (0..D).all(|i| (0..D).all(|j| i == j || self.0[i][j] == 0.0))
    }

    pub fn diagonal(&self) -> [f64; D] {
        let mut d = [0.0; D];
        for (i, v) in d.iter_mut().enumerate() {
            *v = self.0[i][i];
        }
        d
    }
}

/// Solve the `k × k` system stored in the leading block of `a` by Gaussian
/// elimination with partial pivoting. Returns `None` when the block is
/// numerically singular.
pub(crate) fn solve_leading<const D: usize>(
    mut a: [[f64; D]; D],
    mut b: [f64; D],
    k: usize,
) -> Option<[f64; D]> {
    for col in 0..k {
        let mut piv = col;
        for r in col + 1..k {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..k {
            let f = a[r][col] / a[col][col];
            for c in col..k {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = [0.0; D];
    for r in (0..k).rev() {
        let mut s = b[r];
        for c in r + 1..k {
            s -= a[r][c] * x[c];
        }
        x[r] = s / a[r][r];
    }
    Some(x)
}

/// Least-squares (Gram) projection of `v` onto the span of `gens`, restricted to
/// nonnegative coefficients: the projection of `v` onto the convex cone they
/// generate. Exhaustive over subsets, so only meant for a handful of generators.
pub(crate) fn project_onto_cone<const D: usize>(v: &Point<D>, gens: &[Point<D>]) -> Point<D> {
    let k = gens.len();
    assert!(k <= 16, "cone projection is exhaustive over generator subsets");
    let mut best = Point::zero();
    let mut best_res = v.norm_sq();
    for mask in 1u32..(1u32 << k) {
        let idx: alloc::vec::Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        if idx.len() > D {
            continue;
        }
        let mut g = [[0.0; D]; D];
        let mut rhs = [0.0; D];
        for (r, &i) in idx.iter().enumerate() {
            rhs[r] = gens[i].dot(v);
            for (c, &j) in idx.iter().enumerate() {
                g[r][c] = gens[i].dot(&gens[j]);
            }
        }
        let Some(coef) = solve_leading(g, rhs, idx.len()) else {
            continue;
        };
        if coef[..idx.len()].iter().any(|c| *c < -1e-14) {
            continue;
        }
        let mut p = Point::zero();
        for (r, &i) in idx.iter().enumerate() {
            p += gens[i] * coef[r];
        }
        let res = (*v - p).norm_sq();
        if res < best_res {
            best_res = res;
            best = p;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_and_quad() {
        let q = Mat::<2>([[1.0, 2.0], [0.0, 3.0]]);
        let g = q.gram();
        assert_eq!(g.0, [[5.0, 6.0], [6.0, 9.0]]);
        assert_eq!(g.quad(&Point([1.0, 1.0])), 26.0);
    }

    #[test]
    fn cone_projection_of_quadrant() {
        let gens = [Point([1.0, 0.0]), Point([0.0, 1.0])];
        assert_eq!(project_onto_cone(&Point([2.0, -1.0]), &gens), Point([2.0, 0.0]));
        assert_eq!(project_onto_cone(&Point([-1.0, -1.0]), &gens), Point([0.0, 0.0]));
        assert_eq!(project_onto_cone(&Point([0.5, 0.25]), &gens), Point([0.5, 0.25]));
    }
}
