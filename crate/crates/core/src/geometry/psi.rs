use crate::linalg::{Mat, Point};

/// The smooth compensating function behind Condition (C).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PsiField<const D: usize> {
    /// `Ψ ≡ 0`; sufficient for convex domains.
    Zero,
    /// `Ψ(x) = c·χ(|x − center|)·|x − center|²` where `χ` is a quintic smoothstep
    /// bump equal to 1 up to `a` and 0 beyond `b`, with `a`, `b` at one and three
    /// quarters of the way from the inner to the outer radius.
    ShellBump { center: Point<D>, inner: f64, outer: f64, c: f64 },
}

/// A Condition (C) function together with its constant `δ'`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsiSpec<const D: usize> {
    pub field: PsiField<D>,
    pub delta_prime: f64,
}

impl<const D: usize> PsiSpec<D> {
    pub fn zero() -> Self {
        Self { field: PsiField::Zero, delta_prime: 1.0 }
    }

    /// The shipped shell function: `c = 1`, `δ' = 2ρ1²`, so that the inner-sphere
    /// term `2cρ1/δ' = 1/ρ1` dominates the concavity defect `1/(2ρ1)`.
    pub fn shell(center: Point<D>, inner: f64, outer: f64) -> Self {
        Self {
            field: PsiField::ShellBump { center, inner, outer, c: 1.0 },
            delta_prime: 2.0 * inner * inner,
        }
    }

    pub fn value(&self, x: &Point<D>) -> f64 {
        self.field.value(x)
    }

    pub fn gradient(&self, x: &Point<D>) -> Point<D> {
        self.field.gradient(x)
    }

    pub fn hessian(&self, x: &Point<D>) -> Mat<D> {
        self.field.hessian(x)
    }

    /// `L_Ψ`: a common bound of `|Ψ|`, `|∇Ψ|` and the Hessian's operator norm.
    pub fn bound(&self) -> f64 {
        self.field.bound()
    }
}

fn smoothstep(t: f64) -> (f64, f64, f64) {
    if t <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    if t >= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    let t2 = t * t;
    let t3 = t2 * t;
    (
        t3 * (10.0 - 15.0 * t + 6.0 * t2),
        30.0 * t2 * (1.0 - t) * (1.0 - t),
        60.0 * t * (1.0 - t) * (1.0 - 2.0 * t),
    )
}

impl<const D: usize> PsiField<D> {
    /// Radial profile `ψ(r) = c χ(r) r²` and its first two derivatives.
    fn radial(r: f64, inner: f64, outer: f64, c: f64) -> (f64, f64, f64) {
        let a = inner + 0.25 * (outer - inner);
        let b = inner + 0.75 * (outer - inner);
        let w = b - a;
        let (s, s1, s2) = smoothstep((r - a) / w);
        let (chi, chi1, chi2) = (1.0 - s, -s1 / w, -s2 / (w * w));
        (
            c * chi * r * r,
            c * (chi1 * r * r + 2.0 * r * chi),
            c * (chi2 * r * r + 4.0 * chi1 * r + 2.0 * chi),
        )
    }

    pub fn value(&self, x: &Point<D>) -> f64 {
        match *self {
            PsiField::Zero => 0.0,
            PsiField::ShellBump { center, inner, outer, c } => {
                Self::radial(x.dist(&center), inner, outer, c).0
            }
        }
    }

    pub fn gradient(&self, x: &Point<D>) -> Point<D> {
        match *self {
            PsiField::Zero => Point::zero(),
            PsiField::ShellBump { center, inner, outer, c } => {
                let v = *x - center;
                let r = v.norm();
                if r == 0.0 {
                    return Point::zero();
                }
                v * (Self::radial(r, inner, outer, c).1 / r)
            }
        }
    }

    pub fn hessian(&self, x: &Point<D>) -> Mat<D> {
        match *self {
            PsiField::Zero => Mat::zero(),
            PsiField::ShellBump { center, inner, outer, c } => {
                let v = *x - center;
                let r = v.norm();
                let (_, d1, d2) = Self::radial(r, inner, outer, c);
                if r < 1e-12 {
                    // χ ≡ 1 near the centre
                    return Mat::scalar(2.0 * c);
                }
                let u = v * (1.0 / r);
                let uu = Mat::outer(&u, &u);
                uu.scale(d2).add(&Mat::identity().sub(&uu).scale(d1 / r))
            }
        }
    }

    pub fn bound(&self) -> f64 {
        match *self {
            PsiField::Zero => 0.0,
            PsiField::ShellBump { inner, outer, c, .. } => {
                let b = inner + 0.75 * (outer - inner);
                let mut m: f64 = 0.0;
                let n = 4000;
                for k in 0..=n {
                    let r = b * k as f64 / n as f64;
                    let (p, d1, d2) = Self::radial(r, inner, outer, c);
                    let tang = if r > 0.0 { d1 / r } else { 2.0 * c };
                    m = m.max(p.abs()).max(d1.abs()).max(d2.abs()).max(tang.abs());
                }
                m
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_and_hessian_match_differences() {
        let psi = PsiSpec::shell(Point([0.0, 0.0]), 1.0, 3.0);
        let h = 1e-5;
        for x in [Point([0.3, 0.1]), Point([1.4, -0.9]), Point([0.0, 2.0]), Point([-1.2, 1.3])] {
            let g = psi.gradient(&x);
            let hs = psi.hessian(&x);
            for i in 0..2 {
                let e = Point::<2>::unit(i) * h;
                let fd = (psi.value(&(x + e)) - psi.value(&(x - e))) / (2.0 * h);
                assert!((fd - g[i]).abs() < 1e-7, "grad {i} at {x:?}");
                let gd = (psi.gradient(&(x + e)) - psi.gradient(&(x - e))) * (1.0 / (2.0 * h));
                for j in 0..2 {
                    assert!((gd[j] - hs.0[j][i]).abs() < 1e-5, "hess at {x:?}");
                }
            }
        }
    }

    #[test]
    fn bump_vanishes_near_outer_sphere() {
        let psi = PsiSpec::shell(Point([0.0, 0.0]), 1.0, 3.0);
        assert_eq!(psi.value(&Point([2.6, 0.0])), 0.0);
        assert_eq!(psi.gradient(&Point([3.0, 0.0])), Point::zero());
        assert!((psi.gradient(&Point([1.0, 0.0]))[0] - 2.0).abs() < 1e-15);
        assert_eq!(psi.delta_prime, 2.0);
        assert!(psi.bound() >= 2.0 && psi.bound().is_finite());
    }
}
