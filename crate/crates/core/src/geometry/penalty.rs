use super::{Domain, DomainKind, GeometryError};
use crate::linalg::Point;

/// The penalty `U = q(dist(·, D̄)²)` with the C¹ clamp
///
/// `q(s) = s` on `[0, c1²]`, `q(s) = s − (s − c1²)²/(2(c2² − c1²))` on `[c1², c2²]`,
/// and `q ≡ (c1² + c2²)/2` beyond, where `c1 = 0.6 r0`, `c2 = 0.8 r0`.
#[derive(Clone, Debug, PartialEq)]
pub struct PenaltyField<const D: usize> {
    pub domain: Domain<D>,
    /// `r0/2`; `U` is the squared distance at least up to here (in fact up to `c1`).
    pub inner_radius: f64,
    pub c1: f64,
    pub c2: f64,
    /// Lipschitz constant `2L` of `∇U`.
    pub lipschitz_2l: f64,
    /// `Λ = sup |∇U|`.
    pub sup_lambda: f64,
}

impl<const D: usize> PenaltyField<D> {
    pub fn new(domain: &Domain<D>) -> Result<Self, GeometryError> {
        domain.admissibility()?;
        let r0 = domain.r0;
        let (c1, c2) = (0.6 * r0, 0.8 * r0);
        let mut field = Self {
            domain: domain.clone(),
            inner_radius: 0.5 * r0,
            c1,
            c2,
            lipschitz_2l: 0.0,
            sup_lambda: 2.0 * c1,
        };
        field.lipschitz_2l = field.scan_lipschitz();
        Ok(field)
    }

    /// `L` itself, the constant entering `ε^α_m`.
    pub fn l(&self) -> f64 {
        0.5 * self.lipschitz_2l
    }

    fn q_prime(&self, s: f64) -> f64 {
        let (a, b) = (self.c1 * self.c1, self.c2 * self.c2);
        if s <= a {
            1.0
        } else if s >= b {
            0.0
        } else {
            1.0 - (s - a) / (b - a)
        }
    }

    fn q(&self, s: f64) -> f64 {
        let (a, b) = (self.c1 * self.c1, self.c2 * self.c2);
        if s <= a {
            s
        } else if s >= b {
            0.5 * (a + b)
        } else {
            s - (s - a) * (s - a) / (2.0 * (b - a))
        }
    }

    /// Bound on the Jacobian of `∇U = f(d) ν` where `f(d) = 2d q'(d²)`: the
    /// radial eigenvalue `f'(d)` and the tangential one `f(d)·curvature`.
    fn scan_lipschitz(&self) -> f64 {
        let (a, b) = (self.c1 * self.c1, self.c2 * self.c2);
        let radial_peak = 4.0 * b / (b - a);
        let hole = match self.domain.kind {
            DomainKind::Shell { inner, .. } => Some(inner),
            _ => None,
        };
        let mut m = radial_peak.max(2.0);
        if let Some(rho) = hole {
            let n = 20_000;
            for k in 0..=n {
                let d = self.c2 * k as f64 / n as f64;
                let tang = 2.0 * self.q_prime(d * d) * d / (rho - d);
                m = m.max(tang);
            }
        }
        m
    }

    /// `(U(x), ∇U(x))`.
    pub fn value_and_gradient(&self, x: &Point<D>) -> (f64, Point<D>) {
        let (p, d) = self.domain.closest(x);
        if d == 0.0 {
            return (0.0, Point::zero());
        }
        let s = d * d;
        let qp = self.q_prime(s);
        let g = if qp == 0.0 { Point::zero() } else { (*x - p) * (2.0 * qp) };
        (self.q(s), g)
    }

    pub fn value(&self, x: &Point<D>) -> f64 {
        self.value_and_gradient(x).0
    }

    pub fn gradient(&self, x: &Point<D>) -> Point<D> {
        self.value_and_gradient(x).1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let hl = PenaltyField::new(&Domain::<1>::half_line(1.0)).unwrap();
        let (v, g) = hl.value_and_gradient(&Point([-0.1]));
        assert!((v - 0.01).abs() < 1e-15 && (g[0] + 0.2).abs() < 1e-15);
        assert_eq!(hl.value_and_gradient(&Point([0.3])), (0.0, Point([0.0])));

        let sh = PenaltyField::new(&Domain::shell(Point([0.0, 0.0]), 1.0, 3.0, 1.0).unwrap()).unwrap();
        let (v, g) = sh.value_and_gradient(&Point([0.6, 0.0]));
        assert!((v - 0.16).abs() < 1e-15);
        assert!((g[0] + 0.8).abs() < 1e-15 && g[1] == 0.0);
    }

    #[test]
    fn constants() {
        let hl = PenaltyField::new(&Domain::<1>::half_line(1.0)).unwrap();
        assert!((hl.lipschitz_2l - 0.64 * 4.0 / 0.28).abs() < 1e-12);
        assert!((hl.sup_lambda - 1.2).abs() < 1e-15);
        assert!((hl.value(&Point([-5.0])) - 0.5).abs() < 1e-15);
        let sh = PenaltyField::new(&Domain::shell(Point([0.0, 0.0]), 1.0, 3.0, 1.0).unwrap()).unwrap();
        assert!(sh.lipschitz_2l >= hl.lipschitz_2l);
    }

    #[test]
    fn rejects_inadmissible_domains() {
        let d = Domain::shell(Point([0.0, 0.0]), 1.0, 3.0, 1.5).unwrap();
        assert!(matches!(PenaltyField::new(&d), Err(GeometryError::NotAdmissible(_))));
    }
}
