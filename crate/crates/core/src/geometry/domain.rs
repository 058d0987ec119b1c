use alloc::vec::Vec;

use super::{GeometryError, PsiSpec};
use crate::linalg::{solve_leading, Point};
use crate::rng::CounterRng;

/// One half-space `{x : ⟨normal, x⟩ > offset}` with a unit inward normal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Face<const D: usize> {
    pub normal: Point<D>,
    pub offset: f64,
}

impl<const D: usize> Face<D> {
    pub fn new(normal: Point<D>, offset: f64) -> Result<Self, GeometryError> {
        let n = normal.norm();
        if !(n.is_finite() && n > 0.0) || !offset.is_finite() {
            return Err(GeometryError::Invalid("face normal must be finite and nonzero"));
        }
        Ok(Self { normal: normal * (1.0 / n), offset: offset / n })
    }

    #[inline]
    fn slack(&self, x: &Point<D>) -> f64 {
        self.normal.dot(x) - self.offset
    }
}

/// The geometric shape of a domain.
#[derive(Clone, Debug, PartialEq)]
pub enum DomainKind<const D: usize> {
    /// `{x : ⟨normal, x⟩ > offset}`; in one dimension with `normal = 1`,
    /// `offset = 0` this is the half-line `(0, ∞)`.
    HalfSpace(Face<D>),
    Ball { center: Point<D>, radius: f64 },
    AxisBox { lo: Point<D>, hi: Point<D> },
    /// Intersection of half-spaces.
    Polytope { faces: Vec<Face<D>> },
    /// `{x : inner < |x − center| < outer}`.
    Shell { center: Point<D>, inner: f64, outer: f64 },
    /// Axis box with the corner orthant `{x ≥ corner}` removed. Non-convex with a
    /// reentrant corner; it violates the exterior-sphere condition and serves
    /// as a negative example.
    LShape { lo: Point<D>, hi: Point<D>, corner: Point<D> },
}

/// Where a point sits relative to the domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    Inside,
    Boundary,
    Outside,
}

/// A reflecting domain with its regularity constants.
#[derive(Clone, Debug, PartialEq)]
pub struct Domain<const D: usize> {
    pub kind: DomainKind<D>,
    /// Uniform exterior-sphere radius.
    pub r0: f64,
    /// Cone-uniformity radius.
    pub delta: f64,
    /// Cone-aperture constant, `≥ 1`.
    pub beta: f64,
    /// Local Lipschitz constant of the projection on the `r0/2` collar.
    pub kappa: f64,
    pub psi: Option<PsiSpec<D>>,
    /// Absolute tolerance for boundary classification.
    pub boundary_tol: f64,
}

const REL_BOUNDARY_TOL: f64 = 1e-9;

impl<const D: usize> Domain<D> {
    /// Build a domain, checking the shape and the basic constants. `kappa`
    /// defaults to 1 for convex kinds and 2 for the shell; Condition (A) itself
    /// is not enforced here (see [`super::verify_condition_a`]).
    pub fn new(kind: DomainKind<D>, r0: f64, delta: f64, beta: f64) -> Result<Self, GeometryError> {
        if D == 0 {
            return Err(GeometryError::Invalid("dimension must be at least 1"));
        }
        if !(r0 > 0.0 && r0.is_finite()) {
            return Err(GeometryError::Invalid("r0 must be positive"));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(GeometryError::Invalid("delta must be positive"));
        }
        if !(beta >= 1.0 && beta.is_finite()) {
            return Err(GeometryError::Invalid("beta must be >= 1"));
        }
        validate_kind(&kind)?;
        let kappa = match kind {
            DomainKind::Shell { .. } | DomainKind::LShape { .. } => 2.0,
            _ => 1.0,
        };
        let scale = characteristic_length(&kind);
        Ok(Self { kind, r0, delta, beta, kappa, psi: None, boundary_tol: REL_BOUNDARY_TOL * scale })
    }

    /// The half-line `(0, ∞)` (or half-space `{x_1 > 0}` in higher dimension).
    pub fn half_line(r0: f64) -> Self {
        Self::new(DomainKind::HalfSpace(Face { normal: Point::unit(0), offset: 0.0 }), r0, r0, 1.0)
            .expect("valid half-space")
    }

    pub fn ball(center: Point<D>, radius: f64) -> Result<Self, GeometryError> {
        Self::new(DomainKind::Ball { center, radius }, radius, radius * 0.5, 2.0)
    }

    pub fn shell(center: Point<D>, inner: f64, outer: f64, r0: f64) -> Result<Self, GeometryError> {
        Self::new(DomainKind::Shell { center, inner, outer }, r0, inner * 0.5, 2.0)
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn with_psi(mut self, psi: PsiSpec<D>) -> Self {
        self.psi = Some(psi);
        self
    }

    pub fn with_constants(mut self, r0: f64, delta: f64, beta: f64) -> Self {
        self.r0 = r0;
        self.delta = delta;
        self.beta = beta;
        self
    }

    pub fn is_convex(&self) -> bool {
        !matches!(self.kind, DomainKind::Shell { .. } | DomainKind::LShape { .. })
    }

    /// Polytopes are reported as possibly unbounded.
    pub fn is_bounded(&self) -> bool {
        !matches!(self.kind, DomainKind::HalfSpace(_) | DomainKind::Polytope { .. })
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            DomainKind::HalfSpace(_) => "half-space",
            DomainKind::Ball { .. } => "ball",
            DomainKind::AxisBox { .. } => "box",
            DomainKind::Polytope { .. } => "polytope",
            DomainKind::Shell { .. } => "shell",
            DomainKind::LShape { .. } => "l-shape",
        }
    }

    /// Whether the penalty construction applies: the projection must be
    /// single-valued on the `r0` collar.
    pub fn admissibility(&self) -> Result<(), GeometryError> {
        match self.kind {
            DomainKind::LShape { .. } => {
                Err(GeometryError::NotAdmissible("reentrant corner has an empty normal cone"))
            }
            DomainKind::Shell { inner, .. } if self.r0 > inner => {
                Err(GeometryError::NotAdmissible("shell needs r0 <= inner radius"))
            }
            _ => Ok(()),
        }
    }

    /// Nearest point of the closure together with the distance to it. Outside
    /// the reach zone the returned point is one of possibly several minimisers.
    pub fn closest(&self, x: &Point<D>) -> (Point<D>, f64) {
        match &self.kind {
            DomainKind::HalfSpace(f) => {
                let s = f.slack(x);
                if s >= 0.0 {
                    (*x, 0.0)
                } else {
                    (*x - f.normal * s, -s)
                }
            }
            DomainKind::Ball { center, radius } => {
                let v = *x - *center;
                let r = v.norm();
                if r <= *radius {
                    (*x, 0.0)
                } else {
                    (*center + v * (*radius / r), r - radius)
                }
            }
            DomainKind::AxisBox { lo, hi } => {
                let mut p = *x;
                for i in 0..D {
                    p[i] = p[i].clamp(lo[i], hi[i]);
                }
                (p, p.dist(x))
            }
            DomainKind::Polytope { faces } => polytope_closest(faces, x),
            DomainKind::Shell { center, inner, outer } => {
                let v = *x - *center;
                let r = v.norm();
                if r < *inner {
                    let u = v.normalized().unwrap_or(Point::unit(0));
                    (*center + u * *inner, inner - r)
                } else if r > *outer {
                    (*center + v * (*outer / r), r - outer)
                } else {
                    (*x, 0.0)
                }
            }
            DomainKind::LShape { lo, hi, corner } => {
                let mut best = (*x, f64::INFINITY);
                for i in 0..D {
                    let mut p = *x;
                    for j in 0..D {
                        let top = if j == i { corner[j] } else { hi[j] };
                        p[j] = p[j].clamp(lo[j], top);
                    }
                    let d = p.dist(x);
                    if d < best.1 {
                        best = (p, d);
                    }
                }
                best
            }
        }
    }

    /// Euclidean distance to the closure; zero exactly on the closure.
    pub fn distance_to_closure(&self, x: &Point<D>) -> f64 {
        self.closest(x).1
    }

    /// Distance from `x` to the complement of the domain (0 outside the domain).
    pub fn depth(&self, x: &Point<D>) -> f64 {
        match &self.kind {
            DomainKind::HalfSpace(f) => f.slack(x).max(0.0),
            DomainKind::Ball { center, radius } => (radius - x.dist(center)).max(0.0),
            DomainKind::AxisBox { lo, hi } => {
                let mut m = f64::INFINITY;
                for i in 0..D {
                    m = m.min(x[i] - lo[i]).min(hi[i] - x[i]);
                }
                m.max(0.0)
            }
            DomainKind::Polytope { faces } => {
                faces.iter().map(|f| f.slack(x)).fold(f64::INFINITY, f64::min).max(0.0)
            }
            DomainKind::Shell { center, inner, outer } => {
                let r = x.dist(center);
                (r - inner).min(outer - r).max(0.0)
            }
            DomainKind::LShape { lo, hi, corner } => {
                let mut m = f64::INFINITY;
                for i in 0..D {
                    m = m.min(x[i] - lo[i]).min(hi[i] - x[i]);
                }
                let mut notch = Point::<D>::zero();
                for i in 0..D {
                    notch[i] = (corner[i] - x[i]).max(0.0);
                }
                m.min(notch.norm()).max(0.0)
            }
        }
    }

    pub fn classify(&self, x: &Point<D>) -> Location {
        self.classify_with(x, self.boundary_tol)
    }

    pub fn classify_with(&self, x: &Point<D>, tol: f64) -> Location {
        if self.distance_to_closure(x) > tol {
            Location::Outside
        } else if self.depth(x) > tol {
            Location::Inside
        } else {
            Location::Boundary
        }
    }

    /// Distance to the boundary, from either side.
    pub fn distance_to_boundary(&self, x: &Point<D>) -> f64 {
        self.distance_to_closure(x).max(self.depth(x))
    }

    /// The unique nearest point of the closure inside the reach zone.
    pub fn project(&self, x: &Point<D>) -> Result<Point<D>, GeometryError> {
        let (p, d) = self.closest(x);
        if d >= self.r0 {
            return Err(GeometryError::OutOfReach { distance: d, r0: self.r0 });
        }
        Ok(p)
    }

    /// Nearest boundary point: the projection for points off the closure and the
    /// foot of the shortest segment to the complement for points inside.
    pub fn nearest_boundary_point(&self, x: &Point<D>) -> Point<D> {
        if self.distance_to_closure(x) > 0.0 {
            return self.closest(x).0;
        }
        match &self.kind {
            DomainKind::HalfSpace(f) => *x - f.normal * f.slack(x),
            DomainKind::Ball { center, radius } => {
                let u = (*x - *center).normalized().unwrap_or(Point::unit(0));
                *center + u * *radius
            }
            DomainKind::AxisBox { lo, hi } => {
                let (mut axis, mut val, mut best) = (0, lo[0], f64::INFINITY);
                for i in 0..D {
                    if x[i] - lo[i] < best {
                        (axis, val, best) = (i, lo[i], x[i] - lo[i]);
                    }
                    if hi[i] - x[i] < best {
                        (axis, val, best) = (i, hi[i], hi[i] - x[i]);
                    }
                }
                let mut p = *x;
                p[axis] = val;
                p
            }
            DomainKind::Polytope { faces } => {
                let f = faces
                    .iter()
                    .min_by(|a, b| a.slack(x).total_cmp(&b.slack(x)))
                    .expect("nonempty polytope");
                *x - f.normal * f.slack(x)
            }
            DomainKind::Shell { center, inner, outer } => {
                let v = *x - *center;
                let r = v.norm();
                let u = v.normalized().unwrap_or(Point::unit(0));
                if r - inner <= outer - r {
                    *center + u * *inner
                } else {
                    *center + u * *outer
                }
            }
            DomainKind::LShape { lo, hi, corner } => {
                let (mut axis, mut val, mut best) = (0, lo[0], f64::INFINITY);
                for i in 0..D {
                    if x[i] - lo[i] < best {
                        (axis, val, best) = (i, lo[i], x[i] - lo[i]);
                    }
                    if hi[i] - x[i] < best {
                        (axis, val, best) = (i, hi[i], hi[i] - x[i]);
                    }
                }
                let mut notch = *x;
                for i in 0..D {
                    notch[i] = notch[i].max(corner[i]);
                }
                if notch.dist(x) < best {
                    notch
                } else {
                    let mut p = *x;
                    p[axis] = val;
                    p
                }
            }
        }
    }

    /// Unit generators of the normal cone at a boundary point: the unique inward
    /// normal on smooth pieces, the active face normals at corners, nothing at
    /// a reentrant corner.
    pub fn cone_generators(&self, x: &Point<D>) -> Vec<Point<D>> {
        let tol = self.boundary_tol.max(1e-12) * 10.0;
        let mut gens = Vec::new();
        match &self.kind {
            DomainKind::HalfSpace(f) => gens.push(f.normal),
            DomainKind::Ball { center, .. } => {
                gens.extend((*center - *x).normalized());
            }
            DomainKind::AxisBox { lo, hi } => {
                for i in 0..D {
                    if (x[i] - lo[i]).abs() <= tol {
                        gens.push(Point::unit(i));
                    }
                    if (x[i] - hi[i]).abs() <= tol {
                        gens.push(-Point::unit(i));
                    }
                }
            }
            DomainKind::Polytope { faces } => {
                gens.extend(faces.iter().filter(|f| f.slack(x).abs() <= tol).map(|f| f.normal));
            }
            DomainKind::Shell { center, inner, outer } => {
                let v = *x - *center;
                let r = v.norm();
                if let Some(u) = v.normalized() {
                    if (r - inner).abs() <= (r - outer).abs() {
                        gens.push(u);
                    } else {
                        gens.push(-u);
                    }
                }
            }
            DomainKind::LShape { lo, hi, corner } => {
                let on_notch = (0..D).all(|j| x[j] >= corner[j] - tol);
                let notch_active: Vec<usize> =
                    (0..D).filter(|&i| on_notch && (x[i] - corner[i]).abs() <= tol).collect();
                if notch_active.len() >= 2 {
                    return gens;
                }
                for i in 0..D {
                    if (x[i] - lo[i]).abs() <= tol {
                        gens.push(Point::unit(i));
                    }
                    if (x[i] - hi[i]).abs() <= tol {
                        gens.push(-Point::unit(i));
                    }
                }
                for &i in &notch_active {
                    gens.push(-Point::unit(i));
                }
            }
        }
        gens
    }

    /// A representative cone direction `l_x`: the normalised sum of the generators.
    pub fn cone_direction(&self, x: &Point<D>) -> Option<Point<D>> {
        let gens = self.cone_generators(x);
        if gens.is_empty() {
            return None;
        }
        gens.iter().fold(Point::zero(), |acc, g| acc + *g).normalized()
    }

    /// `max ⟨u, n⟩` over unit vectors `n` in the cone at `x` (`−1` for an empty cone).
    pub fn cone_cosine(&self, x: &Point<D>, u: &Point<D>) -> f64 {
        let gens = self.cone_generators(x);
        if gens.is_empty() {
            return -1.0;
        }
        if gens.len() == 1 {
            return u.dot(&gens[0]);
        }
        let p = crate::linalg::project_onto_cone(u, &gens);
        let n = p.norm();
        if n > 1e-15 {
            u.dot(&p) / n
        } else {
            gens.iter().map(|g| u.dot(g)).fold(f64::NEG_INFINITY, f64::max)
        }
    }

    /// Exterior-ball test: is `B(x − r n, r) ∩ D = ∅`? Evaluated through the
    /// closed-form distance of the ball centre to the closure.
    pub fn normal_cone_contains(&self, x: &Point<D>, n: &Point<D>, r: f64) -> Result<bool, GeometryError> {
        let dist = self.distance_to_boundary(x);
        if dist > self.boundary_tol.max(1e-12) * 10.0 {
            return Err(GeometryError::NotOnBoundary { distance: dist });
        }
        Ok(self.exterior_ball_slack(x, n, r) >= -self.ball_tol(r))
    }

    /// `dist(x − r n, D̄) − r`; nonnegative iff the exterior ball misses `D`.
    pub(crate) fn exterior_ball_slack(&self, x: &Point<D>, n: &Point<D>, r: f64) -> f64 {
        let z = *x - *n * r;
        self.distance_to_closure(&z) - r
    }

    pub(crate) fn ball_tol(&self, r: f64) -> f64 {
        1e-9 * r + 10.0 * self.boundary_tol
    }

    /// A bounding box of the region used for sampling.
    pub fn sampling_box(&self) -> (Point<D>, Point<D>) {
        match &self.kind {
            DomainKind::HalfSpace(f) => {
                let c = f.normal * f.offset;
                (c - Point::splat(5.0), c + Point::splat(5.0))
            }
            DomainKind::Ball { center, radius } => {
                (*center - Point::splat(*radius), *center + Point::splat(*radius))
            }
            DomainKind::Shell { center, outer, .. } => {
                (*center - Point::splat(*outer), *center + Point::splat(*outer))
            }
            DomainKind::AxisBox { lo, hi } | DomainKind::LShape { lo, hi, .. } => (*lo, *hi),
            DomainKind::Polytope { faces } => {
                let verts = polytope_vertices(faces);
                if verts.is_empty() {
                    return (Point::splat(-10.0), Point::splat(10.0));
                }
                let mut lo = Point::splat(f64::INFINITY);
                let mut hi = Point::splat(f64::NEG_INFINITY);
                for v in &verts {
                    for i in 0..D {
                        lo[i] = lo[i].min(v[i]);
                        hi[i] = hi[i].max(v[i]);
                    }
                }
                for i in 0..D {
                    if hi[i] - lo[i] < 1e-9 {
                        lo[i] -= 10.0;
                        hi[i] += 10.0;
                    }
                }
                (lo, hi)
            }
        }
    }

    /// Corners and other non-smooth boundary points that random sampling
    /// would almost surely miss.
    pub fn special_boundary_points(&self) -> Vec<Point<D>> {
        match &self.kind {
            DomainKind::AxisBox { lo, hi } => {
                let mut out = Vec::new();
                for mask in 0..(1usize << D) {
                    let mut p = *lo;
                    for i in 0..D {
                        if mask & (1 << i) != 0 {
                            p[i] = hi[i];
                        }
                    }
                    out.push(p);
                }
                out
            }
            DomainKind::Polytope { faces } => polytope_vertices(faces),
            DomainKind::LShape { lo, hi, corner } => {
                let mut out = Vec::new();
                let n = 3usize.pow(D as u32);
                for code in 0..n {
                    let mut c = code;
                    let mut p = Point::zero();
                    for i in 0..D {
                        p[i] = [lo[i], corner[i], hi[i]][c % 3];
                        c /= 3;
                    }
                    if self.classify(&p) == Location::Boundary {
                        out.push(p);
                    }
                }
                out
            }
            _ => Vec::new(),
        }
    }

    /// A random boundary point.
    pub fn sample_boundary(&self, rng: &mut CounterRng) -> Point<D> {
        match &self.kind {
            DomainKind::HalfSpace(f) => {
                let mut t = Point::zero();
                for i in 0..D {
                    t[i] = rng.normal();
                }
                let t = t - f.normal * f.normal.dot(&t);
                f.normal * f.offset + t * 2.5
            }
            DomainKind::Ball { center, radius } => *center + rng.unit_vector::<D>() * *radius,
            DomainKind::Shell { center, inner, outer } => {
                let r = if rng.uniform() < 0.5 { *inner } else { *outer };
                *center + rng.unit_vector::<D>() * r
            }
            DomainKind::AxisBox { lo, hi } => {
                let axis = rng.below(D);
                let mut p = Point::zero();
                for i in 0..D {
                    p[i] = rng.uniform_in(lo[i], hi[i]);
                }
                p[axis] = if rng.uniform() < 0.5 { lo[axis] } else { hi[axis] };
                p
            }
            DomainKind::Polytope { faces } => {
                let (lo, hi) = self.sampling_box();
                loop {
                    let f = faces[rng.below(faces.len())];
                    let mut p = Point::zero();
                    for i in 0..D {
                        p[i] = rng.uniform_in(lo[i], hi[i]);
                    }
                    let p = p - f.normal * f.slack(&p);
                    let q = self.closest(&p).0;
                    if self.classify(&q) == Location::Boundary {
                        return q;
                    }
                }
            }
            DomainKind::LShape { lo, hi, corner } => loop {
                let piece = rng.below(D);
                let axis = rng.below(D);
                let mut p = Point::zero();
                for i in 0..D {
                    let top = if i == piece { corner[i] } else { hi[i] };
                    p[i] = rng.uniform_in(lo[i], top);
                }
                let top = if axis == piece { corner[axis] } else { hi[axis] };
                p[axis] = if rng.uniform() < 0.5 { lo[axis] } else { top };
                if self.classify(&p) == Location::Boundary {
                    return p;
                }
            },
        }
    }

    /// A random point of the closure (rejection sampling in the sampling box).
    pub fn sample_closure(&self, rng: &mut CounterRng) -> Point<D> {
        if let DomainKind::HalfSpace(f) = &self.kind {
            return self.sample_boundary(rng) + f.normal * rng.uniform_in(0.0, 5.0);
        }
        let (lo, hi) = self.sampling_box();
        loop {
            let mut p = Point::zero();
            for i in 0..D {
                p[i] = rng.uniform_in(lo[i], hi[i]);
            }
            if self.distance_to_closure(&p) == 0.0 {
                return p;
            }
        }
    }
}

fn validate_kind<const D: usize>(kind: &DomainKind<D>) -> Result<(), GeometryError> {
    let finite = |p: &Point<D>| p.is_finite();
    match kind {
        DomainKind::HalfSpace(f) => {
            if (f.normal.norm() - 1.0).abs() > 1e-9 {
                return Err(GeometryError::Invalid("half-space normal must be a unit vector"));
            }
        }
        DomainKind::Ball { center, radius } => {
            if !finite(center) || !(*radius > 0.0 && radius.is_finite()) {
                return Err(GeometryError::Invalid("ball needs a finite centre and positive radius"));
            }
        }
        DomainKind::AxisBox { lo, hi } => {
            if !finite(lo) || !finite(hi) || (0..D).any(|i| lo[i] >= hi[i]) {
                return Err(GeometryError::Invalid("box needs lo < hi in every coordinate"));
            }
        }
        DomainKind::Polytope { faces } => {
            if faces.is_empty() {
                return Err(GeometryError::Invalid("polytope needs at least one face"));
            }
            if faces.len() > 12 {
                return Err(GeometryError::Invalid("polytope supports at most 12 faces"));
            }
            let verts = polytope_vertices(faces);
            if !verts.is_empty() {
                let mut c = Point::zero();
                for v in &verts {
                    c += *v;
                }
                let c = c * (1.0 / verts.len() as f64);
                if faces.iter().any(|f| f.slack(&c) <= 0.0) {
                    return Err(GeometryError::Invalid("polytope has empty interior"));
                }
            }
        }
        DomainKind::Shell { center, inner, outer } => {
            if !finite(center) || !(*inner > 0.0 && inner < outer && outer.is_finite()) {
                return Err(GeometryError::Invalid("shell needs 0 < inner < outer"));
            }
        }
        DomainKind::LShape { lo, hi, corner } => {
            if D < 2 {
                return Err(GeometryError::Invalid("l-shape needs dimension >= 2"));
            }
            if (0..D).any(|i| !(lo[i] < corner[i] && corner[i] < hi[i])) {
                return Err(GeometryError::Invalid("l-shape needs lo < corner < hi"));
            }
        }
    }
    Ok(())
}

fn characteristic_length<const D: usize>(kind: &DomainKind<D>) -> f64 {
    match kind {
        DomainKind::HalfSpace(_) | DomainKind::Polytope { .. } => 1.0,
        DomainKind::Ball { radius, .. } => 2.0 * radius,
        DomainKind::Shell { outer, .. } => 2.0 * outer,
        DomainKind::AxisBox { lo, hi } | DomainKind::LShape { lo, hi, .. } => (*hi - *lo).norm(),
    }
}

/// Subsets of `0..k` of size `1..=max` as index lists.
fn subsets(k: usize, max: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..(1u32 << k)).filter_map(move |mask| {
        let idx: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        (idx.len() <= max).then_some(idx)
    })
}

/// Projection of `x` onto the affine set `{⟨a_i, y⟩ = b_i, i ∈ active}`.
fn affine_projection<const D: usize>(faces: &[Face<D>], active: &[usize], x: &Point<D>) -> Option<Point<D>> {
    let mut g = [[0.0; D]; D];
    let mut rhs = [0.0; D];
    for (r, &i) in active.iter().enumerate() {
        rhs[r] = faces[i].offset - faces[i].normal.dot(x);
        for (c, &j) in active.iter().enumerate() {
            g[r][c] = faces[i].normal.dot(&faces[j].normal);
        }
    }
    let coef = solve_leading(g, rhs, active.len())?;
    let mut y = *x;
    for (r, &i) in active.iter().enumerate() {
        y += faces[i].normal * coef[r];
    }
    Some(y)
}

/// Exact projection onto a polytope by active-set enumeration: the projection
/// is the affine projection onto the hull of the face containing it in its
/// relative interior, and every feasible candidate is at least as far.
fn polytope_closest<const D: usize>(faces: &[Face<D>], x: &Point<D>) -> (Point<D>, f64) {
    let feasible = |y: &Point<D>| faces.iter().all(|f| f.slack(y) >= -1e-12);
    if feasible(x) {
        return (*x, 0.0);
    }
    let mut best = (*x, f64::INFINITY);
    for active in subsets(faces.len(), D) {
        if let Some(y) = affine_projection(faces, &active, x) {
            if feasible(&y) {
                let d = y.dist(x);
                if d < best.1 {
                    best = (y, d);
                }
            }
        }
    }
    best
}

fn polytope_vertices<const D: usize>(faces: &[Face<D>]) -> Vec<Point<D>> {
    let mut out: Vec<Point<D>> = Vec::new();
    for active in subsets(faces.len(), D).filter(|s| s.len() == D) {
        if let Some(v) = affine_projection(faces, &active, &Point::zero()) {
            if faces.iter().all(|f| f.slack(&v) >= -1e-10) && !out.iter().any(|w| w.dist(&v) < 1e-10) {
                out.push(v);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_ball() -> Domain<2> {
        Domain::ball(Point([0.0, 0.0]), 1.0).unwrap()
    }

    fn shell(r0: f64) -> Domain<2> {
        Domain::shell(Point([0.0, 0.0]), 1.0, 3.0, r0).unwrap()
    }

    fn l_shape() -> Domain<2> {
        Domain::new(
            DomainKind::LShape { lo: Point([0.0, 0.0]), hi: Point([2.0, 2.0]), corner: Point([1.0, 1.0]) },
            0.5,
            0.5,
            2.0,
        )
        .unwrap()
    }

    #[test]
    fn contains_examples() {
        assert_eq!(unit_ball().classify(&Point([0.0, 0.0])), Location::Inside);
        assert_eq!(unit_ball().classify(&Point([1.0, 0.0])), Location::Boundary);
        assert_eq!(shell(1.0).classify(&Point([0.5, 0.0])), Location::Outside);
    }

    #[test]
    fn distance_examples() {
        let hl = Domain::<1>::half_line(1.0);
        assert!((hl.distance_to_closure(&Point([-0.3])) - 0.3).abs() < 1e-15);
        assert_eq!(hl.distance_to_closure(&Point([0.4])), 0.0);
        assert!((shell(1.0).distance_to_closure(&Point([0.5, 0.0])) - 0.5).abs() < 1e-15);
        assert!((shell(1.0).distance_to_closure(&Point([4.0, 0.0])) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn project_examples() {
        let wide = unit_ball().with_constants(5.0, 0.5, 2.0);
        assert_eq!(wide.project(&Point([2.0, 0.0])).unwrap(), Point([1.0, 0.0]));
        assert_eq!(shell(1.0).project(&Point([0.5, 0.0])).unwrap(), Point([1.0, 0.0]));
        let inside = Point([0.2, -0.3]);
        assert_eq!(unit_ball().project(&inside).unwrap(), inside);
        assert!(matches!(
            shell(1.0).project(&Point([0.0, 0.0])),
            Err(GeometryError::OutOfReach { .. })
        ));
    }

    #[test]
    fn normal_cone_examples() {
        let hl = Domain::<1>::half_line(1.0);
        for r in [0.1, 1.0, 100.0] {
            assert!(hl.normal_cone_contains(&Point([0.0]), &Point([1.0]), r).unwrap());
            assert!(!hl.normal_cone_contains(&Point([0.0]), &Point([-1.0]), r).unwrap());
        }
        let b = unit_ball();
        let x = Point([1.0, 0.0]);
        assert!(b.normal_cone_contains(&x, &Point([-1.0, 0.0]), 5.0).unwrap());
        assert!(!b.normal_cone_contains(&x, &Point([1.0, 0.0]), 0.1).unwrap());
        // inner sphere of the shell: the inward normal points away from the centre
        let s = shell(1.0);
        assert!(s.normal_cone_contains(&x, &Point([1.0, 0.0]), 1.0).unwrap());
        assert!(!s.normal_cone_contains(&x, &Point([1.0, 0.0]), 1.5).unwrap());
        assert!(!s.normal_cone_contains(&x, &Point([-1.0, 0.0]), 1.0).unwrap());
        assert!(matches!(
            s.normal_cone_contains(&Point([2.0, 0.0]), &Point([1.0, 0.0]), 1.0),
            Err(GeometryError::NotOnBoundary { .. })
        ));
    }

    #[test]
    fn polytope_projection_matches_box() {
        let faces = alloc::vec![
            Face::new(Point([1.0, 0.0]), 0.0).unwrap(),
            Face::new(Point([-1.0, 0.0]), -1.0).unwrap(),
            Face::new(Point([0.0, 1.0]), 0.0).unwrap(),
            Face::new(Point([0.0, -1.0]), -1.0).unwrap(),
        ];
        let poly = Domain::new(DomainKind::Polytope { faces }, 1.0, 0.5, 2.0).unwrap();
        let bx = Domain::new(
            DomainKind::AxisBox { lo: Point([0.0, 0.0]), hi: Point([1.0, 1.0]) },
            1.0,
            0.5,
            2.0,
        )
        .unwrap();
        let mut rng = CounterRng::new(3, crate::rng::Stream::Sampling(0));
        for _ in 0..500 {
            let x = Point([rng.uniform_in(-1.0, 2.0), rng.uniform_in(-1.0, 2.0)]);
            let (p, d) = poly.closest(&x);
            let (q, e) = bx.closest(&x);
            assert!(p.dist(&q) < 1e-12 && (d - e).abs() < 1e-12);
            assert!((poly.depth(&x) - bx.depth(&x)).abs() < 1e-12);
        }
        assert_eq!(poly.special_boundary_points().len(), 4);
    }

    #[test]
    fn l_shape_geometry() {
        let l = l_shape();
        assert_eq!(l.classify(&Point([1.5, 1.5])), Location::Outside);
        assert_eq!(l.classify(&Point([0.5, 1.5])), Location::Inside);
        assert_eq!(l.classify(&Point([1.0, 1.0])), Location::Boundary);
        assert!((l.distance_to_closure(&Point([1.2, 1.5])) - 0.2).abs() < 1e-12);
        assert!(l.cone_generators(&Point([1.0, 1.0])).is_empty());
        assert_eq!(l.cone_generators(&Point([1.0, 1.5])), alloc::vec![Point([-1.0, 0.0])]);
        assert!(l.special_boundary_points().contains(&Point([1.0, 1.0])));
        assert!(!l.is_convex());
        assert!(l.admissibility().is_err());
    }

    #[test]
    fn cone_cosine_at_box_corner() {
        let bx = Domain::new(
            DomainKind::AxisBox { lo: Point([0.0, 0.0]), hi: Point([1.0, 1.0]) },
            1.0,
            0.5,
            2.0,
        )
        .unwrap();
        let c = Point([0.0, 0.0]);
        let diag = Point([1.0, 1.0]).normalized().unwrap();
        assert!((bx.cone_cosine(&c, &diag) - 1.0).abs() < 1e-12);
        assert!((bx.cone_cosine(&c, &Point([1.0, 0.0])) - 1.0).abs() < 1e-12);
        assert!(bx.cone_cosine(&c, &Point([-1.0, 0.0])).abs() < 1e-12);
        assert!(bx.cone_cosine(&c, &Point([-1.0, -1.0]).normalized().unwrap()) < 0.0);
    }

    #[test]
    fn samplers_land_on_boundary() {
        let mut rng = CounterRng::new(11, crate::rng::Stream::Sampling(1));
        for d in [unit_ball(), shell(1.0), l_shape()] {
            for _ in 0..200 {
                let p = d.sample_boundary(&mut rng);
                assert_eq!(d.classify(&p), Location::Boundary, "{}", d.name());
                let q = d.sample_closure(&mut rng);
                assert_eq!(d.distance_to_closure(&q), 0.0);
            }
        }
    }
}
