//! Closed convex sets and gauge dynamics.
//!
//! Every set variant supports membership, Euclidean projection, and ray
//! entry times; bounded variants additionally support farthest points, and
//! all variants report normal cones at feasible points. The [`Dynamic`]
//! enum describes the gauge (Minkowski functional of a symmetric convex
//! body) that converts displacements into travel times.
//!
//! Dimension agreement between a set and a query point is a programming
//! contract: methods panic on mismatch. Use [`ConvexSet::validate`] (or
//! the instance constructors in [`crate::timefns`]) to check data read
//! from external sources.

use crate::vecops;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeomError {
    #[error("farthest point undefined for unbounded {0}")]
    UnboundedSet(&'static str),
    #[error("point is not in the set: distance {distance:.3e} exceeds tol {tol:.3e}")]
    NotInSet { distance: f64, tol: f64 },
    #[error("gauge subgradient undefined at the zero vector")]
    ZeroVector,
    #[error("invalid set parameter: {0}")]
    InvalidParameter(String),
}

/// Convergence tolerance on the curve parameter of the parabola
/// projection's scalar root solve.
const PARABOLA_NEWTON_TOL: f64 = 1e-12;

/// Relative tolerance for deciding that a singleton lies on a ray.
const RAY_COLINEAR_TOL: f64 = 1e-9;

/// A closed convex subset of R^n.
///
/// Variants may be constructed directly; the checked constructors run
/// [`validate`](Self::validate) and are preferred at I/O boundaries.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexSet {
    /// Euclidean ball { x : |x - center| <= radius }.
    Ball { center: Vec<f64>, radius: f64 },
    /// Axis-aligned cube { x : max_i |x_i - center_i| <= radius }.
    Box { center: Vec<f64>, radius: f64 },
    /// { x : <normal, x> <= offset }.
    Halfspace { normal: Vec<f64>, offset: f64 },
    /// The one-point set { point }.
    Singleton { point: Vec<f64> },
    /// { (x, y) in R^2 : y >= (x - shift)^2 + offset }.
    ParabolaEpigraph2D { shift: f64, offset: f64 },
    /// All of R^n.
    WholeSpace { dim: usize },
}

/// Finitely generated normal cone at a feasible point.
///
/// The cone is the set of nonnegative combinations of `generators`. At an
/// interior point the list is empty (cone = {0}); `full_space` marks the
/// degenerate case where the cone is all of R^n (singleton-like sets), in
/// which case the generators are the 2n signed unit vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalConeRep {
    pub generators: Vec<Vec<f64>>,
    pub full_space: bool,
}

impl NormalConeRep {
    fn interior() -> Self {
        NormalConeRep { generators: Vec::new(), full_space: false }
    }

    fn boundary(generators: Vec<Vec<f64>>) -> Self {
        NormalConeRep { generators, full_space: false }
    }

    fn whole(dim: usize) -> Self {
        let mut generators = Vec::with_capacity(2 * dim);
        for i in 0..dim {
            let mut plus = vec![0.0; dim];
            plus[i] = 1.0;
            generators.push(plus);
            let mut minus = vec![0.0; dim];
            minus[i] = -1.0;
            generators.push(minus);
        }
        NormalConeRep { generators, full_space: true }
    }

    /// True when the cone is {0}, i.e. the point is interior.
    pub fn is_trivial(&self) -> bool {
        self.generators.is_empty()
    }
}

impl ConvexSet {
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self, GeomError> {
        let s = ConvexSet::Ball { center, radius };
        s.validate()?;
        Ok(s)
    }

    pub fn cube(center: Vec<f64>, radius: f64) -> Result<Self, GeomError> {
        let s = ConvexSet::Box { center, radius };
        s.validate()?;
        Ok(s)
    }

    pub fn halfspace(normal: Vec<f64>, offset: f64) -> Result<Self, GeomError> {
        let s = ConvexSet::Halfspace { normal, offset };
        s.validate()?;
        Ok(s)
    }

    pub fn singleton(point: Vec<f64>) -> Result<Self, GeomError> {
        let s = ConvexSet::Singleton { point };
        s.validate()?;
        Ok(s)
    }

    pub fn parabola_epigraph(shift: f64, offset: f64) -> Result<Self, GeomError> {
        let s = ConvexSet::ParabolaEpigraph2D { shift, offset };
        s.validate()?;
        Ok(s)
    }

    pub fn whole_space(dim: usize) -> Result<Self, GeomError> {
        let s = ConvexSet::WholeSpace { dim };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), GeomError> {
        let err = |msg: String| Err(GeomError::InvalidParameter(msg));
        match self {
            ConvexSet::Ball { center, radius } | ConvexSet::Box { center, radius } => {
                if center.is_empty() {
                    return err("center must have dimension >= 1".into());
                }
                if !vecops::all_finite(center) || !radius.is_finite() {
                    return err("center and radius must be finite".into());
                }
                if *radius < 0.0 {
                    return err(format!("radius must be >= 0, got {radius}"));
                }
            }
            ConvexSet::Halfspace { normal, offset } => {
                if normal.is_empty() {
                    return err("normal must have dimension >= 1".into());
                }
                if !vecops::all_finite(normal) || !offset.is_finite() {
                    return err("normal and offset must be finite".into());
                }
                if vecops::norm(normal) == 0.0 {
                    return err("halfspace normal must be nonzero".into());
                }
            }
            ConvexSet::Singleton { point } => {
                if point.is_empty() {
                    return err("point must have dimension >= 1".into());
                }
                if !vecops::all_finite(point) {
                    return err("point must be finite".into());
                }
            }
            ConvexSet::ParabolaEpigraph2D { shift, offset } => {
                if !shift.is_finite() || !offset.is_finite() {
                    return err("parabola parameters must be finite".into());
                }
            }
            ConvexSet::WholeSpace { dim } => {
                if *dim == 0 {
                    return err("dimension must be >= 1".into());
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::Ball { center, .. } | ConvexSet::Box { center, .. } => center.len(),
            ConvexSet::Halfspace { normal, .. } => normal.len(),
            ConvexSet::Singleton { point } => point.len(),
            ConvexSet::ParabolaEpigraph2D { .. } => 2,
            ConvexSet::WholeSpace { dim } => *dim,
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(
            self,
            ConvexSet::Ball { .. } | ConvexSet::Box { .. } | ConvexSet::Singleton { .. }
        )
    }

    fn check_dim(&self, x: &[f64]) {
        assert_eq!(
            x.len(),
            self.dim(),
            "point dimension {} does not match set dimension {}",
            x.len(),
            self.dim()
        );
    }

    /// Euclidean distance from `x` to the set.
    pub fn distance(&self, x: &[f64]) -> f64 {
        self.check_dim(x);
        match self {
            ConvexSet::Ball { center, radius } => {
                (vecops::dist(x, center) - radius).max(0.0)
            }
            ConvexSet::Box { center, radius } => {
                let mut sq = 0.0;
                for (xi, ci) in x.iter().zip(center) {
                    let excess = ((xi - ci).abs() - radius).max(0.0);
                    sq += excess * excess;
                }
                sq.sqrt()
            }
            ConvexSet::Halfspace { normal, offset } => {
                (vecops::dot(normal, x) - offset).max(0.0) / vecops::norm(normal)
            }
            ConvexSet::Singleton { point } => vecops::dist(x, point),
            ConvexSet::ParabolaEpigraph2D { shift, offset } => {
                if x[1] >= (x[0] - shift).powi(2) + offset {
                    0.0
                } else {
                    let (u, _) = nearest_curve_param(*shift, *offset, x);
                    let py = u * u + offset;
                    let px = u + shift;
                    vecops::dist(x, &[px, py])
                }
            }
            ConvexSet::WholeSpace { .. } => 0.0,
        }
    }

    /// Membership within Euclidean distance `tol`.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.distance(x) <= tol
    }

    /// Euclidean projection onto the set (the nearest point; for the
    /// parabola epigraph the symmetric two-solution case picks the smaller
    /// first coordinate).
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        self.check_dim(x);
        match self {
            ConvexSet::Ball { center, radius } => {
                let d = vecops::dist(x, center);
                if d <= *radius {
                    x.to_vec()
                } else {
                    vecops::add_scaled(center, radius / d, &vecops::sub(x, center))
                }
            }
            ConvexSet::Box { center, radius } => x
                .iter()
                .zip(center)
                .map(|(xi, ci)| xi.clamp(ci - radius, ci + radius))
                .collect(),
            ConvexSet::Halfspace { normal, offset } => {
                let excess = vecops::dot(normal, x) - offset;
                if excess <= 0.0 {
                    x.to_vec()
                } else {
                    vecops::add_scaled(x, -excess / vecops::dot(normal, normal), normal)
                }
            }
            ConvexSet::Singleton { point } => point.clone(),
            ConvexSet::ParabolaEpigraph2D { shift, offset } => {
                if x[1] >= (x[0] - shift).powi(2) + offset {
                    x.to_vec()
                } else {
                    let (u, _) = nearest_curve_param(*shift, *offset, x);
                    vec![u + shift, u * u + offset]
                }
            }
            ConvexSet::WholeSpace { .. } => x.to_vec(),
        }
    }

    /// Point of the set farthest from `x` in Euclidean distance, with the
    /// distance. Ties broken deterministically: box coordinates sitting
    /// exactly at a face center go to the negative face, and a ball
    /// queried at its own center answers `center - radius * e_1`.
    pub fn farthest_point(&self, x: &[f64]) -> Result<(Vec<f64>, f64), GeomError> {
        self.check_dim(x);
        match self {
            ConvexSet::Ball { center, radius } => {
                let d = vecops::dist(x, center);
                let q = if d == 0.0 {
                    let mut q = center.clone();
                    q[0] -= radius;
                    q
                } else {
                    vecops::add_scaled(center, -radius / d, &vecops::sub(x, center))
                };
                let dist = vecops::dist(x, &q);
                Ok((q, dist))
            }
            ConvexSet::Box { center, radius } => {
                let q: Vec<f64> = x
                    .iter()
                    .zip(center)
                    .map(|(xi, ci)| if *xi >= *ci { ci - radius } else { ci + radius })
                    .collect();
                let dist = vecops::dist(x, &q);
                Ok((q, dist))
            }
            ConvexSet::Singleton { point } => Ok((point.clone(), vecops::dist(x, point))),
            ConvexSet::Halfspace { .. } => Err(GeomError::UnboundedSet("halfspace")),
            ConvexSet::ParabolaEpigraph2D { .. } => {
                Err(GeomError::UnboundedSet("parabola epigraph"))
            }
            ConvexSet::WholeSpace { .. } => Err(GeomError::UnboundedSet("whole space")),
        }
    }

    /// Normal cone at a point within `tol` of the set. A face counts as
    /// active when the point sits within `tol` of it.
    pub fn normal_cone(&self, x: &[f64], tol: f64) -> Result<NormalConeRep, GeomError> {
        self.check_dim(x);
        let d = self.distance(x);
        if d > tol {
            return Err(GeomError::NotInSet { distance: d, tol });
        }
        let n = self.dim();
        Ok(match self {
            ConvexSet::Ball { center, radius } => {
                if *radius <= tol {
                    NormalConeRep::whole(n)
                } else if vecops::dist(x, center) >= radius - tol {
                    NormalConeRep::boundary(vec![vecops::sub(x, center)])
                } else {
                    NormalConeRep::interior()
                }
            }
            ConvexSet::Box { center, radius } => {
                if *radius <= tol {
                    return Ok(NormalConeRep::whole(n));
                }
                let mut gens = Vec::new();
                for (i, (xi, ci)) in x.iter().zip(center).enumerate() {
                    if xi - ci >= radius - tol {
                        let mut g = vec![0.0; n];
                        g[i] = 1.0;
                        gens.push(g);
                    } else if ci - xi >= radius - tol {
                        let mut g = vec![0.0; n];
                        g[i] = -1.0;
                        gens.push(g);
                    }
                }
                if gens.is_empty() {
                    NormalConeRep::interior()
                } else {
                    NormalConeRep::boundary(gens)
                }
            }
            ConvexSet::Halfspace { normal, offset } => {
                let slack = offset - vecops::dot(normal, x);
                if slack <= tol * vecops::norm(normal) {
                    NormalConeRep::boundary(vec![normal.clone()])
                } else {
                    NormalConeRep::interior()
                }
            }
            ConvexSet::Singleton { .. } => NormalConeRep::whole(n),
            ConvexSet::ParabolaEpigraph2D { shift, offset } => {
                let (u, _) = nearest_curve_param(*shift, *offset, x);
                let curve_pt = [u + shift, u * u + offset];
                if vecops::dist(x, &curve_pt) <= tol {
                    NormalConeRep::boundary(vec![vec![2.0 * u, -1.0]])
                } else {
                    NormalConeRep::interior()
                }
            }
            ConvexSet::WholeSpace { .. } => NormalConeRep::interior(),
        })
    }

    /// Smallest t >= 0 with x + t v in the set, or `None` when the ray
    /// never meets it. For a singleton target the ray counts as hitting
    /// the point when it passes within a small relative tolerance.
    pub fn ray_entry_time(&self, x: &[f64], v: &[f64]) -> Option<f64> {
        self.check_dim(x);
        self.check_dim(v);
        match self {
            ConvexSet::Ball { center, radius } => {
                let dx = vecops::sub(x, center);
                let c0 = vecops::dot(&dx, &dx) - radius * radius;
                let a = vecops::dot(v, v);
                if a == 0.0 {
                    return if c0 <= 0.0 { Some(0.0) } else { None };
                }
                // Strictly inside: entry is immediate. Points within rounding
                // of the sphere fall through to the split below, which stays
                // accurate where this squared test has already absorbed.
                if c0 < 0.0 {
                    return Some(0.0);
                }
                // Split center - x into components along and across the ray.
                // The across part carries no cancellation, so tangent rays
                // come out exact instead of losing half the mantissa to the
                // usual discriminant subtraction.
                let along = -vecops::dot(&dx, v) / a;
                let perp: Vec<f64> = dx.iter().zip(v).map(|(d, vi)| d + along * vi).collect();
                let chord_sq = radius * radius - vecops::dot(&perp, &perp);
                if chord_sq < 0.0 {
                    return None;
                }
                let half_chord = (chord_sq / a).sqrt();
                if along + half_chord < 0.0 {
                    return None;
                }
                Some((along - half_chord).max(0.0))
            }
            ConvexSet::Box { center, radius } => {
                let mut lo = 0.0f64;
                let mut hi = f64::INFINITY;
                for i in 0..x.len() {
                    let off = x[i] - center[i];
                    if v[i] == 0.0 {
                        if off.abs() > *radius {
                            return None;
                        }
                    } else {
                        let ta = (-radius - off) / v[i];
                        let tb = (radius - off) / v[i];
                        lo = lo.max(ta.min(tb));
                        hi = hi.min(ta.max(tb));
                    }
                }
                (lo <= hi).then_some(lo)
            }
            ConvexSet::Halfspace { normal, offset } => {
                let excess = vecops::dot(normal, x) - offset;
                if excess <= 0.0 {
                    return Some(0.0);
                }
                let av = vecops::dot(normal, v);
                (av < 0.0).then(|| excess / -av)
            }
            ConvexSet::Singleton { point } => {
                let d = vecops::sub(point, x);
                let dn = vecops::norm(&d);
                if dn == 0.0 {
                    return Some(0.0);
                }
                let a = vecops::dot(v, v);
                if a == 0.0 {
                    return None;
                }
                let t = vecops::dot(&d, v) / a;
                if t < 0.0 {
                    return None;
                }
                let residual = vecops::dist(&vecops::add_scaled(x, t, v), point);
                (residual <= RAY_COLINEAR_TOL * (1.0 + dn)).then_some(t)
            }
            ConvexSet::ParabolaEpigraph2D { shift, offset } => {
                let w = x[0] - shift;
                let c0 = w * w + offset - x[1];
                if c0 <= 0.0 {
                    return Some(0.0);
                }
                let a = v[0] * v[0];
                let b = 2.0 * w * v[0] - v[1];
                if a == 0.0 {
                    return (b < 0.0).then(|| c0 / -b);
                }
                let disc = b * b - 4.0 * a * c0;
                if disc < 0.0 {
                    return None;
                }
                let t_hi = (-b + disc.sqrt()) / (2.0 * a);
                if t_hi < 0.0 {
                    return None;
                }
                Some(((-b - disc.sqrt()) / (2.0 * a)).max(0.0))
            }
            ConvexSet::WholeSpace { .. } => Some(0.0),
        }
    }

    /// A canonical finite point of the set, used to seed default solver
    /// starts: centers for balls and boxes, the point itself for
    /// singletons, the boundary point nearest the origin for halfspaces,
    /// the vertex for the parabola, the origin for the whole space.
    pub fn representative_point(&self) -> Vec<f64> {
        match self {
            ConvexSet::Ball { center, .. } | ConvexSet::Box { center, .. } => center.clone(),
            ConvexSet::Halfspace { normal, offset } => {
                vecops::scale(normal, offset / vecops::dot(normal, normal))
            }
            ConvexSet::Singleton { point } => point.clone(),
            ConvexSet::ParabolaEpigraph2D { shift, offset } => vec![*shift, *offset],
            ConvexSet::WholeSpace { dim } => vec![0.0; *dim],
        }
    }
}

/// Curve parameter u (so the curve point is (u + shift, u^2 + offset))
/// minimizing the distance from `x` to the parabola y = (t-shift)^2 +
/// offset, together with the squared distance.
///
/// The stationarity condition is the cubic 2u^3 + (1-2s)u - q = 0 with
/// q = x_0 - shift and s = x_1 - offset. Each monotone piece of the cubic
/// is solved by bisection-safeguarded Newton; among the real roots the
/// smallest distance wins, ties by smaller u.
fn nearest_curve_param(shift: f64, offset: f64, x: &[f64]) -> (f64, f64) {
    let q = x[0] - shift;
    let s = x[1] - offset;
    let cubic = |u: f64| 2.0 * u * u * u + (1.0 - 2.0 * s) * u - q;
    let cubic_d = |u: f64| 6.0 * u * u + (1.0 - 2.0 * s);
    let dist_sq = |u: f64| (u - q).powi(2) + (u * u - s).powi(2);

    // All roots lie in [-bound, bound]: |2u^3| <= |q| + |1-2s||u| fails
    // outside it.
    let mut bound = 1.0 + q.abs().max((1.0 - 2.0 * s).abs());
    while cubic(bound) < 0.0 || cubic(-bound) > 0.0 {
        bound *= 2.0;
    }

    let mut candidates: Vec<f64> = Vec::new();
    let mut push_root = |lo: f64, hi: f64| {
        if let Some(u) = bracketed_root(&cubic, &cubic_d, lo, hi) {
            candidates.push(u);
        }
    };
    if 1.0 - 2.0 * s >= 0.0 {
        // Monotone increasing cubic: single root.
        push_root(-bound, bound);
    } else {
        let crit = ((2.0 * s - 1.0) / 6.0).sqrt();
        push_root(-bound, -crit);
        push_root(-crit, crit);
        push_root(crit, bound);
    }

    let mut best = (f64::INFINITY, f64::INFINITY);
    for &u in &candidates {
        let d = dist_sq(u);
        if d < best.1 || (d == best.1 && u < best.0) {
            best = (u, d);
        }
    }
    debug_assert!(best.0.is_finite(), "parabola projection found no root");
    best
}

/// Root of a function monotone on [lo, hi], or None when there is no sign
/// change. Newton steps are kept inside the shrinking bracket and replaced
/// by bisection whenever they leave it.
fn bracketed_root(
    f: &impl Fn(f64) -> f64,
    fd: &impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
) -> Option<f64> {
    let (flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    let increasing = fhi > 0.0;
    let mut u = 0.5 * (lo + hi);
    for _ in 0..200 {
        if hi - lo <= PARABOLA_NEWTON_TOL * (1.0 + u.abs()) {
            break;
        }
        let fu = f(u);
        if fu == 0.0 {
            return Some(u);
        }
        if (fu > 0.0) == increasing {
            hi = u;
        } else {
            lo = u;
        }
        let du = fd(u);
        let newton = u - fu / du;
        u = if du != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Some(u)
}

/// Gauge dynamics: the unit "speed body" whose Minkowski functional
/// measures travel cost per displacement.
#[derive(Debug, Clone, PartialEq)]
pub enum Dynamic {
    /// Unit Euclidean ball; the gauge is the Euclidean norm.
    EuclideanBall,
    /// Euclidean ball of the given radius; the gauge is |u| / radius.
    ScaledEuclideanBall { radius: f64 },
    /// Unit sup-norm ball; the gauge is max_i |u_i|.
    LInfBall,
    /// Unit 1-norm ball; the gauge is sum_i |u_i|.
    L1Ball,
}

impl Dynamic {
    pub fn validate(&self) -> Result<(), GeomError> {
        if let Dynamic::ScaledEuclideanBall { radius } = self {
            if !radius.is_finite() || *radius <= 0.0 {
                return Err(GeomError::InvalidParameter(format!(
                    "scaled ball radius must be positive and finite, got {radius}"
                )));
            }
        }
        Ok(())
    }

    /// Minkowski functional of the dynamic at displacement `u`.
    pub fn gauge(&self, u: &[f64]) -> f64 {
        match self {
            Dynamic::EuclideanBall => vecops::norm(u),
            Dynamic::ScaledEuclideanBall { radius } => vecops::norm(u) / radius,
            Dynamic::LInfBall => u.iter().fold(0.0, |m, x| m.max(x.abs())),
            Dynamic::L1Ball => u.iter().map(|x| x.abs()).sum(),
        }
    }

    /// A subgradient of the gauge at `u != 0`. Deterministic selections:
    /// the sup-norm gauge uses the first coordinate of maximal magnitude,
    /// the 1-norm gauge uses componentwise signs with 0 for zero entries.
    pub fn gauge_subgradient(&self, u: &[f64]) -> Result<Vec<f64>, GeomError> {
        if u.iter().all(|x| *x == 0.0) {
            return Err(GeomError::ZeroVector);
        }
        Ok(match self {
            Dynamic::EuclideanBall => vecops::scale(u, 1.0 / vecops::norm(u)),
            Dynamic::ScaledEuclideanBall { radius } => {
                vecops::scale(u, 1.0 / (radius * vecops::norm(u)))
            }
            Dynamic::LInfBall => {
                let mut arg = 0;
                for (i, x) in u.iter().enumerate() {
                    if x.abs() > u[arg].abs() {
                        arg = i;
                    }
                }
                let mut g = vec![0.0; u.len()];
                g[arg] = u[arg].signum();
                g
            }
            Dynamic::L1Ball => u
                .iter()
                .map(|x| if *x == 0.0 { 0.0 } else { x.signum() })
                .collect(),
        })
    }

    /// Lipschitz constant of the gauge with respect to the Euclidean norm
    /// in dimension `n`.
    pub fn lipschitz(&self, n: usize) -> f64 {
        match self {
            Dynamic::EuclideanBall | Dynamic::LInfBall => 1.0,
            Dynamic::ScaledEuclideanBall { radius } => 1.0 / radius,
            Dynamic::L1Ball => (n as f64).sqrt(),
        }
    }

    /// Support function of the dynamic set at direction `d`: the largest
    /// inner product with a unit-gauge displacement.
    pub fn support(&self, d: &[f64]) -> f64 {
        match self {
            Dynamic::EuclideanBall => vecops::norm(d),
            Dynamic::ScaledEuclideanBall { radius } => radius * vecops::norm(d),
            Dynamic::LInfBall => d.iter().map(|v| v.abs()).sum(),
            Dynamic::L1Ball => d.iter().fold(0.0, |m: f64, v| m.max(v.abs())),
        }
    }
}
