//! Reach/cover times, max-type objectives, and subgradient selections.
//!
//! For an instance with intersect targets Omega_i, enclose targets
//! Theta_j, and gauge rho:
//!
//! * the reach time of target i is T_i(x) = inf { rho(w - x) : w in
//!   Omega_i }, the smallest factor by which the dynamic must be scaled
//!   before x + t F meets Omega_i;
//! * the cover time of target j is C_j(x) = sup { rho(w - x) : w in
//!   Theta_j }, the smallest scaling for which x + t F contains Theta_j;
//! * the objective is S(x) = max over all reach and cover times.
//!
//! Euclidean and scaled-Euclidean gauges reduce to ordinary distances and
//! farthest points. The polyhedral gauges (sup-norm, 1-norm) use exact
//! closed forms where available and a bisection or projected-subgradient
//! inner solve otherwise; see `gauge_projection`.

use crate::geometry::{ConvexSet, Dynamic, GeomError};
use crate::vecops;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InstanceError {
    #[error("{context} has dimension {got}, instance dimension is {expected}")]
    DimensionMismatch { context: String, expected: usize, got: usize },
    #[error("instance has no targets")]
    NoTargets,
    #[error("enclose target {index} is unbounded; cover times need bounded targets")]
    UnboundedEncloseTarget { index: usize },
    #[error("gauge {dynamic} supports only box and singleton enclose targets, got {kind} at index {index}")]
    UnsupportedCombination { dynamic: String, kind: String, index: usize },
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TimeFnError {
    #[error("farthest point coincides with the query point; every direction is a valid selection")]
    DegenerateFarthest,
}

/// Indices attaining (within a tolerance) the objective maximum, split by
/// target kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActiveSets {
    pub intersect: Vec<usize>,
    pub enclose: Vec<usize>,
}

impl ActiveSets {
    /// First active index in fixed order: intersect targets before
    /// enclose targets, each in instance order.
    pub fn first(&self) -> Option<(TargetKind, usize)> {
        if let Some(&i) = self.intersect.first() {
            Some((TargetKind::Intersect, i))
        } else {
            self.enclose.first().map(|&j| (TargetKind::Enclose, j))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetKind {
    Intersect,
    Enclose,
}

/// A validated problem: gauge dynamic, constraint set, and the two target
/// families. All sets share the instance dimension; enclose targets are
/// bounded and supported by the dynamic.
#[derive(Debug, Clone, PartialEq)]
pub struct SylvesterInstance {
    dynamic: Dynamic,
    constraint: ConvexSet,
    intersect: Vec<ConvexSet>,
    enclose: Vec<ConvexSet>,
}

impl SylvesterInstance {
    pub fn new(
        dynamic: Dynamic,
        constraint: ConvexSet,
        intersect: Vec<ConvexSet>,
        enclose: Vec<ConvexSet>,
    ) -> Result<Self, InstanceError> {
        dynamic.validate()?;
        constraint.validate()?;
        let dim = constraint.dim();
        if intersect.is_empty() && enclose.is_empty() {
            return Err(InstanceError::NoTargets);
        }
        let check = |context: String, set: &ConvexSet| -> Result<(), InstanceError> {
            set.validate()?;
            if set.dim() != dim {
                return Err(InstanceError::DimensionMismatch {
                    context,
                    expected: dim,
                    got: set.dim(),
                });
            }
            Ok(())
        };
        for (i, set) in intersect.iter().enumerate() {
            check(format!("intersect target {i}"), set)?;
        }
        for (j, set) in enclose.iter().enumerate() {
            check(format!("enclose target {j}"), set)?;
            if !set.is_bounded() {
                return Err(InstanceError::UnboundedEncloseTarget { index: j });
            }
            let polyhedral = matches!(dynamic, Dynamic::LInfBall | Dynamic::L1Ball);
            let covered =
                matches!(set, ConvexSet::Box { .. } | ConvexSet::Singleton { .. });
            if polyhedral && !covered {
                return Err(InstanceError::UnsupportedCombination {
                    dynamic: format!("{dynamic:?}"),
                    kind: "ball".into(),
                    index: j,
                });
            }
        }
        Ok(SylvesterInstance { dynamic, constraint, intersect, enclose })
    }

    pub fn dim(&self) -> usize {
        self.constraint.dim()
    }

    pub fn dynamic(&self) -> &Dynamic {
        &self.dynamic
    }

    pub fn constraint(&self) -> &ConvexSet {
        &self.constraint
    }

    pub fn intersect_targets(&self) -> &[ConvexSet] {
        &self.intersect
    }

    pub fn enclose_targets(&self) -> &[ConvexSet] {
        &self.enclose
    }

    pub fn target_count(&self) -> usize {
        self.intersect.len() + self.enclose.len()
    }

    /// Reach time of intersect target `i` from `x`; zero exactly when x
    /// lies in the target.
    pub fn minimal_time(&self, i: usize, x: &[f64]) -> f64 {
        gauge_projection(&self.dynamic, &self.intersect[i], x).1
    }

    /// Cover time of enclose target `j` from `x`.
    pub fn maximal_time(&self, j: usize, x: &[f64]) -> f64 {
        gauge_farthest(&self.dynamic, &self.enclose[j], x).1
    }

    /// All reach times and cover times at `x`, in instance order.
    pub fn component_values(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let t = (0..self.intersect.len()).map(|i| self.minimal_time(i, x)).collect();
        let c = (0..self.enclose.len()).map(|j| self.maximal_time(j, x)).collect();
        (t, c)
    }

    /// max_i T_i(x). Panics when the instance has no intersect targets.
    pub fn objective_t(&self, x: &[f64]) -> f64 {
        assert!(!self.intersect.is_empty(), "objective_t needs intersect targets");
        (0..self.intersect.len())
            .map(|i| self.minimal_time(i, x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// max_j C_j(x). Panics when the instance has no enclose targets.
    pub fn objective_c(&self, x: &[f64]) -> f64 {
        assert!(!self.enclose.is_empty(), "objective_c needs enclose targets");
        (0..self.enclose.len())
            .map(|j| self.maximal_time(j, x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// The full objective: max over every reach and cover time.
    pub fn objective_s(&self, x: &[f64]) -> f64 {
        let (t, c) = self.component_values(x);
        t.into_iter().chain(c).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Indices whose component value is >= S(x) - tie_tol.
    pub fn active_sets(&self, x: &[f64], tie_tol: f64) -> ActiveSets {
        let (t, c) = self.component_values(x);
        let s = t.iter().chain(&c).fold(f64::NEG_INFINITY, |m, v| m.max(*v));
        let cut = s - tie_tol;
        ActiveSets {
            intersect: t
                .iter()
                .enumerate()
                .filter(|(_, v)| **v >= cut)
                .map(|(i, _)| i)
                .collect(),
            enclose: c
                .iter()
                .enumerate()
                .filter(|(_, v)| **v >= cut)
                .map(|(j, _)| j)
                .collect(),
        }
    }

    /// Subgradient selection for T_i at `x`: the zero vector inside the
    /// target, otherwise an element of [-d rho(w - x)] that also lies in
    /// the normal cone of the target at the gauge-nearest point w. For
    /// targets with a single outward normal at w (halfspaces, balls,
    /// parabola boundaries) the element is that normal divided by the
    /// dynamic's support value, which stays valid when the gauge
    /// subdifferential has kinks; box and singleton targets take the
    /// negated gauge subgradient directly, which already respects their
    /// normal cones.
    pub fn subgradient_t(&self, i: usize, x: &[f64]) -> Vec<f64> {
        let target = &self.intersect[i];
        let (w, value) = gauge_projection(&self.dynamic, target, x);
        if value == 0.0 {
            return vec![0.0; x.len()];
        }
        match target {
            ConvexSet::Halfspace { normal, .. } => {
                return vecops::scale(normal, 1.0 / self.dynamic.support(normal));
            }
            ConvexSet::Ball { center, radius } if *radius > 0.0 => {
                let d = vecops::sub(&w, center);
                return vecops::scale(&d, 1.0 / self.dynamic.support(&d));
            }
            ConvexSet::ParabolaEpigraph2D { shift, .. } => {
                let nu = vec![2.0 * (w[0] - shift), -1.0];
                return vecops::scale(&nu, 1.0 / self.dynamic.support(&nu));
            }
            _ => {}
        }
        let g = self
            .dynamic
            .gauge_subgradient(&vecops::sub(&w, x))
            .expect("positive reach time implies w != x");
        vecops::scale(&g, -1.0)
    }

    /// Subgradient selection for C_j at `x`: -g for a gauge subgradient g
    /// at q - x, where q is a gauge-farthest point of the target. Errors
    /// when the farthest point coincides with x (single-point target at
    /// x), in which case the caller may treat x as optimal for this
    /// component.
    pub fn subgradient_c(&self, j: usize, x: &[f64]) -> Result<Vec<f64>, TimeFnError> {
        let (q, value) = gauge_farthest(&self.dynamic, &self.enclose[j], x);
        if value == 0.0 {
            return Err(TimeFnError::DegenerateFarthest);
        }
        let g = self
            .dynamic
            .gauge_subgradient(&vecops::sub(&q, x))
            .expect("positive cover time implies q != x");
        Ok(vecops::scale(&g, -1.0))
    }

    /// Default solver start: the constraint projection of the centroid of
    /// all target representative points.
    pub fn default_start(&self) -> Vec<f64> {
        let n = self.dim();
        let mut c = vec![0.0; n];
        for set in self.intersect.iter().chain(&self.enclose) {
            vecops::axpy(&mut c, 1.0, &set.representative_point());
        }
        let count = self.target_count() as f64;
        self.constraint.project(&vecops::scale(&c, 1.0 / count))
    }
}

/// Iteration budget of the projected-subgradient fallback inner solve.
const GAUGE_PROJ_MAX_ITERS: usize = 500;
/// Stop once the best gauge value stops improving by this much.
const GAUGE_PROJ_TOL: f64 = 1e-7;
/// Iterations without improvement before the fallback stops early.
const GAUGE_PROJ_PATIENCE: usize = 25;
/// Relative width tolerance of the scaling bisection.
const GAUGE_BISECT_TOL: f64 = 1e-13;

/// Gauge-nearest point of `set` from `x` and the gauge distance
/// inf { rho(w - x) : w in set }.
///
/// Euclidean-family gauges reduce to the Euclidean projection. The
/// polyhedral gauges use closed forms for boxes, singletons, halfspaces
/// (dual-norm formula), and the whole space; a monotone bisection on the
/// scaling for balls; and the projected-subgradient fallback for the
/// parabola epigraph.
pub(crate) fn gauge_projection(
    dynamic: &Dynamic,
    set: &ConvexSet,
    x: &[f64],
) -> (Vec<f64>, f64) {
    match dynamic {
        Dynamic::EuclideanBall => {
            let w = set.project(x);
            let d = vecops::dist(x, &w);
            (w, d)
        }
        Dynamic::ScaledEuclideanBall { radius } => {
            let w = set.project(x);
            let d = vecops::dist(x, &w) / radius;
            (w, d)
        }
        Dynamic::LInfBall | Dynamic::L1Ball => polyhedral_projection(dynamic, set, x),
    }
}

fn polyhedral_projection(dynamic: &Dynamic, set: &ConvexSet, x: &[f64]) -> (Vec<f64>, f64) {
    if set.distance(x) == 0.0 {
        return (x.to_vec(), 0.0);
    }
    match set {
        ConvexSet::WholeSpace { .. } => (x.to_vec(), 0.0),
        ConvexSet::Singleton { point } => {
            (point.clone(), dynamic.gauge(&vecops::sub(point, x)))
        }
        ConvexSet::Box { center, radius } => {
            let w: Vec<f64> = x
                .iter()
                .zip(center)
                .map(|(xi, ci)| xi.clamp(ci - radius, ci + radius))
                .collect();
            let value = dynamic.gauge(&vecops::sub(&w, x));
            (w, value)
        }
        ConvexSet::Halfspace { normal, offset } => {
            // Distance to a halfspace under any norm is excess over the
            // dual norm of the normal vector.
            let excess = vecops::dot(normal, x) - offset;
            match dynamic {
                Dynamic::LInfBall => {
                    let dual: f64 = normal.iter().map(|a| a.abs()).sum();
                    let t = excess / dual;
                    let w: Vec<f64> =
                        x.iter().zip(normal).map(|(xi, ai)| xi - t * ai.signum()).collect();
                    (w, t)
                }
                Dynamic::L1Ball => {
                    let mut arg = 0;
                    for (i, a) in normal.iter().enumerate() {
                        if a.abs() > normal[arg].abs() {
                            arg = i;
                        }
                    }
                    let t = excess / normal[arg].abs();
                    let mut w = x.to_vec();
                    w[arg] -= excess / normal[arg];
                    (w, t)
                }
                _ => unreachable!("polyhedral path"),
            }
        }
        ConvexSet::Ball { .. } => scaling_bisection(dynamic, set, x),
        ConvexSet::ParabolaEpigraph2D { .. } => subgradient_fallback(dynamic, set, x),
    }
}

/// Bisection on t for the smallest gauge ball around x meeting the
/// target: the gauge ball of radius t intersects a Euclidean ball(c, r)
/// exactly when the Euclidean distance from c to the gauge ball is <= r.
fn scaling_bisection(dynamic: &Dynamic, set: &ConvexSet, x: &[f64]) -> (Vec<f64>, f64) {
    let (center, radius) = match set {
        ConvexSet::Ball { center, radius } => (center, *radius),
        _ => unreachable!(),
    };
    // Nearest point of the gauge ball { w : rho(w - x) <= t } to c.
    let gauge_ball_nearest = |t: f64| -> Vec<f64> {
        match dynamic {
            Dynamic::LInfBall => center
                .iter()
                .zip(x)
                .map(|(ci, xi)| ci.clamp(xi - t, xi + t))
                .collect(),
            Dynamic::L1Ball => {
                vecops::add_scaled(x, 1.0, &l1_ball_projection(&vecops::sub(center, x), t))
            }
            _ => unreachable!(),
        }
    };
    let intersects =
        |t: f64| -> bool { vecops::dist(center, &gauge_ball_nearest(t)) <= radius };

    let mut lo = 0.0;
    // The gauge ball of radius d contains the Euclidean ball of radius d
    // for both polyhedral gauges, so the Euclidean distance bounds t.
    let mut hi = (vecops::dist(x, center) - radius).max(f64::MIN_POSITIVE);
    while !intersects(hi) {
        hi *= 2.0;
    }
    for _ in 0..200 {
        if hi - lo <= GAUGE_BISECT_TOL * (1.0 + hi) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if intersects(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // Witness inside the target: snap the touching point onto the ball.
    let q = gauge_ball_nearest(hi);
    let d = vecops::dist(&q, center);
    let w = if d > radius {
        vecops::add_scaled(center, radius / d, &vecops::sub(&q, center))
    } else {
        q
    };
    (w, hi)
}

/// Projected subgradient descent of w -> rho(w - x) over the target,
/// warm-started at the Euclidean projection; kept for target shapes with
/// no exact polyhedral-gauge formula.
fn subgradient_fallback(dynamic: &Dynamic, set: &ConvexSet, x: &[f64]) -> (Vec<f64>, f64) {
    let mut w = set.project(x);
    let mut best = w.clone();
    let mut best_value = dynamic.gauge(&vecops::sub(&w, x));
    let mut since_improved = 0;
    for k in 1..=GAUGE_PROJ_MAX_ITERS {
        let diff = vecops::sub(&w, x);
        let g = match dynamic.gauge_subgradient(&diff) {
            Ok(g) => g,
            Err(_) => return (w, 0.0),
        };
        w = set.project(&vecops::add_scaled(&w, -1.0 / k as f64, &g));
        let value = dynamic.gauge(&vecops::sub(&w, x));
        if value < best_value - GAUGE_PROJ_TOL {
            best_value = value;
            best = w.clone();
            since_improved = 0;
        } else {
            if value < best_value {
                best_value = value;
                best = w.clone();
            }
            since_improved += 1;
            if since_improved >= GAUGE_PROJ_PATIENCE {
                break;
            }
        }
    }
    (best, best_value)
}

/// Euclidean projection of u onto { w : |w|_1 <= t }.
fn l1_ball_projection(u: &[f64], t: f64) -> Vec<f64> {
    let l1: f64 = u.iter().map(|x| x.abs()).sum();
    if l1 <= t {
        return u.to_vec();
    }
    let mut mags: Vec<f64> = u.iter().map(|x| x.abs()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut acc = 0.0;
    let mut theta = 0.0;
    for (j, m) in mags.iter().enumerate() {
        acc += m;
        let cand = (acc - t) / (j + 1) as f64;
        if m - cand > 0.0 {
            theta = cand;
        } else {
            break;
        }
    }
    u.iter().map(|x| x.signum() * (x.abs() - theta).max(0.0)).collect()
}

/// Gauge-farthest point of `set` from `x` and the cover time
/// sup { rho(w - x) : w in set }.
fn gauge_farthest(dynamic: &Dynamic, set: &ConvexSet, x: &[f64]) -> (Vec<f64>, f64) {
    match dynamic {
        Dynamic::EuclideanBall => set
            .farthest_point(x)
            .expect("enclose targets are bounded by construction"),
        Dynamic::ScaledEuclideanBall { radius } => {
            let (q, d) = set
                .farthest_point(x)
                .expect("enclose targets are bounded by construction");
            (q, d / radius)
        }
        Dynamic::LInfBall | Dynamic::L1Ball => match set {
            ConvexSet::Singleton { point } => {
                (point.clone(), dynamic.gauge(&vecops::sub(point, x)))
            }
            // The componentwise far corner maximizes every coordinate
            // displacement simultaneously, hence both polyhedral gauges.
            ConvexSet::Box { center, radius } => {
                let q: Vec<f64> = x
                    .iter()
                    .zip(center)
                    .map(|(xi, ci)| if *xi >= *ci { ci - radius } else { ci + radius })
                    .collect();
                let value = dynamic.gauge(&vecops::sub(&q, x));
                (q, value)
            }
            _ => unreachable!("validated at construction"),
        },
    }
}
