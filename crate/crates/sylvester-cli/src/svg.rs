//! Hand-rolled SVG drawings of planar instances.
//!
//! The viewport auto-fits the bounding box of every bounded set plus the
//! solution circle, padded by 5%. Unbounded sets are clipped against
//! that box: halfspaces become polygons, parabola boundaries are sampled
//! polylines with the epigraph filled up to the top edge. The y axis is
//! flipped once on a group so the drawing uses ordinary mathematical
//! orientation.

use std::fmt::Write as _;

use sylvester::geometry::ConvexSet;

use crate::format::ParsedInstance;

#[derive(Debug, Clone, PartialEq)]
pub enum SvgError {
    /// Drawings are planar; other dimensions have no rendering.
    NotPlanar { dim: usize },
}

impl std::fmt::Display for SvgError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SvgError::NotPlanar { dim } => {
                write!(f, "svg drawings need a planar instance, got dimension {dim}")
            }
        }
    }
}

impl std::error::Error for SvgError {}

/// Solution overlay: a center point and the circle of the objective
/// radius around it.
#[derive(Debug, Clone, Copy)]
pub struct Solution<'a> {
    pub center: &'a [f64],
    pub radius: f64,
}

#[derive(Debug, Clone, Copy)]
struct Bounds {
    lo: [f64; 2],
    hi: [f64; 2],
}

impl Bounds {
    fn empty() -> Self {
        Bounds { lo: [f64::INFINITY; 2], hi: [f64::NEG_INFINITY; 2] }
    }

    fn add_point(&mut self, x: f64, y: f64) {
        self.lo[0] = self.lo[0].min(x);
        self.lo[1] = self.lo[1].min(y);
        self.hi[0] = self.hi[0].max(x);
        self.hi[1] = self.hi[1].max(y);
    }

    fn add_set(&mut self, set: &ConvexSet) {
        match set {
            ConvexSet::Ball { center, radius } | ConvexSet::Box { center, radius } => {
                self.add_point(center[0] - radius, center[1] - radius);
                self.add_point(center[0] + radius, center[1] + radius);
            }
            ConvexSet::Singleton { point } => self.add_point(point[0], point[1]),
            ConvexSet::ParabolaEpigraph2D { shift, offset } => self.add_point(*shift, *offset),
            ConvexSet::Halfspace { .. } | ConvexSet::WholeSpace { .. } => {}
        }
    }

    fn pad(&mut self, fraction: f64) {
        if self.lo[0] > self.hi[0] {
            *self = Bounds { lo: [-1.0, -1.0], hi: [1.0, 1.0] };
        }
        let w = (self.hi[0] - self.lo[0]).max(1e-9);
        let h = (self.hi[1] - self.lo[1]).max(1e-9);
        let margin = fraction * w.max(h);
        self.lo[0] -= margin;
        self.lo[1] -= margin;
        self.hi[0] += margin;
        self.hi[1] += margin;
    }

    fn width(&self) -> f64 {
        self.hi[0] - self.lo[0]
    }

    fn height(&self) -> f64 {
        self.hi[1] - self.lo[1]
    }

    fn corners(&self) -> Vec<[f64; 2]> {
        vec![
            [self.lo[0], self.lo[1]],
            [self.hi[0], self.lo[1]],
            [self.hi[0], self.hi[1]],
            [self.lo[0], self.hi[1]],
        ]
    }
}

fn fmt_coord(v: f64) -> String {
    let s = format!("{v:.4}");
    let trimmed = s.trim_end_matches('0').trim_end_matches('.');
    if trimmed == "-0" { "0".into() } else { trimmed.into() }
}

/// Clip a convex polygon against <normal, x> <= offset.
fn clip_polygon(poly: &[[f64; 2]], normal: &[f64], offset: f64) -> Vec<[f64; 2]> {
    let inside = |p: &[f64; 2]| normal[0] * p[0] + normal[1] * p[1] <= offset;
    let mut out = Vec::new();
    for (i, p) in poly.iter().enumerate() {
        let q = &poly[(i + 1) % poly.len()];
        let (pin, qin) = (inside(p), inside(q));
        if pin {
            out.push(*p);
        }
        if pin != qin {
            let fp = normal[0] * p[0] + normal[1] * p[1] - offset;
            let fq = normal[0] * q[0] + normal[1] * q[1] - offset;
            let t = fp / (fp - fq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

struct Style<'a> {
    stroke: &'a str,
    fill: &'a str,
    fill_opacity: f64,
    dashed: bool,
}

const INTERSECT_STYLE: Style = Style {
    stroke: "#33658a",
    fill: "#33658a",
    fill_opacity: 0.15,
    dashed: false,
};
const ENCLOSE_STYLE: Style = Style {
    stroke: "#b85c38",
    fill: "#b85c38",
    fill_opacity: 0.15,
    dashed: false,
};
const CONSTRAINT_STYLE: Style = Style {
    stroke: "#666666",
    fill: "none",
    fill_opacity: 0.0,
    dashed: true,
};

struct Canvas {
    body: String,
    bounds: Bounds,
    stroke_width: f64,
}

impl Canvas {
    fn style_attrs(&self, style: &Style) -> String {
        let mut s = format!(
            "stroke=\"{}\" stroke-width=\"{}\" fill=\"{}\"",
            style.stroke,
            fmt_coord(self.stroke_width),
            style.fill
        );
        if style.fill != "none" {
            let _ = write!(s, " fill-opacity=\"{}\"", style.fill_opacity);
        }
        if style.dashed {
            let dash = fmt_coord(3.0 * self.stroke_width);
            let _ = write!(s, " stroke-dasharray=\"{dash}\"");
        }
        s
    }

    fn polygon(&mut self, points: &[[f64; 2]], style: &Style) {
        if points.len() < 3 {
            return;
        }
        let coords: Vec<String> =
            points.iter().map(|p| format!("{},{}", fmt_coord(p[0]), fmt_coord(p[1]))).collect();
        let attrs = self.style_attrs(style);
        let _ = writeln!(self.body, "  <polygon points=\"{}\" {attrs}/>", coords.join(" "));
    }

    fn draw_set(&mut self, set: &ConvexSet, style: &Style) {
        let attrs = self.style_attrs(style);
        match set {
            ConvexSet::Ball { center, radius } => {
                let _ = writeln!(
                    self.body,
                    "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" {attrs}/>",
                    fmt_coord(center[0]),
                    fmt_coord(center[1]),
                    fmt_coord(*radius)
                );
            }
            ConvexSet::Box { center, radius } => {
                let _ = writeln!(
                    self.body,
                    "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" {attrs}/>",
                    fmt_coord(center[0] - radius),
                    fmt_coord(center[1] - radius),
                    fmt_coord(2.0 * radius),
                    fmt_coord(2.0 * radius)
                );
            }
            ConvexSet::Singleton { point } => {
                let _ = writeln!(
                    self.body,
                    "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\"/>",
                    fmt_coord(point[0]),
                    fmt_coord(point[1]),
                    fmt_coord(2.0 * self.stroke_width),
                    style.stroke
                );
            }
            ConvexSet::Halfspace { normal, offset } => {
                let clipped = clip_polygon(&self.bounds.corners(), normal, *offset);
                self.polygon(&clipped, style);
            }
            ConvexSet::ParabolaEpigraph2D { shift, offset } => {
                // Boundary samples across the viewport, then close the
                // region along the top edge to fill the epigraph.
                let mut pts = Vec::new();
                let samples = 128;
                for i in 0..=samples {
                    let x = self.bounds.lo[0]
                        + self.bounds.width() * (i as f64) / (samples as f64);
                    let y = (x - shift) * (x - shift) + offset;
                    pts.push([x, y.min(self.bounds.hi[1])]);
                }
                pts.push([self.bounds.hi[0], self.bounds.hi[1]]);
                pts.push([self.bounds.lo[0], self.bounds.hi[1]]);
                self.polygon(&pts, style);
            }
            ConvexSet::WholeSpace { .. } => {}
        }
    }
}

/// Render a planar instance, with the solution disk overlaid when given.
pub fn render_svg(inst: &ParsedInstance, solution: Option<Solution>) -> Result<String, SvgError> {
    if inst.dim() != 2 {
        return Err(SvgError::NotPlanar { dim: inst.dim() });
    }

    let mut bounds = Bounds::empty();
    let visit_sets = |bounds: &mut Bounds| match inst {
        ParsedInstance::Standard(inst) => {
            bounds.add_set(inst.constraint());
            for s in inst.intersect_targets() {
                bounds.add_set(s);
            }
            for s in inst.enclose_targets() {
                bounds.add_set(s);
            }
        }
        ParsedInstance::Directional(inst) => {
            bounds.add_set(inst.constraint());
            for t in inst.targets() {
                bounds.add_set(t.set());
            }
        }
    };
    visit_sets(&mut bounds);
    if let Some(sol) = solution {
        bounds.add_point(sol.center[0] - sol.radius, sol.center[1] - sol.radius);
        bounds.add_point(sol.center[0] + sol.radius, sol.center[1] + sol.radius);
    }
    bounds.pad(0.05);

    let mut canvas = Canvas {
        body: String::new(),
        bounds,
        stroke_width: bounds.width().max(bounds.height()) / 300.0,
    };

    match inst {
        ParsedInstance::Standard(inst) => {
            canvas.draw_set(inst.constraint(), &CONSTRAINT_STYLE);
            for s in inst.enclose_targets() {
                canvas.draw_set(s, &ENCLOSE_STYLE);
            }
            for s in inst.intersect_targets() {
                canvas.draw_set(s, &INTERSECT_STYLE);
            }
        }
        ParsedInstance::Directional(inst) => {
            canvas.draw_set(inst.constraint(), &CONSTRAINT_STYLE);
            for t in inst.targets() {
                canvas.draw_set(t.set(), &INTERSECT_STYLE);
            }
        }
    }
    if let Some(sol) = solution {
        let style = Style {
            stroke: "#c1121f",
            fill: "none",
            fill_opacity: 0.0,
            dashed: false,
        };
        canvas.draw_set(
            &ConvexSet::ball(sol.center.to_vec(), sol.radius.max(0.0)).expect("valid overlay"),
            &style,
        );
        let _ = writeln!(
            canvas.body,
            "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#c1121f\"/>",
            fmt_coord(sol.center[0]),
            fmt_coord(sol.center[1]),
            fmt_coord(2.0 * canvas.stroke_width)
        );
    }

    // Flip y once so the coordinates above stay mathematical.
    let vb = format!(
        "{} {} {} {}",
        fmt_coord(bounds.lo[0]),
        fmt_coord(-bounds.hi[1]),
        fmt_coord(bounds.width()),
        fmt_coord(bounds.height())
    );
    Ok(format!
        (
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{vb}\" width=\"640\" height=\"{}\">\n<g transform=\"scale(1,-1)\">\n{}</g>\n</svg>\n",
        fmt_coord(640.0 * bounds.height() / bounds.width()),
        canvas.body
    ))
}
