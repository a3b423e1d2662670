//! Oriented arcs and loop contours in the complex plane, with adaptive
//! Gauss-Legendre quadrature along them.
//!
//! Paths are stored as parametrized smooth segments (lines and circular
//! arcs), not point samples, so adaptive refinement can re-evaluate the
//! integrand at new parameters. Loops surrounding arcs are stadium-shaped
//! curves at constant standoff; loops that must respect a Schwarz-reflected
//! integrand are built as an upper half plus its mirror image, with the
//! real-axis crossings as hard panel boundaries.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

mod loops;
mod quad;

pub use loops::{build_loop, build_schwarz_loop, close_schwarz_loop, LoopOffsets, LoopSystem};
pub use quad::{gauss_legendre, integrate, integrate_full, schwarz_loop_integral};

use crate::GEOM_EPS;

/// One smooth parametrized piece of a [`Path`], as a map `[0,1] -> C`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Segment {
    Line {
        start: Complex64,
        end: Complex64,
    },
    /// Circular arc `center + radius * exp(i theta(t))` with
    /// `theta(t) = theta0 + t (theta1 - theta0)`; `theta1 < theta0` sweeps
    /// clockwise.
    Arc {
        center: Complex64,
        radius: f64,
        theta0: f64,
        theta1: f64,
    },
}

impl Segment {
    pub fn point(&self, t: f64) -> Complex64 {
        match *self {
            Segment::Line { start, end } => start + (end - start) * t,
            Segment::Arc {
                center,
                radius,
                theta0,
                theta1,
            } => {
                let th = theta0 + t * (theta1 - theta0);
                center + Complex64::from_polar(radius, th)
            }
        }
    }

    /// dz/dt at parameter `t`.
    pub fn derivative(&self, t: f64) -> Complex64 {
        match *self {
            Segment::Line { start, end } => end - start,
            Segment::Arc {
                center: _,
                radius,
                theta0,
                theta1,
            } => {
                let th = theta0 + t * (theta1 - theta0);
                Complex64::i() * (theta1 - theta0) * Complex64::from_polar(radius, th)
            }
        }
    }

    pub fn start(&self) -> Complex64 {
        self.point(0.0)
    }

    pub fn end(&self) -> Complex64 {
        self.point(1.0)
    }

    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { start, end } => (end - start).norm(),
            Segment::Arc {
                radius,
                theta0,
                theta1,
                ..
            } => radius * (theta1 - theta0).abs(),
        }
    }

    /// The sub-segment covering parameters `[t0, t1]` of `self`.
    pub fn sub(&self, t0: f64, t1: f64) -> Segment {
        match *self {
            Segment::Line { .. } => Segment::Line {
                start: self.point(t0),
                end: self.point(t1),
            },
            Segment::Arc {
                center,
                radius,
                theta0,
                theta1,
            } => {
                let sweep = theta1 - theta0;
                Segment::Arc {
                    center,
                    radius,
                    theta0: theta0 + t0 * sweep,
                    theta1: theta0 + t1 * sweep,
                }
            }
        }
    }

    /// Mirror image across the real axis, traversed in reverse, so that a
    /// chain of these appended after the originals closes a Schwarz loop.
    pub fn conjugated_reversed(&self) -> Segment {
        match *self {
            Segment::Line { start, end } => Segment::Line {
                start: end.conj(),
                end: start.conj(),
            },
            Segment::Arc {
                center,
                radius,
                theta0,
                theta1,
            } => Segment::Arc {
                center: center.conj(),
                radius,
                theta0: -theta1,
                theta1: -theta0,
            },
        }
    }

    pub fn reversed(&self) -> Segment {
        match *self {
            Segment::Line { start, end } => Segment::Line {
                start: end,
                end: start,
            },
            Segment::Arc {
                center,
                radius,
                theta0,
                theta1,
            } => Segment::Arc {
                center,
                radius,
                theta0: theta1,
                theta1: theta0,
            },
        }
    }

    /// Euclidean distance from `z` to the segment.
    pub fn distance_to(&self, z: Complex64) -> f64 {
        match *self {
            Segment::Line { start, end } => {
                let d = end - start;
                let len2 = d.norm_sqr();
                if len2 == 0.0 {
                    return (z - start).norm();
                }
                let t = ((z - start) * d.conj()).re / len2;
                let t = t.clamp(0.0, 1.0);
                (z - (start + d * t)).norm()
            }
            Segment::Arc {
                center,
                radius,
                theta0,
                theta1,
            } => {
                let w = z - center;
                let ang = w.arg();
                // Is the ray through z within the swept angular range?
                let lo = theta0.min(theta1);
                let hi = theta0.max(theta1);
                let mut a = ang;
                while a < lo {
                    a += core::f64::consts::TAU;
                }
                let radial_ok = a <= hi || {
                    let mut b = ang;
                    while b > hi {
                        b -= core::f64::consts::TAU;
                    }
                    b >= lo
                };
                if radial_ok && w.norm() > 0.0 {
                    (w.norm() - radius).abs()
                } else {
                    (z - self.start()).norm().min((z - self.end()).norm())
                }
            }
        }
    }

    /// Points splitting the segment into chords with small angular sweep,
    /// used by topological predicates (winding numbers, crossing counts).
    fn chord_params(&self) -> usize {
        match *self {
            Segment::Line { .. } => 1,
            Segment::Arc { theta0, theta1, .. } => {
                let sweep = (theta1 - theta0).abs();
                (sweep / 0.2).ceil().max(1.0) as usize
            }
        }
    }
}

/// Orientation of a closed path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Clockwise,
    Counterclockwise,
}

/// A piecewise-smooth path: consecutive segments share endpoints, and a
/// closed path returns to its starting point.
#[derive(Clone, Debug)]
pub struct Path {
    segments: Vec<Segment>,
    closed: bool,
}

/// Errors from path construction and loop geometry.
#[derive(Clone, Debug)]
pub enum GeometryError {
    DegenerateArc(String),
    Discontinuous { index: usize, gap: f64 },
    NotClosed { gap: f64 },
    VanishingDerivative { index: usize },
    LoopCollision { point: Complex64, distance: f64 },
    HairpinTurn { vertex: Complex64, angle: f64 },
    OffsetTooLarge { vertex: Complex64 },
    EndpointsNotReal { endpoint: Complex64 },
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryError::DegenerateArc(msg) => write!(f, "degenerate arc: {msg}"),
            GeometryError::Discontinuous { index, gap } => {
                write!(f, "segments {index} and {} do not meet (gap {gap:.3e})", index + 1)
            }
            GeometryError::NotClosed { gap } => {
                write!(f, "closed path does not return to its start (gap {gap:.3e})")
            }
            GeometryError::VanishingDerivative { index } => {
                write!(f, "segment {index} has a vanishing parametrization derivative")
            }
            GeometryError::LoopCollision { point, distance } => write!(
                f,
                "loop passes too close to excluded point {point} (distance {distance:.3e})"
            ),
            GeometryError::HairpinTurn { vertex, angle } => {
                write!(f, "turn of {angle:.3} rad at {vertex} is too sharp to offset")
            }
            GeometryError::OffsetTooLarge { vertex } => {
                write!(f, "offset exceeds the local feature size near {vertex}")
            }
            GeometryError::EndpointsNotReal { endpoint } => {
                write!(f, "Schwarz half-loop endpoint {endpoint} is not on the real axis")
            }
        }
    }
}

impl core::error::Error for GeometryError {}

impl Path {
    pub fn new(segments: Vec<Segment>, closed: bool) -> Result<Self, GeometryError> {
        if segments.is_empty() {
            return Err(GeometryError::DegenerateArc("empty segment list".into()));
        }
        let path = Path { segments, closed };
        let tol = GEOM_EPS * path.diameter().max(1e-300);
        for i in 0..path.segments.len() - 1 {
            let gap = (path.segments[i].end() - path.segments[i + 1].start()).norm();
            if gap > tol {
                return Err(GeometryError::Discontinuous { index: i, gap });
            }
        }
        if path.closed {
            let gap = (path.segments.last().unwrap().end() - path.segments[0].start()).norm();
            if gap > tol {
                return Err(GeometryError::NotClosed { gap });
            }
        }
        for (i, s) in path.segments.iter().enumerate() {
            for &t in &[0.0, 0.25, 0.5, 0.75, 1.0] {
                if s.derivative(t).norm() == 0.0 {
                    return Err(GeometryError::VanishingDerivative { index: i });
                }
            }
        }
        Ok(path)
    }

    pub fn open(segments: Vec<Segment>) -> Result<Self, GeometryError> {
        Path::new(segments, false)
    }

    pub fn closed(segments: Vec<Segment>) -> Result<Self, GeometryError> {
        Path::new(segments, true)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn start(&self) -> Complex64 {
        self.segments[0].start()
    }

    pub fn end(&self) -> Complex64 {
        self.segments.last().unwrap().end()
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(|s| s.length()).sum()
    }

    /// Largest pairwise distance among segment endpoints; a cheap size scale.
    pub fn diameter(&self) -> f64 {
        let mut pts: Vec<Complex64> = Vec::with_capacity(self.segments.len() + 1);
        for s in &self.segments {
            pts.push(s.start());
        }
        pts.push(self.end());
        let mut d = 0.0f64;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                d = d.max((pts[i] - pts[j]).norm());
            }
        }
        // An arc's span can exceed its endpoint spread (e.g. a full cap).
        for s in &self.segments {
            if let Segment::Arc { radius, .. } = s {
                d = d.max(2.0 * radius);
            }
        }
        d
    }

    pub fn distance_to(&self, z: Complex64) -> f64 {
        self.segments
            .iter()
            .map(|s| s.distance_to(z))
            .fold(f64::INFINITY, f64::min)
    }

    /// Winding number of a closed path around `z`. The path must stay a
    /// positive distance away from `z`.
    pub fn winding_number(&self, z: Complex64) -> i32 {
        let mut total = 0.0f64;
        let mut prev = self.start() - z;
        for s in &self.segments {
            let n = s.chord_params();
            for k in 1..=n {
                let cur = s.point(k as f64 / n as f64) - z;
                total += (cur / prev).arg();
                prev = cur;
            }
        }
        (total / core::f64::consts::TAU).round() as i32
    }

    /// Whether a closed path encloses `z` (winding number nonzero).
    pub fn encloses(&self, z: Complex64) -> bool {
        self.closed && self.winding_number(z) != 0
    }

    /// Orientation by signed area; meaningful for closed paths.
    pub fn orientation(&self) -> Orientation {
        let mut area2 = 0.0f64; // twice the signed area
        for s in &self.segments {
            match *s {
                Segment::Line { start, end } => {
                    area2 += start.re * end.im - end.re * start.im;
                }
                Segment::Arc {
                    center,
                    radius,
                    theta0,
                    theta1,
                } => {
                    // Im of int conj(z) dz over the arc.
                    let e0 = Complex64::from_polar(radius, theta0);
                    let e1 = Complex64::from_polar(radius, theta1);
                    let term = center.conj() * (e1 - e0)
                        + Complex64::i() * radius * radius * (theta1 - theta0);
                    area2 += term.im;
                    // Endpoint chord closure for the shoelace part.
                    let a = center + e0;
                    let b = center + e1;
                    area2 += (a.conj() * b).im - (a.re * b.im - b.re * a.im);
                }
            }
        }
        if area2 >= 0.0 {
            Orientation::Counterclockwise
        } else {
            Orientation::Clockwise
        }
    }

    pub fn reversed(&self) -> Path {
        Path {
            segments: self.segments.iter().rev().map(|s| s.reversed()).collect(),
            closed: self.closed,
        }
    }

    /// New path with segment `seg_idx` split at the given interior
    /// parameters. Used to force panel boundaries at integrand kinks.
    pub fn with_splits(&self, splits: &[(usize, f64)]) -> Path {
        let mut by_seg: Vec<Vec<f64>> = vec![Vec::new(); self.segments.len()];
        for &(i, t) in splits {
            if t > 1e-12 && t < 1.0 - 1e-12 {
                by_seg[i].push(t);
            }
        }
        let mut segs = Vec::new();
        for (i, s) in self.segments.iter().enumerate() {
            let ts = &mut by_seg[i];
            ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut t0 = 0.0;
            for &t in ts.iter() {
                segs.push(s.sub(t0, t));
                t0 = t;
            }
            segs.push(s.sub(t0, 1.0));
        }
        Path {
            segments: segs,
            closed: self.closed,
        }
    }

    /// All crossings of this path with a straight segment `[a, b]`,
    /// as `(segment_index, parameter)` pairs in traversal order.
    pub fn crossings_with_chord(&self, a: Complex64, b: Complex64) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        for (i, s) in self.segments.iter().enumerate() {
            for t in segment_chord_intersections(s, a, b) {
                out.push((i, t));
            }
        }
        out
    }
}

/// Parameters `t` on `seg` where it meets the open chord `(a, b)`.
fn segment_chord_intersections(seg: &Segment, a: Complex64, b: Complex64) -> Vec<f64> {
    let mut out = Vec::new();
    match *seg {
        Segment::Line { start, end } => {
            // start + t (end-start) = a + u (b-a)
            let d1 = end - start;
            let d2 = b - a;
            let det = -d1.re * d2.im + d1.im * d2.re;
            if det.abs() < 1e-300 {
                return out;
            }
            let rhs = a - start;
            let t = (-rhs.re * d2.im + rhs.im * d2.re) / det;
            let u = (d1.re * rhs.im - d1.im * rhs.re) / det;
            if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
                out.push(t);
            }
        }
        Segment::Arc {
            center,
            radius,
            theta0,
            theta1,
        } => {
            // Intersect circle |z-center| = radius with the chord.
            let d = b - a;
            let f = a - center;
            let qa = d.norm_sqr();
            if qa == 0.0 {
                return out;
            }
            let qb = 2.0 * (f.re * d.re + f.im * d.im);
            let qc = f.norm_sqr() - radius * radius;
            let disc = qb * qb - 4.0 * qa * qc;
            if disc < 0.0 {
                return out;
            }
            let sq = disc.sqrt();
            for u in [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)] {
                if !(0.0..=1.0).contains(&u) {
                    continue;
                }
                let p = a + d * u;
                let ang = (p - center).arg();
                let sweep = theta1 - theta0;
                // Bring ang into the swept range to recover t.
                let mut rel = (ang - theta0) / sweep;
                let period = core::f64::consts::TAU / sweep.abs();
                while rel < 0.0 {
                    rel += period;
                }
                while rel > 1.0 + 1e-12 {
                    rel -= period;
                }
                if (-1e-12..=1.0 + 1e-12).contains(&rel) {
                    out.push(rel.clamp(0.0, 1.0));
                }
            }
        }
    }
    out.sort_by(|x, y| x.partial_cmp(y).unwrap());
    out.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
    out
}

/// Interpolation style for [`build_arc_chain`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Interpolation {
    Polyline,
    CircularThrough,
}

/// Build an open arc through the given points in order.
///
/// `Polyline` connects consecutive points with straight segments;
/// `CircularThrough` fits circle arcs through consecutive point triples,
/// falling back to straight segments where a triple is collinear.
pub fn build_arc_chain(
    points: &[Complex64],
    interpolation: Interpolation,
) -> Result<Path, GeometryError> {
    if points.len() < 2 {
        return Err(GeometryError::DegenerateArc(format!(
            "need at least 2 points, got {}",
            points.len()
        )));
    }
    let diam = points
        .iter()
        .flat_map(|p| points.iter().map(move |q| (p - q).norm()))
        .fold(0.0f64, f64::max);
    if diam == 0.0 {
        return Err(GeometryError::DegenerateArc("all points coincide".into()));
    }
    for w in points.windows(2) {
        if (w[1] - w[0]).norm() < GEOM_EPS * diam {
            return Err(GeometryError::DegenerateArc(
                "coincident consecutive points".into(),
            ));
        }
    }
    let mut segs = Vec::new();
    match interpolation {
        Interpolation::Polyline => {
            for w in points.windows(2) {
                segs.push(Segment::Line {
                    start: w[0],
                    end: w[1],
                });
            }
        }
        Interpolation::CircularThrough => {
            let mut i = 0;
            while i + 2 < points.len() {
                let (p0, p1, p2) = (points[i], points[i + 1], points[i + 2]);
                match circle_through(p0, p1, p2) {
                    Some((center, radius)) => {
                        let th0 = (p0 - center).arg();
                        let thm = (p1 - center).arg();
                        let th2 = (p2 - center).arg();
                        let ccw_total = mod_tau(th2 - th0);
                        let ccw_mid = mod_tau(thm - th0);
                        let tau = core::f64::consts::TAU;
                        let theta1 = if ccw_mid <= ccw_total {
                            th0 + ccw_total
                        } else {
                            th0 + ccw_total - tau
                        };
                        segs.push(Segment::Arc {
                            center,
                            radius,
                            theta0: th0,
                            theta1,
                        });
                    }
                    None => {
                        segs.push(Segment::Line { start: p0, end: p1 });
                        segs.push(Segment::Line { start: p1, end: p2 });
                    }
                }
                i += 2;
            }
            if i + 1 < points.len() {
                segs.push(Segment::Line {
                    start: points[i],
                    end: points[i + 1],
                });
            }
        }
    }
    Path::open(segs)
}

/// Reduce an angle into `[0, 2 pi)`.
fn mod_tau(x: f64) -> f64 {
    let tau = core::f64::consts::TAU;
    let mut r = x % tau;
    if r < 0.0 {
        r += tau;
    }
    r
}

/// Circumcircle of three points; `None` when they are (nearly) collinear.
fn circle_through(p0: Complex64, p1: Complex64, p2: Complex64) -> Option<(Complex64, f64)> {
    let ax = p0.re;
    let ay = p0.im;
    let bx = p1.re;
    let by = p1.im;
    let cx = p2.re;
    let cy = p2.im;
    let d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
    let scale = (p1 - p0).norm().max((p2 - p1).norm());
    if d.abs() < 1e-9 * scale * scale {
        return None;
    }
    let a2 = ax * ax + ay * ay;
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d;
    let uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d;
    let center = Complex64::new(ux, uy);
    Some((center, (p0 - center).norm()))
}

/// Controls for adaptive quadrature along a path.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum bisection depth per initial panel.
    pub max_subdivisions: u32,
    pub nodes_per_panel: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 40,
            nodes_per_panel: 15,
        }
    }
}

impl QuadratureSpec {
    /// A cheaper spec for scans and initializers.
    pub fn coarse() -> Self {
        QuadratureSpec {
            abs_tol: 1e-8,
            rel_tol: 1e-7,
            max_subdivisions: 14,
            nodes_per_panel: 10,
        }
    }

    pub fn validate(&self) -> Result<(), QuadError> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) || self.max_subdivisions < 1 {
            return Err(QuadError::BadSpec);
        }
        if self.nodes_per_panel < 2 || self.nodes_per_panel > 64 {
            return Err(QuadError::BadSpec);
        }
        Ok(())
    }
}

/// Errors from quadrature.
#[derive(Clone, Debug)]
pub enum QuadError {
    BadSpec,
    /// The integrand returned a non-finite value at `node`.
    NonFiniteIntegrand { node: Complex64 },
    /// The error estimate did not meet the tolerance; `best` carries the
    /// most refined value obtained.
    AccuracyNotMet { best: Complex64, err_est: f64 },
    Geometry(GeometryError),
}

impl fmt::Display for QuadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuadError::BadSpec => write!(f, "invalid quadrature spec"),
            QuadError::NonFiniteIntegrand { node } => {
                write!(f, "integrand not finite at node {node}")
            }
            QuadError::AccuracyNotMet { best, err_est } => write!(
                f,
                "quadrature error estimate {err_est:.3e} above tolerance (best value {best})"
            ),
            QuadError::Geometry(g) => write!(f, "{g}"),
        }
    }
}

impl core::error::Error for QuadError {}

impl From<GeometryError> for QuadError {
    fn from(g: GeometryError) -> Self {
        QuadError::Geometry(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn arc_chain_two_point_line() {
        let p = build_arc_chain(&[c(0.0, 0.0), c(1.0, 0.0)], Interpolation::Polyline).unwrap();
        assert_eq!(p.segments().len(), 1);
        assert!((p.length() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn arc_chain_polyline_length() {
        // [0, i, -1]: segment lengths 1 and sqrt(2).
        let p = build_arc_chain(&[c(0.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)], Interpolation::Polyline)
            .unwrap();
        assert_eq!(p.segments().len(), 2);
        assert!((p.length() - (1.0 + 2.0f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn arc_chain_rejects_single_point() {
        let err = build_arc_chain(&[c(0.0, 0.0)], Interpolation::Polyline);
        assert!(matches!(err, Err(GeometryError::DegenerateArc(_))));
    }

    #[test]
    fn arc_chain_rejects_coincident_points() {
        let err = build_arc_chain(
            &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            Interpolation::Polyline,
        );
        assert!(matches!(err, Err(GeometryError::DegenerateArc(_))));
    }

    #[test]
    fn circular_through_semicircle() {
        // Points on the unit circle: 1, i, -1 -> one counterclockwise arc.
        let p = build_arc_chain(
            &[c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)],
            Interpolation::CircularThrough,
        )
        .unwrap();
        assert_eq!(p.segments().len(), 1);
        assert!((p.length() - core::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn winding_of_circle() {
        let circle = Path::closed(vec![Segment::Arc {
            center: c(0.5, 0.5),
            radius: 1.0,
            theta0: 0.0,
            theta1: core::f64::consts::TAU,
        }])
        .unwrap();
        assert_eq!(circle.winding_number(c(0.5, 0.5)), 1);
        assert_eq!(circle.winding_number(c(3.0, 0.0)), 0);
        assert_eq!(circle.orientation(), Orientation::Counterclockwise);
        assert_eq!(circle.reversed().orientation(), Orientation::Clockwise);
    }

    #[test]
    fn discontinuous_path_rejected() {
        let err = Path::open(vec![
            Segment::Line {
                start: c(0.0, 0.0),
                end: c(1.0, 0.0),
            },
            Segment::Line {
                start: c(2.0, 0.0),
                end: c(3.0, 0.0),
            },
        ]);
        assert!(matches!(err, Err(GeometryError::Discontinuous { .. })));
    }

    #[test]
    fn chord_intersection_line() {
        let seg = Segment::Line {
            start: c(-1.0, -1.0),
            end: c(1.0, 1.0),
        };
        let ts = segment_chord_intersections(&seg, c(-1.0, 1.0), c(1.0, -1.0));
        assert_eq!(ts.len(), 1);
        assert!((ts[0] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn chord_intersection_arc() {
        let seg = Segment::Arc {
            center: c(0.0, 0.0),
            radius: 1.0,
            theta0: 0.0,
            theta1: core::f64::consts::PI,
        };
        // Vertical chord through x = 0 meets the upper semicircle at i.
        let ts = segment_chord_intersections(&seg, c(0.0, -2.0), c(0.0, 2.0));
        assert_eq!(ts.len(), 1);
        assert!((seg.point(ts[0]) - c(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn splits_preserve_geometry() {
        let p = build_arc_chain(&[c(0.0, 0.0), c(2.0, 0.0)], Interpolation::Polyline).unwrap();
        let q = p.with_splits(&[(0, 0.25), (0, 0.5)]);
        assert_eq!(q.segments().len(), 3);
        assert!((q.length() - 2.0).abs() < 1e-14);
        assert_eq!(q.start(), p.start());
        assert_eq!(q.end(), p.end());
    }
}
