//! Stadium-shaped loop contours at constant standoff around open arcs.
//!
//! A loop is two offset copies of the arc joined by semicircular caps at the
//! arc endpoints, traversed clockwise. Corners of a polyline arc are rounded
//! with vertex-centered arcs on the outer side and trimmed to the offset-line
//! intersection on the inner side. Loops for Schwarz-reflected integrands
//! are assembled from an upper half with real endpoints plus its mirror, so
//! the real-axis crossings are segment boundaries.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::{GeometryError, Orientation, Path, Segment};

/// Sharpest polyline turn (radians) the offsetter accepts.
const MAX_TURN: f64 = 2.6;

fn unit(z: Complex64) -> Complex64 {
    z / z.norm()
}

/// Extract the polyline vertices of an arc path, sampling any curved
/// segments finely enough for offsetting.
fn polyline_vertices(arc: &Path) -> Vec<Complex64> {
    let mut verts = vec![arc.start()];
    for seg in arc.segments() {
        match seg {
            Segment::Line { end, .. } => verts.push(*end),
            Segment::Arc { .. } => {
                let n = seg.chord_params().max(8);
                for k in 1..=n {
                    verts.push(seg.point(k as f64 / n as f64));
                }
            }
        }
    }
    verts
}

/// Left rail of the offset construction: the arc's offset copy on the
/// `side` (+1 = left of travel) at distance `o`, traversed forward, with
/// corner arcs and inner trims. Returns the rail segments.
fn offset_rail(
    verts: &[Complex64],
    o: f64,
    side: f64,
) -> Result<Vec<Segment>, GeometryError> {
    let m = verts.len() - 1;
    let tau: Vec<Complex64> = (0..m).map(|k| unit(verts[k + 1] - verts[k])).collect();
    let nrm: Vec<Complex64> = tau.iter().map(|t| Complex64::i() * t * side).collect();
    let mut segs: Vec<Segment> = Vec::new();
    let mut cursor = verts[0] + nrm[0] * o;
    for k in 0..m {
        let plain_end = verts[k + 1] + nrm[k] * o;
        if k == m - 1 {
            segs.push(Segment::Line {
                start: cursor,
                end: plain_end,
            });
            break;
        }
        let turn = (tau[k + 1] / tau[k]).arg();
        if turn.abs() > MAX_TURN {
            return Err(GeometryError::HairpinTurn {
                vertex: verts[k + 1],
                angle: turn,
            });
        }
        // side*turn < 0: this side is outside the corner -> rounding arc.
        // side*turn > 0: inside -> trim to the offset-line intersection.
        if side * turn < -1e-12 {
            segs.push(Segment::Line {
                start: cursor,
                end: plain_end,
            });
            let th0 = nrm[k].arg();
            segs.push(Segment::Arc {
                center: verts[k + 1],
                radius: o,
                theta0: th0,
                theta1: th0 + turn,
            });
            cursor = verts[k + 1] + nrm[k + 1] * o;
        } else if side * turn > 1e-12 {
            let p = verts[k + 1] + (nrm[k] + nrm[k + 1]) * (o / (1.0 + turn.cos()));
            let fwd = ((p - cursor) * tau[k].conj()).re;
            let nxt = ((verts[k + 2] + nrm[k + 1] * o - p) * tau[k + 1].conj()).re;
            if fwd <= 0.0 || nxt <= 0.0 {
                return Err(GeometryError::OffsetTooLarge {
                    vertex: verts[k + 1],
                });
            }
            segs.push(Segment::Line {
                start: cursor,
                end: p,
            });
            cursor = p;
        } else {
            segs.push(Segment::Line {
                start: cursor,
                end: plain_end,
            });
            cursor = plain_end;
        }
    }
    Ok(segs)
}

/// Closed clockwise stadium loop at standoff `offset` around an open arc.
///
/// `excluded` are points the loop must keep away from; the builder fails
/// with a collision error when the arc passes within `2 * offset` of one,
/// matching the requirement that a loop not approach points it is not meant
/// to enclose.
pub fn build_loop(
    arc: &Path,
    offset: f64,
    excluded: &[Complex64],
) -> Result<Path, GeometryError> {
    if !(offset > 0.0) {
        return Err(GeometryError::DegenerateArc(
            "loop offset must be positive".to_string(),
        ));
    }
    if arc.is_closed() {
        return Err(GeometryError::DegenerateArc(
            "loops are built around open arcs".to_string(),
        ));
    }
    for &e in excluded {
        let d = arc.distance_to(e);
        if d <= 2.0 * offset {
            return Err(GeometryError::LoopCollision {
                point: e,
                distance: d,
            });
        }
    }
    let verts = polyline_vertices(arc);
    let m = verts.len() - 1;
    let tau0 = unit(verts[1] - verts[0]);
    let tau_last = unit(verts[m] - verts[m - 1]);
    let n0 = Complex64::i() * tau0;
    let n_last = Complex64::i() * tau_last;

    let mut segs = offset_rail(&verts, offset, 1.0)?;
    // Far cap around the last vertex, sweeping clockwise by pi.
    let th = n_last.arg();
    segs.push(Segment::Arc {
        center: verts[m],
        radius: offset,
        theta0: th,
        theta1: th - core::f64::consts::PI,
    });
    // Right rail traversed backward = reverse of the forward right rail.
    let right = offset_rail(&verts, offset, -1.0)?;
    for seg in right.iter().rev() {
        segs.push(seg.reversed());
    }
    // Near cap back to the start.
    let th = (-n0).arg();
    segs.push(Segment::Arc {
        center: verts[0],
        radius: offset,
        theta0: th,
        theta1: th - core::f64::consts::PI,
    });
    let path = Path::closed(segs)?;
    debug_assert_eq!(path.orientation(), Orientation::Clockwise);
    Ok(path)
}

/// Upper half of a Schwarz-symmetric loop around an arc whose upper piece is
/// `upper` (an open path from a real point `z0` up to the top endpoint).
///
/// The half-loop runs from `z0 - clearance` on the real axis, up the left
/// side of the arc, over the cap at the top endpoint, and back down to
/// `z0 + clearance`. Close it with [`close_schwarz_loop`] to get the full
/// clockwise loop; integrate Schwarz-reflected functions over it with
/// [`super::schwarz_loop_integral`].
///
/// `clearance = 0` pinches the loop at `z0`: both real-axis crossings
/// coincide with `z0`. For jump functions whose real-axis jump vanishes at
/// `z0` this is the placement that makes the loop integrals independent of
/// the loop shape.
pub fn build_schwarz_loop(
    upper: &Path,
    offset: f64,
    clearance: f64,
) -> Result<Path, GeometryError> {
    if !(offset > 0.0) || !(clearance >= 0.0) {
        return Err(GeometryError::DegenerateArc(
            "offset must be positive and clearance nonnegative".to_string(),
        ));
    }
    let verts = polyline_vertices(upper);
    let scale = upper.diameter().max(1.0);
    let base = verts[0];
    if base.im.abs() > crate::GEOM_EPS * scale {
        return Err(GeometryError::EndpointsNotReal { endpoint: base });
    }
    for v in &verts[1..] {
        if v.im <= 0.0 {
            return Err(GeometryError::DegenerateArc(
                "upper arc piece must stay in the open upper half-plane".to_string(),
            ));
        }
    }
    let tau0 = unit(verts[1] - verts[0]);
    if tau0.im < 0.05 {
        return Err(GeometryError::HairpinTurn {
            vertex: base,
            angle: tau0.arg(),
        });
    }
    // Trim the rails away from the real axis so both rail feet sit in the
    // closed upper half-plane.
    let rho = offset * (tau0.re.abs() + 0.5) / tau0.im;
    if rho > 0.8 * (verts[1] - verts[0]).norm() {
        return Err(GeometryError::OffsetTooLarge { vertex: base });
    }
    let mut tverts = verts.clone();
    tverts[0] = base + tau0 * rho;

    let m = tverts.len() - 1;
    let tau_last = unit(tverts[m] - tverts[m - 1]);
    let n0 = Complex64::i() * tau0;
    let n_last = Complex64::i() * tau_last;

    let p1 = base - clearance;
    let p2 = base + clearance;
    let left_foot = tverts[0] + n0 * offset;
    let right_foot = tverts[0] - n0 * offset;

    let mut segs = vec![Segment::Line {
        start: p1,
        end: left_foot,
    }];
    segs.extend(offset_rail(&tverts, offset, 1.0)?);
    let th = n_last.arg();
    segs.push(Segment::Arc {
        center: tverts[m],
        radius: offset,
        theta0: th,
        theta1: th - core::f64::consts::PI,
    });
    let right = offset_rail(&tverts, offset, -1.0)?;
    for seg in right.iter().rev() {
        segs.push(seg.reversed());
    }
    segs.push(Segment::Line {
        start: right_foot,
        end: p2,
    });
    Path::open(segs)
}

/// Close an upper half-loop with its mirror image into a full clockwise loop.
pub fn close_schwarz_loop(gamma_plus: &Path) -> Result<Path, GeometryError> {
    let mut segs = gamma_plus.segments().to_vec();
    for seg in gamma_plus.segments().iter().rev() {
        segs.push(seg.conjugated_reversed());
    }
    let path = Path::closed(segs)?;
    debug_assert_eq!(path.orientation(), Orientation::Clockwise);
    Ok(path)
}

/// Standoff distances used when a loop system was built.
#[derive(Clone, Debug)]
pub struct LoopOffsets {
    pub outer: f64,
    pub main: Vec<f64>,
    pub comp: Vec<f64>,
}

/// The loop contours surrounding a jump contour: one outer loop around the
/// whole contour and one small loop around each main and complementary arc.
/// All loops are closed and clockwise; the small loops lie strictly inside
/// the outer one.
#[derive(Clone, Debug)]
pub struct LoopSystem {
    pub outer: Path,
    /// Upper half of `outer` when it was built Schwarz-symmetric; loop
    /// integrals of Schwarz-reflected integrands use this half.
    pub outer_upper: Option<Path>,
    /// `main_loops[j]` surrounds main arc `j`, `j = 0..=N`.
    pub main_loops: Vec<Path>,
    /// `comp_loops[j-1]` surrounds complementary arc `j`, `j = 1..=N`.
    pub comp_loops: Vec<Path>,
    pub offsets: LoopOffsets,
}

impl LoopSystem {
    /// Validate closure, orientation, branchpoint clearance and containment.
    ///
    /// `enclosed_main[j]` / `enclosed_comp[j]` list the branchpoint indices
    /// each small loop is meant to enclose; every other branchpoint must
    /// stay outside it and at least `offset/2` away from its path.
    ///
    /// `pinch` marks a point where the outer loop touches the jump contour
    /// of the integrand (the `z_0` of a Schwarz-reflected jump function);
    /// strict containment of the small loops in the outer loop is not
    /// required near it.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        outer: Path,
        outer_upper: Option<Path>,
        main_loops: Vec<Path>,
        comp_loops: Vec<Path>,
        offsets: LoopOffsets,
        branch_points: &[Complex64],
        enclosed_main: &[(usize, usize)],
        enclosed_comp: &[(usize, usize)],
        pinch: Option<Complex64>,
    ) -> Result<Self, GeometryError> {
        let sys = LoopSystem {
            outer,
            outer_upper,
            main_loops,
            comp_loops,
            offsets,
        };
        for (loops, enclosed, offs) in [
            (&sys.main_loops, enclosed_main, &sys.offsets.main),
            (&sys.comp_loops, enclosed_comp, &sys.offsets.comp),
        ] {
            for (idx, lp) in loops.iter().enumerate() {
                if !lp.is_closed() || lp.orientation() != Orientation::Clockwise {
                    return Err(GeometryError::DegenerateArc(
                        "small loops must be closed and clockwise".to_string(),
                    ));
                }
                let (a, b) = enclosed[idx];
                for (k, &alpha) in branch_points.iter().enumerate() {
                    let inside = lp.encloses(alpha);
                    if k == a || k == b {
                        if !inside {
                            return Err(GeometryError::LoopCollision {
                                point: alpha,
                                distance: lp.distance_to(alpha),
                            });
                        }
                    } else {
                        let d = lp.distance_to(alpha);
                        if inside || d < 0.5 * offs[idx] {
                            return Err(GeometryError::LoopCollision {
                                point: alpha,
                                distance: d,
                            });
                        }
                    }
                }
                // Strict containment in the outer loop, except near the
                // pinch point where the outer loop touches the contour.
                for seg in lp.segments() {
                    for &t in &[0.0, 0.5] {
                        let p = seg.point(t);
                        if let Some(z0) = pinch {
                            if (p - z0).norm() < 3.0 * sys.offsets.outer {
                                continue;
                            }
                        }
                        if !sys.outer.encloses(p) {
                            return Err(GeometryError::LoopCollision {
                                point: p,
                                distance: sys.outer.distance_to(p),
                            });
                        }
                    }
                }
            }
        }
        if !sys.outer.is_closed() || sys.outer.orientation() != Orientation::Clockwise {
            return Err(GeometryError::DegenerateArc(
                "outer loop must be closed and clockwise".to_string(),
            ));
        }
        for &alpha in branch_points {
            if !sys.outer.encloses(alpha) {
                return Err(GeometryError::LoopCollision {
                    point: alpha,
                    distance: sys.outer.distance_to(alpha),
                });
            }
        }
        Ok(sys)
    }

    pub fn genus(&self) -> usize {
        self.comp_loops.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour::{build_arc_chain, integrate, Interpolation, QuadratureSpec};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn stadium_perimeter_and_orientation() {
        let arc = build_arc_chain(&[c(-1.0, 0.0), c(1.0, 0.0)], Interpolation::Polyline).unwrap();
        let lp = build_loop(&arc, 0.5, &[]).unwrap();
        let expect = 2.0 * 2.0 + core::f64::consts::TAU * 0.5;
        assert!((lp.length() - expect).abs() < 1e-12, "len {}", lp.length());
        assert_eq!(lp.orientation(), Orientation::Clockwise);
        assert!(lp.encloses(c(0.0, 0.0)));
        assert!(lp.encloses(c(1.2, 0.0)));
        assert!(!lp.encloses(c(1.6, 0.0)));
    }

    #[test]
    fn loop_collision_error() {
        let arc = build_arc_chain(&[c(-1.0, 0.0), c(1.0, 0.0)], Interpolation::Polyline).unwrap();
        let res = build_loop(&arc, 0.5, &[c(1.2, 0.0)]);
        assert!(matches!(res, Err(GeometryError::LoopCollision { .. })));
    }

    #[test]
    fn zero_offset_rejected() {
        let arc = build_arc_chain(&[c(-1.0, 0.0), c(1.0, 0.0)], Interpolation::Polyline).unwrap();
        assert!(matches!(
            build_loop(&arc, 0.0, &[]),
            Err(GeometryError::DegenerateArc(_))
        ));
    }

    #[test]
    fn bent_arc_loop_orientation_and_residue() {
        // Polyline with a corner; the loop must still be a clean clockwise
        // curve with the right residue behavior.
        let arc = build_arc_chain(
            &[c(-1.0, 0.0), c(0.0, 0.6), c(1.0, 0.1)],
            Interpolation::Polyline,
        )
        .unwrap();
        let lp = build_loop(&arc, 0.25, &[]).unwrap();
        assert_eq!(lp.orientation(), Orientation::Clockwise);
        let spec = QuadratureSpec::default();
        let inside = integrate(&lp, &spec, |z| 1.0 / (z - c(0.0, 0.6))).unwrap();
        assert!((inside - c(0.0, -core::f64::consts::TAU)).norm() < 1e-9);
        let outside = integrate(&lp, &spec, |z| 1.0 / (z - c(0.0, 2.0))).unwrap();
        assert!(outside.norm() < 1e-10);
    }

    #[test]
    fn schwarz_loop_closes_and_encloses() {
        let upper = build_arc_chain(&[c(1.1, 0.0), c(0.8, 1.0)], Interpolation::Polyline).unwrap();
        let half = build_schwarz_loop(&upper, 0.2, 0.25).unwrap();
        assert!((half.start() - c(0.85, 0.0)).norm() < 1e-12);
        assert!((half.end() - c(1.35, 0.0)).norm() < 1e-12);
        for seg in half.segments() {
            for &t in &[0.1, 0.5, 0.9] {
                assert!(seg.point(t).im > -1e-12);
            }
        }
        let full = close_schwarz_loop(&half).unwrap();
        assert_eq!(full.orientation(), Orientation::Clockwise);
        assert!(full.encloses(c(0.8, 1.0)));
        assert!(full.encloses(c(0.8, -1.0)));
        assert!(full.encloses(c(1.1, 0.0)));
        assert!(!full.encloses(c(2.0, 0.0)));
        let spec = QuadratureSpec::default();
        let v = integrate(&full, &spec, |z| 1.0 / (z - c(0.9, 0.5))).unwrap();
        assert!((v - c(0.0, -core::f64::consts::TAU)).norm() < 1e-9);
    }

    #[test]
    fn hairpin_rejected() {
        let arc = build_arc_chain(
            &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.05)],
            Interpolation::Polyline,
        )
        .unwrap();
        assert!(matches!(
            build_loop(&arc, 0.1, &[]),
            Err(GeometryError::HairpinTurn { .. })
        ));
    }
}
