//! The radical `R(z) = (prod_j (z - alpha_j))^(1/2)` with the main arcs as
//! branchcuts and the normalization `R(z)/z^(N+1) -> -1` at infinity.
//!
//! The branch is realized as a product of per-arc Joukowski-type factors
//! `sqrt(u-1) sqrt(u+1)` (principal roots), whose cut is the straight chord
//! between the paired branchpoints, corrected by a topological parity factor
//! that moves the cut from the chord onto the actual arc. Squaring the
//! result recovers the polynomial exactly, so the only freedom is signs, and
//! those are pinned by the normalization at infinity.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::contour::{Path, Segment};

/// Which side of an oriented arc a one-sided limit is taken from.
/// `Plus` is the left side of the traversal direction, matching the
/// convention that `R_+` is the limit from the left of the contour.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

#[derive(Clone, Debug)]
pub enum RadicalError {
    /// Evaluation point lies on a cut arc; use [`RadicalBranch::eval_side`].
    OnCut { z: Complex64 },
    /// `eval_side` was called away from every cut arc.
    NotNearCut { z: Complex64 },
    DegenerateBranchPoints { min_separation: f64 },
    NotSchwarzPaired,
    /// A path crosses a cut arc (or the branch could not be tracked).
    BranchTracking { at: Complex64 },
    BadArcs(String),
}

impl fmt::Display for RadicalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadicalError::OnCut { z } => write!(f, "point {z} lies on a branchcut"),
            RadicalError::NotNearCut { z } => {
                write!(f, "point {z} is not near any cut arc")
            }
            RadicalError::DegenerateBranchPoints { min_separation } => write!(
                f,
                "branchpoints too close together (min separation {min_separation:.3e})"
            ),
            RadicalError::NotSchwarzPaired => {
                write!(f, "branchpoints are not closed under conjugation")
            }
            RadicalError::BranchTracking { at } => {
                write!(f, "radical branch could not be tracked continuously near {at}")
            }
            RadicalError::BadArcs(msg) => write!(f, "bad cut arcs: {msg}"),
        }
    }
}

impl core::error::Error for RadicalError {}

/// The ordered branchpoints `alpha_0 .. alpha_{2N+1}` of a genus-`N`
/// configuration, with optional Schwarz pairing metadata.
#[derive(Clone, Debug)]
pub struct BranchPointSet {
    alphas: Vec<Complex64>,
    schwarz_paired: bool,
}

impl BranchPointSet {
    pub fn new(alphas: Vec<Complex64>, schwarz_paired: bool) -> Result<Self, RadicalError> {
        if alphas.len() < 2 || alphas.len() % 2 != 0 {
            return Err(RadicalError::BadArcs(format!(
                "need an even number (>= 2) of branchpoints, got {}",
                alphas.len()
            )));
        }
        let set = BranchPointSet {
            alphas,
            schwarz_paired,
        };
        let scale = set.scale();
        let mut min_sep = f64::INFINITY;
        for i in 0..set.alphas.len() {
            for j in i + 1..set.alphas.len() {
                min_sep = min_sep.min((set.alphas[i] - set.alphas[j]).norm());
            }
        }
        if min_sep <= 1e-8 * scale {
            return Err(RadicalError::DegenerateBranchPoints {
                min_separation: min_sep,
            });
        }
        if schwarz_paired {
            for &a in &set.alphas {
                let ok = set
                    .alphas
                    .iter()
                    .any(|&b| (b - a.conj()).norm() <= 1e-12 * scale);
                if !ok {
                    return Err(RadicalError::NotSchwarzPaired);
                }
            }
        }
        Ok(set)
    }

    pub fn alphas(&self) -> &[Complex64] {
        &self.alphas
    }

    pub fn schwarz_paired(&self) -> bool {
        self.schwarz_paired
    }

    /// Genus `N`: the configuration has `N+1` main arcs.
    pub fn genus(&self) -> usize {
        self.alphas.len() / 2 - 1
    }

    /// Configuration diameter, the length scale for all tolerances.
    pub fn scale(&self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..self.alphas.len() {
            for j in i + 1..self.alphas.len() {
                d = d.max((self.alphas[i] - self.alphas[j]).norm());
            }
        }
        d.max(1e-300)
    }

    /// Index pairs `(2j, 2j+1)` of the main arcs.
    pub fn main_pairs(&self) -> Vec<(usize, usize)> {
        (0..=self.genus()).map(|j| (2 * j, 2 * j + 1)).collect()
    }

    /// Index pairs `(2j-1, 2j)` of the complementary arcs.
    pub fn comp_pairs(&self) -> Vec<(usize, usize)> {
        (1..=self.genus()).map(|j| (2 * j - 1, 2 * j)).collect()
    }

    pub fn centroid(&self) -> Complex64 {
        self.alphas.iter().sum::<Complex64>() / self.alphas.len() as f64
    }
}

/// A fixed branch of the radical, cut along the given main arcs.
#[derive(Clone, Debug)]
pub struct RadicalBranch {
    points: BranchPointSet,
    cut_arcs: Vec<Path>,
    /// Polyline rendition of each cut arc used by topological predicates.
    cut_polylines: Vec<Vec<Complex64>>,
    anchor_z: Complex64,
    anchor_val: Complex64,
}

impl RadicalBranch {
    /// `cut_arcs[j]` must run from `alpha_{2j}` to `alpha_{2j+1}`.
    pub fn new(points: BranchPointSet, cut_arcs: Vec<Path>) -> Result<Self, RadicalError> {
        let n_arcs = points.genus() + 1;
        if cut_arcs.len() != n_arcs {
            return Err(RadicalError::BadArcs(format!(
                "expected {n_arcs} cut arcs, got {}",
                cut_arcs.len()
            )));
        }
        let scale = points.scale();
        for (j, arc) in cut_arcs.iter().enumerate() {
            let (ia, ib) = (2 * j, 2 * j + 1);
            if (arc.start() - points.alphas()[ia]).norm() > 1e-12 * scale
                || (arc.end() - points.alphas()[ib]).norm() > 1e-12 * scale
            {
                return Err(RadicalError::BadArcs(format!(
                    "cut arc {j} does not join alpha_{ia} to alpha_{ib}"
                )));
            }
        }
        let cut_polylines = cut_arcs.iter().map(polyline_of).collect();
        let mut branch = RadicalBranch {
            points,
            cut_arcs,
            cut_polylines,
            anchor_z: Complex64::new(0.0, 0.0),
            anchor_val: Complex64::new(0.0, 0.0),
        };
        let scale2 = branch.points.scale();
        branch.anchor_z = branch.points.centroid() + Complex64::from_polar(1e8 * scale2, 0.7321);
        branch.anchor_val = branch.raw_eval(branch.anchor_z);
        let n1 = branch.points.genus() as i32 + 1;
        let norm_dev =
            (branch.anchor_val / branch.anchor_z.powi(n1) + Complex64::new(1.0, 0.0)).norm();
        if norm_dev > 1e-6 {
            return Err(RadicalError::BranchTracking {
                at: branch.anchor_z,
            });
        }
        Ok(branch)
    }

    /// Straight-chord cuts between consecutive branchpoint pairs.
    pub fn with_chord_cuts(points: BranchPointSet) -> Result<Self, RadicalError> {
        let arcs = points
            .main_pairs()
            .iter()
            .map(|&(a, b)| {
                Path::open(vec![Segment::Line {
                    start: points.alphas()[a],
                    end: points.alphas()[b],
                }])
                .map_err(|e| RadicalError::BadArcs(format!("{e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        RadicalBranch::new(points, arcs)
    }

    pub fn points(&self) -> &BranchPointSet {
        &self.points
    }

    pub fn cut_arcs(&self) -> &[Path] {
        &self.cut_arcs
    }

    pub fn anchor(&self) -> (Complex64, Complex64) {
        (self.anchor_z, self.anchor_val)
    }

    /// Chord factor for arc `j`: a branch of
    /// `sqrt((z - alpha_{2j})(z - alpha_{2j+1}))` cut along the chord,
    /// behaving like `z` at infinity.
    fn chord_factor(&self, j: usize, z: Complex64) -> Complex64 {
        let a = self.points.alphas()[2 * j];
        let b = self.points.alphas()[2 * j + 1];
        let half = (b - a) * 0.5;
        let u = (z - 0.5 * (a + b)) / half;
        half * (u - 1.0).sqrt() * (u + 1.0).sqrt()
    }

    /// One-sided chord factor for `z` on the open chord of arc `j`.
    fn chord_factor_side(&self, j: usize, z: Complex64, side: Side) -> Complex64 {
        let a = self.points.alphas()[2 * j];
        let b = self.points.alphas()[2 * j + 1];
        let half = (b - a) * 0.5;
        let u = ((z - 0.5 * (a + b)) / half).re;
        let mag = (1.0 - u * u).max(0.0).sqrt();
        half * Complex64::new(0.0, side.sign() * mag)
    }

    /// Parity of the correction moving arc `j`'s cut from the chord onto the
    /// arc: -1 inside the lens bounded by arc and chord, +1 outside.
    fn lens_parity(&self, j: usize, z: Complex64) -> f64 {
        let poly = &self.cut_polylines[j];
        if poly.len() == 2 {
            return 1.0; // straight arc: cut already on the chord
        }
        let mut total = 0.0f64;
        let mut prev = poly[0] - z;
        for &p in &poly[1..] {
            let cur = p - z;
            total += (cur / prev).arg();
            prev = cur;
        }
        // close with the reversed chord
        let cur = poly[0] - z;
        total += (cur / prev).arg();
        let winding = (total / core::f64::consts::TAU).round() as i64;
        if winding % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    fn raw_eval(&self, z: Complex64) -> Complex64 {
        let mut r = Complex64::new(-1.0, 0.0);
        for j in 0..=self.points.genus() {
            r *= self.chord_factor(j, z) * self.lens_parity(j, z);
        }
        r
    }

    /// Distance from `z` to the nearest cut arc, with the arc index.
    pub fn distance_to_cuts(&self, z: Complex64) -> (usize, f64) {
        let mut best = (0usize, f64::INFINITY);
        for (j, arc) in self.cut_arcs.iter().enumerate() {
            let d = arc.distance_to(z);
            if d < best.1 {
                best = (j, d);
            }
        }
        best
    }

    /// Evaluate the branch at a point off the cuts.
    ///
    /// The on-cut guard is a few ulps wide: quadrature nodes of loops
    /// pinched onto a cut endpoint legitimately come within ~1e-12 of the
    /// arcs, where the parity tests are still exact.
    pub fn eval(&self, z: Complex64) -> Result<Complex64, RadicalError> {
        let (_, d) = self.distance_to_cuts(z);
        if d <= 1e-14 * self.points.scale() {
            return Err(RadicalError::OnCut { z });
        }
        Ok(self.raw_eval(z))
    }

    /// One-sided limit `R_plus` / `R_minus` for `z` on (or within
    /// `1e-9 * scale` of) a cut arc. `Side::Plus` is the left of the arc's
    /// orientation, and `R_+ = -R_-` on the cut.
    pub fn eval_side(&self, z: Complex64, side: Side) -> Result<Complex64, RadicalError> {
        let scale = self.points.scale();
        let (j0, d) = self.distance_to_cuts(z);
        if d > 1e-9 * scale {
            return Err(RadicalError::NotNearCut { z });
        }
        for &alpha in self.points.alphas() {
            if (z - alpha).norm() <= 1e-10 * scale {
                return Ok(Complex64::new(0.0, 0.0));
            }
        }
        // Project onto the arc to get the local tangent, then nudge off the
        // cut for the topological parity factors only.
        let arc = &self.cut_arcs[j0];
        let mut best = (
            f64::INFINITY,
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        );
        for seg in arc.segments() {
            let n = 32;
            for k in 0..=n {
                let t = k as f64 / n as f64;
                let p = seg.point(t);
                let dd = (p - z).norm();
                if dd < best.0 {
                    let tan = seg.derivative(t);
                    best = (dd, p, tan / tan.norm());
                }
            }
        }
        let (_, p, tan) = best;
        let nudge = p + Complex64::i() * tan * (side.sign() * 1e-6 * scale);

        let mut r = Complex64::new(-1.0, 0.0);
        for j in 0..=self.points.genus() {
            let parity = self.lens_parity(j, nudge);
            let factor = if j == j0 {
                let a = self.points.alphas()[2 * j];
                let b = self.points.alphas()[2 * j + 1];
                let half = (b - a) * 0.5;
                let u = (z - 0.5 * (a + b)) / half;
                if u.im.abs() < 1e-9 && u.re.abs() < 1.0 + 1e-9 {
                    // On the chord: one-sided principal value. The affine
                    // chart is conformal, so the z-side maps to the u-side.
                    self.chord_factor_side(j, z, side)
                } else {
                    self.chord_factor(j, z)
                }
            } else {
                self.chord_factor(j, z)
            };
            r *= factor * parity;
        }
        Ok(r)
    }

    /// Evaluate along a path, certifying that no sign flip occurs between
    /// consecutive samples. Fails with a branch-tracking error when the path
    /// crosses a cut.
    pub fn eval_on_path(
        &self,
        path: &Path,
        samples_per_segment: usize,
    ) -> Result<PathValues, RadicalError> {
        let n = samples_per_segment.max(2);
        let mut values: Vec<(Complex64, Complex64)> = Vec::new();
        let mut max_ratio_dev = 0.0f64;
        for seg in path.segments() {
            for k in 0..=n {
                let t = k as f64 / n as f64;
                let z = seg.point(t);
                let v = self.eval(z)?;
                if let Some(&(_, prev)) = values.last() {
                    let sum = (v + prev).norm();
                    let diff = (v - prev).norm();
                    if sum < diff {
                        return Err(RadicalError::BranchTracking { at: z });
                    }
                    let denom = prev.norm().max(1e-300);
                    max_ratio_dev = max_ratio_dev.max(diff / denom);
                }
                values.push((z, v));
            }
        }
        Ok(PathValues {
            values,
            max_ratio_dev,
        })
    }

    /// All crossings of `path` with the cut arcs, as `(segment, t)` pairs.
    pub fn cut_crossings(&self, path: &Path) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        for poly in &self.cut_polylines {
            for w in poly.windows(2) {
                out.extend(path.crossings_with_chord(w[0], w[1]));
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.partial_cmp(&b.1).unwrap()));
        out
    }

    /// Parity `(-1)^(number of cut crossings)` of the straight segment from
    /// `from` to `to`. Used to continue the radical's sign across cuts.
    pub fn segment_cut_parity(&self, from: Complex64, to: Complex64) -> f64 {
        let seg = Segment::Line {
            start: from,
            end: to,
        };
        let chord = match Path::open(vec![seg]) {
            Ok(p) => p,
            Err(_) => return 1.0,
        };
        let mut count = 0usize;
        for poly in &self.cut_polylines {
            for w in poly.windows(2) {
                count += chord.crossings_with_chord(w[0], w[1]).len();
            }
        }
        if count % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Split a closed loop at its cut crossings and assign each resulting
    /// segment the sign of the analytically continued branch, `+1` at the
    /// loop point nearest `pin`. This realizes integration of `1/R` along a
    /// cycle that passes through the cuts (the complementary-arc loops).
    pub fn track_on_loop(
        &self,
        loop_path: &Path,
        pin: Complex64,
    ) -> Result<TrackedLoop, RadicalError> {
        let crossings = self.cut_crossings(loop_path);
        if crossings.len() % 2 != 0 {
            return Err(RadicalError::BranchTracking {
                at: loop_path.start(),
            });
        }
        let split = loop_path.with_splits(&crossings);
        // Which boundaries of the split path are flips: reconstruct by
        // counting sub-segments per original segment.
        let mut per_seg = vec![0usize; loop_path.segments().len()];
        for &(i, t) in &crossings {
            if t > 1e-12 && t < 1.0 - 1e-12 {
                per_seg[i] += 1;
            }
        }
        // flips[k]: the boundary between split segments k-1 and k toggles.
        let mut flips = Vec::with_capacity(split.segments().len());
        for &extra in per_seg.iter() {
            flips.push(false); // boundary inherited from the original path
            for _ in 0..extra {
                flips.push(true);
            }
        }
        let mut signs = Vec::with_capacity(split.segments().len());
        let mut s = 1.0f64;
        for k in 0..split.segments().len() {
            if k > 0 && flips[k] {
                s = -s;
            }
            signs.push(s);
        }
        // Pin the overall sign at the sub-segment nearest the pin point.
        let mut best = (f64::INFINITY, 0usize);
        for (k, seg) in split.segments().iter().enumerate() {
            let d = (seg.point(0.5) - pin).norm();
            if d < best.0 {
                best = (d, k);
            }
        }
        if signs[best.1] < 0.0 {
            for s in &mut signs {
                *s = -*s;
            }
        }
        Ok(TrackedLoop { path: split, signs })
    }
}

/// A loop split at cut crossings with the sign of the tracked branch on
/// each piece: the tracked radical on piece `k` is `signs[k] * R(z)`.
#[derive(Clone, Debug)]
pub struct TrackedLoop {
    pub path: Path,
    pub signs: Vec<f64>,
}

/// Samples of the radical along a path with a continuity certificate.
#[derive(Clone, Debug)]
pub struct PathValues {
    pub values: Vec<(Complex64, Complex64)>,
    /// Largest relative jump between consecutive samples.
    pub max_ratio_dev: f64,
}

fn polyline_of(path: &Path) -> Vec<Complex64> {
    let mut verts = vec![path.start()];
    for seg in path.segments() {
        match seg {
            Segment::Line { end, .. } => verts.push(*end),
            Segment::Arc { .. } => {
                let n = 64;
                for k in 1..=n {
                    verts.push(seg.point(k as f64 / n as f64));
                }
            }
        }
    }
    verts
}
