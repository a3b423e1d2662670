//! The determinant machinery of the scalar Riemann-Hilbert problem: the
//! moment determinant `D`, the kernel determinants `K(z)` and `K'(z)`, the
//! linear solve for the jump constants `W`, `Omega`, evaluation of `h` and
//! `g`, the modulation residuals `K(alpha_j)`, and every parameter
//! derivative used by the continuation predictor.
//!
//! All loop integrals are clockwise. The complementary-arc loops integrate
//! the branch of `1/R` continued along the loop, which flips sign at each
//! main-arc crossing; the sign convention is pinned to `+R` at the loop
//! point on the left side of the arc's midpoint. Conjugated determinant
//! columns reuse the already-computed entries.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::contour::{
    build_loop, build_schwarz_loop, close_schwarz_loop, integrate, GeometryError, LoopOffsets,
    LoopSystem, Path, QuadError, QuadratureSpec, Segment,
};
use crate::jumps::{JumpError, JumpFunction};
use crate::linalg::CMatrix;
use crate::radical::{BranchPointSet, RadicalBranch, RadicalError, Side, TrackedLoop};

#[derive(Clone, Debug)]
pub enum RhpError {
    Quad(QuadError),
    Geometry(GeometryError),
    Radical(RadicalError),
    Jump(JumpError),
    /// Evaluation point violates the placement rules for the requested
    /// quantity (inside/outside the loop system).
    Placement { z: Complex64, rule: String },
    IllConditioned { cond: f64 },
    NearSingularD { d: Complex64 },
    DegenerateJacobian { index: usize },
    Unsupported(String),
}

impl fmt::Display for RhpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RhpError::Quad(e) => write!(f, "quadrature: {e}"),
            RhpError::Geometry(e) => write!(f, "geometry: {e}"),
            RhpError::Radical(e) => write!(f, "radical: {e}"),
            RhpError::Jump(e) => write!(f, "jump function: {e}"),
            RhpError::Placement { z, rule } => write!(f, "placement of {z} violates: {rule}"),
            RhpError::IllConditioned { cond } => {
                write!(f, "moment system ill-conditioned (cond ~ {cond:.3e})")
            }
            RhpError::NearSingularD { d } => write!(f, "moment determinant near zero ({d})"),
            RhpError::DegenerateJacobian { index } => {
                write!(f, "degenerate diagonal Jacobian entry at branchpoint {index}")
            }
            RhpError::Unsupported(msg) => write!(f, "unsupported: {msg}"),
        }
    }
}

impl core::error::Error for RhpError {}

impl From<QuadError> for RhpError {
    fn from(e: QuadError) -> Self {
        RhpError::Quad(e)
    }
}

impl From<GeometryError> for RhpError {
    fn from(e: GeometryError) -> Self {
        RhpError::Geometry(e)
    }
}

impl From<RadicalError> for RhpError {
    fn from(e: RadicalError) -> Self {
        RhpError::Radical(e)
    }
}

impl From<JumpError> for RhpError {
    fn from(e: JumpError) -> Self {
        RhpError::Jump(e)
    }
}

/// Which function multiplies the kernel in an outer-loop integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Weight {
    F,
    FPrime,
    FBeta(usize),
}

/// Cached loop moments: `main[j-1][n]` and `comp[j-1][n]` hold
/// `oint zeta^n / R` over the j-th main/complementary loop (`j = 1..=N`),
/// `f_mom[n]` holds `oint zeta^n f / R` over the outer loop, `n < N`.
#[derive(Clone, Debug)]
pub struct MomentTable {
    pub main: Vec<Vec<Complex64>>,
    pub comp: Vec<Vec<Complex64>>,
    pub f_mom: Vec<Complex64>,
}

/// A solved RHP snapshot at one parameter point.
#[derive(Clone, Debug)]
pub struct RhpSolution {
    pub alphas: Vec<Complex64>,
    pub schwarz_paired: bool,
    pub beta: Vec<f64>,
    /// `w[0] = 0` by normalization.
    pub w: Vec<f64>,
    pub omega: Vec<f64>,
    pub residual_norm: f64,
    pub diagnostics: SolutionDiagnostics,
}

#[derive(Clone, Debug, Default)]
pub struct SolutionDiagnostics {
    /// Largest imaginary part discarded when taking the real parts of the
    /// solved constants.
    pub im_residue: f64,
    pub moment_cond: f64,
    pub newton_iterations: usize,
    pub residual_history: Vec<f64>,
}

/// Leading Taylor data of the bracket function at each branchpoint.
#[derive(Clone, Debug)]
pub struct BracketCoefficients {
    pub nu1: Vec<Complex64>,
    pub nu2: Vec<Complex64>,
    /// Reconstruction residual of the analytic fit on the sampling circle.
    pub fit_residual: Vec<f64>,
    /// Radius used around each branchpoint.
    pub radii: Vec<f64>,
}

/// Report from the g'-formulation cross-check.
#[derive(Clone, Debug)]
pub struct GPrimeReport {
    /// max |g'_+ + g'_- - f'| over the sampled main-arc points.
    pub max_jump_violation: f64,
    /// `(|z|, |g'(z) z^2|)` samples at large |z|.
    pub decay_samples: Vec<(f64, f64)>,
    pub points_checked: usize,
}

/// Options for geometry construction around a branchpoint configuration.
#[derive(Clone, Copy, Debug)]
pub struct ContextOptions {
    /// Small-loop standoff as a fraction of the configuration clearance.
    pub offset_factor: f64,
    /// Outer loop standoff as a multiple of the small-loop standoff.
    pub outer_factor: f64,
    pub quad: QuadratureSpec,
}

impl Default for ContextOptions {
    fn default() -> Self {
        ContextOptions {
            offset_factor: 0.3,
            outer_factor: 2.0,
            quad: QuadratureSpec::default(),
        }
    }
}

/// An immutable evaluation context: branchpoints with their cut arcs, the
/// loop system, the jump function at a fixed parameter point, and the
/// cached moment table.
pub struct RhpContext<'f> {
    pub branch: RadicalBranch,
    pub comp_arcs: Vec<Path>,
    pub loops: LoopSystem,
    pub f: &'f dyn JumpFunction,
    pub beta: Vec<f64>,
    pub quad: QuadratureSpec,
    tracked_comp: Vec<TrackedLoop>,
    comp_pins: Vec<Complex64>,
    moments: MomentTable,
}

impl<'f> RhpContext<'f> {
    /// Build loops and moment caches around the given cut geometry.
    ///
    /// `comp_arcs[j-1]` joins `alpha_{2j-1}` to `alpha_{2j}`; pass an empty
    /// list for genus 0 or to request straight chords.
    pub fn new(
        branch: RadicalBranch,
        comp_arcs: Vec<Path>,
        f: &'f dyn JumpFunction,
        beta: Vec<f64>,
        opts: &ContextOptions,
    ) -> Result<Self, RhpError> {
        let n = branch.points().genus();
        let alphas = branch.points().alphas().to_vec();
        let scale = branch.points().scale();

        let comp_arcs: Vec<Path> = if comp_arcs.is_empty() {
            branch
                .points()
                .comp_pairs()
                .iter()
                .map(|&(a, b)| {
                    Path::open(vec![Segment::Line {
                        start: alphas[a],
                        end: alphas[b],
                    }])
                })
                .collect::<Result<Vec<_>, _>>()?
        } else {
            comp_arcs
        };
        if comp_arcs.len() != n {
            return Err(RhpError::Unsupported(format!(
                "expected {n} complementary arcs, got {}",
                comp_arcs.len()
            )));
        }

        // Clearance: distance from the contour to everything a loop must
        // not approach, then a shared standoff.
        let mut exclusions: Vec<Complex64> = f.singular_points(&beta);
        let z0 = f.z0(&beta);
        let mut clearance = f64::INFINITY;
        let all_arcs: Vec<&Path> = branch.cut_arcs().iter().chain(comp_arcs.iter()).collect();
        for (ai, arc) in all_arcs.iter().enumerate() {
            for (k, &alpha) in alphas.iter().enumerate() {
                let is_endpoint = (arc.start() - alpha).norm() < 1e-9 * scale
                    || (arc.end() - alpha).norm() < 1e-9 * scale;
                let _ = k;
                if !is_endpoint {
                    clearance = clearance.min(arc.distance_to(alpha));
                }
            }
            for &p in &exclusions {
                clearance = clearance.min(arc.distance_to(p));
            }
            if let Some(z0v) = z0 {
                // z0 sits on its own arc; other arcs must keep distance.
                if arc.distance_to(z0v) > 1e-9 * scale {
                    clearance = clearance.min(arc.distance_to(z0v));
                } else if ai >= branch.cut_arcs().len() {
                    // z0 on a complementary arc is not supported.
                    return Err(RhpError::Unsupported(
                        "z0 must lie on a main arc".into(),
                    ));
                }
            }
            for (s0, s1) in f.cut_segments(&beta) {
                for k in 0..=16 {
                    let p = s0 + (s1 - s0) * (k as f64 / 16.0);
                    clearance = clearance.min(arc.distance_to(p));
                }
            }
        }
        // Arc-to-arc clearance, ignoring shared endpoints.
        for i in 0..all_arcs.len() {
            for j in i + 1..all_arcs.len() {
                let a = all_arcs[i];
                let b = all_arcs[j];
                for seg in a.segments() {
                    for k in 0..=12 {
                        let p = seg.point(k as f64 / 12.0);
                        let shared = (p - b.start()).norm() < 0.15 * scale
                            || (p - b.end()).norm() < 0.15 * scale
                            || (p - a.start()).norm() < 0.15 * scale
                            || (p - a.end()).norm() < 0.15 * scale;
                        if !shared {
                            clearance = clearance.min(b.distance_to(p));
                        }
                    }
                }
            }
        }
        if !clearance.is_finite() {
            clearance = scale;
        }
        let offset = opts.offset_factor * clearance;
        if !(offset > 0.0) {
            return Err(RhpError::Geometry(GeometryError::OffsetTooLarge {
                vertex: alphas[0],
            }));
        }
        let outer_offset = opts.outer_factor * offset;

        // Small loops.
        let mut main_loops = Vec::with_capacity(n + 1);
        for arc in branch.cut_arcs() {
            main_loops.push(build_loop(arc, offset, &[])?);
        }
        let mut comp_loops = Vec::with_capacity(n);
        for arc in &comp_arcs {
            comp_loops.push(build_loop(arc, offset, &[])?);
        }

        // Outer loop around the whole contour.
        let contour_vertices = contour_polyline(branch.cut_arcs(), &comp_arcs, scale)?;
        let contour_path = crate::contour::build_arc_chain(
            &contour_vertices,
            crate::contour::Interpolation::Polyline,
        )?;
        // The outer loop of a Schwarz-reflected f is pinched at z0: its
        // real-axis crossings coincide with the one point where the
        // real-axis jump of f vanishes. This keeps the loop integrals
        // deformation-invariant and the integration-by-parts identities
        // behind the f' formulas exact.
        let (outer, outer_upper) = if f.schwarz_reflected() {
            let upper = upper_piece(&contour_vertices, z0, scale)?;
            let gamma_plus = build_schwarz_loop(&upper, outer_offset, 0.0)?;
            (close_schwarz_loop(&gamma_plus)?, Some(gamma_plus))
        } else {
            (build_loop(&contour_path, outer_offset, &[])?, None)
        };

        // Make sure the loops exclude f's singular structure.
        for &p in exclusions.iter() {
            if outer.encloses(p) || outer.distance_to(p) < 0.25 * offset {
                return Err(RhpError::Geometry(GeometryError::LoopCollision {
                    point: p,
                    distance: outer.distance_to(p),
                }));
            }
        }
        exclusions.extend(z0);

        let offsets = LoopOffsets {
            outer: outer_offset,
            main: vec![offset; n + 1],
            comp: vec![offset; n],
        };
        let enclosed_main: Vec<(usize, usize)> = branch.points().main_pairs();
        let enclosed_comp: Vec<(usize, usize)> = branch.points().comp_pairs();
        let pinch = if f.schwarz_reflected() { z0 } else { None };
        let loops = LoopSystem::new(
            outer,
            outer_upper,
            main_loops,
            comp_loops,
            offsets,
            &alphas,
            &enclosed_main,
            &enclosed_comp,
            pinch,
        )?;

        // Complementary loops carry the branch of 1/R continued along the
        // loop; pin +R on the left of the arc midpoint.
        let mut tracked_comp = Vec::with_capacity(n);
        let mut comp_pins = Vec::with_capacity(n);
        for (idx, lp) in loops.comp_loops.iter().enumerate() {
            let arc = &comp_arcs[idx];
            let seg = &arc.segments()[0];
            let mid = seg.point(0.5);
            let dir = seg.derivative(0.5);
            let pin = mid + Complex64::i() * (dir / dir.norm()) * offset;
            let tracked = branch.track_on_loop(lp, pin)?;
            tracked_comp.push(tracked);
            comp_pins.push(pin);
        }

        let mut ctx = RhpContext {
            branch,
            comp_arcs,
            loops,
            f,
            beta,
            quad: opts.quad,
            tracked_comp,
            comp_pins,
            moments: MomentTable {
                main: Vec::new(),
                comp: Vec::new(),
                f_mom: Vec::new(),
            },
        };
        ctx.moments = ctx.build_moments()?;
        Ok(ctx)
    }

    pub fn genus(&self) -> usize {
        self.branch.points().genus()
    }

    pub fn alphas(&self) -> &[Complex64] {
        self.branch.points().alphas()
    }

    pub fn scale(&self) -> f64 {
        self.branch.points().scale()
    }

    pub fn moments(&self) -> &MomentTable {
        &self.moments
    }

    // -- low-level integrals ------------------------------------------------

    fn run_integral<K>(&self, path: &Path, mut kernel: K) -> Result<Complex64, RhpError>
    where
        K: FnMut(Complex64) -> Result<Complex64, RhpError>,
    {
        let mut captured: Option<RhpError> = None;
        let res = integrate(path, &self.quad, |z| match kernel(z) {
            Ok(v) => v,
            Err(e) => {
                captured.get_or_insert(e);
                Complex64::new(f64::NAN, f64::NAN)
            }
        });
        if let Some(e) = captured {
            return Err(e);
        }
        res.map_err(RhpError::from)
    }

    fn r_inv(&self, z: Complex64) -> Result<Complex64, RhpError> {
        Ok(1.0 / self.branch.eval(z)?)
    }

    /// `oint zeta^n / R` over a main loop (single-valued branch).
    fn mom_main(&self, j: usize, n: usize) -> Result<Complex64, RhpError> {
        let lp = &self.loops.main_loops[j];
        self.run_integral(lp, |z| Ok(z.powi(n as i32) * self.r_inv(z)?))
    }

    /// `oint zeta^n / R` over a complementary loop (tracked branch).
    fn mom_comp(&self, j: usize, n: usize) -> Result<Complex64, RhpError> {
        let tl = &self.tracked_comp[j - 1];
        self.tracked_integral(tl, |z| Ok(z.powi(n as i32)))
    }

    /// Integrate `kernel(z) / R_tracked(z)` over a tracked loop.
    fn tracked_integral<K>(&self, tl: &TrackedLoop, kernel: K) -> Result<Complex64, RhpError>
    where
        K: Fn(Complex64) -> Result<Complex64, RhpError>,
    {
        let mut total = Complex64::new(0.0, 0.0);
        for (seg, &sign) in tl.path.segments().iter().zip(&tl.signs) {
            let sub = Path::open(vec![*seg])?;
            total += sign * self.run_integral(&sub, |z| Ok(kernel(z)? * self.r_inv(z)?))?;
        }
        Ok(total)
    }

    fn weight_at(&self, w: Weight, z: Complex64) -> Result<Complex64, RhpError> {
        Ok(match w {
            Weight::F => self.f.eval(z, &self.beta)?,
            Weight::FPrime => self.f.zprime(z, &self.beta)?,
            Weight::FBeta(k) => self.f.dbeta(z, &self.beta, k)?,
        })
    }

    /// `oint weight(zeta) kernel(zeta) / R` over the outer loop, using the
    /// Schwarz-split form when the jump function is Schwarz-reflected.
    fn outer_integral<K>(&self, w: Weight, kernel: K) -> Result<Complex64, RhpError>
    where
        K: Fn(Complex64) -> Result<Complex64, RhpError>,
    {
        if let Some(upper) = &self.loops.outer_upper {
            let mut captured: Option<RhpError> = None;
            let mut guard = |r: Result<Complex64, RhpError>| match r {
                Ok(v) => v,
                Err(e) => {
                    captured.get_or_insert(e);
                    Complex64::new(f64::NAN, f64::NAN)
                }
            };
            let mut direct = |z: Complex64| {
                let v = (|| Ok(self.weight_at(w, z)? * kernel(z)? * self.r_inv(z)?))();
                guard(v)
            };
            let res_direct = integrate(upper, &self.quad, &mut direct);
            let mut partner = |z: Complex64| {
                let v = (|| {
                    let k = (kernel(z.conj())? * self.r_inv(z.conj())?).conj();
                    Ok(self.weight_at(w, z)? * k)
                })();
                guard(v)
            };
            let res_partner = integrate(upper, &self.quad, &mut partner);
            if let Some(e) = captured {
                return Err(e);
            }
            Ok(res_direct? - res_partner?.conj())
        } else {
            self.run_integral(&self.loops.outer.clone(), |z| {
                Ok(self.weight_at(w, z)? * kernel(z)? * self.r_inv(z)?)
            })
        }
    }

    fn mom_weight(&self, w: Weight, n: usize) -> Result<Complex64, RhpError> {
        self.outer_integral(w, |z| Ok(z.powi(n as i32)))
    }

    /// Cauchy-kernel column entries `oint dzeta / ((zeta - z)^p R)`.
    fn cauchy_main(&self, j: usize, z: Complex64, squared: bool) -> Result<Complex64, RhpError> {
        let lp = &self.loops.main_loops[j];
        self.run_integral(lp, |zeta| {
            let d = zeta - z;
            let k = if squared { d * d } else { d };
            Ok(self.r_inv(zeta)? / k)
        })
    }

    fn cauchy_comp(&self, j: usize, z: Complex64, squared: bool) -> Result<Complex64, RhpError> {
        let tl = &self.tracked_comp[j - 1];
        self.tracked_integral(tl, |zeta| {
            let d = zeta - z;
            Ok(1.0 / if squared { d * d } else { d })
        })
    }

    fn cauchy_weight(
        &self,
        w: Weight,
        z: Complex64,
        squared: bool,
    ) -> Result<Complex64, RhpError> {
        self.outer_integral(w, |zeta| {
            let d = zeta - z;
            Ok(1.0 / if squared { d * d } else { d })
        })
    }

    fn build_moments(&self) -> Result<MomentTable, RhpError> {
        let n = self.genus();
        let mut main = Vec::with_capacity(n);
        let mut comp = Vec::with_capacity(n);
        let mut f_mom = Vec::with_capacity(n);
        for j in 1..=n {
            let mut row = Vec::with_capacity(n);
            for m in 0..n {
                row.push(self.mom_main(j, m)?);
            }
            main.push(row);
            let mut row = Vec::with_capacity(n);
            for m in 0..n {
                row.push(self.mom_comp(j, m)?);
            }
            comp.push(row);
        }
        for m in 0..n {
            f_mom.push(self.mom_weight(Weight::F, m)?);
        }
        Ok(MomentTable { main, comp, f_mom })
    }

    // -- determinants -------------------------------------------------------

    /// The moment determinant `D` (equal to 1 for genus 0).
    pub fn eval_d(&self) -> Complex64 {
        let n = self.genus();
        if n == 0 {
            return Complex64::new(1.0, 0.0);
        }
        let mut rows = Vec::with_capacity(2 * n);
        for j in 0..n {
            rows.push(moment_row(&self.moments.main[j]));
        }
        for j in 0..n {
            rows.push(moment_row(&self.moments.comp[j]));
        }
        CMatrix::from_rows(&rows).det()
    }

    /// Scale of the moment entries, for the near-singular-D diagnostic.
    pub fn d_entry_scale(&self) -> f64 {
        let mut s = 0.0f64;
        for row in self.moments.main.iter().chain(self.moments.comp.iter()) {
            for v in row {
                s = s.max(v.norm());
            }
        }
        s.max(1e-300)
    }

    pub fn d_with_check(&self) -> Result<Complex64, RhpError> {
        let d = self.eval_d();
        let n = self.genus();
        if n > 0 {
            let floor = 1e-14 * self.d_entry_scale().powi(2 * n as i32);
            if d.norm() < floor {
                return Err(RhpError::NearSingularD { d });
            }
        }
        Ok(d)
    }

    fn kernel_det(&self, z: Complex64, squared: bool, w: Weight) -> Result<Complex64, RhpError> {
        let n = self.genus();
        let mut rows = Vec::with_capacity(2 * n + 1);
        for j in 1..=n {
            let mut row = moment_row(&self.moments.main[j - 1]);
            row.push(self.cauchy_main(j, z, squared)?);
            rows.push(row);
        }
        for j in 1..=n {
            let mut row = moment_row(&self.moments.comp[j - 1]);
            row.push(self.cauchy_comp(j, z, squared)?);
            rows.push(row);
        }
        let mut last = if w == Weight::F {
            moment_row(&self.moments.f_mom)
        } else {
            let mut vals = Vec::with_capacity(n);
            for m in 0..n {
                vals.push(self.mom_weight(w, m)?);
            }
            moment_row(&vals)
        };
        last.push(self.cauchy_weight(w, z, squared)?);
        rows.push(last);
        let det = CMatrix::from_rows(&rows).det();
        Ok(det / Complex64::new(0.0, core::f64::consts::TAU))
    }

    // -- placement ----------------------------------------------------------

    /// Loop membership of a point.
    pub fn classify(&self, z: Complex64) -> PointPlacement {
        PointPlacement {
            inside_outer: self.loops.outer.encloses(z),
            in_main: self
                .loops
                .main_loops
                .iter()
                .enumerate()
                .filter(|(_, lp)| lp.encloses(z))
                .map(|(j, _)| j)
                .collect(),
            in_comp: self
                .loops
                .comp_loops
                .iter()
                .enumerate()
                .filter(|(_, lp)| lp.encloses(z))
                .map(|(j, _)| j + 1)
                .collect(),
        }
    }

    /// Small loops adjacent to branchpoint `i`: its main loop, and the
    /// complementary loop(s) sharing the point.
    fn adjacent_loops(&self, i: usize) -> (usize, Vec<usize>) {
        let n = self.genus();
        let main = i / 2;
        let mut comps = Vec::new();
        if i % 2 == 1 && i / 2 + 1 <= n {
            comps.push(i / 2 + 1); // alpha_{2j+1} starts comp arc j+1
        }
        if i % 2 == 0 && i >= 2 {
            comps.push(i / 2); // alpha_{2j} ends comp arc j
        }
        (main, comps)
    }

    fn require_generic_placement(&self, z: Complex64, what: &str) -> Result<(), RhpError> {
        let p = self.classify(z);
        if !p.inside_outer || !p.in_main.is_empty() || !p.in_comp.is_empty() {
            return Err(RhpError::Placement {
                z,
                rule: format!("{what}: z must be inside the outer loop and outside all small loops"),
            });
        }
        Ok(())
    }

    // -- public evaluation --------------------------------------------------

    /// `K(z)` for `z` inside the outer loop and outside all small loops, or
    /// at (near) a branchpoint under the branchpoint placement rule.
    pub fn eval_k(&self, z: Complex64) -> Result<Complex64, RhpError> {
        let p = self.classify(z);
        if !p.inside_outer {
            return Err(RhpError::Placement {
                z,
                rule: "K: z must be inside the outer loop".into(),
            });
        }
        if !p.in_main.is_empty() || !p.in_comp.is_empty() {
            // Allowed only at a branchpoint inside exactly its adjacent loops.
            let scale = self.scale();
            let near = self
                .alphas()
                .iter()
                .position(|&a| (z - a).norm() <= 1e-7 * scale);
            match near {
                Some(i) => {
                    let (main, comps) = self.adjacent_loops(i);
                    let ok_main = p.in_main.iter().all(|&m| m == main);
                    let ok_comp = p.in_comp.iter().all(|&c| comps.contains(&c));
                    if !ok_main || !ok_comp {
                        return Err(RhpError::Placement {
                            z,
                            rule: "K at a branchpoint: only its adjacent loops may contain z"
                                .into(),
                        });
                    }
                }
                None => {
                    return Err(RhpError::Placement {
                        z,
                        rule: "K: z inside a small loop but not at a branchpoint".into(),
                    });
                }
            }
        }
        self.kernel_det(z, false, Weight::F)
    }

    /// `K'(z)`, the kernel determinant with squared Cauchy kernels.
    pub fn eval_k_prime(&self, z: Complex64) -> Result<Complex64, RhpError> {
        let p = self.classify(z);
        if !p.inside_outer {
            return Err(RhpError::Placement {
                z,
                rule: "K': z must be inside the outer loop".into(),
            });
        }
        self.kernel_det(z, true, Weight::F)
    }

    /// Solve the moment conditions for the jump constants.
    /// Returns `(w, omega, im_residue)` with `w[0] = 0`.
    pub fn solve_w_omega(&self) -> Result<(Vec<f64>, Vec<f64>, f64), RhpError> {
        let n = self.genus();
        if n == 0 {
            return Ok((vec![0.0], Vec::new(), 0.0));
        }
        let mut rows = Vec::with_capacity(2 * n);
        let mut rhs = Vec::with_capacity(2 * n);
        for m in 0..n {
            let mut row = Vec::with_capacity(2 * n);
            for j in 0..n {
                row.push(self.moments.main[j][m]);
            }
            for j in 0..n {
                row.push(self.moments.comp[j][m]);
            }
            rows.push(row);
            rhs.push(-self.moments.f_mom[m]);
        }
        for m in 0..n {
            let row: Vec<Complex64> = rows[m].iter().map(|v| v.conj()).collect();
            rows.push(row);
            rhs.push((-self.moments.f_mom[m]).conj());
        }
        let mat = CMatrix::from_rows(&rows);
        let cond = mat.cond_1();
        if cond > 1e12 {
            return Err(RhpError::IllConditioned { cond });
        }
        let sol = mat.solve(&rhs).ok_or(RhpError::NearSingularD {
            d: Complex64::new(0.0, 0.0),
        })?;
        let mut w = vec![0.0];
        let mut omega = Vec::with_capacity(n);
        let mut im_residue = 0.0f64;
        for (i, v) in sol.iter().enumerate() {
            im_residue = im_residue.max(v.im.abs());
            if i < n {
                w.push(v.re);
            } else {
                omega.push(v.re);
            }
        }
        Ok((w, omega, im_residue))
    }

    /// The placement correction added to `R B / (2 pi i)` when `z` sits
    /// inside small loops: `+W_j` per containing main loop, `+/- Omega_j`
    /// per containing complementary loop. The Omega sign tracks the side of
    /// the slit system formed by the main cuts together with the
    /// complementary arc itself, `+1` on the pin's side: crossing the comp
    /// arc realizes the jump `h_+ - h_- = 2 Omega_j`.
    fn loop_corrections(&self, z: Complex64, w: &[f64], omega: &[f64]) -> Complex64 {
        let p = self.classify(z);
        let mut c = Complex64::new(0.0, 0.0);
        for &j in &p.in_main {
            c += w[j];
        }
        for &j in &p.in_comp {
            let pin = self.comp_pins[j - 1];
            let mut crossings = 0usize;
            let probe = Path::open(vec![Segment::Line { start: pin, end: z }]);
            if let Ok(probe) = probe {
                for arc in self.branch.cut_arcs() {
                    for seg in arc.segments() {
                        crossings += probe
                            .crossings_with_chord(seg.start(), seg.end())
                            .len();
                    }
                }
                for seg in self.comp_arcs[j - 1].segments() {
                    crossings += probe
                        .crossings_with_chord(seg.start(), seg.end())
                        .len();
                }
            }
            let sign = if crossings % 2 == 0 { 1.0 } else { -1.0 };
            c += sign * omega[j - 1];
        }
        c
    }

    /// `h(z) = R K / D + corrections`, valid anywhere strictly inside the
    /// outer loop and off the cut arcs.
    pub fn eval_h(&self, z: Complex64, w: &[f64], omega: &[f64]) -> Result<Complex64, RhpError> {
        let p = self.classify(z);
        if !p.inside_outer {
            return Err(RhpError::Placement {
                z,
                rule: "h: z must be inside the outer loop (use g outside)".into(),
            });
        }
        let d = self.d_with_check()?;
        let k = self.kernel_det(z, false, Weight::F)?;
        let r = self.branch.eval(z)?;
        Ok(r * k / d + self.loop_corrections(z, w, omega))
    }

    /// `h` through the explicit bracket `B(z)` built from the solved
    /// constants; an independent route used to cross-check `R K / D`.
    pub fn eval_h_bracket(
        &self,
        z: Complex64,
        w: &[f64],
        omega: &[f64],
    ) -> Result<Complex64, RhpError> {
        let p = self.classify(z);
        if !p.inside_outer {
            return Err(RhpError::Placement {
                z,
                rule: "h: z must be inside the outer loop".into(),
            });
        }
        let b = self.bracket_b(z, w, omega)?;
        let r = self.branch.eval(z)?;
        Ok(r * b / Complex64::new(0.0, core::f64::consts::TAU)
            + self.loop_corrections(z, w, omega))
    }

    /// The bracket `B(z)` assembled from the f-kernel integral and the
    /// solved constants (no determinants).
    pub fn bracket_b(
        &self,
        z: Complex64,
        w: &[f64],
        omega: &[f64],
    ) -> Result<Complex64, RhpError> {
        let n = self.genus();
        let mut b = self.cauchy_weight(Weight::F, z, false)?;
        for j in 1..=n {
            b += w[j] * self.cauchy_main(j, z, false)?;
            b += omega[j - 1] * self.cauchy_comp(j, z, false)?;
        }
        Ok(b)
    }

    /// One-sided `h` on a cut arc: `h_pm = R_pm B / (2 pi i) + corrections`.
    pub fn eval_h_side(
        &self,
        z: Complex64,
        side: Side,
        w: &[f64],
        omega: &[f64],
    ) -> Result<Complex64, RhpError> {
        let r = self.branch.eval_side(z, side)?;
        let b = self.bracket_b(z, w, omega)?;
        // Classify from the requested side of the arc.
        let (j0, _) = self.branch.distance_to_cuts(z);
        let arc = &self.branch.cut_arcs()[j0];
        let mut best = (f64::INFINITY, Complex64::new(1.0, 0.0));
        for seg in arc.segments() {
            for k in 0..=32 {
                let t = k as f64 / 32.0;
                let p = seg.point(t);
                let dd = (p - z).norm();
                if dd < best.0 {
                    best = (dd, seg.derivative(t));
                }
            }
        }
        let tan = best.1 / best.1.norm();
        let sgn = match side {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        };
        let z_off = z + Complex64::i() * tan * (sgn * 1e-6 * self.scale());
        Ok(r * b / Complex64::new(0.0, core::f64::consts::TAU)
            + self.loop_corrections(z_off, w, omega))
    }

    /// `g(z)`: `(h + f)/2` inside the outer loop, `R K / (2 D)` outside.
    pub fn eval_g(&self, z: Complex64, w: &[f64], omega: &[f64]) -> Result<Complex64, RhpError> {
        let p = self.classify(z);
        if p.inside_outer {
            let h = self.eval_h(z, w, omega)?;
            let fv = self.f.eval(z, &self.beta)?;
            Ok(0.5 * (h + fv))
        } else {
            let d = self.d_with_check()?;
            let k = self.kernel_det(z, false, Weight::F)?;
            let r = self.branch.eval(z)?;
            Ok(r * k / (2.0 * d))
        }
    }

    /// The modulation residual vector `(K(alpha_0), ..., K(alpha_{2N+1}))`.
    pub fn modulation_residual(&self) -> Result<Vec<Complex64>, RhpError> {
        self.alphas()
            .iter()
            .map(|&a| self.kernel_det(a, false, Weight::F))
            .collect()
    }

    /// Diagonal Jacobian entries `dK(alpha_j)/dalpha_j` via the
    /// `(D / 2 pi i) oint f' / ((zeta - alpha_j) R)` formula.
    pub fn jacobian_diag(&self) -> Result<Vec<Complex64>, RhpError> {
        let d = self.d_with_check()?;
        let mut out = Vec::with_capacity(self.alphas().len());
        for &a in self.alphas() {
            let integral = self.cauchy_weight(Weight::FPrime, a, false)?;
            out.push(d * integral / Complex64::new(0.0, core::f64::consts::TAU));
        }
        let scale = out.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
        for (i, v) in out.iter().enumerate() {
            if v.norm() < 1e-12 * scale.max(1e-300) {
                return Err(RhpError::DegenerateJacobian { index: i });
            }
        }
        Ok(out)
    }

    /// The same diagonal entries via `(3/2) lim_{z -> alpha_j} K'(z)`.
    pub fn jacobian_diag_via_kprime(&self) -> Result<Vec<Complex64>, RhpError> {
        self.alphas()
            .iter()
            .map(|&a| Ok(1.5 * self.kernel_det(a, true, Weight::F)?))
            .collect()
    }

    /// `dK(alpha_j)/dbeta_k`: the kernel determinant with the f-row
    /// replaced by the `df/dbeta_k` row, on the same loops.
    pub fn dk_dbeta(&self, k: usize) -> Result<Vec<Complex64>, RhpError> {
        self.alphas()
            .iter()
            .map(|&a| self.kernel_det(a, false, Weight::FBeta(k)))
            .collect()
    }

    /// `dalpha_j/dbeta_k` from the perturbation formula.
    pub fn dalpha_dbeta(&self, k: usize) -> Result<Vec<Complex64>, RhpError> {
        let d = self.d_with_check()?;
        let dk = self.dk_dbeta(k)?;
        let mut out = Vec::with_capacity(dk.len());
        for (i, (&a, dki)) in self.alphas().iter().zip(&dk).enumerate() {
            let denom = d * self.cauchy_weight(Weight::FPrime, a, false)?;
            if denom.norm() < 1e-14 * self.d_entry_scale().max(1.0) {
                return Err(RhpError::DegenerateJacobian { index: i });
            }
            out.push(-Complex64::new(0.0, core::f64::consts::TAU) * dki / denom);
        }
        Ok(out)
    }

    /// `dh/dbeta_k (z)` at fixed branchpoints:
    /// `R(z)/(2 pi i) oint f_beta / ((zeta - z) R)`.
    pub fn dh_dbeta(&self, z: Complex64, k: usize) -> Result<Complex64, RhpError> {
        self.require_generic_placement(z, "dh/dbeta")?;
        let r = self.branch.eval(z)?;
        let integral = self.cauchy_weight(Weight::FBeta(k), z, false)?;
        Ok(r * integral / Complex64::new(0.0, core::f64::consts::TAU))
    }

    /// `dOmega_j/dbeta_k` (for all j), by the determinant formula: the
    /// moment matrix with the j-th complementary row replaced by the
    /// `f_beta` moment row, times `-1/D`.
    pub fn domega_dbeta(&self, k: usize) -> Result<(Vec<f64>, f64), RhpError> {
        self.dconst_dbeta(k, false)
    }

    /// `dW_j/dbeta_k` for `j = 1..=N` (the normalized `W_0` stays zero).
    pub fn dw_dbeta(&self, k: usize) -> Result<(Vec<f64>, f64), RhpError> {
        self.dconst_dbeta(k, true)
    }

    fn dconst_dbeta(&self, k: usize, main_rows: bool) -> Result<(Vec<f64>, f64), RhpError> {
        let n = self.genus();
        if n == 0 {
            return Ok((Vec::new(), 0.0));
        }
        let d = self.d_with_check()?;
        let mut fb_row = Vec::with_capacity(n);
        for m in 0..n {
            fb_row.push(self.mom_weight(Weight::FBeta(k), m)?);
        }
        let fb_row = moment_row(&fb_row);
        let mut out = Vec::with_capacity(n);
        let mut im_residue = 0.0f64;
        for j in 0..n {
            let mut rows = Vec::with_capacity(2 * n);
            for jj in 0..n {
                if main_rows && jj == j {
                    rows.push(fb_row.clone());
                } else {
                    rows.push(moment_row(&self.moments.main[jj]));
                }
            }
            for jj in 0..n {
                if !main_rows && jj == j {
                    rows.push(fb_row.clone());
                } else {
                    rows.push(moment_row(&self.moments.comp[jj]));
                }
            }
            let v = -CMatrix::from_rows(&rows).det() / d;
            im_residue = im_residue.max(v.im.abs());
            out.push(v.re);
        }
        Ok((out, im_residue))
    }

    /// Leading Taylor coefficients of the bracket at each branchpoint, by a
    /// Fourier fit of `B = 2 pi i K / D` on a small circle.
    pub fn bracket_coefficients(&self) -> Result<BracketCoefficients, RhpError> {
        let d = self.d_with_check()?;
        let n_samples = 16usize;
        let mut nu1 = Vec::new();
        let mut nu2 = Vec::new();
        let mut fit_residual = Vec::new();
        let mut radii = Vec::new();
        for (i, &a) in self.alphas().iter().enumerate() {
            let radius = 0.35 * self.loops.offsets.main[i / 2];
            let mut samples = Vec::with_capacity(n_samples);
            for m in 0..n_samples {
                let th = core::f64::consts::TAU * m as f64 / n_samples as f64;
                let z = a + Complex64::from_polar(radius, th);
                let k = self.kernel_det(z, false, Weight::F)?;
                samples.push(Complex64::new(0.0, core::f64::consts::TAU) * k / d);
            }
            // Fourier extraction of the first few Taylor coefficients.
            let mut coeff = [Complex64::new(0.0, 0.0); 4];
            for (m, &b) in samples.iter().enumerate() {
                let th = core::f64::consts::TAU * m as f64 / n_samples as f64;
                for (p, c) in coeff.iter_mut().enumerate() {
                    *c += b * Complex64::from_polar(1.0, -(p as f64) * th);
                }
            }
            for (p, c) in coeff.iter_mut().enumerate() {
                *c /= n_samples as f64 * radius.powi(p as i32);
            }
            // Residual of the cubic reconstruction.
            let mut resid = 0.0f64;
            for (m, &b) in samples.iter().enumerate() {
                let th = core::f64::consts::TAU * m as f64 / n_samples as f64;
                let dz = Complex64::from_polar(radius, th);
                let fit = coeff[0] + coeff[1] * dz + coeff[2] * dz * dz + coeff[3] * dz * dz * dz;
                resid = resid.max((b - fit).norm());
            }
            nu1.push(coeff[0]);
            nu2.push(coeff[1]);
            fit_residual.push(resid);
            radii.push(radius);
        }
        Ok(BracketCoefficients {
            nu1,
            nu2,
            fit_residual,
            radii,
        })
    }

    /// Verify the g'-form of the problem: `g'_+ + g'_- = f'` on the main
    /// arcs (finite differences of `eval_g` from both sides, Richardson
    /// extrapolated to the cut) and `g' = O(z^-2)` at large `|z|`.
    pub fn gprime_jump_check(
        &self,
        w: &[f64],
        omega: &[f64],
        points_per_arc: usize,
    ) -> Result<GPrimeReport, RhpError> {
        let scale = self.scale();
        let fd_step = 1e-5 * scale;
        let mut max_violation = 0.0f64;
        let mut points_checked = 0usize;
        for arc in self.branch.cut_arcs() {
            for seg in arc.segments() {
                for m in 1..=points_per_arc {
                    let t = m as f64 / (points_per_arc + 1) as f64;
                    let z = seg.point(t);
                    let tan = seg.derivative(t);
                    let tan = tan / tan.norm();
                    let nrm = Complex64::i() * tan;
                    let fprime = self.f.zprime(z, &self.beta)?;
                    let mut sides = [Complex64::new(0.0, 0.0); 2];
                    for (si, sgn) in [1.0f64, -1.0].iter().enumerate() {
                        // g' at distances delta and delta/2, extrapolated.
                        let mut vals = Vec::new();
                        for &delta in &[4e-3 * scale, 2e-3 * scale, 1e-3 * scale] {
                            let base = z + nrm * (*sgn * delta);
                            let gp = (self.eval_g(base + tan * fd_step, w, omega)?
                                - self.eval_g(base - tan * fd_step, w, omega)?)
                                / (2.0 * fd_step * tan);
                            vals.push(gp);
                        }
                        // Second-order Richardson on the halved sequence.
                        let r1 = 2.0 * vals[1] - vals[0];
                        let r2 = 2.0 * vals[2] - vals[1];
                        sides[si] = (4.0 * r2 - r1) / 3.0;
                    }
                    let violation = (sides[0] + sides[1] - fprime).norm();
                    max_violation = max_violation.max(violation);
                    points_checked += 1;
                }
            }
        }
        // Large-|z| decay of g'.
        let mut decay_samples = Vec::new();
        let centroid = self.branch.points().centroid();
        for &mag in &[1e2, 1e3] {
            let z = centroid + Complex64::from_polar(mag * scale, 0.4);
            let h = 1e-3 * mag * scale;
            let gp = (self.eval_g(z + h, w, omega)? - self.eval_g(z - h, w, omega)?) / (2.0 * h);
            decay_samples.push((mag * scale, (gp * z * z).norm()));
        }
        Ok(GPrimeReport {
            max_jump_violation: max_violation,
            decay_samples,
            points_checked,
        })
    }
}

/// Loop membership summary for a point.
#[derive(Clone, Debug)]
pub struct PointPlacement {
    pub inside_outer: bool,
    /// Indices `j` (0-based) of main loops containing the point.
    pub in_main: Vec<usize>,
    /// Indices `j` (1-based) of complementary loops containing the point.
    pub in_comp: Vec<usize>,
}

/// `[v_0 .. v_{n-1}, conj(v_0) .. conj(v_{n-1})]`.
fn moment_row(vals: &[Complex64]) -> Vec<Complex64> {
    let mut row = Vec::with_capacity(2 * vals.len());
    row.extend_from_slice(vals);
    row.extend(vals.iter().map(|v| v.conj()));
    row
}

/// Concatenate the arcs alternating main/comp into the contour polyline
/// `alpha_0 -> alpha_1 -> ... -> alpha_{2N+1}`.
fn contour_polyline(
    main_arcs: &[Path],
    comp_arcs: &[Path],
    scale: f64,
) -> Result<Vec<Complex64>, RhpError> {
    let mut verts: Vec<Complex64> = Vec::new();
    let push_path = |p: &Path, verts: &mut Vec<Complex64>| {
        let mut vs = vec![p.start()];
        for seg in p.segments() {
            vs.push(seg.end());
        }
        for v in vs {
            if verts
                .last()
                .map(|&l| (l - v).norm() > 1e-12 * scale)
                .unwrap_or(true)
            {
                verts.push(v);
            }
        }
    };
    for j in 0..main_arcs.len() {
        push_path(&main_arcs[j], &mut verts);
        if j < comp_arcs.len() {
            push_path(&comp_arcs[j], &mut verts);
        }
    }
    Ok(verts)
}

/// The upper piece `[z0, ..., top]` of a Schwarz-symmetric contour, for
/// building the split outer loop.
fn upper_piece(
    contour: &[Complex64],
    z0: Option<Complex64>,
    scale: f64,
) -> Result<Path, RhpError> {
    let z0 = z0.ok_or_else(|| {
        RhpError::Unsupported("a Schwarz-reflected f needs its z0 on the contour".into())
    })?;
    let idx = contour
        .iter()
        .position(|&v| (v - z0).norm() <= 1e-9 * scale)
        .ok_or_else(|| RhpError::Unsupported("contour must pass through z0".into()))?;
    let mut upper: Vec<Complex64> = contour[..=idx].iter().rev().copied().collect();
    if upper.len() < 2 {
        return Err(RhpError::Unsupported(
            "contour has no upper piece above z0".into(),
        ));
    }
    // Guard: everything strictly above the axis except the base point.
    for v in &upper[1..] {
        if v.im <= 0.0 {
            return Err(RhpError::Unsupported(
                "upper contour piece must stay in the upper half-plane".into(),
            ));
        }
    }
    upper[0] = Complex64::new(upper[0].re, 0.0);
    crate::contour::build_arc_chain(&upper, crate::contour::Interpolation::Polyline)
        .map_err(RhpError::from)
}

/// Build a context with straight-chord cuts, the common case for synthetic
/// configurations.
pub fn context_with_chords<'f>(
    alphas: Vec<Complex64>,
    schwarz: bool,
    f: &'f dyn JumpFunction,
    beta: Vec<f64>,
    opts: &ContextOptions,
) -> Result<RhpContext<'f>, RhpError> {
    let points = BranchPointSet::new(alphas, schwarz)?;
    let branch = RadicalBranch::with_chord_cuts(points)?;
    RhpContext::new(branch, Vec::new(), f, beta, opts)
}
