//! Newton solution of the modulation equations and smooth continuation of
//! branchpoints along parameter paths, with step control and sign-condition
//! monitoring.
//!
//! The Newton iteration uses the diagonal Jacobian
//! `dK(alpha_j)/dalpha_j = (D / 2 pi i) oint f' / ((zeta - alpha_j) R)`,
//! valid on the solution manifold; a finite-difference full Jacobian takes
//! over when the residual stalls. Loops are rebuilt from the current
//! branchpoints (and the current `z_0`) at every iterate.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::contour::{Path, QuadratureSpec, Segment};
use crate::jumps::JumpFunction;
use crate::linalg::CMatrix;
use crate::radical::{BranchPointSet, RadicalBranch, Side};
use crate::rhp::{ContextOptions, RhpContext, RhpError, RhpSolution, SolutionDiagnostics};

#[derive(Clone, Debug)]
pub enum SolveError {
    NoConvergence {
        residual_history: Vec<f64>,
        best_residual: f64,
    },
    Degeneracy {
        detail: String,
    },
    ContinuationStall {
        at_beta: Vec<f64>,
        accepted: usize,
    },
    Rhp(RhpError),
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::NoConvergence {
                residual_history,
                best_residual,
            } => write!(
                f,
                "Newton did not converge in {} iterations (best residual {best_residual:.3e})",
                residual_history.len()
            ),
            SolveError::Degeneracy { detail } => write!(f, "degeneracy: {detail}"),
            SolveError::ContinuationStall { at_beta, accepted } => write!(
                f,
                "continuation stalled at beta {at_beta:?} after {accepted} accepted steps"
            ),
            SolveError::Rhp(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SolveError {}

impl From<RhpError> for SolveError {
    fn from(e: RhpError) -> Self {
        SolveError::Rhp(e)
    }
}

/// Newton controls. `residual_tol` is absolute (callers usually scale it by
/// the configuration diameter).
#[derive(Clone, Copy, Debug)]
pub struct NewtonOptions {
    pub residual_tol: f64,
    pub max_iters: usize,
    pub damping: f64,
    pub max_backtracks: usize,
    /// Consecutive iterations with residual ratio above 0.9 before the
    /// finite-difference full Jacobian takes over.
    pub stall_iters: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            residual_tol: 1e-10,
            max_iters: 30,
            damping: 0.5,
            max_backtracks: 8,
            stall_iters: 5,
        }
    }
}

/// How the cut arcs are laid out for a given branchpoint vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArcLayout {
    /// Straight chords between consecutive branchpoint pairs.
    Chords,
    /// Schwarz-symmetric contour ordered top to bottom, with the middle
    /// main arc bent through `z_0(beta)` on the real axis. Requires an
    /// even genus and `alpha_{2N+1-j} = conj(alpha_j)`.
    SchwarzCross,
}

/// Problem description sufficient to rebuild geometry at any `(alpha, beta)`.
pub struct ProblemSetup<'f> {
    pub f: &'f dyn JumpFunction,
    pub layout: ArcLayout,
    pub schwarz_paired: bool,
    pub opts: ContextOptions,
}

impl<'f> ProblemSetup<'f> {
    pub fn new(f: &'f dyn JumpFunction, layout: ArcLayout, schwarz_paired: bool) -> Self {
        ProblemSetup {
            f,
            layout,
            schwarz_paired,
            opts: ContextOptions::default(),
        }
    }

    /// Build the evaluation context at the given branchpoints and
    /// parameters.
    pub fn context(&self, alphas: &[Complex64], beta: &[f64]) -> Result<RhpContext<'f>, SolveError> {
        let points = BranchPointSet::new(alphas.to_vec(), self.schwarz_paired)
            .map_err(|e| SolveError::Degeneracy {
                detail: format!("{e}"),
            })?;
        let branch = match self.layout {
            ArcLayout::Chords => RadicalBranch::with_chord_cuts(points).map_err(RhpError::from)?,
            ArcLayout::SchwarzCross => {
                let arcs = schwarz_cross_arcs(&points, self.f, beta)?;
                RadicalBranch::new(points, arcs).map_err(RhpError::from)?
            }
        };
        RhpContext::new(branch, Vec::new(), self.f, beta.to_vec(), &self.opts).map_err(Into::into)
    }

    /// Enforce the Schwarz pairing `alpha_{2N+1-j} = conj(alpha_j)` by
    /// averaging conjugate partners.
    pub fn project(&self, alphas: &mut [Complex64]) {
        if !self.schwarz_paired {
            return;
        }
        let n = alphas.len();
        for j in 0..n / 2 {
            let avg = 0.5 * (alphas[j] + alphas[n - 1 - j].conj());
            alphas[j] = avg;
            alphas[n - 1 - j] = avg.conj();
        }
    }
}

/// Cut arcs for a Schwarz-symmetric contour: straight chords except the
/// middle main arc, which bends through `z_0` on the real axis.
fn schwarz_cross_arcs(
    points: &BranchPointSet,
    f: &dyn JumpFunction,
    beta: &[f64],
) -> Result<Vec<Path>, SolveError> {
    let n = points.genus();
    if n % 2 != 0 {
        return Err(SolveError::Degeneracy {
            detail: "Schwarz-cross layout needs even genus".into(),
        });
    }
    let z0 = f.z0(beta).ok_or_else(|| SolveError::Degeneracy {
        detail: "Schwarz-cross layout needs a z0 on the contour".into(),
    })?;
    let alphas = points.alphas();
    let mid = n / 2; // index of the axis-crossing main arc
    let mut arcs = Vec::with_capacity(n + 1);
    for (j, &(a, b)) in points.main_pairs().iter().enumerate() {
        let arc = if j == mid {
            Path::open(vec![
                Segment::Line {
                    start: alphas[a],
                    end: z0,
                },
                Segment::Line {
                    start: z0,
                    end: alphas[b],
                },
            ])
        } else {
            Path::open(vec![Segment::Line {
                start: alphas[a],
                end: alphas[b],
            }])
        };
        arcs.push(arc.map_err(RhpError::from)?);
    }
    Ok(arcs)
}

/// Solve the modulation equations by damped Newton iteration from
/// `alpha_init`, rebuilding loops at every iterate.
pub fn newton_solve(
    setup: &ProblemSetup<'_>,
    alpha_init: &[Complex64],
    beta: &[f64],
    opts: &NewtonOptions,
) -> Result<RhpSolution, SolveError> {
    let mut alphas = alpha_init.to_vec();
    setup.project(&mut alphas);
    let mut history: Vec<f64> = Vec::new();
    let mut stall_count = 0usize;
    let mut best = f64::INFINITY;

    for _iter in 0..opts.max_iters {
        let ctx = setup.context(&alphas, beta)?;
        let residual = ctx.modulation_residual()?;
        let norm = residual.iter().map(|r| r.norm()).fold(0.0f64, f64::max);
        history.push(norm);
        best = best.min(norm);
        if norm <= opts.residual_tol {
            return finish_solution(setup, &ctx, alphas, beta, norm, history);
        }
        if history.len() >= 2 {
            let prev = history[history.len() - 2];
            if norm > 0.9 * prev {
                stall_count += 1;
            } else {
                stall_count = 0;
            }
        }

        let step: Vec<Complex64> = if stall_count >= opts.stall_iters {
            full_jacobian_step(setup, &alphas, beta, &residual)?
        } else {
            let jac = ctx.jacobian_diag()?;
            residual
                .iter()
                .zip(&jac)
                .map(|(r, j)| -r / j)
                .collect()
        };

        // Damped update with a distinctness guard.
        let mut lambda = 1.0f64;
        let mut accepted = false;
        for _ in 0..=opts.max_backtracks {
            let mut trial: Vec<Complex64> = alphas
                .iter()
                .zip(&step)
                .map(|(a, s)| a + s * lambda)
                .collect();
            setup.project(&mut trial);
            if min_separation(&trial) <= 1e-8 * diameter(&trial) {
                lambda *= opts.damping;
                continue;
            }
            let trial_ctx = match setup.context(&trial, beta) {
                Ok(c) => c,
                Err(_) => {
                    lambda *= opts.damping;
                    continue;
                }
            };
            let trial_norm = match trial_ctx.modulation_residual() {
                Ok(r) => r.iter().map(|v| v.norm()).fold(0.0f64, f64::max),
                Err(_) => {
                    lambda *= opts.damping;
                    continue;
                }
            };
            if trial_norm < norm {
                alphas = trial;
                accepted = true;
                break;
            }
            lambda *= opts.damping;
        }
        if !accepted {
            // Full-step fallback failed to decrease; count as a stall and
            // keep going with the FD Jacobian next round, or give up when
            // already there.
            if stall_count >= opts.stall_iters {
                return Err(SolveError::NoConvergence {
                    residual_history: history,
                    best_residual: best,
                });
            }
            stall_count = opts.stall_iters;
        }
    }
    // Final residual check after max_iters updates.
    let ctx = setup.context(&alphas, beta)?;
    let residual = ctx.modulation_residual()?;
    let norm = residual.iter().map(|r| r.norm()).fold(0.0f64, f64::max);
    history.push(norm);
    if norm <= opts.residual_tol {
        return finish_solution(setup, &ctx, alphas, beta, norm, history);
    }
    Err(SolveError::NoConvergence {
        residual_history: history,
        best_residual: best.min(norm),
    })
}

fn finish_solution(
    _setup: &ProblemSetup<'_>,
    ctx: &RhpContext<'_>,
    alphas: Vec<Complex64>,
    beta: &[f64],
    norm: f64,
    history: Vec<f64>,
) -> Result<RhpSolution, SolveError> {
    let (w, omega, im_residue) = ctx.solve_w_omega()?;
    Ok(RhpSolution {
        schwarz_paired: ctx.branch.points().schwarz_paired(),
        alphas,
        beta: beta.to_vec(),
        w,
        omega,
        residual_norm: norm,
        diagnostics: SolutionDiagnostics {
            im_residue,
            moment_cond: 0.0,
            newton_iterations: history.len(),
            residual_history: history,
        },
    })
}

fn full_jacobian_step(
    setup: &ProblemSetup<'_>,
    alphas: &[Complex64],
    beta: &[f64],
    residual: &[Complex64],
) -> Result<Vec<Complex64>, SolveError> {
    let n = alphas.len();
    let h = 1e-6 * diameter(alphas);
    let mut jac = CMatrix::zeros(n);
    for l in 0..n {
        let mut plus = alphas.to_vec();
        plus[l] += h;
        let mut minus = alphas.to_vec();
        minus[l] -= h;
        let rp = setup.context(&plus, beta)?.modulation_residual()?;
        let rm = setup.context(&minus, beta)?.modulation_residual()?;
        for j in 0..n {
            jac.set(j, l, (rp[j] - rm[j]) / (2.0 * h));
        }
    }
    let rhs: Vec<Complex64> = residual.iter().map(|r| -r).collect();
    jac.solve(&rhs).ok_or(SolveError::Degeneracy {
        detail: "singular finite-difference Jacobian".into(),
    })
}

fn min_separation(alphas: &[Complex64]) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..alphas.len() {
        for j in i + 1..alphas.len() {
            m = m.min((alphas[i] - alphas[j]).norm());
        }
    }
    m
}

fn diameter(alphas: &[Complex64]) -> f64 {
    let mut d = 0.0f64;
    for i in 0..alphas.len() {
        for j in i + 1..alphas.len() {
            d = d.max((alphas[i] - alphas[j]).norm());
        }
    }
    d.max(1e-300)
}

/// Controls for the coarse-grid initializer.
#[derive(Clone, Copy, Debug)]
pub struct ScanGrid {
    pub re_lo: f64,
    pub re_hi: f64,
    pub im_lo: f64,
    pub im_hi: f64,
    pub n_re: usize,
    pub n_im: usize,
}

impl Default for ScanGrid {
    fn default() -> Self {
        ScanGrid {
            re_lo: -3.0,
            re_hi: 3.0,
            im_lo: 0.05,
            im_hi: 2.5,
            n_re: 36,
            n_im: 24,
        }
    }
}

/// Dense-scan initializer for genus-0 Schwarz-symmetric problems: minimize
/// `sum |K(alpha_j)|^2` over candidates `alpha_0 = a + b i`,
/// `alpha_1 = conj(alpha_0)` on a coarse grid, with cheap quadrature.
pub fn scan_initializer_genus0(
    setup: &ProblemSetup<'_>,
    beta: &[f64],
    grid: &ScanGrid,
) -> Result<Vec<Complex64>, SolveError> {
    let coarse = ProblemSetup {
        f: setup.f,
        layout: setup.layout,
        schwarz_paired: setup.schwarz_paired,
        opts: ContextOptions {
            quad: QuadratureSpec::coarse(),
            ..setup.opts
        },
    };
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    for ire in 0..grid.n_re {
        let a = grid.re_lo + (grid.re_hi - grid.re_lo) * (ire as f64 + 0.5) / grid.n_re as f64;
        for iim in 0..grid.n_im {
            let b =
                grid.im_lo + (grid.im_hi - grid.im_lo) * (iim as f64 + 0.5) / grid.n_im as f64;
            let cand = vec![Complex64::new(a, b), Complex64::new(a, -b)];
            let Ok(ctx) = coarse.context(&cand, beta) else {
                continue;
            };
            let Ok(res) = ctx.modulation_residual() else {
                continue;
            };
            let score: f64 = res.iter().map(|r| r.norm_sqr()).sum();
            if best.as_ref().map(|(s, _)| score < *s).unwrap_or(true) {
                best = Some((score, cand));
            }
        }
    }
    best.map(|(_, cand)| cand).ok_or(SolveError::Degeneracy {
        detail: "dense scan found no admissible candidate".into(),
    })
}

/// One accepted or rejected continuation step.
#[derive(Clone, Copy, Debug)]
pub struct StepEvent {
    pub beta_k: f64,
    pub step: f64,
    pub accepted: bool,
    pub corrector_iterations: usize,
}

/// An ordered list of solutions along a parameter path.
#[derive(Clone, Debug)]
pub struct Trajectory {
    /// Index of the swept component of beta.
    pub component: usize,
    pub samples: Vec<RhpSolution>,
    pub step_log: Vec<StepEvent>,
    /// max |delta alpha| / |delta beta| over accepted steps.
    pub max_slope: f64,
}

/// Controls for [`continue_parameter`].
#[derive(Clone, Copy, Debug)]
pub struct ContinuationControls {
    /// Initial step in the swept parameter.
    pub initial_step: f64,
    /// Minimum step as a fraction of the total path length.
    pub min_step_frac: f64,
    pub grow_factor: f64,
    pub shrink_factor: f64,
    /// Grow the step after this many consecutive easy accepts.
    pub easy_accepts_to_grow: usize,
    /// Corrector iteration count at or below which a step counts as easy.
    pub easy_iters: usize,
    /// Largest |delta alpha| allowed per step.
    pub alpha_resolution: f64,
}

impl ContinuationControls {
    pub fn for_sweep(from: f64, to: f64, steps: usize) -> Self {
        let steps = steps.max(1);
        ContinuationControls {
            initial_step: (to - from) / steps as f64,
            min_step_frac: 1e-6,
            grow_factor: 1.5,
            shrink_factor: 0.5,
            easy_accepts_to_grow: 2,
            easy_iters: 2,
            alpha_resolution: f64::INFINITY,
        }
    }
}

/// Continue a converged solution along one beta component using the Euler
/// predictor from the perturbation formula and a Newton corrector, halving
/// the step on corrector failure and growing it after easy accepts.
pub fn continue_parameter(
    setup: &ProblemSetup<'_>,
    start: &RhpSolution,
    component: usize,
    target: f64,
    controls: &ContinuationControls,
    newton: &NewtonOptions,
) -> Result<Trajectory, (SolveError, Trajectory)> {
    let mut samples = vec![start.clone()];
    let mut step_log = Vec::new();
    let mut max_slope = 0.0f64;
    let total = target - start.beta[component];
    if total == 0.0 {
        return Ok(Trajectory {
            component,
            samples,
            step_log,
            max_slope,
        });
    }
    let dir = total.signum();
    let min_step = controls.min_step_frac * total.abs();
    let mut step = controls.initial_step.abs() * dir;
    let mut easy_streak = 0usize;

    loop {
        let current = samples.last().unwrap().clone();
        let here = current.beta[component];
        let remaining = target - here;
        if remaining.abs() <= 1e-12 * total.abs() {
            break;
        }
        if step.abs() > remaining.abs() {
            step = remaining;
        }

        let fail = |e: SolveError,
                    samples: &Vec<RhpSolution>,
                    step_log: &Vec<StepEvent>,
                    max_slope: f64| {
            let _ = e;
            (
                SolveError::ContinuationStall {
                    at_beta: samples.last().unwrap().beta.clone(),
                    accepted: samples.len() - 1,
                },
                Trajectory {
                    component,
                    samples: samples.clone(),
                    step_log: step_log.clone(),
                    max_slope,
                },
            )
        };

        // Euler predictor from the perturbation formula.
        let ctx = match setup.context(&current.alphas, &current.beta) {
            Ok(c) => c,
            Err(e) => return Err(fail(e, &samples, &step_log, max_slope)),
        };
        let slopes = match ctx.dalpha_dbeta(component) {
            Ok(s) => s,
            Err(e) => return Err(fail(e.into(), &samples, &step_log, max_slope)),
        };
        let mut predicted: Vec<Complex64> = current
            .alphas
            .iter()
            .zip(&slopes)
            .map(|(a, s)| a + s * step)
            .collect();
        setup.project(&mut predicted);
        let mut beta_next = current.beta.clone();
        beta_next[component] = here + step;

        match newton_solve(setup, &predicted, &beta_next, newton) {
            Ok(sol) => {
                let dalpha = sol
                    .alphas
                    .iter()
                    .zip(&current.alphas)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0f64, f64::max);
                if dalpha > controls.alpha_resolution && step.abs() > min_step {
                    step_log.push(StepEvent {
                        beta_k: here,
                        step,
                        accepted: false,
                        corrector_iterations: sol.diagnostics.newton_iterations,
                    });
                    step *= controls.shrink_factor;
                    easy_streak = 0;
                    continue;
                }
                max_slope = max_slope.max(dalpha / step.abs());
                let iters = sol.diagnostics.newton_iterations;
                step_log.push(StepEvent {
                    beta_k: here,
                    step,
                    accepted: true,
                    corrector_iterations: iters,
                });
                samples.push(sol);
                if iters <= controls.easy_iters + 1 {
                    easy_streak += 1;
                } else {
                    easy_streak = 0;
                }
                if easy_streak >= controls.easy_accepts_to_grow {
                    step *= controls.grow_factor;
                    easy_streak = 0;
                }
                if step.abs() > controls.initial_step.abs() * 8.0 {
                    step = controls.initial_step.abs() * 8.0 * dir;
                }
            }
            Err(e) => {
                step_log.push(StepEvent {
                    beta_k: here,
                    step,
                    accepted: false,
                    corrector_iterations: newton.max_iters,
                });
                if step.abs() * controls.shrink_factor < min_step {
                    return Err(fail(e, &samples, &step_log, max_slope));
                }
                step *= controls.shrink_factor;
                easy_streak = 0;
            }
        }
    }
    Ok(Trajectory {
        component,
        samples,
        step_log,
        max_slope,
    })
}

/// Sampling controls for the sign-condition check.
#[derive(Clone, Copy, Debug)]
pub struct SignGridSpec {
    pub points_per_arc: usize,
    /// Offset of the side curves from the main arcs, as a fraction of the
    /// loop standoff.
    pub side_offset_frac: f64,
    /// |Im h| tolerance on the main arcs.
    pub main_tol: f64,
    /// Required margin for the strict inequalities.
    pub margin: f64,
}

impl Default for SignGridSpec {
    fn default() -> Self {
        SignGridSpec {
            points_per_arc: 9,
            side_offset_frac: 0.5,
            main_tol: 1e-6,
            margin: 0.0,
        }
    }
}

/// A ray along which the extension sign condition `Im h > 0` is sampled.
#[derive(Clone, Copy, Debug)]
pub struct ExtensionRay {
    pub origin: Complex64,
    pub direction: Complex64,
    pub length: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, Default)]
pub struct SignReport {
    pub main_on_arc_pass: bool,
    pub main_sides_pass: bool,
    pub comp_pass: bool,
    pub extension_pass: bool,
    pub worst_main_on_arc: f64,
    /// Largest (most positive) Im h found beside a main arc.
    pub worst_side: f64,
    /// Smallest Im h found on complementary arcs.
    pub worst_comp: f64,
    /// Smallest Im h found on the extension rays.
    pub worst_extension: f64,
    pub worst_location: Complex64,
}

impl SignReport {
    pub fn all_pass(&self) -> bool {
        self.main_on_arc_pass && self.main_sides_pass && self.comp_pass && self.extension_pass
    }
}

/// Sample the sign conditions of `Im h` at a solution: zero on main arcs,
/// negative on both sides of them, positive on complementary arcs and on
/// the supplied extension rays.
pub fn sign_condition_check(
    setup: &ProblemSetup<'_>,
    solution: &RhpSolution,
    grid: &SignGridSpec,
    rays: &[ExtensionRay],
) -> Result<SignReport, SolveError> {
    let ctx = setup.context(&solution.alphas, &solution.beta)?;
    let w = &solution.w;
    let omega = &solution.omega;
    // For a Schwarz-paired problem Im h is antisymmetric across the real
    // axis, so the one-sided inequalities are meaningful on the upper
    // half-plane only; the mirrored halves follow with flipped sign.
    let upper_only = solution.schwarz_paired;
    let axis_guard = 1e-9 * ctx.scale();
    let mut report = SignReport {
        main_on_arc_pass: true,
        main_sides_pass: true,
        comp_pass: true,
        extension_pass: true,
        worst_side: f64::NEG_INFINITY,
        worst_comp: f64::INFINITY,
        worst_extension: f64::INFINITY,
        ..SignReport::default()
    };

    for (j, arc) in ctx.branch.cut_arcs().iter().enumerate() {
        let side_off = grid.side_offset_frac * ctx.loops.offsets.main[j];
        for seg in arc.segments() {
            for m in 1..=grid.points_per_arc {
                let t = m as f64 / (grid.points_per_arc + 1) as f64;
                let z = seg.point(t);
                let h_plus = ctx.eval_h_side(z, Side::Plus, w, omega)?;
                let im = h_plus.im.abs();
                if im > report.worst_main_on_arc {
                    report.worst_main_on_arc = im;
                    if im > grid.main_tol {
                        report.worst_location = z;
                    }
                }
                let tan = seg.derivative(t);
                let tan = tan / tan.norm();
                for sgn in [1.0f64, -1.0] {
                    let zs = z + Complex64::i() * tan * (sgn * side_off);
                    if upper_only && zs.im < axis_guard {
                        continue;
                    }
                    // Points squeezed outside a pinched outer loop are
                    // skipped; this is a sampling report, not a solve.
                    let h = match ctx.eval_h(zs, w, omega) {
                        Ok(h) => h,
                        Err(RhpError::Placement { .. }) => continue,
                        Err(e) => return Err(e.into()),
                    };
                    if h.im > report.worst_side {
                        report.worst_side = h.im;
                        if h.im >= -grid.margin {
                            report.worst_location = zs;
                        }
                    }
                }
            }
        }
    }
    report.main_on_arc_pass = report.worst_main_on_arc <= grid.main_tol;
    report.main_sides_pass = report.worst_side < -grid.margin;

    for arc in &ctx.comp_arcs {
        for seg in arc.segments() {
            for m in 1..=grid.points_per_arc {
                let t = m as f64 / (grid.points_per_arc + 1) as f64;
                let z = seg.point(t);
                if upper_only && z.im < axis_guard {
                    continue;
                }
                let h = ctx.eval_h(z, w, omega)?;
                if h.im < report.worst_comp {
                    report.worst_comp = h.im;
                    if h.im <= grid.margin {
                        report.worst_location = z;
                    }
                }
            }
        }
    }
    if ctx.genus() > 0 {
        report.comp_pass = report.worst_comp > grid.margin;
    } else {
        report.worst_comp = f64::INFINITY;
    }

    for ray in rays {
        let dir = ray.direction / ray.direction.norm();
        for m in 1..=ray.samples {
            let z = ray.origin + dir * (ray.length * m as f64 / ray.samples as f64);
            if upper_only && z.im < axis_guard {
                continue;
            }
            // Im h through h = 2g - f; g handles inside/outside placement.
            let g = ctx.eval_g(z, w, omega)?;
            let fv = ctx.f.eval(z, &solution.beta).map_err(RhpError::from)?;
            let h = 2.0 * g - fv;
            if h.im < report.worst_extension {
                report.worst_extension = h.im;
                if h.im <= grid.margin {
                    report.worst_location = z;
                }
            }
        }
    }
    if rays.is_empty() {
        report.worst_extension = f64::INFINITY;
    }
    report.extension_pass = report.worst_extension > grid.margin;
    Ok(report)
}
