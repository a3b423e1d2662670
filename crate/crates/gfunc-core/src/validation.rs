//! Independent oracles and validation suites: the closed-form toy integral,
//! finite-difference harnesses with observed convergence orders, and the
//! deformation/symmetry/jump batteries, runnable by name.
//!
//! Reports are bit-reproducible under a fixed quadrature spec; sampled
//! suites record their seed.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::continuation::{
    newton_solve, sign_condition_check, ArcLayout, ExtensionRay, NewtonOptions, ProblemSetup,
    SignGridSpec, SolveError,
};
use crate::contour::{build_arc_chain, build_loop, integrate, Interpolation, QuadratureSpec};
use crate::jumps::{JumpFunction, NlsJump, SyntheticPoly, ToyJump};
use crate::rhp::{context_with_chords, ContextOptions, RhpError};

pub mod rng {
    /// SplitMix64: a tiny deterministic generator for sampled property
    /// checks; the seed is recorded in every report that uses it.
    #[derive(Clone, Debug)]
    pub struct SplitMix64 {
        state: u64,
    }

    impl SplitMix64 {
        pub fn new(seed: u64) -> Self {
            SplitMix64 { state: seed }
        }

        pub fn next_u64(&mut self) -> u64 {
            self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = self.state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            z ^ (z >> 31)
        }

        /// Uniform in `[0, 1)`.
        pub fn next_f64(&mut self) -> f64 {
            (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
        }
    }

    #[cfg(test)]
    mod tests {
        use super::*;

        #[test]
        fn deterministic_and_in_range() {
            let mut a = SplitMix64::new(42);
            let mut b = SplitMix64::new(42);
            for _ in 0..100 {
                let x = a.next_f64();
                assert_eq!(x, b.next_f64());
                assert!((0.0..1.0).contains(&x));
            }
        }
    }
}

use rng::SplitMix64;

#[derive(Clone, Debug)]
pub enum ValidationError {
    UnknownSuite(String),
    Rhp(RhpError),
    Solve(String),
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationError::UnknownSuite(name) => write!(f, "unknown suite '{name}'"),
            ValidationError::Rhp(e) => write!(f, "{e}"),
            ValidationError::Solve(msg) => write!(f, "{msg}"),
        }
    }
}

impl core::error::Error for ValidationError {}

impl From<RhpError> for ValidationError {
    fn from(e: RhpError) -> Self {
        ValidationError::Rhp(e)
    }
}

impl From<SolveError> for ValidationError {
    fn from(e: SolveError) -> Self {
        ValidationError::Solve(format!("{e}"))
    }
}

/// Centered finite-difference controls.
#[derive(Clone, Debug)]
pub struct FdSpec {
    /// Decreasing positive steps.
    pub steps: Vec<f64>,
    pub richardson: bool,
}

impl Default for FdSpec {
    fn default() -> Self {
        FdSpec {
            steps: vec![1e-4, 1e-5],
            richardson: true,
        }
    }
}

/// One comparison of a computed quantity against an independent reference.
#[derive(Clone, Debug)]
pub struct OracleReport {
    pub name: String,
    pub computed: Complex64,
    pub reference: Complex64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Observed finite-difference convergence order, when applicable.
    pub observed_order: Option<f64>,
    /// Seed of the sample generator, when the check is sampled.
    pub seed: Option<u64>,
}

impl OracleReport {
    pub fn compare(
        name: &str,
        computed: Complex64,
        reference: Complex64,
        tolerance: f64,
    ) -> Self {
        let abs_err = (computed - reference).norm();
        let scale = reference.norm();
        // Near-zero references are judged absolutely.
        let rel_err = if scale > 1e-9 { abs_err / scale } else { abs_err };
        OracleReport {
            name: name.to_string(),
            computed,
            reference,
            abs_err,
            rel_err,
            tolerance,
            pass: rel_err <= tolerance,
            observed_order: None,
            seed: None,
        }
    }

    fn with_order(mut self, order: f64) -> Self {
        self.observed_order = Some(order);
        self
    }

    fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// Richardson-extrapolated centered difference of `base` at `center`,
/// compared against `formula`. The observed order is estimated from the
/// two largest steps and reported even on pass.
pub fn fd_check<F>(
    name: &str,
    formula: Complex64,
    center: f64,
    base: F,
    spec: &FdSpec,
    tolerance: f64,
) -> Result<OracleReport, ValidationError>
where
    F: Fn(f64) -> Result<Complex64, ValidationError>,
{
    assert!(spec.steps.len() >= 2, "need at least two steps");
    let mut diffs = Vec::with_capacity(spec.steps.len());
    for &h in &spec.steps {
        let plus = base(center + h)?;
        let minus = base(center - h)?;
        diffs.push((h, (plus - minus) / (2.0 * h)));
    }
    let computed = if spec.richardson {
        let (h1, d1) = diffs[0];
        let (h2, d2) = diffs[1];
        let r2 = (h1 / h2) * (h1 / h2);
        (d2 * r2 - d1) / (r2 - 1.0)
    } else {
        diffs.last().unwrap().1
    };
    let e1 = (diffs[0].1 - formula).norm();
    let e2 = (diffs[1].1 - formula).norm();
    let order = if e2 > 1e-300 && e1 > 1e-300 {
        (e1 / e2).ln() / (diffs[0].0 / diffs[1].0).ln()
    } else {
        f64::INFINITY
    };
    Ok(OracleReport::compare(name, computed, formula, tolerance).with_order(order))
}

/// The closed-form oracle: quadrature of the toy `c (z - z0) log(z - z0)`
/// along `[z1, z0] u [z0, z2]` against its closed form, and the centered
/// difference of that integral in `mu` against both the closed-form
/// derivative and the quadrature of `df/dmu`.
pub fn appendix_i1(
    toy: &ToyJump,
    z1: Complex64,
    z2: Complex64,
    mu: f64,
    quad: &QuadratureSpec,
    fd: &FdSpec,
) -> Result<Vec<OracleReport>, ValidationError> {
    let quad_i1 = |m: f64| -> Result<Complex64, ValidationError> {
        let z0 = toy.z0_of(m);
        let path = build_arc_chain(&[z1, z0, z2], Interpolation::Polyline)
            .map_err(|e| ValidationError::Rhp(RhpError::Geometry(e)))?;
        integrate(&path, quad, |z| toy.eval(z, &[m]).unwrap_or(Complex64::new(f64::NAN, 0.0)))
            .map_err(|e| ValidationError::Rhp(RhpError::Quad(e)))
    };

    let value = quad_i1(mu)?;
    let closed = toy.closed_i1(z1, z2, mu);
    let rep_value = OracleReport::compare("appendix-i1-quadrature", value, closed, 1e-10);

    let dmu_closed = toy.closed_di1_dmu(z1, z2, mu);
    let mut rep_deriv = fd_check(
        "appendix-i1-mu-derivative",
        dmu_closed,
        mu,
        quad_i1,
        fd,
        1e-6,
    )?;
    // The derivative must also equal the quadrature of df/dmu on the same
    // path (differentiation under the integral sign); fold the worse of
    // the two deviations into the report.
    let z0 = toy.z0_of(mu);
    let path = build_arc_chain(&[z1, z0, z2], Interpolation::Polyline)
        .map_err(|e| ValidationError::Rhp(RhpError::Geometry(e)))?;
    let int_fmu = integrate(&path, quad, |z| {
        toy.dbeta(z, &[mu], 0).unwrap_or(Complex64::new(f64::NAN, 0.0))
    })
    .map_err(|e| ValidationError::Rhp(RhpError::Quad(e)))?;
    let dev = (int_fmu - dmu_closed).norm() / dmu_closed.norm().max(1e-300);
    if dev > rep_deriv.rel_err {
        rep_deriv.rel_err = dev;
        rep_deriv.abs_err = (int_fmu - dmu_closed).norm();
        rep_deriv.pass = dev <= rep_deriv.tolerance;
    }
    Ok(vec![rep_value, rep_deriv])
}

/// Configuration shared by the named suites.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub quad: QuadratureSpec,
    pub seed: u64,
    /// Tolerance for quadrature-limited comparisons.
    pub tol_quad: f64,
    /// Tolerance for finite-difference-limited comparisons.
    pub tol_fd: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            quad: QuadratureSpec::default(),
            seed: 0x5eed_cafe,
            tol_quad: 1e-8,
            tol_fd: 1e-5,
        }
    }
}

pub const SUITE_NAMES: &[&str] = &[
    "cauchy",
    "deformation",
    "schwarz",
    "appendix",
    "fd-all",
    "jumps",
    "gprime",
    "signs",
];

/// Run the named suites and aggregate their reports. Unknown names are a
/// usage error.
pub fn suite_run(
    names: &[&str],
    cfg: &SuiteConfig,
) -> Result<Vec<OracleReport>, ValidationError> {
    let mut out = Vec::new();
    for &name in names {
        match name {
            "cauchy" => out.extend(suite_cauchy(cfg)?),
            "deformation" => out.extend(suite_deformation(cfg)?),
            "schwarz" => out.extend(suite_schwarz(cfg)?),
            "appendix" => out.extend(suite_appendix(cfg)?),
            "fd-all" => out.extend(suite_fd_all(cfg)?),
            "jumps" => out.extend(suite_jumps(cfg)?),
            "gprime" => out.extend(suite_gprime(cfg)?),
            "signs" => out.extend(suite_signs(cfg)?),
            other => return Err(ValidationError::UnknownSuite(other.to_string())),
        }
    }
    Ok(out)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// f = z^3 + c2 z^2 + c1 z with K(z) = (z - a0)(z - a1) exactly.
fn manufactured_cubic(a0: Complex64, a1: Complex64) -> SyntheticPoly {
    let e1 = a0 + a1;
    let e2 = a0 * a1;
    SyntheticPoly::fixed(&[
        c(0.0, 0.0),
        1.5 * e2 + 0.375 * e1 * e1,
        -1.5 * e1,
        c(1.0, 0.0),
    ])
}

fn nls_closed_form(mu: f64, x: f64) -> Complex64 {
    Complex64::new(0.5 * mu * x.tanh(), 1.0 / x.cosh())
}

fn suite_cauchy(cfg: &SuiteConfig) -> Result<Vec<OracleReport>, ValidationError> {
    let arc = build_arc_chain(&[c(-1.0, 0.0), c(1.0, 0.0)], Interpolation::Polyline)
        .map_err(|e| ValidationError::Rhp(RhpError::Geometry(e)))?;
    let lp = build_loop(&arc, 0.5, &[]).map_err(|e| ValidationError::Rhp(RhpError::Geometry(e)))?;
    let inside = integrate(&lp, &cfg.quad, |z| 1.0 / (z - c(0.3, 0.1)))
        .map_err(|e| ValidationError::Rhp(RhpError::Quad(e)))?;
    let outside = integrate(&lp, &cfg.quad, |z| 1.0 / (z - c(2.5, 1.5)))
        .map_err(|e| ValidationError::Rhp(RhpError::Quad(e)))?;
    Ok(vec![
        OracleReport::compare(
            "cauchy-enclosed-pole",
            inside,
            c(0.0, -core::f64::consts::TAU),
            1e-10,
        ),
        OracleReport::compare("cauchy-external-pole", outside, c(0.0, 0.0), 1e-10),
    ])
}

fn suite_deformation(cfg: &SuiteConfig) -> Result<Vec<OracleReport>, ValidationError> {
    let mut reports = Vec::new();
    // Genus 0, synthetic.
    let a0 = c(-0.4, 0.8);
    let a1 = c(0.7, -0.3);
    let f = manufactured_cubic(a0, a1);
    let mk = |offset_factor: f64, outer_factor: f64| {
        context_with_chords(
            vec![a0, a1],
            false,
            &f,
            vec![],
            &ContextOptions {
                offset_factor,
                outer_factor,
                quad: cfg.quad,
            },
        )
    };
    let ctx1 = mk(0.15, 4.0)?;
    let ctx2 = mk(0.30, 2.0)?;
    let z = {
        let seg = &ctx2.branch.cut_arcs()[0].segments()[0];
        let mid = seg.point(0.5);
        let nrm = Complex64::i() * seg.derivative(0.5) / seg.derivative(0.5).norm();
        mid + nrm * (1.3 * ctx2.loops.offsets.main[0])
    };
    reports.push(OracleReport::compare(
        "deformation-genus0-K",
        ctx1.eval_k(z)?,
        ctx2.eval_k(z)?,
        cfg.tol_quad,
    ));

    // Genus 2, Schwarz NLS configuration.
    let nls = NlsJump;
    let mu = 2.2;
    let ups = [c(0.25, 1.55), c(0.5, 1.05), c(0.95, 0.5)];
    let alphas = vec![ups[0], ups[1], ups[2], ups[2].conj(), ups[1].conj(), ups[0].conj()];
    let setup = ProblemSetup {
        f: &nls,
        layout: ArcLayout::SchwarzCross,
        schwarz_paired: true,
        opts: ContextOptions {
            quad: cfg.quad,
            ..ContextOptions::default()
        },
    };
    let beta = [mu, 0.8, 0.05];
    let ctx1 = setup.context(&alphas, &beta)?;
    let setup2 = ProblemSetup {
        opts: ContextOptions {
            offset_factor: 0.21,
            quad: cfg.quad,
            ..ContextOptions::default()
        },
        ..setup
    };
    let ctx2 = setup2.context(&alphas, &beta)?;
    reports.push(OracleReport::compare(
        "deformation-genus2-D",
        ctx1.eval_d(),
        ctx2.eval_d(),
        cfg.tol_quad,
    ));
    for n in 0..ctx1.genus() {
        reports.push(OracleReport::compare(
            &format!("deformation-genus2-comp-moment-{n}"),
            ctx1.moments().comp[0][n],
            ctx2.moments().comp[0][n],
            cfg.tol_quad,
        ));
        reports.push(OracleReport::compare(
            &format!("deformation-genus2-f-moment-{n}"),
            ctx1.moments().f_mom[n],
            ctx2.moments().f_mom[n],
            cfg.tol_quad,
        ));
    }
    Ok(reports)
}

fn suite_schwarz(cfg: &SuiteConfig) -> Result<Vec<OracleReport>, ValidationError> {
    let mut rng = SplitMix64::new(cfg.seed);
    let nls = NlsJump;
    let beta = [2.2, 1.0, 0.0];
    let a = nls_closed_form(2.2, 1.0);
    let setup = ProblemSetup {
        f: &nls,
        layout: ArcLayout::SchwarzCross,
        schwarz_paired: true,
        opts: ContextOptions {
            quad: cfg.quad,
            ..ContextOptions::default()
        },
    };
    let ctx = setup.context(&[a, a.conj()], &beta)?;
    // Radical symmetry at sampled points.
    let mut worst_r = 0.0f64;
    let mut checked = 0;
    while checked < 100 {
        let z = c(rng.next_f64() * 5.0 - 2.0, rng.next_f64() * 4.0 - 2.0);
        let (Ok(rv), Ok(rc)) = (ctx.branch.eval(z), ctx.branch.eval(z.conj())) else {
            continue;
        };
        worst_r = worst_r.max((rc - rv.conj()).norm() / rv.norm().max(1.0));
        checked += 1;
    }
    // f reflection identity at sampled points.
    let mut worst_f = 0.0f64;
    let mut checked = 0;
    while checked < 60 {
        let z = c(rng.next_f64() * 4.0 - 2.0, rng.next_f64() * 2.0 + 0.05);
        let (Ok(up), Ok(dn)) = (nls.eval(z, &beta), nls.eval(z.conj(), &beta)) else {
            continue;
        };
        worst_f = worst_f.max((dn - up.conj()).norm() / up.norm().max(1.0));
        checked += 1;
    }
    // K symmetry at one admissible conjugate pair.
    let seg = &ctx.branch.cut_arcs()[0].segments()[0];
    let mid = seg.point(0.5);
    let nrm = Complex64::i() * seg.derivative(0.5) / seg.derivative(0.5).norm();
    let z = mid + nrm * (1.3 * ctx.loops.offsets.main[0]);
    let k1 = ctx.eval_k(z)?;
    let k2 = ctx.eval_k(z.conj())?;
    Ok(vec![
        OracleReport::compare(
            "schwarz-radical",
            Complex64::new(worst_r, 0.0),
            c(0.0, 0.0),
            1e-11,
        )
        .with_seed(cfg.seed),
        OracleReport::compare(
            "schwarz-jump-function",
            Complex64::new(worst_f, 0.0),
            c(0.0, 0.0),
            1e-12,
        )
        .with_seed(cfg.seed),
        OracleReport::compare("schwarz-K", k2, k1.conj(), 1e-9).with_seed(cfg.seed),
    ])
}

fn suite_appendix(cfg: &SuiteConfig) -> Result<Vec<OracleReport>, ValidationError> {
    let toy = ToyJump {
        c0: c(1.0, 0.0),
        c1: c(0.0, 0.0),
        z00: c(0.0, 0.0),
        z01: c(0.1, 0.05),
    };
    appendix_i1(
        &toy,
        c(-1.0, 0.0),
        c(1.0, 0.0),
        1.0,
        &cfg.quad,
        &FdSpec::default(),
    )
}

fn suite_fd_all(cfg: &SuiteConfig) -> Result<Vec<OracleReport>, ValidationError> {
    let mut reports = Vec::new();
    let nls = NlsJump;
    let setup = ProblemSetup {
        f: &nls,
        layout: ArcLayout::SchwarzCross,
        schwarz_paired: true,
        opts: ContextOptions {
            quad: cfg.quad,
            ..ContextOptions::default()
        },
    };
    let beta = [2.3, 0.9, 0.04];
    let newton = NewtonOptions::default();
    let a0 = nls_closed_form(beta[0], beta[1]);
    let sol = newton_solve(&setup, &[a0, a0.conj()], &beta, &newton)?;
    let ctx = setup.context(&sol.alphas, &beta)?;

    // dK(alpha_0)/dbeta_k against finite differences at fixed branchpoints.
    for (k, name) in [(0usize, "fd-dK-dmu"), (1, "fd-dK-dx"), (2, "fd-dK-dt")] {
        let formula = ctx.dk_dbeta(k)?[0];
        let alphas = sol.alphas.clone();
        let base = |v: f64| -> Result<Complex64, ValidationError> {
            let mut b = beta;
            b[k] = v;
            let cb = setup.context(&alphas, &b)?;
            Ok(cb.modulation_residual()?[0])
        };
        let spec = FdSpec {
            steps: vec![1e-3, 5e-4],
            richardson: true,
        };
        reports.push(fd_check(name, formula, beta[k], base, &spec, cfg.tol_fd)?);
    }

    // dalpha/dbeta_k along the solution branch.
    for (k, name) in [
        (0usize, "fd-dalpha-dmu"),
        (1, "fd-dalpha-dx"),
        (2, "fd-dalpha-dt"),
    ] {
        let formula = ctx.dalpha_dbeta(k)?[0];
        let base = |v: f64| -> Result<Complex64, ValidationError> {
            let mut b = beta;
            b[k] = v;
            Ok(newton_solve(&setup, &sol.alphas, &b, &newton)?.alphas[0])
        };
        let spec = FdSpec {
            steps: vec![2e-4, 1e-4],
            richardson: true,
        };
        reports.push(fd_check(name, formula, beta[k], base, &spec, 1e-4)?);
    }

    // dh/dbeta at an interior point, fixed constants.
    let seg = &ctx.branch.cut_arcs()[0].segments()[0];
    let mid = seg.point(0.5);
    let nrm = Complex64::i() * seg.derivative(0.5) / seg.derivative(0.5).norm();
    let z = mid + nrm * (1.3 * ctx.loops.offsets.main[0]);
    for (k, name) in [(0usize, "fd-dh-dmu"), (1, "fd-dh-dx")] {
        let formula = ctx.dh_dbeta(z, k)?;
        let alphas = sol.alphas.clone();
        let (w, omega) = (sol.w.clone(), sol.omega.clone());
        let base = |v: f64| -> Result<Complex64, ValidationError> {
            let mut b = beta;
            b[k] = v;
            let cb = setup.context(&alphas, &b)?;
            Ok(cb.eval_h_bracket(z, &w, &omega)?)
        };
        let spec = FdSpec {
            steps: vec![1e-3, 5e-4],
            richardson: true,
        };
        reports.push(fd_check(name, formula, beta[k], base, &spec, cfg.tol_fd)?);
    }

    // dOmega/dmu and dW/dmu on the genus-2 Schwarz NLS configuration.
    let ups = [c(0.25, 1.55), c(0.5, 1.05), c(0.95, 0.5)];
    let alphas6 = vec![ups[0], ups[1], ups[2], ups[2].conj(), ups[1].conj(), ups[0].conj()];
    let beta2 = [2.2, 0.8, 0.05];
    let ctx2 = setup.context(&alphas6, &beta2)?;
    let (domega, _) = ctx2.domega_dbeta(0)?;
    let (dw, _) = ctx2.dw_dbeta(0)?;
    for j in 0..2 {
        let base_omega = |v: f64| -> Result<Complex64, ValidationError> {
            let cb = setup.context(&alphas6, &[v, beta2[1], beta2[2]])?;
            let (_, om, _) = cb.solve_w_omega()?;
            Ok(Complex64::new(om[j], 0.0))
        };
        let spec = FdSpec {
            steps: vec![2e-4, 1e-4],
            richardson: true,
        };
        reports.push(fd_check(
            &format!("fd-dOmega{}-dmu", j + 1),
            Complex64::new(domega[j], 0.0),
            beta2[0],
            base_omega,
            &spec,
            cfg.tol_fd,
        )?);
        let base_w = |v: f64| -> Result<Complex64, ValidationError> {
            let cb = setup.context(&alphas6, &[v, beta2[1], beta2[2]])?;
            let (wv, _, _) = cb.solve_w_omega()?;
            Ok(Complex64::new(wv[j + 1], 0.0))
        };
        reports.push(fd_check(
            &format!("fd-dW{}-dmu", j + 1),
            Complex64::new(dw[j], 0.0),
            beta2[0],
            base_w,
            &spec,
            cfg.tol_fd,
        )?);
    }
    Ok(reports)
}

fn suite_jumps(cfg: &SuiteConfig) -> Result<Vec<OracleReport>, ValidationError> {
    let nls = NlsJump;
    let setup = ProblemSetup {
        f: &nls,
        layout: ArcLayout::SchwarzCross,
        schwarz_paired: true,
        opts: ContextOptions {
            quad: cfg.quad,
            ..ContextOptions::default()
        },
    };
    let beta = [2.2, 1.0, 0.0];
    let a = nls_closed_form(2.2, 1.0);
    let sol = newton_solve(&setup, &[a, a.conj()], &beta, &NewtonOptions::default())?;
    let ctx = setup.context(&sol.alphas, &beta)?;
    let mut worst = 0.0f64;
    for arc in ctx.branch.cut_arcs() {
        for seg in arc.segments() {
            for m in 1..=5 {
                let t = m as f64 / 6.0;
                let z = seg.point(t);
                let nrm = Complex64::i() * seg.derivative(t) / seg.derivative(t).norm();
                let fv = nls.eval(z, &beta).map_err(RhpError::from)?;
                let scale = ctx.scale();
                let mut g_sum = Complex64::new(0.0, 0.0);
                for sgn in [1.0, -1.0] {
                    let g = |d: f64| ctx.eval_g(z + nrm * (sgn * d * scale), &sol.w, &sol.omega);
                    let (g1, g2, g3) = (g(4e-4)?, g(2e-4)?, g(1e-4)?);
                    g_sum += (4.0 * (2.0 * g3 - g2) - (2.0 * g2 - g1)) / 3.0;
                }
                worst = worst.max((g_sum - fv - sol.w[0]).norm());
            }
        }
    }
    Ok(vec![OracleReport::compare(
        "jumps-main-arc",
        Complex64::new(worst, 0.0),
        c(0.0, 0.0),
        1e-7,
    )])
}

fn suite_gprime(cfg: &SuiteConfig) -> Result<Vec<OracleReport>, ValidationError> {
    let nls = NlsJump;
    let setup = ProblemSetup {
        f: &nls,
        layout: ArcLayout::SchwarzCross,
        schwarz_paired: true,
        opts: ContextOptions {
            quad: cfg.quad,
            ..ContextOptions::default()
        },
    };
    let beta = [2.2, 1.0, 0.0];
    let a = nls_closed_form(2.2, 1.0);
    let sol = newton_solve(&setup, &[a, a.conj()], &beta, &NewtonOptions::default())?;
    let ctx = setup.context(&sol.alphas, &beta)?;
    let report = ctx.gprime_jump_check(&sol.w, &sol.omega, 3)?;
    let decay_ok = {
        let (_, v1) = report.decay_samples[0];
        let (_, v2) = report.decay_samples[1];
        v2 < 10.0 * v1.max(1e-6)
    };
    Ok(vec![
        OracleReport::compare(
            "gprime-jump",
            Complex64::new(report.max_jump_violation, 0.0),
            c(0.0, 0.0),
            1e-6,
        ),
        OracleReport::compare(
            "gprime-decay",
            Complex64::new(if decay_ok { 0.0 } else { 1.0 }, 0.0),
            c(0.0, 0.0),
            0.5,
        ),
    ])
}

fn suite_signs(cfg: &SuiteConfig) -> Result<Vec<OracleReport>, ValidationError> {
    let nls = NlsJump;
    let setup = ProblemSetup {
        f: &nls,
        layout: ArcLayout::SchwarzCross,
        schwarz_paired: true,
        opts: ContextOptions {
            quad: cfg.quad,
            ..ContextOptions::default()
        },
    };
    let beta = [2.2, 1.0, 0.0];
    let a = nls_closed_form(2.2, 1.0);
    let sol = newton_solve(&setup, &[a, a.conj()], &beta, &NewtonOptions::default())?;
    let grid = SignGridSpec {
        main_tol: 0.05,
        ..SignGridSpec::default()
    };
    let rays = [ExtensionRay {
        origin: sol.alphas[0],
        direction: c(-1.0, 0.4),
        length: 3.0,
        samples: 8,
    }];
    let report = sign_condition_check(&setup, &sol, &grid, &rays)?;
    Ok(vec![OracleReport::compare(
        "signs-genus0-valid-regime",
        Complex64::new(if report.all_pass() { 0.0 } else { 1.0 }, 0.0),
        c(0.0, 0.0),
        0.5,
    )])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_usage_error() {
        let res = suite_run(&["bogus"], &SuiteConfig::default());
        assert!(matches!(res, Err(ValidationError::UnknownSuite(_))));
    }

    #[test]
    fn cauchy_suite_passes() {
        let reports = suite_run(&["cauchy"], &SuiteConfig::default()).unwrap();
        assert_eq!(reports.len(), 2);
        for r in &reports {
            assert!(r.pass, "{}: rel err {:.3e}", r.name, r.rel_err);
        }
    }

    #[test]
    fn appendix_suite_passes() {
        let reports = suite_run(&["appendix"], &SuiteConfig::default()).unwrap();
        assert_eq!(reports.len(), 2);
        for r in &reports {
            assert!(r.pass, "{}: rel err {:.3e}", r.name, r.rel_err);
        }
    }

    #[test]
    fn appendix_values_match_spec_examples() {
        // c = 1, z0 = 0: I1 = -i pi / 2 through quadrature.
        let toy = ToyJump {
            c0: Complex64::new(1.0, 0.0),
            c1: Complex64::new(0.0, 0.0),
            z00: Complex64::new(0.0, 0.0),
            z01: Complex64::new(0.0, 0.0),
        };
        let reports = appendix_i1(
            &toy,
            Complex64::new(-1.0, 0.0),
            Complex64::new(1.0, 0.0),
            0.7,
            &QuadratureSpec::default(),
            &FdSpec::default(),
        )
        .unwrap();
        let expect = Complex64::new(0.0, -core::f64::consts::FRAC_PI_2);
        assert!((reports[0].computed - expect).norm() < 1e-11);
        assert!(reports[0].pass);
        // Zero c: I1 = 0 exactly.
        let zero = ToyJump {
            c0: Complex64::new(0.0, 0.0),
            c1: Complex64::new(0.0, 0.0),
            z00: Complex64::new(0.0, 0.0),
            z01: Complex64::new(1.0, 0.0),
        };
        assert_eq!(
            zero.closed_i1(Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0), 0.3),
            Complex64::new(0.0, 0.0)
        );
    }

    #[test]
    fn fd_check_reports_order() {
        // d/dx of x^3 at 1 with exact formula 3: centered differences are
        // second order.
        let rep = fd_check(
            "cubic",
            Complex64::new(3.0, 0.0),
            1.0,
            |x| Ok(Complex64::new(x * x * x, 0.0)),
            &FdSpec::default(),
            1e-8,
        )
        .unwrap();
        assert!(rep.pass);
        let order = rep.observed_order.unwrap();
        assert!((order - 2.0).abs() < 0.2, "observed order {order}");
    }

    #[test]
    fn fd_check_zero_function_exact() {
        let rep = fd_check(
            "zero",
            Complex64::new(0.0, 0.0),
            0.4,
            |_| Ok(Complex64::new(0.0, 0.0)),
            &FdSpec::default(),
            1e-12,
        )
        .unwrap();
        assert!(rep.pass);
        assert_eq!(rep.abs_err, 0.0);
    }
}
