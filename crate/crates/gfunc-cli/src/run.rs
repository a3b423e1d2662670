//! Command implementations. Every command returns a [`CommandOutcome`]
//! holding the exit code, a self-contained run record, and the files to
//! write, so tests can drive them without touching the filesystem.

use crate::config::{ProblemKind, RunConfig, UsageError};
use crate::output;
use gfunc_core::continuation::{
    continue_parameter, newton_solve, scan_initializer_genus0, sign_condition_check, ArcLayout,
    ContinuationControls, ExtensionRay, NewtonOptions, ProblemSetup, ScanGrid, SignGridSpec,
    SolveError, Trajectory,
};
use gfunc_core::jumps::{JumpFunction, NlsJump, SyntheticPoly, ToyJump};
use gfunc_core::rhp::{ContextOptions, RhpSolution};
use gfunc_core::validation::{
    appendix_i1, fd_check, suite_run, FdSpec, OracleReport, SuiteConfig, ValidationError,
};
use gfunc_core::Complex64;
use serde_json::{json, Value};

pub type ExitCode = i32;

#[derive(Debug)]
pub struct CommandOutcome {
    pub exit: ExitCode,
    pub record: Value,
    /// `(file name, contents)` pairs to write under the output directory.
    pub files: Vec<(String, String)>,
    /// One human line per check, already formatted.
    pub summary: Vec<String>,
}

fn record_skeleton(command: &str, cfg: &RunConfig) -> Value {
    let timestamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    json!({
        "tool": {"name": "gfunc", "version": env!("CARGO_PKG_VERSION")},
        "command": command,
        "timestamp_unix": timestamp,
        "config": serde_json::to_value(cfg).expect("config serializes"),
    })
}

/// The jump function instance owned for the duration of a command.
enum Instance {
    Nls(NlsJump),
    Synthetic(SyntheticPoly),
    Toy(ToyJump),
}

impl Instance {
    fn from_config(cfg: &RunConfig) -> Result<Self, UsageError> {
        match cfg.problem {
            ProblemKind::NlsGenus0 | ProblemKind::NlsGenus2 => Ok(Instance::Nls(NlsJump)),
            ProblemKind::Synthetic => {
                let coeffs = cfg.synthetic_coeffs.as_ref().ok_or_else(|| {
                    UsageError("synthetic problem needs synthetic_coeffs".into())
                })?;
                let coeffs: Vec<Complex64> = coeffs
                    .iter()
                    .map(|&[re, im]| Complex64::new(re, im))
                    .collect();
                Ok(Instance::Synthetic(SyntheticPoly::fixed(&coeffs)))
            }
            ProblemKind::AppendixToy => Ok(Instance::Toy(ToyJump {
                c0: Complex64::new(1.0, 0.0),
                c1: Complex64::new(0.0, 0.0),
                z00: Complex64::new(0.0, 0.0),
                z01: Complex64::new(0.1, 0.05),
            })),
        }
    }

    fn jump(&self) -> &dyn JumpFunction {
        match self {
            Instance::Nls(f) => f,
            Instance::Synthetic(f) => f,
            Instance::Toy(f) => f,
        }
    }

    fn setup<'a>(&'a self, cfg: &RunConfig) -> ProblemSetup<'a> {
        let schwarz = matches!(
            cfg.problem,
            ProblemKind::NlsGenus0 | ProblemKind::NlsGenus2
        );
        let layout = if schwarz {
            ArcLayout::SchwarzCross
        } else {
            ArcLayout::Chords
        };
        ProblemSetup {
            f: self.jump(),
            layout,
            schwarz_paired: schwarz,
            opts: ContextOptions {
                offset_factor: cfg.loop_offset_factor,
                outer_factor: cfg.outer_factor,
                quad: cfg.quadrature.to_spec(),
            },
        }
    }
}

fn newton_options(cfg: &RunConfig) -> NewtonOptions {
    NewtonOptions {
        residual_tol: cfg.newton.residual_tol,
        max_iters: cfg.newton.max_iters,
        ..NewtonOptions::default()
    }
}

/// Resolve starting branchpoints: configured values, or the dense scan for
/// the genus-0 NLS problem.
fn initial_alphas(
    cfg: &RunConfig,
    setup: &ProblemSetup<'_>,
    beta: &[f64],
) -> Result<(Vec<Complex64>, &'static str), UsageError> {
    if let Some(alphas) = cfg.initial_alphas_complex() {
        let expected = match cfg.problem {
            ProblemKind::NlsGenus0 => 2,
            ProblemKind::NlsGenus2 => 6,
            _ => alphas.len().max(2),
        };
        if alphas.len() != expected || alphas.len() < 2 || alphas.len() % 2 != 0 {
            return Err(UsageError(format!(
                "initial_alphas must hold {expected} points for this problem"
            )));
        }
        return Ok((alphas, "provided"));
    }
    match cfg.problem {
        ProblemKind::NlsGenus0 => {
            let init = scan_initializer_genus0(setup, beta, &ScanGrid::default())
                .map_err(|e| UsageError(format!("scan initializer failed: {e}")))?;
            Ok((init, "scan"))
        }
        ProblemKind::NlsGenus2 => Err(UsageError(
            "nls-genus2 needs initial_alphas (6 branchpoints)".into(),
        )),
        _ => Err(UsageError("this problem needs initial_alphas".into())),
    }
}

fn usage_outcome(command: &str, cfg: &RunConfig, err: &UsageError) -> CommandOutcome {
    let mut record = record_skeleton(command, cfg);
    record["error"] = json!(format!("{err}"));
    CommandOutcome {
        exit: crate::EXIT_USAGE,
        record,
        files: Vec::new(),
        summary: vec![format!("{err}")],
    }
}

fn rays_from_config(cfg: &RunConfig, sol: &RhpSolution) -> Vec<ExtensionRay> {
    if cfg.extension_rays.is_empty() {
        // Default rays leave the outermost branchpoints away from the
        // contour; for Schwarz problems the upper one is the meaningful one.
        let mut rays = Vec::new();
        if let Some(&top) = sol.alphas.first() {
            rays.push(ExtensionRay {
                origin: top,
                direction: Complex64::new(-1.0, 0.4),
                length: 3.0,
                samples: 8,
            });
        }
        rays
    } else {
        cfg.extension_rays
            .iter()
            .map(|r| ExtensionRay {
                origin: Complex64::new(r.origin[0], r.origin[1]),
                direction: Complex64::new(r.direction[0], r.direction[1]),
                length: r.length,
                samples: r.samples,
            })
            .collect()
    }
}

fn solve_inner(
    cfg: &RunConfig,
) -> Result<(Instance, Vec<f64>, RhpSolution, &'static str), Result<CommandOutcome, SolveError>> {
    let instance = match Instance::from_config(cfg) {
        Ok(i) => i,
        Err(e) => return Err(Ok(usage_outcome("solve", cfg, &e))),
    };
    if matches!(cfg.problem, ProblemKind::AppendixToy) {
        return Err(Ok(usage_outcome(
            "solve",
            cfg,
            &UsageError("the appendix-toy problem is validate-only".into()),
        )));
    }
    let beta = match cfg.beta() {
        Ok(b) => b,
        Err(e) => return Err(Ok(usage_outcome("solve", cfg, &e))),
    };
    let setup = instance.setup(cfg);
    let (init, initializer) = match initial_alphas(cfg, &setup, &beta) {
        Ok(v) => v,
        Err(e) => return Err(Ok(usage_outcome("solve", cfg, &e))),
    };
    match newton_solve(&setup, &init, &beta, &newton_options(cfg)) {
        Ok(sol) => Ok((instance, beta, sol, initializer)),
        Err(e) => Err(Err(e)),
    }
}

pub fn cmd_solve(cfg: &RunConfig) -> CommandOutcome {
    let mut record = record_skeleton("solve", cfg);
    let (instance, beta, sol, initializer) = match solve_inner(cfg) {
        Ok(v) => v,
        Err(Ok(outcome)) => return outcome,
        Err(Err(e)) => {
            record["error"] = json!(format!("{e}"));
            if let SolveError::NoConvergence {
                residual_history, ..
            } = &e
            {
                record["residual_history"] = json!(residual_history);
            }
            return CommandOutcome {
                exit: crate::EXIT_NO_CONVERGENCE,
                record,
                files: Vec::new(),
                summary: vec![format!("solve failed: {e}")],
            };
        }
    };
    let beta_names = cfg.beta_names();
    record["initializer"] = json!(initializer);
    record["solution"] = output::solution_json(&sol, &beta_names);
    let setup = instance.setup(cfg);
    let rays = rays_from_config(cfg, &sol);
    if let Ok(report) = sign_condition_check(&setup, &sol, &SignGridSpec::default(), &rays) {
        record["sign_report"] = json!({
            "main_on_arc_pass": report.main_on_arc_pass,
            "main_sides_pass": report.main_sides_pass,
            "comp_pass": report.comp_pass,
            "extension_pass": report.extension_pass,
            "worst_main_on_arc": report.worst_main_on_arc,
            "worst_side": report.worst_side,
            "worst_comp": report.worst_comp,
            "worst_extension": report.worst_extension,
        });
    }
    let summary = vec![format!(
        "solved at beta {:?}: residual {:.3e} in {} iterations (initializer: {})",
        sol.beta, sol.residual_norm, sol.diagnostics.newton_iterations, initializer
    )];
    let files = vec![(
        "solve.json".to_string(),
        serde_json::to_string_pretty(&record).expect("record serializes"),
    )];
    CommandOutcome {
        exit: crate::EXIT_OK,
        record,
        files,
        summary,
    }
}

pub fn cmd_continue(cfg: &RunConfig) -> CommandOutcome {
    let mut record = record_skeleton("continue", cfg);
    let component = match cfg.sweep_component_index() {
        Ok(k) => k,
        Err(e) => return usage_outcome("continue", cfg, &e),
    };
    let sweep = cfg.sweep.clone().expect("sweep checked");
    // Start from the sweep's `from` value.
    let mut start_cfg = cfg.clone();
    let name = cfg.beta_names()[component];
    start_cfg
        .parameters
        .insert(name.to_string(), json!(sweep.from));

    let (instance, _beta, start, initializer) = match solve_inner(&start_cfg) {
        Ok(v) => v,
        Err(Ok(outcome)) => return outcome,
        Err(Err(e)) => {
            record["error"] = json!(format!("{e}"));
            return CommandOutcome {
                exit: crate::EXIT_NO_CONVERGENCE,
                record,
                files: Vec::new(),
                summary: vec![format!("initial solve failed: {e}")],
            };
        }
    };
    record["initializer"] = json!(initializer);
    let setup = instance.setup(cfg);
    let controls = ContinuationControls::for_sweep(sweep.from, sweep.to, sweep.steps);
    let newton = newton_options(cfg);
    let beta_names = cfg.beta_names();

    let (exit, traj, note): (ExitCode, Trajectory, Option<String>) =
        match continue_parameter(&setup, &start, component, sweep.to, &controls, &newton) {
            Ok(t) => (crate::EXIT_OK, t, None),
            Err((e, partial)) => (crate::EXIT_STALL, partial, Some(format!("{e}"))),
        };
    if let Some(note) = &note {
        record["error"] = json!(note);
    }
    record["trajectory"] = output::trajectory_json(&traj, &beta_names);
    let mut files = Vec::new();
    if cfg.output.formats.iter().any(|f| f == "csv") {
        files.push((
            "trajectory.csv".to_string(),
            output::trajectory_csv(&traj, &beta_names),
        ));
    }
    files.push((
        "continue.json".to_string(),
        serde_json::to_string_pretty(&record).expect("record serializes"),
    ));
    let summary = vec![format!(
        "continued {} from {} to {}: {} samples{}",
        name,
        sweep.from,
        traj.samples.last().map(|s| s.beta[component]).unwrap_or(sweep.from),
        traj.samples.len(),
        note.map(|n| format!(" (stalled: {n})")).unwrap_or_default()
    )];
    CommandOutcome {
        exit,
        record,
        files,
        summary,
    }
}

/// Interior evaluation points for the dh/dbeta reports: beside the first
/// cut arc, between the small loops and the outer loop.
fn interior_points(
    setup: &ProblemSetup<'_>,
    sol: &RhpSolution,
    count: usize,
) -> Result<Vec<Complex64>, SolveError> {
    let ctx = setup.context(&sol.alphas, &sol.beta)?;
    let mut out = Vec::new();
    for seg in ctx.branch.cut_arcs()[0].segments() {
        for m in 1..=count {
            let t = m as f64 / (count + 1) as f64;
            let z = seg.point(t);
            let tan = seg.derivative(t);
            let nrm = Complex64::i() * tan / tan.norm();
            for sgn in [1.0, -1.0] {
                let cand = z + nrm * (sgn * 1.3 * ctx.loops.offsets.main[0]);
                let p = ctx.classify(cand);
                if p.inside_outer && p.in_main.is_empty() && p.in_comp.is_empty() {
                    out.push(cand);
                }
                if out.len() >= count {
                    return Ok(out);
                }
            }
        }
    }
    Ok(out)
}

pub fn cmd_derivs(cfg: &RunConfig) -> CommandOutcome {
    let mut record = record_skeleton("derivs", cfg);
    let (instance, beta, sol, _init) = match solve_inner(cfg) {
        Ok(v) => v,
        Err(Ok(outcome)) => return outcome,
        Err(Err(e)) => {
            record["error"] = json!(format!("{e}"));
            return CommandOutcome {
                exit: crate::EXIT_NO_CONVERGENCE,
                record,
                files: Vec::new(),
                summary: vec![format!("solve failed: {e}")],
            };
        }
    };
    let setup = instance.setup(cfg);
    let newton = newton_options(cfg);
    let beta_names = cfg.beta_names();
    let mut reports: Vec<OracleReport> = Vec::new();

    let run = || -> Result<Vec<OracleReport>, ValidationError> {
        let mut reports = Vec::new();
        let ctx = setup.context(&sol.alphas, &beta)?;
        // Branchpoint derivatives against FD along the solution branch.
        for (k, name) in beta_names.iter().enumerate() {
            let formula = ctx.dalpha_dbeta(k)?[0];
            let base = |v: f64| -> Result<Complex64, ValidationError> {
                let mut b = beta.clone();
                b[k] = v;
                Ok(newton_solve(&setup, &sol.alphas, &b, &newton)?.alphas[0])
            };
            let spec = FdSpec {
                steps: vec![2e-4, 1e-4],
                richardson: true,
            };
            reports.push(fd_check(
                &format!("dalpha-d{name}"),
                formula,
                beta[k],
                base,
                &spec,
                1e-4,
            )?);
        }
        // dh/dbeta at interior points, constants held fixed.
        let pts = interior_points(&setup, &sol, 5)?;
        for (i, &z) in pts.iter().enumerate() {
            for (k, name) in beta_names.iter().enumerate().take(2) {
                let formula = ctx.dh_dbeta(z, k)?;
                let base = |v: f64| -> Result<Complex64, ValidationError> {
                    let mut b = beta.clone();
                    b[k] = v;
                    let cb = setup.context(&sol.alphas, &b)?;
                    Ok(cb.eval_h_bracket(z, &sol.w, &sol.omega)?)
                };
                let spec = FdSpec {
                    steps: vec![1e-3, 5e-4],
                    richardson: true,
                };
                reports.push(fd_check(
                    &format!("dh-d{name}-z{i}"),
                    formula,
                    beta[k],
                    base,
                    &spec,
                    1e-5,
                )?);
            }
        }
        // Constant derivatives for genus >= 1.
        if ctx.genus() >= 1 {
            for (k, name) in beta_names.iter().enumerate() {
                let (domega, _) = ctx.domega_dbeta(k)?;
                let (dw, _) = ctx.dw_dbeta(k)?;
                for j in 0..ctx.genus() {
                    let base_omega = |v: f64| -> Result<Complex64, ValidationError> {
                        let mut b = beta.clone();
                        b[k] = v;
                        let cb = setup.context(&sol.alphas, &b)?;
                        Ok(Complex64::new(cb.solve_w_omega()?.1[j], 0.0))
                    };
                    let spec = FdSpec {
                        steps: vec![2e-4, 1e-4],
                        richardson: true,
                    };
                    reports.push(fd_check(
                        &format!("dOmega{}-d{name}", j + 1),
                        Complex64::new(domega[j], 0.0),
                        beta[k],
                        base_omega,
                        &spec,
                        1e-5,
                    )?);
                    let base_w = |v: f64| -> Result<Complex64, ValidationError> {
                        let mut b = beta.clone();
                        b[k] = v;
                        let cb = setup.context(&sol.alphas, &b)?;
                        Ok(Complex64::new(cb.solve_w_omega()?.0[j + 1], 0.0))
                    };
                    reports.push(fd_check(
                        &format!("dW{}-d{name}", j + 1),
                        Complex64::new(dw[j], 0.0),
                        beta[k],
                        base_w,
                        &spec,
                        1e-5,
                    )?);
                }
            }
        }
        Ok(reports)
    };

    match run() {
        Ok(r) => reports = r,
        Err(e) => {
            record["error"] = json!(format!("{e}"));
            return CommandOutcome {
                exit: crate::EXIT_VALIDATION,
                record,
                files: Vec::new(),
                summary: vec![format!("derivative reports failed to run: {e}")],
            };
        }
    }

    let all_pass = reports.iter().all(|r| r.pass);
    record["reports"] = Value::Array(reports.iter().map(output::report_json).collect());
    let summary: Vec<String> = reports
        .iter()
        .map(|r| {
            format!(
                "{}: rel err {:.3e} (tol {:.0e}) {}",
                r.name,
                r.rel_err,
                r.tolerance,
                if r.pass { "pass" } else { "FAIL" }
            )
        })
        .collect();
    let files = vec![(
        "derivs.json".to_string(),
        serde_json::to_string_pretty(&record).expect("record serializes"),
    )];
    CommandOutcome {
        exit: if all_pass {
            crate::EXIT_OK
        } else {
            crate::EXIT_VALIDATION
        },
        record,
        files,
        summary,
    }
}

pub fn cmd_validate(cfg: &RunConfig, suites: &[String]) -> CommandOutcome {
    let mut record = record_skeleton("validate", cfg);
    let names: Vec<&str> = if suites.is_empty() {
        cfg.suites.iter().map(|s| s.as_str()).collect()
    } else {
        suites.iter().map(|s| s.as_str()).collect()
    };
    if names.is_empty() {
        return usage_outcome(
            "validate",
            cfg,
            &UsageError("no suites requested (set config.suites or --suite)".into()),
        );
    }
    let suite_cfg = SuiteConfig {
        quad: cfg.quadrature.to_spec(),
        seed: cfg.seed.unwrap_or(0x5eed_cafe),
        ..SuiteConfig::default()
    };
    // The appendix-toy problem runs its oracle directly as well.
    let mut reports = Vec::new();
    if matches!(cfg.problem, ProblemKind::AppendixToy) {
        let toy = ToyJump {
            c0: Complex64::new(1.0, 0.0),
            c1: Complex64::new(0.0, 0.0),
            z00: Complex64::new(0.0, 0.0),
            z01: Complex64::new(0.1, 0.05),
        };
        let mu = cfg.beta().map(|b| b[0]).unwrap_or(1.0);
        match appendix_i1(
            &toy,
            Complex64::new(-1.0, 0.0),
            Complex64::new(1.0, 0.0),
            mu,
            &suite_cfg.quad,
            &FdSpec::default(),
        ) {
            Ok(r) => reports.extend(r),
            Err(e) => {
                record["error"] = json!(format!("{e}"));
                return CommandOutcome {
                    exit: crate::EXIT_VALIDATION,
                    record,
                    files: Vec::new(),
                    summary: vec![format!("{e}")],
                };
            }
        }
    }
    match suite_run(&names, &suite_cfg) {
        Ok(r) => reports.extend(r),
        Err(ValidationError::UnknownSuite(name)) => {
            return usage_outcome(
                "validate",
                cfg,
                &UsageError(format!("unknown suite '{name}'")),
            );
        }
        Err(e) => {
            record["error"] = json!(format!("{e}"));
            return CommandOutcome {
                exit: crate::EXIT_VALIDATION,
                record,
                files: Vec::new(),
                summary: vec![format!("{e}")],
            };
        }
    }
    let all_pass = reports.iter().all(|r| r.pass);
    record["reports"] = Value::Array(reports.iter().map(output::report_json).collect());
    let summary: Vec<String> = reports
        .iter()
        .map(|r| {
            format!(
                "{}: rel err {:.3e} (tol {:.0e}) {}",
                r.name,
                r.rel_err,
                r.tolerance,
                if r.pass { "pass" } else { "FAIL" }
            )
        })
        .collect();
    let files = vec![(
        "validate.json".to_string(),
        serde_json::to_string_pretty(&record).expect("record serializes"),
    )];
    CommandOutcome {
        exit: if all_pass {
            crate::EXIT_OK
        } else {
            crate::EXIT_VALIDATION
        },
        record,
        files,
        summary,
    }
}

pub fn cmd_signs(cfg: &RunConfig) -> CommandOutcome {
    let mut record = record_skeleton("signs", cfg);
    let (instance, beta, sol, _init) = match solve_inner(cfg) {
        Ok(v) => v,
        Err(Ok(outcome)) => return outcome,
        Err(Err(e)) => {
            record["error"] = json!(format!("{e}"));
            return CommandOutcome {
                exit: crate::EXIT_NO_CONVERGENCE,
                record,
                files: Vec::new(),
                summary: vec![format!("solve failed: {e}")],
            };
        }
    };
    let setup = instance.setup(cfg);
    let ctx = match setup.context(&sol.alphas, &beta) {
        Ok(c) => c,
        Err(e) => {
            record["error"] = json!(format!("{e}"));
            return CommandOutcome {
                exit: crate::EXIT_VALIDATION,
                record,
                files: Vec::new(),
                summary: vec![format!("{e}")],
            };
        }
    };
    let grid = &cfg.signs_grid;
    let mut csv = String::from("re,im,Imh,region\n");
    for iy in 0..grid.ny {
        let im = grid.im_lo + (grid.im_hi - grid.im_lo) * (iy as f64 + 0.5) / grid.ny as f64;
        for ix in 0..grid.nx {
            let re =
                grid.re_lo + (grid.re_hi - grid.re_lo) * (ix as f64 + 0.5) / grid.nx as f64;
            let z = Complex64::new(re, im);
            let placement = ctx.classify(z);
            let region = if !placement.inside_outer {
                "exterior".to_string()
            } else if let Some(j) = placement.in_main.first() {
                format!("main-loop-{j}")
            } else if let Some(j) = placement.in_comp.first() {
                format!("comp-loop-{j}")
            } else {
                "interior".to_string()
            };
            let imh = ctx
                .eval_g(z, &sol.w, &sol.omega)
                .ok()
                .and_then(|g| {
                    ctx.f
                        .eval(z, &beta)
                        .ok()
                        .map(|fv| (2.0 * g - fv).im)
                })
                .map(|v| format!("{v:.16e}"))
                .unwrap_or_else(|| "nan".to_string());
            csv.push_str(&format!("{re:.16e},{im:.16e},{imh},{region}\n"));
        }
    }
    record["solution"] = output::solution_json(&sol, &cfg.beta_names());
    record["grid"] = json!({
        "nx": grid.nx, "ny": grid.ny,
        "re_lo": grid.re_lo, "re_hi": grid.re_hi,
        "im_lo": grid.im_lo, "im_hi": grid.im_hi,
    });
    let files = vec![
        ("signs.csv".to_string(), csv),
        (
            "signs.json".to_string(),
            serde_json::to_string_pretty(&record).expect("record serializes"),
        ),
    ];
    CommandOutcome {
        exit: crate::EXIT_OK,
        record,
        files,
        summary: vec![format!(
            "sign grid {}x{} written over [{}, {}] x [{}, {}]",
            grid.nx, grid.ny, grid.re_lo, grid.re_hi, grid.im_lo, grid.im_hi
        )],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fast_cfg() -> RunConfig {
        let mut cfg = RunConfig::default();
        // The closed form of the t = 0 branchpoint keeps tests quick.
        cfg.initial_alphas = Some(vec![[0.8377535, 0.6480543], [0.8377535, -0.6480543]]);
        cfg
    }

    #[test]
    fn solve_produces_record_with_conjugate_pair() {
        let out = cmd_solve(&fast_cfg());
        assert_eq!(out.exit, crate::EXIT_OK, "{:?}", out.summary);
        let sol = &out.record["solution"];
        let a0 = sol["alphas"][0].as_array().unwrap();
        let a1 = sol["alphas"][1].as_array().unwrap();
        assert!((a0[0].as_f64().unwrap() - a1[0].as_f64().unwrap()).abs() < 1e-10);
        assert!((a0[1].as_f64().unwrap() + a1[1].as_f64().unwrap()).abs() < 1e-10);
        assert!(sol["residual_norm"].as_f64().unwrap() < 1e-10);
    }

    #[test]
    fn continue_steps_one_gives_two_rows() {
        let mut cfg = fast_cfg();
        cfg.sweep = Some(crate::config::SweepConfig {
            component: "mu".into(),
            from: 2.2,
            to: 2.15,
            steps: 1,
        });
        let out = cmd_continue(&cfg);
        assert_eq!(out.exit, crate::EXIT_OK, "{:?}", out.summary);
        let csv = &out.files.iter().find(|(n, _)| n == "trajectory.csv").unwrap().1;
        let rows: Vec<&str> = csv.trim().lines().collect();
        assert_eq!(rows.len(), 3, "header + start + end, got {}", rows.len());
    }

    #[test]
    fn bad_sweep_component_is_usage() {
        let mut cfg = fast_cfg();
        cfg.sweep = Some(crate::config::SweepConfig {
            component: "q".into(),
            from: 0.0,
            to: 1.0,
            steps: 2,
        });
        let out = cmd_continue(&cfg);
        assert_eq!(out.exit, crate::EXIT_USAGE);
    }

    #[test]
    fn unknown_suite_is_usage() {
        let cfg = RunConfig::default();
        let out = cmd_validate(&cfg, &["bogus".to_string()]);
        assert_eq!(out.exit, crate::EXIT_USAGE);
    }

    #[test]
    fn validate_cauchy_passes() {
        let cfg = RunConfig::default();
        let out = cmd_validate(&cfg, &["cauchy".to_string()]);
        assert_eq!(out.exit, crate::EXIT_OK, "{:?}", out.summary);
    }

    #[test]
    fn signs_grid_row_count() {
        let mut cfg = fast_cfg();
        cfg.signs_grid.nx = 20;
        cfg.signs_grid.ny = 10;
        let out = cmd_signs(&cfg);
        assert_eq!(out.exit, crate::EXIT_OK);
        let csv = &out.files.iter().find(|(n, _)| n == "signs.csv").unwrap().1;
        assert_eq!(csv.trim().lines().count(), 200 + 1);
    }
}
