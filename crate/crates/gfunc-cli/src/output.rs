//! Serialization of solutions, trajectories, loop paths, and oracle
//! reports. All numeric output carries 17 significant digits so downstream
//! tools can take finite differences of it.

use gfunc_core::continuation::Trajectory;
use gfunc_core::contour::{LoopSystem, Path, Segment};
use gfunc_core::rhp::RhpSolution;
use gfunc_core::validation::OracleReport;
use gfunc_core::Complex64;
use serde_json::{json, Value};

/// Full-precision float for JSON and CSV cells.
pub fn num(v: f64) -> Value {
    json!(v)
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn solution_json(sol: &RhpSolution, beta_names: &[&str]) -> Value {
    let beta: Value = if beta_names.len() == sol.beta.len() {
        beta_names
            .iter()
            .zip(&sol.beta)
            .map(|(n, v)| (n.to_string(), json!(v)))
            .collect::<serde_json::Map<_, _>>()
            .into()
    } else {
        json!(sol.beta)
    };
    json!({
        "beta": beta,
        "alphas": sol.alphas.iter().map(|a| complex_json(*a)).collect::<Vec<_>>(),
        "W": sol.w,
        "Omega": sol.omega,
        "residual_norm": sol.residual_norm,
        "diagnostics": {
            "im_residue": sol.diagnostics.im_residue,
            "newton_iterations": sol.diagnostics.newton_iterations,
            "residual_history": sol.diagnostics.residual_history,
        },
        "schwarz_paired": sol.schwarz_paired,
    })
}

/// One CSV row per accepted solution: beta components, Re/Im of each
/// branchpoint, the constants, the residual, and the step that produced it.
pub fn trajectory_csv(traj: &Trajectory, beta_names: &[&str]) -> String {
    let mut out = String::new();
    let n_alpha = traj.samples.first().map(|s| s.alphas.len()).unwrap_or(0);
    let n_w = traj.samples.first().map(|s| s.w.len()).unwrap_or(0);
    let n_om = traj.samples.first().map(|s| s.omega.len()).unwrap_or(0);
    let mut header: Vec<String> = beta_names.iter().map(|s| s.to_string()).collect();
    for j in 0..n_alpha {
        header.push(format!("re_alpha{j}"));
        header.push(format!("im_alpha{j}"));
    }
    for j in 0..n_w {
        header.push(format!("W{j}"));
    }
    for j in 1..=n_om {
        header.push(format!("Omega{j}"));
    }
    header.push("residual".into());
    header.push("step".into());
    out.push_str(&header.join(","));
    out.push('\n');

    let mut accepted_steps = traj.step_log.iter().filter(|e| e.accepted);
    for (i, s) in traj.samples.iter().enumerate() {
        let mut row: Vec<String> = s.beta.iter().map(|v| fmt(*v)).collect();
        for a in &s.alphas {
            row.push(fmt(a.re));
            row.push(fmt(a.im));
        }
        for w in &s.w {
            row.push(fmt(*w));
        }
        for om in &s.omega {
            row.push(fmt(*om));
        }
        row.push(fmt(s.residual_norm));
        let step = if i == 0 {
            0.0
        } else {
            accepted_steps.next().map(|e| e.step).unwrap_or(f64::NAN)
        };
        row.push(fmt(step));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn trajectory_json(traj: &Trajectory, beta_names: &[&str]) -> Value {
    json!({
        "component": traj.component,
        "samples": traj.samples.iter().map(|s| solution_json(s, beta_names)).collect::<Vec<_>>(),
        "step_log": traj.step_log.iter().map(|e| json!({
            "beta_k": e.beta_k,
            "step": e.step,
            "accepted": e.accepted,
            "corrector_iterations": e.corrector_iterations,
        })).collect::<Vec<_>>(),
        "max_slope": traj.max_slope,
    })
}

pub fn report_json(r: &OracleReport) -> Value {
    json!({
        "name": r.name,
        "computed": complex_json(r.computed),
        "reference": complex_json(r.reference),
        "abs_err": r.abs_err,
        "rel_err": r.rel_err,
        "tolerance": r.tolerance,
        "pass": r.pass,
        "observed_order": r.observed_order,
        "seed": r.seed,
    })
}

/// Paths as `{segments: [{kind, endpoints, center?}], closed, orientation}`.
pub fn path_json(path: &Path) -> Value {
    let segments: Vec<Value> = path
        .segments()
        .iter()
        .map(|seg| match *seg {
            Segment::Line { start, end } => json!({
                "kind": "line",
                "endpoints": [complex_json(start), complex_json(end)],
            }),
            Segment::Arc {
                center,
                radius,
                theta0,
                theta1,
            } => json!({
                "kind": "arc",
                "endpoints": [complex_json(seg.point(0.0)), complex_json(seg.point(1.0))],
                "center": complex_json(center),
                "radius": radius,
                "theta0": theta0,
                "theta1": theta1,
            }),
        })
        .collect();
    json!({
        "segments": segments,
        "closed": path.is_closed(),
        "orientation": match path.orientation() {
            gfunc_core::contour::Orientation::Clockwise => "clockwise",
            gfunc_core::contour::Orientation::Counterclockwise => "counterclockwise",
        },
    })
}

pub fn loop_system_json(loops: &LoopSystem) -> Value {
    json!({
        "outer": path_json(&loops.outer),
        "main_loops": loops.main_loops.iter().map(path_json).collect::<Vec<_>>(),
        "comp_loops": loops.comp_loops.iter().map(path_json).collect::<Vec<_>>(),
        "offsets": {
            "outer": loops.offsets.outer,
            "main": loops.offsets.main,
            "comp": loops.offsets.comp,
        },
    })
}
