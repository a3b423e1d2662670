//! System-level checks of the determinant machinery at genus >= 1: the
//! tracked complementary-loop integrals against direct arc quadrature, the
//! jump relations of h on both arc families, agreement of the two h
//! evaluation routes, the moment conditions, and every parameter-derivative
//! formula against centered finite differences.

use gfunc_core::contour::{Path, QuadratureSpec, Segment};
use gfunc_core::jumps::{JumpFunction, NlsJump, PolyCoeff, SyntheticPoly};
use gfunc_core::radical::Side;
use gfunc_core::rhp::{context_with_chords, ContextOptions, RhpContext};
use gfunc_core::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn genus1_alphas() -> Vec<Complex64> {
    vec![c(-1.2, 0.9), c(-0.4, 0.2), c(0.5, 0.4), c(1.3, -0.6)]
}

/// A parameterized quartic: beta[0] scales the cubic coefficient so every
/// dbeta has a clean closed form.
fn genus1_f() -> SyntheticPoly {
    SyntheticPoly::new(
        vec![
            PolyCoeff::constant(c(0.1, 0.0)),
            PolyCoeff::constant(c(0.4, -0.2)),
            PolyCoeff::constant(c(-0.3, 0.1)),
            PolyCoeff {
                constant: c(0.5, 0.0),
                linear: vec![(0, c(1.0, 0.0))],
            },
            PolyCoeff::constant(c(0.2, 0.05)),
        ],
        1,
    )
}

fn genus1_ctx(beta: Vec<f64>) -> (SyntheticPoly, Vec<Complex64>) {
    (genus1_f(), genus1_alphas())
}

#[test]
fn tracked_comp_loop_equals_arc_integral() {
    let f = genus1_f();
    let ctx = context_with_chords(
        genus1_alphas(),
        false,
        &f,
        vec![0.3],
        &ContextOptions::default(),
    )
    .unwrap();
    let alphas = genus1_alphas();
    // Direct oracle: 2 int over the complementary arc [alpha_1, alpha_2]
    // of zeta^n / R with a trigonometric substitution absorbing the
    // inverse-square-root endpoints.
    for n in 0..ctx.genus() as i32 {
        let (a, b) = (alphas[1], alphas[2]);
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let m = 600;
        let mut arc_int = Complex64::new(0.0, 0.0);
        for k in 0..m {
            let th = -core::f64::consts::FRAC_PI_2
                + core::f64::consts::PI * (k as f64 + 0.5) / m as f64;
            let zeta = mid + half * th.sin();
            let r = ctx.branch.eval(zeta).unwrap();
            arc_int += zeta.powi(n) * half * th.cos() / r;
        }
        arc_int *= core::f64::consts::PI / m as f64;
        let oracle = 2.0 * arc_int;
        let entry = ctx.moments().comp[0][n as usize];
        assert!(
            (entry - oracle).norm() < 1e-8 * oracle.norm().max(1.0),
            "n={n}: tracked loop {entry} vs arc oracle {oracle}"
        );
    }
}

#[test]
fn jump_relations_hold_at_any_configuration() {
    // The Plemelj structure of h holds for any distinct branchpoints, not
    // just modulation-equation roots: h_+ + h_- = 2 W_j on main arcs and
    // h_+ - h_- = 2 Omega_j on complementary arcs.
    let f = genus1_f();
    let ctx = context_with_chords(
        genus1_alphas(),
        false,
        &f,
        vec![0.3],
        &ContextOptions::default(),
    )
    .unwrap();
    let (w, omega, _) = ctx.solve_w_omega().unwrap();

    for (j, arc) in ctx.branch.cut_arcs().iter().enumerate() {
        for m in 1..=4 {
            let t = m as f64 / 5.0;
            let z = arc.segments()[0].point(t);
            let hp = ctx.eval_h_side(z, Side::Plus, &w, &omega).unwrap();
            let hm = ctx.eval_h_side(z, Side::Minus, &w, &omega).unwrap();
            let expect = 2.0 * w[j];
            assert!(
                (hp + hm - expect).norm() < 1e-8,
                "main arc {j}: h_+ + h_- = {} != {expect}",
                hp + hm
            );
        }
    }

    // Complementary arc: h jumps by 2 Omega_1 across it. R is continuous
    // there, so evaluate h on both sides directly.
    let alphas = genus1_alphas();
    let (a, b) = (alphas[1], alphas[2]);
    let dir = (b - a) / (b - a).norm();
    let nrm = Complex64::i() * dir;
    for frac in [0.35, 0.5, 0.65] {
        let z = a + (b - a) * frac;
        let jump_at = |d: f64| {
            let hp = ctx.eval_h(z + nrm * d, &w, &omega).unwrap();
            let hm = ctx.eval_h(z - nrm * d, &w, &omega).unwrap();
            hp - hm
        };
        let scale = ctx.scale();
        let j1 = jump_at(2e-5 * scale);
        let j2 = jump_at(1e-5 * scale);
        let jump = 2.0 * j2 - j1; // Richardson to the arc
        let expect = 2.0 * omega[0];
        assert!(
            (jump - expect).norm() < 1e-8,
            "comp arc: h_+ - h_- = {jump} != {expect}"
        );
    }
}

#[test]
fn h_routes_agree_and_g_identity() {
    let f = genus1_f();
    let ctx = context_with_chords(
        genus1_alphas(),
        false,
        &f,
        vec![0.3],
        &ContextOptions::default(),
    )
    .unwrap();
    let (w, omega, _) = ctx.solve_w_omega().unwrap();
    // Sample admissible points around the configuration.
    let centroid = c(0.05, 0.225);
    let mut checked = 0;
    for k in 0..48 {
        let th = core::f64::consts::TAU * k as f64 / 48.0;
        for &rad in &[0.8, 1.0, 1.2, 1.4] {
            let z = centroid + Complex64::from_polar(rad, th);
            let p = ctx.classify(z);
            if !p.inside_outer || !p.in_main.is_empty() || !p.in_comp.is_empty() {
                continue;
            }
            let h1 = ctx.eval_h(z, &w, &omega).unwrap();
            let h2 = ctx.eval_h_bracket(z, &w, &omega).unwrap();
            assert!(
                (h1 - h2).norm() < 1e-8 * h1.norm().max(1.0),
                "determinant and bracket routes disagree at {z}: {h1} vs {h2}"
            );
            let g = ctx.eval_g(z, &w, &omega).unwrap();
            let fv = f.eval(z, &[0.3]).unwrap();
            assert!(
                (h1 - (2.0 * g - fv)).norm() < 1e-9 * h1.norm().max(1.0),
                "h != 2g - f at {z}"
            );
            checked += 1;
        }
    }
    assert!(checked >= 10, "too few admissible sample points: {checked}");
}

#[test]
fn moment_conditions_and_g_bounded_at_infinity() {
    let f = genus1_f();
    let opts = ContextOptions::default();
    let ctx = context_with_chords(genus1_alphas(), false, &f, vec![0.3], &opts).unwrap();
    let (w, omega, im_residue) = ctx.solve_w_omega().unwrap();
    assert!(im_residue < 1e-9, "solved constants not real: {im_residue}");

    // Independent verification of the moment conditions on a second loop
    // system at doubled standoff.
    let opts2 = ContextOptions {
        offset_factor: 0.15,
        outer_factor: 4.0,
        ..opts
    };
    let ctx2 = context_with_chords(genus1_alphas(), false, &f, vec![0.3], &opts2).unwrap();
    for n in 0..ctx2.genus() {
        let mut lhs = ctx2.moments().f_mom[n];
        for j in 1..=ctx2.genus() {
            lhs += w[j] * ctx2.moments().main[j - 1][n];
            lhs += omega[j - 1] * ctx2.moments().comp[j - 1][n];
        }
        assert!(lhs.norm() < 1e-8, "moment condition n={n} violated: {lhs}");
    }

    // g analytic at infinity: |g| does not grow along a large-|z| ray.
    let g2 = ctx.eval_g(c(60.0, 40.0), &w, &omega).unwrap();
    let g3 = ctx.eval_g(c(600.0, 400.0), &w, &omega).unwrap();
    assert!(
        g3.norm() < g2.norm().max(1.0) * 2.0,
        "g grows at infinity: {} then {}",
        g2.norm(),
        g3.norm()
    );
}

#[test]
fn dk_dbeta_matches_finite_differences() {
    let f = genus1_f();
    let alphas = genus1_alphas();
    let opts = ContextOptions::default();
    let beta0 = 0.3;
    let ctx = context_with_chords(alphas.clone(), false, &f, vec![beta0], &opts).unwrap();
    let formula = ctx.dk_dbeta(0).unwrap();
    let h = 1e-5;
    let kp = context_with_chords(alphas.clone(), false, &f, vec![beta0 + h], &opts)
        .unwrap()
        .modulation_residual()
        .unwrap();
    let km = context_with_chords(alphas.clone(), false, &f, vec![beta0 - h], &opts)
        .unwrap()
        .modulation_residual()
        .unwrap();
    for (i, df) in formula.iter().enumerate() {
        let fd = (kp[i] - km[i]) / (2.0 * h);
        assert!(
            (df - fd).norm() < 1e-6 * df.norm().max(1.0),
            "dK_{i}/dbeta: {df} vs fd {fd}"
        );
    }
}

#[test]
fn domega_dw_match_finite_differences() {
    let f = genus1_f();
    let alphas = genus1_alphas();
    let opts = ContextOptions::default();
    let beta0 = 0.3;
    let ctx = context_with_chords(alphas.clone(), false, &f, vec![beta0], &opts).unwrap();
    let (domega, _) = ctx.domega_dbeta(0).unwrap();
    let (dw, _) = ctx.dw_dbeta(0).unwrap();
    let h = 1e-5;
    let solve_at = |b: f64| {
        context_with_chords(alphas.clone(), false, &f, vec![b], &opts)
            .unwrap()
            .solve_w_omega()
            .unwrap()
    };
    let (wp, op, _) = solve_at(beta0 + h);
    let (wm, om, _) = solve_at(beta0 - h);
    for j in 0..ctx.genus() {
        let fd_omega = (op[j] - om[j]) / (2.0 * h);
        assert!(
            (domega[j] - fd_omega).abs() < 1e-6 * domega[j].abs().max(1.0),
            "dOmega_{j}: {} vs fd {fd_omega}",
            domega[j]
        );
        let fd_w = (wp[j + 1] - wm[j + 1]) / (2.0 * h);
        assert!(
            (dw[j] - fd_w).abs() < 1e-6 * dw[j].abs().max(1.0),
            "dW_{j}: {} vs fd {fd_w}",
            dw[j]
        );
    }
}

#[test]
fn dh_dbeta_matches_finite_differences() {
    let f = genus1_f();
    let alphas = genus1_alphas();
    let opts = ContextOptions::default();
    let beta0 = 0.3;
    let ctx = context_with_chords(alphas.clone(), false, &f, vec![beta0], &opts).unwrap();
    let (w, omega, _) = ctx.solve_w_omega().unwrap();
    // An admissible point between the loops.
    let centroid = c(0.05, 0.225);
    let mut z = None;
    for k in 0..48 {
        let th = core::f64::consts::TAU * k as f64 / 48.0;
        let cand = centroid + Complex64::from_polar(1.1, th);
        let p = ctx.classify(cand);
        if p.inside_outer && p.in_main.is_empty() && p.in_comp.is_empty() {
            z = Some(cand);
            break;
        }
    }
    let z = z.expect("admissible point");
    let formula = ctx.dh_dbeta(z, 0).unwrap();
    let h = 1e-5;
    // The formula differentiates the bracket functional at fixed
    // branchpoints and fixed constants; only f moves with beta.
    let eval_at = |b: f64| {
        let cb = context_with_chords(alphas.clone(), false, &f, vec![b], &opts).unwrap();
        cb.eval_h_bracket(z, &w, &omega).unwrap()
    };
    let fd = (eval_at(beta0 + h) - eval_at(beta0 - h)) / (2.0 * h);
    assert!(
        (formula - fd).norm() < 1e-5 * formula.norm().max(1.0),
        "dh/dbeta {formula} vs fd {fd}"
    );
}

#[test]
fn genus2_schwarz_nls_configuration() {
    // A genus-2 Schwarz-paired configuration for the NLS jump function:
    // six branchpoints, middle main arc through z0 = mu/2. Not a root of
    // the modulation equations; the linear-solve structure, realness, and
    // the contour-moving mu-derivatives are configuration-level facts.
    let f = NlsJump;
    let mu = 2.2;
    let beta = vec![mu, 0.8, 0.05];
    let a0 = c(0.25, 1.55);
    let a1 = c(0.5, 1.05);
    let a2 = c(0.95, 0.5);
    let alphas = vec![a0, a1, a2, a2.conj(), a1.conj(), a0.conj()];
    let z0 = c(0.5 * mu, 0.0);

    let build = |mu_val: f64, opts: &ContextOptions| -> RhpContext<'_> {
        let beta = vec![mu_val, 0.8, 0.05];
        let z0v = c(0.5 * mu_val, 0.0);
        let pts =
            gfunc_core::radical::BranchPointSet::new(alphas.clone(), true).unwrap();
        let arcs = vec![
            Path::open(vec![Segment::Line { start: a0, end: a1 }]).unwrap(),
            Path::open(vec![
                Segment::Line { start: a2, end: z0v },
                Segment::Line {
                    start: z0v,
                    end: a2.conj(),
                },
            ])
            .unwrap(),
            Path::open(vec![Segment::Line {
                start: a1.conj(),
                end: a0.conj(),
            }])
            .unwrap(),
        ];
        let branch = gfunc_core::radical::RadicalBranch::new(pts, arcs).unwrap();
        RhpContext::new(branch, Vec::new(), &f, beta, opts).unwrap()
    };
    let _ = z0;

    let opts = ContextOptions::default();
    let ctx = build(mu, &opts);
    assert_eq!(ctx.genus(), 2);

    // Realness of the solved constants.
    let (w, omega, im_residue) = ctx.solve_w_omega().unwrap();
    assert_eq!(w.len(), 3);
    assert_eq!(omega.len(), 2);
    assert!(im_residue < 1e-8, "W/Omega not real: {im_residue}");

    // Deformation invariance of D and the moments under standoff change.
    let opts2 = ContextOptions {
        offset_factor: 0.21,
        ..opts
    };
    let ctx2 = build(mu, &opts2);
    let d1 = ctx.eval_d();
    let d2 = ctx2.eval_d();
    assert!(
        (d1 - d2).norm() < 1e-8 * d1.norm(),
        "D not deformation invariant: {d1} vs {d2}"
    );

    // The contour-moving mu-derivatives of Omega and W against centered
    // finite differences of the re-solved constants.
    let (domega, _) = ctx.domega_dbeta(0).unwrap();
    let (dw, _) = ctx.dw_dbeta(0).unwrap();
    let h = 1e-4;
    let (wp, op, _) = build(mu + h, &opts).solve_w_omega().unwrap();
    let (wm, om, _) = build(mu - h, &opts).solve_w_omega().unwrap();
    for j in 0..2 {
        let fd_omega = (op[j] - om[j]) / (2.0 * h);
        assert!(
            (domega[j] - fd_omega).abs() < 1e-5 * domega[j].abs().max(1.0),
            "dOmega_{j}/dmu {} vs fd {fd_omega}",
            domega[j]
        );
        let fd_w = (wp[j + 1] - wm[j + 1]) / (2.0 * h);
        assert!(
            (dw[j] - fd_w).abs() < 1e-5 * dw[j].abs().max(1.0),
            "dW_{j}/dmu {} vs fd {fd_w}",
            dw[j]
        );
    }
}

#[test]
fn bracket_coefficients_and_local_structure() {
    // At a manufactured genus-0 solution nu_1 vanishes and h has the 3/2
    // local power; at a perturbed configuration nu_1 is order one and the
    // local exponent drops to 1/2.
    let a0 = c(-0.4, 0.8);
    let a1 = c(0.7, -0.3);
    let e1 = a0 + a1;
    let e2 = a0 * a1;
    let f = SyntheticPoly::fixed(&[
        c(0.0, 0.0),
        1.5 * e2 + 0.375 * e1 * e1,
        -1.5 * e1,
        c(1.0, 0.0),
    ]);
    let opts = ContextOptions::default();
    let ctx = context_with_chords(vec![a0, a1], false, &f, vec![], &opts).unwrap();
    let bc = ctx.bracket_coefficients().unwrap();
    for nu in &bc.nu1 {
        assert!(nu.norm() < 1e-8, "nu_1 should vanish at a solution: {nu}");
    }
    for nu in &bc.nu2 {
        assert!(nu.norm() > 1e-3, "nu_2 should be nonzero");
    }
    for r in &bc.fit_residual {
        assert!(*r < 1e-6, "bracket not analytic on the circle: {r}");
    }

    // Slope of log |h| vs log r along a ray from alpha_0: 3/2 at the
    // solution (W_0 = 0 so h itself is the 3/2 part).
    let (w, omega, _) = ctx.solve_w_omega().unwrap();
    let dir = Complex64::from_polar(1.0, 0.9);
    let slope = |ctx: &RhpContext<'_>, w: &[f64], omega: &[f64]| {
        let radii = [3e-3, 1e-2, 3e-2];
        let vals: Vec<f64> = radii
            .iter()
            .map(|&r| {
                ctx.eval_h(a0 + dir * r, w, omega)
                    .unwrap()
                    .norm()
                    .ln()
            })
            .collect();
        (vals[2] - vals[0]) / (radii[2].ln() - radii[0].ln())
    };
    let s = slope(&ctx, &w, &omega);
    assert!((s - 1.5).abs() < 0.05, "local exponent {s} != 1.5");

    // Negative control: perturbed branchpoint.
    let a0_bad = a0 + c(0.25, 0.1);
    let ctx_bad = context_with_chords(vec![a0_bad, a1], false, &f, vec![], &opts).unwrap();
    let bc_bad = ctx_bad.bracket_coefficients().unwrap();
    assert!(bc_bad.nu1[0].norm() > 1e-2, "nu_1 should be large off-solution");
    let (wb, ob, _) = ctx_bad.solve_w_omega().unwrap();
    let radii = [3e-3, 1e-2, 3e-2];
    let vals: Vec<f64> = radii
        .iter()
        .map(|&r| {
            ctx_bad
                .eval_h(a0_bad + dir * r, &wb, &ob)
                .unwrap()
                .norm()
                .ln()
        })
        .collect();
    let sb = (vals[2] - vals[0]) / (radii[2].ln() - radii[0].ln());
    assert!((sb - 0.5).abs() < 0.1, "off-solution exponent {sb} != 0.5");
}

#[test]
fn gprime_check_at_manufactured_solution() {
    let a0 = c(-0.4, 0.8);
    let a1 = c(0.7, -0.3);
    let e1 = a0 + a1;
    let e2 = a0 * a1;
    let f = SyntheticPoly::fixed(&[
        c(0.0, 0.0),
        1.5 * e2 + 0.375 * e1 * e1,
        -1.5 * e1,
        c(1.0, 0.0),
    ]);
    let ctx = context_with_chords(
        vec![a0, a1],
        false,
        &f,
        vec![],
        &ContextOptions::default(),
    )
    .unwrap();
    let (w, omega, _) = ctx.solve_w_omega().unwrap();
    let report = ctx.gprime_jump_check(&w, &omega, 3).unwrap();
    assert!(
        report.max_jump_violation < 1e-6,
        "g' jump violation {:.3e}",
        report.max_jump_violation
    );
    // |g'(z) z^2| bounded at large |z|.
    assert!(report.decay_samples.len() == 2);
    let (r1, v1) = report.decay_samples[0];
    let (r2, v2) = report.decay_samples[1];
    assert!(r2 > r1);
    assert!(v2 < 10.0 * v1.max(1e-6), "g' z^2 grows: {v1} then {v2}");
}
