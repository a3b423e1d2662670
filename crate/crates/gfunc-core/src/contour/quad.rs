//! Adaptive Gauss-Legendre quadrature of complex-valued functions along a
//! [`Path`], and the Schwarz-split evaluation of closed loops that cross the
//! real axis.

use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::{Path, QuadError, QuadratureSpec, Segment};
use crate::GEOM_EPS;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the Legendre polynomial.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2 && n <= 64);
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        nodes.push(-x); // ascending order
        weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

/// Legendre polynomial value and derivative at `x`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0f64;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Rule {
    fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        Rule { nodes, weights }
    }

    /// Integrate `f(z) dz` over the sub-panel `[t0, t1]` of `seg`.
    fn panel<F>(
        &self,
        seg: &Segment,
        t0: f64,
        t1: f64,
        f: &mut F,
    ) -> Result<Complex64, QuadError>
    where
        F: FnMut(Complex64) -> Complex64,
    {
        let half = 0.5 * (t1 - t0);
        let mid = 0.5 * (t0 + t1);
        let mut acc = Complex64::new(0.0, 0.0);
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            let t = mid + half * x;
            let z = seg.point(t);
            let v = f(z);
            if !v.is_finite() {
                return Err(QuadError::NonFiniteIntegrand { node: z });
            }
            acc += v * seg.derivative(t) * w;
        }
        Ok(acc * half)
    }
}

#[allow(clippy::too_many_arguments)]
fn refine<F>(
    rule: &Rule,
    seg: &Segment,
    t0: f64,
    t1: f64,
    coarse: Complex64,
    tol: f64,
    floor: f64,
    depth_left: u32,
    f: &mut F,
) -> Result<(Complex64, f64), QuadError>
where
    F: FnMut(Complex64) -> Complex64,
{
    let tm = 0.5 * (t0 + t1);
    let a = rule.panel(seg, t0, tm, f)?;
    let b = rule.panel(seg, tm, t1, f)?;
    let fine = a + b;
    let diff = (fine - coarse).norm();
    // `floor` caps the per-panel target near roundoff of the whole result,
    // and the panel-length cutoff keeps nodes a safe distance from segment
    // endpoints even for integrable endpoint singularities.
    if diff <= tol.max(floor) || depth_left == 0 || (t1 - t0) < 2e-9 {
        return Ok((fine, diff));
    }
    let (va, ea) = refine(rule, seg, t0, tm, a, 0.5 * tol, floor, depth_left - 1, f)?;
    let (vb, eb) = refine(rule, seg, tm, t1, b, 0.5 * tol, floor, depth_left - 1, f)?;
    Ok((va + vb, ea + eb))
}

/// Integrate `f(z) dz` along `path`, returning the value and an error
/// estimate. Deterministic for a fixed spec. Segment boundaries are hard
/// panel boundaries, so pre-splitting a path pins panels to integrand kinks.
pub fn integrate_full<F>(
    path: &Path,
    spec: &QuadratureSpec,
    mut f: F,
) -> Result<(Complex64, f64), QuadError>
where
    F: FnMut(Complex64) -> Complex64,
{
    spec.validate()?;
    let rule = Rule::new(spec.nodes_per_panel);
    // First pass for the scale of the result.
    let mut rough = Complex64::new(0.0, 0.0);
    let mut coarse_vals = Vec::with_capacity(path.segments().len());
    for seg in path.segments() {
        let v = rule.panel(seg, 0.0, 1.0, &mut f)?;
        coarse_vals.push(v);
        rough += v;
    }
    let target = spec.abs_tol.max(spec.rel_tol * rough.norm());
    let scale: f64 = coarse_vals.iter().map(|v| v.norm()).sum::<f64>().max(1.0);
    let floor = 4.0 * f64::EPSILON * scale;
    let total_len: f64 = path.length();
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0f64;
    for (seg, &coarse) in path.segments().iter().zip(&coarse_vals) {
        let share = if total_len > 0.0 {
            (seg.length() / total_len).max(1e-3)
        } else {
            1.0
        };
        let (v, e) = refine(
            &rule,
            seg,
            0.0,
            1.0,
            coarse,
            target * share,
            floor,
            spec.max_subdivisions,
            &mut f,
        )?;
        value += v;
        err += e;
    }
    if err > 10.0 * spec.abs_tol.max(spec.rel_tol * value.norm()).max(target) {
        return Err(QuadError::AccuracyNotMet {
            best: value,
            err_est: err,
        });
    }
    Ok((value, err))
}

/// Integrate `f(z) dz` along `path`.
pub fn integrate<F>(path: &Path, spec: &QuadratureSpec, f: F) -> Result<Complex64, QuadError>
where
    F: FnMut(Complex64) -> Complex64,
{
    integrate_full(path, spec, f).map(|(v, _)| v)
}

/// Evaluate a closed clockwise loop integral of a Schwarz-reflected
/// integrand, given only its upper-half path `gamma_plus` (running from a
/// real point `p1` to a real point `p2`).
///
/// The lower half is the mirror image of `gamma_plus`, and on it the
/// integrand is `conj . F_upper . conj`; the whole loop integral equals
///
/// ```text
/// int_{gamma_plus} f_upper dz  -  conj( int_{gamma_plus} partner_upper dz )
/// ```
///
/// where `partner_upper(z) = conj(F(conj z))` expressed through upper-half
/// formulas. Panels never straddle the real axis because the axis crossings
/// are the endpoints of `gamma_plus`.
pub fn schwarz_loop_integral<F, G>(
    gamma_plus: &Path,
    spec: &QuadratureSpec,
    f_upper: F,
    partner_upper: G,
) -> Result<Complex64, QuadError>
where
    F: FnMut(Complex64) -> Complex64,
    G: FnMut(Complex64) -> Complex64,
{
    let tol = GEOM_EPS * gamma_plus.diameter().max(1.0);
    for endpoint in [gamma_plus.start(), gamma_plus.end()] {
        if endpoint.im.abs() > tol {
            return Err(QuadError::Geometry(
                super::GeometryError::EndpointsNotReal { endpoint },
            ));
        }
    }
    let direct = integrate(gamma_plus, spec, f_upper)?;
    let partner = integrate(gamma_plus, spec, partner_upper)?;
    Ok(direct - partner.conj())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour::{build_arc_chain, build_loop, Interpolation};
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn clockwise_circle(center: Complex64, radius: f64) -> Path {
        Path::closed(vec![Segment::Arc {
            center,
            radius,
            theta0: 0.0,
            theta1: -core::f64::consts::TAU,
        }])
        .unwrap()
    }

    #[test]
    fn gauss_nodes_integrate_polynomials_exactly() {
        let (nodes, weights) = gauss_legendre(15);
        // degree-29 monomial is the highest exactly integrable
        let exact = 2.0 / 29.0; // int_{-1}^{1} x^28 dx
        let got: f64 = nodes
            .iter()
            .zip(&weights)
            .map(|(&x, &w)| w * x.powi(28))
            .sum();
        assert!((got - exact).abs() < 1e-14);
        let sum_w: f64 = weights.iter().sum();
        assert!((sum_w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn residue_on_clockwise_circle() {
        let path = clockwise_circle(c(0.0, 0.0), 1.0);
        let spec = QuadratureSpec::default();
        let v = integrate(&path, &spec, |z| 1.0 / z).unwrap();
        let expect = c(0.0, -core::f64::consts::TAU);
        assert!((v - expect).norm() < 1e-10);
    }

    #[test]
    fn polynomial_on_segment() {
        let path = build_arc_chain(&[c(0.0, 0.0), c(1.0, 0.0)], Interpolation::Polyline).unwrap();
        let spec = QuadratureSpec::default();
        let v = integrate(&path, &spec, |z| z).unwrap();
        assert!((v - c(0.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn appendix_toy_integral_closed_form() {
        // int (z - z0) Log(z - z0) dz over [-1,0] u [0,1] with principal
        // Log equals -i pi / 2.
        let path =
            build_arc_chain(&[c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], Interpolation::Polyline)
                .unwrap();
        let spec = QuadratureSpec::default();
        let v = integrate(&path, &spec, |z| z * z.ln()).unwrap();
        let expect = c(0.0, -core::f64::consts::FRAC_PI_2);
        assert!((v - expect).norm() < 1e-11, "got {v}");
    }

    #[test]
    fn additivity_over_segments() {
        let path = build_arc_chain(
            &[c(0.0, 0.0), c(0.5, 0.2), c(1.0, 0.0)],
            Interpolation::Polyline,
        )
        .unwrap();
        let spec = QuadratureSpec::default();
        let whole = integrate(&path, &spec, |z| (3.0 * z).exp()).unwrap();
        let mut parts = Complex64::new(0.0, 0.0);
        for seg in path.segments() {
            let sub = Path::open(vec![*seg]).unwrap();
            parts += integrate(&sub, &spec, |z| (3.0 * z).exp()).unwrap();
        }
        assert!((whole - parts).norm() < 1e-12);
    }

    #[test]
    fn non_finite_integrand_reports_node() {
        let path = build_arc_chain(&[c(-1.0, 0.0), c(1.0, 0.0)], Interpolation::Polyline).unwrap();
        let spec = QuadratureSpec::default();
        let res = integrate(&path, &spec, |z| 1.0 / (z - z)); // 1/0 everywhere
        assert!(matches!(res, Err(QuadError::NonFiniteIntegrand { .. })));
    }

    #[test]
    fn schwarz_split_equals_explicit_loop() {
        // Pole inside: F = 1/(z - 0.5) over the unit-diameter circle around
        // 0.5, built both as an explicit clockwise circle and as an upper
        // semicircle with Schwarz completion.
        let spec = QuadratureSpec::default();
        let explicit = clockwise_circle(c(0.5, 0.0), 0.5);
        let full = integrate(&explicit, &spec, |z| 1.0 / (z - 0.5)).unwrap();

        let gamma_plus = Path::open(vec![Segment::Arc {
            center: c(0.5, 0.0),
            radius: 0.5,
            theta0: core::f64::consts::PI,
            theta1: 0.0,
        }])
        .unwrap();
        let f = |z: Complex64| 1.0 / (z - 0.5);
        let partner = |z: Complex64| (1.0 / (z.conj() - 0.5)).conj();
        let split = schwarz_loop_integral(&gamma_plus, &spec, f, partner).unwrap();
        assert!((split - full).norm() < 1e-10);
        assert!((split - c(0.0, -core::f64::consts::TAU)).norm() < 1e-10);
    }

    #[test]
    fn schwarz_split_requires_real_endpoints() {
        let gamma_plus = build_arc_chain(&[c(0.0, 0.5), c(1.0, 0.5)], Interpolation::Polyline)
            .unwrap();
        let spec = QuadratureSpec::default();
        let res = schwarz_loop_integral(&gamma_plus, &spec, |z| z, |z| z);
        assert!(res.is_err());
    }

    #[test]
    fn deformation_invariance_between_loops() {
        // F analytic between the two stadium loops around the same arc.
        let arc = build_arc_chain(&[c(-1.0, 0.0), c(1.0, 0.0)], Interpolation::Polyline).unwrap();
        let spec = QuadratureSpec::default();
        let inner = build_loop(&arc, 0.3, &[]).unwrap();
        let outer = build_loop(&arc, 0.6, &[]).unwrap();
        let f = |z: Complex64| (z * z + 1.0).sqrt() / (z - 4.0);
        let a = integrate(&inner, &spec, f).unwrap();
        let b = integrate(&outer, &spec, f).unwrap();
        assert!((a - b).norm() < 10.0 * spec.abs_tol.max(1e-11) * 100.0);
        assert!((a - b).norm() < 1e-9);
    }
}
