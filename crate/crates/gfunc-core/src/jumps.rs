//! Jump functions `f(z, beta)`: the focusing-NLS instance, synthetic
//! polynomial fixtures, and the closed-form toy with a moving `z log z`
//! singularity.
//!
//! Every instance provides its own z-derivative and parameter derivatives,
//! the location and speed of the contour-controlling singularity `z_0`, and
//! enough cut metadata for loop builders to keep clear of non-analyticity.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Clone, Debug)]
pub enum JumpError {
    Domain(String),
    /// The point sits on a declared branchcut of `f`.
    OnCut { z: Complex64 },
    /// An isolated singular point of the requested quantity.
    SingularPoint { z: Complex64 },
}

impl fmt::Display for JumpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JumpError::Domain(msg) => write!(f, "domain error: {msg}"),
            JumpError::OnCut { z } => write!(f, "{z} lies on a branchcut of the jump function"),
            JumpError::SingularPoint { z } => write!(f, "{z} is a singular point"),
        }
    }
}

impl core::error::Error for JumpError {}

pub type JumpResult = Result<Complex64, JumpError>;

/// A jump function together with its derivatives and singularity metadata.
///
/// Parameter indices are zero-based: for the NLS instance
/// `beta = [mu, x, t]` and `k = 0` is the contour-moving parameter.
pub trait JumpFunction {
    fn eval(&self, z: Complex64, beta: &[f64]) -> JumpResult;

    /// d f / d z.
    fn zprime(&self, z: Complex64, beta: &[f64]) -> JumpResult;

    /// d f / d beta_k.
    fn dbeta(&self, z: Complex64, beta: &[f64], k: usize) -> JumpResult;

    fn n_beta(&self) -> usize;

    /// Logarithmic singularity on the contour, if any.
    fn z0(&self, _beta: &[f64]) -> Option<Complex64> {
        None
    }

    /// d z_0 / d beta_0.
    fn z0_prime(&self, _beta: &[f64]) -> Option<Complex64> {
        None
    }

    /// Coefficient of `(z - z0) log(z - z0)`.
    fn c_coeff(&self, _beta: &[f64]) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }

    /// Whether the lower half-plane values come from Schwarz reflection,
    /// making the real axis a jump contour. Loop integrals of such an `f`
    /// must use Schwarz-split loops.
    fn schwarz_reflected(&self) -> bool {
        false
    }

    /// Isolated points loops must stay away from (and not enclose).
    fn singular_points(&self, _beta: &[f64]) -> Vec<Complex64> {
        Vec::new()
    }

    /// Finite off-axis cut segments (endpoints), e.g. `[0, T]` in the
    /// soliton regime of the NLS instance.
    fn cut_segments(&self, _beta: &[f64]) -> Vec<(Complex64, Complex64)> {
        Vec::new()
    }

    /// The jump of `f` across its extra cut at a point `z` on it (for a
    /// Schwarz-reflected `f`, the real-axis jump `f_up - f_down`).
    fn jump_on_extra_cut(&self, _z: Complex64, _beta: &[f64]) -> JumpResult {
        Ok(Complex64::new(0.0, 0.0))
    }
}

// ---------------------------------------------------------------------------
// Focusing-NLS jump function
// ---------------------------------------------------------------------------

/// Below this |T| the T-dependent terms are summed as even series in T,
/// which stay accurate through the solitonless/soliton transition at T = 0.
pub const T_SWITCH: f64 = 1e-2;

/// `T = sqrt(mu^2/4 - 1)` with `Im T >= 0`: real for `mu >= 2`, purely
/// imaginary with positive imaginary part for `0 < mu < 2`.
pub fn nls_t(mu: f64) -> Result<Complex64, JumpError> {
    if !(mu > 0.0) {
        return Err(JumpError::Domain("mu must be positive".into()));
    }
    let d = mu * mu / 4.0 - 1.0;
    if d >= 0.0 {
        Ok(Complex64::new(d.sqrt(), 0.0))
    } else {
        Ok(Complex64::new(0.0, (-d).sqrt()))
    }
}

/// Principal log of `w` with the branchcut rotated to run straight down
/// from the origin.
fn log_down(w: Complex64) -> Complex64 {
    (-Complex64::i() * w).ln() + Complex64::new(0.0, core::f64::consts::FRAC_PI_2)
}

/// Branch of `log(z - w)` analytic in the open upper half-plane minus the
/// vertical segment below `w`, normalized like the principal log at large
/// `|z|` in the upper half-plane.
fn branch_log(z: Complex64, w: Complex64) -> Complex64 {
    if w.im > 1e-14 {
        log_down(z - w)
    } else {
        (z - w).ln()
    }
}

/// The semiclassical focusing-NLS jump function for the sech-profile
/// family, with `beta = [mu, x, t]`.
///
/// Values in the closed upper half-plane come from the explicit formula;
/// values below the axis from Schwarz reflection `f(z) = conj(f(conj z))`.
/// On the real axis the value is the limit from above.
#[derive(Clone, Copy, Debug, Default)]
pub struct NlsJump;

fn check_beta(beta: &[f64]) -> Result<(f64, f64, f64), JumpError> {
    if beta.len() != 3 {
        return Err(JumpError::Domain("NLS expects beta = [mu, x, t]".into()));
    }
    let (mu, x, t) = (beta[0], beta[1], beta[2]);
    if !(mu > 0.0) {
        return Err(JumpError::Domain("mu must be positive".into()));
    }
    Ok((mu, x, t))
}

/// Even-series coefficients of `asinh(T) = sum a_k T^(2k+1)`.
fn asinh_coeffs() -> [f64; 9] {
    let mut a = [0.0f64; 9];
    a[0] = 1.0;
    for k in 1..9 {
        let kf = k as f64;
        a[k] = -a[k - 1] * (2.0 * kf - 1.0) * (2.0 * kf - 1.0) / (2.0 * kf * (2.0 * kf + 1.0));
    }
    a
}

/// The two half-logs plus the inverse-hyperbolic-tangent term of the NLS
/// formula, `(z+T)/2 log(z+T) + (z-T)/2 log(z-T) - T atanh(T/(mu/2))`,
/// with branch choices that keep it analytic in the upper half-plane off
/// the declared cuts. `tval` is passed signed so tests can probe evenness.
fn nls_pair_terms(z: Complex64, mu: f64, tval: Complex64) -> Complex64 {
    let tn = tval.norm();
    if tn <= T_SWITCH {
        // Even series in T around the transition.
        let mut s = z * z.ln();
        let t2 = tval * tval;
        let mut tp = Complex64::new(1.0, 0.0);
        for k in 1..=8i32 {
            tp *= t2;
            let kf = k as f64;
            s += tp / (2.0 * kf * (2.0 * kf - 1.0) * z.powi(2 * k - 1));
        }
        // T * asinh(T) = T * atanh(T/(mu/2)) as an even series.
        let a = asinh_coeffs();
        let mut t_atanh = Complex64::new(0.0, 0.0);
        let mut tp = Complex64::new(1.0, 0.0);
        for &ak in a.iter() {
            tp *= t2;
            t_atanh += tp * ak;
        }
        s - t_atanh
    } else {
        let lp = branch_log(z, -tval);
        let lm = branch_log(z, tval);
        let pair = (z + tval) * 0.5 * lp + (z - tval) * 0.5 * lm;
        // T atanh(T/(mu/2)): for T = i s this is -s atan(2s/mu), real.
        let t_atanh = if tval.im.abs() < 1e-14 {
            let tr = tval.re;
            Complex64::new(tr * (2.0 * tr / mu).atanh(), 0.0)
        } else {
            let s = tval.im;
            Complex64::new(-s * (2.0 * s / mu).atan(), 0.0)
        };
        pair - t_atanh
    }
}

/// Upper-half-plane NLS formula with an explicit signed `T`.
pub(crate) fn nls_f_upper_with_t(
    z: Complex64,
    mu: f64,
    x: f64,
    t: f64,
    tval: Complex64,
) -> Complex64 {
    let half_mu = 0.5 * mu;
    let w = half_mu - z;
    let term1 = if w.norm() == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        w * (Complex64::new(0.0, core::f64::consts::FRAC_PI_2) + w.ln())
    };
    let pair = nls_pair_terms(z, mu, tval);
    term1 + pair - x * z - 2.0 * t * z * z + half_mu * core::f64::consts::LN_2
}

fn nls_fprime_upper(z: Complex64, mu: f64, x: f64, t: f64) -> Complex64 {
    let tval = nls_t(mu).expect("mu checked");
    let w = 0.5 * mu - z;
    let half_log = if tval.norm() <= T_SWITCH {
        z.ln() + 0.5 * (1.0 - (tval / z) * (tval / z)).ln()
    } else {
        0.5 * (branch_log(z, -tval) + branch_log(z, tval))
    };
    Complex64::new(0.0, -core::f64::consts::FRAC_PI_2) - w.ln() + half_log - x - 4.0 * t * z
}

fn nls_fmu_upper(z: Complex64, mu: f64) -> Complex64 {
    let tval = nls_t(mu).expect("mu checked");
    let w = 0.5 * mu - z;
    let head = Complex64::new(0.0, core::f64::consts::FRAC_PI_4)
        + 0.5 * w.ln()
        + 0.5 * core::f64::consts::LN_2;
    if tval.norm() <= T_SWITCH {
        // (mu/(8T)) [log(z+T) - log(z-T) - 2 atanh(2T/mu)] as an even series.
        let a = asinh_coeffs();
        let t2 = tval * tval;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut tp = Complex64::new(1.0, 0.0);
        for (k, &ak) in a.iter().enumerate() {
            let kf = k as f64;
            sum += tp * (1.0 / ((2.0 * kf + 1.0) * z.powi(2 * k as i32 + 1)) - ak);
            tp *= t2;
        }
        head + 0.25 * mu * sum
    } else {
        let bracket = branch_log(z, -tval)
            - branch_log(z, tval)
            - 2.0
                * if tval.im.abs() < 1e-14 {
                    Complex64::new((2.0 * tval.re / mu).atanh(), 0.0)
                } else {
                    Complex64::new(0.0, (2.0 * tval.im / mu).atan())
                };
        head + mu / (8.0 * tval) * bracket
    }
}

impl NlsJump {
    fn reflected<F>(&self, z: Complex64, upper: F) -> Complex64
    where
        F: Fn(Complex64) -> Complex64,
    {
        if z.im >= 0.0 {
            upper(z)
        } else {
            upper(z.conj()).conj()
        }
    }

    fn check_point(&self, z: Complex64, mu: f64) -> Result<(), JumpError> {
        let tval = nls_t(mu)?;
        let zu = if z.im >= 0.0 { z } else { z.conj() };
        // The vertical cut [0, T] in the soliton regime.
        if tval.im > 0.0 {
            let seg_t = zu.im.clamp(0.0, tval.im);
            let d = (zu - Complex64::new(0.0, seg_t)).norm();
            if d <= 1e-12 * (1.0 + zu.norm()) {
                return Err(JumpError::OnCut { z });
            }
        }
        Ok(())
    }
}

impl JumpFunction for NlsJump {
    fn eval(&self, z: Complex64, beta: &[f64]) -> JumpResult {
        let (mu, x, t) = check_beta(beta)?;
        self.check_point(z, mu)?;
        let tval = nls_t(mu)?;
        Ok(self.reflected(z, |zu| nls_f_upper_with_t(zu, mu, x, t, tval)))
    }

    fn zprime(&self, z: Complex64, beta: &[f64]) -> JumpResult {
        let (mu, x, t) = check_beta(beta)?;
        self.check_point(z, mu)?;
        if (z - Complex64::new(0.5 * mu, 0.0)).norm() <= 1e-15 * (1.0 + z.norm()) {
            return Err(JumpError::SingularPoint { z });
        }
        Ok(self.reflected(z, |zu| nls_fprime_upper(zu, mu, x, t)))
    }

    fn dbeta(&self, z: Complex64, beta: &[f64], k: usize) -> JumpResult {
        let (mu, _x, _t) = check_beta(beta)?;
        match k {
            0 => {
                self.check_point(z, mu)?;
                if z.norm() <= 1e-15 {
                    return Err(JumpError::SingularPoint { z });
                }
                if (z - Complex64::new(0.5 * mu, 0.0)).norm() <= 1e-15 * (1.0 + z.norm()) {
                    return Err(JumpError::SingularPoint { z });
                }
                Ok(self.reflected(z, |zu| nls_fmu_upper(zu, mu)))
            }
            1 => Ok(-z),
            2 => Ok(-2.0 * z * z),
            _ => Err(JumpError::Domain("NLS has three parameters".into())),
        }
    }

    fn n_beta(&self) -> usize {
        3
    }

    fn z0(&self, beta: &[f64]) -> Option<Complex64> {
        Some(Complex64::new(0.5 * beta[0], 0.0))
    }

    fn z0_prime(&self, _beta: &[f64]) -> Option<Complex64> {
        Some(Complex64::new(0.5, 0.0))
    }

    fn c_coeff(&self, _beta: &[f64]) -> Complex64 {
        Complex64::new(-1.0, 0.0)
    }

    fn schwarz_reflected(&self) -> bool {
        true
    }

    fn singular_points(&self, beta: &[f64]) -> Vec<Complex64> {
        match nls_t(beta[0]) {
            Ok(tval) => vec![tval, -tval, Complex64::new(0.0, 0.0)],
            Err(_) => vec![],
        }
    }

    fn cut_segments(&self, beta: &[f64]) -> Vec<(Complex64, Complex64)> {
        match nls_t(beta[0]) {
            Ok(tval) if tval.im > 0.0 => {
                vec![
                    (Complex64::new(0.0, 0.0), tval),
                    (Complex64::new(0.0, 0.0), -tval),
                ]
            }
            _ => Vec::new(),
        }
    }

    fn jump_on_extra_cut(&self, z: Complex64, beta: &[f64]) -> JumpResult {
        let (mu, x, t) = check_beta(beta)?;
        if z.im.abs() > 1e-9 * (1.0 + z.norm()) {
            return Err(JumpError::Domain(
                "the extra cut of the NLS f is the real axis".into(),
            ));
        }
        let tval = nls_t(mu)?;
        let up = nls_f_upper_with_t(Complex64::new(z.re, 0.0), mu, x, t, tval);
        Ok(up - up.conj())
    }
}

// ---------------------------------------------------------------------------
// Synthetic fixtures
// ---------------------------------------------------------------------------

/// Polynomial coefficient with affine parameter dependence:
/// `c(beta) = constant + sum_m linear[m].1 * beta[linear[m].0]`.
#[derive(Clone, Debug, Default)]
pub struct PolyCoeff {
    pub constant: Complex64,
    pub linear: Vec<(usize, Complex64)>,
}

impl PolyCoeff {
    pub fn constant(c: Complex64) -> Self {
        PolyCoeff {
            constant: c,
            linear: Vec::new(),
        }
    }

    pub fn of_beta(k: usize, w: Complex64) -> Self {
        PolyCoeff {
            constant: Complex64::new(0.0, 0.0),
            linear: vec![(k, w)],
        }
    }

    fn value(&self, beta: &[f64]) -> Complex64 {
        let mut v = self.constant;
        for &(k, w) in &self.linear {
            v += w * beta[k];
        }
        v
    }

    fn dbeta(&self, k: usize) -> Complex64 {
        self.linear
            .iter()
            .filter(|&&(m, _)| m == k)
            .map(|&(_, w)| w)
            .sum()
    }
}

/// Entire polynomial jump function `f(z) = sum_k c_k(beta) z^k`.
#[derive(Clone, Debug)]
pub struct SyntheticPoly {
    pub coeffs: Vec<PolyCoeff>,
    n_beta: usize,
}

impl SyntheticPoly {
    pub fn new(coeffs: Vec<PolyCoeff>, n_beta: usize) -> Self {
        SyntheticPoly { coeffs, n_beta }
    }

    /// Constant-coefficient polynomial with no parameters.
    pub fn fixed(coeffs: &[Complex64]) -> Self {
        SyntheticPoly {
            coeffs: coeffs.iter().map(|&c| PolyCoeff::constant(c)).collect(),
            n_beta: 0,
        }
    }

    /// The `-x z - 2 t z^2` tail of the NLS formula as a standalone
    /// fixture, with `beta = [x, t]`.
    pub fn nls_tail() -> Self {
        SyntheticPoly {
            coeffs: vec![
                PolyCoeff::constant(Complex64::new(0.0, 0.0)),
                PolyCoeff::of_beta(0, Complex64::new(-1.0, 0.0)),
                PolyCoeff::of_beta(1, Complex64::new(-2.0, 0.0)),
            ],
            n_beta: 2,
        }
    }
}

impl JumpFunction for SyntheticPoly {
    fn eval(&self, z: Complex64, beta: &[f64]) -> JumpResult {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c.value(beta);
        }
        Ok(acc)
    }

    fn zprime(&self, z: Complex64, beta: &[f64]) -> JumpResult {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * z + c.value(beta) * k as f64;
        }
        Ok(acc)
    }

    fn dbeta(&self, z: Complex64, _beta: &[f64], k: usize) -> JumpResult {
        if k >= self.n_beta {
            return Err(JumpError::Domain("parameter index out of range".into()));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c.dbeta(k);
        }
        Ok(acc)
    }

    fn n_beta(&self) -> usize {
        self.n_beta
    }
}

/// Translation family `f(z, s) = p(z - s)` for a fixed polynomial `p`,
/// `beta = [s]`. Along its solution branches every branchpoint moves with
/// unit speed, an exact covariance oracle.
#[derive(Clone, Debug)]
pub struct TranslatedPoly {
    pub coeffs: Vec<Complex64>,
}

impl TranslatedPoly {
    fn horner(&self, w: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * w + c;
        }
        acc
    }

    fn horner_prime(&self, w: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * w + c * k as f64;
        }
        acc
    }
}

impl JumpFunction for TranslatedPoly {
    fn eval(&self, z: Complex64, beta: &[f64]) -> JumpResult {
        Ok(self.horner(z - beta[0]))
    }

    fn zprime(&self, z: Complex64, beta: &[f64]) -> JumpResult {
        Ok(self.horner_prime(z - beta[0]))
    }

    fn dbeta(&self, z: Complex64, beta: &[f64], k: usize) -> JumpResult {
        if k != 0 {
            return Err(JumpError::Domain(
                "translation family has one parameter".into(),
            ));
        }
        Ok(-self.horner_prime(z - beta[0]))
    }

    fn n_beta(&self) -> usize {
        1
    }
}

// ---------------------------------------------------------------------------
// Closed-form toy
// ---------------------------------------------------------------------------

/// The toy `f(z, mu) = c(mu) (z - z0(mu)) log(z - z0(mu))` with affine
/// `c(mu) = c0 + c1 mu` and `z0(mu) = z00 + z01 mu`, principal log. Its
/// path integrals through `z0` and their mu-derivative have closed forms,
/// used as an exact oracle for differentiation under the integral sign.
#[derive(Clone, Copy, Debug)]
pub struct ToyJump {
    pub c0: Complex64,
    pub c1: Complex64,
    pub z00: Complex64,
    pub z01: Complex64,
}

impl ToyJump {
    pub fn c_of(&self, mu: f64) -> Complex64 {
        self.c0 + self.c1 * mu
    }

    pub fn z0_of(&self, mu: f64) -> Complex64 {
        self.z00 + self.z01 * mu
    }

    /// Closed form of `int f dz` over `[z1, z0] u [z0, z2]`.
    pub fn closed_i1(&self, z1: Complex64, z2: Complex64, mu: f64) -> Complex64 {
        let z0 = self.z0_of(mu);
        let half = Complex64::new(0.5, 0.0);
        let term = |w: Complex64| (w.ln() - half) * w * w * 0.5;
        self.c_of(mu) * (term(z2 - z0) - term(z1 - z0))
    }

    /// Closed form of `d/dmu int f dz`, equal to `int df/dmu dz`.
    pub fn closed_di1_dmu(&self, z1: Complex64, z2: Complex64, mu: f64) -> Complex64 {
        let z0 = self.z0_of(mu);
        let half = Complex64::new(0.5, 0.0);
        let term = |w: Complex64| (w.ln() - half) * w * w * 0.5;
        let wlog = |w: Complex64| w * w.ln();
        self.c1 * (term(z2 - z0) - term(z1 - z0))
            - self.c_of(mu) * self.z01 * (wlog(z2 - z0) - wlog(z1 - z0))
    }
}

impl JumpFunction for ToyJump {
    fn eval(&self, z: Complex64, beta: &[f64]) -> JumpResult {
        let mu = beta[0];
        let w = z - self.z0_of(mu);
        if w.norm() == 0.0 {
            return Ok(Complex64::new(0.0, 0.0)); // removable: w log w -> 0
        }
        Ok(self.c_of(mu) * w * w.ln())
    }

    fn zprime(&self, z: Complex64, beta: &[f64]) -> JumpResult {
        let mu = beta[0];
        let w = z - self.z0_of(mu);
        if w.norm() == 0.0 {
            return Err(JumpError::SingularPoint { z });
        }
        Ok(self.c_of(mu) * (w.ln() + 1.0))
    }

    fn dbeta(&self, z: Complex64, beta: &[f64], k: usize) -> JumpResult {
        if k != 0 {
            return Err(JumpError::Domain("toy has a single parameter".into()));
        }
        let mu = beta[0];
        let w = z - self.z0_of(mu);
        if w.norm() == 0.0 {
            return Err(JumpError::SingularPoint { z });
        }
        Ok(self.c1 * w * w.ln() - self.c_of(mu) * self.z01 * (w.ln() + 1.0))
    }

    fn n_beta(&self) -> usize {
        1
    }

    fn z0(&self, beta: &[f64]) -> Option<Complex64> {
        Some(self.z0_of(beta[0]))
    }

    fn z0_prime(&self, _beta: &[f64]) -> Option<Complex64> {
        Some(self.z01)
    }

    fn c_coeff(&self, beta: &[f64]) -> Complex64 {
        self.c_of(beta[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validation::rng::SplitMix64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn fd_mu(f: impl Fn(f64) -> Complex64, mu: f64, h: f64) -> Complex64 {
        (f(mu + h) - f(mu - h)) / (2.0 * h)
    }

    fn fd_z(f: impl Fn(Complex64) -> Complex64, z: Complex64, h: f64) -> Complex64 {
        (f(z + h) - f(z - h)) / (2.0 * h)
    }

    #[test]
    fn t_parameter_values() {
        assert!((nls_t(2.0).unwrap()).norm() < 1e-15);
        assert!((nls_t(4.0).unwrap() - c(3.0f64.sqrt(), 0.0)).norm() < 1e-15);
        assert!((nls_t(1.0).unwrap() - c(0.0, 3.0f64.sqrt() / 2.0)).norm() < 1e-15);
        assert!(nls_t(0.0).is_err());
        assert!(nls_t(-1.0).is_err());
    }

    #[test]
    fn nls_f_term_by_term() {
        // Independent re-evaluation of each term of the formula at
        // (z, mu, x, t) = (i, 3, 1, 0), where T = sqrt(5)/2 is real.
        let f = NlsJump;
        let beta = [3.0, 1.0, 0.0];
        let z = c(0.0, 1.0);
        let tval = (3.0f64 * 3.0 / 4.0 - 1.0).sqrt();
        let term1 =
            (c(1.5, 0.0) - z) * (c(0.0, core::f64::consts::FRAC_PI_2) + (c(1.5, 0.0) - z).ln());
        let term2 = (z + tval) * 0.5 * (z + tval).ln() + (z - tval) * 0.5 * (z - tval).ln();
        let term3 = -tval * (tval / 1.5).atanh();
        let term4 = -1.0 * z + 1.5 * core::f64::consts::LN_2;
        let expect = term1 + term2 + term3 + term4;
        let got = f.eval(z, &beta).unwrap();
        assert!((got - expect).norm() < 1e-13, "got {got}, expect {expect}");
    }

    #[test]
    fn schwarz_reflection_identity() {
        let f = NlsJump;
        let mut rng = SplitMix64::new(7);
        for &mu in &[1.3, 2.0, 2.7] {
            let beta = [mu, 0.7, 0.15];
            for _ in 0..25 {
                let z = c(rng.next_f64() * 4.0 - 2.0, rng.next_f64() * 2.0 + 0.05);
                let up = f.eval(z, &beta).unwrap();
                let dn = f.eval(z.conj(), &beta).unwrap();
                assert!((dn - up.conj()).norm() < 1e-13 * up.norm().max(1.0));
            }
        }
    }

    #[test]
    fn evenness_in_t() {
        // f evaluated with T and -T agrees to machine precision.
        for &mu in &[1.5, 2.5] {
            let tval = nls_t(mu).unwrap();
            for &z in &[c(0.9, 0.8), c(-0.4, 1.3), c(2.1, 0.2)] {
                let plus = nls_f_upper_with_t(z, mu, 0.3, 0.1, tval);
                let minus = nls_f_upper_with_t(z, mu, 0.3, 0.1, -tval);
                assert!(
                    (plus - minus).norm() <= 1e-12 * plus.norm().max(1.0),
                    "mu={mu} z={z}: {plus} vs {minus}"
                );
            }
        }
    }

    #[test]
    fn series_matches_direct_at_switch() {
        // abs(T) exactly at the switch, from both regimes.
        for &sgn in &[1.0f64, -1.0] {
            let t2 = sgn * T_SWITCH * T_SWITCH;
            let mu = 2.0 * (1.0 + t2).sqrt();
            let tval = nls_t(mu).unwrap();
            assert!((tval.norm() - T_SWITCH).abs() < 1e-12);
            for &z in &[c(0.8, 0.6), c(-1.1, 0.9)] {
                let series = nls_pair_terms(z, mu, tval);
                // Force the direct branch by scaling T just over the switch.
                let direct = {
                    let blow = tval * (1.0 + 1e-13);
                    let lp = branch_log(z, -blow);
                    let lm = branch_log(z, blow);
                    let pair = (z + blow) * 0.5 * lp + (z - blow) * 0.5 * lm;
                    let t_atanh = if blow.im.abs() < 1e-14 {
                        Complex64::new(blow.re * (2.0 * blow.re / mu).atanh(), 0.0)
                    } else {
                        Complex64::new(-blow.im * (2.0 * blow.im / mu).atan(), 0.0)
                    };
                    pair - t_atanh
                };
                assert!(
                    (series - direct).norm() < 1e-9,
                    "series/direct mismatch at z={z}: {:.3e}",
                    (series - direct).norm()
                );
            }
        }
    }

    #[test]
    fn fprime_matches_finite_differences() {
        let f = NlsJump;
        for &mu in &[1.5, 2.2, 3.0] {
            let beta = [mu, 1.0, 0.3];
            let z = c(0.4, 2.0);
            let got = f.zprime(z, &beta).unwrap();
            let fd = fd_z(|w| f.eval(w, &beta).unwrap(), z, 1e-5);
            assert!(
                (got - fd).norm() < 1e-8 * got.norm().max(1.0),
                "mu={mu}: {got} vs {fd}"
            );
        }
    }

    #[test]
    fn fprime_linear_in_x_and_t() {
        let f = NlsJump;
        let z = c(0.3, 1.1);
        let a = f.zprime(z, &[2.5, 1.0, 0.2]).unwrap();
        let b = f.zprime(z, &[2.5, 2.0, 0.2]).unwrap();
        assert!((b - a + 1.0).norm() < 1e-13);
        let c2 = f.zprime(z, &[2.5, 1.0, 1.2]).unwrap();
        assert!((c2 - a + 4.0 * z).norm() < 1e-12);
    }

    #[test]
    fn fmu_matches_finite_differences() {
        let f = NlsJump;
        for &mu in &[1.4, 3.0] {
            let beta = [mu, 0.8, 0.1];
            let z = c(0.0, 2.0);
            let got = f.dbeta(z, &beta, 0).unwrap();
            let fd = fd_mu(|m| f.eval(z, &[m, 0.8, 0.1]).unwrap(), mu, 1e-5);
            assert!(
                (got - fd).norm() < 1e-7 * got.norm().max(1.0),
                "mu={mu}: formula {got} vs fd {fd}"
            );
        }
    }

    #[test]
    fn fmu_at_transition_value() {
        // At mu = 2 the removable-singularity limit applies. The constant
        // here is (ln 2)/2, the exact mu-derivative of the (mu/2) ln 2 term.
        let f = NlsJump;
        let z = c(0.0, 1.0);
        let got = f.dbeta(z, &[2.0, 1.0, 0.0], 0).unwrap();
        let expect = c(0.0, core::f64::consts::FRAC_PI_4)
            + 0.5 * (c(1.0, 0.0) - z).ln()
            + 0.5 * core::f64::consts::LN_2
            + 0.5 / z
            - 0.5;
        assert!((got - expect).norm() < 1e-12, "got {got} expect {expect}");
        // and it is the honest derivative across the transition
        let fd = fd_mu(|m| f.eval(z, &[m, 1.0, 0.0]).unwrap(), 2.0, 1e-5);
        assert!((got - fd).norm() < 1e-8);
    }

    #[test]
    fn fx_ft_are_exact() {
        let f = NlsJump;
        let z = c(0.7, 0.9);
        let beta = [2.4, 0.5, 0.2];
        assert_eq!(f.dbeta(z, &beta, 1).unwrap(), -z);
        assert_eq!(f.dbeta(z, &beta, 2).unwrap(), -2.0 * z * z);
    }

    #[test]
    fn fmu_log_growth_near_z0() {
        // f_mu behaves like (1/2) log(z - z0) approaching z0 off-axis.
        let f = NlsJump;
        let beta = [2.6, 0.4, 0.1];
        let z0 = f.z0(&beta).unwrap();
        let dir = Complex64::from_polar(1.0, 1.1);
        for &eps in &[1e-2, 1e-4, 1e-6] {
            let v = f.dbeta(z0 + dir * eps, &beta, 0).unwrap();
            let sub = v - 0.5 * Complex64::new(eps.ln(), 0.0);
            assert!(
                sub.norm() < 10.0,
                "f_mu - (1/2) log|z-z0| should stay bounded, got {sub}"
            );
        }
    }

    #[test]
    fn real_axis_jump_is_linear_and_vanishes_at_z0() {
        let f = NlsJump;
        let beta = [2.4, 0.9, 0.05];
        let z0 = 1.2;
        let jump_at = |x: f64| f.jump_on_extra_cut(c(x, 0.0), &beta).unwrap();
        assert!(jump_at(z0).norm() < 1e-10);
        // Linear on each side of z0: second differences vanish.
        for &s in &[-1.0, 1.0] {
            let j1 = jump_at(z0 + s * 0.01);
            let j2 = jump_at(z0 + s * 0.02);
            let j3 = jump_at(z0 + s * 0.03);
            let second = j3 - 2.0 * j2 + j1;
            assert!(second.norm() < 1e-10, "jump not linear: {second}");
        }
    }

    #[test]
    fn on_cut_errors() {
        let f = NlsJump;
        // Soliton regime: the segment [0, T] is a cut.
        let beta = [1.0, 0.0, 0.0];
        let tmag = 3.0f64.sqrt() / 2.0;
        let res = f.eval(c(0.0, 0.5 * tmag), &beta);
        assert!(matches!(res, Err(JumpError::OnCut { .. })));
        assert!(matches!(
            f.eval(c(1.0, 1.0), &[-0.5, 0.0, 0.0]),
            Err(JumpError::Domain(_))
        ));
        assert!(matches!(
            f.dbeta(c(0.0, 0.0), &[2.0, 0.0, 0.0], 0),
            Err(JumpError::SingularPoint { .. })
        ));
    }

    #[test]
    fn synthetic_poly_matches_nls_tail() {
        let tail = SyntheticPoly::nls_tail();
        let nls = NlsJump;
        let z = c(0.3, 0.8);
        let (x, t) = (1.1, 0.4);
        let got = tail.eval(z, &[x, t]).unwrap();
        // Difference of NLS f at (x, t) and (0, 0) isolates the tail.
        let full = nls.eval(z, &[2.5, x, t]).unwrap();
        let base = nls.eval(z, &[2.5, 0.0, 0.0]).unwrap();
        assert!((got - (full - base)).norm() < 1e-12);
        assert_eq!(tail.dbeta(z, &[x, t], 0).unwrap(), -z);
    }

    #[test]
    fn synthetic_poly_derivatives() {
        let f = SyntheticPoly::fixed(&[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let z = c(0.4, -0.3);
        assert!((f.zprime(z, &[]).unwrap() - 2.0 * z).norm() < 1e-15);
        let g = SyntheticPoly::new(
            vec![
                PolyCoeff::constant(c(0.0, 0.0)),
                PolyCoeff::of_beta(0, c(-1.0, 0.0)),
            ],
            1,
        );
        assert_eq!(g.dbeta(z, &[3.0], 0).unwrap(), -z);
    }

    #[test]
    fn translated_poly_derivative() {
        let p = TranslatedPoly {
            coeffs: vec![c(1.0, 0.0), c(0.0, 2.0), c(-0.5, 0.0)],
        };
        let z = c(0.9, 0.4);
        let s = 0.3;
        let fd = fd_mu(|sv| p.eval(z, &[sv]).unwrap(), s, 1e-6);
        let got = p.dbeta(z, &[s], 0).unwrap();
        assert!((got - fd).norm() < 1e-8);
    }

    #[test]
    fn toy_closed_forms() {
        // c = 1, z0 = 0: I1 over [-1,0] u [0,1] is -i pi / 2.
        let toy = ToyJump {
            c0: c(1.0, 0.0),
            c1: c(0.0, 0.0),
            z00: c(0.0, 0.0),
            z01: c(0.0, 0.0),
        };
        let i1 = toy.closed_i1(c(-1.0, 0.0), c(1.0, 0.0), 0.0);
        assert!((i1 - c(0.0, -core::f64::consts::FRAC_PI_2)).norm() < 1e-14);

        // c = 1, z0(mu) = mu at mu = 0: dI1/dmu = -i pi.
        let moving = ToyJump {
            c0: c(1.0, 0.0),
            c1: c(0.0, 0.0),
            z00: c(0.0, 0.0),
            z01: c(1.0, 0.0),
        };
        let d = moving.closed_di1_dmu(c(-1.0, 0.0), c(1.0, 0.0), 0.0);
        assert!(
            (d - c(0.0, -core::f64::consts::PI)).norm() < 1e-14,
            "got {d}"
        );

        // Linearity in c: c(mu) = mu doubles I1 when mu doubles.
        let linear_c = ToyJump {
            c0: c(0.0, 0.0),
            c1: c(1.0, 0.0),
            z00: c(0.2, 0.1),
            z01: c(0.0, 0.0),
        };
        let a = linear_c.closed_i1(c(-1.0, 0.0), c(1.0, 0.0), 1.0);
        let b = linear_c.closed_i1(c(-1.0, 0.0), c(1.0, 0.0), 2.0);
        assert!((b - 2.0 * a).norm() < 1e-14);

        // Zero c: I1 = 0 exactly.
        let zero = ToyJump {
            c0: c(0.0, 0.0),
            c1: c(0.0, 0.0),
            z00: c(0.0, 0.0),
            z01: c(1.0, 0.0),
        };
        assert_eq!(zero.closed_i1(c(-1.0, 0.0), c(1.0, 0.0), 0.7), c(0.0, 0.0));
    }

    #[test]
    fn derivative_consistency_sampled() {
        // zprime and dbeta against centered differences at random off-cut
        // points, for the NLS and toy instances.
        let mut rng = SplitMix64::new(0xfeed);
        let nls = NlsJump;
        let toy = ToyJump {
            c0: c(0.8, 0.1),
            c1: c(0.3, 0.0),
            z00: c(0.1, 0.05),
            z01: c(0.9, 0.2),
        };
        let mut checked = 0;
        while checked < 50 {
            let z = c(rng.next_f64() * 4.0 - 2.0, rng.next_f64() * 1.8 + 0.2);
            let beta = [2.0 + rng.next_f64(), rng.next_f64(), rng.next_f64() * 0.3];
            let step = 1e-5;
            let Ok(p) = nls.zprime(z, &beta) else { continue };
            let fd = fd_z(|w| nls.eval(w, &beta).unwrap(), z, step);
            assert!((p - fd).norm() < 10.0 * step * step * p.norm().max(10.0));

            let q = toy.zprime(z, &[beta[0]]).unwrap();
            let fdq = fd_z(|w| toy.eval(w, &[beta[0]]).unwrap(), z, step);
            assert!((q - fdq).norm() < 10.0 * step * step * q.norm().max(10.0));

            let dm = toy.dbeta(z, &[beta[0]], 0).unwrap();
            let fdm = fd_mu(|m| toy.eval(z, &[m]).unwrap(), beta[0], step);
            assert!((dm - fdm).norm() < 10.0 * step * step * dm.norm().max(10.0));
            checked += 1;
        }
    }
}
