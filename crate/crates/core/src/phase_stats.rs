//! Distributions of the per-element quantities `v = cos(theta)`,
//! `g v` and `z = h g v`, and the characteristic functions of `z` and of the
//! combined amplitude.
//!
//! Characteristic functions follow `phi(t) = E[e^{jtz}]`; for the two-level
//! case that gives `phi_z(t) = 2 / (2 - jt)`.
//!
//! Notation used below: `A = tan(pi/L)` and, for `psi` in `(0, pi/2)`,
//! `s(psi) = sqrt(1 + A^2 / sin^2 psi)`. The density of `z` is
//!
//! ```text
//! f_z(z) = (2L/pi) int_0^{pi/2} (e^{-2z} - e^{-2 z s(psi)}) dpsi
//! ```
//!
//! written so the integrand is nonnegative and free of cancellation. Every
//! formula containing `A` is dispatched to its closed-form limit at `L = 2`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::channel::RisConfig;
use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_breaks, QuadTol};
use crate::specfun::{erf_raw, Tolerance};

/// Complex scalar used for characteristic-function values.
pub type ComplexValue = Complex64;

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// Node count for the Gauss-Chebyshev characteristic function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GcqSpec {
    n_nodes: usize,
}

impl GcqSpec {
    pub fn new(n_nodes: usize) -> Result<Self> {
        if n_nodes == 0 {
            return Err(Error::Config("GCQ needs at least one node".into()));
        }
        Ok(Self { n_nodes })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }
}

impl Default for GcqSpec {
    fn default() -> Self {
        Self { n_nodes: 20 }
    }
}

fn check_levels(levels: u32) -> Result<()> {
    if levels < 2 {
        return Err(Error::Config(format!("L must be at least 2, got {levels}")));
    }
    Ok(())
}

fn tan_pi_over(levels: u32) -> f64 {
    (PI / levels as f64).tan()
}

/// Density of `v = cos(theta)` with `theta` uniform on `[-pi/L, pi/L]`.
///
/// The density has an integrable singularity at `v = 1`, which is reported
/// as a domain error; integrate with open endpoints.
pub fn pdf_v(v: f64, levels: u32) -> Result<f64> {
    check_levels(levels)?;
    if v == 1.0 {
        return Err(Error::Domain("pdf_v is singular at v = 1".into()));
    }
    let lower = (PI / levels as f64).cos();
    if v >= lower && v < 1.0 {
        Ok(levels as f64 / (PI * ((1.0 - v) * (1.0 + v)).sqrt()))
    } else {
        Ok(0.0)
    }
}

/// Density of `g v`: `(L/sqrt(pi)) e^{-u^2} erf(u tan(pi/L))`, which is the
/// half-normal `(2/sqrt(pi)) e^{-u^2}` at `L = 2`.
pub fn pdf_gv(u: f64, levels: u32) -> Result<f64> {
    check_levels(levels)?;
    if !(u >= 0.0) {
        return Err(Error::Domain(format!("pdf_gv requires u >= 0, got {u}")));
    }
    let gauss = (-u * u).exp();
    if levels == 2 {
        return Ok(2.0 * FRAC_1_SQRT_PI * gauss);
    }
    Ok(levels as f64 * FRAC_1_SQRT_PI * gauss * erf_raw(u * tan_pi_over(levels)))
}

// 1/s(psi) = sin(psi) / sqrt(sin^2 psi + A^2), in (0, cos(pi/L)].
fn inv_s(psi: f64, a: f64) -> f64 {
    let sn = psi.sin();
    sn / sn.hypot(a)
}

// s(psi) - 1 without cancellation: (s^2 - 1) / (s + 1) with s^2 - 1 = q^2.
fn s_minus_one(psi: f64, a: f64) -> f64 {
    let q = a / psi.sin();
    if !q.is_finite() {
        return f64::INFINITY;
    }
    q * (q / (q.hypot(1.0) + 1.0))
}

/// Breakpoints on `[0, pi/2]` clustered around `psi ~ asin(c)`, where an
/// integrand in `psi` changes scale.
fn psi_breaks(c: f64) -> Vec<f64> {
    let mut breaks = vec![0.0];
    if c < 1.0 {
        let centre = c.asin();
        for f in [1.0 / 64.0, 1.0 / 8.0, 0.5, 1.0, 2.0, 8.0] {
            let p = centre * f;
            if p > *breaks.last().unwrap() && p < FRAC_PI_2 {
                breaks.push(p);
            }
        }
    }
    breaks.push(FRAC_PI_2);
    breaks
}

fn psi_tol() -> QuadTol {
    QuadTol::new(1e-300, 1e-14, 2_000)
}

/// Density of `z = h g v`.
///
/// Exactly `2 e^{-2z}` at `L = 2`; for `L > 2` the angular integral is
/// evaluated adaptively. Vanishes at the origin for `L > 2`.
pub fn pdf_z(z: f64, levels: u32) -> Result<f64> {
    check_levels(levels)?;
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("pdf_z requires finite z >= 0, got {z}")));
    }
    if levels == 2 {
        return Ok(2.0 * (-2.0 * z).exp());
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    let a = tan_pi_over(levels);
    let envelope = (-2.0 * z).exp();
    let integrand = |psi: f64| envelope * -(-2.0 * z * s_minus_one(psi, a)).exp_m1();
    // The integrand switches from ~e^{-2z} to ~0 around sin(psi) ~ 2 z A.
    let breaks = psi_breaks(2.0 * z * a);
    let r = integrate_breaks(integrand, &breaks, psi_tol())?;
    Ok(2.0 * levels as f64 / PI * r.value)
}

// e^{-x} - 1 + x, by its series where the closed form cancels.
fn exp_remainder(x: f64) -> f64 {
    if x > 0.5 {
        return x + (-x).exp_m1();
    }
    let (mut term, mut sum) = (0.5 * x * x, 0.0);
    for k in 3..40 {
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
        term *= -x / k as f64;
    }
    sum
}

/// Distribution function of `z`,
///
/// ```text
/// F_z(z) = (L/pi) int_0^{pi/2} (1 - e^{-2z}) - (1 - e^{-2 z s(psi)}) / s(psi) dpsi
/// ```
///
/// obtained by integrating the density under the angular integral.
pub fn cdf_z(z: f64, levels: u32) -> Result<f64> {
    check_levels(levels)?;
    if !(z >= 0.0) {
        return Err(Error::Domain(format!("cdf_z requires z >= 0, got {z}")));
    }
    if levels == 2 {
        return Ok(-(-2.0 * z).exp_m1());
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if z.is_infinite() {
        return Ok(1.0);
    }
    let a = tan_pi_over(levels);
    let u = 2.0 * z;
    // (1 - e^{-u}) - r (1 - e^{-u/r}) = r g(u/r) - g(u); both terms are O(u^2),
    // so the O(u) cancellation of the direct form is avoided.
    let integrand = |psi: f64| {
        let r = inv_s(psi, a);
        let scaled = if r > 0.0 { r * exp_remainder(u / r) } else { u };
        scaled - exp_remainder(u)
    };
    let r = integrate_breaks(integrand, &psi_breaks(2.0 * z * a), psi_tol())?;
    Ok((levels as f64 / PI * r.value).clamp(0.0, 1.0))
}

/// Leading small-`z` behaviour of `pdf_z` for `L > 2`:
/// `(4L/pi) A z ln(1 / (z A))`.
pub fn pdf_z_small(z: f64, levels: u32) -> Result<f64> {
    check_levels(levels)?;
    if levels == 2 {
        return Err(Error::Regime(
            "the small-z asymptote applies to L > 2; pdf_z is exactly 2e^{-2z} at L = 2".into(),
        ));
    }
    let a = tan_pi_over(levels);
    if !(z > 0.0 && z * a < 1.0) {
        return Err(Error::Domain(format!(
            "pdf_z_small requires 0 < z < 1/tan(pi/L) = {}, got {z}",
            1.0 / a
        )));
    }
    Ok(4.0 * levels as f64 / PI * a * z * (1.0 / (z * a)).ln())
}

fn two_level_chf(tau: ComplexValue) -> ComplexValue {
    Complex64::new(2.0, 0.0) / (Complex64::new(2.0, 0.0) - Complex64::i() * tau)
}

// The angular integral below, for L > 2 and Im(tau) > -2.
fn chf_z_angular(tau: ComplexValue, levels: u32, tol: Tolerance) -> Result<ComplexValue> {
    let a = tan_pi_over(levels);
    let j_tau = Complex64::i() * tau;
    let two = Complex64::new(2.0, 0.0);
    let integrand = |psi: f64| {
        let r = inv_s(psi, a);
        // 1 - r = (A^2 / (sin^2 + A^2)) / (1 + r)
        let sn = psi.sin();
        let one_minus_r = a * a / (sn * sn + a * a) / (1.0 + r);
        Complex64::new(one_minus_r, 0.0) / (two - j_tau * r)
    };
    // Scale change where |tau| / s(psi) ~ 2, i.e. sin(psi) ~ 2A/|tau|.
    let at = tau.norm();
    let breaks = psi_breaks(if at > 0.0 { 2.0 * a / at } else { 2.0 });
    let quad = QuadTol::new(tol.abs_tol * 1e-3, tol.rel_tol.min(1e-13), 4_000);
    let r = integrate_breaks(integrand, &breaks, quad)?;
    Ok(Complex64::new(4.0 * levels as f64 / PI, 0.0) / (two - j_tau) * r.value)
}

/// Characteristic function `E[e^{jtz}]` by adaptive quadrature.
///
/// The oscillatory `z`-integral of `f_z(z) e^{jtz}` is done in closed form
/// under the angular integral, leaving
///
/// ```text
/// phi_z(t) = 4L / (pi (2 - jt)) * int_0^{pi/2} (1 - 1/s) / (2 - jt/s) dpsi
/// ```
///
/// which is smooth in `psi` and has no cancellation for large `|t|`.
/// `phi_z(-t) = conj(phi_z(t))` holds exactly.
pub fn chf_z(t: f64, levels: u32, tol: Tolerance) -> Result<ComplexValue> {
    check_levels(levels)?;
    if !t.is_finite() {
        return Err(Error::Domain(format!("chf_z requires finite t, got {t}")));
    }
    let tau = Complex64::new(t.abs(), 0.0);
    let value = if levels == 2 {
        two_level_chf(tau)
    } else {
        chf_z_angular(tau, levels, tol)?
    };
    Ok(if t < 0.0 { value.conj() } else { value })
}

/// [`chf_z`] continued to complex arguments with `Im(tau) > -2`, where
/// `E[e^{j tau z}]` converges. On the positive imaginary axis it is the
/// moment generating function `E[e^{-kz}]` at `k = Im(tau)`.
pub fn chf_z_complex(tau: ComplexValue, levels: u32, tol: Tolerance) -> Result<ComplexValue> {
    check_levels(levels)?;
    if !(tau.re.is_finite() && tau.im.is_finite() && tau.im > -2.0) {
        return Err(Error::Domain(format!(
            "chf_z_complex requires finite tau with Im(tau) > -2, got {tau}"
        )));
    }
    if levels == 2 {
        return Ok(two_level_chf(tau));
    }
    let value = chf_z_angular(Complex64::new(tau.re.abs(), tau.im), levels, tol)?;
    // phi(-conj(tau)) = conj(phi(tau))
    Ok(if tau.re < 0.0 { value.conj() } else { value })
}

/// Characteristic function of `z` from its Fourier integral
/// `int_0^inf f_z(z) e^{jtz} dz`, nesting the adaptive `pdf_z`.
///
/// Much slower than [`chf_z`]; kept as an independent cross-check of the
/// angular closed form.
pub fn chf_z_fourier(t: f64, levels: u32) -> Result<ComplexValue> {
    check_levels(levels)?;
    // f_z(z) <= L e^{-2z}: truncating at z_max leaves a tail below
    // (L/2) e^{-2 z_max} = 1e-16 * L / 2.
    let z_max = 16.0 * std::f64::consts::LN_10 / 2.0;
    let panels = ((t.abs() * z_max / PI).ceil() as usize).clamp(8, 4_000);
    let mut breaks: Vec<f64> = (0..=panels).map(|k| z_max * k as f64 / panels as f64).collect();
    // Resolve the z ln z behaviour at the origin.
    let first = breaks[1];
    breaks.splice(1..1, [1e-6, 1e-4, 1e-2].into_iter().filter(|&b| b < first));
    let f = |z: f64| {
        let p = pdf_z(z, levels).unwrap_or(0.0);
        Complex64::new(0.0, t * z).exp() * p
    };
    Ok(integrate_breaks(f, &breaks, QuadTol::new(1e-15, 1e-12, 20_000))?.value)
}

/// Precomputed Gauss-Chebyshev rule for the characteristic function of `z`.
///
/// With nodes `a_k = cos((2k - 1) pi / (2n))`, `k = 1..n`, mapped to
/// `psi_k = (pi/4)(a_k + 1)`:
///
/// ```text
/// phi_z(t) ~ L/(2 - jt) - (L pi / 2n) sum_k sqrt(1 - a_k^2) / (2 s(psi_k) - jt)
/// ```
///
/// At `L = 2` the rule is not used; the closed form `2/(2 - jt)` is
/// returned instead.
#[derive(Debug, Clone)]
pub struct GcqChf {
    levels: u32,
    // (sqrt(1 - a_k^2), 2 s(psi_k))
    nodes: Vec<(f64, f64)>,
}

impl GcqChf {
    pub fn new(levels: u32, spec: GcqSpec) -> Result<Self> {
        check_levels(levels)?;
        let n = spec.n_nodes();
        let nodes = if levels == 2 {
            Vec::new()
        } else {
            let a = tan_pi_over(levels);
            (1..=n)
                .map(|k| {
                    let node = (PI * (2 * k - 1) as f64 / (2 * n) as f64).cos();
                    let psi = PI / 4.0 * (node + 1.0);
                    let s = (1.0 + a * a / psi.sin().powi(2)).sqrt();
                    ((1.0 - node * node).sqrt(), 2.0 * s)
                })
                .collect()
        };
        Ok(Self { levels, nodes })
    }

    /// Chebyshev nodes `a_k` of an `n`-point rule.
    pub fn nodes(n: usize) -> Vec<f64> {
        (1..=n)
            .map(|k| (PI * (2 * k - 1) as f64 / (2 * n) as f64).cos())
            .collect()
    }

    pub fn eval(&self, t: f64) -> ComplexValue {
        self.eval_complex(Complex64::new(t, 0.0))
    }

    /// The rule at a complex argument; it approximates [`chf_z_complex`].
    pub fn eval_complex(&self, tau: ComplexValue) -> ComplexValue {
        if self.levels == 2 {
            return two_level_chf(tau);
        }
        let l = self.levels as f64;
        let n = self.nodes.len() as f64;
        let j_tau = Complex64::i() * tau;
        let sum = self
            .nodes
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, &(w, two_s)| {
                acc + w / (two_s - j_tau)
            });
        l / (2.0 - j_tau) - sum * (l * PI / (2.0 * n))
    }
}

/// Gauss-Chebyshev characteristic function of `z`. See [`GcqChf`].
pub fn chf_z_gcq(t: f64, levels: u32, spec: GcqSpec) -> Result<ComplexValue> {
    if !t.is_finite() {
        return Err(Error::Domain(format!("chf_z_gcq requires finite t, got {t}")));
    }
    Ok(GcqChf::new(levels, spec)?.eval(t))
}

/// How the characteristic function of `z` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChfMethod {
    /// Adaptive quadrature ([`chf_z`]).
    Exact(Tolerance),
    /// Gauss-Chebyshev rule ([`chf_z_gcq`]).
    Gcq(GcqSpec),
}

impl Default for ChfMethod {
    fn default() -> Self {
        ChfMethod::Gcq(GcqSpec::default())
    }
}

/// Evaluator for `phi_x(t) = phi_z(sqrt(rho) t)^N` at fixed `(rho, N, L)`.
#[derive(Debug, Clone)]
pub struct CombinedChf {
    sqrt_rho: f64,
    n_elements: u32,
    levels: u32,
    method: ChfMethod,
    gcq: Option<GcqChf>,
}

impl CombinedChf {
    pub fn new(rho: f64, config: RisConfig, method: ChfMethod) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::Domain(format!("rho must be positive, got {rho}")));
        }
        let gcq = match method {
            ChfMethod::Gcq(spec) => Some(GcqChf::new(config.levels(), spec)?),
            ChfMethod::Exact(_) => None,
        };
        Ok(Self {
            sqrt_rho: rho.sqrt(),
            n_elements: config.n_elements() as u32,
            levels: config.levels(),
            method,
            gcq,
        })
    }

    /// Characteristic function of a single `z` at the scaled argument.
    pub fn element(&self, t: f64) -> Result<ComplexValue> {
        let arg = self.sqrt_rho * t;
        match (&self.gcq, self.method) {
            (Some(rule), _) => Ok(rule.eval(arg)),
            (None, ChfMethod::Exact(tol)) => chf_z(arg, self.levels, tol),
            (None, ChfMethod::Gcq(_)) => unreachable!("GCQ rule is built in new()"),
        }
    }

    /// [`Self::element`] at a complex argument with `Im(tau) >= 0`.
    pub fn element_complex(&self, tau: ComplexValue) -> Result<ComplexValue> {
        let arg = tau * self.sqrt_rho;
        match (&self.gcq, self.method) {
            (Some(rule), _) => Ok(rule.eval_complex(arg)),
            (None, ChfMethod::Exact(tol)) => chf_z_complex(arg, self.levels, tol),
            (None, ChfMethod::Gcq(_)) => unreachable!("GCQ rule is built in new()"),
        }
    }

    pub fn eval(&self, t: f64) -> Result<ComplexValue> {
        Ok(self.element(t)?.powu(self.n_elements))
    }

    pub fn eval_complex(&self, tau: ComplexValue) -> Result<ComplexValue> {
        Ok(self.element_complex(tau)?.powu(self.n_elements))
    }

    pub fn n_elements(&self) -> u32 {
        self.n_elements
    }
}

/// `phi_x(t) = prod_i phi_z(sqrt(rho) t) = phi_z(sqrt(rho) t)^N`.
pub fn chf_x(t: f64, rho: f64, config: RisConfig, method: ChfMethod) -> Result<ComplexValue> {
    CombinedChf::new(rho, config, method)?.eval(t)
}

/// Mean of `z`, `(L/4) sin(pi/L)`.
pub fn mean_z(levels: u32) -> f64 {
    levels as f64 / 4.0 * (PI / levels as f64).sin()
}

/// Second moment of `z`, `E[h^2] E[g^2] E[v^2] = 1/2 + (L/(4 pi)) sin(2 pi/L)`.
pub fn second_moment_z(levels: u32) -> f64 {
    0.5 + levels as f64 / (4.0 * PI) * (2.0 * PI / levels as f64).sin()
}

/// `int_0^inf pdf_z(z) w(z) dz` with a truncation where `L e^{-2z}` has
/// dropped below 1e-17; used for moments and normalization checks.
pub fn integrate_pdf_z<W: Fn(f64) -> f64>(levels: u32, weight: W) -> Result<f64> {
    check_levels(levels)?;
    let z_max = 20.0 + 0.5 * (levels as f64).ln();
    let breaks = [0.0, 1e-8, 1e-6, 1e-4, 1e-2, 0.1, 0.5, 1.0, 2.0, 4.0, 8.0, z_max];
    let f = |z: f64| pdf_z(z, levels).map(|p| p * weight(z)).unwrap_or(f64::NAN);
    Ok(integrate_breaks(f, &breaks, QuadTol::new(1e-15, 1e-13, 2_000))?.value)
}

/// `int_{cos(pi/L)}^1 pdf_v`, integrated in the angle so the endpoint
/// singularity disappears.
pub fn integrate_pdf_v(levels: u32) -> Result<f64> {
    check_levels(levels)?;
    // v = cos(phi), dv = -sin(phi) dphi
    let f = |phi: f64| pdf_v(phi.cos(), levels).map(|p| p * phi.sin()).unwrap_or(0.0);
    // Stop just short of the edge so rounding in cos() cannot land outside
    // the support; the mass given up is 1e-13.
    let upper = PI / levels as f64 * (1.0 - 1e-13);
    let r = integrate(f, 0.0, upper, QuadTol::new(1e-9, 1e-9, 500))?;
    Ok(r.value)
}
