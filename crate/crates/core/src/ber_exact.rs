//! Average BER from the characteristic function of the combined amplitude.
//!
//! With `y = sqrt(gamma) = sqrt(rho) x` and `phi_x(t) = E[e^{jty}]`,
//! Parseval's identity gives
//!
//! ```text
//! P_e = E[erfc(y)/2] = (1/2pi) int G(t) conj(phi_x(t)) dt
//!     = (1/pi) int_0^inf Re{G(t) conj(phi_x(t))} dt
//! ```
//!
//! where `G(t) = int_0^inf erfc(y)/2 e^{jty} dy`. The second form folds the
//! negative half-line using `G(-t) = conj(G(t))` and
//! `phi(-t) = conj(phi(t))`, so the integrand is real by construction.
//!
//! On the real line the integrand is O(1) near the origin while the result
//! can be many orders smaller, so the digits cancel down to an absolute
//! floor near 1e-17. Since `y >= 0`, `phi_x` is analytic in the upper half
//! plane and `G` is entire, so the line can be moved to `t + jc`:
//!
//! ```text
//! P_e = (1/pi) int_0^inf Re{G(-t - jc) phi_x(t + jc)} dt,   c >= 0
//! ```
//!
//! The integrand stays Hermitian in `t`. At `t = 0` it equals
//! `G(-jc) E[e^{-cy}]`, a Chernoff bound on `P_e`; choosing `c` to minimize
//! it puts the line through the saddle point, where the integrand has no
//! cancellation and the result keeps its relative accuracy at any SNR.
//!
//! The integrand spans scales from `t ~ 1/sqrt(rho)` (where `phi_x`
//! varies) to `t ~ 1` (where `G` varies) and decays only algebraically,
//! as fast as `t^-2` for a single two-level element. It is integrated on
//! geometrically growing panels and truncated adaptively: doubling stops
//! once the tail bound `T |G| |phi_x|` at `T`, which dominates
//! `int_T^inf` whenever the modulus decays at least like `t^-2`, falls
//! below `rel_tol` times the running estimate.

use std::cell::RefCell;

use num_complex::Complex64;

use crate::channel::RisConfig;
use crate::error::{Error, Result};
use crate::phase_stats::{mean_z, ChfMethod, CombinedChf, ComplexValue, GcqSpec};
use crate::quad::{integrate_breaks, QuadTol};
use crate::specfun::{dawson_raw, faddeeva_raw, Tolerance};

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// Largest accepted ratio of the quadrature error estimate to the result.
const PRECISION_LOSS: f64 = 0.1;

/// Below this `|t|` the kernel is evaluated from its Taylor series.
const KERNEL_SERIES_CUTOFF: f64 = 1e-3;

/// Below this `|s|` the complex kernel is evaluated from its power series.
const COMPLEX_KERNEL_SERIES_CUTOFF: f64 = 0.5;

/// Largest contour shift considered.
const MAX_SHIFT: f64 = 30.0;

/// Upper truncation limit of the inversion integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    /// Extend by doubling until the tail bound meets the tolerance.
    Auto,
    /// Integrate over `[0, t_max]` only.
    Fixed(f64),
}

/// Which characteristic function of `z` feeds the inversion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChfPath {
    /// Adaptive quadrature of the angular integral.
    Exact,
    /// Gauss-Chebyshev rule with `QuadratureSpec::gcq` nodes.
    Gcq,
}

/// Imaginary offset `c` of the integration line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shift {
    /// Through the saddle point of the integrand on the imaginary axis.
    Saddle,
    /// A given `c >= 0`; `Fixed(0.0)` integrates on the real line.
    Fixed(f64),
}

/// Controls for [`ber_chf`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub t_max: Truncation,
    pub max_subdivisions: usize,
    pub tol: Tolerance,
    pub gcq: GcqSpec,
    pub path: ChfPath,
    pub shift: Shift,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            t_max: Truncation::Auto,
            max_subdivisions: 4_000,
            tol: Tolerance::default(),
            gcq: GcqSpec::default(),
            path: ChfPath::Exact,
            shift: Shift::Saddle,
        }
    }
}

impl QuadratureSpec {
    pub fn gcq(n_nodes: usize) -> Result<Self> {
        Ok(Self {
            gcq: GcqSpec::new(n_nodes)?,
            path: ChfPath::Gcq,
            ..Self::default()
        })
    }

    fn validate(&self) -> Result<()> {
        if self.max_subdivisions < 1 {
            return Err(Error::Config("max_subdivisions must be at least 1".into()));
        }
        if let Truncation::Fixed(t) = self.t_max {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Config(format!("t_max must be positive, got {t}")));
            }
        }
        if let Shift::Fixed(c) = self.shift {
            if !(c >= 0.0 && c <= MAX_SHIFT) {
                return Err(Error::Config(format!("shift must lie in [0, {MAX_SHIFT}], got {c}")));
            }
        }
        Ok(())
    }

    fn chf_method(&self) -> ChfMethod {
        match self.path {
            ChfPath::Exact => ChfMethod::Exact(self.tol),
            ChfPath::Gcq => ChfMethod::Gcq(self.gcq),
        }
    }
}

/// BPSK kernel `G(t) = int_0^inf erfc(y)/2 e^{jty} dy`:
///
/// ```text
/// Re G(t) = D(t/2) / (sqrt(pi) t)        (D: Dawson function)
/// Im G(t) = (1 - e^{-t^2/4}) / (2t)
/// ```
///
/// The real part equals `(1/2sqrt(pi)) 1F1(1, 3/2; -t^2/4)` by Kummer's
/// transformation. `G(0) = 1/(2 sqrt(pi))`.
pub fn g_kernel(t: f64) -> ComplexValue {
    if t.abs() < KERNEL_SERIES_CUTOFF {
        let t2 = t * t;
        let re = 0.5 * FRAC_1_SQRT_PI * (1.0 - t2 / 6.0 + t2 * t2 / 60.0);
        let im = t / 8.0 - t * t2 / 64.0 + t * t2 * t2 / 768.0;
        return Complex64::new(re, im);
    }
    let re = dawson_raw(0.5 * t) * FRAC_1_SQRT_PI / t;
    let im = -(-0.25 * t * t).exp_m1() / (2.0 * t);
    Complex64::new(re, im)
}

/// [`g_kernel`] continued to complex `s`:
///
/// ```text
/// G(s) = j (1 - w(s/2)) / (2s) = (1/4) sum_m (js/2)^m / Gamma(m/2 + 3/2)
/// ```
///
/// with `w` the Faddeeva function; the series is used for small `|s|`.
pub fn g_kernel_complex(s: ComplexValue) -> ComplexValue {
    if s.norm() < COMPLEX_KERNEL_SERIES_CUTOFF {
        let x = Complex64::i() * s * 0.5;
        // 1 / Gamma(m/2 + 3/2) for m = 0, 1; each steps by 1/(m/2 + 3/2).
        let mut coef = [2.0 * FRAC_1_SQRT_PI, 1.0];
        let mut power = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(0.0, 0.0);
        for m in 0..60 {
            let term = power * coef[m % 2];
            sum += term;
            if term.norm() <= 1e-17 * sum.norm() {
                break;
            }
            coef[m % 2] /= m as f64 / 2.0 + 1.5;
            power *= x;
        }
        return sum * 0.25;
    }
    Complex64::i() * (1.0 - faddeeva_raw(s * 0.5)) / (s * 2.0)
}

/// Diagnostics of one inversion.
#[derive(Debug, Clone, Copy)]
pub struct BerIntegral {
    pub ber: f64,
    /// Quadrature error estimate of `ber` (excluding the truncated tail).
    pub abs_err: f64,
    /// Truncation point actually used.
    pub t_max: f64,
    /// Tail bound at `t_max`, already divided by `pi`.
    pub tail_bound: f64,
    /// Imaginary offset of the integration line.
    pub shift: f64,
    pub evaluations: usize,
}

/// Exact average BER by characteristic-function inversion.
pub fn ber_chf(rho: f64, config: RisConfig, quad: QuadratureSpec) -> Result<f64> {
    ber_chf_detailed(rho, config, quad).map(|r| r.ber)
}

/// [`ber_chf`] with quadrature diagnostics.
pub fn ber_chf_detailed(rho: f64, config: RisConfig, quad: QuadratureSpec) -> Result<BerIntegral> {
    quad.validate()?;
    let chf = CombinedChf::new(rho, config, quad.chf_method())?;

    let c = match quad.shift {
        Shift::Fixed(c) => c,
        Shift::Saddle => saddle_shift(&chf)?,
    };

    let failure: RefCell<Option<Error>> = RefCell::new(None);
    // G(-t - jc) phi_x(t + jc)
    let product = |t: f64| -> Option<ComplexValue> {
        let phi = if c == 0.0 {
            chf.eval(t)
        } else {
            chf.eval_complex(Complex64::new(t, c))
        };
        let g = if c == 0.0 {
            g_kernel(t).conj()
        } else {
            g_kernel_complex(Complex64::new(-t, -c))
        };
        match phi {
            Ok(phi) => Some(g * phi),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                None
            }
        }
    };
    let modulus = |t: f64| product(t).map_or(f64::NAN, |v| v.norm());
    let integrand = |t: f64| product(t).map_or(f64::NAN, |v| v.re);

    // Scale on which phi_x varies: 1 / (sqrt(rho) E[x]).
    let t_c = 1.0 / (rho.sqrt() * config.n_elements() as f64 * mean_z(config.levels()));
    let t_lo = t_c.min(1.0) / 256.0;
    let t_init = 64.0 * t_c.max(1.0);
    let tol = QuadTol::new(1e-300, quad.tol.rel_tol, quad.max_subdivisions);

    // Errors from the characteristic function surface here.
    let pending = || failure.borrow_mut().take().map_or(Ok(()), Err);

    let (head_end, hard_cap) = match quad.t_max {
        Truncation::Fixed(t) => (t, t),
        Truncation::Auto => (t_init, t_init * 2f64.powi(50)),
    };
    let head = integrate_breaks(integrand, &geometric_breaks(t_lo, head_end), tol);
    pending()?;
    let head = head?;
    let mut value = head.value;
    let mut abs_err = head.abs_err;
    let mut evaluations = head.evaluations;
    let mut t_max = head_end;

    if quad.t_max == Truncation::Auto {
        // Extend one doubling at a time until the tail bound is met.
        while t_max * modulus(t_max) > quad.tol.rel_tol * value.abs() {
            if t_max >= hard_cap {
                pending()?;
                return Err(Error::Convergence {
                    context: "BER inversion truncation",
                    last: value / std::f64::consts::PI,
                    previous: (value - t_max * modulus(t_max)) / std::f64::consts::PI,
                });
            }
            let panel = integrate_breaks(
                integrand,
                &[t_max, 2.0 * t_max],
                QuadTol::new(
                    0.1 * quad.tol.rel_tol * value.abs(),
                    quad.tol.rel_tol,
                    quad.max_subdivisions,
                ),
            );
            pending()?;
            let panel = panel?;
            value += panel.value;
            abs_err += panel.abs_err;
            evaluations += panel.evaluations;
            t_max *= 2.0;
        }
    }
    let tail_bound = t_max * modulus(t_max) / std::f64::consts::PI;
    pending()?;

    let ber = value / std::f64::consts::PI;
    // Once the error estimate is a sizeable fraction of the result the
    // digits are noise (on the real line this happens near 1e-17).
    if !(ber > 0.0) || !ber.is_finite() || abs_err > PRECISION_LOSS * value {
        return Err(Error::Convergence {
            context: "BER inversion lost all significant digits",
            last: ber,
            previous: abs_err / std::f64::consts::PI,
        });
    }
    Ok(BerIntegral {
        ber,
        abs_err: abs_err / std::f64::consts::PI,
        t_max,
        tail_bound,
        shift: c,
        evaluations,
    })
}

/// Minimizer over `c` in `[0, MAX_SHIFT]` of the log of the shifted
/// integrand at `t = 0`, `ln G(-jc) + N ln E[e^{-c sqrt(rho) z}]`. Both
/// terms are logs of Laplace transforms and so convex in `c`; a golden
/// section search suffices, and only a rough minimizer is needed.
fn saddle_shift(chf: &CombinedChf) -> Result<f64> {
    let n = chf.n_elements() as f64;
    let h = |c: f64| -> Result<f64> {
        let g = g_kernel_complex(Complex64::new(0.0, -c)).re;
        let m = chf.element_complex(Complex64::new(0.0, c))?.re;
        Ok(g.ln() + n * m.ln())
    };
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (0.0, MAX_SHIFT);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut h1, mut h2) = (h(x1)?, h(x2)?);
    while b - a > 1e-3 * (1.0 + a) {
        if h1 <= h2 {
            b = x2;
            x2 = x1;
            h2 = h1;
            x1 = b - ratio * (b - a);
            h1 = h(x1)?;
        } else {
            a = x1;
            x1 = x2;
            h1 = h2;
            x2 = a + ratio * (b - a);
            h2 = h(x2)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// `[0, lo, 2 lo, 4 lo, ..., hi]`.
fn geometric_breaks(lo: f64, hi: f64) -> Vec<f64> {
    let mut breaks = vec![0.0];
    let mut t = lo.min(hi);
    while t < hi {
        breaks.push(t);
        t *= 2.0;
    }
    breaks.push(hi);
    breaks
}
