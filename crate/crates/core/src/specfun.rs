//! Special functions in double precision: error functions, the Dawson
//! function, the Faddeeva function and log-gamma.
//!
//! `erf`, `erfc` and `ln_gamma` wrap the `libm` implementations; `erfc`
//! keeps full relative accuracy deep into the tail. The Dawson and
//! Faddeeva functions come from `errorfunctions`.
//!
//! The public functions validate their argument; the `*_raw` kernels skip
//! the check and are used on hot paths inside the crate.

use errorfunctions::{ComplexErrorFunctions, RealErrorFunctions};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute/relative tolerance pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Tolerance {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Result<Self> {
        if !(abs_tol > 0.0 && rel_tol > 0.0) {
            return Err(Error::Config(format!(
                "tolerances must be positive (abs_tol = {abs_tol}, rel_tol = {rel_tol})"
            )));
        }
        Ok(Self { abs_tol, rel_tol })
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
        }
    }
}

fn finite(x: f64, name: &str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Domain(format!("{name}: argument {x} is not finite")))
    }
}

/// Error function.
pub fn erf(x: f64) -> Result<f64> {
    finite(x, "erf").map(erf_raw)
}

/// Complementary error function, accurate in relative terms for large `x`.
pub fn erfc(x: f64) -> Result<f64> {
    finite(x, "erfc").map(erfc_raw)
}

/// Dawson function `D(x) = e^{-x^2} int_0^x e^{t^2} dt`.
pub fn dawson(x: f64) -> Result<f64> {
    finite(x, "dawson").map(dawson_raw)
}

/// Faddeeva function `w(z) = e^{-z^2} erfc(-jz)`.
pub fn faddeeva(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("faddeeva: argument {z} is not finite")));
    }
    Ok(faddeeva_raw(z))
}

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::Domain(format!("ln_gamma: requires finite x > 0, got {x}")));
    }
    Ok(ln_gamma_raw(x))
}

pub(crate) fn erf_raw(x: f64) -> f64 {
    libm::erf(x)
}

pub(crate) fn erfc_raw(x: f64) -> f64 {
    libm::erfc(x)
}

pub(crate) fn dawson_raw(x: f64) -> f64 {
    RealErrorFunctions::dawson(x)
}

pub(crate) fn faddeeva_raw(z: Complex64) -> Complex64 {
    z.w()
}

pub(crate) fn ln_gamma_raw(x: f64) -> f64 {
    libm::lgamma(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erf_examples() {
        assert_eq!(erf(0.0).unwrap(), 0.0);
        assert!((erf(1.0).unwrap() - 0.842_700_792_949_715).abs() < 1e-15);
        assert!((erf(-1.0).unwrap() + 0.842_700_792_949_715).abs() < 1e-15);
    }

    #[test]
    fn erfc_examples() {
        assert_eq!(erfc(0.0).unwrap(), 1.0);
        assert!((erfc(1.0).unwrap() - 0.157_299_207_050_285).abs() < 1e-15);
        let tail = erfc(10.0).unwrap();
        assert!(((tail - 2.088_487_583_762_545e-45) / tail).abs() < 1e-8);
    }

    #[test]
    fn dawson_examples() {
        assert_eq!(dawson(0.0).unwrap(), 0.0);
        assert!((dawson(1.0).unwrap() - 0.538_079_506_912_768).abs() < 1e-15);
        assert!(((dawson(10.0).unwrap() - 0.050_253_847_187_598_5) / 0.050_253_847_187_598_5).abs() < 1e-8);
    }

    #[test]
    fn ln_gamma_examples() {
        assert!(ln_gamma(1.0).unwrap().abs() < 1e-14);
        assert!((ln_gamma(0.5).unwrap() - 0.572_364_942_924_700).abs() < 1e-14);
        assert!((ln_gamma(5.0).unwrap() - 24f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn domain_errors() {
        assert!(erf(f64::NAN).is_err());
        assert!(erfc(f64::INFINITY).is_err());
        assert!(dawson(f64::NEG_INFINITY).is_err());
        assert!(ln_gamma(0.0).is_err());
        assert!(ln_gamma(-1.5).is_err());
        assert!(Tolerance::new(0.0, 1e-3).is_err());
    }

    #[test]
    fn faddeeva_on_the_axes() {
        // w(x) = e^{-x^2} + (2j/sqrt(pi)) D(x) on the real line.
        for x in [-3.0, -0.2, 0.0, 0.7, 5.0] {
            let w = faddeeva(Complex64::new(x, 0.0)).unwrap();
            assert!((w.re - (-x * x).exp()).abs() < 1e-15);
            assert!((w.im - std::f64::consts::FRAC_2_SQRT_PI * dawson(x).unwrap()).abs() < 1e-15);
        }
        // w(jy) = e^{y^2} erfc(y)
        for y in [-2.0, -0.5, 0.3, 4.0] {
            let w = faddeeva(Complex64::new(0.0, y)).unwrap();
            let expected = (y * y).exp() * erfc(y).unwrap();
            assert!(((w.re - expected) / expected).abs() < 1e-14 && w.im.abs() < 1e-15);
        }
        assert!(faddeeva(Complex64::new(f64::NAN, 0.0)).is_err());
    }
}
