//! High-SNR behaviour: asymptotic BER, small-argument densities, diversity
//! order, coding gain and the quantization penalty.
//!
//! For `L > 2` the element density vanishes like `z ln(1/z)` at the origin
//! and the BER decays as `(ln(rho) / rho)^N`: full diversity, with a slope
//! that creeps towards `N` only logarithmically. For `L = 2` the element
//! density is `2e^{-2z}`, nonzero at the origin, and the diversity order
//! halves to `N/2`.
//!
//! Gamma-function products are accumulated in log space so `N` up to 64
//! cannot overflow.

use std::f64::consts::PI;

use crate::channel::RisConfig;
use crate::error::{Error, Result};
use crate::specfun::ln_gamma_raw;

const LN_2: f64 = std::f64::consts::LN_2;

fn ln_sqrt_pi() -> f64 {
    0.5 * PI.ln()
}

/// Which closed form governs the high-SNR regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    TwoLevel,
    MultiLevel,
}

/// Diversity order and coding gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiversityReport {
    pub diversity_order: f64,
    /// Linear scale.
    pub coding_gain: f64,
    pub regime: Regime,
}

fn check_rho_above_one(rho: f64) -> Result<()> {
    if !(rho > 1.0 && rho.is_finite()) {
        return Err(Error::Domain(format!(
            "the multi-level asymptote needs rho > 1 (ln rho > 0), got {rho}"
        )));
    }
    Ok(())
}

fn check_multilevel(levels: u32) -> Result<()> {
    if levels == 2 {
        return Err(Error::Regime(
            "L = 2 has diversity N/2; use ber_asym_twolevel".into(),
        ));
    }
    Ok(())
}

// ln of 2 L tan(pi/L) / pi, the per-element prefactor for L > 2.
fn ln_prefactor(levels: u32) -> f64 {
    let l = levels as f64;
    (2.0 * l * (PI / l).tan() / PI).ln()
}

// ln of the rho-free part of the multi-level asymptote:
// (2LA/pi)^N Gamma(N+1/2) / (2 sqrt(pi) (N+1) Gamma(2N)).
fn ln_multilevel_constant(n: f64, levels: u32) -> f64 {
    n * ln_prefactor(levels) + ln_gamma_raw(n + 0.5)
        - LN_2
        - ln_sqrt_pi()
        - (n + 1.0).ln()
        - ln_gamma_raw(2.0 * n)
}

// ln of 2^{N-1} Gamma(N/2 + 1/2) / (sqrt(pi) Gamma(N+1)).
fn ln_twolevel_constant(n: f64) -> f64 {
    (n - 1.0) * LN_2 + ln_gamma_raw(0.5 * n + 0.5) - ln_sqrt_pi() - ln_gamma_raw(n + 1.0)
}

/// Asymptotic BER for `L > 2`:
///
/// ```text
/// P_e ~ (2 L tan(pi/L) / pi)^N ln(rho)^N Gamma(N + 1/2)
///       / (2 sqrt(pi) (N + 1) Gamma(2N)) * rho^-N
/// ```
pub fn ber_asym_multilevel(rho: f64, config: RisConfig) -> Result<f64> {
    check_multilevel(config.levels())?;
    check_rho_above_one(rho)?;
    let n = config.n_elements() as f64;
    let ln_rho = rho.ln();
    Ok((ln_multilevel_constant(n, config.levels()) + n * ln_rho.ln() - n * ln_rho).exp())
}

/// Asymptotic BER for `L = 2`:
/// `2^{N-1} Gamma(N/2 + 1/2) / (sqrt(pi) Gamma(N+1)) * rho^{-N/2}`.
pub fn ber_asym_twolevel(rho: f64, n_elements: usize) -> Result<f64> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::Domain(format!("rho must be positive, got {rho}")));
    }
    if n_elements == 0 {
        return Err(Error::Config("at least one element is required".into()));
    }
    let n = n_elements as f64;
    Ok((ln_twolevel_constant(n) - 0.5 * n * rho.ln()).exp())
}

/// Asymptotic BER for either regime.
pub fn ber_asym(rho: f64, config: RisConfig) -> Result<f64> {
    if config.levels() == 2 {
        ber_asym_twolevel(rho, config.n_elements())
    } else {
        ber_asym_multilevel(rho, config)
    }
}

/// Density of the normalized SNR `gamma / rho = x^2` for `L = 2`.
///
/// `x` is a sum of `N` independent `Exp(2)` variables, so `x^2` has the
/// exact density `2^{N-1} gamma^{N/2 - 1} e^{-2 sqrt(gamma)} / Gamma(N)`.
pub fn pdf_gamma_norm_twolevel(gamma: f64, n_elements: usize) -> Result<f64> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::Domain(format!("gamma must be positive, got {gamma}")));
    }
    if n_elements == 0 {
        return Err(Error::Config("at least one element is required".into()));
    }
    let n = n_elements as f64;
    let ln_f = (n - 1.0) * LN_2 + (0.5 * n - 1.0) * gamma.ln() - 2.0 * gamma.sqrt() - ln_gamma_raw(n);
    Ok(ln_f.exp())
}

/// Small-`x` density of the combined amplitude for `L > 2`:
/// `(2 L tan(pi/L) / (rho pi))^N x^{2N-1} ln(rho x)^N / Gamma(2N)`,
/// restricted to `rho x > 1` where the log factor is positive.
pub fn pdf_x_small(x: f64, rho: f64, config: RisConfig) -> Result<f64> {
    check_multilevel(config.levels())?;
    if !(x > 0.0 && rho > 0.0) || !(rho * x > 1.0) {
        return Err(Error::Domain(format!(
            "pdf_x_small needs x > 0 and rho x > 1 (x = {x}, rho = {rho})"
        )));
    }
    let n = config.n_elements() as f64;
    let ln_f = n * (ln_prefactor(config.levels()) - rho.ln()) + (2.0 * n - 1.0) * x.ln()
        + n * (rho * x).ln().ln()
        - ln_gamma_raw(2.0 * n);
    Ok(ln_f.exp())
}

/// Diversity order and coding gain. The multi-level coding gain contains
/// `ln(rho)` and is evaluated at the supplied `rho`, which must exceed 1.
///
/// The coding gain is defined through `P_e ~ (G_c rho)^{-G_d}`.
pub fn diversity_report(config: RisConfig, rho: f64) -> Result<DiversityReport> {
    let n = config.n_elements() as f64;
    if config.levels() == 2 {
        Ok(DiversityReport {
            diversity_order: 0.5 * n,
            coding_gain: (-2.0 / n * ln_twolevel_constant(n)).exp(),
            regime: Regime::TwoLevel,
        })
    } else {
        check_rho_above_one(rho)?;
        let ln_c = ln_multilevel_constant(n, config.levels()) + n * rho.ln().ln();
        Ok(DiversityReport {
            diversity_order: n,
            coding_gain: (-ln_c / n).exp(),
            regime: Regime::MultiLevel,
        })
    }
}

/// BER increase in dB relative to unquantized phase compensation.
///
/// `L > 2`: `10 log10(L tan(pi/L) / pi)`, independent of `rho` and `N`.
/// `L = 2`: `10 log10(rho^{N/2} / ln(rho)^N * Gamma(N/2 + 1/2) (N+1) 2^{2N-1} / (N sqrt(pi)))`.
pub fn quantization_penalty(rho: f64, levels: u32, n_elements: usize) -> Result<f64> {
    if levels < 2 {
        return Err(Error::Config(format!("L must be at least 2, got {levels}")));
    }
    check_rho_above_one(rho)?;
    if n_elements == 0 {
        return Err(Error::Config("at least one element is required".into()));
    }
    let ln_ratio = if levels > 2 {
        let l = levels as f64;
        (l * (PI / l).tan() / PI).ln()
    } else {
        let n = n_elements as f64;
        0.5 * n * rho.ln() - n * rho.ln().ln() + ln_gamma_raw(0.5 * n + 0.5) + (n + 1.0).ln()
            + (2.0 * n - 1.0) * LN_2
            - n.ln()
            - ln_sqrt_pi()
    };
    Ok(10.0 * ln_ratio / std::f64::consts::LN_10)
}

/// Local slope `-d log10 P_e / d log10 rho` of the multi-level asymptote,
/// `N (1 - 1/ln rho)`.
pub fn multilevel_slope(rho: f64, n_elements: usize) -> f64 {
    n_elements as f64 * (1.0 - 1.0 / rho.ln())
}
