//! Bit error rate of BPSK over a reconfigurable intelligent surface (RIS)
//! with Rayleigh fading on both hops and `L`-level quantized phase
//! compensation.
//!
//! Three independent routes to the same number:
//!
//! * [`ber_exact`]: characteristic-function inversion, with the element
//!   characteristic function from adaptive quadrature or a Gauss-Chebyshev
//!   rule ([`phase_stats`]).
//! * [`ber_asymptotic`]: high-SNR closed forms, diversity order, coding gain
//!   and the quantization penalty.
//! * [`montecarlo`]: semi-analytic and bit-level simulation with standard
//!   errors.
//!
//! [`sweep`] drives SNR sweeps and CSV output, and [`validate`] runs the
//! cross-checks between the routes.

pub mod ber_asymptotic;
pub mod ber_exact;
pub mod channel;
pub mod error;
pub mod montecarlo;
pub mod phase_stats;
pub mod quad;
pub mod specfun;
pub mod sweep;
pub mod validate;

pub use channel::{RisConfig, SnrPoint};
pub use error::{Error, Result};
