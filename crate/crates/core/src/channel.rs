//! RIS system model: per-element Rayleigh amplitudes on both hops, uniform
//! residual phase error after `L`-level quantized compensation, the
//! combined real amplitude `x = sum h_i g_i cos(theta_i)` and the
//! instantaneous SNR `gamma = rho x^2`.
//!
//! Amplitudes use the unit-scale Rayleigh density `2x e^{-x^2}`
//! (`E[h] = sqrt(pi)/2`, `E[h^2] = 1`). Only the residual phase error is
//! sampled; the channel phase and its quantized compensation never appear
//! on their own.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Uniform, Weibull};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Number of reflecting elements and phase quantization levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RisConfig {
    n_elements: usize,
    levels: u32,
}

impl RisConfig {
    pub fn new(n_elements: usize, levels: u32) -> Result<Self> {
        if n_elements < 1 {
            return Err(Error::Config("at least one reflecting element is required".into()));
        }
        if levels < 2 {
            return Err(Error::Config(format!(
                "at least two quantization levels are required, got {levels}"
            )));
        }
        Ok(Self { n_elements, levels })
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    /// Largest residual phase error, `pi / L`.
    pub fn max_phase_error(&self) -> f64 {
        PI / self.levels as f64
    }
}

/// Transmit SNR in linear and dB scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrPoint {
    rho: f64,
    rho_db: f64,
}

impl SnrPoint {
    pub fn from_linear(rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::Domain(format!("SNR must be positive and finite, got {rho}")));
        }
        Ok(Self {
            rho,
            rho_db: 10.0 * rho.log10(),
        })
    }

    pub fn from_db(rho_db: f64) -> Result<Self> {
        if !rho_db.is_finite() {
            return Err(Error::Domain(format!("SNR in dB must be finite, got {rho_db}")));
        }
        Ok(Self {
            rho: 10f64.powf(rho_db / 10.0),
            rho_db,
        })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn rho_db(&self) -> f64 {
        self.rho_db
    }
}

/// One channel realization.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDraw {
    h: Vec<f64>,
    g: Vec<f64>,
    phase_err: Vec<f64>,
    levels: u32,
}

impl ChannelDraw {
    /// Builds a draw from explicit values, checking lengths, signs and that
    /// every phase error lies in `[-pi/L, pi/L]`.
    pub fn new(config: RisConfig, h: Vec<f64>, g: Vec<f64>, phase_err: Vec<f64>) -> Result<Self> {
        let n = config.n_elements();
        if h.len() != n || g.len() != n || phase_err.len() != n {
            return Err(Error::Config(format!(
                "draw lengths ({}, {}, {}) do not match N = {n}",
                h.len(),
                g.len(),
                phase_err.len()
            )));
        }
        if h.iter().chain(&g).any(|&a| !(a >= 0.0 && a.is_finite())) {
            return Err(Error::Domain("amplitudes must be finite and nonnegative".into()));
        }
        let bound = config.max_phase_error();
        if let Some(p) = phase_err.iter().find(|p| !(p.abs() <= bound)) {
            return Err(Error::Domain(format!(
                "phase error {p} outside [-pi/L, pi/L] for L = {}",
                config.levels()
            )));
        }
        Ok(Self {
            h,
            g,
            phase_err,
            levels: config.levels(),
        })
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    pub fn phase_err(&self) -> &[f64] {
        &self.phase_err
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }
}

/// Independent random streams derived from one root seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Amplitude = 0,
    Phase = 1,
    Noise = 2,
    Symbol = 3,
}

const STREAMS: u64 = 4;

/// RNG for `stream` of work item `batch` under root `seed`. Each
/// (batch, stream) pair gets its own ChaCha stream, so any one of them can
/// be regenerated in isolation.
pub fn stream_rng(seed: u64, stream: Stream, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch.wrapping_mul(STREAMS).wrapping_add(stream as u64));
    rng
}

/// Per-element samplers shared by `sample_channel` and the Monte Carlo
/// estimators.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ElementSampler {
    rayleigh: Weibull<f64>,
    phase: Uniform<f64>,
}

impl ElementSampler {
    pub(crate) fn new(config: RisConfig) -> Self {
        let bound = config.max_phase_error();
        Self {
            // Weibull with unit scale and shape 2 has density 2x e^{-x^2}.
            rayleigh: Weibull::new(1.0, 2.0).expect("valid Weibull parameters"),
            phase: Uniform::new_inclusive(-bound, bound).expect("finite phase bound"),
        }
    }

    pub(crate) fn amplitude<R: rand::Rng>(&self, rng: &mut R) -> f64 {
        self.rayleigh.sample(rng)
    }

    pub(crate) fn phase<R: rand::Rng>(&self, rng: &mut R) -> f64 {
        self.phase.sample(rng)
    }

    /// Draws `x = sum h_i g_i cos(theta_i)` without materializing the draw.
    pub(crate) fn combined<R: rand::Rng>(
        &self,
        n: usize,
        amp_rng: &mut R,
        phase_rng: &mut R,
    ) -> f64 {
        (0..n)
            .map(|_| {
                let h = self.amplitude(amp_rng);
                let g = self.amplitude(amp_rng);
                h * g * self.phase(phase_rng).cos()
            })
            .sum()
    }
}

/// Draws one channel realization, deterministic in `seed`.
pub fn sample_channel(config: RisConfig, seed: u64) -> ChannelDraw {
    let sampler = ElementSampler::new(config);
    let mut amp = stream_rng(seed, Stream::Amplitude, 0);
    let mut phase = stream_rng(seed, Stream::Phase, 0);
    let n = config.n_elements();
    let mut h = Vec::with_capacity(n);
    let mut g = Vec::with_capacity(n);
    for _ in 0..n {
        h.push(sampler.amplitude(&mut amp));
        g.push(sampler.amplitude(&mut amp));
    }
    let phase_err = (0..n).map(|_| sampler.phase(&mut phase)).collect();
    ChannelDraw {
        h,
        g,
        phase_err,
        levels: config.levels(),
    }
}

/// Samples per work item in [`sample_combined`].
const SAMPLE_BATCH: usize = 1 << 16;

/// `n` independent draws of the combined amplitude. Batch `b` of
/// `2^16` draws uses the amplitude and phase streams of work item `b`, so
/// the output does not depend on the number of threads.
pub fn sample_combined(config: RisConfig, n: usize, seed: u64) -> Vec<f64> {
    let sampler = ElementSampler::new(config);
    let mut out = vec![0.0; n];
    out.par_chunks_mut(SAMPLE_BATCH)
        .enumerate()
        .for_each(|(b, chunk)| {
            let mut amp = stream_rng(seed, Stream::Amplitude, b as u64);
            let mut phase = stream_rng(seed, Stream::Phase, b as u64);
            for x in chunk {
                *x = sampler.combined(config.n_elements(), &mut amp, &mut phase);
            }
        });
    out
}

/// Combined amplitude `x = sum h_i g_i cos(theta_i)`.
pub fn combined_amplitude(draw: &ChannelDraw) -> f64 {
    draw.h
        .iter()
        .zip(&draw.g)
        .zip(&draw.phase_err)
        .map(|((h, g), p)| h * g * p.cos())
        .sum()
}

/// Instantaneous SNR `gamma = rho x^2`.
pub fn instantaneous_snr(x: f64, snr: SnrPoint) -> f64 {
    snr.rho() * x * x
}
