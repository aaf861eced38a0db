//! Monte Carlo BER estimators.
//!
//! The semi-analytic estimator averages the conditional error probability
//! `erfc(sqrt(rho) x) / 2` over channel draws, so only the channel is
//! sampled. The bit-level simulator also draws the symbol and the noise,
//! `r = x a + w` with `Var(w) = 1/(2 rho)`, which makes the conditional
//! error probability `Q(x / sigma) = erfc(sqrt(rho) x) / 2`; agreement of
//! the two estimators checks that calibration.
//!
//! Samples are split into fixed-size batches. Batch `b` draws from its own
//! ChaCha streams and keeps a one-pass mean/variance accumulator; the batch
//! accumulators are merged in index order. The estimate therefore depends
//! only on the seed and the sample count, never on the number of workers.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::channel::{combined_amplitude, stream_rng, ChannelDraw, ElementSampler, RisConfig, Stream};
use crate::error::{Error, Result};
use crate::specfun::erfc_raw;

/// Samples per batch.
pub const BATCH_SIZE: u64 = 1 << 16;

/// Smallest accepted sample count.
pub const MIN_SAMPLES: u64 = 1_000;

/// A Monte Carlo BER estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(n_samples)`.
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
}

/// Running count, mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Pairwise combination (Chan et al.).
    pub fn merge(&self, other: &Moments) -> Moments {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let w = other.count as f64 / count as f64;
        Moments {
            count,
            mean: self.mean + delta * w,
            m2: self.m2 + other.m2 + delta * delta * self.count as f64 * w,
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; zero for fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    fn estimate(&self, seed: u64) -> McEstimate {
        McEstimate {
            mean: self.mean.clamp(0.0, 1.0),
            std_error: (self.variance() / self.count as f64).sqrt(),
            n_samples: self.count,
            seed,
        }
    }
}

fn check_inputs(rho: f64, n_samples: u64) -> Result<()> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::Domain(format!("rho must be positive and finite, got {rho}")));
    }
    if n_samples < MIN_SAMPLES {
        return Err(Error::Config(format!(
            "at least {MIN_SAMPLES} samples are required, got {n_samples}"
        )));
    }
    Ok(())
}

fn batch_sizes(n_samples: u64) -> impl IndexedParallelIterator<Item = (u64, u64)> {
    let batches = n_samples.div_ceil(BATCH_SIZE) as usize;
    (0..batches).into_par_iter().map(move |b| {
        let b = b as u64;
        let len = BATCH_SIZE.min(n_samples - b * BATCH_SIZE);
        (b, len)
    })
}

fn merge_in_order(parts: Vec<Moments>) -> Moments {
    parts.iter().fold(Moments::default(), |acc, m| acc.merge(m))
}

/// Conditional error probability `erfc(sqrt(rho) x) / 2`.
pub fn conditional_ber(x: f64, rho: f64) -> f64 {
    0.5 * erfc_raw(rho.sqrt() * x)
}

/// Semi-analytic estimate of the average BER.
pub fn ber_semi_analytic(rho: f64, config: RisConfig, n_samples: u64, seed: u64) -> Result<McEstimate> {
    Ok(ber_semi_analytic_many(&[rho], config, n_samples, seed)?.remove(0))
}

/// [`ber_semi_analytic`] at several SNRs from one set of channel draws.
///
/// Each entry equals the single-SNR call with the same seed; sharing the
/// draws only saves sampling work.
pub fn ber_semi_analytic_many(
    rhos: &[f64],
    config: RisConfig,
    n_samples: u64,
    seed: u64,
) -> Result<Vec<McEstimate>> {
    for &rho in rhos {
        check_inputs(rho, n_samples)?;
    }
    let sampler = ElementSampler::new(config);
    let sqrt_rhos: Vec<f64> = rhos.iter().map(|r| r.sqrt()).collect();
    let n = config.n_elements();
    let parts: Vec<Vec<Moments>> = batch_sizes(n_samples)
        .map(|(b, len)| {
            let mut amp = stream_rng(seed, Stream::Amplitude, b);
            let mut phase = stream_rng(seed, Stream::Phase, b);
            let mut acc = vec![Moments::default(); sqrt_rhos.len()];
            for _ in 0..len {
                let x = sampler.combined(n, &mut amp, &mut phase);
                for (m, s) in acc.iter_mut().zip(&sqrt_rhos) {
                    m.push(0.5 * erfc_raw(s * x));
                }
            }
            acc
        })
        .collect();
    Ok((0..rhos.len())
        .map(|i| merge_in_order(parts.iter().map(|p| p[i]).collect()).estimate(seed))
        .collect())
}

// Count the bit errors for one batch given a way of producing x.
fn bit_errors<F>(rho: f64, seed: u64, b: u64, len: u64, mut next_x: F) -> Moments
where
    F: FnMut() -> f64,
{
    let noise = Normal::new(0.0, (0.5 / rho).sqrt()).expect("positive noise deviation");
    let mut noise_rng = stream_rng(seed, Stream::Noise, b);
    let mut symbol_rng = stream_rng(seed, Stream::Symbol, b);
    let mut acc = Moments::default();
    for _ in 0..len {
        let x = next_x();
        let alpha = if symbol_rng.random::<bool>() { 1.0 } else { -1.0 };
        let r = x * alpha + noise.sample(&mut noise_rng);
        // A tie (r == 0) is decided as +1.
        let decided = if r >= 0.0 { 1.0 } else { -1.0 };
        acc.push(if decided == alpha { 0.0 } else { 1.0 });
    }
    acc
}

/// Bit-level BPSK simulation over random channel draws.
pub fn ber_bit_sim(rho: f64, config: RisConfig, n_samples: u64, seed: u64) -> Result<McEstimate> {
    check_inputs(rho, n_samples)?;
    let sampler = ElementSampler::new(config);
    let n = config.n_elements();
    let parts: Vec<Moments> = batch_sizes(n_samples)
        .map(|(b, len)| {
            let mut amp = stream_rng(seed, Stream::Amplitude, b);
            let mut phase = stream_rng(seed, Stream::Phase, b);
            bit_errors(rho, seed, b, len, || sampler.combined(n, &mut amp, &mut phase))
        })
        .collect();
    Ok(merge_in_order(parts).estimate(seed))
}

/// Bit-level simulation conditioned on one fixed channel realization.
pub fn ber_bit_sim_given(draw: &ChannelDraw, rho: f64, n_samples: u64, seed: u64) -> Result<McEstimate> {
    check_inputs(rho, n_samples)?;
    let x = combined_amplitude(draw);
    let parts: Vec<Moments> = batch_sizes(n_samples)
        .map(|(b, len)| bit_errors(rho, seed, b, len, || x))
        .collect();
    Ok(merge_in_order(parts).estimate(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg(n: usize, l: u32) -> RisConfig {
        RisConfig::new(n, l).unwrap()
    }

    #[test]
    fn moments_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 / 7.0).collect();
        let mut all = Moments::default();
        xs.iter().for_each(|&x| all.push(x));
        let (mut a, mut b) = (Moments::default(), Moments::default());
        xs[..313].iter().for_each(|&x| a.push(x));
        xs[313..].iter().for_each(|&x| b.push(x));
        let merged = a.merge(&b);
        assert_eq!(merged.count(), all.count());
        assert!((merged.mean() - all.mean()).abs() < 1e-12);
        assert!((merged.variance() - all.variance()).abs() < 1e-10);
    }

    #[test]
    fn rejects_small_sample_counts() {
        assert!(ber_semi_analytic(10.0, cfg(1, 2), 999, 1).is_err());
        assert!(ber_bit_sim(0.0, cfg(1, 2), 10_000, 1).is_err());
    }

    #[test]
    fn vanishing_snr_is_a_coin_flip() {
        let e = ber_semi_analytic(1e-12, cfg(2, 4), 20_000, 3).unwrap();
        assert!((e.mean - 0.5).abs() <= 3.0 * e.std_error + 1e-6);
    }

    #[test]
    fn zero_amplitude_gives_half() {
        let c = cfg(1, 2);
        let draw = ChannelDraw::new(c, vec![1.0], vec![1.0], vec![PI / 2.0]).unwrap();
        let e = ber_bit_sim_given(&draw, 100.0, 200_000, 5).unwrap();
        assert!((e.mean - 0.5).abs() <= 3.0 * e.std_error);
    }

    #[test]
    fn deterministic_in_seed() {
        let c = cfg(3, 3);
        let a = ber_semi_analytic(10.0, c, 150_000, 11).unwrap();
        assert_eq!(a, ber_semi_analytic(10.0, c, 150_000, 11).unwrap());
        assert_ne!(a.mean, ber_semi_analytic(10.0, c, 150_000, 12).unwrap().mean);
        let b = ber_bit_sim(10.0, c, 150_000, 11).unwrap();
        assert_eq!(b, ber_bit_sim(10.0, c, 150_000, 11).unwrap());
    }

    #[test]
    fn many_matches_single() {
        let c = cfg(2, 4);
        let many = ber_semi_analytic_many(&[1.0, 10.0], c, 70_000, 9).unwrap();
        assert_eq!(many[1], ber_semi_analytic(10.0, c, 70_000, 9).unwrap());
    }
}
