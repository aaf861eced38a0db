//! Self-checks of the whole crate, one group per acceptance criterion.
//!
//! Every check is a record `measured <= allowed`: a deviation against the
//! largest one tolerated. `Level::Quick` shrinks Monte Carlo sample counts
//! so the full suite finishes in well under a minute; tolerances stay the
//! same because they are expressed in standard errors.

use std::io::Write;

use num_complex::Complex64;
use rayon::ThreadPoolBuilder;
use serde::Serialize;

use crate::ber_asymptotic::{ber_asym_multilevel, ber_asym_twolevel, multilevel_slope, quantization_penalty};
use crate::ber_exact::{ber_chf, ber_chf_detailed, QuadratureSpec};
use crate::channel::{sample_combined, RisConfig};
use crate::error::{Error, Result};
use crate::montecarlo::{ber_bit_sim, ber_semi_analytic, ber_semi_analytic_many};
use crate::phase_stats::{
    cdf_z, chf_z, chf_z_gcq, integrate_pdf_z, mean_z, pdf_z, pdf_z_small, GcqSpec,
};
use crate::specfun::Tolerance;
use crate::sweep::{run_sweep, to_csv_string, Method, SweepRequest};

/// How much Monte Carlo work to spend.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

impl Level {
    // Quick runs keep a hundredth of the samples. At 20 dB and N = 5 the
    // mean is carried by rare small-x draws, so quick criterion 1 there is
    // a smoke check only.
    fn samples(&self, full: u64) -> u64 {
        match self {
            Level::Quick => (full / 100).max(100_000).min(full),
            Level::Full => full,
        }
    }
}

/// One check: passes when `measured <= allowed`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub criterion: u8,
    pub name: String,
    pub measured: f64,
    pub allowed: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(criterion: u8, name: impl Into<String>, measured: f64, allowed: f64) -> Self {
        Self {
            criterion,
            name: name.into(),
            measured,
            allowed,
            // NaN fails.
            passed: measured <= allowed,
        }
    }

    fn error(criterion: u8, name: impl Into<String>, err: &Error) -> Self {
        Self {
            criterion,
            name: format!("{}: {err}", name.into()),
            measured: f64::NAN,
            allowed: 0.0,
            passed: false,
        }
    }
}

fn cfg(n: usize, l: u32) -> RisConfig {
    RisConfig::new(n, l).expect("valid configuration")
}

fn db(rho_db: f64) -> f64 {
    10f64.powf(rho_db / 10.0)
}

fn exact(rho: f64, c: RisConfig) -> Result<f64> {
    ber_chf(rho, c, QuadratureSpec::default())
}

const SEED: u64 = 20_240_601;

/// Exact inversion against the semi-analytic estimator, within 4 standard
/// errors, on {1,2,3,5} x {2,3,4} x {0,10,20} dB.
pub fn criterion_1(level: Level) -> Vec<Check> {
    let n_samples = level.samples(10_000_000);
    let mut out = Vec::new();
    for n in [1, 2, 3, 5] {
        for l in [2, 3, 4] {
            let c = cfg(n, l);
            let grid = [0.0, 10.0, 20.0];
            let rhos: Vec<f64> = grid.iter().map(|&d| db(d)).collect();
            let mc = ber_semi_analytic_many(&rhos, c, n_samples, SEED);
            for (i, &d) in grid.iter().enumerate() {
                let name = format!("N={n} L={l} {d} dB exact_chf vs mc_semi ({n_samples} samples)");
                match (&mc, exact(rhos[i], c)) {
                    (Ok(mc), Ok(p)) => {
                        out.push(Check::new(1, name, (p - mc[i].mean).abs(), 4.0 * mc[i].std_error))
                    }
                    (Err(e), _) => out.push(Check::error(1, name, e)),
                    (_, Err(e)) => out.push(Check::error(1, name, &e)),
                }
            }
        }
    }
    out
}

/// Bit-level simulation against the semi-analytic estimator within the
/// combined 4 standard errors, on {1,2,3} x {2,3,4} x {0,10} dB. Every
/// point has a BER above 1e-3, so even the quick level sees about a hundred
/// bit errors and the normal approximation behind the interval holds.
pub fn criterion_2(level: Level) -> Vec<Check> {
    let n_samples = level.samples(1_000_000);
    let mut out = Vec::new();
    for n in [1, 2, 3] {
        for l in [2, 3, 4] {
            for d in [0.0, 10.0] {
                let c = cfg(n, l);
                let name = format!("N={n} L={l} {d} dB mc_bit vs mc_semi ({n_samples} samples)");
                // Independent seeds so the combined error is that of a difference
                // of independent estimates.
                let bit = ber_bit_sim(db(d), c, n_samples, SEED);
                let semi = ber_semi_analytic(db(d), c, n_samples, SEED + 1);
                match (bit, semi) {
                    (Ok(b), Ok(s)) => {
                        let se = b.std_error.hypot(s.std_error);
                        out.push(Check::new(2, name, (b.mean - s.mean).abs(), 4.0 * se))
                    }
                    (Err(e), _) | (_, Err(e)) => out.push(Check::error(2, name, &e)),
                }
            }
        }
    }
    out
}

/// Largest relative error of the Gauss-Chebyshev CHF over `t_grid`.
pub fn gcq_max_rel_error(levels: u32, n_nodes: usize, t_grid: &[f64]) -> Result<f64> {
    let spec = GcqSpec::new(n_nodes)?;
    let tol = Tolerance::new(1e-15, 1e-13)?;
    let mut worst: f64 = 0.0;
    for &t in t_grid {
        let reference = chf_z(t, levels, tol)?;
        let approx = chf_z_gcq(t, levels, spec)?;
        worst = worst.max((approx - reference).norm() / reference.norm());
    }
    Ok(worst)
}

fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Gauss-Chebyshev CHF with 20 nodes within 1e-8 of the adaptive CHF for
/// t in [1e-2, 1e2]; its error falls at every doubling 5 -> 80.
pub fn criterion_3(_level: Level) -> Vec<Check> {
    let grid = log_grid(1e-2, 1e2, 41);
    let mut out = Vec::new();
    for l in [3, 4, 8] {
        let name = format!("L={l} max relative CHF error at n=20");
        match gcq_max_rel_error(l, 20, &grid) {
            Ok(e) => out.push(Check::new(3, name, e, 1e-8)),
            Err(e) => out.push(Check::error(3, name, &e)),
        }
        let name = format!("L={l} non-decreasing steps of the error as n doubles 5 -> 80");
        let errors: Result<Vec<f64>> = [5, 10, 20, 40, 80]
            .into_iter()
            .map(|n| gcq_max_rel_error(l, n, &grid))
            .collect();
        match errors {
            Ok(errs) => {
                let bad = errs.windows(2).filter(|w| !(w[1] < w[0])).count();
                out.push(Check::new(3, name, bad as f64, 0.0))
            }
            Err(e) => out.push(Check::error(3, name, &e)),
        }
    }
    out
}

fn count_violations<F: Fn(f64, f64) -> bool>(values: &[f64], ok: F) -> f64 {
    values.windows(2).filter(|w| !ok(w[0], w[1])).count() as f64
}

/// N = 5, 0..30 dB: each exact curve strictly decreasing, strict ordering
/// L=2 > L=3 > L=4, and a widening L=2 / L=3 gap.
pub fn criterion_4(_level: Level) -> Vec<Check> {
    let grid: Vec<f64> = (0..=30).map(f64::from).collect();
    let mut curves = Vec::new();
    let mut out = Vec::new();
    for l in [2, 3, 4] {
        let name = format!("N=5 L={l} steps where the exact BER does not decrease");
        let curve: Result<Vec<f64>> = grid.iter().map(|&d| exact(db(d), cfg(5, l))).collect();
        match curve {
            Ok(c) => {
                out.push(Check::new(4, name, count_violations(&c, |a, b| b < a), 0.0));
                curves.push(c);
            }
            Err(e) => {
                out.push(Check::error(4, name, &e));
                return out;
            }
        }
    }
    let unordered = (0..grid.len())
        .filter(|&i| !(curves[0][i] > curves[1][i] && curves[1][i] > curves[2][i]))
        .count();
    out.push(Check::new(4, "N=5 grid points not ordered L=2 > L=3 > L=4", unordered as f64, 0.0));
    let gap: Vec<f64> = (0..grid.len()).map(|i| (curves[0][i] / curves[1][i]).ln()).collect();
    out.push(Check::new(
        4,
        "N=5 steps where the L=2 / L=3 gap does not widen",
        count_violations(&gap, |a, b| b > a),
        0.0,
    ));
    out
}

/// Exact-to-asymptote ratios at 40 dB, and their approach to 1 for L = 4.
pub fn criterion_5(_level: Level) -> Vec<Check> {
    let mut out = Vec::new();
    for n in [1, 2, 3] {
        let name = format!("N={n} L=2 |ln(exact/asym)| at 40 dB (ratio in [0.8, 1.25])");
        let rho = db(40.0);
        match exact(rho, cfg(n, 2)).and_then(|p| Ok(p / ber_asym_twolevel(rho, n)?)) {
            Ok(r) => out.push(Check::new(5, name, r.ln().abs(), 1.25f64.ln())),
            Err(e) => out.push(Check::error(5, name, &e)),
        }
    }
    for n in [1, 2, 3] {
        let grid = [20.0, 25.0, 30.0, 35.0, 40.0];
        let ratios: Result<Vec<(f64, f64)>> = grid
            .iter()
            .map(|&d| {
                let c = cfg(n, 4);
                let r = ber_chf_detailed(db(d), c, QuadratureSpec::default())?;
                Ok((r.ber / ber_asym_multilevel(db(d), c)?, r.abs_err / r.ber))
            })
            .collect();
        let name40 = format!("N={n} L=4 |log2(exact/asym)| at 40 dB (ratio in [0.5, 2])");
        let name_mono = format!(
            "N={n} L=4 largest growth of |1 - exact/asym| over 20..40 dB beyond quadrature noise"
        );
        match ratios {
            Ok(r) => {
                out.push(Check::new(5, name40, r[4].0.log2().abs(), 1.0));
                let growth = r
                    .windows(2)
                    .map(|w| (1.0 - w[1].0).abs() - (1.0 - w[0].0).abs() - (w[0].1 + w[1].1))
                    .fold(f64::NEG_INFINITY, f64::max);
                out.push(Check::new(5, name_mono, growth, 0.0));
            }
            Err(e) => {
                out.push(Check::error(5, name40, &e));
                out.push(Check::error(5, name_mono, &e));
            }
        }
    }
    out
}

fn measured_slope(c: RisConfig, lo_db: f64, hi_db: f64) -> Result<f64> {
    let lo = exact(db(lo_db), c)?;
    let hi = exact(db(hi_db), c)?;
    Ok((lo.log10() - hi.log10()) / ((hi_db - lo_db) / 10.0))
}

/// Local diversity slopes: N/2 for L = 2 (30..40 dB), N (1 - 1/ln rho) for
/// L = 4 (35..40 dB), within 15 %.
pub fn criterion_6(_level: Level) -> Vec<Check> {
    let mut out = Vec::new();
    for n in [2, 4] {
        let name = format!("N={n} L=2 relative slope error 30..40 dB (expected {})", n as f64 / 2.0);
        match measured_slope(cfg(n, 2), 30.0, 40.0) {
            Ok(s) => out.push(Check::new(6, name, (s / (n as f64 / 2.0) - 1.0).abs(), 0.15)),
            Err(e) => out.push(Check::error(6, name, &e)),
        }
        let expected = multilevel_slope(db(37.5), n);
        let name = format!("N={n} L=4 relative slope error 35..40 dB (expected {expected:.4})");
        match measured_slope(cfg(n, 4), 35.0, 40.0) {
            Ok(s) => out.push(Check::new(6, name, (s / expected - 1.0).abs(), 0.15)),
            Err(e) => out.push(Check::error(6, name, &e)),
        }
    }
    out
}

/// Kolmogorov-Smirnov statistic `sqrt(n) D_n` of `samples` against `cdf`.
pub fn ks_statistic<F: Fn(f64) -> Result<f64>>(samples: &mut [f64], cdf: F) -> Result<f64> {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x)?;
        d = d.max(((i + 1) as f64 / n - f).abs()).max((f - i as f64 / n).abs());
    }
    Ok(d * n.sqrt())
}

/// Asymptotic 1 % critical value of `sqrt(n) D_n`.
pub const KS_CRITICAL_1PCT: f64 = 1.627_6;

/// Distribution-level checks of `z`.
pub fn criterion_7(level: Level) -> Vec<Check> {
    let mut out = Vec::new();
    let tol = Tolerance::new(1e-15, 1e-13).expect("valid");
    for l in [2, 3, 4, 8, 16] {
        let name = format!("L={l} |int pdf_z - 1|");
        match integrate_pdf_z(l, |_| 1.0) {
            Ok(v) => out.push(Check::new(7, name, (v - 1.0).abs(), 1e-8)),
            Err(e) => out.push(Check::error(7, name, &e)),
        }
        let name = format!("L={l} |int z pdf_z - (L/4) sin(pi/L)|");
        match integrate_pdf_z(l, |z| z) {
            Ok(v) => out.push(Check::new(7, name, (v - mean_z(l)).abs(), 1e-6)),
            Err(e) => out.push(Check::error(7, name, &e)),
        }
        let name = format!("L={l} |chf_z(0) - 1|");
        match chf_z(0.0, l, tol) {
            Ok(v) => out.push(Check::new(7, name, (v - 1.0).norm(), 1e-10)),
            Err(e) => out.push(Check::error(7, name, &e)),
        }
    }
    let mut worst: f64 = 0.0;
    for t in log_grid(1e-3, 1e3, 61).into_iter().flat_map(|t| [t, -t]) {
        let closed = Complex64::new(2.0, 0.0) / Complex64::new(2.0, -t);
        worst = worst.max((chf_z(t, 2, tol).expect("closed form") - closed).norm());
    }
    out.push(Check::new(7, "L=2 max |chf_z - 2/(2 - jt)|", worst, 1e-12));
    let n = level.samples(1_000_000) as usize;
    for l in [2, 4] {
        let name = format!("L={l} KS sqrt(n) D_n of {n} sampled z (1% level)");
        let mut zs = sample_combined(cfg(1, l), n, SEED);
        match ks_statistic(&mut zs, |z| cdf_z(z, l)) {
            Ok(k) => out.push(Check::new(7, name, k, KS_CRITICAL_1PCT)),
            Err(e) => out.push(Check::error(7, name, &e)),
        }
    }
    out
}

/// pdf_z against its small-argument form at z = 1e-5, L = 4.
pub fn criterion_8(_level: Level) -> Vec<Check> {
    let name = "L=4 |pdf_z / pdf_z_small - 1| at z = 1e-5";
    match pdf_z(1e-5, 4).and_then(|p| Ok(p / pdf_z_small(1e-5, 4)?)) {
        Ok(r) => vec![Check::new(8, name, (r - 1.0).abs(), 0.1)],
        Err(e) => vec![Check::error(8, name, &e)],
    }
}

/// Quantization penalties in dB.
pub fn criterion_9(_level: Level) -> Vec<Check> {
    let mut out = Vec::new();
    for (l, expected) in [(3, 2.1852), (4, 1.0491)] {
        let name = format!("L={l} |penalty - {expected} dB|");
        match quantization_penalty(100.0, l, 1) {
            Ok(p) => out.push(Check::new(9, name, (p - expected).abs(), 1e-3)),
            Err(e) => out.push(Check::error(9, name, &e)),
        }
    }
    match quantization_penalty(100.0, 1024, 1) {
        Ok(p) => out.push(Check::new(9, "L=1024 penalty in dB", p, 0.01)),
        Err(e) => out.push(Check::error(9, "L=1024 penalty in dB", &e)),
    }
    out
}

fn sweep_csv(req: &SweepRequest, threads: usize) -> Result<String> {
    let pool = ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| to_csv_string(&run_sweep(req)?.points))
}

/// Repeated sweeps, also under different worker counts, give identical
/// CSV bytes.
pub fn criterion_10(level: Level) -> Vec<Check> {
    let mut req = SweepRequest::new(cfg(3, 4), 0.0, 20.0, 5.0).with_methods(Method::ALL);
    req.n_samples = level.samples(200_000).min(200_000);
    req.seed = SEED;
    let runs: Result<Vec<String>> = [1, 1, 3].into_iter().map(|t| sweep_csv(&req, t)).collect();
    match runs {
        Ok(r) => vec![
            Check::new(10, "repeated sweep CSV differs", (r[0] != r[1]) as u8 as f64, 0.0),
            Check::new(10, "sweep CSV differs between 1 and 3 workers", (r[0] != r[2]) as u8 as f64, 0.0),
        ],
        Err(e) => vec![Check::error(10, "sweep", &e)],
    }
}

/// All checks, criterion by criterion.
pub fn run_validate(level: Level) -> Vec<Check> {
    let groups: [fn(Level) -> Vec<Check>; 10] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
    ];
    groups.iter().flat_map(|g| g(level)).collect()
}

/// Writes the report as CSV, one record per check.
pub fn write_report<W: Write>(checks: &[Check], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for c in checks {
        w.serialize(c)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_semantics() {
        assert!(Check::new(1, "a", 0.5, 1.0).passed);
        assert!(Check::new(1, "a", 1.0, 1.0).passed);
        assert!(!Check::new(1, "a", 1.5, 1.0).passed);
        assert!(!Check::new(1, "a", f64::NAN, 1.0).passed);
    }

    #[test]
    fn ks_of_exact_quantiles_is_small() {
        let n = 1000;
        let mut xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let k = ks_statistic(&mut xs, |x| Ok(x)).unwrap();
        assert!((k - 0.5 / (n as f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn quick_levels_shrink_samples() {
        assert_eq!(Level::Quick.samples(10_000_000), 100_000);
        assert_eq!(Level::Quick.samples(50_000), 50_000);
        assert_eq!(Level::Full.samples(10_000_000), 10_000_000);
    }

    #[test]
    fn cheap_criteria_pass() {
        for c in criterion_8(Level::Quick).into_iter().chain(criterion_9(Level::Quick)) {
            assert!(c.passed, "{c:?}");
        }
    }
}
