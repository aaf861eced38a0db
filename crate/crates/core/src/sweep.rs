//! SNR sweeps over several BER methods, and their CSV form.
//!
//! Rows come out sorted by method name, then SNR. Each point is computed
//! independently of every other and of the thread count, so a request
//! with a fixed seed always produces the same bytes.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ber_asymptotic::ber_asym;
use crate::ber_exact::{ber_chf, ChfPath, QuadratureSpec};
use crate::channel::{RisConfig, SnrPoint};
use crate::error::{Error, Result};
use crate::montecarlo::{ber_bit_sim, ber_semi_analytic_many, McEstimate, MIN_SAMPLES};

/// BER evaluation method. The order is that of the lowercase names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// High-SNR asymptote.
    Asym,
    /// Characteristic-function inversion with the adaptive CHF.
    ExactChf,
    /// Characteristic-function inversion with the Gauss-Chebyshev CHF.
    ExactChfGcq,
    /// Bit-level simulation.
    McBit,
    /// Semi-analytic Monte Carlo.
    McSemi,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Asym,
        Method::ExactChf,
        Method::ExactChfGcq,
        Method::McBit,
        Method::McSemi,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Asym => "asym",
            Method::ExactChf => "exact_chf",
            Method::ExactChfGcq => "exact_chf_gcq",
            Method::McBit => "mc_bit",
            Method::McSemi => "mc_semi",
        }
    }

    pub fn is_monte_carlo(&self) -> bool {
        matches!(self, Method::McBit | Method::McSemi)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Method::ALL.iter().map(|m| m.name()).collect();
                Error::Config(format!("unknown method '{s}', expected one of {}", names.join(", ")))
            })
    }
}

/// One row of sweep output. `ber` is empty for a failed point;
/// `std_error`, `n_samples` and `seed` are set for Monte Carlo rows only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BerPoint {
    pub rho_db: f64,
    pub ber: Option<f64>,
    pub std_error: Option<f64>,
    pub method: Method,
    pub n_elements: usize,
    pub levels: u32,
    pub n_samples: Option<u64>,
    pub seed: Option<u64>,
}

/// A point that could not be evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct PointFailure {
    pub method: Method,
    pub rho_db: f64,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct SweepRequest {
    pub config: RisConfig,
    pub rho_db_start: f64,
    pub rho_db_stop: f64,
    pub rho_db_step: f64,
    pub methods: BTreeSet<Method>,
    pub n_samples: u64,
    pub seed: u64,
    pub quad: QuadratureSpec,
}

impl SweepRequest {
    pub fn new(config: RisConfig, rho_db_start: f64, rho_db_stop: f64, rho_db_step: f64) -> Self {
        Self {
            config,
            rho_db_start,
            rho_db_stop,
            rho_db_step,
            methods: BTreeSet::from([Method::ExactChf]),
            n_samples: 1_000_000,
            seed: 1,
            quad: QuadratureSpec::default(),
        }
    }

    pub fn with_methods<I: IntoIterator<Item = Method>>(mut self, methods: I) -> Self {
        self.methods = methods.into_iter().collect();
        self
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b, h) = (self.rho_db_start, self.rho_db_stop, self.rho_db_step);
        if !(a.is_finite() && b.is_finite() && h.is_finite()) {
            return Err(Error::Config("SNR range must be finite".into()));
        }
        if !(h > 0.0) {
            return Err(Error::Config(format!("SNR step must be positive, got {h}")));
        }
        if a > b {
            return Err(Error::Config(format!("SNR start {a} exceeds stop {b}")));
        }
        if self.methods.iter().any(Method::is_monte_carlo) && self.n_samples < MIN_SAMPLES {
            return Err(Error::Config(format!(
                "at least {MIN_SAMPLES} samples are required, got {}",
                self.n_samples
            )));
        }
        Ok(())
    }

    /// Grid `start, start + step, ..` up to `stop` (inclusive up to a
    /// small tolerance), rounded to 1e-9 dB so that e.g. `0.1 * 3` prints
    /// as `0.3`.
    pub fn rho_db_grid(&self) -> Vec<f64> {
        let span = (self.rho_db_stop - self.rho_db_start) / self.rho_db_step;
        let count = (span + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| {
                let v = self.rho_db_start + i as f64 * self.rho_db_step;
                (v * 1e9).round() / 1e9
            })
            .collect()
    }
}

/// Rows plus the reasons for any failed points.
#[derive(Debug, Clone, Default)]
pub struct Sweep {
    pub points: Vec<BerPoint>,
    pub failures: Vec<PointFailure>,
}

impl Sweep {
    /// True when there were points and none of them succeeded.
    pub fn all_failed(&self) -> bool {
        !self.points.is_empty() && self.points.iter().all(|p| p.ber.is_none())
    }
}

fn analytic_point(method: Method, req: &SweepRequest, rho_db: f64) -> (BerPoint, Option<String>) {
    let rho = SnrPoint::from_db(rho_db).map(|s| s.rho());
    let value = rho.and_then(|rho| match method {
        Method::Asym => ber_asym(rho, req.config).and_then(|v| {
            if v > 0.5 {
                Err(Error::Regime(format!(
                    "asymptote {v:.3e} exceeds 1/2; SNR too low for the high-SNR form"
                )))
            } else {
                Ok(v)
            }
        }),
        Method::ExactChf => ber_chf(rho, req.config, QuadratureSpec { path: ChfPath::Exact, ..req.quad }),
        Method::ExactChfGcq => ber_chf(rho, req.config, QuadratureSpec { path: ChfPath::Gcq, ..req.quad }),
        Method::McBit | Method::McSemi => unreachable!("Monte Carlo points are built elsewhere"),
    });
    let point = BerPoint {
        rho_db,
        ber: value.as_ref().ok().copied(),
        std_error: None,
        method,
        n_elements: req.config.n_elements(),
        levels: req.config.levels(),
        n_samples: None,
        seed: None,
    };
    (point, value.err().map(|e| e.to_string()))
}

fn mc_point(
    method: Method,
    req: &SweepRequest,
    rho_db: f64,
    est: std::result::Result<McEstimate, String>,
) -> (BerPoint, Option<String>) {
    let point = BerPoint {
        rho_db,
        ber: est.as_ref().ok().map(|e| e.mean),
        std_error: est.as_ref().ok().map(|e| e.std_error),
        method,
        n_elements: req.config.n_elements(),
        levels: req.config.levels(),
        n_samples: Some(req.n_samples),
        seed: Some(req.seed),
    };
    (point, est.err())
}

fn mc_rows(method: Method, req: &SweepRequest, grid: &[f64]) -> Vec<(BerPoint, Option<String>)> {
    let rhos: Vec<f64> = grid.iter().map(|db| 10f64.powf(db / 10.0)).collect();
    match method {
        Method::McSemi => match ber_semi_analytic_many(&rhos, req.config, req.n_samples, req.seed) {
            Ok(ests) => grid
                .iter()
                .zip(ests)
                .map(|(&db, e)| mc_point(method, req, db, Ok(e)))
                .collect(),
            Err(e) => grid
                .iter()
                .map(|&db| mc_point(method, req, db, Err(e.to_string())))
                .collect(),
        },
        Method::McBit => grid
            .iter()
            .zip(&rhos)
            .map(|(&db, &rho)| {
                let est = ber_bit_sim(rho, req.config, req.n_samples, req.seed);
                mc_point(method, req, db, est.map_err(|e| e.to_string()))
            })
            .collect(),
        _ => unreachable!("analytic methods are built elsewhere"),
    }
}

/// Evaluates every (method, SNR) pair of the request. Failures are
/// reported per point and never abort the sweep.
pub fn run_sweep(req: &SweepRequest) -> Result<Sweep> {
    req.validate()?;
    let grid = req.rho_db_grid();
    let mut rows: Vec<(BerPoint, Option<String>)> = Vec::new();
    for &method in &req.methods {
        if method.is_monte_carlo() {
            rows.extend(mc_rows(method, req, &grid));
        } else {
            let part: Vec<_> = grid
                .par_iter()
                .map(|&db| analytic_point(method, req, db))
                .collect();
            rows.extend(part);
        }
    }
    rows.sort_by(|a, b| {
        a.0.method
            .cmp(&b.0.method)
            .then(a.0.rho_db.total_cmp(&b.0.rho_db))
    });
    let mut sweep = Sweep::default();
    for (point, err) in rows {
        if let Some(message) = err {
            sweep.failures.push(PointFailure {
                method: point.method,
                rho_db: point.rho_db,
                message,
            });
        }
        sweep.points.push(point);
    }
    Ok(sweep)
}

/// Figure 1: N = 5, L in {2, 3, 4}, 0 to 30 dB.
pub fn fig1_requests(n_samples: u64, seed: u64) -> Vec<SweepRequest> {
    [2, 3, 4]
        .into_iter()
        .map(|l| {
            let mut r = SweepRequest::new(RisConfig::new(5, l).expect("valid"), 0.0, 30.0, 1.0)
                .with_methods([Method::ExactChf, Method::Asym, Method::McSemi]);
            r.n_samples = n_samples;
            r.seed = seed;
            r
        })
        .collect()
}

/// Figure 2: exact and asymptotic BER for N in {1, 2, 4} and L in {3, 8},
/// 0 to 40 dB.
pub fn fig2_requests() -> Vec<SweepRequest> {
    let mut out = Vec::new();
    for n in [1, 2, 4] {
        for l in [3, 8] {
            out.push(
                SweepRequest::new(RisConfig::new(n, l).expect("valid"), 0.0, 40.0, 2.0)
                    .with_methods([Method::ExactChf, Method::Asym]),
            );
        }
    }
    out
}

/// Writes rows with a header line.
pub fn write_csv<W: Write>(points: &[BerPoint], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(out);
    if points.is_empty() {
        w.write_record(CSV_HEADER)?;
    }
    for p in points {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}

pub const CSV_HEADER: [&str; 8] = [
    "rho_db",
    "ber",
    "std_error",
    "method",
    "n_elements",
    "levels",
    "n_samples",
    "seed",
];

/// CSV text of `points`, header included.
pub fn to_csv_string(points: &[BerPoint]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(points, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

/// Parses rows written by [`write_csv`].
pub fn read_csv<R: Read>(input: R) -> Result<Vec<BerPoint>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Config(format!("unexpected CSV header: {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn request(methods: &[Method]) -> SweepRequest {
        let mut r = SweepRequest::new(RisConfig::new(2, 4).unwrap(), 0.0, 10.0, 5.0)
            .with_methods(methods.iter().copied());
        r.n_samples = 5_000;
        r
    }

    #[test]
    fn method_names_roundtrip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("exact".parse::<Method>().is_err());
        let mut sorted = Method::ALL.to_vec();
        sorted.sort_by_key(|m| m.name());
        assert_eq!(sorted, Method::ALL.to_vec());
    }

    #[test]
    fn grid_is_inclusive_and_rounded() {
        let r = SweepRequest::new(RisConfig::new(1, 2).unwrap(), 0.0, 0.3, 0.1);
        assert_eq!(r.rho_db_grid(), vec![0.0, 0.1, 0.2, 0.3]);
        let r = SweepRequest::new(RisConfig::new(1, 2).unwrap(), 5.0, 5.0, 1.0);
        assert_eq!(r.rho_db_grid(), vec![5.0]);
    }

    #[test]
    fn invalid_requests() {
        let mut r = request(&[]);
        r.rho_db_step = 0.0;
        assert!(run_sweep(&r).is_err());
        let mut r = request(&[]);
        r.rho_db_start = 20.0;
        assert!(run_sweep(&r).is_err());
    }

    #[test]
    fn empty_method_set_gives_header_only() {
        let s = run_sweep(&request(&[])).unwrap();
        assert!(s.points.is_empty());
        assert!(!s.all_failed());
        assert_eq!(to_csv_string(&s.points).unwrap(), CSV_HEADER.join(",") + "\n");
    }

    #[test]
    fn rows_sorted_and_optional_fields_set() {
        let s = run_sweep(&request(&[Method::McSemi, Method::ExactChf, Method::Asym])).unwrap();
        let keys: Vec<_> = s.points.iter().map(|p| (p.method, p.rho_db)).collect();
        let mut sorted = keys.clone();
        sorted.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        assert_eq!(keys, sorted);
        assert_eq!(s.points.len(), 9);
        for p in &s.points {
            assert_eq!(p.std_error.is_some(), p.method.is_monte_carlo());
            assert_eq!(p.n_samples.is_some(), p.method.is_monte_carlo());
        }
        // The asymptote is undefined at 0 dB for L > 2.
        assert_eq!(s.failures.len(), 1);
        assert_eq!((s.failures[0].method, s.failures[0].rho_db), (Method::Asym, 0.0));
    }

    #[test]
    fn csv_header_and_empty_fields() {
        let p = BerPoint {
            rho_db: 10.0,
            ber: Some(0.25),
            std_error: None,
            method: Method::ExactChfGcq,
            n_elements: 3,
            levels: 4,
            n_samples: None,
            seed: None,
        };
        let text = to_csv_string(&[p]).unwrap();
        assert_eq!(text, "rho_db,ber,std_error,method,n_elements,levels,n_samples,seed\n10.0,0.25,,exact_chf_gcq,3,4,,\n");
    }

    fn arb_point() -> impl Strategy<Value = BerPoint> {
        (
            -50.0f64..80.0,
            proptest::option::of(0.0f64..=0.5),
            proptest::option::of(0.0f64..1.0),
            0usize..5,
            1usize..1000,
            2u32..64,
            proptest::option::of(1000u64..u64::MAX / 2),
            proptest::option::of(any::<u64>()),
        )
            .prop_map(|(rho_db, ber, std_error, m, n, l, n_samples, seed)| BerPoint {
                rho_db,
                ber,
                std_error,
                method: Method::ALL[m],
                n_elements: n,
                levels: l,
                n_samples,
                seed,
            })
    }

    proptest! {
        #[test]
        fn csv_roundtrip(points in proptest::collection::vec(arb_point(), 0..20)) {
            let text = to_csv_string(&points).unwrap();
            let back = read_csv(text.as_bytes()).unwrap();
            prop_assert_eq!(back, points);
        }
    }
}
