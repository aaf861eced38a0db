//! Figure 1 data: N = 5, L = 2, 3, 4, exact, asymptotic and semi-analytic BER.
//!
//! cargo run --release --example fig1 > fig1.csv

use std::io;

use risber::sweep::{self, run_sweep};

fn main() -> risber::Result<()> {
    let samples: u64 = std::env::args().nth(1).map_or(Ok(1_000_000), |s| s.parse()).expect("samples");
    let mut points = Vec::new();
    for req in sweep::fig1_requests(samples, 1) {
        let s = run_sweep(&req)?;
        for f in &s.failures {
            eprintln!("{} N={} L={} {} dB: {}", f.method, req.config.n_elements(), req.config.levels(), f.rho_db, f.message);
        }
        points.extend(s.points);
    }
    sweep::write_csv(&points, io::stdout().lock())
}
