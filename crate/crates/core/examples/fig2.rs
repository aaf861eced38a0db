//! Figure 2 data: exact and asymptotic BER for N = 1, 2, 4 and L = 3, 8.
//!
//! cargo run --release --example fig2 > fig2.csv

use std::io;

use risber::sweep::{self, run_sweep};

fn main() -> risber::Result<()> {
    let mut points = Vec::new();
    for req in sweep::fig2_requests() {
        let s = run_sweep(&req)?;
        for f in &s.failures {
            eprintln!("{} N={} L={} {} dB: {}", f.method, req.config.n_elements(), req.config.levels(), f.rho_db, f.message);
        }
        points.extend(s.points);
    }
    sweep::write_csv(&points, io::stdout().lock())
}
