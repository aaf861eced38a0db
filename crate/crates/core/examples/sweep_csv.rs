//! A custom sweep built in code and written as CSV, then read back.
//!
//! cargo run --release --example sweep_csv

use risber::sweep::{read_csv, run_sweep, to_csv_string, Method, SweepRequest};
use risber::RisConfig;

fn main() -> risber::Result<()> {
    let mut req = SweepRequest::new(RisConfig::new(8, 3)?, 0.0, 20.0, 2.5)
        .with_methods([Method::ExactChf, Method::Asym, Method::McSemi]);
    req.n_samples = 200_000;
    req.seed = 42;
    let sweep = run_sweep(&req)?;
    let text = to_csv_string(&sweep.points)?;
    print!("{text}");
    assert_eq!(read_csv(text.as_bytes())?, sweep.points);
    eprintln!("{} rows, {} failed points", sweep.points.len(), sweep.failures.len());
    Ok(())
}
