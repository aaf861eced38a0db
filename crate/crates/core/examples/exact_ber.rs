//! Exact BER by CHF inversion over an SNR range.
//!
//! cargo run --release --example exact_ber -- [N] [L]

use risber::ber_exact::{ber_chf_detailed, QuadratureSpec};
use risber::{RisConfig, SnrPoint};

fn main() -> risber::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(Ok(4), |s| s.parse()).expect("N must be an integer");
    let l: u32 = args.next().map_or(Ok(4), |s| s.parse()).expect("L must be an integer");
    let config = RisConfig::new(n, l)?;

    println!("N={n} L={l}");
    println!("{:>6} {:>14} {:>10} {:>10} {:>8}", "dB", "ber", "abs_err", "t_max", "evals");
    for db in (0..=40).step_by(5) {
        let rho = SnrPoint::from_db(db as f64)?.rho();
        let r = ber_chf_detailed(rho, config, QuadratureSpec::default())?;
        println!(
            "{db:>6} {:>14.6e} {:>10.2e} {:>10.3e} {:>8}",
            r.ber, r.abs_err, r.t_max, r.evaluations
        );
    }
    Ok(())
}
