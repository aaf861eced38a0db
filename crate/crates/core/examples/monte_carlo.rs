//! Semi-analytic and bit-level Monte Carlo against the exact BER.
//!
//! cargo run --release --example monte_carlo -- [samples] [seed]

use risber::ber_exact::{ber_chf, QuadratureSpec};
use risber::montecarlo::{ber_bit_sim, ber_semi_analytic};
use risber::RisConfig;

fn main() -> risber::Result<()> {
    let mut args = std::env::args().skip(1);
    let samples: u64 = args.next().map_or(Ok(1_000_000), |s| s.parse()).expect("samples");
    let seed: u64 = args.next().map_or(Ok(1), |s| s.parse()).expect("seed");
    let config = RisConfig::new(3, 4)?;

    println!("N=3 L=4, {samples} samples, seed {seed}");
    println!("{:>4} {:>12} {:>22} {:>22}", "dB", "exact", "semi-analytic", "bit-level");
    for db in [0.0, 5.0, 10.0] {
        let rho = 10f64.powf(db / 10.0);
        let exact = ber_chf(rho, config, QuadratureSpec::default())?;
        let semi = ber_semi_analytic(rho, config, samples, seed)?;
        let bit = ber_bit_sim(rho, config, samples, seed)?;
        println!(
            "{db:>4} {exact:>12.5e} {:>12.5e} +- {:.1e} {:>12.5e} +- {:.1e}",
            semi.mean, semi.std_error, bit.mean, bit.std_error
        );
    }
    Ok(())
}
