//! Gauss-Chebyshev CHF of one element against the adaptive evaluation,
//! and what the rule's error does to the BER.
//!
//! cargo run --release --example gcq_chf

use risber::ber_exact::{ber_chf, QuadratureSpec};
use risber::validate::gcq_max_rel_error;
use risber::RisConfig;

fn main() -> risber::Result<()> {
    let grid: Vec<f64> = (0..=40).map(|i| 10f64.powf(-2.0 + i as f64 / 10.0)).collect();
    println!("max relative CHF error over t in [1e-2, 1e2]");
    print!("{:>6}", "nodes");
    for l in [3, 4, 8] {
        print!(" {:>12}", format!("L={l}"));
    }
    println!();
    for nodes in [5, 10, 20, 40, 80, 160] {
        print!("{nodes:>6}");
        for l in [3, 4, 8] {
            print!(" {:>12.3e}", gcq_max_rel_error(l, nodes, &grid)?);
        }
        println!();
    }

    println!("\nN=5 BER, adaptive vs 20-node rule");
    let gcq = QuadratureSpec::gcq(20)?;
    for l in [3, 4] {
        let c = RisConfig::new(5, l)?;
        for db in [0.0, 10.0, 20.0] {
            let rho = 10f64.powf(db / 10.0);
            let e = ber_chf(rho, c, QuadratureSpec::default())?;
            let g = ber_chf(rho, c, gcq)?;
            println!("L={l} {db:>4} dB  {e:.6e}  {g:.6e}  rel {:.2e}", (g - e).abs() / e);
        }
    }
    Ok(())
}
