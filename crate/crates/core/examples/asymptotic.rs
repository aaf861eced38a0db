//! High-SNR behaviour: asymptotes, diversity order, coding gain and the
//! quantization penalty.
//!
//! cargo run --release --example asymptotic

use risber::ber_asymptotic::{ber_asym, diversity_report, quantization_penalty};
use risber::ber_exact::{ber_chf, QuadratureSpec};
use risber::RisConfig;

fn main() -> risber::Result<()> {
    for (n, l) in [(2, 2), (2, 4), (4, 8)] {
        let c = RisConfig::new(n, l)?;
        let rep = diversity_report(c, 1e4)?;
        println!(
            "N={n} L={l}: {:?}, diversity {}, coding gain {:.4} at 40 dB",
            rep.regime, rep.diversity_order, rep.coding_gain
        );
        println!("{:>6} {:>13} {:>13} {:>8}", "dB", "exact", "asymptote", "ratio");
        for db in (20..=40).step_by(5) {
            let rho = 10f64.powf(db as f64 / 10.0);
            let e = ber_chf(rho, c, QuadratureSpec::default())?;
            let a = ber_asym(rho, c)?;
            println!("{db:>6} {e:>13.5e} {a:>13.5e} {:>8.4}", e / a);
        }
        println!();
    }

    println!("penalty against ideal phases (dB)");
    for l in [3, 4, 8, 16, 1024] {
        println!("L={l:<5} {:.5}", quantization_penalty(100.0, l, 1)?);
    }
    for db in [20.0, 30.0, 40.0] {
        let p = quantization_penalty(10f64.powf(db / 10.0), 2, 2)?;
        println!("L=2 N=2 at {db} dB: {p:.3}");
    }
    Ok(())
}
