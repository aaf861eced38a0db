//! Density and distribution of one element's effective gain `z`.
//!
//! cargo run --release --example pdf_z -- [L]

use risber::phase_stats::{cdf_z, mean_z, pdf_z, pdf_z_small};

fn main() -> risber::Result<()> {
    let l: u32 = std::env::args().nth(1).map_or(Ok(4), |s| s.parse()).expect("L must be an integer");
    println!("L={l}, mean {:.6}", mean_z(l));
    println!("{:>10} {:>14} {:>14} {:>14}", "z", "pdf", "cdf", "small-z form");
    for z in [1e-6, 1e-4, 1e-2, 0.1, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0] {
        // Defined for L > 2 and z tan(pi/L) < 1 only.
        let small = pdf_z_small(z, l).map_or("-".into(), |v| format!("{v:.6e}"));
        println!("{z:>10.1e} {:>14.6e} {:>14.6e} {small:>14}", pdf_z(z, l)?, cdf_z(z, l)?);
    }
    Ok(())
}
