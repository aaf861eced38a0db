//! Runs the self-checks and prints the failing ones.
//!
//! cargo run --release --example validate -- [quick|full]

use risber::validate::{run_validate, Level};

fn main() {
    let level = match std::env::args().nth(1).as_deref() {
        Some("full") => Level::Full,
        _ => Level::Quick,
    };
    let checks = run_validate(level);
    let failed: Vec<_> = checks.iter().filter(|c| !c.passed).collect();
    for c in &failed {
        println!("criterion {}: {} (measured {:.3e}, allowed {:.3e})", c.criterion, c.name, c.measured, c.allowed);
    }
    println!("{} checks, {} failed", checks.len(), failed.len());
}
