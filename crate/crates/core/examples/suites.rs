//! Runs every verification suite and prints each property's final value.

use toric_ot::convergence::{run_suite, SUITES};

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    for name in SUITES {
        let t = std::time::Instant::now();
        match run_suite(name, seed) {
            Ok(r) => {
                println!("{name}: pass={} ({:.2?})", r.pass, t.elapsed());
                for (k, p) in &r.properties {
                    println!("  {k:40} {:5} worst {:.3e}", p.pass, p.worst_case);
                }
            }
            Err(e) => println!("{name}: error {e}"),
        }
    }
}
