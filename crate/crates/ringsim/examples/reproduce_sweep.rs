//! Execute the full built-in experiment grid in parallel and print the
//! assembled plain-text report, including the risk classification.
//!
//!     cargo run --release --example reproduce_sweep

use ringsim::config::SweepSpec;
use ringsim::report::emit_report;
use ringsim::sweep::run_sweep;

fn main() {
    let spec = SweepSpec::reproduction(std::env::temp_dir());
    let output = run_sweep(&spec, 8);
    print!("{}", emit_report(&output));
}
