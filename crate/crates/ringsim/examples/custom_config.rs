//! Parse a config document, run it, and echo the fully-resolved
//! configuration back out.
//!
//!     cargo run --example custom_config

use ringsim::config::{emit_config, parse_config, ParsedConfig};
use ringsim::scenario::run;

const DOC: &str = r#"
scenario = "III"
fleet = "ICE"

[attack]
kind = "ba"
blinded_p = 2
spacing_cap_phi = 50.0
ba_gaps_only = true
window = [60.0, 90.0]
"#;

fn main() {
    let config = match parse_config(DOC).expect("document is well-formed") {
        ParsedConfig::Single(config) => config,
        ParsedConfig::Sweep(_) => unreachable!("document has no sweep axes"),
    };

    println!("resolved configuration:\n{}", emit_config(&config));

    let result = run(config).unwrap();
    match &result.collision {
        Some(c) => println!("collision at t = {:.2} s: vehicle {} into vehicle {}", c.time, c.follower, c.leader),
        None => println!("no collision"),
    }
}
