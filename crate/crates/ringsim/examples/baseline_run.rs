//! Run the no-attack baseline for one scenario and fleet, print the
//! phase-sliced stability metrics and write the trajectory CSV.
//!
//!     cargo run --example baseline_run

use ringsim::attack::AttackSpec;
use ringsim::metrics::phase_metrics;
use ringsim::output::write_trajectory_csv;
use ringsim::scenario::{run, Phase, ScenarioId, SimConfig};
use ringsim::state::Powertrain;

fn main() {
    let config = SimConfig::new(ScenarioId::I, Powertrain::Ev, AttackSpec::none());
    let result = run(config).expect("baseline config is valid");

    println!("scenario I, EV fleet, no attack");
    for phase in Phase::ALL {
        let m = phase_metrics(&result, phase);
        println!(
            "  {:<6} V_avg {:6.3} m/s   VSD {:6.4}   SSD {:6.4}   THW {:5.3} s",
            phase.label(),
            m.v_avg.unwrap(),
            m.mean_vsd.unwrap(),
            m.mean_ssd.unwrap(),
            m.thw.unwrap(),
        );
    }

    let path = std::env::temp_dir().join("baseline_I_ev.csv");
    write_trajectory_csv(&result, &path).expect("temp dir is writable");
    println!("trajectory written to {}", path.display());
}
