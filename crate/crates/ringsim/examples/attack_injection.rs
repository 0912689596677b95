//! Inject one attack into a scenario and compare it against the
//! baseline: collision outcome plus during-phase metric shifts.
//!
//!     cargo run --example attack_injection

use ringsim::attack::{AttackKind, AttackSpec};
use ringsim::metrics::phase_metrics;
use ringsim::scenario::{run, Phase, ScenarioId, SimConfig};
use ringsim::state::Powertrain;

fn main() {
    let scenario = ScenarioId::IV;
    let fleet = Powertrain::Ice;

    // Targets left empty bind to the scenario's attacked set.
    let mut attack = AttackSpec::with_kind(AttackKind::Dpda, []);
    attack.delay_m = 6.0;

    let baseline = run(SimConfig::new(scenario, fleet, AttackSpec::none())).unwrap();
    let attacked = run(SimConfig::new(scenario, fleet, attack)).unwrap();

    println!("scenario IV, ICE fleet, 6 s communication delay on the attacked vehicles");
    match &attacked.collision {
        Some(c) => println!("  collision at t = {:.2} s: vehicle {} into vehicle {}", c.time, c.follower, c.leader),
        None => println!("  no collision"),
    }

    let base = phase_metrics(&baseline, Phase::During);
    let hit = phase_metrics(&attacked, Phase::During);
    match (hit.v_avg, hit.mean_vsd) {
        (Some(v), Some(vsd)) => println!(
            "  during-phase V_avg {:.2} -> {:.2} m/s, VSD {:.3} -> {:.3}",
            base.v_avg.unwrap(),
            v,
            base.mean_vsd.unwrap(),
            vsd,
        ),
        _ => println!("  during phase truncated by the collision; no metrics"),
    }
}
