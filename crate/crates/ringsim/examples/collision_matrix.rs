//! Collision matrix: every attack kind against every scenario for both
//! fleets, printing the collision time or "-" per cell.
//!
//!     cargo run --release --example collision_matrix

use ringsim::attack::{AttackKind, AttackSpec};
use ringsim::scenario::{run, ScenarioId, SimConfig};
use ringsim::state::Powertrain;

fn main() {
    let mut attacks = Vec::new();
    for delay in [6.0, 8.0, 9.0] {
        let mut a = AttackSpec::with_kind(AttackKind::Dpda, []);
        a.delay_m = delay;
        attacks.push(a);
    }
    attacks.push(AttackSpec::with_kind(AttackKind::Pa, []));
    attacks.push(AttackSpec::with_kind(AttackKind::Fa, []));
    let mut ba = AttackSpec::with_kind(AttackKind::Ba, []);
    ba.ba_gaps_only = true;
    attacks.push(ba);
    attacks.push(AttackSpec::with_kind(AttackKind::Ava, []));
    let mut ma = AttackSpec::with_kind(AttackKind::Ma, []);
    ma.delay_m = 9.0;
    attacks.push(ma);

    println!("{:<14} {:<5} {:>8} {:>8} {:>8} {:>8}", "attack", "fleet", "I", "II", "III", "IV");
    for attack in &attacks {
        for fleet in [Powertrain::Ev, Powertrain::Ice] {
            let cells: Vec<String> = ScenarioId::ALL
                .iter()
                .map(|&id| {
                    let result = run(SimConfig::new(id, fleet, attack.clone())).unwrap();
                    match result.collision {
                        Some(c) => format!("{:.2}", c.time),
                        None => "-".to_string(),
                    }
                })
                .collect();
            println!(
                "{:<14} {:<5} {:>8} {:>8} {:>8} {:>8}",
                ringsim::config::attack_label(attack),
                format!("{fleet:?}"),
                cells[0],
                cells[1],
                cells[2],
                cells[3],
            );
        }
    }
}
