//! Plain-text report assembly: baseline table, attack comparison,
//! collision matrix and risk classification.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::attack::AttackKind;
use crate::metrics::{classify_risk, phase_metrics, Risk};
use crate::scenario::{Phase, RunResult, ScenarioId};
use crate::state::Powertrain;
use crate::sweep::{SweepOutput, SweepRun};

fn cell(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:>7.2}"),
        None => format!("{:>7}", "---"),
    }
}

fn metric_row(result: &RunResult, metric: &str) -> [Option<f64>; 3] {
    let mut row = [None; 3];
    for (k, phase) in Phase::ALL.iter().enumerate() {
        let m = phase_metrics(result, *phase);
        row[k] = match metric {
            "V_avg" => m.v_avg,
            "VSD" => m.mean_vsd,
            "SSD" => m.mean_ssd,
            "THW" => m.thw,
            _ => unreachable!(),
        };
    }
    row
}

const METRICS: [&str; 4] = ["V_avg", "VSD", "SSD", "THW"];

fn both_fleet_rows(out: &mut String, ev: Option<&SweepRun>, ice: Option<&SweepRun>) {
    for metric in METRICS {
        let ev_row = ev
            .and_then(|r| r.outcome.as_ref().ok())
            .map(|res| metric_row(res, metric))
            .unwrap_or([None; 3]);
        let ice_row = ice
            .and_then(|r| r.outcome.as_ref().ok())
            .map(|res| metric_row(res, metric))
            .unwrap_or([None; 3]);
        let _ = writeln!(
            out,
            "  {metric:<6} {} {} {} | {} {} {}",
            cell(ev_row[0]),
            cell(ev_row[1]),
            cell(ev_row[2]),
            cell(ice_row[0]),
            cell(ice_row[1]),
            cell(ice_row[2]),
        );
    }
}

fn section_baseline(out: &mut String, sweep: &SweepOutput) {
    let _ = writeln!(out, "== Baseline performance (no attack) ==");
    let _ = writeln!(
        out,
        "Units: V_avg (m/s), VSD (m/s), SSD (m), THW (s); columns: EV Pre/During/Post | ICE Pre/During/Post\n"
    );
    for scenario in ScenarioId::ALL {
        let ev = sweep.find(scenario, Powertrain::Ev, "baseline");
        let ice = sweep.find(scenario, Powertrain::Ice, "baseline");
        if ev.is_none() && ice.is_none() {
            continue;
        }
        let _ = writeln!(out, "Scenario {}", scenario.label());
        both_fleet_rows(out, ev, ice);
    }
    out.push('\n');
}

/// The representative scenario each attack's comparison row uses.
fn representative_scenario(kind: AttackKind) -> ScenarioId {
    match kind {
        AttackKind::Ba => ScenarioId::I,
        _ => ScenarioId::IV,
    }
}

fn section_attacks(out: &mut String, sweep: &SweepOutput) {
    let _ = writeln!(out, "== Performance under attack ==");
    let _ = writeln!(
        out,
        "'---' marks phases invalidated by a collision; columns as in the baseline table\n"
    );
    for kind in AttackKind::ALL_ATTACKS {
        let scenario = representative_scenario(kind);
        let ev = sweep
            .runs
            .iter()
            .find(|r| r.kind == kind && r.scenario == scenario && r.fleet == Powertrain::Ev);
        let ice = sweep
            .runs
            .iter()
            .find(|r| r.kind == kind && r.scenario == scenario && r.fleet == Powertrain::Ice);
        if ev.is_none() && ice.is_none() {
            continue;
        }
        let label = ev.or(ice).map(|r| r.label.as_str()).unwrap_or("");
        let _ = writeln!(out, "{} (scenario {}, {label})", kind.label(), scenario.label());
        both_fleet_rows(out, ev, ice);
        for run in [ev, ice].into_iter().flatten() {
            if let Ok(res) = &run.outcome {
                if let Some(c) = res.collision {
                    let _ = writeln!(
                        out,
                        "  collision ({}): t={:.2} s, vehicle {} into {}",
                        match run.fleet {
                            Powertrain::Ev => "EV",
                            Powertrain::Ice => "ICE",
                        },
                        c.time,
                        c.follower,
                        c.leader
                    );
                }
            }
        }
    }
    out.push('\n');
}

fn section_collision_matrix(out: &mut String, sweep: &SweepOutput) {
    let mut delays: BTreeMap<String, BTreeMap<ScenarioId, bool>> = BTreeMap::new();
    for run in &sweep.runs {
        if run.kind != AttackKind::Dpda {
            continue;
        }
        let collided = matches!(&run.outcome, Ok(res) if res.collided());
        let entry = delays.entry(run.label.clone()).or_default();
        *entry.entry(run.scenario).or_insert(false) |= collided;
    }
    if delays.is_empty() {
        return;
    }
    let _ = writeln!(out, "== Collision status under DPDA ==\n");
    let _ = writeln!(out, "{:<12} {:>5} {:>5} {:>5} {:>5}", "Delay", "I", "II", "III", "IV");
    for (label, by_scenario) in &delays {
        let mut line = format!("{label:<12}");
        for scenario in ScenarioId::ALL {
            let text = match by_scenario.get(&scenario) {
                Some(true) => "Yes",
                Some(false) => "No",
                None => "-",
            };
            let _ = write!(line, " {text:>5}");
        }
        let _ = writeln!(out, "{line}");
    }
    out.push('\n');
}

fn section_classification(out: &mut String, sweep: &SweepOutput) {
    let mut tiers: BTreeMap<Risk, Vec<&'static str>> = BTreeMap::new();
    for kind in AttackKind::ALL_ATTACKS {
        if !sweep.runs.iter().any(|r| r.kind == kind) {
            continue;
        }
        let outcomes: BTreeMap<ScenarioId, bool> = ScenarioId::ALL
            .iter()
            .filter(|&&s| sweep.runs.iter().any(|r| r.kind == kind && r.scenario == s))
            .map(|&s| (s, sweep.collided(kind, s)))
            .collect();
        match classify_risk(&outcomes) {
            Ok(risk) => tiers.entry(risk).or_default().push(kind.label()),
            Err(why) => {
                let _ = writeln!(out, "classification skipped for {}: {why}", kind.label());
            }
        }
    }
    if tiers.is_empty() {
        return;
    }
    let _ = writeln!(out, "== Risk-based classification ==\n");
    for (risk, kinds) in &tiers {
        let _ = writeln!(out, "{:<10} {}", format!("{}:", risk.label()), kinds.join(", "));
    }
    out.push('\n');
}

/// The full four-section report over a completed sweep.
pub fn emit_report(sweep: &SweepOutput) -> String {
    let mut out = String::new();
    section_baseline(&mut out, sweep);
    section_attacks(&mut out, sweep);
    section_collision_matrix(&mut out, sweep);
    section_classification(&mut out, sweep);
    for run in &sweep.runs {
        if let Err(e) = &run.outcome {
            let _ = writeln!(
                out,
                "FAILED run: scenario {} {} {}: {e}",
                run.scenario.label(),
                match run.fleet {
                    Powertrain::Ev => "EV",
                    Powertrain::Ice => "ICE",
                },
                run.label
            );
        }
    }
    out
}
