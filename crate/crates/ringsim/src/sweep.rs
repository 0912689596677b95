//! Cartesian experiment execution with bounded parallelism. Results are
//! keyed and ordered by (scenario, fleet, attack label), independent of
//! the execution interleaving.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::attack::{AttackKind, AttackSpec};
use crate::config::{attack_label, SweepSpec};
use crate::scenario::{run, RunResult, ScenarioDef, ScenarioId, SimConfig};
use crate::state::Powertrain;

/// One grid point and its outcome. Failures are recorded, never fatal
/// to the sweep.
#[derive(Debug)]
pub struct SweepRun {
    pub scenario: ScenarioId,
    pub fleet: Powertrain,
    pub kind: AttackKind,
    pub label: String,
    pub config: SimConfig,
    pub outcome: Result<RunResult, String>,
}

#[derive(Debug)]
pub struct SweepOutput {
    pub runs: Vec<SweepRun>,
}

impl SweepOutput {
    pub fn find(&self, scenario: ScenarioId, fleet: Powertrain, label: &str) -> Option<&SweepRun> {
        self.runs
            .iter()
            .find(|r| r.scenario == scenario && r.fleet == fleet && r.label == label)
    }

    /// Did any run of this attack kind in this scenario collide?
    pub fn collided(&self, kind: AttackKind, scenario: ScenarioId) -> bool {
        self.runs.iter().any(|r| {
            r.kind == kind
                && r.scenario == scenario
                && matches!(&r.outcome, Ok(res) if res.collided())
        })
    }
}

/// Bind a template to one grid point; empty target sets take the
/// scenario's attacked vehicles.
fn instantiate(base: &SimConfig, scenario: ScenarioId, fleet: Powertrain, template: &AttackSpec) -> SimConfig {
    let def = ScenarioDef::builtin(scenario);
    let mut attack = template.clone();
    if attack.kind != AttackKind::None && attack.targets.is_empty() {
        attack.targets = def.attacked_ids.clone();
    }
    SimConfig {
        scenario: def,
        fleet_powertrain: fleet,
        attack,
        ..base.clone()
    }
}

/// Execute the grid with up to `parallelism` worker threads.
pub fn run_sweep(spec: &SweepSpec, parallelism: usize) -> SweepOutput {
    let mut jobs: Vec<(ScenarioId, Powertrain, AttackSpec)> = Vec::new();
    for &scenario in &spec.scenarios {
        for &fleet in &spec.fleets {
            for attack in &spec.attacks {
                jobs.push((scenario, fleet, attack.clone()));
            }
        }
    }

    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<SweepRun>>> = Mutex::new((0..jobs.len()).map(|_| None).collect());
    let workers = parallelism.max(1).min(jobs.len().max(1));

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= jobs.len() {
                    break;
                }
                let (scenario, fleet, template) = &jobs[idx];
                let config = instantiate(&spec.base, *scenario, *fleet, template);
                let outcome = run(config.clone()).map_err(|e| e.to_string());
                let done = SweepRun {
                    scenario: *scenario,
                    fleet: *fleet,
                    kind: template.kind,
                    label: attack_label(template),
                    config,
                    outcome,
                };
                slots.lock().unwrap()[idx] = Some(done);
            });
        }
    });

    let runs = slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every sweep slot is filled"))
        .collect();
    SweepOutput { runs }
}
