//! Fleet assembly, the three-phase simulation loop with attack
//! injection, collision detection and trajectory recording.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::attack::{controller_inputs, is_active, AttackKind, AttackSpec, WorldView};
use crate::error::ConfigError;
use crate::history::StateHistory;
use crate::idm::{idm_accel, AccelBounds, IdmParams};
use crate::state::{euler_step, predecessor, Powertrain, VehicleKind, VehicleState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ScenarioId {
    I,
    II,
    III,
    IV,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 4] = [ScenarioId::I, ScenarioId::II, ScenarioId::III, ScenarioId::IV];

    pub fn label(&self) -> &'static str {
        match self {
            ScenarioId::I => "I",
            ScenarioId::II => "II",
            ScenarioId::III => "III",
            ScenarioId::IV => "IV",
        }
    }
}

impl std::str::FromStr for ScenarioId {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_uppercase().as_str() {
            "I" | "1" => Ok(ScenarioId::I),
            "II" | "2" => Ok(ScenarioId::II),
            "III" | "3" => Ok(ScenarioId::III),
            "IV" | "4" => Ok(ScenarioId::IV),
            other => Err(ConfigError::Invalid(format!("unknown scenario '{other}'"))),
        }
    }
}

/// Which slots carry ACC controllers and which of those are attacked.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioDef {
    pub id: ScenarioId,
    pub acc_ids: BTreeSet<usize>,
    pub attacked_ids: BTreeSet<usize>,
}

impl ScenarioDef {
    /// The four built-in penetration/placement patterns.
    pub fn builtin(id: ScenarioId) -> ScenarioDef {
        let (acc, attacked): (&[usize], &[usize]) = match id {
            ScenarioId::I => (&[1, 6], &[1]),
            ScenarioId::II => (&[1, 3, 5, 7], &[1, 5]),
            ScenarioId::III => (&[1, 3, 5, 7, 9], &[1, 5, 9]),
            ScenarioId::IV => (&[1, 3, 5, 6, 7], &[1, 5, 6]),
        };
        ScenarioDef {
            id,
            acc_ids: acc.iter().copied().collect(),
            attacked_ids: attacked.iter().copied().collect(),
        }
    }

    pub fn validate(&self, n: usize) -> Result<(), ConfigError> {
        if !self.attacked_ids.is_subset(&self.acc_ids) {
            return Err(ConfigError::Invalid(format!(
                "attacked vehicles {:?} must be a subset of ACC vehicles {:?}",
                self.attacked_ids, self.acc_ids
            )));
        }
        if let Some(&bad) = self.acc_ids.iter().find(|&&i| i >= n) {
            return Err(ConfigError::Invalid(format!(
                "ACC vehicle id {bad} out of range 0..{n}"
            )));
        }
        Ok(())
    }
}

/// The per-type parameter table a run uses; presets by default,
/// individually overridable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamTable {
    pub ev_acc: IdmParams,
    pub ice_acc: IdmParams,
    pub hdv: IdmParams,
}

impl Default for ParamTable {
    fn default() -> Self {
        ParamTable {
            ev_acc: IdmParams::EV_ACC,
            ice_acc: IdmParams::ICE_ACC,
            hdv: IdmParams::HDV,
        }
    }
}

/// One phase window in seconds; half-open unless `closed_end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseWindow {
    pub start: f64,
    pub end: f64,
    pub closed_end: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    Pre,
    During,
    Post,
}

impl Phase {
    pub const ALL: [Phase; 3] = [Phase::Pre, Phase::During, Phase::Post];

    pub fn label(&self) -> &'static str {
        match self {
            Phase::Pre => "Pre",
            Phase::During => "During",
            Phase::Post => "Post",
        }
    }
}

/// Complete description of one deterministic run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub scenario: ScenarioDef,
    pub fleet_powertrain: Powertrain,
    pub n_vehicles: usize,
    pub ring_length: f64,
    pub vehicle_length: f64,
    pub dt: f64,
    pub duration: f64,
    /// Pre / during / post metric windows.
    pub phases: [PhaseWindow; 3],
    pub attack: AttackSpec,
    pub bounds: AccelBounds,
    pub params: ParamTable,
}

impl SimConfig {
    pub fn new(scenario: ScenarioId, fleet: Powertrain, attack: AttackSpec) -> SimConfig {
        SimConfig {
            scenario: ScenarioDef::builtin(scenario),
            fleet_powertrain: fleet,
            attack,
            ..SimConfig::default()
        }
    }

    pub fn phase(&self, phase: Phase) -> PhaseWindow {
        match phase {
            Phase::Pre => self.phases[0],
            Phase::During => self.phases[1],
            Phase::Post => self.phases[2],
        }
    }

    /// Initial bumper-to-bumper gap implied by uniform placement.
    pub fn initial_gap(&self) -> f64 {
        self.ring_length / self.n_vehicles as f64 - self.vehicle_length
    }

    pub fn n_ticks(&self) -> usize {
        (self.duration / self.dt + 0.5).floor() as usize
    }

    pub fn time_at(&self, tick: usize) -> f64 {
        // division keeps whole-second ticks exact at the default 30 Hz
        tick as f64 / (1.0 / self.dt)
    }

    pub fn params_for(&self, kind: VehicleKind, powertrain: Powertrain) -> &IdmParams {
        match kind {
            VehicleKind::Hdv => &self.params.hdv,
            VehicleKind::Acc => match powertrain {
                Powertrain::Ev => &self.params.ev_acc,
                Powertrain::Ice => &self.params.ice_acc,
            },
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_vehicles == 0 {
            return Err(ConfigError::Invalid("n_vehicles must be >= 1".into()));
        }
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // rejects NaN too
        if !(self.dt > 0.0) || !(self.duration > 0.0) {
            return Err(ConfigError::Invalid("dt and duration must be > 0".into()));
        }
        if self.initial_gap() <= 0.0 {
            return Err(ConfigError::Invalid(format!(
                "ring of {} m cannot hold {} vehicles of {} m with positive gaps",
                self.ring_length, self.n_vehicles, self.vehicle_length
            )));
        }
        self.scenario.validate(self.n_vehicles)?;
        for p in [&self.params.ev_acc, &self.params.ice_acc, &self.params.hdv] {
            p.validate()?;
        }
        if self.bounds.min >= self.bounds.max {
            return Err(ConfigError::Invalid("accel bounds: min must be < max".into()));
        }
        let a = &self.attack;
        if a.kind != AttackKind::None {
            if a.window.0 >= a.window.1 {
                return Err(ConfigError::Invalid("attack window: t_start must be < t_end".into()));
            }
            if a.delay_m < 0.0 {
                return Err(ConfigError::Invalid("delay_m must be >= 0".into()));
            }
            if matches!(a.kind, AttackKind::Dpda | AttackKind::Ma) && a.window.0 - a.delay_m < 0.0 {
                return Err(ConfigError::Invalid(format!(
                    "delayed lookup would reach before t=0: t_start {} < delay_m {}",
                    a.window.0, a.delay_m
                )));
            }
            #[allow(clippy::neg_cmp_op_on_partial_ord)] // rejects NaN too
            if !(a.spacing_cap_phi > 0.0) {
                return Err(ConfigError::Invalid("spacing_cap_phi must be > 0".into()));
            }
            if let Some(&bad) = a.targets.iter().find(|&&i| i >= self.n_vehicles) {
                return Err(ConfigError::Invalid(format!(
                    "attack target {bad} out of range 0..{}",
                    self.n_vehicles
                )));
            }
        }
        let [pre, during, post] = self.phases;
        if !(pre.end <= during.start && during.end <= post.start) {
            return Err(ConfigError::Invalid("phase windows must be disjoint and ordered".into()));
        }
        Ok(())
    }
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            scenario: ScenarioDef::builtin(ScenarioId::I),
            fleet_powertrain: Powertrain::Ev,
            n_vehicles: 10,
            ring_length: 300.0,
            vehicle_length: 5.0,
            dt: 1.0 / 30.0,
            duration: 120.0,
            phases: [
                PhaseWindow { start: 30.0, end: 60.0, closed_end: false },
                PhaseWindow { start: 60.0, end: 90.0, closed_end: false },
                PhaseWindow { start: 90.0, end: 120.0, closed_end: true },
            ],
            attack: AttackSpec::none(),
            bounds: AccelBounds::default(),
            params: ParamTable::default(),
        }
    }
}

/// Per-tick record of the whole fleet.
#[derive(Debug, Clone, PartialEq)]
pub struct TickRecord {
    pub tick: usize,
    pub positions: Vec<f64>,
    pub speeds: Vec<f64>,
    pub gaps: Vec<f64>,
    pub accels: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Collision {
    pub time: f64,
    pub tick: usize,
    pub follower: usize,
    pub leader: usize,
}

/// Everything a finished run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub config: SimConfig,
    pub trajectory: Vec<TickRecord>,
    pub collision: Option<Collision>,
}

impl RunResult {
    pub fn time_at(&self, tick: usize) -> f64 {
        self.config.time_at(tick)
    }

    pub fn collided(&self) -> bool {
        self.collision.is_some()
    }
}

/// First vehicle (lowest id) whose gap has closed to zero or below,
/// with its predecessor.
pub fn detect_collision(states: &[VehicleState]) -> Option<(usize, usize)> {
    let n = states.len();
    states
        .iter()
        .find(|s| s.gap <= 0.0)
        .map(|s| (s.id, predecessor(s.id, n)))
}

/// Initial fleet per the config: uniform stationary placement, ACC
/// slots carrying the fleet powertrain's parameters.
pub fn build_initial(config: &SimConfig) -> Result<Vec<VehicleState>, ConfigError> {
    config.validate()?;
    let n = config.n_vehicles;
    let slot = config.ring_length / n as f64;
    let gap = config.initial_gap();
    Ok((0..n)
        .map(|i| VehicleState {
            id: i,
            // vehicle 0 at arc 0, predecessors ahead in driving direction
            position: (((n - i) % n) as f64 * slot).rem_euclid(config.ring_length),
            speed: 0.0,
            gap,
            accel: 0.0,
            kind: if config.scenario.acc_ids.contains(&i) {
                VehicleKind::Acc
            } else {
                VehicleKind::Hdv
            },
            powertrain: config.fleet_powertrain,
        })
        .collect())
}

/// Resolve the attack spec against the scenario: an empty target set
/// binds to the scenario's attacked vehicles, and missing PA/MA source
/// entries are filled by `bind_sources`.
pub fn bind_attack(config: &mut SimConfig) {
    if config.attack.kind != AttackKind::None && config.attack.targets.is_empty() {
        config.attack.targets = config.scenario.attacked_ids.clone();
    }
    bind_sources(config);
}

/// Fill missing PA/MA source entries with each target's nearest
/// upstream ACC vehicle. The redirected payload is a V2V broadcast, so
/// it can only originate from another connected vehicle; conventional
/// vehicles transmit nothing. A target with no other ACC vehicle on the
/// ring sources itself, which degenerates to the uncorrupted pair.
/// Explicit `source_map` entries always win.
pub fn bind_sources(config: &mut SimConfig) {
    if !matches!(config.attack.kind, AttackKind::Pa | AttackKind::Ma) {
        return;
    }
    let n = config.n_vehicles;
    let acc = config.scenario.acc_ids.clone();
    for &i in &config.attack.targets.clone() {
        if config.attack.source_map.contains_key(&i) {
            continue;
        }
        let j = (1..n)
            .map(|back| (i + n - back) % n)
            .find(|cand| acc.contains(cand))
            .unwrap_or(i);
        config.attack.source_map.insert(i, j);
    }
}

/// A run in progress. `run()` drives it to completion; tests and
/// examples may instead seed custom states and step manually.
pub struct Simulation {
    config: SimConfig,
    states: Vec<VehicleState>,
    history: StateHistory,
    trajectory: Vec<TickRecord>,
    collision: Option<Collision>,
    tick: usize,
    recorded: bool,
}

impl Simulation {
    pub fn new(mut config: SimConfig) -> Result<Simulation, ConfigError> {
        bind_attack(&mut config);
        let states = build_initial(&config)?;
        Ok(Simulation::with_initial(config, states))
    }

    /// Start from explicit states (already consistent with the config's
    /// ring geometry).
    pub fn with_initial(config: SimConfig, states: Vec<VehicleState>) -> Simulation {
        let history = StateHistory::new(config.dt);
        Simulation {
            config,
            states,
            history,
            trajectory: Vec::new(),
            collision: None,
            tick: 0,
            recorded: false,
        }
    }

    pub fn states(&self) -> &[VehicleState] {
        &self.states
    }

    pub fn history(&self) -> &StateHistory {
        &self.history
    }

    pub fn tick(&self) -> usize {
        self.tick
    }

    pub fn time(&self) -> f64 {
        self.config.time_at(self.tick)
    }

    pub fn finished(&self) -> bool {
        self.collision.is_some() || self.tick >= self.config.n_ticks()
    }

    fn record_current(&mut self) {
        self.history.push(
            self.states.iter().map(|s| s.gap).collect(),
            self.states.iter().map(|s| s.speed).collect(),
        );
        self.trajectory.push(TickRecord {
            tick: self.tick,
            positions: self.states.iter().map(|s| s.position).collect(),
            speeds: self.states.iter().map(|s| s.speed).collect(),
            gaps: self.states.iter().map(|s| s.gap).collect(),
            accels: self.states.iter().map(|s| s.accel).collect(),
        });
        if let Some((follower, leader)) = detect_collision(&self.states) {
            self.collision = Some(Collision {
                time: self.time(),
                tick: self.tick,
                follower,
                leader,
            });
        }
        self.recorded = true;
    }

    /// Advance one tick: record the time-t snapshot, compute every
    /// controller from it, then apply the kinematic update.
    /// Returns false once the run has halted (collision or end of time).
    pub fn step(&mut self) -> bool {
        if !self.recorded {
            self.record_current();
        }
        if self.finished() {
            return false;
        }
        let t = self.time();
        let spec = self.config.attack.clone();

        let world = WorldView {
            states: &self.states,
            history: &self.history,
            vehicle_length: self.config.vehicle_length,
        };
        let accels: Vec<f64> = (0..self.states.len())
            .map(|i| {
                // FA pins the target's speed at its onset value: the
                // controller is cut out entirely, not just misinformed.
                if spec.kind == AttackKind::Fa && is_active(&spec, i, t) {
                    return 0.0;
                }
                let inputs = controller_inputs(&world, &spec, i, t)
                    .expect("history lookup failed: attack window reaches before t=0");
                let s = &self.states[i];
                let p = self.config.params_for(s.kind, s.powertrain);
                idm_accel(p, inputs.v_eff, inputs.s_eff, inputs.dv_eff, &self.config.bounds)
            })
            .collect();

        euler_step(&mut self.states, &accels, self.config.dt, self.config.ring_length);
        self.tick += 1;
        self.record_current();
        self.collision.is_none() && self.tick < self.config.n_ticks()
    }

    pub fn run_to_end(mut self) -> RunResult {
        while self.step() {}
        if !self.recorded {
            self.record_current();
        }
        RunResult {
            config: self.config,
            trajectory: self.trajectory,
            collision: self.collision,
        }
    }
}

/// Run one configuration to completion.
pub fn run(config: SimConfig) -> Result<RunResult, ConfigError> {
    Ok(Simulation::new(config)?.run_to_end())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::gap_sum;

    #[test]
    fn builtin_scenarios_match_the_penetration_table() {
        let s = ScenarioDef::builtin(ScenarioId::I);
        assert_eq!(s.acc_ids, [1, 6].into());
        assert_eq!(s.attacked_ids, [1].into());
        let s = ScenarioDef::builtin(ScenarioId::II);
        assert_eq!(s.acc_ids, [1, 3, 5, 7].into());
        assert_eq!(s.attacked_ids, [1, 5].into());
        let s = ScenarioDef::builtin(ScenarioId::III);
        assert_eq!(s.acc_ids, [1, 3, 5, 7, 9].into());
        assert_eq!(s.attacked_ids, [1, 5, 9].into());
        let s = ScenarioDef::builtin(ScenarioId::IV);
        assert_eq!(s.acc_ids, [1, 3, 5, 6, 7].into());
        assert_eq!(s.attacked_ids, [1, 5, 6].into());
        for id in ScenarioId::ALL {
            ScenarioDef::builtin(id).validate(10).unwrap();
        }
    }

    #[test]
    fn build_initial_default_layout() {
        let cfg = SimConfig::default();
        let states = build_initial(&cfg).unwrap();
        assert_eq!(states.len(), 10);
        for s in &states {
            assert_eq!(s.speed, 0.0);
            assert_eq!(s.gap, 25.0);
        }
        assert_eq!(states[1].kind, VehicleKind::Acc);
        assert_eq!(states[6].kind, VehicleKind::Acc);
        assert_eq!(states[0].kind, VehicleKind::Hdv);
        assert!((gap_sum(&states, cfg.vehicle_length) - 300.0).abs() < 1e-9);
    }

    #[test]
    fn build_initial_scenario_iii_acc_slots() {
        let cfg = SimConfig::new(ScenarioId::III, Powertrain::Ev, AttackSpec::none());
        let states = build_initial(&cfg).unwrap();
        for (i, state) in states.iter().enumerate() {
            let expect = [1, 3, 5, 7, 9].contains(&i);
            assert_eq!(state.kind == VehicleKind::Acc, expect, "vehicle {i}");
        }
    }

    #[test]
    fn build_initial_single_vehicle_ring() {
        let cfg = SimConfig {
            n_vehicles: 1,
            scenario: ScenarioDef {
                id: ScenarioId::I,
                acc_ids: BTreeSet::new(),
                attacked_ids: BTreeSet::new(),
            },
            ..SimConfig::default()
        };
        let states = build_initial(&cfg).unwrap();
        assert_eq!(states.len(), 1);
        assert_eq!(states[0].gap, 295.0);
    }

    #[test]
    fn detect_collision_reports_lowest_id_and_predecessor() {
        let cfg = SimConfig::default();
        let mut states = build_initial(&cfg).unwrap();
        assert_eq!(detect_collision(&states), None);
        states[5].gap = -0.01;
        assert_eq!(detect_collision(&states), Some((5, 4)));
        states[5].gap = 0.0;
        assert_eq!(detect_collision(&states), Some((5, 4)));
        states[3].gap = 0.0;
        assert_eq!(detect_collision(&states), Some((3, 2)));
        states[0].gap = -1.0;
        assert_eq!(detect_collision(&states), Some((0, 9)));
    }

    #[test]
    fn default_run_spans_full_duration() {
        let result = run(SimConfig::default()).unwrap();
        assert_eq!(result.trajectory.len(), 3601);
        assert!(result.collision.is_none());
        assert!((result.time_at(result.trajectory.last().unwrap().tick) - 120.0).abs() < 1e-9);
    }

    #[test]
    fn gap_sum_and_speed_invariants_hold_every_tick() {
        let cfg = SimConfig::new(ScenarioId::IV, Powertrain::Ice, AttackSpec::none());
        let result = run(cfg).unwrap();
        for rec in &result.trajectory {
            let total: f64 = rec.gaps.iter().sum::<f64>() + 10.0 * 5.0;
            assert!((total - 300.0).abs() < 1e-6, "tick {}", rec.tick);
            assert!(rec.speeds.iter().all(|&v| v >= 0.0));
            assert!(rec.accels.iter().all(|&a| (-10.0..=5.0).contains(&a)));
        }
    }

    #[test]
    fn future_attack_window_is_bit_identical_to_baseline() {
        let mut attack = AttackSpec::with_kind(AttackKind::Ba, [1]);
        attack.window = (500.0, 600.0);
        let attacked = run(SimConfig::new(ScenarioId::I, Powertrain::Ev, attack)).unwrap();
        let baseline = run(SimConfig::new(ScenarioId::I, Powertrain::Ev, AttackSpec::none())).unwrap();
        assert_eq!(attacked.trajectory, baseline.trajectory);
    }

    #[test]
    fn determinism_two_runs_bit_identical() {
        let cfg = SimConfig::new(ScenarioId::IV, Powertrain::Ev, AttackSpec::with_kind(AttackKind::Dpda, [1, 5, 6]));
        let a = run(cfg.clone()).unwrap();
        let b = run(cfg).unwrap();
        assert_eq!(a.trajectory, b.trajectory);
        assert_eq!(a.collision, b.collision);
    }

    #[test]
    fn prefix_property_truncation_equals_shorter_run() {
        let cfg = SimConfig::new(ScenarioId::II, Powertrain::Ice, AttackSpec::none());
        let full = run(cfg.clone()).unwrap();
        let short_cfg = SimConfig { duration: 45.0, ..cfg };
        let short = run(short_cfg).unwrap();
        assert_eq!(short.trajectory.len(), 45 * 30 + 1);
        assert_eq!(&full.trajectory[..short.trajectory.len()], &short.trajectory[..]);
    }

    #[test]
    fn collided_run_halts_at_collision_tick() {
        let mut attack = AttackSpec::with_kind(AttackKind::Ba, [1]);
        attack.ba_gaps_only = true;
        let result = run(SimConfig::new(ScenarioId::I, Powertrain::Ev, attack)).unwrap();
        let c = result.collision.expect("blinding run should collide");
        assert_eq!(result.trajectory.last().unwrap().tick, c.tick);
        assert!(result.trajectory.iter().all(|r| r.tick <= c.tick));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let cfg = SimConfig { n_vehicles: 0, ..SimConfig::default() };
        assert!(cfg.validate().is_err());
        let cfg = SimConfig { ring_length: 40.0, ..SimConfig::default() };
        assert!(cfg.validate().is_err());
        let mut attack = AttackSpec::with_kind(AttackKind::Dpda, [3]);
        attack.delay_m = -1.0;
        let cfg = SimConfig { attack, ..SimConfig::default() };
        assert!(cfg.validate().is_err());
        let mut cfg = SimConfig::default();
        cfg.scenario.attacked_ids.insert(2); // not an ACC slot
        assert!(cfg.validate().is_err());
    }
}
