//! The six communication-based attack injectors. Each one maps the true
//! world state (plus its history) to the possibly corrupted inputs fed
//! to a targeted vehicle's ACC controller. Vehicles outside the target
//! set or the active window always see the uncorrupted inputs.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::HistoryError;
use crate::history::StateHistory;
use crate::state::{predecessor, VehicleState};

/// Slack for tick-time comparisons; tick times are n/30 and accumulate
/// a few ulps of error against whole-second window edges.
pub const TIME_EPS: f64 = 1e-9;

/// Floor applied to a corrupted perceived spacing before it reaches the
/// controller, which divides by it.
pub const SPACING_FLOOR: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AttackKind {
    None,
    Dpda,
    Pa,
    Fa,
    Ba,
    Ava,
    Ma,
}

impl AttackKind {
    pub const ALL_ATTACKS: [AttackKind; 6] = [
        AttackKind::Dpda,
        AttackKind::Pa,
        AttackKind::Fa,
        AttackKind::Ba,
        AttackKind::Ava,
        AttackKind::Ma,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            AttackKind::None => "None",
            AttackKind::Dpda => "DPDA",
            AttackKind::Pa => "PA",
            AttackKind::Fa => "FA",
            AttackKind::Ba => "BA",
            AttackKind::Ava => "AVA",
            AttackKind::Ma => "MA",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrigFn {
    Sin,
    Cos,
}

/// Attack kind plus its kind-specific parameters, target set and active
/// time window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackSpec {
    pub kind: AttackKind,
    pub targets: BTreeSet<usize>,
    /// Active window `[t_start, t_end)` in seconds.
    pub window: (f64, f64),
    /// Delay in seconds (DPDA, MA).
    pub delay_m: f64,
    /// Number of ignored predecessors (BA).
    pub blinded_p: usize,
    /// Cap on the perceived spacing, m (BA).
    pub spacing_cap_phi: f64,
    /// Interference coefficient (AVA).
    pub gain_k: f64,
    /// Angle rate, rad/s (AVA).
    pub angle_rate_omega: f64,
    /// Trigonometric form of the AVA gain.
    pub trig: TrigFn,
    /// Per-target source vehicle j (PA, MA). The scenario engine binds
    /// targets absent from the map to the nearest broadcasting (ACC)
    /// vehicle ahead; only connected vehicles transmit V2V data. As a
    /// raw fallback `source()` returns the immediate predecessor.
    pub source_map: BTreeMap<usize, usize>,
    /// Reproduce the gaps-only perceived-spacing arithmetic instead of
    /// adding the blinded vehicles' lengths.
    pub ba_gaps_only: bool,
}

impl Default for AttackSpec {
    fn default() -> Self {
        AttackSpec {
            kind: AttackKind::None,
            targets: BTreeSet::new(),
            window: (60.0, 90.0),
            delay_m: 6.0,
            blinded_p: 2,
            spacing_cap_phi: 50.0,
            gain_k: 0.002,
            angle_rate_omega: 1.0,
            trig: TrigFn::Sin,
            source_map: BTreeMap::new(),
            ba_gaps_only: false,
        }
    }
}

impl AttackSpec {
    pub fn none() -> Self {
        AttackSpec::default()
    }

    pub fn with_kind(kind: AttackKind, targets: impl IntoIterator<Item = usize>) -> Self {
        AttackSpec {
            kind,
            targets: targets.into_iter().collect(),
            ..AttackSpec::default()
        }
    }

    /// Source vehicle j for target i (PA/MA).
    pub fn source(&self, i: usize, n: usize) -> usize {
        self.source_map.get(&i).copied().unwrap_or(predecessor(i, n))
    }
}

/// The three arguments handed to the car-following law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerInputs {
    pub v_eff: f64,
    pub s_eff: f64,
    pub dv_eff: f64,
}

/// Read-only view of the world an injector may consult.
#[derive(Debug, Clone, Copy)]
pub struct WorldView<'a> {
    pub states: &'a [VehicleState],
    pub history: &'a StateHistory,
    pub vehicle_length: f64,
}

impl<'a> WorldView<'a> {
    pub fn n(&self) -> usize {
        self.states.len()
    }
}

/// Attack indicator: true iff `vehicle` is targeted and t is inside the
/// half-open active window.
pub fn is_active(spec: &AttackSpec, vehicle: usize, t: f64) -> bool {
    spec.kind != AttackKind::None
        && spec.targets.contains(&vehicle)
        && t >= spec.window.0 - TIME_EPS
        && t < spec.window.1 - TIME_EPS
}

/// Floor a time value to whole seconds, tolerant of tick-time roundoff.
fn floor_whole_second(t: f64) -> f64 {
    (t + TIME_EPS).floor()
}

/// True inputs for vehicle `i`: own speed, own gap, relative speed to
/// the immediate predecessor.
pub fn uncorrupted_inputs(world: &WorldView, i: usize) -> ControllerInputs {
    let n = world.n();
    ControllerInputs {
        v_eff: world.states[i].speed,
        s_eff: world.states[i].gap,
        dv_eff: world.states[predecessor(i, n)].speed - world.states[i].speed,
    }
}

fn floor_spacing(inputs: ControllerInputs) -> ControllerInputs {
    ControllerInputs {
        s_eff: if inputs.s_eff <= 0.0 { SPACING_FLOOR } else { inputs.s_eff },
        ..inputs
    }
}

/// Delayed own inputs: the position-derived gap comes from the snapshot
/// at whole-second time floor(t - m) (live when m = 0). Own speed and the radar-measured
/// relative speed to the immediate predecessor stay live: the delay
/// corrupts the communicated position channel, not onboard sensing.
pub fn dpda_inputs(
    world: &WorldView,
    spec: &AttackSpec,
    i: usize,
    t: f64,
) -> Result<ControllerInputs, HistoryError> {
    if spec.delay_m <= 0.0 {
        return Ok(floor_spacing(uncorrupted_inputs(world, i)));
    }
    let t_hist = floor_whole_second(t - spec.delay_m);
    if t_hist < 0.0 {
        return Err(HistoryError::OutOfRange { t: t_hist, max: t });
    }
    let snap = world.history.lookup(t_hist)?;
    Ok(floor_spacing(ControllerInputs {
        s_eff: snap.gaps[i],
        ..uncorrupted_inputs(world, i)
    }))
}

/// Wrong-source inputs: vehicle `i` consumes the position-derived gap
/// belonging to vehicle j while its own radar still reports the true
/// relative speed to the immediate predecessor.
pub fn pa_inputs(world: &WorldView, spec: &AttackSpec, i: usize, _t: f64) -> ControllerInputs {
    let n = world.n();
    let j = spec.source(i, n);
    floor_spacing(ControllerInputs {
        s_eff: world.states[j].gap,
        ..uncorrupted_inputs(world, i)
    })
}

/// Capped cumulative distance from `i` past `blinded_p` ignored
/// predecessors, always in (0, phi].
pub fn ba_perceived_spacing(world: &WorldView, spec: &AttackSpec, i: usize) -> f64 {
    let n = world.n();
    let mut raw: f64 = (0..=spec.blinded_p)
        .map(|z| world.states[(i + n - z % n) % n].gap)
        .sum();
    if !spec.ba_gaps_only {
        raw += spec.blinded_p as f64 * world.vehicle_length;
    }
    raw.min(spec.spacing_cap_phi).max(SPACING_FLOOR)
}

/// Blinded inputs: perceived spacing skips `blinded_p` vehicles and the
/// relative speed is taken against the distant vehicle j.
pub fn ba_inputs(world: &WorldView, spec: &AttackSpec, i: usize, _t: f64) -> ControllerInputs {
    let n = world.n();
    let j = (i + n - (spec.blinded_p + 1) % n) % n;
    ControllerInputs {
        v_eff: world.states[i].speed,
        s_eff: ba_perceived_spacing(world, spec, i),
        dv_eff: world.states[j].speed - world.states[i].speed,
    }
}

/// Angular-velocity inputs: the v argument is scaled by
/// 1 + k·trig(omega·(t - t_start)); gap and relative speed stay live.
pub fn ava_inputs(world: &WorldView, spec: &AttackSpec, i: usize, t: f64) -> ControllerInputs {
    let angle = spec.angle_rate_omega * (t - spec.window.0);
    let g = 1.0
        + spec.gain_k
            * match spec.trig {
                TrigFn::Sin => angle.sin(),
                TrigFn::Cos => angle.cos(),
            };
    let live = uncorrupted_inputs(world, i);
    ControllerInputs {
        v_eff: live.v_eff * g,
        ..live
    }
}

/// Mixed inputs: vehicle j's position-derived gap, read from the
/// snapshot at whole-second time floor(t - m) (live when m = 0); own
/// speed and the radar-measured relative speed stay live. With j = i this reduces to
/// the pure delay attack, and with m = 0 to the pure wrong-source
/// attack.
pub fn ma_inputs(
    world: &WorldView,
    spec: &AttackSpec,
    i: usize,
    t: f64,
) -> Result<ControllerInputs, HistoryError> {
    if spec.delay_m <= 0.0 {
        return Ok(pa_inputs(world, spec, i, t));
    }
    let t_hist = floor_whole_second(t - spec.delay_m);
    if t_hist < 0.0 {
        return Err(HistoryError::OutOfRange { t: t_hist, max: t });
    }
    let snap = world.history.lookup(t_hist)?;
    let n = world.n();
    let j = spec.source(i, n);
    Ok(floor_spacing(ControllerInputs {
        s_eff: snap.gaps[j],
        ..uncorrupted_inputs(world, i)
    }))
}

/// Inputs for vehicle `i` at time `t`, corrupted iff the attack is
/// active for it. FA is absent here on purpose: it overrides the
/// target's actuation (speed held at its onset value by the scenario
/// engine) rather than the perception channel, so its controller
/// inputs are never consulted.
pub fn controller_inputs(
    world: &WorldView,
    spec: &AttackSpec,
    i: usize,
    t: f64,
) -> Result<ControllerInputs, HistoryError> {
    if !is_active(spec, i, t) {
        return Ok(uncorrupted_inputs(world, i));
    }
    match spec.kind {
        AttackKind::None | AttackKind::Fa => Ok(uncorrupted_inputs(world, i)),
        AttackKind::Dpda => dpda_inputs(world, spec, i, t),
        AttackKind::Pa => Ok(pa_inputs(world, spec, i, t)),
        AttackKind::Ba => Ok(ba_inputs(world, spec, i, t)),
        AttackKind::Ava => Ok(ava_inputs(world, spec, i, t)),
        AttackKind::Ma => ma_inputs(world, spec, i, t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{Powertrain, VehicleKind};

    fn world_states(gaps: &[f64], speeds: &[f64]) -> Vec<VehicleState> {
        gaps.iter()
            .zip(speeds)
            .enumerate()
            .map(|(i, (&gap, &speed))| VehicleState {
                id: i,
                position: 0.0,
                speed,
                gap,
                accel: 0.0,
                kind: VehicleKind::Acc,
                powertrain: Powertrain::Ev,
            })
            .collect()
    }

    /// History where the gap of vehicle i at time t is `base_gap + t`
    /// and its speed is `i + t`, so snapshots are easy to identify.
    fn synthetic_history(n: usize, seconds: usize) -> StateHistory {
        let dt = 1.0 / 30.0;
        let mut h = StateHistory::new(dt);
        for tick in 0..=(seconds * 30) {
            let t = tick as f64 / 30.0;
            h.push(
                (0..n).map(|i| 25.0 + i as f64 + t).collect(),
                (0..n).map(|i| i as f64 + t).collect(),
            );
        }
        h
    }

    fn spec(kind: AttackKind, targets: &[usize]) -> AttackSpec {
        AttackSpec::with_kind(kind, targets.iter().copied())
    }

    #[test]
    fn active_window_is_half_open() {
        let s = spec(AttackKind::Dpda, &[5]);
        assert!(is_active(&s, 5, 60.0));
        assert!(is_active(&s, 5, 89.999));
        assert!(!is_active(&s, 5, 90.0));
        assert!(!is_active(&s, 5, 59.999));
        assert!(!is_active(&s, 4, 75.0));
    }

    #[test]
    fn active_tolerates_tick_roundoff() {
        let s = spec(AttackKind::Dpda, &[5]);
        let t_onset = 1800.0 / 30.0;
        assert!(is_active(&s, 5, t_onset));
        assert!(is_active(&s, 5, 60.0 - 1e-13));
        assert!(!is_active(&s, 5, 90.0 - 1e-13));
    }

    #[test]
    fn dpda_floors_lookup_time_to_whole_seconds() {
        let n = 4;
        let history = synthetic_history(n, 70);
        let states = world_states(&[1.0; 4], &[9.0, 11.0, 9.0, 9.0]);
        let world = WorldView {
            states: &states,
            history: &history,
            vehicle_length: 5.0,
        };
        let mut s = spec(AttackKind::Dpda, &[2]);
        s.delay_m = 6.0;
        // floor(62.5 - 6) = 56: gap snapshot value is 25 + i + 56
        let inputs = dpda_inputs(&world, &s, 2, 62.5).unwrap();
        assert_eq!(inputs.s_eff, 25.0 + 2.0 + 56.0);
        assert_eq!(inputs.dv_eff, 2.0); // live radar: 11 - 9
        assert_eq!(inputs.v_eff, 9.0); // own speed stays live

        s.delay_m = 9.0;
        let inputs = dpda_inputs(&world, &s, 2, 60.0).unwrap();
        assert_eq!(inputs.s_eff, 25.0 + 2.0 + 51.0);
    }

    #[test]
    fn dpda_zero_delay_at_whole_second_is_live() {
        let n = 4;
        let history = synthetic_history(n, 70);
        let gaps: Vec<f64> = (0..n).map(|i| 25.0 + i as f64 + 62.0).collect();
        let speeds: Vec<f64> = (0..n).map(|i| i as f64 + 62.0).collect();
        let states = world_states(&gaps, &speeds);
        let world = WorldView {
            states: &states,
            history: &history,
            vehicle_length: 5.0,
        };
        let mut s = spec(AttackKind::Dpda, &[2]);
        s.delay_m = 0.0;
        let inputs = dpda_inputs(&world, &s, 2, 62.0).unwrap();
        assert_eq!(inputs, uncorrupted_inputs(&world, 2));
    }

    #[test]
    fn dpda_rejects_negative_history_time() {
        let history = synthetic_history(2, 5);
        let states = world_states(&[25.0, 25.0], &[0.0, 0.0]);
        let world = WorldView {
            states: &states,
            history: &history,
            vehicle_length: 5.0,
        };
        let mut s = spec(AttackKind::Dpda, &[0]);
        s.delay_m = 6.0;
        assert!(dpda_inputs(&world, &s, 0, 2.0).is_err());
    }

    #[test]
    fn pa_reads_source_vehicle_pair() {
        let states = world_states(&[20.0, 21.0, 22.0, 23.0], &[1.0, 2.0, 3.0, 4.0]);
        let history = synthetic_history(4, 1);
        let world = WorldView {
            states: &states,
            history: &history,
            vehicle_length: 5.0,
        };
        let s = spec(AttackKind::Pa, &[3]);
        // default source for 3 is its predecessor 2
        let inputs = pa_inputs(&world, &s, 3, 70.0);
        assert_eq!(inputs.s_eff, 22.0);
        assert_eq!(inputs.dv_eff, 2.0 - 3.0);
        assert_eq!(inputs.v_eff, 4.0);
    }

    #[test]
    fn pa_self_source_is_identity() {
        let states = world_states(&[20.0, 21.0, 22.0, 23.0], &[1.0, 2.0, 3.0, 4.0]);
        let history = synthetic_history(4, 1);
        let world = WorldView {
            states: &states,
            history: &history,
            vehicle_length: 5.0,
        };
        let mut s = spec(AttackKind::Pa, &[3]);
        s.source_map.insert(3, 3);
        assert_eq!(pa_inputs(&world, &s, 3, 70.0), uncorrupted_inputs(&world, 3));
    }

    #[test]
    fn fa_substitutes_only_the_speed_argument() {
        let states = world_states(&[20.0, 21.0], &[10.0, 10.0]);
        let history = synthetic_history(2, 1);
        let world = WorldView {
            states: &states,
            history: &history,
            vehicle_length: 5.0,
        };
        let s = spec(AttackKind::Fa, &[1]);
        // FA corrupts actuation, not perception: the dispatcher hands the
        // controller the live inputs even while the attack is active
        let inputs = controller_inputs(&world, &s, 1, 75.0).unwrap();
        assert_eq!(inputs, uncorrupted_inputs(&world, 1));
    }

    #[test]
    fn ba_worked_example_caps_at_phi() {
        // p=2, i=1 on a 10-ring with all gaps 25: s_1 + s_0 + s_9 = 75 >= 50
        let states = world_states(&[25.0; 10], &[0.0; 10]);
        let history = synthetic_history(10, 1);
        let world = WorldView {
            states: &states,
            history: &history,
            vehicle_length: 5.0,
        };
        let mut s = spec(AttackKind::Ba, &[1]);
        s.ba_gaps_only = true;
        assert_eq!(ba_perceived_spacing(&world, &s, 1), 50.0);
    }

    #[test]
    fn ba_below_cap_includes_vehicle_lengths() {
        // gaps around i=2 are (5, 4, 3): sum 12, plus 2 vehicle lengths
        let mut gaps = vec![25.0; 10];
        gaps[2] = 5.0;
        gaps[1] = 4.0;
        gaps[0] = 3.0;
        let states = world_states(&gaps, &[0.0; 10]);
        let history = synthetic_history(10, 1);
        let world = WorldView {
            states: &states,
            history: &history,
            vehicle_length: 5.0,
        };
        let mut s = spec(AttackKind::Ba, &[2]);
        assert_eq!(ba_perceived_spacing(&world, &s, 2), 22.0);
        s.ba_gaps_only = true;
        assert_eq!(ba_perceived_spacing(&world, &s, 2), 12.0);
    }

    #[test]
    fn ba_zero_blinded_reduces_to_true_gap() {
        let states = world_states(&[25.0; 10], &[3.0; 10]);
        let history = synthetic_history(10, 1);
        let world = WorldView {
            states: &states,
            history: &history,
            vehicle_length: 5.0,
        };
        let mut s = spec(AttackKind::Ba, &[4]);
        s.blinded_p = 0;
        s.spacing_cap_phi = 1e6;
        assert_eq!(ba_inputs(&world, &s, 4, 70.0), uncorrupted_inputs(&world, 4));
    }

    #[test]
    fn ba_relative_speed_uses_distant_vehicle() {
        let speeds: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let states = world_states(&[25.0; 10], &speeds);
        let history = synthetic_history(10, 1);
        let world = WorldView {
            states: &states,
            history: &history,
            vehicle_length: 5.0,
        };
        let s = spec(AttackKind::Ba, &[1]);
        // p=2: j = (1 - 3) mod 10 = 8
        let inputs = ba_inputs(&world, &s, 1, 70.0);
        assert_eq!(inputs.dv_eff, 8.0 - 1.0);
    }

    #[test]
    fn ava_identity_cases() {
        let states = world_states(&[25.0; 4], &[12.0; 4]);
        let history = synthetic_history(4, 1);
        let world = WorldView {
            states: &states,
            history: &history,
            vehicle_length: 5.0,
        };
        let mut s = spec(AttackKind::Ava, &[0]);
        s.gain_k = 0.0;
        assert_eq!(ava_inputs(&world, &s, 0, 73.4), uncorrupted_inputs(&world, 0));
        s.gain_k = 0.002;
        // sin(0) = 0 at attack onset
        assert_eq!(ava_inputs(&world, &s, 0, 60.0), uncorrupted_inputs(&world, 0));
        let later = ava_inputs(&world, &s, 0, 61.0);
        assert!((later.v_eff - 12.0 * (1.0 + 0.002 * 1.0_f64.sin())).abs() < 1e-15);
    }

    #[test]
    fn ma_reduces_to_dpda_with_self_source() {
        let history = synthetic_history(4, 70);
        let states = world_states(&[25.0; 4], &[7.0; 4]);
        let world = WorldView {
            states: &states,
            history: &history,
            vehicle_length: 5.0,
        };
        let mut s = spec(AttackKind::Ma, &[2]);
        s.delay_m = 6.0;
        s.source_map.insert(2, 2);
        let ma = ma_inputs(&world, &s, 2, 64.7).unwrap();
        let dpda = dpda_inputs(&world, &s, 2, 64.7).unwrap();
        assert_eq!(ma, dpda);
    }

    #[test]
    fn ma_reduces_to_pa_with_zero_delay_at_whole_second() {
        let n = 4;
        let history = synthetic_history(n, 70);
        // live state must match the snapshot at t=65 for the reduction
        let gaps: Vec<f64> = (0..n).map(|i| 25.0 + i as f64 + 65.0).collect();
        let speeds: Vec<f64> = (0..n).map(|i| i as f64 + 65.0).collect();
        let states = world_states(&gaps, &speeds);
        let world = WorldView {
            states: &states,
            history: &history,
            vehicle_length: 5.0,
        };
        let mut s = spec(AttackKind::Ma, &[2]);
        s.delay_m = 0.0;
        let ma = ma_inputs(&world, &s, 2, 65.0).unwrap();
        let pa = pa_inputs(&world, &s, 2, 65.0);
        assert_eq!(ma, pa);
    }

    #[test]
    fn inactive_paths_are_bit_identical_to_uncorrupted() {
        let history = synthetic_history(10, 70);
        let states = world_states(&[25.0; 10], &[13.0; 10]);
        let world = WorldView {
            states: &states,
            history: &history,
            vehicle_length: 5.0,
        };
        for kind in AttackKind::ALL_ATTACKS {
            let s = spec(kind, &[5]);
            // outside the window
            let inputs = controller_inputs(&world, &s, 5, 30.0).unwrap();
            assert_eq!(inputs, uncorrupted_inputs(&world, 5));
            // not a target
            let inputs = controller_inputs(&world, &s, 4, 75.0).unwrap();
            assert_eq!(inputs, uncorrupted_inputs(&world, 4));
        }
    }

    #[test]
    fn corrupted_nonpositive_spacing_is_floored() {
        let mut gaps = vec![25.0; 10];
        gaps[3] = -2.0; // PA source gap is negative
        let states = world_states(&gaps, &[10.0; 10]);
        let history = synthetic_history(10, 1);
        let world = WorldView {
            states: &states,
            history: &history,
            vehicle_length: 5.0,
        };
        let s = spec(AttackKind::Pa, &[4]);
        let inputs = pa_inputs(&world, &s, 4, 70.0);
        assert_eq!(inputs.s_eff, SPACING_FLOOR);
    }
}
