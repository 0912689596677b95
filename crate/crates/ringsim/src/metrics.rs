//! Phase-sliced stability metrics (average speed, time headway, speed
//! and spacing standard deviations) and the collision-based risk tiers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::attack::TIME_EPS;
use crate::scenario::{Phase, PhaseWindow, RunResult, ScenarioId};

/// Samples with follower speed at or below this floor are excluded from
/// time-headway averages; the ratio blows up near standstill.
pub const THW_SPEED_FLOOR: f64 = 0.1;

/// Aggregated metrics for one phase of one run. `None` values mirror a
/// phase truncated by a collision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseMetrics {
    pub phase: Phase,
    pub valid: bool,
    pub v_avg: Option<f64>,
    pub mean_vsd: Option<f64>,
    pub mean_ssd: Option<f64>,
    pub thw: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Risk {
    Low,
    Variable,
    High,
}

impl Risk {
    pub fn label(&self) -> &'static str {
        match self {
            Risk::Low => "Low",
            Risk::Variable => "Variable",
            Risk::High => "High",
        }
    }
}

/// Tick index range `[lo, hi)` covering a phase window.
fn tick_range(result: &RunResult, window: PhaseWindow) -> (usize, usize) {
    let dt = result.config.dt;
    let lo = ((window.start - TIME_EPS) / dt).ceil() as usize;
    let hi_f = (window.end - TIME_EPS) / dt;
    let hi = if window.closed_end {
        (hi_f + 2.0 * TIME_EPS).ceil() as usize + 1
    } else {
        hi_f.ceil() as usize
    };
    (lo, hi)
}

/// A phase is valid only if the trajectory fully covers it.
fn phase_slice(result: &RunResult, window: PhaseWindow) -> Option<(usize, usize)> {
    let (lo, hi) = tick_range(result, window);
    if hi <= lo || result.trajectory.len() < hi {
        return None;
    }
    Some((lo, hi))
}

fn population_sd(series: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = series.clone().count();
    if n == 0 {
        return 0.0;
    }
    let mean = series.clone().sum::<f64>() / n as f64;
    (series.map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64).sqrt()
}

/// Population standard deviation of vehicle `i`'s speed over the window.
pub fn vsd_per_vehicle(result: &RunResult, i: usize, window: PhaseWindow) -> Option<f64> {
    let (lo, hi) = phase_slice(result, window)?;
    Some(population_sd(
        result.trajectory[lo..hi].iter().map(move |r| r.speeds[i]),
    ))
}

/// Population standard deviation of vehicle `i`'s gap over the window.
pub fn ssd_per_vehicle(result: &RunResult, i: usize, window: PhaseWindow) -> Option<f64> {
    let (lo, hi) = phase_slice(result, window)?;
    Some(population_sd(
        result.trajectory[lo..hi].iter().map(move |r| r.gaps[i]),
    ))
}

/// Fleet mean of the per-vehicle speed standard deviations.
pub fn mean_vsd(result: &RunResult, window: PhaseWindow) -> Option<f64> {
    let n = result.config.n_vehicles;
    let sum: f64 = (0..n)
        .map(|i| vsd_per_vehicle(result, i, window))
        .collect::<Option<Vec<_>>>()?
        .iter()
        .sum();
    Some(sum / n as f64)
}

/// Fleet mean of the per-vehicle gap standard deviations.
pub fn mean_ssd(result: &RunResult, window: PhaseWindow) -> Option<f64> {
    let n = result.config.n_vehicles;
    let sum: f64 = (0..n)
        .map(|i| ssd_per_vehicle(result, i, window))
        .collect::<Option<Vec<_>>>()?
        .iter()
        .sum();
    Some(sum / n as f64)
}

/// Fleet mean of the per-vehicle temporal mean speeds.
pub fn v_avg(result: &RunResult, window: PhaseWindow) -> Option<f64> {
    let (lo, hi) = phase_slice(result, window)?;
    let n = result.config.n_vehicles;
    let ticks = (hi - lo) as f64;
    let sum: f64 = (0..n)
        .map(|i| {
            result.trajectory[lo..hi].iter().map(|r| r.speeds[i]).sum::<f64>() / ticks
        })
        .sum();
    Some(sum / n as f64)
}

/// Mean time headway (gap over follower speed) across all vehicles and
/// ticks in the window. Returns None when the phase is truncated or
/// every sample sits below the speed floor.
pub fn thw(result: &RunResult, window: PhaseWindow) -> Option<f64> {
    let (lo, hi) = phase_slice(result, window)?;
    let n = result.config.n_vehicles;
    let mut sum = 0.0;
    let mut count = 0usize;
    for rec in &result.trajectory[lo..hi] {
        for i in 0..n {
            if rec.speeds[i] > THW_SPEED_FLOOR {
                sum += rec.gaps[i] / rec.speeds[i];
                count += 1;
            }
        }
    }
    (count > 0).then(|| sum / count as f64)
}

/// All four metrics for one phase of a run.
pub fn phase_metrics(result: &RunResult, phase: Phase) -> PhaseMetrics {
    let window = result.config.phase(phase);
    let valid = phase_slice(result, window).is_some();
    if !valid {
        return PhaseMetrics {
            phase,
            valid,
            v_avg: None,
            mean_vsd: None,
            mean_ssd: None,
            thw: None,
        };
    }
    PhaseMetrics {
        phase,
        valid,
        v_avg: v_avg(result, window),
        mean_vsd: mean_vsd(result, window),
        mean_ssd: mean_ssd(result, window),
        thw: thw(result, window),
    }
}

/// Three-tier classification from per-scenario collision outcomes:
/// collisions everywhere is High, nowhere is Low, anything else
/// Variable.
pub fn classify_risk(outcomes: &BTreeMap<ScenarioId, bool>) -> Result<Risk, String> {
    for id in ScenarioId::ALL {
        if !outcomes.contains_key(&id) {
            return Err(format!("missing collision outcome for scenario {}", id.label()));
        }
    }
    let collisions = outcomes.values().filter(|&&c| c).count();
    Ok(match collisions {
        0 => Risk::Low,
        n if n == outcomes.len() => Risk::High,
        _ => Risk::Variable,
    })
}
