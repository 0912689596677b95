//! Per-vehicle kinematic state and the fixed-step ring integrator.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VehicleKind {
    Hdv,
    Acc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Powertrain {
    Ev,
    Ice,
}

/// Kinematic state of one vehicle on the ring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleState {
    pub id: usize,
    /// Arc position along the ring, m, in [0, L).
    pub position: f64,
    /// Speed, m/s, kept >= 0.
    pub speed: f64,
    /// Bumper-to-bumper gap to the predecessor, m.
    pub gap: f64,
    /// Last applied acceleration, m/s².
    pub accel: f64,
    pub kind: VehicleKind,
    /// Meaningful only for ACC vehicles.
    pub powertrain: Powertrain,
}

/// Index of the vehicle immediately ahead of `i` on an N-ring.
/// Vehicle 0 follows vehicle N-1.
pub fn predecessor(i: usize, n: usize) -> usize {
    (i + n - 1) % n
}

/// One explicit Euler step over the whole ring, Jacobi order: every
/// update reads the time-t snapshot.
///
/// Gaps may come out negative; collision detection is a separate pass.
pub fn euler_step(states: &mut [VehicleState], accels: &[f64], dt: f64, ring_length: f64) {
    let n = states.len();
    assert_eq!(accels.len(), n);
    let old: Vec<(f64, f64)> = states.iter().map(|s| (s.speed, s.gap)).collect();
    for k in 0..n {
        let (v_k, gap_k) = old[k];
        let v_pred = old[predecessor(k, n)].0;
        let s = &mut states[k];
        s.gap = gap_k + (v_pred - v_k) * dt;
        s.speed = (v_k + accels[k] * dt).max(0.0);
        s.position = (s.position + v_k * dt).rem_euclid(ring_length);
        s.accel = accels[k];
    }
}

/// Sum of (gap + vehicle_length) over the fleet; equals the ring
/// circumference in any consistent state.
pub fn gap_sum(states: &[VehicleState], vehicle_length: f64) -> f64 {
    states.iter().map(|s| s.gap + vehicle_length).sum()
}
