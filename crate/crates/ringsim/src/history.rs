//! Time-indexed (gap, speed) history, one snapshot per tick. Delayed
//! attacks read past states from here.

use crate::error::HistoryError;

/// One recorded tick: `(gap, speed)` for every vehicle.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub gaps: Vec<f64>,
    pub speeds: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct StateHistory {
    dt: f64,
    records: Vec<Snapshot>,
}

impl StateHistory {
    pub fn new(dt: f64) -> Self {
        assert!(dt > 0.0);
        StateHistory {
            dt,
            records: Vec::new(),
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Record the snapshot for the next tick; tick n holds time n*dt.
    pub fn push(&mut self, gaps: Vec<f64>, speeds: Vec<f64>) {
        self.records.push(Snapshot { gaps, speeds });
    }

    pub fn at_tick(&self, tick: usize) -> Option<&Snapshot> {
        self.records.get(tick)
    }

    /// Snapshot at the tick nearest to `t_query` seconds, round half up.
    pub fn lookup(&self, t_query: f64) -> Result<&Snapshot, HistoryError> {
        let max = (self.records.len().saturating_sub(1)) as f64 * self.dt;
        if t_query < 0.0 {
            return Err(HistoryError::OutOfRange { t: t_query, max });
        }
        let tick = (t_query / self.dt + 0.5).floor() as usize;
        self.records
            .get(tick)
            .ok_or(HistoryError::OutOfRange { t: t_query, max })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn history(ticks: usize) -> StateHistory {
        let mut h = StateHistory::new(1.0 / 30.0);
        for n in 0..ticks {
            h.push(vec![n as f64], vec![n as f64 * 2.0]);
        }
        h
    }

    #[test]
    fn lookup_initial_condition() {
        let h = history(10);
        assert_eq!(h.lookup(0.0).unwrap().gaps[0], 0.0);
    }

    #[test]
    fn whole_second_queries_land_on_exact_ticks() {
        let h = history(2000);
        assert_eq!(h.lookup(56.0).unwrap().gaps[0], 1680.0);
    }

    #[test]
    fn nearest_tick_rounding() {
        let h = history(2000);
        assert_eq!(h.lookup(56.004).unwrap().gaps[0], 1680.0);
        // midpoint rounds up: 1680.5 ticks -> 1681
        let t_mid = 1680.5 / 30.0;
        assert_eq!(h.lookup(t_mid).unwrap().gaps[0], 1681.0);
    }

    #[test]
    fn out_of_range_errors() {
        let h = history(10);
        assert!(h.lookup(-0.01).is_err());
        assert!(h.lookup(10.0).is_err());
    }
}
