//! Byte-stable trajectory CSV and plot-data series emission.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use crate::scenario::RunResult;

/// Format with 6 significant digits, locale-free.
pub fn fmt_sig6(v: f64) -> String {
    if v == 0.0 {
        return "0.00000".to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    let prec = (5 - exp).max(0) as usize;
    format!("{v:.prec$}")
}

/// Trajectory CSV: one row per vehicle per tick, ordered by
/// (t, vehicle_id), t with 3 decimals, values with 6 significant digits.
pub fn trajectory_csv(result: &RunResult) -> String {
    let mut out = String::with_capacity(result.trajectory.len() * 40);
    out.push_str("t,vehicle_id,position_m,speed_mps,gap_m,accel_mps2\n");
    for rec in &result.trajectory {
        let t = result.time_at(rec.tick);
        for i in 0..result.config.n_vehicles {
            let _ = writeln!(
                out,
                "{t:.3},{i},{},{},{},{}",
                fmt_sig6(rec.positions[i]),
                fmt_sig6(rec.speeds[i]),
                fmt_sig6(rec.gaps[i]),
                fmt_sig6(rec.accels[i]),
            );
        }
    }
    out
}

pub fn write_trajectory_csv(result: &RunResult, path: &Path) -> io::Result<()> {
    fs::write(path, trajectory_csv(result))
}

/// Two-column (t, value) series per vehicle for speed and gap, one file
/// each, suitable for any plotting tool.
pub fn write_plot_data(result: &RunResult, dir: &Path) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    for i in 0..result.config.n_vehicles {
        for (name, pick) in [
            ("speed", 0usize),
            ("gap", 1usize),
        ] {
            let mut out = String::new();
            for rec in &result.trajectory {
                let v = if pick == 0 { rec.speeds[i] } else { rec.gaps[i] };
                let _ = writeln!(out, "{:.3} {}", result.time_at(rec.tick), fmt_sig6(v));
            }
            fs::write(dir.join(format!("{name}_v{i}.dat")), out)?;
        }
    }
    Ok(())
}
