use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ringsim::config::{emit_config, parse_config, ParsedConfig, SweepSpec};
use ringsim::metrics::phase_metrics;
use ringsim::output::{write_plot_data, write_trajectory_csv};
use ringsim::report::emit_report;
use ringsim::scenario::{run, Phase, RunResult, SimConfig};
use ringsim::sweep::run_sweep;
use ringsim::{AttackKind, AttackSpec, Powertrain, ScenarioId};

#[derive(Parser)]
#[command(name = "ringsim", about = "Ring-road platoon simulator with attack injection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a single run from a config file or inline flags
    Run {
        /// Config document; flags below override nothing when present
        #[arg(long)]
        config: Option<PathBuf>,
        /// Scenario id I..IV
        #[arg(long, default_value = "I")]
        scenario: String,
        /// ACC fleet powertrain: EV or ICE
        #[arg(long, default_value = "EV")]
        fleet: String,
        /// Attack kind: none, dpda, pa, fa, ba, ava, ma
        #[arg(long, default_value = "none")]
        attack: String,
        /// Delay in seconds for dpda/ma
        #[arg(long)]
        delay: Option<f64>,
        /// Reproduce the gaps-only blinded-spacing arithmetic
        #[arg(long)]
        ba_gaps_only: bool,
        /// Output directory
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Also emit per-vehicle (t, value) series files
        #[arg(long)]
        plot_data: bool,
    },
    /// Execute a sweep grid from a config file
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Override the sweep's output directory
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        parallel: usize,
        #[arg(long)]
        plot_data: bool,
    },
    /// Run the built-in full experiment grid and emit all tables
    Reproduce {
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        parallel: usize,
        #[arg(long)]
        plot_data: bool,
    },
}

fn build_inline_config(
    scenario: &str,
    fleet: &str,
    attack: &str,
    delay: Option<f64>,
    ba_gaps_only: bool,
) -> Result<SimConfig, String> {
    let scenario: ScenarioId = scenario.parse().map_err(|e| format!("{e}"))?;
    let fleet = match fleet.to_uppercase().as_str() {
        "EV" => Powertrain::Ev,
        "ICE" => Powertrain::Ice,
        other => return Err(format!("unknown fleet '{other}'")),
    };
    let kind = match attack.to_uppercase().as_str() {
        "NONE" | "BASELINE" => AttackKind::None,
        "DPDA" => AttackKind::Dpda,
        "PA" => AttackKind::Pa,
        "FA" => AttackKind::Fa,
        "BA" => AttackKind::Ba,
        "AVA" => AttackKind::Ava,
        "MA" => AttackKind::Ma,
        other => return Err(format!("unknown attack '{other}'")),
    };
    let cfg = SimConfig::new(scenario, fleet, AttackSpec::none());
    let mut spec = AttackSpec::with_kind(kind, cfg.scenario.attacked_ids.iter().copied());
    if let Some(m) = delay {
        spec.delay_m = m;
    }
    spec.ba_gaps_only = ba_gaps_only;
    let cfg = SimConfig { attack: spec, ..cfg };
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn print_run_summary(result: &RunResult) {
    match result.collision {
        Some(c) => println!(
            "collision at t={:.2} s: vehicle {} into vehicle {}",
            c.time, c.follower, c.leader
        ),
        None => println!("collision-free over {:.0} s", result.config.duration),
    }
    for phase in Phase::ALL {
        let m = phase_metrics(result, phase);
        let fmt = |v: Option<f64>| v.map_or("---".to_string(), |x| format!("{x:.2}"));
        println!(
            "{:<7} V_avg={} VSD={} SSD={} THW={}",
            m.phase.label(),
            fmt(m.v_avg),
            fmt(m.mean_vsd),
            fmt(m.mean_ssd),
            fmt(m.thw)
        );
    }
}

#[allow(clippy::too_many_arguments)]
fn do_run(
    config: Option<PathBuf>,
    scenario: String,
    fleet: String,
    attack: String,
    delay: Option<f64>,
    ba_gaps_only: bool,
    out: PathBuf,
    plot_data: bool,
) -> Result<(), String> {
    let cfg = match config {
        Some(path) => {
            let text = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
            match parse_config(&text).map_err(|e| e.to_string())? {
                ParsedConfig::Single(cfg) => cfg,
                ParsedConfig::Sweep(_) => {
                    return Err("config describes a sweep; use the sweep subcommand".into())
                }
            }
        }
        None => build_inline_config(&scenario, &fleet, &attack, delay, ba_gaps_only)?,
    };
    let result = run(cfg).map_err(|e| e.to_string())?;
    fs::create_dir_all(&out).map_err(|e| e.to_string())?;
    write_trajectory_csv(&result, &out.join("trajectory.csv")).map_err(|e| e.to_string())?;
    fs::write(out.join("config.toml"), emit_config(&result.config)).map_err(|e| e.to_string())?;
    if plot_data {
        write_plot_data(&result, &out.join("plot")).map_err(|e| e.to_string())?;
    }
    print_run_summary(&result);
    println!("trajectory written to {}", out.join("trajectory.csv").display());
    Ok(())
}

fn do_sweep(spec: &SweepSpec, parallel: usize, plot_data: bool) -> Result<(), String> {
    let out = &spec.output_dir;
    fs::create_dir_all(out).map_err(|e| e.to_string())?;
    let sweep = run_sweep(spec, parallel);
    for run in &sweep.runs {
        if let Ok(result) = &run.outcome {
            let fleet = match run.fleet {
                Powertrain::Ev => "ev",
                Powertrain::Ice => "ice",
            };
            let stem = format!("{}_{}_{}", run.scenario.label(), fleet, run.label);
            write_trajectory_csv(result, &out.join(format!("{stem}.csv"))).map_err(|e| e.to_string())?;
            if plot_data {
                write_plot_data(result, &out.join(format!("{stem}_plot"))).map_err(|e| e.to_string())?;
            }
        }
    }
    let report = emit_report(&sweep);
    fs::write(out.join("report.txt"), &report).map_err(|e| e.to_string())?;
    print!("{report}");
    println!("report written to {}", out.join("report.txt").display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run {
            config,
            scenario,
            fleet,
            attack,
            delay,
            ba_gaps_only,
            out,
            plot_data,
        } => do_run(config, scenario, fleet, attack, delay, ba_gaps_only, out, plot_data),
        Command::Sweep {
            config,
            out,
            parallel,
            plot_data,
        } => {
            let parse = fs::read_to_string(&config)
                .map_err(|e| format!("{}: {e}", config.display()))
                .and_then(|text| parse_config(&text).map_err(|e| e.to_string()));
            match parse {
                Err(e) => Err(e),
                Ok(ParsedConfig::Single(cfg)) => {
                    // single-run document: treat as a 1-cell grid
                    let spec = SweepSpec {
                        scenarios: vec![cfg.scenario.id],
                        fleets: vec![cfg.fleet_powertrain],
                        attacks: vec![cfg.attack.clone()],
                        output_dir: out.clone().unwrap_or_else(|| PathBuf::from("out")),
                        base: cfg,
                    };
                    do_sweep(&spec, parallel, plot_data)
                }
                Ok(ParsedConfig::Sweep(mut spec)) => {
                    if let Some(out) = out {
                        spec.output_dir = out;
                    }
                    do_sweep(&spec, parallel, plot_data)
                }
            }
        }
        Command::Reproduce {
            out,
            parallel,
            plot_data,
        } => do_sweep(&SweepSpec::reproduction(out), parallel, plot_data),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
