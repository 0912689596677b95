//! Config documents: a TOML key/value format covering single runs and
//! sweep grids. Unknown keys are rejected; everything else defaults to
//! the standard experiment setup.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::attack::{AttackKind, AttackSpec, TrigFn};
use crate::error::ConfigError;
use crate::idm::{AccelBounds, IdmParams};
use crate::scenario::{PhaseWindow, ScenarioDef, ScenarioId, SimConfig};
use crate::state::Powertrain;

#[derive(Debug, Clone, PartialEq)]
pub enum ParsedConfig {
    Single(SimConfig),
    Sweep(SweepSpec),
}

/// The cartesian experiment grid a sweep executes.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub scenarios: Vec<ScenarioId>,
    pub fleets: Vec<Powertrain>,
    /// Attack templates; targets left empty bind to each scenario's
    /// attacked set at run time. Kind `None` is the baseline.
    pub attacks: Vec<AttackSpec>,
    pub output_dir: PathBuf,
    /// Base settings every grid point shares.
    pub base: SimConfig,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.scenarios.is_empty() || self.fleets.is_empty() || self.attacks.is_empty() {
            return Err(ConfigError::Invalid(
                "sweep axes (scenarios, fleets, attacks) must be nonempty".into(),
            ));
        }
        Ok(())
    }

    /// The full grid reproducing the reported experiments: all four
    /// scenarios, both fleets, baseline plus the six attacks at their
    /// published parameters.
    pub fn reproduction(output_dir: PathBuf) -> SweepSpec {
        let mut attacks = vec![AttackSpec::none()];
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
        SweepSpec {
            scenarios: ScenarioId::ALL.to_vec(),
            fleets: vec![Powertrain::Ev, Powertrain::Ice],
            attacks,
            output_dir,
            base: SimConfig::default(),
        }
    }
}

/// Short stable label for one attack template, used in file names and
/// report keys.
pub fn attack_label(a: &AttackSpec) -> String {
    match a.kind {
        AttackKind::None => "baseline".to_string(),
        AttackKind::Dpda => format!("dpda_m{}", trim_num(a.delay_m)),
        AttackKind::Pa => "pa".to_string(),
        AttackKind::Fa => "fa".to_string(),
        AttackKind::Ba => format!("ba_p{}_phi{}", a.blinded_p, trim_num(a.spacing_cap_phi)),
        AttackKind::Ava => format!("ava_k{}", trim_num(a.gain_k)),
        AttackKind::Ma => format!("ma_m{}", trim_num(a.delay_m)),
    }
}

fn trim_num(x: f64) -> String {
    if x == x.trunc() {
        format!("{}", x as i64)
    } else {
        format!("{x}").replace('.', "_")
    }
}

// ---- raw document schema -------------------------------------------------

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDoc {
    scenario: Option<String>,
    fleet: Option<String>,
    n_vehicles: Option<usize>,
    ring_length: Option<f64>,
    vehicle_length: Option<f64>,
    dt: Option<f64>,
    duration: Option<f64>,
    acc_ids: Option<Vec<usize>>,
    attacked_ids: Option<Vec<usize>>,
    attack: Option<RawAttack>,
    bounds: Option<RawBounds>,
    phases: Option<RawPhases>,
    params: Option<RawParamTable>,
    sweep: Option<RawSweep>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAttack {
    kind: Option<String>,
    targets: Option<Vec<usize>>,
    window: Option<[f64; 2]>,
    delay_m: Option<f64>,
    blinded_p: Option<i64>,
    spacing_cap_phi: Option<f64>,
    gain_k: Option<f64>,
    angle_rate_omega: Option<f64>,
    trig: Option<String>,
    source_map: Option<BTreeMap<String, usize>>,
    ba_gaps_only: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBounds {
    min: Option<f64>,
    max: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPhases {
    pre: Option<[f64; 2]>,
    during: Option<[f64; 2]>,
    post: Option<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParamTable {
    ev_acc: Option<RawIdm>,
    ice_acc: Option<RawIdm>,
    hdv: Option<RawIdm>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIdm {
    alpha: Option<f64>,
    beta: Option<f64>,
    kappa: Option<f64>,
    eta: Option<f64>,
    tau: Option<f64>,
    v_d: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    scenarios: Option<Vec<String>>,
    fleets: Option<Vec<String>>,
    output_dir: Option<String>,
    #[serde(default)]
    attacks: Vec<RawAttack>,
    #[serde(default)]
    baseline: Option<bool>,
}

// ---- conversion ----------------------------------------------------------

fn parse_fleet(s: &str) -> Result<Powertrain, ConfigError> {
    match s.trim().to_uppercase().as_str() {
        "EV" => Ok(Powertrain::Ev),
        "ICE" => Ok(Powertrain::Ice),
        other => Err(ConfigError::Invalid(format!("unknown fleet '{other}' (expected EV or ICE)"))),
    }
}

fn parse_kind(s: &str) -> Result<AttackKind, ConfigError> {
    match s.trim().to_uppercase().as_str() {
        "NONE" | "BASELINE" => Ok(AttackKind::None),
        "DPDA" => Ok(AttackKind::Dpda),
        "PA" => Ok(AttackKind::Pa),
        "FA" => Ok(AttackKind::Fa),
        "BA" => Ok(AttackKind::Ba),
        "AVA" => Ok(AttackKind::Ava),
        "MA" => Ok(AttackKind::Ma),
        other => Err(ConfigError::Invalid(format!("unknown attack kind '{other}'"))),
    }
}

fn overlay_idm(base: IdmParams, raw: &RawIdm) -> IdmParams {
    IdmParams {
        alpha: raw.alpha.unwrap_or(base.alpha),
        beta: raw.beta.unwrap_or(base.beta),
        kappa: raw.kappa.unwrap_or(base.kappa),
        eta: raw.eta.unwrap_or(base.eta),
        tau: raw.tau.unwrap_or(base.tau),
        v_d: raw.v_d.unwrap_or(base.v_d),
    }
}

fn build_attack(raw: &RawAttack, default_targets: &BTreeSet<usize>) -> Result<AttackSpec, ConfigError> {
    let mut spec = AttackSpec::none();
    if let Some(kind) = &raw.kind {
        spec.kind = parse_kind(kind)?;
    }
    spec.targets = match &raw.targets {
        Some(t) => t.iter().copied().collect(),
        None => default_targets.clone(),
    };
    if let Some([a, b]) = raw.window {
        spec.window = (a, b);
    }
    if let Some(m) = raw.delay_m {
        if m < 0.0 {
            return Err(ConfigError::Invalid("delay_m >= 0".into()));
        }
        spec.delay_m = m;
    }
    if let Some(p) = raw.blinded_p {
        if p < 0 {
            return Err(ConfigError::Invalid("blinded_p >= 0".into()));
        }
        spec.blinded_p = p as usize;
    }
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // rejects NaN too
    if let Some(phi) = raw.spacing_cap_phi {
        if !(phi > 0.0) {
            return Err(ConfigError::Invalid("spacing_cap_phi > 0".into()));
        }
        spec.spacing_cap_phi = phi;
    }
    if let Some(k) = raw.gain_k {
        spec.gain_k = k;
    }
    if let Some(w) = raw.angle_rate_omega {
        spec.angle_rate_omega = w;
    }
    if let Some(t) = &raw.trig {
        spec.trig = match t.trim().to_lowercase().as_str() {
            "sin" => TrigFn::Sin,
            "cos" => TrigFn::Cos,
            other => return Err(ConfigError::Invalid(format!("unknown trig '{other}' (sin or cos)"))),
        };
    }
    if let Some(map) = &raw.source_map {
        for (k, &v) in map {
            let i: usize = k
                .parse()
                .map_err(|_| ConfigError::Invalid(format!("source_map key '{k}' is not a vehicle id")))?;
            spec.source_map.insert(i, v);
        }
    }
    if let Some(g) = raw.ba_gaps_only {
        spec.ba_gaps_only = g;
    }
    Ok(spec)
}

fn build_sim_config(doc: &RawDoc) -> Result<SimConfig, ConfigError> {
    let mut cfg = SimConfig::default();
    if let Some(s) = &doc.scenario {
        cfg.scenario = ScenarioDef::builtin(s.parse()?);
    }
    if let Some(ids) = &doc.acc_ids {
        cfg.scenario.acc_ids = ids.iter().copied().collect();
    }
    if let Some(ids) = &doc.attacked_ids {
        cfg.scenario.attacked_ids = ids.iter().copied().collect();
    }
    if let Some(f) = &doc.fleet {
        cfg.fleet_powertrain = parse_fleet(f)?;
    }
    if let Some(n) = doc.n_vehicles {
        cfg.n_vehicles = n;
    }
    if let Some(l) = doc.ring_length {
        cfg.ring_length = l;
    }
    if let Some(l) = doc.vehicle_length {
        cfg.vehicle_length = l;
    }
    if let Some(dt) = doc.dt {
        cfg.dt = dt;
    }
    if let Some(d) = doc.duration {
        cfg.duration = d;
    }
    if let Some(p) = &doc.phases {
        let windows = [
            (0, p.pre, false),
            (1, p.during, false),
            (2, p.post, true),
        ];
        for (idx, w, closed) in windows {
            if let Some([a, b]) = w {
                cfg.phases[idx] = PhaseWindow { start: a, end: b, closed_end: closed };
            }
        }
    }
    if let Some(b) = &doc.bounds {
        let d = AccelBounds::default();
        cfg.bounds = AccelBounds {
            min: b.min.unwrap_or(d.min),
            max: b.max.unwrap_or(d.max),
        };
    }
    if let Some(t) = &doc.params {
        if let Some(raw) = &t.ev_acc {
            cfg.params.ev_acc = overlay_idm(cfg.params.ev_acc, raw);
        }
        if let Some(raw) = &t.ice_acc {
            cfg.params.ice_acc = overlay_idm(cfg.params.ice_acc, raw);
        }
        if let Some(raw) = &t.hdv {
            cfg.params.hdv = overlay_idm(cfg.params.hdv, raw);
        }
    }
    if let Some(a) = &doc.attack {
        cfg.attack = build_attack(a, &cfg.scenario.attacked_ids)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Parse a config document; a `[sweep]` section selects the grid form.
pub fn parse_config(text: &str) -> Result<ParsedConfig, ConfigError> {
    let doc: RawDoc = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    match &doc.sweep {
        None => Ok(ParsedConfig::Single(build_sim_config(&doc)?)),
        Some(sweep) => {
            if doc.attack.is_some() {
                return Err(ConfigError::Invalid(
                    "a sweep document configures attacks under [sweep], not [attack]".into(),
                ));
            }
            let base = build_sim_config(&RawDoc {
                sweep: None,
                attack: None,
                scenario: None,
                ..clone_base_fields(&doc)
            })?;
            let scenarios = match &sweep.scenarios {
                None => ScenarioId::ALL.to_vec(),
                Some(v) => v.iter().map(|s| s.parse()).collect::<Result<_, _>>()?,
            };
            let fleets = match &sweep.fleets {
                None => vec![Powertrain::Ev, Powertrain::Ice],
                Some(v) => v.iter().map(|s| parse_fleet(s)).collect::<Result<_, _>>()?,
            };
            let mut attacks = Vec::new();
            if sweep.baseline.unwrap_or(true) {
                attacks.push(AttackSpec::none());
            }
            for raw in &sweep.attacks {
                // targets bind per scenario at run time when left empty
                attacks.push(build_attack(raw, &BTreeSet::new())?);
            }
            let spec = SweepSpec {
                scenarios,
                fleets,
                attacks,
                output_dir: PathBuf::from(sweep.output_dir.as_deref().unwrap_or("out")),
                base,
            };
            spec.validate()?;
            Ok(ParsedConfig::Sweep(spec))
        }
    }
}

fn clone_base_fields(doc: &RawDoc) -> RawDoc {
    RawDoc {
        scenario: doc.scenario.clone(),
        fleet: doc.fleet.clone(),
        n_vehicles: doc.n_vehicles,
        ring_length: doc.ring_length,
        vehicle_length: doc.vehicle_length,
        dt: doc.dt,
        duration: doc.duration,
        acc_ids: None,
        attacked_ids: None,
        attack: None,
        bounds: doc.bounds.as_ref().map(|b| RawBounds { min: b.min, max: b.max }),
        phases: None,
        params: None,
        sweep: None,
    }
}

// ---- config echo ---------------------------------------------------------

#[derive(Serialize)]
struct EchoDoc<'a> {
    scenario: &'a str,
    fleet: &'a str,
    n_vehicles: usize,
    ring_length: f64,
    vehicle_length: f64,
    dt: f64,
    duration: f64,
    acc_ids: Vec<usize>,
    attacked_ids: Vec<usize>,
    attack: EchoAttack,
    bounds: EchoBounds,
    params: EchoParams<'a>,
}

#[derive(Serialize)]
struct EchoAttack {
    kind: String,
    targets: Vec<usize>,
    window: [f64; 2],
    delay_m: f64,
    blinded_p: i64,
    spacing_cap_phi: f64,
    gain_k: f64,
    angle_rate_omega: f64,
    trig: String,
    source_map: BTreeMap<String, usize>,
    ba_gaps_only: bool,
}

#[derive(Serialize)]
struct EchoBounds {
    min: f64,
    max: f64,
}

#[derive(Serialize)]
struct EchoParams<'a> {
    ev_acc: &'a IdmParams,
    ice_acc: &'a IdmParams,
    hdv: &'a IdmParams,
}

/// Serialize a config back into the document format; parsing the result
/// reproduces an equivalent `SimConfig`.
pub fn emit_config(cfg: &SimConfig) -> String {
    let a = &cfg.attack;
    let echo = EchoDoc {
        scenario: cfg.scenario.id.label(),
        fleet: match cfg.fleet_powertrain {
            Powertrain::Ev => "EV",
            Powertrain::Ice => "ICE",
        },
        n_vehicles: cfg.n_vehicles,
        ring_length: cfg.ring_length,
        vehicle_length: cfg.vehicle_length,
        dt: cfg.dt,
        duration: cfg.duration,
        acc_ids: cfg.scenario.acc_ids.iter().copied().collect(),
        attacked_ids: cfg.scenario.attacked_ids.iter().copied().collect(),
        attack: EchoAttack {
            kind: a.kind.label().to_string(),
            targets: a.targets.iter().copied().collect(),
            window: [a.window.0, a.window.1],
            delay_m: a.delay_m,
            blinded_p: a.blinded_p as i64,
            spacing_cap_phi: a.spacing_cap_phi,
            gain_k: a.gain_k,
            angle_rate_omega: a.angle_rate_omega,
            trig: match a.trig {
                TrigFn::Sin => "sin".to_string(),
                TrigFn::Cos => "cos".to_string(),
            },
            source_map: a.source_map.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            ba_gaps_only: a.ba_gaps_only,
        },
        bounds: EchoBounds {
            min: cfg.bounds.min,
            max: cfg.bounds.max,
        },
        params: EchoParams {
            ev_acc: &cfg.params.ev_acc,
            ice_acc: &cfg.params.ice_acc,
            hdv: &cfg.params.hdv,
        },
    };
    toml::to_string_pretty(&echo).expect("config echo serialization")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_doc_fills_defaults() {
        let doc = r#"
scenario = "IV"
fleet = "EV"

[attack]
kind = "DPDA"
delay_m = 6.0
"#;
        let ParsedConfig::Single(cfg) = parse_config(doc).unwrap() else {
            panic!("expected single config")
        };
        assert_eq!(cfg.scenario.id, ScenarioId::IV);
        assert_eq!(cfg.n_vehicles, 10);
        assert_eq!(cfg.ring_length, 300.0);
        assert!((cfg.dt - 1.0 / 30.0).abs() < 1e-12);
        assert_eq!(cfg.attack.kind, AttackKind::Dpda);
        assert_eq!(cfg.attack.delay_m, 6.0);
        // targets default to the scenario's attacked set
        assert_eq!(cfg.attack.targets, [1, 5, 6].into());
        assert_eq!(cfg.attack.window, (60.0, 90.0));
        assert_eq!(cfg.params.ev_acc, IdmParams::EV_ACC);
    }

    #[test]
    fn negative_delay_is_a_validation_error() {
        let doc = r#"
[attack]
kind = "DPDA"
delay_m = -1.0
"#;
        let err = parse_config(doc).unwrap_err();
        assert!(err.to_string().contains("delay_m"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse_config("not_a_field = 1").unwrap_err();
        assert!(matches!(err, ConfigError::Parse(_)));
        let err = parse_config("[attack]\nbogus = 2").unwrap_err();
        assert!(matches!(err, ConfigError::Parse(_)));
    }

    #[test]
    fn preset_override_is_honored() {
        let doc = r#"
[params.ev_acc]
eta = 2.5
"#;
        let ParsedConfig::Single(cfg) = parse_config(doc).unwrap() else {
            panic!()
        };
        assert_eq!(cfg.params.ev_acc.eta, 2.5);
        assert_eq!(cfg.params.ev_acc.alpha, IdmParams::EV_ACC.alpha);
        assert_eq!(cfg.params.hdv, IdmParams::HDV);
    }

    #[test]
    fn config_echo_round_trips() {
        let doc = r#"
scenario = "II"
fleet = "ICE"

[attack]
kind = "BA"
blinded_p = 2
spacing_cap_phi = 50.0
ba_gaps_only = true

[params.ice_acc]
tau = 2.5
"#;
        let ParsedConfig::Single(cfg) = parse_config(doc).unwrap() else {
            panic!()
        };
        let echoed = emit_config(&cfg);
        let ParsedConfig::Single(cfg2) = parse_config(&echoed).unwrap() else {
            panic!("echo did not parse as a single config")
        };
        assert_eq!(cfg, cfg2);
    }

    #[test]
    fn sweep_doc_parses_grid() {
        let doc = r#"
duration = 120.0

[sweep]
scenarios = ["I", "IV"]
fleets = ["EV"]
output_dir = "results"

[[sweep.attacks]]
kind = "DPDA"
delay_m = 6.0

[[sweep.attacks]]
kind = "BA"
ba_gaps_only = true
"#;
        let ParsedConfig::Sweep(spec) = parse_config(doc).unwrap() else {
            panic!("expected sweep")
        };
        assert_eq!(spec.scenarios, vec![ScenarioId::I, ScenarioId::IV]);
        assert_eq!(spec.fleets, vec![Powertrain::Ev]);
        // baseline is implied, plus the two templates
        assert_eq!(spec.attacks.len(), 3);
        assert_eq!(spec.attacks[0].kind, AttackKind::None);
        assert_eq!(spec.output_dir, PathBuf::from("results"));
    }

    #[test]
    fn attack_labels_are_stable() {
        let mut a = AttackSpec::with_kind(AttackKind::Dpda, []);
        a.delay_m = 6.0;
        assert_eq!(attack_label(&a), "dpda_m6");
        let mut a = AttackSpec::with_kind(AttackKind::Ba, []);
        a.blinded_p = 2;
        a.spacing_cap_phi = 50.0;
        assert_eq!(attack_label(&a), "ba_p2_phi50");
        assert_eq!(attack_label(&AttackSpec::none()), "baseline");
    }
}
