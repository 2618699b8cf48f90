//! Flat `key = value` run configuration.
//!
//! Grammar, one entry per line:
//!
//! ```text
//! line    := blank | comment | entry [comment]
//! comment := '#' any*
//! entry   := key '=' value
//! key     := [A-Za-z0-9_.-]+          (case-sensitive)
//! ```
//!
//! Unknown and repeated keys are errors. Real values accept a trailing `pi`
//! (`100pi`, `0.5pi`, `pi`); lists are comma separated.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::Hasher;
use std::str::FromStr;

use fnv::FnvHasher;
use hnls_core::data::InitialData;
use hnls_core::dynamics::{min_nonlinear_q, EvolutionConfig, Integrator, Nonlinearity};
use hnls_core::spectral::DyadicBlock;

use crate::checkpoint::MAX_N_MAX;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` already set on line {first}")]
    Duplicate { line: usize, key: String, first: usize },
    #[error("key `{key}`: cannot use `{value}`: {reason}")]
    Value { key: String, value: String, reason: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    Simulate,
    Bilinear,
    Virial,
    Elliptic,
    EnergyCheck,
    Equivalence,
    Xsb,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::Simulate,
        ExperimentKind::Bilinear,
        ExperimentKind::Virial,
        ExperimentKind::Elliptic,
        ExperimentKind::EnergyCheck,
        ExperimentKind::Equivalence,
        ExperimentKind::Xsb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Simulate => "simulate",
            ExperimentKind::Bilinear => "bilinear",
            ExperimentKind::Virial => "virial",
            ExperimentKind::Elliptic => "elliptic",
            ExperimentKind::EnergyCheck => "energy-check",
            ExperimentKind::Equivalence => "equivalence",
            ExperimentKind::Xsb => "xsb",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("expected one of {}", names(&ExperimentKind::ALL.map(|k| k.name()))))
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn names(list: &[&str]) -> String {
    list.join(", ")
}

/// Named initial-data family with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSpec {
    GroundState,
    Mode { k1: usize, k2: usize },
    RandomSmooth { decay: f64, max_degree: usize },
    Block { label: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: ExperimentKind,
    pub nonlinearity: Nonlinearity,
    pub dt: f64,
    pub t_final: f64,
    pub n_max: usize,
    pub q_nl: usize,
    pub record_every: usize,
    pub integrator: Integrator,
    pub data: DataSpec,
    pub amplitude: f64,
    pub seed: u64,
    /// Energy / growth order.
    pub k: usize,
    pub s: Vec<f64>,
    pub track_growth: bool,
    pub track_energy: bool,
    /// Write a checkpoint every this many records (0: final state only).
    pub checkpoint_every: usize,
    pub trials: usize,
    pub blocks_n: Vec<u64>,
    pub blocks_m: Vec<u64>,
    pub virial_pairs: usize,
    pub virial_weight: Vec<f64>,
    pub virial_eps: f64,
    pub lambdas: Vec<f64>,
    pub fields: usize,
    pub xsb_s: f64,
    pub xsb_b: f64,
}

impl RunConfig {
    /// Defaults for every key; the experiment decides which keys matter.
    pub fn defaults(experiment: ExperimentKind) -> RunConfig {
        // The virial identities are checked on a short horizon; the bilinear
        // sweep needs room for the N=8 block.
        let t_final = match experiment {
            ExperimentKind::Virial => 0.2,
            _ => std::f64::consts::PI,
        };
        let n_max = match experiment {
            ExperimentKind::Bilinear => 126,
            _ => 32,
        };
        RunConfig {
            experiment,
            nonlinearity: Nonlinearity::Defocusing,
            dt: 1e-3,
            t_final,
            n_max,
            q_nl: min_nonlinear_q(n_max),
            record_every: 100,
            integrator: Integrator::Strang,
            data: DataSpec::GroundState,
            amplitude: 1.0,
            seed: 0,
            k: 1,
            s: vec![1.0, 2.0],
            track_growth: false,
            track_energy: false,
            checkpoint_every: 0,
            trials: 50,
            blocks_n: vec![1, 2, 4, 8],
            blocks_m: vec![1],
            virial_pairs: 10,
            virial_weight: vec![1.0, 4.0],
            virial_eps: 0.01,
            lambdas: vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0],
            fields: 100,
            xsb_s: 1.0,
            xsb_b: 0.5,
        }
    }

    /// Parses a configuration file. `fallback` supplies the experiment kind
    /// when the file has no `experiment` key.
    pub fn parse(text: &str, fallback: Option<ExperimentKind>) -> Result<RunConfig, ConfigError> {
        let entries = parse_entries(text)?;
        let experiment = match entries.get("experiment") {
            Some(e) => parse_value::<ExperimentKind>("experiment", &e.value)?,
            None => fallback.ok_or_else(|| ConfigError::Invalid("missing key `experiment`".into()))?,
        };
        let mut cfg = RunConfig::defaults(experiment);
        let mut q_nl = None;
        let mut family = None;
        let mut data_params: HashMap<&str, &str> = HashMap::new();
        for (key, entry) in &entries {
            let v = entry.value.as_str();
            let key = key.as_str();
            match key {
                "experiment" => {}
                "nonlinearity" => {
                    cfg.nonlinearity = match v {
                        "defocusing" => Nonlinearity::Defocusing,
                        "focusing" => Nonlinearity::Focusing,
                        "linear" => Nonlinearity::Linear,
                        _ => return Err(bad(key, v, "expected defocusing, focusing or linear")),
                    }
                }
                "dt" => cfg.dt = real(key, v)?,
                "t_final" => cfg.t_final = real(key, v)?,
                "n_max" => cfg.n_max = parse_value(key, v)?,
                "q_nl" => q_nl = Some(parse_value(key, v)?),
                "record_every" => cfg.record_every = parse_value(key, v)?,
                "integrator" => {
                    cfg.integrator = match v {
                        "strang" => Integrator::Strang,
                        "yoshida4" => Integrator::Yoshida4,
                        _ => return Err(bad(key, v, "expected strang or yoshida4")),
                    }
                }
                "data" => family = Some(v),
                "data.k1" | "data.k2" | "data.decay" | "data.max_degree" | "data.label" => {
                    data_params.insert(key, v);
                }
                "amplitude" => cfg.amplitude = real(key, v)?,
                "seed" => cfg.seed = parse_value(key, v)?,
                "k" => cfg.k = parse_value(key, v)?,
                "s" => cfg.s = list(key, v, real)?,
                "track_growth" => cfg.track_growth = parse_value(key, v)?,
                "track_energy" => cfg.track_energy = parse_value(key, v)?,
                "checkpoint_every" => cfg.checkpoint_every = parse_value(key, v)?,
                "trials" => cfg.trials = parse_value(key, v)?,
                "blocks_n" => cfg.blocks_n = list(key, v, parse_value)?,
                "blocks_m" => cfg.blocks_m = list(key, v, parse_value)?,
                "virial_pairs" => cfg.virial_pairs = parse_value(key, v)?,
                "virial_weight" => cfg.virial_weight = list(key, v, real)?,
                "virial_eps" => cfg.virial_eps = real(key, v)?,
                "lambdas" => cfg.lambdas = list(key, v, real)?,
                "fields" => cfg.fields = parse_value(key, v)?,
                "xsb_s" => cfg.xsb_s = real(key, v)?,
                "xsb_b" => cfg.xsb_b = real(key, v)?,
                _ => {
                    return Err(ConfigError::UnknownKey {
                        line: entry.line,
                        key: key.to_string(),
                    })
                }
            }
        }
        if cfg.n_max > MAX_N_MAX {
            return Err(ConfigError::Invalid(format!("`n_max` {} exceeds {MAX_N_MAX}", cfg.n_max)));
        }
        cfg.q_nl = q_nl.unwrap_or_else(|| min_nonlinear_q(cfg.n_max));
        if cfg.q_nl > 4 * MAX_N_MAX {
            return Err(ConfigError::Invalid(format!("`q_nl` {} exceeds {}", cfg.q_nl, 4 * MAX_N_MAX)));
        }
        cfg.data = data_spec(family, &data_params)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.evolution().validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let positive = |name: &str, x: f64| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(ConfigError::Invalid(format!("`{name}` must be positive and finite")))
            }
        };
        positive("amplitude", self.amplitude)?;
        positive("virial_eps", self.virial_eps)?;
        for &m in &self.virial_weight {
            positive("virial_weight", m)?;
        }
        for &l in &self.lambdas {
            if !(l >= 1.0 && l.is_finite()) {
                return Err(ConfigError::Invalid("`lambdas` entries must be at least 1".into()));
            }
        }
        for &s in &self.s {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(ConfigError::Invalid("`s` entries must be nonnegative".into()));
            }
        }
        if !self.xsb_s.is_finite() || !self.xsb_b.is_finite() {
            return Err(ConfigError::Invalid("`xsb_s` and `xsb_b` must be finite".into()));
        }
        for &n in self.blocks_n.iter().chain(&self.blocks_m) {
            DyadicBlock::new(n).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        if self.k > 2 {
            return Err(ConfigError::Invalid(format!("order k={} is not supported (0, 1 or 2)", self.k)));
        }
        if self.trials == 0 || self.virial_pairs == 0 || self.fields == 0 {
            return Err(ConfigError::Invalid("`trials`, `virial_pairs` and `fields` must be positive".into()));
        }
        Ok(())
    }

    pub fn evolution(&self) -> EvolutionConfig {
        EvolutionConfig {
            nonlinearity: self.nonlinearity,
            dt: self.dt,
            t_final: self.t_final,
            n_max: self.n_max,
            q_nl: self.q_nl,
            record_every: self.record_every,
            integrator: self.integrator,
            keep_snapshots: false,
        }
    }

    pub fn initial_data(&self) -> InitialData {
        match self.data {
            DataSpec::GroundState => InitialData::GroundState,
            DataSpec::Mode { k1, k2 } => InitialData::Mode { k1, k2 },
            DataSpec::RandomSmooth { decay, max_degree } => InitialData::RandomSmooth {
                decay,
                max_degree,
                seed: self.seed,
            },
            DataSpec::Block { label } => InitialData::Block { label, seed: self.seed },
        }
    }

    /// Every key with its effective value, sorted by key.
    pub fn canonical(&self) -> String {
        let mut m: BTreeMap<&str, String> = BTreeMap::new();
        let r = |x: f64| format!("{x:?}");
        let rl = |v: &[f64]| v.iter().map(|&x| r(x)).collect::<Vec<_>>().join(",");
        // Block lists are sweep grids: order and repeats do not change the run.
        let ul = |v: &[u64]| {
            let mut v = v.to_vec();
            v.sort_unstable();
            v.dedup();
            v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        };
        m.insert("experiment", self.experiment.to_string());
        m.insert(
            "nonlinearity",
            match self.nonlinearity {
                Nonlinearity::Defocusing => "defocusing",
                Nonlinearity::Focusing => "focusing",
                Nonlinearity::Linear => "linear",
            }
            .into(),
        );
        m.insert("dt", r(self.dt));
        m.insert("t_final", r(self.t_final));
        m.insert("n_max", self.n_max.to_string());
        m.insert("q_nl", self.q_nl.to_string());
        m.insert("record_every", self.record_every.to_string());
        m.insert(
            "integrator",
            match self.integrator {
                Integrator::Strang => "strang",
                Integrator::Yoshida4 => "yoshida4",
            }
            .into(),
        );
        match &self.data {
            DataSpec::GroundState => {
                m.insert("data", "ground-state".into());
            }
            DataSpec::Mode { k1, k2 } => {
                m.insert("data", "mode".into());
                m.insert("data.k1", k1.to_string());
                m.insert("data.k2", k2.to_string());
            }
            DataSpec::RandomSmooth { decay, max_degree } => {
                m.insert("data", "random-smooth".into());
                m.insert("data.decay", r(*decay));
                m.insert("data.max_degree", max_degree.to_string());
            }
            DataSpec::Block { label } => {
                m.insert("data", "block".into());
                m.insert("data.label", label.to_string());
            }
        }
        m.insert("amplitude", r(self.amplitude));
        m.insert("seed", self.seed.to_string());
        m.insert("k", self.k.to_string());
        m.insert("s", rl(&self.s));
        m.insert("track_growth", self.track_growth.to_string());
        m.insert("track_energy", self.track_energy.to_string());
        m.insert("checkpoint_every", self.checkpoint_every.to_string());
        m.insert("trials", self.trials.to_string());
        m.insert("blocks_n", ul(&self.blocks_n));
        m.insert("blocks_m", ul(&self.blocks_m));
        m.insert("virial_pairs", self.virial_pairs.to_string());
        m.insert("virial_weight", rl(&self.virial_weight));
        m.insert("virial_eps", r(self.virial_eps));
        m.insert("lambdas", rl(&self.lambdas));
        m.insert("fields", self.fields.to_string());
        m.insert("xsb_s", r(self.xsb_s));
        m.insert("xsb_b", r(self.xsb_b));
        m.into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// 64-bit FNV-1a of [`RunConfig::canonical`].
    pub fn hash(&self) -> u64 {
        fnv1a(self.canonical().as_bytes())
    }
}

pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = FnvHasher::default();
    h.write(bytes);
    h.finish()
}

struct Entry {
    line: usize,
    value: String,
}

fn parse_entries(text: &str) -> Result<BTreeMap<String, Entry>, ConfigError> {
    let mut out: BTreeMap<String, Entry> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((k, v)) = content.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                msg: "expected `key = value`".into(),
            });
        };
        let key = k.trim();
        let value = v.trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || "_.-".contains(c)) {
            return Err(ConfigError::Syntax {
                line,
                msg: format!("malformed key `{key}`"),
            });
        }
        if value.is_empty() {
            return Err(ConfigError::Syntax {
                line,
                msg: format!("key `{key}` has no value"),
            });
        }
        if let Some(first) = out.get(key) {
            return Err(ConfigError::Duplicate {
                line,
                key: key.into(),
                first: first.line,
            });
        }
        out.insert(
            key.into(),
            Entry {
                line,
                value: value.into(),
            },
        );
    }
    Ok(out)
}

fn bad(key: &str, value: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Value {
        key: key.into(),
        value: value.into(),
        reason: reason.into(),
    }
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    v.parse::<T>().map_err(|e| bad(key, v, e.to_string()))
}

fn real(key: &str, v: &str) -> Result<f64, ConfigError> {
    let x = match v.strip_suffix("pi") {
        Some("") => std::f64::consts::PI,
        Some(head) => parse_value::<f64>(key, head.trim_end_matches('*'))? * std::f64::consts::PI,
        None => parse_value::<f64>(key, v)?,
    };
    if x.is_finite() {
        Ok(x)
    } else {
        Err(bad(key, v, "not a finite number"))
    }
}

fn list<T>(key: &str, v: &str, item: fn(&str, &str) -> Result<T, ConfigError>) -> Result<Vec<T>, ConfigError> {
    let out = v
        .split(',')
        .map(|s| item(key, s.trim()))
        .collect::<Result<Vec<T>, _>>()?;
    if out.is_empty() {
        return Err(bad(key, v, "empty list"));
    }
    Ok(out)
}

fn data_spec(family: Option<&str>, p: &HashMap<&str, &str>) -> Result<DataSpec, ConfigError> {
    let get = |k: &str| p.get(k).copied();
    let allowed: &[&str] = match family.unwrap_or("ground-state") {
        "ground-state" => &[],
        "mode" => &["data.k1", "data.k2"],
        "random-smooth" => &["data.decay", "data.max_degree"],
        "block" => &["data.label"],
        other => {
            return Err(bad(
                "data",
                other,
                format!("expected one of {}", names(&["ground-state", "mode", "random-smooth", "block"])),
            ))
        }
    };
    if let Some(extra) = p.keys().find(|k| !allowed.contains(k)) {
        return Err(ConfigError::Invalid(format!(
            "`{extra}` does not apply to data family `{}`",
            family.unwrap_or("ground-state")
        )));
    }
    let spec = match family.unwrap_or("ground-state") {
        "mode" => DataSpec::Mode {
            k1: get("data.k1").map(|v| parse_value("data.k1", v)).transpose()?.unwrap_or(0),
            k2: get("data.k2").map(|v| parse_value("data.k2", v)).transpose()?.unwrap_or(0),
        },
        "random-smooth" => DataSpec::RandomSmooth {
            decay: get("data.decay").map(|v| real("data.decay", v)).transpose()?.unwrap_or(2.0),
            max_degree: get("data.max_degree")
                .map(|v| parse_value("data.max_degree", v))
                .transpose()?
                .unwrap_or(2),
        },
        "block" => DataSpec::Block {
            label: get("data.label").map(|v| parse_value("data.label", v)).transpose()?.unwrap_or(1),
        },
        _ => DataSpec::GroundState,
    };
    Ok(spec)
}
