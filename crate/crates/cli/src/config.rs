//! `key = value` configuration with command-line overrides.
//!
//! Units live in key names. Values are converted to SI once, here: `_ghz`
//! keys become hertz, `_dbm` keys watts, `_deg` keys radians.

use mla_nearfield::{ApertureConvention, CarrierSpec};
use std::collections::BTreeMap;
use std::fmt;

/// Where a value came from, for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Flag,
    Default,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::Flag => f.write_str("command line"),
            Origin::Default => f.write_str("default"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub key: String,
    pub origin: Option<Origin>,
    pub reason: String,
}

impl ConfigError {
    fn new(key: &str, origin: Option<Origin>, reason: impl Into<String>) -> Self {
        Self {
            key: key.to_string(),
            origin,
            reason: reason.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.origin {
            Some(o) => write!(f, "{o}: `{}`: {}", self.key, self.reason),
            None => write!(f, "`{}`: {}", self.key, self.reason),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// Finite, strictly positive.
    Positive,
    /// Any finite number.
    Real,
    /// Integer with a lower bound.
    Count(usize),
    /// Comma-separated integers with a lower bound.
    Counts(usize),
    /// Comma-separated finite numbers.
    Reals,
    Seed,
    Bool,
    Choice(&'static [&'static str]),
    /// Positive number or `inf`.
    Distance,
    /// Non-negative integer or `all`.
    CountOrAll,
}

#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub name: &'static str,
    pub kind: Kind,
    /// `None` marks a required key.
    pub default: Option<&'static str>,
}

const fn key(name: &'static str, kind: Kind, default: Option<&'static str>) -> KeySpec {
    KeySpec { name, kind, default }
}

/// A typed value, already in SI units.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Count(usize),
    Counts(Vec<usize>),
    Reals(Vec<f64>),
    Seed(u64),
    Bool(bool),
    Choice(String),
    /// `None` is infinity.
    Distance(Option<f64>),
    CountOrAll(Option<usize>),
}

const CONVENTIONS: &[&str] = &["subarray_lengths", "element_extent"];
const SIGNAL_MODELS: &[&str] = &["piecewise_far_field", "near_field"];
const SWEEPS: &[&str] = &["none", "antennas", "subarrays"];

const CARRIER_KEYS: [&str; 2] = ["frequency_ghz", "wavelength_m"];

const COMMON: &[KeySpec] = &[
    key("frequency_ghz", Kind::Positive, Some("")),
    key("wavelength_m", Kind::Positive, Some("")),
    key("spacing_m", Kind::Positive, Some("")),
    key("aperture_convention", Kind::Choice(CONVENTIONS), Some("subarray_lengths")),
    key("seed", Kind::Seed, Some("0")),
];

const ARRAY: &[KeySpec] = &[
    key("subarrays", Kind::Count(1), None),
    key("antennas", Kind::Count(1), None),
    key("aperture_m", Kind::Positive, None),
    key("focus_m", Kind::Distance, None),
];

const BEAMPATTERN: &[KeySpec] = &[
    key("x_min_m", Kind::Real, Some("-1")),
    key("x_max_m", Kind::Real, Some("1")),
    key("x_points", Kind::Count(1), Some("101")),
    key("z_min_m", Kind::Positive, Some("1")),
    key("z_max_m", Kind::Positive, Some("60")),
    key("z_points", Kind::Count(1), Some("120")),
    key("quadrature_order", Kind::Count(1), Some("8")),
];

const CUTLINE: &[KeySpec] = &[
    key("points", Kind::Count(2), Some("301")),
    key("half_width_m", Kind::Positive, Some("")),
    key("grid_points", Kind::Count(3), Some("300")),
];

const DEPTH: &[KeySpec] = &[
    key("z_min_m", Kind::Positive, Some("1")),
    key("z_max_m", Kind::Positive, Some("100")),
    key("z_points", Kind::Count(1), Some("500")),
    key("exact_overlay", Kind::Bool, Some("true")),
    key("quadrature_order", Kind::Count(1), Some("8")),
    key("chain_foci", Kind::Count(1), Some("1")),
    key("null_threshold", Kind::Positive, Some("0.05")),
];

const DESIGN: &[KeySpec] = &[
    key("aperture_m", Kind::Positive, None),
    key("focus_m", Kind::Positive, None),
    key("antennas", Kind::Counts(1), None),
    key("grid_points", Kind::Count(3), Some("300")),
];

const TRIALS: &[KeySpec] = &[
    key("subarrays", Kind::Count(2), None),
    key("antennas", Kind::Count(2), None),
    key("aperture_m", Kind::Positive, None),
    key("power_dbm", Kind::Real, Some("20")),
    key("noise_dbm", Kind::Real, Some("-78")),
    key("snapshots", Kind::Count(1), Some("100")),
    key("angle_min_deg", Kind::Real, Some("-60")),
    key("angle_max_deg", Kind::Real, Some("60")),
    key("distance_min_m", Kind::Positive, Some("4")),
    key("distance_max_m", Kind::Positive, Some("40")),
    key("trials", Kind::Count(1), Some("500")),
    key("angle_step_rad", Kind::Positive, Some("0.002")),
    key("distance_step_m", Kind::Positive, Some("0.02")),
    key("ridge", Kind::Real, Some("0")),
    key("sources", Kind::Count(1), Some("1")),
    key("signal_model", Kind::Choice(SIGNAL_MODELS), Some("piecewise_far_field")),
    key("baseline_trials", Kind::CountOrAll, Some("0")),
];

const LOCALIZE: &[KeySpec] = &[
    key("sweep", Kind::Choice(SWEEPS), Some("none")),
    key("sweep_values", Kind::Counts(1), Some("")),
];

const SE: &[KeySpec] = &[key("power_dbm_values", Kind::Reals, Some("-10,0,10,20,30"))];

/// Subcommands, one per result family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Beampattern,
    Cutline,
    Depth,
    Design,
    Localize,
    Se,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Beampattern => "beampattern",
            Command::Cutline => "cutline",
            Command::Depth => "depth",
            Command::Design => "design",
            Command::Localize => "localize",
            Command::Se => "se",
        }
    }

    pub fn keys(self) -> Vec<KeySpec> {
        let groups: &[&[KeySpec]] = match self {
            Command::Beampattern => &[COMMON, ARRAY, BEAMPATTERN],
            Command::Cutline => &[COMMON, ARRAY, CUTLINE],
            Command::Depth => &[COMMON, ARRAY, DEPTH],
            Command::Design => &[COMMON, DESIGN],
            Command::Localize => &[COMMON, TRIALS, LOCALIZE],
            Command::Se => &[COMMON, TRIALS, SE],
        };
        groups.iter().flat_map(|g| g.iter().copied()).collect()
    }
}

#[derive(Debug, Clone)]
struct Entry {
    raw: String,
    origin: Origin,
    value: Option<Value>,
}

/// Parsed, typed, validated configuration for one subcommand.
#[derive(Debug, Clone)]
pub struct CliConfig {
    pub command: Command,
    entries: BTreeMap<&'static str, Entry>,
    carrier: CarrierSpec,
}

/// Splits `key = value` lines; `#` starts a comment.
fn read_lines(text: &str) -> Result<Vec<(String, String, usize)>, ConfigError> {
    let mut out: Vec<(String, String, usize)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError::new(line, Some(Origin::Line(n)), "expected `key = value`"));
        };
        let k = k.trim();
        if k.is_empty() {
            return Err(ConfigError::new("", Some(Origin::Line(n)), "empty key"));
        }
        if let Some((_, _, first)) = out.iter().find(|(key, _, _)| key == k) {
            return Err(ConfigError::new(k, Some(Origin::Line(n)), format!("duplicate of line {first}")));
        }
        out.push((k.to_string(), v.trim().to_string(), n));
    }
    Ok(out)
}

fn parse_value(spec: &KeySpec, raw: &str) -> Result<Value, String> {
    let number = |s: &str| -> Result<f64, String> {
        let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("`{s}` is not finite"))
        }
    };
    let count = |s: &str, min: usize| -> Result<usize, String> {
        let v: usize = s.trim().parse().map_err(|_| format!("`{s}` is not a non-negative integer"))?;
        if v < min {
            Err(format!("must be at least {min}"))
        } else {
            Ok(v)
        }
    };
    let si = |v: f64| convert(spec.name, v);
    match spec.kind {
        Kind::Positive => {
            let v = number(raw)?;
            if v > 0.0 {
                Ok(Value::Number(si(v)))
            } else {
                Err("must be positive".into())
            }
        }
        Kind::Real => Ok(Value::Number(si(number(raw)?))),
        Kind::Count(min) => Ok(Value::Count(count(raw, min)?)),
        Kind::Counts(min) => {
            let v = split_list(raw).into_iter().map(|s| count(s, min)).collect::<Result<Vec<_>, _>>()?;
            if v.is_empty() {
                Err("needs at least one value".into())
            } else {
                Ok(Value::Counts(v))
            }
        }
        Kind::Reals => {
            let v = split_list(raw).into_iter().map(|s| number(s).map(si)).collect::<Result<Vec<_>, _>>()?;
            if v.is_empty() {
                Err("needs at least one value".into())
            } else {
                Ok(Value::Reals(v))
            }
        }
        Kind::Seed => raw
            .parse()
            .map(Value::Seed)
            .map_err(|_| format!("`{raw}` is not a 64-bit unsigned integer")),
        Kind::Bool => match raw {
            "true" | "yes" | "1" => Ok(Value::Bool(true)),
            "false" | "no" | "0" => Ok(Value::Bool(false)),
            _ => Err(format!("`{raw}` is not a boolean")),
        },
        Kind::Choice(options) => {
            if options.contains(&raw) {
                Ok(Value::Choice(raw.to_string()))
            } else {
                Err(format!("`{raw}` is not one of {}", options.join(", ")))
            }
        }
        Kind::Distance => {
            if raw == "inf" {
                return Ok(Value::Distance(None));
            }
            let v = number(raw)?;
            if v > 0.0 {
                Ok(Value::Distance(Some(v)))
            } else {
                Err("must be positive or `inf`".into())
            }
        }
        Kind::CountOrAll => {
            if raw == "all" {
                Ok(Value::CountOrAll(None))
            } else {
                Ok(Value::CountOrAll(Some(count(raw, 0)?)))
            }
        }
    }
}

fn split_list(s: &str) -> Vec<&str> {
    s.split(',').map(str::trim).filter(|p| !p.is_empty()).collect()
}

/// Unit suffix to SI. Sweep lists such as `power_dbm_values` stay in their
/// named unit because the sweep itself is defined in that unit.
fn convert(key: &str, v: f64) -> f64 {
    if key.ends_with("_ghz") {
        v * 1e9
    } else if key.ends_with("_dbm") {
        mla_nearfield::channel::dbm_to_watts(v)
    } else if key.ends_with("_deg") {
        v.to_radians()
    } else {
        v
    }
}

/// Parses `text` and applies `overrides` (flags win) for `command`.
pub fn parse_config(command: Command, text: &str, overrides: &[(String, String)]) -> Result<CliConfig, ConfigError> {
    let specs = command.keys();
    let lookup = |k: &str, origin: Origin| {
        specs
            .iter()
            .find(|s| s.name == k)
            .ok_or_else(|| ConfigError::new(k, Some(origin), format!("unknown key for `{}`", command.name())))
    };

    let mut entries: BTreeMap<&'static str, Entry> = BTreeMap::new();
    for spec in &specs {
        if let Some(d) = spec.default {
            entries.insert(
                spec.name,
                Entry {
                    raw: d.to_string(),
                    origin: Origin::Default,
                    value: None,
                },
            );
        }
    }
    let mut set = |k: &str, v: &str, origin: Origin| -> Result<(), ConfigError> {
        let spec = lookup(k, origin)?;
        entries.insert(
            spec.name,
            Entry {
                raw: v.to_string(),
                origin,
                value: None,
            },
        );
        Ok(())
    };
    for (k, v, line) in read_lines(text)? {
        set(&k, &v, Origin::Line(line))?;
    }
    for (k, v) in overrides {
        set(k, v, Origin::Flag)?;
    }

    for spec in &specs {
        let Some(entry) = entries.get_mut(spec.name) else {
            return Err(ConfigError::new(spec.name, None, "missing required key"));
        };
        if entry.raw.is_empty() {
            if entry.origin == Origin::Default {
                continue;
            }
            return Err(ConfigError::new(spec.name, Some(entry.origin), "empty value"));
        }
        entry.value = Some(parse_value(spec, &entry.raw).map_err(|r| ConfigError::new(spec.name, Some(entry.origin), r))?);
    }

    let explicit: Vec<&str> = CARRIER_KEYS
        .iter()
        .copied()
        .filter(|k| entries.get(k).is_some_and(|e| e.value.is_some()))
        .collect();
    let carrier = match explicit.as_slice() {
        ["frequency_ghz"] => num(&entries, "frequency_ghz").and_then(|f| CarrierSpec::from_frequency(f).ok()),
        ["wavelength_m"] => num(&entries, "wavelength_m").and_then(|l| CarrierSpec::from_wavelength(l).ok()),
        [] => return Err(ConfigError::new("frequency_ghz", None, "missing required key (or give `wavelength_m`)")),
        _ => {
            let origin = entries.get("wavelength_m").map(|e| e.origin);
            return Err(ConfigError::new("wavelength_m", origin, "conflicts with `frequency_ghz`; give one"));
        }
    }
    .ok_or_else(|| ConfigError::new("frequency_ghz", None, "invalid carrier"))?;

    let cfg = CliConfig {
        command,
        entries,
        carrier,
    };
    cfg.cross_check()?;
    Ok(cfg)
}

fn num(entries: &BTreeMap<&'static str, Entry>, key: &str) -> Option<f64> {
    match entries.get(key).and_then(|e| e.value.as_ref()) {
        Some(Value::Number(v)) => Some(*v),
        _ => None,
    }
}

impl CliConfig {
    fn value(&self, key: &str) -> &Value {
        self.entries
            .get(key)
            .and_then(|e| e.value.as_ref())
            .unwrap_or_else(|| panic!("key `{key}` is not set for `{}`", self.command.name()))
    }

    fn error(&self, key: &str, reason: impl Into<String>) -> ConfigError {
        ConfigError::new(key, self.entries.get(key).map(|e| e.origin), reason)
    }

    /// Numeric value in SI units.
    pub fn number(&self, key: &str) -> f64 {
        match self.value(key) {
            Value::Number(v) => *v,
            other => panic!("key `{key}` is not numeric: {other:?}"),
        }
    }

    pub fn count(&self, key: &str) -> usize {
        match self.value(key) {
            Value::Count(v) => *v,
            other => panic!("key `{key}` is not a count: {other:?}"),
        }
    }

    pub fn counts(&self, key: &str) -> Vec<usize> {
        match self.value(key) {
            Value::Counts(v) => v.clone(),
            other => panic!("key `{key}` is not a list of counts: {other:?}"),
        }
    }

    pub fn reals(&self, key: &str) -> Vec<f64> {
        match self.value(key) {
            Value::Reals(v) => v.clone(),
            other => panic!("key `{key}` is not a list: {other:?}"),
        }
    }

    pub fn flag(&self, key: &str) -> bool {
        matches!(self.value(key), Value::Bool(true))
    }

    pub fn choice(&self, key: &str) -> &str {
        match self.value(key) {
            Value::Choice(v) => v,
            other => panic!("key `{key}` is not a choice: {other:?}"),
        }
    }

    /// `None` for an infinite focus.
    pub fn distance(&self, key: &str) -> Option<f64> {
        match self.value(key) {
            Value::Distance(v) => *v,
            Value::Number(v) => Some(*v),
            other => panic!("key `{key}` is not a distance: {other:?}"),
        }
    }

    pub fn count_or_all(&self, key: &str) -> Option<usize> {
        match self.value(key) {
            Value::CountOrAll(v) => *v,
            other => panic!("key `{key}` is not a count: {other:?}"),
        }
    }

    /// True when an optional key without a default was left unset.
    pub fn is_unset(&self, key: &str) -> bool {
        self.entries.get(key).is_none_or(|e| e.value.is_none())
    }

    pub fn seed(&self) -> u64 {
        match self.value("seed") {
            Value::Seed(s) => *s,
            other => panic!("seed is not a seed: {other:?}"),
        }
    }

    pub fn carrier(&self) -> CarrierSpec {
        self.carrier
    }

    /// Element spacing; half a wavelength unless `spacing_m` is given.
    pub fn spacing(&self) -> f64 {
        if self.is_unset("spacing_m") {
            self.carrier.wavelength() / 2.0
        } else {
            self.number("spacing_m")
        }
    }

    pub fn convention(&self) -> ApertureConvention {
        self.choice("aperture_convention").parse().expect("validated choice")
    }

    /// Constraints that involve more than one key.
    fn cross_check(&self) -> Result<(), ConfigError> {
        let ordered = |lo: &str, hi: &str| -> Result<(), ConfigError> {
            if self.entries.contains_key(lo) && self.number(lo) >= self.number(hi) {
                return Err(self.error(hi, format!("must exceed `{lo}`")));
            }
            Ok(())
        };
        match self.command {
            Command::Beampattern => {
                ordered("x_min_m", "x_max_m")?;
                ordered("z_min_m", "z_max_m")?;
            }
            Command::Depth => ordered("z_min_m", "z_max_m")?,
            Command::Localize | Command::Se => {
                ordered("angle_min_deg", "angle_max_deg")?;
                ordered("distance_min_m", "distance_max_m")?;
                if self.command == Command::Localize {
                    let sweep = self.choice("sweep");
                    if sweep != "none" && self.is_unset("sweep_values") {
                        return Err(self.error("sweep_values", format!("required when sweeping `{sweep}`")));
                    }
                }
            }
            Command::Cutline | Command::Design => {}
        }
        Ok(())
    }

    /// One-line rendering of every resolved key, in key order.
    pub fn describe(&self) -> String {
        let body: Vec<String> = self
            .entries
            .iter()
            .filter(|(_, e)| e.value.is_some())
            .map(|(k, e)| format!("{k}={}", e.raw.replace(' ', "")))
            .collect();
        format!("mla {} {}", self.command.name(), body.join(" "))
    }
}

/// Turns `--key value` / `--key=value` tokens into pairs. Dashes in keys
/// are accepted as underscores.
pub fn parse_overrides(tokens: &[String]) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    let mut it = tokens.iter();
    while let Some(tok) = it.next() {
        let Some(body) = tok.strip_prefix("--") else {
            return Err(ConfigError::new(tok, Some(Origin::Flag), "expected `--key value`"));
        };
        let (k, v) = match body.split_once('=') {
            Some((k, v)) => (k.to_string(), v.to_string()),
            None => {
                let v = it
                    .next()
                    .ok_or_else(|| ConfigError::new(body, Some(Origin::Flag), "missing value"))?;
                (body.to_string(), v.clone())
            }
        };
        out.push((k.replace('-', "_"), v));
    }
    Ok(out)
}
