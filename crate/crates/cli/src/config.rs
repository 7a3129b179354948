//! Flat `[section]` / `key = value` configuration with unit suffixes.
//!
//! Layers are merged in order: built-in defaults, preset, config file,
//! environment. Setting a key in a later layer drops any mutually exclusive
//! partner set by an earlier one; setting both partners in the same layer is
//! an error.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Map, Value as Json};

use crate::error::{CliError, CliResult};

/// Prefix of environment variables that override config keys.
pub const ENV_PREFIX: &str = "TOA_SIM_";

/// Environment variables with the prefix that belong to command-line flags.
pub const FLAG_ENV: [&str; 4] = ["CONFIG", "OUT", "THREADS", "PRESET"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim {
    Length,
    Time,
    Rate,
    Wavenumber,
    Velocity,
    Mass,
    Pure,
}

impl Dim {
    fn si(self) -> &'static str {
        match self {
            Dim::Length => "m",
            Dim::Time => "s",
            Dim::Rate => "1/s",
            Dim::Wavenumber => "1/m",
            Dim::Velocity => "m/s",
            Dim::Mass => "kg",
            Dim::Pure => "",
        }
    }

    fn units(self) -> &'static [(&'static str, f64)] {
        match self {
            Dim::Length => &[
                ("m", 1.0),
                ("cm", 1e-2),
                ("mm", 1e-3),
                ("um", 1e-6),
                ("µm", 1e-6),
                ("nm", 1e-9),
                ("pm", 1e-12),
            ],
            Dim::Time => &[
                ("s", 1.0),
                ("ms", 1e-3),
                ("us", 1e-6),
                ("µs", 1e-6),
                ("ns", 1e-9),
            ],
            Dim::Rate => &[
                ("/s", 1.0),
                ("/ms", 1e3),
                ("/us", 1e6),
                ("/µs", 1e6),
                ("/ns", 1e9),
            ],
            Dim::Wavenumber => &[
                ("/m", 1.0),
                ("/cm", 1e2),
                ("/mm", 1e3),
                ("/um", 1e6),
                ("/µm", 1e6),
                ("/nm", 1e9),
            ],
            Dim::Velocity => &[
                ("m/s", 1.0),
                ("cm/s", 1e-2),
                ("mm/s", 1e-3),
                ("um/s", 1e-6),
                ("µm/s", 1e-6),
            ],
            Dim::Mass => &[("kg", 1.0), ("g", 1e-3), ("u", 1.660_539_066_60e-27)],
            Dim::Pure => &[],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Number(Dim),
    List(Dim),
    Count,
    Flag,
    Text,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    List(Vec<f64>),
    Count(usize),
    Flag(bool),
    Text(String),
}

pub struct Key {
    pub section: &'static str,
    pub name: &'static str,
    pub kind: Kind,
    pub help: &'static str,
}

const fn key(section: &'static str, name: &'static str, kind: Kind, help: &'static str) -> Key {
    Key {
        section,
        name,
        kind,
        help,
    }
}

use Dim::*;
use Kind::{Count, Flag, List, Number, Text};

pub const KEYS: &[Key] = &[
    key("params", "mass", Number(Mass), "atomic mass"),
    key("params", "rabi", Number(Rate), "Rabi frequency Ω"),
    key("params", "gamma", Number(Rate), "decay rate γ"),
    key(
        "params",
        "laser_detuning",
        Number(Rate),
        "laser detuning Δ_L",
    ),
    key(
        "params",
        "laser_wavenumber",
        Number(Wavenumber),
        "laser wavenumber k_L along y",
    ),
    key("packet", "x0", Number(Length), "initial centre x"),
    key("packet", "y0", Number(Length), "initial centre y"),
    key("packet", "dx", Number(Length), "position width Δx"),
    key("packet", "dy", Number(Length), "position width Δy"),
    key(
        "packet",
        "sigma_kx",
        Number(Wavenumber),
        "momentum width 1/(2Δx)",
    ),
    key(
        "packet",
        "sigma_ky",
        Number(Wavenumber),
        "momentum width 1/(2Δy)",
    ),
    key(
        "packet",
        "kx0",
        Number(Wavenumber),
        "mean wavenumber along x",
    ),
    key(
        "packet",
        "ky0",
        Number(Wavenumber),
        "mean wavenumber along y",
    ),
    key("packet", "vx0", Number(Velocity), "mean velocity along x"),
    key("packet", "vy0", Number(Velocity), "mean velocity along y"),
    key(
        "quadrature",
        "n_kx",
        Count,
        "Gauss-Legendre nodes along k_x",
    ),
    key(
        "quadrature",
        "n_ky",
        Count,
        "Gauss-Legendre nodes along k_y",
    ),
    key(
        "quadrature",
        "span_sigmas",
        Number(Pure),
        "half-width of the k boxes in momentum widths",
    ),
    key("quadrature", "t_start", Number(Time), "first sample time"),
    key("quadrature", "t_end", Number(Time), "last sample time"),
    key(
        "quadrature",
        "n_times",
        Count,
        "number of uniform sample times",
    ),
    key(
        "quadrature",
        "allow_truncation",
        Flag,
        "skip the negative-momentum guard",
    ),
    key("run", "model", Text, "toa model: 2d or 1d"),
    key(
        "scan",
        "vy",
        List(Velocity),
        "transverse velocities for eigen",
    ),
    key(
        "scan",
        "vy_min",
        Number(Velocity),
        "start of a uniform v_y scan",
    ),
    key(
        "scan",
        "vy_max",
        Number(Velocity),
        "end of a uniform v_y scan",
    ),
    key("scan", "n_vy", Count, "points of a uniform v_y scan"),
    key(
        "family",
        "dy",
        List(Length),
        "transverse widths compared with the 1D model",
    ),
    key(
        "family",
        "vy",
        List(Velocity),
        "transverse velocities compared with the 1D model",
    ),
    key(
        "family",
        "compensate",
        Flag,
        "also run each v_y with Δ_L shifted by its kinetic detuning",
    ),
    key("grid", "x_min", Number(Length), "grid box"),
    key("grid", "x_max", Number(Length), "grid box"),
    key("grid", "y_min", Number(Length), "grid box"),
    key("grid", "y_max", Number(Length), "grid box"),
    key("grid", "n_x", Count, "grid points along x"),
    key("grid", "n_y", Count, "grid points along y"),
    key("grid", "dt", Number(Time), "time step"),
    key("grid", "t_end", Number(Time), "propagation time"),
    key("grid", "n_steps", Count, "number of steps"),
    key(
        "grid",
        "monitor_every",
        Count,
        "steps between boundary-density checks",
    ),
    key("grid", "output_every", Count, "steps between output rows"),
    key(
        "deconv",
        "input",
        Text,
        "toa CSV to deconvolve; empty computes Π first",
    ),
    key("deconv", "epsilon", Number(Pure), "Wiener regularization"),
];

/// Pairs of keys that describe the same quantity.
pub const EXCLUSIVE: &[(&str, &str, &str)] = &[
    ("packet", "dx", "sigma_kx"),
    ("packet", "dy", "sigma_ky"),
    ("packet", "kx0", "vx0"),
    ("packet", "ky0", "vy0"),
    ("scan", "vy", "vy_min"),
    ("scan", "vy", "vy_max"),
    ("scan", "vy", "n_vy"),
    ("family", "dy", "vy"),
    ("grid", "t_end", "n_steps"),
];

fn lookup(section: &str, name: &str) -> Option<&'static Key> {
    KEYS.iter().find(|k| k.section == section && k.name == name)
}

fn is_section(section: &str) -> bool {
    KEYS.iter().any(|k| k.section == section)
}

fn partners<'a>(section: &'a str, name: &'a str) -> impl Iterator<Item = &'static str> + 'a {
    EXCLUSIVE.iter().filter_map(move |&(s, a, b)| {
        if s != section {
            None
        } else if a == name {
            Some(b)
        } else if b == name {
            Some(a)
        } else {
            None
        }
    })
}

/// Parses `1.5e-3`, `0.24 um`, `9cm/s`, `1.67e8 1/s`.
pub fn parse_quantity(text: &str, dim: Dim) -> Result<f64, String> {
    let text = text.trim();
    let split = text
        .find(|c: char| !(c.is_ascii_digit() || "+-.eE".contains(c)))
        .unwrap_or(text.len());
    let (num, unit) = text.split_at(split);
    let value: f64 = num
        .parse()
        .map_err(|_| format!("`{text}` is not a number"))?;
    let unit = unit.trim().replace('μ', "µ");
    let unit = unit
        .strip_prefix('1')
        .filter(|u| u.starts_with('/'))
        .unwrap_or(&unit);
    let scale = if unit.is_empty() {
        1.0
    } else {
        dim.units()
            .iter()
            .find(|(u, _)| *u == unit)
            .map(|(_, s)| *s)
            .ok_or_else(|| {
                let allowed: Vec<&str> = dim.units().iter().map(|(u, _)| *u).collect();
                if allowed.is_empty() {
                    format!("`{text}` takes no unit")
                } else {
                    format!(
                        "unknown unit `{unit}` in `{text}`; expected one of {}",
                        allowed.join(", ")
                    )
                }
            })?
    };
    let v = decimal_shift(num, scale).unwrap_or(value * scale);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{text}` is not finite"))
    }
}

/// For a power-of-ten `scale`, reparses `num` with a shifted exponent so that
/// `60 us` and `60e-6` give the same bits.
fn decimal_shift(num: &str, scale: f64) -> Option<f64> {
    let shift = scale.log10().round() as i32;
    if (10f64.powi(shift) / scale - 1.0).abs() > 1e-12 {
        return None;
    }
    let (mantissa, exp) = match num.find(['e', 'E']) {
        Some(i) => (&num[..i], num[i + 1..].parse::<i32>().ok()?),
        None => (num, 0),
    };
    format!("{mantissa}e{}", exp + shift).parse().ok()
}

fn parse_count(text: &str) -> Result<usize, String> {
    let text = text.trim();
    if let Ok(n) = text.parse::<usize>() {
        return Ok(n);
    }
    match text.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v < 1e15 => Ok(v as usize),
        _ => Err(format!("`{text}` is not a non-negative integer")),
    }
}

fn parse_value(k: &Key, text: &str) -> Result<Value, String> {
    Ok(match k.kind {
        Number(d) => Value::Number(parse_quantity(text, d)?),
        List(d) => Value::List(
            text.split(',')
                .map(|item| parse_quantity(item, d))
                .collect::<Result<_, _>>()?,
        ),
        Count => Value::Count(parse_count(text)?),
        Flag => Value::Flag(match text.trim() {
            "true" | "yes" | "on" | "1" => true,
            "false" | "no" | "off" | "0" => false,
            other => return Err(format!("`{other}` is not a boolean")),
        }),
        Text => Value::Text(text.trim().to_owned()),
    })
}

/// One source of settings, keyed by section then key.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Layer {
    values: BTreeMap<(String, String), Value>,
    origin: String,
}

impl Layer {
    fn new(origin: &str) -> Self {
        Layer {
            values: BTreeMap::new(),
            origin: origin.to_owned(),
        }
    }

    fn set(&mut self, section: &str, name: &str, value: Value, at: &str) -> CliResult<()> {
        let slot = (section.to_owned(), name.to_owned());
        if self.values.contains_key(&slot) {
            return Err(CliError::config(format!(
                "{at}: key `{section}.{name}` given twice"
            )));
        }
        self.values.insert(slot, value);
        Ok(())
    }

    fn set_text(&mut self, section: &str, name: &str, text: &str, at: &str) -> CliResult<()> {
        let k = lookup(section, name).ok_or_else(|| unknown_key(section, name, at))?;
        let v = parse_value(k, text)
            .map_err(|e| CliError::config(format!("{at}: `{section}.{name}`: {e}")))?;
        self.set(section, name, v, at)
    }

    fn check_exclusive(&self) -> CliResult<()> {
        for &(s, a, b) in EXCLUSIVE {
            let has = |n: &str| self.values.contains_key(&(s.to_owned(), n.to_owned()));
            if has(a) && has(b) {
                return Err(CliError::config(format!(
                    "{}: `{s}.{a}` and `{s}.{b}` are mutually exclusive",
                    self.origin
                )));
            }
        }
        Ok(())
    }

    /// `[section]` headers, `key = value` lines, `#` comments.
    pub fn parse_text(src: &str, origin: &str) -> CliResult<Self> {
        let mut layer = Layer::new(origin);
        let mut section: Option<String> = None;
        for (i, raw) in src.lines().enumerate() {
            let at = format!("{origin}:{}", i + 1);
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim();
                if !is_section(name) {
                    return Err(CliError::config(format!("{at}: unknown section [{name}]")));
                }
                section = Some(name.to_owned());
                continue;
            }
            let (name, text) = line
                .split_once('=')
                .ok_or_else(|| CliError::config(format!("{at}: expected `key = value`")))?;
            let sec = section
                .as_deref()
                .ok_or_else(|| CliError::config(format!("{at}: key outside a [section]")))?;
            layer.set_text(sec, name.trim(), text, &at)?;
        }
        layer.check_exclusive()?;
        Ok(layer)
    }

    /// A JSON object of sections, or a sidecar whose `config` member is one.
    pub fn parse_json(src: &str, origin: &str) -> CliResult<Self> {
        let doc: Json = serde_json::from_str(src)
            .map_err(|e| CliError::config(format!("{origin}: invalid JSON: {e}")))?;
        let root = doc.get("config").unwrap_or(&doc);
        let sections = root
            .as_object()
            .ok_or_else(|| CliError::config(format!("{origin}: expected a JSON object")))?;
        let mut layer = Layer::new(origin);
        for (sec, entries) in sections {
            if !is_section(sec) {
                return Err(CliError::config(format!(
                    "{origin}: unknown section [{sec}]"
                )));
            }
            let entries = entries.as_object().ok_or_else(|| {
                CliError::config(format!("{origin}: section [{sec}] is not an object"))
            })?;
            for (name, v) in entries {
                let k = lookup(sec, name).ok_or_else(|| unknown_key(sec, name, origin))?;
                let bad =
                    || CliError::config(format!("{origin}: `{sec}.{name}` has the wrong type"));
                let value = match (k.kind, v) {
                    (_, Json::String(s)) => parse_value(k, s)
                        .map_err(|e| CliError::config(format!("{origin}: `{sec}.{name}`: {e}")))?,
                    (Number(_), Json::Number(n)) => Value::Number(n.as_f64().ok_or_else(bad)?),
                    (Count, Json::Number(n)) => Value::Count(n.as_u64().ok_or_else(bad)? as usize),
                    (Flag, Json::Bool(b)) => Value::Flag(*b),
                    (List(_), Json::Array(items)) => Value::List(
                        items
                            .iter()
                            .map(|i| i.as_f64().ok_or_else(bad))
                            .collect::<CliResult<_>>()?,
                    ),
                    _ => return Err(bad()),
                };
                layer.set(sec, name, value, origin)?;
            }
        }
        layer.check_exclusive()?;
        Ok(layer)
    }

    /// `TOA_SIM_<SECTION>_<KEY>` variables, e.g. `TOA_SIM_PARAMS_GAMMA`.
    pub fn from_env<I: IntoIterator<Item = (String, String)>>(vars: I) -> CliResult<Self> {
        let mut layer = Layer::new("environment");
        let mut vars: Vec<_> = vars
            .into_iter()
            .filter(|(k, _)| k.starts_with(ENV_PREFIX))
            .collect();
        vars.sort();
        for (var, text) in vars {
            let rest = &var[ENV_PREFIX.len()..];
            if FLAG_ENV.contains(&rest) {
                continue;
            }
            let lower = rest.to_ascii_lowercase();
            let slot = KEYS
                .iter()
                .find(|k| lower == format!("{}_{}", k.section, k.name));
            let k = slot.ok_or_else(|| {
                CliError::config(format!("environment: `{var}` does not name a config key"))
            })?;
            layer.set_text(k.section, k.name, &text, &var)?;
        }
        layer.check_exclusive()?;
        Ok(layer)
    }
}

fn unknown_key(section: &str, name: &str, at: &str) -> CliError {
    CliError::config(format!("{at}: unknown key `{name}` in section [{section}]"))
}

/// Fully merged settings.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<(String, String), Value>,
}

impl Config {
    pub fn merge(&mut self, layer: Layer) {
        for ((sec, name), v) in layer.values {
            for other in partners(&sec, &name) {
                self.values.remove(&(sec.clone(), other.to_owned()));
            }
            self.values.insert((sec, name), v);
        }
    }

    fn get(&self, section: &str, name: &str) -> Option<&Value> {
        self.values.get(&(section.to_owned(), name.to_owned()))
    }

    pub fn has(&self, section: &str, name: &str) -> bool {
        self.get(section, name).is_some()
    }

    fn missing(section: &str, name: &str) -> CliError {
        CliError::config(format!("missing key `{name}` in section [{section}]"))
    }

    pub fn opt_number(&self, section: &str, name: &str) -> Option<f64> {
        match self.get(section, name) {
            Some(Value::Number(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn number(&self, section: &str, name: &str) -> CliResult<f64> {
        self.opt_number(section, name)
            .ok_or_else(|| Self::missing(section, name))
    }

    pub fn opt_count(&self, section: &str, name: &str) -> Option<usize> {
        match self.get(section, name) {
            Some(Value::Count(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn count(&self, section: &str, name: &str) -> CliResult<usize> {
        self.opt_count(section, name)
            .ok_or_else(|| Self::missing(section, name))
    }

    pub fn flag(&self, section: &str, name: &str) -> bool {
        matches!(self.get(section, name), Some(Value::Flag(true)))
    }

    pub fn text(&self, section: &str, name: &str) -> Option<&str> {
        match self.get(section, name) {
            Some(Value::Text(s)) => Some(s),
            _ => None,
        }
    }

    pub fn list(&self, section: &str, name: &str) -> Option<&[f64]> {
        match self.get(section, name) {
            Some(Value::List(v)) => Some(v),
            _ => None,
        }
    }

    /// Resolved settings in SI units, loadable again with `--config`.
    pub fn to_json(&self) -> Json {
        let mut root = Map::new();
        for ((sec, name), v) in &self.values {
            let entry = root
                .entry(sec.clone())
                .or_insert_with(|| Json::Object(Map::new()));
            let j = match v {
                Value::Number(x) => json!(x),
                Value::List(xs) => json!(xs),
                Value::Count(n) => json!(n),
                Value::Flag(b) => json!(b),
                Value::Text(s) => json!(s),
            };
            entry
                .as_object_mut()
                .expect("section object")
                .insert(name.clone(), j);
        }
        Json::Object(root)
    }
}

/// Key reference for `--help`.
pub fn key_reference() -> String {
    let mut out = String::from("Config keys (SI unless a unit suffix is given):\n");
    let mut section = "";
    for k in KEYS {
        if k.section != section {
            section = k.section;
            let _ = writeln!(out, "  [{section}]");
        }
        let kind = match k.kind {
            Number(d) if d.si().is_empty() => "number".to_owned(),
            Number(d) => format!("number, {}", d.si()),
            List(d) => format!("comma list, {}", d.si()),
            Count => "integer".to_owned(),
            Flag => "true/false".to_owned(),
            Text => "text".to_owned(),
        };
        let _ = writeln!(out, "    {:<18} {:<22} {}", k.name, kind, k.help);
    }
    out.push_str("Mutually exclusive: ");
    let pairs: Vec<String> = EXCLUSIVE
        .iter()
        .map(|(s, a, b)| format!("{s}.{a}/{b}"))
        .collect();
    out.push_str(&pairs.join(", "));
    out.push_str("\nUnit suffixes:\n");
    for d in [Length, Time, Rate, Wavenumber, Velocity, Mass] {
        let units: Vec<&str> = d.units().iter().map(|(u, _)| *u).collect();
        let _ = writeln!(out, "    {:<12} {}", d.si(), units.join(" "));
    }
    out.push_str("    Rates and wavenumbers also accept the 1/ form, e.g. 1/s, 1/um.\n");
    out.push_str("Numbers accept scientific notation, e.g. 1.67e8 or 2e-10 m.\n");
    out
}
