//! Run configuration: flat `key = value` files layered under command-line
//! flags, then parsed and validated in one place.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ini::Ini;
use num_rational::Rational64;
use su3_lgt::evolution::{Observable, TrotterOrder};
use su3_lgt::local_plaquette::Encoding;
use su3_lgt::{LatticeGeometry, Truncation};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {message}")]
    Read { path: PathBuf, message: String },
    #[error("config sections are not supported, found [{0}]")]
    Section(String),
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("bad value `{value}` for `{key}`: {reason}")]
    Value { key: &'static str, value: String, reason: String },
    #[error("no subcommand given on the command line or in the config file")]
    MissingSubcommand,
}

pub const KEYS: &[&str] = &[
    "subcommand",
    "geometry",
    "trunc",
    "g",
    "tmax",
    "dt",
    "order",
    "scheme",
    "steps",
    "mode",
    "observable",
    "lambdas",
    "j_max",
    "kind",
    "encoding",
    "out",
    "format",
    "threads",
    "casimir_max",
];

const DEFAULTS: &[(&str, &str)] = &[
    ("geometry", "one"),
    ("trunc", "1"),
    ("g", "1"),
    ("tmax", "6"),
    ("dt", "0.005"),
    ("order", "2"),
    ("mode", "global"),
    ("observable", "mass_gap"),
    ("lambdas", "1..8"),
    ("j_max", "40"),
    ("kind", "vertices"),
    ("encoding", "qudit"),
    ("format", "csv"),
];

/// Raw settings in precedence order: defaults, then file, then flags.
#[derive(Clone, Debug, Default)]
pub struct Settings(BTreeMap<String, String>);

impl Settings {
    pub fn defaults() -> Self {
        Settings(DEFAULTS.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect())
    }

    pub fn merge_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let ini = Ini::load_from_file(path)
            .map_err(|e| ConfigError::Read { path: path.to_path_buf(), message: e.to_string() })?;
        for (section, props) in ini.iter() {
            if let Some(name) = section {
                return Err(ConfigError::Section(name.to_string()));
            }
            for (k, v) in props.iter() {
                self.set(k, v)?;
            }
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let key = key.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey(key));
        }
        self.0.insert(key, value.trim().to_string());
        Ok(())
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subcommand {
    Spectrum,
    Evolve,
    Converge,
    Count,
    Compile,
    Benchmark,
    Su2Tail,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Spectrum => "spectrum",
            Subcommand::Evolve => "evolve",
            Subcommand::Converge => "converge",
            Subcommand::Count => "count",
            Subcommand::Compile => "compile",
            Subcommand::Benchmark => "benchmark",
            Subcommand::Su2Tail => "su2-tail",
        }
    }
}

impl FromStr for Subcommand {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "spectrum" => Subcommand::Spectrum,
            "evolve" => Subcommand::Evolve,
            "converge" => Subcommand::Converge,
            "count" => Subcommand::Count,
            "compile" => Subcommand::Compile,
            "benchmark" => Subcommand::Benchmark,
            "su2-tail" | "su2_tail" => Subcommand::Su2Tail,
            _ => return Err("expected spectrum, evolve, converge, count, compile, benchmark or su2-tail".into()),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeometrySpec {
    One,
    Two,
    String(usize),
}

impl GeometrySpec {
    pub fn build(self) -> su3_lgt::Result<LatticeGeometry> {
        match self {
            GeometrySpec::One => Ok(LatticeGeometry::one_plaquette()),
            GeometrySpec::Two => Ok(LatticeGeometry::two_plaquette_pbc()),
            GeometrySpec::String(n) => LatticeGeometry::plaquette_string(n),
        }
    }
}

impl FromStr for GeometrySpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "one" | "one-plaquette" => Ok(GeometrySpec::One),
            "two" | "two-plaquette-pbc" => Ok(GeometrySpec::Two),
            _ => s
                .strip_prefix("string:")
                .and_then(|n| n.parse().ok())
                .filter(|n| *n > 0)
                .map(GeometrySpec::String)
                .ok_or_else(|| "expected one, two or string:N".into()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisMode {
    Global,
    Local,
    ColorParity,
}

impl FromStr for BasisMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "global" => Ok(BasisMode::Global),
            "local" => Ok(BasisMode::Local),
            "color-parity" | "color_parity" => Ok(BasisMode::ColorParity),
            _ => Err("expected global, local or color-parity".into()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountKind {
    Vertices,
    Plaquette,
    Fit,
}

impl FromStr for CountKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "vertices" => Ok(CountKind::Vertices),
            "plaquette" => Ok(CountKind::Plaquette),
            "fit" => Ok(CountKind::Fit),
            _ => Err("expected vertices, plaquette or fit".into()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err("expected csv or json".into()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub geometry: GeometrySpec,
    pub truncation: Truncation,
    pub couplings: Vec<f64>,
    pub mode: BasisMode,
    pub t_max: f64,
    pub dt: f64,
    pub order: TrotterOrder,
    pub scheme: Option<String>,
    pub steps: Option<usize>,
    pub observable: Observable,
    pub lambdas: Vec<u32>,
    pub j_max: usize,
    pub kind: CountKind,
    pub encoding: Encoding,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub threads: Option<usize>,
    /// Global cutoff on the summed link Casimir, applied before symmetry
    /// projection.
    pub casimir_max: Option<Rational64>,
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} geometry={:?} trunc={} g={:?}", self.subcommand.name(), self.geometry, self.truncation, self.couplings)
    }
}

fn parse<T: FromStr>(s: &Settings, key: &'static str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    let value = s.get(key).unwrap_or_default();
    value.parse().map_err(|e: T::Err| ConfigError::Value { key, value: value.to_string(), reason: e.to_string() })
}

fn bad(key: &'static str, value: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Value { key, value: value.to_string(), reason: reason.into() }
}

/// `a`, `a,b,c` or `start:stop:step` (inclusive of `stop` up to rounding).
fn parse_couplings(value: &str) -> Result<Vec<f64>, ConfigError> {
    let err = |r: &str| bad("g", value, r);
    let out: Vec<f64> = if let [a, b, h] = value.split(':').collect::<Vec<_>>()[..] {
        let (a, b, h): (f64, f64, f64) = (
            a.trim().parse().map_err(|_| err("bad range start"))?,
            b.trim().parse().map_err(|_| err("bad range stop"))?,
            h.trim().parse().map_err(|_| err("bad range step"))?,
        );
        if !(h > 0.0 && b >= a) {
            return Err(err("range needs step > 0 and stop >= start"));
        }
        let n = ((b - a) / h + 1e-9).floor() as usize;
        (0..=n).map(|k| a + k as f64 * h).collect()
    } else {
        value.split(',').map(|t| t.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| err("not a number"))?
    };
    if out.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
        return Err(err("couplings must be positive and finite"));
    }
    Ok(out)
}

/// `a..b` (inclusive) or `a,b,c`.
fn parse_lambdas(value: &str) -> Result<Vec<u32>, ConfigError> {
    let err = || bad("lambdas", value, "expected a..b or a comma list of cutoffs");
    let mut out: Vec<u32> = match value.split_once("..") {
        Some((a, b)) => {
            let (a, b): (u32, u32) = (a.trim().parse().map_err(|_| err())?, b.trim().parse().map_err(|_| err())?);
            (a..=b).collect()
        }
        None => value.split(',').map(|t| t.trim().parse()).collect::<Result<_, _>>().map_err(|_| err())?,
    };
    out.sort_unstable();
    out.dedup();
    if out.is_empty() {
        return Err(err());
    }
    Ok(out)
}

fn parse_observable(value: &str) -> Result<Observable, ConfigError> {
    Ok(match value {
        "mass_gap" => Observable::MassGap,
        "mass_gap_c_even" => Observable::MassGapColorEven,
        "plaquette_vev" => Observable::PlaquetteVev,
        other => match other.strip_prefix("electric_energy@").and_then(|t| t.parse::<f64>().ok()) {
            Some(t) if t >= 0.0 => Observable::ElectricEnergyAt(t),
            _ => {
                return Err(bad(
                    "observable",
                    value,
                    "expected mass_gap, mass_gap_c_even, plaquette_vev or electric_energy@T",
                ))
            }
        },
    })
}

impl RunConfig {
    pub fn from_settings(s: &Settings) -> Result<Self, ConfigError> {
        let subcommand = match s.get("subcommand") {
            Some(v) => v.parse().map_err(|e: String| bad("subcommand", v, e))?,
            None => return Err(ConfigError::MissingSubcommand),
        };
        let order = match parse::<u32>(s, "order")? {
            1 => TrotterOrder::First,
            2 => TrotterOrder::Second,
            _ => return Err(bad("order", s.get("order").unwrap_or_default(), "expected 1 or 2")),
        };
        let encoding = match s.get("encoding").unwrap_or_default() {
            "qudit" => Encoding::SingleQudit,
            "pq" => Encoding::PqPair,
            v => return Err(bad("encoding", v, "expected qudit or pq")),
        };
        let t_max: f64 = parse(s, "tmax")?;
        let dt: f64 = parse(s, "dt")?;
        if !(t_max.is_finite() && t_max >= 0.0) {
            return Err(bad("tmax", s.get("tmax").unwrap_or_default(), "must be finite and non-negative"));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(bad("dt", s.get("dt").unwrap_or_default(), "must be positive"));
        }
        let steps = match s.get("steps") {
            Some(v) => Some(v.parse::<usize>().ok().filter(|n| *n > 0).ok_or_else(|| bad("steps", v, "positive integer"))?),
            None => None,
        };
        let threads = match s.get("threads") {
            Some(v) => Some(v.parse::<usize>().ok().filter(|n| *n > 0).ok_or_else(|| bad("threads", v, "positive integer"))?),
            None => None,
        };
        let trunc_raw = s.get("trunc").unwrap_or_default();
        let truncation = trunc_raw.parse::<Truncation>().map_err(|e| bad("trunc", trunc_raw, e.to_string()))?;
        let j_max: usize = parse(s, "j_max")?;
        let casimir_max = match s.get("casimir_max").filter(|v| !v.is_empty()) {
            Some(v) => Some(
                v.parse::<Rational64>()
                    .ok()
                    .filter(|c| *c >= Rational64::from(0))
                    .ok_or_else(|| bad("casimir_max", v, "expected a non-negative rational such as 25/3"))?,
            ),
            None => None,
        };
        Ok(RunConfig {
            subcommand,
            geometry: parse(s, "geometry")?,
            truncation,
            couplings: parse_couplings(s.get("g").unwrap_or_default())?,
            mode: parse(s, "mode")?,
            t_max,
            dt,
            order,
            scheme: s.get("scheme").filter(|v| !v.is_empty()).map(str::to_string),
            steps,
            observable: parse_observable(s.get("observable").unwrap_or_default())?,
            lambdas: parse_lambdas(s.get("lambdas").unwrap_or_default())?,
            j_max,
            kind: parse(s, "kind")?,
            encoding,
            out: s.get("out").filter(|v| !v.is_empty() && *v != "-").map(PathBuf::from),
            format: parse(s, "format")?,
            threads,
            casimir_max,
        })
    }
}
