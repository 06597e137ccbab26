use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::catalog::{self, CatalogEntry};
use crate::banach::{Exponent, SpaceDescriptor, SpaceKind};
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    #[default]
    Both,
}

impl OutputFormat {
    pub fn json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }

    pub fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "both" => Ok(OutputFormat::Both),
            _ => Err(Error::InvalidArgument(format!(
                "unknown format {s:?}; expected json, csv or both"
            ))),
        }
    }
}

/// Space of an entry, as written in a manifest. Same keys as a serialized
/// space descriptor; `exponent` defaults to 2, or `"inf"` for `SampledSup`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub kind: SpaceKind,
    pub dim: usize,
    #[serde(default)]
    pub exponent: Option<Exponent>,
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
}

impl SpaceSpec {
    pub fn build(&self) -> Result<SpaceDescriptor> {
        let r = match (self.kind, self.exponent) {
            (_, Some(r)) => r,
            (SpaceKind::SampledSup, None) => Exponent::Infinity,
            (_, None) => Exponent::Finite(2.0),
        };
        SpaceDescriptor::new(self.kind, self.dim, r, self.weights.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntrySpec {
    pub op: String,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub space: Option<SpaceSpec>,
    #[serde(default)]
    pub sample: Option<String>,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default)]
    pub thresholds: BTreeMap<String, f64>,
}

impl EntrySpec {
    pub fn new(op: &str) -> Self {
        EntrySpec {
            op: op.into(),
            name: None,
            space: None,
            sample: None,
            params: Map::new(),
            thresholds: BTreeMap::new(),
        }
    }

    pub fn entry_name(&self) -> &str {
        self.name.as_deref().unwrap_or(&self.op)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub suite: Vec<EntrySpec>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("sobolev-banach-out")
}

fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

/// Shape check of a parameter value against its documented default.
fn compatible(default: &str, value: &Value) -> bool {
    let scalar = value.is_number() || value.as_str() == Some("inf");
    match serde_json::from_str::<Value>(default) {
        Ok(Value::Number(_)) => scalar,
        Ok(Value::Array(_)) => value.is_array() || scalar,
        _ => true,
    }
}

fn config_error(at: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config {
        pointer: at.to_string(),
        message: msg.to_string(),
    }
}

impl RunConfig {
    /// Every entry of the catalog with its default parameters.
    pub fn default_suite(seed: u64) -> Self {
        RunConfig {
            schema_version: SCHEMA_VERSION,
            seed,
            output_dir: default_output_dir(),
            format: OutputFormat::Both,
            workers: None,
            suite: catalog::CATALOG.iter().map(|e| EntrySpec::new(e.op)).collect(),
        }
    }

    /// Parses and validates a manifest; errors carry a JSON pointer.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let at = pointer(e.path());
            config_error(&at, e.into_inner())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(config_error(
                "/schema_version",
                format!(
                    "unsupported schema version {}; expected {SCHEMA_VERSION}",
                    self.schema_version
                ),
            ));
        }
        if self.workers == Some(0) {
            return Err(config_error("/workers", "worker count must be positive"));
        }
        let mut seen = BTreeMap::new();
        for (i, e) in self.suite.iter().enumerate() {
            let entry: &CatalogEntry = catalog::lookup(&e.op)
                .ok_or_else(|| config_error(&format!("/suite/{i}/op"), format!("unknown op {:?}", e.op)))?;
            if let Some(prev) = seen.insert(e.entry_name().to_string(), i) {
                return Err(config_error(
                    &format!("/suite/{i}/name"),
                    format!("entry name {:?} already used by /suite/{prev}", e.entry_name()),
                ));
            }
            for (key, value) in &e.params {
                let at = format!("/suite/{i}/params/{key}");
                let spec = entry
                    .params
                    .iter()
                    .find(|p| p.name == key)
                    .ok_or_else(|| config_error(&at, format!("{} takes no parameter {key:?}", e.op)))?;
                if !compatible(spec.default, value) {
                    return Err(config_error(&at, format!("expected a value like {}", spec.default)));
                }
            }
            for key in e.thresholds.keys() {
                if !entry.metrics.iter().any(|m| m.name == key) {
                    return Err(config_error(
                        &format!("/suite/{i}/thresholds/{key}"),
                        format!("{} reports no metric {key:?}", e.op),
                    ));
                }
            }
            if let Some(sp) = &e.space {
                sp.build()
                    .map_err(|err| config_error(&format!("/suite/{i}/space"), err))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_manifest() {
        let cfg = RunConfig::from_json_str(r#"{"schema_version": 1, "suite": []}"#).unwrap();
        assert!(cfg.suite.is_empty());
        assert_eq!(cfg.format, OutputFormat::Both);
    }

    #[test]
    fn errors_carry_pointers() {
        let bad = r#"{"schema_version": 1, "suite": [{"op": "poincare_check", "params": {"n": "x"}}]}"#;
        let e = RunConfig::from_json_str(bad).unwrap_err();
        assert!(
            matches!(&e, Error::Config { pointer, .. } if pointer == "/suite/0/params/n"),
            "{e}"
        );
        let bad = r#"{"schema_version": 1, "suite": [{"op": "nope"}]}"#;
        assert!(
            matches!(RunConfig::from_json_str(bad).unwrap_err(), Error::Config { pointer, .. } if pointer == "/suite/0/op")
        );
        let bad =
            r#"{"schema_version": 1, "suite": [{"op": "poincare_check", "space": {"kind": "Hilbert", "dim": "2"}}]}"#;
        assert!(
            matches!(RunConfig::from_json_str(bad).unwrap_err(), Error::Config { pointer, .. } if pointer == "/suite/0/space/dim")
        );
        let bad = r#"{"schema_version": 2}"#;
        assert!(
            matches!(RunConfig::from_json_str(bad).unwrap_err(), Error::Config { pointer, .. } if pointer == "/schema_version")
        );
        let bad = r#"{"schema_version": 1, "suite": [{"op": "poincare_check"}, {"op": "poincare_check"}]}"#;
        assert!(
            matches!(RunConfig::from_json_str(bad).unwrap_err(), Error::Config { pointer, .. } if pointer == "/suite/1/name")
        );
        let bad = r#"{"schema_version": 1, "suite": [{"op": "poincare_check", "thresholds": {"bogus": 1}}]}"#;
        assert!(
            matches!(RunConfig::from_json_str(bad).unwrap_err(), Error::Config { pointer, .. } if pointer == "/suite/0/thresholds/bogus")
        );
        let bad = r#"{"schema_version": 1, "seed": -3}"#;
        assert!(
            matches!(RunConfig::from_json_str(bad).unwrap_err(), Error::Config { pointer, .. } if pointer == "/seed")
        );
    }

    #[test]
    fn default_suite_validates_and_round_trips() {
        let cfg = RunConfig::default_suite(42);
        cfg.validate().unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::from_json_str(&text).unwrap(), cfg);
    }
}
