//! Scenario files: a single scenario object, or `{"scenarios": [...]}`.

use std::fmt;
use std::path::Path;

use serde::de::{self, MapAccess, SeqAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;
use tsverify_core::{Box3, Function3, TimeScale};

use crate::generate::{Family, GeneratorSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid `{field}`{}: {message}", at_line(*.line))]
    Validation {
        field: String,
        line: Option<usize>,
        message: String,
    },
}

fn at_line(line: Option<usize>) -> String {
    line.map(|l| format!(" (line {l})")).unwrap_or_default()
}

impl ConfigError {
    fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Validation {
            field: field.into(),
            line: None,
            message: message.into(),
        }
    }
}

/// A check a scenario can request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Identities,
    AveragedIdentity,
    Ostrowski,
    Cebysev,
    Classical,
    Convergence,
    Discrete,
}

impl Check {
    pub const ALL: [Check; 7] = [
        Check::Identities,
        Check::AveragedIdentity,
        Check::Ostrowski,
        Check::Cebysev,
        Check::Classical,
        Check::Convergence,
        Check::Discrete,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Identities => "identities",
            Check::AveragedIdentity => "averaged_identity",
            Check::Ostrowski => "ostrowski",
            Check::Cebysev => "cebysev",
            Check::Classical => "classical",
            Check::Convergence => "convergence",
            Check::Discrete => "discrete",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Absolute slack for inequality margins; `None` uses `1e-9 (1 + |rhs|)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_abs: Option<f64>,
    /// Bound on normalized identity residuals.
    #[serde(default = "default_tol_rel")]
    pub tol_rel: f64,
}

fn default_tol_rel() -> f64 {
    1e-9
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol_abs: None,
            tol_rel: default_tol_rel(),
        }
    }
}

/// Either explicit literals or a seeded generator.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum FunctionSource {
    Literals(Vec<Function3>),
    Generator(GeneratorSpec),
}

impl<'de> Deserialize<'de> for FunctionSource {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = FunctionSource;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a list of function literals or a generator object")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Self::Value, A::Error> {
                let mut out = Vec::new();
                while let Some(f) = seq.next_element::<Function3>()? {
                    out.push(f);
                }
                Ok(FunctionSource::Literals(out))
            }

            fn visit_map<A: MapAccess<'de>>(self, map: A) -> Result<Self::Value, A::Error> {
                GeneratorSpec::deserialize(de::value::MapAccessDeserializer::new(map)).map(FunctionSource::Generator)
            }
        }
        d.deserialize_any(V)
    }
}

fn default_max_level() -> u32 {
    4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub scales: [TimeScale; 3],
    pub lo: [f64; 3],
    pub hi: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<[f64; 3]>,
    pub functions: FunctionSource,
    pub checks: Vec<Check>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_max_level")]
    pub max_level: u32,
}

impl ScenarioConfig {
    pub fn domain(&self) -> tsverify_core::Result<Box3> {
        Box3::new(self.scales.clone(), self.lo, self.hi, self.base)
    }

    /// Checks scale memberships and generator settings; `prefix` is the
    /// field path of this scenario in the file.
    pub fn validate(&self, prefix: &str) -> Result<(), ConfigError> {
        let field = |name: String| {
            if prefix.is_empty() {
                name
            } else {
                format!("{prefix}.{name}")
            }
        };
        for axis in 0..3 {
            let ts = &self.scales[axis];
            for (key, v) in [
                ("lo", Some(self.lo[axis])),
                ("hi", Some(self.hi[axis])),
                ("base", self.base.map(|b| b[axis])),
            ] {
                if let Some(v) = v {
                    if !ts.contains(v) {
                        return Err(ConfigError::field(
                            field(format!("{key}[{axis}]")),
                            format!("{v} is not a point of scales[{axis}]"),
                        ));
                    }
                }
            }
        }
        if let Err(e) = self.domain() {
            let key = match e {
                tsverify_core::Error::ReversedInterval { .. } => "hi",
                _ => "base",
            };
            return Err(ConfigError::field(field(key.into()), e.to_string()));
        }
        if self.checks.is_empty() {
            return Err(ConfigError::field(
                field("checks".into()),
                "at least one check is required",
            ));
        }
        if let FunctionSource::Generator(g) = &self.functions {
            if g.seed.is_none() {
                return Err(ConfigError::field(
                    field("functions.seed".into()),
                    "a seed is required for generated functions",
                ));
            }
            if g.family.parse::<Family>().is_err() {
                return Err(ConfigError::field(
                    field("functions.family".into()),
                    format!("unknown family `{}`, expected `poly` or `trigprod`", g.family),
                ));
            }
            let [a, b] = g.coefficient_range;
            if !(a.is_finite() && b.is_finite() && a <= b) {
                return Err(ConfigError::field(
                    field("functions.coefficient_range".into()),
                    "must be a finite interval [lo, hi] with lo <= hi",
                ));
            }
            if g.max_degree > 4 {
                return Err(ConfigError::field(field("functions.max_degree".into()), "at most 4"));
            }
        }
        let bad = |t: f64| t.is_nan() || t < 0.0;
        if bad(self.tolerances.tol_rel) || self.tolerances.tol_abs.is_some_and(bad) {
            return Err(ConfigError::field(
                field("tolerances".into()),
                "tolerances must be nonnegative",
            ));
        }
        Ok(())
    }
}

/// A parsed and validated scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub scenarios: Vec<ScenarioConfig>,
}

impl CampaignConfig {
    /// Replaces every generator seed, as the `TSVERIFY_SEED` variable does.
    pub fn override_seeds(&mut self, seed: u64) {
        for s in &mut self.scenarios {
            if let FunctionSource::Generator(g) = &mut s.functions {
                g.seed = Some(seed);
            }
        }
    }

    /// Seeds of all generators, in scenario order.
    pub fn seeds(&self) -> Vec<u64> {
        self.scenarios
            .iter()
            .filter_map(|s| match &s.functions {
                FunctionSource::Generator(g) => g.seed,
                FunctionSource::Literals(_) => None,
            })
            .collect()
    }
}

fn deserialize_with_path<T: de::DeserializeOwned>(text: &str) -> Result<T, ConfigError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value: T = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        ConfigError::Validation {
            field,
            line: Some(inner.line()),
            message: strip_position(&inner),
        }
    })?;
    de.end().map_err(|e| parse_error(&e))?;
    Ok(value)
}

fn strip_position(e: &serde_json::Error) -> String {
    let s = e.to_string();
    match s.rfind(" at line ") {
        Some(i) => s[..i].to_string(),
        None => s,
    }
}

fn parse_error(e: &serde_json::Error) -> ConfigError {
    ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: strip_position(e),
    }
}

/// Parses and validates scenario text.
pub fn parse_config(text: &[u8]) -> Result<CampaignConfig, ConfigError> {
    let text = std::str::from_utf8(text).map_err(|e| ConfigError::Parse {
        line: 0,
        column: e.valid_up_to(),
        message: "input is not UTF-8".into(),
    })?;
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| parse_error(&e))?;
    let many = value.as_object().is_some_and(|o| o.contains_key("scenarios"));
    let cfg = if many {
        deserialize_with_path::<CampaignConfig>(text)?
    } else {
        CampaignConfig {
            scenarios: vec![deserialize_with_path::<ScenarioConfig>(text)?],
        }
    };
    for (i, s) in cfg.scenarios.iter().enumerate() {
        s.validate(&if many { format!("scenarios[{i}]") } else { String::new() })?;
    }
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<CampaignConfig, ConfigError> {
    let bytes = std::fs::read(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config(&bytes)
}
