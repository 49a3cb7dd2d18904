//! TOML sweep configuration with dotted-key overrides.
//!
//! ```toml
//! [model]
//! kind = "pspin"        # or "two-level" with hx0, hz0
//! n = 100
//! p = 3
//!
//! [grid]
//! j = [0, 1, 2, 3, 4, 5]
//! k = [0, 1, 2, 3, 4, 5]
//! L = [2, 4, 6, 8]
//!
//! [run]
//! variant = "standard"  # or "reduced"
//! evaluation = "left"   # or "midpoint"
//!
//! [adiabatic]
//! policy = "mirror"     # or "explicit" with times = [...], or "none"
//!
//! [output]
//! records = "records.csv"
//! ```

use serde::{Deserialize, Serialize};

use crate::alternating::{EvaluationPoint, Variant};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpec {
    TwoLevel {
        hx0: f64,
        #[serde(default = "one")]
        hz0: f64,
    },
    Pspin {
        n: usize,
        p: u32,
        #[serde(default = "one")]
        coupling: f64,
        #[serde(default = "one")]
        transverse: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl ModelSpec {
    pub fn default_eta_scale(&self) -> f64 {
        match self {
            ModelSpec::TwoLevel { .. } => 1.0,
            ModelSpec::Pspin { .. } => 0.025,
        }
    }

    /// `2 hx0` for the spin flip, `N N^{-1/3}` for the p-spin model.
    pub fn default_delta_ref(&self) -> f64 {
        match self {
            ModelSpec::TwoLevel { hx0, .. } => 2.0 * hx0,
            ModelSpec::Pspin { n, .. } => {
                let n = *n as f64;
                n * n.powf(-1.0 / 3.0)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub j: Vec<i64>,
    pub k: Vec<i64>,
    #[serde(rename = "L")]
    pub slices: Vec<usize>,
    pub eta_scale: Option<f64>,
    pub delta_ref: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum VariantName {
    #[default]
    Standard,
    Reduced,
}

impl From<VariantName> for Variant {
    fn from(v: VariantName) -> Self {
        match v {
            VariantName::Standard => Variant::Standard,
            VariantName::Reduced => Variant::Reduced,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum EvaluationName {
    #[default]
    Left,
    Midpoint,
}

impl From<EvaluationName> for EvaluationPoint {
    fn from(v: EvaluationName) -> Self {
        match v {
            EvaluationName::Left => EvaluationPoint::LeftEndpoint,
            EvaluationName::Midpoint => EvaluationPoint::Midpoint,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    #[serde(default)]
    pub variant: VariantName,
    #[serde(default)]
    pub evaluation: EvaluationName,
    #[serde(default)]
    pub record_populations: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TimePolicy {
    #[default]
    Mirror,
    Explicit,
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdiabaticSpec {
    #[serde(default)]
    pub policy: TimePolicy,
    #[serde(default)]
    pub times: Vec<f64>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_initial_steps")]
    pub initial_steps: usize,
    #[serde(default = "default_max_doublings")]
    pub max_doublings: usize,
}

fn default_tolerance() -> f64 {
    1e-8
}

fn default_initial_steps() -> usize {
    64
}

fn default_max_doublings() -> usize {
    20
}

impl Default for AdiabaticSpec {
    fn default() -> Self {
        Self {
            policy: TimePolicy::Mirror,
            times: Vec::new(),
            tolerance: default_tolerance(),
            initial_steps: default_initial_steps(),
            max_doublings: default_max_doublings(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_records")]
    pub records: String,
    #[serde(default = "default_populations")]
    pub populations: String,
    #[serde(default = "default_report")]
    pub report: String,
}

fn default_records() -> String {
    "records.csv".into()
}

fn default_populations() -> String {
    "populations.csv".into()
}

fn default_report() -> String {
    "report.txt".into()
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            records: default_records(),
            populations: default_populations(),
            report: default_report(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub model: ModelSpec,
    pub grid: GridSpec,
    #[serde(default)]
    pub run: RunSpec,
    #[serde(default)]
    pub adiabatic: AdiabaticSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

impl SweepSpec {
    pub fn eta_scale(&self) -> f64 {
        self.grid.eta_scale.unwrap_or_else(|| self.model.default_eta_scale())
    }

    pub fn delta_ref(&self) -> f64 {
        self.grid.delta_ref.unwrap_or_else(|| self.model.default_delta_ref())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        for (name, empty) in [
            ("j", self.grid.j.is_empty()),
            ("k", self.grid.k.is_empty()),
            ("L", self.grid.slices.is_empty()),
        ] {
            if empty {
                return bad(format!("grid.{name} must be nonempty"));
            }
        }
        if self.grid.slices.contains(&0) {
            return bad("grid.L entries must be >= 1".into());
        }
        if !(self.eta_scale() > 0.0) {
            return bad(format!("grid.eta_scale must be > 0, got {}", self.eta_scale()));
        }
        if !(self.delta_ref() > 0.0) {
            return bad(format!("grid.delta_ref must be > 0, got {}", self.delta_ref()));
        }
        if self.run.variant == VariantName::Reduced {
            if let Some(l) = self.grid.slices.iter().find(|l| *l % 2 == 1) {
                return bad(format!("reduced variant needs even L, got {l}"));
            }
        }
        if self.adiabatic.policy == TimePolicy::Explicit
            && (self.adiabatic.times.is_empty() || self.adiabatic.times.iter().any(|t| !(*t >= 0.0)))
        {
            return bad("explicit adiabatic policy needs a nonempty list of times >= 0".into());
        }
        Ok(())
    }

    /// Parses a config and applies `key=value` overrides before validation.
    pub fn from_toml(text: &str, overrides: &[String]) -> Result<Self> {
        let table = apply_overrides(text, overrides)?;
        Self::from_table(table)
    }

    pub fn from_table(table: toml::Table) -> Result<Self> {
        let spec: SweepSpec = table
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("sweep spec serializes")
    }
}

/// Parses `text` into a table and sets each dotted `key=value` override.
/// Values are read as TOML; a bare comma list becomes an array, a scalar set
/// on an existing array key becomes a one-element array, and anything
/// unparsable becomes a string.
pub fn apply_overrides(text: &str, overrides: &[String]) -> Result<toml::Table> {
    let mut table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
    for item in overrides {
        let (key, raw) = item
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{item}` is not key=value")))?;
        let value = parse_value(raw.trim());
        let path: Vec<&str> = key.trim().split('.').collect();
        let (last, parents) = path.split_last().expect("split yields one item");
        let mut cursor = &mut table;
        for part in parents {
            let entry = cursor
                .entry(part.to_string())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
            cursor = entry
                .as_table_mut()
                .ok_or_else(|| Error::Config(format!("override `{key}`: `{part}` is not a table")))?;
        }
        let value = match (cursor.get(*last), value) {
            (Some(toml::Value::Array(_)), v) if !v.is_array() => toml::Value::Array(vec![v]),
            (_, v) => v,
        };
        cursor.insert(last.to_string(), value);
    }
    Ok(table)
}

fn parse_value(raw: &str) -> toml::Value {
    let wrapped = if raw.contains(',') && !raw.starts_with('[') {
        format!("[{raw}]")
    } else {
        raw.to_string()
    };
    let doc = format!("v = {wrapped}");
    match doc.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("key present"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}
