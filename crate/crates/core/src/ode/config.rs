//! TOML analysis configs: `[field]`, `[grid]`, `[approx]` and `[analysis]`.
//!
//! ```toml
//! [field]
//! family = "gradient_descent"      # linear | gradient_descent | radial_cycle | custom
//! height = "(x^2 - 1)^2 + y^2"     # gradient_descent only
//! # matrix = [[-1.0, 0.0], [0.0, -1.0]]   linear only
//! # components = ["-x", "y"]              custom only
//!
//! [grid]
//! lower = [-2.0, -2.0]
//! upper = [2.0, 2.0]
//! resolution = [32, 32]
//!
//! [approx]
//! tau = 0.25
//! substeps = 20
//! bloat = 0.01                     # optional, default 0.1 × cell diagonal
//!
//! [analysis]                       # optional section
//! depth = 100                      # tower depth, default #cells + 1
//! checks = ["thm66", "basins"]     # default: every check
//! seed = 1                         # walk sampling seed
//! walks = 20                       # sampled walks per report
//! ```
//!
//! Unknown sections and keys are rejected with the dotted key in the error.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Deserialize;

use super::cellmap::GridSpec;
use super::field::{ApproxParams, VectorField};
use super::poly::Polynomial;
use crate::error::{Error, Result};

pub const CHECKS: [&str; 8] = [
    "ends",
    "limits",
    "complete",
    "thm66",
    "separation",
    "compactness",
    "basins",
    "duality",
];

const SECTIONS: [(&str, &[&str], bool); 4] = [
    ("field", &["family", "matrix", "height", "components"], true),
    ("grid", &["lower", "upper", "resolution"], true),
    ("approx", &["tau", "substeps", "bloat"], true),
    ("analysis", &["depth", "checks", "seed", "walks"], false),
];

#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisSettings {
    pub depth: Option<usize>,
    pub checks: Vec<String>,
    pub seed: u64,
    pub walks: usize,
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        AnalysisSettings {
            depth: None,
            checks: CHECKS.iter().map(|s| s.to_string()).collect(),
            seed: 0,
            walks: 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisConfig {
    pub field: VectorField,
    pub grid: GridSpec,
    pub approx: ApproxParams,
    pub analysis: AnalysisSettings,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawField {
    family: Option<String>,
    matrix: Option<Vec<Vec<f64>>>,
    height: Option<String>,
    components: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    lower: Option<Vec<f64>>,
    upper: Option<Vec<f64>>,
    resolution: Option<Vec<usize>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawApprox {
    tau: Option<f64>,
    substeps: Option<usize>,
    bloat: Option<f64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawAnalysis {
    depth: Option<usize>,
    checks: Option<Vec<String>>,
    seed: Option<u64>,
    walks: Option<usize>,
}

/// Deserializes a section whose fields are all optional, blaming the first
/// key whose value has the wrong type.
fn section<T: DeserializeOwned>(table: &toml::Table, name: &str) -> Result<Option<T>> {
    let Some(v) = table.get(name) else {
        return Ok(None);
    };
    let parse = |v: toml::Value| v.try_into::<T>().map_err(|e| e.message().trim().to_string());
    match parse(v.clone()) {
        Ok(t) => Ok(Some(t)),
        Err(msg) => {
            let inner = v.as_table().expect("sections are tables");
            for (k, x) in inner {
                let mut single = toml::Table::new();
                single.insert(k.clone(), x.clone());
                if let Err(m) = parse(toml::Value::Table(single)) {
                    return Err(Error::config(format!("{name}.{k}"), m));
                }
            }
            Err(Error::config(name, msg))
        }
    }
}

fn required<T>(v: Option<T>, key: &str) -> Result<T> {
    v.ok_or_else(|| Error::config(key, "missing key"))
}

impl AnalysisConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("path", format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::config("syntax", e.message().trim().to_string()))?;
        for (name, value) in &table {
            let Some((_, keys, _)) = SECTIONS.iter().find(|(s, _, _)| s == name) else {
                return Err(Error::config(name.as_str(), "unknown section"));
            };
            let Some(inner) = value.as_table() else {
                return Err(Error::config(name.as_str(), "expected a section"));
            };
            if let Some(k) = inner.keys().find(|k| !keys.contains(&k.as_str())) {
                return Err(Error::config(format!("{name}.{k}"), "unknown key"));
            }
        }
        for (name, _, required) in SECTIONS {
            if required && !table.contains_key(name) {
                return Err(Error::config(name, "missing section"));
            }
        }

        let raw_grid: RawGrid = section(&table, "grid")?.expect("required");
        let grid = GridSpec::new(
            required(raw_grid.lower, "grid.lower")?,
            required(raw_grid.upper, "grid.upper")?,
            required(raw_grid.resolution, "grid.resolution")?,
        );
        grid.validate().map_err(|e| Error::config("grid", e.to_string()))?;

        let raw_approx: RawApprox = section(&table, "approx")?.expect("required");
        let approx = ApproxParams {
            tau: required(raw_approx.tau, "approx.tau")?,
            substeps: required(raw_approx.substeps, "approx.substeps")?,
            bloat: raw_approx.bloat,
        };
        approx.validate()?;

        let raw_field: RawField = section(&table, "field")?.expect("required");
        let field = build_field(raw_field, grid.dim())?;
        if field.dim() != grid.dim() {
            return Err(Error::config(
                "field",
                format!("field has dimension {} but grid has {} axes", field.dim(), grid.dim()),
            ));
        }

        let raw: RawAnalysis = section(&table, "analysis")?.unwrap_or_default();
        let mut analysis = AnalysisSettings::default();
        if let Some(d) = raw.depth {
            if d == 0 {
                return Err(Error::config("analysis.depth", "must be at least 1"));
            }
            analysis.depth = Some(d);
        }
        if let Some(checks) = raw.checks {
            if let Some(bad) = checks.iter().find(|c| !CHECKS.contains(&c.as_str())) {
                return Err(Error::config("analysis.checks", format!("unknown check `{bad}`")));
            }
            if checks.is_empty() {
                return Err(Error::config("analysis.checks", "at least one check is required"));
            }
            analysis.checks = checks;
        }
        analysis.seed = raw.seed.unwrap_or(analysis.seed);
        analysis.walks = raw.walks.unwrap_or(analysis.walks);
        Ok(AnalysisConfig {
            field,
            grid,
            approx,
            analysis,
        })
    }
}

fn build_field(raw: RawField, dim: usize) -> Result<VectorField> {
    let family = required(raw.family.clone(), "field.family")?;
    let unused = |key: &str, present: bool| {
        if present {
            Err(Error::config(
                format!("field.{key}"),
                format!("not used by family `{family}`"),
            ))
        } else {
            Ok(())
        }
    };
    let missing = |key: &str| Error::config(format!("field.{key}"), format!("required by family `{family}`"));
    let poly = |key: &str, src: &str| Polynomial::parse(src).map_err(|e| Error::config(format!("field.{key}"), e.to_string()));
    match family.as_str() {
        "linear" => {
            unused("height", raw.height.is_some())?;
            unused("components", raw.components.is_some())?;
            let m = raw.matrix.clone().ok_or_else(|| missing("matrix"))?;
            VectorField::linear(m).map_err(|e| Error::config("field.matrix", e.to_string()))
        }
        "gradient_descent" => {
            unused("matrix", raw.matrix.is_some())?;
            unused("components", raw.components.is_some())?;
            let h = raw.height.as_deref().ok_or_else(|| missing("height"))?;
            VectorField::gradient_descent(poly("height", h)?, dim).map_err(|e| Error::config("field.height", e.to_string()))
        }
        "radial_cycle" => {
            unused("matrix", raw.matrix.is_some())?;
            unused("height", raw.height.is_some())?;
            unused("components", raw.components.is_some())?;
            Ok(VectorField::RadialCycle)
        }
        "custom" => {
            unused("matrix", raw.matrix.is_some())?;
            unused("height", raw.height.is_some())?;
            let comps = raw.components.as_ref().ok_or_else(|| missing("components"))?;
            let comps = comps.iter().map(|c| poly("components", c)).collect::<Result<Vec<_>>>()?;
            VectorField::custom(comps).map_err(|e| Error::config("field.components", e.to_string()))
        }
        other => Err(Error::config("field.family", format!("unknown family `{other}`"))),
    }
}
