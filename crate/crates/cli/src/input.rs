//! Input file formats and loading, with digests recorded for the manifest.

use std::cell::RefCell;
use std::path::Path;

use krorder::choice::Functional;
use krorder::measure::{ProbMeasure, SignedMeasure};
use krorder::space::{FinitePoset, MetricSpace};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// `{"labels": [...], "dist": [[...]], "base": 0, "leq": [[bool]]}`;
/// labels default to `x0, x1, ...` and `leq` is optional.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    #[serde(default)]
    pub labels: Option<Vec<String>>,
    pub dist: Vec<Vec<f64>>,
    #[serde(default)]
    pub base: usize,
    #[serde(default)]
    pub leq: Option<Vec<Vec<bool>>>,
}

impl SpaceFile {
    pub fn space(&self) -> krorder::Result<MetricSpace> {
        let labels = self
            .labels
            .clone()
            .unwrap_or_else(|| (0..self.dist.len()).map(|i| format!("x{i}")).collect());
        MetricSpace::validate(labels, self.dist.clone(), self.base)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    #[default]
    Probability,
    Signed,
}

/// `{"space": <path or inline space>, "kind": "probability", "w": [...]}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureFile {
    #[serde(default)]
    pub space: Option<serde_json::Value>,
    #[serde(default)]
    pub kind: MeasureKind,
    pub w: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyFile {
    pub members: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeclaredPair {
    pub better: Vec<f64>,
    pub worse: Vec<f64>,
}

/// `{"pairs": [{"better": [...], "worse": [...]}]}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeFile {
    pub pairs: Vec<DeclaredPair>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PanelPair {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PanelFile {
    pub pairs: Vec<PanelPair>,
}

/// A menu of lotteries: `{"measures": [[...], ...]}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MenuFile {
    pub measures: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetFile {
    pub leq: Vec<Vec<bool>>,
}

/// `{"criteria": [{"min_of": [{"linear": [...]}, ...]}], "lipschitz_bound": 1.0}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleFile {
    pub criteria: Vec<Functional>,
    #[serde(default)]
    pub lipschitz_bound: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFamilyFile {
    pub states: Vec<String>,
    /// `members[k][ω]` is the utility of member `k` in state `ω`.
    pub members: Vec<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActFile {
    pub states: Vec<String>,
    pub measures: Vec<Vec<f64>>,
}

/// Reads input files and remembers their digests.
#[derive(Debug, Default)]
pub struct Loader {
    inputs: RefCell<Vec<(String, String)>>,
}

impl Loader {
    pub fn inputs(&self) -> Vec<(String, String)> {
        self.inputs.borrow().clone()
    }

    fn bytes(&self, path: &Path) -> Result<Vec<u8>, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let digest = hex::encode(Sha256::digest(&bytes));
        let entry = (path.display().to_string(), digest);
        let mut inputs = self.inputs.borrow_mut();
        if !inputs.contains(&entry) {
            inputs.push(entry);
        }
        Ok(bytes)
    }

    pub fn json<T: DeserializeOwned>(&self, path: &Path) -> Result<T, CliError> {
        let bytes = self.bytes(path)?;
        // serde_json messages already carry the line and column.
        serde_json::from_slice(&bytes).map_err(|e| CliError::MalformedInput(format!("{}: {e}", path.display())))
    }

    pub fn space_file(&self, path: &Path) -> Result<SpaceFile, CliError> {
        self.json(path)
    }

    pub fn space(&self, path: &Path) -> Result<MetricSpace, CliError> {
        Ok(self.space_file(path)?.space()?)
    }

    fn measure_file(&self, space: &MetricSpace, path: &Path) -> Result<MeasureFile, CliError> {
        let file: MeasureFile = self.json(path)?;
        match &file.space {
            None => {}
            Some(serde_json::Value::String(rel)) => {
                let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
                let own = self.space(&dir.join(rel))?;
                space.ensure_same(&own)?;
            }
            Some(inline) => {
                let own: SpaceFile = serde_json::from_value(inline.clone())
                    .map_err(|e| CliError::MalformedInput(format!("{}: field `space`: {e}", path.display())))?;
                space.ensure_same(&own.space()?)?;
            }
        }
        Ok(file)
    }

    pub fn prob(&self, space: &MetricSpace, path: &Path) -> Result<ProbMeasure, CliError> {
        let file = self.measure_file(space, path)?;
        if file.kind != MeasureKind::Probability {
            return Err(CliError::MalformedInput(format!(
                "{}: expected a probability measure",
                path.display()
            )));
        }
        Ok(ProbMeasure::new(space, file.w)?)
    }

    /// A signed measure file; a probability file is read as its weights.
    pub fn signed(&self, space: &MetricSpace, path: &Path) -> Result<SignedMeasure, CliError> {
        let file = self.measure_file(space, path)?;
        Ok(SignedMeasure::kr(space, file.w)?)
    }

    /// The poset from `--poset`, else from the space file's `leq`.
    pub fn poset(&self, space_path: &Path, space: &MetricSpace, poset: Option<&Path>) -> Result<Option<FinitePoset>, CliError> {
        let leq = match poset {
            Some(p) => Some(self.json::<PosetFile>(p)?.leq),
            None => self.space_file(space_path)?.leq,
        };
        Ok(match leq {
            Some(l) => Some(FinitePoset::new(space, l)?),
            None => None,
        })
    }
}
