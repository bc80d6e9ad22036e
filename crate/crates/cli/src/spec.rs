//! Experiment files and operator sources.

use std::path::{Path, PathBuf};

use aluthge_core::aluthge::IterationConfig;
use aluthge_core::analysis::Perturbation;
use aluthge_core::generators::OperatorFamily;
use aluthge_core::ComplexMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::io::{parse_json, MatrixFile};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Where the operator comes from: exactly one of `matrix` or `family`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSource {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<OperatorFamily>,
    /// Instantiation dimension for `family`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
}

fn default_n_max() -> usize {
    64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Analysis {
    Trace,
    Spectrum,
    Radius {
        #[serde(default = "default_n_max")]
        n_max: usize,
    },
    Split {
        threshold: f64,
    },
    Continuity {
        epsilons: Vec<f64>,
        trials: usize,
        #[serde(default)]
        perturbation: Perturbation,
    },
    Sections {
        dims: Vec<usize>,
    },
}

impl Analysis {
    pub fn is_randomized(&self) -> bool {
        matches!(self, Analysis::Continuity { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: PathBuf,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub operator: OperatorSource,
    #[serde(default)]
    pub config: IterationConfig,
    #[serde(default)]
    pub analyses: Vec<Analysis>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> CliResult<()> {
        let op = &self.operator;
        match (&op.matrix, &op.family) {
            (Some(_), Some(_)) => {
                return Err(CliError::input(
                    "operator",
                    "give either `matrix` or `family`, not both",
                ))
            }
            (None, None) => {
                return Err(CliError::input(
                    "operator",
                    "one of `matrix` or `family` is required",
                ))
            }
            (Some(_), None) if op.dim.is_some() => {
                return Err(CliError::input("operator.dim", "only used with `family`"))
            }
            (None, Some(_)) if op.dim.is_none() => {
                return Err(CliError::input("operator.dim", "required with `family`"))
            }
            _ => {}
        }
        if let Some(m) = &op.matrix {
            m.to_matrix("operator.matrix")?;
        }
        let randomized = op.family.as_ref().is_some_and(|f| f.is_randomized())
            || self.analyses.iter().any(Analysis::is_randomized);
        if randomized && self.seed.is_none() {
            return Err(CliError::input(
                "seed",
                "required because the experiment has randomized elements",
            ));
        }
        self.config
            .validate()
            .map_err(|e| CliError::input("config", e.to_string()))
    }

    pub fn matrix(&self) -> CliResult<ComplexMatrix> {
        let op = &self.operator;
        match (&op.matrix, &op.family, op.dim) {
            (Some(m), None, _) => m.to_matrix("operator.matrix"),
            (None, Some(f), Some(dim)) => f
                .instantiate(dim)
                .map_err(|e| CliError::input("operator.family", e.to_string())),
            _ => Err(CliError::input("operator", "invalid operator source")),
        }
    }

    /// Family used for section studies: the descriptor itself, or leading
    /// corners of the inline matrix.
    pub fn family(&self) -> CliResult<OperatorFamily> {
        match (&self.operator.matrix, &self.operator.family) {
            (_, Some(f)) => Ok(f.clone()),
            (Some(m), None) => Ok(OperatorFamily::CustomMatrix {
                dim: m.dim,
                data: m.data.clone(),
            }),
            (None, None) => Err(CliError::input("operator", "no operator source")),
        }
    }
}

/// Contents of an `--input` file, told apart by their top-level keys.
#[derive(Debug, Clone)]
pub enum Source {
    Matrix(ComplexMatrix),
    Family(OperatorFamily),
    Experiment(Box<ExperimentSpec>),
}

impl Source {
    pub fn parse(text: &str) -> CliResult<Self> {
        let value: serde_json::Value = parse_json(text)?;
        let obj = value
            .as_object()
            .ok_or_else(|| CliError::input("<document>", "expected a JSON object"))?;
        if obj.contains_key("operator") {
            let spec: ExperimentSpec = parse_json(text)?;
            spec.validate()?;
            Ok(Source::Experiment(Box::new(spec)))
        } else if obj.contains_key("kind") {
            Ok(Source::Family(parse_json(text)?))
        } else {
            Ok(Source::Matrix(
                parse_json::<MatrixFile>(text)?.to_matrix("")?,
            ))
        }
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    /// The concrete operator; bare families need a dimension.
    pub fn matrix(&self, dim: Option<usize>) -> CliResult<ComplexMatrix> {
        match self {
            Source::Matrix(m) => Ok(m.clone()),
            Source::Experiment(spec) => spec.matrix(),
            Source::Family(f) => {
                let dim = dim.ok_or_else(|| {
                    CliError::input("dim", "a family descriptor needs --dim to be instantiated")
                })?;
                f.instantiate(dim)
                    .map_err(|e| CliError::input("<document>", e.to_string()))
            }
        }
    }

    pub fn experiment(&self) -> Option<&ExperimentSpec> {
        match self {
            Source::Experiment(s) => Some(s),
            _ => None,
        }
    }
}
