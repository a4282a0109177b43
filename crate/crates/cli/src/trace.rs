//! JSON record of an embedding sequence, replayable against the original
//! matrix.

use serde::{Deserialize, Serialize};
use trellis_core::{EmbeddingSpec, Field, Vector};

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceStep {
    pub index: usize,
    pub alpha: String,
    /// Basis of the hyperplane, empty for the zero space.
    pub hyperplane: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceFile {
    pub q: u32,
    pub n: usize,
    pub steps: Vec<TraceStep>,
}

impl TraceFile {
    pub fn new(q: u32, n: usize, specs: &[EmbeddingSpec]) -> Self {
        let steps = specs
            .iter()
            .map(|s| TraceStep {
                index: s.index,
                alpha: s.alpha.to_digits(),
                hyperplane: s.hyperplane.basis().iter().map(Vector::to_digits).collect(),
            })
            .collect();
        TraceFile { q, n, steps }
    }

    pub fn specs(&self) -> Result<Vec<EmbeddingSpec>> {
        let field = Field::new(self.q)?;
        let parse = |s: &str| {
            Vector::from_digits(field, s).map_err(|e| CliError::Document(format!("\"{s}\": {e}")))
        };
        self.steps
            .iter()
            .map(|step| {
                let alpha = parse(&step.alpha)?;
                if let Some(bad) = step.hyperplane.iter().find(|b| b.len() != step.alpha.len()) {
                    return Err(CliError::Document(format!(
                        "hyperplane vector \"{bad}\" and alpha \"{}\" differ in length",
                        step.alpha
                    )));
                }
                let basis = step
                    .hyperplane
                    .iter()
                    .map(|b| parse(b))
                    .collect::<Result<Vec<_>>>()?;
                Ok(EmbeddingSpec::new(step.index, alpha, &basis))
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("traces always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Document(e.to_string()))
    }
}
