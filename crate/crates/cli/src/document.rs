//! JSON form of a labeled trellis.
//!
//! `classes[i]` lists the vertex labels of class `i` as digit strings and
//! `edges` holds `[section, from_label, symbol, to_label]` entries. A
//! conventional trellis of depth `n` has `n + 1` classes, a tail-biting one
//! has `n` and its last section returns to class 0.

use serde::{Deserialize, Serialize};
use trellis_core::{Field, Shape, Trellis, Vector};

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrellisDocument {
    pub q: u32,
    pub depth: usize,
    pub tail_biting: bool,
    pub classes: Vec<Vec<String>>,
    pub edges: Vec<(usize, String, u32, String)>,
}

impl TrellisDocument {
    pub fn from_trellis(t: &Trellis) -> Result<Self> {
        let mut classes = Vec::with_capacity(t.num_classes());
        for c in 0..t.num_classes() {
            let labels = t.labels(c).ok_or(trellis_core::Error::Unlabeled)?;
            classes.push(labels.iter().map(Vector::to_digits).collect::<Vec<_>>());
        }
        let mut edges = Vec::new();
        for (i, sec) in t.sections().iter().enumerate() {
            let next = (i + 1) % t.num_classes();
            for e in sec {
                edges.push((
                    i,
                    classes[i][e.from].clone(),
                    e.symbol,
                    classes[next][e.to].clone(),
                ));
            }
        }
        Ok(TrellisDocument {
            q: t.field().order(),
            depth: t.depth(),
            tail_biting: t.is_tail_biting(),
            classes,
            edges,
        })
    }

    pub fn to_trellis(&self) -> Result<Trellis> {
        let field = Field::new(self.q)?;
        let label = |s: &str| {
            Vector::from_digits(field, s)
                .map_err(|e| CliError::Document(format!("label \"{s}\": {e}")))
        };
        let classes = self
            .classes
            .iter()
            .map(|c| c.iter().map(|s| label(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let mut edges = vec![Vec::new(); self.depth];
        for (section, from, symbol, to) in &self.edges {
            let sec = edges.get_mut(*section).ok_or_else(|| {
                CliError::Document(format!(
                    "edge section {section} is beyond depth {}",
                    self.depth
                ))
            })?;
            sec.push((label(from)?, *symbol, label(to)?));
        }
        let shape = if self.tail_biting {
            Shape::TailBiting
        } else {
            Shape::Conventional
        };
        Ok(Trellis::from_labeled(field, shape, classes, edges)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Document(e.to_string()))
    }
}
