use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::Error;

/// Hypergraph 2-coloring is NAE-SAT with every literal fixed to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Coloring,
    Nae,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Coloring => "coloring",
            Model::Nae => "nae",
        })
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "coloring" | "col" => Ok(Model::Coloring),
            "nae" => Ok(Model::Nae),
            other => Err(Error::InvalidParameter(format!(
                "unknown model '{other}' (expected coloring or nae)"
            ))),
        }
    }
}
