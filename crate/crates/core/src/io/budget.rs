use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::RkoError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Mip,
    Portfolio,
    Tdtsp,
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemKind::Mip => "mip",
            ProblemKind::Portfolio => "portfolio",
            ProblemKind::Tdtsp => "tdtsp",
        })
    }
}

impl FromStr for ProblemKind {
    type Err = RkoError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mip" => Ok(ProblemKind::Mip),
            "portfolio" => Ok(ProblemKind::Portfolio),
            "tdtsp" | "td-tsp" => Ok(ProblemKind::Tdtsp),
            other => Err(RkoError::config(format!("unknown problem kind `{other}`"))),
        }
    }
}

/// Wall-clock seconds granted to one run on an instance of size `n`.
///
/// Portfolio (and generic MIP) instances follow a step schedule in the asset
/// count; TD-TSP instances get one second per customer.
pub fn budget_for(kind: ProblemKind, n: usize) -> f64 {
    match kind {
        ProblemKind::Tdtsp => n.max(1) as f64,
        ProblemKind::Portfolio | ProblemKind::Mip => match n {
            0..=31 => 10.0,
            32..=98 => 20.0,
            99..=225 => 30.0,
            226..=457 => 50.0,
            458..=1318 => 100.0,
            _ => 200.0,
        },
    }
}
