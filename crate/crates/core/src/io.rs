//! Instance file handling. Files are UTF-8 JSON; the shape of the document
//! decides the kind, so emitted files reload without extra metadata:
//!
//! - explicit table: `{"n": 2, "f": [...], "c": [...]}` indexed by bit mask
//! - bipartite:      `{"tasks": [...], "resources": [...], "edges": [...]}`
//! - parametric matching: bipartite fields plus `"range": [lo, hi]`
//! - parametric path: `{"vertices": [...], "s": ..., "t": ..., "edges":
//!   [...], "range": [lo, hi]}`
//!
//! Rationals travel as integers or `"p/q"` strings; action sets as sorted
//! index arrays.

use serde::de::DeserializeOwned;
use serde_json::Value;

use crate::envelope::CurvePoint;
use crate::error::{Error, Result};
use crate::matching::BipartiteInstance;
use crate::model::TableInstance;
use crate::reductions::{ParametricMatchingInstance, ParametricPathInstance};

/// A parsed instance file of any supported kind, validated on load.
#[derive(Clone, Debug)]
pub enum InstanceFile {
    Table(TableInstance),
    Bipartite(BipartiteInstance),
    ParametricMatching(ParametricMatchingInstance),
    Path(ParametricPathInstance),
}

impl InstanceFile {
    pub fn kind(&self) -> &'static str {
        match self {
            InstanceFile::Table(_) => "table",
            InstanceFile::Bipartite(_) => "bipartite",
            InstanceFile::ParametricMatching(_) => "parametric-matching",
            InstanceFile::Path(_) => "parametric-path",
        }
    }

    pub fn to_json_pretty(&self) -> String {
        let mut out = match self {
            InstanceFile::Table(x) => serde_json::to_string_pretty(x),
            InstanceFile::Bipartite(x) => serde_json::to_string_pretty(x),
            InstanceFile::ParametricMatching(x) => serde_json::to_string_pretty(x),
            InstanceFile::Path(x) => serde_json::to_string_pretty(x),
        }
        .expect("instances serialize to JSON");
        out.push('\n');
        out
    }
}

fn typed<T: DeserializeOwned>(value: Value, kind: &str) -> Result<T> {
    serde_json::from_value(value).map_err(|e| Error::Schema {
        detail: format!("malformed {kind} instance: {e}"),
    })
}

/// Parses an instance document, detecting its kind from the fields present,
/// and validates it.
pub fn parse_instance(text: &str) -> Result<InstanceFile> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Schema {
        detail: format!("invalid JSON: {e}"),
    })?;
    let Value::Object(ref fields) = value else {
        return Err(Error::Schema {
            detail: "instance file must be a JSON object".to_string(),
        });
    };
    let parsed = if fields.contains_key("vertices") {
        InstanceFile::Path(typed(value, "parametric-path")?)
    } else if fields.contains_key("tasks") && fields.contains_key("range") {
        InstanceFile::ParametricMatching(typed(value, "parametric-matching")?)
    } else if fields.contains_key("tasks") {
        InstanceFile::Bipartite(typed(value, "bipartite")?)
    } else if fields.contains_key("n") && fields.contains_key("f") && fields.contains_key("c") {
        InstanceFile::Table(typed(value, "table")?)
    } else {
        return Err(Error::Schema {
            detail: "unrecognized instance shape: expected table, bipartite, \
                     parametric-matching, or parametric-path fields"
                .to_string(),
        });
    };
    match &parsed {
        InstanceFile::Table(x) => x.validate()?,
        InstanceFile::Bipartite(x) => x.validate()?,
        InstanceFile::ParametricMatching(x) => x.validate()?,
        InstanceFile::Path(x) => x.validate()?,
    }
    Ok(parsed)
}

/// Utility-curve CSV: decimal columns at the requested precision for
/// plotting, exact rational columns alongside.
pub fn curve_to_csv(points: &[CurvePoint], precision: usize) -> String {
    let mut out =
        String::from("alpha,u_agent,u_principal,alpha_exact,u_agent_exact,u_principal_exact\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            p.alpha.to_decimal_string(precision),
            p.agent_utility.to_decimal_string(precision),
            p.principal_utility.to_decimal_string(precision),
            p.alpha,
            p.agent_utility,
            p.principal_utility,
        ));
    }
    out
}
