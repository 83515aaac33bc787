//! The JSON document: serde types, parsing with error paths, and emission.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

/// A matrix entry: a small integer, or a string such as `"-7"` or `"2/3"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Int(i64),
    Text(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDoc {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<Entry>>,
}

/// Generators and relations, both as row vectors in `ambient` coordinates.
/// Missing `gens` means the identity, missing `rels` means none.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleDoc {
    pub ambient: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gens: Option<MatrixDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rels: Option<MatrixDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepDoc {
    pub at: i64,
    pub gens: MatrixDoc,
}

/// An increasing filtration of a named module. Below the first step the value
/// is `floor` (default zero), after the last one it is `ceiling` (default the
/// whole module).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiltrationDoc {
    pub module: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub floor: Option<MatrixDoc>,
    #[serde(default)]
    pub steps: Vec<StepDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ceiling: Option<MatrixDoc>,
}

/// A term of a complex. An absent filtration is trivial, jumping at 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub module: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p2: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDoc {
    pub lo: i64,
    pub terms: Vec<TermDoc>,
    #[serde(default)]
    pub diffs: Vec<MatrixDoc>,
}

/// A filtered chain map; `maps` runs over the union of both degree ranges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDoc {
    pub source: String,
    pub target: String,
    pub maps: Vec<MatrixDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StratumDoc {
    pub x: Vec<usize>,
    #[serde(default)]
    pub d: Vec<usize>,
    #[serde(default = "one")]
    pub components: usize,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IncidenceDoc {
    pub x_labels: Vec<String>,
    #[serde(default)]
    pub d_labels: Vec<String>,
    pub strata: Vec<StratumDoc>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StratumModel {
    Points,
    Curves,
}

/// Cohomology of the strata. The default is `points`: rank 1 in degree 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StratumDataDoc {
    pub model: StratumModel,
    #[serde(default = "yes")]
    pub gysin: bool,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum WeightFiltration {
    #[value(name = "P", alias = "p")]
    P,
    #[value(name = "PD", alias = "pd")]
    PD,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Command {
    Cohomology {
        complex: String,
    },
    Gr {
        complex: String,
        k1: i64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k2: Option<i64>,
    },
    StrictCheck {
        morphism: String,
    },
    QisCheck {
        morphism: String,
    },
    /// Without `complex` the weight complex of the incidence data is used.
    Spectral {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        complex: Option<String>,
        filtration: WeightFiltration,
        pages: usize,
    },
    /// `operator` names an endomorphism of a one-term complex.
    Monodromy {
        operator: String,
        #[serde(default)]
        center: i64,
    },
    RelativeMonodromy {
        operator: String,
        filtration: String,
    },
    KeyLemma {
        u: String,
        v: String,
        w: String,
        f: String,
        g: String,
    },
    /// From the incidence data, or from a complex and a chain automorphism.
    BuildSzk {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        complex: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t: Option<String>,
    },
    EdgeCompare {
        filtration: WeightFiltration,
    },
    MwCheck {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        degree: Option<i64>,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub modules: BTreeMap<String, ModuleDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub filtrations: BTreeMap<String, FiltrationDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub complexes: BTreeMap<String, ComplexDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub morphisms: BTreeMap<String, MorphismDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub incidence: Option<IncidenceDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stratum_data: Option<StratumDataDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub commands: Vec<Command>,
}

impl Document {
    /// Syntax and field types only; see `Model::build` for the rest.
    pub fn parse(text: &str) -> Result<Document, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Schema { path, message: e.into_inner().to_string() }
        })
    }

    pub fn emit(&self) -> String {
        let v = serde_json::to_value(self).expect("documents serialize");
        let mut s = String::new();
        pretty(&v, 0, &mut s);
        s.push('\n');
        s
    }
}

/// Indented JSON with arrays of scalars kept on one line, so matrix rows
/// read as rows.
pub fn pretty(v: &Value, depth: usize, out: &mut String) {
    let pad = |d: usize| "  ".repeat(d);
    let flat = |v: &Value| !matches!(v, Value::Array(_) | Value::Object(_));
    match v {
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if items.iter().all(flat) => {
            let parts: Vec<String> = items.iter().map(|x| x.to_string()).collect();
            out.push('[');
            out.push_str(&parts.join(", "));
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                pretty(x, depth + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (k, x)) in map.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                pretty(x, depth + 1, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}
