//! Result documents and their canonical JSON and CSV renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};
use crate::schema::MatrixDoc;

pub const TOOL_VERSION: &str = concat!("credal-ot ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub input_sha256: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub tool_version: String,
}

impl Provenance {
    pub fn new(input: &[u8], seed: Option<u64>) -> Self {
        Self {
            input_sha256: hex::encode(Sha256::digest(input)),
            seed,
            tool_version: TOOL_VERSION.to_string(),
        }
    }
}

/// A map sampled on a grid: `t[k] = T(x[k])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Curve {
    pub x: Vec<f64>,
    pub t: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultDocument {
    pub command: String,
    pub value: f64,
    /// Transport plan, row-major over source × target.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<MatrixDoc>,
    /// Discrete map as target indices per source atom.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<Curve>,
    /// Linear map matrix, row-major.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    pub diagnostics: BTreeMap<String, Value>,
    pub provenance: Provenance,
}

impl ResultDocument {
    pub fn new(command: &str, value: f64, provenance: Provenance) -> Self {
        Self {
            command: command.to_string(),
            value,
            plan: None,
            map: None,
            curve: None,
            matrix: None,
            diagnostics: BTreeMap::new(),
            provenance,
        }
    }

    pub fn diag(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.diagnostics.insert(key.to_string(), value.into());
        self
    }
}

fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_canonical(out: &mut String, v: &Value) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                let _ = write!(out, "{u}");
            } else if let Some(i) = n.as_i64() {
                let _ = write!(out, "{i}");
            } else {
                out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string encodes")),
        Value::Array(items) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write_canonical(out, item);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (k, key) in keys.into_iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(key).expect("key encodes"));
                out.push(':');
                write_canonical(out, &map[key]);
            }
            out.push('}');
        }
    }
}

/// Compact JSON with sorted keys and every real written with 17
/// significant digits, followed by a newline.
pub fn canonical_json<T: Serialize>(doc: &T) -> CliResult<String> {
    let value = serde_json::to_value(doc)
        .map_err(|e| CliError::new(crate::error::ErrorKind::Internal, e.to_string()))?;
    let mut out = String::new();
    write_canonical(&mut out, &value);
    out.push('\n');
    Ok(out)
}

/// `quantity,value` rows: the value, then the scalar diagnostics.
pub fn result_csv(doc: &ResultDocument) -> String {
    let mut out = String::from("quantity,value\n");
    let _ = writeln!(out, "value,{}", format_float(doc.value));
    for (key, v) in &doc.diagnostics {
        match v {
            Value::Number(n) => {
                let cell = match (n.as_u64(), n.as_i64()) {
                    (Some(u), _) => u.to_string(),
                    (None, Some(i)) => i.to_string(),
                    _ => format_float(n.as_f64().unwrap_or(f64::NAN)),
                };
                let _ = writeln!(out, "{key},{cell}");
            }
            Value::Bool(b) => {
                let _ = writeln!(out, "{key},{b}");
            }
            _ => {}
        }
    }
    out
}

/// Plot data: `i,j,mass` for plans, `x,T(x)` for sampled maps.
pub fn plot_csv(doc: &ResultDocument) -> CliResult<String> {
    let mut out = String::new();
    if let Some(plan) = &doc.plan {
        out.push_str("i,j,mass\n");
        for (i, row) in plan.data.iter().enumerate() {
            for (j, m) in row.iter().enumerate() {
                let _ = writeln!(out, "{i},{j},{}", format_float(*m));
            }
        }
    } else if let Some(curve) = &doc.curve {
        out.push_str("x,T(x)\n");
        for (x, t) in curve.x.iter().zip(&curve.t) {
            let _ = writeln!(out, "{},{}", format_float(*x), format_float(*t));
        }
    } else {
        return Err(CliError::input(format!(
            "{} result has no plan or one-dimensional map to plot",
            doc.command
        )));
    }
    Ok(out)
}
