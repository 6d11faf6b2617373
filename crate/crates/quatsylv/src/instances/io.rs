//! File formats for specs and solutions.
//!
//! Both are JSON objects written one member per line, with every tensor in
//! the compact qtensor form:
//!
//! ```text
//! {
//! "variant": "full",
//! "A1": {"shape":{"rows":[2,2],"cols":[2,2]},"data":[[0.0,1.0,0.0,0.0],...]},
//! ...
//! }
//! ```
//!
//! A spec carries `"variant"`, `"eta"` for the eta variant, and one member
//! per slot. A solution carries `"free"` (the free-parameter policy) and one
//! member per unknown. Members are sorted, so writing is deterministic and
//! parse-then-write reproduces a written file byte for byte.

use std::collections::BTreeMap;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::qtensor::{unravel, QTensor, Shape, TensorJson};
use crate::quat::EtaAxis;
use crate::sylvester::{FreeParams, FreePolicy, Solution, SystemSpec, Variant};

fn write_object(header: &[(&str, String)], tensors: &BTreeMap<String, QTensor<f64>>) -> String {
    let key = |k: &str| serde_json::to_string(k).expect("string serialization");
    let mut lines: Vec<String> = header.iter().map(|(k, v)| format!("{}: {}", key(k), key(v))).collect();
    lines.extend(tensors.iter().map(|(k, t)| format!("{}: {}", key(k), t.to_json_string())));
    format!("{{\n{}\n}}\n", lines.join(",\n"))
}

fn read_object(context: &str, text: &str) -> Result<BTreeMap<String, Value>> {
    serde_json::from_str(text).map_err(|e| Error::parse(context, e.to_string()))
}

fn take_str(obj: &mut BTreeMap<String, Value>, context: &str, key: &str) -> Result<Option<String>> {
    match obj.remove(key) {
        None => Ok(None),
        Some(Value::String(s)) => Ok(Some(s)),
        Some(_) => Err(Error::parse(context, format!("`{key}` must be a string"))),
    }
}

/// Parses one tensor member; diagnostics name the tensor and, for a bad
/// entry, its row and column multi-indices.
pub fn tensor_from_value(name: &str, v: Value) -> Result<QTensor<f64>> {
    if let Some(Value::Array(data)) = v.get("data") {
        if let Some(Ok(shape)) = v.get("shape").map(|s| {
            serde_json::from_value::<crate::qtensor::ShapeJson>(s.clone())
                .map_err(|e| e.to_string())
                .and_then(|s| Shape::new(s.rows, s.cols).map_err(|e| e.to_string()))
        }) {
            let nc = shape.total_cols().max(1);
            let bad = data
                .iter()
                .position(|q| !matches!(q, Value::Array(c) if c.len() == 4 && c.iter().all(Value::is_number)));
            if let Some(n) = bad {
                let at = if n < shape.len() {
                    format!("row {:?}, col {:?}", unravel(n / nc, shape.row_dims()), unravel(n % nc, shape.col_dims()))
                } else {
                    format!("position {n}")
                };
                return Err(Error::parse(name, format!("entry at {at} is not four numbers [w, x, y, z]")));
            }
        }
    }
    let j: TensorJson = serde_json::from_value(v).map_err(|e| Error::parse(name, e.to_string()))?;
    QTensor::from_json(name, &j)
}

fn tensors(obj: BTreeMap<String, Value>) -> Result<BTreeMap<String, QTensor<f64>>> {
    obj.into_iter().map(|(k, v)| tensor_from_value(&k, v).map(|t| (k, t))).collect()
}

pub fn spec_to_json(spec: &SystemSpec<f64>) -> String {
    let mut header = vec![("variant", spec.variant.to_string())];
    if let Some(eta) = spec.eta {
        header.push(("eta", eta.to_string()));
    }
    write_object(&header, &spec.tensors)
}

pub fn spec_from_json(text: &str) -> Result<SystemSpec<f64>> {
    let mut obj = read_object("spec", text)?;
    let variant: Variant =
        take_str(&mut obj, "spec", "variant")?.ok_or_else(|| Error::parse("spec", "missing `variant`"))?.parse()?;
    let eta = take_str(&mut obj, "spec", "eta")?.map(|s| s.parse::<EtaAxis>()).transpose()?;
    SystemSpec::new(variant, eta, tensors(obj)?)
}

pub fn solution_to_json(sol: &Solution<f64>) -> String {
    write_object(&[("free", sol.free_params_used.policy.to_string())], &sol.unknowns)
}

/// Parses a solution; only the policy of the free parameters is kept.
pub fn solution_from_json(text: &str) -> Result<Solution<f64>> {
    let mut obj = read_object("solution", text)?;
    let policy = match take_str(&mut obj, "solution", "free")? {
        Some(s) => s.parse::<FreePolicy>()?,
        None => FreePolicy::Zero,
    };
    Ok(Solution { unknowns: tensors(obj)?, free_params_used: FreeParams::with_policy(policy) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bad_entries_are_located() {
        let text = r#"{"variant": "single",
            "A": {"shape":{"rows":[1],"cols":[2]},"data":[[1,0,0,0],[1,0,0]]},
            "B": {"shape":{"rows":[2],"cols":[1]},"data":[[1,0,0,0],[1,0,0,0]]},
            "E": {"shape":{"rows":[1],"cols":[1]},"data":[[1,0,0,0]]}}"#;
        let err = spec_from_json(text).unwrap_err().to_string();
        assert!(err.contains("in A:") && err.contains("row [0], col [1]"), "{err}");
    }

    #[test]
    fn missing_variant_and_unknown_slot() {
        assert!(spec_from_json("{}").unwrap_err().to_string().contains("variant"));
        let text = r#"{"variant": "single", "Q": {"shape":{"rows":[1],"cols":[1]},"data":[[1,0,0,0]]}}"#;
        assert!(spec_from_json(text).is_err());
    }
}
