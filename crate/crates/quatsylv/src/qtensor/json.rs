//! JSON form of a tensor:
//! `{"shape": {"rows": [..], "cols": [..]}, "data": [[w,x,y,z], ...]}`
//! with `data` in the lexicographic storage order.

use serde::{Deserialize, Serialize};

use super::{unravel, QTensor, Shape};
use crate::error::{Error, Result};
use crate::quat::Quaternion;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeJson {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorJson {
    pub shape: ShapeJson,
    pub data: Vec<[f64; 4]>,
}

impl QTensor<f64> {
    pub fn to_json(&self) -> TensorJson {
        TensorJson {
            shape: ShapeJson { rows: self.row_dims().to_vec(), cols: self.col_dims().to_vec() },
            data: self.data().iter().map(|q| q.to_array()).collect(),
        }
    }

    /// Validates a parsed tensor; `name` labels diagnostics.
    pub fn from_json(name: &str, j: &TensorJson) -> Result<Self> {
        let shape =
            Shape::new(j.shape.rows.clone(), j.shape.cols.clone()).map_err(|e| Error::parse(name, e.to_string()))?;
        if j.data.len() != shape.len() {
            return Err(Error::parse(
                name,
                format!("shape {shape} needs {} entries, data has {}", shape.len(), j.data.len()),
            ));
        }
        let nc = shape.total_cols();
        for (n, q) in j.data.iter().enumerate() {
            if q.iter().any(|v| !v.is_finite()) {
                let r = unravel(n / nc, shape.row_dims());
                let c = unravel(n % nc, shape.col_dims());
                return Err(Error::parse(name, format!("non-finite entry at row {r:?}, col {c:?}")));
            }
        }
        QTensor::new(shape, j.data.iter().map(|&a| Quaternion::from_array(a)).collect())
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("tensor serialization")
    }

    pub fn from_json_str(name: &str, s: &str) -> Result<Self> {
        let j: TensorJson = serde_json::from_str(s).map_err(|e| Error::parse(name, e.to_string()))?;
        Self::from_json(name, &j)
    }
}
