//! Reading models, tuples and series tables from files and flags.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::Arc;

use monoprob::series::Series;
use monoprob::{BMatrix, BlockMatrix, CumulantSystem, Error, MatrixModel, Result};
use serde_json::Value;

pub const MAX_DEGREE: usize = 6;

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn load_model(path: &Path) -> Result<MatrixModel> {
    MatrixModel::from_json(&read(path)?).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn degree(value: usize) -> Result<usize> {
    if value == 0 || value > MAX_DEGREE {
        return Err(Error::Domain(format!("degree must be in 1..={MAX_DEGREE}, got {value}")));
    }
    Ok(value)
}

fn parse_json<T: serde::de::DeserializeOwned>(flag: &str, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("--{flag}: {e}")))
}

/// 1-based component indices to 0-based.
pub fn indices(text: &str, r: usize) -> Result<Vec<usize>> {
    let raw: Vec<usize> = parse_json("indices", text)?;
    raw.iter()
        .map(|&i| if i == 0 || i > r { Err(Error::IndexOutOfRange { index: i, r }) } else { Ok(i - 1) })
        .collect()
}

/// Explicit argument matrices, or identities when absent.
pub fn args(text: Option<&str>, n: usize, d: usize) -> Result<Vec<BMatrix>> {
    let Some(text) = text else {
        return Ok(vec![BMatrix::identity(d); n]);
    };
    let b: Vec<BMatrix> = parse_json("args", text)?;
    if b.len() != n {
        return Err(Error::Dimension(format!("{} arguments for a word of length {n}", b.len())));
    }
    if let Some(m) = b.iter().find(|m| m.dim() != d) {
        return Err(Error::Dimension(format!("argument of size {} in a model with d = {d}", m.dim())));
    }
    Ok(b)
}

/// The model restricted to one variable.
pub fn single_variable(model: &MatrixModel, name: Option<&str>) -> Result<MatrixModel> {
    let i = match name {
        Some(name) => model
            .names()
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::Domain(format!("no variable named {name:?}")))?,
        None if model.r() == 1 => 0,
        None => return Err(Error::Domain(format!("model has {} variables; choose one with --variable", model.r()))),
    };
    let variables: BTreeMap<String, BlockMatrix> = [(model.names()[i].clone(), model.variable(i).clone())].into_iter().collect();
    MatrixModel::new(model.d(), model.k(), model.weights().to_vec(), variables)
}

/// A series table as written by `moments` and `cumulants`.
pub struct Table {
    pub r: usize,
    pub d: usize,
    pub degree: usize,
    pub constant: BMatrix,
    values: HashMap<(Vec<usize>, Vec<usize>), BMatrix>,
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Parse(format!("series table has no {key:?} field")))
}

fn usize_field(v: &Value, key: &str) -> Result<usize> {
    field(v, key)?.as_u64().map(|x| x as usize).ok_or_else(|| Error::Parse(format!("{key:?} is not a nonnegative integer")))
}

impl Table {
    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let (r, d, degree) = (usize_field(&v, "r")?, usize_field(&v, "d")?, usize_field(&v, "degree")?);
        let constant: BMatrix = serde_json::from_value(field(&v, "constant")?.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let entries = field(&v, "entries")?.as_array().ok_or_else(|| Error::Parse("\"entries\" is not an array".into()))?;
        let mut values = HashMap::new();
        for e in entries {
            let idx: Vec<usize> = serde_json::from_value(field(e, "indices")?.clone()).map_err(|e| Error::Parse(e.to_string()))?;
            let pos: Vec<[usize; 2]> = serde_json::from_value(field(e, "args")?.clone()).map_err(|e| Error::Parse(e.to_string()))?;
            let value: BMatrix = serde_json::from_value(field(e, "value")?.clone()).map_err(|e| Error::Parse(e.to_string()))?;
            let bad_index = idx.iter().any(|&i| i == 0 || i > r);
            let bad_unit = pos.iter().any(|&[a, b]| a == 0 || b == 0 || a > d || b > d);
            if bad_index || bad_unit || idx.len() != pos.len() || value.dim() != d {
                return Err(Error::Parse(format!("malformed entry {e}")));
            }
            let units = pos.iter().map(|&[a, b]| (a - 1) * d + (b - 1)).collect();
            values.insert((idx.iter().map(|i| i - 1).collect(), units), value);
        }
        let expected: usize = (1..=degree).map(|n| (r * d * d).pow(n as u32)).sum();
        if values.len() != expected || constant.dim() != d {
            return Err(Error::Parse(format!("series table has {} entries, expected {expected}", values.len())));
        }
        Ok(Table { r, d, degree, constant, values })
    }

    /// The cumulant system extended multilinearly from the table.
    pub fn cumulants(self) -> CumulantSystem {
        let values = Arc::new(self.values);
        let series = Series::from_unit_values(self.r, self.degree, BMatrix::zero(self.d), move |i, u| {
            values[&(i.to_vec(), u.to_vec())].clone()
        });
        CumulantSystem::from_fn(self.r, self.d, self.degree, move |i, b| series.eval(i, b).expect("validated by the system"))
    }
}
