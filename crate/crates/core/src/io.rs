//! JSON file formats and the canonical digest of an input.

use crate::linalg::ComplexMatrix;
use crate::modular::BipartiteVector;
use crate::mps::RawTuple;
use crate::scan::{FamilySpec, TablePoint};
use crate::status::{HasStatus, Status};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IoError {
    #[error("cannot read {path}: {reason}")]
    Read { path: String, reason: String },

    #[error("invalid JSON: {0}")]
    Parse(String),

    #[error("invalid shape: {0}")]
    Shape(String),

    #[error("non-finite number in input")]
    NonFinite,
}

impl HasStatus for IoError {
    fn status(&self) -> Status {
        Status::InputError
    }
}

pub type IoResult<T> = Result<T, IoError>;

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> IoResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| IoError::Read { path: path.display().to_string(), reason: e.to_string() })?;
    serde_json::from_str(&text).map_err(|e| IoError::Parse(e.to_string()))
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn complex(p: [f64; 2]) -> IoResult<C64> {
    if p[0].is_finite() && p[1].is_finite() {
        Ok(C64::new(p[0], p[1]))
    } else {
        Err(IoError::NonFinite)
    }
}

/// `{"d", "k", "matrices"}` with `d` matrices of `k` rows of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleFile {
    pub d: usize,
    pub k: usize,
    pub matrices: Vec<Vec<Vec<[f64; 2]>>>,
}

impl TupleFile {
    pub fn from_raw(raw: &RawTuple) -> Self {
        let matrices = raw
            .mats()
            .iter()
            .map(|m| (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| pair(m[(i, j)])).collect()).collect())
            .collect();
        Self { d: raw.d(), k: raw.k(), matrices }
    }

    pub fn to_raw(&self) -> IoResult<RawTuple> {
        if self.d < 2 || self.k < 1 {
            return Err(IoError::Shape(format!("need d ≥ 2 and k ≥ 1, got d={} k={}", self.d, self.k)));
        }
        if self.matrices.len() != self.d {
            return Err(IoError::Shape(format!(
                "expected {} matrices, found {}",
                self.d,
                self.matrices.len()
            )));
        }
        let mut mats = Vec::with_capacity(self.d);
        for (idx, rows) in self.matrices.iter().enumerate() {
            if rows.len() != self.k || rows.iter().any(|r| r.len() != self.k) {
                return Err(IoError::Shape(format!("matrix {idx} is not {0}x{0}", self.k)));
            }
            let mut m = ComplexMatrix::zeros(self.k, self.k);
            for (i, row) in rows.iter().enumerate() {
                for (j, &p) in row.iter().enumerate() {
                    m[(i, j)] = complex(p)?;
                }
            }
            mats.push(m);
        }
        RawTuple::new(mats).map_err(|e| IoError::Shape(e.to_string()))
    }
}

/// `{"m", "entries"}` with `m²` pairs in the order `e_j ⊗ e_l ↦ j·m + l`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorFile {
    pub m: usize,
    pub entries: Vec<[f64; 2]>,
}

impl VectorFile {
    pub fn from_vector(v: &BipartiteVector) -> Self {
        Self { m: v.m(), entries: v.entries().into_iter().map(pair).collect() }
    }

    /// Entries as complex numbers, shape checked; normalization happens later.
    pub fn components(&self) -> IoResult<Vec<C64>> {
        if self.m == 0 || self.entries.len() != self.m * self.m {
            return Err(IoError::Shape(format!(
                "expected {} entries for m = {}, found {}",
                self.m * self.m,
                self.m,
                self.entries.len()
            )));
        }
        self.entries.iter().map(|&p| complex(p)).collect()
    }
}

/// One row of a tabulated family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanTablePoint {
    pub s: f64,
    pub tuple: TupleFile,
}

/// Scan input: a named built-in family (optionally re-ranged) or a table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<ScanTablePoint>>,
}

impl ScanSpecFile {
    pub fn to_family(&self) -> IoResult<FamilySpec> {
        let bad = |e: crate::scan::ScanError| IoError::Shape(e.to_string());
        let spec = match (&self.family, &self.points) {
            (Some(family), None) => {
                let mut spec = FamilySpec::builtin(family).map_err(bad)?;
                if let Some([s0, s1]) = self.range {
                    spec.s0 = s0;
                    spec.s1 = s1;
                }
                if let Some(grid) = self.grid {
                    spec.grid = grid;
                }
                if let Some(name) = &self.name {
                    spec.name = name.clone();
                }
                spec
            }
            (None, Some(points)) => {
                if self.range.is_some() || self.grid.is_some() {
                    return Err(IoError::Shape("tabulated families take no range or grid".into()));
                }
                let table = points
                    .iter()
                    .map(|p| Ok(TablePoint { s: p.s, tuple: p.tuple.to_raw()? }))
                    .collect::<IoResult<Vec<_>>>()?;
                FamilySpec::from_table(self.name.as_deref().unwrap_or("table"), table).map_err(bad)?
            }
            _ => return Err(IoError::Shape("give exactly one of `family` and `points`".into())),
        };
        spec.validate().map_err(bad)?;
        Ok(spec)
    }
}

/// Sorted keys, no whitespace, every float as `{:.16e}` (17 significant digits).
pub fn canonical_json(value: &Value) -> String {
    let mut out = String::new();
    write_canonical(value, &mut out);
    out
}

fn write_canonical(value: &Value, out: &mut String) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                let _ = write!(out, "{i}");
            } else if let Some(u) = n.as_u64() {
                let _ = write!(out, "{u}");
            } else {
                let _ = write!(out, "{:.16e}", n.as_f64().unwrap_or(f64::NAN));
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("strings serialize")),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_canonical(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, key) in keys.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(key).expect("strings serialize"));
                out.push(':');
                write_canonical(&map[*key], out);
            }
            out.push('}');
        }
    }
}

/// Hex SHA-256 of the canonical form.
pub fn digest<T: Serialize>(input: &T) -> String {
    let value = serde_json::to_value(input).expect("inputs serialize to JSON");
    hex::encode(Sha256::digest(canonical_json(&value).as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo;
    use serde_json::json;

    #[test]
    fn tuple_file_round_trip() {
        let raw = zoo::aklt();
        let file = TupleFile::from_raw(&raw);
        let text = serde_json::to_string(&file).unwrap();
        let back: TupleFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_raw().unwrap(), raw);
    }

    #[test]
    fn tuple_file_shape_errors() {
        let mut file = TupleFile::from_raw(&zoo::aklt());
        file.d = 4;
        assert!(matches!(file.to_raw(), Err(IoError::Shape(_))));
        let mut file = TupleFile::from_raw(&zoo::aklt());
        file.matrices[1][0].pop();
        assert!(matches!(file.to_raw(), Err(IoError::Shape(_))));
        let mut file = TupleFile::from_raw(&zoo::aklt());
        file.matrices[0][0][0] = [f64::INFINITY, 0.0];
        assert!(matches!(file.to_raw(), Err(IoError::NonFinite)));
        let unknown = r#"{"d":2,"k":1,"matrices":[[[[1,0]]],[[[0,0]]]],"extra":1}"#;
        assert!(serde_json::from_str::<TupleFile>(unknown).is_err());
    }

    #[test]
    fn vector_file_checks() {
        let f = VectorFile { m: 2, entries: vec![[1.0, 0.0]; 3] };
        assert!(f.components().is_err());
        let f = VectorFile { m: 2, entries: vec![[0.5, 0.0]; 4] };
        assert_eq!(f.components().unwrap().len(), 4);
    }

    #[test]
    fn canonical_form() {
        let v = json!({"b": 1, "a": [0.5, -2, "x"], "c": {"z": null, "y": true}});
        assert_eq!(
            canonical_json(&v),
            r#"{"a":[5.0000000000000000e-1,-2,"x"],"b":1,"c":{"y":true,"z":null}}"#
        );
    }

    #[test]
    fn digest_ignores_key_order_and_formatting() {
        let a: Value = serde_json::from_str(r#"{"k": 1, "d": 2, "x": 0.1}"#).unwrap();
        let b: Value = serde_json::from_str("{\"d\":2,\n \"x\":1e-1, \"k\":1}").unwrap();
        assert_eq!(digest(&a), digest(&b));
        assert_eq!(digest(&a).len(), 64);
        let c: Value = serde_json::from_str(r#"{"k": 1, "d": 2, "x": 0.2}"#).unwrap();
        assert_ne!(digest(&a), digest(&c));
    }

    #[test]
    fn scan_spec_variants() {
        let f: ScanSpecFile = serde_json::from_str(r#"{"family":"aklt-breaker","grid":3}"#).unwrap();
        let spec = f.to_family().unwrap();
        assert_eq!(spec.points(), vec![0.0, 0.25, 0.5]);
        let table = ScanSpecFile {
            name: Some("t".into()),
            family: None,
            range: None,
            grid: None,
            points: Some(vec![
                ScanTablePoint { s: 0.0, tuple: TupleFile::from_raw(&zoo::aklt()) },
                ScanTablePoint { s: 1.0, tuple: TupleFile::from_raw(&zoo::deformed_aklt(1.0)) },
            ]),
        };
        assert_eq!(table.to_family().unwrap().grid, 2);
        let both: ScanSpecFile = serde_json::from_str(r#"{"family":"aklt","points":[]}"#).unwrap();
        assert!(both.to_family().is_err());
        let bad_grid: ScanSpecFile = serde_json::from_str(r#"{"family":"deformed-aklt","grid":1}"#).unwrap();
        assert!(bad_grid.to_family().is_err());
    }
}
