//! Pointwise index scans along one-parameter tensor families.

use crate::config::Config;
use crate::mps::{normalize, primitivity, RawTuple};
use crate::reflection::z2_index_run;
use crate::status::{HasStatus, Status};
use crate::zoo::{self, Generator, ZooError};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScanError {
    #[error("malformed family: {0}")]
    Malformed(String),

    #[error(transparent)]
    Zoo(#[from] ZooError),
}

impl HasStatus for ScanError {
    fn status(&self) -> Status {
        Status::InputError
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TablePoint {
    pub s: f64,
    pub tuple: RawTuple,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilySource {
    Model(Generator),
    Table(Vec<TablePoint>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub name: String,
    pub s0: f64,
    pub s1: f64,
    pub grid: usize,
    pub source: FamilySource,
}

impl FamilySpec {
    /// Built-in family (or constant model) over its default range.
    pub fn builtin(name: &str) -> Result<Self, ScanError> {
        let (generator, s0, s1, grid) = zoo::family(name)?;
        Ok(Self { name: name.to_string(), s0, s1, grid, source: FamilySource::Model(generator) })
    }

    pub fn from_table(name: &str, points: Vec<TablePoint>) -> Result<Self, ScanError> {
        let (s0, s1) = match (points.first(), points.last()) {
            (Some(a), Some(b)) => (a.s, b.s),
            _ => return Err(ScanError::Malformed("table has no points".into())),
        };
        let spec =
            Self { name: name.to_string(), s0, s1, grid: points.len(), source: FamilySource::Table(points) };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), ScanError> {
        if self.grid < 2 {
            return Err(ScanError::Malformed(format!("grid must be at least 2, got {}", self.grid)));
        }
        if !self.s0.is_finite() || !self.s1.is_finite() {
            return Err(ScanError::Malformed("range must be finite".into()));
        }
        match &self.source {
            FamilySource::Model(Generator::Constant { model }) => {
                zoo::model(model)?;
            }
            FamilySource::Model(_) => {}
            FamilySource::Table(points) => {
                if points.len() != self.grid {
                    return Err(ScanError::Malformed("grid must equal the number of table points".into()));
                }
                if points.iter().any(|p| !p.s.is_finite()) {
                    return Err(ScanError::Malformed("table parameters must be finite".into()));
                }
                if points.windows(2).any(|w| w[0].s >= w[1].s) {
                    return Err(ScanError::Malformed("table parameters must increase".into()));
                }
            }
        }
        Ok(())
    }

    /// Grid parameters `s_i = s0 + i (s1 − s0)/(grid − 1)`.
    pub fn points(&self) -> Vec<f64> {
        match &self.source {
            FamilySource::Table(points) => points.iter().map(|p| p.s).collect(),
            FamilySource::Model(_) => {
                let step = (self.s1 - self.s0) / (self.grid - 1) as f64;
                (0..self.grid)
                    .map(|i| if i + 1 == self.grid { self.s1 } else { self.s0 + step * i as f64 })
                    .collect()
            }
        }
    }

    fn tuple_at(&self, i: usize, s: f64) -> Result<RawTuple, ZooError> {
        match &self.source {
            FamilySource::Model(g) => g.at(s),
            FamilySource::Table(points) => Ok(points[i].tuple.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub s: f64,
    pub primitive: bool,
    pub reflection_invariant: bool,
    pub zeta: Option<i8>,
    /// `1 −` second-largest transfer eigenvalue modulus.
    pub transfer_gap: Option<f64>,
    pub status: Status,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    /// Every defined index agrees and at least one is defined.
    pub constant_index: bool,
    pub index_value: Option<i8>,
    /// First grid parameter without an index.
    pub first_failure: Option<f64>,
    pub defined_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub family: String,
    pub s0: f64,
    pub s1: f64,
    pub grid: usize,
    pub points: Vec<ScanPoint>,
    pub summary: ScanSummary,
}

fn evaluate(raw: Result<RawTuple, ZooError>, s: f64, cfg: &Config) -> ScanPoint {
    let mut point = ScanPoint {
        s,
        primitive: false,
        reflection_invariant: false,
        zeta: None,
        transfer_gap: None,
        status: Status::Ok,
        error: None,
    };
    let fail = |mut p: ScanPoint, status: Status, msg: String| {
        p.status = status;
        p.error = Some(msg);
        p
    };
    let raw = match raw {
        Ok(r) => r,
        Err(e) => return fail(point, e.status(), e.to_string()),
    };
    let cert = match normalize(&raw, cfg).and_then(|v| primitivity(&v, cfg)) {
        Ok(c) => c,
        Err(e) => return fail(point, e.status(), e.to_string()),
    };
    point.transfer_gap = Some(cert.spectral_gap);
    point.primitive = cert.is_primitive;
    if !cert.is_primitive {
        return fail(point, Status::NotPrimitive, "tuple is not primitive".into());
    }
    match z2_index_run(&raw, cfg) {
        Ok(run) => {
            point.reflection_invariant = true;
            point.zeta = Some(run.report.zeta);
            point
        }
        Err(e) => fail(point, e.status(), e.to_string()),
    }
}

fn summarize(points: &[ScanPoint]) -> ScanSummary {
    let defined: Vec<i8> = points.iter().filter_map(|p| p.zeta).collect();
    let first = defined.first().copied();
    let agree = defined.iter().all(|&z| Some(z) == first);
    ScanSummary {
        constant_index: first.is_some() && agree,
        index_value: if agree { first } else { None },
        first_failure: points.iter().find(|p| p.zeta.is_none()).map(|p| p.s),
        defined_points: defined.len(),
    }
}

/// Evaluate the index at every grid point on `jobs` worker threads.
pub fn scan(family: &FamilySpec, cfg: &Config, jobs: usize) -> Result<ScanReport, ScanError> {
    family.validate()?;
    let params = family.points();
    let eval = |(i, &s): (usize, &f64)| evaluate(family.tuple_at(i, s), s, cfg);
    let points: Vec<ScanPoint> = if jobs <= 1 {
        params.iter().enumerate().map(eval).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| ScanError::Malformed(format!("cannot start {jobs} workers: {e}")))?;
        pool.install(|| params.par_iter().enumerate().map(eval).collect())
    };
    Ok(ScanReport {
        family: family.name.clone(),
        s0: family.s0,
        s1: family.s1,
        grid: family.grid,
        summary: summarize(&points),
        points,
    })
}

/// Fixed-width text rendering of a scan.
pub fn render_table(report: &ScanReport) -> String {
    let mut out = format!(
        "{:>10}  {:>9}  {:>10}  {:>5}  {:>12}  {}\n",
        "s", "primitive", "reflection", "zeta", "transfer_gap", "status"
    );
    for p in &report.points {
        out.push_str(&format!(
            "{:>10.6}  {:>9}  {:>10}  {:>5}  {:>12}  {}\n",
            p.s,
            p.primitive,
            p.reflection_invariant,
            p.zeta.map(|z| format!("{z:+}")).unwrap_or_else(|| "-".into()),
            p.transfer_gap.map(|g| format!("{g:.6}")).unwrap_or_else(|| "-".into()),
            p.status
        ));
    }
    let s = &report.summary;
    out.push_str(&format!(
        "constant_index: {}  index: {}  first_failure: {}\n",
        s.constant_index,
        s.index_value.map(|z| format!("{z:+}")).unwrap_or_else(|| "-".into()),
        s.first_failure.map(|f| format!("{f}")).unwrap_or_else(|| "-".into())
    ));
    out
}
