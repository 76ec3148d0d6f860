//! Built-in tensor models and one-parameter families.
//!
//! Model strings follow `name` or `name:arg,arg,…`. Arguments are real or
//! complex literals such as `0.5`, `-2`, `0.707i`, `1-0.5i`.

use crate::linalg::{c, ComplexMatrix};
use crate::mps::RawTuple;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZooError {
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("bad arguments for `{model}`: {reason}")]
    BadArguments { model: String, reason: String },
    #[error("cannot parse number `{0}`")]
    BadNumber(String),
}

/// Names accepted by [`model`], with their argument forms.
pub const MODELS: &[(&str, &str)] = &[
    ("aklt", "spin-1 AKLT tuple (d=3, k=2)"),
    ("product:φ_1,…,φ_d", "product state with local vector φ (k=1)"),
    ("ghz", "GHZ pair diag(1,0), diag(0,1) (d=2, k=2, not primitive)"),
    ("deformed-aklt:s", "(α σ⁺, β σᶻ, −α σ⁻), α = √((2−s)/3), β = √((1+s)/3)"),
    ("aklt-breaker:s", "AKLT with s·1 added to the middle generator"),
];

/// Families accepted by [`family`], with their default ranges.
pub const FAMILIES: &[(&str, f64, f64, usize)] =
    &[("deformed-aklt", 0.0, 1.0, 11), ("aklt-breaker", 0.0, 0.5, 11)];

fn real(m: [[f64; 2]; 2]) -> ComplexMatrix {
    ComplexMatrix::from_fn(2, 2, |i, j| c(m[i][j], 0.0))
}

fn sigma_plus() -> ComplexMatrix {
    real([[0.0, 1.0], [0.0, 0.0]])
}

fn sigma_minus() -> ComplexMatrix {
    real([[0.0, 0.0], [1.0, 0.0]])
}

fn sigma_z() -> ComplexMatrix {
    real([[1.0, 0.0], [0.0, -1.0]])
}

fn tuple(mats: Vec<ComplexMatrix>) -> RawTuple {
    RawTuple::new(mats).expect("zoo tuples are well formed")
}

/// `(√(2/3) σ⁺, −σᶻ/√3, −√(2/3) σ⁻)`.
pub fn aklt() -> RawTuple {
    let a = (2.0f64 / 3.0).sqrt();
    let b = 1.0 / 3.0f64.sqrt();
    tuple(vec![sigma_plus().scale(a), sigma_z().scale(-b), sigma_minus().scale(-a)])
}

/// `(α σ⁺, β σᶻ, −α σ⁻)` with `α² + β² = 1`; normalized for `s ∈ [−1, 2]`.
pub fn deformed_aklt(s: f64) -> RawTuple {
    let a = ((2.0 - s) / 3.0).max(0.0).sqrt();
    let b = ((1.0 + s) / 3.0).max(0.0).sqrt();
    tuple(vec![sigma_plus().scale(a), sigma_z().scale(b), sigma_minus().scale(-a)])
}

/// AKLT with `s·1` added to the `σᶻ` generator (unnormalized).
///
/// For `s ≠ 0` the state is not reflection invariant: the middle generator
/// then has eigenvalues `s ∓ 1/√3` of distinct modulus, which survives the
/// spectral comparison `v_0 ~ e^{it} ρ^{−1/2} v_0ᵀ ρ^{1/2}` forced by a gauge.
pub fn aklt_breaker(s: f64) -> RawTuple {
    let mut mats = aklt().mats().to_vec();
    mats[1] += ComplexMatrix::identity(2, 2).scale(s);
    tuple(mats)
}

/// `k = 1` tuple `(φ_1, …, φ_d)`.
pub fn product(phi: &[C64]) -> RawTuple {
    tuple(phi.iter().map(|&z| ComplexMatrix::from_element(1, 1, z)).collect())
}

pub fn ghz() -> RawTuple {
    tuple(vec![real([[1.0, 0.0], [0.0, 0.0]]), real([[0.0, 0.0], [0.0, 1.0]])])
}

/// Parse `a`, `bi`, `a+bi`, `a-bi` (also `i`, `-i`).
pub fn parse_complex(text: &str) -> Result<C64, ZooError> {
    let t: String = text.chars().filter(|ch| !ch.is_whitespace()).collect();
    let bad = || ZooError::BadNumber(text.to_string());
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return t.parse::<f64>().map(|re| c(re, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not part of an exponent and not leading
    let bytes = body.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            split = Some(i);
            break;
        }
    }
    let imag = |s: &str| -> Result<f64, ZooError> {
        match s {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => s.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(i) => {
            let re = body[..i].parse::<f64>().map_err(|_| bad())?;
            Ok(c(re, imag(&body[i..])?))
        }
        None => Ok(c(0.0, imag(body)?)),
    }
}

fn split_spec(spec: &str) -> (&str, Vec<&str>) {
    match spec.split_once(':') {
        Some((name, args)) => (name.trim(), args.split(',').map(str::trim).collect()),
        None => (spec.trim(), Vec::new()),
    }
}

fn real_arg(model: &str, args: &[&str]) -> Result<f64, ZooError> {
    if args.len() != 1 {
        return Err(ZooError::BadArguments {
            model: model.into(),
            reason: format!("expected one real parameter, got {}", args.len()),
        });
    }
    let z = parse_complex(args[0])?;
    if z.im != 0.0 || !z.re.is_finite() {
        return Err(ZooError::BadArguments {
            model: model.into(),
            reason: "parameter must be a finite real number".into(),
        });
    }
    Ok(z.re)
}

fn no_args(model: &str, args: &[&str]) -> Result<(), ZooError> {
    if args.is_empty() {
        Ok(())
    } else {
        Err(ZooError::BadArguments { model: model.into(), reason: "takes no arguments".into() })
    }
}

/// Build a raw tuple from a model string.
pub fn model(spec: &str) -> Result<RawTuple, ZooError> {
    let (name, args) = split_spec(spec);
    match name {
        "aklt" => no_args(name, &args).map(|_| aklt()),
        "ghz" => no_args(name, &args).map(|_| ghz()),
        "deformed-aklt" => real_arg(name, &args).map(deformed_aklt),
        "aklt-breaker" => real_arg(name, &args).map(aklt_breaker),
        "product" => {
            if args.len() < 2 {
                return Err(ZooError::BadArguments {
                    model: name.into(),
                    reason: "needs at least two amplitudes".into(),
                });
            }
            let phi = args.iter().map(|a| parse_complex(a)).collect::<Result<Vec<_>, _>>()?;
            if phi.iter().all(|z| z.norm() == 0.0) || phi.iter().any(|z| !z.is_finite()) {
                return Err(ZooError::BadArguments {
                    model: name.into(),
                    reason: "amplitudes must be finite and not all zero".into(),
                });
            }
            Ok(product(&phi))
        }
        _ => Err(ZooError::UnknownModel(spec.to_string())),
    }
}

/// Generator of a one-parameter family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Generator {
    DeformedAklt,
    AkltBreaker,
    /// A fixed model at every point.
    Constant {
        model: String,
    },
}

impl Generator {
    pub fn at(&self, s: f64) -> Result<RawTuple, ZooError> {
        match self {
            Generator::DeformedAklt => Ok(deformed_aklt(s)),
            Generator::AkltBreaker => Ok(aklt_breaker(s)),
            Generator::Constant { model: m } => model(m),
        }
    }
}

/// Resolve a family name; a model string `product:…` etc. gives a constant family.
pub fn family(name: &str) -> Result<(Generator, f64, f64, usize), ZooError> {
    let name = name.trim();
    if let Some(&(_, s0, s1, grid)) = FAMILIES.iter().find(|f| f.0 == name) {
        let gen = if name == "deformed-aklt" { Generator::DeformedAklt } else { Generator::AkltBreaker };
        return Ok((gen, s0, s1, grid));
    }
    model(name)?;
    Ok((Generator::Constant { model: name.to_string() }, 0.0, 1.0, 11))
}
