//! Outcome taxonomy shared by the library errors and the command line.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Stable outcome codes; `code()` is the process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    InputError,
    NotPrimitive,
    NotReflectionInvariant,
    AmbiguousSymmetry,
    DegenerateSupport,
    NumericalFailure,
    DimensionCap,
    NotNormalizable,
    Inconclusive,
}

impl Status {
    pub const ALL: [Status; 10] = [
        Status::Ok,
        Status::InputError,
        Status::NotPrimitive,
        Status::NotReflectionInvariant,
        Status::AmbiguousSymmetry,
        Status::DegenerateSupport,
        Status::NumericalFailure,
        Status::DimensionCap,
        Status::NotNormalizable,
        Status::Inconclusive,
    ];

    pub fn code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::InputError => 1,
            Status::NotPrimitive => 2,
            Status::NotReflectionInvariant => 3,
            Status::AmbiguousSymmetry => 4,
            Status::DegenerateSupport => 5,
            Status::NumericalFailure => 6,
            Status::DimensionCap => 7,
            Status::NotNormalizable => 8,
            Status::Inconclusive => 9,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::InputError => "input_error",
            Status::NotPrimitive => "not_primitive",
            Status::NotReflectionInvariant => "not_reflection_invariant",
            Status::AmbiguousSymmetry => "ambiguous_symmetry",
            Status::DegenerateSupport => "degenerate_support",
            Status::NumericalFailure => "numerical_failure",
            Status::DimensionCap => "dimension_cap",
            Status::NotNormalizable => "not_normalizable",
            Status::Inconclusive => "inconclusive",
        }
    }

    pub fn from_code(code: i32) -> Option<Status> {
        Status::ALL.into_iter().find(|s| s.code() == code)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Status::ALL.into_iter().find(|st| st.as_str() == s).ok_or_else(|| format!("unknown status `{s}`"))
    }
}

/// Errors that map onto a [`Status`].
pub trait HasStatus {
    fn status(&self) -> Status;
}

impl HasStatus for crate::linalg::LinalgError {
    fn status(&self) -> Status {
        Status::NumericalFailure
    }
}

impl HasStatus for crate::mps::MpsError {
    fn status(&self) -> Status {
        use crate::mps::MpsError::*;
        match self {
            TooFewMatrices(_) | ShapeMismatch { .. } | NonFinite | NotNormalized { .. } => Status::InputError,
            NotNormalizable => Status::NotNormalizable,
            NotPrimitive { .. } => Status::NotPrimitive,
            NotFaithful { .. } | Linalg(_) => Status::NumericalFailure,
            WindowTooLarge { .. } => Status::DimensionCap,
            CertificateDisagreement(_) => Status::Inconclusive,
        }
    }
}

impl HasStatus for crate::zoo::ZooError {
    fn status(&self) -> Status {
        Status::InputError
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn codes_and_names_are_bijective() {
        let codes: HashSet<i32> = Status::ALL.iter().map(|s| s.code()).collect();
        let names: HashSet<&str> = Status::ALL.iter().map(|s| s.as_str()).collect();
        assert_eq!(codes.len(), Status::ALL.len());
        assert_eq!(names.len(), Status::ALL.len());
        for s in Status::ALL {
            assert_eq!(Status::from_code(s.code()), Some(s));
            assert_eq!(s.as_str().parse::<Status>().unwrap(), s);
            assert_eq!(serde_json::to_string(&s).unwrap(), format!("\"{}\"", s.as_str()));
        }
    }
}
