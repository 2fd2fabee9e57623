//! Input errors, reported as JSON on standard error with exit status 2.

use makai_core::families::FamilyError;
use makai_core::fem::FemError;
use makai_core::geometry::GeometryError;
use makai_core::lab::LabError;
use makai_core::profile::ProfileError;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliError {
    pub kind: String,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            kind: "InvalidInput".into(),
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            kind: "Io".into(),
            message: message.into(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self }).to_string()
    }
}

/// The variant name of an error enum, from its `Debug` form.
fn variant<E: std::fmt::Debug>(e: &E) -> String {
    let debug = format!("{e:?}");
    debug
        .split(|c: char| !c.is_alphanumeric() && c != '_')
        .next()
        .unwrap_or("Error")
        .to_string()
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        Self {
            kind: variant(&e),
            message: e.to_string(),
        }
    }
}

impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::Geometry(g) => g.into(),
            other => Self {
                kind: variant(&other),
                message: other.to_string(),
            },
        }
    }
}

impl From<FemError> for CliError {
    fn from(e: FemError) -> Self {
        match e {
            FemError::Geometry(g) => g.into(),
            other => Self {
                kind: variant(&other),
                message: other.to_string(),
            },
        }
    }
}

impl From<ProfileError> for CliError {
    fn from(e: ProfileError) -> Self {
        match e {
            ProfileError::Geometry(g) => g.into(),
            other => Self {
                kind: variant(&other),
                message: other.to_string(),
            },
        }
    }
}

impl From<LabError> for CliError {
    fn from(e: LabError) -> Self {
        match e {
            LabError::Geometry(g) => g.into(),
            LabError::Family(f) => f.into(),
            LabError::Fem(f) => f.into(),
            other => Self {
                kind: variant(&other),
                message: other.to_string(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_come_from_the_innermost_variant() {
        let e: CliError = LabError::Geometry(GeometryError::Unbounded).into();
        assert_eq!(e.kind, "Unbounded");
        let e: CliError = FemError::MeshBudgetExceeded { nodes: 5, cap: 1 }.into();
        assert_eq!(e.kind, "MeshBudgetExceeded");
        assert!(e.to_json().starts_with("{\"error\":{\"kind\":"));
    }
}
