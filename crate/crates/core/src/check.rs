//! A named, evaluated inequality or identity.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl Check {
    /// `lhs ≤ rhs + slack`.
    pub fn le(name: impl Into<String>, lhs: f64, rhs: f64, slack: f64) -> Self {
        Self { name: name.into(), lhs, rhs, holds: lhs <= rhs + slack }
    }

    /// `|lhs − rhs| ≤ tol`.
    pub fn eq(name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        Self { name: name.into(), lhs, rhs, holds: (lhs - rhs).abs() <= tol }
    }

    /// A boolean property with no numeric sides.
    pub fn flag(name: impl Into<String>, holds: bool) -> Self {
        let v = if holds { 1.0 } else { 0.0 };
        Self { name: name.into(), lhs: v, rhs: 1.0, holds }
    }

    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }
}
