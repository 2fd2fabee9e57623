//! One-sided inequality checks with explicit margins.

use serde::{Deserialize, Serialize};

/// The outcome of checking `lhs ≤ rhs`.
///
/// `margin = rhs − lhs`, so a nonnegative margin means the inequality holds
/// as computed; `pass` additionally admits a violation of at most
/// `tolerance`, which carries the numerical error of the two sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// `lhs ≤ rhs` up to `tolerance`.
    pub fn le(name: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let margin = rhs - lhs;
        Self {
            name: name.to_string(),
            lhs,
            rhs,
            margin,
            tolerance,
            pass: margin >= -tolerance,
        }
    }

    /// `lhs < rhs` strictly, with no tolerance.
    pub fn lt(name: &str, lhs: f64, rhs: f64) -> Self {
        let margin = rhs - lhs;
        Self {
            name: name.to_string(),
            lhs,
            rhs,
            margin,
            tolerance: 0.0,
            pass: margin > 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margins_and_tolerance() {
        let c = Check::le("x", 1.0, 2.0, 0.0);
        assert!(c.pass && c.margin == 1.0);
        assert!(Check::le("x", 2.0 + 1e-12, 2.0, 1e-11).pass);
        assert!(!Check::le("x", 2.1, 2.0, 1e-11).pass);
        assert!(!Check::lt("x", 2.0, 2.0).pass);
        assert!(!Check::le("x", f64::NAN, 2.0, 1.0).pass);
    }
}
