//! Constructive evidence: Dulac functions, first integrals and Lyapunov
//! functions, forward-invariant sets and boundary-approach curves.
//!
//! Every certificate carries a numerical verification report. A grid check is
//! evidence, not proof, and reports are tagged `"numerical"` accordingly.

mod boundary;
mod dulac;
mod integral;
mod invariant;

pub use boundary::*;
pub use dulac::*;
pub use integral::*;
pub use invariant::*;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerificationKind {
    #[default]
    Numerical,
}

/// A square grid in log coordinates `(ln x, ln y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub center: (f64, f64),
    pub half_width: f64,
    pub points_per_axis: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { center: (0.0, 0.0), half_width: 1e3f64.ln(), points_per_axis: 201 }
    }
}

impl GridSpec {
    pub fn centered(center: (f64, f64)) -> Self {
        GridSpec { center, ..Default::default() }
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points_per_axis - 1) as f64
    }

    /// Log coordinate of index `i` along an axis centred at `c`; the middle
    /// index maps exactly onto `c`.
    pub fn coord(&self, c: f64, i: usize) -> f64 {
        let m = (self.points_per_axis - 1) as f64;
        c + self.half_width * (2.0 * i as f64 - m) / m
    }

    /// All grid points `(u, v)` in row-major order.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let n = self.points_per_axis;
        (0..n * n).map(|k| (self.coord(self.center.0, k / n), self.coord(self.center.1, k % n))).collect()
    }

    pub(crate) fn validate(&self) -> crate::Result<()> {
        if self.points_per_axis < 2 || !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return Err(crate::GlvError::invalid(format!(
                "grid needs at least 2 points per axis and a positive half-width, got {} and {}",
                self.points_per_axis, self.half_width
            )));
        }
        Ok(())
    }
}

/// Outcome of evaluating a certificate's inequality on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub verification: VerificationKind,
    pub grid: GridSpec,
    pub samples: usize,
    /// Largest value of the quantity required to be non-positive (or negative).
    pub worst_value: f64,
    /// `(x, y)` at which the worst value occurs.
    pub worst_point: (f64, f64),
    pub passed: bool,
}

/// Outcome of sampling a set's boundary for inward flow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub verification: VerificationKind,
    pub samples: usize,
    /// Smallest normalised inward component of the field over all samples.
    pub min_margin: f64,
    pub worst_point: (f64, f64),
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Certificate {
    Dulac(DulacCertificate),
    FirstIntegral(FirstIntegralV),
    Lyapunov(LyapunovReport),
    InvariantSet(InvariantSetCertificate),
    BoundaryCurve(BoundaryCurve),
}
