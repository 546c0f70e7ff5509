//! Positive equilibria of the reduced system.
//!
//! A positive equilibrium solves `C (ln x, ln y)ᵀ = (ln(k2/k1), ln(k3/k4))ᵀ`.
//! It is unique iff `det C ≠ 0`; otherwise the solution set is a line (in log
//! coordinates) or empty.

use serde::{Deserialize, Serialize};

use crate::error::{GlvError, Result};
use crate::model::{pow, ReducedSystem};

/// Tolerance of the image-of-C test in the singular case.
pub const SINGULAR_RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum EquilibriumKind {
    Unique { x: f64, y: f64 },
    InfiniteSet,
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumResult {
    #[serde(flatten)]
    pub kind: EquilibriumKind,
    #[serde(rename = "detC")]
    pub det_c: f64,
}

impl EquilibriumResult {
    pub fn unique(&self) -> Option<(f64, f64)> {
        match self.kind {
            EquilibriumKind::Unique { x, y } => Some((x, y)),
            _ => None,
        }
    }

    /// The unique equilibrium, or a [`GlvError::ZipCase`] error.
    pub fn require_unique(&self) -> Result<(f64, f64)> {
        self.unique().ok_or_else(|| {
            GlvError::ZipCase(format!(
                "no unique positive equilibrium ({:?})",
                self.kind
            ))
        })
    }
}

/// Right-hand side `(ln(k2/k1), ln(k3/k4))` of the log-linear system.
pub fn log_rhs(sys: &ReducedSystem) -> (f64, f64) {
    let k = sys.rates;
    ((k.k2 / k.k1).ln(), (k.k3 / k.k4).ln())
}

/// Closed-form equilibrium in log coordinates, `None` when `det C = 0`.
pub fn log_equilibrium(sys: &ReducedSystem) -> Option<(f64, f64)> {
    let det = sys.det_c();
    if det == 0.0 {
        return None;
    }
    let (r1, r2) = log_rhs(sys);
    Some((
        (sys.b3 * r1 - sys.b1 * r2) / det,
        (sys.a1 * r2 - sys.a3 * r1) / det,
    ))
}

pub fn solve_equilibrium(sys: &ReducedSystem) -> EquilibriumResult {
    let det_c = sys.det_c();
    let kind = match log_equilibrium(sys) {
        Some((u, v)) => EquilibriumKind::Unique { x: u.exp(), y: v.exp() },
        None => {
            let (r1, r2) = log_rhs(sys);
            let rnorm = r1.hypot(r2);
            let c = sys.matrix();
            let cols = [(c.a1, c.a3), (c.b1, c.b3)];
            let (cx, cy) = if cols[0].0.hypot(cols[0].1) >= cols[1].0.hypot(cols[1].1) {
                cols[0]
            } else {
                cols[1]
            };
            let cc = cx * cx + cy * cy;
            let residual = if cc == 0.0 {
                rnorm
            } else {
                let t = (r1 * cx + r2 * cy) / cc;
                (r1 - t * cx).hypot(r2 - t * cy)
            };
            if residual <= SINGULAR_RESIDUAL_TOL * rnorm.max(1.0) {
                EquilibriumKind::InfiniteSet
            } else {
                EquilibriumKind::Empty
            }
        }
    };
    EquilibriumResult { kind, det_c }
}

/// Relative residual `max(|k1 x^a1 y^b1 − k2| / k2, |k3 − k4 x^a3 y^b3| / k3)`.
pub fn relative_residual(sys: &ReducedSystem, x: f64, y: f64) -> f64 {
    let k = sys.rates;
    let e1 = (k.k1 * pow(x, sys.a1) * pow(y, sys.b1) - k.k2).abs() / k.k2;
    let e2 = (k.k3 - k.k4 * pow(x, sys.a3) * pow(y, sys.b3)).abs() / k.k3;
    e1.max(e2)
}
