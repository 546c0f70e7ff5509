//! Linearization at the unique positive equilibrium.
//!
//! At `(x*, y*)` the Jacobian factors as
//! `x*^α2 y*^β2 · diag(k2, k3) · ((a1, b1), (−a3, −b3)) · diag(1/x*, 1/y*)`,
//! so `sign det J = −sign det C` and `sign tr J = sign(a1 k2/x* − b3 k3/y*)`.
//! Both identities hold bit-for-bit here because trace and determinant are
//! assembled from those factors rather than from the matrix entries.

use serde::{Deserialize, Serialize};

use crate::equilibrium::relative_residual;
use crate::error::{GlvError, Result};
use crate::model::{GlvSystem, ReducedSystem};

/// Maximum relative residual accepted for the supplied equilibrium.
pub const EQUILIBRIUM_RESIDUAL_TOL: f64 = 1e-8;
/// Relative threshold of the scale-aware `tr J = 0` test.
pub const TRACE_ZERO_REL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EigenClass {
    StableNode,
    StableFocus,
    /// Purely imaginary eigenvalues of the linearization.
    Center,
    UnstableFocus,
    UnstableNode,
    Saddle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinearVerdict {
    AsymptoticallyStable,
    Unstable,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobianReport {
    pub jacobian: [[f64; 2]; 2],
    pub trace: f64,
    pub det: f64,
    /// `x*^α2 y*^β2`; 1 for a reduced system.
    pub prefactor: f64,
    pub eigen_class: EigenClass,
    pub x_star: f64,
    pub y_star: f64,
    #[serde(rename = "detC")]
    pub det_c: f64,
    /// `a1 k2/x* − b3 k3/y*`, the trace up to the positive prefactor.
    pub trace_indicator: f64,
    /// Threshold under which the trace counts as zero.
    pub trace_zero_tol: f64,
}

impl JacobianReport {
    pub fn trace_is_zero(&self) -> bool {
        self.trace.abs() <= self.trace_zero_tol
    }

    pub fn eigenvalues(&self) -> [(f64, f64); 2] {
        let half = 0.5 * self.trace;
        let disc = half * half - self.det;
        if disc >= 0.0 {
            let s = disc.sqrt();
            [(half - s, 0.0), (half + s, 0.0)]
        } else {
            let w = (-disc).sqrt();
            [(half, -w), (half, w)]
        }
    }
}

/// Jacobian of the full scheme at `eq`.
pub fn jacobian(sys: &GlvSystem, eq: (f64, f64)) -> Result<JacobianReport> {
    let prefactor = sys.time_factor(eq.0, eq.1);
    build(&sys.reduce(), eq, prefactor)
}

/// Jacobian of the reduced system at `eq` (prefactor 1).
pub fn jacobian_reduced(sys: &ReducedSystem, eq: (f64, f64)) -> Result<JacobianReport> {
    build(sys, eq, 1.0)
}

fn build(red: &ReducedSystem, (x, y): (f64, f64), prefactor: f64) -> Result<JacobianReport> {
    if red.det_c() == 0.0 {
        return Err(GlvError::ZipCase("Jacobian requires det C != 0".into()));
    }
    if !(x > 0.0 && y > 0.0) {
        return Err(GlvError::Domain { x, y });
    }
    let res = relative_residual(red, x, y);
    if !(res <= EQUILIBRIUM_RESIDUAL_TOL) {
        return Err(GlvError::precondition(format!(
            "({x}, {y}) is not the positive equilibrium (relative residual {res:e})"
        )));
    }
    if !(prefactor > 0.0 && prefactor.is_finite()) {
        return Err(GlvError::Numerical(format!(
            "prefactor x*^alpha2 y*^beta2 = {prefactor} is not representable"
        )));
    }
    let k = red.rates;
    let (sx, sy) = (k.k2 / x, k.k3 / y);
    let jacobian = [
        [prefactor * red.a1 * sx, prefactor * red.b1 * k.k2 / y],
        [-prefactor * red.a3 * k.k3 / x, -prefactor * red.b3 * sy],
    ];
    let trace_indicator = red.a1 * sx - red.b3 * sy;
    let trace = prefactor * trace_indicator;
    let det = -(prefactor * prefactor * (k.k2 * k.k3) / (x * y)) * red.det_c();
    let trace_zero_tol = TRACE_ZERO_REL * prefactor * (sx + sy);

    let eigen_class = if det <= 0.0 {
        EigenClass::Saddle
    } else if trace.abs() <= trace_zero_tol {
        EigenClass::Center
    } else {
        let focus = trace * trace - 4.0 * det < 0.0;
        match (trace < 0.0, focus) {
            (true, true) => EigenClass::StableFocus,
            (true, false) => EigenClass::StableNode,
            (false, true) => EigenClass::UnstableFocus,
            (false, false) => EigenClass::UnstableNode,
        }
    };

    Ok(JacobianReport {
        jacobian,
        trace,
        det,
        prefactor,
        eigen_class,
        x_star: x,
        y_star: y,
        det_c: red.det_c(),
        trace_indicator,
        trace_zero_tol,
    })
}

pub fn linear_verdict(rep: &JacobianReport) -> LinearVerdict {
    if rep.det < 0.0 || rep.trace > rep.trace_zero_tol {
        LinearVerdict::Unstable
    } else if rep.det_c < 0.0 && rep.trace < -rep.trace_zero_tol {
        LinearVerdict::AsymptoticallyStable
    } else {
        LinearVerdict::Inconclusive
    }
}
