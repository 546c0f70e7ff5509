use serde::{Deserialize, Serialize};

use crate::error::{GlvError, Result};
use crate::model::{Rates, ReducedSystem};

/// Exponents within this distance of a degenerate value select the
/// logarithmic form.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// `∫_{s*}^{s} t^{e−1} dt = (s^e − s*^e)/e`, and `ln(s/s*)` at `e = 0`.
pub fn q_integral(s: f64, s_star: f64, e: f64) -> f64 {
    let l = (s / s_star).ln();
    if e.abs() <= DEGENERACY_TOL {
        l
    } else {
        s_star.powf(e) * (e * l).exp_m1() / e
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveCase {
    /// `a1 < 0 = b3`, `1 + a3 − a1 ≠ 0`: `y(x)` on `0 < x < x*`.
    B3ZeroGeneric,
    /// `a1 < 0 = b3`, `1 + a3 − a1 = 0`.
    B3ZeroLog,
    /// `a1 = 0 < b3`, `1 + b1 − b3 ≠ 0`, `b3 ≠ 1`: `x(y)` on `y > y*`.
    A1ZeroGeneric,
    /// `a1 = 0 < b3`, `1 + b1 − b3 = 0`.
    A1ZeroLog1,
    /// `a1 = 0 < b3`, `b3 = 1`.
    A1ZeroLog2,
}

impl CurveCase {
    pub fn is_b3_zero(self) -> bool {
        matches!(self, CurveCase::B3ZeroGeneric | CurveCase::B3ZeroLog)
    }
}

/// Orbit reaching the boundary at `(x*, 0)` (cases with `b3 = 0`) or at
/// `(0, y*)` (cases with `a1 = 0`). Solutions starting on the far side of it
/// approach the axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurve {
    pub case: CurveCase,
    pub x_star: f64,
    pub y_star: f64,
    pub a1: f64,
    pub b1: f64,
    pub a3: f64,
    pub b3: f64,
    pub rates: Rates,
}

impl BoundaryCurve {
    /// `y(x)` for `0 < x ≤ x*` in the `b3 = 0` cases, `x(y)` for `y ≥ y*` in
    /// the `a1 = 0` cases.
    pub fn eval(&self, s: f64) -> Result<f64> {
        let Rates { k1, k2, k3, k4 } = self.rates;
        if self.case.is_b3_zero() {
            if !(s > 0.0 && s <= self.x_star) {
                return Err(GlvError::invalid(format!("x = {s} outside (0, x* = {}]", self.x_star)));
            }
            let br = k3 * q_integral(s, self.x_star, 1.0 - self.a1) - k4 * q_integral(s, self.x_star, 1.0 + self.a3 - self.a1);
            let e = self.b1 + 1.0;
            Ok((e / k1 * br).max(0.0).powf(1.0 / e))
        } else {
            if !(s >= self.y_star && s.is_finite()) {
                return Err(GlvError::invalid(format!("y = {s} outside [y* = {}, inf)", self.y_star)));
            }
            let br = k1 * q_integral(s, self.y_star, 1.0 + self.b1 - self.b3) - k2 * q_integral(s, self.y_star, 1.0 - self.b3);
            let e = self.a3 + 1.0;
            Ok((-e / k4 * br).max(0.0).powf(1.0 / e))
        }
    }

    /// The point `(x, y)` at parameter `s`.
    pub fn point(&self, s: f64) -> Result<(f64, f64)> {
        let w = self.eval(s)?;
        Ok(if self.case.is_b3_zero() { (s, w) } else { (w, s) })
    }

    /// `n` points at log-spaced parameters spanning `[x*/span, x*)` or `(y*, y*·span]`.
    pub fn sample(&self, n: usize, span: f64) -> Result<Vec<(f64, f64)>> {
        (1..=n)
            .map(|j| {
                let t = j as f64 / n as f64;
                if self.case.is_b3_zero() {
                    self.point(self.x_star * span.powf(-(1.0 - t) - 1e-9))
                } else {
                    self.point(self.y_star * span.powf(t))
                }
            })
            .collect()
    }
}

/// The boundary-approach curve for `a1 < 0 = b3`, `a3 < 0`, `−1 < b1 < 0`, or
/// `a1 = 0 < b3`, `b1 < 0`, `−1 < a3 < 0`.
pub fn boundary_curve(sys: &ReducedSystem, eq: (f64, f64)) -> Result<BoundaryCurve> {
    let (a1, b1, a3, b3) = (sys.a1, sys.b1, sys.a3, sys.b3);
    let zero = |v: f64| v.abs() <= DEGENERACY_TOL;
    let case = if a1 < 0.0 && zero(b3) && a3 < 0.0 && -1.0 < b1 && b1 < 0.0 {
        if zero(1.0 + a3 - a1) { CurveCase::B3ZeroLog } else { CurveCase::B3ZeroGeneric }
    } else if zero(a1) && b3 > 0.0 && b1 < 0.0 && -1.0 < a3 && a3 < 0.0 {
        if zero(1.0 + b1 - b3) {
            CurveCase::A1ZeroLog1
        } else if zero(b3 - 1.0) {
            CurveCase::A1ZeroLog2
        } else {
            CurveCase::A1ZeroGeneric
        }
    } else {
        return Err(GlvError::precondition(format!(
            "no boundary-approach curve for exponents ({a1}, {b1}, {a3}, {b3})"
        )));
    };
    if !(eq.0 > 0.0 && eq.1 > 0.0) {
        return Err(GlvError::Domain { x: eq.0, y: eq.1 });
    }
    Ok(BoundaryCurve { case, x_star: eq.0, y_star: eq.1, a1, b1, a3, b3, rates: sys.rates })
}
