use serde::{Deserialize, Serialize};

use super::{GridReport, GridSpec, VerificationKind};
use crate::error::{GlvError, Result};
use crate::exec::Execution;
use crate::model::{pow, Rates, ReducedSystem};

/// `Φ(s; s*, e) = (s − s*) − s* ((s/s*)^{e+1} − 1)/(e + 1)`, with the
/// logarithmic limit at `e = −1`. `∂Φ/∂s = 1 − (s/s*)^e` and `Φ(s*) = 0`.
pub fn phi(s: f64, s_star: f64, e: f64) -> f64 {
    let l = (s / s_star).ln();
    let tail = if e == -1.0 { l } else { ((e + 1.0) * l).exp_m1() / (e + 1.0) };
    (s - s_star) - s_star * tail
}

/// `V = k3 Φ(x; x*, a3) + k2 Φ(y; y*, b1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstIntegralV {
    pub x_star: f64,
    pub y_star: f64,
    pub a3: f64,
    pub b1: f64,
    pub k2: f64,
    pub k3: f64,
    /// `a3 = −1`: logarithmic antiderivative in `x`.
    pub log_x: bool,
    /// `b1 = −1`: logarithmic antiderivative in `y`.
    pub log_y: bool,
}

impl FirstIntegralV {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.k3 * phi(x, self.x_star, self.a3) + self.k2 * phi(y, self.y_star, self.b1)
    }

    pub fn gradient(&self, x: f64, y: f64) -> (f64, f64) {
        (
            self.k3 * (1.0 - pow(x / self.x_star, self.a3)),
            self.k2 * (1.0 - pow(y / self.y_star, self.b1)),
        )
    }
}

/// Build `V` for the reduced system at its equilibrium.
pub fn first_integral(sys: &ReducedSystem, eq: (f64, f64)) -> Result<FirstIntegralV> {
    let (x_star, y_star) = eq;
    if !(x_star > 0.0 && y_star > 0.0 && x_star.is_finite() && y_star.is_finite()) {
        return Err(GlvError::Domain { x: x_star, y: y_star });
    }
    Ok(FirstIntegralV {
        x_star,
        y_star,
        a3: sys.a3,
        b1: sys.b1,
        k2: sys.rates.k2,
        k3: sys.rates.k3,
        log_x: sys.a3 == -1.0,
        log_y: sys.b1 == -1.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LyapunovCase {
    /// `a1 < 0 = b3`.
    B3Zero,
    /// `a1 = 0 < b3`.
    A1Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignClaim {
    NonPositive,
    NonNegative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovReport {
    pub case: LyapunovCase,
    pub claim: SignClaim,
    pub function: FirstIntegralV,
    /// `worst_value` is the largest of `±V'` (sign chosen so the claim reads
    /// `≤ 0`) relative to the size of its factors.
    pub verification: GridReport,
    /// Largest relative gap between the product form and `∇V · f` on the grid.
    pub product_form_gap: f64,
}

/// `V'` along the reduced field in the factored form of each case, with the
/// magnitude of its factors for relative comparisons.
fn product_form(sys: &ReducedSystem, v: &FirstIntegralV, case: LyapunovCase, x: f64, y: f64) -> (f64, f64) {
    let Rates { k1, k2, k4, .. } = sys.rates;
    let k3 = sys.rates.k3;
    let pre = pow(x, sys.a3) * pow(y, sys.b1);
    match case {
        LyapunovCase::B3Zero => {
            let f1 = (pow(x, -sys.a3), pow(v.x_star, -sys.a3));
            let f2 = (pow(x, sys.a1), pow(v.x_star, sys.a1));
            let c = pre * k1 * k3;
            (c * (f1.0 - f1.1) * (f2.0 - f2.1), c.abs() * (f1.0 + f1.1) * (f2.0 + f2.1))
        }
        LyapunovCase::A1Zero => {
            let f1 = (pow(y, -sys.b1), pow(v.y_star, -sys.b1));
            let f2 = (pow(y, sys.b3), pow(v.y_star, sys.b3));
            let c = pre * k2 * k4;
            (-c * (f1.0 - f1.1) * (f2.0 - f2.1), c.abs() * (f1.0 + f1.1) * (f2.0 + f2.1))
        }
    }
}

/// `∇V · f` evaluated directly.
pub fn lyapunov_derivative(sys: &ReducedSystem, v: &FirstIntegralV, x: f64, y: f64) -> f64 {
    let Rates { k1, k2, k3, k4 } = sys.rates;
    let (gx, gy) = v.gradient(x, y);
    gx * (k1 * pow(x, sys.a1) * pow(y, sys.b1) - k2) + gy * (k3 - k4 * pow(x, sys.a3) * pow(y, sys.b3))
}

/// Sign of `V'` in the cases `a1 < 0 = b3` and `a1 = 0 < b3` with `det C < 0`.
pub fn lyapunov_derivative_sign(sys: &ReducedSystem, v: &FirstIntegralV, grid: &GridSpec, exec: Execution) -> Result<LyapunovReport> {
    grid.validate()?;
    let case = if sys.a1 < 0.0 && sys.b3 == 0.0 {
        LyapunovCase::B3Zero
    } else if sys.a1 == 0.0 && sys.b3 > 0.0 {
        LyapunovCase::A1Zero
    } else {
        return Err(GlvError::precondition(format!(
            "Lyapunov sign needs a1 < 0 = b3 or a1 = 0 < b3, got a1 = {}, b3 = {}",
            sys.a1, sys.b3
        )));
    };
    if !(sys.det_c() < 0.0) {
        return Err(GlvError::precondition(format!("det C = {} must be negative", sys.det_c())));
    }
    let claim = if sys.a3 < 0.0 { SignClaim::NonPositive } else { SignClaim::NonNegative };
    let s = if claim == SignClaim::NonPositive { 1.0 } else { -1.0 };

    let points = grid.points();
    let vals = exec.map(&points, |&(u, w)| {
        let (x, y) = (u.exp(), w.exp());
        let (pf, scale) = product_form(sys, v, case, x, y);
        let direct = lyapunov_derivative(sys, v, x, y);
        let (gx, gy) = v.gradient(x, y);
        let direct_scale = gx.abs() * (sys.rates.k1 * pow(x, sys.a1) * pow(y, sys.b1) + sys.rates.k2)
            + gy.abs() * (sys.rates.k3 + sys.rates.k4 * pow(x, sys.a3) * pow(y, sys.b3));
        let rel = if scale > 0.0 { s * pf / scale } else { 0.0 };
        let gap = (pf - direct).abs() / direct_scale.max(scale).max(f64::MIN_POSITIVE);
        (rel, gap)
    });
    let mut imax = 0;
    for (i, (r, _)) in vals.iter().enumerate() {
        if *r > vals[imax].0 {
            imax = i;
        }
    }
    let worst = vals[imax].0;
    let gap = vals.iter().map(|v| v.1).fold(0.0, f64::max);
    let (u, w) = points[imax];
    Ok(LyapunovReport {
        case,
        claim,
        function: *v,
        verification: GridReport {
            verification: VerificationKind::Numerical,
            grid: *grid,
            samples: points.len(),
            worst_value: worst,
            worst_point: (u.exp(), w.exp()),
            passed: worst <= 1e-12,
        },
        product_form_gap: gap,
    })
}
