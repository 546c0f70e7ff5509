//! First focal values and Hopf criticality.
//!
//! Three independent routes to the sign of the first focal value at a
//! trace-zero equilibrium with positive Jacobian determinant:
//!
//! * [`focal_value_general`]: the focal value of an arbitrary planar field from
//!   its partial derivatives up to order three, via a linear change of
//!   coordinates onto the rotation normal form.
//! * [`d1_sign_expr`]: a closed-form cubic in the reduced exponents.
//! * [`dancso_g`]: the same quantity in the `(p̂, q̂, p, q)` coordinates.
//!
//! Negative means the weak focus attracts (supercritical Hopf), positive means
//! it repels (subcritical).

use serde::{Deserialize, Serialize};

use crate::equilibrium::solve_equilibrium;
use crate::error::{GlvError, Result};
use crate::local::jacobian_reduced;
use crate::model::{pow, ExponentMatrix, ReducedSystem};

/// Partial derivatives `∂^{i+j} / ∂x^i ∂y^j` for `i + j ≤ 3` at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Partials([[f64; 4]; 4]);

impl Partials {
    pub fn from_fn(mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut d = [[0.0; 4]; 4];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate().take(4 - i) {
                *v = f(i, j);
            }
        }
        Partials(d)
    }

    /// Partials of `Σ c·x^a·y^b` at a positive point, from the closed-form
    /// monomial derivatives.
    pub fn power_law(terms: &[(f64, f64, f64)], x: f64, y: f64) -> Self {
        Self::from_fn(|i, j| {
            terms
                .iter()
                .map(|&(c, a, b)| c * falling(a, i) * falling(b, j) * pow(x, a - i as f64) * pow(y, b - j as f64))
                .sum()
        })
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.0[i][j]
    }

    /// Exchange the roles of `x` and `y`.
    pub fn transposed(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i])
    }
}

/// Falling factorial `a (a−1) ⋯ (a−n+1)`.
pub fn falling(a: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, t| acc * (a - t as f64))
}

/// Relative tolerance on `|f_x + g_y|` accepted by [`focal_value_general`].
pub const FOCAL_TRACE_REL: f64 = 1e-9;

/// First focal value `D1` of `x' = f, y' = g` at an equilibrium where
/// `J = ((a, b), (c, −a))` has positive determinant.
///
/// When `b = 0` the coordinates are exchanged first; `D1`'s sign (stability
/// of the weak focus) is unaffected by the exchange.
pub fn focal_value_general(f: &Partials, g: &Partials) -> Result<f64> {
    let (a, b, c, d) = (f.d(1, 0), f.d(0, 1), g.d(1, 0), g.d(0, 1));
    let scale = a.abs() + b.abs() + c.abs() + d.abs();
    if (a + d).abs() > FOCAL_TRACE_REL * scale {
        return Err(GlvError::precondition(format!(
            "Jacobian trace {} is not zero",
            a + d
        )));
    }
    let w2 = -a * a - b * c;
    if !(w2 > 0.0) {
        return Err(GlvError::precondition(format!(
            "Jacobian determinant {w2} must be positive"
        )));
    }
    if b == 0.0 {
        return focal_value_general(&g.transposed(), &f.transposed());
    }

    let (f20, f11, f02) = (f.d(2, 0), f.d(1, 1), f.d(0, 2));
    let (f30, f21, f12) = (f.d(3, 0), f.d(2, 1), f.d(1, 2));
    let (g20, g11, g02) = (g.d(2, 0), g.d(1, 1), g.d(0, 2));
    let (g21, g12, g03) = (g.d(2, 1), g.d(1, 2), g.d(0, 3));

    let braces = w2 * (-2.0 * a * (f21 + g12) + b * (f30 + g21) - c * (f12 + g03))
        + a * b * (f20 * f20 - f20 * g11 - f11 * g20 - g20 * g02 - 2.0 * g11 * g11)
        + a * c * (-f20 * f02 - 2.0 * f11 * f11 - f11 * g02 - f02 * g11 + g02 * g02)
        + (b * c - 2.0 * a * a) * (f20 * f11 - g11 * g02)
        + b * b * g20 * (f20 + g11)
        - c * c * f02 * (f11 + g02);
    Ok(braces / (16.0 * b * w2))
}

/// First focal value for a Jacobian already in normal form `((0, −ω), (ω, 0))`.
pub fn focal_value_normal_form(f: &Partials, g: &Partials, omega: f64) -> f64 {
    let cubic = f.d(3, 0) + f.d(1, 2) + g.d(2, 1) + g.d(0, 3);
    let quad = f.d(1, 1) * (f.d(2, 0) + f.d(0, 2)) - g.d(1, 1) * (g.d(2, 0) + g.d(0, 2))
        - f.d(2, 0) * g.d(2, 0)
        + f.d(0, 2) * g.d(0, 2);
    (cubic + quad / omega) / 16.0
}

/// `a3 [(1 + a3 − a1) b1 b3 − a1 a3 (1 + b1 − b3)]`, sign-equivalent to the
/// first focal value of the reduced system on its trace-zero locus.
pub fn d1_sign_expr(c: &ExponentMatrix) -> f64 {
    let ExponentMatrix { a1, b1, a3, b3 } = *c;
    a3 * ((1.0 + a3 - a1) * b1 * b3 - a1 * a3 * (1.0 + b1 - b3))
}

/// Focal-value sign expression in `(p̂, q̂, p, q)` coordinates.
pub fn dancso_g(p_hat: f64, q_hat: f64, p: f64, q: f64) -> f64 {
    p * (p * (p_hat - p) * (q_hat - 1.0) - q * (q_hat - q) * (p_hat - 1.0))
}

/// `(p̂, q̂, p, q)` of a reduced exponent matrix: `p̂ = a1 − a3`,
/// `q̂ = b3 − b1`, `p = −a3`, `q = −b1`.
pub fn dancso_coordinates(c: &ExponentMatrix) -> (f64, f64, f64, f64) {
    (c.a1 - c.a3, c.b3 - c.b1, -c.a3, -c.b1)
}

/// Partials at `(1, 1)` of the scaled system `x' = x^a1 y^b1 − 1`,
/// `y' = K (1 − x^a3 y^b3)`.
pub fn scaled_system_partials(c: &ExponentMatrix, k_ratio: f64) -> (Partials, Partials) {
    (
        Partials::power_law(&[(1.0, c.a1, c.b1), (-1.0, 0.0, 0.0)], 1.0, 1.0),
        Partials::power_law(&[(k_ratio, 0.0, 0.0), (-k_ratio, c.a3, c.b3)], 1.0, 1.0),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpecialFamily {
    /// `z1' = A (z1^a1 − z2^a2)`, `z2' = B (z1^b1 − z2^b2)` at `(1, 1)`.
    PowerPower,
    /// `z1' = A (e^{a1 z1} − z2^a2)`, `z2' = B (e^{b1 z1} − z2^b2)` at `(0, 1)`.
    ExpPower,
    /// `z1' = A (e^{a1 z1} − e^{a2 z2})`, `z2' = B (e^{b1 z1} − e^{b2 z2})` at `(0, 0)`.
    ExpExp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams {
    #[serde(rename = "A")]
    pub amp1: f64,
    #[serde(rename = "B")]
    pub amp2: f64,
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
}

/// Partials of a special family at its equilibrium.
pub fn special_family_partials(family: SpecialFamily, p: &FamilyParams) -> (Partials, Partials) {
    // Derivative of order n at the equilibrium of z^e (at 1) or e^{e z} (at 0).
    let power = |e: f64, n: usize| falling(e, n);
    let expo = |e: f64, n: usize| e.powi(n as i32);
    let (first, second): (&dyn Fn(f64, usize) -> f64, &dyn Fn(f64, usize) -> f64) = match family {
        SpecialFamily::PowerPower => (&power, &power),
        SpecialFamily::ExpPower => (&expo, &power),
        SpecialFamily::ExpExp => (&expo, &expo),
    };
    let comp = |amp: f64, e1: f64, e2: f64, i: usize, j: usize| -> f64 {
        if i + j == 0 {
            return 0.0;
        }
        let t1 = if j == 0 { first(e1, i) } else { 0.0 };
        let t2 = if i == 0 { second(e2, j) } else { 0.0 };
        amp * (t1 - t2)
    };
    (
        Partials::from_fn(|i, j| comp(p.amp1, p.a1, p.a2, i, j)),
        Partials::from_fn(|i, j| comp(p.amp2, p.b1, p.b2, i, j)),
    )
}

/// Sign-equivalent expression for the first focal value of a special family.
pub fn special_family_focal_sign(family: SpecialFamily, p: &FamilyParams) -> Result<f64> {
    let det = p.amp1 * p.amp2 * (-p.a1 * p.b2 + p.b1 * p.a2);
    let trace = p.amp1 * p.a1 - p.amp2 * p.b2;
    if !(det > 0.0) {
        return Err(GlvError::precondition(format!("det J = {det} must be positive")));
    }
    if trace.abs() > 1e-12 * (p.amp1 * p.a1).abs().max((p.amp2 * p.b2).abs()) {
        return Err(GlvError::precondition(format!("tr J = {trace} must vanish")));
    }
    Ok(match family {
        SpecialFamily::PowerPower => {
            p.amp1 * p.b1 * ((1.0 + p.b1 - p.a1) * p.a2 * p.b2 - p.a1 * p.b1 * (1.0 + p.a2 - p.b2))
        }
        SpecialFamily::ExpPower => -p.amp1 * p.a1 * (1.0 + p.a2 - p.b2),
        SpecialFamily::ExpExp => 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Criticality {
    Supercritical,
    Subcritical,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FocalReport {
    pub d1: f64,
    /// Focal value of the scaled system at `(1, 1)`.
    #[serde(rename = "D1")]
    pub focal_value: f64,
    pub criticality: Criticality,
    /// Time-scale ratio `K = (k3/k2)(x*/y*)` of the scaled system.
    #[serde(rename = "K")]
    pub k_ratio: f64,
    pub omega: f64,
}

/// Threshold below which `d1` counts as zero; cubic in the exponent scale.
pub fn degeneracy_threshold(c: &ExponentMatrix) -> f64 {
    let s = 1.0 + c.a1.abs() + c.b1.abs() + c.a3.abs() + c.b3.abs();
    1e-12 * s * s * s
}

pub fn criticality_of(d1: f64, c: &ExponentMatrix) -> Criticality {
    if d1.abs() <= degeneracy_threshold(c) {
        Criticality::Degenerate
    } else if d1 < 0.0 {
        Criticality::Supercritical
    } else {
        Criticality::Subcritical
    }
}

/// Hopf criticality at a trace-zero equilibrium with `det C < 0`.
pub fn hopf_verdict(sys: &ReducedSystem) -> Result<FocalReport> {
    if !(sys.det_c() < 0.0) {
        return Err(GlvError::precondition(format!(
            "Hopf analysis needs det C < 0, got {}",
            sys.det_c()
        )));
    }
    let eq = solve_equilibrium(sys).require_unique()?;
    let rep = jacobian_reduced(sys, eq)?;
    if !rep.trace_is_zero() {
        return Err(GlvError::precondition(format!(
            "trace a1 k2/x* - b3 k3/y* = {} is not zero",
            rep.trace
        )));
    }
    let c = sys.matrix();
    let k_ratio = sys.rates.k3 / sys.rates.k2 * (eq.0 / eq.1);
    let (f, g) = scaled_system_partials(&c, k_ratio);
    let focal_value = focal_value_general(&f, &g)?;
    let d1 = d1_sign_expr(&c);
    let omega = (-f.d(1, 0) * f.d(1, 0) - f.d(0, 1) * g.d(1, 0)).sqrt();
    Ok(FocalReport {
        d1,
        focal_value,
        criticality: criticality_of(d1, &c),
        k_ratio,
        omega,
    })
}
