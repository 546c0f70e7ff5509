use serde::{Deserialize, Serialize};

use super::{GridReport, GridSpec, VerificationKind};
use crate::equilibrium::log_equilibrium;
use crate::error::{GlvError, Result};
use crate::exact;
use crate::exec::Execution;
use crate::model::{Rates, ReducedSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DulacSign {
    /// `div(h f, h g) / h < 0` on the whole quadrant.
    NegativeEverywhere,
    /// `≤ 0`, with equality confined to the maximum locus.
    NonPositiveOffDiagonal,
}

/// Position of `(α, β)` within the triangle `1 < α ≤ 3/2`, `α − 1 ≤ β ≤ 2 − α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TriangleCase {
    Interior,
    /// `β = 2 − α`, `α < 3/2`: `v(1, 1) = 0`.
    HopfEdge,
    /// `β = α − 1`, `α < 3/2`: `v` is maximal along `x = y`.
    DiagonalEdge,
    /// `(α, β) = (3/2, 1/2)`.
    Corner,
}

/// Where `v` attains its maximum `v(1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MaximumLocus {
    Point,
    Diagonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "branch")]
pub enum DulacBranch {
    Generic,
    Triangle { alpha: f64, beta: f64, det_j: f64, case: TriangleCase },
}

/// Checks specific to the triangle branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocusReport {
    pub locus: MaximumLocus,
    /// Log-distance from the grid argmax of `v` to the locus.
    pub argmax_distance: f64,
    /// Largest `v − v(1, 1)` over grid points farther than one spacing from the locus.
    pub off_locus_max: f64,
    pub passed: bool,
}

/// Dulac function `h = x^{−p} y^{−q}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DulacCertificate {
    pub p: f64,
    pub q: f64,
    pub sign: DulacSign,
    #[serde(flatten)]
    pub branch: DulacBranch,
    /// `div(h f, h g) / h` at the equilibrium.
    pub value_at_equilibrium: f64,
    pub verification: GridReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub locus: Option<LocusReport>,
}

impl DulacCertificate {
    pub fn passed(&self) -> bool {
        self.verification.passed && self.locus.is_none_or(|l| l.passed)
    }
}

/// The four terms of `div(h f, h g) / h` for the reduced system at `(e^u, e^v)`.
fn divergence_terms(sys: &ReducedSystem, p: f64, q: f64, u: f64, v: f64) -> [f64; 4] {
    let Rates { k1, k2, k3, k4 } = sys.rates;
    [
        k1 * (sys.a1 - p) * ((sys.a1 - 1.0) * u + sys.b1 * v).exp(),
        k2 * p * (-u).exp(),
        -k3 * q * (-v).exp(),
        k4 * (q - sys.b3) * (sys.a3 * u + (sys.b3 - 1.0) * v).exp(),
    ]
}

/// `div(h f, h g) / h` for `h = x^{−p} y^{−q}`.
pub fn dulac_divergence(sys: &ReducedSystem, p: f64, q: f64, x: f64, y: f64) -> f64 {
    divergence_terms(sys, p, q, x.ln(), y.ln()).iter().sum()
}

/// Dulac certificate for `a1 ≤ 0 ≤ b3`, `(a1, b3) ≠ (0, 0)` with exponents
/// `a1 ≤ p ≤ 0 ≤ q ≤ b3`.
pub fn dulac_generic(sys: &ReducedSystem, p: f64, q: f64, grid: &GridSpec, exec: Execution) -> Result<DulacCertificate> {
    grid.validate()?;
    let (a1, b3) = (sys.a1, sys.b3);
    if !(a1 <= 0.0 && 0.0 <= b3) || (a1 == 0.0 && b3 == 0.0) {
        return Err(GlvError::precondition(format!(
            "generic Dulac function needs a1 <= 0 <= b3 and (a1, b3) != (0, 0), got a1 = {a1}, b3 = {b3}"
        )));
    }
    if !(a1 <= p && p <= 0.0 && 0.0 <= q && q <= b3) {
        return Err(GlvError::precondition(format!(
            "need a1 <= p <= 0 <= q <= b3, got p = {p}, q = {q}"
        )));
    }
    let points = grid.points();
    let (i, worst) = exec
        .argmax(&points, |&(u, v)| divergence_terms(sys, p, q, u, v).iter().sum())
        .expect("grid is non-empty");
    let (u, v) = points[i];
    let value_at_equilibrium = match log_equilibrium(sys) {
        Some((us, vs)) => divergence_terms(sys, p, q, us, vs).iter().sum(),
        None => f64::NAN,
    };
    Ok(DulacCertificate {
        p,
        q,
        sign: DulacSign::NegativeEverywhere,
        branch: DulacBranch::Generic,
        value_at_equilibrium,
        verification: GridReport {
            verification: VerificationKind::Numerical,
            grid: *grid,
            samples: points.len(),
            worst_value: worst,
            worst_point: (u.exp(), v.exp()),
            passed: worst < 0.0,
        },
        locus: None,
    })
}

/// [`dulac_generic`] with `p = a1/2`, `q = b3/2` on the default grid centred
/// at the equilibrium.
pub fn dulac_generic_default(sys: &ReducedSystem, exec: Execution) -> Result<DulacCertificate> {
    let center = log_equilibrium(sys).unwrap_or((0.0, 0.0));
    dulac_generic(sys, sys.a1 / 2.0, sys.b3 / 2.0, &GridSpec::centered(center), exec)
}

/// Classify `(α, β)` within the triangle, using exact decimal comparisons.
pub fn triangle_case(alpha: f64, beta: f64) -> Result<TriangleCase> {
    let a = exact::from_f64(alpha)?;
    let b = exact::from_f64(beta)?;
    let one = exact::one();
    let two = exact::int(2);
    let three_halves = exact::parse_decimal("1.5")?;
    let inside = a > one && a <= three_halves && &a - &one <= b && b <= &two - &a;
    if !inside {
        return Err(GlvError::precondition(format!(
            "(alpha, beta) = ({alpha}, {beta}) is outside 1 < alpha <= 3/2, alpha - 1 <= beta <= 2 - alpha"
        )));
    }
    let hopf = b == &two - &a;
    let diag = b == &a - &one;
    Ok(match (hopf, diag) {
        (true, true) => TriangleCase::Corner,
        (true, false) => TriangleCase::HopfEdge,
        (false, true) => TriangleCase::DiagonalEdge,
        (false, false) => TriangleCase::Interior,
    })
}

/// `(p, q)` for which `∇v(1, 1) = 0`.
pub fn triangle_exponents(alpha: f64, beta: f64) -> (f64, f64) {
    let det_j = alpha * beta - alpha + 1.0;
    (alpha - (alpha - 1.0) * beta / det_j, beta + (alpha - 1.0) * (alpha - 1.0) * beta / det_j)
}

fn triangle_terms(alpha: f64, beta: f64, p: f64, q: f64, u: f64, v: f64) -> [f64; 4] {
    [
        (alpha - p) * ((alpha - 1.0) * u).exp(),
        (p - 1.0) * (beta * v).exp(),
        (beta - q) * (u + (beta - 1.0) * v).exp(),
        q - 1.0,
    ]
}

/// `v = div(h f, h g) / h` for `x' = x^α − x y^β`, `y' = x y^β − y`.
pub fn triangle_v(alpha: f64, beta: f64, p: f64, q: f64, x: f64, y: f64) -> f64 {
    triangle_terms(alpha, beta, p, q, x.ln(), y.ln()).iter().sum()
}

/// Dulac certificate for the `(α, β)` system with unit rates inside the triangle.
pub fn dulac_triangle(alpha: f64, beta: f64, grid: &GridSpec, exec: Execution) -> Result<DulacCertificate> {
    grid.validate()?;
    let case = triangle_case(alpha, beta)?;
    let det_j = alpha * beta - alpha + 1.0;
    let (p, q) = triangle_exponents(alpha, beta);
    let v11 = alpha + beta - 2.0;
    let locus = match case {
        TriangleCase::Interior | TriangleCase::HopfEdge => MaximumLocus::Point,
        TriangleCase::DiagonalEdge | TriangleCase::Corner => MaximumLocus::Diagonal,
    };
    let sign = if v11 < 0.0 { DulacSign::NegativeEverywhere } else { DulacSign::NonPositiveOffDiagonal };

    let points = grid.points();
    let excess = exec.map(&points, |&(u, v)| {
        let t = triangle_terms(alpha, beta, p, q, u, v);
        let scale = 1.0 + t.iter().map(|x| x.abs()).sum::<f64>();
        (t.iter().sum::<f64>() - v11) / scale
    });
    let dist = |&(u, v): &(f64, f64)| match locus {
        MaximumLocus::Point => u.hypot(v),
        MaximumLocus::Diagonal => (u - v).abs() / std::f64::consts::SQRT_2,
    };
    let mut imax = 0;
    for (i, e) in excess.iter().enumerate() {
        if *e > excess[imax] {
            imax = i;
        }
    }
    let h = grid.spacing();
    let off_locus_max = points
        .iter()
        .zip(&excess)
        .filter(|(pt, _)| dist(pt) > h)
        .map(|(_, e)| *e)
        .fold(f64::NEG_INFINITY, f64::max);
    let argmax_distance = dist(&points[imax]);
    let (u, v) = points[imax];
    let worst = excess[imax];
    Ok(DulacCertificate {
        p,
        q,
        sign,
        branch: DulacBranch::Triangle { alpha, beta, det_j, case },
        value_at_equilibrium: triangle_v(alpha, beta, p, q, 1.0, 1.0),
        verification: GridReport {
            verification: VerificationKind::Numerical,
            grid: *grid,
            samples: points.len(),
            worst_value: worst,
            worst_point: (u.exp(), v.exp()),
            passed: worst <= 1e-12,
        },
        locus: Some(LocusReport {
            locus,
            argmax_distance,
            off_locus_max,
            passed: argmax_distance <= h && off_locus_max < 0.0,
        }),
    })
}
