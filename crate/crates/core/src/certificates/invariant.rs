use serde::{Deserialize, Serialize};

use super::{BoundaryReport, VerificationKind};
use crate::equilibrium::solve_equilibrium;
use crate::error::{GlvError, Result};
use crate::model::{ExponentMatrix, Rates, ReducedSystem};

/// Samples per boundary piece.
pub const BOUNDARY_SAMPLES: usize = 64;
/// Smallest accepted normalised inward component.
pub const MIN_MARGIN: f64 = 1e-6;
/// Doublings (or halvings) allowed in the `γ` and `x0` searches.
pub const MAX_DOUBLINGS: usize = 60;

/// Logarithmic extent of each sampled boundary piece.
pub fn boundary_span() -> f64 {
    1e6f64.ln()
}

/// The four forward-invariant set patterns.
///
/// * `L1`: `{x ≥ x0, 0 < y ≤ x^γ}` for `a1, b1, a3, b3 < 0`.
/// * `L2`: `{x ≥ x0, y ≥ x^γ}` for `a1 < 0 < b1`, `b3 < 0 < a3`.
/// * `L3`: `{0 < x ≤ x0, x0^γ ≤ y ≤ x^γ}` for `a1, b1, a3, b3 > 0`.
/// * `L4`: `{x ≥ x0, x0^γ ≤ y ≤ x^γ}` for `b1 < 0 < a1`, `a3 < 0 < b3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Lemma {
    L1,
    L2,
    L3,
    L4,
}

impl Lemma {
    pub const ALL: [Lemma; 4] = [Lemma::L1, Lemma::L2, Lemma::L3, Lemma::L4];

    pub fn parse(s: &str) -> Option<Lemma> {
        match s.to_ascii_uppercase().as_str() {
            "L1" => Some(Lemma::L1),
            "L2" => Some(Lemma::L2),
            "L3" => Some(Lemma::L3),
            "L4" => Some(Lemma::L4),
            _ => None,
        }
    }
}

/// Sign pattern and side conditions of `lemma`, including `det C < 0`.
pub fn lemma_applies(c: &ExponentMatrix, lemma: Lemma) -> bool {
    let ExponentMatrix { a1, b1, a3, b3 } = *c;
    let det = c.det();
    if !(det < 0.0) {
        return false;
    }
    match lemma {
        Lemma::L1 => a1 < 0.0 && b1 < 0.0 && a3 < 0.0 && b3 < 0.0 && (1.0 + b1 - b3 > 0.0 || det > a3 + b3),
        Lemma::L2 => a1 < 0.0 && b1 > 0.0 && a3 > 0.0 && b3 < 0.0 && det > a3 + b3,
        Lemma::L3 => a1 > 0.0 && b1 > 0.0 && a3 > 0.0 && b3 > 0.0,
        Lemma::L4 => a1 > 0.0 && b1 < 0.0 && a3 < 0.0 && b3 > 0.0 && (a1 > 1.0 || a1 + b1 > 0.0),
    }
}

/// First lemma, in order L1..L4, whose conditions hold.
pub fn matching_lemma(c: &ExponentMatrix) -> Option<Lemma> {
    Lemma::ALL.into_iter().find(|&l| lemma_applies(c, l))
}

/// `γ` following each lemma's construction: the midpoint of an admissible
/// interval, or repeated doubling (halving) where any sufficiently large
/// (small) value works.
pub fn choose_gamma(c: &ExponentMatrix, lemma: Lemma) -> Result<f64> {
    if !lemma_applies(c, lemma) {
        return Err(GlvError::precondition(format!(
            "exponents {:?} do not satisfy the conditions of {lemma:?}",
            c.as_array()
        )));
    }
    let ExponentMatrix { a1, b1, a3, b3 } = *c;
    let escalate = |mut g: f64, factor: f64, ok: &dyn Fn(f64) -> bool| -> Result<f64> {
        for _ in 0..=MAX_DOUBLINGS {
            if ok(g) {
                return Ok(g);
            }
            g *= factor;
        }
        Err(GlvError::SearchFailed(format!("no admissible gamma for {lemma:?}")))
    };
    match lemma {
        Lemma::L1 => {
            let r = -a3 / b3;
            let s = 1.0 + b1 - b3;
            let a = 1.0 - a1 + a3;
            if s == 0.0 {
                Ok(r - 1.0)
            } else if s > 0.0 {
                escalate(r - 1.0, 2.0, &|g| a - g * s > 0.0)
            } else {
                Ok(0.5 * (a / s + r))
            }
        }
        Lemma::L2 => Ok(0.5 * (-a3 / b3 + (1.0 - a1) / (1.0 + b1))),
        Lemma::L3 => Ok(-a1 / (2.0 * b1)),
        Lemma::L4 => {
            let r = -a1 / b1;
            let s = 1.0 + b1;
            let a = 1.0 - a1;
            if a < 0.0 {
                escalate(0.5 * r, 0.5, &|g| a - g * s < 0.0)
            } else if s == 0.0 {
                Ok(0.5 * r)
            } else {
                Ok(0.5 * (a / s + r))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantSetCertificate {
    pub lemma: Lemma,
    pub gamma: f64,
    pub x0: f64,
    /// Doublings (L3: halvings) of `x0` from its starting value.
    pub x0_steps: usize,
    pub equilibrium: (f64, f64),
    pub verification: BoundaryReport,
}

impl InvariantSetCertificate {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        contains(self.lemma, self.gamma, self.x0, x, y)
    }

    /// A point strictly inside the set.
    pub fn interior_point(&self) -> (f64, f64) {
        let (g, l0) = (self.gamma, self.x0.ln());
        let ln2 = std::f64::consts::LN_2;
        let (u, v) = match self.lemma {
            Lemma::L1 => (l0 + ln2, g * (l0 + ln2) - ln2),
            Lemma::L2 => (l0 + ln2, g * (l0 + ln2) + ln2),
            Lemma::L3 => (l0 - ln2, 0.5 * (g * l0 + g * (l0 - ln2))),
            Lemma::L4 => (l0 + ln2, 0.5 * (g * l0 + g * (l0 + ln2))),
        };
        (u.exp(), v.exp())
    }

    /// The set's boundary as one polyline, `n` points per piece, each piece
    /// extending `span` in log coordinates from the corner.
    pub fn boundary(&self, span: f64, n: usize) -> Vec<(f64, f64)> {
        let at = |piece: Piece, s: f64| match piece {
            Piece::Vertical { u0, v0, dir } => (u0, v0 + dir * s),
            Piece::Horizontal { u0, v0, dir } => (u0 + dir * s, v0),
            Piece::Curve { u0, dir, .. } => (u0 + dir * s, self.gamma * (u0 + dir * s)),
        };
        let [first, second] = pieces(self.lemma, self.gamma, self.x0);
        let steps = n.max(2) - 1;
        let s = |j: usize| span * j as f64 / steps as f64;
        (0..=steps)
            .rev()
            .map(|j| at(first, s(j)))
            .chain((1..=steps).map(|j| at(second, s(j))))
            .map(|(u, v)| (u.exp(), v.exp()))
            .collect()
    }
}

fn contains(lemma: Lemma, g: f64, x0: f64, x: f64, y: f64) -> bool {
    if !(x > 0.0 && y > 0.0) {
        return false;
    }
    let (u, v, l0) = (x.ln(), y.ln(), x0.ln());
    match lemma {
        Lemma::L1 => u >= l0 && v <= g * u,
        Lemma::L2 => u >= l0 && v >= g * u,
        Lemma::L3 => u <= l0 && g * l0 <= v && v <= g * u,
        Lemma::L4 => u >= l0 && g * l0 <= v && v <= g * u,
    }
}

/// Terms `(A, B, C, D)` with `u' = A − B`, `v' = C − D` at `(e^u, e^v)`.
fn log_terms(sys: &ReducedSystem, u: f64, v: f64) -> [f64; 4] {
    let Rates { k1, k2, k3, k4 } = sys.rates;
    [
        k1 * ((sys.a1 - 1.0) * u + sys.b1 * v).exp(),
        k2 * (-u).exp(),
        k3 * (-v).exp(),
        k4 * (sys.a3 * u + (sys.b3 - 1.0) * v).exp(),
    ]
}

#[derive(Clone, Copy)]
enum Piece {
    /// `u = u0`, inward towards larger `u`; `v = v0 + dir·s`.
    Vertical { u0: f64, v0: f64, dir: f64 },
    /// `v = v0`, inward towards larger `v`; `u = u0 + dir·s`.
    Horizontal { u0: f64, v0: f64, dir: f64 },
    /// `v = γu`, `u = u0 + dir·s`; `lower` when the set lies above the curve.
    Curve { u0: f64, dir: f64, lower: bool },
}

fn pieces(lemma: Lemma, g: f64, x0: f64) -> [Piece; 2] {
    let l0 = x0.ln();
    match lemma {
        Lemma::L1 => [Piece::Vertical { u0: l0, v0: g * l0, dir: -1.0 }, Piece::Curve { u0: l0, dir: 1.0, lower: false }],
        Lemma::L2 => [Piece::Vertical { u0: l0, v0: g * l0, dir: 1.0 }, Piece::Curve { u0: l0, dir: 1.0, lower: true }],
        Lemma::L3 => [Piece::Horizontal { u0: l0, v0: g * l0, dir: -1.0 }, Piece::Curve { u0: l0, dir: -1.0, lower: false }],
        Lemma::L4 => [Piece::Horizontal { u0: l0, v0: g * l0, dir: 1.0 }, Piece::Curve { u0: l0, dir: 1.0, lower: false }],
    }
}

/// Normalised inward component of the field on each boundary piece.
pub fn boundary_margins(sys: &ReducedSystem, lemma: Lemma, gamma: f64, x0: f64) -> BoundaryReport {
    let span = boundary_span();
    let mut min_margin = f64::INFINITY;
    let mut worst_point = (x0, x0.powf(gamma));
    let mut samples = 0;
    for piece in pieces(lemma, gamma, x0) {
        for j in 0..BOUNDARY_SAMPLES {
            let s = span * j as f64 / (BOUNDARY_SAMPLES - 1) as f64;
            let (u, v, m) = match piece {
                Piece::Vertical { u0, v0, dir } => {
                    let v = v0 + dir * s;
                    let [a, b, ..] = log_terms(sys, u0, v);
                    (u0, v, (a - b) / (a + b))
                }
                Piece::Horizontal { u0, v0, dir } => {
                    let u = u0 + dir * s;
                    let [_, _, c, d] = log_terms(sys, u, v0);
                    (u, v0, (c - d) / (c + d))
                }
                Piece::Curve { u0, dir, lower } => {
                    let u = u0 + dir * s;
                    let v = gamma * u;
                    let [a, b, c, d] = log_terms(sys, u, v);
                    let sigma = if lower { 1.0 } else { -1.0 };
                    (u, v, sigma * (c - d - gamma * (a - b)) / (c + d + gamma.abs() * (a + b)))
                }
            };
            samples += 1;
            if !(m >= min_margin) {
                min_margin = m;
                worst_point = (u.exp(), v.exp());
            }
        }
    }
    BoundaryReport {
        verification: VerificationKind::Numerical,
        samples,
        min_margin,
        worst_point,
        passed: min_margin >= MIN_MARGIN,
    }
}

/// Construct the invariant set of `lemma`: choose `γ`, then move `x0` away
/// from the equilibrium (doubling; halving for L3) until the set excludes the
/// equilibrium and the field points inward at every boundary sample.
pub fn invariant_set(sys: &ReducedSystem, lemma: Lemma) -> Result<InvariantSetCertificate> {
    let gamma = choose_gamma(&sys.matrix(), lemma)?;
    let equilibrium = solve_equilibrium(sys).require_unique()?;
    let factor = if lemma == Lemma::L3 { 0.5 } else { 2.0 };
    let mut x0 = factor;
    let mut last = None;
    for step in 0..=MAX_DOUBLINGS {
        let report = boundary_margins(sys, lemma, gamma, x0);
        if report.passed && !contains(lemma, gamma, x0, equilibrium.0, equilibrium.1) {
            return Ok(InvariantSetCertificate { lemma, gamma, x0, x0_steps: step, equilibrium, verification: report });
        }
        last = Some(report);
        x0 *= factor;
    }
    Err(GlvError::SearchFailed(format!(
        "no x0 found for {lemma:?} with gamma = {gamma} after {MAX_DOUBLINGS} steps; last margin {}",
        last.map_or(f64::NAN, |r| r.min_margin)
    )))
}
