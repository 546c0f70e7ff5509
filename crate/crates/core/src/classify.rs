//! Stability verdicts: for all rate constants, for the `(α, β)` family with
//! unit rates, and for single systems.

use std::fmt;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::certificates::{
    boundary_curve, dulac_generic_default, dulac_triangle, first_integral, invariant_set, lemma_applies,
    matching_lemma, Certificate, CurveCase, GridSpec, InvariantSetCertificate, Lemma,
};
use crate::equilibrium::solve_equilibrium;
use crate::error::{GlvError, Result};
use crate::exact::{self, Rational};
use crate::exec::Execution;
use crate::focal::{hopf_verdict, Criticality};
use crate::local::{jacobian_reduced, EigenClass};
use crate::model::{ExponentMatrix, GlvSystem, Rates, ReducedSystem};
use crate::simulate::{integrate, Axis, SimConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Scope {
    FixedK,
    AllK,
    /// All rates with `k2 = n·k3`.
    AllKStoichiometric { n: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LocalLabel {
    AS,
    /// Trace zero with negative first focal value.
    ASViaFocal,
    Unstable,
    Center,
    DegenerateHopf,
    Inconclusive,
}

impl LocalLabel {
    pub fn is_stable(self) -> bool {
        matches!(self, LocalLabel::AS | LocalLabel::ASViaFocal)
    }
}

/// Why an equilibrium is not globally asymptotically stable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Witness {
    /// A closed forward-invariant set excluding the equilibrium.
    InvariantSet { lemma: Lemma },
    /// Solutions on or beyond this curve approach an axis.
    BoundaryCurve { case: CurveCase },
    /// The field points out of the quadrant along part of an axis.
    OutwardBoundaryFlow { axis: Axis },
    /// Rates for which the equilibrium is not asymptotically stable.
    LocalInstability { rates: Rates },
    Saddle,
    Center,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status")]
pub enum GlobalLabel {
    GAS,
    NotGAS { witness: Witness },
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DiagramLabel {
    GAS,
    #[serde(rename = "AS-not-GAS")]
    ASNotGAS,
    Unstable,
    Center,
    Zip,
    Undetermined,
}

impl DiagramLabel {
    pub const ALL: [DiagramLabel; 6] = [
        DiagramLabel::GAS,
        DiagramLabel::ASNotGAS,
        DiagramLabel::Unstable,
        DiagramLabel::Center,
        DiagramLabel::Zip,
        DiagramLabel::Undetermined,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DiagramLabel::GAS => "GAS",
            DiagramLabel::ASNotGAS => "AS-not-GAS",
            DiagramLabel::Unstable => "Unstable",
            DiagramLabel::Center => "Center",
            DiagramLabel::Zip => "Zip",
            DiagramLabel::Undetermined => "Undetermined",
        }
    }
}

impl fmt::Display for DiagramLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub scope: Scope,
    pub local: LocalLabel,
    pub global: GlobalLabel,
    pub label: DiagramLabel,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hopf: Option<Criticality>,
    pub certificates: Vec<Certificate>,
    pub notes: Vec<String>,
}

impl StabilityVerdict {
    fn new(scope: Scope, local: LocalLabel, global: GlobalLabel) -> Self {
        StabilityVerdict {
            scope,
            local,
            global,
            label: label_of(local, global),
            hopf: None,
            certificates: Vec::new(),
            notes: Vec::new(),
        }
    }
}

fn label_of(local: LocalLabel, global: GlobalLabel) -> DiagramLabel {
    match (local, global) {
        (LocalLabel::Center, _) => DiagramLabel::Center,
        (_, GlobalLabel::GAS) => DiagramLabel::GAS,
        (l, _) if l.is_stable() => match global {
            GlobalLabel::NotGAS { .. } => DiagramLabel::ASNotGAS,
            _ => DiagramLabel::Undetermined,
        },
        (LocalLabel::Unstable, _) => DiagramLabel::Unstable,
        _ => DiagramLabel::Undetermined,
    }
}

fn zip_check(c: &ExponentMatrix) -> Result<()> {
    if c.det() == 0.0 {
        Err(GlvError::ZipCase(format!("det C = 0 for exponents {:?}", c.as_array())))
    } else {
        Ok(())
    }
}

/// Rates with `k2 = n·k3` for which the trace at the equilibrium is positive,
/// available whenever `a1 > 0` or `b3 < 0`.
pub fn instability_rates(c: &ExponentMatrix, n: f64) -> Option<Rates> {
    let ExponentMatrix { a1, b1, a3, b3 } = *c;
    let ratio = if a1 > 0.0 {
        if b3 > 0.0 { a1 / (2.0 * b3) } else { 1.0 }
    } else if b3 < 0.0 {
        2.0 * a1.abs() / b3.abs() + 1.0
    } else {
        return None;
    };
    // Equilibrium at (ratio·n, 1): trace ∝ a1 k2/x* − b3 k3/y* = a1/ratio − b3 > 0.
    let (xs, ys): (f64, f64) = (ratio * n, 1.0);
    let (k2, k3) = (n, 1.0);
    let k1 = k2 * xs.powf(-a1) * ys.powf(-b1);
    let k4 = k3 * xs.powf(-a3) * ys.powf(-b3);
    Rates::new(k1, k2, k3, k4).ok()
}

/// Outcome of the all-rates local test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AllKLocal {
    pub stable_for_all_k: bool,
    /// The verdict is unchanged when rates are restricted to `k2 = n·k3`.
    pub stoichiometric_equivalent: bool,
    pub witness: Option<Witness>,
}

/// Asymptotic stability for all rates: iff `det C < 0`, `a1 ≤ 0 ≤ b3` and
/// `(a1, b3) ≠ (0, 0)`.
pub fn classify_all_k_local(c: &ExponentMatrix) -> Result<AllKLocal> {
    classify_all_k_local_n(c, 1.0)
}

/// [`classify_all_k_local`] with instability witnesses drawn from `k2 = n·k3`.
pub fn classify_all_k_local_n(c: &ExponentMatrix, n: f64) -> Result<AllKLocal> {
    zip_check(c)?;
    if !(n > 0.0 && n.is_finite()) {
        return Err(GlvError::invalid(format!("n must be positive, got {n}")));
    }
    let ExponentMatrix { a1, b3, .. } = *c;
    let witness = if c.det() > 0.0 {
        Some(Witness::Saddle)
    } else if a1 == 0.0 && b3 == 0.0 {
        Some(Witness::Center)
    } else if a1 <= 0.0 && 0.0 <= b3 {
        None
    } else {
        instability_rates(c, n).map(|rates| Witness::LocalInstability { rates })
    };
    Ok(AllKLocal { stable_for_all_k: witness.is_none(), stoichiometric_equivalent: true, witness })
}

/// Outcome of the all-rates global test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllKGlobal {
    pub gas_for_all_k: bool,
    pub stoichiometric_equivalent: bool,
    pub witness: Option<Witness>,
}

/// `det C < 0` and one of: `a1 < 0 < b3`; `a1 < 0 = b3`, `a3 < 0`, `b1 ≤ −1`;
/// `a1 = 0 < b3`, `a3 ≤ −1`, `b1 < 0`.
pub fn gas_for_all_k(c: &ExponentMatrix) -> bool {
    let ExponentMatrix { a1, b1, a3, b3 } = *c;
    c.det() < 0.0
        && ((a1 < 0.0 && 0.0 < b3)
            || (a1 < 0.0 && b3 == 0.0 && a3 < 0.0 && b1 <= -1.0)
            || (a1 == 0.0 && 0.0 < b3 && a3 <= -1.0 && b1 < 0.0))
}

/// Global asymptotic stability for all rates.
pub fn classify_all_k_global(c: &ExponentMatrix) -> Result<AllKGlobal> {
    let local = classify_all_k_local(c)?;
    if gas_for_all_k(c) {
        return Ok(AllKGlobal { gas_for_all_k: true, stoichiometric_equivalent: true, witness: None });
    }
    let witness = if !local.stable_for_all_k {
        local.witness
    } else {
        boundary_witness(c)
    };
    Ok(AllKGlobal { gas_for_all_k: false, stoichiometric_equivalent: true, witness })
}

/// Boundary behaviour for `det C < 0` with `a1 = 0 < b3` or `a1 < 0 = b3`
/// outside the stable cases.
fn boundary_witness(c: &ExponentMatrix) -> Option<Witness> {
    let ExponentMatrix { a1, b1, a3, b3 } = *c;
    if a1 < 0.0 && b3 == 0.0 {
        if a3 > 0.0 && b1 > 0.0 {
            return Some(Witness::OutwardBoundaryFlow { axis: Axis::XAxis });
        }
        if a3 < 0.0 && -1.0 < b1 && b1 < 0.0 {
            let case = if 1.0 + a3 - a1 == 0.0 { CurveCase::B3ZeroLog } else { CurveCase::B3ZeroGeneric };
            return Some(Witness::BoundaryCurve { case });
        }
    }
    if a1 == 0.0 && b3 > 0.0 {
        if a3 > 0.0 && b1 > 0.0 {
            return Some(Witness::OutwardBoundaryFlow { axis: Axis::YAxis });
        }
        if b1 < 0.0 && -1.0 < a3 && a3 < 0.0 {
            let case = if 1.0 + b1 - b3 == 0.0 {
                CurveCase::A1ZeroLog1
            } else if b3 == 1.0 {
                CurveCase::A1ZeroLog2
            } else {
                CurveCase::A1ZeroGeneric
            };
            return Some(Witness::BoundaryCurve { case });
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result")]
pub enum Preclusion {
    Precluded { certificate: InvariantSetCertificate },
    NoCertificate,
}

/// Try the invariant-set patterns L1..L4 in order and build the first match.
pub fn preclude_global(sys: &ReducedSystem) -> Result<Preclusion> {
    let c = sys.matrix();
    if !(c.det() < 0.0) {
        return Err(GlvError::precondition(format!("det C = {} must be negative", c.det())));
    }
    match matching_lemma(&c) {
        Some(lemma) => Ok(Preclusion::Precluded { certificate: invariant_set(sys, lemma)? }),
        None => Ok(Preclusion::NoCertificate),
    }
}

/// Local and global labels of the `(α, β)` system with unit rates, decided
/// with exact rational arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaBetaClass {
    pub local: LocalLabel,
    pub hopf_line: bool,
    /// `None` when globally asymptotically stable; otherwise what precludes it.
    pub obstruction: Option<AlphaBetaObstruction>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AlphaBetaObstruction {
    Saddle,
    PositiveTrace,
    Center,
    /// `α < 1 < β`.
    InvariantSetL1,
    /// `α > 1`, `β < α − 1`.
    InvariantSetL4,
}

pub fn classify_alpha_beta_exact(alpha: &Rational, beta: &Rational) -> Result<AlphaBetaClass> {
    let one = exact::one();
    let two = exact::int(2);
    let det_j = alpha * beta - alpha + &one;
    let sum = alpha + beta;
    if exact::sign(&det_j) == 0 {
        return Err(GlvError::ZipCase(format!(
            "alpha*beta - alpha + 1 = 0 at (alpha, beta) = ({}, {})",
            exact::to_f64(alpha),
            exact::to_f64(beta)
        )));
    }
    use AlphaBetaObstruction as O;
    if exact::sign(&det_j) < 0 {
        return Ok(AlphaBetaClass { local: LocalLabel::Unstable, hopf_line: false, obstruction: Some(O::Saddle) });
    }
    if *alpha == one && *beta == one {
        return Ok(AlphaBetaClass { local: LocalLabel::Center, hopf_line: false, obstruction: Some(O::Center) });
    }
    if sum > two {
        return Ok(AlphaBetaClass { local: LocalLabel::Unstable, hopf_line: false, obstruction: Some(O::PositiveTrace) });
    }
    let hopf_line = sum == two;
    let local = if hopf_line { LocalLabel::ASViaFocal } else { LocalLabel::AS };
    let three_halves = Rational::new(3.into(), 2.into());
    let obstruction = if (*alpha <= one && *beta <= one)
        || (*alpha > one && *alpha <= three_halves && alpha - &one <= *beta && *beta <= &two - alpha)
    {
        None
    } else if *alpha < one && *beta > one {
        Some(O::InvariantSetL1)
    } else if *alpha > one && *beta < alpha - &one {
        Some(O::InvariantSetL4)
    } else {
        unreachable!("every locally stable (alpha, beta) is covered")
    };
    Ok(AlphaBetaClass { local, hopf_line, obstruction })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    /// Construct grid-verified certificates backing the verdict.
    pub certificates: bool,
    /// Random starts integrated as evidence when the global label is undetermined.
    pub evidence_starts: usize,
    pub exec: Execution,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { certificates: true, evidence_starts: 0, exec: Execution::Parallel }
    }
}

/// Verdict for the `(α, β)` system `x' = x^α − x y^β`, `y' = x y^β − y`.
pub fn classify_alpha_beta(alpha: f64, beta: f64, opts: &ClassifyOptions) -> Result<StabilityVerdict> {
    let (a, b) = (exact::from_f64(alpha)?, exact::from_f64(beta)?);
    let class = classify_alpha_beta_exact(&a, &b)?;
    let sys = ReducedSystem::alpha_beta(alpha, beta, Rates::UNIT)?;
    use AlphaBetaObstruction as O;
    let global = match class.obstruction {
        None => GlobalLabel::GAS,
        Some(O::Saddle) => GlobalLabel::NotGAS { witness: Witness::Saddle },
        Some(O::PositiveTrace) => GlobalLabel::NotGAS { witness: Witness::LocalInstability { rates: Rates::UNIT } },
        Some(O::Center) => GlobalLabel::NotGAS { witness: Witness::Center },
        Some(O::InvariantSetL1) => GlobalLabel::NotGAS { witness: Witness::InvariantSet { lemma: Lemma::L1 } },
        Some(O::InvariantSetL4) => GlobalLabel::NotGAS { witness: Witness::InvariantSet { lemma: Lemma::L4 } },
    };
    let mut v = StabilityVerdict::new(Scope::FixedK, class.local, global);
    if class.hopf_line {
        v.hopf = Some(Criticality::Supercritical);
        v.notes.push(format!("trace zero; d1 = (alpha-1)^2 (alpha-2) = {}", (alpha - 1.0).powi(2) * (alpha - 2.0)));
    }
    if opts.certificates {
        match class.obstruction {
            Some(O::InvariantSetL1) => v.certificates.push(Certificate::InvariantSet(invariant_set(&sys, Lemma::L1)?)),
            Some(O::InvariantSetL4) => v.certificates.push(Certificate::InvariantSet(invariant_set(&sys, Lemma::L4)?)),
            Some(O::Center) => v.certificates.push(Certificate::FirstIntegral(first_integral(&sys, (1.0, 1.0))?)),
            None if a > exact::one() => {
                v.certificates.push(Certificate::Dulac(dulac_triangle(alpha, beta, &GridSpec::default(), opts.exec)?))
            }
            None => v.certificates.push(Certificate::Dulac(dulac_generic_default(&sys, opts.exec)?)),
            _ => {}
        }
    }
    Ok(v)
}

/// Whether a reduced system is the unit-rate `(α, β)` system, judged on the
/// decimal values of its exponents; returns `(α, β)`.
fn as_alpha_beta(sys: &ReducedSystem) -> Option<(f64, f64)> {
    if sys.rates != Rates::UNIT || sys.a3 != -1.0 {
        return None;
    }
    let b1 = exact::from_f64(sys.b1).ok()?;
    let b3 = exact::from_f64(sys.b3).ok()?;
    (b3 - b1 == exact::one()).then(|| (sys.a1 + 1.0, -sys.b1))
}

/// Verdict for a full scheme, using the `(α, β)` theorem when the exponents
/// are exactly `(α, 0, 1, β, 0, 1)` with unit rates.
pub fn classify_glv(sys: &GlvSystem, opts: &ClassifyOptions) -> Result<StabilityVerdict> {
    let e = sys.exponents();
    if sys.rates == Rates::UNIT && e[1] == 0.0 && e[2] == 1.0 && e[4] == 0.0 && e[5] == 1.0 {
        return classify_alpha_beta(e[0], e[3], opts);
    }
    classify_system(&sys.reduce(), opts)
}

/// Verdict for one system with fixed rates.
pub fn classify_system(sys: &ReducedSystem, opts: &ClassifyOptions) -> Result<StabilityVerdict> {
    let c = sys.matrix();
    zip_check(&c)?;
    if let Some((alpha, beta)) = as_alpha_beta(sys) {
        return classify_alpha_beta(alpha, beta, opts);
    }
    let eq = solve_equilibrium(sys).require_unique()?;
    let rep = jacobian_reduced(sys, eq)?;
    let mut hopf = None;
    let mut notes = Vec::new();
    let local = match rep.eigen_class {
        EigenClass::Saddle => LocalLabel::Unstable,
        EigenClass::UnstableFocus | EigenClass::UnstableNode => LocalLabel::Unstable,
        EigenClass::StableFocus | EigenClass::StableNode => LocalLabel::AS,
        EigenClass::Center => {
            if c.a1 == 0.0 && c.b3 == 0.0 {
                LocalLabel::Center
            } else {
                let f = hopf_verdict(sys)?;
                hopf = Some(f.criticality);
                notes.push(format!("trace zero; d1 = {}", f.d1));
                match f.criticality {
                    Criticality::Supercritical => LocalLabel::ASViaFocal,
                    Criticality::Subcritical => LocalLabel::Unstable,
                    Criticality::Degenerate => LocalLabel::DegenerateHopf,
                }
            }
        }
    };
    let mut certificates = Vec::new();
    let global = if local == LocalLabel::Center {
        if opts.certificates {
            certificates.push(Certificate::FirstIntegral(first_integral(sys, eq)?));
        }
        GlobalLabel::NotGAS { witness: Witness::Center }
    } else if local == LocalLabel::Unstable {
        let witness = if rep.eigen_class == EigenClass::Saddle {
            Witness::Saddle
        } else {
            Witness::LocalInstability { rates: sys.rates }
        };
        GlobalLabel::NotGAS { witness }
    } else if gas_for_all_k(&c) {
        if opts.certificates {
            if c.a1 < 0.0 && c.b3 > 0.0 {
                certificates.push(Certificate::Dulac(dulac_generic_default(sys, opts.exec)?));
            } else {
                let v = first_integral(sys, eq)?;
                certificates.push(Certificate::Lyapunov(crate::certificates::lyapunov_derivative_sign(
                    sys,
                    &v,
                    &GridSpec::centered((eq.0.ln(), eq.1.ln())),
                    opts.exec,
                )?));
            }
        }
        GlobalLabel::GAS
    } else if let Some(lemma) = matching_lemma(&c) {
        if opts.certificates {
            certificates.push(Certificate::InvariantSet(invariant_set(sys, lemma)?));
        }
        GlobalLabel::NotGAS { witness: Witness::InvariantSet { lemma } }
    } else if let Some(w) = boundary_witness(&c) {
        if opts.certificates {
            if let Witness::BoundaryCurve { .. } = w {
                certificates.push(Certificate::BoundaryCurve(boundary_curve(sys, eq)?));
            }
        }
        GlobalLabel::NotGAS { witness: w }
    } else {
        notes.push("no theorem or certificate decides global stability for these exponents and rates".into());
        GlobalLabel::Undetermined
    };
    if global == GlobalLabel::Undetermined && opts.evidence_starts > 0 {
        notes.push(simulation_evidence(sys, eq, opts.evidence_starts, opts.exec));
    }
    Ok(StabilityVerdict {
        scope: Scope::FixedK,
        local,
        global,
        label: label_of(local, global),
        hopf,
        certificates,
        notes,
    })
}

fn simulation_evidence(sys: &ReducedSystem, eq: (f64, f64), n: usize, exec: Execution) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let starts: Vec<(f64, f64)> = (0..n)
        .map(|_| (eq.0 * 10f64.powf(rng.gen_range(-2.0..2.0)), eq.1 * 10f64.powf(rng.gen_range(-2.0..2.0))))
        .collect();
    let cfg = SimConfig::with_t_max(1e4);
    let out = exec.map(&starts, |&(x, y)| integrate(sys, x, y, &cfg).map(|t| t.terminal.is_converged()));
    let conv = out.iter().filter(|r| matches!(r, Ok(true))).count();
    format!("simulation evidence: {conv}/{n} random starts converged")
}

/// Verdict for all rates (or all rates with `k2 = n·k3`).
pub fn classify_all_k(c: &ExponentMatrix, n: Option<f64>) -> Result<StabilityVerdict> {
    let nn = n.unwrap_or(1.0);
    let local = classify_all_k_local_n(c, nn)?;
    let global = classify_all_k_global(c)?;
    let scope = match n {
        Some(n) => Scope::AllKStoichiometric { n },
        None => Scope::AllK,
    };
    let local_label = match local.witness {
        None => LocalLabel::AS,
        Some(Witness::Saddle) => LocalLabel::Unstable,
        Some(Witness::Center) => LocalLabel::Center,
        Some(_) => LocalLabel::Inconclusive,
    };
    let global_label = if global.gas_for_all_k {
        GlobalLabel::GAS
    } else {
        match global.witness.or(local.witness) {
            Some(witness) => GlobalLabel::NotGAS { witness },
            None => GlobalLabel::Undetermined,
        }
    };
    let mut v = StabilityVerdict::new(scope, local_label, global_label);
    if let Some(Witness::LocalInstability { rates }) = local.witness {
        v.notes.push(format!("not asymptotically stable for k = {:?}", rates.as_array()));
    }
    if c.det() < 0.0 {
        if let Some(lemma) = matching_lemma(c) {
            v.notes.push(format!("invariant-set pattern {lemma:?} applies for every k"));
        }
    }
    Ok(v)
}

/// A rectangle in the `(α, β)` plane with exact decimal bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagramBox {
    pub alpha: (Rational, Rational),
    pub beta: (Rational, Rational),
    pub step: Rational,
}

impl DiagramBox {
    /// Parse decimal strings; `step` must be positive.
    pub fn parse(alpha: (&str, &str), beta: (&str, &str), step: &str) -> Result<Self> {
        let p = exact::parse_decimal;
        let b = DiagramBox { alpha: (p(alpha.0)?, p(alpha.1)?), beta: (p(beta.0)?, p(beta.1)?), step: p(step)? };
        if exact::sign(&b.step) <= 0 {
            return Err(GlvError::invalid("step must be positive"));
        }
        if b.alpha.0 > b.alpha.1 || b.beta.0 > b.beta.1 {
            return Err(GlvError::invalid("box bounds must satisfy lo <= hi"));
        }
        Ok(b)
    }

    /// The default box `[−1, 3]²` with step 0.05.
    pub fn standard() -> Self {
        Self::parse(("-1", "3"), ("-1", "3"), "0.05").expect("valid literals")
    }

    fn axis(&self, (lo, hi): &(Rational, Rational)) -> Vec<Rational> {
        let n = ((hi - lo) / &self.step).floor();
        let n = exact::to_f64(&n) as usize;
        (0..=n).map(|i| lo + &self.step * exact::int(i as i64)).collect()
    }

    pub fn alphas(&self) -> Vec<Rational> {
        self.axis(&self.alpha)
    }

    pub fn betas(&self) -> Vec<Rational> {
        self.axis(&self.beta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagramCell {
    pub alpha: f64,
    pub beta: f64,
    pub label: DiagramLabel,
}

pub fn alpha_beta_label(alpha: &Rational, beta: &Rational) -> DiagramLabel {
    match classify_alpha_beta_exact(alpha, beta) {
        Err(_) => DiagramLabel::Zip,
        Ok(c) => match (c.local, c.obstruction) {
            (LocalLabel::Center, _) => DiagramLabel::Center,
            (LocalLabel::Unstable, _) => DiagramLabel::Unstable,
            (_, None) => DiagramLabel::GAS,
            (_, Some(_)) => DiagramLabel::ASNotGAS,
        },
    }
}

/// Label every grid point of the box, α-major.
pub fn region_diagram(b: &DiagramBox, exec: Execution) -> Vec<DiagramCell> {
    let alphas = b.alphas();
    let betas = b.betas();
    let nb = betas.len();
    exec.map_range(alphas.len() * nb, |k| {
        let (a, be) = (&alphas[k / nb], &betas[k % nb]);
        DiagramCell { alpha: exact::to_f64(a), beta: exact::to_f64(be), label: alpha_beta_label(a, be) }
    })
}

/// `alpha,beta,label` rows.
pub fn write_diagram_csv<W: Write>(cells: &[DiagramCell], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let err = |e: csv::Error| GlvError::Numerical(format!("CSV write failed: {e}"));
    wr.write_record(["alpha", "beta", "label"]).map_err(err)?;
    for c in cells {
        wr.write_record([c.alpha.to_string(), c.beta.to_string(), c.label.to_string()]).map_err(err)?;
    }
    wr.flush().map_err(|e| GlvError::Numerical(format!("CSV write failed: {e}")))
}

/// Whether `lemma` applies to the exponents of an `(α, β)` system.
pub fn alpha_beta_lemma(alpha: f64, beta: f64, lemma: Lemma) -> bool {
    ReducedSystem::alpha_beta(alpha, beta, Rates::UNIT).is_ok_and(|s| lemma_applies(&s.matrix(), lemma))
}
