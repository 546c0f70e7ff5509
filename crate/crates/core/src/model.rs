//! Power-law Lotka schemes and their orbitally equivalent reduced forms.
//!
//! The full scheme is
//!
//! ```text
//! x' = k1 x^α1 y^β1 − k2 x^α2 y^β2
//! y' = k3 x^α2 y^β2 − k4 x^α3 y^β3
//! ```
//!
//! on the open positive quadrant. Dividing by `x^α2 y^β2` gives the reduced
//! form `x' = k1 x^a1 y^b1 − k2`, `y' = k3 − k4 x^a3 y^b3` with the same orbits.

use serde::{Deserialize, Serialize};

use crate::error::{GlvError, Result};

/// `x^a` for `x > 0`, evaluated as `exp(a ln x)`.
#[inline]
pub fn pow(x: f64, a: f64) -> f64 {
    (a * x.ln()).exp()
}

fn check_state(x: f64, y: f64) -> Result<()> {
    if x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite() {
        Ok(())
    } else {
        Err(GlvError::Domain { x, y })
    }
}

/// Positive rate parameters `k1..k4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
}

impl Rates {
    pub const UNIT: Rates = Rates {
        k1: 1.0,
        k2: 1.0,
        k3: 1.0,
        k4: 1.0,
    };

    pub fn new(k1: f64, k2: f64, k3: f64, k4: f64) -> Result<Self> {
        let r = Rates { k1, k2, k3, k4 };
        r.validate()?;
        Ok(r)
    }

    pub fn from_array(k: [f64; 4]) -> Result<Self> {
        Self::new(k[0], k[1], k[2], k[3])
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.k1, self.k2, self.k3, self.k4]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, k) in [("k1", self.k1), ("k2", self.k2), ("k3", self.k3), ("k4", self.k4)] {
            if !(k > 0.0 && k.is_finite()) {
                return Err(GlvError::invalid(format!(
                    "rate {name} must be positive and finite, got {k}"
                )));
            }
        }
        Ok(())
    }
}

/// The reduced exponent matrix `C = ((a1, b1), (a3, b3))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentMatrix {
    pub a1: f64,
    pub b1: f64,
    pub a3: f64,
    pub b3: f64,
}

impl ExponentMatrix {
    pub fn new(a1: f64, b1: f64, a3: f64, b3: f64) -> Result<Self> {
        let c = ExponentMatrix { a1, b1, a3, b3 };
        if [a1, b1, a3, b3].iter().all(|v| v.is_finite()) {
            Ok(c)
        } else {
            Err(GlvError::invalid(format!("exponents must be finite, got {c:?}")))
        }
    }

    pub fn from_array(a: [f64; 4]) -> Result<Self> {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.a1, self.b1, self.a3, self.b3]
    }

    pub fn det(&self) -> f64 {
        self.a1 * self.b3 - self.b1 * self.a3
    }

    /// Max-row-sum norm, used to scale near-singularity warnings.
    pub fn norm_inf(&self) -> f64 {
        (self.a1.abs() + self.b1.abs()).max(self.a3.abs() + self.b3.abs())
    }
}

/// Full six-exponent scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGlv")]
pub struct GlvSystem {
    pub alpha1: f64,
    pub beta1: f64,
    pub alpha2: f64,
    pub beta2: f64,
    pub alpha3: f64,
    pub beta3: f64,
    #[serde(flatten)]
    pub rates: Rates,
}

#[derive(Deserialize)]
struct RawGlv {
    alpha1: f64,
    beta1: f64,
    alpha2: f64,
    beta2: f64,
    alpha3: f64,
    beta3: f64,
    k1: f64,
    k2: f64,
    k3: f64,
    k4: f64,
}

impl TryFrom<RawGlv> for GlvSystem {
    type Error = GlvError;

    fn try_from(r: RawGlv) -> Result<Self> {
        GlvSystem::new(
            [r.alpha1, r.beta1, r.alpha2, r.beta2, r.alpha3, r.beta3],
            Rates::new(r.k1, r.k2, r.k3, r.k4)?,
        )
    }
}

impl GlvSystem {
    /// Exponents in the order `(α1, β1, α2, β2, α3, β3)`.
    pub fn new(exponents: [f64; 6], rates: Rates) -> Result<Self> {
        if exponents.iter().any(|e| !e.is_finite()) {
            return Err(GlvError::invalid(format!(
                "exponents must be finite, got {exponents:?}"
            )));
        }
        rates.validate()?;
        let [alpha1, beta1, alpha2, beta2, alpha3, beta3] = exponents;
        Ok(GlvSystem {
            alpha1,
            beta1,
            alpha2,
            beta2,
            alpha3,
            beta3,
            rates,
        })
    }

    /// `x' = k1 x^α − k2 x y^β`, `y' = k3 x y^β − k4 y`.
    pub fn alpha_beta(alpha: f64, beta: f64, rates: Rates) -> Result<Self> {
        Self::new([alpha, 0.0, 1.0, beta, 0.0, 1.0], rates)
    }

    /// Classical Lotka-Volterra: `x' = k1 x − k2 x y`, `y' = k3 x y − k4 y`.
    pub fn classical(rates: Rates) -> Self {
        Self::alpha_beta(1.0, 1.0, rates).expect("finite exponents")
    }

    pub fn exponents(&self) -> [f64; 6] {
        [
            self.alpha1,
            self.beta1,
            self.alpha2,
            self.beta2,
            self.alpha3,
            self.beta3,
        ]
    }

    pub fn reduce(&self) -> ReducedSystem {
        ReducedSystem::from_parts(
            ExponentMatrix {
                a1: self.alpha1 - self.alpha2,
                b1: self.beta1 - self.beta2,
                a3: self.alpha3 - self.alpha2,
                b3: self.beta3 - self.beta2,
            },
            self.rates,
        )
    }

    pub fn to_dancso(&self) -> DancsoForm {
        DancsoForm {
            p_hat: self.alpha1 - self.alpha3,
            q_hat: self.beta3 - self.beta1,
            p: self.alpha2 - self.alpha3,
            q: self.beta2 - self.beta1,
            rates: self.rates,
        }
    }

    /// The positive factor `x^α2 y^β2` relating the full and reduced fields.
    pub fn time_factor(&self, x: f64, y: f64) -> f64 {
        (self.alpha2 * x.ln() + self.beta2 * y.ln()).exp()
    }
}

/// Four-exponent orbitally equivalent form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawReduced")]
pub struct ReducedSystem {
    pub a1: f64,
    pub b1: f64,
    pub a3: f64,
    pub b3: f64,
    #[serde(flatten)]
    pub rates: Rates,
    #[serde(rename = "detC")]
    det_c: f64,
}

#[derive(Deserialize)]
struct RawReduced {
    a1: f64,
    b1: f64,
    a3: f64,
    b3: f64,
    k1: f64,
    k2: f64,
    k3: f64,
    k4: f64,
    #[serde(rename = "detC", default)]
    det_c: Option<f64>,
}

impl TryFrom<RawReduced> for ReducedSystem {
    type Error = GlvError;

    fn try_from(r: RawReduced) -> Result<Self> {
        let sys = ReducedSystem::new(
            ExponentMatrix::new(r.a1, r.b1, r.a3, r.b3)?,
            Rates::new(r.k1, r.k2, r.k3, r.k4)?,
        )?;
        match r.det_c {
            Some(d) if d.to_bits() != sys.det_c.to_bits() => Err(GlvError::invalid(format!(
                "detC = {d} does not match a1*b3 - b1*a3 = {}",
                sys.det_c
            ))),
            _ => Ok(sys),
        }
    }
}

impl ReducedSystem {
    pub fn new(c: ExponentMatrix, rates: Rates) -> Result<Self> {
        ExponentMatrix::new(c.a1, c.b1, c.a3, c.b3)?;
        rates.validate()?;
        Ok(Self::from_parts(c, rates))
    }

    fn from_parts(c: ExponentMatrix, rates: Rates) -> Self {
        ReducedSystem {
            a1: c.a1,
            b1: c.b1,
            a3: c.a3,
            b3: c.b3,
            rates,
            det_c: c.det(),
        }
    }

    /// Reduced form of the `(α, β)` family: `C = ((α−1, −β), (−1, 1−β))`.
    pub fn alpha_beta(alpha: f64, beta: f64, rates: Rates) -> Result<Self> {
        Ok(GlvSystem::alpha_beta(alpha, beta, rates)?.reduce())
    }

    pub fn matrix(&self) -> ExponentMatrix {
        ExponentMatrix {
            a1: self.a1,
            b1: self.b1,
            a3: self.a3,
            b3: self.b3,
        }
    }

    pub fn det_c(&self) -> f64 {
        self.det_c
    }

    pub fn with_rates(&self, rates: Rates) -> Result<Self> {
        Self::new(self.matrix(), rates)
    }
}

/// Form `x' = k1 x^p̂ − k2 x^p y^q`, `y' = k3 x^p y^q − k4 y^q̂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DancsoForm {
    #[serde(rename = "pHat")]
    pub p_hat: f64,
    #[serde(rename = "qHat")]
    pub q_hat: f64,
    pub p: f64,
    pub q: f64,
    #[serde(flatten)]
    pub rates: Rates,
}

/// A planar vector field on the open positive quadrant.
pub trait VectorField: Sync {
    /// `(x', y')` at a positive state.
    fn eval(&self, x: f64, y: f64) -> Result<(f64, f64)>;

    /// Logarithmic rates `(x'/x, y'/y)` at `(x, y) = (e^u, e^v)`. Defined on
    /// the whole plane.
    fn log_rates(&self, u: f64, v: f64) -> (f64, f64);

    /// The reduced system sharing this field's orbits.
    fn reduced(&self) -> ReducedSystem;
}

impl VectorField for GlvSystem {
    fn eval(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        check_state(x, y)?;
        let Rates { k1, k2, k3, k4 } = self.rates;
        let m1 = pow(x, self.alpha1) * pow(y, self.beta1);
        let m2 = pow(x, self.alpha2) * pow(y, self.beta2);
        let m3 = pow(x, self.alpha3) * pow(y, self.beta3);
        Ok((k1 * m1 - k2 * m2, k3 * m2 - k4 * m3))
    }

    fn log_rates(&self, u: f64, v: f64) -> (f64, f64) {
        let Rates { k1, k2, k3, k4 } = self.rates;
        let du = k1 * ((self.alpha1 - 1.0) * u + self.beta1 * v).exp()
            - k2 * ((self.alpha2 - 1.0) * u + self.beta2 * v).exp();
        let dv = k3 * (self.alpha2 * u + (self.beta2 - 1.0) * v).exp()
            - k4 * (self.alpha3 * u + (self.beta3 - 1.0) * v).exp();
        (du, dv)
    }

    fn reduced(&self) -> ReducedSystem {
        self.reduce()
    }
}

impl VectorField for ReducedSystem {
    fn eval(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        check_state(x, y)?;
        let Rates { k1, k2, k3, k4 } = self.rates;
        Ok((
            k1 * pow(x, self.a1) * pow(y, self.b1) - k2,
            k3 - k4 * pow(x, self.a3) * pow(y, self.b3),
        ))
    }

    fn log_rates(&self, u: f64, v: f64) -> (f64, f64) {
        let Rates { k1, k2, k3, k4 } = self.rates;
        let du = k1 * ((self.a1 - 1.0) * u + self.b1 * v).exp() - k2 * (-u).exp();
        let dv = k3 * (-v).exp() - k4 * (self.a3 * u + (self.b3 - 1.0) * v).exp();
        (du, dv)
    }

    fn reduced(&self) -> ReducedSystem {
        *self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit() -> Rates {
        Rates::UNIT
    }

    #[test]
    fn reduce_classical() {
        let r = GlvSystem::classical(unit()).reduce();
        assert_eq!(r.matrix().as_array(), [0.0, -1.0, -1.0, 0.0]);
        assert_eq!(r.det_c(), -1.0);
        assert_eq!(r.rates, unit());
    }

    #[test]
    fn reduce_alpha_beta_family() {
        let (alpha, beta) = (1.3, 0.4);
        let r = GlvSystem::alpha_beta(alpha, beta, unit()).unwrap().reduce();
        assert_eq!(r.a1, alpha - 1.0);
        assert_eq!(r.b1, -beta);
        assert_eq!(r.a3, -1.0);
        assert_eq!(r.b3, 1.0 - beta);
    }

    #[test]
    fn reduce_equal_exponents_is_singular() {
        let sys = GlvSystem::new([0.7; 6], unit()).unwrap();
        let r = sys.reduce();
        assert_eq!(r.matrix().as_array(), [0.0; 4]);
        assert_eq!(r.det_c(), 0.0);
    }

    #[test]
    fn dancso_form() {
        let d = GlvSystem::alpha_beta(1.7, 0.3, unit()).unwrap().to_dancso();
        assert_eq!((d.p_hat, d.q_hat, d.p, d.q), (1.7, 1.0, 1.0, 0.3));
        let d = GlvSystem::classical(unit()).to_dancso();
        assert_eq!((d.p_hat, d.q_hat, d.p, d.q), (1.0, 1.0, 1.0, 1.0));
        let d = GlvSystem::new([0.0; 6], unit()).unwrap().to_dancso();
        assert_eq!((d.p_hat, d.q_hat, d.p, d.q), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn eval_reduced_and_full() {
        let r = ReducedSystem::new(
            ExponentMatrix::new(-1.0, 0.0, 0.0, 1.0).unwrap(),
            Rates::new(1.0, 2.0, 3.0, 4.0).unwrap(),
        )
        .unwrap();
        assert_eq!(r.eval(1.0, 1.0).unwrap(), (-1.0, -1.0));
        // Equilibrium (1/2, 3/4).
        let (dx, dy) = r.eval(0.5, 0.75).unwrap();
        assert!(dx.abs() < 1e-12 && dy.abs() < 1e-12);

        let full = GlvSystem::classical(unit());
        let (dx, dy) = full.eval(2.0, 1.0).unwrap();
        assert!((dx - 0.0).abs() < 1e-15);
        assert!((dy - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eval_rejects_boundary() {
        let full = GlvSystem::classical(unit());
        assert!(matches!(full.eval(0.0, 1.0), Err(GlvError::Domain { .. })));
        assert!(matches!(full.eval(1.0, -2.0), Err(GlvError::Domain { .. })));
        assert!(full.reduce().eval(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn invalid_rates_rejected() {
        assert!(Rates::new(1.0, 0.0, 1.0, 1.0).is_err());
        assert!(Rates::new(1.0, 1.0, -3.0, 1.0).is_err());
        assert!(Rates::new(1.0, 1.0, 1.0, f64::INFINITY).is_err());
        assert!(GlvSystem::new([f64::NAN, 0.0, 0.0, 0.0, 0.0, 0.0], unit()).is_err());
    }

    #[test]
    fn json_field_names() {
        let sys = GlvSystem::alpha_beta(0.5, 1.5, Rates::new(1.0, 2.0, 3.0, 4.0).unwrap()).unwrap();
        let v = serde_json::to_value(sys).unwrap();
        for key in ["alpha1", "beta1", "alpha2", "beta2", "alpha3", "beta3", "k1", "k2", "k3", "k4"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        let back: GlvSystem = serde_json::from_value(v).unwrap();
        assert_eq!(back, sys);

        let r = sys.reduce();
        let v = serde_json::to_value(r).unwrap();
        assert_eq!(v["detC"].as_f64().unwrap(), r.det_c());
        let back: ReducedSystem = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);

        let bad = serde_json::json!({"a1": 1.0, "b1": 0.0, "a3": 0.0, "b3": 1.0,
            "k1": 1.0, "k2": 1.0, "k3": 1.0, "k4": 1.0, "detC": 7.0});
        assert!(serde_json::from_value::<ReducedSystem>(bad).is_err());
        let bad = serde_json::json!({"alpha1": 1.0, "beta1": 0.0, "alpha2": 0.0, "beta2": 1.0,
            "alpha3": 0.0, "beta3": 1.0, "k1": -1.0, "k2": 1.0, "k3": 1.0, "k4": 1.0});
        assert!(serde_json::from_value::<GlvSystem>(bad).is_err());
    }

    #[test]
    fn log_rates_match_eval() {
        let sys = GlvSystem::new([0.3, -1.2, 1.1, 0.4, -0.5, 2.0], Rates::new(1.5, 0.7, 2.0, 0.9).unwrap()).unwrap();
        for &(x, y) in &[(0.3, 2.0), (1.0, 1.0), (5.0, 0.1)] {
            let (dx, dy) = sys.eval(x, y).unwrap();
            let (du, dv) = sys.log_rates(x.ln(), y.ln());
            assert!((du - dx / x).abs() <= 1e-12 * (1.0 + du.abs()));
            assert!((dv - dy / y).abs() <= 1e-12 * (1.0 + dv.abs()));
            let r = sys.reduce();
            let (dx, dy) = r.eval(x, y).unwrap();
            let (du, dv) = r.log_rates(x.ln(), y.ln());
            assert!((du - dx / x).abs() <= 1e-12 * (1.0 + du.abs()));
            assert!((dv - dy / y).abs() <= 1e-12 * (1.0 + dv.abs()));
        }
    }

    fn exps() -> impl Strategy<Value = [f64; 6]> {
        prop::array::uniform6(-3.0f64..3.0)
    }

    fn rates() -> impl Strategy<Value = Rates> {
        prop::array::uniform4(-3.0f64..3.0)
            .prop_map(|l| Rates::new(l[0].exp(), l[1].exp(), l[2].exp(), l[3].exp()).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn orbital_equivalence(e in exps(), k in rates(), lx in -3.0f64..3.0, ly in -3.0f64..3.0) {
            let sys = GlvSystem::new(e, k).unwrap();
            let (x, y) = (lx.exp(), ly.exp());
            let (fx, fy) = sys.eval(x, y).unwrap();
            let (rx, ry) = sys.reduce().eval(x, y).unwrap();
            let w = sys.time_factor(x, y);
            // Cancellation in the full field is bounded by the size of its terms.
            let scale_x = k.k1 * pow(x, e[0]) * pow(y, e[1]) + k.k2 * pow(x, e[2]) * pow(y, e[3]);
            let scale_y = k.k3 * pow(x, e[2]) * pow(y, e[3]) + k.k4 * pow(x, e[4]) * pow(y, e[5]);
            prop_assert!((fx - w * rx).abs() <= 1e-12 * scale_x);
            prop_assert!((fy - w * ry).abs() <= 1e-12 * scale_y);
        }

        #[test]
        fn reduction_is_shift_invariant(e in exps(), k in rates(), da in -2.0f64..2.0, db in -2.0f64..2.0) {
            let sys = GlvSystem::new(e, k).unwrap();
            let shifted = GlvSystem::new(
                [e[0] + da, e[1] + db, e[2] + da, e[3] + db, e[4] + da, e[5] + db], k).unwrap();
            let (r, s) = (sys.reduce().matrix().as_array(), shifted.reduce().matrix().as_array());
            for i in 0..4 {
                prop_assert!((r[i] - s[i]).abs() <= 1e-14 * 8.0);
            }
        }
    }
}
