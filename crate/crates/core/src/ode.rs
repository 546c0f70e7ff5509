//! Dormand–Prince 5(4) with dense output.

use serde::{Deserialize, Serialize};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Upper bound on the step size; infinite by default.
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeConfig {
    fn default() -> Self {
        OdeConfig { rel_tol: 1e-9, abs_tol: 1e-11, h_max: f64::INFINITY, max_steps: 2_000_000 }
    }
}

/// One accepted step with its continuous extension.
#[derive(Debug, Clone, Copy)]
pub struct Step<const N: usize> {
    pub t0: f64,
    pub t1: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    rcont: [[f64; N]; 5],
}

impl<const N: usize> Step<N> {
    /// Fifth-order interpolant on `[t0, t1]`.
    pub fn interpolate(&self, t: f64) -> [f64; N] {
        let theta = (t - self.t0) / (self.t1 - self.t0);
        let theta1 = 1.0 - theta;
        let r = &self.rcont;
        std::array::from_fn(|i| {
            r[0][i] + theta * (r[1][i] + theta1 * (r[2][i] + theta * (r[3][i] + theta1 * r[4][i])))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OdeStatus {
    /// Reached the requested end time.
    Finished,
    /// The step callback asked to stop.
    Stopped,
    /// The step size fell below the representable resolution of `t`.
    StepUnderflow,
    MaxSteps,
}

#[derive(Debug, Clone, Copy)]
pub struct OdeOutcome<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub status: OdeStatus,
    pub accepted: usize,
    pub rejected: usize,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    std::array::from_fn(|i| y[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
}

fn finite<const N: usize>(v: &[f64; N]) -> bool {
    v.iter().all(|x| x.is_finite())
}

fn scaled_norm<const N: usize>(v: &[f64; N], y0: &[f64; N], y1: &[f64; N], cfg: &OdeConfig) -> f64 {
    let s: f64 = (0..N)
        .map(|i| {
            let sc = cfg.abs_tol + cfg.rel_tol * y0[i].abs().max(y1[i].abs());
            (v[i] / sc).powi(2)
        })
        .sum();
    (s / N as f64).sqrt()
}

fn initial_step<const N: usize, F>(f: &F, t0: f64, y0: &[f64; N], f0: &[f64; N], cfg: &OdeConfig, dir: f64) -> f64
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let d0 = scaled_norm(y0, y0, y0, cfg);
    let d1 = scaled_norm(f0, y0, y0, cfg);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(cfg.h_max);
    let y1 = axpy(y0, dir * h0, &[(1.0, f0)]);
    let f1 = f(t0 + dir * h0, &y1);
    if !finite(&f1) {
        return h0 * 1e-3;
    }
    let df: [f64; N] = std::array::from_fn(|i| f1[i] - f0[i]);
    let d2 = scaled_norm(&df, y0, y0, cfg) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(cfg.h_max)
}

/// Integrate `y' = f(t, y)` from `t0` to `t_end`, calling `on_step` after
/// every accepted step. Non-finite stage values count as a rejected step.
pub fn integrate<const N: usize, F, C>(f: F, t0: f64, y0: [f64; N], t_end: f64, cfg: &OdeConfig, mut on_step: C) -> OdeOutcome<N>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    C: FnMut(&Step<N>) -> Control,
{
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut out = OdeOutcome { t, y, status: OdeStatus::Finished, accepted: 0, rejected: 0 };
    if t == t_end {
        return out;
    }
    let mut h = if finite(&k1) { initial_step(&f, t, &y, &k1, cfg, dir) } else { 0.0 };
    let mut last_rejected = false;

    loop {
        if out.accepted + out.rejected >= cfg.max_steps {
            out.status = OdeStatus::MaxSteps;
            break;
        }
        let h_floor = 16.0 * f64::EPSILON * t.abs().max(1.0);
        if !(h >= h_floor) {
            out.status = OdeStatus::StepUnderflow;
            break;
        }
        let mut last = false;
        if dir * (t + dir * h - t_end) >= 0.0 {
            h = dir * (t_end - t);
            last = true;
        }
        let hs = dir * h;

        let k2 = f(t + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]));
        let k3 = f(t + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * hs, &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(t + C5 * hs, &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let y6 = axpy(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
        let k6 = f(t + hs, &y6);
        let y_new = axpy(&y, hs, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = f(t + hs, &y_new);

        let err_v: [f64; N] = std::array::from_fn(|i| {
            hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
        });
        let err = scaled_norm(&err_v, &y, &y_new, cfg);

        if !err.is_finite() || !finite(&y_new) || !finite(&k7) {
            out.rejected += 1;
            h *= 0.2;
            last_rejected = true;
            continue;
        }

        if err <= 1.0 {
            let t_new = if last { t_end } else { t + hs };
            let ydiff: [f64; N] = std::array::from_fn(|i| y_new[i] - y[i]);
            let bspl: [f64; N] = std::array::from_fn(|i| hs * k1[i] - ydiff[i]);
            let rcont = [
                y,
                ydiff,
                bspl,
                std::array::from_fn(|i| ydiff[i] - hs * k7[i] - bspl[i]),
                std::array::from_fn(|i| {
                    hs * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i])
                }),
            ];
            let step = Step { t0: t, t1: t_new, y0: y, y1: y_new, rcont };
            out.accepted += 1;
            t = t_new;
            y = y_new;
            k1 = k7;
            out.t = t;
            out.y = y;
            if on_step(&step) == Control::Stop {
                out.status = OdeStatus::Stopped;
                break;
            }
            if last {
                out.status = OdeStatus::Finished;
                break;
            }
            let mut fac = (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 10.0);
            if last_rejected {
                fac = fac.min(1.0);
            }
            last_rejected = false;
            h = (h * fac).min(cfg.h_max);
        } else {
            out.rejected += 1;
            h *= (0.9 * err.powf(-0.2)).max(0.2);
            last_rejected = true;
        }
    }
    out
}
