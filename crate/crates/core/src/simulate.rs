//! Positivity-preserving integration with event detection.
//!
//! Trajectories are integrated in log coordinates `(u, v) = (ln x, ln y)`,
//! where the field is `(x'/x, y'/y)`, smooth on the whole plane. Every emitted
//! sample is `(e^u, e^v)` and therefore strictly positive.

use std::collections::VecDeque;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::equilibrium::log_equilibrium;
use crate::error::{GlvError, Result};
use crate::exec::Execution;
use crate::model::VectorField;
use crate::ode::{self, Control, OdeConfig, OdeStatus, Step};

/// Consecutive steps inside the convergence radius needed to report convergence.
pub const CONVERGENCE_WINDOW: usize = 10;
/// Absolute tolerance on successive section returns in `ln x`.
pub const RETURN_TOL: f64 = 1e-6;
/// Successive returns must also agree to this fraction of the return's
/// distance from the equilibrium.
pub const RETURN_REL_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub t_max: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Radius in the log metric `sqrt((u − u*)² + (v − v*)²)`.
    pub convergence_radius: f64,
    /// Stop when `u` or `v` falls below this value.
    pub boundary_log_threshold: f64,
    /// Stop when `u` or `v` exceeds this value.
    pub blowup_log_threshold: f64,
    pub max_steps: usize,
    /// End the run as soon as a periodic orbit is recognised. When false the
    /// run continues to `t_max` and the last detection is reported.
    pub stop_on_periodic: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            t_max: 1000.0,
            rel_tol: 1e-9,
            abs_tol: 1e-11,
            convergence_radius: 1e-8,
            boundary_log_threshold: -13.8,
            blowup_log_threshold: 13.8,
            max_steps: 2_000_000,
            stop_on_periodic: true,
        }
    }
}

impl SimConfig {
    pub fn with_t_max(t_max: f64) -> Self {
        SimConfig { t_max, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(GlvError::invalid(format!("{name} must be positive and finite, got {v}")))
            }
        };
        pos("t_max", self.t_max)?;
        pos("rel_tol", self.rel_tol)?;
        pos("abs_tol", self.abs_tol)?;
        pos("convergence_radius", self.convergence_radius)?;
        let (lo, hi) = (self.boundary_log_threshold, self.blowup_log_threshold);
        if !(lo.is_finite() && hi.is_finite() && lo > -700.0 && hi < 700.0 && lo < hi) {
            return Err(GlvError::invalid(format!(
                "log thresholds must satisfy -700 < boundary < blowup < 700, got {lo}, {hi}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

/// Coordinate axis, named by the variable that vanishes on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    /// `y = 0`.
    XAxis,
    /// `x = 0`.
    YAxis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coordinate {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Terminal {
    Converged { t: f64 },
    PeriodicOrbit { period: f64, amplitude: f64 },
    BoundaryApproach { axis: Axis, t: f64, x: f64, y: f64 },
    BlowUp { direction: Coordinate, t: f64, x: f64, y: f64 },
    HorizonReached,
    /// The step size underflowed or the step budget ran out.
    StiffFailure { t: f64, x: f64, y: f64 },
}

impl Terminal {
    pub fn name(&self) -> &'static str {
        match self {
            Terminal::Converged { .. } => "Converged",
            Terminal::PeriodicOrbit { .. } => "PeriodicOrbit",
            Terminal::BoundaryApproach { .. } => "BoundaryApproach",
            Terminal::BlowUp { .. } => "BlowUp",
            Terminal::HorizonReached => "HorizonReached",
            Terminal::StiffFailure { .. } => "StiffFailure",
        }
    }

    pub fn is_converged(&self) -> bool {
        matches!(self, Terminal::Converged { .. })
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self, Terminal::PeriodicOrbit { .. })
    }
}

/// A transversal crossing of the Poincaré section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub t: f64,
    /// Log-distance from the equilibrium along the section ray.
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub terminal: Terminal,
    pub equilibrium: Option<(f64, f64)>,
    pub crossings: Vec<Crossing>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

/// Metadata written next to a trajectory CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySummary {
    pub terminal: Terminal,
    pub start: (f64, f64),
    pub t_end: f64,
    pub samples: usize,
    pub equilibrium: Option<(f64, f64)>,
    pub section_crossings: usize,
    pub config: SimConfig,
}

impl Trajectory {
    pub fn start(&self) -> Sample {
        self.samples[0]
    }

    pub fn last(&self) -> Sample {
        *self.samples.last().expect("trajectories hold at least the start")
    }

    pub fn summary(&self, cfg: &SimConfig) -> TrajectorySummary {
        let s = self.start();
        TrajectorySummary {
            terminal: self.terminal,
            start: (s.x, s.y),
            t_end: self.last().t,
            samples: self.samples.len(),
            equilibrium: self.equilibrium,
            section_crossings: self.crossings.len(),
            config: *cfg,
        }
    }

    /// Write `t,x,y` rows.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let io = |e: csv::Error| GlvError::Numerical(format!("CSV write failed: {e}"));
        for s in &self.samples {
            wr.serialize(s).map_err(io)?;
        }
        wr.flush().map_err(|e| GlvError::Numerical(format!("CSV write failed: {e}")))
    }
}

/// Section used for return maps: a ray from the equilibrium in log coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Section {
    /// `v = v*`, `u > u*`.
    Horizontal,
    /// `u = u*`, `v > v*`, for systems whose field is tangent to the horizontal ray.
    Vertical,
}

struct Tracker {
    eq: (f64, f64),
    section: Section,
    radius: f64,
    dist: VecDeque<f64>,
    crossings: Vec<Crossing>,
    direction: f64,
    loop_max: f64,
    last_loop_max: f64,
    periodic: Option<(f64, f64)>,
}

impl Tracker {
    fn dist(&self, s: &[f64; 2]) -> f64 {
        (s[0] - self.eq.0).hypot(s[1] - self.eq.1)
    }

    /// Signed distance to the section line and the coordinate along the ray.
    fn section_coords(&self, s: &[f64; 2]) -> (f64, f64) {
        match self.section {
            Section::Horizontal => (s[1] - self.eq.1, s[0] - self.eq.0),
            Section::Vertical => (s[0] - self.eq.0, s[1] - self.eq.1),
        }
    }

    fn observe(&mut self, step: &Step<2>) {
        for j in 1..=4 {
            let p = step.interpolate(step.t0 + (step.t1 - step.t0) * j as f64 / 4.0);
            self.loop_max = self.loop_max.max(self.dist(&p));
        }
        let (g0, _) = self.section_coords(&step.y0);
        let (g1, _) = self.section_coords(&step.y1);
        if g0 == 0.0 || g0.signum() == g1.signum() {
            return;
        }
        let (tc, pc) = locate_root(step, |p| self.section_coords(p).0);
        let (_, r) = self.section_coords(&pc);
        if r <= 0.0 {
            return;
        }
        let dir = (g1 - g0).signum();
        if self.direction == 0.0 {
            self.direction = dir;
        } else if dir != self.direction {
            return;
        }
        self.last_loop_max = self.loop_max;
        self.loop_max = self.dist(&pc);
        self.crossings.push(Crossing { t: tc, r });
        let n = self.crossings.len();
        if n >= 3 {
            let c = &self.crossings[n - 3..];
            let ok = |a: &Crossing, b: &Crossing| {
                let d = (b.r - a.r).abs();
                d < RETURN_TOL && d <= RETURN_REL_TOL * b.r && b.r > 10.0 * self.radius
            };
            if ok(&c[0], &c[1]) && ok(&c[1], &c[2]) {
                self.periodic = Some((c[2].t - c[1].t, self.last_loop_max));
            }
        }
    }
}

/// Root of `g` on the step's dense interpolant, by the Illinois variant of
/// regula falsi.
fn locate_root(step: &Step<2>, g: impl Fn(&[f64; 2]) -> f64) -> (f64, [f64; 2]) {
    let (mut a, mut b) = (step.t0, step.t1);
    let (mut ga, mut gb) = (g(&step.y0), g(&step.y1));
    let mut side = 0;
    for _ in 0..100 {
        let t = (a * gb - b * ga) / (gb - ga);
        let gt = g(&step.interpolate(t));
        if gt == 0.0 || (b - a).abs() <= 4.0 * f64::EPSILON * b.abs().max(1.0) {
            a = t;
            b = t;
            break;
        }
        if gt.signum() == gb.signum() {
            b = t;
            gb = gt;
            if side == -1 {
                ga *= 0.5;
            }
            side = -1;
        } else {
            a = t;
            ga = gt;
            if side == 1 {
                gb *= 0.5;
            }
            side = 1;
        }
    }
    let t = 0.5 * (a + b);
    (t, step.interpolate(t))
}

/// Integrate from `(x0, y0)` until an event fires or `t_max` is reached.
pub fn integrate<S: VectorField + ?Sized>(sys: &S, x0: f64, y0: f64, cfg: &SimConfig) -> Result<Trajectory> {
    cfg.validate()?;
    if !(x0 > 0.0 && y0 > 0.0 && x0.is_finite() && y0.is_finite()) {
        return Err(GlvError::Domain { x: x0, y: y0 });
    }
    let red = sys.reduced();
    let eq_log = log_equilibrium(&red);
    let equilibrium = eq_log.map(|(u, v)| (u.exp(), v.exp()));
    let start = [x0.ln(), y0.ln()];
    let mut samples = vec![Sample { t: 0.0, x: x0, y: y0 }];

    let mut tracker = eq_log.map(|eq| Tracker {
        eq,
        section: if red.a3 == 0.0 { Section::Vertical } else { Section::Horizontal },
        radius: cfg.convergence_radius,
        dist: VecDeque::with_capacity(CONVERGENCE_WINDOW + 1),
        crossings: Vec::new(),
        direction: 0.0,
        loop_max: 0.0,
        last_loop_max: 0.0,
        periodic: None,
    });

    if let Some(tr) = &tracker {
        let scale = 1.0 + tr.eq.0.abs() + tr.eq.1.abs();
        if tr.dist(&start) <= 4.0 * f64::EPSILON * scale {
            return Ok(Trajectory {
                samples,
                terminal: Terminal::Converged { t: 0.0 },
                equilibrium,
                crossings: Vec::new(),
                accepted_steps: 0,
                rejected_steps: 0,
            });
        }
    }

    let ode_cfg = OdeConfig { rel_tol: cfg.rel_tol, abs_tol: cfg.abs_tol, max_steps: cfg.max_steps, ..Default::default() };
    let mut terminal = None;
    let out = ode::integrate(
        |_, s: &[f64; 2]| {
            let (du, dv) = sys.log_rates(s[0], s[1]);
            [du, dv]
        },
        0.0,
        start,
        cfg.t_max,
        &ode_cfg,
        |step| {
            let [u, v] = step.y1;
            let (x, y) = (u.exp(), v.exp());
            let t = step.t1;
            samples.push(Sample { t, x, y });
            if u < cfg.boundary_log_threshold || v < cfg.boundary_log_threshold {
                let axis = if u <= v { Axis::YAxis } else { Axis::XAxis };
                terminal = Some(Terminal::BoundaryApproach { axis, t, x, y });
                return Control::Stop;
            }
            if u > cfg.blowup_log_threshold || v > cfg.blowup_log_threshold {
                let direction = if u >= v { Coordinate::X } else { Coordinate::Y };
                terminal = Some(Terminal::BlowUp { direction, t, x, y });
                return Control::Stop;
            }
            let Some(tr) = tracker.as_mut() else {
                return Control::Continue;
            };
            let d = tr.dist(&step.y1);
            tr.dist.push_back(d);
            if tr.dist.len() > CONVERGENCE_WINDOW + 1 {
                tr.dist.pop_front();
            }
            if tr.dist.len() == CONVERGENCE_WINDOW + 1
                && tr.dist.iter().skip(1).all(|&e| e < tr.radius)
                && d <= tr.dist[0]
            {
                terminal = Some(Terminal::Converged { t });
                return Control::Stop;
            }
            tr.observe(step);
            if cfg.stop_on_periodic {
                if let Some((period, amplitude)) = tr.periodic {
                    terminal = Some(Terminal::PeriodicOrbit { period, amplitude });
                    return Control::Stop;
                }
            }
            Control::Continue
        },
    );

    let terminal = match (terminal, out.status) {
        (Some(t), _) => t,
        (None, OdeStatus::StepUnderflow | OdeStatus::MaxSteps) => {
            Terminal::StiffFailure { t: out.t, x: out.y[0].exp(), y: out.y[1].exp() }
        }
        (None, _) => match tracker.as_ref().and_then(|tr| tr.periodic) {
            Some((period, amplitude)) => Terminal::PeriodicOrbit { period, amplitude },
            None => Terminal::HorizonReached,
        },
    };
    Ok(Trajectory {
        samples,
        terminal,
        equilibrium,
        crossings: tracker.map(|t| t.crossings).unwrap_or_default(),
        accepted_steps: out.accepted,
        rejected_steps: out.rejected,
    })
}

/// Integrate from several starts; results are in input order.
pub fn integrate_batch<S: VectorField + ?Sized>(
    sys: &S,
    starts: &[(f64, f64)],
    cfg: &SimConfig,
    exec: Execution,
) -> Vec<Result<Trajectory>> {
    exec.map(starts, |&(x, y)| integrate(sys, x, y, cfg))
}

/// Largest relative drift `|Q(x, y) − Q(x0, y0)| / max(1, |Q(x0, y0)|)` of a
/// quantity along the samples.
pub fn conserve_check(traj: &Trajectory, q: impl Fn(f64, f64) -> f64) -> f64 {
    let s0 = traj.start();
    let q0 = q(s0.x, s0.y);
    let scale = q0.abs().max(1.0);
    traj.samples.iter().map(|s| (q(s.x, s.y) - q0).abs() / scale).fold(0.0, f64::max)
}
