//! Phase-portrait data: nullclines, a fan of trajectories and certificate
//! overlays, for single systems or the named figure presets `fig2`..`fig9`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::certificates::{boundary_curve, invariant_set, matching_lemma};
use crate::classify::{DiagramCell, DiagramLabel};
use crate::equilibrium::solve_equilibrium;
use crate::error::{GlvError, Result};
use crate::exec::Execution;
use crate::model::{ExponentMatrix, Rates, ReducedSystem};
use crate::simulate::{integrate_batch, SimConfig};
use crate::svg::{Frame, Svg};

/// Points per nullcline.
pub const NULLCLINE_POINTS: usize = 400;
/// Window is `(0, WINDOW_SCALE·x*] × (0, WINDOW_SCALE·y*]`.
pub const WINDOW_SCALE: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveKind {
    XNullcline,
    YNullcline,
    Trajectory,
    InvariantSet,
    BoundaryCurve,
}

impl CurveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CurveKind::XNullcline => "x-nullcline",
            CurveKind::YNullcline => "y-nullcline",
            CurveKind::Trajectory => "trajectory",
            CurveKind::InvariantSet => "invariant-set",
            CurveKind::BoundaryCurve => "boundary-curve",
        }
    }

    fn color(self) -> &'static str {
        match self {
            CurveKind::XNullcline => "red",
            CurveKind::YNullcline => "green",
            CurveKind::Trajectory => "#3050a0",
            CurveKind::InvariantSet => "orange",
            CurveKind::BoundaryCurve => "purple",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub kind: CurveKind,
    pub index: usize,
    pub points: Vec<(f64, f64)>,
}

/// What to draw on top of nullclines and trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Overlay {
    None,
    InvariantSet,
    BoundaryCurve,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PanelSpec {
    pub title: String,
    pub system: ReducedSystem,
    pub overlay: Overlay,
    /// Starts as multiples of the equilibrium coordinates.
    pub starts: Vec<(f64, f64)>,
    pub t_max: f64,
}

impl PanelSpec {
    pub fn new(title: impl Into<String>, system: ReducedSystem) -> Self {
        PanelSpec { title: title.into(), system, overlay: Overlay::None, starts: default_starts(), t_max: 30.0 }
    }

    fn overlay(mut self, o: Overlay) -> Self {
        self.overlay = o;
        self
    }

    fn starts(mut self, s: Vec<(f64, f64)>) -> Self {
        self.starts = s;
        self
    }
}

/// A 3×3 lattice of starts at 0.3, 1.5 and 2.7 times the equilibrium.
pub fn default_starts() -> Vec<(f64, f64)> {
    let f = [0.3, 1.5, 2.7];
    f.iter().flat_map(|&a| f.iter().map(move |&b| (a, b))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Panel {
    pub title: String,
    pub exponents: [f64; 4],
    pub rates: [f64; 4],
    pub equilibrium: (f64, f64),
    pub window: (f64, f64),
    pub curves: Vec<Curve>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Portrait {
    pub name: String,
    pub panels: Vec<Panel>,
}

pub const PRESETS: [&str; 8] = ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9"];

fn sys(a: [f64; 4]) -> ReducedSystem {
    ReducedSystem::new(ExponentMatrix::from_array(a).expect("finite"), Rates::UNIT).expect("valid preset")
}

fn ab(alpha: f64, beta: f64) -> ReducedSystem {
    ReducedSystem::alpha_beta(alpha, beta, Rates::UNIT).expect("valid preset")
}

/// Panels of a named figure preset.
pub fn preset(name: &str) -> Result<Vec<PanelSpec>> {
    let p = |t: &str, a: [f64; 4]| PanelSpec::new(t, sys(a));
    Ok(match name {
        "fig2" => vec![p("a1=b3=0, a3<=-1, b1<=-1: center", [0.0, -1.5, -2.0, 0.0])],
        "fig3" => vec![
            p("a3>0, b1>0", [0.0, 1.0, 1.0, 0.0]),
            p("-1<a3<0, -1<b1<0", [0.0, -0.5, -0.5, 0.0]),
            p("-1<a3<0, b1<=-1", [0.0, -2.0, -0.5, 0.0]),
            p("a3<=-1, -1<b1<0", [0.0, -0.5, -2.0, 0.0]),
        ],
        "fig4" => {
            let v = [-0.5, 0.0, 0.5];
            v.iter()
                .flat_map(|&b1| v.iter().map(move |&a3| (b1, a3)))
                .map(|(b1, a3)| p(&format!("a1=-1, b3=1, b1={b1}, a3={a3}"), [-1.0, b1, a3, 1.0]))
                .collect()
        }
        "fig5" => vec![
            p("a1<0=b3, a3>0, b1>0", [-1.0, 1.0, 1.0, 0.0]),
            p("a1=0<b3, a3>0, b1>0", [0.0, 1.0, 1.0, 1.0]),
            p("a1<0=b3, a3<0, b1<=-1", [-1.0, -1.5, -1.0, 0.0]),
            p("a1=0<b3, a3<=-1, b1<0", [0.0, -1.0, -1.5, 1.0]),
            p("a1<0=b3, a3<0, -1<b1<0", [-1.0, -0.5, -0.5, 0.0]),
            p("a1=0<b3, -1<a3<0, b1<0", [0.0, -0.5, -0.5, 1.0]),
        ],
        "fig6" => vec![
            p("a1<0=b3: boundary curve", [-1.0, -0.5, -0.5, 0.0]).overlay(Overlay::BoundaryCurve),
            p("a1=0<b3: boundary curve", [0.0, -0.5, -0.5, 1.0]).overlay(Overlay::BoundaryCurve),
        ],
        "fig7" => vec![
            PanelSpec::new("L1: alpha=0.5, beta=1.5", ab(0.5, 1.5)).overlay(Overlay::InvariantSet),
            p("L2", [-0.1, 0.5, 1.0, -2.0]).overlay(Overlay::InvariantSet),
            p("L3", [1.0, 2.0, 2.0, 1.0]).overlay(Overlay::InvariantSet),
            PanelSpec::new("L4: alpha=1.5, beta=0.4", ab(1.5, 0.4)).overlay(Overlay::InvariantSet),
        ],
        "fig8" => vec![PanelSpec::new("alpha=1.25, beta=0.5", ab(1.25, 0.5))],
        "fig9" => vec![
            PanelSpec::new("below the x-nullcline, x>1", ab(1.25, 0.5))
                .starts(vec![(1.5, 0.05), (2.0, 0.2), (2.7, 0.5), (1.2, 0.02)]),
            PanelSpec::new("above the x-nullcline, y small", ab(1.25, 0.5))
                .starts(vec![(0.1, 0.05), (0.3, 0.02), (0.05, 0.2), (0.6, 0.01)]),
        ],
        other => {
            return Err(GlvError::invalid(format!("unknown preset {other:?}; expected one of {PRESETS:?}")));
        }
    })
}

/// Points of `x^p y^q = c` across the window, sampled along whichever
/// coordinate gives the better-conditioned solve.
fn power_curve(p: f64, q: f64, c: f64, window: (f64, f64), n: usize) -> Vec<(f64, f64)> {
    let (lx, ly) = (window.0.ln(), window.1.ln());
    let span = 1e3f64.ln();
    let lc = c.ln();
    let grid = |hi: f64| (0..n).map(move |j| hi - span + span * j as f64 / (n - 1) as f64);
    if q.abs() >= p.abs() {
        grid(lx).map(|u| (u.exp(), ((lc - p * u) / q).exp())).collect()
    } else {
        grid(ly).map(|v| (((lc - q * v) / p).exp(), v.exp())).collect()
    }
}

pub fn nullclines(sys: &ReducedSystem, window: (f64, f64), n: usize) -> [Vec<(f64, f64)>; 2] {
    let Rates { k1, k2, k3, k4 } = sys.rates;
    [
        power_curve(sys.a1, sys.b1, k2 / k1, window, n),
        power_curve(sys.a3, sys.b3, k3 / k4, window, n),
    ]
}

pub fn build_panel(spec: &PanelSpec, exec: Execution) -> Result<Panel> {
    let s = &spec.system;
    let eq = solve_equilibrium(s).require_unique()?;
    let window = (WINDOW_SCALE * eq.0, WINDOW_SCALE * eq.1);
    let [xn, yn] = nullclines(s, window, NULLCLINE_POINTS);
    let mut curves = vec![
        Curve { kind: CurveKind::XNullcline, index: 0, points: xn },
        Curve { kind: CurveKind::YNullcline, index: 0, points: yn },
    ];
    let mut starts: Vec<(f64, f64)> = spec.starts.iter().map(|&(a, b)| (a * eq.0, b * eq.1)).collect();
    match spec.overlay {
        Overlay::None => {}
        Overlay::InvariantSet => {
            let lemma = matching_lemma(&s.matrix())
                .ok_or_else(|| GlvError::precondition("no invariant-set pattern matches this panel"))?;
            let cert = invariant_set(s, lemma)?;
            starts.push(cert.interior_point());
            curves.push(Curve { kind: CurveKind::InvariantSet, index: 0, points: cert.boundary(1e3f64.ln(), 200) });
        }
        Overlay::BoundaryCurve => {
            let bc = boundary_curve(s, eq)?;
            curves.push(Curve { kind: CurveKind::BoundaryCurve, index: 0, points: bc.sample(200, 1e3)? });
        }
    }
    let cfg = SimConfig { stop_on_periodic: true, ..SimConfig::with_t_max(spec.t_max) };
    for (i, tr) in integrate_batch(s, &starts, &cfg, exec).into_iter().enumerate() {
        let tr = tr?;
        curves.push(Curve { kind: CurveKind::Trajectory, index: i, points: tr.samples.iter().map(|p| (p.x, p.y)).collect() });
    }
    Ok(Panel { title: spec.title.clone(), exponents: s.matrix().as_array(), rates: s.rates.as_array(), equilibrium: eq, window, curves })
}

pub fn build_portrait(name: &str, specs: &[PanelSpec], exec: Execution) -> Result<Portrait> {
    let panels = specs.iter().map(|p| build_panel(p, exec)).collect::<Result<_>>()?;
    Ok(Portrait { name: name.to_string(), panels })
}

fn csv_err(e: impl std::fmt::Display) -> GlvError {
    GlvError::Numerical(format!("CSV write failed: {e}"))
}

/// `panel,curve,index,x,y` rows.
pub fn write_portrait_csv<W: Write>(p: &Portrait, w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["panel", "curve", "index", "x", "y"]).map_err(csv_err)?;
    for (i, panel) in p.panels.iter().enumerate() {
        for c in &panel.curves {
            for &(x, y) in &c.points {
                wr.write_record([i.to_string(), c.kind.as_str().into(), c.index.to_string(), x.to_string(), y.to_string()])
                    .map_err(csv_err)?;
            }
        }
    }
    wr.flush().map_err(csv_err)
}

const PANEL_PX: f64 = 300.0;
const MARGIN: f64 = 50.0;

pub fn portrait_svg(p: &Portrait) -> String {
    let cols = match p.panels.len() {
        1 => 1,
        2 | 4 => 2,
        _ => 3,
    };
    let rows = p.panels.len().div_ceil(cols);
    let cell = PANEL_PX + MARGIN;
    let mut svg = Svg::new(cols as f64 * cell + MARGIN, rows as f64 * cell + MARGIN);
    for (i, panel) in p.panels.iter().enumerate() {
        let f = Frame {
            left: MARGIN + (i % cols) as f64 * cell,
            top: MARGIN + (i / cols) as f64 * cell,
            width: PANEL_PX,
            height: PANEL_PX,
            x: (0.0, panel.window.0),
            y: (0.0, panel.window.1),
        };
        let clip = svg.axes(&f, &panel.title);
        for c in &panel.curves {
            let width = if c.kind == CurveKind::Trajectory { 0.8 } else { 1.6 };
            svg.polyline(&f, &clip, &c.points, c.kind.color(), width);
        }
    }
    svg.finish()
}

fn label_color(l: DiagramLabel) -> &'static str {
    match l {
        DiagramLabel::GAS => "#2e8b57",
        DiagramLabel::ASNotGAS => "#9acd32",
        DiagramLabel::Unstable => "#d9534f",
        DiagramLabel::Center => "#000000",
        DiagramLabel::Zip => "#6a5acd",
        DiagramLabel::Undetermined => "#bbbbbb",
    }
}

/// Heat map of a labelled `(α, β)` grid with a colour legend.
pub fn diagram_svg(cells: &[DiagramCell]) -> String {
    let lo_hi = |g: fn(&DiagramCell) -> f64| {
        cells.iter().map(g).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)))
    };
    let (ax, bx) = lo_hi(|c| c.alpha);
    let (ay, by) = lo_hi(|c| c.beta);
    let mut alphas: Vec<f64> = cells.iter().map(|c| c.alpha).collect();
    alphas.dedup();
    let na = alphas.len().max(1);
    let nb = cells.len().checked_div(na).unwrap_or(1).max(1);
    let size = 480.0;
    let (cw, ch) = (size / na as f64, size / nb as f64);
    let (dx, dy) = (if bx > ax { (bx - ax) / (na - 1) as f64 } else { 1.0 }, if by > ay { (by - ay) / (nb - 1) as f64 } else { 1.0 });
    let f = Frame { left: MARGIN, top: MARGIN, width: size, height: size, x: (ax - dx / 2.0, bx + dx / 2.0), y: (ay - dy / 2.0, by + dy / 2.0) };
    let mut svg = Svg::new(size + 2.0 * MARGIN + 130.0, size + 2.0 * MARGIN);
    for c in cells {
        let (px, py) = f.px(c.alpha - dx / 2.0, c.beta + dy / 2.0);
        svg.rect(px, py, cw, ch, label_color(c.label));
    }
    svg.axes(&f, "alpha (horizontal), beta (vertical)");
    for (i, l) in DiagramLabel::ALL.iter().enumerate() {
        let y = MARGIN + 20.0 * i as f64;
        svg.rect(MARGIN + size + 15.0, y, 12.0, 12.0, label_color(*l));
        svg.text(MARGIN + size + 32.0, y + 10.0, 11.0, l.as_str());
    }
    svg.finish()
}
