//! Acceptance suite: one PASS/FAIL line per criterion, each checked against
//! an oracle implemented here rather than in the library.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use glv_core::certificates::{
    boundary_curve, dulac_generic_default, dulac_triangle, CurveCase, DulacBranch,
    GridSpec, InvariantSetCertificate, MaximumLocus,
};
use glv_core::classify::{
    classify_alpha_beta, region_diagram, write_diagram_csv, ClassifyOptions, DiagramBox, DiagramCell, DiagramLabel,
};
use glv_core::focal::{d1_sign_expr, dancso_coordinates, dancso_g, hopf_verdict};
use glv_core::simulate::{integrate, SimConfig, Terminal, Trajectory};
use glv_core::{jacobian, solve_equilibrium, Execution, ExponentMatrix, GlvSystem, Rates, ReducedSystem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn log_uniform(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    r.gen_range(lo.ln()..hi.ln()).exp()
}

fn within(limit_s: f64, elapsed: Duration) -> Result<(), String> {
    if elapsed.as_secs_f64() < limit_s {
        Ok(())
    } else {
        Err(format!("took {:.1} s, limit {limit_s} s", elapsed.as_secs_f64()))
    }
}

/// Random reduced systems: exponents and log-rates uniform in [-3, 3],
/// |det C| >= 0.1.
fn random_systems(n: usize, seed: u64) -> Vec<ReducedSystem> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let a: [f64; 4] = std::array::from_fn(|_| r.gen_range(-3.0..3.0));
        let k: [f64; 4] = std::array::from_fn(|_| r.gen_range(-3.0f64..3.0).exp());
        let c = ExponentMatrix::from_array(a).unwrap();
        if c.det().abs() >= 0.1 {
            out.push(ReducedSystem::new(c, Rates::from_array(k).unwrap()).unwrap());
        }
    }
    out
}

/// Newton iteration on the log-linear system `C (u, v) = (ln(k2/k1), ln(k3/k4))`,
/// each step solved by Gaussian elimination with partial pivoting.
fn newton_equilibrium(s: &ReducedSystem) -> Option<(f64, f64)> {
    let Rates { k1, k2, k3, k4 } = s.rates;
    let rhs = [(k2 / k1).ln(), (k3 / k4).ln()];
    let m = [[s.a1, s.b1], [s.a3, s.b3]];
    let (mut u, mut v) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let f = [m[0][0] * u + m[0][1] * v - rhs[0], m[1][0] * u + m[1][1] * v - rhs[1]];
        let (p, q) = if m[0][0].abs() >= m[1][0].abs() { (0, 1) } else { (1, 0) };
        let l = m[q][0] / m[p][0];
        let piv = m[q][1] - l * m[p][1];
        let dv = (f[q] - l * f[p]) / piv;
        let du = (f[p] - m[p][1] * dv) / m[p][0];
        u -= du;
        v -= dv;
        if du.abs() <= 1e-15 * (1.0 + u.abs()) && dv.abs() <= 1e-15 * (1.0 + v.abs()) {
            break;
        }
    }
    (u.is_finite() && v.is_finite()).then(|| (u.exp(), v.exp()))
}

fn criterion_1() -> Outcome {
    let t0 = Instant::now();
    let systems = random_systems(10_000, 1);
    let mut worst_res = 0.0f64;
    let mut worst_newton = 0.0f64;
    for s in &systems {
        let (x, y) = solve_equilibrium(s).require_unique().map_err(|e| e.to_string())?;
        let Rates { k1, k2, k3, k4 } = s.rates;
        let (u, v) = (x.ln(), y.ln());
        let r1 = (k1 * (s.a1 * u + s.b1 * v).exp() - k2).abs() / k2;
        let r2 = (k3 - k4 * (s.a3 * u + s.b3 * v).exp()).abs() / k3;
        worst_res = worst_res.max(r1).max(r2);
        let (xn, yn) = newton_equilibrium(s).ok_or("Newton oracle did not converge")?;
        worst_newton = worst_newton.max(((x - xn) / xn).abs()).max(((y - yn) / yn).abs());
    }
    within(5.0, t0.elapsed())?;
    let detail = format!(
        "10000 systems, max residual {worst_res:.1e} (<= 1e-10), max Newton disagreement {worst_newton:.1e} (<= 1e-8), {:.2} s",
        t0.elapsed().as_secs_f64()
    );
    if worst_res <= 1e-10 && worst_newton <= 1e-8 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Full scheme with the same reduced exponents and rates plus a random
/// common monomial `x^α2 y^β2`.
fn lift(s: &ReducedSystem, r: &mut ChaCha8Rng) -> GlvSystem {
    let (al2, be2) = (r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
    GlvSystem::new([s.a1 + al2, s.b1 + be2, al2, be2, s.a3 + al2, s.b3 + be2], s.rates).unwrap()
}

/// Full field divided by `x*^α2 y*^β2`, evaluated through logarithms.
fn scaled_full_field(g: &GlvSystem, eq: (f64, f64), x: f64, y: f64) -> [f64; 2] {
    let e = g.exponents();
    let Rates { k1, k2, k3, k4 } = g.rates;
    let (u, v) = (x.ln(), y.ln());
    let shift = e[2] * eq.0.ln() + e[3] * eq.1.ln();
    let m = |a: f64, b: f64| (a * u + b * v - shift).exp();
    [k1 * m(e[0], e[1]) - k2 * m(e[2], e[3]), k3 * m(e[2], e[3]) - k4 * m(e[4], e[5])]
}

fn criterion_2() -> Outcome {
    let t0 = Instant::now();
    let systems = random_systems(10_000, 1);
    let mut r = rng(2);
    let mut worst_fd = 0.0f64;
    let mut sign_failures = 0;
    let mut skipped = 0;
    for s in &systems {
        let g = lift(s, &mut r);
        let eq = solve_equilibrium(s).require_unique().map_err(|e| e.to_string())?;
        let rep = match jacobian(&g, eq) {
            Ok(rep) => rep,
            Err(glv_core::GlvError::Numerical(_)) => {
                // x*^α2 y*^β2 outside the f64 range.
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e.to_string()),
        };
        let sgn = |v: f64| if v > 0.0 { 1 } else if v < 0.0 { -1 } else { 0 };
        let Rates { k2, k3, .. } = s.rates;
        let indicator = s.a1 * k2 / eq.0 - s.b3 * k3 / eq.1;
        if sgn(rep.det) != -sgn(s.det_c()) || sgn(rep.trace) != sgn(indicator) {
            sign_failures += 1;
        }
        let prefactor = (g.exponents()[2] * eq.0.ln() + g.exponents()[3] * eq.1.ln()).exp();
        let mut fd = [[0.0; 2]; 2];
        for j in 0..2 {
            let h = 1e-6;
            let (mut p, mut m) = (eq, eq);
            if j == 0 {
                p.0 *= 1.0 + h;
                m.0 *= 1.0 - h;
            } else {
                p.1 *= 1.0 + h;
                m.1 *= 1.0 - h;
            }
            let (fp, fm) = (scaled_full_field(&g, eq, p.0, p.1), scaled_full_field(&g, eq, m.0, m.1));
            let step = if j == 0 { 2.0 * h * eq.0 } else { 2.0 * h * eq.1 };
            for i in 0..2 {
                fd[i][j] = (fp[i] - fm[i]) / step;
            }
        }
        let scale = rep.jacobian.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs())) / prefactor;
        for i in 0..2 {
            for j in 0..2 {
                worst_fd = worst_fd.max((rep.jacobian[i][j] / prefactor - fd[i][j]).abs() / scale);
            }
        }
    }
    within(10.0, t0.elapsed())?;
    let detail = format!(
        "{} systems, sign mismatches {sign_failures}, max finite-difference error {worst_fd:.1e} (<= 1e-5), {skipped} skipped with unrepresentable prefactor, {:.2} s",
        systems.len() - skipped,
        t0.elapsed().as_secs_f64()
    );
    if sign_failures == 0 && worst_fd <= 1e-5 && skipped * 100 <= systems.len() {
        Ok(detail)
    } else {
        Err(detail)
    }
}

#[derive(Clone, Copy, Debug)]
struct Cx(f64, f64);

impl Cx {
    fn add(self, o: Cx) -> Cx {
        Cx(self.0 + o.0, self.1 + o.1)
    }
    fn sub(self, o: Cx) -> Cx {
        Cx(self.0 - o.0, self.1 - o.1)
    }
    fn mul(self, o: Cx) -> Cx {
        Cx(self.0 * o.0 - self.1 * o.1, self.0 * o.1 + self.1 * o.0)
    }
    fn scale(self, s: f64) -> Cx {
        Cx(self.0 * s, self.1 * s)
    }
    fn conj(self) -> Cx {
        Cx(self.0, -self.1)
    }
    fn div(self, o: Cx) -> Cx {
        let d = o.0 * o.0 + o.1 * o.1;
        self.mul(o.conj()).scale(1.0 / d)
    }
}

fn falling(a: f64, n: usize) -> f64 {
    (0..n).map(|i| a - i as f64).product()
}

/// Derivative tensors of the reduced field at `eq`: `d[c][i][j]` is
/// `∂^{i+j} f_c / ∂x^i ∂y^j`.
fn field_derivatives(s: &ReducedSystem, eq: (f64, f64)) -> [[[f64; 4]; 4]; 2] {
    let Rates { k1, k4, .. } = s.rates;
    let (x, y) = eq;
    let mono = |c: f64, p: f64, q: f64, i: usize, j: usize| c * falling(p, i) * falling(q, j) * x.powf(p - i as f64) * y.powf(q - j as f64);
    let mut d = [[[0.0; 4]; 4]; 2];
    for i in 0..4 {
        for j in 0..4 {
            if i + j == 0 {
                continue;
            }
            d[0][i][j] = mono(k1, s.a1, s.b1, i, j);
            d[1][i][j] = mono(-k4, s.a3, s.b3, i, j);
        }
    }
    d
}

/// First Lyapunov coefficient by the invariant eigenvector formula, with
/// the magnitude of its largest contribution.
fn lyapunov_coefficient(s: &ReducedSystem, eq: (f64, f64)) -> (f64, f64) {
    let d = field_derivatives(s, eq);
    let a = [[d[0][1][0], d[0][0][1]], [d[1][1][0], d[1][0][1]]];
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let w = det.sqrt();
    let iw = Cx(0.0, w);
    let q = if a[0][1].abs() >= a[1][0].abs() {
        [Cx(a[0][1], 0.0), iw.sub(Cx(a[0][0], 0.0))]
    } else {
        [iw.sub(Cx(a[1][1], 0.0)), Cx(a[1][0], 0.0)]
    };
    let minus_iw = Cx(0.0, -w);
    let mut p = if a[1][0].abs() >= a[0][1].abs() {
        [Cx(a[1][0], 0.0), minus_iw.sub(Cx(a[0][0], 0.0))]
    } else {
        [minus_iw.sub(Cx(a[1][1], 0.0)), Cx(a[0][1], 0.0)]
    };
    let dot = |p: &[Cx; 2], q: &[Cx; 2]| p[0].conj().mul(q[0]).add(p[1].conj().mul(q[1]));
    let s0 = Cx(1.0, 0.0).div(dot(&p, &q)).conj();
    p = [p[0].mul(s0), p[1].mul(s0)];

    let b = |u: &[Cx; 2], v: &[Cx; 2]| -> [Cx; 2] {
        std::array::from_fn(|c| {
            let t = &d[c];
            u[0].mul(v[0]).scale(t[2][0])
                .add(u[0].mul(v[1]).add(u[1].mul(v[0])).scale(t[1][1]))
                .add(u[1].mul(v[1]).scale(t[0][2]))
        })
    };
    let cc = |u: &[Cx; 2], v: &[Cx; 2], z: &[Cx; 2]| -> [Cx; 2] {
        std::array::from_fn(|c| {
            let t = &d[c];
            let mut acc = Cx(0.0, 0.0);
            for i in 0..2 {
                for j in 0..2 {
                    for k in 0..2 {
                        let nx = [i, j, k].iter().filter(|&&m| m == 0).count();
                        acc = acc.add(u[i].mul(v[j]).mul(z[k]).scale(t[nx][3 - nx]));
                    }
                }
            }
            acc
        })
    };
    let solve = |m: [[Cx; 2]; 2], r: [Cx; 2]| -> [Cx; 2] {
        let det = m[0][0].mul(m[1][1]).sub(m[0][1].mul(m[1][0]));
        [
            r[0].mul(m[1][1]).sub(m[0][1].mul(r[1])).div(det),
            m[0][0].mul(r[1]).sub(r[0].mul(m[1][0])).div(det),
        ]
    };
    let qb = [q[0].conj(), q[1].conj()];
    let real = |v: f64| Cx(v, 0.0);
    let am = [[real(a[0][0]), real(a[0][1])], [real(a[1][0]), real(a[1][1])]];
    let a_inv_b = solve(am, b(&q, &qb));
    let shifted = [
        [Cx(-a[0][0], 2.0 * w), real(-a[0][1])],
        [real(-a[1][0]), Cx(-a[1][1], 2.0 * w)],
    ];
    let r2 = solve(shifted, b(&q, &q));
    let parts = [dot(&p, &cc(&q, &q, &qb)), dot(&p, &b(&q, &a_inv_b)).scale(-2.0), dot(&p, &b(&qb, &r2))];
    let total = parts.iter().fold(Cx(0.0, 0.0), |acc, t| acc.add(*t));
    let scale = parts.iter().map(|t| t.0.abs()).fold(0.0, f64::max);
    (total.0 / (2.0 * w), scale / (2.0 * w))
}

fn sign0(v: f64, tol: f64) -> i8 {
    if v.abs() < tol {
        0
    } else if v > 0.0 {
        1
    } else {
        -1
    }
}

fn criterion_3() -> Outcome {
    let t0 = Instant::now();
    let mut r = rng(3);
    let (mut n, mut mismatches, mut oracle_mismatches) = (0, 0, 0);
    let mut first_bad = None;
    while n < 1000 {
        let a: [f64; 4] = std::array::from_fn(|_| r.gen_range(-3.0..3.0));
        let c = ExponentMatrix::from_array(a).unwrap();
        if !(c.det() < 0.0 && a[0] * a[3] > 0.0) {
            continue;
        }
        // Rates placing a trace-zero equilibrium at a random point.
        let (xs, ys) = (log_uniform(&mut r, 0.1, 10.0), log_uniform(&mut r, 0.1, 10.0));
        let k1 = log_uniform(&mut r, 0.1, 10.0);
        let k2 = k1 * xs.powf(c.a1) * ys.powf(c.b1);
        let k3 = c.a1 * k2 * ys / (c.b3 * xs);
        let k4 = k3 * xs.powf(-c.a3) * ys.powf(-c.b3);
        let s = ReducedSystem::new(c, Rates::new(k1, k2, k3, k4).unwrap()).unwrap();
        let rep = hopf_verdict(&s).map_err(|e| e.to_string())?;
        let (ph, qh, p, q) = dancso_coordinates(&c);
        let g = dancso_g(ph, qh, p, q);
        let sd = sign0(rep.d1, 1e-9);
        if sign0(rep.focal_value, 1e-9) != sd || sign0(g, 1e-9) != sd {
            mismatches += 1;
        }
        let (l1, l1_scale) = lyapunov_coefficient(&s, (xs, ys));
        if sign0(l1, 1e-9 * l1_scale) != sd && sd != 0 {
            oracle_mismatches += 1;
            first_bad.get_or_insert((a, l1, rep.d1));
        }
        n += 1;
    }
    let mut worst_line = 0.0f64;
    for i in 0..=400 {
        let alpha = -1.0 + 4.0 * i as f64 / 400.0;
        let beta = 2.0 - alpha;
        let c = ExponentMatrix::new(alpha - 1.0, -beta, -1.0, 1.0 - beta).unwrap();
        let expect = (alpha - 1.0) * (alpha - 1.0) * (alpha - 2.0);
        worst_line = worst_line.max((d1_sign_expr(&c) - expect).abs());
    }
    within(10.0, t0.elapsed())?;
    let detail = format!(
        "1000 samples, d1/D1/G sign mismatches {mismatches}, eigenvector-formula mismatches {oracle_mismatches}, max |d1 - (a-1)^2(a-2)| on a+b=2 {worst_line:.1e} (<= 1e-12), {:.2} s",
        t0.elapsed().as_secs_f64()
    );
    if mismatches == 0 && oracle_mismatches == 0 && worst_line <= 1e-12 {
        Ok(detail)
    } else {
        Err(format!("{detail}; first oracle mismatch {first_bad:?}"))
    }
}

fn drift(traj: &Trajectory, h: impl Fn(f64, f64) -> f64) -> f64 {
    let h0 = h(traj.samples[0].x, traj.samples[0].y);
    traj.samples.iter().map(|s| (h(s.x, s.y) - h0).abs()).fold(0.0, f64::max)
}

fn criterion_4() -> Outcome {
    let t0 = Instant::now();
    let cfg = SimConfig { stop_on_periodic: false, ..SimConfig::with_t_max(100.0) };
    let llibre = ReducedSystem::new(ExponentMatrix::new(-1.0, -2.0, -2.0, -1.0).unwrap(), Rates::UNIT).unwrap();
    let tl = integrate(&llibre, 2.0, 2.0, &cfg).map_err(|e| e.to_string())?;
    let dl = drift(&tl, |x, y| x + y + 1.0 / (x * y));
    let k = Rates::new(1.0, 2.0, 3.0, 4.0).unwrap();
    let lv = GlvSystem::classical(k);
    let tc = integrate(&lv, 2.0, 2.0, &cfg).map_err(|e| e.to_string())?;
    let dc = drift(&tc, |x, y| k.k3 * x - k.k4 * x.ln() + k.k2 * y - k.k1 * y.ln());
    let t_ok = tl.last().t >= 100.0 - 1e-9 && tc.last().t >= 100.0 - 1e-9;
    within(5.0, t0.elapsed())?;
    let detail = format!(
        "H drift {dl:.1e}, classical V drift {dc:.1e} (<= 1e-6) over t in [0, {}], {:.2} s",
        tl.last().t.min(tc.last().t),
        t0.elapsed().as_secs_f64()
    );
    if dl <= 1e-6 && dc <= 1e-6 && t_ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_5() -> Outcome {
    let t0 = Instant::now();
    let beta = 0.8;
    let run = |alpha: f64, tol: f64| {
        let sys = GlvSystem::alpha_beta(alpha, beta, Rates::UNIT).unwrap();
        let cfg = SimConfig { rel_tol: tol, abs_tol: tol * 1e-2, ..SimConfig::with_t_max(20_000.0) };
        integrate(&sys, 1.1, 1.0, &cfg).map(|t| t.terminal)
    };
    let mut amps = Vec::new();
    let mut worst_period = 0.0f64;
    for delta in [0.05, 0.04, 0.03, 0.02, 0.01] {
        let alpha = 2.0 + delta - beta;
        let (a, b) = (run(alpha, 1e-9).map_err(|e| e.to_string())?, run(alpha, 5e-10).map_err(|e| e.to_string())?);
        match (a, b) {
            (Terminal::PeriodicOrbit { period: p1, amplitude }, Terminal::PeriodicOrbit { period: p2, .. }) => {
                amps.push(amplitude);
                worst_period = worst_period.max((p1 - p2).abs() / p1);
            }
            other => return Err(format!("alpha + beta = {}: expected a limit cycle, got {other:?}", 2.0 + delta)),
        }
    }
    let below = run(1.95 - beta, 1e-9).map_err(|e| e.to_string())?;
    let decreasing = amps.windows(2).all(|w| w[1] < w[0]);
    within(60.0, t0.elapsed())?;
    let detail = format!(
        "beta = {beta}, alpha + beta = 2.05..2.01: log-amplitudes {:?}, period change under halved tolerance {worst_period:.1e} (<= 1e-5); alpha + beta = 1.95: {}, {:.2} s",
        amps.iter().map(|a| (a * 1e3).round() / 1e3).collect::<Vec<_>>(),
        below.name(),
        t0.elapsed().as_secs_f64()
    );
    if decreasing && worst_period <= 1e-5 && below.is_converged() {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Grid cells with `α = i/20`, `β = j/20`, labelled independently from
/// integer arithmetic on `(i, j)`.
fn oracle_label(i: i64, j: i64) -> DiagramLabel {
    // 400 (αβ − α + 1)
    let det = i * j - 20 * i + 400;
    if det == 0 {
        return DiagramLabel::Zip;
    }
    if det < 0 || i + j > 40 {
        return DiagramLabel::Unstable;
    }
    if i == 20 && j == 20 {
        return DiagramLabel::Center;
    }
    let gas = (i <= 20 && j <= 20) || (20 < i && 2 * i <= 60 && i - 20 <= j && j <= 40 - i);
    if gas { DiagramLabel::GAS } else { DiagramLabel::ASNotGAS }
}

fn grid_index(v: f64) -> i64 {
    (v * 20.0).round() as i64
}

fn standard_cells() -> Vec<DiagramCell> {
    region_diagram(&DiagramBox::standard(), Execution::Parallel)
}

fn pick<T: Clone>(r: &mut ChaCha8Rng, items: &[T], n: usize) -> Vec<T> {
    let mut idx: Vec<usize> = (0..items.len()).collect();
    for k in 0..n.min(idx.len()) {
        let j = r.gen_range(k..idx.len());
        idx.swap(k, j);
    }
    idx[..n.min(items.len())].iter().map(|&i| items[i].clone()).collect()
}

fn criterion_6() -> Outcome {
    let t0 = Instant::now();
    let cells = standard_cells();
    let mut r = rng(6);
    // The Hopf line converges algebraically rather than exponentially.
    let gas: Vec<_> = cells
        .iter()
        .filter(|c| c.label == DiagramLabel::GAS && grid_index(c.alpha) + grid_index(c.beta) != 40)
        .cloned()
        .collect();
    let gas_points = pick(&mut r, &gas, 20);
    // Starts with a large coordinate dip deep towards an axis before
    // recovering, so the boundary threshold is moved far out.
    let cfg = SimConfig { stop_on_periodic: false, boundary_log_threshold: -200.0, ..SimConfig::with_t_max(1e5) };
    let mut failures = Vec::new();
    for c in &gas_points {
        assert_eq!(oracle_label(grid_index(c.alpha), grid_index(c.beta)), DiagramLabel::GAS);
        let sys = GlvSystem::alpha_beta(c.alpha, c.beta, Rates::UNIT).unwrap();
        for _ in 0..5 {
            let (x0, y0) = (log_uniform(&mut r, 1e-2, 1e2), log_uniform(&mut r, 1e-2, 1e2));
            let t = integrate(&sys, x0, y0, &cfg).map_err(|e| e.to_string())?;
            let end = t.last();
            let near = (end.x - 1.0).abs() < 1e-6 && (end.y - 1.0).abs() < 1e-6;
            if !t.terminal.is_converged() || !near {
                failures.push(format!("({}, {}) from ({x0:.3}, {y0:.3}): {}", c.alpha, c.beta, t.terminal.name()));
            }
        }
    }
    let not_gas: Vec<_> = cells.iter().filter(|c| c.label == DiagramLabel::ASNotGAS).cloned().collect();
    let l1: Vec<_> = not_gas.iter().filter(|c| c.alpha < 1.0).cloned().collect();
    let l4: Vec<_> = not_gas.iter().filter(|c| c.alpha > 1.0).cloned().collect();
    let mut ngas_points = pick(&mut r, &l1, 5);
    ngas_points.extend(pick(&mut r, &l4, 5));
    let mut escaped = 0;
    let mut invariance_breaks = Vec::new();
    for c in &ngas_points {
        let v = classify_alpha_beta(c.alpha, c.beta, &ClassifyOptions { exec: Execution::Sequential, ..Default::default() })
            .map_err(|e| e.to_string())?;
        let cert = v
            .certificates
            .iter()
            .find_map(|k| match k {
                glv_core::certificates::Certificate::InvariantSet(s) => Some(s.clone()),
                _ => None,
            })
            .ok_or_else(|| format!("({}, {}) has no invariant-set certificate", c.alpha, c.beta))?;
        let starts = inside_starts(&cert, &mut r, 5);
        let sys = GlvSystem::alpha_beta(c.alpha, c.beta, Rates::UNIT).unwrap();
        let mut any = false;
        for (x0, y0) in starts {
            let t = integrate(&sys, x0, y0, &SimConfig::with_t_max(1e4)).map_err(|e| e.to_string())?;
            if !t.terminal.is_converged() {
                any = true;
            }
            if !stays_inside(&cert, &t) {
                invariance_breaks.push(format!("({}, {}) from ({x0:.3}, {y0:.3})", c.alpha, c.beta));
            }
        }
        if any {
            escaped += 1;
        }
    }
    within(120.0, t0.elapsed())?;
    let detail = format!(
        "{} GAS points x 5 starts: {} failures; {} NotGAS points: {escaped} with a non-converging start, {} invariance violations, {:.2} s",
        gas_points.len(),
        failures.len(),
        ngas_points.len(),
        invariance_breaks.len(),
        t0.elapsed().as_secs_f64()
    );
    if failures.is_empty() && gas_points.len() == 20 && escaped == ngas_points.len() && ngas_points.len() == 10 && invariance_breaks.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {:?} {:?}", failures.iter().take(3).collect::<Vec<_>>(), invariance_breaks.iter().take(3).collect::<Vec<_>>()))
    }
}

/// Starts inside an invariant set: its interior point plus random points
/// accepted by an independent membership test.
fn inside_starts(cert: &InvariantSetCertificate, r: &mut ChaCha8Rng, n: usize) -> Vec<(f64, f64)> {
    let mut out = vec![cert.interior_point()];
    let (cx, cy) = cert.interior_point();
    let mut tries = 0;
    while out.len() < n && tries < 100_000 {
        tries += 1;
        let (x, y) = (cx * log_uniform(r, 0.1, 10.0), cy * log_uniform(r, 0.1, 10.0));
        if member(cert, x, y, 1e-3) {
            out.push((x, y));
        }
    }
    out
}

/// Membership with a log-coordinate margin (negative margin tolerates slight
/// excursions).
fn member(cert: &InvariantSetCertificate, x: f64, y: f64, margin: f64) -> bool {
    let (u, v, l0, g) = (x.ln(), y.ln(), cert.x0.ln(), cert.gamma);
    use glv_core::certificates::Lemma::*;
    match cert.lemma {
        L1 => u >= l0 + margin && v <= g * u - margin,
        L2 => u >= l0 + margin && v >= g * u + margin,
        L3 => u <= l0 - margin && g * l0 + margin <= v && v <= g * u - margin,
        L4 => u >= l0 + margin && g * l0 + margin <= v && v <= g * u - margin,
    }
}

fn stays_inside(cert: &InvariantSetCertificate, t: &Trajectory) -> bool {
    t.samples.iter().all(|s| member(cert, s.x, s.y, -1e-9))
}

/// `div(h F)/h` with `h = x^{-p} y^{-q}` by central differences of `h F`.
fn fd_divergence(f: &dyn Fn(f64, f64) -> [f64; 2], p: f64, q: f64, x: f64, y: f64) -> f64 {
    let hx = |x: f64, y: f64| x.powf(-p) * y.powf(-q);
    let e = 1e-5;
    let d1 = (hx(x * (1.0 + e), y) * f(x * (1.0 + e), y)[0] - hx(x * (1.0 - e), y) * f(x * (1.0 - e), y)[0]) / (2.0 * e * x);
    let d2 = (hx(x, y * (1.0 + e)) * f(x, y * (1.0 + e))[1] - hx(x, y * (1.0 - e)) * f(x, y * (1.0 - e))[1]) / (2.0 * e * y);
    (d1 + d2) / hx(x, y)
}

fn criterion_7() -> Outcome {
    let t0 = Instant::now();
    let cells = standard_cells();
    let triangle: Vec<_> = cells
        .iter()
        .filter(|c| c.label == DiagramLabel::GAS && c.alpha > 1.0)
        .cloned()
        .collect();
    let mut r = rng(7);
    let generic_ab = pick(
        &mut r,
        &cells.iter().filter(|c| c.label == DiagramLabel::GAS && c.alpha <= 1.0).cloned().collect::<Vec<_>>(),
        20,
    );
    let mut generic: Vec<ReducedSystem> =
        generic_ab.iter().map(|c| ReducedSystem::alpha_beta(c.alpha, c.beta, Rates::UNIT).unwrap()).collect();
    while generic.len() < 30 {
        let a = [-r.gen_range(0.05..3.0), r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0), r.gen_range(0.05..3.0)];
        let c = ExponentMatrix::from_array(a).unwrap();
        if c.det() < 0.0 {
            let k: [f64; 4] = std::array::from_fn(|_| log_uniform(&mut r, 0.2, 5.0));
            generic.push(ReducedSystem::new(c, Rates::from_array(k).unwrap()).unwrap());
        }
    }
    let mut problems = Vec::new();
    let mut worst_gap = f64::NEG_INFINITY;
    for s in &generic {
        let cert = dulac_generic_default(s, Execution::Parallel).map_err(|e| e.to_string())?;
        let field = |x: f64, y: f64| {
            let Rates { k1, k2, k3, k4 } = s.rates;
            [k1 * x.powf(s.a1) * y.powf(s.b1) - k2, k3 - k4 * x.powf(s.a3) * y.powf(s.b3)]
        };
        let grid = cert.verification.grid;
        let mut max_fd = f64::NEG_INFINITY;
        for (u, v) in grid.points() {
            let d = fd_divergence(&field, cert.p, cert.q, u.exp(), v.exp());
            max_fd = max_fd.max(d);
        }
        worst_gap = worst_gap.max(max_fd);
        if !(cert.verification.passed && max_fd < 0.0 && cert.verification.samples == 201 * 201) {
            problems.push(format!("{:?}: library max {:.3e}, oracle max {max_fd:.3e}", s.matrix().as_array(), cert.verification.worst_value));
        }
    }
    let mut locus_checked = 0;
    for c in &triangle {
        let cert = dulac_triangle(c.alpha, c.beta, &GridSpec::default(), Execution::Parallel).map_err(|e| e.to_string())?;
        let (alpha, beta) = (c.alpha, c.beta);
        let field = |x: f64, y: f64| [x.powf(alpha) - x * y.powf(beta), x * y.powf(beta) - y];
        let v11 = alpha + beta - 2.0;
        let grid = cert.verification.grid;
        let pts = grid.points();
        let mut best = (f64::NEG_INFINITY, (0.0, 0.0));
        let mut over = 0;
        for &(u, v) in &pts {
            let d = fd_divergence(&field, cert.p, cert.q, u.exp(), v.exp());
            let scale = 1.0 + u.exp().powf(alpha) + u.exp() * v.exp().powf(beta) + v.exp();
            if d - v11 > 1e-6 * scale {
                over += 1;
            }
            let excess = (d - v11) / scale;
            if excess > best.0 {
                best = (excess, (u, v));
            }
        }
        let locus = cert.locus.as_ref().ok_or("triangle certificate without locus report")?;
        let h = grid.spacing();
        let (u, v) = best.1;
        let dist = match locus.locus {
            MaximumLocus::Point => u.hypot(v),
            MaximumLocus::Diagonal => (u - v).abs() / std::f64::consts::SQRT_2,
        };
        let expected_locus = if grid_index(beta) == grid_index(alpha) - 20 { MaximumLocus::Diagonal } else { MaximumLocus::Point };
        locus_checked += 1;
        if !matches!(cert.branch, DulacBranch::Triangle { .. })
            || over > 0
            || !cert.verification.passed
            || !locus.passed
            || locus.locus != expected_locus
            || dist > h + 1e-12
        {
            problems.push(format!(
                "({alpha}, {beta}): {over} points above v(1,1), oracle argmax at distance {dist:.3} (h = {h:.3}), locus {:?}",
                locus.locus
            ));
        }
    }
    within(10.0, t0.elapsed())?;
    let detail = format!(
        "{} generic certificates (max oracle divergence {worst_gap:.2e} < 0), {locus_checked} triangle certificates on 201^2 grids, {} problems, {:.2} s",
        generic.len(),
        problems.len(),
        t0.elapsed().as_secs_f64()
    );
    if problems.is_empty() && locus_checked > 0 {
        Ok(detail)
    } else {
        Err(format!("{detail}; {:?}", problems.iter().take(3).collect::<Vec<_>>()))
    }
}

/// Classical RK4 for `dw/dt = g(t)` from `t0` to `t1`.
fn rk4_quadrature(g: impl Fn(f64) -> f64, t0: f64, t1: f64, steps: usize) -> f64 {
    let h = (t1 - t0) / steps as f64;
    let mut w = 0.0;
    for i in 0..steps {
        let t = t0 + h * i as f64;
        let (k1, k2, k4) = (g(t), g(t + 0.5 * h), g(t + h));
        w += h / 6.0 * (k1 + 4.0 * k2 + k4);
    }
    w
}

fn criterion_8() -> Outcome {
    let t0 = Instant::now();
    let k = Rates::new(1.3, 0.9, 1.1, 0.8).unwrap();
    let cases = [
        ([-1.0, -0.5, -0.5, 0.0], CurveCase::B3ZeroGeneric),
        ([-1.0, -0.5, -2.0, 0.0], CurveCase::B3ZeroLog),
        ([0.0, -0.5, -0.5, 2.0], CurveCase::A1ZeroGeneric),
        ([0.0, -0.5, -0.5, 0.5], CurveCase::A1ZeroLog1),
        ([0.0, -0.5, -0.5, 1.0], CurveCase::A1ZeroLog2),
    ];
    let mut worst = 0.0f64;
    let mut problems = Vec::new();
    for (a, expect) in cases {
        let s = ReducedSystem::new(ExponentMatrix::from_array(a).unwrap(), k).unwrap();
        let eq = solve_equilibrium(&s).require_unique().map_err(|e| e.to_string())?;
        let curve = boundary_curve(&s, eq).map_err(|e| e.to_string())?;
        if curve.case != expect {
            problems.push(format!("{a:?}: case {:?}, expected {expect:?}", curve.case));
        }
        let Rates { k1, k2, k3, k4 } = k;
        for j in 0..20 {
            let frac = j as f64 / 19.0;
            let (param, oracle) = if expect.is_b3_zero() {
                // Auxiliary orbit equation k1 x^a1 y^b1 dy = (k3 − k4 x^a3) dx
                // in w = y^{b1+1}/(b1+1), t = ln x.
                let x = eq.0 * (0.01f64).powf(1.0 - frac * 0.99);
                let w = rk4_quadrature(
                    |t| {
                        let s = t.exp();
                        s * (k3 - k4 * s.powf(a[2])) * s.powf(-a[0]) / k1
                    },
                    eq.0.ln(),
                    x.ln(),
                    4000,
                );
                (x, ((a[1] + 1.0) * w).powf(1.0 / (a[1] + 1.0)))
            } else {
                // k4 x^a3 y^b3 dx = (k2 − k1 y^b1) dy in w = x^{a3+1}/(a3+1), t = ln y.
                let y = eq.1 * (100.0f64).powf(0.01 + 0.99 * frac);
                let w = rk4_quadrature(
                    |t| {
                        let s = t.exp();
                        s * (k2 - k1 * s.powf(a[1])) * s.powf(-a[3]) / k4
                    },
                    eq.1.ln(),
                    y.ln(),
                    4000,
                );
                (y, ((a[2] + 1.0) * w).powf(1.0 / (a[2] + 1.0)))
            };
            let got = curve.eval(param).map_err(|e| e.to_string())?;
            let rel = (got - oracle).abs() / oracle.abs();
            if !(rel <= 1e-4) {
                problems.push(format!("{expect:?} at {param:.4}: {got} vs {oracle}"));
            }
            worst = worst.max(rel);
        }
    }
    within(10.0, t0.elapsed())?;
    let detail = format!("5 cases x 20 abscissae, max relative deviation {worst:.1e} (<= 1e-4), {:.2} s", t0.elapsed().as_secs_f64());
    if problems.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {:?}", problems.iter().take(3).collect::<Vec<_>>()))
    }
}

fn criterion_9() -> Outcome {
    let t0 = Instant::now();
    let cells = standard_cells();
    let mut csv = Vec::new();
    write_diagram_csv(&cells, &mut csv).map_err(|e| e.to_string())?;
    let elapsed = t0.elapsed();
    let text = String::from_utf8(csv).map_err(|e| e.to_string())?;
    let mut missing = Vec::new();
    for row in ["0,0,GAS", "1,1,Center", "1.5,0.5,GAS", "0.5,1.5,AS-not-GAS", "2,2,Unstable"] {
        if !text.lines().any(|l| l == row) {
            missing.push(row);
        }
    }
    let disagreements = cells
        .iter()
        .filter(|c| oracle_label(grid_index(c.alpha), grid_index(c.beta)) != c.label)
        .count();
    within(30.0, elapsed)?;
    let detail = format!(
        "{} cells in {:.2} s, named points {}, {disagreements} cells disagree with the integer-arithmetic oracle",
        cells.len(),
        elapsed.as_secs_f64(),
        if missing.is_empty() { "all correct".to_string() } else { format!("wrong: {missing:?}") }
    );
    if missing.is_empty() && disagreements == 0 && cells.len() == 81 * 81 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("equilibrium closed form", criterion_1),
        ("Jacobian identities", criterion_2),
        ("focal-value consistency", criterion_3),
        ("degenerate-center conservation", criterion_4),
        ("supercritical Hopf", criterion_5),
        ("global-stability cross-check", criterion_6),
        ("Dulac certificates", criterion_7),
        ("boundary-approach curves", criterion_8),
        ("region diagram", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(d) => println!("PASS {}. {name}: {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {}. {name}: {d}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
