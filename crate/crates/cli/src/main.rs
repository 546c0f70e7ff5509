use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use glv_core::certificates::{
    boundary_curve, dulac_generic, dulac_triangle, first_integral, invariant_set, lyapunov_derivative_sign,
    matching_lemma, Certificate, GridSpec, Lemma,
};
use glv_core::classify::{
    classify_all_k, classify_glv, classify_system, region_diagram, write_diagram_csv, ClassifyOptions, DiagramBox,
};
use glv_core::focal::hopf_verdict;
use glv_core::portrait::{build_portrait, diagram_svg, portrait_svg, preset, write_portrait_csv, PanelSpec, PRESETS};
use glv_core::simulate::{integrate, SimConfig, Terminal};
use glv_core::{jacobian_reduced, parse_network, solve_equilibrium, Execution, GlvError};
use serde::Serialize;

mod input;

use input::{read_to_string, Input, SystemArgs};

#[derive(Debug, Parser)]
#[command(name = "glv", version, about = "Planar generalized Lotka-Volterra systems: equilibria, stability, certificates, simulation")]
struct Cli {
    /// Run sweeps on one thread.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a network file and print the lowered system as JSON.
    Parse { file: PathBuf },
    /// Stability verdict as JSON.
    Classify {
        #[command(flatten)]
        system: SystemArgs,
        /// Classify for all rate constants (exponents only).
        #[arg(long)]
        all_k: bool,
        /// With --all-k, restrict to k2 = n k3.
        #[arg(long, requires = "all_k")]
        n: Option<f64>,
        /// Skip grid-verified certificates.
        #[arg(long)]
        no_certificates: bool,
        /// Random starts integrated when the global verdict is undetermined.
        #[arg(long, default_value_t = 0)]
        evidence: usize,
    },
    /// Positive equilibrium as JSON.
    Equilibrium {
        #[command(flatten)]
        system: SystemArgs,
    },
    /// Jacobian at the equilibrium as JSON.
    Jacobian {
        #[command(flatten)]
        system: SystemArgs,
    },
    /// First focal value when the trace vanishes.
    Focal {
        #[command(flatten)]
        system: SystemArgs,
    },
    /// Build and check a certificate; prints JSON.
    Certify {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, value_enum)]
        kind: CertKind,
        /// Invariant-set pattern (default: first that applies).
        #[arg(long)]
        lemma: Option<String>,
        /// Dulac exponents `p,q` (default a1/2, b3/2).
        #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
        pq: Option<Vec<f64>>,
        /// Grid points per axis.
        #[arg(long, default_value_t = 201)]
        grid_points: usize,
        /// Grid half-width in log coordinates.
        #[arg(long)]
        half_width: Option<f64>,
    },
    /// Integrate one trajectory; CSV plus a JSON summary.
    Simulate {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, allow_hyphen_values = true)]
        x0: f64,
        #[arg(long, allow_hyphen_values = true)]
        y0: f64,
        #[arg(long, default_value_t = 1000.0)]
        tmax: f64,
        #[arg(long, default_value_t = 1e-9)]
        rtol: f64,
        /// Trajectory CSV; the summary goes next to it with a .json extension.
        /// Without it, CSV goes to stdout and the summary to stderr.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Nullclines and a trajectory fan as CSV and SVG.
    Portrait {
        #[command(flatten)]
        system: SystemArgs,
        /// Named figure preset (fig2..fig9).
        #[arg(long, conflicts_with_all = ["file", "exponents", "alpha"])]
        preset: Option<String>,
        #[arg(long, default_value_t = 30.0)]
        tmax: f64,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Labelled (alpha, beta) grid as CSV and SVG heat map.
    Diagram {
        /// `alpha_lo,alpha_hi,beta_lo,beta_hi`.
        #[arg(long = "box", value_delimiter = ',', num_args = 1, allow_hyphen_values = true, default_value = "-1,3,-1,3")]
        bounds: Vec<String>,
        #[arg(long, default_value = "0.05")]
        step: String,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CertKind {
    Dulac,
    Integral,
    InvariantSet,
    BoundaryCurve,
}

enum Failure {
    Glv(GlvError),
    Io(String),
    /// Downstream reader went away; not an error for a pipeline.
    Closed,
}

impl From<GlvError> for Failure {
    fn from(e: GlvError) -> Self {
        Failure::Glv(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        if e.kind() == io::ErrorKind::BrokenPipe {
            return Failure::Closed;
        }
        Failure::Io(e.to_string())
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Closed => 0,
            Failure::Io(_) => 1,
            Failure::Glv(e) => match e {
                GlvError::InvalidParameter(_) | GlvError::Domain { .. } | GlvError::Parse { .. } => 1,
                GlvError::Precondition(_) | GlvError::ZipCase(_) => 2,
                GlvError::SearchFailed(_) | GlvError::Numerical(_) => 3,
            },
        }
    }
}

fn print_json<T: Serialize>(v: &T) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v).map_err(io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(|e| Failure::Io(format!("cannot create {}: {e}", path.display())))
}

fn parse_lemma(s: &Option<String>) -> Result<Option<Lemma>, GlvError> {
    s.as_deref()
        .map(|t| Lemma::parse(t).ok_or_else(|| GlvError::InvalidParameter(format!("unknown lemma {t:?}"))))
        .transpose()
}

fn certify(
    input: &Input,
    kind: CertKind,
    lemma: Option<Lemma>,
    pq: Option<Vec<f64>>,
    grid_points: usize,
    half_width: Option<f64>,
    exec: Execution,
) -> Result<Certificate, GlvError> {
    let sys = input.reduced();
    let eq = solve_equilibrium(&sys).require_unique()?;
    let mut grid = GridSpec::centered((eq.0.ln(), eq.1.ln()));
    grid.points_per_axis = grid_points;
    if let Some(h) = half_width {
        grid.half_width = h;
    }
    Ok(match kind {
        CertKind::Dulac => {
            let alpha_beta = match input {
                Input::Full(g) => {
                    let e = g.exponents();
                    (g.rates == glv_core::Rates::UNIT && e[1] == 0.0 && e[2] == 1.0 && e[4] == 0.0 && e[5] == 1.0 && e[0] > 1.0)
                        .then_some((e[0], e[3]))
                }
                Input::Reduced(_) => None,
            };
            match (alpha_beta, pq) {
                (Some((a, b)), None) => Certificate::Dulac(dulac_triangle(a, b, &grid, exec)?),
                (_, Some(v)) => {
                    let [p, q]: [f64; 2] = v
                        .as_slice()
                        .try_into()
                        .map_err(|_| GlvError::InvalidParameter("--pq needs two values".into()))?;
                    Certificate::Dulac(dulac_generic(&sys, p, q, &grid, exec)?)
                }
                (None, None) => Certificate::Dulac(dulac_generic(&sys, sys.a1 / 2.0, sys.b3 / 2.0, &grid, exec)?),
            }
        }
        CertKind::Integral => {
            let v = first_integral(&sys, eq)?;
            if sys.a1 == 0.0 && sys.b3 == 0.0 {
                Certificate::FirstIntegral(v)
            } else {
                Certificate::Lyapunov(lyapunov_derivative_sign(&sys, &v, &grid, exec)?)
            }
        }
        CertKind::InvariantSet => {
            let lemma = match lemma {
                Some(l) => l,
                None => matching_lemma(&sys.matrix())
                    .ok_or_else(|| GlvError::Precondition("no invariant-set pattern applies".into()))?,
            };
            Certificate::InvariantSet(invariant_set(&sys, lemma)?)
        }
        CertKind::BoundaryCurve => Certificate::BoundaryCurve(boundary_curve(&sys, eq)?),
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    match cli.command {
        Command::Parse { file } => {
            let net = parse_network(&read_to_string(&file)?)?;
            print_json(&net.lower())
        }
        Command::Classify { system, all_k, n, no_certificates, evidence } => {
            let opts = ClassifyOptions { certificates: !no_certificates, evidence_starts: evidence, exec };
            let v = if all_k {
                classify_all_k(&system.resolve()?.reduced().matrix(), n)?
            } else {
                match system.resolve()? {
                    Input::Full(g) => classify_glv(&g, &opts)?,
                    Input::Reduced(r) => classify_system(&r, &opts)?,
                }
            };
            print_json(&v)
        }
        Command::Equilibrium { system } => print_json(&solve_equilibrium(&system.resolve()?.reduced())),
        Command::Jacobian { system } => {
            let sys = system.resolve()?.reduced();
            let eq = solve_equilibrium(&sys).require_unique()?;
            print_json(&jacobian_reduced(&sys, eq)?)
        }
        Command::Focal { system } => print_json(&hopf_verdict(&system.resolve()?.reduced())?),
        Command::Certify { system, kind, lemma, pq, grid_points, half_width } => {
            let lemma = parse_lemma(&lemma)?;
            print_json(&certify(&system.resolve()?, kind, lemma, pq, grid_points, half_width, exec)?)
        }
        Command::Simulate { system, x0, y0, tmax, rtol, out } => {
            let cfg = SimConfig { rel_tol: rtol, ..SimConfig::with_t_max(tmax) };
            let traj = match system.resolve()? {
                Input::Full(g) => integrate(&g, x0, y0, &cfg)?,
                Input::Reduced(r) => integrate(&r, x0, y0, &cfg)?,
            };
            let summary = traj.summary(&cfg);
            let summary_json = serde_json::to_string_pretty(&summary).map_err(|e| Failure::Io(e.to_string()))?;
            match out {
                Some(path) => {
                    traj.write_csv(create(&path)?)?;
                    let mut side = create(&path.with_extension("json"))?;
                    writeln!(side, "{summary_json}")?;
                    writeln!(io::stdout(), "{summary_json}")?;
                }
                None => {
                    let mut buf = Vec::new();
                    traj.write_csv(&mut buf)?;
                    io::stdout().lock().write_all(&buf)?;
                    eprintln!("{summary_json}");
                }
            }
            if let Terminal::StiffFailure { t, x, y } = traj.terminal {
                return Err(GlvError::Numerical(format!("integration stalled at t = {t}, (x, y) = ({x}, {y})")).into());
            }
            Ok(())
        }
        Command::Portrait { system, preset: name, tmax, out_dir } => {
            let (name, mut specs) = match name {
                Some(n) => (n.clone(), preset(&n)?),
                None if system.is_given() => ("portrait".to_string(), vec![PanelSpec::new("", system.resolve()?.reduced())]),
                None => {
                    return Err(GlvError::InvalidParameter(format!(
                        "give a system or --preset (one of {})",
                        PRESETS.join(", ")
                    ))
                    .into())
                }
            };
            for s in &mut specs {
                s.t_max = tmax;
            }
            let p = build_portrait(&name, &specs, exec)?;
            std::fs::create_dir_all(&out_dir)?;
            let csv_path = out_dir.join(format!("{name}.csv"));
            let svg_path = out_dir.join(format!("{name}.svg"));
            write_portrait_csv(&p, create(&csv_path)?)?;
            std::fs::write(&svg_path, portrait_svg(&p))?;
            writeln!(io::stdout(), "{}\n{}", csv_path.display(), svg_path.display())?;
            Ok(())
        }
        Command::Diagram { bounds, step, out_dir } => {
            let b: [&str; 4] = bounds
                .iter()
                .map(String::as_str)
                .collect::<Vec<_>>()
                .try_into()
                .map_err(|_| GlvError::InvalidParameter("--box needs alpha_lo,alpha_hi,beta_lo,beta_hi".into()))?;
            let grid = DiagramBox::parse((b[0], b[1]), (b[2], b[3]), &step)?;
            let cells = region_diagram(&grid, exec);
            std::fs::create_dir_all(&out_dir)?;
            let csv_path = out_dir.join("diagram.csv");
            let svg_path = out_dir.join("diagram.svg");
            write_diagram_csv(&cells, create(&csv_path)?)?;
            std::fs::write(&svg_path, diagram_svg(&cells))?;
            writeln!(io::stdout(), "{}\n{}", csv_path.display(), svg_path.display())?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Glv(e) => eprintln!("error: {e}"),
                Failure::Io(e) => eprintln!("error: {e}"),
                Failure::Closed => {}
            }
            ExitCode::from(f.code())
        }
    }
}
