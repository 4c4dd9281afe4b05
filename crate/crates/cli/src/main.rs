use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gcpack::flow::{solve, write_trajectory_csv, FlowConfig, FlowStatus, Stepper};
use gcpack::io::{self, SettingsDoc, SolveReport};
use gcpack::packing::PackingState;
use gcpack::realize::{realize, render_face_svg, SvgOptions, CLASS_TOLERANCE};
use gcpack::surface::{check_admissible, Admissibility};
use gcpack::tangency::solve_face;
use gcpack::Error;
use serde::Serialize;

const EXIT_INPUT: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_NO_CONVERGENCE: u8 = 3;

/// Generalized hyperbolic circle packings with prescribed total geodesic curvature.
#[derive(Parser, Debug)]
#[command(name = "gcpack", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a triangulation and, given targets, test feasibility.
    Check {
        #[arg(long)]
        tri: PathBuf,
        #[arg(long)]
        targets: Option<PathBuf>,
    },
    /// Run the flow and write a JSON report.
    Solve(SolveArgs),
    /// Solve a single face with curvatures A B C.
    Face {
        #[arg(long, num_args = 3, value_names = ["A", "B", "C"], allow_negative_numbers = true)]
        k: Vec<f64>,
        /// Also write an SVG picture of the face.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw one face in the Poincaré disk as SVG.
    Render {
        #[arg(long, num_args = 3, value_names = ["A", "B", "C"], allow_negative_numbers = true)]
        k: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 512)]
        size: u32,
        #[arg(long)]
        no_tangency: bool,
    },
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    tri: PathBuf,
    #[arg(long)]
    targets: PathBuf,
    /// Report destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV file receiving every accepted flow step.
    #[arg(long)]
    trajectory: Option<PathBuf>,
    /// JSON settings file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    class_tol: Option<f64>,
    #[arg(long, value_enum)]
    stepper: Option<StepperArg>,
    #[arg(long)]
    no_newton: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StepperArg {
    Adaptive,
    Rk4,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let message = match &e {
            Error::InvalidTriangulation(defects) => {
                let mut s = format!("invalid triangulation, {} defect(s):", defects.len());
                for d in defects {
                    s.push_str(&format!("\n  {d}"));
                }
                s
            }
            other => other.to_string(),
        };
        let code = match e {
            Error::Stiffness { .. } => EXIT_NO_CONVERGENCE,
            _ => EXIT_INPUT,
        };
        Failure { code, message }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Error::from(e).into()
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn three(k: &[f64]) -> [f64; 3] {
    [k[0], k[1], k[2]]
}

fn check(tri: &Path, targets: Option<&Path>) -> Result<u8, Failure> {
    let text = std::fs::read_to_string(tri)?;
    let t = io::parse_triangulation_unchecked(&text, &tri.display().to_string())?;
    let defects = t.validate();
    if !defects.is_empty() {
        return Err(Error::InvalidTriangulation(defects).into());
    }
    println!(
        "triangulation: {} vertices, {} edges, {} faces, euler characteristic {}",
        t.num_vertices(),
        t.edges().len(),
        t.num_faces(),
        t.euler_characteristic()
    );
    let Some(path) = targets else { return Ok(0) };
    let l_hat = io::read_targets(path)?;
    if l_hat.len() != t.num_vertices() {
        return Err(Error::Domain(format!(
            "{} targets for {} vertices",
            l_hat.len(),
            t.num_vertices()
        ))
        .into());
    }
    match check_admissible(&t, &l_hat)? {
        Admissibility::Admissible { margin, tightest } => {
            println!("admissible: smallest margin {margin:.6e} at {tightest:?}");
            Ok(0)
        }
        Admissibility::Violated { witness, excess } => {
            println!("infeasible: witness {witness:?} exceeds its bound by {excess:.6e}");
            Ok(EXIT_INFEASIBLE)
        }
    }
}

fn run_solve(a: &SolveArgs) -> Result<u8, Failure> {
    let tri = io::read_triangulation(&a.tri)?;
    let l_hat = io::read_targets(&a.targets)?;
    let settings = match &a.config {
        Some(p) => io::read_settings(p)?,
        None => SettingsDoc::default(),
    };
    let mut config = FlowConfig::default();
    settings.apply(&mut config);
    if let Some(tol) = a.tol {
        config.residual_tol = tol;
    }
    if let Some(s) = a.stepper {
        config.stepper = match s {
            StepperArg::Adaptive => Stepper::Adaptive,
            StepperArg::Rk4 => Stepper::Rk4,
        };
    }
    if a.no_newton {
        config.newton = false;
    }
    let class_tol = a
        .class_tol
        .or(settings.class_tol)
        .unwrap_or(CLASS_TOLERANCE);
    if !(class_tol >= 0.0) {
        return Err(Error::Domain(format!(
            "class tolerance must be non-negative, got {class_tol}"
        ))
        .into());
    }
    let initial = settings.initial_k_log.map(PackingState::new).transpose()?;
    let outcome = solve(&tri, &l_hat, initial.as_ref(), &config)?;
    if let Some(p) = &a.trajectory {
        let mut w = BufWriter::new(File::create(p)?);
        write_trajectory_csv(&outcome.trace, tri.num_vertices(), &mut w)?;
        w.flush()?;
    }
    let metric = match outcome.status {
        FlowStatus::Converged => Some(realize(&tri, &outcome.state, class_tol)?),
        _ => None,
    };
    let report = SolveReport::new(&outcome, metric.as_ref());
    write_output(a.out.as_deref(), &report.to_json())?;
    Ok(match outcome.status {
        FlowStatus::Converged => 0,
        FlowStatus::Infeasible => {
            match &outcome.witness {
                Some(w) => eprintln!("infeasible: witness {w:?}"),
                None => eprintln!("infeasible: flow diverged"),
            }
            EXIT_INFEASIBLE
        }
        FlowStatus::MaxStepsExceeded => {
            eprintln!(
                "no convergence: residual max-norm {:e}",
                outcome.residual_max
            );
            EXIT_NO_CONVERGENCE
        }
    })
}

#[derive(Serialize)]
struct CornerDoc {
    k: f64,
    kind: String,
    #[serde(rename = "L")]
    total_curvature: f64,
    arc_length: f64,
    generalized_angle: Option<f64>,
}

#[derive(Serialize)]
struct FaceDoc {
    case: String,
    corners: Vec<CornerDoc>,
    area: f64,
}

fn face(k: [f64; 3], out: Option<&Path>) -> Result<u8, Failure> {
    let f = solve_face(k)?;
    let doc = FaceDoc {
        case: format!("{:?}", f.case).to_lowercase(),
        corners: f
            .corners
            .iter()
            .map(|c| CornerDoc {
                k: c.circle.k,
                kind: format!("{:?}", c.circle.kind).to_lowercase(),
                total_curvature: c.total_curvature,
                arc_length: c.arc_length,
                generalized_angle: c.gen_angle,
            })
            .collect(),
        area: f.area,
    };
    let text = serde_json::to_string_pretty(&doc).map_err(|e| Failure {
        code: EXIT_INPUT,
        message: e.to_string(),
    })?;
    println!("{text}");
    if let Some(p) = out {
        std::fs::write(p, render_face_svg(k, &SvgOptions::default())?)?;
    }
    Ok(0)
}

fn render(k: [f64; 3], out: Option<&Path>, size: u32, no_tangency: bool) -> Result<u8, Failure> {
    let options = SvgOptions {
        size,
        show_tangency: !no_tangency,
        ..SvgOptions::default()
    };
    write_output(out, &render_face_svg(k, &options)?)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Check { tri, targets } => check(tri, targets.as_deref()),
        Command::Solve(a) => run_solve(a),
        Command::Face { k, out } => face(three(k), out.as_deref()),
        Command::Render {
            k,
            out,
            size,
            no_tangency,
        } => render(three(k), out.as_deref(), *size, *no_tangency),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
