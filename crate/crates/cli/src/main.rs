//! Command-line harness: dyadic decomposition dumps, extension evaluation
//! on grids, the verification campaign, the sequence-scale demonstration
//! and the composition counterexamples.
//!
//! Exit codes: 0 on success, 1 when a verification check fails, 2 on
//! structural errors (unreadable or inconsistent inputs).

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use lipscale::exec::ExecMode;
use lipscale::extension::Extender;
use lipscale::multi_index;
use lipscale::whitney::{decompose_box, dist_to_set, nearest_anchor};
use lipscale_cli::problem::ProblemFile;
use lipscale_cli::{demos, verify};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "lipscale",
    version,
    about = "Whitney extensions on Banach scales"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Format {
    Json,
    Md,
}

#[derive(Args)]
struct CommonArgs {
    /// Problem file (JSON).
    #[arg(long)]
    problem: PathBuf,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Random-pair budget override.
    #[arg(long)]
    budget: Option<usize>,
    /// Output format.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the accepted dyadic cubes intersecting the problem's box.
    Decompose(CommonArgs),
    /// Evaluate the extension on the problem's grid.
    Extend(CommonArgs),
    /// Run the full verification campaign.
    Verify(CommonArgs),
    /// Sequence-scale impossibility demonstration.
    LpDemo {
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Lower index (p = 1/a, 0 = sup norm).
        #[arg(long, default_value_t = 0.0)]
        a: f64,
        /// Upper index (q = 1/b).
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        /// Smoothing parameter of the demonstration.
        #[arg(long, default_value_t = 2.0)]
        theta: f64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Composition counterexample quotient tables.
    Counterexamples {
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Decompose(args) => {
            let problem = load(&args)?;
            let out = decompose_records(&problem)?;
            emit(&args.out, &render(&out, args.format)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Extend(args) => {
            let problem = load(&args)?;
            let out = extend_records(&problem)?;
            emit(&args.out, &render(&out, args.format)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify(args) => {
            let problem = load(&args)?;
            let source = args.problem.display().to_string();
            let report = verify::run_verify(&problem, &source, ExecMode::default())?;
            let text = match args.format {
                Format::Json => report.to_json(),
                Format::Md => report.to_markdown(),
            };
            emit(&args.out, &text)?;
            Ok(if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::LpDemo {
            out,
            a,
            b,
            theta,
            format,
        } => {
            let report = demos::lp_demo(a, b, theta, ExecMode::default())?;
            emit(&out, &render(&report, format)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Counterexamples { out, format } => {
            let table = demos::counterexample_table();
            emit(&out, &render(&table, format)?)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn load(args: &CommonArgs) -> anyhow::Result<ProblemFile> {
    let mut problem = ProblemFile::load(&args.problem)?;
    if let Some(seed) = args.seed {
        problem.seed = seed;
    }
    if let Some(budget) = args.budget {
        problem.budget = budget;
    }
    Ok(problem)
}

fn emit(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn render<T: Serialize>(value: &T, format: Format) -> anyhow::Result<String> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(value)?,
        Format::Md => {
            // generic key-value rendering for the tabular outputs
            let json = serde_json::to_value(value)?;
            let mut out = String::new();
            markdown_value(&json, 0, &mut out);
            out
        }
    })
}

fn markdown_value(value: &serde_json::Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match value {
        serde_json::Value::Array(items) => {
            for item in items {
                out.push_str(&pad);
                out.push_str("-\n");
                markdown_value(item, depth + 1, out);
            }
        }
        serde_json::Value::Object(map) => {
            for (key, item) in map {
                match item {
                    serde_json::Value::Array(_) | serde_json::Value::Object(_) => {
                        out.push_str(&format!("{pad}{key}:\n"));
                        markdown_value(item, depth + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}{key}: {item}\n")),
                }
            }
        }
        other => out.push_str(&format!("{pad}{other}\n")),
    }
}

#[derive(Serialize)]
struct CubeRecord {
    level: i32,
    corner: Vec<i64>,
    q: f64,
    dist: f64,
    anchor: Vec<f64>,
}

#[derive(Serialize)]
struct DecomposeOutput {
    cubes: Vec<CubeRecord>,
    truncated: bool,
}

fn decompose_records(problem: &ProblemFile) -> anyhow::Result<DecomposeOutput> {
    let f = lipscale::whitney::ClosedSet::new(problem.points.clone())?;
    let (cubes, truncated) = decompose_box(&f, &problem.box_lo(), &problem.box_hi())?;
    let records = cubes
        .into_iter()
        .map(|cube| {
            let dist = cube.dist_to_set(&f);
            let anchor = nearest_anchor(&cube, &f);
            CubeRecord {
                level: cube.level,
                corner: cube.corner.clone(),
                q: cube.diam(),
                dist,
                anchor,
            }
        })
        .collect();
    Ok(DecomposeOutput {
        cubes: records,
        truncated,
    })
}

#[derive(Serialize)]
struct ExtendRecord {
    x: Vec<f64>,
    j: Vec<usize>,
    element: lipscale::Element,
    /// Norms at sigma_|j| and sigma_rho.
    norms: [f64; 2],
}

#[derive(Serialize)]
struct ExtendOutput {
    values: Vec<ExtendRecord>,
    skipped: usize,
}

fn extend_records(problem: &ProblemFile) -> anyhow::Result<ExtendOutput> {
    let f = problem.collection()?;
    let ext = Extender::new(&f)?;
    let params = *f.params();
    let table = f.order_table();
    let lo = problem.box_lo();
    let hi = problem.box_hi();
    let n = f.dim();
    let per_axis = problem.grid.per_axis.max(1);
    let mut values = Vec::new();
    let mut skipped = 0usize;
    let mut idx = vec![0usize; n];
    loop {
        let x: Vec<f64> = (0..n)
            .map(|m| lo[m] + (hi[m] - lo[m]) * idx[m] as f64 / per_axis as f64)
            .collect();
        let admissible = f.set().position(&x).is_some()
            || dist_to_set(&x, f.set()) > lipscale::whitney::MIN_DIST;
        if admissible {
            for j in table.indices() {
                match ext.eval(&x, j) {
                    Ok(element) => {
                        let s_j = params.sigma_m(multi_index::total(j));
                        let norms = [
                            f.scale().norm(s_j, &element)?,
                            f.scale().norm(params.sigma_rho(), &element)?,
                        ];
                        values.push(ExtendRecord {
                            x: x.clone(),
                            j: j.clone(),
                            element,
                            norms,
                        });
                    }
                    Err(_) => skipped += 1,
                }
            }
        } else {
            skipped += 1;
        }
        let mut axis = 0;
        while axis < n {
            idx[axis] += 1;
            if idx[axis] <= per_axis {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
        if axis == n {
            break;
        }
    }
    Ok(ExtendOutput { values, skipped })
}
