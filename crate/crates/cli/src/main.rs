use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use adaptopo::pipeline::{
    run_distance, run_infer, run_render, run_sample_check, run_validate, Domain, Instance, Relation, RunConfig,
};
use adaptopo::{Error, LandmarkSet, Point};
use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

/// Environment variable holding the worker thread count.
const THREADS_VAR: &str = "ADAPTOPO_THREADS";

/// Exit code when `validate` finds violations.
const EXIT_VIOLATIONS: u8 = 5;

#[derive(Parser)]
#[command(name = "adaptopo", version, about = "Adaptive-metric offsets, nerves and homology inference")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Betti numbers of both nerves and the image rank between them
    Infer(Common),
    /// Empirical check of one containment relation
    Validate {
        /// x-to-xhat, a-to-b, l-to-lhat, big-interleaving, smoothing,
        /// bigger-interleaving or distance-pts
        relation: String,
        /// compose both maps with r/2; violations are then expected
        #[arg(long)]
        negative_control: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Adaptive distance between two points
    Distance {
        /// comma-separated coordinates
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[command(flatten)]
        common: Common,
    },
    /// Adaptive sample check of xhat against x
    SampleCheck(Common),
    /// SVG of both ball unions and nerves
    Render(Common),
}

/// Flags mirror the fields of the JSON configuration and override it.
#[derive(Args)]
struct Common {
    /// JSON configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    xhat: Option<PathBuf>,
    #[arg(long)]
    x: Option<PathBuf>,
    #[arg(long)]
    lhat: Option<PathBuf>,
    #[arg(long)]
    l: Option<PathBuf>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    asserted_wfs: Option<f64>,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    stencil_radius: Option<usize>,
    #[arg(long)]
    probe_resolution: Option<usize>,
    #[arg(long)]
    slack: Option<f64>,
    /// comma-separated validation scales
    #[arg(long, value_delimiter = ',')]
    scales: Option<Vec<f64>>,
    #[arg(long)]
    scale_count: Option<usize>,
    /// comma-separated lower corner, then upper corner
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    domain: Option<Vec<f64>>,
    #[arg(long)]
    max_dim: Option<usize>,
    #[arg(long)]
    pairs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// output directory; reports go to stdout when absent
    #[arg(long)]
    output: Option<PathBuf>,
}

macro_rules! overlay {
    ($cfg:ident, $flags:ident; $($f:ident),*) => {
        $(if let Some(v) = $flags.$f.clone() { $cfg.$f = v; })*
    };
}

macro_rules! overlay_opt {
    ($cfg:ident, $flags:ident; $($f:ident),*) => {
        $(if $flags.$f.is_some() { $cfg.$f = $flags.$f.clone(); })*
    };
}

impl Common {
    fn config(&self) -> anyhow::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::from_json_file(p)?,
            None => RunConfig::default(),
        };
        overlay!(cfg, self; epsilon, delta, alpha, beta, eta, h, probe_resolution, scale_count, pairs, seed);
        overlay_opt!(cfg, self; xhat, x, lhat, l, asserted_wfs, rel_tol, stencil_radius, slack, scales, max_dim, output);
        if let Some(d) = &self.domain {
            if d.len() % 2 != 0 || d.is_empty() {
                bail!(Error::InvalidInput("domain needs lower and upper corners of equal length".into()));
            }
            let (lower, upper) = d.split_at(d.len() / 2);
            cfg.domain = Some(Domain {
                lower: lower.to_vec(),
                upper: upper.to_vec(),
            });
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_point(s: &str) -> anyhow::Result<Point> {
    let coords = s
        .split(',')
        .map(|c| c.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .with_context(|| format!("bad point {s:?}"))?;
    Ok(Point::new(coords)?)
}

fn emit(output: &Option<PathBuf>, name: &str, contents: &str) -> anyhow::Result<()> {
    match output {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let path = dir.join(name);
            fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        }
        None => println!("{contents}"),
    }
    Ok(())
}

fn write_svg(output: &Option<PathBuf>, svg: &str) -> anyhow::Result<()> {
    if let Some(dir) = output {
        emit(&Some(dir.clone()), "cover.svg", svg)?;
    }
    Ok(())
}

fn landmarks_for_distance(cfg: &RunConfig) -> anyhow::Result<LandmarkSet> {
    let path = cfg.l.as_ref().or(cfg.lhat.as_ref()).ok_or_else(|| {
        Error::MissingInput("distance needs a landmark file (lhat or l)".into())
    })?;
    if !Path::new(path).exists() {
        bail!(Error::MissingInput(format!("landmark file {} not found", path.display())));
    }
    Ok(adaptopo::io::read_landmarks_file(path)?)
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Infer(c) => {
            let cfg = c.config()?;
            let inst = Instance::load(&cfg)?;
            let out = run_infer(&cfg, &inst)?;
            emit(&cfg.output, "report.json", &serde_json::to_string_pretty(&out.report)?)?;
            if let Some(svg) = &out.svg {
                write_svg(&cfg.output, svg)?;
            }
            Ok(0)
        }
        Command::Validate {
            relation,
            negative_control,
            common,
        } => {
            let relation: Relation = relation.parse()?;
            let cfg = common.config()?;
            let inst = Instance::load(&cfg)?;
            let report = run_validate(&cfg, &inst, relation, negative_control)?;
            emit(&cfg.output, "validation.json", &serde_json::to_string_pretty(&report)?)?;
            Ok(if report.violations == 0 { 0 } else { EXIT_VIOLATIONS })
        }
        Command::Distance { a, b, common } => {
            let cfg = common.config()?;
            let l = landmarks_for_distance(&cfg)?;
            let report = run_distance(&cfg, &l, &parse_point(&a)?, &parse_point(&b)?)?;
            emit(&cfg.output, "distance.json", &serde_json::to_string_pretty(&report)?)?;
            Ok(0)
        }
        Command::SampleCheck(c) => {
            let cfg = c.config()?;
            let inst = Instance::load(&cfg)?;
            let report = run_sample_check(&cfg, &inst)?;
            emit(&cfg.output, "sample-check.json", &serde_json::to_string_pretty(&report)?)?;
            Ok(if report.report.all_hold() { 0 } else { EXIT_VIOLATIONS })
        }
        Command::Render(c) => {
            let cfg = c.config()?;
            let inst = Instance::load(&cfg)?;
            let svg = run_render(&cfg, &inst)?;
            emit(&cfg.output, "cover.svg", &svg)?;
            Ok(0)
        }
    }
}

/// Kind tag, exit code and extra fields for a library error.
fn classify(e: &Error) -> (&'static str, u8, serde_json::Value) {
    match e {
        Error::MissingInput(_) => ("missing-input", 2, json!({})),
        Error::Precondition { threshold, .. } => ("precondition", 3, json!({ "threshold": threshold })),
        Error::Disconnected { .. } => ("unreachable", 4, json!({})),
        Error::Assumption(_) => ("assumption", 1, json!({})),
        Error::InsideExclusion { .. } => ("inside-exclusion", 1, json!({})),
        Error::ParameterOutOfRange { name, .. } => ("parameter-out-of-range", 1, json!({ "parameter": name })),
        Error::Indeterminate { .. } => ("indeterminate", 1, json!({})),
        Error::Io(_) | Error::Csv(_) | Error::Json(_) | Error::InvalidInput(_) | Error::DimensionMismatch { .. } => {
            ("invalid-input", 1, json!({}))
        }
        _ => ("error", 1, json!({})),
    }
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize = v
            .parse()
            .with_context(|| format!("{THREADS_VAR} must be a positive integer, got {v:?}"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|_| run(cli)) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            let (kind, code, mut extra) = match err.downcast_ref::<Error>() {
                Some(e) => classify(e),
                None => ("error", 1, json!({})),
            };
            extra["error"] = json!(kind);
            extra["message"] = json!(format!("{err:#}"));
            eprintln!("{extra}");
            ExitCode::from(code)
        }
    }
}
