mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use echoloc_core::counting::{counting_function, timbre, two_point_counting, Provenance};
use echoloc_core::graphs::{
    automorphism_orbits, cospectral_vertex_pairs, enumerate_trees, find_echolocation_failures, parse_edge_list,
    parse_graph6_lines, spectrum, to_graph6, vertex_counting_function, DEFAULT_CLUSTER_TOL,
    MAX_AUTOMORPHISM_VERTICES,
};
use echoloc_core::inversion::{locate, GenericOptions};
use echoloc_core::models::enumerate_blocks;
use echoloc_core::transforms::{
    detect_looping_times, estimate_scalar_curvature_with_cutoff, heat_cutoff_for, heat_trace, smoothed_wave_trace,
    DEFAULT_THRESHOLD_RATIO,
};
use echoloc_core::{io, CountingFunction, Graph, ModelGeometry, Operator, Point};

use config::Config;
use output::emit;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(echoloc_core::Error),
    Io(std::io::Error),
}

impl From<echoloc_core::Error> for CliError {
    fn from(e: echoloc_core::Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

#[derive(Parser)]
#[command(name = "echoloc", version, about = "Pointwise spectral signatures and echolocation on model geometries and graphs")]
struct Cli {
    /// `key = value` file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (falls back to ECHOLOC_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Format as ValueEnum>::from_str(s, true)
    }
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// Model spec, e.g. `square`, `rect:b=1/2`, `interval:a=2`, `disk`.
    #[arg(long)]
    model: Option<String>,
    /// Comma-separated coordinates.
    #[arg(long, allow_hyphen_values = true)]
    point: Option<String>,
    /// Spectral cutoff Λ.
    #[arg(long)]
    cutoff: Option<f64>,
}

#[derive(Args, Clone)]
struct OutArgs {
    /// Output file (written atomically); stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenspace blocks up to the cutoff.
    Spectrum {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Pointwise counting function.
    Count {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Square roots of the counting-function jumps.
    Timbre {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Pointwise heat trace at the given times.
    Heat {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "t", value_delimiter = ',', required = true, allow_hyphen_values = true)]
        times: Vec<f64>,
        /// Use `exp(-tλ²/2)`, the Brownian-motion convention.
        #[arg(long)]
        half_laplacian: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Scalar curvature from the small-time heat expansion.
    Curvature {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_delimiter = ',', default_value = "1e-2,5e-3,2.5e-3")]
        schedule: Vec<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Gaussian-smoothed wave trace and its prominent peaks.
    Wave {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        sigma: f64,
        #[arg(long, default_value_t = 0.0)]
        t_min: f64,
        #[arg(long)]
        t_max: f64,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        /// Peaks below this fraction of the largest are ignored.
        #[arg(long, default_value_t = DEFAULT_THRESHOLD_RATIO)]
        threshold: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Recover a point from a counting-function file.
    Locate {
        /// Model to search; defaults to the model recorded in the target.
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        target: PathBuf,
        /// Cutoff for CSV targets (defaults to the largest frequency).
        #[arg(long)]
        cutoff: Option<f64>,
        #[arg(long)]
        acceptance: Option<f64>,
        #[arg(long)]
        frequency_tol: Option<f64>,
        /// Grid points per coordinate for the generic search.
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two-point sum `Σ |e_j(x) + e_j(y)|²`.
    Kuznecov2 {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, allow_hyphen_values = true)]
        second_point: Option<String>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Vertex spectra, cospectral pairs and echolocation failures of graphs.
    Graph {
        /// graph6 lines or an edge list.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
        input_format: InputFormat,
        #[arg(long)]
        operator: Option<String>,
        /// Report cospectral pairs that no automorphism relates.
        #[arg(long)]
        find_failures: bool,
        /// Emit the counting function of this vertex.
        #[arg(long)]
        vertex: Option<usize>,
        /// Write all trees on this many vertices as graph6 instead.
        #[arg(long)]
        enumerate_trees: Option<usize>,
        #[arg(long)]
        cluster_tol: Option<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum InputFormat {
    Auto,
    Graph6,
    Edges,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn positive(value: f64, what: &str) -> Result<f64, CliError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(usage(format!("{what} must be positive, got {value}")))
    }
}

fn model_of(spec: &str) -> Result<ModelGeometry, CliError> {
    spec.parse().map_err(|e: echoloc_core::Error| usage(format!("--model: {e}")))
}

fn point_of(spec: &str, flag: &str) -> Result<Point, CliError> {
    spec.parse().map_err(|e: echoloc_core::Error| usage(format!("--{flag}: {e}")))
}

struct Resolved {
    model: ModelGeometry,
    point: Option<Point>,
    cutoff: Option<f64>,
}

fn resolve(args: &ModelArgs, cfg: &Config) -> Result<Resolved, CliError> {
    let model = model_of(&cfg.require(args.model.clone(), "model")?)?;
    let point = cfg.pick(args.point.clone(), "point")?.map(|p| point_of(&p, "point")).transpose()?;
    let cutoff = cfg.pick(args.cutoff, "cutoff")?.map(|c| positive(c, "cutoff")).transpose()?;
    Ok(Resolved { model, point, cutoff })
}

fn need_point(r: &Resolved) -> Result<&Point, CliError> {
    r.point.as_ref().ok_or_else(|| usage("missing --point (or `point` in the config)"))
}

fn need_cutoff(r: &Resolved) -> Result<f64, CliError> {
    r.cutoff.ok_or_else(|| usage("missing --cutoff (or `cutoff` in the config)"))
}

fn out_path(args: &OutArgs, cfg: &Config) -> Result<Option<PathBuf>, CliError> {
    cfg.pick(args.out.clone(), "out")
}

fn format_of(args: &OutArgs, cfg: &Config) -> Result<Format, CliError> {
    Ok(cfg.pick(args.format, "format")?.unwrap_or(Format::Json))
}

fn emit_counting(cf: &CountingFunction, args: &OutArgs, cfg: &Config) -> Result<(), CliError> {
    let text = match format_of(args, cfg)? {
        Format::Json => io::counting_to_json(cf)?,
        Format::Csv => io::counting_to_csv(cf)?,
    };
    emit(out_path(args, cfg)?.as_deref(), &text)
}

fn configure_threads(flag: Option<usize>, cfg: &Config) -> Result<(), CliError> {
    let from_env = match std::env::var("ECHOLOC_THREADS") {
        Ok(v) => Some(v.trim().parse::<usize>().map_err(|e| usage(format!("ECHOLOC_THREADS: {e}")))?),
        Err(_) => None,
    };
    let threads = match flag.or(from_env) {
        Some(n) => Some(n),
        None => cfg.get::<usize>("threads")?,
    };
    if let Some(n) = threads {
        if n == 0 {
            return Err(usage("thread count must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| usage(format!("cannot configure threads: {e}")))?;
    }
    Ok(())
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(CliError::Io)
}

fn read_graphs(path: &Path, format: InputFormat) -> Result<Vec<Graph>, CliError> {
    let text = read_text(path)?;
    let format = match format {
        InputFormat::Auto => match path.extension().and_then(|e| e.to_str()) {
            Some("edges" | "el" | "txt" | "edgelist") => InputFormat::Edges,
            _ => InputFormat::Graph6,
        },
        f => f,
    };
    match format {
        InputFormat::Edges => Ok(vec![parse_edge_list(&text)?]),
        _ => parse_graph6_lines(&text)
            .into_iter()
            .enumerate()
            .map(|(i, g)| g.map_err(|e| graph6_entry_error(e, i)))
            .collect(),
    }
}

fn graph6_entry_error(e: echoloc_core::Error, line: usize) -> CliError {
    eprintln!("echoloc: graph6 entry {} is malformed", line + 1);
    CliError::Domain(e)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    cfg.get::<u64>("seed")?;
    for key in ["frequency_tol", "weight_tol", "cluster_tol", "acceptance"] {
        if let Some(v) = cfg.get::<f64>(key)? {
            positive(v, key)?;
        }
    }
    configure_threads(cli.threads, &cfg)?;

    match cli.command {
        Command::Spectrum { model, out } => {
            let r = resolve(&model, &cfg)?;
            let cutoff = need_cutoff(&r)?;
            let blocks = enumerate_blocks(&r.model, cutoff)?;
            let text = match format_of(&out, &cfg)? {
                Format::Json => io::blocks_to_json(&r.model, cutoff, &blocks)?,
                Format::Csv => io::blocks_to_csv(&blocks)?,
            };
            emit(out_path(&out, &cfg)?.as_deref(), &text)
        }
        Command::Count { model, out } => {
            let r = resolve(&model, &cfg)?;
            let cf = counting_function(&r.model, need_point(&r)?, need_cutoff(&r)?)?;
            emit_counting(&cf, &out, &cfg)
        }
        Command::Timbre { model, out } => {
            let r = resolve(&model, &cfg)?;
            let cf = counting_function(&r.model, need_point(&r)?, need_cutoff(&r)?)?;
            let t = timbre(&cf);
            let text = match format_of(&out, &cfg)? {
                Format::Json => io::timbre_to_json(&cf, &t)?,
                Format::Csv => io::timbre_to_csv(&t)?,
            };
            emit(out_path(&out, &cfg)?.as_deref(), &text)
        }
        Command::Kuznecov2 { model, second_point, out } => {
            let r = resolve(&model, &cfg)?;
            let y = point_of(&cfg.require(second_point, "second_point")?, "second-point")?;
            let cf = two_point_counting(&r.model, need_point(&r)?, &y, need_cutoff(&r)?)?;
            emit_counting(&cf, &out, &cfg)
        }
        Command::Heat { model, times, half_laplacian, out } => {
            let r = resolve(&model, &cfg)?;
            for &t in &times {
                positive(t, "--t")?;
            }
            let t_min = times.iter().copied().fold(f64::INFINITY, f64::min);
            let cutoff = r.cutoff.unwrap_or_else(|| heat_cutoff_for(if half_laplacian { t_min / 2.0 } else { t_min }));
            let cf = counting_function(&r.model, need_point(&r)?, cutoff)?;
            let rows = times.iter().map(|&t| heat_trace(&cf, t, half_laplacian)).collect::<Result<Vec<_>, _>>()?;
            let text = match format_of(&out, &cfg)? {
                Format::Json => io::heat_to_json(&rows)?,
                Format::Csv => io::heat_to_csv(&rows)?,
            };
            emit(out_path(&out, &cfg)?.as_deref(), &text)
        }
        Command::Curvature { model, schedule, out } => {
            let r = resolve(&model, &cfg)?;
            let t_min = schedule.iter().copied().fold(f64::INFINITY, f64::min);
            let cutoff = r.cutoff.unwrap_or_else(|| heat_cutoff_for(t_min));
            let x = need_point(&r)?;
            let value = estimate_scalar_curvature_with_cutoff(&r.model, x, &schedule, cutoff)?;
            if format_of(&out, &cfg)? == Format::Csv {
                return Err(usage("curvature output is JSON only"));
            }
            #[derive(serde::Serialize)]
            struct Out<'a> {
                model: String,
                point: &'a [f64],
                cutoff: f64,
                schedule: &'a [f64],
                scalar_curvature: f64,
            }
            let text = io::to_json(&Out {
                model: r.model.to_string(),
                point: x.coords(),
                cutoff,
                schedule: &schedule,
                scalar_curvature: value,
            })?;
            emit(out_path(&out, &cfg)?.as_deref(), &text)
        }
        Command::Wave { model, sigma, t_min, t_max, steps, threshold, out } => {
            let r = resolve(&model, &cfg)?;
            if t_max.partial_cmp(&t_min) != Some(std::cmp::Ordering::Greater) || steps < 2 {
                return Err(usage("need t_max > t_min and at least 2 steps"));
            }
            let cf = counting_function(&r.model, need_point(&r)?, need_cutoff(&r)?)?;
            let h = (t_max - t_min) / (steps - 1) as f64;
            let grid: Vec<f64> = (0..steps).map(|i| t_min + i as f64 * h).collect();
            let samples = smoothed_wave_trace(&cf, &grid, sigma)?;
            let text = match format_of(&out, &cfg)? {
                Format::Json => io::wave_to_json(&samples, &detect_looping_times(&samples, threshold)?)?,
                Format::Csv => io::wave_to_csv(&samples)?,
            };
            emit(out_path(&out, &cfg)?.as_deref(), &text)
        }
        Command::Locate { model, target, cutoff, acceptance, frequency_tol, grid, out } => {
            let text = read_text(&target)?;
            let model_flag = cfg.pick(model, "model")?;
            let cf = if target.extension().and_then(|e| e.to_str()) == Some("csv") {
                let spec = model_flag.clone().ok_or_else(|| usage("CSV targets need --model"))?;
                let cutoff = cfg.pick(cutoff, "cutoff")?;
                io::counting_from_csv(&text, Provenance { model: spec, point: Vec::new(), second_point: None }, cutoff)?
            } else {
                io::counting_from_json(&text)?
            };
            let spec = model_flag.unwrap_or_else(|| cf.provenance().model.clone());
            let model = model_of(&spec)?;
            let mut options = GenericOptions { grid_resolution: grid, ..GenericOptions::default() };
            if let Some(a) = cfg.pick(acceptance, "acceptance")? {
                options.acceptance = positive(a, "acceptance")?;
            }
            if let Some(f) = cfg.pick(frequency_tol, "frequency_tol")? {
                options.frequency_tol = positive(f, "frequency_tol")?;
            }
            let report = locate(&model, &cf, &options)?;
            emit(cfg.pick(out, "out")?.as_deref(), &io::location_to_json(&report)?)
        }
        Command::Graph { input, input_format, operator, find_failures, vertex, enumerate_trees: trees, cluster_tol, out } => {
            let operator: Operator = cfg
                .pick(operator, "operator")?
                .map(|s| s.parse().map_err(|e: echoloc_core::Error| usage(format!("--operator: {e}"))))
                .transpose()?
                .unwrap_or(Operator::Adjacency);
            let cluster_tol = positive(cfg.pick(cluster_tol, "cluster_tol")?.unwrap_or(DEFAULT_CLUSTER_TOL), "cluster_tol")?;
            let dest = out_path(&out, &cfg)?;
            if let Some(n) = trees {
                let mut text = String::new();
                for g in enumerate_trees(n)? {
                    text.push_str(&to_graph6(&g)?);
                    text.push('\n');
                }
                return emit(dest.as_deref(), &text);
            }
            let input = input.ok_or_else(|| usage("graph needs --input or --enumerate-trees"))?;
            let graphs = read_graphs(&input, input_format)?;
            if let Some(v) = vertex {
                let mut text = String::new();
                for g in &graphs {
                    let spec = spectrum(g, operator, cluster_tol)?;
                    let cf = vertex_counting_function(&spec, v)?;
                    text.push_str(&match format_of(&out, &cfg)? {
                        Format::Json => io::counting_to_json(&cf)?,
                        Format::Csv => io::counting_to_csv(&cf)?,
                    });
                }
                return emit(dest.as_deref(), &text);
            }
            if find_failures {
                let search = find_echolocation_failures(graphs, operator);
                for (i, e) in &search.errors {
                    eprintln!("echoloc: warning: graph {} skipped: {}[{}]", i + 1, e, e.name());
                }
                return emit(dest.as_deref(), &io::failures_to_json_lines(&search.failures)?);
            }
            #[derive(serde::Serialize)]
            struct Summary {
                graph6: String,
                n: usize,
                operator: String,
                cospectral_pairs: Vec<(usize, usize)>,
                orbits: Option<Vec<Vec<usize>>>,
            }
            let mut text = String::new();
            for g in &graphs {
                let orbits = if g.n() <= MAX_AUTOMORPHISM_VERTICES { Some(automorphism_orbits(g)?) } else { None };
                text.push_str(&io::to_json(&Summary {
                    graph6: g.id(),
                    n: g.n(),
                    operator: operator.to_string(),
                    cospectral_pairs: cospectral_vertex_pairs(g, operator)?,
                    orbits,
                })?);
            }
            emit(dest.as_deref(), &text)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("echoloc: usage: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Domain(e)) => {
            eprintln!("echoloc: error[{}]: {e}", e.name());
            ExitCode::from(1)
        }
        Err(CliError::Io(e)) => {
            eprintln!("echoloc: error[io]: {e}");
            ExitCode::from(1)
        }
    }
}
