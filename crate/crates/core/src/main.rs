use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use evalexpr::{ContextWithMutableVariables, HashMapContext, Value};
use serde::Serialize;

use mmreeb::complex::parse_field_csv;
use mmreeb::experiment::{
    fig4, read_complex, resolve_meshes, run_stability, ExperimentConfig, StabilityMode,
    REPORT_SCHEMA_VERSION,
};
use mmreeb::fixtures::fixture_files;
use mmreeb::measure::{parse_weighted_points, EmpiricalMeasure, KernelSpec};
use mmreeb::range::{range_integrated_reeb_with, RangeOptions};
use mmreeb::smoothing::{
    build_local_interleaving, default_floor, smooth_local, verify_commutativity, verify_function_preservation,
    CommutativityOptions, SmoothingFactor,
};
use mmreeb::{reeb_graph, Error, ReebGraph, ScalarField, SimplicialComplex};

#[derive(Parser)]
#[command(name = "mmreeb", version, about = "Reeb graphs of piecewise-linear fields, with measure-aware smoothing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reeb graph of a field on a mesh.
    Build(BuildArgs),
    /// Reeb graph after global or measure-driven local smoothing.
    Smooth(SmoothArgs),
    /// Reeb graph of the field reparametrized by a measure's CDF.
    Range(RangeArgs),
    /// Seeded stability trials.
    Experiment(ExperimentArgs),
    /// Scale sweep over the two-loop example.
    Fig4(Fig4Args),
    /// Writes the shipped fixture meshes and measure.
    GenFixtures {
        #[arg(long, default_value = "fixtures")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Mesh file: OFF, or JSON complex document.
    #[arg(long = "in")]
    input: PathBuf,
    /// `height`, `embedded` (JSON documents), `csv:<path>` or `expr:<formula in x, y, z>`.
    #[arg(long, default_value = "height")]
    field: String,
}

#[derive(Args)]
struct OutputArgs {
    /// JSON output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the graph in DOT format.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SmoothArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Constant half-width.
    #[arg(long, conflicts_with_all = ["dtm", "kernel"])]
    eps: Option<f64>,
    /// Distance to the measure with this mass parameter.
    #[arg(long, conflicts_with = "kernel", requires = "measure")]
    dtm: Option<f64>,
    /// Gaussian kernel distance to the measure with this bandwidth.
    #[arg(long, requires = "measure")]
    kernel: Option<f64>,
    /// Weighted points `x,y[,z],weight`.
    #[arg(long)]
    measure: Option<PathBuf>,
    /// Lower bound on the local half-width; defaults to 1e-6 times the diameter.
    #[arg(long)]
    rmin: Option<f64>,
    /// Multiplier applied to the factor.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Write the interleaving maps between this smoothing and the constant
    /// smoothing at the factor's supremum, with their verification.
    #[arg(long)]
    maps: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct RangeArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Weighted values `x,weight` on the line.
    #[arg(long)]
    measure: PathBuf,
    /// Split edges at the CDF knots first (meshes of dimension at most 2).
    #[arg(long)]
    subdivide: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Dtm,
    Kernel,
    Range,
    All,
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML file; its keys override the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Mass parameter of the distance to a measure.
    #[arg(long = "m")]
    mass: Option<f64>,
    /// Kernel bandwidth.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, env = "REEB_THREADS")]
    threads: Option<usize>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, value_enum, default_value = "all")]
    mode: ModeArg,
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Fig4Args {
    #[command(flatten)]
    config: ConfigArgs,
    /// Weighted points replacing the shipped sample cloud.
    #[arg(long)]
    measure: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Prefix for `<prefix>-dtm.dot` and `<prefix>-kernel.dot` at the first
    /// crossover scale.
    #[arg(long)]
    dot: Option<PathBuf>,
}

/// Failed one-sided checks, reported after the output is written.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct ChecksFailed(String);

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<Error>() {
            return match err {
                Error::Parse { .. } | Error::Io(_) | Error::Json(_) => 2,
                Error::Guard { .. } => 3,
                _ => 1,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() || cause.downcast_ref::<toml::de::Error>().is_some() {
            return 2;
        }
    }
    1
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Build(a) => {
            let (x, f) = load(&a.input)?;
            emit_graph(&reeb_graph(&x, &f)?, &a.output)
        }
        Command::Smooth(a) => smooth(a),
        Command::Range(a) => {
            let (x, f) = load(&a.input)?;
            let mu = read_measure(&a.measure)?;
            let options = RangeOptions {
                subdivide_at_knots: a.subdivide,
            };
            emit_graph(&range_integrated_reeb_with(&x, &f, &mu, options)?, &a.output)
        }
        Command::Experiment(a) => experiment(a),
        Command::Fig4(a) => run_fig4(a),
        Command::GenFixtures { out } => gen_fixtures(&out),
    }
}

fn load(args: &InputArgs) -> anyhow::Result<(SimplicialComplex, ScalarField)> {
    let (x, embedded) =
        read_complex(&args.input).with_context(|| format!("reading mesh {}", args.input.display()))?;
    let spec = args.field.as_str();
    let f = if spec == "height" {
        ScalarField::height(&x)
    } else if spec == "embedded" {
        match embedded {
            Some(f) => f,
            None => bail!(Error::Invalid("the mesh carries no field".into())),
        }
    } else if let Some(path) = spec.strip_prefix("csv:") {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading field {path}"))?;
        parse_field_csv(&text, &x).with_context(|| format!("parsing field {path}"))?
    } else if let Some(formula) = spec.strip_prefix("expr:") {
        eval_field(&x, formula)?
    } else {
        bail!(Error::Parse {
            line: 1,
            message: format!("unknown field spec `{spec}`"),
        })
    };
    Ok((x, f))
}

fn eval_field(x: &SimplicialComplex, formula: &str) -> anyhow::Result<ScalarField> {
    let as_parse_error = |e: evalexpr::EvalexprError| Error::Parse {
        line: 1,
        message: format!("field expression: {e}"),
    };
    let tree = evalexpr::build_operator_tree(formula).map_err(as_parse_error)?;
    let mut ctx = HashMapContext::new();
    let mut values = Vec::with_capacity(x.num_vertices());
    for v in 0..x.num_vertices() {
        let c = x.coords(v);
        for (i, name) in ["x", "y", "z"].iter().enumerate() {
            let value = c.get(i).copied().unwrap_or(0.0);
            ctx.set_value((*name).into(), Value::Float(value)).map_err(as_parse_error)?;
        }
        values.push(tree.eval_number_with_context(&ctx).map_err(as_parse_error)?);
    }
    Ok(ScalarField::on(x, values)?)
}

fn read_measure(path: &Path) -> anyhow::Result<EmpiricalMeasure> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading measure {}", path.display()))?;
    parse_weighted_points(&text).with_context(|| format!("parsing measure {}", path.display()))
}

fn write_or_print(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            use std::io::Write as _;
            match writeln!(std::io::stdout().lock(), "{text}") {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                r => r.context("writing to stdout"),
            }
        }
    }
}

fn emit_graph(g: &ReebGraph, out: &OutputArgs) -> anyhow::Result<()> {
    if let Some(dot) = &out.dot {
        std::fs::write(dot, g.to_dot()).with_context(|| format!("writing {}", dot.display()))?;
    }
    write_or_print(out.output_path(), &g.to_json())
}

impl OutputArgs {
    fn output_path(&self) -> Option<&Path> {
        self.out.as_deref()
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

fn smooth(a: SmoothArgs) -> anyhow::Result<()> {
    let (x, f) = load(&a.input)?;
    let floor = a.rmin.unwrap_or_else(|| default_floor(&x));
    let factor = if let Some(eps) = a.eps {
        SmoothingFactor::constant(&x, eps)?
    } else {
        let path = a.measure.as_deref().context("a measure is required for --dtm and --kernel")?;
        let mu = read_measure(path)?;
        if let Some(m) = a.dtm {
            SmoothingFactor::dtm(&x, &mu, m, floor)?
        } else if let Some(sigma) = a.kernel {
            SmoothingFactor::kernel(&x, &mu, &KernelSpec::gaussian(sigma)?, floor)?
        } else {
            bail!(Error::Invalid("choose one of --eps, --dtm or --kernel".into()));
        }
    };
    let factor = factor.scaled(a.scale)?;
    if let Some(path) = &a.maps {
        let r2 = SmoothingFactor::constant(&x, factor.sup())?;
        let pair = build_local_interleaving(&x, &f, &factor, &r2)?;
        #[derive(Serialize)]
        struct MapReport<'a> {
            schema_version: u32,
            pair: &'a mmreeb::smoothing::InterleavingMapPair,
            preservation: mmreeb::smoothing::PreservationReport,
            commutativity: mmreeb::smoothing::CommutativityReport,
        }
        let report = MapReport {
            schema_version: REPORT_SCHEMA_VERSION,
            preservation: verify_function_preservation(&pair, 1e-12),
            commutativity: verify_commutativity(&pair, CommutativityOptions::default()),
            pair: &pair,
        };
        std::fs::write(path, to_json(&report)).with_context(|| format!("writing {}", path.display()))?;
    }
    emit_graph(&smooth_local(&x, &f, &factor)?, &a.output)
}

/// Defaults, then flags, then the config file on top.
fn build_config(args: &ConfigArgs) -> anyhow::Result<ExperimentConfig> {
    let mut config = ExperimentConfig::default();
    if let Some(v) = args.seed {
        config.seed = v;
    }
    if let Some(v) = args.trials {
        config.trials = v;
    }
    if let Some(v) = args.mass {
        config.mass = v;
    }
    if let Some(v) = args.sigma {
        config.bandwidth = v;
    }
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let file: toml::Table = toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let mut merged = toml::Table::try_from(&config).expect("config serializes to a table");
        merged.extend(file);
        config = merged
            .try_into()
            .with_context(|| format!("parsing config {}", path.display()))?;
    }
    // threads are not serialized, so they survive the merge only from the file
    if config.threads.is_none() {
        config.threads = args.threads;
    }
    config.validate()?;
    Ok(config)
}

fn experiment(a: ExperimentArgs) -> anyhow::Result<()> {
    let config = build_config(&a.config)?;
    let meshes = resolve_meshes(&config)?;
    let modes: &[StabilityMode] = match a.mode {
        ModeArg::Dtm => &[StabilityMode::Dtm],
        ModeArg::Kernel => &[StabilityMode::Kernel],
        ModeArg::Range => &[StabilityMode::Range],
        ModeArg::All => &[StabilityMode::Dtm, StabilityMode::Kernel, StabilityMode::Range],
    };
    let reports = modes
        .iter()
        .map(|&m| run_stability(&meshes, m, &config))
        .collect::<mmreeb::Result<Vec<_>>>()?;
    #[derive(Serialize)]
    struct Combined<'a> {
        schema_version: u32,
        passed: bool,
        reports: &'a [mmreeb::experiment::StabilityReport],
    }
    let passed = reports.iter().all(|r| r.passed);
    write_or_print(
        a.out.as_deref(),
        &to_json(&Combined {
            schema_version: REPORT_SCHEMA_VERSION,
            passed,
            reports: &reports,
        }),
    )?;
    for r in &reports {
        eprintln!("{:?}: {} trials, {} violations", r.mode, r.trials.len(), r.violations);
    }
    if !passed {
        bail!(ChecksFailed("stability violations found".into()));
    }
    Ok(())
}

fn run_fig4(a: Fig4Args) -> anyhow::Result<()> {
    let config = build_config(&a.config)?;
    let mu = a.measure.as_deref().map(read_measure).transpose()?;
    let (report, graphs) = fig4(&config, mu.as_ref())?;
    write_or_print(a.out.as_deref(), &to_json(&report))?;
    if let (Some(prefix), Some(g)) = (&a.dot, &graphs) {
        for (name, graph) in [("dtm", &g.dtm), ("kernel", &g.kernel)] {
            let path = PathBuf::from(format!("{}-{name}.dot", prefix.display()));
            std::fs::write(&path, graph.to_dot()).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    if !report.passed {
        bail!(ChecksFailed("no crossover scale found".into()));
    }
    Ok(())
}

fn gen_fixtures(dir: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let files = fixture_files()?;
    for (name, text) in files {
        let path = dir.join(name);
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}
