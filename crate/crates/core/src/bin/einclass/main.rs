//! `einclass` command-line interface.

mod table;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use einclass::geodesics::IntegralField;
use einclass::metrics::{catalog, load_metric, Interval, MetricSpec, SamplePlan, CATALOG_NAMES};
use einclass::omega::Tolerances;
use einclass::report::{classify_region, decompose_at, geodesic_run, ComponentsDump, ReportError, TensorFixture};

#[derive(Parser)]
#[command(name = "einclass", version, about = "Curvature and Einstein-equation class verdicts for 4D Lorentzian metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Built-in metrics
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Classify ∇T over a sample of points
    Classify(ClassifyArgs),
    /// Dump every computed tensor at one point
    Components(ComponentsArgs),
    /// Integrate a geodesic and report drift of a quadratic integral
    Geodesic(GeodesicArgs),
    /// Split a tensor from a fixture file into its three components
    Decompose(DecomposeArgs),
}

#[derive(Subcommand)]
enum CatalogAction {
    /// List catalog metrics with their parameters and domains
    List {
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Table,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Integral {
    G,
    Ric,
}

#[derive(Args, Default)]
struct MetricArgs {
    /// Catalog metric name
    #[arg(long)]
    metric: Option<String>,
    /// Metric definition file
    #[arg(long, conflicts_with = "metric")]
    metric_file: Option<PathBuf>,
    /// Schwarzschild mass
    #[arg(long)]
    m: Option<String>,
    /// de Sitter Hubble rate
    #[arg(long = "H")]
    hubble: Option<String>,
    /// FLRW scale factor a(t), or the Einstein static radius
    #[arg(long)]
    a: Option<String>,
    /// Conformal factor exponent
    #[arg(long)]
    phi: Option<String>,
    /// Warped product g00(x0)
    #[arg(long)]
    g00: Option<String>,
    /// Warped product factor f(x0)
    #[arg(long)]
    f: Option<String>,
    /// Six spatial components g11,g12,g13,g22,g23,g33
    #[arg(long)]
    spatial: Option<String>,
    /// Perturbation amplitude
    #[arg(long)]
    eps: Option<String>,
    /// Perturbation seed
    #[arg(long)]
    seed: Option<String>,
}

#[derive(Args)]
struct CommonArgs {
    /// Relative tolerance for a projection to count as nonzero
    #[arg(long)]
    tol_rel: Option<f64>,
    /// Absolute floor below which ∇T counts as zero
    #[arg(long)]
    tol_floor: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML config; command-line flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    metric: MetricArgs,
    #[command(flatten)]
    common: CommonArgs,
    /// `default`, `N` points per axis, or `N0,N1,N2,N3`
    #[arg(long, conflicts_with = "points")]
    grid: Option<String>,
    /// Explicit points `t,x,y,z;t,x,y,z;...`
    #[arg(long)]
    points: Option<String>,
}

#[derive(Args)]
struct ComponentsArgs {
    #[command(flatten)]
    metric: MetricArgs,
    #[command(flatten)]
    common: CommonArgs,
    /// Event `x0,x1,x2,x3`; defaults to the centre of the domain
    #[arg(long)]
    point: Option<String>,
}

#[derive(Args)]
struct GeodesicArgs {
    #[command(flatten)]
    metric: MetricArgs,
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, allow_hyphen_values = true)]
    x0: String,
    #[arg(long, allow_hyphen_values = true)]
    v0: String,
    /// Step size
    #[arg(long, default_value_t = 1e-3)]
    h: f64,
    /// Number of steps
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, value_enum, default_value = "g")]
    integral: Integral,
}

#[derive(Args)]
struct DecomposeArgs {
    /// JSON fixture `{metric, params, point, omega: [64 numbers]}`
    #[arg(long)]
    tensor: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
}

/// Options read from `--config`.
#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    metric: Option<String>,
    metric_file: Option<PathBuf>,
    #[serde(default)]
    params: BTreeMap<String, toml::Value>,
    grid: Option<String>,
    points: Option<String>,
    point: Option<String>,
    tol_rel: Option<f64>,
    tol_floor: Option<f64>,
    format: Option<Format>,
    out: Option<PathBuf>,
}

struct CliError {
    kind: &'static str,
    message: String,
    code: u8,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError { kind: "input", message: message.into(), code: 2 }
    }
}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> Self {
        CliError { kind: e.kind(), message: e.to_string(), code: e.exit_code() as u8 }
    }
}

impl From<einclass::metrics::MetricError> for CliError {
    fn from(e: einclass::metrics::MetricError) -> Self {
        ReportError::from(e).into()
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: &'a str,
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: ErrorBody<'a>,
    exit_code: u8,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let body = ErrorReport { error: ErrorBody { kind: e.kind, message: &e.message }, exit_code: e.code };
            eprintln!("{}", serde_json::to_string(&body).expect("error report serialises"));
            ExitCode::from(e.code)
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<Config, CliError> {
    let Some(path) = path else { return Ok(Config::default()) };
    let text = fs::read_to_string(path).map_err(|e| CliError::input(format!("reading {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::input(format!("config {}: {e}", path.display())))
}

fn toml_text(v: &toml::Value) -> String {
    match v {
        toml::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn resolve_metric(args: &MetricArgs, cfg: &Config) -> Result<MetricSpec, CliError> {
    let mut params: BTreeMap<String, String> = cfg.params.iter().map(|(k, v)| (k.clone(), toml_text(v))).collect();
    let flags = [
        ("m", &args.m),
        ("H", &args.hubble),
        ("a", &args.a),
        ("phi", &args.phi),
        ("g00", &args.g00),
        ("f", &args.f),
        ("spatial", &args.spatial),
        ("eps", &args.eps),
        ("seed", &args.seed),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            params.insert(k.to_string(), v.clone());
        }
    }
    let file = args.metric_file.clone().or_else(|| if args.metric.is_some() { None } else { cfg.metric_file.clone() });
    if let Some(path) = file {
        if !params.is_empty() {
            return Err(CliError::input("metric parameters apply to catalog metrics only; edit the metric file instead"));
        }
        let text = fs::read_to_string(&path).map_err(|e| CliError::input(format!("reading {}: {e}", path.display())))?;
        return Ok(load_metric(&text)?);
    }
    let name = args
        .metric
        .clone()
        .or_else(|| cfg.metric.clone())
        .ok_or_else(|| CliError::input("no metric given; use --metric NAME or --metric-file PATH"))?;
    Ok(catalog(&name, &params)?)
}

fn tolerances(common: &CommonArgs, cfg: &Config) -> Result<Tolerances, CliError> {
    let d = Tolerances::default();
    let tol = Tolerances {
        tol_rel: common.tol_rel.or(cfg.tol_rel).unwrap_or(d.tol_rel),
        tol_floor: common.tol_floor.or(cfg.tol_floor).unwrap_or(d.tol_floor),
    };
    if !(tol.tol_rel > 0.0 && tol.tol_floor > 0.0) {
        return Err(CliError::input("tolerances must be positive"));
    }
    Ok(tol)
}

fn parse_vec4(text: &str, what: &str) -> Result<[f64; 4], CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let vals: Result<Vec<f64>, _> = parts.iter().map(|p| p.parse::<f64>()).collect();
    match vals {
        Ok(v) if v.len() == 4 => Ok([v[0], v[1], v[2], v[3]]),
        _ => Err(CliError::input(format!("{what} must be four comma-separated numbers, got `{text}`"))),
    }
}

fn sample_plan(spec: &MetricSpec, grid: Option<&str>, points: Option<&str>) -> Result<SamplePlan, CliError> {
    if let Some(p) = points {
        let pts = p.split(';').filter(|s| !s.trim().is_empty()).map(|s| parse_vec4(s, "each point")).collect::<Result<Vec<_>, _>>()?;
        if pts.is_empty() {
            return Err(CliError::input("--points is empty"));
        }
        return Ok(SamplePlan::Points(pts));
    }
    let counts = match grid.unwrap_or("default").trim() {
        "default" => [3; 4],
        g => {
            let n: Result<Vec<usize>, _> = g.split(',').map(|s| s.trim().parse::<usize>()).collect();
            match n.as_deref() {
                Ok([n]) if *n > 0 => [*n; 4],
                Ok([a, b, c, d]) if [a, b, c, d].iter().all(|&&x| x > 0) => [*a, *b, *c, *d],
                _ => return Err(CliError::input(format!("--grid must be `default`, N or N0,N1,N2,N3, got `{g}`"))),
            }
        }
    };
    Ok(SamplePlan::default_grid(spec, counts))
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::input(format!("writing {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).map_err(|e| CliError::input(format!("writing stdout: {e}")))
        }
    }
}

fn render<T: Serialize>(value: &T, format: Format, table: impl FnOnce(&T) -> String) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value).expect("reports serialise");
            s.push('\n');
            s
        }
        Format::Table => table(value),
    }
}

#[derive(Serialize)]
struct CatalogEntry {
    name: String,
    description: String,
    coords: [String; 4],
    params: BTreeMap<String, f64>,
    domain: [Interval; 4],
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Catalog { action: CatalogAction::List { format, out } } => {
            let entries = CATALOG_NAMES
                .iter()
                .map(|name| {
                    let spec = catalog(name, &BTreeMap::new())?;
                    Ok(CatalogEntry {
                        name: name.to_string(),
                        description: spec.description,
                        coords: spec.coords,
                        params: spec.params,
                        domain: spec.domain,
                    })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let text = render(&entries, format.unwrap_or(Format::Table), |e| {
                table::catalog(&e.iter().map(|c| (c.name.as_str(), c.description.as_str(), &c.coords, &c.domain)).collect::<Vec<_>>())
            });
            emit(&text, out.as_deref())
        }
        Command::Classify(args) => {
            let cfg = load_config(args.common.config.as_deref())?;
            let spec = resolve_metric(&args.metric, &cfg)?;
            let tol = tolerances(&args.common, &cfg)?;
            let (grid, points) = if args.grid.is_some() || args.points.is_some() {
                (args.grid.clone(), args.points.clone())
            } else {
                (cfg.grid.clone(), cfg.points.clone())
            };
            let plan = sample_plan(&spec, grid.as_deref(), points.as_deref())?;
            let report = classify_region(&spec, &plan, &tol)?;
            let format = args.common.format.or(cfg.format).unwrap_or(Format::Table);
            emit(&render(&report, format, table::classification), args.common.out.as_deref().or(cfg.out.as_deref()))
        }
        Command::Components(args) => {
            let cfg = load_config(args.common.config.as_deref())?;
            let spec = resolve_metric(&args.metric, &cfg)?;
            let tol = tolerances(&args.common, &cfg)?;
            let point = match args.point.as_deref().or(cfg.point.as_deref()) {
                Some(p) => parse_vec4(p, "--point")?,
                None => spec.center(),
            };
            let dump = ComponentsDump::compute(&spec, &point, &tol)?;
            let format = args.common.format.or(cfg.format).unwrap_or(Format::Table);
            emit(&render(&dump, format, table::components), args.common.out.as_deref().or(cfg.out.as_deref()))
        }
        Command::Geodesic(args) => {
            let cfg = load_config(args.common.config.as_deref())?;
            let spec = resolve_metric(&args.metric, &cfg)?;
            let x0 = parse_vec4(&args.x0, "--x0")?;
            let v0 = parse_vec4(&args.v0, "--v0")?;
            let field = match args.integral {
                Integral::G => IntegralField::G,
                Integral::Ric => IntegralField::Ric,
            };
            let report = geodesic_run(&spec, x0, v0, args.h, args.n, field)?;
            let format = args.common.format.or(cfg.format).unwrap_or(Format::Table);
            emit(&render(&report, format, table::geodesic), args.common.out.as_deref().or(cfg.out.as_deref()))
        }
        Command::Decompose(args) => {
            let cfg = load_config(args.common.config.as_deref())?;
            let tol = tolerances(&args.common, &cfg)?;
            let text = fs::read_to_string(&args.tensor).map_err(|e| CliError::input(format!("reading {}: {e}", args.tensor.display())))?;
            let fixture: TensorFixture =
                serde_json::from_str(&text).map_err(|e| CliError::input(format!("tensor fixture {}: {e}", args.tensor.display())))?;
            let spec = catalog(&fixture.metric, &fixture.params)?;
            let report = decompose_at(&spec, &fixture.point, &fixture.tensor()?, &tol)?;
            let format = args.common.format.or(cfg.format).unwrap_or(Format::Table);
            emit(&render(&report, format, table::decomposition), args.common.out.as_deref().or(cfg.out.as_deref()))
        }
    }
}
