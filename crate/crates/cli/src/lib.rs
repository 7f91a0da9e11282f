//! Command-line front end: argument types, command execution and output
//! routing.  The binary is a thin wrapper around [`run`].

pub mod figure;
pub mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use transversal_core::cone::{
    classify_boundary_direction, cone_convexity_check, count_components, enumerate_geometric_permutations,
    ConvexityOptions, ConvexityReport, OrderedQuery,
};
use transversal_core::flexprobe::{certify_flex_free, FlexProbeOptions};
use transversal_core::geom::{
    orthogonal_basis, random_disjoint_scene, vec, Direction, MinimaxOptions, Scene, SceneFile, SceneRequest,
    DEFAULT_MINIMAX_TOL,
};
use transversal_core::polyid::schwartz_zippel_suite;
use transversal_core::scenes::{transition_scene, TRANSITION_GAPS, TRANSITION_LABELS};
use transversal_core::sextic::{eval_hessian_sigma, eval_sigma, sigma_gradient, trace_curves, Chart, ChartKind, TraceSet, Triple};
use transversal_core::TransversalError;

use figure::{feasible_cells, render_figure, Panel, Style};
use report::{RunReport, Timings, Verdict};

/// Default feasibility tolerance override.
pub const ENV_TOL: &str = "TRANSVERSAL_TOL";
/// Worker thread count override.
pub const ENV_THREADS: &str = "TRANSVERSAL_THREADS";

/// Violations listed in full in a report; the rest are only counted.
const MAX_LISTED: usize = 10;

#[derive(Parser, Debug, Clone)]
#[command(name = "transversal", version, about = "Direction cones of line transversals to disjoint balls")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Scene file (JSON).
    #[arg(long, global = true)]
    pub scene: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Sampling budget; its meaning depends on the command.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Feasibility tolerance (overrides TRANSVERSAL_TOL).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Where to write the primary output instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Add wall-clock timings to the report (makes output run-dependent).
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Geodesic-midpoint convexity test of direction cones.
    CheckConvexity {
        /// Order to test, e.g. 0,2,1; default: every geometric permutation.
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<usize>>,
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
        #[arg(long, default_value_t = 200)]
        strict_pairs: usize,
    },
    /// Geometric permutations seen on a direction lattice.
    EnumeratePermutations,
    /// Connected components of the feasible directions.
    CountComponents,
    /// Hessian sign along the sextic arcs of cone boundaries.
    ProbeFlex {
        /// Lattice used to find the cones.
        #[arg(long, default_value_t = 4000)]
        lattice: usize,
        /// Minimize the margin along each arc before reporting.
        #[arg(long)]
        refine: bool,
    },
    /// Sextic, Hessian and pair conics in an affine chart.
    TraceCurves {
        /// Coordinate chart u_k = 1 (k = 0, 1, 2); default: a chart centered
        /// on a feasible direction.
        #[arg(long)]
        chart: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        half_width: f64,
        /// Hatch resolution for the feasible region.
        #[arg(long, default_value_t = 80)]
        hatch: usize,
        /// Three panels sliding two balls from disjoint through tangent to
        /// overlapping; ignores --scene.
        #[arg(long)]
        sweep: bool,
    },
    /// Exact randomized checks of the polynomial identities.
    VerifyIdentities {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Rationals are n/d with 1 <= n, d <= height.
        #[arg(long, default_value_t = 1000)]
        height: i64,
    },
    /// Is a sextic direction on the boundary of its cone?
    ClassifyBoundary {
        /// Direction x,y,z; default: directions sampled along the sextic.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        direction: Option<Vec<f64>>,
    },
    /// Seeded random scene of disjoint balls.
    GenerateScene {
        #[arg(long, default_value_t = 3)]
        balls: usize,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 0.5)]
        r_min: f64,
        #[arg(long, default_value_t = 1.5)]
        r_max: f64,
        /// Place the balls along a random line.
        #[arg(long)]
        with_transversal: bool,
        #[arg(long)]
        extent: Option<f64>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CheckConvexity { .. } => "check-convexity",
            Command::EnumeratePermutations => "enumerate-permutations",
            Command::CountComponents => "count-components",
            Command::ProbeFlex { .. } => "probe-flex",
            Command::TraceCurves { .. } => "trace-curves",
            Command::VerifyIdentities { .. } => "verify-identities",
            Command::ClassifyBoundary { .. } => "classify-boundary",
            Command::GenerateScene { .. } => "generate-scene",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(TransversalError),
    Io { path: PathBuf, source: std::io::Error },
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl std::error::Error for CliError {}

impl From<TransversalError> for CliError {
    fn from(e: TransversalError) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    /// Every error is a usage or input problem.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Settings read from the environment.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EnvOverrides {
    pub tol: Option<f64>,
    pub threads: Option<usize>,
}

impl EnvOverrides {
    pub fn from_env() -> CliResult<Self> {
        let parse = |name: &str| std::env::var(name).ok().filter(|v| !v.trim().is_empty());
        let tol = parse(ENV_TOL)
            .map(|v| v.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("{ENV_TOL}={v} is not a number"))))
            .transpose()?;
        let threads = parse(ENV_THREADS)
            .map(|v| {
                v.trim()
                    .parse::<usize>()
                    .ok()
                    .filter(|&n| n > 0)
                    .ok_or_else(|| CliError::Usage(format!("{ENV_THREADS}={v} is not a positive integer")))
            })
            .transpose()?;
        Ok(Self { tol, threads })
    }
}

/// Primary output of a command other than the report itself.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub text: String,
    pub kind: Format,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Execution {
    pub report: RunReport,
    pub artifact: Option<Artifact>,
}

struct Ctx<'a> {
    common: &'a Common,
    tol: f64,
    config: Value,
    scene: Option<Scene>,
}

impl Ctx<'_> {
    fn mm(&self) -> MinimaxOptions {
        MinimaxOptions::with_tol(self.tol)
    }

    fn scene(&self) -> CliResult<&Scene> {
        self.scene
            .as_ref()
            .ok_or_else(|| CliError::Usage("this command needs --scene <path>".into()))
    }

    fn triple(&self) -> CliResult<Triple> {
        Triple::from_scene(self.scene()?).map_err(|e| CliError::Usage(format!("needs three balls in R^3: {e}")))
    }

    fn samples(&self, default: usize) -> usize {
        self.common.samples.unwrap_or(default)
    }
}

pub fn load_scene(path: &Path) -> CliResult<Scene> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(Scene::from_json(&text)?)
}

/// Runs a parsed command and builds its report.
pub fn execute(cli: &Cli, env: &EnvOverrides) -> CliResult<Execution> {
    let start = Instant::now();
    let common = &cli.common;
    let allowed: &[Format] = match cli.command {
        Command::TraceCurves { .. } => &[Format::Json, Format::Csv, Format::Svg],
        Command::EnumeratePermutations | Command::ProbeFlex { .. } => &[Format::Json, Format::Csv],
        _ => &[Format::Json],
    };
    if !allowed.contains(&common.format) {
        return Err(CliError::Usage(format!(
            "{} does not support --format {:?}",
            cli.command.name(),
            common.format
        )));
    }
    let (tol, tol_source) = match (common.tol, env.tol) {
        (Some(t), _) => (t, "flag"),
        (None, Some(t)) => (t, "environment"),
        (None, None) => (DEFAULT_MINIMAX_TOL, "default"),
    };
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CliError::Usage(format!("tolerance must be positive, got {tol}")));
    }
    let scene = common.scene.as_deref().map(load_scene).transpose()?;
    let config = json!({
        "scene_path": common.scene.as_ref().map(|p| p.display().to_string()),
        "scene": scene.as_ref().map(SceneFile::from),
        "seed": common.seed,
        "samples": common.samples,
        "tol": tol,
        "tol_source": tol_source,
        "out": common.out.as_ref().map(|p| p.display().to_string()),
        "format": common.format,
        "threads": rayon::current_num_threads(),
        "args": cli.command,
    });
    let ctx = Ctx {
        common,
        tol,
        config,
        scene,
    };
    let mut exec = match &cli.command {
        Command::CheckConvexity {
            order,
            pairs,
            strict_pairs,
        } => check_convexity(&ctx, order.as_deref(), *pairs, *strict_pairs)?,
        Command::EnumeratePermutations => enumerate(&ctx)?,
        Command::CountComponents => components(&ctx)?,
        Command::ProbeFlex { lattice, refine } => probe_flex(&ctx, *lattice, *refine)?,
        Command::TraceCurves {
            chart,
            half_width,
            hatch,
            sweep,
        } => trace(&ctx, *chart, *half_width, *hatch, *sweep)?,
        Command::VerifyIdentities { trials, height } => identities(&ctx, *trials, *height)?,
        Command::ClassifyBoundary { direction } => classify(&ctx, direction.as_deref())?,
        Command::GenerateScene {
            balls,
            dim,
            r_min,
            r_max,
            with_transversal,
            extent,
        } => generate(&ctx, *balls, *dim, *r_min, *r_max, *with_transversal, *extent)?,
    };
    if let (Some(_), Some(out)) = (&exec.artifact, &common.out) {
        exec.report.artifacts.push(out.display().to_string());
    }
    if common.timings {
        exec.report.timings = Some(Timings {
            total_seconds: start.elapsed().as_secs_f64(),
        });
    }
    Ok(exec)
}

fn write_to(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Executes and routes output: the primary output (report, or the artifact
/// when there is one) goes to `--out` or stdout; a report displaced by an
/// artifact goes to stdout when the artifact went to a file, else to stderr.
/// Returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = EnvOverrides::from_env().and_then(|env| execute(cli, &env));
    let exec = match result {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    for w in &exec.report.warnings {
        eprintln!("warning: {w}");
    }
    let report = exec.report.to_json();
    let routed = match (&exec.artifact, &cli.common.out) {
        (None, Some(out)) => write_to(out, &report),
        (None, None) => {
            print!("{report}");
            Ok(())
        }
        (Some(a), Some(out)) => write_to(out, &a.text).map(|_| print!("{report}")),
        (Some(a), None) => {
            print!("{}", a.text);
            eprint!("{report}");
            Ok(())
        }
    };
    if let Err(e) = routed {
        eprintln!("error: {e}");
        return e.exit_code();
    }
    exec.report.exit_code
}

fn report(ctx: &Ctx, command: &str, verdict: Verdict, summary: String, result: Value) -> RunReport {
    RunReport::new(command, ctx.config.clone(), verdict, summary, result)
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("plain data")
}

fn convexity_json(order: &[usize], r: &ConvexityReport) -> Value {
    json!({
        "order": order,
        "feasible_samples": r.feasible_samples,
        "pairs_tested": r.pairs_tested,
        "violation_count": r.violations.len(),
        "violations": r.violations.iter().take(MAX_LISTED).collect::<Vec<_>>(),
        "min_midpoint_depth": finite(r.min_midpoint_depth),
        "strict_pairs_tested": r.strict_pairs_tested,
        "strictness_violations": r.strictness_violations,
        "min_boundary_midpoint_depth": finite(r.min_boundary_midpoint_depth),
        "inconclusive": r.inconclusive,
        "passed": r.passed(),
    })
}

/// JSON has no infinities.
fn finite(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn check_convexity(ctx: &Ctx, order: Option<&[usize]>, pairs: usize, strict_pairs: usize) -> CliResult<Execution> {
    let scene = ctx.scene()?;
    let lattice = ctx.samples(20_000);
    let orders: Vec<Vec<usize>> = match order {
        Some(o) => vec![o.to_vec()],
        None => enumerate_geometric_permutations(scene, lattice, ctx.common.seed, &ctx.mm())?
            .permutations
            .into_iter()
            .map(|p| p.order)
            .collect(),
    };
    let opts = ConvexityOptions {
        pairs,
        lattice,
        seed: ctx.common.seed,
        strict_pairs,
        minimax: ctx.mm(),
    };
    let mut results = Vec::new();
    let (mut violations, mut strict, mut conclusive) = (0, 0, 0);
    for o in &orders {
        let q = OrderedQuery::new(scene.clone(), o.clone())?;
        let r = cone_convexity_check(&q, &opts)?;
        violations += r.violations.len();
        strict += r.strictness_violations;
        conclusive += (!r.inconclusive) as usize;
        results.push(convexity_json(o, &r));
    }
    let verdict = if violations + strict > 0 {
        Verdict::Violation
    } else if conclusive == 0 {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    let summary = format!(
        "{} order(s) checked, {violations} midpoint violations, {strict} strictness violations",
        orders.len()
    );
    let mut rep = report(ctx, "check-convexity", verdict, summary, json!({ "cones": results }));
    if orders.is_empty() {
        rep.warnings.push("no transversal found on the lattice; nothing to check".into());
    }
    Ok(Execution {
        report: rep,
        artifact: None,
    })
}

fn enumerate(ctx: &Ctx) -> CliResult<Execution> {
    let scene = ctx.scene()?;
    let catalog = enumerate_geometric_permutations(scene, ctx.samples(100_000), ctx.common.seed, &ctx.mm())?;
    let summary = format!(
        "{} geometric permutation(s) from {} feasible of {} samples",
        catalog.len(),
        catalog.feasible_samples,
        catalog.samples
    );
    let artifact = (ctx.common.format == Format::Csv).then(|| {
        let mut csv = String::from("order,witness,samples\n");
        for p in &catalog.permutations {
            let order: Vec<String> = p.order.iter().map(|i| i.to_string()).collect();
            let w: Vec<String> = p.witness.components().iter().map(|x| x.to_string()).collect();
            csv.push_str(&format!("{},{},{}\n", order.join(" "), w.join(" "), p.samples));
        }
        Artifact {
            text: csv,
            kind: Format::Csv,
        }
    });
    Ok(Execution {
        report: report(ctx, "enumerate-permutations", Verdict::Pass, summary, to_value(&catalog)),
        artifact,
    })
}

fn components(ctx: &Ctx) -> CliResult<Execution> {
    let scene = ctx.scene()?;
    let r = count_components(scene, ctx.samples(100_000), ctx.common.seed, &ctx.mm())?;
    let verdict = if r.matches_permutations() {
        Verdict::Pass
    } else {
        Verdict::Violation
    };
    let summary = format!("{} component(s), {} geometric permutation(s)", r.components, r.catalog.len());
    let mut rep = report(ctx, "count-components", verdict, summary, to_value(&r));
    if r.undersampled {
        rep.warnings.push("a component holds fewer than 10 samples; raise --samples".into());
    }
    Ok(Execution {
        report: rep,
        artifact: None,
    })
}

fn probe_flex(ctx: &Ctx, lattice: usize, refine: bool) -> CliResult<Execution> {
    let triple = ctx.triple()?;
    let opts = FlexProbeOptions {
        samples: ctx.samples(200),
        lattice,
        seed: ctx.common.seed,
        refine,
        minimax: ctx.mm(),
    };
    let r = certify_flex_free(&triple, &opts)?;
    let verdict = if r.samples.is_empty() {
        Verdict::Inconclusive
    } else if r.pass {
        Verdict::Pass
    } else {
        Verdict::Violation
    };
    let summary = format!(
        "{} cone(s), {} sextic samples, {} skipped, min margin {:e}, min disjointness slack {:e}",
        r.cones,
        r.samples.len(),
        r.skipped.len(),
        r.min_margin,
        r.min_disjointness_slack
    );
    let artifact = (ctx.common.format == Format::Csv).then(|| {
        let mut csv = String::from("order,u1,u2,u3,h2,h4,margin,star_h,disjointness_slack,hessian_gap\n");
        for s in &r.samples {
            let o: Vec<String> = s.order.iter().map(|i| i.to_string()).collect();
            let u = s.direction.components();
            csv.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                o.join(" "),
                u[0],
                u[1],
                u[2],
                s.h2,
                s.h4,
                s.margin,
                s.star_h,
                s.disjointness_slack,
                s.hessian_gap
            ));
        }
        Artifact {
            text: csv,
            kind: Format::Csv,
        }
    });
    let result = json!({
        "cones": r.cones,
        "sample_count": r.samples.len(),
        "skipped_count": r.skipped.len(),
        "min_margin": finite(r.min_margin),
        "min_disjointness_slack": finite(r.min_disjointness_slack),
        "max_hessian_gap": finite(r.max_hessian_gap),
        "pass": r.pass,
        "samples": r.samples,
        "skipped": r.skipped,
    });
    let mut rep = report(ctx, "probe-flex", verdict, summary, result);
    if r.samples.is_empty() {
        rep.warnings.push("no cone boundary lies on the sextic; nothing to probe".into());
    }
    Ok(Execution { report: rep, artifact })
}

/// Chart centered on a feasible direction when there is one.
fn default_chart(scene: &Scene, triple: &Triple, half_width: f64, seed: u64, mm: &MinimaxOptions) -> CliResult<Chart> {
    let catalog = enumerate_geometric_permutations(scene, 4000, seed, mm)?;
    let center: Vec<f64> = match catalog.permutations.first() {
        Some(p) => p.witness.components().to_vec(),
        None => {
            let e = triple.edge(0, 2);
            let n = vec::dot3(&e, &e).sqrt();
            e.iter().map(|x| x / n).collect()
        }
    };
    let u = Direction::new(center)?;
    let basis = orthogonal_basis(&u);
    let arr = |v: &[f64]| [v[0], v[1], v[2]];
    Ok(Chart {
        kind: ChartKind::Plane {
            origin: arr(u.components()),
            e1: arr(&basis[0]),
            e2: arr(&basis[1]),
        },
        x_range: (-half_width, half_width),
        y_range: (-half_width, half_width),
    })
}

/// Sign changes of the Hessian along the traced sextic, and how many of
/// them sit on the boundary of a direction cone.  Each crossing is located
/// on the chord by bisection and pulled back onto the sextic before it is
/// classified.
fn hessian_crossings(triple: &Triple, traces: &TraceSet) -> (usize, usize) {
    let Some(sigma) = traces.curve("sigma") else { return (0, 0) };
    let h = |u: &[f64; 3]| eval_hessian_sigma(triple, u).signum();
    let (mut total, mut on_boundary) = (0, 0);
    for line in &sigma.polylines {
        for w in line.windows(2) {
            let mut a = traces.chart.lift(w[0][0], w[0][1]);
            let mut b = traces.chart.lift(w[1][0], w[1][1]);
            let ha = h(&a);
            if ha * h(&b) >= 0.0 {
                continue;
            }
            total += 1;
            for _ in 0..50 {
                let m = [0, 1, 2].map(|k| 0.5 * (a[k] + b[k]));
                if h(&m) == ha {
                    a = m;
                } else {
                    b = m;
                }
            }
            let u = project_to_sigma(triple, a);
            if let Ok(c) = classify_boundary_direction(triple, &u) {
                if c.skipped.is_none() && c.predicted_boundary && c.empirical_boundary {
                    on_boundary += 1;
                }
            }
        }
    }
    (total, on_boundary)
}

/// A few Newton steps along the gradient toward the zero set of the sextic.
fn project_to_sigma(triple: &Triple, mut u: [f64; 3]) -> [f64; 3] {
    for _ in 0..8 {
        let n = vec::dot3(&u, &u).sqrt();
        u = u.map(|x| x / n);
        let f = eval_sigma(triple, &u);
        let g = sigma_gradient(triple, &u);
        let gg = vec::dot3(&g, &g);
        if gg == 0.0 || f == 0.0 {
            break;
        }
        u = [0, 1, 2].map(|k| u[k] - f / gg * g[k]);
    }
    let n = vec::dot3(&u, &u).sqrt();
    u.map(|x| x / n)
}

fn trace(ctx: &Ctx, chart: Option<usize>, half_width: f64, hatch: usize, sweep: bool) -> CliResult<Execution> {
    if !(half_width > 0.0) {
        return Err(CliError::Usage("--half-width must be positive".into()));
    }
    if let Some(k) = chart {
        if k > 2 {
            return Err(CliError::Usage(format!("--chart must be 0, 1 or 2, got {k}")));
        }
    }
    let grid = ctx.samples(200);
    let scenes: Vec<(String, Scene)> = if sweep {
        TRANSITION_GAPS
            .iter()
            .zip(TRANSITION_LABELS)
            .map(|(&g, label)| (format!("{label} (gap {g})"), transition_scene(g)))
            .collect()
    } else {
        vec![("scene".to_string(), ctx.scene()?.clone())]
    };
    let first = Triple::from_scene(&scenes[0].1).map_err(|e| CliError::Usage(format!("needs three balls in R^3: {e}")))?;
    let chart = match chart {
        Some(k) => Chart::coordinate(k, half_width),
        None => default_chart(&scenes[0].1, &first, half_width, ctx.common.seed, &ctx.mm())?,
    };

    let mut panels = Vec::new();
    let mut summaries = Vec::new();
    for (title, scene) in &scenes {
        let triple = Triple::from_scene(scene)?;
        let traces = trace_curves(&triple, &chart, grid);
        let (feasible, cell) = feasible_cells(scene, &chart, hatch, ctx.tol);
        let (crossings, on_boundary) = hessian_crossings(&triple, &traces);
        let curves: Vec<Value> = traces
            .curves
            .iter()
            .map(|c| json!({"name": c.name, "polylines": c.polylines.len(), "vertices": c.vertices().count()}))
            .collect();
        summaries.push(json!({
            "title": title,
            "curves": curves,
            "feasible_cells": feasible.len(),
            "hessian_crossings": crossings,
            "hessian_crossings_on_cone_boundary": on_boundary,
        }));
        panels.push(Panel {
            title: title.clone(),
            traces,
            feasible,
            cell,
        });
    }

    let mut warnings = Vec::new();
    let artifact = match ctx.common.format {
        Format::Svg => {
            let fig = render_figure(&panels, &Style::default());
            warnings.extend(fig.warnings);
            Some(Artifact {
                text: fig.svg,
                kind: Format::Svg,
            })
        }
        Format::Csv => {
            let mut csv = String::from("panel,curve,chart,x,y\n");
            for p in &panels {
                for row in p.traces.to_csv().lines().skip(1) {
                    csv.push_str(&format!("{},{row}\n", p.title));
                }
            }
            Some(Artifact {
                text: csv,
                kind: Format::Csv,
            })
        }
        Format::Json => None,
    };
    let mut result = json!({ "chart": chart, "grid": grid, "panels": summaries });
    if artifact.is_none() {
        result["traces"] = to_value(&panels.iter().map(|p| &p.traces).collect::<Vec<_>>());
    }
    let summary = format!("{} panel(s) traced on a {grid}x{grid} grid", panels.len());
    let mut rep = report(ctx, "trace-curves", Verdict::Pass, summary, result);
    rep.warnings = warnings;
    Ok(Execution { report: rep, artifact })
}

fn identities(ctx: &Ctx, trials: usize, height: i64) -> CliResult<Execution> {
    let suite = schwartz_zippel_suite(trials, height, ctx.common.seed)?;
    let verdict = if suite.all_passed() {
        Verdict::Pass
    } else {
        Verdict::Violation
    };
    let summary = format!(
        "{}/{} identities hold at {trials} random rational points",
        suite.passed(),
        suite.identities.len()
    );
    Ok(Execution {
        report: report(ctx, "verify-identities", verdict, summary, to_value(&suite)),
        artifact: None,
    })
}

/// Directions spread along the traced sextic.
fn sextic_directions(triple: &Triple, count: usize) -> Vec<[f64; 3]> {
    let mut dirs = Vec::new();
    for k in 0..3 {
        let chart = Chart::coordinate(k, 1.0);
        let set = trace_curves(triple, &chart, 80);
        if let Some(c) = set.curve("sigma") {
            for p in c.vertices() {
                let u = chart.lift(p[0], p[1]);
                let n = vec::dot3(&u, &u).sqrt();
                dirs.push(u.map(|x| x / n));
            }
        }
    }
    if dirs.len() <= count {
        return dirs;
    }
    let step = dirs.len() as f64 / count as f64;
    (0..count).map(|i| dirs[(i as f64 * step) as usize]).collect()
}

fn classify(ctx: &Ctx, direction: Option<&[f64]>) -> CliResult<Execution> {
    let triple = ctx.triple()?;
    let dirs: Vec<[f64; 3]> = match direction {
        Some([x, y, z]) => vec![[*x, *y, *z]],
        Some(other) => {
            return Err(CliError::Usage(format!(
                "--direction needs three components, got {}",
                other.len()
            )))
        }
        None => sextic_directions(&triple, ctx.samples(20)),
    };
    let mut out = Vec::new();
    let (mut inconsistent, mut classified) = (0, 0);
    for u in &dirs {
        let c = classify_boundary_direction(&triple, u)?;
        if c.skipped.is_none() {
            classified += 1;
            inconsistent += (!c.consistent) as usize;
        }
        out.push(c);
    }
    let verdict = if inconsistent > 0 {
        Verdict::Violation
    } else if classified == 0 {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    let boundary = out.iter().filter(|c| c.skipped.is_none() && c.predicted_boundary).count();
    let summary = format!(
        "{classified} direction(s) classified, {boundary} on a cone boundary, {inconsistent} inconsistent with the direct test"
    );
    Ok(Execution {
        report: report(ctx, "classify-boundary", verdict, summary, json!({ "directions": out })),
        artifact: None,
    })
}

#[allow(clippy::too_many_arguments)]
fn generate(
    ctx: &Ctx,
    balls: usize,
    dim: usize,
    r_min: f64,
    r_max: f64,
    with_transversal: bool,
    extent: Option<f64>,
) -> CliResult<Execution> {
    let mut req = SceneRequest::new(balls, dim, r_min, r_max, ctx.common.seed);
    req.with_transversal = with_transversal;
    req.extent = extent;
    let gen = random_disjoint_scene(&req)?;
    let file = SceneFile::from(&gen.scene);
    let mut scene_json = serde_json::to_string_pretty(&file).expect("plain data");
    scene_json.push('\n');
    let result = json!({
        "scene": file,
        "construction_direction": gen.construction_direction,
        "construction_order": gen.construction_order,
        "attempts": gen.attempts,
    });
    let summary = format!("{balls} disjoint balls in R^{dim}");
    let artifact = ctx.common.out.as_ref().map(|_| Artifact {
        text: scene_json,
        kind: Format::Json,
    });
    Ok(Execution {
        report: report(ctx, "generate-scene", Verdict::Pass, summary, result),
        artifact,
    })
}

/// Applies the thread-count override to the global pool.  Call once, before
/// any parallel work.
pub fn init_threads(env: &EnvOverrides) -> CliResult<()> {
    if let Some(n) = env.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot set {ENV_THREADS}: {e}")))?;
    }
    Ok(())
}
