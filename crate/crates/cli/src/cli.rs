use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polytile_core::embedding::{
    export_obj, export_obj_with_paths, export_svg_with_paths, format_sig, init_embedding, relax, unfold_net,
    RelaxOptions, RelaxReport, TreeStrategy,
};
use polytile_core::generators::{self, enumerate_vertex_configs, ConfigClass};
use polytile_core::geodesics::{
    check_triangle_theorem, shortest_geodesic, trace_ray, triangle, Charts, GeodesicPath, PathStatus, SurfacePoint,
    DEFAULT_STRIP_BOUND,
};
use polytile_core::report::AnalysisDoc;
use polytile_core::{parse_spec, write_spec, FaceId, Surface};
use serde_json::json;

use crate::presets::{preset, PRESET_HELP};
use crate::CommandError;

#[derive(Debug, Parser)]
#[command(name = "polytile", version, about = "Build, measure and flatten surfaces glued from regular polygons")]
#[command(after_help = format!("Presets:\n{PRESET_HELP}"))]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the spec file of a preset or spec, optionally after generator operations.
    Build {
        #[command(flatten)]
        source: Source,
        /// Operator to apply, in order: truncate, ambo, expand, bevel, snub, dual.
        #[arg(long = "apply", value_name = "OP")]
        apply: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Topology, curvature totals and the per-vertex table.
    Analyze {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Follow a straight line from a point.
    Trace {
        #[command(flatten)]
        source: Source,
        /// Start point as FACE:X,Y in the face chart.
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        /// Direction as DX,DY; normalized before tracing.
        #[arg(long, allow_hyphen_values = true)]
        dir: String,
        #[arg(long)]
        length: f64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Connect three points by geodesics and compare the angle sum with the enclosed curvature.
    Triangle {
        #[command(flatten)]
        source: Source,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        /// Longest face strip searched for each side.
        #[arg(long, default_value_t = DEFAULT_STRIP_BOUND)]
        bound: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Relax the spring embedding and report convergence.
    Relax {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        relax: RelaxArgs,
        /// Also write the relaxed mesh as OBJ.
        #[arg(long)]
        obj: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Export a relaxed mesh (obj), a cut pattern (svg) or the net document (net).
    Export {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum)]
        format: ExportFormat,
        #[command(flatten)]
        relax: RelaxArgs,
        /// Root face of the net.
        #[arg(long, default_value_t = 0)]
        root: usize,
        #[arg(long, value_enum, default_value_t = Tree::Bfs)]
        tree: Tree,
        /// Geodesic overlay between two points, FACE:X,Y..FACE:X,Y. Repeatable.
        #[arg(long, allow_hyphen_values = true)]
        overlay: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// List vertex configurations of one curvature class.
    Enumerate {
        #[arg(long, value_enum)]
        class: Class,
        #[arg(long, default_value_t = 42)]
        max_sides: usize,
        #[arg(long, default_value_t = 6)]
        max_count: usize,
        /// Only configurations with a single polygon type.
        #[arg(long)]
        uniform: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run the session service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Idle sessions are dropped after this many seconds.
        #[arg(long, default_value_t = 3600)]
        ttl_secs: u64,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Generator preset, see the list below.
    #[arg(long)]
    preset: Option<String>,
    /// Surface spec file.
    #[arg(long)]
    spec: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RelaxArgs {
    #[arg(long, default_value_t = 20_000)]
    iters: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExportFormat {
    Obj,
    Svg,
    Net,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Tree {
    Bfs,
    Dfs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Class {
    Convex,
    Flat,
    Hyperbolic,
}

/// Exit status and captured streams of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Run one command line. Exit code 0 on success, 1 on a domain error, 2 on a
/// usage error.
pub fn run_cli<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let (stdout, stderr) = if code == 0 { (text, String::new()) } else { (String::new(), text) };
            return CliOutput { code, stdout, stderr };
        }
    };
    match execute(cli.command) {
        Ok(stdout) => CliOutput { code: 0, stdout, stderr: String::new() },
        Err(e) => CliOutput { code: 1, stdout: String::new(), stderr: format!("error[{}]: {}\n", e.code, e.message) },
    }
}

fn load(source: &Source) -> Result<Surface, CommandError> {
    match (&source.preset, &source.spec) {
        (Some(name), _) => preset(name),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CommandError::new("Io", format!("{}: {e}", path.display())))?;
            Ok(parse_spec(&text)?)
        }
        (None, None) => unreachable!("clap requires a source"),
    }
}

fn write_out(path: &Option<PathBuf>, text: String) -> Result<String, CommandError> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CommandError::new("Io", format!("{}: {e}", p.display())))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn bad_arg(msg: String) -> CommandError {
    CommandError::new("InvalidArgument", msg)
}

fn parse_pair(text: &str) -> Result<[f64; 2], CommandError> {
    let (x, y) = text.split_once(',').ok_or_else(|| bad_arg(format!("expected X,Y, got `{text}`")))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad_arg(format!("not a number: `{t}`")));
    Ok([num(x)?, num(y)?])
}

fn parse_point(text: &str) -> Result<SurfacePoint, CommandError> {
    let (f, xy) = text.split_once(':').ok_or_else(|| bad_arg(format!("expected FACE:X,Y, got `{text}`")))?;
    let face = f.trim().parse::<usize>().map_err(|_| bad_arg(format!("not a face id: `{f}`")))?;
    let [x, y] = parse_pair(xy)?;
    Ok(SurfacePoint::new(FaceId(face), x, y))
}

fn json_text(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("documents serialize") + "\n"
}

fn execute(cmd: Command) -> Result<String, CommandError> {
    match cmd {
        Command::Build { source, apply, output } => {
            let mut s = load(&source)?;
            for op in apply {
                s = match op.as_str() {
                    "truncate" => generators::truncate(&s)?,
                    "ambo" => generators::ambo(&s)?,
                    "expand" => generators::expand(&s)?,
                    "bevel" => generators::bevel(&s)?,
                    "snub" => generators::snub(&s)?,
                    "dual" => generators::dual(&s)?,
                    _ => return Err(bad_arg(format!("unknown operator `{op}`"))),
                };
            }
            write_out(&output, write_spec(&s))
        }
        Command::Analyze { source, format } => {
            let doc = AnalysisDoc::new(&load(&source)?);
            Ok(match format {
                Format::Text => doc.to_text(),
                Format::Json => doc.to_json(),
            })
        }
        Command::Trace { source, from, dir, length, format } => {
            let s = load(&source)?;
            let charts = Charts::new(&s);
            let start = parse_point(&from)?;
            let [dx, dy] = parse_pair(&dir)?;
            let n = (dx * dx + dy * dy).sqrt();
            if !(n > 0.0) {
                return Err(bad_arg("direction must be nonzero".into()));
            }
            let path = trace_ray(&s, &charts, start, [dx / n, dy / n], length)?;
            Ok(match format {
                Format::Json => json_text(&path),
                Format::Text => path_text(&path),
            })
        }
        Command::Triangle { source, a, b, c, bound, format } => {
            let s = load(&source)?;
            let charts = Charts::new(&s);
            let t = triangle(&s, &charts, [parse_point(&a)?, parse_point(&b)?, parse_point(&c)?], bound)?;
            let check = check_triangle_theorem(&t);
            Ok(match format {
                Format::Json => json_text(&json!({ "triangle": t, "check": check })),
                Format::Text => {
                    let mut out = String::new();
                    let angles: Vec<String> = t.angles.iter().map(|a| format_sig(*a)).collect();
                    let _ = writeln!(out, "angles: {}", angles.join(" "));
                    let _ = writeln!(out, "angle sum: {}", format_sig(t.angles.iter().sum()));
                    let _ = writeln!(out, "deviation: {}", format_sig(check.deviation));
                    let ids: Vec<String> = t.enclosed_vertices.iter().map(|v| v.to_string()).collect();
                    let _ = writeln!(out, "enclosed vertices: {} [{}]", ids.len(), ids.join(" "));
                    let _ = writeln!(out, "enclosed curvature: {}", check.enclosed);
                    let sides: Vec<String> = t.sides.iter().map(|p| format_sig(p.length)).collect();
                    let _ = writeln!(out, "sides: {}", sides.join(" "));
                    let _ = writeln!(out, "theorem: {}", if check.holds { "holds" } else { "fails" });
                    out
                }
            })
        }
        Command::Relax { source, relax: args, obj, format } => {
            let s = load(&source)?;
            let mut m = init_embedding(&s, args.seed)?;
            let report = relax(&mut m, RelaxOptions { max_iters: args.iters, tol: args.tol })?;
            if obj.is_some() {
                write_out(&obj, export_obj(&m))?;
            }
            Ok(match format {
                Format::Json => json_text(&report),
                Format::Text => relax_text(&report),
            })
        }
        Command::Export { source, format, relax: args, root, tree, overlay, output } => {
            let s = load(&source)?;
            let charts = Charts::new(&s);
            let mut paths = Vec::new();
            for o in &overlay {
                let (p, q) = o.split_once("..").ok_or_else(|| bad_arg(format!("expected P..Q, got `{o}`")))?;
                paths.push(shortest_geodesic(&s, &charts, parse_point(p)?, parse_point(q)?, DEFAULT_STRIP_BOUND)?);
            }
            if root >= s.face_count() {
                return Err(CommandError::new("UnknownFace", format!("no face {root}")));
            }
            let strategy = match tree {
                Tree::Bfs => TreeStrategy::BreadthFirst,
                Tree::Dfs => TreeStrategy::DepthFirst,
            };
            let text = match format {
                ExportFormat::Obj => {
                    let mut m = init_embedding(&s, args.seed)?;
                    if args.iters > 0 {
                        relax(&mut m, RelaxOptions { max_iters: args.iters, tol: args.tol })?;
                    }
                    if paths.is_empty() {
                        export_obj(&m)
                    } else {
                        export_obj_with_paths(&m, Some(&charts), &paths)
                    }
                }
                ExportFormat::Svg => export_svg_with_paths(&unfold_net(&s, FaceId(root), strategy), &s, &paths),
                ExportFormat::Net => json_text(&unfold_net(&s, FaceId(root), strategy)),
            };
            write_out(&output, text)
        }
        Command::Enumerate { class, max_sides, max_count, uniform, format } => {
            let class = match class {
                Class::Convex => ConfigClass::Convex,
                Class::Flat => ConfigClass::Flat,
                Class::Hyperbolic => ConfigClass::Hyperbolic,
            };
            let rows: Vec<_> = enumerate_vertex_configs(class, max_sides, max_count)
                .into_iter()
                .filter(|c| !uniform || c.is_uniform())
                .collect();
            Ok(match format {
                Format::Json => json_text(
                    &rows
                        .iter()
                        .map(|c| {
                            json!({
                                "config": c.sides,
                                "angle_sum": c.angle_sum,
                                "defect": c.defect(),
                                "class": c.class,
                                "predicted_vertices": c.predicted_vertices(),
                            })
                        })
                        .collect::<Vec<_>>(),
                ),
                Format::Text => {
                    let mut out = String::new();
                    for c in &rows {
                        let v = c.predicted_vertices().map(|v| format!(" V={v}")).unwrap_or_default();
                        let _ = writeln!(out, "{:<16} sum {:<12} defect {}{v}", c.to_string(), c.angle_sum, c.defect());
                    }
                    out
                }
            })
        }
        Command::Serve { port, host, ttl_secs } => {
            let runtime = tokio::runtime::Runtime::new().map_err(|e| CommandError::new("Io", e.to_string()))?;
            runtime
                .block_on(crate::service::serve(&host, port, Duration::from_secs(ttl_secs)))
                .map_err(|e| CommandError::new("Io", e.to_string()))?;
            Ok(String::new())
        }
    }
}

fn path_text(path: &GeodesicPath) -> String {
    let mut out = String::new();
    let status = match path.status {
        PathStatus::Complete => "complete",
        PathStatus::HitBoundary => "hit boundary",
    };
    let _ = writeln!(out, "status: {status}");
    let _ = writeln!(out, "length: {}", format_sig(path.length));
    let _ = writeln!(out, "crossings: {}", path.crossings.len());
    for seg in &path.segments {
        let _ = writeln!(
            out,
            "  face {:>4}  ({}, {}) -> ({}, {})",
            seg.face.0,
            format_sig(seg.start[0]),
            format_sig(seg.start[1]),
            format_sig(seg.end[0]),
            format_sig(seg.end[1])
        );
    }
    out
}

fn relax_text(r: &RelaxReport) -> String {
    format!(
        "iterations: {}\nenergy: {}\nmax residual: {}\ngradient norm: {}\nconverged: {}\n",
        r.iterations,
        format_sig(r.energy),
        format_sig(r.max_residual),
        format_sig(r.gradient_norm),
        r.converged
    )
}
