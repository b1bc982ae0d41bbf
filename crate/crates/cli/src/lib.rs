//! Command-line front end: numerical ranges, nuclear curves, code solving,
//! verification and Monte Carlo clouds, written as CSV, JSON or SVG.
//!
//! JSON numbers are printed in the shortest form that parses back to the
//! same `f64`; CSV numbers use 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use nuclear_range::channels::{
    check_trace_preserving, derive_blocks, ADParams, Channel, GeneralParams, TRACE_TOL,
};
use nuclear_range::io::{complex_to_json, mat4_from_json, MatrixJson};
use nuclear_range::linalg::{Mat2, RealSym2, C64};
use nuclear_range::oracle::{cloud_range, sample_kernel_states, RngSeed};
use nuclear_range::ranges::{nuclear_curve, numerical_range_boundary, sample_curve, RangeSamples};
use nuclear_range::solver::{ad_closed_form, solve_report, verify_kl, CodeSolution, SolverConfig};
use serde_json::{json, Value};

#[derive(Debug, Parser)]
#[command(
    name = "nuclear-range",
    version,
    about = "Nuclear numerical ranges and codes for block-diagonal two-qubit channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Boundary of the numerical range W(A).
    Range {
        /// 2x2 complex matrix: inline JSON or a file path.
        #[arg(long = "A")]
        a: String,
        #[arg(long, default_value_t = 256)]
        n: usize,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The curve W(A | Z - lambda I) for a real symmetric Z = [[2a, b], [b, 2c]].
    NuclearRange {
        #[arg(long = "A")]
        a: String,
        /// "a,b,c".
        #[arg(long = "Z", allow_hyphen_values = true)]
        z: String,
        #[arg(
            long,
            allow_hyphen_values = true,
            required_unless_present = "lambda_sweep"
        )]
        lambda: Option<f64>,
        /// "lo:hi:steps", inclusive.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "lambda")]
        lambda_sweep: Option<String>,
        #[arg(long, default_value_t = 256)]
        n: usize,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Codes for the amplitude damping channel.
    SolveAd {
        #[arg(long)]
        p1: f64,
        #[arg(long)]
        p2: f64,
        /// Run the generic scan instead of the closed form.
        #[arg(long)]
        scan: bool,
        #[arg(long, default_value_t = 1000)]
        grid: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Codes for the ten-parameter general channel.
    SolveGeneral {
        /// Ten comma-separated values in (0, 1).
        #[arg(long)]
        a: String,
        #[arg(long, default_value_t = 1000)]
        grid: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Codes for a channel given as JSON.
    SolveRaw {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long, default_value_t = 1000)]
        grid: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Knill-Laflamme residuals of a projector for a channel.
    Verify {
        #[arg(long)]
        channel: PathBuf,
        /// A 4x4 matrix, or any object with a "p2" field.
        #[arg(long)]
        p2: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo cloud of W(A|Z) for an arbitrary 2x2 Z.
    Oracle {
        #[arg(long = "A")]
        a: String,
        /// 2x2 complex matrix: inline JSON or a file path.
        #[arg(long = "Z")]
        z: String,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Runs the tool on `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            let (kind, code) = match e.downcast_ref::<nuclear_range::Error>() {
                Some(err) => (err.kind(), 1),
                None if e.downcast_ref::<Usage>().is_some() => ("usage", 2),
                None => ("io", 1),
            };
            let message = format!("{e:#}").replace('\n', " ");
            eprintln!("error: kind={kind} message={message}");
            code
        }
    }
}

fn execute(cmd: Command) -> anyhow::Result<()> {
    match cmd {
        Command::Range { a, n, format, out } => {
            let a = read_mat2(&a)?;
            if n < 3 {
                bail!(nuclear_range::Error::Domain("n must be at least 3".into()));
            }
            let samples = numerical_range_boundary(&a, n);
            let text = match format {
                OutputFormat::Csv => samples.to_csv(),
                OutputFormat::Svg => render_svg(&[samples], &[]),
                OutputFormat::Json => bail!(usage("range writes csv or svg")),
            };
            emit(out.as_deref(), &text)
        }
        Command::NuclearRange {
            a,
            z,
            lambda,
            lambda_sweep,
            n,
            format,
            out,
        } => {
            let a = read_mat2(&a)?;
            let z = parse_real_sym(&z)?;
            if n == 0 {
                bail!(nuclear_range::Error::Domain("n must be positive".into()));
            }
            let lambdas = match (lambda, lambda_sweep) {
                (Some(l), None) => vec![l],
                (None, Some(s)) => parse_sweep(&s)?,
                _ => bail!(usage("give exactly one of --lambda and --lambda-sweep")),
            };
            let curves: Vec<RangeSamples> = lambdas
                .iter()
                .map(|&l| sample_curve(&nuclear_curve(&a, &z, l), n))
                .collect();
            let text = match format {
                OutputFormat::Csv => {
                    let mut all = RangeSamples::default();
                    for c in curves {
                        all.extend(c);
                    }
                    all.to_csv()
                }
                OutputFormat::Svg => render_svg(&curves, &[]),
                OutputFormat::Json => bail!(usage("nuclear-range writes csv or svg")),
            };
            emit(out.as_deref(), &text)
        }
        Command::SolveAd {
            p1,
            p2,
            scan,
            grid,
            tol,
            out,
        } => {
            let params = ADParams::new(p1, p2)?;
            let value = if scan {
                solutions_json(&run_scan(&Channel::Ad(params), &config(grid, tol))?)
            } else {
                ad_closed_form(params)?.to_json_value()
            };
            emit_json(out.as_deref(), &value)
        }
        Command::SolveGeneral { a, grid, tol, out } => {
            let values = parse_list(&a)?;
            let a: [f64; 10] = values.try_into().map_err(|v: Vec<f64>| {
                nuclear_range::Error::Parse(format!("expected 10 values for --a, got {}", v.len()))
            })?;
            let ch = Channel::General(GeneralParams::new(a)?);
            emit_json(
                out.as_deref(),
                &solutions_json(&run_scan(&ch, &config(grid, tol))?),
            )
        }
        Command::SolveRaw {
            channel,
            grid,
            tol,
            out,
        } => {
            let ch = read_channel(&channel)?;
            emit_json(
                out.as_deref(),
                &solutions_json(&run_scan(&ch, &config(grid, tol))?),
            )
        }
        Command::Verify { channel, p2, out } => {
            let ch = read_channel(&channel)?;
            let p2 = read_projector(&p2)?;
            let kraus = ch.kraus()?;
            let blocks = derive_blocks(&kraus)?;
            let (lambda, residuals) = verify_kl(&p2, &blocks)?;
            let trace = check_trace_preserving(&kraus, TRACE_TOL);
            let lambda_json: Vec<Vec<[f64; 2]>> = lambda
                .iter()
                .map(|row| row.iter().map(|&z| complex_to_json(z)).collect())
                .collect();
            let value = json!({
                "channel": ch.to_json_value(),
                "lambda": lambda_json,
                "residuals": residuals,
                "max_residual": residuals.iter().copied().fold(0.0, f64::max),
                "trace": {
                    "kraus_residual": trace.kraus_residual,
                    "row_residual": trace.row_residual,
                },
            });
            emit_json(out.as_deref(), &value)
        }
        Command::Oracle {
            a,
            z,
            n,
            seed,
            tol,
            out,
        } => {
            let a = read_mat2(&a)?;
            let z = read_mat2(&z)?;
            let cloud = sample_kernel_states(&z, n, tol, RngSeed(seed))?;
            // an empty cloud is a valid outcome and still gets a header
            if !cloud.is_empty() {
                cloud_range(&a, &cloud)?;
            }
            emit(out.as_deref(), &cloud.to_csv(&a))?;
            if let Some(path) = out {
                let meta = meta_path(&path);
                let text = serde_json::to_string_pretty(&cloud.metadata(n))? + "\n";
                fs::write(&meta, text).with_context(|| format!("writing {}", meta.display()))?;
            }
            Ok(())
        }
    }
}

/// A flag combination clap cannot rule out on its own.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: &str) -> Usage {
    Usage(msg.to_string())
}

/// Runs the scan, noting on stderr any intersection points it had to drop.
fn run_scan(ch: &Channel, cfg: &SolverConfig) -> nuclear_range::Result<Vec<CodeSolution>> {
    let report = solve_report(ch, cfg)?;
    if let Some(first) = report.rejected.first() {
        eprintln!(
            "note: rejected={} first_lambda11={} reason={}",
            report.rejected.len(),
            first.lambda11,
            first.reason
        );
    }
    Ok(report.solutions)
}

fn config(grid: usize, tol: f64) -> SolverConfig {
    SolverConfig {
        lambda_grid: grid,
        kl_tol: tol,
        ..SolverConfig::default()
    }
}

/// `<out>.meta.json` next to an oracle CSV.
pub fn meta_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

fn solutions_json(sols: &[CodeSolution]) -> Value {
    Value::Array(sols.iter().map(CodeSolution::to_json_value).collect())
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_json(out: Option<&Path>, value: &Value) -> anyhow::Result<()> {
    emit(out, &(serde_json::to_string_pretty(value)? + "\n"))
}

/// Inline JSON when the argument starts with `[`, otherwise a file path.
fn read_text(arg: &str) -> anyhow::Result<String> {
    if arg.trim_start().starts_with('[') || arg.trim_start().starts_with('{') {
        Ok(arg.to_string())
    } else {
        fs::read_to_string(arg).with_context(|| format!("reading {arg}"))
    }
}

fn read_mat2(arg: &str) -> anyhow::Result<Mat2> {
    Ok(nuclear_range::io::parse_mat2(&read_text(arg)?)?)
}

fn read_channel(path: &Path) -> anyhow::Result<Channel> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Channel::from_json(&text)?)
}

fn read_projector(path: &Path) -> anyhow::Result<nuclear_range::linalg::Mat4> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| nuclear_range::Error::Parse(format!("projector: {e}")))?;
    let matrix = match value {
        Value::Object(mut map) => map
            .remove("p2")
            .ok_or_else(|| nuclear_range::Error::Parse("projector object has no \"p2\"".into()))?,
        other => other,
    };
    let rows: MatrixJson = serde_json::from_value(matrix)
        .map_err(|e| nuclear_range::Error::Parse(format!("projector: {e}")))?;
    Ok(mat4_from_json(&rows)?)
}

fn parse_list(s: &str) -> anyhow::Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| anyhow!(nuclear_range::Error::Parse(format!("{t:?}: {e}"))))
        })
        .collect()
}

fn parse_real_sym(s: &str) -> anyhow::Result<RealSym2> {
    match parse_list(s)?.as_slice() {
        &[a, b, c] if a.is_finite() && b.is_finite() && c.is_finite() => Ok(RealSym2::new(a, b, c)),
        _ => bail!(usage("--Z takes three finite values \"a,b,c\"")),
    }
}

fn parse_sweep(s: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, steps] = parts.as_slice() else {
        bail!(usage("--lambda-sweep takes \"lo:hi:steps\""));
    };
    let lo: f64 = lo.trim().parse().map_err(|_| usage("bad sweep start"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| usage("bad sweep end"))?;
    let steps: usize = steps.trim().parse().map_err(|_| usage("bad sweep count"))?;
    if steps == 0 {
        bail!(usage("sweep needs at least one step"));
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..steps)
        .map(|k| {
            if k == steps - 1 {
                hi
            } else {
                lo + (hi - lo) * (k as f64 / (steps - 1) as f64)
            }
        })
        .collect())
}

const SVG_SIZE: f64 = 600.0;
const SVG_MARGIN: f64 = 40.0;
const PALETTE: [&str; 6] = [
    "#1f4e79", "#b03a2e", "#1e8449", "#7d3c98", "#b9770e", "#117a65",
];

/// SVG drawing of sampled curves with marker dots.
///
/// Axes pass through the origin when it is in view; otherwise the frame
/// edges are used. Output depends only on the input values.
pub fn render_svg(curves: &[RangeSamples], markers: &[C64]) -> String {
    let points: Vec<C64> = curves
        .iter()
        .flat_map(|c| c.values())
        .chain(markers.iter().copied())
        .filter(|z| z.re.is_finite() && z.im.is_finite())
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = points.iter().fold(
        (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        ),
        |(a, b, c, d), z| (a.min(z.re), b.max(z.re), c.min(z.im), d.max(z.im)),
    );
    if points.is_empty() {
        (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-9) * 1.1;
    let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
    let (x0, y0) = (cx - 0.5 * span, cy - 0.5 * span);
    let (x1, y1) = (x0 + span, y0 + span);
    let inner = SVG_SIZE - 2.0 * SVG_MARGIN;
    let px = |x: f64| SVG_MARGIN + (x - x0) / span * inner;
    let py = |y: f64| SVG_MARGIN + (y1 - y) / span * inner;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"#,
        SVG_SIZE
    );
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{0}" height="{0}" fill="white"/>"#,
        SVG_SIZE
    );
    let ax = if (x0..=x1).contains(&0.0) { 0.0 } else { x0 };
    let ay = if (y0..=y1).contains(&0.0) { 0.0 } else { y0 };
    let _ = writeln!(
        s,
        r##"<g stroke="#888888" stroke-width="1"><line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/><line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/></g>"##,
        px(x0),
        py(ay),
        px(x1),
        py(ay),
        px(ax),
        py(y0),
        px(ax),
        py(y1)
    );
    let _ = writeln!(
        s,
        r##"<g font-family="monospace" font-size="11" fill="#444444"><text x="{:.3}" y="{:.3}">Re [{:.4}, {:.4}]</text><text x="{:.3}" y="{:.3}">Im [{:.4}, {:.4}]</text></g>"##,
        SVG_MARGIN,
        SVG_SIZE - 12.0,
        x0,
        x1,
        SVG_MARGIN,
        20.0,
        y0,
        y1
    );
    for (k, c) in curves.iter().enumerate() {
        let mut vals = c.values();
        if vals.len() > 2 {
            vals.push(vals[0]);
        }
        let coords: Vec<String> = vals
            .iter()
            .map(|z| format!("{:.3},{:.3}", px(z.re), py(z.im)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{}" stroke-width="2" points="{}"/>"#,
            PALETTE[k % PALETTE.len()],
            coords.join(" ")
        );
    }
    for z in markers {
        let _ = writeln!(
            s,
            r##"<circle cx="{:.3}" cy="{:.3}" r="5" fill="#000000"/>"##,
            px(z.re),
            py(z.im)
        );
    }
    s.push_str("</svg>\n");
    s
}
