//! Command-line front end: demo pipelines, matrix and spectrum export,
//! eigenvalue scans and the verification suite.
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 for numerical failures
//! (including a failed verification or a violated positivity assertion).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use indefint::verify::{self, VerifyReport, DEFAULT_SEED};
use indefint::{
    build_basis, build_integration_matrices, eigen_factorize, run_pipeline, ConjectureReport, DemoConfig, Error,
    IntervalMap, PipelineId, Side, WeightFamily,
};
use serde_json::json;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "indefint", version, about = "Indefinite-integration matrices and the solvers built on them")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Export the integration matrices, scaled to (a, b).
    Matrices(MatrixArgs),
    /// Export the spectra of the scaled integration matrices.
    Eigs(MatrixArgs),
    /// Fourier inversion of 1/(1 - iy) on (0, 4).
    FtInvert(DemoArgs),
    /// Laplace inversion of the sinc transform on (0, 2).
    LtInvert(DemoArgs),
    /// Bessel-kernel control response on (0, 3).
    Control(DemoArgs),
    /// Picard solve of y' = 1 + y² on (0, 1/2).
    Ode(DemoArgs),
    /// Wiener-Hopf equation with exponential kernel on (0, 1).
    WienerHopf(DemoArgs),
    /// Right-half-plane scan of the A+ spectra for n = 1..n_max.
    Conjecture(ConjectureArgs),
    /// Randomized identity and bound checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Plus,
    Minus,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Plus => Side::Plus,
            SideArg::Minus => Side::Minus,
        }
    }
}

fn parse_family(s: &str) -> Result<WeightFamily, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args)]
pub struct DemoArgs {
    /// Number of collocation nodes.
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    /// Left end of the interval (demo default if omitted).
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Right end of the interval (demo default if omitted).
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Points in the equispaced fine mesh.
    #[arg(long, default_value_t = 100)]
    pub fine_points: usize,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.7)]
    pub beta: f64,
    /// legendre, chebyshev, gegenbauer:<lambda> or jacobi:<alpha>,<beta>.
    #[arg(long, value_parser = parse_family, default_value = "legendre")]
    pub family: WeightFamily,
    /// Side of the Fourier inversion.
    #[arg(long, value_enum, default_value_t = SideArg::Plus)]
    pub side: SideArg,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct MatrixArgs {
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long, allow_negative_numbers = true, default_value_t = -1.0)]
    pub a: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    pub b: f64,
    #[arg(long, value_parser = parse_family, default_value = "legendre")]
    pub family: WeightFamily,
    /// Restrict the export to one side.
    #[arg(long, value_enum)]
    pub side: Option<SideArg>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct ConjectureArgs {
    #[arg(long, value_parser = parse_family, default_value = "legendre")]
    pub family: WeightFamily,
    #[arg(long, default_value_t = 40)]
    pub n_max: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Seed of the randomized suites.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

/// Rendered artifact plus the exit status it implies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub text: String,
    pub status: i32,
}

impl Artifact {
    fn ok(text: String) -> Self {
        Self { text, status: EXIT_OK }
    }
}

fn demo_config(id: PipelineId, args: &DemoArgs) -> DemoConfig {
    let d = DemoConfig::defaults(id);
    DemoConfig {
        n: args.n,
        a: args.a.unwrap_or(d.a),
        b: args.b.unwrap_or(d.b),
        fine_points: args.fine_points,
        family: args.family,
        alpha: args.alpha,
        beta: args.beta,
        side: args.side.into(),
    }
}

fn sides(side: Option<SideArg>) -> Vec<Side> {
    match side {
        Some(s) => vec![s.into()],
        None => vec![Side::Plus, Side::Minus],
    }
}

fn matrices(args: &MatrixArgs) -> indefint::Result<Artifact> {
    let map = IntervalMap::new(args.a, args.b)?;
    let basis = build_basis(args.family, args.n)?;
    let m = build_integration_matrices(&basis)?;
    let nodes = basis.mapped_nodes(&map);
    let scaled: Vec<_> = sides(args.side).into_iter().map(|s| m.scale(s, map)).collect();
    let text = match args.output.format.unwrap_or(Format::Csv) {
        Format::Json => {
            let mut v = json!({
                "family": args.family,
                "n": args.n,
                "a": args.a,
                "b": args.b,
                "nodes": nodes,
                "weights": basis.weights(),
            });
            for c in &scaled {
                let rows: Vec<Vec<f64>> = (0..args.n).map(|j| (0..args.n).map(|k| c.matrix()[(j, k)]).collect()).collect();
                v[c.side().to_string()] = json!(rows);
            }
            pretty(&v)
        }
        Format::Csv => {
            let meta = json!({ "family": args.family, "n": args.n, "a": args.a, "b": args.b });
            let mut out = format!("# metadata: {meta}\n# nodes\n");
            push_row(&mut out, &nodes);
            out.push_str("# weights\n");
            push_row(&mut out, basis.weights());
            for c in &scaled {
                writeln!(out, "# {}", c.side()).unwrap();
                for j in 0..args.n {
                    let row: Vec<f64> = (0..args.n).map(|k| c.matrix()[(j, k)]).collect();
                    push_row(&mut out, &row);
                }
            }
            out
        }
    };
    Ok(Artifact::ok(text))
}

fn push_row(out: &mut String, values: &[f64]) {
    let cells: Vec<String> = values.iter().map(|v| format!("{v:.16e}")).collect();
    out.push_str(&cells.join(","));
    out.push('\n');
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn eigs(args: &MatrixArgs) -> indefint::Result<Artifact> {
    let map = IntervalMap::new(args.a, args.b)?;
    let m = build_integration_matrices(&build_basis(args.family, args.n)?)?;
    let mut spectra = Vec::new();
    for side in sides(args.side) {
        let c = m.scale(side, map);
        let values = indefint::intmat::eigenvalues(c.matrix())?;
        // the condition estimate is informative only; an ill-conditioned basis is not an error here
        let cond = eigen_factorize(&c).ok().map(|e| e.cond_estimate());
        spectra.push((side, values, cond));
    }
    let text = match args.output.format.unwrap_or(Format::Csv) {
        Format::Json => {
            let mut v = json!({ "family": args.family, "n": args.n, "a": args.a, "b": args.b });
            for (side, values, cond) in &spectra {
                let pairs: Vec<[f64; 2]> = values.iter().map(|z| [z.re, z.im]).collect();
                v[side.to_string()] = json!({ "eigenvalues": pairs, "eigenvector_cond": cond });
            }
            pretty(&v)
        }
        Format::Csv => {
            let meta = json!({ "family": args.family, "n": args.n, "a": args.a, "b": args.b });
            let mut out = format!("# metadata: {meta}\nside,re,im\n");
            for (side, values, _) in &spectra {
                for z in values {
                    writeln!(out, "{side},{:.16e},{:.16e}", z.re, z.im).unwrap();
                }
            }
            out
        }
    };
    Ok(Artifact::ok(text))
}

fn demo(id: PipelineId, args: &DemoArgs) -> indefint::Result<Artifact> {
    let report = run_pipeline(id, &demo_config(id, args))?;
    Ok(Artifact::ok(match args.output.format.unwrap_or(Format::Csv) {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    }))
}

fn conjecture_csv(r: &ConjectureReport) -> String {
    let meta = json!({
        "family": r.family,
        "params": r.params,
        "min_re_overall": r.min_re_overall,
        "violations": r.violations.len(),
        "inconclusive": r.inconclusive,
        "asserted": r.asserted,
    });
    let mut out = format!("# metadata: {meta}\nn,re,im\n");
    for e in &r.per_n {
        for [re, im] in &e.eigs {
            writeln!(out, "{},{re:.16e},{im:.16e}", e.n).unwrap();
        }
    }
    out
}

fn conjecture(args: &ConjectureArgs) -> indefint::Result<Artifact> {
    let report = verify::conjecture_scan(args.family, args.n_max)?;
    let text = match args.output.format.unwrap_or(Format::Json) {
        Format::Json => pretty(&serde_json::to_value(&report).expect("report serializes")),
        Format::Csv => conjecture_csv(&report),
    };
    let status = if report.assertion_failed() { EXIT_NUMERICAL } else { EXIT_OK };
    Ok(Artifact { text, status })
}

fn verify_csv(r: &VerifyReport) -> String {
    let mut out = format!("# metadata: {}\ncheck,cases,failures,worst,passed\n", json!({ "seed": r.seed, "passed": r.passed }));
    for e in &r.entries {
        writeln!(out, "{},{},{},{:.16e},{}", e.name, e.cases, e.failures, e.worst, e.passed).unwrap();
    }
    for (name, t) in &r.fourier_pairing {
        for row in &t.rows {
            writeln!(out, "fourier_pairing[{name}] T={},1,0,{:.16e},{}", row.t, row.re_error.max(row.im_error), t.monotone)
                .unwrap();
        }
    }
    let c = &r.conjecture_legendre;
    writeln!(out, "conjecture_legendre,{},{},{:.16e},{}", c.per_n.len(), c.violations.len(), c.min_re_overall, !c.assertion_failed())
        .unwrap();
    let nr = &r.numerical_range;
    writeln!(out, "spectrum_in_field_of_values,{},0,{:.16e},{}", nr.samples, nr.containment_violation, nr.spectrum_contained)
        .unwrap();
    out
}

fn verify_suite(args: &VerifyArgs) -> indefint::Result<Artifact> {
    let report = verify::run_suite(args.seed)?;
    let text = match args.output.format.unwrap_or(Format::Json) {
        Format::Json => pretty(&serde_json::to_value(&report).expect("report serializes")),
        Format::Csv => verify_csv(&report),
    };
    let status = if report.passed { EXIT_OK } else { EXIT_NUMERICAL };
    Ok(Artifact { text, status })
}

/// Runs a parsed command, returning the artifact and its output path.
pub fn execute(cli: &Cli) -> indefint::Result<(Artifact, Option<PathBuf>)> {
    let (artifact, out) = match &cli.command {
        Command::Matrices(a) => (matrices(a)?, &a.output.out),
        Command::Eigs(a) => (eigs(a)?, &a.output.out),
        Command::FtInvert(a) => (demo(PipelineId::FtInvert, a)?, &a.output.out),
        Command::LtInvert(a) => (demo(PipelineId::LtInvert, a)?, &a.output.out),
        Command::Control(a) => (demo(PipelineId::Control, a)?, &a.output.out),
        Command::Ode(a) => (demo(PipelineId::Ode, a)?, &a.output.out),
        Command::WienerHopf(a) => (demo(PipelineId::WienerHopf, a)?, &a.output.out),
        Command::Conjecture(a) => (conjecture(a)?, &a.output.out),
        Command::Verify(a) => (verify_suite(a)?, &a.output.out),
    };
    Ok((artifact, out.clone()))
}

/// Full command-line entry point; returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    match execute(&cli) {
        Ok((artifact, path)) => {
            let written = match path {
                Some(p) => std::fs::write(&p, &artifact.text).map_err(|e| format!("cannot write {}: {e}", p.display())),
                None => stdout.write_all(artifact.text.as_bytes()).map_err(|e| format!("cannot write output: {e}")),
            };
            if let Err(msg) = written {
                let _ = writeln!(stderr, "error: {msg}");
                return EXIT_USAGE;
            }
            artifact.status
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_USAGE
            }
        }
    }
}
