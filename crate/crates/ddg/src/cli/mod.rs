//! The `ddg` command line.
//!
//! Every command prints (or writes with `-o`) one JSON document. Exit codes:
//! `0` success, `2` a verification failed (the defect report is always printed
//! on stdout), `1` bad input or usage. `DDG_THREADS` caps the worker pool.

mod commands;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ddg_core::Gauge;
use serde_json::Value;

use crate::error::CliError;
use crate::json;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;

/// Environment variable limiting the number of worker threads.
pub const THREADS_ENV: &str = "DDG_THREADS";

#[derive(Debug, Parser)]
#[command(name = "ddg", version, about = "Discrete conformal geometry on planar triangle meshes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Override the command's default tolerance.
    #[arg(long, global = true, value_parser = positive)]
    pub tol: Option<f64>,
    /// Vertex where integrated vertex potentials vanish.
    #[arg(long, global = true, default_value_t = 0)]
    pub anchor_vertex: usize,
    /// Face where integrated face potentials vanish.
    #[arg(long, global = true, default_value_t = 0)]
    pub anchor_face: usize,
    /// Include per-element tables in the output.
    #[arg(long, global = true)]
    pub report: bool,
    /// Output file (an output prefix for `minimal build`).
    #[arg(short = 'o', long = "output", global = true)]
    pub output: Option<PathBuf>,
}

impl Options {
    fn gauge(&self) -> Gauge {
        Gauge { vertex: self.anchor_vertex, face: self.anchor_face }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mesh statistics.
    #[command(subcommand)]
    Mesh(MeshCmd),
    /// Finite conformal equivalence and pattern tests between two realizations.
    #[command(subcommand)]
    Check(CheckCmd),
    /// Cotangent-harmonic functions.
    #[command(subcommand)]
    Harmonic(HarmonicCmd),
    /// Infinitesimal conformal and pattern deformations.
    #[command(subcommand)]
    Deform(DeformCmd),
    /// Holomorphic quadratic differentials.
    #[command(subcommand)]
    Hqd(HqdCmd),
    /// The sl(2, C) form of a deformation and transition matrices.
    #[command(subcommand)]
    Moebius(MoebiusCmd),
    /// Discrete minimal surfaces from Weierstrass data.
    #[command(subcommand)]
    Minimal(MinimalCmd),
}

#[derive(Debug, Subcommand)]
pub enum MeshCmd {
    /// Counts, topology and (with --report) cross ratios and intersection angles.
    Info { mesh: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum CheckCmd {
    /// Equal cross-ratio moduli; reports the vertex scale factors u.
    Conformal { a: PathBuf, b: PathBuf },
    /// Equal intersection angles; reports the vertex rotation angles.
    Pattern { a: PathBuf, b: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum HarmonicCmd {
    /// Dirichlet problem; boundary data as an array (null = free) or {"vertex": value}.
    Solve { mesh: PathBuf, boundary: PathBuf },
    /// Cotangent Laplacian residual of a vertex function.
    Check { mesh: PathBuf, h: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DeformKind {
    Conformal,
    Pattern,
}

#[derive(Debug, Subcommand)]
pub enum DeformCmd {
    /// Vertex velocities from a harmonic scale (or angle) function.
    Build {
        mesh: PathBuf,
        u: PathBuf,
        #[arg(long, value_enum, default_value_t = DeformKind::Conformal)]
        kind: DeformKind,
    },
    /// Per-face compatibility of the edge rates of given vertex velocities.
    Check { mesh: PathBuf, zdot: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum HqdCmd {
    /// Both vertex sums of a quadratic differential.
    Check { mesh: PathBuf, q: PathBuf },
    /// q = du_z dz of a harmonic function.
    FromHarmonic { mesh: PathBuf, u: PathBuf },
    /// A harmonic function whose Hopf differential is q.
    ToHarmonic { mesh: PathBuf, q: PathBuf },
    /// Re-verifies q after random Möbius maps of the realization.
    MoebiusTest {
        mesh: PathBuf,
        q: PathBuf,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum MoebiusCmd {
    /// The sl(2, C) dual 1-form built from mu, with its closedness.
    Eta { mesh: PathBuf, mu: PathBuf },
    /// mu = -1/2 d/dt log cr for given vertex velocities.
    Mu { mesh: PathBuf, zdot: PathBuf },
    /// Per-face Möbius maps from realization a to b.
    Transitions { a: PathBuf, b: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum MinimalCmd {
    /// Integrates the surface and writes one dual mesh per alpha, the Gauss map and a report.
    Build {
        mesh: PathBuf,
        q: PathBuf,
        /// Associate-family angles, e.g. `0,pi/4,3pi/4`.
        #[arg(long, value_delimiter = ',', value_parser = angle, allow_hyphen_values = true)]
        alpha: Vec<f64>,
    },
    /// Checks that dual edges are parallel to the Gauss-map edges.
    Verify { gauss: PathBuf, dual: PathBuf },
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

/// Parses `x`, `pi`, `-pi/2`, `3pi/4`, `2*pi` and the like.
pub fn angle(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    let err = || format!("`{s}` is not an angle");
    let Some((coef, rest)) = t.split_once("pi") else {
        return t.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(err);
    };
    let coef = match coef.trim().trim_end_matches('*').trim() {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| err())?,
    };
    let div = match rest.trim() {
        "" => 1.0,
        r => r.strip_prefix('/').and_then(|d| d.trim().parse::<f64>().ok()).filter(|d| *d != 0.0).ok_or_else(err)?,
    };
    Ok(coef * std::f64::consts::PI / div)
}

/// What a command produced.
pub struct Outcome {
    pub doc: Value,
    pub passed: bool,
    /// Extra files written next to the main document.
    pub files: Vec<(PathBuf, String)>,
}

impl Outcome {
    fn new(doc: Value, passed: bool) -> Self {
        Outcome { doc, passed, files: Vec::new() }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let name = cli.command.name();
    let result = thread_pool().and_then(|pool| pool.install(|| commands::dispatch(&cli)));
    match result {
        Ok(o) => match finish(&cli.opts, o, out) {
            Ok(code) => code,
            Err(e) => report_error(name, &e, out, err),
        },
        Err(e) => report_error(name, &e, out, err),
    }
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(v) = std::env::var_os(THREADS_ENV) {
        let n = v
            .to_str()
            .and_then(|s| s.trim().parse::<usize>().ok())
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::Usage(e.to_string()))
}

fn finish(opts: &Options, o: Outcome, out: &mut dyn Write) -> Result<i32, CliError> {
    for (path, text) in &o.files {
        write_file(path, text)?;
    }
    let text = json::to_string(&o.doc);
    match &opts.output {
        Some(p) if o.files.is_empty() => write_file(p, &text)?,
        _ => {}
    }
    // A failure report always reaches stdout, even when also written to a file.
    if opts.output.is_none() || !o.files.is_empty() || !o.passed {
        out.write_all(text.as_bytes()).map_err(|e| CliError::Io { path: "<stdout>".into(), source: e })?;
    }
    Ok(if o.passed { EXIT_OK } else { EXIT_VERIFY })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })
}

fn report_error(command: &str, e: &CliError, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let doc =
        json::document([("command", Value::from(command)), ("passed", Value::Bool(false)), ("error", e.to_json())]);
    let text = json::to_string(&doc);
    if e.is_verification() {
        let _ = out.write_all(text.as_bytes());
        EXIT_VERIFY
    } else {
        let _ = err.write_all(text.as_bytes());
        EXIT_INPUT
    }
}

impl Command {
    /// `"group sub"`, as typed.
    pub fn name(&self) -> &'static str {
        match self {
            Command::Mesh(MeshCmd::Info { .. }) => "mesh info",
            Command::Check(CheckCmd::Conformal { .. }) => "check conformal",
            Command::Check(CheckCmd::Pattern { .. }) => "check pattern",
            Command::Harmonic(HarmonicCmd::Solve { .. }) => "harmonic solve",
            Command::Harmonic(HarmonicCmd::Check { .. }) => "harmonic check",
            Command::Deform(DeformCmd::Build { .. }) => "deform build",
            Command::Deform(DeformCmd::Check { .. }) => "deform check",
            Command::Hqd(HqdCmd::Check { .. }) => "hqd check",
            Command::Hqd(HqdCmd::FromHarmonic { .. }) => "hqd from-harmonic",
            Command::Hqd(HqdCmd::ToHarmonic { .. }) => "hqd to-harmonic",
            Command::Hqd(HqdCmd::MoebiusTest { .. }) => "hqd moebius-test",
            Command::Moebius(MoebiusCmd::Eta { .. }) => "moebius eta",
            Command::Moebius(MoebiusCmd::Mu { .. }) => "moebius mu",
            Command::Moebius(MoebiusCmd::Transitions { .. }) => "moebius transitions",
            Command::Minimal(MinimalCmd::Build { .. }) => "minimal build",
            Command::Minimal(MinimalCmd::Verify { .. }) => "minimal verify",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn angles() {
        assert_eq!(angle("0").unwrap(), 0.0);
        assert_eq!(angle("pi").unwrap(), PI);
        assert_eq!(angle("pi/4").unwrap(), PI / 4.0);
        assert_eq!(angle("3pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(angle("-pi/2").unwrap(), -PI / 2.0);
        assert_eq!(angle("2*pi").unwrap(), 2.0 * PI);
        assert_eq!(angle("0.25").unwrap(), 0.25);
        for bad in ["", "pie", "pi/0", "x", "nan", "pi/"] {
            assert!(angle(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn usage_errors_exit_one() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(run(["ddg", "nope"], &mut o, &mut e), EXIT_INPUT);
        assert_eq!(run(["ddg", "check", "conformal", "a.obj", "b.obj", "--tol", "-1"], &mut o, &mut e), EXIT_INPUT);
        assert_eq!(run(["ddg", "--help"], &mut o, &mut e), EXIT_OK);
    }
}
