//! Command-line front end for the monad workbench.  All command logic
//! lives here so tests can drive it in-process; the binary is a shim.
//!
//! Exit codes: 0 success, 1 internal error or engine contradiction,
//! 2 bad input, 3 regression mismatch.

mod examples;
mod input;
mod labcmd;
mod render;

pub use examples::{build_bundle, Bundle, ExampleRow};
pub use input::{parse_variety_token, read_monad_file, ResolvedSpec};
pub use render::Format;

use clap::{ArgAction, Args, Parser, Subcommand};
use input::{parse_shape, parse_window};
use labcmd::LabCommand;
use linmonad::chern::{chern_of_monad, chi_of_kclass, kclass_of_monad, rank_and_c1, slope};
use linmonad::engine::derive_monad_tables;
use linmonad::lab::Exec;
use linmonad::monads::{charge_and_kind, existence_check, MonadShape, MonadSpec};
use linmonad::stability::{
    instanton_verdict, linear_verdict, special_verdict, Flags, SheafExpr, StabilityError,
};
use serde_json::json;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_REGRESSION: i32 = 3;

/// Worker-count override, read once per invocation.
pub const THREADS_ENV: &str = "LINMONAD_THREADS";

#[derive(Debug)]
pub enum CmdError {
    /// User input problem; exit 2.
    Input(String),
    /// Internal failure or contradiction; exit 1.
    Internal(String),
}

impl CmdError {
    fn code(&self) -> i32 {
        match self {
            CmdError::Input(_) => EXIT_INPUT,
            CmdError::Internal(_) => EXIT_INTERNAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            CmdError::Input(m) | CmdError::Internal(m) => m,
        }
    }
}

/// Everything a finished invocation hands back to the process shell.
#[derive(Debug)]
pub struct RunOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(
    name = "linmonad",
    version,
    about = "Exact-arithmetic workbench for linear monads on cyclic varieties"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Rank, degree, charge, Chern series, slope and existence of a monad.
    Analyze(SpecArgs),
    /// Total Chern series and the Euler characteristics of the twists.
    Chern(ChernArgs),
    /// Cohomology tables derived from the display sequences.
    Table(TableArgs),
    /// Slope-stability verdict with certificates.
    Stability(StabilityArgs),
    /// Worked-example regression bundle over a dimension range.
    PaperExamples(ExamplesArgs),
    /// Explicit monads as matrices over exact fields.
    #[command(subcommand)]
    Lab(LabCommand),
}

/// Monad source shared by the symbolic commands: either a descriptor file
/// or inline multiplicities with a variety token, never both.
#[derive(Args, Debug)]
pub struct SpecArgs {
    /// Monad descriptor file (JSON).
    #[arg(long, value_name = "FILE")]
    pub monad: Option<PathBuf>,
    /// Left multiplicity.
    #[arg(long)]
    pub a: Option<u32>,
    /// Second left multiplicity (even-spinor shape only).
    #[arg(long)]
    pub a2: Option<u32>,
    /// Middle multiplicity.
    #[arg(long)]
    pub b: Option<u32>,
    /// Right multiplicity.
    #[arg(long)]
    pub c: Option<u32>,
    /// Monad shape for inline specs: M1, M2.1 or M2.2.
    #[arg(long, default_value = "M1")]
    pub shape: String,
    /// Variety token: Pn:<dim> or Qn:<dim>.
    #[arg(long)]
    pub variety: Option<String>,
    /// Treat the cohomology sheaf as locally free.
    #[arg(long, action = ArgAction::SetTrue)]
    pub locally_free: bool,
}

impl SpecArgs {
    fn resolve(&self) -> Result<ResolvedSpec, CmdError> {
        let inline = self.a.is_some() || self.b.is_some() || self.c.is_some();
        match (&self.monad, inline) {
            (Some(_), true) => Err(CmdError::Input(
                "give either --monad or inline --a/--b/--c, not both".into(),
            )),
            (None, false) => Err(CmdError::Input(
                "no monad given; use --monad <file> or --a/--b/--c with --variety".into(),
            )),
            (Some(path), false) => {
                let mut spec = read_monad_file(path)?;
                spec.locally_free |= self.locally_free;
                Ok(spec)
            }
            (None, true) => {
                let (Some(a), Some(b), Some(c)) = (self.a, self.b, self.c) else {
                    return Err(CmdError::Input(
                        "inline specs need all of --a, --b and --c".into(),
                    ));
                };
                let tok = self.variety.as_deref().ok_or_else(|| {
                    CmdError::Input("inline specs need --variety".into())
                })?;
                let v = parse_variety_token(tok)?;
                let m = MonadSpec {
                    shape: parse_shape(&self.shape)?,
                    a,
                    a2: self.a2.unwrap_or(0),
                    b,
                    c,
                };
                m.validate(&v).map_err(|e| CmdError::Input(e.to_string()))?;
                Ok(ResolvedSpec {
                    m,
                    v,
                    locally_free: self.locally_free,
                })
            }
        }
    }
}

#[derive(Args, Debug)]
pub struct ChernArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Twist window for the Euler-characteristic row, as lo:hi.
    #[arg(long, default_value = "-3:3", allow_hyphen_values = true)]
    pub window: String,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Twist window, as lo:hi.
    #[arg(long, default_value = "-4:4", allow_hyphen_values = true)]
    pub window: String,
    /// Which table: the sheaf, its dual, or the display kernel.
    #[arg(long, value_enum, default_value_t = TableChoice::Sheaf)]
    pub sheaf: TableChoice,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum TableChoice {
    Sheaf,
    Dual,
    Kernel,
    KernelDual,
}

#[derive(Args, Debug)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Assume torsion freeness.
    #[arg(long, action = ArgAction::SetTrue)]
    pub torsion_free: bool,
    /// Assume reflexivity.
    #[arg(long, action = ArgAction::SetTrue)]
    pub reflexive: bool,
    /// Declared first Chern class for twisted shapes.
    #[arg(long, allow_hyphen_values = true)]
    pub declared_c1: Option<i64>,
}

#[derive(Args, Debug)]
pub struct ExamplesArgs {
    /// Smallest dimension.
    #[arg(long, default_value_t = 2)]
    pub min_n: u32,
    /// Largest dimension.
    #[arg(long, default_value_t = 6)]
    pub max_n: u32,
    /// Base seed for the sampled rows.
    #[arg(long, default_value_t = 2026)]
    pub seed: u64,
    /// Fixture file to compare against (default: the built-in fixture).
    #[arg(long)]
    pub fixture: Option<PathBuf>,
    /// Print the computed bundle as fixture JSON and skip the comparison.
    #[arg(long, action = ArgAction::SetTrue)]
    pub emit_fixture: bool,
}

/// Parses and executes one invocation.  Never panics on bad input; the
/// outcome, including usage errors, is in the returned exit code.
pub fn run<I, T>(args: I) -> RunOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => RunOutput {
                    code: EXIT_OK,
                    stdout: rendered,
                    stderr: String::new(),
                },
                _ => RunOutput {
                    code: EXIT_INPUT,
                    stdout: String::new(),
                    stderr: rendered,
                },
            };
        }
    };
    let exec = thread_setup();
    let result = match &cli.command {
        Command::Analyze(args) => cmd_analyze(args, cli.format),
        Command::Chern(args) => cmd_chern(args, cli.format),
        Command::Table(args) => cmd_table(args, cli.format),
        Command::Stability(args) => cmd_stability(args, cli.format),
        Command::PaperExamples(args) => examples::run_examples(&examples::ExamplesRequest {
            min_n: args.min_n,
            max_n: args.max_n,
            seed: args.seed,
            fixture: args.fixture.clone(),
            emit_fixture: args.emit_fixture,
            fmt: cli.format,
        }),
        Command::Lab(cmd) => labcmd::run_lab(cmd, cli.format, exec),
    };
    match result {
        Ok(out) => out,
        Err(e) => RunOutput {
            code: e.code(),
            stdout: String::new(),
            stderr: format!("error: {}\n", e.message()),
        },
    }
}

/// Applies the worker-count environment variable and picks the execution
/// lane for the sampling loops.
fn thread_setup() -> Exec {
    match std::env::var(THREADS_ENV) {
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(0) | Err(_) => Exec::Parallel,
            Ok(1) => Exec::Sequential,
            Ok(k) => {
                linmonad::lab::set_worker_threads(k);
                Exec::Parallel
            }
        },
        Err(_) => Exec::Parallel,
    }
}

fn stability_err(e: StabilityError) -> CmdError {
    match e {
        StabilityError::Invalid(_) | StabilityError::NeedsDeclaredC1 => {
            CmdError::Input(e.to_string())
        }
        StabilityError::Inconsistent(_) | StabilityError::Engine(_) => {
            CmdError::Internal(e.to_string())
        }
    }
}

fn cmd_analyze(args: &SpecArgs, fmt: Format) -> Result<RunOutput, CmdError> {
    let spec = args.resolve()?;
    let inv = charge_and_kind(&spec.m, &spec.v);
    let existence = existence_check(&spec.m, &spec.v);
    let mut pairs = vec![
        ("variety", json!(spec.v.name)),
        ("shape", serde_json::to_value(spec.m.shape).unwrap()),
        (
            "multiplicities",
            json!(format!(
                "({},{},{})",
                spec.m.a, spec.m.b, spec.m.c
            )),
        ),
        ("rank", json!(inv.rank)),
    ];
    if let Some(c1) = inv.c1 {
        pairs.push(("c1", json!(c1)));
        if inv.rank >= 1 {
            pairs.push(("slope", json!(slope(c1, inv.rank, &spec.v).to_string())));
        }
    } else {
        pairs.push(("c1", json!("not priced for spinor left terms")));
    }
    if let Some(charge) = inv.charge {
        pairs.push(("charge", json!(charge)));
    }
    pairs.push(("instanton", json!(inv.is_instanton)));
    match chern_of_monad(&spec.m, &spec.v) {
        Ok(series) => pairs.push(("chern", json!(series.to_string()))),
        Err(_) => pairs.push(("chern", json!("unavailable for this shape"))),
    }
    let existence_val = match (&existence, fmt) {
        (_, Format::Json) => serde_json::to_value(&existence).unwrap(),
        (linmonad::monads::ExistenceVerdict::Exists { citation }, _) => {
            json!(format!("known ({citation})"))
        }
        (linmonad::monads::ExistenceVerdict::NotExists { citation }, _) => {
            json!(format!("ruled out ({citation})"))
        }
        (linmonad::monads::ExistenceVerdict::Unknown, _) => json!("open"),
    };
    pairs.push(("existence", existence_val));
    Ok(RunOutput {
        code: 0,
        stdout: render::render_pairs(fmt, &pairs),
        stderr: String::new(),
    })
}

fn cmd_chern(args: &ChernArgs, fmt: Format) -> Result<RunOutput, CmdError> {
    let spec = args.spec.resolve()?;
    let window = parse_window(&args.window)?;
    if spec.m.shape != MonadShape::M1 {
        return Err(CmdError::Input(
            "Chern data is only priced for the plain shape".into(),
        ));
    }
    let series = chern_of_monad(&spec.m, &spec.v)
        .map_err(|e| CmdError::Internal(e.to_string()))?;
    let (rank, c1) = rank_and_c1(&spec.m, &spec.v);
    let kclass = kclass_of_monad(&spec.m, &spec.v);
    let mut chi_row = Vec::new();
    for k in window.0..=window.1 {
        let chi = chi_of_kclass(&kclass.twist(k), &spec.v)
            .map_err(|e| CmdError::Internal(e.to_string()))?;
        chi_row.push(json!({ "k": k, "chi": chi }));
    }
    let pairs = vec![
        ("variety", json!(spec.v.name)),
        ("rank", json!(rank)),
        ("c1", json!(c1)),
        ("chern", json!(series.to_string())),
        ("coefficients", json!(series.to_strings())),
        (
            "slope",
            if rank >= 1 {
                json!(slope(c1, rank, &spec.v).to_string())
            } else {
                json!("undefined")
            },
        ),
        ("chi", serde_json::Value::Array(chi_row)),
    ];
    Ok(RunOutput {
        code: 0,
        stdout: render::render_pairs(fmt, &pairs),
        stderr: String::new(),
    })
}

fn cmd_table(args: &TableArgs, fmt: Format) -> Result<RunOutput, CmdError> {
    let spec = args.spec.resolve()?;
    let window = parse_window(&args.window)?;
    let tables = derive_monad_tables(&spec.m, &spec.v, spec.locally_free, window)
        .map_err(|e| match e {
            linmonad::engine::EngineError::BadRequest(_) => CmdError::Input(e.to_string()),
            other => CmdError::Internal(other.to_string()),
        })?;
    let t = match args.sheaf {
        TableChoice::Sheaf => &tables.e,
        TableChoice::Dual => &tables.e_star,
        TableChoice::Kernel => &tables.kernel,
        TableChoice::KernelDual => &tables.kernel_star,
    };
    Ok(RunOutput {
        code: 0,
        stdout: render::render_table(fmt, t),
        stderr: String::new(),
    })
}

fn cmd_stability(args: &StabilityArgs, fmt: Format) -> Result<RunOutput, CmdError> {
    let spec = args.spec.resolve()?;
    let flags = Flags {
        locally_free: spec.locally_free,
        torsion_free: args.torsion_free,
        reflexive: args.reflexive,
    };
    let verdict = if spec.m.shape == MonadShape::M1 {
        let expr = SheafExpr::Monad(spec.m);
        let (_, c1) = rank_and_c1(&spec.m, &spec.v);
        if c1 == 0 {
            instanton_verdict(&expr, &spec.v, flags)
        } else {
            linear_verdict(&expr, &spec.v, flags)
        }
    } else {
        special_verdict(&spec.m, &spec.v, flags, args.declared_c1)
    }
    .map_err(stability_err)?;
    let stdout = match fmt {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&verdict).unwrap();
            s.push('\n');
            s
        }
        _ => {
            let mut pairs = vec![
                ("variety", json!(spec.v.name)),
                ("status", json!(format!("{:?}", verdict.status))),
                ("rank", json!(verdict.rank)),
                ("c1", json!(verdict.c1)),
                ("slope", json!(verdict.slope.to_string())),
            ];
            let certs: Vec<String> = verdict
                .certificates
                .iter()
                .map(|c| format!("{c:?}"))
                .collect();
            if !certs.is_empty() {
                pairs.push(("certificates", json!(certs)));
            }
            if !verdict.assumptions.is_empty() {
                pairs.push(("assumptions", json!(verdict.assumptions)));
            }
            if !verdict.conjectures.is_empty() {
                pairs.push(("conjectures", json!(verdict.conjectures)));
            }
            if !verdict.notes.is_empty() {
                pairs.push(("notes", json!(verdict.notes)));
            }
            render::render_pairs(fmt, &pairs)
        }
    };
    Ok(RunOutput {
        code: 0,
        stdout,
        stderr: String::new(),
    })
}
