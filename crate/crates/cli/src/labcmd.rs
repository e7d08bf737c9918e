//! The `lab` subcommands: explicit monads as matrices over exact fields.

use crate::render::{render_pairs, Format};
use crate::{CmdError, RunOutput};
use clap::{Args, Subcommand};
use linmonad::lab::{
    degeneration_scan, random_monad, AnyMonad, Exec, FieldDesc, LabError, PrimeField, Rationals,
    ScanConfig,
};
use serde_json::{json, Value};
use std::path::PathBuf;

#[derive(Subcommand, Debug)]
pub enum LabCommand {
    /// Generate a seeded random monad and print its matrices as JSON.
    Sample(SampleArgs),
    /// Exact dimension of the degree-k sections of the cohomology sheaf.
    H0(H0Args),
    /// Monte-Carlo rank sweep of the degeneration locus over a prime field.
    Scan(ScanArgs),
    /// Dual-cokernel dimension h^1 of the dual sheaf.
    Dualcoker(MonadFileArgs),
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    /// Ambient dimension.
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub a: u32,
    #[arg(long)]
    pub b: u32,
    #[arg(long)]
    pub c: u32,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Coefficient field: `q` for the rationals, `fp:<prime>` for a
    /// prime field.
    #[arg(long, default_value = "q")]
    pub field: String,
    /// Also write the JSON to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct H0Args {
    /// Monad matrix file from `lab sample`.
    #[arg(long)]
    pub monad: PathBuf,
    /// Twist.
    #[arg(long, allow_hyphen_values = true)]
    pub k: i64,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    /// Monad matrix file from `lab sample`.
    #[arg(long)]
    pub monad: PathBuf,
    /// Prime to scan over; a rational monad is reduced modulo it.
    #[arg(long, default_value_t = 101)]
    pub q: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Random subspaces per dimension below the full sweep.
    #[arg(long, default_value_t = 64)]
    pub subspaces: u32,
    /// Comma-separated subspace dimensions to scan (default all).
    #[arg(long)]
    pub dims: Option<String>,
}

#[derive(Args, Debug)]
pub struct MonadFileArgs {
    /// Monad matrix file from `lab sample`.
    #[arg(long)]
    pub monad: PathBuf,
}

fn lab_err(e: LabError) -> CmdError {
    match e {
        LabError::AlphaH0NotInjective { .. } => CmdError::Internal(e.to_string()),
        _ => CmdError::Input(e.to_string()),
    }
}

fn read_any(path: &PathBuf) -> Result<AnyMonad, CmdError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CmdError::Input(format!("cannot read {}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| CmdError::Input(format!("bad monad file {}: {e}", path.display())))?;
    AnyMonad::from_json(&v).map_err(|e| CmdError::Input(e.to_string()))
}

pub fn run_lab(cmd: &LabCommand, fmt: Format, exec: Exec) -> Result<RunOutput, CmdError> {
    match cmd {
        LabCommand::Sample(args) => sample(args, fmt),
        LabCommand::H0(args) => h0(args, fmt),
        LabCommand::Scan(args) => scan(args, fmt, exec),
        LabCommand::Dualcoker(args) => dualcoker(args, fmt),
    }
}

fn sample(args: &SampleArgs, _fmt: Format) -> Result<RunOutput, CmdError> {
    let json = match args.field.as_str() {
        "q" | "Q" => {
            let m = random_monad(&Rationals, args.n, args.a, args.b, args.c, args.seed)
                .map_err(|e| CmdError::Input(e.to_string()))?;
            m.to_json(&FieldDesc::Q)
        }
        other => {
            let p = other
                .strip_prefix("fp:")
                .and_then(|p| p.parse::<u64>().ok())
                .ok_or_else(|| {
                    CmdError::Input(format!("field {other:?} is not q or fp:<prime>"))
                })?;
            let f = PrimeField::new(p).map_err(|e| CmdError::Input(e.to_string()))?;
            let m = random_monad(&f, args.n, args.a, args.b, args.c, args.seed)
                .map_err(|e| CmdError::Input(e.to_string()))?;
            m.to_json(&FieldDesc::Fp { p })
        }
    };
    let mut text = serde_json::to_string_pretty(&json).unwrap();
    text.push('\n');
    if let Some(path) = &args.out {
        std::fs::write(path, &text)
            .map_err(|e| CmdError::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(RunOutput {
        code: 0,
        stdout: text,
        stderr: String::new(),
    })
}

fn h0(args: &H0Args, fmt: Format) -> Result<RunOutput, CmdError> {
    let any = read_any(&args.monad)?;
    let (value, field) = match &any {
        AnyMonad::Q(m) => (m.h0_graded(args.k), "Q".to_string()),
        AnyMonad::Fp(m) => (m.h0_graded(args.k), any.field_name()),
    };
    let value = value.map_err(lab_err)?;
    let (a, b, c, n) = {
        let (n, a, b, c) = any.shape();
        (a, b, c, n)
    };
    let pairs = [
        ("command", json!("lab h0")),
        ("monad", json!(format!("({a},{b},{c}) on P{n}"))),
        ("field", json!(field)),
        ("k", json!(args.k)),
        ("h0", json!(value)),
    ];
    Ok(RunOutput {
        code: 0,
        stdout: render_pairs(fmt, &pairs),
        stderr: String::new(),
    })
}

fn scan(args: &ScanArgs, fmt: Format, exec: Exec) -> Result<RunOutput, CmdError> {
    let any = read_any(&args.monad)?;
    let target = PrimeField::new(args.q).map_err(|e| CmdError::Input(e.to_string()))?;
    let m = match &any {
        AnyMonad::Q(m) => m
            .to_prime(&target)
            .map_err(|e| CmdError::Input(e.to_string()))?,
        AnyMonad::Fp(m) => {
            if m.field.modulus() != args.q {
                return Err(CmdError::Input(format!(
                    "monad lives over {}, cannot rescan over F_{}",
                    any.field_name(),
                    args.q
                )));
            }
            m.clone()
        }
    };
    let mut cfg = ScanConfig::new(args.seed);
    cfg.subspaces_per_dim = args.subspaces;
    cfg.exec = exec;
    if let Some(list) = &args.dims {
        let dims = list
            .split(',')
            .map(|d| {
                d.trim()
                    .parse::<u32>()
                    .map_err(|_| CmdError::Input(format!("bad dimension {d:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        cfg.dims = Some(dims);
    }
    let report =
        degeneration_scan(&m, &cfg).map_err(|e| CmdError::Internal(e.to_string()))?;
    let stdout = match fmt {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report).unwrap();
            s.push('\n');
            s
        }
        _ => {
            let mut pairs = vec![
                ("command", json!("lab scan")),
                ("field", json!(format!("F_{}", report.p))),
                ("seed", json!(report.seed)),
                ("classification", serde_json::to_value(&report.classification).unwrap()),
                ("confidence", json!("Monte-Carlo")),
                (
                    "codim_estimate",
                    report
                        .codim_estimate
                        .map(|c| json!(c))
                        .unwrap_or(json!("none")),
                ),
                ("beta_drop", json!(report.beta_drop)),
            ];
            let dims: Vec<String> = report
                .scans
                .iter()
                .map(|s| {
                    format!(
                        "d={}: {}/{} subspaces hit, {} points{}",
                        s.d,
                        s.hit_subspaces,
                        s.subspaces,
                        s.points,
                        if s.exhaustive { ", exhaustive" } else { "" }
                    )
                })
                .collect();
            pairs.push(("scans", json!(dims)));
            render_pairs(fmt, &pairs)
        }
    };
    Ok(RunOutput {
        code: 0,
        stdout,
        stderr: String::new(),
    })
}

fn dualcoker(args: &MonadFileArgs, fmt: Format) -> Result<RunOutput, CmdError> {
    let any = read_any(&args.monad)?;
    let value = match &any {
        AnyMonad::Q(m) => m.h1_dual_coker(),
        AnyMonad::Fp(m) => m.h1_dual_coker(),
    };
    let (n, a, b, c) = any.shape();
    let pairs = [
        ("command", json!("lab dualcoker")),
        ("monad", json!(format!("({a},{b},{c}) on P{n}"))),
        ("field", json!(any.field_name())),
        ("h1_dual", json!(value)),
    ];
    Ok(RunOutput {
        code: 0,
        stdout: render_pairs(fmt, &pairs),
        stderr: String::new(),
    })
}
