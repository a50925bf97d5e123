//! `weil`: build section matrices, run verification sweeps, and compute
//! theta defects. Exit codes: 0 pass, 1 invariant violated, 2 bad config.

mod config;
mod verify;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use weil_core::cyclotomic::{CycNum, FieldElem};
use weil_core::finsymp::generators;
use weil_core::gl1theta::{build_level0, defect_report, specialize, SpecializationIdeal};
use weil_core::heisenberg::InducedModel;
use weil_core::json;
use weil_core::weilrep::{section_sigma, SectionVariant};

use config::{CliError, Ring, SpaceArgs};

pub const SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(name = "weil", version, about = "Exact Weil representations of finite symplectic groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dump the canonical section on a generating set of Sp(W).
    Build(BuildArgs),
    /// Run verification checks and report pass/fail.
    Verify(VerifyArgs),
    /// Theta defect of the level-0 (F^x, F^x) Weil module.
    #[command(alias = "theta-gl1")]
    Theta(ThetaArgs),
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    space: SpaceArgs,
    /// Write JSON here instead of stdout.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    /// Comma-separated subset of schur,irreducible,cocycle,extend,gauss.
    #[arg(long, default_value = "schur,irreducible,cocycle,extend,gauss")]
    pub checks: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sampled pairs when the group is too large for an exhaustive sweep.
    #[arg(long, default_value_t = 10_000)]
    pub pairs: usize,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    /// Normalize the section with the reversed Gauss sum (negative control).
    #[arg(long, hide = true)]
    pub corrupt_section: bool,
}

#[derive(Args)]
struct ThetaArgs {
    #[arg(long)]
    q: u64,
    /// Center character as "X-a,Z-b".
    #[arg(long, allow_hyphen_values = true)]
    ideal: String,
    /// Reduce further modulo a prime l.
    #[arg(long = "mod")]
    modulus: Option<u64>,
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

fn emit(out: &Option<std::path::PathBuf>, v: &Value) -> Result<(), CliError> {
    let mut s = serde_json::to_string(v).expect("json");
    s.push('\n');
    match out {
        Some(path) => std::fs::write(path, s).map_err(|e| CliError::Config(format!("{}: {e}", path.display()))),
        None => {
            std::io::stdout().write_all(s.as_bytes()).ok();
            Ok(())
        }
    }
}

fn build(args: &BuildArgs) -> Result<bool, CliError> {
    let cfg = args.space.validate()?;
    let space = cfg.space()?;
    let ch = cfg.reference_character(&space);
    let gens = generators(&space);
    let matrices: Vec<Value> = match &cfg.ring {
        Ring::Universal => {
            let model = InducedModel::<CycNum>::build(ch, cfg.p).map_err(CliError::core)?;
            gens.iter()
                .map(|g| section_sigma(&model, g, SectionVariant::Canonical).map(|e| e.to_json()))
                .collect::<Result<_, _>>()
                .map_err(CliError::core)?
        }
        Ring::Residue(field) => {
            let model = InducedModel::<FieldElem>::build(ch, field.clone()).map_err(CliError::core)?;
            gens.iter()
                .map(|g| section_sigma(&model, g, SectionVariant::Canonical).map(|e| e.to_json()))
                .collect::<Result<_, _>>()
                .map_err(CliError::core)?
        }
    };
    let fq = space.fq();
    let basis = weil_core::heisenberg::ModelBasis::new(cfg.reference_character(&space));
    let v = json!({
        "schema": SCHEMA,
        "command": "build",
        "config": cfg.to_json(),
        "model": {
            "lagrangian": basis.character().lagrangian().basis().iter().map(|v| json::fq_vec(fq, v)).collect::<Vec<_>>(),
            "reps": basis.reps().iter().map(|v| json::fq_vec(fq, v)).collect::<Vec<_>>(),
        },
        "generators": matrices,
    });
    emit(&args.out, &v)?;
    Ok(true)
}

fn theta(args: &ThetaArgs) -> Result<bool, CliError> {
    let ideal = SpecializationIdeal::parse(&args.ideal).map_err(|e| CliError::Config(e.to_string()))?;
    let lz = build_level0(args.q).map_err(|e| CliError::Config(e.to_string()))?;
    let spec = specialize(&lz, ideal).map_err(|e| CliError::Config(e.to_string()))?;
    let report = defect_report(&spec, args.modulus).map_err(|e| CliError::Config(e.to_string()))?;
    let mut v = report.to_json();
    v["schema"] = json!(SCHEMA);
    v["presentation"] = json!(spec.matrix.to_rows().iter()
        .map(|r| r.iter().map(json::bigint).collect::<Vec<_>>())
        .collect::<Vec<_>>());
    emit(&args.out, &v)?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Build(a) => build(a),
        Command::Verify(a) => verify::run(a).and_then(|(ok, v)| emit(&a.out, &v).map(|_| ok)),
        Command::Theta(a) => theta(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Invariant(msg)) => {
            eprintln!("invariant violated: {msg}");
            ExitCode::from(1)
        }
    }
}
