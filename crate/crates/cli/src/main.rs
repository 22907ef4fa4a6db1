use clap::{Parser, Subcommand};
use gamma_interp::cnu::{check_cnu, CnuReport, CnuStatus, GammaData};
use gamma_interp::config::RunConfig;
use gamma_interp::counterexample::generate;
use gamma_interp::eclass::classify;
use gamma_interp::families::{build, FamilySpec};
use gamma_interp::gamma_core::{membership, verify_gamma_inner, GammaMap, GammaPoint};
use gamma_interp::pick::{np_status, solve_extremal, NPData, NPKind, PICK_TOL};
use gamma_interp::spectral::{screen, SpectralNPProblem};
use gamma_interp::suite::{reproduce_examples, SuiteOptions};
use gamma_interp::{Error, C64};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_SUITE_FAILED: u8 = 1;
const EXIT_ERROR: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;

/// Interpolation into the symmetrised bidisc. JSON arguments may be given
/// inline, as a file path, or as "-" for stdin.
#[derive(Parser)]
#[command(name = "gamma-interp", version)]
struct Cli {
    /// RunConfig JSON file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Include full search logs in reports.
    #[arg(long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Points of Γ and rational Γ-inner maps.
    Gamma {
        #[command(subcommand)]
        cmd: GammaCmd,
    },
    /// Scalar Nevanlinna–Pick problems.
    Np {
        #[command(subcommand)]
        cmd: NpCmd,
    },
    /// The Φ-pencil condition C_ν.
    Cnu {
        #[command(subcommand)]
        cmd: CnuCmd,
    },
    /// Data that satisfy C_{ν−1} but not C_ν.
    Counterexample {
        #[arg(long)]
        nu: usize,
        #[arg(long, default_value_t = 0.5)]
        r: f64,
        /// JSON array of ν + 2 nodes, each [re, im].
        #[arg(long)]
        nodes: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// 2×2 spectral Nevanlinna–Pick problems.
    Spectral {
        #[command(subcommand)]
        cmd: SpectralCmd,
    },
    /// The worked-example suite.
    Examples {
        #[command(subcommand)]
        cmd: ExamplesCmd,
    },
}

#[derive(Subcommand)]
enum GammaCmd {
    /// Membership of {"s": [re, im], "p": [re, im]} in G, Γ and its boundaries.
    CheckPoint { point: String },
    /// E-class table of a FamilySpec or {"s": rational, "p": rational}.
    ClassifyMap {
        map: String,
        #[arg(long, default_value_t = 2)]
        nu_max: usize,
        #[arg(long, default_value_t = 6)]
        k_max: usize,
    },
}

#[derive(Subcommand)]
enum NpCmd {
    /// Status of NPData and, when extremal, the unique Blaschke solution.
    Solve { data: String },
}

#[derive(Subcommand)]
enum CnuCmd {
    /// Checks C_ν on GammaData or on the perturbed data of a counterexample report.
    Check {
        data: String,
        #[arg(long)]
        nu: usize,
    },
}

#[derive(Subcommand)]
enum SpectralCmd {
    /// Screens a problem with C_ν; ν defaults to n − 2.
    Screen {
        problem: String,
        #[arg(long)]
        nu: Option<usize>,
    },
}

#[derive(Subcommand)]
enum ExamplesCmd {
    Reproduce {
        #[arg(long)]
        id: Vec<String>,
        #[arg(long)]
        filter: Option<String>,
        /// Replaces every numeric tolerance of the suite.
        #[arg(long)]
        tol: Option<f64>,
    },
}

enum Failure {
    Lib(Error),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<(Value, u8), Failure>;

fn read_json_text(arg: &str) -> Result<String, Failure> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(arg.to_string());
    }
    if arg == "-" {
        return std::io::read_to_string(std::io::stdin()).map_err(|e| Failure::Input(format!("stdin: {e}")));
    }
    std::fs::read_to_string(arg).map_err(|e| Failure::Input(format!("{arg}: {e}")))
}

fn parse<T: DeserializeOwned>(what: &str, text: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::Input(format!("malformed {what} JSON: {e}")))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn load_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(p) => parse::<RunConfig>("config", &read_json_text(&p.to_string_lossy())?)?,
        None => RunConfig::default(),
    };
    cfg.verbose |= cli.verbose;
    cfg.validate()?;
    Ok(cfg)
}

fn cnu_value(mut rep: CnuReport, verbose: bool) -> Value {
    if !verbose {
        rep.search_log.clear();
    }
    to_value(&rep)
}

fn cnu_exit(status: CnuStatus) -> u8 {
    if status == CnuStatus::Inconclusive {
        EXIT_INCONCLUSIVE
    } else {
        0
    }
}

/// GammaData, or the perturbed data of a counterexample report.
fn gamma_data(text: &str) -> Result<GammaData, Failure> {
    let v: Value = parse("data", text)?;
    let v = match v.get("perturbed") {
        Some(p) => p.clone(),
        None => v,
    };
    serde_json::from_value(v).map_err(|e| Failure::Input(format!("malformed GammaData JSON: {e}")))
}

fn gamma_map(text: &str) -> Result<GammaMap, Failure> {
    let v: Value = parse("map", text)?;
    if v.get("name").is_some() {
        let spec: FamilySpec = serde_json::from_value(v).map_err(|e| Failure::Input(format!("malformed FamilySpec JSON: {e}")))?;
        return Ok(build(&spec)?);
    }
    let h: GammaMap = serde_json::from_value(v).map_err(|e| Failure::Input(format!("malformed GammaMap JSON: {e}")))?;
    let chk = verify_gamma_inner(&h, 1e-9);
    if !chk.is_gamma_inner {
        return Err(Error::Precondition(format!("map is not Γ-inner: {}", chk.reason.unwrap_or_default())).into());
    }
    Ok(h)
}

fn run(cli: &Cli) -> Outcome {
    let cfg = load_config(cli)?;
    let verbose = cfg.verbose;
    match &cli.cmd {
        Cmd::Gamma { cmd: GammaCmd::CheckPoint { point } } => {
            let pt: GammaPoint = parse("point", &read_json_text(point)?)?;
            let m = membership(&pt);
            Ok((json!({ "point": pt, "kind": m.kind(), "membership": m }), 0))
        }
        Cmd::Gamma { cmd: GammaCmd::ClassifyMap { map, nu_max, k_max } } => {
            let h = gamma_map(&read_json_text(map)?)?;
            Ok((to_value(&classify(&h, *nu_max, *k_max)?), 0))
        }
        Cmd::Np { cmd: NpCmd::Solve { data } } => {
            let d: NPData = parse("NPData", &read_json_text(data)?)?;
            d.validate()?;
            let status = np_status(&d, PICK_TOL)?;
            let solution = match status.kind {
                NPKind::ExtremallySolvable => Some(solve_extremal(&d, PICK_TOL)?),
                _ => None,
            };
            Ok((json!({ "status": status, "solution": solution }), 0))
        }
        Cmd::Cnu { cmd: CnuCmd::Check { data, nu } } => {
            let d = gamma_data(&read_json_text(data)?)?;
            let rep = check_cnu(&d, *nu, &cfg.search())?;
            let code = cnu_exit(rep.status);
            Ok((cnu_value(rep, verbose), code))
        }
        Cmd::Counterexample { nu, r, nodes, seed, out } => {
            let nodes: Option<Vec<C64>> = nodes.as_deref().map(|n| parse("nodes", n)).transpose()?;
            let mut rep = generate(*nu, *r, nodes, *seed, &cfg)?;
            if !verbose {
                rep.lower_evidence.report.search_log.clear();
            }
            let v = to_value(&rep);
            if let Some(path) = out {
                let text = serde_json::to_string_pretty(&v).expect("value serializes");
                std::fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            }
            Ok((v, 0))
        }
        Cmd::Spectral { cmd: SpectralCmd::Screen { problem, nu } } => {
            let p: SpectralNPProblem = parse("problem", &read_json_text(problem)?)?;
            let rep = screen(&p, *nu, &cfg.search())?;
            let code = cnu_exit(rep.status);
            Ok((cnu_value(rep, verbose), code))
        }
        Cmd::Examples { cmd: ExamplesCmd::Reproduce { id, filter, tol } } => {
            let opts = SuiteOptions { ids: id.clone(), filter: filter.clone(), tol: *tol, run: cfg };
            let rep = reproduce_examples(&opts)?;
            if verbose {
                eprint!("{}", rep.table());
            }
            let code = if rep.all_passed { 0 } else { EXIT_SUITE_FAILED };
            Ok((to_value(&rep), code))
        }
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((v, code)) => {
            emit(&serde_json::to_string_pretty(&v).expect("value serializes"));
            ExitCode::from(code)
        }
        Err(f) => {
            let (kind, msg, code) = match f {
                Failure::Lib(e @ Error::Inconclusive(_)) => ("inconclusive", e.to_string(), EXIT_INCONCLUSIVE),
                Failure::Lib(e) => ("error", e.to_string(), EXIT_ERROR),
                Failure::Input(m) => ("input", m, EXIT_ERROR),
            };
            emit(&json!({ "error": kind, "message": msg }).to_string());
            eprintln!("gamma-interp: {msg}");
            ExitCode::from(code)
        }
    }
}
