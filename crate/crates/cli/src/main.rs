//! `adgeom` command-line interface.
//!
//! Every failure prints exactly one JSON line on stderr,
//! `{"error":{"kind":…,"field":…,"message":…}}`, and exits nonzero.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use adgeom::circuits::NoisePlacement;
use adgeom::experiment::{
    run_convergence_with, run_geometry, validate_and_echo, write_convergence, Checkpoint,
    ConfigInput, Preset, DEFAULT_M_HAAR, DEFAULT_SEED,
};
use adgeom::majorization::{haar_reference, HaarReference};
use adgeom::quantum::InitialState;
use adgeom::Error;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "adgeom",
    version,
    about = "Amplitude-damping geometry and noisy random-circuit experiments"
)]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Λ(θ;γ) profiles, sphere maps and the θ_c(γ) sweep.
    Geometry {
        #[arg(long, value_delimiter = ',', default_value = "0.01,0.1,0.2,0.45")]
        gammas: Vec<f64>,
        #[arg(long, default_value_t = 1000)]
        resolution: usize,
        #[arg(long, default_value = "results/geometry")]
        out: PathBuf,
    },
    /// D(t) curves of paired noiseless/noisy random-circuit ensembles.
    Convergence(ConvergenceArgs),
    /// Build a Haar SDL reference and cache it as JSON.
    HaarRef {
        #[arg(long, default_value_t = 6)]
        qubits: usize,
        #[arg(long, default_value_t = DEFAULT_M_HAAR)]
        m_haar: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum InitArg {
    Zeros,
    Ones,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Desk,
    Paper,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlacementArg {
    Idle,
    All,
}

#[derive(clap::Args)]
struct ConvergenceArgs {
    /// JSON config file; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<PresetArg>,
    #[arg(long)]
    qubits: Option<usize>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    ensemble: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    gammas: Option<Vec<f64>>,
    #[arg(long)]
    init: Option<InitArg>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    m_haar: Option<usize>,
    #[arg(long)]
    stride: Option<usize>,
    #[arg(long)]
    noise_placement: Option<PlacementArg>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    /// Reuse (or create) a cached Haar reference at this path.
    #[arg(long)]
    haar_ref: Option<PathBuf>,
    /// Continue from `<out>/checkpoint.json` if it exists.
    #[arg(long)]
    resume: bool,
}

impl ConvergenceArgs {
    fn to_input(&self) -> ConfigInput {
        ConfigInput {
            preset: self.preset.map(|p| match p {
                PresetArg::Desk => Preset::Desk,
                PresetArg::Paper => Preset::Paper,
            }),
            n: self.qubits,
            depth: self.depth,
            ensemble: self.ensemble,
            gammas: self.gammas.clone(),
            init: self.init.map(|i| match i {
                InitArg::Zeros => InitialState::AllZeros,
                InitArg::Ones => InitialState::AllOnes,
            }),
            master_seed: self.seed,
            haar_seed: None,
            m_haar: self.m_haar,
            record_stride: self.stride,
            output_path: self.out.clone(),
            noise_placement: self.noise_placement.map(|p| match p {
                PlacementArg::Idle => NoisePlacement::IdleOnly,
                PlacementArg::All => NoisePlacement::AllQubits,
            }),
        }
    }
}

fn error_line(e: &Error) -> serde_json::Value {
    let (kind, field) = match e {
        Error::Config { field, .. } => ("config", Some(*field)),
        Error::InvalidGamma(_) => ("config", Some("gammas")),
        Error::Io(_) => ("io", None),
        Error::Json(_) => ("json", None),
        Error::Csv(_) => ("csv", None),
        _ => ("computation", None),
    };
    json!({ "error": { "kind": kind, "field": field, "message": e.to_string() } })
}

fn load_reference(path: &Path, d: usize, m_haar: usize, seed: u64) -> Result<HaarReference, Error> {
    if path.exists() {
        let cached: HaarReference = serde_json::from_str(&fs::read_to_string(path)?)?;
        if cached.d == d && cached.m_haar == m_haar && cached.seed == seed {
            return Ok(cached);
        }
    }
    let fresh = haar_reference(d, m_haar, seed)?;
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, serde_json::to_string_pretty(&fresh)?)?;
    Ok(fresh)
}

fn convergence(args: &ConvergenceArgs) -> Result<serde_json::Value, Error> {
    let mut input = ConfigInput::default();
    if let Some(path) = &args.config {
        input = serde_json::from_str(&fs::read_to_string(path)?)?;
    }
    let (cfg, hash) = validate_and_echo(input.overlay(args.to_input()))?;
    let out = PathBuf::from(&cfg.output_path);
    fs::create_dir_all(&out)?;
    let reference = match &args.haar_ref {
        Some(path) => load_reference(path, cfg.dim(), cfg.m_haar, cfg.haar_seed)?,
        None => haar_reference(cfg.dim(), cfg.m_haar, cfg.haar_seed)?,
    };
    let cp_path = out.join("checkpoint.json");
    let resume = if args.resume && cp_path.exists() {
        Some(serde_json::from_str::<Checkpoint>(&fs::read_to_string(
            &cp_path,
        )?)?)
    } else {
        None
    };
    let total_groups = adgeom::experiment::GROUPS.min(cfg.ensemble);
    let result = run_convergence_with(&cfg, reference, resume, |cp| {
        fs::write(&cp_path, serde_json::to_string(cp)?)?;
        eprintln!("group {}/{} done", cp.groups.len(), total_groups);
        Ok(())
    })?;
    let files = write_convergence(&result, &out)?;
    fs::remove_file(&cp_path)?;
    Ok(json!({
        "config": cfg,
        "config_hash": hash,
        "csv": files.csv,
        "json": files.json,
        "wall_time_s": result.wall_time_s,
    }))
}

fn run(cli: Cli) -> Result<serde_json::Value, Error> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::Config {
                field: "threads",
                message: e.to_string(),
            })?;
    }
    match cli.command {
        Command::Geometry {
            gammas,
            resolution,
            out,
        } => {
            let res = run_geometry(&gammas, resolution, Some(&out))?;
            let summary: Vec<_> = res
                .profiles
                .iter()
                .map(|p| {
                    json!({
                        "gamma": p.gamma.gamma(),
                        "theta_c": p.theta_c,
                        "max_lambda": p.max_lambda(),
                    })
                })
                .collect();
            Ok(json!({ "profiles": summary, "files": res.files }))
        }
        Command::Convergence(args) => convergence(&args),
        Command::HaarRef {
            qubits,
            m_haar,
            seed,
            out,
        } => {
            if !(1..=adgeom::experiment::MAX_QUBITS).contains(&qubits) {
                return Err(Error::Config {
                    field: "qubits",
                    message: format!("{qubits} out of range"),
                });
            }
            let r = haar_reference(1 << qubits, m_haar, seed)?;
            if let Some(dir) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(&out, serde_json::to_string_pretty(&r)?)?;
            Ok(json!({ "d": r.d, "m_haar": r.m_haar, "seed": r.seed, "out": out }))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", error_line(&e));
            ExitCode::from(2)
        }
    }
}
