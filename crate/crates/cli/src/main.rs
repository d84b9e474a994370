mod commands;
mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use sblab_core::fockoracle::Profile;

use commands::{Artifact, Context, Format};
use config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "sblab", version, about = "Resonance, scattering and Fock-space oracle runs for the massive spin-boson model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Level shift and resonance parameters.
    Resonance(CommonArgs),
    /// Survival amplitude, analytic and (with a profile) oracle.
    Survival(CommonArgs),
    /// Lorentzian transition matrix, optionally against the oracle.
    Tmatrix(CommonArgs),
    /// On-shell kernel profile over a momentum grid.
    Kernel(CommonArgs),
    /// Ground-state energy over a coupling sweep.
    Groundstate(CommonArgs),
    /// Mourre constant and weighted resolvent sweep.
    Mourre(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, value_enum)]
    profile: Option<ProfileArg>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProfileArg {
    Static,
    Dynamic,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug)]
pub enum CliError {
    Config { message: String, pointer: Option<String> },
    Numeric(sblab_core::Error),
    Io(String),
}

impl From<sblab_core::Error> for CliError {
    fn from(e: sblab_core::Error) -> Self {
        CliError::Numeric(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Numeric(_) | CliError::Io(_) => 3,
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            CliError::Config { message, pointer } => {
                json!({ "error": { "kind": "config", "message": message, "pointer": pointer } })
            }
            CliError::Numeric(e) => json!({ "error": { "kind": "numeric", "message": e.to_string() } }),
            CliError::Io(m) => json!({ "error": { "kind": "io", "message": m } }),
        }
    }
}

fn load_config(path: &Path) -> Result<(RunConfig, String), CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Config { message: format!("cannot read {}: {e}", path.display()), pointer: None })?;
    let hash = output::sha256_hex(&bytes);
    let mut de = serde_json::Deserializer::from_slice(&bytes);
    let config: RunConfig = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let pointer: String = e
            .path()
            .iter()
            .filter_map(|seg| match seg {
                serde_path_to_error::Segment::Seq { index } => Some(format!("/{index}")),
                serde_path_to_error::Segment::Map { key } => Some(format!("/{key}")),
                serde_path_to_error::Segment::Enum { variant } => Some(format!("/{variant}")),
                serde_path_to_error::Segment::Unknown => None,
            })
            .collect();
        CliError::Config { message: e.inner().to_string(), pointer: Some(pointer) }
    })?;
    de.end().map_err(|e| CliError::Config { message: e.to_string(), pointer: None })?;
    Ok((config, hash))
}

fn configure_threads() {
    if let Some(n) = std::env::var("SBLAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (args, cmd): (&CommonArgs, fn(&Context) -> Result<Artifact, CliError>) = match &cli.command {
        Command::Resonance(a) => (a, commands::resonance),
        Command::Survival(a) => (a, commands::survival),
        Command::Tmatrix(a) => (a, commands::tmatrix),
        Command::Kernel(a) => (a, commands::kernel),
        Command::Groundstate(a) => (a, commands::groundstate),
        Command::Mourre(a) => (a, commands::mourre),
    };
    let (config, hash) = load_config(&args.config)?;
    let params = commands::validate_params(&config)?;
    let quad = config.quadrature.build();
    quad.validate().map_err(|e| CliError::Config { message: e.to_string(), pointer: Some("/quadrature".into()) })?;
    let profile = match args.profile {
        Some(ProfileArg::Static) => Some(Profile::Static),
        Some(ProfileArg::Dynamic) => Some(Profile::Dynamic),
        None => config.profile,
    };
    let ctx = Context { config, params, quad, profile };
    let art = cmd(&ctx)?;
    let format = match args.format {
        Some(FormatArg::Csv) => Format::Csv,
        Some(FormatArg::Json) => Format::Json,
        None => art.default_format,
    };
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    let (file, body) = match format {
        Format::Csv => (format!("{}.csv", art.name), art.table.to_csv(&hash)),
        Format::Json => {
            let mut doc = json!({ "config_sha256": hash, "command": art.name });
            doc.as_object_mut().expect("object").extend(art.json.as_object().cloned().unwrap_or_default());
            (format!("{}.json", art.name), output::pretty(&doc))
        }
    };
    let written = output::write_atomic(&args.out, &file, &body).map_err(io)?;
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let manifest = json!({
        "command": art.name,
        "config_sha256": hash,
        "config_path": args.config.display().to_string(),
        "result": file,
        "created_unix": stamp,
        "version": env!("CARGO_PKG_VERSION"),
        "threads": rayon::current_num_threads(),
        "oracle": art.manifest,
    });
    output::write_atomic(&args.out, &format!("{}.manifest.json", art.name), &output::pretty(&manifest)).map_err(io)?;
    println!("{}", written.display());
    Ok(())
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
