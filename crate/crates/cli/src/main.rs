use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use khk_core::catalog::Catalog;
use khk_core::sample::SEED;
use khk_core::{Error, Result};

mod commands;
mod scalar;

use scalar::Scalar;

#[derive(Parser, Debug)]
#[command(name = "khk", version, about = "Exact experiments with Kahan-Hirota-Kimura maps of planar quadratic fields")]
struct Cli {
    /// Load systems from this JSON catalog instead of the built-in one.
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,
    /// Return tolerance for floating period detection.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Sampling seed, in hex.
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Svg,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MapSel {
    Khk,
    Pseudo,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Real type of the level curve `H = h`.
    Classify(LevelArgs),
    /// Rotation number on a level or a basin, with a rationality report.
    Rotation(RotationArgs),
    /// Step sizes making the S1 map globally periodic.
    FindEps(FindEpsArgs),
    /// A level of the example system with the given period.
    FindH(FindHArgs),
    /// Exact or numeric checks of integrals and symmetries.
    Verify(VerifyArgs),
    /// One orbit, exact when every input is a rational literal.
    Orbit(OrbitArgs),
    /// Orbit cloud from a fan of seeds.
    Portrait(PortraitArgs),
    /// Fitted Moebius conjugate on a level curve.
    Moebius(MoebiusArgs),
    /// List the catalog, or show one system.
    Catalog(CatalogArgs),
}

#[derive(Args, Debug)]
pub struct LevelArgs {
    #[arg(long)]
    pub system: String,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Scalar,
    #[arg(long, allow_hyphen_values = true)]
    pub h: Scalar,
}

#[derive(Args, Debug)]
pub struct RotationArgs {
    #[arg(long)]
    pub system: String,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Scalar,
    #[arg(long, allow_hyphen_values = true, conflicts_with = "basin")]
    pub h: Option<Scalar>,
    /// O1, O2 or line_at_infinity.
    #[arg(long)]
    pub basin: Option<String>,
    #[arg(long, value_enum, default_value = "khk")]
    pub map: MapSel,
}

#[derive(Args, Debug)]
pub struct FindEpsArgs {
    #[arg(long)]
    pub system: String,
    #[arg(long)]
    pub period: u64,
}

#[derive(Args, Debug)]
pub struct FindHArgs {
    #[arg(long)]
    pub system: String,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Scalar,
    #[arg(long)]
    pub period: u64,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub system: String,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Scalar,
    /// Comma-separated subset of integral, lie, measure, commute.
    #[arg(long, default_value = "integral,lie,measure,commute")]
    pub checks: String,
    #[arg(long, value_enum, default_value = "khk")]
    pub map: MapSel,
    /// Step of the commuting map.
    #[arg(long, allow_hyphen_values = true, default_value = "1/5")]
    pub delta: Scalar,
}

#[derive(Args, Debug)]
pub struct OrbitArgs {
    #[arg(long)]
    pub system: String,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Scalar,
    #[arg(long, allow_hyphen_values = true)]
    pub x: Scalar,
    #[arg(long, allow_hyphen_values = true)]
    pub y: Scalar,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    #[arg(long, value_enum, default_value = "khk")]
    pub map: MapSel,
}

#[derive(Args, Debug)]
pub struct PortraitArgs {
    #[arg(long)]
    pub system: String,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Scalar,
    #[arg(long, value_enum, default_value = "khk")]
    pub map: MapSel,
    /// Fan origin as `x,y`; defaults to the system's center.
    #[arg(long, allow_hyphen_values = true)]
    pub center: Option<String>,
    #[arg(long, default_value_t = 0.9)]
    pub r_max: f64,
    #[arg(long, default_value_t = 40)]
    pub seeds: usize,
    #[arg(long, default_value_t = 5000)]
    pub iters: usize,
    #[arg(long, default_value_t = 1e6)]
    pub escape: f64,
}

#[derive(Args, Debug)]
pub struct MoebiusArgs {
    #[arg(long)]
    pub system: String,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Scalar,
    #[arg(long, allow_hyphen_values = true)]
    pub h: Scalar,
    #[arg(long, value_enum, default_value = "khk")]
    pub map: MapSel,
}

#[derive(Args, Debug)]
pub struct CatalogArgs {
    #[arg(long)]
    pub system: Option<String>,
}

/// Result of a command in every format it supports.
pub struct Outcome {
    pub text: String,
    pub json: serde_json::Value,
    pub csv: Option<String>,
    pub svg: Option<String>,
    pub default: Option<Format>,
    /// False when a requested check fails.
    pub ok: bool,
}

impl Outcome {
    pub fn new(text: String, json: serde_json::Value) -> Self {
        Outcome { text, json, csv: None, svg: None, default: None, ok: true }
    }

    fn render(self, format: Option<Format>) -> Result<(String, bool)> {
        let missing = |f: &str| Error::Precondition(format!("{f} output is not available for this command"));
        let body = match format.or(self.default) {
            None => self.text,
            Some(Format::Json) => serde_json::to_string_pretty(&self.json).expect("plain data serializes") + "\n",
            Some(Format::Csv) => self.csv.ok_or_else(|| missing("csv"))?,
            Some(Format::Svg) => self.svg.ok_or_else(|| missing("svg"))?,
        };
        Ok((body, self.ok))
    }
}

pub struct Ctx {
    pub catalog: Catalog,
    pub tol: Option<f64>,
    pub seed: u64,
}

fn parse_seed(s: &str) -> Result<u64> {
    let hex = s.trim_start_matches("0x").trim_start_matches("0X");
    u64::from_str_radix(hex, 16).map_err(|_| Error::Domain(format!("seed {s:?} is not a hex number")))
}

fn run(cli: Cli) -> Result<bool> {
    let catalog = match &cli.catalog {
        Some(p) => Catalog::load(p)?,
        None => Catalog::builtin().clone(),
    };
    let seed = cli.seed.as_deref().map(parse_seed).transpose()?.unwrap_or(SEED);
    let ctx = Ctx { catalog, tol: cli.tol, seed };
    let outcome = match cli.cmd {
        Command::Classify(a) => commands::classify(&ctx, a),
        Command::Rotation(a) => commands::rotation(&ctx, a),
        Command::FindEps(a) => commands::find_eps(&ctx, a),
        Command::FindH(a) => commands::find_h(&ctx, a),
        Command::Verify(a) => commands::verify(&ctx, a),
        Command::Orbit(a) => commands::orbit(&ctx, a),
        Command::Portrait(a) => commands::portrait(&ctx, a),
        Command::Moebius(a) => commands::moebius(&ctx, a),
        Command::Catalog(a) => commands::catalog(&ctx, a),
    }?;
    let (body, ok) = outcome.render(cli.format)?;
    match &cli.out {
        Some(p) => std::fs::write(p, body)?,
        None => print!("{body}"),
    }
    Ok(ok)
}

fn json_error(kind: &str, message: &str) -> String {
    serde_json::json!({ "error": kind, "message": message }).to_string()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{}", json_error("usage", e.render().to_string().trim()));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{}", json_error(e.kind(), &e.to_string()));
            ExitCode::from(2)
        }
    }
}
