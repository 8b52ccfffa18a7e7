mod commands;
mod config;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use config::Options;

/// Single-pixel imaging with a time-varying weighted light source.
#[derive(Debug, Parser)]
#[command(name = "fspi", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML file with any of the options below
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    options: Options,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Measure a scene and reconstruct it
    Acquire,
    /// Visible watermarking: the watermark's readings drive the source
    Embed,
    /// Remove a visible watermark by division or spectral filtering
    Dewatermark,
    /// Hide a watermark in the high-frequency host readings
    StegoEmbed,
    /// Recover a hidden watermark with the mapping key
    StegoExtract,
    /// Per-channel visible watermarking of a color scene
    ColorEmbed,
    /// Image quality versus detector SNR over several seeds
    SweepNoise,
    /// Fused-image SSIM versus sampling fraction and signal length
    SweepSampling,
}

fn run(cli: Cli) -> Result<()> {
    let base = match &cli.config {
        Some(path) => Options::load(path)?,
        None => Options::default(),
    };
    let opts = base.overlay(cli.options);
    let out = match cli.command {
        Command::Acquire => commands::acquire(&opts)?,
        Command::Embed => commands::embed(&opts)?,
        Command::Dewatermark => commands::dewatermark(&opts)?,
        Command::StegoEmbed => commands::stego_embed(&opts)?,
        Command::StegoExtract => commands::stego_extract(&opts)?,
        Command::ColorEmbed => commands::color_embed(&opts)?,
        Command::SweepNoise => commands::sweep_noise(&opts)?,
        Command::SweepSampling => commands::sweep_sampling(&opts)?,
    };
    for path in &out.written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn one_line(msg: &str) -> String {
    msg.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            let first = e.to_string().lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
            eprintln!("error: usage: {}", one_line(&first));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: run: {}", one_line(&format!("{e:#}")));
            ExitCode::FAILURE
        }
    }
}
