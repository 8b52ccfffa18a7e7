use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Deserialize;

/// Options shared by every command. Each can also be set in the config file
/// under the same name (dashes become underscores); command-line values win.
#[derive(Debug, Default, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// Host scene: an image file (PGM/PPM/PNG) or `synthetic:NAME`
    #[arg(long, global = true)]
    pub scene: Option<String>,
    /// Watermark image, same syntax as --scene
    #[arg(long, global = true)]
    pub watermark: Option<String>,
    /// Grid side for synthetic scenes
    #[arg(long, global = true)]
    pub size: Option<usize>,
    /// Watermark grid side for synthetic stego watermarks
    #[arg(long, global = true)]
    pub wm_size: Option<usize>,
    /// four-step, three-step, sin-orth, hadamard-diff or random
    #[arg(long, global = true)]
    pub mode: Option<String>,
    /// full, half or lowfreq:p
    #[arg(long, global = true)]
    pub sampling: Option<String>,
    /// Pattern count for random mode
    #[arg(long, global = true)]
    pub patterns: Option<usize>,
    /// Watermark DC offset; repeat for a sweep (or one per channel in color-embed)
    #[arg(long = "dc", global = true, value_delimiter = ',')]
    pub dc_offset: Option<Vec<f64>>,
    /// Detector SNR in dB; omit for noise-free readings
    #[arg(long, global = true)]
    pub snr_db: Option<f64>,
    /// Reference level for the SNR: ac-rms or mean-abs
    #[arg(long, global = true)]
    pub noise_reference: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Seeds per SNR in sweeps
    #[arg(long, global = true)]
    pub repetitions: Option<usize>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub snr_sweep: Option<Vec<f64>>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub q_sweep: Option<Vec<f64>>,
    /// watermark, dewatermark or stego
    #[arg(long, global = true)]
    pub pipeline: Option<String>,
    /// Side of the host-reserved low-frequency block
    #[arg(long, global = true)]
    pub r1_side: Option<usize>,
    /// Seed of the secret host-group shuffle
    #[arg(long, global = true)]
    pub key_seed: Option<u64>,
    /// Confine the watermark to a frequency region: half-u, lowfreq:p or custom:FILE
    #[arg(long, global = true)]
    pub region: Option<String>,
    /// De-watermarking method: divide or filter
    #[arg(long, global = true)]
    pub method: Option<String>,
    /// Filter region for `dewatermark --method filter`
    #[arg(long, global = true)]
    pub filter: Option<String>,
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    #[arg(long, global = true)]
    pub plan: Option<PathBuf>,
    #[arg(long, global = true)]
    pub measurements: Option<PathBuf>,
    #[arg(long, global = true)]
    pub tv: Option<PathBuf>,
    #[arg(long, global = true)]
    pub mapping: Option<PathBuf>,
    /// Reference image for the metric report
    #[arg(long, global = true)]
    pub reference: Option<String>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

macro_rules! overlay {
    ($base:ident, $top:ident, $($f:ident),*) => {
        $(if $top.$f.is_some() { $base.$f = $top.$f; })*
    };
}

impl Options {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// `self` with every option set in `top` replaced.
    pub fn overlay(mut self, top: Options) -> Self {
        overlay!(
            self, top, scene, watermark, size, wm_size, mode, sampling, patterns, dc_offset, snr_db, noise_reference,
            seed, repetitions, snr_sweep, q_sweep, pipeline, r1_side, key_seed, region, method, filter, epsilon, plan,
            measurements, tv, mapping, reference, out
        );
        self
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn size(&self) -> usize {
        self.size.unwrap_or(64)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn dc_offsets(&self) -> Vec<f64> {
        self.dc_offset.clone().unwrap_or_else(|| vec![0.0])
    }

    pub fn seeds(&self) -> Result<Vec<u64>> {
        let reps = self.repetitions.unwrap_or(10);
        if reps == 0 {
            bail!("repetitions must be >= 1");
        }
        Ok((0..reps as u64).map(|i| self.seed() + i).collect())
    }

    pub fn require<'a, T>(value: &'a Option<T>, name: &str) -> Result<&'a T> {
        value.as_ref().with_context(|| format!("missing required option --{name}"))
    }
}
