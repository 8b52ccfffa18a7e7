//! Visible watermarking through the light-source weights.
//!
//! The watermark's own single-pixel readings `W_i = sum (R_W + dc) P_i`,
//! divided by their maximum, become the per-pattern source weights. For a
//! four-step group this turns the host coefficient into
//! `C' = (K2 C + K1 C_W) / 2`, so the reconstruction is the superposition
//! `(K2/2) R_hat + (K1/2) R_W_hat` with `K1 = 2a sum R`, `K2 = 2a sum (R_W + dc)`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::detector::{measure, measure_with, MeasurementSequence, NoiseModel, TvSignal};
use crate::error::{FspiError, Result};
use crate::illumination::{AcquisitionPlan, Illuminator, PatternParams};
use crate::image::{ColorImage, Image};
use crate::recon::{reconstruct_fused, reconstruct_plan};

fn offset_watermark(watermark: &Image, dc_offset: f64) -> Result<Image> {
    if !(dc_offset >= 0.0) || !dc_offset.is_finite() {
        return Err(FspiError::InvalidArgument(format!("dc_offset must be >= 0, got {dc_offset}")));
    }
    let shifted = watermark.offset(dc_offset);
    if shifted.data().iter().any(|v| !(*v >= 0.0)) {
        return Err(FspiError::InvalidArgument("watermark + dc_offset must be nonnegative".into()));
    }
    if shifted.data().iter().all(|&v| v == 0.0) {
        return Err(FspiError::ZeroWatermark);
    }
    Ok(shifted)
}

/// Raw (unnormalized) watermark readings for every plan entry.
pub fn watermark_coefficients(watermark: &Image, plan: &AcquisitionPlan, dc_offset: f64) -> Result<Vec<f64>> {
    let shifted = offset_watermark(watermark, dc_offset)?;
    Ok(measure(&shifted, plan, None, &NoiseModel::none())?.values)
}

/// Normalized weights carrying `watermark` (pixel values in `[0, 1]`).
pub fn watermark_tv(watermark: &Image, plan: &AcquisitionPlan, dc_offset: f64) -> Result<TvSignal> {
    let raw = watermark_coefficients(watermark, plan, dc_offset)?;
    let norm = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(norm > 0.0) {
        return Err(FspiError::ZeroWatermark);
    }
    let k2_raw = 2.0 * plan.params.a * watermark.offset(dc_offset).sum();
    Ok(TvSignal { weights: raw.iter().map(|w| w / norm).collect(), k2: k2_raw / norm, dc_offset, norm })
}

/// `Q = K1 / K2` from unnormalized sums.
pub fn q_factor(scene: &Image, watermark: &Image, dc_offset: f64, params: &PatternParams) -> Result<f64> {
    let k1 = 2.0 * params.a * scene.sum();
    let k2 = 2.0 * params.a * watermark.offset(dc_offset).sum();
    if k2 == 0.0 {
        return Err(FspiError::ZeroWatermark);
    }
    Ok(k1 / k2)
}

/// `(K2/2) host_recon + (K1/2) watermark_recon`.
pub fn fuse_predict(host_recon: &Image, watermark_recon: &Image, k1: f64, k2: f64) -> Result<Image> {
    host_recon.combine(k2 / 2.0, watermark_recon, k1 / 2.0)
}

/// Noise-free reconstruction of the offset watermark as carried by `tv`,
/// i.e. the image whose spectrum is `C_W / norm`.
pub fn carried_watermark_recon(watermark: &Image, plan: &AcquisitionPlan, tv: &TvSignal) -> Result<Image> {
    let shifted = offset_watermark(watermark, tv.dc_offset)?;
    let seq = measure(&shifted, plan, None, &NoiseModel::none())?;
    Ok(reconstruct_plan(&seq, plan)?.scale(1.0 / tv.norm))
}

/// Seeded pixel permutation. Expansion is a Fisher-Yates shuffle of
/// `0..size` driven by `ChaCha8Rng::seed_from_u64(seed)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PermutationKey {
    pub seed: u64,
    pub size: usize,
}

impl PermutationKey {
    pub fn new(seed: u64, size: usize) -> Self {
        Self { seed, size }
    }

    /// `perm[i]` is the destination of source pixel `i`.
    pub fn permutation(&self) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..self.size).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(self.seed));
        perm
    }

    fn check(&self, img: &Image) -> Result<()> {
        if img.len() != self.size {
            return Err(FspiError::LengthMismatch { expected: self.size, got: img.len() });
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        format!("seed,size\n{},{}\n", self.seed, self.size)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line == "seed,size" {
                continue;
            }
            let err = |message: &str| FspiError::Parse { line: n + 1, message: message.into() };
            let (s, z) = line.split_once(',').ok_or_else(|| err("expected `seed,size`"))?;
            return Ok(Self {
                seed: s.trim().parse().map_err(|_| err("bad seed"))?,
                size: z.trim().parse().map_err(|_| err("bad size"))?,
            });
        }
        Err(FspiError::Parse { line: 1, message: "empty key file".into() })
    }
}

pub fn scramble(img: &Image, key: &PermutationKey) -> Result<Image> {
    key.check(img)?;
    let mut out = vec![0.0; img.len()];
    for (src, dst) in key.permutation().into_iter().enumerate() {
        out[dst] = img.data()[src];
    }
    Image::new(img.width(), img.height(), out)
}

pub fn unscramble(img: &Image, key: &PermutationKey) -> Result<Image> {
    key.check(img)?;
    let mut out = vec![0.0; img.len()];
    for (src, dst) in key.permutation().into_iter().enumerate() {
        out[src] = img.data()[dst];
    }
    Image::new(img.width(), img.height(), out)
}

/// Everything produced by one single-channel embedding run.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub tv: TvSignal,
    pub readings: MeasurementSequence,
    pub fused: Image,
}

/// Weights from `watermark`, weighted (and optionally noisy) acquisition of
/// `scene`, reconstruction.
pub fn embed(
    scene: &Image,
    watermark: &Image,
    plan: &AcquisitionPlan,
    dc_offset: f64,
    noise: &NoiseModel,
) -> Result<Embedding> {
    let tv = watermark_tv(watermark, plan, dc_offset)?;
    let illuminator = Illuminator::for_plan(plan)?;
    let readings = measure_with(&illuminator, scene, plan, Some(&tv), noise)?;
    let fused = reconstruct_fused(&readings, plan)?;
    Ok(Embedding { tv, readings, fused })
}

/// Runs [`embed`] per RGB channel. Channel `c` uses noise seed `seed + c`.
pub fn embed_color(
    scene: &ColorImage,
    watermark: &ColorImage,
    plan: &AcquisitionPlan,
    dc_offsets: [f64; 3],
    noise: &NoiseModel,
) -> Result<ColorImage> {
    let mut fused = Vec::with_capacity(3);
    for c in 0..3 {
        let mut channel_noise = *noise;
        channel_noise.seed = noise.seed.wrapping_add(c as u64);
        fused.push(embed(&scene.channels[c], &watermark.channels[c], plan, dc_offsets[c], &channel_noise)?.fused);
    }
    let [r, g, b]: [Image; 3] = fused.try_into().expect("three channels");
    ColorImage::new(r, g, b)
}

/// Mean over `support` minus mean over its complement.
pub fn region_contrast(img: &Image, support: &[bool]) -> Result<f64> {
    if support.len() != img.len() {
        return Err(FspiError::LengthMismatch { expected: img.len(), got: support.len() });
    }
    let (mut s_in, mut n_in, mut s_out, mut n_out) = (0.0, 0usize, 0.0, 0usize);
    for (&v, &m) in img.data().iter().zip(support) {
        if m {
            s_in += v;
            n_in += 1;
        } else {
            s_out += v;
            n_out += 1;
        }
    }
    if n_in == 0 || n_out == 0 {
        return Err(FspiError::InvalidArgument("support must be a proper subset".into()));
    }
    Ok(s_in / n_in as f64 - s_out / n_out as f64)
}
