//! End-to-end pipelines and parameter sweeps.

use crate::dewatermark::{divide_dewatermark, region_watermark_tv, FilterRegion, DEFAULT_EPSILON};
use crate::detector::{apply_noise, measure, MeasurementSequence, NoiseModel, TvSignal};
use crate::error::Result;
use crate::illumination::{build_plan, AcquisitionPlan, Mode, PatternParams, Sampling};
use crate::image::Image;
use crate::metrics::{quality, ssim_default, Normalization};
use crate::recon::{reconstruct_fused, reconstruct_plan};
use crate::stego::{
    build_mask, default_mapping, extract_watermark, reconstruct_watermark, stego_host_reconstruct, stego_weights,
    FrequencyMapping, FrequencyMask, HostRegions,
};
use crate::watermark::watermark_tv;

/// One noise-sweep sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub snr_db: f64,
    pub seed: u64,
    pub psnr_db: f64,
    pub ssim: f64,
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = crate::image::neumaier_sum(values.iter().copied()) / n;
    let var = crate::image::neumaier_sum(values.iter().map(|v| (v - mean) * (v - mean))) / n;
    (mean, var.sqrt())
}

/// `snr_db,seed,psnr_db,ssim` rows.
pub fn rows_to_csv(comment: &str, rows: &[SweepRow]) -> String {
    let mut out = format!("# {comment}\nsnr_db,seed,psnr_db,ssim\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", r.snr_db, r.seed, r.psnr_db, r.ssim));
    }
    out
}

/// Per-SNR `snr_db,psnr_mean,psnr_std,ssim_mean,ssim_std`, in first-seen SNR order.
pub fn summary_csv(comment: &str, rows: &[SweepRow]) -> String {
    let mut out = format!("# {comment}\nsnr_db,psnr_mean,psnr_std,ssim_mean,ssim_std\n");
    for (snr, p, s) in summarize(rows) {
        out.push_str(&format!("{},{},{},{},{}\n", snr, p.0, p.1, s.0, s.1));
    }
    out
}

/// `(snr, (psnr mean, std), (ssim mean, std))` per distinct SNR.
pub fn summarize(rows: &[SweepRow]) -> Vec<(f64, (f64, f64), (f64, f64))> {
    let mut snrs: Vec<f64> = Vec::new();
    for r in rows {
        if !snrs.contains(&r.snr_db) {
            snrs.push(r.snr_db);
        }
    }
    snrs.into_iter()
        .map(|snr| {
            let p: Vec<f64> = rows.iter().filter(|r| r.snr_db == snr).map(|r| r.psnr_db).collect();
            let s: Vec<f64> = rows.iter().filter(|r| r.snr_db == snr).map(|r| r.ssim).collect();
            (snr, mean_std(&p), mean_std(&s))
        })
        .collect()
}

/// Visible watermarking setup shared by the noise experiments.
pub struct VisibleSetup {
    pub plan: AcquisitionPlan,
    pub tv: TvSignal,
    /// Noise-free weighted readings.
    pub clean: MeasurementSequence,
    /// Noise-free fused image.
    pub fused_ref: Image,
    /// Noise-free unweighted host reconstruction.
    pub host_ref: Image,
}

impl VisibleSetup {
    pub fn new(scene: &Image, watermark: &Image, plan: AcquisitionPlan, dc_offset: f64) -> Result<Self> {
        let tv = watermark_tv(watermark, &plan, dc_offset)?;
        let clean = measure(scene, &plan, Some(&tv), &NoiseModel::none())?;
        let fused_ref = reconstruct_fused(&clean, &plan)?;
        let host_ref = reconstruct_plan(&measure(scene, &plan, None, &NoiseModel::none())?, &plan)?;
        Ok(Self { plan, tv, clean, fused_ref, host_ref })
    }

    pub fn noisy(&self, noise: &NoiseModel) -> Result<MeasurementSequence> {
        apply_noise(&self.clean, noise)
    }

    /// Fused image quality against the noise-free fused image.
    pub fn watermark_point(&self, noise: &NoiseModel) -> Result<(f64, f64)> {
        let fused = reconstruct_fused(&self.noisy(noise)?, &self.plan)?;
        quality(&self.fused_ref, &fused)
    }

    /// Divided-out host quality against the noise-free host.
    pub fn dewatermark_point(&self, noise: &NoiseModel) -> Result<(f64, f64)> {
        let clean = divide_dewatermark(&self.noisy(noise)?, &self.tv, DEFAULT_EPSILON)?;
        quality(&self.host_ref, &reconstruct_plan(&clean, &self.plan)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoisePipeline {
    Watermark,
    Dewatermark,
}

/// Runs `pipeline` over every `(snr, seed)` pair.
pub fn visible_noise_sweep(
    setup: &VisibleSetup,
    pipeline: NoisePipeline,
    snrs: &[f64],
    seeds: &[u64],
    base: NoiseModel,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &snr_db in snrs {
        for &seed in seeds {
            let noise = NoiseModel { snr_db, seed, ..base };
            let (psnr_db, ssim) = match pipeline {
                NoisePipeline::Watermark => setup.watermark_point(&noise)?,
                NoisePipeline::Dewatermark => setup.dewatermark_point(&noise)?,
            };
            rows.push(SweepRow { snr_db, seed, psnr_db, ssim });
        }
    }
    Ok(rows)
}

/// SSIM with both images mapped through the reference's range. Truncated
/// reconstructions share the reference's scale, so min-max would only track
/// ringing extremes.
fn scale_ssim(reference: &Image, test: &Image) -> Result<f64> {
    let norm = Normalization::Fixed { lo: reference.min(), hi: reference.max() };
    ssim_default(&norm.apply(reference, 8), &norm.apply(test, 8))
}

/// Fused-image SSIM, against the full-plan fused image, for low-frequency
/// plans at each sampling fraction.
pub fn sampling_sweep(scene: &Image, watermark: &Image, dc_offset: f64, fractions: &[f64]) -> Result<Vec<(f64, f64)>> {
    let params = PatternParams::new(scene.width(), scene.height());
    let full = build_plan(Mode::FourStepSinusoid, params, Sampling::Full)?;
    let reference = VisibleSetup::new(scene, watermark, full, dc_offset)?.fused_ref;
    fractions
        .iter()
        .map(|&p| {
            let plan = build_plan(Mode::FourStepSinusoid, params, Sampling::LowFrequency(p))?;
            let fused = VisibleSetup::new(scene, watermark, plan, dc_offset)?.fused_ref;
            Ok((p, scale_ssim(&reference, &fused)?))
        })
        .collect()
}

/// Fused-image SSIM when the watermark weights cover only the lowest
/// `q` fraction of frequencies (constant weight elsewhere), against the
/// full-length signal.
pub fn tv_length_sweep(scene: &Image, watermark: &Image, dc_offset: f64, fractions: &[f64]) -> Result<Vec<(f64, f64)>> {
    let params = PatternParams::new(scene.width(), scene.height());
    let plan = build_plan(Mode::FourStepSinusoid, params, Sampling::Full)?;
    let reference = VisibleSetup::new(scene, watermark, plan.clone(), dc_offset)?.fused_ref;
    fractions
        .iter()
        .map(|&q| {
            let region = FilterRegion::low_frequency(params.width, params.height, q)?;
            let tv = region_watermark_tv(watermark, &plan, dc_offset, &region)?;
            let fused = reconstruct_fused(&measure(scene, &plan, Some(&tv), &NoiseModel::none())?, &plan)?;
            Ok((q, scale_ssim(&reference, &fused)?))
        })
        .collect()
}

/// `fraction,ssim` rows.
pub fn fraction_csv(comment: &str, column: &str, rows: &[(f64, f64)]) -> String {
    let mut out = format!("# {comment}\n{column},ssim\n");
    for (f, s) in rows {
        out.push_str(&format!("{f},{s}\n"));
    }
    out
}

/// Steganography embedding shared by the stego experiments.
pub struct StegoSetup {
    pub mask: FrequencyMask,
    pub mapping: FrequencyMapping,
    pub plan: AcquisitionPlan,
    pub tv: TvSignal,
    pub clean: MeasurementSequence,
}

#[derive(Debug, Clone)]
pub struct StegoOutcome {
    pub host: Image,
    pub host_r1_only: Image,
    pub watermark: Image,
}

impl StegoSetup {
    pub fn new(host: &Image, watermark: &Image, r1_side: usize, key_seed: Option<u64>) -> Result<Self> {
        let (w, h) = (host.width(), host.height());
        let mask = build_mask(w, h, r1_side)?;
        let plan = build_plan(Mode::FourStepSinusoid, PatternParams::new(w, h), Sampling::Full)?;
        let mapping = default_mapping(&mask, watermark.width(), watermark.height(), key_seed)?;
        let tv = stego_weights(watermark, &mapping, &plan)?;
        let mapping = mapping.with_norm(tv.norm);
        let clean = measure(host, &plan, Some(&tv), &NoiseModel::none())?;
        Ok(Self { mask, mapping, plan, tv, clean })
    }

    /// Reconstructs host and watermark from `readings`, extracting with
    /// `mapping` (the receiver's key).
    pub fn decode(&self, readings: &MeasurementSequence, mapping: &FrequencyMapping) -> Result<StegoOutcome> {
        Ok(StegoOutcome {
            host: stego_host_reconstruct(readings, &self.plan, &self.mask, HostRegions::AllRegions)?,
            host_r1_only: stego_host_reconstruct(readings, &self.plan, &self.mask, HostRegions::R1Only)?,
            watermark: reconstruct_watermark(&extract_watermark(readings, mapping, &self.plan, None)?),
        })
    }

    pub fn decode_clean(&self) -> Result<StegoOutcome> {
        self.decode(&self.clean, &self.mapping)
    }

    pub fn decode_noisy(&self, noise: &NoiseModel) -> Result<StegoOutcome> {
        self.decode(&apply_noise(&self.clean, noise)?, &self.mapping)
    }
}

/// Host and watermark SSIM (each against its noise-free decode) per SNR,
/// averaged over seeds: `(snr, host_ssim, watermark_ssim)`.
pub fn stego_noise_sweep(
    setup: &StegoSetup,
    snrs: &[f64],
    seeds: &[u64],
    base: NoiseModel,
) -> Result<Vec<(f64, f64, f64)>> {
    let reference = setup.decode_clean()?;
    snrs.iter()
        .map(|&snr_db| {
            let mut hs = Vec::new();
            let mut ws = Vec::new();
            for &seed in seeds {
                let out = setup.decode_noisy(&NoiseModel { snr_db, seed, ..base })?;
                hs.push(quality(&reference.host, &out.host)?.1);
                ws.push(quality(&reference.watermark, &out.watermark)?.1);
            }
            Ok((snr_db, mean_std(&hs).0, mean_std(&ws).0))
        })
        .collect()
}
