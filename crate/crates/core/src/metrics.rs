//! Image-quality and signal metrics.

use serde::Serialize;

use crate::error::{dims, FspiError, Result};
use crate::image::{neumaier_sum, Image};

pub const DEFAULT_BIT_DEPTH: u32 = 8;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;

fn check_pair(x: &Image, y: &Image) -> Result<()> {
    if !x.same_dims(y) {
        return Err(FspiError::DimensionMismatch {
            expected: dims(x.width(), x.height()),
            got: dims(y.width(), y.height()),
        });
    }
    if x.is_empty() {
        return Err(FspiError::InvalidArgument("empty image".into()));
    }
    Ok(())
}

/// Mean squared difference.
pub fn mse(x: &Image, y: &Image) -> Result<f64> {
    check_pair(x, y)?;
    let s = neumaier_sum(x.data().iter().zip(y.data()).map(|(a, b)| (a - b) * (a - b)));
    Ok(s / x.len() as f64)
}

/// `10 log10(peak^2 / mse)` with `peak = 2^n - 1`; `+inf` when `mse == 0`.
pub fn psnr_from_mse(mse: f64, bit_depth: u32) -> f64 {
    if mse == 0.0 {
        return f64::INFINITY;
    }
    let peak = ((1u64 << bit_depth) - 1) as f64;
    10.0 * (peak * peak / mse).log10()
}

/// PSNR of images already on the `[0, 2^n - 1]` scale.
pub fn psnr(x: &Image, y: &Image, bit_depth: u32) -> Result<f64> {
    Ok(psnr_from_mse(mse(x, y)?, bit_depth))
}

/// Single-window SSIM over the whole image.
pub fn ssim(x: &Image, y: &Image, c1: f64, c2: f64) -> Result<f64> {
    check_pair(x, y)?;
    let n = x.len() as f64;
    let mx = x.mean();
    let my = y.mean();
    let vx = neumaier_sum(x.data().iter().map(|a| (a - mx) * (a - mx))) / n;
    let vy = neumaier_sum(y.data().iter().map(|b| (b - my) * (b - my))) / n;
    let cov = neumaier_sum(x.data().iter().zip(y.data()).map(|(a, b)| (a - mx) * (b - my))) / n;
    Ok(((2.0 * mx * my + c1) * (2.0 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2)))
}

/// Stability constants `((k1 L)^2, (k2 L)^2)` for dynamic range `L`.
pub fn ssim_constants(bit_depth: u32) -> (f64, f64) {
    let l = ((1u64 << bit_depth) - 1) as f64;
    ((SSIM_K1 * l).powi(2), (SSIM_K2 * l).powi(2))
}

/// SSIM with the default constants for 8-bit images.
pub fn ssim_default(x: &Image, y: &Image) -> Result<f64> {
    let (c1, c2) = ssim_constants(DEFAULT_BIT_DEPTH);
    ssim(x, y, c1, c2)
}

/// `20 log10(mean|s| / sigma)`; `+inf` for zero sigma.
pub fn snr_db(signal: &[f64], noise_sigma: f64) -> Result<f64> {
    if signal.is_empty() {
        return Err(FspiError::EmptySequence);
    }
    if noise_sigma == 0.0 {
        return Ok(f64::INFINITY);
    }
    let vs = neumaier_sum(signal.iter().map(|v| v.abs())) / signal.len() as f64;
    Ok(20.0 * (vs / noise_sigma).log10())
}

/// How images are mapped onto the metric range before comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Normalization {
    /// Each image independently min-max scaled to `[0, 2^n - 1]`.
    MinMax,
    /// Values in `[lo, hi]` mapped linearly to `[0, 2^n - 1]`.
    Fixed { lo: f64, hi: f64 },
}

impl Normalization {
    pub fn apply(&self, img: &Image, bit_depth: u32) -> Image {
        let peak = ((1u64 << bit_depth) - 1) as f64;
        match *self {
            Normalization::MinMax => img.normalized().scale(peak),
            Normalization::Fixed { lo, hi } => img.map(|v| (v - lo) / (hi - lo) * peak),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Normalization::MinMax => "min-max".to_string(),
            Normalization::Fixed { lo, hi } => format!("fixed:{lo}:{hi}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricOptions {
    pub bit_depth: u32,
    pub normalization: Normalization,
    pub c1: f64,
    pub c2: f64,
}

impl Default for MetricOptions {
    fn default() -> Self {
        let (c1, c2) = ssim_constants(DEFAULT_BIT_DEPTH);
        Self { bit_depth: DEFAULT_BIT_DEPTH, normalization: Normalization::MinMax, c1, c2 }
    }
}

/// One reference/test comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub reference_id: String,
    pub test_id: String,
    #[serde(serialize_with = "finite_or_inf")]
    pub psnr_db: f64,
    pub ssim: f64,
    pub mse: f64,
    pub normalization: String,
    pub bit_depth: u32,
}

fn finite_or_inf<S: serde::Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
    }
}

impl MetricReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Normalizes both images per `opts`, then computes MSE, PSNR and SSIM.
pub fn compare(
    reference: &Image,
    test: &Image,
    reference_id: &str,
    test_id: &str,
    opts: &MetricOptions,
) -> Result<MetricReport> {
    check_pair(reference, test)?;
    let x = opts.normalization.apply(reference, opts.bit_depth);
    let y = opts.normalization.apply(test, opts.bit_depth);
    let m = mse(&x, &y)?;
    Ok(MetricReport {
        reference_id: reference_id.to_string(),
        test_id: test_id.to_string(),
        psnr_db: psnr_from_mse(m, opts.bit_depth),
        ssim: ssim(&x, &y, opts.c1, opts.c2)?,
        mse: m,
        normalization: opts.normalization.describe(),
        bit_depth: opts.bit_depth,
    })
}

/// `(psnr, ssim)` after default min-max normalization.
pub fn quality(reference: &Image, test: &Image) -> Result<(f64, f64)> {
    let r = compare(reference, test, "", "", &MetricOptions::default())?;
    Ok((r.psnr_db, r.ssim))
}

/// Pearson correlation coefficient of two images.
pub fn correlation(x: &Image, y: &Image) -> Result<f64> {
    check_pair(x, y)?;
    let mx = x.mean();
    let my = y.mean();
    let cov = neumaier_sum(x.data().iter().zip(y.data()).map(|(a, b)| (a - mx) * (b - my)));
    let vx = neumaier_sum(x.data().iter().map(|a| (a - mx) * (a - mx)));
    let vy = neumaier_sum(y.data().iter().map(|b| (b - my) * (b - my)));
    if vx == 0.0 || vy == 0.0 {
        return Ok(0.0);
    }
    Ok(cov / (vx * vy).sqrt())
}
