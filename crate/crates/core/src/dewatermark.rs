//! Receiver-side watermark removal.

use crate::detector::{MeasurementSequence, TvSignal};
use crate::error::{dims, FspiError, Result};
use crate::illumination::{conjugate, frequencies_by_distance, is_self_conjugate, AcquisitionPlan};
use crate::image::Image;
use crate::recon::SpectrumGrid;
use crate::watermark::watermark_coefficients;

/// Floor applied to weights before division.
pub const DEFAULT_EPSILON: f64 = 1e-6;

/// Divides every reading by its source weight, floored at `epsilon`.
pub fn divide_dewatermark(seq: &MeasurementSequence, tv: &TvSignal, epsilon: f64) -> Result<MeasurementSequence> {
    if !(epsilon > 0.0) {
        return Err(FspiError::InvalidArgument(format!("epsilon must be > 0, got {epsilon}")));
    }
    if seq.len() != tv.len() {
        return Err(FspiError::LengthMismatch { expected: seq.len(), got: tv.len() });
    }
    let mut out = seq.clone();
    for (v, w) in out.values.iter_mut().zip(&tv.weights) {
        *v /= w.max(epsilon);
    }
    Ok(out)
}

/// Frequencies to erase (`true`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterRegion {
    pub width: usize,
    pub height: usize,
    pub mask: Vec<bool>,
    /// Whether `f` in the region implies `-f` in the region. A region that is
    /// not closed must be applied before symmetry completion.
    pub conjugate_closed: bool,
}

impl FilterRegion {
    pub fn from_mask(width: usize, height: usize, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != width * height {
            return Err(FspiError::LengthMismatch { expected: width * height, got: mask.len() });
        }
        let conjugate_closed = (0..height).all(|v| {
            (0..width).all(|u| {
                let (cu, cv) = conjugate(u, v, width, height);
                mask[v * width + u] == mask[cv * width + cu]
            })
        });
        Ok(Self { width, height, mask, conjugate_closed })
    }

    pub fn empty(width: usize, height: usize) -> Self {
        Self { width, height, mask: vec![false; width * height], conjugate_closed: true }
    }

    /// `0 < u < W/2`, excluding self-conjugate frequencies. Its conjugate
    /// half carries no watermark.
    pub fn half_u(width: usize, height: usize) -> Self {
        let mask = (0..height)
            .flat_map(|v| (0..width).map(move |u| (u, v)))
            .map(|(u, v)| u > 0 && 2 * u < width && !is_self_conjugate(u, v, width, height))
            .collect();
        Self { width, height, mask, conjugate_closed: false }
    }

    /// The `round(p W H)` frequencies nearest DC.
    pub fn low_frequency(width: usize, height: usize, fraction: f64) -> Result<Self> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(FspiError::InvalidArgument(format!("fraction must be in (0, 1], got {fraction}")));
        }
        let count = (fraction * (width * height) as f64).round() as usize;
        let mut mask = vec![false; width * height];
        for (u, v) in frequencies_by_distance(width, height).into_iter().take(count) {
            mask[v * width + u] = true;
        }
        Self::from_mask(width, height, mask)
    }

    /// `half-u` or `lowfreq:p`.
    pub fn preset(name: &str, width: usize, height: usize) -> Result<Self> {
        if name == "half-u" {
            return Ok(Self::half_u(width, height));
        }
        if let Some(p) = name.strip_prefix("lowfreq:") {
            let p: f64 = p.parse().map_err(|_| FspiError::InvalidArgument(format!("bad fraction `{p}`")))?;
            return Self::low_frequency(width, height, p);
        }
        Err(FspiError::InvalidArgument(format!("unknown filter preset `{name}`")))
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.mask[v * self.width + u]
    }

    /// Header line, then alternating run lengths starting with a `false` run.
    pub fn to_rle(&self) -> String {
        let mut runs = Vec::new();
        let mut current = false;
        let mut n = 0usize;
        for &m in &self.mask {
            if m == current {
                n += 1;
            } else {
                runs.push(n.to_string());
                current = m;
                n = 1;
            }
        }
        runs.push(n.to_string());
        format!(
            "# fspi-region v1 width={} height={} closed={}\n{}\n",
            self.width,
            self.height,
            self.conjugate_closed,
            runs.join(" ")
        )
    }

    pub fn from_rle(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(FspiError::Parse { line: 1, message: "empty region file".into() })?;
        let header = header
            .trim()
            .strip_prefix("# fspi-region v1")
            .ok_or(FspiError::Parse { line: 1, message: "missing `# fspi-region v1` header".into() })?;
        let (mut w, mut h) = (0usize, 0usize);
        for tok in header.split_whitespace() {
            match tok.split_once('=') {
                Some(("width", v)) => w = v.parse().unwrap_or(0),
                Some(("height", v)) => h = v.parse().unwrap_or(0),
                _ => {}
            }
        }
        if w == 0 || h == 0 {
            return Err(FspiError::Parse { line: 1, message: "missing dimensions".into() });
        }
        let mut mask = Vec::with_capacity(w * h);
        let mut value = false;
        for (n, line) in lines {
            for tok in line.split_whitespace() {
                let run: usize =
                    tok.parse().map_err(|_| FspiError::Parse { line: n + 1, message: format!("bad run `{tok}`") })?;
                mask.extend(std::iter::repeat_n(value, run));
                value = !value;
            }
        }
        if mask.len() != w * h {
            return Err(FspiError::Parse {
                line: 2,
                message: format!("runs cover {} cells, expected {}", mask.len(), w * h),
            });
        }
        Self::from_mask(w, h, mask)
    }
}

/// Zeroes (and marks unknown) every coefficient inside `region`.
pub fn filter_dewatermark(spec: &SpectrumGrid, region: &FilterRegion) -> Result<SpectrumGrid> {
    if spec.width() != region.width || spec.height() != region.height {
        return Err(FspiError::DimensionMismatch {
            expected: dims(spec.width(), spec.height()),
            got: dims(region.width, region.height),
        });
    }
    let keep: Vec<bool> = region.mask.iter().map(|m| !m).collect();
    spec.masked(&keep)
}

/// Watermark weights confined to `region`; every other entry carries the
/// constant `K2/2`, which scales the host coefficient exactly as the
/// watermarked entries do.
pub fn region_watermark_tv(
    watermark: &Image,
    plan: &AcquisitionPlan,
    dc_offset: f64,
    region: &FilterRegion,
) -> Result<TvSignal> {
    if region.width != plan.params.width || region.height != plan.params.height {
        return Err(FspiError::DimensionMismatch {
            expected: dims(plan.params.width, plan.params.height),
            got: dims(region.width, region.height),
        });
    }
    let raw = watermark_coefficients(watermark, plan, dc_offset)?;
    let k2_raw = 2.0 * plan.params.a * watermark.offset(dc_offset).sum();
    let norm = plan
        .entries
        .iter()
        .zip(&raw)
        .filter(|(e, _)| region.contains(e.u, e.v))
        .map(|(_, &w)| w)
        .fold(k2_raw / 2.0, f64::max);
    if !(norm > 0.0) {
        return Err(FspiError::ZeroWatermark);
    }
    let weights = plan
        .entries
        .iter()
        .zip(&raw)
        .map(|(e, &w)| if region.contains(e.u, e.v) { w / norm } else { k2_raw / 2.0 / norm })
        .collect();
    Ok(TvSignal { weights, k2: k2_raw / norm, dc_offset, norm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detector::{measure, NoiseModel};
    use crate::illumination::{build_plan, Mode, PatternParams, Sampling};
    use crate::metrics::ssim_default;
    use crate::recon::{assemble_spectrum, complete_symmetry, reconstruct};
    use crate::watermark::{embed, watermark_tv};

    fn scene(w: usize, h: usize) -> Image {
        Image::from_fn(w, h, |x, y| 0.3 + 0.5 * ((x as f64 * 0.7).sin() * (y as f64 * 0.4).cos()).abs())
    }

    fn mark(w: usize, h: usize) -> Image {
        Image::from_fn(w, h, |x, y| if x > w / 3 && y % 4 < 2 { 1.0 } else { 0.0 })
    }

    fn host_recon(s: &Image, p: &AcquisitionPlan) -> Image {
        reconstruct(&complete_symmetry(&assemble_spectrum(&measure(s, p, None, &NoiseModel::none()).unwrap(), p).unwrap()))
    }

    #[test]
    fn division_inverts_embedding() {
        let p = build_plan(Mode::FourStepSinusoid, PatternParams::new(8, 8), Sampling::Full).unwrap();
        let s = scene(8, 8);
        let e = embed(&s, &mark(8, 8), &p, 0.0, &NoiseModel::none()).unwrap();
        let clean = divide_dewatermark(&e.readings, &e.tv, DEFAULT_EPSILON).unwrap();
        let rec = reconstruct(&assemble_spectrum(&clean, &p).unwrap());
        let host = host_recon(&s, &p);
        let rec_n = rec.normalized();
        assert!(rec_n.max_abs_diff(&host.normalized()) < 1e-6);
    }

    #[test]
    fn unit_weights_leave_sequence() {
        let p = build_plan(Mode::FourStepSinusoid, PatternParams::new(4, 4), Sampling::Full).unwrap();
        let seq = measure(&scene(4, 4), &p, None, &NoiseModel::none()).unwrap();
        assert_eq!(divide_dewatermark(&seq, &TvSignal::unit(p.len()), 1e-6).unwrap(), seq);
        assert!(divide_dewatermark(&seq, &TvSignal::unit(p.len()), 0.0).is_err());
        assert!(divide_dewatermark(&seq, &TvSignal::unit(3), 1e-6).is_err());
    }

    #[test]
    fn empty_region_is_identity() {
        let p = build_plan(Mode::FourStepSinusoid, PatternParams::new(4, 4), Sampling::Full).unwrap();
        let spec = assemble_spectrum(&measure(&scene(4, 4), &p, None, &NoiseModel::none()).unwrap(), &p).unwrap();
        assert_eq!(filter_dewatermark(&spec, &FilterRegion::empty(4, 4)).unwrap(), spec);
        assert!(filter_dewatermark(&spec, &FilterRegion::empty(5, 4)).is_err());
    }

    #[test]
    fn half_u_filter_removes_watermark_exactly() {
        for (w, h) in [(16, 16), (9, 8)] {
            let p = build_plan(Mode::FourStepSinusoid, PatternParams::new(w, h), Sampling::Full).unwrap();
            let s = scene(w, h);
            let region = FilterRegion::half_u(w, h);
            let tv = region_watermark_tv(&mark(w, h), &p, 0.0, &region).unwrap();
            let seq = measure(&s, &p, Some(&tv), &NoiseModel::none()).unwrap();
            let spec = assemble_spectrum(&seq, &p).unwrap();
            let watermarked = reconstruct(&spec);
            let cleaned = filter_dewatermark(&spec, &region).unwrap();
            let restored = reconstruct(&complete_symmetry(&cleaned));
            let expect = host_recon(&s, &p).scale(tv.k2 / 2.0);
            assert!(restored.max_abs_diff(&expect) <= 1e-9 * expect.max_abs(), "{w}x{h}");
            assert!(watermarked.max_abs_diff(&expect) > 1e-3 * expect.max_abs());
            assert_eq!(filter_dewatermark(&cleaned, &region).unwrap(), cleaned);
        }
    }

    #[test]
    fn wrong_key_destroys_host() {
        let p = build_plan(Mode::FourStepSinusoid, PatternParams::new(16, 16), Sampling::Full).unwrap();
        let s = Image::from_fn(16, 16, |x, y| {
            let (dx, dy) = (x as f64 - 6.0, y as f64 - 9.0);
            0.2 + (-(dx * dx + dy * dy) / 18.0).exp()
        });
        let spec = assemble_spectrum(&measure(&s, &p, None, &NoiseModel::none()).unwrap(), &p).unwrap();
        let wrong = FilterRegion::low_frequency(16, 16, 0.1).unwrap();
        let out = reconstruct(&complete_symmetry(&filter_dewatermark(&spec, &wrong).unwrap()));
        let score = ssim_default(&s.normalized().scale(255.0), &out.normalized().scale(255.0)).unwrap();
        assert!(score < 0.3, "ssim {score}");
    }

    #[test]
    fn region_weights_bounded() {
        let p = build_plan(Mode::FourStepSinusoid, PatternParams::new(8, 8), Sampling::Full).unwrap();
        let r = FilterRegion::low_frequency(8, 8, 0.25).unwrap();
        let tv = region_watermark_tv(&mark(8, 8), &p, 0.1, &r).unwrap();
        assert!(tv.weights.iter().all(|&w| (0.0..=1.0).contains(&w)));
        let full = FilterRegion::from_mask(8, 8, vec![true; 64]).unwrap();
        assert_eq!(region_watermark_tv(&mark(8, 8), &p, 0.1, &full).unwrap(), watermark_tv(&mark(8, 8), &p, 0.1).unwrap());
    }

    #[test]
    fn rle_round_trip_and_presets() {
        for r in [
            FilterRegion::half_u(7, 5),
            FilterRegion::empty(3, 3),
            FilterRegion::low_frequency(10, 10, 0.3).unwrap(),
            FilterRegion::from_mask(2, 2, vec![true; 4]).unwrap(),
        ] {
            assert_eq!(FilterRegion::from_rle(&r.to_rle()).unwrap(), r);
        }
        assert!(!FilterRegion::half_u(8, 8).conjugate_closed);
        assert_eq!(FilterRegion::preset("half-u", 8, 8).unwrap(), FilterRegion::half_u(8, 8));
        assert_eq!(FilterRegion::preset("lowfreq:0.1", 10, 10).unwrap().count(), 10);
        assert!(FilterRegion::preset("bogus", 8, 8).is_err());
        assert!(FilterRegion::from_rle("# fspi-region v1 width=2 height=2\n1 1\n").is_err());
    }
}
