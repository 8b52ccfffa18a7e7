//! Invisible watermarking by frequency multiplexing.
//!
//! The host is acquired with a full four-step plan. Groups in region R1 carry
//! weight 1. Each group in region R2 carries one constant weight: the
//! normalized four-step reading `W_phi(f1)` of the watermark at some slot
//! `(f1, phi)`. Because the four readings of a group sum to `2 K1`, the
//! receiver recovers `W = (I'_0 + I'_pi/2 + I'_pi + I'_3pi/2) / (2 K1)` and
//! rebuilds the watermark spectrum from the recovered slots.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::detector::{MeasurementSequence, TvSignal};
use crate::error::{dims, FspiError, Result};
use crate::illumination::{
    conjugate, frequencies_by_distance, AcquisitionPlan, Group, Illuminator, Mode, PatternParams, PatternSpec,
    Sampling,
};
use crate::image::Image;
use crate::recon::{assemble_spectrum, complete_symmetry, reconstruct, SpectrumGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// Host only.
    R1,
    /// Multiplexed with the watermark.
    R2,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyMask {
    pub width: usize,
    pub height: usize,
    pub labels: Vec<Region>,
}

impl FrequencyMask {
    pub fn region(&self, u: usize, v: usize) -> Region {
        self.labels[v * self.width + u]
    }

    pub fn count(&self, region: Region) -> usize {
        self.labels.iter().filter(|&&r| r == region).count()
    }

    /// R2 frequencies in raster order.
    pub fn r2_frequencies(&self) -> Vec<(usize, usize)> {
        (0..self.height)
            .flat_map(|v| (0..self.width).map(move |u| (u, v)))
            .filter(|&(u, v)| self.region(u, v) == Region::R2)
            .collect()
    }

    pub fn is_conjugate_closed(&self) -> bool {
        (0..self.height).all(|v| {
            (0..self.width).all(|u| {
                let (cu, cv) = conjugate(u, v, self.width, self.height);
                self.region(u, v) == self.region(cu, cv)
            })
        })
    }

    pub fn r1_keep(&self) -> Vec<bool> {
        self.labels.iter().map(|&r| r == Region::R1).collect()
    }
}

fn in_block(f: usize, n: usize, side: usize) -> bool {
    (f + side / 2) % n < side
}

/// R1 is the `r1_side x r1_side` block of wrapped frequencies
/// `[-floor(r/2), ceil(r/2) - 1]` on each axis; R2 is the rest.
pub fn build_mask(width: usize, height: usize, r1_side: usize) -> Result<FrequencyMask> {
    if r1_side == 0 {
        return Err(FspiError::InvalidArgument("r1_side = 0 leaves the host unprotected".into()));
    }
    build_mask_allow_empty(width, height, r1_side)
}

/// [`build_mask`] without the `r1_side > 0` guard.
pub fn build_mask_allow_empty(width: usize, height: usize, r1_side: usize) -> Result<FrequencyMask> {
    if r1_side > width.min(height) {
        return Err(FspiError::InvalidArgument(format!("r1_side {r1_side} exceeds {}", dims(width, height))));
    }
    let labels = (0..height)
        .flat_map(|v| (0..width).map(move |u| (u, v)))
        .map(|(u, v)| {
            if in_block(u, width, r1_side) && in_block(v, height, r1_side) {
                Region::R1
            } else {
                Region::R2
            }
        })
        .collect();
    Ok(FrequencyMask { width, height, labels })
}

/// Watermark coefficients carriable: four R2 groups per coefficient.
pub fn capacity(mask: &FrequencyMask) -> usize {
    mask.count(Region::R2) / 4
}

/// The `count` lowest wrapped-distance frequencies of a `width x height`
/// grid, one per conjugate pair.
pub fn lowest_watermark_frequencies(width: usize, height: usize, count: usize) -> Vec<(usize, usize)> {
    frequencies_by_distance(width, height)
        .into_iter()
        .filter(|&(u, v)| {
            let (cu, cv) = conjugate(u, v, width, height);
            v * width + u <= cv * width + cu
        })
        .take(count)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Assignment {
    pub host: (usize, usize),
    pub watermark: (usize, usize),
    pub phase_code: u8,
}

/// Which host group carries which watermark slot. Serialized, this is the
/// receiver's secret key.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyMapping {
    pub width: usize,
    pub height: usize,
    pub wm_width: usize,
    pub wm_height: usize,
    pub assignments: Vec<Assignment>,
    pub key_seed: Option<u64>,
    /// Divisor applied to the raw watermark readings, once known.
    pub norm: Option<f64>,
}

/// Assigns four R2 groups (phases 0, pi/2, pi, 3pi/2) to each watermark
/// frequency. R2 groups are taken in raster order, or in the order of a
/// seeded shuffle when `key_seed` is given.
pub fn build_mapping(
    mask: &FrequencyMask,
    wm_width: usize,
    wm_height: usize,
    watermark_freqs: &[(usize, usize)],
    key_seed: Option<u64>,
) -> Result<FrequencyMapping> {
    let cap = capacity(mask);
    if watermark_freqs.len() > cap {
        return Err(FspiError::CapacityExceeded { requested: watermark_freqs.len(), capacity: cap });
    }
    let mut seen = vec![false; wm_width * wm_height];
    for &(u, v) in watermark_freqs {
        if u >= wm_width || v >= wm_height {
            return Err(FspiError::InvalidArgument(format!("watermark frequency ({u}, {v}) outside grid")));
        }
        if std::mem::replace(&mut seen[v * wm_width + u], true) {
            return Err(FspiError::InvalidArgument(format!("watermark frequency ({u}, {v}) listed twice")));
        }
    }
    let mut hosts = mask.r2_frequencies();
    if let Some(seed) = key_seed {
        hosts.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let assignments = watermark_freqs
        .iter()
        .enumerate()
        .flat_map(|(k, &wm)| (0..4u8).map(move |p| (k, wm, p)))
        .map(|(k, wm, p)| Assignment { host: hosts[4 * k + p as usize], watermark: wm, phase_code: p })
        .collect();
    Ok(FrequencyMapping {
        width: mask.width,
        height: mask.height,
        wm_width,
        wm_height,
        assignments,
        key_seed,
        norm: None,
    })
}

/// Capacity-filling mapping over the lowest watermark frequencies.
pub fn default_mapping(
    mask: &FrequencyMask,
    wm_width: usize,
    wm_height: usize,
    key_seed: Option<u64>,
) -> Result<FrequencyMapping> {
    let freqs = lowest_watermark_frequencies(wm_width, wm_height, capacity(mask));
    build_mapping(mask, wm_width, wm_height, &freqs, key_seed)
}

impl FrequencyMapping {
    pub fn with_norm(mut self, norm: f64) -> Self {
        self.norm = Some(norm);
        self
    }

    pub fn to_csv(&self) -> String {
        let opt = |o: Option<String>| o.unwrap_or_else(|| "none".into());
        let mut out = format!(
            "# fspi-mapping v1 width={} height={} wm_width={} wm_height={} key_seed={} norm={}\nfx_u,fx_v,fx1_u,fx1_v,phase\n",
            self.width,
            self.height,
            self.wm_width,
            self.wm_height,
            opt(self.key_seed.map(|s| s.to_string())),
            opt(self.norm.map(|n| n.to_string())),
        );
        for a in &self.assignments {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                a.host.0, a.host.1, a.watermark.0, a.watermark.1, a.phase_code
            ));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut mapping: Option<FrequencyMapping> = None;
        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            let err = |message: String| FspiError::Parse { line: line_no, message };
            let line = line.trim();
            if line.is_empty() || line.starts_with("fx_u") {
                continue;
            }
            if let Some(header) = line.strip_prefix("# fspi-mapping v1") {
                let mut m = FrequencyMapping {
                    width: 0,
                    height: 0,
                    wm_width: 0,
                    wm_height: 0,
                    assignments: Vec::new(),
                    key_seed: None,
                    norm: None,
                };
                for tok in header.split_whitespace() {
                    let Some((k, v)) = tok.split_once('=') else { continue };
                    let bad = || err(format!("bad `{k}` value `{v}`"));
                    match k {
                        "width" => m.width = v.parse().map_err(|_| bad())?,
                        "height" => m.height = v.parse().map_err(|_| bad())?,
                        "wm_width" => m.wm_width = v.parse().map_err(|_| bad())?,
                        "wm_height" => m.wm_height = v.parse().map_err(|_| bad())?,
                        "key_seed" if v != "none" => m.key_seed = Some(v.parse().map_err(|_| bad())?),
                        "norm" if v != "none" => m.norm = Some(v.parse().map_err(|_| bad())?),
                        _ => {}
                    }
                }
                if m.width == 0 || m.height == 0 || m.wm_width == 0 || m.wm_height == 0 {
                    return Err(err("missing dimensions".into()));
                }
                mapping = Some(m);
                continue;
            }
            let m = mapping.as_mut().ok_or_else(|| err("missing `# fspi-mapping v1` header".into()))?;
            let f: Vec<usize> = line
                .split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| err(format!("bad row `{line}`")))?;
            if f.len() != 5 || f[4] > 3 {
                return Err(err(format!("bad row `{line}`")));
            }
            if f[0] >= m.width || f[1] >= m.height || f[2] >= m.wm_width || f[3] >= m.wm_height {
                return Err(err(format!("row `{line}` outside grid")));
            }
            m.assignments.push(Assignment { host: (f[0], f[1]), watermark: (f[2], f[3]), phase_code: f[4] as u8 });
        }
        let m = mapping.ok_or(FspiError::Parse { line: 1, message: "empty mapping file".into() })?;
        m.validate()?;
        Ok(m)
    }

    /// Each host group used once, each slot used once, every watermark
    /// frequency with all four phases.
    pub fn validate(&self) -> Result<()> {
        let mut host_used = vec![false; self.width * self.height];
        let mut slots = vec![0u8; self.wm_width * self.wm_height];
        for a in &self.assignments {
            if std::mem::replace(&mut host_used[a.host.1 * self.width + a.host.0], true) {
                return Err(FspiError::InvalidArgument(format!("host group {:?} assigned twice", a.host)));
            }
            let s = &mut slots[a.watermark.1 * self.wm_width + a.watermark.0];
            if *s & (1 << a.phase_code) != 0 {
                return Err(FspiError::InvalidArgument(format!("slot {:?}/{} assigned twice", a.watermark, a.phase_code)));
            }
            *s |= 1 << a.phase_code;
        }
        if let Some(i) = slots.iter().position(|&s| s != 0 && s != 0b1111) {
            return Err(FspiError::InvalidArgument(format!(
                "watermark frequency ({}, {}) lacks some phases",
                i % self.wm_width,
                i / self.wm_width
            )));
        }
        Ok(())
    }

    fn check_plan(&self, plan: &AcquisitionPlan) -> Result<Vec<Option<Group>>> {
        if plan.mode != Mode::FourStepSinusoid || plan.sampling != Sampling::Full {
            return Err(FspiError::ModeMismatch("steganography needs a full four-step plan".into()));
        }
        if plan.params.width != self.width || plan.params.height != self.height {
            return Err(FspiError::DimensionMismatch {
                expected: dims(self.width, self.height),
                got: dims(plan.params.width, plan.params.height),
            });
        }
        let mut index = vec![None; self.width * self.height];
        for g in plan.groups() {
            index[g.v * self.width + g.u] = Some(g);
        }
        Ok(index)
    }
}

/// Source weights: 1 everywhere except mapped R2 groups, whose four frames
/// all carry the normalized watermark reading of their slot.
pub fn stego_weights(watermark: &Image, mapping: &FrequencyMapping, plan: &AcquisitionPlan) -> Result<TvSignal> {
    watermark.check_dims(mapping.wm_width, mapping.wm_height)?;
    if watermark.data().iter().any(|v| !(*v >= 0.0)) {
        return Err(FspiError::InvalidArgument("watermark must be nonnegative".into()));
    }
    let index = mapping.check_plan(plan)?;
    let wm_params = PatternParams::with_levels(mapping.wm_width, mapping.wm_height, plan.params.a, plan.params.b)?;
    let illuminator = Illuminator::new(wm_params)?;
    let raw: Vec<f64> = mapping
        .assignments
        .iter()
        .map(|a| illuminator.inner(&PatternSpec::four_step(a.watermark.0, a.watermark.1, a.phase_code), watermark.data()))
        .collect::<Result<_>>()?;
    let norm = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(norm > 0.0) {
        return Err(FspiError::ZeroWatermark);
    }
    let mut weights = vec![1.0; plan.len()];
    for (a, w) in mapping.assignments.iter().zip(&raw) {
        let g = index[a.host.1 * mapping.width + a.host.0]
            .ok_or_else(|| FspiError::InvalidArgument(format!("plan lacks host group {:?}", a.host)))?;
        weights[g.range()].fill(w / norm);
    }
    let k2 = 2.0 * plan.params.a * watermark.sum() / norm;
    Ok(TvSignal { weights, k2, dc_offset: 0.0, norm })
}

/// `I_0 + I_pi` of the first group that carries no watermark slot.
pub fn k1_from_unmapped(seq: &MeasurementSequence, mapping: &FrequencyMapping, plan: &AcquisitionPlan) -> Result<f64> {
    let index = mapping.check_plan(plan)?;
    let mut used = vec![false; mapping.width * mapping.height];
    for a in &mapping.assignments {
        used[a.host.1 * mapping.width + a.host.0] = true;
    }
    index
        .iter()
        .enumerate()
        .filter(|(i, _)| !used[*i])
        .find_map(|(_, g)| *g)
        .map(|g| {
            let r = g.range();
            seq.values[r.start] + seq.values[r.start + 2]
        })
        .ok_or_else(|| FspiError::InvalidArgument("no unweighted group to measure K1 from".into()))
}

/// Recovered normalized weights, in assignment order.
pub fn extract_weights(
    seq: &MeasurementSequence,
    mapping: &FrequencyMapping,
    plan: &AcquisitionPlan,
    k1: Option<f64>,
) -> Result<Vec<f64>> {
    seq.check_plan(plan)?;
    let index = mapping.check_plan(plan)?;
    let k1 = match k1 {
        Some(k) => k,
        None => k1_from_unmapped(seq, mapping, plan)?,
    };
    if !(k1 > 0.0) {
        return Err(FspiError::InvalidArgument(format!("K1 must be > 0, got {k1}")));
    }
    mapping
        .assignments
        .iter()
        .map(|a| {
            let g = index[a.host.1 * mapping.width + a.host.0]
                .ok_or_else(|| FspiError::InvalidArgument(format!("plan lacks host group {:?}", a.host)))?;
            Ok(crate::image::neumaier_sum(seq.values[g.range()].iter().copied()) / (2.0 * k1))
        })
        .collect()
}

/// Watermark spectrum rebuilt from the recovered slots; known only at the
/// mapped frequencies.
pub fn extract_watermark(
    seq: &MeasurementSequence,
    mapping: &FrequencyMapping,
    plan: &AcquisitionPlan,
    k1: Option<f64>,
) -> Result<SpectrumGrid> {
    let weights = extract_weights(seq, mapping, plan, k1)?;
    let (w, h) = (mapping.wm_width, mapping.wm_height);
    let mut slots = vec![[0.0f64; 4]; w * h];
    let mut present = vec![0u8; w * h];
    for (a, &x) in mapping.assignments.iter().zip(&weights) {
        let i = a.watermark.1 * w + a.watermark.0;
        slots[i][a.phase_code as usize] = x;
        present[i] |= 1 << a.phase_code;
    }
    let mut grid = SpectrumGrid::empty(w, h);
    for (i, s) in slots.iter().enumerate() {
        if present[i] == 0b1111 {
            grid.set(i % w, i / w, Complex64::new(s[0] - s[2], s[1] - s[3]));
        }
    }
    Ok(grid)
}

/// Symmetry completion and inverse transform of an extracted spectrum.
pub fn reconstruct_watermark(spec: &SpectrumGrid) -> Image {
    reconstruct(&complete_symmetry(spec))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HostRegions {
    AllRegions,
    R1Only,
}

pub fn stego_host_reconstruct(
    seq: &MeasurementSequence,
    plan: &AcquisitionPlan,
    mask: &FrequencyMask,
    mode: HostRegions,
) -> Result<Image> {
    let spec = assemble_spectrum(seq, plan)?;
    spec.check_dims(mask.width, mask.height)?;
    let spec = match mode {
        HostRegions::AllRegions => spec,
        HostRegions::R1Only => spec.masked(&mask.r1_keep())?,
    };
    Ok(reconstruct(&complete_symmetry(&spec)))
}
