//! Single-pixel detector simulation.
//!
//! Entry `i` of a measurement is `w_i * sum_xy R(x, y) P_i(x, y)` followed by
//! optional additive Gaussian noise. Noise samples are drawn from a
//! per-entry ChaCha stream so results do not depend on evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{FspiError, Result};
use crate::illumination::{AcquisitionPlan, Illuminator, PatternParams};
use crate::image::{neumaier_sum, Image};

/// Detector readings for one plan.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSequence {
    pub values: Vec<f64>,
    pub plan_id: String,
    pub noise_snr_db: Option<f64>,
    pub seed: Option<u64>,
}

impl MeasurementSequence {
    pub fn new(values: Vec<f64>, plan: &AcquisitionPlan) -> Self {
        Self { values, plan_id: plan_id(plan), noise_snr_db: None, seed: None }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn check_plan(&self, plan: &AcquisitionPlan) -> Result<()> {
        if self.values.len() != plan.len() {
            return Err(FspiError::LengthMismatch { expected: plan.len(), got: self.values.len() });
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let snr = self.noise_snr_db.map_or_else(|| "none".to_string(), |s| s.to_string());
        let seed = self.seed.map_or_else(|| "none".to_string(), |s| s.to_string());
        let mut out = format!("# plan={}, snr_db={}, seed={}\nindex,value\n", self.plan_id, snr, seed);
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{i},{v}\n"));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut plan_id = String::new();
        let mut noise_snr_db = None;
        let mut seed = None;
        let mut values = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            let err = |message: String| FspiError::Parse { line: line_no, message };
            let line = line.trim();
            if line.is_empty() || line == "index,value" {
                continue;
            }
            if let Some(header) = line.strip_prefix('#') {
                for item in header.split(',') {
                    let Some((k, v)) = item.trim().split_once('=') else { continue };
                    match k {
                        "plan" => plan_id = v.to_string(),
                        "snr_db" if v != "none" => {
                            noise_snr_db = Some(v.parse().map_err(|_| err(format!("bad snr `{v}`")))?)
                        }
                        "seed" if v != "none" => seed = Some(v.parse().map_err(|_| err(format!("bad seed `{v}`")))?),
                        _ => {}
                    }
                }
                continue;
            }
            let (idx, val) = line.split_once(',').ok_or_else(|| err("expected `index,value`".into()))?;
            let idx: usize = idx.trim().parse().map_err(|_| err(format!("bad index `{idx}`")))?;
            if idx != values.len() {
                return Err(err(format!("index {idx} out of order")));
            }
            let v: f64 = val.trim().parse().map_err(|_| err(format!("bad value `{val}`")))?;
            if !v.is_finite() {
                return Err(err("non-finite value".into()));
            }
            values.push(v);
        }
        Ok(Self { values, plan_id, noise_snr_db, seed })
    }
}

/// Short descriptive identifier of a plan.
pub fn plan_id(plan: &AcquisitionPlan) -> String {
    format!("{}-{}x{}-{}-{}", plan.mode, plan.params.width, plan.params.height, plan.sampling, plan.len())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    None,
    Gaussian,
}

/// Signal level `v_s` against which the SNR is referenced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalLevel {
    /// Mean absolute reading, background included.
    MeanAbs,
    /// Root-mean-square fluctuation of the readings about their mean.
    AcRms,
}

impl SignalLevel {
    pub fn of(self, values: &[f64]) -> f64 {
        let n = values.len() as f64;
        match self {
            SignalLevel::MeanAbs => neumaier_sum(values.iter().map(|v| v.abs())) / n,
            SignalLevel::AcRms => {
                let mean = neumaier_sum(values.iter().copied()) / n;
                (neumaier_sum(values.iter().map(|v| (v - mean) * (v - mean))) / n).sqrt()
            }
        }
    }
}

/// Additive detector noise at a given system SNR, `SNR = 20 log10(v_s / sigma)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub snr_db: f64,
    pub seed: u64,
    pub reference: SignalLevel,
}

impl NoiseModel {
    pub fn none() -> Self {
        Self { kind: NoiseKind::None, snr_db: f64::INFINITY, seed: 0, reference: SignalLevel::AcRms }
    }

    /// Gaussian noise referenced to the AC signal level.
    pub fn gaussian(snr_db: f64, seed: u64) -> Self {
        Self { kind: NoiseKind::Gaussian, snr_db, seed, reference: SignalLevel::AcRms }
    }

    pub fn with_reference(mut self, reference: SignalLevel) -> Self {
        self.reference = reference;
        self
    }

    /// Noise standard deviation for a given sequence.
    pub fn sigma(&self, values: &[f64]) -> f64 {
        match self.kind {
            NoiseKind::None => 0.0,
            NoiseKind::Gaussian => self.reference.of(values) / 10f64.powf(self.snr_db / 20.0),
        }
    }
}

/// Per-pattern light-source weights.
#[derive(Debug, Clone, PartialEq)]
pub struct TvSignal {
    pub weights: Vec<f64>,
    /// Watermark information sum after normalization.
    pub k2: f64,
    pub dc_offset: f64,
    /// Divisor applied to the raw coefficients.
    pub norm: f64,
}

impl TvSignal {
    /// All-ones weights (no modulation).
    pub fn unit(len: usize) -> Self {
        Self { weights: vec![1.0; len], k2: 1.0, dc_offset: 0.0, norm: 1.0 }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if let Some((index, &weight)) = self.weights.iter().enumerate().find(|(_, w)| !(**w >= 0.0)) {
            return Err(FspiError::NegativeWeight { index, weight });
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out =
            format!("# k2={}, dc_offset={}, norm={}\nindex,weight\n", self.k2, self.dc_offset, self.norm);
        for (i, w) in self.weights.iter().enumerate() {
            out.push_str(&format!("{i},{w}\n"));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let (mut k2, mut dc_offset, mut norm) = (f64::NAN, 0.0, 1.0);
        let mut weights = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            let err = |message: String| FspiError::Parse { line: line_no, message };
            let line = line.trim();
            if line.is_empty() || line == "index,weight" {
                continue;
            }
            if let Some(header) = line.strip_prefix('#') {
                for item in header.split(',') {
                    let Some((k, v)) = item.trim().split_once('=') else { continue };
                    let parsed: f64 = v.parse().map_err(|_| err(format!("bad `{k}` value")))?;
                    match k {
                        "k2" => k2 = parsed,
                        "dc_offset" => dc_offset = parsed,
                        "norm" => norm = parsed,
                        _ => {}
                    }
                }
                continue;
            }
            let (idx, val) = line.split_once(',').ok_or_else(|| err("expected `index,weight`".into()))?;
            let idx: usize = idx.trim().parse().map_err(|_| err(format!("bad index `{idx}`")))?;
            if idx != weights.len() {
                return Err(err(format!("index {idx} out of order")));
            }
            weights.push(val.trim().parse().map_err(|_| err(format!("bad weight `{val}`")))?);
        }
        if !k2.is_finite() {
            return Err(FspiError::Parse { line: 1, message: "missing k2 header".into() });
        }
        let tv = Self { weights, k2, dc_offset, norm };
        tv.validate()?;
        Ok(tv)
    }
}

/// Noise-free inner products of the scene with every plan pattern.
pub fn project(scene: &Image, plan: &AcquisitionPlan, illuminator: &Illuminator) -> Result<Vec<f64>> {
    scene.check_dims(plan.params.width, plan.params.height)?;
    let data = scene.data();
    #[cfg(feature = "parallel")]
    let iter = plan.entries.par_iter();
    #[cfg(not(feature = "parallel"))]
    let iter = plan.entries.iter();
    iter.map(|spec| illuminator.inner(spec, data)).collect()
}

/// Simulates the detector readings for `scene` under `plan`.
pub fn measure(
    scene: &Image,
    plan: &AcquisitionPlan,
    weights: Option<&TvSignal>,
    noise: &NoiseModel,
) -> Result<MeasurementSequence> {
    let illuminator = Illuminator::for_plan(plan)?;
    measure_with(&illuminator, scene, plan, weights, noise)
}

/// [`measure`] with a prebuilt [`Illuminator`].
pub fn measure_with(
    illuminator: &Illuminator,
    scene: &Image,
    plan: &AcquisitionPlan,
    weights: Option<&TvSignal>,
    noise: &NoiseModel,
) -> Result<MeasurementSequence> {
    if let Some(tv) = weights {
        if tv.len() != plan.len() {
            return Err(FspiError::LengthMismatch { expected: plan.len(), got: tv.len() });
        }
        tv.validate()?;
    }
    let mut values = project(scene, plan, illuminator)?;
    if let Some(tv) = weights {
        for (v, w) in values.iter_mut().zip(&tv.weights) {
            *v *= w;
        }
    }
    let seq = MeasurementSequence::new(values, plan);
    match noise.kind {
        NoiseKind::None => Ok(seq),
        NoiseKind::Gaussian => apply_noise(&seq, noise),
    }
}

/// Scene information sum `2a * sum R`.
pub fn k1(scene: &Image, params: &PatternParams) -> f64 {
    2.0 * params.a * scene.sum()
}

/// Adds i.i.d. zero-mean Gaussian noise with `sigma = v_s / 10^(snr/20)`.
pub fn apply_noise(seq: &MeasurementSequence, noise: &NoiseModel) -> Result<MeasurementSequence> {
    if seq.values.is_empty() {
        return Err(FspiError::EmptySequence);
    }
    if noise.kind == NoiseKind::None {
        return Ok(seq.clone());
    }
    if noise.snr_db.is_nan() {
        return Err(FspiError::InvalidArgument("snr_db must not be NaN".into()));
    }
    let sigma = noise.sigma(&seq.values);
    let values = seq
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| v + sigma * standard_normal(noise.seed, i as u64))
        .collect();
    Ok(MeasurementSequence {
        values,
        plan_id: seq.plan_id.clone(),
        noise_snr_db: Some(noise.snr_db),
        seed: Some(noise.seed),
    })
}

/// One standard normal sample from the stream `(seed, index)`.
pub fn standard_normal(seed: u64, index: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    StandardNormal.sample(&mut rng)
}
