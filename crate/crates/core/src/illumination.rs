//! Illumination patterns and acquisition plans.
//!
//! Frequencies live on the DFT grid: a pattern with indices `(u, v)` on a
//! `W x H` grid has spatial frequency `(u / W, v / H)` cycles per pixel.
//! Sinusoids are evaluated through an integer phase index
//! `m = (u x H + v y W) mod (W H)` so that every pattern is exactly periodic
//! on the grid and four-step groups are exact complements.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{dims, FspiError, Result};
use crate::hadamard;
use crate::image::Image;

/// Illumination mode of a pattern or plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    FourStepSinusoid,
    ThreeStepSinusoid,
    SinusoidOrthogonal,
    HadamardDiff,
    Random,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::FourStepSinusoid => "four-step",
            Mode::ThreeStepSinusoid => "three-step",
            Mode::SinusoidOrthogonal => "sin-orth",
            Mode::HadamardDiff => "hadamard-diff",
            Mode::Random => "random",
        }
    }

    pub fn is_sinusoid(self) -> bool {
        matches!(self, Mode::FourStepSinusoid | Mode::ThreeStepSinusoid | Mode::SinusoidOrthogonal)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = FspiError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "four-step" => Mode::FourStepSinusoid,
            "three-step" => Mode::ThreeStepSinusoid,
            "sin-orth" => Mode::SinusoidOrthogonal,
            "hadamard-diff" => Mode::HadamardDiff,
            "random" => Mode::Random,
            other => return Err(FspiError::InvalidArgument(format!("unknown mode `{other}`"))),
        })
    }
}

/// Polarity of a differential Hadamard pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    None,
    Plus,
    Minus,
}

impl Polarity {
    fn code(self) -> char {
        match self {
            Polarity::None => '.',
            Polarity::Plus => '+',
            Polarity::Minus => '-',
        }
    }
}

/// One illumination pattern.
///
/// `u`, `v` are frequency indices for the sinusoid modes and the Hadamard
/// basis index `k = v * W + u` for [`Mode::HadamardDiff`]. `phase_code`
/// selects the phase: `k * pi/2` for the four-step and orthogonal modes,
/// `k * 2pi/3` for three-step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PatternSpec {
    pub mode: Mode,
    pub u: usize,
    pub v: usize,
    pub phase_code: u8,
    pub polarity: Polarity,
    pub seed_index: u64,
}

impl PatternSpec {
    pub fn four_step(u: usize, v: usize, phase_code: u8) -> Self {
        Self { mode: Mode::FourStepSinusoid, u, v, phase_code, polarity: Polarity::None, seed_index: 0 }
    }

    pub fn three_step(u: usize, v: usize, phase_code: u8) -> Self {
        Self { mode: Mode::ThreeStepSinusoid, u, v, phase_code, polarity: Polarity::None, seed_index: 0 }
    }

    pub fn orthogonal(u: usize, v: usize, phase_code: u8) -> Self {
        Self { mode: Mode::SinusoidOrthogonal, u, v, phase_code, polarity: Polarity::None, seed_index: 0 }
    }

    pub fn hadamard(u: usize, v: usize, polarity: Polarity) -> Self {
        Self { mode: Mode::HadamardDiff, u, v, phase_code: 0, polarity, seed_index: 0 }
    }

    pub fn random(seed_index: u64) -> Self {
        Self { mode: Mode::Random, u: 0, v: 0, phase_code: 0, polarity: Polarity::None, seed_index }
    }

    /// Spatial frequency along x in cycles per pixel.
    pub fn fx(&self, width: usize) -> f64 {
        self.u as f64 / width as f64
    }

    /// Spatial frequency along y in cycles per pixel.
    pub fn fy(&self, height: usize) -> f64 {
        self.v as f64 / height as f64
    }

    /// Initial phase in radians.
    pub fn phase(&self) -> f64 {
        match self.mode {
            Mode::ThreeStepSinusoid => 2.0 * PI * self.phase_code as f64 / 3.0,
            _ => PI / 2.0 * self.phase_code as f64,
        }
    }

    fn validate(&self, width: usize, height: usize) -> Result<()> {
        let max_phase = match self.mode {
            Mode::FourStepSinusoid | Mode::SinusoidOrthogonal => 4,
            Mode::ThreeStepSinusoid => 3,
            Mode::HadamardDiff | Mode::Random => 1,
        };
        if self.phase_code >= max_phase {
            return Err(FspiError::InvalidArgument(format!(
                "phase code {} out of range for {}",
                self.phase_code, self.mode
            )));
        }
        if self.u >= width || self.v >= height {
            return Err(FspiError::InvalidArgument(format!(
                "frequency ({}, {}) outside {} grid",
                self.u,
                self.v,
                dims(width, height)
            )));
        }
        Ok(())
    }
}

/// Mean level `a`, contrast `b` and grid size of every pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternParams {
    pub a: f64,
    pub b: f64,
    pub width: usize,
    pub height: usize,
}

impl PatternParams {
    /// `a = b = 255/2`.
    pub fn new(width: usize, height: usize) -> Self {
        Self { a: 127.5, b: 127.5, width, height }
    }

    pub fn with_levels(width: usize, height: usize, a: f64, b: f64) -> Result<Self> {
        let p = Self { a, b, width, height };
        p.validate()?;
        Ok(p)
    }

    pub fn pixels(&self) -> usize {
        self.width * self.height
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.b.is_finite()) || self.b <= 0.0 {
            return Err(FspiError::InvalidParams(format!("need finite b > 0, got a={} b={}", self.a, self.b)));
        }
        if self.a < self.b {
            return Err(FspiError::InvalidParams(format!(
                "a={} < b={} would produce negative light intensity",
                self.a, self.b
            )));
        }
        if self.width == 0 || self.height == 0 {
            return Err(FspiError::InvalidParams("grid must be at least 1x1".into()));
        }
        Ok(())
    }
}

/// Which frequencies a plan visits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sampling {
    Full,
    /// One member of every conjugate pair; the rest follows from symmetry.
    HalfSpectrum,
    /// The given fraction of frequencies closest to DC.
    LowFrequency(f64),
}

impl fmt::Display for Sampling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sampling::Full => f.write_str("full"),
            Sampling::HalfSpectrum => f.write_str("half"),
            Sampling::LowFrequency(p) => write!(f, "lowfreq:{p}"),
        }
    }
}

impl FromStr for Sampling {
    type Err = FspiError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Sampling::Full),
            "half" => Ok(Sampling::HalfSpectrum),
            _ => {
                let p = s
                    .strip_prefix("lowfreq:")
                    .and_then(|p| p.parse::<f64>().ok())
                    .ok_or_else(|| FspiError::InvalidArgument(format!("unknown sampling `{s}`")))?;
                Ok(Sampling::LowFrequency(p))
            }
        }
    }
}

/// Ordered measurement schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct AcquisitionPlan {
    pub params: PatternParams,
    pub mode: Mode,
    pub sampling: Sampling,
    /// Pattern stream seed; only meaningful for [`Mode::Random`].
    pub seed: u64,
    pub entries: Vec<PatternSpec>,
}

/// A run of consecutive plan entries measuring one frequency / basis vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Group {
    pub start: usize,
    pub len: usize,
    pub u: usize,
    pub v: usize,
}

impl Group {
    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.len
    }
}

impl AcquisitionPlan {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Splits the plan into runs sharing `(u, v)`. Random patterns form
    /// singleton groups.
    pub fn groups(&self) -> Vec<Group> {
        let mut groups = Vec::new();
        let mut i = 0;
        while i < self.entries.len() {
            let e = self.entries[i];
            let mut j = i + 1;
            if e.mode != Mode::Random {
                while j < self.entries.len() && self.entries[j].u == e.u && self.entries[j].v == e.v {
                    j += 1;
                }
            }
            groups.push(Group { start: i, len: j - i, u: e.u, v: e.v });
            i = j;
        }
        groups
    }

    /// Set of frequencies visited, as a `W x H` boolean grid.
    pub fn frequency_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.params.pixels()];
        for e in &self.entries {
            mask[e.v * self.params.width + e.u] = true;
        }
        mask
    }

    fn order_name(&self) -> &'static str {
        match (self.mode, self.sampling) {
            (Mode::Random, _) => "stream",
            (Mode::HadamardDiff, _) => "natural",
            (_, Sampling::LowFrequency(_)) => "wrapped-distance",
            _ => "raster",
        }
    }

    /// Line-oriented text form: a header line followed by
    /// `index mode fx_num fx_den fy_num fy_den phase_code polarity seed_index`.
    pub fn to_text(&self) -> String {
        let p = &self.params;
        let mut out = format!(
            "# fspi-plan v1 width={} height={} a={} b={} mode={} sampling={} order={} seed={} entries={}\n",
            p.width,
            p.height,
            p.a,
            p.b,
            self.mode,
            self.sampling,
            self.order_name(),
            self.seed,
            self.entries.len()
        );
        for (i, e) in self.entries.iter().enumerate() {
            out.push_str(&format!(
                "{} {} {} {} {} {} {} {} {}\n",
                i,
                e.mode,
                e.u,
                p.width,
                e.v,
                p.height,
                e.phase_code,
                e.polarity.code(),
                e.seed_index
            ));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(FspiError::Parse { line: 1, message: "empty plan file".into() })?;
        let header = header
            .strip_prefix("# fspi-plan v1")
            .ok_or(FspiError::Parse { line: 1, message: "missing `# fspi-plan v1` header".into() })?;
        let kv = parse_header(header, 1)?;
        let get = |key: &str| -> Result<&str> {
            kv.iter()
                .find(|(k, _)| *k == key)
                .map(|(_, v)| *v)
                .ok_or(FspiError::Parse { line: 1, message: format!("missing header key `{key}`") })
        };
        let perr = |key: &str| FspiError::Parse { line: 1, message: format!("bad value for `{key}`") };
        let width: usize = get("width")?.parse().map_err(|_| perr("width"))?;
        let height: usize = get("height")?.parse().map_err(|_| perr("height"))?;
        let a: f64 = get("a")?.parse().map_err(|_| perr("a"))?;
        let b: f64 = get("b")?.parse().map_err(|_| perr("b"))?;
        let mode: Mode = get("mode")?.parse()?;
        let sampling: Sampling = get("sampling")?.parse()?;
        let seed: u64 = get("seed")?.parse().map_err(|_| perr("seed"))?;
        let count: usize = get("entries")?.parse().map_err(|_| perr("entries"))?;
        let params = PatternParams::with_levels(width, height, a, b)?;

        let mut entries = Vec::with_capacity(count);
        for (lineno, line) in lines {
            let line_no = lineno + 1;
            let err = |message: String| FspiError::Parse { line: line_no, message };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 9 {
                return Err(err(format!("expected 9 fields, got {}", fields.len())));
            }
            let num = |i: usize| -> Result<u64> {
                fields[i].parse::<u64>().map_err(|_| err(format!("bad integer `{}`", fields[i])))
            };
            if num(0)? as usize != entries.len() {
                return Err(err(format!("entry index {} out of order", fields[0])));
            }
            let emode: Mode = fields[1].parse()?;
            if num(3)? as usize != width || num(5)? as usize != height {
                return Err(err("frequency denominators do not match grid".into()));
            }
            let polarity = match fields[7] {
                "." => Polarity::None,
                "+" => Polarity::Plus,
                "-" => Polarity::Minus,
                other => return Err(err(format!("bad polarity `{other}`"))),
            };
            let spec = PatternSpec {
                mode: emode,
                u: num(2)? as usize,
                v: num(4)? as usize,
                phase_code: u8::try_from(num(6)?).map_err(|_| err("phase code too large".into()))?,
                polarity,
                seed_index: num(8)?,
            };
            spec.validate(width, height).map_err(|e| err(e.to_string()))?;
            entries.push(spec);
        }
        if entries.len() != count {
            return Err(FspiError::LengthMismatch { expected: count, got: entries.len() });
        }
        Ok(Self { params, mode, sampling, seed, entries })
    }
}

fn parse_header(header: &str, line: usize) -> Result<Vec<(&str, &str)>> {
    header
        .split_whitespace()
        .map(|tok| {
            tok.split_once('=').ok_or(FspiError::Parse { line, message: format!("bad header token `{tok}`") })
        })
        .collect()
}

/// Conjugate frequency index `(-u mod W, -v mod H)`.
pub fn conjugate(u: usize, v: usize, width: usize, height: usize) -> (usize, usize) {
    ((width - u) % width, (height - v) % height)
}

pub fn is_self_conjugate(u: usize, v: usize, width: usize, height: usize) -> bool {
    conjugate(u, v, width, height) == (u, v)
}

/// Squared wrapped distance to DC in cycles/pixel, scaled by `(W H)^2` so it
/// stays an exact integer.
pub fn wrapped_distance_key(u: usize, v: usize, width: usize, height: usize) -> u128 {
    let du = u.min(width - u) as u128;
    let dv = v.min(height - v) as u128;
    let (w, h) = (width as u128, height as u128);
    du * du * h * h + dv * dv * w * w
}

/// Every frequency of the grid ordered by wrapped distance to DC, ties broken
/// by `u` then `v`.
pub fn frequencies_by_distance(width: usize, height: usize) -> Vec<(usize, usize)> {
    let mut freqs: Vec<(usize, usize)> = (0..height).flat_map(|v| (0..width).map(move |u| (u, v))).collect();
    freqs.sort_by_key(|&(u, v)| (wrapped_distance_key(u, v, width, height), u, v));
    freqs
}

/// Frequencies in raster order (`v` outer, `u` inner), keeping one
/// representative per conjugate pair when `half` is set.
fn raster_frequencies(width: usize, height: usize, half: bool) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for v in 0..height {
        for u in 0..width {
            if half {
                let (cu, cv) = conjugate(u, v, width, height);
                if cv * width + cu < v * width + u {
                    continue;
                }
            }
            out.push((u, v));
        }
    }
    out
}

fn low_frequency_count(fraction: f64, total: usize) -> Result<usize> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(FspiError::InvalidArgument(format!("sampling fraction {fraction} not in (0, 1]")));
    }
    Ok(((fraction * total as f64).round() as usize).clamp(1, total))
}

/// Builds the measurement schedule for a sinusoid or Hadamard mode.
///
/// Four-step half-spectrum plans measure self-conjugate frequencies with the
/// `{0, pi}` pair only, since the quadrature patterns there are identical; the
/// plan therefore has exactly `2 W H` entries.
pub fn build_plan(mode: Mode, params: PatternParams, sampling: Sampling) -> Result<AcquisitionPlan> {
    params.validate()?;
    let (w, h) = (params.width, params.height);
    let n = w * h;
    let freqs = match sampling {
        Sampling::Full => raster_frequencies(w, h, false),
        Sampling::HalfSpectrum => raster_frequencies(w, h, true),
        Sampling::LowFrequency(p) => {
            let count = low_frequency_count(p, n)?;
            let mut f = frequencies_by_distance(w, h);
            f.truncate(count);
            f
        }
    };

    let mut entries = Vec::new();
    match mode {
        Mode::FourStepSinusoid => {
            for (u, v) in freqs {
                if sampling == Sampling::HalfSpectrum && is_self_conjugate(u, v, w, h) {
                    entries.push(PatternSpec::four_step(u, v, 0));
                    entries.push(PatternSpec::four_step(u, v, 2));
                } else {
                    entries.extend((0..4).map(|k| PatternSpec::four_step(u, v, k)));
                }
            }
        }
        Mode::ThreeStepSinusoid => {
            for (u, v) in freqs {
                entries.extend((0..3).map(|k| PatternSpec::three_step(u, v, k)));
            }
        }
        Mode::SinusoidOrthogonal => {
            if sampling != Sampling::Full {
                return Err(FspiError::InvalidArgument("sin-orth plans use full sampling".into()));
            }
            // cos and -sin of one representative per conjugate pair: an
            // orthogonal basis of exactly W*H patterns.
            for (u, v) in raster_frequencies(w, h, true) {
                entries.push(PatternSpec::orthogonal(u, v, 0));
                if !is_self_conjugate(u, v, w, h) {
                    entries.push(PatternSpec::orthogonal(u, v, 1));
                }
            }
        }
        Mode::HadamardDiff => {
            if sampling != Sampling::Full {
                return Err(FspiError::InvalidArgument("hadamard-diff plans use full sampling".into()));
            }
            if !n.is_power_of_two() {
                return Err(FspiError::NotPowerOfTwo(n));
            }
            for k in 0..n {
                let (u, v) = (k % w, k / w);
                entries.push(PatternSpec::hadamard(u, v, Polarity::Plus));
                entries.push(PatternSpec::hadamard(u, v, Polarity::Minus));
            }
        }
        Mode::Random => {
            return Err(FspiError::InvalidArgument("use build_random_plan for random mode".into()));
        }
    }
    if entries.is_empty() {
        return Err(FspiError::EmptyPlan);
    }
    Ok(AcquisitionPlan { params, mode, sampling, seed: 0, entries })
}

/// `count` binary random patterns drawn from the stream identified by `seed`.
pub fn build_random_plan(params: PatternParams, count: usize, seed: u64) -> Result<AcquisitionPlan> {
    params.validate()?;
    if count == 0 {
        return Err(FspiError::EmptyPlan);
    }
    Ok(AcquisitionPlan {
        params,
        mode: Mode::Random,
        sampling: Sampling::Full,
        seed,
        entries: (0..count as u64).map(PatternSpec::random).collect(),
    })
}

/// Precomputed sinusoid tables for one grid, used to evaluate patterns and
/// their inner products with scenes.
#[derive(Debug, Clone)]
pub struct Illuminator {
    params: PatternParams,
    seed: u64,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl Illuminator {
    pub fn new(params: PatternParams) -> Result<Self> {
        Self::with_seed(params, 0)
    }

    pub fn with_seed(params: PatternParams, seed: u64) -> Result<Self> {
        params.validate()?;
        let n = params.pixels();
        let mut cos = Vec::with_capacity(n);
        let mut sin = Vec::with_capacity(n);
        for m in 0..n {
            let (s, c) = exact_sincos(m, n);
            cos.push(c);
            sin.push(s);
        }
        Ok(Self { params, seed, cos, sin })
    }

    pub fn for_plan(plan: &AcquisitionPlan) -> Result<Self> {
        Self::with_seed(plan.params, plan.seed)
    }

    pub fn params(&self) -> &PatternParams {
        &self.params
    }

    /// Renders one pattern as an image.
    pub fn pattern(&self, spec: &PatternSpec) -> Result<Image> {
        let (w, h) = (self.params.width, self.params.height);
        spec.validate(w, h)?;
        let mut data = vec![0.0; w * h];
        self.fill(spec, &mut data)?;
        Image::new(w, h, data)
    }

    /// Inner product of the pattern with a row-major scene.
    pub fn inner(&self, spec: &PatternSpec, scene: &[f64]) -> Result<f64> {
        let (w, h) = (self.params.width, self.params.height);
        let (a, b) = (self.params.a, self.params.b);
        match spec.mode {
            Mode::FourStepSinusoid | Mode::ThreeStepSinusoid | Mode::SinusoidOrthogonal => {
                let (cphi, sphi) = phase_trig(spec);
                let n = w * h;
                let step_x = (spec.u * h) % n;
                let step_y = (spec.v * w) % n;
                let mut acc = 0.0;
                let mut comp = 0.0;
                let mut base = 0usize;
                for y in 0..h {
                    let row = &scene[y * w..(y + 1) * w];
                    let mut m = base;
                    let mut row_acc = 0.0;
                    for &r in row {
                        row_acc += r * (a + b * (self.cos[m] * cphi - self.sin[m] * sphi));
                        m += step_x;
                        if m >= n {
                            m -= n;
                        }
                    }
                    let t = acc + row_acc;
                    comp += if acc.abs() >= row_acc.abs() { (acc - t) + row_acc } else { (row_acc - t) + acc };
                    acc = t;
                    base += step_y;
                    if base >= n {
                        base -= n;
                    }
                }
                Ok(acc + comp)
            }
            _ => {
                let mut data = vec![0.0; w * h];
                self.fill(spec, &mut data)?;
                Ok(crate::image::dot(&data, scene))
            }
        }
    }

    fn fill(&self, spec: &PatternSpec, out: &mut [f64]) -> Result<()> {
        let (w, h) = (self.params.width, self.params.height);
        let (a, b) = (self.params.a, self.params.b);
        let n = w * h;
        match spec.mode {
            Mode::FourStepSinusoid | Mode::ThreeStepSinusoid | Mode::SinusoidOrthogonal => {
                let (cphi, sphi) = phase_trig(spec);
                for y in 0..h {
                    for x in 0..w {
                        let m = (spec.u * x * h + spec.v * y * w) % n;
                        out[y * w + x] = a + b * (self.cos[m] * cphi - self.sin[m] * sphi);
                    }
                }
            }
            Mode::HadamardDiff => {
                if !n.is_power_of_two() {
                    return Err(FspiError::NotPowerOfTwo(n));
                }
                let k = spec.v * w + spec.u;
                let sign = match spec.polarity {
                    Polarity::Plus => 1.0,
                    Polarity::Minus => -1.0,
                    Polarity::None => {
                        return Err(FspiError::InvalidArgument("hadamard pattern needs a polarity".into()))
                    }
                };
                for (p, o) in out.iter_mut().enumerate() {
                    *o = a * (1.0 + sign * hadamard::entry(k, p));
                }
            }
            Mode::Random => {
                let mut rng = pattern_rng(self.seed, spec.seed_index);
                for o in out.iter_mut() {
                    *o = if rng.random::<bool>() { 2.0 * a } else { 0.0 };
                }
            }
        }
        Ok(())
    }
}

fn phase_trig(spec: &PatternSpec) -> (f64, f64) {
    match spec.mode {
        Mode::ThreeStepSinusoid => match spec.phase_code {
            0 => (1.0, 0.0),
            1 => (-0.5, 3f64.sqrt() / 2.0),
            _ => (-0.5, -(3f64.sqrt()) / 2.0),
        },
        _ => match spec.phase_code {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        },
    }
}

/// `sin` and `cos` of `2 pi m / n`, exact at multiples of a quarter turn.
fn exact_sincos(m: usize, n: usize) -> (f64, f64) {
    if (4 * m) % n == 0 {
        return match 4 * m / n {
            0 => (0.0, 1.0),
            1 => (1.0, 0.0),
            2 => (0.0, -1.0),
            _ => (-1.0, 0.0),
        };
    }
    (2.0 * PI * m as f64 / n as f64).sin_cos()
}

fn pattern_rng(seed: u64, seed_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(seed_index);
    rng
}

/// `a + b cos(2 pi fx x + 2 pi fy y + phase)` for a sinusoid spec.
pub fn sinusoid_pattern(spec: &PatternSpec, params: &PatternParams) -> Result<Image> {
    if !spec.mode.is_sinusoid() {
        return Err(FspiError::ModeMismatch(format!("{} is not a sinusoid mode", spec.mode)));
    }
    Illuminator::new(*params)?.pattern(spec)
}

/// Binary differential Hadamard pattern, `a (1 +/- H_k)`, natural ordering.
pub fn hadamard_pattern(spec: &PatternSpec, params: &PatternParams) -> Result<Image> {
    if spec.mode != Mode::HadamardDiff {
        return Err(FspiError::ModeMismatch(format!("{} is not hadamard-diff", spec.mode)));
    }
    if !params.pixels().is_power_of_two() {
        return Err(FspiError::NotPowerOfTwo(params.pixels()));
    }
    Illuminator::new(*params)?.pattern(spec)
}

/// Binary `{0, 2a}` pattern with fair independent pixels.
pub fn random_pattern(spec: &PatternSpec, params: &PatternParams, seed: u64) -> Result<Image> {
    if spec.mode != Mode::Random {
        return Err(FspiError::ModeMismatch(format!("{} is not random", spec.mode)));
    }
    Illuminator::with_seed(*params, seed)?.pattern(spec)
}
