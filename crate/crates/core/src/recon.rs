//! Spectrum assembly and image reconstruction.
//!
//! With `I_k` the readings of a four-step group at `(u, v)`,
//! `C = (I_0 - I_pi) + j (I_pi/2 - I_3pi/2)` equals `2b` times the forward DFT
//! coefficient `sum R exp(-2 pi j (ux/W + vy/H))`, so the inverse transform of
//! a full noise-free spectrum returns `2b R`. Three-step assembly carries a
//! `3b` factor instead. Reconstructions are returned unscaled; use
//! [`Image::normalized`] for display and metrics.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::detector::MeasurementSequence;
use crate::error::{dims, FspiError, Result};
use crate::hadamard;
use crate::illumination::{conjugate, AcquisitionPlan, Group, Illuminator, Mode, Polarity};
use crate::image::Image;

/// Complex Fourier coefficients with per-frequency validity flags.
/// Unknown entries are always exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumGrid {
    width: usize,
    height: usize,
    coeffs: Vec<Complex64>,
    known: Vec<bool>,
}

impl SpectrumGrid {
    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            coeffs: vec![Complex64::new(0.0, 0.0); width * height],
            known: vec![false; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn known(&self) -> &[bool] {
        &self.known
    }

    pub fn get(&self, u: usize, v: usize) -> Option<Complex64> {
        let i = v * self.width + u;
        self.known[i].then(|| self.coeffs[i])
    }

    pub fn set(&mut self, u: usize, v: usize, c: Complex64) {
        let i = v * self.width + u;
        self.coeffs[i] = c;
        self.known[i] = true;
    }

    pub fn clear(&mut self, u: usize, v: usize) {
        let i = v * self.width + u;
        self.coeffs[i] = Complex64::new(0.0, 0.0);
        self.known[i] = false;
    }

    pub fn known_count(&self) -> usize {
        self.known.iter().filter(|&&k| k).count()
    }

    pub fn check_dims(&self, width: usize, height: usize) -> Result<()> {
        if self.width != width || self.height != height {
            return Err(FspiError::DimensionMismatch {
                expected: dims(width, height),
                got: dims(self.width, self.height),
            });
        }
        Ok(())
    }

    /// Keeps only the frequencies where `keep` is true.
    pub fn masked(&self, keep: &[bool]) -> Result<SpectrumGrid> {
        if keep.len() != self.coeffs.len() {
            return Err(FspiError::LengthMismatch { expected: self.coeffs.len(), got: keep.len() });
        }
        let mut out = self.clone();
        for (i, &k) in keep.iter().enumerate() {
            if !k {
                out.coeffs[i] = Complex64::new(0.0, 0.0);
                out.known[i] = false;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, k: f64) -> SpectrumGrid {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= k);
        out
    }

    /// `u,v,re,im,known` rows, one per frequency, raster order.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# spectrum width={} height={}\nu,v,re,im,known\n", self.width, self.height);
        for v in 0..self.height {
            for u in 0..self.width {
                let i = v * self.width + u;
                let c = self.coeffs[i];
                out.push_str(&format!("{},{},{},{},{}\n", u, v, c.re, c.im, u8::from(self.known[i])));
            }
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut grid: Option<SpectrumGrid> = None;
        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            let err = |message: String| FspiError::Parse { line: line_no, message };
            let line = line.trim();
            if line.is_empty() || line.starts_with("u,") {
                continue;
            }
            if let Some(header) = line.strip_prefix("# spectrum") {
                let mut w = 0;
                let mut h = 0;
                for tok in header.split_whitespace() {
                    match tok.split_once('=') {
                        Some(("width", v)) => w = v.parse().map_err(|_| err("bad width".into()))?,
                        Some(("height", v)) => h = v.parse().map_err(|_| err("bad height".into()))?,
                        _ => {}
                    }
                }
                if w == 0 || h == 0 {
                    return Err(err("missing dimensions".into()));
                }
                grid = Some(SpectrumGrid::empty(w, h));
                continue;
            }
            let g = grid.as_mut().ok_or_else(|| err("missing `# spectrum` header".into()))?;
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return Err(err(format!("expected 5 fields, got {}", f.len())));
            }
            let u: usize = f[0].parse().map_err(|_| err("bad u".into()))?;
            let v: usize = f[1].parse().map_err(|_| err("bad v".into()))?;
            let re: f64 = f[2].parse().map_err(|_| err("bad re".into()))?;
            let im: f64 = f[3].parse().map_err(|_| err("bad im".into()))?;
            if u >= g.width || v >= g.height {
                return Err(err(format!("frequency ({u}, {v}) outside grid")));
            }
            match f[4] {
                "1" => g.set(u, v, Complex64::new(re, im)),
                "0" => g.clear(u, v),
                other => return Err(err(format!("bad known flag `{other}`"))),
            }
        }
        grid.ok_or(FspiError::Parse { line: 1, message: "empty spectrum file".into() })
    }

    /// `log(1 + |C|)` with DC centred, min-max scaled to `[0, 1]`.
    pub fn log_magnitude(&self) -> Image {
        let (w, h) = (self.width, self.height);
        Image::from_fn(w, h, |x, y| {
            let u = (x + w - w / 2) % w;
            let v = (y + h - h / 2) % h;
            self.coeffs[v * w + u].norm().ln_1p()
        })
        .normalized()
    }

    /// Log-magnitude pseudo-color rendering, interleaved RGB8.
    pub fn pseudo_color_rgb(&self) -> Vec<u8> {
        self.log_magnitude()
            .data()
            .iter()
            .flat_map(|&t| {
                let c = SPECTRUM_COLORMAP.eval_continuous(t);
                [c.r, c.g, c.b]
            })
            .collect()
    }
}

/// Colormap used for spectrum renderings.
pub const SPECTRUM_COLORMAP: colorous::Gradient = colorous::VIRIDIS;
pub const SPECTRUM_COLORMAP_NAME: &str = "viridis";

fn group_codes(seq: &[f64], plan: &AcquisitionPlan, g: &Group) -> Vec<(u8, f64)> {
    g.range().map(|i| (plan.entries[i].phase_code, seq[i])).collect()
}

/// Combines every phase-shifted group of a sinusoid plan into one Fourier
/// coefficient.
pub fn assemble_spectrum(seq: &MeasurementSequence, plan: &AcquisitionPlan) -> Result<SpectrumGrid> {
    seq.check_plan(plan)?;
    let (w, h) = (plan.params.width, plan.params.height);
    let mut grid = SpectrumGrid::empty(w, h);
    for g in plan.groups() {
        let codes = group_codes(&seq.values, plan, &g);
        let mode = plan.entries[g.start].mode;
        let c = match (mode, codes.as_slice()) {
            (Mode::FourStepSinusoid, [(0, i0), (1, i1), (2, i2), (3, i3)]) => Complex64::new(i0 - i2, i1 - i3),
            (Mode::FourStepSinusoid, [(0, i0), (2, i2)]) => Complex64::new(i0 - i2, 0.0),
            (Mode::ThreeStepSinusoid, [(0, i0), (1, i1), (2, i2)]) => {
                Complex64::new(2.0 * i0 - i1 - i2, 3f64.sqrt() * (i1 - i2))
            }
            (Mode::FourStepSinusoid | Mode::ThreeStepSinusoid, _) => {
                return Err(FspiError::IncompleteGroup(g.start));
            }
            (other, _) => {
                return Err(FspiError::ModeMismatch(format!("cannot assemble a spectrum from {other} readings")))
            }
        };
        grid.set(g.u, g.v, c);
    }
    Ok(grid)
}

/// Fills each unknown frequency whose conjugate is known with the conjugate
/// value; zeroes the imaginary part of self-conjugate entries.
pub fn complete_symmetry(spec: &SpectrumGrid) -> SpectrumGrid {
    let (w, h) = (spec.width, spec.height);
    let mut out = spec.clone();
    for v in 0..h {
        for u in 0..w {
            let i = v * w + u;
            let (cu, cv) = conjugate(u, v, w, h);
            let ci = cv * w + cu;
            if ci == i {
                out.coeffs[i].im = 0.0;
            } else if !spec.known[i] && spec.known[ci] {
                out.coeffs[i] = spec.coeffs[ci].conj();
                out.known[i] = true;
            }
        }
    }
    out
}

/// In-place 2-D FFT of a row-major buffer. The inverse is scaled by `1/(W H)`.
pub fn fft2(data: &mut [Complex64], width: usize, height: usize, inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let row_fft = if inverse { planner.plan_fft_inverse(width) } else { planner.plan_fft_forward(width) };
    for row in data.chunks_exact_mut(width) {
        row_fft.process(row);
    }
    let col_fft = if inverse { planner.plan_fft_inverse(height) } else { planner.plan_fft_forward(height) };
    let mut col = vec![Complex64::new(0.0, 0.0); height];
    for x in 0..width {
        for y in 0..height {
            col[y] = data[y * width + x];
        }
        col_fft.process(&mut col);
        for y in 0..height {
            data[y * width + x] = col[y];
        }
    }
    if inverse {
        let scale = 1.0 / (width * height) as f64;
        data.iter_mut().for_each(|c| *c *= scale);
    }
}

/// Inverse 2-D DFT of the coefficients (unknown = 0), real part.
pub fn reconstruct(spec: &SpectrumGrid) -> Image {
    reconstruct_complex(spec).0
}

/// Real part of the inverse transform and the largest discarded imaginary
/// magnitude.
pub fn reconstruct_complex(spec: &SpectrumGrid) -> (Image, f64) {
    let mut buf = spec.coeffs.clone();
    fft2(&mut buf, spec.width, spec.height, true);
    let max_im = buf.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    let img = Image::new(spec.width, spec.height, buf.iter().map(|c| c.re).collect())
        .expect("spectrum dimensions are valid");
    (img, max_im)
}

/// Correlation (ghost imaging) estimate `<(I - <I>) (P - <P>)>` over entries.
pub fn cgi_reconstruct(seq: &MeasurementSequence, plan: &AcquisitionPlan) -> Result<Image> {
    seq.check_plan(plan)?;
    if plan.mode != Mode::Random {
        return Err(FspiError::ModeMismatch(format!("cgi reconstruction needs random patterns, got {}", plan.mode)));
    }
    let illuminator = Illuminator::for_plan(plan)?;
    let m = seq.len() as f64;
    let mean_i = crate::image::neumaier_sum(seq.values.iter().copied()) / m;
    let n = plan.params.pixels();
    let mut acc = vec![0.0; n];
    // sum (I - <I>) = 0, so the <P> term drops out.
    for (spec, &reading) in plan.entries.iter().zip(&seq.values) {
        let dev = reading - mean_i;
        let pattern = illuminator.pattern(spec)?;
        for (a, p) in acc.iter_mut().zip(pattern.data()) {
            *a += dev * p;
        }
    }
    acc.iter_mut().for_each(|a| *a /= m);
    Image::new(plan.params.width, plan.params.height, acc)
}

/// Inverse Hadamard transform of the differential readings
/// `d_k = I+_k - I-_k`; returns `2a R` noise-free.
pub fn hadamard_reconstruct(seq: &MeasurementSequence, plan: &AcquisitionPlan) -> Result<Image> {
    seq.check_plan(plan)?;
    if plan.mode != Mode::HadamardDiff {
        return Err(FspiError::ModeMismatch(format!("expected hadamard-diff plan, got {}", plan.mode)));
    }
    let (w, h) = (plan.params.width, plan.params.height);
    let n = w * h;
    let mut coeffs = vec![0.0; n];
    let mut seen = vec![false; n];
    for g in plan.groups() {
        let k = g.v * w + g.u;
        let mut plus = None;
        let mut minus = None;
        for i in g.range() {
            match plan.entries[i].polarity {
                Polarity::Plus => plus = Some(seq.values[i]),
                Polarity::Minus => minus = Some(seq.values[i]),
                Polarity::None => {}
            }
        }
        match (plus, minus) {
            (Some(p), Some(m)) if !seen[k] => {
                coeffs[k] = p - m;
                seen[k] = true;
            }
            _ => return Err(FspiError::IncompleteGroup(g.start)),
        }
    }
    if let Some(k) = seen.iter().position(|s| !s) {
        return Err(FspiError::InvalidArgument(format!("incomplete hadamard basis: index {k} missing")));
    }
    hadamard::fwht(&mut coeffs);
    coeffs.iter_mut().for_each(|c| *c /= n as f64);
    Image::new(w, h, coeffs)
}

/// Orthogonal-basis inversion for [`Mode::SinusoidOrthogonal`] plans.
///
/// The background `a * sum R` is estimated from the DC reading; each
/// remaining reading is projected back onto its basis function. Returns
/// `b R` noise-free.
pub fn orthogonal_reconstruct(seq: &MeasurementSequence, plan: &AcquisitionPlan) -> Result<Image> {
    orthogonal_reconstruct_with(seq, plan, Background::Plain)
}

/// Background model for sinusoid-orthogonal readings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Background {
    /// Constant illumination: every reading carries `a·S`.
    Plain,
    /// Readings are products of two pattern responses (a fused acquisition
    /// whose source follows another scene's readings), background `a²·S·Sw`.
    Fused,
}

/// Orthogonal projection with an explicit background model.
pub fn orthogonal_reconstruct_with(
    seq: &MeasurementSequence,
    plan: &AcquisitionPlan,
    model: Background,
) -> Result<Image> {
    seq.check_plan(plan)?;
    if plan.mode != Mode::SinusoidOrthogonal {
        return Err(FspiError::ModeMismatch(format!("expected sin-orth plan, got {}", plan.mode)));
    }
    let p = plan.params;
    let (w, h) = (p.width, p.height);
    let n = w * h;
    let dc = plan
        .entries
        .iter()
        .position(|e| e.u == 0 && e.v == 0 && e.phase_code == 0)
        .ok_or_else(|| FspiError::InvalidArgument("sin-orth plan lacks the DC pattern".into()))?;
    let ratio = p.a / (p.a + p.b);
    let background = match model {
        Background::Plain => ratio * seq.values[dc],
        Background::Fused => ratio * ratio * seq.values[dc],
    };
    let illuminator = Illuminator::new(p)?;
    let mut acc = vec![0.0; n];
    for (spec, &reading) in plan.entries.iter().zip(&seq.values) {
        let self_conj = conjugate(spec.u, spec.v, w, h) == (spec.u, spec.v);
        let norm = if self_conj { n as f64 } else { n as f64 / 2.0 };
        let coeff = (reading - background) / norm;
        let pattern = illuminator.pattern(spec)?;
        for (a, pv) in acc.iter_mut().zip(pattern.data()) {
            *a += coeff * (pv - p.a) / p.b;
        }
    }
    Image::new(w, h, acc)
}

/// Reconstructs with the inversion matching the plan's mode. Sinusoid plans
/// are symmetry-completed before the inverse transform.
pub fn reconstruct_plan(seq: &MeasurementSequence, plan: &AcquisitionPlan) -> Result<Image> {
    match plan.mode {
        Mode::FourStepSinusoid | Mode::ThreeStepSinusoid => {
            Ok(reconstruct(&complete_symmetry(&assemble_spectrum(seq, plan)?)))
        }
        Mode::SinusoidOrthogonal => orthogonal_reconstruct(seq, plan),
        Mode::HadamardDiff => hadamard_reconstruct(seq, plan),
        Mode::Random => cgi_reconstruct(seq, plan),
    }
}

/// Like [`reconstruct_plan`] but for readings taken under a watermark-driven
/// source. Only the sinusoid-orthogonal background differs.
pub fn reconstruct_fused(seq: &MeasurementSequence, plan: &AcquisitionPlan) -> Result<Image> {
    match plan.mode {
        Mode::SinusoidOrthogonal => orthogonal_reconstruct_with(seq, plan, Background::Fused),
        _ => reconstruct_plan(seq, plan),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detector::{measure, NoiseModel};
    use crate::illumination::{build_plan, build_random_plan, PatternParams, Sampling};

    fn test_scene(w: usize, h: usize) -> Image {
        Image::from_fn(w, h, |x, y| (((x * 31 + y * 17) % 13) as f64 / 12.0) * 0.8 + 0.1)
    }

    /// Direct O(N^2) forward DFT.
    fn direct_dft(img: &Image) -> Vec<Complex64> {
        let (w, h) = (img.width(), img.height());
        let mut out = vec![Complex64::new(0.0, 0.0); w * h];
        for v in 0..h {
            for u in 0..w {
                let mut acc = Complex64::new(0.0, 0.0);
                for y in 0..h {
                    for x in 0..w {
                        let ang = -2.0
                            * std::f64::consts::PI
                            * (u as f64 * x as f64 / w as f64 + v as f64 * y as f64 / h as f64);
                        acc += img.get(x, y) * Complex64::from_polar(1.0, ang);
                    }
                }
                out[v * w + u] = acc;
            }
        }
        out
    }

    #[test]
    fn four_step_equals_scaled_dft() {
        let p = PatternParams::new(16, 16);
        let scene = test_scene(16, 16);
        let plan = build_plan(Mode::FourStepSinusoid, p, Sampling::Full).unwrap();
        let seq = measure(&scene, &plan, None, &NoiseModel::none()).unwrap();
        let grid = assemble_spectrum(&seq, &plan).unwrap();
        let dft = direct_dft(&scene);
        let scale = grid.coeffs()[0] / dft[0];
        assert!((scale - Complex64::new(2.0 * p.b, 0.0)).norm() < 1e-9);
        let peak = grid.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
        for (c, d) in grid.coeffs().iter().zip(&dft) {
            assert!((c - scale * d).norm() <= 1e-9 * peak);
        }
    }

    #[test]
    fn three_step_equals_scaled_dft() {
        let p = PatternParams::new(8, 6);
        let scene = test_scene(8, 6);
        let plan = build_plan(Mode::ThreeStepSinusoid, p, Sampling::Full).unwrap();
        let seq = measure(&scene, &plan, None, &NoiseModel::none()).unwrap();
        let grid = assemble_spectrum(&seq, &plan).unwrap();
        let dft = direct_dft(&scene);
        let peak = grid.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
        for (c, d) in grid.coeffs().iter().zip(&dft) {
            assert!((c - 3.0 * p.b * d).norm() <= 1e-9 * peak);
        }
    }

    #[test]
    fn round_trip_recovers_scene() {
        let p = PatternParams::new(12, 10);
        let scene = test_scene(12, 10);
        let plan = build_plan(Mode::FourStepSinusoid, p, Sampling::Full).unwrap();
        let seq = measure(&scene, &plan, None, &NoiseModel::none()).unwrap();
        let (img, max_im) = reconstruct_complex(&assemble_spectrum(&seq, &plan).unwrap());
        let expect = scene.scale(2.0 * p.b);
        assert!(img.max_abs_diff(&expect) <= 1e-9 * expect.max_abs());
        assert!(max_im <= 1e-9 * expect.max_abs());
    }

    #[test]
    fn flat_scene_has_only_dc() {
        let p = PatternParams::new(6, 6);
        let plan = build_plan(Mode::FourStepSinusoid, p, Sampling::Full).unwrap();
        let seq = measure(&Image::filled(6, 6, 0.5), &plan, None, &NoiseModel::none()).unwrap();
        let grid = assemble_spectrum(&seq, &plan).unwrap();
        for (i, c) in grid.coeffs().iter().enumerate().skip(1) {
            assert!(c.norm() < 1e-9, "coefficient {i} = {c}");
        }
        let img = reconstruct(&grid);
        assert!(img.max() - img.min() < 1e-9);
    }

    #[test]
    fn half_spectrum_completion_matches_full() {
        for (w, h) in [(8, 8), (7, 6), (9, 5)] {
            let p = PatternParams::new(w, h);
            let scene = test_scene(w, h);
            let full = build_plan(Mode::FourStepSinusoid, p, Sampling::Full).unwrap();
            let half = build_plan(Mode::FourStepSinusoid, p, Sampling::HalfSpectrum).unwrap();
            let gf = assemble_spectrum(&measure(&scene, &full, None, &NoiseModel::none()).unwrap(), &full).unwrap();
            let gh = complete_symmetry(
                &assemble_spectrum(&measure(&scene, &half, None, &NoiseModel::none()).unwrap(), &half).unwrap(),
            );
            let peak = gf.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
            assert_eq!(gh.known_count(), w * h);
            for (a, b) in gf.coeffs().iter().zip(gh.coeffs()) {
                assert!((a - b).norm() <= 1e-9 * peak);
            }
        }
    }

    #[test]
    fn symmetry_completion_does_not_invent() {
        let mut g = SpectrumGrid::empty(4, 4);
        g.set(1, 0, Complex64::new(1.0, 2.0));
        let done = complete_symmetry(&g);
        assert_eq!(done.get(3, 0), Some(Complex64::new(1.0, -2.0)));
        assert_eq!(done.get(1, 1), None);
        assert_eq!(done.get(3, 3), None);
        assert_eq!(done.coeffs()[3 * 4 + 3], Complex64::new(0.0, 0.0));
        assert_eq!(complete_symmetry(&done), done);
    }

    #[test]
    fn incomplete_group_rejected() {
        let p = PatternParams::new(4, 4);
        let mut plan = build_plan(Mode::FourStepSinusoid, p, Sampling::Full).unwrap();
        plan.entries.remove(5);
        let seq = MeasurementSequence::new(vec![0.0; plan.len()], &plan);
        assert!(matches!(assemble_spectrum(&seq, &plan), Err(FspiError::IncompleteGroup(_))));
    }

    #[test]
    fn hadamard_round_trip() {
        let p = PatternParams::new(8, 8);
        let scene = test_scene(8, 8);
        let plan = build_plan(Mode::HadamardDiff, p, Sampling::Full).unwrap();
        let seq = measure(&scene, &plan, None, &NoiseModel::none()).unwrap();
        let img = hadamard_reconstruct(&seq, &plan).unwrap();
        let expect = scene.scale(2.0 * p.a);
        assert!(img.max_abs_diff(&expect) <= 1e-9 * expect.max_abs());
        assert!(cgi_reconstruct(&seq, &plan).is_err());
    }

    #[test]
    fn hadamard_flat_scene_only_first_coefficient() {
        let p = PatternParams::new(4, 4);
        let plan = build_plan(Mode::HadamardDiff, p, Sampling::Full).unwrap();
        let seq = measure(&Image::filled(4, 4, 1.0), &plan, None, &NoiseModel::none()).unwrap();
        for (k, pair) in seq.values.chunks(2).enumerate() {
            let d = pair[0] - pair[1];
            if k == 0 {
                assert!(d > 0.0);
            } else {
                assert!(d.abs() < 1e-9, "d_{k} = {d}");
            }
        }
    }

    #[test]
    fn fused_background_leaves_a_flat_watermark_as_pure_gain() {
        let (w, h) = (8, 6);
        let p = PatternParams::new(w, h);
        let scene = test_scene(w, h);
        let plan = build_plan(Mode::SinusoidOrthogonal, p, Sampling::Full).unwrap();
        let flat = Image::filled(w, h, 0.4);
        let tv = crate::watermark::watermark_tv(&flat, &plan, 0.0).unwrap();
        let weighted = measure(&scene, &plan, Some(&tv), &NoiseModel::none()).unwrap();
        let fused = orthogonal_reconstruct_with(&weighted, &plan, Background::Fused).unwrap();
        let plain = orthogonal_reconstruct(&measure(&scene, &plan, None, &NoiseModel::none()).unwrap(), &plan).unwrap();
        let gain = p.a * flat.sum() / tv.norm;
        let expect = plain.offset(-plain.mean()).scale(gain);
        let got = fused.offset(-fused.mean());
        assert!(got.max_abs_diff(&expect) <= 1e-9 * expect.max_abs());
        let naive = orthogonal_reconstruct(&weighted, &plan).unwrap();
        assert!(naive.offset(-naive.mean()).max_abs_diff(&expect) > 0.1 * expect.max_abs());
    }

    #[test]
    fn orthogonal_round_trip() {
        for (w, h) in [(8, 8), (6, 5)] {
            let p = PatternParams::new(w, h);
            let scene = test_scene(w, h);
            let plan = build_plan(Mode::SinusoidOrthogonal, p, Sampling::Full).unwrap();
            let seq = measure(&scene, &plan, None, &NoiseModel::none()).unwrap();
            let img = orthogonal_reconstruct(&seq, &plan).unwrap();
            let expect = scene.scale(p.b);
            assert!(img.max_abs_diff(&expect) <= 1e-9 * expect.max_abs(), "{w}x{h}");
        }
    }

    #[test]
    fn cgi_constant_sequence_is_zero() {
        let p = PatternParams::new(4, 4);
        let plan = build_random_plan(p, 50, 3).unwrap();
        let seq = MeasurementSequence::new(vec![7.0; 50], &plan);
        let img = cgi_reconstruct(&seq, &plan).unwrap();
        assert!(img.max_abs() < 1e-12);
    }

    #[test]
    fn cgi_finds_two_pixel_support() {
        let p = PatternParams::new(6, 6);
        let mut scene = Image::zeros(6, 6);
        scene.set(1, 2, 1.0);
        scene.set(4, 4, 1.0);
        for seed in [1, 2, 3] {
            let plan = build_random_plan(p, 20_000, seed).unwrap();
            let seq = measure(&scene, &plan, None, &NoiseModel::none()).unwrap();
            let img = cgi_reconstruct(&seq, &plan).unwrap();
            let mut order: Vec<usize> = (0..36).collect();
            order.sort_by(|&a, &b| img.data()[b].partial_cmp(&img.data()[a]).unwrap());
            let mut top = [order[0], order[1]];
            top.sort();
            assert_eq!(top, [2 * 6 + 1, 4 * 6 + 4], "seed {seed}");
        }
    }

    #[test]
    fn spectrum_csv_round_trip() {
        let mut g = SpectrumGrid::empty(3, 2);
        g.set(0, 0, Complex64::new(5.5, 0.0));
        g.set(2, 1, Complex64::new(-1.0 / 3.0, 1e-17));
        assert_eq!(SpectrumGrid::from_csv(&g.to_csv()).unwrap(), g);
    }

    #[test]
    fn pseudo_color_has_rgb_per_pixel() {
        let mut g = SpectrumGrid::empty(4, 4);
        g.set(0, 0, Complex64::new(10.0, 0.0));
        assert_eq!(g.pseudo_color_rgb().len(), 48);
        assert_eq!(g.log_magnitude().get(2, 2), 1.0);
    }
}
