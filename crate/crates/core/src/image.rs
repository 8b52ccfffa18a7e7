//! Real-valued 2-D maps used for scenes, watermarks, patterns and reconstructions.

use crate::error::{dims, FspiError, Result};

/// Row-major real image. Index `y * width + x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Image {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(FspiError::InvalidArgument(format!(
                "image dimensions must be >= 1, got {}",
                dims(width, height)
            )));
        }
        if data.len() != width * height {
            return Err(FspiError::LengthMismatch { expected: width * height, got: data.len() });
        }
        Ok(Self { width, height, data })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be >= 1");
        Self { width, height, data: vec![value; width * height] }
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self::filled(width, height, 0.0)
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be >= 1");
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self { width, height, data }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        self.data[y * self.width + x] = value;
    }

    pub fn same_dims(&self, other: &Image) -> bool {
        self.width == other.width && self.height == other.height
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

    pub fn sum(&self) -> f64 {
        neumaier_sum(self.data.iter().copied())
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.data.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Image {
        Image { width: self.width, height: self.height, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    pub fn scale(&self, k: f64) -> Image {
        self.map(|v| v * k)
    }

    pub fn offset(&self, c: f64) -> Image {
        self.map(|v| v + c)
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: f64, other: &Image, beta: f64) -> Result<Image> {
        other.check_dims(self.width, self.height)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| alpha * a + beta * b).collect();
        Ok(Image { width: self.width, height: self.height, data })
    }

    /// Min-max rescale to `[0, 1]`. A flat image maps to all zeros.
    pub fn normalized(&self) -> Image {
        self.rescaled(0.0, 1.0)
    }

    /// Min-max rescale to `[lo, hi]`.
    pub fn rescaled(&self, lo: f64, hi: f64) -> Image {
        let (min, max) = (self.min(), self.max());
        let range = max - min;
        if range <= 0.0 || !range.is_finite() {
            return Image::filled(self.width, self.height, lo);
        }
        self.map(|v| lo + (v - min) / range * (hi - lo))
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn max_abs_diff(&self, other: &Image) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// Quantize a `[0, 1]` image to 8-bit gray levels.
    pub fn to_gray8(&self) -> Vec<u8> {
        self.data.iter().map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8).collect()
    }

    pub fn from_gray8(width: usize, height: usize, pixels: &[u8]) -> Result<Image> {
        Image::new(width, height, pixels.iter().map(|&p| p as f64 / 255.0).collect())
    }
}

/// Three equal-sized channels.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorImage {
    pub channels: [Image; 3],
}

impl ColorImage {
    pub fn new(r: Image, g: Image, b: Image) -> Result<Self> {
        g.check_dims(r.width(), r.height())?;
        b.check_dims(r.width(), r.height())?;
        Ok(Self { channels: [r, g, b] })
    }

    pub fn gray(img: &Image) -> Self {
        Self { channels: [img.clone(), img.clone(), img.clone()] }
    }

    pub fn width(&self) -> usize {
        self.channels[0].width()
    }

    pub fn height(&self) -> usize {
        self.channels[0].height()
    }

    /// Interleaved 8-bit RGB from `[0, 1]` channels.
    pub fn to_rgb8(&self) -> Vec<u8> {
        let [r, g, b] = &self.channels;
        let q = |v: f64| (v.clamp(0.0, 1.0) * 255.0).round() as u8;
        r.data()
            .iter()
            .zip(g.data())
            .zip(b.data())
            .flat_map(|((&r, &g), &b)| [q(r), q(g), q(b)])
            .collect()
    }
}

/// Compensated (Neumaier) summation.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Compensated dot product of two equal-length slices.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    neumaier_sum(a.iter().zip(b).map(|(x, y)| x * y))
}
