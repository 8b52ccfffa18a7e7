//! Three interactive operations for the static page in `www/`. Images come
//! back as RGBA bytes ready for `ImageData`.

use fspi::detector::{measure, NoiseModel};
use fspi::experiments::StegoSetup;
use fspi::illumination::{build_plan, Mode, PatternParams, Sampling};
use fspi::recon::reconstruct_plan;
use fspi::stego::default_mapping;
use fspi::watermark::{embed, q_factor};
use fspi::{scenes, Image};
use wasm_bindgen::prelude::*;

fn js(e: fspi::FspiError) -> JsError {
    JsError::new(&e.to_string())
}

fn scene(name: &str, size: usize) -> Result<Image, JsError> {
    scenes::by_name(name, size).ok_or_else(|| JsError::new(&format!("unknown scene `{name}`")))
}

/// Min-max scaled gray as RGBA.
pub fn rgba(img: &Image) -> Vec<u8> {
    img.normalized().to_gray8().iter().flat_map(|&g| [g, g, g, 255]).collect()
}

#[wasm_bindgen]
pub fn scene_names() -> Vec<String> {
    scenes::NAMES.iter().map(|s| s.to_string()).collect()
}

/// Fused image of `host` taken under the readings of `mark` lifted by `dc`.
#[wasm_bindgen]
pub fn fusion(host: &str, mark: &str, size: usize, dc: f64) -> Result<Vec<u8>, JsError> {
    let (s, w) = (scene(host, size)?, scene(mark, size)?);
    let plan = build_plan(Mode::FourStepSinusoid, PatternParams::new(size, size), Sampling::HalfSpectrum).map_err(js)?;
    Ok(rgba(&embed(&s, &w, &plan, dc, &NoiseModel::none()).map_err(js)?.fused))
}

/// Host-to-watermark weight ratio of the fused image.
#[wasm_bindgen]
pub fn fusion_q(host: &str, mark: &str, size: usize, dc: f64) -> Result<f64, JsError> {
    let (s, w) = (scene(host, size)?, scene(mark, size)?);
    q_factor(&s, &w, dc, &PatternParams::new(size, size)).map_err(js)
}

/// Plain reconstruction from the lowest `fraction` of frequencies.
#[wasm_bindgen]
pub fn low_frequency(name: &str, size: usize, fraction: f64) -> Result<Vec<u8>, JsError> {
    let s = scene(name, size)?;
    let plan = build_plan(Mode::FourStepSinusoid, PatternParams::new(size, size), Sampling::LowFrequency(fraction))
        .map_err(js)?;
    let seq = measure(&s, &plan, None, &NoiseModel::none()).map_err(js)?;
    Ok(rgba(&reconstruct_plan(&seq, &plan).map_err(js)?))
}

/// A hidden watermark embedded once; decoded on demand under noise and with
/// any receiver key.
#[wasm_bindgen]
pub struct Stego {
    setup: StegoSetup,
    host: Vec<u8>,
    mark: Vec<u8>,
}

#[wasm_bindgen]
impl Stego {
    #[wasm_bindgen(constructor)]
    pub fn new(host: &str, mark: &str, size: usize, r1_side: usize, key: u64) -> Result<Stego, JsError> {
        let setup = StegoSetup::new(&scene(host, size)?, &scene(mark, size)?, r1_side, Some(key)).map_err(js)?;
        Ok(Stego { setup, host: Vec::new(), mark: Vec::new() })
    }

    /// Decodes at `snr_db` (`None` for noise-free) using `receiver_key`.
    pub fn decode(&mut self, snr_db: Option<f64>, seed: u64, receiver_key: u64) -> Result<(), JsError> {
        let s = &self.setup;
        let mapping = default_mapping(&s.mask, s.mapping.wm_width, s.mapping.wm_height, Some(receiver_key))
            .map_err(js)?;
        let noise = snr_db.map_or(NoiseModel::none(), |snr| NoiseModel::gaussian(snr, seed));
        let readings = fspi::detector::apply_noise(&s.clean, &noise).map_err(js)?;
        let out = s.decode(&readings, &mapping).map_err(js)?;
        self.host = rgba(&out.host);
        self.mark = rgba(&out.watermark);
        Ok(())
    }

    pub fn host(&self) -> Vec<u8> {
        self.host.clone()
    }

    pub fn watermark(&self) -> Vec<u8> {
        self.mark.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gray(bytes: &[u8], n: usize) -> Image {
        Image::new(n, n, bytes.chunks(4).map(|p| p[0] as f64).collect()).unwrap()
    }

    #[test]
    fn buffers_are_rgba() {
        assert_eq!(fusion("peppers", "logo", 16, 0.0).unwrap().len(), 16 * 16 * 4);
        assert_eq!(low_frequency("phantom", 16, 0.2).unwrap().len(), 16 * 16 * 4);
        assert!(fusion_q("peppers", "logo", 16, 0.5).unwrap() > 0.0);
    }

    #[test]
    fn full_fraction_reproduces_the_scene() {
        let n = 16;
        let full = gray(&low_frequency("chart", n, 1.0).unwrap(), n);
        let direct = gray(&rgba(&scenes::resolution_chart(n)), n);
        assert!(full.max_abs_diff(&direct) <= 1.0);
    }
}
