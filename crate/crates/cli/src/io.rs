use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ColorType, ImageEncoder};
use fspi::{scenes, ColorImage, Image};

const SYNTHETIC: &str = "synthetic:";

/// Gray image from a file (values scaled to [0, 1]) or a synthetic scene.
pub fn load_gray(source: &str, size: usize) -> Result<Image> {
    if let Some(name) = source.strip_prefix(SYNTHETIC) {
        return scenes::by_name(name, size)
            .ok_or_else(|| anyhow!("unknown synthetic scene `{name}` (known: {})", scenes::NAMES.join(", ")));
    }
    let img = image::open(source).with_context(|| format!("reading image {source}"))?.to_luma16();
    let (w, h) = img.dimensions();
    let data = img.pixels().map(|p| p.0[0] as f64 / 65535.0).collect();
    Ok(Image::new(w as usize, h as usize, data)?)
}

/// Color image; `synthetic:color` and `synthetic:color-mark` are the built-in
/// color pair, other synthetic names are replicated gray.
pub fn load_color(source: &str, size: usize) -> Result<ColorImage> {
    match source.strip_prefix(SYNTHETIC) {
        Some("color") => return Ok(scenes::color_scene(size)),
        Some("color-mark") => return Ok(scenes::color_watermark(size)),
        Some(_) => return Ok(ColorImage::gray(&load_gray(source, size)?)),
        None => {}
    }
    let img = image::open(source).with_context(|| format!("reading image {source}"))?.to_rgb16();
    let (w, h) = (img.width() as usize, img.height() as usize);
    let channel = |c: usize| Image::new(w, h, img.pixels().map(|p| p.0[c] as f64 / 65535.0).collect());
    Ok(ColorImage::new(channel(0)?, channel(1)?, channel(2)?)?)
}

pub struct OutDir {
    root: PathBuf,
    pub written: Vec<PathBuf>,
}

impl OutDir {
    pub fn create(root: PathBuf) -> Result<Self> {
        fs::create_dir_all(&root).with_context(|| format!("creating {}", root.display()))?;
        Ok(Self { root, written: Vec::new() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn text(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.path(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(path);
        Ok(())
    }

    /// Min-max scaled 8-bit image; the format follows the extension.
    pub fn gray(&mut self, name: &str, img: &Image) -> Result<()> {
        let pixels = img.normalized().to_gray8();
        self.save(name, &pixels, img.width(), img.height(), ColorType::L8)
    }

    pub fn rgb(&mut self, name: &str, width: usize, height: usize, pixels: &[u8]) -> Result<()> {
        self.save(name, pixels, width, height, ColorType::Rgb8)
    }

    /// `.pgm`/`.ppm` become binary P5/P6; anything else goes by extension.
    fn save(&mut self, name: &str, pixels: &[u8], width: usize, height: usize, color: ColorType) -> Result<()> {
        let path = self.path(name);
        let (w, h) = (width as u32, height as u32);
        let result = match path.extension().and_then(|e| e.to_str()) {
            Some("pgm" | "ppm") => {
                let subtype = match color {
                    ColorType::L8 => PnmSubtype::Graymap(SampleEncoding::Binary),
                    _ => PnmSubtype::Pixmap(SampleEncoding::Binary),
                };
                let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                PnmEncoder::new(std::io::BufWriter::new(file)).with_subtype(subtype).write_image(pixels, w, h, color.into())
            }
            _ => image::save_buffer(&path, pixels, w, h, color),
        };
        result.with_context(|| format!("writing {}", path.display()))?;
        self.written.push(path);
        Ok(())
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Raw float image: `# image width= height=` then one comma-separated row per line.
pub fn image_csv(img: &Image) -> String {
    let mut out = format!("# image width={} height={}\n", img.width(), img.height());
    for row in img.data().chunks(img.width()) {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
fn image_from_csv(text: &str) -> Result<Image> {
    let mut rows = Vec::new();
    for line in text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
        let row: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>().map_err(|e| anyhow!("bad value `{c}`: {e}")))
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    let width = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != width) {
        anyhow::bail!("ragged image csv");
    }
    Ok(Image::new(width, rows.len(), rows.concat())?)
}
