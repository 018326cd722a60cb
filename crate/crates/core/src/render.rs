//! Deterministic scatter rasterization of point clouds.

use std::path::Path;

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, ImageEncoder, ImageFormat, Rgb, RgbImage};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::words::Letter;

pub const PALETTE: [[u8; 3]; 6] =
    [[214, 39, 40], [44, 160, 44], [31, 119, 180], [255, 127, 14], [148, 103, 189], [140, 86, 75]];

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RenderSpec {
    pub width: u32,
    pub height: u32,
    /// `[xmin, xmax, ymin, ymax]`; fitted to the points with a 5% margin when absent.
    pub window: Option<[f64; 4]>,
    pub palette: Vec<[u8; 3]>,
    pub background: [u8; 3],
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec { width: 512, height: 512, window: None, palette: PALETTE.to_vec(), background: [255, 255, 255] }
    }
}

/// Extra layers drawn over a scatter plot.
#[derive(Clone, Debug, Default)]
pub struct Overlay {
    /// Copies of the cloud shifted by these planar vectors, drawn in faded colors.
    pub translates: Vec<[f64; 2]>,
    /// Segments `(from, to)` drawn in black, with a small head at `to`.
    pub arrows: Vec<([f64; 2], [f64; 2])>,
}

/// Bounding box of the points, padded by 5%; a unit box around the origin if empty.
pub fn fit_window(points: &[(Letter, [f64; 2])]) -> [f64; 4] {
    if points.is_empty() {
        return [-1.0, 1.0, -1.0, 1.0];
    }
    let mut w = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
    for (_, p) in points {
        w[0] = w[0].min(p[0]);
        w[1] = w[1].max(p[0]);
        w[2] = w[2].min(p[1]);
        w[3] = w[3].max(p[1]);
    }
    let span = (w[1] - w[0]).max(w[3] - w[2]).max(1e-9);
    let (cx, cy) = ((w[0] + w[1]) / 2.0, (w[2] + w[3]) / 2.0);
    let half = 0.55 * span;
    [cx - half, cx + half, cy - half, cy + half]
}

/// Draws one pixel per point, coloring by letter. Later points overwrite
/// earlier ones, so the result depends only on the input order.
pub fn render(points: &[(Letter, [f64; 2])], spec: &RenderSpec, overlay: &Overlay) -> Result<RgbImage> {
    let window = spec.window.unwrap_or_else(|| fit_window(points));
    if !(window[1] > window[0] && window[3] > window[2]) {
        return Err(Error::input("degenerate render window"));
    }
    if spec.width == 0 || spec.height == 0 {
        return Err(Error::input("empty raster"));
    }
    if spec.palette.is_empty() {
        return Err(Error::input("empty palette"));
    }
    let mut img = RgbImage::from_pixel(spec.width, spec.height, Rgb(spec.background));
    let to_px = |p: [f64; 2]| -> Option<(u32, u32)> {
        let fx = (p[0] - window[0]) / (window[1] - window[0]);
        let fy = (window[3] - p[1]) / (window[3] - window[2]);
        let x = (fx * spec.width as f64).floor();
        let y = (fy * spec.height as f64).floor();
        (x >= 0.0 && y >= 0.0 && x < spec.width as f64 && y < spec.height as f64).then_some((x as u32, y as u32))
    };
    let color = |a: Letter| spec.palette[a as usize % spec.palette.len()];
    for shift in &overlay.translates {
        for (a, p) in points {
            if let Some((x, y)) = to_px([p[0] + shift[0], p[1] + shift[1]]) {
                let c = color(*a);
                let bg = spec.background;
                let faded = [0, 1, 2].map(|i| ((c[i] as u16 + 2 * bg[i] as u16) / 3) as u8);
                img.put_pixel(x, y, Rgb(faded));
            }
        }
    }
    for (a, p) in points {
        if let Some((x, y)) = to_px(*p) {
            img.put_pixel(x, y, Rgb(color(*a)));
        }
    }
    for &(from, to) in &overlay.arrows {
        let steps = 2 * (spec.width + spec.height) as usize;
        for i in 0..=steps {
            let s = i as f64 / steps as f64;
            let p = [from[0] + s * (to[0] - from[0]), from[1] + s * (to[1] - from[1])];
            if let Some((x, y)) = to_px(p) {
                img.put_pixel(x, y, Rgb([0, 0, 0]));
            }
        }
        if let Some((x, y)) = to_px(to) {
            for dx in -2i64..=2 {
                for dy in -2i64..=2 {
                    let (px, py) = (x as i64 + dx, y as i64 + dy);
                    if px >= 0 && py >= 0 && (px as u32) < spec.width && (py as u32) < spec.height {
                        img.put_pixel(px as u32, py as u32, Rgb([0, 0, 0]));
                    }
                }
            }
        }
    }
    Ok(img)
}

/// Writes PNG or binary PPM, chosen by the file extension.
pub fn save(img: &RgbImage, path: &Path) -> Result<()> {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("png") => img.save_with_format(path, ImageFormat::Png)?,
        Some("ppm") => {
            let file = std::io::BufWriter::new(std::fs::File::create(path)?);
            PnmEncoder::new(file)
                .with_subtype(PnmSubtype::Pixmap(SampleEncoding::Binary))
                .write_image(img.as_raw(), img.width(), img.height(), ExtendedColorType::Rgb8)?;
        }
        _ => return Err(Error::input(format!("unsupported image extension: {}", path.display()))),
    }
    Ok(())
}

/// Fraction of pixels that differ between two images of the same size.
pub fn pixel_difference(a: &RgbImage, b: &RgbImage) -> f64 {
    if a.dimensions() != b.dimensions() {
        return 1.0;
    }
    let diff = a.pixels().zip(b.pixels()).filter(|(p, q)| p != q).count();
    diff as f64 / (a.width() as f64 * a.height() as f64)
}

/// Places images side by side in a grid of `cols` columns.
pub fn tile(images: &[RgbImage], cols: usize, background: [u8; 3]) -> RgbImage {
    let (w, h) = images.first().map(|i| i.dimensions()).unwrap_or((1, 1));
    let cols = cols.max(1);
    let rows = images.len().div_ceil(cols).max(1);
    let mut out = RgbImage::from_pixel(w * cols as u32, h * rows as u32, Rgb(background));
    for (k, img) in images.iter().enumerate() {
        let (ox, oy) = ((k % cols) as u32 * w, (k / cols) as u32 * h);
        for (x, y, p) in img.enumerate_pixels() {
            if x < w && y < h {
                out.put_pixel(ox + x, oy + y, *p);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_cloud_is_blank() {
        let img = render(&[], &RenderSpec::default(), &Overlay::default()).unwrap();
        assert!(img.pixels().all(|p| p.0 == [255, 255, 255]));
    }

    #[test]
    fn degenerate_window_is_rejected() {
        let spec = RenderSpec { window: Some([0.0, 0.0, 0.0, 1.0]), ..RenderSpec::default() };
        assert!(render(&[(0, [0.0, 0.0])], &spec, &Overlay::default()).is_err());
    }

    #[test]
    fn rendering_is_deterministic() {
        let pts: Vec<(Letter, [f64; 2])> =
            (0..1000).map(|i| ((i % 3) as Letter, [(i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()])).collect();
        let a = render(&pts, &RenderSpec::default(), &Overlay::default()).unwrap();
        let b = render(&pts, &RenderSpec::default(), &Overlay::default()).unwrap();
        assert_eq!(pixel_difference(&a, &b), 0.0);
        assert!(a.pixels().any(|p| p.0 == PALETTE[0]));
    }

    #[test]
    fn ppm_round_trip() {
        let dir = std::env::temp_dir().join(format!("sadic-render-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let img = render(&[(1, [0.0, 0.0])], &RenderSpec { width: 8, height: 8, ..Default::default() }, &Overlay::default())
            .unwrap();
        let path = dir.join("x.ppm");
        save(&img, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert!(bytes.starts_with(b"P6"));
        let back = image::open(&path).unwrap().to_rgb8();
        assert_eq!(pixel_difference(&img, &back), 0.0);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
