use std::fs;
use std::io::Write;
use std::path::Path;

use image::{Rgba, RgbaImage};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::raster::Raster;

pub const ASCII_NODATA: f64 = -9999.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

/// Dark-to-bright ramp with monotone luminance.
const STOPS: [[f64; 3]; 5] = [
    [0.0, 0.0, 4.0],
    [87.0, 16.0, 110.0],
    [188.0, 55.0, 84.0],
    [249.0, 142.0, 9.0],
    [252.0, 255.0, 164.0],
];

pub fn colormap(t: f64) -> [u8; 3] {
    let t = t.clamp(0.0, 1.0) * (STOPS.len() - 1) as f64;
    let k = (t.floor() as usize).min(STOPS.len() - 2);
    let f = t - k as f64;
    let mut out = [0u8; 3];
    for c in 0..3 {
        out[c] = (STOPS[k][c] + (STOPS[k + 1][c] - STOPS[k][c]) * f).round() as u8;
    }
    out
}

fn normalizer(raster: &Raster, scale: Scale) -> impl Fn(f64) -> f64 {
    let (lo, hi) = raster.min_max().unwrap_or((0.0, 0.0));
    move |v: f64| {
        if hi <= lo {
            return 0.0;
        }
        match scale {
            Scale::Linear => (v - lo) / (hi - lo),
            Scale::Log => (v - lo).ln_1p() / (hi - lo).ln_1p(),
        }
    }
}

/// North-up RGBA image, one pixel per raster cell; nodata is transparent.
/// Two-band rasters are finalized first.
pub fn to_image(raster: &Raster, scale: Scale) -> RgbaImage {
    let raster = raster.finalize();
    let norm = normalizer(&raster, scale);
    RgbaImage::from_fn(raster.width, raster.height, |x, y| {
        let j = raster.height - 1 - y;
        match raster.value(x, j) {
            None => Rgba([0, 0, 0, 0]),
            Some(v) => {
                let [r, g, b] = colormap(norm(v));
                Rgba([r, g, b, 255])
            }
        }
    })
}

/// Writes `<path>` as PNG and a plain-text grid next to it with extension
/// `.asc`.
pub fn render(raster: &Raster, scale: Scale, path: &Path) -> Result<()> {
    if raster.is_empty() {
        return Err(Error::Validation("cannot render an empty raster".into()));
    }
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    to_image(raster, scale).save(path)?;
    write_ascii_grid(raster, &path.with_extension("asc"))
}

/// ESRI-style ASCII grid: header then rows from north to south.
pub fn write_ascii_grid(raster: &Raster, path: &Path) -> Result<()> {
    let raster = raster.finalize();
    let mut out = String::new();
    out.push_str(&format!("ncols {}\n", raster.width));
    out.push_str(&format!("nrows {}\n", raster.height));
    out.push_str(&format!("xllcorner {}\n", raster.origin_x));
    out.push_str(&format!("yllcorner {}\n", raster.origin_y));
    out.push_str(&format!("cellsize {}\n", raster.resolution));
    out.push_str(&format!("NODATA_value {}\n", ASCII_NODATA));
    for j in (0..raster.height).rev() {
        let row: Vec<String> = (0..raster.width)
            .map(|i| raster.value(i, j).unwrap_or(ASCII_NODATA).to_string())
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}
