use serde::{Deserialize, Serialize};

use crate::geom::Rect;

use super::types::AggKind;

/// Georeferenced pixel grid. Pixel `(i, j)` covers
/// `[origin_x + i*res, origin_x + (i+1)*res) x [origin_y + j*res, ...)` and
/// is stored at `j * width + i`, so rows run south to north.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Raster {
    pub origin_x: f64,
    pub origin_y: f64,
    pub resolution: f64,
    pub width: u32,
    pub height: u32,
    pub bands: Vec<Vec<f64>>,
    /// `true` where the pixel holds no data. Band values there are 0.
    pub nodata: Vec<bool>,
}

impl Raster {
    /// All-nodata raster.
    pub fn empty(
        origin: (f64, f64),
        resolution: f64,
        width: u32,
        height: u32,
        bands: usize,
    ) -> Self {
        let n = (width * height) as usize;
        Raster {
            origin_x: origin.0,
            origin_y: origin.1,
            resolution,
            width,
            height,
            bands: vec![vec![0.0; n]; bands],
            nodata: vec![true; n],
        }
    }

    pub fn len(&self) -> usize {
        self.nodata.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodata.is_empty()
    }

    pub fn extent(&self) -> Rect {
        Rect::new(
            self.origin_x,
            self.origin_y,
            self.origin_x + self.width as f64 * self.resolution,
            self.origin_y + self.height as f64 * self.resolution,
        )
    }

    pub fn index(&self, i: u32, j: u32) -> usize {
        (j * self.width + i) as usize
    }

    /// Band 0 at `(i, j)`, `None` for nodata.
    pub fn value(&self, i: u32, j: u32) -> Option<f64> {
        let k = self.index(i, j);
        (!self.nodata[k]).then(|| self.bands[0][k])
    }

    pub fn center(&self, i: u32, j: u32) -> (f64, f64) {
        (
            self.origin_x + (i as f64 + 0.5) * self.resolution,
            self.origin_y + (j as f64 + 0.5) * self.resolution,
        )
    }

    pub fn data_count(&self) -> usize {
        self.nodata.iter().filter(|&&n| !n).count()
    }

    /// Sum of band 0 over data pixels.
    pub fn sum(&self) -> f64 {
        self.bands[0]
            .iter()
            .zip(&self.nodata)
            .filter(|(_, &nd)| !nd)
            .map(|(v, _)| v)
            .sum()
    }

    /// `(min, max)` of band 0 over data pixels.
    pub fn min_max(&self) -> Option<(f64, f64)> {
        self.bands[0]
            .iter()
            .zip(&self.nodata)
            .filter(|(_, &nd)| !nd)
            .fold(None, |acc, (&v, _)| match acc {
                None => Some((v, v)),
                Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
            })
    }

    /// Collapses a sum/count raster to sum/count; count 0 becomes nodata.
    /// Single-band rasters are returned unchanged.
    pub fn finalize(&self) -> Raster {
        if self.bands.len() != 2 {
            return self.clone();
        }
        let mut out = Raster::empty(
            (self.origin_x, self.origin_y),
            self.resolution,
            self.width,
            self.height,
            1,
        );
        for k in 0..self.len() {
            let count = self.bands[1][k];
            if !self.nodata[k] && count > 0.0 {
                out.bands[0][k] = self.bands[0][k] / count;
                out.nodata[k] = false;
            }
        }
        out
    }

    /// Folds the pixels of `src` that overlap `self` into `self`.
    /// Both grids must share the same resolution and lattice.
    pub fn accumulate(&mut self, kind: AggKind, src: PixelsRef<'_>) {
        let res = self.resolution;
        debug_assert_eq!(res, src.resolution);
        let off_i = ((src.origin.0 - self.origin_x) / res).round() as i64;
        let off_j = ((src.origin.1 - self.origin_y) / res).round() as i64;
        let i_lo = off_i.max(0);
        let i_hi = (off_i + src.width as i64).min(self.width as i64);
        let j_lo = off_j.max(0);
        let j_hi = (off_j + src.height as i64).min(self.height as i64);
        for j in j_lo..j_hi {
            for i in i_lo..i_hi {
                let s = ((j - off_j) * src.width as i64 + (i - off_i)) as usize;
                if src.nodata[s] {
                    continue;
                }
                let d = (j * self.width as i64 + i) as usize;
                combine(kind, &mut self.bands, &mut self.nodata, d, src.bands, s);
            }
        }
    }

    pub fn as_pixels(&self) -> PixelsRef<'_> {
        PixelsRef {
            origin: (self.origin_x, self.origin_y),
            resolution: self.resolution,
            width: self.width,
            height: self.height,
            bands: &self.bands,
            nodata: &self.nodata,
        }
    }

    /// Sets every pixel whose center lies outside `area` to nodata.
    pub fn clip(&mut self, area: &Rect) {
        for j in 0..self.height {
            for i in 0..self.width {
                let (x, y) = self.center(i, j);
                if !area.contains(x, y) {
                    let k = self.index(i, j);
                    self.nodata[k] = true;
                    for b in &mut self.bands {
                        b[k] = 0.0;
                    }
                }
            }
        }
    }
}

/// Borrowed view of a georeferenced pixel block (a raster or a tile).
#[derive(Clone, Copy)]
pub struct PixelsRef<'a> {
    pub origin: (f64, f64),
    pub resolution: f64,
    pub width: u32,
    pub height: u32,
    pub bands: &'a [Vec<f64>],
    pub nodata: &'a [bool],
}

/// Folds source pixel `s` into destination pixel `d`. Nodata is the
/// identity for every kind.
pub(crate) fn combine(
    kind: AggKind,
    dst: &mut [Vec<f64>],
    dst_nodata: &mut [bool],
    d: usize,
    src: &[Vec<f64>],
    s: usize,
) {
    if dst_nodata[d] {
        for (db, sb) in dst.iter_mut().zip(src) {
            db[d] = sb[s];
        }
        dst_nodata[d] = false;
        return;
    }
    match kind {
        AggKind::Sum | AggKind::Avg => {
            for (db, sb) in dst.iter_mut().zip(src) {
                db[d] += sb[s];
            }
        }
        AggKind::Min => dst[0][d] = dst[0][d].min(src[0][s]),
    }
}
