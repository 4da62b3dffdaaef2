//! Land polygons for the on-land cleaning rule.
//!
//! File format: one vertex per line as `lng,lat` in degrees; polygons are
//! separated by blank lines; lines starting with `#` are comments. Rings are
//! closed implicitly.

use std::path::Path;

use crate::error::{Error, Result};

use super::projection::Projection;

#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    /// Ring vertices in planar meters.
    pub ring: Vec<(f64, f64)>,
    bbox: (f64, f64, f64, f64),
}

impl Polygon {
    pub fn new(ring: Vec<(f64, f64)>) -> Self {
        let mut bbox = (
            f64::INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::NEG_INFINITY,
        );
        for &(x, y) in &ring {
            bbox.0 = bbox.0.min(x);
            bbox.1 = bbox.1.min(y);
            bbox.2 = bbox.2.max(x);
            bbox.3 = bbox.3.max(y);
        }
        Polygon { ring, bbox }
    }

    /// Even-odd crossing test.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let (x0, y0, x1, y1) = self.bbox;
        if x < x0 || x > x1 || y < y0 || y > y1 || self.ring.len() < 3 {
            return false;
        }
        let mut inside = false;
        let n = self.ring.len();
        let mut j = n - 1;
        for i in 0..n {
            let (xi, yi) = self.ring[i];
            let (xj, yj) = self.ring[j];
            if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
                inside = !inside;
            }
            j = i;
        }
        inside
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LandMask {
    pub polygons: Vec<Polygon>,
}

impl LandMask {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.polygons.iter().any(|p| p.contains(x, y))
    }

    pub fn parse(text: &str, proj: &Projection) -> Result<Self> {
        let mut polygons = Vec::new();
        let mut ring = Vec::new();
        let flush = |ring: &mut Vec<(f64, f64)>, polygons: &mut Vec<Polygon>| {
            if ring.len() >= 3 {
                polygons.push(Polygon::new(std::mem::take(ring)));
            } else {
                ring.clear();
            }
        };
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.starts_with('#') {
                continue;
            }
            if line.is_empty() {
                flush(&mut ring, &mut polygons);
                continue;
            }
            let bad = || Error::format("land polygon", format!("line {}: `{line}`", n + 1));
            let (lng, lat) = line.split_once(',').ok_or_else(bad)?;
            let lng: f64 = lng.trim().parse().map_err(|_| bad())?;
            let lat: f64 = lat.trim().parse().map_err(|_| bad())?;
            ring.push(proj.forward(lat, lng).ok_or_else(bad)?);
        }
        flush(&mut ring, &mut polygons);
        Ok(LandMask { polygons })
    }

    pub fn load(path: &Path, proj: &Projection) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, proj)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_two_polygons() {
        let text =
            "# islands\n11.0,56.0\n11.1,56.0\n11.1,56.1\n\n10.0,55.0\n10.2,55.0\n10.1,55.2\n";
        let mask = LandMask::parse(text, &Projection::new(56.0, 11.0)).unwrap();
        assert_eq!(mask.polygons.len(), 2);
        assert!(LandMask::parse("11.0;56.0\n", &Projection::default()).is_err());
    }

    #[test]
    fn concave_polygon() {
        // U-shape opening upwards.
        let p = Polygon::new(vec![
            (0.0, 0.0),
            (30.0, 0.0),
            (30.0, 30.0),
            (20.0, 30.0),
            (20.0, 10.0),
            (10.0, 10.0),
            (10.0, 30.0),
            (0.0, 30.0),
        ]);
        assert!(p.contains(5.0, 20.0));
        assert!(p.contains(15.0, 5.0));
        assert!(!p.contains(15.0, 20.0));
        assert!(!p.contains(-1.0, 5.0));
    }
}
