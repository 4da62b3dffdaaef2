//! Equirectangular projection about a configurable reference point.

use serde::{Deserialize, Serialize};

pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub lat_ref: f64,
    pub lng_ref: f64,
}

impl Default for Projection {
    /// Centered on Danish waters.
    fn default() -> Self {
        Projection {
            lat_ref: 56.0,
            lng_ref: 11.0,
        }
    }
}

impl Projection {
    pub fn new(lat_ref: f64, lng_ref: f64) -> Self {
        Projection { lat_ref, lng_ref }
    }

    pub fn in_range(lat: f64, lng: f64) -> bool {
        (-90.0..=90.0).contains(&lat) && (-180.0..=180.0).contains(&lng)
    }

    fn x_scale(&self) -> f64 {
        EARTH_RADIUS_M * self.lat_ref.to_radians().cos()
    }

    /// Degrees to planar meters. `None` when lat/lng are out of range.
    pub fn forward(&self, lat: f64, lng: f64) -> Option<(f64, f64)> {
        if !Self::in_range(lat, lng) {
            return None;
        }
        let x = self.x_scale() * (lng - self.lng_ref).to_radians();
        let y = EARTH_RADIUS_M * (lat - self.lat_ref).to_radians();
        Some((x, y))
    }

    /// Planar meters to `(lat, lng)` degrees.
    pub fn inverse(&self, x: f64, y: f64) -> (f64, f64) {
        let lat = self.lat_ref + (y / EARTH_RADIUS_M).to_degrees();
        let lng = self.lng_ref + (x / self.x_scale()).to_degrees();
        (lat, lng)
    }
}
