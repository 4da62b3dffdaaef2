use serde::{Deserialize, Serialize};

use crate::ingest::{AisRecord, Mmsi};

/// Meters per second in one knot.
pub const KNOT_MS: f64 = 1852.0 / 3600.0;

/// One trajectory sample with its optional attribute readings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajPoint {
    pub t: i64,
    pub x: f64,
    pub y: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sog: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cog: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heading: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub draught: Option<f64>,
}

impl TrajPoint {
    pub fn new(t: i64, x: f64, y: f64) -> Self {
        TrajPoint {
            t,
            x,
            y,
            sog: None,
            cog: None,
            heading: None,
            draught: None,
        }
    }

    pub fn from_record(r: &AisRecord) -> Self {
        TrajPoint {
            t: r.t,
            x: r.x,
            y: r.y,
            sog: r.sog,
            cog: r.cog,
            heading: r.heading,
            draught: r.draught,
        }
    }

    pub fn dist(&self, other: &TrajPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Implied speed towards `next`, knots.
    pub fn speed_to(&self, next: &TrajPoint) -> f64 {
        let dt = (next.t - self.t) as f64;
        if dt <= 0.0 {
            return f64::INFINITY;
        }
        self.dist(next) / dt / KNOT_MS
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub id: u64,
    pub mmsi: Mmsi,
    pub infer_stopped: bool,
    /// Seconds between first and last sample.
    pub duration: i64,
    /// Sum of planar segment lengths, meters.
    pub length: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub destination: Option<String>,
    pub points: Vec<TrajPoint>,
}

impl Trajectory {
    /// Builds a trajectory and derives its measures. Points must be strictly
    /// increasing in time; at least two are required.
    pub fn new(
        id: u64,
        mmsi: Mmsi,
        points: Vec<TrajPoint>,
        infer_stopped: bool,
        destination: Option<String>,
    ) -> Self {
        debug_assert!(points.len() >= 2);
        debug_assert!(points.windows(2).all(|w| w[0].t < w[1].t));
        let duration = points.last().unwrap().t - points[0].t;
        Trajectory {
            id,
            mmsi,
            infer_stopped,
            duration,
            length: path_length(&points),
            destination,
            points,
        }
    }

    pub fn t_start(&self) -> i64 {
        self.points[0].t
    }

    pub fn t_end(&self) -> i64 {
        self.points[self.points.len() - 1].t
    }

    /// Linearly interpolated position at `t` (clamped to the time span).
    pub fn position_at(&self, t: f64) -> (f64, f64) {
        let pts = &self.points;
        if t <= pts[0].t as f64 {
            return (pts[0].x, pts[0].y);
        }
        let k = pts.partition_point(|p| (p.t as f64) <= t);
        if k >= pts.len() {
            let p = pts[pts.len() - 1];
            return (p.x, p.y);
        }
        let (a, b) = (pts[k - 1], pts[k]);
        let f = (t - a.t as f64) / (b.t - a.t) as f64;
        (a.x + f * (b.x - a.x), a.y + f * (b.y - a.y))
    }
}

pub fn path_length(points: &[TrajPoint]) -> f64 {
    points.windows(2).map(|w| w[0].dist(&w[1])).sum()
}

/// Trajectory construction and simplification thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrajectoryParams {
    /// Silence longer than this splits a trajectory, seconds.
    pub gap_split: f64,
    /// SOG below this marks a stopped sample, knots.
    pub stop_sog: f64,
    /// Minimum length of a stopped run, seconds.
    pub stop_min_duration: f64,
    /// Implied speed above this marks an outlier, knots.
    pub outlier_speed: f64,
    /// Douglas-Peucker SED tolerance, meters.
    pub simplify_epsilon: f64,
}

impl Default for TrajectoryParams {
    fn default() -> Self {
        TrajectoryParams {
            gap_split: 300.0,
            stop_sog: 0.5,
            stop_min_duration: 300.0,
            outlier_speed: 100.0,
            simplify_epsilon: 10.0,
        }
    }
}

impl TrajectoryParams {
    pub fn violations(&self) -> Vec<String> {
        [
            ("gap_split", self.gap_split),
            ("stop_sog", self.stop_sog),
            ("stop_min_duration", self.stop_min_duration),
            ("outlier_speed", self.outlier_speed),
            ("simplify_epsilon", self.simplify_epsilon),
        ]
        .into_iter()
        .filter(|(_, v)| !(*v > 0.0 && v.is_finite()))
        .map(|(name, v)| format!("trajectory.{name} must be strictly positive (got {v})"))
        .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measures_and_interpolation() {
        let pts = vec![
            TrajPoint::new(0, 0.0, 0.0),
            TrajPoint::new(10, 30.0, 40.0),
            TrajPoint::new(30, 30.0, 0.0),
        ];
        let t = Trajectory::new(1, Mmsi(219_000_001), pts, false, None);
        assert_eq!(t.duration, 30);
        assert_eq!(t.length, 90.0);
        assert_eq!(t.position_at(5.0), (15.0, 20.0));
        assert_eq!(t.position_at(20.0), (30.0, 20.0));
        assert_eq!(t.position_at(99.0), (30.0, 0.0));
    }

    #[test]
    fn params_validation() {
        assert!(TrajectoryParams::default().violations().is_empty());
        let p = TrajectoryParams {
            gap_split: 0.0,
            outlier_speed: -1.0,
            ..Default::default()
        };
        assert_eq!(p.violations().len(), 2);
    }
}
