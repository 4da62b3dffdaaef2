//! Trajectory to cell-event rollup.
//!
//! Each segment between two consecutive samples is walked across the grid by
//! stepping through its vertical and horizontal line crossings in parameter
//! order (a DDA traversal). Consecutive pieces in the same cell and on the
//! same UTC day are merged into one event, so an event is a maximal interval
//! during which the interpolated position stays in one cell.

use serde::{Deserialize, Serialize};

use crate::geom::Domain;
use crate::ingest::Mmsi;
use crate::time::{self, SECONDS_PER_DAY};
use crate::trajectory::{TrajPoint, Trajectory};

use super::cell::{CellKey, Granularity};

/// Crossings closer together than this (meters along the segment) are
/// treated as one, so grazing a grid corner yields no sliver events.
const MIN_SEPARATION_M: f64 = 1e-7;

/// One ship's passage through one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellEvent {
    pub cell: CellKey,
    pub trajectory_id: u64,
    pub mmsi: Mmsi,
    pub t_enter: f64,
    pub t_exit: f64,
    pub duration: f64,
    /// Time-weighted mean SOG over the event, knots.
    pub avg_sog: f64,
    /// Sum of absolute wrapped COG changes between samples inside the event.
    pub delta_cog: f64,
    /// Same for heading.
    pub delta_heading: f64,
    pub min_draught: Option<f64>,
    /// `YYYYMMDD` of `t_enter`.
    pub date_id: u32,
    pub infer_stopped: bool,
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    cell: CellKey,
    t0: f64,
    t1: f64,
    sog_area: f64,
}

/// Absolute angular change in degrees, wrapped into [0, 180].
pub fn angle_change(from: f64, to: f64) -> f64 {
    let d = (to - from).rem_euclid(360.0);
    if d > 180.0 {
        360.0 - d
    } else {
        d
    }
}

struct Walker<'a> {
    domain: &'a Domain,
    g: Granularity,
    dims: (i64, i64),
    taus: Vec<f64>,
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl<'a> Walker<'a> {
    fn new(domain: &'a Domain, g: Granularity) -> Self {
        let r = domain.rect();
        let dims = (
            (r.width() / g.size()).round() as i64,
            (r.height() / g.size()).round() as i64,
        );
        Walker {
            domain,
            g,
            dims,
            taus: Vec::new(),
            xs: Vec::new(),
            ys: Vec::new(),
        }
    }

    fn cell_at(&self, x: f64, y: f64) -> CellKey {
        let (ox, oy) = self.domain.origin();
        let s = self.g.size();
        let col = (((x - ox) / s).floor() as i64).clamp(0, self.dims.0 - 1);
        let row = (((y - oy) / s).floor() as i64).clamp(0, self.dims.1 - 1);
        CellKey::new(self.g, col as u32, row as u32)
    }

    /// Parameters in (0, 1) where `a + tau * d` crosses a grid line on one axis.
    fn crossings(out: &mut Vec<f64>, origin: f64, size: f64, a: f64, d: f64) {
        out.clear();
        if d == 0.0 {
            return;
        }
        let ia = ((a - origin) / size).floor() as i64;
        let ib = ((a + d - origin) / size).floor() as i64;
        if d > 0.0 {
            for m in ia + 1..=ib {
                out.push((origin + m as f64 * size - a) / d);
            }
        } else {
            for m in (ib + 1..=ia).rev() {
                out.push((origin + m as f64 * size - a) / d);
            }
        }
    }

    fn segment(&mut self, a: &TrajPoint, b: &TrajPoint, sog: (f64, f64), out: &mut Vec<Piece>) {
        let (ta, tb) = (a.t as f64, b.t as f64);
        let (dx, dy) = (b.x - a.x, b.y - a.y);
        let len = dx.hypot(dy);
        let (ox, oy) = self.domain.origin();
        let s = self.g.size();

        Self::crossings(&mut self.xs, ox, s, a.x, dx);
        Self::crossings(&mut self.ys, oy, s, a.y, dy);

        // merge the two ascending sequences, dropping near-duplicates
        self.taus.clear();
        self.taus.push(0.0);
        let (mut i, mut j) = (0, 0);
        while i < self.xs.len() || j < self.ys.len() {
            let next = if j >= self.ys.len() || (i < self.xs.len() && self.xs[i] <= self.ys[j]) {
                i += 1;
                self.xs[i - 1]
            } else {
                j += 1;
                self.ys[j - 1]
            };
            let last = *self.taus.last().unwrap();
            if next < 1.0 && (next - last) * len > MIN_SEPARATION_M {
                self.taus.push(next);
            }
        }
        if self.taus.len() > 1 && (1.0 - self.taus[self.taus.len() - 1]) * len <= MIN_SEPARATION_M {
            self.taus.pop();
        }
        self.taus.push(1.0);

        let at = |tau: f64| if tau >= 1.0 { tb } else { ta + tau * (tb - ta) };
        let sog_at = |t: f64| sog.0 + (t - ta) / (tb - ta) * (sog.1 - sog.0);
        for w in self.taus.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let cell = self.cell_at(a.x + mid * dx, a.y + mid * dy);
            let (mut t0, t1) = (at(w[0]), at(w[1]));
            // split at UTC midnight
            loop {
                let next_day = time::day_start(t0) + SECONDS_PER_DAY as f64;
                let end = if next_day < t1 { next_day } else { t1 };
                if end > t0 {
                    out.push(Piece {
                        cell,
                        t0,
                        t1: end,
                        sog_area: 0.5 * (sog_at(t0) + sog_at(end)) * (end - t0),
                    });
                }
                if end >= t1 {
                    break;
                }
                t0 = end;
            }
        }
    }
}

/// SOG at both ends of segment `k`, falling back to the implied speed.
fn segment_sog(points: &[TrajPoint], k: usize) -> (f64, f64) {
    let (a, b) = (&points[k], &points[k + 1]);
    let implied = a.speed_to(b);
    (a.sog.unwrap_or(implied), b.sog.unwrap_or(implied))
}

fn path_delta(samples: impl Iterator<Item = Option<f64>>) -> f64 {
    let mut prev: Option<f64> = None;
    let mut total = 0.0;
    for v in samples.flatten() {
        if let Some(p) = prev {
            total += angle_change(p, v);
        }
        prev = Some(v);
    }
    total
}

/// Rolls one trajectory up into time-ordered, non-overlapping cell events.
///
/// Measures per event:
/// * `avg_sog` integrates SOG linearly interpolated between samples;
/// * `delta_cog` / `delta_heading` sum absolute wrapped changes between
///   consecutive samples with `t_enter <= t <= t_exit`;
/// * `min_draught` is the minimum over the draught in effect at entry and
///   the samples inside the event.
///
/// Samples outside the domain are clamped to the boundary cells.
pub fn rollup_cells(traj: &Trajectory, domain: &Domain, g: Granularity) -> Vec<CellEvent> {
    let pts = &traj.points;
    let mut walker = Walker::new(domain, g);
    let mut pieces = Vec::with_capacity(pts.len() * 2);
    for k in 0..pts.len().saturating_sub(1) {
        walker.segment(&pts[k], &pts[k + 1], segment_sog(pts, k), &mut pieces);
    }

    let mut merged: Vec<Piece> = Vec::new();
    for p in pieces {
        match merged.last_mut() {
            Some(m) if m.cell == p.cell && time::day_start(m.t0) == time::day_start(p.t0) => {
                m.t1 = p.t1;
                m.sog_area += p.sog_area;
            }
            _ => merged.push(p),
        }
    }

    let mut carried = Vec::with_capacity(pts.len());
    let mut last = None;
    for p in pts {
        last = p.draught.or(last);
        carried.push(last);
    }

    merged
        .into_iter()
        .map(|m| {
            let first = pts.partition_point(|p| (p.t as f64) < m.t0);
            let end = pts.partition_point(|p| (p.t as f64) <= m.t1);
            let inside = &pts[first..end];
            let entry = pts.partition_point(|p| (p.t as f64) <= m.t0).checked_sub(1);
            let min_draught = entry
                .and_then(|i| carried[i])
                .into_iter()
                .chain(inside.iter().filter_map(|p| p.draught))
                .reduce(f64::min);
            let duration = m.t1 - m.t0;
            CellEvent {
                cell: m.cell,
                trajectory_id: traj.id,
                mmsi: traj.mmsi,
                t_enter: m.t0,
                t_exit: m.t1,
                duration,
                avg_sog: m.sog_area / duration,
                delta_cog: path_delta(inside.iter().map(|p| p.cog)),
                delta_heading: path_delta(inside.iter().map(|p| p.heading)),
                min_draught,
                date_id: time::date_id(m.t0),
                infer_stopped: traj.infer_stopped,
            }
        })
        .collect()
}
