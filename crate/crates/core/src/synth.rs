//! Seeded synthetic AIS fleet, written in the DMA CSV layout.
//!
//! The `lanes` layout sends most ships along a few shipping lanes that meet
//! at a hub, with the rest wandering between random waypoints, which gives
//! strongly skewed traffic. The `uniform` layout sweeps one ship per
//! 5000 m lattice row per day from west to east, so every lattice cell sees
//! the same traffic.

use std::collections::BTreeSet;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geom::{Domain, LATTICE_M};
use crate::ingest::Projection;
use crate::partition::CountGrid;
use crate::time::{self, SECONDS_PER_DAY};
use crate::trajectory::KNOT_MS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    #[default]
    Lanes,
    Uniform,
}

/// A polyline in domain-relative coordinates: (0, 0) is the domain center
/// and +-1 its edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lane {
    pub waypoints: Vec<[f64; 2]>,
    pub weight: f64,
}

fn default_lanes() -> Vec<Lane> {
    let lane = |w: &[[f64; 2]], weight| Lane {
        waypoints: w.to_vec(),
        weight,
    };
    vec![
        lane(&[[-0.95, -0.55], [0.0, 0.0], [0.95, 0.35]], 0.45),
        lane(&[[-0.35, 0.95], [0.0, 0.0], [0.3, -0.95]], 0.35),
        lane(&[[0.0, 0.0], [0.85, -0.8]], 0.2),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FleetConfig {
    pub layout: Layout,
    /// Clean rows to produce (`lanes` layout only).
    pub points: usize,
    pub ships: u32,
    /// First day, `YYYYMMDD`.
    pub start_date: u32,
    pub days: u32,
    /// Seconds between reports.
    pub interval_s: i64,
    /// Fraction of ships that follow lanes.
    pub lane_share: f64,
    /// Standard deviation of a ship's lateral offset from its lane, meters.
    pub lane_width_m: f64,
    /// Shift applied to every lane, meters.
    pub drift_m: [f64; 2],
    pub lanes: Vec<Lane>,
    /// Corrupted rows mixed into the output.
    pub dirty_rows: usize,
}

impl Default for FleetConfig {
    fn default() -> Self {
        FleetConfig {
            layout: Layout::Lanes,
            points: 10_000,
            ships: 40,
            start_date: 20240301,
            days: 7,
            interval_s: 10,
            lane_share: 0.9,
            lane_width_m: 500.0,
            drift_m: [0.0, 0.0],
            lanes: default_lanes(),
            dirty_rows: 0,
        }
    }
}

impl FleetConfig {
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.ships == 0 {
            out.push("fleet ships must be at least 1".into());
        }
        if self.days == 0 {
            out.push("fleet days must be at least 1".into());
        }
        if self.interval_s <= 0 {
            out.push("fleet interval_s must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.lane_share) {
            out.push(format!(
                "fleet lane_share {} is outside [0, 1]",
                self.lane_share
            ));
        }
        if time::date_id_start(self.start_date).is_none() {
            out.push(format!(
                "fleet start_date {} is not a YYYYMMDD date",
                self.start_date
            ));
        }
        if self.layout == Layout::Lanes && self.lane_share > 0.0 {
            if self.lanes.iter().all(|l| l.weight <= 0.0) {
                out.push("fleet lanes need at least one positive weight".into());
            }
            if self.lanes.iter().any(|l| l.waypoints.len() < 2) {
                out.push("every fleet lane needs at least two waypoints".into());
            }
        }
        out
    }
}

/// One clean position report.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub t: i64,
    pub mmsi: u32,
    pub x: f64,
    pub y: f64,
    pub sog: f64,
    pub cog: f64,
    pub heading: Option<f64>,
    pub draught: Option<f64>,
    pub moored: bool,
    pub ship: usize,
}

#[derive(Debug, Clone)]
struct Ship {
    name: String,
    ship_type: &'static str,
    destination: &'static str,
    dims: [u32; 4],
}

/// Generated fleet: CSV records in output order and the positions of the
/// corrupted ones.
#[derive(Debug, Clone)]
pub struct Fleet {
    pub reports: Vec<Report>,
    pub records: Vec<Vec<String>>,
    pub dirty: BTreeSet<usize>,
}

pub const HEADER: [&str; 26] = [
    "# Timestamp",
    "Type of mobile",
    "MMSI",
    "Latitude",
    "Longitude",
    "Navigational status",
    "ROT",
    "SOG",
    "COG",
    "Heading",
    "IMO",
    "Callsign",
    "Name",
    "Ship type",
    "Cargo type",
    "Width",
    "Length",
    "Type of position fixing device",
    "Draught",
    "Destination",
    "ETA",
    "Data source type",
    "A",
    "B",
    "C",
    "D",
];

struct Frame {
    cx: f64,
    cy: f64,
    hx: f64,
    hy: f64,
    lo: (f64, f64),
    hi: (f64, f64),
}

impl Frame {
    fn new(domain: &Domain) -> Self {
        let r = domain.rect();
        Frame {
            cx: (r.x_min + r.x_max) / 2.0,
            cy: (r.y_min + r.y_max) / 2.0,
            hx: r.width() / 2.0,
            hy: r.height() / 2.0,
            lo: (r.x_min + 1.0, r.y_min + 1.0),
            hi: (r.x_max - 1.0, r.y_max - 1.0),
        }
    }

    fn place(&self, p: [f64; 2], drift: [f64; 2]) -> (f64, f64) {
        (
            self.cx + p[0] * self.hx + drift[0],
            self.cy + p[1] * self.hy + drift[1],
        )
    }

    fn clamp(&self, (x, y): (f64, f64)) -> (f64, f64) {
        (x.clamp(self.lo.0, self.hi.0), y.clamp(self.lo.1, self.hi.1))
    }
}

fn polyline_length(pts: &[(f64, f64)]) -> f64 {
    pts.windows(2)
        .map(|w| (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1))
        .sum()
}

/// Point at arc length `s` and the unit direction of travel there.
fn along(pts: &[(f64, f64)], mut s: f64) -> ((f64, f64), (f64, f64)) {
    for w in pts.windows(2) {
        let (dx, dy) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
        let len = dx.hypot(dy);
        if s <= len || std::ptr::eq(w, pts.windows(2).last().unwrap()) {
            let f = if len > 0.0 { (s / len).min(1.0) } else { 0.0 };
            let dir = if len > 0.0 {
                (dx / len, dy / len)
            } else {
                (1.0, 0.0)
            };
            return ((w[0].0 + f * dx, w[0].1 + f * dy), dir);
        }
        s -= len;
    }
    (pts[0], (1.0, 0.0))
}

/// Course over ground in degrees clockwise from north.
fn course(dir: (f64, f64)) -> f64 {
    dir.0.atan2(dir.1).to_degrees().rem_euclid(360.0)
}

fn make_ship(k: usize, rng: &mut ChaCha8Rng) -> Ship {
    const TYPES: [&str; 4] = ["Cargo", "Tanker", "Passenger", "Fishing"];
    const PORTS: [&str; 5] = ["AARHUS", "GOTEBORG", "FREDERIKSHAVN", "KIEL", ""];
    let length = rng.gen_range(20..300u32);
    let beam = (length / 6).max(4);
    let bow = length * rng.gen_range(55..75u32) / 100;
    let port = beam / 2;
    Ship {
        name: format!("SYNTH {}", k + 1),
        ship_type: TYPES.choose(rng).unwrap(),
        destination: PORTS.choose(rng).unwrap(),
        dims: [bow, length - bow, port, beam - port],
    }
}

struct Voyage<'a> {
    rng: &'a mut ChaCha8Rng,
    cfg: &'a FleetConfig,
    frame: &'a Frame,
    out: &'a mut Vec<Report>,
    ship: usize,
    mmsi: u32,
    draught: Option<f64>,
}

impl Voyage<'_> {
    /// Sails `path` (or part of it) at a steady speed, emitting up to
    /// `budget` reports starting at `t`. Returns the time after the last
    /// report.
    fn sail(
        &mut self,
        path: &[(f64, f64)],
        offset: f64,
        speed_kn: f64,
        mut t: i64,
        budget: usize,
    ) -> (i64, usize) {
        let len = polyline_length(path);
        let v = speed_kn * KNOT_MS;
        let jitter = Normal::new(0.0, 0.15).unwrap();
        let mut s = 0.0;
        let mut emitted = 0;
        while s <= len && emitted < budget {
            let ((x, y), dir) = along(path, s);
            let normal = (-dir.1, dir.0);
            let pos = self
                .frame
                .clamp((x + normal.0 * offset, y + normal.1 * offset));
            let cog = course(dir);
            let heading = (!self.rng.gen_bool(0.05)).then(|| {
                (cog + self.rng.gen_range(-3.0..3.0))
                    .rem_euclid(360.0)
                    .floor()
            });
            self.out.push(Report {
                t,
                mmsi: self.mmsi,
                x: pos.0,
                y: pos.1,
                sog: (speed_kn + jitter.sample(self.rng)).max(0.0),
                cog,
                heading,
                draught: self.draught,
                moored: false,
                ship: self.ship,
            });
            emitted += 1;
            let mut dt = self.cfg.interval_s;
            if self.rng.gen_bool(0.002) {
                // Transponder silent for a while.
                dt += self.rng.gen_range(400..1200);
            }
            t += dt;
            s += v * dt as f64;
        }
        (t, emitted)
    }

    fn moor(&mut self, at: (f64, f64), mut t: i64, secs: i64, budget: usize) -> (i64, usize) {
        let end = t + secs;
        let mut emitted = 0;
        while t < end && emitted < budget {
            let pos = self.frame.clamp((
                at.0 + self.rng.gen_range(-2.0..2.0),
                at.1 + self.rng.gen_range(-2.0..2.0),
            ));
            self.out.push(Report {
                t,
                mmsi: self.mmsi,
                x: pos.0,
                y: pos.1,
                sog: 0.0,
                cog: self.rng.gen_range(0.0..360.0f64).floor(),
                heading: Some(self.rng.gen_range(0.0..360.0f64).floor()),
                draught: self.draught,
                moored: true,
                ship: self.ship,
            });
            emitted += 1;
            t += self.cfg.interval_s * 3;
        }
        (t, emitted)
    }
}

fn lanes_reports(cfg: &FleetConfig, frame: &Frame, rng: &mut ChaCha8Rng) -> Vec<Report> {
    let lanes: Vec<(Vec<(f64, f64)>, f64)> = cfg
        .lanes
        .iter()
        .filter(|l| l.weight > 0.0 && l.waypoints.len() >= 2)
        .map(|l| {
            (
                l.waypoints
                    .iter()
                    .map(|&p| frame.place(p, cfg.drift_m))
                    .collect(),
                l.weight,
            )
        })
        .collect();
    let t0 = time::date_id_start(cfg.start_date).expect("validated");
    let span = cfg.days as i64 * SECONDS_PER_DAY;
    let ships = cfg.ships as usize;
    let mut out = Vec::with_capacity(cfg.points);
    for k in 0..ships {
        let budget_total = cfg.points / ships + usize::from(k < cfg.points % ships);
        let draught = rng
            .gen_bool(0.9)
            .then(|| (rng.gen_range(30..120) as f64) / 10.0);
        let duration = budget_total as i64 * cfg.interval_s;
        let mut t = t0 + rng.gen_range(0..(span - duration).max(1));
        let on_lane = !lanes.is_empty() && rng.gen_bool(cfg.lane_share);
        let speed = rng.gen_range(8.0..18.0);
        let mut v = Voyage {
            rng,
            cfg,
            frame,
            out: &mut out,
            ship: k,
            mmsi: 219_000_000 + k as u32 + 1,
            draught,
        };
        let mut left = budget_total;
        if on_lane {
            let weights: Vec<f64> = lanes.iter().map(|l| l.1).collect();
            let pick = rand::distributions::WeightedIndex::new(&weights).unwrap();
            let mut path = lanes[pick.sample(v.rng)].0.clone();
            if v.rng.gen_bool(0.5) {
                path.reverse();
            }
            // Start somewhere along the lane.
            let len = polyline_length(&path);
            let start = v.rng.gen_range(0.0..len * 0.6);
            let (p0, _) = along(&path, start);
            let mut rest = vec![p0];
            let mut acc = 0.0;
            for w in path.windows(2) {
                acc += (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1);
                if acc > start {
                    rest.push(w[1]);
                }
            }
            path = rest;
            let offset = Normal::new(0.0, cfg.lane_width_m.max(1e-9))
                .unwrap()
                .sample(v.rng);
            while left > 0 {
                let (t1, n) = v.sail(&path, offset, speed, t, left);
                left -= n;
                let stay = v.rng.gen_range(1800..5400);
                let (t2, n) = v.moor(*path.last().unwrap(), t1, stay, left);
                left -= n;
                t = t2;
                path.reverse();
            }
        } else {
            let mut pos = frame.place(
                [v.rng.gen_range(-0.9..0.9), v.rng.gen_range(-0.9..0.9)],
                [0.0, 0.0],
            );
            while left > 0 {
                let next = frame.place(
                    [v.rng.gen_range(-0.9..0.9), v.rng.gen_range(-0.9..0.9)],
                    [0.0, 0.0],
                );
                let (t1, n) = v.sail(&[pos, next], 0.0, speed, t, left);
                left -= n;
                t = t1;
                pos = next;
            }
        }
    }
    out
}

fn uniform_reports(cfg: &FleetConfig, domain: &Domain, frame: &Frame) -> Vec<Report> {
    let t0 = time::date_id_start(cfg.start_date).expect("validated");
    let r = domain.rect();
    let (_, rows) = domain.lattice_dims();
    let mut out = Vec::new();
    // Cross the domain in 20 hours whatever its width.
    let speed_ms = (r.width() - 200.0) / (20.0 * 3600.0);
    for day in 0..cfg.days as i64 {
        for row in 0..rows {
            let y = r.y_min + (row as f64 + 0.5) * LATTICE_M;
            let mut t = t0 + day * SECONDS_PER_DAY + 3600;
            let mut x = r.x_min + 100.0;
            let ship = row as usize;
            while x <= r.x_max - 100.0 {
                let (px, py) = frame.clamp((x, y));
                out.push(Report {
                    t,
                    mmsi: 219_000_000 + row + 1,
                    x: px,
                    y: py,
                    sog: speed_ms / KNOT_MS,
                    cog: 90.0,
                    heading: Some(90.0),
                    draught: Some(5.0),
                    moored: false,
                    ship,
                });
                t += cfg.interval_s;
                x += speed_ms * cfg.interval_s as f64;
            }
        }
    }
    out
}

fn record(rep: &Report, ship: &Ship, proj: &Projection) -> Vec<String> {
    let (lat, lng) = proj.inverse(rep.x, rep.y);
    let opt =
        |v: Option<f64>, digits: usize| v.map(|v| format!("{v:.digits$}")).unwrap_or_default();
    let status = if rep.moored {
        "Moored"
    } else {
        "Under way using engine"
    };
    let length = ship.dims[0] + ship.dims[1];
    let width = ship.dims[2] + ship.dims[3];
    vec![
        time::format_dma(rep.t),
        "Class A".into(),
        rep.mmsi.to_string(),
        format!("{lat:.6}"),
        format!("{lng:.6}"),
        status.into(),
        String::new(),
        format!("{:.1}", rep.sog),
        format!("{:.1}", rep.cog),
        rep.heading
            .map(|h| format!("{h:.0}"))
            .unwrap_or_else(|| "511".into()),
        "Unknown".into(),
        "Unknown".into(),
        ship.name.clone(),
        ship.ship_type.into(),
        String::new(),
        width.to_string(),
        length.to_string(),
        "GPS".into(),
        opt(rep.draught, 1),
        ship.destination.into(),
        String::new(),
        "AIS".into(),
        ship.dims[0].to_string(),
        ship.dims[1].to_string(),
        ship.dims[2].to_string(),
        ship.dims[3].to_string(),
    ]
}

/// Breaks one record so that parsing or cleaning must reject it.
fn corrupt(rec: &mut [String], kind: usize) {
    match kind % 6 {
        0 => rec[3] = "91.500000".into(),
        1 => rec[0] = "32/13/2024 25:61:00".into(),
        2 => rec[2] = "12345".into(),
        3 => rec[4] = String::new(),
        4 => {
            // Far outside any desk-scale domain.
            rec[3] = "71.000000".into();
            rec[4] = "-20.000000".into();
        }
        _ => rec[7] = "fast".into(),
    }
}

/// Generates the fleet. Output is sorted by time then MMSI, as an export
/// would be.
pub fn generate(cfg: &FleetConfig, domain: &Domain, proj: &Projection, seed: u64) -> Result<Fleet> {
    let problems = cfg.violations();
    if !problems.is_empty() {
        return Err(crate::Error::Config(problems));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let frame = Frame::new(domain);
    let mut reports = match cfg.layout {
        Layout::Lanes => lanes_reports(cfg, &frame, &mut rng),
        Layout::Uniform => uniform_reports(cfg, domain, &frame),
    };
    reports.sort_by_key(|r| (r.t, r.mmsi));
    let n_ships = reports.iter().map(|r| r.ship + 1).max().unwrap_or(0);
    let ships: Vec<Ship> = (0..n_ships).map(|k| make_ship(k, &mut rng)).collect();
    let records: Vec<Vec<String>> = reports
        .iter()
        .map(|r| record(r, &ships[r.ship], proj))
        .collect();

    let total = records.len() + cfg.dirty_rows;
    let mut slots: Vec<usize> = (0..total).collect();
    slots.shuffle(&mut rng);
    let dirty: BTreeSet<usize> = slots.into_iter().take(cfg.dirty_rows).collect();
    let mut merged = Vec::with_capacity(total);
    let mut clean = records.into_iter();
    let mut template = None;
    for (k, pos) in (0..total).enumerate() {
        if dirty.contains(&pos) {
            let mut rec = template
                .clone()
                .unwrap_or_else(|| vec![String::new(); HEADER.len()]);
            corrupt(&mut rec, k);
            merged.push(rec);
        } else {
            let rec = clean.next().expect("counted");
            template = Some(rec.clone());
            merged.push(rec);
        }
    }
    Ok(Fleet {
        reports,
        records: merged,
        dirty,
    })
}

impl Fleet {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(HEADER)?;
        for r in &self.records {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(buf)
    }
}

/// Share of the total held by the busiest `area_fraction` of cells.
pub fn top_share(grid: &CountGrid, area_fraction: f64) -> f64 {
    let mut counts = grid.counts.clone();
    counts.sort_unstable_by(|a, b| b.cmp(a));
    let k = ((counts.len() as f64 * area_fraction).floor() as usize).min(counts.len());
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    counts[..k].iter().sum::<u64>() as f64 / total as f64
}
