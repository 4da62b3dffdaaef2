use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::heatmap::{query_grid, HeatmapQuery, HeatmapType, TileStore};
use crate::partition::DivisionSet;

use super::metrics::{scale_up, wif, worker_time_slotted, CostModel};
use super::shard::ShardMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShardTiming {
    pub shard: u32,
    pub worker: u32,
    pub tiles: usize,
    pub pixels: u64,
    pub time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub query: HeatmapQuery,
    pub workers: u32,
    pub cost: CostModel,
    /// Engaged shards only, ascending shard id.
    pub shards: Vec<ShardTiming>,
    /// Indexed by worker id - 1.
    pub worker_times: Vec<f64>,
    pub wif: Vec<f64>,
    pub average_wif_pct: f64,
    pub degenerate: bool,
    /// Max worker time, seconds.
    pub runtime: f64,
    pub engaged_shards: usize,
    /// Coordinator mosaic cost, not part of `runtime`.
    pub coordinator_time: f64,
}

impl BenchmarkReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()? + "\n").map_err(|e| Error::io(path, e))
    }
}

/// Simulates the two-phase heatmap query on `map`. Each division that
/// overlaps the query grid engages its shard, which costs
/// `alpha * pixels + beta` where pixels counts every pixel of every matched
/// tile. Worker time follows from the cost model's slots.
pub fn simulate_query(
    q: &HeatmapQuery,
    map: &ShardMap,
    store: &TileStore,
    divisions: &DivisionSet,
    types: &[HeatmapType],
    cost: &CostModel,
    exec: Execution,
) -> Result<BenchmarkReport> {
    let problems = cost.violations();
    if !problems.is_empty() {
        return Err(Error::Config(problems));
    }
    let (ty, grid) = query_grid(store, types, q)?;
    let extent = grid.extent();
    let engaged: Vec<_> = divisions
        .divisions
        .iter()
        .filter(|d| d.rect.intersects(&extent))
        .collect();
    if engaged.is_empty() {
        return Err(Error::Validation(format!(
            "query area {} touches no division",
            q.area
        )));
    }
    let mut shards = exec::map(exec, &engaged, |d| {
        let part = d
            .rect
            .intersection(&extent)
            .expect("filtered on intersects");
        let (tiles, pixels) = store
            .matching(d.id, ty.id, q.resolution, (q.date_from, q.date_to), &part)
            .fold((0, 0u64), |(n, p), t| (n + 1, p + t.pixel_count() as u64));
        (d.id, tiles, pixels)
    })
    .into_iter()
    .map(|(division, tiles, pixels)| {
        let shard = map
            .shard_of(division)
            .ok_or_else(|| Error::Validation(format!("division {division} has no shard")))?;
        let worker = map
            .worker_of(shard)
            .ok_or_else(|| Error::Validation(format!("shard {shard} has no worker")))?;
        Ok(ShardTiming {
            shard,
            worker,
            tiles,
            pixels,
            time: cost.shard_time(pixels),
        })
    })
    .collect::<Result<Vec<_>>>()?;
    shards.sort_by_key(|s| s.shard);

    let worker_times: Vec<f64> = (1..=map.workers)
        .map(|w| {
            let times: Vec<f64> = shards
                .iter()
                .filter(|s| s.worker == w)
                .map(|s| s.time)
                .collect();
            worker_time_slotted(&times, cost.slots)
        })
        .collect();
    let idle = wif(&worker_times)?;
    let runtime = worker_times.iter().copied().fold(0.0, f64::max);
    Ok(BenchmarkReport {
        query: q.clone(),
        workers: map.workers,
        cost: *cost,
        engaged_shards: shards.len(),
        shards,
        wif: idle.per_worker,
        average_wif_pct: idle.average_pct,
        degenerate: idle.degenerate,
        worker_times,
        runtime,
        coordinator_time: cost.alpha * grid.len() as f64,
    })
}

/// One row of a query sweep, shaped like a results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub area: String,
    pub span: String,
    pub resolution: u32,
    pub time: f64,
    pub wif: f64,
    pub scale_up: f64,
}

impl SweepRow {
    /// Row for the `multi` report, scaled against the `single` one.
    pub fn new(
        area: &str,
        span: &str,
        single: &BenchmarkReport,
        multi: &BenchmarkReport,
    ) -> Result<Self> {
        Ok(SweepRow {
            area: area.to_string(),
            span: span.to_string(),
            resolution: multi.query.resolution.meters(),
            time: multi.runtime,
            wif: multi.average_wif_pct,
            scale_up: scale_up(single.runtime, multi.runtime)?,
        })
    }
}

pub fn write_sweep_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Validation(format!("{}: {other:?}", path.display())),
    })?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
