//! Daily raster tiles over 5000 m anchors and two-phase heatmap queries.

mod query;
mod raster;
mod render;
mod store;
mod tile;
mod types;

pub use query::{
    aggregate_division, mosaic, phase_one, query_bands, query_grid, query_heatmap, DivisionRaster,
    HeatmapQuery,
};
pub use raster::{PixelsRef, Raster};
pub use render::{colormap, render, to_image, write_ascii_grid, Scale, ASCII_NODATA};
pub use store::{TileKey, TileStore};
pub use tile::{rollup_tiles, HeatmapTile};
pub use types::{AggKind, HeatmapType, Measure};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::{CellFacts, Granularity};

/// Tiles for every type at every resolution. Each resolution must be
/// present in `facts`.
pub fn rollup_heatmaps(
    facts: &CellFacts,
    types: &[HeatmapType],
    resolutions: &[Granularity],
    exec: Execution,
) -> Result<Vec<HeatmapTile>> {
    let problems = HeatmapType::violations(types);
    if !problems.is_empty() {
        return Err(Error::Config(problems));
    }
    let mut out = Vec::new();
    for &res in resolutions {
        let events = facts.get(&res).ok_or_else(|| {
            Error::Config(vec![format!(
                "no cell facts at {res}; roll up that granularity first"
            )])
        })?;
        for ty in types {
            out.extend(rollup_tiles(events, ty, res, exec));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
