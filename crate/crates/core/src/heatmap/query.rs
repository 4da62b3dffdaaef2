use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::geom::Rect;
use crate::grid::Granularity;
use crate::partition::DivisionSet;
use crate::time;

use super::raster::Raster;
use super::store::TileStore;
use super::types::HeatmapType;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapQuery {
    pub area: Rect,
    /// Inclusive `YYYYMMDD` range.
    pub date_from: u32,
    pub date_to: u32,
    pub type_id: u32,
    pub resolution: Granularity,
}

impl HeatmapQuery {
    /// Parses `YYYYMMDD:YYYYMMDD`.
    pub fn parse_dates(s: &str) -> Result<(u32, u32)> {
        let (a, b) = s.split_once(':').ok_or_else(|| {
            Error::Validation(format!("date range '{s}': expected YYYYMMDD:YYYYMMDD"))
        })?;
        let date = |t: &str| -> Result<u32> {
            t.trim()
                .parse::<u32>()
                .ok()
                .filter(|&id| time::parse_date_id(id).is_some())
                .ok_or_else(|| Error::Validation(format!("'{t}' is not a YYYYMMDD date")))
        };
        let (from, to) = (date(a)?, date(b)?);
        if from > to {
            return Err(Error::Validation(format!("date range '{s}' is empty")));
        }
        Ok((from, to))
    }
}

/// Per-division partial result of phase 1.
#[derive(Debug, Clone)]
pub struct DivisionRaster {
    pub division: u32,
    pub raster: Raster,
    pub tiles: usize,
    pub pixels: u64,
}

/// Resolves the query's type and output grid: the area snapped outward to
/// the resolution lattice and clipped to the domain.
pub fn query_grid(
    store: &TileStore,
    types: &[HeatmapType],
    q: &HeatmapQuery,
) -> Result<(HeatmapType, Raster)> {
    let ty = types
        .iter()
        .find(|t| t.id == q.type_id)
        .cloned()
        .ok_or(Error::UnknownHeatmapType(q.type_id))?;
    if q.date_from > q.date_to {
        return Err(Error::Validation(format!(
            "date range {}:{} is empty",
            q.date_from, q.date_to
        )));
    }
    let domain = store.domain.rect();
    let area = q.area.intersection(&domain).ok_or(Error::OutsideDomain {
        x: q.area.x_min,
        y: q.area.y_min,
    })?;
    let res = q.resolution.size();
    let (ox, oy) = store.domain.origin();
    let i0 = ((area.x_min - ox) / res).floor();
    let j0 = ((area.y_min - oy) / res).floor();
    let i1 = ((area.x_max - ox) / res).ceil();
    let j1 = ((area.y_max - oy) / res).ceil();
    let raster = Raster::empty(
        (ox + i0 * res, oy + j0 * res),
        res,
        (i1 - i0) as u32,
        (j1 - j0) as u32,
        ty.bands(),
    );
    Ok((ty, raster))
}

/// Phase 1 for one division: folds its matching tiles, in store order,
/// into a raster covering the division's part of the output grid.
pub fn aggregate_division(
    store: &TileStore,
    ty: &HeatmapType,
    q: &HeatmapQuery,
    grid: &Raster,
    division: u32,
    rect: &Rect,
) -> Option<DivisionRaster> {
    let extent = grid.extent();
    let part = rect.intersection(&extent)?;
    let res = grid.resolution;
    let mut raster = Raster::empty(
        (part.x_min, part.y_min),
        res,
        (part.width() / res).round() as u32,
        (part.height() / res).round() as u32,
        ty.bands(),
    );
    let mut tiles = 0;
    let mut pixels = 0;
    for tile in store.matching(
        division,
        ty.id,
        q.resolution,
        (q.date_from, q.date_to),
        &part,
    ) {
        raster.accumulate(ty.kind, tile.as_pixels(&store.domain));
        tiles += 1;
        pixels += tile.pixel_count() as u64;
    }
    Some(DivisionRaster {
        division,
        raster,
        tiles,
        pixels,
    })
}

/// Phase 1 over all divisions overlapping the query, run as a data-parallel
/// map. Divisions with no matching tiles are still reported.
pub fn phase_one(
    store: &TileStore,
    divisions: &DivisionSet,
    ty: &HeatmapType,
    q: &HeatmapQuery,
    grid: &Raster,
    exec: Execution,
) -> Vec<DivisionRaster> {
    let extent = grid.extent();
    let engaged: Vec<_> = divisions
        .divisions
        .iter()
        .filter(|d| d.rect.intersects(&extent))
        .collect();
    exec::map(exec, &engaged, |d| {
        aggregate_division(store, ty, q, grid, d.id, &d.rect)
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Phase 2: mosaics the division rasters into the output grid and clears
/// pixels whose centers fall outside the query area.
pub fn mosaic(ty: &HeatmapType, mut grid: Raster, parts: &[DivisionRaster], area: &Rect) -> Raster {
    for p in parts {
        grid.accumulate(ty.kind, p.raster.as_pixels());
    }
    grid.clip(area);
    grid
}

/// Two-phase query, returning the unfinalized raster (two bands for AVG).
pub fn query_bands(
    store: &TileStore,
    divisions: &DivisionSet,
    types: &[HeatmapType],
    q: &HeatmapQuery,
    exec: Execution,
) -> Result<Raster> {
    check_divisions(store, divisions)?;
    let (ty, grid) = query_grid(store, types, q)?;
    let parts = phase_one(store, divisions, &ty, q, &grid, exec);
    Ok(mosaic(&ty, grid, &parts, &q.area))
}

/// Two-phase query with AVG types finalized to one band.
pub fn query_heatmap(
    store: &TileStore,
    divisions: &DivisionSet,
    types: &[HeatmapType],
    q: &HeatmapQuery,
    exec: Execution,
) -> Result<Raster> {
    Ok(query_bands(store, divisions, types, q, exec)?.finalize())
}

fn check_divisions(store: &TileStore, divisions: &DivisionSet) -> Result<()> {
    if store.domain != divisions.domain {
        return Err(Error::Validation(
            "tile store and division set cover different domains".into(),
        ));
    }
    Ok(())
}
