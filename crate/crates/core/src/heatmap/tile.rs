use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::exec::{self, Execution};
use crate::geom::Domain;
use crate::grid::{CellEvent, CellKey, Granularity};
use crate::time::SECONDS_PER_DAY;

use super::raster::{combine, PixelsRef, Raster};
use super::types::{quantize, AggKind, HeatmapType};

/// One day of one heatmap type at one resolution over a 5000 m anchor
/// cell. Pixel `(i, j)` is stored at `j * n + i` with `n = 5000 / res`,
/// rows running south to north.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapTile {
    pub anchor: CellKey,
    pub type_id: u32,
    pub resolution: Granularity,
    pub temporal_s: u32,
    pub date_id: u32,
    pub bands: Vec<Vec<f64>>,
    pub nodata: Vec<bool>,
}

impl HeatmapTile {
    pub fn empty(
        anchor: CellKey,
        type_id: u32,
        resolution: Granularity,
        date_id: u32,
        bands: usize,
    ) -> Self {
        let n = resolution.per_lattice_cell() as usize;
        HeatmapTile {
            anchor,
            type_id,
            resolution,
            temporal_s: SECONDS_PER_DAY as u32,
            date_id,
            bands: vec![vec![0.0; n * n]; bands],
            nodata: vec![true; n * n],
        }
    }

    /// Pixels along one side.
    pub fn side(&self) -> u32 {
        self.resolution.per_lattice_cell()
    }

    pub fn pixel_count(&self) -> usize {
        self.nodata.len()
    }

    pub fn as_pixels<'a>(&'a self, domain: &Domain) -> PixelsRef<'a> {
        let r = self.anchor.rect(domain);
        PixelsRef {
            origin: (r.x_min, r.y_min),
            resolution: self.resolution.size(),
            width: self.side(),
            height: self.side(),
            bands: &self.bands,
            nodata: &self.nodata,
        }
    }

    pub fn to_raster(&self, domain: &Domain) -> Raster {
        let p = self.as_pixels(domain);
        Raster {
            origin_x: p.origin.0,
            origin_y: p.origin.1,
            resolution: p.resolution,
            width: p.width,
            height: p.height,
            bands: self.bands.clone(),
            nodata: self.nodata.clone(),
        }
    }
}

/// Aggregates events of granularity `res` into daily tiles of type `ty`.
/// Events at other granularities are ignored; events without a value for
/// the type's measure do not contribute.
pub fn rollup_tiles(
    events: &[CellEvent],
    ty: &HeatmapType,
    res: Granularity,
    exec: Execution,
) -> Vec<HeatmapTile> {
    let mut groups: BTreeMap<(CellKey, u32), Vec<&CellEvent>> = BTreeMap::new();
    for e in events.iter().filter(|e| e.cell.granularity == res) {
        if ty.measure.value(e).is_some() {
            groups
                .entry((e.cell.ancestor(Granularity::M5000), e.date_id))
                .or_default()
                .push(e);
        }
    }
    let groups: Vec<_> = groups.into_iter().collect();
    let n = res.per_lattice_cell();
    exec::map_owned(exec, groups, |((anchor, date), evs)| {
        let mut tile = HeatmapTile::empty(anchor, ty.id, res, date, ty.bands());
        let mut value = vec![vec![0.0]; ty.bands()];
        for e in evs {
            let v = ty.measure.value(e).expect("filtered above");
            value[0][0] = match ty.kind {
                AggKind::Sum => quantize(v),
                AggKind::Min | AggKind::Avg => v,
            };
            if ty.kind == AggKind::Avg {
                value[1][0] = 1.0;
            }
            let i = e.cell.col - anchor.col * n;
            let j = e.cell.row - anchor.row * n;
            let k = (j * n + i) as usize;
            combine(ty.kind, &mut tile.bands, &mut tile.nodata, k, &value, 0);
        }
        tile
    })
}
