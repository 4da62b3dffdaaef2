//! Tile store, keyed by division so that a division's tiles are one
//! contiguous range.
//!
//! File layout, version 1, little-endian:
//!
//! ```text
//! magic "AISDWTIL", u32 version
//! f64 x4      domain x_min, y_min, x_max, y_max
//! u64         tile count
//! per tile:
//!   u32 division, u32 anchor col, u32 anchor row, u32 type id,
//!   u32 resolution (m), u32 temporal resolution (s), u32 date id,
//!   u8 band count, u32 data pixel count,
//!   per data pixel: u32 pixel index, f64 per band
//! ```

use std::collections::BTreeMap;
use std::ops::Bound;
use std::path::Path;

use crate::codec;
use crate::error::{Error, Result};
use crate::geom::{Domain, Rect};
use crate::grid::{CellKey, Granularity};
use crate::partition::DivisionIndex;

use super::tile::HeatmapTile;

const MAGIC: &[u8; 8] = b"AISDWTIL";
const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TileKey {
    pub division: u32,
    pub anchor_col: u32,
    pub anchor_row: u32,
    pub type_id: u32,
    pub resolution_m: u32,
    pub date_id: u32,
}

impl TileKey {
    fn first_of(division: u32) -> TileKey {
        TileKey {
            division,
            anchor_col: 0,
            anchor_row: 0,
            type_id: 0,
            resolution_m: 0,
            date_id: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TileStore {
    pub domain: Domain,
    tiles: BTreeMap<TileKey, HeatmapTile>,
}

impl TileStore {
    pub fn new(domain: Domain) -> Self {
        TileStore {
            domain,
            tiles: BTreeMap::new(),
        }
    }

    pub fn from_tiles(
        domain: Domain,
        tiles: impl IntoIterator<Item = HeatmapTile>,
        index: &DivisionIndex,
    ) -> Result<Self> {
        let mut store = TileStore::new(domain);
        for t in tiles {
            store.insert(index, t)?;
        }
        Ok(store)
    }

    /// Files the tile under the division owning its anchor, replacing any
    /// tile with the same key.
    pub fn insert(&mut self, index: &DivisionIndex, tile: HeatmapTile) -> Result<TileKey> {
        let key = TileKey {
            division: index.division_of_cell(&tile.anchor)?,
            anchor_col: tile.anchor.col,
            anchor_row: tile.anchor.row,
            type_id: tile.type_id,
            resolution_m: tile.resolution.meters(),
            date_id: tile.date_id,
        };
        self.tiles.insert(key, tile);
        Ok(key)
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TileKey, &HeatmapTile)> {
        self.tiles.iter()
    }

    /// All tiles of one division, in key order.
    pub fn division_tiles(&self, division: u32) -> impl Iterator<Item = (&TileKey, &HeatmapTile)> {
        let upper = match division.checked_add(1) {
            Some(d) => Bound::Excluded(TileKey::first_of(d)),
            None => Bound::Unbounded,
        };
        self.tiles
            .range((Bound::Included(TileKey::first_of(division)), upper))
    }

    /// Tiles of one division matching a type, resolution and inclusive date
    /// range whose anchor overlaps `extent`.
    pub fn matching<'a>(
        &'a self,
        division: u32,
        type_id: u32,
        resolution: Granularity,
        dates: (u32, u32),
        extent: &'a Rect,
    ) -> impl Iterator<Item = &'a HeatmapTile> + 'a {
        self.division_tiles(division)
            .filter(move |(k, t)| {
                k.type_id == type_id
                    && k.resolution_m == resolution.meters()
                    && (dates.0..=dates.1).contains(&k.date_id)
                    && t.anchor.rect(&self.domain).intersects(extent)
            })
            .map(|(_, t)| t)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let io = |e| Error::io(path, e);
        let mut enc = codec::create(path)?;
        enc.header(MAGIC, VERSION).map_err(io)?;
        let r = self.domain.rect();
        for v in [r.x_min, r.y_min, r.x_max, r.y_max] {
            enc.f64(v).map_err(io)?;
        }
        enc.u64(self.tiles.len() as u64).map_err(io)?;
        for (k, t) in &self.tiles {
            for v in [
                k.division,
                k.anchor_col,
                k.anchor_row,
                k.type_id,
                k.resolution_m,
                t.temporal_s,
                k.date_id,
            ] {
                enc.u32(v).map_err(io)?;
            }
            enc.u8(t.bands.len() as u8).map_err(io)?;
            enc.u32(t.nodata.iter().filter(|&&n| !n).count() as u32)
                .map_err(io)?;
            for (idx, _) in t.nodata.iter().enumerate().filter(|(_, &n)| !n) {
                enc.u32(idx as u32).map_err(io)?;
                for b in &t.bands {
                    enc.f64(b[idx]).map_err(io)?;
                }
            }
        }
        enc.finish().map_err(io)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        const KIND: &str = "tile store";
        let mut dec = codec::open(path, KIND)?;
        dec.header(MAGIC, VERSION)?;
        let rect = Rect::new(dec.f64()?, dec.f64()?, dec.f64()?, dec.f64()?);
        let domain = Domain::new(rect)?;
        let count = dec.u64()?;
        let mut tiles = BTreeMap::new();
        for _ in 0..count {
            let division = dec.u32()?;
            let anchor_col = dec.u32()?;
            let anchor_row = dec.u32()?;
            let type_id = dec.u32()?;
            let resolution_m = dec.u32()?;
            let temporal_s = dec.u32()?;
            let date_id = dec.u32()?;
            let resolution = Granularity::from_meters(resolution_m)?;
            let bands = dec.u8()? as usize;
            if !(1..=2).contains(&bands) {
                return Err(Error::format(KIND, format!("{bands} bands")));
            }
            let anchor = CellKey::new(Granularity::M5000, anchor_col, anchor_row);
            let mut tile = HeatmapTile::empty(anchor, type_id, resolution, date_id, bands);
            tile.temporal_s = temporal_s;
            let data = dec.u32()? as usize;
            for _ in 0..data {
                let idx = dec.u32()? as usize;
                if idx >= tile.nodata.len() {
                    return Err(Error::format(
                        KIND,
                        format!("pixel index {idx} out of range"),
                    ));
                }
                tile.nodata[idx] = false;
                for b in 0..bands {
                    tile.bands[b][idx] = dec.f64()?;
                }
            }
            let key = TileKey {
                division,
                anchor_col,
                anchor_row,
                type_id,
                resolution_m,
                date_id,
            };
            tiles.insert(key, tile);
        }
        Ok(TileStore { domain, tiles })
    }
}
