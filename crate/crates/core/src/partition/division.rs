use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Domain, Rect, LATTICE_M};
use crate::grid::{CellKey, Granularity};

use super::grid::CountGrid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialDivision {
    pub id: u32,
    pub rect: Rect,
    pub count: u64,
}

/// A static partition of the domain into lattice-aligned rectangles.
#[derive(Debug, Clone, PartialEq)]
pub struct DivisionSet {
    pub domain: Domain,
    /// Ordered by id.
    pub divisions: Vec<SpatialDivision>,
}

impl DivisionSet {
    pub fn len(&self) -> usize {
        self.divisions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.divisions.is_empty()
    }

    pub fn get(&self, id: u32) -> Option<&SpatialDivision> {
        self.divisions
            .binary_search_by_key(&id, |d| d.id)
            .ok()
            .map(|i| &self.divisions[i])
    }

    /// Checks lattice alignment and that the rectangles tile the domain
    /// exactly once.
    pub fn validate(&self) -> Result<()> {
        self.index().map(|_| ())
    }

    /// Lattice-cell lookup table; fails when the set is not a partition.
    pub fn index(&self) -> Result<DivisionIndex> {
        let (w, h) = self.domain.lattice_dims();
        let (ox, oy) = self.domain.origin();
        let mut lookup = vec![0u32; (w * h) as usize];
        let lattice = |v: f64, o: f64| -> Option<u32> {
            let k = (v - o) / LATTICE_M;
            (k.fract() == 0.0 && k >= 0.0).then_some(k as u32)
        };
        for d in &self.divisions {
            let bad = |why: &str| Error::Validation(format!("division {} {}: {why}", d.id, d.rect));
            if d.id == 0 {
                return Err(bad("id 0 is reserved"));
            }
            let (Some(c0), Some(r0), Some(c1), Some(r1)) = (
                lattice(d.rect.x_min, ox),
                lattice(d.rect.y_min, oy),
                lattice(d.rect.x_max, ox),
                lattice(d.rect.y_max, oy),
            ) else {
                return Err(bad("corner off the 5000 m lattice"));
            };
            if c0 >= c1 || r0 >= r1 || c1 > w || r1 > h {
                return Err(bad("empty or outside the domain"));
            }
            for r in r0..r1 {
                for c in c0..c1 {
                    let slot = &mut lookup[(r * w + c) as usize];
                    if *slot != 0 {
                        return Err(bad(&format!("overlaps division {}", *slot)));
                    }
                    *slot = d.id;
                }
            }
        }
        if let Some(i) = lookup.iter().position(|&id| id == 0) {
            return Err(Error::Validation(format!(
                "lattice cell ({}, {}) is not covered",
                i as u32 % w,
                i as u32 / w
            )));
        }
        Ok(DivisionIndex {
            domain: self.domain,
            width: w,
            lookup,
        })
    }

    /// Per-division totals recomputed from `grid`, in id order.
    pub fn recount(&self, grid: &CountGrid) -> Vec<u64> {
        let index = self.index().expect("valid division set");
        let mut per_id = std::collections::HashMap::new();
        for r in 0..grid.height {
            for c in 0..grid.width {
                *per_id
                    .entry(index.lookup[(r * index.width + c) as usize])
                    .or_insert(0u64) += grid.get(c, r);
            }
        }
        self.divisions
            .iter()
            .map(|d| per_id.get(&d.id).copied().unwrap_or(0))
            .collect()
    }

    /// File layout, version 1:
    ///
    /// ```text
    /// # aisdw divisions v1
    /// # domain=<x_min>,<y_min>,<x_max>,<y_max>
    /// # lattice=5000
    /// id,x_min,y_min,x_max,y_max,count
    /// 1,...
    /// ```
    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let mut f =
            std::io::BufWriter::new(std::fs::File::create(path).map_err(|e| Error::io(path, e))?);
        let io = |e| Error::io(path, e);
        writeln!(f, "# aisdw divisions v1").map_err(io)?;
        writeln!(f, "# domain={}", self.domain.rect()).map_err(io)?;
        writeln!(f, "# lattice={LATTICE_M}").map_err(io)?;
        writeln!(f, "id,x_min,y_min,x_max,y_max,count").map_err(io)?;
        for d in &self.divisions {
            writeln!(f, "{},{},{}", d.id, d.rect, d.count).map_err(io)?;
        }
        f.flush().map_err(io)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let bad = |m: String| Error::format("division file", m);
        let mut domain = None;
        let mut divisions = Vec::new();
        let mut lines = text.lines();
        if lines.next() != Some("# aisdw divisions v1") {
            return Err(bad("missing `# aisdw divisions v1` header".into()));
        }
        for line in lines {
            if let Some(rest) = line.strip_prefix("# domain=") {
                domain = Some(Domain::new(Rect::parse(rest)?)?);
                continue;
            }
            if let Some(rest) = line.strip_prefix("# lattice=") {
                if rest.trim().parse::<f64>().ok() != Some(LATTICE_M) {
                    return Err(bad(format!("unsupported lattice {rest}")));
                }
                continue;
            }
            if line.starts_with('#') || line.starts_with("id,") || line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 6 {
                return Err(bad(format!("bad line `{line}`")));
            }
            let num = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| bad(format!("bad number in `{line}`")))
            };
            divisions.push(SpatialDivision {
                id: f[0]
                    .trim()
                    .parse()
                    .map_err(|_| bad(format!("bad id in `{line}`")))?,
                rect: Rect::new(num(f[1])?, num(f[2])?, num(f[3])?, num(f[4])?),
                count: f[5]
                    .trim()
                    .parse()
                    .map_err(|_| bad(format!("bad count in `{line}`")))?,
            });
        }
        let domain = domain.ok_or_else(|| bad("missing domain header".into()))?;
        divisions.sort_by_key(|d| d.id);
        let set = DivisionSet { domain, divisions };
        set.validate()?;
        Ok(set)
    }
}

/// O(1) point and cell to division lookup.
#[derive(Debug, Clone)]
pub struct DivisionIndex {
    domain: Domain,
    width: u32,
    lookup: Vec<u32>,
}

impl DivisionIndex {
    /// Half-open, matching `cell_of`.
    pub fn division_of_point(&self, x: f64, y: f64) -> Result<u32> {
        if !self.domain.contains(x, y) {
            return Err(Error::OutsideDomain { x, y });
        }
        let (ox, oy) = self.domain.origin();
        let c = ((x - ox) / LATTICE_M).floor() as u32;
        let r = ((y - oy) / LATTICE_M).floor() as u32;
        Ok(self.lookup[(r * self.width + c) as usize])
    }

    pub fn division_of_cell(&self, cell: &CellKey) -> Result<u32> {
        let top = cell.ancestor(Granularity::M5000);
        let height = self.lookup.len() as u32 / self.width;
        if top.col >= self.width || top.row >= height {
            let r = cell.rect(&self.domain);
            return Err(Error::OutsideDomain {
                x: r.x_min,
                y: r.y_min,
            });
        }
        Ok(self.lookup[(top.row * self.width + top.col) as usize])
    }
}
