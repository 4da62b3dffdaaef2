use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Domain, Rect};

/// Cell side length. Each level nests exactly inside the next.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub enum Granularity {
    M50,
    M200,
    M1000,
    M5000,
}

impl Granularity {
    pub const ALL: [Granularity; 4] = [
        Granularity::M50,
        Granularity::M200,
        Granularity::M1000,
        Granularity::M5000,
    ];

    pub fn meters(self) -> u32 {
        match self {
            Granularity::M50 => 50,
            Granularity::M200 => 200,
            Granularity::M1000 => 1000,
            Granularity::M5000 => 5000,
        }
    }

    pub fn size(self) -> f64 {
        self.meters() as f64
    }

    pub fn from_meters(m: u32) -> Result<Self> {
        match m {
            50 => Ok(Granularity::M50),
            200 => Ok(Granularity::M200),
            1000 => Ok(Granularity::M1000),
            5000 => Ok(Granularity::M5000),
            other => Err(Error::Granularity(other)),
        }
    }

    pub fn parent(self) -> Option<Granularity> {
        match self {
            Granularity::M50 => Some(Granularity::M200),
            Granularity::M200 => Some(Granularity::M1000),
            Granularity::M1000 => Some(Granularity::M5000),
            Granularity::M5000 => None,
        }
    }

    /// Cells of this granularity along one side of a 5000 m cell.
    pub fn per_lattice_cell(self) -> u32 {
        5000 / self.meters()
    }
}

impl TryFrom<u32> for Granularity {
    type Error = Error;

    fn try_from(m: u32) -> Result<Self> {
        Granularity::from_meters(m)
    }
}

impl From<Granularity> for u32 {
    fn from(g: Granularity) -> u32 {
        g.meters()
    }
}

impl fmt::Display for Granularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}m", self.meters())
    }
}

/// A grid cell addressed relative to the domain origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellKey {
    pub granularity: Granularity,
    pub col: u32,
    pub row: u32,
}

impl CellKey {
    pub fn new(granularity: Granularity, col: u32, row: u32) -> Self {
        CellKey {
            granularity,
            col,
            row,
        }
    }

    pub fn parent(&self) -> Result<CellKey> {
        let up = self
            .granularity
            .parent()
            .ok_or(Error::NoParent(self.granularity.meters()))?;
        let f = up.meters() / self.granularity.meters();
        Ok(CellKey::new(up, self.col / f, self.row / f))
    }

    /// The enclosing cell at a coarser (or equal) granularity.
    pub fn ancestor(&self, g: Granularity) -> CellKey {
        assert!(
            g >= self.granularity,
            "{g} is finer than {}",
            self.granularity
        );
        let f = g.meters() / self.granularity.meters();
        CellKey::new(g, self.col / f, self.row / f)
    }

    pub fn rect(&self, domain: &Domain) -> Rect {
        let (ox, oy) = domain.origin();
        let g = self.granularity.size();
        Rect::new(
            ox + self.col as f64 * g,
            oy + self.row as f64 * g,
            ox + (self.col + 1) as f64 * g,
            oy + (self.row + 1) as f64 * g,
        )
    }
}

impl fmt::Display for CellKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({},{})", self.granularity, self.col, self.row)
    }
}

/// Half-open floor indexing: boundary points go to the cell on their upper
/// (right/top) side.
pub fn cell_of(domain: &Domain, x: f64, y: f64, g: Granularity) -> Result<CellKey> {
    if !domain.contains(x, y) {
        return Err(Error::OutsideDomain { x, y });
    }
    let (ox, oy) = domain.origin();
    let s = g.size();
    Ok(CellKey::new(
        g,
        ((x - ox) / s).floor() as u32,
        ((y - oy) / s).floor() as u32,
    ))
}
