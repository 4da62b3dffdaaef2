use serde::{Deserialize, Serialize};

use crate::geom::{Domain, Rect, LATTICE_M};
use crate::grid::{CellEvent, Granularity};

/// Dense histogram of 5000 m cell facts over the domain, row-major from
/// the domain origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountGrid {
    pub domain: Domain,
    pub width: u32,
    pub height: u32,
    pub counts: Vec<u64>,
}

impl CountGrid {
    pub fn new(domain: Domain) -> Self {
        let (width, height) = domain.lattice_dims();
        CountGrid {
            domain,
            width,
            height,
            counts: vec![0; (width * height) as usize],
        }
    }

    /// Builds a grid from explicit row-major counts; the domain origin is
    /// `origin` and the extent follows from the dimensions.
    pub fn from_counts(origin: (f64, f64), width: u32, height: u32, counts: Vec<u64>) -> Self {
        assert_eq!(counts.len(), (width * height) as usize);
        let rect = Rect::new(
            origin.0,
            origin.1,
            origin.0 + width as f64 * LATTICE_M,
            origin.1 + height as f64 * LATTICE_M,
        );
        CountGrid {
            domain: Domain::new(rect).expect("lattice-aligned by construction"),
            width,
            height,
            counts,
        }
    }

    /// Counts 5000 m cell events; events at other granularities are ignored.
    pub fn from_events<'a>(
        domain: Domain,
        events: impl IntoIterator<Item = &'a CellEvent>,
    ) -> Self {
        let mut g = CountGrid::new(domain);
        for e in events {
            if e.cell.granularity == Granularity::M5000 {
                g.add(e.cell.col, e.cell.row, 1);
            }
        }
        g
    }

    pub fn add(&mut self, col: u32, row: u32, n: u64) {
        if col < self.width && row < self.height {
            self.counts[(row * self.width + col) as usize] += n;
        }
    }

    pub fn get(&self, col: u32, row: u32) -> u64 {
        self.counts[(row * self.width + col) as usize]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub(crate) fn prefix(&self) -> PrefixSums {
        PrefixSums::new(self)
    }
}

/// Half-open rectangle of lattice cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct CellRect {
    pub c0: u32,
    pub r0: u32,
    pub c1: u32,
    pub r1: u32,
}

impl CellRect {
    pub fn width(&self) -> u32 {
        self.c1 - self.c0
    }

    pub fn height(&self) -> u32 {
        self.r1 - self.r0
    }

    pub fn clip(&self, w: u32, h: u32) -> Option<CellRect> {
        let r = CellRect {
            c0: self.c0,
            r0: self.r0,
            c1: self.c1.min(w),
            r1: self.r1.min(h),
        };
        (r.c0 < r.c1 && r.r0 < r.r1).then_some(r)
    }

    pub fn to_rect(self, domain: &Domain) -> Rect {
        let (ox, oy) = domain.origin();
        Rect::new(
            ox + self.c0 as f64 * LATTICE_M,
            oy + self.r0 as f64 * LATTICE_M,
            ox + self.c1 as f64 * LATTICE_M,
            oy + self.r1 as f64 * LATTICE_M,
        )
    }
}

/// Summed-area table for O(1) rectangle counts.
pub(crate) struct PrefixSums {
    w: usize,
    sums: Vec<u64>,
}

impl PrefixSums {
    fn new(g: &CountGrid) -> Self {
        let (w, h) = (g.width as usize, g.height as usize);
        let mut sums = vec![0u64; (w + 1) * (h + 1)];
        for r in 0..h {
            let mut row = 0;
            for c in 0..w {
                row += g.counts[r * w + c];
                sums[(r + 1) * (w + 1) + c + 1] = sums[r * (w + 1) + c + 1] + row;
            }
        }
        PrefixSums { w, sums }
    }

    pub fn sum(&self, r: &CellRect) -> u64 {
        let at = |c: u32, row: u32| self.sums[row as usize * (self.w + 1) + c as usize];
        at(r.c1, r.r1) + at(r.c0, r.r0) - at(r.c0, r.r1) - at(r.c1, r.r0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_sums_match_brute_force() {
        let counts: Vec<u64> = (0..35).map(|i| (i * 7 % 11) as u64).collect();
        let g = CountGrid::from_counts((0.0, 0.0), 7, 5, counts);
        let p = g.prefix();
        for c0 in 0..7 {
            for c1 in c0 + 1..=7 {
                for r0 in 0..5 {
                    for r1 in r0 + 1..=5 {
                        let rect = CellRect { c0, r0, c1, r1 };
                        let mut brute = 0;
                        for r in r0..r1 {
                            for c in c0..c1 {
                                brute += g.get(c, r);
                            }
                        }
                        assert_eq!(p.sum(&rect), brute);
                    }
                }
            }
        }
    }
}
