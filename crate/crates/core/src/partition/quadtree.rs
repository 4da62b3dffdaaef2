//! Region quad-tree divisions over a power-of-two square of lattice cells.

use super::division::{DivisionSet, SpatialDivision};
use super::grid::{CellRect, CountGrid};

struct Leaf {
    /// Unclipped square, used to decide whether another split is possible.
    square: CellRect,
    rect: CellRect,
    count: u64,
    created: u32,
}

/// Greedy quad-tree: the global square has side `2^n` lattice cells, the
/// smallest that covers the grid. The leaf with the highest count (ties to
/// the earliest created) is split into quadrants, clipped to the domain,
/// until the budget would be exceeded or that leaf is a single lattice
/// cell. Zero-count quadrants are kept as divisions.
pub fn build_quadtree(grid: &CountGrid, max_divisions: usize) -> DivisionSet {
    let max_divisions = max_divisions.max(1);
    let prefix = grid.prefix();
    let side = grid.width.max(grid.height).max(1).next_power_of_two();
    let root = CellRect {
        c0: 0,
        r0: 0,
        c1: side,
        r1: side,
    };
    let whole = root.clip(grid.width, grid.height).expect("non-empty grid");
    let mut created = 1;
    let mut leaves = vec![Leaf {
        square: root,
        rect: whole,
        count: prefix.sum(&whole),
        created,
    }];

    loop {
        let best = leaves
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.count.cmp(&b.count).then(b.created.cmp(&a.created)))
            .map(|(i, _)| i)
            .expect("at least one leaf");
        let sq = leaves[best].square;
        if sq.width() <= 1 {
            break;
        }
        let half = sq.width() / 2;
        let children: Vec<CellRect> = [(0, 0), (1, 0), (0, 1), (1, 1)]
            .into_iter()
            .map(|(i, j)| CellRect {
                c0: sq.c0 + i * half,
                r0: sq.r0 + j * half,
                c1: sq.c0 + (i + 1) * half,
                r1: sq.r0 + (j + 1) * half,
            })
            .collect();
        let clipped: Vec<(CellRect, CellRect)> = children
            .into_iter()
            .filter_map(|s| s.clip(grid.width, grid.height).map(|r| (s, r)))
            .collect();
        if leaves.len() - 1 + clipped.len() > max_divisions {
            break;
        }
        leaves.swap_remove(best);
        for (square, rect) in clipped {
            created += 1;
            leaves.push(Leaf {
                square,
                rect,
                count: prefix.sum(&rect),
                created,
            });
        }
    }

    leaves.sort_by_key(|l| l.created);
    DivisionSet {
        domain: grid.domain,
        divisions: leaves
            .into_iter()
            .enumerate()
            .map(|(i, l)| SpatialDivision {
                id: i as u32 + 1,
                rect: l.rect.to_rect(&grid.domain),
                count: l.count,
            })
            .collect(),
    }
}
